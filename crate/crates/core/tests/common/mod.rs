//! Random corpora shared by the integration tests.
#![allow(dead_code)]

use tightprod::factorization::EdgeColoring;
use tightprod::graph::{MultiGraph, Permutation, PermutationGraph};
use tightprod::product::NeighborlyFamily;
use tightprod::rng::{below, random_permutation, stream, Stream};

pub fn rng(seed: u64, stream_id: u64) -> Stream {
    stream(seed, 0xC0, stream_id)
}

pub fn coin(rng: &mut Stream) -> bool {
    below(rng, 2) == 1
}

/// Global shape forced on a random permutation graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Plain,
    /// Every permutation swaps the halves `[0, n/2)` and `[n/2, n)`.
    Bipartite,
    /// Every permutation preserves the blocks `[0, h)` and `[h, n)`.
    Split(usize),
}

impl Shape {
    /// A shape valid for `n` vertices; pairings need even blocks.
    pub fn pick(rng: &mut Stream, n: usize, pairing: bool) -> Shape {
        let step = if pairing { 2 } else { 1 };
        match below(rng, 3) {
            1 if n.is_multiple_of(2) && n >= 2 => Shape::Bipartite,
            2 if n >= 2 * step => Shape::Split(step * (1 + below(rng, n / step - 1))),
            _ => Shape::Plain,
        }
    }
}

fn shuffled(values: &[usize], rng: &mut Stream) -> Vec<usize> {
    let p = random_permutation(values.len(), rng);
    p.images().iter().map(|&i| values[i]).collect()
}

fn blocks(n: usize, shape: Shape) -> Vec<Vec<usize>> {
    match shape {
        Shape::Plain => vec![(0..n).collect()],
        Shape::Bipartite => vec![(0..n / 2).collect(), (n / 2..n).collect()],
        Shape::Split(h) => vec![(0..h).collect(), (h..n).collect()],
    }
}

pub fn shaped_permutation(n: usize, shape: Shape, rng: &mut Stream) -> Permutation {
    let mut images = vec![0; n];
    let parts = blocks(n, shape);
    match shape {
        Shape::Bipartite => {
            for (from, to) in [(&parts[0], &parts[1]), (&parts[1], &parts[0])] {
                for (&x, y) in from.iter().zip(shuffled(to, rng)) {
                    images[x] = y;
                }
            }
        }
        _ => {
            for part in &parts {
                for (&x, y) in part.iter().zip(shuffled(part, rng)) {
                    images[x] = y;
                }
            }
        }
    }
    Permutation::new(images).unwrap()
}

pub fn shaped_pairing(n: usize, shape: Shape, rng: &mut Stream) -> Permutation {
    let mut images = vec![0; n];
    let parts = blocks(n, shape);
    let mut join = |a: usize, b: usize| {
        images[a] = b;
        images[b] = a;
    };
    match shape {
        Shape::Bipartite => {
            for (&a, b) in parts[0].iter().zip(shuffled(&parts[1], rng)) {
                join(a, b);
            }
        }
        _ => {
            for part in &parts {
                for pair in shuffled(part, rng).chunks(2) {
                    join(pair[0], pair[1]);
                }
            }
        }
    }
    Permutation::new(images).unwrap()
}

/// `degree / 2` permutations plus a pairing when `degree` is odd.
pub fn shaped_graph(n: usize, degree: usize, shape: Shape, rng: &mut Stream) -> PermutationGraph {
    let gens = (0..degree / 2)
        .map(|_| shaped_permutation(n, shape, rng))
        .collect();
    let pairing = (degree % 2 == 1).then(|| shaped_pairing(n, shape, rng));
    PermutationGraph::new(n, gens, pairing).unwrap()
}

/// Random vertex count in `1..=max` (even when `degree` is odd) and shape.
pub fn random_regular(rng: &mut Stream, max: usize, degree: usize) -> PermutationGraph {
    let n = if degree % 2 == 1 {
        2 * (1 + below(rng, max / 2))
    } else {
        1 + below(rng, max)
    };
    let shape = Shape::pick(rng, n, degree % 2 == 1);
    shaped_graph(n, degree, shape, rng)
}

/// A cubic graph as the union of three pairings, colored by pairing.
pub fn colored_cubic(rng: &mut Stream, max: usize) -> (MultiGraph, EdgeColoring) {
    let n = 2 * (1 + below(rng, max / 2));
    let shape = Shape::pick(rng, n, true);
    let mut g = MultiGraph::empty(n);
    let mut colors = Vec::new();
    for c in 0..3 {
        let p = shaped_pairing(n, shape, rng);
        for v in 0..n {
            if v < p.apply(v) {
                g.add_edge(v, p.apply(v)).unwrap();
                colors.push(c);
            }
        }
    }
    (
        g,
        EdgeColoring {
            colors,
            num_colors: 3,
        },
    )
}

/// Random family for two permutation graphs with the same number of
/// generators and pairing: generator `j` of the first is sent to generator
/// `rho(j)` of the second or its inverse, and pairings to the pairing.
pub fn random_family(
    p1: &PermutationGraph,
    p2: &PermutationGraph,
    rng: &mut Stream,
) -> NeighborlyFamily {
    let k = p1.generators().len();
    assert_eq!(k, p2.generators().len());
    let rho = random_permutation(k, rng);
    let letters: Vec<Permutation> = (0..k)
        .map(|j| {
            let p = p2.generators()[rho.apply(j)].clone();
            if coin(rng) {
                p.inverse()
            } else {
                p
            }
        })
        .collect();
    let mut sigma = Vec::new();
    for letter in &letters {
        for _ in 0..p1.vertex_count() {
            sigma.push(letter.clone());
            sigma.push(letter.inverse());
        }
    }
    if let Some(q) = p1.pairing() {
        let involution = p2.pairing().expect("both factors have pairings").clone();
        for v in 0..p1.vertex_count() {
            if v < q.apply(v) {
                sigma.push(involution.clone());
                sigma.push(involution.clone());
            }
        }
    }
    NeighborlyFamily { sigma }
}

/// Configuration model: each vertex gets a degree in `0..=3` (all 3 when
/// `cubic`) and stubs are paired uniformly, so loops and parallel edges
/// occur. A leftover stub is dropped.
pub fn configuration_subcubic(rng: &mut Stream, n: usize, cubic: bool) -> MultiGraph {
    let mut stubs = Vec::new();
    for v in 0..n {
        let d = if cubic { 3 } else { below(rng, 4) };
        stubs.extend(std::iter::repeat_n(v, d));
    }
    let order = shuffled(&stubs, rng);
    let mut g = MultiGraph::empty(n);
    for pair in order.chunks_exact(2) {
        g.add_edge(pair[0], pair[1]).unwrap();
    }
    g
}

/// Uniform loopless cubic configuration on an even `n >= 2`, by rejection.
pub fn loopless_cubic(rng: &mut Stream, n: usize) -> MultiGraph {
    loop {
        let g = configuration_subcubic(rng, n, true);
        if (0..g.edge_count()).all(|e| !g.is_loop(e)) {
            return g;
        }
    }
}

/// Multiset inclusion with clusters: every value of `sub` must have at
/// least as many partners within `tol` in `sup` as it has in `sub`.
pub fn spectrum_contains(sup: &[f64], sub: &[f64], tol: f64) -> bool {
    sub.iter().all(|&x| {
        let near = |s: &[f64]| s.iter().filter(|&&y| (y - x).abs() <= tol).count();
        near(sup) >= near(sub)
    })
}

/// Vertex 2-coloring by BFS, if one exists.
pub fn two_coloring(g: &MultiGraph) -> Option<Vec<bool>> {
    let n = g.vertex_count();
    let mut side: Vec<Option<bool>> = vec![None; n];
    for s in 0..n {
        if side[s].is_some() {
            continue;
        }
        side[s] = Some(false);
        let mut queue = vec![s];
        while let Some(v) = queue.pop() {
            for &d in g.darts_at(v) {
                let w = g.dart_target(d);
                let want = !side[v].unwrap();
                match side[w] {
                    None => {
                        side[w] = Some(want);
                        queue.push(w);
                    }
                    Some(x) if x != want => return None,
                    _ => {}
                }
            }
        }
    }
    Some(side.into_iter().map(Option::unwrap).collect())
}

/// Number of connected components by union-find.
pub fn component_count(g: &MultiGraph) -> usize {
    let mut parent: Vec<usize> = (0..g.vertex_count()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (u, v) in g.edges() {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a] = b;
    }
    (0..g.vertex_count())
        .filter(|&x| find(&mut parent, x) == x)
        .count()
}

/// `Tr(A^length)` by repeated integer matrix products.
pub fn trace_of_power(g: &MultiGraph, length: usize) -> u128 {
    let n = g.vertex_count();
    let mut a = vec![vec![0u128; n]; n];
    for (u, v) in g.edges() {
        a[u][v] += 1;
        a[v][u] += 1;
    }
    let mut p: Vec<Vec<u128>> = (0..n)
        .map(|i| (0..n).map(|j| u128::from(i == j)).collect())
        .collect();
    for _ in 0..length {
        let mut q = vec![vec![0u128; n]; n];
        for i in 0..n {
            for k in 0..n {
                if p[i][k] != 0 {
                    for j in 0..n {
                        q[i][j] += p[i][k] * a[k][j];
                    }
                }
            }
        }
        p = q;
    }
    (0..n).map(|i| p[i][i]).sum()
}
