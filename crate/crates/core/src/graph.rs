//! Dart-based undirected multigraphs and permutations.
//!
//! Edge `e` owns the two darts `2e` and `2e + 1`; the dart involution is
//! therefore `d ^ 1`. A loop has both of its darts at the same vertex and
//! so contributes two to that vertex's degree and lists the vertex twice
//! among its neighbors.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::linalg::Matrix;

pub type Vertex = usize;
pub type EdgeId = usize;
pub type Dart = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("permutation on {got} points where {expected} were expected")]
    SizeMismatch { expected: usize, got: usize },
    #[error("pairing is not a fixed-point-free involution at {0}")]
    BadPairing(Vertex),
}

/// The edge-mate of a dart.
#[inline]
pub fn mate(d: Dart) -> Dart {
    d ^ 1
}

/// The edge a dart belongs to.
#[inline]
pub fn edge_of(d: Dart) -> EdgeId {
    d >> 1
}

/// Undirected multigraph with loops, stored as darts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    dart_vertex: Vec<Vertex>,
    darts_at: Vec<Vec<Dart>>,
}

impl MultiGraph {
    pub fn empty(n: usize) -> Self {
        MultiGraph {
            n,
            dart_vertex: Vec::new(),
            darts_at: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list; edge `i` of the result is `edges[i]`
    /// with dart `2i` at its first endpoint.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<EdgeId, GraphError> {
        for w in [u, v] {
            if w >= self.n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: w,
                    n: self.n,
                });
            }
        }
        let e = self.dart_vertex.len() / 2;
        self.dart_vertex.push(u);
        self.dart_vertex.push(v);
        self.darts_at[u].push(2 * e);
        self.darts_at[v].push(2 * e + 1);
        Ok(e)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.dart_vertex.len() / 2
    }

    pub fn dart_count(&self) -> usize {
        self.dart_vertex.len()
    }

    /// Vertex a dart is attached to.
    #[inline]
    pub fn dart_vertex(&self, d: Dart) -> Vertex {
        self.dart_vertex[d]
    }

    /// Vertex at the far end of a dart's edge.
    #[inline]
    pub fn dart_target(&self, d: Dart) -> Vertex {
        self.dart_vertex[mate(d)]
    }

    pub fn endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        (self.dart_vertex[2 * e], self.dart_vertex[2 * e + 1])
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (0..self.edge_count()).map(|e| self.endpoints(e))
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        let (u, v) = self.endpoints(e);
        u == v
    }

    /// Darts attached to `v`, in insertion order.
    pub fn darts_at(&self, v: Vertex) -> &[Dart] {
        &self.darts_at[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.darts_at[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.darts_at.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The common degree, if every vertex has the same one.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.darts_at.first().map(Vec::len)?;
        self.darts_at.iter().all(|ds| ds.len() == d).then_some(d)
    }

    /// Neighbor multiset of `v`: one entry per dart, so a loop lists `v` twice.
    pub fn neighbors(&self, v: Vertex) -> Result<Vec<Vertex>, GraphError> {
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.n,
            });
        }
        Ok(self.darts_at[v]
            .iter()
            .map(|&d| self.dart_target(d))
            .collect())
    }

    /// Number of edges joining `u` and `v` (loops at `u` when `u == v`).
    pub fn multiplicity(&self, u: Vertex, v: Vertex) -> usize {
        let count = self.darts_at[u]
            .iter()
            .filter(|&&d| self.dart_target(d) == v)
            .count();
        if u == v {
            count / 2
        } else {
            count
        }
    }

    /// A[u][v] counts u-v edges; each loop adds 2 on the diagonal so row
    /// sums equal degrees.
    pub fn adjacency_counts(&self) -> Vec<Vec<u32>> {
        let mut a = vec![vec![0u32; self.n]; self.n];
        for (u, v) in self.edges() {
            if u == v {
                a[u][u] += 2;
            } else {
                a[u][v] += 1;
                a[v][u] += 1;
            }
        }
        a
    }

    pub fn adjacency_matrix(&self) -> Matrix {
        let mut a = Matrix::zeros(self.n);
        for (u, v) in self.edges() {
            if u == v {
                a.add(u, u, 2.0);
            } else {
                a.add(u, v, 1.0);
                a.add(v, u, 1.0);
            }
        }
        a
    }

    /// Subgraph keeping the edges for which `keep` holds, on all vertices.
    /// Returns the subgraph and, for each of its edges, the original id.
    pub fn edge_subgraph(&self, mut keep: impl FnMut(EdgeId) -> bool) -> (MultiGraph, Vec<EdgeId>) {
        let mut sub = MultiGraph::empty(self.n);
        let mut origin = Vec::new();
        for e in 0..self.edge_count() {
            if keep(e) {
                let (u, v) = self.endpoints(e);
                sub.add_edge(u, v).expect("endpoints in range");
                origin.push(e);
            }
        }
        (sub, origin)
    }

    /// Subgraph induced by `vertices` (relabelled densely in the given order),
    /// restricted to edges accepted by `keep`. Returns the subgraph, the
    /// original vertex of each new vertex, and the original id of each new edge.
    pub fn induced_subgraph(
        &self,
        vertices: &[Vertex],
        mut keep: impl FnMut(EdgeId) -> bool,
    ) -> (MultiGraph, Vec<Vertex>, Vec<EdgeId>) {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut sub = MultiGraph::empty(vertices.len());
        let mut origin = Vec::new();
        for e in 0..self.edge_count() {
            let (u, v) = self.endpoints(e);
            if index[u] != usize::MAX && index[v] != usize::MAX && keep(e) {
                sub.add_edge(index[u], index[v])
                    .expect("endpoints in range");
                origin.push(e);
            }
        }
        (sub, vertices.to_vec(), origin)
    }

    /// Disjoint union; the vertices and edges of `other` follow those of `self`.
    pub fn disjoint_union(&self, other: &MultiGraph) -> MultiGraph {
        let mut g = self.clone();
        g.n += other.n;
        g.darts_at.extend(vec![Vec::new(); other.n]);
        for (u, v) in other.edges() {
            g.add_edge(u + self.n, v + self.n)
                .expect("endpoints in range");
        }
        g
    }

    /// Degree-preserving bipartite double cover on `{0, 1} x V`; vertex
    /// `(i, v)` has index `i * n + v`. Edge `e = uv` lifts to edges `2e`
    /// = `(0,u)(1,v)` and `2e + 1` = `(1,u)(0,v)`.
    pub fn standard_two_lift(&self) -> MultiGraph {
        let n = self.n;
        let mut lift = MultiGraph::empty(2 * n);
        for (u, v) in self.edges() {
            lift.add_edge(u, n + v).expect("in range");
            lift.add_edge(n + u, v).expect("in range");
        }
        lift
    }

    pub fn structure(&self) -> Structure {
        Structure::of(self)
    }
}

impl fmt::Display for MultiGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiGraph(n={}, m={})", self.n, self.edge_count())
    }
}

/// BFS/DFS-derived structural facts about a multigraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    pub regular_degree: Option<usize>,
    pub connected: bool,
    /// A proper 2-coloring of the vertices when one exists.
    pub bipartition: Option<Vec<bool>>,
    pub bridges: Vec<EdgeId>,
    /// Component index of each vertex.
    pub component_of: Vec<usize>,
    pub component_count: usize,
}

impl Structure {
    fn of(g: &MultiGraph) -> Self {
        let n = g.vertex_count();
        let mut component_of = vec![usize::MAX; n];
        let mut side = vec![false; n];
        let mut bipartite = true;
        let mut count = 0;
        for s in 0..n {
            if component_of[s] != usize::MAX {
                continue;
            }
            component_of[s] = count;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &d in g.darts_at(v) {
                    let w = g.dart_target(d);
                    if component_of[w] == usize::MAX {
                        component_of[w] = count;
                        side[w] = !side[v];
                        queue.push_back(w);
                    } else if side[w] == side[v] {
                        bipartite = false;
                    }
                }
            }
            count += 1;
        }
        Structure {
            regular_degree: g.regular_degree(),
            connected: count <= 1,
            bipartition: bipartite.then_some(side),
            bridges: bridges(g),
            component_of,
            component_count: count,
        }
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition.is_some()
    }

    /// Vertices grouped by component, each group ascending.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut groups = vec![Vec::new(); self.component_count];
        for (v, &c) in self.component_of.iter().enumerate() {
            groups[c].push(v);
        }
        groups
    }
}

/// Bridges by iterative lowpoint DFS. The DFS never re-enters through the
/// dart it arrived by, so a parallel edge correctly closes a cycle and loops
/// never qualify.
pub fn bridges(g: &MultiGraph) -> Vec<EdgeId> {
    let n = g.vertex_count();
    let mut order = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut found = Vec::new();
    let mut clock = 0;
    for root in 0..n {
        if order[root] != usize::MAX {
            continue;
        }
        // (vertex, dart we arrived by, next dart index to scan)
        let mut stack: Vec<(Vertex, Option<Dart>, usize)> = vec![(root, None, 0)];
        order[root] = clock;
        low[root] = clock;
        clock += 1;
        while let Some(top) = stack.last_mut() {
            let (v, via, next) = *top;
            if let Some(&d) = g.darts_at(v).get(next) {
                top.2 += 1;
                if Some(mate(d)) == via {
                    continue;
                }
                let w = g.dart_target(d);
                if order[w] == usize::MAX {
                    order[w] = clock;
                    low[w] = clock;
                    clock += 1;
                    stack.push((w, Some(d), 0));
                } else {
                    low[v] = low[v].min(order[w]);
                }
            } else {
                stack.pop();
                if let (Some(d), Some(parent)) = (via, stack.last()) {
                    let p = parent.0;
                    low[p] = low[p].min(low[v]);
                    if low[v] > order[p] {
                        found.push(edge_of(d));
                    }
                }
            }
        }
    }
    found.sort_unstable();
    found
}

/// A permutation of `{0, .., n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, GraphError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n {
                return Err(GraphError::NotAPermutation(format!(
                    "image {x} out of range 0..{n}"
                )));
            }
            if seen[x] {
                return Err(GraphError::NotAPermutation(format!("image {x} repeated")));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y] = x;
        }
        Permutation { images: inv }
    }

    /// `self` first, then `next`: `x -> next(self(x))`.
    pub fn then(&self, next: &Permutation) -> Permutation {
        Permutation {
            images: self.images.iter().map(|&y| next.images[y]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x == y)
    }

    pub fn is_fixed_point_free_involution(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(x, &y)| y != x && self.images[y] == x)
    }

    /// Disjoint cycles, each starting at its minimum element, ordered by it.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// `G(sigma_1, .., sigma_d)`, optionally with a fixed-point-free pairing
/// contributing one extra perfect matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationGraph {
    n: usize,
    generators: Vec<Permutation>,
    pairing: Option<Permutation>,
}

impl PermutationGraph {
    pub fn new(
        n: usize,
        generators: Vec<Permutation>,
        pairing: Option<Permutation>,
    ) -> Result<Self, GraphError> {
        for p in generators.iter().chain(&pairing) {
            if p.len() != n {
                return Err(GraphError::SizeMismatch {
                    expected: n,
                    got: p.len(),
                });
            }
        }
        if let Some(p) = &pairing {
            if let Some(x) = (0..n).find(|&x| p.apply(x) == x || p.apply(p.apply(x)) != x) {
                return Err(GraphError::BadPairing(x));
            }
        }
        Ok(PermutationGraph {
            n,
            generators,
            pairing,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn pairing(&self) -> Option<&Permutation> {
        self.pairing.as_ref()
    }

    pub fn degree(&self) -> usize {
        2 * self.generators.len() + usize::from(self.pairing.is_some())
    }

    /// Generator `i` contributes edge `i * n + v` = `{v, sigma_i(v)}` with its
    /// first dart at `v`; pairing edges follow, one per pair `v < pairing(v)`.
    pub fn to_multigraph(&self) -> MultiGraph {
        let mut g = MultiGraph::empty(self.n);
        for sigma in &self.generators {
            for v in 0..self.n {
                g.add_edge(v, sigma.apply(v))
                    .expect("permutation images in range");
            }
        }
        if let Some(p) = &self.pairing {
            for v in 0..self.n {
                if v < p.apply(v) {
                    g.add_edge(v, p.apply(v))
                        .expect("permutation images in range");
                }
            }
        }
        g
    }
}

/// Builds `G(sigma_1, .., sigma_d)` (plus pairing) as a multigraph.
pub fn from_permutations(pg: &PermutationGraph) -> MultiGraph {
    pg.to_multigraph()
}

/// Named graph families used throughout tests, examples and the CLI.
pub mod families {
    use super::*;

    pub fn cycle(n: usize) -> MultiGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        MultiGraph::from_edges(n, &edges).expect("in range")
    }

    pub fn path(n: usize) -> MultiGraph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        MultiGraph::from_edges(n, &edges).expect("in range")
    }

    pub fn complete(n: usize) -> MultiGraph {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        MultiGraph::from_edges(n, &edges).expect("in range")
    }

    pub fn complete_bipartite(a: usize, b: usize) -> MultiGraph {
        let edges: Vec<_> = (0..a)
            .flat_map(|i| (0..b).map(move |j| (i, a + j)))
            .collect();
        MultiGraph::from_edges(a + b, &edges).expect("in range")
    }

    /// Outer 5-cycle 0..5, inner pentagram 5..10, spokes i - (i + 5).
    pub fn petersen() -> MultiGraph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
            edges.push((i, 5 + i));
        }
        MultiGraph::from_edges(10, &edges).expect("in range")
    }

    /// The `n`-prism: two `n`-cycles joined by a perfect matching.
    pub fn prism(n: usize) -> MultiGraph {
        let mut edges = Vec::new();
        for i in 0..n {
            edges.push((i, (i + 1) % n));
            edges.push((n + i, n + (i + 1) % n));
            edges.push((i, n + i));
        }
        MultiGraph::from_edges(2 * n, &edges).expect("in range")
    }

    pub fn cube() -> MultiGraph {
        let mut edges = Vec::new();
        for v in 0..8usize {
            for bit in 0..3 {
                let w = v ^ (1 << bit);
                if v < w {
                    edges.push((v, w));
                }
            }
        }
        MultiGraph::from_edges(8, &edges).expect("in range")
    }

    /// Two triangles joined by the bridge `2 - 5`.
    pub fn two_triangles_bridged() -> MultiGraph {
        MultiGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 5)])
            .expect("in range")
    }

    /// Cubic graph with a bridge: two copies of a triangle with one doubled
    /// side, joined at their third vertices by the bridge `2 - 5` (edge 8).
    pub fn cubic_with_bridge() -> MultiGraph {
        MultiGraph::from_edges(
            6,
            &[
                (0, 1),
                (0, 1),
                (1, 2),
                (0, 2),
                (3, 4),
                (3, 4),
                (4, 5),
                (3, 5),
                (2, 5),
            ],
        )
        .expect("in range")
    }
}
