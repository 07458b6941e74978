//! Edge decompositions: Eulerian orientations, 2-factorizations, matchings,
//! 1-factorizations of regular bipartite graphs and exact edge coloring.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{
    edge_of, mate, Dart, EdgeId, MultiGraph, Permutation, PermutationGraph, Vertex,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorizationError {
    #[error("vertex {vertex} has odd degree {degree}")]
    OddDegree { vertex: Vertex, degree: usize },
    #[error("graph is not regular")]
    NotRegular,
    #[error("graph is {0}-regular; an even degree is required")]
    OddRegular(usize),
    #[error("edge {0} does not cross the bipartition")]
    NotBipartite(EdgeId),
    #[error("no perfect matching found in round {round}; the input is not regular bipartite")]
    NoPerfectMatching { round: usize },
}

/// An orientation of every edge, recorded per dart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    is_out: Vec<bool>,
}

impl Orientation {
    /// Whether dart `d` leaves its vertex (its edge is oriented away from it).
    pub fn is_out(&self, d: Dart) -> bool {
        self.is_out[d]
    }

    /// The dart each edge leaves from.
    pub fn out_dart(&self, e: EdgeId) -> Dart {
        if self.is_out[2 * e] {
            2 * e
        } else {
            2 * e + 1
        }
    }

    pub fn out_degree(&self, g: &MultiGraph, v: Vertex) -> usize {
        g.darts_at(v).iter().filter(|&&d| self.is_out[d]).count()
    }
}

/// Orients every edge so that in-degree equals out-degree everywhere, by
/// walking closed trails until every edge is used.
pub fn eulerian_orientation(g: &MultiGraph) -> Result<Orientation, FactorizationError> {
    for v in 0..g.vertex_count() {
        if g.degree(v) % 2 == 1 {
            return Err(FactorizationError::OddDegree {
                vertex: v,
                degree: g.degree(v),
            });
        }
    }
    let mut is_out = vec![false; g.dart_count()];
    let mut used = vec![false; g.edge_count()];
    let mut cursor = vec![0usize; g.vertex_count()];
    for start in 0..g.vertex_count() {
        let mut v = start;
        loop {
            let darts = g.darts_at(v);
            while cursor[v] < darts.len() && used[edge_of(darts[cursor[v]])] {
                cursor[v] += 1;
            }
            let Some(&d) = darts.get(cursor[v]) else {
                // even degrees force the trail to close at its start
                debug_assert_eq!(v, start);
                break;
            };
            used[edge_of(d)] = true;
            is_out[d] = true;
            v = g.dart_target(d);
        }
    }
    Ok(Orientation { is_out })
}

/// Splits a `k`-regular bipartite multigraph into `k` perfect matchings.
/// `side[v]` names the part of `v`; every edge must join the two parts.
pub fn regular_bipartite_one_factorization(
    g: &MultiGraph,
    side: &[bool],
) -> Result<Vec<Vec<EdgeId>>, FactorizationError> {
    for e in 0..g.edge_count() {
        let (u, v) = g.endpoints(e);
        if side[u] == side[v] {
            return Err(FactorizationError::NotBipartite(e));
        }
    }
    let Some(k) = g.regular_degree() else {
        return if g.vertex_count() == 0 {
            Ok(Vec::new())
        } else {
            Err(FactorizationError::NotRegular)
        };
    };
    let left: Vec<Vertex> = (0..g.vertex_count()).filter(|&v| !side[v]).collect();
    let mut removed = vec![false; g.edge_count()];
    let mut rounds = Vec::with_capacity(k);
    for round in 0..k {
        let matching = bipartite_perfect_matching(g, &left, &removed)
            .ok_or(FactorizationError::NoPerfectMatching { round })?;
        for &e in &matching {
            removed[e] = true;
        }
        rounds.push(matching);
    }
    Ok(rounds)
}

/// Kuhn's augmenting-path matching from `left`, over edges not `removed`.
/// Returns the matching edges if it saturates every vertex on both sides.
fn bipartite_perfect_matching(
    g: &MultiGraph,
    left: &[Vertex],
    removed: &[bool],
) -> Option<Vec<EdgeId>> {
    let n = g.vertex_count();
    // matched_by[w] = edge currently matching right-side vertex w
    let mut matched_by: Vec<Option<EdgeId>> = vec![None; n];
    let mut matched_edge: Vec<Option<EdgeId>> = vec![None; n];

    // greedy start
    for &u in left {
        for &d in g.darts_at(u) {
            let e = edge_of(d);
            let w = g.dart_target(d);
            if !removed[e] && matched_by[w].is_none() {
                matched_by[w] = Some(e);
                matched_edge[u] = Some(e);
                break;
            }
        }
    }

    let mut stamp = vec![0usize; n];
    for (round, &u) in left.iter().enumerate() {
        if matched_edge[u].is_some() {
            continue;
        }
        if !augment(
            g,
            u,
            removed,
            &mut matched_by,
            &mut matched_edge,
            &mut stamp,
            round + 1,
        ) {
            return None;
        }
    }
    let total = left.len();
    if 2 * total != n {
        return None;
    }
    let mut out: Vec<EdgeId> = left.iter().filter_map(|&u| matched_edge[u]).collect();
    out.sort_unstable();
    (out.len() == total).then_some(out)
}

/// Breadth-first search for an augmenting path from the free left vertex
/// `root`, flipping it when found.
fn augment(
    g: &MultiGraph,
    root: Vertex,
    removed: &[bool],
    matched_by: &mut [Option<EdgeId>],
    matched_edge: &mut [Option<EdgeId>],
    stamp: &mut [usize],
    round: usize,
) -> bool {
    let other = |e: EdgeId, x: Vertex| {
        let (a, b) = g.endpoints(e);
        if a == x {
            b
        } else {
            a
        }
    };
    // reached[w] = (left vertex, edge) through which right vertex w was reached
    let mut reached: Vec<(Vertex, EdgeId)> = vec![(usize::MAX, usize::MAX); g.vertex_count()];
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &d in g.darts_at(u) {
            let e = edge_of(d);
            let w = g.dart_target(d);
            if removed[e] || stamp[w] == round {
                continue;
            }
            stamp[w] = round;
            reached[w] = (u, e);
            match matched_by[w] {
                Some(f) => queue.push_back(other(f, w)),
                None => {
                    let mut w = w;
                    loop {
                        let (x, e) = reached[w];
                        let previous = matched_edge[x];
                        matched_by[w] = Some(e);
                        matched_edge[x] = Some(e);
                        match previous {
                            Some(p) if x != root => w = other(p, x),
                            _ => return true,
                        }
                    }
                }
            }
        }
    }
    false
}

/// A 2-factorization: factor `i` is the permutation `sigma_i` together with,
/// for each vertex `v`, the dart at `v` realizing the edge `v sigma_i(v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoFactorization {
    factors: Vec<Permutation>,
    out_darts: Vec<Vec<Dart>>,
}

impl TwoFactorization {
    pub fn factors(&self) -> &[Permutation] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Dart at `v` carrying the edge `v -> sigma_i(v)`.
    pub fn out_dart(&self, i: usize, v: Vertex) -> Dart {
        self.out_darts[i][v]
    }

    /// For every dart: its factor and whether it points along the factor's
    /// orientation.
    pub fn dart_labels(&self, dart_count: usize) -> Vec<(usize, bool)> {
        let mut labels = vec![(usize::MAX, false); dart_count];
        for (i, darts) in self.out_darts.iter().enumerate() {
            for &d in darts {
                labels[d] = (i, true);
                labels[mate(d)] = (i, false);
            }
        }
        labels
    }

    pub fn to_permutation_graph(&self, n: usize) -> PermutationGraph {
        PermutationGraph::new(n, self.factors.clone(), None).expect("factors are permutations of V")
    }
}

/// Decomposes a `2d`-regular multigraph into `d` 2-factors.
///
/// An Eulerian orientation makes the out/in incidence graph `d`-regular
/// bipartite; each of its perfect matchings is a permutation. Every factor
/// is then re-oriented canonically: each cycle starts at its minimum vertex
/// and leaves it along the smaller of its two darts in that factor.
pub fn two_factorization(g: &MultiGraph) -> Result<TwoFactorization, FactorizationError> {
    let n = g.vertex_count();
    let degree = match g.regular_degree() {
        Some(d) => d,
        None if n == 0 => 0,
        None => return Err(FactorizationError::NotRegular),
    };
    if degree % 2 == 1 {
        return Err(FactorizationError::OddRegular(degree));
    }
    let orientation = eulerian_orientation(g)?;

    // vertex v appears as tail v and head n + v
    let mut incidence = MultiGraph::empty(2 * n);
    let mut out_dart_of = Vec::with_capacity(g.edge_count());
    for e in 0..g.edge_count() {
        let d = orientation.out_dart(e);
        incidence
            .add_edge(g.dart_vertex(d), n + g.dart_target(d))
            .expect("in range");
        out_dart_of.push(d);
    }
    let side: Vec<bool> = (0..2 * n).map(|x| x >= n).collect();
    let matchings = regular_bipartite_one_factorization(&incidence, &side)?;

    let mut factors = Vec::with_capacity(matchings.len());
    let mut out_darts = Vec::with_capacity(matchings.len());
    for matching in matchings {
        let darts: Vec<Dart> = matching.iter().map(|&e| out_dart_of[e]).collect();
        let (perm, outs) = canonical_factor(g, &darts);
        factors.push(perm);
        out_darts.push(outs);
    }
    Ok(TwoFactorization { factors, out_darts })
}

/// Re-orients a 2-factor, given as one out-dart per vertex, canonically.
/// Returns the permutation and the out-dart of each vertex.
pub(crate) fn canonical_factor(g: &MultiGraph, darts: &[Dart]) -> (Permutation, Vec<Dart>) {
    let n = g.vertex_count();
    // each vertex has exactly two darts in the factor
    let mut at: Vec<Vec<Dart>> = vec![Vec::with_capacity(2); n];
    for &d in darts {
        at[g.dart_vertex(d)].push(d);
        at[g.dart_target(d)].push(mate(d));
    }
    let mut images = vec![usize::MAX; n];
    let mut outs = vec![usize::MAX; n];
    for start in 0..n {
        if images[start] != usize::MAX {
            continue;
        }
        let mut d = *at[start]
            .iter()
            .min()
            .expect("2-factor covers every vertex");
        loop {
            let v = g.dart_vertex(d);
            let w = g.dart_target(d);
            images[v] = w;
            outs[v] = d;
            if w == start {
                break;
            }
            let arrival = mate(d);
            d = *at[w]
                .iter()
                .find(|&&x| x != arrival)
                .expect("two darts per vertex");
        }
    }
    (
        Permutation::new(images).expect("2-factor yields a permutation"),
        outs,
    )
}

/// A maximum-cardinality matching by Edmonds' blossom algorithm. Parallel
/// edges collapse to one candidate (the smallest id) and loops are ignored.
pub fn max_matching(g: &MultiGraph) -> Vec<EdgeId> {
    let n = g.vertex_count();
    let mut adj: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for (u, v) in g.edges() {
        if u != v {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let mates = Blossom::new(&adj).run();
    matching_edges(g, &mates)
}

fn matching_edges(g: &MultiGraph, mates: &[Option<Vertex>]) -> Vec<EdgeId> {
    let mut out = Vec::new();
    for e in 0..g.edge_count() {
        let (u, v) = g.endpoints(e);
        if u < v
            && mates[u] == Some(v)
            && !out
                .iter()
                .any(|&f| g.endpoints(f) == (u, v) || g.endpoints(f) == (v, u))
        {
            out.push(e);
        }
        if u > v
            && mates[v] == Some(u)
            && !out
                .iter()
                .any(|&f| g.endpoints(f) == (u, v) || g.endpoints(f) == (v, u))
        {
            out.push(e);
        }
    }
    out
}

struct Blossom<'a> {
    adj: &'a [Vec<Vertex>],
    mate: Vec<Option<Vertex>>,
    parent: Vec<Option<Vertex>>,
    base: Vec<Vertex>,
    in_tree: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: VecDeque<Vertex>,
}

impl<'a> Blossom<'a> {
    fn new(adj: &'a [Vec<Vertex>]) -> Self {
        let n = adj.len();
        Blossom {
            adj,
            mate: vec![None; n],
            parent: vec![None; n],
            base: (0..n).collect(),
            in_tree: vec![false; n],
            in_blossom: vec![false; n],
            queue: VecDeque::new(),
        }
    }

    fn run(mut self) -> Vec<Option<Vertex>> {
        let n = self.adj.len();
        for v in 0..n {
            if self.mate[v].is_none() {
                if let Some(&w) = self.adj[v].iter().find(|&&w| self.mate[w].is_none()) {
                    self.mate[v] = Some(w);
                    self.mate[w] = Some(v);
                }
            }
        }
        for root in 0..n {
            if self.mate[root].is_some() {
                continue;
            }
            if let Some(mut u) = self.find_augmenting_path(root) {
                loop {
                    let pv = self.parent[u].expect("path vertex has a parent");
                    let next = self.mate[pv];
                    self.mate[u] = Some(pv);
                    self.mate[pv] = Some(u);
                    match next {
                        Some(w) => u = w,
                        None => break,
                    }
                }
            }
        }
        self.mate
    }

    fn lca(&self, mut a: Vertex, mut b: Vertex) -> Vertex {
        let mut seen = vec![false; self.adj.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            match self.mate[a] {
                Some(m) => a = self.parent[m].expect("outer vertices have parents"),
                None => break,
            }
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            let m = self.mate[b].expect("path reaches the root");
            b = self.parent[m].expect("outer vertices have parents");
        }
    }

    fn mark_path(&mut self, mut v: Vertex, b: Vertex, mut child: Vertex) {
        while self.base[v] != b {
            let m = self.mate[v].expect("blossom path is matched");
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[m]] = true;
            self.parent[v] = Some(child);
            child = m;
            v = self.parent[m].expect("outer vertices have parents");
        }
    }

    fn find_augmenting_path(&mut self, root: Vertex) -> Option<Vertex> {
        let n = self.adj.len();
        self.in_tree.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = None);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.in_tree[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for idx in 0..self.adj[v].len() {
                let to = self.adj[v][idx];
                if self.base[v] == self.base[to] || self.mate[v] == Some(to) {
                    continue;
                }
                let to_is_outer =
                    to == root || self.mate[to].is_some_and(|m| self.parent[m].is_some());
                if to_is_outer {
                    let current = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, current, to);
                    self.mark_path(to, current, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = current;
                            if !self.in_tree[i] {
                                self.in_tree[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to].is_none() {
                    self.parent[to] = Some(v);
                    match self.mate[to] {
                        None => return Some(to),
                        Some(m) => {
                            self.in_tree[m] = true;
                            self.queue.push_back(m);
                        }
                    }
                }
            }
        }
        None
    }
}

/// Largest vertex count accepted by [`max_matching_exhaustive`].
pub const EXHAUSTIVE_MATCHING_LIMIT: usize = 16;

/// Maximum matching by exhaustive dynamic programming over vertex subsets.
/// Returns `None` above [`EXHAUSTIVE_MATCHING_LIMIT`] vertices.
pub fn max_matching_exhaustive(g: &MultiGraph) -> Option<Vec<EdgeId>> {
    let n = g.vertex_count();
    if n > EXHAUSTIVE_MATCHING_LIMIT {
        return None;
    }
    let mut adj = vec![0u32; n];
    for (u, v) in g.edges() {
        if u != v {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
    }
    // best[mask] = maximum matching size within the vertex set `mask`
    let size = 1usize << n;
    let mut best = vec![0u8; size];
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << low);
        let mut value = best[rest];
        let mut options = adj[low] as usize & rest;
        while options != 0 {
            let w = options.trailing_zeros() as usize;
            options &= options - 1;
            value = value.max(1 + best[rest & !(1 << w)]);
        }
        best[mask] = value;
    }
    let mut mates: Vec<Option<Vertex>> = vec![None; n];
    let mut mask = size - 1;
    while mask != 0 {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << low);
        if best[mask] == best[rest] {
            mask = rest;
            continue;
        }
        let mut options = adj[low] as usize & rest;
        while options != 0 {
            let w = options.trailing_zeros() as usize;
            options &= options - 1;
            if best[mask] == 1 + best[rest & !(1 << w)] {
                mates[low] = Some(w);
                mates[w] = Some(low);
                mask = rest & !(1 << w);
                break;
            }
        }
    }
    Some(matching_edges(g, &mates))
}

/// Whether `edges` is a perfect matching of `g` (loops never qualify).
pub fn is_perfect_matching(g: &MultiGraph, edges: &[EdgeId]) -> bool {
    let mut covered = vec![false; g.vertex_count()];
    for &e in edges {
        if e >= g.edge_count() {
            return false;
        }
        let (u, v) = g.endpoints(e);
        if u == v || covered[u] || covered[v] {
            return false;
        }
        covered[u] = true;
        covered[v] = true;
    }
    covered.iter().all(|&c| c)
}

/// The involution pairing the endpoints of a perfect matching.
pub fn matching_involution(g: &MultiGraph, edges: &[EdgeId]) -> Option<Permutation> {
    if !is_perfect_matching(g, edges) {
        return None;
    }
    let mut images = vec![0; g.vertex_count()];
    for &e in edges {
        let (u, v) = g.endpoints(e);
        images[u] = v;
        images[v] = u;
    }
    Permutation::new(images).ok()
}

/// A coloring of edges by `0..num_colors`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColoring {
    pub colors: Vec<usize>,
    pub num_colors: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringViolation {
    #[error("coloring has {got} entries for {expected} edges")]
    Length { expected: usize, got: usize },
    #[error("edge {edge} has color {color} outside 0..{num_colors}")]
    OutOfRange {
        edge: EdgeId,
        color: usize,
        num_colors: usize,
    },
    #[error("edges {first} and {second} share vertex {vertex} and color {color}")]
    Clash {
        vertex: Vertex,
        first: EdgeId,
        second: EdgeId,
        color: usize,
    },
}

impl EdgeColoring {
    /// Checks that incident edges differ; both sides of a loop count as
    /// incident, so a loop always clashes with itself.
    pub fn validate(&self, g: &MultiGraph) -> Result<(), ColoringViolation> {
        if self.colors.len() != g.edge_count() {
            return Err(ColoringViolation::Length {
                expected: g.edge_count(),
                got: self.colors.len(),
            });
        }
        for (edge, &color) in self.colors.iter().enumerate() {
            if color >= self.num_colors {
                return Err(ColoringViolation::OutOfRange {
                    edge,
                    color,
                    num_colors: self.num_colors,
                });
            }
        }
        for v in 0..g.vertex_count() {
            let mut owner: Vec<Option<EdgeId>> = vec![None; self.num_colors];
            for &d in g.darts_at(v) {
                let e = edge_of(d);
                let c = self.colors[e];
                if let Some(first) = owner[c] {
                    return Err(ColoringViolation::Clash {
                        vertex: v,
                        first,
                        second: e,
                        color: c,
                    });
                }
                owner[c] = Some(e);
            }
        }
        Ok(())
    }

    pub fn colors_used(&self) -> usize {
        let mut seen = vec![false; self.num_colors];
        self.colors.iter().for_each(|&c| seen[c] = true);
        seen.iter().filter(|&&s| s).count()
    }

    /// Edge ids of each color class.
    pub fn classes(&self) -> Vec<Vec<EdgeId>> {
        let mut classes = vec![Vec::new(); self.num_colors];
        for (e, &c) in self.colors.iter().enumerate() {
            classes[c].push(e);
        }
        classes
    }
}

/// Why no coloring within the budget exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AbsenceCertificate {
    /// A loop can never be properly colored.
    Loop(EdgeId),
    /// Some vertex has more incident edges than colors.
    DegreeExceedsBudget { vertex: Vertex, degree: usize },
    /// The search tree was exhausted after visiting this many nodes.
    Exhausted { nodes: u64 },
}

impl std::fmt::Display for AbsenceCertificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AbsenceCertificate::Loop(e) => write!(f, "edge {e} is a loop"),
            AbsenceCertificate::DegreeExceedsBudget { vertex, degree } => {
                write!(f, "vertex {vertex} has degree {degree}, above the budget")
            }
            AbsenceCertificate::Exhausted { nodes } => {
                write!(f, "exhaustive search visited {nodes} nodes")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeChromaticOutcome {
    Colorable(EdgeColoring),
    NotColorable(AbsenceCertificate),
    /// The node cap was reached before the search finished.
    Undecided {
        nodes: u64,
    },
}

/// Default search-node cap for [`exact_edge_chromatic`].
pub const DEFAULT_NODE_CAP: u64 = 50_000_000;

/// Largest color budget the bit-set search supports.
pub const MAX_BUDGET: usize = 64;

/// Exact edge coloring with at most `budget` colors by backtracking.
///
/// Edges are picked most-constrained first (fewest colors still free at
/// both endpoints); a color not yet used anywhere is only tried once, as
/// unused colors are interchangeable.
pub fn exact_edge_chromatic(g: &MultiGraph, budget: usize, node_cap: u64) -> EdgeChromaticOutcome {
    assert!(budget <= MAX_BUDGET, "budget above {MAX_BUDGET} colors");
    if let Some(e) = (0..g.edge_count()).find(|&e| g.is_loop(e)) {
        return EdgeChromaticOutcome::NotColorable(AbsenceCertificate::Loop(e));
    }
    if let Some(v) = (0..g.vertex_count()).find(|&v| g.degree(v) > budget) {
        return EdgeChromaticOutcome::NotColorable(AbsenceCertificate::DegreeExceedsBudget {
            vertex: v,
            degree: g.degree(v),
        });
    }
    let mut search = ColorSearch {
        ends: g.edges().collect(),
        color: vec![None; g.edge_count()],
        used: vec![0; g.vertex_count()],
        full: if budget == 64 {
            u64::MAX
        } else {
            (1u64 << budget) - 1
        },
        nodes: 0,
        cap: node_cap,
    };
    match search.run(0, 0) {
        Some(true) => EdgeChromaticOutcome::Colorable(EdgeColoring {
            colors: search
                .color
                .iter()
                .map(|c| c.expect("all edges colored"))
                .collect(),
            num_colors: budget,
        }),
        Some(false) => EdgeChromaticOutcome::NotColorable(AbsenceCertificate::Exhausted {
            nodes: search.nodes,
        }),
        None => EdgeChromaticOutcome::Undecided {
            nodes: search.nodes,
        },
    }
}

struct ColorSearch {
    ends: Vec<(Vertex, Vertex)>,
    color: Vec<Option<usize>>,
    used: Vec<u64>,
    full: u64,
    nodes: u64,
    cap: u64,
}

impl ColorSearch {
    /// `Some(found)` when decided, `None` when the cap was hit.
    fn run(&mut self, colored: usize, opened: usize) -> Option<bool> {
        if colored == self.ends.len() {
            return Some(true);
        }
        self.nodes += 1;
        if self.nodes > self.cap {
            return None;
        }
        let mut pick: Option<(EdgeId, u64)> = None;
        for (e, &(u, v)) in self.ends.iter().enumerate() {
            if self.color[e].is_some() {
                continue;
            }
            let free = self.full & !(self.used[u] | self.used[v]);
            if free == 0 {
                return Some(false);
            }
            if pick.is_none_or(|(_, f)| free.count_ones() < f.count_ones()) {
                pick = Some((e, free));
            }
        }
        let (e, mut free) = pick.expect("an uncolored edge remains");
        let (u, v) = self.ends[e];
        while free != 0 {
            let c = free.trailing_zeros() as usize;
            free &= free - 1;
            if c > opened {
                break;
            }
            let bit = 1u64 << c;
            self.color[e] = Some(c);
            self.used[u] |= bit;
            self.used[v] |= bit;
            let result = self.run(colored + 1, opened.max(c + 1));
            if result != Some(false) {
                return result;
            }
            self.used[u] &= !bit;
            self.used[v] &= !bit;
            self.color[e] = None;
        }
        Some(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;
    use crate::graph::from_permutations;

    #[test]
    fn orientation_of_c5_and_k5() {
        for g in [cycle(5), complete(5)] {
            let o = eulerian_orientation(&g).unwrap();
            for v in 0..g.vertex_count() {
                assert_eq!(2 * o.out_degree(&g, v), g.degree(v));
            }
        }
    }

    #[test]
    fn orientation_splits_a_loop() {
        let g = MultiGraph::from_edges(1, &[(0, 0)]).unwrap();
        let o = eulerian_orientation(&g).unwrap();
        assert!(o.is_out(0) != o.is_out(1));
    }

    #[test]
    fn orientation_rejects_odd_degree() {
        assert!(matches!(
            eulerian_orientation(&path(3)),
            Err(FactorizationError::OddDegree { vertex: 0, .. })
        ));
    }

    #[test]
    fn two_factorization_reassembles() {
        let g = complete(5);
        let tf = two_factorization(&g).unwrap();
        assert_eq!(tf.len(), 2);
        let back = from_permutations(&tf.to_permutation_graph(5));
        assert_eq!(back.adjacency_counts(), g.adjacency_counts());

        let c6 = cycle(6);
        let tf = two_factorization(&c6).unwrap();
        assert_eq!(tf.len(), 1);
        assert_eq!(tf.factors()[0].cycles().len(), 1);

        let loops = MultiGraph::from_edges(1, &[(0, 0), (0, 0)]).unwrap();
        let tf = two_factorization(&loops).unwrap();
        assert!(tf.factors().iter().all(Permutation::is_identity));
        assert_eq!(tf.len(), 2);
    }

    #[test]
    fn two_factorization_is_canonical() {
        // cycles start at their minimum vertex along the smaller dart
        let g = cycle(5);
        let tf = two_factorization(&g).unwrap();
        assert_eq!(tf.factors()[0].apply(0), 1);
        assert_eq!(tf.out_dart(0, 0), 0);
    }

    #[test]
    fn two_factorization_rejects_odd_and_irregular() {
        assert_eq!(
            two_factorization(&complete(4)),
            Err(FactorizationError::OddRegular(3))
        );
        assert_eq!(
            two_factorization(&path(3)),
            Err(FactorizationError::NotRegular)
        );
    }

    #[test]
    fn bipartite_one_factorizations() {
        let c6 = cycle(6);
        let side: Vec<bool> = (0..6).map(|v| v % 2 == 1).collect();
        let f = regular_bipartite_one_factorization(&c6, &side).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f
            .iter()
            .all(|m| m.len() == 3 && is_perfect_matching(&c6, m)));

        let k33 = complete_bipartite(3, 3);
        let side: Vec<bool> = (0..6).map(|v| v >= 3).collect();
        let f = regular_bipartite_one_factorization(&k33, &side).unwrap();
        let mut all: Vec<_> = f.concat();
        all.sort_unstable();
        assert_eq!(all, (0..9).collect::<Vec<_>>());

        let double = MultiGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        let f = regular_bipartite_one_factorization(&double, &[false, true]).unwrap();
        assert_eq!(f, vec![vec![0], vec![1]]);

        assert_eq!(
            regular_bipartite_one_factorization(&cycle(3), &[false, true, false]),
            Err(FactorizationError::NotBipartite(2))
        );
    }

    #[test]
    fn matchings_of_small_graphs() {
        assert_eq!(max_matching(&petersen()).len(), 5);
        assert_eq!(max_matching_exhaustive(&petersen()).unwrap().len(), 5);
        assert_eq!(max_matching(&complete(4)).len(), 2);
        assert_eq!(max_matching(&complete_bipartite(1, 3)).len(), 1);
        assert!(is_perfect_matching(&petersen(), &max_matching(&petersen())));
    }

    #[test]
    fn blossom_needs_shrinking() {
        // two triangles sharing a path force an odd-cycle contraction
        let g = MultiGraph::from_edges(
            8,
            &[
                (0, 1),
                (1, 2),
                (2, 0),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 6),
                (6, 4),
                (6, 7),
                (0, 0),
                (1, 2),
            ],
        )
        .unwrap();
        assert_eq!(max_matching(&g).len(), 4);
        assert_eq!(max_matching_exhaustive(&g).unwrap().len(), 4);
    }

    #[test]
    fn exact_coloring_dichotomy_on_classics() {
        match exact_edge_chromatic(&complete(4), 3, DEFAULT_NODE_CAP) {
            EdgeChromaticOutcome::Colorable(c) => c.validate(&complete(4)).unwrap(),
            other => panic!("K4 should be 3-edge-colorable: {other:?}"),
        }
        assert!(matches!(
            exact_edge_chromatic(&petersen(), 3, DEFAULT_NODE_CAP),
            EdgeChromaticOutcome::NotColorable(AbsenceCertificate::Exhausted { .. })
        ));
        match exact_edge_chromatic(&petersen(), 4, DEFAULT_NODE_CAP) {
            EdgeChromaticOutcome::Colorable(c) => c.validate(&petersen()).unwrap(),
            other => panic!("Petersen should be 4-edge-colorable: {other:?}"),
        }
    }

    #[test]
    fn exact_coloring_cap_and_trivial_certificates() {
        assert_eq!(
            exact_edge_chromatic(&petersen(), 3, 1),
            EdgeChromaticOutcome::Undecided { nodes: 2 }
        );
        let lp = MultiGraph::from_edges(1, &[(0, 0)]).unwrap();
        assert_eq!(
            exact_edge_chromatic(&lp, 5, 10),
            EdgeChromaticOutcome::NotColorable(AbsenceCertificate::Loop(0))
        );
        assert!(matches!(
            exact_edge_chromatic(&complete(4), 2, 10),
            EdgeChromaticOutcome::NotColorable(AbsenceCertificate::DegreeExceedsBudget {
                degree: 3,
                ..
            })
        ));
    }

    #[test]
    fn coloring_validation_reports_clash() {
        let c = EdgeColoring {
            colors: vec![0, 0, 1],
            num_colors: 2,
        };
        assert!(matches!(
            c.validate(&cycle(3)),
            Err(ColoringViolation::Clash { vertex: 1, .. })
        ));
        let lp = MultiGraph::from_edges(1, &[(0, 0)]).unwrap();
        let c = EdgeColoring {
            colors: vec![0],
            num_colors: 1,
        };
        assert!(c.validate(&lp).is_err());
    }
}
