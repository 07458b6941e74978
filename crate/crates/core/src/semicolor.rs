//! Semi-colorings: edges colored by a single color `i` or by a pair `{i, j}`
//! worn half and half. Colors are 1-based here, unlike [`EdgeColoring`].

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::factorization::{is_perfect_matching, max_matching, two_factorization, EdgeColoring};
use crate::graph::{bridges, edge_of, mate, Dart, EdgeId, MultiGraph, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemiColor {
    Solid(usize),
    /// Always stored with the smaller color first.
    Bright(usize, usize),
}

impl SemiColor {
    /// A bright pair in normalized order; `None` when `i == j`.
    pub fn bright(i: usize, j: usize) -> Option<SemiColor> {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => Some(SemiColor::Bright(i, j)),
            std::cmp::Ordering::Greater => Some(SemiColor::Bright(j, i)),
            std::cmp::Ordering::Equal => None,
        }
    }

    fn max_color(self) -> usize {
        match self {
            SemiColor::Solid(i) => i,
            SemiColor::Bright(i, j) => i.max(j),
        }
    }

    fn min_color(self) -> usize {
        match self {
            SemiColor::Solid(i) => i,
            SemiColor::Bright(i, j) => i.min(j),
        }
    }

    /// Applies a renaming of colors, given as `rename[c]` for `c` in `1..`.
    fn renamed(self, rename: &[usize]) -> SemiColor {
        match self {
            SemiColor::Solid(i) => SemiColor::Solid(rename[i]),
            SemiColor::Bright(i, j) => {
                SemiColor::bright(rename[i], rename[j]).expect("renaming is injective")
            }
        }
    }
}

impl fmt::Display for SemiColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemiColor::Solid(i) => write!(f, "solid {i}"),
            SemiColor::Bright(i, j) => write!(f, "bright {i} {j}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiColoring {
    pub colors: Vec<SemiColor>,
    pub delta: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemiColorError {
    #[error("coloring has {got} entries for {expected} edges")]
    Length { expected: usize, got: usize },
    #[error("edge {edge} uses a color outside 1..={delta}")]
    ColorOutOfRange { edge: EdgeId, delta: usize },
    #[error("maximum degree {0} exceeds 3")]
    DegreeAboveThree(usize),
    #[error("graph is not cubic")]
    NotCubic,
    #[error("graph has a loop at edge {0}, which no proper edge coloring allows")]
    Loop(EdgeId),
    #[error("graph is in none of the supported families")]
    Unsupported,
    #[error("supplied edge coloring is not a proper coloring with at most {0} colors")]
    BadEdgeColoring(usize),
}

/// An oriented cycle of edges sharing one bright pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrightCycle {
    pub pair: (usize, usize),
    /// Consecutive darts, each leaving the vertex the previous one entered.
    pub darts: Vec<Dart>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SemiColoringReport {
    /// `(vertex, color)` where the weight of `color` exceeds 1.
    pub weight_violations: Vec<(Vertex, usize)>,
    /// `(vertex, pair)` where the pair appears a number of times other than 0 or 2.
    pub parity_violations: Vec<(Vertex, (usize, usize))>,
    /// Cycle decomposition of each bright pair, present only when valid.
    pub bright_cycles: Vec<BrightCycle>,
}

impl SemiColoringReport {
    pub fn is_valid(&self) -> bool {
        self.weight_violations.is_empty() && self.parity_violations.is_empty()
    }
}

impl SemiColoring {
    /// Checks the weight and pair-parity conditions at every vertex; both
    /// darts of a loop count. When valid, decomposes each bright pair into
    /// canonically oriented cycles.
    pub fn validate(&self, g: &MultiGraph) -> Result<SemiColoringReport, SemiColorError> {
        if self.colors.len() != g.edge_count() {
            return Err(SemiColorError::Length {
                expected: g.edge_count(),
                got: self.colors.len(),
            });
        }
        for (edge, c) in self.colors.iter().enumerate() {
            if c.min_color() == 0 || c.max_color() > self.delta {
                return Err(SemiColorError::ColorOutOfRange {
                    edge,
                    delta: self.delta,
                });
            }
        }
        let mut report = SemiColoringReport::default();
        let mut half_weight = vec![0usize; self.delta + 1];
        let mut pairs: Vec<((usize, usize), usize)> = Vec::new();
        for v in 0..g.vertex_count() {
            half_weight.iter_mut().for_each(|w| *w = 0);
            pairs.clear();
            for &d in g.darts_at(v) {
                match self.colors[edge_of(d)] {
                    SemiColor::Solid(i) => half_weight[i] += 2,
                    SemiColor::Bright(i, j) => {
                        half_weight[i] += 1;
                        half_weight[j] += 1;
                        match pairs.iter_mut().find(|(p, _)| *p == (i, j)) {
                            Some((_, count)) => *count += 1,
                            None => pairs.push(((i, j), 1)),
                        }
                    }
                }
            }
            for (i, &w) in half_weight.iter().enumerate() {
                if w > 2 {
                    report.weight_violations.push((v, i));
                }
            }
            pairs.sort_unstable();
            for &(pair, count) in &pairs {
                if count != 2 {
                    report.parity_violations.push((v, pair));
                }
            }
        }
        if report.is_valid() {
            report.bright_cycles = bright_cycles(g, &self.colors);
        }
        Ok(report)
    }

    pub fn is_valid(&self, g: &MultiGraph) -> bool {
        self.validate(g).is_ok_and(|r| r.is_valid())
    }
}

/// Cycles of each bright pair, each starting at its minimum vertex along the
/// smaller of that vertex's two darts in the pair. Assumes pair parity holds.
fn bright_cycles(g: &MultiGraph, colors: &[SemiColor]) -> Vec<BrightCycle> {
    let mut seen = vec![false; g.edge_count()];
    let mut cycles = Vec::new();
    for v in 0..g.vertex_count() {
        for &start in g.darts_at(v) {
            let SemiColor::Bright(i, j) = colors[edge_of(start)] else {
                continue;
            };
            if seen[edge_of(start)] {
                continue;
            }
            // darts at v ascend, and vertices are scanned in order, so `start`
            // is the smaller dart at the cycle's minimum vertex
            let mut darts = Vec::new();
            let mut d = start;
            loop {
                seen[edge_of(d)] = true;
                darts.push(d);
                let arrival = mate(d);
                let w = g.dart_vertex(arrival);
                let next = g.darts_at(w).iter().copied().find(|&x| {
                    x != arrival
                        && colors[edge_of(x)] == SemiColor::Bright(i, j)
                        && !seen[edge_of(x)]
                });
                match next {
                    Some(x) => d = x,
                    None => break,
                }
            }
            cycles.push(BrightCycle {
                pair: (i, j),
                darts,
            });
        }
    }
    cycles
}

/// Semi-colors any graph of maximum degree at most 3 with colors `1..=3`.
///
/// Bridges are set aside and each bridgeless piece is colored on its own: a
/// cubic piece takes a perfect matching as solid 1 and the rest as bright
/// `{2,3}`; a piece with one degree-2 vertex `v0` does the same with a
/// matching of the piece minus `v0`; a piece with more degree-2 vertices is
/// doubled into a bridgeless cubic graph, colored, restricted, and repaired
/// along bright paths. Pieces are then joined across the bridges, renaming
/// colors on the side being attached so the bridge gets a free solid color.
pub fn semi_color_subcubic(g: &MultiGraph) -> Result<SemiColoring, SemiColorError> {
    let delta = g.max_degree();
    if delta > 3 {
        return Err(SemiColorError::DegreeAboveThree(delta));
    }
    let bridge_list = bridges(g);
    let mut is_bridge = vec![false; g.edge_count()];
    bridge_list.iter().for_each(|&e| is_bridge[e] = true);
    let (rest, origin) = g.edge_subgraph(|e| !is_bridge[e]);
    let pieces = rest.structure();

    let mut colors: Vec<Option<SemiColor>> = vec![None; g.edge_count()];
    for piece in pieces.components() {
        let (sub, _, edge_origin) = rest.induced_subgraph(&piece, |_| true);
        for (local, c) in color_bridgeless(&sub).into_iter().enumerate() {
            colors[origin[edge_origin[local]]] = Some(c);
        }
    }

    // walk the bridge forest, attaching one untouched piece per bridge
    let piece_of = &pieces.component_of;
    let mut placed = vec![false; pieces.component_count];
    let mut piece_edges: Vec<Vec<EdgeId>> = vec![Vec::new(); pieces.component_count];
    for e in 0..g.edge_count() {
        if !is_bridge[e] {
            piece_edges[piece_of[g.endpoints(e).0]].push(e);
        }
    }
    let mut bridges_at: Vec<Vec<EdgeId>> = vec![Vec::new(); pieces.component_count];
    for &e in &bridge_list {
        let (a, b) = g.endpoints(e);
        bridges_at[piece_of[a]].push(e);
        bridges_at[piece_of[b]].push(e);
    }
    for root in 0..pieces.component_count {
        if placed[root] {
            continue;
        }
        placed[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(p) = queue.pop_front() {
            for &e in &bridges_at[p] {
                let (x, y) = g.endpoints(e);
                let (a, b) = if piece_of[x] == p { (x, y) } else { (y, x) };
                let q = piece_of[b];
                if placed[q] {
                    continue;
                }
                let free_a = smallest_free(g, &colors, a);
                let free_b = smallest_free(g, &colors, b);
                let mut rename: Vec<usize> = (0..=3).collect();
                rename.swap(free_a, free_b);
                for &f in &piece_edges[q] {
                    colors[f] = colors[f].map(|c| c.renamed(&rename));
                }
                colors[e] = Some(SemiColor::Solid(free_a));
                placed[q] = true;
                queue.push_back(q);
            }
        }
    }
    Ok(SemiColoring {
        colors: colors
            .into_iter()
            .map(|c| c.expect("every edge colored"))
            .collect(),
        delta: 3,
    })
}

/// Smallest color of weight zero among the colored edges at `v`.
fn smallest_free(g: &MultiGraph, colors: &[Option<SemiColor>], v: Vertex) -> usize {
    let mut used = [false; 4];
    for &d in g.darts_at(v) {
        match colors[edge_of(d)] {
            Some(SemiColor::Solid(i)) => used[i] = true,
            Some(SemiColor::Bright(i, j)) => {
                used[i] = true;
                used[j] = true;
            }
            None => {}
        }
    }
    (1..=3)
        .find(|&c| !used[c])
        .expect("a vertex of degree at most 3 keeps a free color for its bridge")
}

/// Semi-colors a connected bridgeless graph with maximum degree at most 3.
fn color_bridgeless(g: &MultiGraph) -> Vec<SemiColor> {
    let solid_rest = |matching: &[EdgeId], m: usize| {
        let mut colors = vec![SemiColor::Bright(2, 3); m];
        matching
            .iter()
            .for_each(|&e| colors[e] = SemiColor::Solid(1));
        colors
    };
    if g.edge_count() == 0 {
        return Vec::new();
    }
    let low: Vec<Vertex> = (0..g.vertex_count())
        .filter(|&v| g.degree(v) == 2)
        .collect();
    match low.len() {
        0 => {
            let matching = max_matching(g);
            assert!(
                is_perfect_matching(g, &matching),
                "bridgeless cubic graph without a perfect matching"
            );
            solid_rest(&matching, g.edge_count())
        }
        1 => {
            let v0 = low[0];
            let keep: Vec<Vertex> = (0..g.vertex_count()).filter(|&v| v != v0).collect();
            let (h, _, edge_origin) = g.induced_subgraph(&keep, |_| true);
            let local = max_matching(&h);
            assert!(
                is_perfect_matching(&h, &local),
                "bridgeless graph minus its degree-2 vertex has no perfect matching"
            );
            let matching: Vec<EdgeId> = local.iter().map(|&e| edge_origin[e]).collect();
            solid_rest(&matching, g.edge_count())
        }
        _ => color_by_doubling(g, &low),
    }
}

/// Colors two copies of `g` joined at their degree-2 vertices, keeps the
/// first copy, and repairs each degree-2 vertex left with one bright edge by
/// recoloring its bright path alternately solid 2 and solid 3.
fn color_by_doubling(g: &MultiGraph, low: &[Vertex]) -> Vec<SemiColor> {
    let n = g.vertex_count();
    let m = g.edge_count();
    let mut doubled = g.disjoint_union(g);
    for &v in low {
        doubled.add_edge(v, n + v).expect("in range");
    }
    debug_assert!(bridges(&doubled).is_empty());
    let matching = max_matching(&doubled);
    assert!(
        is_perfect_matching(&doubled, &matching),
        "doubled graph is bridgeless cubic"
    );
    let mut in_matching = vec![false; doubled.edge_count()];
    matching.iter().for_each(|&e| in_matching[e] = true);
    // the first copy keeps edge ids 0..m
    let mut colors: Vec<SemiColor> = (0..m)
        .map(|e| {
            if in_matching[e] {
                SemiColor::Solid(1)
            } else {
                SemiColor::Bright(2, 3)
            }
        })
        .collect();

    let bright_degree = |colors: &[SemiColor], v: Vertex| {
        g.darts_at(v)
            .iter()
            .filter(|&&d| matches!(colors[edge_of(d)], SemiColor::Bright(..)))
            .count()
    };
    let violators = |colors: &[SemiColor]| {
        low.iter()
            .filter(|&&v| bright_degree(colors, v) == 1)
            .count()
    };
    let mut remaining = violators(&colors);
    let mut rounds = 0;
    while let Some(&start) = low.iter().find(|&&v| bright_degree(&colors, v) == 1) {
        rounds += 1;
        assert!(rounds <= m, "bright-path repair exceeded {m} rounds");
        let mut d = *g
            .darts_at(start)
            .iter()
            .find(|&&d| matches!(colors[edge_of(d)], SemiColor::Bright(..)))
            .expect("violator has a bright edge");
        let mut next_color = 2;
        loop {
            colors[edge_of(d)] = SemiColor::Solid(next_color);
            next_color = 5 - next_color;
            let arrival = mate(d);
            let w = g.dart_vertex(arrival);
            match g
                .darts_at(w)
                .iter()
                .find(|&&x| x != arrival && matches!(colors[edge_of(x)], SemiColor::Bright(..)))
            {
                Some(&x) => d = x,
                None => break,
            }
        }
        let now = violators(&colors);
        assert!(
            now < remaining,
            "bright-path repair did not reduce the violating vertices"
        );
        remaining = now;
    }
    colors
}

/// Semi-colors a graph from one of the families known to admit it: a
/// proper edge coloring with `max_degree` colors (solid colors), a
/// `2k`-regular graph (factor `i` bright `{i, k+i}`), a `(2k+1)`-regular
/// graph with a perfect matching (matching solid `2k+1`, the rest as
/// before), or maximum degree at most 3.
pub fn semi_color_family(
    g: &MultiGraph,
    edge_coloring: Option<&EdgeColoring>,
) -> Result<SemiColoring, SemiColorError> {
    let delta = g.max_degree();
    if let Some(coloring) = edge_coloring {
        if coloring.validate(g).is_err() || coloring.colors.iter().any(|&c| c >= delta) {
            return Err(SemiColorError::BadEdgeColoring(delta));
        }
        return Ok(SemiColoring {
            colors: coloring
                .colors
                .iter()
                .map(|&c| SemiColor::Solid(c + 1))
                .collect(),
            delta,
        });
    }
    if let Some(r) = g.regular_degree() {
        if r % 2 == 0 {
            return Ok(SemiColoring {
                colors: even_regular_colors(g, &[]),
                delta,
            });
        }
        let matching = max_matching(g);
        if is_perfect_matching(g, &matching) {
            return Ok(SemiColoring {
                colors: even_regular_colors(g, &matching),
                delta,
            });
        }
    }
    if delta <= 3 {
        return semi_color_subcubic(g);
    }
    Err(SemiColorError::Unsupported)
}

/// Colors `matching` solid `2k+1` and factor `i` of the remaining
/// `2k`-regular graph bright `{i, k+i}`.
fn even_regular_colors(g: &MultiGraph, matching: &[EdgeId]) -> Vec<SemiColor> {
    let mut in_matching = vec![false; g.edge_count()];
    matching.iter().for_each(|&e| in_matching[e] = true);
    let (rest, origin) = g.edge_subgraph(|e| !in_matching[e]);
    let factors = two_factorization(&rest).expect("remainder is even regular");
    let k = factors.len();
    let mut colors = vec![SemiColor::Solid(2 * k + 1); g.edge_count()];
    for i in 0..k {
        for v in 0..rest.vertex_count() {
            let e = origin[edge_of(factors.out_dart(i, v))];
            colors[e] = SemiColor::Bright(i + 1, k + i + 1);
        }
    }
    colors
}

/// A proper edge coloring of a loopless cubic graph with at most 4 colors:
/// each bright `{i, j}` cycle of a semi-coloring alternates `i` and `j`, and
/// an odd cycle gives its last edge color 4.
pub fn vizing4_cubic(g: &MultiGraph) -> Result<EdgeColoring, SemiColorError> {
    if g.regular_degree() != Some(3) && g.vertex_count() > 0 {
        return Err(SemiColorError::NotCubic);
    }
    if let Some(e) = (0..g.edge_count()).find(|&e| g.is_loop(e)) {
        return Err(SemiColorError::Loop(e));
    }
    let semi = semi_color_subcubic(g)?;
    let report = semi.validate(g)?;
    assert!(
        report.is_valid(),
        "subcubic semi-coloring failed validation"
    );
    let mut colors: Vec<usize> = semi
        .colors
        .iter()
        .map(|c| match c {
            SemiColor::Solid(i) => i - 1,
            SemiColor::Bright(..) => usize::MAX,
        })
        .collect();
    for cycle in &report.bright_cycles {
        let (i, j) = cycle.pair;
        let len = cycle.darts.len();
        for (step, &d) in cycle.darts.iter().enumerate() {
            colors[edge_of(d)] = if len % 2 == 1 && step == len - 1 {
                3
            } else if step % 2 == 0 {
                i - 1
            } else {
                j - 1
            };
        }
    }
    Ok(EdgeColoring {
        colors,
        num_colors: 4,
    })
}

/// The graph `G^(2k+1)`: a main pivot joined to `2k+1` clusters, each a
/// secondary pivot attached to `k` copies of `K_{2k+2}` minus an edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gadget {
    pub k: usize,
    pub graph: MultiGraph,
    pub main_pivot: Vertex,
    /// Secondary pivot `i` is vertex `i`, for `i` in `1..=2k+1`.
    pub secondary_pivots: Vec<Vertex>,
    pub coloring: SemiColoring,
}

impl Gadget {
    pub fn vertex_count_for(k: usize) -> usize {
        (2 * k + 1) * (k * (2 * k + 2) + 1) + 1
    }
}

/// Builds `G^(2k+1)` with its semi-coloring.
///
/// Layout: vertex 0 is the main pivot, vertices `1..=2k+1` the secondary
/// pivots, then the cluster copies in order. Edge `i-1` joins the main pivot
/// to secondary pivot `i`. In cluster `i`, each copy `a_0 .. a_{2k+1}` loses
/// `a_0 a_1`; the matching `{a_0 a_2, a_1 a_3, a_4 a_5, ...}` together with
/// the pivot edge is solid `i`, and the remaining `2k`-regular part is
/// 2-factorized and colored by consecutive pairs of `[2k+1] \ {i}`.
pub fn build_gadget(k: usize) -> Gadget {
    assert!(k >= 1, "gadget needs k >= 1");
    let clusters = 2 * k + 1;
    let size = 2 * k + 2;
    let n = Gadget::vertex_count_for(k);
    let mut g = MultiGraph::empty(n);
    for i in 1..=clusters {
        g.add_edge(0, i).expect("in range");
    }
    let mut colors: Vec<Option<SemiColor>> =
        (1..=clusters).map(|i| Some(SemiColor::Solid(i))).collect();
    let mut next = clusters + 1;
    for i in 1..=clusters {
        let first_edge = g.edge_count();
        for _ in 0..k {
            let a: Vec<Vertex> = (next..next + size).collect();
            next += size;
            for &x in &a[..2] {
                g.add_edge(i, x).expect("in range");
                colors.push(None);
            }
            for x in 0..size {
                for y in x + 1..size {
                    if (x, y) == (0, 1) {
                        continue;
                    }
                    g.add_edge(a[x], a[y]).expect("in range");
                    let matched =
                        matches!((x, y), (0, 2) | (1, 3)) || (x >= 4 && x % 2 == 0 && y == x + 1);
                    colors.push(matched.then_some(SemiColor::Solid(i)));
                }
            }
        }
        // 2-factorize the unmatched cluster edges
        let cluster_edges: Vec<EdgeId> = (first_edge..g.edge_count())
            .filter(|&e| colors[e].is_none())
            .collect();
        let mut cluster_vertices: Vec<Vertex> = cluster_edges
            .iter()
            .flat_map(|&e| {
                let (u, v) = g.endpoints(e);
                [u, v]
            })
            .collect();
        cluster_vertices.sort_unstable();
        cluster_vertices.dedup();
        let mut local = MultiGraph::empty(cluster_vertices.len());
        for &e in &cluster_edges {
            let (u, v) = g.endpoints(e);
            let index = |x: Vertex| cluster_vertices.binary_search(&x).expect("cluster vertex");
            local.add_edge(index(u), index(v)).expect("in range");
        }
        let factors = two_factorization(&local).expect("cluster remainder is 2k-regular");
        let others: Vec<usize> = (1..=clusters).filter(|&c| c != i).collect();
        for (j, pair) in others.chunks(2).enumerate() {
            for x in 0..local.vertex_count() {
                let e = cluster_edges[edge_of(factors.out_dart(j, x))];
                colors[e] = Some(SemiColor::Bright(pair[0], pair[1]));
            }
        }
    }
    debug_assert_eq!(next, n);
    Gadget {
        k,
        graph: g,
        main_pivot: 0,
        secondary_pivots: (1..=clusters).collect(),
        coloring: SemiColoring {
            colors: colors
                .into_iter()
                .map(|c| c.expect("every gadget edge colored"))
                .collect(),
            delta: clusters,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::{exact_edge_chromatic, EdgeChromaticOutcome, DEFAULT_NODE_CAP};
    use crate::graph::families::*;

    fn assert_valid(g: &MultiGraph, sc: &SemiColoring) -> SemiColoringReport {
        let report = sc.validate(g).unwrap();
        assert!(report.is_valid(), "{report:?}");
        report
    }

    #[test]
    fn validator_examples() {
        // K4: matching 01, 23 solid, cycle 0-2-1-3 bright
        let k4 = complete(4);
        let mut colors = vec![SemiColor::Bright(2, 3); 6];
        for e in 0..6 {
            if matches!(k4.endpoints(e), (0, 1) | (2, 3)) {
                colors[e] = SemiColor::Solid(1);
            }
        }
        let report = assert_valid(&k4, &SemiColoring { colors, delta: 3 });
        assert_eq!(report.bright_cycles.len(), 1);
        assert_eq!(report.bright_cycles[0].darts.len(), 4);

        let tri = SemiColoring {
            colors: vec![SemiColor::Solid(1); 3],
            delta: 2,
        };
        let report = tri.validate(&cycle(3)).unwrap();
        assert_eq!(report.weight_violations.len(), 3);

        let c4 = SemiColoring {
            colors: vec![SemiColor::Bright(1, 2); 4],
            delta: 2,
        };
        assert_valid(&cycle(4), &c4);

        let out = SemiColoring {
            colors: vec![SemiColor::Solid(3); 3],
            delta: 2,
        };
        assert_eq!(
            out.validate(&cycle(3)),
            Err(SemiColorError::ColorOutOfRange { edge: 0, delta: 2 })
        );
    }

    #[test]
    fn parity_violation_is_reported() {
        let path = MultiGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let sc = SemiColoring {
            colors: vec![SemiColor::Bright(1, 2); 2],
            delta: 2,
        };
        let report = sc.validate(&path).unwrap();
        assert_eq!(report.parity_violations, vec![(0, (1, 2)), (2, (1, 2))]);
    }

    #[test]
    fn loop_counts_both_darts() {
        let lp = MultiGraph::from_edges(1, &[(0, 0)]).unwrap();
        assert!(!SemiColoring {
            colors: vec![SemiColor::Solid(1)],
            delta: 2
        }
        .is_valid(&lp));
        assert!(SemiColoring {
            colors: vec![SemiColor::Bright(1, 2)],
            delta: 2
        }
        .is_valid(&lp));
    }

    #[test]
    fn subcubic_examples() {
        for g in [
            petersen(),
            cycle(5),
            two_triangles_bridged(),
            cubic_with_bridge(),
            path(4),
            complete(4),
        ] {
            let sc = semi_color_subcubic(&g).unwrap();
            assert_valid(&g, &sc);
        }
        let report = assert_valid(&petersen(), &semi_color_subcubic(&petersen()).unwrap());
        let mut lens: Vec<usize> = report.bright_cycles.iter().map(|c| c.darts.len()).collect();
        lens.sort_unstable();
        assert!(lens == vec![5, 5] || lens == vec![9] || lens.iter().sum::<usize>() == 10);
        assert_eq!(
            semi_color_subcubic(&complete(5)),
            Err(SemiColorError::DegreeAboveThree(4))
        );
    }

    #[test]
    fn subcubic_with_loops_and_isolated_vertices() {
        let g = MultiGraph::from_edges(5, &[(0, 0), (0, 1), (1, 2), (1, 2), (3, 3)]).unwrap();
        assert_valid(&g, &semi_color_subcubic(&g).unwrap());
    }

    #[test]
    fn family_examples() {
        let k33 = complete_bipartite(3, 3);
        let EdgeChromaticOutcome::Colorable(c) = exact_edge_chromatic(&k33, 3, DEFAULT_NODE_CAP)
        else {
            panic!("K33 is class 1")
        };
        let sc = semi_color_family(&k33, Some(&c)).unwrap();
        assert!(sc.colors.iter().all(|c| matches!(c, SemiColor::Solid(_))));
        assert_valid(&k33, &sc);

        let k5 = complete(5);
        let sc = semi_color_family(&k5, None).unwrap();
        assert_valid(&k5, &sc);
        let mut used: Vec<SemiColor> = sc.colors.clone();
        used.sort_unstable();
        used.dedup();
        assert_eq!(used, vec![SemiColor::Bright(1, 3), SemiColor::Bright(2, 4)]);

        let k4 = complete(4);
        let sc = semi_color_family(&k4, None).unwrap();
        assert_valid(&k4, &sc);
        assert_eq!(
            sc.colors
                .iter()
                .filter(|&&c| c == SemiColor::Solid(3))
                .count(),
            2
        );
        assert_eq!(
            sc.colors
                .iter()
                .filter(|&&c| c == SemiColor::Bright(1, 2))
                .count(),
            4
        );
    }

    #[test]
    fn vizing_on_cubic_examples() {
        for g in [
            complete(4),
            petersen(),
            complete_bipartite(3, 3),
            prism(3),
            cubic_with_bridge(),
        ] {
            let c = vizing4_cubic(&g).unwrap();
            c.validate(&g).unwrap();
        }
        let c = vizing4_cubic(&petersen()).unwrap();
        assert!(c.colors.contains(&3));
        assert_eq!(vizing4_cubic(&cycle(4)), Err(SemiColorError::NotCubic));
    }

    #[test]
    fn gadget_sizes_and_bridges() {
        for k in 1..=3 {
            let gadget = build_gadget(k);
            let g = &gadget.graph;
            assert_eq!(g.vertex_count(), Gadget::vertex_count_for(k));
            assert_eq!(g.regular_degree(), Some(2 * k + 1));
            let found = bridges(g);
            for &d in g.darts_at(gadget.main_pivot) {
                assert!(found.contains(&edge_of(d)));
            }
            assert_valid(g, &gadget.coloring);
        }
        assert_eq!(build_gadget(1).graph.vertex_count(), 16);
        assert_eq!(build_gadget(2).graph.vertex_count(), 66);
    }
}
