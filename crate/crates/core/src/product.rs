//! Tight products: graphs on `V(G1) x V(G2)` whose two projections are both
//! covering maps, described through families of neighborly permutations.

use rayon::prelude::*;
use thiserror::Error;

use crate::covering::{infer_covering, verify_covering, CoveringMap, CoveringReport};
use crate::factorization::{
    canonical_factor, exact_edge_chromatic, is_perfect_matching, matching_involution, max_matching,
    two_factorization, AbsenceCertificate, EdgeChromaticOutcome, EdgeColoring, FactorizationError,
    TwoFactorization,
};
use crate::graph::{bridges, edge_of, mate, Dart, EdgeId, MultiGraph, Permutation, Vertex};
use crate::semicolor::{build_gadget, SemiColor, SemiColorError, SemiColoring};

/// One permutation of `V(g2)` per dart of `g1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborlyFamily {
    pub sigma: Vec<Permutation>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyViolation {
    #[error("family has {got} permutations for {expected} darts")]
    Length { expected: usize, got: usize },
    #[error("permutation of dart {dart} does not act on the vertices of the second factor")]
    Size { dart: Dart },
    #[error("permutation of dart {dart} sends {vertex} to a non-neighbor")]
    NotNeighborly { dart: Dart, vertex: Vertex },
    #[error("permutations of dart {dart} and its reverse are not mutually inverse")]
    InverseSymmetry { dart: Dart },
    #[error("at ({v1}, {u1}) the images do not match the neighbors of {u1} one to one")]
    LocalBijection { v1: Vertex, u1: Vertex },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProductError {
    #[error("invalid neighborly family: {0}")]
    Family(#[from] FamilyViolation),
    #[error("factors must be regular of the same degree (got {0:?} and {1:?})")]
    Regularity(Option<usize>, Option<usize>),
    #[error("factors must have {0} degree")]
    Parity(&'static str),
    #[error(transparent)]
    Factorization(#[from] FactorizationError),
    #[error("matching of factor {0} is not perfect")]
    NotPerfectMatching(usize),
    #[error("invalid semi-coloring: {0}")]
    SemiColoring(String),
    #[error("edge coloring is not a proper coloring with {0} colors")]
    EdgeColoring(usize),
    #[error("edge {0} is not a bridge of the second factor")]
    NotABridge(EdgeId),
    #[error("product is not a tight product: {0}")]
    NotTight(String),
    #[error("extracted coloring is not proper")]
    ImproperExtraction,
}

impl From<SemiColorError> for ProductError {
    fn from(e: SemiColorError) -> Self {
        ProductError::SemiColoring(e.to_string())
    }
}

/// A tight product with its two projections. Vertex `(v, u)` has index
/// `v * |V(g2)| + u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TightProduct {
    pub g1: MultiGraph,
    pub g2: MultiGraph,
    pub h: MultiGraph,
    pub proj1: CoveringMap,
    pub proj2: CoveringMap,
}

impl TightProduct {
    pub fn vertex(&self, v: Vertex, u: Vertex) -> Vertex {
        v * self.g2.vertex_count() + u
    }

    /// Covering reports of both projections.
    pub fn verify(&self) -> (CoveringReport, CoveringReport) {
        (
            verify_covering(&self.h, &self.g1, &self.proj1).expect("projection sizes match"),
            verify_covering(&self.h, &self.g2, &self.proj2).expect("projection sizes match"),
        )
    }

    pub fn is_valid(&self) -> bool {
        let (a, b) = self.verify();
        a.is_covering() && b.is_covering()
    }

    /// The same product seen as a product of `g2` and `g1`. Edge and dart
    /// ids of `h` are kept; only vertices are relabeled.
    pub fn swap(&self) -> TightProduct {
        let n1 = self.g1.vertex_count();
        let n2 = self.g2.vertex_count();
        let relabel = |x: Vertex| (x % n2) * n1 + x / n2;
        let mut h = MultiGraph::empty(self.h.vertex_count());
        for (a, b) in self.h.edges() {
            h.add_edge(relabel(a), relabel(b)).expect("in range");
        }
        let moved = |map: &CoveringMap| {
            let mut vertex_map = vec![0; map.vertex_map.len()];
            for (x, &image) in map.vertex_map.iter().enumerate() {
                vertex_map[relabel(x)] = image;
            }
            CoveringMap {
                vertex_map,
                dart_map: map.dart_map.clone(),
            }
        };
        TightProduct {
            g1: self.g2.clone(),
            g2: self.g1.clone(),
            h,
            proj1: moved(&self.proj2),
            proj2: moved(&self.proj1),
        }
    }
}

/// Checks the three conditions on a family: each permutation is neighborly,
/// reverse darts carry inverse permutations, and at every `(v1, u1)` the
/// images `sigma_d(u1)` over darts `d` at `v1` are exactly the neighbor
/// multiset of `u1`.
pub fn validate_family(
    g1: &MultiGraph,
    g2: &MultiGraph,
    family: &NeighborlyFamily,
) -> Result<(), FamilyViolation> {
    if family.sigma.len() != g1.dart_count() {
        return Err(FamilyViolation::Length {
            expected: g1.dart_count(),
            got: family.sigma.len(),
        });
    }
    let n2 = g2.vertex_count();
    if let Some(dart) = family.sigma.iter().position(|s| s.len() != n2) {
        return Err(FamilyViolation::Size { dart });
    }
    let adjacency = g2.adjacency_counts();
    for (dart, s) in family.sigma.iter().enumerate() {
        if let Some(vertex) = (0..n2).find(|&u| adjacency[u][s.apply(u)] == 0) {
            return Err(FamilyViolation::NotNeighborly { dart, vertex });
        }
        let back = &family.sigma[mate(dart)];
        if (0..n2).any(|u| back.apply(s.apply(u)) != u) {
            return Err(FamilyViolation::InverseSymmetry { dart });
        }
    }
    let mut tally = vec![0u32; n2];
    for v1 in 0..g1.vertex_count() {
        for u1 in 0..n2 {
            for &d in g1.darts_at(v1) {
                tally[family.sigma[d].apply(u1)] += 1;
            }
            let ok = g1.darts_at(v1).iter().all(|&d| {
                let w = family.sigma[d].apply(u1);
                tally[w] == adjacency[u1][w]
            }) && g1.degree(v1) == g2.degree(u1);
            for &d in g1.darts_at(v1) {
                tally[family.sigma[d].apply(u1)] = 0;
            }
            if !ok {
                return Err(FamilyViolation::LocalBijection { v1, u1 });
            }
        }
    }
    Ok(())
}

/// The unique tight product with the given family: edge `e * n2 + u` joins
/// `(v1, u)` to `(v2, sigma_{2e}(u))` where dart `2e` runs from `v1` to `v2`.
pub fn assemble_product(
    g1: &MultiGraph,
    g2: &MultiGraph,
    family: &NeighborlyFamily,
) -> Result<TightProduct, ProductError> {
    validate_family(g1, g2, family)?;
    let n2 = g2.vertex_count();
    let mut h = MultiGraph::empty(g1.vertex_count() * n2);
    let mut dart_map = Vec::with_capacity(2 * g1.edge_count() * n2);
    for e in 0..g1.edge_count() {
        let (v1, v2) = g1.endpoints(e);
        let s = &family.sigma[2 * e];
        for u in 0..n2 {
            h.add_edge(v1 * n2 + u, v2 * n2 + s.apply(u))
                .expect("in range");
            dart_map.extend([2 * e, 2 * e + 1]);
        }
    }
    let proj1 = CoveringMap {
        vertex_map: (0..h.vertex_count()).map(|x| x / n2).collect(),
        dart_map,
    };
    let second: Vec<Vertex> = (0..h.vertex_count()).map(|x| x % n2).collect();
    let proj2 = infer_covering(&h, g2, &second)
        .expect("sizes are consistent")
        .map_err(|v| ProductError::NotTight(v.to_string()))?;
    let product = TightProduct {
        g1: g1.clone(),
        g2: g2.clone(),
        h,
        proj1,
        proj2,
    };
    let (r1, r2) = product.verify();
    for r in [r1, r2] {
        if let Some(v) = r.violation {
            return Err(ProductError::NotTight(v.to_string()));
        }
    }
    Ok(product)
}

/// Reads the family back from a product: `sigma_D(u)` is the second
/// coordinate reached from `(v1, u)` along the dart above `D`.
pub fn family_from_product(tp: &TightProduct) -> Result<NeighborlyFamily, ProductError> {
    if !tp.is_valid() {
        return Err(ProductError::NotTight(
            "a projection is not a covering".into(),
        ));
    }
    let n2 = tp.g2.vertex_count();
    let mut images = vec![vec![usize::MAX; n2]; tp.g1.dart_count()];
    for x in 0..tp.h.dart_count() {
        let d = tp.proj1.dart_map[x];
        let u = tp.proj2.vertex_map[tp.h.dart_vertex(x)];
        images[d][u] = tp.proj2.vertex_map[tp.h.dart_target(x)];
    }
    let sigma = images
        .into_iter()
        .map(|im| Permutation::new(im).map_err(|e| ProductError::NotTight(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let family = NeighborlyFamily { sigma };
    validate_family(&tp.g1, &tp.g2, &family)?;
    Ok(family)
}

/// A neighborly permutation of a regular graph, read from a perfect matching
/// of its standard 2-lift: lifted edge `(0,u)(1,w)` gives `sigma(u) = w`.
pub fn neighborly_permutation(g: &MultiGraph) -> Result<Permutation, ProductError> {
    let n = g.vertex_count();
    if n > 0 && g.regular_degree().is_none_or(|d| d == 0) {
        return Err(ProductError::Regularity(g.regular_degree(), None));
    }
    let lift = g.standard_two_lift();
    let side: Vec<bool> = (0..2 * n).map(|x| x >= n).collect();
    let rounds = crate::factorization::regular_bipartite_one_factorization(&lift, &side)?;
    let mut images = vec![0; n];
    if let Some(matching) = rounds.first() {
        for &e in matching {
            let (a, b) = lift.endpoints(e);
            let (left, right) = if a < n { (a, b) } else { (b, a) };
            images[left] = right - n;
        }
    }
    Ok(Permutation::new(images).expect("a perfect matching of the 2-lift is a permutation"))
}

fn same_regularity(g1: &MultiGraph, g2: &MultiGraph) -> Result<usize, ProductError> {
    let (d1, d2) = (regularity(g1), regularity(g2));
    match (d1, d2) {
        (Some(a), Some(b)) if a == b => Ok(a),
        _ => Err(ProductError::Regularity(d1, d2)),
    }
}

/// Degree of a regular graph, taking the graph with no vertices as 0-regular.
fn regularity(g: &MultiGraph) -> Option<usize> {
    if g.vertex_count() == 0 {
        Some(0)
    } else {
        g.regular_degree()
    }
}

/// Family from 2-factorizations: a dart of `g1` along factor `i` gets
/// `pi_i`, against it `pi_i^-1`. `origin1` maps edges of the factorized
/// graph back to `g1`.
fn factor_family(
    tf1: &TwoFactorization,
    origin1: &[EdgeId],
    tf2: &TwoFactorization,
    sigma: &mut [Option<Permutation>],
) {
    let n1 = tf1.factors().first().map_or(0, Permutation::len);
    for (i, pi) in tf2.factors().iter().enumerate() {
        let inverse = pi.inverse();
        for v in 0..n1 {
            let local = tf1.out_dart(i, v);
            let d = 2 * origin1[edge_of(local)] + (local & 1);
            sigma[d] = Some(pi.clone());
            sigma[mate(d)] = Some(inverse.clone());
        }
    }
}

/// Tight product of two `2d`-regular graphs: with 2-factorizations
/// `sigma_i` of `g1` and `pi_i` of `g2`, the product is
/// `G((sigma_1, pi_1), ..., (sigma_d, pi_d))`.
pub fn product_even_regular(
    g1: &MultiGraph,
    g2: &MultiGraph,
) -> Result<TightProduct, ProductError> {
    let d = same_regularity(g1, g2)?;
    if d % 2 == 1 {
        return Err(ProductError::Parity("even"));
    }
    let tf1 = two_factorization(g1)?;
    let tf2 = two_factorization(g2)?;
    let mut sigma = vec![None; g1.dart_count()];
    let identity: Vec<EdgeId> = (0..g1.edge_count()).collect();
    factor_family(&tf1, &identity, &tf2, &mut sigma);
    let family = NeighborlyFamily {
        sigma: sigma
            .into_iter()
            .map(|s| s.expect("every dart in a factor"))
            .collect(),
    };
    assemble_product(g1, g2, &family)
}

/// Tight product of two `(2d+1)`-regular graphs with perfect matchings: the
/// matching darts of `g1` carry the matching involution of `g2`, and the
/// remaining `2d`-regular parts are paired as in [`product_even_regular`].
/// Missing matchings are searched for.
pub fn product_odd_matching(
    g1: &MultiGraph,
    g2: &MultiGraph,
    m1: Option<&[EdgeId]>,
    m2: Option<&[EdgeId]>,
) -> Result<TightProduct, ProductError> {
    let d = same_regularity(g1, g2)?;
    if d % 2 == 0 {
        return Err(ProductError::Parity("odd"));
    }
    let found1;
    let m1 = match m1 {
        Some(m) => m,
        None => {
            found1 = max_matching(g1);
            &found1
        }
    };
    let found2;
    let m2 = match m2 {
        Some(m) => m,
        None => {
            found2 = max_matching(g2);
            &found2
        }
    };
    if !is_perfect_matching(g1, m1) {
        return Err(ProductError::NotPerfectMatching(1));
    }
    let involution = matching_involution(g2, m2).ok_or(ProductError::NotPerfectMatching(2))?;

    let mut in_m1 = vec![false; g1.edge_count()];
    m1.iter().for_each(|&e| in_m1[e] = true);
    let mut in_m2 = vec![false; g2.edge_count()];
    m2.iter().for_each(|&e| in_m2[e] = true);
    let (rest1, origin1) = g1.edge_subgraph(|e| !in_m1[e]);
    let (rest2, _) = g2.edge_subgraph(|e| !in_m2[e]);
    let tf1 = two_factorization(&rest1)?;
    let tf2 = two_factorization(&rest2)?;

    let mut sigma = vec![None; g1.dart_count()];
    for &e in m1 {
        sigma[2 * e] = Some(involution.clone());
        sigma[2 * e + 1] = Some(involution.clone());
    }
    factor_family(&tf1, &origin1, &tf2, &mut sigma);
    let family = NeighborlyFamily {
        sigma: sigma
            .into_iter()
            .map(|s| s.expect("every dart assigned"))
            .collect(),
    };
    assemble_product(g1, g2, &family)
}

/// Tight product of a semi-colored `(2k+1)`-regular `g1` with a class-1
/// `g2`, given a proper `(2k+1)`-edge-coloring of `g2` (color `c` here is
/// semi-color `c + 1`). Let `pi_ii` be the involution of class `i` and
/// `pi_ij` the canonically oriented cycles of classes `i` and `j`. Solid `i`
/// darts carry `pi_ii`; along each canonically oriented bright `{i,j}`
/// cycle, forward darts carry `pi_ij` and backward darts its inverse.
pub fn product_via_semicoloring(
    g1: &MultiGraph,
    semi: &SemiColoring,
    g2: &MultiGraph,
    coloring: &EdgeColoring,
) -> Result<TightProduct, ProductError> {
    let d = same_regularity(g1, g2)?;
    if d % 2 == 0 {
        return Err(ProductError::Parity("odd"));
    }
    let report = semi.validate(g1)?;
    if !report.is_valid() {
        return Err(ProductError::SemiColoring(format!(
            "weight violations {:?}, parity violations {:?}",
            report.weight_violations, report.parity_violations
        )));
    }
    if semi
        .colors
        .iter()
        .any(|c| matches!(c, SemiColor::Solid(i) | SemiColor::Bright(_, i) if *i > d))
    {
        return Err(ProductError::SemiColoring(format!("colors exceed {d}")));
    }
    if coloring.validate(g2).is_err() || coloring.colors.iter().any(|&c| c >= d) {
        return Err(ProductError::EdgeColoring(d));
    }
    let classes = coloring.classes();
    let class_of = |c: usize| classes.get(c).map(Vec::as_slice).unwrap_or(&[]);
    let mut pair_cache: Vec<Option<Permutation>> = vec![None; (d + 1) * (d + 1)];
    let mut pi = |i: usize, j: usize| -> Permutation {
        let slot = i * (d + 1) + j;
        if let Some(p) = &pair_cache[slot] {
            return p.clone();
        }
        let p = if i == j {
            matching_involution(g2, class_of(i - 1))
                .expect("color classes of a regular graph are perfect matchings")
        } else {
            let darts: Vec<Dart> = class_of(i - 1)
                .iter()
                .chain(class_of(j - 1))
                .map(|&e| 2 * e)
                .collect();
            canonical_factor(g2, &darts).0
        };
        pair_cache[slot] = Some(p.clone());
        p
    };

    let mut sigma: Vec<Option<Permutation>> = vec![None; g1.dart_count()];
    for (e, c) in semi.colors.iter().enumerate() {
        if let SemiColor::Solid(i) = *c {
            let p = pi(i, i);
            sigma[2 * e] = Some(p.clone());
            sigma[2 * e + 1] = Some(p);
        }
    }
    for cycle in &report.bright_cycles {
        let (i, j) = cycle.pair;
        let forward = pi(i, j);
        let backward = forward.inverse();
        for &dart in &cycle.darts {
            sigma[dart] = Some(forward.clone());
            sigma[mate(dart)] = Some(backward.clone());
        }
    }
    let family = NeighborlyFamily {
        sigma: sigma
            .into_iter()
            .map(|s| s.expect("every dart assigned"))
            .collect(),
    };
    assemble_product(g1, g2, &family)
}

/// Outcome of the class-1 test through the gadget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    /// A tight product of the graph with the gadget, and the proper edge
    /// coloring read back from it at the main pivot.
    Class1 {
        product: TightProduct,
        coloring: EdgeColoring,
    },
    Class2 {
        certificate: AbsenceCertificate,
    },
    Undecided {
        nodes: u64,
    },
}

/// Decides whether a `(2k+1)`-regular graph is class 1 by way of its tight
/// products with `G^(2k+1)`. With a coloring (supplied or found by exact
/// search) the product gadget x `g` is built from the gadget's semi-coloring
/// and then swapped to `g` x gadget; the coloring is then extracted back from
/// that product and checked.
pub fn classify_class1_via_gadget(
    g: &MultiGraph,
    k: usize,
    coloring: Option<EdgeColoring>,
    node_cap: u64,
) -> Result<Classification, ProductError> {
    let d = 2 * k + 1;
    if regularity(g) != Some(d) {
        return Err(ProductError::Regularity(regularity(g), Some(d)));
    }
    let coloring = match coloring {
        Some(c) => c,
        None => match exact_edge_chromatic(g, d, node_cap) {
            EdgeChromaticOutcome::Colorable(c) => c,
            EdgeChromaticOutcome::NotColorable(certificate) => {
                return Ok(Classification::Class2 { certificate })
            }
            EdgeChromaticOutcome::Undecided { nodes } => {
                return Ok(Classification::Undecided { nodes })
            }
        },
    };
    let gadget = build_gadget(k);
    let forward = product_via_semicoloring(&gadget.graph, &gadget.coloring, g, &coloring)?;
    let product = forward.swap();
    let extracted = extract_pivot_coloring(&product, gadget.main_pivot)?;
    Ok(Classification::Class1 {
        product,
        coloring: extracted,
    })
}

/// Reads an edge coloring of `g1` off a tight product whose second factor
/// has a vertex `pivot` all of whose edges are bridges: edge `e` gets the
/// rank, among the pivot's neighbors, of `sigma_{2e}(pivot)`.
pub fn extract_pivot_coloring(
    tp: &TightProduct,
    pivot: Vertex,
) -> Result<EdgeColoring, ProductError> {
    let family = family_from_product(tp)?;
    let mut neighbors = tp
        .g2
        .neighbors(pivot)
        .map_err(|e| ProductError::NotTight(e.to_string()))?;
    neighbors.sort_unstable();
    neighbors.dedup();
    let mut colors = Vec::with_capacity(tp.g1.edge_count());
    for e in 0..tp.g1.edge_count() {
        let c = family.sigma[2 * e].apply(pivot);
        if family.sigma[2 * e + 1].apply(pivot) != c {
            return Err(ProductError::ImproperExtraction);
        }
        colors.push(
            neighbors
                .binary_search(&c)
                .map_err(|_| ProductError::ImproperExtraction)?,
        );
    }
    let coloring = EdgeColoring {
        colors,
        num_colors: neighbors.len(),
    };
    coloring
        .validate(&tp.g1)
        .map_err(|_| ProductError::ImproperExtraction)?;
    Ok(coloring)
}

/// Given a bridge `u1 u2` of the second factor, the edges `v1 v2` of the
/// first with `sigma_{v1 v2}(u1) = u2`, checked to be a perfect matching.
pub fn bridge_matching_witness(
    tp: &TightProduct,
    bridge: EdgeId,
) -> Result<Vec<EdgeId>, ProductError> {
    if !bridges(&tp.g2).contains(&bridge) {
        return Err(ProductError::NotABridge(bridge));
    }
    let (u1, u2) = tp.g2.endpoints(bridge);
    let family = family_from_product(tp)?;
    let matching: Vec<EdgeId> = (0..tp.g1.edge_count())
        .filter(|&e| family.sigma[2 * e].apply(u1) == u2)
        .collect();
    if !is_perfect_matching(&tp.g1, &matching) {
        return Err(ProductError::NotTight(
            "bridge witness is not a perfect matching".into(),
        ));
    }
    Ok(matching)
}

/// Limits for [`brute_force_tight_product`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BruteForceCaps {
    pub max_vertices_g2: usize,
    pub max_edges_g1: usize,
    /// Search nodes allowed per top-level branch.
    pub node_cap: u64,
    pub parallel: bool,
}

impl Default for BruteForceCaps {
    fn default() -> Self {
        BruteForceCaps {
            max_vertices_g2: 6,
            max_edges_g1: 10,
            node_cap: 20_000_000,
            parallel: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteForceOutcome {
    Found(Box<TightProduct>),
    /// Degrees differ, so no product can exist.
    RegularityMismatch,
    /// Every assignment was ruled out.
    Exhausted {
        nodes: u64,
    },
    /// Inputs beyond the caps, or a branch ran out of nodes.
    Undecided {
        nodes: u64,
    },
}

/// Exact search for a tight product: neighborly permutations of `g2` are
/// assigned edge by edge of `g1` (the reverse dart gets the inverse), keeping
/// at every `(v1, u)` the partial image multiset inside the neighbors of `u`.
/// The first edge's candidates form the top-level branches; with
/// `caps.parallel` they are searched concurrently, and the first branch in
/// order that succeeds wins, as in the sequential search.
pub fn brute_force_tight_product(
    g1: &MultiGraph,
    g2: &MultiGraph,
    caps: BruteForceCaps,
) -> BruteForceOutcome {
    if same_regularity(g1, g2).is_err() {
        return BruteForceOutcome::RegularityMismatch;
    }
    if g2.vertex_count() > caps.max_vertices_g2 || g1.edge_count() > caps.max_edges_g1 {
        return BruteForceOutcome::Undecided { nodes: 0 };
    }
    let search = OracleSearch::new(g1, g2);
    let finish = |sigma: Vec<Permutation>| {
        let family = NeighborlyFamily { sigma };
        let product =
            assemble_product(g1, g2, &family).expect("search keeps every family condition");
        BruteForceOutcome::Found(Box::new(product))
    };
    if g1.edge_count() == 0 {
        return match search.first_branch_free() {
            true => finish(Vec::new()),
            false => BruteForceOutcome::Exhausted { nodes: 0 },
        };
    }
    let branches: Vec<usize> = (0..search.candidates.len()).collect();
    let run = |&b: &usize| search.clone().branch(b, caps.node_cap);
    let results: Vec<BranchResult> = if caps.parallel {
        branches.par_iter().map(run).collect()
    } else {
        let mut out = Vec::new();
        for b in &branches {
            let r = run(b);
            let found = matches!(r, BranchResult::Found(_));
            out.push(r);
            if found {
                break;
            }
        }
        out
    };
    let mut nodes = 0;
    let mut undecided = false;
    for r in results {
        match r {
            BranchResult::Found(sigma) => return finish(sigma),
            BranchResult::Exhausted(n) => nodes += n,
            BranchResult::Capped(n) => {
                nodes += n;
                undecided = true;
            }
        }
    }
    if undecided {
        BruteForceOutcome::Undecided { nodes }
    } else {
        BruteForceOutcome::Exhausted { nodes }
    }
}

enum BranchResult {
    Found(Vec<Permutation>),
    Exhausted(u64),
    Capped(u64),
}

#[derive(Clone)]
struct OracleSearch<'a> {
    g1: &'a MultiGraph,
    n2: usize,
    adjacency: Vec<Vec<u32>>,
    candidates: Vec<Permutation>,
    inverses: Vec<Permutation>,
    /// used[v1][u][w]: how often `w` is already an image at `(v1, u)`.
    used: Vec<Vec<Vec<u32>>>,
    choice: Vec<usize>,
    nodes: u64,
}

impl<'a> OracleSearch<'a> {
    fn new(g1: &'a MultiGraph, g2: &MultiGraph) -> Self {
        let n2 = g2.vertex_count();
        let adjacency = g2.adjacency_counts();
        let candidates = neighborly_permutations(&adjacency);
        let inverses = candidates.iter().map(Permutation::inverse).collect();
        OracleSearch {
            g1,
            n2,
            adjacency,
            candidates,
            inverses,
            used: vec![vec![vec![0; n2]; n2]; g1.vertex_count()],
            choice: Vec::new(),
            nodes: 0,
        }
    }

    /// With no edges in `g1`, a product exists iff `g2` is edgeless too.
    fn first_branch_free(&self) -> bool {
        self.adjacency.iter().all(|row| row.iter().all(|&c| c == 0))
    }

    fn fits(&self, e: EdgeId, c: usize) -> bool {
        let (v1, v2) = self.g1.endpoints(e);
        let (s, t) = (&self.candidates[c], &self.inverses[c]);
        (0..self.n2).all(|u| {
            let a = s.apply(u);
            let b = t.apply(u);
            if v1 == v2 {
                let extra = if a == b { 2 } else { 1 };
                self.used[v1][u][a] + extra <= self.adjacency[u][a]
                    && self.used[v1][u][b] + extra <= self.adjacency[u][b]
            } else {
                self.used[v1][u][a] < self.adjacency[u][a]
                    && self.used[v2][u][b] < self.adjacency[u][b]
            }
        })
    }

    fn place(&mut self, e: EdgeId, c: usize, add: bool) {
        let (v1, v2) = self.g1.endpoints(e);
        for u in 0..self.n2 {
            let a = self.candidates[c].apply(u);
            let b = self.inverses[c].apply(u);
            if add {
                self.used[v1][u][a] += 1;
                self.used[v2][u][b] += 1;
            } else {
                self.used[v1][u][a] -= 1;
                self.used[v2][u][b] -= 1;
            }
        }
    }

    fn branch(mut self, first: usize, cap: u64) -> BranchResult {
        if !self.fits(0, first) {
            return BranchResult::Exhausted(1);
        }
        self.place(0, first, true);
        self.choice.push(first);
        match self.extend(1, cap) {
            Some(true) => {
                let mut sigma = Vec::with_capacity(2 * self.choice.len());
                for &c in &self.choice {
                    sigma.push(self.candidates[c].clone());
                    sigma.push(self.inverses[c].clone());
                }
                BranchResult::Found(sigma)
            }
            Some(false) => BranchResult::Exhausted(self.nodes),
            None => BranchResult::Capped(self.nodes),
        }
    }

    fn extend(&mut self, e: EdgeId, cap: u64) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > cap {
            return None;
        }
        if e == self.g1.edge_count() {
            return Some(true);
        }
        for c in 0..self.candidates.len() {
            if !self.fits(e, c) {
                continue;
            }
            self.place(e, c, true);
            self.choice.push(c);
            match self.extend(e + 1, cap) {
                Some(false) => {}
                other => return other,
            }
            self.choice.pop();
            self.place(e, c, false);
        }
        Some(false)
    }
}

/// Every permutation sending each vertex to a neighbor, in lexicographic order.
fn neighborly_permutations(adjacency: &[Vec<u32>]) -> Vec<Permutation> {
    let n = adjacency.len();
    let mut out = Vec::new();
    let mut images = Vec::with_capacity(n);
    let mut taken = vec![false; n];
    fn rec(
        u: usize,
        adjacency: &[Vec<u32>],
        images: &mut Vec<usize>,
        taken: &mut [bool],
        out: &mut Vec<Permutation>,
    ) {
        let n = adjacency.len();
        if u == n {
            out.push(Permutation::new(images.clone()).expect("injective"));
            return;
        }
        for w in 0..n {
            if !taken[w] && adjacency[u][w] > 0 {
                taken[w] = true;
                images.push(w);
                rec(u + 1, adjacency, images, taken, out);
                images.pop();
                taken[w] = false;
            }
        }
    }
    rec(0, adjacency, &mut images, &mut taken, &mut out);
    out
}
