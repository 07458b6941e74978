//! Covering maps at dart resolution, so loops and parallel edges are exact.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::factorization::{regular_bipartite_one_factorization, two_factorization};
use crate::graph::{edge_of, mate, Dart, EdgeId, MultiGraph, Vertex};

/// A graph map given on vertices and darts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringMap {
    pub vertex_map: Vec<Vertex>,
    pub dart_map: Vec<Dart>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoveringError {
    #[error("vertex map has {got} entries, source has {expected} vertices")]
    VertexMapSize { expected: usize, got: usize },
    #[error("dart map has {got} entries, source has {expected} darts")]
    DartMapSize { expected: usize, got: usize },
    #[error("image {image} out of range")]
    ImageOutOfRange { image: usize },
}

/// The first way a map fails to be a covering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoveringViolation {
    /// `dart_map` does not send the dart to a dart at the image of its vertex.
    Incidence { dart: Dart },
    /// `dart_map` does not commute with the edge involution.
    Involution { dart: Dart },
    /// The darts at `vertex` do not map bijectively onto the darts at its
    /// image; `dart` is the first duplicate, if any.
    NotLocallyBijective { vertex: Vertex, dart: Option<Dart> },
    /// The target is connected but the fibers have different sizes.
    UnequalFibers { vertex: Vertex },
}

impl std::fmt::Display for CoveringViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoveringViolation::Incidence { dart } => write!(
                f,
                "dart {dart} is not mapped to a dart at its vertex's image"
            ),
            CoveringViolation::Involution { dart } => {
                write!(f, "dart {dart} and its mate map to different edges")
            }
            CoveringViolation::NotLocallyBijective {
                vertex,
                dart: Some(d),
            } => {
                write!(f, "vertex {vertex} is not locally bijective (dart {d})")
            }
            CoveringViolation::NotLocallyBijective { vertex, dart: None } => {
                write!(f, "vertex {vertex} has the wrong degree for its image")
            }
            CoveringViolation::UnequalFibers { vertex } => {
                write!(f, "fiber over {vertex} has a different size")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringReport {
    pub violation: Option<CoveringViolation>,
    /// Size of the fiber over each target vertex.
    pub fiber_sizes: Vec<usize>,
    /// Common fiber size, when all fibers agree.
    pub covering_number: Option<usize>,
}

impl CoveringReport {
    pub fn is_covering(&self) -> bool {
        self.violation.is_none()
    }
}

fn check_sizes(
    source: &MultiGraph,
    target: &MultiGraph,
    map: &CoveringMap,
) -> Result<(), CoveringError> {
    if map.vertex_map.len() != source.vertex_count() {
        return Err(CoveringError::VertexMapSize {
            expected: source.vertex_count(),
            got: map.vertex_map.len(),
        });
    }
    if map.dart_map.len() != source.dart_count() {
        return Err(CoveringError::DartMapSize {
            expected: source.dart_count(),
            got: map.dart_map.len(),
        });
    }
    if let Some(&image) = map.vertex_map.iter().find(|&&x| x >= target.vertex_count()) {
        return Err(CoveringError::ImageOutOfRange { image });
    }
    if let Some(&image) = map.dart_map.iter().find(|&&x| x >= target.dart_count()) {
        return Err(CoveringError::ImageOutOfRange { image });
    }
    Ok(())
}

/// Checks incidence, the involution and local bijectivity, reporting the
/// first violation; when the target is connected, also checks that every
/// fiber has the same size.
pub fn verify_covering(
    source: &MultiGraph,
    target: &MultiGraph,
    map: &CoveringMap,
) -> Result<CoveringReport, CoveringError> {
    check_sizes(source, target, map)?;
    let mut fiber_sizes = vec![0; target.vertex_count()];
    for &x in &map.vertex_map {
        fiber_sizes[x] += 1;
    }
    let covering_number = match fiber_sizes.first() {
        Some(&k) if fiber_sizes.iter().all(|&s| s == k) => Some(k),
        _ => None,
    };
    let violation = first_violation(source, target, map, &fiber_sizes);
    Ok(CoveringReport {
        violation,
        fiber_sizes,
        covering_number,
    })
}

fn first_violation(
    source: &MultiGraph,
    target: &MultiGraph,
    map: &CoveringMap,
    fiber_sizes: &[usize],
) -> Option<CoveringViolation> {
    for d in 0..source.dart_count() {
        if target.dart_vertex(map.dart_map[d]) != map.vertex_map[source.dart_vertex(d)] {
            return Some(CoveringViolation::Incidence { dart: d });
        }
        if map.dart_map[mate(d)] != mate(map.dart_map[d]) {
            return Some(CoveringViolation::Involution { dart: d });
        }
    }
    let mut stamp = vec![usize::MAX; target.dart_count()];
    for v in 0..source.vertex_count() {
        let image = map.vertex_map[v];
        if source.degree(v) != target.degree(image) {
            return Some(CoveringViolation::NotLocallyBijective {
                vertex: v,
                dart: None,
            });
        }
        for &d in source.darts_at(v) {
            let t = map.dart_map[d];
            if stamp[t] == v {
                return Some(CoveringViolation::NotLocallyBijective {
                    vertex: v,
                    dart: Some(d),
                });
            }
            stamp[t] = v;
        }
    }
    if target.vertex_count() > 0 && target.structure().connected {
        if let Some(w) = fiber_sizes.iter().position(|&s| s != fiber_sizes[0]) {
            return Some(CoveringViolation::UnequalFibers { vertex: w });
        }
    }
    None
}

/// Finds a dart map making `vertex_map` a covering, if one exists.
///
/// Source edges are grouped by the pair of target vertices they join. For a
/// pair `a != b` carrying `k` target edges, the source edges between the two
/// fibers must form a `k`-regular bipartite graph; its perfect matchings are
/// sent to the `k` target edges in order. Over `a` with `l` loops, the
/// source edges inside the fiber must form a `2l`-regular graph; each of its
/// `l` oriented 2-factors is sent to one loop.
pub fn infer_covering(
    source: &MultiGraph,
    target: &MultiGraph,
    vertex_map: &[Vertex],
) -> Result<Result<CoveringMap, CoveringViolation>, CoveringError> {
    if vertex_map.len() != source.vertex_count() {
        return Err(CoveringError::VertexMapSize {
            expected: source.vertex_count(),
            got: vertex_map.len(),
        });
    }
    if let Some(&image) = vertex_map.iter().find(|&&x| x >= target.vertex_count()) {
        return Err(CoveringError::ImageOutOfRange { image });
    }
    for v in 0..source.vertex_count() {
        if source.degree(v) != target.degree(vertex_map[v]) {
            return Ok(Err(CoveringViolation::NotLocallyBijective {
                vertex: v,
                dart: None,
            }));
        }
    }

    let mut fibers: Vec<Vec<Vertex>> = vec![Vec::new(); target.vertex_count()];
    let mut position = vec![0; source.vertex_count()];
    for (v, &x) in vertex_map.iter().enumerate() {
        position[v] = fibers[x].len();
        fibers[x].push(v);
    }
    let key = |a: Vertex, b: Vertex| if a <= b { (a, b) } else { (b, a) };
    let mut target_groups: BTreeMap<(Vertex, Vertex), Vec<EdgeId>> = BTreeMap::new();
    for e in 0..target.edge_count() {
        let (a, b) = target.endpoints(e);
        target_groups.entry(key(a, b)).or_default().push(e);
    }
    let mut source_groups: BTreeMap<(Vertex, Vertex), Vec<EdgeId>> = BTreeMap::new();
    for e in 0..source.edge_count() {
        let (u, v) = source.endpoints(e);
        let k = key(vertex_map[u], vertex_map[v]);
        if !target_groups.contains_key(&k) {
            return Ok(Err(CoveringViolation::NotLocallyBijective {
                vertex: u,
                dart: Some(2 * e),
            }));
        }
        source_groups.entry(k).or_default().push(e);
    }

    let mut dart_map = vec![usize::MAX; source.dart_count()];
    for (&(a, b), targets) in &target_groups {
        let edges = source_groups.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[]);
        let ok = if a == b {
            map_loops(source, &fibers[a], &position, edges, targets, &mut dart_map)
        } else {
            map_links(
                source,
                target,
                vertex_map,
                (a, b),
                &fibers,
                &position,
                edges,
                targets,
                &mut dart_map,
            )
        };
        if let Err(vertex) = ok {
            return Ok(Err(CoveringViolation::NotLocallyBijective {
                vertex,
                dart: None,
            }));
        }
    }
    let map = CoveringMap {
        vertex_map: vertex_map.to_vec(),
        dart_map,
    };
    let report = verify_covering(source, target, &map)?;
    if let Some(violation) = report.violation {
        unreachable!("inferred dart map failed verification: {violation}");
    }
    Ok(Ok(map))
}

/// Maps the source edges between fibers `a < b` onto the target edges `a b`.
#[allow(clippy::too_many_arguments)]
fn map_links(
    source: &MultiGraph,
    target: &MultiGraph,
    vertex_map: &[Vertex],
    (a, b): (Vertex, Vertex),
    fibers: &[Vec<Vertex>],
    position: &[usize],
    edges: &[EdgeId],
    targets: &[EdgeId],
    dart_map: &mut [Dart],
) -> Result<(), Vertex> {
    let offset = fibers[a].len();
    let mut local = MultiGraph::empty(offset + fibers[b].len());
    // dart of each source edge at its end over `a`
    let mut dart_at_a = Vec::with_capacity(edges.len());
    for &e in edges {
        let d = if vertex_map[source.dart_vertex(2 * e)] == a {
            2 * e
        } else {
            2 * e + 1
        };
        local
            .add_edge(
                position[source.dart_vertex(d)],
                offset + position[source.dart_target(d)],
            )
            .expect("local vertices in range");
        dart_at_a.push(d);
    }
    check_regular(&local, targets.len(), |x| {
        if x < offset {
            fibers[a][x]
        } else {
            fibers[b][x - offset]
        }
    })?;
    let side: Vec<bool> = (0..local.vertex_count()).map(|x| x >= offset).collect();
    let matchings = regular_bipartite_one_factorization(&local, &side).expect("regular bipartite");
    for (matching, &t) in matchings.iter().zip(targets) {
        let ta = if target.dart_vertex(2 * t) == a {
            2 * t
        } else {
            2 * t + 1
        };
        for &i in matching {
            let d = dart_at_a[i];
            dart_map[d] = ta;
            dart_map[mate(d)] = mate(ta);
        }
    }
    Ok(())
}

/// Maps the source edges inside one fiber onto the loops at its base vertex.
fn map_loops(
    source: &MultiGraph,
    fiber: &[Vertex],
    position: &[usize],
    edges: &[EdgeId],
    loops: &[EdgeId],
    dart_map: &mut [Dart],
) -> Result<(), Vertex> {
    let mut local = MultiGraph::empty(fiber.len());
    for &e in edges {
        let (u, v) = source.endpoints(e);
        local
            .add_edge(position[u], position[v])
            .expect("local vertices in range");
    }
    check_regular(&local, 2 * loops.len(), |x| fiber[x])?;
    let factors = two_factorization(&local).expect("even regular");
    for (j, &t) in loops.iter().enumerate() {
        for x in 0..fiber.len() {
            let ld = factors.out_dart(j, x);
            let d = 2 * edges[edge_of(ld)] + (ld & 1);
            dart_map[d] = 2 * t;
            dart_map[mate(d)] = 2 * t + 1;
        }
    }
    Ok(())
}

fn check_regular(
    local: &MultiGraph,
    degree: usize,
    origin: impl Fn(Vertex) -> Vertex,
) -> Result<(), Vertex> {
    match (0..local.vertex_count()).find(|&x| local.degree(x) != degree) {
        Some(x) => Err(origin(x)),
        None => Ok(()),
    }
}

/// The identity covering of `g` onto itself.
pub fn identity_covering(g: &MultiGraph) -> CoveringMap {
    CoveringMap {
        vertex_map: (0..g.vertex_count()).collect(),
        dart_map: (0..g.dart_count()).collect(),
    }
}

/// Projection of [`MultiGraph::standard_two_lift`] onto its base.
pub fn two_lift_projection(g: &MultiGraph) -> CoveringMap {
    let n = g.vertex_count();
    let m = g.edge_count();
    // lifted edge 2e covers e in its own orientation; 2e+1 covers e reversed
    let mut dart_map = Vec::with_capacity(4 * m);
    for e in 0..m {
        dart_map.extend([2 * e, 2 * e + 1, 2 * e, 2 * e + 1]);
    }
    CoveringMap {
        vertex_map: (0..2 * n).map(|x| x % n).collect(),
        dart_map,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;

    fn verify(source: &MultiGraph, target: &MultiGraph, map: &CoveringMap) -> CoveringReport {
        verify_covering(source, target, map).unwrap()
    }

    #[test]
    fn identity_is_a_covering() {
        let g = petersen();
        let report = verify(&g, &g, &identity_covering(&g));
        assert!(report.is_covering());
        assert_eq!(report.covering_number, Some(1));
    }

    #[test]
    fn two_lift_projection_covers() {
        for g in [
            cycle(3),
            complete(4),
            MultiGraph::from_edges(1, &[(0, 0)]).unwrap(),
            cubic_with_bridge(),
        ] {
            let lift = g.standard_two_lift();
            let report = verify(&lift, &g, &two_lift_projection(&g));
            assert!(report.is_covering(), "{:?}", report.violation);
            assert_eq!(report.covering_number, Some(2));
        }
    }

    #[test]
    fn wrong_vertex_map_is_located() {
        let c6 = cycle(6);
        let triangle = cycle(3);
        let mut map = infer_covering(&c6, &triangle, &[0, 1, 2, 0, 1, 2])
            .unwrap()
            .unwrap();
        assert!(verify(&c6, &triangle, &map).is_covering());
        // send vertex 1 onto 0: edge 0-1 then has no image
        map.vertex_map[1] = 0;
        assert_eq!(
            verify(&c6, &triangle, &map).violation,
            Some(CoveringViolation::Incidence { dart: 1 })
        );
        assert!(infer_covering(&c6, &triangle, &map.vertex_map)
            .unwrap()
            .is_err());
    }

    #[test]
    fn infer_resolves_loops_and_parallel_edges() {
        // a 3-cycle and a double edge both cover a single vertex with one loop
        let lp = MultiGraph::from_edges(1, &[(0, 0)]).unwrap();
        for g in [
            cycle(3),
            MultiGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap(),
        ] {
            let map = infer_covering(&g, &lp, &vec![0; g.vertex_count()])
                .unwrap()
                .unwrap();
            assert!(verify(&g, &lp, &map).is_covering());
        }
        // K4's bipartite double cover over K4 through the inferred map
        let k4 = complete(4);
        let lift = k4.standard_two_lift();
        let vm: Vec<usize> = (0..8).map(|x| x % 4).collect();
        assert!(infer_covering(&lift, &k4, &vm).unwrap().is_ok());
    }

    #[test]
    fn unequal_fibers_and_size_errors() {
        let g = cycle(3);
        assert_eq!(
            verify_covering(
                &g,
                &g,
                &CoveringMap {
                    vertex_map: vec![0],
                    dart_map: vec![]
                }
            ),
            Err(CoveringError::VertexMapSize {
                expected: 3,
                got: 1
            })
        );
        // disjoint union of a triangle and a 6-cycle onto a triangle
        let source = cycle(3).disjoint_union(&cycle(6));
        let vm: Vec<usize> = (0..9)
            .map(|x| if x < 3 { x } else { (x - 3) % 3 })
            .collect();
        let map = infer_covering(&source, &g, &vm).unwrap().unwrap();
        let report = verify(&source, &g, &map);
        assert!(report.is_covering());
        assert_eq!(report.covering_number, Some(3));
        assert!(infer_covering(&path(3), &cycle(3), &[0, 1, 2])
            .unwrap()
            .is_err());
    }
}
