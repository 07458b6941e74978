//! Random products `H = G((σ₁,π₁),…,(σ_d,π_d))` over a fixed base
//! `G_B = G(σ₁,…,σ_d)`, their spectra, and random lifts for comparison.
//!
//! Vertex `(v, u)` of `H` is `v·n + u`. Permutation `π_i` of trial `t` comes
//! from `stream(seed, t, i)`; the lift permutation of base edge `e` from
//! `stream(seed, t, 2³² + e)`.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::covering::{verify_covering, CoveringMap};
use crate::factorization::two_factorization;
use crate::format::{parse_tpg, parse_tpp, FormatError};
use crate::graph::{MultiGraph, Permutation, PermutationGraph};
use crate::linalg::{match_spectrum, symmetric_eigenvalues, LinalgError};
use crate::rng::{random_permutation, stream};
use crate::words::closed_path_count;

/// Absolute tolerance for matching eigenvalues between spectra.
pub const MATCH_TOLERANCE: f64 = 1e-6;
/// Allowed gap between the top eigenvalue of `H` and its degree.
pub const TOP_TOLERANCE: f64 = 1e-8;
/// Largest `|V(H)|` for which traces are cross-checked by path counting.
pub const TRACE_CHECK_VERTICES: usize = 60;
const TRACE_CAP: u128 = 2_000_000_000;
const LIFT_STREAM_OFFSET: u64 = 1 << 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("{0}")]
    Input(String),
    #[error("base graph must have no pairing")]
    BaseHasPairing,
    #[error("fiber size must be at least 1")]
    EmptyFiber,
    #[error("projection onto {factor} is not a covering: {reason}")]
    NotCovering {
        factor: &'static str,
        reason: String,
    },
    #[error("eigenvalue {value} of {factor} has no partner in spec(H)")]
    Unmatched { factor: &'static str, value: f64 },
    #[error("spectrum of H has {got} values, expected a multiple of {base}")]
    SpectrumSize { got: usize, base: usize },
    #[error("top eigenvalue {found} differs from the degree {degree}")]
    TopEigenvalue { found: f64, degree: usize },
    #[error("Tr(A^{length}) = {trace} but {paths} closed walks were counted")]
    TraceMismatch {
        length: usize,
        trace: u128,
        paths: u128,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl From<FormatError> for SpectralError {
    fn from(e: FormatError) -> Self {
        SpectralError::Input(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomProductConfig {
    pub base: PermutationGraph,
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
}

/// One sample of the random product model together with its factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomProduct {
    pub h: MultiGraph,
    /// `H` as the permutation graph of the pairs `(σ_i, π_i)`.
    pub presentation: PermutationGraph,
    pub g_b: MultiGraph,
    pub g_r: MultiGraph,
    pub pi: Vec<Permutation>,
    pub proj_base: CoveringMap,
    pub proj_random: CoveringMap,
}

fn check_cover(
    source: &MultiGraph,
    target: &MultiGraph,
    map: &CoveringMap,
    factor: &'static str,
) -> Result<(), SpectralError> {
    let report = verify_covering(source, target, map).map_err(|e| SpectralError::NotCovering {
        factor,
        reason: e.to_string(),
    })?;
    match report.violation {
        Some(v) => Err(SpectralError::NotCovering {
            factor,
            reason: v.to_string(),
        }),
        None => Ok(()),
    }
}

/// Draws trial `trial` of the model and verifies both projections.
pub fn random_tight_product(
    base: &PermutationGraph,
    n: usize,
    seed: u64,
    trial: u64,
) -> Result<RandomProduct, SpectralError> {
    if base.pairing().is_some() {
        return Err(SpectralError::BaseHasPairing);
    }
    if n == 0 {
        return Err(SpectralError::EmptyFiber);
    }
    let nb = base.vertex_count();
    let d = base.generators().len();
    let pi: Vec<Permutation> = (0..d)
        .map(|i| random_permutation(n, &mut stream(seed, trial, i as u64)))
        .collect();
    let pairs = base
        .generators()
        .iter()
        .zip(&pi)
        .map(|(s, p)| {
            let images = (0..nb * n)
                .map(|x| s.apply(x / n) * n + p.apply(x % n))
                .collect();
            Permutation::new(images).expect("product of permutations")
        })
        .collect();
    let presentation = PermutationGraph::new(nb * n, pairs, None).expect("sizes agree");
    let h = presentation.to_multigraph();
    let g_b = base.to_multigraph();
    let g_r = PermutationGraph::new(n, pi.clone(), None)
        .expect("sizes agree")
        .to_multigraph();

    // generator i owns edges i·|V| .. (i+1)·|V| in every presentation
    let big = nb * n;
    let dart_image = |dart: usize, width: usize, part: &dyn Fn(usize) -> usize| {
        let (edge, side) = (dart / 2, dart % 2);
        let (i, x) = (edge / big, edge % big);
        2 * (i * width + part(x)) + side
    };
    let proj_base = CoveringMap {
        vertex_map: (0..big).map(|x| x / n).collect(),
        dart_map: (0..h.dart_count())
            .map(|dt| dart_image(dt, nb, &|x| x / n))
            .collect(),
    };
    let proj_random = CoveringMap {
        vertex_map: (0..big).map(|x| x % n).collect(),
        dart_map: (0..h.dart_count())
            .map(|dt| dart_image(dt, n, &|x| x % n))
            .collect(),
    };
    check_cover(&h, &g_b, &proj_base, "G_B")?;
    check_cover(&h, &g_r, &proj_random, "G_R")?;
    Ok(RandomProduct {
        h,
        presentation,
        g_b,
        g_r,
        pi,
        proj_base,
        proj_random,
    })
}

/// A random `n`-lift: one uniform permutation `π_e` per edge, lifted edge
/// `e·n + j` joining `(u, j)` to `(v, π_e(j))`. Returns the lift and its
/// verified projection.
pub fn random_lift(
    base: &MultiGraph,
    n: usize,
    seed: u64,
    trial: u64,
) -> Result<(MultiGraph, CoveringMap), SpectralError> {
    if n == 0 {
        return Err(SpectralError::EmptyFiber);
    }
    let mut lift = MultiGraph::empty(base.vertex_count() * n);
    let mut dart_map = Vec::with_capacity(2 * base.edge_count() * n);
    for (e, (u, v)) in base.edges().enumerate() {
        let pi = random_permutation(n, &mut stream(seed, trial, LIFT_STREAM_OFFSET + e as u64));
        for j in 0..n {
            lift.add_edge(u * n + j, v * n + pi.apply(j))
                .expect("in range");
            dart_map.extend([2 * e, 2 * e + 1]);
        }
    }
    let map = CoveringMap {
        vertex_map: (0..lift.vertex_count()).map(|x| x / n).collect(),
        dart_map,
    };
    check_cover(&lift, base, &map, "base")?;
    Ok((lift, map))
}

/// Splits `spec_h` into the values matched by `spec_base` and the rest.
pub fn split_new_eigenvalues(
    spec_h: &[f64],
    spec_base: &[f64],
    tol: f64,
) -> Result<(Vec<f64>, Vec<f64>), SpectralError> {
    if spec_base.is_empty() || !spec_h.len().is_multiple_of(spec_base.len()) {
        return Err(SpectralError::SpectrumSize {
            got: spec_h.len(),
            base: spec_base.len(),
        });
    }
    let unmatched =
        match_spectrum(spec_h, spec_base, tol).map_err(|value| SpectralError::Unmatched {
            factor: "G_B",
            value,
        })?;
    let mut is_new = vec![false; spec_h.len()];
    for &i in &unmatched {
        is_new[i] = true;
    }
    let mut old = Vec::with_capacity(spec_base.len());
    let mut new = Vec::with_capacity(unmatched.len());
    for (&x, &fresh) in spec_h.iter().zip(&is_new) {
        if fresh {
            new.push(x);
        } else {
            old.push(x);
        }
    }
    old.sort_by(f64::total_cmp);
    new.sort_by(f64::total_cmp);
    Ok((old, new))
}

/// `32^{1/4}·d^{3/4}`.
pub fn mu_bound(d: usize) -> f64 {
    32f64.powf(0.25) * (d as f64).powf(0.75)
}

/// `2√(2d−1)`, the Alon-Boppana level at degree `2d`.
pub fn alon_boppana(d: usize) -> f64 {
    2.0 * ((2 * d - 1) as f64).sqrt()
}

fn largest_abs(values: &[f64]) -> Option<f64> {
    values.iter().map(|x| x.abs()).max_by(f64::total_cmp)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues_h: Vec<f64>,
    pub eigenvalues_base: Vec<f64>,
    pub eigenvalues_random_factor: Vec<f64>,
    pub new_eigenvalues: Vec<f64>,
    /// Largest absolute new eigenvalue; absent when there are none.
    pub mu: Option<f64>,
    /// Second largest eigenvalue of `G_R`; absent when `n = 1`.
    pub lambda2_gr: Option<f64>,
    pub bound: f64,
}

fn spectrum(g: &MultiGraph) -> Result<Vec<f64>, SpectralError> {
    Ok(symmetric_eigenvalues(&g.adjacency_matrix())?)
}

fn check_top(spec: &[f64], degree: usize) -> Result<(), SpectralError> {
    match spec.last() {
        Some(&top) if (top - degree as f64).abs() > TOP_TOLERANCE => {
            Err(SpectralError::TopEigenvalue { found: top, degree })
        }
        _ => Ok(()),
    }
}

/// Spectra of `H`, `G_B` and `G_R` with containment and regularity checks.
/// `base_spectrum` may be passed in when it is shared between trials.
pub fn spectrum_report(
    p: &RandomProduct,
    base_spectrum: Option<&[f64]>,
) -> Result<SpectrumReport, SpectralError> {
    let d = p.pi.len();
    let eigenvalues_h = spectrum(&p.h)?;
    check_top(&eigenvalues_h, 2 * d)?;
    let eigenvalues_base = match base_spectrum {
        Some(s) => s.to_vec(),
        None => spectrum(&p.g_b)?,
    };
    let eigenvalues_random_factor = spectrum(&p.g_r)?;
    match_spectrum(&eigenvalues_h, &eigenvalues_random_factor, MATCH_TOLERANCE).map_err(
        |value| SpectralError::Unmatched {
            factor: "G_R",
            value,
        },
    )?;
    let (_, new_eigenvalues) =
        split_new_eigenvalues(&eigenvalues_h, &eigenvalues_base, MATCH_TOLERANCE)?;
    let r = &eigenvalues_random_factor;
    Ok(SpectrumReport {
        mu: largest_abs(&new_eigenvalues),
        lambda2_gr: (r.len() >= 2).then(|| r[r.len() - 2]),
        bound: mu_bound(d),
        eigenvalues_h,
        eigenvalues_base,
        eigenvalues_random_factor,
        new_eigenvalues,
    })
}

/// Largest absolute eigenvalue of a lift that is not an eigenvalue of its base.
pub fn lift_mu(lift: &MultiGraph, base_spectrum: &[f64]) -> Result<Option<f64>, SpectralError> {
    let (_, new) = split_new_eigenvalues(&spectrum(lift)?, base_spectrum, MATCH_TOLERANCE)?;
    Ok(largest_abs(&new))
}

/// `Tr(A^length)` in exact integer arithmetic.
pub fn adjacency_trace(g: &MultiGraph, length: usize) -> u128 {
    let a: Vec<Vec<u128>> = g
        .adjacency_counts()
        .iter()
        .map(|r| r.iter().map(|&x| u128::from(x)).collect())
        .collect();
    let n = a.len();
    let mut power: Vec<Vec<u128>> = (0..n)
        .map(|i| (0..n).map(|j| u128::from(i == j)).collect())
        .collect();
    for _ in 0..length {
        power = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| power[i][k] * a[k][j]).sum())
                    .collect()
            })
            .collect();
    }
    (0..n).map(|i| power[i][i]).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyReport {
    pub bits_product: f64,
    pub bits_lift: f64,
    /// `bits_product / bits_lift`, which is `1 / |V(G_B)|`.
    pub ratio: f64,
}

pub fn log2_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).log2()).sum()
}

/// Random bits used by the product model versus a lift of the same base.
pub fn entropy_report(d: usize, base_vertices: usize, n: usize) -> EntropyReport {
    let per_permutation = log2_factorial(n);
    EntropyReport {
        bits_product: d as f64 * per_permutation,
        bits_lift: (d * base_vertices) as f64 * per_permutation,
        ratio: 1.0 / base_vertices as f64,
    }
}

/// Where the base graph comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseSpec {
    /// A `tpp` file, or an even-regular `tpg` file that gets 2-factorized.
    File(String),
    /// `G(σ₁,…,σ_{degree/2})` on `vertices` vertices, drawn from the seed.
    Random { vertices: usize, degree: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub d: usize,
    pub n: Vec<usize>,
    pub trials: usize,
    pub base: BaseSpec,
    /// Largest walk length `2k` for the trace cross-check.
    pub kmax: Option<usize>,
    pub slack: f64,
    pub jobs: usize,
    pub lift_trials: usize,
}

impl ExperimentConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, SpectralError> {
        let mut seed = None;
        let mut d = None;
        let mut n = None;
        let mut trials = None;
        let mut base = None;
        let mut kmax = None;
        let mut slack = 2.0;
        let mut jobs = 1;
        let mut lift_trials = 0;
        let mut last = 1;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            last = line;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let bad = |message: String| SpectralError::Config { line, message };
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| bad("expected \"key = value\"".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let int = |v: &str| {
                v.parse::<usize>().map_err(|_| {
                    bad(format!(
                        "{key}: expected a non-negative integer, found {v:?}"
                    ))
                })
            };
            match key {
                "seed" => {
                    seed = Some(
                        value
                            .parse::<u64>()
                            .map_err(|_| bad(format!("seed: bad value {value:?}")))?,
                    )
                }
                "d" => d = Some(int(value)?),
                "n" => {
                    let grid = value
                        .split(',')
                        .map(|v| int(v.trim()))
                        .collect::<Result<Vec<_>, _>>()?;
                    if grid.contains(&0) {
                        return Err(bad("n: fiber sizes must be at least 1".into()));
                    }
                    n = Some(grid);
                }
                "trials" => trials = Some(int(value)?),
                "base" => {
                    base = Some(match value.strip_prefix("random:") {
                        Some(spec) => {
                            let parts = spec
                                .split(',')
                                .map(|v| int(v.trim()))
                                .collect::<Result<Vec<_>, _>>()?;
                            match parts[..] {
                                [vertices, degree] if degree % 2 == 0 && vertices > 0 => {
                                    BaseSpec::Random { vertices, degree }
                                }
                                _ => {
                                    return Err(bad(
                                        "base: expected random:<vertices>,<even degree>".into(),
                                    ))
                                }
                            }
                        }
                        None => BaseSpec::File(value.to_string()),
                    })
                }
                "kmax" => kmax = Some(int(value)?),
                "slack" => {
                    slack = value
                        .parse::<f64>()
                        .ok()
                        .filter(|s| s.is_finite())
                        .ok_or_else(|| bad(format!("slack: bad value {value:?}")))?
                }
                "jobs" => jobs = int(value)?.max(1),
                "lift_trials" => lift_trials = int(value)?,
                _ => return Err(bad(format!("unknown key {key:?}"))),
            }
        }
        let missing = |key: &str| SpectralError::Config {
            line: last,
            message: format!("missing key {key:?}"),
        };
        let cfg = ExperimentConfig {
            seed: seed.unwrap_or(0),
            d: d.ok_or_else(|| missing("d"))?,
            n: n.ok_or_else(|| missing("n"))?,
            trials: trials.ok_or_else(|| missing("trials"))?,
            base: base.ok_or_else(|| missing("base"))?,
            kmax,
            slack,
            jobs,
            lift_trials,
        };
        if let BaseSpec::Random { degree, .. } = cfg.base {
            if degree != 2 * cfg.d {
                return Err(SpectralError::Config {
                    line: last,
                    message: format!("base degree {degree} is not 2d = {}", 2 * cfg.d),
                });
            }
        }
        Ok(cfg)
    }

    /// Builds the base graph; file paths are relative to `dir`.
    pub fn load_base(&self, dir: &Path) -> Result<PermutationGraph, SpectralError> {
        let base = match &self.base {
            BaseSpec::Random { vertices, degree } => random_base(*vertices, degree / 2, self.seed),
            BaseSpec::File(path) => {
                let full = dir.join(path);
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| SpectralError::Input(format!("{}: {e}", full.display())))?;
                let header = text
                    .lines()
                    .map(str::trim)
                    .find(|l| !l.is_empty() && !l.starts_with('#'));
                if header.is_some_and(|h| h.starts_with("tpg")) {
                    let g = parse_tpg(&text)?;
                    two_factorization(&g)
                        .map_err(|e| SpectralError::Input(format!("{}: {e}", full.display())))?
                        .to_permutation_graph(g.vertex_count())
                } else {
                    parse_tpp(&text)?
                }
            }
        };
        if base.pairing().is_some() {
            return Err(SpectralError::BaseHasPairing);
        }
        if base.generators().len() != self.d {
            return Err(SpectralError::Input(format!(
                "base has {} permutations, config says d = {}",
                base.generators().len(),
                self.d
            )));
        }
        Ok(base)
    }
}

/// `G(σ₁,…,σ_d)` on `vertices` vertices with `σ_i` from `stream(seed, u64::MAX, i)`.
pub fn random_base(vertices: usize, d: usize, seed: u64) -> PermutationGraph {
    let gens = (0..d)
        .map(|i| random_permutation(vertices, &mut stream(seed, u64::MAX, i as u64)))
        .collect();
    PermutationGraph::new(vertices, gens, None).expect("sizes agree")
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRow {
    pub trial: u64,
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub mu: Option<f64>,
    pub lambda2_gr: Option<f64>,
    pub bound: f64,
    pub alon_boppana: f64,
    pub millis: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceCheck {
    pub trial: u64,
    pub length: usize,
    pub trace: u128,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiftRow {
    pub trial: u64,
    pub n: usize,
    pub mu: Option<f64>,
    pub millis: u128,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupSummary {
    pub n: usize,
    pub trials: usize,
    pub mean_mu: Option<f64>,
    pub max_mu: Option<f64>,
    /// Share of trials with `μ ≤ bound + slack`.
    pub fraction_under_threshold: f64,
    /// Share of trials with `μ ≥ 2√(2d−1) − 0.5`.
    pub fraction_above_floor: f64,
    pub mean_mu_lift: Option<f64>,
    pub entropy: EntropyReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<TrialRow>,
    pub lifts: Vec<LiftRow>,
    pub trace_checks: Vec<TraceCheck>,
    pub groups: Vec<GroupSummary>,
    pub threshold: f64,
}

/// Offset subtracted from the Alon-Boppana level for the lower sanity check.
pub const FLOOR_MARGIN: f64 = 0.5;

fn run_trial(
    base: &PermutationGraph,
    base_spectrum: &[f64],
    cfg: &ExperimentConfig,
    n: usize,
    trial: u64,
) -> Result<(TrialRow, Vec<TraceCheck>), SpectralError> {
    let start = Instant::now();
    let p = random_tight_product(base, n, cfg.seed, trial)?;
    let report = spectrum_report(&p, Some(base_spectrum))?;
    let mut checks = Vec::new();
    if let Some(kmax) = cfg.kmax {
        if p.h.vertex_count() <= TRACE_CHECK_VERTICES {
            for length in (2..=kmax).step_by(2) {
                let trace = adjacency_trace(&p.h, length);
                let paths = closed_path_count(&p.presentation, length, TRACE_CAP)
                    .map_err(|e| SpectralError::Input(format!("trace check: {e}")))?;
                if trace != paths {
                    return Err(SpectralError::TraceMismatch {
                        length,
                        trace,
                        paths,
                    });
                }
                checks.push(TraceCheck {
                    trial,
                    length,
                    trace,
                });
            }
        }
    }
    let row = TrialRow {
        trial,
        seed: cfg.seed,
        n,
        d: cfg.d,
        mu: report.mu,
        lambda2_gr: report.lambda2_gr,
        bound: report.bound,
        alon_boppana: alon_boppana(cfg.d),
        millis: start.elapsed().as_millis(),
    };
    Ok((row, checks))
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Runs every trial of the grid. Trial `t` at grid position `g` has global
/// index `g·trials + t`; rows come back in that order whatever `jobs` is.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    base: &PermutationGraph,
) -> Result<ExperimentReport, SpectralError> {
    let g_b = base.to_multigraph();
    let base_spectrum = spectrum(&g_b)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| SpectralError::Input(format!("thread pool: {e}")))?;
    let tasks: Vec<(usize, u64)> = cfg
        .n
        .iter()
        .enumerate()
        .flat_map(|(g, &n)| (0..cfg.trials as u64).map(move |t| (n, (g * cfg.trials) as u64 + t)))
        .collect();
    let lift_tasks: Vec<(usize, u64)> = cfg
        .n
        .iter()
        .enumerate()
        .flat_map(|(g, &n)| {
            (0..cfg.lift_trials as u64).map(move |t| (n, (g * cfg.lift_trials) as u64 + t))
        })
        .collect();
    let (results, lifts) = pool.install(|| {
        let results: Vec<_> = tasks
            .par_iter()
            .map(|&(n, trial)| run_trial(base, &base_spectrum, cfg, n, trial))
            .collect();
        let lifts = lift_tasks
            .par_iter()
            .map(|&(n, trial)| {
                let start = Instant::now();
                let (lift, _) = random_lift(&g_b, n, cfg.seed, trial)?;
                let mu = lift_mu(&lift, &base_spectrum)?;
                Ok(LiftRow {
                    trial,
                    n,
                    mu,
                    millis: start.elapsed().as_millis(),
                })
            })
            .collect::<Result<Vec<_>, SpectralError>>();
        (results, lifts)
    });
    let lifts = lifts?;
    let mut rows = Vec::with_capacity(results.len());
    let mut trace_checks = Vec::new();
    for r in results {
        let (row, checks) = r?;
        rows.push(row);
        trace_checks.extend(checks);
    }
    let threshold = mu_bound(cfg.d) + cfg.slack;
    let floor = alon_boppana(cfg.d) - FLOOR_MARGIN;
    let groups = cfg
        .n
        .iter()
        .enumerate()
        .map(|(g, &n)| {
            let group = &rows[g * cfg.trials..(g + 1) * cfg.trials];
            let mus: Vec<f64> = group.iter().filter_map(|r| r.mu).collect();
            let share = |pred: &dyn Fn(f64) -> bool| {
                if group.is_empty() {
                    0.0
                } else {
                    group.iter().filter(|r| r.mu.is_some_and(pred)).count() as f64
                        / group.len() as f64
                }
            };
            let lift_mus: Vec<f64> = lifts[g * cfg.lift_trials..(g + 1) * cfg.lift_trials]
                .iter()
                .filter_map(|l| l.mu)
                .collect();
            GroupSummary {
                n,
                trials: group.len(),
                mean_mu: mean(&mus),
                max_mu: mus.iter().copied().max_by(f64::total_cmp),
                fraction_under_threshold: share(&|m| m <= threshold),
                fraction_above_floor: share(&|m| m >= floor),
                mean_mu_lift: mean(&lift_mus),
                entropy: entropy_report(cfg.d, base.vertex_count(), n),
            }
        })
        .collect();
    Ok(ExperimentReport {
        rows,
        lifts,
        trace_checks,
        groups,
        threshold,
    })
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), |v| format!("{v:.12}"))
}

pub const CSV_HEADER: &str = "trial,seed,n,d,mu,lambda2_gr,bound,alon_boppana,millis";

impl ExperimentReport {
    /// One row per trial; `with_timing = false` blanks the wall-time column
    /// so reruns compare byte for byte.
    pub fn csv(&self, with_timing: bool) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for r in &self.rows {
            let millis = if with_timing {
                r.millis.to_string()
            } else {
                String::new()
            };
            writeln!(
                out,
                "{},{},{},{},{},{},{:.12},{:.12},{millis}",
                r.trial,
                r.seed,
                r.n,
                r.d,
                opt(r.mu),
                opt(r.lambda2_gr),
                r.bound,
                r.alon_boppana
            )
            .expect("write to string");
        }
        out
    }

    pub fn summary(&self) -> String {
        let all: Vec<f64> = self.rows.iter().filter_map(|r| r.mu).collect();
        let num = |x: Option<f64>| x.map_or_else(|| "null".to_string(), |v| format!("{v:.6}"));
        let mut out = String::from("{\n");
        writeln!(out, "  \"trials\": {},", self.rows.len()).unwrap();
        writeln!(out, "  \"threshold\": {:.6},", self.threshold).unwrap();
        writeln!(out, "  \"mean_mu\": {},", num(mean(&all))).unwrap();
        writeln!(
            out,
            "  \"max_mu\": {},",
            num(all.iter().copied().max_by(f64::total_cmp))
        )
        .unwrap();
        let under = self
            .rows
            .iter()
            .filter(|r| r.mu.is_some_and(|m| m <= self.threshold))
            .count();
        let share = if self.rows.is_empty() {
            0.0
        } else {
            under as f64 / self.rows.len() as f64
        };
        writeln!(out, "  \"fraction_under_threshold\": {share:.6},").unwrap();
        writeln!(out, "  \"trace_checks\": {},", self.trace_checks.len()).unwrap();
        out.push_str("  \"by_n\": [\n");
        for (i, g) in self.groups.iter().enumerate() {
            let sep = if i + 1 == self.groups.len() { "" } else { "," };
            writeln!(
                out,
                "    {{\"n\": {}, \"trials\": {}, \"mean_mu\": {}, \"max_mu\": {}, \"fraction_under_threshold\": {:.6}, \
                 \"fraction_above_floor\": {:.6}, \"mean_mu_lift\": {}, \"bits_product\": {:.3}, \"bits_lift\": {:.3}, \
                 \"bit_ratio\": {:.6}}}{sep}",
                g.n,
                g.trials,
                num(g.mean_mu),
                num(g.max_mu),
                g.fraction_under_threshold,
                g.fraction_above_floor,
                num(g.mean_mu_lift),
                g.entropy.bits_product,
                g.entropy.bits_lift,
                g.entropy.ratio
            )
            .unwrap();
        }
        out.push_str("  ]\n}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::complete;

    fn k5_base() -> PermutationGraph {
        two_factorization(&complete(5))
            .unwrap()
            .to_permutation_graph(5)
    }

    #[test]
    fn single_vertex_base_gives_the_random_factor() {
        let base = PermutationGraph::new(1, vec![Permutation::identity(1); 3], None).unwrap();
        let p = random_tight_product(&base, 7, 1, 0).unwrap();
        assert_eq!(p.h, p.g_r);
    }

    #[test]
    fn single_fiber_gives_the_base() {
        let base = k5_base();
        let p = random_tight_product(&base, 1, 9, 4).unwrap();
        assert_eq!(
            p.h.adjacency_counts(),
            base.to_multigraph().adjacency_counts()
        );
        let r = spectrum_report(&p, None).unwrap();
        assert!(r.new_eigenvalues.is_empty());
        assert_eq!(r.mu, None);
        assert_eq!(r.lambda2_gr, None);
    }

    #[test]
    fn k5_product_splits_five_and_five() {
        let p = random_tight_product(&k5_base(), 2, 3, 0).unwrap();
        assert_eq!(p.h.vertex_count(), 10);
        assert_eq!(p.h.regular_degree(), Some(4));
        let r = spectrum_report(&p, None).unwrap();
        assert_eq!(r.new_eigenvalues.len(), 5);
        let p = random_tight_product(&k5_base(), 10, 3, 1).unwrap();
        assert_eq!(p.h.vertex_count(), 50);
        let r = spectrum_report(&p, None).unwrap();
        assert_eq!(r.new_eigenvalues.len(), 45);
        assert!((r.eigenvalues_h.last().unwrap() - 4.0).abs() < 1e-8);
    }

    #[test]
    fn pairing_is_rejected() {
        let pair = Permutation::new(vec![1, 0]).unwrap();
        let base = PermutationGraph::new(2, vec![], Some(pair)).unwrap();
        assert_eq!(
            random_tight_product(&base, 3, 0, 0),
            Err(SpectralError::BaseHasPairing)
        );
    }

    #[test]
    fn lifts_cover_their_base() {
        let tri = crate::graph::families::cycle(3);
        let (lift, _) = random_lift(&tri, 1, 0, 0).unwrap();
        assert_eq!(lift, tri);
        let (lift, _) = random_lift(&tri, 2, 5, 0).unwrap();
        assert_eq!(lift.vertex_count(), 6);
        let (lift, _) = random_lift(&complete(5), 10, 5, 0).unwrap();
        assert_eq!(lift.regular_degree(), Some(4));
        assert_eq!(lift.vertex_count(), 50);
    }

    #[test]
    fn split_rejects_missing_base_values() {
        assert!(matches!(
            split_new_eigenvalues(&[0.0, 1.0], &[3.0], 1e-6),
            Err(SpectralError::Unmatched { .. })
        ));
        let (old, new) = split_new_eigenvalues(&[-1.0, 1.0, 2.0, 2.0], &[2.0, -1.0], 1e-6).unwrap();
        assert_eq!(old, vec![-1.0, 2.0]);
        assert_eq!(new, vec![1.0, 2.0]);
    }

    #[test]
    fn trace_matches_spectrum() {
        // K5: 4^4 + 4·(-1)^4
        assert_eq!(adjacency_trace(&complete(5), 4), 260);
        assert_eq!(adjacency_trace(&complete(5), 0), 5);
    }

    #[test]
    fn entropy_ratio() {
        let e = entropy_report(4, 10, 300);
        assert_eq!(e.ratio, 0.1);
        assert!((e.bits_lift / e.bits_product - 10.0).abs() < 1e-12);
        assert!((e.bits_product - 4.0 * log2_factorial(300)).abs() < 1e-9);
        assert_eq!(log2_factorial(4), 24f64.log2());
    }

    #[test]
    fn config_parsing() {
        let cfg = ExperimentConfig::parse(
            "seed = 5\nd = 2\nn = 3, 4\ntrials = 2\nbase = random:6,4\nkmax = 4 # walks\n",
        )
        .unwrap();
        assert_eq!(cfg.n, vec![3, 4]);
        assert_eq!(
            cfg.base,
            BaseSpec::Random {
                vertices: 6,
                degree: 4
            }
        );
        assert_eq!(cfg.kmax, Some(4));
        assert_eq!(cfg.slack, 2.0);
        let e = ExperimentConfig::parse("d = 2\nfoo = 1\n").unwrap_err();
        assert_eq!(
            e,
            SpectralError::Config {
                line: 2,
                message: "unknown key \"foo\"".into()
            }
        );
        assert!(ExperimentConfig::parse("d = 2\nn = 3\ntrials = 1\nbase = random:6,6\n").is_err());
    }

    #[test]
    fn experiment_is_deterministic_and_checks_traces() {
        let cfg = ExperimentConfig::parse("seed = 11\nd = 2\nn = 1, 5\ntrials = 3\nbase = random:6,4\nkmax = 4\nlift_trials = 1\n").unwrap();
        let base = cfg.load_base(Path::new(".")).unwrap();
        let a = run_experiment(&cfg, &base).unwrap();
        let b = run_experiment(
            &ExperimentConfig {
                jobs: 3,
                ..cfg.clone()
            },
            &base,
        )
        .unwrap();
        assert_eq!(a.csv(false), b.csv(false));
        assert!(a.csv(false).lines().nth(1).unwrap().contains(",NA,NA,"));
        assert_eq!(a.trace_checks.len(), 12);
        assert_eq!(
            a.rows.iter().map(|r| r.trial).collect::<Vec<_>>(),
            vec![0, 1, 2, 3, 4, 5]
        );
        assert!(a.summary().contains("\"by_n\""));
    }
}
