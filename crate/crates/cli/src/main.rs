//! `tightprod` command-line front end.
//!
//! Exit codes: 0 success, 2 proven negative, 3 undecided at the given budget,
//! 64 malformed input, 70 internal failure.

mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tightprod::covering::{infer_covering, verify_covering, CoveringMap};
use tightprod::factorization::{exact_edge_chromatic, EdgeChromaticOutcome, DEFAULT_NODE_CAP};
use tightprod::format::{self, write_edge_coloring, write_semi_coloring, write_tpg, write_tpp};
use tightprod::graph::{families, MultiGraph, Permutation, PermutationGraph};
use tightprod::product::{
    assemble_product, brute_force_tight_product, classify_class1_via_gadget, product_even_regular,
    product_odd_matching, product_via_semicoloring, BruteForceCaps, BruteForceOutcome,
    Classification, TightProduct,
};
use tightprod::rng::{random_permutation, stream};
use tightprod::semicolor::{build_gadget, semi_color_family, vizing4_cubic};
use tightprod::spectral::{run_experiment, ExperimentConfig};
use tightprod::words::{count_imprimitive, estimate_p, reduce, word_order, Word, ENUMERATION_CAP};

use io::{emit, load_edge_coloring, load_graph, load_semi_coloring, read, Failure};

#[derive(Parser)]
#[command(
    name = "tightprod",
    version,
    about = "Tight products of regular multigraphs"
)]
struct Cli {
    /// Master seed for every random choice [default: 0, or the experiment config's seed]
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph in tpg (or tpp for random-regular) format
    Gen {
        #[command(subcommand)]
        family: GenFamily,
        /// Output file; stdout when absent
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Check that a map between two graphs is a covering map
    VerifyCover {
        source: PathBuf,
        target: PathBuf,
        map: PathBuf,
    },
    /// Build and verify a tight product
    Product {
        #[command(subcommand)]
        method: ProductMethod,
    },
    /// Semi-color a graph of maximum degree at most 3
    Semicolor {
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Properly 4-edge-color a cubic graph
    Vizing4 {
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact search for a proper edge coloring within a color budget
    Edgechroma {
        graph: PathBuf,
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        node_cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide class 1 of a (2k+1)-regular graph through the gadget product
    Classify {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        node_cap: u64,
        /// Directory for the witness product
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Word maps on free groups
    Words {
        #[command(subcommand)]
        op: WordOp,
    },
    /// Run a random product spectral experiment
    Experiment {
        config: PathBuf,
        /// CSV output; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
        /// Summary output; stderr when absent
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Worker threads, overriding the config
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Subcommand)]
enum GenFamily {
    Cycle {
        n: usize,
    },
    Complete {
        n: usize,
    },
    Petersen,
    /// Permutation model: d/2 random permutations, plus a random pairing when d is odd
    RandomRegular {
        vertices: usize,
        degree: usize,
    },
    /// The gadget G^(2k+1)
    Gadget {
        k: usize,
        /// Also write its semi-coloring here
        #[arg(long)]
        semi: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Factors {
    g1: PathBuf,
    g2: PathBuf,
    /// Directory for product.tpg, family.txt, proj1.map and proj2.map
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ProductMethod {
    /// Both factors 2d-regular
    Even(Factors),
    /// Both factors (2d+1)-regular with perfect matchings
    OddMatching(Factors),
    /// First factor semi-colored, second properly edge-colored
    Semicolor {
        #[command(flatten)]
        factors: Factors,
        /// Semi-coloring of g1; computed when absent
        #[arg(long)]
        semi: Option<PathBuf>,
        /// Edge coloring of g2; searched for when absent
        #[arg(long)]
        coloring: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        node_cap: u64,
    },
    /// Assemble from a family file as written by `--out`
    Family {
        #[command(flatten)]
        factors: Factors,
        #[arg(long)]
        family: PathBuf,
    },
    /// Exhaustive search over neighborly families
    Brute {
        #[command(flatten)]
        factors: Factors,
        #[arg(long, default_value_t = BruteForceCaps::default().node_cap)]
        node_cap: u64,
        #[arg(long)]
        parallel: bool,
    },
}

#[derive(Subcommand)]
enum WordOp {
    /// Order of a word, e.g. "1 2 -1 -2"
    Order {
        #[arg(allow_hyphen_values = true)]
        word: String,
    },
    /// Free reduction
    Reduce {
        #[arg(allow_hyphen_values = true)]
        word: String,
    },
    /// Monte Carlo estimate of the probability that the word fixes a point
    PEstimate {
        #[arg(allow_hyphen_values = true)]
        word: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Count imprimitive reduced words of length 2k
    CountImprimitive {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
    },
}

fn main() -> ExitCode {
    // clap's own usage-error code would collide with "proven negative"
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    let result = std::panic::catch_unwind(|| run(&cli));
    let code = match result {
        Ok(Ok(code)) => code,
        Ok(Err(failure)) => {
            eprintln!("error: {failure}");
            failure.code()
        }
        Err(_) => 70,
    };
    ExitCode::from(code)
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Gen { family, out } => gen(family, out.as_deref(), seed),
        Command::VerifyCover {
            source,
            target,
            map,
        } => verify_cover(source, target, map),
        Command::Product { method } => product(method),
        Command::Semicolor { graph, out } => {
            let g = load_graph(graph)?;
            let semi = semi_color_family(&g, None)
                .map_err(|e| Failure::Input(format!("{}: {e}", graph.display())))?;
            let report = semi
                .validate(&g)
                .map_err(|e| Failure::Internal(e.to_string()))?;
            if !report.is_valid() {
                return Err(Failure::Internal(format!(
                    "semi-coloring failed validation: {report:?}"
                )));
            }
            emit(out.as_deref(), &write_semi_coloring(&semi))?;
            Ok(0)
        }
        Command::Vizing4 { graph, out } => {
            let g = load_graph(graph)?;
            let coloring = vizing4_cubic(&g)
                .map_err(|e| Failure::Input(format!("{}: {e}", graph.display())))?;
            coloring
                .validate(&g)
                .map_err(|e| Failure::Internal(e.to_string()))?;
            emit(out.as_deref(), &write_edge_coloring(&coloring))?;
            Ok(0)
        }
        Command::Edgechroma {
            graph,
            budget,
            node_cap,
            out,
        } => {
            let g = load_graph(graph)?;
            match exact_edge_chromatic(&g, *budget, *node_cap) {
                EdgeChromaticOutcome::Colorable(c) => {
                    c.validate(&g)
                        .map_err(|e| Failure::Internal(e.to_string()))?;
                    emit(out.as_deref(), &write_edge_coloring(&c))?;
                    Ok(0)
                }
                EdgeChromaticOutcome::NotColorable(cert) => {
                    println!("not colorable with {budget} colors: {cert}");
                    Ok(2)
                }
                EdgeChromaticOutcome::Undecided { nodes } => {
                    println!("undecided after {nodes} search nodes");
                    Ok(3)
                }
            }
        }
        Command::Classify {
            graph,
            k,
            node_cap,
            out,
        } => {
            let g = load_graph(graph)?;
            match classify_class1_via_gadget(&g, *k, None, *node_cap)
                .map_err(|e| Failure::Input(e.to_string()))?
            {
                Classification::Class1 { product, coloring } => {
                    println!("class-1");
                    check_product(&product)?;
                    if let Some(dir) = out {
                        write_product(dir, &product)?;
                        emit(
                            Some(&dir.join("coloring.txt")),
                            &write_edge_coloring(&coloring),
                        )?;
                    }
                    Ok(0)
                }
                Classification::Class2 { certificate } => {
                    println!("class-2: {certificate}");
                    Ok(2)
                }
                Classification::Undecided { nodes } => {
                    println!("undecided after {nodes} search nodes");
                    Ok(3)
                }
            }
        }
        Command::Words { op } => words(op, seed),
        Command::Experiment {
            config,
            out,
            summary,
            jobs,
        } => {
            let text = read(config)?;
            let mut cfg = ExperimentConfig::parse(&text)
                .map_err(|e| Failure::Input(format!("{}: {e}", config.display())))?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            if let Some(j) = jobs {
                cfg.jobs = (*j).max(1);
            }
            let dir = config.parent().unwrap_or(Path::new("."));
            let base = cfg
                .load_base(dir)
                .map_err(|e| Failure::Input(e.to_string()))?;
            let report =
                run_experiment(&cfg, &base).map_err(|e| Failure::Internal(e.to_string()))?;
            emit(out.as_deref(), &report.csv(true))?;
            match summary {
                Some(path) => emit(Some(path), &report.summary())?,
                None => eprint!("{}", report.summary()),
            }
            Ok(0)
        }
    }
}

fn gen(family: &GenFamily, out: Option<&Path>, seed: u64) -> Result<u8, Failure> {
    let text = match family {
        GenFamily::Cycle { n } => write_tpg(&families::cycle(*n)),
        GenFamily::Complete { n } => write_tpg(&families::complete(*n)),
        GenFamily::Petersen => write_tpg(&families::petersen()),
        GenFamily::RandomRegular { vertices, degree } => {
            write_tpp(&random_regular(*vertices, *degree, seed)?)
        }
        GenFamily::Gadget { k, semi } => {
            if *k == 0 {
                return Err(Failure::Input("gadget needs k >= 1".into()));
            }
            let gadget = build_gadget(*k);
            if let Some(path) = semi {
                emit(Some(path), &write_semi_coloring(&gadget.coloring))?;
            }
            write_tpg(&gadget.graph)
        }
    };
    emit(out, &text)?;
    Ok(0)
}

/// `degree / 2` permutations from `stream(seed, 0, i)`; for odd degree the
/// pairing matches consecutive entries of one more random permutation.
fn random_regular(vertices: usize, degree: usize, seed: u64) -> Result<PermutationGraph, Failure> {
    if degree % 2 == 1 && vertices % 2 == 1 {
        return Err(Failure::Input(
            "odd degree needs an even number of vertices".into(),
        ));
    }
    let gens: Vec<Permutation> = (0..degree / 2)
        .map(|i| random_permutation(vertices, &mut stream(seed, 0, i as u64)))
        .collect();
    let pairing = (degree % 2 == 1).then(|| {
        let order = random_permutation(vertices, &mut stream(seed, 0, (degree / 2) as u64));
        let mut images = vec![0; vertices];
        for pair in order.images().chunks(2) {
            images[pair[0]] = pair[1];
            images[pair[1]] = pair[0];
        }
        Permutation::new(images).expect("involution")
    });
    PermutationGraph::new(vertices, gens, pairing).map_err(|e| Failure::Internal(e.to_string()))
}

fn verify_cover(source: &Path, target: &Path, map_path: &Path) -> Result<u8, Failure> {
    let src = load_graph(source)?;
    let tgt = load_graph(target)?;
    let (vertex_map, dart_map) = format::parse_map(&read(map_path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", map_path.display())))?;
    let bad_map = |e: String| Failure::Input(format!("{}: {e}", map_path.display()));
    let map = match dart_map {
        Some(dart_map) => CoveringMap {
            vertex_map,
            dart_map,
        },
        None => {
            match infer_covering(&src, &tgt, &vertex_map).map_err(|e| bad_map(e.to_string()))? {
                Ok(map) => map,
                Err(violation) => {
                    println!("not a covering: {violation}");
                    return Ok(2);
                }
            }
        }
    };
    let report = verify_covering(&src, &tgt, &map).map_err(|e| bad_map(e.to_string()))?;
    match report.violation {
        None => {
            match report.covering_number {
                Some(k) => println!("covering of degree {k}"),
                None => println!("covering"),
            }
            Ok(0)
        }
        Some(v) => {
            println!("not a covering: {v}");
            Ok(2)
        }
    }
}

fn check_product(tp: &TightProduct) -> Result<(), Failure> {
    let (r1, r2) = tp.verify();
    match r1.violation.or(r2.violation) {
        Some(v) => Err(Failure::Internal(format!(
            "product failed verification: {v}"
        ))),
        None => Ok(()),
    }
}

fn write_product(dir: &Path, tp: &TightProduct) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    let family = tightprod::product::family_from_product(tp)
        .map_err(|e| Failure::Internal(e.to_string()))?;
    emit(Some(&dir.join("product.tpg")), &write_tpg(&tp.h))?;
    emit(
        Some(&dir.join("family.txt")),
        &format::write_family(&family, &tp.g1),
    )?;
    emit(Some(&dir.join("proj1.map")), &format::write_map(&tp.proj1))?;
    emit(Some(&dir.join("proj2.map")), &format::write_map(&tp.proj2))?;
    Ok(())
}

fn finish_product(tp: TightProduct, out: Option<&Path>) -> Result<u8, Failure> {
    check_product(&tp)?;
    println!(
        "tight product: {} vertices, {} edges, both projections verified",
        tp.h.vertex_count(),
        tp.h.edge_count()
    );
    if let Some(dir) = out {
        write_product(dir, &tp)?;
    }
    Ok(0)
}

fn product(method: &ProductMethod) -> Result<u8, Failure> {
    let load = |f: &Factors| -> Result<(MultiGraph, MultiGraph), Failure> {
        Ok((load_graph(&f.g1)?, load_graph(&f.g2)?))
    };
    let input = |e: tightprod::product::ProductError| Failure::Input(e.to_string());
    match method {
        ProductMethod::Even(f) => {
            let (g1, g2) = load(f)?;
            finish_product(
                product_even_regular(&g1, &g2).map_err(input)?,
                f.out.as_deref(),
            )
        }
        ProductMethod::OddMatching(f) => {
            let (g1, g2) = load(f)?;
            finish_product(
                product_odd_matching(&g1, &g2, None, None).map_err(input)?,
                f.out.as_deref(),
            )
        }
        ProductMethod::Semicolor {
            factors: f,
            semi,
            coloring,
            node_cap,
        } => {
            let (g1, g2) = load(f)?;
            let semi = match semi {
                Some(path) => load_semi_coloring(path, &g1)?,
                None => semi_color_family(&g1, None)
                    .map_err(|e| Failure::Input(format!("{}: {e}", f.g1.display())))?,
            };
            let coloring = match coloring {
                Some(path) => load_edge_coloring(path, &g2)?,
                None => match exact_edge_chromatic(&g2, g2.max_degree(), *node_cap) {
                    EdgeChromaticOutcome::Colorable(c) => c,
                    EdgeChromaticOutcome::NotColorable(cert) => {
                        println!(
                            "second factor has no {}-edge-coloring: {cert}",
                            g2.max_degree()
                        );
                        return Ok(2);
                    }
                    EdgeChromaticOutcome::Undecided { nodes } => {
                        println!("undecided after {nodes} search nodes");
                        return Ok(3);
                    }
                },
            };
            finish_product(
                product_via_semicoloring(&g1, &semi, &g2, &coloring).map_err(input)?,
                f.out.as_deref(),
            )
        }
        ProductMethod::Family { factors: f, family } => {
            let (g1, g2) = load(f)?;
            let fam = format::parse_family(&read(family)?, &g1, g2.vertex_count())
                .map_err(|e| Failure::Input(format!("{}: {e}", family.display())))?;
            finish_product(
                assemble_product(&g1, &g2, &fam).map_err(input)?,
                f.out.as_deref(),
            )
        }
        ProductMethod::Brute {
            factors: f,
            node_cap,
            parallel,
        } => {
            let (g1, g2) = load(f)?;
            let caps = BruteForceCaps {
                node_cap: *node_cap,
                parallel: *parallel,
                ..BruteForceCaps::default()
            };
            match brute_force_tight_product(&g1, &g2, caps) {
                BruteForceOutcome::Found(tp) => finish_product(*tp, f.out.as_deref()),
                BruteForceOutcome::RegularityMismatch => {
                    println!("no tight product: the factors have different degrees");
                    Ok(2)
                }
                BruteForceOutcome::Exhausted { nodes } => {
                    println!("no tight product: search exhausted after {nodes} nodes");
                    Ok(2)
                }
                BruteForceOutcome::Undecided { nodes } => {
                    println!("undecided after {nodes} search nodes");
                    Ok(3)
                }
            }
        }
    }
}

fn parse_word(text: &str) -> Result<Word, Failure> {
    text.parse::<Word>()
        .map_err(|e| Failure::Input(e.to_string()))
}

fn words(op: &WordOp, seed: u64) -> Result<u8, Failure> {
    match op {
        WordOp::Order { word } => println!("{}", word_order(&parse_word(word)?)),
        WordOp::Reduce { word } => println!("{}", reduce(&parse_word(word)?)),
        WordOp::PEstimate { word, n, samples } => {
            let est = estimate_p(&parse_word(word)?, *n, *samples, seed)
                .map_err(|e| Failure::Input(e.to_string()))?;
            println!(
                "p = {:.8} se = {:.8} hits = {} samples = {}",
                est.p, est.standard_error, est.hits, est.samples
            );
        }
        WordOp::CountImprimitive { d, k } => {
            let c = count_imprimitive(*d, *k, ENUMERATION_CAP)
                .map_err(|e| Failure::Input(e.to_string()))?;
            println!(
                "d = {} k = {} imprimitive = {} total = {} bound = {:.3} within_bound = {}",
                c.d,
                c.k,
                c.count,
                c.total,
                c.bound,
                c.within_bound()
            );
        }
    }
    Ok(0)
}
