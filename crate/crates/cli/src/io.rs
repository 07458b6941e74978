use std::fmt;
use std::path::Path;

use tightprod::factorization::EdgeColoring;
use tightprod::format::{parse_edge_coloring, parse_semi_coloring, parse_tpg, parse_tpp};
use tightprod::graph::MultiGraph;
use tightprod::semicolor::SemiColoring;

#[derive(Debug)]
pub enum Failure {
    /// Unreadable or malformed input.
    Input(String),
    /// A result failed its own verification.
    Internal(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 64,
            Failure::Internal(_) => 70,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "{m}"),
            Failure::Internal(m) => write!(f, "internal: {m}"),
        }
    }
}

pub fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Writes to `path`, or stdout when there is none.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Reads a `tpg` graph or a `tpp` permutation graph.
pub fn load_graph(path: &Path) -> Result<MultiGraph, Failure> {
    let text = read(path)?;
    let header = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'));
    let parsed = if header.is_some_and(|h| h.starts_with("tpp")) {
        parse_tpp(&text).map(|pg| pg.to_multigraph())
    } else {
        parse_tpg(&text)
    };
    parsed.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

pub fn load_edge_coloring(path: &Path, g: &MultiGraph) -> Result<EdgeColoring, Failure> {
    parse_edge_coloring(&read(path)?, g.edge_count())
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

pub fn load_semi_coloring(path: &Path, g: &MultiGraph) -> Result<SemiColoring, Failure> {
    let mut semi = parse_semi_coloring(&read(path)?, g.edge_count())
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    semi.delta = semi.delta.max(g.max_degree());
    Ok(semi)
}
