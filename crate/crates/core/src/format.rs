//! Text formats. Blank lines and lines starting with `#` are ignored
//! everywhere; errors carry 1-based line numbers.
//!
//! * `tpg 1` graphs: `n m`, then `m` lines `u v`.
//! * `tpp 1` permutation graphs: `n d p`, then `d` lines of `n` images, then
//!   the pairing when `p = 1`.
//! * edge colorings: `<edge> <color>` per line.
//! * semi-colorings: `<edge> solid <i>` or `<edge> bright <i> <j>`.
//! * families: `<v1> <v2> : <images>` per dart of the first factor, in dart order.
//! * maps: vertex images on one line, optionally dart images on the next.

use std::fmt::Write as _;

use thiserror::Error;

use crate::covering::CoveringMap;
use crate::factorization::EdgeColoring;
use crate::graph::{MultiGraph, Permutation, PermutationGraph};
use crate::product::NeighborlyFamily;
use crate::semicolor::{SemiColor, SemiColoring};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError {
        line,
        message: message.into(),
    })
}

/// Non-empty, non-comment lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn numbers(line: usize, s: &str) -> Result<Vec<usize>, FormatError> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<usize>().or_else(|_| {
                err(
                    line,
                    format!("expected a non-negative integer, found {t:?}"),
                )
            })
        })
        .collect()
}

fn exact<const K: usize>(line: usize, s: &str) -> Result<[usize; K], FormatError> {
    let v = numbers(line, s)?;
    v.clone()
        .try_into()
        .or_else(|_| err(line, format!("expected {K} integers, found {}", v.len())))
}

/// End-of-input position for messages about missing lines.
fn last_line(text: &str) -> usize {
    text.lines().count().max(1)
}

fn header(
    lines: &mut dyn Iterator<Item = (usize, &str)>,
    text: &str,
    magic: &str,
) -> Result<(), FormatError> {
    match lines.next() {
        Some((_, l)) if l.split_whitespace().collect::<Vec<_>>() == [magic, "1"] => Ok(()),
        Some((line, l)) => err(line, format!("expected header \"{magic} 1\", found {l:?}")),
        None => err(last_line(text), format!("missing header \"{magic} 1\"")),
    }
}

fn no_trailing(lines: &mut dyn Iterator<Item = (usize, &str)>) -> Result<(), FormatError> {
    match lines.next() {
        Some((line, _)) => err(line, "unexpected extra content"),
        None => Ok(()),
    }
}

pub fn parse_tpg(text: &str) -> Result<MultiGraph, FormatError> {
    let mut lines = content_lines(text);
    header(&mut lines, text, "tpg")?;
    let Some((line, counts)) = lines.next() else {
        return err(last_line(text), "missing \"n m\" line");
    };
    let [n, m] = exact::<2>(line, counts)?;
    let mut g = MultiGraph::empty(n);
    for i in 0..m {
        let Some((line, l)) = lines.next() else {
            return err(last_line(text), format!("expected {m} edges, found {i}"));
        };
        let [u, v] = exact::<2>(line, l)?;
        if u >= n || v >= n {
            return err(line, format!("vertex out of range 0..{n}"));
        }
        g.add_edge(u, v).expect("checked range");
    }
    no_trailing(&mut lines)?;
    Ok(g)
}

pub fn write_tpg(g: &MultiGraph) -> String {
    let mut out = format!("tpg 1\n{} {}\n", g.vertex_count(), g.edge_count());
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").expect("write to string");
    }
    out
}

fn permutation_line(line: usize, l: &str, n: usize) -> Result<Permutation, FormatError> {
    let images = numbers(line, l)?;
    if images.len() != n {
        return err(line, format!("expected {n} images, found {}", images.len()));
    }
    Permutation::new(images).or_else(|e| err(line, e.to_string()))
}

pub fn parse_tpp(text: &str) -> Result<PermutationGraph, FormatError> {
    let mut lines = content_lines(text);
    header(&mut lines, text, "tpp")?;
    let Some((line, counts)) = lines.next() else {
        return err(last_line(text), "missing \"n d p\" line");
    };
    let [n, d, p] = exact::<3>(line, counts)?;
    if p > 1 {
        return err(line, "pairing flag must be 0 or 1");
    }
    let mut generators = Vec::with_capacity(d);
    for i in 0..d + p {
        let Some((line, l)) = lines.next() else {
            return err(
                last_line(text),
                format!("expected {} permutation lines, found {i}", d + p),
            );
        };
        generators.push((line, permutation_line(line, l, n)?));
    }
    let pairing = if p == 1 { generators.pop() } else { None };
    let (pairing_line, pairing) = match pairing {
        Some((line, perm)) => (line, Some(perm)),
        None => (0, None),
    };
    no_trailing(&mut lines)?;
    PermutationGraph::new(n, generators.into_iter().map(|(_, g)| g).collect(), pairing)
        .or_else(|e| err(pairing_line, e.to_string()))
}

pub fn write_tpp(pg: &PermutationGraph) -> String {
    let p = usize::from(pg.pairing().is_some());
    let mut out = format!(
        "tpp 1\n{} {} {p}\n",
        pg.vertex_count(),
        pg.generators().len()
    );
    for perm in pg.generators().iter().chain(pg.pairing()) {
        out.push_str(&join(perm.images()));
        out.push('\n');
    }
    out
}

fn join(values: &[usize]) -> String {
    values
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Reads one entry per edge id, each exactly once.
fn per_edge<T>(
    text: &str,
    edge_count: usize,
    mut parse: impl FnMut(usize, &[&str]) -> Result<T, FormatError>,
) -> Result<Vec<T>, FormatError> {
    let mut values: Vec<Option<T>> = (0..edge_count).map(|_| None).collect();
    for (line, l) in content_lines(text) {
        let fields: Vec<&str> = l.split_whitespace().collect();
        let e = fields[0]
            .parse::<usize>()
            .or_else(|_| err(line, format!("bad edge id {:?}", fields[0])))?;
        if e >= edge_count {
            return err(line, format!("edge id {e} out of range 0..{edge_count}"));
        }
        if values[e].is_some() {
            return err(line, format!("edge {e} listed twice"));
        }
        values[e] = Some(parse(line, &fields[1..])?);
    }
    match values.iter().position(Option::is_none) {
        Some(e) => err(last_line(text), format!("edge {e} has no entry")),
        None => Ok(values.into_iter().map(|v| v.expect("checked")).collect()),
    }
}

pub fn parse_edge_coloring(text: &str, edge_count: usize) -> Result<EdgeColoring, FormatError> {
    let colors = per_edge(text, edge_count, |line, rest| match rest {
        [c] => c
            .parse::<usize>()
            .or_else(|_| err(line, format!("bad color {c:?}"))),
        _ => err(line, "expected \"<edge> <color>\""),
    })?;
    let num_colors = colors.iter().max().map_or(0, |&c| c + 1);
    Ok(EdgeColoring { colors, num_colors })
}

pub fn write_edge_coloring(c: &EdgeColoring) -> String {
    c.colors
        .iter()
        .enumerate()
        .map(|(e, c)| format!("{e} {c}\n"))
        .collect()
}

pub fn parse_semi_coloring(text: &str, edge_count: usize) -> Result<SemiColoring, FormatError> {
    let colors = per_edge(text, edge_count, |line, rest| {
        let color = |s: &str| match s.parse::<usize>() {
            Ok(c) if c >= 1 => Ok(c),
            _ => err(line, format!("bad color {s:?}; colors start at 1")),
        };
        match rest {
            ["solid", i] => Ok(SemiColor::Solid(color(i)?)),
            ["bright", i, j] => SemiColor::bright(color(i)?, color(j)?)
                .map_or_else(|| err(line, "a bright pair needs two different colors"), Ok),
            _ => err(
                line,
                "expected \"<edge> solid <i>\" or \"<edge> bright <i> <j>\"",
            ),
        }
    })?;
    let delta = colors
        .iter()
        .map(|c| match *c {
            SemiColor::Solid(i) => i,
            SemiColor::Bright(_, j) => j,
        })
        .max()
        .unwrap_or(0);
    Ok(SemiColoring { colors, delta })
}

pub fn write_semi_coloring(sc: &SemiColoring) -> String {
    sc.colors
        .iter()
        .enumerate()
        .map(|(e, c)| format!("{e} {c}\n"))
        .collect()
}

pub fn parse_family(
    text: &str,
    g1: &MultiGraph,
    n2: usize,
) -> Result<NeighborlyFamily, FormatError> {
    let mut lines = content_lines(text);
    let mut sigma = Vec::with_capacity(g1.dart_count());
    for d in 0..g1.dart_count() {
        let Some((line, l)) = lines.next() else {
            return err(
                last_line(text),
                format!("expected {} darts, found {d}", g1.dart_count()),
            );
        };
        let Some((head, images)) = l.split_once(':') else {
            return err(line, "expected \"<v1> <v2> : <images>\"");
        };
        let [v1, v2] = exact::<2>(line, head)?;
        if (v1, v2) != (g1.dart_vertex(d), g1.dart_target(d)) {
            return err(
                line,
                format!(
                    "dart {d} runs {} -> {}, found {v1} {v2}",
                    g1.dart_vertex(d),
                    g1.dart_target(d)
                ),
            );
        }
        sigma.push(permutation_line(line, images, n2)?);
    }
    no_trailing(&mut lines)?;
    Ok(NeighborlyFamily { sigma })
}

pub fn write_family(family: &NeighborlyFamily, g1: &MultiGraph) -> String {
    let mut out = String::new();
    for (d, s) in family.sigma.iter().enumerate() {
        writeln!(
            out,
            "{} {} : {}",
            g1.dart_vertex(d),
            g1.dart_target(d),
            join(s.images())
        )
        .expect("write to string");
    }
    out
}

/// A vertex map and, when given, a dart map.
pub fn parse_map(text: &str) -> Result<(Vec<usize>, Option<Vec<usize>>), FormatError> {
    let mut lines = content_lines(text);
    let vertex_map = match lines.next() {
        Some((line, l)) => numbers(line, l)?,
        None => Vec::new(),
    };
    let dart_map = match lines.next() {
        Some((line, l)) => Some(numbers(line, l)?),
        None => None,
    };
    no_trailing(&mut lines)?;
    Ok((vertex_map, dart_map))
}

pub fn write_map(map: &CoveringMap) -> String {
    format!("{}\n{}\n", join(&map.vertex_map), join(&map.dart_map))
}
