//! Plain-text formats.
//!
//! Graph: first non-comment line `n m`, then `m` lines `u v` (0-based).
//! Coloring: first non-comment line `n k`, then `n` lines with one color in
//! `1..=k`. Lines starting with `#` and blank lines are ignored in both.

use std::fmt::Write as _;

use super::{BoundedGraph, VertexColoring};
use crate::error::{Error, Result};

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn numbers<const N: usize>(line: usize, s: &str) -> Result<[usize; N]> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    if parts.len() != N {
        return Err(Error::Parse {
            line,
            msg: format!("expected {N} fields, found {}", parts.len()),
        });
    }
    let mut out = [0; N];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p.parse().map_err(|e| Error::Parse {
            line,
            msg: format!("`{p}`: {e}"),
        })?;
    }
    Ok(out)
}

/// Parses the graph text format. Without an explicit bound the observed
/// maximum degree is used.
pub fn parse_graph(text: &str, d_max: Option<usize>) -> Result<BoundedGraph> {
    let mut lines = data_lines(text);
    let (hl, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        msg: "missing `n m` header".into(),
    })?;
    let [n, m] = numbers::<2>(hl, header)?;
    let mut edges = Vec::with_capacity(m);
    for (line, s) in lines.by_ref().take(m) {
        let [u, v] = numbers::<2>(line, s)?;
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: 0,
            msg: format!("header promises {m} edges, found {}", edges.len()),
        });
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::Parse {
            line,
            msg: "trailing data after the edge list".into(),
        });
    }
    let bound = match d_max {
        Some(d) => d,
        None => BoundedGraph::new(n, &edges, usize::MAX)?.max_degree(),
    };
    BoundedGraph::new(n, &edges, bound)
}

pub fn write_graph(g: &BoundedGraph) -> String {
    let edges = g.edges();
    let mut out = format!("{} {}\n", g.n(), edges.len());
    for (u, v) in edges {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn parse_coloring(text: &str) -> Result<VertexColoring> {
    let mut lines = data_lines(text);
    let (hl, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        msg: "missing `n k` header".into(),
    })?;
    let [n, k] = numbers::<2>(hl, header)?;
    let mut colors = Vec::with_capacity(n);
    for (line, s) in lines {
        let [c] = numbers::<1>(line, s)?;
        colors.push(c as u32);
    }
    if colors.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            actual: colors.len(),
        });
    }
    VertexColoring::new(k as u32, colors)
}

pub fn write_coloring(c: &VertexColoring) -> String {
    let mut out = format!("{} {}\n", c.len(), c.k());
    for col in c.colors() {
        let _ = writeln!(out, "{col}");
    }
    out
}
