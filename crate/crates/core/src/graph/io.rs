//! Plain-text graph files.
//!
//! ```text
//! n m
//! mu_0
//! ...
//! mu_{n-1}
//! i j w p ell      (m lines; ell is `-` when absent)
//! ```
//!
//! Scalars are written in shortest round-trip form, so writing a parsed file
//! reproduces it byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use super::{Edge, MeasuredGraph};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn write_graph<T: Real>(graph: &MeasuredGraph<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", graph.vertex_count(), graph.edge_count());
    for m in graph.mu() {
        let _ = writeln!(out, "{m}");
    }
    for e in graph.edges() {
        match e.ell {
            Some(l) => {
                let _ = writeln!(out, "{} {} {} {} {}", e.i, e.j, e.w, e.p, l);
            }
            None => {
                let _ = writeln!(out, "{} {} {} {} -", e.i, e.j, e.w, e.p);
            }
        }
    }
    out
}

pub fn parse_graph<T: Real>(text: &str) -> Result<MeasuredGraph<T>> {
    let mut lines = text.lines().enumerate().map(|(no, l)| (no + 1, l.trim())).filter(|(_, l)| !l.is_empty());

    let (line, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(Error::Parse { line, msg: "header must be `n m`".into() });
    }
    let n: usize = parse_field(fields[0], line)?;
    let m: usize = parse_field(fields[1], line)?;

    let mut mu = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, l) = lines.next().ok_or(Error::Parse { line: 0, msg: "truncated measure block".into() })?;
        mu.push(parse_scalar::<T>(l, line)?);
    }
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, l) = lines.next().ok_or(Error::Parse { line: 0, msg: "truncated edge block".into() })?;
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 5 {
            return Err(Error::Parse { line, msg: "edge line must be `i j w p ell`".into() });
        }
        let ell = if f[4] == "-" { None } else { Some(parse_scalar::<T>(f[4], line)?) };
        edges.push(Edge::new(
            parse_field(f[0], line)?,
            parse_field(f[1], line)?,
            parse_scalar(f[2], line)?,
            parse_scalar(f[3], line)?,
            ell,
        ));
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::Parse { line, msg: "trailing content".into() });
    }
    MeasuredGraph::new(n, mu, edges)
}

pub fn read_graph_file<T: Real>(path: &Path) -> Result<MeasuredGraph<T>> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn write_graph_file<T: Real>(graph: &MeasuredGraph<T>, path: &Path) -> Result<()> {
    std::fs::write(path, write_graph(graph))?;
    Ok(())
}

fn parse_field(s: &str, line: usize) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse { line, msg: format!("expected integer, got `{s}`") })
}

fn parse_scalar<T: Real>(s: &str, line: usize) -> Result<T> {
    let v: T = s.parse().map_err(|_| Error::Parse { line, msg: format!("expected number, got `{s}`") })?;
    if !v.is_finite() {
        return Err(Error::Parse { line, msg: format!("non-finite number `{s}`") });
    }
    Ok(v)
}
