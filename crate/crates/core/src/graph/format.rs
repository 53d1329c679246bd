//! Line-oriented graph files:
//!
//! ```text
//! # comment
//! n 3 undirected
//! edge 1 2 1.0
//! edge 2 3 0.5
//! ```
//!
//! `edge i j w` sets `a_ij = w` with 1-based indices; undirected files list
//! each edge once and the loader mirrors it.

use nalgebra::DMatrix;

use super::Graph;
use crate::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub(super) fn parse(text: &str) -> Result<Graph> {
    let mut header: Option<(usize, bool)> = None;
    let mut weights: Option<DMatrix<f64>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "n" => {
                if header.is_some() {
                    return Err(parse_err(line_no, "duplicate header"));
                }
                if fields.len() != 3 {
                    return Err(parse_err(line_no, "expected `n <count> <directed|undirected>`"));
                }
                let n: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad agent count `{}`", fields[1])))?;
                if n == 0 {
                    return Err(parse_err(line_no, "agent count must be positive"));
                }
                let undirected = match fields[2] {
                    "directed" => false,
                    "undirected" => true,
                    other => {
                        return Err(parse_err(
                            line_no,
                            format!("expected `directed` or `undirected`, found `{other}`"),
                        ))
                    }
                };
                header = Some((n, undirected));
                weights = Some(DMatrix::zeros(n, n));
            }
            "edge" => {
                let (n, undirected) =
                    header.ok_or_else(|| parse_err(line_no, "edge before `n` header"))?;
                let a = weights.as_mut().expect("allocated with header");
                if fields.len() != 4 {
                    return Err(parse_err(line_no, "expected `edge <i> <j> <w>`"));
                }
                let index = |s: &str| -> Result<usize> {
                    let i: usize = s
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("bad agent index `{s}`")))?;
                    if i == 0 || i > n {
                        return Err(parse_err(line_no, format!("agent index {i} outside 1..={n}")));
                    }
                    Ok(i - 1)
                };
                let i = index(fields[1])?;
                let j = index(fields[2])?;
                let w: f64 = fields[3]
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad weight `{}`", fields[3])))?;
                if i == j {
                    return Err(parse_err(line_no, "self-loops are not allowed"));
                }
                if !w.is_finite() || w < 0.0 {
                    return Err(parse_err(line_no, "weight must be finite and nonnegative"));
                }
                if a[(i, j)] != 0.0 || (undirected && a[(j, i)] != 0.0) {
                    return Err(parse_err(line_no, "duplicate edge"));
                }
                a[(i, j)] = w;
                if undirected {
                    a[(j, i)] = w;
                }
            }
            other => return Err(parse_err(line_no, format!("unknown record `{other}`"))),
        }
    }

    let (_, undirected) = header.ok_or_else(|| parse_err(0, "missing `n` header"))?;
    Graph::from_weights(weights.expect("allocated with header"), undirected)
}

pub(super) fn write(g: &Graph) -> String {
    let n = g.n();
    let mut out = format!(
        "n {n} {}\n",
        if g.is_undirected() { "undirected" } else { "directed" }
    );
    for i in 0..n {
        for j in 0..n {
            let w = g.weight(i, j);
            if w > 0.0 && (!g.is_undirected() || i < j) {
                out.push_str(&format!("edge {} {} {}\n", i + 1, j + 1, w));
            }
        }
    }
    out
}
