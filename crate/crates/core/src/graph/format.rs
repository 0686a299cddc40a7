//! Line-oriented text format:
//!
//! ```text
//! # comment
//! m <vertex> <measure>
//! e <i> <j> <weight>
//! f <vertex>
//! ```
//!
//! `f` records are optional and mark truncation-frontier vertices.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use super::WeightedGraph;
use crate::error::{Error, Result};

fn field<T: std::str::FromStr>(token: Option<&str>, line: usize, what: &str) -> Result<T> {
    let token = token.ok_or_else(|| Error::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {what} {token:?}"),
    })
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    let mut measure: Vec<Option<f64>> = Vec::new();
    let mut edges = Vec::new();
    let mut frontier = Vec::new();

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let kind = tokens.next().unwrap_or_default();
        match kind {
            "m" => {
                let v: usize = field(tokens.next(), line, "vertex")?;
                let value: f64 = field(tokens.next(), line, "measure")?;
                if v >= measure.len() {
                    measure.resize(v + 1, None);
                }
                if measure[v].replace(value).is_some() {
                    return Err(Error::Parse {
                        line,
                        message: format!("measure of vertex {v} given twice"),
                    });
                }
            }
            "e" => {
                let u: usize = field(tokens.next(), line, "vertex")?;
                let v: usize = field(tokens.next(), line, "vertex")?;
                let w: f64 = field(tokens.next(), line, "weight")?;
                edges.push((line, u, v, w));
            }
            "f" => frontier.push((line, field::<usize>(tokens.next(), line, "vertex")?)),
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown record type {other:?}"),
                })
            }
        }
        if let Some(extra) = tokens.next() {
            return Err(Error::Parse {
                line,
                message: format!("unexpected trailing token {extra:?}"),
            });
        }
    }

    let n = measure.len();
    let measure: Vec<f64> = measure
        .into_iter()
        .enumerate()
        .map(|(v, m)| {
            m.ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("vertex {v} has no measure record (indices must be dense)"),
            })
        })
        .collect::<Result<_>>()?;
    for &(line, u, v, _) in &edges {
        if u >= n || v >= n {
            return Err(Error::Parse {
                line,
                message: format!("edge ({u}, {v}) references a vertex without a measure"),
            });
        }
    }
    for &(line, v) in &frontier {
        if v >= n {
            return Err(Error::Parse {
                line,
                message: format!("frontier vertex {v} has no measure"),
            });
        }
    }

    WeightedGraph::new(measure, edges.iter().map(|&(_, u, v, w)| (u, v, w)))?
        .with_frontier(frontier.into_iter().map(|(_, v)| v))
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    parse_graph(&std::fs::read_to_string(path)?)
}

/// Writes `g` so that [`parse_graph`] reproduces it exactly.
pub fn write_graph(g: &WeightedGraph, mut out: impl Write) -> Result<()> {
    let mut text = String::new();
    for (v, m) in g.measures().iter().enumerate() {
        let _ = writeln!(text, "m {v} {m}");
    }
    for e in g.edges() {
        let _ = writeln!(text, "e {} {} {}", e.u, e.v, e.weight);
    }
    for v in g.frontier() {
        let _ = writeln!(text, "f {v}");
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = WeightedGraph::new(vec![1.5, 0.1, 3.0], [(0, 1, 0.3), (2, 1, 1e-7)])
            .unwrap()
            .with_frontier([2])
            .unwrap();
        let mut buf = Vec::new();
        write_graph(&g, &mut buf).unwrap();
        let h = parse_graph(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(h.measures(), g.measures());
        assert_eq!(h.edges(), g.edges());
        assert!(h.is_frontier(2) && !h.is_frontier(0));
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = parse_graph("# two vertices\n\nm 0 1\nm 1 2\n  # indented\ne 1 0 0.5\n").unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.weight(0, 1), 0.5);
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "m 0 1\nm 0 2\n",
            "m 0 1\nm 2 1\n",
            "m 0 1\nm 1 1\ne 0 1 1\ne 1 0 1\n",
            "m 0 1\ne 0 0 1\n",
            "m 0 1\nm 1 1\ne 0 1 0\n",
            "m 0 -1\n",
            "m 0 1\ne 0 1 1\n",
            "x 0\n",
            "m 0 1 7\n",
            "m zero 1\n",
        ] {
            assert!(parse_graph(bad).is_err(), "accepted {bad:?}");
        }
    }
}
