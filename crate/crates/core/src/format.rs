//! Plain-text hypergraph format.
//!
//! ```text
//! # comment
//! #! ground: a,b,c,d
//! a,b
//! b,c*2
//! {}
//! ```
//!
//! One edge per line as comma-separated element labels, with an optional
//! `*m` multiplicity suffix. `{}` denotes the empty edge. The optional
//! `#! ground:` directive fixes the ground set (and its order); without it
//! the ground set is every label in order of first appearance.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::family::{GroundSet, IncreasingFamily, MultiHypergraph, Subset};

const GROUND_DIRECTIVE: &str = "#! ground:";

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        message: message.into(),
    })
}

fn split_labels(text: &str, line: usize) -> Result<Vec<String>> {
    text.split(',')
        .map(|l| {
            let l = l.trim();
            if l.is_empty() {
                parse_err(line, "empty element label")
            } else if l.contains(['*', '#', '{', '}']) {
                parse_err(line, format!("invalid character in label {l:?}"))
            } else {
                Ok(l.to_string())
            }
        })
        .collect()
}

pub fn parse_hypergraph(text: &str) -> Result<MultiHypergraph> {
    let mut declared: Option<Vec<String>> = None;
    let mut raw: Vec<(Vec<String>, u64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if let Some(rest) = line.strip_prefix(GROUND_DIRECTIVE) {
            if declared.is_some() {
                return parse_err(lineno, "ground set declared twice");
            }
            declared = Some(split_labels(rest.trim(), lineno)?);
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (body, mult) = match line.rsplit_once('*') {
            Some((body, m)) => {
                let m: u64 = m
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse { line: lineno, message: format!("bad multiplicity {m:?}") })?;
                if m == 0 {
                    return parse_err(lineno, "multiplicity must be positive");
                }
                (body.trim(), m)
            }
            None => (line, 1),
        };
        let labels = if body == "{}" { Vec::new() } else { split_labels(body, lineno)? };
        raw.push((labels, mult));
    }
    let ground = match declared {
        Some(labels) => GroundSet::new(labels)?,
        None => {
            let mut seen: Vec<String> = Vec::new();
            for (labels, _) in &raw {
                for l in labels {
                    if !seen.contains(l) {
                        seen.push(l.clone());
                    }
                }
            }
            if seen.is_empty() {
                return parse_err(0, "no elements found and no ground directive given");
            }
            GroundSet::new(seen)?
        }
    };
    let edges = raw
        .into_iter()
        .map(|(labels, m)| Ok((ground.subset(&labels)?, m)))
        .collect::<Result<Vec<(Subset, u64)>>>()?;
    MultiHypergraph::new(ground, edges)
}

/// Parses the same format as an increasing family; multiplicities are dropped.
pub fn parse_family(text: &str) -> Result<IncreasingFamily> {
    Ok(parse_hypergraph(text)?.to_family())
}

pub fn write_hypergraph(h: &MultiHypergraph) -> String {
    let g = h.ground();
    let mut out = String::new();
    let _ = writeln!(out, "{GROUND_DIRECTIVE} {}", g.labels().join(","));
    for &(e, m) in h.edges() {
        let body = if e.is_empty() { "{}".to_string() } else { g.labels_of(e).join(",") };
        if m == 1 {
            let _ = writeln!(out, "{body}");
        } else {
            let _ = writeln!(out, "{body}*{m}");
        }
    }
    out
}

pub fn write_family(f: &IncreasingFamily) -> String {
    write_hypergraph(&f.to_hypergraph())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_multiplicity_and_ground() {
        let h = parse_hypergraph("# test\n#! ground: a,b,c,d\na, b\nb,c*3\n\n").unwrap();
        assert_eq!(h.ground().len(), 4);
        assert_eq!(h.size(), 4);
        assert_eq!(h.distinct_len(), 2);
    }

    #[test]
    fn infers_ground_in_order() {
        let h = parse_hypergraph("x,y\ny,z\n").unwrap();
        assert_eq!(h.ground().labels(), ["x", "y", "z"]);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(matches!(parse_hypergraph("a,,b\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_hypergraph("a,b*0\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_hypergraph("a,b*x\n"), Err(Error::Parse { .. })));
        assert!(parse_hypergraph("#! ground: a\nb\n").is_err());
        assert!(parse_hypergraph("# nothing\n").is_err());
    }

    #[test]
    fn round_trips() {
        let text = "#! ground: a,b,c,e\na,b*2\nc\n{}\n";
        let h = parse_hypergraph(text).unwrap();
        let back = parse_hypergraph(&write_hypergraph(&h)).unwrap();
        assert_eq!(h, back);
    }
}
