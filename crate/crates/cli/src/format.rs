//! The `.ihc` instance file format.
//!
//! Line-oriented UTF-8 with `#` comments:
//!
//! ```text
//! IHC 1
//! n <N>
//! edge <u> <v>          # one per edge, 0-indexed, u < v; id = occurrence order
//! incompat <v> <e1> <e2>  # pair {e1,e2} forbidden at v; e1 < e2; listed once
//! color <e> <c>           # optional total colouring block
//! ```
//!
//! Serialization is canonical (edges in id order, pairs sorted by
//! `(v, e1, e2)`, colours in edge order), so parse -> write round-trips
//! byte-identically on canonical files.

use ihc_core::graph::{EdgeColouring, Graph};
use ihc_core::system::IncompatibilitySystem;
use thiserror::Error;

#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: Graph,
    pub system: IncompatibilitySystem,
    pub colouring: Option<EdgeColouring>,
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    Semantic { line: usize, msg: String },
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        msg: msg.into(),
    }
}

pub fn parse_ihc(text: &str) -> Result<Instance, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| syntax(1, "empty file"))?;
    if header != "IHC 1" {
        return Err(syntax(
            hl,
            format!("expected header 'IHC 1', got '{header}'"),
        ));
    }
    let mut n: Option<usize> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    let mut colours: Vec<(usize, u32, usize)> = Vec::new();
    for (ln, line) in lines {
        let mut parts = line.split_ascii_whitespace();
        let kind = parts.next().unwrap();
        let mut arg = |name: &str| -> Result<usize, FormatError> {
            parts
                .next()
                .ok_or_else(|| syntax(ln, format!("missing {name}")))?
                .parse::<usize>()
                .map_err(|_| syntax(ln, format!("bad {name}")))
        };
        match kind {
            "n" => {
                let value = arg("vertex count")?;
                if n.replace(value).is_some() {
                    return Err(syntax(ln, "duplicate n line"));
                }
            }
            "edge" => {
                let u = arg("u")?;
                let v = arg("v")?;
                if u >= v {
                    return Err(syntax(ln, format!("edge {u} {v} must have u < v")));
                }
                edges.push((u, v));
            }
            "incompat" => {
                let v = arg("v")?;
                let e1 = arg("e1")?;
                let e2 = arg("e2")?;
                if e1 >= e2 {
                    return Err(syntax(
                        ln,
                        format!("incompat pair {e1} {e2} must have e1 < e2"),
                    ));
                }
                pairs.push((v, e1, e2));
            }
            "color" => {
                let e = arg("edge id")?;
                let c = arg("colour")?;
                colours.push((e, c as u32, ln));
            }
            other => return Err(syntax(ln, format!("unknown directive '{other}'"))),
        }
        if let Some(extra) = parts.next() {
            return Err(syntax(ln, format!("trailing token '{extra}'")));
        }
    }
    let n = n.ok_or_else(|| syntax(1, "missing 'n' line"))?;
    let graph = Graph::new(n, &edges).map_err(|e| FormatError::Semantic {
        line: 0,
        msg: format!("invalid graph: {e}"),
    })?;
    let system = IncompatibilitySystem::from_pairs(&graph, pairs.iter().copied()).map_err(|e| {
        FormatError::Semantic {
            line: 0,
            msg: format!("invalid incompatibility system: {e}"),
        }
    })?;
    let colouring = if colours.is_empty() {
        None
    } else {
        let mut table = vec![None; graph.edge_count()];
        for &(e, c, ln) in &colours {
            if e >= graph.edge_count() {
                return Err(syntax(ln, format!("colour for out-of-range edge {e}")));
            }
            if table[e].replace(c).is_some() {
                return Err(syntax(ln, format!("duplicate colour for edge {e}")));
            }
        }
        let missing = table.iter().position(|c| c.is_none());
        if let Some(e) = missing {
            return Err(FormatError::Semantic {
                line: 0,
                msg: format!("colouring is not total: edge {e} has no colour"),
            });
        }
        Some(EdgeColouring::new(
            table.into_iter().map(|c| c.unwrap()).collect(),
        ))
    };
    Ok(Instance {
        graph,
        system,
        colouring,
    })
}

pub fn write_ihc(instance: &Instance) -> String {
    let g = &instance.graph;
    let mut out = String::new();
    out.push_str("IHC 1\n");
    out.push_str(&format!("n {}\n", g.n()));
    for e in 0..g.edge_count() {
        let (u, v) = g.endpoints(e);
        out.push_str(&format!("edge {u} {v}\n"));
    }
    for (v, e1, e2) in instance.system.iter_pairs(g) {
        out.push_str(&format!("incompat {v} {e1} {e2}\n"));
    }
    if let Some(c) = &instance.colouring {
        for e in 0..g.edge_count() {
            out.push_str(&format!("color {e} {}\n", c.of(e)));
        }
    }
    out
}

/// Cycle files: a single line `cycle v_1 v_2 ... v_n`, implicitly closed.
pub fn parse_cycle_file(text: &str) -> Result<Vec<usize>, FormatError> {
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_ascii_whitespace();
        if parts.next() != Some("cycle") {
            return Err(syntax(i + 1, "expected 'cycle v_1 v_2 ...'"));
        }
        let verts: Result<Vec<usize>, _> = parts.map(|p| p.parse::<usize>()).collect();
        return verts.map_err(|_| syntax(i + 1, "bad vertex id"));
    }
    Err(syntax(1, "no cycle line found"))
}

pub fn write_cycle_file(verts: &[usize]) -> String {
    let mut out = String::from("cycle");
    for v in verts {
        out.push(' ');
        out.push_str(&v.to_string());
    }
    out.push('\n');
    out
}
