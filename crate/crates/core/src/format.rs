//! Line-oriented text formats.
//!
//! Arc lists (`.btg`):
//!
//! ```text
//! # btg v1
//! n 8
//! parts 1 3 5 7 | 2 4 6 8
//! arc 1 2
//! ```
//!
//! `#` starts a comment line, `parts` is optional, and arcs are written in
//! lexicographic order. Decompositions (`.dec`) hold one quad per line,
//! innermost first: `c4 9 10 11 12`.

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::digraph::{Digraph, GraphError, Vertex};
use crate::gen::Decomposition;

pub const BTG_HEADER: &str = "# btg v1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `n` line")]
    MissingCount,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn write_btg(d: &Digraph) -> String {
    let mut s = String::new();
    s.push_str(BTG_HEADER);
    s.push('\n');
    s.push_str(&format!("n {}\n", d.n()));
    if let Some((x, y)) = d.parts() {
        let join = |p: crate::digraph::Part| p.members().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        s.push_str(&format!("parts {} | {}\n", join(x), join(y)));
    }
    for (u, v) in d.arcs() {
        s.push_str(&format!("arc {u} {v}\n"));
    }
    s
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, msg: msg.into() }
}

fn parse_vertices(line: usize, toks: &str) -> Result<Vec<Vertex>, FormatError> {
    toks.split_whitespace()
        .map(|t| t.parse().map_err(|_| syntax(line, format!("bad vertex {t:?}"))))
        .collect()
}

pub fn parse_btg(text: &str) -> Result<Digraph, FormatError> {
    let mut n = None;
    let mut parts = None;
    let mut arcs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (tag, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match tag {
            "n" => {
                if n.is_some() {
                    return Err(syntax(lineno, "duplicate `n` line"));
                }
                n = Some(
                    rest.trim()
                        .parse::<usize>()
                        .map_err(|_| syntax(lineno, "bad vertex count"))?,
                );
            }
            "parts" => {
                let (x, y) = rest
                    .split_once('|')
                    .ok_or_else(|| syntax(lineno, "parts line needs `|`"))?;
                parts = Some((parse_vertices(lineno, x)?, parse_vertices(lineno, y)?));
            }
            "arc" => {
                let vs = parse_vertices(lineno, rest)?;
                let [u, v] = vs[..] else {
                    return Err(syntax(lineno, "arc needs two endpoints"));
                };
                arcs.push((u, v));
            }
            other => return Err(syntax(lineno, format!("unknown tag {other:?}"))),
        }
    }
    let n = n.ok_or(FormatError::MissingCount)?;
    Ok(Digraph::new(n, &arcs, parts)?)
}

pub fn write_dec(dec: &Decomposition) -> String {
    dec.quads()
        .iter()
        .map(|q| format!("c4 {} {} {} {}\n", q[0], q[1], q[2], q[3]))
        .collect()
}

pub fn parse_dec(text: &str) -> Result<Decomposition, FormatError> {
    let mut quads = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let rest = line.strip_prefix("c4").ok_or_else(|| syntax(i + 1, "expected `c4`"))?;
        let vs = parse_vertices(i + 1, rest)?;
        let q: [Vertex; 4] = vs.try_into().map_err(|_| syntax(i + 1, "a quad has four vertices"))?;
        quads.push(q);
    }
    Ok(Decomposition::new(quads))
}

pub fn read_btg(path: impl AsRef<Path>) -> Result<Digraph, FormatError> {
    parse_btg(&fs::read_to_string(path)?)
}

pub fn read_dec(path: impl AsRef<Path>) -> Result<Decomposition, FormatError> {
    parse_dec(&fs::read_to_string(path)?)
}
