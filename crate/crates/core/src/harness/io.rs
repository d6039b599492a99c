//! Plain-text instance formats.
//!
//! Instance file:
//!
//! ```text
//! # comment
//! ecsm 4 4 2          # mode n m k [root]
//! 0 1 1               # u v cost, cost as integer, decimal or p/q
//! 1 2 3/2
//! 2 3 0.25
//! 3 0 1
//! ```
//!
//! Subset instances carry a `terminals v1 v2 ...` line right after the header.
//! Repeated edge lines are parallel edges.
//!
//! TAP file: a `tap n` header, `n − 1` tree edges `u v`, then one link `u v`
//! per line.

use std::fmt::Write as _;

use thiserror::Error;

use crate::gadgets::TapInstance;
use crate::multigraph::{MultiGraph, VertexId};
use crate::problems::{Instance, Mode};
use crate::rational::{format_rational, parse_rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn number<T: std::str::FromStr>(line: usize, token: &str, what: &str) -> Result<T, ParseError> {
    token
        .parse()
        .map_err(|_| err(line, format!("invalid {what} `{token}`")))
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = content_lines(text).peekable();
    let (hl, header) = lines.next().ok_or_else(|| err(0, "empty instance file"))?;
    if !(4..=5).contains(&header.len()) {
        return Err(err(hl, "header must be `ecss|ecsm|subset n m k [root]`"));
    }
    let mode: Mode = header[0].parse().map_err(|e: String| err(hl, e))?;
    let n: usize = number(hl, header[1], "vertex count")?;
    let m: usize = number(hl, header[2], "edge count")?;
    let k: i64 = number(hl, header[3], "k")?;
    let root: usize = match header.get(4) {
        Some(t) => number(hl, t, "root")?,
        None => 0,
    };
    if n == 0 {
        return Err(err(hl, "need at least one vertex"));
    }
    if k < 1 {
        return Err(err(hl, "k must be at least 1"));
    }
    if root >= n {
        return Err(err(hl, format!("root {root} out of range")));
    }
    let mut terminals = Vec::new();
    if lines.peek().is_some_and(|(_, t)| t[0] == "terminals") {
        let (tl, tokens) = lines.next().expect("peeked");
        if mode != Mode::Subset {
            return Err(err(
                tl,
                "terminals line is only allowed for subset instances",
            ));
        }
        for t in &tokens[1..] {
            let v: usize = number(tl, t, "terminal")?;
            if v >= n {
                return Err(err(tl, format!("terminal {v} out of range")));
            }
            if terminals.contains(&VertexId(v)) {
                return Err(err(tl, format!("terminal {v} listed twice")));
            }
            terminals.push(VertexId(v));
        }
    } else if mode == Mode::Subset {
        return Err(err(
            hl,
            "subset instance needs a `terminals` line after the header",
        ));
    }
    let mut graph = MultiGraph::new(n, VertexId(root)).map_err(|e| err(hl, e.to_string()))?;
    let mut cost = Vec::with_capacity(m);
    for (ln, tokens) in lines {
        if tokens.len() != 3 {
            return Err(err(ln, "edge line must be `u v cost`"));
        }
        if cost.len() == m {
            return Err(err(ln, format!("more than {m} edge lines")));
        }
        let u: usize = number(ln, tokens[0], "vertex")?;
        let v: usize = number(ln, tokens[1], "vertex")?;
        if u >= n || v >= n {
            return Err(err(ln, format!("vertex out of range in `{u} {v}`")));
        }
        if u == v {
            return Err(err(ln, format!("self-loop at {u}")));
        }
        let c = parse_rational(tokens[2]).map_err(|e| err(ln, e.to_string()))?;
        if c < num_traits::Zero::zero() {
            return Err(err(ln, "negative cost"));
        }
        graph
            .add_edge(VertexId(u), VertexId(v))
            .map_err(|e| err(ln, e.to_string()))?;
        cost.push(c);
    }
    if cost.len() != m {
        return Err(err(
            0,
            format!("header announces {m} edges, found {}", cost.len()),
        ));
    }
    Ok(Instance {
        mode,
        k,
        graph,
        cost,
        terminals,
    })
}

/// Text form of an (uncontracted) instance; `parse_instance` inverts it.
pub fn emit_instance(instance: &Instance) -> String {
    emit_instance_with_comment(instance, None)
}

pub fn emit_instance_with_comment(instance: &Instance, comment: Option<&str>) -> String {
    let g = &instance.graph;
    let mut out = String::new();
    if let Some(c) = comment {
        for line in c.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    let _ = write!(
        out,
        "{} {} {} {}",
        instance.mode,
        g.original_vertex_count(),
        g.edge_slots(),
        instance.k
    );
    if g.root() != VertexId(0) {
        let _ = write!(out, " {}", g.root().0);
    }
    out.push('\n');
    if instance.mode == Mode::Subset {
        out.push_str("terminals");
        for t in &instance.terminals {
            let _ = write!(out, " {}", t.0);
        }
        out.push('\n');
    }
    for e in g.edges() {
        let _ = writeln!(
            out,
            "{} {} {}",
            e.ends.0 .0,
            e.ends.1 .0,
            format_rational(&instance.cost[e.id.0])
        );
    }
    out
}

pub fn parse_tap(text: &str) -> Result<TapInstance, ParseError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| err(0, "empty TAP file"))?;
    if header.len() != 2 || header[0] != "tap" {
        return Err(err(hl, "header must be `tap n`"));
    }
    let n: usize = number(hl, header[1], "vertex count")?;
    if n == 0 {
        return Err(err(hl, "need at least one vertex"));
    }
    let mut tree = Vec::with_capacity(n - 1);
    let mut links = Vec::new();
    let mut last = hl;
    for (ln, tokens) in lines {
        last = ln;
        if tokens.len() != 2 {
            return Err(err(ln, "expected `u v`"));
        }
        let pair = (
            number(ln, tokens[0], "vertex")?,
            number(ln, tokens[1], "vertex")?,
        );
        if tree.len() < n - 1 {
            tree.push(pair);
        } else {
            links.push(pair);
        }
    }
    TapInstance::new(n, tree, links).map_err(|e| err(last, e.to_string()))
}

pub fn emit_tap(tap: &TapInstance) -> String {
    emit_tap_with_comment(tap, None)
}

pub fn emit_tap_with_comment(tap: &TapInstance, comment: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(c) = comment {
        for line in c.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    let _ = writeln!(out, "tap {}", tap.vertex_count());
    for (u, v) in tap.tree().iter().chain(tap.links()) {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn parses_documented_example() {
        let text = "# comment\necsm 4 4 2          # mode n m k\n0 1 1\n1 2 3/2\n2 3 0.25\n3 0 1\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.mode, Mode::Ecsm);
        assert_eq!(inst.k, 2);
        assert_eq!(inst.cost, vec![int(1), frac(3, 2), frac(1, 4), int(1)]);
        assert_eq!(inst.graph.edge_count(), 4);
    }

    #[test]
    fn parallel_lines_are_parallel_edges() {
        let inst = parse_instance("ecss 2 3 1\n0 1 1\n0 1 1\n1 0 2\n").unwrap();
        assert_eq!(inst.graph.parallel_class(VertexId(0), VertexId(1)).len(), 3);
    }

    #[test]
    fn subset_terminals_and_root() {
        let inst = parse_instance("subset 3 2 2 1\nterminals 0 2\n0 1 1\n1 2 1\n").unwrap();
        assert_eq!(inst.terminals, vec![VertexId(0), VertexId(2)]);
        assert_eq!(inst.graph.root(), VertexId(1));
        assert_eq!(
            emit_instance(&inst),
            "subset 3 2 2 1\nterminals 0 2\n0 1 1\n1 2 1\n"
        );
    }

    #[test]
    fn rejects_malformed_files() {
        for (text, line) in [
            ("", 0),
            ("ecsm 2 1\n0 1 1\n", 1),
            ("foo 2 1 2\n0 1 1\n", 1),
            ("ecsm 2 1 2\n0 2 1\n", 2),
            ("ecsm 2 1 2\n0 0 1\n", 2),
            ("ecsm 2 1 2\n0 1 -1\n", 2),
            ("ecsm 2 1 2\n0 1 x\n", 2),
            ("ecsm 2 2 2\n0 1 1\n", 0),
            ("ecsm 2 1 2\n0 1 1\n0 1 1\n", 3),
            ("subset 2 1 2\n0 1 1\n", 1),
            ("ecsm 2 1 2\nterminals 0 1\n0 1 1\n", 2),
            ("ecsm 2 1 0\n0 1 1\n", 1),
        ] {
            let e = parse_instance(text).unwrap_err();
            assert_eq!(e.line, line, "{text:?}: {e}");
        }
    }

    #[test]
    fn tap_round_trip() {
        let text = "tap 4\n0 1\n0 2\n0 3\n1 2\n2 3\n";
        let tap = parse_tap(text).unwrap();
        assert_eq!(tap.links(), &[(1, 2), (2, 3)]);
        assert_eq!(emit_tap(&tap), text);
        assert!(parse_tap("tap 3\n0 1\n0 1\n").is_err());
    }

    proptest::proptest! {
        #[test]
        fn instance_round_trip(
            n in 2usize..7,
            raw in proptest::collection::vec((0usize..7, 0usize..7, 0i64..50, 1i64..8), 0..12),
            k in 1i64..30,
            mode in 0u8..3,
        ) {
            let mut g = MultiGraph::new(n, VertexId(n - 1)).unwrap();
            let mut cost = Vec::new();
            for (u, v, p, q) in raw {
                let (u, v) = (u % n, v % n);
                if u != v {
                    g.add_edge(VertexId(u), VertexId(v)).unwrap();
                    cost.push(frac(p, q));
                }
            }
            let mode = [Mode::Ecss, Mode::Ecsm, Mode::Subset][mode as usize];
            let mut inst = Instance::new(mode, k, g, cost);
            if mode == Mode::Subset {
                inst.terminals = vec![VertexId(1), VertexId(0)];
            }
            let text = emit_instance_with_comment(&inst, Some("seed 7"));
            proptest::prop_assert_eq!(parse_instance(&text).unwrap(), inst);
        }
    }
}
