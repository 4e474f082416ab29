//! Line-oriented text formats for graphs, automorphisms and moves.
//!
//! ```text
//! graph g=2 b=0
//! edge 0 a b
//! edge 1 a b
//! edge 2 a b
//! ```
//!
//! ```text
//! aut <graph digest>
//! dart 0 -> 1
//! ```
//!
//! ```text
//! fmove
//! tree 0 -> coupling ((2 3) (4 5))
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::automorphism::Automorphism;
use crate::canon::canonical_form;
use crate::error::ParseError;
use crate::fmove::{CouplingTree, FMoveSpec, Replacement};
use crate::graph::{Dart, EdgeId, Graph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Token {
    pub text: String,
    pub column: usize,
}

/// Splits a line into words and single-character parentheses, dropping a
/// trailing `#` comment. Columns are 1-based.
pub(crate) fn tokenize(line: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current: Option<Token> = None;
    for (i, ch) in line.chars().enumerate() {
        let column = i + 1;
        if ch == '#' {
            break;
        }
        if ch.is_whitespace() || ch == '(' || ch == ')' {
            if let Some(t) = current.take() {
                tokens.push(t);
            }
            if ch != ' ' && !ch.is_whitespace() {
                tokens.push(Token {
                    text: ch.to_string(),
                    column,
                });
            }
        } else {
            current
                .get_or_insert_with(|| Token {
                    text: String::new(),
                    column,
                })
                .text
                .push(ch);
        }
    }
    if let Some(t) = current {
        tokens.push(t);
    }
    tokens
}

/// Non-empty lines as (line number, tokens).
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<Token>)> + '_ {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, tokenize(l)))
        .filter(|(_, t)| !t.is_empty())
}

fn expect_word(line: usize, tokens: &[Token], i: usize, word: &str) -> Result<(), ParseError> {
    match tokens.get(i) {
        Some(t) if t.text == word => Ok(()),
        Some(t) => Err(ParseError::new(
            line,
            t.column,
            format!("expected '{word}', found '{}'", t.text),
        )),
        None => Err(ParseError::new(line, end_column(tokens), format!("expected '{word}'"))),
    }
}

fn end_column(tokens: &[Token]) -> usize {
    tokens.last().map_or(1, |t| t.column + t.text.chars().count())
}

fn number(line: usize, tokens: &[Token], i: usize, what: &str) -> Result<usize, ParseError> {
    match tokens.get(i) {
        Some(t) => t
            .text
            .parse()
            .map_err(|_| ParseError::new(line, t.column, format!("expected {what}, found '{}'", t.text))),
        None => Err(ParseError::new(line, end_column(tokens), format!("expected {what}"))),
    }
}

fn no_trailing(line: usize, tokens: &[Token], len: usize) -> Result<(), ParseError> {
    match tokens.get(len) {
        Some(t) => Err(ParseError::new(line, t.column, format!("unexpected '{}'", t.text))),
        None => Ok(()),
    }
}

fn keyed_number(line: usize, tok: Option<&Token>, key: &str, fallback: usize) -> Result<usize, ParseError> {
    let Some(tok) = tok else {
        return Err(ParseError::new(line, fallback, format!("expected {key}=<int>")));
    };
    let value = tok
        .text
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| ParseError::new(line, tok.column, format!("expected {key}=<int>, found '{}'", tok.text)))?;
    value
        .parse()
        .map_err(|_| ParseError::new(line, tok.column + key.len() + 1, format!("bad integer '{value}'")))
}

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut vertex_ids: HashMap<String, usize> = HashMap::new();
    let mut cells: Vec<Vec<Dart>> = Vec::new();
    let mut leaves: Vec<(usize, usize, usize)> = Vec::new();
    let mut edges = 0;
    let mut last_line = 0;
    for (line, tokens) in records(text) {
        last_line = line;
        let head = &tokens[0];
        match (head.text.as_str(), header) {
            ("graph", None) => {
                let g = keyed_number(line, tokens.get(1), "g", end_column(&tokens))?;
                let b = keyed_number(line, tokens.get(2), "b", end_column(&tokens))?;
                no_trailing(line, &tokens, 3)?;
                header = Some((g, b));
            }
            ("graph", Some(_)) => return Err(ParseError::new(line, head.column, "duplicate graph header")),
            (_, None) => return Err(ParseError::new(line, head.column, "expected 'graph g=<int> b=<int>'")),
            ("edge", Some(_)) => {
                let id = number(line, &tokens, 1, "edge id")?;
                if id != edges {
                    return Err(ParseError::new(
                        line,
                        tokens[1].column,
                        format!("expected edge id {edges}, found {id}"),
                    ));
                }
                for (slot, dart) in [(2, 2 * id), (3, 2 * id + 1)] {
                    let Some(t) = tokens.get(slot) else {
                        return Err(ParseError::new(line, end_column(&tokens), "expected vertex id"));
                    };
                    let next = vertex_ids.len();
                    let v = *vertex_ids.entry(t.text.clone()).or_insert(next);
                    if v == cells.len() {
                        cells.push(Vec::new());
                    }
                    cells[v].push(Dart(dart));
                }
                no_trailing(line, &tokens, 4)?;
                edges += 1;
            }
            ("leaf", Some(_)) => {
                let Some(t) = tokens.get(1) else {
                    return Err(ParseError::new(line, end_column(&tokens), "expected vertex id"));
                };
                no_trailing(line, &tokens, 2)?;
                let Some(&v) = vertex_ids.get(&t.text) else {
                    return Err(ParseError::new(
                        line,
                        t.column,
                        format!("leaf '{}' is on no edge", t.text),
                    ));
                };
                leaves.push((line, t.column, v));
            }
            (word, Some(_)) => return Err(ParseError::new(line, head.column, format!("unknown record '{word}'"))),
        }
    }
    let Some((g, b)) = header else {
        return Err(ParseError::new(last_line.max(1), 1, "missing graph header"));
    };
    for (line, column, v) in leaves {
        if cells[v].len() != 1 {
            return Err(ParseError::new(
                line,
                column,
                format!("leaf vertex has degree {}", cells[v].len()),
            ));
        }
    }
    Graph::from_cells(g, b, edges, cells).map_err(|e| ParseError::new(last_line.max(1), 1, e.to_string()))
}

pub fn format_graph(graph: &Graph) -> String {
    let mut out = format!("graph g={} b={}\n", graph.genus(), graph.boundary());
    for e in graph.edges() {
        let (a, b) = graph.ends(e);
        let _ = writeln!(out, "edge {e} {a} {b}");
    }
    for v in graph.vertices() {
        if graph.is_univalent(v) {
            let _ = writeln!(out, "leaf {v}");
        }
    }
    out
}

/// Short hash identifying the isomorphism class of a valid graph.
pub fn graph_hash(graph: &Graph) -> String {
    match canonical_form(graph) {
        Ok(code) => code.digest(),
        Err(_) => "invalid".into(),
    }
}

pub fn parse_automorphism(text: &str, graph: &Graph) -> Result<Automorphism, ParseError> {
    let mut map: Vec<Option<Dart>> = vec![None; graph.num_darts()];
    let mut seen_header = false;
    let mut last_line = 1;
    for (line, tokens) in records(text) {
        last_line = line;
        let head = &tokens[0];
        if !seen_header {
            expect_word(line, &tokens, 0, "aut")?;
            let Some(h) = tokens.get(1) else {
                return Err(ParseError::new(line, end_column(&tokens), "expected graph hash"));
            };
            no_trailing(line, &tokens, 2)?;
            let expected = graph_hash(graph);
            if h.text != expected {
                return Err(ParseError::new(
                    line,
                    h.column,
                    format!("graph hash {} does not match the graph ({expected})", h.text),
                ));
            }
            seen_header = true;
            continue;
        }
        if head.text != "dart" {
            return Err(ParseError::new(
                line,
                head.column,
                format!("expected 'dart', found '{}'", head.text),
            ));
        }
        let from = number(line, &tokens, 1, "dart")?;
        expect_word(line, &tokens, 2, "->")?;
        let to = number(line, &tokens, 3, "dart")?;
        no_trailing(line, &tokens, 4)?;
        if from >= map.len() {
            return Err(ParseError::new(
                line,
                tokens[1].column,
                format!("dart {from} out of range"),
            ));
        }
        if to >= map.len() {
            return Err(ParseError::new(
                line,
                tokens[3].column,
                format!("dart {to} out of range"),
            ));
        }
        if map[from].replace(Dart(to)).is_some() {
            return Err(ParseError::new(
                line,
                tokens[1].column,
                format!("dart {from} mapped twice"),
            ));
        }
    }
    if !seen_header {
        return Err(ParseError::new(last_line, 1, "missing aut header"));
    }
    let map: Vec<Dart> = map
        .into_iter()
        .enumerate()
        .map(|(i, d)| d.ok_or_else(|| ParseError::new(last_line, 1, format!("dart {i} has no image"))))
        .collect::<Result<_, _>>()?;
    Automorphism::new(graph, map).map_err(|e| ParseError::new(last_line, 1, e.to_string()))
}

pub fn format_automorphism(graph: &Graph, phi: &Automorphism) -> String {
    let mut out = format!("aut {}\n", graph_hash(graph));
    for d in graph.darts() {
        let _ = writeln!(out, "dart {d} -> {}", phi.apply(d));
    }
    out
}

/// Parses a coupling expression starting at `tokens[*i]`.
pub(crate) fn parse_coupling(line: usize, tokens: &[Token], i: &mut usize) -> Result<CouplingTree, ParseError> {
    let Some(t) = tokens.get(*i) else {
        return Err(ParseError::new(
            line,
            end_column(tokens),
            "expected coupling expression",
        ));
    };
    *i += 1;
    if t.text == "(" {
        let a = parse_coupling(line, tokens, i)?;
        let b = parse_coupling(line, tokens, i)?;
        match tokens.get(*i) {
            Some(c) if c.text == ")" => {
                *i += 1;
                Ok(CouplingTree::join(a, b))
            }
            Some(c) => Err(ParseError::new(
                line,
                c.column,
                format!("expected ')', found '{}'", c.text),
            )),
            None => Err(ParseError::new(line, end_column(tokens), "expected ')'")),
        }
    } else {
        t.text
            .parse()
            .map(|d| CouplingTree::Leaf(Dart(d)))
            .map_err(|_| ParseError::new(line, t.column, format!("expected dart or '(', found '{}'", t.text)))
    }
}

/// Parses one `tree <edge>* -> coupling <expr>` record starting at `tokens[*i]`.
pub(crate) fn parse_tree_record(
    line: usize,
    tokens: &[Token],
    i: &mut usize,
    graph: &Graph,
) -> Result<Replacement, ParseError> {
    let start = tokens.get(*i).map_or(1, |t| t.column);
    expect_word(line, tokens, *i, "tree")?;
    *i += 1;
    let mut core = Vec::new();
    while tokens.get(*i).is_some_and(|t| t.text != "->") {
        core.push(EdgeId(number(line, tokens, *i, "edge id")?));
        *i += 1;
    }
    expect_word(line, tokens, *i, "->")?;
    *i += 1;
    expect_word(line, tokens, *i, "coupling")?;
    *i += 1;
    let expr = parse_coupling(line, tokens, i)?;
    Replacement::new(graph, &core, &expr).map_err(|e| ParseError::new(line, start, e.to_string()))
}

pub fn parse_fmove(text: &str, graph: &Graph) -> Result<FMoveSpec, ParseError> {
    let mut seen_header = false;
    let mut replacements = Vec::new();
    let mut last_line = 1;
    for (line, tokens) in records(text) {
        last_line = line;
        if !seen_header {
            expect_word(line, &tokens, 0, "fmove")?;
            no_trailing(line, &tokens, 1)?;
            seen_header = true;
            continue;
        }
        let mut i = 0;
        replacements.push(parse_tree_record(line, &tokens, &mut i, graph)?);
        no_trailing(line, &tokens, i)?;
    }
    if !seen_header {
        return Err(ParseError::new(last_line, 1, "missing fmove header"));
    }
    let spec = FMoveSpec::new(replacements);
    spec.check(graph)
        .map_err(|e| ParseError::new(last_line, 1, e.to_string()))?;
    Ok(spec)
}

pub(crate) fn format_tree_record(r: &Replacement) -> String {
    let core: Vec<String> = r.core.iter().map(|e| e.to_string()).collect();
    format!("tree {} -> coupling {}", core.join(" "), r.coupling())
}

pub fn format_fmove(spec: &FMoveSpec) -> String {
    let mut out = String::from("fmove\n");
    for r in &spec.replacements {
        out.push_str(&format_tree_record(r));
        out.push('\n');
    }
    out
}
