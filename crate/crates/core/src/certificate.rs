//! Replayable membership proofs: trees of switches, compositions and
//! transports across invariant F-moves.
//!
//! ```text
//! certificate
//! (compose (graph 1f2e...) (aut 9a0b...)
//!   (switch 0 2 (graph 1f2e...) (aut 77c1...))
//!   (transport (graph 1f2e...) (aut 3d4e...)
//!     (tree 3 -> coupling ((1 4) (6 7)))
//!     (identity (graph 5a6b...) (aut 0000...))))
//! ```
//!
//! Every node carries the digest of its graph and of the automorphism it
//! evaluates to; a transport's child lives on the graph after the move.

use std::fmt::Write as _;

use crate::automorphism::{switch_darts, Automorphism};
use crate::error::{CertificateError, ParseError};
use crate::fmove::{apply_fmove, transport, FMoveSpec};
use crate::graph::{Dart, Graph};
use crate::text::{format_tree_record, graph_hash, parse_tree_record, tokenize, Token};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Identity,
    /// The switch exchanging the two darts at one trivalent vertex.
    Switch(Dart, Dart),
    /// `c1 ∘ c2 ∘ …` (the last child acts first).
    Compose(Vec<Certificate>),
    /// The child lives on the graph after `fmove`; its automorphism is
    /// transported back across the inverse move.
    Transport {
        fmove: FMoveSpec,
        child: Box<Certificate>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub node: Node,
    /// Recorded `(graph digest, automorphism digest)`, checked on evaluation.
    pub digests: Option<(String, String)>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CertificateStats {
    pub nodes: usize,
    pub switches: usize,
    pub transports: usize,
    pub depth: usize,
}

impl Certificate {
    pub fn new(node: Node) -> Certificate {
        Certificate { node, digests: None }
    }

    pub fn identity() -> Certificate {
        Certificate::new(Node::Identity)
    }

    pub fn switch(a: Dart, b: Dart) -> Certificate {
        Certificate::new(Node::Switch(a, b))
    }

    /// Composition, flattening nested compositions and dropping identities.
    pub fn compose(children: Vec<Certificate>) -> Certificate {
        let mut flat = Vec::new();
        for c in children {
            match c.node {
                Node::Identity if c.digests.is_none() => {}
                Node::Compose(inner) if c.digests.is_none() => flat.extend(inner),
                _ => flat.push(c),
            }
        }
        match flat.len() {
            0 => Certificate::identity(),
            1 => flat.pop().expect("one child"),
            _ => Certificate::new(Node::Compose(flat)),
        }
    }

    pub fn transport(fmove: FMoveSpec, child: Certificate) -> Certificate {
        Certificate::new(Node::Transport {
            fmove,
            child: Box::new(child),
        })
    }

    pub fn stats(&self) -> CertificateStats {
        let mut s = CertificateStats {
            nodes: 1,
            depth: 1,
            ..CertificateStats::default()
        };
        let absorb = |c: &Certificate, s: &mut CertificateStats| {
            let t = c.stats();
            s.nodes += t.nodes;
            s.switches += t.switches;
            s.transports += t.transports;
            s.depth = s.depth.max(t.depth + 1);
        };
        match &self.node {
            Node::Identity => {}
            Node::Switch(..) => s.switches = 1,
            Node::Compose(children) => children.iter().for_each(|c| absorb(c, &mut s)),
            Node::Transport { child, .. } => {
                s.transports = 1;
                absorb(child, &mut s);
            }
        }
        s
    }

    /// Evaluates the tree on `graph`, checking every switch, every move and
    /// every recorded digest.
    pub fn eval(&self, graph: &Graph) -> Result<Automorphism, CertificateError> {
        self.eval_at(graph, "root")
    }

    fn eval_at(&self, graph: &Graph, at: &str) -> Result<Automorphism, CertificateError> {
        let fail = |message: String| CertificateError {
            at: at.to_string(),
            message,
        };
        if let Some((g, _)) = &self.digests {
            let actual = graph_hash(graph);
            if *g != actual {
                return Err(fail(format!("graph digest {g} recorded, {actual} found")));
            }
        }
        let phi = match &self.node {
            Node::Identity => Automorphism::identity(graph.num_darts()),
            Node::Switch(a, b) => switch_darts(graph, *a, *b).map_err(|e| fail(e.to_string()))?.0,
            Node::Compose(children) => {
                let mut acc = Automorphism::identity(graph.num_darts());
                for (i, c) in children.iter().enumerate() {
                    let next = c.eval_at(graph, &format!("{at}/{i}"))?;
                    acc = acc.compose(&next).map_err(|e| fail(e.to_string()))?;
                }
                acc
            }
            Node::Transport { fmove, child } => {
                let (moved, _) = apply_fmove(graph, fmove).map_err(|e| fail(format!("move: {e}")))?;
                let psi = child.eval_at(&moved, &format!("{at}/child"))?;
                let back = fmove.inverse(graph).map_err(|e| fail(format!("inverse move: {e}")))?;
                let (restored, phi) = transport(&moved, &psi, &back).map_err(|e| fail(format!("transport: {e}")))?;
                if restored != *graph {
                    return Err(fail("inverse move does not restore the graph".into()));
                }
                phi
            }
        };
        if let Some((_, a)) = &self.digests {
            let actual = phi.digest(graph);
            if *a != actual {
                return Err(fail(format!("automorphism digest {a} recorded, {actual} found")));
            }
        }
        Ok(phi)
    }

    /// Fills in the digests of every node.
    pub fn annotate(&mut self, graph: &Graph) -> Result<Automorphism, CertificateError> {
        self.digests = None;
        let phi = match &mut self.node {
            Node::Identity | Node::Switch(..) => self.eval(graph)?,
            Node::Compose(children) => {
                let mut acc = Automorphism::identity(graph.num_darts());
                for c in children.iter_mut() {
                    let next = c.annotate(graph)?;
                    acc = acc.compose(&next).expect("same graph");
                }
                acc
            }
            Node::Transport { fmove, child } => {
                let (moved, _) = apply_fmove(graph, fmove).map_err(|e| CertificateError {
                    at: "root".into(),
                    message: format!("move: {e}"),
                })?;
                child.annotate(&moved)?;
                self.eval(graph)?
            }
        };
        self.digests = Some((graph_hash(graph), phi.digest(graph)));
        Ok(phi)
    }
}

/// Checks that `cert` evaluates on `graph` to exactly `phi`.
pub fn verify_certificate(graph: &Graph, cert: &Certificate, phi: &Automorphism) -> Result<(), CertificateError> {
    let result = cert.eval(graph)?;
    if result != *phi {
        return Err(CertificateError {
            at: "root".into(),
            message: format!(
                "certificate evaluates to {}, expected {}",
                result.digest(graph),
                phi.digest(graph)
            ),
        });
    }
    Ok(())
}

/// Text form with the digests of every node filled in.
pub fn format_certificate(graph: &Graph, cert: &Certificate) -> Result<String, CertificateError> {
    let mut annotated = cert.clone();
    annotated.annotate(graph)?;
    let mut out = String::from("certificate\n");
    write_node(&annotated, 0, &mut out);
    Ok(out)
}

fn write_node(cert: &Certificate, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    let head = match &cert.node {
        Node::Identity => "identity".to_string(),
        Node::Switch(a, b) => format!("switch {a} {b}"),
        Node::Compose(_) => "compose".to_string(),
        Node::Transport { .. } => "transport".to_string(),
    };
    let attrs = match &cert.digests {
        Some((g, a)) => format!(" (graph {g}) (aut {a})"),
        None => String::new(),
    };
    let _ = write!(out, "{pad}({head}{attrs}");
    match &cert.node {
        Node::Identity | Node::Switch(..) => {}
        Node::Compose(children) => {
            for c in children {
                out.push('\n');
                write_node(c, indent + 1, out);
            }
        }
        Node::Transport { fmove, child } => {
            for r in &fmove.replacements {
                let _ = write!(out, "\n{pad}  ({})", format_tree_record(r));
            }
            out.push('\n');
            write_node(child, indent + 1, out);
        }
    }
    out.push(')');
    if indent == 0 {
        out.push('\n');
    }
}

struct Stream {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    last: (usize, usize),
}

impl Stream {
    fn peek(&self, k: usize) -> Option<&str> {
        self.tokens.get(self.pos + k).map(|(_, t)| t.text.as_str())
    }

    fn here(&self) -> (usize, usize) {
        self.tokens.get(self.pos).map_or(self.last, |(l, t)| (*l, t.column))
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, column) = self.here();
        ParseError::new(line, column, message)
    }

    fn next(&mut self, what: &str) -> Result<String, ParseError> {
        match self.tokens.get(self.pos) {
            Some((_, t)) => {
                self.pos += 1;
                Ok(t.text.clone())
            }
            None => Err(self.error(format!("expected {what}"))),
        }
    }

    fn expect(&mut self, word: &str) -> Result<(), ParseError> {
        match self.peek(0) {
            Some(t) if t == word => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => {
                let t = t.to_string();
                Err(self.error(format!("expected '{word}', found '{t}'")))
            }
            None => Err(self.error(format!("expected '{word}'"))),
        }
    }

    fn dart(&mut self, graph: &Graph) -> Result<Dart, ParseError> {
        let err = self.error("expected dart");
        let d: usize = self.next("dart")?.parse().map_err(|_| err.clone())?;
        if d >= graph.num_darts() {
            return Err(ParseError::new(err.line, err.column, format!("dart {d} out of range")));
        }
        Ok(Dart(d))
    }

    fn is_attr(&self) -> bool {
        self.peek(0) == Some("(") && matches!(self.peek(1), Some("graph" | "aut"))
    }

    fn attrs(&mut self) -> Result<Option<(String, String)>, ParseError> {
        if !self.is_attr() {
            return Ok(None);
        }
        self.expect("(")?;
        self.expect("graph")?;
        let g = self.next("graph digest")?;
        self.expect(")")?;
        self.expect("(")?;
        self.expect("aut")?;
        let a = self.next("automorphism digest")?;
        self.expect(")")?;
        Ok(Some((g, a)))
    }
}

/// Parses a certificate for `graph`. Moves are resolved against the graph
/// each node lives on; digests are kept for [`Certificate::eval`] to check.
pub fn parse_certificate(text: &str, graph: &Graph) -> Result<Certificate, ParseError> {
    let mut tokens = Vec::new();
    let mut last = (1, 1);
    for (i, line) in text.lines().enumerate() {
        for t in tokenize(line) {
            last = (i + 1, t.column + t.text.chars().count());
            tokens.push((i + 1, t));
        }
    }
    let mut s = Stream { tokens, pos: 0, last };
    s.expect("certificate")?;
    let cert = parse_node(&mut s, graph)?;
    if s.peek(0).is_some() {
        return Err(s.error("unexpected input after the certificate"));
    }
    Ok(cert)
}

fn parse_node(s: &mut Stream, graph: &Graph) -> Result<Certificate, ParseError> {
    s.expect("(")?;
    let kind_at = s.here();
    let kind = s.next("node kind")?;
    let (node, digests) = match kind.as_str() {
        "identity" => (Node::Identity, s.attrs()?),
        "switch" => {
            let a = s.dart(graph)?;
            let b = s.dart(graph)?;
            (Node::Switch(a, b), s.attrs()?)
        }
        "compose" => {
            let digests = s.attrs()?;
            let mut children = Vec::new();
            while s.peek(0) == Some("(") {
                children.push(parse_node(s, graph)?);
            }
            (Node::Compose(children), digests)
        }
        "transport" => {
            let digests = s.attrs()?;
            let mut replacements = Vec::new();
            while s.peek(0) == Some("(") && s.peek(1) == Some("tree") {
                s.expect("(")?;
                let line = s.tokens[s.pos].0;
                let end = s.tokens[s.pos..]
                    .iter()
                    .position(|(l, _)| *l != line)
                    .map_or(s.tokens.len(), |k| s.pos + k);
                let run: Vec<Token> = s.tokens[s.pos..end].iter().map(|(_, t)| t.clone()).collect();
                let mut j = 0;
                replacements.push(parse_tree_record(line, &run, &mut j, graph)?);
                s.pos += j;
                s.expect(")")?;
            }
            if replacements.is_empty() {
                return Err(s.error("transport needs at least one tree record"));
            }
            let fmove = FMoveSpec::new(replacements);
            let (moved, _) =
                apply_fmove(graph, &fmove).map_err(|e| ParseError::new(kind_at.0, kind_at.1, e.to_string()))?;
            let child = parse_node(s, &moved)?;
            (
                Node::Transport {
                    fmove,
                    child: Box::new(child),
                },
                digests,
            )
        }
        other => {
            return Err(ParseError::new(
                kind_at.0,
                kind_at.1,
                format!("unknown node kind '{other}'"),
            ));
        }
    };
    s.expect(")")?;
    Ok(Certificate { node, digests })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::automorphism_group;
    use crate::fmove::{edge_fmove, Coupling};
    use crate::graph::EdgeId;
    use crate::samples;

    #[test]
    fn switch_leaf_and_composition() {
        let g = samples::theta();
        let v = g.vertex(Dart(0));
        let cell = g.cell(v).to_vec();
        let s = Certificate::switch(cell[0], cell[1]);
        let phi = s.eval(&g).unwrap();
        assert_eq!(phi.order(), 2);
        let twice = Certificate::compose(vec![s.clone(), s.clone()]);
        assert!(twice.eval(&g).unwrap().is_identity());
        assert!(verify_certificate(&g, &s, &phi).is_ok());
        assert!(verify_certificate(&g, &twice, &phi).is_err());
    }

    #[test]
    fn bad_switch_is_reported_with_its_address() {
        let g = samples::tripod();
        let bad = Certificate::compose(vec![Certificate::identity(), Certificate::switch(Dart(0), Dart(1))]);
        let cert = Certificate::new(Node::Compose(vec![Certificate::identity(), bad]));
        let err = cert.eval(&g).unwrap_err();
        assert_eq!(err.at, "root/1");
    }

    #[test]
    fn transport_of_identity_is_identity() {
        let g = samples::theta();
        let mv = edge_fmove(&g, EdgeId(0), Coupling::Crossed).unwrap();
        let cert = Certificate::transport(mv, Certificate::identity());
        assert!(cert.eval(&g).unwrap().is_identity());
    }

    #[test]
    fn text_round_trip_and_tampering() {
        let g = samples::theta();
        let mv = edge_fmove(&g, EdgeId(0), Coupling::Crossed).unwrap();
        let (moved, _) = apply_fmove(&g, &mv).unwrap();
        let inner = moved
            .darts()
            .flat_map(|a| moved.darts().map(move |b| (a, b)))
            .filter(|&(a, b)| a < b)
            .filter_map(|(a, b)| switch_darts(&moved, a, b).ok().map(|(s, _)| (a, b, s)))
            .find(|(_, _, s)| s.apply_edge(EdgeId(0)) == EdgeId(0))
            .map(|(a, b, _)| Certificate::switch(a, b))
            .unwrap();
        let cert = Certificate::compose(vec![
            Certificate::transport(mv, inner),
            Certificate::identity(),
            Certificate::transport(
                edge_fmove(&g, EdgeId(1), Coupling::Parallel).unwrap(),
                Certificate::identity(),
            ),
        ]);
        let phi = cert.eval(&g).unwrap();
        assert!(automorphism_group(&g).unwrap().contains(&phi));
        let text = format_certificate(&g, &cert).unwrap();
        let parsed = parse_certificate(&text, &g).unwrap();
        assert!(verify_certificate(&g, &parsed, &phi).is_ok());
        assert_eq!(format_certificate(&g, &parsed).unwrap(), text);

        let tampered = text.replacen("(aut ", "(aut 0", 1);
        let parsed = parse_certificate(&tampered, &g).unwrap();
        assert!(verify_certificate(&g, &parsed, &phi).is_err());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let g = samples::theta();
        let err = parse_certificate("certificate\n(frobnicate)", &g).unwrap_err();
        assert_eq!((err.line, err.column), (2, 2));
        let err = parse_certificate("certificate\n(switch 0 99)", &g).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(parse_certificate("certificate\n(identity", &g).is_err());
        assert!(parse_certificate("(identity)", &g).is_err());
    }
}
