//! Canonical forms of graphs and of graphs carrying a dart permutation.
//!
//! A labeling is grown from a start dart: each labeled dart labels its pair,
//! then the unlabeled darts at its vertex (branching on their order). The
//! code lists, per label, the pair's label, the cell size and the sorted
//! labels of the mates. The canonical code is the lexicographically least
//! code over all starts and branches.

use std::cmp::Ordering;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::error::GraphError;
use crate::graph::{Dart, Graph};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(Vec<u32>);

impl CanonicalCode {
    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// Short hex digest (64 bits of SHA-256 over the code).
    pub fn digest(&self) -> String {
        digest_words(&self.0)
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.digest())
    }
}

pub(crate) fn digest_words(words: &[u32]) -> String {
    let mut hasher = Sha256::new();
    for w in words {
        hasher.update(w.to_le_bytes());
    }
    hasher.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Result of the canonical labeling search.
#[derive(Clone, Debug)]
pub struct Labeling {
    pub code: CanonicalCode,
    /// `order[i]` is the dart receiving label `i`.
    pub order: Vec<Dart>,
}

/// Canonical code of a valid graph; equal iff the graphs are isomorphic.
pub fn canonical_form(graph: &Graph) -> Result<CanonicalCode, GraphError> {
    graph.ensure_valid()?;
    Ok(canonical_labeling(graph, None).code)
}

/// Canonical labeling of a connected graph, optionally carrying a dart
/// permutation `extra` that is appended to the code under the same labels.
pub fn canonical_labeling(graph: &Graph, extra: Option<&[Dart]>) -> Labeling {
    let n = graph.num_darts();
    let header = vec![
        n as u32,
        graph.num_vertices() as u32,
        graph.genus() as u32,
        graph.boundary() as u32,
        u32::from(extra.is_some()),
    ];
    let mut search = Search {
        graph,
        extra,
        best: None,
        best_order: Vec::new(),
        version: 0,
    };
    for start in 0..n {
        let mut label = vec![NONE; n];
        label[start] = 0;
        let state = State {
            order: vec![Dart(start)],
            label,
            code: Vec::with_capacity(5 * n),
            pos: 0,
            cmp: if search.best.is_some() {
                Ordering::Equal
            } else {
                Ordering::Less
            },
            version: search.version,
        };
        search.descend(state);
    }
    let mut code = header;
    code.extend(search.best.unwrap_or_default());
    Labeling {
        code: CanonicalCode(code),
        order: search.best_order,
    }
}

const NONE: u32 = u32::MAX;

#[derive(Clone)]
struct State {
    order: Vec<Dart>,
    label: Vec<u32>,
    code: Vec<u32>,
    pos: usize,
    /// Comparison of `code` with the prefix of the best code, valid for
    /// best code number `version`.
    cmp: Ordering,
    version: usize,
}

struct Search<'a> {
    graph: &'a Graph,
    extra: Option<&'a [Dart]>,
    best: Option<Vec<u32>>,
    best_order: Vec<Dart>,
    version: usize,
}

impl Search<'_> {
    /// Re-derives the comparison state after the best code changed; returns
    /// false when the branch can no longer win.
    fn sync(&self, st: &mut State) -> bool {
        if st.version == self.version {
            return true;
        }
        st.version = self.version;
        let best = self.best.as_ref().expect("versions advance with a best code");
        st.cmp = st.code.as_slice().cmp(&best[..st.code.len()]);
        st.cmp != Ordering::Greater
    }

    /// Appends a token; returns false when the branch cannot beat the best.
    fn emit(&self, st: &mut State, token: u32) -> bool {
        if !self.sync(st) {
            return false;
        }
        if st.cmp == Ordering::Equal {
            let best = self.best.as_ref().expect("equal implies a best code");
            match token.cmp(&best[st.code.len()]) {
                Ordering::Greater => return false,
                Ordering::Less => st.cmp = Ordering::Less,
                Ordering::Equal => {}
            }
        }
        st.code.push(token);
        true
    }

    fn descend(&mut self, mut st: State) {
        let g = self.graph;
        loop {
            if st.pos == st.order.len() {
                self.finish(st);
                return;
            }
            let d = st.order[st.pos];
            let p = d.pair();
            if st.label[p.0] == NONE {
                st.label[p.0] = st.order.len() as u32;
                st.order.push(p);
            }
            let fresh: Vec<Dart> = g.mates(d).filter(|m| st.label[m.0] == NONE).collect();
            if fresh.len() == 2 {
                for (a, b) in [(fresh[0], fresh[1]), (fresh[1], fresh[0])] {
                    let mut branch = st.clone();
                    for m in [a, b] {
                        branch.label[m.0] = branch.order.len() as u32;
                        branch.order.push(m);
                    }
                    if self.emit_dart(&mut branch, d) {
                        branch.pos += 1;
                        self.descend(branch);
                    }
                }
                return;
            }
            for m in fresh {
                st.label[m.0] = st.order.len() as u32;
                st.order.push(m);
            }
            if !self.emit_dart(&mut st, d) {
                return;
            }
            st.pos += 1;
        }
    }

    fn emit_dart(&self, st: &mut State, d: Dart) -> bool {
        let g = self.graph;
        let cell = g.cell(g.vertex(d));
        let mut mates: Vec<u32> = cell.iter().filter(|&&m| m != d).map(|m| st.label[m.0]).collect();
        mates.sort_unstable();
        let pair = st.label[d.pair().0];
        if !self.emit(st, pair) || !self.emit(st, cell.len() as u32) {
            return false;
        }
        mates.into_iter().all(|m| self.emit(st, m))
    }

    fn finish(&mut self, mut st: State) {
        if st.order.len() != self.graph.num_darts() {
            // Disconnected input: only darts reachable from the start are
            // labeled. Pad so codes stay comparable.
            for d in self.graph.darts() {
                if st.label[d.0] == NONE {
                    st.label[d.0] = st.order.len() as u32;
                    st.order.push(d);
                }
            }
        }
        if let Some(extra) = self.extra {
            for i in 0..st.order.len() {
                let image = st.label[extra[st.order[i].0].0];
                if !self.emit(&mut st, image) {
                    return;
                }
            }
        }
        if self.sync(&mut st) && st.cmp == Ordering::Less {
            self.best = Some(st.code);
            self.best_order = st.order;
            self.version += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn relabeled_theta_has_the_same_code() {
        let g = samples::theta();
        let map: Vec<Dart> = [5, 4, 0, 1, 3, 2].into_iter().map(Dart).collect();
        let h = g.relabeled(&map).unwrap();
        assert_ne!(g, h);
        assert_eq!(canonical_form(&g).unwrap(), canonical_form(&h).unwrap());
    }

    #[test]
    fn theta_and_dumbbell_differ() {
        assert_ne!(
            canonical_form(&samples::theta()).unwrap(),
            canonical_form(&samples::dumbbell()).unwrap()
        );
    }

    #[test]
    fn tripod_code_is_deterministic() {
        let a = canonical_form(&samples::tripod()).unwrap();
        let b = canonical_form(&samples::tripod()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.digest().len(), 16);
    }

    #[test]
    fn invalid_graph_is_rejected() {
        let g = Graph::from_edges(1, 0, 1, &[(0, 0)]).unwrap();
        assert!(canonical_form(&g).is_err());
    }

    #[test]
    fn labeling_is_a_bijection() {
        let g = samples::dumbbell();
        let lab = canonical_labeling(&g, None);
        let mut seen: Vec<usize> = lab.order.iter().map(|d| d.0).collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..g.num_darts()).collect::<Vec<_>>());
    }
}
