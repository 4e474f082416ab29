//! Exhaustive enumeration of `G_{g,b}` up to isomorphism.
//!
//! Graphs are generated as perfect matchings on the dart slots of
//! `2g - 2 + b` trivalent and `b` univalent vertices. The lowest free slot is
//! always matched next; interchangeable partner slots (free slots of one
//! vertex, untouched vertices of equal degree) are tried once.

use std::collections::BTreeMap;

use crate::canon::{canonical_labeling, CanonicalCode};
use crate::error::GraphError;
use crate::graph::{edge_count, is_admissible, Dart, Graph};

pub const DEFAULT_EDGE_CAP: usize = 12;

/// One representative per isomorphism class, sorted by canonical code.
pub fn enumerate_iso_classes(genus: usize, boundary: usize) -> Result<Vec<Graph>, GraphError> {
    enumerate_iso_classes_capped(genus, boundary, DEFAULT_EDGE_CAP)
}

pub fn enumerate_iso_classes_capped(genus: usize, boundary: usize, cap: usize) -> Result<Vec<Graph>, GraphError> {
    Ok(enumerate_with_codes(genus, boundary, cap)?
        .into_iter()
        .map(|(_, g)| g)
        .collect())
}

/// Like [`enumerate_iso_classes_capped`], keeping the canonical codes.
pub fn enumerate_with_codes(
    genus: usize,
    boundary: usize,
    cap: usize,
) -> Result<Vec<(CanonicalCode, Graph)>, GraphError> {
    if !is_admissible(genus, boundary) {
        return Err(GraphError::Inadmissible { genus, boundary });
    }
    let edges = edge_count(genus, boundary);
    if edges > cap {
        return Err(GraphError::CapExceeded { edges, cap });
    }
    let trivalent = 2 * genus + boundary - 2;
    let mut slot_vertex = Vec::new();
    for v in 0..trivalent {
        slot_vertex.extend([v; 3]);
    }
    for v in trivalent..trivalent + boundary {
        slot_vertex.push(v);
    }
    let mut gen = Generator {
        genus,
        boundary,
        slot_vertex,
        degree: (0..trivalent + boundary)
            .map(|v| if v < trivalent { 3 } else { 1 })
            .collect(),
        partner: Vec::new(),
        classes: BTreeMap::new(),
    };
    gen.partner = vec![usize::MAX; gen.slot_vertex.len()];
    let mut pairs = Vec::with_capacity(edges);
    gen.run(&mut pairs);
    Ok(gen.classes.into_iter().collect())
}

struct Generator {
    genus: usize,
    boundary: usize,
    slot_vertex: Vec<usize>,
    degree: Vec<usize>,
    partner: Vec<usize>,
    classes: BTreeMap<CanonicalCode, Graph>,
}

impl Generator {
    fn run(&mut self, pairs: &mut Vec<(usize, usize)>) {
        let Some(s) = self.partner.iter().position(|&p| p == usize::MAX) else {
            let g = build(self.genus, self.boundary, &self.slot_vertex, pairs);
            if g.is_connected() {
                let code = canonical_labeling(&g, None).code;
                self.classes.entry(code).or_insert(g);
            }
            return;
        };
        let sv = self.slot_vertex[s];
        let mut tried_vertices: Vec<usize> = Vec::new();
        let mut tried_untouched_degrees: Vec<usize> = Vec::new();
        for t in s + 1..self.partner.len() {
            if self.partner[t] != usize::MAX {
                continue;
            }
            let tv = self.slot_vertex[t];
            if self.degree[sv] == 1 && self.degree[tv] == 1 {
                continue;
            }
            if tried_vertices.contains(&tv) {
                continue;
            }
            if tv != sv && self.untouched(tv) {
                if tried_untouched_degrees.contains(&self.degree[tv]) {
                    continue;
                }
                tried_untouched_degrees.push(self.degree[tv]);
            }
            tried_vertices.push(tv);
            self.partner[s] = t;
            self.partner[t] = s;
            pairs.push((s, t));
            self.run(pairs);
            pairs.pop();
            self.partner[s] = usize::MAX;
            self.partner[t] = usize::MAX;
        }
    }

    fn untouched(&self, v: usize) -> bool {
        self.slot_vertex
            .iter()
            .zip(&self.partner)
            .all(|(&w, &p)| w != v || p == usize::MAX)
    }
}

fn build(genus: usize, boundary: usize, slot_vertex: &[usize], pairs: &[(usize, usize)]) -> Graph {
    let vertices = slot_vertex.iter().max().map_or(0, |m| m + 1);
    let mut cells = vec![Vec::new(); vertices];
    for (k, &(s, t)) in pairs.iter().enumerate() {
        cells[slot_vertex[s]].push(Dart(2 * k));
        cells[slot_vertex[t]].push(Dart(2 * k + 1));
    }
    Graph::normalised(genus, boundary, 2 * pairs.len(), cells)
}
