//! Brute-force ground truth over (graph, automorphism) states.
//!
//! States are identified up to simultaneous relabeling by [`StateKey`]. The
//! generated equivalence is explored through single-orbit invariant families
//! ([`orbit_fmoves`]); every invariant family is a disjoint union of such
//! families applied one after another.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rayon::prelude::*;

use crate::automorphism::{automorphism_group, switch_darts, Automorphism};
use crate::canon::{canonical_labeling, CanonicalCode};
use crate::enumerate::{enumerate_with_codes, DEFAULT_EDGE_CAP};
use crate::error::OracleError;
use crate::fmove::{apply_edge_fmove, orbit_fmoves, transport, Coupling, FMoveSpec};
use crate::graph::{Dart, Graph};

pub const DEFAULT_BUDGET: usize = 10_000_000;
pub const DEFAULT_MAX_TREE_ENDS: usize = 6;

/// Canonical code of a graph together with an automorphism.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateKey(pub CanonicalCode);

impl StateKey {
    pub fn digest(&self) -> String {
        self.0.digest()
    }
}

pub fn state_key(graph: &Graph, phi: &Automorphism) -> StateKey {
    StateKey(canonical_labeling(graph, Some(phi.as_slice())).code)
}

/// One step of a witnessing chain: the move applied at `graph` with `phi`.
#[derive(Clone, Debug)]
pub struct ChainStep {
    pub graph: Graph,
    pub phi: Automorphism,
    pub fmove: FMoveSpec,
}

#[derive(Clone, Debug)]
pub enum Equivalence {
    /// Related by the chain of invariant moves (up to relabeling).
    Yes(Vec<ChainStep>),
    /// Definitely not related.
    No(String),
    /// Not found within the budget; says nothing either way.
    Inconclusive { explored: usize },
}

/// Searches for a chain of invariant moves from `(ga, phi)` to a state
/// isomorphic to `(gb, psi)`.
pub fn f_equivalent(
    ga: &Graph,
    phi: &Automorphism,
    gb: &Graph,
    psi: &Automorphism,
    budget: usize,
    max_tree_ends: usize,
) -> Equivalence {
    if (ga.genus(), ga.boundary()) != (gb.genus(), gb.boundary()) {
        return Equivalence::No("different (g,b)".into());
    }
    if phi.order() != psi.order() {
        return Equivalence::No(format!("orders {} and {} differ", phi.order(), psi.order()));
    }
    let target = state_key(gb, psi);
    let start = state_key(ga, phi);
    if start == target {
        return Equivalence::Yes(Vec::new());
    }
    let mut parent: BTreeMap<StateKey, Option<(StateKey, ChainStep)>> = BTreeMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([(start, ga.clone(), phi.clone())]);
    let mut explored = 0;
    while let Some((key, g, f)) = queue.pop_front() {
        for mv in orbit_fmoves(&g, &f, max_tree_ends, &|_| true) {
            explored += 1;
            if explored > budget {
                return Equivalence::Inconclusive { explored: budget };
            }
            let Ok((h, t)) = transport(&g, &f, &mv) else {
                continue;
            };
            let next = state_key(&h, &t);
            if parent.contains_key(&next) {
                continue;
            }
            let step = ChainStep {
                graph: g.clone(),
                phi: f.clone(),
                fmove: mv,
            };
            parent.insert(next.clone(), Some((key.clone(), step)));
            if next == target {
                let mut chain = Vec::new();
                let mut cur = next;
                while let Some(Some((prev, step))) = parent.get(&cur) {
                    chain.push(step.clone());
                    cur = prev.clone();
                }
                chain.reverse();
                return Equivalence::Yes(chain);
            }
            queue.push_back((next, h, t));
        }
    }
    if max_tree_ends >= ga.trivalent_count() + 2 {
        Equivalence::No("the whole equivalence class was explored".into())
    } else {
        Equivalence::Inconclusive { explored }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureReport {
    pub genus: usize,
    pub boundary: usize,
    pub graphs: usize,
    /// Keys of all automorphisms of all graphs in `G_{g,b}`.
    pub all: BTreeSet<StateKey>,
    /// Keys of the automorphisms reached by the closure.
    pub closure: BTreeSet<StateKey>,
    /// Number of classes of the invariant-move equivalence.
    pub move_classes: usize,
    /// Fixed-point rounds.
    pub rounds: usize,
    /// Transports evaluated.
    pub explored: usize,
}

impl ClosureReport {
    pub fn is_full(&self) -> bool {
        self.closure == self.all
    }
}

struct Universe {
    graphs: Vec<Graph>,
    groups: Vec<Vec<Automorphism>>,
    keys: Vec<Vec<StateKey>>,
}

fn universe(genus: usize, boundary: usize) -> Result<Universe, OracleError> {
    let graphs: Vec<Graph> = enumerate_with_codes(genus, boundary, DEFAULT_EDGE_CAP)?
        .into_iter()
        .map(|(_, g)| g)
        .collect();
    let groups: Vec<Vec<Automorphism>> = graphs
        .par_iter()
        .map(|g| automorphism_group(g).expect("enumerated graphs are valid"))
        .collect();
    let keys = graphs
        .par_iter()
        .zip(&groups)
        .map(|(g, group)| group.iter().map(|a| state_key(g, a)).collect())
        .collect();
    Ok(Universe { graphs, groups, keys })
}

/// The least set of automorphisms containing all switches of all graphs in
/// `G_{g,b}`, closed under composition within each graph and under one-step
/// invariant moves with at most `max_tree_ends` free ends per tree.
pub fn closure_e(
    genus: usize,
    boundary: usize,
    budget: usize,
    max_tree_ends: usize,
) -> Result<ClosureReport, OracleError> {
    let u = universe(genus, boundary)?;
    let mut index: BTreeMap<StateKey, usize> = BTreeMap::new();
    for keys in &u.keys {
        for k in keys {
            let next = index.len();
            index.entry(k.clone()).or_insert(next);
        }
    }
    let n = index.len();
    let mut classes = UnionFind::new(n);
    let work: Vec<(usize, usize)> = (0..u.graphs.len())
        .flat_map(|i| (0..u.groups[i].len()).map(move |j| (i, j)))
        .collect();
    let moves: Vec<Vec<StateKey>> = work
        .par_iter()
        .map(|&(i, j)| {
            let (g, phi) = (&u.graphs[i], &u.groups[i][j]);
            orbit_fmoves(g, phi, max_tree_ends, &|_| true)
                .iter()
                .filter_map(|mv| transport(g, phi, mv).ok())
                .map(|(h, psi)| state_key(&h, &psi))
                .collect()
        })
        .collect();
    let explored: usize = moves.iter().map(Vec::len).sum();
    if explored > budget {
        return Err(OracleError::Saturation { budget });
    }
    for (&(i, j), targets) in work.iter().zip(&moves) {
        let a = index[&u.keys[i][j]];
        for t in targets {
            classes.union(a, index[t]);
        }
    }

    let mut in_e = vec![false; n];
    for (i, g) in u.graphs.iter().enumerate() {
        for s in all_switches(g) {
            let pos = u.groups[i].binary_search(&s).expect("switches are automorphisms");
            in_e[index[&u.keys[i][pos]]] = true;
        }
    }
    let mut rounds = 0;
    loop {
        rounds += 1;
        let before = in_e.iter().filter(|&&x| x).count();
        for i in 0..u.graphs.len() {
            let members: Vec<usize> = (0..u.groups[i].len()).filter(|&j| in_e[index[&u.keys[i][j]]]).collect();
            for j in generated(&u.groups[i], &members) {
                in_e[index[&u.keys[i][j]]] = true;
            }
        }
        let mut class_in_e = vec![false; n];
        for s in 0..n {
            if in_e[s] {
                class_in_e[classes.find(s)] = true;
            }
        }
        for s in 0..n {
            if class_in_e[classes.find(s)] {
                in_e[s] = true;
            }
        }
        if in_e.iter().filter(|&&x| x).count() == before {
            break;
        }
    }
    let mut move_classes: Vec<usize> = (0..n).map(|s| classes.find(s)).collect();
    move_classes.sort_unstable();
    move_classes.dedup();
    let all: BTreeSet<StateKey> = index.keys().cloned().collect();
    let closure = index.iter().filter(|(_, &s)| in_e[s]).map(|(k, _)| k.clone()).collect();
    Ok(ClosureReport {
        genus,
        boundary,
        graphs: u.graphs.len(),
        all,
        closure,
        move_classes: move_classes.len(),
        rounds,
        explored,
    })
}

/// The smallest bound among 4, 5, 6 for which the closure is full, if any.
pub fn smallest_sufficient_bound(genus: usize, boundary: usize, budget: usize) -> Result<Option<usize>, OracleError> {
    for bound in 4..=DEFAULT_MAX_TREE_ENDS {
        if closure_e(genus, boundary, budget, bound)?.is_full() {
            return Ok(Some(bound));
        }
    }
    Ok(None)
}

/// Every switch of a graph.
pub fn all_switches(graph: &Graph) -> Vec<Automorphism> {
    let mut out = Vec::new();
    for v in graph.vertices() {
        let cell = graph.cell(v);
        if cell.len() != 3 {
            continue;
        }
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            if let Ok((s, _)) = switch_darts(graph, cell[a], cell[b]) {
                out.push(s);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Indices (into the sorted `group`) of the subgroup generated by `members`.
fn generated(group: &[Automorphism], members: &[usize]) -> Vec<usize> {
    let mut have: BTreeSet<usize> = members.iter().copied().collect();
    let mut frontier: Vec<usize> = members.to_vec();
    while let Some(a) = frontier.pop() {
        for &b in members {
            let c = group[a].compose(&group[b]).expect("same graph");
            let k = group.binary_search(&c).expect("closed group");
            if have.insert(k) {
                frontier.push(k);
            }
        }
    }
    have.into_iter().collect()
}

/// Classes of `G_{g,b}` connected by elementary edge moves; each component
/// lists canonical codes in increasing order, components sorted.
pub fn move_graph_components(genus: usize, boundary: usize) -> Result<Vec<Vec<CanonicalCode>>, OracleError> {
    let classes = enumerate_with_codes(genus, boundary, DEFAULT_EDGE_CAP)?;
    let index: BTreeMap<&CanonicalCode, usize> = classes.iter().enumerate().map(|(i, (c, _))| (c, i)).collect();
    let mut uf = UnionFind::new(classes.len());
    for (i, (_, g)) in classes.iter().enumerate() {
        for e in g.edges() {
            if !g.is_movable_edge(e) {
                continue;
            }
            for c in [Coupling::Parallel, Coupling::Crossed] {
                let (h, _) = apply_edge_fmove(g, e, c).expect("movable edge");
                let code = canonical_labeling(&h, None).code;
                uf.union(i, index[&code]);
            }
        }
    }
    let mut components: BTreeMap<usize, Vec<CanonicalCode>> = BTreeMap::new();
    for (i, (c, _)) in classes.iter().enumerate() {
        components.entry(uf.find(i)).or_default().push(c.clone());
    }
    let mut out: Vec<Vec<CanonicalCode>> = components.into_values().collect();
    out.sort();
    Ok(out)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// A graph with each of its automorphisms and their state keys.
pub type KeyedGraph = (Graph, Vec<(Automorphism, StateKey)>);

/// Keys of all automorphisms of all graphs of `G_{g,b}`, grouped by graph.
pub fn all_state_keys(genus: usize, boundary: usize) -> Result<Vec<KeyedGraph>, OracleError> {
    let u = universe(genus, boundary)?;
    Ok(u.graphs
        .into_iter()
        .zip(u.groups.into_iter().zip(u.keys))
        .map(|(g, (group, keys))| (g, group.into_iter().zip(keys).collect()))
        .collect())
}

/// Dart relabeling helper for tests: the key is invariant under it.
pub fn relabel_state(graph: &Graph, phi: &Automorphism, map: &[Dart]) -> (Graph, Automorphism) {
    let g = graph.relabeled(map).expect("relabeling respects edges");
    let mut inv = vec![Dart(0); map.len()];
    for (i, &d) in map.iter().enumerate() {
        inv[d.0] = Dart(i);
    }
    let m = (0..map.len()).map(|d| map[phi.apply(inv[d]).0]).collect();
    (g, Automorphism::from_map_unchecked(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn reflexive_and_one_step() {
        let g = samples::four_leaf_tree();
        let group = automorphism_group(&g).unwrap();
        let phi = &group[3];
        assert!(matches!(
            f_equivalent(&g, phi, &g, phi, 100, 4),
            Equivalence::Yes(ref c) if c.is_empty()
        ));
        let g = samples::necklace(2);
        let id = Automorphism::identity(g.num_darts());
        let code = canonical_labeling(&g, None).code;
        let (h, t) = orbit_fmoves(&g, &id, 4, &|_| true)
            .iter()
            .map(|mv| transport(&g, &id, mv).unwrap())
            .find(|(h, _)| canonical_labeling(h, None).code != code)
            .unwrap();
        match f_equivalent(&g, &id, &h, &t, 1000, 4) {
            Equivalence::Yes(chain) => assert_eq!(chain.len(), 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn order_prefilter_is_definitive() {
        let g = samples::theta();
        let group = automorphism_group(&g).unwrap();
        let a = group.iter().find(|a| a.order() == 2).unwrap();
        let b = group.iter().find(|a| a.order() == 3).unwrap();
        assert!(matches!(f_equivalent(&g, a, &g, b, 10, 6), Equivalence::No(_)));
        let t = samples::tripod();
        let id = Automorphism::identity(t.num_darts());
        assert!(matches!(
            f_equivalent(&g, &Automorphism::identity(6), &t, &id, 10, 6),
            Equivalence::No(_)
        ));
    }

    #[test]
    fn key_is_relabeling_invariant() {
        let g = samples::theta();
        let map: Vec<Dart> = [5, 4, 0, 1, 3, 2].into_iter().map(Dart).collect();
        for phi in automorphism_group(&g).unwrap() {
            let (h, psi) = relabel_state(&g, &phi, &map);
            assert!(psi.is_automorphism_of(&h));
            assert_eq!(state_key(&g, &phi), state_key(&h, &psi));
        }
    }

    #[test]
    fn closure_of_the_tripod_is_everything() {
        let r = closure_e(0, 3, DEFAULT_BUDGET, 6).unwrap();
        assert_eq!(r.all.len(), 3);
        assert!(r.is_full());
    }

    #[test]
    fn closure_in_genus_two_and_loop_with_tail() {
        assert!(closure_e(2, 0, DEFAULT_BUDGET, 6).unwrap().is_full());
        let r = closure_e(1, 1, DEFAULT_BUDGET, 6).unwrap();
        assert_eq!(r.all.len(), 2);
        assert!(r.is_full());
    }

    #[test]
    fn tiny_budget_saturates() {
        assert!(matches!(closure_e(2, 0, 1, 6), Err(OracleError::Saturation { .. })));
    }

    #[test]
    fn move_graph_examples() {
        assert_eq!(move_graph_components(2, 0).unwrap().len(), 1);
        assert_eq!(move_graph_components(2, 0).unwrap()[0].len(), 2);
        assert_eq!(move_graph_components(0, 4).unwrap().len(), 1);
        assert_eq!(move_graph_components(1, 2).unwrap().len(), 1);
    }
}
