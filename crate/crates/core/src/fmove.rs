//! F-moves: replacing disjoint subtrees by other trees on the same free ends,
//! and transporting automorphisms across such replacements.
//!
//! A subtree is given by its *core*: a set of internal edges forming a tree
//! on distinct trivalent vertices. Its *ports* are the remaining darts at the
//! core vertices; they stand for the free ends. A replacement keeps every
//! dart (core edges keep their ids) and only re-partitions the darts at the
//! core vertices into new trivalent cells.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::automorphism::Automorphism;
use crate::error::{MoveError, NotInvariant};
use crate::graph::{Dart, EdgeId, Graph, VertexId};

/// A complete binary coupling of port darts. The root is suppressed when the
/// expression is read as an unrooted tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CouplingTree {
    Leaf(Dart),
    Join(Box<CouplingTree>, Box<CouplingTree>),
}

impl CouplingTree {
    pub fn join(a: CouplingTree, b: CouplingTree) -> CouplingTree {
        CouplingTree::Join(Box::new(a), Box::new(b))
    }

    pub fn leaves(&self) -> Vec<Dart> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<Dart>) {
        match self {
            CouplingTree::Leaf(d) => out.push(*d),
            CouplingTree::Join(a, b) => {
                a.collect_leaves(out);
                b.collect_leaves(out);
            }
        }
    }

    fn min_leaf(&self) -> Dart {
        match self {
            CouplingTree::Leaf(d) => *d,
            CouplingTree::Join(a, b) => a.min_leaf().min(b.min_leaf()),
        }
    }

    pub fn map_leaves(&self, f: &impl Fn(Dart) -> Dart) -> CouplingTree {
        match self {
            CouplingTree::Leaf(d) => CouplingTree::Leaf(f(*d)),
            CouplingTree::Join(a, b) => CouplingTree::join(a.map_leaves(f), b.map_leaves(f)),
        }
    }

    /// The representative of the unrooted tree: rooted at the edge of the
    /// smallest leaf, children ordered by smallest leaf.
    pub fn canonical(&self) -> Result<CouplingTree, MoveError> {
        let leaves = self.leaves();
        if leaves.len() < 4 {
            return Err(MoveError::BadReplacement(format!(
                "a coupling needs at least 4 free ends, got {}",
                leaves.len()
            )));
        }
        let mut unique = leaves.clone();
        unique.sort_unstable();
        unique.dedup();
        if unique.len() != leaves.len() {
            return Err(MoveError::BadReplacement("repeated free end in coupling".into()));
        }
        let CouplingTree::Join(a, b) = self else {
            unreachable!("at least four leaves")
        };
        let mut tree = Unrooted::default();
        let x = tree.add_expr(a);
        let y = tree.add_expr(b);
        tree.link(x, y);
        Ok(tree.canonical())
    }

    /// Leaf sets cut off by the internal edges, each taken on the side away
    /// from the smallest leaf. Two couplings describe the same unrooted tree
    /// iff their split sets agree.
    pub fn splits(&self) -> BTreeSet<Vec<Dart>> {
        let canonical = self.canonical().expect("valid coupling");
        let mut out = BTreeSet::new();
        if let CouplingTree::Join(_, rest) = &canonical {
            if let CouplingTree::Join(a, b) = rest.as_ref() {
                a.inner_splits(&mut out);
                b.inner_splits(&mut out);
            }
        }
        out
    }

    fn inner_splits(&self, out: &mut BTreeSet<Vec<Dart>>) {
        if let CouplingTree::Join(a, b) = self {
            let mut leaves = self.leaves();
            leaves.sort_unstable();
            out.insert(leaves);
            a.inner_splits(out);
            b.inner_splits(out);
        }
    }
}

impl fmt::Display for CouplingTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CouplingTree::Leaf(d) => write!(f, "{d}"),
            CouplingTree::Join(a, b) => write!(f, "({a} {b})"),
        }
    }
}

/// Unrooted tree whose leaves carry darts and whose inner nodes are trivalent.
#[derive(Default)]
struct Unrooted {
    adj: Vec<Vec<usize>>,
    leaf: Vec<Option<Dart>>,
}

impl Unrooted {
    fn node(&mut self, leaf: Option<Dart>) -> usize {
        self.adj.push(Vec::new());
        self.leaf.push(leaf);
        self.adj.len() - 1
    }

    fn link(&mut self, a: usize, b: usize) {
        self.adj[a].push(b);
        self.adj[b].push(a);
    }

    fn add_expr(&mut self, e: &CouplingTree) -> usize {
        match e {
            CouplingTree::Leaf(d) => self.node(Some(*d)),
            CouplingTree::Join(a, b) => {
                let n = self.node(None);
                let x = self.add_expr(a);
                let y = self.add_expr(b);
                self.link(n, x);
                self.link(n, y);
                n
            }
        }
    }

    fn canonical(&self) -> CouplingTree {
        let start = (0..self.adj.len())
            .filter(|&n| self.leaf[n].is_some())
            .min_by_key(|&n| self.leaf[n])
            .expect("tree has leaves");
        let inner = self.adj[start][0];
        CouplingTree::join(CouplingTree::Leaf(self.leaf[start].unwrap()), self.rooted(inner, start))
    }

    fn rooted(&self, n: usize, parent: usize) -> CouplingTree {
        if let Some(d) = self.leaf[n] {
            return CouplingTree::Leaf(d);
        }
        let mut children: Vec<CouplingTree> = self.adj[n]
            .iter()
            .filter(|&&c| c != parent)
            .map(|&c| self.rooted(c, n))
            .collect();
        children.sort_by_key(|c| c.min_leaf());
        let b = children.pop().expect("trivalent node");
        let a = children.pop().expect("trivalent node");
        CouplingTree::join(a, b)
    }
}

/// A subtree of a graph, given by its core edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subtree {
    pub edges: Vec<EdgeId>,
    pub vertices: Vec<VertexId>,
    /// Darts at the core vertices that are not core darts, sorted.
    pub ports: Vec<Dart>,
}

impl Subtree {
    /// Number of free ends.
    pub fn ends(&self) -> usize {
        self.ports.len()
    }

    fn core_darts(&self) -> Vec<Dart> {
        self.edges.iter().flat_map(|e| e.darts()).collect()
    }
}

/// Checks that `edges` is the core of a subtree of `graph`.
pub fn subtree(graph: &Graph, edges: &[EdgeId]) -> Result<Subtree, MoveError> {
    let mut edges = edges.to_vec();
    edges.sort_unstable();
    edges.dedup();
    if edges.is_empty() {
        return Err(MoveError::BadTree("empty core".into()));
    }
    for &e in &edges {
        if !graph.contains_edge(e) {
            return Err(MoveError::BadTree(format!("unknown edge {e}")));
        }
        let (a, b) = graph.ends(e);
        if a == b {
            return Err(MoveError::LoopEdge(e.0));
        }
        if !graph.is_trivalent(a) || !graph.is_trivalent(b) {
            return Err(MoveError::TerminalEdge(e.0));
        }
    }
    let mut vertices: Vec<VertexId> = edges
        .iter()
        .flat_map(|&e| {
            let (a, b) = graph.ends(e);
            [a, b]
        })
        .collect();
    vertices.sort_unstable();
    vertices.dedup();
    if vertices.len() != edges.len() + 1 {
        return Err(MoveError::BadTree("core edges contain a cycle".into()));
    }
    // connectivity of the core
    let mut reached = vec![vertices[0]];
    let mut grew = true;
    while grew {
        grew = false;
        for &e in &edges {
            let (a, b) = graph.ends(e);
            if reached.contains(&a) != reached.contains(&b) {
                reached.push(if reached.contains(&a) { b } else { a });
                grew = true;
            }
        }
    }
    if reached.len() != vertices.len() {
        return Err(MoveError::BadTree("core edges are not connected".into()));
    }
    let core: BTreeSet<Dart> = edges.iter().flat_map(|e| e.darts()).collect();
    let mut ports: Vec<Dart> = vertices
        .iter()
        .flat_map(|&v| graph.cell(v).iter().copied())
        .filter(|d| !core.contains(d))
        .collect();
    ports.sort_unstable();
    Ok(Subtree { edges, vertices, ports })
}

/// One tree replacement: the core edges and the new cells on the darts of
/// the core vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Replacement {
    pub core: Vec<EdgeId>,
    pub cells: Vec<[Dart; 3]>,
}

impl Replacement {
    /// Replacement of the subtree with core `core` by the tree described by
    /// `coupling` over its ports. Core darts are assigned canonically.
    pub fn new(graph: &Graph, core: &[EdgeId], coupling: &CouplingTree) -> Result<Replacement, MoveError> {
        let tree = subtree(graph, core)?;
        let mut leaves = coupling.leaves();
        leaves.sort_unstable();
        if leaves != tree.ports {
            return Err(MoveError::BadReplacement(format!(
                "free ends {:?} do not match the ports {:?}",
                leaves.iter().map(|d| d.0).collect::<Vec<_>>(),
                tree.ports.iter().map(|d| d.0).collect::<Vec<_>>()
            )));
        }
        let canonical = coupling.canonical()?;
        let cells = compile(&canonical, &tree.edges);
        let r = Replacement {
            core: tree.edges.clone(),
            cells: normalise_cells(cells),
        };
        r.check_against(graph, &tree)?;
        Ok(r)
    }

    /// Replacement given by explicit cells.
    pub fn from_cells(graph: &Graph, core: &[EdgeId], cells: Vec<[Dart; 3]>) -> Result<Replacement, MoveError> {
        let tree = subtree(graph, core)?;
        let r = Replacement {
            core: tree.edges.clone(),
            cells: normalise_cells(cells),
        };
        r.check_against(graph, &tree)?;
        Ok(r)
    }

    fn check_against(&self, graph: &Graph, tree: &Subtree) -> Result<(), MoveError> {
        if self.cells.len() != tree.vertices.len() {
            return Err(MoveError::BadReplacement(format!(
                "{} cells for {} core vertices",
                self.cells.len(),
                tree.vertices.len()
            )));
        }
        let mut darts: Vec<Dart> = self.cells.iter().flatten().copied().collect();
        darts.sort_unstable();
        let mut expected: Vec<Dart> = tree.ports.iter().copied().chain(tree.core_darts()).collect();
        expected.sort_unstable();
        if darts != expected {
            return Err(MoveError::BadReplacement(
                "cells must partition the ports and core darts".into(),
            ));
        }
        // k core edges joining k + 1 cells: a tree iff connected
        let cell_of = |d: Dart| self.cells.iter().position(|c| c.contains(&d)).expect("covered");
        let mut reached = vec![0usize];
        let mut i = 0;
        while i < reached.len() {
            let c = reached[i];
            for &d in &self.cells[c] {
                if self.core.contains(&d.edge()) {
                    let other = cell_of(d.pair());
                    if !reached.contains(&other) {
                        reached.push(other);
                    }
                }
            }
            i += 1;
        }
        if reached.len() != self.cells.len() {
            return Err(MoveError::BadReplacement("replacement is not a tree".into()));
        }
        let old = old_cells(graph, tree);
        if tree_splits(&old, &tree.ports) == tree_splits(&self.cells, &tree.ports) {
            return Err(MoveError::Unchanged);
        }
        Ok(())
    }

    /// The replacement tree as a canonical coupling of its ports.
    pub fn coupling(&self) -> CouplingTree {
        let core: BTreeSet<EdgeId> = self.core.iter().copied().collect();
        unrooted_from_cells(&self.cells, &core).canonical()
    }

    pub fn core_darts(&self) -> Vec<Dart> {
        self.core.iter().flat_map(|e| e.darts()).collect()
    }

    pub fn ports(&self) -> Vec<Dart> {
        let core: BTreeSet<EdgeId> = self.core.iter().copied().collect();
        let mut ports: Vec<Dart> = self
            .cells
            .iter()
            .flatten()
            .copied()
            .filter(|d| !core.contains(&d.edge()))
            .collect();
        ports.sort_unstable();
        ports
    }
}

fn normalise_cells(cells: Vec<[Dart; 3]>) -> Vec<[Dart; 3]> {
    let mut cells: Vec<[Dart; 3]> = cells
        .into_iter()
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    cells.sort_unstable();
    cells
}

fn old_cells(graph: &Graph, tree: &Subtree) -> Vec<[Dart; 3]> {
    tree.vertices
        .iter()
        .map(|&v| {
            let c = graph.cell(v);
            [c[0], c[1], c[2]]
        })
        .collect()
}

fn unrooted_from_cells(cells: &[[Dart; 3]], core: &BTreeSet<EdgeId>) -> Unrooted {
    let mut tree = Unrooted::default();
    for _ in cells {
        tree.node(None);
    }
    let cell_of = |d: Dart| cells.iter().position(|c| c.contains(&d)).expect("covered");
    for (i, cell) in cells.iter().enumerate() {
        for &d in cell {
            if core.contains(&d.edge()) {
                if d < d.pair() {
                    tree.link(i, cell_of(d.pair()));
                }
            } else {
                let leaf = tree.node(Some(d));
                tree.link(i, leaf);
            }
        }
    }
    tree
}

fn tree_splits(cells: &[[Dart; 3]], ports: &[Dart]) -> BTreeSet<Vec<Dart>> {
    let core: BTreeSet<EdgeId> = cells
        .iter()
        .flatten()
        .filter(|d| !ports.contains(d))
        .map(|d| d.edge())
        .collect();
    unrooted_from_cells(cells, &core).canonical().splits()
}

/// Cells of the tree described by a canonical coupling, using `core` (sorted)
/// for the inner edges in preorder; the dart `2e` sits on the parent side.
fn compile(canonical: &CouplingTree, core: &[EdgeId]) -> Vec<[Dart; 3]> {
    let CouplingTree::Join(first, rest) = canonical else {
        unreachable!("canonical couplings are joins")
    };
    let CouplingTree::Leaf(p) = first.as_ref() else {
        unreachable!("canonical couplings start with a leaf")
    };
    let mut cells = Vec::new();
    let mut next = 0;
    compile_node(rest, *p, core, &mut next, &mut cells);
    cells
}

fn compile_node(node: &CouplingTree, parent_link: Dart, core: &[EdgeId], next: &mut usize, cells: &mut Vec<[Dart; 3]>) {
    let CouplingTree::Join(a, b) = node else {
        unreachable!("inner nodes are joins")
    };
    let mut cell = [parent_link, Dart(0), Dart(0)];
    let mut pending = Vec::new();
    for (slot, child) in [a, b].into_iter().enumerate() {
        cell[slot + 1] = match child.as_ref() {
            CouplingTree::Leaf(d) => *d,
            join => {
                let [down, up] = core[*next].darts();
                *next += 1;
                pending.push((join, up));
                down
            }
        };
    }
    cells.push(cell);
    for (child, up) in pending {
        compile_node(child, up, core, next, cells);
    }
}

/// A family of replacements on subtrees with pairwise disjoint cores.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FMoveSpec {
    pub replacements: Vec<Replacement>,
}

impl FMoveSpec {
    pub fn new(mut replacements: Vec<Replacement>) -> FMoveSpec {
        replacements.sort();
        FMoveSpec { replacements }
    }

    pub fn is_empty(&self) -> bool {
        self.replacements.is_empty()
    }

    /// Checks the family against `graph`, returning its subtrees.
    pub fn check(&self, graph: &Graph) -> Result<Vec<Subtree>, MoveError> {
        let mut trees = Vec::with_capacity(self.replacements.len());
        for r in &self.replacements {
            let tree = subtree(graph, &r.core)?;
            r.check_against(graph, &tree)?;
            trees.push(tree);
        }
        for i in 0..trees.len() {
            for j in i + 1..trees.len() {
                if trees[i].vertices.iter().any(|v| trees[j].vertices.contains(v)) {
                    return Err(MoveError::Overlap(i, j));
                }
            }
        }
        Ok(trees)
    }

    /// The move undoing this one on `graph` (whose cells it restores).
    pub fn inverse(&self, graph: &Graph) -> Result<FMoveSpec, MoveError> {
        let trees = self.check(graph)?;
        let replacements = trees
            .iter()
            .map(|t| Replacement {
                core: t.edges.clone(),
                cells: normalise_cells(old_cells(graph, t)),
            })
            .collect();
        Ok(FMoveSpec::new(replacements))
    }

    /// Number of free ends of the largest tree.
    pub fn max_ends(&self) -> usize {
        self.replacements.iter().map(|r| r.core.len() + 3).max().unwrap_or(0)
    }
}

/// The part of the graph a move left untouched.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCorrespondence {
    /// Core edges `e`, each replaced by the new edge `e′` with the same id.
    pub replaced: Vec<EdgeId>,
    /// Image of each vertex outside the cores; `None` for core vertices.
    pub vertex_map: Vec<Option<VertexId>>,
}

impl EdgeCorrespondence {
    /// Edge ids are stable: every edge corresponds to the edge with its id.
    pub fn edge(&self, e: EdgeId) -> EdgeId {
        e
    }
}

pub fn apply_fmove(graph: &Graph, spec: &FMoveSpec) -> Result<(Graph, EdgeCorrespondence), MoveError> {
    let trees = spec.check(graph)?;
    let core_vertices: BTreeSet<VertexId> = trees.iter().flat_map(|t| t.vertices.iter().copied()).collect();
    let mut cells: Vec<Vec<Dart>> = graph
        .vertices()
        .filter(|v| !core_vertices.contains(v))
        .map(|v| graph.cell(v).to_vec())
        .collect();
    for r in &spec.replacements {
        cells.extend(r.cells.iter().map(|c| c.to_vec()));
    }
    let result = graph.with_cells(cells);
    let vertex_map = graph
        .vertices()
        .map(|v| (!core_vertices.contains(&v)).then(|| result.vertex(graph.cell(v)[0])))
        .collect();
    let mut replaced: Vec<EdgeId> = spec.replacements.iter().flat_map(|r| r.core.iter().copied()).collect();
    replaced.sort_unstable();
    Ok((result, EdgeCorrespondence { replaced, vertex_map }))
}

/// Target pairing of the four outer darts of an edge move. With `p1 < p2`
/// the ports at the end of dart `2e` and `q1 < q2` those at the other end:
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coupling {
    /// `{p1, q1}`, `{p2, q2}`.
    Parallel,
    /// `{p1, q2}`, `{p2, q1}`.
    Crossed,
}

/// The elementary move on a single edge as a one-tree family.
pub fn edge_fmove(graph: &Graph, e: EdgeId, coupling: Coupling) -> Result<FMoveSpec, MoveError> {
    if !graph.contains_edge(e) {
        return Err(MoveError::BadTree(format!("unknown edge {e}")));
    }
    let [d0, d1] = e.darts();
    let (x, y) = graph.ends(e);
    if x == y {
        return Err(MoveError::LoopEdge(e.0));
    }
    if !graph.is_trivalent(x) || !graph.is_trivalent(y) {
        return Err(MoveError::TerminalEdge(e.0));
    }
    let p: Vec<Dart> = graph.mates(d0).collect();
    let q: Vec<Dart> = graph.mates(d1).collect();
    let (a, b) = match coupling {
        Coupling::Parallel => ((p[0], q[0]), (p[1], q[1])),
        Coupling::Crossed => ((p[0], q[1]), (p[1], q[0])),
    };
    let expr = CouplingTree::join(
        CouplingTree::join(CouplingTree::Leaf(a.0), CouplingTree::Leaf(a.1)),
        CouplingTree::join(CouplingTree::Leaf(b.0), CouplingTree::Leaf(b.1)),
    );
    Ok(FMoveSpec::new(vec![Replacement::new(graph, &[e], &expr)?]))
}

pub fn apply_edge_fmove(
    graph: &Graph,
    e: EdgeId,
    coupling: Coupling,
) -> Result<(Graph, EdgeCorrespondence), MoveError> {
    apply_fmove(graph, &edge_fmove(graph, e, coupling)?)
}

/// Transports `phi` across the move: the unique automorphism of the new
/// graph agreeing with `phi` outside the replaced trees.
pub fn transport(graph: &Graph, phi: &Automorphism, spec: &FMoveSpec) -> Result<(Graph, Automorphism), NotInvariant> {
    let trees = spec.check(graph)?;
    let (target, _) = apply_fmove(graph, spec)?;
    let cores: Vec<BTreeSet<EdgeId>> = spec
        .replacements
        .iter()
        .map(|r| r.core.iter().copied().collect())
        .collect();
    let mut image_of = Vec::with_capacity(cores.len());
    for core in &cores {
        let image: BTreeSet<EdgeId> = core.iter().map(|&e| phi.apply_edge(e)).collect();
        match cores.iter().position(|c| *c == image) {
            Some(j) => image_of.push(j),
            None => return Err(NotInvariant::Family),
        }
    }
    let mut map: Vec<Dart> = phi.as_slice().to_vec();
    for (i, r) in spec.replacements.iter().enumerate() {
        let j = image_of[i];
        let src_sides = core_sides(&r.cells, &cores[i]);
        let dst_sides: BTreeMap<Vec<Dart>, Dart> = core_sides(&spec.replacements[j].cells, &cores[j])
            .into_iter()
            .map(|(d, side)| (side, d))
            .collect();
        for (d, side) in src_sides {
            let mut image: Vec<Dart> = side.iter().map(|&p| phi.apply(p)).collect();
            image.sort_unstable();
            match dst_sides.get(&image) {
                Some(&t) => map[d.0] = t,
                None => return Err(NotInvariant::NoExtension(i)),
            }
        }
        debug_assert_eq!(trees[i].ports, r.ports());
    }
    let result = Automorphism::from_map_unchecked(map);
    if result.check(&target).is_err() {
        return Err(NotInvariant::NoExtension(0));
    }
    Ok((target, result))
}

/// For each core dart of a replacement tree, the ports on its side.
fn core_sides(cells: &[[Dart; 3]], core: &BTreeSet<EdgeId>) -> Vec<(Dart, Vec<Dart>)> {
    let cell_of = |d: Dart| cells.iter().position(|c| c.contains(&d)).expect("covered");
    let mut out = Vec::new();
    for cell in cells {
        for &d in cell {
            if !core.contains(&d.edge()) {
                continue;
            }
            // ports reachable from the cell of d without crossing d's edge
            let mut side = Vec::new();
            let mut stack = vec![(cell_of(d), d.edge())];
            let mut seen = vec![false; cells.len()];
            seen[cell_of(d)] = true;
            while let Some((c, via)) = stack.pop() {
                for &x in &cells[c] {
                    if !core.contains(&x.edge()) {
                        side.push(x);
                    } else if x.edge() != via {
                        let next = cell_of(x.pair());
                        if !seen[next] {
                            seen[next] = true;
                            stack.push((next, x.edge()));
                        }
                    }
                }
            }
            side.sort_unstable();
            out.push((d, side));
        }
    }
    out
}

/// Cores of subtrees with at most `max_edges` edges, all edges satisfying
/// `allowed`, sorted.
pub fn subtree_cores(graph: &Graph, max_edges: usize, allowed: &impl Fn(EdgeId) -> bool) -> Vec<Vec<EdgeId>> {
    let movable: Vec<EdgeId> = graph
        .edges()
        .filter(|&e| graph.is_movable_edge(e) && allowed(e))
        .collect();
    let mut found: BTreeSet<Vec<EdgeId>> = BTreeSet::new();
    let mut frontier: Vec<Vec<EdgeId>> = movable.iter().map(|&e| vec![e]).collect();
    while let Some(core) = frontier.pop() {
        if !found.insert(core.clone()) || core.len() == max_edges {
            continue;
        }
        let vertices: BTreeSet<VertexId> = core
            .iter()
            .flat_map(|&e| {
                let (a, b) = graph.ends(e);
                [a, b]
            })
            .collect();
        for &e in &movable {
            if core.contains(&e) {
                continue;
            }
            let (a, b) = graph.ends(e);
            // exactly one new vertex keeps the core a tree
            if vertices.contains(&a) != vertices.contains(&b) {
                let mut grown = core.clone();
                grown.push(e);
                grown.sort_unstable();
                if !found.contains(&grown) {
                    frontier.push(grown);
                }
            }
        }
    }
    found.into_iter().filter(|c| c.len() <= max_edges).collect()
}

/// All canonical couplings (unrooted trivalent trees) on `ports`, `|ports| ≥ 4`.
pub fn all_couplings(ports: &[Dart]) -> Vec<CouplingTree> {
    let mut ports = ports.to_vec();
    ports.sort_unstable();
    let (first, rest) = ports.split_first().expect("non-empty");
    let mut rooted = vec![CouplingTree::Leaf(rest[0])];
    for &leaf in &rest[1..] {
        rooted = rooted.iter().flat_map(|t| insert_leaf(t, leaf)).collect();
    }
    let mut out: Vec<CouplingTree> = rooted
        .into_iter()
        .map(|t| {
            CouplingTree::join(CouplingTree::Leaf(*first), t)
                .canonical()
                .expect("valid")
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

fn insert_leaf(t: &CouplingTree, leaf: Dart) -> Vec<CouplingTree> {
    let mut out = vec![CouplingTree::join(t.clone(), CouplingTree::Leaf(leaf))];
    if let CouplingTree::Join(a, b) = t {
        for x in insert_leaf(a, leaf) {
            out.push(CouplingTree::join(x, (**b).clone()));
        }
        for y in insert_leaf(b, leaf) {
            out.push(CouplingTree::join((**a).clone(), y));
        }
    }
    out
}

/// The `phi`-invariant families consisting of a single orbit of trees, each
/// with at most `max_tree_ends` free ends and only `allowed` core edges.
/// Every invariant family is a disjoint union of such families.
pub fn orbit_fmoves(
    graph: &Graph,
    phi: &Automorphism,
    max_tree_ends: usize,
    allowed: &impl Fn(EdgeId) -> bool,
) -> Vec<FMoveSpec> {
    if max_tree_ends < 4 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for core in subtree_cores(graph, max_tree_ends - 3, allowed) {
        // the orbit of the core; skip unless `core` is its least member
        let mut orbit = vec![core.clone()];
        loop {
            let mut next: Vec<EdgeId> = orbit.last().unwrap().iter().map(|&e| phi.apply_edge(e)).collect();
            next.sort_unstable();
            if next == core {
                break;
            }
            orbit.push(next);
        }
        if orbit.iter().any(|c| *c < core) {
            continue;
        }
        let trees: Vec<Subtree> = orbit.iter().map(|c| subtree(graph, c).expect("core")).collect();
        let disjoint = (0..trees.len())
            .all(|i| (i + 1..trees.len()).all(|j| trees[i].vertices.iter().all(|v| !trees[j].vertices.contains(v))));
        if !disjoint {
            continue;
        }
        let stabiliser = phi.pow(orbit.len() as i64);
        let current = tree_splits(&old_cells(graph, &trees[0]), &trees[0].ports);
        for shape in all_couplings(&trees[0].ports) {
            let splits = shape.splits();
            if splits == current {
                continue;
            }
            if shape.map_leaves(&|d| stabiliser.apply(d)).splits() != splits {
                continue;
            }
            let mut replacements = Vec::with_capacity(orbit.len());
            let mut power = Automorphism::identity(graph.num_darts());
            for c in &orbit {
                let image = shape.map_leaves(&|d| power.apply(d));
                replacements.push(Replacement::new(graph, c, &image).expect("invariant replacement"));
                power = phi.compose(&power).expect("same graph");
            }
            out.push(FMoveSpec::new(replacements));
        }
    }
    out.sort();
    out
}

/// All `phi`-invariant families of tree replacements with at most
/// `max_tree_ends` free ends per tree: the unions of compatible single-orbit
/// families.
pub fn enumerate_invariant_fmoves(graph: &Graph, phi: &Automorphism, max_tree_ends: usize) -> Vec<FMoveSpec> {
    let generators = orbit_fmoves(graph, phi, max_tree_ends, &|_| true);
    let vertex_sets: Vec<BTreeSet<VertexId>> = generators
        .iter()
        .map(|f| {
            f.replacements
                .iter()
                .flat_map(|r| subtree(graph, &r.core).expect("core").vertices)
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    unions(&generators, &vertex_sets, 0, &mut chosen, &mut out);
    out.sort();
    out.dedup();
    out
}

fn unions(
    generators: &[FMoveSpec],
    vertex_sets: &[BTreeSet<VertexId>],
    from: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<FMoveSpec>,
) {
    for i in from..generators.len() {
        if chosen.iter().any(|&j| !vertex_sets[i].is_disjoint(&vertex_sets[j])) {
            continue;
        }
        chosen.push(i);
        let replacements = chosen
            .iter()
            .flat_map(|&j| generators[j].replacements.iter().cloned())
            .collect();
        out.push(FMoveSpec::new(replacements));
        unions(generators, vertex_sets, i + 1, chosen, out);
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::automorphism_group;
    use crate::canon::canonical_form;
    use crate::samples;

    fn leaf(d: usize) -> CouplingTree {
        CouplingTree::Leaf(Dart(d))
    }

    #[test]
    fn coupling_counts() {
        let ports: Vec<Dart> = (0..6).map(Dart).collect();
        assert_eq!(all_couplings(&ports[..4]).len(), 3);
        assert_eq!(all_couplings(&ports[..5]).len(), 15);
        assert_eq!(all_couplings(&ports).len(), 105);
    }

    #[test]
    fn canonical_coupling_ignores_root_position() {
        let a = CouplingTree::join(
            CouplingTree::join(leaf(0), leaf(4)),
            CouplingTree::join(leaf(5), leaf(7)),
        );
        let b = CouplingTree::join(
            leaf(7),
            CouplingTree::join(leaf(5), CouplingTree::join(leaf(4), leaf(0))),
        );
        assert_eq!(a.canonical().unwrap(), b.canonical().unwrap());
        let c = CouplingTree::join(
            CouplingTree::join(leaf(0), leaf(5)),
            CouplingTree::join(leaf(4), leaf(7)),
        );
        assert_ne!(a.splits(), c.splits());
    }

    #[test]
    fn theta_edge_move_gives_dumbbell_or_relabeled_theta() {
        // the outer edges at both ends are the same two edges, so one coupling
        // pairs each of them with itself (two loops) and the other rebuilds theta
        let theta = samples::theta();
        let theta_code = canonical_form(&theta).unwrap();
        let dumbbell = canonical_form(&samples::dumbbell()).unwrap();
        for e in theta.edges() {
            let mut codes = Vec::new();
            for c in [Coupling::Parallel, Coupling::Crossed] {
                let (g, corr) = apply_edge_fmove(&theta, e, c).unwrap();
                assert!(g.is_valid());
                assert_ne!(g, theta);
                assert_eq!(corr.replaced, vec![e]);
                codes.push(canonical_form(&g).unwrap());
            }
            codes.sort();
            let mut expected = vec![theta_code.clone(), dumbbell.clone()];
            expected.sort();
            assert_eq!(codes, expected);
        }
    }

    #[test]
    fn dumbbell_bridge_move_gives_theta() {
        let g = samples::dumbbell();
        let theta = canonical_form(&samples::theta()).unwrap();
        for c in [Coupling::Parallel, Coupling::Crossed] {
            let (h, _) = apply_edge_fmove(&g, EdgeId(0), c).unwrap();
            assert_eq!(canonical_form(&h).unwrap(), theta);
        }
    }

    #[test]
    fn terminal_and_loop_edges_are_rejected() {
        assert_eq!(
            apply_edge_fmove(&samples::tripod(), EdgeId(0), Coupling::Parallel).unwrap_err(),
            MoveError::TerminalEdge(0)
        );
        assert_eq!(
            apply_edge_fmove(&samples::dumbbell(), EdgeId(1), Coupling::Parallel).unwrap_err(),
            MoveError::LoopEdge(1)
        );
    }

    #[test]
    fn four_leaf_tree_move_changes_pairing() {
        let g = samples::four_leaf_tree();
        let (h, _) = apply_edge_fmove(&g, EdgeId(0), Coupling::Crossed).unwrap();
        assert_eq!(canonical_form(&g).unwrap(), canonical_form(&h).unwrap());
        assert_ne!(g, h);
    }

    #[test]
    fn identity_replacement_is_rejected() {
        let g = samples::four_leaf_tree();
        let tree = subtree(&g, &[EdgeId(0)]).unwrap();
        let cells = old_cells(&g, &tree);
        assert_eq!(
            Replacement::from_cells(&g, &[EdgeId(0)], cells),
            Err(MoveError::Unchanged)
        );
    }

    #[test]
    fn single_tree_agrees_with_edge_move() {
        let g = samples::theta();
        let spec = edge_fmove(&g, EdgeId(1), Coupling::Crossed).unwrap();
        let r = &spec.replacements[0];
        let again = Replacement::new(&g, &[EdgeId(1)], &r.coupling()).unwrap();
        assert_eq!(&again, r);
    }

    #[test]
    fn identity_transports_to_identity() {
        let g = samples::theta();
        let id = Automorphism::identity(g.num_darts());
        let spec = edge_fmove(&g, EdgeId(0), Coupling::Parallel).unwrap();
        let (_, t) = transport(&g, &id, &spec).unwrap();
        assert!(t.is_identity());
    }

    #[test]
    fn switching_two_outer_edges_is_not_invariant() {
        // middle edge 0 of the 4-leaf tree, switch the two leaves at one end
        let g = samples::four_leaf_tree();
        let (s, _) = crate::automorphism::make_switch(&g, EdgeId(1), EdgeId(2)).unwrap();
        let spec = edge_fmove(&g, EdgeId(0), Coupling::Parallel).unwrap();
        assert!(matches!(transport(&g, &s, &spec), Err(NotInvariant::NoExtension(_))));
    }

    #[test]
    fn central_symmetry_is_invariant() {
        // swap the two ends of the middle edge together with their leaves
        let g = samples::four_leaf_tree();
        let group = automorphism_group(&g).unwrap();
        let spec = edge_fmove(&g, EdgeId(0), Coupling::Parallel).unwrap();
        let reversing = group
            .iter()
            .filter(|a| a.apply(Dart(0)) == Dart(1))
            .find(|a| transport(&g, a, &spec).is_ok());
        assert!(reversing.is_some());
    }

    #[test]
    fn round_trip_restores_the_automorphism() {
        let g = samples::four_leaf_tree();
        for phi in automorphism_group(&g).unwrap() {
            for spec in enumerate_invariant_fmoves(&g, &phi, 4) {
                let (h, psi) = transport(&g, &phi, &spec).unwrap();
                assert_eq!(psi.order(), phi.order());
                let back = spec.inverse(&g).unwrap();
                let (g2, phi2) = transport(&h, &psi, &back).unwrap();
                assert_eq!(g2, g);
                assert_eq!(phi2, phi);
            }
        }
    }

    #[test]
    fn theta_invariant_moves() {
        let g = samples::theta();
        let id = Automorphism::identity(g.num_darts());
        assert_eq!(enumerate_invariant_fmoves(&g, &id, 4).len(), 6);
        let rotation = automorphism_group(&g)
            .unwrap()
            .into_iter()
            .find(|a| a.order() == 3)
            .unwrap();
        // the three edges share both vertices, so no compatible family exists
        assert!(enumerate_invariant_fmoves(&g, &rotation, 4).is_empty());
        for e in g.edges() {
            let spec = edge_fmove(&g, e, Coupling::Parallel).unwrap();
            assert_eq!(transport(&g, &rotation, &spec).unwrap_err(), NotInvariant::Family);
        }
    }

    #[test]
    fn tripod_has_no_moves() {
        let g = samples::tripod();
        for phi in automorphism_group(&g).unwrap() {
            assert!(enumerate_invariant_fmoves(&g, &phi, 6).is_empty());
        }
    }

    #[test]
    fn overlapping_trees_are_rejected() {
        let g = samples::necklace(4);
        let a = edge_fmove(&g, EdgeId(0), Coupling::Parallel).unwrap();
        let b = edge_fmove(&g, EdgeId(1), Coupling::Parallel).unwrap();
        let both = FMoveSpec::new([a.replacements, b.replacements].concat());
        assert!(matches!(both.check(&g), Err(MoveError::Overlap(_, _))));
        let c = edge_fmove(&g, EdgeId(2), Coupling::Parallel).unwrap();
        let a = edge_fmove(&g, EdgeId(0), Coupling::Parallel).unwrap();
        let far = FMoveSpec::new([a.replacements, c.replacements].concat());
        assert!(far.check(&g).is_ok());
    }

    #[test]
    fn subtree_cores_of_the_necklace() {
        let g = samples::necklace(4);
        assert_eq!(subtree_cores(&g, 1, &|_| true).len(), 4);
        // paths of two cycle edges
        assert_eq!(subtree_cores(&g, 2, &|_| true).len(), 8);
    }
}
