//! Paths, minimal paths between equivalent vertices or terminal edges, and
//! the classification of how two translates of a minimal path meet.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::automorphism::Automorphism;
use crate::canon::canonical_labeling;
use crate::error::PathError;
use crate::graph::{Dart, EdgeId, Graph, VertexId};

/// A chain of edges. `darts[k]` leaves the `k`-th vertex of the path; a path
/// of length zero is a single vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    start: VertexId,
    darts: Vec<Dart>,
}

impl Path {
    pub fn new(graph: &Graph, start: VertexId, darts: Vec<Dart>) -> Result<Path, PathError> {
        if start.0 >= graph.num_vertices() {
            return Err(PathError::NotAPath(format!("no vertex {start}")));
        }
        let mut at = start;
        for &d in &darts {
            if d.0 >= graph.num_darts() || graph.vertex(d) != at {
                return Err(PathError::NotAPath(format!("dart {d} does not leave vertex {at}")));
            }
            at = graph.vertex(d.pair());
        }
        Ok(Path { start, darts })
    }

    /// The path starting with dart `first` and following `rest`.
    pub fn from_darts(graph: &Graph, darts: Vec<Dart>) -> Result<Path, PathError> {
        let first = *darts
            .first()
            .ok_or_else(|| PathError::NotAPath("empty dart list".into()))?;
        if first.0 >= graph.num_darts() {
            return Err(PathError::NotAPath(format!("no dart {first}")));
        }
        Path::new(graph, graph.vertex(first), darts)
    }

    pub fn darts(&self) -> &[Dart] {
        &self.darts
    }

    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn end(&self, graph: &Graph) -> VertexId {
        self.darts.last().map_or(self.start, |d| graph.vertex(d.pair()))
    }

    pub fn edges(&self) -> Vec<EdgeId> {
        self.darts.iter().map(|d| d.edge()).collect()
    }

    pub fn vertices(&self, graph: &Graph) -> Vec<VertexId> {
        let mut out = vec![self.start];
        out.extend(self.darts.iter().map(|d| graph.vertex(d.pair())));
        out
    }

    pub fn is_simple(&self, graph: &Graph) -> bool {
        let vs = self.vertices(graph);
        let distinct: BTreeSet<VertexId> = vs.iter().copied().collect();
        distinct.len() == vs.len()
    }

    pub fn image(&self, graph: &Graph, phi: &Automorphism) -> Path {
        Path {
            start: phi.apply_vertex(graph, self.start),
            darts: self.darts.iter().map(|&d| phi.apply(d)).collect(),
        }
    }

    pub fn reversed(&self, graph: &Graph) -> Path {
        Path {
            start: self.end(graph),
            darts: self.darts.iter().rev().map(|d| d.pair()).collect(),
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.start)?;
        for d in &self.darts {
            write!(f, " {d}")?;
        }
        Ok(())
    }
}

/// Rank of every dart in the canonical labeling of `(graph, phi)`; used to
/// break ties between equally short paths reproducibly.
fn dart_ranks(graph: &Graph, phi: &Automorphism) -> Vec<usize> {
    let labeling = canonical_labeling(graph, Some(phi.as_slice()));
    let mut rank = vec![0; graph.num_darts()];
    for (i, d) in labeling.order.iter().enumerate() {
        rank[d.0] = i;
    }
    rank
}

fn distances(graph: &Graph, from: VertexId) -> Vec<usize> {
    let mut dist = vec![usize::MAX; graph.num_vertices()];
    dist[from.0] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        for &d in graph.cell(x) {
            let y = graph.vertex(d.pair());
            if dist[y.0] == usize::MAX {
                dist[y.0] = dist[x.0] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

/// All shortest paths from `from` to any vertex of `targets` at distance
/// exactly `len`.
fn shortest_paths(graph: &Graph, from: VertexId, targets: &BTreeSet<VertexId>, len: usize) -> Vec<Path> {
    let dist = distances(graph, from);
    let mut out = Vec::new();
    let mut stack = vec![(from, Vec::new())];
    while let Some((x, darts)) = stack.pop() {
        if darts.len() == len {
            if targets.contains(&x) {
                out.push(Path { start: from, darts });
            }
            continue;
        }
        for &d in graph.cell(x) {
            let y = graph.vertex(d.pair());
            if dist[y.0] == darts.len() + 1 {
                let mut next = darts.clone();
                next.push(d);
                stack.push((y, next));
            }
        }
    }
    out
}

fn least_by_rank(paths: Vec<Path>, rank: &[usize]) -> Option<Path> {
    paths
        .into_iter()
        .min_by_key(|p| p.darts.iter().map(|d| rank[d.0]).collect::<Vec<_>>())
}

type Frontier = Vec<(VertexId, BTreeSet<VertexId>)>;

/// A shortest path joining two distinct vertices of one `phi`-orbit, over all
/// orbits; `None` when every vertex is fixed.
pub fn minimal_vertex_path(graph: &Graph, phi: &Automorphism) -> Result<Option<Path>, PathError> {
    if phi.is_identity() {
        return Err(PathError::Identity);
    }
    let mut best: Option<(usize, Frontier)> = None;
    for v in graph.vertices() {
        let others: BTreeSet<VertexId> = phi.vertex_orbit(graph, v).into_iter().filter(|&w| w != v).collect();
        if others.is_empty() {
            continue;
        }
        let dist = distances(graph, v);
        let Some(len) = others.iter().map(|w| dist[w.0]).min() else {
            continue;
        };
        match &mut best {
            Some((l, starts)) if *l == len => starts.push((v, others)),
            Some((l, _)) if *l < len => {}
            _ => best = Some((len, vec![(v, others)])),
        }
    }
    let Some((len, starts)) = best else {
        return Ok(None);
    };
    let rank = dart_ranks(graph, phi);
    let paths = starts
        .into_iter()
        .flat_map(|(v, others)| shortest_paths(graph, v, &others, len))
        .collect();
    Ok(least_by_rank(paths, &rank))
}

/// A shortest path joining the trivalent ends of two distinct terminal edges
/// of one `phi`-orbit; `None` when no such pair exists.
pub fn minimal_terminal_path(graph: &Graph, phi: &Automorphism) -> Result<Option<Path>, PathError> {
    if phi.is_identity() {
        return Err(PathError::Identity);
    }
    let inner_end = |e: EdgeId| {
        let (a, b) = graph.ends(e);
        if graph.is_univalent(a) {
            b
        } else {
            a
        }
    };
    let terminal: Vec<EdgeId> = graph
        .edges()
        .filter(|&e| {
            let (a, b) = graph.ends(e);
            graph.is_univalent(a) || graph.is_univalent(b)
        })
        .collect();
    let mut best: Option<(usize, Frontier)> = None;
    for &e in &terminal {
        let mut others = BTreeSet::new();
        let mut f = phi.apply_edge(e);
        while f != e {
            others.insert(inner_end(f));
            f = phi.apply_edge(f);
        }
        if others.is_empty() {
            continue;
        }
        let v = inner_end(e);
        let dist = distances(graph, v);
        let len = others.iter().map(|w| dist[w.0]).min().expect("nonempty");
        match &mut best {
            Some((l, starts)) if *l == len => starts.push((v, others)),
            Some((l, _)) if *l < len => {}
            _ => best = Some((len, vec![(v, others)])),
        }
    }
    let Some((len, starts)) = best else {
        return Ok(None);
    };
    let rank = dart_ranks(graph, phi);
    let paths = starts
        .into_iter()
        .flat_map(|(v, others)| shortest_paths(graph, v, &others, len))
        .collect();
    Ok(least_by_rank(paths, &rank))
}

/// How `phi^i(alpha)` and `phi^j(alpha)` meet. `deltas` are the lengths of
/// the maximal pieces of the first path not shared with the second, in order
/// along the first path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathOrbitClass {
    /// No common vertex.
    Disjoint,
    /// `phi^second(v) = phi^first(v')`, the other ends distinct.
    Adjacent {
        first: usize,
        second: usize,
        deltas: Vec<usize>,
    },
    /// Both ends exchanged.
    Diagonal { deltas: Vec<usize> },
    /// Both ends shared; `coincide` when the two paths are equal.
    Doubled { deltas: Vec<usize>, coincide: bool },
}

impl PathOrbitClass {
    pub fn name(&self) -> &'static str {
        match self {
            PathOrbitClass::Disjoint => "disjoint",
            PathOrbitClass::Adjacent { .. } => "adjacent",
            PathOrbitClass::Diagonal { .. } => "diagonal",
            PathOrbitClass::Doubled { .. } => "doubled",
        }
    }
}

/// Decomposition of path `p` against path `q`: the shared pieces (as vertex
/// index intervals of `p`, possibly of length zero) and the lengths of the
/// unshared pieces between them.
struct Pieces {
    common: Vec<(usize, usize)>,
    deltas: Vec<usize>,
    starts_shared: bool,
    ends_shared: bool,
}

fn pieces(graph: &Graph, p: &Path, q: &Path) -> Pieces {
    let q_vertices: BTreeSet<VertexId> = q.vertices(graph).into_iter().collect();
    let q_edges: BTreeSet<EdgeId> = q.edges().into_iter().collect();
    let pv = p.vertices(graph);
    let shared: Vec<bool> = pv.iter().map(|v| q_vertices.contains(v)).collect();
    let mut common: Vec<(usize, usize)> = Vec::new();
    for (t, &s) in shared.iter().enumerate() {
        if !s {
            continue;
        }
        match common.last_mut() {
            Some((_, b)) if *b + 1 == t && q_edges.contains(&p.darts[t - 1].edge()) => *b = t,
            _ => common.push((t, t)),
        }
    }
    let mut deltas = Vec::new();
    let mut prev = 0;
    for (k, &(a, b)) in common.iter().enumerate() {
        if k > 0 || a > 0 {
            deltas.push(a - prev);
        }
        prev = b;
    }
    if common.last().is_none_or(|&(_, b)| b < p.len()) {
        deltas.push(p.len() - prev);
    }
    Pieces {
        starts_shared: shared[0],
        ends_shared: shared[p.len()],
        common,
        deltas,
    }
}

/// Classifies the meeting pattern of `phi^i(alpha)` and `phi^j(alpha)` and
/// checks the structure the minimality of `alpha` forces on it.
pub fn classify_pair(
    graph: &Graph,
    phi: &Automorphism,
    alpha: &Path,
    i: usize,
    j: usize,
) -> Result<PathOrbitClass, PathError> {
    let n = phi.order();
    if i % n == j % n {
        return Err(PathError::SameExponent(i, j));
    }
    Path::new(graph, alpha.start, alpha.darts.clone())?;
    if alpha.is_empty() || !alpha.is_simple(graph) {
        return Err(PathError::NotAPath("not a simple path of positive length".into()));
    }
    let (v, w) = (alpha.start, alpha.end(graph));
    if !phi.vertex_orbit(graph, v).contains(&w) {
        return Err(PathError::NotEquivalent);
    }
    let p = alpha.image(graph, &phi.pow(i as i64));
    let q = alpha.image(graph, &phi.pow(j as i64));
    let (a, a2, b, b2) = (p.start, p.end(graph), q.start, q.end(graph));
    let fail = |s: String| Err(PathError::Structure(format!("({i},{j}): {s}")));
    let len = alpha.len();

    if a == b {
        if a2 != b2 {
            return fail("one common end only".into());
        }
        let pp = pieces(graph, &p, &q);
        let qp = pieces(graph, &q, &p);
        let coincide = p == q;
        if !coincide {
            interior_commons_nonempty(&pp).map_err(|e| PathError::Structure(format!("({i},{j}): {e}")))?;
            if pp.deltas != qp.deltas {
                return fail(format!("unshared pieces {:?} vs {:?}", pp.deltas, qp.deltas));
            }
            if n % 2 == 1 {
                if !n.is_multiple_of(3) {
                    return fail(format!("distinct doubled paths with order {n}"));
                }
                if pp.deltas != [len] {
                    return fail("odd order with shared edges".into());
                }
            }
        }
        return Ok(PathOrbitClass::Doubled {
            deltas: if coincide { Vec::new() } else { pp.deltas },
            coincide,
        });
    }
    if a == b2 && a2 == b {
        if n % 2 == 1 {
            return fail(format!("diagonal with odd order {n}"));
        }
        let pp = pieces(graph, &p, &q);
        let qp = pieces(graph, &q, &p);
        interior_commons_nonempty(&pp).map_err(|e| PathError::Structure(format!("({i},{j}): {e}")))?;
        let mut rev = qp.deltas.clone();
        rev.reverse();
        if pp.deltas != rev {
            return fail(format!("unshared pieces {:?} vs reversed {:?}", pp.deltas, qp.deltas));
        }
        return Ok(PathOrbitClass::Diagonal { deltas: pp.deltas });
    }
    let oriented = if a2 == b {
        Some((i, j, &p, &q))
    } else if a == b2 {
        Some((j, i, &q, &p))
    } else {
        None
    };
    if let Some((first, second, p, q)) = oriented {
        let pp = pieces(graph, p, q);
        let qp = pieces(graph, q, p);
        if pp.starts_shared || qp.ends_shared {
            return fail("a far end lies on the other path".into());
        }
        interior_commons_nonempty(&pp).map_err(|e| PathError::Structure(format!("({i},{j}): {e}")))?;
        let k = pp.deltas.len();
        let mut rev = qp.deltas.clone();
        rev.reverse();
        if k == 0 || pp.deltas != rev {
            return fail(format!("unshared pieces {:?} vs reversed {:?}", pp.deltas, qp.deltas));
        }
        if 2 * pp.deltas[0] < len {
            return fail(format!("first piece {} shorter than half of {len}", pp.deltas[0]));
        }
        return Ok(PathOrbitClass::Adjacent {
            first,
            second,
            deltas: pp.deltas,
        });
    }
    if p.vertices(graph).iter().any(|x| q.vertices(graph).contains(x)) {
        return fail("four distinct ends but the paths meet".into());
    }
    Ok(PathOrbitClass::Disjoint)
}

/// Shared pieces other than the two terminal ones have positive length.
fn interior_commons_nonempty(p: &Pieces) -> Result<(), String> {
    let last = p.common.len().saturating_sub(1);
    for (k, &(a, b)) in p.common.iter().enumerate() {
        let terminal = (k == 0 && p.starts_shared) || (k == last && p.ends_shared);
        if a == b && !terminal {
            return Err(format!("shared vertex {a} without a shared edge"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::automorphism_group;
    use crate::samples;

    #[test]
    fn theta_paths() {
        let g = samples::theta();
        let group = automorphism_group(&g).unwrap();
        let rot = group.iter().find(|a| a.order() == 3).unwrap();
        assert_eq!(minimal_vertex_path(&g, rot).unwrap(), None);
        let swap = group
            .iter()
            .find(|a| a.order() == 2 && a.apply_vertex(&g, VertexId(0)) == VertexId(1))
            .unwrap();
        let alpha = minimal_vertex_path(&g, swap).unwrap().unwrap();
        assert_eq!(alpha.len(), 1);
        assert!(matches!(
            classify_pair(&g, swap, &alpha, 0, 1).unwrap(),
            PathOrbitClass::Diagonal { .. } | PathOrbitClass::Doubled { .. }
        ));
        assert!(minimal_vertex_path(&g, &Automorphism::identity(6)).is_err());
    }

    #[test]
    fn dumbbell_loop_swap_uses_the_bridge() {
        let g = samples::dumbbell();
        for phi in automorphism_group(&g).unwrap() {
            let (a, b) = g.ends(EdgeId(0));
            if phi.apply_vertex(&g, a) == b {
                let alpha = minimal_vertex_path(&g, &phi).unwrap().unwrap();
                assert_eq!(alpha.edges(), vec![EdgeId(0)]);
            }
        }
    }

    #[test]
    fn hexagon_rotation_gives_disjoint_and_adjacent_pairs() {
        let g = samples::necklace(6);
        let rot = automorphism_group(&g)
            .unwrap()
            .into_iter()
            .find(|a| a.order() == 6 && a.apply_edge(EdgeId(0)) != EdgeId(0))
            .unwrap();
        let third = rot.pow(2);
        let alpha = minimal_vertex_path(&g, &third).unwrap().unwrap();
        assert_eq!(alpha.len(), 2);
        let classes: Vec<&str> = (1..3)
            .map(|j| classify_pair(&g, &third, &alpha, 0, j).unwrap().name())
            .collect();
        assert!(classes.contains(&"adjacent"));
        let sixth = rot;
        let one = minimal_vertex_path(&g, &sixth).unwrap().unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(classify_pair(&g, &sixth, &one, 0, 3).unwrap(), PathOrbitClass::Disjoint);
        assert!(matches!(
            classify_pair(&g, &sixth, &one, 0, 1).unwrap(),
            PathOrbitClass::Adjacent { deltas, .. } if deltas == vec![1]
        ));
    }

    #[test]
    fn bad_inputs() {
        let g = samples::theta();
        let swap = automorphism_group(&g)
            .unwrap()
            .into_iter()
            .find(|a| a.order() == 2 && a.apply_vertex(&g, VertexId(0)) == VertexId(1))
            .unwrap();
        let alpha = minimal_vertex_path(&g, &swap).unwrap().unwrap();
        assert_eq!(
            classify_pair(&g, &swap, &alpha, 1, 3),
            Err(PathError::SameExponent(1, 3))
        );
        let elsewhere = g.cell(VertexId(1))[0];
        assert!(Path::new(&g, VertexId(0), vec![elsewhere]).is_err());
    }

    #[test]
    fn terminal_paths() {
        let g = samples::four_leaf_tree();
        let group = automorphism_group(&g).unwrap();
        let phi = group.iter().find(|a| a.order() == 4).unwrap();
        let alpha = minimal_terminal_path(&g, phi).unwrap().unwrap();
        assert_eq!(alpha.len(), 0);
    }
}
