//! Constructive reduction of automorphisms to switches.
//!
//! Every automorphism is split into prime-power parts. A part of order a
//! power of two first has its edge orders equalised by switches and orbit
//! splitting moves; what remains (of order > 2, or a fixed-point-free
//! involution) is written as `τ∘σ` with involutions that fix or reverse an
//! invariant edge. Such an involution is reduced to the identity, after at
//! most one edge move turning a reversed edge into a fixed one.

use std::collections::BTreeSet;

use crate::automorphism::{automorphism_group, edge_order, primary_decomposition, switch_darts, Automorphism};
use crate::certificate::Certificate;
use crate::error::DecomposeError;
use crate::fmove::{edge_fmove, orbit_fmoves, transport, Coupling, CouplingTree, FMoveSpec, Replacement};
use crate::graph::{Dart, EdgeId, Graph, VertexId};
use crate::paths::{minimal_terminal_path, minimal_vertex_path, Path};

/// One step of a [`Chain`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    /// Transport across an invariant move.
    Move(FMoveSpec),
    /// `φ_before = S ∘ φ_after` for the switch `S` on the two darts.
    Switch(Dart, Dart),
}

/// A sequence of moves and switch compositions leading from `(Γ, φ)` to the
/// current pair, every step checked as it is taken.
#[derive(Clone, Debug)]
pub struct Chain {
    pub graph: Graph,
    pub phi: Automorphism,
    pub steps: Vec<Step>,
}

impl Chain {
    pub fn new(graph: &Graph, phi: &Automorphism) -> Chain {
        Chain {
            graph: graph.clone(),
            phi: phi.clone(),
            steps: Vec::new(),
        }
    }

    pub fn apply_move(&mut self, mv: FMoveSpec) -> Result<(), DecomposeError> {
        let (graph, phi) = transport(&self.graph, &self.phi, &mv)
            .map_err(|e| DecomposeError::Internal(format!("move is not invariant: {e}")))?;
        if phi.order() != self.phi.order() {
            return Err(DecomposeError::Internal("transport changed the order".into()));
        }
        self.graph = graph;
        self.phi = phi;
        self.steps.push(Step::Move(mv));
        Ok(())
    }

    pub fn apply_switch(&mut self, a: Dart, b: Dart) -> Result<(), DecomposeError> {
        let (s, _) = switch_darts(&self.graph, a, b).map_err(|e| DecomposeError::Internal(e.to_string()))?;
        self.phi = s.compose(&self.phi).expect("same graph");
        self.steps.push(Step::Switch(a, b));
        Ok(())
    }

    pub fn append(&mut self, other: Chain) {
        self.graph = other.graph;
        self.phi = other.phi;
        self.steps.extend(other.steps);
    }

    /// Wraps a certificate for the current automorphism into one for the
    /// automorphism the chain started from.
    pub fn close(&self, end: Certificate) -> Certificate {
        self.steps.iter().rev().fold(end, |cert, step| match step {
            Step::Move(mv) => Certificate::transport(mv.clone(), cert),
            Step::Switch(a, b) => Certificate::compose(vec![Certificate::switch(*a, *b), cert]),
        })
    }
}

/// Whether `phi` fixes some edge dart-wise.
pub fn fixes_edge(graph: &Graph, phi: &Automorphism) -> bool {
    graph.edges().any(|e| phi.apply(e.darts()[0]) == e.darts()[0])
}

/// Whether `phi` maps some edge onto itself reversed.
pub fn reverses_edge(graph: &Graph, phi: &Automorphism) -> bool {
    graph.edges().any(|e| phi.apply(e.darts()[0]) == e.darts()[1])
}

/// Involutions that [`reduce_order2`] accepts.
pub fn is_reducible_involution(graph: &Graph, phi: &Automorphism) -> bool {
    phi.order() == 2 && (fixes_edge(graph, phi) || reverses_edge(graph, phi))
}

/// `(log₂ of the largest edge order, number of edges of that order)`.
pub fn edge_order_measure(graph: &Graph, phi: &Automorphism) -> (usize, usize) {
    let orders: Vec<usize> = graph.edges().map(|e| edge_order(phi, e)).collect();
    let max = orders.iter().copied().max().unwrap_or(1);
    (
        max.trailing_zeros() as usize,
        orders.iter().filter(|&&o| o == max).count(),
    )
}

fn uniform_edge_orders(graph: &Graph, phi: &Automorphism) -> bool {
    let mut orders = graph.edges().map(|e| edge_order(phi, e));
    let first = orders.next();
    orders.all(|o| Some(o) == first)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReductionKind {
    /// Composition with a switch splitting one edge orbit in half.
    Switch,
    /// An invariant move replacing one edge orbit by two of half the size.
    OrbitSplit,
    /// A measure-decreasing step found by search.
    Searched,
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub chain: Chain,
    /// The measure before every step and after the last one.
    pub trace: Vec<(usize, usize)>,
    pub kinds: Vec<ReductionKind>,
}

/// Equalises the edge orders of an automorphism of order `2^m`.
pub fn reduce_edge_orders(graph: &Graph, phi: &Automorphism) -> Result<Reduction, DecomposeError> {
    if !phi.order().is_power_of_two() {
        return Err(DecomposeError::Precondition(format!(
            "order {} is not a power of two",
            phi.order()
        )));
    }
    let mut chain = Chain::new(graph, phi);
    let mut trace = vec![edge_order_measure(graph, phi)];
    let mut kinds = Vec::new();
    while !uniform_edge_orders(&chain.graph, &chain.phi) {
        let before = *trace.last().expect("nonempty");
        let kind = reduction_step(&mut chain)?;
        let after = edge_order_measure(&chain.graph, &chain.phi);
        if after >= before {
            return Err(DecomposeError::Internal(format!(
                "edge order measure did not decrease: {before:?} -> {after:?}"
            )));
        }
        trace.push(after);
        kinds.push(kind);
    }
    Ok(Reduction { chain, trace, kinds })
}

fn reduction_step(chain: &mut Chain) -> Result<ReductionKind, DecomposeError> {
    let (graph, phi) = (&chain.graph, &chain.phi);
    let max = graph.edges().map(|e| edge_order(phi, e)).max().expect("edges");
    let half = max / 2;
    let psi = phi.pow(half as i64);
    let site = graph.vertices().find_map(|v| {
        let cell = graph.cell(v);
        if cell.len() != 3 || phi.vertex_orbit(graph, v).len() != half {
            return None;
        }
        let d0 = *cell.iter().find(|&&d| psi.apply(d) == d)?;
        let d1 = *cell.iter().find(|&&d| d != d0 && edge_order(phi, d.edge()) == max)?;
        Some((v, d0, d1, psi.apply(d1)))
    });
    let Some((_, d0, d1, d2)) = site else {
        return Err(DecomposeError::Internal(
            "no vertex of half the maximal edge order".into(),
        ));
    };
    let (w1, w2) = (graph.vertex(d1.pair()), graph.vertex(d2.pair()));
    if d2 == d1.pair() || w1 == w2 || graph.is_univalent(w1) {
        chain.apply_switch(d1, d2)?;
        return Ok(ReductionKind::Switch);
    }
    if let Some(mv) = orbit_split_move(graph, phi, &psi, d0, d1, d2, w1) {
        let mut trial = chain.clone();
        if trial.apply_move(mv).is_ok() && edge_order_measure(&trial.graph, &trial.phi) < edge_order_measure(graph, phi)
        {
            *chain = trial;
            return Ok(ReductionKind::OrbitSplit);
        }
    }
    searched_reduction(chain)?;
    Ok(ReductionKind::Searched)
}

/// The invariant move re-coupling the tree `{e1, e2}` around the vertex of
/// `d0` as `(d0 ((a1 ψa1) (a2 ψa2)))`, and its images under `phi`.
#[allow(clippy::too_many_arguments)]
fn orbit_split_move(
    graph: &Graph,
    phi: &Automorphism,
    psi: &Automorphism,
    d0: Dart,
    d1: Dart,
    d2: Dart,
    w1: VertexId,
) -> Option<FMoveSpec> {
    let outer: Vec<Dart> = graph.cell(w1).iter().copied().filter(|&d| d != d1.pair()).collect();
    let (a1, a2) = (outer[0], outer[1]);
    let shape = CouplingTree::join(
        CouplingTree::Leaf(d0),
        CouplingTree::join(
            CouplingTree::join(CouplingTree::Leaf(a1), CouplingTree::Leaf(psi.apply(a1))),
            CouplingTree::join(CouplingTree::Leaf(a2), CouplingTree::Leaf(psi.apply(a2))),
        ),
    );
    let core = [d1.edge(), d2.edge()];
    let copies = phi.vertex_orbit(graph, graph.vertex(d0)).len();
    let mut replacements = Vec::with_capacity(copies);
    let mut power = Automorphism::identity(graph.num_darts());
    for _ in 0..copies {
        let mut c: Vec<EdgeId> = core.iter().map(|&e| power.apply_edge(e)).collect();
        c.sort_unstable();
        let image = shape.map_leaves(&|d| power.apply(d));
        replacements.push(Replacement::new(graph, &c, &image).ok()?);
        power = phi.compose(&power).expect("same graph");
    }
    let mv = FMoveSpec::new(replacements);
    mv.check(graph).ok()?;
    Some(mv)
}

fn searched_reduction(chain: &mut Chain) -> Result<(), DecomposeError> {
    let (graph, phi) = (&chain.graph, &chain.phi);
    let before = edge_order_measure(graph, phi);
    for v in graph.vertices().filter(|&v| graph.is_trivalent(v)) {
        let cell = graph.cell(v);
        for i in 0..3 {
            for j in i + 1..3 {
                if let Ok((s, _)) = switch_darts(graph, cell[i], cell[j]) {
                    let rho = s.compose(phi).expect("same graph");
                    if rho.order().is_power_of_two() && edge_order_measure(graph, &rho) < before {
                        let (a, b) = (cell[i], cell[j]);
                        return chain.apply_switch(a, b);
                    }
                }
            }
        }
    }
    for mv in orbit_fmoves(graph, phi, 6, &|_| true) {
        if let Ok((g2, p2)) = transport(graph, phi, &mv) {
            if edge_order_measure(&g2, &p2) < before {
                return chain.apply_move(mv);
            }
        }
    }
    Err(DecomposeError::Internal("no measure-decreasing step".into()))
}

/// Reduces an involution that fixes or reverses an invariant edge (or the
/// identity) to the identity.
pub fn reduce_order2(graph: &Graph, phi: &Automorphism) -> Result<Certificate, DecomposeError> {
    if phi.is_identity() {
        return Ok(Certificate::identity());
    }
    if !is_reducible_involution(graph, phi) {
        return Err(DecomposeError::Precondition(
            "not an involution fixing or reversing an invariant edge".into(),
        ));
    }
    if let Some((a, b)) = as_switch(graph, phi) {
        return Ok(Certificate::switch(a, b));
    }
    let mut chain = Chain::new(graph, phi);
    if !fixes_edge(graph, phi) {
        let e = graph
            .edges()
            .find(|e| phi.apply(e.darts()[0]) == e.darts()[1])
            .expect("reversed edge");
        let [x, y] = e.darts();
        let ports = |end: Dart| {
            let mut p: Vec<Dart> = graph
                .cell(graph.vertex(end))
                .iter()
                .copied()
                .filter(|&d| d != end)
                .collect();
            p.sort_unstable();
            p
        };
        let (near, far) = (ports(x), ports(y));
        let coupling = if phi.apply(near[0]) == far[0] {
            Coupling::Parallel
        } else {
            Coupling::Crossed
        };
        let mv = edge_fmove(graph, e, coupling).map_err(|err| DecomposeError::Internal(err.to_string()))?;
        chain.apply_move(mv)?;
        if !fixes_edge(&chain.graph, &chain.phi) {
            return Err(DecomposeError::Internal("edge move did not create a fixed edge".into()));
        }
    }
    let reduction = reduce_edge_orders(&chain.graph, &chain.phi)?;
    if !reduction.chain.phi.is_identity() {
        return Err(DecomposeError::Internal(
            "edge order reduction did not reach the identity".into(),
        ));
    }
    chain.append(reduction.chain);
    Ok(chain.close(Certificate::identity()))
}

fn as_switch(graph: &Graph, phi: &Automorphism) -> Option<(Dart, Dart)> {
    let moved: Vec<Dart> = graph.darts().filter(|&d| phi.apply(d) != d).collect();
    if moved.len() > 4 {
        return None;
    }
    for &a in &moved {
        for &b in &moved {
            if a < b && graph.vertex(a) == graph.vertex(b) {
                if let Ok((s, _)) = switch_darts(graph, a, b) {
                    if s == *phi {
                        return Some((a, b));
                    }
                }
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CycleKind {
    /// Translates of single edges forming disjoint cycles.
    Cycle,
    /// Three translates of `α` meeting at a common vertex.
    Tripod,
    /// A single edge reversed by `φ^{n/2}`.
    Diagonal,
}

/// The orbit of a minimal path and its normal form data.
#[derive(Clone, Debug)]
pub struct CycleStructure {
    pub kind: CycleKind,
    /// Order of `φ`.
    pub n: usize,
    /// Number of translates of `α` forming one cycle `C`.
    pub ell: usize,
    /// The end of `α` is `φ^s` of its start.
    pub s: usize,
    /// `s = t·n/ℓ` when that holds, else 0.
    pub t: usize,
    pub alpha: Path,
    pub a: Option<EdgeId>,
    pub b: Option<EdgeId>,
    /// Terminal edges whose trivalent ends are the ends of `α` (step case).
    pub terminals: Vec<EdgeId>,
}

impl CycleStructure {
    fn measure(&self) -> usize {
        self.alpha.len()
    }
}

fn exponent(graph: &Graph, phi: &Automorphism, from: VertexId, to: VertexId) -> Option<usize> {
    let orbit = phi.vertex_orbit(graph, from);
    orbit.iter().position(|&w| w == to)
}

fn orbit_union(graph: &Graph, phi: &Automorphism, alpha: &Path) -> BTreeSet<EdgeId> {
    let n = phi.order();
    (0..n)
        .flat_map(|i| alpha.image(graph, &phi.pow(i as i64)).edges())
        .collect()
}

fn structure_of(graph: &Graph, phi: &Automorphism, alpha: &Path, terminals: Vec<EdgeId>) -> CycleStructure {
    let n = phi.order();
    let (start, end) = (alpha.start(), alpha.end(graph));
    let s = exponent(graph, phi, start, end).unwrap_or(0);
    let ell = if s == 0 {
        1
    } else {
        (1..=n)
            .find(|&k| phi.pow((k * s) as i64).apply_vertex(graph, start) == start)
            .unwrap_or(n)
    };
    let t = if (s * ell).is_multiple_of(n) { s * ell / n } else { 0 };
    let darts = alpha.darts();
    let kind = if n.is_multiple_of(2) && darts.len() == 1 && phi.pow((n / 2) as i64).apply(darts[0]) == darts[0].pair()
    {
        CycleKind::Diagonal
    } else if n.is_multiple_of(3)
        && (darts.is_empty() || (darts.len() == 2 && phi.pow((n / 3) as i64).apply(darts[0].pair()) == darts[1]))
    {
        CycleKind::Tripod
    } else {
        CycleKind::Cycle
    };
    CycleStructure {
        kind,
        n,
        ell,
        s,
        t,
        alpha: alpha.clone(),
        a: darts.first().map(|d| d.edge()),
        b: (darts.len() > 1).then(|| darts[darts.len() - 1].edge()),
        terminals,
    }
}

/// Checks the invariants of the structure's kind, and for cycles whether
/// `α` is a single edge.
pub fn check_structure(graph: &Graph, phi: &Automorphism, st: &CycleStructure) -> Result<(), String> {
    let darts = st.alpha.darts();
    match st.kind {
        CycleKind::Diagonal => {
            let d = darts[0];
            if phi.pow((st.n / 2) as i64).apply(d) != d.pair() {
                return Err("diagonal edge is not reversed by the half power".into());
            }
        }
        CycleKind::Tripod => {
            if darts.len() == 2 && phi.pow((st.n / 3) as i64).apply(darts[0].pair()) != darts[1] {
                return Err("b is not the image of the reversed a".into());
            }
            if darts.is_empty() && st.terminals.is_empty() {
                return Err("degenerate tripod without terminal edges".into());
            }
        }
        CycleKind::Cycle => {
            if st.terminals.is_empty() && darts.len() != 1 {
                return Err(format!("path of length {} is not a single edge", darts.len()));
            }
            if !st.terminals.is_empty() && darts.len() > 2 {
                return Err(format!("path of length {} is longer than two edges", darts.len()));
            }
            if st.s == 0 || st.t == 0 || crate::automorphism::gcd(st.t, st.ell) != 1 {
                return Err(format!("step {} is not t·n/ℓ with gcd(t, ℓ) = 1", st.s));
            }
            let c: Vec<EdgeId> = (0..st.ell)
                .flat_map(|k| st.alpha.image(graph, &phi.pow((k * st.s) as i64)).edges())
                .collect();
            let cset: BTreeSet<EdgeId> = c.iter().copied().collect();
            if cset.len() != c.len() {
                return Err("C repeats an edge".into());
            }
            let mut seen = BTreeSet::new();
            for k in 0..st.n / st.ell {
                let copy = phi.pow(k as i64);
                for &e in &cset {
                    if !seen.insert(copy.apply_edge(e)) {
                        return Err("translates of C are not disjoint".into());
                    }
                }
            }
            if seen != orbit_union(graph, phi, &st.alpha) {
                return Err("translates of C do not cover the orbit of α".into());
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct Normalized {
    pub chain: Chain,
    pub structure: CycleStructure,
    /// Whether the structure satisfies [`check_structure`].
    pub normal: bool,
}

/// Shortens the minimal vertex path `alpha` by invariant moves until its
/// orbit is in normal form, or no move shortens it further.
pub fn normalize_cycle(graph: &Graph, phi: &Automorphism, alpha: &Path) -> Result<Normalized, DecomposeError> {
    normalize(graph, phi, alpha, false)
}

/// As [`normalize_cycle`] for a minimal path joining the trivalent ends of
/// two terminal edges of one orbit.
pub fn normalize_step(graph: &Graph, phi: &Automorphism, alpha: &Path) -> Result<Normalized, DecomposeError> {
    normalize(graph, phi, alpha, true)
}

fn minimal_path(graph: &Graph, phi: &Automorphism, terminal: bool) -> Result<Option<Path>, DecomposeError> {
    Ok(if terminal {
        minimal_terminal_path(graph, phi)?
    } else {
        minimal_vertex_path(graph, phi)?
    })
}

fn terminal_edges_at(graph: &Graph, alpha: &Path) -> Vec<EdgeId> {
    let ends = [alpha.start(), alpha.end(graph)];
    let mut out: Vec<EdgeId> = ends
        .iter()
        .flat_map(|&v| graph.cell(v).iter().map(|d| d.edge()).collect::<Vec<_>>())
        .filter(|&e| {
            let (x, y) = graph.ends(e);
            graph.is_univalent(x) || graph.is_univalent(y)
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn normalize(graph: &Graph, phi: &Automorphism, alpha: &Path, terminal: bool) -> Result<Normalized, DecomposeError> {
    let mut chain = Chain::new(graph, phi);
    let terminals = |g: &Graph, p: &Path| {
        if terminal {
            terminal_edges_at(g, p)
        } else {
            Vec::new()
        }
    };
    let mut structure = structure_of(graph, phi, alpha, terminals(graph, alpha));
    loop {
        if check_structure(&chain.graph, &chain.phi, &structure).is_ok() {
            return Ok(Normalized {
                chain,
                structure,
                normal: true,
            });
        }
        let union = orbit_union(&chain.graph, &chain.phi, &structure.alpha);
        let mut candidates = orbit_fmoves(&chain.graph, &chain.phi, 4, &|e| union.contains(&e));
        candidates.extend(orbit_fmoves(&chain.graph, &chain.phi, 6, &|_| true));
        let mut improved = None;
        for mv in candidates {
            let Ok((g2, p2)) = transport(&chain.graph, &chain.phi, &mv) else {
                continue;
            };
            if let Some(path) = minimal_path(&g2, &p2, terminal)? {
                let st = structure_of(&g2, &p2, &path, terminals(&g2, &path));
                if st.measure() < structure.measure() {
                    improved = Some((mv, st));
                    break;
                }
            }
        }
        match improved {
            Some((mv, st)) => {
                chain.apply_move(mv)?;
                structure = st;
            }
            None => {
                return Ok(Normalized {
                    chain,
                    structure,
                    normal: false,
                })
            }
        }
    }
}

/// How the involution `σ` of a factorisation was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SigmaTier {
    /// Nothing to factor: `ψ` is the identity or already reducible.
    Trivial,
    /// `σ(φʲ(v)) = φ⁻ʲ(v)` on the orbit of the base vertex, with the
    /// edge conditions of `Strict`.
    Base,
    /// Order `2^m`: `σ` fixes an edge and `τ` reverses an invariant edge.
    /// Odd order: both fix or reverse an invariant edge.
    Strict,
    /// Both `σ` and `τ` fix or reverse an invariant edge.
    Relaxed,
}

#[derive(Clone, Debug)]
pub struct Factorization {
    /// Steps from `φ` to `τ∘σ`.
    pub chain: Chain,
    pub sigma: Automorphism,
    pub tau: Automorphism,
    pub tier: SigmaTier,
    pub structure: Option<Normalized>,
    pub reduction: Option<Reduction>,
}

/// Writes `φ`, up to recorded moves and switch compositions, as `τ∘σ` with
/// `σ` and `τ` reducible involutions.
pub fn factor_into_involutions(graph: &Graph, phi: &Automorphism) -> Result<Factorization, DecomposeError> {
    let n = phi.order();
    if n.is_multiple_of(6) {
        return Err(DecomposeError::Precondition(format!("order {n} is a multiple of 6")));
    }
    if n <= 2 && (phi.is_identity() || is_reducible_involution(graph, phi)) {
        return Err(DecomposeError::Precondition(
            "order at most 2 and already reducible".into(),
        ));
    }
    let power_of_two = n.is_power_of_two();
    let mut chain = Chain::new(graph, phi);
    let mut reduction = None;
    if power_of_two {
        let r = reduce_edge_orders(graph, phi)?;
        chain.append(r.chain.clone());
        reduction = Some(r);
        if chain.phi.is_identity() || is_reducible_involution(&chain.graph, &chain.phi) {
            let id = Automorphism::identity(chain.graph.num_darts());
            let tau = chain.phi.clone();
            return Ok(Factorization {
                chain,
                sigma: id,
                tau,
                tier: SigmaTier::Trivial,
                structure: None,
                reduction,
            });
        }
    }
    let mut structure = None;
    let alpha = match minimal_vertex_path(&chain.graph, &chain.phi)? {
        Some(a) => Some((a, false)),
        None => minimal_terminal_path(&chain.graph, &chain.phi)?.map(|a| (a, true)),
    };
    if let Some((alpha, terminal)) = alpha {
        let norm = if terminal {
            normalize_step(&chain.graph, &chain.phi, &alpha)?
        } else {
            normalize_cycle(&chain.graph, &chain.phi, &alpha)?
        };
        chain.append(norm.chain.clone());
        structure = Some(norm);
    }
    let base = structure.as_ref().map(|s| s.structure.alpha.start());
    let (sigma, tau, tier) = find_sigma(&chain.graph, &chain.phi, base, power_of_two)?;
    if tau.compose(&sigma).expect("same graph") != chain.phi
        || !sigma.compose(&sigma).expect("same graph").is_identity()
        || !tau.compose(&tau).expect("same graph").is_identity()
    {
        return Err(DecomposeError::Internal("factorisation check failed".into()));
    }
    Ok(Factorization {
        chain,
        sigma,
        tau,
        tier,
        structure,
        reduction,
    })
}

fn find_sigma(
    graph: &Graph,
    phi: &Automorphism,
    base: Option<VertexId>,
    power_of_two: bool,
) -> Result<(Automorphism, Automorphism, SigmaTier), DecomposeError> {
    let group = automorphism_group(graph)?;
    let pairs: Vec<(Automorphism, Automorphism)> = group
        .into_iter()
        .filter(|s| !s.is_identity() && s.compose(s).expect("same graph").is_identity())
        .filter_map(|s| {
            let t = phi.compose(&s).expect("same graph");
            (!t.is_identity() && t.compose(&t).expect("same graph").is_identity()).then_some((s, t))
        })
        .collect();
    let strict = |s: &Automorphism, t: &Automorphism| {
        if power_of_two {
            fixes_edge(graph, s) && reverses_edge(graph, t)
        } else {
            is_reducible_involution(graph, s) && is_reducible_involution(graph, t)
        }
    };
    let reflects = |s: &Automorphism, v: VertexId| {
        let orbit = phi.vertex_orbit(graph, v);
        let k = orbit.len();
        (0..k).all(|j| s.apply_vertex(graph, orbit[j]) == orbit[(k - j) % k])
    };
    if let Some(v) = base {
        if let Some((s, t)) = pairs.iter().find(|(s, t)| reflects(s, v) && strict(s, t)) {
            return Ok((s.clone(), t.clone(), SigmaTier::Base));
        }
    }
    if let Some((s, t)) = pairs.iter().find(|(s, t)| strict(s, t)) {
        return Ok((s.clone(), t.clone(), SigmaTier::Strict));
    }
    if let Some((s, t)) = pairs
        .iter()
        .find(|(s, t)| is_reducible_involution(graph, s) && is_reducible_involution(graph, t))
    {
        return Ok((s.clone(), t.clone(), SigmaTier::Relaxed));
    }
    Err(DecomposeError::Internal(
        "no factorisation into reducible involutions".into(),
    ))
}

/// Summary of the choices made by [`decompose_with_report`].
#[derive(Clone, Debug, Default)]
pub struct DecomposeReport {
    pub tiers: Vec<SigmaTier>,
    /// Whether each normalisation reached normal form.
    pub normalized: Vec<bool>,
    pub reductions: Vec<Vec<(usize, usize)>>,
    pub reduction_kinds: Vec<ReductionKind>,
}

/// A certificate expressing `phi` through switches, compositions and
/// transports, checked against `phi` before it is returned.
pub fn decompose(graph: &Graph, phi: &Automorphism) -> Result<Certificate, DecomposeError> {
    decompose_with_report(graph, phi).map(|(c, _)| c)
}

pub fn decompose_with_report(
    graph: &Graph,
    phi: &Automorphism,
) -> Result<(Certificate, DecomposeReport), DecomposeError> {
    phi.check(graph)
        .map_err(|e| DecomposeError::Precondition(e.to_string()))?;
    let mut report = DecomposeReport::default();
    let cert = if phi.is_identity() {
        Certificate::identity()
    } else if let Some((a, b)) = as_switch(graph, phi) {
        Certificate::switch(a, b)
    } else {
        let parts = primary_decomposition(phi);
        let mut children = Vec::with_capacity(parts.factors.len());
        for chi in &parts.factors {
            children.push(prime_power(graph, chi, &mut report)?);
        }
        Certificate::compose(children)
    };
    check(graph, &cert, phi)?;
    Ok((cert, report))
}

fn check(graph: &Graph, cert: &Certificate, phi: &Automorphism) -> Result<(), DecomposeError> {
    crate::certificate::verify_certificate(graph, cert, phi)
        .map_err(|e| DecomposeError::Internal(format!("certificate check: {e}")))
}

fn prime_power(graph: &Graph, chi: &Automorphism, report: &mut DecomposeReport) -> Result<Certificate, DecomposeError> {
    if chi.is_identity() || is_reducible_involution(graph, chi) {
        let cert = reduce_order2(graph, chi)?;
        check(graph, &cert, chi)?;
        return Ok(cert);
    }
    let f = factor_into_involutions(graph, chi)?;
    report.tiers.push(f.tier);
    if let Some(n) = &f.structure {
        report.normalized.push(n.normal);
    }
    if let Some(r) = &f.reduction {
        report.reductions.push(r.trace.clone());
        report.reduction_kinds.extend(r.kinds.iter().copied());
    }
    let g = &f.chain.graph;
    let tau = reduce_order2(g, &f.tau)?;
    let sigma = reduce_order2(g, &f.sigma)?;
    let inner = Certificate::compose(vec![tau, sigma]);
    check(g, &inner, &f.chain.phi)?;
    let cert = f.chain.close(inner);
    check(graph, &cert, chi)?;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{verify_certificate, Node};
    use crate::oracle::all_state_keys;
    use crate::samples;

    fn group(g: &Graph) -> Vec<Automorphism> {
        automorphism_group(g).unwrap()
    }

    #[test]
    fn identity_and_switch_leaves() {
        let g = samples::tripod();
        let id = Automorphism::identity(g.num_darts());
        assert_eq!(decompose(&g, &id).unwrap().node, Node::Identity);
        let s = group(&g).into_iter().find(|a| a.order() == 2).unwrap();
        assert!(matches!(decompose(&g, &s).unwrap().node, Node::Switch(..)));
        assert!(matches!(reduce_order2(&g, &s).unwrap().node, Node::Switch(..)));
    }

    #[test]
    fn small_groups_round_trip() {
        for g in [
            samples::tripod(),
            samples::theta(),
            samples::dumbbell(),
            samples::loop_with_tail(),
        ] {
            for phi in group(&g) {
                let cert = decompose(&g, &phi).unwrap();
                assert!(verify_certificate(&g, &cert, &phi).is_ok());
                if !phi.is_identity() {
                    assert!(verify_certificate(&g, &cert, &phi.inverse()).is_err() || phi.order() == 2);
                }
            }
        }
    }

    #[test]
    fn theta_vertex_swap_needs_a_transport() {
        let g = samples::theta();
        let swap = group(&g)
            .into_iter()
            .find(|a| g.edges().all(|e| a.apply(e.darts()[0]) == e.darts()[1]))
            .unwrap();
        assert!(reverses_edge(&g, &swap) && !fixes_edge(&g, &swap));
        let cert = reduce_order2(&g, &swap).unwrap();
        assert!(cert.stats().transports >= 1);
        assert!(verify_certificate(&g, &cert, &swap).is_ok());
    }

    #[test]
    fn order_three_on_theta_factors_into_transpositions() {
        let g = samples::theta();
        let phi = group(&g)
            .into_iter()
            .find(|a| a.order() == 3 && g.vertices().all(|v| a.apply_vertex(&g, v) == v))
            .unwrap();
        let f = factor_into_involutions(&g, &phi).unwrap();
        assert!(f.chain.steps.is_empty());
        assert_eq!(f.sigma.order(), 2);
        assert_eq!(f.tau.order(), 2);
        assert_eq!(f.tau.compose(&f.sigma).unwrap(), phi);
    }

    #[test]
    fn factor_rejects_reducible_involutions() {
        let g = samples::tripod();
        let s = group(&g).into_iter().find(|a| a.order() == 2).unwrap();
        assert!(matches!(
            factor_into_involutions(&g, &s),
            Err(DecomposeError::Precondition(_))
        ));
        let r = group(&g).into_iter().find(|a| a.order() == 3).unwrap();
        assert!(matches!(reduce_order2(&g, &r), Err(DecomposeError::Precondition(_))));
        assert!(matches!(
            reduce_edge_orders(&g, &r),
            Err(DecomposeError::Precondition(_))
        ));
    }

    #[test]
    fn uniform_edge_orders_need_no_steps() {
        let g = samples::tripod();
        let s = group(&g).into_iter().find(|a| a.order() == 2).unwrap();
        let id = Automorphism::identity(g.num_darts());
        let r = reduce_edge_orders(&g, &id).unwrap();
        assert!(r.chain.steps.is_empty());
        assert_eq!(r.trace, vec![(0, 3)]);
        let r = reduce_edge_orders(&g, &s).unwrap();
        assert_eq!(r.kinds, vec![ReductionKind::Switch]);
        assert!(r.chain.phi.is_identity());
    }

    #[test]
    fn terminal_pair_over_order_two_vertex_is_one_switch() {
        // order 4 on four leaves of a tree: the pair of leaves at each end is
        // swapped by the square, so each needs one terminal switch
        let g = samples::four_leaf_tree();
        for phi in group(&g).into_iter().filter(|a| a.order() == 4) {
            let r = reduce_edge_orders(&g, &phi).unwrap();
            assert!(r.trace.windows(2).all(|w| w[1] < w[0]));
            assert!(r.kinds.iter().all(|&k| k == ReductionKind::Switch));
        }
    }

    #[test]
    fn orbit_split_in_genus_two() {
        let mut seen = false;
        for (g, auts) in all_state_keys(2, 2).unwrap() {
            for (phi, _) in auts.iter().filter(|(a, _)| a.order().is_power_of_two()) {
                let r = reduce_edge_orders(&g, phi).unwrap();
                assert!(r.trace.windows(2).all(|w| w[1] < w[0]));
                seen |= r.kinds.contains(&ReductionKind::OrbitSplit);
            }
        }
        assert!(seen);
    }

    #[test]
    fn order_six_splits_into_two_branches() {
        let (g, phi) = all_state_keys(2, 0)
            .unwrap()
            .into_iter()
            .find_map(|(g, auts)| auts.into_iter().find(|(a, _)| a.order() == 6).map(|(a, _)| (g, a)))
            .unwrap();
        assert_eq!(primary_decomposition(&phi).orders, vec![2, 3]);
        let cert = decompose(&g, &phi).unwrap();
        assert!(matches!(cert.node, Node::Compose(_)));
        assert!(verify_certificate(&g, &cert, &phi).is_ok());
    }

    #[test]
    fn normal_forms_hold_where_reached() {
        for (g, auts) in all_state_keys(1, 3).unwrap() {
            for (phi, _) in auts {
                if phi.order() <= 2 || phi.order() % 6 == 0 {
                    continue;
                }
                if let Some(alpha) = minimal_vertex_path(&g, &phi).unwrap() {
                    let n = normalize_cycle(&g, &phi, &alpha).unwrap();
                    assert!(n.normal);
                    assert!(check_structure(&n.chain.graph, &n.chain.phi, &n.structure).is_ok());
                }
            }
        }
    }
}
