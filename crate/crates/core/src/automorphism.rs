//! Automorphisms as dart permutations.

use std::fmt;

use crate::canon::digest_words;
use crate::error::{AutError, GraphError};
use crate::graph::{Dart, EdgeId, Graph, VertexId};

/// A permutation of the darts of some graph that commutes with the pairing
/// and maps vertex cells onto vertex cells.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Automorphism {
    map: Vec<Dart>,
}

impl Automorphism {
    pub fn identity(num_darts: usize) -> Automorphism {
        Automorphism {
            map: (0..num_darts).map(Dart).collect(),
        }
    }

    /// Checks that `map` is an automorphism of `graph`.
    pub fn new(graph: &Graph, map: Vec<Dart>) -> Result<Automorphism, AutError> {
        let aut = Automorphism { map };
        aut.check(graph)?;
        Ok(aut)
    }

    pub(crate) fn from_map_unchecked(map: Vec<Dart>) -> Automorphism {
        Automorphism { map }
    }

    pub fn check(&self, graph: &Graph) -> Result<(), AutError> {
        let n = graph.num_darts();
        if self.map.len() != n {
            return Err(AutError::NotAutomorphism(format!(
                "{} darts given, graph has {n}",
                self.map.len()
            )));
        }
        let mut hit = vec![false; n];
        for &d in &self.map {
            if d.0 >= n || std::mem::replace(&mut hit[d.0], true) {
                return Err(AutError::NotAutomorphism("not a permutation".into()));
            }
        }
        for d in graph.darts() {
            if self.apply(d.pair()) != self.apply(d).pair() {
                return Err(AutError::NotAutomorphism(format!("edge of dart {d} not preserved")));
            }
        }
        for cell in graph.cells() {
            let target = graph.vertex(self.apply(cell[0]));
            if graph.degree(target) != cell.len() || cell.iter().any(|&d| graph.vertex(self.apply(d)) != target) {
                return Err(AutError::NotAutomorphism(format!(
                    "vertex of dart {} not preserved",
                    cell[0]
                )));
            }
        }
        Ok(())
    }

    pub fn is_automorphism_of(&self, graph: &Graph) -> bool {
        self.check(graph).is_ok()
    }

    pub fn num_darts(&self) -> usize {
        self.map.len()
    }

    pub fn as_slice(&self) -> &[Dart] {
        &self.map
    }

    pub fn apply(&self, d: Dart) -> Dart {
        self.map[d.0]
    }

    pub fn apply_vertex(&self, graph: &Graph, v: VertexId) -> VertexId {
        graph.vertex(self.apply(graph.cell(v)[0]))
    }

    pub fn apply_edge(&self, e: EdgeId) -> EdgeId {
        self.apply(e.darts()[0]).edge()
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, d)| d.0 == i)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism, AutError> {
        if self.map.len() != other.map.len() {
            return Err(AutError::Mismatch);
        }
        Ok(Automorphism {
            map: other.map.iter().map(|&d| self.map[d.0]).collect(),
        })
    }

    pub fn inverse(&self) -> Automorphism {
        let mut map = vec![Dart(0); self.map.len()];
        for (i, &d) in self.map.iter().enumerate() {
            map[d.0] = Dart(i);
        }
        Automorphism { map }
    }

    /// Least `k ≥ 1` with `selfᵏ = id`.
    pub fn order(&self) -> usize {
        let mut seen = vec![false; self.map.len()];
        let mut order = 1;
        for start in 0..self.map.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut d = start;
            while !seen[d] {
                seen[d] = true;
                d = self.map[d].0;
                len += 1;
            }
            order = lcm(order, len);
        }
        order
    }

    /// `selfᵏ` for any integer `k`.
    pub fn pow(&self, k: i64) -> Automorphism {
        let n = self.order() as i64;
        let k = k.rem_euclid(n) as usize;
        let map = (0..self.map.len())
            .map(|d| {
                let mut x = Dart(d);
                for _ in 0..k {
                    x = self.map[x.0];
                }
                x
            })
            .collect();
        Automorphism { map }
    }

    pub fn dart_orbit(&self, d: Dart) -> Vec<Dart> {
        let mut orbit = vec![d];
        let mut x = self.apply(d);
        while x != d {
            orbit.push(x);
            x = self.apply(x);
        }
        orbit
    }

    pub fn vertex_orbit(&self, graph: &Graph, v: VertexId) -> Vec<VertexId> {
        let mut orbit = vec![v];
        let mut x = self.apply_vertex(graph, v);
        while x != v {
            orbit.push(x);
            x = self.apply_vertex(graph, x);
        }
        orbit
    }

    /// Short digest of the automorphism together with the labeled graph it
    /// acts on.
    pub fn digest(&self, graph: &Graph) -> String {
        let mut words: Vec<u32> = graph.darts().map(|d| graph.vertex(d).0 as u32).collect();
        words.extend(self.map.iter().map(|d| d.0 as u32));
        digest_words(&words)
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.map.len()];
        let mut any = false;
        for start in 0..self.map.len() {
            if seen[start] || self.map[start].0 == start {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut d = start;
            let mut first = true;
            while !seen[d] {
                seen[d] = true;
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                write!(f, "{d}")?;
                d = self.map[d].0;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// All automorphisms of a valid graph, sorted.
///
/// Dart 0 is sent to every dart in turn; the map is then propagated along
/// pairs and vertex cells, branching only on the order of the two remaining
/// darts of a trivalent vertex.
pub fn automorphism_group(graph: &Graph) -> Result<Vec<Automorphism>, GraphError> {
    graph.ensure_valid()?;
    let n = graph.num_darts();
    let mut found = Vec::new();
    for target in 0..n {
        let mut map = vec![usize::MAX; n];
        map[0] = target;
        extend(graph, map, vec![Dart(0)], 0, &mut found);
    }
    found.sort();
    Ok(found)
}

/// Depth-first extension of a partial map along the queue of darts whose
/// images are fixed.
fn extend(g: &Graph, mut map: Vec<usize>, mut queue: Vec<Dart>, mut pos: usize, out: &mut Vec<Automorphism>) {
    while pos < queue.len() {
        let d = queue[pos];
        let fd = Dart(map[d.0]);
        let (p, fp) = (d.pair(), fd.pair());
        if map[p.0] == usize::MAX {
            map[p.0] = fp.0;
            queue.push(p);
        } else if map[p.0] != fp.0 {
            return;
        }
        let cell = g.cell(g.vertex(d));
        let target = g.cell(g.vertex(fd));
        if cell.len() != target.len() {
            return;
        }
        let src: Vec<Dart> = cell.iter().copied().filter(|&x| x != d).collect();
        let dst: Vec<Dart> = target.iter().copied().filter(|&x| x != fd).collect();
        let assignments: Vec<Vec<(Dart, Dart)>> = match src.len() {
            0 => vec![vec![]],
            2 => vec![
                vec![(src[0], dst[0]), (src[1], dst[1])],
                vec![(src[0], dst[1]), (src[1], dst[0])],
            ],
            _ => return,
        };
        let mut consistent = Vec::new();
        for assignment in assignments {
            if assignment
                .iter()
                .all(|&(s, t)| map[s.0] == usize::MAX || map[s.0] == t.0)
                && injective_with(&map, &assignment)
            {
                consistent.push(assignment);
            }
        }
        match consistent.len() {
            0 => return,
            1 => {
                for &(s, t) in &consistent[0] {
                    if map[s.0] == usize::MAX {
                        map[s.0] = t.0;
                        queue.push(s);
                    }
                }
            }
            _ => {
                for assignment in consistent {
                    let mut m = map.clone();
                    let mut q = queue.clone();
                    for (s, t) in assignment {
                        if m[s.0] == usize::MAX {
                            m[s.0] = t.0;
                            q.push(s);
                        }
                    }
                    extend(g, m, q, pos + 1, out);
                }
                return;
            }
        }
        pos += 1;
    }
    if map.contains(&usize::MAX) {
        return;
    }
    let aut = Automorphism {
        map: map.into_iter().map(Dart).collect(),
    };
    if aut.is_automorphism_of(g) {
        out.push(aut);
    }
}

fn injective_with(map: &[usize], assignment: &[(Dart, Dart)]) -> bool {
    assignment.iter().all(|&(s, t)| map[s.0] == t.0 || !map.contains(&t.0))
}

/// Orders of vertices and edges with respect to one automorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitReport {
    pub order: usize,
    pub vertex_orders: Vec<usize>,
    /// Size of the orbit of the oriented edge (see [`edge_order`]).
    pub edge_orders: Vec<usize>,
    pub edge_order_set: Vec<usize>,
    /// `m` and `k` with edge order set `{m, 2m, …, 2ᵏm}`.
    pub base: usize,
    pub doublings: u32,
}

/// Order of an edge: the size of the orbit of the edge read as an oriented
/// edge (its dart 2e). It is a multiple of the orders of both ends and equals
/// the edge-orbit size or its double.
pub fn edge_order(phi: &Automorphism, e: EdgeId) -> usize {
    phi.dart_orbit(e.darts()[0]).len()
}

pub fn vertex_order(graph: &Graph, phi: &Automorphism, v: VertexId) -> usize {
    phi.vertex_orbit(graph, v).len()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("order structure violated: {0}")]
pub struct OrderViolation(pub String);

/// Computes all orders and checks the structural constraints on them.
pub fn orbit_report(graph: &Graph, phi: &Automorphism) -> Result<OrbitReport, OrderViolation> {
    let order = phi.order();
    let vertex_orders: Vec<usize> = graph.vertices().map(|v| vertex_order(graph, phi, v)).collect();
    let edge_orders: Vec<usize> = graph.edges().map(|e| edge_order(phi, e)).collect();
    let violation = |s: String| Err(OrderViolation(s));

    for e in graph.edges() {
        let (v, w) = graph.ends(e);
        let (ov, ow, oe) = (vertex_orders[v.0], vertex_orders[w.0], edge_orders[e.0]);
        let l = lcm(ov, ow);
        if oe % l != 0 || !matches!(oe / l, 1..=3) {
            return violation(format!("edge {e}: order {oe} vs LCM {l}"));
        }
        let parallel = graph
            .edges()
            .filter(|&f| {
                let (a, b) = graph.ends(f);
                (a, b) == (v, w) || (a, b) == (w, v)
            })
            .count();
        if v != w && parallel == 1 && oe != l {
            return violation(format!("simple edge {e}: order {oe} differs from LCM {l}"));
        }
        for end in [ov, ow] {
            if ![end, 2 * end, 3 * end].contains(&oe) {
                return violation(format!("edge {e}: order {oe} vs end order {end}"));
            }
        }
        let orbit = edge_orbit_len(phi, e);
        let reversed = phi.dart_orbit(e.darts()[0]).contains(&e.darts()[1]);
        let expected = if reversed { 2 * orbit } else { orbit };
        if oe != expected {
            return violation(format!("edge {e}: order {oe}, orbit {orbit}, reversed {reversed}"));
        }
    }

    let mut edge_order_set = edge_orders.clone();
    edge_order_set.sort_unstable();
    edge_order_set.dedup();
    let base = edge_order_set[0];
    let doublings = (edge_order_set.len() - 1) as u32;
    for (i, &o) in edge_order_set.iter().enumerate() {
        if o != base << i {
            return violation(format!("edge order set {edge_order_set:?}"));
        }
    }
    if order != base << doublings {
        return violation(format!("ord = {order}, edge order set {edge_order_set:?}"));
    }
    let mut highest = None;
    for &o in &vertex_orders {
        let plain = (0..=doublings).find(|&i| o == base << i);
        let third = (0..=doublings).find(|&j| 3 * o == base << j);
        match (plain, third) {
            (Some(i), _) => highest = highest.max(Some(i)),
            (None, Some(_)) => {}
            (None, None) => return violation(format!("vertex order {o}")),
        }
    }
    if let Some(h) = highest {
        if h + 1 < doublings {
            return violation(format!("vertex orders reach 2^{h}·m only, k = {doublings}"));
        }
    }
    Ok(OrbitReport {
        order,
        vertex_orders,
        edge_orders,
        edge_order_set,
        base,
        doublings,
    })
}

fn edge_orbit_len(phi: &Automorphism, e: EdgeId) -> usize {
    let mut len = 1;
    let mut f = phi.apply_edge(e);
    while f != e {
        len += 1;
        f = phi.apply_edge(f);
    }
    len
}

/// Prime-power factors `φ^{kᵢ}` of `φ`, ordered by prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicFactorization {
    pub factors: Vec<Automorphism>,
    pub orders: Vec<usize>,
}

pub fn primary_decomposition(phi: &Automorphism) -> CyclicFactorization {
    let n = phi.order();
    let mut factors = Vec::new();
    let mut orders = Vec::new();
    for q in prime_power_parts(n) {
        let r = n / q;
        let k = r * mod_inverse(r % q, q);
        factors.push(phi.pow(k as i64));
        orders.push(q);
    }
    CyclicFactorization { factors, orders }
}

/// The maximal prime powers dividing `n`, by increasing prime.
pub fn prime_power_parts(mut n: usize) -> Vec<usize> {
    let mut parts = Vec::new();
    let mut p = 2;
    while n > 1 {
        if n.is_multiple_of(p) {
            let mut q = 1;
            while n.is_multiple_of(p) {
                n /= p;
                q *= p;
            }
            parts.push(q);
        }
        p += 1;
    }
    parts
}

fn mod_inverse(a: usize, m: usize) -> usize {
    if m == 1 {
        return 0;
    }
    (1..m).find(|&x| a * x % m == 1).expect("coprime")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwitchKind {
    /// Exchanges two terminal edges.
    Terminal,
    /// Exchanges two internal edges with a common far end (or flips a loop).
    Internal,
}

/// The switch at the vertex of `d1` exchanging the half-edges `d1` and `d2`
/// and their far ends, fixing every other dart.
pub fn switch_darts(graph: &Graph, d1: Dart, d2: Dart) -> Result<(Automorphism, SwitchKind), AutError> {
    let n = graph.num_darts();
    if d1.0 >= n || d2.0 >= n || d1 == d2 {
        return Err(AutError::NotSwitch("need two distinct darts".into()));
    }
    let v = graph.vertex(d1);
    if graph.vertex(d2) != v || !graph.is_trivalent(v) {
        return Err(AutError::NotSwitch(format!(
            "darts {d1} and {d2} are not at one trivalent vertex"
        )));
    }
    let mut map: Vec<Dart> = graph.darts().collect();
    map.swap(d1.0, d2.0);
    let kind = if d1.pair() == d2 {
        SwitchKind::Internal
    } else {
        let (p1, p2) = (d1.pair(), d2.pair());
        let (w1, w2) = (graph.vertex(p1), graph.vertex(p2));
        let kind = if graph.is_univalent(w1) && graph.is_univalent(w2) {
            SwitchKind::Terminal
        } else if w1 == w2 {
            SwitchKind::Internal
        } else {
            return Err(AutError::NotSwitch(format!("far ends of darts {d1} and {d2} differ")));
        };
        map.swap(p1.0, p2.0);
        kind
    };
    let aut = Automorphism { map };
    aut.check(graph).map_err(|e| AutError::NotSwitch(e.to_string()))?;
    Ok((aut, kind))
}

/// The switch exchanging the adjacent edges `e1` and `e2`.
pub fn make_switch(graph: &Graph, e1: EdgeId, e2: EdgeId) -> Result<(Automorphism, SwitchKind), AutError> {
    if !graph.contains_edge(e1) || !graph.contains_edge(e2) || e1 == e2 {
        return Err(AutError::NotSwitch("need two distinct edges of the graph".into()));
    }
    let mut last = AutError::NotSwitch(format!("edges {e1} and {e2} are not adjacent"));
    for d1 in e1.darts() {
        for d2 in e2.darts() {
            if graph.vertex(d1) == graph.vertex(d2) {
                match switch_darts(graph, d1, d2) {
                    Ok(s) => return Ok(s),
                    Err(e) => last = e,
                }
            }
        }
    }
    Err(last)
}
