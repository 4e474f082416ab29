//! End-to-end acceptance run over every admissible (g,b) with at most nine
//! edges. Prints one PASS/FAIL line per criterion; exits non-zero on failure.

mod common;

use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use common::{automorphism_count, brute_force_classes, lcm, RANGE};
use trigraph::automorphism::{edge_order, vertex_order};
use trigraph::decompose::reduce_edge_orders;
use trigraph::fmove::enumerate_invariant_fmoves;
use trigraph::oracle::{DEFAULT_BUDGET, DEFAULT_MAX_TREE_ENDS};
use trigraph::paths::{classify_pair, minimal_vertex_path, PathOrbitClass};
use trigraph::{
    automorphism_group, closure_e, decompose, enumerate_iso_classes, move_graph_components, samples, transport,
    verify_certificate, Automorphism, Graph,
};

struct Universe {
    states: Vec<(usize, usize, Graph, Vec<Automorphism>)>,
}

impl Universe {
    fn build() -> Universe {
        let states = RANGE
            .par_iter()
            .flat_map_iter(|&(g, b)| {
                enumerate_iso_classes(g, b)
                    .expect("admissible")
                    .into_iter()
                    .map(move |gr| {
                        let group = automorphism_group(&gr).expect("valid");
                        (g, b, gr, group)
                    })
            })
            .collect();
        Universe { states }
    }

    fn pairs(&self) -> impl Iterator<Item = (&Graph, &Automorphism)> {
        self.states
            .iter()
            .flat_map(|(_, _, g, group)| group.iter().map(move |a| (g, a)))
    }
}

type Outcome = Result<String, String>;
type Check<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn all_certified(u: &Universe) -> Outcome {
    let pairs: Vec<_> = u.pairs().collect();
    let failures: Vec<String> = pairs
        .par_iter()
        .filter_map(|(g, phi)| {
            let result = decompose(g, phi)
                .map_err(|e| e.to_string())
                .and_then(|c| verify_certificate(g, &c, phi).map_err(|e| e.to_string()));
            result
                .err()
                .map(|e| format!("({},{}) {phi}: {e}", g.genus(), g.boundary()))
        })
        .collect();
    match failures.first() {
        None => Ok(format!(
            "{} automorphisms of {} graphs certified",
            pairs.len(),
            u.states.len()
        )),
        Some(f) => Err(format!("{} failures, first: {f}", failures.len())),
    }
}

fn oracle_closure() -> Outcome {
    let reports: Vec<_> = RANGE
        .par_iter()
        .map(|&(g, b)| (g, b, closure_e(g, b, DEFAULT_BUDGET, DEFAULT_MAX_TREE_ENDS)))
        .collect();
    let mut total = 0;
    for (g, b, r) in reports {
        match r {
            Ok(r) if r.is_full() => total += r.all.len(),
            Ok(r) => return Err(format!("({g},{b}): closure {} of {}", r.closure.len(), r.all.len())),
            Err(e) => return Err(format!("({g},{b}): {e}")),
        }
    }
    Ok(format!(
        "closure is everything in all {} pairs ({total} classes)",
        RANGE.len()
    ))
}

fn order_invariance(u: &Universe) -> Outcome {
    let pairs: Vec<_> = u.pairs().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut moves: HashMap<usize, Vec<_>> = HashMap::new();
    let (mut checked, mut draws) = (0, 0);
    while checked < 10_000 {
        draws += 1;
        if draws > 1_000_000 {
            return Err(format!("only {checked} pairs with moves drawn"));
        }
        let i = rng.random_range(0..pairs.len());
        let (g, phi) = pairs[i];
        let family = moves
            .entry(i)
            .or_insert_with(|| enumerate_invariant_fmoves(g, phi, DEFAULT_MAX_TREE_ENDS));
        if family.is_empty() {
            continue;
        }
        let mv = &family[rng.random_range(0..family.len())];
        match transport(g, phi, mv) {
            Ok((_, psi)) if psi.order() == phi.order() => checked += 1,
            Ok((_, psi)) => return Err(format!("order {} became {} on {phi}", phi.order(), psi.order())),
            Err(e) => return Err(format!("enumerated move not invariant: {e}")),
        }
    }
    Ok(format!(
        "{checked} random (automorphism, invariant move) pairs keep their order"
    ))
}

fn edge_orders(u: &Universe) -> Outcome {
    let mut count = 0;
    for (g, phi) in u.pairs() {
        let n = phi.order();
        let orders: Vec<usize> = g.edges().map(|e| edge_order(phi, e)).collect();
        let mut set = orders.clone();
        set.sort_unstable();
        set.dedup();
        let m = set[0];
        let expected: Vec<usize> = (0..set.len()).map(|i| m << i).collect();
        if set != expected || *set.last().expect("edges") != n {
            return Err(format!("{phi}: edge order set {set:?} with order {n}"));
        }
        if orders.iter().fold(1, |acc, &o| lcm(acc, o)) != n {
            return Err(format!("{phi}: lcm of edge orders is not {n}"));
        }
        for e in g.edges() {
            let (x, y) = g.ends(e);
            let ends = lcm(vertex_order(g, phi, x), vertex_order(g, phi, y));
            let mut orbit = vec![e];
            while let Some(next) = Some(phi.apply_edge(*orbit.last().expect("nonempty"))).filter(|f| *f != e) {
                orbit.push(next);
            }
            let o = edge_order(phi, e);
            let unique = x != y
                && g.edges()
                    .filter(|&f| {
                        let (p, q) = g.ends(f);
                        (p, q) == (x, y) || (q, p) == (x, y)
                    })
                    .count()
                    == 1;
            if !o.is_multiple_of(ends) || !matches!(o / ends, 1..=3) || (unique && o != ends) {
                return Err(format!("{phi}: edge {e} order {o} vs end orders lcm {ends}"));
            }
            if o != orbit.len() && o != 2 * orbit.len() {
                return Err(format!("{phi}: edge {e} order {o} vs orbit {}", orbit.len()));
            }
        }
        count += 1;
    }
    Ok(format!("{count} automorphisms have edge orders {{m, 2m, …, 2ᵏm}}"))
}

fn classifier(u: &Universe) -> Outcome {
    let mut pairs = 0;
    for (g, phi) in u.pairs().filter(|(_, a)| !a.is_identity()) {
        let Some(alpha) = minimal_vertex_path(g, phi).map_err(|e| e.to_string())? else {
            continue;
        };
        let n = phi.order();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let class = classify_pair(g, phi, &alpha, i, j).map_err(|e| format!("{phi} ({i},{j}): {e}"))?;
                let ok = match &class {
                    PathOrbitClass::Disjoint => true,
                    PathOrbitClass::Adjacent { deltas, .. } => {
                        !deltas.is_empty() && 2 * deltas[0] >= alpha.len() && deltas[0] == *deltas.last().expect("one")
                    }
                    PathOrbitClass::Diagonal { .. } => n % 2 == 0,
                    PathOrbitClass::Doubled { coincide, .. } => *coincide || n % 2 == 0 || n % 3 == 0,
                };
                if !ok {
                    return Err(format!("{phi} ({i},{j}): {class:?} with order {n}"));
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} translate pairs classified, no restriction violated"))
}

fn move_graph() -> Outcome {
    for &(g, b) in &RANGE {
        let components = move_graph_components(g, b).map_err(|e| e.to_string())?;
        if components.len() != 1 {
            return Err(format!("({g},{b}) has {} components", components.len()));
        }
    }
    Ok(format!("edge moves connect G_{{g,b}} in all {} pairs", RANGE.len()))
}

fn reduction_measure(u: &Universe) -> Outcome {
    let mut count = 0;
    let mut steps = 0;
    for (g, phi) in u
        .pairs()
        .filter(|(_, a)| a.order().is_power_of_two() && !a.is_identity())
    {
        let r = reduce_edge_orders(g, phi).map_err(|e| format!("{phi}: {e}"))?;
        if !r.trace.windows(2).all(|w| w[1] < w[0]) {
            return Err(format!("{phi}: trace {:?} is not decreasing", r.trace));
        }
        let orders: Vec<usize> = r.chain.graph.edges().map(|e| edge_order(&r.chain.phi, e)).collect();
        if orders.iter().any(|&o| o != orders[0]) {
            return Err(format!("{phi}: edge orders not uniform after reduction"));
        }
        count += 1;
        steps += r.kinds.len();
    }
    Ok(format!(
        "{count} automorphisms of order 2^m, {steps} strictly decreasing steps"
    ))
}

fn known_counts() -> Outcome {
    let groups = [
        ("tripod", samples::tripod(), 6),
        ("theta", samples::theta(), 12),
        ("dumbbell", samples::dumbbell(), 8),
    ];
    for (name, g, expected) in groups {
        let library = automorphism_group(&g).map_err(|e| e.to_string())?.len();
        let brute = automorphism_count(&g);
        if library != expected || brute != expected {
            return Err(format!(
                "|Aut({name})|: library {library}, brute force {brute}, expected {expected}"
            ));
        }
    }
    for (g, b, expected) in [(2, 0, 2), (0, 3, 1), (1, 1, 1)] {
        let library = enumerate_iso_classes(g, b).map_err(|e| e.to_string())?.len();
        let brute = brute_force_classes(g, b).len();
        if library != expected || brute != expected {
            return Err(format!(
                "|G_{{{g},{b}}}|: library {library}, brute force {brute}, expected {expected}"
            ));
        }
    }
    Ok("|Aut| = 6, 12, 8 and |G| = 2, 1, 1 by library and brute force".into())
}

fn main() {
    let start = Instant::now();
    let u = Universe::build();
    let criteria: Vec<Check> = vec![
        (
            "every automorphism has a verified certificate",
            Box::new(|| all_certified(&u)),
        ),
        ("oracle closure is the full automorphism set", Box::new(oracle_closure)),
        ("invariant moves preserve the order", Box::new(|| order_invariance(&u))),
        ("edge order structure", Box::new(|| edge_orders(&u))),
        ("minimal path classifier is complete", Box::new(|| classifier(&u))),
        ("move graph is connected", Box::new(move_graph)),
        (
            "edge order reduction measure decreases",
            Box::new(|| reduction_measure(&u)),
        ),
        ("known small counts", Box::new(known_counts)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (status, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} {status}: {name} — {detail} ({:.1?})", i + 1, t.elapsed());
    }
    println!(
        "acceptance: {} of {} passed in {:.1?}",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
