//! Fixtures shared by the benchmarks.

use trigraph::{automorphism_group, enumerate_iso_classes, Automorphism, Graph};

/// Every graph of `G_{g,b}` together with its automorphism group.
pub fn states(g: usize, b: usize) -> Vec<(Graph, Vec<Automorphism>)> {
    enumerate_iso_classes(g, b)
        .expect("admissible class")
        .into_iter()
        .map(|gr| {
            let group = automorphism_group(&gr).expect("valid graph");
            (gr, group)
        })
        .collect()
}

/// The (graph, automorphism) pairs of `G_{g,b}` with a non-trivial automorphism.
pub fn nontrivial_pairs(g: usize, b: usize) -> Vec<(Graph, Automorphism)> {
    states(g, b)
        .into_iter()
        .flat_map(|(gr, group)| {
            group
                .into_iter()
                .filter(|a| !a.is_identity())
                .map(move |a| (gr.clone(), a))
        })
        .collect()
}
