//! Small named graphs used in examples, tests and benchmarks.

use crate::graph::Graph;

/// One trivalent vertex with three free ends, `G_{0,3}`.
pub fn tripod() -> Graph {
    Graph::from_edges(0, 3, 4, &[(0, 1), (0, 2), (0, 3)]).expect("tripod")
}

/// Two vertices joined by three parallel edges, `G_{2,0}`.
pub fn theta() -> Graph {
    Graph::from_edges(2, 0, 2, &[(0, 1), (0, 1), (0, 1)]).expect("theta")
}

/// Two loops joined by a bridge, `G_{2,0}`; edge 0 is the bridge.
pub fn dumbbell() -> Graph {
    Graph::from_edges(2, 0, 2, &[(0, 1), (0, 0), (1, 1)]).expect("dumbbell")
}

/// A loop with one terminal edge, `G_{1,1}`.
pub fn loop_with_tail() -> Graph {
    Graph::from_edges(1, 1, 2, &[(0, 0), (0, 1)]).expect("loop with tail")
}

/// The unique tree of `G_{0,4}`; edge 0 is the middle edge.
pub fn four_leaf_tree() -> Graph {
    Graph::from_edges(0, 4, 6, &[(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)]).expect("tree")
}

/// A cycle of `n ≥ 1` trivalent vertices, each carrying a terminal edge,
/// `G_{1,n}`. Cycle edge `i` joins vertex `i` to `i + 1`; edge `n + i` is the
/// pendant edge at vertex `i`.
pub fn necklace(n: usize) -> Graph {
    assert!(n >= 1);
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    edges.extend((0..n).map(|i| (i, n + i)));
    Graph::from_edges(1, n, 2 * n, &edges).expect("necklace")
}
