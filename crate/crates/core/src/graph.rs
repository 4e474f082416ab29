//! Dart-based uni/trivalent multigraphs.
//!
//! Edge `k` owns darts `2k` and `2k + 1`, so the edge pairing is `d ^ 1`.
//! Vertices are cells of a partition of the darts. Cells are kept sorted and
//! ordered by their smallest dart, which makes vertex ids a function of the
//! partition alone.

use std::fmt;

use crate::error::GraphError;

/// A half-edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dart(pub usize);

impl Dart {
    pub fn edge(self) -> EdgeId {
        EdgeId(self.0 / 2)
    }

    /// The other half of the same edge.
    pub fn pair(self) -> Dart {
        Dart(self.0 ^ 1)
    }
}

impl fmt::Display for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

impl EdgeId {
    pub fn darts(self) -> [Dart; 2] {
        [Dart(2 * self.0), Dart(2 * self.0 + 1)]
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Index of a vertex cell in the normalised cell list of a particular graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    /// Exactly one end is univalent.
    Terminal,
    /// Both ends are trivalent (loops included).
    Internal,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    genus: usize,
    boundary: usize,
    cells: Vec<Vec<Dart>>,
    vertex_of: Vec<VertexId>,
}

impl Graph {
    /// Builds a graph from a partition of the darts `0..2 * num_edges`.
    pub fn from_cells(
        genus: usize,
        boundary: usize,
        num_edges: usize,
        cells: Vec<Vec<Dart>>,
    ) -> Result<Graph, GraphError> {
        let num_darts = 2 * num_edges;
        let mut seen = vec![false; num_darts];
        for cell in &cells {
            if cell.is_empty() {
                return Err(GraphError::Malformed("empty vertex cell".into()));
            }
            for &d in cell {
                if d.0 >= num_darts {
                    return Err(GraphError::Malformed(format!("dart {d} out of range")));
                }
                if seen[d.0] {
                    return Err(GraphError::Malformed(format!("dart {d} in two cells")));
                }
                seen[d.0] = true;
            }
        }
        if let Some(d) = seen.iter().position(|s| !s) {
            return Err(GraphError::Malformed(format!("dart {d} in no cell")));
        }
        Ok(Graph::normalised(genus, boundary, num_darts, cells))
    }

    /// Builds a graph from an edge list over vertices `0..num_vertices`;
    /// dart `2k` sits at the first endpoint of edge `k`.
    pub fn from_edges(
        genus: usize,
        boundary: usize,
        num_vertices: usize,
        edges: &[(usize, usize)],
    ) -> Result<Graph, GraphError> {
        let mut cells = vec![Vec::new(); num_vertices];
        for (k, &(a, b)) in edges.iter().enumerate() {
            if a >= num_vertices || b >= num_vertices {
                return Err(GraphError::Malformed(format!("edge {k} has an unknown end")));
            }
            cells[a].push(Dart(2 * k));
            cells[b].push(Dart(2 * k + 1));
        }
        Graph::from_cells(genus, boundary, edges.len(), cells)
    }

    pub(crate) fn normalised(genus: usize, boundary: usize, num_darts: usize, mut cells: Vec<Vec<Dart>>) -> Graph {
        for cell in &mut cells {
            cell.sort_unstable();
        }
        cells.sort_unstable_by_key(|c| c[0]);
        let mut vertex_of = vec![VertexId(0); num_darts];
        for (v, cell) in cells.iter().enumerate() {
            for &d in cell {
                vertex_of[d.0] = VertexId(v);
            }
        }
        Graph {
            genus,
            boundary,
            cells,
            vertex_of,
        }
    }

    /// Same darts and pairing, different vertex partition.
    pub(crate) fn with_cells(&self, cells: Vec<Vec<Dart>>) -> Graph {
        Graph::normalised(self.genus, self.boundary, self.num_darts(), cells)
    }

    /// Relabels darts by `map` (dart `d` becomes `map[d]`); `map` must commute
    /// with the pairing.
    pub fn relabeled(&self, map: &[Dart]) -> Result<Graph, GraphError> {
        if map.len() != self.num_darts() {
            return Err(GraphError::Malformed("relabeling has the wrong length".into()));
        }
        if (0..map.len()).any(|d| map[d ^ 1] != map[d].pair()) {
            return Err(GraphError::Malformed("relabeling does not respect edges".into()));
        }
        let cells = self
            .cells
            .iter()
            .map(|c| c.iter().map(|d| map[d.0]).collect())
            .collect();
        Graph::from_cells(self.genus, self.boundary, self.num_edges(), cells)
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn boundary(&self) -> usize {
        self.boundary
    }

    pub fn num_darts(&self) -> usize {
        self.vertex_of.len()
    }

    pub fn num_edges(&self) -> usize {
        self.vertex_of.len() / 2
    }

    pub fn num_vertices(&self) -> usize {
        self.cells.len()
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> {
        (0..self.num_darts()).map(Dart)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.num_edges()).map(EdgeId)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.num_vertices()).map(VertexId)
    }

    pub fn cells(&self) -> &[Vec<Dart>] {
        &self.cells
    }

    pub fn cell(&self, v: VertexId) -> &[Dart] {
        &self.cells[v.0]
    }

    pub fn vertex(&self, d: Dart) -> VertexId {
        self.vertex_of[d.0]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.cells[v.0].len()
    }

    pub fn is_trivalent(&self, v: VertexId) -> bool {
        self.degree(v) == 3
    }

    pub fn is_univalent(&self, v: VertexId) -> bool {
        self.degree(v) == 1
    }

    /// The other darts at the vertex of `d`.
    pub fn mates(&self, d: Dart) -> impl Iterator<Item = Dart> + '_ {
        self.cells[self.vertex(d).0].iter().copied().filter(move |&x| x != d)
    }

    /// Vertices of darts `2e` and `2e + 1`.
    pub fn ends(&self, e: EdgeId) -> (VertexId, VertexId) {
        let [a, b] = e.darts();
        (self.vertex(a), self.vertex(b))
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        let (a, b) = self.ends(e);
        a == b
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        e.0 < self.num_edges()
    }

    pub fn classify_edge(&self, e: EdgeId) -> Result<EdgeKind, GraphError> {
        if !self.contains_edge(e) {
            return Err(GraphError::UnknownEdge(e.0));
        }
        let (a, b) = self.ends(e);
        if self.is_univalent(a) != self.is_univalent(b) {
            Ok(EdgeKind::Terminal)
        } else {
            Ok(EdgeKind::Internal)
        }
    }

    /// Internal edge with two distinct trivalent ends.
    pub fn is_movable_edge(&self, e: EdgeId) -> bool {
        let (a, b) = self.ends(e);
        a != b && self.is_trivalent(a) && self.is_trivalent(b)
    }

    pub fn trivalent_count(&self) -> usize {
        self.cells.iter().filter(|c| c.len() == 3).count()
    }

    pub fn univalent_count(&self) -> usize {
        self.cells.iter().filter(|c| c.len() == 1).count()
    }

    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.num_vertices()];
        let mut components = 0;
        let mut stack = Vec::new();
        for start in 0..self.num_vertices() {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &d in &self.cells[v] {
                    let w = self.vertex(d.pair()).0;
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let (g, b) = (self.genus, self.boundary);
        if !is_admissible(g, b) {
            violations.push(Violation::Inadmissible { genus: g, boundary: b });
        }
        for (v, cell) in self.cells.iter().enumerate() {
            if cell.len() != 1 && cell.len() != 3 {
                violations.push(Violation::BadDegree {
                    vertex: VertexId(v),
                    degree: cell.len(),
                });
            }
        }
        let components = self.component_count();
        if components != 1 {
            violations.push(Violation::Disconnected { components });
        }
        let trivalent = self.trivalent_count();
        if trivalent == 0 {
            violations.push(Violation::NoTrivalentVertex);
        }
        let univalent = self.univalent_count();
        if univalent != b {
            violations.push(Violation::FreeEndCount {
                expected: b,
                found: univalent,
            });
        }
        let expected_trivalent = (2 * g + b) as isize - 2;
        if trivalent as isize != expected_trivalent {
            violations.push(Violation::TrivalentCount {
                expected: expected_trivalent,
                found: trivalent,
            });
        }
        let expected_edges = (3 * g + 2 * b) as isize - 3;
        if self.num_edges() as isize != expected_edges {
            violations.push(Violation::EdgeCount {
                expected: expected_edges,
                found: self.num_edges(),
            });
        }
        let betti = self.num_edges() as isize - self.num_vertices() as isize + components as isize;
        if betti != g as isize {
            violations.push(Violation::Betti {
                expected: g,
                found: betti,
            });
        }
        ValidationReport { violations }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    pub(crate) fn ensure_valid(&self) -> Result<(), GraphError> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(GraphError::Invalid(report))
        }
    }
}

/// Whether `G_{g,b}` is non-empty.
pub fn is_admissible(genus: usize, boundary: usize) -> bool {
    !matches!((genus, boundary), (0, 0) | (0, 1) | (0, 2) | (1, 0))
}

/// Number of edges of any graph in `G_{g,b}`.
pub fn edge_count(genus: usize, boundary: usize) -> usize {
    (3 * genus + 2 * boundary).saturating_sub(3)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Violation {
    Inadmissible { genus: usize, boundary: usize },
    BadDegree { vertex: VertexId, degree: usize },
    Disconnected { components: usize },
    NoTrivalentVertex,
    FreeEndCount { expected: usize, found: usize },
    TrivalentCount { expected: isize, found: usize },
    EdgeCount { expected: isize, found: usize },
    Betti { expected: usize, found: isize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Inadmissible { genus, boundary } => {
                write!(f, "inadmissible (g,b) = ({genus},{boundary})")
            }
            Violation::BadDegree { vertex, degree } => {
                write!(f, "vertex {vertex} has degree {degree}")
            }
            Violation::Disconnected { components } => {
                write!(f, "graph has {components} components")
            }
            Violation::NoTrivalentVertex => write!(f, "no trivalent vertex"),
            Violation::FreeEndCount { expected, found } => {
                write!(f, "expected {expected} free ends, found {found}")
            }
            Violation::TrivalentCount { expected, found } => {
                write!(f, "expected {expected} trivalent vertices, found {found}")
            }
            Violation::EdgeCount { expected, found } => {
                write!(f, "expected {expected} edges, found {found}")
            }
            Violation::Betti { expected, found } => {
                write!(f, "first Betti number is {found}, expected {expected}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn tripod_is_valid() {
        let g = samples::tripod();
        assert!(g.is_valid(), "{}", g.validate());
        assert_eq!(g.trivalent_count(), 1);
        for e in g.edges() {
            assert_eq!(g.classify_edge(e).unwrap(), EdgeKind::Terminal);
        }
    }

    #[test]
    fn theta_is_valid() {
        let g = samples::theta();
        assert!(g.is_valid());
        // hand count: 3 edges - 2 vertices + 1
        assert_eq!(g.num_edges() - g.num_vertices() + 1, 2);
        for e in g.edges() {
            assert_eq!(g.classify_edge(e).unwrap(), EdgeKind::Internal);
        }
    }

    #[test]
    fn dumbbell_bridge_is_internal() {
        let g = samples::dumbbell();
        assert!(g.is_valid());
        let bridge = g.edges().find(|&e| !g.is_loop(e)).unwrap();
        assert_eq!(g.classify_edge(bridge).unwrap(), EdgeKind::Internal);
    }

    #[test]
    fn single_loop_is_invalid() {
        let g = Graph::from_edges(1, 0, 1, &[(0, 0)]).unwrap();
        let report = g.validate();
        assert!(report
            .violations
            .contains(&Violation::Inadmissible { genus: 1, boundary: 0 }));
        assert!(report.violations.contains(&Violation::NoTrivalentVertex));
    }

    #[test]
    fn wrong_declared_genus_is_reported() {
        let g = Graph::from_edges(1, 2, 2, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        assert!(!g.is_valid());
    }

    #[test]
    fn unknown_edge_is_an_error() {
        let g = samples::tripod();
        assert!(g.classify_edge(EdgeId(7)).is_err());
    }

    #[test]
    fn malformed_partitions_are_rejected() {
        assert!(Graph::from_cells(0, 3, 1, vec![vec![Dart(0)]]).is_err());
        assert!(Graph::from_cells(0, 3, 1, vec![vec![Dart(0), Dart(1)], vec![Dart(1)]]).is_err());
    }

    #[test]
    fn relabeling_must_respect_edges() {
        let g = samples::theta();
        let swap: Vec<Dart> = [1, 0, 2, 3, 4, 5].into_iter().map(Dart).collect();
        assert!(g.relabeled(&swap).is_ok());
        let bad: Vec<Dart> = [2, 1, 0, 3, 4, 5].into_iter().map(Dart).collect();
        assert!(g.relabeled(&bad).is_err());
    }
}
