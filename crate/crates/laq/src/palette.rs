//! Palette graphs of color sets and of colorings, spanning forests, the
//! (n,m)-adjacency matrix of a forest, and the determinant lemmas that
//! drive the lower bound on the minimum number of colors.
//!
//! The palette graph of a set `S` has a directed edge `s1 -> s3` labeled
//! `s2` whenever `m*s1 + (1-m)*s2 = s3 (mod n)` with all three colors in
//! `S`. The palette graph of a coloring keeps only the local colorings
//! actually present at polychromatic crossings; those edges are "solid",
//! set-completion edges are "broken".

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::coloring::{validate_coloring, Coloring, ColoringError};
use crate::diagram::{CrossingId, KnotDiagram};
use crate::linalg::{det_int, IntMatrix};

#[derive(Debug, Error, PartialEq)]
pub enum PaletteError {
    #[error("the trivial coloring has no palette graph")]
    TrivialColoring,
    #[error("coloring violates the crossing condition at crossing {0}")]
    InvalidColoring(CrossingId),
    #[error("operation requires a knot (1 component), diagram has {0}")]
    NotAKnot(usize),
    #[error("palette graph is disconnected; column deletion needs a spanning tree")]
    NotConnected,
    #[error("column {0} out of range for {1} colors")]
    ColumnOutOfRange(usize, usize),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

/// One edge `source -> target` labeled `label`, satisfying
/// `m*source + (1-m)*label = target (mod n)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PaletteEdge {
    pub source: BigInt,
    pub label: BigInt,
    pub target: BigInt,
    /// True when the edge comes from a crossing of a coloring; false for
    /// set-completion ("broken") edges.
    pub solid: bool,
}

/// Palette graph over a color set, with edges sorted by
/// (source, label, target) and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaletteGraph {
    /// Modulus; 0 means the integers.
    pub n: u64,
    pub m: i64,
    /// Sorted distinct colors.
    pub vertices: Vec<BigInt>,
    pub edges: Vec<PaletteEdge>,
}

impl PaletteGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn vertex_index(&self, color: &BigInt) -> usize {
        self.vertices.binary_search(color).expect("color is a vertex")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "m": self.m,
            "vertices": self.vertices.iter().map(bigint_json).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| json!({
                "src": bigint_json(&e.source),
                "label": bigint_json(&e.label),
                "dst": bigint_json(&e.target),
                "origin": if e.solid { "solid" } else { "broken" },
            })).collect::<Vec<_>>(),
        })
    }
}

fn bigint_json(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

fn sort_dedup_edges(edges: &mut Vec<PaletteEdge>) {
    edges.sort();
    edges.dedup_by(|a, b| a.source == b.source && a.label == b.label && a.target == b.target);
}

/// The full (n,m)-palette graph of a color set: every completing edge,
/// all marked broken.
pub fn palette_graph_of_set(colors: &[BigInt], n: u64, m: i64) -> PaletteGraph {
    let mut vertices: Vec<BigInt> = colors.to_vec();
    vertices.sort();
    vertices.dedup();
    let reduce = |x: BigInt| if n > 0 { x.mod_floor(&BigInt::from(n)) } else { x };
    let mut edges = Vec::new();
    for s1 in &vertices {
        for s2 in &vertices {
            let s3 = reduce(BigInt::from(m) * s1 + (BigInt::from(1) - m) * s2);
            if vertices.binary_search(&s3).is_ok() {
                edges.push(PaletteEdge {
                    source: s1.clone(),
                    label: s2.clone(),
                    target: s3,
                    solid: false,
                });
            }
        }
    }
    sort_dedup_edges(&mut edges);
    PaletteGraph { n, m, vertices, edges }
}

/// The palette graph of a nontrivial coloring: vertices are the used
/// colors; each polychromatic crossing contributes its local coloring
/// (source, over, receiver) as a solid edge, deduplicated.
pub fn palette_graph_of_coloring(
    diagram: &KnotDiagram,
    coloring: &Coloring,
) -> Result<PaletteGraph, PaletteError> {
    if let (false, Some(ci)) = validate_coloring(diagram, coloring)? {
        return Err(PaletteError::InvalidColoring(ci));
    }
    if coloring.is_trivial() {
        return Err(PaletteError::TrivialColoring);
    }
    let vertices = coloring.color_set();
    let mut edges = Vec::new();
    for role in diagram.crossing_roles() {
        let s1 = &coloring.values[diagram.arc_index(role.source).expect("edge of diagram")];
        let s2 = &coloring.values[diagram.arc_index(role.over).expect("edge of diagram")];
        let s3 = &coloring.values[diagram.arc_index(role.receiver).expect("edge of diagram")];
        if s1 == s2 && s2 == s3 {
            continue; // monochromatic crossing
        }
        edges.push(PaletteEdge {
            source: s1.clone(),
            label: s2.clone(),
            target: s3.clone(),
            solid: true,
        });
    }
    sort_dedup_edges(&mut edges);
    Ok(PaletteGraph { n: coloring.params.n(), m: coloring.params.m(), vertices, edges })
}

/// A spanning forest: indices into `graph.edges`, acquired by BFS from the
/// smallest color with incident edges scanned in sorted order; `components`
/// counts the undirected connected components over all edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningForest {
    pub edges: Vec<usize>,
    pub components: usize,
}

/// Deterministic spanning forest over all edges (solid and broken), one
/// BFS tree per component.
pub fn spanning_forest(graph: &PaletteGraph) -> SpanningForest {
    let k = graph.vertex_count();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (ei, e) in graph.edges.iter().enumerate() {
        let s = graph.vertex_index(&e.source);
        let t = graph.vertex_index(&e.target);
        incident[s].push(ei);
        if t != s {
            incident[t].push(ei);
        }
    }
    let mut visited = vec![false; k];
    let mut forest = Vec::new();
    let mut components = 0;
    for start in 0..k {
        if visited[start] {
            continue;
        }
        components += 1;
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &ei in &incident[v] {
                let e = &graph.edges[ei];
                let s = graph.vertex_index(&e.source);
                let t = graph.vertex_index(&e.target);
                let other = if s == v { t } else { s };
                if !visited[other] {
                    visited[other] = true;
                    forest.push(ei);
                    queue.push_back(other);
                }
            }
        }
    }
    SpanningForest { edges: forest, components }
}

/// Undirected connectivity of the solid-edge subgraph.
pub fn is_connected(graph: &PaletteGraph) -> bool {
    let k = graph.vertex_count();
    if k <= 1 {
        return true;
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (ei, e) in graph.edges.iter().enumerate() {
        if !e.solid {
            continue;
        }
        let s = graph.vertex_index(&e.source);
        let t = graph.vertex_index(&e.target);
        incident[s].push(ei);
        if t != s {
            incident[t].push(ei);
        }
    }
    let mut visited = vec![false; k];
    visited[0] = true;
    let mut queue = VecDeque::from([0usize]);
    let mut seen = 1;
    while let Some(v) = queue.pop_front() {
        for &ei in &incident[v] {
            let e = &graph.edges[ei];
            let s = graph.vertex_index(&e.source);
            let t = graph.vertex_index(&e.target);
            let other = if s == v { t } else { s };
            if !visited[other] {
                visited[other] = true;
                seen += 1;
                queue.push_back(other);
            }
        }
    }
    seen == k
}

/// The row a palette edge contributes over the given sorted color columns:
/// `+1` at the target, `-m` at the source, `m-1` at the label, summed on
/// coincidence.
fn edge_row(edge: &PaletteEdge, colors: &[BigInt], m: i64) -> Vec<BigInt> {
    let mut row = vec![BigInt::zero(); colors.len()];
    let col = |c: &BigInt| colors.binary_search(c).expect("color is a vertex");
    row[col(&edge.target)] += 1;
    row[col(&edge.source)] -= BigInt::from(m);
    row[col(&edge.label)] += BigInt::from(m) - 1;
    row
}

/// The forest's adjacency matrix: one row per forest edge, one column per
/// color (sorted).
#[derive(Clone, Debug, PartialEq)]
pub struct AdjacencyMatrix {
    pub matrix: IntMatrix,
    pub colors: Vec<BigInt>,
    pub m: i64,
}

impl AdjacencyMatrix {
    /// `A_j`: the adjacency matrix with column `j` deleted. Square only
    /// when the forest is a spanning tree, i.e. the graph is connected.
    pub fn a_j(&self, j: usize) -> Result<IntMatrix, PaletteError> {
        if j >= self.matrix.cols() {
            return Err(PaletteError::ColumnOutOfRange(j, self.matrix.cols()));
        }
        if self.matrix.rows() + 1 != self.matrix.cols() {
            return Err(PaletteError::NotConnected);
        }
        Ok(self.matrix.drop_column(j).expect("column checked"))
    }
}

/// Builds the (#forest edges) x (#colors) adjacency matrix of a forest.
pub fn adjacency_matrix(graph: &PaletteGraph, forest: &SpanningForest) -> AdjacencyMatrix {
    let mut matrix = IntMatrix::zeros(forest.edges.len(), graph.vertex_count());
    for (ri, &ei) in forest.edges.iter().enumerate() {
        for (ci, v) in edge_row(&graph.edges[ei], &graph.vertices, graph.m).into_iter().enumerate()
        {
            matrix.add_assign_entry(ri, ci, v);
        }
    }
    AdjacencyMatrix { matrix, colors: graph.vertices.clone(), m: graph.m }
}

/// Verdict for one deleted column of the adjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetLemmaColumn {
    pub column: usize,
    pub color: BigInt,
    pub det: BigInt,
    /// `det ≡ 0 (mod p)` for modular colorings, `det = 0` for integral ones.
    pub vanishes_mod_p: bool,
    /// `det ≡ ±1 (mod |m-1|)`; `None` when `|m-1| = 1` makes it vacuous.
    pub unit_mod_m_minus_1: Option<bool>,
}

/// Determinant-lemma report across all column deletions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetLemmaReport {
    pub columns: Vec<DetLemmaColumn>,
    /// `max(|m|, |m-1|)^(k-1)`, the row-pattern determinant bound.
    pub det_bound: BigInt,
    /// All determinants within the bound.
    pub within_bound: bool,
    /// Both congruences hold for every column, and the bound holds.
    pub all_hold: bool,
}

/// Checks, for a nontrivial coloring of a knot, that every `det A_j`
/// vanishes mod p (or equals 0 over the integers) and is `±1 mod |m-1|`
/// when that modulus is nontrivial. Violations are reported, not thrown.
pub fn verify_det_lemma(
    diagram: &KnotDiagram,
    coloring: &Coloring,
) -> Result<DetLemmaReport, PaletteError> {
    if !diagram.is_knot() {
        return Err(PaletteError::NotAKnot(diagram.components().len()));
    }
    let graph = palette_graph_of_coloring(diagram, coloring)?;
    let forest = spanning_forest(&graph);
    let adj = adjacency_matrix(&graph, &forest);
    let k = graph.vertex_count();
    let n = coloring.params.n();
    let m = coloring.params.m();
    let q = BigInt::from(m - 1).abs();
    let det_bound = matnm_det_bound(m, k.saturating_sub(1));
    let mut columns = Vec::with_capacity(k);
    let mut within_bound = true;
    let mut all_hold = true;
    for j in 0..k {
        let det = det_int(&adj.a_j(j)?).expect("A_j is square");
        let vanishes_mod_p = if n > 0 {
            det.mod_floor(&BigInt::from(n)).is_zero()
        } else {
            det.is_zero()
        };
        let unit_mod_m_minus_1 = if q == BigInt::from(1) {
            None
        } else {
            let r = det.mod_floor(&q);
            Some(r == BigInt::from(1) || r == &q - 1)
        };
        if det.abs() > det_bound {
            within_bound = false;
        }
        if !vanishes_mod_p || unit_mod_m_minus_1 == Some(false) {
            all_hold = false;
        }
        columns.push(DetLemmaColumn {
            column: j,
            color: graph.vertices[j].clone(),
            det,
            vanishes_mod_p,
            unit_mod_m_minus_1,
        });
    }
    all_hold = all_hold && within_bound;
    Ok(DetLemmaReport { columns, det_bound, within_bound, all_hold })
}

/// Deterministic DOT rendering; broken edges dashed, forest edges bold.
pub fn export_dot(graph: &PaletteGraph, forest: Option<&SpanningForest>) -> String {
    use std::fmt::Write;

    let in_forest = |ei: usize| forest.is_some_and(|f| f.edges.contains(&ei));
    let mut out = String::from("digraph palette {\n");
    for v in &graph.vertices {
        writeln!(out, "    \"{v}\";").expect("string write");
    }
    for (ei, e) in graph.edges.iter().enumerate() {
        let mut attrs = vec![format!("label=\"{}\"", e.label)];
        if !e.solid {
            attrs.push("style=dashed".into());
        }
        if in_forest(ei) {
            attrs.push("penwidth=2".into());
        }
        writeln!(out, "    \"{}\" -> \"{}\" [{}];", e.source, e.target, attrs.join(", "))
            .expect("string write");
    }
    out.push_str("}\n");
    out
}

/// `M = max(|m|, |m-1|)`, the largest entry magnitude of the row pattern.
pub fn matnm_entry_bound(m: i64) -> BigInt {
    BigInt::from(m).abs().max((BigInt::from(m) - BigInt::from(1)).abs())
}

/// `M^n`, the determinant bound for n-by-n matrices in the row pattern.
pub fn matnm_det_bound(m: i64, n: usize) -> BigInt {
    matnm_entry_bound(m).pow(n as u32)
}

/// True iff every row's nonzero entries form a sub-multiset of
/// `{-m, m-1, 1}`: at most one of each, collisions of equal values allowed.
pub fn is_matnm(mat: &IntMatrix, m: i64) -> bool {
    let allowed: Vec<BigInt> =
        [BigInt::from(-m), BigInt::from(m) - 1, BigInt::from(1)]
            .into_iter()
            .filter(|x| !x.is_zero())
            .collect();
    (0..mat.rows()).all(|i| {
        let mut pool = allowed.clone();
        mat.row_slice(i).iter().filter(|x| !x.is_zero()).all(|x| {
            match pool.iter().position(|a| a == x) {
                Some(at) => {
                    pool.swap_remove(at);
                    true
                }
                None => false,
            }
        })
    })
}
