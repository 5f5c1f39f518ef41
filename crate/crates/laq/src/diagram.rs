//! PD-code parsing, validation, and the combinatorial structure of knot and
//! link diagrams: crossings, edges, merged arcs, components, orientation.
//!
//! A PD tuple `X[a,b,c,d]` lists the four edge ends at a crossing counter-
//! clockwise starting from the incoming under-edge `a`; `c` is the outgoing
//! under-edge and `{b,d}` are the two over-edges. Edge numbering runs 1..2c
//! contiguously along each component, and orientation is recovered from the
//! numbering (edge k+1 follows edge k, wrapping inside each component).

use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

pub type EdgeId = usize;
pub type ArcId = usize;
pub type CrossingId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("malformed token: {0:?}")]
    MalformedToken(String),
    #[error("edge {0} is not used exactly twice")]
    EdgeCountMismatch(EdgeId),
    #[error("edge ids are not numbered 1..2c contiguously along components")]
    NonContiguousNumbering,
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
}

/// One crossing of a PD code: `X[under_in, over_a, under_out, over_b]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Crossing {
    pub under_in: EdgeId,
    pub over_a: EdgeId,
    pub under_out: EdgeId,
    pub over_b: EdgeId,
}

impl Crossing {
    pub fn tuple(&self) -> [EdgeId; 4] {
        [self.under_in, self.over_a, self.under_out, self.over_b]
    }
}

/// The under-arcs of a crossing in their coloring roles: the product
/// `m*source + (1-m)*over` lands on `receiver`, the under-edge to the
/// right of the over-strand's direction of travel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrossingRole {
    pub source: EdgeId,
    pub over: EdgeId,
    pub receiver: EdgeId,
}

/// A validated, immutable PD-coded diagram.
#[derive(Clone, Debug)]
pub struct KnotDiagram {
    crossings: Vec<Crossing>,
    /// Per crossing, which of `{over_a, over_b}` is the incoming over-edge.
    over_in: Vec<EdgeId>,
    edge_count: usize,
    /// `arc_of[e]` = canonical representative (minimal edge) of e's arc.
    arc_of: Vec<ArcId>,
    /// Sorted distinct arc representatives.
    arcs: Vec<ArcId>,
    /// Oriented edge cycles, one per component, starting at the least edge.
    components: Vec<Vec<EdgeId>>,
}

impl KnotDiagram {
    /// Parses a PD code in either the `X[a,b,c,d] ...` text form, a JSON
    /// array of 4-tuples, or a JSON object `{"pd": [[...], ...]}`.
    pub fn parse_pd(text: &str) -> Result<Self, DiagramError> {
        let trimmed = text.trim();
        if trimmed.starts_with('{') || trimmed.starts_with('[') {
            return Self::parse_json(trimmed);
        }
        let mut tuples = Vec::new();
        let mut rest = trimmed;
        loop {
            rest = rest.trim_start_matches([' ', '\t', '\n', '\r', ',', ';']);
            if rest.is_empty() {
                break;
            }
            if !rest.starts_with('X') && !rest.starts_with('x') {
                return Err(DiagramError::MalformedToken(head_token(rest)));
            }
            let Some(open) = rest[1..].trim_start().strip_prefix('[') else {
                return Err(DiagramError::MalformedToken(head_token(rest)));
            };
            let Some(close) = open.find(']') else {
                return Err(DiagramError::MalformedToken(head_token(rest)));
            };
            let inner = &open[..close];
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            if parts.len() != 4 {
                return Err(DiagramError::MalformedToken(format!("X[{inner}]")));
            }
            let mut tuple = [0usize; 4];
            for (slot, part) in tuple.iter_mut().zip(&parts) {
                *slot = part
                    .parse::<usize>()
                    .map_err(|_| DiagramError::MalformedToken(format!("X[{inner}]")))?;
            }
            tuples.push(tuple);
            rest = &open[close + 1..];
        }
        if tuples.is_empty() {
            return Err(DiagramError::MalformedToken(String::from("<empty>")));
        }
        Self::from_tuples(tuples)
    }

    fn parse_json(text: &str) -> Result<Self, DiagramError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| DiagramError::MalformedToken(e.to_string()))?;
        let list = match &value {
            serde_json::Value::Array(a) => a,
            serde_json::Value::Object(o) => match o.get("pd") {
                Some(serde_json::Value::Array(a)) => a,
                _ => return Err(DiagramError::MalformedToken(String::from("missing \"pd\" array"))),
            },
            _ => return Err(DiagramError::MalformedToken(value.to_string())),
        };
        let mut tuples = Vec::new();
        for item in list {
            let arr = item.as_array().filter(|a| a.len() == 4).ok_or_else(|| {
                DiagramError::MalformedToken(item.to_string())
            })?;
            let mut tuple = [0usize; 4];
            for (slot, v) in tuple.iter_mut().zip(arr) {
                *slot = v
                    .as_u64()
                    .and_then(|x| usize::try_from(x).ok())
                    .ok_or_else(|| DiagramError::MalformedToken(item.to_string()))?;
            }
            tuples.push(tuple);
        }
        if tuples.is_empty() {
            return Err(DiagramError::MalformedToken(String::from("<empty>")));
        }
        Self::from_tuples(tuples)
    }

    /// Validates raw 4-tuples and assembles the diagram structure.
    pub fn from_tuples(tuples: Vec<[usize; 4]>) -> Result<Self, DiagramError> {
        let c = tuples.len();
        let edge_count = 2 * c;
        // Every edge id must occur exactly twice.
        let mut occurrences: BTreeMap<usize, usize> = BTreeMap::new();
        for t in &tuples {
            for &e in t {
                *occurrences.entry(e).or_insert(0) += 1;
            }
        }
        if let Some((&e, _)) = occurrences.iter().find(|(_, &n)| n != 2) {
            return Err(DiagramError::EdgeCountMismatch(e));
        }
        // Exactly the ids 1..2c.
        if occurrences.len() != edge_count
            || occurrences.keys().next() != Some(&1)
            || occurrences.keys().next_back() != Some(&edge_count)
        {
            return Err(DiagramError::NonContiguousNumbering);
        }

        let crossings: Vec<Crossing> = tuples
            .iter()
            .map(|&[a, b, cc, d]| Crossing { under_in: a, over_a: b, under_out: cc, over_b: d })
            .collect();
        let over_in = resolve_over_directions(&crossings, edge_count)?;

        // Successor map along strands; already total and single-valued
        // because each edge has exactly one resolved head and one tail.
        let mut succ = vec![0usize; edge_count + 1];
        for (ci, x) in crossings.iter().enumerate() {
            succ[x.under_in] = x.under_out;
            let (oi, oo) = if over_in[ci] == x.over_a {
                (x.over_a, x.over_b)
            } else {
                (x.over_b, x.over_a)
            };
            succ[oi] = oo;
        }

        // Components are the cycles of succ; the numbering must traverse
        // each component as one contiguous block (with wrap).
        let mut components = Vec::new();
        let mut seen = vec![false; edge_count + 1];
        for start in 1..=edge_count {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut e = succ[start];
            while e != start {
                if e == 0 || seen[e] {
                    return Err(DiagramError::NonContiguousNumbering);
                }
                seen[e] = true;
                cycle.push(e);
                e = succ[e];
            }
            let lo = *cycle.iter().min().expect("nonempty cycle");
            let hi = *cycle.iter().max().expect("nonempty cycle");
            if hi - lo + 1 != cycle.len() {
                return Err(DiagramError::NonContiguousNumbering);
            }
            let pos = cycle.iter().position(|&e| e == lo).expect("min present");
            cycle.rotate_left(pos);
            if cycle.iter().enumerate().any(|(i, &e)| e != lo + i) {
                return Err(DiagramError::NonContiguousNumbering);
            }
            components.push(cycle);
        }
        components.sort_by_key(|c| c[0]);

        // Arcs: union-find merging the two over-edges at each crossing.
        let mut parent: Vec<usize> = (0..=edge_count).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for x in &crossings {
            let (ra, rb) = (find(&mut parent, x.over_a), find(&mut parent, x.over_b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let arc_of: Vec<ArcId> =
            (0..=edge_count).map(|e| find(&mut parent, e)).collect();
        let mut arcs: Vec<ArcId> = arc_of[1..].to_vec();
        arcs.sort_unstable();
        arcs.dedup();

        Ok(KnotDiagram { crossings, over_in, edge_count, arc_of, arcs, components })
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted canonical arc representatives; the column order used by every
    /// matrix builder downstream.
    pub fn arcs_of(&self) -> &[ArcId] {
        &self.arcs
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Canonical arc representative of `edge`.
    pub fn arc_at(&self, edge: EdgeId) -> Result<ArcId, DiagramError> {
        if edge == 0 || edge > self.edge_count {
            return Err(DiagramError::UnknownEdge(edge));
        }
        Ok(self.arc_of[edge])
    }

    /// Position of `edge`'s arc within `arcs_of()` (its matrix column).
    pub fn arc_index(&self, edge: EdgeId) -> Result<usize, DiagramError> {
        let arc = self.arc_at(edge)?;
        Ok(self.arcs.binary_search(&arc).expect("arc representative present"))
    }

    /// Oriented edge cycles, one per component.
    pub fn components(&self) -> &[Vec<EdgeId>] {
        &self.components
    }

    pub fn is_knot(&self) -> bool {
        self.components.len() == 1
    }

    /// The incoming over-edge at crossing `ci`.
    pub fn over_in(&self, ci: CrossingId) -> EdgeId {
        self.over_in[ci]
    }

    /// Per-crossing coloring roles under the sign-aware rule: when the over
    /// strand enters at `over_a` the product lands on the outgoing
    /// under-edge, otherwise on the incoming one.
    pub fn crossing_roles(&self) -> Vec<CrossingRole> {
        self.crossings
            .iter()
            .zip(&self.over_in)
            .map(|(x, &oi)| {
                if oi == x.over_a {
                    CrossingRole { source: x.under_in, over: x.over_a, receiver: x.under_out }
                } else {
                    CrossingRole { source: x.under_out, over: x.over_b, receiver: x.under_in }
                }
            })
            .collect()
    }

    /// True iff every component passes under at least one crossing
    /// (precondition for the square Alexander matrix).
    pub fn every_component_under(&self) -> bool {
        self.components.iter().all(|cycle| {
            cycle.iter().any(|&e| self.crossings.iter().any(|x| x.under_in == e))
        })
    }

    /// True iff along every component the passages strictly alternate
    /// over/under. A one-crossing kink alternates vacuously (its two
    /// passages are one over and one under).
    pub fn is_alternating(&self) -> bool {
        let mut under_head = vec![false; self.edge_count + 1];
        for x in &self.crossings {
            under_head[x.under_in] = true;
        }
        self.components.iter().all(|cycle| {
            cycle.iter().zip(cycle.iter().cycle().skip(1)).all(|(&e, &f)| {
                under_head[e] != under_head[f]
            })
        })
    }

    /// Writes the diagram back in `X[a,b,c,d]` text form.
    pub fn serialize(&self) -> String {
        self.crossings
            .iter()
            .map(|x| format!("X[{},{},{},{}]", x.under_in, x.over_a, x.under_out, x.over_b))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// JSON view of the structure for CLI consumers.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "pd": self.crossings.iter().map(Crossing::tuple).collect::<Vec<_>>(),
            "crossings": self.crossing_count(),
            "edges": self.edge_count,
            "arcs": self.arcs,
            "arc_of": (1..=self.edge_count)
                .map(|e| (e.to_string(), self.arc_of[e]))
                .collect::<BTreeMap<_, _>>(),
            "components": self.components,
            "alternating": self.is_alternating(),
        })
    }
}

fn head_token(rest: &str) -> String {
    rest.split_whitespace().next().unwrap_or(rest).chars().take(32).collect()
}

/// Resolves, for each crossing, which over-edge is incoming. Slot roles
/// (under-in is a head, under-out is a tail, each edge has one head and one
/// tail, the two over slots of a crossing are complementary) propagate to a
/// fixed point; any still-ambiguous over pairs (components that never pass
/// under) are oriented by ascending edge numbering.
fn resolve_over_directions(
    crossings: &[Crossing],
    edge_count: usize,
) -> Result<Vec<EdgeId>, DiagramError> {
    const UNKNOWN: u8 = 0;
    const HEAD: u8 = 1;
    const TAIL: u8 = 2;
    let c = crossings.len();
    // role[ci][slot] for slots 0..4 = (under_in, over_a, under_out, over_b).
    let mut role = vec![[UNKNOWN; 4]; c];
    // Edge occurrence table: (crossing, slot) pairs.
    let mut occ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); edge_count + 1];
    for (ci, x) in crossings.iter().enumerate() {
        role[ci][0] = HEAD;
        role[ci][2] = TAIL;
        for (slot, e) in x.tuple().into_iter().enumerate() {
            occ[e].push((ci, slot));
        }
    }
    let other = |r: u8| if r == HEAD { TAIL } else { HEAD };
    let mut changed = true;
    while changed {
        changed = false;
        for e in 1..=edge_count {
            let [(c1, s1), (c2, s2)] = occ[e][..] else { unreachable!("validated arity") };
            let (r1, r2) = (role[c1][s1], role[c2][s2]);
            match (r1, r2) {
                (UNKNOWN, UNKNOWN) => {}
                (UNKNOWN, r) => {
                    role[c1][s1] = other(r);
                    changed = true;
                }
                (r, UNKNOWN) => {
                    role[c2][s2] = other(r);
                    changed = true;
                }
                (a, b) if a == b => return Err(DiagramError::NonContiguousNumbering),
                _ => {}
            }
        }
        for ci in 0..c {
            let (r1, r3) = (role[ci][1], role[ci][3]);
            match (r1, r3) {
                (UNKNOWN, UNKNOWN) => {}
                (UNKNOWN, r) => {
                    role[ci][1] = other(r);
                    changed = true;
                }
                (r, UNKNOWN) => {
                    role[ci][3] = other(r);
                    changed = true;
                }
                (a, b) if a == b => return Err(DiagramError::NonContiguousNumbering),
                _ => {}
            }
        }
    }
    // Numbering tiebreak for components that never pass under.
    for ci in 0..c {
        if role[ci][1] == UNKNOWN {
            let (b, d) = (crossings[ci].over_a, crossings[ci].over_b);
            let b_is_head = if d == b + 1 {
                true
            } else if b == d + 1 {
                false
            } else {
                b > d // wrap: the larger number ends its block
            };
            role[ci][1] = if b_is_head { HEAD } else { TAIL };
            role[ci][3] = other(role[ci][1]);
        }
    }
    // Each edge must now have exactly one head and one tail.
    for e in 1..=edge_count {
        let [(c1, s1), (c2, s2)] = occ[e][..] else { unreachable!("validated arity") };
        if role[c1][s1] == role[c2][s2] {
            return Err(DiagramError::NonContiguousNumbering);
        }
    }
    Ok(crossings
        .iter()
        .enumerate()
        .map(|(ci, x)| if role[ci][1] == HEAD { x.over_a } else { x.over_b })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";
    pub const FIG8: &str = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]";
    pub const HOPF: &str = "X[1,4,2,3] X[3,2,4,1]";
    pub const SPLIT: &str = "X[1,2,2,1] X[3,4,4,3]";

    #[test]
    fn parses_trefoil() {
        let d = KnotDiagram::parse_pd(TREFOIL).unwrap();
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(d.arc_count(), 3);
        assert_eq!(d.components().len(), 1);
        assert!(d.is_alternating());
        assert!(d.is_knot());
    }

    #[test]
    fn parses_json_forms() {
        let d1 = KnotDiagram::parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]").unwrap();
        let d2 = KnotDiagram::parse_pd(r#"{"pd": [[1,4,2,5],[3,6,4,1],[5,2,6,3]]}"#).unwrap();
        assert_eq!(d1.serialize(), d2.serialize());
        assert_eq!(d1.serialize(), TREFOIL);
    }

    #[test]
    fn kink_merges_to_single_arc() {
        let d = KnotDiagram::parse_pd("X[1,1,2,2]").unwrap();
        assert_eq!(d.crossing_count(), 1);
        assert_eq!(d.arc_count(), 1);
        // Per the stated convention the kink alternates vacuously.
        assert!(d.is_alternating());
    }

    #[test]
    fn error_cases() {
        assert_eq!(
            KnotDiagram::parse_pd("X[1,4,2,5] X[3,6,4,1]").unwrap_err(),
            DiagramError::EdgeCountMismatch(2)
        );
        assert_eq!(
            KnotDiagram::parse_pd("X[2,3,4,5] X[4,5,2,3]").unwrap_err(),
            DiagramError::NonContiguousNumbering
        );
        assert!(matches!(
            KnotDiagram::parse_pd("Y[1,1,2,2]"),
            Err(DiagramError::MalformedToken(_))
        ));
        assert!(matches!(
            KnotDiagram::parse_pd("X[1,1,2]"),
            Err(DiagramError::MalformedToken(_))
        ));
        let d = KnotDiagram::parse_pd(TREFOIL).unwrap();
        assert_eq!(d.arc_at(7).unwrap_err(), DiagramError::UnknownEdge(7));
    }

    #[test]
    fn hopf_and_split_components() {
        let hopf = KnotDiagram::parse_pd(HOPF).unwrap();
        assert_eq!(hopf.components().len(), 2);
        assert_eq!(hopf.arc_count(), 2);
        assert!(hopf.every_component_under());
        let split = KnotDiagram::parse_pd(SPLIT).unwrap();
        assert_eq!(split.components().len(), 2);
        assert_eq!(split.arc_count(), 2);
    }

    #[test]
    fn figure_eight_structure() {
        let d = KnotDiagram::parse_pd(FIG8).unwrap();
        assert_eq!(d.crossing_count(), 4);
        assert_eq!(d.arc_count(), 4);
        assert!(d.is_alternating());
    }

    #[test]
    fn alternation_detects_consecutive_passes() {
        // Figure-eight with its first crossing changed is no longer
        // alternating (edges 1 and 2 both pass under in a row).
        let d = KnotDiagram::parse_pd("X[1,4,2,5] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]").unwrap();
        assert!(!d.is_alternating());
    }

    #[test]
    fn round_trip_serialization() {
        for pd in [TREFOIL, FIG8, HOPF, SPLIT] {
            let d = KnotDiagram::parse_pd(pd).unwrap();
            let d2 = KnotDiagram::parse_pd(&d.serialize()).unwrap();
            assert_eq!(d.serialize(), d2.serialize());
            assert_eq!(d.arcs_of(), d2.arcs_of());
            assert_eq!(d.components(), d2.components());
        }
    }

    #[test]
    fn components_partition_edges() {
        for pd in [TREFOIL, FIG8, HOPF, SPLIT] {
            let d = KnotDiagram::parse_pd(pd).unwrap();
            let mut all: Vec<EdgeId> = d.components().iter().flatten().copied().collect();
            all.sort_unstable();
            assert_eq!(all, (1..=d.edge_count()).collect::<Vec<_>>());
        }
    }
}
