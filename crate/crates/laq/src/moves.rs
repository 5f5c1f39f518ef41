//! Reidemeister moves R1/R2/R3 as rewrites on PD diagrams, transport of
//! colorings through moves, and a bounded best-first search minimizing the
//! number of distinct colors.
//!
//! Faces are computed from the planar rotation system implicit in PD
//! tuples (the four slots of a crossing in counterclockwise order): a face
//! is an orbit of ports under "arrive at slot s, depart from slot s-1".
//! PD codes whose face count violates Euler's formula are rejected, and
//! every surgery re-checks planarity of its result, so only moves
//! realizable in the plane are ever offered.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, HashSet};
use std::time::{Duration, Instant};
use thiserror::Error;

use crate::bounds::BoundsError;
use crate::coloring::{validate_coloring, Coloring, ColoringError};
use crate::diagram::{CrossingId, DiagramError, EdgeId, KnotDiagram};

#[derive(Debug, Error, PartialEq)]
pub enum MoveError {
    #[error("PD code is not planar: traced {faces} faces where Euler requires {expected}")]
    NonPlanar { faces: usize, expected: usize },
    #[error("no applicable move of this kind at the given edges")]
    InapplicableSite,
    #[error("the move would leave a component without crossings")]
    EmptyResult,
    #[error("move surgery produced an inconsistent diagram")]
    SurgeryFailed,
    #[error("the coloring could not be transported through the move")]
    TransportFailed,
    #[error("color minimization requires a valid nontrivial coloring mod p")]
    UnsupportedColoring,
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveKind {
    R1Plus,
    R1Minus,
    R2Plus,
    R2Minus,
    R3,
}

/// One applicable move: the kind, the edges identifying the local pattern
/// in the diagram the move applies to, and a variant index selecting among
/// the finitely many orientation/side choices at that pattern.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoveSite {
    pub kind: MoveKind,
    /// R1+: `[edge]`; R1-: `[loop_edge]`; R2+: `[pushed, target]`;
    /// R2-: `[over_edge, under_edge]`; R3: `[over_side, mixed_side,
    /// under_side]`.
    pub edges: Vec<EdgeId>,
    pub variant: usize,
}

/// A face of the diagram: the ports (crossing, slot) arrived at while
/// tracing its boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    arrivals: Vec<(CrossingId, usize)>,
}

impl Face {
    pub fn degree(&self) -> usize {
        self.arrivals.len()
    }

    pub fn arrivals(&self) -> &[(CrossingId, usize)] {
        &self.arrivals
    }
}

/// The result of applying a move: the rewritten diagram plus, per new
/// edge, the old edge it originates from (fresh interior edges have none).
#[derive(Clone, Debug)]
pub struct MoveOutcome {
    pub diagram: KnotDiagram,
    origin: Vec<Option<EdgeId>>,
}

fn tuples_of(d: &KnotDiagram) -> Vec<[usize; 4]> {
    d.crossings().iter().map(|x| x.tuple()).collect()
}

fn over_slot_of(d: &KnotDiagram, ci: CrossingId) -> usize {
    if d.over_in(ci) == d.crossings()[ci].over_a {
        1
    } else {
        3
    }
}

/// Label-indexed table of the two (crossing, slot) occurrences per edge.
struct Occ {
    ports: Vec<[(usize, usize); 2]>,
    seen: Vec<u8>,
}

impl Occ {
    /// `None` unless every label is in `1..=cap` and occurs exactly twice
    /// or not at all.
    fn build(tuples: &[[usize; 4]], cap: usize) -> Option<Occ> {
        let mut ports = vec![[(0, 0); 2]; cap + 1];
        let mut seen = vec![0u8; cap + 1];
        for (ci, t) in tuples.iter().enumerate() {
            for (slot, &e) in t.iter().enumerate() {
                if e == 0 || e > cap || seen[e] == 2 {
                    return None;
                }
                ports[e][seen[e] as usize] = (ci, slot);
                seen[e] += 1;
            }
        }
        if seen.iter().any(|&c| c == 1) {
            return None;
        }
        Some(Occ { ports, seen })
    }

    fn pair(&self, e: usize) -> Option<[(usize, usize); 2]> {
        (e < self.seen.len() && self.seen[e] == 2).then(|| self.ports[e])
    }

    fn partner(&self, e: usize, port: (usize, usize)) -> (usize, usize) {
        let [p, q] = self.ports[e];
        if p == port {
            q
        } else {
            p
        }
    }
}

fn label_cap(tuples: &[[usize; 4]]) -> usize {
    tuples.iter().flatten().copied().max().unwrap_or(0)
}

/// Orbits of ports under the face-tracing rule.
fn trace_faces(tuples: &[[usize; 4]], occ: &Occ) -> Vec<Vec<(usize, usize)>> {
    let mut visited = vec![[false; 4]; tuples.len()];
    let mut faces = Vec::new();
    for start_c in 0..tuples.len() {
        for start_s in 0..4 {
            if visited[start_c][start_s] {
                continue;
            }
            let mut arrivals = Vec::new();
            let (mut ci, mut slot) = (start_c, start_s);
            loop {
                visited[ci][slot] = true;
                arrivals.push((ci, slot));
                let depart = (slot + 3) % 4;
                (ci, slot) = occ.partner(tuples[ci][depart], (ci, depart));
                if (ci, slot) == (start_c, start_s) {
                    break;
                }
            }
            faces.push(arrivals);
        }
    }
    faces
}

/// Connected components of the 4-valent graph (crossings joined by edges).
fn graph_component_count(tuples: &[[usize; 4]], cap: usize) -> usize {
    let n = tuples.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut first_seen = vec![usize::MAX; cap + 1];
    for (ci, t) in tuples.iter().enumerate() {
        for &e in t {
            if first_seen[e] == usize::MAX {
                first_seen[e] = ci;
            } else {
                let (a, b) = (find(&mut parent, ci), find(&mut parent, first_seen[e]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

fn planar_face_check(tuples: &[[usize; 4]]) -> Option<(Vec<Vec<(usize, usize)>>, usize)> {
    let cap = label_cap(tuples);
    let occ = Occ::build(tuples, cap)?;
    let faces = trace_faces(tuples, &occ);
    let expected = tuples.len() + 2 * graph_component_count(tuples, cap);
    Some((faces, expected))
}

fn is_planar(tuples: &[[usize; 4]]) -> bool {
    planar_face_check(tuples).is_some_and(|(faces, expected)| faces.len() == expected)
}

/// Faces of the diagram; errors when the PD code is not realizable in the
/// plane with the rotation system its tuples encode.
pub fn faces(d: &KnotDiagram) -> Result<Vec<Face>, MoveError> {
    let tuples = tuples_of(d);
    let (traced, expected) = planar_face_check(&tuples).ok_or(MoveError::SurgeryFailed)?;
    if traced.len() != expected {
        return Err(MoveError::NonPlanar { faces: traced.len(), expected });
    }
    Ok(traced.into_iter().map(|arrivals| Face { arrivals }).collect())
}

/// An intermediate rewrite: tuples over arbitrary labels, the intended
/// over-in slot per crossing, and the old edge each label originates from.
#[derive(Clone)]
struct Proto {
    tuples: Vec<[usize; 4]>,
    over_slot: Vec<usize>,
    origin: HashMap<usize, EdgeId>,
    next_label: usize,
}

impl Proto {
    fn from_diagram(d: &KnotDiagram) -> Proto {
        let tuples = tuples_of(d);
        let over_slot = (0..tuples.len()).map(|ci| over_slot_of(d, ci)).collect();
        let origin = (1..=d.edge_count()).map(|e| (e, e)).collect();
        Proto { tuples, over_slot, origin, next_label: d.edge_count() + 1 }
    }

    fn fresh(&mut self) -> usize {
        let l = self.next_label;
        self.next_label += 1;
        l
    }

    fn occ(&self) -> Option<Occ> {
        Occ::build(&self.tuples, self.next_label - 1)
    }

    /// The head (arriving) occurrence of a label, per the intended
    /// orientation.
    fn head_of(&self, label: usize) -> Result<(usize, usize), MoveError> {
        let occ = self.occ().ok_or(MoveError::SurgeryFailed)?;
        let pair = occ.pair(label).ok_or(MoveError::SurgeryFailed)?;
        let mut head = None;
        for (ci, slot) in pair {
            if slot == 0 || slot == self.over_slot[ci] {
                if head.replace((ci, slot)).is_some() {
                    return Err(MoveError::SurgeryFailed);
                }
            }
        }
        head.ok_or(MoveError::SurgeryFailed)
    }

    /// Renumbers edges along strands and assembles the final diagram.
    fn finalize(&self) -> Result<MoveOutcome, MoveError> {
        if self.tuples.is_empty() {
            return Err(MoveError::EmptyResult);
        }
        let occ = self.occ().ok_or(MoveError::SurgeryFailed)?;
        // Arriving occurrence per label; every label needs exactly one
        // head and one tail for the strands to be consistently oriented.
        let mut heads: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for label in 1..self.next_label {
            let Some(pair) = occ.pair(label) else { continue };
            let mut head = None;
            let mut tail = None;
            for (ci, slot) in pair {
                if slot == 0 || slot == self.over_slot[ci] {
                    if head.replace((ci, slot)).is_some() {
                        return Err(MoveError::SurgeryFailed);
                    }
                } else if tail.replace((ci, slot)).is_some() {
                    return Err(MoveError::SurgeryFailed);
                }
            }
            match (head, tail) {
                (Some(h), Some(_)) => {
                    heads.insert(label, h);
                }
                _ => return Err(MoveError::SurgeryFailed),
            }
        }
        // Walk each strand from its smallest label, numbering edges
        // consecutively in strand order.
        let mut new_of: HashMap<usize, usize> = HashMap::new();
        let mut next_id = 1usize;
        let labels: Vec<usize> = heads.keys().copied().collect();
        for &start in &labels {
            if new_of.contains_key(&start) {
                continue;
            }
            let mut cur = start;
            loop {
                if new_of.insert(cur, next_id).is_some() {
                    return Err(MoveError::SurgeryFailed);
                }
                next_id += 1;
                let (ci, slot) = heads[&cur];
                let exit = if slot == 0 { 2 } else { 4 - slot };
                let nxt = self.tuples[ci][exit];
                if nxt == start {
                    break;
                }
                cur = nxt;
            }
        }
        if new_of.len() != labels.len() {
            return Err(MoveError::SurgeryFailed);
        }
        let new_tuples: Vec<[usize; 4]> = self
            .tuples
            .iter()
            .map(|t| [new_of[&t[0]], new_of[&t[1]], new_of[&t[2]], new_of[&t[3]]])
            .collect();
        let diagram =
            KnotDiagram::from_tuples(new_tuples).map_err(|_| MoveError::SurgeryFailed)?;
        let mut origin = vec![None; diagram.edge_count() + 1];
        for (label, &new_id) in &new_of {
            origin[new_id] = self.origin.get(label).copied();
        }
        Ok(MoveOutcome { diagram, origin })
    }

    fn planar_finalize(&self) -> Result<MoveOutcome, MoveError> {
        if !is_planar(&self.tuples) {
            return Err(MoveError::InapplicableSite);
        }
        self.finalize()
    }

    /// True iff some traced face has exactly this degree and edge set.
    fn has_face_with_edges(&self, degree: usize, edges: &BTreeSet<usize>) -> bool {
        let Some(occ) = self.occ() else {
            return false;
        };
        trace_faces(&self.tuples, &occ).iter().any(|f| {
            f.len() == degree
                && f.iter().map(|&(ci, s)| self.tuples[ci][s]).collect::<BTreeSet<_>>() == *edges
        })
    }
}

/// The four kink insertions on an edge `e` split as `e -> kink -> f` with
/// loop edge `l`: loop under/over x loop side.
fn kink_templates(e: usize, f: usize, l: usize) -> [([usize; 4], usize); 4] {
    [
        ([e, f, l, l], 3),
        ([e, l, l, f], 1),
        ([l, e, f, l], 1),
        ([l, l, f, e], 3),
    ]
}

fn build_r1_plus(d: &KnotDiagram, e: EdgeId, variant: usize) -> Result<MoveOutcome, MoveError> {
    if e == 0 || e > d.edge_count() || variant >= 4 {
        return Err(MoveError::InapplicableSite);
    }
    let mut proto = Proto::from_diagram(d);
    let (k_in, s_in) = proto.head_of(e)?;
    let f = proto.fresh();
    let l = proto.fresh();
    proto.tuples[k_in][s_in] = f;
    let (tuple, over_slot) = kink_templates(e, f, l)[variant];
    proto.tuples.push(tuple);
    proto.over_slot.push(over_slot);
    // All three pieces of the kinked strand keep the old color (a*a = a).
    proto.origin.insert(f, e);
    proto.origin.insert(l, e);
    proto.planar_finalize()
}

fn build_r2_plus(
    d: &KnotDiagram,
    pushed: EdgeId,
    target: EdgeId,
    variant: usize,
) -> Result<MoveOutcome, MoveError> {
    let max_edge = d.edge_count();
    if pushed == 0 || target == 0 || pushed > max_edge || target > max_edge {
        return Err(MoveError::InapplicableSite);
    }
    if pushed == target || variant >= 16 {
        return Err(MoveError::InapplicableSite);
    }
    let push_over = variant & 8 != 0;
    let target_meets_second = variant & 4 != 0;
    let chir = [variant & 2 != 0, variant & 1 != 0];

    let mut proto = Proto::from_diagram(d);
    let (kp, sp) = proto.head_of(pushed)?;
    let (kt, st) = proto.head_of(target)?;
    let t1 = proto.fresh();
    let f1 = proto.fresh();
    let t2 = proto.fresh();
    let f2 = proto.fresh();
    proto.tuples[kp][sp] = f1;
    proto.tuples[kt][st] = f2;

    // The pushed strand runs pushed -> [new 1] -> t1 -> [new 2] -> f1; the
    // target strand passes new 1 then new 2, or new 2 then new 1.
    let pushed_pairs = [(pushed, t1), (t1, f1)];
    let target_pairs = if target_meets_second {
        [(t2, f2), (target, t2)]
    } else {
        [(target, t2), (t2, f2)]
    };
    for i in 0..2 {
        let ((u_in, u_out), (o_in, o_out)) = if push_over {
            (target_pairs[i], pushed_pairs[i])
        } else {
            (pushed_pairs[i], target_pairs[i])
        };
        let (tuple, over_slot) = if chir[i] {
            ([u_in, o_out, u_out, o_in], 3)
        } else {
            ([u_in, o_in, u_out, o_out], 1)
        };
        proto.tuples.push(tuple);
        proto.over_slot.push(over_slot);
    }
    // The strand passing over keeps its color across the bight; the under
    // strand's interior piece is recolored and solved during transport.
    proto.origin.insert(f1, pushed);
    proto.origin.insert(f2, target);
    if push_over {
        proto.origin.insert(t1, pushed);
    } else {
        proto.origin.insert(t2, target);
    }
    if !is_planar(&proto.tuples) {
        return Err(MoveError::InapplicableSite);
    }
    if !proto.has_face_with_edges(2, &BTreeSet::from([t1, t2])) {
        return Err(MoveError::InapplicableSite);
    }
    proto.finalize()
}

fn build_r1_minus(d: &KnotDiagram, l: EdgeId) -> Result<MoveOutcome, MoveError> {
    let tuples = tuples_of(d);
    let occ = Occ::build(&tuples, label_cap(&tuples)).ok_or(MoveError::SurgeryFailed)?;
    let [(c1, s1), (c2, s2)] = occ.pair(l).ok_or(MoveError::InapplicableSite)?;
    // A kink: both ends at one crossing, in cyclically adjacent slots.
    if c1 != c2 || !((s1 + 1) % 4 == s2 || (s2 + 1) % 4 == s1) {
        return Err(MoveError::InapplicableSite);
    }
    let k = c1;
    let over_slot = over_slot_of(d, k);
    let mut e_in = None;
    let mut e_out = None;
    for slot in 0..4 {
        if slot == s1 || slot == s2 {
            continue;
        }
        if slot == 0 || slot == over_slot {
            e_in = Some(tuples[k][slot]);
        } else {
            e_out = Some(tuples[k][slot]);
        }
    }
    let (e_in, e_out) = match (e_in, e_out) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(MoveError::InapplicableSite),
    };
    if e_in == e_out {
        return Err(MoveError::EmptyResult);
    }
    let rep = e_in.min(e_out);
    let gone = e_in.max(e_out);
    let mut proto = Proto::from_diagram(d);
    proto.tuples.remove(k);
    proto.over_slot.remove(k);
    for t in &mut proto.tuples {
        for slot in t.iter_mut() {
            if *slot == gone {
                *slot = rep;
            }
        }
    }
    if proto.tuples.is_empty() || !proto.tuples.iter().flatten().any(|&e| e == rep) {
        return Err(MoveError::EmptyResult);
    }
    if !is_planar(&proto.tuples) {
        return Err(MoveError::SurgeryFailed);
    }
    proto.finalize()
}

fn build_r2_minus(
    d: &KnotDiagram,
    over_e: EdgeId,
    under_e: EdgeId,
) -> Result<MoveOutcome, MoveError> {
    if over_e == under_e {
        return Err(MoveError::InapplicableSite);
    }
    let tuples = tuples_of(d);
    let occ = Occ::build(&tuples, label_cap(&tuples)).ok_or(MoveError::SurgeryFailed)?;
    let [(ka, sa), (kb, sb)] = occ.pair(over_e).ok_or(MoveError::InapplicableSite)?;
    let under_pair = occ.pair(under_e).ok_or(MoveError::InapplicableSite)?;
    let [(kc, sc), (kd, sd)] = under_pair;
    if ka == kb
        || BTreeSet::from([ka, kb]) != BTreeSet::from([kc, kd])
        || sa % 2 == 0
        || sb % 2 == 0
        || sc % 2 != 0
        || sd % 2 != 0
    {
        return Err(MoveError::InapplicableSite);
    }
    // The pair must bound an empty bigon, not merely cross twice.
    let bigon = faces(d)?.into_iter().any(|f| {
        f.degree() == 2
            && f.arrivals()
                .iter()
                .map(|&(ci, s)| tuples[ci][s])
                .collect::<BTreeSet<_>>()
                == BTreeSet::from([over_e, under_e])
    });
    if !bigon {
        return Err(MoveError::InapplicableSite);
    }

    // Stubs of the over strand: where it arrives before the bigon and
    // departs after it; likewise for the under strand.
    let mut a_in = None;
    let mut a_out = None;
    for &(k, s) in &[(ka, sa), (kb, sb)] {
        let over_slot = over_slot_of(d, k);
        if s == over_slot {
            a_out = Some(tuples[k][4 - over_slot]);
        } else {
            a_in = Some(tuples[k][over_slot]);
        }
    }
    let mut b_in = None;
    let mut b_out = None;
    for (k, s) in under_pair {
        if s == 0 {
            b_out = Some(tuples[k][2]);
        } else {
            b_in = Some(tuples[k][0]);
        }
    }
    let (a_in, a_out, b_in, b_out) = match (a_in, a_out, b_in, b_out) {
        (Some(a), Some(b), Some(c), Some(e)) => (a, b, c, e),
        _ => return Err(MoveError::InapplicableSite),
    };

    // Merge each strand's three pieces into one edge.
    let mut parent: HashMap<usize, usize> = HashMap::new();
    fn find(parent: &HashMap<usize, usize>, x: usize) -> usize {
        let mut r = x;
        while let Some(&p) = parent.get(&r) {
            if p == r {
                break;
            }
            r = p;
        }
        r
    }
    let union = |parent: &mut HashMap<usize, usize>, a: usize, b: usize| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            parent.insert(ra.max(rb), ra.min(rb));
        }
    };
    union(&mut parent, a_in, over_e);
    union(&mut parent, over_e, a_out);
    union(&mut parent, b_in, under_e);
    union(&mut parent, under_e, b_out);

    let mut proto = Proto::from_diagram(d);
    let (hi, lo) = (ka.max(kb), ka.min(kb));
    proto.tuples.remove(hi);
    proto.over_slot.remove(hi);
    proto.tuples.remove(lo);
    proto.over_slot.remove(lo);
    for t in &mut proto.tuples {
        for slot in t.iter_mut() {
            *slot = find(&parent, *slot);
        }
    }
    // The merged edges take their colors from the external stubs; the
    // interior labels (which may be the representatives) carried the
    // bight colors, which do not survive the move.
    proto.origin.insert(find(&parent, over_e), a_in);
    proto.origin.insert(find(&parent, under_e), b_in);
    if proto.tuples.is_empty() {
        return Err(MoveError::EmptyResult);
    }
    for strand_rep in [find(&parent, over_e), find(&parent, under_e)] {
        if !proto.tuples.iter().flatten().any(|&e| e == strand_rep) {
            return Err(MoveError::EmptyResult);
        }
    }
    if !is_planar(&proto.tuples) {
        return Err(MoveError::SurgeryFailed);
    }
    proto.finalize()
}

/// Role data for one strand of an R3 triangle: the triangle crossing it
/// meets second and the stub edges before and after its side.
struct R3Strand {
    second: CrossingId,
    stub_in: EdgeId,
    stub_out: EdgeId,
}

fn r3_strand(d: &KnotDiagram, side: EdgeId) -> Option<R3Strand> {
    let tuples = tuples_of(d);
    let occ = Occ::build(&tuples, label_cap(&tuples))?;
    let pair = occ.pair(side)?;
    // The side's head occurrence marks the strand's second crossing;
    // over/under at a crossing is read off the slot parity.
    let head_at = |k: usize, s: usize| s == 0 || s == over_slot_of(d, k);
    let ((c1, s1), (c2, s2)) = (pair[0], pair[1]);
    let (first, second) = match (head_at(c1, s1), head_at(c2, s2)) {
        (false, true) => (c1, c2),
        (true, false) => (c2, c1),
        _ => return None,
    };
    let over_at = |k: CrossingId| pair.iter().any(|&(ci, s)| ci == k && s % 2 == 1);
    let arriving = |k: CrossingId| {
        if over_at(k) {
            tuples[k][over_slot_of(d, k)]
        } else {
            tuples[k][0]
        }
    };
    let departing = |k: CrossingId| {
        if over_at(k) {
            tuples[k][4 - over_slot_of(d, k)]
        } else {
            tuples[k][2]
        }
    };
    Some(R3Strand {
        second,
        stub_in: arriving(first),
        stub_out: departing(second),
    })
}

fn build_r3(d: &KnotDiagram, sides: [EdgeId; 3], variant: usize) -> Result<MoveOutcome, MoveError> {
    if variant >= 8 {
        return Err(MoveError::InapplicableSite);
    }
    let [x, y, z] = sides;
    if x == y || y == z || x == z {
        return Err(MoveError::InapplicableSite);
    }
    let tuples = tuples_of(d);
    let occ = Occ::build(&tuples, label_cap(&tuples)).ok_or(MoveError::SurgeryFailed)?;
    let crossings_of = |e: EdgeId| -> Option<BTreeSet<CrossingId>> {
        occ.pair(e).map(|pair| pair.iter().map(|&(ci, _)| ci).collect())
    };
    let (cx, cy, cz) = match (crossings_of(x), crossings_of(y), crossings_of(z)) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(MoveError::InapplicableSite),
    };
    if cx.len() != 2 || cy.len() != 2 || cz.len() != 2 {
        return Err(MoveError::InapplicableSite);
    }
    let inter = |a: &BTreeSet<usize>, b: &BTreeSet<usize>| -> Option<usize> {
        let common: Vec<usize> = a.intersection(b).copied().collect();
        (common.len() == 1).then(|| common[0])
    };
    let (c_xy, c_xz, c_yz) = match (inter(&cx, &cy), inter(&cx, &cz), inter(&cy, &cz)) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(MoveError::InapplicableSite),
    };
    if c_xy == c_xz || c_xy == c_yz || c_xz == c_yz {
        return Err(MoveError::InapplicableSite);
    }
    // Over/under pattern: x over at both of its crossings, z under at
    // both, y under at c_xy and over at c_yz.
    let over_at = |e: EdgeId, k: CrossingId| {
        occ.pair(e)
            .expect("sides occur twice")
            .iter()
            .any(|&(ci, s)| ci == k && s % 2 == 1)
    };
    if !over_at(x, c_xy)
        || !over_at(x, c_xz)
        || over_at(z, c_xz)
        || over_at(z, c_yz)
        || over_at(y, c_xy)
        || !over_at(y, c_yz)
    {
        return Err(MoveError::InapplicableSite);
    }
    let sx = r3_strand(d, x).ok_or(MoveError::InapplicableSite)?;
    let sy = r3_strand(d, y).ok_or(MoveError::InapplicableSite)?;
    let sz = r3_strand(d, z).ok_or(MoveError::InapplicableSite)?;

    let mut proto = Proto::from_diagram(d);
    let nx = proto.fresh();
    let ny = proto.fresh();
    let nz = proto.fresh();
    // After the slide each strand visits its two crossings in the other
    // order: stub_in -> [old second] -> new side -> [old first] -> stub_out.
    let ends = |s: &R3Strand, fresh: usize, k: CrossingId| -> (usize, usize) {
        if k == s.second {
            (s.stub_in, fresh)
        } else {
            (fresh, s.stub_out)
        }
    };
    let rebuild = [
        (c_xy, (&sy, ny), (&sx, nx)),
        (c_xz, (&sz, nz), (&sx, nx)),
        (c_yz, (&sz, nz), (&sy, ny)),
    ];
    for (i, &(k, (under, u_fresh), (over, o_fresh))) in rebuild.iter().enumerate() {
        let (u_in, u_out) = ends(under, u_fresh, k);
        let (o_in, o_out) = ends(over, o_fresh, k);
        let (tuple, over_slot) = if variant & (1 << i) != 0 {
            ([u_in, o_out, u_out, o_in], 3)
        } else {
            ([u_in, o_in, u_out, o_out], 1)
        };
        proto.tuples[k] = tuple;
        proto.over_slot[k] = over_slot;
    }
    if !is_planar(&proto.tuples) {
        return Err(MoveError::InapplicableSite);
    }
    if !proto.has_face_with_edges(3, &BTreeSet::from([nx, ny, nz])) {
        return Err(MoveError::InapplicableSite);
    }
    proto.finalize()
}

/// The R3 side roles of a triangle face, when its over/under pattern
/// admits a slide: `[over_both, mixed, under_both]`.
fn r3_roles(tuples: &[[usize; 4]], occ: &Occ, face: &Face) -> Option<[EdgeId; 3]> {
    if face.degree() != 3 {
        return None;
    }
    let crossings: BTreeSet<CrossingId> = face.arrivals.iter().map(|&(ci, _)| ci).collect();
    if crossings.len() != 3 {
        return None;
    }
    let sides: Vec<EdgeId> = face.arrivals.iter().map(|&(ci, s)| tuples[ci][s]).collect();
    if sides.iter().collect::<BTreeSet<_>>().len() != 3 {
        return None;
    }
    let over_count = |e: EdgeId| -> usize {
        occ.pair(e)
            .map(|pair| {
                pair.iter()
                    .filter(|&&(ci, s)| crossings.contains(&ci) && s % 2 == 1)
                    .count()
            })
            .unwrap_or(3)
    };
    let mut x = None;
    let mut y = None;
    let mut z = None;
    for &s in &sides {
        match over_count(s) {
            2 => x = Some(s),
            1 => y = Some(s),
            0 => z = Some(s),
            _ => return None,
        }
    }
    match (x, y, z) {
        (Some(x), Some(y), Some(z)) => Some([x, y, z]),
        _ => None,
    }
}

/// All applicable sites with, where construction succeeds, their
/// outcomes. With `prune` set, moves that cannot reduce the distinct
/// color count directly are skipped: every R1+, and R2+ pushes between
/// same-colored arcs.
fn survey(
    d: &KnotDiagram,
    prune: Option<&Coloring>,
) -> Result<Vec<(MoveSite, Option<MoveOutcome>)>, MoveError> {
    let fs = faces(d)?;
    let tuples = tuples_of(d);
    let occ = Occ::build(&tuples, label_cap(&tuples)).ok_or(MoveError::SurgeryFailed)?;
    let mut out: Vec<(MoveSite, Option<MoveOutcome>)> = Vec::new();
    let mut seen_r1m = BTreeSet::new();
    let mut seen_r2m = BTreeSet::new();
    let mut seen_r3 = BTreeSet::new();
    for f in &fs {
        match f.degree() {
            1 => {
                let (ci, s) = f.arrivals[0];
                let l = tuples[ci][s];
                if seen_r1m.insert(l) {
                    let site = MoveSite { kind: MoveKind::R1Minus, edges: vec![l], variant: 0 };
                    let outcome = build_r1_minus(d, l).ok();
                    out.push((site, outcome));
                }
            }
            2 => {
                let edges: Vec<EdgeId> =
                    f.arrivals.iter().map(|&(ci, s)| tuples[ci][s]).collect();
                let (a, b) = (edges[0], edges[1]);
                if a == b {
                    continue;
                }
                let all_over = |e: EdgeId| {
                    occ.pair(e).is_some_and(|pair| pair.iter().all(|&(_, s)| s % 2 == 1))
                };
                let all_under = |e: EdgeId| {
                    occ.pair(e).is_some_and(|pair| pair.iter().all(|&(_, s)| s % 2 == 0))
                };
                let pair = if all_over(a) && all_under(b) {
                    Some((a, b))
                } else if all_over(b) && all_under(a) {
                    Some((b, a))
                } else {
                    None
                };
                if let Some((over_e, under_e)) = pair {
                    if seen_r2m.insert((over_e, under_e)) {
                        let site = MoveSite {
                            kind: MoveKind::R2Minus,
                            edges: vec![over_e, under_e],
                            variant: 0,
                        };
                        let outcome = build_r2_minus(d, over_e, under_e).ok();
                        out.push((site, outcome));
                    }
                }
            }
            3 => {
                if let Some(sides) = r3_roles(&tuples, &occ, f) {
                    if seen_r3.insert(sides) {
                        for variant in 0..8 {
                            if let Ok(o) = build_r3(d, sides, variant) {
                                let site = MoveSite {
                                    kind: MoveKind::R3,
                                    edges: sides.to_vec(),
                                    variant,
                                };
                                out.push((site, Some(o)));
                            }
                        }
                    }
                }
            }
            _ => {}
        }
    }
    if prune.is_none() {
        for e in 1..=d.edge_count() {
            for variant in 0..4 {
                if let Ok(o) = build_r1_plus(d, e, variant) {
                    let site = MoveSite { kind: MoveKind::R1Plus, edges: vec![e], variant };
                    out.push((site, Some(o)));
                }
            }
        }
    }
    let mut pairs: BTreeSet<(EdgeId, EdgeId)> = BTreeSet::new();
    for f in &fs {
        let edges: Vec<EdgeId> = f.arrivals.iter().map(|&(ci, s)| tuples[ci][s]).collect();
        for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                if edges[i] != edges[j] {
                    pairs.insert((edges[i].min(edges[j]), edges[i].max(edges[j])));
                }
            }
        }
    }
    for &(a, b) in &pairs {
        if let Some(coloring) = prune {
            if coloring.values[d.arc_index(a)?] == coloring.values[d.arc_index(b)?] {
                continue;
            }
        }
        for (pushed, target) in [(a, b), (b, a)] {
            for variant in 0..16 {
                if let Ok(o) = build_r2_plus(d, pushed, target, variant) {
                    let site = MoveSite {
                        kind: MoveKind::R2Plus,
                        edges: vec![pushed, target],
                        variant,
                    };
                    out.push((site, Some(o)));
                }
            }
        }
    }
    Ok(out)
}

/// All applicable move sites on the diagram, deterministically ordered.
pub fn enumerate_sites(d: &KnotDiagram) -> Result<Vec<MoveSite>, MoveError> {
    Ok(survey(d, None)?.into_iter().map(|(site, _)| site).collect())
}

/// Applies a move at a site, validating applicability from scratch.
pub fn apply_move(d: &KnotDiagram, site: &MoveSite) -> Result<MoveOutcome, MoveError> {
    match (site.kind, site.edges.as_slice()) {
        (MoveKind::R1Plus, &[e]) => build_r1_plus(d, e, site.variant),
        (MoveKind::R1Minus, &[l]) => build_r1_minus(d, l),
        (MoveKind::R2Plus, &[pushed, target]) => build_r2_plus(d, pushed, target, site.variant),
        (MoveKind::R2Minus, &[over_e, under_e]) => build_r2_minus(d, over_e, under_e),
        (MoveKind::R3, &[x, y, z]) => build_r3(d, [x, y, z], site.variant),
        _ => Err(MoveError::InapplicableSite),
    }
}

/// Solves `coeff * x = rhs`, modulo `p` when given, else exactly over the
/// integers. `None` when the coefficient is not invertible (or does not
/// divide the right side).
fn solve_scaled(coeff: &BigInt, rhs: &BigInt, modulus: Option<&BigInt>) -> Option<BigInt> {
    if let Some(p) = modulus {
        let c = coeff.mod_floor(p);
        if c.is_zero() {
            return None;
        }
        let ext = c.extended_gcd(p);
        ext.gcd.is_one().then(|| (ext.x * rhs).mod_floor(p))
    } else {
        if coeff.is_zero() {
            return None;
        }
        let (q, r) = rhs.div_rem(coeff);
        r.is_zero().then_some(q)
    }
}

/// Carries a coloring through a move: colors outside the neighborhood are
/// inherited via edge origins, interior arcs are solved from the crossing
/// relations (in either direction), and the result is re-validated.
pub fn transport(
    before: &KnotDiagram,
    outcome: &MoveOutcome,
    coloring: &Coloring,
) -> Result<Coloring, MoveError> {
    if coloring.values.len() != before.arc_count() {
        return Err(ColoringError::ArcCountMismatch {
            got: coloring.values.len(),
            want: before.arc_count(),
        }
        .into());
    }
    let after = &outcome.diagram;
    let mut known: Vec<Option<BigInt>> = vec![None; after.arc_count()];
    for e in 1..=after.edge_count() {
        if let Some(old) = outcome.origin[e] {
            let val = &coloring.values[before.arc_index(old)?];
            let idx = after.arc_index(e)?;
            match &known[idx] {
                Some(existing) if existing != val => return Err(MoveError::TransportFailed),
                _ => known[idx] = Some(val.clone()),
            }
        }
    }
    let m = BigInt::from(coloring.params.m());
    let one_minus_m = BigInt::from(1) - &m;
    let neg_one = BigInt::from(-1);
    let modulus = coloring.params.is_modular().then(|| BigInt::from(coloring.params.n()));
    // Fixpoint pass: at each crossing m*source + (1-m)*over - receiver = 0
    // holds, so whenever the relation has a single unknown arc it can be
    // solved for, dividing by the arc's accumulated coefficient.
    let roles = after.crossing_roles();
    let mut positions = Vec::with_capacity(roles.len());
    for r in &roles {
        positions.push([
            (after.arc_index(r.source)?, &m),
            (after.arc_index(r.over)?, &one_minus_m),
            (after.arc_index(r.receiver)?, &neg_one),
        ]);
    }
    loop {
        let mut progressed = false;
        for pos in &positions {
            let mut unknown = None;
            let mut single = true;
            for &(idx, _) in pos {
                if known[idx].is_none() {
                    match unknown {
                        None => unknown = Some(idx),
                        Some(u) if u == idx => {}
                        Some(_) => {
                            single = false;
                            break;
                        }
                    }
                }
            }
            let Some(x) = unknown else { continue };
            if !single {
                continue;
            }
            let mut coeff = BigInt::zero();
            let mut rhs = BigInt::zero();
            for &(idx, c) in pos {
                match &known[idx] {
                    Some(v) => rhs -= c * v,
                    None => coeff += c,
                }
            }
            if let Some(v) = solve_scaled(&coeff, &rhs, modulus.as_ref()) {
                known[x] = Some(v);
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    let values: Option<Vec<BigInt>> = known.into_iter().collect();
    let result =
        Coloring { params: coloring.params, values: values.ok_or(MoveError::TransportFailed)? };
    match validate_coloring(after, &result)? {
        (true, _) => Ok(result),
        _ => Err(MoveError::TransportFailed),
    }
}

/// All edge relabelings preserving orientation and per-component
/// contiguity: a rotation of each component's cycle and an order of the
/// component blocks. `map[old_edge] = new_label`.
fn relabel_maps(d: &KnotDiagram) -> Vec<Vec<usize>> {
    fn perms(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for rest in perms(k - 1) {
            for pos in 0..=rest.len() {
                let mut p = rest.clone();
                p.insert(pos, k - 1);
                out.push(p);
            }
        }
        out
    }
    let comps = d.components();
    let mut maps = Vec::new();
    for perm in perms(comps.len()) {
        let lens: Vec<usize> = perm.iter().map(|&i| comps[i].len()).collect();
        let mut rots = vec![0usize; comps.len()];
        loop {
            let mut map = vec![0usize; d.edge_count() + 1];
            let mut base = 1;
            for (pos, &ci) in perm.iter().enumerate() {
                let cyc = &comps[ci];
                for (offset, slot) in (0..cyc.len()).enumerate() {
                    map[cyc[(rots[pos] + slot) % cyc.len()]] = base + offset;
                }
                base += cyc.len();
            }
            maps.push(map);
            // Mixed-radix increment over the rotation choices.
            let mut pos = 0;
            while pos < rots.len() {
                rots[pos] += 1;
                if rots[pos] < lens[pos] {
                    break;
                }
                rots[pos] = 0;
                pos += 1;
            }
            if pos == rots.len() {
                break;
            }
        }
    }
    maps
}

fn relabeled_sorted_tuples(d: &KnotDiagram, map: &[usize]) -> Vec<[usize; 4]> {
    let mut tuples: Vec<[usize; 4]> = d
        .crossings()
        .iter()
        .map(|x| {
            let t = x.tuple();
            [map[t[0]], map[t[1]], map[t[2]], map[t[3]]]
        })
        .collect();
    tuples.sort_unstable();
    tuples
}

fn serialize_tuples(tuples: &[[usize; 4]]) -> String {
    tuples
        .iter()
        .map(|t| format!("{},{},{},{}", t[0], t[1], t[2], t[3]))
        .collect::<Vec<_>>()
        .join(";")
}

/// A key invariant under orientation-preserving PD relabeling: the minimal
/// serialization over all rotations of each component's numbering and all
/// component orders. Mirrors and orientation reversal are not quotiented.
pub fn canonical_form(d: &KnotDiagram) -> String {
    relabel_maps(d)
        .iter()
        .map(|map| serialize_tuples(&relabeled_sorted_tuples(d, map)))
        .min()
        .expect("at least the identity relabeling")
}

/// Canonical key of a colored diagram: the canonical form plus the color
/// vector minimized over the relabelings achieving it and over all affine
/// maps of the palette.
fn canonical_state(d: &KnotDiagram, coloring: &Coloring) -> Result<String, MoveError> {
    let p = coloring.params.n();
    if p == 0 {
        return Err(MoveError::UnsupportedColoring);
    }
    let values: Vec<u64> = coloring
        .values
        .iter()
        .map(|v| u64::try_from(v).map_err(|_| MoveError::UnsupportedColoring))
        .collect::<Result<_, _>>()?;
    // Edges of each arc, indexed like the color vector.
    let mut arc_edges: Vec<Vec<EdgeId>> = vec![Vec::new(); d.arc_count()];
    for e in 1..=d.edge_count() {
        arc_edges[d.arc_index(e)?].push(e);
    }
    let mut best_diagram: Option<String> = None;
    let mut best_colors: Option<Vec<u64>> = None;
    for map in relabel_maps(d) {
        let serial = serialize_tuples(&relabeled_sorted_tuples(d, &map));
        if let Some(cur) = &best_diagram {
            if serial > *cur {
                continue;
            }
            if serial < *cur {
                best_colors = None;
            }
        }
        best_diagram = Some(serial);
        // Arc order under the relabeling: by minimal new edge label.
        let mut order: Vec<(usize, usize)> = arc_edges
            .iter()
            .enumerate()
            .map(|(i, edges)| (edges.iter().map(|&e| map[e]).min().expect("nonempty arc"), i))
            .collect();
        order.sort_unstable();
        let permuted: Vec<u64> = order.iter().map(|&(_, i)| values[i]).collect();
        // The lexicographically minimal affine image starts with 0, which
        // pins mu given lambda.
        for lambda in 1..p {
            let mu = (p - (lambda * permuted[0]) % p) % p;
            let candidate: Vec<u64> = permuted.iter().map(|&v| (lambda * v + mu) % p).collect();
            if best_colors.as_ref().is_none_or(|b| candidate < *b) {
                best_colors = Some(candidate);
            }
        }
    }
    let colors = best_colors
        .expect("at least one relabeling")
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",");
    Ok(format!("{}#{colors}", best_diagram.expect("at least one relabeling")))
}

/// Caps on the color-minimization search.
#[derive(Clone, Debug)]
pub struct SearchBudget {
    pub max_depth: usize,
    pub max_crossings: usize,
    pub max_states: usize,
    pub time_limit: Duration,
    /// Skip moves that cannot change the color multiset directly:
    /// positive kinks and pushes between same-colored arcs.
    pub color_pruning: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_depth: 12,
            max_crossings: 14,
            max_states: 150_000,
            time_limit: Duration::from_secs(240),
            color_pruning: true,
        }
    }
}

/// Best colored diagram found by the search, with a replayable trace.
#[derive(Clone, Debug)]
pub struct MinimizeOutcome {
    pub diagram: KnotDiagram,
    pub coloring: Coloring,
    pub colors_used: usize,
    /// Sites to replay from the starting diagram, in order.
    pub trace: Vec<MoveSite>,
    pub lower_bound: i64,
    pub reached_lower_bound: bool,
    pub budget_exhausted: bool,
    pub states_explored: usize,
}

struct SearchNode {
    diagram: KnotDiagram,
    coloring: Coloring,
    parent: usize,
    site: Option<MoveSite>,
}

fn rarest_color_count(coloring: &Coloring) -> usize {
    let mut counts: BTreeMap<&BigInt, usize> = BTreeMap::new();
    for v in &coloring.values {
        *counts.entry(v).or_insert(0) += 1;
    }
    counts.values().copied().min().unwrap_or(0)
}

/// Best-first search over colored diagrams (fewest distinct colors first,
/// then fewest arcs of the rarest color, then fewest crossings),
/// deduplicated by canonical colored state, stopping early when the
/// combined lower bound is attained.
pub fn minimize_colors(
    d: &KnotDiagram,
    start: &Coloring,
    budget: &SearchBudget,
) -> Result<MinimizeOutcome, MoveError> {
    if !start.params.is_modular() || start.is_trivial() {
        return Err(MoveError::UnsupportedColoring);
    }
    if !validate_coloring(d, start)?.0 {
        return Err(MoveError::UnsupportedColoring);
    }
    let p = start.params.n();
    let m = start.params.m();
    let lower = crate::bounds::combined_lower_bound(d, p, m)?.best_lower;

    let mut nodes = vec![SearchNode {
        diagram: d.clone(),
        coloring: start.clone(),
        parent: 0,
        site: None,
    }];
    let mut best = (start.distinct_colors(), 0usize);
    let mut states_explored = 0usize;
    let mut budget_exhausted = false;

    if best.0 as i64 > lower {
        let started = Instant::now();
        let mut visited: HashSet<String> = HashSet::new();
        visited.insert(canonical_state(d, start)?);
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((best.0, rarest_color_count(start), d.crossing_count(), 0usize, 0usize)));
        'search: while let Some(Reverse((_, _, _, depth, idx))) = heap.pop() {
            if states_explored >= budget.max_states || started.elapsed() > budget.time_limit {
                budget_exhausted = true;
                break;
            }
            states_explored += 1;
            let (diagram, coloring) =
                (nodes[idx].diagram.clone(), nodes[idx].coloring.clone());
            let prune = budget.color_pruning.then_some(&coloring);
            for (site, outcome) in survey(&diagram, prune)? {
                let Some(outcome) = outcome else { continue };
                if outcome.diagram.crossing_count() > budget.max_crossings
                    || depth + 1 > budget.max_depth
                {
                    continue;
                }
                let Ok(transported) = transport(&diagram, &outcome, &coloring) else {
                    continue;
                };
                let key = canonical_state(&outcome.diagram, &transported)?;
                if !visited.insert(key) {
                    continue;
                }
                let colors = transported.distinct_colors();
                let rare = rarest_color_count(&transported);
                let crossings = outcome.diagram.crossing_count();
                nodes.push(SearchNode {
                    diagram: outcome.diagram,
                    coloring: transported,
                    parent: idx,
                    site: Some(site),
                });
                let new_idx = nodes.len() - 1;
                if colors < best.0 {
                    best = (colors, new_idx);
                    if best.0 as i64 <= lower {
                        break 'search;
                    }
                }
                heap.push(Reverse((colors, rare, crossings, depth + 1, new_idx)));
            }
        }
    }

    let mut trace = Vec::new();
    let mut cursor = best.1;
    while let Some(site) = nodes[cursor].site.clone() {
        trace.push(site);
        cursor = nodes[cursor].parent;
    }
    trace.reverse();
    let best_node = &nodes[best.1];
    Ok(MinimizeOutcome {
        diagram: best_node.diagram.clone(),
        coloring: best_node.coloring.clone(),
        colors_used: best.0,
        trace,
        lower_bound: lower,
        reached_lower_bound: best.0 as i64 <= lower,
        budget_exhausted,
        states_explored,
    })
}
