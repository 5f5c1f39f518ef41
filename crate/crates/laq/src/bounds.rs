//! Lower bounds and obstructions for the minimum number of colors of a
//! nontrivial (p, m)-coloring: the three-color floor, the four-color
//! criterion, the logarithmic bound, obstruction sets and their affine
//! images, and sufficient-set reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use std::collections::BTreeSet;
use thiserror::Error;

use crate::alexander::{alexander_polynomial, AlexanderError};
use crate::coloring::{validate_coloring, Coloring, ColoringError};
use crate::diagram::KnotDiagram;
use crate::linalg::is_prime;
use crate::palette::matnm_entry_bound;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("modulus {0} is not an odd prime")]
    NotPrime(u64),
    #[error("the logarithmic bound needs M = max(|m|, |m-1|) >= 2, got m = {0}")]
    InvalidM(i64),
    #[error("m = {m} is outside 1 < m < p = {p}")]
    MOutOfRange { p: u64, m: i64 },
    #[error("the coloring fails the crossing relation at crossing {0}")]
    InvalidColoring(usize),
    #[error("the trivial coloring admits no reduction report")]
    TrivialColoring,
    #[error("the Alexander polynomial vanishes identically (split diagram)")]
    VanishingAlexander,
    #[error(transparent)]
    Alexander(#[from] AlexanderError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

/// The logarithmic bound computed for one representative of m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentativeBound {
    pub representative: i64,
    /// `M = max(|m|, |m-1|)` for this representative.
    pub base: BigInt,
    /// `2 + floor(log_M p)`.
    pub bound: i64,
}

/// The logarithmic lower bound, computed both for the literal `m` and for
/// the shifted representative `m - p` of the same residue class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogBound {
    pub p: u64,
    pub m: i64,
    pub literal: RepresentativeBound,
    /// Absent only when the shifted representative degenerates to M <= 1.
    pub shifted: Option<RepresentativeBound>,
    pub best: i64,
    pub best_is_shifted: bool,
}

fn representative_bound(p: u64, representative: i64) -> Option<RepresentativeBound> {
    let base = matnm_entry_bound(representative);
    if base <= BigInt::from(1) {
        return None;
    }
    let target = BigInt::from(p);
    let mut power = base.clone();
    let mut floor_log = 0i64;
    while power <= target {
        power *= &base;
        floor_log += 1;
    }
    Some(RepresentativeBound { representative, base, bound: 2 + floor_log })
}

/// `2 + floor(log_M p) <= mincol`, for the caller's literal `m` and for
/// `m - p`; the spread can be large, so both are reported with the max
/// flagged.
pub fn log_lower_bound(p: u64, m: i64) -> Result<LogBound, BoundsError> {
    if p < 3 || !is_prime(p) {
        return Err(BoundsError::NotPrime(p));
    }
    let literal = representative_bound(p, m).ok_or(BoundsError::InvalidM(m))?;
    let shifted = representative_bound(p, m - p as i64);
    let (best, best_is_shifted) = match &shifted {
        Some(s) if s.bound > literal.bound => (s.bound, true),
        _ => (literal.bound, false),
    };
    Ok(LogBound { p, m, literal, shifted, best, best_is_shifted })
}

/// The three conditions under which the four-color criterion does not
/// apply, all read mod p.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StarCondition {
    /// `m ≡ 2 (mod p)`.
    MEqualsTwo,
    /// `m² - m + 1 ≡ 0 (mod p)`.
    MSquaredMinusMPlusOne,
    /// `2m - 1 ≡ 0 (mod p)`.
    TwoMMinusOne,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeedsFour {
    pub needs_four: bool,
    /// The first condition that holds, when one does.
    pub blocking_condition: Option<StarCondition>,
}

/// Nontrivial colorings need at least four colors unless one of the three
/// exceptional congruences holds.
pub fn needs_four(p: u64, m: i64) -> NeedsFour {
    let p = p as i128;
    let m = m as i128;
    let blocking_condition = if m.rem_euclid(p) == 2 {
        Some(StarCondition::MEqualsTwo)
    } else if (m * m - m + 1).rem_euclid(p) == 0 {
        Some(StarCondition::MSquaredMinusMPlusOne)
    } else if (2 * m - 1).rem_euclid(p) == 0 {
        Some(StarCondition::TwoMMinusOne)
    } else {
        None
    };
    NeedsFour { needs_four: blocking_condition.is_none(), blocking_condition }
}

/// True iff `2 < m` and `m² - m + 1 < p` over the integers, which forces
/// `needs_four` without any modular arithmetic.
pub fn minbyhand_check(p: u64, m: i64) -> bool {
    let m = m as i128;
    m > 2 && m * m - m + 1 < p as i128
}

/// True iff `minbyhand_check` holds and additionally `m² > p`, in which
/// case the four-color criterion beats the logarithmic bound.
pub fn sharper_than_log(p: u64, m: i64) -> bool {
    minbyhand_check(p, m) && (m as i128) * (m as i128) > p as i128
}

/// Which half of `1..p` the parameter m falls in; the obstruction set has
/// a different shape in each.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObstructionCase {
    /// `1 < m < p/2`: `S = { a : 0 <= a < p/m }`.
    LowerHalf,
    /// `(p+1)/2 <= m < p`: `S = { a : 0 <= a < p/(p+1-m) }`.
    UpperHalf,
}

/// A set of residues that cannot be the full color set of any nontrivial
/// (p, m)-coloring of a knot whose m-determinant is p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionSet {
    pub p: u64,
    pub m: i64,
    pub case: ObstructionCase,
    /// `{0, 1, ..., floor(p/q)}` for the case divisor q.
    pub residues: Vec<u64>,
}

/// The case-wise initial-segment obstruction set.
pub fn obstruction_set(p: u64, m: i64) -> Result<ObstructionSet, BoundsError> {
    if p < 3 || !is_prime(p) {
        return Err(BoundsError::NotPrime(p));
    }
    if m <= 1 || m as i128 >= p as i128 {
        return Err(BoundsError::MOutOfRange { p, m });
    }
    let m = m as u64;
    // Odd p makes the halves exhaustive: 2m < p or 2m > p, never equal.
    debug_assert_ne!(2 * m, p);
    let (case, divisor) = if 2 * m < p {
        (ObstructionCase::LowerHalf, m)
    } else {
        (ObstructionCase::UpperHalf, p + 1 - m)
    };
    // p prime and 1 < divisor < p: p/divisor is never an integer, so
    // `a < p/divisor` means `a <= floor(p/divisor)`.
    let residues = (0..=p / divisor).collect();
    Ok(ObstructionSet { p, m: m as i64, case, residues })
}

/// All distinct affine images `λS + μ` of the obstruction set; colors
/// inside any one of them cannot form a nontrivial coloring either.
pub fn obstructed_color_sets(p: u64, m: i64) -> Result<Vec<BTreeSet<u64>>, BoundsError> {
    let base = obstruction_set(p, m)?;
    let mut family: BTreeSet<BTreeSet<u64>> = BTreeSet::new();
    for lambda in 1..p {
        for mu in 0..p {
            family.insert(base.residues.iter().map(|&a| (lambda * a + mu) % p).collect());
        }
    }
    Ok(family.into_iter().collect())
}

/// Report of which candidate colors are forced to stay and which are
/// removable from a sufficient set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SufficientSetReport {
    /// Colors appearing on some arc.
    pub used: Vec<BigInt>,
    /// Candidate colors that appear as an under-arc color (source or
    /// receiver) at a polychromatic crossing; these cannot be dropped.
    pub essential: Vec<BigInt>,
    /// Candidate colors that never do; each is removable from the
    /// sufficient set.
    pub removable: Vec<BigInt>,
}

/// Scans the polychromatic crossings of a valid nontrivial coloring. The
/// candidate set defaults to the used colors; for a connected diagram all
/// used colors turn out essential — strict removability arises only for
/// candidate colors beyond the used ones.
pub fn sufficient_set_reduction(
    diagram: &KnotDiagram,
    coloring: &Coloring,
    candidates: Option<&[BigInt]>,
) -> Result<SufficientSetReport, BoundsError> {
    if let (false, bad) = validate_coloring(diagram, coloring)? {
        return Err(BoundsError::InvalidColoring(bad.unwrap_or_default()));
    }
    if coloring.is_trivial() {
        return Err(BoundsError::TrivialColoring);
    }
    if alexander_polynomial(diagram)?.vanishes {
        return Err(BoundsError::VanishingAlexander);
    }
    let used = coloring.color_set();
    let mut under_at_poly: BTreeSet<BigInt> = BTreeSet::new();
    for role in diagram.crossing_roles() {
        let s1 = &coloring.values[diagram.arc_index(role.source).expect("edge of diagram")];
        let s2 = &coloring.values[diagram.arc_index(role.over).expect("edge of diagram")];
        let s3 = &coloring.values[diagram.arc_index(role.receiver).expect("edge of diagram")];
        if s1 == s2 && s2 == s3 {
            continue;
        }
        under_at_poly.insert(s1.clone());
        under_at_poly.insert(s3.clone());
    }
    let candidate_set: Vec<BigInt> = match candidates {
        Some(cs) => {
            let set: BTreeSet<BigInt> = cs.iter().cloned().collect();
            set.into_iter().collect()
        }
        None => used.clone(),
    };
    let (essential, removable) =
        candidate_set.into_iter().partition(|c| under_at_poly.contains(c));
    Ok(SufficientSetReport { used, essential, removable })
}

/// Every applicable lower bound for one diagram at fixed (p, m).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub p: u64,
    pub m: i64,
    /// The three-color floor applies, i.e. nontrivial colorings exist.
    pub min3_applicable: bool,
    pub needs_four: bool,
    pub blocking_condition: Option<StarCondition>,
    /// Absent when the side condition fails (m = 2 with vanishing
    /// m-determinant) or the Alexander polynomial is identically zero.
    pub log_bound: Option<i64>,
    /// `M` used by the logarithmic bound.
    pub m_used: BigInt,
    /// Max over the applicable bounds; 0 when no nontrivial colorings
    /// exist and every bound is vacuous.
    pub best_lower: i64,
}

/// Aggregates the three-color floor, the four-color criterion, and the
/// logarithmic bound. Uses the caller's literal representative of m.
pub fn combined_lower_bound(
    diagram: &KnotDiagram,
    p: u64,
    m: i64,
) -> Result<BoundReport, BoundsError> {
    combined_lower_bound_opts(diagram, p, m, false)
}

/// As [`combined_lower_bound`], optionally taking the better of the two
/// representatives `m` and `m - p` for the logarithmic bound.
pub fn combined_lower_bound_opts(
    diagram: &KnotDiagram,
    p: u64,
    m: i64,
    max_over_representatives: bool,
) -> Result<BoundReport, BoundsError> {
    if p < 3 || !is_prime(p) {
        return Err(BoundsError::NotPrime(p));
    }
    let alex = alexander_polynomial(diagram)?;
    let mdet = alex.reduced.eval_int(&BigInt::from(m)).expect("reduced has min_degree 0");
    let min3_applicable =
        alex.vanishes || mdet.mod_floor(&BigInt::from(p)).is_zero();
    let four = needs_four(p, m);
    let log = log_lower_bound(p, m)?;
    let side_condition_met = !alex.vanishes && (m != 2 || !mdet.is_zero());
    let log_bound = side_condition_met.then(|| {
        if max_over_representatives {
            log.best
        } else {
            log.literal.bound
        }
    });
    let mut best_lower = 0;
    if min3_applicable {
        best_lower = 3;
        if four.needs_four {
            best_lower = 4;
        }
        if let Some(lb) = log_bound {
            best_lower = best_lower.max(lb);
        }
    }
    Ok(BoundReport {
        p,
        m,
        min3_applicable,
        needs_four: four.needs_four,
        blocking_condition: four.blocking_condition,
        log_bound,
        m_used: log.literal.base,
        best_lower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{enumerate_colorings, ColoringParams};

    const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";
    const K6_1: &str = "X[10,2,11,1] X[2,10,3,9] X[8,4,9,3] X[4,8,5,7] X[12,5,1,6] X[6,11,7,12]";
    const K6_2: &str = "X[6,1,7,2] X[2,7,3,8] X[8,3,9,4] X[12,9,1,10] X[4,12,5,11] X[10,6,11,5]";
    const K6_3: &str = "X[6,1,7,2] X[2,7,3,8] X[12,3,1,4] X[8,12,9,11] X[4,10,5,9] X[10,6,11,5]";
    const K8_7: &str = "X[8,1,9,2] X[2,9,3,10] X[10,3,11,4] X[4,11,5,12] X[16,5,1,6] \
                        X[12,16,13,15] X[6,14,7,13] X[14,8,15,7]";
    const SPLIT: &str = "X[1,1,2,2] X[3,3,4,4]";

    fn d(pd: &str) -> KnotDiagram {
        KnotDiagram::parse_pd(pd).unwrap()
    }

    #[test]
    fn log_bound_reference_values() {
        let b = log_lower_bound(23, 2).unwrap();
        assert_eq!(b.literal.bound, 6);
        assert!(!b.best_is_shifted);

        let b = log_lower_bound(101, 4).unwrap();
        assert_eq!(b.literal.bound, 5);

        // Fox coloring representatives: -1 gives the sharp bound, the
        // other representative a trivial one.
        let b = log_lower_bound(5, -1).unwrap();
        assert_eq!(b.literal.base, BigInt::from(2));
        assert_eq!(b.literal.bound, 4);
        assert_eq!(b.best, 4);
        let b = log_lower_bound(5, 4).unwrap();
        assert_eq!(b.literal.bound, 3);
        assert_eq!(b.shifted.as_ref().unwrap().representative, -1);
        assert_eq!(b.shifted.as_ref().unwrap().bound, 4);
        assert!(b.best_is_shifted);
        assert_eq!(b.best, 4);
    }

    #[test]
    fn log_bound_errors_and_monotonicity() {
        assert_eq!(log_lower_bound(9, 2).err(), Some(BoundsError::NotPrime(9)));
        assert_eq!(log_lower_bound(7, 1).err(), Some(BoundsError::InvalidM(1)));
        assert_eq!(log_lower_bound(7, 0).err(), Some(BoundsError::InvalidM(0)));
        let primes = [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 101];
        let mut last = 0;
        for p in primes {
            let b = log_lower_bound(p, 3).unwrap().literal.bound;
            assert!(b >= last, "log bound not monotone at p = {p}");
            last = b;
        }
    }

    #[test]
    fn needs_four_cases() {
        assert_eq!(
            needs_four(19, 3),
            NeedsFour { needs_four: true, blocking_condition: None }
        );
        assert_eq!(needs_four(5, 3).blocking_condition, Some(StarCondition::TwoMMinusOne));
        assert_eq!(needs_four(3, 2).blocking_condition, Some(StarCondition::MEqualsTwo));
        assert_eq!(
            needs_four(7, 3).blocking_condition,
            Some(StarCondition::MSquaredMinusMPlusOne)
        );
        // Fox colorings at p = 5: all three congruences fail.
        assert!(needs_four(5, -1).needs_four);
    }

    #[test]
    fn minbyhand_and_sharper() {
        assert!(minbyhand_check(19, 3));
        assert!(!minbyhand_check(7, 3)); // m^2 - m + 1 = 7 is not < 7
        assert!(!minbyhand_check(19, 2)); // m > 2 fails
        assert!(!sharper_than_log(19, 3)); // 9 < 19
        assert!(sharper_than_log(23, 5)); // 21 < 23 < 25

        // First qualifying pair in (p ascending, m ascending) scan order.
        let mut first = None;
        'scan: for p in (3u64..200).filter(|&p| is_prime(p)) {
            for m in 3..p as i64 {
                if sharper_than_log(p, m) {
                    first = Some((p, m));
                    break 'scan;
                }
            }
        }
        assert_eq!(first, Some((23, 5)));
    }

    #[test]
    fn obstruction_sets() {
        let s = obstruction_set(19, 3).unwrap();
        assert_eq!(s.case, ObstructionCase::LowerHalf);
        assert_eq!(s.residues, (0..=6).collect::<Vec<_>>());

        let s = obstruction_set(23, 2).unwrap();
        assert_eq!(s.residues, (0..=11).collect::<Vec<_>>());

        assert_eq!(obstruction_set(7, 2).unwrap().residues, vec![0, 1, 2, 3]);
        assert_eq!(obstruction_set(11, 3).unwrap().residues, vec![0, 1, 2, 3]);

        // Upper-half case: a < p/(p+1-m).
        let s = obstruction_set(5, 3).unwrap();
        assert_eq!(s.case, ObstructionCase::UpperHalf);
        assert_eq!(s.residues, vec![0, 1]);

        assert_eq!(
            obstruction_set(7, 1).err(),
            Some(BoundsError::MOutOfRange { p: 7, m: 1 })
        );
        assert_eq!(
            obstruction_set(7, 7).err(),
            Some(BoundsError::MOutOfRange { p: 7, m: 7 })
        );
    }

    #[test]
    fn obstructed_families() {
        let family = obstructed_color_sets(5, 3).unwrap();
        // S = {0,1}: the affine images are exactly the 2-element subsets.
        assert_eq!(family.len(), 10);
        assert!(family.contains(&BTreeSet::from([0, 1])));
        assert!(family.contains(&BTreeSet::from([1, 2])));
        for s in &family {
            assert_eq!(s.len(), 2);
        }
    }

    #[test]
    fn sufficient_set_reports() {
        let diagram = d(K6_3);
        let params = ColoringParams::new(7, 2).unwrap();
        let coloring = enumerate_colorings(&diagram, &params)
            .unwrap()
            .find(|c| !c.is_trivial() && c.distinct_colors() < 7)
            .unwrap();
        // Every used color of a knot coloring is under at some
        // polychromatic crossing.
        let report = sufficient_set_reduction(&diagram, &coloring, None).unwrap();
        assert_eq!(report.essential, report.used);
        assert!(report.removable.is_empty());

        // A candidate color beyond the used ones is removable.
        let extra = (0..7).map(BigInt::from).find(|v| !report.used.contains(v)).unwrap();
        let mut candidates = coloring.color_set();
        candidates.push(extra.clone());
        let report = sufficient_set_reduction(&diagram, &coloring, Some(&candidates)).unwrap();
        assert_eq!(report.removable, vec![extra]);

        // Guards: trivial colorings and split diagrams are rejected.
        let trivial = Coloring { params, values: vec![BigInt::from(1); 6] };
        assert_eq!(
            sufficient_set_reduction(&diagram, &trivial, None).err(),
            Some(BoundsError::TrivialColoring)
        );
        let split = d(SPLIT);
        let split_coloring = Coloring {
            params: ColoringParams::new(5, 3).unwrap(),
            values: vec![BigInt::from(0), BigInt::from(1)],
        };
        assert_eq!(
            sufficient_set_reduction(&split, &split_coloring, None).err(),
            Some(BoundsError::VanishingAlexander)
        );
    }

    #[test]
    fn combined_bounds_reference_cases() {
        let r = combined_lower_bound(&d(K8_7), 23, 2).unwrap();
        assert!(r.min3_applicable);
        assert!(!r.needs_four);
        assert_eq!(r.blocking_condition, Some(StarCondition::MEqualsTwo));
        assert_eq!(r.log_bound, Some(6));
        assert_eq!(r.best_lower, 6);

        let r = combined_lower_bound(&d(K6_1), 5, 3).unwrap();
        assert!(r.min3_applicable);
        assert!(!r.needs_four);
        assert_eq!(r.log_bound, Some(3));
        assert_eq!(r.best_lower, 3);

        let r = combined_lower_bound(&d(K6_2), 19, 3).unwrap();
        assert!(r.needs_four);
        assert_eq!(r.log_bound, Some(4));
        assert_eq!(r.best_lower, 4);

        // 6_1 at m = 2: vanishing m-determinant disables the log bound.
        let r = combined_lower_bound(&d(K6_1), 7, 2).unwrap();
        assert!(r.min3_applicable);
        assert_eq!(r.log_bound, None);
        assert_eq!(r.best_lower, 3);

        // No nontrivial colorings: every bound is vacuous.
        let r = combined_lower_bound(&d(TREFOIL), 5, 2).unwrap();
        assert!(!r.min3_applicable);
        assert_eq!(r.best_lower, 0);
    }

    #[test]
    fn census_respects_combined_bound() {
        for (pd, p, m) in [
            (TREFOIL, 3u64, 2i64),
            (K6_1, 5, 3),
            (K6_2, 19, 3),
            (K6_3, 7, 2),
            (K8_7, 23, 2),
        ] {
            let diagram = d(pd);
            let bound = combined_lower_bound(&diagram, p, m).unwrap().best_lower;
            let params = ColoringParams::new(p, m).unwrap();
            for c in enumerate_colorings(&diagram, &params).unwrap() {
                if !c.is_trivial() {
                    assert!(
                        c.distinct_colors() >= bound as usize,
                        "{pd} at ({p},{m}): {} colors < bound {bound}",
                        c.distinct_colors()
                    );
                }
            }
        }
    }

    #[test]
    fn needs_four_soundness_on_censuses() {
        // Wherever needs_four holds and colorings exist, no nontrivial
        // coloring uses exactly 3 colors.
        let knots = [TREFOIL, K6_1, K6_2, K6_3, K8_7];
        for p in [5u64, 7, 11, 13] {
            for m in 2..p as i64 {
                if !needs_four(p, m).needs_four {
                    continue;
                }
                for pd in knots {
                    let diagram = d(pd);
                    let params = ColoringParams::new(p, m).unwrap();
                    for c in enumerate_colorings(&diagram, &params).unwrap() {
                        assert!(c.is_trivial() || c.distinct_colors() >= 4);
                    }
                }
            }
        }
    }

    #[test]
    fn obstruction_soundness_small_p() {
        // No nontrivial coloring with nonzero m-determinant has its colors
        // inside an affine image of the obstruction set.
        let knots = [TREFOIL, K6_1, K6_2, K6_3];
        for p in [5u64, 7, 11, 13] {
            for m in 2..p as i64 {
                let family = obstructed_color_sets(p, m).unwrap();
                for pd in knots {
                    let diagram = d(pd);
                    let mdet = crate::alexander::m_determinant(&diagram, m).unwrap();
                    if mdet.is_zero() {
                        continue; // the obstruction hypothesis fails
                    }
                    let params = ColoringParams::new(p, m).unwrap();
                    for c in enumerate_colorings(&diagram, &params).unwrap() {
                        if c.is_trivial() {
                            continue;
                        }
                        let colors: BTreeSet<u64> =
                            c.values.iter().map(|v| u64::try_from(v).unwrap()).collect();
                        assert!(
                            !family.iter().any(|s| colors.is_subset(s)),
                            "{pd} at ({p},{m}) colored inside an obstructed set"
                        );
                    }
                }
            }
        }
    }
}
