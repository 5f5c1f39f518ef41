//! (n, m)-colorings of a diagram: solutions of the crossing condition
//! `c = m*a + (1-m)*b` over `Z_n`, or over `Z` when `n = 0`.
//!
//! Colors live on arcs and are stored in the order of
//! [`KnotDiagram::arcs_of`]. For a prime modulus the solutions form a
//! vector space over `Z_p`; enumeration walks its nullspace coordinates
//! lexicographically, so output order is deterministic.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use crate::diagram::{ArcId, CrossingId, KnotDiagram};
use crate::linalg::{self, integer_kernel, nullspace_mod_p, IntMatrix};

/// Default cap on how many colorings an enumeration may touch.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum ColoringError {
    #[error("invalid coloring parameters n = {n}, m = {m}: {reason}")]
    InvalidParams { n: u64, m: i64, reason: &'static str },
    #[error("modulus {0} is not an odd prime (composite moduli are not supported)")]
    NotPrime(u64),
    #[error("{total} colorings exceed the enumeration budget of {budget}")]
    TooManySolutions { total: BigInt, budget: u64 },
    #[error("coloring carries {got} values but the diagram has {want} arcs")]
    ArcCountMismatch { got: usize, want: usize },
    #[error("degenerate diagram: a component never passes under a crossing")]
    DegenerateDiagram,
}

/// Parameters of the coloring rule `a*b = m*a + (1-m)*b` over `Z_n`.
///
/// `n = 0` selects the integers. For `n > 0` the rule and its inverse must
/// both be invertible, i.e. `gcd(n, m) = gcd(n, m-1) = 1`; over the
/// integers this weakens to `m` and `m-1` both nonzero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ColoringParams {
    n: u64,
    m: i64,
}

impl ColoringParams {
    pub fn new(n: u64, m: i64) -> Result<Self, ColoringError> {
        if n == 0 {
            if m == 0 || m == 1 {
                return Err(ColoringError::InvalidParams {
                    n,
                    m,
                    reason: "m and m-1 must be nonzero over the integers",
                });
            }
            return Ok(Self { n, m });
        }
        if gcd_with_modulus(n, m) != 1 {
            return Err(ColoringError::InvalidParams { n, m, reason: "gcd(n, m) must be 1" });
        }
        if gcd_with_modulus(n, m - 1) != 1 {
            return Err(ColoringError::InvalidParams { n, m, reason: "gcd(n, m-1) must be 1" });
        }
        Ok(Self { n, m })
    }

    /// The modulus; 0 means the integers.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn is_modular(&self) -> bool {
        self.n > 0
    }
}

fn gcd_with_modulus(n: u64, m: i64) -> u64 {
    let r = (m as i128).rem_euclid(n as i128) as u64;
    r.gcd(&n)
}

/// One coloring: a color per arc, aligned with [`KnotDiagram::arcs_of`].
/// Modular colors are canonical residues in `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    pub params: ColoringParams,
    pub values: Vec<BigInt>,
}

impl Coloring {
    /// True iff every arc carries the same color.
    pub fn is_trivial(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    /// Number of distinct colors used.
    pub fn distinct_colors(&self) -> usize {
        self.values.iter().collect::<BTreeSet<_>>().len()
    }

    /// The set of colors used, sorted and deduplicated.
    pub fn color_set(&self) -> Vec<BigInt> {
        let set: BTreeSet<_> = self.values.iter().cloned().collect();
        set.into_iter().collect()
    }

    /// The coloring as an arc-keyed map, for reporting.
    pub fn arc_map(&self, diagram: &KnotDiagram) -> BTreeMap<ArcId, BigInt> {
        diagram.arcs_of().iter().copied().zip(self.values.iter().cloned()).collect()
    }
}

/// The c-by-c integer coloring matrix at `m`: each crossing contributes a
/// row with `+m` in the source under-arc's column, `+(1-m)` in the
/// over-arc's column, and `-1` in the receiving under-arc's column,
/// accumulated when arcs coincide. Entries are plain integers; modular
/// consumers reduce them mod `n`.
pub fn coloring_matrix_mod(
    diagram: &KnotDiagram,
    params: &ColoringParams,
) -> Result<IntMatrix, ColoringError> {
    if !diagram.every_component_under() {
        return Err(ColoringError::DegenerateDiagram);
    }
    let n = diagram.crossing_count();
    let m = BigInt::from(params.m());
    let mut mat = IntMatrix::zeros(n, n);
    for (row, role) in diagram.crossing_roles().into_iter().enumerate() {
        let src = diagram.arc_index(role.source).expect("edge of diagram");
        let over = diagram.arc_index(role.over).expect("edge of diagram");
        let recv = diagram.arc_index(role.receiver).expect("edge of diagram");
        mat.add_assign_entry(row, src, m.clone());
        mat.add_assign_entry(row, over, BigInt::from(1) - &m);
        mat.add_assign_entry(row, recv, BigInt::from(-1));
    }
    Ok(mat)
}

/// The solution space of the modular coloring system: an echelon basis of
/// the nullspace of the coloring matrix over `Z_p`.
struct SolutionSpace {
    p: u64,
    arcs: usize,
    basis: Vec<Vec<u64>>,
}

impl SolutionSpace {
    fn build(diagram: &KnotDiagram, params: &ColoringParams) -> Result<Self, ColoringError> {
        let p = params.n();
        if p < 3 || !linalg::is_prime(p) {
            return Err(ColoringError::NotPrime(p));
        }
        let mat = coloring_matrix_mod(diagram, params)?;
        let basis = nullspace_mod_p(&mat, p).expect("primality checked");
        Ok(Self { p, arcs: diagram.arc_count(), basis })
    }

    fn total(&self) -> BigInt {
        BigInt::from(self.p).pow(self.basis.len() as u32)
    }

    fn check_budget(&self, budget: u64) -> Result<(), ColoringError> {
        let total = self.total();
        if total > BigInt::from(budget) {
            return Err(ColoringError::TooManySolutions { total, budget });
        }
        Ok(())
    }

    /// Visits every solution vector once, in lexicographic order of the
    /// nullspace coordinate tuple.
    fn for_each(&self, mut f: impl FnMut(&[u64])) {
        let dim = self.basis.len();
        let mut digits = vec![0u64; dim];
        let mut values = vec![0u64; self.arcs];
        loop {
            f(&values);
            let mut pos = dim;
            while pos > 0 && digits[pos - 1] == self.p - 1 {
                pos -= 1;
                digits[pos] = 0;
                // Resetting a coordinate from p-1 to 0 adds one basis
                // vector mod p, same as incrementing does.
                add_mod(&mut values, &self.basis[pos], self.p);
            }
            if pos == 0 {
                return;
            }
            digits[pos - 1] += 1;
            add_mod(&mut values, &self.basis[pos - 1], self.p);
        }
    }
}

fn add_mod(values: &mut [u64], row: &[u64], p: u64) {
    for (v, r) in values.iter_mut().zip(row) {
        *v = (*v + r) % p;
    }
}

/// Streaming iterator over all modular colorings, lexicographic in
/// nullspace coordinates (the all-zero, trivial coloring comes first).
pub struct ColoringIter {
    params: ColoringParams,
    space: SolutionSpace,
    digits: Vec<u64>,
    values: Vec<u64>,
    done: bool,
}

impl Iterator for ColoringIter {
    type Item = Coloring;

    fn next(&mut self) -> Option<Coloring> {
        if self.done {
            return None;
        }
        let out = Coloring {
            params: self.params,
            values: self.values.iter().map(|&v| BigInt::from(v)).collect(),
        };
        let p = self.space.p;
        let mut pos = self.digits.len();
        while pos > 0 && self.digits[pos - 1] == p - 1 {
            pos -= 1;
            self.digits[pos] = 0;
            add_mod(&mut self.values, &self.space.basis[pos], p);
        }
        if pos == 0 {
            self.done = true;
        } else {
            self.digits[pos - 1] += 1;
            add_mod(&mut self.values, &self.space.basis[pos - 1], p);
        }
        Some(out)
    }
}

/// Enumerates all `p^d` colorings under the default budget.
pub fn enumerate_colorings(
    diagram: &KnotDiagram,
    params: &ColoringParams,
) -> Result<ColoringIter, ColoringError> {
    enumerate_colorings_with_budget(diagram, params, DEFAULT_ENUMERATION_BUDGET)
}

/// Enumerates all `p^d` colorings, failing up front when `p^d` exceeds the
/// budget.
pub fn enumerate_colorings_with_budget(
    diagram: &KnotDiagram,
    params: &ColoringParams,
    budget: u64,
) -> Result<ColoringIter, ColoringError> {
    let space = SolutionSpace::build(diagram, params)?;
    space.check_budget(budget)?;
    let dim = space.basis.len();
    let arcs = space.arcs;
    Ok(ColoringIter {
        params: *params,
        space,
        digits: vec![0; dim],
        values: vec![0; arcs],
        done: false,
    })
}

/// Counting summary of all colorings at fixed parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringCensus {
    /// `p^d` where `d` is the nullspace dimension.
    pub total: BigInt,
    /// Constant colorings; always exactly `n`.
    pub trivial: u64,
    pub nontrivial: BigInt,
    /// Distinct-color-count -> number of colorings using that many colors.
    /// Present only when `total` fits the enumeration budget.
    pub color_usage_histogram: Option<BTreeMap<usize, u64>>,
}

impl ColoringCensus {
    /// Fewest distinct colors over the nontrivial colorings of this census.
    pub fn min_colors(&self) -> Option<usize> {
        let hist = self.color_usage_histogram.as_ref()?;
        hist.keys().copied().find(|&k| k >= 2)
    }
}

/// Counts colorings from the nullspace dimension alone; the histogram is
/// filled in only when the total fits the default budget.
pub fn count_colorings(
    diagram: &KnotDiagram,
    params: &ColoringParams,
) -> Result<ColoringCensus, ColoringError> {
    count_colorings_with_budget(diagram, params, DEFAULT_ENUMERATION_BUDGET)
}

pub fn count_colorings_with_budget(
    diagram: &KnotDiagram,
    params: &ColoringParams,
    budget: u64,
) -> Result<ColoringCensus, ColoringError> {
    let space = SolutionSpace::build(diagram, params)?;
    let total = space.total();
    let trivial = space.p;
    let nontrivial = &total - BigInt::from(trivial);
    let histogram = if total <= BigInt::from(budget) {
        let mut hist: BTreeMap<usize, u64> = BTreeMap::new();
        let mut scratch = Vec::with_capacity(space.arcs);
        space.for_each(|values| {
            scratch.clear();
            scratch.extend_from_slice(values);
            scratch.sort_unstable();
            scratch.dedup();
            *hist.entry(scratch.len()).or_insert(0) += 1;
        });
        Some(hist)
    } else {
        None
    };
    Ok(ColoringCensus { total, trivial, nontrivial, color_usage_histogram: histogram })
}

/// Integral (modulus-0) coloring data: an echelon basis of the integer
/// kernel of the coloring matrix, plus one nontrivial example when the
/// kernel has rank at least 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralColorings {
    pub basis: Vec<Vec<BigInt>>,
    pub example: Option<Coloring>,
}

impl IntegralColorings {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

/// Kernel of the coloring matrix over `Z`. A nontrivial integral coloring
/// exists iff the kernel rank is at least 2 (the constant vector is always
/// a solution); the example is normalized to have minimum value 0.
pub fn integral_colorings(
    diagram: &KnotDiagram,
    m: i64,
) -> Result<IntegralColorings, ColoringError> {
    let params = ColoringParams::new(0, m)?;
    let mat = coloring_matrix_mod(diagram, &params)?;
    let basis = integer_kernel(&mat);
    let example = basis
        .iter()
        .find(|v| v.windows(2).any(|w| w[0] != w[1]))
        .map(|v| {
            let min = v.iter().min().expect("kernel vectors are nonempty").clone();
            Coloring { params, values: v.iter().map(|x| x - &min).collect() }
        });
    Ok(IntegralColorings { basis, example })
}

/// Outcome of scanning the nontrivial colorings for arc-injectivity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KhReport {
    /// True iff some nontrivial coloring assigns distinct colors to
    /// distinct arcs.
    pub admits_injective: bool,
    /// How many nontrivial colorings are arc-injective.
    pub injective_count: u64,
    pub nontrivial: BigInt,
    /// Whether the diagram is alternating, reported alongside.
    pub alternating: bool,
}

/// Scans all nontrivial colorings for arc-injective ones. When the arc
/// count exceeds the modulus the answer is `false` by pigeonhole without
/// enumerating.
pub fn kh_check(diagram: &KnotDiagram, params: &ColoringParams) -> Result<KhReport, ColoringError> {
    kh_check_with_budget(diagram, params, DEFAULT_ENUMERATION_BUDGET)
}

pub fn kh_check_with_budget(
    diagram: &KnotDiagram,
    params: &ColoringParams,
    budget: u64,
) -> Result<KhReport, ColoringError> {
    let space = SolutionSpace::build(diagram, params)?;
    let nontrivial = space.total() - BigInt::from(space.p);
    let alternating = diagram.is_alternating();
    let arcs = space.arcs;
    if arcs as u128 > space.p as u128 {
        return Ok(KhReport {
            admits_injective: false,
            injective_count: 0,
            nontrivial,
            alternating,
        });
    }
    space.check_budget(budget)?;
    let mut injective_count = 0u64;
    let mut scratch = Vec::with_capacity(arcs);
    space.for_each(|values| {
        scratch.clear();
        scratch.extend_from_slice(values);
        scratch.sort_unstable();
        scratch.dedup();
        if scratch.len() == arcs && scratch.len() >= 2 {
            injective_count += 1;
        }
    });
    Ok(KhReport {
        admits_injective: injective_count > 0,
        injective_count,
        nontrivial,
        alternating,
    })
}

/// Checks every crossing equation; returns the overall verdict and the
/// first violated crossing, if any.
pub fn validate_coloring(
    diagram: &KnotDiagram,
    coloring: &Coloring,
) -> Result<(bool, Option<CrossingId>), ColoringError> {
    if coloring.values.len() != diagram.arc_count() {
        return Err(ColoringError::ArcCountMismatch {
            got: coloring.values.len(),
            want: diagram.arc_count(),
        });
    }
    let m = BigInt::from(coloring.params.m());
    let one_minus_m = BigInt::from(1) - &m;
    let n = BigInt::from(coloring.params.n());
    for (ci, role) in diagram.crossing_roles().into_iter().enumerate() {
        let a = &coloring.values[diagram.arc_index(role.source).expect("edge of diagram")];
        let b = &coloring.values[diagram.arc_index(role.over).expect("edge of diagram")];
        let c = &coloring.values[diagram.arc_index(role.receiver).expect("edge of diagram")];
        let mut residual = &m * a + &one_minus_m * b - c;
        if coloring.params.is_modular() {
            residual = residual.mod_floor(&n);
        }
        if !residual.is_zero() {
            return Ok((false, Some(ci)));
        }
    }
    Ok((true, None))
}

/// True iff at least one crossing equation of a modular coloring fails
/// over the integers when colors are read as canonical representatives in
/// `0..p` — i.e. the coloring genuinely uses the modular wrap-around.
/// Integral colorings (`n = 0`) never wrap.
pub fn modular_wrap_check(diagram: &KnotDiagram, coloring: &Coloring) -> bool {
    if !coloring.params.is_modular() || coloring.values.len() != diagram.arc_count() {
        return false;
    }
    let n = BigInt::from(coloring.params.n());
    let rep = |x: &BigInt| x.mod_floor(&n);
    let m = BigInt::from(coloring.params.m());
    let one_minus_m = BigInt::from(1) - &m;
    diagram.crossing_roles().into_iter().any(|role| {
        let a = rep(&coloring.values[diagram.arc_index(role.source).expect("edge of diagram")]);
        let b = rep(&coloring.values[diagram.arc_index(role.over).expect("edge of diagram")]);
        let c = rep(&coloring.values[diagram.arc_index(role.receiver).expect("edge of diagram")]);
        &m * a + &one_minus_m * b != c
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alexander::alexander_matrix;

    const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";
    const FIG8: &str = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]";
    const K6_1: &str = "X[10,2,11,1] X[2,10,3,9] X[8,4,9,3] X[4,8,5,7] X[12,5,1,6] X[6,11,7,12]";
    const K7_2: &str =
        "X[12,2,13,1] X[2,12,3,11] X[10,4,11,3] X[4,10,5,9] X[8,6,9,5] X[14,8,1,7] X[6,14,7,13]";
    const K8_7: &str = "X[8,1,9,2] X[2,9,3,10] X[10,3,11,4] X[4,11,5,12] X[16,5,1,6] \
                        X[12,16,13,15] X[6,14,7,13] X[14,8,15,7]";
    const K9_12: &str = "X[14,2,15,1] X[2,14,3,13] X[12,4,13,3] X[4,12,5,11] X[18,5,1,6] \
                         X[6,17,7,18] X[10,8,11,7] X[16,10,17,9] X[8,16,9,15]";
    const KINK: &str = "X[1,1,2,2]";
    const HOPF: &str = "X[1,4,2,3] X[3,2,4,1]";

    fn d(pd: &str) -> KnotDiagram {
        KnotDiagram::parse_pd(pd).unwrap()
    }

    fn params(n: u64, m: i64) -> ColoringParams {
        ColoringParams::new(n, m).unwrap()
    }

    /// All assignments of residues mod p to arcs that satisfy every
    /// crossing, found by exhaustive search. Ground truth for small cases.
    fn brute_force(diagram: &KnotDiagram, p: u64, m: i64) -> BTreeSet<Vec<u64>> {
        let arcs = diagram.arc_count();
        let roles: Vec<[usize; 3]> = diagram
            .crossing_roles()
            .into_iter()
            .map(|r| {
                [
                    diagram.arc_index(r.source).unwrap(),
                    diagram.arc_index(r.over).unwrap(),
                    diagram.arc_index(r.receiver).unwrap(),
                ]
            })
            .collect();
        let mm = m.rem_euclid(p as i64) as u64;
        let om = (1 - m).rem_euclid(p as i64) as u64;
        let mut out = BTreeSet::new();
        let mut values = vec![0u64; arcs];
        loop {
            if roles.iter().all(|&[a, b, c]| (mm * values[a] + om * values[b]) % p == values[c]) {
                out.insert(values.clone());
            }
            let mut pos = arcs;
            while pos > 0 && values[pos - 1] == p - 1 {
                pos -= 1;
                values[pos] = 0;
            }
            if pos == 0 {
                return out;
            }
            values[pos - 1] += 1;
        }
    }

    #[test]
    fn params_validation() {
        assert!(ColoringParams::new(5, 3).is_ok());
        assert!(ColoringParams::new(5, 2).is_ok());
        assert!(ColoringParams::new(0, 2).is_ok());
        assert!(ColoringParams::new(0, -1).is_ok());
        // m or m-1 not invertible.
        assert!(ColoringParams::new(7, 0).is_err());
        assert!(ColoringParams::new(7, 1).is_err());
        assert!(ColoringParams::new(7, 8).is_err());
        assert!(ColoringParams::new(6, 3).is_err());
        assert!(ColoringParams::new(2, 3).is_err());
        assert!(ColoringParams::new(0, 0).is_err());
        assert!(ColoringParams::new(0, 1).is_err());
        // Composite n passes the gcd checks; enumeration rejects it later.
        assert!(ColoringParams::new(9, 2).is_ok());
        assert_eq!(
            enumerate_colorings(&d(TREFOIL), &params(9, 2)).err(),
            Some(ColoringError::NotPrime(9))
        );
    }

    #[test]
    fn coloring_matrix_matches_alexander_matrix_at_m() {
        for (pd, m) in [(TREFOIL, -1), (FIG8, 2), (FIG8, 3), (K6_1, 2)] {
            let diagram = d(pd);
            let direct = coloring_matrix_mod(&diagram, &ColoringParams::new(0, m).unwrap());
            let evaluated = alexander_matrix(&diagram).unwrap().eval_int(&BigInt::from(m));
            assert_eq!(direct.unwrap(), evaluated);
        }
    }

    #[test]
    fn fox_rule_rows_and_kink_row() {
        let mat = coloring_matrix_mod(&d(TREFOIL), &ColoringParams::new(0, -1).unwrap()).unwrap();
        for i in 0..3 {
            let mut row: Vec<i64> =
                mat.row_slice(i).iter().map(|x| i64::try_from(x).unwrap()).collect();
            row.sort_unstable();
            assert_eq!(row, vec![-1, -1, 2]);
        }
        let kink = coloring_matrix_mod(&d(KINK), &params(5, 3)).unwrap();
        assert_eq!(kink.rows(), 1);
        assert!(kink.get(0, 0).is_zero());
    }

    #[test]
    fn trefoil_fox_census() {
        let diagram = d(TREFOIL);
        let p = params(3, 2); // m = 2 is the dihedral rule mod 3
        let census = count_colorings(&diagram, &p).unwrap();
        assert_eq!(census.total, BigInt::from(9));
        assert_eq!(census.trivial, 3);
        assert_eq!(census.nontrivial, BigInt::from(6));
        let hist = census.color_usage_histogram.clone().unwrap();
        assert_eq!(hist, BTreeMap::from([(1, 3), (3, 6)]));
        assert_eq!(census.min_colors(), Some(3));
        assert_eq!(&census.total, &(BigInt::from(census.trivial) + &census.nontrivial));
    }

    #[test]
    fn enumeration_matches_brute_force_small() {
        for (pd, ps) in [
            (TREFOIL, vec![(3u64, 2i64), (5, 2), (5, 4), (7, 3)]),
            (FIG8, vec![(5, 2), (5, 3), (7, 2)]),
            (KINK, vec![(3, 2), (5, 3)]),
            (HOPF, vec![(3, 2), (5, 2), (5, 3)]),
        ] {
            let diagram = d(pd);
            for (p, m) in ps {
                let pr = params(p, m);
                let enumerated: BTreeSet<Vec<u64>> = enumerate_colorings(&diagram, &pr)
                    .unwrap()
                    .map(|c| {
                        c.values.iter().map(|v| u64::try_from(v).unwrap()).collect::<Vec<_>>()
                    })
                    .collect();
                assert_eq!(enumerated, brute_force(&diagram, p, m), "pd={pd} p={p} m={m}");
            }
        }
    }

    #[test]
    fn enumeration_is_sorted_and_valid() {
        let diagram = d(TREFOIL);
        let pr = params(7, 3); // 7 divides the 3-determinant 7 of the trefoil
        let all: Vec<Coloring> = enumerate_colorings(&diagram, &pr).unwrap().collect();
        assert_eq!(all.len(), 49);
        assert!(all[0].is_trivial());
        assert!(all[0].values.iter().all(|v| v.is_zero()));
        for c in &all {
            assert_eq!(validate_coloring(&diagram, c).unwrap(), (true, None));
            // Nontrivial colorings of a knot never use fewer than 3 colors.
            assert!(c.is_trivial() || c.distinct_colors() >= 3);
        }
    }

    #[test]
    fn table_censuses() {
        let census = count_colorings(&d(K8_7), &params(23, 2)).unwrap();
        assert_eq!(census.total, BigInt::from(529));
        assert_eq!(census.nontrivial, BigInt::from(506));

        let census = count_colorings(&d(FIG8), &params(23, 2)).unwrap();
        assert_eq!(census.total, BigInt::from(23));
        assert_eq!(census.nontrivial, BigInt::from(0));

        let census = count_colorings(&d(K6_1), &params(5, 3)).unwrap();
        assert_eq!(census.total, BigInt::from(25));
        assert_eq!(census.nontrivial, BigInt::from(20));
        let hist = census.color_usage_histogram.clone().unwrap();
        assert_eq!(hist, BTreeMap::from([(1, 5), (5, 20)]));
        assert_eq!(census.min_colors(), Some(5));

        let census = count_colorings(&d(K9_12), &params(11, 3)).unwrap();
        assert_eq!(census.total, BigInt::from(121));
        assert_eq!(census.nontrivial, BigInt::from(110));
    }

    #[test]
    fn kh_behavior() {
        let report = kh_check(&d(K8_7), &params(23, 2)).unwrap();
        assert!(report.admits_injective);
        assert!(report.alternating);
        assert_eq!(report.injective_count, 506);

        // 7 arcs cannot injectively take 5 colors: pigeonhole.
        let report = kh_check(&d(K7_2), &params(5, 2)).unwrap();
        assert!(!report.admits_injective);
        assert_eq!(report.nontrivial, BigInt::from(20));

        // 9 arcs fit in 11 colors, but the scan finds no injective coloring.
        let report = kh_check(&d(K9_12), &params(11, 3)).unwrap();
        assert!(!report.admits_injective);
        assert!(report.alternating);
        assert_eq!(report.injective_count, 0);
    }

    #[test]
    fn integral_kernels() {
        let found = integral_colorings(&d(K6_1), 2).unwrap();
        assert_eq!(found.rank(), 2);
        let example = found.example.clone().unwrap();
        assert!(!example.is_trivial());
        assert_eq!(example.values.iter().min().unwrap(), &BigInt::from(0));
        assert_eq!(validate_coloring(&d(K6_1), &example).unwrap(), (true, None));

        let found = integral_colorings(&d(TREFOIL), 2).unwrap();
        assert_eq!(found.rank(), 1);
        assert!(found.example.is_none());
        assert!(found.basis[0].windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn validation_flags_first_bad_crossing() {
        let diagram = d(TREFOIL);
        let pr = params(3, 2);
        let mut constant = Coloring { params: pr, values: vec![BigInt::from(1); 3] };
        assert_eq!(validate_coloring(&diagram, &constant).unwrap(), (true, None));
        constant.values[0] = BigInt::from(2);
        let (ok, first) = validate_coloring(&diagram, &constant).unwrap();
        assert!(!ok);
        assert!(first.is_some());

        let short = Coloring { params: pr, values: vec![BigInt::from(0)] };
        assert_eq!(
            validate_coloring(&diagram, &short).err(),
            Some(ColoringError::ArcCountMismatch { got: 1, want: 3 })
        );
    }

    #[test]
    fn wrap_check_separates_modular_from_integral() {
        let diagram = d(K6_1);
        // Every nontrivial (5,3)-coloring must wrap around the modulus.
        for c in enumerate_colorings(&diagram, &params(5, 3)).unwrap() {
            assert_eq!(modular_wrap_check(&diagram, &c), !c.is_trivial());
        }
        // An integral coloring read mod a large prime never wraps.
        let integral = integral_colorings(&diagram, 2).unwrap().example.unwrap();
        let as_modular = Coloring { params: params(101, 2), values: integral.values };
        assert_eq!(validate_coloring(&diagram, &as_modular).unwrap(), (true, None));
        assert!(!modular_wrap_check(&diagram, &as_modular));
    }

    #[test]
    fn budget_is_enforced() {
        let err = enumerate_colorings_with_budget(&d(TREFOIL), &params(3, 2), 4).err();
        assert_eq!(
            err,
            Some(ColoringError::TooManySolutions { total: BigInt::from(9), budget: 4 })
        );
        // Census counts still work over budget; only the histogram is dropped.
        let census = count_colorings_with_budget(&d(TREFOIL), &params(3, 2), 4).unwrap();
        assert_eq!(census.total, BigInt::from(9));
        assert!(census.color_usage_histogram.is_none());
    }

    #[test]
    fn divisibility_governs_nontrivial_existence() {
        // p divides the m-determinant -> nontrivial colorings exist;
        // p coprime to a nonzero m-determinant -> only the p trivial ones.
        let cases = [
            (TREFOIL, 3u64, 2i64, true), // 2-det(3_1) = 3
            (TREFOIL, 5, 2, false),
            (FIG8, 5, 4, true), // 4-det(4_1) = 5
            (FIG8, 23, 2, false),
            (K7_2, 5, 2, true), // 2-det(7_2) = 5
            (K7_2, 7, 2, false),
        ];
        for (pd, p, m, has_nontrivial) in cases {
            let census = count_colorings(&d(pd), &params(p, m)).unwrap();
            assert_eq!(census.nontrivial > BigInt::from(0), has_nontrivial, "pd={pd} p={p} m={m}");
        }
    }
}
