//! The affine group Aff(p) of maps `x ↦ λx + μ` acting on (p, m)-colorings:
//! orbit computation, equivalence classes, and free-action verification.

use num_bigint::BigInt;
use num_integer::Integer;
use std::collections::BTreeSet;
use thiserror::Error;

use crate::coloring::{enumerate_colorings, Coloring, ColoringError, ColoringParams};
use crate::diagram::KnotDiagram;
use crate::linalg::is_prime;

#[derive(Debug, Error, PartialEq)]
pub enum AutoError {
    #[error("modulus {0} is not an odd prime")]
    NotPrime(u64),
    #[error("lambda = {lambda} is not a unit mod {p}")]
    LambdaNotUnit { p: u64, lambda: u64 },
    #[error("colorings with mixed parameters cannot share orbits")]
    MixedParams,
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

/// A color symmetry `x ↦ λx + μ` over `Z_p` with λ invertible.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AffineMap {
    p: u64,
    lambda: u64,
    mu: u64,
}

impl AffineMap {
    pub fn new(p: u64, lambda: u64, mu: u64) -> Result<Self, AutoError> {
        if p < 3 || !is_prime(p) {
            return Err(AutoError::NotPrime(p));
        }
        let lambda = lambda % p;
        if lambda == 0 {
            return Err(AutoError::LambdaNotUnit { p, lambda });
        }
        Ok(AffineMap { p, lambda, mu: mu % p })
    }

    pub fn identity(p: u64) -> Result<Self, AutoError> {
        AffineMap::new(p, 1, 0)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    pub fn mu(&self) -> u64 {
        self.mu
    }

    pub fn is_identity(&self) -> bool {
        self.lambda == 1 && self.mu == 0
    }

    /// `λx + μ mod p` on a single residue.
    pub fn apply_residue(&self, x: u64) -> u64 {
        let p = self.p as u128;
        ((self.lambda as u128 * (x as u128 % p) + self.mu as u128) % p) as u64
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        assert_eq!(self.p, other.p, "maps over different moduli");
        let p = self.p as u128;
        AffineMap {
            p: self.p,
            lambda: ((self.lambda as u128 * other.lambda as u128) % p) as u64,
            mu: ((self.lambda as u128 * other.mu as u128 + self.mu as u128) % p) as u64,
        }
    }

    pub fn inverse(&self) -> AffineMap {
        // λ^(p-2) is the inverse of λ in the field Z_p.
        let p = self.p;
        let mut inv = 1u128;
        let mut base = self.lambda as u128;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                inv = inv * base % p as u128;
            }
            base = base * base % p as u128;
            e >>= 1;
        }
        let mu = (p as u128 - (inv * (self.mu as u128) % p as u128)) % p as u128;
        AffineMap { p, lambda: inv as u64, mu: mu as u64 }
    }

    /// Arc-wise image of a coloring; the result is again valid because the
    /// coloring relation is affine.
    pub fn apply(&self, coloring: &Coloring) -> Coloring {
        assert_eq!(
            coloring.params.n(),
            self.p,
            "map modulus and coloring modulus differ"
        );
        let p = BigInt::from(self.p);
        let lambda = BigInt::from(self.lambda);
        let mu = BigInt::from(self.mu);
        let values = coloring
            .values
            .iter()
            .map(|v| (&lambda * v + &mu).mod_floor(&p))
            .collect();
        Coloring { params: coloring.params, values }
    }
}

/// All p(p−1) elements of Aff(p).
pub fn all_maps(p: u64) -> Result<Vec<AffineMap>, AutoError> {
    if p < 3 || !is_prime(p) {
        return Err(AutoError::NotPrime(p));
    }
    let mut maps = Vec::with_capacity((p * (p - 1)) as usize);
    for lambda in 1..p {
        for mu in 0..p {
            maps.push(AffineMap { p, lambda, mu });
        }
    }
    Ok(maps)
}

/// The orbit of a coloring under Aff(p), deduplicated and sorted by value
/// vector.
pub fn orbit(coloring: &Coloring) -> Result<Vec<Coloring>, AutoError> {
    let p = coloring.params.n();
    let mut seen: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    for f in all_maps(p)? {
        seen.insert(f.apply(coloring).values);
    }
    let params = coloring.params;
    Ok(seen.into_iter().map(|values| Coloring { params, values }).collect())
}

/// One equivalence class of colorings under the affine action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitClass {
    pub representative: Coloring,
    pub size: usize,
    /// Shared by every member: affine maps are bijections on colors.
    pub distinct_colors: usize,
}

/// Partitions a census of colorings into affine orbit classes.
pub fn orbit_classes(colorings: &[Coloring]) -> Result<Vec<OrbitClass>, AutoError> {
    let Some(first) = colorings.first() else {
        return Ok(Vec::new());
    };
    let params = first.params;
    if colorings.iter().any(|c| c.params != params) {
        return Err(AutoError::MixedParams);
    }
    let maps = all_maps(params.n())?;
    let mut assigned = vec![false; colorings.len()];
    let mut classes = Vec::new();
    for (i, rep) in colorings.iter().enumerate() {
        if assigned[i] {
            continue;
        }
        let mut members: BTreeSet<Vec<BigInt>> = BTreeSet::new();
        for f in &maps {
            members.insert(f.apply(rep).values);
        }
        for (j, other) in colorings.iter().enumerate().skip(i) {
            if !assigned[j] && members.contains(&other.values) {
                assigned[j] = true;
            }
        }
        classes.push(OrbitClass {
            representative: rep.clone(),
            size: members.len(),
            distinct_colors: rep.distinct_colors(),
        });
    }
    Ok(classes)
}

/// Exhaustive free-action check over an enumerated census.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeActionReport {
    /// No nonidentity map fixes any nontrivial coloring.
    pub free_on_nontrivial: bool,
    /// Nontrivial colorings inspected.
    pub nontrivial_checked: u64,
    /// Stabilizer order of a trivial coloring — always p−1, so the action
    /// on the full census is never free.
    pub trivial_stabilizer_order: u64,
}

/// Verifies by exhaustion that Aff(p) acts freely on the nontrivial
/// (p, m)-colorings of the diagram.
pub fn verify_free_action(
    diagram: &KnotDiagram,
    p: u64,
    m: i64,
) -> Result<FreeActionReport, AutoError> {
    let params = ColoringParams::new(p, m)?;
    let maps = all_maps(p)?;
    let mut free = true;
    let mut checked = 0u64;
    for coloring in enumerate_colorings(diagram, &params)? {
        if coloring.is_trivial() {
            continue;
        }
        checked += 1;
        for f in &maps {
            if !f.is_identity() && f.apply(&coloring).values == coloring.values {
                free = false;
            }
        }
    }
    let trivial = Coloring { params, values: vec![BigInt::from(0); diagram.arc_count()] };
    let trivial_stabilizer_order = maps
        .iter()
        .filter(|f| f.apply(&trivial).values == trivial.values)
        .count() as u64;
    Ok(FreeActionReport {
        free_on_nontrivial: free,
        nontrivial_checked: checked,
        trivial_stabilizer_order,
    })
}
