//! Integer-coefficient Laurent polynomials in one variable `T`.
//!
//! `LaurentPoly` houses the reduced Alexander polynomial and the entries of
//! Alexander matrices. Values are kept normalized (first and last stored
//! coefficients nonzero) and compared either exactly or modulo units, i.e.
//! modulo factors of the form `±T^n`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A Laurent polynomial `sum coeffs[i] * T^(min_degree + i)` over `Z`.
///
/// The zero polynomial is stored as an empty coefficient list with
/// `min_degree = 0`. Nonzero values keep their first and last coefficients
/// nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LaurentPoly {
    min_degree: i64,
    coeffs: Vec<BigInt>,
}

impl LaurentPoly {
    /// Builds a polynomial from raw data, trimming zero coefficients at both
    /// ends so the normalization invariant holds.
    pub fn new(min_degree: i64, coeffs: Vec<BigInt>) -> Self {
        let mut p = LaurentPoly { min_degree, coeffs };
        p.normalize();
        p
    }

    /// Convenience constructor from small integers; `coeffs[i]` is the
    /// coefficient of `T^(min_degree + i)`.
    pub fn from_coeffs(min_degree: i64, coeffs: &[i64]) -> Self {
        Self::new(min_degree, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// The constant polynomial `c`.
    pub fn constant(c: BigInt) -> Self {
        Self::new(0, vec![c])
    }

    /// The monomial `c * T^d`.
    pub fn monomial(c: BigInt, d: i64) -> Self {
        Self::new(d, vec![c])
    }

    /// The variable `T`.
    pub fn t() -> Self {
        Self::monomial(BigInt::one(), 1)
    }

    /// The entry pattern `1 - T` appearing in every Alexander matrix row.
    pub fn one_minus_t() -> Self {
        Self::from_coeffs(0, &[1, -1])
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.min_degree += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.min_degree = 0;
        }
    }

    /// Exponent of the lowest-order term (0 for the zero polynomial).
    pub fn min_degree(&self) -> i64 {
        self.min_degree
    }

    /// Exponent of the highest-order term (0 for the zero polynomial).
    pub fn max_degree(&self) -> i64 {
        if self.coeffs.is_empty() {
            0
        } else {
            self.min_degree + self.coeffs.len() as i64 - 1
        }
    }

    /// Coefficients from `min_degree` upward; empty for zero.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `T^d`.
    pub fn coeff(&self, d: i64) -> BigInt {
        let i = d - self.min_degree;
        if i < 0 || i >= self.coeffs.len() as i64 {
            BigInt::zero()
        } else {
            self.coeffs[i as usize].clone()
        }
    }

    /// Evaluates at the integer `x`. `None` when negative powers of `T`
    /// remain and the result need not be an integer (`|x| != 1`).
    pub fn eval_int(&self, x: &BigInt) -> Option<BigInt> {
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        if self.min_degree < 0 && !x.magnitude().is_one() {
            return None;
        }
        // Horner from the top coefficient down to T^min_degree, then adjust.
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        if self.min_degree >= 0 {
            Some(acc * x.pow(u32::try_from(self.min_degree).expect("desk-scale degree")))
        } else {
            // x is ±1 here, so T^min_degree is x^|min_degree|.
            let k = self.min_degree.unsigned_abs() as u32;
            if x.is_negative() && k % 2 == 1 {
                Some(-acc)
            } else {
                Some(acc)
            }
        }
    }

    /// True iff `self = ±T^n * other` for some integer `n`.
    pub fn eq_mod_units(&self, other: &Self) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        if self.coeffs.len() != other.coeffs.len() {
            return false;
        }
        self.coeffs == other.coeffs
            || self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| *a == -b)
    }

    /// The representative with `min_degree = 0` and positive value at 0:
    /// the "reduced" normalization, unique within a class of unit multiples.
    /// Zero stays zero.
    pub fn reduced(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut p = self.clone();
        p.min_degree = 0;
        if p.coeffs[0].is_negative() {
            for c in &mut p.coeffs {
                *c = -std::mem::take(c);
            }
        }
        p
    }
}

impl Zero for LaurentPoly {
    fn zero() -> Self {
        LaurentPoly { min_degree: 0, coeffs: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for LaurentPoly {
    fn one() -> Self {
        Self::constant(BigInt::one())
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let lo = self.min_degree.min(rhs.min_degree);
        let hi = self.max_degree().max(rhs.max_degree());
        let mut coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.min_degree - lo) as usize + i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            coeffs[(rhs.min_degree - lo) as usize + i] += c;
        }
        LaurentPoly::new(lo, coeffs)
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;

    fn neg(mut self) -> LaurentPoly {
        for c in &mut self.coeffs {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;

    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &(-rhs)
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        LaurentPoly::new(self.min_degree + rhs.min_degree, coeffs)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let d = self.min_degree + i as i64;
            let mag = c.magnitude();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = d == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match d {
                0 => {}
                1 => write!(f, "T")?,
                _ => write!(f, "T^{d}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(min: i64, cs: &[i64]) -> LaurentPoly {
        LaurentPoly::from_coeffs(min, cs)
    }

    #[test]
    fn normalization_trims_zeros() {
        let q = p(-1, &[0, 3, 0, 0]);
        assert_eq!(q.min_degree(), 0);
        assert_eq!(q.coeffs().len(), 1);
        assert!(p(5, &[0, 0]).is_zero());
    }

    #[test]
    fn arithmetic_matches_hand_expansion() {
        // (T)(1 - T) = T - T^2
        let prod = LaurentPoly::t() * LaurentPoly::one_minus_t();
        assert_eq!(prod, p(1, &[1, -1]));
        // T + (1 - T) - 1 = 0  (the kink row)
        let s = LaurentPoly::t() + LaurentPoly::one_minus_t() - LaurentPoly::one();
        assert!(s.is_zero());
    }

    #[test]
    fn eval_uses_horner_and_units() {
        let q = p(0, &[1, -3, 1]); // 1 - 3T + T^2
        assert_eq!(q.eval_int(&BigInt::from(5)), Some(BigInt::from(11)));
        assert_eq!(q.eval_int(&BigInt::from(-1)), Some(BigInt::from(5)));
        let neg = p(-2, &[1, 1]); // T^-2 + T^-1
        assert_eq!(neg.eval_int(&BigInt::from(3)), None);
        assert_eq!(neg.eval_int(&BigInt::from(-1)), Some(BigInt::zero()));
    }

    #[test]
    fn units_equivalence() {
        let a = p(0, &[1, -3, 1]);
        let b = p(3, &[-1, 3, -1]); // -T^3 * a / T^0
        assert!(a.eq_mod_units(&b));
        assert!(!a.eq_mod_units(&p(0, &[1, -2, 1])));
        assert!(LaurentPoly::zero().eq_mod_units(&LaurentPoly::zero()));
        assert!(!a.eq_mod_units(&LaurentPoly::zero()));
    }

    #[test]
    fn reduced_normalizes_sign_and_degree() {
        let d = p(1, &[-1, 3, -1]); // -T(T^2 - 3T + 1) expanded low-to-high
        let r = d.reduced();
        assert_eq!(r, p(0, &[1, -3, 1]));
        assert!(r.coeff(0) > BigInt::zero());
    }

    #[test]
    fn display_format() {
        assert_eq!(p(0, &[1, -3, 1]).to_string(), "T^2 - 3T + 1");
        assert_eq!(p(0, &[2, -5, 2]).to_string(), "2T^2 - 5T + 2");
        assert_eq!(p(1, &[1]).to_string(), "T");
        assert_eq!(p(0, &[-7]).to_string(), "-7");
        assert_eq!(p(-1, &[2, 1]).to_string(), "1 + 2T^-1");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
    }
}
