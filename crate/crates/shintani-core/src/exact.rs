//! Exact big-integer and big-rational primitives: fractional parts,
//! Chebyshev-type sequences, unit-power coefficients, reduced fractions.
//!
//! Everything here is exact. Rationals are `rug::Rational`, which keeps
//! values canonical (lowest terms, positive denominator), so equality is
//! structural and mod-1 reductions are unambiguous.

use std::sync::Mutex;

use rug::{Integer, Rational};

use crate::error::{Error, Result};

/// Fractional part `[r]`: the unique value in `[0, 1)` with `r - [r]` an integer.
pub fn frac(r: &Rational) -> Rational {
    let (f, _floor) = r.clone().fract_floor(Integer::new());
    f
}

/// Normalized fractional part `[r]_1`: agrees with [`frac`] except `[0]_1 = 1`.
pub fn frac1(r: &Rational) -> Rational {
    let f = frac(r);
    if f == 0 {
        Rational::from(1)
    } else {
        f
    }
}

/// Memoized sequence T_k(a) with T_0 = 2, T_1 = a, T_{k+1} = a T_k - T_{k-1}.
///
/// These are the trace coordinates of the unit powers: T_n(a) = eps^n + eps^{-n}
/// where eps + 1/eps = a, so T_{-n} = T_n and T_n >= 2 always. Negative indices
/// are resolved by that symmetry rather than by running the recurrence backwards.
#[derive(Debug)]
pub struct ChebyshevSeq {
    a: Integer,
    cache: Mutex<Vec<Integer>>,
}

impl ChebyshevSeq {
    pub fn new(a: Integer) -> Result<Self> {
        if a < 3 {
            return Err(Error::ChebyshevParam(a.to_string()));
        }
        let cache = Mutex::new(vec![Integer::from(2), a.clone()]);
        Ok(Self { a, cache })
    }

    pub fn a(&self) -> &Integer {
        &self.a
    }

    /// T_n(a) for any integer index (T_{-n} = T_n).
    pub fn get(&self, n: i64) -> Integer {
        let k = n.unsigned_abs() as usize;
        let mut cache = self.cache.lock().unwrap();
        while cache.len() <= k {
            let m = cache.len();
            let next = Integer::from(&self.a * &cache[m - 1]) - &cache[m - 2];
            cache.push(next);
        }
        cache[k].clone()
    }
}

/// T_n(a) as a one-off computation.
pub fn chebyshev_t(n: i64, a: i64) -> Result<Integer> {
    let seq = ChebyshevSeq::new(Integer::from(a))?;
    Ok(seq.get(n))
}

/// Memoized coefficients b_k of eps^k = (T_k(a) + b_k sqrt(d)) / 2, with
/// b_0 = 0, b_1 = b and the same recurrence as T.
#[derive(Debug)]
pub struct UnitCoeffSeq {
    a: Integer,
    cache: Mutex<Vec<Integer>>,
}

impl UnitCoeffSeq {
    pub fn new(a: Integer, b: Integer) -> Result<Self> {
        if a < 3 {
            return Err(Error::ChebyshevParam(a.to_string()));
        }
        if b < 1 {
            return Err(Error::ChebyshevParam(format!("b = {b} must be >= 1")));
        }
        let cache = Mutex::new(vec![Integer::new(), b]);
        Ok(Self { a, cache })
    }

    /// b_n for n >= 0.
    pub fn get(&self, n: u64) -> Integer {
        let k = n as usize;
        let mut cache = self.cache.lock().unwrap();
        while cache.len() <= k {
            let m = cache.len();
            let next = Integer::from(&self.a * &cache[m - 1]) - &cache[m - 2];
            cache.push(next);
        }
        cache[k].clone()
    }
}

/// b_n as a one-off computation.
pub fn unit_coeff_b(n: u64, a: i64, b: i64) -> Result<Integer> {
    let seq = UnitCoeffSeq::new(Integer::from(a), Integer::from(b))?;
    Ok(seq.get(n))
}

/// A fraction m/n in lowest terms with 0 < m < n and n > 1.
///
/// This is the exact datum at which the cyclic dilogarithm is evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedFraction {
    num: Integer,
    den: Integer,
}

impl ReducedFraction {
    /// Build from a rational, which must lie in (0, 1) with denominator > 1.
    pub fn from_rational(r: &Rational) -> Result<Self> {
        if *r <= 0 || *r >= 1 {
            return Err(Error::Domain(format!("{r} outside (0, 1)")));
        }
        let num = r.numer().clone();
        let den = r.denom().clone();
        if den <= 1 {
            return Err(Error::Domain(format!("denominator of {r} not > 1")));
        }
        Ok(Self { num, den })
    }

    pub fn num(&self) -> &Integer {
        &self.num
    }

    pub fn den(&self) -> &Integer {
        &self.den
    }

    pub fn to_rational(&self) -> Rational {
        Rational::from((self.num.clone(), self.den.clone()))
    }
}

impl std::fmt::Display for ReducedFraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// t_n = T_{n-1}(a) / T_n(a) in lowest terms, for n >= 1.
///
/// The value lies in (0, 1) and increases towards 1/eps as n grows.
pub fn t_frac(n: i64, seq: &ChebyshevSeq) -> Result<ReducedFraction> {
    if n < 1 {
        return Err(Error::TFracIndex(n));
    }
    let r = Rational::from((seq.get(n - 1), seq.get(n)));
    ReducedFraction::from_rational(&r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn frac_examples() {
        assert_eq!(frac(&rat(0, 1)), rat(0, 1));
        assert_eq!(frac(&rat(-1, 3)), rat(2, 3));
        assert_eq!(frac(&rat(7, 2)), rat(1, 2));
    }

    #[test]
    fn frac1_examples() {
        assert_eq!(frac1(&rat(0, 1)), rat(1, 1));
        assert_eq!(frac1(&rat(-2, 6)), rat(2, 3));
        assert_eq!(frac1(&rat(2, 1)), rat(1, 1));
    }

    #[test]
    fn chebyshev_examples() {
        assert_eq!(chebyshev_t(0, 3).unwrap(), 2);
        // Recurrence from 2, 3: 2, 3, 7, 18, 47, 123. Oracle below checks
        // against float evaluation of eps^n + eps^{-n}.
        assert_eq!(chebyshev_t(5, 3).unwrap(), 123);
        assert_eq!(chebyshev_t(-4, 3).unwrap(), 47);
        assert!(chebyshev_t(1, 2).is_err());
    }

    #[test]
    fn chebyshev_float_oracle() {
        // T_n(a) = eps^n + eps^{-n} with eps = (a + sqrt(a^2-4))/2.
        for &a in &[3i64, 4, 5] {
            let eps = (a as f64 + ((a * a - 4) as f64).sqrt()) / 2.0;
            for n in 0..=20i64 {
                let direct = eps.powi(n as i32) + eps.powi(-(n as i32));
                let exact = chebyshev_t(n, a).unwrap().to_f64();
                assert!(
                    (direct - exact).abs() / exact < 1e-9,
                    "a={a} n={n}: {direct} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn unit_coeff_examples() {
        assert_eq!(unit_coeff_b(0, 3, 1).unwrap(), 0);
        assert_eq!(unit_coeff_b(1, 3, 1).unwrap(), 1);
        // 0, 1, 3, 8, 21; cross-checked by T_4^2 - 5 b_4^2 = 47^2 - 5*441 = 4.
        assert_eq!(unit_coeff_b(4, 3, 1).unwrap(), 21);
        assert_eq!(
            Integer::from(47 * 47) - Integer::from(5) * Integer::from(21 * 21),
            4
        );
    }

    #[test]
    fn t_frac_examples() {
        let seq3 = ChebyshevSeq::new(Integer::from(3)).unwrap();
        let seq4 = ChebyshevSeq::new(Integer::from(4)).unwrap();
        assert_eq!(t_frac(1, &seq3).unwrap().to_rational(), rat(2, 3));
        // T_1/T_2 = 4/14 reduces to 2/7.
        assert_eq!(t_frac(2, &seq4).unwrap().to_rational(), rat(2, 7));
        assert_eq!(t_frac(4, &seq3).unwrap().to_rational(), rat(18, 47));
        assert!(t_frac(0, &seq3).is_err());
    }

    #[test]
    fn consecutive_gcd_is_gcd_a_2() {
        for &a in &[3i64, 4, 5, 6] {
            let seq = ChebyshevSeq::new(Integer::from(a)).unwrap();
            let expect = Integer::from(a).gcd(&Integer::from(2));
            for k in 0..=50i64 {
                let g = seq.get(k).gcd(&seq.get(k + 1));
                assert_eq!(g, expect, "a={a} k={k}");
            }
        }
    }

    #[test]
    fn pell_identity_along_powers() {
        // (a, b, d) with a^2 - d b^2 = 4; then T_k^2 - d b_k^2 = 4 for all k.
        for &(a, b, d) in &[(3i64, 1i64, 5i64), (4, 2, 3), (6, 4, 2)] {
            let t = ChebyshevSeq::new(Integer::from(a)).unwrap();
            let u = UnitCoeffSeq::new(Integer::from(a), Integer::from(b)).unwrap();
            for k in 0..=30u64 {
                let tk = t.get(k as i64);
                let bk = u.get(k);
                let lhs = Integer::from(&tk * &tk) - Integer::from(d) * Integer::from(&bk * &bk);
                assert_eq!(lhs, 4, "a={a} k={k}");
            }
        }
    }

    #[test]
    fn chebyshev_negative_symmetry() {
        let seq = ChebyshevSeq::new(Integer::from(4)).unwrap();
        for n in 0..=30i64 {
            assert_eq!(seq.get(n), seq.get(-n));
        }
    }

    #[test]
    fn t_frac_monotone_convergence_to_inverse_unit() {
        // t_n -> 1/eps monotonically (checked at float precision). The
        // approach is from above: T_{n-1} - T_n/eps = eps^{-n}(eps - 1/eps)
        // is positive and shrinking, so the sequence strictly decreases.
        for &a in &[3i64, 4, 6] {
            let seq = ChebyshevSeq::new(Integer::from(a)).unwrap();
            let inv_eps = 2.0 / (a as f64 + ((a * a - 4) as f64).sqrt());
            let mut prev = f64::INFINITY;
            for n in 1..=25i64 {
                let t = t_frac(n, &seq).unwrap().to_rational().to_f64();
                assert!(t < prev, "a={a} n={n}");
                assert!(t > inv_eps * (1.0 - 1e-12), "a={a} n={n}");
                prev = t;
            }
            assert!((prev - inv_eps).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn frac_is_canonical(n in -10_000i64..10_000, d in 1i64..10_000) {
            let r = rat(n, d);
            let f = frac(&r);
            prop_assert!(f >= 0);
            prop_assert!(f < 1);
            let diff = Rational::from(&r - &f);
            prop_assert!(diff.is_integer());
            let f1 = frac1(&r);
            prop_assert!(f1 > 0);
            prop_assert!(f1 <= 1);
        }
    }
}
