//! Precision-context contract for the arbitrary-precision arithmetic used
//! by every transcendental evaluation.
//!
//! Contexts are immutable and passed explicitly. All working precisions are
//! derived deterministically from the context and the exact inputs, so
//! evaluations are bit-identical regardless of thread or run.

use rug::float::Constant;
use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::exact;

/// Arbitrary-precision real number (MPFR-backed).
pub type BigReal = Float;

/// Minimal complex value on top of [`BigReal`]. Only what the cyclic
/// dilogarithm oracle needs: multiplication, modulus and argument.
#[derive(Debug, Clone)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl BigComplex {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn one(prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, 1),
            im: Float::with_val(prec, 0),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.re.prec().max(other.re.prec());
        let mut re = Float::with_val(prec, &self.re * &other.re);
        re -= Float::with_val(prec, &self.im * &other.im);
        let mut im = Float::with_val(prec, &self.re * &other.im);
        im += Float::with_val(prec, &self.im * &other.re);
        Self { re, im }
    }

    pub fn abs(&self) -> Float {
        let prec = self.re.prec();
        let mut t = Float::with_val(prec, &self.re * &self.re);
        t += Float::with_val(prec, &self.im * &self.im);
        t.sqrt()
    }

    /// Principal argument in (-pi, pi].
    pub fn arg(&self) -> Float {
        self.im.clone().atan2(&self.re)
    }
}

/// Settings for the double-sine quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSettings {
    /// Level cap for the progressive tanh-sinh rule (node count grows as
    /// 2^level).
    pub max_level: u32,
    /// Extra bits below the working precision at which the quadrature is
    /// allowed to stop refining.
    pub tol_shift_bits: u32,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            max_level: 12,
            tol_shift_bits: 16,
        }
    }
}

/// Working-precision contract shared by all evaluations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecisionContext {
    p_bits: u32,
    guard_bits: u32,
    quadrature: QuadratureSettings,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self {
            p_bits: 256,
            guard_bits: 32,
            quadrature: QuadratureSettings::default(),
        }
    }
}

impl PrecisionContext {
    pub fn new(p_bits: u32) -> Result<Self> {
        if p_bits < 64 {
            return Err(Error::PrecisionTooLow(p_bits));
        }
        Ok(Self {
            p_bits,
            ..Self::default()
        })
    }

    pub fn with_guard(mut self, guard_bits: u32) -> Self {
        self.guard_bits = guard_bits;
        self
    }

    pub fn with_quadrature(mut self, quadrature: QuadratureSettings) -> Self {
        self.quadrature = quadrature;
        self
    }

    pub fn p_bits(&self) -> u32 {
        self.p_bits
    }

    pub fn guard_bits(&self) -> u32 {
        self.guard_bits
    }

    pub fn quadrature(&self) -> QuadratureSettings {
        self.quadrature
    }

    /// Precision for intermediate work: p_bits + guard_bits + extra.
    pub fn working_prec(&self, extra: u32) -> u32 {
        self.p_bits + self.guard_bits + extra
    }

    /// Heuristic error floor quoted with reported results.
    pub fn error_floor(&self) -> Float {
        Float::with_val(self.p_bits, 1) >> (self.p_bits - self.guard_bits.min(self.p_bits / 2))
    }

    pub fn real_from_rational(&self, r: &Rational) -> Float {
        Float::with_val(self.p_bits, r)
    }
}

/// Correctly rounded conversion of an exact rational at the context's
/// precision.
pub fn rational_to_real(r: &Rational, ctx: &PrecisionContext) -> BigReal {
    ctx.real_from_rational(r)
}

/// Exact mod-1 reduction. Identical to [`exact::frac`]; exposed here because
/// every phase fed to sin/exp must be reduced in exact rational arithmetic
/// before any floating conversion.
pub fn reduce_mod1_exact(r: &Rational) -> Rational {
    exact::frac(r)
}

pub(crate) fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

pub(crate) fn two_pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi) * 2u32
}

/// sin(2 pi r) with the phase reduced exactly first.
pub fn sin_two_pi_reduced(r: &Rational, prec: u32) -> Float {
    let theta = reduce_mod1_exact(r);
    let mut t = Float::with_val(prec, &theta);
    t *= two_pi(prec);
    t.sin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Integer;

    #[test]
    fn rational_to_real_examples() {
        let ctx = PrecisionContext::new(128).unwrap();
        let half = rational_to_real(&Rational::from((1, 2)), &ctx);
        assert_eq!(half, Float::with_val(128, 0.5));

        let two_thirds = rational_to_real(&Rational::from((2, 3)), &ctx);
        let direct = Float::with_val(128, 2) / Float::with_val(128, 3);
        let diff = Float::with_val(128, &two_thirds - &direct).abs();
        assert!(diff < Float::with_val(128, 1) >> 126);

        let r = Rational::from((18, 47));
        let conv = rational_to_real(&r, &ctx);
        let quot = Float::with_val(128, 18) / Float::with_val(128, 47);
        let diff = Float::with_val(128, &conv - &quot).abs();
        assert!(diff < Float::with_val(128, 1) >> 126);
    }

    #[test]
    fn reduce_mod1_examples() {
        // 1000003 = 7 * 142857 + 4
        assert_eq!(
            reduce_mod1_exact(&Rational::from((1_000_003, 7))),
            Rational::from((4, 7))
        );
        assert_eq!(reduce_mod1_exact(&Rational::from(0)), 0);
        assert_eq!(
            reduce_mod1_exact(&Rational::from((-5, 7))),
            Rational::from((2, 7))
        );
    }

    #[test]
    fn context_rejects_low_precision() {
        assert!(PrecisionContext::new(32).is_err());
        assert!(PrecisionContext::new(64).is_ok());
    }

    #[test]
    fn sin_of_reduced_phase_matches_quadruple_precision() {
        // sin(2 pi frac(k m/n)) at working precision vs sin(2 pi k m/n)
        // evaluated directly at 4x precision, for k up to 10^6 and m/n from
        // actual t_n values.
        let prec = 128u32;
        let hi = 4 * prec;
        for (m, n) in [(18i64, 47i64), (2207, 5778), (97, 362)] {
            let step = Rational::from((m, n));
            for k in [1u64, 7, 999, 65_536, 500_000, 999_983, 1_000_000] {
                let phase = Rational::from((Integer::from(k) * m, Integer::from(n)));
                let reduced = sin_two_pi_reduced(&phase, prec);
                let direct = {
                    let mut t = Float::with_val(hi, &step);
                    t *= k;
                    t *= two_pi(hi);
                    t.sin()
                };
                let diff = Float::with_val(hi, &reduced - &direct).abs();
                assert!(
                    diff < Float::with_val(hi, 1) >> (prec - 3),
                    "k={k} m/n={m}/{n}"
                );
            }
        }
    }

    #[test]
    fn big_complex_roundtrip() {
        let prec = 96;
        let z = BigComplex::new(Float::with_val(prec, 3), Float::with_val(prec, 4));
        assert_eq!(z.abs(), 5);
        let w = z.mul(&z);
        assert_eq!(w.re, -7);
        assert_eq!(w.im, 24);
    }
}
