//! Exact phase stepping for trigonometric product loops.
//!
//! Phases of the form theta_k = frac(theta_0 + k step) with rational data
//! are tracked as integers nu_k over a fixed denominator L, so reduction
//! mod 1 is exact no matter how large k gets. A u128 fast path covers all
//! desk-scale denominators; anything wider falls back to big integers.

use rug::{Integer, Rational};

use crate::precision::BigReal;

pub(crate) enum PhaseStepper {
    Small { nu: u128, delta: u128, l: u128 },
    Big { nu: Integer, delta: Integer, l: Integer },
}

impl PhaseStepper {
    /// `start` and `step` must already lie in [0, 1).
    pub fn new(start: &Rational, step: &Rational) -> Self {
        debug_assert!(*start >= 0 && *start < 1);
        debug_assert!(*step >= 0 && *step < 1);
        let l = Integer::from(start.denom().lcm_ref(step.denom()));
        let nu = Integer::from(start.numer() * Integer::from(&l / start.denom()));
        let delta = Integer::from(step.numer() * Integer::from(&l / step.denom()));
        match (l.to_u128(), nu.to_u128(), delta.to_u128()) {
            (Some(l), Some(nu), Some(delta)) => PhaseStepper::Small { nu, delta, l },
            _ => PhaseStepper::Big { nu, delta, l },
        }
    }

    #[inline]
    pub fn advance(&mut self) {
        match self {
            PhaseStepper::Small { nu, delta, l } => {
                *nu += *delta;
                if *nu >= *l {
                    *nu -= *l;
                }
            }
            PhaseStepper::Big { nu, delta, l } => {
                *nu += &*delta;
                if &*nu >= l {
                    *nu -= &*l;
                }
            }
        }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        match self {
            PhaseStepper::Small { nu, .. } => *nu == 0,
            PhaseStepper::Big { nu, .. } => *nu == 0,
        }
    }

    /// Whether the phase lies within 2^-shift of an integer. Used to switch
    /// to a direct evaluation where the rotation recurrence would lose
    /// accuracy to cancellation.
    #[inline]
    pub fn near_integer(&self, shift: u32) -> bool {
        match self {
            PhaseStepper::Small { nu, l, .. } => {
                let margin = (*l >> shift).max(1);
                *nu < margin || *nu > *l - margin
            }
            PhaseStepper::Big { nu, l, .. } => {
                let margin = Integer::from(l >> shift).max(Integer::from(1));
                *nu < margin || *nu > Integer::from(l - &margin)
            }
        }
    }

    pub fn to_rational(&self) -> Rational {
        match self {
            PhaseStepper::Small { nu, l, .. } => Rational::from((*nu, *l)),
            PhaseStepper::Big { nu, l, .. } => Rational::from((nu.clone(), l.clone())),
        }
    }

    /// Correctly rounded float value of the current phase.
    pub fn to_float(&self, prec: u32) -> BigReal {
        BigReal::with_val(prec, &self.to_rational())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stepping_matches_rational_arithmetic() {
        let start = Rational::from((5, 7));
        let step = Rational::from((18, 47));
        let mut stepper = PhaseStepper::new(&start, &step);
        let mut reference = start.clone();
        for _ in 0..1000 {
            assert_eq!(stepper.to_rational(), reference);
            stepper.advance();
            reference += &step;
            if reference >= 1 {
                reference -= 1u32;
            }
        }
    }

    #[test]
    fn zero_and_near_zero() {
        let start = Rational::from((1, 1 << 20));
        let step = Rational::from((1, 1 << 20));
        let mut s = PhaseStepper::new(&start, &step);
        assert!(s.near_integer(16));
        assert!(!s.is_zero());
        for _ in 0..((1 << 20) - 1) {
            s.advance();
        }
        assert!(s.is_zero());
    }
}
