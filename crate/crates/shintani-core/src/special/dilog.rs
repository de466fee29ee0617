//! The cyclic quantum dilogarithm at a reduced fraction m/n:
//!
//!   D_{m/n}(x, y) = prod_{k=1}^{n-1} (1 - e^{2 pi i ((k + x) m/n + y)})^{k/n}.
//!
//! The absolute value is computed as exp of sum_k (k/n) ln(2 |sin(pi
//! theta_k)|) with every theta_k reduced to [0, 1) in exact rational
//! arithmetic; a factor vanishes exactly iff its theta_k is exactly 0,
//! which is decided on the integers, never by a floating threshold.
//!
//! A complex-valued version with principal-branch factor powers exists as a
//! small-n oracle; only absolute values enter the invariant routes.

use rug::{Assign, Float, Rational};

use crate::error::{Error, Result};
use crate::exact::{self, ReducedFraction};
use crate::precision::{two_pi, BigComplex, BigReal, PrecisionContext};
use crate::special::phase::PhaseStepper;

const BLOCK: usize = 256;
const REFRESH_INTERVAL: u64 = 4096;
const NEAR_SHIFT: u32 = 16;
/// Largest denominator accepted by the complex oracle.
pub const COMPLEX_ORACLE_BOUND: u64 = 10_000;

/// |D| or an exact zero.
#[derive(Debug, Clone)]
pub enum DilogResult {
    Value(BigReal),
    Zero,
}

/// ln |D| or an exact zero.
#[derive(Debug, Clone)]
pub enum LogDilogAbs {
    Log(BigReal),
    Zero,
}

impl LogDilogAbs {
    pub fn is_zero(&self) -> bool {
        matches!(self, LogDilogAbs::Zero)
    }
}

fn working_prec(ctx: &PrecisionContext) -> u32 {
    ctx.working_prec(96)
}

/// ln |D_{m/n}(x, y)|, or Zero when some factor vanishes exactly.
pub fn log_cyclic_dilog_abs(
    f: &ReducedFraction,
    x: &Rational,
    y: &Rational,
    ctx: &PrecisionContext,
) -> LogDilogAbs {
    let wp = working_prec(ctx);
    let n = f.den();
    let t = f.to_rational();

    // theta_k = frac((k + x) t + y), stepping by t from theta_1.
    let start = exact::frac(&(Rational::from(&t * Rational::from(x + 1u32)) + y));
    let step = exact::frac(&t); // = t, already in (0, 1)
    let mut phase = PhaseStepper::new(&start, &step);

    // Rotation w_k = e^{2 pi i theta_k}; only the real part enters
    // |1 - w|^2 = 2 - 2 cos, but both coordinates drive the recurrence.
    let (z_re, z_im) = {
        let mut ang = Float::with_val(wp, &step);
        ang *= two_pi(wp);
        let (s, c) = ang.sin_cos(Float::new(wp));
        (c, s)
    };

    let mut w_re = Float::new(wp);
    let mut w_im = Float::new(wp);
    let seed = |phase: &PhaseStepper, w_re: &mut Float, w_im: &mut Float| {
        let mut ang = phase.to_float(wp);
        ang *= two_pi(wp);
        let (s, c) = ang.sin_cos(Float::new(wp));
        w_re.assign(&c);
        w_im.assign(&s);
    };

    let mut buf: Vec<Float> = (0..BLOCK).map(|_| Float::new(wp)).collect();
    let mut used = 0usize;
    let mut block_start_k = 1u64;
    let mut block_prod = Float::with_val(wp, 1);
    let mut acc = Float::new(wp);
    let mut t1 = Float::new(wp);
    let mut t2 = Float::new(wp);

    let n_u64 = n.to_u64().unwrap_or(u64::MAX);
    let mut k = 1u64;
    while k < n_u64 {
        // An exact zero phase implies near_integer, so zeros are always
        // caught here before any float enters the sum.
        if (k - 1) % REFRESH_INTERVAL == 0 || phase.near_integer(NEAR_SHIFT) {
            if phase.is_zero() {
                return LogDilogAbs::Zero;
            }
            seed(&phase, &mut w_re, &mut w_im);
        }

        // q_k = |1 - w_k|^2 = 2 - 2 Re w_k
        buf[used].assign(2);
        buf[used] -= &w_re;
        buf[used] -= &w_re;
        block_prod *= &buf[used];
        used += 1;

        if used == BLOCK || k == n_u64 - 1 {
            flush_block(
                &mut acc,
                &mut block_prod,
                &mut buf,
                used,
                block_start_k,
                wp,
                &mut t1,
                &mut t2,
            );
            block_start_k = k + 1;
            used = 0;
        }

        // w *= z
        t1.assign(&w_re);
        t1 *= &z_re;
        t2.assign(&w_im);
        t2 *= &z_im;
        t1 -= &t2;
        t2.assign(&w_re);
        t2 *= &z_im;
        w_im *= &z_re;
        w_im += &t2;
        w_re.assign(&t1);

        phase.advance();
        k += 1;
    }
    if used > 0 {
        flush_block(
            &mut acc,
            &mut block_prod,
            &mut buf,
            used,
            block_start_k,
            wp,
            &mut t1,
            &mut t2,
        );
    }

    // ln |D| = acc / (2 n)
    acc /= Float::with_val(wp, n);
    acc /= 2u32;
    LogDilogAbs::Log(Float::with_val(ctx.p_bits(), acc))
}

/// Fold one block into the running sum:
/// sum_{k in block} k ln q_k = k0 ln(prod q) + ln(prod_j q_{k0+j}^j).
#[allow(clippy::too_many_arguments)]
fn flush_block(
    acc: &mut Float,
    block_prod: &mut Float,
    buf: &mut [Float],
    used: usize,
    k0: u64,
    wp: u32,
    t1: &mut Float,
    t2: &mut Float,
) {
    t1.assign(&*block_prod);
    t1.ln_mut();
    *t1 *= Float::with_val(wp, k0);
    *acc += &*t1;

    // suffix pass: prod_{j=1}^{used-1} (q_{k0+j} ... q_{k0+used-1})
    t1.assign(1); // running suffix
    t2.assign(1); // product of suffixes
    for j in (1..used).rev() {
        *t1 *= &buf[j];
        *t2 *= &*t1;
    }
    t2.ln_mut();
    *acc += &*t2;

    block_prod.assign(1);
}

/// |D_{m/n}(x, y)| with exact zero detection.
pub fn cyclic_dilog_abs(
    f: &ReducedFraction,
    x: &Rational,
    y: &Rational,
    ctx: &PrecisionContext,
) -> DilogResult {
    match log_cyclic_dilog_abs(f, x, y, ctx) {
        LogDilogAbs::Zero => DilogResult::Zero,
        LogDilogAbs::Log(l) => DilogResult::Value(l.exp()),
    }
}

/// D_{m/n}(x, y) as a complex number, each factor's power taken on the
/// principal branch. A deliberately simple small-n oracle: per-factor
/// sin/cos/atan2 from the exact phase, no recurrences.
pub fn cyclic_dilog_complex(
    f: &ReducedFraction,
    x: &Rational,
    y: &Rational,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let n = f.den().to_u64().ok_or_else(|| {
        Error::Domain(format!("denominator {} too large for the oracle", f.den()))
    })?;
    if n > COMPLEX_ORACLE_BOUND {
        return Err(Error::Domain(format!(
            "denominator {n} above the complex oracle bound {COMPLEX_ORACLE_BOUND}"
        )));
    }
    let wp = working_prec(ctx);
    let t = f.to_rational();
    let n_f = Float::with_val(wp, n);

    let mut log_sum = Float::new(wp);
    let mut arg_sum = Float::new(wp);
    for k in 1..n {
        let theta = exact::frac(&(Rational::from(&t * (Rational::from(x + k))) + y));
        if theta == 0 {
            return Err(Error::DegenerateArgument);
        }
        let mut ang = Float::with_val(wp, &theta);
        ang *= two_pi(wp);
        let (s, c) = ang.sin_cos(Float::new(wp));
        // factor 1 - e^{2 pi i theta}
        let re = Float::with_val(wp, 1 - &c);
        let im = Float::with_val(wp, -s);
        let weight = Float::with_val(wp, k) / &n_f;
        let mut modl = Float::with_val(wp, re.clone().square() + im.clone().square());
        modl.ln_mut();
        modl /= 2u32;
        log_sum += modl * &weight;
        arg_sum += im.atan2(&re) * &weight;
    }

    let mag = log_sum.exp();
    let (s, c) = arg_sum.sin_cos(Float::new(wp));
    Ok(BigComplex::new(
        Float::with_val(ctx.p_bits(), mag.clone() * c),
        Float::with_val(ctx.p_bits(), mag * s),
    ))
}
