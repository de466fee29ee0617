//! The double sine S(omega, z) with quasi-periods (1, omega), evaluated from
//! a convergent integral representation of log S.
//!
//! For 0 < z < 1 + omega,
//!
//!   log S(omega, z) = int_0^inf [ sinh(alpha t/2) / (2 t sinh(t/2) sinh(omega t/2))
//!                                 - alpha / (omega t^2) ] dt,
//!   alpha = 2z - (1 + omega).
//!
//! The integrand has a removable singularity at t = 0, handled by a power
//! series on (0, t0]; the tail is mapped to (0, 1) by an exponential
//! substitution and integrated with the tanh-sinh rule. The representation
//! is pinned down by the identity suite in the tests: reflection
//! S(z) S(1+omega-z) = 1, the two shift relations S(z+1) = S(z)/(2 sin(pi
//! z/omega)) and S(z+omega) = S(z)/(2 sin(pi z)), inversion S(1/omega,
//! z/omega) = S(omega, z), and S(omega, (1+omega)/2) = 1.

use rug::Float;

use crate::error::{Error, Result};
use crate::precision::{pi, BigReal, PrecisionContext};
use crate::special::quad;

/// Coefficients of sinh(x)/x = sum_k s^k u^k / (2k+1)!  with x^2 = s u.
fn sinh_ratio_series(s: &Float, terms: usize, prec: u32) -> Vec<Float> {
    let mut out = Vec::with_capacity(terms);
    let mut c = Float::with_val(prec, 1);
    out.push(c.clone());
    for k in 1..terms {
        // c_k = c_{k-1} * s / ((2k)(2k+1))
        c *= s;
        c /= ((2 * k) * (2 * k + 1)) as u64;
        out.push(c.clone());
    }
    out
}

/// Reciprocal of a power series with unit constant term.
fn series_recip(a: &[Float], prec: u32) -> Vec<Float> {
    let mut b = Vec::with_capacity(a.len());
    b.push(Float::with_val(prec, 1));
    for k in 1..a.len() {
        let mut acc = Float::new(prec);
        for j in 1..=k {
            acc += Float::with_val(prec, &a[j] * &b[k - j]);
        }
        b.push(-acc);
    }
    b
}

fn series_mul(a: &[Float], b: &[Float], prec: u32) -> Vec<Float> {
    let n = a.len().min(b.len());
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = Float::new(prec);
        for j in 0..=k {
            acc += Float::with_val(prec, &a[j] * &b[k - j]);
        }
        out.push(acc);
    }
    out
}

/// log S(omega, z) for omega > 0, 0 < z < 1 + omega.
pub fn log_double_sine(omega: &BigReal, z: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    if !(*omega > 0) {
        return Err(Error::Domain(format!("omega = {omega} not positive")));
    }
    let wp = ctx.working_prec(64);
    let omega = Float::with_val(wp, omega);
    let z = Float::with_val(wp, z);
    let upper = Float::with_val(wp, &omega + 1u32);
    if !(z > 0 && z < upper) {
        return Err(Error::Domain(format!(
            "z = {z} outside (0, 1 + omega) = (0, {upper})"
        )));
    }

    let alpha = Float::with_val(wp, 2 * z.clone() - &upper);
    if alpha.is_zero() {
        return Ok(Float::new(ctx.p_bits()));
    }

    // Series cut: stay well inside the convergence radius 2 pi / max(1, omega)
    // of the x/sinh(x) factors.
    let t0 = {
        let mut t = pi(wp) / 2u32;
        if omega > 1 {
            t /= &omega;
        }
        if t > 0.5 {
            t = Float::with_val(wp, 0.5)
        }
        t
    };

    // I1 = (alpha/omega) sum_{k>=1} g_k t0^{2k-1} / (2k-1), where
    // G(u) = [sinh(at)/(at)] [(t/2)/sinh(t/2)] [(wt/2)/sinh(wt/2)],
    // a = alpha/2, u = t^2, G = 1 + sum g_k u^k.
    let terms = (wp / 4 + 40) as usize;
    let s_alpha = Float::with_val(wp, alpha.clone().square() / 4u32);
    let s_one = Float::with_val(wp, 0.25);
    let s_omega = Float::with_val(wp, omega.clone().square() / 4u32);
    let a_series = sinh_ratio_series(&s_alpha, terms, wp);
    let b_series = series_recip(&sinh_ratio_series(&s_one, terms, wp), wp);
    let c_series = series_recip(&sinh_ratio_series(&s_omega, terms, wp), wp);
    let g = series_mul(&series_mul(&a_series, &b_series, wp), &c_series, wp);

    let t0_sq = Float::with_val(wp, t0.clone().square());
    let mut i1 = Float::new(wp);
    let mut t_pow = t0.clone(); // t0^{2k-1}
    for (k, gk) in g.iter().enumerate().skip(1) {
        let term = Float::with_val(wp, gk * &t_pow) / (2 * k as u64 - 1);
        i1 += term;
        t_pow *= &t0_sq;
    }
    i1 *= Float::with_val(wp, &alpha / &omega);

    // I2 = int_{t0}^inf sinh(alpha t/2) / (2 t sinh(t/2) sinh(omega t/2)) dt
    //      - alpha/(omega t0),
    // with t = t0 + ln(1/v)/gamma, gamma = min(z, 1+omega-z)/2 so the
    // transformed integrand decays like v at the v -> 0 endpoint.
    let gamma = {
        let other = Float::with_val(wp, &upper - &z);
        let m = if z < other { z.clone() } else { other };
        m / 2u32
    };
    let half_alpha = Float::with_val(wp, &alpha / 2u32);
    let half_omega = Float::with_val(wp, &omega / 2u32);
    let integrand = |_v: &Float, omv: &Float| -> Float {
        // ln v computed from 1 - v to stay exact near v = 1.
        let lnv = Float::with_val(wp, -omv.clone()).ln_1p();
        let t = Float::with_val(wp, &t0 - lnv / &gamma);
        let num = Float::with_val(wp, &half_alpha * &t).sinh();
        let mut den = Float::with_val(wp, &t / 2u32).sinh();
        den *= Float::with_val(wp, &half_omega * &t).sinh();
        den *= 2u32;
        den *= &t;
        // divide by gamma * v, folding v in via exp(gamma (t - t0)) = 1/v
        let expo = Float::with_val(wp, &t - &t0) * &gamma;
        num / den * expo.exp() / &gamma
    };
    let tol = Float::with_val(wp, 1) >> (ctx.p_bits() + ctx.quadrature().tol_shift_bits);
    let q = quad::integrate_01(integrand, wp, &tol, ctx.quadrature().max_level);
    let mut i2 = q.value;
    i2 -= Float::with_val(wp, &alpha / &omega) / &t0;

    let mut total = i1;
    total += i2;
    Ok(Float::with_val(ctx.p_bits(), total))
}

/// S(omega, z) itself; positive on the admissible strip.
pub fn double_sine(omega: &BigReal, z: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    Ok(log_double_sine(omega, z, ctx)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx128() -> PrecisionContext {
        PrecisionContext::new(128).unwrap()
    }

    fn tol20(prec: u32) -> Float {
        // 1e-20, the identity-suite tolerance.
        Float::with_val(prec, 1e-20)
    }

    fn assert_close(a: &Float, b: &Float, tol: &Float, what: &str) {
        let diff = Float::with_val(a.prec(), a - b).abs();
        assert!(diff < *tol, "{what}: {a} vs {b} (diff {diff})");
    }

    #[test]
    fn sqrt2_special_value() {
        // S(1, 1/2)^2 = 2 follows from the shift plus reflection identities.
        let ctx = ctx128();
        let s = double_sine(
            &Float::with_val(128, 1),
            &Float::with_val(128, 0.5),
            &ctx,
        )
        .unwrap();
        let expect = Float::with_val(128, 2).sqrt();
        assert_close(&s, &expect, &tol20(128), "S(1, 1/2)");
    }

    #[test]
    fn center_value_is_one() {
        let ctx = ctx128();
        for w in [0.38196601125010515f64, 1.0, 2.5, 2.618033988749895] {
            let omega = Float::with_val(128, w);
            let center = Float::with_val(128, (1.0 + w) / 2.0);
            let s = double_sine(&omega, &center, &ctx).unwrap();
            assert_close(&s, &Float::with_val(128, 1), &tol20(128), "center");
        }
    }

    #[test]
    fn reflection_identity() {
        let ctx = ctx128();
        for w in [0.381966011250105f64, 1.0, 2.5] {
            let omega = Float::with_val(128, w);
            for zf in [0.125, 0.5, 0.9, 1.3] {
                if zf >= 1.0 + w {
                    continue;
                }
                let z = Float::with_val(128, zf);
                let zr = Float::with_val(128, 1.0 + w - zf);
                let p = double_sine(&omega, &z, &ctx).unwrap()
                    * double_sine(&omega, &zr, &ctx).unwrap();
                assert_close(&p, &Float::with_val(128, 1), &tol20(128), "reflection");
            }
        }
    }

    #[test]
    fn shift_identities() {
        let ctx = ctx128();
        let w = 2.1f64;
        let omega = Float::with_val(128, w);
        for zf in [0.3f64, 0.7, 1.1] {
            let z = Float::with_val(128, zf);
            // S(z + 1) = S(z) / (2 sin(pi z / omega))
            let lhs = double_sine(&omega, &Float::with_val(128, zf + 1.0), &ctx).unwrap();
            let sin1 = Float::with_val(128, pi(128) * &z / &omega).sin();
            let rhs = double_sine(&omega, &z, &ctx).unwrap() / (sin1 * 2u32);
            assert_close(&lhs, &rhs, &tol20(128), "shift by 1");

            // S(z + omega) = S(z) / (2 sin(pi z))
            let lhs = double_sine(&omega, &Float::with_val(128, zf + w), &ctx).unwrap();
            let sin2 = Float::with_val(128, pi(128) * &z).sin();
            let rhs = double_sine(&omega, &z, &ctx).unwrap() / (sin2 * 2u32);
            assert_close(&lhs, &rhs, &tol20(128), "shift by omega");
        }
    }

    #[test]
    fn inversion_identity() {
        let ctx = ctx128();
        for w in [0.4f64, 2.618033988749895] {
            let omega = Float::with_val(128, w);
            let inv_omega = Float::with_val(128, 1.0 / w);
            for zf in [0.2f64, 0.9] {
                let z = Float::with_val(128, zf);
                let zs = Float::with_val(128, zf / w);
                let a = double_sine(&omega, &z, &ctx).unwrap();
                let b = double_sine(&inv_omega, &zs, &ctx).unwrap();
                assert_close(&a, &b, &tol20(128), "inversion");
            }
        }
    }

    #[test]
    fn domain_rejection() {
        let ctx = ctx128();
        let omega = Float::with_val(128, 2);
        assert!(double_sine(&omega, &Float::with_val(128, 0), &ctx).is_err());
        assert!(double_sine(&omega, &Float::with_val(128, 3), &ctx).is_err());
        assert!(double_sine(&omega, &Float::with_val(128, -1), &ctx).is_err());
        assert!(double_sine(&Float::with_val(128, 0), &Float::with_val(128, 0.5), &ctx).is_err());
    }
}
