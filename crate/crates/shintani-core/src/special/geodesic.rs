//! Points tau_n = (T_{n+1}(a) + i b sqrt(d)) / T_n(a) on the discretized
//! modular geodesic joining eps' (n -> -infinity) and eps (n -> +infinity).

use rug::{Integer, Rational};

use crate::field::FieldData;
use crate::precision::{BigReal, PrecisionContext};

/// A geodesic point. The real part is kept both unreduced (T_{n+1}, T_n)
/// and as a canonical rational; the imaginary part b sqrt(d) / T_n is
/// realized lazily at whatever precision a consumer needs.
#[derive(Debug, Clone)]
pub struct GeodesicPoint {
    n: i64,
    re_num: Integer,
    re_den: Integer,
    re: Rational,
    b: Integer,
    d: i64,
    im: BigReal,
}

impl GeodesicPoint {
    pub fn n(&self) -> i64 {
        self.n
    }

    /// T_{n+1}(a), unreduced numerator.
    pub fn re_num(&self) -> &Integer {
        &self.re_num
    }

    /// T_n(a), unreduced denominator.
    pub fn re_den(&self) -> &Integer {
        &self.re_den
    }

    /// Exact real part in lowest terms.
    pub fn re(&self) -> &Rational {
        &self.re
    }

    /// Imaginary part at the context's precision.
    pub fn im(&self) -> &BigReal {
        &self.im
    }

    /// Imaginary part b sqrt(d) / T_n recomputed from exact data.
    pub fn im_at(&self, prec: u32) -> BigReal {
        let mut t = BigReal::with_val(prec, self.d);
        t.sqrt_mut();
        t *= BigReal::with_val(prec, &self.b);
        t /= BigReal::with_val(prec, &self.re_den);
        t
    }
}

/// tau_n at the context precision. Defined for every integer n; T_n >= 2
/// never vanishes, and T_{-n} = T_n puts negative indices on the geodesic's
/// eps' side.
pub fn tau(field: &FieldData, n: i64, ctx: &PrecisionContext) -> GeodesicPoint {
    let re_num = field.t(n + 1);
    let re_den = field.t(n);
    let re = Rational::from((re_num.clone(), re_den.clone()));
    let mut point = GeodesicPoint {
        n,
        re_num,
        re_den,
        re,
        b: field.b().clone(),
        d: field.d(),
        im: BigReal::new(ctx.p_bits()),
    };
    point.im = point.im_at(ctx.p_bits());
    point
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::solve_field;

    #[test]
    fn tau_examples() {
        let f5 = solve_field(5).unwrap();
        let ctx = PrecisionContext::new(128).unwrap();

        let t0 = tau(&f5, 0, &ctx);
        assert_eq!(*t0.re(), Rational::from((3, 2)));
        let expect = BigReal::with_val(128, 5).sqrt() / 2u32;
        let diff = BigReal::with_val(128, t0.im() - &expect).abs();
        assert!(diff < BigReal::with_val(128, 1) >> 120);

        // tau_{-4}: T_{-3} / T_{-4} = T_3 / T_4 = 18/47 = t_4.
        let tm4 = tau(&f5, -4, &ctx);
        assert_eq!(*tm4.re(), Rational::from((18, 47)));
        assert!(*tm4.im() > 0);
    }

    #[test]
    fn tau_re_converges_to_eps_geometrically() {
        let f5 = solve_field(5).unwrap();
        let ctx = PrecisionContext::new(64).unwrap();
        let eps = (3.0 + 5f64.sqrt()) / 2.0;
        let mut prev_err = f64::INFINITY;
        let mut ratios = Vec::new();
        for n in 1..=20 {
            let t = tau(&f5, n, &ctx);
            let err = (t.re().to_f64() - eps).abs();
            assert!(err < prev_err);
            if prev_err.is_finite() {
                ratios.push(err / prev_err);
            }
            prev_err = err;
        }
        // |re(tau_n) - eps| shrinks with ratio -> eps^-2.
        let target = eps.powi(-2);
        let last = ratios.last().unwrap();
        assert!((last - target).abs() < 1e-3, "ratio {last} vs {target}");
    }
}
