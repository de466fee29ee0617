//! Assembly of X1(f), X2(f) and X(f) = X1 X2 along four routes, limit
//! estimation, orbit-convention calibration and cross-route verification.
//!
//! Route R1 is the defining finite product of double sines over the orbit;
//! R2, R3, R4 are sequences indexed by n whose limits the theorems assert.
//! The calibration step resolves the orbit convention the definition leaves
//! to an external reference: the convention whose R1 values reproduce the
//! R2 limits is the right one, and it is re-derived at run time rather than
//! hard-coded.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::exact::{self, ReducedFraction};
use crate::field::{
    cone_pair, g_of, orbit, ConePair, FieldData, OrbitConvention, PrincipalConductor,
};
use crate::precision::{BigReal, PrecisionContext};
use crate::special::{log_cyclic_dilog_abs, log_double_sine, log_qpoch_abs, tau, LogDilogAbs};

/// Identifies one of the four computation routes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RouteId {
    R1DoubleSine,
    R2QPochhammer,
    R3CyclicDilog,
    R4OneVariable,
}

impl RouteId {
    pub fn label(&self) -> &'static str {
        match self {
            RouteId::R1DoubleSine => "r1",
            RouteId::R2QPochhammer => "r2",
            RouteId::R3CyclicDilog => "r3",
            RouteId::R4OneVariable => "r4",
        }
    }
}

impl std::fmt::Display for RouteId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// One entry of a route sequence.
#[derive(Debug, Clone)]
pub struct SequenceSample {
    pub n: i64,
    pub value: BigReal,
    /// |value - previous sample's value|; absent on the first sample.
    pub delta: Option<BigReal>,
}

/// A route sequence together with the indices excluded as degenerate
/// (vanishing dilogarithm factors).
#[derive(Debug, Clone, Default)]
pub struct SequenceResult {
    pub samples: Vec<SequenceSample>,
    pub degenerate: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMethod {
    /// R1's finite product; no sequence involved.
    Exact,
    LastValue,
    Aitken,
}

impl EstimateMethod {
    pub fn label(&self) -> &'static str {
        match self {
            EstimateMethod::Exact => "exact",
            EstimateMethod::LastValue => "last-value",
            EstimateMethod::Aitken => "aitken",
        }
    }
}

/// A limit estimate with a heuristic error indicator.
#[derive(Debug, Clone)]
pub struct LimitEstimate {
    pub estimate: BigReal,
    pub error_indicator: BigReal,
    pub method: EstimateMethod,
}

/// Options shared by the route evaluations.
#[derive(Debug, Clone, Copy)]
pub struct RouteOptions {
    /// Routes refuse indices with T_{n+g}(a) above this bound; both the
    /// dilogarithm factor count and the q-Pochhammer truncation grow
    /// linearly with T.
    pub feasibility_cap: u64,
    /// Opt-in Aitken delta-squared refinement of limit estimates.
    pub aitken: bool,
}

impl Default for RouteOptions {
    fn default() -> Self {
        Self {
            feasibility_cap: 10_000_000,
            aitken: false,
        }
    }
}

fn check_feasible(field: &FieldData, n: i64, cap: u64) -> Result<()> {
    let t = field.t(n);
    if t > cap {
        return Err(Error::FeasibilityExceeded {
            n,
            value: t.to_string(),
            cap,
        });
    }
    Ok(())
}

fn attach_deltas(mut values: Vec<(i64, BigReal)>) -> Vec<SequenceSample> {
    values.sort_by_key(|(n, _)| *n);
    let mut out: Vec<SequenceSample> = Vec::with_capacity(values.len());
    for (n, value) in values {
        let delta = out
            .last()
            .map(|prev| Float::with_val(value.prec(), &value - &prev.value).abs());
        out.push(SequenceSample { n, value, delta });
    }
    out
}

/// X1 and X2 by route R1: finite products of double sines over the orbit.
pub fn x_r1(
    field: &FieldData,
    f: &PrincipalConductor,
    conv: OrbitConvention,
    ctx: &PrecisionContext,
) -> Result<(BigReal, BigReal)> {
    let g = g_of(field, f, None)?;
    let pair = cone_pair(field, f);
    let points = orbit(field, &pair, g, conv)?;
    x_r1_over_orbit(field, &points, ctx)
}

fn x_r1_over_orbit(
    field: &FieldData,
    points: &[ConePair],
    ctx: &PrecisionContext,
) -> Result<(BigReal, BigReal)> {
    let wp = ctx.working_prec(64);
    let mut eps = Float::with_val(wp, field.d());
    eps.sqrt_mut();
    eps *= Float::with_val(wp, field.b());
    eps += Float::with_val(wp, field.a());
    eps /= 2u32;
    let eps_conj = Float::with_val(wp, eps.clone().recip()); // norm-one unit

    let mut log_x1 = Float::new(wp);
    let mut log_x2 = Float::new(wp);
    for p in points {
        for (omega, acc) in [(&eps, &mut log_x1), (&eps_conj, &mut log_x2)] {
            let mut z = Float::with_val(wp, &p.x);
            z *= omega;
            z += Float::with_val(wp, &p.y);
            *acc += log_double_sine(omega, &z, ctx)?;
        }
    }
    Ok((
        Float::with_val(ctx.p_bits(), log_x1).exp(),
        Float::with_val(ctx.p_bits(), log_x2).exp(),
    ))
}

fn r2_sample(
    field: &FieldData,
    pair: &ConePair,
    num_idx: i64,
    den_idx: i64,
    ctx: &PrecisionContext,
) -> Result<BigReal> {
    let num = log_qpoch_abs(&pair.x, &pair.y, &tau(field, num_idx, ctx), ctx)?;
    let den = log_qpoch_abs(&pair.x, &pair.y, &tau(field, den_idx, ctx), ctx)?;
    let diff = Float::with_val(num.prec(), &num - &den);
    Ok(Float::with_val(ctx.p_bits(), diff).exp())
}

fn r2_seq(
    field: &FieldData,
    f: &PrincipalConductor,
    n_range: RangeInclusive<i64>,
    ctx: &PrecisionContext,
    opts: &RouteOptions,
    second: bool,
) -> Result<Vec<SequenceSample>> {
    let g = g_of(field, f, None)? as i64;
    let pair = cone_pair(field, f);
    let hi = *n_range.end();
    check_feasible(field, hi + g, opts.feasibility_cap)?;
    field.t(hi + g); // pre-warm the Chebyshev cache before going parallel

    let ns: Vec<i64> = n_range.filter(|n| *n >= 1).collect();
    let values: Result<Vec<(i64, BigReal)>> = ns
        .par_iter()
        .map(|&n| {
            let (ni, di) = if second {
                (-n - g, -n + g)
            } else {
                (n - g, n + g)
            };
            Ok((n, r2_sample(field, &pair, ni, di, ctx)?))
        })
        .collect();
    Ok(attach_deltas(values?))
}

/// X1 samples by route R2: |(x, y; tau_{n-g})| / |(x, y; tau_{n+g})|.
pub fn x1_r2_seq(
    field: &FieldData,
    f: &PrincipalConductor,
    n_range: RangeInclusive<i64>,
    ctx: &PrecisionContext,
    opts: &RouteOptions,
) -> Result<Vec<SequenceSample>> {
    r2_seq(field, f, n_range, ctx, opts, false)
}

/// X2 samples by route R2: the same ratio along the negative geodesic side,
/// |(x, y; tau_{-n-g})| / |(x, y; tau_{-n+g})|.
pub fn x2_r2_seq(
    field: &FieldData,
    f: &PrincipalConductor,
    n_range: RangeInclusive<i64>,
    ctx: &PrecisionContext,
    opts: &RouteOptions,
) -> Result<Vec<SequenceSample>> {
    r2_seq(field, f, n_range, ctx, opts, true)
}

fn r3_sample(
    field: &FieldData,
    first: &Rational,
    second: &Rational,
    n: i64,
    g: i64,
    ctx: &PrecisionContext,
) -> Result<Option<BigReal>> {
    let f_n = exact::t_frac(n, field.chebyshev())?;
    let f_ng = exact::t_frac(n + g, field.chebyshev())?;
    let num = log_cyclic_dilog_abs(&f_n, first, second, ctx);
    let den = log_cyclic_dilog_abs(&f_ng, first, second, ctx);
    match (num, den) {
        (LogDilogAbs::Log(a), LogDilogAbs::Log(b)) => {
            let diff = Float::with_val(a.prec(), &a - &b);
            Ok(Some(Float::with_val(ctx.p_bits(), diff).exp()))
        }
        _ => Ok(None),
    }
}

fn r3_seq(
    field: &FieldData,
    pair: &ConePair,
    g: i64,
    n_range: RangeInclusive<i64>,
    ctx: &PrecisionContext,
    opts: &RouteOptions,
    second_form: bool,
) -> Result<SequenceResult> {
    let hi = *n_range.end();
    check_feasible(field, hi + g, opts.feasibility_cap)?;
    field.t(hi + g);

    // Theorem argument order: X1 takes D(y, x), X2 takes D(x, y).
    let (first, second) = if second_form {
        (pair.x.clone(), pair.y.clone())
    } else {
        (pair.y.clone(), pair.x.clone())
    };

    let ns: Vec<i64> = n_range.filter(|n| *n >= 1).collect();
    let computed: Result<Vec<(i64, Option<BigReal>)>> = ns
        .par_iter()
        .map(|&n| Ok((n, r3_sample(field, &first, &second, n, g, ctx)?)))
        .collect();

    let mut values = Vec::new();
    let mut degenerate = Vec::new();
    for (n, v) in computed? {
        match v {
            Some(value) => values.push((n, value)),
            None => degenerate.push(n),
        }
    }
    if values.is_empty() {
        return Err(Error::RouteUnavailable(format!(
            "every index in {:?}..={:?} has a vanishing dilogarithm factor",
            ns.first(),
            ns.last()
        )));
    }
    Ok(SequenceResult {
        samples: attach_deltas(values),
        degenerate,
    })
}

/// X1 samples by route R3: |D_{t_n}(y, x)| / |D_{t_{n+g}}(y, x)|.
pub fn x1_r3_seq(
    field: &FieldData,
    f: &PrincipalConductor,
    n_range: RangeInclusive<i64>,
    ctx: &PrecisionContext,
    opts: &RouteOptions,
) -> Result<SequenceResult> {
    let g = g_of(field, f, None)? as i64;
    let pair = cone_pair(field, f);
    r3_seq(field, &pair, g, n_range, ctx, opts, false)
}

/// X2 samples by route R3: |D_{t_n}(x, y)| / |D_{t_{n+g}}(x, y)|; note the
/// argument swap relative to X1.
pub fn x2_r3_seq(
    field: &FieldData,
    f: &PrincipalConductor,
    n_range: RangeInclusive<i64>,
    ctx: &PrecisionContext,
    opts: &RouteOptions,
) -> Result<SequenceResult> {
    let g = g_of(field, f, None)? as i64;
    let pair = cone_pair(field, f);
    r3_seq(field, &pair, g, n_range, ctx, opts, true)
}

/// X1 = X2 samples by route R4 for f = (u): ratios of the one-variable
/// D_{t_n}(1/u), read as D_{t_n}(1/u, 0).
pub fn x_r4_seq(
    field: &FieldData,
    u: i64,
    n_range: RangeInclusive<i64>,
    ctx: &PrecisionContext,
    opts: &RouteOptions,
) -> Result<SequenceResult> {
    if u < 2 {
        return Err(Error::Domain(format!(
            "route r4 needs u >= 2; u = {u} has a vanishing factor or is degenerate"
        )));
    }
    let f = crate::field::conductor(field, u, 0)?;
    let g = g_of(field, &f, None)? as i64;
    let pair = ConePair {
        x: Rational::from((1, u)),
        y: Rational::from(0),
    };
    // One-variable form: first argument 1/u, second 0; matches R3's X1
    // arguments term by term since D(1/u, 1) = D(1/u, 0) exactly.
    r3_seq(field, &pair, g, n_range, ctx, opts, false)
}

/// LastValue limit estimate: the final sample, with the final delta as the
/// error indicator.
pub fn estimate_limit(samples: &[SequenceSample]) -> Result<LimitEstimate> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples(samples.len()));
    }
    let last = samples.last().unwrap();
    Ok(LimitEstimate {
        estimate: last.value.clone(),
        error_indicator: last.delta.clone().unwrap(),
        method: EstimateMethod::LastValue,
    })
}

/// Aitken delta-squared refinement, applied only when the last three deltas
/// are positive and strictly decreasing; falls back to LastValue otherwise.
pub fn estimate_limit_refined(samples: &[SequenceSample]) -> Result<LimitEstimate> {
    let base = estimate_limit(samples)?;
    if samples.len() < 4 {
        return Ok(base);
    }
    let deltas: Vec<&BigReal> = samples
        .iter()
        .rev()
        .take(3)
        .filter_map(|s| s.delta.as_ref())
        .collect();
    if deltas.len() < 3 {
        return Ok(base);
    }
    let monotone = *deltas[0] > 0 && deltas[1] > deltas[0] && deltas[2] > deltas[1];
    if !monotone {
        return Ok(base);
    }
    let m = samples.len();
    let (v1, v2, v3) = (
        &samples[m - 3].value,
        &samples[m - 2].value,
        &samples[m - 1].value,
    );
    let prec = v3.prec();
    let d32 = Float::with_val(prec, v3 - v2);
    let d21 = Float::with_val(prec, v2 - v1);
    let denom = Float::with_val(prec, &d32 - &d21);
    if denom.is_zero() {
        return Ok(base);
    }
    let mut refined = d32.clone();
    refined.square_mut();
    refined /= &denom;
    let refined = Float::with_val(prec, v3 - &refined);
    let indicator = Float::with_val(prec, &refined - v3).abs();
    Ok(LimitEstimate {
        estimate: refined,
        error_indicator: indicator,
        method: EstimateMethod::Aitken,
    })
}

fn estimate_with(samples: &[SequenceSample], opts: &RouteOptions) -> Result<LimitEstimate> {
    if opts.aitken {
        estimate_limit_refined(samples)
    } else {
        estimate_limit(samples)
    }
}

/// Select the orbit convention whose R1 values reproduce the R2 limit
/// estimates within `tol`.
///
/// A convention is rejected outright when its orbit is not g-periodic. If
/// both conventions match but trace the same orbit multiset, they are
/// extensionally identical for the invariant and the row action is returned
/// canonically; if both match on genuinely different orbits, or neither
/// matches, calibration is inconclusive.
pub fn calibrate_convention(
    field: &FieldData,
    f: &PrincipalConductor,
    ctx: &PrecisionContext,
    tol: f64,
) -> Result<OrbitConvention> {
    let opts = RouteOptions::default();
    let x1 = estimate_with(&x1_r2_seq(field, f, 4..=12, ctx, &opts)?, &opts)?;
    let x2 = estimate_with(&x2_r2_seq(field, f, 4..=12, ctx, &opts)?, &opts)?;
    calibrate_with(field, f, ctx, tol, &x1, &x2)
}

pub(crate) fn calibrate_with(
    field: &FieldData,
    f: &PrincipalConductor,
    ctx: &PrecisionContext,
    tol: f64,
    r2_x1: &LimitEstimate,
    r2_x2: &LimitEstimate,
) -> Result<OrbitConvention> {
    if f.is_unit_ideal() {
        return Err(Error::CalibrationInconclusive(
            "norm-1 conductor is degenerate".into(),
        ));
    }
    let g = g_of(field, f, None)?;
    let pair = cone_pair(field, f);
    let tol_f = Float::with_val(ctx.p_bits(), tol);

    let mut matches: Vec<(OrbitConvention, Vec<ConePair>)> = Vec::new();
    for conv in [OrbitConvention::RowAction, OrbitConvention::ColumnAction] {
        let points = match orbit(field, &pair, g, conv) {
            Ok(p) => p,
            Err(_) => continue, // non-periodic: rejected before any value comparison
        };
        let (x1, x2) = x_r1_over_orbit(field, &points, ctx)?;
        let d1 = Float::with_val(ctx.p_bits(), &x1 - &r2_x1.estimate).abs();
        let d2 = Float::with_val(ctx.p_bits(), &x2 - &r2_x2.estimate).abs();
        if d1 <= tol_f && d2 <= tol_f {
            matches.push((conv, points));
        }
    }

    match matches.len() {
        0 => Err(Error::CalibrationInconclusive(
            "neither convention reproduces the R2 limits at this tolerance".into(),
        )),
        1 => Ok(matches[0].0),
        _ => {
            let mut a = matches[0].1.clone();
            let mut b = matches[1].1.clone();
            a.sort();
            b.sort();
            if a == b {
                // Same decomposition datum either way; the choice cannot
                // matter. Report the row action canonically.
                Ok(OrbitConvention::RowAction)
            } else {
                Err(Error::CalibrationInconclusive(
                    "both conventions match on genuinely different orbits".into(),
                ))
            }
        }
    }
}

/// Which invariant component a deviation compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    X1,
    X2,
    X,
}

impl Component {
    pub fn label(&self) -> &'static str {
        match self {
            Component::X1 => "x1",
            Component::X2 => "x2",
            Component::X => "x",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RouteEstimates {
    pub route: RouteId,
    pub x1: LimitEstimate,
    pub x2: LimitEstimate,
}

impl RouteEstimates {
    /// X = X1 X2 as computed from this route's estimates.
    pub fn x(&self) -> BigReal {
        Float::with_val(
            self.x1.estimate.prec(),
            &self.x1.estimate * &self.x2.estimate,
        )
    }
}

#[derive(Debug, Clone)]
pub struct Deviation {
    pub a: RouteId,
    pub b: RouteId,
    pub component: Component,
    pub value: BigReal,
}

/// The cross-route verification report.
#[derive(Debug)]
pub struct VerificationReport {
    pub d: i64,
    pub u: i64,
    pub v: i64,
    pub a: Integer,
    pub b: Integer,
    pub norm: Integer,
    pub g: u64,
    pub pair: ConePair,
    pub calibration: std::result::Result<OrbitConvention, String>,
    pub estimates: Vec<RouteEstimates>,
    pub route_errors: Vec<(RouteId, String)>,
    /// Degenerate (excluded) indices per route sequence, labeled x1/x2.
    pub degenerate: Vec<(RouteId, Component, Vec<i64>)>,
    pub deviations: Vec<Deviation>,
    pub tol: f64,
    pub pass: bool,
}

/// Compute every available route, estimate limits, calibrate the orbit
/// convention and compare the routes pairwise at tolerance `tol`.
///
/// Route errors are recorded per route, not fatal; the report passes when
/// every computed pairwise deviation is within tolerance and at least two
/// routes are available.
pub fn verify(
    field: &FieldData,
    f: &PrincipalConductor,
    n_range: RangeInclusive<i64>,
    ctx: &PrecisionContext,
    tol: f64,
    opts: &RouteOptions,
) -> Result<VerificationReport> {
    let g = g_of(field, f, None)?;
    let pair = cone_pair(field, f);

    let mut estimates = Vec::new();
    let mut route_errors = Vec::new();
    let mut degenerate = Vec::new();

    // R2 first: calibration needs its estimates.
    let mut r2_pair: Option<(LimitEstimate, LimitEstimate)> = None;
    match (
        x1_r2_seq(field, f, n_range.clone(), ctx, opts),
        x2_r2_seq(field, f, n_range.clone(), ctx, opts),
    ) {
        (Ok(s1), Ok(s2)) => match (estimate_with(&s1, opts), estimate_with(&s2, opts)) {
            (Ok(e1), Ok(e2)) => {
                r2_pair = Some((e1.clone(), e2.clone()));
                estimates.push(RouteEstimates {
                    route: RouteId::R2QPochhammer,
                    x1: e1,
                    x2: e2,
                });
            }
            (a, b) => {
                if let Err(e) = a {
                    route_errors.push((RouteId::R2QPochhammer, e.to_string()));
                } else if let Err(e) = b {
                    route_errors.push((RouteId::R2QPochhammer, e.to_string()));
                }
            }
        },
        (a, b) => {
            if let Err(e) = a {
                route_errors.push((RouteId::R2QPochhammer, e.to_string()));
            } else if let Err(e) = b {
                route_errors.push((RouteId::R2QPochhammer, e.to_string()));
            }
        }
    }

    // R3.
    match (
        x1_r3_seq(field, f, n_range.clone(), ctx, opts),
        x2_r3_seq(field, f, n_range.clone(), ctx, opts),
    ) {
        (Ok(s1), Ok(s2)) => {
            if !s1.degenerate.is_empty() {
                degenerate.push((RouteId::R3CyclicDilog, Component::X1, s1.degenerate.clone()));
            }
            if !s2.degenerate.is_empty() {
                degenerate.push((RouteId::R3CyclicDilog, Component::X2, s2.degenerate.clone()));
            }
            match (
                estimate_with(&s1.samples, opts),
                estimate_with(&s2.samples, opts),
            ) {
                (Ok(e1), Ok(e2)) => estimates.push(RouteEstimates {
                    route: RouteId::R3CyclicDilog,
                    x1: e1,
                    x2: e2,
                }),
                (a, b) => {
                    if let Err(e) = a {
                        route_errors.push((RouteId::R3CyclicDilog, e.to_string()));
                    } else if let Err(e) = b {
                        route_errors.push((RouteId::R3CyclicDilog, e.to_string()));
                    }
                }
            }
        }
        (a, b) => {
            if let Err(e) = a {
                route_errors.push((RouteId::R3CyclicDilog, e.to_string()));
            } else if let Err(e) = b {
                route_errors.push((RouteId::R3CyclicDilog, e.to_string()));
            }
        }
    }

    // R4 applies to f = (u), u >= 2.
    if f.v() == 0 && f.u() >= 2 {
        match x_r4_seq(field, f.u(), n_range.clone(), ctx, opts) {
            Ok(s) => {
                if !s.degenerate.is_empty() {
                    degenerate.push((RouteId::R4OneVariable, Component::X, s.degenerate.clone()));
                }
                match estimate_with(&s.samples, opts) {
                    Ok(e) => estimates.push(RouteEstimates {
                        route: RouteId::R4OneVariable,
                        x1: e.clone(),
                        x2: e,
                    }),
                    Err(e) => route_errors.push((RouteId::R4OneVariable, e.to_string())),
                }
            }
            Err(e) => route_errors.push((RouteId::R4OneVariable, e.to_string())),
        }
    } else if f.v() == 0 && f.u() == 1 {
        route_errors.push((
            RouteId::R4OneVariable,
            "u = 1 rejected: vanishing factor".into(),
        ));
    }

    // Calibration, then R1 under the calibrated convention.
    let calibration = match &r2_pair {
        Some((e1, e2)) => calibrate_with(field, f, ctx, tol, e1, e2).map_err(|e| e.to_string()),
        None => Err("calibration needs the R2 estimates, which failed".to_string()),
    };
    if let Ok(conv) = &calibration {
        match x_r1(field, f, *conv, ctx) {
            Ok((x1, x2)) => {
                let floor = ctx.error_floor();
                estimates.push(RouteEstimates {
                    route: RouteId::R1DoubleSine,
                    x1: LimitEstimate {
                        estimate: x1,
                        error_indicator: floor.clone(),
                        method: EstimateMethod::Exact,
                    },
                    x2: LimitEstimate {
                        estimate: x2,
                        error_indicator: floor,
                        method: EstimateMethod::Exact,
                    },
                });
            }
            Err(e) => route_errors.push((RouteId::R1DoubleSine, e.to_string())),
        }
    } else if let Err(e) = &calibration {
        route_errors.push((RouteId::R1DoubleSine, e.clone()));
    }

    estimates.sort_by_key(|e| e.route);

    // Pairwise deviations over the available routes.
    let mut deviations = Vec::new();
    for i in 0..estimates.len() {
        for j in (i + 1)..estimates.len() {
            let (ea, eb) = (&estimates[i], &estimates[j]);
            let prec = ctx.p_bits();
            for (component, va, vb) in [
                (Component::X1, &ea.x1.estimate, &eb.x1.estimate),
                (Component::X2, &ea.x2.estimate, &eb.x2.estimate),
                (Component::X, &ea.x(), &eb.x()),
            ] {
                deviations.push(Deviation {
                    a: ea.route,
                    b: eb.route,
                    component,
                    value: Float::with_val(prec, va - vb).abs(),
                });
            }
        }
    }

    let tol_f = Float::with_val(ctx.p_bits(), tol);
    let pass = estimates.len() >= 2 && deviations.iter().all(|d| d.value <= tol_f);

    Ok(VerificationReport {
        d: field.d(),
        u: f.u(),
        v: f.v(),
        a: field.a().clone(),
        b: field.b().clone(),
        norm: f.norm().clone(),
        g,
        pair,
        calibration,
        estimates,
        route_errors,
        degenerate,
        deviations,
        tol,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{conductor, solve_field};

    fn ctx(bits: u32) -> PrecisionContext {
        PrecisionContext::new(bits).unwrap()
    }

    fn mk_samples(values: &[f64]) -> Vec<SequenceSample> {
        attach_deltas(
            values
                .iter()
                .enumerate()
                .map(|(i, v)| (i as i64 + 1, Float::with_val(128, *v)))
                .collect(),
        )
    }

    #[test]
    fn estimate_limit_basics() {
        let constant = mk_samples(&[2.5, 2.5, 2.5]);
        let e = estimate_limit(&constant).unwrap();
        assert_eq!(e.estimate, 2.5);
        assert!(e.error_indicator.is_zero());
        assert_eq!(e.method, EstimateMethod::LastValue);

        let two = mk_samples(&[1.0, 1.5]);
        let e = estimate_limit(&two).unwrap();
        assert_eq!(e.estimate, 1.5);
        assert_eq!(e.method, EstimateMethod::LastValue);

        assert!(matches!(
            estimate_limit(&mk_samples(&[1.0])),
            Err(Error::TooFewSamples(1))
        ));
    }

    #[test]
    fn aitken_recovers_geometric_limit() {
        // v_n = L + r rho^n with rho = 1/2: Aitken should recover L to
        // within rho^2 r (it is exact here up to rounding).
        let limit = 3.0f64;
        let r = 0.8;
        let rho = 0.5f64;
        let values: Vec<f64> = (1..=6).map(|n| limit + r * rho.powi(n)).collect();
        let samples = mk_samples(&values);
        let e = estimate_limit_refined(&samples).unwrap();
        assert_eq!(e.method, EstimateMethod::Aitken);
        let err = (e.estimate.to_f64() - limit).abs();
        assert!(err <= rho * rho * r, "err = {err}");
        // Far better than the last value itself.
        assert!(err < (values[5] - limit).abs() * 1e-6);
    }

    #[test]
    fn aitken_falls_back_on_nonmonotone_deltas() {
        let samples = mk_samples(&[1.0, 2.0, 1.5, 2.2, 1.8]);
        let e = estimate_limit_refined(&samples).unwrap();
        assert_eq!(e.method, EstimateMethod::LastValue);
    }

    #[test]
    fn r4_rejects_small_u() {
        let f5 = solve_field(5).unwrap();
        let c = ctx(64);
        assert!(x_r4_seq(&f5, 1, 4..=6, &c, &RouteOptions::default()).is_err());
        assert!(x_r4_seq(&f5, 0, 4..=6, &c, &RouteOptions::default()).is_err());
    }

    #[test]
    fn feasibility_cap_enforced() {
        let f5 = solve_field(5).unwrap();
        let c = ctx(64);
        let opts = RouteOptions {
            feasibility_cap: 100,
            aitken: false,
        };
        let f = conductor(&f5, 2, 0).unwrap();
        let err = x1_r2_seq(&f5, &f, 4..=12, &c, &opts).unwrap_err();
        assert!(matches!(err, Error::FeasibilityExceeded { .. }));
        let err = x1_r3_seq(&f5, &f, 4..=12, &c, &opts).unwrap_err();
        assert!(matches!(err, Error::FeasibilityExceeded { .. }));
    }

    // Cross-route smoke tests at low precision and small n live in the
    // crate's integration tests; the acceptance suite runs the full-scale
    // configuration.
}
