//! Field setup for Q(sqrt(d)): the totally positive fundamental unit,
//! quadratic integers, principal conductors, the unit order g, cone pairs
//! and normalized orbits.

use std::sync::OnceLock;

use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::exact::{self, ChebyshevSeq, UnitCoeffSeq};

/// A real quadratic field Q(sqrt(d)) with its totally positive fundamental
/// unit eps = (a + b sqrt(d)) / 2, a^2 - d b^2 = 4.
///
/// eps' = (a - b sqrt(d)) / 2 is the conjugate; eps eps' = 1 and
/// eps + eps' = a, so eps has minus continued fraction expansion of length
/// one whenever a >= 3, which the Pell solution guarantees.
#[derive(Debug)]
pub struct FieldData {
    d: i64,
    a: Integer,
    b: Integer,
    chebyshev: ChebyshevSeq,
    unit_coeffs: UnitCoeffSeq,
}

impl FieldData {
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn a(&self) -> &Integer {
        &self.a
    }

    pub fn b(&self) -> &Integer {
        &self.b
    }

    /// Memoized T_n(a).
    pub fn t(&self, n: i64) -> Integer {
        self.chebyshev.get(n)
    }

    /// Memoized b_n (coordinates of eps^n).
    pub fn b_coeff(&self, n: u64) -> Integer {
        self.unit_coeffs.get(n)
    }

    pub fn chebyshev(&self) -> &ChebyshevSeq {
        &self.chebyshev
    }
}

fn is_squarefree(d: i64) -> bool {
    if d < 2 {
        return false;
    }
    let mut m = d;
    let mut p = 2i64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

const UNIT_SEARCH_CAP: u64 = 10_000_000;

/// Solve a^2 - d b^2 = 4 for the minimal positive (a, b).
///
/// Incremental search on b with a perfect-square test; a = sqrt(4 + d b^2)
/// is increasing in b, so the first hit is the fundamental solution.
pub fn solve_field(d: i64) -> Result<FieldData> {
    if !is_squarefree(d) {
        return Err(Error::NotSquarefree(d));
    }
    let di = Integer::from(d);
    for b in 1..=UNIT_SEARCH_CAP {
        let bi = Integer::from(b);
        let sq = Integer::from(&bi * &bi) * &di + 4u32;
        if sq.is_perfect_square() {
            let a = sq.sqrt();
            debug_assert!(a >= 3);
            let chebyshev = ChebyshevSeq::new(a.clone())?;
            let unit_coeffs = UnitCoeffSeq::new(a.clone(), bi.clone())?;
            return Ok(FieldData {
                d,
                a,
                b: bi,
                chebyshev,
                unit_coeffs,
            });
        }
    }
    Err(Error::UnitSearchExhausted {
        d,
        cap: UNIT_SEARCH_CAP,
    })
}

/// An element (p + q sqrt(d)) / 2 of O_K.
///
/// Integrality: for d = 1 mod 4 the coordinates must have equal parity;
/// otherwise both must be even.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadInt {
    p: Integer,
    q: Integer,
}

impl QuadInt {
    pub fn new(p: Integer, q: Integer, d: i64) -> Result<Self> {
        let ok = if d.rem_euclid(4) == 1 {
            (Integer::from(&p - &q)).is_even()
        } else {
            p.is_even() && q.is_even()
        };
        if !ok {
            return Err(Error::NotIntegral {
                p: p.to_string(),
                q: q.to_string(),
                d,
            });
        }
        Ok(Self { p, q })
    }

    /// u + v sqrt(d) as an element of O_K.
    pub fn from_coords(u: &Integer, v: &Integer) -> Self {
        Self {
            p: Integer::from(u * 2u32),
            q: Integer::from(v * 2u32),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.p == 0 && self.q == 0
    }

    pub fn conj(&self) -> Self {
        Self {
            p: self.p.clone(),
            q: -self.q.clone(),
        }
    }

    /// Field norm (p^2 - d q^2) / 4, an ordinary integer.
    pub fn norm(&self, d: i64) -> Integer {
        let n4 = Integer::from(&self.p * &self.p) - Integer::from(d) * Integer::from(&self.q * &self.q);
        debug_assert!(n4.is_divisible_u(4));
        n4 / 4u32
    }

    pub fn mul(&self, other: &Self, d: i64) -> Self {
        // ((p1 + q1 s)(p2 + q2 s)) / 4 = ((p1 p2 + d q1 q2) + (p1 q2 + q1 p2) s) / 4
        let p = Integer::from(&self.p * &other.p) + Integer::from(d) * Integer::from(&self.q * &other.q);
        let q = Integer::from(&self.p * &other.q) + Integer::from(&self.q * &other.p);
        debug_assert!(p.is_even() && q.is_even());
        Self {
            p: p / 2u32,
            q: q / 2u32,
        }
    }
}

/// Exact divisibility in O_K: alpha / w integral?
///
/// Decided via beta = alpha * conj(w): alpha / w = beta / N(w), so the test
/// is that N(w) divides both coordinates of beta and the quotient pair
/// satisfies the integrality invariant.
pub fn divides(field: &FieldData, w: &QuadInt, alpha: &QuadInt) -> Result<bool> {
    if w.is_zero() {
        return Err(Error::ZeroDivisor);
    }
    let d = field.d;
    let n = w.norm(d);
    let beta = alpha.mul(&w.conj(), d);
    if !beta.p.is_divisible(&n) || !beta.q.is_divisible(&n) {
        return Ok(false);
    }
    let p = beta.p / &n;
    let q = beta.q / &n;
    Ok(QuadInt::new(p, q, d).is_ok())
}

/// A principal conductor (u + v sqrt(d)) with its norm and lazily computed
/// unit order g.
#[derive(Debug)]
pub struct PrincipalConductor {
    u: i64,
    v: i64,
    norm: Integer,
    g: OnceLock<u64>,
}

impl PrincipalConductor {
    pub fn u(&self) -> i64 {
        self.u
    }

    pub fn v(&self) -> i64 {
        self.v
    }

    pub fn norm(&self) -> &Integer {
        &self.norm
    }

    /// Norm-1 conductors (unit ideal) are accepted but degenerate: route R4
    /// refuses them and reports flag them.
    pub fn is_unit_ideal(&self) -> bool {
        self.norm == 1
    }

    pub fn generator(&self) -> QuadInt {
        QuadInt::from_coords(&Integer::from(self.u), &Integer::from(self.v))
    }
}

/// Construct the principal ideal (u + v sqrt(d)).
pub fn conductor(field: &FieldData, u: i64, v: i64) -> Result<PrincipalConductor> {
    if u == 0 && v == 0 {
        return Err(Error::ZeroIdeal);
    }
    let norm = (Integer::from(u) * u - Integer::from(field.d) * Integer::from(v) * v).abs();
    Ok(PrincipalConductor {
        u,
        v,
        norm,
        g: OnceLock::new(),
    })
}

/// Smallest l >= 1 with eps^l = 1 mod f, i.e. the generator of f divides
/// eps^l - 1 = ((T_l - 2) + b_l sqrt(d)) / 2.
///
/// `cap` defaults to 4 N(f)^2, a generous bound on the order of any element
/// of the residue ring's unit group.
pub fn g_of(field: &FieldData, f: &PrincipalConductor, cap: Option<u64>) -> Result<u64> {
    if let Some(g) = f.g.get() {
        return Ok(*g);
    }
    let cap = cap.unwrap_or_else(|| {
        let n2 = Integer::from(f.norm() * f.norm()) * 4u32;
        n2.to_u64().unwrap_or(u64::MAX)
    });
    let w = f.generator();
    for l in 1..=cap {
        let p = field.t(l as i64) - 2u32;
        let q = field.b_coeff(l);
        let eps_l_minus_1 = QuadInt { p, q };
        if divides(field, &w, &eps_l_minus_1)? {
            let _ = f.g.set(l);
            return Ok(l);
        }
    }
    Err(Error::OrderNotFound { cap })
}

/// The exact rational pair (x, y) attached to a principal conductor by the
/// cone decomposition: x = [-2v / (b N)]_1, y = [(b u + a v) / (b N)].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConePair {
    pub x: Rational,
    pub y: Rational,
}

impl std::fmt::Display for ConePair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

pub fn cone_pair(field: &FieldData, f: &PrincipalConductor) -> ConePair {
    let bn = Integer::from(field.b() * f.norm());
    let x = exact::frac1(&Rational::from((Integer::from(-2 * f.v()), bn.clone())));
    let y_num = Integer::from(field.b() * f.u()) + Integer::from(field.a() * f.v());
    let y = exact::frac(&Rational::from((y_num, bn)));
    ConePair { x, y }
}

/// The two plausible normalizations of the U = [[a, -1], [1, 0]] action on
/// (x, y). The upstream definition is deferred to an external convention;
/// calibration against the q-Pochhammer route selects the right one at run
/// time rather than hard-coding it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitConvention {
    /// (x, y) -> ([a x + y]_1, [-x])
    RowAction,
    /// (x, y) -> ([a x - y]_1, [x])
    ColumnAction,
}

impl OrbitConvention {
    pub fn name(&self) -> &'static str {
        match self {
            OrbitConvention::RowAction => "row",
            OrbitConvention::ColumnAction => "column",
        }
    }

    pub fn step(&self, a: &Integer, pair: &ConePair) -> ConePair {
        let ax = Rational::from((a.clone(), Integer::from(1))) * &pair.x;
        match self {
            OrbitConvention::RowAction => ConePair {
                x: exact::frac1(&(ax + &pair.y)),
                y: exact::frac(&Rational::from(-pair.x.clone())),
            },
            OrbitConvention::ColumnAction => ConePair {
                x: exact::frac1(&(ax - &pair.y)),
                y: exact::frac(&pair.x),
            },
        }
    }
}

/// The normalized orbit of length g starting at `pair`. The g-th step must
/// return to the start; otherwise the convention is rejected.
pub fn orbit(
    field: &FieldData,
    pair: &ConePair,
    g: u64,
    conv: OrbitConvention,
) -> Result<Vec<ConePair>> {
    assert!(g >= 1, "orbit length must be >= 1");
    let mut points = Vec::with_capacity(g as usize);
    let mut current = pair.clone();
    for _ in 0..g {
        points.push(current.clone());
        current = conv.step(field.a(), &current);
    }
    if current != *pair {
        return Err(Error::OrbitNotPeriodic {
            g,
            convention: conv.name(),
        });
    }
    Ok(points)
}
