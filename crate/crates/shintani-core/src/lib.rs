//! Shintani invariants X(f) = X1(f) X2(f) of real quadratic fields for
//! principal conductors, computed along four independent routes and
//! cross-verified:
//!
//!   R1 — the defining finite product of double sines over the normalized
//!        orbit of the cone pair;
//!   R2 — q-Pochhammer ratios along the discretized modular geodesic;
//!   R3 — cyclic quantum dilogarithm ratios at the reduced fractions
//!        t_n = T_{n-1}(a)/T_n(a);
//!   R4 — the one-variable dilogarithm form available when the conductor is
//!        generated by a rational integer.
//!
//! Exact data (rationals, Chebyshev-type integer sequences, phases mod 1)
//! stays exact until the last moment; transcendental evaluation happens at
//! an explicit [`precision::PrecisionContext`] and is bit-reproducible for
//! a fixed context regardless of thread count.

pub mod error;
pub mod exact;
pub mod field;
pub mod invariants;
pub mod precision;
pub mod special;

pub use error::{Error, Result};
pub use exact::{ChebyshevSeq, ReducedFraction, UnitCoeffSeq};
pub use field::{ConePair, FieldData, OrbitConvention, PrincipalConductor, QuadInt};
pub use invariants::{
    Component, Deviation, EstimateMethod, LimitEstimate, RouteEstimates, RouteId, RouteOptions,
    SequenceResult, SequenceSample, VerificationReport,
};
pub use precision::{BigComplex, BigReal, PrecisionContext, QuadratureSettings};
pub use special::GeodesicPoint;
