//! The three transcendental objects behind the invariant routes: the
//! q-Pochhammer symbol, the cyclic quantum dilogarithm and the double sine,
//! plus the geodesic points tau_n they are evaluated at.

mod dilog;
mod double_sine;
mod geodesic;
mod phase;
pub mod quad;
mod qpoch;

pub use dilog::{
    cyclic_dilog_abs, cyclic_dilog_complex, log_cyclic_dilog_abs, DilogResult, LogDilogAbs,
    COMPLEX_ORACLE_BOUND,
};
pub use double_sine::{double_sine, log_double_sine};
pub use geodesic::{tau, GeodesicPoint};
pub use qpoch::{log_qpoch_abs, log_qpoch_abs_raw, qpoch_abs, truncation_index};
