//! Resonant-state (Gamow) expansion of quantum decay out of an s-wave
//! delta-shell potential `V(r) = λ δ(r − R)`, in units `ħ = 2m = 1`.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is pure
//! computation: pole finding, resonant-state normalization, the Moshinsky
//! time factor, the time-dependent expansion of `ψ(r, t)`, `S(t)`, `P(t)`,
//! tail-exponent fits, and an independent Crank–Nicolson propagator used
//! as a cross-check. File formats and the command line live in `gamow-lab`.

#![no_std]
// `!(x <= y)` is how NaN inputs get rejected alongside out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod basis;
pub mod crank_nicolson;
mod error;
pub mod model;
pub mod moshinsky;
pub mod poles;
pub mod propagation;
pub mod quadrature;
pub mod tail;
pub mod tridiag;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// `sin(x·len)/x`, continuous through `x = 0` where it equals `len`.
pub(crate) fn sin_ratio(x: Complex64, len: f64) -> Complex64 {
    let xl = x * len;
    if xl.norm() < 1e-3 {
        let x2 = xl * xl;
        // sin(y)/y = 1 − y²/6 + y⁴/120 − y⁶/5040
        (Complex64::new(1.0, 0.0) - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0) * len
    } else {
        xl.sin() / x
    }
}
