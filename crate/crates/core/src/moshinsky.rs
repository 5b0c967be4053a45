//! The Moshinsky time factor `M(k, t) = ½ e^{y²} erfc(y)`,
//! `y = −e^{−iπ/4} k √t`, and its large-time split.
//!
//! `M(k, 0) = ½` for every `k`, and for a fourth-quadrant pole the leading
//! large-time behaviour is the decaying exponential `e^{−ik²t}`. The
//! numerically stable kernel is the Faddeeva function
//! `w(z) = e^{−z²} erfc(−iz)`, with `M = ½ w(iy)`.

#[allow(unused_imports)]
use num_traits::Float;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// `1/(2√(2π))`.
const HALF_INV_SQRT_2PI: f64 = 0.199_471_140_200_716_35;

/// Coefficients of the large-time power terms of `M(k, t)`:
/// `M ≈ [e^{−ik²t}] + A/(k t^{1/2}) + B/(k³ t^{3/2}) + …`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticConstants {
    pub a: Complex64,
    pub b: Complex64,
}

/// `A = −e^{iπ/4}/(2√π)`, `B = −e^{−iπ/4}/(4√π)`.
///
/// With `ζ = e^{−iπ/4} k √t`, `e^{ζ²} erfc(ζ) ~ (1/√π)(1/ζ − 1/(2ζ³) + …)`
/// and `M = e^{−ik²t} − ½ e^{ζ²} erfc(ζ)` for fourth-quadrant `k`.
pub const ASYMPTOTIC: AsymptoticConstants = AsymptoticConstants {
    a: Complex64 { re: -HALF_INV_SQRT_2PI, im: -HALF_INV_SQRT_2PI },
    b: Complex64 { re: -0.5 * HALF_INV_SQRT_2PI, im: 0.5 * HALF_INV_SQRT_2PI },
};

/// Which Faddeeva evaluation produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Upper half plane, evaluated directly.
    Direct,
    /// Lower half plane, through `w(z) = 2e^{−z²} − w(−z)`.
    Reflected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoshinskyEval {
    pub k: Complex64,
    pub t: f64,
    pub value: Complex64,
    pub branch_used: Branch,
}

/// Large-time decomposition of `M(k, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticSplit {
    /// `e^{−ik²t}` when `Re k > 0`, zero otherwise.
    pub exponential_part: Complex64,
    /// `A/(k t^{1/2}) + B/(k³ t^{3/2})`, truncated at the requested order.
    pub power_part: Complex64,
}

impl AsymptoticSplit {
    pub fn total(&self) -> Complex64 {
        self.exponential_part + self.power_part
    }
}

/// Faddeeva function `w(z) = e^{−z²} erfc(−iz)`.
///
/// Upper half plane: Weideman's 40-term rational expansion for `|z| < 6`
/// and the Laplace continued fraction beyond. Lower half plane goes
/// through the reflection formula with `e^{−z²}` formed from
/// `Re(−z²) = (y − x)(y + x)` so the exponent never overflows by itself.
pub fn faddeeva_w(z: Complex64) -> Result<Complex64> {
    if z.im >= 0.0 {
        return Ok(faddeeva_upper(z));
    }
    let e = exp_neg_square(z)?;
    Ok(e * 2.0 - faddeeva_upper(-z))
}

/// `e^{−z²}` in split form.
fn exp_neg_square(z: Complex64) -> Result<Complex64> {
    let (x, y) = (z.re, z.im);
    let exponent = (y - x) * (y + x);
    if exponent > 700.0 {
        return Err(Error::Overflow { exponent });
    }
    let phase = -2.0 * x * y;
    let mag = exponent.exp();
    Ok(Complex64::new(mag * phase.cos(), mag * phase.sin()))
}

fn faddeeva_upper(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r < 6.0 {
        weideman(z)
    } else {
        laplace_continued_fraction(z, if r < 12.0 { 40 } else { 20 })
    }
}

const WEIDEMAN_L: f64 = 5.318_295_896_944_988_6;

/// `a_j`, j = 1..=40, of `w(z) ≈ 2 Σ a_j Z^{j−1}/(L − iz)² + 1/(√π(L − iz))`
/// with `Z = (L + iz)/(L − iz)`, `L = (N/√2)^{1/2}`.
const WEIDEMAN_COEFFS: [f64; 40] = [
    2.8996245093897053,
    2.61605415276186,
    2.201513794878312,
    1.7253830848179779,
    1.2563815675765133,
    0.8472174576593818,
    0.5266528988277086,
    0.29989437996150065,
    0.15504263802479495,
    0.07182361779074337,
    0.029202916471241867,
    0.010048186242783424,
    0.0027054056330737914,
    0.0004398070159869668,
    -3.939363145489569e-05,
    -5.591309264248318e-05,
    -1.8007447144750956e-05,
    -1.0660138984947143e-06,
    1.483566113220078e-06,
    5.912136951899494e-07,
    1.4198642399935674e-08,
    -6.35177348504429e-08,
    -1.8315616783040462e-08,
    3.2497465180436973e-09,
    3.0177805400090707e-09,
    2.1086006347066517e-10,
    -3.5632339865976533e-10,
    -9.055124450928292e-11,
    3.47272670930455e-11,
    1.7714495214011192e-11,
    -2.7276023158200452e-12,
    -2.907688342182867e-12,
    1.2031458219387989e-13,
    4.5329666782606727e-13,
    1.37256205867155e-14,
    -7.074086260286855e-14,
    -5.409310282882142e-15,
    1.1357687198999241e-14,
    1.128073562364402e-15,
    -1.899694947394927e-15,
];

fn weideman(z: Complex64) -> Complex64 {
    let denom = Complex64::new(WEIDEMAN_L, 0.0) - I * z;
    let zz = (Complex64::new(WEIDEMAN_L, 0.0) + I * z) / denom;
    let mut p = Complex64::new(0.0, 0.0);
    for a in WEIDEMAN_COEFFS.iter().rev() {
        p = p * zz + *a;
    }
    p * 2.0 / (denom * denom) + FRAC_1_SQRT_PI / denom
}

/// `w(z) = (i/√π) / (z − ½/(z − 1/(z − (3/2)/(z − …))))`, evaluated
/// bottom-up from `terms` levels.
fn laplace_continued_fraction(z: Complex64, terms: u32) -> Complex64 {
    let mut tail = Complex64::new(0.0, 0.0);
    for j in (1..=terms).rev() {
        tail = (0.5 * f64::from(j)) / (z - tail);
    }
    I * FRAC_1_SQRT_PI / (z - tail)
}

/// `y = −e^{−iπ/4} k √t`.
fn moshinsky_argument(k: Complex64, t: f64) -> Complex64 {
    let rot = Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2);
    -(rot * k) * t.sqrt()
}

/// `M(k, t)`; exactly `½` at `t = 0`.
pub fn moshinsky_m(k: Complex64, t: f64) -> Result<MoshinskyEval> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(MoshinskyEval { k, t, value: Complex64::new(0.5, 0.0), branch_used: Branch::Direct });
    }
    let z = I * moshinsky_argument(k, t);
    let branch_used = if z.im >= 0.0 { Branch::Direct } else { Branch::Reflected };
    let value = faddeeva_w(z)? * 0.5;
    Ok(MoshinskyEval { k, t, value, branch_used })
}

/// `A/(k t^{1/2})`: the part of `M` whose pole sum vanishes by the sum rule.
pub fn leading_power_term(k: Complex64, t: f64) -> Complex64 {
    ASYMPTOTIC.a / (k * t.sqrt())
}

/// Large-time split of `M(k, t)` up to `order` power terms (0, 1 or 2).
pub fn asymptotic_m(k: Complex64, t: f64, order: u32) -> Result<AsymptoticSplit> {
    if order > 2 {
        return Err(Error::InvalidArgument("asymptotic order must be at most 2"));
    }
    if !(t > 0.0) {
        return Err(Error::NegativeTime(t));
    }
    let regime = k.norm_sqr() * t;
    if regime < 4.0 {
        return Err(Error::RegimeViolation(regime));
    }
    let exponential_part =
        if k.re > 0.0 { (-I * k * k * t).exp() } else { Complex64::new(0.0, 0.0) };
    let mut power_part = Complex64::new(0.0, 0.0);
    if order >= 1 {
        power_part += leading_power_term(k, t);
    }
    if order >= 2 {
        power_part += ASYMPTOTIC.b / (k * k * k * (t * t * t).sqrt());
    }
    Ok(AsymptoticSplit { exponential_part, power_part })
}

/// Weideman coefficients recomputed from their defining cosine sum.
#[cfg(test)]
fn weideman_coefficients_by_dft() -> [f64; 40] {
    use core::f64::consts::PI;
    let n = 40usize;
    let m = 2 * n;
    let l = (n as f64 / 2f64.sqrt()).sqrt();
    let f = |k: i64| {
        let t = l * (k as f64 * PI / (2 * m) as f64).tan();
        (-t * t).exp() * (l * l + t * t)
    };
    let mut out = [0.0; 40];
    for (j, slot) in out.iter_mut().enumerate() {
        let jj = (j + 1) as f64;
        let mut s = 0.0;
        for k in -(m as i64) + 1..m as i64 {
            s += f(k) * (PI * jj * k as f64 / m as f64).cos();
        }
        *slot = s / (2 * m) as f64;
    }
    out
}
