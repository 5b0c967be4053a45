//! Resonance poles of the delta shell.
//!
//! Matching an interior `sin(kr)` to an outgoing `e^{ikr}` across the shell
//! gives `F(k) = 2ik − λ(1 − e^{2ikR}) = 0`. For `λ > 0` the nonzero roots
//! come in one fourth-quadrant family `k_n` (n ≥ 1, `Re k_n` near `nπ/R`)
//! and its mirror `k_{−n} = −conj(k_n)`.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::model::ShellModel;
use crate::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Newton stopping tolerance, relative to `max(1, |2k|)`.
pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: u32 = 50;

/// A root of the pole equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    /// Nonzero family index; negative for mirror poles.
    pub index: i32,
    pub k: Complex64,
    /// `|F(k)| / max(1, |2k|)` at the stored momentum.
    pub residual: f64,
    /// Newton steps taken; zero for mirrored poles.
    pub iterations: u32,
}

impl Pole {
    /// Residual bound every stored pole satisfies.
    pub fn residual_bound(&self, model: &ShellModel) -> f64 {
        residual_bound(model, self.k, NEWTON_TOL)
    }

    /// The mirror pole `−conj(k)` with index `−n`.
    pub fn mirror(&self) -> Pole {
        Pole { index: -self.index, k: -self.k.conj(), residual: self.residual, iterations: 0 }
    }
}

/// Closed rectangle in the complex momentum plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleWindow {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl PoleWindow {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_min < re_max) || !(im_min < im_max) {
            return Err(Error::InvalidArgument("pole window must have positive extent"));
        }
        Ok(Self { re_min, re_max, im_min, im_max })
    }

    /// Strip `[(n − ½)π/R, (n + ½)π/R]`, deep enough to hold pole `n` with
    /// margin. The top edge sits in the upper half plane, which is zero-free
    /// for a repulsive shell, so near-real poles of stiff shells stay inside.
    pub fn tile(model: &ShellModel, n: u32) -> Self {
        let r = model.radius();
        let nf = f64::from(n);
        Self {
            re_min: (nf - 0.5) * PI / r,
            re_max: (nf + 0.5) * PI / r,
            im_min: 2.0 * initial_guess(model, n).im - 1.0 / r,
            im_max: 0.5 / r,
        }
    }

    /// Union of the tiles for `n = 1..=count`.
    pub fn covering(model: &ShellModel, count: u32) -> Self {
        let first = Self::tile(model, 1);
        let last = Self::tile(model, count.max(1));
        Self {
            re_min: first.re_min,
            re_max: last.re_max,
            im_min: first.im_min.min(last.im_min),
            im_max: first.im_max,
        }
    }

    pub fn contains(&self, k: Complex64) -> bool {
        (self.re_min..=self.re_max).contains(&k.re) && (self.im_min..=self.im_max).contains(&k.im)
    }
}

/// `F(k) = 2ik − λ(1 − e^{2ikR})`, with `e^{2ikR} − 1` formed without
/// cancellation so the rounding error scales with `|k|` rather than `λ`.
pub fn pole_equation_residual(model: &ShellModel, k: Complex64) -> Complex64 {
    I * k * 2.0 + exp_m1(I * k * (2.0 * model.radius())) * model.lambda()
}

/// `e^z − 1`.
fn exp_m1(z: Complex64) -> Complex64 {
    let (a, b) = (z.re, z.im);
    let half = (0.5 * b).sin();
    let re = a.exp_m1() * b.cos() - 2.0 * half * half;
    let im = a.exp() * b.sin();
    Complex64::new(re, im)
}

/// `F'(k) = 2i + 2iλR e^{2ikR}`.
pub fn pole_equation_derivative(model: &ShellModel, k: Complex64) -> Complex64 {
    let r = model.radius();
    let e = (I * k * (2.0 * r)).exp();
    I * 2.0 + I * e * (2.0 * model.lambda() * r)
}

/// Starting point for pole `n`: one fixed-point step of
/// `k = nπ/R − (i/2R) Log(1 − 2ik/λ)` from `k = nπ/R`.
pub fn initial_guess(model: &ShellModel, n: u32) -> Complex64 {
    let r = model.radius();
    let kn = f64::from(n) * PI / r;
    let arg = Complex64::new(1.0, -2.0 * kn / model.lambda());
    Complex64::new(kn, 0.0) - I * arg.ln() / (2.0 * r)
}

const REFINE_STEPS: u32 = 8;

/// Fixed-point sweeps of `k = nπ/R − (i/2R) Log(1 − 2ik/λ)`, whose first
/// iterate from `nπ/R` is the guess itself. The map contracts when
/// `R|λ − 2ik| > 1`; weak shells need this before Newton, whose basin
/// shrinks as `e^{2|Im k|R}` grows.
fn refine_guess(model: &ShellModel, n: u32, k0: Complex64) -> Complex64 {
    let r = model.radius();
    let kn = f64::from(n) * PI / r;
    let mut k = k0;
    for _ in 0..REFINE_STEPS {
        if (model.lambda() - I * k * 2.0).norm() * r <= 1.0 {
            break;
        }
        let next = Complex64::new(kn, 0.0) - I * (Complex64::new(1.0, 0.0) - I * k * (2.0 / model.lambda())).ln() / (2.0 * r);
        if !next.is_finite() {
            break;
        }
        let done = (next - k).norm() <= 1e-12 * next.norm();
        k = next;
        if done {
            break;
        }
    }
    k
}

/// `|F(k)| / max(1, |2k|)`, the quantity stored in [`Pole::residual`].
pub fn scaled_residual(model: &ShellModel, k: Complex64) -> f64 {
    pole_equation_residual(model, k).norm() / (2.0 * k.norm()).max(1.0)
}

/// `tol · max(1, |2k|)` plus the rounding floor of `λ expm1(2ikR)`, which
/// dominates for stiff shells.
fn residual_bound(model: &ShellModel, k: Complex64, tol: f64) -> f64 {
    tol * (2.0 * k.norm()).max(1.0) + 16.0 * f64::EPSILON * model.lambda() * model.radius() * k.norm()
}

const POLISH_STEPS: u32 = 3;

/// Newton iteration on `F` with the analytic derivative.
pub fn newton_polish(model: &ShellModel, index: i32, k0: Complex64, tol: f64, max_iter: u32) -> Result<Pole> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("Newton tolerance must be positive"));
    }
    let mut k = k0;
    let mut iterations = 0;
    loop {
        let f = pole_equation_residual(model, k);
        let residual = f.norm();
        if !residual.is_finite() {
            return Err(Error::NoConvergence { iterations, residual });
        }
        if residual <= residual_bound(model, k, tol) {
            if k.norm() < 1e-8 {
                return Err(Error::ConvergedToTrivialRoot);
            }
            // Quadratic convergence usually leaves room below the bound; take
            // it while the residual keeps falling.
            let (mut best, mut best_res) = (k, residual);
            for _ in 0..POLISH_STEPS {
                let d = pole_equation_derivative(model, best);
                let next = best - pole_equation_residual(model, best) / d;
                let res = pole_equation_residual(model, next).norm();
                if !(res < best_res) {
                    break;
                }
                best = next;
                best_res = res;
                iterations += 1;
            }
            return Ok(Pole { index, k: best, residual: best_res / (2.0 * best.norm()).max(1.0), iterations });
        }
        if iterations >= max_iter {
            return Err(Error::NoConvergence { iterations, residual });
        }
        let d = pole_equation_derivative(model, k);
        if d.norm() < 1e-300 {
            return Err(Error::DerivativeVanished { re: k.re, im: k.im });
        }
        k -= f / d;
        iterations += 1;
    }
}

/// Poles `n = 1..=count`, sorted by `Re k`, each certified by an
/// argument-principle count of one on its own tile, and the whole set
/// certified on the covering window.
pub fn find_poles(model: &ShellModel, count: usize) -> Result<Vec<Pole>> {
    if count == 0 {
        return Err(Error::InvalidArgument("at least one pole must be requested"));
    }
    let count = u32::try_from(count).map_err(|_| Error::InvalidArgument("pole count too large"))?;
    let mut poles = Vec::with_capacity(count as usize);
    for n in 1..=count {
        let guess = refine_guess(model, n, initial_guess(model, n));
        let pole = newton_polish(model, n as i32, guess, NEWTON_TOL, NEWTON_MAX_ITER)?;
        let tile = PoleWindow::tile(model, n);
        let found = count_poles_argument_principle(model, &tile)?;
        if found != 1 || !tile.contains(pole.k) {
            return Err(Error::MissedPole { window: n as usize, expected: 1, found });
        }
        poles.push(pole);
    }
    poles.sort_by(|a, b| a.k.re.total_cmp(&b.k.re));
    for (i, p) in poles.iter().enumerate() {
        for q in &poles[i + 1..] {
            if (p.k - q.k).norm() <= 1e-6 {
                return Err(Error::DuplicatePole { first: p.index, second: q.index });
            }
        }
    }
    let total = count_poles_argument_principle(model, &PoleWindow::covering(model, count))?;
    if total != i64::from(count) {
        return Err(Error::MissedPole { window: 0, expected: i64::from(count), found: total });
    }
    Ok(poles)
}

/// Mirror the `n ≥ 1` family: output is `n = −N..=−1` then `1..=N`, with
/// `k_{−n} = −conj(k_n)` bit for bit. Negative-index input is ignored.
pub fn extend_symmetric(poles: &[Pole]) -> Vec<Pole> {
    let mut positive: Vec<Pole> = poles.iter().copied().filter(|p| p.index > 0).collect();
    positive.sort_by_key(|p| p.index);
    let mut out: Vec<Pole> = positive.iter().rev().map(Pole::mirror).collect();
    out.extend(positive);
    out
}

/// Number of zeros of `F` inside `window`, from the winding of `F` along its
/// boundary: `(1/2πi)∮ F'/F dk`, integrated edge by edge with adaptive
/// trapezoid refinement plus Richardson correction.
pub fn count_poles_argument_principle(model: &ShellModel, window: &PoleWindow) -> Result<i64> {
    let corners = [
        Complex64::new(window.re_min, window.im_min),
        Complex64::new(window.re_max, window.im_min),
        Complex64::new(window.re_max, window.im_max),
        Complex64::new(window.re_min, window.im_max),
    ];
    let g = |k: Complex64| (pole_equation_derivative(model, k), pole_equation_residual(model, k));
    let mut integral = Complex64::new(0.0, 0.0);
    let mut min_abs = f64::INFINITY;
    for i in 0..4 {
        let (a, b) = (corners[i], corners[(i + 1) % 4]);
        integral += edge_integral(&g, a, b, &mut min_abs);
    }
    if min_abs < 1e-8 {
        return Err(Error::BoundaryTooCloseToZero { min_abs });
    }
    let raw = (integral / (2.0 * PI * I)).re;
    let rounded = raw.round();
    if (raw - rounded).abs() >= 0.05 {
        return Err(Error::NonIntegerWinding { raw });
    }
    Ok(rounded as i64)
}

const EDGE_PIECES: usize = 32;
const EDGE_TOL: f64 = 1e-6;
const EDGE_DEPTH: u32 = 24;

fn edge_integral<G>(g: &G, a: Complex64, b: Complex64, min_abs: &mut f64) -> Complex64
where
    G: Fn(Complex64) -> (Complex64, Complex64),
{
    let dz = b - a;
    let mut eval = |s: f64| {
        let (d, f) = g(a + dz * s);
        *min_abs = min_abs.min(f.norm());
        d / f * dz
    };
    let h = 1.0 / EDGE_PIECES as f64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut left = eval(0.0);
    for j in 0..EDGE_PIECES {
        let (s0, s1) = (j as f64 * h, (j + 1) as f64 * h);
        let right = eval(s1);
        total += trapezoid_refine(&mut eval, s0, s1, left, right, EDGE_TOL / EDGE_PIECES as f64, 0);
        left = right;
    }
    total
}

fn trapezoid_refine<E>(eval: &mut E, s0: f64, s1: f64, f0: Complex64, f1: Complex64, tol: f64, depth: u32) -> Complex64
where
    E: FnMut(f64) -> Complex64,
{
    let h = s1 - s0;
    let mid = 0.5 * (s0 + s1);
    let fm = eval(mid);
    let coarse = (f0 + f1) * (0.5 * h);
    let fine = (f0 + fm * 2.0 + f1) * (0.25 * h);
    if (fine - coarse).norm() <= 3.0 * tol || depth >= EDGE_DEPTH {
        return fine + (fine - coarse) / 3.0;
    }
    trapezoid_refine(eval, s0, mid, f0, fm, 0.5 * tol, depth + 1)
        + trapezoid_refine(eval, mid, s1, fm, f1, 0.5 * tol, depth + 1)
}
