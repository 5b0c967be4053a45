//! Finite-difference propagation on `[0, L]` as an independent check of the
//! resonant expansion.
//!
//! Nodes `r_j = j h`, `ψ_0 = ψ_J = 0`. `H = −∂² + (λ/h) δ_{j,R/h} − i W(r)`
//! with the quartic ramp `W = η ((r − (L − w))/w)⁴` on the last `w` of the
//! domain. Each step solves the Cayley form
//! `(1 + i dt H/2) ψ' = (1 − i dt H/2) ψ`.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::model::{InitialState, ShellModel};
use crate::tridiag::Factored;
use crate::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Largest fraction of the initial norm allowed in the last tenth of the
/// domain before the absorbing layer counts as failed.
pub const REFLECTION_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub length: f64,
    pub h: f64,
    pub dt: f64,
    pub cap_width: f64,
    pub cap_strength: f64,
}

impl Grid1D {
    pub fn new(model: &ShellModel, length: f64, h: f64, dt: f64, cap_width: f64, cap_strength: f64) -> Result<Self> {
        let g = Self { length, h, dt, cap_width, cap_strength };
        g.validate(model)?;
        Ok(g)
    }

    /// Default oracle grid for the given shell: `L = 40R`, `h = R/200`,
    /// `dt = h/2`, absorbing layer on the outer half.
    pub fn default_for(model: &ShellModel) -> Self {
        let r = model.radius();
        Self { length: 40.0 * r, h: r / 200.0, dt: r / 400.0, cap_width: 20.0 * r, cap_strength: 300.0 / (r * r) }
    }

    pub fn validate(&self, model: &ShellModel) -> Result<()> {
        let r = model.radius();
        let ratio = r / self.h;
        if !(self.h > 0.0) || (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::InvalidArgument("shell radius must sit on a grid node"));
        }
        if !(self.length >= 10.0 * r) {
            return Err(Error::InvalidArgument("domain length must be at least 10R"));
        }
        if !(self.cap_width >= 2.0 * r) || self.cap_width > self.length - r {
            return Err(Error::InvalidArgument("absorbing layer must be at least 2R wide and outside the shell"));
        }
        if !(self.cap_strength >= 0.0) || !self.cap_strength.is_finite() {
            return Err(Error::InvalidArgument("absorbing strength must be finite and nonnegative"));
        }
        if !(self.dt > 0.0) || self.dt > self.h {
            return Err(Error::StabilityBudgetExceeded { dt: self.dt, h: self.h });
        }
        Ok(())
    }

    /// Number of intervals `J = L/h` (rounded).
    pub fn intervals(&self) -> usize {
        (self.length / self.h).round() as usize
    }

    pub fn shell_node(&self, model: &ShellModel) -> usize {
        (model.radius() / self.h).round() as usize
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    /// Absorbing potential magnitude `W(r)`.
    pub fn cap(&self, r: f64) -> f64 {
        let start = self.length - self.cap_width;
        if r <= start {
            0.0
        } else {
            self.cap_strength * ((r - start) / self.cap_width).powi(4)
        }
    }

    pub fn without_cap(&self) -> Self {
        Self { cap_strength: 0.0, ..*self }
    }

    /// Same absorbing layer shape, domain and layer both doubled.
    pub fn doubled(&self) -> Self {
        Self { length: 2.0 * self.length, cap_width: 2.0 * self.cap_width, ..*self }
    }

    pub fn refined(&self) -> Self {
        Self { h: self.h / 2.0, dt: self.dt / 2.0, ..*self }
    }
}

/// Sampled wave function on all nodes `0..=J`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub grid: Grid1D,
    pub values: Vec<Complex64>,
    pub time: f64,
}

impl WaveField {
    /// Trapezoid `∫|ψ|²` over nodes `lo..=hi`.
    pub fn norm_between(&self, lo: usize, hi: usize) -> f64 {
        trapezoid(&self.values[lo..=hi], self.grid.h, |v| v.norm_sqr())
    }
}

fn trapezoid(values: &[Complex64], h: f64, f: impl Fn(&Complex64) -> f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values[1..n - 1].iter().map(&f).sum::<f64>() + 0.5 * (f(&values[0]) + f(&values[n - 1]))),
    }
}

/// Discretized initial state on the grid.
pub fn sample_initial<S: InitialState>(psi0: &S, grid: &Grid1D) -> Vec<Complex64> {
    (0..=grid.intervals())
        .map(|j| {
            let r = grid.node(j);
            Complex64::new(if r < psi0.radius() { psi0.eval(r) } else { 0.0 }, 0.0)
        })
        .collect()
}

struct Stepper {
    lu: Factored,
    off: Complex64,
    diag_rhs: Vec<Complex64>,
}

impl Stepper {
    fn new(model: &ShellModel, grid: &Grid1D) -> Result<Self> {
        let j_max = grid.intervals();
        let shell = grid.shell_node(model);
        let inv_h2 = 1.0 / (grid.h * grid.h);
        let half = 0.5 * grid.dt;
        let n = j_max - 1;
        let mut diag_lhs = Vec::with_capacity(n);
        let mut diag_rhs = Vec::with_capacity(n);
        for j in 1..j_max {
            let mut v = Complex64::new(2.0 * inv_h2, -grid.cap(grid.node(j)));
            if j == shell {
                v += model.lambda() / grid.h;
            }
            diag_lhs.push(1.0 + I * half * v);
            diag_rhs.push(1.0 - I * half * v);
        }
        let off_h = Complex64::new(-inv_h2, 0.0);
        let sub = alloc::vec![I * half * off_h; n];
        let lu = Factored::new(&sub, &diag_lhs, &sub)?;
        Ok(Self { lu, off: -I * half * off_h, diag_rhs })
    }

    #[allow(clippy::needless_range_loop)]
    fn step(&self, psi: &mut [Complex64], scratch: &mut [Complex64]) -> Result<()> {
        let n = self.diag_rhs.len();
        for i in 0..n {
            let j = i + 1;
            scratch[i] = self.diag_rhs[i] * psi[j] + self.off * (psi[j - 1] + psi[j + 1]);
        }
        self.lu.solve_in_place(scratch)?;
        psi[1..=n].copy_from_slice(scratch);
        Ok(())
    }
}

/// Propagate `ψ₀` and return the field at each sample time. Times are
/// rounded to the nearest step.
pub fn propagate_cn<S: InitialState>(model: &ShellModel, psi0: &S, grid: &Grid1D, sample_times: &[f64]) -> Result<Vec<WaveField>> {
    propagate(model, psi0, grid, sample_times, true)
}

/// As [`propagate_cn`] without the trailing-edge check.
pub fn propagate_cn_unchecked<S: InitialState>(
    model: &ShellModel,
    psi0: &S,
    grid: &Grid1D,
    sample_times: &[f64],
) -> Result<Vec<WaveField>> {
    propagate(model, psi0, grid, sample_times, false)
}

fn propagate<S: InitialState>(model: &ShellModel, psi0: &S, grid: &Grid1D, sample_times: &[f64], check: bool) -> Result<Vec<WaveField>> {
    grid.validate(model)?;
    if sample_times.iter().any(|t| !(*t >= 0.0)) || sample_times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("sample times must be nonnegative and increasing"));
    }
    let stepper = Stepper::new(model, grid)?;
    let mut psi = sample_initial(psi0, grid);
    let j_max = grid.intervals();
    let edge = j_max - j_max / 10;
    let initial_norm = trapezoid(&psi, grid.h, |v| v.norm_sqr());
    let mut scratch = alloc::vec![Complex64::new(0.0, 0.0); j_max - 1];
    let mut steps_done = 0usize;
    let mut out = Vec::with_capacity(sample_times.len());
    for &t in sample_times {
        let target = (t / grid.dt).round() as usize;
        while steps_done < target {
            stepper.step(&mut psi, &mut scratch)?;
            steps_done += 1;
        }
        let field = WaveField { grid: *grid, values: psi.clone(), time: steps_done as f64 * grid.dt };
        if field.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite wave field"));
        }
        if check && grid.cap_strength > 0.0 {
            let probe = field.norm_between(edge, j_max) / initial_norm;
            if probe > REFLECTION_THRESHOLD {
                return Err(Error::ReflectionDetected { probe, time: field.time });
            }
        }
        out.push(field);
    }
    Ok(out)
}

/// `S` and `P` of one oracle field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSample {
    pub time: f64,
    pub survival: f64,
    pub nonescape: f64,
}

/// Trapezoid `P = ∫_0^R |ψ|²` and `S = |∫_0^R ψ₀ ψ|²` for each field.
pub fn oracle_probabilities<S: InitialState>(fields: &[WaveField], psi0: &S, radius: f64) -> Vec<OracleSample> {
    fields
        .iter()
        .map(|f| {
            let n = (radius / f.grid.h).round() as usize;
            let p = f.norm_between(0, n);
            let weighted: Vec<Complex64> =
                f.values[..=n].iter().enumerate().map(|(j, v)| v * psi0.eval(f.grid.node(j))).collect();
            let overlap = if n == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                let h = f.grid.h;
                let inner: Complex64 = weighted[1..n].iter().sum();
                (inner + 0.5 * (weighted[0] + weighted[n])) * h
            };
            OracleSample { time: f.time, survival: overlap.norm_sqr(), nonescape: p }
        })
        .collect()
}

/// Total norm `∫_0^L |ψ|²`.
pub fn total_norm(field: &WaveField) -> f64 {
    field.norm_between(0, field.values.len() - 1)
}

/// Interior values `ψ(r_j)`, `r_j = j h ≤ R`.
pub fn interior(field: &WaveField, radius: f64) -> &[Complex64] {
    let n = (radius / field.grid.h).round() as usize;
    &field.values[..=n]
}

/// Largest change of `P` on `times` when the domain and layer are doubled.
pub fn reflection_probe<S: InitialState>(model: &ShellModel, psi0: &S, grid: &Grid1D, times: &[f64]) -> Result<f64> {
    let a = oracle_probabilities(&propagate_cn(model, psi0, grid, times)?, psi0, model.radius());
    let b = oracle_probabilities(&propagate_cn(model, psi0, &grid.doubled(), times)?, psi0, model.radius());
    Ok(a.iter().zip(&b).map(|(x, y)| (x.nonescape - y.nonescape).abs()).fold(0.0, f64::max))
}

/// Strength among `candidates` with the smallest reflection probe.
pub fn tune_cap_strength<S: InitialState>(
    model: &ShellModel,
    psi0: &S,
    grid: &Grid1D,
    times: &[f64],
    candidates: &[f64],
) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for &eta in candidates {
        let g = Grid1D { cap_strength: eta, ..*grid };
        let probe = match reflection_probe(model, psi0, &g, times) {
            Ok(p) => p,
            Err(Error::ReflectionDetected { .. }) => continue,
            Err(e) => return Err(e),
        };
        if best.is_none_or(|(_, p)| probe < p) {
            best = Some((eta, probe));
        }
    }
    best.ok_or(Error::InvalidArgument("no absorbing strength candidate survived"))
}

/// `P(t)` at three resolutions `(h, dt)`, `(h/2, dt/2)`, `(h/4, dt/4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RichardsonTriplet {
    pub coarse: f64,
    pub medium: f64,
    pub fine: f64,
}

impl RichardsonTriplet {
    /// Observed convergence order `log2(|P_h − P_{h/2}| / |P_{h/2} − P_{h/4}|)`.
    pub fn observed_order(&self) -> f64 {
        ((self.coarse - self.medium) / (self.medium - self.fine)).abs().log2()
    }

    /// Error of the medium result extrapolated from the coarse pair,
    /// assuming `O(h² + dt²)`.
    pub fn medium_error_estimate(&self) -> f64 {
        (self.coarse - self.medium).abs() / 3.0
    }

    /// Medium-to-fine change within four times that estimate.
    pub fn consistent(&self) -> bool {
        (self.medium - self.fine).abs() <= 4.0 * self.medium_error_estimate()
    }
}

pub fn richardson_triplet<S: InitialState>(model: &ShellModel, psi0: &S, grid: &Grid1D, t: f64) -> Result<RichardsonTriplet> {
    let p = |g: &Grid1D| -> Result<f64> {
        let fields = propagate_cn(model, psi0, g, &[t])?;
        Ok(oracle_probabilities(&fields, psi0, model.radius())[0].nonescape)
    };
    let medium_grid = grid.refined();
    Ok(RichardsonTriplet { coarse: p(grid)?, medium: p(&medium_grid)?, fine: p(&medium_grid.refined())? })
}
