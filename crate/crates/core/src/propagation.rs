//! Time evolution through the resonant expansion
//! `ψ(r, t) = Σ_n C_n u_n(r) M(k_n, t)` and the interior Green function
//! `g(r, r'; t) = Σ_n u_n(r) u_n(r') M(k_n, t)`, `0 ≤ r, r' < R`.
//!
//! Omitted poles. For `|k_n|²t ≥ 4` every pole beyond the truncation obeys
//! `M(k_n, t) ≈ A/(k_n √t)`, and because `Σ_n u_n(r)u_n(r')/k_n = 0` over
//! the complete family, the omitted poles add up to `−(A/√t)` times the
//! retained partial sum. [`TailCorrection::SumRule`] includes that piece,
//! which is the same as replacing `M` by `M − A/(k√t)` in the truncated
//! sums. [`TailCorrection::None`] keeps the bare truncation, whose
//! `t^{-1/2}` artifact `A·Σ_{|n|≤N} u_n u_n'/k_n` eventually dominates.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::basis::{f_value, CoefficientSet, OverlapMatrix, ResonantFamily};
use crate::model::InitialState;
use crate::moshinsky::{leading_power_term, moshinsky_m, ASYMPTOTIC};
use crate::quadrature::{AdaptiveQuadrature, Tolerance};
use crate::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Multiple of `ε` times the term scale accepted as quadrature noise.
const ROUNDING_FLOOR: f64 = 256.0;

/// Dual-path agreement required between quadrature and series routes.
pub const DUAL_PATH_RTOL: f64 = 1e-8;
/// Below this probability the dual-path check is skipped.
pub const DUAL_PATH_FLOOR: f64 = 1e-12;
/// `|k|²t` from which the large-time expansion of `M` is trusted.
pub const ASYMPTOTIC_REGIME: f64 = 4.0;

/// How the poles beyond the truncation are accounted for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailCorrection {
    /// Bare truncated sums.
    None,
    /// Add the omitted poles' leading power term, fixed by the sum rule.
    #[default]
    SumRule,
}

/// Whether the omitted-pole correction applies at `t`: every omitted pole
/// lies beyond `k_N`, so it suffices that `|k_N|²t` is in the asymptotic
/// regime.
pub fn tail_correction_active(family: &ResonantFamily, t: f64, correction: TailCorrection) -> bool {
    match correction {
        TailCorrection::None => false,
        TailCorrection::SumRule => {
            let last = family.pairs().last().map_or(0.0, |p| p.positive.k().norm_sqr());
            t > 0.0 && last * t >= ASYMPTOTIC_REGIME
        }
    }
}

/// `M(k_n, t)` for every state in `(|n|, sign)` order, with the omitted-pole
/// correction folded in when active.
pub fn time_factors(family: &ResonantFamily, t: f64, correction: TailCorrection) -> Result<Vec<Complex64>> {
    let active = tail_correction_active(family, t, correction);
    family
        .states()
        .map(|s| {
            let m = moshinsky_m(s.k(), t)?.value;
            Ok(if active { m - leading_power_term(s.k(), t) } else { m })
        })
        .collect()
}

fn check_interior(family: &ResonantFamily, r: f64) -> Result<()> {
    let radius = family.model().radius();
    if (0.0..radius).contains(&r) {
        Ok(())
    } else {
        Err(Error::OutOfRange { value: r, radius })
    }
}

fn green_with_factors(family: &ResonantFamily, factors: &[Complex64], r: f64, rp: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, p) in family.pairs().iter().enumerate() {
        let (u, um) = p.values(r);
        let (v, vm) = p.values(rp);
        acc += u * v * factors[2 * i] + um * vm * factors[2 * i + 1];
    }
    acc
}

/// `g(r, r'; t)` over the family, pair by pair.
pub fn green_partial(family: &ResonantFamily, r: f64, rp: f64, t: f64, correction: TailCorrection) -> Result<Complex64> {
    check_interior(family, r)?;
    check_interior(family, rp)?;
    let factors = time_factors(family, t, correction)?;
    Ok(green_with_factors(family, &factors, r, rp))
}

fn psi_with_factors(coeffs: &CoefficientSet, family: &ResonantFamily, factors: &[Complex64], r: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, p) in family.pairs().iter().enumerate() {
        let (u, um) = p.values(r);
        acc += coeffs.by_slot(2 * i) * u * factors[2 * i] + coeffs.by_slot(2 * i + 1) * um * factors[2 * i + 1];
    }
    acc
}

/// `ψ(r, t) = Σ C_n u_n(r) M(k_n, t)`, the Green function applied to `ψ₀`
/// with sum and integral exchanged.
pub fn psi_t(coeffs: &CoefficientSet, family: &ResonantFamily, r: f64, t: f64, correction: TailCorrection) -> Result<Complex64> {
    family.model().check_inside(r)?;
    if coeffs.half_size() != family.half_size() {
        return Err(Error::SizeMismatch { expected: family.half_size(), found: coeffs.half_size() });
    }
    let factors = time_factors(family, t, correction)?;
    Ok(psi_with_factors(coeffs, family, &factors, r))
}

/// `S(t)` by both routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalValue {
    /// `|∫ ψ₀ ψ(r, t) dr|²` by quadrature.
    pub quadrature: f64,
    /// `|Σ C_n C̃_n M(k_n, t)|²`, `C̃_n = ∫ ψ₀ u_n`.
    pub series: f64,
    /// The amplitude `Σ C_n C̃_n M(k_n, t)`.
    pub amplitude: Complex64,
}

/// `P(t)` by both routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonescapeValue {
    /// `∫_0^R |ψ(r, t)|² dr` by quadrature.
    pub quadrature: f64,
    /// `Σ_rs conj(C_r M_r) C_s M_s I_rs`.
    pub bilinear: f64,
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

/// Green remainder after removing the decaying exponentials of the `n ≥ 1`
/// poles, with the `B`-term prediction alongside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenRemainder {
    pub t: f64,
    /// `|g − Σ_{n≥1} u_n(r)u_n(r') e^{−ik_n²t}|`.
    pub remainder: f64,
    /// `|B Σ_n u_n(r)u_n(r')/k_n³| t^{−3/2}`.
    pub predicted_b: f64,
    /// `|u_1(r)u_1(r') e^{−ik_1²t}| / |g|`.
    pub exp_ratio: f64,
}

/// Resonant expansion of one initial state: family, coefficients and
/// overlaps bundled with the tail treatment.
#[derive(Debug, Clone)]
pub struct Expansion<S> {
    family: ResonantFamily,
    coeffs: CoefficientSet,
    overlaps: OverlapMatrix,
    psi0: S,
    correction: TailCorrection,
    quad: AdaptiveQuadrature,
}

impl<S: InitialState + Clone> Expansion<S> {
    pub fn new(family: ResonantFamily, psi0: S, correction: TailCorrection) -> Result<Self> {
        let quad = AdaptiveQuadrature::standard();
        let coeffs = CoefficientSet::new(&family, &psi0, &quad)?;
        let overlaps = OverlapMatrix::new(&family)?;
        Ok(Self {
            family,
            coeffs,
            overlaps,
            psi0,
            correction,
            quad: quad.with_tolerance(Tolerance { abs: 1e-300, rel: 1e-12 }),
        })
    }

    /// Same state, first `n` pairs only. Coefficients are reused.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        let family = self.family.truncated(n)?;
        let overlaps = OverlapMatrix::new(&family)?;
        Ok(Self {
            family,
            coeffs: self.coeffs.truncated(n)?,
            overlaps,
            psi0: self.psi0.clone(),
            correction: self.correction,
            quad: self.quad.clone(),
        })
    }

    pub fn with_correction(&self, correction: TailCorrection) -> Self {
        Self { correction, ..self.clone() }
    }

    pub fn family(&self) -> &ResonantFamily {
        &self.family
    }

    pub fn coefficients(&self) -> &CoefficientSet {
        &self.coeffs
    }

    pub fn overlaps(&self) -> &OverlapMatrix {
        &self.overlaps
    }

    pub fn initial_state(&self) -> &S {
        &self.psi0
    }

    pub fn correction(&self) -> TailCorrection {
        self.correction
    }

    pub fn radius(&self) -> f64 {
        self.family.model().radius()
    }

    pub fn time_factors(&self, t: f64) -> Result<Vec<Complex64>> {
        time_factors(&self.family, t, self.correction)
    }

    pub fn psi(&self, r: f64, t: f64) -> Result<Complex64> {
        psi_t(&self.coeffs, &self.family, r, t, self.correction)
    }

    /// `ψ(·, t)` on a grid, sharing one set of time factors.
    pub fn psi_profile(&self, grid: &[f64], t: f64) -> Result<Vec<Complex64>> {
        let factors = self.time_factors(t)?;
        grid.iter()
            .map(|&r| {
                self.family.model().check_inside(r)?;
                Ok(psi_with_factors(&self.coeffs, &self.family, &factors, r))
            })
            .collect()
    }

    pub fn green(&self, r: f64, rp: f64, t: f64) -> Result<Complex64> {
        green_partial(&self.family, r, rp, t, self.correction)
    }

    /// `f_N(r) = Σ C_n u_n(r)/k_n`.
    pub fn f(&self, r: f64) -> Result<Complex64> {
        self.family.model().check_inside(r)?;
        Ok(f_value(&self.coeffs, &self.family, r))
    }

    /// Bound on `Σ |C_n M_n| sup|u_n|`. Late in time the terms cancel far
    /// below their own size, so rounding in the summed integrand sits near
    /// `ε` times this, not `ε |ψ|`.
    fn term_scale(&self, factors: &[Complex64]) -> f64 {
        let r = self.radius();
        let mut total = 0.0;
        for (i, p) in self.family.pairs().iter().enumerate() {
            let k = p.positive.k();
            let sup = p.positive.amplitude().norm() * (k.im.abs() * r).cosh();
            total += sup * (self.coeffs.by_slot(2 * i).norm() * factors[2 * i].norm()
                + self.coeffs.by_slot(2 * i + 1).norm() * factors[2 * i + 1].norm());
        }
        total
    }

    fn quad_with_floor(&self, floor: f64) -> AdaptiveQuadrature {
        let tol = self.quad.tolerance();
        self.quad.with_tolerance(Tolerance { abs: tol.abs.max(ROUNDING_FLOOR * f64::EPSILON * floor), rel: tol.rel })
    }

    fn survival_with(&self, factors: &[Complex64]) -> Result<SurvivalValue> {
        let mut amplitude = Complex64::new(0.0, 0.0);
        for (i, f) in factors.iter().enumerate() {
            let c = self.coeffs.by_slot(i);
            amplitude += c * c * *f;
        }
        let quad = self.quad_with_floor(self.radius().sqrt() * self.term_scale(factors));
        let overlap = quad.integrate(0.0, self.radius(), |r| {
            psi_with_factors(&self.coeffs, &self.family, factors, r) * self.psi0.eval(r)
        })?;
        Ok(SurvivalValue { quadrature: overlap.norm_sqr(), series: amplitude.norm_sqr(), amplitude })
    }

    fn nonescape_with(&self, factors: &[Complex64]) -> Result<NonescapeValue> {
        let scale = self.term_scale(factors);
        let quad = self.quad_with_floor(self.radius() * scale * scale);
        let quadrature = quad.integrate_real(0.0, self.radius(), |r| {
            psi_with_factors(&self.coeffs, &self.family, factors, r).norm_sqr()
        })?;
        let weighted: Vec<Complex64> =
            factors.iter().enumerate().map(|(i, f)| self.coeffs.by_slot(i) * *f).collect();
        let mut bilinear = Complex64::new(0.0, 0.0);
        for (i, a) in weighted.iter().enumerate() {
            let left = a.conj();
            let mut row = Complex64::new(0.0, 0.0);
            for (j, b) in weighted.iter().enumerate() {
                row += *b * self.overlaps.by_slot(i, j);
            }
            bilinear += left * row;
        }
        Ok(NonescapeValue { quadrature, bilinear: bilinear.re })
    }

    /// `S(t) = |⟨ψ₀|ψ(t)⟩|²`; errors if the two routes disagree.
    pub fn survival(&self, t: f64) -> Result<SurvivalValue> {
        let v = self.survival_with(&self.time_factors(t)?)?;
        if v.quadrature.max(v.series) > DUAL_PATH_FLOOR && relative_gap(v.quadrature, v.series) > DUAL_PATH_RTOL {
            return Err(Error::PathDisagreement { relative: relative_gap(v.quadrature, v.series) });
        }
        Ok(v)
    }

    /// `P(t) = ∫_0^R |ψ(r, t)|² dr`; errors if the two routes disagree.
    pub fn nonescape(&self, t: f64) -> Result<NonescapeValue> {
        let v = self.nonescape_with(&self.time_factors(t)?)?;
        if v.quadrature.max(v.bilinear) > DUAL_PATH_FLOOR && relative_gap(v.quadrature, v.bilinear) > DUAL_PATH_RTOL {
            return Err(Error::PathDisagreement { relative: relative_gap(v.quadrature, v.bilinear) });
        }
        Ok(v)
    }

    /// Remainder of `g` after the `n ≥ 1` exponentials; requires every
    /// retained pole to be in the asymptotic regime.
    pub fn green_remainder(&self, r: f64, rp: f64, t: f64) -> Result<GreenRemainder> {
        let first = self.family.pairs().first().map_or(0.0, |p| p.positive.k().norm_sqr());
        if first * t < ASYMPTOTIC_REGIME {
            return Err(Error::RegimeViolation(first * t));
        }
        check_interior(&self.family, r)?;
        check_interior(&self.family, rp)?;
        let factors = self.time_factors(t)?;
        let g = green_with_factors(&self.family, &factors, r, rp);
        let mut exponential = Complex64::new(0.0, 0.0);
        let mut cubic = Complex64::new(0.0, 0.0);
        let mut leading = 0.0;
        for (i, p) in self.family.pairs().iter().enumerate() {
            let (u, um) = p.values(r);
            let (v, vm) = p.values(rp);
            let k = p.positive.k();
            let km = p.mirror.k();
            let e = u * v * (-I * k * k * t).exp();
            if i == 0 {
                leading = e.norm();
            }
            exponential += e;
            cubic += u * v / (k * k * k) + um * vm / (km * km * km);
        }
        Ok(GreenRemainder {
            t,
            remainder: (g - exponential).norm(),
            predicted_b: (ASYMPTOTIC.b * cubic).norm() / (t * t * t).sqrt(),
            exp_ratio: leading / g.norm(),
        })
    }

    /// Decay rate `Γ_1 = −2 Im(k_1²)` of the slowest resonance.
    pub fn leading_width(&self) -> f64 {
        let k = self.family.pairs()[0].positive.k();
        -2.0 * (k * k).im
    }

    /// `1 − P_N(0)` magnitude: how far the truncated closure is from unitary.
    pub fn truncation_defect(&self) -> Result<f64> {
        Ok((self.nonescape_with(&self.time_factors(0.0)?)?.bilinear - 1.0).abs())
    }

    /// S, P and the Green remainder on a grid.
    pub fn series(&self, grid: &TimeGrid, probe: (f64, f64)) -> Result<ProbabilitySeries> {
        let k1 = self.family.pairs()[0].positive.k();
        let c1 = self.coeffs.by_slot(0);
        let u1_norm = self.overlaps.by_slot(0, 0).re.sqrt();
        let n = grid.samples.len();
        let mut out = ProbabilitySeries {
            times: grid.samples.clone(),
            survival: Vec::with_capacity(n),
            nonescape: Vec::with_capacity(n),
            green_remainder: Vec::with_capacity(n),
            predicted_b: Vec::with_capacity(n),
            survival_exp_ratio: Vec::with_capacity(n),
            nonescape_exp_ratio: Vec::with_capacity(n),
            green_exp_ratio: Vec::with_capacity(n),
            truncation_n: self.family.half_size(),
            truncation_defect: self.truncation_defect()?,
        };
        for &t in &grid.samples {
            let factors = self.time_factors(t)?;
            let s = self.survival_with(&factors)?;
            let p = self.nonescape_with(&factors)?;
            for (a, b) in [(s.quadrature, s.series), (p.quadrature, p.bilinear)] {
                if a.max(b) > DUAL_PATH_FLOOR && relative_gap(a, b) > DUAL_PATH_RTOL {
                    return Err(Error::PathDisagreement { relative: relative_gap(a, b) });
                }
            }
            let decay = (-I * k1 * k1 * t).exp().norm();
            out.survival.push(s.quadrature);
            out.nonescape.push(p.quadrature);
            out.survival_exp_ratio.push((c1 * c1).norm() * decay / s.amplitude.norm());
            out.nonescape_exp_ratio.push(c1.norm() * u1_norm * decay / p.quadrature.sqrt());
            match self.green_remainder(probe.0, probe.1, t) {
                Ok(g) => {
                    out.green_remainder.push(g.remainder);
                    out.predicted_b.push(g.predicted_b);
                    out.green_exp_ratio.push(g.exp_ratio);
                }
                Err(Error::RegimeViolation(_)) => {
                    out.green_remainder.push(f64::NAN);
                    out.predicted_b.push(f64::NAN);
                    out.green_exp_ratio.push(f64::INFINITY);
                }
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }
}

/// Sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    pub samples: Vec<f64>,
}

impl TimeGrid {
    /// `points_per_decade` log-spaced samples per decade from `t_min` to
    /// `t_max` inclusive.
    pub fn log_spaced(t_min: f64, t_max: f64, points_per_decade: u32) -> Result<Self> {
        if !(t_min > 0.0) || !(t_max > t_min) || points_per_decade == 0 {
            return Err(Error::InvalidArgument("log grid needs 0 < t_min < t_max and a positive density"));
        }
        let decades = (t_max / t_min).log10();
        let steps = (decades * f64::from(points_per_decade)).round().max(1.0) as usize;
        let samples = (0..=steps)
            .map(|i| {
                if i == steps {
                    t_max
                } else {
                    t_min * 10f64.powf(i as f64 / f64::from(points_per_decade))
                }
            })
            .collect();
        Self::from_samples(samples)
    }

    /// `count + 1` equally spaced samples on `[0, t_max]`.
    pub fn linear(t_max: f64, count: usize) -> Result<Self> {
        if !(t_max > 0.0) || count == 0 {
            return Err(Error::InvalidArgument("linear grid needs t_max > 0 and at least one step"));
        }
        Self::from_samples((0..=count).map(|i| t_max * i as f64 / count as f64).collect())
    }

    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() || samples[0] < 0.0 || samples.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("time samples must be nonnegative and strictly increasing"));
        }
        Ok(Self { samples })
    }

    pub fn t_min(&self) -> f64 {
        self.samples[0]
    }

    pub fn t_max(&self) -> f64 {
        self.samples[self.samples.len() - 1]
    }
}

/// Sampled `S(t)`, `P(t)` and the Green remainder at one probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilitySeries {
    pub times: Vec<f64>,
    pub survival: Vec<f64>,
    pub nonescape: Vec<f64>,
    /// NaN where the probe is outside the asymptotic regime.
    pub green_remainder: Vec<f64>,
    pub predicted_b: Vec<f64>,
    pub survival_exp_ratio: Vec<f64>,
    pub nonescape_exp_ratio: Vec<f64>,
    pub green_exp_ratio: Vec<f64>,
    pub truncation_n: usize,
    /// `|P_N(0) − 1|`, the truncation error bound `ε_N`.
    pub truncation_defect: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{initial_state_box_mode, BoxMode, ShellModel};
    use crate::poles::find_poles;
    use crate::tail::{select_tail_window, tail_slope, tail_slope_in_window};

    fn expansion(n: usize, correction: TailCorrection) -> Expansion<BoxMode> {
        let m = ShellModel::default();
        let fam = ResonantFamily::new(&m, &find_poles(&m, n).unwrap()).unwrap();
        let psi0 = initial_state_box_mode(&m, 1).unwrap();
        Expansion::new(fam, psi0, correction).unwrap()
    }

    #[test]
    fn correction_switches_on_in_asymptotic_regime() {
        let e = expansion(10, TailCorrection::SumRule);
        assert!(!tail_correction_active(e.family(), 0.0, TailCorrection::SumRule));
        assert!(tail_correction_active(e.family(), 0.01, TailCorrection::SumRule));
        assert!(!tail_correction_active(e.family(), 0.01, TailCorrection::None));
    }

    #[test]
    fn green_is_symmetric_and_rejects_shell_point() {
        let e = expansion(20, TailCorrection::SumRule);
        for t in [0.0, 0.3, 7.0] {
            assert_eq!(e.green(0.3, 0.7, t).unwrap(), e.green(0.7, 0.3, t).unwrap());
        }
        assert!(matches!(e.green(1.0, 0.5, 1.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn green_at_time_zero_reproduces_initial_state() {
        let quad = AdaptiveQuadrature::standard();
        let mut errors = Vec::new();
        for n in [10, 50] {
            let e = expansion(n, TailCorrection::SumRule);
            let mut worst: f64 = 0.0;
            for r in [0.1, 0.25, 0.4, 0.55] {
                let v = quad
                    .integrate(0.0, 1.0, |rp| e.green(r, rp.min(1.0 - 1e-15), 0.0).unwrap() * e.initial_state().eval(rp))
                    .unwrap();
                worst = worst.max((v - e.initial_state().eval(r)).norm());
            }
            errors.push(worst);
        }
        assert!(errors[1] < errors[0], "{errors:?}");
    }

    #[test]
    fn psi_vanishes_at_origin() {
        let e = expansion(10, TailCorrection::SumRule);
        for t in [0.0, 0.5, 100.0] {
            assert_eq!(e.psi(0.0, t).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn psi_at_time_zero_approximates_initial_state() {
        // Pointwise closure converges roughly like 1/N and not at all at
        // r = R; interior points only.
        let e10 = expansion(10, TailCorrection::SumRule);
        let e50 = expansion(50, TailCorrection::SumRule);
        let grid: Vec<f64> = (0..20).map(|j| j as f64 / 20.0).collect();
        let sup = |e: &Expansion<BoxMode>| {
            e.psi_profile(&grid, 0.0)
                .unwrap()
                .iter()
                .zip(&grid)
                .map(|(v, r)| (v - e.initial_state().eval(*r)).norm())
                .fold(0.0, f64::max)
        };
        let (s10, s50) = (sup(&e10), sup(&e50));
        assert!(s50 < s10);
        // measured 1.22e-2 at N = 50
        assert!(s50 < 0.02, "{s50}");
    }

    #[test]
    fn survival_and_nonescape_start_at_one() {
        let e = expansion(50, TailCorrection::SumRule);
        let eps = e.truncation_defect().unwrap();
        assert!(eps < 1e-2, "{eps}");
        let p0 = e.nonescape(0.0).unwrap();
        let s0 = e.survival(0.0).unwrap();
        assert!((p0.quadrature - 1.0).abs() <= eps + 1e-12);
        assert!((s0.quadrature - 1.0).abs() <= 2.0 * eps + 1e-12);
    }

    #[test]
    fn survival_bounded_by_nonescape() {
        let e = expansion(30, TailCorrection::SumRule);
        let eps = e.truncation_defect().unwrap();
        for t in [0.0, 0.05, 0.4, 2.0, 30.0, 500.0] {
            let s = e.survival(t).unwrap().quadrature;
            let p = e.nonescape(t).unwrap().quadrature;
            assert!(s >= 0.0 && s <= p + eps + 1e-12, "t={t}: S={s} P={p}");
            assert!(p <= 1.0 + eps + 1e-12, "t={t}: P={p} eps={eps}");
        }
    }

    #[test]
    fn nonescape_decreases_through_exponential_era() {
        let e = expansion(50, TailCorrection::SumRule);
        let tau = 1.0 / e.leading_width();
        let mut last = f64::INFINITY;
        for i in 0..=30 {
            let t = 3.0 * tau * f64::from(i) / 30.0;
            let p = e.nonescape(t).unwrap().quadrature;
            assert!(p < last, "t={t}");
            last = p;
        }
    }

    #[test]
    fn exponential_era_rate_matches_leading_width() {
        let e = expansion(50, TailCorrection::SumRule);
        let gamma = e.leading_width();
        let tau = 1.0 / gamma;
        let ts: Vec<f64> = (0..=20).map(|i| tau * (0.5 + 1.5 * f64::from(i) / 20.0)).collect();
        let ls: Vec<f64> = ts.iter().map(|&t| e.survival(t).unwrap().quadrature.ln()).collect();
        let n = ts.len() as f64;
        let mt = ts.iter().sum::<f64>() / n;
        let ml = ls.iter().sum::<f64>() / n;
        let slope = ts.iter().zip(&ls).map(|(t, l)| (t - mt) * (l - ml)).sum::<f64>()
            / ts.iter().map(|t| (t - mt).powi(2)).sum::<f64>();
        assert!((slope + gamma).abs() < 0.1 * gamma, "slope {slope} vs −Γ {}", -gamma);
    }

    #[test]
    fn dual_paths_agree() {
        let e = expansion(50, TailCorrection::SumRule);
        for t in [0.01, 0.3, 1.0, 4.0, 25.0, 300.0] {
            let p = e.nonescape(t).unwrap();
            assert!(relative_gap(p.quadrature, p.bilinear) < DUAL_PATH_RTOL);
            let s = e.survival(t).unwrap();
            assert!(relative_gap(s.quadrature, s.series) < DUAL_PATH_RTOL);
        }
    }

    #[test]
    fn remainder_requires_asymptotic_regime() {
        let e = expansion(10, TailCorrection::SumRule);
        assert!(matches!(e.green_remainder(0.3, 0.7, 0.1), Err(Error::RegimeViolation(_))));
    }

    #[test]
    fn corrected_tails_follow_inverse_cubes() {
        let e = expansion(50, TailCorrection::SumRule);
        let grid = TimeGrid::log_spaced(1e-2, 1e4, 16).unwrap();
        let s = e.series(&grid, (0.3, 0.7)).unwrap();
        let w = select_tail_window(&s.times, &s.nonescape_exp_ratio).unwrap();
        let p = tail_slope_in_window(&s.times, &s.nonescape, w).unwrap();
        assert!((p.slope + 3.0).abs() < 0.1, "{p:?}");
        let g = tail_slope_in_window(&s.times, &s.green_remainder, w).unwrap();
        assert!((g.slope + 1.5).abs() < 0.05, "{g:?}");
    }

    #[test]
    fn bare_truncation_shows_the_inverse_first_power_artifact() {
        let e = expansion(50, TailCorrection::None);
        let grid = TimeGrid::log_spaced(1e3, 1e4, 16).unwrap();
        let p: Vec<f64> = grid.samples.iter().map(|&t| e.nonescape(t).unwrap().quadrature).collect();
        let fit = tail_slope(&grid.samples, &p).unwrap();
        assert!((fit.slope + 1.0).abs() < 0.05, "{fit:?}");
    }

    #[test]
    fn grids() {
        let g = TimeGrid::log_spaced(1e-2, 1e4, 16).unwrap();
        assert_eq!(g.samples.len(), 97);
        assert_eq!(g.t_max(), 1e4);
        assert!(TimeGrid::log_spaced(0.0, 1.0, 4).is_err());
        let l = TimeGrid::linear(2.0, 4).unwrap();
        assert_eq!(l.samples, [0.0, 0.5, 1.0, 1.5, 2.0]);
        assert!(TimeGrid::from_samples(alloc::vec![1.0, 1.0]).is_err());
    }
}
