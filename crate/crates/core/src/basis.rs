//! Normalized resonant states on `[0, R]`, their overlaps, the expansion
//! coefficients of an initial state, and the three quantities that vanish
//! for the complete family: the `1/k`-weighted sum rule, `f(r)`, and `Δ`.
//!
//! Conventions: interior states are `u_n(r) = A_n sin(k_n r)` with the
//! Gamow normalization `∫_0^R u_n² dr + i u_n(R)²/(2k_n) = 1` (analytic
//! square), closure reads `δ(r − r') = ½ Σ_n u_n(r) u_n(r')`, and
//! `C_n = ∫_0^R ψ₀ u_n dr` carries no conjugation. Mirror states satisfy
//! `A_{−n} = −conj(A_n)`, so `u_{−n}(r) = conj(u_n(r))`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::model::{BoxMode, InitialState, ShellModel};
use crate::poles::{extend_symmetric, pole_equation_residual, Pole};
use crate::quadrature::{AdaptiveQuadrature, Tolerance};
use crate::{sin_ratio, Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantState {
    pole: Pole,
    amplitude: Complex64,
    model: ShellModel,
}

impl ResonantState {
    pub fn pole(&self) -> &Pole {
        &self.pole
    }

    pub fn index(&self) -> i32 {
        self.pole.index
    }

    pub fn k(&self) -> Complex64 {
        self.pole.k
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude
    }

    pub fn model(&self) -> &ShellModel {
        &self.model
    }

    /// `u_n(r) = A_n sin(k_n r)` for `r ∈ [0, R]`.
    pub fn eval(&self, r: f64) -> Result<Complex64> {
        self.model.check_inside(r)?;
        Ok(self.eval_unchecked(r))
    }

    pub(crate) fn eval_unchecked(&self, r: f64) -> Complex64 {
        self.amplitude * (self.pole.k * r).sin()
    }

    /// `∫_0^R u² dr + i u(R)²/(2k)` by adaptive quadrature; equals one for a
    /// properly normalized state.
    pub fn gamow_norm_by_quadrature(&self, quad: &AdaptiveQuadrature) -> Result<Complex64> {
        let r = self.model.radius();
        let bulk = quad.integrate(0.0, r, |x| {
            let u = self.eval_unchecked(x);
            u * u
        })?;
        let edge = self.eval_unchecked(r);
        Ok(bulk + I * edge * edge / (self.pole.k * 2.0))
    }
}

/// `u_n(r)`; errors outside `[0, R]`.
pub fn eval_u_inner(state: &ResonantState, r: f64) -> Result<Complex64> {
    state.eval(r)
}

/// `A_n² = 2(λ − 2ik)/(R(λ − 2ik) + 1)`, which the pole equation reduces
/// the Gamow normalization integral to.
pub fn amplitude_squared(model: &ShellModel, k: Complex64) -> Option<Complex64> {
    let g = Complex64::new(model.lambda(), 0.0) - I * k * 2.0;
    let denom = g * model.radius() + 1.0;
    if denom.norm() < 1e-12 {
        return None;
    }
    Some(g * 2.0 / denom)
}

/// Normalized state for a residual-verified pole. For `Re k > 0` the root
/// with `Re A > 0` (or `Im A > 0` on the imaginary axis) is taken; a mirror
/// pole gets `−conj` of its partner's amplitude.
pub fn normalize(model: &ShellModel, pole: &Pole) -> Result<ResonantState> {
    let residual = pole_equation_residual(model, pole.k).norm();
    if !(residual <= pole.residual_bound(model)) {
        return Err(Error::InvalidArgument("pole does not satisfy the pole equation"));
    }
    let partner = if pole.k.re < 0.0 { -pole.k.conj() } else { pole.k };
    let a2 = amplitude_squared(model, partner).ok_or(Error::DegenerateNormalizer { index: pole.index })?;
    let mut a = a2.sqrt();
    if a.re < 0.0 || (a.re == 0.0 && a.im < 0.0) {
        a = -a;
    }
    if pole.k.re < 0.0 {
        a = -a.conj();
    }
    Ok(ResonantState { pole: *pole, amplitude: a, model: *model })
}

/// A state `n ≥ 1` together with its mirror `−n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatePair {
    pub positive: ResonantState,
    pub mirror: ResonantState,
}

impl StatePair {
    /// `(u_n(r), u_{−n}(r))`, the second formed as the exact conjugate.
    pub(crate) fn values(&self, r: f64) -> (Complex64, Complex64) {
        let u = self.positive.eval_unchecked(r);
        (u, u.conj())
    }
}

/// Mirror-symmetric resonant family `n = ±1..=±N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonantFamily {
    model: ShellModel,
    pairs: Vec<StatePair>,
}

impl ResonantFamily {
    /// Mirrors and normalizes the `n ≥ 1` poles.
    pub fn new(model: &ShellModel, poles: &[Pole]) -> Result<Self> {
        let states = extend_symmetric(poles)
            .iter()
            .map(|p| normalize(model, p))
            .collect::<Result<Vec<_>>>()?;
        Self::from_states(states)
    }

    /// Groups states into mirror pairs, requiring `k_{−n} = −conj(k_n)` and
    /// `A_{−n} = −conj(A_n)` exactly and indices `1..=N` without gaps.
    pub fn from_states(states: Vec<ResonantState>) -> Result<Self> {
        let Some(first) = states.first() else {
            return Err(Error::InvalidArgument("resonant family is empty"));
        };
        let model = first.model;
        let mut positive: Vec<ResonantState> = states.iter().copied().filter(|s| s.index() > 0).collect();
        positive.sort_by_key(|s| s.index());
        let mut pairs = Vec::with_capacity(positive.len());
        for (i, p) in positive.iter().enumerate() {
            if p.index() != i as i32 + 1 {
                return Err(Error::AsymmetricFamily { index: i as i32 + 1 });
            }
            let mirror = states
                .iter()
                .find(|s| s.index() == -p.index())
                .ok_or(Error::AsymmetricFamily { index: -p.index() })?;
            if mirror.model != model || p.model != model {
                return Err(Error::ModelMismatch);
            }
            if mirror.k() != -p.k().conj() || mirror.amplitude != -p.amplitude.conj() {
                return Err(Error::AsymmetricFamily { index: -p.index() });
            }
            pairs.push(StatePair { positive: *p, mirror: *mirror });
        }
        if states.len() != 2 * pairs.len() {
            let stray = states.iter().find(|s| s.index() < 0 && -s.index() as usize > pairs.len());
            return Err(Error::AsymmetricFamily { index: stray.map_or(0, |s| s.index()) });
        }
        Ok(Self { model, pairs })
    }

    pub fn model(&self) -> &ShellModel {
        &self.model
    }

    /// `N`, the number of mirror pairs.
    pub fn half_size(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[StatePair] {
        &self.pairs
    }

    /// The first `n` pairs.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.pairs.len() {
            return Err(Error::SizeMismatch { expected: self.pairs.len(), found: n });
        }
        Ok(Self { model: self.model, pairs: self.pairs[..n].to_vec() })
    }

    /// States in `(|n|, sign)` order: `1, −1, 2, −2, …`.
    pub fn states(&self) -> impl Iterator<Item = &ResonantState> + '_ {
        self.pairs.iter().flat_map(|p| [&p.positive, &p.mirror])
    }
}

/// Storage slot of index `n` in `(|n|, sign)` order.
pub fn slot(n: i32) -> usize {
    let m = n.unsigned_abs() as usize - 1;
    if n > 0 {
        2 * m
    } else {
        2 * m + 1
    }
}

/// `I_rs = ∫_0^R conj(u_r) u_s dr` in closed form:
/// `conj(A_r) A_s · ½[sin((α−β)R)/(α−β) − sin((α+β)R)/(α+β)]` with
/// `α = conj(k_r)`, `β = k_s`; coincident frequencies take the limit.
pub fn overlap_i(a: &ResonantState, b: &ResonantState) -> Result<Complex64> {
    if a.model != b.model {
        return Err(Error::ModelMismatch);
    }
    let r = a.model.radius();
    let alpha = a.k().conj();
    let beta = b.k();
    let integral = (sin_ratio(alpha - beta, r) - sin_ratio(alpha + beta, r)) * 0.5;
    Ok(a.amplitude.conj() * b.amplitude * integral)
}

/// Overlaps `I_rs` for all `r, s ∈ {±1..=±N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    half_size: usize,
    momenta: Vec<Complex64>,
    entries: Vec<Complex64>,
}

impl OverlapMatrix {
    pub fn new(family: &ResonantFamily) -> Result<Self> {
        let states: Vec<&ResonantState> = family.states().collect();
        let dim = states.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for a in &states {
            for b in &states {
                entries.push(overlap_i(a, b)?);
            }
        }
        Ok(Self { half_size: family.half_size(), momenta: states.iter().map(|s| s.k()).collect(), entries })
    }

    pub fn half_size(&self) -> usize {
        self.half_size
    }

    /// `I_rs` by signed indices.
    pub fn get(&self, r: i32, s: i32) -> Complex64 {
        self.entries[slot(r) * 2 * self.half_size + slot(s)]
    }

    pub(crate) fn by_slot(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * 2 * self.half_size + j]
    }

    pub(crate) fn momenta(&self) -> &[Complex64] {
        &self.momenta
    }
}

/// `C_n = ∫_0^R ψ₀(r) u_n(r) dr` by adaptive quadrature.
pub fn coefficient_c<S: InitialState + ?Sized>(state: &ResonantState, psi0: &S, quad: &AdaptiveQuadrature) -> Result<Complex64> {
    let r = state.model.radius();
    if (psi0.radius() - r).abs() > 1e-12 * r {
        return Err(Error::ModelMismatch);
    }
    quad.integrate(0.0, r, |x| state.eval_unchecked(x) * psi0.eval(x))
}

/// Closed form of `C_n` for a box mode,
/// `A_n sqrt(2/R) q sin(k_n R) (−1)^{m+1} / (q² − k_n²)`, `q = mπ/R`;
/// within `1e-4` of `q` the removable singularity is expanded to third order.
pub fn box_mode_coefficient(state: &ResonantState, mode: &BoxMode) -> Complex64 {
    let r = state.model.radius();
    let q = mode.wavenumber();
    let k = state.k();
    let eps = k - q;
    let shape = if eps.norm() < 1e-4 {
        let x2 = eps * eps * (r * r);
        let ratio = (Complex64::new(1.0, 0.0) - x2 / 6.0 + x2 * x2 / 120.0) * r;
        ratio * q / (eps + 2.0 * q)
    } else {
        let sign = if mode.mode() % 2 == 1 { 1.0 } else { -1.0 };
        (k * r).sin() * (q * sign) / (Complex64::new(q * q, 0.0) - k * k)
    };
    state.amplitude * mode.amplitude() * shape
}

/// `C_n` for every state of a family, in `(|n|, sign)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    half_size: usize,
    values: Vec<Complex64>,
}

impl CoefficientSet {
    pub fn new<S: InitialState + ?Sized>(family: &ResonantFamily, psi0: &S, quad: &AdaptiveQuadrature) -> Result<Self> {
        let values = family.states().map(|s| coefficient_c(s, psi0, quad)).collect::<Result<Vec<_>>>()?;
        Ok(Self { half_size: family.half_size(), values })
    }

    pub fn half_size(&self) -> usize {
        self.half_size
    }

    pub fn get(&self, n: i32) -> Complex64 {
        self.values[slot(n)]
    }

    pub(crate) fn by_slot(&self, i: usize) -> Complex64 {
        self.values[i]
    }

    /// The first `n` pairs.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.half_size {
            return Err(Error::SizeMismatch { expected: self.half_size, found: n });
        }
        Ok(Self { half_size: n, values: self.values[..2 * n].to_vec() })
    }
}

/// `Σ_{0<|n|≤N} u_n(r) u_n(r')/k_n`, pair by pair; each pair contributes
/// `2i Im(u_n(r) u_n(r')/k_n)`.
pub fn sum_rule_partial(family: &ResonantFamily, r: f64, rp: f64) -> Result<Complex64> {
    family.model.check_inside(r)?;
    family.model.check_inside(rp)?;
    let mut acc = 0.0;
    for p in family.pairs() {
        let z = p.positive.eval_unchecked(r) * p.positive.eval_unchecked(rp) / p.positive.k();
        acc += 2.0 * z.im;
    }
    Ok(Complex64::new(0.0, acc))
}

/// Sampled `f_N(r) = Σ C_n u_n(r)/k_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FProfile {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub sup_norm: f64,
}

pub(crate) fn f_value(coeffs: &CoefficientSet, family: &ResonantFamily, r: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, p) in family.pairs().iter().enumerate() {
        let (u, um) = p.values(r);
        let pair = coeffs.by_slot(2 * i) * u / p.positive.k() + coeffs.by_slot(2 * i + 1) * um / p.mirror.k();
        acc += pair;
    }
    acc
}

fn check_sizes(family: &ResonantFamily, coeffs: &CoefficientSet) -> Result<()> {
    if coeffs.half_size != family.half_size() {
        return Err(Error::SizeMismatch { expected: family.half_size(), found: coeffs.half_size });
    }
    Ok(())
}

pub fn f_partial(coeffs: &CoefficientSet, family: &ResonantFamily, grid: &[f64]) -> Result<FProfile> {
    check_sizes(family, coeffs)?;
    let mut values = Vec::with_capacity(grid.len());
    for &r in grid {
        family.model.check_inside(r)?;
        values.push(f_value(coeffs, family, r));
    }
    let sup_norm = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(FProfile { grid: grid.to_vec(), values, sup_norm })
}

/// `∫_0^R |f_N(r)|² dr` by quadrature, the second route to `Δ_N`.
pub fn f_norm_squared(coeffs: &CoefficientSet, family: &ResonantFamily, quad: &AdaptiveQuadrature) -> Result<f64> {
    check_sizes(family, coeffs)?;
    quad.integrate_real(0.0, family.model.radius(), |r| f_value(coeffs, family, r).norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaValue {
    pub delta: Complex64,
    /// Sum of the magnitudes of all terms of the double sum.
    pub term_mass: f64,
}

/// `Δ_N = Σ_r Σ_s conj(C_r) C_s I_rs / (conj(k_r) k_s)`.
#[allow(clippy::needless_range_loop)]
pub fn delta_partial(coeffs: &CoefficientSet, overlaps: &OverlapMatrix) -> Result<DeltaValue> {
    if coeffs.half_size != overlaps.half_size {
        return Err(Error::SizeMismatch { expected: overlaps.half_size, found: coeffs.half_size });
    }
    let ks = overlaps.momenta();
    let dim = 2 * coeffs.half_size;
    let mut delta = Complex64::new(0.0, 0.0);
    let mut term_mass = 0.0;
    for i in 0..dim {
        let left = (coeffs.by_slot(i) / ks[i]).conj();
        for j in 0..dim {
            let term = left * coeffs.by_slot(j) / ks[j] * overlaps.by_slot(i, j);
            delta += term;
            term_mass += term.norm();
        }
    }
    Ok(DeltaValue { delta, term_mass })
}

/// All three vanishing diagnostics at one truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticReport {
    pub n: usize,
    pub sum_rule_value: Complex64,
    pub f_sup_norm: f64,
    pub delta_value: Complex64,
    pub term_mass: f64,
}

impl DiagnosticReport {
    pub fn delta_over_mass(&self) -> f64 {
        self.delta_value.norm() / self.term_mass
    }
}

/// Diagnostics after truncating `family` and `coeffs` to `n` pairs.
pub fn diagnostics(
    family: &ResonantFamily,
    coeffs: &CoefficientSet,
    n: usize,
    probe: (f64, f64),
    grid: &[f64],
) -> Result<DiagnosticReport> {
    let fam = family.truncated(n)?;
    let c = coeffs.truncated(n)?;
    let overlaps = OverlapMatrix::new(&fam)?;
    let d = delta_partial(&c, &overlaps)?;
    Ok(DiagnosticReport {
        n,
        sum_rule_value: sum_rule_partial(&fam, probe.0, probe.1)?,
        f_sup_norm: f_partial(&c, &fam, grid)?.sup_norm,
        delta_value: d.delta,
        term_mass: d.term_mass,
    })
}

/// `n` uniform points `jR/n`, `j = 0..n`, covering `[0, R)`.
pub fn interior_grid(model: &ShellModel, n: usize) -> Vec<f64> {
    (0..n).map(|j| model.radius() * j as f64 / n as f64).collect()
}

/// Relative quadrature tolerance for the cross-identity `Δ_N = ∫|f_N|²`.
pub fn cross_identity_quadrature() -> AdaptiveQuadrature {
    AdaptiveQuadrature::new(20, Tolerance { abs: 1e-300, rel: 1e-12 }, 30)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::initial_state_box_mode;
    use crate::poles::find_poles;

    fn family(n: usize) -> ResonantFamily {
        let m = ShellModel::default();
        ResonantFamily::new(&m, &find_poles(&m, n).unwrap()).unwrap()
    }

    #[test]
    fn u_vanishes_at_origin_and_rejects_outside() {
        let f = family(3);
        for s in f.states() {
            assert_eq!(s.eval(0.0).unwrap(), Complex64::new(0.0, 0.0));
            assert!(matches!(s.eval(1.01), Err(Error::OutOfRange { .. })));
            assert!(s.eval(-0.1).is_err());
        }
    }

    #[test]
    fn mirror_state_is_conjugate() {
        let f = family(2);
        for p in f.pairs() {
            for j in 0..=10 {
                let r = j as f64 / 10.0;
                let u = p.positive.eval(r).unwrap();
                let um = p.mirror.eval(r).unwrap();
                assert!((um - u.conj()).norm() < 1e-12);
            }
            let direct = normalize(p.positive.model(), p.mirror.pole()).unwrap();
            assert_eq!(direct.amplitude(), -p.positive.amplitude().conj());
        }
    }

    #[test]
    fn u_is_linear_in_amplitude_and_odd() {
        let f = family(1);
        let s = f.pairs()[0].positive;
        let r = 0.37;
        let u = s.eval(r).unwrap();
        let odd = s.amplitude() * (s.k() * -r).sin();
        assert!((odd + u).norm() < 1e-15);
        let doubled = ResonantState { amplitude: s.amplitude() * 2.0, ..s };
        assert!((doubled.eval(r).unwrap() - u * 2.0).norm() < 1e-15);
    }

    #[test]
    fn gamow_normalization_closed_form_vs_quadrature() {
        let f = family(8);
        let quad = AdaptiveQuadrature::new(64, Tolerance::absolute(1e-13), 30);
        for s in f.states() {
            let norm = s.gamow_norm_by_quadrature(&quad).unwrap();
            assert!((norm - 1.0).norm() < 1e-10, "n={} norm={norm}", s.index());
        }
    }

    #[test]
    fn stiff_shell_recovers_box_normalization() {
        let m = ShellModel::new(1e8, 1.0).unwrap();
        let p = find_poles(&m, 1).unwrap();
        let s = normalize(&m, &p[0]).unwrap();
        assert!((s.amplitude() * s.amplitude() - 2.0).norm() < 1e-7);
    }

    #[test]
    fn normalize_rejects_unverified_pole() {
        let m = ShellModel::default();
        let fake = Pole { index: 1, k: Complex64::new(3.0, -0.2), residual: 0.0, iterations: 0 };
        assert!(normalize(&m, &fake).is_err());
    }

    #[test]
    fn asymmetric_family_is_rejected() {
        let f = family(3);
        let mut states: Vec<ResonantState> = f.states().copied().collect();
        states.retain(|s| s.index() != -2);
        assert_eq!(ResonantFamily::from_states(states), Err(Error::AsymmetricFamily { index: -2 }));
    }

    #[test]
    fn overlap_closed_form_vs_quadrature() {
        let f = family(2);
        let quad = AdaptiveQuadrature::new(64, Tolerance::absolute(1e-14), 30);
        let states: Vec<&ResonantState> = f.states().collect();
        for a in &states {
            for b in &states {
                let closed = overlap_i(a, b).unwrap();
                let numeric = quad.integrate(0.0, 1.0, |r| a.eval_unchecked(r).conj() * b.eval_unchecked(r)).unwrap();
                assert!((closed - numeric).norm() < 1e-10, "({}, {})", a.index(), b.index());
            }
        }
    }

    #[test]
    fn overlap_symmetries() {
        let f = family(5);
        let o = OverlapMatrix::new(&f).unwrap();
        for r in (-5..=5).filter(|&x| x != 0) {
            let diag = o.get(r, r);
            assert!(diag.im.abs() < 1e-14 && diag.re > 0.0);
            for s in (-5..=5).filter(|&x| x != 0) {
                assert!((o.get(r, s) - o.get(s, r).conj()).norm() < 1e-13);
                assert!((o.get(-r, -s) - o.get(r, s).conj()).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn overlap_model_mismatch() {
        let a = family(1).pairs()[0].positive;
        let m2 = ShellModel::new(7.0, 1.0).unwrap();
        let p = find_poles(&m2, 1).unwrap();
        let b = normalize(&m2, &p[0]).unwrap();
        assert_eq!(overlap_i(&a, &b), Err(Error::ModelMismatch));
    }

    #[test]
    fn coefficients_quadrature_vs_closed_form() {
        let f = family(20);
        let psi0 = initial_state_box_mode(f.model(), 1).unwrap();
        let c = CoefficientSet::new(&f, &psi0, &AdaptiveQuadrature::standard()).unwrap();
        for s in f.states() {
            let closed = box_mode_coefficient(s, &psi0);
            assert!((c.get(s.index()) - closed).norm() < 1e-10, "n={}", s.index());
        }
        for n in 1..=20 {
            assert!((c.get(-n) - c.get(n).conj()).norm() < 1e-13);
        }
        let c1 = c.get(1).norm();
        assert!(c1 > 0.0 && c1 < 1.2);
        for n in 3..=20 {
            assert!(c.get(n).norm() < c1);
        }
    }

    #[test]
    fn closed_form_coefficient_near_removable_singularity() {
        let m = ShellModel::new(1e9, 1.0).unwrap();
        let p = find_poles(&m, 2).unwrap();
        let f = ResonantFamily::new(&m, &p).unwrap();
        let psi0 = initial_state_box_mode(&m, 2).unwrap();
        let s = f.pairs()[1].positive;
        assert!((s.k() - psi0.wavenumber()).norm() < 1e-4);
        let quad = AdaptiveQuadrature::new(30, Tolerance::absolute(1e-14), 30);
        let numeric = coefficient_c(&s, &psi0, &quad).unwrap();
        let closed = box_mode_coefficient(&s, &psi0);
        assert!((numeric - closed).norm() < 1e-10);
        assert!((closed.norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sum_rule_properties() {
        let f = family(50);
        for n in [5, 10, 50] {
            let t = f.truncated(n).unwrap();
            assert_eq!(sum_rule_partial(&t, 0.0, 0.6).unwrap(), Complex64::new(0.0, 0.0));
            assert_eq!(sum_rule_partial(&t, 0.3, 0.7).unwrap().re, 0.0);
        }
        let at5 = sum_rule_partial(&f.truncated(5).unwrap(), 0.3, 0.7).unwrap().norm();
        let at50 = sum_rule_partial(&f, 0.3, 0.7).unwrap().norm();
        assert!(at50 * 10.0 <= at5, "{at5} -> {at50}");
        assert!(sum_rule_partial(&f, 0.3, 1.2).is_err());
    }

    #[test]
    fn f_profile_properties() {
        let f = family(50);
        let psi0 = initial_state_box_mode(f.model(), 1).unwrap();
        let c = CoefficientSet::new(&f, &psi0, &AdaptiveQuadrature::standard()).unwrap();
        let grid = interior_grid(f.model(), 101);
        let p50 = f_partial(&c, &f, &grid).unwrap();
        let p10 = f_partial(&c.truncated(10).unwrap(), &f.truncated(10).unwrap(), &grid).unwrap();
        assert_eq!(p50.values[0], Complex64::new(0.0, 0.0));
        assert!(p50.sup_norm <= p10.sup_norm);
        for v in &p50.values {
            assert!(v.re.abs() < 1e-14);
        }
        assert!(f_partial(&c.truncated(10).unwrap(), &f, &grid).is_err());
    }

    #[test]
    fn delta_equals_norm_of_f() {
        let f = family(10);
        let psi0 = initial_state_box_mode(f.model(), 1).unwrap();
        let c = CoefficientSet::new(&f, &psi0, &AdaptiveQuadrature::standard()).unwrap();
        let o = OverlapMatrix::new(&f).unwrap();
        let d = delta_partial(&c, &o).unwrap();
        assert!(d.term_mass >= d.delta.norm());
        assert!(d.delta.re >= 0.0 && d.delta.im.abs() < 1e-12);
        let direct = f_norm_squared(&c, &f, &cross_identity_quadrature()).unwrap();
        assert!((d.delta.re - direct).abs() <= 1e-8 * direct, "{} vs {direct}", d.delta.re);
    }

    #[test]
    fn delta_size_mismatch() {
        let f = family(4);
        let psi0 = initial_state_box_mode(f.model(), 1).unwrap();
        let c = CoefficientSet::new(&f, &psi0, &AdaptiveQuadrature::standard()).unwrap();
        let o = OverlapMatrix::new(&f.truncated(3).unwrap()).unwrap();
        assert!(matches!(delta_partial(&c, &o), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn diagnostics_shrink_with_truncation() {
        let f = family(50);
        let psi0 = initial_state_box_mode(f.model(), 1).unwrap();
        let c = CoefficientSet::new(&f, &psi0, &AdaptiveQuadrature::standard()).unwrap();
        let grid = interior_grid(f.model(), 101);
        let d5 = diagnostics(&f, &c, 5, (0.3, 0.7), &grid).unwrap();
        let d10 = diagnostics(&f, &c, 10, (0.3, 0.7), &grid).unwrap();
        let d50 = diagnostics(&f, &c, 50, (0.3, 0.7), &grid).unwrap();
        // the sum rule is not monotone in N at this probe; 10× over 5 → 50
        assert!(d50.sum_rule_value.norm() * 10.0 < d5.sum_rule_value.norm());
        assert!(d50.f_sup_norm < d10.f_sup_norm);
        assert!(d50.delta_over_mass() < d10.delta_over_mass());
    }
}
