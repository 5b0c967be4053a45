//! Frozen values from independent computations: poles from 30-digit root
//! finding, survival probabilities from the continuum (energy) integral
//! `S(t) = |∫ |c(k)|² e^{−ik²t} dk|²` over scattering states.

use gamow_core::basis::ResonantFamily;
use gamow_core::model::{initial_state_box_mode, ShellModel};
use gamow_core::poles::find_poles;
use gamow_core::propagation::{Expansion, TailCorrection};
use gamow_core::Complex64;

#[allow(clippy::excessive_precision)]
const POLES: [(usize, f64, f64); 4] = [
    (1, 2.7579383212949245, -0.14043273246623328),
    (2, 5.7134758993619559, -0.37014802888211016),
    (10, 30.660448523993986, -1.1630763570655342),
    (50, 156.29750840114181, -1.976585222150272),
];

const SURVIVAL: [(f64, f64); 3] = [(1.0, 0.20965348433055905), (10.0, 1.7664959639045953e-7), (100.0, 1.3609679203101269e-12)];

#[test]
fn poles_match_high_precision_roots() {
    let poles = find_poles(&ShellModel::default(), 50).unwrap();
    for (n, re, im) in POLES {
        let k = poles[n - 1].k;
        let want = Complex64::new(re, im);
        assert!((k - want).norm() <= 1e-13 * want.norm(), "n={n}: {k} vs {want}");
    }
}

#[test]
fn leading_width_and_lifetime() {
    let k = Complex64::new(POLES[0].1, POLES[0].2);
    let gamma = -2.0 * (k * k).im;
    assert!((gamma - 1.5492192577311).abs() < 1e-12);
    assert!((1.0 / gamma - 0.6454864248618).abs() < 1e-12);
}

#[test]
fn survival_matches_continuum_integral() {
    let m = ShellModel::default();
    let fam = ResonantFamily::new(&m, &find_poles(&m, 50).unwrap()).unwrap();
    let e = Expansion::new(fam, initial_state_box_mode(&m, 1).unwrap(), TailCorrection::SumRule).unwrap();
    for (t, want) in SURVIVAL {
        let got = e.survival(t).unwrap().quadrature;
        // measured: 1e-6 relative or better at N = 50
        assert!((got - want).abs() <= 1e-5 * want, "t={t}: {got:e} vs {want:e}");
    }
}

#[test]
fn bare_truncation_is_further_from_the_continuum() {
    let m = ShellModel::default();
    let fam = ResonantFamily::new(&m, &find_poles(&m, 20).unwrap()).unwrap();
    let e = Expansion::new(fam, initial_state_box_mode(&m, 1).unwrap(), TailCorrection::SumRule).unwrap();
    let bare = e.with_correction(TailCorrection::None);
    let (t, want) = SURVIVAL[2];
    let corrected = (e.survival(t).unwrap().quadrature - want).abs();
    let plain = (bare.survival(t).unwrap().quadrature - want).abs();
    assert!(plain > 10.0 * corrected, "bare {plain:e}, corrected {corrected:e}");
}
