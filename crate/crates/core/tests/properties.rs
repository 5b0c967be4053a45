use gamow_core::basis::{amplitude_squared, normalize, overlap_i, OverlapMatrix, ResonantFamily};
use gamow_core::crank_nicolson::{propagate_cn, total_norm, Grid1D};
use gamow_core::model::{initial_state_box_mode, InitialState, ShellModel};
use gamow_core::moshinsky::moshinsky_m;
use gamow_core::poles::{extend_symmetric, find_poles, pole_equation_residual};
use gamow_core::propagation::{green_partial, TailCorrection};
use gamow_core::quadrature::AdaptiveQuadrature;
use gamow_core::tail::tail_slope;
use gamow_core::Complex64;
use proptest::prelude::*;

fn model() -> impl Strategy<Value = ShellModel> {
    (0.5f64..60.0, 0.5f64..3.0).prop_map(|(l, r)| ShellModel::new(l, r).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn poles_are_certified_roots(m in model()) {
        let poles = find_poles(&m, 6).unwrap();
        for w in poles.windows(2) {
            prop_assert!(w[1].k.re > w[0].k.re);
        }
        for p in &poles {
            prop_assert!(p.k.im < 0.0);
            let raw = pole_equation_residual(&m, p.k).norm();
            prop_assert!(raw <= p.residual_bound(&m));
            let scale = (2.0 * p.k.norm()).max(1.0);
            prop_assert!((raw / scale - p.residual).abs() <= 4.0 * f64::EPSILON * (m.lambda() + 2.0 * p.k.norm()) / scale);
        }
        let all = extend_symmetric(&poles);
        let half = poles.len();
        for i in 0..half {
            let neg = &all[half - 1 - i];
            let pos = &all[half + i];
            prop_assert_eq!(neg.index, -pos.index);
            prop_assert_eq!(neg.k + pos.k.conj(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn normalization_closed_form_matches_quadrature(m in model(), n in 1usize..6) {
        let poles = find_poles(&m, n).unwrap();
        let s = normalize(&m, &poles[n - 1]).unwrap();
        let a2 = amplitude_squared(&m, s.k()).unwrap();
        prop_assert!((s.amplitude() * s.amplitude() - a2).norm() <= 1e-12 * a2.norm());
        let quad = AdaptiveQuadrature::standard();
        let norm = s.gamow_norm_by_quadrature(&quad).unwrap();
        prop_assert!((norm - 1.0).norm() <= 1e-10, "{}", norm);
    }

    #[test]
    fn states_are_odd_in_r(m in model(), x in 0.0f64..1.0) {
        let s = normalize(&m, &find_poles(&m, 2).unwrap()[1]).unwrap();
        let r = x * m.radius();
        let u = s.eval(r).unwrap();
        let reflected = s.amplitude() * (s.k() * -r).sin();
        prop_assert_eq!(reflected, -u);
    }

    #[test]
    fn box_modes_are_normalized_with_boundary_zeros(m in model(), mode in 1i64..8) {
        let b = initial_state_box_mode(&m, mode).unwrap();
        prop_assert_eq!(b.eval(0.0), 0.0);
        prop_assert!(b.eval(m.radius()).abs() < 1e-12);
        let norm = AdaptiveQuadrature::standard().integrate_real(0.0, m.radius(), |r| b.eval(r).powi(2)).unwrap();
        prop_assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_symmetries(m in model(), r in -5i32..6, s in -5i32..6) {
        prop_assume!(r != 0 && s != 0);
        let fam = ResonantFamily::new(&m, &find_poles(&m, 5).unwrap()).unwrap();
        let o = OverlapMatrix::new(&fam).unwrap();
        let scale = o.get(r, s).norm().max(1.0);
        prop_assert!((o.get(r, s) - o.get(s, r).conj()).norm() <= 1e-12 * scale);
        prop_assert!((o.get(-r, -s) - o.get(r, s).conj()).norm() <= 1e-12 * scale);
        prop_assert!(o.get(r, r).im.abs() <= 1e-12 * o.get(r, r).re);
        prop_assert!(o.get(r, r).re > 0.0);
        let st: Vec<_> = fam.states().collect();
        let a = st.iter().find(|x| x.index() == r).unwrap();
        let b = st.iter().find(|x| x.index() == -s).unwrap();
        prop_assert!((overlap_i(a, b).unwrap() - o.get(r, -s)).norm() <= 1e-13 * o.get(r, -s).norm().max(1.0));
    }

    #[test]
    fn moshinsky_is_one_half_at_time_zero(re in -200.0f64..200.0, im in -50.0f64..50.0) {
        prop_assert_eq!(moshinsky_m(Complex64::new(re, im), 0.0).unwrap().value, Complex64::new(0.5, 0.0));
    }

    #[test]
    fn green_function_is_symmetric(x in 0.0f64..0.999, y in 0.0f64..0.999, t in 0.0f64..50.0) {
        let m = ShellModel::default();
        let fam = ResonantFamily::new(&m, &find_poles(&m, 8).unwrap()).unwrap();
        for c in [TailCorrection::None, TailCorrection::SumRule] {
            prop_assert_eq!(green_partial(&fam, x, y, t, c).unwrap(), green_partial(&fam, y, x, t, c).unwrap());
        }
    }

    #[test]
    fn slope_of_exact_power_law(c in 1e-6f64..1e6, p in -5.0f64..2.0) {
        let t: Vec<f64> = (0..=32).map(|i| 10f64.powf(i as f64 / 16.0)).collect();
        let y: Vec<f64> = t.iter().map(|t| c * t.powf(p)).collect();
        let fit = tail_slope(&t, &y).unwrap();
        prop_assert!((fit.slope - p).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn cayley_step_preserves_norm_without_absorber(lambda in 0.1f64..1e4, mode in 1i64..4) {
        let m = ShellModel::new(lambda, 1.0).unwrap();
        let psi0 = initial_state_box_mode(&m, mode).unwrap();
        let g = Grid1D::new(&m, 10.0, 0.02, 0.01, 4.0, 0.0).unwrap();
        let f = propagate_cn(&m, &psi0, &g, &[0.0, 1000.0 * g.dt]).unwrap();
        prop_assert!((total_norm(&f[1]) - total_norm(&f[0])).abs() <= 1e-10);
    }
}
