//! The ten acceptance criteria. Tolerances are the constants below; every
//! check records the measured value next to its limit.

use std::time::{Duration, Instant};

use gamow_core::basis::{
    amplitude_squared, cross_identity_quadrature, diagnostics, f_norm_squared, interior_grid, normalize,
    sum_rule_partial,
};
use gamow_core::crank_nicolson::{interior, oracle_probabilities, propagate_cn, total_norm};
use gamow_core::poles::{count_poles_argument_principle, extend_symmetric, find_poles, pole_equation_derivative, pole_equation_residual, scaled_residual, PoleWindow};
use gamow_core::propagation::TailCorrection;
use gamow_core::quadrature::{AdaptiveQuadrature, Tolerance};
use gamow_core::{Complex64, Error};
use serde_json::{json, Value};

use crate::commands::{self, fit_series, LabError, Series};
use crate::config::RunConfig;
use crate::output::{document, json_number};
use crate::session::Session;

pub const POLE_COUNT: usize = 50;
pub const POLE_RESIDUAL: f64 = 1e-12;
pub const POLE_RUNTIME: Duration = Duration::from_secs(1);
pub const NORMALIZATION_AGREEMENT: f64 = 1e-10;
pub const SUM_RULE_TRUNCATIONS: (usize, usize) = (5, 50);
pub const SUM_RULE_REDUCTION: f64 = 10.0;
pub const DELTA_TRUNCATIONS: (usize, usize) = (10, 50);
pub const DELTA_OVER_MASS: f64 = 1e-3;
pub const DELTA_IMPROVEMENT: f64 = 5.0;
pub const CROSS_IDENTITY: f64 = 1e-8;
pub const F_TRUNCATIONS: [usize; 3] = [10, 20, 50];
pub const F_GRID_POINTS: usize = 101;
pub const F_SUP: f64 = 1e-3;
pub const GREEN_SLOPE: f64 = -1.5;
pub const GREEN_SLOPE_TOL: f64 = 0.05;
pub const B_RATIO_TOL: f64 = 0.1;
pub const TAIL_SLOPE: f64 = -3.0;
pub const TAIL_SLOPE_TOL: f64 = 0.1;
/// Least distance of the fitted `P` exponent from `−1`.
pub const REFUTATION_MARGIN: f64 = 1.0;
pub const INVARIANCE_TOL: f64 = 0.1;
pub const INVARIANCE_TRUNCATIONS: (usize, usize) = (20, 50);
pub const CN_L2: f64 = 1e-2;
pub const CN_P_REL: f64 = 0.05;
pub const CN_UNITARITY: f64 = 1e-10;
pub const CN_UNITARITY_STEPS: usize = 1000;
pub const DUAL_PATH_TIMES: usize = 10;
pub const DUAL_PATH_REL: f64 = 1e-8;
pub const DUAL_PATH_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// `None` for checks whose value would break byte-for-byte
    /// reproducibility (wall-clock time).
    pub value: Option<f64>,
    pub limit: String,
    pub passed: bool,
}

fn at_most(name: &str, value: f64, limit: f64) -> Check {
    Check { name: name.into(), value: Some(value), limit: format!("<= {limit:e}"), passed: value <= limit }
}

fn below(name: &str, value: f64, limit: f64) -> Check {
    Check { name: name.into(), value: Some(value), limit: format!("< {limit:e}"), passed: value < limit }
}

fn at_least(name: &str, value: f64, limit: f64) -> Check {
    Check { name: name.into(), value: Some(value), limit: format!(">= {limit:e}"), passed: value >= limit }
}

fn near(name: &str, value: f64, target: f64, tol: f64) -> Check {
    Check { name: name.into(), value: Some(value), limit: format!("{target} +/- {tol}"), passed: (value - target).abs() <= tol }
}

fn holds(name: &str, value: Option<f64>, limit: &str, passed: bool) -> Check {
    Check { name: name.into(), value, limit: limit.into(), passed }
}

/// A check that could not be evaluated because a module failed.
fn failed(name: &str, err: &dyn std::fmt::Display) -> Check {
    Check { name: name.into(), value: None, limit: format!("module error: {err}"), passed: false }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    /// Informational measurements outside the pass/fail logic.
    pub notes: Vec<String>,
}

impl Criterion {
    fn new(id: u8, title: &'static str) -> Self {
        Self { id, title, checks: Vec::new(), notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    /// One line: status, id, title and every check.
    pub fn line(&self) -> String {
        let checks: Vec<String> = self
            .checks
            .iter()
            .map(|c| match c.value {
                Some(v) => format!("{} {v:.4e} ({}){}", c.name, c.limit, if c.passed { "" } else { " FAILED" }),
                None => format!("{} ({}){}", c.name, c.limit, if c.passed { "" } else { " FAILED" }),
            })
            .collect();
        format!(
            "[{}] criterion {:>2} {}: {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            checks.join("; ")
        )
    }
}

/// Evaluate every criterion. Only configuration problems are errors; a
/// module failure inside a criterion fails that criterion.
type Step = fn(&Session) -> Result<Criterion, LabError>;

pub fn run_all(config: &RunConfig) -> Result<Vec<Criterion>, LabError> {
    config.validate()?;
    let mut cfg = config.clone();
    cfg.truncation_n = POLE_COUNT;
    let session = match Session::new(&cfg) {
        Ok(s) => s,
        Err(e) => {
            return Ok((1..=10)
                .map(|id| {
                    let mut c = Criterion::new(id, TITLES[id as usize - 1]);
                    c.checks.push(failed("setup", &e));
                    c
                })
                .collect())
        }
    };
    let steps: [Step; 10] = [
        pole_integrity,
        gamow_normalization,
        sum_rule,
        central_identity,
        f_vanishes,
        green_asymptotics,
        tail_exponents,
        oracle_cross_check,
        dual_path,
        determinism,
    ];
    Ok(steps
        .iter()
        .enumerate()
        .map(|(i, step)| {
            step(&session).unwrap_or_else(|e: LabError| {
                let mut c = Criterion::new(i as u8 + 1, TITLES[i]);
                c.checks.push(failed("evaluation", &e));
                c
            })
        })
        .collect())
}

const TITLES: [&str; 10] = [
    "pole integrity",
    "Gamow normalization",
    "sum rule",
    "central identity",
    "f vanishes",
    "Green asymptotics",
    "tail exponents",
    "oracle cross-check",
    "dual-path P",
    "determinism",
];

fn pole_integrity(s: &Session) -> Result<Criterion, LabError> {
    let mut c = Criterion::new(1, TITLES[0]);
    let start = Instant::now();
    let poles = find_poles(&s.model, POLE_COUNT)?;
    let elapsed = start.elapsed();
    let residual = poles.iter().map(|p| scaled_residual(&s.model, p.k)).fold(0.0, f64::max);
    c.checks.push(below("max |F(k_n)| / max(1, |2k_n|)", residual, POLE_RESIDUAL));
    let raw = poles.iter().map(|p| pole_equation_residual(&s.model, p.k).norm()).fold(0.0, f64::max);
    let top = poles[poles.len() - 1].k;
    let ulp_shift = pole_equation_derivative(&s.model, top).norm() * top.re * f64::EPSILON;
    c.notes.push(format!("unscaled max |F(k_n)| = {raw:.3e}; one ulp of Re k_50 shifts F by {ulp_shift:.1e}"));
    let mut tiles_ok = 0usize;
    for p in &poles {
        let tile = PoleWindow::tile(&s.model, p.index as u32);
        if count_poles_argument_principle(&s.model, &tile)? == 1 && tile.contains(p.k) {
            tiles_ok += 1;
        }
    }
    c.checks.push(holds(
        "tiles holding exactly their pole",
        Some(tiles_ok as f64),
        &format!("= {POLE_COUNT}"),
        tiles_ok == POLE_COUNT,
    ));
    let total = count_poles_argument_principle(&s.model, &PoleWindow::covering(&s.model, POLE_COUNT as u32))?;
    c.checks.push(holds("covering-window count", Some(total as f64), &format!("= {POLE_COUNT}"), total == POLE_COUNT as i64));
    let all = extend_symmetric(&poles);
    let asym = (0..POLE_COUNT)
        .map(|i| (all[POLE_COUNT - 1 - i].k + all[POLE_COUNT + i].k.conj()).norm())
        .fold(0.0, f64::max);
    c.checks.push(holds("max |k_-n + conj k_n|", Some(asym), "= 0 exactly", asym == 0.0));
    c.checks.push(holds("runtime", None, "< 1 s", elapsed < POLE_RUNTIME));
    Ok(c)
}

fn gamow_normalization(s: &Session) -> Result<Criterion, LabError> {
    let mut c = Criterion::new(2, TITLES[1]);
    let quad = AdaptiveQuadrature::new(64, Tolerance { abs: 1e-300, rel: 1e-14 }, 30);
    let r = s.model.radius();
    let mut worst: f64 = 0.0;
    for p in s.poles.iter().take(POLE_COUNT) {
        let closed = amplitude_squared(&s.model, p.k).ok_or(Error::DegenerateNormalizer { index: p.index })?;
        let k = p.k;
        let bulk = quad.integrate(0.0, r, |x| {
            let v = (k * x).sin();
            v * v
        })?;
        let edge = (k * r).sin();
        let norm = bulk + Complex64::new(0.0, 1.0) * edge * edge / (k * 2.0);
        let by_quadrature = norm.inv();
        worst = worst.max((closed - by_quadrature).norm() / closed.norm());
    }
    c.checks.push(at_most("max relative |A_n^2 closed - quadrature|, n = 1..50", worst, NORMALIZATION_AGREEMENT));
    let mut unit: f64 = 0.0;
    for p in s.poles.iter().take(POLE_COUNT) {
        let st = normalize(&s.model, p)?;
        unit = unit.max((st.gamow_norm_by_quadrature(&quad)? - 1.0).norm());
    }
    c.checks.push(at_most("max |Gamow norm - 1|", unit, NORMALIZATION_AGREEMENT));
    Ok(c)
}

fn sum_rule(s: &Session) -> Result<Criterion, LabError> {
    let mut c = Criterion::new(3, TITLES[2]);
    let (lo, hi) = SUM_RULE_TRUNCATIONS;
    let probe = s.config.probe();
    let fam = s.expansion.family();
    let a = sum_rule_partial(&fam.truncated(lo)?, probe.0, probe.1)?.norm();
    let b = sum_rule_partial(&fam.truncated(hi)?, probe.0, probe.1)?.norm();
    c.checks.push(at_least("|sum rule| reduction N=5 -> N=50", a / b, SUM_RULE_REDUCTION));
    c.notes.push(format!("|sum rule| at N=5: {a:.6e}, at N=50: {b:.6e}"));
    Ok(c)
}

fn central_identity(s: &Session) -> Result<Criterion, LabError> {
    let mut c = Criterion::new(4, TITLES[3]);
    let e = &s.expansion;
    let grid = interior_grid(&s.model, F_GRID_POINTS);
    let (lo, hi) = DELTA_TRUNCATIONS;
    let d_lo = diagnostics(e.family(), e.coefficients(), lo, s.config.probe(), &grid)?;
    let d_hi = diagnostics(e.family(), e.coefficients(), hi, s.config.probe(), &grid)?;
    c.checks.push(below("Delta_50 / term mass", d_hi.delta_over_mass(), DELTA_OVER_MASS));
    c.checks.push(below(
        "(Delta_50 / mass) / (Delta_10 / mass)",
        d_hi.delta_over_mass() / d_lo.delta_over_mass(),
        1.0 / DELTA_IMPROVEMENT,
    ));
    let fam = e.family().truncated(lo)?;
    let coeffs = e.coefficients().truncated(lo)?;
    let f2 = f_norm_squared(&coeffs, &fam, &cross_identity_quadrature())?;
    c.checks.push(at_most(
        "|Delta_10 - int |f_10|^2| / int |f_10|^2",
        (d_lo.delta_value - f2).norm() / f2,
        CROSS_IDENTITY,
    ));
    Ok(c)
}

fn f_vanishes(s: &Session) -> Result<Criterion, LabError> {
    let mut c = Criterion::new(5, TITLES[4]);
    let e = &s.expansion;
    let grid = interior_grid(&s.model, F_GRID_POINTS);
    let sups: Vec<f64> = F_TRUNCATIONS
        .iter()
        .map(|&n| diagnostics(e.family(), e.coefficients(), n, s.config.probe(), &grid).map(|d| d.f_sup_norm))
        .collect::<Result<_, _>>()?;
    let monotone = sups.windows(2).all(|w| w[1] < w[0]);
    c.checks.push(holds("sup |f_N| decreasing over N = 10, 20, 50", None, "strictly decreasing", monotone));
    c.checks.push(at_most("sup |f_50| on jR/101, j < 101", sups[2], F_SUP));
    c.notes.push(format!("sup |f_N|: N=10 {:.4e}, N=20 {:.4e}, N=50 {:.4e}", sups[0], sups[1], sups[2]));
    Ok(c)
}

fn green_asymptotics(s: &Session) -> Result<Criterion, LabError> {
    let mut c = Criterion::new(6, TITLES[5]);
    let series = commands::series(s)?;
    let fit = fit_series(&series, Series::G)?;
    c.checks.push(near("remainder slope", fit.slope, GREEN_SLOPE, GREEN_SLOPE_TOL));
    let idx: Vec<usize> =
        (0..series.times.len()).filter(|&i| series.times[i] >= fit.window.0 && series.times[i] <= fit.window.1).collect();
    let scaled: Vec<f64> = idx.iter().map(|&i| series.times[i].sqrt() * series.green_remainder[i]).collect();
    c.checks.push(holds(
        "t^(1/2) * remainder over the window",
        None,
        "strictly decreasing",
        scaled.windows(2).all(|w| w[1] < w[0]),
    ));
    let ratio_dev = idx
        .iter()
        .map(|&i| (series.green_remainder[i] / series.predicted_b[i] - 1.0).abs())
        .fold(0.0, f64::max);
    c.checks.push(at_most("max |remainder / B prediction - 1|", ratio_dev, B_RATIO_TOL));
    c.notes.push(format!("window [{:.4e}, {:.4e}], {} samples", fit.window.0, fit.window.1, fit.samples));
    Ok(c)
}

fn tail_exponents(s: &Session) -> Result<Criterion, LabError> {
    let mut c = Criterion::new(7, TITLES[6]);
    let grid = s.config.time_grid()?;
    let series = commands::series(s)?;
    let fs = fit_series(&series, Series::S)?;
    let fp = fit_series(&series, Series::P)?;
    c.checks.push(near("S slope", fs.slope, TAIL_SLOPE, TAIL_SLOPE_TOL));
    c.checks.push(near("P slope", fp.slope, TAIL_SLOPE, TAIL_SLOPE_TOL));
    c.checks.push(at_least("|P slope - (-1)|", (fp.slope + 1.0).abs(), REFUTATION_MARGIN));

    let mut green = Vec::new();
    for &probe in &s.config.probes {
        let ps = s.expansion.series(&grid, probe)?;
        green.push(fit_series(&ps, Series::G)?.slope);
    }
    let spread = green.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - green.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    c.checks.push(at_most("remainder slope spread over probes", spread, INVARIANCE_TOL));

    let (lo, hi) = INVARIANCE_TRUNCATIONS;
    let other = if hi == POLE_COUNT { lo } else { hi };
    let small = s.expansion.truncated(other)?.series(&grid, s.config.probe())?;
    let fs_small = fit_series(&small, Series::S)?;
    let fp_small = fit_series(&small, Series::P)?;
    c.checks.push(at_most("|S slope N=20 - N=50|", (fs_small.slope - fs.slope).abs(), INVARIANCE_TOL));
    c.checks.push(at_most("|P slope N=20 - N=50|", (fp_small.slope - fp.slope).abs(), INVARIANCE_TOL));

    let bare = s.expansion.with_correction(TailCorrection::None).series(&grid, s.config.probe())?;
    let window = fp.window;
    let bare_fit = gamow_core::tail::tail_slope_in_window(&bare.times, &bare.nonescape, window)?;
    c.notes.push(format!(
        "S window [{:.4e}, {:.4e}], P window [{:.4e}, {:.4e}]; without the omitted-pole term the P slope would be {:.4}",
        fs.window.0, fs.window.1, fp.window.0, fp.window.1, bare_fit.slope
    ));
    c.notes.push("S and P do not depend on the probe; the probe sweep applies to the Green remainder".into());
    Ok(c)
}

fn oracle_cross_check(s: &Session) -> Result<Criterion, LabError> {
    let mut c = Criterion::new(8, TITLES[7]);
    let grid = s.config.grid()?;
    let tau = s.lifetime();
    let field = &propagate_cn(&s.model, &s.psi0, &grid, &[tau])?[0];
    let cn = interior(field, s.model.radius());
    let nodes: Vec<f64> = (0..cn.len()).map(|j| grid.node(j)).collect();
    let ex = s.expansion.psi_profile(&nodes, field.time)?;
    let num: f64 = ex.iter().zip(cn).map(|(a, b)| (a - b).norm_sqr()).sum();
    let den: f64 = ex.iter().map(|a| a.norm_sqr()).sum();
    c.checks.push(at_most("relative L2 of psi on [0,R] at one lifetime", (num / den).sqrt(), CN_L2));

    let times = commands::oracle_times(s)?;
    let fields = propagate_cn(&s.model, &s.psi0, &grid, &times.samples)?;
    let mut worst: f64 = 0.0;
    for o in oracle_probabilities(&fields, &s.psi0, s.model.radius()) {
        let p = s.expansion.nonescape(o.time)?.quadrature;
        worst = worst.max((o.nonescape - p).abs() / p);
    }
    c.checks.push(at_most("max relative P difference over the horizon", worst, CN_P_REL));

    let free = grid.without_cap();
    let f = propagate_cn(&s.model, &s.psi0, &free, &[0.0, CN_UNITARITY_STEPS as f64 * free.dt])?;
    c.checks.push(at_most("norm drift per 1000 steps without absorber", (total_norm(&f[1]) - total_norm(&f[0])).abs(), CN_UNITARITY));
    c.notes.push(format!(
        "horizon {} lifetimes; long-time tails are not validated by this propagator, they rest on criteria 6 and 7",
        s.config.oracle.horizon_lifetimes
    ));
    Ok(c)
}

/// `DUAL_PATH_TIMES` grid times spread over the part of the grid where `P`
/// is above the comparison floor.
pub fn dual_path_times(session: &Session) -> Result<Vec<f64>, Error> {
    let grid = session.config.time_grid()?;
    let mut eligible = Vec::new();
    for &t in &grid.samples {
        let p = match session.expansion.nonescape(t) {
            Ok(v) => v.quadrature,
            Err(Error::PathDisagreement { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        if p > DUAL_PATH_FLOOR {
            eligible.push(t);
        }
    }
    if eligible.len() < DUAL_PATH_TIMES {
        return Err(Error::WindowTooSmall { found: eligible.len(), needed: DUAL_PATH_TIMES });
    }
    let last = eligible.len() - 1;
    Ok((0..DUAL_PATH_TIMES).map(|i| eligible[i * last / (DUAL_PATH_TIMES - 1)]).collect())
}

fn dual_path(s: &Session) -> Result<Criterion, LabError> {
    let mut c = Criterion::new(9, TITLES[8]);
    let mut worst: f64 = 0.0;
    for t in dual_path_times(s)? {
        match s.expansion.nonescape(t) {
            Ok(v) => worst = worst.max((v.quadrature - v.bilinear).abs() / v.quadrature.abs().max(v.bilinear.abs())),
            Err(Error::PathDisagreement { relative }) => worst = worst.max(relative),
            Err(e) => return Err(e.into()),
        }
    }
    c.checks.push(at_most("max relative |P_quadrature - P_bilinear| at 10 times", worst, DUAL_PATH_REL));
    Ok(c)
}

fn determinism(s: &Session) -> Result<Criterion, LabError> {
    let mut c = Criterion::new(10, TITLES[9]);
    let render = || -> Result<Vec<String>, LabError> {
        let fresh = Session::new(&s.config)?;
        Ok(vec![commands::poles(&fresh)?, commands::probabilities(&fresh)?, commands::tailfit(&fresh, None)?])
    };
    let first = render()?;
    let second = render()?;
    let identical = first == second;
    c.checks.push(holds("poles, probabilities and tailfit artifacts rendered twice", None, "byte-identical", identical));
    Ok(c)
}

pub fn to_json(config: &RunConfig, results: &[Criterion]) -> String {
    let digits = config.output.precision;
    let criteria: Vec<Value> = results
        .iter()
        .map(|c| {
            json!({
                "id": c.id,
                "title": c.title,
                "passed": c.passed(),
                "checks": c.checks.iter().map(|k| json!({
                    "name": k.name,
                    "value": k.value.map_or(Value::Null, |v| json_number(v, digits)),
                    "limit": k.limit,
                    "passed": k.passed,
                })).collect::<Vec<_>>(),
                "notes": c.notes,
            })
        })
        .collect();
    let passed = results.iter().all(Criterion::passed);
    document(config, "acceptance", json!({ "passed": passed, "criteria": criteria }))
}
