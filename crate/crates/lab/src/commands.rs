//! Subcommands. Each returns the artifact text; writing it is the caller's
//! business.

use gamow_core::basis::{diagnostics, interior_grid, normalize};
use gamow_core::crank_nicolson::{oracle_probabilities, propagate_cn};
use gamow_core::propagation::{ProbabilitySeries, TimeGrid};
use gamow_core::tail::{local_slopes, select_tail_window, tail_slope_in_window, SlopeEstimate};
use serde_json::{json, Value};

use crate::acceptance;
use crate::config::RunConfig;
use crate::output::{document, json_number, Cell, Table};
use crate::session::Session;

/// Truncations reported by `sumrules` (those not above `truncation_N`,
/// plus `truncation_N` itself).
pub const SUMRULE_TRUNCATIONS: [usize; 4] = [5, 10, 20, 50];

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error(transparent)]
    Module(#[from] gamow_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Series a tail fit can target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Series {
    S,
    P,
    /// The Green-function remainder at the first probe.
    G,
}

impl Series {
    pub fn label(self) -> &'static str {
        match self {
            Series::S => "S",
            Series::P => "P",
            Series::G => "green_remainder",
        }
    }

    fn values(self, s: &ProbabilitySeries) -> (&[f64], &[f64]) {
        match self {
            Series::S => (&s.survival, &s.survival_exp_ratio),
            Series::P => (&s.nonescape, &s.nonescape_exp_ratio),
            Series::G => (&s.green_remainder, &s.green_exp_ratio),
        }
    }
}

/// Fit over the automatically selected late window.
pub fn fit_series(series: &ProbabilitySeries, which: Series) -> gamow_core::Result<SlopeEstimate> {
    let (values, ratios) = which.values(series);
    let window = select_tail_window(&series.times, ratios)?;
    tail_slope_in_window(&series.times, values, window)
}

pub fn poles(session: &Session) -> Result<String, LabError> {
    let mut t = Table::new(&["n", "re_k", "im_k", "residual", "iterations", "re_A", "im_A"]);
    for p in &session.poles {
        let s = normalize(&session.model, p)?;
        t.push(vec![
            Cell::Int(i64::from(p.index)),
            Cell::Num(p.k.re),
            Cell::Num(p.k.im),
            Cell::Num(p.residual),
            Cell::Int(i64::from(p.iterations)),
            Cell::Num(s.amplitude().re),
            Cell::Num(s.amplitude().im),
        ]);
    }
    Ok(t.render(&session.config))
}

pub fn sumrules(session: &Session) -> Result<String, LabError> {
    let n_max = session.config.truncation_n;
    let mut ns: Vec<usize> = SUMRULE_TRUNCATIONS.iter().copied().filter(|&n| n < n_max).collect();
    ns.push(n_max);
    let grid = interior_grid(&session.model, 101);
    let e = &session.expansion;
    let mut t = Table::new(&[
        "N",
        "r",
        "rp",
        "re_sum_rule",
        "im_sum_rule",
        "abs_sum_rule",
        "f_sup",
        "re_delta",
        "im_delta",
        "term_mass",
        "delta_over_mass",
    ]);
    for &probe in &session.config.probes {
        for &n in &ns {
            let d = diagnostics(e.family(), e.coefficients(), n, probe, &grid)?;
            t.push(vec![
                Cell::Int(n as i64),
                Cell::Num(probe.0),
                Cell::Num(probe.1),
                Cell::Num(d.sum_rule_value.re),
                Cell::Num(d.sum_rule_value.im),
                Cell::Num(d.sum_rule_value.norm()),
                Cell::Num(d.f_sup_norm),
                Cell::Num(d.delta_value.re),
                Cell::Num(d.delta_value.im),
                Cell::Num(d.term_mass),
                Cell::Num(d.delta_over_mass()),
            ]);
        }
    }
    Ok(t.render(&session.config))
}

pub fn series(session: &Session) -> gamow_core::Result<ProbabilitySeries> {
    session.expansion.series(&session.config.time_grid()?, session.config.probe())
}

pub fn probabilities(session: &Session) -> Result<String, LabError> {
    let s = series(session)?;
    let slope_s = local_slopes(&s.times, &s.survival);
    let slope_p = local_slopes(&s.times, &s.nonescape);
    let mut t = Table::new(&["t", "S", "P", "remainder", "local_slope_S", "local_slope_P"]);
    for i in 0..s.times.len() {
        t.push(vec![
            Cell::Num(s.times[i]),
            Cell::Num(s.survival[i]),
            Cell::Num(s.nonescape[i]),
            Cell::Num(s.green_remainder[i]),
            Cell::Num(slope_s[i]),
            Cell::Num(slope_p[i]),
        ]);
    }
    Ok(t.render(&session.config))
}

pub fn fit_json(which: Series, fit: &SlopeEstimate, digits: usize) -> Value {
    json!({
        "series": which.label(),
        "window": [json_number(fit.window.0, digits), json_number(fit.window.1, digits)],
        "slope": json_number(fit.slope, digits),
        "stderr": json_number(fit.slope_stderr, digits),
        "samples": fit.samples,
    })
}

/// JSON regardless of the configured format.
pub fn tailfit(session: &Session, which: Option<Series>) -> Result<String, LabError> {
    let s = series(session)?;
    let targets: Vec<Series> = match which {
        Some(w) => vec![w],
        None => vec![Series::S, Series::P, Series::G],
    };
    let digits = session.config.output.precision;
    let mut fits = Vec::new();
    for w in targets {
        fits.push(fit_json(w, &fit_series(&s, w)?, digits));
    }
    Ok(document(&session.config, "fits", Value::Array(fits)))
}

/// Sample times over the validation horizon, `0` included.
pub fn oracle_times(session: &Session) -> gamow_core::Result<TimeGrid> {
    let horizon = session.config.oracle.horizon_lifetimes * session.lifetime();
    TimeGrid::linear(horizon, session.config.oracle.samples)
}

pub fn oracle_compare(session: &Session) -> Result<String, LabError> {
    let grid = session.config.grid()?;
    let times = oracle_times(session)?;
    let fields = propagate_cn(&session.model, &session.psi0, &grid, &times.samples)?;
    let samples = oracle_probabilities(&fields, &session.psi0, session.model.radius());
    let mut t = Table::new(&["t", "P_cn", "P_expansion", "rel_diff", "S_cn", "S_expansion"]);
    for s in samples {
        let p = session.expansion.nonescape(s.time)?.quadrature;
        let sv = session.expansion.survival(s.time)?.quadrature;
        t.push(vec![
            Cell::Num(s.time),
            Cell::Num(s.nonescape),
            Cell::Num(p),
            Cell::Num((s.nonescape - p).abs() / p),
            Cell::Num(s.survival),
            Cell::Num(sv),
        ]);
    }
    Ok(t.render(&session.config))
}

/// Acceptance summary and whether every criterion passed.
pub fn report(config: &RunConfig) -> Result<(String, bool), LabError> {
    let results = acceptance::run_all(config)?;
    let passed = results.iter().all(|c| c.passed());
    Ok((acceptance::to_json(config, &results), passed))
}
