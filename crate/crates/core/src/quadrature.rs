//! Gauss–Legendre panels and a globally adaptive bisection driver.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// Fixed-order Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are the roots of `P_n`, found by Newton from the Tricomi guess.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Single-panel estimate of `∫_a^b f`.
    pub fn integrate<F>(&self, a: f64, b: f64, mut f: F) -> Complex64
    where
        F: FnMut(f64) -> Complex64,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Acceptance threshold `max(abs, rel·|I|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Self { abs, rel: 0.0 }
    }

    pub fn relative(rel: f64) -> Self {
        Self { abs: 0.0, rel }
    }
}

/// Globally adaptive Gauss–Legendre quadrature.
///
/// The panel with the largest error estimate (coarse panel versus its two
/// halves) is split until the summed estimate meets the tolerance. A panel
/// whose estimate is already at rounding level is frozen.
#[derive(Debug, Clone)]
pub struct AdaptiveQuadrature {
    rule: GaussLegendre,
    tol: Tolerance,
    max_depth: u32,
}

struct Panel {
    a: f64,
    b: f64,
    depth: u32,
    value: Complex64,
    err: f64,
}

impl AdaptiveQuadrature {
    pub const DEFAULT_ORDER: usize = 20;
    pub const DEFAULT_DEPTH: u32 = 30;

    pub fn new(order: usize, tol: Tolerance, max_depth: u32) -> Self {
        Self { rule: GaussLegendre::new(order), tol, max_depth }
    }

    /// 20-point panels, absolute tolerance 1e-12, depth 30.
    pub fn standard() -> Self {
        Self::new(Self::DEFAULT_ORDER, Tolerance::absolute(1e-12), Self::DEFAULT_DEPTH)
    }

    pub fn with_tolerance(&self, tol: Tolerance) -> Self {
        Self { rule: self.rule.clone(), tol, max_depth: self.max_depth }
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn integrate<F>(&self, a: f64, b: f64, mut f: F) -> Result<Complex64>
    where
        F: FnMut(f64) -> Complex64,
    {
        if a == b {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let mut panels = Vec::new();
        panels.push(self.panel(a, b, 0, &mut f));
        loop {
            let total: Complex64 = panels.iter().map(|p| p.value).sum();
            let err: f64 = panels.iter().map(|p| p.err).sum();
            let target = self.tol.abs.max(self.tol.rel * total.norm());
            let rounding = 64.0 * f64::EPSILON * total.norm();
            if err <= target || err <= rounding {
                return Ok(total);
            }
            let worst = panels
                .iter()
                .enumerate()
                .filter(|(_, p)| p.depth < self.max_depth && p.err > 16.0 * f64::EPSILON * p.value.norm())
                .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
                .map(|(i, _)| i);
            let Some(i) = worst else {
                // Nothing left to split; accept if the residual error is only rounding
                // noise spread over many panels.
                let noise: f64 = panels.iter().map(|p| 64.0 * f64::EPSILON * p.value.norm()).sum();
                if err <= target.max(noise) {
                    return Ok(total);
                }
                return Err(Error::QuadratureFailure { estimate: err });
            };
            let p = panels.swap_remove(i);
            let mid = 0.5 * (p.a + p.b);
            panels.push(self.panel(p.a, mid, p.depth + 1, &mut f));
            panels.push(self.panel(mid, p.b, p.depth + 1, &mut f));
        }
    }

    pub fn integrate_real<F>(&self, a: f64, b: f64, mut f: F) -> Result<f64>
    where
        F: FnMut(f64) -> f64,
    {
        self.integrate(a, b, |x| Complex64::new(f(x), 0.0)).map(|z| z.re)
    }

    fn panel<F>(&self, a: f64, b: f64, depth: u32, f: &mut F) -> Panel
    where
        F: FnMut(f64) -> Complex64,
    {
        let mid = 0.5 * (a + b);
        let coarse = self.rule.integrate(a, b, &mut *f);
        let fine = self.rule.integrate(a, mid, &mut *f) + self.rule.integrate(mid, b, &mut *f);
        Panel { a, b, depth, value: fine, err: (fine - coarse).norm() }
    }
}

impl Default for AdaptiveQuadrature {
    fn default() -> Self {
        Self::standard()
    }
}
