//! The delta-shell system and the states it starts from.

#[allow(unused_imports)]
use num_traits::Float;
use core::f64::consts::PI;


use crate::{Error, Result};

/// Repulsive s-wave delta shell `V(r) = λ δ(r − R)` on the half line with
/// `ψ(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellModel {
    lambda: f64,
    radius: f64,
}

impl ShellModel {
    pub const DEFAULT_LAMBDA: f64 = 6.0;
    pub const DEFAULT_RADIUS: f64 = 1.0;

    /// Validates and builds a model. Attractive or free shells are rejected
    /// since they bring bound or virtual states the pole family ignores.
    pub fn new(lambda: f64, radius: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::NonPositiveStrength(lambda));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::NonPositiveRadius(radius));
        }
        Ok(Self { lambda, radius })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub(crate) fn check_inside(&self, r: f64) -> Result<()> {
        if (0.0..=self.radius).contains(&r) {
            Ok(())
        } else {
            Err(Error::OutOfRange { value: r, radius: self.radius })
        }
    }
}

impl Default for ShellModel {
    fn default() -> Self {
        Self { lambda: Self::DEFAULT_LAMBDA, radius: Self::DEFAULT_RADIUS }
    }
}

/// A real initial wavefunction confined to `[0, R]`.
pub trait InitialState {
    /// Radius of the region the state is supported on.
    fn radius(&self) -> f64;

    /// Amplitude at `r`; zero outside `[0, R]`.
    fn eval(&self, r: f64) -> f64;
}

/// Normalized closed-box mode `sqrt(2/R) sin(mπr/R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxMode {
    mode: u32,
    radius: f64,
}

impl BoxMode {
    pub fn new(model: &ShellModel, mode: i64) -> Result<Self> {
        if mode < 1 || mode > i64::from(u32::MAX) {
            return Err(Error::InvalidMode(mode));
        }
        Ok(Self { mode: mode as u32, radius: model.radius() })
    }

    pub fn mode(&self) -> u32 {
        self.mode
    }

    /// Wavenumber `mπ/R` of the mode.
    pub fn wavenumber(&self) -> f64 {
        f64::from(self.mode) * PI / self.radius
    }

    pub fn amplitude(&self) -> f64 {
        (2.0 / self.radius).sqrt()
    }
}

impl InitialState for BoxMode {
    fn radius(&self) -> f64 {
        self.radius
    }

    fn eval(&self, r: f64) -> f64 {
        if !(0.0..=self.radius).contains(&r) || r == self.radius {
            return 0.0;
        }
        self.amplitude() * (self.wavenumber() * r).sin()
    }
}

/// Box mode `m` of the model's shell radius.
pub fn initial_state_box_mode(model: &ShellModel, m: i64) -> Result<BoxMode> {
    BoxMode::new(model, m)
}
