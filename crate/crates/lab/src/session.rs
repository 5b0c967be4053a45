//! The shared computation behind every subcommand.

use gamow_core::basis::ResonantFamily;
use gamow_core::model::{BoxMode, ShellModel};
use gamow_core::poles::{find_poles, Pole};
use gamow_core::propagation::{Expansion, TailCorrection};

use crate::config::RunConfig;

#[derive(Debug, Clone)]
pub struct Session {
    pub config: RunConfig,
    pub model: ShellModel,
    pub psi0: BoxMode,
    pub poles: Vec<Pole>,
    pub expansion: Expansion<BoxMode>,
}

impl Session {
    pub fn new(config: &RunConfig) -> gamow_core::Result<Self> {
        let model = config.model()?;
        let psi0 = config.initial_state()?;
        let poles = find_poles(&model, config.truncation_n)?;
        let family = ResonantFamily::new(&model, &poles)?;
        let expansion = Expansion::new(family, psi0, TailCorrection::SumRule)?;
        Ok(Self { config: config.clone(), model, psi0, poles, expansion })
    }

    /// Lifetime `1/Γ_1` of the slowest resonance.
    pub fn lifetime(&self) -> f64 {
        1.0 / self.expansion.leading_width()
    }
}
