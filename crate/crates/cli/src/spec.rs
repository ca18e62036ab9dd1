//! What a run computes, independent of how it was requested.

use std::path::PathBuf;

use clap::ValueEnum;
use stimemit::{EmitterKind, Method, Pulse, SystemParams};

use crate::error::{CliError, Result};
use crate::pulse_file;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmitterArg {
    Atom,
    Cavity,
    Classical,
}

impl From<EmitterArg> for EmitterKind {
    fn from(e: EmitterArg) -> Self {
        match e {
            EmitterArg::Atom => EmitterKind::Atom,
            EmitterArg::Cavity => EmitterKind::Cavity,
            EmitterArg::Classical => EmitterKind::ClassicalAncilla,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PulseArg {
    Exponential,
    HalfGaussian,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Analytic,
    Quadrature,
    Oracle,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Analytic => Method::ClosedForm,
            MethodArg::Quadrature => Method::Quadrature,
            MethodArg::Oracle => Method::Oracle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A sweep over log-spaced `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub emitter: EmitterArg,
    pub pulse: PulseArg,
    /// Sample file for [`PulseArg::Custom`].
    pub pulse_file: Option<PathBuf>,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_steps: usize,
    pub beta: f64,
    pub method: MethodArg,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub dx: Option<f64>,
    pub horizon: Option<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            emitter: EmitterArg::Atom,
            pulse: PulseArg::Exponential,
            pulse_file: None,
            alpha_min: 1e-2,
            alpha_max: 1e2,
            alpha_steps: 201,
            beta: 1.0,
            method: MethodArg::Analytic,
            out: None,
            format: Format::Csv,
            dx: None,
            horizon: None,
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::InvalidSpec(msg.into())
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_min > 0.0 && self.alpha_min.is_finite()) {
            return Err(invalid(format!("alpha-min must be positive, got {}", self.alpha_min)));
        }
        if !(self.alpha_max >= self.alpha_min && self.alpha_max.is_finite()) {
            return Err(invalid("alpha-max must not be below alpha-min"));
        }
        if self.alpha_steps == 0 {
            return Err(invalid("alpha-steps must be at least 1"));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(invalid(format!("beta must lie in (0, 1], got {}", self.beta)));
        }
        if let Some(dx) = self.dx {
            if !(dx > 0.0) {
                return Err(invalid(format!("dx must be positive, got {dx}")));
            }
        }
        if let Some(h) = self.horizon {
            if !(h > 0.0) {
                return Err(invalid(format!("horizon must be positive, got {h}")));
            }
        }
        match (self.pulse, &self.pulse_file) {
            (PulseArg::Custom, None) => return Err(invalid("custom pulse needs --pulse-file")),
            (PulseArg::Exponential | PulseArg::HalfGaussian, Some(_)) => {
                return Err(invalid("--pulse-file is only used with --pulse custom"))
            }
            _ => {}
        }
        let exponential = self.pulse == PulseArg::Exponential;
        match self.method {
            MethodArg::Analytic if !exponential => Err(invalid("closed forms exist only for the exponential pulse")),
            MethodArg::Analytic if self.beta < 1.0 => {
                Err(invalid("closed forms are lossless; use quadrature or oracle"))
            }
            MethodArg::Quadrature if !exponential => {
                Err(invalid("out-state quadrature exists only for the exponential pulse"))
            }
            MethodArg::Quadrature if self.emitter == EmitterArg::Cavity => Err(invalid(
                "out-state quadrature is implemented for the atom and the classical ancilla",
            )),
            MethodArg::Quadrature if self.emitter == EmitterArg::Classical && self.beta < 1.0 => {
                Err(invalid("the classical ancilla has no loss model"))
            }
            MethodArg::Oracle if self.emitter == EmitterArg::Classical => {
                Err(invalid("the classical ancilla has no quantum dynamics for the oracle"))
            }
            _ => Ok(()),
        }
    }

    pub fn params(&self) -> Result<SystemParams> {
        Ok(SystemParams::with_beta(self.emitter.into(), self.beta)?)
    }

    /// `alpha` values of the sweep. A custom pulse has a fixed shape, so its
    /// sweep has a single point labelled by the pulse's rate `1/width`.
    pub fn alphas(&self, custom: Option<&Pulse>) -> Vec<f64> {
        match custom {
            Some(p) => vec![p.width().recip()],
            None => stimemit::numerics::log_grid(self.alpha_min, self.alpha_max, self.alpha_steps),
        }
    }

    /// Loads the custom pulse once, if there is one.
    pub fn load_custom(&self) -> Result<Option<Pulse>> {
        match (&self.pulse, &self.pulse_file) {
            (PulseArg::Custom, Some(path)) => Ok(Some(pulse_file::load(path)?)),
            _ => Ok(None),
        }
    }

    /// The incident pulse at `alpha`, resonant with the emitter.
    pub fn pulse_at(&self, alpha: f64, custom: Option<&Pulse>, params: &SystemParams) -> Result<Pulse> {
        let pulse = match (self.pulse, custom) {
            (PulseArg::Exponential, _) => Pulse::exponential(alpha)?,
            (PulseArg::HalfGaussian, _) => Pulse::half_gaussian(alpha)?,
            (PulseArg::Custom, Some(p)) => p.clone(),
            (PulseArg::Custom, None) => return Err(invalid("custom pulse not loaded")),
        };
        Ok(pulse.with_carrier(params.omega))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_spec_is_valid() {
        assert!(SweepSpec::default().validate().is_ok());
        assert_eq!(SweepSpec::default().alphas(None).len(), 201);
    }

    #[test]
    fn rejects_inconsistent_requests() {
        let bad = [
            SweepSpec {
                alpha_min: 0.0,
                ..Default::default()
            },
            SweepSpec {
                alpha_max: 1e-3,
                ..Default::default()
            },
            SweepSpec {
                alpha_steps: 0,
                ..Default::default()
            },
            SweepSpec {
                beta: 1.5,
                ..Default::default()
            },
            SweepSpec {
                pulse: PulseArg::HalfGaussian,
                ..Default::default()
            },
            SweepSpec {
                pulse: PulseArg::Custom,
                method: MethodArg::Oracle,
                ..Default::default()
            },
            SweepSpec {
                beta: 0.9,
                ..Default::default()
            },
            SweepSpec {
                method: MethodArg::Quadrature,
                emitter: EmitterArg::Cavity,
                ..Default::default()
            },
            SweepSpec {
                method: MethodArg::Oracle,
                emitter: EmitterArg::Classical,
                ..Default::default()
            },
            SweepSpec {
                dx: Some(-1.0),
                method: MethodArg::Oracle,
                ..Default::default()
            },
        ];
        for spec in bad {
            assert!(matches!(spec.validate(), Err(CliError::InvalidSpec(_))), "{spec:?}");
        }
    }

    #[test]
    fn oracle_accepts_every_pulse() {
        let spec = SweepSpec {
            method: MethodArg::Oracle,
            pulse: PulseArg::HalfGaussian,
            ..Default::default()
        };
        assert!(spec.validate().is_ok());
    }
}
