//! Sweeps, lifetime curves and amplitude dumps.

use rayon::prelude::*;
use serde::Serialize;
use stimemit::oracle::{self, OracleConfig};
use stimemit::outstate::{self, QuadratureOptions, Sector, TwoPhotonAmplitude};
use stimemit::{analytic, pulses, EmitterKind, Pulse, SystemParams};

use crate::error::{CliError, Result};
use crate::spec::{MethodArg, PulseArg, SweepSpec};

/// One `alpha` of a probability sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub p_rr: f64,
    pub p_ll: f64,
    pub p_rl: f64,
    pub loss: f64,
    pub f_factor: f64,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LifetimeRow {
    pub alpha: f64,
    pub gamma_tau: f64,
}

fn oracle_config(spec: &SweepSpec, params: SystemParams, pulse: Pulse) -> OracleConfig {
    let mut cfg = OracleConfig::new(params, pulse);
    if let Some(dx) = spec.dx {
        cfg = cfg.with_dx(dx);
    }
    if let Some(h) = spec.horizon {
        cfg = cfg.with_horizon(h);
    }
    cfg
}

fn sweep_point(spec: &SweepSpec, params: &SystemParams, custom: Option<&Pulse>, alpha: f64) -> Result<SweepRow> {
    let pulse = spec.pulse_at(alpha, custom, params)?;
    let (p, f_factor) = match spec.method {
        MethodArg::Analytic => (
            analytic::probabilities(params.emitter, alpha)?,
            analytic::indistinguishability(alpha),
        ),
        MethodArg::Quadrature if params.emitter == EmitterKind::ClassicalAncilla => (
            analytic::classical_spectral(alpha, 1e-12)?,
            pulses::overlap_f(&pulse, params)?,
        ),
        MethodArg::Quadrature => {
            let r = outstate::reconstruct(alpha, params, QuadratureOptions::default())?;
            (r.probabilities, r.f_factor)
        }
        MethodArg::Oracle => {
            let (p, _) = oracle::evolve(&oracle_config(spec, *params, pulse.clone()))?;
            (p, pulses::overlap_f(&pulse, params)?)
        }
    };
    Ok(SweepRow {
        alpha,
        p_rr: p.p_rr,
        p_ll: p.p_ll,
        p_rl: p.p_rl,
        loss: p.loss,
        f_factor,
        method: p.method.to_string(),
    })
}

/// Outcome probabilities on the sweep's `alpha` grid, computed concurrently
/// and returned in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let params = spec.params()?;
    let custom = spec.load_custom()?;
    let alphas = spec.alphas(custom.as_ref());
    alphas
        .par_iter()
        .map(|&a| sweep_point(spec, &params, custom.as_ref(), a))
        .collect()
}

/// Integrated emitter excitation on the `alpha` grid; oracle only.
pub fn run_lifetime(spec: &SweepSpec) -> Result<Vec<LifetimeRow>> {
    spec.validate()?;
    if spec.method != MethodArg::Oracle {
        return Err(CliError::InvalidSpec(
            "lifetimes are computed by the oracle; pass --method oracle".into(),
        ));
    }
    let params = spec.params()?;
    let custom = spec.load_custom()?;
    let alphas = spec.alphas(custom.as_ref());
    alphas
        .par_iter()
        .map(|&alpha| {
            let pulse = spec.pulse_at(alpha, custom.as_ref(), &params)?;
            let (_, curve) = oracle::evolve(&oracle_config(spec, params, pulse))?;
            Ok(LifetimeRow {
                alpha,
                gamma_tau: curve.tau,
            })
        })
        .collect()
}

/// Grid for an amplitude dump.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSpec {
    pub sector: Sector,
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
    /// Half-width of the window: `x_c - t` in `[-extent, 0]`, `x_d` in
    /// `[-extent, extent]`. Defaults to `10 / min(1, alpha)`.
    pub extent: Option<f64>,
    pub points: usize,
}

pub fn run_amplitudes(spec: &AmplitudeSpec, pulse: PulseArg) -> Result<TwoPhotonAmplitude> {
    if pulse != PulseArg::Exponential {
        return Err(CliError::InvalidSpec(
            "out-state amplitudes are known for the exponential pulse only".into(),
        ));
    }
    if !(spec.alpha > 0.0) {
        return Err(CliError::InvalidSpec(format!(
            "alpha must be positive, got {}",
            spec.alpha
        )));
    }
    let params = SystemParams::with_beta(EmitterKind::Atom, spec.beta)?.with_omega(spec.omega);
    let extent = spec.extent.unwrap_or(10.0 / spec.alpha.min(1.0));
    if !(extent > 0.0) {
        return Err(CliError::InvalidSpec(format!("extent must be positive, got {extent}")));
    }
    Ok(TwoPhotonAmplitude::sample(
        spec.sector,
        spec.alpha,
        &params,
        (-extent, 0.0),
        spec.points,
        (-extent, extent),
        spec.points,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::EmitterArg;

    #[test]
    fn analytic_sweep_hits_two_thirds() {
        let spec = SweepSpec {
            alpha_min: 0.5,
            alpha_max: 8.0,
            alpha_steps: 5,
            ..Default::default()
        };
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 5);
        let at_two = rows.iter().find(|r| (r.alpha - 2.0).abs() < 1e-12).unwrap();
        assert!((at_two.p_rr - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(at_two.method, "analytic");
        assert!((at_two.f_factor - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn classical_reflection_column_is_constant() {
        for method in [MethodArg::Analytic, MethodArg::Quadrature] {
            let spec = SweepSpec {
                emitter: EmitterArg::Classical,
                method,
                alpha_steps: 11,
                ..Default::default()
            };
            assert!(run_sweep(&spec).unwrap().iter().all(|r| r.p_rl == 0.5));
        }
    }

    #[test]
    fn quadrature_sweep_matches_closed_form() {
        let spec = SweepSpec {
            method: MethodArg::Quadrature,
            alpha_min: 0.5,
            alpha_max: 4.0,
            alpha_steps: 4,
            ..Default::default()
        };
        for r in run_sweep(&spec).unwrap() {
            let exact = analytic::atom_probabilities(r.alpha).unwrap();
            assert!((r.p_rr - exact.p_rr).abs() < 1e-6);
            assert_eq!(r.method, "quadrature");
        }
    }

    #[test]
    fn lifetime_requires_oracle() {
        assert!(matches!(
            run_lifetime(&SweepSpec::default()),
            Err(CliError::InvalidSpec(_))
        ));
    }

    #[test]
    fn amplitude_dump_shape() {
        let spec = AmplitudeSpec {
            sector: Sector::EE,
            alpha: 2.0,
            beta: 1.0,
            omega: 0.0,
            extent: Some(4.0),
            points: 9,
        };
        let g = run_amplitudes(&spec, PulseArg::Exponential).unwrap();
        assert_eq!(g.values.len(), 81);
        assert!(run_amplitudes(&spec, PulseArg::HalfGaussian).is_err());
    }
}
