//! Brute-force time evolution of the emitter and the waveguide field on a
//! grid of time bins.
//!
//! Independent of the closed forms: it handles arbitrary pulse shapes,
//! records the emitter excitation over time and treats non-guided loss as an
//! explicit decay channel.

mod collision;
mod propagators;

use num_complex::Complex64;

pub use propagators::CouplingAngle;

use crate::analytic;
use crate::error::{Error, Result};
use crate::model::{EmitterKind, LifetimeCurve, Method, OutcomeProbabilities, SystemParams};
use crate::numerics::neumaier_sum;
use crate::pulses::{Pulse, NORM_TOLERANCE};
use collision::{run_single_excitation, run_two_excitation};
use propagators::Propagators;

/// Largest emitter excitation tolerated at the end of a run.
pub const RESIDUAL_LIMIT: f64 = 1e-3;

/// Default bin width in units of `1/gamma`.
pub const DEFAULT_DX: f64 = 0.01;

/// Minimum free-decay time added after the pulse has passed.
pub const MIN_TAIL_TIME: f64 = 20.0;

/// Emission is dropped once the lone emitter amplitude has fallen by
/// `exp(-KEEP_DECAY / 2)`.
const KEEP_DECAY: f64 = 70.0;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub params: SystemParams,
    pub pulse: Pulse,
    /// Bin width, equal to the time step.
    pub dx: f64,
    /// Total evolution time.
    pub horizon: f64,
    pub angle: CouplingAngle,
}

fn pulse_rate(pulse: &Pulse) -> f64 {
    pulse.alpha().unwrap_or_else(|| pulse.width().recip())
}

impl OracleConfig {
    /// Config with the default resolution `min(0.01, width/10)` and horizon
    /// `30/min(1, alpha)` past the pulse support.
    pub fn new(params: SystemParams, pulse: Pulse) -> Self {
        let dx = DEFAULT_DX.min(pulse.width() / 10.0);
        let horizon = Self::default_horizon(&pulse);
        Self {
            params,
            pulse,
            dx,
            horizon,
            angle: CouplingAngle::default(),
        }
    }

    pub fn default_horizon(pulse: &Pulse) -> f64 {
        let (lo, hi) = pulse.support();
        30.0 / pulse_rate(pulse).min(1.0) + (hi - lo)
    }

    pub fn with_dx(self, dx: f64) -> Self {
        Self { dx, ..self }
    }

    pub fn with_horizon(self, horizon: f64) -> Self {
        Self { horizon, ..self }
    }

    pub fn with_angle(self, angle: CouplingAngle) -> Self {
        Self { angle, ..self }
    }

    pub fn validate(&self) -> Result<SystemParams> {
        let params = self.params.validate()?;
        if !(self.dx > 0.0 && self.dx.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "bin width must be positive, got {}",
                self.dx
            )));
        }
        let width = self.pulse.width();
        if self.dx > width / 10.0 {
            return Err(Error::ResolutionTooCoarse { dx: self.dx, width });
        }
        let (lo, hi) = self.pulse.support();
        if !(self.horizon >= hi - lo + MIN_TAIL_TIME) {
            return Err(Error::InvalidConfig(format!(
                "horizon {} shorter than pulse support {} plus {}",
                self.horizon,
                hi - lo,
                MIN_TAIL_TIME
            )));
        }
        let norm = self.pulse.norm_sqr()?;
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::UnnormalizedPulse { norm });
        }
        Ok(params)
    }

    pub fn n_bins(&self) -> usize {
        (self.horizon / self.dx).ceil() as usize
    }
}

/// Pulse amplitudes per input bin in the emitter's rotating frame, scaled
/// so that `sum |psi_m|^2 = 1`.
pub fn pulse_bins(pulse: &Pulse, params: &SystemParams, dx: f64, n_bins: usize) -> Vec<Complex64> {
    let detuning = pulse.carrier - params.omega;
    let scale = dx.sqrt().recip();
    let mut psi: Vec<Complex64> = (0..n_bins)
        .map(|m| pulse.bin_integral(-((m + 1) as f64) * dx, -(m as f64) * dx, detuning) * scale)
        .collect();
    let norm = neumaier_sum(psi.iter().map(|z| z.norm_sqr()));
    if norm > 0.0 {
        let s = norm.sqrt().recip();
        psi.iter_mut().for_each(|z| *z *= s);
    }
    psi
}

/// Full output of [`evolve_detailed`].
#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub probabilities: OutcomeProbabilities,
    pub lifetime: LifetimeCurve,
    /// Emitter excitation left at the horizon.
    pub residual: f64,
    /// Largest deviation of the bookkept total norm from 1 over the run.
    pub max_norm_drift: f64,
    /// Largest norm change within one step.
    pub max_step_drift: f64,
    pub n_bins: usize,
}

pub fn evolve_detailed(config: &OracleConfig) -> Result<Evolution> {
    let params = config.validate()?;
    let cavity = match params.emitter {
        EmitterKind::Atom => false,
        EmitterKind::Cavity => true,
        EmitterKind::ClassicalAncilla => {
            return Err(Error::Unsupported(
                "the classical ancilla has no quantum dynamics to evolve".into(),
            ))
        }
    };
    let n_bins = config.n_bins();
    let psi = pulse_bins(&config.pulse, &params, config.dx, n_bins);
    let u = Propagators::new(&params, config.dx, config.angle);
    let keep = (KEEP_DECAY / (params.gamma * config.dx)).ceil() as usize;
    log::debug!("oracle: {n_bins} bins, {} stored, dx {}", keep.min(n_bins), config.dx);
    let raw = run_two_excitation(&psi, &u, cavity, keep);

    let lifetime = LifetimeCurve::from_uniform(config.dx, raw.p_e);
    let residual = lifetime.final_excitation();
    if residual > RESIDUAL_LIMIT {
        return Err(Error::NotConverged { residual });
    }
    let loss = if params.is_lossless() { 0.0 } else { raw.leaked.max(0.0) };
    Ok(Evolution {
        probabilities: OutcomeProbabilities {
            p_rr: raw.p_rr,
            p_ll: raw.p_ll,
            p_rl: raw.p_rl,
            loss,
            method: Method::Oracle,
        },
        lifetime,
        residual,
        max_norm_drift: raw.max_norm_drift,
        max_step_drift: raw.max_step_drift,
        n_bins,
    })
}

/// Outcome probabilities and emitter lifetime for one incident pulse.
pub fn evolve(config: &OracleConfig) -> Result<(OutcomeProbabilities, LifetimeCurve)> {
    let ev = evolve_detailed(config)?;
    Ok((ev.probabilities, ev.lifetime))
}

/// Free decay of the excited emitter with no incident photon.
pub fn evolve_spontaneous(params: &SystemParams, dx: f64, horizon: f64, angle: CouplingAngle) -> Result<LifetimeCurve> {
    let params = params.validate()?;
    if !(dx > 0.0 && horizon > dx) {
        return Err(Error::InvalidConfig(format!(
            "need 0 < dx < horizon, got dx {dx}, horizon {horizon}"
        )));
    }
    let u = Propagators::new(&params, dx, angle);
    let survive = u.single[0][0].norm_sqr();
    let n = (horizon / dx).ceil() as usize;
    let p_e: Vec<f64> = (0..=n).map(|k| survive.powi(k as i32)).collect();
    let curve = LifetimeCurve::from_uniform(dx, p_e);
    let residual = curve.final_excitation();
    if residual > RESIDUAL_LIMIT {
        return Err(Error::NotConverged { residual });
    }
    Ok(curve)
}

/// Single-photon scattering off the relaxed emitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinglePhotonResult {
    pub reflection: f64,
    pub transmission: f64,
    pub loss: f64,
}

/// Scatters the configured pulse, taken as a single right-moving photon,
/// off the emitter in its ground state. Atom and cavity share this
/// response; the classical ancilla is rejected.
pub fn single_photon_check(config: &OracleConfig) -> Result<SinglePhotonResult> {
    let params = config.validate()?;
    if params.emitter == EmitterKind::ClassicalAncilla {
        return Err(Error::Unsupported("single-photon check needs a quantum emitter".into()));
    }
    let n_bins = config.n_bins();
    let psi = pulse_bins(&config.pulse, &params, config.dx, n_bins);
    let u = Propagators::new(&params, config.dx, config.angle);
    let (out, leaked_even) = run_single_excitation(&psi, &u.single);
    let reflection = 0.25 * neumaier_sum(out.iter().zip(&psi).map(|(o, p)| (o - p).norm_sqr()));
    let transmission = 0.25 * neumaier_sum(out.iter().zip(&psi).map(|(o, p)| (o + p).norm_sqr()));
    Ok(SinglePhotonResult {
        reflection,
        transmission,
        loss: 0.5 * leaked_even,
    })
}

/// Reflection probability of an exponential pulse of bandwidth `alpha`
/// centred at `detuning` from the emitter: the Lorentzian line
/// `|r_k|^2` averaged over the pulse spectrum.
pub fn exponential_reflection(alpha: f64, detuning: f64) -> f64 {
    let w = 0.5 * alpha + 0.5;
    0.5 * w / (detuning * detuning + w * w)
}

/// One row of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub dx: f64,
    pub probabilities: OutcomeProbabilities,
    /// Largest componentwise deviation from the closed form.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    /// `log2(e_k / e_{k+1})` for consecutive halvings.
    pub fn observed_orders(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| (w[0].error / w[1].error).log2() * (w[0].dx / w[1].dx).log2().recip())
            .collect()
    }

    /// True if every halving of `dx` at least halves the error, allowing
    /// 20% slack.
    pub fn at_least_first_order(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].error <= 1.2 * w[0].error * w[1].dx / w[0].dx)
    }
}

/// Runs the oracle at `dx, dx/2, ..., dx/2^refinements` and compares with
/// the closed form for an exponential pulse.
pub fn convergence_report(config: &OracleConfig, refinements: usize) -> Result<ConvergenceReport> {
    let alpha = match config.pulse.shape {
        crate::pulses::PulseShape::Exponential { alpha } => alpha,
        _ => {
            return Err(Error::Unsupported(
                "convergence study needs an exponential pulse".into(),
            ))
        }
    };
    let params = config.params.validate()?;
    if !params.is_lossless() {
        return Err(Error::Unsupported(
            "convergence study compares with lossless closed forms".into(),
        ));
    }
    let exact = analytic::probabilities(params.emitter, alpha)?;
    let rows = (0..=refinements)
        .map(|k| {
            let dx = config.dx / (1u64 << k) as f64;
            let (p, _) = evolve(&config.clone().with_dx(dx))?;
            Ok(ConvergenceRow {
                dx,
                probabilities: p,
                error: p.max_abs_diff(&exact),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport { rows })
}
