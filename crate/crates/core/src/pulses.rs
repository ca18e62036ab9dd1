//! Incident single-photon wavefunctions and the spontaneously emitted
//! reference photon.
//!
//! Pulses live on `x <= 0` and move right at unit speed, so the front
//! reaches the emitter at `t = 0` and `psi(-t)` is the amplitude arriving at
//! time `t`. Built-in shapes are parameterized by `alpha`, the ratio of the
//! pulse bandwidth to the emitter decay rate.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::numerics::{integrate_1d, neumaier_sum};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Tolerance on the squared norm of a pulse fed to the overlap engines.
pub const NORM_TOLERANCE: f64 = 1e-8;

/// Relative norm deviation above which renormalizing a custom pulse is
/// reported as a warning.
pub const RENORMALIZE_WARN: f64 = 1e-6;

/// Tail probability beyond the truncated support of a built-in pulse.
pub const SUPPORT_TAIL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum PulseShape {
    /// `i sqrt(alpha) exp(alpha x / 2)` for `x <= 0`: a Lorentzian line of
    /// width `alpha`; `alpha = 1` is the spontaneously emitted photon.
    Exponential { alpha: f64 },
    /// `(2 alpha^2 / pi)^(1/4) exp(-alpha^2 x^2 / 4)` for `x <= 0`.
    HalfGaussian { alpha: f64 },
    /// Uniformly sampled envelope, linearly interpolated. The last sample
    /// sits at `x = 0`, the first at `-(n - 1) dx`.
    Custom { dx: f64, samples: Vec<Complex64> },
}

/// An incident single-photon wavefunction: an envelope times a carrier
/// `exp(i carrier x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pulse {
    pub shape: PulseShape,
    pub carrier: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveAlpha(alpha))
    }
}

impl Pulse {
    pub fn exponential(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            shape: PulseShape::Exponential { alpha },
            carrier: 0.0,
        })
    }

    /// Half-Gaussian pulse; its closed-form normalization is checked by
    /// quadrature on construction.
    pub fn half_gaussian(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let pulse = Self {
            shape: PulseShape::HalfGaussian { alpha },
            carrier: 0.0,
        };
        let norm = pulse.norm_sqr()?;
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::UnnormalizedPulse { norm });
        }
        Ok(pulse)
    }

    /// Custom pulse from raw samples, stored as given. See
    /// [`Pulse::normalized`].
    pub fn custom(dx: f64, samples: Vec<Complex64>) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::InvalidPulse(format!("grid spacing must be positive, got {dx}")));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidPulse("need at least two samples".into()));
        }
        if samples.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidPulse("non-finite sample".into()));
        }
        Ok(Self {
            shape: PulseShape::Custom { dx, samples },
            carrier: 0.0,
        })
    }

    /// Samples `template` on a uniform grid of spacing `dx` covering its
    /// support.
    pub fn sampled_from(template: &Pulse, dx: f64) -> Result<Self> {
        let (lo, _) = template.support();
        let n = (-lo / dx).ceil() as usize + 1;
        let samples = (0..n).map(|j| template.envelope(-((n - 1 - j) as f64) * dx)).collect();
        Ok(Self {
            carrier: template.carrier,
            ..Self::custom(dx, samples)?
        })
    }

    pub fn with_carrier(self, carrier: f64) -> Self {
        Self { carrier, ..self }
    }

    /// Rescales a custom pulse to unit norm. Returns the pulse and its
    /// squared norm before rescaling; deviations above
    /// [`RENORMALIZE_WARN`] are logged.
    pub fn normalized(self) -> Result<(Self, f64)> {
        let norm = self.norm_sqr()?;
        if !(norm > 0.0) {
            return Err(Error::InvalidPulse("pulse has zero norm".into()));
        }
        match self.shape {
            PulseShape::Custom { dx, samples } => {
                if (norm - 1.0).abs() > RENORMALIZE_WARN {
                    log::warn!("custom pulse squared norm {norm:.9} deviates from 1; renormalizing");
                }
                let s = norm.sqrt().recip();
                let samples = samples.into_iter().map(|z| z * s).collect();
                Ok((
                    Self {
                        shape: PulseShape::Custom { dx, samples },
                        carrier: self.carrier,
                    },
                    norm,
                ))
            }
            shape => Ok((
                Self {
                    shape,
                    carrier: self.carrier,
                },
                norm,
            )),
        }
    }

    /// Bandwidth parameter of a built-in shape.
    pub fn alpha(&self) -> Option<f64> {
        match self.shape {
            PulseShape::Exponential { alpha } | PulseShape::HalfGaussian { alpha } => Some(alpha),
            PulseShape::Custom { .. } => None,
        }
    }

    /// Slowly varying part of the wavefunction, without the carrier.
    pub fn envelope(&self, x: f64) -> Complex64 {
        if x > 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match &self.shape {
            PulseShape::Exponential { alpha } => I * alpha.sqrt() * (0.5 * alpha * x).exp(),
            PulseShape::HalfGaussian { alpha } => {
                let c = (2.0 * alpha * alpha / PI).powf(0.25);
                Complex64::new(c * (-alpha * alpha * x * x / 4.0).exp(), 0.0)
            }
            PulseShape::Custom { dx, samples } => {
                let n = samples.len();
                let pos = (n - 1) as f64 + x / dx;
                if pos < 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let j = (pos.floor() as usize).min(n - 2);
                let t = pos - j as f64;
                samples[j] * (1.0 - t) + samples[j + 1] * t
            }
        }
    }

    /// `psi(x)`: total function, zero for `x > 0`.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        if x > 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.envelope(x) * Complex64::new(0.0, self.carrier * x).exp()
    }

    /// Interval outside which the pulse carries less than
    /// [`SUPPORT_TAIL`] probability (exactly zero for custom pulses).
    pub fn support(&self) -> (f64, f64) {
        match &self.shape {
            PulseShape::Exponential { alpha } => (SUPPORT_TAIL.ln() / alpha, 0.0),
            // erfc(alpha L / sqrt 2) < 1e-12 for alpha L > 7.14
            PulseShape::HalfGaussian { alpha } => (-7.5 / alpha, 0.0),
            PulseShape::Custom { dx, samples } => (-((samples.len() - 1) as f64) * dx, 0.0),
        }
    }

    /// Temporal width used to judge discretizations: `1/alpha` for the
    /// built-ins, the RMS duration of `|psi|^2` for custom pulses.
    pub fn width(&self) -> f64 {
        match &self.shape {
            PulseShape::Exponential { alpha } | PulseShape::HalfGaussian { alpha } => alpha.recip(),
            PulseShape::Custom { dx, samples } => {
                let n = samples.len();
                let w: Vec<f64> = samples.iter().map(|z| z.norm_sqr()).collect();
                let total = neumaier_sum(w.iter().copied());
                if total == 0.0 {
                    return *dx;
                }
                let x = |j: usize| -((n - 1 - j) as f64) * dx;
                let mean = neumaier_sum(w.iter().enumerate().map(|(j, p)| p * x(j))) / total;
                let var = neumaier_sum(w.iter().enumerate().map(|(j, p)| p * (x(j) - mean).powi(2))) / total;
                var.sqrt().max(*dx)
            }
        }
    }

    /// `∫|psi|^2 dx`: exact for exponential and custom pulses, adaptive
    /// quadrature for the half-Gaussian.
    pub fn norm_sqr(&self) -> Result<f64> {
        match &self.shape {
            PulseShape::Exponential { .. } => Ok(1.0),
            PulseShape::HalfGaussian { alpha } => {
                let hi = 40.0 / alpha;
                let r = integrate_1d(
                    |x| Complex64::new(self.envelope(x).norm_sqr(), 0.0),
                    &[-hi, -hi / 4.0, -hi / 16.0, 0.0],
                    1e-14,
                    1 << 20,
                )?;
                Ok(r.value.re)
            }
            PulseShape::Custom { dx, samples } => Ok(neumaier_sum(samples.windows(2).map(|w| {
                let (a, b) = (w[0], w[1]);
                dx * (a.norm_sqr() + b.norm_sqr() + (a * b.conj()).re) / 3.0
            }))),
        }
    }

    /// `∫_a^b envelope(x) exp(i detuning x) dx` over `a < b <= 0`.
    pub fn bin_integral(&self, a: f64, b: f64, detuning: f64) -> Complex64 {
        let b = b.min(0.0);
        if a >= b {
            return Complex64::new(0.0, 0.0);
        }
        match &self.shape {
            PulseShape::Exponential { alpha } => {
                let z = Complex64::new(0.5 * alpha, detuning);
                let rel = |x: f64| (z * x).exp();
                // (e^{zb} - e^{za}) / z without cancellation for short bins
                let h = b - a;
                let small = (z * h).norm() < 1e-4;
                let diff = if small {
                    let zh = z * h;
                    rel(a) * h * (1.0 + zh / 2.0 + zh * zh / 6.0)
                } else {
                    (rel(b) - rel(a)) / z
                };
                I * alpha.sqrt() * diff
            }
            PulseShape::HalfGaussian { .. } => {
                gk15_sum(|x| self.envelope(x) * Complex64::new(0.0, detuning * x).exp(), a, b)
            }
            PulseShape::Custom { dx, samples } => {
                let lo = -((samples.len() - 1) as f64) * dx;
                let (a, b) = (a.max(lo), b);
                if a >= b {
                    return Complex64::new(0.0, 0.0);
                }
                // split at sample nodes so every piece is linear
                let first = ((a - lo) / dx).floor() as usize + 1;
                let mut cuts = vec![a];
                let mut j = first;
                while lo + j as f64 * dx < b {
                    cuts.push(lo + j as f64 * dx);
                    j += 1;
                }
                cuts.push(b);
                let f = |x: f64| self.envelope(x) * Complex64::new(0.0, detuning * x).exp();
                let parts: Vec<Complex64> = cuts.windows(2).map(|w| gk15_sum(f, w[0], w[1])).collect();
                Complex64::new(
                    neumaier_sum(parts.iter().map(|z| z.re)),
                    neumaier_sum(parts.iter().map(|z| z.im)),
                )
            }
        }
    }
}

/// Plain (non-adaptive) 15-point Kronrod sum on `[a, b]`.
fn gk15_sum<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64) -> Complex64 {
    const X: [f64; 8] = [
        0.991_455_371_120_812_6,
        0.949_107_912_342_758_5,
        0.864_864_423_359_769_1,
        0.741_531_185_599_394_4,
        0.586_087_235_467_691_1,
        0.405_845_151_377_397_2,
        0.207_784_955_007_898_5,
        0.0,
    ];
    const W: [f64; 8] = [
        0.022_935_322_010_529_22,
        0.063_092_092_629_978_55,
        0.104_790_010_322_250_18,
        0.140_653_259_715_525_92,
        0.169_004_726_639_267_9,
        0.190_350_578_064_785_4,
        0.204_432_940_075_298_9,
        0.209_482_141_084_727_83,
    ];
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = f(c) * W[7];
    for j in 0..7 {
        s += (f(c - h * X[j]) + f(c + h * X[j])) * W[j];
    }
    s * h
}

/// Wavefunction of the photon spontaneously emitted by the excited emitter,
/// `i sqrt(gamma) exp(i (omega - i (gamma + gamma_ng)/2) x)` on `x <= 0`.
/// With non-guided loss its squared norm is `beta`, not 1.
pub fn spontaneous_wavefunction(params: &SystemParams, x: f64) -> Complex64 {
    if x > 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let k = Complex64::new(params.omega, -0.5 * params.total_decay());
    I * params.gamma.sqrt() * (I * k * x).exp()
}

/// Inner product `∫ psi*(x) phi_sp(x) dx` by adaptive quadrature, with
/// positions in units of `v_g / Gamma`.
pub fn overlap(pulse: &Pulse, params: &SystemParams) -> Result<Complex64> {
    let params = &params.validate()?;
    let norm = pulse.norm_sqr()?;
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::UnnormalizedPulse { norm });
    }
    // Built-in integrands decay at least as exp(min(1, alpha) x), so the
    // truncation error at 40/min(1, alpha) is far below double precision.
    let (lo, hi) = match pulse.alpha() {
        Some(alpha) => (-40.0 / alpha.min(1.0), 0.0),
        None => pulse.support(),
    };
    let mut breaks: Vec<f64> = match &pulse.shape {
        PulseShape::Custom { samples, .. } => {
            let chunks = (samples.len() / 64).clamp(1, 4096);
            (0..=chunks)
                .map(|k| lo + (hi - lo) * k as f64 / chunks as f64)
                .collect()
        }
        _ => vec![lo, lo / 4.0, lo / 16.0, lo / 64.0, hi],
    };
    breaks.dedup();
    let r = integrate_1d(
        |x| pulse.evaluate(x).conj() * spontaneous_wavefunction(params, x),
        &breaks,
        1e-13,
        1 << 22,
    )?;
    Ok(r.value)
}

/// Photon indistinguishability factor `|∫ psi* phi_sp|^2`.
pub fn overlap_f(pulse: &Pulse, params: &SystemParams) -> Result<f64> {
    Ok(overlap(pulse, params)?.norm_sqr())
}
