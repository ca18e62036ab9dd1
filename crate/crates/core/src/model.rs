//! Unit conventions and the value types shared by every engine.
//!
//! All quantities are expressed in the emitter's natural units: the guided
//! decay rate `gamma` is scaled to 1, the group velocity is identically 1, so
//! times are in units of `1/gamma` and lengths in units of `v_g/gamma`.

use std::fmt;

use crate::error::{Error, Result};

/// What sits at `x = 0` on the waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EmitterKind {
    /// Two-level atom: at most one excitation.
    Atom,
    /// Side-coupled single-mode cavity: harmonic ladder.
    Cavity,
    /// Fictitious scatterer with the atom's intensity response but no
    /// quantum interference.
    ClassicalAncilla,
}

impl fmt::Display for EmitterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EmitterKind::Atom => "atom",
            EmitterKind::Cavity => "cavity",
            EmitterKind::ClassicalAncilla => "classical",
        })
    }
}

/// Emitter and waveguide parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub emitter: EmitterKind,
    /// Decay rate into the guided mode, `V^2 / v_g`.
    pub gamma: f64,
    /// Transition frequency.
    pub omega: f64,
    /// Decay rate into non-guided modes.
    pub gamma_ng: f64,
}

impl SystemParams {
    /// Lossless emitter with unit decay rate in the rotating frame.
    pub fn lossless(emitter: EmitterKind) -> Self {
        Self {
            emitter,
            gamma: 1.0,
            omega: 0.0,
            gamma_ng: 0.0,
        }
    }

    /// Unit-rate emitter whose guided fraction of emission is `beta`.
    pub fn with_beta(emitter: EmitterKind, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidBeta(beta));
        }
        Ok(Self {
            gamma_ng: (1.0 - beta) / beta,
            ..Self::lossless(emitter)
        })
    }

    pub fn with_omega(self, omega: f64) -> Self {
        Self { omega, ..self }
    }

    /// Fraction of spontaneous emission captured by the waveguide.
    pub fn beta(&self) -> f64 {
        if self.gamma_ng == 0.0 {
            1.0
        } else {
            self.gamma / (self.gamma + self.gamma_ng)
        }
    }

    /// Coupling constant `V = sqrt(gamma * v_g)` with `v_g = 1`.
    pub fn coupling(&self) -> f64 {
        self.gamma.sqrt()
    }

    /// Total emitter decay rate, guided plus non-guided.
    pub fn total_decay(&self) -> f64 {
        self.gamma + self.gamma_ng
    }

    pub fn is_lossless(&self) -> bool {
        self.gamma_ng == 0.0
    }

    /// Checks the invariants and rescales so that `gamma == 1`.
    pub fn validate(self) -> Result<Self> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::NonPositiveGamma(self.gamma));
        }
        if !(self.gamma_ng >= 0.0) || !self.gamma_ng.is_finite() {
            return Err(Error::NegativeLoss(self.gamma_ng));
        }
        Ok(Self {
            emitter: self.emitter,
            gamma: 1.0,
            omega: self.omega / self.gamma,
            gamma_ng: self.gamma_ng / self.gamma,
        })
    }
}

/// Which engine produced a probability record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    Quadrature,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "analytic",
            Method::Quadrature => "quadrature",
            Method::Oracle => "oracle",
        })
    }
}

/// Outcome statistics of the scattering event: both photons right-moving,
/// both left-moving, one each way, or at least one quantum lost to
/// non-guided modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeProbabilities {
    pub p_rr: f64,
    pub p_ll: f64,
    pub p_rl: f64,
    pub loss: f64,
    pub method: Method,
}

impl OutcomeProbabilities {
    pub fn sum(&self) -> f64 {
        self.p_rr + self.p_ll + self.p_rl + self.loss
    }

    /// True when every field is a probability and the record sums to one
    /// within `tol`.
    pub fn is_consistent(&self, tol: f64) -> bool {
        let fields = [self.p_rr, self.p_ll, self.p_rl, self.loss];
        fields.iter().all(|p| (-tol..=1.0 + tol).contains(p)) && (self.sum() - 1.0).abs() <= tol
    }

    /// Componentwise maximum absolute difference over the three guided
    /// outcomes and the loss channel.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.p_rr - other.p_rr,
            self.p_ll - other.p_ll,
            self.p_rl - other.p_rl,
            self.loss - other.loss,
        ]
        .iter()
        .fold(0.0_f64, |m, d| m.max(d.abs()))
    }
}

/// Emitter excitation as a function of time and its time integral.
///
/// For the atom `p_e` is the excited-state population; for the cavity it is
/// the mean photon number, so that `tau` is the cavity lifetime.
#[derive(Debug, Clone, PartialEq)]
pub struct LifetimeCurve {
    pub times: Vec<f64>,
    pub p_e: Vec<f64>,
    pub tau: f64,
}

impl LifetimeCurve {
    /// Builds the curve from uniformly spaced samples starting at `t = 0`,
    /// integrating with the trapezoid rule.
    pub fn from_uniform(dt: f64, p_e: Vec<f64>) -> Self {
        let times = (0..p_e.len()).map(|n| n as f64 * dt).collect();
        let tau = match p_e.len() {
            0 | 1 => 0.0,
            n => {
                let interior: f64 = crate::numerics::neumaier_sum(p_e[1..n - 1].iter().copied());
                dt * (interior + 0.5 * (p_e[0] + p_e[n - 1]))
            }
        };
        Self { times, p_e, tau }
    }

    pub fn final_excitation(&self) -> f64 {
        self.p_e.last().copied().unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lossless_default_is_valid() {
        let p = SystemParams::lossless(EmitterKind::Atom).validate().unwrap();
        assert_eq!(p.gamma, 1.0);
        assert_eq!(p.beta(), 1.0);
    }

    #[test]
    fn beta_point_nine() {
        let p = SystemParams {
            gamma_ng: 1.0 / 9.0,
            ..SystemParams::lossless(EmitterKind::Atom)
        };
        let p = p.validate().unwrap();
        assert!((p.beta() - 0.9).abs() < 1e-15);
        let q = SystemParams::with_beta(EmitterKind::Atom, 0.9).unwrap();
        assert!((q.gamma_ng - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_rates() {
        let zero = SystemParams {
            gamma: 0.0,
            ..SystemParams::lossless(EmitterKind::Atom)
        };
        assert_eq!(zero.validate(), Err(Error::NonPositiveGamma(0.0)));
        let neg = SystemParams {
            gamma_ng: -0.1,
            ..SystemParams::lossless(EmitterKind::Cavity)
        };
        assert_eq!(neg.validate(), Err(Error::NegativeLoss(-0.1)));
        assert!(SystemParams::with_beta(EmitterKind::Atom, 0.0).is_err());
        assert!(SystemParams::with_beta(EmitterKind::Atom, 1.5).is_err());
    }

    #[test]
    fn validate_rescales_rates() {
        let p = SystemParams {
            emitter: EmitterKind::Atom,
            gamma: 4.0,
            omega: 2.0,
            gamma_ng: 1.0,
        }
        .validate()
        .unwrap();
        assert_eq!(p.gamma, 1.0);
        assert_eq!(p.omega, 0.5);
        assert_eq!(p.gamma_ng, 0.25);
        assert!((p.beta() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn trapezoid_lifetime() {
        let dt = 1e-3;
        let p: Vec<f64> = (0..40_001).map(|n| (-(n as f64) * dt).exp()).collect();
        let c = LifetimeCurve::from_uniform(dt, p);
        assert!((c.tau - 1.0).abs() < 1e-6);
        assert_eq!(c.times.len(), c.p_e.len());
    }
}
