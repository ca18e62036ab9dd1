//! Closed-form outcome probabilities for an exponential incident pulse.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{EmitterKind, Method, OutcomeProbabilities};
use crate::numerics::integrate_1d;

fn check(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveAlpha(alpha))
    }
}

/// Photon indistinguishability factor of an exponential pulse,
/// `4 alpha / (1 + alpha)^2`.
pub fn indistinguishability(alpha: f64) -> f64 {
    4.0 * alpha / (1.0 + alpha).powi(2)
}

/// Direction asymmetry `P_RR - P_LL` of the atom, divided by two.
///
/// The textbook form `((1+a)^3 - 8a) / ((a-1)(1+a)^2)` has a removable
/// singularity at `a = 1`; the numerator factors as `(a-1)(a^2+4a-1)`, so the
/// cancelled form below is exact everywhere and needs no special branch.
pub fn atom_asymmetry(alpha: f64) -> f64 {
    (alpha * alpha + 4.0 * alpha - 1.0) / (1.0 + alpha).powi(2)
}

fn from_parts(pm: f64, alpha: f64) -> OutcomeProbabilities {
    let f = indistinguishability(alpha);
    let base = 1.0 + f / 2.0;
    OutcomeProbabilities {
        p_rr: 0.25 * (base + pm),
        p_ll: 0.25 * (base - pm),
        p_rl: 0.5 * (1.0 - f / 2.0),
        loss: 0.0,
        method: Method::ClosedForm,
    }
}

pub fn atom_probabilities(alpha: f64) -> Result<OutcomeProbabilities> {
    check(alpha)?;
    Ok(from_parts(atom_asymmetry(alpha), alpha))
}

/// Side-coupled cavity: no two-photon blockade, so the right-moving excess
/// comes from indistinguishability alone.
pub fn cavity_probabilities(alpha: f64) -> Result<OutcomeProbabilities> {
    check(alpha)?;
    Ok(from_parts((alpha - 1.0) / (alpha + 1.0), alpha))
}

/// Classical scatterer with the atom's single-photon reflection spectrum.
pub fn classical_probabilities(alpha: f64) -> Result<OutcomeProbabilities> {
    check(alpha)?;
    Ok(OutcomeProbabilities {
        p_rr: alpha / (2.0 * (1.0 + alpha)),
        p_ll: 1.0 / (2.0 * (1.0 + alpha)),
        p_rl: 0.5,
        loss: 0.0,
        method: Method::ClosedForm,
    })
}

pub fn probabilities(emitter: EmitterKind, alpha: f64) -> Result<OutcomeProbabilities> {
    match emitter {
        EmitterKind::Atom => atom_probabilities(alpha),
        EmitterKind::Cavity => cavity_probabilities(alpha),
        EmitterKind::ClassicalAncilla => classical_probabilities(alpha),
    }
}

/// Single-photon reflection probability `|r_k|^2` at detuning `k - omega`.
pub fn reflection_spectrum(detuning: f64) -> f64 {
    0.25 / (detuning * detuning + 0.25)
}

/// Classical probabilities from the spectral average: the incident photon
/// keeps its direction with probability `1 - |r_k|^2`, the emitted one is
/// sent either way with equal weight.
///
/// The Lorentzian pulse spectrum is integrated after the substitution
/// `k = (alpha/2) tan(theta)`, which maps it to the uniform density `1/pi`.
pub fn classical_spectral(alpha: f64, tol: f64) -> Result<OutcomeProbabilities> {
    check(alpha)?;
    let r = integrate_1d(
        |theta| Complex64::new(reflection_spectrum(0.5 * alpha * theta.tan()) / PI, 0.0),
        &[-FRAC_PI_2, -1.0, 0.0, 1.0, FRAC_PI_2],
        tol,
        1 << 20,
    )?;
    let reflected = r.value.re;
    Ok(OutcomeProbabilities {
        p_rr: 0.5 * (1.0 - reflected),
        p_ll: 0.5 * reflected,
        p_rl: 0.5,
        loss: 0.0,
        method: Method::Quadrature,
    })
}

/// Stimulated-emission figures of merit of the atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRecord {
    pub alpha: f64,
    /// Cloning fidelity `P_RR + P_RL / 2`.
    pub fidelity: f64,
    /// Mean number of right-moving photons, `2 P_RR`.
    pub amplification: f64,
}

pub fn metrics(alpha: f64) -> Result<MetricRecord> {
    let p = atom_probabilities(alpha)?;
    Ok(MetricRecord {
        alpha,
        fidelity: p.p_rr + 0.5 * p.p_rl,
        amplification: 2.0 * p.p_rr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{golden_section_max, golden_section_min, log_grid};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn atom_at_two() {
        let p = atom_probabilities(2.0).unwrap();
        assert_abs_diff_eq!(p.p_rr, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.p_ll, 1.0 / 18.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.p_rl, 5.0 / 18.0, epsilon = 1e-15);
    }

    #[test]
    fn atom_at_one_and_nearby() {
        let p = atom_probabilities(1.0).unwrap();
        assert_eq!((p.p_rr, p.p_ll, p.p_rl), (0.625, 0.125, 0.25));
        for a in [1.0 - 1e-4, 1.0 + 1e-4] {
            let q = atom_probabilities(a).unwrap();
            assert!(q.max_abs_diff(&p) < 1e-3);
        }
    }

    #[test]
    fn factored_asymmetry_matches_raw_form() {
        for a in [0.01f64, 0.3, 0.9, 1.1, 2.0, 7.0, 100.0] {
            let raw = ((1.0 + a).powi(3) - 8.0 * a) / ((a - 1.0) * (1.0 + a).powi(2));
            assert_abs_diff_eq!(atom_asymmetry(a), raw, epsilon = 1e-12);
        }
    }

    #[test]
    fn atom_limits() {
        let wide = atom_probabilities(1e8).unwrap();
        assert_abs_diff_eq!(wide.p_rr, 0.5, epsilon = 1e-7);
        assert_abs_diff_eq!(wide.p_rl, 0.5, epsilon = 1e-7);
        assert_abs_diff_eq!(wide.p_ll, 0.0, epsilon = 1e-7);
        let narrow = atom_probabilities(1e-8).unwrap();
        assert_abs_diff_eq!(narrow.p_rr, 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(narrow.p_ll, 0.5, epsilon = 1e-7);
    }

    #[test]
    fn cavity_values() {
        let p = cavity_probabilities(1.0).unwrap();
        assert_eq!((p.p_rr, p.p_ll, p.p_rl), (0.375, 0.375, 0.25));
        assert_abs_diff_eq!(cavity_probabilities(2.0).unwrap().p_rr, 4.0 / 9.0, epsilon = 1e-15);
        for a in log_grid(1e-2, 1e2, 201) {
            let c = cavity_probabilities(a).unwrap();
            assert!(c.p_rr < 0.5);
            assert_abs_diff_eq!(c.p_rl, atom_probabilities(a).unwrap().p_rl, epsilon = 1e-15);
        }
    }

    #[test]
    fn classical_values() {
        let p = classical_probabilities(1.0).unwrap();
        assert_eq!((p.p_rr, p.p_ll, p.p_rl), (0.25, 0.25, 0.5));
        assert_abs_diff_eq!(classical_probabilities(3.0).unwrap().p_rr, 0.375, epsilon = 1e-15);
    }

    #[test]
    fn classical_matches_spectral_average() {
        for a in [0.5, 1.0, 2.0, 5.0] {
            let exact = classical_probabilities(a).unwrap();
            let spectral = classical_spectral(a, 1e-12).unwrap();
            assert!(exact.max_abs_diff(&spectral) < 1e-10, "alpha {a}");
        }
        assert_abs_diff_eq!(classical_spectral(2.0, 1e-12).unwrap().p_rr, 1.0 / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn metric_values() {
        assert_abs_diff_eq!(metrics(3.0).unwrap().fidelity, 0.8125, epsilon = 1e-15);
        assert_abs_diff_eq!(metrics(2.0).unwrap().amplification, 4.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(metrics(1e-9).unwrap().fidelity, 0.25, epsilon = 1e-8);
    }

    #[test]
    fn fidelity_peaks_at_three() {
        let (a, eta) = golden_section_max(|a| metrics(a).unwrap().fidelity, 0.5, 10.0, 1e-7);
        assert_abs_diff_eq!(a, 3.0, epsilon = 1e-5);
        assert_abs_diff_eq!(eta, 0.8125, epsilon = 1e-12);
    }

    #[test]
    fn extrema() {
        let (a, p) = golden_section_max(|a| atom_probabilities(a).unwrap().p_rr, 0.5, 10.0, 1e-7);
        assert_abs_diff_eq!(a, 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p, 2.0 / 3.0, epsilon = 1e-12);
        let (a, p) = golden_section_min(|a| atom_probabilities(a).unwrap().p_rl, 0.1, 10.0, 1e-7);
        assert_abs_diff_eq!(a, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn rejects_non_positive_alpha() {
        assert_eq!(atom_probabilities(0.0), Err(Error::NonPositiveAlpha(0.0)));
        assert!(cavity_probabilities(-2.0).is_err());
        assert!(classical_probabilities(f64::INFINITY).is_err());
        assert!(metrics(-1.0).is_err());
    }

    proptest! {
        #[test]
        fn every_kind_normalized(la in -4.6f64..4.6) {
            let a = la.exp();
            for kind in [EmitterKind::Atom, EmitterKind::Cavity, EmitterKind::ClassicalAncilla] {
                let p = probabilities(kind, a).unwrap();
                prop_assert!(p.is_consistent(1e-12));
            }
        }

        #[test]
        fn atom_forward_bias_above_one(a in 1.0f64..100.0) {
            let p = atom_probabilities(a).unwrap();
            prop_assert!(p.p_rr >= p.p_ll);
            prop_assert!(p.p_rr <= 0.75);
        }

        #[test]
        fn rl_is_indistinguishability_bound(la in -4.6f64..4.6) {
            let a = la.exp();
            let p = atom_probabilities(a).unwrap();
            prop_assert!((p.p_rl - (0.5 - indistinguishability(a) / 4.0)).abs() < 1e-15);
            prop_assert!((0.25..=0.5).contains(&p.p_rl));
        }
    }
}
