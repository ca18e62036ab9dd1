//! Exact local interaction propagators for one collision between the
//! emitter and a single time bin of the chiral field.

use nalgebra::{Matrix2, Matrix3};
use num_complex::Complex64;

use crate::model::SystemParams;

/// How the bin-emitter coupling angle is tied to the step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingAngle {
    /// `arccos(exp(-gamma dt / 2))`: a lone excitation decays exactly as
    /// `exp(-gamma t)` on the bin grid. Errors are second order in `dt`.
    #[default]
    DecayMatched,
    /// `sqrt(gamma dt)`, the leading-order angle; first-order errors.
    Linear,
}

impl CouplingAngle {
    pub fn angle(self, gamma: f64, dt: f64) -> f64 {
        match self {
            CouplingAngle::DecayMatched => (-0.5 * gamma * dt).exp().acos(),
            CouplingAngle::Linear => (gamma * dt).sqrt(),
        }
    }
}

pub(crate) type M2 = [[Complex64; 2]; 2];
pub(crate) type M3 = [[Complex64; 3]; 3];

/// Collision propagators `exp(-i H dt)` on the invariant subspaces. Loss to
/// non-guided modes enters as an anti-Hermitian `-i gamma_ng / 2` per
/// emitter quantum, so the propagators shrink the norm by exactly the
/// leaked probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Propagators {
    /// Basis (one emitter quantum, empty bin), (no quantum, one bin photon).
    pub single: M2,
    /// Atom: (excited, one bin photon), (ground, two bin photons).
    pub atom_double: M2,
    /// Cavity: (two quanta, empty bin), (one quantum, one photon), (none,
    /// two photons).
    pub cavity_double: M3,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn to_m2(m: Matrix2<Complex64>) -> M2 {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

fn to_m3(m: Matrix3<Complex64>) -> M3 {
    let mut out = [[c(0.0, 0.0); 3]; 3];
    for (r, row) in out.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = m[(r, k)];
        }
    }
    out
}

impl Propagators {
    pub fn new(params: &SystemParams, dt: f64, angle: CouplingAngle) -> Self {
        let th = angle.angle(params.gamma, dt);
        let s2 = std::f64::consts::SQRT_2 * th;
        let leak = 0.5 * params.gamma_ng * dt;
        let minus_i = c(0.0, -1.0);
        let single = Matrix2::new(c(0.0, -leak), c(th, 0.0), c(th, 0.0), c(0.0, 0.0));
        let atom = Matrix2::new(c(0.0, -leak), c(s2, 0.0), c(s2, 0.0), c(0.0, 0.0));
        let cavity = Matrix3::new(
            c(0.0, -2.0 * leak),
            c(s2, 0.0),
            c(0.0, 0.0),
            c(s2, 0.0),
            c(0.0, -leak),
            c(s2, 0.0),
            c(0.0, 0.0),
            c(s2, 0.0),
            c(0.0, 0.0),
        );
        Self {
            single: to_m2((single * minus_i).exp()),
            atom_double: to_m2((atom * minus_i).exp()),
            cavity_double: to_m3((cavity * minus_i).exp()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::EmitterKind;
    use approx::assert_abs_diff_eq;

    fn unitarity_defect2(m: &M2) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..2 {
            for k in 0..2 {
                let dot: Complex64 = (0..2).map(|j| m[j][r].conj() * m[j][k]).sum();
                let target = if r == k { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    #[test]
    fn lossless_propagators_are_unitary() {
        let p = Propagators::new(
            &SystemParams::lossless(EmitterKind::Atom),
            0.01,
            CouplingAngle::DecayMatched,
        );
        assert!(unitarity_defect2(&p.single) < 1e-14);
        assert!(unitarity_defect2(&p.atom_double) < 1e-14);
        for k in 0..3 {
            let col: f64 = (0..3).map(|r| p.cavity_double[r][k].norm_sqr()).sum();
            assert_abs_diff_eq!(col, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn decay_matched_survival() {
        let dt = 0.05;
        let p = Propagators::new(
            &SystemParams::lossless(EmitterKind::Atom),
            dt,
            CouplingAngle::DecayMatched,
        );
        assert_abs_diff_eq!(p.single[0][0].re, (-dt / 2.0).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(p.single[0][0].im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn loss_shrinks_norm() {
        let params = SystemParams::with_beta(EmitterKind::Atom, 0.5).unwrap();
        let p = Propagators::new(&params, 0.01, CouplingAngle::DecayMatched);
        let kept = p.single[0][0].norm_sqr() + p.single[1][0].norm_sqr();
        assert!(kept < 1.0);
        // leaked fraction ~ gamma_ng dt for a full excitation
        assert_abs_diff_eq!(1.0 - kept, 0.01, epsilon = 1e-4);
        // the bin photon alone does not decay while it sits in the bin
        let kept_photon = p.single[0][1].norm_sqr() + p.single[1][1].norm_sqr();
        assert!(kept_photon > kept);
    }
}
