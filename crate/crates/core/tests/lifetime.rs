//! Emitter lifetimes against a cascaded master equation.
//!
//! An exponential single-photon pulse of rate `alpha` is exactly the output
//! of a two-level source decaying at that rate, so driving the emitter from a
//! cascaded source is an independent route to `∫ P_e dt`.

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use num_complex::Complex64;
use stimemit::numerics::golden_section_min;
use stimemit::oracle::{evolve, evolve_detailed, evolve_spontaneous, CouplingAngle, OracleConfig};
use stimemit::{EmitterKind, Pulse, SystemParams};

type M = DMatrix<Complex64>;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn kron(a: &M, b: &M) -> M {
    a.kronecker(b)
}

fn lowering(levels: usize) -> M {
    M::from_fn(
        levels,
        levels,
        |r, k| if k == r + 1 { c((k as f64).sqrt()) } else { c(0.0) },
    )
}

/// Integrated excitation of the target emitter: `Tr[n x]` with
/// `L x = rho_inf - rho_0`, the steady state being the joint ground state.
fn master_equation_lifetime(alpha: f64, cavity: bool) -> f64 {
    let levels = if cavity { 3 } else { 2 };
    let (ds, dt) = (2, levels);
    let dim = ds * dt;
    let s = kron(&lowering(2), &M::identity(dt, dt));
    let a = kron(&M::identity(ds, ds), &lowering(levels));
    let kappa = alpha;
    let gamma: f64 = 1.0;
    let h = (&a.adjoint() * &s - &s.adjoint() * &a) * Complex64::new(0.0, -0.5 * (kappa * gamma / 2.0).sqrt());
    let jumps = [
        &s * c(kappa.sqrt()) + &a * c((gamma / 2.0).sqrt()),
        &a * c((gamma / 2.0).sqrt()),
    ];

    let id = M::identity(dim, dim);
    let i = Complex64::new(0.0, 1.0);
    // column-stacking: vec(A X B) = (B^T ⊗ A) vec(X)
    let mut l = (kron(&id, &h) - kron(&h.transpose(), &id)) * (-i);
    for j in &jumps {
        let jdj = j.adjoint() * j;
        l += kron(&j.conjugate(), j);
        l -= (kron(&id, &jdj) + kron(&jdj.transpose(), &id)) * c(0.5);
    }

    let top = |level_s: usize, level_t: usize| level_s * dt + level_t;
    let mut rho0 = M::zeros(dim, dim);
    rho0[(top(1, 1), top(1, 1))] = c(1.0);
    let mut rho_inf = M::zeros(dim, dim);
    rho_inf[(0, 0)] = c(1.0);
    let rhs = nalgebra::DVector::from_iterator(dim * dim, (rho_inf - rho0).iter().copied());
    let x = l.svd(true, true).solve(&rhs, 1e-12).unwrap();
    let x = M::from_iterator(dim, dim, x.iter().copied());
    let n = a.adjoint() * &a;
    (n * x).trace().re
}

fn atom_closed_form(alpha: f64) -> f64 {
    (alpha * alpha + 3.0) / (1.0 + alpha).powi(2)
}

fn cavity_closed_form(alpha: f64) -> f64 {
    1.0 + 2.0 / (1.0 + alpha)
}

#[test]
fn master_equation_reduces_to_known_limits() {
    assert_abs_diff_eq!(master_equation_lifetime(1e6, false), 1.0, epsilon = 1e-4);
    assert_abs_diff_eq!(master_equation_lifetime(1e-6, false), 3.0, epsilon = 1e-4);
    for a in [0.1, 0.5, 1.0, 3.0, 10.0] {
        assert_abs_diff_eq!(master_equation_lifetime(a, false), atom_closed_form(a), epsilon = 1e-10);
        assert_abs_diff_eq!(
            master_equation_lifetime(a, true),
            cavity_closed_form(a),
            epsilon = 1e-10
        );
    }
}

#[test]
fn oracle_lifetimes_match_master_equation() {
    for (a, dx) in [(0.3, 0.005), (1.0, 0.005), (3.0, 0.005), (10.0, 0.002)] {
        for (kind, cavity) in [(EmitterKind::Atom, false), (EmitterKind::Cavity, true)] {
            let cfg = OracleConfig::new(SystemParams::lossless(kind), Pulse::exponential(a).unwrap()).with_dx(dx);
            let ev = evolve_detailed(&cfg).unwrap();
            let expect = master_equation_lifetime(a, cavity);
            assert_abs_diff_eq!(ev.lifetime.tau, expect, epsilon = 1e-4);
            assert_abs_diff_eq!(ev.lifetime.p_e[0], 1.0, epsilon = 1e-14);
            assert!(ev.residual < 1e-3);
        }
    }
}

#[test]
fn atom_lifetime_anchors() {
    let tau = |a: f64, dx: f64| {
        let cfg = OracleConfig::new(
            SystemParams::lossless(EmitterKind::Atom),
            Pulse::exponential(a).unwrap(),
        )
        .with_dx(dx);
        evolve(&cfg).unwrap().1.tau
    };
    assert_abs_diff_eq!(tau(3.0, 0.005), 0.75, epsilon = 0.75 * 0.02);
    assert_abs_diff_eq!(tau(100.0, 0.001), 1.0, epsilon = 0.02);
    assert_abs_diff_eq!(tau(0.01, 0.05), 3.0, epsilon = 0.09);
    let (amin, _) = golden_section_min(|a| tau(a, 0.004), 2.0, 4.0, 1e-3);
    assert_abs_diff_eq!(amin, 3.0, epsilon = 0.1);
}

#[test]
fn cavity_outlives_free_decay() {
    for a in [0.5, 1.0, 2.0, 10.0] {
        let cfg = OracleConfig::new(
            SystemParams::lossless(EmitterKind::Cavity),
            Pulse::exponential(a).unwrap(),
        );
        let (_, life) = evolve(&cfg).unwrap();
        assert!(life.tau > 1.0, "alpha {a}: {}", life.tau);
    }
}

#[test]
fn free_decay_lifetime() {
    for kind in [EmitterKind::Atom, EmitterKind::Cavity] {
        let c = evolve_spontaneous(&SystemParams::lossless(kind), 0.01, 40.0, CouplingAngle::DecayMatched).unwrap();
        assert_abs_diff_eq!(c.tau, 1.0, epsilon = 1e-4);
        assert!(c.p_e.windows(2).all(|w| w[1] <= w[0]));
    }
}
