use approx::assert_abs_diff_eq;
use stimemit::analytic::{atom_probabilities, indistinguishability};
use stimemit::numerics::golden_section_max;
use stimemit::outstate::{
    reconstruct, reconstruct_p_rl, reconstruct_p_rr_ll, QuadratureOptions, Sector, TwoPhotonAmplitude,
};
use stimemit::pulses::overlap_f;
use stimemit::{EmitterKind, Error, Pulse, SystemParams};

fn atom() -> SystemParams {
    SystemParams::lossless(EmitterKind::Atom)
}

#[test]
fn lossless_reconstruction_on_alpha_set() {
    for a in [0.3, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0] {
        let r = reconstruct(a, &atom(), QuadratureOptions::default()).unwrap();
        let exact = atom_probabilities(a).unwrap();
        let p = r.probabilities;
        assert!(p.max_abs_diff(&exact) < 1e-6, "alpha {a}: {p:?}");
        assert_abs_diff_eq!(p.p_rr + p.p_ll + p.p_rl, 1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(p.p_rr + p.p_ll, 0.5 + r.f_factor / 4.0, epsilon = 1e-7);
        assert!(r.imaginary_residue.abs() < 1e-6);
        let prl = reconstruct_p_rl(&Pulse::exponential(a).unwrap(), &atom()).unwrap();
        assert_abs_diff_eq!(prl, 0.5 - indistinguishability(a) / 4.0, epsilon = 1e-8);
    }
}

#[test]
fn default_entry_point_at_two() {
    let (rr, ll) = reconstruct_p_rr_ll(2.0, &atom()).unwrap();
    assert_abs_diff_eq!(rr, 2.0 / 3.0, epsilon = 1e-6);
    assert_abs_diff_eq!(ll, 1.0 / 18.0, epsilon = 1e-6);
}

#[test]
fn detuned_frame_does_not_change_probabilities() {
    let params = atom().with_omega(3.7);
    let r = reconstruct(2.0, &params, QuadratureOptions::default()).unwrap();
    assert!(r.probabilities.max_abs_diff(&atom_probabilities(2.0).unwrap()) < 1e-6);
}

#[test]
fn refinement_cap_is_reported() {
    let r = reconstruct(
        2.0,
        &atom(),
        QuadratureOptions {
            tol: 1e-14,
            max_nodes: 10_000,
        },
    );
    assert!(matches!(r, Err(Error::QuadratureNotConverged { .. })));
}

#[test]
fn grid_riemann_sum_recovers_norms() {
    // midpoint sums on the exported grids, an independent check of the
    // amplitude normalization
    let h = 0.02;
    let n = 1000;
    let xc = (-20.0 + h / 2.0, -h / 2.0);
    let xd = (-20.0 + h / 2.0, 20.0 - h / 2.0);
    let eo = TwoPhotonAmplitude::sample(Sector::EO, 1.5, &atom(), xc, n, xd, 2 * n).unwrap();
    let ee = TwoPhotonAmplitude::sample(Sector::EE, 1.5, &atom(), xc, n, xd, 2 * n).unwrap();
    let sum = |g: &TwoPhotonAmplitude| g.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * h * h;
    assert_abs_diff_eq!(sum(&eo), 1.0, epsilon = 2e-2);
    assert_abs_diff_eq!(sum(&ee), 0.5, epsilon = 2e-2);
    for g in [&ee, &eo] {
        for (c, d, z) in g.points() {
            if c + d.abs() / 2.0 > 0.0 {
                assert_eq!(z.norm(), 0.0);
            }
        }
    }
}

#[test]
fn lossy_reconstruction_is_consistent() {
    let params = SystemParams::with_beta(EmitterKind::Atom, 0.9).unwrap();
    for a in [0.5, 1.0, 2.0, 4.0] {
        let r = reconstruct(a, &params, QuadratureOptions::default()).unwrap();
        let p = r.probabilities;
        assert!(p.is_consistent(1e-7));
        assert!(p.loss > 0.0 && p.loss < 0.2);
        let f = overlap_f(&Pulse::exponential(a).unwrap(), &params).unwrap();
        assert_abs_diff_eq!(r.exchange, f, epsilon = 1e-7);
        assert_abs_diff_eq!(f, 4.0 * a / (1.0 + a + params.gamma_ng).powi(2), epsilon = 1e-10);
    }
    // loss only lowers the forward peak
    let lossy = |a: f64| {
        reconstruct(a, &params, QuadratureOptions::default())
            .unwrap()
            .probabilities
            .p_rr
    };
    let (_, peak) = golden_section_max(lossy, 1.5, 3.0, 1e-3);
    assert!(peak < 2.0 / 3.0 && peak > 0.6);
}

#[test]
fn lossy_p_rl_requires_full_out_state() {
    let params = SystemParams::with_beta(EmitterKind::Atom, 0.9).unwrap();
    assert!(matches!(
        reconstruct_p_rl(&Pulse::exponential(1.0).unwrap(), &params),
        Err(Error::Unsupported(_))
    ));
}
