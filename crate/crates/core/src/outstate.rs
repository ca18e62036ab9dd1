//! Two-photon out-state amplitudes for an exponential incident pulse and
//! the quadrature that turns them into outcome probabilities.
//!
//! Coordinates are the photon center `x_c = (x1 + x2)/2` measured from the
//! light cone, `x_c' = x_c - t`, and the separation `x_d = x1 - x2`. In the
//! even-odd (`eo`) sector photon 1 is the one emitted by the emitter and
//! photon 2 is the odd part of the incident pulse, which never interacts.
//! The even-even (`ee`) amplitude is symmetric in `x_d`.
//!
//! Non-guided loss enters through the emitter pole only: the emitted photon
//! and every propagator through the emitter decay at `gamma + gamma_ng`,
//! while the incident pulse keeps its real carrier.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Method, OutcomeProbabilities, SystemParams};
use crate::numerics::{integrate_2d, one_minus_exp_over, Rect};
use crate::pulses::{overlap_f, Pulse};

/// Largest tolerated imaginary part of the direction cross term.
pub const CROSS_TERM_IMAG_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    EE,
    EO,
}

fn on_support(x_c_minus_t: f64, x_d: f64) -> bool {
    x_c_minus_t + 0.5 * x_d.abs() <= 0.0
}

/// Even-odd amplitude: the emitted photon times the undisturbed odd part of
/// the pulse.
pub fn phi_eo(alpha: f64, params: &SystemParams, x_c_minus_t: f64, x_d: f64) -> Complex64 {
    if !on_support(x_c_minus_t, x_d) {
        return Complex64::new(0.0, 0.0);
    }
    let g = params.gamma;
    let kappa = alpha * g;
    let gt = params.total_decay();
    let exponent = 0.5 * (kappa + gt) * x_c_minus_t + 0.25 * (gt - kappa) * x_d;
    let phase = Complex64::new(0.0, 2.0 * params.omega * x_c_minus_t).exp();
    phase * ((kappa * g).sqrt() * exponent.exp())
}

/// Even-even amplitude left by a pulse that reached the excited emitter.
///
/// `1 - c (1 - exp(-d |x_d| / 2))` with `c = (kappa + 2 gamma - gt) / (2 d)`
/// and `d = kappa - gt` is evaluated through `(1 - e^-y)/y`, so it is exact
/// through `d = 0` where it becomes linear in `|x_d|`.
pub fn phi_ee(alpha: f64, params: &SystemParams, x_c_minus_t: f64, x_d: f64) -> Complex64 {
    if !on_support(x_c_minus_t, x_d) {
        return Complex64::new(0.0, 0.0);
    }
    let g = params.gamma;
    let kappa = alpha * g;
    let gt = params.total_decay();
    let d = kappa - gt;
    let tau = x_d.abs();
    let bracket = 1.0 - (kappa + 2.0 * g - gt) * 0.25 * tau * one_minus_exp_over(0.5 * d * tau);
    let exponent = 0.5 * (kappa + gt) * x_c_minus_t + 0.25 * d * tau;
    let phase = Complex64::new(0.0, 2.0 * params.omega * x_c_minus_t).exp();
    phase * ((kappa * g).sqrt() * exponent.exp() * bracket)
}

pub fn amplitude(sector: Sector, alpha: f64, params: &SystemParams, x_c_minus_t: f64, x_d: f64) -> Complex64 {
    match sector {
        Sector::EE => phi_ee(alpha, params, x_c_minus_t, x_d),
        Sector::EO => phi_eo(alpha, params, x_c_minus_t, x_d),
    }
}

/// Amplitudes sampled on a rectangular `(x_c - t, x_d)` mesh, stored with
/// `x_d` varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonAmplitude {
    pub sector: Sector,
    pub alpha: f64,
    pub params: SystemParams,
    pub x_c_minus_t: Vec<f64>,
    pub x_d: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl TwoPhotonAmplitude {
    /// Samples `nc x nd` points covering the two closed ranges.
    pub fn sample(
        sector: Sector,
        alpha: f64,
        params: &SystemParams,
        x_c_range: (f64, f64),
        nc: usize,
        x_d_range: (f64, f64),
        nd: usize,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::NonPositiveAlpha(alpha));
        }
        if nc < 2 || nd < 2 {
            return Err(Error::InvalidConfig(
                "amplitude grid needs at least 2 points per axis".into(),
            ));
        }
        let axis = |(lo, hi): (f64, f64), n: usize| -> Vec<f64> {
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        };
        let xc = axis(x_c_range, nc);
        let xd = axis(x_d_range, nd);
        let values = xc
            .iter()
            .flat_map(|&c| xd.iter().map(move |&d| (c, d)))
            .map(|(c, d)| amplitude(sector, alpha, params, c, d))
            .collect();
        Ok(Self {
            sector,
            alpha,
            params: *params,
            x_c_minus_t: xc,
            x_d: xd,
            values,
        })
    }

    pub fn spacing(&self) -> (f64, f64) {
        (self.x_c_minus_t[1] - self.x_c_minus_t[0], self.x_d[1] - self.x_d[0])
    }

    /// `(x_c - t, x_d, value)` in storage order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, Complex64)> + '_ {
        let nd = self.x_d.len();
        self.values
            .iter()
            .enumerate()
            .map(move |(k, z)| (self.x_c_minus_t[k / nd], self.x_d[k % nd], *z))
    }
}

/// Quadrature settings for [`reconstruct`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Absolute tolerance on the summed error estimate of the integrals.
    pub tol: f64,
    pub max_nodes: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_nodes: 1 << 24,
        }
    }
}

/// Probabilities reconstructed from the out-state with the intermediate
/// integrals kept for inspection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reconstruction {
    pub probabilities: OutcomeProbabilities,
    /// Squared overlap of the incident and spontaneously emitted photons.
    pub f_factor: f64,
    /// `∫∫|phi_ee|^2`, one half without loss.
    pub norm_ee: f64,
    /// `∫∫|phi_eo|^2`, one without loss.
    pub norm_eo: f64,
    /// Exchange integral `∫∫ phi_eo*(x_d) phi_eo(-x_d)`, equal to `f_factor`.
    pub exchange: f64,
    /// Cross term separating `P_RR` from `P_LL`.
    pub cross_term: f64,
    pub imaginary_residue: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Integrates the out-state over the quadrant `u, v >= 0` with
/// `u = -(x_c - t) - |x_d|/2` and `v = |x_d|` (unit Jacobian), folding the
/// two signs of `x_d` into one integrand.
pub fn reconstruct(alpha: f64, params: &SystemParams, opts: QuadratureOptions) -> Result<Reconstruction> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::NonPositiveAlpha(alpha));
    }
    let params = params.validate()?;
    let l = 40.0 / alpha.min(1.0);
    let integrand = |u: f64, v: f64| -> [f64; 5] {
        let xc = -u - 0.5 * v;
        let a = phi_ee(alpha, &params, xc, v);
        let bp = phi_eo(alpha, &params, xc, v);
        let bm = phi_eo(alpha, &params, xc, -v);
        let cross = a.conj() * (bp + bm);
        [
            2.0 * a.norm_sqr(),
            bp.norm_sqr() + bm.norm_sqr(),
            2.0 * (bp.conj() * bm).re,
            4.0 * cross.re,
            4.0 * cross.im,
        ]
    };
    let domain = Rect {
        x0: 0.0,
        x1: l,
        y0: 0.0,
        y1: l,
    };
    let r = integrate_2d(integrand, domain, opts.tol, opts.max_nodes)?;
    let [n_ee, n_eo, x, cross, residue] = r.value;
    if residue.abs() > CROSS_TERM_IMAG_TOL {
        return Err(Error::ComplexCrossTerm { residue });
    }
    let p_rr = 0.25 * n_ee + 0.125 * (n_eo + x) + 0.125 * cross;
    let p_ll = 0.25 * n_ee + 0.125 * (n_eo + x) - 0.125 * cross;
    let p_rl = 0.5 * n_ee + 0.25 * (n_eo - x);
    let loss = if params.is_lossless() {
        0.0
    } else {
        1.0 - (p_rr + p_ll + p_rl)
    };
    let f_factor = overlap_f(&Pulse::exponential(alpha)?.with_carrier(params.omega), &params)?;
    Ok(Reconstruction {
        probabilities: OutcomeProbabilities {
            p_rr,
            p_ll,
            p_rl,
            loss,
            method: Method::Quadrature,
        },
        f_factor,
        norm_ee: n_ee,
        norm_eo: n_eo,
        exchange: x,
        cross_term: cross,
        imaginary_residue: residue,
        error_estimate: r.error,
        evaluations: r.evaluations,
    })
}

/// `(P_RR, P_LL)` for an exponential pulse by quadrature at default
/// settings.
pub fn reconstruct_p_rr_ll(alpha: f64, params: &SystemParams) -> Result<(f64, f64)> {
    let r = reconstruct(alpha, params, QuadratureOptions::default())?;
    Ok((r.probabilities.p_rr, r.probabilities.p_ll))
}

/// `P_RL = 1/2 - F/4`, valid for any incident pulse on a lossless emitter.
pub fn reconstruct_p_rl(pulse: &Pulse, params: &SystemParams) -> Result<f64> {
    let params = params.validate()?;
    if !params.is_lossless() {
        return Err(Error::Unsupported(
            "P_RL of an arbitrary pulse with non-guided loss needs the full out-state; use the oracle".into(),
        ));
    }
    Ok(0.5 - 0.25 * overlap_f(pulse, &params)?)
}
