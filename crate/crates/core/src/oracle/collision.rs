//! Streaming collision-model evolution of the two-excitation sector.
//!
//! After the even/odd split only the even chiral field couples to the
//! emitter. The initial state is `(|e> + |o>)/sqrt 2` in the sense of two
//! sectors: the emitter excited with an even pulse photon (weight `1/sqrt 2`)
//! and the emitter excited with an odd pulse photon that never interacts.
//!
//! Input bin `m` covers `x in [-(m+1) dx, -m dx]` and meets the emitter at
//! step `m`; an output photon is labelled by the step at which it left. With
//! the pulse amplitudes `psi_m` factored out, the even-sector state at step
//! `n` is spanned by
//!
//! * `e psi_m`: emitter excited, pulse photon still incoming at `m >= n`;
//! * `c_i psi_m`: emitter relaxed, output photon `i`, pulse photon incoming;
//! * `D_i`: emitter excited, output photon `i`;
//! * `G`: two cavity quanta (cavity only);
//! * two output photons, which no longer evolve and are folded into the
//!   direction probabilities as soon as they appear.
//!
//! The odd sector needs only the emitter amplitude and its emission
//! amplitudes `b_i`. Work per step is linear in the number of stored output
//! bins, memory is linear in the number of bins.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::propagators::{Propagators, M2};
use crate::numerics::Neumaier;

/// Everything the kernel reports back to the driver.
#[derive(Debug, Clone)]
pub(crate) struct RawRun {
    pub p_rr: f64,
    pub p_ll: f64,
    pub p_rl: f64,
    pub leaked: f64,
    /// Emitter excitation before step 0, after step 0, ..., after the last.
    pub p_e: Vec<f64>,
    /// Largest deviation of the bookkept total norm from 1.
    pub max_norm_drift: f64,
    /// Largest change of the total norm within a single step.
    pub max_step_drift: f64,
}

#[inline]
fn apply2(u: &M2, a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    (u[0][0] * a + u[0][1] * b, u[1][0] * a + u[1][1] * b)
}

/// `S_n = sum_{m >= n} |psi_m|^2` for `n = 0..=len`.
fn tails(psi: &[Complex64]) -> Vec<f64> {
    let mut out = vec![0.0; psi.len() + 1];
    let mut acc = Neumaier::default();
    for n in (0..psi.len()).rev() {
        acc.add(psi[n].norm_sqr());
        out[n] = acc.value();
    }
    out
}

/// Runs `psi.len()` collisions. `keep` bounds the number of stored output
/// bins: the emitter has decayed to negligible amplitude by then, so later
/// emissions are dropped.
pub(crate) fn run_two_excitation(psi: &[Complex64], u: &Propagators, cavity: bool, keep: usize) -> RawRun {
    let n_bins = psi.len();
    let keep = keep.min(n_bins);
    let tail = tails(psi);
    let us = &u.single;
    let r2 = FRAC_1_SQRT_2;

    let mut d = vec![Complex64::new(0.0, 0.0); keep];
    let mut c = vec![Complex64::new(0.0, 0.0); keep];
    let mut b = vec![Complex64::new(0.0, 0.0); keep];
    let mut e = Complex64::new(r2, 0.0);
    let mut eo = Complex64::new(r2, 0.0);
    let mut g = Complex64::new(0.0, 0.0);
    let mut sum_c2 = Neumaier::default();
    let mut sum_b2 = Neumaier::default();

    let (mut rr, mut ll, mut rl, mut leaked) = (
        Neumaier::default(),
        Neumaier::default(),
        Neumaier::default(),
        Neumaier::default(),
    );
    let mut p_e = Vec::with_capacity(n_bins + 1);
    p_e.push(e.norm_sqr() * tail[0] + eo.norm_sqr());
    let mut max_norm_drift = 0.0_f64;
    let mut max_step_drift = 0.0_f64;
    let mut previous_total = e.norm_sqr() * tail[0] + eo.norm_sqr();

    for n in 0..n_bins {
        let p = psi[n];
        let stored = n.min(keep);

        // odd sector: the pulse photon is a spectator
        let (eo_next, bn) = apply2(us, eo, Complex64::new(0.0, 0.0));
        let mut leak = eo.norm_sqr() - eo_next.norm_sqr() - bn.norm_sqr();

        // one output photon already out, pulse bin arriving
        let (mut s_rr, mut s_ll, mut s_rl, mut sum_d2, mut leak3) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..stored {
            let d0 = d[i];
            let c0 = c[i] * p;
            let (d1, a_phys) = apply2(us, d0, c0);
            d[i] = d1;
            leak3 += d0.norm_sqr() + c0.norm_sqr() - d1.norm_sqr() - a_phys.norm_sqr();
            sum_d2 += d1.norm_sqr();

            // symmetric amplitude of the even pair (i, n) is a_phys / sqrt 2
            let half_a = a_phys * (0.5 * r2);
            let w_in = b[i] * p;
            let w_ni = bn * psi[i];
            let sym = (w_in + w_ni) * (0.5 * r2);
            let anti = (w_in - w_ni) * 0.5;
            let q = a_phys * 0.5;
            s_rr += 2.0 * (half_a + sym).norm_sqr();
            s_ll += 2.0 * (half_a - sym).norm_sqr();
            s_rl += (q - anti).norm_sqr() + (q + anti).norm_sqr();
        }
        leak += leak3;

        // emitter excited and the pulse bin arriving
        let ex = e * p;
        let (dn, ann) = if cavity {
            let m = &u.cavity_double;
            let g1 = m[0][0] * g + m[0][1] * ex;
            let dn = m[1][0] * g + m[1][1] * ex;
            let ann = m[2][0] * g + m[2][1] * ex;
            leak += g.norm_sqr() + ex.norm_sqr() - g1.norm_sqr() - dn.norm_sqr() - ann.norm_sqr();
            g = g1;
            (dn, ann)
        } else {
            let (dn, ann) = apply2(&u.atom_double, ex, Complex64::new(0.0, 0.0));
            leak += ex.norm_sqr() - dn.norm_sqr() - ann.norm_sqr();
            (dn, ann)
        };
        let w_nn = bn * p;
        s_rr += (ann * 0.5 + w_nn * r2).norm_sqr();
        s_ll += (ann * 0.5 - w_nn * r2).norm_sqr();
        s_rl += 0.5 * ann.norm_sqr();

        // emitter excited, pulse bin still further out
        let (e_next, cn) = apply2(us, e, Complex64::new(0.0, 0.0));
        leak += (e.norm_sqr() - e_next.norm_sqr() - cn.norm_sqr()) * tail[n + 1];
        e = e_next;
        eo = eo_next;

        if n < keep {
            d[n] = dn;
            c[n] = cn;
            b[n] = bn;
            sum_d2 += dn.norm_sqr();
            sum_c2.add(cn.norm_sqr());
            sum_b2.add(bn.norm_sqr());
        }

        rr.add(s_rr);
        ll.add(s_ll);
        rl.add(s_rl);
        leaked.add(leak);

        let excited_pair = if cavity { 2.0 * g.norm_sqr() } else { 0.0 };
        p_e.push(e.norm_sqr() * tail[n + 1] + sum_d2 + excited_pair + eo.norm_sqr());

        let total = rr.value()
            + ll.value()
            + rl.value()
            + leaked.value()
            + (e.norm_sqr() + sum_c2.value() + sum_b2.value()) * tail[n + 1]
            + sum_d2
            + g.norm_sqr()
            + eo.norm_sqr();
        max_norm_drift = max_norm_drift.max((total - tail[0]).abs());
        max_step_drift = max_step_drift.max((total - previous_total).abs());
        previous_total = total;
    }

    RawRun {
        p_rr: rr.value(),
        p_ll: ll.value(),
        p_rl: rl.value(),
        leaked: leaked.value(),
        p_e,
        max_norm_drift,
        max_step_drift,
    }
}

/// Single incident photon on a relaxed emitter. Returns the even-channel
/// output amplitudes per bin and the probability leaked to non-guided
/// modes.
pub(crate) fn run_single_excitation(psi: &[Complex64], single: &M2) -> (Vec<Complex64>, f64) {
    let mut x = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(psi.len());
    let mut leaked = Neumaier::default();
    for &p in psi {
        let (x1, o) = apply2(single, x, p);
        leaked.add(x.norm_sqr() + p.norm_sqr() - x1.norm_sqr() - o.norm_sqr());
        x = x1;
        out.push(o);
    }
    (out, leaked.value())
}
