//! The acceptance suite behind `stimemit verify`.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use stimemit::analytic::{self, atom_probabilities, cavity_probabilities, classical_probabilities, metrics};
use stimemit::numerics::{golden_section_max, golden_section_min, log_grid};
use stimemit::oracle::{self, convergence_report, evolve_detailed, OracleConfig};
use stimemit::outstate::{reconstruct, reconstruct_p_rl, QuadratureOptions};
use stimemit::{EmitterKind, OutcomeProbabilities, Pulse, SystemParams};

use crate::output::write_sweep;
use crate::run::run_sweep;
use crate::spec::{EmitterArg, Format, MethodArg, SweepSpec};

pub const CRITERIA: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Restrict the run to these criterion numbers.
    pub only: Option<Vec<usize>>,
    /// Absolute tolerance handed to the out-state quadrature.
    pub quadrature_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            only: None,
            quadrature_tol: QuadratureOptions::default().tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    /// Measured against expected, one entry per comparison.
    pub lines: Vec<String>,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "[{status}] criterion {:>2}: {} ({:.3} s)",
            self.id,
            self.title,
            self.elapsed.as_secs_f64()
        )?;
        for l in &self.lines {
            write!(f, "\n    {l}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failed(&self) -> Vec<String> {
        self.outcomes
            .iter()
            .filter(|o| !o.passed)
            .map(|o| format!("criterion {} ({})", o.id, o.title))
            .collect()
    }
}

/// Collects comparisons for one criterion.
struct Checks {
    ok: bool,
    lines: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self {
            ok: true,
            lines: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, line: String) {
        self.ok &= ok;
        self.lines.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn close(&mut self, what: &str, measured: f64, expected: f64, tol: f64) {
        let diff = (measured - expected).abs();
        self.record(
            diff <= tol,
            format!("{what}: measured {measured:.12} expected {expected:.12} +/- {tol:e} (|diff| {diff:.2e})"),
        );
    }

    fn relative(&mut self, what: &str, measured: f64, expected: f64, rel: f64) {
        let r = (measured - expected).abs() / expected.abs();
        self.record(
            r <= rel,
            format!(
                "{what}: measured {measured:.6} expected {expected:.6} +/- {:.0}% (off by {:.2}%)",
                rel * 100.0,
                r * 100.0
            ),
        );
    }

    fn holds(&mut self, what: &str, ok: bool, detail: String) {
        self.record(ok, format!("{what}: {detail}"));
    }

    fn probabilities(
        &mut self,
        what: &str,
        measured: &OutcomeProbabilities,
        expected: &OutcomeProbabilities,
        tol: f64,
    ) {
        let d = measured.max_abs_diff(expected);
        self.record(
            d <= tol,
            format!(
                "{what}: measured ({:.9}, {:.9}, {:.9}) expected ({:.9}, {:.9}, {:.9}) max |diff| {d:.2e} <= {tol:e}",
                measured.p_rr, measured.p_ll, measured.p_rl, expected.p_rr, expected.p_ll, expected.p_rl
            ),
        );
    }
}

type CheckResult = Result<Checks, String>;

struct Criterion {
    id: usize,
    title: &'static str,
    budget: Option<Duration>,
    run: fn(&VerifyOptions) -> CheckResult,
}

const fn ms(x: u64) -> Option<Duration> {
    Some(Duration::from_millis(x))
}

const SUITE: [Criterion; CRITERIA] = [
    Criterion {
        id: 1,
        title: "exact values at alpha = 2 and alpha = 3",
        budget: ms(1),
        run: exact_values,
    },
    Criterion {
        id: 2,
        title: "continuity through alpha = 1",
        budget: ms(1),
        run: continuity,
    },
    Criterion {
        id: 3,
        title: "normalization on the full alpha grid",
        budget: ms(10),
        run: normalization,
    },
    Criterion {
        id: 4,
        title: "quadrature reconstruction",
        budget: None,
        run: quadrature,
    },
    Criterion {
        id: 5,
        title: "indistinguishability bound",
        budget: ms(1000),
        run: indistinguishability,
    },
    Criterion {
        id: 6,
        title: "collision-model equivalence",
        budget: None,
        run: oracle_equivalence,
    },
    Criterion {
        id: 7,
        title: "half-Gaussian pulse maximum",
        budget: None,
        run: half_gaussian,
    },
    Criterion {
        id: 8,
        title: "emitter lifetimes",
        budget: None,
        run: lifetimes,
    },
    Criterion {
        id: 9,
        title: "loss model at beta = 0.9",
        budget: None,
        run: loss_model,
    },
    Criterion {
        id: 10,
        title: "cavity ceiling",
        budget: ms(10),
        run: cavity_ceiling,
    },
    Criterion {
        id: 11,
        title: "classical spectral baseline",
        budget: ms(1000),
        run: classical_baseline,
    },
    Criterion {
        id: 12,
        title: "deterministic CSV output",
        budget: None,
        run: determinism,
    },
];

fn err(e: impl fmt::Display) -> String {
    e.to_string()
}

fn exact_values(_: &VerifyOptions) -> CheckResult {
    let mut c = Checks::new();
    let p = atom_probabilities(2.0).map_err(err)?;
    c.close("P_RR(2)", p.p_rr, 2.0 / 3.0, 1e-12);
    c.close("P_LL(2)", p.p_ll, 1.0 / 18.0, 1e-12);
    c.close("P_RL(2)", p.p_rl, 5.0 / 18.0, 1e-12);
    c.close("fidelity(3)", metrics(3.0).map_err(err)?.fidelity, 0.8125, 1e-12);
    c.close(
        "amplification(2)",
        metrics(2.0).map_err(err)?.amplification,
        4.0 / 3.0,
        1e-12,
    );
    Ok(c)
}

fn continuity(_: &VerifyOptions) -> CheckResult {
    let mut c = Checks::new();
    let p1 = atom_probabilities(1.0).map_err(err)?;
    c.close("P_RR(1)", p1.p_rr, 5.0 / 8.0, 1e-12);
    c.close("P_LL(1)", p1.p_ll, 1.0 / 8.0, 1e-12);
    c.close("P_RL(1)", p1.p_rl, 1.0 / 4.0, 1e-12);
    for a in [1.0 - 1e-4, 1.0 + 1e-4] {
        let p = atom_probabilities(a).map_err(err)?;
        let d = p.max_abs_diff(&p1);
        c.holds(&format!("|P({a}) - P(1)|"), d < 1e-3, format!("{d:.3e} < 1e-3"));
    }
    Ok(c)
}

fn normalization(_: &VerifyOptions) -> CheckResult {
    let mut c = Checks::new();
    let grid = log_grid(1e-2, 1e2, 201);
    for kind in [EmitterKind::Atom, EmitterKind::Cavity, EmitterKind::ClassicalAncilla] {
        let mut worst = 0.0f64;
        for &a in &grid {
            worst = worst.max((analytic::probabilities(kind, a).map_err(err)?.sum() - 1.0).abs());
        }
        c.holds(
            &format!("{kind} sum over 201 alphas"),
            worst <= 1e-12,
            format!("max |sum - 1| {worst:.2e}"),
        );
    }
    Ok(c)
}

fn quadrature(opts: &VerifyOptions) -> CheckResult {
    let mut c = Checks::new();
    let params = SystemParams::lossless(EmitterKind::Atom);
    let q = QuadratureOptions {
        tol: opts.quadrature_tol,
        ..Default::default()
    };
    for a in [0.3, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0] {
        let r = reconstruct(a, &params, q).map_err(err)?;
        let exact = atom_probabilities(a).map_err(err)?;
        c.probabilities(&format!("alpha {a}"), &r.probabilities, &exact, 1e-6);
        let p_rl = reconstruct_p_rl(&Pulse::exponential(a).map_err(err)?, &params).map_err(err)?;
        c.close(&format!("alpha {a} P_RL"), p_rl, exact.p_rl, 1e-6);
        c.close(
            &format!("alpha {a} P_RL = 1/2 - F/4"),
            r.probabilities.p_rl,
            0.5 - r.f_factor / 4.0,
            1e-8,
        );
    }
    Ok(c)
}

fn indistinguishability(_: &VerifyOptions) -> CheckResult {
    let mut c = Checks::new();
    c.holds(
        "P_RL(1)",
        atom_probabilities(1.0).map_err(err)?.p_rl == 0.25,
        format!("{} == 0.25", atom_probabilities(1.0).map_err(err)?.p_rl),
    );
    let p_rl = |a: f64| atom_probabilities(a).map(|p| p.p_rl).unwrap_or(f64::INFINITY);
    let (amin, _) = golden_section_min(p_rl, 0.1, 10.0, 1e-8);
    c.close("argmin P_RL", amin, 1.0, 1e-3);
    Ok(c)
}

fn exponential_config(params: SystemParams, alpha: f64, dx: f64) -> Result<OracleConfig, String> {
    Ok(OracleConfig::new(params, Pulse::exponential(alpha).map_err(err)?).with_dx(dx))
}

fn oracle_equivalence(_: &VerifyOptions) -> CheckResult {
    let mut c = Checks::new();
    let cases: Vec<(EmitterKind, f64)> = [EmitterKind::Atom, EmitterKind::Cavity]
        .into_iter()
        .flat_map(|k| [0.5, 1.0, 2.0, 5.0].map(|a| (k, a)))
        .collect();
    let runs = cases
        .par_iter()
        .map(|&(kind, a)| {
            let ev = evolve_detailed(&exponential_config(SystemParams::lossless(kind), a, 0.002)?).map_err(err)?;
            Ok((
                kind,
                a,
                ev.probabilities,
                analytic::probabilities(kind, a).map_err(err)?,
            ))
        })
        .collect::<Result<Vec<_>, String>>()?;
    for (kind, a, p, exact) in runs {
        c.probabilities(&format!("{kind} alpha {a} dx 0.002"), &p, &exact, 2e-3);
    }
    let report = convergence_report(
        &exponential_config(SystemParams::lossless(EmitterKind::Atom), 2.0, 0.02)?,
        2,
    )
    .map_err(err)?;
    let errors: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("{}: {:.2e}", r.dx, r.error))
        .collect();
    let orders: Vec<String> = report.observed_orders().iter().map(|q| format!("{q:.2}")).collect();
    c.holds(
        "convergence order >= 1 (atom, alpha 2)",
        report.at_least_first_order(),
        format!(
            "errors [{}], observed orders [{}]",
            errors.join(", "),
            orders.join(", ")
        ),
    );
    Ok(c)
}

fn half_gaussian(_: &VerifyOptions) -> CheckResult {
    let mut c = Checks::new();
    let params = SystemParams::lossless(EmitterKind::Atom);
    let p_rr = |a: f64, dx: Option<f64>| -> Result<f64, String> {
        let mut cfg = OracleConfig::new(params, Pulse::half_gaussian(a).map_err(err)?);
        if let Some(dx) = dx {
            cfg = cfg.with_dx(dx);
        }
        Ok(oracle::evolve(&cfg).map_err(err)?.0.p_rr)
    };
    let grid: Vec<f64> = (0..=14).map(|k| 1.0 + 0.1 * k as f64).collect();
    let coarse = grid
        .par_iter()
        .map(|&a| p_rr(a, None).map(|p| (a, p)))
        .collect::<Result<Vec<_>, String>>()?;
    let (a0, _) = coarse
        .iter()
        .copied()
        .fold((0.0, f64::NEG_INFINITY), |m, x| if x.1 > m.1 { x } else { m });
    let dx = 0.0025;
    let (amax, pmax) = golden_section_max(
        |a| p_rr(a, Some(dx)).unwrap_or(f64::NEG_INFINITY),
        (a0 - 0.1).max(1.0),
        (a0 + 0.1).min(2.4),
        1e-3,
    );
    if !pmax.is_finite() {
        return Err("oracle failed during refinement".into());
    }
    c.close("max P_RR", pmax, 0.65, 0.01);
    c.close("argmax alpha", amax, 1.6, 0.1);
    Ok(c)
}

fn lifetime(kind: EmitterKind, alpha: f64, dx: f64) -> Result<f64, String> {
    let cfg = exponential_config(SystemParams::lossless(kind), alpha, dx)?;
    Ok(oracle::evolve(&cfg).map_err(err)?.1.tau)
}

fn lifetimes(_: &VerifyOptions) -> CheckResult {
    let mut c = Checks::new();
    c.relative("atom tau(3)", lifetime(EmitterKind::Atom, 3.0, 0.005)?, 0.75, 0.02);
    c.relative("atom tau(100)", lifetime(EmitterKind::Atom, 100.0, 0.001)?, 1.0, 0.02);
    c.relative("atom tau(0.01)", lifetime(EmitterKind::Atom, 0.01, 0.02)?, 3.0, 0.03);
    let (amin, _) = golden_section_min(
        |a| lifetime(EmitterKind::Atom, a, 0.004).unwrap_or(f64::INFINITY),
        2.0,
        4.0,
        1e-3,
    );
    c.close("argmin atom tau", amin, 3.0, 0.1);
    for a in [0.5, 1.0, 2.0, 10.0] {
        let tau = lifetime(EmitterKind::Cavity, a, 0.005)?;
        c.holds(&format!("cavity tau({a}) > 1"), tau > 1.0, format!("{tau:.6}"));
    }
    Ok(c)
}

fn loss_model(opts: &VerifyOptions) -> CheckResult {
    let mut c = Checks::new();
    let params = SystemParams::with_beta(EmitterKind::Atom, 0.9).map_err(err)?;
    let q = QuadratureOptions {
        tol: opts.quadrature_tol,
        ..Default::default()
    };
    let quad = |a: f64| reconstruct(a, &params, q).map_err(err);
    let (amax, pmax) = golden_section_max(
        |a| quad(a).map(|r| r.probabilities.p_rr).unwrap_or(f64::NEG_INFINITY),
        1.0,
        4.0,
        1e-6,
    );
    if !pmax.is_finite() {
        return Err("quadrature failed during the maximum search".into());
    }
    c.close("max P_RR", pmax, 0.63, 0.01);
    c.close("argmax alpha", amax, 2.04, 0.05);
    let at = quad(2.04)?;
    c.lines.push(format!(
        "info alpha 2.04: P_RR {:.6}, P_LL {:.6}, P_RL {:.6}, loss {:.6}",
        at.probabilities.p_rr, at.probabilities.p_ll, at.probabilities.p_rl, at.probabilities.loss
    ));
    let runs = [1.0, 2.0, 3.0]
        .par_iter()
        .map(|&a| {
            let ev = evolve_detailed(&exponential_config(params, a, 0.005)?).map_err(err)?;
            Ok((a, ev.probabilities, quad(a)?.probabilities))
        })
        .collect::<Result<Vec<_>, String>>()?;
    for (a, oracle_p, quad_p) in runs {
        c.probabilities(&format!("oracle vs quadrature, alpha {a}"), &oracle_p, &quad_p, 1e-2);
        c.close(
            &format!("oracle vs quadrature loss, alpha {a}"),
            oracle_p.loss,
            quad_p.loss,
            1e-2,
        );
    }
    Ok(c)
}

fn cavity_ceiling(_: &VerifyOptions) -> CheckResult {
    let mut c = Checks::new();
    let mut max_rr = 0.0f64;
    let mut max_rl_diff = 0.0f64;
    for a in log_grid(1e-2, 1e2, 201) {
        let cav = cavity_probabilities(a).map_err(err)?;
        max_rr = max_rr.max(cav.p_rr);
        max_rl_diff = max_rl_diff.max((cav.p_rl - atom_probabilities(a).map_err(err)?.p_rl).abs());
    }
    c.holds("cavity P_RR < 0.5", max_rr < 0.5, format!("max {max_rr:.12}"));
    c.holds(
        "cavity P_RL = atom P_RL",
        max_rl_diff <= 1e-12,
        format!("max |diff| {max_rl_diff:.2e}"),
    );
    Ok(c)
}

fn classical_baseline(_: &VerifyOptions) -> CheckResult {
    let mut c = Checks::new();
    for a in [0.5, 1.0, 2.0, 5.0] {
        let spectral = analytic::classical_spectral(a, 1e-12).map_err(err)?;
        c.probabilities(
            &format!("alpha {a}"),
            &spectral,
            &classical_probabilities(a).map_err(err)?,
            1e-6,
        );
    }
    Ok(c)
}

fn csv_bytes(spec: &SweepSpec) -> Result<Vec<u8>, String> {
    let rows = run_sweep(spec).map_err(err)?;
    let mut buf = Vec::new();
    write_sweep(&mut buf, &rows, Format::Csv).map_err(err)?;
    Ok(buf)
}

fn determinism(_: &VerifyOptions) -> CheckResult {
    let mut c = Checks::new();
    let specs = [
        SweepSpec::default(),
        SweepSpec {
            emitter: EmitterArg::Cavity,
            method: MethodArg::Oracle,
            alpha_min: 0.5,
            alpha_max: 4.0,
            alpha_steps: 4,
            ..Default::default()
        },
    ];
    for (k, spec) in specs.iter().enumerate() {
        let first = csv_bytes(spec)?;
        let second = csv_bytes(spec)?;
        c.holds(
            &format!("sweep {} run twice", k + 1),
            first == second,
            format!("{} bytes, identical: {}", first.len(), first == second),
        );
    }
    Ok(c)
}

fn run_one(criterion: &Criterion, opts: &VerifyOptions) -> CheckOutcome {
    let start = Instant::now();
    let result = (criterion.run)(opts);
    let elapsed = start.elapsed();
    let budget = criterion.budget;
    let (mut passed, mut lines) = match result {
        Ok(c) => (c.ok, c.lines),
        Err(e) => (false, vec![format!("FAIL numerical error: {e}")]),
    };
    if let Some(b) = budget {
        let ok = elapsed <= b;
        passed &= ok;
        lines.push(format!(
            "{} runtime {:.3} ms within {:.0} ms",
            if ok { "ok  " } else { "FAIL" },
            elapsed.as_secs_f64() * 1e3,
            b.as_secs_f64() * 1e3
        ));
    }
    CheckOutcome {
        id: criterion.id,
        title: criterion.title,
        passed,
        lines,
        elapsed,
        budget,
    }
}

/// Runs the selected criteria in order, calling `on_outcome` as each one
/// finishes.
pub fn run_verify_with(opts: &VerifyOptions, mut on_outcome: impl FnMut(&CheckOutcome)) -> VerifyReport {
    let outcomes = SUITE
        .iter()
        .filter(|c| opts.only.as_ref().is_none_or(|ids| ids.contains(&c.id)))
        .map(|c| {
            let o = run_one(c, opts);
            on_outcome(&o);
            o
        })
        .collect();
    VerifyReport { outcomes }
}

pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    run_verify_with(opts, |_| {})
}
