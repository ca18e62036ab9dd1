//! Quadrature, compensated summation and 1D extremum search.
//!
//! The adaptive rules are global-subdivision Gauss-Kronrod (7/15 points per
//! axis). Every result is summed in a fixed order with Neumaier compensation,
//! so a given node set always produces bit-identical output regardless of
//! how many worker threads evaluated the cells.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Kronrod abscissae on [-1, 1], non-negative half, descending.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Gauss weights for the odd-indexed Kronrod abscissae.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// The 15 Kronrod nodes on [-1, 1] with their Kronrod and embedded Gauss
/// weights (zero where the node is not a Gauss node).
fn gk15_rule() -> [(f64, f64, f64); 15] {
    let mut rule = [(0.0, 0.0, 0.0); 15];
    for j in 0..7 {
        let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
        rule[j] = (-XGK[j], WGK[j], wg);
        rule[14 - j] = (XGK[j], WGK[j], wg);
    }
    rule[7] = (0.0, WGK[7], WG[3]);
    rule
}

/// Running sum with Neumaier compensation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn neumaier_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = Neumaier::default();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// `(1 - exp(-y)) / y`, finite and accurate through `y = 0`.
#[inline]
pub fn one_minus_exp_over(y: f64) -> f64 {
    if y.abs() < 1e-5 {
        1.0 - y / 2.0 + y * y / 6.0
    } else {
        -(-y).exp_m1() / y
    }
}

/// Value of an adaptive integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

struct Cell1 {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    id: usize,
}

impl PartialEq for Cell1 {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell1 {}
impl PartialOrd for Cell1 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell1 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.id.cmp(&self.id))
    }
}

fn gk15_1d<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = Complex64::new(0.0, 0.0);
    let mut g = Complex64::new(0.0, 0.0);
    for (x, wk, wg) in gk15_rule() {
        let v = f(c + h * x);
        k += v * wk;
        g += v * wg;
    }
    (k * h, ((k - g) * h).norm())
}

/// Adaptive complex integral of `f` over `[a, b]`, subdivided at the given
/// interior breakpoints first.
pub fn integrate_1d<F: Fn(f64) -> Complex64>(
    f: F,
    breakpoints: &[f64],
    tol: f64,
    max_evaluations: usize,
) -> Result<Integral<Complex64>> {
    assert!(breakpoints.len() >= 2, "need at least the two end points");
    let mut heap = BinaryHeap::new();
    let mut next_id = 0;
    let mut evaluations = 0;
    for w in breakpoints.windows(2) {
        let (value, error) = gk15_1d(&f, w[0], w[1]);
        evaluations += 15;
        heap.push(Cell1 {
            a: w[0],
            b: w[1],
            value,
            error,
            id: next_id,
        });
        next_id += 1;
    }
    let total_error = |heap: &BinaryHeap<Cell1>| neumaier_sum(heap.iter().map(|c| c.error));
    while total_error(&heap) > tol {
        if evaluations + 30 > max_evaluations {
            return Err(Error::QuadratureNotConverged {
                estimate: total_error(&heap),
                tolerance: tol,
                nodes: evaluations,
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15_1d(&f, a, b);
            heap.push(Cell1 {
                a,
                b,
                value,
                error,
                id: next_id,
            });
            next_id += 1;
        }
        evaluations += 30;
    }
    let mut cells = heap.into_vec();
    cells.sort_by_key(|c| c.id);
    let re = neumaier_sum(cells.iter().map(|c| c.value.re));
    let im = neumaier_sum(cells.iter().map(|c| c.value.im));
    let error = neumaier_sum(cells.iter().map(|c| c.error));
    Ok(Integral {
        value: Complex64::new(re, im),
        error,
        evaluations,
    })
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    fn quarters(&self) -> [Rect; 4] {
        let xm = 0.5 * (self.x0 + self.x1);
        let ym = 0.5 * (self.y0 + self.y1);
        [
            Rect {
                x1: xm,
                y1: ym,
                ..*self
            },
            Rect {
                x0: xm,
                y1: ym,
                ..*self
            },
            Rect {
                x1: xm,
                y0: ym,
                ..*self
            },
            Rect {
                x0: xm,
                y0: ym,
                ..*self
            },
        ]
    }
}

struct Cell2<const M: usize> {
    rect: Rect,
    value: [f64; M],
    error: f64,
    id: usize,
}

impl<const M: usize> PartialEq for Cell2<M> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<const M: usize> Eq for Cell2<M> {}
impl<const M: usize> PartialOrd for Cell2<M> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const M: usize> Ord for Cell2<M> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.id.cmp(&self.id))
    }
}

pub const NODES_PER_CELL_2D: usize = 225;

fn gk15_2d<const M: usize, F>(f: &F, r: &Rect) -> ([f64; M], f64)
where
    F: Fn(f64, f64) -> [f64; M],
{
    let rule = gk15_rule();
    let (cx, hx) = (0.5 * (r.x0 + r.x1), 0.5 * (r.x1 - r.x0));
    let (cy, hy) = (0.5 * (r.y0 + r.y1), 0.5 * (r.y1 - r.y0));
    let mut k = [0.0; M];
    let mut g = [0.0; M];
    for &(x, wkx, wgx) in &rule {
        let mut kr = [0.0; M];
        let mut gr = [0.0; M];
        for &(y, wky, wgy) in &rule {
            let v = f(cx + hx * x, cy + hy * y);
            for m in 0..M {
                kr[m] += wky * v[m];
                gr[m] += wgy * v[m];
            }
        }
        for m in 0..M {
            k[m] += wkx * kr[m];
            g[m] += wgx * gr[m];
        }
    }
    let jac = hx * hy;
    let mut err = 0.0_f64;
    for m in 0..M {
        k[m] *= jac;
        g[m] *= jac;
        err = err.max((k[m] - g[m]).abs());
    }
    (k, err)
}

/// Adaptive cubature of an `M`-component real integrand over a rectangle.
///
/// The error estimate of a cell is the largest component deviation between
/// the tensor Kronrod and Gauss rules; subdivision stops once the summed
/// estimate drops below `tol`. Children of a split cell are evaluated in
/// parallel.
pub fn integrate_2d<const M: usize, F>(f: F, domain: Rect, tol: f64, max_nodes: usize) -> Result<Integral<[f64; M]>>
where
    F: Fn(f64, f64) -> [f64; M] + Sync,
{
    let mut heap = BinaryHeap::new();
    let (value, error) = gk15_2d(&f, &domain);
    heap.push(Cell2 {
        rect: domain,
        value,
        error,
        id: 0,
    });
    let mut next_id = 1;
    let mut nodes = NODES_PER_CELL_2D;
    let mut total_error = error;
    while total_error > tol {
        if nodes + 4 * NODES_PER_CELL_2D > max_nodes {
            return Err(Error::QuadratureNotConverged {
                estimate: total_error,
                tolerance: tol,
                nodes,
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let children: Vec<_> = worst.rect.quarters().par_iter().map(|r| (*r, gk15_2d(&f, r))).collect();
        for (rect, (value, error)) in children {
            heap.push(Cell2 {
                rect,
                value,
                error,
                id: next_id,
            });
            next_id += 1;
        }
        nodes += 4 * NODES_PER_CELL_2D;
        // Recomputed rather than updated incrementally so the stopping test
        // is immune to drift.
        total_error = neumaier_sum(heap.iter().map(|c| c.error));
    }
    let mut cells = heap.into_vec();
    cells.sort_by_key(|c| c.id);
    let mut value = [0.0; M];
    for (m, v) in value.iter_mut().enumerate() {
        *v = neumaier_sum(cells.iter().map(|c| c.value[m]));
    }
    Ok(Integral {
        value,
        error: neumaier_sum(cells.iter().map(|c| c.error)),
        evaluations: nodes,
    })
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximizer of a unimodal `f` on `[a, b]`.
/// Returns `(argmax, max)`; stops when the bracket is narrower than `tol`.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Golden-section search for the minimizer; see [`golden_section_max`].
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (x, v) = golden_section_max(|x| -f(x), a, b, tol);
    (x, -v)
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (l0, l1) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| {
                    if i == 0 {
                        lo
                    } else if i == n - 1 {
                        hi
                    } else {
                        (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}
