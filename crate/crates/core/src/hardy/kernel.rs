//! The averaging kernel `R(x,y)` in its three flavours and the two constants.

use crate::error::{Error, Result};
use crate::generators::Generator;
use crate::hardy::scenario::SupNormalization;
use crate::pseudo_integral::{g_integral_2d, PsiDensity};
use crate::quadrature::{integrate_2d_with, Quadrature, Rect, Status};
use crate::semiring::Semiring;

/// `(p/(p-1))^{2p}`.
pub fn hardy_constant(p: f64) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Hypothesis(format!(
            "the Hardy constant needs a finite p > 1 (got {p}); use remark diagnostics for p <= 1"
        )));
    }
    let direct = (p / (p - 1.0)).powf(2.0 * p);
    if direct.is_finite() {
        return Ok(direct);
    }
    // p within rounding of 1: work with ln(p/(p-1)) = -ln(1 - 1/p)
    Ok((-2.0 * p * (-1.0 / p).ln_1p()).exp())
}

/// `(4/5)^{16p/(9(2p+1))}` for `p ≥ 1`; `p = ∞` gives the limit `(4/5)^{8/9}`.
pub fn sugeno_hardy_constant(p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Hypothesis(format!("the Sugeno Hardy constant needs p >= 1 (got {p})")));
    }
    let exponent = if p.is_infinite() { 8.0 / 9.0 } else { 16.0 * p / (9.0 * (2.0 * p + 1.0)) };
    Ok(0.8f64.powf(exponent))
}

/// `R(x,y) = (1/(xy)) ∫^⊕_{[0,x]} ∫^⊕_{[0,y]} f(s,t) dt ds`.
///
/// `q.tol` bounds the error of the integral before the division by `xy`.
pub fn hardy_kernel_g<F>(gen: &Generator, f: F, x: f64, y: f64, q: &Quadrature) -> Result<f64>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    if !(x > 0.0 && x <= 1.0 && y > 0.0 && y <= 1.0) {
        return Err(Error::Invalid(format!("kernel point ({x}, {y}) must lie in (0,1]²")));
    }
    let integral = g_integral_2d(gen, f, &Rect::origin_to(x, y)?, q)?;
    Ok(integral.value / (x * y))
}

/// `R` at every node `(i·x_high/n, j·y_high/n)`, `0 ≤ i, j ≤ n`, row-major
/// in `i`. Each grid cell is integrated once and the cell integrals are
/// accumulated, so a whole grid costs about one adaptive integral per cell.
/// Nodes on an axis, where `R` is undefined, hold `NaN`.
pub fn hardy_kernel_g_grid<F>(gen: &Generator, mut f: F, x_high: f64, y_high: f64, n: usize, q: &Quadrature) -> Result<Vec<f64>>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    if !(x_high > 0.0 && x_high <= 1.0 && y_high > 0.0 && y_high <= 1.0) || n == 0 {
        return Err(Error::Invalid(format!("kernel grid to ({x_high}, {y_high}) with {n} cells")));
    }
    let w = n + 1;
    let x = |i: usize| if i == n { x_high } else { x_high * i as f64 / n as f64 };
    let y = |j: usize| if j == n { y_high } else { y_high * j as f64 / n as f64 };
    // cell errors add up over at most n² cells below any node
    let cell_q = Quadrature { tol: q.tol / (n * n) as f64, ..*q };
    let mut acc = vec![0.0; w * w];
    for i in 1..=n {
        for j in 1..=n {
            let cell = Rect::new(x(i - 1), x(i), y(j - 1), y(j))?;
            let r = integrate_2d_with(|s, t| Ok(gen.eval_forward(f(s, t)?)?), &cell, &cell_q)?;
            if r.status == Status::Diverged {
                return Err(Error::Diverged { partial: r.value });
            }
            acc[i * w + j] = r.value + acc[(i - 1) * w + j] + acc[i * w + j - 1] - acc[(i - 1) * w + j - 1];
        }
    }
    let mut out = vec![f64::NAN; w * w];
    for i in 1..=n {
        for j in 1..=n {
            out[i * w + j] = gen.eval_inverse(acc[i * w + j])? / (x(i) * y(j));
        }
    }
    Ok(out)
}

/// Sup-integral kernel sampled on the nodes `i·x_high/n`, `j·y_high/n`.
#[derive(Debug, Clone)]
pub struct SupKernelGrid {
    pub n: usize,
    pub x_high: f64,
    pub y_high: f64,
    /// `f` at the nodes, `NaN` where it could not be evaluated.
    pub f: Vec<f64>,
    /// Kernel values, row-major in `x`.
    pub r: Vec<f64>,
    pub saturated: bool,
    pub skipped: usize,
}

impl SupKernelGrid {
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.x_high / self.n as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.y_high / self.n as f64
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.r[i * (self.n + 1) + j]
    }

    pub fn f_at(&self, i: usize, j: usize) -> f64 {
        self.f[i * (self.n + 1) + j]
    }
}

/// Builds the sup-integral kernel on a `(2^levels + 1)²` grid over
/// `[0,x_high]×[0,y_high]` from running maxima of `(f ⊙ ψ(y)) ⊙ ψ(x)`.
pub fn sup_kernel_grid<F>(
    s: &Semiring,
    mut f: F,
    psi: &PsiDensity,
    x_high: f64,
    y_high: f64,
    levels: u32,
    normalization: SupNormalization,
    inset: f64,
) -> Result<SupKernelGrid>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    if levels > 14 {
        return Err(Error::Invalid(format!("sup kernel grid levels {levels} exceed 14")));
    }
    let n = 1usize << levels;
    let width = n + 1;
    let node_x = |i: usize| i as f64 * x_high / n as f64;
    let node_y = |j: usize| j as f64 * y_high / n as f64;
    let psi_x: Vec<f64> = (0..width).map(|i| psi.eval(node_x(i))).collect::<Result<_>>()?;
    let psi_y: Vec<f64> = (0..width).map(|j| psi.eval(node_y(j))).collect::<Result<_>>()?;
    let mut saturated = false;
    let mut skipped = 0;
    let mut fv = vec![f64::NAN; width * width];
    // running maxima of the weighted integrand and of the weighted unit
    let mut sup_f = vec![f64::NEG_INFINITY; width * width];
    let mut sup_unit = vec![f64::NEG_INFINITY; width * width];
    for i in 0..width {
        for j in 0..width {
            let k = i * width + j;
            let weighted = |v: f64, saturated: &mut bool| -> Result<f64> {
                let inner = s.pseudo_mul(v, psi_y[j])?;
                let outer = s.pseudo_mul(inner.value, psi_x[i])?;
                *saturated |= inner.saturated || outer.saturated;
                Ok(outer.value)
            };
            let here = match f(node_x(i), node_y(j)) {
                Ok(v) if v.is_finite() => {
                    fv[k] = v;
                    weighted(v, &mut saturated)?
                }
                _ => {
                    skipped += 1;
                    f64::NEG_INFINITY
                }
            };
            let unit = weighted(s.unit, &mut saturated)?;
            let mut best = here;
            let mut best_unit = unit;
            if i > 0 {
                best = best.max(sup_f[k - width]);
                best_unit = best_unit.max(sup_unit[k - width]);
            }
            if j > 0 {
                best = best.max(sup_f[k - 1]);
                best_unit = best_unit.max(sup_unit[k - 1]);
            }
            sup_f[k] = best;
            sup_unit[k] = best_unit;
        }
    }
    let mut r = vec![f64::NAN; width * width];
    for i in 0..width {
        for j in 0..width {
            let k = i * width + j;
            if !sup_f[k].is_finite() {
                continue;
            }
            r[k] = match normalization {
                SupNormalization::RectMeasure => {
                    let v = s.pseudo_div(sup_f[k], sup_unit[k])?;
                    saturated |= v.saturated;
                    v.value
                }
                SupNormalization::Area => sup_f[k] / (node_x(i).max(inset) * node_y(j).max(inset)),
            };
        }
    }
    Ok(SupKernelGrid { n, x_high, y_high, f: fv, r, saturated, skipped })
}

/// Sugeno integral of a step function over every origin-anchored block of a
/// grid, computed with one sweep per row.
///
/// `values[i * n + j]` is the value on cell `(i, j)`, each cell of measure
/// `cell`. The result at `(i - 1) * n + (j - 1)` is the Sugeno integral over
/// the cells `[0, i) × [0, j)`.
pub fn sugeno_prefix_blocks(values: &[f64], n: usize, cell: f64) -> Vec<f64> {
    let total = n * n;
    assert_eq!(values.len(), total);
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_unstable_by(|a, b| values[*b].total_cmp(&values[*a]));
    let mut rank = vec![0usize; total];
    let mut sorted = Vec::with_capacity(total);
    for (r, c) in order.iter().enumerate() {
        rank[*c] = r;
        sorted.push(values[*c]);
    }
    let mut tree = Fenwick::new(total);
    let mut out = vec![0.0; total];
    for i in 1..=n {
        tree.clear();
        for j in 1..=n {
            for row in 0..i {
                tree.add(rank[row * n + j - 1]);
            }
            // First rank where the measure of the upper level set reaches the value.
            let (len, count) = tree.descend(|len, count| cell * count as f64 >= sorted[len - 1]);
            let mut best = cell * count as f64;
            if len < total {
                best = best.max(sorted[len].min(cell * (count + tree.count_at(len)) as f64));
            }
            out[(i - 1) * n + (j - 1)] = best;
        }
    }
    out
}

/// Counts over ranks with prefix sums.
struct Fenwick {
    tree: Vec<u32>,
    raw: Vec<u32>,
    top: usize,
}

impl Fenwick {
    fn new(n: usize) -> Fenwick {
        let top = if n == 0 { 0 } else { 1 << (usize::BITS - 1 - n.leading_zeros()) };
        Fenwick { tree: vec![0; n + 1], raw: vec![0; n], top }
    }

    fn clear(&mut self) {
        self.tree.iter_mut().for_each(|v| *v = 0);
        self.raw.iter_mut().for_each(|v| *v = 0);
    }

    fn add(&mut self, at: usize) {
        self.raw[at] += 1;
        let mut k = at + 1;
        while k < self.tree.len() {
            self.tree[k] += 1;
            k += k & k.wrapping_neg();
        }
    }

    fn count_at(&self, at: usize) -> u32 {
        self.raw[at]
    }

    /// Largest `len` for which `crossed(len, prefix_count(len))` is false,
    /// assuming `crossed` is monotone in `len`. Returns `(len, prefix_count)`.
    fn descend(&self, crossed: impl Fn(usize, u32) -> bool) -> (usize, u32) {
        let mut pos = 0;
        let mut acc = 0;
        let mut step = self.top;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && !crossed(next, acc + self.tree[next]) {
                pos = next;
                acc += self.tree[next];
            }
            step >>= 1;
        }
        (pos, acc)
    }
}
