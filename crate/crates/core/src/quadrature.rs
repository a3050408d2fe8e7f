//! Classical quadrature, sup-scanning and level-set measures on `[0,1]` and
//! `[0,1]²`.
//!
//! 1-D integrals use globally adaptive Simpson with a Richardson error
//! estimate: the panel with the largest estimated error is bisected until the
//! summed estimate drops below the tolerance or the depth budget runs out.
//! Double integrals are iterated, inner in `t` and outer in `s`.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inward shift applied to nodes where the integrand cannot be evaluated.
pub const NODE_SHIFT: f64 = 1e-12;

/// Tail-increment ratio at or above which a boundary singularity is treated
/// as non-integrable.
const DIVERGENCE_RATIO: f64 = 0.999;
const PROBE_LEVELS: std::ops::RangeInclusive<i32> = 4..=16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxRefinement,
    Diverged,
}

impl Status {
    /// The less trustworthy of two statuses.
    pub fn worst(self, other: Status) -> Status {
        fn rank(s: Status) -> u8 {
            match s {
                Status::Converged => 0,
                Status::MaxRefinement => 1,
                Status::Diverged => 2,
            }
        }
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub status: Status,
}

/// Quadrature settings. `fixed_panels` switches from adaptive refinement to a
/// composite Simpson rule with that many panels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Quadrature {
    pub tol: f64,
    pub max_depth: u32,
    pub max_evaluations: usize,
    pub fixed_panels: Option<usize>,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { tol: 1e-8, max_depth: 30, max_evaluations: 200_000, fixed_panels: None }
    }
}

impl Quadrature {
    pub fn with_tol(tol: f64) -> Quadrature {
        Quadrature { tol, ..Quadrature::default() }
    }

    pub fn composite(panels: usize) -> Quadrature {
        Quadrature { fixed_panels: Some(panels.max(1)), ..Quadrature::default() }
    }

    fn inner(&self) -> Quadrature {
        Quadrature { tol: self.tol * 0.1, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_low: f64,
    pub x_high: f64,
    pub y_low: f64,
    pub y_high: f64,
}

impl Rect {
    pub fn new(x_low: f64, x_high: f64, y_low: f64, y_high: f64) -> Result<Rect> {
        let inside = |v: f64| (0.0..=1.0).contains(&v);
        if !(x_low < x_high && y_low < y_high) || ![x_low, x_high, y_low, y_high].into_iter().all(inside)
        {
            return Err(Error::Invalid(format!(
                "rectangle [{x_low},{x_high}]x[{y_low},{y_high}] must be non-degenerate inside [0,1]^2"
            )));
        }
        Ok(Rect { x_low, x_high, y_low, y_high })
    }

    pub fn unit() -> Rect {
        Rect { x_low: 0.0, x_high: 1.0, y_low: 0.0, y_high: 1.0 }
    }

    /// `[0,x] × [0,y]`.
    pub fn origin_to(x: f64, y: f64) -> Result<Rect> {
        Rect::new(0.0, x, 0.0, y)
    }

    pub fn area(&self) -> f64 {
        (self.x_high - self.x_low) * (self.y_high - self.y_low)
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.x_low <= other.x_low
            && other.x_high <= self.x_high
            && self.y_low <= other.y_low
            && other.y_high <= self.y_high
    }
}

/// Sum with pairwise splitting, so the result does not depend on how panels
/// were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

struct Evaluator<'f, F> {
    f: &'f mut F,
    low: f64,
    high: f64,
    count: usize,
}

impl<F: FnMut(f64) -> Result<f64>> Evaluator<'_, F> {
    /// Evaluates, retrying once at a node nudged towards the interior when the
    /// integrand fails or is non-finite there.
    fn at(&mut self, x: f64) -> Result<f64> {
        self.count += 1;
        match (self.f)(x) {
            Ok(v) if v.is_finite() => return Ok(v),
            Ok(_) | Err(_) => {}
        }
        let shifted = if x >= self.high { x - NODE_SHIFT } else { x + NODE_SHIFT };
        self.count += 1;
        match (self.f)(shifted) {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(v) => Err(Error::Node { at: x, message: format!("non-finite value {v}") }),
            Err(e) => Err(e),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    // values at a, a+h/4, a+h/2, a+3h/4, b
    f: [f64; 5],
    value: f64,
    error: f64,
    depth: u32,
}

impl Panel {
    fn new(a: f64, b: f64, f: [f64; 5], depth: u32) -> Panel {
        let h = b - a;
        let coarse = h / 6.0 * (f[0] + 4.0 * f[2] + f[4]);
        let fine = h / 12.0 * (f[0] + 4.0 * f[1] + 2.0 * f[2] + 4.0 * f[3] + f[4]);
        let diff = fine - coarse;
        Panel { a, b, f, value: fine + diff / 15.0, error: diff.abs() / 15.0, depth }
    }
}

struct ByError(Panel);

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.error.total_cmp(&other.0.error).then_with(|| other.0.a.total_cmp(&self.0.a))
    }
}

fn make_panel<F: FnMut(f64) -> Result<f64>>(
    ev: &mut Evaluator<'_, F>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    depth: u32,
) -> Result<Panel> {
    let h = b - a;
    let f1 = ev.at(a + 0.25 * h)?;
    let f3 = ev.at(a + 0.75 * h)?;
    Ok(Panel::new(a, b, [fa, f1, fm, f3, fb], depth))
}

/// `∫_low^high f` with the default settings and tolerance `tol`.
pub fn integrate_1d<F>(f: F, low: f64, high: f64, tol: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate_1d_with(f, low, high, &Quadrature::with_tol(tol))
}

/// `∫_low^high f`.
///
/// An integrand that still fails after the inward node shift aborts with its
/// error, except [`Error::Diverged`] from a nested integral, which turns into
/// a `Diverged` status.
pub fn integrate_1d_with<F>(mut f: F, low: f64, high: f64, q: &Quadrature) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(low < high) || !low.is_finite() || !high.is_finite() {
        return Err(Error::Invalid(format!("integration bounds [{low}, {high}]")));
    }
    if !(q.tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance {} must be positive", q.tol)));
    }
    let mut ev = Evaluator { f: &mut f, low, high, count: 0 };
    let outcome = match q.fixed_panels {
        Some(n) => composite(&mut ev, n, q.tol),
        None => adaptive(&mut ev, q),
    };
    match outcome {
        Ok(mut r) => {
            r.evaluations = ev.count;
            Ok(r)
        }
        Err(Error::Diverged { partial }) => Ok(QuadratureResult {
            value: partial,
            error_estimate: f64::INFINITY,
            evaluations: ev.count,
            status: Status::Diverged,
        }),
        Err(e) => Err(e),
    }
}

fn composite<F: FnMut(f64) -> Result<f64>>(
    ev: &mut Evaluator<'_, F>,
    panels: usize,
    tol: f64,
) -> Result<QuadratureResult> {
    let panels = panels.max(1);
    let (low, high) = (ev.low, ev.high);
    let n = 2 * panels;
    let h = (high - low) / n as f64;
    let mut nodes = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let x = if i == n { high } else { low + i as f64 * h };
        nodes.push(ev.at(x)?);
    }
    let fine: Vec<f64> = (0..panels)
        .map(|p| 2.0 * h / 6.0 * (nodes[2 * p] + 4.0 * nodes[2 * p + 1] + nodes[2 * p + 2]))
        .collect();
    let value = pairwise_sum(&fine);
    let error_estimate = if panels.is_multiple_of(2) {
        let coarse: Vec<f64> = (0..panels / 2)
            .map(|p| 4.0 * h / 6.0 * (nodes[4 * p] + 4.0 * nodes[4 * p + 2] + nodes[4 * p + 4]))
            .collect();
        (value - pairwise_sum(&coarse)).abs() / 15.0
    } else {
        f64::NAN
    };
    let status = if error_estimate <= tol { Status::Converged } else { Status::MaxRefinement };
    Ok(QuadratureResult { value, error_estimate, evaluations: 0, status })
}

fn adaptive<F: FnMut(f64) -> Result<f64>>(
    ev: &mut Evaluator<'_, F>,
    q: &Quadrature,
) -> Result<QuadratureResult> {
    let (low, high) = (ev.low, ev.high);
    let mid = 0.5 * (low + high);
    let f_low = ev.at(low)?;
    let f_mid = ev.at(mid)?;
    let f_high = ev.at(high)?;
    let root = make_panel(ev, low, high, f_low, f_mid, f_high, 0)?;

    let mut heap = BinaryHeap::new();
    // Always split the root twice so that coincidental cancellation in a
    // single five-point estimate cannot end the search early.
    let mut seed = vec![root];
    for _ in 0..2 {
        let mut next = Vec::with_capacity(seed.len() * 2);
        for p in seed {
            let (l, r) = split(ev, &p)?;
            next.push(l);
            next.push(r);
        }
        seed = next;
    }
    for p in seed {
        heap.push(ByError(p));
    }

    let mut stalled = false;
    let mut total: f64 = heap.iter().map(|p| p.0.error).sum();
    loop {
        if total <= q.tol {
            // the running total drifts; confirm before stopping
            total = heap.iter().map(|p| p.0.error).sum();
            if total <= q.tol {
                break;
            }
        }
        let worst = heap.pop().expect("heap is never empty");
        if worst.0.depth >= q.max_depth || ev.count >= q.max_evaluations {
            heap.push(worst);
            stalled = true;
            break;
        }
        match split(ev, &worst.0) {
            Ok((l, r)) => {
                total += l.error + r.error - worst.0.error;
                heap.push(ByError(l));
                heap.push(ByError(r));
            }
            Err(Error::Diverged { .. }) => {
                heap.push(worst);
                return Err(Error::Diverged { partial: summed(&heap).0 });
            }
            Err(e) => return Err(e),
        }
    }

    let worst = heap.peek().map(|p| p.0);
    let (value, error_estimate) = summed(&heap);
    let mut status = if error_estimate <= q.tol { Status::Converged } else { Status::MaxRefinement };
    if stalled && status != Status::Converged {
        if let Some(w) = worst {
            if (w.a == low || w.b == high) && boundary_diverges(ev, w.a == low) {
                status = Status::Diverged;
            }
        }
    }
    Ok(QuadratureResult { value, error_estimate, evaluations: 0, status })
}

fn summed(heap: &BinaryHeap<ByError>) -> (f64, f64) {
    let mut panels: Vec<Panel> = heap.iter().map(|p| p.0).collect();
    panels.sort_by(|a, b| a.a.total_cmp(&b.a));
    let values: Vec<f64> = panels.iter().map(|p| p.value).collect();
    let errors: Vec<f64> = panels.iter().map(|p| p.error).collect();
    (pairwise_sum(&values), pairwise_sum(&errors))
}

fn split<F: FnMut(f64) -> Result<f64>>(ev: &mut Evaluator<'_, F>, p: &Panel) -> Result<(Panel, Panel)> {
    let m = 0.5 * (p.a + p.b);
    let left = make_panel(ev, p.a, m, p.f[0], p.f[1], p.f[2], p.depth + 1)?;
    let right = make_panel(ev, m, p.b, p.f[2], p.f[3], p.f[4], p.depth + 1)?;
    Ok((left, right))
}

/// Integrates over the dyadic shells `[e + w·2^{-k-1}, e + w·2^{-k}]`
/// approaching the endpoint `e`. A non-integrable singularity shows up as
/// shell contributions that stop shrinking (ratio ≥ 1 for `x^{-1}`, 2 for
/// `x^{-2}`); integrable ones decay geometrically.
fn boundary_diverges<F: FnMut(f64) -> Result<f64>>(ev: &mut Evaluator<'_, F>, at_low: bool) -> bool {
    let (low, high) = (ev.low, ev.high);
    let w = high - low;
    let mut shells = Vec::new();
    for k in PROBE_LEVELS {
        let near = w * 2f64.powi(-k - 1);
        let far = w * 2f64.powi(-k);
        let (a, b) = if at_low { (low + near, low + far) } else { (high - far, high - near) };
        let h = (b - a) / 4.0;
        let mut vals = [0.0; 5];
        for (i, v) in vals.iter_mut().enumerate() {
            match ev.at(a + i as f64 * h) {
                Ok(x) => *v = x,
                Err(_) => return false,
            }
        }
        let s = h / 3.0 * (vals[0] + 4.0 * vals[1] + 2.0 * vals[2] + 4.0 * vals[3] + vals[4]);
        shells.push(s.abs());
    }
    if shells.contains(&0.0) {
        return false;
    }
    shells.windows(2).all(|w| w[1] / w[0] >= DIVERGENCE_RATIO)
}

/// Iterated double integral `∫_{x_low}^{x_high} ∫_{y_low}^{y_high} f(s,t) dt ds`.
pub fn integrate_2d<F>(f: F, r: &Rect, tol: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    integrate_2d_with(f, r, &Quadrature::with_tol(tol))
}

pub fn integrate_2d_with<F>(mut f: F, r: &Rect, q: &Quadrature) -> Result<QuadratureResult>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let inner_q = q.inner();
    let inner_status = Cell::new(Status::Converged);
    let inner_evals = Cell::new(0usize);
    let outer = integrate_1d_with(
        |s| {
            let inner = integrate_1d_with(|t| f(s, t), r.y_low, r.y_high, &inner_q)?;
            inner_evals.set(inner_evals.get() + inner.evaluations);
            match inner.status {
                Status::Diverged => Err(Error::Diverged { partial: inner.value }),
                st => {
                    inner_status.set(inner_status.get().worst(st));
                    Ok(inner.value)
                }
            }
        },
        r.x_low,
        r.x_high,
        q,
    )?;
    Ok(QuadratureResult {
        value: outer.value,
        error_estimate: outer.error_estimate,
        evaluations: inner_evals.get(),
        status: outer.status.worst(inner_status.get()),
    })
}

/// Maximum found by a grid scan plus one local refinement pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupResult {
    pub value: f64,
    pub x: f64,
    pub y: f64,
    /// Grid nodes skipped because the function failed there.
    pub skipped: usize,
}

const LOCAL_POINTS: usize = 17;

/// Maximum of `f` over `r` on a `(2^levels + 1)²` grid, then refined on a
/// finer grid spanning the cells around the best node.
pub fn sup_scan_2d<F>(mut f: F, r: &Rect, levels: u32) -> Result<SupResult>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let n = 1usize << levels.clamp(1, 14);
    let hx = (r.x_high - r.x_low) / n as f64;
    let hy = (r.y_high - r.y_low) / n as f64;
    let mut best: Option<SupResult> = None;
    let mut skipped = 0;
    let mut visit = |x: f64, y: f64, best: &mut Option<SupResult>, skipped: &mut usize| match f(x, y) {
        Ok(v) if !v.is_nan() => {
            if best.is_none_or(|b| v > b.value) {
                *best = Some(SupResult { value: v, x, y, skipped: 0 });
            }
        }
        _ => *skipped += 1,
    };
    for i in 0..=n {
        let x = if i == n { r.x_high } else { r.x_low + i as f64 * hx };
        for j in 0..=n {
            let y = if j == n { r.y_high } else { r.y_low + j as f64 * hy };
            visit(x, y, &mut best, &mut skipped);
        }
    }
    let coarse = best.ok_or_else(|| Error::Invalid("no grid node could be evaluated".into()))?;
    let (x0, x1) = ((coarse.x - hx).max(r.x_low), (coarse.x + hx).min(r.x_high));
    let (y0, y1) = ((coarse.y - hy).max(r.y_low), (coarse.y + hy).min(r.y_high));
    let m = LOCAL_POINTS - 1;
    for i in 0..=m {
        let x = x0 + (x1 - x0) * i as f64 / m as f64;
        for j in 0..=m {
            let y = y0 + (y1 - y0) * j as f64 / m as f64;
            visit(x, y, &mut best, &mut skipped);
        }
    }
    let mut out = best.expect("coarse pass found a value");
    out.skipped = skipped;
    Ok(out)
}

/// 1-D counterpart of [`sup_scan_2d`] on `[low, high]`; the result's `y` is 0.
pub fn sup_scan_1d<F>(mut f: F, low: f64, high: f64, levels: u32) -> Result<SupResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let r = Rect { x_low: low, x_high: high, y_low: 0.0, y_high: 0.0 };
    let n = 1usize << levels.clamp(1, 24);
    let h = (r.x_high - r.x_low) / n as f64;
    let mut best: Option<(f64, f64)> = None;
    let mut skipped = 0;
    let mut visit = |x: f64, best: &mut Option<(f64, f64)>| match f(x) {
        Ok(v) if !v.is_nan() => {
            if best.is_none_or(|b| v > b.0) {
                *best = Some((v, x));
            }
        }
        _ => skipped += 1,
    };
    for i in 0..=n {
        let x = if i == n { high } else { low + i as f64 * h };
        visit(x, &mut best);
    }
    let (_, xb) = best.ok_or_else(|| Error::Invalid("no grid node could be evaluated".into()))?;
    let (x0, x1) = ((xb - h).max(low), (xb + h).min(high));
    let m = 4 * LOCAL_POINTS;
    for i in 0..=m {
        visit(x0 + (x1 - x0) * i as f64 / m as f64, &mut best);
    }
    let (value, x) = best.expect("coarse pass found a value");
    Ok(SupResult { value, x, y: 0.0, skipped })
}

/// Lebesgue measure of `{(s,t) ∈ r : f(s,t) ≥ alpha}` by counting the
/// midpoints of a `grid × grid` partition.
pub fn measure_level_set<F>(mut f: F, r: &Rect, alpha: f64, grid: usize) -> Result<f64>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let grid = grid.max(2);
    let hx = (r.x_high - r.x_low) / grid as f64;
    let hy = (r.y_high - r.y_low) / grid as f64;
    let mut count = 0usize;
    for i in 0..grid {
        let x = r.x_low + (i as f64 + 0.5) * hx;
        for j in 0..grid {
            let y = r.y_low + (j as f64 + 0.5) * hy;
            if f(x, y)? >= alpha {
                count += 1;
            }
        }
    }
    Ok(count as f64 * hx * hy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(v: f64) -> Result<f64> {
        Ok(v)
    }

    #[test]
    fn polynomials_up_to_cubic_are_exact() {
        let r = integrate_1d(|x| ok(x * x), 0.0, 1.0, 1e-10).unwrap();
        assert_eq!(r.status, Status::Converged);
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
        let r = integrate_1d(|x| ok(4.0 * x * x * x - x + 2.0), 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value - 2.5).abs() < 1e-12);
        let r = integrate_1d_with(|x| ok(x * x * x), 0.0, 1.0, &Quadrature::composite(1)).unwrap();
        assert!((r.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn endpoint_derivative_singularity() {
        // (4/5) x^{5/4} antiderivative
        let r = integrate_1d(|x: f64| ok(x.powf(0.25)), 0.0, 1.0, 1e-8).unwrap();
        assert_eq!(r.status, Status::Converged);
        assert!((r.value - 0.8).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn inverse_square_diverges() {
        let f = |x: f64| if x == 0.0 { Err(Error::Invalid("pole".into())) } else { ok(x.powi(-2)) };
        let r = integrate_1d(f, 0.0, 1.0, 1e-8).unwrap();
        assert_eq!(r.status, Status::Diverged);
    }

    #[test]
    fn log_divergence_and_integrable_singularity_are_distinguished() {
        let r = integrate_1d(|x: f64| ok(1.0 / x), 0.0, 1.0, 1e-8).unwrap();
        assert_eq!(r.status, Status::Diverged);
        let r = integrate_1d(|x: f64| ok(x.powf(-0.5)), 0.0, 1.0, 1e-8).unwrap();
        assert_ne!(r.status, Status::Diverged);
        // singularity at the upper end
        let r = integrate_1d(|x: f64| ok((1.0 - x).powi(-2)), 0.0, 1.0, 1e-8).unwrap();
        assert_eq!(r.status, Status::Diverged);
    }

    #[test]
    fn interior_failures_propagate() {
        let f = |x: f64| if x > 0.3 { Err(Error::Invalid("boom".into())) } else { ok(1.0) };
        assert!(integrate_1d(f, 0.0, 1.0, 1e-8).is_err());
    }

    #[test]
    fn simpson_order_is_four_on_quartic() {
        let exact = 0.2;
        let errs: Vec<f64> = [4usize, 8, 16, 32]
            .iter()
            .map(|&n| {
                let r = integrate_1d_with(|x| ok(x.powi(4)), 0.0, 1.0, &Quadrature::composite(n)).unwrap();
                (r.value - exact).abs()
            })
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 16.0).abs() < 0.5, "ratio {ratio}");
        }
    }

    #[test]
    fn double_integrals() {
        let r = integrate_2d(|s, t| ok(s * t), &Rect::unit(), 1e-10).unwrap();
        assert!((r.value - 0.25).abs() < 1e-12);
        let r = integrate_2d(|s, t| ok((s + t).powi(2) / 32.0), &Rect::unit(), 1e-10).unwrap();
        assert!((r.value - 7.0 / 192.0).abs() < 1e-12);
        let r = integrate_2d(|_, _| ok(0.0), &Rect::unit(), 1e-10).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.status, Status::Converged);
    }

    #[test]
    fn inner_divergence_propagates() {
        let f = |s: f64, t: f64| {
            let v = s * t;
            if v == 0.0 {
                Err(Error::Invalid("pole".into()))
            } else {
                ok(1.0 / v)
            }
        };
        let r = integrate_2d(f, &Rect::unit(), 1e-8).unwrap();
        assert_eq!(r.status, Status::Diverged);
    }

    #[test]
    fn pairwise_sum_is_order_independent_enough() {
        let v: Vec<f64> = (0..10_000).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let mut rev = v.clone();
        rev.reverse();
        assert!((pairwise_sum(&v) - pairwise_sum(&rev)).abs() < 1e-12);
    }

    #[test]
    fn sup_scans() {
        let r = sup_scan_2d(|s, t| ok(s * t), &Rect::unit(), 6).unwrap();
        assert_eq!(r.value, 1.0);
        let r = sup_scan_2d(|s, t| ok(s * t * (1.0 - s) * (1.0 - t)), &Rect::unit(), 6).unwrap();
        assert!((r.value - 1.0 / 16.0).abs() < 1e-12);
        assert!((r.x - 0.5).abs() < 1e-12 && (r.y - 0.5).abs() < 1e-12);
        let r = sup_scan_2d(|s, t| ok(-(s * s + t * t)), &Rect::unit(), 6).unwrap();
        assert_eq!((r.value, r.x, r.y), (0.0, 0.0, 0.0));
    }

    #[test]
    fn sup_scan_refines_off_grid_maximum() {
        // peak at (1/3, 1/3) is not a dyadic node
        let f = |s: f64, t: f64| ok(-((s - 1.0 / 3.0).powi(2) + (t - 1.0 / 3.0).powi(2)));
        let coarse = -2.0 * (1.0f64 / 3.0 - 0.25).powi(2);
        let r = sup_scan_2d(f, &Rect::unit(), 2).unwrap();
        assert!(r.value > coarse);
    }

    #[test]
    fn sup_scan_skips_failing_nodes() {
        let f = |s: f64, _t: f64| if s == 0.0 { Err(Error::Invalid("x".into())) } else { ok(s) };
        let r = sup_scan_2d(f, &Rect::unit(), 3).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(r.skipped > 0);
    }

    #[test]
    fn level_sets() {
        let whole = measure_level_set(|s, t| ok(s * t), &Rect::unit(), 0.0, 64).unwrap();
        assert_eq!(whole, 1.0);
        let sq = measure_level_set(|s: f64, t: f64| ok(s.min(t)), &Rect::unit(), 0.5, 64).unwrap();
        assert!((sq - 0.25).abs() < 1e-12);
        let null = measure_level_set(|s, t| ok(s * t), &Rect::unit(), 1.0, 64).unwrap();
        assert!(null <= 1.0 / 4096.0);
        let mut prev = f64::INFINITY;
        for k in 0..=20 {
            let m = measure_level_set(|s, t| ok(s * t), &Rect::unit(), k as f64 / 20.0, 64).unwrap();
            assert!(m <= prev);
            prev = m;
        }
    }

    #[test]
    fn rect_validation() {
        assert!(Rect::new(0.0, 1.0, 0.0, 1.0).is_ok());
        assert!(Rect::new(0.5, 0.5, 0.0, 1.0).is_err());
        assert!(Rect::new(0.0, 1.5, 0.0, 1.0).is_err());
    }
}
