//! Pseudo-integrals: generator-based integrals `g⁻¹(∫ g∘f)`, sup-integrals
//! against a density `ψ`, and the two-dimensional Sugeno integral.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Expr, Var};
use crate::generators::Generator;
use crate::quadrature::{
    integrate_1d_with, integrate_2d_with, sup_scan_1d, sup_scan_2d, Quadrature, QuadratureResult, Rect,
    Status,
};
use crate::semiring::Semiring;

/// Density of a sup-measure, a function of one variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiDensity {
    pub expr: Expr,
    pub description: String,
}

impl PsiDensity {
    pub fn constant(c: f64) -> PsiDensity {
        PsiDensity { expr: Expr::Const(c), description: format!("constant {c}") }
    }

    /// The ⊙-unit constant of `s`.
    pub fn unit_of(s: &Semiring) -> PsiDensity {
        PsiDensity { expr: Expr::Const(s.unit), description: format!("unit of {s}") }
    }

    /// A density from an expression in `x`, checked to stay in `[0,1]` on a
    /// 257-point grid.
    pub fn from_expr(expr: Expr) -> Result<PsiDensity> {
        if expr.uses(Var::Y) {
            return Err(Error::Invalid("psi must be a function of x only".into()));
        }
        for i in 0..=256 {
            let x = i as f64 / 256.0;
            let v = expr.eval_x(x)?;
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Invalid(format!("psi({x}) = {v} leaves [0,1]")));
            }
        }
        Ok(PsiDensity { description: expr.to_string(), expr })
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.expr.eval_x(x)?)
    }
}

/// A generator-based pseudo-integral together with the classical integral it
/// was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GIntegral {
    pub value: f64,
    pub classical: QuadratureResult,
}

fn finish(gen: &Generator, classical: QuadratureResult) -> Result<GIntegral> {
    if classical.status == Status::Diverged {
        return Err(Error::Diverged { partial: classical.value });
    }
    Ok(GIntegral { value: gen.eval_inverse(classical.value)?, classical })
}

/// `∫_{[low,high]}^⊕ f dx = g⁻¹(∫ g(f(x)) dx)`.
pub fn g_integral_1d<F>(gen: &Generator, mut f: F, low: f64, high: f64, q: &Quadrature) -> Result<GIntegral>
where
    F: FnMut(f64) -> Result<f64>,
{
    let classical = integrate_1d_with(|x| Ok(gen.eval_forward(f(x)?)?), low, high, q)?;
    finish(gen, classical)
}

/// `g⁻¹(∫∫_r g(f(s,t)) dt ds)`, iterated.
pub fn g_integral_2d<F>(gen: &Generator, mut f: F, r: &Rect, q: &Quadrature) -> Result<GIntegral>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let classical = integrate_2d_with(|s, t| Ok(gen.eval_forward(f(s, t)?)?), r, q)?;
    finish(gen, classical)
}

/// Like [`g_integral_1d`], but applies the formulas for `g` and `g⁻¹` outside
/// the generator's carrier instead of rejecting values there. A diverging
/// classical integral is reported through its status, not as an error.
pub fn g_integral_1d_unchecked<F>(gen: &Generator, mut f: F, low: f64, high: f64, q: &Quadrature) -> Result<GIntegral>
where
    F: FnMut(f64) -> Result<f64>,
{
    let classical = integrate_1d_with(|x| Ok(gen.forward_raw(f(x)?)?), low, high, q)?;
    finish_unchecked(gen, classical)
}

/// Two-dimensional counterpart of [`g_integral_1d_unchecked`].
pub fn g_integral_2d_unchecked<F>(gen: &Generator, mut f: F, r: &Rect, q: &Quadrature) -> Result<GIntegral>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let classical = integrate_2d_with(|s, t| Ok(gen.forward_raw(f(s, t)?)?), r, q)?;
    finish_unchecked(gen, classical)
}

fn finish_unchecked(gen: &Generator, classical: QuadratureResult) -> Result<GIntegral> {
    let value = if classical.status == Status::Diverged { f64::NAN } else { gen.inverse_raw(classical.value)? };
    Ok(GIntegral { value, classical })
}

/// Value of a sup-integral and where the supremum was found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupIntegral {
    pub value: f64,
    pub x: f64,
    pub y: f64,
    /// Some ⊙ evaluated along the way left the carrier and was clamped.
    pub saturated: bool,
    pub skipped: usize,
}

/// `sup_x f(x) ⊙ ψ(x)` over `[low, high]`.
pub fn sup_integral_1d<F>(
    s: &Semiring,
    mut f: F,
    psi: &PsiDensity,
    low: f64,
    high: f64,
    levels: u32,
) -> Result<SupIntegral>
where
    F: FnMut(f64) -> Result<f64>,
{
    let saturated = Cell::new(false);
    let r = sup_scan_1d(
        |x| {
            let v = s.pseudo_mul(f(x)?, psi.eval(x)?)?;
            if v.saturated {
                saturated.set(true);
            }
            Ok(v.value)
        },
        low,
        high,
        levels,
    )?;
    Ok(SupIntegral { value: r.value, x: r.x, y: 0.0, saturated: saturated.get(), skipped: r.skipped })
}

/// Iterated sup-integral over `r`:
/// `sup_x ( sup_y (f(x,y) ⊙ ψ(y)) ) ⊙ ψ(x)`.
///
/// `⊙` is monotone and continuous in each argument for every semiring kind,
/// so the nested suprema are taken as one supremum over the rectangle.
pub fn sup_integral_2d<F>(s: &Semiring, mut f: F, psi: &PsiDensity, r: &Rect, levels: u32) -> Result<SupIntegral>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let saturated = Cell::new(false);
    let r = sup_scan_2d(
        |x, y| {
            let inner = s.pseudo_mul(f(x, y)?, psi.eval(y)?)?;
            let outer = s.pseudo_mul(inner.value, psi.eval(x)?)?;
            if inner.saturated || outer.saturated {
                saturated.set(true);
            }
            Ok(outer.value)
        },
        r,
        levels,
    )?;
    Ok(SupIntegral { value: r.value, x: r.x, y: r.y, saturated: saturated.get(), skipped: r.skipped })
}

/// Sugeno integral of samples that each carry measure `cell`:
/// `max_k min(v_(k), k·cell)` over the values sorted in decreasing order.
/// This is `sup_α min(α, μ{f ≥ α})` for the step function the samples define.
pub fn sugeno_of_samples(values: &mut [f64], cell: f64) -> f64 {
    values.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut best: f64 = 0.0;
    for (k, v) in values.iter().enumerate() {
        let measure = (k + 1) as f64 * cell;
        best = best.max(v.min(measure));
        if measure >= *v {
            break;
        }
    }
    best
}

/// Sugeno integral of `f` over `r` with respect to Lebesgue measure, from the
/// midpoints of a `grid × grid` partition.
pub fn sugeno_integral_2d<F>(mut f: F, r: &Rect, grid: usize) -> Result<f64>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let grid = grid.max(2);
    let hx = (r.x_high - r.x_low) / grid as f64;
    let hy = (r.y_high - r.y_low) / grid as f64;
    let mut values = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        let x = r.x_low + (i as f64 + 0.5) * hx;
        for j in 0..grid {
            values.push(f(x, r.y_low + (j as f64 + 0.5) * hy)?);
        }
    }
    Ok(sugeno_of_samples(&mut values, hx * hy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_1d_with, integrate_2d_with, measure_level_set};

    fn q() -> Quadrature {
        Quadrature::with_tol(1e-10)
    }

    fn ok(v: f64) -> Result<f64> {
        Ok(v)
    }

    #[test]
    fn g_integral_1d_examples() {
        let v = g_integral_1d(&Generator::identity(), ok, 0.0, 1.0, &q()).unwrap();
        assert!((v.value - 0.5).abs() < 1e-12);
        // g⁻¹(∫x dx) = (1/2)²
        let v = g_integral_1d(&Generator::sqrt(), |x| ok(x * x), 0.0, 1.0, &q()).unwrap();
        assert!((v.value - 0.25).abs() < 1e-12);
        // 2·∫x/2 dx
        let v = g_integral_1d(&Generator::half(), ok, 0.0, 1.0, &q()).unwrap();
        assert!((v.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn g_integral_2d_examples() {
        let unit = Rect::unit();
        let v = g_integral_2d(&Generator::sqrt(), |s, t| ok(s * s * t * t), &unit, &q()).unwrap();
        assert!((v.value - 1.0 / 16.0).abs() < 1e-12);
        let v = g_integral_2d(&Generator::half(), |s, t| ok((s + t) / 2.0), &unit, &q()).unwrap();
        assert!((v.value - 0.5).abs() < 1e-12);
        let v = g_integral_2d(&Generator::identity(), |_, _| ok(1.0), &unit, &q()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unchecked_variant_reaches_past_the_carrier() {
        let sqrt = Generator::sqrt();
        let f = |s: f64, t: f64| ok(4.0 * s * t);
        assert!(g_integral_2d(&sqrt, f, &Rect::unit(), &q()).is_err());
        // ∫∫ 2 sqrt(st) = 8/9, squared
        let v = g_integral_2d_unchecked(&sqrt, f, &Rect::unit(), &q()).unwrap();
        assert!((v.value - 64.0 / 81.0).abs() < 1e-9);
        let v = g_integral_2d_unchecked(&sqrt, |s, t| ok((s * t).powi(-2)), &Rect::unit(), &Quadrature::default()).unwrap();
        assert_eq!(v.classical.status, Status::Diverged);
        assert!(v.value.is_nan());
        let v = g_integral_1d_unchecked(&sqrt, |x| ok(x * 4.0), 0.0, 1.0, &q()).unwrap();
        assert!((v.value - 16.0 / 9.0).abs() < 1e-9);
    }

    #[test]
    fn identity_generator_matches_plain_quadrature() {
        let f = |s: f64, t: f64| ok(0.7 * (s * t).sqrt() + s.powf(1.7) * 0.3);
        let g = g_integral_2d(&Generator::identity(), f, &Rect::unit(), &Quadrature::default()).unwrap();
        let plain = integrate_2d_with(f, &Rect::unit(), &Quadrature::default()).unwrap();
        assert!((g.value - plain.value).abs() < 1e-10);
        let g1 = g_integral_1d(&Generator::identity(), |x| ok(x.powf(0.3)), 0.0, 1.0, &q()).unwrap();
        let p1 = integrate_1d_with(|x| ok(x.powf(0.3)), 0.0, 1.0, &q()).unwrap();
        assert!((g1.value - p1.value).abs() < 1e-10);
    }

    #[test]
    fn divergence_and_domain_errors() {
        let f = |s: f64, t: f64| {
            let v = s * t;
            if v == 0.0 {
                Err(Error::Invalid("pole".into()))
            } else {
                ok(v.powi(-2))
            }
        };
        // values leave sqrt's domain [0,1]
        let r = g_integral_2d(&Generator::sqrt(), f, &Rect::unit(), &Quadrature::default());
        assert!(r.is_err());
        let diverged = QuadratureResult { value: 1e9, error_estimate: f64::INFINITY, evaluations: 1, status: Status::Diverged };
        assert!(matches!(finish(&Generator::identity(), diverged), Err(Error::Diverged { .. })));
    }

    #[test]
    fn sup_integral_examples() {
        let unit = Rect::unit();
        let st = Semiring::sup_times();
        let sp = Semiring::sup_plus();
        let v = sup_integral_2d(&st, |x, y| ok(x * y), &PsiDensity::constant(1.0), &unit, 6).unwrap();
        assert_eq!(v.value, 1.0);
        let v = sup_integral_2d(&sp, |x, y| ok(x * y), &PsiDensity::constant(0.0), &unit, 6).unwrap();
        assert_eq!(v.value, 1.0);
        assert!(!v.saturated);
        let f = |x: f64, y: f64| ok(x * y * (1.0 - x) * (1.0 - y));
        let v = sup_integral_2d(&st, f, &PsiDensity::constant(1.0), &unit, 6).unwrap();
        assert!((v.value - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn sup_plus_saturation_surfaces() {
        let psi = PsiDensity::from_expr("0.5".parse().unwrap()).unwrap();
        let v = sup_integral_2d(&Semiring::sup_plus(), |x, _| ok(x), &psi, &Rect::unit(), 4).unwrap();
        assert!(v.saturated);
        assert_eq!(v.value, 1.0);
    }

    #[test]
    fn psi_validation() {
        assert!(PsiDensity::from_expr("x/2".parse().unwrap()).is_ok());
        assert!(PsiDensity::from_expr("x+1".parse().unwrap()).is_err());
        assert!(PsiDensity::from_expr("y".parse().unwrap()).is_err());
    }

    #[test]
    fn sup_integral_1d_with_density() {
        // sup x·(1−x) = 1/4 at x = 1/2
        let psi = PsiDensity::from_expr("1-x".parse().unwrap()).unwrap();
        let v = sup_integral_1d(&Semiring::sup_times(), ok, &psi, 0.0, 1.0, 8).unwrap();
        assert!((v.value - 0.25).abs() < 1e-12);
    }

    /// Independent route: bisection on `α ↦ μ{f ≥ α} − α` using the
    /// level-set measure.
    fn bisection_oracle<F: Fn(f64, f64) -> Result<f64> + Copy>(f: F, grid: usize) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > 1e-9 {
            let mid = 0.5 * (lo + hi);
            let m = measure_level_set(f, &Rect::unit(), mid, grid).unwrap();
            if m >= mid {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    #[test]
    fn sugeno_constant_is_exact() {
        for c in [0.0, 0.3, 0.75, 1.0] {
            let v = sugeno_integral_2d(|_, _| ok(c), &Rect::unit(), 64).unwrap();
            assert!((v - c).abs() < 1e-9);
        }
    }

    #[test]
    fn sugeno_min_matches_golden_fixed_point() {
        let f = |x: f64, y: f64| ok(x.min(y));
        let v = sugeno_integral_2d(f, &Rect::unit(), 512).unwrap();
        let golden = (3.0 - 5f64.sqrt()) / 2.0;
        assert!((v - golden).abs() < 1e-3);
        assert!((v - bisection_oracle(f, 512)).abs() < 2.0 / 512.0);
    }

    #[test]
    fn sugeno_product_matches_level_set_root() {
        // root of α = 1 − α + α ln α
        let mut lo = 1e-9f64;
        let mut hi = 1.0f64;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if 1.0 - mid + mid * mid.ln() - mid > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - 0.317_844_432_899).abs() < 1e-9);
        let f = |x: f64, y: f64| ok(x * y);
        let v = sugeno_integral_2d(f, &Rect::unit(), 512).unwrap();
        assert!((v - lo).abs() < 2e-3);
        assert!((v - bisection_oracle(f, 512)).abs() < 2.0 / 512.0);
    }

    #[test]
    fn sugeno_bounded_by_sup_and_area() {
        let r = Rect::new(0.2, 0.6, 0.1, 0.5).unwrap();
        let f = |x: f64, y: f64| ok(0.9 * x * y + 0.05);
        let v = sugeno_integral_2d(f, &r, 128).unwrap();
        assert!(v <= r.area() + 1e-12);
        assert!(v <= 0.9 * 0.6 * 0.5 + 0.05 + 1e-12);
    }
}
