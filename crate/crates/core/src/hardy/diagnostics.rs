//! Behaviour of the generator-based inequality when `p ≤ 1`, where it is not
//! a theorem.

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::generators::Generator;
use crate::hardy::kernel::hardy_kernel_g;
use crate::hardy::report::le_with_slack;
use crate::quadrature::{integrate_2d_with, Quadrature, QuadratureResult, Rect, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemarkBranch {
    /// `0 < p < 1`: the base `p/(p-1)` is negative.
    FractionalPower,
    /// `p < 0`: the kernel power blows up at the axes.
    NegativePower,
    /// `p = 0`: both sides collapse to the pseudo-integral of a constant.
    ZeroPower,
}

/// A classical inner integral `∫∫ g(·)` and its pseudo-value `g⁻¹` of it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideValue {
    pub classical: f64,
    pub status: Status,
    /// `g⁻¹(classical)`, absent when the integral diverged.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub branch: RemarkBranch,
    pub p: f64,
    pub generator: String,
    /// `(p/(p-1))^{2p}` over the reals, absent when no real value exists.
    pub constant: Option<f64>,
    pub lhs: Option<SideValue>,
    pub rhs_integral: Option<SideValue>,
    pub rhs: Option<f64>,
    /// For `p = 0`: `∫∫^⊕ f`, to be compared with 1.
    pub criterion_value: Option<f64>,
    /// Whether the inequality (or, for `p = 0`, the criterion `≥ 1`) is met.
    pub holds: Option<bool>,
    pub notes: Vec<String>,
}

/// Continued-fraction approximation `n/d` of `x` with `d ≤ max_den`, if one
/// matches to `1e-12`.
pub fn rational_approximation(x: f64, max_den: i64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64 / k1 as f64 - x).abs() <= 1e-12 * x.abs().max(1.0) {
            return Some((h1, k1));
        }
        let frac = rest - a as f64;
        if frac == 0.0 {
            return None;
        }
        rest = 1.0 / frac;
    }
    None
}

/// `base^exponent` over the reals. A negative base is allowed only when the
/// exponent is a rational whose reduced denominator is odd, so that the
/// root is real.
pub fn real_power(base: f64, exponent: f64) -> Option<f64> {
    if base >= 0.0 {
        return Some(base.powf(exponent));
    }
    let (num, den) = rational_approximation(exponent, 10_000)?;
    if den % 2 == 0 {
        return None;
    }
    let magnitude = (-base).powf(exponent);
    Some(if num % 2 == 0 { magnitude } else { -magnitude })
}

/// Evaluates `∫∫ g(h)` with the generator formula applied outside its
/// carrier when needed, then maps back with the inverse formula.
fn side<F>(gen: &Generator, mut h: F, q: &Quadrature) -> Result<SideValue>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let r: QuadratureResult = integrate_2d_with(|x, y| Ok(gen.forward_raw(h(x, y)?)?), &Rect::unit(), q)?;
    let value = if r.status == Status::Diverged { None } else { Some(gen.inverse_raw(r.value)?) };
    Ok(SideValue { classical: r.value, status: r.status, value })
}

/// Explains what happens to the generator-based inequality for `p ≤ 1`.
pub fn remark_diagnostics(gen: &Generator, f: &Expr, p: f64, cfg: &Config) -> Result<DiagnosticsReport> {
    let branch = if !p.is_finite() || p >= 1.0 {
        return Err(Error::Invalid(format!("remark diagnostics cover p < 1 (got {p}); p = 1 leaves the constant undefined")));
    } else if p > 0.0 {
        RemarkBranch::FractionalPower
    } else if p < 0.0 {
        RemarkBranch::NegativePower
    } else {
        RemarkBranch::ZeroPower
    };
    let q = cfg.quadrature;
    let kernel_q = Quadrature { tol: q.tol * 0.1, ..q };
    // No inset here: the kernel fails on the axes and the quadrature nudges
    // those nodes inwards, so a blow-up at the axes stays visible.
    let kernel = |x: f64, y: f64| hardy_kernel_g(gen, |s, t| Ok(f.eval(s, t)?), x, y, &kernel_q);
    let mut report = DiagnosticsReport {
        branch,
        p,
        generator: gen.spec(),
        constant: None,
        lhs: None,
        rhs_integral: None,
        rhs: None,
        criterion_value: None,
        holds: None,
        notes: Vec::new(),
    };
    match branch {
        RemarkBranch::FractionalPower | RemarkBranch::NegativePower => {
            report.constant = real_power(p / (p - 1.0), 2.0 * p);
            if report.constant.is_none() {
                report.notes.push(format!(
                    "(p/(p-1))^(2p) has no real value: 2p = {} is not a rational with odd denominator",
                    2.0 * p
                ));
            }
            let lhs = side(gen, |x, y| Ok(kernel(x, y)?.powf(p)), &q)?;
            if lhs.status == Status::Diverged {
                report.notes.push("the left-hand integral does not converge".into());
            }
            let rhs = side(gen, |x, y| Ok(f.eval(x, y)?.powf(p)), &q)?;
            report.rhs = match (report.constant, rhs.value) {
                (Some(c), Some(v)) => Some(c * v),
                _ => None,
            };
            if let (Some(l), Some(r)) = (lhs.value, report.rhs) {
                report.holds = Some(le_with_slack(l, r));
                if r <= 0.0 {
                    report.notes.push("the right-hand side is non-positive, so the inequality fails".into());
                }
            }
            if branch == RemarkBranch::NegativePower {
                report.notes.push("the generator is applied outside [0,1] where powers exceed 1".into());
            }
            report.lhs = Some(lhs);
            report.rhs_integral = Some(rhs);
        }
        RemarkBranch::ZeroPower => {
            report.constant = Some(1.0);
            let both = side(gen, |_, _| Ok(1.0), &q)?;
            report.lhs = Some(both);
            report.rhs_integral = Some(both);
            report.rhs = both.value;
            report.notes.push("with p = 0 both sides are the pseudo-integral of the constant 1".into());
            let criterion = side(gen, |x, y| Ok(f.eval(x, y)?), &q)?;
            report.criterion_value = criterion.value;
            report.holds = criterion.value.map(|v| v >= 1.0);
            report.notes.push("criterion: the pseudo-integral of f must be at least 1".into());
        }
    }
    Ok(report)
}
