use std::collections::BTreeMap;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::hardy::kernel::{
    hardy_constant, hardy_kernel_g, hardy_kernel_g_grid, sugeno_hardy_constant, sugeno_prefix_blocks, sup_kernel_grid,
};
use crate::hardy::report::{HardyReport, PointwiseCheck, Relation};
use crate::hardy::scenario::{CheckKind, HardyScenario};
use crate::pseudo_integral::{g_integral_2d, sugeno_of_samples, sup_integral_2d, GIntegral};
use crate::quadrature::{integrate_1d_with, Quadrature, Rect, Status};
use crate::semiring::SemiringKind;

const MONOTONE_SLACK: f64 = 1e-12;

/// Runs the check named by `scn.kind`.
pub fn check(scn: &HardyScenario, cfg: &Config) -> Result<HardyReport> {
    match scn.kind {
        CheckKind::GHardy => check_hardy_g(scn, cfg),
        CheckKind::SupHardy => check_hardy_sup(scn, cfg),
        CheckKind::SugenoHardy => check_hardy_sugeno(scn, cfg),
        CheckKind::Classical => {
            let (low, high) = scn.interval()?;
            check_hardy_classical(&scn.f, scn.p, low, high, cfg)
        }
    }
}

fn expect_kind(scn: &HardyScenario, kind: CheckKind) -> Result<()> {
    if scn.kind != kind {
        return Err(Error::Invalid(format!("scenario kind is {}, expected {kind}", scn.kind)));
    }
    if !scn.p.is_finite() {
        return Err(Error::Invalid(format!("p = {} must be finite", scn.p)));
    }
    Ok(())
}

fn empty_report(scn: &HardyScenario, constant: f64, relation: Relation) -> HardyReport {
    HardyReport {
        kind: scn.kind,
        label: scn.name.clone().unwrap_or_else(|| scn.label()),
        p: scn.p,
        lhs: None,
        rhs_integral: None,
        constant,
        rhs: None,
        relation,
        holds: None,
        margin: None,
        pointwise_check: None,
        statuses: BTreeMap::new(),
        notes: Vec::new(),
    }
}

/// Records a g-integral outcome under `key`; divergence becomes a missing value.
fn absorb(report: &mut HardyReport, key: &str, outcome: Result<GIntegral>) -> Result<Option<f64>> {
    match outcome {
        Ok(v) => {
            report.statuses.insert(key.into(), v.classical.status);
            if v.classical.status == Status::MaxRefinement {
                report.notes.push(format!("{key}: refinement limit reached, error estimate {:e}", v.classical.error_estimate));
            }
            Ok(Some(v.value))
        }
        Err(Error::Diverged { partial }) => {
            report.statuses.insert(key.into(), Status::Diverged);
            report.notes.push(format!("{key}: integral diverged (last partial sum {partial:e})"));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn eval2(f: &Expr, x: f64, y: f64) -> Result<f64> {
    Ok(f.eval(x, y)?)
}

/// Whether `f` is nondecreasing in each coordinate on `values`, a
/// `(n+1)×(n+1)` row-major grid. Unevaluable nodes count as a failure.
fn monotone_on_grid(values: &[f64], n: usize) -> bool {
    let w = n + 1;
    for i in 0..w {
        for j in 0..w {
            let v = values[i * w + j];
            if v.is_nan() {
                return false;
            }
            if i > 0 && v < values[(i - 1) * w + j] - MONOTONE_SLACK {
                return false;
            }
            if j > 0 && v < values[i * w + j - 1] - MONOTONE_SLACK {
                return false;
            }
        }
    }
    true
}

/// Generator-based inequality: `∫∫^⊕ R^p ≤ (p/(p-1))^{2p} ∫∫^⊕ f^p`.
pub fn check_hardy_g(scn: &HardyScenario, cfg: &Config) -> Result<HardyReport> {
    expect_kind(scn, CheckKind::GHardy)?;
    let constant = hardy_constant(scn.p)?;
    let gen = scn.generator()?;
    let domain = scn.rect()?;
    let p = scn.p;
    let f = &scn.f;
    let q = cfg.quadrature;
    let kernel_q = Quadrature { tol: q.tol * 0.1, ..q };
    let inset = cfg.axis_inset;
    let kernel = |x: f64, y: f64| hardy_kernel_g(gen, |s, t| eval2(f, s, t), x.max(inset), y.max(inset), &kernel_q);

    let mut report = empty_report(scn, constant, Relation::AtMost);
    report.lhs = absorb(&mut report, "lhs", g_integral_2d(gen, |x, y| Ok(kernel(x, y)?.powf(p)), &domain, &q))?;
    report.rhs_integral =
        absorb(&mut report, "rhs_integral", g_integral_2d(gen, |x, y| Ok(eval2(f, x, y)?.powf(p)), &domain, &q))?;
    report.rhs = report.rhs_integral.map(|v| constant * v);
    let n = cfg.pointwise_grid.max(1);
    let anchored = domain.x_low == 0.0 && domain.y_low == 0.0;
    let grid = if anchored {
        match hardy_kernel_g_grid(gen, |s, t| eval2(f, s, t), domain.x_high, domain.y_high, n, &kernel_q) {
            Ok(values) => Some(values),
            Err(Error::Diverged { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    report.pointwise_check = Some(match grid {
        Some(values) => pointwise_g(&domain, n, f, |i, j, _, _| Ok(values[i * (n + 1) + j]))?,
        None => pointwise_g(&domain, n, f, |_, _, x, y| kernel(x, y))?,
    });
    if let Some(pc) = &report.pointwise_check {
        if !pc.f_monotone {
            report.notes.push("f is not nondecreasing in each coordinate; R <= f is not expected".into());
        }
    }
    report.notes.push("rhs = constant * rhs_integral uses ordinary multiplication".into());
    report.decide();
    Ok(report)
}

fn pointwise_g(
    domain: &Rect,
    n: usize,
    f: &Expr,
    mut kernel: impl FnMut(usize, usize, f64, f64) -> Result<f64>,
) -> Result<PointwiseCheck> {
    let n = n.max(1);
    let node = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / n as f64;
    let mut values = Vec::with_capacity((n + 1) * (n + 1));
    for i in 0..=n {
        for j in 0..=n {
            let (x, y) = (node(domain.x_low, domain.x_high, i), node(domain.y_low, domain.y_high, j));
            values.push(eval2(f, x, y).unwrap_or(f64::NAN));
        }
    }
    let f_monotone = monotone_on_grid(&values, n);
    let mut worst = PointwiseCheck { max_excess: f64::NEG_INFINITY, x: 0.0, y: 0.0, grid: n, f_monotone };
    for i in 1..=n {
        for j in 1..=n {
            let fv = values[i * (n + 1) + j];
            if fv.is_nan() {
                continue;
            }
            let (x, y) = (node(domain.x_low, domain.x_high, i), node(domain.y_low, domain.y_high, j));
            let excess = match kernel(i, j, x, y) {
                Ok(r) => r - fv,
                Err(Error::Diverged { .. }) => continue,
                Err(e) => return Err(e),
            };
            if excess > worst.max_excess {
                worst = PointwiseCheck { max_excess: excess, x, y, ..worst };
            }
        }
    }
    Ok(worst)
}

/// Sup-integral inequality with the kernel normalised as configured on the
/// scenario (by the sup-measure of `[0,x]×[0,y]` unless stated otherwise).
pub fn check_hardy_sup(scn: &HardyScenario, cfg: &Config) -> Result<HardyReport> {
    expect_kind(scn, CheckKind::SupHardy)?;
    let constant = hardy_constant(scn.p)?;
    let s = scn.sup_semiring()?;
    if matches!(s.kind, SemiringKind::MaxMin) {
        return Err(Error::Invalid("the sup Hardy check needs supplus, suptimes or a generated semiring".into()));
    }
    let psi = scn.psi_density(&s)?;
    let domain = scn.rect()?;
    let p = scn.p;
    let f = &scn.f;
    let normalization = scn.normalization.unwrap_or_default();
    let levels = cfg.sup_hardy_levels;
    let grid = sup_kernel_grid(
        &s,
        |x, y| eval2(f, x, y),
        &psi,
        domain.x_high,
        domain.y_high,
        levels,
        normalization,
        cfg.axis_inset,
    )?;

    let mut report = empty_report(scn, constant, Relation::AtMost);
    let mut lhs = f64::NEG_INFINITY;
    let mut saturated = grid.saturated;
    let mut worst = PointwiseCheck {
        max_excess: f64::NEG_INFINITY,
        x: 0.0,
        y: 0.0,
        grid: grid.n + 1,
        f_monotone: monotone_on_grid(&grid.f, grid.n),
    };
    let inside = |v: f64, lo: f64, hi: f64| v >= lo - 1e-15 && v <= hi + 1e-15;
    for i in 0..=grid.n {
        let x = grid.x(i);
        if !inside(x, domain.x_low, domain.x_high) {
            continue;
        }
        let psi_x = psi.eval(x)?;
        for j in 0..=grid.n {
            let y = grid.y(j);
            let r = grid.at(i, j);
            if !inside(y, domain.y_low, domain.y_high) || r.is_nan() {
                continue;
            }
            let inner = s.pseudo_mul(r.powf(p), psi.eval(y)?)?;
            let outer = s.pseudo_mul(inner.value, psi_x)?;
            saturated |= inner.saturated || outer.saturated;
            lhs = lhs.max(outer.value);
            let fv = grid.f_at(i, j);
            if fv.is_finite() && r - fv > worst.max_excess {
                worst = PointwiseCheck { max_excess: r - fv, x, y, ..worst };
            }
        }
    }
    report.statuses.insert("lhs".into(), Status::Converged);
    report.lhs = lhs.is_finite().then_some(lhs);
    let rhs = sup_integral_2d(&s, |x, y| Ok(eval2(f, x, y)?.powf(p)), &psi, &domain, levels)?;
    saturated |= rhs.saturated;
    report.statuses.insert("rhs_integral".into(), Status::Converged);
    report.rhs_integral = Some(rhs.value);
    report.rhs = Some(constant * rhs.value);
    report.pointwise_check = Some(worst);
    if grid.skipped + rhs.skipped > 0 {
        report.notes.push(format!("{} grid nodes skipped where f could not be evaluated", grid.skipped + rhs.skipped));
    }
    if saturated {
        report.notes.push("a pseudo-product left [0,1] and was clamped".into());
    }
    if !worst.f_monotone {
        report.notes.push("f is not nondecreasing in each coordinate; R <= f is not expected".into());
    }
    report.notes.push(match normalization {
        crate::hardy::scenario::SupNormalization::RectMeasure => {
            "kernel normalised by the sup-measure of [0,x]x[0,y]".to_string()
        }
        crate::hardy::scenario::SupNormalization::Area => "kernel normalised by the area xy".to_string(),
    });
    report.notes.push("rhs = constant * rhs_integral uses ordinary multiplication".into());
    report.decide();
    Ok(report)
}

/// Sugeno inequality:
/// `(⨍ f^p)^{1/(2p+1)} ≥ (4/5)^{16p/(9(2p+1))} ⨍ (R/(xy))^p`
/// with `R(x,y)` the Sugeno integral of `f` over `[0,x]×[0,y]`.
pub fn check_hardy_sugeno(scn: &HardyScenario, cfg: &Config) -> Result<HardyReport> {
    expect_kind(scn, CheckKind::SugenoHardy)?;
    let constant = sugeno_hardy_constant(scn.p)?;
    let domain = scn.rect()?;
    if domain.x_low != 0.0 || domain.y_low != 0.0 {
        return Err(Error::Invalid("the Sugeno check needs a domain anchored at the origin".into()));
    }
    let p = scn.p;
    let n = cfg.sugeno_hardy_grid.max(2);
    let hx = domain.x_high / n as f64;
    let hy = domain.y_high / n as f64;
    let cell = hx * hy;
    let mut values = Vec::with_capacity(n * n);
    let mut outside = false;
    for i in 0..n {
        for j in 0..n {
            let v = eval2(&scn.f, (i as f64 + 0.5) * hx, (j as f64 + 0.5) * hy)?;
            outside |= !(0.0..=1.0).contains(&v);
            values.push(v);
        }
    }
    let mut report = empty_report(scn, constant, Relation::AtLeast);
    let mut powered: Vec<f64> = values.iter().map(|v| v.powf(p)).collect();
    let lhs_integral = sugeno_of_samples(&mut powered, cell);
    report.lhs = Some(lhs_integral.powf(1.0 / (2.0 * p + 1.0)));

    let blocks = sugeno_prefix_blocks(&values, n, cell);
    let mut averaged = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            let r = blocks[(i - 1) * n + (j - 1)];
            averaged.push((r / (i as f64 * hx * j as f64 * hy)).powf(p));
        }
    }
    let rhs_integral = sugeno_of_samples(&mut averaged, cell);
    report.rhs_integral = Some(rhs_integral);
    report.rhs = Some(constant * rhs_integral);
    report.statuses.insert("lhs".into(), Status::Converged);
    report.statuses.insert("rhs_integral".into(), Status::Converged);
    if outside {
        report.notes.push("f leaves [0,1] on the grid".into());
    }
    report.notes.push(format!("Sugeno integrals from a {n}x{n} cell grid"));
    report.decide();
    Ok(report)
}

/// Classical one-variable inequality on `[low, high]`:
/// `∫ (F(x)/x)^p dx < (p/(p-1))^p ∫ f^p dx` with `F(x) = ∫_0^x f`.
pub fn check_hardy_classical(f: &Expr, p: f64, low: f64, high: f64, cfg: &Config) -> Result<HardyReport> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Hypothesis(format!("the classical inequality needs a finite p > 1 (got {p})")));
    }
    if !(low >= 0.0 && low < high && high.is_finite()) {
        return Err(Error::Invalid(format!("interval [{low}, {high}] must be finite and non-negative")));
    }
    let mut nonzero = false;
    for k in 0..=256 {
        let x = low + (high - low) * k as f64 / 256.0;
        if let Ok(v) = f.eval_x(x) {
            if v < 0.0 {
                return Err(Error::Hypothesis(format!("f({x}) = {v} is negative")));
            }
            nonzero |= v > 0.0;
        }
    }
    if !nonzero {
        return Err(Error::Hypothesis("f must not vanish identically".into()));
    }
    let constant = (p / (p - 1.0)).powf(p);
    let q = cfg.quadrature;
    let inner_q = Quadrature { tol: q.tol * 0.1, ..q };
    let inset = cfg.axis_inset;
    let scn = HardyScenario::classical(f.clone(), p, low, high);
    let mut report = empty_report(&scn, constant, Relation::Below);

    let averaged = |x: f64| -> Result<f64> {
        let x = x.max(inset);
        let big_f = integrate_1d_with(|t| Ok(f.eval_x(t)?), 0.0, x, &inner_q)?;
        if big_f.status == Status::Diverged {
            return Err(Error::Diverged { partial: big_f.value });
        }
        Ok((big_f.value / x).powf(p))
    };
    let lhs = integrate_1d_with(averaged, low, high, &q)?;
    let rhs = integrate_1d_with(|x| Ok(f.eval_x(x)?.powf(p)), low, high, &q)?;
    for (key, r) in [("lhs", &lhs), ("rhs_integral", &rhs)] {
        report.statuses.insert(key.into(), r.status);
        if r.status == Status::Diverged {
            report.notes.push(format!("{key}: integral diverged (last partial sum {:e})", r.value));
        }
    }
    report.lhs = (lhs.status != Status::Diverged).then_some(lhs.value);
    report.rhs_integral = (rhs.status != Status::Diverged).then_some(rhs.value);
    report.rhs = report.rhs_integral.map(|v| constant * v);
    report.decide();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Generator;
    use crate::hardy::scenario::SupNormalization;
    use crate::semiring::Semiring;

    fn e(s: &str) -> Expr {
        s.parse().unwrap()
    }

    fn fast() -> Config {
        Config { pointwise_grid: 8, sup_hardy_levels: 6, sugeno_hardy_grid: 64, ..Config::default() }
    }

    #[test]
    fn g_check_half_example() {
        let r = check_hardy_g(&HardyScenario::g_hardy(e("(x+y)/2"), Generator::half(), 2.0), &fast()).unwrap();
        assert!((r.lhs.unwrap() - 14.0 / 192.0).abs() < 1e-6);
        assert!((r.rhs_integral.unwrap() - 7.0 / 24.0).abs() < 1e-8);
        assert!((r.rhs.unwrap() - 14.0 / 3.0).abs() < 1e-7);
        assert_eq!(r.holds, Some(true));
        let pc = r.pointwise_check.unwrap();
        assert!(pc.f_monotone && pc.max_excess <= 1e-8);
    }

    #[test]
    fn g_check_sqrt_example() {
        let r = check_hardy_g(&HardyScenario::g_hardy(e("x^2*y^2"), Generator::sqrt(), 2.0), &fast()).unwrap();
        assert!((r.lhs.unwrap() - 1.0 / 65536.0).abs() < 1e-9);
        assert!((r.rhs_integral.unwrap() - 1.0 / 81.0).abs() < 1e-9);
        assert_eq!(r.constant, 16.0);
        assert_eq!(r.holds, Some(true));
    }

    #[test]
    fn g_check_constant_one() {
        let r = check_hardy_g(&HardyScenario::g_hardy(e("1"), Generator::identity(), 2.0), &fast()).unwrap();
        assert!((r.lhs.unwrap() - 1.0).abs() < 1e-9);
        assert!((r.rhs.unwrap() - 16.0).abs() < 1e-9);
        assert_eq!(r.holds, Some(true));
    }

    #[test]
    fn g_check_needs_p_above_one() {
        let scn = HardyScenario::g_hardy(e("x"), Generator::identity(), 1.0);
        assert!(matches!(check_hardy_g(&scn, &fast()), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn g_check_flags_decreasing_f() {
        let r = check_hardy_g(&HardyScenario::g_hardy(e("1-x*y"), Generator::identity(), 2.0), &fast()).unwrap();
        let pc = r.pointwise_check.unwrap();
        assert!(!pc.f_monotone);
        assert!(pc.max_excess > 0.0);
    }

    #[test]
    fn sup_checks_hold() {
        let cases = [
            (Semiring::sup_times(), None, "x*y"),
            (Semiring::sup_plus(), Some(e("0")), "(x+y)/2"),
            (Semiring::sup_times(), None, "1"),
            (Semiring::sup_plus(), None, "1"),
            (Semiring::generated(Generator::identity()).unwrap(), None, "1"),
        ];
        for (s, psi, f) in cases {
            let mut scn = HardyScenario::sup_hardy(e(f), s, 2.0);
            scn.psi = psi;
            let r = check_hardy_sup(&scn, &fast()).unwrap();
            assert_eq!(r.holds, Some(true), "{f}: {r:?}");
            let pc = r.pointwise_check.unwrap();
            assert!(pc.max_excess <= 1e-8, "{f}: {pc:?}");
        }
    }

    #[test]
    fn sup_check_constant_one_has_unit_lhs() {
        let r = check_hardy_sup(&HardyScenario::sup_hardy(e("1"), Semiring::sup_times(), 2.0), &fast()).unwrap();
        assert_eq!(r.lhs, Some(1.0));
        assert_eq!(r.rhs, Some(16.0));
    }

    #[test]
    fn area_normalisation_breaks_the_proof_step() {
        let mut scn = HardyScenario::sup_hardy(e("x*y"), Semiring::sup_times(), 2.0);
        scn.normalization = Some(SupNormalization::Area);
        let r = check_hardy_sup(&scn, &fast()).unwrap();
        // sup over [0,x]x[0,y] of st is xy, so the area-normalised kernel is 1
        assert!(r.pointwise_check.unwrap().max_excess > 0.5);
        let mut scn = HardyScenario::sup_hardy(e("0.01*x"), Semiring::sup_times(), 2.0);
        scn.normalization = Some(SupNormalization::Area);
        let r = check_hardy_sup(&scn, &fast()).unwrap();
        assert_eq!(r.holds, Some(false));
    }

    #[test]
    fn sup_check_rejects_max_min() {
        let scn = HardyScenario::sup_hardy(e("x"), Semiring::max_min(), 2.0);
        assert!(check_hardy_sup(&scn, &fast()).is_err());
    }

    #[test]
    fn sugeno_checks_hold() {
        for (f, p) in [("1", 1.0), ("x*y", 1.0), ("min(x,y)", 2.0)] {
            let r = check_hardy_sugeno(&HardyScenario::sugeno_hardy(e(f), p), &fast()).unwrap();
            assert_eq!(r.holds, Some(true), "{f}: {r:?}");
        }
        let r = check_hardy_sugeno(&HardyScenario::sugeno_hardy(e("1"), 1.0), &fast()).unwrap();
        assert!((r.lhs.unwrap() - 1.0).abs() < 1e-12);
        assert!(check_hardy_sugeno(&HardyScenario::sugeno_hardy(e("x"), 0.5), &fast()).is_err());
    }

    #[test]
    fn classical_closed_forms() {
        let cfg = Config::default();
        let r = check_hardy_classical(&e("x"), 2.0, 0.0, 1.0, &cfg).unwrap();
        assert!((r.lhs.unwrap() - 1.0 / 12.0).abs() < 1e-9);
        assert!((r.rhs.unwrap() - 4.0 / 3.0).abs() < 1e-9);
        assert_eq!(r.holds, Some(true));
        assert!((r.margin.unwrap() - 16.0).abs() < 1e-6);
        let r = check_hardy_classical(&e("1"), 2.0, 0.0, 1.0, &cfg).unwrap();
        assert!((r.lhs.unwrap() - 1.0).abs() < 1e-9);
        assert!((r.rhs.unwrap() - 4.0).abs() < 1e-9);
        assert!(matches!(check_hardy_classical(&e("0"), 2.0, 0.0, 1.0, &cfg), Err(Error::Hypothesis(_))));
        assert!(matches!(check_hardy_classical(&e("x-1"), 2.0, 0.0, 1.0, &cfg), Err(Error::Hypothesis(_))));
    }
}
