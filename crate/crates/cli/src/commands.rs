use std::fmt;
use std::path::Path;

use pseudocalc::expr::{Expr, ExprError, Var};
use pseudocalc::generators::{Generator, GeneratorError};
use pseudocalc::hardy::{check, remark_diagnostics, CheckKind, DiagnosticsReport, HardyReport, HardyScenario, SupNormalization};
use pseudocalc::harness::{
    refine_study, reproduce, run_campaign, write_failure_corpus, CampaignReport, ConvergenceReport, FuzzConfig,
    Reproduction, FIXTURE_NAMES,
};
use pseudocalc::pseudo_integral::{
    g_integral_1d, g_integral_1d_unchecked, g_integral_2d, g_integral_2d_unchecked, sugeno_integral_2d,
    sugeno_of_samples, sup_integral_1d, sup_integral_2d, GIntegral, PsiDensity,
};
use pseudocalc::quadrature::{Rect, Status};
use pseudocalc::semiring::Semiring;
use pseudocalc::{Config, Error};
use serde::{Deserialize, Serialize};

use crate::args::{FuzzArgs, HardyArgs, IntegrateArgs, KindArg, NormalizationArg, RefineArgs, ReproduceArgs, ScenarioArgs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DIVERGED: i32 = 2;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> CliError {
        CliError { code: EXIT_USAGE, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        let code = if matches!(e, Error::Diverged { .. }) { EXIT_DIVERGED } else { EXIT_USAGE };
        CliError { code, message: e.to_string() }
    }
}

/// Every report the tool can emit.
#[derive(Debug, Clone)]
pub enum Report {
    Integral(IntegralReport),
    Hardy(HardyReport),
    Diagnostics(DiagnosticsReport),
    Reproduction(Reproduction),
    Campaign(CampaignReport),
    Convergence(ConvergenceReport),
}

/// Result of `integrate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralReport {
    /// `g-integral`, `sup-integral` or `sugeno`.
    pub method: String,
    pub f: String,
    /// Generator or semiring spec.
    pub operator: Option<String>,
    pub psi: Option<String>,
    pub dim: u8,
    pub domain: Vec<f64>,
    /// Absent when the integral diverged.
    pub value: Option<f64>,
    /// The classical integral `∫ g∘f` behind a g-integral.
    pub classical: Option<f64>,
    pub error_estimate: Option<f64>,
    pub evaluations: Option<usize>,
    pub status: Status,
    pub notes: Vec<String>,
}

pub struct Outcome {
    pub report: Report,
    pub config: Config,
    pub exit: i32,
}

fn caret_line(src: &str, position: usize) -> String {
    format!("\n  {src}\n  {}^", " ".repeat(position))
}

fn error_position(e: &ExprError, src: &str) -> Option<usize> {
    match e {
        ExprError::Lex { position, .. }
        | ExprError::UnexpectedToken { position, .. }
        | ExprError::UnknownIdent { position, .. }
        | ExprError::Arity { position, .. }
        | ExprError::NonFiniteConstant { position, .. } => Some(*position),
        ExprError::UnexpectedEnd => Some(src.chars().count()),
        _ => None,
    }
}

pub fn parse_expr(flag: &str, src: &str) -> Result<Expr, CliError> {
    src.parse::<Expr>().map_err(|e| {
        let mut message = format!("{flag}: {e}");
        if let Some(pos) = error_position(&e, src) {
            message.push_str(&caret_line(src, pos));
        }
        CliError::usage(message)
    })
}

fn parse_constant(flag: &str, src: &str) -> Result<f64, CliError> {
    let e = parse_expr(flag, src)?;
    if e.uses(Var::X) || e.uses(Var::Y) {
        return Err(CliError::usage(format!("{flag}: expected a constant, got {src:?}")));
    }
    e.eval(0.0, 0.0).map_err(|err| CliError::usage(format!("{flag}: {err}")))
}

fn parse_generator(src: &str) -> Result<Generator, CliError> {
    src.parse().map_err(|e: GeneratorError| CliError::usage(format!("--g: {e}")))
}

fn parse_semiring(src: &str) -> Result<Semiring, CliError> {
    src.parse().map_err(|e: GeneratorError| CliError::usage(format!("--semiring: {e}")))
}

fn parse_bounds(src: &str) -> Result<Vec<f64>, CliError> {
    src.split(',')
        .map(|part| {
            part.trim().parse::<f64>().map_err(|_| CliError::usage(format!("--domain: {part:?} is not a number")))
        })
        .collect()
}

fn check_p(p: f64) -> Result<(), CliError> {
    if p > 1.0 && p.is_finite() {
        return Ok(());
    }
    Err(CliError::usage(format!(
        "p = {p} is outside the theorem regime p > 1; rerun with --diagnostics for the p < 1 cases"
    )))
}

pub fn base_config() -> Config {
    Config::default().with_env_overrides()
}

// ---------------------------------------------------------------- integrate

enum Operator {
    Generator(Generator),
    Sup(Semiring),
    Sugeno,
}

pub fn integrate(a: &IntegrateArgs) -> Result<Outcome, CliError> {
    let cfg = base_config();
    let f = parse_expr("--f", &a.f)?;
    if a.dim == 1 && f.uses(Var::Y) {
        return Err(CliError::usage("--f: a one-dimensional integrand may only use x"));
    }
    let domain = match &a.domain {
        Some(s) => parse_bounds(s)?,
        None if a.dim == 1 => vec![0.0, 1.0],
        None => vec![0.0, 1.0, 0.0, 1.0],
    };
    let expected = if a.dim == 1 { 2 } else { 4 };
    if domain.len() != expected {
        return Err(CliError::usage(format!("--domain: --dim {} needs {expected} bounds, got {}", a.dim, domain.len())));
    }
    // Rect::new validates the bounds; a 1D interval reuses it with a dummy y side.
    let rect = match domain.as_slice() {
        [a0, b0] => Rect::new(*a0, *b0, 0.0, 1.0)?,
        [a0, b0, c0, d0] => Rect::new(*a0, *b0, *c0, *d0)?,
        _ => unreachable!("length checked above"),
    };

    let operator = match (&a.g, &a.semiring, a.sugeno) {
        (_, _, true) => Operator::Sugeno,
        (Some(g), None, false) => Operator::Generator(parse_generator(g)?),
        (None, Some(s), false) => {
            let s = parse_semiring(s)?;
            match s.generator() {
                Some(g) if !s.is_idempotent_add() => Operator::Generator(g.clone()),
                _ => Operator::Sup(s),
            }
        }
        _ => return Err(CliError::usage("one of --g, --semiring or --sugeno is required")),
    };
    if a.psi.is_some() && !matches!(operator, Operator::Sup(_)) {
        return Err(CliError::usage("--psi applies only to sup semirings (supplus, suptimes, maxmin)"));
    }

    let mut report = IntegralReport {
        method: String::new(),
        f: f.to_string(),
        operator: None,
        psi: None,
        dim: a.dim,
        domain,
        value: None,
        classical: None,
        error_estimate: None,
        evaluations: None,
        status: Status::Converged,
        notes: Vec::new(),
    };
    let f1 = |x: f64| Ok(f.eval_x(x)?);
    let f2 = |x: f64, y: f64| Ok(f.eval(x, y)?);

    match operator {
        Operator::Generator(gen) => {
            report.method = "g-integral".into();
            report.operator = Some(gen.spec());
            let q = cfg.quadrature;
            let checked = if a.dim == 1 {
                g_integral_1d(&gen, f1, rect.x_low, rect.x_high, &q)
            } else {
                g_integral_2d(&gen, f2, &rect, &q)
            };
            let outcome: GIntegral = match checked {
                Ok(gi) => gi,
                Err(Error::Diverged { partial }) => {
                    report.status = Status::Diverged;
                    report.classical = Some(partial);
                    report.notes.push("the classical integral of g(f) does not converge".into());
                    return Ok(Outcome { report: Report::Integral(report), config: cfg, exit: EXIT_DIVERGED });
                }
                Err(Error::Generator(GeneratorError::Range { value, .. })) => {
                    report.notes.push(format!(
                        "value {value} leaves the carrier of {}; the generator formula was applied beyond it",
                        gen.spec()
                    ));
                    if a.dim == 1 {
                        g_integral_1d_unchecked(&gen, f1, rect.x_low, rect.x_high, &q)?
                    } else {
                        g_integral_2d_unchecked(&gen, f2, &rect, &q)?
                    }
                }
                Err(e) => return Err(e.into()),
            };
            report.status = outcome.classical.status;
            report.classical = Some(outcome.classical.value);
            report.error_estimate = Some(outcome.classical.error_estimate);
            report.evaluations = Some(outcome.classical.evaluations);
            match outcome.classical.status {
                Status::Diverged => report.notes.push("the classical integral of g(f) does not converge".into()),
                Status::MaxRefinement => {
                    report.notes.push("refinement budget exhausted before the tolerance was met".into());
                    report.value = Some(outcome.value);
                }
                Status::Converged => report.value = Some(outcome.value),
            }
        }
        Operator::Sup(s) => {
            report.method = "sup-integral".into();
            report.operator = Some(s.spec());
            let psi = match &a.psi {
                Some(src) => PsiDensity::from_expr(parse_expr("--psi", src)?)?,
                None => PsiDensity::unit_of(&s),
            };
            report.psi = Some(psi.description.clone());
            let sup = if a.dim == 1 {
                sup_integral_1d(&s, f1, &psi, rect.x_low, rect.x_high, cfg.sup_levels)?
            } else {
                sup_integral_2d(&s, f2, &psi, &rect, cfg.sup_levels)?
            };
            report.value = Some(sup.value);
            report.notes.push(if a.dim == 1 {
                format!("supremum attained near x = {}", sup.x)
            } else {
                format!("supremum attained near ({}, {})", sup.x, sup.y)
            });
            if sup.saturated {
                report.notes.push("some products left the carrier and were clamped".into());
            }
            if sup.skipped > 0 {
                report.notes.push(format!("{} grid nodes could not be evaluated and were skipped", sup.skipped));
            }
        }
        Operator::Sugeno => {
            report.method = "sugeno".into();
            let n = cfg.level_set_grid;
            let value = if a.dim == 1 {
                let h = (rect.x_high - rect.x_low) / n as f64;
                let mut samples = (0..n)
                    .map(|i| f.eval_x(rect.x_low + (i as f64 + 0.5) * h))
                    .collect::<Result<Vec<f64>, _>>()
                    .map_err(Error::from)?;
                sugeno_of_samples(&mut samples, h)
            } else {
                sugeno_integral_2d(f2, &rect, n)?
            };
            report.value = Some(value);
            report.notes.push(format!("{n} cells per axis"));
        }
    }
    let exit = if report.status == Status::Diverged { EXIT_DIVERGED } else { EXIT_OK };
    Ok(Outcome { report: Report::Integral(report), config: cfg, exit })
}

// ---------------------------------------------------------------- scenarios

pub fn load_scenario(path: &Path) -> Result<HardyScenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read scenario {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("scenario {}: {e}", path.display())))
}

pub fn build_scenario(a: &ScenarioArgs) -> Result<HardyScenario, CliError> {
    let mut scn = match &a.scenario {
        Some(path) => load_scenario(path)?,
        None => inline_scenario(a)?,
    };
    if let Some(n) = a.normalization {
        scn.normalization = Some(match n {
            NormalizationArg::RectMeasure => SupNormalization::RectMeasure,
            NormalizationArg::Area => SupNormalization::Area,
        });
    }
    Ok(scn)
}

fn inline_scenario(a: &ScenarioArgs) -> Result<HardyScenario, CliError> {
    let f = parse_expr("--f", a.f.as_deref().ok_or_else(|| CliError::usage("--f or --scenario is required"))?)?;
    let p = parse_constant("--p", a.p.as_deref().ok_or_else(|| CliError::usage("--p is required"))?)?;
    let g = a.g.as_deref().map(parse_generator).transpose()?;
    let semiring = a.semiring.as_deref().map(parse_semiring).transpose()?;
    let kind = match (a.kind, &g, &semiring) {
        (Some(KindArg::G), ..) => CheckKind::GHardy,
        (Some(KindArg::Sup), ..) => CheckKind::SupHardy,
        (Some(KindArg::Sugeno), ..) => CheckKind::SugenoHardy,
        (Some(KindArg::Classical), ..) => CheckKind::Classical,
        (None, Some(_), _) => CheckKind::GHardy,
        (None, None, Some(_)) => CheckKind::SupHardy,
        (None, None, None) => return Err(CliError::usage("give --g, --semiring or --kind")),
    };
    let domain = match (&a.domain, kind) {
        (Some(s), _) => parse_bounds(s)?,
        (None, CheckKind::Classical) => vec![0.0, 1.0],
        (None, _) => vec![0.0, 1.0, 0.0, 1.0],
    };
    let psi = a.psi.as_deref().map(|s| parse_expr("--psi", s)).transpose()?;
    Ok(HardyScenario { name: None, f, g, semiring, psi, normalization: None, p, kind, domain })
}

// ---------------------------------------------------------------- hardy

pub fn hardy(a: &HardyArgs) -> Result<Outcome, CliError> {
    let cfg = base_config();
    let scn = build_scenario(&a.scenario)?;
    if a.diagnostics {
        let gen = scn.generator().map_err(|_| CliError::usage("--diagnostics needs a generator (--g)"))?;
        let d = remark_diagnostics(gen, &scn.f, scn.p, &cfg)?;
        let diverged = [d.lhs, d.rhs_integral].iter().flatten().any(|s| s.status == Status::Diverged);
        let exit = if diverged { EXIT_DIVERGED } else { EXIT_OK };
        return Ok(Outcome { report: Report::Diagnostics(d), config: cfg, exit });
    }
    check_p(scn.p)?;
    let report = check(&scn, &cfg)?;
    let diverged = report.statuses.values().any(|s| *s == Status::Diverged);
    let exit = if report.holds.is_none() && diverged { EXIT_DIVERGED } else { EXIT_OK };
    Ok(Outcome { report: Report::Hardy(report), config: cfg, exit })
}

// ---------------------------------------------------------------- reproduce

pub fn reproduce_cmd(a: &ReproduceArgs) -> Result<Outcome, CliError> {
    if !FIXTURE_NAMES.contains(&a.name.as_str()) {
        return Err(CliError::usage(format!(
            "unknown example {:?}; choose one of {}",
            a.name,
            FIXTURE_NAMES.join(", ")
        )));
    }
    let cfg = base_config();
    let r = reproduce(&a.name, &cfg)?;
    let exit = if r.matches { EXIT_OK } else { EXIT_USAGE };
    Ok(Outcome { report: Report::Reproduction(r), config: cfg, exit })
}

// ---------------------------------------------------------------- fuzz

pub fn fuzz(a: &FuzzArgs) -> Result<Outcome, CliError> {
    let mut fc = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read campaign config {}: {e}", path.display())))?;
            serde_json::from_str::<FuzzConfig>(&text)
                .map_err(|e| CliError::usage(format!("campaign config {}: {e}", path.display())))?
        }
        None => FuzzConfig::default(),
    };
    if let Some(t) = a.trials {
        fc.trials = t;
    }
    if let Some(s) = a.seed {
        fc.seed = s;
    }
    fc.config = fc.config.with_env_overrides();
    let report = run_campaign(&fc)?;
    if let Some(dir) = &a.corpus {
        write_failure_corpus(&report, dir)
            .map_err(|e| CliError::usage(format!("cannot write corpus to {}: {e}", dir.display())))?;
    }
    let exit = if report.flagged.is_empty() { EXIT_OK } else { EXIT_USAGE };
    Ok(Outcome { report: Report::Campaign(report), config: fc.config, exit })
}

// ---------------------------------------------------------------- refine

pub fn refine(a: &RefineArgs) -> Result<Outcome, CliError> {
    let cfg = base_config();
    let scn = build_scenario(&a.scenario)?;
    check_p(scn.p)?;
    let report = refine_study(&scn, &a.levels, &cfg)?;
    Ok(Outcome { report: Report::Convergence(report), config: cfg, exit: EXIT_OK })
}
