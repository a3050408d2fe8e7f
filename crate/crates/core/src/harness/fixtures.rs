//! Built-in worked examples with the values printed alongside them in the
//! literature, recomputed side by side.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::generators::Generator;
use crate::hardy::{
    check, hardy_kernel_g, remark_diagnostics, DiagnosticsReport, HardyReport, HardyScenario,
};
use crate::quadrature::{Quadrature, Status};
use crate::semiring::Semiring;

pub const FIXTURE_NAMES: [&str; 8] =
    ["ex32", "ex33", "remark35a", "remark35b", "remark35c", "ex38", "ex39", "classical"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Diverges,
    NotEvaluable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Diverges => "diverges",
            Verdict::NotEvaluable => "not evaluable",
        })
    }
}

/// One quantity: the published figure (as printed and as a number) next to
/// the recomputed one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueRow {
    pub quantity: String,
    pub published: Option<String>,
    pub published_value: Option<f64>,
    pub recomputed: Option<f64>,
    /// Agreement within `tolerance`; absent when either side is missing.
    pub agrees: Option<bool>,
    pub tolerance: f64,
}

impl ValueRow {
    fn new(quantity: &str, published: Option<(&str, f64)>, recomputed: Option<f64>, tolerance: f64) -> ValueRow {
        let agrees = match (published, recomputed) {
            (Some((_, p)), Some(r)) => Some((p - r).abs() <= tolerance),
            _ => None,
        };
        ValueRow {
            quantity: quantity.to_string(),
            published: published.map(|(text, _)| text.to_string()),
            published_value: published.map(|(_, v)| v),
            recomputed,
            agrees,
            tolerance,
        }
    }

    fn recomputed_only(quantity: &str, recomputed: Option<f64>) -> ValueRow {
        ValueRow::new(quantity, None, recomputed, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reproduction {
    pub name: String,
    pub description: String,
    pub expected: Verdict,
    pub observed: Verdict,
    pub matches: bool,
    pub values: Vec<ValueRow>,
    pub notes: Vec<String>,
    pub hardy: Option<HardyReport>,
    pub diagnostics: Option<DiagnosticsReport>,
}

fn e(s: &str) -> Expr {
    s.parse().expect("built-in expression parses")
}

/// The inequality scenario behind a fixture, where there is one.
pub fn fixture_scenario(name: &str) -> Option<HardyScenario> {
    Some(match name {
        "ex32" => HardyScenario::g_hardy(e("x^2*y^2"), Generator::sqrt(), 2.0),
        "ex33" => HardyScenario::g_hardy(e("(x+y)/2"), Generator::half(), 2.0),
        "ex38" => HardyScenario { psi: Some(e("0")), ..HardyScenario::sup_hardy(e("(x+y)/2"), Semiring::sup_plus(), 2.0) },
        "ex39" => HardyScenario { psi: Some(e("1")), ..HardyScenario::sup_hardy(e("x*y"), Semiring::sup_times(), 2.0) },
        "classical" => HardyScenario::classical(e("x"), 2.0, 0.0, 1.0),
        _ => return None,
    }
    .named(name))
}

fn verdict_of(report: &HardyReport) -> Verdict {
    match report.holds {
        Some(true) => Verdict::Holds,
        Some(false) => Verdict::Fails,
        None if report.statuses.values().any(|s| *s == Status::Diverged) => Verdict::Diverges,
        None => Verdict::NotEvaluable,
    }
}

fn finish(
    name: &str,
    description: &str,
    expected: Verdict,
    observed: Verdict,
    values: Vec<ValueRow>,
    notes: Vec<String>,
    hardy: Option<HardyReport>,
    diagnostics: Option<DiagnosticsReport>,
) -> Reproduction {
    Reproduction {
        name: name.to_string(),
        description: description.to_string(),
        expected,
        observed,
        matches: expected == observed,
        values,
        notes,
        hardy,
        diagnostics,
    }
}

/// Runs the named built-in example.
pub fn reproduce(name: &str, cfg: &Config) -> Result<Reproduction> {
    let kernel_q = Quadrature { tol: cfg.quadrature.tol * 0.1, ..cfg.quadrature };
    match name {
        "ex32" => {
            let report = check(&fixture_scenario(name).expect("fixture"), cfg)?;
            let r_at = hardy_kernel_g(&Generator::sqrt(), |s, t| Ok(s * s * t * t), 0.5, 0.8, &kernel_q)?;
            let values = vec![
                ValueRow::new("R(0.5, 0.8)", Some(("x^3y^3/16", 0.4f64.powi(3) / 16.0)), Some(r_at), 1e-9),
                ValueRow::new("lhs", Some(("(1/25)^2", 1.0 / 625.0)), report.lhs, 1e-8),
                ValueRow::new("rhs_integral", Some(("2/9", 2.0 / 9.0)), report.rhs_integral, 1e-8),
                ValueRow::new("constant", Some(("2^4", 16.0)), Some(report.constant), 1e-12),
                ValueRow::new("rhs", Some(("2^5/9", 32.0 / 9.0)), report.rhs, 1e-8),
            ];
            let notes = vec![
                "published lhs (1/25)^2 integrates g(R) = sqrt(x^3y^3/16) instead of g(R^2) = x^3y^3/16; the latter gives 1/256 before g^-1 and 1/65536 after".into(),
                "published rhs_integral 2/9 doubles 1/9; with g(x) = sqrt(x) the inverse squares it, giving 1/81".into(),
                "the verdict holds under either set of values".into(),
            ];
            Ok(finish(name, "sqrt generator, f = x^2 y^2, p = 2", Verdict::Holds, verdict_of(&report), values, notes, Some(report), None))
        }
        "ex33" => {
            let report = check(&fixture_scenario(name).expect("fixture"), cfg)?;
            let r_at = hardy_kernel_g(&Generator::half(), |s, t| Ok((s + t) / 2.0), 0.5, 0.8, &kernel_q)?;
            let values = vec![
                ValueRow::new("R(0.5, 0.8)", Some(("(x+y)/4", 1.3 / 4.0)), Some(r_at), 1e-9),
                ValueRow::new("lhs", Some(("14/192", 14.0 / 192.0)), report.lhs, 1e-6),
                ValueRow::new("rhs_integral", Some(("7/24", 7.0 / 24.0)), report.rhs_integral, 1e-6),
                ValueRow::new("constant", Some(("2^4", 16.0)), Some(report.constant), 1e-12),
                ValueRow::new("rhs", Some(("14/3", 14.0 / 3.0)), report.rhs, 1e-5),
            ];
            Ok(finish(name, "half generator, f = (x+y)/2, p = 2", Verdict::Holds, verdict_of(&report), values, vec![], Some(report), None))
        }
        "remark35a" | "remark35b" | "remark35c" => {
            let p = match name {
                "remark35a" => 1.0 / 6.0,
                "remark35b" => -2.0,
                _ => 0.0,
            };
            let d = remark_diagnostics(&Generator::sqrt(), &e("x^2*y^2"), p, cfg)?;
            let lhs = d.lhs.as_ref();
            let rhs = d.rhs_integral.as_ref();
            let (expected, observed, values, notes, description) = match name {
                "remark35a" => (
                    Verdict::Fails,
                    match d.holds {
                        Some(true) => Verdict::Holds,
                        Some(false) => Verdict::Fails,
                        None => Verdict::NotEvaluable,
                    },
                    vec![
                        ValueRow::new("constant", Some(("-0.5848", -0.5848)), d.constant, 5e-5),
                        ValueRow::new("lhs classical integral", Some(("0.507968", 0.507968)), lhs.map(|s| s.classical), 1e-4),
                        ValueRow::new("rhs classical integral", Some(("0.734694", 0.734694)), rhs.map(|s| s.classical), 1e-4),
                        ValueRow::new("lhs", Some(("1.015936", 1.015936)), lhs.and_then(|s| s.value), 1e-4),
                        ValueRow::new("rhs_integral", Some(("1.469388", 1.469388)), rhs.and_then(|s| s.value), 1e-4),
                    ],
                    vec![
                        "published lhs and rhs_integral double the classical integrals; with g(x) = sqrt(x) the inverse squares them".into(),
                        "the verdict fails under either reading because the constant is negative".into(),
                    ],
                    "sqrt generator, f = x^2 y^2, p = 1/6",
                ),
                "remark35b" => (
                    Verdict::Diverges,
                    match lhs.map(|s| s.status) {
                        Some(Status::Diverged) => Verdict::Diverges,
                        _ => match d.holds {
                            Some(true) => Verdict::Holds,
                            Some(false) => Verdict::Fails,
                            None => Verdict::NotEvaluable,
                        },
                    },
                    vec![ValueRow::new("lhs classical integral", None, lhs.filter(|s| s.status != Status::Diverged).map(|s| s.classical), 0.0)],
                    vec!["published: the left-hand integral does not converge".into()],
                    "sqrt generator, f = x^2 y^2, p = -2",
                ),
                _ => (
                    Verdict::Fails,
                    match d.holds {
                        Some(true) => Verdict::Holds,
                        Some(false) => Verdict::Fails,
                        None => Verdict::NotEvaluable,
                    },
                    vec![
                        ValueRow::new("pseudo-integral of f", Some(("1/4 = 0.25", 0.25)), d.criterion_value, 1e-8),
                        ValueRow::recomputed_only(
                            "classical integral of g(f)",
                            d.criterion_value.map(|v| Generator::sqrt().forward_raw(v)).transpose()?,
                        ),
                    ],
                    vec![
                        "published 0.25 is the classical integral of g(f) = xy; applying g^-1 gives 1/16".into(),
                        "criterion >= 1 is taken as published; it fails under either value".into(),
                    ],
                    "sqrt generator, f = x^2 y^2, p = 0",
                ),
            };
            Ok(finish(name, description, expected, observed, values, notes, None, Some(d)))
        }
        "ex38" | "ex39" | "classical" => {
            let report = check(&fixture_scenario(name).expect("fixture"), cfg)?;
            let values = vec![
                ValueRow::recomputed_only("lhs", report.lhs),
                ValueRow::recomputed_only("rhs_integral", report.rhs_integral),
                ValueRow::recomputed_only("constant", Some(report.constant)),
                ValueRow::recomputed_only("rhs", report.rhs),
            ];
            let description = match name {
                "ex38" => "max-plus semiring, psi = 0, f = (x+y)/2, p = 2",
                "ex39" => "max-times semiring, psi = 1, f = xy, p = 2",
                _ => "classical inequality, f = x, p = 2 on [0,1]",
            };
            let notes = if name == "classical" {
                vec!["closed forms: lhs = 1/12, rhs = 4/3".into()]
            } else {
                vec!["published as a reduction only; no numbers are printed".into()]
            };
            Ok(finish(name, description, Verdict::Holds, verdict_of(&report), values, notes, Some(report), None))
        }
        other => Err(Error::Invalid(format!("unknown example {other:?}; known: {}", FIXTURE_NAMES.join(", ")))),
    }
}
