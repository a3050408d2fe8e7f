use std::fmt::Write as _;

use pseudocalc::hardy::{DiagnosticsReport, Envelope, HardyReport};
use pseudocalc::harness::{CampaignReport, ConvergenceReport, Reproduction};
use pseudocalc::Config;
use serde::Serialize;

use crate::args::Format;
use crate::commands::{CliError, IntegralReport, Report};

pub fn render(report: &Report, config: Config, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(report, config),
        Format::Csv => csv_text(report),
        Format::Text => Ok(text(report)),
    }
}

fn to_json<T: Serialize>(config: Config, report: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(&Envelope::new(config, report))
        .map(|s| s + "\n")
        .map_err(|e| CliError::usage(format!("cannot serialise report: {e}")))
}

fn json(report: &Report, config: Config) -> Result<String, CliError> {
    match report {
        Report::Integral(r) => to_json(config, r),
        Report::Hardy(r) => to_json(config, r),
        Report::Diagnostics(r) => to_json(config, r),
        Report::Reproduction(r) => to_json(config, r),
        Report::Campaign(r) => to_json(config, r),
        Report::Convergence(r) => to_json(config, r),
    }
}

// ---------------------------------------------------------------- csv

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct HardyRow {
    /// Trial index in campaign tables.
    trial: Option<usize>,
    label: String,
    kind: String,
    p: f64,
    lhs: Option<f64>,
    rhs_integral: Option<f64>,
    constant: f64,
    rhs: Option<f64>,
    relation: &'static str,
    verdict: &'static str,
    margin: Option<f64>,
    max_excess: Option<f64>,
    error: Option<String>,
}

impl HardyRow {
    fn new(trial: Option<usize>, label: String, r: Option<&HardyReport>, error: Option<String>) -> HardyRow {
        HardyRow {
            trial,
            label,
            kind: r.map(|r| r.kind.to_string()).unwrap_or_default(),
            p: r.map_or(f64::NAN, |r| r.p),
            lhs: r.and_then(|r| r.lhs),
            rhs_integral: r.and_then(|r| r.rhs_integral),
            constant: r.map_or(f64::NAN, |r| r.constant),
            rhs: r.and_then(|r| r.rhs),
            relation: r.map_or("", |r| r.relation.symbol()),
            verdict: r.map_or("error", |r| r.verdict()),
            margin: r.and_then(|r| r.margin),
            max_excess: r.and_then(|r| r.pointwise_check).map(|pc| pc.max_excess),
            error,
        }
    }
}

#[derive(Serialize)]
struct ValueCsvRow<'a> {
    example: &'a str,
    expected: String,
    observed: String,
    quantity: &'a str,
    published: Option<&'a str>,
    published_value: Option<f64>,
    recomputed: Option<f64>,
    agrees: Option<bool>,
}

#[derive(Serialize)]
struct DiagnosticsRow {
    branch: String,
    p: f64,
    generator: String,
    constant: String,
    lhs: String,
    rhs_integral: String,
    rhs: String,
    criterion_value: String,
    holds: Option<bool>,
}

fn csv_text(report: &Report) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::usage(format!("cannot write csv: {e}"));
    match report {
        Report::Integral(r) => {
            // nested vectors do not fit a flat row
            w.write_record([
                "method",
                "f",
                "operator",
                "psi",
                "dim",
                "domain",
                "value",
                "classical",
                "error_estimate",
                "evaluations",
                "status",
            ])
            .map_err(fail)?;
            let domain: Vec<String> = r.domain.iter().map(|d| d.to_string()).collect();
            w.write_record([
                r.method.clone(),
                r.f.clone(),
                r.operator.clone().unwrap_or_default(),
                r.psi.clone().unwrap_or_default(),
                r.dim.to_string(),
                domain.join(";"),
                opt(r.value),
                opt(r.classical),
                opt(r.error_estimate),
                r.evaluations.map(|e| e.to_string()).unwrap_or_default(),
                status_name(r.status),
            ])
            .map_err(fail)?;
        }
        Report::Hardy(r) => w.serialize(HardyRow::new(None, r.label.clone(), Some(r), None)).map_err(fail)?,
        Report::Diagnostics(d) => {
            let side = |s: Option<pseudocalc::hardy::SideValue>| match s {
                Some(s) => opt(s.value).to_string(),
                None => String::new(),
            };
            w.serialize(DiagnosticsRow {
                branch: status_name(d.branch),
                p: d.p,
                generator: d.generator.clone(),
                constant: opt(d.constant),
                lhs: side(d.lhs),
                rhs_integral: side(d.rhs_integral),
                rhs: opt(d.rhs),
                criterion_value: opt(d.criterion_value),
                holds: d.holds,
            })
            .map_err(fail)?;
        }
        Report::Reproduction(r) => {
            for v in &r.values {
                w.serialize(ValueCsvRow {
                    example: &r.name,
                    expected: r.expected.to_string(),
                    observed: r.observed.to_string(),
                    quantity: &v.quantity,
                    published: v.published.as_deref(),
                    published_value: v.published_value,
                    recomputed: v.recomputed,
                    agrees: v.agrees,
                })
                .map_err(fail)?;
            }
        }
        Report::Campaign(c) => {
            for t in &c.records {
                let row = HardyRow::new(Some(t.index), t.scenario.label(), t.report.as_ref(), t.error.clone());
                w.serialize(row).map_err(fail)?;
            }
        }
        Report::Convergence(c) => {
            for l in &c.levels {
                w.serialize(l).map_err(fail)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::usage(format!("cannot write csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::usage(e.to_string()))
}

fn status_name<T: Serialize>(s: T) -> String {
    serde_json::to_value(s).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

// ---------------------------------------------------------------- text

fn text(report: &Report) -> String {
    let mut out = String::new();
    match report {
        Report::Integral(r) => integral_text(&mut out, r),
        Report::Hardy(r) => hardy_text(&mut out, r),
        Report::Diagnostics(d) => diagnostics_text(&mut out, d),
        Report::Reproduction(r) => reproduction_text(&mut out, r),
        Report::Campaign(c) => campaign_text(&mut out, c),
        Report::Convergence(c) => convergence_text(&mut out, c),
    }
    out
}

fn show(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn notes(out: &mut String, notes: &[String]) {
    for n in notes {
        let _ = writeln!(out, "note: {n}");
    }
}

fn integral_text(out: &mut String, r: &IntegralReport) {
    let over = match r.domain.as_slice() {
        [a, b] => format!("[{a}, {b}]"),
        [a, b, c, d] => format!("[{a}, {b}] x [{c}, {d}]"),
        other => format!("{other:?}"),
    };
    let with = r.operator.as_deref().map(|o| format!(" with {o}")).unwrap_or_default();
    let _ = writeln!(out, "{} of {}{with} over {over}", r.method, r.f);
    if let Some(psi) = &r.psi {
        let _ = writeln!(out, "psi         {psi}");
    }
    let value = match r.value {
        Some(v) => v.to_string(),
        None => "diverged".into(),
    };
    let _ = writeln!(out, "value       {value}");
    let _ = writeln!(out, "status      {}", status_name(r.status));
    if let Some(c) = r.classical {
        let _ = writeln!(
            out,
            "classical   {c} (error estimate {:e}, {} evaluations)",
            r.error_estimate.unwrap_or(f64::NAN),
            r.evaluations.unwrap_or(0)
        );
    }
    notes(out, &r.notes);
}

fn hardy_text(out: &mut String, r: &HardyReport) {
    let _ = writeln!(out, "{}", r.label);
    let _ = writeln!(out, "kind          {}", r.kind);
    let _ = writeln!(out, "p             {}", r.p);
    let _ = writeln!(out, "lhs           {}", show(r.lhs));
    let _ = writeln!(out, "rhs_integral  {}", show(r.rhs_integral));
    let _ = writeln!(out, "constant      {}", r.constant);
    let _ = writeln!(out, "rhs           {}", show(r.rhs));
    let _ = writeln!(out, "relation      lhs {} rhs", r.relation.symbol());
    let _ = writeln!(out, "verdict       {} (margin {})", r.verdict(), show(r.margin));
    if let Some(pc) = r.pointwise_check {
        let _ = writeln!(
            out,
            "pointwise     max(R - f) = {:e} at ({}, {}) on a {}x{} grid{}",
            pc.max_excess,
            pc.x,
            pc.y,
            pc.grid,
            pc.grid,
            if pc.f_monotone { "" } else { ", f not monotone" }
        );
    }
    for (k, s) in &r.statuses {
        let _ = writeln!(out, "status        {k}: {}", status_name(*s));
    }
    notes(out, &r.notes);
}

fn diagnostics_text(out: &mut String, d: &DiagnosticsReport) {
    let _ = writeln!(out, "diagnostics for p = {} with {} ({})", d.p, d.generator, status_name(d.branch));
    let _ = writeln!(out, "constant         {}", show(d.constant));
    for (name, side) in [("lhs", d.lhs), ("rhs_integral", d.rhs_integral)] {
        if let Some(s) = side {
            let _ = writeln!(
                out,
                "{name:<16} {} (classical {}, {})",
                show(s.value),
                s.classical,
                status_name(s.status)
            );
        }
    }
    let _ = writeln!(out, "rhs              {}", show(d.rhs));
    if let Some(c) = d.criterion_value {
        let _ = writeln!(out, "criterion value  {c} (compared with 1)");
    }
    let holds = match d.holds {
        Some(true) => "holds",
        Some(false) => "fails",
        None => "not evaluable",
    };
    let _ = writeln!(out, "verdict          {holds}");
    notes(out, &d.notes);
}

fn reproduction_text(out: &mut String, r: &Reproduction) {
    let _ = writeln!(out, "{}: {}", r.name, r.description);
    let _ = writeln!(
        out,
        "published verdict {}, recomputed verdict {} ({})",
        r.expected,
        r.observed,
        if r.matches { "match" } else { "MISMATCH" }
    );
    if !r.values.is_empty() {
        let _ = writeln!(out, "{:<24} {:<14} {:>22} {:>22}  agree", "quantity", "published", "", "recomputed");
        for v in &r.values {
            let agrees = match v.agrees {
                Some(true) => "yes",
                Some(false) => "NO",
                None => "",
            };
            let _ = writeln!(
                out,
                "{:<24} {:<14} {:>22} {:>22}  {agrees}",
                v.quantity,
                v.published.as_deref().unwrap_or("-"),
                show(v.published_value),
                show(v.recomputed)
            );
        }
    }
    notes(out, &r.notes);
}

fn campaign_text(out: &mut String, c: &CampaignReport) {
    let _ = writeln!(out, "campaign seed {} with {} trials", c.seed, c.trials);
    let _ = writeln!(
        out,
        "holds {}, fails {}, not evaluable {}, errors {}, pointwise violations {}",
        c.holds, c.fails, c.not_evaluable, c.errors, c.pointwise_violations
    );
    for i in &c.flagged {
        let t = &c.records[*i];
        let what = match (&t.report, &t.error) {
            (_, Some(e)) => format!("error: {e}"),
            (Some(r), None) => format!("{} (lhs {}, rhs {})", r.verdict(), show(r.lhs), show(r.rhs)),
            (None, None) => String::new(),
        };
        let _ = writeln!(out, "flagged trial {i}: {} -> {what}", t.scenario.label());
    }
}

fn convergence_text(out: &mut String, c: &ConvergenceReport) {
    let _ = writeln!(out, "{}", c.scenario.label());
    let _ = writeln!(out, "{:>5} {:>10} {:>24} {:>24}  verdict", "level", "resolution", "lhs", "rhs");
    for l in &c.levels {
        let verdict = match l.holds {
            Some(true) => "holds",
            Some(false) => "fails",
            None => "-",
        };
        let _ = writeln!(out, "{:>5} {:>10} {:>24} {:>24}  {verdict}", l.level, l.resolution, show(l.lhs), show(l.rhs));
    }
    let _ = writeln!(out, "estimated order  {}", show(c.estimated_order));
    let _ = writeln!(out, "variation        {:e}", c.variation);
    notes(out, &c.notes);
}
