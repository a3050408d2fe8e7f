use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::hardy::scenario::CheckKind;
use crate::quadrature::Status;

/// Relative slack allowed when comparing the two sides.
pub const RELATIVE_SLACK: f64 = 1e-9;
pub const ABSOLUTE_SLACK: f64 = 1e-12;
/// Slack for the Sugeno check, whose sides come from grid approximations.
pub const SUGENO_SLACK: f64 = 1e-6;

/// `lhs ≤ rhs` up to quadrature noise.
pub fn le_with_slack(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + RELATIVE_SLACK) + ABSOLUTE_SLACK
}

/// Which comparison the report's `holds` refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs ≤ rhs`, with slack.
    AtMost,
    /// `lhs < rhs`, strictly.
    Below,
    /// `lhs ≥ rhs`, with slack.
    AtLeast,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::Below => "<",
            Relation::AtLeast => ">=",
        }
    }
}

/// Largest excess of the kernel over `f` on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointwiseCheck {
    pub max_excess: f64,
    pub x: f64,
    pub y: f64,
    pub grid: usize,
    /// `f` was nondecreasing in each coordinate on the grid, so `R ≤ f` is expected.
    pub f_monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub kind: CheckKind,
    pub label: String,
    pub p: f64,
    /// `None` when the side could not be evaluated (for instance it diverged).
    pub lhs: Option<f64>,
    pub rhs_integral: Option<f64>,
    pub constant: f64,
    pub rhs: Option<f64>,
    pub relation: Relation,
    /// `None` when either side is missing.
    pub holds: Option<bool>,
    /// `rhs / lhs` for the classical check, `lhs - rhs` for the Sugeno check,
    /// `rhs - lhs` otherwise.
    pub margin: Option<f64>,
    pub pointwise_check: Option<PointwiseCheck>,
    pub statuses: BTreeMap<String, Status>,
    pub notes: Vec<String>,
}

impl HardyReport {
    pub fn verdict(&self) -> &'static str {
        match self.holds {
            Some(true) => "holds",
            Some(false) => "fails",
            None => "not evaluable",
        }
    }

    /// Fills `holds` and `margin` from the two sides.
    pub(crate) fn decide(&mut self) {
        let (Some(lhs), Some(rhs)) = (self.lhs, self.rhs) else {
            self.holds = None;
            self.margin = None;
            return;
        };
        let (holds, margin) = match self.relation {
            Relation::AtMost => (le_with_slack(lhs, rhs), rhs - lhs),
            Relation::Below => (lhs < rhs, rhs / lhs),
            Relation::AtLeast => (lhs >= rhs - SUGENO_SLACK, lhs - rhs),
        };
        self.holds = Some(holds);
        self.margin = Some(margin);
    }
}

/// What every serialized report is wrapped in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: crate::config::Config,
    pub report: T,
}

pub const SCHEMA_VERSION: u32 = 1;

impl<T> Envelope<T> {
    pub fn new(config: crate::config::Config, report: T) -> Envelope<T> {
        Envelope {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            report,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blank(relation: Relation, lhs: Option<f64>, rhs: Option<f64>) -> HardyReport {
        HardyReport {
            kind: CheckKind::GHardy,
            label: String::new(),
            p: 2.0,
            lhs,
            rhs_integral: None,
            constant: 16.0,
            rhs,
            relation,
            holds: None,
            margin: None,
            pointwise_check: None,
            statuses: BTreeMap::new(),
            notes: vec![],
        }
    }

    #[test]
    fn slack_is_tight() {
        assert!(le_with_slack(1.0 + 5e-10, 1.0));
        assert!(!le_with_slack(1.0 + 1e-8, 1.0));
        assert!(le_with_slack(5e-13, 0.0));
    }

    #[test]
    fn decisions() {
        let mut r = blank(Relation::AtMost, Some(1.0), Some(16.0));
        r.decide();
        assert_eq!((r.holds, r.margin), (Some(true), Some(15.0)));
        let mut r = blank(Relation::Below, Some(1.0), Some(1.0));
        r.decide();
        assert_eq!(r.holds, Some(false));
        let mut r = blank(Relation::AtLeast, Some(0.5), Some(0.5 + 1e-7));
        r.decide();
        assert_eq!(r.holds, Some(true));
        let mut r = blank(Relation::AtMost, None, Some(1.0));
        r.decide();
        assert_eq!(r.holds, None);
        assert_eq!(r.verdict(), "not evaluable");
    }

    #[test]
    fn report_round_trips_through_json() {
        let mut r = blank(Relation::AtMost, Some(0.1 + 0.2), Some(14.0 / 3.0));
        r.statuses.insert("lhs".into(), Status::Converged);
        r.notes.push("note".into());
        r.decide();
        let env = Envelope::new(crate::config::Config::default(), r);
        let text = serde_json::to_string(&env).unwrap();
        let back: Envelope<HardyReport> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, env);
    }
}
