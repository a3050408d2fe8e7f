use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::hardy::{check, CheckKind, HardyScenario};
use crate::quadrature::{Quadrature, Status};

/// Both sides at one resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub level: u32,
    /// Simpson panels per axis, grid levels, or cells per axis, by check kind.
    pub resolution: usize,
    pub lhs: Option<f64>,
    pub rhs_integral: Option<f64>,
    pub rhs: Option<f64>,
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub scenario: HardyScenario,
    pub levels: Vec<LevelResult>,
    /// `lhs[k+1] - lhs[k]`.
    pub lhs_differences: Vec<f64>,
    /// `log2(|d_k| / |d_{k+1}|)` per level step, absent when a difference
    /// is at rounding level.
    pub observed_orders: Vec<Option<f64>>,
    /// The last available observed order.
    pub estimated_order: Option<f64>,
    /// `max(lhs) - min(lhs)` over all levels.
    pub variation: f64,
    pub notes: Vec<String>,
}

/// Differences below this are treated as rounding noise.
const NOISE: f64 = 1e-14;

fn config_for_level(base: &Config, kind: CheckKind, level: u32) -> (Config, usize) {
    let mut cfg = *base;
    cfg.pointwise_grid = 1;
    match kind {
        CheckKind::GHardy | CheckKind::Classical => {
            let panels = 1usize << level;
            cfg.quadrature = Quadrature { fixed_panels: Some(panels), ..base.quadrature };
            (cfg, panels)
        }
        CheckKind::SupHardy => {
            cfg.sup_hardy_levels = level;
            (cfg, (1usize << level) + 1)
        }
        CheckKind::SugenoHardy => {
            cfg.sugeno_hardy_grid = 1usize << level;
            (cfg, 1usize << level)
        }
    }
}

/// Recomputes both sides at each level and estimates how fast the left side
/// settles. For generator-based and classical checks a level `L` means
/// composite Simpson with `2^L` panels per axis; for sup checks a
/// `(2^L + 1)²` grid; for Sugeno checks `2^L` cells per axis.
pub fn refine_study(scn: &HardyScenario, levels: &[u32], base: &Config) -> Result<ConvergenceReport> {
    if levels.is_empty() {
        return Err(Error::Invalid("a refinement study needs at least one level".into()));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid(format!("levels {levels:?} must be strictly ascending")));
    }
    if let Some(l) = levels.iter().find(|l| **l > 14) {
        return Err(Error::Invalid(format!("level {l} is beyond the supported maximum of 14")));
    }
    let mut results = Vec::with_capacity(levels.len());
    for &level in levels {
        let (cfg, resolution) = config_for_level(base, scn.kind, level);
        let report = check(scn, &cfg)?;
        if report.statuses.values().any(|s| *s == Status::Diverged) {
            return Err(Error::Invalid(format!("scenario diverges at level {level}; refinement needs convergent integrals")));
        }
        results.push(LevelResult {
            level,
            resolution,
            lhs: report.lhs,
            rhs_integral: report.rhs_integral,
            rhs: report.rhs,
            holds: report.holds,
        });
    }
    let lhs: Vec<f64> = results.iter().filter_map(|r| r.lhs).collect();
    let mut notes = Vec::new();
    if lhs.len() != results.len() {
        notes.push("some levels produced no left-hand value".into());
    }
    let lhs_differences: Vec<f64> = lhs.windows(2).map(|w| w[1] - w[0]).collect();
    let observed_orders: Vec<Option<f64>> = lhs_differences
        .windows(2)
        .zip(levels.windows(3))
        .map(|(d, l)| {
            let (a, b) = (d[0].abs(), d[1].abs());
            (a > NOISE && b > NOISE).then(|| (a / b).log2() / (l[2] - l[1]) as f64)
        })
        .collect();
    let estimated_order = observed_orders.iter().rev().find_map(|o| *o);
    let variation = match (lhs.iter().copied().reduce(f64::max), lhs.iter().copied().reduce(f64::min)) {
        (Some(hi), Some(lo)) => hi - lo,
        _ => 0.0,
    };
    if estimated_order.is_none() && variation <= NOISE {
        notes.push("no variation across levels".into());
    }
    Ok(ConvergenceReport {
        scenario: scn.clone(),
        levels: results,
        lhs_differences,
        observed_orders,
        estimated_order,
        variation,
        notes,
    })
}
