use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::expr::Var;
use crate::generators::Generator;
use crate::hardy::{check, CheckKind, HardyReport, HardyScenario};
use crate::harness::families::{sample_function, Family};
use crate::harness::rng::SplitMix64;
use crate::semiring::Semiring;

/// Pointwise excess of `R` over `f` above which a monotone `f` counts as a
/// violation of the proof step.
pub const POINTWISE_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FuzzConfig {
    pub seed: u64,
    pub trials: usize,
    pub p_values: Vec<f64>,
    pub families: Vec<Family>,
    pub kinds: Vec<CheckKind>,
    /// Generators drawn for `g_hardy` trials.
    pub generators: Vec<Generator>,
    /// Semirings drawn for `sup_hardy` trials.
    pub semirings: Vec<Semiring>,
    /// Numerical settings for every trial.
    pub config: Config,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 20_240_601,
            trials: 500,
            p_values: vec![1.5, 2.0, 3.0],
            families: Family::ALL.to_vec(),
            kinds: vec![CheckKind::GHardy, CheckKind::SupHardy, CheckKind::SugenoHardy],
            // generators with g⁻¹(λu) ≤ λ·g⁻¹(u) for λ ≤ 1; for steeper ones
            // such as power:2 the kernel leaves [0,1] near the axes
            generators: vec![
                Generator::identity(),
                Generator::sqrt(),
                Generator::half(),
                Generator::power(0.25).expect("valid exponent"),
                Generator::power(0.75).expect("valid exponent"),
            ],
            semirings: vec![
                Semiring::sup_times(),
                Semiring::sup_plus(),
                Semiring::generated(Generator::identity()).expect("identity generates"),
                Semiring::generated(Generator::sqrt()).expect("sqrt generates"),
            ],
            config: Config {
                quadrature: crate::quadrature::Quadrature { tol: 1e-7, ..Default::default() },
                pointwise_grid: 16,
                sup_hardy_levels: 9,
                sugeno_hardy_grid: 128,
                ..Config::default()
            },
        }
    }
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Invalid("a campaign needs at least one trial".into()));
        }
        if self.p_values.is_empty() || self.families.is_empty() || self.kinds.is_empty() {
            return Err(Error::Invalid("p_values, families and kinds must be non-empty".into()));
        }
        if let Some(p) = self.p_values.iter().find(|p| !(**p > 1.0 && p.is_finite())) {
            return Err(Error::Hypothesis(format!("campaign p = {p} is outside the theorem regime p > 1")));
        }
        if self.kinds.contains(&CheckKind::GHardy) && self.generators.is_empty() {
            return Err(Error::Invalid("g_hardy trials need at least one generator".into()));
        }
        if self.kinds.contains(&CheckKind::SupHardy) && self.semirings.is_empty() {
            return Err(Error::Invalid("sup_hardy trials need at least one semiring".into()));
        }
        Ok(())
    }

    /// The scenario for trial `index`; depends only on the seed and the lists.
    pub fn scenario(&self, index: usize) -> HardyScenario {
        let mut rng = SplitMix64::for_trial(self.seed, index as u64);
        let kind = *rng.pick(&self.kinds);
        let family = *rng.pick(&self.families);
        let f = sample_function(&mut rng, family);
        let p = *rng.pick(&self.p_values);
        let scn = match kind {
            CheckKind::GHardy => HardyScenario::g_hardy(f, rng.pick(&self.generators).clone(), p),
            CheckKind::SupHardy => HardyScenario::sup_hardy(f, rng.pick(&self.semirings).clone(), p),
            CheckKind::SugenoHardy => HardyScenario::sugeno_hardy(f, p),
            CheckKind::Classical => {
                // one-variable section of the drawn function
                HardyScenario::classical(f.substitute(Var::Y, 1.0), p, 0.0, 1.0)
            }
        };
        scn.named(&format!("trial-{index}-{family}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub scenario: HardyScenario,
    pub report: Option<HardyReport>,
    pub error: Option<String>,
    /// Not serialized, so that reports of equal campaigns are byte-identical.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl TrialRecord {
    pub fn violates(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.holds == Some(false))
    }

    /// `f` was monotone on the grid and still `R` exceeded it.
    pub fn breaks_pointwise_step(&self) -> bool {
        self.report
            .as_ref()
            .and_then(|r| r.pointwise_check)
            .is_some_and(|pc| pc.f_monotone && pc.max_excess > POINTWISE_SLACK)
    }

    pub fn needs_replay(&self) -> bool {
        self.violates() || self.breaks_pointwise_step() || self.error.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub seed: u64,
    pub trials: usize,
    pub holds: usize,
    pub fails: usize,
    pub not_evaluable: usize,
    pub errors: usize,
    pub pointwise_violations: usize,
    /// Indices of trials to replay: failures, pointwise breaks and errors.
    pub flagged: Vec<usize>,
    pub records: Vec<TrialRecord>,
}

impl CampaignReport {
    pub fn total_wall_time(&self) -> Duration {
        self.records.iter().map(|r| r.wall_time).sum()
    }
}

pub fn run_trial(cfg: &FuzzConfig, index: usize) -> TrialRecord {
    let scenario = cfg.scenario(index);
    let start = Instant::now();
    let (report, error) = match check(&scenario, &cfg.config) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    TrialRecord { index, scenario, report, error, wall_time: start.elapsed() }
}

/// Runs every trial, in parallel, and tallies the verdicts in trial order.
pub fn run_campaign(cfg: &FuzzConfig) -> Result<CampaignReport> {
    cfg.validate()?;
    let records: Vec<TrialRecord> = (0..cfg.trials).into_par_iter().map(|i| run_trial(cfg, i)).collect();
    let mut report = CampaignReport {
        seed: cfg.seed,
        trials: cfg.trials,
        holds: 0,
        fails: 0,
        not_evaluable: 0,
        errors: 0,
        pointwise_violations: 0,
        flagged: Vec::new(),
        records: Vec::new(),
    };
    for r in &records {
        match (&r.report, &r.error) {
            (_, Some(_)) => report.errors += 1,
            (Some(h), None) => match h.holds {
                Some(true) => report.holds += 1,
                Some(false) => report.fails += 1,
                None => report.not_evaluable += 1,
            },
            (None, None) => unreachable!("a trial has a report or an error"),
        }
        if r.breaks_pointwise_step() {
            report.pointwise_violations += 1;
        }
        if r.needs_replay() {
            report.flagged.push(r.index);
        }
    }
    report.records = records;
    Ok(report)
}

/// Writes each flagged trial's scenario to `dir/trial-NNNNN.json`.
pub fn write_failure_corpus(report: &CampaignReport, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if report.flagged.is_empty() {
        return Ok(written);
    }
    std::fs::create_dir_all(dir)?;
    for r in report.records.iter().filter(|r| r.needs_replay()) {
        let path = dir.join(format!("trial-{:05}.json", r.index));
        let text = serde_json::to_string_pretty(&r.scenario).map_err(std::io::Error::other)?;
        std::fs::write(&path, text + "\n")?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> FuzzConfig {
        FuzzConfig {
            trials: 6,
            config: Config {
                pointwise_grid: 4,
                sup_hardy_levels: 5,
                sugeno_hardy_grid: 32,
                quadrature: crate::quadrature::Quadrature::with_tol(1e-6),
                ..Config::default()
            },
            ..FuzzConfig::default()
        }
    }

    #[test]
    fn scenarios_are_reproducible() {
        let cfg = FuzzConfig::default();
        for i in 0..50 {
            assert_eq!(cfg.scenario(i), cfg.scenario(i));
        }
        assert_ne!(cfg.scenario(0), cfg.scenario(1));
    }

    #[test]
    fn small_campaign_holds() {
        let report = run_campaign(&small()).unwrap();
        assert_eq!(report.holds, 6, "{report:#?}");
        assert!(report.flagged.is_empty());
        let indices: Vec<usize> = report.records.iter().map(|r| r.index).collect();
        assert_eq!(indices, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn steep_generator_kernel_leaves_the_carrier() {
        let f: crate::expr::Expr = "(x+y)/2".parse().unwrap();
        let scn = HardyScenario::g_hardy(f, Generator::power(2.0).unwrap(), 2.0);
        let outcome = check(&scn, &small().config);
        assert!(
            matches!(outcome, Err(Error::Generator(crate::generators::GeneratorError::Range { value, .. })) if value > 1.0),
            "{outcome:?}"
        );
    }

    #[test]
    fn config_validation() {
        let mut cfg = small();
        cfg.p_values = vec![0.5];
        assert!(matches!(cfg.validate(), Err(Error::Hypothesis(_))));
        cfg.p_values = vec![2.0];
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json_defaults() {
        let cfg: FuzzConfig = serde_json::from_str(r#"{"seed": 9, "trials": 3, "kinds": ["sugeno_hardy"]}"#).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.p_values, vec![1.5, 2.0, 3.0]);
        let back: FuzzConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
