use serde::{Deserialize, Serialize};

use crate::quadrature::Quadrature;

/// Numerical settings shared by every check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub quadrature: Quadrature,
    /// Grid levels for stand-alone sup-integrals (`2^levels + 1` nodes per axis).
    pub sup_levels: u32,
    /// Cells per axis for stand-alone Sugeno integrals and level sets.
    pub level_set_grid: usize,
    /// Grid levels for the sup-integral Hardy check, which evaluates the
    /// kernel at every node.
    pub sup_hardy_levels: u32,
    /// Cells per axis for the Sugeno Hardy check.
    pub sugeno_hardy_grid: usize,
    /// Points per axis for the pointwise `R ≤ f` check.
    pub pointwise_grid: usize,
    /// Distance kept from the axes where `1/(xy)` appears.
    pub axis_inset: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            quadrature: Quadrature::default(),
            sup_levels: 12,
            level_set_grid: 2048,
            sup_hardy_levels: 10,
            sugeno_hardy_grid: 256,
            pointwise_grid: 64,
            axis_inset: 1e-6,
        }
    }
}

impl Config {
    /// Reads `PSEUDOCALC_MAX_DEPTH` when set to a positive integer.
    pub fn with_env_overrides(mut self) -> Config {
        if let Some(depth) = std::env::var("PSEUDOCALC_MAX_DEPTH").ok().and_then(|v| v.parse::<u32>().ok()) {
            if depth > 0 {
                self.quadrature.max_depth = depth;
            }
        }
        self
    }
}
