use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::expr::Expr;
use crate::harness::rng::SplitMix64;

/// Families of functions on `[0,1]²` that are non-negative, bounded by 1 and
/// nondecreasing in each coordinate by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `x^a * y^b` with `a, b ∈ [0, 4]`.
    #[serde(rename = "monomial")]
    Monomial,
    /// `c * (x + y) / 2` with `c ∈ (0, 1]`.
    #[serde(rename = "affine-mean")]
    AffineMean,
    /// `Σ w_i x^{a_i} y^{b_i}` with two or three terms, `w_i ≥ 0`, `Σ w_i ≤ 1`.
    #[serde(rename = "mixture")]
    Mixture,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Monomial, Family::AffineMean, Family::Mixture];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Monomial => "monomial",
            Family::AffineMean => "affine-mean",
            Family::Mixture => "mixture",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "monomial" => Ok(Family::Monomial),
            "affine-mean" => Ok(Family::AffineMean),
            "mixture" => Ok(Family::Mixture),
            _ => Err(Error::Invalid(format!("unknown function family {s:?}"))),
        }
    }
}

/// Rounds to a multiple of `1/steps` so printed scenarios stay readable.
fn grid(v: f64, steps: f64) -> f64 {
    (v * steps).round() / steps
}

fn monomial(rng: &mut SplitMix64) -> Expr {
    let a = grid(rng.uniform(0.0, 4.0), 100.0);
    let b = grid(rng.uniform(0.0, 4.0), 100.0);
    Expr::mul(Expr::pow(Expr::x(), Expr::constant(a)), Expr::pow(Expr::y(), Expr::constant(b)))
}

/// Draws one function of `family` from `rng`.
pub fn sample_function(rng: &mut SplitMix64, family: Family) -> Expr {
    match family {
        Family::Monomial => monomial(rng),
        Family::AffineMean => {
            let c = grid(1.0 - rng.next_f64(), 1000.0).max(0.001);
            Expr::div(Expr::mul(Expr::constant(c), Expr::add(Expr::x(), Expr::y())), Expr::constant(2.0))
        }
        Family::Mixture => {
            let terms = 2 + rng.below(2);
            let total = grid(rng.uniform(0.2, 1.0), 100.0);
            let raw: Vec<f64> = (0..terms).map(|_| rng.uniform(0.05, 1.0)).collect();
            let sum: f64 = raw.iter().sum();
            let mut expr: Option<Expr> = None;
            for w in raw {
                // floor keeps the rounded weights summing to at most `total`
                let w = (w / sum * total * 1000.0).floor() / 1000.0;
                let term = Expr::mul(Expr::constant(w), monomial(rng));
                expr = Some(match expr {
                    None => term,
                    Some(e) => Expr::add(e, term),
                });
            }
            expr.expect("at least two terms")
        }
    }
}

/// `f` drawn from `family` with a fresh generator seeded by `seed`.
pub fn random_function(seed: u64, family: Family) -> Expr {
    sample_function(&mut SplitMix64::new(seed), family)
}
