//! Generator functions `g` and their inverses.
//!
//! A generator induces the pseudo-operations `x ⊕ y = g⁻¹(g(x) + g(y))` and
//! `x ⊙ y = g⁻¹(g(x)·g(y))`, and turns a classical integral into a
//! pseudo-integral through `g⁻¹(∫ g(f))`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::expr::{Expr, ExprError};

/// Round-trip tolerance every generator must meet on its interior.
pub const ROUND_TRIP_TOL: f64 = 1e-9;

/// Lower clamp applied to generators that blow up at zero.
pub const SINGULAR_CLAMP: f64 = 1e-6;

const EDGE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("{value} lies outside [{low}, {high}] for generator {name}")]
    Range { name: String, value: f64, low: f64, high: f64 },
    #[error("generator {name} is singular at {value}")]
    Singularity { name: String, value: f64 },
    #[error("generator {name}: {source}")]
    Eval { name: String, source: ExprError },
    #[error("invalid generator spec {spec:?}: {reason}")]
    Spec { spec: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorKind {
    Identity,
    /// `g(x) = √x`
    Sqrt,
    /// `g(x) = x/2`
    Half,
    /// `g(x) = x^a`, `a > 0`
    Power(f64),
    /// `g(x) = e^{λx}`
    Exp(f64),
    /// `g(x) = x^{-λ}`, `λ > 0`
    InvPower(f64),
    /// User-supplied forward and inverse expressions; both are evaluated with
    /// the argument bound to `x` and to `y`.
    Custom { forward: Arc<Expr>, inverse: Arc<Expr> },
}

/// A strictly monotone continuous map on `[domain_low, domain_high]` together
/// with its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub name: String,
    pub kind: GeneratorKind,
    pub direction: Direction,
    pub domain_low: f64,
    pub domain_high: f64,
    pub singular_at_zero: bool,
}

impl Generator {
    fn builtin(name: String, kind: GeneratorKind, direction: Direction) -> Generator {
        let singular_at_zero = matches!(kind, GeneratorKind::InvPower(_));
        Generator {
            name,
            kind,
            direction,
            domain_low: if singular_at_zero { SINGULAR_CLAMP } else { 0.0 },
            domain_high: 1.0,
            singular_at_zero,
        }
    }

    pub fn identity() -> Generator {
        Self::builtin("identity".into(), GeneratorKind::Identity, Direction::Increasing)
    }

    pub fn sqrt() -> Generator {
        Self::builtin("sqrt".into(), GeneratorKind::Sqrt, Direction::Increasing)
    }

    pub fn half() -> Generator {
        Self::builtin("half".into(), GeneratorKind::Half, Direction::Increasing)
    }

    pub fn power(a: f64) -> Result<Generator, GeneratorError> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(GeneratorError::Spec {
                spec: format!("power:{a}"),
                reason: "exponent must be positive and finite".into(),
            });
        }
        Ok(Self::builtin(format!("power:{a}"), GeneratorKind::Power(a), Direction::Increasing))
    }

    pub fn exp_family(lambda: f64) -> Result<Generator, GeneratorError> {
        if !(lambda.is_finite() && lambda != 0.0) {
            return Err(GeneratorError::Spec {
                spec: format!("exp:{lambda}"),
                reason: "rate must be finite and non-zero".into(),
            });
        }
        let direction = if lambda > 0.0 { Direction::Increasing } else { Direction::Decreasing };
        Ok(Self::builtin(format!("exp:{lambda}"), GeneratorKind::Exp(lambda), direction))
    }

    pub fn inv_power(lambda: f64) -> Result<Generator, GeneratorError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(GeneratorError::Spec {
                spec: format!("invpower:{lambda}"),
                reason: "exponent must be positive and finite".into(),
            });
        }
        Ok(Self::builtin(
            format!("invpower:{lambda}"),
            GeneratorKind::InvPower(lambda),
            Direction::Decreasing,
        ))
    }

    /// A generator from expressions. The direction is taken from the endpoint
    /// values; strictness is left to [`validate_generator`].
    pub fn custom(forward: Expr, inverse: Expr) -> Result<Generator, GeneratorError> {
        let name = format!("custom:{forward}|{inverse}");
        let eval = |e: &Expr, v: f64| {
            e.eval(v, v).map_err(|source| GeneratorError::Eval { name: name.clone(), source })
        };
        let at_low = eval(&forward, 0.0)?;
        let at_high = eval(&forward, 1.0)?;
        let direction = if at_high >= at_low { Direction::Increasing } else { Direction::Decreasing };
        Ok(Generator {
            name: name.clone(),
            kind: GeneratorKind::Custom { forward: Arc::new(forward), inverse: Arc::new(inverse) },
            direction,
            domain_low: 0.0,
            domain_high: 1.0,
            singular_at_zero: false,
        })
    }

    /// The formula for `g`, with no domain checks.
    pub fn forward_raw(&self, x: f64) -> Result<f64, GeneratorError> {
        Ok(match &self.kind {
            GeneratorKind::Identity => x,
            GeneratorKind::Sqrt => x.sqrt(),
            GeneratorKind::Half => x / 2.0,
            GeneratorKind::Power(a) => x.powf(*a),
            GeneratorKind::Exp(l) => (l * x).exp(),
            GeneratorKind::InvPower(l) => x.powf(-l),
            GeneratorKind::Custom { forward, .. } => forward
                .eval(x, x)
                .map_err(|source| GeneratorError::Eval { name: self.name.clone(), source })?,
        })
    }

    /// The formula for `g⁻¹`, with no range checks.
    pub fn inverse_raw(&self, y: f64) -> Result<f64, GeneratorError> {
        Ok(match &self.kind {
            GeneratorKind::Identity => y,
            GeneratorKind::Sqrt => y * y,
            GeneratorKind::Half => 2.0 * y,
            GeneratorKind::Power(a) => y.powf(1.0 / a),
            GeneratorKind::Exp(l) => y.ln() / l,
            GeneratorKind::InvPower(l) => y.powf(-1.0 / l),
            GeneratorKind::Custom { inverse, .. } => inverse
                .eval(y, y)
                .map_err(|source| GeneratorError::Eval { name: self.name.clone(), source })?,
        })
    }

    /// Closure of `g`'s range over the (clamped) domain, as `(low, high)`.
    pub fn range(&self) -> Result<(f64, f64), GeneratorError> {
        let a = self.forward_raw(self.domain_low)?;
        let b = self.forward_raw(self.domain_high)?;
        Ok((a.min(b), a.max(b)))
    }

    /// `g(x)`.
    pub fn eval_forward(&self, x: f64) -> Result<f64, GeneratorError> {
        if self.singular_at_zero && x <= 0.0 {
            return Err(GeneratorError::Singularity { name: self.name.clone(), value: x });
        }
        let x = clamp_with_slack(x, self.domain_low, self.domain_high).ok_or_else(|| {
            GeneratorError::Range {
                name: self.name.clone(),
                value: x,
                low: self.domain_low,
                high: self.domain_high,
            }
        })?;
        self.forward_raw(x)
    }

    /// `g⁻¹(y)` for `y` in the closure of the range.
    pub fn eval_inverse(&self, y: f64) -> Result<f64, GeneratorError> {
        let (low, high) = self.range()?;
        let y = clamp_with_slack(y, low, high).ok_or_else(|| GeneratorError::Range {
            name: self.name.clone(),
            value: y,
            low,
            high,
        })?;
        self.inverse_raw(y)
    }

    /// The spec string this generator parses back from.
    pub fn spec(&self) -> String {
        self.name.clone()
    }
}

fn clamp_with_slack(v: f64, low: f64, high: f64) -> Option<f64> {
    if v.is_nan() {
        return None;
    }
    let slack = EDGE_SLACK * high.abs().max(low.abs()).max(1.0);
    if v < low - slack || v > high + slack {
        return None;
    }
    Some(v.clamp(low, high))
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Parses `identity`, `sqrt`, `half`, `power:<a>`, `exp:<λ>`, `invpower:<λ>`
/// and `custom:<forward>|<inverse>`.
impl FromStr for Generator {
    type Err = GeneratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = |reason: &str| GeneratorError::Spec { spec: s.to_string(), reason: reason.into() };
        let (head, param) = match s.split_once(':') {
            Some((h, p)) => (h, Some(p)),
            None => (s, None),
        };
        let number = |p: Option<&str>| -> Result<f64, GeneratorError> {
            p.ok_or_else(|| bad("missing numeric parameter"))?
                .trim()
                .parse::<f64>()
                .map_err(|_| bad("parameter is not a number"))
        };
        match head {
            "identity" | "id" if param.is_none() => Ok(Generator::identity()),
            "sqrt" if param.is_none() => Ok(Generator::sqrt()),
            "half" if param.is_none() => Ok(Generator::half()),
            "power" => Generator::power(number(param)?),
            "exp" => Generator::exp_family(number(param)?),
            "invpower" => Generator::inv_power(number(param)?),
            "custom" => {
                let body = param.ok_or_else(|| bad("expected custom:<forward>|<inverse>"))?;
                let (fwd, inv) =
                    body.split_once('|').ok_or_else(|| bad("expected custom:<forward>|<inverse>"))?;
                let fwd: Expr = fwd.parse().map_err(|e: ExprError| bad(&e.to_string()))?;
                let inv: Expr = inv.parse().map_err(|e: ExprError| bad(&e.to_string()))?;
                Generator::custom(fwd, inv)
            }
            _ => Err(bad("unknown generator")),
        }
    }
}

impl Serialize for Generator {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.name)
    }
}

impl<'de> Deserialize<'de> for Generator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityViolation {
    pub x_left: f64,
    pub x_right: f64,
    pub g_left: f64,
    pub g_right: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub generator: String,
    pub samples: usize,
    pub max_round_trip_error: f64,
    pub worst_x: f64,
    pub violation: Option<MonotonicityViolation>,
    /// Sample points where `g` or `g⁻¹` failed to evaluate.
    pub eval_failures: usize,
    pub notes: Vec<String>,
    pub passed: bool,
}

/// Samples `samples` interior points, measuring the worst `|g⁻¹(g(x)) − x|`
/// and checking strict monotonicity in the declared direction.
pub fn validate_generator(gen: &Generator, samples: usize) -> ValidationReport {
    let samples = samples.max(2);
    let (lo, hi) = (gen.domain_low, gen.domain_high);
    let mut max_err: f64 = 0.0;
    let mut worst_x = lo;
    let mut violation = None;
    let mut failures = 0;
    let mut prev: Option<(f64, f64)> = None;
    for i in 1..=samples {
        let x = lo + (hi - lo) * i as f64 / (samples + 1) as f64;
        let gx = match gen.forward_raw(x) {
            Ok(v) if v.is_finite() => v,
            _ => {
                failures += 1;
                continue;
            }
        };
        match gen.inverse_raw(gx) {
            Ok(back) if back.is_finite() => {
                let err = (back - x).abs();
                if err > max_err {
                    max_err = err;
                    worst_x = x;
                }
            }
            _ => failures += 1,
        }
        if let Some((px, pg)) = prev {
            let ok = match gen.direction {
                Direction::Increasing => gx > pg,
                Direction::Decreasing => gx < pg,
            };
            if !ok && violation.is_none() {
                violation =
                    Some(MonotonicityViolation { x_left: px, x_right: x, g_left: pg, g_right: gx });
            }
        }
        prev = Some((x, gx));
    }
    let mut notes = Vec::new();
    if gen.singular_at_zero {
        notes.push(format!("domain lower end clamped to {} (singular at zero)", gen.domain_low));
    }
    ValidationReport {
        generator: gen.name.clone(),
        samples,
        max_round_trip_error: max_err,
        worst_x,
        passed: max_err < ROUND_TRIP_TOL && violation.is_none() && failures == 0,
        violation,
        eval_failures: failures,
        notes,
    }
}
