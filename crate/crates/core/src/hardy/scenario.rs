use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::generators::Generator;
use crate::pseudo_integral::PsiDensity;
use crate::quadrature::Rect;
use crate::semiring::Semiring;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    GHardy,
    SupHardy,
    SugenoHardy,
    Classical,
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckKind::GHardy => "g_hardy",
            CheckKind::SupHardy => "sup_hardy",
            CheckKind::SugenoHardy => "sugeno_hardy",
            CheckKind::Classical => "classical",
        })
    }
}

impl std::str::FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "g_hardy" => CheckKind::GHardy,
            "sup_hardy" => CheckKind::SupHardy,
            "sugeno_hardy" => CheckKind::SugenoHardy,
            "classical" => CheckKind::Classical,
            _ => return Err(Error::Invalid(format!("unknown check kind {s:?}"))),
        })
    }
}

/// How the sup-integral kernel is normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupNormalization {
    /// Residual by the sup-measure of `[0,x]×[0,y]`, i.e. the sup-integral
    /// of the ⊙-unit over the rectangle.
    #[default]
    RectMeasure,
    /// Plain division by the area `xy`.
    Area,
}

fn unit_domain() -> Vec<f64> {
    vec![0.0, 1.0, 0.0, 1.0]
}

fn is_unit_domain(d: &Vec<f64>) -> bool {
    *d == unit_domain()
}

/// One inequality check, as stored in scenario files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyScenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub f: Expr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Generator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semiring: Option<Semiring>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Expr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<SupNormalization>,
    pub p: f64,
    pub kind: CheckKind,
    /// `[x_low, x_high, y_low, y_high]`, or `[low, high]` for the classical check.
    #[serde(default = "unit_domain", skip_serializing_if = "is_unit_domain")]
    pub domain: Vec<f64>,
}

impl HardyScenario {
    pub fn g_hardy(f: Expr, g: Generator, p: f64) -> HardyScenario {
        HardyScenario {
            name: None,
            f,
            g: Some(g),
            semiring: None,
            psi: None,
            normalization: None,
            p,
            kind: CheckKind::GHardy,
            domain: unit_domain(),
        }
    }

    pub fn sup_hardy(f: Expr, semiring: Semiring, p: f64) -> HardyScenario {
        HardyScenario {
            semiring: Some(semiring),
            g: None,
            kind: CheckKind::SupHardy,
            ..HardyScenario::g_hardy(f, Generator::identity(), p)
        }
    }

    pub fn sugeno_hardy(f: Expr, p: f64) -> HardyScenario {
        HardyScenario { g: None, kind: CheckKind::SugenoHardy, ..HardyScenario::g_hardy(f, Generator::identity(), p) }
    }

    pub fn classical(f: Expr, p: f64, low: f64, high: f64) -> HardyScenario {
        HardyScenario {
            g: None,
            kind: CheckKind::Classical,
            domain: vec![low, high],
            ..HardyScenario::g_hardy(f, Generator::identity(), p)
        }
    }

    pub fn named(mut self, name: &str) -> HardyScenario {
        self.name = Some(name.to_string());
        self
    }

    pub fn rect(&self) -> Result<Rect> {
        match self.domain.as_slice() {
            [a, b, c, d] => Rect::new(*a, *b, *c, *d),
            other => Err(Error::Invalid(format!("expected a 4-entry domain, got {other:?}"))),
        }
    }

    pub fn interval(&self) -> Result<(f64, f64)> {
        match self.domain.as_slice() {
            [a, b] | [a, b, _, _] if a < b => Ok((*a, *b)),
            other => Err(Error::Invalid(format!("expected a [low, high] domain, got {other:?}"))),
        }
    }

    pub fn generator(&self) -> Result<&Generator> {
        self.g.as_ref().ok_or_else(|| Error::Invalid(format!("{} scenario needs a generator `g`", self.kind)))
    }

    /// The semiring for a sup check: explicit `semiring`, else one generated by `g`.
    pub fn sup_semiring(&self) -> Result<Semiring> {
        match (&self.semiring, &self.g) {
            (Some(s), _) => Ok(s.clone()),
            (None, Some(g)) => Ok(Semiring::generated(g.clone())?),
            (None, None) => Err(Error::Invalid("sup_hardy scenario needs `semiring` or `g`".into())),
        }
    }

    pub fn psi_density(&self, s: &Semiring) -> Result<PsiDensity> {
        match &self.psi {
            Some(e) => PsiDensity::from_expr(e.clone()),
            None => Ok(PsiDensity::unit_of(s)),
        }
    }

    /// Short label for tables.
    pub fn label(&self) -> String {
        let how = match self.kind {
            CheckKind::GHardy => self.g.as_ref().map(|g| g.spec()).unwrap_or_default(),
            CheckKind::SupHardy => self.sup_semiring().map(|s| s.spec()).unwrap_or_default(),
            _ => String::new(),
        };
        format!("{} {} f={} p={}", self.kind, how, self.f, self.p)
    }
}
