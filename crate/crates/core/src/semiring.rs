//! Pseudo-addition and pseudo-multiplication on the carrier `[0, 1]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::generators::{Generator, GeneratorError};

/// Result of a pseudo-operation. Values leaving the carrier are clamped to
/// its boundary and flagged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Saturating {
    pub value: f64,
    pub saturated: bool,
}

impl Saturating {
    fn clamp(raw: f64) -> Saturating {
        if raw > 1.0 {
            Saturating { value: 1.0, saturated: true }
        } else if raw < 0.0 {
            Saturating { value: 0.0, saturated: true }
        } else {
            Saturating { value: raw, saturated: false }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SemiringKind {
    /// `x ⊕ y = g⁻¹(g(x)+g(y))`, `x ⊙ y = g⁻¹(g(x)g(y))`.
    Generated(Generator),
    /// `⊕ = max`, `⊙ = +`: the `λ → ∞` limit of `g(x) = e^{λx}`.
    SupPlus,
    /// `⊕ = max`, `⊙ = ·`: the `λ → ∞` limit of `g(x) = x^{-λ}`.
    SupTimes,
    /// `⊕ = max`, `⊙ = min`.
    MaxMin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Semiring {
    pub kind: SemiringKind,
    /// ⊕-neutral element. For generated semirings this is `g⁻¹(0)` and may
    /// lie outside the carrier (e.g. `−∞` for `exp`).
    pub zero: f64,
    /// ⊙-neutral element, `g⁻¹(1)` for generated semirings.
    pub unit: f64,
}

impl Semiring {
    pub fn generated(gen: Generator) -> Result<Semiring, GeneratorError> {
        let zero = gen.inverse_raw(0.0)?;
        let unit = gen.inverse_raw(1.0)?;
        Ok(Semiring { kind: SemiringKind::Generated(gen), zero, unit })
    }

    pub fn sup_plus() -> Semiring {
        Semiring { kind: SemiringKind::SupPlus, zero: 0.0, unit: 0.0 }
    }

    pub fn sup_times() -> Semiring {
        Semiring { kind: SemiringKind::SupTimes, zero: 0.0, unit: 1.0 }
    }

    pub fn max_min() -> Semiring {
        Semiring { kind: SemiringKind::MaxMin, zero: 0.0, unit: 1.0 }
    }

    /// Whether `⊕` is `max`.
    pub fn is_idempotent_add(&self) -> bool {
        !matches!(self.kind, SemiringKind::Generated(_))
    }

    pub fn generator(&self) -> Option<&Generator> {
        match &self.kind {
            SemiringKind::Generated(g) => Some(g),
            _ => None,
        }
    }

    pub fn pseudo_add(&self, a: f64, b: f64) -> Result<Saturating, GeneratorError> {
        match &self.kind {
            SemiringKind::Generated(g) => {
                let raw = g.inverse_raw(g.forward_raw(a)? + g.forward_raw(b)?)?;
                Ok(Saturating::clamp(raw))
            }
            _ => Ok(Saturating { value: a.max(b), saturated: false }),
        }
    }

    pub fn pseudo_mul(&self, a: f64, b: f64) -> Result<Saturating, GeneratorError> {
        Ok(match &self.kind {
            SemiringKind::Generated(g) => {
                Saturating::clamp(g.inverse_raw(g.forward_raw(a)? * g.forward_raw(b)?)?)
            }
            SemiringKind::SupPlus => Saturating::clamp(a + b),
            SemiringKind::SupTimes => Saturating::clamp(a * b),
            SemiringKind::MaxMin => Saturating { value: a.min(b), saturated: false },
        })
    }

    /// Residual of `⊙`: the largest `c` with `c ⊙ b ≤ a` (for `b` not the
    /// zero). Used to normalise a sup-integral by the measure of its domain.
    pub fn pseudo_div(&self, a: f64, b: f64) -> Result<Saturating, GeneratorError> {
        Ok(match &self.kind {
            SemiringKind::Generated(g) => {
                Saturating::clamp(g.inverse_raw(g.forward_raw(a)? / g.forward_raw(b)?)?)
            }
            SemiringKind::SupPlus => Saturating::clamp(a - b),
            SemiringKind::SupTimes => Saturating::clamp(if b == 0.0 { 1.0 } else { a / b }),
            SemiringKind::MaxMin => Saturating { value: if a < b { a } else { 1.0 }, saturated: false },
        })
    }

    pub fn spec(&self) -> String {
        match &self.kind {
            SemiringKind::Generated(g) => format!("g:{}", g.spec()),
            SemiringKind::SupPlus => "supplus".into(),
            SemiringKind::SupTimes => "suptimes".into(),
            SemiringKind::MaxMin => "maxmin".into(),
        }
    }
}

impl fmt::Display for Semiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec())
    }
}

impl FromStr for Semiring {
    type Err = GeneratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "supplus" => Ok(Semiring::sup_plus()),
            "suptimes" => Ok(Semiring::sup_times()),
            "maxmin" => Ok(Semiring::max_min()),
            other => match other.strip_prefix("g:") {
                Some(gen) => Semiring::generated(gen.parse()?),
                None => Err(GeneratorError::Spec {
                    spec: other.to_string(),
                    reason: "expected g:<generator>, supplus, suptimes or maxmin".into(),
                }),
            },
        }
    }
}

impl Serialize for Semiring {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.spec())
    }
}

impl<'de> Deserialize<'de> for Semiring {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sqrt_ring() -> Semiring {
        Semiring::generated(Generator::sqrt()).unwrap()
    }

    #[test]
    fn spot_values() {
        // (√a + √b)² and (√a·√b)²
        let s = sqrt_ring();
        assert!((s.pseudo_add(0.25, 0.25).unwrap().value - 1.0).abs() < 1e-15);
        assert!((s.pseudo_mul(0.25, 0.25).unwrap().value - 0.0625).abs() < 1e-15);
        assert_eq!(Semiring::sup_plus().pseudo_add(0.3, 0.8).unwrap().value, 0.8);
        assert_eq!(Semiring::max_min().pseudo_add(0.2, 0.9).unwrap().value, 0.9);
        assert_eq!(Semiring::sup_times().pseudo_mul(0.5, 0.5).unwrap().value, 0.25);
        assert_eq!(Semiring::max_min().pseudo_mul(0.2, 0.9).unwrap().value, 0.2);
    }

    #[test]
    fn saturation_is_flagged() {
        let r = sqrt_ring().pseudo_add(0.5, 0.5).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(r.saturated);
        let r = Semiring::sup_plus().pseudo_mul(0.7, 0.6).unwrap();
        assert_eq!(r, Saturating { value: 1.0, saturated: true });
        let r = Semiring::generated(Generator::half()).unwrap().pseudo_add(0.9, 0.9).unwrap();
        assert!(r.saturated && r.value == 1.0);
    }

    #[test]
    fn neutral_elements() {
        let rings = vec![
            sqrt_ring(),
            Semiring::generated(Generator::half()).unwrap(),
            Semiring::generated(Generator::power(3.0).unwrap()).unwrap(),
            Semiring::generated(Generator::exp_family(2.0).unwrap()).unwrap(),
            Semiring::generated(Generator::inv_power(2.0).unwrap()).unwrap(),
            Semiring::sup_plus(),
            Semiring::sup_times(),
            Semiring::max_min(),
        ];
        for s in rings {
            for i in 1..20 {
                let x = i as f64 / 20.0;
                let a = s.pseudo_add(s.zero, x).unwrap().value;
                let m = s.pseudo_mul(s.unit, x).unwrap().value;
                assert!((a - x).abs() < 1e-9, "{s}: zero ⊕ {x} = {a}");
                assert!((m - x).abs() < 1e-9, "{s}: unit ⊙ {x} = {m}");
            }
        }
    }

    #[test]
    fn exp_generator_limits_match_closed_forms() {
        // large λ approaches max / + ; the limit semirings are exact
        let s = Semiring::generated(Generator::exp_family(200.0).unwrap()).unwrap();
        let a = s.pseudo_add(0.3, 0.4).unwrap().value;
        assert!((a - 0.4).abs() < 1e-2);
        let m = s.pseudo_mul(0.3, 0.4).unwrap().value;
        assert!((m - 0.7).abs() < 1e-12);
    }

    #[test]
    fn residual_inverts_mul() {
        for s in [sqrt_ring(), Semiring::sup_times(), Semiring::sup_plus()] {
            let b = if s.kind == SemiringKind::SupPlus { 0.2 } else { 0.8 };
            let prod = s.pseudo_mul(0.5, b).unwrap().value;
            let back = s.pseudo_div(prod, b).unwrap().value;
            assert!((back - 0.5).abs() < 1e-12, "{s}");
        }
    }

    #[test]
    fn specs_round_trip() {
        for spec in ["supplus", "suptimes", "maxmin", "g:sqrt", "g:power:0.5"] {
            let s: Semiring = spec.parse().unwrap();
            assert_eq!(s.spec(), spec);
        }
        assert!("plus".parse::<Semiring>().is_err());
    }

    fn ring_strategy() -> impl Strategy<Value = Semiring> {
        prop_oneof![
            Just(sqrt_ring()),
            Just(Semiring::generated(Generator::half()).unwrap()),
            Just(Semiring::generated(Generator::power(3.0).unwrap()).unwrap()),
            Just(Semiring::generated(Generator::identity()).unwrap()),
            Just(Semiring::sup_plus()),
            Just(Semiring::sup_times()),
            Just(Semiring::max_min()),
        ]
    }

    #[test]
    fn laws_hold_over_ten_thousand_triples_per_kind() {
        let rings = [
            sqrt_ring(),
            Semiring::generated(Generator::half()).unwrap(),
            Semiring::generated(Generator::power(3.0).unwrap()).unwrap(),
            Semiring::sup_plus(),
            Semiring::sup_times(),
            Semiring::max_min(),
        ];
        let mut rng = crate::harness::SplitMix64::new(0x5eed);
        for s in &rings {
            for _ in 0..10_000 {
                let (a, b, c) = (rng.uniform(0.0, 0.1), rng.uniform(0.0, 0.1), rng.uniform(0.0, 0.1));
                for op in [Semiring::pseudo_add, Semiring::pseudo_mul] {
                    let v = |x, y| op(s, x, y).unwrap().value;
                    assert!((v(a, b) - v(b, a)).abs() < 1e-9, "{s}: {a} {b}");
                    assert!((v(a, v(b, c)) - v(v(a, b), c)).abs() < 1e-9, "{s}: {a} {b} {c}");
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn commutative_and_associative(
            s in ring_strategy(),
            a in 0.0f64..0.3, b in 0.0f64..0.3, c in 0.0f64..0.3,
        ) {
            // operands small enough that no sum leaves the carrier
            for op in [Semiring::pseudo_add, Semiring::pseudo_mul] {
                let ab = op(&s, a, b).unwrap().value;
                let ba = op(&s, b, a).unwrap().value;
                prop_assert!((ab - ba).abs() < 1e-9);
                let left = op(&s, op(&s, a, b).unwrap().value, c).unwrap().value;
                let right = op(&s, a, op(&s, b, c).unwrap().value).unwrap().value;
                prop_assert!((left - right).abs() < 1e-9, "{} {} {} {}", s, a, b, c);
            }
        }

        #[test]
        fn monotone(s in ring_strategy(), a in 0.0f64..1.0, da in 0.0f64..0.5, b in 0.0f64..1.0) {
            let a2 = (a + da).min(1.0);
            prop_assert!(s.pseudo_add(a, b).unwrap().value <= s.pseudo_add(a2, b).unwrap().value + 1e-12);
            prop_assert!(s.pseudo_mul(a, b).unwrap().value <= s.pseudo_mul(a2, b).unwrap().value + 1e-12);
        }

        #[test]
        fn generated_mul_distributes(a in 0.0f64..1.0, b in 0.0f64..0.25, c in 0.0f64..0.25) {
            for s in [sqrt_ring(), Semiring::generated(Generator::half()).unwrap(),
                      Semiring::generated(Generator::power(3.0).unwrap()).unwrap()] {
                let lhs = s.pseudo_mul(a, s.pseudo_add(b, c).unwrap().value).unwrap().value;
                let rhs = s.pseudo_add(
                    s.pseudo_mul(a, b).unwrap().value,
                    s.pseudo_mul(a, c).unwrap().value,
                ).unwrap().value;
                prop_assert!((lhs - rhs).abs() < 1e-8);
            }
        }
    }
}
