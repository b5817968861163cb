use serde::{Deserialize, Serialize};

use super::curve::{Branch, SingularityCurve};
use crate::{Error, Result};

/// Direction of the iterated integral applied to the Dirac graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    /// `I_+`, integration from `-inf`.
    Plus,
    /// `I_-`, integration towards `+inf`.
    Minus,
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be 1 or -1, got {other}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// `weight * I_sign^j delta(x1 - q(x2))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleTerm {
    pub weight: f64,
    pub curve: SingularityCurve,
    pub j: u32,
    pub sign: Sign,
}

/// A weighted sum of feasible functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleScene {
    pub terms: Vec<FeasibleTerm>,
}

impl FeasibleScene {
    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::InvalidInput("scene has no terms".into()));
        }
        for term in &self.terms {
            if !term.weight.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "non-finite weight {}",
                    term.weight
                )));
            }
            term.curve.validate()?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scene: Self = serde_json::from_str(text)?;
        scene.validate()?;
        Ok(scene)
    }

    /// `H(x1 - q(x2))`, a jump across the graph of `q`.
    pub fn heaviside(curve: SingularityCurve) -> Self {
        Self {
            terms: vec![FeasibleTerm {
                weight: 1.0,
                curve,
                j: 1,
                sign: Sign::Plus,
            }],
        }
    }

    /// Indicator of the disc of the given radius centred at the origin,
    /// written as `H(x1 - q_left) - H(x1 - q_right)`.
    pub fn ball(radius: f64) -> Self {
        let branch = |b| SingularityCurve::Circle { radius, branch: b };
        Self {
            terms: vec![
                FeasibleTerm {
                    weight: 1.0,
                    curve: branch(Branch::Left),
                    j: 1,
                    sign: Sign::Plus,
                },
                FeasibleTerm {
                    weight: -1.0,
                    curve: branch(Branch::Right),
                    j: 1,
                    sign: Sign::Plus,
                },
            ],
        }
    }

    /// `H(x1 - x2^2)`.
    pub fn parabola() -> Self {
        Self::heaviside(SingularityCurve::Polynomial {
            coeffs: vec![0.0, 0.0, 1.0],
        })
    }

    /// `H(x1 - cos x2)`.
    pub fn cosine() -> Self {
        Self::heaviside(SingularityCurve::Cosine {
            amplitude: 1.0,
            frequency: 1.0,
            phase: 0.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scene_json() {
        let text = r#"{"terms":[
            {"weight":1.0,"curve":{"kind":"polynomial","params":{"coeffs":[0,0,1]}},"j":1,"sign":1},
            {"weight":-0.5,"curve":{"kind":"cosine","params":{"amplitude":1,"frequency":2,"phase":0}},"j":0,"sign":-1}
        ]}"#;
        let scene = FeasibleScene::from_json(text).unwrap();
        assert_eq!(scene.terms.len(), 2);
        assert_eq!(scene.terms[0], FeasibleScene::parabola().terms[0]);
        assert_eq!(scene.terms[1].sign, Sign::Minus);
        let back: FeasibleScene =
            serde_json::from_str(&serde_json::to_string(&scene).unwrap()).unwrap();
        assert_eq!(back, scene);
    }

    #[test]
    fn scene_json_errors() {
        assert!(FeasibleScene::from_json(r#"{"terms":[]}"#).is_err());
        let bad_sign = r#"{"terms":[{"weight":1,"curve":{"kind":"polynomial","params":{"coeffs":[0]}},"j":1,"sign":2}]}"#;
        assert!(FeasibleScene::from_json(bad_sign).is_err());
        let bad_radius = r#"{"terms":[{"weight":1,"curve":{"kind":"circle","params":{"radius":-1,"branch":"left"}},"j":1,"sign":1}]}"#;
        assert!(FeasibleScene::from_json(bad_radius).is_err());
    }
}
