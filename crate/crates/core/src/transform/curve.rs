use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Left,
    Right,
}

/// A smooth singularity function `q`, whose graph `x1 = q(x2)` carries the
/// edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum SingularityCurve {
    /// `q(x) = sum_i coeffs[i] x^i`.
    Polynomial { coeffs: Vec<f64> },
    /// One half of the circle `x1^2 + x2^2 = radius^2`; defined for
    /// `|x2| < radius`.
    Circle { radius: f64, branch: Branch },
    /// `q(x) = amplitude * cos(frequency * x + phase)`.
    Cosine {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
}

impl SingularityCurve {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Self::Polynomial { coeffs } => coeffs.iter().all(|c| c.is_finite()),
            Self::Circle { radius, .. } => radius.is_finite() && *radius > 0.0,
            Self::Cosine {
                amplitude,
                frequency,
                phase,
            } => amplitude.is_finite() && frequency.is_finite() && phase.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "invalid curve parameters {self:?}"
            )))
        }
    }

    /// Open domain `(lo, hi)`.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Self::Circle { radius, .. } => (-radius, *radius),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.domain();
        lo < x && x < hi
    }

    fn check(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            let (lo, hi) = self.domain();
            Err(Error::DomainError { x2: x, lo, hi })
        }
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(self.value_unchecked(x))
    }

    /// Value without the domain check; circle branches are clamped to the
    /// axis at and beyond the endpoints.
    #[inline]
    pub fn value_unchecked(&self, x: f64) -> f64 {
        match self {
            Self::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c),
            Self::Circle { radius, branch } => {
                let y = (radius * radius - x * x).max(0.0).sqrt();
                match branch {
                    Branch::Left => -y,
                    Branch::Right => y,
                }
            }
            Self::Cosine {
                amplitude,
                frequency,
                phase,
            } => amplitude * (frequency * x + phase).cos(),
        }
    }

    /// `[q(x), q'(x), ..., q^{(order)}(x)]`.
    pub fn derivatives(&self, x: f64, order: usize) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok(match self {
            Self::Polynomial { coeffs } => {
                let mut current = coeffs.clone();
                let mut out = Vec::with_capacity(order + 1);
                for _ in 0..=order {
                    out.push(current.iter().rev().fold(0.0, |acc, &c| acc * x + c));
                    current = current
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(i, &c)| i as f64 * c)
                        .collect();
                }
                out
            }
            Self::Cosine {
                amplitude,
                frequency,
                phase,
            } => {
                let arg = frequency * x + phase;
                let (s, c) = arg.sin_cos();
                // cos, -sin, -cos, sin, ...
                let cycle = [c, -s, -c, s];
                let mut scale = *amplitude;
                (0..=order)
                    .map(|k| {
                        let d = scale * cycle[k % 4];
                        scale *= frequency;
                        d
                    })
                    .collect()
            }
            Self::Circle { radius, branch } => {
                // Taylor coefficients of sqrt(u(x + h)), u(x + h) = radius^2 - (x + h)^2
                let u = [radius * radius - x * x, -2.0 * x, -1.0];
                let mut y = vec![0.0; order + 1];
                y[0] = u[0].sqrt();
                for k in 1..=order {
                    let uk = u.get(k).copied().unwrap_or(0.0);
                    let cross: f64 = (1..k).map(|i| y[i] * y[k - i]).sum();
                    y[k] = (uk - cross) / (2.0 * y[0]);
                }
                let sign = match branch {
                    Branch::Left => -1.0,
                    Branch::Right => 1.0,
                };
                let mut fact = 1.0;
                y.iter()
                    .enumerate()
                    .map(|(k, &yk)| {
                        if k > 0 {
                            fact *= k as f64;
                        }
                        sign * fact * yk
                    })
                    .collect()
            }
        })
    }
}
