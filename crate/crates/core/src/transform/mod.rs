//! Taylorlet transform of feasible scenes.
//!
//! For a term `w * I_+-^j delta(x1 - q(x2))` repeated integration by parts in
//! `x1` moves the `j` integrals onto `g`, leaving a line integral over the
//! graph of `q`:
//!
//! ```text
//! T(a, s, t) = w * a^{j - (1+alpha)/2} * int G_j(rho(x2) / a) h((x2 - t) / a^alpha) dx2
//! rho(x2)    = q(x2) - sum_l s_l / l! * (x2 - t)^l
//! ```
//!
//! `G_j` is `I_-^j g = (-1)^j I_+^j g` for `I_+` terms and `I_+^j g` for `I_-`
//! terms. The integral runs over the substituted variable
//! `v = (x2 - t) / a^alpha` on `[-U, U]`, where `h` has decayed below the
//! configured window epsilon.

mod curve;
mod scene;

pub use curve::{Branch, SingularityCurve};
pub use scene::{FeasibleScene, FeasibleTerm, Sign};

pub use crate::quadrature::{quad_gauss_kronrod, QuadResult, QuadratureConfig};

use crate::quadrature::quad_gauss_kronrod_partitioned;
use crate::symbolic::{NumericGaussPoly, TaylorletSpec};
use crate::{Error, Result};

/// Equality tolerance when comparing shears against curve derivatives.
pub const SHEAR_MATCH_TOL: f64 = 1e-12;

/// Number of equal panels the integration window starts with before
/// adaptive refinement.
const INITIAL_PANELS: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct TransformQuery {
    pub a: f64,
    /// `s_0..s_n`.
    pub shears: Vec<f64>,
    pub t: f64,
    pub alpha: f64,
    pub n: u32,
}

impl TransformQuery {
    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::InvalidInput(format!(
                "scale must be positive, got {}",
                self.a
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidInput(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.shears.len() != self.n as usize + 1 {
            return Err(Error::InvalidInput(format!(
                "expected {} shears for order {}, got {}",
                self.n + 1,
                self.n,
                self.shears.len()
            )));
        }
        if !self.t.is_finite() || self.shears.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidInput(
                "non-finite shear or translation".into(),
            ));
        }
        Ok(())
    }
}

/// `sum_l s_l / l! * dx^l`.
#[inline]
fn shear_polynomial(scaled: &[f64], dx: f64) -> f64 {
    scaled.iter().rev().fold(0.0, |acc, &c| acc * dx + c)
}

fn taylor_scaled(shears: &[f64]) -> Vec<f64> {
    let mut fact = 1.0;
    shears
        .iter()
        .enumerate()
        .map(|(l, &s)| {
            if l > 0 {
                fact *= l as f64;
            }
            s / fact
        })
        .collect()
}

/// `q(x2) - sum_l s_l / l! * (x2 - t)^l`.
pub fn shear_residual(curve: &SingularityCurve, shears: &[f64], t: f64, x2: f64) -> Result<f64> {
    let q = curve.value(x2)?;
    Ok(q - shear_polynomial(&taylor_scaled(shears), x2 - t))
}

/// Largest `k` with `s_l = q^{(l)}(t)` for all `l <= k`; `-1` when even the
/// position is off.
pub fn highest_approximation_order(
    curve: &SingularityCurve,
    shears: &[f64],
    t: f64,
    n: u32,
) -> Result<i32> {
    if shears.len() != n as usize + 1 {
        return Err(Error::InvalidInput(format!(
            "expected {} shears, got {}",
            n + 1,
            shears.len()
        )));
    }
    let derivs = curve.derivatives(t, n as usize)?;
    let mut k = -1;
    for (s, d) in shears.iter().zip(&derivs) {
        if (s - d).abs() <= SHEAR_MATCH_TOL * d.abs().max(1.0) {
            k += 1;
        } else {
            break;
        }
    }
    Ok(k)
}

/// Decay exponent of `|T(a)|` as `a -> 0` predicted for a `j`-feasible
/// function, a Taylorlet with `r` vanishing moments and highest
/// approximation order `k`. `+inf` stands for superpolynomial decay.
pub fn predicted_decay_exponent(j: u32, r: u32, alpha: f64, k: i32, n: u32) -> Result<f64> {
    if j >= r {
        return Err(Error::InvalidCase(format!("need j < r, got j={j}, r={r}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidCase(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let base = j as f64 + (alpha - 1.0) / 2.0;
    match k {
        -1 => Ok(f64::INFINITY),
        k if k >= 0 && (k as u32) < n => {
            if alpha >= 1.0 / n as f64 {
                return Err(Error::InvalidCase(format!(
                    "k={k} < n={n} needs alpha < 1/n, got {alpha}"
                )));
            }
            Ok(base + (r - j) as f64 * (1.0 - (k + 1) as f64 * alpha))
        }
        k if k >= 0 && k as u32 == n => {
            if alpha <= 1.0 / (n + 1) as f64 {
                return Err(Error::InvalidCase(format!(
                    "k=n={n} needs alpha > 1/(n+1), got {alpha}"
                )));
            }
            Ok(base)
        }
        _ => Err(Error::InvalidCase(format!("k={k} outside -1..={n}"))),
    }
}

/// Result of one transform evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformValue {
    pub value: f64,
    /// Sum of quadrature error estimates, scaled like `value`.
    pub error_estimate: f64,
    /// Whether some term's window was cut back to the curve domain.
    pub clipped: bool,
}

/// Floating-point view of a [`TaylorletSpec`] prepared for repeated
/// transform evaluations.
#[derive(Debug, Clone)]
pub struct Kernel {
    /// `I_+^j g` for `j = 0..moments_r`.
    antider: Vec<NumericGaussPoly>,
    h: NumericGaussPoly,
}

impl Kernel {
    pub fn new(spec: &TaylorletSpec) -> Self {
        let antider = (0..spec.moments_r as usize)
            .map(|j| {
                spec.iterated_antiderivative(j)
                    .expect("j < moments_r")
                    .to_numeric()
            })
            .collect();
        Self {
            antider,
            h: spec.h.to_numeric(),
        }
    }

    pub fn moments_r(&self) -> usize {
        self.antider.len()
    }

    /// Evaluates a single term.
    pub fn term(
        &self,
        term: &FeasibleTerm,
        query: &TransformQuery,
        cfg: &QuadratureConfig,
    ) -> Result<TransformValue> {
        let j = term.j as usize;
        if j >= self.antider.len() {
            return Err(Error::OrderTooHigh {
                j,
                moments_r: self.antider.len(),
            });
        }
        if term.weight == 0.0 {
            return Ok(TransformValue {
                value: 0.0,
                error_estimate: 0.0,
                clipped: false,
            });
        }
        let a = query.a;
        let a_alpha = a.powf(query.alpha);
        let half = cfg.window_half_width();
        let (dom_lo, dom_hi) = term.curve.domain();
        let mut v_lo = -half;
        let mut v_hi = half;
        let mut clipped = false;
        let lo_lim = (dom_lo - query.t) / a_alpha;
        let hi_lim = (dom_hi - query.t) / a_alpha;
        if lo_lim > v_lo || hi_lim < v_hi {
            if !cfg.clip_domain {
                let x2 = if lo_lim > v_lo {
                    query.t + v_lo * a_alpha
                } else {
                    query.t + v_hi * a_alpha
                };
                return Err(Error::DomainError {
                    x2,
                    lo: dom_lo,
                    hi: dom_hi,
                });
            }
            v_lo = v_lo.max(lo_lim);
            v_hi = v_hi.min(hi_lim);
            clipped = true;
        }
        if v_lo >= v_hi {
            return Ok(TransformValue {
                value: 0.0,
                error_estimate: 0.0,
                clipped,
            });
        }

        let kernel = &self.antider[j];
        let h = &self.h;
        let scaled = taylor_scaled(&query.shears);
        let curve = &term.curve;
        let t = query.t;
        let inv_a = 1.0 / a;
        let integrand = |v: f64| {
            let dx = a_alpha * v;
            let rho = curve.value_unchecked(t + dx) - shear_polynomial(&scaled, dx);
            kernel.evaluate(rho * inv_a) * h.evaluate(v)
        };
        let breaks: Vec<f64> = (0..=INITIAL_PANELS)
            .map(|i| v_lo + (v_hi - v_lo) * i as f64 / INITIAL_PANELS as f64)
            .collect();
        let quad = quad_gauss_kronrod_partitioned(integrand, &breaks, cfg)?;

        let parity = match term.sign {
            Sign::Plus if j % 2 == 1 => -1.0,
            _ => 1.0,
        };
        let factor = term.weight * parity * a.powf(j as f64 - (1.0 + query.alpha) / 2.0) * a_alpha;
        Ok(TransformValue {
            value: factor * quad.value,
            error_estimate: factor.abs() * quad.error_estimate,
            clipped,
        })
    }

    /// Evaluates a whole scene, summing terms in order.
    pub fn transform(
        &self,
        scene: &FeasibleScene,
        query: &TransformQuery,
        cfg: &QuadratureConfig,
    ) -> Result<TransformValue> {
        query.validate()?;
        let mut total = TransformValue {
            value: 0.0,
            error_estimate: 0.0,
            clipped: false,
        };
        for term in &scene.terms {
            let v = self.term(term, query, cfg)?;
            total.value += v.value;
            total.error_estimate += v.error_estimate;
            total.clipped |= v.clipped;
        }
        Ok(total)
    }
}

/// `T^{(n,alpha)} f(a, s, t)` for a feasible scene.
pub fn taylorlet_transform(
    scene: &FeasibleScene,
    spec: &TaylorletSpec,
    query: &TransformQuery,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let v = Kernel::new(spec).transform(scene, query, cfg)?;
    if v.clipped {
        log::warn!(
            "integration window clipped to the curve domain at a={}, t={}",
            query.a,
            query.t
        );
    }
    Ok(v.value)
}
