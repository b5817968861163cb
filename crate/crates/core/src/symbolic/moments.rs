use num_bigint::BigInt;
use num_traits::{Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::construct::TaylorletSpec;
use super::gauss_poly::{format_rational, GaussExpPoly, Rational};
use crate::quadrature::{quad_gauss_kronrod, QuadratureConfig};

/// Relative tolerance below which a moment counts as vanishing.
pub const MOMENT_REL_TOL: f64 = 1e-10;

/// Value of a higher-order moment together with the largest individual
/// Gamma term that went into it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentIntegral {
    pub value: f64,
    pub largest_term: f64,
}

impl MomentIntegral {
    pub fn relative(&self) -> f64 {
        if self.largest_term == 0.0 {
            0.0
        } else {
            self.value.abs() / self.largest_term
        }
    }

    pub fn vanishes(&self, rel_tol: f64) -> bool {
        self.relative() < rel_tol
    }
}

/// `int_R f(sign * t^k) t^m dt`, evaluated term by term with
/// `int t^q exp(-t^{kW}) dt = 2 Gamma((q+1)/(kW)) / (kW)` for even `q`.
pub fn moment_oracle(f: &GaussExpPoly, k: u32, m: u32, sign: i8) -> MomentIntegral {
    assert!(k >= 1, "moment order k must be positive");
    let kw = (k * f.weight_power()) as f64;
    let mut value = 0.0;
    let mut largest_term: f64 = 0.0;
    for (&p, c) in f.coeffs() {
        let q = p as u64 * k as u64 + m as u64;
        if q % 2 == 1 {
            continue;
        }
        let negate = sign < 0 && p % 2 == 1;
        let magnitude = c.abs().to_f64().unwrap_or(f64::INFINITY);
        let log_term = magnitude.ln() + ln_gamma((q as f64 + 1.0) / kw) + (2.0 / kw).ln();
        let term = log_term.exp();
        let signed = if c.is_negative() != negate {
            -term
        } else {
            term
        };
        value += signed;
        largest_term = largest_term.max(term);
    }
    MomentIntegral {
        value,
        largest_term,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactRestriction {
    pub j: u32,
    #[serde(serialize_with = "rational_string")]
    pub value: Rational,
    pub pass: bool,
}

/// `I_+^j g(0) = sqrt(pi) * sqrt_pi_part + rational_part` for the first
/// order whose antiderivative is no longer Schwartz.
#[derive(Debug, Clone, Serialize)]
pub struct HalfLineRestriction {
    pub j: u32,
    #[serde(serialize_with = "rational_string")]
    pub sqrt_pi_part: Rational,
    #[serde(serialize_with = "rational_string")]
    pub rational_part: Rational,
    pub value: f64,
    /// Independent adaptive-quadrature estimate; NaN if it did not converge.
    pub quadrature_value: f64,
    pub pass: bool,
}

fn rational_string<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// Values of `I_+^j g(0)` and `int h`.
#[derive(Debug, Clone, Serialize)]
pub struct RestrictivenessReport {
    /// `j = 0..moments_r`, read off the constant coefficient of `I_+^j g`.
    pub exact: Vec<ExactRestriction>,
    /// `j = moments_r`, from the half-line integral of `I_+^{moments_r - 1} g`.
    pub next: HalfLineRestriction,
    pub h_integral: f64,
    pub h_pass: bool,
}

impl RestrictivenessReport {
    pub fn passes(&self) -> bool {
        self.exact.iter().all(|e| e.pass) && self.next.pass && self.h_pass
    }
}

/// `int_{-inf}^0 f`, split into its `sqrt(pi)` and rational parts:
/// `int t^{2m} e^{-t^2} = Gamma(m + 1/2) / 2` and `int t^{2m+1} e^{-t^2} = -m!/2`.
pub fn half_line_integral(f: &GaussExpPoly) -> (Rational, Rational) {
    assert_eq!(
        f.weight_power(),
        2,
        "half-line integral needs weight exp(-t^2)"
    );
    let mut sqrt_pi = Rational::zero();
    let mut rational = Rational::zero();
    for (&p, c) in f.coeffs() {
        let m = p / 2;
        if p % 2 == 0 {
            // Gamma(m + 1/2) = sqrt(pi) (2m)! / (4^m m!)
            let num: BigInt = (m + 1..=2 * m).map(BigInt::from).product();
            let den = BigInt::from(2) * BigInt::from(4).pow(m);
            sqrt_pi += c * Rational::new(num, den);
        } else {
            let fact: BigInt = (1..=m).map(BigInt::from).product();
            rational -= c * Rational::new(fact, BigInt::from(2));
        }
    }
    (sqrt_pi, rational)
}

pub fn restrictiveness_check(spec: &TaylorletSpec) -> RestrictivenessReport {
    let mut exact = Vec::new();
    for j in 0..spec.moments_r {
        let value = spec
            .iterated_antiderivative(j as usize)
            .map(|f| f.coeff(0))
            .unwrap_or_else(|_| Rational::zero());
        exact.push(ExactRestriction {
            j,
            pass: !value.is_zero(),
            value,
        });
    }

    // I_+^r g(0) = int_{-inf}^0 I_+^{r-1} g(v) dv
    let last = spec
        .iterated_antiderivative(spec.moments_r as usize - 1)
        .expect("moments_r >= 1");
    let (sqrt_pi_part, rational_part) = half_line_integral(last);
    let value = sqrt_pi_part.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI.sqrt()
        + rational_part.to_f64().unwrap_or(f64::NAN);
    let numeric = last.to_numeric();
    let cfg = QuadratureConfig {
        rel_tol: 1e-10,
        abs_tol: 1e-300,
        ..Default::default()
    };
    let quadrature_value = quad_gauss_kronrod(|v| numeric.evaluate(v), (-40.0, 0.0), &cfg)
        .map(|r| r.value)
        .unwrap_or(f64::NAN);
    let next = HalfLineRestriction {
        j: spec.moments_r,
        // sqrt(pi) is irrational, so the sum vanishes only if both parts do
        pass: !(sqrt_pi_part.is_zero() && rational_part.is_zero()),
        sqrt_pi_part,
        rational_part,
        value,
        quadrature_value,
    };

    let h_moment = moment_oracle(&spec.h, 1, 0, 1);
    RestrictivenessReport {
        exact,
        next,
        h_integral: h_moment.value,
        h_pass: !h_moment.vanishes(MOMENT_REL_TOL),
    }
}

/// One row of the vanishing-moment table.
#[derive(Debug, Clone, Serialize)]
pub struct MomentCheck {
    pub k: u32,
    pub m: u32,
    pub sign: i8,
    pub moment: MomentIntegral,
    pub pass: bool,
}

/// Checks `int g(+-t^k) t^m dt = 0` for `k <= order_n`, `m <= k * moments_r - 1`.
pub fn moment_table(spec: &TaylorletSpec) -> Vec<MomentCheck> {
    let mut rows = Vec::new();
    for k in 1..=spec.order_n {
        for m in 0..k * spec.moments_r {
            for sign in [1i8, -1] {
                let moment = moment_oracle(&spec.g, k, m, sign);
                rows.push(MomentCheck {
                    k,
                    m,
                    sign,
                    pass: moment.vanishes(MOMENT_REL_TOL),
                    moment,
                });
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::construct::{build_taylorlet, DEFAULT_DEGREE_CAP};

    #[test]
    fn gaussian_moment() {
        let f = GaussExpPoly::gaussian(2).unwrap();
        let m = moment_oracle(&f, 1, 0, 1);
        assert!((m.value - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        // odd moments vanish identically
        assert_eq!(moment_oracle(&f, 1, 1, 1).value, 0.0);
        // int exp(-t^4) dt = Gamma(1/4)/2
        let m = moment_oracle(&f, 2, 0, -1);
        assert!((m.value - 1.812_804_954_110_954).abs() < 1e-13);
    }

    #[test]
    fn sign_flips_odd_powers() {
        let f = GaussExpPoly::from_integers(2, &[(1, 1)]).unwrap();
        // int (t^2)... f(t^1) t^1 = t^2 e^{-t^2} -> sqrt(pi)/2
        let plus = moment_oracle(&f, 1, 1, 1).value;
        let minus = moment_oracle(&f, 1, 1, -1).value;
        assert!((plus - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-14);
        assert_eq!(plus, -minus);
    }

    #[test]
    fn taylorlet_11_single_moment() {
        let spec = build_taylorlet(1, 1, DEFAULT_DEGREE_CAP).unwrap();
        assert!(moment_oracle(&spec.g, 1, 0, 1).vanishes(MOMENT_REL_TOL));
        assert!(moment_oracle(&spec.g, 1, 0, -1).vanishes(MOMENT_REL_TOL));
        assert!(!moment_oracle(&spec.g, 1, 1, 1).vanishes(1e-3));
        assert!(moment_table(&spec).iter().all(|r| r.pass));
    }

    #[test]
    fn restrictiveness_of_11() {
        let spec = build_taylorlet(1, 1, DEFAULT_DEGREE_CAP).unwrap();
        let report = restrictiveness_check(&spec);
        assert_eq!(report.exact.len(), 1);
        assert_eq!(report.exact[0].value, Rational::from_integer((-1).into()));
        assert!(report.passes(), "{report:?}");
    }

    #[test]
    fn half_line_parts() {
        // int_{-inf}^0 (1 + t + t^2) e^{-t^2} = sqrt(pi)/2 - 1/2 + sqrt(pi)/4
        let f = GaussExpPoly::from_integers(2, &[(0, 1), (1, 1), (2, 1)]).unwrap();
        let (a, b) = half_line_integral(&f);
        assert_eq!(a, Rational::new(3.into(), 4.into()));
        assert_eq!(b, Rational::new((-1).into(), 2.into()));
        // t^3: -1!/2
        let f = GaussExpPoly::from_integers(2, &[(3, 1)]).unwrap();
        assert_eq!(
            half_line_integral(&f).1,
            Rational::new((-1).into(), 2.into())
        );
    }

    #[test]
    fn next_restriction_agrees_with_quadrature() {
        let spec = build_taylorlet(2, 2, DEFAULT_DEGREE_CAP).unwrap();
        let next = restrictiveness_check(&spec).next;
        assert!(next.pass);
        assert!(
            (next.value - next.quadrature_value).abs() < 1e-10 * next.value.abs().max(1e-3),
            "{next:?}"
        );
    }
}
