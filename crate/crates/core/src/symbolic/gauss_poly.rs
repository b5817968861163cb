use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rational = BigRational;

/// A function `P(t) * exp(-t^W)` with exact rational polynomial `P` and even
/// weight power `W >= 2`.
///
/// Zero coefficients are never stored, so structural equality is value
/// equality.
#[derive(Clone, PartialEq, Eq)]
pub struct GaussExpPoly {
    weight_power: u32,
    coeffs: BTreeMap<u32, Rational>,
}

impl GaussExpPoly {
    pub fn new(
        weight_power: u32,
        coeffs: impl IntoIterator<Item = (u32, Rational)>,
    ) -> Result<Self> {
        if weight_power < 2 || !weight_power.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "weight power must be even and at least 2, got {weight_power}"
            )));
        }
        let mut map: BTreeMap<u32, Rational> = BTreeMap::new();
        for (p, c) in coeffs {
            *map.entry(p).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Self {
            weight_power,
            coeffs: map,
        })
    }

    /// `exp(-t^W)` itself.
    pub fn gaussian(weight_power: u32) -> Result<Self> {
        Self::new(weight_power, [(0, Rational::one())])
    }

    /// Convenience constructor from integer coefficients `(power, value)`.
    pub fn from_integers(weight_power: u32, coeffs: &[(u32, i64)]) -> Result<Self> {
        Self::new(
            weight_power,
            coeffs
                .iter()
                .map(|&(p, c)| (p, Rational::from_integer(BigInt::from(c)))),
        )
    }

    pub fn weight_power(&self) -> u32 {
        self.weight_power
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, Rational> {
        &self.coeffs
    }

    pub fn coeff(&self, power: u32) -> Rational {
        self.coeffs
            .get(&power)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of `P`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self {
            weight_power: self.weight_power,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&p, c)| (p, c * factor))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// `d/dt [P e^{-t^W}] = (P' - W t^{W-1} P) e^{-t^W}`.
    pub fn differentiate(&self) -> Self {
        let w = self.weight_power;
        let wr = Rational::from_integer(BigInt::from(w));
        let mut out: BTreeMap<u32, Rational> = BTreeMap::new();
        for (&p, c) in &self.coeffs {
            if p > 0 {
                let d = c * Rational::from_integer(BigInt::from(p));
                *out.entry(p - 1).or_insert_with(Rational::zero) += d;
            }
            let d = c * &wr;
            *out.entry(p + w - 1).or_insert_with(Rational::zero) -= d;
        }
        out.retain(|_, c| !c.is_zero());
        Self {
            weight_power: w,
            coeffs: out,
        }
    }

    /// Substitutes `|t|^{2/W}` for `t`, turning `P(t) e^{-t^W}` into a
    /// function with weight `e^{-t^2}`. Only smooth when every power of `P`
    /// is a multiple of `W`.
    pub fn power_substitute(&self) -> Result<Self> {
        let w = self.weight_power;
        let v = w / 2;
        let mut out = BTreeMap::new();
        for (&p, c) in &self.coeffs {
            if p % w != 0 {
                return Err(Error::NonSmoothSubstitution {
                    power: p,
                    period: w,
                });
            }
            out.insert(p / v, c.clone());
        }
        Ok(Self {
            weight_power: 2,
            coeffs: out,
        })
    }

    /// Multiplies the polynomial part by `(1 + t)`.
    pub fn apply_one_plus_t(&self) -> Self {
        let mut out: BTreeMap<u32, Rational> = BTreeMap::new();
        for (&p, c) in &self.coeffs {
            *out.entry(p).or_insert_with(Rational::zero) += c;
            *out.entry(p + 1).or_insert_with(Rational::zero) += c;
        }
        out.retain(|_, c| !c.is_zero());
        Self {
            weight_power: self.weight_power,
            coeffs: out,
        }
    }

    /// Exact antiderivative `R(t) e^{-t^2}` vanishing at `-inf`.
    ///
    /// Solves `R' - 2tR = P` from the top coefficient down. The equation at
    /// `t^0` is left over as a consistency condition; it holds exactly when
    /// `P e^{-t^2}` integrates to zero over the real line.
    pub fn antiderivative(&self) -> Result<Self> {
        if self.weight_power != 2 {
            return Err(Error::InvalidInput(format!(
                "antiderivative needs weight power 2, got {}",
                self.weight_power
            )));
        }
        let Some(deg) = self.degree() else {
            return Ok(self.clone());
        };
        if deg == 0 {
            return Err(Error::NotElementary);
        }
        let deg = deg as usize;
        let p: Vec<Rational> = (0..=deg).map(|k| self.coeff(k as u32)).collect();
        let two = Rational::from_integer(BigInt::from(2));
        // r has indices 0..deg-1; r[deg] and r[deg+1] are zero padding.
        let mut r = vec![Rational::zero(); deg + 2];
        for k in (1..=deg).rev() {
            let upper = &r[k + 1] * Rational::from_integer(BigInt::from(k + 1));
            r[k - 1] = (upper - &p[k]) / &two;
        }
        if r[1] != p[0] {
            return Err(Error::NotElementary);
        }
        Self::new(
            2,
            r.into_iter()
                .enumerate()
                .take(deg)
                .map(|(i, c)| (i as u32, c)),
        )
    }

    /// Horner evaluation in double precision. Returns exactly zero once the
    /// Gaussian factor underflows.
    pub fn evaluate(&self, t: f64) -> f64 {
        self.to_numeric().evaluate(t)
    }

    pub fn to_numeric(&self) -> NumericGaussPoly {
        let len = self.degree().map_or(0, |d| d as usize + 1);
        let mut dense = vec![0.0; len];
        for (&p, c) in &self.coeffs {
            dense[p as usize] = c.to_f64().unwrap_or(f64::NAN);
        }
        NumericGaussPoly {
            weight_power: self.weight_power as i32,
            coeffs: dense,
        }
    }

    /// Largest absolute coefficient, as a float. Used for relative checks.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .values()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for GaussExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        let mut first = true;
        for (p, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*t^{p}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")*exp(-t^{})", self.weight_power)
    }
}

/// Dense `f64` copy of a [`GaussExpPoly`] for hot evaluation loops.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericGaussPoly {
    weight_power: i32,
    coeffs: Vec<f64>,
}

impl NumericGaussPoly {
    #[inline]
    pub fn evaluate(&self, t: f64) -> f64 {
        let damping = (-t.powi(self.weight_power)).exp();
        if damping == 0.0 {
            return 0.0;
        }
        let poly = self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c);
        poly * damping
    }
}

/// Formats a rational as `"num/den"`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidInput(format!("malformed rational {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}
