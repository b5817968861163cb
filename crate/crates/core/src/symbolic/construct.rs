use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::gauss_poly::{GaussExpPoly, Rational};
use crate::{Error, Result};

/// Default cap on the polynomial degree of `phi_{n,r}`.
pub const DEFAULT_DEGREE_CAP: u64 = 10_000;

/// Largest `n` for which `lcm(1..=n)` fits in a `u128`.
const MAX_LCM_ORDER: u32 = 88;

/// `lcm{1, ..., n}`.
///
/// Panics if `n == 0` or the result overflows `u128` (`n > 88`).
pub fn lcm_upto(n: u32) -> u128 {
    assert!(n >= 1, "lcm_upto needs n >= 1");
    assert!(n <= MAX_LCM_ORDER, "lcm(1..={n}) overflows u128");
    (1..=n as u128).fold(1, |acc, k| acc.lcm(&k))
}

/// Degree of `phi_{n,r}`: each of the `2 r v_n` derivatives raises the
/// degree by `2 v_n - 1`.
pub fn phi_nr_degree(n: u32, r: u32) -> Option<u128> {
    if n > MAX_LCM_ORDER {
        return None;
    }
    let v = lcm_upto(n);
    (2 * r as u128).checked_mul(v)?.checked_mul(2 * v - 1)
}

fn factorial(k: u128) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `phi_{n,r} = phi_n^{(2 r v_n)} / (2 r v_n)!` with `phi_n(t) = exp(-t^{2 v_n})`.
pub fn construct_phi_nr(n: u32, r: u32, degree_cap: u64) -> Result<GaussExpPoly> {
    if n == 0 || r == 0 {
        return Err(Error::InvalidInput(format!(
            "order and moment count must be at least 1 (n={n}, r={r})"
        )));
    }
    let degree = phi_nr_degree(n, r).unwrap_or(u128::MAX);
    if degree > degree_cap as u128 {
        return Err(Error::ResourceLimit {
            degree,
            cap: degree_cap,
        });
    }
    let v = lcm_upto(n);
    let order = 2 * r as u128 * v;
    let mut f = GaussExpPoly::gaussian((2 * v) as u32)?;
    for _ in 0..order {
        f = f.differentiate();
    }
    Ok(f.scale(&Rational::new(BigInt::one(), factorial(order))))
}

/// An analyzing Taylorlet `tau = g (x) h` with cached iterated antiderivatives
/// of `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorletSpec {
    pub g: GaussExpPoly,
    pub h: GaussExpPoly,
    pub order_n: u32,
    /// Number of vanishing moments of order `order_n` carried by `g`.
    pub moments_r: u32,
    /// `antider[i] = I_+^{i+1} g` for `i + 1 < moments_r`.
    pub antider: Vec<GaussExpPoly>,
}

impl TaylorletSpec {
    /// Assembles a spec from parts, computing the antiderivative cache.
    pub fn from_parts(
        g: GaussExpPoly,
        h: GaussExpPoly,
        order_n: u32,
        moments_r: u32,
    ) -> Result<Self> {
        if g.weight_power() != 2 || h.weight_power() != 2 {
            return Err(Error::InvalidInput(
                "g and h must carry the weight exp(-t^2)".into(),
            ));
        }
        if order_n == 0 || moments_r == 0 {
            return Err(Error::InvalidInput(
                "order and moment count must be positive".into(),
            ));
        }
        let mut antider = Vec::with_capacity(moments_r as usize - 1);
        let mut current = g.clone();
        for _ in 1..moments_r {
            current = current.antiderivative()?;
            antider.push(current.clone());
        }
        Ok(Self {
            g,
            h,
            order_n,
            moments_r,
            antider,
        })
    }

    /// `I_+^j g` for `0 <= j < moments_r`.
    pub fn iterated_antiderivative(&self, j: usize) -> Result<&GaussExpPoly> {
        if j >= self.moments_r as usize {
            return Err(Error::OrderTooHigh {
                j,
                moments_r: self.moments_r as usize,
            });
        }
        Ok(if j == 0 {
            &self.g
        } else {
            &self.antider[j - 1]
        })
    }
}

/// Builds the restrictive Taylorlet of order `n` with `2r - 1` vanishing
/// moments from the Gaussian `exp(-t^2)`, with `h = exp(-t^2)`.
pub fn build_taylorlet(n: u32, r: u32, degree_cap: u64) -> Result<TaylorletSpec> {
    let phi = construct_phi_nr(n, r, degree_cap)?;
    let g = phi.power_substitute()?.apply_one_plus_t();
    let h = GaussExpPoly::gaussian(2)?;
    TaylorletSpec::from_parts(g, h, n, 2 * r - 1)
}

/// Free-function form of [`TaylorletSpec::iterated_antiderivative`].
pub fn iterated_antiderivative(spec: &TaylorletSpec, j: usize) -> Result<GaussExpPoly> {
    spec.iterated_antiderivative(j).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcm_values() {
        assert_eq!(lcm_upto(1), 1);
        assert_eq!(lcm_upto(2), 2);
        assert_eq!(lcm_upto(3), 6);
        assert_eq!(lcm_upto(5), 60);
        assert_eq!(lcm_upto(6), 60);
        assert_eq!(lcm_upto(7), 420);
    }

    #[test]
    fn phi_11_by_hand() {
        // (1/2) d^2/dt^2 exp(-t^2) = (2t^2 - 1) exp(-t^2)
        let phi = construct_phi_nr(1, 1, DEFAULT_DEGREE_CAP).unwrap();
        assert_eq!(
            phi,
            GaussExpPoly::from_integers(2, &[(0, -1), (2, 2)]).unwrap()
        );
    }

    #[test]
    fn degree_cap_is_enforced_before_work() {
        let err = construct_phi_nr(5, 50, DEFAULT_DEGREE_CAP).unwrap_err();
        assert!(matches!(
            err,
            Error::ResourceLimit {
                degree: 714_000,
                cap: 10_000
            }
        ));
        assert!(matches!(
            construct_phi_nr(2, 2, 23),
            Err(Error::ResourceLimit { degree: 24, .. })
        ));
        assert!(construct_phi_nr(2, 2, 24).is_ok());
        assert!(matches!(
            construct_phi_nr(200, 1, u64::MAX),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn invalid_orders() {
        assert!(matches!(
            construct_phi_nr(0, 1, 100),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            build_taylorlet(1, 0, 100),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn taylorlet_11() {
        let spec = build_taylorlet(1, 1, DEFAULT_DEGREE_CAP).unwrap();
        // (1 + t)(2t^2 - 1)
        assert_eq!(
            spec.g,
            GaussExpPoly::from_integers(2, &[(0, -1), (1, -1), (2, 2), (3, 2)]).unwrap()
        );
        assert_eq!(spec.moments_r, 1);
        assert!(spec.antider.is_empty());
        assert!(matches!(
            spec.iterated_antiderivative(1),
            Err(Error::OrderTooHigh { j: 1, moments_r: 1 })
        ));
    }

    #[test]
    fn taylorlet_22_cache() {
        let spec = build_taylorlet(2, 2, DEFAULT_DEGREE_CAP).unwrap();
        assert_eq!(spec.moments_r, 3);
        assert_eq!(spec.antider.len(), 2);
        assert_eq!(spec.iterated_antiderivative(0).unwrap(), &spec.g);
        let second = spec.iterated_antiderivative(2).unwrap();
        assert_eq!(&second.differentiate().differentiate(), &spec.g);
        assert!(spec.iterated_antiderivative(3).is_err());
    }
}
