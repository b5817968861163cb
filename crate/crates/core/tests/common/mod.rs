#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use taylorlet::symbolic::{GaussExpPoly, Rational, TaylorletSpec};
use taylorlet::transform::{FeasibleScene, QuadratureConfig, Sign, TransformQuery};

fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

const FACT8: i64 = 40320;

/// `64/8! (1+t)(315 - 51660 t^2 + 286020 t^4 - 349440 t^6 + 142464 t^8 - 21504 t^10 + 1024 t^12)`.
pub const G22_EVEN: [(u32, i64); 7] = [
    (0, 315),
    (2, -51660),
    (4, 286020),
    (6, -349440),
    (8, 142464),
    (10, -21504),
    (12, 1024),
];

/// `-32/8! (-9 - 630 t - ... + 1024 t^12)`.
pub const G22_ANTIDERIVATIVE: [i64; 13] = [
    -9, -630, -324, 34020, 25668, -100800, -86784, 71040, 65664, -15872, -15360, 1024, 1024,
];

/// The (2,2) generator assembled coefficient by coefficient from its closed form.
pub fn g22_closed_form() -> GaussExpPoly {
    let mut coeffs = Vec::new();
    for &(p, c) in &G22_EVEN {
        coeffs.push((p, c));
        coeffs.push((p + 1, c));
    }
    let poly = GaussExpPoly::from_integers(2, &coeffs).unwrap();
    poly.scale(&rational(64, FACT8))
}

pub fn g22_antiderivative_closed_form() -> GaussExpPoly {
    let coeffs: Vec<(u32, i64)> = G22_ANTIDERIVATIVE
        .iter()
        .enumerate()
        .map(|(p, &c)| (p as u32, c))
        .collect();
    GaussExpPoly::from_integers(2, &coeffs)
        .unwrap()
        .scale(&rational(-32, FACT8))
}

/// Direct floating-point evaluation of the closed-form generator.
pub fn g22_direct(x: f64) -> f64 {
    let even: f64 = G22_EVEN
        .iter()
        .map(|&(p, c)| c as f64 * x.powi(p as i32))
        .sum();
    64.0 / FACT8 as f64 * (1.0 + x) * even * (-x * x).exp()
}

/// Dense trapezoid rule in `x2` over the truncated window, written against
/// the definition rather than the substituted integral the library uses.
pub fn trapezoid_transform(
    scene: &FeasibleScene,
    spec: &TaylorletSpec,
    query: &TransformQuery,
    cfg: &QuadratureConfig,
) -> f64 {
    let a = query.a;
    let a_alpha = a.powf(query.alpha);
    let half = (1.0 / cfg.window_eps).ln().sqrt() * a_alpha;
    let step = a_alpha / 2000.0;
    let mut total = 0.0;
    for term in &scene.terms {
        let j = term.j as usize;
        let plus = if j == 0 {
            spec.g.clone()
        } else {
            spec.antider[j - 1].clone()
        };
        // I_-^j g = (-1)^j I_+^j g
        let sign = match term.sign {
            Sign::Plus if j % 2 == 1 => -1.0,
            _ => 1.0,
        };
        let (dom_lo, dom_hi) = term.curve.domain();
        let lo = (query.t - half).max(dom_lo);
        let hi = (query.t + half).min(dom_hi);
        if lo >= hi {
            continue;
        }
        let panels = ((hi - lo) / step).ceil() as usize;
        let h = (hi - lo) / panels as f64;
        let integrand = |x2: f64| {
            let q = term.curve.value_unchecked(x2);
            let mut shear = 0.0;
            let mut fact = 1.0;
            for (l, s) in query.shears.iter().enumerate() {
                if l > 0 {
                    fact *= l as f64;
                }
                shear += s / fact * (x2 - query.t).powi(l as i32);
            }
            let v = (x2 - query.t) / a_alpha;
            plus.evaluate((q - shear) / a) * (-v * v).exp()
        };
        let mut sum = 0.5 * (integrand(lo) + integrand(hi));
        for i in 1..panels {
            sum += integrand(lo + h * i as f64);
        }
        total += term.weight * sign * a.powf(j as f64 - (1.0 + query.alpha) / 2.0) * sum * h;
    }
    total
}
