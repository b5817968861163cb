//! Exact construction of restrictive analyzing Taylorlets.
//!
//! Starting from `exp(-t^2)`, the construction raises the argument to the
//! power `v_n = lcm(1..=n)`, differentiates `2 r v_n` times, substitutes
//! `|t|^{1/v_n}` back, and multiplies by `(1 + t)`. Every step is carried
//! out on [`GaussExpPoly`] values with big-rational coefficients, so the
//! result, its antiderivatives and the constant terms that decide
//! restrictiveness are all exact.

mod construct;
mod gauss_poly;
mod moments;
mod serial;

pub use construct::{
    build_taylorlet, construct_phi_nr, iterated_antiderivative, lcm_upto, phi_nr_degree,
    TaylorletSpec, DEFAULT_DEGREE_CAP,
};
pub use gauss_poly::{format_rational, parse_rational, GaussExpPoly, NumericGaussPoly, Rational};
pub use moments::{
    half_line_integral, moment_oracle, moment_table, restrictiveness_check, ExactRestriction,
    HalfLineRestriction, MomentCheck, MomentIntegral, RestrictivenessReport, MOMENT_REL_TOL,
};
pub use serial::{antiderivative_consistency, from_json, to_json, PolyRecord, TaylorletRecord};

/// Free-function forms of the [`GaussExpPoly`] operations.
pub fn differentiate(f: &GaussExpPoly) -> GaussExpPoly {
    f.differentiate()
}

pub fn power_substitute(f: &GaussExpPoly) -> crate::Result<GaussExpPoly> {
    f.power_substitute()
}

pub fn apply_one_plus_t(f: &GaussExpPoly) -> GaussExpPoly {
    f.apply_one_plus_t()
}

pub fn antiderivative(f: &GaussExpPoly) -> crate::Result<GaussExpPoly> {
    f.antiderivative()
}

pub fn evaluate(f: &GaussExpPoly, t: f64) -> f64 {
    f.evaluate(t)
}
