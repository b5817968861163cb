mod common;

use proptest::prelude::*;
use taylorlet::symbolic::*;

const SMALL_ORDERS: [(u32, u32); 6] = [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 1)];

#[test]
fn closed_form_generator_and_antiderivative() {
    let spec = build_taylorlet(2, 2, DEFAULT_DEGREE_CAP).unwrap();
    assert_eq!(spec.g, common::g22_closed_form());
    assert_eq!(spec.antider[0], common::g22_antiderivative_closed_form());
    assert_eq!(
        antiderivative(&spec.g).unwrap(),
        common::g22_antiderivative_closed_form()
    );
}

#[test]
fn evaluation_matches_closed_form() {
    let spec = build_taylorlet(2, 2, DEFAULT_DEGREE_CAP).unwrap();
    for x in [-3.0, -1.0, 0.0, 0.5, 2.0] {
        let direct = common::g22_direct(x);
        let got = evaluate(&spec.g, x);
        assert!(
            (got - direct).abs() <= 1e-12 * direct.abs(),
            "x={x}: {got} vs {direct}"
        );
    }
    assert_eq!(evaluate(&spec.g, 0.0), 0.5);
    assert_eq!(evaluate(&spec.g, 50.0), 0.0);
    assert_eq!(evaluate(&spec.g, -50.0), 0.0);
}

#[test]
fn second_antiderivative_differentiates_back() {
    let spec = build_taylorlet(2, 2, DEFAULT_DEGREE_CAP).unwrap();
    let second = iterated_antiderivative(&spec, 2).unwrap();
    assert_eq!(second.differentiate().differentiate(), spec.g);
    assert_eq!(iterated_antiderivative(&spec, 0).unwrap(), spec.g);
    assert!(matches!(
        iterated_antiderivative(&spec, 3),
        Err(taylorlet::Error::OrderTooHigh { j: 3, moments_r: 3 })
    ));
}

#[test]
fn round_trip_for_small_orders() {
    for (n, r) in SMALL_ORDERS {
        let spec = build_taylorlet(n, r, DEFAULT_DEGREE_CAP).unwrap();
        assert_eq!(spec.moments_r, 2 * r - 1);
        for j in 1..spec.moments_r as usize {
            let mut f = iterated_antiderivative(&spec, j).unwrap();
            for _ in 0..j {
                f = differentiate(&f);
            }
            assert_eq!(f, spec.g, "(n, r) = ({n}, {r}), j = {j}");
        }
    }
}

#[test]
fn power_structure_and_evenness() {
    for (n, r) in SMALL_ORDERS {
        let phi = construct_phi_nr(n, r, DEFAULT_DEGREE_CAP).unwrap();
        let period = 2 * lcm_upto(n) as u32;
        assert_eq!(phi.weight_power(), period);
        assert!(
            phi.coeffs().keys().all(|p| p % period == 0),
            "(n, r) = ({n}, {r})"
        );
        let even = power_substitute(&phi).unwrap();
        assert_eq!(even.weight_power(), 2);
        assert!(even.coeffs().keys().all(|p| p % 2 == 0));
        assert_eq!(even.coeffs().len(), phi.coeffs().len());
    }
}

#[test]
fn moment_count_for_small_orders() {
    for (n, r) in SMALL_ORDERS {
        let spec = build_taylorlet(n, r, DEFAULT_DEGREE_CAP).unwrap();
        let table = moment_table(&spec);
        assert!(table.iter().all(|row| row.pass), "(n, r) = ({n}, {r})");
        let next = moment_oracle(&spec.g, 1, 2 * r - 1, 1);
        assert!(next.value.abs() > 1e-6, "(n, r) = ({n}, {r}): {next:?}");
        let report = restrictiveness_check(&spec);
        assert!(report.passes(), "(n, r) = ({n}, {r}): {report:?}");
    }
}

#[test]
fn moment_oracle_against_trapezoid() {
    let spec = build_taylorlet(2, 2, DEFAULT_DEGREE_CAP).unwrap();
    let step = 1e-4;
    let trapezoid: f64 = (0..=240_000)
        .map(|i| {
            let t = -12.0 + step * i as f64;
            let w = if i == 0 || i == 240_000 { 0.5 } else { 1.0 };
            w * common::g22_direct(t) * t.powi(3)
        })
        .sum::<f64>()
        * step;
    let oracle = moment_oracle(&spec.g, 1, 3, 1).value;
    assert!(
        (oracle - trapezoid).abs() < 1e-9 * oracle.abs(),
        "{oracle} vs {trapezoid}"
    );
    assert!(oracle.abs() > 1e-6);
}

#[test]
fn restrictiveness_values() {
    let spec = build_taylorlet(2, 2, DEFAULT_DEGREE_CAP).unwrap();
    let report = restrictiveness_check(&spec);
    assert_eq!(format_rational(&report.exact[0].value), "1/2");
    assert_eq!(format_rational(&report.exact[1].value), "1/140");
    assert!(report.exact.iter().all(|e| e.pass));
    assert!(report.next.pass);
    assert!((report.h_integral - std::f64::consts::PI.sqrt()).abs() < 1e-14);
    assert!(report.passes());
}

#[test]
fn degree_cap() {
    assert!(matches!(
        build_taylorlet(5, 50, DEFAULT_DEGREE_CAP),
        Err(taylorlet::Error::ResourceLimit { .. })
    ));
}

#[test]
fn serialization_round_trip_is_exact() {
    for (n, r) in SMALL_ORDERS {
        let spec = build_taylorlet(n, r, DEFAULT_DEGREE_CAP).unwrap();
        let back = from_json(&to_json(&spec)).unwrap();
        assert_eq!(back, spec);
        assert!(antiderivative_consistency(&back).iter().all(|&ok| ok));
    }
}

fn small_poly() -> impl Strategy<Value = GaussExpPoly> {
    prop::collection::vec((0u32..9, -50i64..50, 1i64..20), 1..6)
        .prop_map(|terms| {
            let coeffs = terms.into_iter().map(|(p, num, den)| {
                (
                    p,
                    Rational::new(num_bigint::BigInt::from(num), num_bigint::BigInt::from(den)),
                )
            });
            let mut sum = GaussExpPoly::new(2, std::iter::empty()).unwrap();
            for (p, c) in coeffs {
                let single = GaussExpPoly::new(2, [(p, c)]).unwrap();
                sum = add(&sum, &single);
            }
            sum
        })
        .prop_filter("nonzero", |f| !f.is_zero())
}

fn add(a: &GaussExpPoly, b: &GaussExpPoly) -> GaussExpPoly {
    let mut coeffs = a.coeffs().clone();
    for (p, c) in b.coeffs() {
        *coeffs
            .entry(*p)
            .or_insert_with(|| Rational::from_integer(0.into())) += c;
    }
    GaussExpPoly::new(a.weight_power(), coeffs).unwrap()
}

proptest! {
    #[test]
    fn antiderivative_inverts_derivative(f in small_poly()) {
        // derivatives of Schwartz functions have zero integral
        let df = differentiate(&f);
        prop_assert_eq!(antiderivative(&df).unwrap(), f);
    }

    #[test]
    fn derivative_inverts_antiderivative(f in small_poly()) {
        let df = differentiate(&f);
        let back = differentiate(&antiderivative(&df).unwrap());
        prop_assert_eq!(back, df);
    }

    #[test]
    fn rational_text_round_trip(num in -1_000_000_000i64..1_000_000_000, den in 1i64..1_000_000) {
        let r = Rational::new(num.into(), den.into());
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }
}
