use proptest::prelude::*;
use taylorlet::analysis::*;
use taylorlet::symbolic::{build_taylorlet, DEFAULT_DEGREE_CAP};
use taylorlet::transform::{FeasibleScene, Kernel, QuadratureConfig, TransformQuery};
use taylorlet::Error;

fn axis(count: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

fn argmax(row: &[f64]) -> usize {
    row.iter()
        .enumerate()
        .fold(0, |best, (k, &v)| if v > row[best] { k } else { best })
}

fn grid_strategy() -> impl Strategy<Value = ScaleGrid> {
    (2usize..8, 3usize..40).prop_flat_map(|(rows, cols)| {
        prop::collection::vec(prop::collection::vec(0.0f64..1e3, cols), rows).prop_map(
            move |values| {
                let scales = (0..rows).map(|i| 2f64.powi(-(i as i32) - 2)).collect();
                ScaleGrid::new(scales, axis(cols, -1.0, 1.0), values).unwrap()
            },
        )
    })
}

/// Rows of `exp(-((x - c_i) / w)^2)` with centres drifting to `limit`.
fn drifting_grid(limit: f64, start: f64, rows: usize, axis: &[f64]) -> ScaleGrid {
    let scales: Vec<f64> = (0..rows).map(|i| 2f64.powi(-(i as i32) - 2)).collect();
    let values = (0..rows)
        .map(|i| {
            let centre = limit + (start - limit) * 0.5f64.powi(i as i32);
            axis.iter()
                .map(|x| (-((x - centre) / 0.2).powi(2)).exp())
                .collect()
        })
        .collect();
    ScaleGrid::new(scales, axis.to_vec(), values).unwrap()
}

proptest! {
    #[test]
    fn normalization_is_idempotent(grid in grid_strategy()) {
        let once = normalize_per_scale(&grid);
        let twice = normalize_per_scale(&once.grid);
        prop_assert_eq!(&once.grid, &twice.grid);
        prop_assert_eq!(once.degenerate_rows, twice.degenerate_rows);
    }

    #[test]
    fn normalization_keeps_row_argmax(grid in grid_strategy()) {
        let normalized = normalize_per_scale(&grid).grid;
        for (raw, scaled) in grid.values.iter().zip(&normalized.values) {
            prop_assert_eq!(argmax(raw), argmax(scaled));
            if raw.iter().any(|&v| v > 0.0) {
                prop_assert_eq!(scaled.iter().copied().fold(0.0, f64::max), 1.0);
            }
        }
    }

    #[test]
    fn gaussian_peak_is_located(centre in -0.9f64..0.9, width in 0.1f64..1.0, count in 20usize..200) {
        let xs = axis(count, -1.0, 1.0);
        let row: Vec<f64> = xs.iter().map(|x| (-((x - centre) / width).powi(2)).exp()).collect();
        let maxima = find_local_maxima(&row, &xs);
        prop_assert_eq!(maxima.len(), 1);
        prop_assert!((maxima[0] - centre).abs() <= xs[1] - xs[0]);
    }

    #[test]
    fn maxima_stay_inside_the_axis(row in prop::collection::vec(0.0f64..1.0, 3..60)) {
        let xs = axis(row.len(), -2.0, 2.0);
        for p in find_local_maxima(&row, &xs) {
            prop_assert!((-2.0..=2.0).contains(&p));
        }
    }

    #[test]
    fn power_law_slope_is_recovered(exponent in 0.0f64..3.0, constant in 1e-3f64..1e3, count in 4usize..20) {
        let scales: Vec<f64> = (0..count).map(|i| 2f64.powi(-(i as i32) - 2)).collect();
        let mags: Vec<f64> = scales.iter().map(|a| constant * a.powf(exponent)).collect();
        let fit = estimate_decay(&scales, &mags, 0..count).unwrap();
        prop_assert!((fit.slope - exponent).abs() < 1e-9);
        prop_assert!((fit.intercept - constant.log2()).abs() < 1e-9);
    }

    #[test]
    fn track_follows_a_drifting_peak(limit in -0.5f64..0.5, offset in -0.3f64..0.3) {
        let xs = axis(151, -1.5, 1.5);
        let grid = drifting_grid(limit, limit + offset, 12, &xs);
        let track = track_maxima(&grid, limit + offset, 10.0 * grid.axis_step()).unwrap();
        prop_assert!(track.converged);
        prop_assert_eq!(track.points.len(), 12);
        prop_assert!((track.converged_estimate - limit).abs() <= grid.axis_step());
    }
}

#[test]
fn gaussian_row_centred_at_three_tenths() {
    let xs = axis(150, -2.0, 2.0);
    let row: Vec<f64> = xs.iter().map(|x| (-(x - 0.3f64).powi(2)).exp()).collect();
    let peaks = find_local_maxima(&row, &xs);
    assert_eq!(peaks.len(), 1);
    assert!((peaks[0] - 0.3).abs() <= xs[1] - xs[0]);
}

#[test]
fn perturbed_power_law() {
    let scales = ScaleLadder::default().scales();
    let mags: Vec<f64> = scales
        .iter()
        .map(|a| 3.0 * a.powf(0.7) * (1.0 + 0.01 * a))
        .collect();
    let fit = estimate_decay(&scales, &mags, 0..scales.len()).unwrap();
    assert!((fit.slope - 0.7).abs() < 0.01, "{}", fit.slope);
}

#[test]
fn track_reports_the_scale_it_lost() {
    let xs = axis(101, -1.0, 1.0);
    let mut grid = drifting_grid(0.0, 0.0, 6, &xs);
    // the peak jumps far outside the window at row 3
    grid.values[3] = xs
        .iter()
        .map(|x| (-((x - 0.9) / 0.05).powi(2)).exp())
        .collect();
    match track_maxima(&grid, 0.0, 5.0 * grid.axis_step()) {
        Err(Error::TrackLost {
            scale_index,
            partial,
            ..
        }) => {
            assert_eq!(scale_index, 3);
            assert_eq!(partial.points.len(), 3);
            assert!(!partial.converged);
        }
        other => panic!("expected a lost track, got {other:?}"),
    }
}

#[test]
fn grid_csv_round_trips_values() {
    let xs = axis(7, -1.0, 1.0);
    let grid = drifting_grid(0.1, 0.4, 3, &xs);
    let mut buf = Vec::new();
    write_grid_csv(&mut buf, &grid).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 21);
    for (cell, row) in rows.iter().enumerate() {
        let (i, k) = (cell / 7, cell % 7);
        assert_eq!(row[0], grid.scales[i].log2());
        assert_eq!(row[1], xs[k]);
        assert_eq!(row[2], grid.values[i][k]);
    }
}

fn parabola_magnitudes(shears: [f64; 3]) -> (Vec<f64>, Vec<f64>) {
    let spec = build_taylorlet(2, 2, DEFAULT_DEGREE_CAP).unwrap();
    let kernel = Kernel::new(&spec);
    let scene = FeasibleScene::parabola();
    let scales = ScaleLadder::default().scales();
    let mags = scales
        .iter()
        .map(|&a| {
            let q = TransformQuery {
                a,
                shears: shears.to_vec(),
                t: 0.0,
                alpha: 0.4,
                n: 2,
            };
            kernel
                .transform(&scene, &q, &QuadratureConfig::default())
                .unwrap()
                .value
                .abs()
        })
        .collect();
    (scales, mags)
}

#[test]
fn decay_orders_by_approximation_quality() {
    let fit = |shears| {
        let (scales, mags) = parabola_magnitudes(shears);
        // drop underflowed tail for the mismatched position
        let end = mags
            .iter()
            .position(|&m| m.is_nan() || m <= 1e-200)
            .unwrap_or(mags.len());
        estimate_decay(&scales, &mags, 2..end.min(scales.len() - 2))
            .unwrap()
            .slope
    };
    let matched = fit([0.0, 0.0, 2.0]);
    let first_order = fit([0.0, 0.0, 0.0]);
    let wrong_position = fit([0.3, 0.0, 0.0]);
    assert!(matched < first_order, "{matched} vs {first_order}");
    assert!(
        first_order < wrong_position,
        "{first_order} vs {wrong_position}"
    );
    assert!((matched - 0.7).abs() < 0.05);
}

#[test]
fn detection_is_deterministic() {
    let spec = build_taylorlet(2, 2, DEFAULT_DEGREE_CAP).unwrap();
    let mut config = GridConfig::for_order(2);
    config.scales = ScaleLadder {
        log2_min: -8.0,
        log2_max: -2.0,
        count: 7,
    };
    config.axes = vec![AxisSpec::new(-2.0, 0.0, 60); 3];
    let scene = FeasibleScene::ball(1.0);
    let run = || match detect_coefficients(&scene, &spec, 0.4, 0.0, 2, &config) {
        Ok(d) => format!("{:?}", d.estimates),
        Err(e) => e.to_string(),
    };
    assert_eq!(run(), run());
}

#[test]
fn detection_rejects_bad_alpha() {
    let spec = build_taylorlet(2, 2, DEFAULT_DEGREE_CAP).unwrap();
    let config = GridConfig::for_order(2);
    for alpha in [0.2, 1.0 / 3.0, 0.5, 0.7] {
        assert!(matches!(
            detect_coefficients(&FeasibleScene::parabola(), &spec, alpha, 0.0, 2, &config),
            Err(Error::InvalidInput(_))
        ));
    }
}

#[test]
fn detection_recovers_polynomial_coefficients() {
    let spec = build_taylorlet(2, 2, DEFAULT_DEGREE_CAP).unwrap();
    let config = GridConfig::for_order(2);
    let detection =
        detect_coefficients(&FeasibleScene::parabola(), &spec, 0.4, 0.0, 2, &config).unwrap();
    for (stage, (got, want)) in detection.estimates.iter().zip([0.0, 0.0, 2.0]).enumerate() {
        let step = config.axes[stage].step();
        assert!(
            (got - want).abs() <= 2.0 * step,
            "stage {stage}: {got} vs {want}"
        );
    }
}
