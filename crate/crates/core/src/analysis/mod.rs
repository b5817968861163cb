//! Scale-space post-processing of transform magnitudes.
//!
//! A [`ScaleGrid`] holds `|T|` over a ladder of scales (coarsest first) and
//! one varying shear. Rows can be normalized to unit maximum, local maxima
//! are followed from coarse to fine scales, and log-log fits estimate decay
//! exponents. [`detect_coefficients`] chains these into the stage-by-stage
//! search for the Taylor coefficients of a singularity curve.

mod detect;
mod export;

pub use detect::{
    build_grid, detect_coefficients, AxisSpec, Detection, DetectionStage, GridConfig, GridQuery,
    ScaleLadder, ShearAxis,
};
pub use export::{format_float, write_grid_csv, write_track_csv};

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `|T|` sampled on scales times one shear axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleGrid {
    /// Descending scales `a`; row `i` belongs to `scales[i]`.
    pub scales: Vec<f64>,
    /// Increasing shear values of the varying index.
    pub axis: Vec<f64>,
    /// `values[i][k]` for scale `i` and shear `axis[k]`.
    pub values: Vec<Vec<f64>>,
    pub normalized: bool,
}

impl ScaleGrid {
    pub fn new(scales: Vec<f64>, axis: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        let grid = Self {
            scales,
            axis,
            values,
            normalized: false,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.scales.len() {
            return Err(Error::InvalidInput(format!(
                "{} rows for {} scales",
                self.values.len(),
                self.scales.len()
            )));
        }
        if let Some((i, row)) = self
            .values
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != self.axis.len())
        {
            return Err(Error::InvalidInput(format!(
                "row {i} has {} entries for an axis of {}",
                row.len(),
                self.axis.len()
            )));
        }
        if self.scales.windows(2).any(|w| w[1] >= w[0]) || self.scales.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::InvalidInput(
                "scales must be positive and strictly descending".into(),
            ));
        }
        if self.axis.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "shear axis must be strictly increasing".into(),
            ));
        }
        if self
            .values
            .iter()
            .flatten()
            .any(|v| !(*v >= 0.0) || !v.is_finite())
        {
            return Err(Error::InvalidInput(
                "grid magnitudes must be finite and nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// Mean spacing of the shear axis.
    pub fn axis_step(&self) -> f64 {
        match self.axis.len() {
            0 | 1 => 0.0,
            len => (self.axis[len - 1] - self.axis[0]) / (len - 1) as f64,
        }
    }
}

/// Outcome of [`normalize_per_scale`]; all-zero rows stay zero and are
/// listed instead of aborting the whole grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub grid: ScaleGrid,
    pub degenerate_rows: Vec<usize>,
}

impl Normalization {
    /// The normalized grid, or `DegenerateRow` for the first zero row.
    pub fn into_result(self) -> Result<ScaleGrid> {
        match self.degenerate_rows.first() {
            Some(&row) => Err(Error::DegenerateRow { row }),
            None => Ok(self.grid),
        }
    }
}

/// Divides each row by its maximum.
pub fn normalize_per_scale(grid: &ScaleGrid) -> Normalization {
    let mut out = grid.clone();
    let mut degenerate_rows = Vec::new();
    for (i, row) in out.values.iter_mut().enumerate() {
        let max = row.iter().copied().fold(0.0, f64::max);
        if max > 0.0 {
            row.iter_mut().for_each(|v| *v /= max);
        } else {
            degenerate_rows.push(i);
        }
    }
    out.normalized = true;
    Normalization {
        grid: out,
        degenerate_rows,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalMaximum {
    /// Refined shear position.
    pub position: f64,
    /// Sample value at the grid maximum.
    pub value: f64,
    /// Grid index of the sample (left plateau edge for plateaus).
    pub index: usize,
}

/// Vertex of the parabola through three points, clamped to `[x0, x2]`.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> f64 {
    let d01 = (y[1] - y[0]) / (x[1] - x[0]);
    let d12 = (y[2] - y[1]) / (x[2] - x[1]);
    let curv = (d12 - d01) / (x[2] - x[0]);
    if !(curv < 0.0) {
        return x[1];
    }
    let vertex = 0.5 * (x[0] + x[1]) - d01 / (2.0 * curv);
    vertex.clamp(x[0], x[2])
}

/// Interior local maxima of `row`.
///
/// Strict peaks are refined by a three-point parabola; a plateau bounded by
/// lower samples on both sides counts once, at its left edge.
pub fn local_maxima(row: &[f64], axis: &[f64]) -> Vec<LocalMaximum> {
    assert_eq!(row.len(), axis.len(), "row and axis lengths differ");
    let mut out = Vec::new();
    let len = row.len();
    let mut i = 1;
    while i + 1 < len {
        if row[i] > row[i - 1] {
            let mut end = i;
            while end + 1 < len && row[end + 1] == row[i] {
                end += 1;
            }
            if end + 1 < len && row[end + 1] < row[i] {
                let position = if end == i {
                    parabola_vertex(
                        [axis[i - 1], axis[i], axis[i + 1]],
                        [row[i - 1], row[i], row[i + 1]],
                    )
                } else {
                    axis[i]
                };
                out.push(LocalMaximum {
                    position,
                    value: row[i],
                    index: i,
                });
            }
            i = end + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Positions of the interior local maxima of `row`.
pub fn find_local_maxima(row: &[f64], axis: &[f64]) -> Vec<f64> {
    local_maxima(row, axis)
        .into_iter()
        .map(|m| m.position)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    pub scale_index: usize,
    pub scale: f64,
    pub position: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximaTrack {
    pub points: Vec<TrackPoint>,
    pub converged_estimate: f64,
    pub converged: bool,
}

/// Follows the local maximum nearest to `seed` from the coarsest to the
/// finest scale, accepting only jumps of at most `window`.
pub fn track_maxima(grid: &ScaleGrid, seed: f64, window: f64) -> Result<MaximaTrack> {
    let step = grid.axis_step();
    if !(window > step) {
        return Err(Error::InvalidInput(format!(
            "tracking window {window} must exceed the axis step {step}"
        )));
    }
    let mut points = Vec::with_capacity(grid.scales.len());
    let mut previous = seed;
    for (i, row) in grid.values.iter().enumerate() {
        let nearest = local_maxima(row, &grid.axis)
            .into_iter()
            .filter(|m| (m.position - previous).abs() <= window)
            .min_by(|x, y| {
                (x.position - previous)
                    .abs()
                    .total_cmp(&(y.position - previous).abs())
                    .then(x.position.total_cmp(&y.position))
            });
        let Some(m) = nearest else {
            let converged_estimate = points.last().map_or(seed, |p: &TrackPoint| p.position);
            return Err(Error::TrackLost {
                stage: None,
                scale_index: i,
                partial: Box::new(MaximaTrack {
                    points,
                    converged_estimate,
                    converged: false,
                }),
            });
        };
        previous = m.position;
        points.push(TrackPoint {
            scale_index: i,
            scale: grid.scales[i],
            position: m.position,
            magnitude: m.value,
        });
    }
    let tail: Vec<f64> = points.iter().rev().take(3).map(|p| p.position).collect();
    let spread = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - tail.iter().copied().fold(f64::INFINITY, f64::min);
    let converged = tail.len() == 3 && spread < 2.0 * step;
    Ok(MaximaTrack {
        converged_estimate: previous,
        converged,
        points,
    })
}

/// Least-squares fit of `log2 |T|` against `log2 a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayEstimate {
    /// Empirical exponent of `a`.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub fit_range: Range<usize>,
}

pub const MIN_FIT_POINTS: usize = 4;

pub fn estimate_decay(
    scales: &[f64],
    magnitudes: &[f64],
    fit_range: Range<usize>,
) -> Result<DecayEstimate> {
    if scales.len() != magnitudes.len() {
        return Err(Error::InvalidInput(format!(
            "{} scales for {} magnitudes",
            scales.len(),
            magnitudes.len()
        )));
    }
    if fit_range.end > scales.len() || fit_range.len() < MIN_FIT_POINTS {
        return Err(Error::InvalidInput(format!(
            "fit range {fit_range:?} needs at least {MIN_FIT_POINTS} of {} points",
            scales.len()
        )));
    }
    if let Some(index) = fit_range.clone().find(|&i| !(magnitudes[i] > 0.0)) {
        return Err(Error::NonPositiveMagnitude { index });
    }
    let xs: Vec<f64> = fit_range.clone().map(|i| scales[i].log2()).collect();
    let ys: Vec<f64> = fit_range.clone().map(|i| magnitudes[i].log2()).collect();
    let count = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / count;
    let my = ys.iter().sum::<f64>() / count;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput(
            "fit needs at least two distinct scales".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(DecayEstimate {
        slope,
        intercept,
        r_squared,
        fit_range,
    })
}
