use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    estimate_decay, normalize_per_scale, track_maxima, DecayEstimate, MaximaTrack, ScaleGrid,
};
use crate::symbolic::TaylorletSpec;
use crate::transform::{FeasibleScene, Kernel, QuadratureConfig, TransformQuery};
use crate::{Error, Result};

/// Scales `a = 2^x` for `count` values of `x` evenly spaced from `log2_max`
/// down to `log2_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleLadder {
    pub log2_min: f64,
    pub log2_max: f64,
    pub count: usize,
}

impl Default for ScaleLadder {
    fn default() -> Self {
        Self {
            log2_min: -12.0,
            log2_max: -2.0,
            count: 11,
        }
    }
}

impl ScaleLadder {
    pub fn validate(&self) -> Result<()> {
        if !(self.log2_min.is_finite()
            && self.log2_max.is_finite()
            && self.log2_min < self.log2_max)
            || self.count < 2
        {
            return Err(Error::InvalidInput(format!(
                "invalid scale ladder {self:?}"
            )));
        }
        Ok(())
    }

    pub fn log2_scales(&self) -> Vec<f64> {
        let span = self.log2_max - self.log2_min;
        (0..self.count)
            .map(|i| self.log2_max - span * i as f64 / (self.count - 1) as f64)
            .collect()
    }

    /// Descending scales.
    pub fn scales(&self) -> Vec<f64> {
        self.log2_scales().into_iter().map(f64::exp2).collect()
    }
}

/// Evenly spaced shear values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) || self.count < 3
        {
            return Err(Error::InvalidInput(format!("invalid shear axis {self:?}")));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.min + step * i as f64)
            .collect()
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }
}

/// The shear index that varies along a grid and its sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShearAxis {
    pub index: usize,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl ShearAxis {
    pub fn spec(&self) -> AxisSpec {
        AxisSpec::new(self.min, self.max, self.count)
    }
}

/// A batch of transform evaluations over scales and one shear axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridQuery {
    pub alpha: f64,
    pub n: u32,
    pub t: f64,
    pub scales: ScaleLadder,
    pub shear_axis: ShearAxis,
    /// `s_0..s_n`; the entry at `shear_axis.index` is replaced by the axis values.
    pub fixed_shears: Vec<f64>,
}

impl GridQuery {
    pub fn validate(&self) -> Result<()> {
        self.scales.validate()?;
        self.shear_axis.spec().validate()?;
        if self.fixed_shears.len() != self.n as usize + 1 {
            return Err(Error::InvalidInput(format!(
                "expected {} fixed shears, got {}",
                self.n + 1,
                self.fixed_shears.len()
            )));
        }
        if self.shear_axis.index > self.n as usize {
            return Err(Error::InvalidInput(format!(
                "shear index {} exceeds order {}",
                self.shear_axis.index, self.n
            )));
        }
        TransformQuery {
            a: 1.0,
            shears: self.fixed_shears.clone(),
            t: self.t,
            alpha: self.alpha,
            n: self.n,
        }
        .validate()
    }
}

/// Evaluates `|T|` on every (scale, shear) cell in parallel.
pub fn build_grid(
    scene: &FeasibleScene,
    kernel: &Kernel,
    query: &GridQuery,
    cfg: &QuadratureConfig,
) -> Result<ScaleGrid> {
    query.validate()?;
    let scales = query.scales.scales();
    let axis = query.shear_axis.spec().values();
    let width = axis.len();
    let index = query.shear_axis.index;
    let cells: Vec<f64> = (0..scales.len() * width)
        .into_par_iter()
        .map(|cell| {
            let mut shears = query.fixed_shears.clone();
            shears[index] = axis[cell % width];
            let q = TransformQuery {
                a: scales[cell / width],
                shears,
                t: query.t,
                alpha: query.alpha,
                n: query.n,
            };
            kernel.transform(scene, &q, cfg).map(|v| v.value.abs())
        })
        .collect::<Result<_>>()?;
    let values = cells.chunks(width).map(|c| c.to_vec()).collect();
    ScaleGrid::new(scales, axis, values)
}

/// Sampling and tracking parameters for [`detect_coefficients`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub scales: ScaleLadder,
    /// Axis for `s_l`, one per stage `l = 0..=n`.
    pub axes: Vec<AxisSpec>,
    /// Tracking window in multiples of the axis step.
    pub window_steps: f64,
    /// Coarsest and finest scales left out of decay fits.
    pub decay_trim: (usize, usize),
    pub quadrature: QuadratureConfig,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self::for_order(2)
    }
}

impl GridConfig {
    pub const DEFAULT_AXIS_POINTS: usize = 150;

    /// Defaults: `s_0, s_2, ... in [-2, 2]` and `s_1 in [-1, 1]`, 150 points each.
    pub fn for_order(n: u32) -> Self {
        let axes = (0..=n)
            .map(|l| {
                let half = if l == 1 { 1.0 } else { 2.0 };
                AxisSpec::new(-half, half, Self::DEFAULT_AXIS_POINTS)
            })
            .collect();
        Self {
            scales: ScaleLadder::default(),
            axes,
            window_steps: 10.0,
            decay_trim: (2, 2),
            quadrature: QuadratureConfig::default(),
        }
    }

    pub fn validate(&self, n: u32) -> Result<()> {
        self.scales.validate()?;
        if self.axes.len() != n as usize + 1 {
            return Err(Error::InvalidInput(format!(
                "expected {} shear axes for order {n}, got {}",
                n + 1,
                self.axes.len()
            )));
        }
        for axis in &self.axes {
            axis.validate()?;
        }
        if !(self.window_steps > 1.0) {
            return Err(Error::InvalidInput(format!(
                "tracking window must exceed one axis step, got {}",
                self.window_steps
            )));
        }
        self.quadrature.validate()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectionStage {
    pub index: usize,
    pub estimate: f64,
    pub converged: bool,
    pub seed: f64,
    pub track: MaximaTrack,
    /// Fit of `|T|` along the ladder with `s_l` fixed at the estimate.
    pub decay: Option<DecayEstimate>,
    #[serde(skip)]
    pub grid: ScaleGrid,
}

#[derive(Debug, Clone, Serialize)]
pub struct Detection {
    pub alpha: f64,
    pub t: f64,
    pub n: u32,
    pub estimates: Vec<f64>,
    pub stages: Vec<DetectionStage>,
}

impl Detection {
    pub fn converged(&self) -> bool {
        self.stages.iter().all(|s| s.converged)
    }
}

/// Recovers `q(t), q'(t), ..., q^{(n)}(t)` one coefficient at a time.
///
/// Stage `l` sweeps `s_l` with earlier shears fixed at their estimates and
/// later ones at zero, normalizes each scale, seeds a track at the global
/// maximum of the coarsest row and follows it to the finest scale.
pub fn detect_coefficients(
    scene: &FeasibleScene,
    spec: &TaylorletSpec,
    alpha: f64,
    t: f64,
    n: u32,
    config: &GridConfig,
) -> Result<Detection> {
    scene.validate()?;
    config.validate(n)?;
    let lo = 1.0 / (n + 1) as f64;
    let hi = 1.0 / n as f64;
    if !(alpha > lo && alpha < hi) {
        return Err(Error::InvalidInput(format!(
            "alpha must lie in ({lo}, {hi}) for order {n}, got {alpha}"
        )));
    }
    if let Some(term) = scene.terms.iter().find(|term| term.j >= spec.moments_r) {
        return Err(Error::OrderTooHigh {
            j: term.j as usize,
            moments_r: spec.moments_r as usize,
        });
    }
    let kernel = Kernel::new(spec);
    let mut estimates: Vec<f64> = Vec::with_capacity(n as usize + 1);
    let mut stages = Vec::with_capacity(n as usize + 1);
    for (stage, axis) in config.axes.iter().enumerate() {
        let mut fixed = estimates.clone();
        fixed.resize(n as usize + 1, 0.0);
        let query = GridQuery {
            alpha,
            n,
            t,
            scales: config.scales,
            shear_axis: ShearAxis {
                index: stage,
                min: axis.min,
                max: axis.max,
                count: axis.count,
            },
            fixed_shears: fixed.clone(),
        };
        let raw = build_grid(scene, &kernel, &query, &config.quadrature)?;
        let normalized = normalize_per_scale(&raw);
        if !normalized.degenerate_rows.is_empty() {
            log::warn!(
                "stage {stage}: all-zero rows {:?}",
                normalized.degenerate_rows
            );
        }
        let grid = normalized.grid;
        let coarsest = &grid.values[0];
        let seed_index =
            coarsest
                .iter()
                .enumerate()
                .fold(0, |best, (k, &v)| if v > coarsest[best] { k } else { best });
        let seed = grid.axis[seed_index];
        let track =
            track_maxima(&grid, seed, config.window_steps * axis.step()).map_err(|e| match e {
                Error::TrackLost {
                    scale_index,
                    partial,
                    ..
                } => Error::TrackLost {
                    stage: Some(stage),
                    scale_index,
                    partial,
                },
                other => other,
            })?;
        let estimate = track.converged_estimate;
        log::info!(
            "stage {stage}: s_{stage} = {estimate} (seed {seed}, converged {})",
            track.converged
        );
        fixed[stage] = estimate;
        let decay = stage_decay(scene, &kernel, &query, &fixed, config);
        estimates.push(estimate);
        stages.push(DetectionStage {
            index: stage,
            estimate,
            converged: track.converged,
            seed,
            track,
            decay,
            grid: raw,
        });
    }
    Ok(Detection {
        alpha,
        t,
        n,
        estimates,
        stages,
    })
}

fn stage_decay(
    scene: &FeasibleScene,
    kernel: &Kernel,
    query: &GridQuery,
    shears: &[f64],
    config: &GridConfig,
) -> Option<DecayEstimate> {
    let scales = query.scales.scales();
    let magnitudes: Vec<f64> = scales
        .par_iter()
        .map(|&a| {
            let q = TransformQuery {
                a,
                shears: shears.to_vec(),
                t: query.t,
                alpha: query.alpha,
                n: query.n,
            };
            kernel
                .transform(scene, &q, &config.quadrature)
                .map(|v| v.value.abs())
                .unwrap_or(f64::NAN)
        })
        .collect();
    let (head, tail) = config.decay_trim;
    let end = scales.len().saturating_sub(tail);
    if head >= end {
        return None;
    }
    match estimate_decay(&scales, &magnitudes, head..end) {
        Ok(d) => Some(d),
        Err(e) => {
            log::warn!("decay fit skipped: {e}");
            None
        }
    }
}
