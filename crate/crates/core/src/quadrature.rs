//! Adaptive Gauss-Kronrod quadrature with the embedded 7-point Gauss /
//! 15-point Kronrod pair.
//!
//! Intervals live in a max-heap keyed by their error estimate; the worst one
//! is bisected until the summed error drops below
//! `max(abs_tol, rel_tol * |value|)` or the subdivision budget runs out.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Tolerances for the transform integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Gaussian tail mass at which the `h` window is truncated.
    pub window_eps: f64,
    pub max_subdivisions: usize,
    /// Intersect the integration window with the curve domain instead of
    /// failing when it sticks out.
    pub clip_domain: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            window_eps: 1e-16,
            max_subdivisions: 2000,
            clip_domain: true,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !(positive(self.rel_tol) && positive(self.abs_tol) && positive(self.window_eps))
            || self.window_eps >= 1.0
            || self.max_subdivisions == 0
        {
            return Err(Error::InvalidInput(format!(
                "invalid quadrature config {self:?}"
            )));
        }
        Ok(())
    }

    /// Half-width `U = sqrt(ln(1/eps))` of the window for a unit Gaussian.
    pub fn window_half_width(&self) -> f64 {
        (1.0 / self.window_eps).ln().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

/// One 15-point Kronrod estimate with the Gauss-Kronrod difference as error.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut gauss = fc * WG[3];
    let mut kronrod = fc * WGK[7];
    for (i, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over `[lo, hi]`.
pub fn quad_gauss_kronrod<F: Fn(f64) -> f64>(
    f: F,
    interval: (f64, f64),
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    quad_gauss_kronrod_partitioned(f, &[interval.0, interval.1], cfg)
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, seeding the adaptive
/// refinement with the given breakpoints.
pub fn quad_gauss_kronrod_partitioned<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    if breaks.len() < 2 || breaks.iter().any(|b| !b.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "bad quadrature breakpoints {breaks:?}"
        )));
    }
    let mut heap = BinaryHeap::with_capacity(breaks.len() + 2 * cfg.max_subdivisions);
    for w in breaks.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (value, error) = gk15(&f, w[0], w[1]);
        heap.push(Segment {
            lo: w[0],
            hi: w[1],
            value,
            error,
        });
    }
    let mut subdivisions = 0;
    let mut value: f64 = heap.iter().map(|s| s.value).sum();
    let mut error: f64 = heap.iter().map(|s| s.error).sum();
    loop {
        if !value.is_finite() {
            return Err(Error::QuadratureFailure {
                subdivisions,
                error_estimate: error,
            });
        }
        let tol = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        if error <= tol {
            // re-sum so the reported totals carry no drift from the updates
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
            if error <= cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
                return Ok(QuadResult {
                    value,
                    error_estimate: error,
                    subdivisions,
                });
            }
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::QuadratureFailure {
                subdivisions,
                error_estimate: error,
            });
        }
        let Some(worst) = heap.pop() else {
            return Ok(QuadResult {
                value: 0.0,
                error_estimate: 0.0,
                subdivisions,
            });
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // interval exhausted at machine resolution
            return Err(Error::QuadratureFailure {
                subdivisions,
                error_estimate: error,
            });
        }
        value -= worst.value;
        error -= worst.error;
        for (lo, hi) in [(worst.lo, mid), (mid, worst.hi)] {
            let (v, e) = gk15(&f, lo, hi);
            value += v;
            error += e;
            heap.push(Segment {
                lo,
                hi,
                value: v,
                error: e,
            });
        }
        subdivisions += 1;
    }
}
