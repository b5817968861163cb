//! JSON run configurations for the `transform`, `decay` and `detect`
//! subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use taylorlet::analysis::{GridConfig, GridQuery, ScaleLadder, MIN_FIT_POINTS};
use taylorlet::symbolic::{build_taylorlet, from_json, TaylorletSpec};
use taylorlet::transform::{FeasibleScene, QuadratureConfig};
use taylorlet::{Error, Result};

/// Either `{"n": 2, "r": 2}` to construct on the fly or `{"path": "..."}`
/// for a file written by `construct`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TaylorletSource {
    Build { n: u32, r: u32 },
    File { path: PathBuf },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    Parabola,
    Cosine,
    UnitBall,
}

/// A scene file, a named test scene, or the scene inline.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SceneSource {
    File { path: PathBuf },
    Builtin { builtin: Builtin },
    Inline(FeasibleScene),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformConfig {
    pub taylorlet: TaylorletSource,
    pub scene: SceneSource,
    pub grid: GridQuery,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayCase {
    #[serde(default)]
    pub label: Option<String>,
    pub shears: Vec<f64>,
    /// Allowed distance between the fitted and the predicted exponent.
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub taylorlet: TaylorletSource,
    pub scene: SceneSource,
    pub alpha: f64,
    pub n: u32,
    #[serde(default)]
    pub t: f64,
    #[serde(default)]
    pub scales: ScaleLadder,
    /// Coarsest and finest scales left out of the fit.
    #[serde(default)]
    pub fit_trim: (usize, usize),
    pub cases: Vec<DecayCase>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectConfig {
    pub taylorlet: TaylorletSource,
    pub scene: SceneSource,
    pub alpha: f64,
    pub n: u32,
    #[serde(default)]
    pub t: f64,
    /// Defaults to [`GridConfig::for_order`] of `n`.
    #[serde(default)]
    pub grid: Option<GridConfig>,
    /// Known coefficients; a miss beyond `tolerance` fails the run.
    #[serde(default)]
    pub expected: Option<Vec<f64>>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Directory for per-stage grid and track CSV files.
    #[serde(default)]
    pub export_dir: Option<PathBuf>,
}

fn default_tolerance() -> f64 {
    0.05
}

/// Reads and parses a config; relative paths inside are resolved later
/// against the config's directory.
pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

impl TaylorletSource {
    pub fn load(&self, base: &Path, degree_cap: u64) -> Result<TaylorletSpec> {
        match self {
            Self::Build { n, r } => {
                if *n == 0 || *r == 0 {
                    return Err(Error::InvalidInput("n and r must be at least 1".into()));
                }
                build_taylorlet(*n, *r, degree_cap)
            }
            Self::File { path } => {
                let path = resolve(base, path);
                let text = fs::read_to_string(&path).map_err(|e| {
                    Error::InvalidInput(format!("cannot read {}: {e}", path.display()))
                })?;
                from_json(&text)
            }
        }
    }
}

impl SceneSource {
    pub fn load(&self, base: &Path) -> Result<FeasibleScene> {
        let scene = match self {
            Self::File { path } => {
                let path = resolve(base, path);
                let text = fs::read_to_string(&path).map_err(|e| {
                    Error::InvalidInput(format!("cannot read {}: {e}", path.display()))
                })?;
                FeasibleScene::from_json(&text)?
            }
            Self::Builtin { builtin } => match builtin {
                Builtin::Parabola => FeasibleScene::parabola(),
                Builtin::Cosine => FeasibleScene::cosine(),
                Builtin::UnitBall => FeasibleScene::ball(1.0),
            },
            Self::Inline(scene) => scene.clone(),
        };
        scene.validate()?;
        Ok(scene)
    }
}

impl TransformConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.quadrature.validate()
    }
}

impl DecayConfig {
    pub fn validate(&self) -> Result<()> {
        self.scales.validate()?;
        self.quadrature.validate()?;
        if self.cases.is_empty() {
            return Err(Error::InvalidInput("no decay cases given".into()));
        }
        for case in &self.cases {
            if case.shears.len() != self.n as usize + 1 {
                return Err(Error::InvalidInput(format!(
                    "case {:?} has {} shears, expected {}",
                    case.label,
                    case.shears.len(),
                    self.n + 1
                )));
            }
            if case.tolerance.is_some_and(|t| !(t >= 0.0)) {
                return Err(Error::InvalidInput(format!(
                    "case {:?} has a negative tolerance",
                    case.label
                )));
            }
        }
        let (head, tail) = self.fit_trim;
        if head + tail + MIN_FIT_POINTS > self.scales.count {
            return Err(Error::InvalidInput(format!(
                "fit trim {:?} leaves fewer than {MIN_FIT_POINTS} of {} scales",
                self.fit_trim, self.scales.count
            )));
        }
        Ok(())
    }
}

impl DetectConfig {
    pub fn grid_config(&self) -> GridConfig {
        self.grid
            .clone()
            .unwrap_or_else(|| GridConfig::for_order(self.n))
    }

    pub fn validate(&self) -> Result<()> {
        self.grid_config().validate(self.n)?;
        if let Some(expected) = &self.expected {
            if expected.len() != self.n as usize + 1 {
                return Err(Error::InvalidInput(format!(
                    "expected {} coefficients, got {}",
                    self.n + 1,
                    expected.len()
                )));
            }
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidInput("tolerance must be nonnegative".into()));
        }
        Ok(())
    }
}
