use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use taylorlet::analysis::{
    build_grid, detect_coefficients, estimate_decay, format_float, write_grid_csv, write_track_csv,
    Detection,
};
use taylorlet::symbolic::{
    antiderivative_consistency, build_taylorlet, format_rational, from_json, moment_table,
    restrictiveness_check, to_json, MomentCheck, RestrictivenessReport, TaylorletSpec,
};
use taylorlet::transform::{
    highest_approximation_order, predicted_decay_exponent, FeasibleScene, Kernel, TransformQuery,
};
use taylorlet::{Error, Result};

use crate::config::{self, DecayConfig, DetectConfig, TransformConfig};

/// Process exit status: 0 success, 1 a check or analysis failed.
pub type Status = i32;

fn open_output(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            Error::InvalidInput(format!("cannot create {}: {e}", path.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn io_error(e: io::Error) -> Error {
    Error::InvalidInput(format!("write failed: {e}"))
}

fn config_dir(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new("."))
}

pub fn construct(n: u32, r: u32, out: Option<&Path>, degree_cap: u64) -> Result<Status> {
    if n == 0 || r == 0 {
        return Err(Error::InvalidInput("n and r must be at least 1".into()));
    }
    let spec = build_taylorlet(n, r, degree_cap)?;
    let text = to_json(&spec);
    match out {
        Some(path) => fs::write(path, text + "\n")
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?,
        None => println!("{text}"),
    }
    let report = restrictiveness_check(&spec);
    // keep stdout clean for the serialized Taylorlet
    let mut summary: Box<dyn Write> = if out.is_some() {
        Box::new(io::stdout())
    } else {
        Box::new(io::stderr())
    };
    writeln!(
        summary,
        "order {n}, degree {}, moments_r {}",
        spec.g.degree().unwrap_or(0),
        spec.moments_r
    )
    .map_err(io_error)?;
    print_restrictiveness(&mut summary, &report).map_err(io_error)?;
    Ok(0)
}

fn print_restrictiveness(out: &mut dyn Write, report: &RestrictivenessReport) -> io::Result<()> {
    for e in &report.exact {
        writeln!(
            out,
            "I_+^{} g(0) = {} [{}]",
            e.j,
            format_rational(&e.value),
            verdict(e.pass)
        )?;
    }
    let next = &report.next;
    writeln!(
        out,
        "I_+^{} g(0) = {} sqrt(pi) + {} = {} (quadrature {}) [{}]",
        next.j,
        format_rational(&next.sqrt_pi_part),
        format_rational(&next.rational_part),
        format_float(next.value),
        format_float(next.quadrature_value),
        verdict(next.pass)
    )?;
    writeln!(
        out,
        "int h = {} [{}]",
        format_float(report.h_integral),
        verdict(report.h_pass)
    )
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "ok"
    } else {
        "FAIL"
    }
}

fn print_moments(out: &mut dyn Write, rows: &[MomentCheck]) -> io::Result<()> {
    writeln!(out, "k,m,sign,value,relative,pass")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            row.k,
            row.m,
            row.sign,
            format_float(row.moment.value),
            format_float(row.moment.relative()),
            row.pass
        )?;
    }
    Ok(())
}

/// Verification results; `construct` followed by `verify` must reproduce
/// the in-memory values exactly.
#[derive(Debug, Serialize)]
pub struct Verification {
    pub moments: Vec<MomentCheck>,
    pub restrictiveness: RestrictivenessReport,
    pub antiderivatives_consistent: Vec<bool>,
}

impl Verification {
    pub fn of(spec: &TaylorletSpec) -> Self {
        Self {
            moments: moment_table(spec),
            restrictiveness: restrictiveness_check(spec),
            antiderivatives_consistent: antiderivative_consistency(spec),
        }
    }

    pub fn passes(&self) -> bool {
        self.moments.iter().all(|m| m.pass)
            && self.restrictiveness.passes()
            && self.antiderivatives_consistent.iter().all(|&ok| ok)
    }
}

pub fn verify(path: &Path, report: Option<&Path>) -> Result<Status> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let spec = from_json(&text)?;
    let result = Verification::of(&spec);
    let mut out = io::stdout().lock();
    (|| -> io::Result<()> {
        writeln!(out, "order {}, moments_r {}", spec.order_n, spec.moments_r)?;
        print_moments(&mut out, &result.moments)?;
        print_restrictiveness(&mut out, &result.restrictiveness)?;
        for (j, ok) in result.antiderivatives_consistent.iter().enumerate() {
            writeln!(out, "d/dt I_+^{} g = I_+^{} g [{}]", j + 1, j, verdict(*ok))?;
        }
        writeln!(out, "{}", if result.passes() { "PASS" } else { "FAIL" })
    })()
    .map_err(io_error)?;
    if report.is_some() {
        write_json(report, &result)?;
    }
    Ok(if result.passes() { 0 } else { 1 })
}

pub fn transform(config_path: &Path, out: Option<&Path>, degree_cap: u64) -> Result<Status> {
    let config: TransformConfig = config::load(config_path)?;
    config.validate()?;
    let base = config_dir(config_path);
    let spec = config.taylorlet.load(base, degree_cap)?;
    let scene = config.scene.load(base)?;
    check_orders(&scene, &spec)?;
    let kernel = Kernel::new(&spec);
    let grid = build_grid(&scene, &kernel, &config.grid, &config.quadrature)?;
    let mut w = open_output(out)?;
    write_grid_csv(&mut w, &grid)
        .and_then(|_| w.flush())
        .map_err(io_error)?;
    Ok(0)
}

fn check_orders(scene: &FeasibleScene, spec: &TaylorletSpec) -> Result<()> {
    match scene.terms.iter().find(|t| t.j >= spec.moments_r) {
        Some(term) => Err(Error::OrderTooHigh {
            j: term.j as usize,
            moments_r: spec.moments_r as usize,
        }),
        None => Ok(()),
    }
}

#[derive(Debug, Serialize)]
struct DecayRow {
    label: Option<String>,
    shears: Vec<f64>,
    /// Per scene term.
    approximation_orders: Vec<i32>,
    /// Smallest exponent over the scene terms, `null` when no case applies.
    predicted: Option<f64>,
    empirical: Option<f64>,
    r_squared: Option<f64>,
    tolerance: Option<f64>,
    within_tolerance: Option<bool>,
    magnitudes: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct DecayReport {
    alpha: f64,
    n: u32,
    t: f64,
    scales: Vec<f64>,
    fit_range: (usize, usize),
    cases: Vec<DecayRow>,
}

fn predicted_exponent(
    scene: &FeasibleScene,
    spec: &TaylorletSpec,
    shears: &[f64],
    config: &DecayConfig,
) -> Result<(Vec<i32>, Option<f64>)> {
    let mut orders = Vec::with_capacity(scene.terms.len());
    let mut predicted: Option<f64> = None;
    for term in &scene.terms {
        let k = highest_approximation_order(&term.curve, shears, config.t, config.n)?;
        orders.push(k);
        match predicted_decay_exponent(term.j, spec.moments_r, config.alpha, k, config.n) {
            Ok(p) => predicted = Some(predicted.map_or(p, |q| q.min(p))),
            Err(Error::InvalidCase(reason)) => log::info!("no predicted exponent: {reason}"),
            Err(e) => return Err(e),
        }
    }
    Ok((orders, predicted))
}

pub fn decay(config_path: &Path, out: Option<&Path>, degree_cap: u64) -> Result<Status> {
    let config: DecayConfig = config::load(config_path)?;
    config.validate()?;
    let base = config_dir(config_path);
    let spec = config.taylorlet.load(base, degree_cap)?;
    let scene = config.scene.load(base)?;
    check_orders(&scene, &spec)?;
    for case in &config.cases {
        TransformQuery {
            a: 1.0,
            shears: case.shears.clone(),
            t: config.t,
            alpha: config.alpha,
            n: config.n,
        }
        .validate()?;
    }
    let kernel = Kernel::new(&spec);
    let scales = config.scales.scales();
    let (head, tail) = config.fit_trim;
    let fit_range = head..scales.len() - tail;
    let mut rows = Vec::with_capacity(config.cases.len());
    let mut status = 0;
    for case in &config.cases {
        let magnitudes = scales
            .par_iter()
            .map(|&a| {
                let q = TransformQuery {
                    a,
                    shears: case.shears.clone(),
                    t: config.t,
                    alpha: config.alpha,
                    n: config.n,
                };
                kernel
                    .transform(&scene, &q, &config.quadrature)
                    .map(|v| v.value.abs())
            })
            .collect::<Result<Vec<f64>>>()?;
        let (orders, predicted) = predicted_exponent(&scene, &spec, &case.shears, &config)?;
        let fit = match estimate_decay(&scales, &magnitudes, fit_range.clone()) {
            Ok(fit) => Some(fit),
            Err(Error::NonPositiveMagnitude { index }) => {
                log::warn!(
                    "case {:?}: magnitude vanishes at scale index {index}; no fit",
                    case.label
                );
                None
            }
            Err(e) => return Err(e),
        };
        let empirical = fit.as_ref().map(|f| f.slope);
        let within_tolerance = case.tolerance.map(|tol| match (predicted, empirical) {
            (Some(p), Some(e)) => (p - e).abs() <= tol,
            // superpolynomial decay that underflows counts as a match
            (Some(p), None) => p.is_infinite(),
            _ => false,
        });
        if within_tolerance == Some(false) {
            status = 1;
        }
        rows.push(DecayRow {
            label: case.label.clone(),
            shears: case.shears.clone(),
            approximation_orders: orders,
            predicted,
            empirical,
            r_squared: fit.as_ref().map(|f| f.r_squared),
            tolerance: case.tolerance,
            within_tolerance,
            magnitudes,
        });
    }
    print_decay_table(&rows).map_err(io_error)?;
    let report = DecayReport {
        alpha: config.alpha,
        n: config.n,
        t: config.t,
        scales,
        fit_range: (fit_range.start, fit_range.end),
        cases: rows,
    };
    write_json(out, &report)?;
    Ok(status)
}

fn print_decay_table(rows: &[DecayRow]) -> io::Result<()> {
    let mut err = io::stderr().lock();
    writeln!(err, "case,predicted,empirical,within_tolerance")?;
    let show = |x: Option<f64>| x.map_or("-".to_string(), format_float);
    for (i, row) in rows.iter().enumerate() {
        writeln!(
            err,
            "{},{},{},{}",
            row.label.clone().unwrap_or_else(|| i.to_string()),
            show(row.predicted),
            show(row.empirical),
            row.within_tolerance
                .map_or("-".to_string(), |ok| ok.to_string())
        )?;
    }
    Ok(())
}

fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut w = open_output(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).and_then(|_| w.flush()).map_err(io_error)
}

#[derive(Debug, Serialize)]
struct DetectReport<'a> {
    detection: &'a Detection,
    expected: Option<&'a [f64]>,
    tolerance: f64,
    within_tolerance: Option<bool>,
}

pub fn detect(config_path: &Path, out: Option<&Path>, degree_cap: u64) -> Result<Status> {
    let config: DetectConfig = config::load(config_path)?;
    config.validate()?;
    let base = config_dir(config_path);
    let spec = config.taylorlet.load(base, degree_cap)?;
    let scene = config.scene.load(base)?;
    let grid = config.grid_config();
    let detection =
        match detect_coefficients(&scene, &spec, config.alpha, config.t, config.n, &grid) {
            Ok(d) => d,
            Err(Error::TrackLost {
                stage,
                scale_index,
                partial,
            }) => {
                if let Some(dir) = &config.export_dir {
                    let dir = base.join(dir);
                    fs::create_dir_all(&dir).map_err(io_error)?;
                    let path = dir.join(format!("stage{}_track.csv", stage.unwrap_or(0)));
                    let mut w = open_output(Some(&path))?;
                    write_track_csv(&mut w, &partial)
                        .and_then(|_| w.flush())
                        .map_err(io_error)?;
                }
                return Err(Error::TrackLost {
                    stage,
                    scale_index,
                    partial,
                });
            }
            Err(e) => return Err(e),
        };
    if let Some(dir) = &config.export_dir {
        let dir = base.join(dir);
        fs::create_dir_all(&dir).map_err(io_error)?;
        for stage in &detection.stages {
            let mut w = open_output(Some(&dir.join(format!("stage{}_grid.csv", stage.index))))?;
            write_grid_csv(&mut w, &stage.grid)
                .and_then(|_| w.flush())
                .map_err(io_error)?;
            let mut w = open_output(Some(&dir.join(format!("stage{}_track.csv", stage.index))))?;
            write_track_csv(&mut w, &stage.track)
                .and_then(|_| w.flush())
                .map_err(io_error)?;
        }
    }
    let within_tolerance = config.expected.as_ref().map(|want| {
        detection
            .estimates
            .iter()
            .zip(want)
            .all(|(got, w)| (got - w).abs() <= config.tolerance)
    });
    for stage in &detection.stages {
        eprintln!(
            "s_{} = {} (converged {}, slope {})",
            stage.index,
            format_float(stage.estimate),
            stage.converged,
            stage
                .decay
                .as_ref()
                .map_or("-".to_string(), |d| format_float(d.slope))
        );
    }
    write_json(
        out,
        &DetectReport {
            detection: &detection,
            expected: config.expected.as_deref(),
            tolerance: config.tolerance,
            within_tolerance,
        },
    )?;
    Ok(match within_tolerance {
        Some(false) => 1,
        _ if !detection.converged() => 1,
        _ => 0,
    })
}
