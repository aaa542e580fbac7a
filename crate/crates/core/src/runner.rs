//! Subcommand bodies. Each builds its artifacts in memory; the caller writes
//! them, so output goes through a single writer and is deterministic.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::checks::run_checks;
use crate::checks::CheckContext;
use crate::config::ExperimentConfig;
use crate::convolution::{convolve, convolve_spectral, Operand};
use crate::error::{DunklError, Result};
use crate::grid::{norm, GridFunction, RadialProfile};
use crate::maximal::{log_schedule, majorization_check, weak_type_experiment, RadiusSchedule};
use crate::multiplicity::Multiplicity;
use crate::quadrature::JacobiRule;
use crate::summability::{
    bochner_riesz_kernel, convergence_experiment, heat_kernel, poisson_kernel, Approximant, Family, SummabilityKernel,
};
use crate::testfn::{radial_profile, test_function};
use crate::transform::{dunkl_transform_grid, inverse_dunkl_transform, lp_norm, DECAY_TOL};
use crate::translation::{translate_heat_closed, translate_radial, translate_spectral, translate_z2d};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A named output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file: String,
    pub contents: String,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub artifacts: Vec<Artifact>,
    /// False when a verification check failed.
    pub pass: bool,
    /// Human-readable lines for the terminal.
    pub summary: Vec<String>,
}

/// Translation routes selectable on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    All,
    Explicit,
    Radial,
    Spectral,
    Closed,
}

impl std::str::FromStr for Route {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "all" => Route::All,
            "explicit" => Route::Explicit,
            "radial" => Route::Radial,
            "spectral" => Route::Spectral,
            "closed" => Route::Closed,
            other => return Err(format!("unknown route `{other}` (all, explicit, radial, spectral, closed)")),
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub filter: Option<String>,
    pub route: Route,
    /// Adds wall-clock columns; outputs are then no longer reproducible.
    pub timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { filter: None, route: Route::All, timings: false }
    }
}

struct Provenance {
    hash: String,
    anchors: Vec<String>,
}

impl Provenance {
    fn new(cfg: &ExperimentConfig, anchors: &[&str]) -> Result<Self> {
        Ok(Provenance { hash: cfg.hash()?, anchors: anchors.iter().map(|s| s.to_string()).collect() })
    }

    fn csv_preamble(&self) -> String {
        format!("# dunklkit {VERSION}\n# config_sha256 {}\n# checks {}\n", self.hash, self.anchors.join(","))
    }

    fn csv(&self, file: &str, columns: &[String], rows: &[Vec<String>]) -> Artifact {
        let mut s = self.csv_preamble();
        s.push_str(&columns.join(","));
        s.push('\n');
        for r in rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        Artifact { file: file.into(), contents: s }
    }

    fn json(&self, file: &str, cfg: &ExperimentConfig, results: Value) -> Result<Artifact> {
        let doc = json!({
            "tool": "dunklkit",
            "version": VERSION,
            "config_sha256": self.hash,
            "checks": self.anchors,
            "config": cfg,
            "config_toml": cfg.to_toml()?,
            "results": results,
        });
        let mut contents = serde_json::to_string_pretty(&doc).map_err(|e| DunklError::Format(e.to_string()))?;
        contents.push('\n');
        Ok(Artifact { file: file.into(), contents })
    }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| DunklError::Format(e.to_string()))
}

fn input_grid(cfg: &ExperimentConfig, mult: &Multiplicity) -> Result<GridFunction> {
    let f = test_function(&cfg.test_function)?;
    let g = GridFunction::from_fn(mult, cfg.grid, |x| f(x))?;
    g.warn_if_not_decayed("input", DECAY_TOL);
    Ok(g)
}

/// Seeded sample points in the ball of radius `x_max/3`.
fn sample_points(cfg: &ExperimentConfig) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let r = cfg.grid.x_max / 3.0;
    (0..cfg.translate.samples)
        .map(|_| loop {
            let p: Vec<f64> = (0..cfg.dimension).map(|_| rng.random_range(-r..r)).collect();
            if norm(&p) <= r {
                break p;
            }
        })
        .collect()
}

fn rules(cfg: &ExperimentConfig, mult: &Multiplicity) -> Result<Vec<JacobiRule>> {
    JacobiRule::for_multiplicity(mult, cfg.quadrature.jacobi_order)
}

/// The configured kernel at its configured parameter.
pub fn configured_kernel(cfg: &ExperimentConfig, mult: &Multiplicity) -> Result<SummabilityKernel> {
    let k = &cfg.kernel;
    match k.family {
        Family::Heat => heat_kernel(mult, k.param),
        Family::Poisson => poisson_kernel(mult, k.param),
        Family::BochnerRiesz => bochner_riesz_kernel(mult, k.delta, k.param),
    }
}

fn point_columns(d: usize) -> Vec<String> {
    (1..=d).map(|i| format!("x{i}")).collect()
}

pub fn cmd_verify(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunResult> {
    let mut reports = run_checks(&CheckContext { seed: cfg.seed }, opts.filter.as_deref());
    if reports.is_empty() {
        return Err(DunklError::Format(format!("filter `{}` matches no check", opts.filter.as_deref().unwrap_or(""))));
    }
    let summary: Vec<String> = reports.iter().map(|r| r.line()).collect();
    if !opts.timings {
        for r in &mut reports {
            r.runtime_ms = None;
        }
    }
    let pass = reports.iter().all(|r| r.pass);
    let names: Vec<&str> = reports.iter().map(|r| r.name.as_str()).collect();
    let prov = Provenance::new(cfg, &names)?;
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| vec![r.name.clone(), format!("\"{}\"", r.anchor), num(r.measured), r.tolerance.map_or(String::new(), num), r.pass.to_string()])
        .collect();
    let cols = ["name", "anchor", "measured", "tolerance", "pass"].map(String::from);
    let artifacts = vec![
        prov.json("verify.json", cfg, json!({ "pass": pass, "reports": to_value(&reports)? }))?,
        prov.csv("verify.csv", &cols, &rows),
    ];
    Ok(RunResult { artifacts, pass, summary })
}

pub fn cmd_transform(cfg: &ExperimentConfig) -> Result<RunResult> {
    let mult = cfg.multiplicity()?;
    let f = input_grid(cfg, &mult)?;
    let fhat = dunkl_transform_grid(&f, cfg.frequency_grid)?;
    let (n, nhat) = (lp_norm(&f, 2.0)?, lp_norm(&fhat, 2.0)?);
    let defect = (nhat - n).abs() / n;
    let prov = Provenance::new(cfg, &["gaussian_fixed_point", "plancherel_suite", "poisson_pair"])?;
    let mut grid_csv = Vec::new();
    fhat.write_csv(&mut grid_csv)?;
    let mut contents = prov.csv_preamble();
    contents.push_str(&String::from_utf8(grid_csv).map_err(|e| DunklError::Format(e.to_string()))?);
    let results = json!({
        "l2_norm": n,
        "transform_l2_norm": nhat,
        "plancherel_defect": defect,
        "transform_boundary_ratio": fhat.boundary_ratio(),
    });
    Ok(RunResult {
        artifacts: vec![Artifact { file: "transform.csv".into(), contents }, prov.json("transform.json", cfg, results)?],
        pass: true,
        summary: vec![format!("plancherel defect {defect:.3e} over {} nodes", fhat.len())],
    })
}

/// Closed-form translate when the test function is a Gaussian `e^{−t|x|²}`.
fn closed_form_t(id: &str) -> Option<f64> {
    match id {
        "gaussian" => Some(0.5),
        "narrow_gaussian" => Some(1.0),
        "wide_gaussian" => Some(1.0 / 32.0),
        "broad_gaussian" => Some(1.0 / 72.0),
        _ => None,
    }
}

pub fn cmd_translate(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunResult> {
    let mult = cfg.multiplicity()?;
    let f = test_function(&cfg.test_function)?;
    let y = &cfg.translate.shift;
    let xs = sample_points(cfg);
    let r = rules(cfg, &mult)?;
    let wants = |route: Route| opts.route == Route::All || opts.route == route;
    let mut routes: Vec<(&str, Vec<f64>)> = Vec::new();
    if wants(Route::Explicit) {
        routes.push(("explicit", xs.iter().map(|x| translate_z2d(&mult, |p| f(p), y, x, &r)).collect::<Result<_>>()?));
    }
    if wants(Route::Radial) {
        match radial_profile(&cfg.test_function) {
            Some(f0) => {
                let p = RadialProfile::auto(f0, &mult, &[])?;
                routes.push(("radial", xs.iter().map(|x| translate_radial(&mult, &p, y, x, &r)).collect::<Result<_>>()?));
            }
            None if opts.route == Route::Radial => {
                return Err(DunklError::domain("translate", format!("`{}` is not radial", cfg.test_function)));
            }
            None => {}
        }
    }
    if wants(Route::Spectral) {
        let grid = input_grid(cfg, &mult)?;
        routes.push(("spectral", translate_spectral(&grid, y, &xs)?.iter().map(|v| v.re).collect()));
    }
    if wants(Route::Closed) {
        match closed_form_t(&cfg.test_function) {
            Some(t) => routes.push(("closed", xs.iter().map(|x| translate_heat_closed(&mult, t, x, y)).collect::<Result<_>>()?)),
            None if opts.route == Route::Closed => {
                return Err(DunklError::domain("translate", format!("no closed form for `{}`", cfg.test_function)));
            }
            None => {}
        }
    }
    let mut cols = point_columns(mult.d);
    cols.extend(routes.iter().map(|(n, _)| n.to_string()));
    let rows: Vec<Vec<String>> = xs
        .iter()
        .enumerate()
        .map(|(k, x)| x.iter().map(|&v| num(v)).chain(routes.iter().map(|(_, vals)| num(vals[k]))).collect())
        .collect();
    let mut pairs = serde_json::Map::new();
    let mut summary = Vec::new();
    for a in 0..routes.len() {
        for b in a + 1..routes.len() {
            let diff = routes[a].1.iter().zip(&routes[b].1).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
            let key = format!("{}-{}", routes[a].0, routes[b].0);
            summary.push(format!("max |{key}| = {diff:.3e}"));
            pairs.insert(key, json!(diff));
        }
    }
    let prov = Provenance::new(cfg, &["heat_translation", "translation_routes"])?;
    Ok(RunResult {
        artifacts: vec![
            prov.csv("translate.csv", &cols, &rows),
            prov.json("translate.json", cfg, json!({ "shift": y, "routes": routes.iter().map(|r| r.0).collect::<Vec<_>>(), "pairwise_max_difference": pairs }))?,
        ],
        pass: true,
        summary,
    })
}

pub fn cmd_convolve(cfg: &ExperimentConfig) -> Result<RunResult> {
    let mult = cfg.multiplicity()?;
    let f = input_grid(cfg, &mult)?;
    let k = configured_kernel(cfg, &mult)?;
    let xs = sample_points(cfg);
    let explicit = convolve(&f, Operand::Radial(&k.profile), &xs, &rules(cfg, &mult)?)?;
    let fhat = dunkl_transform_grid(&f, cfg.frequency_grid)?;
    let damped = fhat.map(|xi, v| v * k.multiplier.at(norm(xi)));
    let spectral = inverse_dunkl_transform(&damped, &xs)?;
    let worst = explicit.iter().zip(&spectral).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let conv = convolve_spectral(&f, |xi| Complex64::new(k.multiplier.at(norm(xi)), 0.0), cfg.frequency_grid)?;
    let g1 = k.profile.lp_norm(1.0)?;
    let mut young = Vec::new();
    for &p in &cfg.schedules.p {
        let lhs = lp_norm(&conv, p)?;
        let bound = g1 * lp_norm(&f, p)?;
        young.push(json!({ "p": p.to_string(), "lhs": lhs, "bound": bound, "ratio": lhs / bound }));
    }
    let mut cols = point_columns(mult.d);
    cols.extend(["explicit", "spectral"].map(String::from));
    let rows: Vec<Vec<String>> = xs
        .iter()
        .zip(explicit.iter().zip(&spectral))
        .map(|(x, (e, s))| x.iter().map(|&v| num(v)).chain([num(e.re), num(s.re)]).collect())
        .collect();
    let prov = Provenance::new(cfg, &["convolution_identity"])?;
    Ok(RunResult {
        artifacts: vec![
            prov.csv("convolve.csv", &cols, &rows),
            prov.json("convolve.json", cfg, json!({ "kernel_mass": k.normalization(), "max_route_difference": worst, "young": young }))?,
        ],
        pass: true,
        summary: vec![format!("explicit vs spectral: {worst:.3e}")],
    })
}

pub fn cmd_summability(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunResult> {
    let mult = cfg.multiplicity()?;
    let f = input_grid(cfg, &mult)?;
    let phi = Approximant::Radial(SummabilityKernel::unit(&mult, cfg.kernel.family, cfg.kernel.delta)?);
    let mut cols = ["kernel", "eps", "p", "norm", "relative"].map(String::from).to_vec();
    if opts.timings {
        cols.push("runtime_ms".into());
    }
    let mut rows = Vec::new();
    let mut tables = Vec::new();
    let mut summary = Vec::new();
    for &p in &cfg.schedules.p {
        let t = convergence_experiment(&f, &phi, p, &cfg.schedules.eps, cfg.frequency_grid)?;
        for r in &t.rows {
            let mut row = vec![t.kernel.clone(), num(r.eps), p.to_string(), num(r.norm), num(r.relative)];
            if opts.timings {
                row.push(r.runtime_ms.to_string());
            }
            rows.push(row);
        }
        summary.push(format!("{} p={p}: final relative {:.3e}, decreasing {}", t.kernel, t.final_relative(), t.decreasing()));
        tables.push(json!({
            "p": p.to_string(),
            "kernel": t.kernel,
            "reference_norm": t.reference_norm,
            "decreasing": t.decreasing(),
            "final_relative": t.final_relative(),
        }));
    }
    let prov = Provenance::new(cfg, &["approximate_identity"])?;
    Ok(RunResult {
        artifacts: vec![prov.csv("summability.csv", &cols, &rows), prov.json("summability.json", cfg, json!({ "tables": tables }))?],
        pass: true,
        summary,
    })
}

pub fn cmd_maximal(cfg: &ExperimentConfig) -> Result<RunResult> {
    let mult = cfg.multiplicity()?;
    let f = input_grid(cfg, &mult)?;
    let r = rules(cfg, &mult)?;
    let levels = match &cfg.schedules.levels {
        Some(l) => l.clone(),
        None => {
            let s = f.sup_norm();
            log_schedule(s / 200.0, s / 2.0, 9)
        }
    };
    let sched = RadiusSchedule::for_grid(&f, cfg.schedules.radius_count)?;
    let weak = weak_type_experiment(&f, &levels, &sched, cfg.indicator, &r)?;
    let prov = Provenance::new(cfg, &["maximal_function"])?;
    let weak_rows: Vec<Vec<String>> = weak.rows.iter().map(|w| vec![num(w.a), num(w.levelset_mass), num(w.ratio)]).collect();
    let mut artifacts = vec![prov.csv("maximal_weak_type.csv", &["a", "levelset_mass", "ratio"].map(String::from), &weak_rows)];
    let mut summary = vec![format!("weak-type constant {:.4} (floor {:.4}, slope {:.3})", weak.constant, weak.floor, weak.slope)];

    let phi = SummabilityKernel::unit(&mult, cfg.kernel.family, cfg.kernel.delta)?;
    let xs = sample_points(cfg);
    let majorization = match majorization_check(&f, &phi, &cfg.schedules.eps, &xs, cfg.schedules.radius_count, cfg.indicator, &r, cfg.frequency_grid) {
        Ok(t) => {
            let mut cols = point_columns(mult.d);
            cols.extend(["sup_conv", "maximal", "maximal_refined", "ratio"].map(String::from));
            let rows: Vec<Vec<String>> = t
                .rows
                .iter()
                .map(|row| row.x.iter().map(|&v| num(v)).chain([num(row.sup_conv), num(row.maximal), num(row.maximal_refined), num(row.ratio)]).collect())
                .collect();
            artifacts.push(prov.csv("maximal_majorization.csv", &cols, &rows));
            summary.push(format!("majorization constant {:.4}, movement {:.3e}", t.refined_constant, t.movement));
            json!({ "moment": t.moment, "constant": t.constant, "refined_constant": t.refined_constant, "movement": t.movement })
        }
        Err(DunklError::Hypothesis(why)) => {
            summary.push(format!("majorization skipped: {why}"));
            json!({ "skipped": why })
        }
        Err(e) => return Err(e),
    };
    let results = json!({
        "weak_type": { "constant": weak.constant, "floor": weak.floor, "slope": weak.slope, "rows": to_value(&weak.rows)? },
        "majorization": majorization,
    });
    artifacts.push(prov.json("maximal.json", cfg, results)?);
    Ok(RunResult { artifacts, pass: true, summary })
}

/// Writes artifacts in order into `dir`, creating it if needed.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for a in artifacts {
        fs::write(dir.join(&a.file), &a.contents)?;
    }
    Ok(())
}

/// One line per artifact for the terminal.
pub fn describe(dir: &Path, artifacts: &[Artifact]) -> String {
    let mut s = String::new();
    for a in artifacts {
        let _ = writeln!(s, "wrote {}", dir.join(&a.file).display());
    }
    s
}
