//! Batch driver behind the `fracbem` binary.
//!
//! A run is described by one JSON document. The effective configuration
//! (after `--mode`, without the output directory) is hashed with SHA-256 and
//! the digest is written into every artifact: as a `# config_hash:` comment
//! line at the top of each CSV file and as a `config_hash` field of each JSON
//! file. CSV numbers use `{:.16e}`, 17 significant digits.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::bem::{
    assemble_galerkin, assemble_rhs, curve_single_layer_trace, eval_single_layer, solve_density, BoundaryDensity,
    DensitySolve, SingleLayerMatrix, SolverMethod,
};
use crate::error::{Error, Result};
use crate::geometry::{discretize, gauss_rule, BoundaryCurve, PanelMesh, Point2, PointClass};
use crate::oracle::{bem_residual, far_field_decay, symbol_decay_check, TruncationWindow};
use crate::spectral::{self, apply_inverse_frac, eval_series, project};
use crate::specfun::FracOrder;

#[derive(Debug, Parser)]
#[command(name = "fracbem", version, about = "Fractional Dirichlet problem solver")]
pub struct Args {
    /// Run configuration (JSON).
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Overrides the mode given in the configuration.
    #[arg(long, value_name = "NAME")]
    pub mode: Option<Mode>,
    /// Overrides the output directory given in the configuration.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Solve,
    Verify,
    Converge,
    SymbolCheck,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub problem: ProblemSpec,
    #[serde(default)]
    pub discretization: Discretization,
    #[serde(default)]
    pub evaluation: Evaluation,
    #[serde(default)]
    pub verify: VerifySpec,
    #[serde(default)]
    pub converge: ConvergeSpec,
    #[serde(default)]
    pub symbol_check: SymbolSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    pub alpha: f64,
    pub geometry: BoundaryCurve,
    pub boundary_data: BoundaryData,
    #[serde(default)]
    pub volume_data: VolumeData,
}

/// Dirichlet data `g`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryData {
    Constant { value: f64 },
    /// `g(x, y) = a + b x + c y`.
    Coordinate { a: f64, b: f64, c: f64 },
    /// `g = γ S_α G*` for `G*(t) = Σ a_k cos 2πkt + b_k sin 2πkt`, rows `[k, a_k, b_k]`.
    ManufacturedDensity { coefficients: Vec<[f64; 3]> },
}

/// Right-hand side `f` of the volume equation.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VolumeData {
    #[default]
    Zero,
    /// `f = Σ c · 2 sin(mπx) sin(nπy)`, rows `[m, n, c]`.
    SineModes { modes: Vec<[f64; 3]> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Discretization {
    pub n_panels: usize,
    pub quad_order: usize,
    pub spectral_order: usize,
    pub spectral_quad: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Discretization {
            n_panels: 64,
            quad_order: 10,
            spectral_order: spectral::DEFAULT_ORDER,
            spectral_quad: spectral::DEFAULT_QUAD,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Evaluation {
    /// Cell centres of an `nx × ny` grid over `bounds = [xmin, xmax, ymin, ymax]`
    /// (default: bounding box of the boundary).
    Grid {
        nx: usize,
        ny: usize,
        #[serde(default)]
        bounds: Option<[f64; 4]>,
    },
    Points { points: Vec<Point2> },
}

impl Default for Evaluation {
    fn default() -> Self {
        Evaluation::Grid {
            nx: 10,
            ny: 10,
            bounds: None,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySpec {
    /// Residual points; the evaluation points when absent.
    pub points: Option<Vec<Point2>>,
    /// Refinements of the default window.
    pub refinements: Option<usize>,
    /// Far-field radii; `{10, 100, 1000}` times the diameter when absent.
    pub radii: Option<Vec<f64>>,
    /// Number of equally spaced far-field directions.
    pub directions: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergeSpec {
    pub n_panels: Vec<usize>,
}

impl Default for ConvergeSpec {
    fn default() -> Self {
        ConvergeSpec {
            n_panels: vec![16, 32, 64, 128],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SymbolSpec {
    pub cutoff_radius: f64,
    pub r_values: Vec<f64>,
}

impl Default for SymbolSpec {
    fn default() -> Self {
        SymbolSpec {
            cutoff_radius: 4.0,
            r_values: (0..=8).map(|k| 2f64.powi(k)).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub directory: PathBuf,
    /// Subset of `csv`, `json`.
    pub formats: Vec<String>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            directory: PathBuf::from("fracbem-out"),
            formats: vec!["csv".into(), "json".into()],
        }
    }
}

fn default_dimension() -> usize {
    2
}

const DEFAULT_REFINEMENTS: usize = 2;
const DEFAULT_DIRECTIONS: usize = 8;

impl RunConfig {
    /// Parses a JSON document; any failure is a configuration error.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    /// SHA-256 of the canonical JSON form without the output directory.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.directory = PathBuf::new();
        let canonical = serde_json::to_string(&c).expect("config serialises");
        Sha256::digest(canonical.as_bytes())
            .iter()
            .fold(String::with_capacity(64), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            })
    }

    fn order(&self) -> Result<FracOrder> {
        FracOrder::new(self.problem.dimension, self.problem.alpha)
    }

    fn validate(&self) -> Result<()> {
        let order = self.order()?;
        for f in &self.output.formats {
            if f != "csv" && f != "json" {
                return Err(Error::Config(format!("unknown output format {f}")));
            }
        }
        if self.mode == Mode::SymbolCheck {
            if !(self.symbol_check.cutoff_radius > 0.0) || self.symbol_check.r_values.iter().any(|r| !(*r >= 0.0)) {
                return Err(Error::Config("symbol check needs a positive cutoff radius and r >= 0".into()));
            }
            return Ok(());
        }
        if order.dim() != 2 {
            return Err(Error::Config("dimension 3 is only available in symbol-check mode".into()));
        }
        self.problem.geometry.validate()?;
        let d = &self.discretization;
        if d.n_panels < 3 {
            return Err(Error::Config(format!("n_panels must be at least 3, got {}", d.n_panels)));
        }
        gauss_rule(d.quad_order)?;
        if let VolumeData::SineModes { modes } = &self.problem.volume_data {
            if self.problem.geometry != BoundaryCurve::unit_square() {
                return Err(Error::Config("volume data requires the unit square geometry".into()));
            }
            if d.spectral_order == 0 || d.spectral_quad == 0 {
                return Err(Error::Config("spectral order and quadrature must be positive".into()));
            }
            for m in modes {
                if !(m[0] >= 1.0 && m[1] >= 1.0 && m[0].fract() == 0.0 && m[1].fract() == 0.0) {
                    return Err(Error::Config(format!("sine mode indices must be positive integers, got {m:?}")));
                }
                if m[0] as usize > d.spectral_order || m[1] as usize > d.spectral_order {
                    return Err(Error::Config(format!("sine mode {m:?} exceeds the spectral order")));
                }
            }
        }
        if let BoundaryData::ManufacturedDensity { coefficients } = &self.problem.boundary_data {
            if coefficients.iter().any(|c| !(c[0] >= 0.0 && c[0].fract() == 0.0)) {
                return Err(Error::Config("manufactured density wave numbers must be non-negative integers".into()));
            }
        }
        if self.mode == Mode::Converge {
            if !matches!(self.problem.boundary_data, BoundaryData::ManufacturedDensity { .. }) {
                return Err(Error::Config("converge mode requires manufactured_density boundary data".into()));
            }
            if self.converge.n_panels.len() < 2 || self.converge.n_panels.iter().any(|&n| n < 3) {
                return Err(Error::Config("converge mode needs at least two panel counts, each >= 3".into()));
            }
        }
        for x in self.evaluation_points()? {
            if self.problem.geometry.classify_point(x) == PointClass::Boundary {
                return Err(Error::Config(format!("evaluation point ({}, {}) lies on the boundary", x[0], x[1])));
            }
            if !matches!(self.problem.volume_data, VolumeData::Zero) && !(0.0..=1.0).contains(&x[0])
                || !matches!(self.problem.volume_data, VolumeData::Zero) && !(0.0..=1.0).contains(&x[1])
            {
                return Err(Error::Config(format!(
                    "evaluation point ({}, {}) is outside the unit square",
                    x[0], x[1]
                )));
            }
        }
        if let Some(n) = self.verify.directions {
            if n == 0 {
                return Err(Error::Config("verify.directions must be positive".into()));
            }
        }
        Ok(())
    }

    fn evaluation_points(&self) -> Result<Vec<Point2>> {
        match &self.evaluation {
            Evaluation::Points { points } => Ok(points.clone()),
            Evaluation::Grid { nx, ny, bounds } => {
                if *nx == 0 || *ny == 0 {
                    return Err(Error::Config("grid needs nx, ny >= 1".into()));
                }
                let [x0, x1, y0, y1] = match bounds {
                    Some(b) => *b,
                    None => bounding_box(&self.problem.geometry),
                };
                if !(x1 > x0 && y1 > y0) {
                    return Err(Error::Config("grid bounds must be increasing".into()));
                }
                let mut pts = Vec::with_capacity(nx * ny);
                for j in 0..*ny {
                    for i in 0..*nx {
                        pts.push([
                            x0 + (i as f64 + 0.5) * (x1 - x0) / *nx as f64,
                            y0 + (j as f64 + 0.5) * (y1 - y0) / *ny as f64,
                        ]);
                    }
                }
                Ok(pts)
            }
        }
    }
}

fn bounding_box(curve: &BoundaryCurve) -> [f64; 4] {
    let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    for k in 0..1024 {
        let p = curve.point_at(k as f64 / 1024.0);
        b = [b[0].min(p[0]), b[1].max(p[0]), b[2].min(p[1]), b[3].max(p[1])];
    }
    for p in curve.corner_params() {
        let p = curve.point_at(p);
        b = [b[0].min(p[0]), b[1].max(p[0]), b[2].min(p[1]), b[3].max(p[1])];
    }
    b
}

fn manufactured(coefficients: &[[f64; 3]], t: f64) -> f64 {
    coefficients
        .iter()
        .map(|c| {
            let w = 2.0 * PI * c[0] * t;
            c[1] * w.cos() + c[2] * w.sin()
        })
        .sum()
}

struct Solved {
    mesh: Arc<PanelMesh>,
    matrix: SingleLayerMatrix,
    solve: DensitySolve,
}

fn solve_bem(cfg: &RunConfig, order: FracOrder, n_panels: usize) -> Result<Solved> {
    let curve = &cfg.problem.geometry;
    let mesh = Arc::new(discretize(curve, n_panels)?);
    let quad = gauss_rule(cfg.discretization.quad_order)?;
    let matrix = assemble_galerkin(mesh.clone(), order, &quad)?;
    let rhs = match &cfg.problem.boundary_data {
        BoundaryData::Constant { value } => assemble_rhs(|_, _| *value, &mesh, &quad)?,
        BoundaryData::Coordinate { a, b, c } => assemble_rhs(|x, _| a + b * x[0] + c * x[1], &mesh, &quad)?,
        BoundaryData::ManufacturedDensity { coefficients } => {
            let g = |t: f64| manufactured(coefficients, t);
            // panel averages need the trace at every quadrature node
            let err = std::cell::OnceCell::new();
            let rhs = assemble_rhs(
                |_, t| match curve_single_layer_trace(curve, order, g, t) {
                    Ok(v) => v,
                    Err(e) => {
                        let _ = err.set(e);
                        f64::NAN
                    }
                },
                &mesh,
                &quad,
            );
            if let Some(e) = err.into_inner() {
                return Err(e);
            }
            rhs?
        }
    };
    let solve = solve_density(&matrix, &rhs)?;
    Ok(Solved { mesh, matrix, solve })
}

/// Artifact writer bound to one output directory and config hash.
struct Writer<'a> {
    dir: &'a Path,
    hash: String,
    csv: bool,
    json: bool,
    written: Vec<PathBuf>,
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

impl Writer<'_> {
    fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        if !self.csv {
            return Ok(());
        }
        let mut s = format!("# config_hash: {}\n{}\n", self.hash, header.join(","));
        for r in rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        self.put(name, s)
    }

    fn json(&mut self, name: &str, mut value: serde_json::Value) -> Result<()> {
        if !self.json {
            return Ok(());
        }
        if let Some(obj) = value.as_object_mut() {
            obj.insert("config_hash".into(), json!(self.hash));
        }
        let mut s = serde_json::to_string_pretty(&value).map_err(|e| Error::Data(e.to_string()))?;
        s.push('\n');
        self.put(name, s)
    }

    fn put(&mut self, name: &str, contents: String) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        self.written.push(path);
        Ok(())
    }
}

/// Runs one configuration and returns the files written.
pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let order = cfg.order()?;
    let dir = &cfg.output.directory;
    fs::create_dir_all(dir)?;
    let mut w = Writer {
        dir,
        hash: cfg.hash(),
        csv: cfg.output.formats.iter().any(|f| f == "csv"),
        json: cfg.output.formats.iter().any(|f| f == "json"),
        written: Vec::new(),
    };
    match cfg.mode {
        Mode::Solve => run_solve(cfg, order, &mut w)?,
        Mode::Verify => run_verify(cfg, order, &mut w)?,
        Mode::Converge => run_converge(cfg, order, &mut w)?,
        Mode::SymbolCheck => run_symbol(cfg, order, &mut w)?,
    }
    Ok(w.written)
}

fn run_solve(cfg: &RunConfig, order: FracOrder, w: &mut Writer) -> Result<()> {
    let s = solve_bem(cfg, order, cfg.discretization.n_panels)?;
    let g = &s.solve.density;
    let rows: Vec<Vec<String>> = s
        .mesh
        .midpoints()
        .iter()
        .zip(g.coeffs())
        .enumerate()
        .map(|(i, (m, v))| vec![i.to_string(), num(m[0]), num(m[1]), num(*v)])
        .collect();
    w.csv("density.csv", &["panel", "mid_x", "mid_y", "density"], &rows)?;

    let pts = cfg.evaluation_points()?;
    let u2 = eval_single_layer(g, order, &pts)?;
    let u1 = match &cfg.problem.volume_data {
        VolumeData::Zero => vec![0.0; pts.len()],
        VolumeData::SineModes { modes } => {
            let d = &cfg.discretization;
            let f = |x: f64, y: f64| {
                modes
                    .iter()
                    .map(|m| 2.0 * m[2] * (m[0] * PI * x).sin() * (m[1] * PI * y).sin())
                    .sum::<f64>()
            };
            let u1 = apply_inverse_frac(&project(f, d.spectral_order, d.spectral_quad)?, order)?;
            eval_series(&u1, &pts)?
        }
    };
    let rows: Vec<Vec<String>> = pts
        .iter()
        .zip(u1.iter().zip(&u2))
        .map(|(x, (a, b))| vec![num(x[0]), num(x[1]), num(*a), num(*b), num(a + b)])
        .collect();
    w.csv("solution.csv", &["x", "y", "u1", "u2", "u"], &rows)?;

    w.json(
        "summary.json",
        json!({
            "mode": "solve",
            "dimension": order.dim(),
            "alpha": order.alpha(),
            "n_panels": s.mesh.len(),
            "l1_norm": g.l1_norm(),
            "total_mass": g.total_mass(),
            "condition_estimate": s.matrix.condition_estimate(),
            "symmetry_defect": s.matrix.symmetry_defect(),
            "spd": s.solve.method == SolverMethod::Cholesky,
            "solver": match s.solve.method {
                SolverMethod::Cholesky => "cholesky",
                SolverMethod::PivotedLu => "pivoted_lu",
            },
            "solver_residual": s.solve.relative_residual,
        }),
    )
}

fn run_verify(cfg: &RunConfig, order: FracOrder, w: &mut Writer) -> Result<()> {
    let s = solve_bem(cfg, order, cfg.discretization.n_panels)?;
    let g: &BoundaryDensity = &s.solve.density;
    let points = match &cfg.verify.points {
        Some(p) => p.clone(),
        None => cfg.evaluation_points()?,
    };
    let refinements = cfg.verify.refinements.unwrap_or(DEFAULT_REFINEMENTS);
    let mut reports = Vec::with_capacity(points.len());
    for x in &points {
        let scale = s.mesh.distance_to(*x);
        let mut win = TruncationWindow::default_for(scale)?;
        for _ in 0..refinements {
            win = win.refined();
        }
        let r = bem_residual(g, order, *x, win)?;
        reports.push(json!({
            "report": r,
            "within_uncertainty": r.within_uncertainty(),
        }));
    }
    w.json("residuals.json", json!({ "mode": "verify", "alpha": order.alpha(), "reports": reports }))?;

    let diameter = cfg.problem.geometry.diameter();
    let radii = cfg
        .verify
        .radii
        .clone()
        .unwrap_or_else(|| vec![10.0 * diameter, 100.0 * diameter, 1000.0 * diameter]);
    let n_dir = cfg.verify.directions.unwrap_or(DEFAULT_DIRECTIONS);
    let dirs: Vec<Point2> = (0..n_dir)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n_dir as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    let table = far_field_decay(g, order, &radii, &dirs).map_err(|e| match e {
        Error::Domain(m) => Error::Config(m),
        e => e,
    })?;
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| vec![num(r.radius), num(r.direction[0]), num(r.direction[1]), num(r.value), num(r.scaled)])
        .collect();
    w.csv("far_field.csv", &["radius", "dir_x", "dir_y", "value", "scaled"], &rows)
}

fn run_converge(cfg: &RunConfig, order: FracOrder, w: &mut Writer) -> Result<()> {
    let BoundaryData::ManufacturedDensity { coefficients } = &cfg.problem.boundary_data else {
        unreachable!("checked by validate")
    };
    let mut rows = Vec::new();
    let mut prev: Option<f64> = None;
    for &n in &cfg.converge.n_panels {
        let s = solve_bem(cfg, order, n)?;
        let (mut num_sq, mut den_sq) = (0.0, 0.0);
        for (c, p) in s.solve.density.coeffs().iter().zip(s.mesh.panels()) {
            let e = manufactured(coefficients, p.param(0.5));
            num_sq += (c - e).powi(2) * p.length();
            den_sq += e * e * p.length();
        }
        let err = if den_sq > 0.0 { (num_sq / den_sq).sqrt() } else { num_sq.sqrt() };
        let (ratio, rate) = match prev {
            Some(p) if err > 0.0 => (num(p / err), num((p / err).log2())),
            _ => (String::new(), String::new()),
        };
        rows.push(vec![n.to_string(), num(err), ratio, rate]);
        prev = Some(err);
    }
    w.csv("convergence.csv", &["n_panels", "rel_l2_error", "ratio", "observed_order"], &rows)
}

fn run_symbol(cfg: &RunConfig, order: FracOrder, w: &mut Writer) -> Result<()> {
    let rows: Vec<Vec<String>> =
        symbol_decay_check(order, cfg.symbol_check.cutoff_radius, &cfg.symbol_check.r_values)?
            .iter()
            .map(|s| vec![num(s.r), num(s.symbol), num(s.bound_ratio)])
            .collect();
    w.csv("symbol.csv", &["r", "symbol", "bound_ratio"], &rows)
}

/// Loads the configuration named by `args`, applies overrides and runs it.
pub fn execute(args: &Args) -> Result<Vec<PathBuf>> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = RunConfig::from_json(&text)?;
    if let Some(m) = args.mode {
        cfg.mode = m;
    }
    if let Some(out) = &args.out {
        cfg.output.directory = out.clone();
    }
    run(&cfg)
}

/// Entry point of the binary; returns the process exit status.
pub fn main_with_args(args: &Args) -> i32 {
    match execute(args) {
        Ok(files) => {
            for f in files {
                log::info!("wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("{}", e.to_string().replace(['\n', '\r'], " "));
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_config(alpha: f64) -> RunConfig {
        RunConfig::from_json(&format!(
            r#"{{
                "mode": "solve",
                "problem": {{
                    "alpha": {alpha},
                    "geometry": {{ "kind": "circle", "center": [0, 0], "radius": 1 }},
                    "boundary_data": {{ "kind": "constant", "value": 1 }}
                }},
                "evaluation": {{ "kind": "points", "points": [[0, 0], [3, 0]] }}
            }}"#
        ))
        .unwrap()
    }

    #[test]
    fn parses_with_defaults() {
        let c = circle_config(0.75);
        assert_eq!(c.problem.dimension, 2);
        assert_eq!(c.discretization.n_panels, 64);
        assert_eq!(c.output.formats, vec!["csv", "json"]);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn hash_ignores_output_directory_only() {
        let a = circle_config(0.75);
        let mut b = a.clone();
        b.output.directory = PathBuf::from("elsewhere");
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        b.mode = Mode::Verify;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn config_errors() {
        let e = circle_config(0.9).validate().unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("alpha out of admissible range"));
        assert!(RunConfig::from_json("{ \"mode\": \"solve\" }").is_err());
        assert!(RunConfig::from_json("{").unwrap_err().to_string().starts_with("config error"));

        let mut c = circle_config(0.75);
        c.evaluation = Evaluation::Points {
            points: vec![[1.0, 0.0]],
        };
        assert!(matches!(c.validate(), Err(Error::Config(_))));

        let mut c = circle_config(0.75);
        c.problem.volume_data = VolumeData::SineModes {
            modes: vec![[1.0, 1.0, 1.0]],
        };
        assert!(matches!(c.validate(), Err(Error::Config(_))));

        let mut c = circle_config(0.75);
        c.mode = Mode::Converge;
        assert!(matches!(c.validate(), Err(Error::Config(_))));

        let mut c = circle_config(0.75);
        c.discretization.n_panels = 2;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn grid_uses_cell_centres() {
        let mut c = circle_config(0.75);
        c.evaluation = Evaluation::Grid {
            nx: 2,
            ny: 1,
            bounds: Some([0.0, 2.0, 0.0, 1.0]),
        };
        assert_eq!(c.evaluation_points().unwrap(), vec![[0.5, 0.5], [1.5, 0.5]]);
        let b = bounding_box(&BoundaryCurve::unit_circle());
        assert!((b[0] + 1.0).abs() < 1e-12 && (b[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solve_writes_near_equal_density() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = circle_config(0.75);
        c.output.directory = dir.path().to_path_buf();
        let files = run(&c).unwrap();
        assert_eq!(files.len(), 3);
        let density = fs::read_to_string(dir.path().join("density.csv")).unwrap();
        let mut lines = density.lines();
        assert_eq!(lines.next().unwrap(), format!("# config_hash: {}", c.hash()));
        assert_eq!(lines.next().unwrap(), "panel,mid_x,mid_y,density");
        let vals: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
        assert_eq!(vals.len(), 64);
        let (lo, hi) = vals.iter().fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
        assert!(hi - lo <= 1e-8 * hi);
        let summary: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary["spd"], json!(true));
        assert_eq!(summary["config_hash"], json!(c.hash()));
    }

    #[test]
    fn manufactured_density_sum() {
        let c = [[0.0, 1.0, 0.0], [1.0, 0.5, 0.0]];
        assert!((manufactured(&c, 0.0) - 1.5).abs() < 1e-15);
        assert!((manufactured(&c, 0.5) - 0.5).abs() < 1e-15);
    }
}
