//! The `elastica` command line.
//!
//! Every command writes its files into `--out` (default `elastica-out`) and
//! prints a JSON report embedding the effective configuration to stdout.
//! Validation problems exit with code 2, numerical failures with code 1.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::corpus;
use crate::curve::{plane_curvature_masked, resample_uniform, speed, DiscreteCurve};
use crate::error::Error;
use crate::homogeneous::{homo_distance, homo_geodesic, resample_sphere, HomoOptions, SphereCurve};
use crate::hurdat::{filter_storms, parse_hurdat2, track_to_curve, StormRecord, TrackOptions};
use crate::io::{self, Shape};
use crate::plane::{collinearity_residual, straightening_curve, total_curvature, PlaneGeometry};
use crate::registration::{shape_distance_srv, ShapeOptions};
use crate::srv::{l2_distance, path_length, srv_geodesic_between, srv_inverse, srv_transform, SrvCurve};
use crate::surfaces::{
    ruled_decode, ruled_encode, surface_geodesic, surface_mesh, tube_decode, tube_encode, ChannelWeights, StripSpec,
    SurfaceOptions, SurfaceSpec,
};

#[derive(Debug, Parser)]
#[command(name = "elastica", version, about = "Elastic shape distances, geodesics and meshes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

/// Flags shared by every command.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Resample inputs to this many points.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Points on a geodesic, endpoints included.
    #[arg(long, global = true, default_value_t = 9)]
    pub steps: usize,
    /// Do not quotient by rotations.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub no_rotations: bool,
    /// Do not quotient by reparametrizations.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub no_reparam: bool,
    /// Coarse seed-point candidates for closed curves.
    #[arg(long, global = true, default_value_t = 32)]
    pub shift_samples: usize,
    /// Tube radius weight.
    #[arg(long, global = true, allow_negative_numbers = true, default_value_t = 1.0)]
    pub mu: f64,
    /// Ruling weight.
    #[arg(long, global = true, allow_negative_numbers = true, default_value_t = 1.0)]
    pub nu: f64,
    /// Aux channel weight (strip bandwidth, sphere curve aux).
    #[arg(long, global = true, allow_negative_numbers = true, default_value_t = 1.0)]
    pub lambda: f64,
    /// Hurricane wind weight in radians per knot.
    #[arg(long, global = true, allow_negative_numbers = true, default_value_t = 0.01)]
    pub lambda_w: f64,
    /// Output directory.
    #[arg(long, global = true, default_value = "elastica-out")]
    pub out: PathBuf,
    /// Seed for generated inputs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Read CSV curves as closed.
    #[arg(long, global = true)]
    pub closed: bool,
    /// Vertices around each tube circle.
    #[arg(long, global = true, default_value_t = 24)]
    pub circle_samples: usize,
    /// Vertices across rulings and strips.
    #[arg(long, global = true, default_value_t = 8)]
    pub s_samples: usize,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Shape distance between two files.
    Distance { first: PathBuf, second: PathBuf },
    /// Geodesic between two files, one file per step.
    Geodesic { first: PathBuf, second: PathBuf },
    /// Triangle mesh of a surface file.
    Mesh { input: PathBuf },
    /// Compares the analytic SRV-image speed and curvature with finite differences.
    PropCheck {
        /// Plane curve file; a built-in example when omitted.
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Example::Straightening)]
        example: Example,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 0.5)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
    },
    /// Distance matrix and one geodesic for storms from a HURDAT2 file.
    Hurricane {
        input: PathBuf,
        #[arg(long)]
        first_year: Option<i32>,
        #[arg(long)]
        last_year: Option<i32>,
        #[arg(long, default_value_t = 0)]
        min_category: u8,
        /// Fill missing winds instead of dropping those fixes.
        #[arg(long)]
        interpolate_missing: bool,
        /// Storm indices (after filtering) for the exported geodesic.
        #[arg(long, num_args = 1..=2, value_delimiter = ',')]
        pair: Option<Vec<usize>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Example {
    Straightening,
    Ellipse,
    Limacon,
    Spiral,
    Fourier,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Input { path: PathBuf, source: Error },
    #[error("{context}: {source}")]
    Compute { context: String, source: Error },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input { source, .. } | CliError::Compute { source, .. } if source.is_numerical() => 1,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn compute<T>(context: &str, r: crate::Result<T>) -> CliResult<T> {
    r.map_err(|source| CliError::Compute { context: context.to_string(), source })
}

/// Effective configuration echoed in every report.
#[derive(Debug, Serialize)]
struct RunConfig<'a> {
    subcommand: &'static str,
    inputs: Vec<String>,
    rotations: bool,
    reparam: bool,
    #[serde(flatten)]
    common: &'a Common,
    #[serde(flatten)]
    extra: Value,
}

impl Common {
    fn validate(&self) -> CliResult<()> {
        for (name, w) in [("mu", self.mu), ("nu", self.nu), ("lambda", self.lambda), ("lambda-w", self.lambda_w)] {
            if !(w > 0.0 && w.is_finite()) {
                return Err(CliError::Usage(format!("--{name} must be positive, got {w}")));
            }
        }
        if self.n.is_some_and(|n| n < 8) {
            return Err(CliError::Usage("--n must be at least 8".into()));
        }
        if self.steps < 2 {
            return Err(CliError::Usage("--steps must be at least 2".into()));
        }
        if self.shift_samples == 0 || self.circle_samples < 3 || self.s_samples < 2 {
            return Err(CliError::Usage("--shift-samples ≥ 1, --circle-samples ≥ 3, --s-samples ≥ 2".into()));
        }
        Ok(())
    }

    fn shape_options(&self) -> ShapeOptions {
        ShapeOptions {
            rotations: !self.no_rotations,
            reparametrizations: !self.no_reparam,
            shift_samples: self.shift_samples,
            ..Default::default()
        }
    }

    fn homo_options(&self, lambda: f64) -> HomoOptions {
        HomoOptions { lambda, reparametrize: !self.no_reparam, ..Default::default() }
    }

    fn surface_options(&self) -> SurfaceOptions {
        SurfaceOptions {
            weights: ChannelWeights { mu: self.mu, nu: self.nu, lambda: self.lambda },
            align: !self.no_reparam,
            circle_samples: self.circle_samples,
            s_samples: self.s_samples,
        }
    }

    fn config(&self, subcommand: &'static str, inputs: &[&Path], extra: Value) -> Value {
        let cfg = RunConfig {
            subcommand,
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            rotations: !self.no_rotations,
            reparam: !self.no_reparam,
            common: self,
            extra,
        };
        serde_json::to_value(cfg).expect("plain data serializes")
    }

    fn write(&self, name: &str, contents: &str) -> CliResult<()> {
        let path = self.out.join(name);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
        }
        std::fs::write(&path, contents).map_err(|source| CliError::Io { path, source })
    }
}

/// Parses nothing; runs an already parsed command line, honouring
/// `ELASTICA_THREADS`.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    cli.common.validate()?;
    let threads = match std::env::var("ELASTICA_THREADS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .ok()
                .filter(|&k| k > 0)
                .ok_or_else(|| CliError::Usage(format!("ELASTICA_THREADS must be a positive integer, got {v:?}")))?,
        ),
        Err(_) => None,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        builder = builder.num_threads(k);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let report = pool.install(|| dispatch(cli))?;
    let mut text = serde_json::to_string_pretty(&report).expect("plain data serializes");
    text.push('\n');
    cli.common.write("report.json", &text)?;
    stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
}

fn dispatch(cli: &Cli) -> CliResult<Value> {
    let c = &cli.common;
    match &cli.command {
        Command::Distance { first, second } => cmd_distance(c, first, second),
        Command::Geodesic { first, second } => cmd_geodesic(c, first, second),
        Command::Mesh { input } => cmd_mesh(c, input),
        Command::PropCheck { input, example, a, b, amplitude } => {
            cmd_prop_check(c, input.as_deref(), *example, *a, *b, *amplitude)
        }
        Command::Hurricane { input, first_year, last_year, min_category, interpolate_missing, pair } => {
            let years = first_year.unwrap_or(i32::MIN)..=last_year.unwrap_or(i32::MAX);
            cmd_hurricane(c, input, years, *min_category, *interpolate_missing, pair.as_deref())
        }
    }
}

fn resample(shape: Shape, n: usize) -> crate::Result<Shape> {
    Ok(match shape {
        Shape::Curve(c) => Shape::Curve(resample_uniform(&c, n)?),
        Shape::Srv(s) => Shape::Srv(srv_transform(&resample_uniform(&srv_inverse(&s), n)?)?),
        Shape::Sphere(g) => Shape::Sphere(resample_sphere(&g, n)?),
        Shape::Surface(SurfaceSpec::Tube(t)) => {
            Shape::Surface(SurfaceSpec::Tube(tube_decode(&resample_uniform(&tube_encode(&t, 1.0), n)?, 1.0)?))
        }
        Shape::Surface(SurfaceSpec::Ruled(r)) => {
            Shape::Surface(SurfaceSpec::Ruled(ruled_decode(&resample_uniform(&ruled_encode(&r, 1.0), n)?, 1.0)?.spec))
        }
        Shape::Surface(SurfaceSpec::Strip(s)) => {
            Shape::Surface(SurfaceSpec::Strip(StripSpec::decode(&resample_sphere(&s.encode(), n)?)?))
        }
    })
}

fn load(c: &Common, path: &Path) -> CliResult<Shape> {
    let input = |source| CliError::Input { path: path.to_path_buf(), source };
    let shape = io::read_shape(path, c.closed).map_err(input)?;
    match c.n {
        Some(n) => resample(shape, n).map_err(input),
        None => Ok(shape),
    }
}

fn to_srv(shape: &Shape, path: &Path) -> CliResult<SrvCurve> {
    match shape {
        Shape::Curve(c) => srv_transform(c).map_err(|source| CliError::Input { path: path.to_path_buf(), source }),
        Shape::Srv(s) => Ok(s.clone()),
        _ => unreachable!("only called on curves"),
    }
}

fn kind(shape: &Shape) -> &'static str {
    match shape {
        Shape::Curve(_) | Shape::Srv(_) => "curve",
        Shape::Sphere(_) => "sphere",
        Shape::Surface(s) => s.class(),
    }
}

fn mismatch(a: &Shape, b: &Shape) -> CliError {
    CliError::Usage(format!("cannot compare a {} with a {}", kind(a), kind(b)))
}

/// Second SRV aligned to the first, with the basepoint moved so that the
/// end of a geodesic is the aligned curve itself.
fn align_srv(c: &Common, s1: &SrvCurve, s2: &SrvCurve) -> CliResult<(Value, SrvCurve)> {
    let opts = c.shape_options();
    let al = compute("shape distance", shape_distance_srv(s1, s2, &opts))?;
    let aligned = compute("alignment", al.apply(s2))?;
    let base = srv_inverse(s2).point(al.shift).to_vec();
    let d = base.len();
    let base: Vec<f64> = (0..d).map(|r| (0..d).map(|k| al.rotation[(r, k)] * base[k]).sum()).collect();
    let aligned = compute("alignment", SrvCurve::new(aligned.dim(), aligned.is_closed(), aligned.q().to_vec(), base))?;
    let info = json!({
        "distance": al.distance,
        "rotation": al.rotation_rows(),
        "shift": al.shift,
        "warp": al.warp.values(),
        "iterations": al.iterations,
    });
    Ok((info, aligned))
}

fn cmd_distance(c: &Common, p1: &Path, p2: &Path) -> CliResult<Value> {
    let (a, b) = (load(c, p1)?, load(c, p2)?);
    let result = match (&a, &b) {
        (Shape::Curve(_) | Shape::Srv(_), Shape::Curve(_) | Shape::Srv(_)) => {
            let (s1, s2) = (to_srv(&a, p1)?, to_srv(&b, p2)?);
            let (mut info, _) = align_srv(c, &s1, &s2)?;
            info["kind"] = json!("curve");
            info["unaligned"] = json!(compute("L2 distance", l2_distance(&s1, &s2))?);
            info["norms"] = json!([s1.l2_norm(), s2.l2_norm()]);
            info
        }
        (Shape::Sphere(g1), Shape::Sphere(g2)) => {
            let al = compute("homogeneous distance", homo_distance(g1, g2, &c.homo_options(c.lambda)))?;
            json!({"kind": "sphere", "distance": al.distance, "theta": al.theta, "warp": al.warp.values(), "iterations": al.iterations})
        }
        (Shape::Surface(x), Shape::Surface(y)) => surface_distance(c, x, y).map_err(|e| match e {
            Error::ShapeMismatch(m) => CliError::Usage(m),
            source => CliError::Compute { context: "surface distance".into(), source },
        })?,
        _ => return Err(mismatch(&a, &b)),
    };
    Ok(json!({"config": c.config("distance", &[p1, p2], json!({})), "result": result}))
}

fn surface_distance(c: &Common, x: &SurfaceSpec, y: &SurfaceSpec) -> crate::Result<Value> {
    // rotations would mix the position and channel coordinates
    let opts = ShapeOptions { rotations: false, ..c.shape_options() };
    let flat = |e1: DiscreteCurve, e2: DiscreteCurve| -> crate::Result<Value> {
        let (s1, s2) = (srv_transform(&e1)?, srv_transform(&e2)?);
        let al = shape_distance_srv(&s1, &s2, &opts)?;
        Ok(json!({"distance": al.distance, "shift": al.shift, "warp": al.warp.values(), "iterations": al.iterations, "rotations_applied": false}))
    };
    let mut v = match (x, y) {
        (SurfaceSpec::Tube(a), SurfaceSpec::Tube(b)) => flat(tube_encode(a, c.mu), tube_encode(b, c.mu))?,
        (SurfaceSpec::Ruled(a), SurfaceSpec::Ruled(b)) => flat(ruled_encode(a, c.nu), ruled_encode(b, c.nu))?,
        (SurfaceSpec::Strip(a), SurfaceSpec::Strip(b)) => {
            let al = homo_distance(&a.encode(), &b.encode(), &c.homo_options(c.lambda))?;
            json!({"distance": al.distance, "theta": al.theta, "warp": al.warp.values(), "iterations": al.iterations})
        }
        _ => return Err(Error::ShapeMismatch(format!("cannot compare a {} with a {}", x.class(), y.class()))),
    };
    v["kind"] = json!(x.class());
    Ok(v)
}

fn step_name(k: usize, ext: &str) -> String {
    format!("step_{k:03}.{ext}")
}

fn cmd_geodesic(c: &Common, p1: &Path, p2: &Path) -> CliResult<Value> {
    let (a, b) = (load(c, p1)?, load(c, p2)?);
    let steps: Vec<Value> = match (&a, &b) {
        (Shape::Curve(_) | Shape::Srv(_), Shape::Curve(_) | Shape::Srv(_)) => {
            let (s1, s2) = (to_srv(&a, p1)?, to_srv(&b, p2)?);
            let s2 = if c.no_rotations && c.no_reparam { s2 } else { align_srv(c, &s1, &s2)?.1 };
            let path = compute("geodesic", srv_geodesic_between(&s1, &s2, c.steps))?;
            let length = compute("geodesic", path_length(&path))?;
            let mut out = Vec::new();
            for (k, st) in path.iter().enumerate() {
                c.write(&step_name(k, "json"), &io::curve_to_string(&st.curve))?;
                out.push(json!({"tau": st.tau, "immersed": st.immersed, "closure_gap": st.closure_gap}));
            }
            return Ok(json!({
                "config": c.config("geodesic", &[p1, p2], json!({})),
                "result": {"kind": "curve", "length": length, "steps": out},
            }));
        }
        (Shape::Sphere(g1), Shape::Sphere(g2)) => {
            let path = compute("homogeneous geodesic", homo_geodesic(g1, g2, c.steps, &c.homo_options(c.lambda)))?;
            let mut out = Vec::new();
            for (k, st) in path.iter().enumerate() {
                c.write(&step_name(k, "json"), &io::sphere_to_string(&st.curve, Some(json!({"tau": st.tau}))))?;
                out.push(json!({"tau": st.tau}));
            }
            out
        }
        (Shape::Surface(x), Shape::Surface(y)) => {
            let path = surface_geodesic(x, y, c.steps, &c.surface_options()).map_err(|e| match e {
                Error::ShapeMismatch(m) => CliError::Usage(m),
                source => CliError::Compute { context: "surface geodesic".into(), source },
            })?;
            let mut out = Vec::new();
            for (k, st) in path.iter().enumerate() {
                c.write(&step_name(k, "json"), &io::surface_to_string(&st.spec))?;
                c.write(&step_name(k, "obj"), &st.mesh.to_obj())?;
                out.push(json!({"tau": st.tau, "ruling_correction": st.ruling_correction}));
            }
            out
        }
        _ => return Err(mismatch(&a, &b)),
    };
    Ok(json!({
        "config": c.config("geodesic", &[p1, p2], json!({})),
        "result": {"kind": kind(&a), "steps": steps},
    }))
}

fn cmd_mesh(c: &Common, path: &Path) -> CliResult<Value> {
    let Shape::Surface(spec) = load(c, path)? else {
        return Err(CliError::Usage(format!("{}: not a surface file", path.display())));
    };
    let mesh = compute("mesh", surface_mesh(&spec, &c.surface_options()))?;
    c.write("mesh.obj", &mesh.to_obj())?;
    Ok(json!({
        "config": c.config("mesh", &[path], json!({})),
        "result": {"class": spec.class(), "vertices": mesh.vertices.len(), "faces": mesh.faces.len(), "valid": mesh.is_valid()},
    }))
}

fn max_abs<'a>(it: impl Iterator<Item = &'a f64>) -> f64 {
    it.fold(0.0, |m, x| m.max(x.abs()))
}

fn cmd_prop_check(c: &Common, input: Option<&Path>, example: Example, a: f64, b: f64, amp: f64) -> CliResult<Value> {
    let n = c.n.unwrap_or(4096);
    let (curve, extra) = match input {
        Some(p) => match load(c, p)? {
            Shape::Curve(k) if k.dim() == 2 => (k, json!({})),
            _ => return Err(CliError::Usage(format!("{}: prop-check needs a plane curve", p.display()))),
        },
        None => {
            let k = match example {
                Example::Straightening => straightening_curve(a, b, amp, n),
                Example::Ellipse => corpus::ellipse(1.0, 0.5, n),
                Example::Limacon => corpus::limacon(0.5, 1.0, n),
                Example::Spiral => corpus::spiral(0.5, 1.5, n),
                Example::Fourier => corpus::fourier_curve(c.seed, n),
            };
            let extra = match example {
                Example::Straightening => json!({"example": example, "a": a, "b": b, "amplitude": amp, "samples": n}),
                _ => json!({"example": example, "samples": n}),
            };
            (compute("example curve", k)?, extra)
        }
    };
    let geo = compute("plane geometry", PlaneGeometry::from_curve(&curve))?;
    let image = compute("SRV transform", srv_transform(&curve))?.image();
    let omega_num = speed(&image);
    let kappa_num = compute("SRV-image curvature", plane_curvature_masked(&image))?;
    let t = curve.parameters();

    let mut csv = csv::Writer::from_writer(Vec::new());
    let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
    let header = ["t", "omega", "kappa", "omega_tilde_analytic", "omega_tilde_numeric", "kappa_tilde_analytic", "kappa_tilde_numeric"];
    csv.write_record(header).expect("in-memory write");
    for i in 0..t.len() {
        csv.write_record([
            t[i].to_string(),
            geo.omega[i].to_string(),
            geo.kappa[i].to_string(),
            geo.omega_tilde[i].to_string(),
            omega_num[i].to_string(),
            opt(geo.kappa_tilde[i]),
            opt(kappa_num[i]),
        ])
        .expect("in-memory write");
    }
    let table = String::from_utf8(csv.into_inner().expect("in-memory write")).expect("ascii");
    c.write("prop_check.csv", &table)?;

    let omega_gap = max_abs(geo.omega_tilde.iter().zip(&omega_num).map(|(x, y)| x - y).collect::<Vec<_>>().iter());
    // the curvature comparison skips samples where the image nearly stalls
    let floor = 0.05 * geo.omega_tilde.iter().copied().fold(0.0, f64::max);
    let kappa_gap = max_abs(
        (0..t.len())
            .filter(|&i| geo.omega_tilde[i] > floor)
            .filter_map(|i| Some(geo.kappa_tilde[i]? - kappa_num[i]?))
            .collect::<Vec<_>>()
            .iter(),
    );
    let defined: Vec<f64> = kappa_num.iter().flatten().copied().collect();
    let mut summary = json!({
        "samples": t.len(),
        "closed": curve.is_closed(),
        "max_omega_tilde_gap": omega_gap,
        "max_kappa_tilde_gap": kappa_gap,
        "kappa_gap_speed_floor": floor,
        "max_abs_kappa_tilde_numeric": max_abs(defined.iter()),
        "max_abs_kappa_tilde_analytic": max_abs(geo.kappa_tilde.iter().flatten()),
        "undefined_kappa_tilde": kappa_num.iter().filter(|k| k.is_none()).count(),
        "srv_image_immersion_failures": geo.srv_immersion().offending.len(),
        "collinearity_residual": compute("collinearity", collinearity_residual(&image))?,
    });
    if curve.is_closed() {
        let total = compute("total curvature", total_curvature(&curve))?;
        summary["total_curvature"] = json!(total);
        summary["turning_number"] = json!((total / std::f64::consts::TAU).round() as i64);
    }
    Ok(json!({
        "config": c.config("prop-check", &input.into_iter().collect::<Vec<_>>(), extra),
        "result": summary,
    }))
}

fn cmd_hurricane(
    c: &Common,
    path: &Path,
    years: std::ops::RangeInclusive<i32>,
    min_category: u8,
    interpolate_missing: bool,
    pair: Option<&[usize]>,
) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let records = parse_hurdat2(&text).map_err(|source| CliError::Input { path: path.to_path_buf(), source })?;
    let opts = TrackOptions { n: c.n.unwrap_or(64), lambda_w: c.lambda_w, interpolate_missing };
    let mut storms: Vec<(&StormRecord, SphereCurve)> = Vec::new();
    let mut skipped = Vec::new();
    for s in filter_storms(&records, years.clone(), min_category) {
        match track_to_curve(s, &opts) {
            Ok(g) => storms.push((s, g)),
            Err(e) => skipped.push(json!({"id": s.id, "reason": e.to_string()})),
        }
    }
    // the wind channel already carries λ_w, so it enters the metric unscaled
    let hopts = c.homo_options(1.0);
    let k = storms.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let dists: Vec<crate::Result<f64>> =
        pairs.par_iter().map(|&(i, j)| homo_distance(&storms[i].1, &storms[j].1, &hopts).map(|a| a.distance)).collect();
    let mut matrix = vec![vec![0.0; k]; k];
    for (&(i, j), d) in pairs.iter().zip(dists) {
        let d = compute(&format!("distance {} vs {}", storms[i].0.id, storms[j].0.id), d)?;
        matrix[i][j] = d;
        matrix[j][i] = d;
    }

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(std::iter::once("id").chain(storms.iter().map(|s| s.0.id.as_str()))).expect("in-memory write");
    for (i, row) in matrix.iter().enumerate() {
        csv.write_record(std::iter::once(storms[i].0.id.clone()).chain(row.iter().map(f64::to_string)))
            .expect("in-memory write");
    }
    c.write("distances.csv", &String::from_utf8(csv.into_inner().expect("in-memory write")).expect("ascii"))?;

    let mut geodesic = Value::Null;
    let pair = match pair {
        Some(&[i, j]) => Some((i, j)),
        Some(_) => return Err(CliError::Usage("--pair takes two storm indices, e.g. --pair 0,2".into())),
        None => (k >= 2).then_some((0, 1)),
    };
    if let Some((i, j)) = pair {
        if i >= k || j >= k {
            return Err(CliError::Usage(format!("--pair {i},{j} out of range for {k} storms")));
        }
        let path = compute("storm geodesic", homo_geodesic(&storms[i].1, &storms[j].1, c.steps, &hopts))?;
        for (s, st) in path.iter().enumerate() {
            let meta = json!({"tau": st.tau, "from": storms[i].0.id, "to": storms[j].0.id});
            c.write(&format!("geodesic/{}", step_name(s, "json")), &io::sphere_to_string(&st.curve, Some(meta)))?;
        }
        geodesic = json!({"from": storms[i].0.id, "to": storms[j].0.id, "steps": path.len()});
    }
    let list: Vec<Value> = storms
        .iter()
        .map(|(s, _)| json!({"id": s.id, "name": s.name, "year": s.year(), "peak_wind": s.peak_wind()}))
        .collect();
    let extra = json!({
        "first_year": (*years.start() != i32::MIN).then_some(*years.start()),
        "last_year": (*years.end() != i32::MAX).then_some(*years.end()),
        "min_category": min_category,
        "interpolate_missing": interpolate_missing,
        "samples": opts.n,
    });
    Ok(json!({
        "config": c.config("hurricane", &[path], extra),
        "result": {"storms": list, "skipped": skipped, "matrix": matrix, "geodesic": geodesic},
    }))
}
