//! Command-line front end: surface files, reports and plots.
//!
//! Commands print a `key = value` report (see [`report`]) to standard output
//! or to the file given by `--report`. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | an asserted identity failed (`verify-gb`) |
//! | 2 | the command line or the surface file could not be parsed |
//! | 3 | evaluation failed (point outside the domain, degenerate chart, I/O) |
//! | 4 | `verify-gb` on a surface that is not closed |
//! | 5 | a genericity condition fails (`verify-gb`, `genericity`) |

pub mod report;
pub mod surface;
pub mod svg;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::atlas::Atlas;
use crate::gaussmap::Component;
use crate::integrate::IntegrateError;
use crate::invariants::{invariants_at, jacobian_by_pullback};
use crate::singular::{analyze_singular_set_tol, rank_scan, SingularAnalysis};
use crate::topology::{build_mesh, gauss_bonnet_report, sample_nodes, GBReport};
use report::{num, Report};
use surface::SurfaceFile;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    IdentityFailed = 1,
    Parse = 2,
    Domain = 3,
    NotClosedSurface = 4,
    GenericityViolation = 5,
}

/// Errors that end a command early.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    NotClosed(String),
}

impl CliError {
    /// Exit code for the error.
    pub fn code(&self) -> ExitCode {
        match self {
            CliError::Parse(_) => ExitCode::Parse,
            CliError::Domain(_) => ExitCode::Domain,
            CliError::NotClosed(_) => ExitCode::NotClosedSurface,
        }
    }
}

impl From<IntegrateError> for CliError {
    fn from(e: IntegrateError) -> Self {
        match e {
            IntegrateError::NotClosedSurface(_) => CliError::NotClosed(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

/// Differential geometry of the Gauss map of surfaces in R⁴.
#[derive(Debug, Parser)]
#[command(name = "r4gauss", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by all commands.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Surface file, or `@name` for a built-in surface (`@sphere`, `@example2`, ...).
    pub file: String,
    /// Grid resolution per chart (default: the file's `options.grid`).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Relative zero tolerance for `K ± K^N` (default: the file's `options.tol`).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Parameter override `name=value`; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    /// Write the report to this file instead of standard output.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// K, K^N, Δ, |H|² and the Jacobians of g₁, g₂ at a point or over the grid.
    Invariants {
        #[command(flatten)]
        common: Common,
        /// Evaluate at this parameter point `u,v` instead of the grid.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        /// Chart for `--at` (default: the first chart).
        #[arg(long)]
        chart: Option<String>,
    },
    /// Singular curves, folds and cusps of one Gauss map component.
    Singular {
        #[command(flatten)]
        common: Common,
        /// Gauss map component, 1 or 2.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=2))]
        component: u32,
        /// Write an SVG figure to this file.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Gauss–Bonnet type identities of a closed surface.
    VerifyGb {
        #[command(flatten)]
        common: Common,
    },
    /// Checks of the genericity conditions (G₁)–(G₃) and of the Gauss map rank.
    Genericity {
        #[command(flatten)]
        common: Common,
        /// Only this component (default: both).
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
        component: Option<u32>,
    },
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("invalid number in `{s}`"))?;
    Ok((k.trim().to_string(), v))
}

/// Loaded surface with effective settings.
struct Loaded {
    file: SurfaceFile,
    atlas: Atlas,
    grid: usize,
    tol: f64,
}

fn load(c: &Common) -> Result<Loaded, CliError> {
    let text = match c.file.strip_prefix('@') {
        Some(name) => crate::fixtures::get(name)
            .map(str::to_string)
            .ok_or_else(|| CliError::Parse(format!("no built-in surface `{name}`")))?,
        None => std::fs::read_to_string(&c.file)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", c.file)))?,
    };
    let mut file = SurfaceFile::parse(&text).map_err(|e| CliError::Parse(e.to_string()))?;
    file.set_params(&c.params).map_err(|e| CliError::Parse(e.to_string()))?;
    let atlas = file.atlas().map_err(|e| CliError::Parse(e.to_string()))?;
    let grid = c.grid.unwrap_or(file.options.grid);
    let tol = c.tol.unwrap_or(file.options.tol);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Parse(format!("tolerance must be positive, got {tol}")));
    }
    Ok(Loaded { file, atlas, grid, tol })
}

fn header(cmd: &str, c: &Common, l: &Loaded) -> Report {
    let mut r = Report::new(&format!("r4gauss {cmd} report"));
    r.comment(&format!("version {}", env!("CARGO_PKG_VERSION")));
    r.kv("command", cmd).kv("surface", &l.file.name).kv("source", &c.file);
    r.kv("grid", l.grid).real("tol", l.tol);
    for (k, v) in &l.file.params {
        r.real(&format!("param.{k}"), *v);
    }
    r
}

fn emit(c: &Common, r: &Report) -> Result<Option<String>, CliError> {
    match &c.report {
        Some(p) => {
            std::fs::write(p, r.text()).map_err(|e| CliError::Domain(format!("cannot write {}: {e}", p.display())))?;
            Ok(None)
        }
        None => Ok(Some(r.text().to_string())),
    }
}

/// Result of a command: exit code and text for standard output.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: ExitCode,
    pub stdout: String,
    pub stderr: String,
}

/// Runs a parsed command.
pub fn execute(cmd: &Command) -> Outcome {
    let result = match cmd {
        Command::Invariants { common, at, chart } => cmd_invariants(common, at.as_deref(), chart.as_deref()),
        Command::Singular { common, component, svg } => cmd_singular(common, *component, svg.as_ref()),
        Command::VerifyGb { common } => cmd_verify_gb(common),
        Command::Genericity { common, component } => cmd_genericity(common, *component),
    };
    match result {
        Ok((code, out)) => Outcome { code, stdout: out.unwrap_or_default(), stderr: String::new() },
        Err(e) => Outcome { code: e.code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

/// Parses arguments (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli.command),
        Err(e) => {
            let code = if e.use_stderr() { ExitCode::Parse } else { ExitCode::Success };
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            }
        }
    }
}

type CmdResult = Result<(ExitCode, Option<String>), CliError>;

fn parse_point(s: &str) -> Result<[f64; 2], CliError> {
    let bad = || CliError::Parse(format!("expected --at u,v, got `{s}`"));
    let (u, v) = s.split_once(',').ok_or_else(bad)?;
    Ok([u.trim().parse().map_err(|_| bad())?, v.trim().parse().map_err(|_| bad())?])
}

fn cmd_invariants(c: &Common, at: Option<&str>, chart: Option<&str>) -> CmdResult {
    let l = load(c)?;
    let mut r = header("invariants", c, &l);
    if let Some(at) = at {
        let uv = parse_point(at)?;
        let ci = match chart {
            Some(name) => l
                .atlas
                .chart_index(name)
                .ok_or_else(|| CliError::Parse(format!("no chart `{name}`")))?,
            None => 0,
        };
        let ch = &l.atlas.charts[ci];
        if !ch.contains(uv[0], uv[1]) {
            return Err(CliError::Domain(format!("({}, {}) is outside the domain of chart {}", uv[0], uv[1], ch.name)));
        }
        let dom = |e: crate::atlas::AtlasError| CliError::Domain(e.to_string());
        let inv = invariants_at(ch, uv[0], uv[1]).map_err(dom)?;
        let x = ch.eval_point(uv[0], uv[1]).map_err(dom)?;
        r.kv("mode", "point").kv("chart", &ch.name).reals("uv", &uv).reals("x", &x);
        r.real("K", inv.k).real("KN", inv.kn).real("Delta", inv.delta).real("H2", inv.h2);
        for comp in [Component::One, Component::Two] {
            let i = comp.index();
            r.real(&format!("J{i}"), inv.jacobian(comp));
            r.real(&format!("J{i}.pullback"), jacobian_by_pullback(ch, uv[0], uv[1], comp).map_err(dom)?);
        }
        return Ok((ExitCode::Success, emit(c, &r)?));
    }
    let mesh = build_mesh(&l.atlas, l.grid).map_err(|e| CliError::Domain(e.to_string()))?;
    let samples = sample_nodes(&l.atlas, &mesh);
    let good: Vec<_> = mesh
        .nodes
        .iter()
        .zip(&samples)
        .filter(|(n, s)| n.interior && s.k.is_finite())
        .map(|(_, s)| *s)
        .collect();
    let failed = mesh.nodes.iter().zip(&samples).filter(|(n, s)| n.interior && !s.k.is_finite()).count();
    r.kv("mode", "grid").kv("nodes", good.len()).kv("failed_nodes", failed);
    let fields: [(&str, fn(&crate::topology::NodeSample) -> f64); 6] = [
        ("K", |s| s.k),
        ("KN", |s| s.kn),
        ("Delta", |s| s.delta),
        ("H2", |s| s.h2),
        ("J1", |s| 0.5 * (s.k + s.kn)),
        ("J2", |s| 0.5 * (s.k - s.kn)),
    ];
    for (name, f) in fields {
        let vals: Vec<f64> = good.iter().map(f).collect();
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let amax = vals.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if vals.is_empty() {
            continue;
        }
        r.real(&format!("{name}.min"), min).real(&format!("{name}.max"), max).real(&format!("{name}.max_abs"), amax);
    }
    r.kv("Delta.negative_nodes", good.iter().filter(|s| s.delta < 0.0).count());
    Ok((ExitCode::Success, emit(c, &r)?))
}

fn write_analysis(r: &mut Report, l: &Loaded, a: &SingularAnalysis, points: bool) {
    let names = |ci: usize| l.atlas.charts[ci].name.clone();
    r.kv("component", a.component.index()).kv("curves", a.curves.len());
    for (k, curve) in a.curves.iter().enumerate() {
        let p = format!("curve.{k}");
        let mut charts: Vec<usize> = curve.points.iter().map(|q| q.chart).collect();
        charts.sort_unstable();
        charts.dedup();
        let ch: Vec<String> = charts.into_iter().map(names).collect();
        let analysed = curve.points.iter().filter(|q| q.data.is_some()).count();
        let folds = curve.points.iter().filter(|q| q.data.as_ref().is_some_and(|d| d.is_fold_by_kernel())).count();
        r.kv(&format!("{p}.points"), curve.points.len())
            .kv(&format!("{p}.closed"), curve.closed)
            .kv(&format!("{p}.charts"), ch.join(" "))
            .kv(&format!("{p}.analysed"), analysed)
            .kv(&format!("{p}.folds"), folds);
        if points {
            for (i, q) in curve.points.iter().enumerate() {
                let label = match &q.data {
                    _ if q.boundary => "boundary",
                    Some(d) if d.is_fold_by_kernel() => "fold",
                    Some(_) => "nonfold",
                    None => "unanalysed",
                };
                r.kv(&format!("{p}.point.{i}"), format!("{} {} {} {label}", names(q.chart), num(q.uv[0]), num(q.uv[1])));
            }
        }
    }
    let (sp, sm) = a.cusp_counts();
    r.kv("cusps", a.cusps.len()).kv("cusps.positive", sp).kv("cusps.negative", sm);
    for (k, c) in a.cusps.iter().enumerate() {
        let p = format!("cusp.{k}");
        r.kv(&p, format!("{} {} {} {:?}", names(c.chart), num(c.uv[0]), num(c.uv[1]), c.status));
        r.kv(&format!("{p}.sign"), c.sign).kv(&format!("{p}.normal_form_sign"), c.normal_form_sign);
        r.kv(&format!("{p}.sampled_sign"), c.sampled_sign.map_or("none".to_string(), |s| s.to_string()));
        r.reals(&format!("{p}.x"), &c.x).reals(&format!("{p}.kernel"), &c.kernel).reals(&format!("{p}.tangent"), &c.tangent);
        r.real(&format!("{p}.tangency"), c.tangency);
    }
    r.kv("unresolved", a.unresolved.len());
    for (k, u) in a.unresolved.iter().enumerate() {
        r.kv(&format!("unresolved.{k}"), format!("curve {} point {}: {}", u.curve, u.index, u.reason));
    }
    write_genericity(r, l, a);
}

/// Witness points of (G₃) listed individually in a report.
const MAX_WITNESSES: usize = 16;

fn write_genericity(r: &mut Report, l: &Loaded, a: &SingularAnalysis) {
    let i = a.component.index();
    let g1 = &a.g1;
    r.kv(&format!("g1.{i}.pass"), g1.pass).real(&format!("g1.{i}.min_gradient"), g1.min_gradient);
    r.kv(&format!("g1.{i}.gradient_vanishes"), g1.gradient_vanishes);
    r.kv(&format!("g1.{i}.identically_zero"), g1.identically_zero);
    r.kv(&format!("g1.{i}.critical_points"), g1.critical_points);
    if let Some((ci, uv)) = g1.witness {
        r.kv(&format!("g1.{i}.witness"), format!("{} {} {}", l.atlas.charts[ci].name, num(uv[0]), num(uv[1])));
    }
    let g2 = &a.g2;
    r.kv(&format!("g2.{i}.pass"), g2.pass).kv(&format!("g2.{i}.folds"), g2.folds);
    r.kv(&format!("g2.{i}.cusps"), g2.cusps).kv(&format!("g2.{i}.criterion_mismatches"), g2.criterion_mismatches);
    r.kv(&format!("g2.{i}.degenerate"), g2.degenerate).kv(&format!("g2.{i}.unresolved"), g2.unresolved);
    let g3 = &a.g3;
    r.kv(&format!("g3.{i}.pass"), g3.pass).kv(&format!("g3.{i}.crossings"), g3.crossings);
    r.real(&format!("g3.{i}.min_angle"), g3.min_angle);
    r.kv(&format!("g3.{i}.cusp_coincidences"), g3.cusp_coincidences).kv(&format!("g3.{i}.triple_points"), g3.triple_points);
    r.kv(&format!("g3.{i}.witnesses"), g3.witnesses.len());
    for (k, w) in g3.witnesses.iter().take(MAX_WITNESSES).enumerate() {
        r.reals(&format!("g3.{i}.witness.{k}"), w);
    }
}

fn cmd_singular(c: &Common, component: u32, svg_path: Option<&PathBuf>) -> CmdResult {
    let l = load(c)?;
    let comp = Component::from_index(component).expect("validated by the argument parser");
    let mesh = build_mesh(&l.atlas, l.grid).map_err(|e| CliError::Domain(e.to_string()))?;
    let samples = sample_nodes(&l.atlas, &mesh);
    let a = analyze_singular_set_tol(&l.atlas, &mesh, &samples, comp, l.tol);
    let mut r = header("singular", c, &l);
    write_analysis(&mut r, &l, &a, true);
    if let Some(p) = svg_path {
        std::fs::write(p, svg::singular_figure(&l.atlas, &a))
            .map_err(|e| CliError::Domain(format!("cannot write {}: {e}", p.display())))?;
        r.kv("svg", p.display());
    }
    Ok((ExitCode::Success, emit(c, &r)?))
}

fn cmd_genericity(c: &Common, component: Option<u32>) -> CmdResult {
    let l = load(c)?;
    let mesh = build_mesh(&l.atlas, l.grid).map_err(|e| CliError::Domain(e.to_string()))?;
    let samples = sample_nodes(&l.atlas, &mesh);
    let comps: Vec<Component> = match component {
        Some(i) => vec![Component::from_index(i).expect("validated by the argument parser")],
        None => vec![Component::One, Component::Two],
    };
    let mut r = header("genericity", c, &l);
    let mut pass = true;
    for comp in comps {
        let a = analyze_singular_set_tol(&l.atlas, &mesh, &samples, comp, l.tol);
        pass &= a.g1.pass && a.g2.pass && a.g3.pass;
        write_genericity(&mut r, &l, &a);
    }
    let rs = rank_scan(&mesh, &samples);
    r.kv("rank.nodes", rs.nodes).kv("rank.deficient", rs.rank_deficient.len());
    r.kv("rank.characterization_mismatches", rs.characterization_mismatches);
    r.real("rank.min_k_delta", rs.min_k_delta);
    if let Some((ci, uv)) = rs.min_location {
        r.kv("rank.min_location", format!("{} {} {}", l.atlas.charts[ci].name, num(uv[0]), num(uv[1])));
    }
    for (k, (ci, uv, kk, d)) in rs.rank_deficient.iter().take(20).enumerate() {
        r.kv(
            &format!("rank.deficient.{k}"),
            format!("{} {} {} K {} Delta {}", l.atlas.charts[*ci].name, num(uv[0]), num(uv[1]), num(*kk), num(*d)),
        );
    }
    r.kv("pass", pass);
    let code = if pass { ExitCode::Success } else { ExitCode::GenericityViolation };
    Ok((code, emit(c, &r)?))
}

fn write_gb(r: &mut Report, l: &Loaded, gb: &GBReport) {
    use crate::integrate::Field;
    r.kv("chi_M", gb.chi_m).kv("generic", gb.generic);
    for (field, q) in &gb.integrals.results {
        let key = match field {
            Field::Area => "integral.area".to_string(),
            Field::K => "integral.K".to_string(),
            Field::KN => "integral.KN".to_string(),
            Field::AbsSingular(c) => format!("integral.abs_singular.{}", c.index()),
            Field::Jacobian(c) => format!("integral.J.{}", c.index()),
        };
        r.real(&key, q.value).real(&format!("{key}.error"), q.estimated_error).kv(&format!("{key}.converged"), q.converged);
    }
    for t in &gb.components {
        let i = t.component.index();
        r.kv(&format!("chi_plus.{i}"), t.chi_plus).kv(&format!("chi_minus.{i}"), t.chi_minus);
        r.kv(&format!("cusps_plus.{i}"), t.s_plus).kv(&format!("cusps_minus.{i}"), t.s_minus);
        r.real(&format!("deg.{i}.value"), t.degree.value.value).kv(&format!("deg.{i}"), t.degree.rounded);
        r.kv(&format!("curves.{i}"), t.curves);
        r.kv(&format!("g1.{i}.pass"), t.g1).kv(&format!("g2.{i}.pass"), t.g2).kv(&format!("g3.{i}.pass"), t.g3);
        let kg = &t.kg;
        r.real(&format!("kg.{i}"), kg.value.value).real(&format!("kg.{i}.error"), kg.value.estimated_error);
        r.kv(&format!("kg.{i}.converged"), kg.value.converged).real(&format!("kg.{i}.raw"), kg.raw);
        r.real(&format!("kg.{i}.epsilon"), kg.epsilon).reals(&format!("kg.{i}.shells"), &kg.shells);
        r.kv(&format!("kg.{i}.skipped_points"), kg.skipped);
    }
    for id in &gb.identities {
        let p = format!("identity.{}", id.name);
        let status = if !id.asserted { "skipped" } else if id.holds() { "pass" } else { "fail" };
        r.kv(&p, status).real(&format!("{p}.lhs"), id.lhs).real(&format!("{p}.rhs"), id.rhs);
        r.real(&format!("{p}.residual"), id.residual()).real(&format!("{p}.tolerance"), id.tolerance);
        if let Some(n) = &id.note {
            r.kv(&format!("{p}.note"), n);
        }
    }
    if !l.file.expect.is_empty() {
        r.comment("reference values from the surface file, compared with the computed ones");
        for (key, &want) in &l.file.expect {
            r.real(&format!("expect.{key}"), want);
            let computed: Vec<(String, f64)> = match key.as_str() {
                "chi_M" => vec![(String::new(), gb.chi_m as f64)],
                "deg" => gb.components.iter().map(|t| (format!(".{}", t.component.index()), t.degree.rounded as f64)).collect(),
                "chi_plus" => gb.components.iter().map(|t| (format!(".{}", t.component.index()), t.chi_plus as f64)).collect(),
                "chi_minus" => gb.components.iter().map(|t| (format!(".{}", t.component.index()), t.chi_minus as f64)).collect(),
                "cusps" => gb
                    .components
                    .iter()
                    .map(|t| (format!(".{}", t.component.index()), (t.s_plus + t.s_minus) as f64))
                    .collect(),
                _ => Vec::new(),
            };
            for (suffix, got) in computed {
                let verdict = if got == want { "match" } else { "discrepancy" };
                r.kv(&format!("compare.{key}{suffix}"), format!("{verdict} computed {} expected {}", num(got), num(want)));
            }
        }
    }
    r.kv("pass", gb.pass());
}

fn cmd_verify_gb(c: &Common) -> CmdResult {
    let l = load(c)?;
    let open = l.atlas.unglued_edges();
    if !open.is_empty() {
        return Err(CliError::NotClosed(format!(
            "surface `{}` is not closed: {} boundary edge(s) are not glued",
            l.file.name,
            open.len()
        )));
    }
    let gb = gauss_bonnet_report(&l.atlas, l.grid, l.tol)?;
    let mut r = header("verify-gb", c, &l);
    write_gb(&mut r, &l, &gb);
    let code = if !gb.generic {
        ExitCode::GenericityViolation
    } else if !gb.pass() {
        ExitCode::IdentityFailed
    } else {
        ExitCode::Success
    };
    Ok((code, emit(c, &r)?))
}
