//! Command-line surface for the plate eigenvalue laboratory: compute
//! spectra, run the shape-derivative verification commands, and sweep
//! eigenvalue branches, emitting deterministic JSON or CSV.

use clap::{Args, Parser, Subcommand};
use plate_lab::forms::{BoundaryProblem, PlateParams, ProblemKind, QuadSpec};
use plate_lab::geometry::{deformation, NormalPerturbation, StarChart};
use plate_lab::poly::{Poly2, PolynomialField};
use plate_lab::reference_spectra::{
    cluster, disk_spectrum, rectangle_navier_spectrum, EigenCluster,
};
use plate_lab::ritz::{ritz_spectrum, RitzBasis};
use plate_lab::shape_calculus::{
    criticality_residual, fd_eigen_derivative, hadamard_derivative, lemma_check,
    radiality_profiles, LemmaKind,
};
use plate_lab::{PlateError, Result};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_INVALID_CONFIG: u8 = 2;
const EXIT_SOLVER_FAILURE: u8 = 3;
const EXIT_ASSERT_BREACH: u8 = 4;

#[derive(Parser)]
#[command(name = "plate-lab", version, about = "eigenvalues of the plate operator Δ²−τΔ and their shape derivatives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an eigenvalue spectrum (clusters with multiplicities).
    Spectrum(SpectrumArgs),
    /// Hadamard derivative of Λ_{F,s} vs its finite-difference oracle.
    Hadamard(HadamardArgs),
    /// Boundary constancy residual of the shape-gradient density ΣG.
    Criticality(CriticalityArgs),
    /// Angular variation of the eigenspace sums at selected radii.
    Radiality(RadialityArgs),
    /// Check one differentiation identity on a polynomial preset.
    Lemma(LemmaArgs),
    /// Sweep the rectangle stretch family and tabulate branches.
    Branches(BranchesArgs),
}

/// Shared problem/domain/solver configuration, overridable by a JSON
/// config file via `--config`.
#[derive(Args, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields, default)]
struct RunConfig {
    /// dirichlet | navier | neumann | steklov-ks | steklov-bp
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Disk of the given radius.
    #[arg(long)]
    disk: Option<f64>,
    /// Rectangle side lengths (Navier closed form only).
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    rectangle: Option<Vec<f64>>,
    /// Star-shaped chart as a JSON file {base_radius, cos_coeffs, sin_coeffs}.
    #[arg(long)]
    chart_file: Option<PathBuf>,
    /// bessel | ritz
    #[arg(long)]
    solver: Option<String>,
    /// Ritz basis degree.
    #[arg(long)]
    degree: Option<u32>,
    /// Number of eigenvalues to compute.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    n_radial: Option<usize>,
    #[arg(long)]
    n_angular: Option<usize>,
    #[arg(long)]
    n_boundary: Option<usize>,
    /// json | csv
    #[arg(long)]
    format: Option<String>,
    #[serde(skip)]
    #[arg(long)]
    config: Option<PathBuf>,
    #[serde(skip)]
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    config: RunConfig,
}

#[derive(Args)]
struct HadamardArgs {
    #[command(flatten)]
    config: RunConfig,
    /// 1-based cluster index.
    #[arg(long, default_value_t = 1)]
    cluster: usize,
    /// Order of the elementary symmetric function.
    #[arg(long, default_value_t = 1)]
    s: usize,
    /// dilation | cos:M[:AMP] | sin:M[:AMP]
    #[arg(long, default_value = "dilation")]
    perturbation: String,
    /// Comma-separated FD steps, strictly decreasing.
    #[arg(long, default_value = "1e-3,5e-4")]
    steps: String,
    #[arg(long)]
    assert: bool,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
}

#[derive(Args)]
struct CriticalityArgs {
    #[command(flatten)]
    config: RunConfig,
    #[arg(long, default_value_t = 1)]
    cluster: usize,
    #[arg(long)]
    assert: bool,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args)]
struct RadialityArgs {
    #[command(flatten)]
    config: RunConfig,
    #[arg(long, default_value_t = 1)]
    cluster: usize,
    /// Comma-separated radii.
    #[arg(long, default_value = "0.25,0.5,0.75,1.0")]
    radii: String,
    #[arg(long, default_value_t = 128)]
    grid: usize,
    #[arg(long)]
    assert: bool,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args)]
struct LemmaArgs {
    /// dM | dB | dL | dDet | dJ1 | dJ2 | dJ3
    #[arg(long)]
    which: String,
    /// Preset number 1..=5.
    #[arg(long, default_value_t = 1)]
    preset: usize,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    assert: bool,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
}

#[derive(Args)]
struct BranchesArgs {
    /// Stretch sweep: S_MIN S_MAX N_POINTS over (e^s, e^-s) rectangles.
    #[arg(long, num_args = 3, value_names = ["S_MIN", "S_MAX", "N"], required = true, allow_negative_numbers = true)]
    rectangle_stretch: Vec<f64>,
    /// 1-based eigenvalue index pair, e.g. 2,3.
    #[arg(long, default_value = "2,3")]
    pair: String,
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// 17-significant-digit float formatting; deterministic across runs.
fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_out(path: Option<&Path>, payload: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, payload),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID_CONFIG,
        message: msg.into(),
    }
}

fn from_error(e: PlateError) -> Failure {
    let code = match e {
        PlateError::InvalidParams(_) => EXIT_INVALID_CONFIG,
        _ => EXIT_SOLVER_FAILURE,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn breach(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_ASSERT_BREACH,
        message: msg.into(),
    }
}

enum Domain {
    Disk(f64),
    Chart(StarChart),
    Rectangle(f64, f64),
}

struct Resolved {
    kind: ProblemKind,
    params: PlateParams,
    domain: Domain,
    solver: String,
    degree: u32,
    count: usize,
    quad: QuadSpec,
    format: String,
    output: Option<PathBuf>,
}

fn merge(cli: RunConfig) -> std::result::Result<RunConfig, Failure> {
    let Some(path) = &cli.config else {
        return Ok(cli);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
    let mut base: RunConfig = serde_json::from_str(&text)
        .map_err(|e| invalid(format!("invalid config {}: {e}", path.display())))?;
    // command-line flags override file values
    macro_rules! over {
        ($($f:ident),*) => { $( if cli.$f.is_some() { base.$f = cli.$f.clone(); } )* };
    }
    over!(problem, tau, sigma, disk, rectangle, chart_file, solver, degree, count, n_radial, n_angular, n_boundary, format);
    base.config = cli.config;
    base.output = cli.output;
    Ok(base)
}

fn resolve(cli: RunConfig) -> std::result::Result<Resolved, Failure> {
    let cfg = merge(cli)?;
    let kind = match cfg.problem.as_deref() {
        Some("dirichlet") => ProblemKind::Dirichlet,
        Some("navier") => ProblemKind::Navier,
        Some("neumann") => ProblemKind::Neumann,
        Some("steklov-ks") => ProblemKind::SteklovKS,
        Some("steklov-bp") => ProblemKind::SteklovBP,
        Some(other) => return Err(invalid(format!("unknown problem '{other}'"))),
        None => return Err(invalid("missing --problem")),
    };
    let params = PlateParams::new(cfg.sigma.unwrap_or(0.3), cfg.tau.unwrap_or(0.0));
    params.validate(kind).map_err(from_error)?;

    let mut domains = 0;
    let mut domain = Domain::Disk(1.0);
    if let Some(r) = cfg.disk {
        if r <= 0.0 {
            return Err(invalid("disk radius must be positive"));
        }
        domain = Domain::Disk(r);
        domains += 1;
    }
    if let Some(sides) = &cfg.rectangle {
        if sides.len() != 2 || sides.iter().any(|&v| v <= 0.0) {
            return Err(invalid("rectangle needs two positive side lengths"));
        }
        domain = Domain::Rectangle(sides[0], sides[1]);
        domains += 1;
    }
    if let Some(path) = &cfg.chart_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read chart {}: {e}", path.display())))?;
        let chart: StarChart = serde_json::from_str(&text)
            .map_err(|e| invalid(format!("invalid chart {}: {e}", path.display())))?;
        chart.validate().map_err(from_error)?;
        domain = Domain::Chart(chart);
        domains += 1;
    }
    if domains > 1 {
        return Err(invalid("give exactly one of --disk, --rectangle, --chart-file"));
    }

    let solver = cfg.solver.unwrap_or_else(|| "bessel".into());
    if solver != "bessel" && solver != "ritz" {
        return Err(invalid(format!("unknown solver '{solver}'")));
    }
    let format = cfg.format.unwrap_or_else(|| "json".into());
    if format != "json" && format != "csv" {
        return Err(invalid(format!("unknown format '{format}'")));
    }
    let quad = QuadSpec {
        n_radial: cfg.n_radial.unwrap_or(48),
        n_angular: cfg.n_angular.unwrap_or(128),
        n_boundary: cfg.n_boundary.unwrap_or(256),
    };
    quad.validate().map_err(from_error)?;
    Ok(Resolved {
        kind,
        params,
        domain,
        solver,
        degree: cfg.degree.unwrap_or(12),
        count: cfg.count.unwrap_or(5),
        quad,
        format,
        output: cfg.output,
    })
}

fn problem_name(kind: ProblemKind) -> &'static str {
    match kind {
        ProblemKind::Dirichlet => "dirichlet",
        ProblemKind::Navier => "navier",
        ProblemKind::Neumann => "neumann",
        ProblemKind::SteklovKS => "steklov-ks",
        ProblemKind::SteklovBP => "steklov-bp",
    }
}

fn domain_json(domain: &Domain) -> String {
    match domain {
        Domain::Disk(r) => format!("{{\"shape\":\"disk\",\"radius\":{}}}", fmt_num(*r)),
        Domain::Rectangle(a, b) => format!(
            "{{\"shape\":\"rectangle\",\"a\":{},\"b\":{}}}",
            fmt_num(*a),
            fmt_num(*b)
        ),
        Domain::Chart(c) => {
            let coeffs = |v: &[f64]| {
                v.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(",")
            };
            format!(
                "{{\"shape\":\"chart\",\"base_radius\":{},\"cos_coeffs\":[{}],\"sin_coeffs\":[{}]}}",
                fmt_num(c.base_radius),
                coeffs(&c.cos_coeffs),
                coeffs(&c.sin_coeffs)
            )
        }
    }
}

fn header_json(command: &str, r: &Resolved) -> String {
    format!(
        "\"schema\":1,\"command\":\"{command}\",\"problem\":\"{}\",\"tau\":{},\"sigma\":{},\"domain\":{},\"solver\":\"{}\"",
        problem_name(r.kind),
        fmt_num(r.params.tau),
        fmt_num(r.params.sigma),
        domain_json(&r.domain),
        r.solver
    )
}

/// Cluster list `(first_index, lambda, multiplicity)` for output.
fn cluster_rows<M>(clusters: &[EigenCluster<M>]) -> Vec<(usize, f64, usize)> {
    clusters
        .iter()
        .map(|c| (c.indices[0], c.lambda, c.members.len()))
        .collect()
}

fn solve_clusters(r: &Resolved) -> std::result::Result<Vec<(usize, f64, usize)>, Failure> {
    match &r.domain {
        Domain::Rectangle(a, b) => {
            if r.kind != ProblemKind::Navier {
                return Err(invalid("rectangle spectra are available for --problem navier only"));
            }
            let eigs = rectangle_navier_spectrum(*a, *b, r.params.tau, r.count)
                .map_err(from_error)?;
            let lambdas: Vec<f64> = eigs.iter().map(|&(l, _, _)| l).collect();
            let groups = cluster(&lambdas, 1e-9);
            Ok(groups
                .iter()
                .map(|g| (g[0] + 1, lambdas[g[0]], g.len()))
                .collect())
        }
        Domain::Disk(radius) if r.solver == "bessel" => {
            let clusters = disk_spectrum(
                &r.params,
                &BoundaryProblem::new(r.kind),
                *radius,
                10,
                r.count,
                &r.quad,
            )
            .map_err(from_error)?;
            Ok(cluster_rows(&clusters))
        }
        Domain::Disk(radius) => {
            let chart = StarChart::disk(*radius);
            ritz_clusters(r, &chart)
        }
        Domain::Chart(chart) => {
            if r.solver == "bessel" {
                return Err(invalid("--solver bessel requires a disk domain"));
            }
            ritz_clusters(r, chart)
        }
    }
}

fn ritz_clusters(
    r: &Resolved,
    chart: &StarChart,
) -> std::result::Result<Vec<(usize, f64, usize)>, Failure> {
    let problem = BoundaryProblem::new(r.kind);
    let basis = RitzBasis::for_problem(chart, &problem, r.degree);
    let clusters = ritz_spectrum(chart, &r.params, &problem, &basis, &r.quad, r.count)
        .map_err(from_error)?;
    Ok(cluster_rows(&clusters))
}

fn cmd_spectrum(args: SpectrumArgs) -> std::result::Result<(), Failure> {
    let r = resolve(args.config)?;
    let rows = solve_clusters(&r)?;
    let payload = if r.format == "csv" {
        let mut s = String::from("index,lambda,multiplicity\n");
        for (i, l, m) in &rows {
            s.push_str(&format!("{i},{},{m}\n", fmt_num(*l)));
        }
        s
    } else {
        let body: Vec<String> = rows
            .iter()
            .map(|(i, l, m)| {
                format!(
                    "{{\"index\":{i},\"lambda\":{},\"multiplicity\":{m}}}",
                    fmt_num(*l)
                )
            })
            .collect();
        format!(
            "{{{},\"clusters\":[{}]}}\n",
            header_json("spectrum", &r),
            body.join(",")
        )
    };
    write_out(r.output.as_deref(), &payload)
        .map_err(|e| Failure { code: EXIT_SOLVER_FAILURE, message: e.to_string() })
}

fn parse_perturbation(text: &str) -> std::result::Result<NormalPerturbation, Failure> {
    if text == "dilation" {
        return Ok(NormalPerturbation::constant(1.0));
    }
    let parts: Vec<&str> = text.split(':').collect();
    let amp = if parts.len() == 3 {
        parts[2]
            .parse::<f64>()
            .map_err(|_| invalid(format!("bad amplitude in '{text}'")))?
    } else if parts.len() == 2 {
        1.0
    } else {
        return Err(invalid(format!(
            "perturbation '{text}' is not dilation | cos:M[:AMP] | sin:M[:AMP]"
        )));
    };
    let m: usize = parts[1]
        .parse()
        .map_err(|_| invalid(format!("bad mode number in '{text}'")))?;
    match parts[0] {
        "cos" => Ok(NormalPerturbation::cosine(m, amp)),
        "sin" => Ok(NormalPerturbation::sine(m, amp)),
        other => Err(invalid(format!("unknown perturbation family '{other}'"))),
    }
}

fn cmd_hadamard(args: HadamardArgs) -> std::result::Result<(), Failure> {
    let r = resolve(args.config)?;
    let Domain::Disk(radius) = r.domain else {
        return Err(invalid("hadamard requires a disk domain (--disk R)"));
    };
    let f = parse_perturbation(&args.perturbation)?;
    let steps: Vec<f64> = args
        .steps
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| invalid(format!("bad --steps '{}'", args.steps)))?;
    if args.cluster == 0 {
        return Err(invalid("--cluster is 1-based"));
    }

    let problem = BoundaryProblem::new(r.kind);
    let clusters = disk_spectrum(
        &r.params,
        &problem,
        radius,
        10,
        r.count.max(args.cluster * 3),
        &r.quad,
    )
    .map_err(from_error)?;
    if clusters.len() < args.cluster {
        return Err(invalid(format!(
            "only {} clusters available, requested cluster {}",
            clusters.len(),
            args.cluster
        )));
    }
    let cl = &clusters[args.cluster - 1];
    let size = cl.members.len();
    if args.s < 1 || args.s > size {
        return Err(invalid(format!("--s must lie in 1..={size}")));
    }
    let formula = hadamard_derivative(&problem, &r.params, &StarChart::disk(radius), cl, args.s, &f, &r.quad)
        .map_err(from_error)?;

    let start = cl.indices[0] - 1;
    let need = start + size + 2;
    let is_dilation = f.cos_coeffs.is_empty() && f.sin_coeffs.is_empty();
    let fd = if is_dilation && r.solver == "bessel" {
        let eigs_at = |t: f64| -> Result<Vec<f64>> {
            let cls = disk_spectrum(&r.params, &problem, radius * (1.0 + t / radius), 10, need, &r.quad)?;
            Ok(flatten(&cls))
        };
        fd_eigen_derivative(&eigs_at, start, size, args.s, &steps)
    } else {
        let disk = StarChart::disk(radius);
        let eigs_at = |t: f64| -> Result<Vec<f64>> {
            let chart = deformation(&disk, &f, t)?;
            let basis = RitzBasis::for_problem(&chart, &problem, r.degree);
            let cls = ritz_spectrum(&chart, &r.params, &problem, &basis, &r.quad, need)?;
            Ok(flatten(&cls))
        };
        fd_eigen_derivative(&eigs_at, start, size, args.s, &steps)
    }
    .map_err(from_error)?;

    let scale = fd.abs().max(formula.abs()).max(1e-6 * cl.lambda.abs()).max(1e-300);
    let rel_err = (fd - formula).abs() / scale;
    let payload = format!(
        "{{{},\"cluster\":{},\"lambda\":{},\"multiplicity\":{},\"s\":{},\"perturbation\":\"{}\",\"formula\":{},\"fd\":{},\"rel_err\":{}}}\n",
        header_json("hadamard", &r),
        args.cluster,
        fmt_num(cl.lambda),
        size,
        args.s,
        args.perturbation,
        fmt_num(formula),
        fmt_num(fd),
        fmt_num(rel_err)
    );
    write_out(r.output.as_deref(), &payload)
        .map_err(|e| Failure { code: EXIT_SOLVER_FAILURE, message: e.to_string() })?;
    if args.assert && rel_err > args.tol {
        return Err(breach(format!("rel_err {rel_err:e} exceeds tol {:e}", args.tol)));
    }
    Ok(())
}

fn flatten<M>(clusters: &[EigenCluster<M>]) -> Vec<f64> {
    clusters
        .iter()
        .flat_map(|c| c.indices.iter().map(move |_| c.lambda))
        .collect()
}

fn disk_cluster_for(
    r: &Resolved,
    radius: f64,
    index: usize,
) -> std::result::Result<EigenCluster<plate_lab::reference_spectra::DiskMode>, Failure> {
    if index == 0 {
        return Err(invalid("--cluster is 1-based"));
    }
    let clusters = disk_spectrum(
        &r.params,
        &BoundaryProblem::new(r.kind),
        radius,
        10,
        r.count.max(index * 3),
        &r.quad,
    )
    .map_err(from_error)?;
    clusters
        .get(index - 1)
        .cloned()
        .ok_or_else(|| invalid(format!("only {} clusters available", clusters.len())))
}

fn cmd_criticality(args: CriticalityArgs) -> std::result::Result<(), Failure> {
    let r = resolve(args.config)?;
    let Domain::Disk(radius) = r.domain else {
        return Err(invalid("criticality requires a disk domain (--disk R)"));
    };
    let cl = disk_cluster_for(&r, radius, args.cluster)?;
    let report = criticality_residual(
        &BoundaryProblem::new(r.kind),
        &r.params,
        &StarChart::disk(radius),
        &cl,
        &r.quad,
    )
    .map_err(from_error)?;
    let payload = format!(
        "{{{},\"cluster\":{},\"lambda\":{},\"multiplicity\":{},\"c_mean\":{},\"max_abs_dev\":{},\"rel_residual\":{}}}\n",
        header_json("criticality", &r),
        args.cluster,
        fmt_num(cl.lambda),
        cl.members.len(),
        fmt_num(report.c_mean),
        fmt_num(report.max_abs_dev),
        fmt_num(report.rel_residual)
    );
    write_out(r.output.as_deref(), &payload)
        .map_err(|e| Failure { code: EXIT_SOLVER_FAILURE, message: e.to_string() })?;
    if args.assert && report.rel_residual > args.tol {
        return Err(breach(format!(
            "rel_residual {:e} exceeds tol {:e}",
            report.rel_residual, args.tol
        )));
    }
    Ok(())
}

fn cmd_radiality(args: RadialityArgs) -> std::result::Result<(), Failure> {
    let r = resolve(args.config)?;
    let Domain::Disk(radius) = r.domain else {
        return Err(invalid("radiality requires a disk domain (--disk R)"));
    };
    let radii: Vec<f64> = args
        .radii
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| invalid(format!("bad --radii '{}'", args.radii)))?;
    if args.grid < 8 {
        return Err(invalid("--grid must be at least 8"));
    }
    let cl = disk_cluster_for(&r, radius, args.cluster)?;
    let report = radiality_profiles(&cl, &radii, args.grid);
    let max_variation = report
        .variation
        .iter()
        .flatten()
        .fold(0.0_f64, |a, &v| a.max(v));
    let rows: Vec<String> = report
        .radii
        .iter()
        .zip(&report.variation)
        .map(|(rad, row)| {
            format!(
                "{{\"radius\":{},\"value\":{},\"gradient\":{},\"laplacian\":{},\"hessian\":{}}}",
                fmt_num(*rad),
                fmt_num(row[0]),
                fmt_num(row[1]),
                fmt_num(row[2]),
                fmt_num(row[3])
            )
        })
        .collect();
    let payload = format!(
        "{{{},\"cluster\":{},\"lambda\":{},\"multiplicity\":{},\"variation\":[{}],\"max_variation\":{}}}\n",
        header_json("radiality", &r),
        args.cluster,
        fmt_num(cl.lambda),
        cl.members.len(),
        rows.join(","),
        fmt_num(max_variation)
    );
    write_out(r.output.as_deref(), &payload)
        .map_err(|e| Failure { code: EXIT_SOLVER_FAILURE, message: e.to_string() })?;
    if args.assert && max_variation > args.tol {
        return Err(breach(format!(
            "max variation {max_variation:e} exceeds tol {:e}",
            args.tol
        )));
    }
    Ok(())
}

/// Polynomial presets shared with the verification suite: five generic
/// triples, and five boundary-vanishing triples for the pinned dJ2
/// identity.
fn lemma_preset(
    lemma: LemmaKind,
    preset: usize,
) -> std::result::Result<(StarChart, Poly2, Poly2, PolynomialField), Failure> {
    if !(1..=5).contains(&preset) {
        return Err(invalid("--preset must lie in 1..=5"));
    }
    let generic1 = PolynomialField::new(
        Poly2::from_terms(&[(2, 0, 1.0), (1, 0, 0.4), (0, 1, -0.5)]),
        Poly2::from_terms(&[(1, 1, 1.0), (0, 0, 0.3)]),
    );
    if lemma == LemmaKind::DJ2 {
        let w = Poly2::constant(1.0).sub(&Poly2::from_terms(&[(2, 0, 1.0), (0, 2, 1.0)]));
        let disk = StarChart::disk(1.0);
        let (u1, u2, psi) = match preset {
            1 => (w.mul(&Poly2::x()), w.clone(), generic1),
            2 => (w.clone(), w.clone(), PolynomialField::identity()),
            3 => (
                w.mul(&Poly2::y()),
                w.mul(&Poly2::x()),
                PolynomialField::new(
                    Poly2::from_terms(&[(0, 2, 1.0), (0, 0, 0.5)]),
                    Poly2::from_terms(&[(1, 1, 1.0), (1, 0, 0.2)]),
                ),
            ),
            4 => (
                w.mul(&Poly2::x().add(&Poly2::y())),
                w.mul(&Poly2::from_terms(&[(1, 1, 1.0), (0, 0, 0.5)])),
                PolynomialField::new(
                    Poly2::from_terms(&[(2, 0, 1.0), (0, 0, 0.3)]),
                    Poly2::from_terms(&[(0, 2, 1.0), (1, 0, -0.4)]),
                ),
            ),
            _ => (
                w.mul(&Poly2::from_terms(&[(2, 0, 1.0), (0, 0, 0.3)])),
                w.mul(&Poly2::y()),
                PolynomialField::new(
                    Poly2::from_terms(&[(1, 0, 0.6), (0, 1, 0.2)]),
                    Poly2::from_terms(&[(0, 1, 0.9), (2, 0, 0.5)]),
                ),
            ),
        };
        return Ok((disk, u1, u2, psi));
    }
    let u_a = Poly2::from_terms(&[(3, 0, 1.0), (0, 2, 1.0), (1, 1, 0.5)]);
    let u_b = Poly2::from_terms(&[(2, 1, 1.0), (1, 0, 1.0), (0, 0, 0.2)]);
    Ok(match preset {
        1 => (StarChart::disk(1.0), u_a, u_b, generic1),
        2 => (
            StarChart::disk(1.3),
            Poly2::from_terms(&[(3, 0, 1.0), (2, 0, 1.0), (0, 2, 1.0)]),
            Poly2::from_terms(&[(2, 1, 1.0), (1, 0, 1.0), (0, 2, 1.0), (0, 0, 0.2)]),
            PolynomialField::new(
                Poly2::from_terms(&[(1, 0, 1.0), (2, 0, 0.3)]),
                Poly2::from_terms(&[(0, 1, 1.0), (1, 1, -0.2)]),
            ),
        ),
        3 => (
            StarChart::new(1.0, vec![0.0, 0.1], vec![]).map_err(from_error)?,
            u_a,
            u_b,
            PolynomialField::new(
                Poly2::from_terms(&[(0, 2, 1.0), (1, 0, 0.3)]),
                Poly2::from_terms(&[(1, 0, 1.0), (0, 2, 0.1)]),
            ),
        ),
        4 => (
            StarChart::new(1.0, vec![], vec![0.0, 0.0, 0.05]).map_err(from_error)?,
            Poly2::from_terms(&[(1, 0, 1.0), (0, 1, 1.0), (2, 2, 1.0)]),
            Poly2::from_terms(&[(0, 0, 1.0), (2, 0, 1.0)]),
            PolynomialField::new(
                Poly2::from_terms(&[(2, 0, 0.5), (1, 0, 0.7), (0, 1, 1.0)]),
                Poly2::from_terms(&[(1, 0, 1.0), (0, 2, -1.0)]),
            ),
        ),
        _ => (
            StarChart::disk(0.8),
            Poly2::from_terms(&[(0, 3, 1.0), (1, 0, 1.0)]),
            Poly2::from_terms(&[(2, 0, 1.0), (1, 1, 1.0), (0, 0, 0.4)]),
            PolynomialField::new(
                Poly2::from_terms(&[(1, 1, 1.0), (0, 0, 0.2)]),
                Poly2::from_terms(&[(2, 0, 1.0), (0, 1, -0.3)]),
            ),
        ),
    })
}

fn cmd_lemma(args: LemmaArgs) -> std::result::Result<(), Failure> {
    let lemma = match args.which.as_str() {
        "dM" => LemmaKind::DM,
        "dB" => LemmaKind::DB,
        "dL" => LemmaKind::DL,
        "dDet" => LemmaKind::DDet,
        "dJ1" => LemmaKind::DJ1,
        "dJ2" => LemmaKind::DJ2,
        "dJ3" => LemmaKind::DJ3,
        other => return Err(invalid(format!("unknown identity '{other}'"))),
    };
    let (chart, u1, u2, psi) = lemma_preset(lemma, args.preset)?;
    let report = lemma_check(lemma, &u1, &u2, &psi, &chart, &QuadSpec::default())
        .map_err(from_error)?;
    let payload = format!(
        "{{\"schema\":1,\"command\":\"lemma\",\"which\":\"{}\",\"preset\":{},\"lhs_fd\":{},\"rhs_formula\":{},\"rel_err\":{}}}\n",
        args.which,
        args.preset,
        fmt_num(report.lhs_fd),
        fmt_num(report.rhs_formula),
        fmt_num(report.rel_err)
    );
    write_out(args.output.as_deref(), &payload)
        .map_err(|e| Failure { code: EXIT_SOLVER_FAILURE, message: e.to_string() })?;
    if args.assert && report.rel_err > args.tol {
        return Err(breach(format!(
            "rel_err {:e} exceeds tol {:e}",
            report.rel_err, args.tol
        )));
    }
    Ok(())
}

fn cmd_branches(args: BranchesArgs) -> std::result::Result<(), Failure> {
    let [s_min, s_max, n_f] = args.rectangle_stretch[..] else {
        return Err(invalid("--rectangle-stretch needs S_MIN S_MAX N"));
    };
    let n = n_f as usize;
    if n < 2 || n_f.fract() != 0.0 || s_max <= s_min {
        return Err(invalid("--rectangle-stretch needs S_MIN < S_MAX and integer N >= 2"));
    }
    let pair: Vec<usize> = args
        .pair
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| invalid(format!("bad --pair '{}'", args.pair)))?;
    let [i, j] = pair[..] else {
        return Err(invalid("--pair needs two 1-based indices"));
    };
    if i == 0 || j == 0 || i == j {
        return Err(invalid("--pair needs two distinct 1-based indices"));
    }
    let count = i.max(j) + 2;
    let mut out = String::from("s,lambda_i,lambda_j,Lambda1,Lambda2\n");
    for k in 0..n {
        let s = s_min + (s_max - s_min) * k as f64 / (n - 1) as f64;
        let eigs = rectangle_navier_spectrum(s.exp(), (-s).exp(), args.tau, count)
            .map_err(from_error)?;
        let li = eigs[i - 1].0;
        let lj = eigs[j - 1].0;
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_num(s),
            fmt_num(li),
            fmt_num(lj),
            fmt_num(li + lj),
            fmt_num(li * lj)
        ));
    }
    write_out(args.output.as_deref(), &out)
        .map_err(|e| Failure { code: EXIT_SOLVER_FAILURE, message: e.to_string() })
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("PLATE_LAB_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Hadamard(a) => cmd_hadamard(a),
        Command::Criticality(a) => cmd_criticality(a),
        Command::Radiality(a) => cmd_radiality(a),
        Command::Lemma(a) => cmd_lemma(a),
        Command::Branches(a) => cmd_branches(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
