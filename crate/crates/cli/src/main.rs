//! Command-line front end.
//!
//! Every subcommand emits a single JSON artifact that embeds the seed and the
//! full tolerance table, so runs are reproducible byte for byte from the same
//! configuration. Exit codes: 0 success, 1 mathematical failure (a
//! verification, certificate, or witness did not hold), 2 usage error.

use clap::{Args, Parser, Subcommand};
use fixmap_core::ball::{
    kobayashi_ball, kobayashi_distance, nearest_on_sphere, BallPoint, HalfSpace, NearestOptions,
    Sphere,
};
use fixmap_core::cplx::{self, Point, C};
use fixmap_core::factory::{prescribe_fixed_points, verify_automorphism, PolyAutomorphism};
use fixmap_core::gallery::{AnnuliInversion, CurveInvolution, StripReflection};
use fixmap_core::json::{CxJson, MapJson};
use fixmap_core::linearize::{
    annulus_inversion_element, annulus_inversion_sampler, ball_unitary_sampler, cartan_phi,
    equivariance_residual, polydisc_isotropy_sampler,
};
use fixmap_core::sample;
use fixmap_core::shell::{build_domain, line_witness, third_fixed_point, ShellSchedule};
use fixmap_core::solver::{
    classify_candidate_set, fixed_points_numeric, fixed_points_structural, DiffMap, PointSet,
    SolveOptions,
};
use fixmap_core::{tol, Error};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

/// Environment variable naming the default artifact directory.
const OUTPUT_DIR_ENV: &str = "FIXMAP_OUTPUT_DIR";

type FamilyMember = (String, Box<dyn Fn(&[C]) -> fixmap_core::Result<Point>>);

#[derive(Parser)]
#[command(
    name = "fixmap",
    about = "Self-maps with prescribed fixed-point sets: constructions, solvers, certificates",
    version
)]
struct Cli {
    /// Seed for every randomized step; identical seeds reproduce artifacts
    /// byte for byte.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the artifact to this file instead of stdout. A bare file name
    /// is resolved inside $FIXMAP_OUTPUT_DIR when that is set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a polynomial automorphism whose fixed-point set is exactly the
    /// given points, and verify it.
    Construct(ConstructArgs),
    /// Extract fixed points of a polynomial map or automorphism numerically.
    FixPoints(FixPointsArgs),
    /// Verify an automorphism's inverse identity on sampled points.
    Verify(VerifyArgs),
    /// Kobayashi-metric computations on the unit ball.
    #[command(subcommand)]
    Kobayashi(KobayashiCmd),
    /// Shell-domain construction, line witnesses and rigidity certificates.
    #[command(subcommand)]
    ShellDomain(ShellCmd),
    /// Example maps: curve involutions, strip reflections, annuli products.
    #[command(subcommand)]
    Gallery(GalleryCmd),
    /// Isotropy-group averaging at a fixed point.
    Linearize(LinearizeArgs),
    /// Classify a candidate point set against a finite family of maps.
    Classify(ClassifyArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// JSON file with the prescribed points: [[{"re":..,"im":..}, ..], ..]
    #[arg(long)]
    points: PathBuf,
    /// Verification sample count.
    #[arg(long, default_value_t = 100)]
    verify_samples: usize,
    /// Verification box radius.
    #[arg(long, default_value_t = 10.0)]
    verify_box: f64,
}

#[derive(Args)]
struct FixPointsArgs {
    /// PolyMap or automorphism JSON file.
    #[arg(long)]
    map: PathBuf,
    /// Search box radius.
    #[arg(long = "box", default_value_t = 5.0)]
    box_radius: f64,
    /// Newton start budget.
    #[arg(long, default_value_t = 2000)]
    starts: usize,
    /// Residual tolerance.
    #[arg(long, default_value_t = tol::FIX_TOL)]
    tol: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Automorphism JSON file.
    #[arg(long)]
    automorphism: PathBuf,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long = "box", default_value_t = 10.0)]
    box_radius: f64,
}

#[derive(Subcommand)]
enum KobayashiCmd {
    /// Distance between two interior points.
    Dist(KobayashiDistArgs),
    /// Kobayashi ball data, optionally testing a probe point.
    Ball(KobayashiBallArgs),
    /// Constrained nearest point on a sphere.
    Nearest(KobayashiNearestArgs),
}

#[derive(Args)]
struct KobayashiDistArgs {
    /// Inline JSON point, e.g. '[{"re":0.1,"im":0.0},{"re":0.0,"im":0.0}]'.
    #[arg(long)]
    z: String,
    #[arg(long)]
    w: String,
}

#[derive(Args)]
struct KobayashiBallArgs {
    #[arg(long)]
    center: String,
    #[arg(long)]
    sigma: f64,
    /// Optional probe point to test for membership.
    #[arg(long)]
    probe: Option<String>,
}

#[derive(Args)]
struct KobayashiNearestArgs {
    /// Probe point (inline JSON).
    #[arg(long)]
    p: String,
    /// Sphere center (inline JSON).
    #[arg(long)]
    center: String,
    #[arg(long)]
    radius: f64,
    /// Half-space clip on Im z2: "at-least" or "at-most".
    #[arg(long)]
    halfspace: Option<String>,
    /// Half-space bound (defaults to -1/2 for at-least, 1/2 for at-most).
    #[arg(long)]
    bound: Option<f64>,
}

#[derive(Subcommand)]
enum ShellCmd {
    /// Materialize the domain and report its shell list.
    Build(ShellBuildArgs),
    /// Find a line witness for a pair of domain points.
    CheckLine(ShellLineArgs),
    /// Produce a third-fixed-point rigidity certificate for a pair.
    Certify(ShellCertifyArgs),
}

#[derive(Args)]
struct ShellBuildArgs {
    /// Schedule JSON file; omitted means the desk default.
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Run the grid connectivity diagnostic at this resolution.
    #[arg(long)]
    connectivity: Option<f64>,
}

#[derive(Args)]
struct ShellLineArgs {
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// First point (inline JSON, C^2).
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
}

#[derive(Args)]
struct ShellCertifyArgs {
    #[arg(long)]
    schedule: Option<PathBuf>,
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    /// Initial probe offset along the line.
    #[arg(long, default_value_t = tol::PROBE_OFFSET_DEFAULT)]
    offset: f64,
}

#[derive(Subcommand)]
enum GalleryCmd {
    /// Fixed points of the involution on y^2 = prod (x - root).
    Curve(GalleryCurveArgs),
    /// Strip reflection z -> -z + (2k+1) with its punctured domain.
    Strip(GalleryStripArgs),
    /// Coordinate-wise inversion on a product of annuli.
    Annuli(GalleryAnnuliArgs),
}

#[derive(Args)]
struct GalleryCurveArgs {
    /// Inline JSON list of branch roots.
    #[arg(long)]
    roots: String,
}

#[derive(Args)]
struct GalleryStripArgs {
    #[arg(long)]
    k: i64,
    /// Domain-invariance sample count.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
}

#[derive(Args)]
struct GalleryAnnuliArgs {
    /// Inline JSON list of radii, e.g. '[0.25,0.25]'.
    #[arg(long)]
    radii: String,
}

#[derive(Args)]
struct LinearizeArgs {
    /// ball | polydisc | annulus
    #[arg(long)]
    domain: String,
    /// Annulus inner radius (annulus domain only).
    #[arg(long, default_value_t = 0.25)]
    r: f64,
    /// Complex dimension (ball and polydisc).
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Monte-Carlo sample count.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
}

#[derive(Args)]
struct ClassifyArgs {
    /// JSON file with the candidate set K.
    #[arg(long)]
    points: PathBuf,
    /// Map or automorphism JSON files forming the family.
    #[arg(long, required = true, num_args = 1..)]
    maps: Vec<PathBuf>,
    /// Sample count in the test box.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Test box radius.
    #[arg(long = "box", default_value_t = 1.0)]
    box_radius: f64,
    /// Fixing tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

/// Reproducible run configuration, embedded in every artifact.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct RunConfig {
    seed: u64,
    tolerances: BTreeMap<String, f64>,
    schedule: Option<String>,
    output: Option<String>,
}

#[derive(Serialize)]
struct Artifact<T: Serialize> {
    command: String,
    config: RunConfig,
    result: T,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                // mathematical failures
                Error::Precondition(_)
                | Error::Certificate(_)
                | Error::TruncationFailure(_)
                | Error::Numerical(_)
                | Error::EmptyFeasible(_)
                | Error::Preconditioning { .. }
                | Error::SeparationTooSmall { .. }
                | Error::NotInterior(_)
                | Error::DegreeDegenerate(_)
                | Error::Hypothesis(_) => ExitCode::from(1),
                // malformed inputs and misuse
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let (name, value, ok) = dispatch(cli)?;
    let config = RunConfig {
        seed: cli.seed,
        tolerances: tol::table(),
        schedule: schedule_path(&cli.command).map(|p| p.display().to_string()),
        output: cli.out.as_ref().map(|p| p.display().to_string()),
    };
    let artifact = Artifact {
        command: name,
        config,
        result: value,
    };
    let text = serde_json::to_string_pretty(&artifact)?;
    match resolve_out(cli.out.as_deref()) {
        Some(path) => {
            std::fs::write(&path, text.as_bytes())
                .map_err(|e| Error::BadInput(format!("cannot write {}: {e}", path.display())))?;
        }
        None => println!("{text}"),
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn schedule_path(cmd: &Command) -> Option<&PathBuf> {
    match cmd {
        Command::ShellDomain(ShellCmd::Build(a)) => a.schedule.as_ref(),
        Command::ShellDomain(ShellCmd::CheckLine(a)) => a.schedule.as_ref(),
        Command::ShellDomain(ShellCmd::Certify(a)) => a.schedule.as_ref(),
        _ => None,
    }
}

fn resolve_out(out: Option<&Path>) -> Option<PathBuf> {
    let out = out?;
    if out.is_absolute() || out.components().count() > 1 {
        return Some(out.to_path_buf());
    }
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) => Some(PathBuf::from(dir).join(out)),
        None => Some(out.to_path_buf()),
    }
}

fn parse_point(text: &str) -> Result<Point, Error> {
    let raw: Vec<CxJson> = serde_json::from_str(text)
        .map_err(|e| Error::BadInput(format!("point must be JSON [{{\"re\":..,\"im\":..}}, ..]: {e}")))?;
    Ok(raw.into_iter().map(C::from).collect())
}

fn load_points(path: &Path) -> Result<Vec<Point>, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::BadInput(format!("cannot read {}: {e}", path.display())))?;
    let raw: Vec<Vec<CxJson>> = serde_json::from_str(&text)?;
    Ok(raw
        .into_iter()
        .map(|p| p.into_iter().map(C::from).collect())
        .collect())
}

fn load_schedule(path: Option<&PathBuf>) -> Result<ShellSchedule, Error> {
    match path {
        None => Ok(ShellSchedule::desk_default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::BadInput(format!("cannot read {}: {e}", p.display())))?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

/// Loads a map file as a boxed solver-facing map: either an automorphism
/// (detected by its "provenance" key) or a bare PolyMap.
fn load_map(path: &Path) -> Result<Box<dyn DiffMap>, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::BadInput(format!("cannot read {}: {e}", path.display())))?;
    let probe: serde_json::Value = serde_json::from_str(&text)?;
    if probe.get("provenance").is_some() {
        let auto = PolyAutomorphism::from_json(&serde_json::from_str(&text)?)?;
        Ok(Box::new(auto))
    } else {
        let map: MapJson = serde_json::from_str(&text)?;
        Ok(Box::new(map.to_map()?))
    }
}

fn dispatch(cli: &Cli) -> Result<(String, serde_json::Value, bool), Error> {
    let seed = cli.seed;
    match &cli.command {
        Command::Construct(args) => {
            let points = load_points(&args.points)?;
            let g = prescribe_fixed_points(&points, seed)?;
            let report = verify_automorphism(&g, args.verify_samples, args.verify_box, seed)?;
            let structural = fixed_points_structural(&g)?;
            let worst_fix = points
                .iter()
                .map(|p| Ok(cplx::dist(&g.eval_forward(p)?, p)))
                .collect::<Result<Vec<f64>, Error>>()?
                .into_iter()
                .fold(0.0, f64::max);
            let ok = report.pass && worst_fix < 1e-8;
            Ok((
                "construct".into(),
                json!({
                    "automorphism": g.to_json(),
                    "verification": report,
                    "structural_fixed_points": structural.to_json(),
                    "max_prescribed_point_residual": worst_fix,
                }),
                ok,
            ))
        }
        Command::FixPoints(args) => {
            let map = load_map(&args.map)?;
            let report = fixed_points_numeric(
                map.as_ref(),
                args.box_radius,
                args.starts,
                args.tol,
                SolveOptions {
                    seed,
                    ..Default::default()
                },
            )?;
            Ok((
                "fix-points".into(),
                serde_json::to_value(report.to_json())?,
                true,
            ))
        }
        Command::Verify(args) => {
            let text = std::fs::read_to_string(&args.automorphism).map_err(|e| {
                Error::BadInput(format!("cannot read {}: {e}", args.automorphism.display()))
            })?;
            let g = PolyAutomorphism::from_json(&serde_json::from_str(&text)?)?;
            let report = verify_automorphism(&g, args.samples, args.box_radius, seed)?;
            let ok = report.pass;
            Ok(("verify".into(), serde_json::to_value(report)?, ok))
        }
        Command::Kobayashi(KobayashiCmd::Dist(args)) => {
            let z = parse_point(&args.z)?;
            let w = parse_point(&args.w)?;
            let d = kobayashi_distance(&z, &w)?;
            Ok(("kobayashi dist".into(), json!({ "distance": d }), true))
        }
        Command::Kobayashi(KobayashiCmd::Ball(args)) => {
            let center = BallPoint::new(parse_point(&args.center)?)?;
            let desc = kobayashi_ball(center, args.sigma)?;
            let probe = args
                .probe
                .as_deref()
                .map(|p| -> Result<serde_json::Value, Error> {
                    let z = parse_point(p)?;
                    Ok(json!({
                        "contains": desc.contains(&z)?,
                        "boundary_residual": desc.boundary_residual(&z)?,
                    }))
                })
                .transpose()?;
            Ok((
                "kobayashi ball".into(),
                json!({
                    "sigma": desc.sigma,
                    "euclidean_radius_if_centered": desc.euclidean_radius_if_centered(),
                    "probe": probe,
                }),
                true,
            ))
        }
        Command::Kobayashi(KobayashiCmd::Nearest(args)) => {
            let p = parse_point(&args.p)?;
            let center = parse_point(&args.center)?;
            let constraint = match args.halfspace.as_deref() {
                None => None,
                Some("at-least") => Some(HalfSpace::ImZ2AtLeast(args.bound.unwrap_or(-0.5))),
                Some("at-most") => Some(HalfSpace::ImZ2AtMost(args.bound.unwrap_or(0.5))),
                Some(other) => {
                    return Err(Error::BadInput(format!(
                        "halfspace must be at-least or at-most, got {other}"
                    )))
                }
            };
            let sphere = Sphere::new(&center, args.radius);
            let res = nearest_on_sphere(
                &p,
                &sphere,
                constraint,
                NearestOptions {
                    seed,
                    ..Default::default()
                },
            )?;
            let ok = !res.cap_boundary;
            Ok(("kobayashi nearest".into(), serde_json::to_value(res)?, ok))
        }
        Command::ShellDomain(ShellCmd::Build(args)) => {
            let schedule = load_schedule(args.schedule.as_ref())?;
            let domain = build_domain(schedule)?;
            let connectivity = args
                .connectivity
                .map(|res| domain.connectivity_diagnostic(res));
            Ok((
                "shell-domain build".into(),
                json!({
                    "domain": domain,
                    "connectivity": connectivity,
                }),
                true,
            ))
        }
        Command::ShellDomain(ShellCmd::CheckLine(args)) => {
            let domain = build_domain(load_schedule(args.schedule.as_ref())?)?;
            let a = parse_point(&args.a)?;
            let b = parse_point(&args.b)?;
            let witness = line_witness(&domain, &a, &b)?;
            Ok(("shell-domain check-line".into(), serde_json::to_value(witness)?, true))
        }
        Command::ShellDomain(ShellCmd::Certify(args)) => {
            let domain = build_domain(load_schedule(args.schedule.as_ref())?)?;
            let a = parse_point(&args.a)?;
            let b = parse_point(&args.b)?;
            let cert = third_fixed_point(&domain, &a, &b, args.offset)?;
            let ok = cert.recheck();
            Ok(("shell-domain certify".into(), serde_json::to_value(cert)?, ok))
        }
        Command::Gallery(GalleryCmd::Curve(args)) => {
            let roots = parse_point(&args.roots)?;
            let curve = CurveInvolution::from_branch_roots(&roots)?;
            let fixed = curve.fixed_points()?;
            Ok((
                "gallery curve".into(),
                json!({
                    "fixed_points": fixed.to_json(),
                    "count": fixed.len(),
                }),
                true,
            ))
        }
        Command::Gallery(GalleryCmd::Strip(args)) => {
            let f = StripReflection::new(args.k);
            let mut rng = sample::rng(seed);
            let mut checked = 0usize;
            let mut escaped = 0usize;
            while checked < args.samples {
                let z = C::new(
                    8.0 * sample::gaussian(&mut rng),
                    3.0 * sample::gaussian(&mut rng),
                );
                if !f.domain_contains(z) {
                    continue;
                }
                checked += 1;
                if !f.domain_contains(f.eval(z)) {
                    escaped += 1;
                }
            }
            Ok((
                "gallery strip".into(),
                json!({
                    "k": args.k,
                    "fixed_point": CxJson::from(f.fixed_point()),
                    "samples": checked,
                    "escaped": escaped,
                }),
                escaped == 0,
            ))
        }
        Command::Gallery(GalleryCmd::Annuli(args)) => {
            let radii: Vec<f64> = serde_json::from_str(&args.radii)
                .map_err(|e| Error::BadInput(format!("radii must be a JSON list: {e}")))?;
            let map = AnnuliInversion::new(radii)?;
            let fixed = map.fixed_points();
            let in_domain = fixed.points().iter().all(|p| map.domain_contains(p));
            Ok((
                "gallery annuli".into(),
                json!({
                    "fixed_points": fixed.to_json(),
                    "count": fixed.len(),
                    "all_in_domain": in_domain,
                }),
                in_domain,
            ))
        }
        Command::Linearize(args) => {
            let (phi, extra) = match args.domain.as_str() {
                "ball" => {
                    let sampler = ball_unitary_sampler(args.dim, seed)?;
                    (cartan_phi(&sampler, args.samples)?, serde_json::Value::Null)
                }
                "polydisc" => {
                    let sampler = polydisc_isotropy_sampler(args.dim, seed)?;
                    (cartan_phi(&sampler, args.samples)?, serde_json::Value::Null)
                }
                "annulus" => {
                    let sampler = annulus_inversion_sampler(args.r)?;
                    let phi = cartan_phi(&sampler, 1)?;
                    let inversion = annulus_inversion_element(args.r);
                    let samples: Vec<Point> = (0..32)
                        .map(|i| {
                            let h = sample::halton(i, 2, seed.wrapping_add(5));
                            vec![C::new(
                                args.r.sqrt() + 0.3 * (h[0] - 0.3),
                                0.15 * (h[1] - 0.5),
                            )]
                        })
                        .filter(|z| {
                            let n = z[0].norm();
                            n > args.r && n < 1.0
                        })
                        .collect();
                    let resid = equivariance_residual(&phi, &inversion, &samples)?;
                    (phi, json!({ "equivariance_residual": resid }))
                }
                other => {
                    return Err(Error::BadInput(format!(
                        "domain must be ball, polydisc or annulus, got {other}"
                    )))
                }
            };
            let base_residual = cplx::norm(&phi.eval(phi.base())?);
            let dev = phi.phi_prime_deviation();
            let se = phi.phi_prime_standard_error();
            let ok = base_residual < 1e-10 && dev <= (3.0 * se).max(tol::PHI_PRIME_FINITE);
            Ok((
                "linearize".into(),
                json!({
                    "domain": args.domain,
                    "sample_count": phi.sample_count(),
                    "rejected_samples": phi.rejected_samples(),
                    "phi_base_residual": base_residual,
                    "phi_prime_deviation": dev,
                    "phi_prime_standard_error": se,
                    "annulus": extra,
                }),
                ok,
            ))
        }
        Command::Classify(args) => {
            let k = PointSet::from_points(load_points(&args.points)?, tol::DEDUP_TOL);
            let mut family: Vec<FamilyMember> = Vec::new();
            for path in &args.maps {
                let map = load_map(path)?;
                let label = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string());
                let map: Arc<dyn DiffMap> = Arc::from(map);
                family.push((
                    label,
                    Box::new(move |z: &[C]| map.eval(z)),
                ));
            }
            let samples: Vec<Point> = (0..args.samples)
                .map(|i| sample::box_point(i as u64, k.points()[0].len(), args.box_radius, seed))
                .collect();
            let cls = classify_candidate_set(&k, &family, &samples, args.tol)?;
            Ok(("classify".into(), serde_json::to_value(cls)?, true))
        }
    }
}
