use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use convlab::bergman::{self, bergman_radial, gram_kernel, psh_mean_value_check};
use convlab::geometry::{fiber, fiber_distance, shapes};
use convlab::lab::{self, Overrides, RunReport};
use convlab::numerics::QuadConfig;
use convlab::prekopa::{convexity_check, linspace, MarginalCurve};
use convlab::weights::WeightSpec;
use convlab::{Error, Result};

#[derive(Parser)]
#[command(name = "convlab", version, about = "Marginal transforms, localization weights and weighted Bergman kernels")]
struct Cli {
    /// Worker threads for data-parallel loops (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Show the scenario catalog.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Run one or more scenarios (`all` runs the whole catalog).
    Run {
        #[arg(required = true)]
        scenarios: Vec<String>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Comma-separated localization parameters.
        #[arg(long, value_delimiter = ',')]
        k: Option<Vec<u32>>,
        #[arg(long)]
        tol: Option<f64>,
        /// JSON object of parameter overrides.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the report (an array when several scenarios run) as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for CSV tables.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sample a (twisted) marginal transform on a base grid; CSV `t,value`.
    Marginal {
        #[arg(long, default_value = "prekopa_cex")]
        weight: String,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Twist by the convex localizer about 0 with this k.
        #[arg(long)]
        twist_k: Option<u32>,
        #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weighted Bergman kernel on a disc (or ℂ) about 0; CSV `z_re,z_im,value`.
    Bergman {
        /// zero, lemma3, psh_localizer or berndtsson_cex.
        #[arg(long, default_value = "zero")]
        weight: String,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        r: Option<f64>,
        /// Base point `re,im` for weights with a base variable.
        #[arg(long, value_parser = parse_point, default_value = "0,0", allow_hyphen_values = true)]
        base: [f64; 2],
        /// Disc radius; omit for the whole plane.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, value_enum, default_value_t = Method::Radial)]
        method: Method,
        #[arg(long, default_value_t = 8)]
        degree: usize,
        /// Moments kept in the radial series.
        #[arg(long, default_value_t = 64)]
        moments: usize,
        /// Evaluation points `re,im`; repeat for several.
        #[arg(long = "z", value_parser = parse_point, allow_hyphen_values = true)]
        zs: Vec<[f64; 2]>,
        /// Write the moment table (radial method) as CSV `k,value,status`.
        #[arg(long)]
        moments_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Midpoint-convexity check of a CSV `t,value` curve; JSON report.
    CheckConvex {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sub-mean-value check of a function on circles; JSON report.
    CheckPsh {
        #[arg(long, value_enum)]
        function: PshFunction,
        #[arg(long, default_value_t = 0.3)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = PshDomain::Bidisc)]
        domain: PshDomain,
        /// Number of spiral centres.
        #[arg(long, default_value_t = 50)]
        centers: usize,
        #[arg(long, default_value_t = 0.6)]
        center_radius: f64,
        /// Explicit centres `re,im`; replaces the spiral.
        #[arg(long = "center", value_parser = parse_point, allow_hyphen_values = true)]
        explicit: Vec<[f64; 2]>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.1])]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 64)]
        angles: usize,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Radial,
    Gram,
}

#[derive(Clone, Copy, ValueEnum)]
enum PshFunction {
    /// `Φ = −log ∫ e^{−φ_z}` for the example weight.
    BerndtssonPhi,
    /// `τ ↦ −log δ_Ω(τ, 0)`.
    NegLogDelta,
}

#[derive(Clone, Copy, ValueEnum)]
enum PshDomain {
    Bidisc,
    Ball,
    Hartogs,
}

fn parse_point(s: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => Ok([a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?]),
        [a] => Ok([a.trim().parse().map_err(|e| format!("{e}"))?, 0.0]),
        _ => Err("expected `re,im`".into()),
    }
}

const EXIT_FAIL: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_USAGE: u8 = 3;

fn exit_for(e: &Error) -> u8 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn csv_sink(out: Option<&Path>) -> Result<Box<dyn std::io::Write>> {
    Ok(match out {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout()),
    })
}

fn print_report(r: &RunReport) {
    let status = if r.passed() { "PASS" } else { "FAIL" };
    println!("{status} {} ({:.2}s)", r.scenario, r.wall_time);
    for c in &r.checks {
        let mark = if c.pass { "ok  " } else { "FAIL" };
        println!(
            "  {mark} {}: actual {} vs {} (tol {:e})",
            c.description,
            convlab::extended::fmt(c.actual),
            convlab::extended::fmt(c.expected),
            c.tol
        );
    }
}

fn run(
    names: &[String],
    overrides: Overrides,
    out: Option<&Path>,
    csv: Option<&Path>,
) -> std::result::Result<u8, (Error, u8)> {
    let names: Vec<String> = if names.iter().any(|n| n == "all") {
        lab::list_scenarios().iter().map(|s| s.name.to_string()).collect()
    } else {
        names.to_vec()
    };
    let mut reports = Vec::new();
    for n in &names {
        let r = lab::run_scenario(n, &overrides).map_err(|e| {
            let c = exit_for(&e);
            (e, c)
        })?;
        print_report(&r);
        if let Some(dir) = csv {
            r.write_tables(dir).map_err(|e| (e, EXIT_USAGE))?;
        }
        reports.push(r);
    }
    if let Some(p) = out {
        let text = if reports.len() == 1 {
            reports[0].to_json()
        } else {
            serde_json::to_string_pretty(&reports).map_err(Error::from)
        }
        .map_err(|e| (e, EXIT_USAGE))?;
        std::fs::write(p, text).map_err(|e| (Error::from(e), EXIT_USAGE))?;
    }
    Ok(if reports.iter().all(RunReport::passed) { 0 } else { EXIT_FAIL })
}

fn read_config(path: &Path) -> Result<Map<String, Value>> {
    match serde_json::from_str(&std::fs::read_to_string(path)?)? {
        Value::Object(m) => Ok(m),
        _ => Err(Error::InvalidParam("config file must hold a JSON object".into())),
    }
}

fn marginal(
    weight: &str,
    epsilon: f64,
    twist_k: Option<u32>,
    (from, to, points): (f64, f64, usize),
    out: Option<&Path>,
) -> Result<()> {
    if points < 2 || from.is_nan() || to.is_nan() || from >= to {
        return Err(Error::InvalidParam("need points ≥ 2 and from < to".into()));
    }
    let phi = convlab::weights::paper_weight(weight, epsilon)?;
    let dom = shapes::real_space(1, 1);
    let ts = linspace(from, to, points);
    let cfg = QuadConfig::default();
    let curve = match twist_k {
        Some(k) => {
            let psi = WeightSpec { name: "convex_localizer".into(), epsilon: None, k: Some(k), r: None }.build()?;
            MarginalCurve::sample_twisted(&phi, &psi, &dom, &ts, &cfg)?
        }
        None => MarginalCurve::sample(&phi, &dom, &ts, &cfg)?,
    };
    curve.write_csv(csv_sink(out)?)
}

#[allow(clippy::too_many_arguments)]
fn kernel(
    spec: WeightSpec,
    base: &[f64],
    radius: Option<f64>,
    method: Method,
    degree: usize,
    moments: usize,
    zs: &[[f64; 2]],
    moments_out: Option<&Path>,
    out: Option<&Path>,
) -> Result<()> {
    let w = match spec.name.as_str() {
        "zero" => convlab::weights::WeightField::zero(convlab::geometry::CoordKind::Complex, 0, 1),
        _ => spec.build()?,
    };
    if w.kind() != convlab::geometry::CoordKind::Complex || w.split().1 != 1 {
        return Err(Error::InvalidParam(format!("`{}` is not a weight on a complex line", w.name())));
    }
    let t: Vec<f64> = if w.split().0 == 0 { Vec::new() } else { base.to_vec() };
    let outer = radius.unwrap_or(f64::INFINITY);
    let zs: Vec<[f64; 2]> = if zs.is_empty() { vec![[0.0, 0.0]] } else { zs.to_vec() };
    if let Some(z) = zs.iter().find(|z| z[0].hypot(z[1]) >= outer) {
        return Err(Error::PointOutsideDomain(z.to_vec()));
    }
    let cfg = QuadConfig::default();
    let values: Vec<([f64; 2], f64)> = match method {
        Method::Radial => {
            if w.profile(&t, 0.0).is_none() {
                return Err(Error::MethodUnavailable(format!("`{}` is not radial", w.name())));
            }
            let mt = bergman::radial_moments_with(
                w.name(),
                |r| w.profile(&t, r).unwrap_or(f64::INFINITY),
                moments,
                &w.radial_seams(&t),
                outer,
                &cfg,
            )?;
            if let Some(p) = moments_out {
                mt.write_csv(std::fs::File::create(p)?)?;
            }
            zs.iter().map(|z| Ok((*z, bergman_radial(&mt, z[0].hypot(z[1]))?))).collect::<Result<_>>()?
        }
        Method::Gram => {
            let f = fiber(&shapes::disc(outer), &[]);
            let g = gram_kernel(&f, |x| w.eval(&t, x), &w.seams(&t), ("disc", w.name()), degree, &cfg)?;
            zs.iter().map(|z| Ok((*z, g.kernel_at(*z)?))).collect::<Result<_>>()?
        }
    };
    bergman::write_kernel_csv(csv_sink(out)?, &values)
}

fn check_convex(input: &Path, tol: f64, out: Option<&Path>) -> Result<bool> {
    let mut rdr = csv::Reader::from_path(input)?;
    let (mut ts, mut fs) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            let s = rec.get(i).ok_or_else(|| Error::InvalidParam("expected columns t,value".into()))?;
            match s.trim() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                v => v.parse().map_err(|_| Error::InvalidParam(format!("not a number: `{v}`"))),
            }
        };
        ts.push(parse(0)?);
        fs.push(parse(1)?);
    }
    let report = convexity_check(&ts, &fs, tol)?;
    write_or_print(out, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    Ok(report.verdict.passed())
}

#[allow(clippy::too_many_arguments)]
fn check_psh(
    function: PshFunction,
    epsilon: f64,
    domain: PshDomain,
    centers: Vec<[f64; 2]>,
    radii: &[f64],
    angles: usize,
    tol: f64,
    out: Option<&Path>,
) -> Result<bool> {
    let report = match function {
        PshFunction::BerndtssonPhi => {
            let u = bergman::berndtsson_phi_fn(epsilon, QuadConfig::default())?;
            psh_mean_value_check(u, &centers, radii, angles, tol)?
        }
        PshFunction::NegLogDelta => {
            let d = match domain {
                PshDomain::Bidisc => shapes::bidisc(),
                PshDomain::Ball => shapes::complex_ball(1.0),
                PshDomain::Hartogs => shapes::hartogs(),
            };
            let u = |tau: [f64; 2]| fiber_distance(&d, &tau, &[0.0, 0.0]).map(|v| -v.ln()).unwrap_or(f64::NAN);
            psh_mean_value_check(u, &centers, radii, angles, tol)?
        }
    };
    write_or_print(out, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    Ok(report.verdict.passed())
}

fn verdict(r: Result<bool>) -> u8 {
    match r {
        Ok(true) => 0,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}

fn done(r: Result<()>) -> u8 {
    verdict(r.map(|_| true))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Some(n) = cli.jobs {
        convlab::par::init_threads(n.max(1));
    }
    let code = match cli.cmd {
        Cmd::List { json } => {
            let cat = lab::list_scenarios();
            let mut text = String::new();
            if json {
                text = serde_json::to_string_pretty(cat).expect("catalog serializes") + "\n";
            } else {
                for s in cat {
                    text += &format!("{:<18} {}\n", s.name, s.summary);
                    for r in s.references {
                        text += &format!("{:<18}   - {r}\n", "");
                    }
                }
            }
            // A closed pipe (`convlab list | head`) is not an error.
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            0
        }
        Cmd::Run { scenarios, epsilon, k, tol, config, out, csv } => {
            let extra = match config.as_deref().map(read_config).transpose() {
                Ok(m) => m.unwrap_or_default(),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_USAGE);
                }
            };
            let overrides = Overrides { epsilon, ks: k, tol, extra };
            match run(&scenarios, overrides, out.as_deref(), csv.as_deref()) {
                Ok(c) => c,
                Err((e, c)) => {
                    eprintln!("error: {e}");
                    c
                }
            }
        }
        Cmd::Marginal { weight, epsilon, twist_k, from, to, points, out } => {
            done(marginal(&weight, epsilon, twist_k, (from, to, points), out.as_deref()))
        }
        Cmd::Bergman { weight, epsilon, k, r, base, radius, method, degree, moments, zs, moments_out, out } => {
            let spec = WeightSpec { name: weight, epsilon, k, r };
            done(kernel(spec, &base, radius, method, degree, moments, &zs, moments_out.as_deref(), out.as_deref()))
        }
        Cmd::CheckConvex { input, tol, out } => verdict(check_convex(&input, tol, out.as_deref())),
        Cmd::CheckPsh { function, epsilon, domain, centers, center_radius, explicit, radii, angles, tol, out } => {
            let cs = if explicit.is_empty() { lab::spiral(centers, center_radius) } else { explicit };
            verdict(check_psh(function, epsilon, domain, cs, &radii, angles, tol, out.as_deref()))
        }
    };
    ExitCode::from(code)
}
