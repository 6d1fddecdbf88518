//! `repvol`: volumes of representations from triangulation and cocycle files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use repvol_core::complex::{fundamental_cycle, verify_peripheral};
use repvol_core::developing::{develop, place_vertices, PERIPHERAL_TOL};
use repvol_core::engine::{DEFAULT_TOL, COCYCLE_TOL};
use repvol_core::{
    barycentric_subdivide, compute_volume, invariance_test, milnor_wood_report, parse, serialize, validate_cocycle,
    Dimension, EngineError, Input, MethodChoice, PlacementPolicy, VolumeOptions, VolumeReport,
};

const EXIT_FAIL: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "repvol", version, about = "Volumes of representations of surface and 3-manifold groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the volume of the representation.
    Volume(VolumeArgs),
    /// Validate the triangulation, cocycle and peripheral data.
    Check {
        #[arg(long)]
        input: PathBuf,
        /// Residual allowed around each codimension-2 face.
        #[arg(long, default_value_t = COCYCLE_TOL, value_parser = positive)]
        tol: f64,
    },
    /// Recompute the volume under random placements and compare.
    Invariance {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Write the barycentric subdivision of the input.
    Subdivide {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Compare the volume with the simplex-count bound.
    Bound {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct VolumeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    method: Method,
    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Placement::Canonical)]
    placement: Placement,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Closed,
    Quadrature,
}

#[derive(Clone, Copy, ValueEnum)]
enum Placement {
    Canonical,
    Random,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(x) => Err(format!("expected a positive number, got {x}")),
        Err(e) => Err(e.to_string()),
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_FAIL,
            message: message.into(),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure {
            code: if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_FAIL },
            message: e.to_string(),
        }
    }
}

fn read_input(path: &Path) -> Result<Input, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    parse(&bytes).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
}

fn print_volume(r: &VolumeReport) {
    println!("total      {:.12}", r.total);
    println!("est_error  {:.3e}", r.est_error);
    println!(
        "simplices  {} (closed form {}, quadrature {})",
        r.metadata.simplices, r.method_counts.closed_form, r.method_counts.quadrature
    );
    println!("digest     {}", r.metadata.input_digest);
}

fn volume(args: &VolumeArgs) -> Result<(), Failure> {
    let input = read_input(&args.input)?;
    let placement = match args.placement {
        Placement::Canonical => PlacementPolicy::canonical(),
        Placement::Random => PlacementPolicy::random(args.seed),
    };
    let opts = VolumeOptions {
        tol: args.tol,
        method: match args.method {
            Method::Auto => MethodChoice::Auto,
            Method::Closed => MethodChoice::Closed,
            Method::Quadrature => MethodChoice::Quadrature,
        },
        placement,
        root: 0,
    };
    match compute_volume(&input.triangulation, &input.cocycle, &input.peripheral, &opts) {
        Ok(r) if args.json => print_json(&r),
        Ok(r) => print_volume(&r),
        Err(EngineError::Quadrature { simplex, partial }) => {
            if args.json {
                print_json(&partial);
            } else {
                print_volume(&partial);
            }
            return Err(EngineError::Quadrature { simplex, partial }.into());
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn check(path: &Path, tol: f64) -> Result<(), Failure> {
    let input = read_input(path)?;
    let (t, c, p) = (&input.triangulation, &input.cocycle, &input.peripheral);
    let mut ok = true;

    let face = match t.dimension() {
        Dimension::Two => "vertex corner",
        Dimension::Three => "edge",
    };
    let report = validate_cocycle(t, c, tol);
    for r in &report.residuals {
        println!(
            "{face} {} (simplex {}, positions {:?}, valence {}): residual {:.3e} {}",
            r.id,
            r.simplex,
            r.positions,
            r.valence,
            r.residual,
            if r.pass { "ok" } else { "FAIL" }
        );
    }
    println!("cocycle: max residual {:.3e}, tol {:.1e}", report.max_residual, tol);
    ok &= report.pass;

    match fundamental_cycle(t) {
        Ok(cycle) => println!("orientation: ok ({} simplices)", cycle.entries.len()),
        Err(e) => {
            println!("orientation: FAIL: {e}");
            ok = false;
        }
    }

    let peripheral = verify_peripheral(t, c, p, PERIPHERAL_TOL);
    for e in &peripheral.entries {
        match &e.failure {
            None => {
                let point = e.point.map(|q| serde_json::to_string(&q).expect("points serialize"));
                let residual = e.loop_residual.map_or(String::from("n/a"), |r| format!("{r:.3e}"));
                println!(
                    "vertex {}: fixed point {}, link residual {residual}",
                    e.vertex,
                    point.as_deref().unwrap_or("none")
                );
            }
            Some(f) => {
                println!("vertex {}: FAIL: {f}", e.vertex);
                ok = false;
            }
        }
    }

    if peripheral.pass {
        let witness = place_vertices(t, c, p, PlacementPolicy::canonical()).and_then(|pl| develop(t, c, &pl, 0));
        match witness {
            Ok(chain) => println!("equivariance witness: {:.3e}", chain.witness),
            Err(e) => {
                println!("equivariance witness: FAIL: {e}");
                ok = false;
            }
        }
    }

    if ok {
        println!("PASS");
        Ok(())
    } else {
        println!("FAIL");
        Err(Failure::invalid("validation failed"))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Volume(args) => volume(&args),
        Command::Check { input, tol } => check(&input, tol),
        Command::Invariance {
            input,
            samples,
            seed,
            tol,
            json,
        } => {
            let input = read_input(&input)?;
            let r = invariance_test(&input.triangulation, &input.cocycle, &input.peripheral, samples as usize, seed, tol);
            if json {
                print_json(&r);
            } else {
                for (s, v) in r.seeds.iter().zip(&r.values) {
                    println!("seed {s:>20}  total {v:.12}");
                }
                if let Some(e) = &r.error {
                    println!("error: {e}");
                }
                println!("finite vertices {}", r.finite_vertices);
                println!("max deviation {:.3e} (threshold {:.1e})", r.max_deviation, r.threshold);
                println!("{}", if r.pass { "PASS" } else { "FAIL" });
            }
            if r.pass {
                Ok(())
            } else {
                Err(Failure::invalid("invariance test failed"))
            }
        }
        Command::Subdivide { input, output } => {
            let parsed = read_input(&input)?;
            let (t, c) = barycentric_subdivide(&parsed.triangulation, &parsed.cocycle);
            let text = serialize(&t, &c, &parsed.peripheral);
            std::fs::write(&output, text).map_err(|e| Failure::invalid(format!("{}: {e}", output.display())))?;
            println!(
                "{} simplices -> {} simplices, written to {}",
                parsed.triangulation.simplices().len(),
                t.simplices().len(),
                output.display()
            );
            Ok(())
        }
        Command::Bound { input, json } => {
            let parsed = read_input(&input)?;
            let t = &parsed.triangulation;
            let report = compute_volume(t, &parsed.cocycle, &parsed.peripheral, &VolumeOptions::default())?;
            let mw = milnor_wood_report(&report, t.dimension().n(), t.simplices().len())
                .map_err(|e| Failure::invalid(e.to_string()))?;
            if json {
                print_json(&mw);
            } else {
                println!("total  {:.12}", mw.total);
                println!("bound  {:.12} ({} x {:.12})", mw.bound, mw.simplices, mw.simplex_bound);
                println!("ratio  {:.6}", mw.ratio);
                println!("{}", if mw.pass { "PASS" } else { "FAIL" });
            }
            if mw.pass {
                Ok(())
            } else {
                Err(Failure::invalid("bound violated"))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("repvol: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
