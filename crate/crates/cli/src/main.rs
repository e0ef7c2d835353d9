use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use frobenius_forge::frame::{canonical_frame, FrameOptions};
use frobenius_forge::genus1::{genus1_onepoint, genus_one_data, getzler_check, virasoro_l1_check};
use frobenius_forge::model::{
    builtin_catalog, catalog_names, catalog_summary, emit_model, load_model_file, DEFAULT_TRUNCATION,
};
use frobenius_forge::numeric::{format_complex, parse_point};
use frobenius_forge::verify::{emit_report, run_suite, Format, GridSpec, SuiteSpec, DEFAULT_FD_STEP, SUITES};
use frobenius_forge::{CMatrix, EvalPoint, Error, FrobeniusModel, C64};
use serde_json::{json, Value};

const EXIT_CONFIG: u8 = 1;
const EXIT_NON_SEMISIMPLE: u8 = 2;
const EXIT_SUITE: u8 = 3;
const THREADS_VAR: &str = "FROBENIUS_FORGE_THREADS";

#[derive(Parser)]
#[command(name = "frobenius-forge", version, about = "Canonical frames and identity checks for semisimple Frobenius manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Built-in models.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Canonical frame at a point.
    Frame {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        point: String,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Run an identity suite over a grid.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "all")]
        suite: String,
        /// Grid base point; defaults to the model's own.
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value = "text")]
        format: String,
        /// Overrides every identity tolerance in the suite.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_FD_STEP)]
        fd_step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Genus-1 one-point functions and checks at a point.
    Genus1 {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = DEFAULT_FD_STEP)]
        fd_step: f64,
        #[arg(long, default_value = "text")]
        format: String,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Show {
        name: String,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        truncation: usize,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// Catalog model name.
    #[arg(long, conflicts_with = "model_file")]
    model: Option<String>,
    /// JSON model description.
    #[arg(long)]
    model_file: Option<PathBuf>,
    /// Instanton truncation degree for catalog models.
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    truncation: usize,
}

enum Failure {
    Config(String),
    NonSemisimple(String),
    Suite,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonSemisimple { .. } | Error::ZeroNorm(_) => Failure::NonSemisimple(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

impl ModelArgs {
    fn load(&self) -> Result<Option<FrobeniusModel>, Failure> {
        match (&self.model, &self.model_file) {
            (Some(name), None) => Ok(Some(builtin_catalog(name, self.truncation)?)),
            (None, Some(path)) => Ok(Some(load_model_file(path)?)),
            (None, None) => Ok(None),
            (Some(_), Some(_)) => Err(Failure::Config("give either --model or --model-file".into())),
        }
    }

    fn require(&self) -> Result<FrobeniusModel, Failure> {
        self.load()?
            .ok_or_else(|| Failure::Config("a model is required: --model NAME or --model-file PATH".into()))
    }
}

fn point_for(model: &FrobeniusModel, text: &str) -> Result<EvalPoint, Failure> {
    let coords = parse_point(text)?;
    let p = EvalPoint::new(coords)?;
    p.check_dim(model)?;
    Ok(p)
}

fn format_arg(s: &str) -> Result<Format, Failure> {
    Ok(s.parse::<Format>()?)
}

fn pair(z: C64) -> Value {
    json!([z.re, z.im])
}

fn vector(v: &[C64]) -> Value {
    Value::Array(v.iter().map(|z| pair(*z)).collect())
}

fn matrix(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|c| pair(m[(r, c)])).collect()))
            .collect(),
    )
}

fn show_vector(v: &[C64]) -> String {
    v.iter().map(|z| format_complex(*z)).collect::<Vec<_>>().join(", ")
}

fn show_matrix(label: &str, m: &CMatrix) -> String {
    let mut s = format!("{label}:\n");
    for r in 0..m.nrows() {
        let row: Vec<C64> = m.row(r).iter().copied().collect();
        s.push_str(&format!("  [{}]\n", show_vector(&row)));
    }
    s
}

fn catalog(action: CatalogAction) -> Outcome {
    match action {
        CatalogAction::List => {
            for name in catalog_names() {
                let model = builtin_catalog(name, DEFAULT_TRUNCATION)?;
                println!(
                    "{name:<8} dim {}  {}",
                    model.dim(),
                    catalog_summary(name).unwrap_or_default()
                );
            }
        }
        CatalogAction::Show { name, truncation } => {
            let model = builtin_catalog(&name, truncation)?;
            let doc = serde_json::to_string_pretty(&emit_model(&model)).expect("model serializes");
            println!("{doc}");
        }
    }
    Ok(())
}

fn frame(args: ModelArgs, point: String, format: String) -> Outcome {
    let format = format_arg(&format)?;
    let model = args.require()?;
    let p = point_for(&model, &point)?;
    let f = canonical_frame(&model, &p, &FrameOptions::default())?;
    match format {
        Format::Json => {
            let doc = json!({
                "model": model.name(),
                "point": vector(p.coords()),
                "branch": "principal",
                "u": vector(&f.u),
                "g": vector(&f.g),
                "sqrt_g": vector(&f.sqrt_g),
                "idempotents": matrix(&f.j),
                "psi": matrix(&f.psi),
                "v": matrix(&f.v),
                "gamma": matrix(&f.gamma),
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("frame serializes"));
        }
        Format::Text | Format::Markdown => {
            println!("model {} at ({})", model.name(), show_vector(p.coords()));
            println!("branch: principal square roots, u ordered by descending real part");
            println!("u: {}", show_vector(&f.u));
            println!("g: {}", show_vector(&f.g));
            println!("sqrt g: {}", show_vector(&f.sqrt_g));
            print!("{}", show_matrix("idempotents (rows)", &f.j));
            print!("{}", show_matrix("gamma", &f.gamma));
            print!("{}", show_matrix("psi", &f.psi));
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn verify(
    args: ModelArgs,
    suite: String,
    point: Option<String>,
    format: String,
    tol: Option<f64>,
    fd_step: f64,
    out: Option<PathBuf>,
) -> Outcome {
    if !SUITES.contains(&suite.as_str()) {
        return Err(Failure::Config(format!(
            "unknown suite '{suite}' (choose from {})",
            SUITES.join(", ")
        )));
    }
    let format = format_arg(&format)?;
    if !(fd_step > 0.0 && fd_step.is_finite()) {
        return Err(Failure::Config("--fd-step must be positive".into()));
    }
    if let Some(t) = tol {
        if !(t >= 0.0) {
            return Err(Failure::Config("--tol must be non-negative".into()));
        }
    }
    let models = match args.load()? {
        Some(m) => vec![m],
        None => catalog_names()
            .iter()
            .map(|n| builtin_catalog(n, args.truncation))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let mut reports = Vec::new();
    for model in &models {
        let mut spec = SuiteSpec::new(&suite, model)?;
        if let Some(text) = &point {
            let base = point_for(model, text)?;
            spec.grid = GridSpec::default_for(model, Some(base.coords().to_vec()));
        }
        if let Some(t) = tol {
            spec = spec.with_tolerance(t);
        }
        spec.fd_step = fd_step;
        reports.push(run_suite(model, &spec)?);
    }
    let doc = emit_report(&reports, format);
    match out {
        Some(path) => std::fs::write(&path, doc)
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{doc}"),
    }
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Failure::Suite)
    }
}

fn genus1(args: ModelArgs, point: String, fd_step: f64, format: String) -> Outcome {
    let format = format_arg(&format)?;
    let model = args.require()?;
    let p = point_for(&model, &point)?;
    let f = canonical_frame(&model, &p, &FrameOptions::default())?;
    let n = model.dim();
    let data = genus_one_data(&model, &f)?;
    let onepoint: Vec<C64> = (0..n).map(|a| genus1_onepoint(&f, a)).collect();
    let mut getzler = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            getzler = getzler.max(getzler_check(&model, &f, i, j, fd_step)?.residual);
        }
    }
    let virasoro = virasoro_l1_check(&f);
    match format {
        Format::Json => {
            let doc = json!({
                "model": model.name(),
                "point": vector(p.coords()),
                "u": vector(&f.u),
                "phi": vector(&data.phi),
                "onepoint": vector(&onepoint),
                "genus0_route_residual": data.cross_residual,
                "getzler_residual": getzler,
                "fd_step": fd_step,
                "virasoro_residual": virasoro.residual,
                "virasoro_symmetrization_residual": virasoro.symmetrization_residual,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializes"));
        }
        Format::Text | Format::Markdown => {
            println!("model {} at ({})", model.name(), show_vector(p.coords()));
            println!("u: {}", show_vector(&f.u));
            println!("phi: {}", show_vector(&data.phi));
            println!("<<gamma_a>>_1: {}", show_vector(&onepoint));
            println!("genus-0 route residual: {:.3e}", data.cross_residual);
            println!("getzler residual (h = {fd_step:e}): {getzler:.3e}");
            println!("virasoro L1 residual: {:.3e}", virasoro.residual);
            println!(
                "virasoro symmetrization residual: {:.3e}",
                virasoro.symmetrization_residual
            );
        }
    }
    Ok(())
}

fn configure_threads() -> Outcome {
    if let Ok(raw) = std::env::var(THREADS_VAR) {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Failure::Config(format!("{THREADS_VAR} must be a positive integer")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    configure_threads()?;
    match cli.command {
        Command::Catalog { action } => catalog(action),
        Command::Frame {
            model,
            point,
            format,
        } => frame(model, point, format),
        Command::Verify {
            model,
            suite,
            point,
            format,
            tol,
            fd_step,
            out,
        } => verify(model, suite, point, format, tol, fd_step, out),
        Command::Genus1 {
            model,
            point,
            fd_step,
            format,
        } => genus1(model, point, fd_step, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::NonSemisimple(msg)) => {
            eprintln!("non-semisimple point: {msg}");
            ExitCode::from(EXIT_NON_SEMISIMPLE)
        }
        Err(Failure::Suite) => ExitCode::from(EXIT_SUITE),
    }
}
