use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ameforge::closed_form::compare_with_exponential;
use ameforge::families::{
    builtin_family, named_basis, resolve_span, sample_family, FamilyReport, FamilySpec,
};
use ameforge::liecurve::{default_fit_scales, disagreement_order_fit, DEFAULT_AGREEMENT_TOL};
use ameforge::ols::OlsPair;
use ameforge::repro::{self, ReproConfig, CLAIMS};
use ameforge::tangent::{basis_to_json, classify, solve_tangent};
use ameforge::tensor::{read_json, FlatteningId};
use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use log::info;

#[derive(Parser)]
#[command(
    name = "ameforge",
    version,
    about = "Families of perfect tensors in (C^d)^4"
)]
struct Cli {
    /// Directory for JSON/CSV outputs; nothing is written without it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print and validate an orthogonal Latin square pair.
    Ols {
        /// Built-in order (3, 4 or 5).
        d: Option<usize>,
        /// Cyclic construction of odd order.
        #[arg(long, conflicts_with = "d")]
        cyclic: Option<usize>,
    },
    /// Solve the tangent equations exactly and classify the basis.
    Tangent {
        /// Seed tensor JSON file.
        phi: Option<PathBuf>,
        /// Use the built-in seed of this order.
        #[arg(long, conflicts_with = "phi")]
        ols: Option<usize>,
        /// Flattenings to intersect, e.g. 123, 12, 13, 23.
        #[arg(long, default_value = "123")]
        flattenings: String,
    },
    /// Sample an exponential family.
    Family {
        /// Built-in family name (prop3:e1e2, prop4, prop5:e1e2e3, prop9).
        name: Option<String>,
        /// Comma-separated basis vector names, e.g. e1,e4.
        #[arg(long, conflicts_with = "name", value_delimiter = ',')]
        span: Option<Vec<String>>,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare the closed-form four-parameter family with the numeric exponential.
    VerifyAppendix {
        #[command(flatten)]
        run: RunArgs,
        /// Also test the origin and 50 points near it.
        #[arg(long)]
        include_origin: bool,
    },
    /// Check the structural claims 1..9.
    Repro {
        /// `all` (default) or nothing.
        which: Option<String>,
        #[arg(long)]
        prop: Option<u8>,
        /// Restrict to one order.
        #[arg(long)]
        d: Option<usize>,
        /// Print the claim list and exit.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_AGREEMENT_TOL)]
    tol: f64,
}

impl RunArgs {
    fn validate(&self) -> anyhow::Result<()> {
        if !(self.tol > 0.0) {
            bail!("tolerance must be positive");
        }
        if self.samples == 0 {
            bail!("sample count must be at least 1");
        }
        Ok(())
    }
}

fn write_out(out: &Option<PathBuf>, file: &str, contents: &str) -> anyhow::Result<()> {
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(file);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        info!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_ols(out: &Option<PathBuf>, d: Option<usize>, cyclic: Option<usize>) -> anyhow::Result<bool> {
    let pair = match (d, cyclic) {
        (_, Some(n)) => OlsPair::cyclic(n)?,
        (Some(n), None) => OlsPair::builtin(n)?,
        (None, None) => bail!("give an order or --cyclic"),
    };
    let valid = pair.validate();
    println!("{pair}");
    let json = serde_json::to_string_pretty(&pair)?;
    println!("{json}");
    write_out(out, &format!("ols_{}.json", pair.d), &json)?;
    match valid {
        Ok(()) => Ok(true),
        Err(violations) => {
            for v in violations {
                eprintln!("{v}");
            }
            Ok(false)
        }
    }
}

fn cmd_tangent(
    out: &Option<PathBuf>,
    phi: Option<&Path>,
    ols: Option<usize>,
    flattenings: &str,
) -> anyhow::Result<bool> {
    let seed = match (phi, ols) {
        (Some(path), _) => {
            read_json(path).with_context(|| format!("reading {}", path.display()))?
        }
        (None, Some(d)) => OlsPair::builtin(d)?.to_tensor()?,
        (None, None) => bail!("give a seed file or --ols"),
    };
    let which = FlatteningId::parse_subset(flattenings)?;
    info!(
        "solving tangent equations for d={} on {flattenings}",
        seed.d()
    );
    let basis = solve_tangent(&seed, &which)?;
    let class = classify(&basis)?;
    println!("{}", class.summary);
    write_out(
        out,
        &format!("tangent_d{}_{flattenings}.json", seed.d()),
        &serde_json::to_string_pretty(&basis_to_json(&basis, &class))?,
    )?;
    Ok(class.summary.unresolved == 0)
}

fn print_family(report: &FamilyReport) {
    println!(
        "{}: {}/{} agree, {}/{} perfect, {} non-OLS form, max deviation {:.3e}",
        report.name,
        report.agree_count,
        report.samples,
        report.perfect_count,
        report.samples,
        report.non_ols_count,
        report.max_deviation
    );
    if let Some(m) = report.max_phase_mismatch {
        println!("phase-matrix mismatch {m:.3e}");
    }
}

fn cmd_family(
    out: &Option<PathBuf>,
    name: Option<&str>,
    span: Option<&[String]>,
    d: usize,
    run: &RunArgs,
) -> anyhow::Result<bool> {
    run.validate()?;
    let spec = match (name, span) {
        (Some(n), _) => builtin_family(d, n)?,
        (None, Some(names)) => {
            let seed = OlsPair::builtin(d)
                .or_else(|_| OlsPair::cyclic(d))?
                .to_tensor()?;
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let vectors = resolve_span(&named_basis(d)?, &refs)?;
            FamilySpec::new(format!("span:{}", names.join(",")), seed, vectors)
        }
        (None, None) => bail!("give a family name or --span"),
    };
    spec.validate()?;
    let spec = spec.with_samples(run.samples).with_rng_seed(run.seed);
    info!(
        "sampling {} ({} parameters, {} samples)",
        spec.name,
        spec.dim(),
        spec.samples
    );
    let report = sample_family(&spec, run.tol);
    print_family(&report);
    let mut fit = None;
    if report.agree_count < report.samples {
        let x = spec.direction(&vec![1.0; spec.dim()]);
        match disagreement_order_fit(&spec.seed, &x, &default_fit_scales()) {
            Ok(slope) => {
                println!("separation order fit along the sum of the span: slope {slope:.3}");
                fit = Some(slope);
            }
            Err(e) => println!("separation order fit: {e}"),
        }
    }
    let stem = format!("family_{}", report.name.replace([':', ','], "_"));
    let mut json = serde_json::to_value(&report)?;
    json["separation_slope"] = serde_json::json!(fit);
    write_out(
        out,
        &format!("{stem}.json"),
        &serde_json::to_string_pretty(&json)?,
    )?;
    write_out(out, &format!("{stem}.csv"), &report.to_csv_string())?;
    Ok(report.all_agree_and_perfect())
}

fn cmd_verify_appendix(
    out: &Option<PathBuf>,
    run: &RunArgs,
    include_origin: bool,
) -> anyhow::Result<bool> {
    run.validate()?;
    let near = if include_origin { 50 } else { 0 };
    let report = compare_with_exponential(run.samples, near, run.seed, run.tol)?;
    println!(
        "closed form vs exponential: {} points (+{} near origin), max deviation {:.3e} (tol {:.1e}){}",
        report.samples,
        report.near_origin,
        report.max_deviation,
        report.tol,
        match report.origin_exact {
            Some(true) => ", origin equals seed",
            Some(false) => ", origin DIFFERS from seed",
            None => "",
        }
    );
    write_out(
        out,
        "closed_form.json",
        &serde_json::to_string_pretty(&report)?,
    )?;
    Ok(report.pass)
}

fn cmd_repro(
    out: &Option<PathBuf>,
    which: Option<&str>,
    prop: Option<u8>,
    d: Option<usize>,
    list: bool,
    run: &RunArgs,
) -> anyhow::Result<bool> {
    if list {
        for c in &CLAIMS {
            let orders: Vec<String> = c.orders.iter().map(ToString::to_string).collect();
            println!("prop {} [d={}]: {}", c.id, orders.join(","), c.summary);
        }
        return Ok(true);
    }
    run.validate()?;
    if let Some(w) = which {
        if w != "all" {
            bail!("unknown selector `{w}`; use `all` or --prop");
        }
    }
    let cfg = ReproConfig {
        samples: run.samples,
        seed: run.seed,
        tol: run.tol,
        ..ReproConfig::default()
    };
    let outcomes = match prop {
        Some(id) => repro::run_claim(id, d, &cfg)?.into_iter().collect(),
        None => repro::run_all(d, &cfg)?,
    };
    if outcomes.is_empty() {
        bail!("no claim covers the requested order");
    }
    for o in &outcomes {
        println!("{o}");
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("{passed}/{} PASS", outcomes.len());
    write_out(out, "repro.json", &serde_json::to_string_pretty(&outcomes)?)?;
    Ok(passed == outcomes.len())
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("AMEFORGE_THREADS") {
        let n: usize = v.parse().with_context(|| format!("AMEFORGE_THREADS={v}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    configure_threads()?;
    let out = &cli.out;
    match &cli.command {
        Command::Ols { d, cyclic } => cmd_ols(out, *d, *cyclic),
        Command::Tangent {
            phi,
            ols,
            flattenings,
        } => cmd_tangent(out, phi.as_deref(), *ols, flattenings),
        Command::Family { name, span, d, run } => {
            cmd_family(out, name.as_deref(), span.as_deref(), *d, run)
        }
        Command::VerifyAppendix {
            run,
            include_origin,
        } => cmd_verify_appendix(out, run, *include_origin),
        Command::Repro {
            which,
            prop,
            d,
            list,
            run,
        } => cmd_repro(out, which.as_deref(), *prop, *d, *list, run),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
