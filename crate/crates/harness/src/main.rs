use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use exact_lp::rational::format as fmt_rational;
use exact_lp::{BnbLimits, Limits};
use ptf_core::threshold_analysis::{
    certify_coefficient_lemma, min_weight, sign_degree, verify_witness_gate, CoefficientLemma, Verdict, WeightMode,
    WeightOptions,
};
use ptf_core::{make_hard, parse_ks, BoolFun, GroupShape, OrderContext, Variant};
use ptf_harness::{preset, rows_to_csv, run, write_outputs, ExperimentSpec, RunOptions};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "ptflab", version, about = "Hard threshold functions: gates, degrees, weights and lemmas")]
struct Cli {
    /// Output file, or directory for `reproduce` and `run`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Branch-and-bound node budget.
    #[arg(long, global = true)]
    budget_nodes: Option<usize>,
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Job scheduling order only; never changes results.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit the hard function of a shape as JSON.
    Build { variant: Variant, ks: String },
    /// Enumerate the index set in order as CSV.
    Order { variant: Variant, ks: String },
    /// Check the explicit gate on every input.
    VerifyGate {
        ks: String,
        #[arg(long, default_value = "weak")]
        variant: Variant,
    },
    /// Smallest degree of a sign-representing polynomial.
    Signdeg {
        function: PathBuf,
        #[arg(long)]
        dmax: usize,
    },
    /// Minimum weight at a fixed degree.
    Minweight {
        function: PathBuf,
        #[arg(long)]
        degree: usize,
        /// Integer optimum by branch and bound instead of the LP bound.
        #[arg(long)]
        exact: bool,
    },
    /// Certify one family of coefficient inequalities.
    CheckLemma {
        name: CoefficientLemma,
        #[arg(long)]
        k: usize,
    },
    /// Run a named preset.
    Reproduce { preset: String },
    /// Run an experiment spec file.
    Run { spec: PathBuf },
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> AnyResult<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> AnyResult<()> {
    if let Some(p) = out {
        fs::write(p, serde_json::to_vec_pretty(value)?)?;
    }
    Ok(())
}

fn read_function(path: &Path) -> AnyResult<BoolFun> {
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path)?)?;
    Ok(BoolFun::from_json(&v)?)
}

fn bnb(cli: &Cli) -> BnbLimits {
    let mut b = BnbLimits::default();
    if let Some(n) = cli.budget_nodes {
        b.max_nodes = n;
    }
    b
}

/// `Ok(false)` when some verdict failed.
fn dispatch(cli: &Cli) -> AnyResult<bool> {
    let out = cli.out.as_deref();
    match &cli.cmd {
        Cmd::Build { variant, ks } => {
            let f = make_hard(&GroupShape::new(*variant, parse_ks(ks)?)?)?;
            emit(out, &format!("{}\n", serde_json::to_string_pretty(&f.to_json())?))?;
            Ok(true)
        }
        Cmd::Order { variant, ks } => {
            let shape = GroupShape::new(*variant, parse_ks(ks)?)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["rank".to_string()];
            header.extend((1..=shape.d()).map(|l| format!("a{l}")));
            w.write_record(&header)?;
            for (i, a) in OrderContext::new(&shape).enumerate_ordered()?.iter().enumerate() {
                let mut rec = vec![(i + 1).to_string()];
                rec.extend(a.coords().iter().map(|c| c.to_string()));
                w.write_record(&rec)?;
            }
            emit(out, &String::from_utf8(w.into_inner()?)?)?;
            Ok(true)
        }
        Cmd::VerifyGate { ks, variant } => {
            let r = verify_witness_gate(&GroupShape::new(*variant, parse_ks(ks)?)?)?;
            println!("{}: W(p) = {}, W(p') = {}", r.shape.label(), r.weight, r.uv_weight);
            for c in &r.checks {
                println!("{:<24} {:<12} {}", c.name, c.verdict, c.detail);
            }
            emit_json(out, &r)?;
            Ok(!r.failed())
        }
        Cmd::Signdeg { function, dmax } => {
            let f = read_function(function)?;
            let r = sign_degree(&f, *dmax, &Limits::default())?;
            for s in &r.steps {
                let what = if s.feasible { "feasible" } else { "refuted" };
                println!("degree {}: {what} ({} columns, {} rounds)", s.degree, s.columns, s.rounds);
            }
            match r.degree {
                Some(d) => println!("sign degree {d}"),
                None => println!("sign degree > {dmax}"),
            }
            emit_json(out, &r)?;
            Ok(true)
        }
        Cmd::Minweight { function, degree, exact } => {
            let f = read_function(function)?;
            let mode = if *exact { WeightMode::Exact } else { WeightMode::Lp };
            let opts = WeightOptions {
                bnb: bnb(cli),
                incumbent: None,
            };
            let r = min_weight(&f, *degree, mode, &opts)?;
            let show = |v: &Option<exact_lp::Rational>| v.as_ref().map(fmt_rational).unwrap_or_else(|| "-".into());
            println!(
                "{:?}: value {}, lower bound {}, relaxation {}, {} nodes",
                r.status,
                show(&r.value),
                show(&r.lower_bound),
                show(&r.relaxation),
                r.nodes
            );
            if let Some(g) = &r.gate {
                println!("gate: {g}");
            }
            emit_json(out, &r)?;
            Ok(true)
        }
        Cmd::CheckLemma { name, k } => {
            let r = certify_coefficient_lemma(*name, *k, &Limits::default())?;
            for res in &r.results {
                println!("{:<28} {}", res.inequality.label, res.verdict);
            }
            println!("{name} k={k}: {}", r.verdict);
            emit_json(out, &r)?;
            Ok(r.verdict == Verdict::Certified)
        }
        Cmd::Reproduce { preset: name } => run_spec(cli, preset(name)?),
        Cmd::Run { spec } => run_spec(cli, ExperimentSpec::from_json(&fs::read_to_string(spec)?)?),
    }
}

fn run_spec(cli: &Cli, mut spec: ExperimentSpec) -> AnyResult<bool> {
    if let Some(n) = cli.budget_nodes {
        spec.budgets.nodes = n;
    }
    let report = run(
        &spec,
        &RunOptions {
            workers: cli.workers,
            seed: cli.seed,
        },
    )?;
    match &cli.out {
        Some(dir) => {
            write_outputs(dir, &report.rows, &report.certs)?;
            eprintln!(
                "{} rows, {} certificates written to {}",
                report.rows.len(),
                report.certs.len(),
                dir.display()
            );
        }
        None => print!("{}", rows_to_csv(&report.rows)?),
    }
    Ok(!report.failed())
}
