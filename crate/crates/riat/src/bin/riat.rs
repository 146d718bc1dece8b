//! Command-line front end: each subcommand is a thin wrapper over the library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use riat::config::{parse_comma_list, KeyValues, RunConfig};
use riat::coupling::{TraceMode, TriggerOn};
use riat::error::{Error, Result};
use riat::report::{
    q_label, write_comovement_tsv, write_dfa_tsv, write_interval_files, write_json,
    write_profile_tsv, write_trace_tsv,
};

#[derive(Parser)]
#[command(
    name = "riat",
    version,
    about = "Recurrence-interval analysis of minute-bar market data"
)]
struct Cli {
    /// Key-value run configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread count (overrides the config).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Minute-bar data file (defaults to the config's first input).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Comma-separated thresholds, e.g. `2,3,4,5`.
    #[arg(long)]
    q: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the intraday volume profile as a two-column TSV.
    Profile(InputArgs),
    /// Extract recurrence intervals per threshold (TSV + JSON summary).
    Intervals(InputArgs),
    /// Fit the pooled scaled-interval tail with a power law.
    Fit {
        /// Minute-bar data file (defaults to the config's first input).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Comma-separated thresholds, e.g. `2,3,4,5`.
        #[arg(long)]
        q: Option<String>,
        /// Smallest candidate lower bound for the tail scan.
        #[arg(long = "xmin-floor")]
        xmin_floor: Option<f64>,
        /// Output file for the fit report.
        #[arg(long, default_value = "fit.json")]
        out: PathBuf,
    },
    /// Fit plus bootstrap goodness-of-fit report.
    Gof {
        /// Minute-bar data file (defaults to the config's first input).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Comma-separated thresholds, e.g. `2,3,4,5`.
        #[arg(long)]
        q: Option<String>,
        /// Bootstrap replicates.
        #[arg(long = "n-boot")]
        n_boot: Option<usize>,
        /// Statistics to test: any of `ks,ksw,cvm`.
        #[arg(long, default_value = "ks,ksw,cvm")]
        stat: String,
        /// Output file for the goodness-of-fit report.
        #[arg(long, default_value = "gof.json")]
        out: PathBuf,
    },
    /// Conditional interval distributions (short-memory diagnostics).
    Conditional(InputArgs),
    /// Detrended fluctuation analysis of interval sequences with shuffle control.
    Dfa {
        #[command(flatten)]
        input: InputArgs,
        /// Detrending polynomial order.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Interval-return correlation and comovement curves.
    Couple(InputArgs),
    /// Comovement probability curves only.
    Comove(InputArgs),
    /// Mean volume evolution after large returns.
    Trace {
        #[command(flatten)]
        input: InputArgs,
        /// Return threshold firing an event.
        #[arg(long)]
        trigger: Option<f64>,
        /// Minutes to follow each event.
        #[arg(long)]
        horizon: Option<usize>,
        /// Trigger on |r| instead of the signed return.
        #[arg(long)]
        abs: bool,
        /// Emit a single event's trace instead of the average.
        #[arg(long)]
        event: Option<usize>,
    },
    /// Generate a synthetic dataset from a generator spec file.
    Synth {
        /// Generator spec (key-value file with a `kind =` entry).
        #[arg(long)]
        spec: PathBuf,
        /// Output file (CSV for market-like specs, TSV otherwise).
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full pipeline for every configured instrument.
    Report {
        /// Output directory (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code().clamp(0, 255) as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(threads) = cli.threads {
        cfg.threads = Some(threads);
    }
    if let Some(threads) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }

    match cli.command {
        Command::Profile(args) => {
            let (bars, _) = load(&cfg, &args)?;
            let profile = riat::intraday_profile(bars.volume_grid())?;
            let path = ensure_dir(&args.out)?.join("profile.tsv");
            write_profile_tsv(&path, &profile)?;
            println!("{}", path.display());
        }
        Command::Intervals(args) => {
            let (bars, q_list) = load(&cfg, &args)?;
            let v = riat::normalized_volumes(&bars)?;
            for &q in &q_list {
                let ris = v.recurrence_intervals(q)?;
                let (tsv, json) = write_interval_files(&args.out, &ris)?;
                println!("{}", args.out.join(tsv).display());
                println!("{}", args.out.join(json).display());
            }
        }
        Command::Fit {
            input,
            q,
            xmin_floor,
            out,
        } => {
            let (bars, q_list) = load_from(&cfg, &input, &q)?;
            let v = riat::normalized_volumes(&bars)?;
            let pooled = riat::pooled_scaled_sample(&v, &q_list)?;
            let floor = xmin_floor.unwrap_or(cfg.x_min_floor);
            let fit = riat::fit_tail(&pooled, floor, cfg.n_tail_floor)?;
            let path = out;
            write_json(
                &path,
                &serde_json::json!({
                    "q_list": q_list,
                    "x_min": fit.x_min,
                    "delta": fit.delta,
                    "delta_se": fit.delta_se,
                    "c": fit.c,
                    "c_pareto": fit.c_pareto,
                    "ks": fit.ks,
                    "n_tail": fit.n_tail,
                    "n_total": fit.n_total,
                }),
            )?;
            println!("{}", path.display());
        }
        Command::Gof {
            input,
            q,
            n_boot,
            stat,
            out,
        } => {
            let (bars, q_list) = load_from(&cfg, &input, &q)?;
            let v = riat::normalized_volumes(&bars)?;
            let pooled = riat::pooled_scaled_sample(&v, &q_list)?;
            let fit = riat::fit_tail(&pooled, cfg.x_min_floor, cfg.n_tail_floor)?;
            let n_boot = n_boot.unwrap_or(cfg.n_boot);
            let stats: Vec<String> = parse_comma_list(&stat).map_err(Error::Config)?;
            let mut row = serde_json::Map::new();
            row.insert("q_list".into(), serde_json::json!(q_list));
            row.insert("x_min".into(), serde_json::json!(fit.x_min));
            row.insert("delta".into(), serde_json::json!(fit.delta));
            row.insert("delta_se".into(), serde_json::json!(fit.delta_se));
            row.insert("c".into(), serde_json::json!(fit.c));
            row.insert("n_tail".into(), serde_json::json!(fit.n_tail));
            row.insert("n_boot".into(), serde_json::json!(n_boot));
            row.insert("seed".into(), serde_json::json!(cfg.seed));
            for s in &stats {
                match s.as_str() {
                    "ks" => {
                        let p = riat::bootstrap_pvalue(
                            &fit,
                            &pooled,
                            riat::TailStatistic::Ks,
                            n_boot,
                            cfg.seed,
                        )?;
                        row.insert("ks".into(), serde_json::json!(fit.ks));
                        row.insert("p_ks".into(), serde_json::json!(p));
                        row.insert("decision_ks".into(), serde_json::json!(p > 0.01));
                    }
                    "ksw" => {
                        let ksw = riat::ksw_distance(&pooled, fit.x_min, fit.delta);
                        let p = riat::bootstrap_pvalue(
                            &fit,
                            &pooled,
                            riat::TailStatistic::Ksw,
                            n_boot,
                            cfg.seed,
                        )?;
                        row.insert("ksw".into(), serde_json::json!(ksw));
                        row.insert("p_ksw".into(), serde_json::json!(p));
                        row.insert("decision_ksw".into(), serde_json::json!(p > 0.01));
                    }
                    "cvm" => {
                        let w2 = riat::cvm_statistic(&pooled, fit.x_min, fit.delta);
                        row.insert("w2".into(), serde_json::json!(w2));
                        row.insert(
                            "decision_cvm".into(),
                            serde_json::json!(riat::gof::cvm_passes(w2)),
                        );
                    }
                    other => {
                        return Err(Error::Config(format!(
                            "unknown statistic {other:?}: expected ks, ksw or cvm"
                        )))
                    }
                }
            }
            write_json(&out, &serde_json::Value::Object(row))?;
            println!("{}", out.display());
        }
        Command::Conditional(args) => {
            let (bars, q_list) = load(&cfg, &args)?;
            let v = riat::normalized_volumes(&bars)?;
            let out = ensure_dir(&args.out)?;
            for &q in &q_list {
                let ris = v.recurrence_intervals(q)?;
                let cond = riat::conditional_pdf(&ris, 4)?;
                let path = out.join(format!("conditional_{}.tsv", q_label(q)));
                riat::report::write_conditional_tsv(&path, &cond)?;
                println!("{}", path.display());
                let curve =
                    riat::mean_conditional_interval(&ris, 20, riat::intervals::Binning::Log)?;
                let path = out.join(format!("mean_conditional_{}.tsv", q_label(q)));
                riat::report::write_xy_tsv(&path, "tau0_scaled\tmean_tau_scaled", &curve)?;
                println!("{}", path.display());
            }
        }
        Command::Dfa { input, order } => {
            let (bars, q_list) = load(&cfg, &input)?;
            let v = riat::normalized_volumes(&bars)?;
            let order = order.unwrap_or(cfg.dfa_order);
            let memory = riat::interval_memory_report(&v, &q_list, order, cfg.seed)?;
            let out = ensure_dir(&input.out)?;
            for qm in &memory.per_q {
                let path = out.join(format!("dfa_{}.tsv", q_label(qm.q)));
                write_dfa_tsv(&path, &qm.raw.scales, &qm.raw.fluctuation)?;
                println!("{}", path.display());
            }
            for w in &memory.warnings {
                eprintln!("warning: {w}");
            }
            let path = out.join("dfa_alphas.json");
            write_json(
                &path,
                &serde_json::json!({
                    "source_alpha": memory.source.alpha,
                    "per_q": memory.per_q.iter().map(|qm| serde_json::json!({
                        "q": qm.q,
                        "n_intervals": qm.n_intervals,
                        "alpha": qm.raw.alpha,
                        "alpha_shuffled": qm.shuffled.alpha,
                    })).collect::<Vec<_>>(),
                }),
            )?;
            println!("{}", path.display());
        }
        Command::Couple(args) => run_coupling(&cfg, &args, true)?,
        Command::Comove(args) => run_coupling(&cfg, &args, false)?,
        Command::Trace {
            input,
            trigger,
            horizon,
            abs,
            event,
        } => {
            let (bars, _) = load(&cfg, &input)?;
            let v = riat::normalized_volumes(&bars)?;
            let returns = riat::to_returns(&bars)?;
            let aligned = riat::align_returns(&returns)?;
            let mode = match event {
                Some(i) => TraceMode::Single(i),
                None => TraceMode::Average,
            };
            let on = if abs {
                TriggerOn::Abs
            } else {
                TriggerOn::Signed
            };
            let trace = riat::conditioned_volume_trace(
                &v,
                &aligned,
                trigger.unwrap_or(cfg.trace_trigger),
                horizon.unwrap_or(cfg.trace_horizon),
                mode,
                on,
            )?;
            let path = ensure_dir(&input.out)?.join("trace.tsv");
            write_trace_tsv(&path, &trace)?;
            println!("{}", path.display());
        }
        Command::Synth { spec, out } => {
            let kv = KeyValues::from_file(&spec)?;
            let spec = riat::GeneratorSpec::from_key_values(&kv)?;
            match riat::synth::generate(&spec)? {
                riat::synth::Generated::Bars(bars) => {
                    bars.write_csv(&out, ',')?;
                }
                riat::synth::Generated::Series(series) => {
                    let mut text = String::from("index\tvalue\n");
                    for (i, x) in series.iter().enumerate() {
                        text.push_str(&format!("{i}\t{x}\n"));
                    }
                    std::fs::write(&out, text)
                        .map_err(|e| Error::io(format!("writing {}", out.display()), e))?;
                }
            }
            println!("{}", out.display());
        }
        Command::Report { out } => {
            if let Some(out) = out {
                cfg.out_dir = out;
            }
            // The pool is already configured globally; avoid a nested pool.
            cfg.threads = None;
            let bundle = riat::run_full_report(&cfg)?;
            println!("{}", bundle.out_dir.join("report.json").display());
            for w in &bundle.manifest.warnings {
                eprintln!("warning: {w}");
            }
        }
    }
    Ok(())
}

/// Shared body of `couple` and `comove`: both emit the comovement TSVs;
/// `couple` also writes the correlation JSON.
fn run_coupling(cfg: &RunConfig, args: &InputArgs, with_correlation: bool) -> Result<()> {
    let (bars, q_list) = load(cfg, args)?;
    let v = riat::normalized_volumes(&bars)?;
    let returns = riat::to_returns(&bars)?;
    let aligned = riat::align_returns(&returns)?;
    let grid = match &cfg.q_grid {
        Some(g) => g.clone(),
        None => riat::coupling::default_return_threshold_grid(&aligned),
    };
    let out = ensure_dir(&args.out)?;
    let mut rows = Vec::new();
    for &q in &q_list {
        let report = riat::coupling_report(&v, &aligned, q, &grid)?;
        let path = out.join(format!("comovement_{}.tsv", q_label(q)));
        write_comovement_tsv(&path, &report.comovement)?;
        println!("{}", path.display());
        rows.push(serde_json::json!({
            "q": q,
            "c_r_tau": report.c_r_tau,
            "n_pairs": report.n_pairs,
        }));
    }
    if with_correlation {
        let path = out.join("coupling.json");
        write_json(&path, &rows)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn load(cfg: &RunConfig, args: &InputArgs) -> Result<(riat::MinuteBarSeries, Vec<f64>)> {
    load_from(cfg, &args.input, &args.q)
}

fn load_from(
    cfg: &RunConfig,
    input: &Option<PathBuf>,
    q: &Option<String>,
) -> Result<(riat::MinuteBarSeries, Vec<f64>)> {
    let path =
        match input {
            Some(p) => p.clone(),
            None => cfg.inputs.first().map(|(_, p)| p.clone()).ok_or_else(|| {
                Error::Config("no --input given and no input in the config".into())
            })?,
        };
    let loaded = riat::load_minute_bars(&path, &cfg.ingest)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    let q_list = match q {
        Some(text) => parse_comma_list(text).map_err(Error::Config)?,
        None => cfg.q_list.clone(),
    };
    Ok((loaded.series, q_list))
}

fn ensure_dir(dir: &PathBuf) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    Ok(dir.clone())
}
