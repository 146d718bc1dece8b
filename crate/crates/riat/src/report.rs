//! Full-pipeline report bundles and the plot-data writers.
//!
//! [`run_full_report`] wires ingest -> preprocess -> intervals -> tail fit ->
//! goodness-of-fit -> memory -> coupling for every configured instrument and
//! writes a machine-readable `report.json`, per-instrument TSV data files for
//! each figure-style artifact, and a `manifest.json` carrying the seed and
//! config hash. Identical `(input, config, seed)` produce byte-identical
//! bundles regardless of thread count; a `.partial` marker is left behind if
//! a stage fails.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::coupling::{
    conditioned_volume_trace, coupling_report, default_return_threshold_grid, TraceMode, TriggerOn,
};
use crate::dfa::interval_memory_report;
use crate::error::{Error, Result};
use crate::gof::gof_report;
use crate::ingest::load_minute_bars;
use crate::intervals::{conditional_pdf, mean_conditional_interval, scaled_interval_pdf, Binning};
use crate::preprocess::{align_returns, intraday_profile, normalized_volumes, IntradayProfile};
use crate::tailfit::fit_tail;

/// One instrument's row of the summary table.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub instrument: String,
    pub q_list: Vec<f64>,
    pub x_min: f64,
    pub delta: f64,
    pub delta_se: f64,
    pub c: f64,
    pub c_pareto: f64,
    pub ks: f64,
    pub ksw: f64,
    pub p_ks: f64,
    pub p_ksw: f64,
    pub w2: f64,
    pub n_tail: usize,
    pub n_total: usize,
    pub n_boot: usize,
    pub seed: u64,
    pub decision_ks: bool,
    pub decision_ksw: bool,
    pub decision_cvm: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
    pub n_boot: usize,
    pub q_list: Vec<f64>,
    pub instruments: Vec<String>,
    pub files: Vec<String>,
    pub warnings: Vec<String>,
}

/// Everything a report run produced.
#[derive(Debug)]
pub struct ReportBundle {
    pub rows: Vec<TableRow>,
    pub manifest: Manifest,
    pub out_dir: PathBuf,
}

/// FNV-1a, used for the manifest's config hash and per-instrument seeds.
pub(crate) fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Seed for one instrument: stable under reordering of the input list.
fn instrument_seed(master: u64, instrument: &str) -> u64 {
    master ^ fnv1a64(instrument.as_bytes())
}

struct InstrumentOutput {
    row: TableRow,
    files: Vec<String>,
    warnings: Vec<String>,
}

/// Run the full pipeline for every configured instrument.
pub fn run_full_report(cfg: &RunConfig) -> Result<ReportBundle> {
    cfg.validate().map_err(|e| e.in_stage("config"))?;
    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| Error::io(format!("creating {}", cfg.out_dir.display()), e).in_stage("io"))?;
    let marker = cfg.out_dir.join(".partial");
    std::fs::write(&marker, "report in progress\n")
        .map_err(|e| Error::io(format!("writing {}", marker.display()), e).in_stage("io"))?;

    let run = || -> Result<Vec<InstrumentOutput>> {
        let results: Vec<Result<InstrumentOutput>> = cfg
            .inputs
            .par_iter()
            .map(|(id, path)| process_instrument(cfg, id, path))
            .collect();
        results.into_iter().collect()
    };
    let outputs = match cfg.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")).in_stage("config"))?;
            pool.install(run)
        }
        None => run(),
    }?;

    let mut rows = Vec::with_capacity(outputs.len());
    let mut files = Vec::new();
    let mut warnings = Vec::new();
    for out in outputs {
        rows.push(out.row);
        files.extend(out.files);
        warnings.extend(out.warnings);
    }

    write_json(&cfg.out_dir.join("report.json"), &rows)?;
    files.push("report.json".to_string());
    files.push("manifest.json".to_string());
    files.sort();

    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        config_hash: format!("{:016x}", fnv1a64(cfg.raw_text.as_bytes())),
        n_boot: cfg.n_boot,
        q_list: cfg.q_list.clone(),
        instruments: cfg.inputs.iter().map(|(id, _)| id.clone()).collect(),
        files,
        warnings,
    };
    write_json(&cfg.out_dir.join("manifest.json"), &manifest)?;

    std::fs::remove_file(&marker)
        .map_err(|e| Error::io(format!("removing {}", marker.display()), e).in_stage("io"))?;

    Ok(ReportBundle {
        rows,
        manifest,
        out_dir: cfg.out_dir.clone(),
    })
}

fn process_instrument(cfg: &RunConfig, id: &str, path: &Path) -> Result<InstrumentOutput> {
    let seed = instrument_seed(cfg.seed, id);
    let dir = cfg.out_dir.join(id);
    std::fs::create_dir_all(&dir)
        .map_err(|e| Error::io(format!("creating {}", dir.display()), e).in_stage("io"))?;
    let mut files = Vec::new();
    let mut warnings = Vec::new();
    let mut track = |name: String| -> String {
        files.push(format!("{id}/{name}"));
        name
    };

    // Ingest.
    let loaded = load_minute_bars(path, &cfg.ingest).map_err(|e| e.in_stage("ingest"))?;
    warnings.extend(loaded.warnings.iter().map(|w| format!("{id}: {w}")));
    let bars = loaded.series;

    // Preprocess.
    let profile = intraday_profile(bars.volume_grid()).map_err(|e| e.in_stage("preprocess"))?;
    let v = normalized_volumes(&bars).map_err(|e| e.in_stage("preprocess"))?;
    let returns = crate::ingest::to_returns(&bars).map_err(|e| e.in_stage("preprocess"))?;
    let aligned = align_returns(&returns).map_err(|e| e.in_stage("preprocess"))?;
    let name = track("profile.tsv".into());
    write_profile_tsv(&dir.join(&name), &profile)?;

    // Intervals and their scaled distributions.
    for &q in &cfg.q_list {
        let ris = v
            .recurrence_intervals(q)
            .map_err(|e| e.in_stage("intervals"))?;
        let pdf = scaled_interval_pdf(&ris).map_err(|e| e.in_stage("intervals"))?;
        let name = track(format!("scaled_pdf_{}.tsv", q_label(q)));
        write_pdf_tsv(&dir.join(&name), &pdf.points)?;

        let cond = conditional_pdf(&ris, 4).map_err(|e| e.in_stage("intervals"))?;
        let name = track(format!("conditional_{}.tsv", q_label(q)));
        write_conditional_tsv(&dir.join(&name), &cond)?;

        let curve = mean_conditional_interval(&ris, 20, Binning::Log)
            .map_err(|e| e.in_stage("intervals"))?;
        let name = track(format!("mean_conditional_{}.tsv", q_label(q)));
        write_xy_tsv(&dir.join(&name), "tau0_scaled\tmean_tau_scaled", &curve)?;
    }

    // Tail fit and goodness-of-fit on the pooled scaled sample.
    let pooled =
        crate::tailfit::pooled_scaled_sample(&v, &cfg.q_list).map_err(|e| e.in_stage("fit"))?;
    let fit =
        fit_tail(&pooled, cfg.x_min_floor, cfg.n_tail_floor).map_err(|e| e.in_stage("fit"))?;
    let gof = gof_report(&fit, &pooled, cfg.n_boot, seed).map_err(|e| e.in_stage("gof"))?;
    warnings.extend(gof.warnings.iter().map(|w| format!("{id}: {w}")));

    // Long-memory diagnostics.
    let memory = interval_memory_report(&v, &cfg.q_list, cfg.dfa_order, seed)
        .map_err(|e| e.in_stage("dfa"))?;
    warnings.extend(memory.warnings.iter().map(|w| format!("{id}: {w}")));
    for qm in &memory.per_q {
        let name = track(format!("dfa_{}.tsv", q_label(qm.q)));
        write_dfa_tsv(&dir.join(&name), &qm.raw.scales, &qm.raw.fluctuation)?;
    }
    let name = track("dfa_alphas.json".into());
    write_json(&dir.join(&name), &dfa_alpha_json(&memory))?;

    // Volume-return coupling.
    let grid = match &cfg.q_grid {
        Some(g) => g.clone(),
        None => default_return_threshold_grid(&aligned),
    };
    let mut coupling_rows = Vec::new();
    for &q in &cfg.q_list {
        let report = coupling_report(&v, &aligned, q, &grid).map_err(|e| e.in_stage("couple"))?;
        let name = track(format!("comovement_{}.tsv", q_label(q)));
        write_comovement_tsv(&dir.join(&name), &report.comovement)?;
        coupling_rows.push(serde_json::json!({
            "q": q,
            "c_r_tau": report.c_r_tau,
            "n_pairs": report.n_pairs,
            "n_intervals": report.n_intervals,
            "n_used": report.n_used,
        }));
    }
    let name = track("coupling.json".into());
    write_json(&dir.join(&name), &coupling_rows)?;

    let trace = conditioned_volume_trace(
        &v,
        &aligned,
        cfg.trace_trigger,
        cfg.trace_horizon,
        TraceMode::Average,
        TriggerOn::Signed,
    )
    .map_err(|e| e.in_stage("trace"))?;
    let name = track("trace.tsv".into());
    write_trace_tsv(&dir.join(&name), &trace)?;

    let row = TableRow {
        instrument: id.to_string(),
        q_list: cfg.q_list.clone(),
        x_min: fit.x_min,
        delta: fit.delta,
        delta_se: fit.delta_se,
        c: fit.c,
        c_pareto: fit.c_pareto,
        ks: gof.ks,
        ksw: gof.ksw,
        p_ks: gof.p_ks,
        p_ksw: gof.p_ksw,
        w2: gof.w2,
        n_tail: fit.n_tail,
        n_total: fit.n_total,
        n_boot: cfg.n_boot,
        seed,
        decision_ks: gof.decision_ks,
        decision_ksw: gof.decision_ksw,
        decision_cvm: gof.decision_cvm,
    };
    assert_row_finite(&row)?;
    Ok(InstrumentOutput {
        row,
        files,
        warnings,
    })
}

fn assert_row_finite(row: &TableRow) -> Result<()> {
    let values = [
        row.x_min,
        row.delta,
        row.delta_se,
        row.c,
        row.c_pareto,
        row.ks,
        row.ksw,
        row.p_ks,
        row.p_ksw,
        row.w2,
    ];
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Stats(format!(
            "non-finite value {bad} in the report row for {}",
            row.instrument
        ))
        .in_stage("report"));
    }
    Ok(())
}

fn dfa_alpha_json(memory: &crate::dfa::MemoryReport) -> serde_json::Value {
    serde_json::json!({
        "source_alpha": memory.source.alpha,
        "source_alpha_se": memory.source.alpha_se,
        "per_q": memory.per_q.iter().map(|qm| serde_json::json!({
            "q": qm.q,
            "n_intervals": qm.n_intervals,
            "alpha": qm.raw.alpha,
            "alpha_se": qm.raw.alpha_se,
            "alpha_shuffled": qm.shuffled.alpha,
            "alpha_shuffled_se": qm.shuffled.alpha_se,
        })).collect::<Vec<_>>(),
    })
}

/// `2` for 2.0, `2.5` for 2.5: filenames stay readable for integer thresholds.
pub fn q_label(q: f64) -> String {
    if q == q.trunc() {
        format!("q{}", q as i64)
    } else {
        format!("q{q}")
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Stats(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn write_profile_tsv(path: &Path, profile: &IntradayProfile) -> Result<()> {
    let mut out = String::from("s\ta\n");
    for (s, a) in profile.values().iter().enumerate() {
        let _ = writeln!(out, "{s}\t{a}");
    }
    std::fs::write(path, out).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn write_pdf_tsv(path: &Path, points: &[crate::pdf::PdfPoint]) -> Result<()> {
    let mut out = String::from("x\tdensity\tcount\n");
    for p in points {
        let _ = writeln!(out, "{}\t{}\t{}", p.x, p.density, p.count);
    }
    std::fs::write(path, out).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn write_conditional_tsv(path: &Path, cond: &crate::intervals::ConditionalStats) -> Result<()> {
    let mut out = String::from("bin\ttau0_lo\ttau0_hi\tx\tdensity\tcount\n");
    for (b, bin) in cond.bins.iter().enumerate() {
        for p in &bin.pdf {
            let _ = writeln!(
                out,
                "{b}\t{}\t{}\t{}\t{}\t{}",
                bin.tau0_range.0, bin.tau0_range.1, p.x, p.density, p.count
            );
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn write_xy_tsv(path: &Path, header: &str, points: &[(f64, f64)]) -> Result<()> {
    let mut out = format!("{header}\n");
    for (x, y) in points {
        let _ = writeln!(out, "{x}\t{y}");
    }
    std::fs::write(path, out).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn write_dfa_tsv(path: &Path, scales: &[usize], fluctuation: &[f64]) -> Result<()> {
    let mut out = String::from("l\tf\n");
    for (l, f) in scales.iter().zip(fluctuation) {
        let _ = writeln!(out, "{l}\t{f}");
    }
    std::fs::write(path, out).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn write_comovement_tsv(
    path: &Path,
    points: &[crate::coupling::ComovementPoint],
) -> Result<()> {
    let mut out = String::from("Q\tP\tn\n");
    for p in points {
        let _ = writeln!(out, "{}\t{}\t{}", p.threshold, p.p, p.n_exceed);
    }
    std::fs::write(path, out).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn write_trace_tsv(path: &Path, trace: &[(usize, f64)]) -> Result<()> {
    let mut out = String::from("offset\tmean_v\n");
    for (offset, mean_v) in trace {
        let _ = writeln!(out, "{offset}\t{mean_v}");
    }
    std::fs::write(path, out).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// Per-threshold interval files for the `intervals` subcommand: a TSV of
/// `(start_index, tau)` and a JSON summary.
pub fn write_interval_files(
    dir: &Path,
    ris: &crate::intervals::RecurrenceIntervalSeries,
) -> Result<(String, String)> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let tsv_name = format!("intervals_{}.tsv", q_label(ris.q()));
    let mut out = String::from("start_index\ttau\n");
    for (&s, &t) in ris.start_index().iter().zip(ris.tau()) {
        let _ = writeln!(out, "{s}\t{t}");
    }
    let tsv_path = dir.join(&tsv_name);
    std::fs::write(&tsv_path, out)
        .map_err(|e| Error::io(format!("writing {}", tsv_path.display()), e))?;

    let json_name = format!("intervals_{}.json", q_label(ris.q()));
    write_json(
        &dir.join(&json_name),
        &serde_json::json!({
            "q": ris.q(),
            "count": ris.len(),
            "mean_tau": ris.mean_tau(),
        }),
    )?;
    Ok((tsv_name, json_name))
}
