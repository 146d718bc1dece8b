//! Run the whole pipeline and write a report bundle: summary table,
//! per-figure TSV data files, and a manifest with the seed and config hash.
//!
//! ```bash
//! cargo run --example full_report
//! ```

use riat::synth::{market_like, MarketSpec};
use riat::RunConfig;

fn main() -> riat::Result<()> {
    let dir = std::env::temp_dir().join("riat-report-example");
    std::fs::create_dir_all(&dir).map_err(|e| riat::Error::io("creating temp dir", e))?;

    let csv = dir.join("market.csv");
    market_like(&MarketSpec {
        days: 60,
        seed: 61,
        ..MarketSpec::default()
    })?
    .write_csv(&csv, ',')?;

    let cfg = RunConfig {
        inputs: vec![("MARKET".into(), csv)],
        n_boot: 500,
        seed: 7,
        trace_trigger: 3.0,
        out_dir: dir.join("out"),
        ..RunConfig::default()
    };
    let bundle = riat::run_full_report(&cfg)?;

    let row = &bundle.rows[0];
    println!("summary row for {}:", row.instrument);
    println!(
        "  x_min = {:.3}  delta = {:.3} ({:.3})  c = {:.4}",
        row.x_min, row.delta, row.delta_se, row.c
    );
    println!(
        "  KS = {:.4} (p = {:.3})  KSW p = {:.3}  W2 = {:.3}",
        row.ks, row.p_ks, row.p_ksw, row.w2
    );
    println!(
        "  decisions at 1%: KS {}, KSW {}, CvM {}",
        row.decision_ks, row.decision_ksw, row.decision_cvm
    );

    println!(
        "\nbundle at {} with {} files:",
        bundle.out_dir.display(),
        bundle.manifest.files.len()
    );
    for f in &bundle.manifest.files {
        println!("  {f}");
    }
    if !bundle.manifest.warnings.is_empty() {
        println!("warnings:");
        for w in &bundle.manifest.warnings {
            println!("  {w}");
        }
    }
    Ok(())
}
