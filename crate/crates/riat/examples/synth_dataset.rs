//! Generate a market-like minute-bar dataset and round-trip it through the
//! CSV loader.
//!
//! ```bash
//! cargo run --example synth_dataset
//! ```

use riat::synth::{market_like, MarketSpec};
use riat::{load_minute_bars, IngestConfig};

fn main() -> riat::Result<()> {
    let spec = MarketSpec {
        days: 30,
        seed: 7,
        ..MarketSpec::default()
    };
    let bars = market_like(&spec)?;
    println!(
        "generated {} days x {} minutes ({} bars) starting {}",
        bars.n_days(),
        bars.minutes_per_day(),
        bars.n_days() * bars.minutes_per_day(),
        bars.days()[0]
    );

    let dir = std::env::temp_dir().join("riat-synth-example");
    std::fs::create_dir_all(&dir).map_err(|e| riat::Error::io("creating temp dir", e))?;
    let path = dir.join("market.csv");
    bars.write_csv(&path, ',')?;
    println!("wrote {}", path.display());

    let reloaded = load_minute_bars(&path, &IngestConfig::default())?;
    assert_eq!(reloaded.series, bars);
    println!("reloaded identically, {} warnings", reloaded.warnings.len());
    Ok(())
}
