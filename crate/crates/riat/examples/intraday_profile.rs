//! Estimate the U-shaped intraday volume pattern and show the
//! deseasonalized, normalized series it produces.
//!
//! ```bash
//! cargo run --example intraday_profile
//! ```

use riat::synth::{market_like, MarketSpec};

fn main() -> riat::Result<()> {
    let bars = market_like(&MarketSpec {
        days: 60,
        seed: 11,
        ..MarketSpec::default()
    })?;

    let profile = riat::intraday_profile(bars.volume_grid())?;
    let a = profile.values();
    println!("minute-of-session profile (shares/min):");
    for s in [0usize, 30, 60, 119, 120, 180, 239] {
        println!("  s = {s:>3}  A(s) = {:>10.1}", a[s]);
    }
    let mid = a[a.len() / 2];
    println!(
        "open/mid = {:.2}, close/mid = {:.2} (U-shape)",
        a[0] / mid,
        a[a.len() - 1] / mid
    );

    let v = riat::normalized_volumes(&bars)?;
    let n = v.len() as f64;
    let mean = v.values().iter().sum::<f64>() / n;
    let sd = (v.values().iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    println!(
        "normalized series: {} minutes, mean {mean:.3}, sd {sd:.6}",
        v.len()
    );
    Ok(())
}
