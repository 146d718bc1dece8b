//! Volume-return coupling: interval/return correlation, comovement
//! probability, and the average volume evolution after a large return.
//!
//! ```bash
//! cargo run --example volume_return_coupling
//! ```

use riat::coupling::{
    comovement_probability, conditioned_volume_trace, default_return_threshold_grid,
    interval_return_correlation, TraceMode, TriggerOn,
};
use riat::synth::{market_like, MarketSpec};

fn main() -> riat::Result<()> {
    let bars = market_like(&MarketSpec {
        days: 250,
        seed: 53,
        ..MarketSpec::default()
    })?;
    let v = riat::normalized_volumes(&bars)?;
    let returns = riat::to_returns(&bars)?;
    let aligned = riat::align_returns(&returns)?;

    // Correlation between each interval and the return magnitude at its
    // opening exceedance (near zero here: the generator's price walk is
    // independent of its volumes).
    println!("{:>4} {:>10} {:>10}", "q", "pairs", "C(|r|,tau)");
    for q in [2.0, 3.0] {
        let ris = v.recurrence_intervals(q)?;
        let corr = interval_return_correlation(&ris, &aligned)?;
        println!("{q:>4} {:>10} {:>10.4}", corr.n_pairs, corr.c);
    }

    // Comovement probability against the return threshold.
    let grid = default_return_threshold_grid(&aligned);
    let co = comovement_probability(&v, &aligned, 2.0, &grid)?;
    println!(
        "\ncomovement at q = 2 ({} of {} intervals have returns at both ends):",
        co.n_used, co.n_intervals
    );
    for point in co.points.iter().step_by(8) {
        println!(
            "  Q = {:>6.3}  P(tau | |r| > Q) = {:>7.4}  ({} intervals)",
            point.threshold, point.p, point.n_exceed
        );
    }

    // Mean volume trace after returns beyond three standard deviations.
    let trace = conditioned_volume_trace(
        &v,
        &aligned,
        3.0,
        120,
        TraceMode::Average,
        TriggerOn::Signed,
    )?;
    let head: f64 = trace[..30].iter().map(|&(_, m)| m).sum::<f64>() / 30.0;
    let tail: f64 = trace[90..].iter().map(|&(_, m)| m).sum::<f64>() / 30.0;
    println!("\npost-trigger volume trace (r > 3): offsets 1-30 average {head:.3}, offsets 91-120 average {tail:.3}");
    Ok(())
}
