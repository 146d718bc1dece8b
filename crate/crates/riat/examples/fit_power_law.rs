//! Pool scaled intervals across thresholds and fit the tail with a
//! KS-minimized power law.
//!
//! ```bash
//! cargo run --example fit_power_law
//! ```

use riat::synth::{market_like, MarketSpec};

fn main() -> riat::Result<()> {
    // A known-answer check first: the fitter on a pure Pareto sample.
    let xs = riat::synth::pareto(10_000, 2.5, 1.0, 17)?;
    let fit = riat::fit_tail(&xs, 0.5, 50)?;
    println!(
        "pure Pareto(delta=2.5): delta = {:.3} +- {:.3}, x_min = {:.3}, KS = {:.4}",
        fit.delta, fit.delta_se, fit.x_min, fit.ks
    );

    // The pipeline form: pooled scaled intervals from market-like data.
    let bars = market_like(&MarketSpec {
        days: 120,
        seed: 19,
        ..MarketSpec::default()
    })?;
    let v = riat::normalized_volumes(&bars)?;
    let q_list = [2.0, 3.0, 4.0, 5.0];
    let pooled = riat::pooled_scaled_sample(&v, &q_list)?;
    let fit = riat::fit_tail(&pooled, 0.1, 50)?;
    println!(
        "\npooled over q = {q_list:?} ({} scaled intervals):",
        pooled.len()
    );
    println!("  x_min    = {:.3}", fit.x_min);
    println!("  delta    = {:.3} ({:.3})", fit.delta, fit.delta_se);
    println!("  c        = {:.4} (tail-mass convention)", fit.c);
    println!("  c_pareto = {:.4} (tail-normalized)", fit.c_pareto);
    println!(
        "  KS       = {:.4} over {} tail samples",
        fit.ks, fit.n_tail
    );
    Ok(())
}
