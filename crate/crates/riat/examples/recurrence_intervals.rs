//! Extract recurrence intervals between volume exceedances and inspect the
//! threshold dependence and the scaled interval distribution.
//!
//! ```bash
//! cargo run --example recurrence_intervals
//! ```

use riat::intervals::scaled_interval_pdf;
use riat::synth::{market_like, MarketSpec};

fn main() -> riat::Result<()> {
    let bars = market_like(&MarketSpec {
        days: 120,
        seed: 13,
        ..MarketSpec::default()
    })?;
    let v = riat::normalized_volumes(&bars)?;

    println!(
        "{:>4} {:>8} {:>10} {:>10}",
        "q", "events", "intervals", "mean tau"
    );
    for q in [2.0, 3.0, 4.0, 5.0] {
        let ris = v.recurrence_intervals(q)?;
        println!(
            "{q:>4} {:>8} {:>10} {:>10.1}",
            ris.len() + 1,
            ris.len(),
            ris.mean_tau()
        );
    }

    // Scaled distribution at q = 2: heavy tail over two decades.
    let ris = v.recurrence_intervals(2.0)?;
    let pdf = scaled_interval_pdf(&ris)?;
    println!("\nscaled PDF at q = 2 (x = tau/<tau>, p = P(tau) <tau>):");
    for p in pdf.points.iter().step_by(3) {
        println!(
            "  x = {:>8.3}  p = {:>10.5}  ({} samples)",
            p.x, p.density, p.count
        );
    }
    println!("integral = {:.4}", pdf.integral());
    Ok(())
}
