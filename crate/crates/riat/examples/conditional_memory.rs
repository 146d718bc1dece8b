//! Short-term memory diagnostics: the conditional interval distribution and
//! the mean conditional interval, contrasted between long-memory volumes and
//! their shuffled control.
//!
//! ```bash
//! cargo run --example conditional_memory
//! ```

use riat::intervals::{conditional_pdf, mean_conditional_interval, Binning};
use riat::preprocess::{NormalizedSeries, SeriesSource};

fn main() -> riat::Result<()> {
    // Long-memory lognormal volumes.
    let latent = riat::synth::fgn(1 << 17, 0.9, 31)?;
    let volumes: Vec<f64> = latent.iter().map(|&g| g.exp()).collect();
    let v = NormalizedSeries::from_values(volumes, SeriesSource::Volume)?;
    let q = 1.5;
    let ris = v.recurrence_intervals(q)?;
    println!(
        "q = {q}: {} intervals, mean tau = {:.1}",
        ris.len(),
        ris.mean_tau()
    );

    let stats = conditional_pdf(&ris, 4)?;
    println!("\npreceding-interval quartiles and their mean successors:");
    for (b, bin) in stats.bins.iter().enumerate() {
        let mean_succ =
            bin.successors.iter().map(|&t| t as f64).sum::<f64>() / bin.successors.len() as f64;
        println!(
            "  bin {b}: tau0 in [{:>4}, {:>5}]  ->  <tau | tau0> = {:>7.1}",
            bin.tau0_range.0, bin.tau0_range.1, mean_succ
        );
    }
    println!("(small tau0 followed by small tau: short-term memory)");

    let curve = mean_conditional_interval(&ris, 10, Binning::Log)?;
    println!("\nmean conditional interval (both axes scaled by <tau>):");
    for (x, y) in &curve {
        println!("  tau0/<tau> = {x:>7.3}  ->  {y:>6.3}");
    }

    // Shuffling the intervals destroys the effect: the curve flattens at 1.
    let shuffled = riat::shuffle(ris.tau(), 37);
    let starts: Vec<usize> = shuffled
        .iter()
        .scan(0usize, |pos, &t| {
            let here = *pos;
            *pos += t as usize;
            Some(here)
        })
        .collect();
    let control = riat::RecurrenceIntervalSeries::from_parts(q, starts, shuffled)?;
    let flat = mean_conditional_interval(&control, 10, Binning::Log)?;
    println!("\nsame intervals, shuffled:");
    for (x, y) in &flat {
        println!("  tau0/<tau> = {x:>7.3}  ->  {y:>6.3}");
    }
    Ok(())
}
