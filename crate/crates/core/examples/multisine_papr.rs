//! Peak-to-average power of in-phase multisines, at the grid rate and on an
//! oversampled grid, against `10 log10 N`.
//!
//! ```text
//! cargo run --example multisine_papr
//! ```

use swipt_sim::multisine::{generate_multisine_samples, MultisineConfig};
use swipt_sim::signal::papr_db;

fn main() -> swipt_sim::Result<()> {
    println!("tones  tone set                          PAPR 20 MHz   PAPR x16    10log10(N)");
    for n in [1, 2, 4, 8] {
        let cfg = MultisineConfig::evenly_spaced(n, 1.0);
        let grid = papr_db(&generate_multisine_samples(&cfg, 64, 20e6)?)?;
        let dense = papr_db(&generate_multisine_samples(&cfg, 64 * 16, 320e6)?)?;
        println!(
            "{n:>5}  {:<33} {grid:>11.4}   {dense:>8.4}    {:>8.4}",
            format!("{:?}", cfg.tone_subcarriers),
            10.0 * (n as f64).log10()
        );
    }

    // spreading the phases flattens the envelope
    let cfg = MultisineConfig {
        phases: (0..8)
            .map(|k| std::f64::consts::PI * (k * k) as f64 / 8.0)
            .collect(),
        ..Default::default()
    };
    let dense = papr_db(&generate_multisine_samples(&cfg, 64 * 16, 320e6)?)?;
    println!("8 tones, quadratic phases: {dense:.4} dB");
    Ok(())
}
