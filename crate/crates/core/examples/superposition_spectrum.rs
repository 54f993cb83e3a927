//! Per-bin power of the superposed transmit signal for a few power ratios.
//! Multisine tones land on the bins the OFDM plan leaves empty.
//!
//! ```text
//! cargo run --example superposition_spectrum
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use swipt_sim::combiner::{superpose, TxDesign, TxMode};
use swipt_sim::multisine::{generate_multisine_samples, MultisineConfig};
use swipt_sim::signal::{average_power, watts_to_dbm};
use swipt_sim::spectrum::{index_of, windowed_bin_power};
use swipt_sim::wit::{ofdm_modulate_padded, BitStream, ModulationScheme, OfdmPlan};

fn main() -> swipt_sim::Result<()> {
    let plan = OfdmPlan::new(ModulationScheme::Qpsk);
    let n = 80 * 100;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let payload = BitStream::random(plan.payload_capacity(100), &mut rng);
    let x_i = ofdm_modulate_padded(&payload, &plan, n, 1.0)?.signal;
    let x_p = generate_multisine_samples(&MultisineConfig::default(), n, 20e6)?;

    for rho in [0.1, 0.5, 0.9] {
        let design = TxDesign {
            mode: TxMode::Superposition,
            rho_tx: rho,
            ..Default::default()
        };
        let sup = superpose(&x_p, &x_i, &design, &plan)?;
        let bins = windowed_bin_power(&sup.signal.samples, 64, plan.cp_len, plan.symbol_len());
        let total: f64 = bins.iter().sum();
        let reserved: f64 = plan
            .reserved_mask()
            .iter()
            .zip(&bins)
            .filter(|(r, _)| **r)
            .map(|(_, p)| p)
            .sum();
        println!(
            "rho_tx {rho}: {:.2} dBm total, {:.1}% of the power on the tone bins",
            watts_to_dbm(average_power(&sup.signal)?),
            100.0 * reserved / total
        );
        let mut per_bin: Vec<(i32, f64)> = (0..64)
            .map(|b| (index_of(b, 64), 10.0 * (bins[b] / total).log10()))
            .filter(|(k, _)| (-20..=20).contains(k))
            .collect();
        per_bin.sort_by_key(|(k, _)| *k);
        let line: Vec<String> = per_bin
            .iter()
            .map(|(k, db)| format!("{k}:{:.0}", db.max(-99.0)))
            .collect();
        println!("  dB per bin {}", line.join(" "));
    }
    Ok(())
}
