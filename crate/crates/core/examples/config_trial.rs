//! Parse a configuration and run a handful of trials from it.
//!
//! ```text
//! cargo run --release --example config_trial -- [config-file]
//! ```

use swipt_sim::config::RunConfig;
use swipt_sim::harness::run_trial;

const INLINE: &str = "\
tx.mode = superposition
tx.rho = 0.6
rx.mode = power-splitting
rx.rho = 0.4
ofdm.modulation = 64qam
ofdm.channel_estimation = pilot
channel.taps = 1, 0.2-0.1i
rectifier.model = circuit
";

fn main() -> swipt_sim::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => RunConfig::load(path.as_ref())?,
        None => INLINE.parse::<RunConfig>()?,
    };
    let s = &cfg.scenario;
    println!("config sha256 {}", cfg.sha256);
    println!(
        "{} {} with {} rectifier",
        s.mode_label(),
        s.plan.modulation,
        s.rectifier.variant_name()
    );
    for trial in 0..4 {
        let o = run_trial(s, trial)?;
        println!(
            "trial {trial}: dc {:.4e}, energy {:.4e}, BER {}, {:.2} Mbps",
            o.dc_metric,
            o.energy_j,
            o.ber.map_or("undefined".into(), |b| format!("{b:.2e}")),
            o.throughput_mbps
        );
    }
    Ok(())
}
