//! Time switching and power splitting applied to the same received slot.
//!
//! ```text
//! cargo run --example receiver_split
//! ```

use swipt_sim::channel::apply_channel_trial;
use swipt_sim::frontend::{split, RxDesign, RxMode};
use swipt_sim::harness::{transmit_waveform, Scenario};
use swipt_sim::signal::{average_power, watts_to_dbm, IqBuffer};
use swipt_sim::wit::ModulationScheme;

fn dbm(buf: &IqBuffer) -> String {
    match average_power(buf) {
        Ok(p) if p > 0.0 => format!("{:7.2} dBm", watts_to_dbm(p)),
        _ => "   empty  ".to_string(),
    }
}

fn main() -> swipt_sim::Result<()> {
    let s = Scenario::power_splitting(ModulationScheme::Qpsk);
    let (tx, _) = transmit_waveform(&s, 0)?;
    let rx = apply_channel_trial(&tx, &s.channel, 0)?.rx;
    println!("received {} over {} samples", dbm(&rx), rx.len());

    println!("ratio  PS: EH          ID          TS: EH          ID (samples)");
    for ratio in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let ps = split(
            &rx,
            &RxDesign {
                mode: RxMode::PowerSplitting,
                rho_rx: ratio,
                ..Default::default()
            },
        )?;
        let ts = split(
            &rx,
            &RxDesign {
                mode: RxMode::TimeSwitching,
                alpha_rx: ratio,
                ..Default::default()
            },
        )?;
        println!(
            "{ratio:>5}  {}  {}  {}  {} ({})",
            dbm(&ps.eh),
            dbm(&ps.id),
            dbm(&ts.eh),
            dbm(&ts.id),
            ts.id.len()
        );
    }
    Ok(())
}
