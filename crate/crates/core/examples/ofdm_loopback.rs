//! Coded OFDM frame through a short multipath channel, decoded with genie
//! and pilot-based channel knowledge.
//!
//! ```text
//! cargo run --release --example ofdm_loopback -- [snr_db]
//! ```

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use swipt_sim::channel::{apply_channel, ChannelModel};
use swipt_sim::signal::{dbm_to_watts, PowerLevel};
use swipt_sim::wit::{
    ber, ofdm_demodulate, ofdm_modulate, BitStream, ChannelEstimate, ModulationScheme, OfdmPlan,
};

fn main() -> swipt_sim::Result<()> {
    let snr_db: f64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(25.0);
    let taps = vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(0.35, -0.2),
        Complex64::new(0.0, 0.1),
    ];
    let channel = ChannelModel {
        taps,
        noise_floor: PowerLevel::dbm(-20.0 - snr_db),
        seed: 5,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let payload = BitStream::random(24_000, &mut rng);

    println!(
        "SNR {snr_db} dB, 3-tap channel, {} payload bits",
        payload.len()
    );
    println!("scheme  symbols  BER genie    BER pilot");
    for m in ModulationScheme::ALL {
        let plan = OfdmPlan::new(m);
        let frame = ofdm_modulate(&payload, &plan, dbm_to_watts(35.0))?;
        let out = apply_channel(&frame.signal, &channel)?;
        let genie: Vec<Complex64> = out
            .bin_gains
            .iter()
            .map(|g| g * frame.symbol_gain)
            .collect();
        let with_genie = ofdm_demodulate(
            &out.rx,
            &plan,
            &ChannelEstimate::Genie(genie),
            payload.len(),
        )?;
        let with_pilots = ofdm_demodulate(
            &out.rx,
            &plan,
            &ChannelEstimate::PilotLeastSquares,
            payload.len(),
        )?;
        println!(
            "{:<6}  {:>7}  {:.3e}    {:.3e}",
            m.to_string(),
            frame.n_symbols,
            ber(&payload, &with_genie)?,
            ber(&payload, &with_pilots)?
        );
    }
    Ok(())
}
