//! Monte-Carlo bit error rate against Eb/N0, coded and uncoded, over AWGN.
//!
//! ```text
//! cargo run --release --example ber_curve -- [bpsk|qpsk|16qam|64qam] [bits]
//! ```

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erfc;

use swipt_sim::channel::{apply_channel, ChannelModel};
use swipt_sim::signal::PowerLevel;
use swipt_sim::spectrum::bin_of;
use swipt_sim::wit::{
    ber, ofdm_demodulate, ofdm_modulate, BitStream, ChannelEstimate, ModulationScheme, OfdmPlan,
};

/// Symbol energy on a data bin and the genie gains for a clean pass.
fn calibrate(plan: &OfdmPlan, payload: &BitStream) -> swipt_sim::Result<(f64, Vec<Complex64>)> {
    let frame = ofdm_modulate(payload, plan, 1.0)?;
    let quiet = ChannelModel {
        noise_floor: PowerLevel::off(),
        ..Default::default()
    };
    let out = apply_channel(&frame.signal, &quiet)?;
    let gains: Vec<Complex64> = out
        .bin_gains
        .iter()
        .map(|g| g * frame.symbol_gain)
        .collect();
    let es = gains[bin_of(plan.data_subcarriers[0], plan.fft_size)].norm_sqr();
    Ok((es, gains))
}

fn measure(
    plan: &OfdmPlan,
    payload: &BitStream,
    ebn0_db: f64,
    info_bits_per_symbol: f64,
) -> swipt_sim::Result<f64> {
    let (es, gains) = calibrate(plan, payload)?;
    let noise = es / (info_bits_per_symbol * 10f64.powf(ebn0_db / 10.0));
    let frame = ofdm_modulate(payload, plan, 1.0)?;
    let ch = ChannelModel {
        noise_floor: PowerLevel::from_watts(noise),
        seed: ebn0_db.to_bits(),
        ..Default::default()
    };
    let out = apply_channel(&frame.signal, &ch)?;
    let decoded = ofdm_demodulate(&out.rx, plan, &ChannelEstimate::Genie(gains), payload.len())?;
    ber(payload, &decoded)
}

fn main() -> swipt_sim::Result<()> {
    let mut args = std::env::args().skip(1);
    let m: ModulationScheme = args.next().as_deref().unwrap_or("qpsk").parse()?;
    let bits: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(200_000);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let payload = BitStream::random(bits, &mut rng);

    let k = m.bits_per_symbol() as f64;
    let uncoded = OfdmPlan::new(m).uncoded();
    let coded = OfdmPlan::new(m);
    println!("{m}, {bits} bits per point");
    println!("Eb/N0 dB  uncoded     rate 3/4    Q(sqrt(2Eb/N0))");
    for step in 0..=12 {
        let ebn0_db = step as f64;
        // exact for BPSK and Gray QPSK only
        let theory = 0.5 * erfc(10f64.powf(ebn0_db / 10.0).sqrt());
        println!(
            "{ebn0_db:>8.1}  {:.3e}   {:.3e}   {theory:.3e}",
            measure(&uncoded, &payload, ebn0_db, k)?,
            measure(&coded, &payload, ebn0_db, k * 0.75)?
        );
    }
    Ok(())
}
