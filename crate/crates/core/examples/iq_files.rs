//! Write a combined transmit slot as cf32 with its metadata sidecar, then
//! read both back.
//!
//! ```text
//! cargo run --example iq_files -- [output.cf32]
//! ```

use std::path::PathBuf;

use swipt_sim::harness::{transmit_waveform, Scenario};
use swipt_sim::iq::{read_iq, sidecar_path, write_iq, Metadata};
use swipt_sim::signal::{average_power, watts_to_dbm};
use swipt_sim::wit::ModulationScheme;

fn main() -> swipt_sim::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("swipt_combined.cf32"));

    let mut s = Scenario::time_switching(ModulationScheme::Qam16);
    s.tx.alpha_tx = 0.3;
    let (buf, map) = transmit_waveform(&s, 0)?;
    let mut meta = Metadata::new();
    meta.set("kind", "combined");
    meta.set("tx_mode", s.tx.mode);
    meta.set("alpha_tx", s.tx.alpha_tx);
    meta.set("power_dbm", watts_to_dbm(average_power(&buf)?));
    if let Some(m) = map {
        meta.set("segment_boundary", m.boundary);
    }
    write_iq(&path, &buf, &meta)?;

    let (back, meta_back) = read_iq(&path)?;
    let worst = buf
        .samples
        .iter()
        .zip(&back.samples)
        .map(|(a, b)| (a - b).norm() / a.norm().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    println!("{} samples -> {}", back.len(), path.display());
    println!("sidecar {}:", sidecar_path(&path).display());
    for (k, v) in meta_back.iter() {
        println!("  {k} = {v}");
    }
    println!("largest relative cf32 rounding error {worst:.2e}");
    Ok(())
}
