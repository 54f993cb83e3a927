//! Polynomial and circuit rectifier outputs for CW and multisine inputs.
//!
//! ```text
//! cargo run --release --example rectifier_models
//! ```

use swipt_sim::multisine::{generate_multisine_samples, MultisineConfig};
use swipt_sim::rectifier::{
    harvest_dc_circuit, harvest_dc_poly, DiodeCircuit, PolynomialRectifier,
};
use swipt_sim::signal::{dbm_to_watts, papr_db};

fn main() -> swipt_sim::Result<()> {
    let poly = PolynomialRectifier::default();
    let circuit = DiodeCircuit::default();
    for dbm in [-30.0, -20.0, -10.0] {
        println!("input {dbm} dBm");
        println!("  tones  PAPR dB   z (poly)        V_dc (circuit)");
        for n in [1, 2, 4, 8] {
            let cfg = MultisineConfig::evenly_spaced(n, dbm_to_watts(dbm));
            let x = generate_multisine_samples(&cfg, 256, 20e6)?;
            let z = harvest_dc_poly(&x, &poly)?.dc_metric;
            let v = harvest_dc_circuit(&x, &circuit)?.dc_metric;
            println!("  {n:>5}  {:>7.3}   {z:.6e}    {v:.6e}", papr_db(&x)?);
        }
    }
    Ok(())
}
