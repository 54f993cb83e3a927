//! The transient rectifier checked against a deliberately plain solver:
//! backward Euler on a finer time grid, bisection for the diode voltage and
//! a cosine source evaluated directly instead of an upsampled envelope.

use num_complex::Complex64;

use swipt_sim::multisine::{generate_multisine_samples, MultisineConfig};
use swipt_sim::rectifier::{
    harvest_dc_circuit, harvest_dc_poly, DiodeCircuit, PolynomialRectifier,
};
use swipt_sim::signal::{dbm_to_watts, IqBuffer};

const STEPS_PER_CYCLE: usize = 32;

fn diode_current(c: &DiodeCircuit, v: f64) -> f64 {
    c.saturation_current_a * ((v / (c.ideality * c.thermal_voltage_v)).exp() - 1.0)
}

/// Mean output voltage over the last `tail` cycles of a CW drive of
/// available power `power_w`, started from rest.
fn brute_force_cw(c: &DiodeCircuit, power_w: f64, cycles: usize, tail: usize) -> f64 {
    let amplitude = (8.0 * c.antenna_resistance_ohm * power_w).sqrt();
    let dt = 1.0 / (c.carrier_hz * STEPS_PER_CYCLE as f64);
    let (r, g, cap) = (
        c.antenna_resistance_ohm,
        1.0 / c.load_resistance_ohm,
        c.load_capacitance_f,
    );
    let mut v_out = 0.0;
    let mut acc = 0.0;
    for n in 1..=cycles * STEPS_PER_CYCLE {
        let phase =
            2.0 * std::f64::consts::PI * (n % STEPS_PER_CYCLE) as f64 / STEPS_PER_CYCLE as f64;
        let v_s = amplitude * phase.cos();
        // KCL at the load node; decreasing in the diode voltage
        let residual = |v_d: f64| {
            let i = diode_current(c, v_d);
            let out = v_s - v_d - r * i;
            cap * (out - v_out) / dt + out * g - i
        };
        let (mut lo, mut hi) = (-50.0, 1.5);
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if residual(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let v_d = 0.5 * (lo + hi);
        v_out = v_s - v_d - r * diode_current(c, v_d);
        if n > (cycles - tail) * STEPS_PER_CYCLE {
            acc += v_out;
        }
    }
    acc / (tail * STEPS_PER_CYCLE) as f64
}

fn cw(dbm: f64) -> IqBuffer {
    IqBuffer::new(
        vec![Complex64::new(dbm_to_watts(dbm).sqrt(), 0.0); 64],
        20e6,
    )
    .unwrap()
}

#[test]
fn circuit_matches_brute_force_transient_for_cw() {
    let c = DiodeCircuit::default();
    // eight load time constants
    let tau_cycles = (c.load_resistance_ohm * c.load_capacitance_f * c.carrier_hz) as usize;
    for dbm in [-20.0, -10.0] {
        let oracle = brute_force_cw(&c, dbm_to_watts(dbm), 8 * tau_cycles, 1000);
        let lib = harvest_dc_circuit(&cw(dbm), &c).unwrap().dc_metric;
        let rel = (lib - oracle).abs() / oracle;
        assert!(
            rel < 0.01,
            "{dbm} dBm: library {lib:e} V, oracle {oracle:e} V ({:.2}%)",
            100.0 * rel
        );
    }
}

#[test]
fn models_agree_on_waveform_ranking() {
    let poly = PolynomialRectifier::default();
    let circuit = DiodeCircuit::default();
    println!("tones  dbm    poly z        circuit V");
    for dbm in [-30.0, -20.0, -10.0] {
        let mut last: Option<(f64, f64)> = None;
        for n in [1, 2, 4, 8] {
            let x = generate_multisine_samples(
                &MultisineConfig::evenly_spaced(n, dbm_to_watts(dbm)),
                64,
                20e6,
            )
            .unwrap();
            let z = harvest_dc_poly(&x, &poly).unwrap().dc_metric;
            let v = harvest_dc_circuit(&x, &circuit).unwrap().dc_metric;
            println!("{n:>5}  {dbm:>5}  {z:.6e}  {v:.6e}");
            if let Some((z0, v0)) = last {
                assert!(z > z0 && v > v0, "ranking differs at {n} tones, {dbm} dBm");
            }
            last = Some((z, v));
        }
    }
}
