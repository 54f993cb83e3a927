//! Run configuration: a flat list of `section.key = value` lines.
//!
//! ```text
//! # comment
//! tx.mode = time-sharing
//! tx.alpha = 0.3
//! channel.taps = 1, 0.2-0.1i
//! sweep.trials = 50
//! ```
//!
//! Blank lines and `#` comments are ignored, as is anything after a `#` on
//! a value line. Each key may appear once. Unknown keys, malformed values
//! and ratios outside `[0, 1]` are rejected with the offending line number.
//! Every key is optional; see [`KEYS`] for the full list.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::harness::{Estimation, Scenario};
use crate::rectifier::{DiodeCircuit, PolynomialRectifier, RectifierModel};
use crate::signal::{dbm_to_watts, PowerLevel};
use crate::wit::{CodingRate, ModulationScheme, OfdmPlan};

/// Accepted keys with a one-line description each.
pub const KEYS: &[(&str, &str)] = &[
    (
        "tx.mode",
        "time-sharing | superposition | wit-only | wpt-only",
    ),
    (
        "tx.alpha",
        "time-sharing ratio, power waveform share of the slot",
    ),
    (
        "tx.rho",
        "superposition ratio, power waveform share of the power",
    ),
    ("tx.slot_duration_s", "reporting slot for harvested energy"),
    ("tx.power_dbm", "total transmit power"),
    ("rx.mode", "power-splitting | time-switching | ideal-dual"),
    ("rx.rho", "power-splitting ratio, harvester share"),
    ("rx.alpha", "time-switching ratio, harvester share"),
    (
        "rx.alpha_locked",
        "time switch follows tx.alpha (true | false)",
    ),
    ("ofdm.modulation", "bpsk | qpsk | 16qam | 64qam"),
    ("ofdm.coding", "3/4 | uncoded"),
    ("ofdm.channel_estimation", "genie | pilot"),
    ("ofdm.cp_len", "cyclic prefix in samples"),
    ("multisine.tones", "comma-separated subcarrier indices"),
    (
        "multisine.phases",
        "comma-separated phases in radians, one per tone",
    ),
    (
        "channel.taps",
        "comma-separated complex taps, e.g. 1, 0.3-0.2i",
    ),
    ("channel.rx_power_dbm", "calibrated receive power"),
    ("channel.noise_dbm", "noise power over the band, or -inf"),
    ("rectifier.model", "polynomial | circuit"),
    ("rectifier.k2", "second-order coefficient, 1/W"),
    ("rectifier.k4", "fourth-order coefficient, 1/W^2"),
    ("rectifier.saturation_current_a", "diode saturation current"),
    ("rectifier.ideality", "diode ideality factor"),
    ("rectifier.thermal_voltage_v", "thermal voltage"),
    ("rectifier.load_resistance_ohm", "load resistance"),
    ("rectifier.load_capacitance_f", "load capacitance"),
    ("rectifier.antenna_resistance_ohm", "source resistance"),
    ("rectifier.carrier_hz", "carrier frequency"),
    (
        "rectifier.samples_per_cycle",
        "time steps per carrier cycle",
    ),
    ("rectifier.max_periods", "steady-state iteration limit"),
    ("sweep.grid_step", "ratio grid step, must divide 1"),
    ("sweep.trials", "Monte-Carlo trials per point"),
    ("sweep.sim_slot_s", "simulated slot length"),
    ("sweep.seed", "base seed"),
    ("sweep.payload_bits", "payload per frame, or fill"),
    (
        "sweep.allow_mismatch",
        "permit unnatural tx/rx pairings (true | false)",
    ),
];

/// A parsed configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub grid_step: f64,
    /// SHA-256 of the source text, hex encoded.
    pub sha256: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        "".parse().expect("empty configuration is valid")
    }
}

struct Entry<'a> {
    line: usize,
    value: &'a str,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn parse_value<T: FromStr>(e: &Entry, key: &str, what: &str) -> Result<T> {
    e.value
        .parse()
        .map_err(|_| err(e.line, format!("{key}: `{}` is not {what}", e.value)))
}

fn parse_list<T: FromStr>(e: &Entry, key: &str, what: &str) -> Result<Vec<T>> {
    e.value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| err(e.line, format!("{key}: `{s}` is not {what}")))
        })
        .collect()
}

fn parse_bool(e: &Entry, key: &str) -> Result<bool> {
    match e.value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        v => Err(err(e.line, format!("{key}: `{v}` is not true or false"))),
    }
}

fn parse_dbm(e: &Entry, key: &str) -> Result<PowerLevel> {
    match e.value {
        "-inf" | "none" | "off" => Ok(PowerLevel::off()),
        _ => {
            let v: f64 = parse_value(e, key, "a power in dBm")?;
            if v.is_nan() {
                return Err(err(e.line, format!("{key}: power is NaN")));
            }
            Ok(PowerLevel::dbm(v))
        }
    }
}

fn parse_ratio(e: &Entry, key: &str) -> Result<f64> {
    let v: f64 = parse_value(e, key, "a number")?;
    if !(0.0..=1.0).contains(&v) {
        return Err(err(e.line, format!("{key} must lie in [0, 1], got {v}")));
    }
    Ok(v)
}

fn parse_positive(e: &Entry, key: &str) -> Result<f64> {
    let v: f64 = parse_value(e, key, "a number")?;
    if !(v > 0.0) || !v.is_finite() {
        return Err(err(e.line, format!("{key} must be positive, got {v}")));
    }
    Ok(v)
}

fn parse_mapped<T>(e: &Entry, key: &str, f: impl FnOnce(&str) -> Result<T>) -> Result<T> {
    f(e.value).map_err(|x| match x {
        Error::InvalidParameter(m) => err(e.line, format!("{key}: {m}")),
        other => err(e.line, format!("{key}: {other}")),
    })
}

impl FromStr for RunConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<&str, Entry> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                err(
                    line,
                    format!("expected `section.key = value`, got `{content}`"),
                )
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.iter().any(|(k, _)| *k == key) {
                return Err(err(line, format!("unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(err(line, format!("{key}: missing value")));
            }
            if let Some(prev) = entries.insert(key, Entry { line, value }) {
                return Err(err(
                    line,
                    format!("{key} already set on line {}", prev.line),
                ));
            }
        }
        build(&entries, text)
    }
}

fn build(entries: &BTreeMap<&str, Entry>, text: &str) -> Result<RunConfig> {
    let mut s = Scenario::default();
    let get = |k: &str| entries.get(k);

    if let Some(e) = get("tx.mode") {
        s.tx.mode = parse_mapped(e, "tx.mode", str::parse)?;
    }
    if let Some(e) = get("tx.alpha") {
        s.tx.alpha_tx = parse_ratio(e, "tx.alpha")?;
    }
    if let Some(e) = get("tx.rho") {
        s.tx.rho_tx = parse_ratio(e, "tx.rho")?;
    }
    if let Some(e) = get("tx.slot_duration_s") {
        s.tx.slot_duration_s = parse_positive(e, "tx.slot_duration_s")?;
    }
    if let Some(e) = get("tx.power_dbm") {
        let p: f64 = parse_value(e, "tx.power_dbm", "a power in dBm")?;
        if !p.is_finite() {
            return Err(err(e.line, "tx.power_dbm must be finite"));
        }
        s.tx.total_tx_power_w = dbm_to_watts(p);
    }

    if let Some(e) = get("rx.mode") {
        s.rx.mode = parse_mapped(e, "rx.mode", str::parse)?;
    }
    if let Some(e) = get("rx.rho") {
        s.rx.rho_rx = parse_ratio(e, "rx.rho")?;
    }
    if let Some(e) = get("rx.alpha") {
        s.rx.alpha_rx = parse_ratio(e, "rx.alpha")?;
    }
    if let Some(e) = get("rx.alpha_locked") {
        s.alpha_locked = parse_bool(e, "rx.alpha_locked")?;
    }

    if let Some(e) = get("multisine.tones") {
        let tones: Vec<i32> = parse_list(e, "multisine.tones", "a subcarrier index")?;
        if tones.is_empty() {
            return Err(err(e.line, "multisine.tones: need at least one tone"));
        }
        s.multisine.phases = vec![0.0; tones.len()];
        s.multisine.tone_subcarriers = tones;
    }
    if let Some(e) = get("multisine.phases") {
        let phases: Vec<f64> = parse_list(e, "multisine.phases", "a phase")?;
        if phases.len() != s.multisine.tone_subcarriers.len() {
            return Err(err(
                e.line,
                format!(
                    "multisine.phases: {} phases for {} tones",
                    phases.len(),
                    s.multisine.tone_subcarriers.len()
                ),
            ));
        }
        s.multisine.phases = phases;
    }
    if let Some(e) = get("multisine.tones").or(get("multisine.phases")) {
        s.multisine
            .validate(s.plan.sample_rate_hz)
            .map_err(|x| err(e.line, format!("multisine: {x}")))?;
    }

    let modulation = match get("ofdm.modulation") {
        Some(e) => parse_mapped(e, "ofdm.modulation", ModulationScheme::from_str)?,
        None => ModulationScheme::Qpsk,
    };
    s.plan = OfdmPlan::with_reserved(modulation, &s.multisine.tone_subcarriers);
    if let Some(e) = get("ofdm.coding") {
        s.plan.coding = match e.value {
            "3/4" | "0.75" => CodingRate::ThreeQuarters,
            "uncoded" | "1" => CodingRate::Uncoded,
            v => {
                return Err(err(
                    e.line,
                    format!("ofdm.coding: `{v}` is not 3/4 or uncoded"),
                ))
            }
        };
    }
    if let Some(e) = get("ofdm.cp_len") {
        s.plan.cp_len = parse_value(e, "ofdm.cp_len", "a sample count")?;
        if s.plan.cp_len > s.plan.fft_size {
            return Err(err(e.line, "ofdm.cp_len exceeds the FFT size"));
        }
    }
    if let Some(e) = get("ofdm.channel_estimation") {
        s.estimation = match e.value {
            "genie" => Estimation::Genie,
            "pilot" => Estimation::Pilot,
            v => {
                return Err(err(
                    e.line,
                    format!("ofdm.channel_estimation: `{v}` is not genie or pilot"),
                ))
            }
        };
    }

    if let Some(e) = get("channel.taps") {
        let taps: Vec<Complex64> = parse_list(e, "channel.taps", "a complex number")?;
        if taps.iter().all(|t| t.norm_sqr() == 0.0) {
            return Err(err(e.line, "channel.taps: need at least one nonzero tap"));
        }
        s.channel.taps = taps;
    }
    if let Some(e) = get("channel.rx_power_dbm") {
        s.channel.target_rx_power = parse_dbm(e, "channel.rx_power_dbm")?;
        if !s.channel.target_rx_power.watts().is_normal() {
            return Err(err(e.line, "channel.rx_power_dbm must be finite"));
        }
    }
    if let Some(e) = get("channel.noise_dbm") {
        s.channel.noise_floor = parse_dbm(e, "channel.noise_dbm")?;
    }

    s.rectifier = build_rectifier(entries)?;

    let mut grid_step = 0.1;
    if let Some(e) = get("sweep.grid_step") {
        grid_step = parse_positive(e, "sweep.grid_step")?;
        crate::harness::ratio_grid(grid_step).map_err(|x| err(e.line, x.to_string()))?;
    }
    if let Some(e) = get("sweep.trials") {
        s.n_trials = parse_value(e, "sweep.trials", "a trial count")?;
        if s.n_trials == 0 {
            return Err(err(e.line, "sweep.trials must be at least 1"));
        }
    }
    if let Some(e) = get("sweep.sim_slot_s") {
        s.sim_slot_s = parse_positive(e, "sweep.sim_slot_s")?;
    }
    if let Some(e) = get("sweep.seed") {
        s.base_seed = parse_value(e, "sweep.seed", "an unsigned integer")?;
    }
    if let Some(e) = get("sweep.payload_bits") {
        s.payload_bits_per_slot = match e.value {
            "fill" => None,
            _ => Some(parse_value(
                e,
                "sweep.payload_bits",
                "a bit count or `fill`",
            )?),
        };
    }
    if let Some(e) = get("sweep.allow_mismatch") {
        s.allow_mismatch = parse_bool(e, "sweep.allow_mismatch")?;
    }

    // whole-scenario checks, reported against the key most likely at fault
    s.validate().map_err(|x| {
        let anchor = ["rx.mode", "tx.mode", "ofdm.modulation", "sweep.sim_slot_s"]
            .iter()
            .filter_map(|k| get(k))
            .map(|e| e.line)
            .next()
            .unwrap_or(1);
        err(anchor, x.to_string())
    })?;

    Ok(RunConfig {
        scenario: s,
        grid_step,
        sha256: Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect(),
    })
}

fn build_rectifier(entries: &BTreeMap<&str, Entry>) -> Result<RectifierModel> {
    let get = |k: &str| entries.get(k);
    let circuit = match get("rectifier.model") {
        None => false,
        Some(e) => match e.value {
            "polynomial" => false,
            "circuit" => true,
            v => {
                return Err(err(
                    e.line,
                    format!("rectifier.model: `{v}` is not polynomial or circuit"),
                ))
            }
        },
    };
    let poly_keys = ["rectifier.k2", "rectifier.k4"];
    let circuit_keys = [
        "rectifier.saturation_current_a",
        "rectifier.ideality",
        "rectifier.thermal_voltage_v",
        "rectifier.load_resistance_ohm",
        "rectifier.load_capacitance_f",
        "rectifier.antenna_resistance_ohm",
        "rectifier.carrier_hz",
        "rectifier.samples_per_cycle",
        "rectifier.max_periods",
    ];
    let foreign = if circuit {
        &poly_keys[..]
    } else {
        &circuit_keys[..]
    };
    if let Some((k, e)) = foreign.iter().find_map(|k| get(k).map(|e| (k, e))) {
        return Err(err(
            e.line,
            format!(
                "{k} does not apply to the {} model",
                if circuit { "circuit" } else { "polynomial" }
            ),
        ));
    }

    if !circuit {
        let mut p = PolynomialRectifier::default();
        for (key, slot) in [("rectifier.k2", &mut p.k2), ("rectifier.k4", &mut p.k4)] {
            if let Some(e) = get(key) {
                let v: f64 = parse_value(e, key, "a number")?;
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(err(e.line, format!("{key} must be non-negative, got {v}")));
                }
                *slot = v;
            }
        }
        return Ok(RectifierModel::Polynomial(p));
    }

    let mut c = DiodeCircuit::default();
    for (key, slot) in [
        (
            "rectifier.saturation_current_a",
            &mut c.saturation_current_a,
        ),
        ("rectifier.ideality", &mut c.ideality),
        ("rectifier.thermal_voltage_v", &mut c.thermal_voltage_v),
        ("rectifier.load_resistance_ohm", &mut c.load_resistance_ohm),
        ("rectifier.load_capacitance_f", &mut c.load_capacitance_f),
        (
            "rectifier.antenna_resistance_ohm",
            &mut c.antenna_resistance_ohm,
        ),
        ("rectifier.carrier_hz", &mut c.carrier_hz),
    ] {
        if let Some(e) = get(key) {
            *slot = parse_positive(e, key)?;
        }
    }
    if let Some(e) = get("rectifier.samples_per_cycle") {
        c.samples_per_cycle = parse_value(e, "rectifier.samples_per_cycle", "a step count")?;
        if c.samples_per_cycle < 8 {
            return Err(err(
                e.line,
                "rectifier.samples_per_cycle must be at least 8",
            ));
        }
    }
    if let Some(e) = get("rectifier.max_periods") {
        c.max_periods = parse_value(e, "rectifier.max_periods", "a period count")?;
        if c.max_periods == 0 {
            return Err(err(e.line, "rectifier.max_periods must be at least 1"));
        }
    }
    Ok(RectifierModel::Circuit(c))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        std::fs::read_to_string(path)?.parse()
    }

    /// Override the base seed, as the command line's `--seed` does.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.scenario.base_seed = seed;
        self
    }
}
