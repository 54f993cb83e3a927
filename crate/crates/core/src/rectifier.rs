//! Nonlinear energy-harvester models.
//!
//! Two models are provided. [`PolynomialRectifier`] truncates the diode
//! current's Taylor expansion after the fourth order, so the DC output
//! depends on the second and fourth moments of the received signal.
//! [`DiodeCircuit`] time-steps a single series diode feeding a parallel RC
//! load, driven by the passband waveform rebuilt from the baseband samples.

use std::f64::consts::PI;

use log::debug;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::frontend::{RxDesign, RxMode};
use crate::signal::{mean_power, IqBuffer};
use crate::spectrum::GRID_FFT_SIZE;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolynomialRectifier {
    /// Second-order coefficient, 1/W.
    pub k2: f64,
    /// Fourth-order coefficient, 1/W^2.
    pub k4: f64,
}

impl Default for PolynomialRectifier {
    fn default() -> Self {
        Self {
            k2: 0.0034,
            k4: 0.3829,
        }
    }
}

/// Single-diode rectifier with a parallel RC load, fed from a resistive
/// source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiodeCircuit {
    pub saturation_current_a: f64,
    pub ideality: f64,
    pub thermal_voltage_v: f64,
    pub load_resistance_ohm: f64,
    pub load_capacitance_f: f64,
    pub antenna_resistance_ohm: f64,
    pub carrier_hz: f64,
    /// Time steps per carrier cycle.
    pub samples_per_cycle: usize,
    /// Give up after this many repetitions of the analysis window.
    pub max_periods: usize,
    /// Steady state: relative change of the per-period mean output.
    pub steady_state_rtol: f64,
    /// Newton residual tolerance on the capacitor-node current balance.
    pub newton_tol_a: f64,
    /// Longest stretch of a non-periodic input that is simulated.
    pub max_window_samples: usize,
}

impl Default for DiodeCircuit {
    fn default() -> Self {
        Self {
            saturation_current_a: 5e-6,
            ideality: 1.05,
            thermal_voltage_v: 25.85e-3,
            load_resistance_ohm: 10e3,
            load_capacitance_f: 1e-9,
            antenna_resistance_ohm: 50.0,
            carrier_hz: 2.4e9,
            samples_per_cycle: 8,
            max_periods: 2000,
            steady_state_rtol: 1e-4,
            newton_tol_a: 1e-12,
            max_window_samples: 1280,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RectifierModel {
    Polynomial(PolynomialRectifier),
    Circuit(DiodeCircuit),
}

impl Default for RectifierModel {
    fn default() -> Self {
        Self::Polynomial(PolynomialRectifier::default())
    }
}

impl RectifierModel {
    pub fn variant_name(&self) -> &'static str {
        match self {
            Self::Polynomial(_) => "polynomial",
            Self::Circuit(_) => "circuit",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Polynomial(p) => {
                if !(p.k2 >= 0.0 && p.k4 >= 0.0) {
                    return Err(Error::invalid("k2 and k4 must be non-negative"));
                }
                Ok(())
            }
            Self::Circuit(c) => c.validate(),
        }
    }

    pub fn harvest(&self, eh: &IqBuffer) -> Result<HarvestResult> {
        match self {
            Self::Polynomial(p) => harvest_dc_poly(eh, p),
            Self::Circuit(c) => harvest_dc_circuit(eh, c),
        }
    }
}

/// Outcome of running a harvester over one stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarvestResult {
    /// Polynomial: dimensionless DC proxy `z`. Circuit: output voltage.
    pub dc_metric: f64,
    /// Harvested energy over `harvest_duration_s` (proxy units for the
    /// polynomial model).
    pub harvested_energy: f64,
    pub harvest_duration_s: f64,
}

impl HarvestResult {
    pub fn nothing() -> Self {
        Self {
            dc_metric: 0.0,
            harvested_energy: 0.0,
            harvest_duration_s: 0.0,
        }
    }

    /// Average harvested power while connected.
    pub fn dc_power(&self) -> f64 {
        if self.harvest_duration_s > 0.0 {
            self.harvested_energy / self.harvest_duration_s
        } else {
            0.0
        }
    }
}

/// `E|y|^2` and `E|y|^4` of the real passband signal whose complex envelope
/// is `x`: `mean|x|^2` and `3/2 mean|x|^4`.
pub fn passband_moments(samples: &[Complex64]) -> Result<(f64, f64)> {
    let m2 = mean_power(samples)?;
    let m4 = samples.iter().map(|x| x.norm_sqr().powi(2)).sum::<f64>() / samples.len() as f64;
    Ok((m2, 1.5 * m4))
}

pub fn harvest_dc_poly(eh: &IqBuffer, model: &PolynomialRectifier) -> Result<HarvestResult> {
    let (m2, m4) = passband_moments(&eh.samples)?;
    let z = model.k2 * m2 + model.k4 * m4;
    let duration = eh.duration_s();
    Ok(HarvestResult {
        dc_metric: z,
        harvested_energy: z * duration,
        harvest_duration_s: duration,
    })
}

impl DiodeCircuit {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.saturation_current_a,
            self.ideality,
            self.thermal_voltage_v,
            self.load_resistance_ohm,
            self.load_capacitance_f,
            self.antenna_resistance_ohm,
            self.carrier_hz,
            self.steady_state_rtol,
            self.newton_tol_a,
        ];
        if positive.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::invalid("circuit parameters must be positive"));
        }
        if self.samples_per_cycle < 8 {
            return Err(Error::invalid(format!(
                "need at least 8 time steps per carrier cycle, got {}",
                self.samples_per_cycle
            )));
        }
        if self.max_periods == 0 || self.max_window_samples == 0 {
            return Err(Error::invalid(
                "max_periods and max_window_samples must be positive",
            ));
        }
        Ok(())
    }

    /// Integer oversampling from the baseband rate to the circuit time step.
    fn upsampling(&self, sample_rate_hz: f64) -> Result<usize> {
        let ratio = self.carrier_hz * self.samples_per_cycle as f64 / sample_rate_hz;
        let r = ratio.round();
        if (ratio - r).abs() > 1e-9 || r < 1.0 {
            return Err(Error::invalid(format!(
                "carrier {} Hz x {} steps is not an integer multiple of {} Hz",
                self.carrier_hz, self.samples_per_cycle, sample_rate_hz
            )));
        }
        Ok(r as usize)
    }

    fn diode(&self, v_d: f64) -> (f64, f64) {
        let nvt = self.ideality * self.thermal_voltage_v;
        let e = (v_d / nvt).exp();
        (
            self.saturation_current_a * (e - 1.0),
            self.saturation_current_a * e / nvt,
        )
    }
}

/// Analysis window: one 64-sample grid period if the input repeats with it,
/// otherwise a prefix of at most `max_window_samples`.
fn analysis_window(samples: &[Complex64], max_window: usize) -> &[Complex64] {
    let p = GRID_FFT_SIZE;
    if samples.len() >= 2 * p {
        let rms = mean_power(samples).unwrap_or(0.0).sqrt();
        let periodic = samples
            .iter()
            .zip(&samples[p..])
            .all(|(a, b)| (a - b).norm() <= 1e-9 * rms);
        if periodic {
            return &samples[..p];
        }
    }
    &samples[..samples.len().min(max_window)]
}

/// Band-limited (FFT zero-padding) interpolation of a periodic sequence.
fn upsample_periodic(x: &[Complex64], factor: usize) -> Vec<Complex64> {
    let n = x.len();
    if factor == 1 {
        return x.to_vec();
    }
    let mut planner = FftPlanner::new();
    let mut spec = x.to_vec();
    planner.plan_fft_forward(n).process(&mut spec);
    let m = n * factor;
    let mut up = vec![Complex64::new(0.0, 0.0); m];
    let pos = n.div_ceil(2);
    up[..pos].copy_from_slice(&spec[..pos]);
    up[m - (n - pos)..].copy_from_slice(&spec[pos..]);
    planner.plan_fft_inverse(m).process(&mut up);
    let scale = 1.0 / n as f64;
    for v in up.iter_mut() {
        *v *= scale;
    }
    up
}

/// Transient state carried between time steps.
#[derive(Debug, Clone, Copy, Default)]
struct CircuitState {
    v_out: f64,
    v_diode: f64,
    i_diode: f64,
}

impl DiodeCircuit {
    /// One trapezoidal step. The diode node has no storage, so the output
    /// voltage is an explicit function of the diode voltage and a single
    /// monotone Newton iteration on `v_d` closes the step.
    fn step(&self, st: CircuitState, v_src: f64, c_dt: f64) -> Result<CircuitState> {
        let r = self.antenna_resistance_ohm;
        let g_load = 1.0 / self.load_resistance_ohm;
        let nvt = self.ideality * self.thermal_voltage_v;
        let history = 0.5 * (st.i_diode - st.v_out * g_load);

        let mut v_d = st.v_diode;
        for _ in 0..200 {
            let (i_d, g_d) = self.diode(v_d);
            let v_out = v_src - v_d - r * i_d;
            let f = c_dt * (v_out - st.v_out) - 0.5 * (i_d - v_out * g_load) - history;
            if f.abs() <= self.newton_tol_a {
                return Ok(CircuitState {
                    v_out,
                    v_diode: v_d,
                    i_diode: i_d,
                });
            }
            let df = -(c_dt + 0.5 * g_load) * (1.0 + r * g_d) - 0.5 * g_d;
            let mut next = v_d - f / df;
            // limit forward steps into the exponential region
            if next > v_d + 2.0 * nvt && next > 0.0 {
                next = v_d.max(0.0) + 2.0 * nvt;
            }
            if (next - v_d).abs() <= 1e-15 * v_d.abs().max(1e-3) {
                let (i_d, _) = self.diode(next);
                return Ok(CircuitState {
                    v_out: v_src - next - r * i_d,
                    v_diode: next,
                    i_diode: i_d,
                });
            }
            v_d = next;
        }
        Err(Error::invalid(format!(
            "diode Newton iteration failed to converge at v_src = {v_src} V"
        )))
    }
}

pub fn harvest_dc_circuit(eh: &IqBuffer, model: &DiodeCircuit) -> Result<HarvestResult> {
    model.validate()?;
    if eh.is_empty() {
        return Err(Error::EmptySignal);
    }
    let duration = eh.duration_s();
    let window = analysis_window(&eh.samples, model.max_window_samples);
    if window.iter().all(|x| x.norm_sqr() == 0.0) {
        return Ok(HarvestResult {
            dc_metric: 0.0,
            harvested_energy: 0.0,
            harvest_duration_s: duration,
        });
    }

    let factor = model.upsampling(eh.sample_rate_hz)?;
    let envelope = upsample_periodic(window, factor);
    let spc = model.samples_per_cycle;
    let carrier: Vec<Complex64> = (0..spc)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / spc as f64))
        .collect();
    let v_scale = (8.0 * model.antenna_resistance_ohm).sqrt();
    let source: Vec<f64> = envelope
        .iter()
        .enumerate()
        .map(|(m, x)| v_scale * (x * carrier[m % spc]).re)
        .collect();

    let dt = 1.0 / (model.carrier_hz * spc as f64);
    let c_dt = model.load_capacitance_f / dt;
    let mut st = CircuitState::default();
    let mut prev_mean: Option<f64> = None;
    let mut last_change = f64::INFINITY;
    for period in 1..=model.max_periods {
        let mut sum = 0.0;
        for &v in &source {
            st = model.step(st, v, c_dt)?;
            sum += st.v_out;
        }
        let mean = sum / source.len() as f64;
        if let Some(prev) = prev_mean {
            let denom = mean.abs().max(1e-15);
            last_change = (mean - prev).abs() / denom;
            if last_change < model.steady_state_rtol {
                debug!(
                    "rectifier steady state after {period} periods of {} steps: {mean:e} V",
                    source.len()
                );
                let v = mean.max(0.0);
                let p = v * v / model.load_resistance_ohm;
                return Ok(HarvestResult {
                    dc_metric: v,
                    harvested_energy: p * duration,
                    harvest_duration_s: duration,
                });
            }
        }
        prev_mean = Some(mean);
    }
    Err(Error::NonConvergence {
        periods: model.max_periods,
        last_change,
        last_voltage: st.v_out,
    })
}

/// Energy delivered over a slot of `slot_s`, given a harvest over the EH
/// stream. Time switching only harvests for `alpha_rx` of the slot; power
/// splitting harvests the scaled stream for all of it.
pub fn harvested_energy_for_slot(result: &HarvestResult, rx: &RxDesign, slot_s: f64) -> f64 {
    let on_time = match rx.mode {
        RxMode::TimeSwitching => rx.alpha_rx * slot_s,
        RxMode::PowerSplitting | RxMode::IdealDual => slot_s,
    };
    result.dc_power() * on_time
}
