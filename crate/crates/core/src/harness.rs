//! Monte-Carlo trials, ratio sweeps and energy/throughput frontiers.
//!
//! A trial builds one slot end to end: seeded payload, OFDM modulation,
//! multisine, transmit combination, channel, receiver split, harvesting and
//! decoding. Noise and payload seeds depend only on the base seed and the
//! trial index, so every grid point sees the same random draws.

use std::io::{Read, Write};

use log::{debug, info};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{apply_channel_trial, ChannelModel};
use crate::combiner::{superpose, time_share_segments, SegmentMap, TxDesign, TxMode};
use crate::error::{Error, Result};
use crate::frontend::{split, RxDesign, RxMode};
use crate::multisine::{generate_multisine_samples, MultisineConfig};
use crate::rectifier::{harvested_energy_for_slot, HarvestResult, RectifierModel};
use crate::seed::{derive_seed, streams};
use crate::signal::{scale_to_power_with_gain, IqBuffer};
use crate::wit::{
    ber, max_data_rate, ofdm_demodulate, ofdm_modulate_padded, BitStream, ChannelEstimate,
    ModulationScheme, OfdmPlan,
};

/// How the information decoder obtains its per-bin channel gains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Estimation {
    /// Exact gains from the simulator.
    #[default]
    Genie,
    /// Least squares on the pilots.
    Pilot,
}

/// Everything a trial needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub tx: TxDesign,
    pub rx: RxDesign,
    pub plan: OfdmPlan,
    pub multisine: MultisineConfig,
    pub channel: ChannelModel,
    pub rectifier: RectifierModel,
    pub n_trials: usize,
    /// Payload per information frame. `None` fills the frame.
    pub payload_bits_per_slot: Option<usize>,
    /// Length of the simulated slot. Energies are still reported over
    /// `tx.slot_duration_s`.
    pub sim_slot_s: f64,
    pub base_seed: u64,
    pub estimation: Estimation,
    /// Time-switching receivers follow the transmit time-sharing ratio.
    pub alpha_locked: bool,
    /// Permit transmitter/receiver pairings other than the natural ones.
    pub allow_mismatch: bool,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            tx: TxDesign::default(),
            rx: RxDesign::default(),
            plan: OfdmPlan::new(ModulationScheme::Qpsk),
            multisine: MultisineConfig::default(),
            channel: ChannelModel::default(),
            rectifier: RectifierModel::default(),
            n_trials: 300,
            payload_bits_per_slot: None,
            sim_slot_s: 2e-3,
            base_seed: 0,
            estimation: Estimation::Genie,
            alpha_locked: true,
            allow_mismatch: false,
        }
    }
}

impl Scenario {
    /// Time-sharing transmitter with a time-switching receiver.
    pub fn time_switching(modulation: ModulationScheme) -> Self {
        let mut s = Self::default();
        s.tx.mode = TxMode::TimeSharing;
        s.rx.mode = RxMode::TimeSwitching;
        s.plan = OfdmPlan::with_reserved(modulation, &s.multisine.tone_subcarriers);
        s
    }

    /// Superposition transmitter with a power-splitting receiver.
    pub fn power_splitting(modulation: ModulationScheme) -> Self {
        let mut s = Self::default();
        s.tx.mode = TxMode::Superposition;
        s.rx.mode = RxMode::PowerSplitting;
        s.plan = OfdmPlan::with_reserved(modulation, &s.multisine.tone_subcarriers);
        s
    }

    pub fn sim_samples(&self) -> usize {
        (self.sim_slot_s * self.plan.sample_rate_hz).round() as usize
    }

    /// Label used in the `mode` column of sweep output.
    pub fn mode_label(&self) -> String {
        format!("{}+{}", self.tx.mode, self.rx.mode)
    }

    fn pairing_ok(&self) -> bool {
        matches!(
            (self.tx.mode, self.rx.mode),
            (TxMode::TimeSharing, RxMode::TimeSwitching)
                | (TxMode::Superposition, RxMode::PowerSplitting)
                | (TxMode::WitOnly | TxMode::WptOnly, RxMode::TimeSwitching)
                | (TxMode::WitOnly | TxMode::WptOnly, RxMode::PowerSplitting)
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.tx.validate()?;
        self.rx.validate()?;
        self.plan.validate()?;
        self.multisine.validate(self.plan.sample_rate_hz)?;
        self.plan.validate_against(&self.multisine)?;
        self.channel.validate()?;
        self.rectifier.validate()?;
        if !self.allow_mismatch && !self.pairing_ok() {
            return Err(Error::invalid(format!(
                "{} transmitter with {} receiver needs the mismatch override",
                self.tx.mode, self.rx.mode
            )));
        }
        if self.n_trials == 0 {
            return Err(Error::invalid("n_trials must be at least 1"));
        }
        if self.sim_samples() == 0 {
            return Err(Error::invalid(format!(
                "simulated slot of {} s holds no samples",
                self.sim_slot_s
            )));
        }
        Ok(())
    }

    /// Receiver design with the time-switch aligned to the transmit
    /// segments when locked.
    fn effective_rx(&self, n: usize) -> RxDesign {
        let mut rx = self.rx.clone();
        if rx.mode == RxMode::TimeSwitching
            && self.alpha_locked
            && self.tx.mode == TxMode::TimeSharing
        {
            rx.alpha_rx = self.tx.alpha_tx;
            rx.segment_map = Some(SegmentMap::for_ratio(self.tx.alpha_tx, n));
        }
        rx
    }
}

/// Result of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    /// Harvested energy over the reporting slot.
    pub energy_j: f64,
    pub dc_metric: f64,
    /// `None` when no information reaches the decoder.
    pub ber: Option<f64>,
    pub throughput_mbps: f64,
}

/// `(1 - ber)` of the modulation's peak rate.
pub fn throughput(ber: f64, scheme: ModulationScheme) -> f64 {
    (1.0 - ber) * max_data_rate(scheme)
}

/// The information frame inside the transmitted slot.
struct WitSegment {
    offset: usize,
    len: usize,
    payload: BitStream,
    /// Amplitude of a unit constellation point at the transmitter output.
    gain: f64,
}

struct TxSlot {
    signal: IqBuffer,
    wit: Option<WitSegment>,
}

struct Frame {
    signal: IqBuffer,
    payload: BitStream,
    symbol_gain: f64,
}

/// A frame of exactly `len` samples at unit power carrying as much payload
/// as fits, or `None` when not even one payload bit fits.
fn wit_frame(s: &Scenario, len: usize, seed: u64) -> Result<Option<Frame>> {
    let capacity = s.plan.payload_capacity(len / s.plan.symbol_len());
    let bits = match s.payload_bits_per_slot {
        Some(p) => p.min(capacity),
        None => capacity,
    };
    if bits == 0 {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let payload = BitStream::random(bits, &mut rng);
    let frame = ofdm_modulate_padded(&payload, &s.plan, len, 1.0)?;
    Ok(Some(Frame {
        signal: frame.signal,
        payload,
        symbol_gain: frame.symbol_gain,
    }))
}

fn multisine_slot(s: &Scenario, n: usize) -> Result<IqBuffer> {
    generate_multisine_samples(&s.multisine, n, s.plan.sample_rate_hz)
}

fn build_tx(s: &Scenario, rx: &RxDesign, n: usize, trial: u64) -> Result<TxSlot> {
    let power = s.tx.total_tx_power_w;
    let fs = s.plan.sample_rate_hz;
    let payload_seed = derive_seed(s.base_seed, streams::PAYLOAD, trial);
    match s.tx.mode {
        TxMode::WptOnly => {
            let (signal, _) = scale_to_power_with_gain(&multisine_slot(s, n)?, power)?;
            Ok(TxSlot { signal, wit: None })
        }
        TxMode::WitOnly if rx.mode == RxMode::TimeSwitching => {
            // one frame per receiver segment, so the decoder sees a whole frame
            let b = rx.boundary(n);
            let second = wit_frame(s, n - b, payload_seed)?;
            let first_seed = derive_seed(s.base_seed, streams::PAYLOAD_SECOND, trial);
            let first = wit_frame(s, b, first_seed)?;
            let filler = |f: &Option<Frame>, len: usize| match f {
                Some(f) => f.signal.clone(),
                None => IqBuffer::zeros(len.max(1), fs),
            };
            let shared = time_share_segments(
                &filler(&first, b),
                &filler(&second, n - b),
                SegmentMap::for_ratio(b as f64 / n as f64, n),
                power,
            )?;
            Ok(TxSlot {
                signal: shared.signal,
                wit: second.map(|f| WitSegment {
                    offset: b,
                    len: n - b,
                    payload: f.payload,
                    gain: f.symbol_gain * shared.second_gain,
                }),
            })
        }
        TxMode::WitOnly => {
            let frame = wit_frame(s, n, payload_seed)?
                .ok_or_else(|| Error::invalid("slot too short for one information frame"))?;
            let (signal, g) = scale_to_power_with_gain(&frame.signal, power)?;
            Ok(TxSlot {
                signal,
                wit: Some(WitSegment {
                    offset: 0,
                    len: n,
                    payload: frame.payload,
                    gain: frame.symbol_gain * g,
                }),
            })
        }
        TxMode::TimeSharing => {
            let seg = SegmentMap::for_ratio(s.tx.alpha_tx, n);
            let b = seg.boundary;
            let frame = wit_frame(s, n - b, payload_seed)?;
            let x_p = multisine_slot(s, b.max(1))?;
            let x_i = match &frame {
                Some(f) => f.signal.clone(),
                None => IqBuffer::zeros((n - b).max(1), fs),
            };
            if frame.is_none() && n > b {
                return Err(Error::invalid(format!(
                    "information segment of {} samples holds no payload",
                    n - b
                )));
            }
            let shared = time_share_segments(&x_p, &x_i, seg, power)?;
            Ok(TxSlot {
                signal: shared.signal,
                wit: frame.map(|f| WitSegment {
                    offset: b,
                    len: n - b,
                    payload: f.payload,
                    gain: f.symbol_gain * shared.second_gain,
                }),
            })
        }
        TxMode::Superposition => {
            let frame = wit_frame(s, n, payload_seed)?
                .ok_or_else(|| Error::invalid("slot too short for one information frame"))?;
            let x_p = multisine_slot(s, n)?;
            let sup = superpose(&x_p, &frame.signal, &s.tx, &s.plan)?;
            let wit = (sup.wit_gain > 0.0).then_some(WitSegment {
                offset: 0,
                len: n,
                payload: frame.payload,
                gain: frame.symbol_gain * sup.wit_gain,
            });
            Ok(TxSlot {
                signal: sup.signal,
                wit,
            })
        }
    }
}

/// The power waveform alone over one simulated slot, at transmit power.
pub fn wpt_waveform(s: &Scenario) -> Result<IqBuffer> {
    s.validate()?;
    let n = s.sim_samples();
    Ok(scale_to_power_with_gain(&multisine_slot(s, n)?, s.tx.total_tx_power_w)?.0)
}

/// The information waveform alone, one frame filling the simulated slot,
/// with the payload of trial `trial`.
pub fn wit_waveform(s: &Scenario, trial: u64) -> Result<IqBuffer> {
    s.validate()?;
    let n = s.sim_samples();
    let seed = derive_seed(s.base_seed, streams::PAYLOAD, trial);
    let frame = wit_frame(s, n, seed)?
        .ok_or_else(|| Error::invalid("slot too short for one information frame"))?;
    Ok(scale_to_power_with_gain(&frame.signal, s.tx.total_tx_power_w)?.0)
}

/// The transmitted slot of trial `trial` and, for time-divided slots, where
/// the first segment ends.
pub fn transmit_waveform(s: &Scenario, trial: u64) -> Result<(IqBuffer, Option<SegmentMap>)> {
    s.validate()?;
    let n = s.sim_samples();
    let rx = s.effective_rx(n);
    let slot = build_tx(s, &rx, n, trial)?;
    let map = match (s.tx.mode, rx.mode) {
        (TxMode::TimeSharing, _) => Some(SegmentMap::for_ratio(s.tx.alpha_tx, n)),
        (TxMode::WitOnly, RxMode::TimeSwitching) => Some(SegmentMap {
            boundary: rx.boundary(n),
            n_samples: n,
        }),
        _ => None,
    };
    Ok((slot.signal, map))
}

/// One end-to-end slot. Errors carry the trial index.
pub fn run_trial(s: &Scenario, trial_index: u64) -> Result<TrialOutcome> {
    s.validate()?;
    trial_body(s, trial_index).map_err(|e| Error::Trial {
        point: 0,
        trial: trial_index as usize,
        source: Box::new(e),
    })
}

fn trial_body(s: &Scenario, trial: u64) -> Result<TrialOutcome> {
    let n = s.sim_samples();
    let rx_design = s.effective_rx(n);
    let tx = build_tx(s, &rx_design, n, trial)?;

    let channel = ChannelModel {
        seed: s.base_seed,
        ..s.channel.clone()
    };
    let out = apply_channel_trial(&tx.signal, &channel, trial)?;
    let parts = split(&out.rx, &rx_design)?;

    let harvest = if parts.eh.is_empty() {
        HarvestResult::nothing()
    } else {
        s.rectifier.harvest(&parts.eh)?
    };
    let energy_j = harvested_energy_for_slot(&harvest, &rx_design, s.tx.slot_duration_s);

    let id_amplitude = match rx_design.mode {
        RxMode::PowerSplitting => (1.0 - rx_design.rho_rx).sqrt(),
        RxMode::TimeSwitching | RxMode::IdealDual => 1.0,
    };
    let ber_value = match &tx.wit {
        Some(w) if !parts.id.is_empty() && id_amplitude > 0.0 => Some(decode(
            s,
            w,
            &parts.id.samples,
            parts.id_offset,
            id_amplitude,
            &out.bin_gains,
        )?),
        _ => None,
    };
    let fraction = tx.wit.as_ref().map_or(0.0, |w| w.len as f64 / n as f64);
    let throughput_mbps = ber_value.map_or(0.0, |b| fraction * throughput(b, s.plan.modulation));
    Ok(TrialOutcome {
        energy_j,
        dc_metric: harvest.dc_metric,
        ber: ber_value,
        throughput_mbps,
    })
}

/// Decode the frame from what the decoder saw. Samples routed elsewhere
/// read as zero.
fn decode(
    s: &Scenario,
    w: &WitSegment,
    id: &[Complex64],
    id_offset: usize,
    amplitude: f64,
    bin_gains: &[Complex64],
) -> Result<f64> {
    let zero = Complex64::new(0.0, 0.0);
    let view: Vec<Complex64> = (w.offset..w.offset + w.len)
        .map(|i| {
            i.checked_sub(id_offset)
                .and_then(|j| id.get(j))
                .copied()
                .unwrap_or(zero)
        })
        .collect();
    let view = IqBuffer::new(view, s.plan.sample_rate_hz)?;
    let estimate = match s.estimation {
        Estimation::Genie => {
            ChannelEstimate::Genie(bin_gains.iter().map(|h| h * (w.gain * amplitude)).collect())
        }
        Estimation::Pilot => ChannelEstimate::PilotLeastSquares,
    };
    let decoded = ofdm_demodulate(&view, &s.plan, &estimate, w.payload.len())?;
    ber(&w.payload, &decoded)
}

/// Averaged outcome at one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct ETPoint {
    pub mode: String,
    pub alpha: Option<f64>,
    pub rho_tx: Option<f64>,
    pub rho_rx: Option<f64>,
    pub modulation: ModulationScheme,
    pub mean_energy_j: f64,
    pub stderr_energy_j: f64,
    pub mean_ber: Option<f64>,
    pub mean_throughput_mbps: f64,
    pub stderr_throughput_mbps: f64,
    pub n_trials: usize,
}

impl ETPoint {
    /// A bare (energy, throughput) point, handy for frontier arithmetic.
    pub fn synthetic(energy_j: f64, throughput_mbps: f64) -> Self {
        Self {
            mode: "synthetic".into(),
            alpha: None,
            rho_tx: None,
            rho_rx: None,
            modulation: ModulationScheme::Qpsk,
            mean_energy_j: energy_j,
            stderr_energy_j: 0.0,
            mean_ber: None,
            mean_throughput_mbps: throughput_mbps,
            stderr_throughput_mbps: 0.0,
            n_trials: 0,
        }
    }

    /// `self` is at least as good as `other` in both coordinates.
    pub fn weakly_dominates(&self, other: &ETPoint) -> bool {
        self.mean_energy_j >= other.mean_energy_j
            && self.mean_throughput_mbps >= other.mean_throughput_mbps
    }

    pub fn dominates(&self, other: &ETPoint) -> bool {
        self.weakly_dominates(other)
            && (self.mean_energy_j > other.mean_energy_j
                || self.mean_throughput_mbps > other.mean_throughput_mbps)
    }
}

/// Ratio grid `{0, step, 2 step, ..., 1}`.
pub fn ratio_grid(step: f64) -> Result<Vec<f64>> {
    let m = (1.0 / step).round();
    if !(step > 0.0) || m < 1.0 || (m * step - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "grid step {step} does not divide 1"
        )));
    }
    let m = m as usize;
    Ok((0..=m).map(|k| k as f64 / m as f64).collect())
}

/// One operating point: the ratios a sweep sets on the scenario.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct Operating {
    alpha_tx: Option<f64>,
    alpha_rx: Option<f64>,
    rho_tx: Option<f64>,
    rho_rx: Option<f64>,
}

impl Operating {
    fn apply(&self, s: &Scenario) -> Scenario {
        let mut s = s.clone();
        if let Some(a) = self.alpha_tx {
            s.tx.alpha_tx = a;
        }
        if let Some(a) = self.alpha_rx {
            s.rx.alpha_rx = a;
        }
        if let Some(r) = self.rho_tx {
            s.tx.rho_tx = r;
        }
        if let Some(r) = self.rho_rx {
            s.rx.rho_rx = r;
        }
        s
    }
}

/// Grid of operating points for the scenario's transmitter and receiver.
/// A locked time-sharing/time-switching pair shares one ratio; otherwise
/// every ratio the two ends expose is swept.
fn operating_points(s: &Scenario, grid: &[f64]) -> Vec<Operating> {
    let locked =
        s.tx.mode == TxMode::TimeSharing && s.rx.mode == RxMode::TimeSwitching && s.alpha_locked;
    if locked {
        return grid
            .iter()
            .map(|&a| Operating {
                alpha_tx: Some(a),
                alpha_rx: Some(a),
                ..Default::default()
            })
            .collect();
    }
    let tx_axis: Vec<Operating> = match s.tx.mode {
        TxMode::TimeSharing => grid
            .iter()
            .map(|&a| Operating {
                alpha_tx: Some(a),
                ..Default::default()
            })
            .collect(),
        TxMode::Superposition => grid
            .iter()
            .map(|&r| Operating {
                rho_tx: Some(r),
                ..Default::default()
            })
            .collect(),
        TxMode::WitOnly | TxMode::WptOnly => vec![Operating::default()],
    };
    let rx_axis: Vec<Operating> = match s.rx.mode {
        RxMode::TimeSwitching => grid
            .iter()
            .map(|&a| Operating {
                alpha_rx: Some(a),
                ..Default::default()
            })
            .collect(),
        RxMode::PowerSplitting => grid
            .iter()
            .map(|&r| Operating {
                rho_rx: Some(r),
                ..Default::default()
            })
            .collect(),
        RxMode::IdealDual => vec![Operating::default()],
    };
    tx_axis
        .iter()
        .flat_map(|t| {
            rx_axis.iter().map(move |r| Operating {
                alpha_tx: t.alpha_tx,
                rho_tx: t.rho_tx,
                alpha_rx: r.alpha_rx,
                rho_rx: r.rho_rx,
            })
        })
        .collect()
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn summarize(s: &Scenario, op: &Operating, outcomes: &[TrialOutcome]) -> ETPoint {
    let energies: Vec<f64> = outcomes.iter().map(|o| o.energy_j).collect();
    let rates: Vec<f64> = outcomes.iter().map(|o| o.throughput_mbps).collect();
    let bers: Vec<f64> = outcomes.iter().filter_map(|o| o.ber).collect();
    let (mean_energy_j, stderr_energy_j) = mean_and_stderr(&energies);
    let (mean_throughput_mbps, stderr_throughput_mbps) = mean_and_stderr(&rates);
    ETPoint {
        mode: s.mode_label(),
        alpha: op.alpha_tx.or(op.alpha_rx),
        rho_tx: op.rho_tx,
        rho_rx: op.rho_rx,
        modulation: s.plan.modulation,
        mean_energy_j,
        stderr_energy_j,
        mean_ber: (!bers.is_empty()).then(|| bers.iter().sum::<f64>() / bers.len() as f64),
        mean_throughput_mbps,
        stderr_throughput_mbps,
        n_trials: outcomes.len(),
    }
}

/// Sweep on the global worker pool.
pub fn sweep(s: &Scenario, grid_step: f64) -> Result<Vec<ETPoint>> {
    sweep_with_jobs(s, grid_step, None)
}

/// Sweep with at most `jobs` workers. The output does not depend on the
/// worker count: results are gathered in (point, trial) order before any
/// averaging.
pub fn sweep_with_jobs(s: &Scenario, grid_step: f64, jobs: Option<usize>) -> Result<Vec<ETPoint>> {
    s.validate()?;
    let grid = ratio_grid(grid_step)?;
    let points = operating_points(s, &grid);
    let scenarios: Vec<Scenario> = points.iter().map(|p| p.apply(s)).collect();
    for sc in &scenarios {
        sc.validate()?;
    }
    let n_trials = s.n_trials;
    info!(
        "sweeping {} over {} points x {} trials",
        s.mode_label(),
        points.len(),
        n_trials
    );

    let work = || -> Vec<Result<TrialOutcome>> {
        (0..scenarios.len() * n_trials)
            .into_par_iter()
            .map(|item| {
                let (p, t) = (item / n_trials, item % n_trials);
                trial_body(&scenarios[p], t as u64).map_err(|e| Error::Trial {
                    point: p,
                    trial: t,
                    source: Box::new(e),
                })
            })
            .collect()
    };
    let results = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::invalid(format!("cannot start {j} workers: {e}")))?
            .install(work),
        None => work(),
    };
    let outcomes: Vec<TrialOutcome> = results.into_iter().collect::<Result<_>>()?;

    let out: Vec<ETPoint> = outcomes
        .chunks(n_trials)
        .zip(&points)
        .zip(&scenarios)
        .map(|((o, op), sc)| summarize(sc, op, o))
        .collect();
    for p in &out {
        debug!(
            "{} alpha={:?} rho_tx={:?} rho_rx={:?}: E={:e} J, T={} Mbps",
            p.mode, p.alpha, p.rho_tx, p.rho_rx, p.mean_energy_j, p.mean_throughput_mbps
        );
    }
    Ok(out)
}

/// Points not strictly dominated by any other, by energy ascending.
/// Duplicates of a frontier point are all kept.
pub fn pareto_frontier(points: &[ETPoint]) -> Vec<ETPoint> {
    let mut front: Vec<ETPoint> = points
        .iter()
        .filter(|p| !points.iter().any(|q| q.dominates(p)))
        .cloned()
        .collect();
    front.sort_by(|a, b| a.mean_energy_j.total_cmp(&b.mean_energy_j));
    front
}

/// Every point of `b` is weakly dominated by some point of `a`.
pub fn region_dominates(a: &[ETPoint], b: &[ETPoint]) -> bool {
    b.iter().all(|p| a.iter().any(|q| q.weakly_dominates(p)))
}

/// [`region_dominates`] with each comparison relaxed by `k` combined
/// standard errors, for frontiers estimated from a finite number of trials.
pub fn region_dominates_within(a: &[ETPoint], b: &[ETPoint], k: f64) -> bool {
    b.iter().all(|p| {
        a.iter().any(|q| {
            let se_e = q.stderr_energy_j.hypot(p.stderr_energy_j);
            let se_t = q.stderr_throughput_mbps.hypot(p.stderr_throughput_mbps);
            q.mean_energy_j + k * se_e >= p.mean_energy_j
                && q.mean_throughput_mbps + k * se_t >= p.mean_throughput_mbps
        })
    })
}

/// Points of `b` that no point of `a` weakly dominates.
pub fn undominated_by<'a>(a: &[ETPoint], b: &'a [ETPoint]) -> Vec<&'a ETPoint> {
    b.iter()
        .filter(|p| !a.iter().any(|q| q.weakly_dominates(p)))
        .collect()
}

pub const CSV_COLUMNS: [&str; 11] = [
    "mode",
    "alpha",
    "rho_tx",
    "rho_rx",
    "modulation",
    "mean_energy_j",
    "stderr_energy",
    "mean_ber",
    "mean_throughput_mbps",
    "stderr_throughput",
    "n_trials",
];

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), |x| x.to_string())
}

fn parse_opt(field: &str) -> std::result::Result<Option<f64>, String> {
    let v: f64 = field
        .parse()
        .map_err(|_| format!("`{field}` is not a number"))?;
    Ok((!v.is_nan()).then_some(v))
}

impl ETPoint {
    fn csv_fields(&self) -> Vec<String> {
        vec![
            self.mode.clone(),
            fmt_opt(self.alpha),
            fmt_opt(self.rho_tx),
            fmt_opt(self.rho_rx),
            self.modulation.to_string(),
            self.mean_energy_j.to_string(),
            self.stderr_energy_j.to_string(),
            fmt_opt(self.mean_ber),
            self.mean_throughput_mbps.to_string(),
            self.stderr_throughput_mbps.to_string(),
            self.n_trials.to_string(),
        ]
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::invalid(format!("CSV: {other:?}")),
    }
}

/// Write sweep rows, preceded by `# ` comment lines.
pub fn write_points_csv<W: Write>(
    mut out: W,
    points: &[ETPoint],
    comments: &[String],
) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS).map_err(csv_error)?;
    for p in points {
        w.write_record(p.csv_fields()).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Write every point with a trailing `dominated` column, sorted by energy.
pub fn write_frontier_csv<W: Write>(
    mut out: W,
    points: &[ETPoint],
    comments: &[String],
) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut sorted: Vec<&ETPoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.mean_energy_j.total_cmp(&b.mean_energy_j));
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = CSV_COLUMNS.to_vec();
    header.push("dominated");
    w.write_record(&header).map_err(csv_error)?;
    for p in sorted {
        let dominated = points.iter().any(|q| q.dominates(p));
        let mut row = p.csv_fields();
        row.push(dominated.to_string());
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Read rows written by [`write_points_csv`] (or the frontier variant).
/// Errors name the offending line.
pub fn read_points_csv<R: Read>(input: R) -> Result<Vec<ETPoint>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(input);
    let header = r.headers().map_err(csv_error)?.clone();
    let index = |name: &str| -> Result<usize> {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config {
                line: 1,
                message: format!("missing column `{name}`"),
            })
    };
    let cols: Vec<usize> = CSV_COLUMNS
        .iter()
        .map(|c| index(c))
        .collect::<Result<_>>()?;

    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let bad = |message: String| Error::Config { line, message };
        let get = |i: usize| rec.get(cols[i]).unwrap_or("");
        let num = |i: usize| -> Result<f64> {
            get(i)
                .parse()
                .map_err(|_| bad(format!("{}: `{}` is not a number", CSV_COLUMNS[i], get(i))))
        };
        let opt = |i: usize| parse_opt(get(i)).map_err(|m| bad(format!("{}: {m}", CSV_COLUMNS[i])));
        points.push(ETPoint {
            mode: get(0).to_string(),
            alpha: opt(1)?,
            rho_tx: opt(2)?,
            rho_rx: opt(3)?,
            modulation: get(4).parse().map_err(|e: Error| bad(e.to_string()))?,
            mean_energy_j: num(5)?,
            stderr_energy_j: num(6)?,
            mean_ber: opt(7)?,
            mean_throughput_mbps: num(8)?,
            stderr_throughput_mbps: num(9)?,
            n_trials: get(10)
                .parse()
                .map_err(|_| bad(format!("n_trials: `{}` is not a count", get(10))))?,
        });
    }
    Ok(points)
}
