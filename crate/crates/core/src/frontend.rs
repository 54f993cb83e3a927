//! Receiver front ends: split the antenna signal between the energy
//! harvester (EH) and the information decoder (ID).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::combiner::{check_ratio, SegmentMap};
use crate::error::{Error, Result};
use crate::signal::IqBuffer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RxMode {
    PowerSplitting,
    TimeSwitching,
    /// Both sinks see the full signal; an upper bound, not a real receiver.
    IdealDual,
}

impl RxMode {
    pub fn name(self) -> &'static str {
        match self {
            Self::PowerSplitting => "power-splitting",
            Self::TimeSwitching => "time-switching",
            Self::IdealDual => "ideal-dual",
        }
    }
}

impl fmt::Display for RxMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RxMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power-splitting" => Ok(Self::PowerSplitting),
            "time-switching" => Ok(Self::TimeSwitching),
            "ideal-dual" => Ok(Self::IdealDual),
            other => Err(Error::invalid(format!(
                "unknown rx mode `{other}` (expected power-splitting, time-switching or ideal-dual)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RxDesign {
    pub mode: RxMode,
    /// Power fraction routed to the harvester.
    pub rho_rx: f64,
    /// Time fraction the switch spends on the harvester.
    pub alpha_rx: f64,
    /// Transmit segment boundary to align the switch with, if known.
    pub segment_map: Option<SegmentMap>,
}

impl Default for RxDesign {
    fn default() -> Self {
        Self {
            mode: RxMode::PowerSplitting,
            rho_rx: 0.5,
            alpha_rx: 0.5,
            segment_map: None,
        }
    }
}

impl RxDesign {
    pub fn validate(&self) -> Result<()> {
        check_ratio("rho_rx", self.rho_rx)?;
        check_ratio("alpha_rx", self.alpha_rx)
    }

    /// Switch position for an `n`-sample slot.
    pub fn boundary(&self, n: usize) -> usize {
        match self.segment_map {
            Some(map) if map.n_samples == n => map.boundary,
            _ => SegmentMap::for_ratio(self.alpha_rx, n).boundary,
        }
    }
}

/// The two receiver streams.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub eh: IqBuffer,
    pub id: IqBuffer,
    /// Sample offset of `id` within the received slot.
    pub id_offset: usize,
}

/// `sqrt(rho_rx)` of the field to the harvester, `sqrt(1 - rho_rx)` to the
/// decoder.
pub fn power_split(rx: &IqBuffer, design: &RxDesign) -> Result<Split> {
    design.validate()?;
    let a_eh = design.rho_rx.sqrt();
    let a_id = (1.0 - design.rho_rx).sqrt();
    Ok(Split {
        eh: rx.scaled(Complex64::new(a_eh, 0.0)),
        id: rx.scaled(Complex64::new(a_id, 0.0)),
        id_offset: 0,
    })
}

/// Harvester gets the first `round(alpha_rx * N)` samples (or the aligned
/// transmit boundary), the decoder the rest.
pub fn time_switch(rx: &IqBuffer, design: &RxDesign) -> Result<Split> {
    design.validate()?;
    let b = design.boundary(rx.len());
    Ok(Split {
        eh: rx.slice(0..b),
        id: rx.slice(b..rx.len()),
        id_offset: b,
    })
}

/// Dispatch on the design's mode.
pub fn split(rx: &IqBuffer, design: &RxDesign) -> Result<Split> {
    match design.mode {
        RxMode::PowerSplitting => power_split(rx, design),
        RxMode::TimeSwitching => time_switch(rx, design),
        RxMode::IdealDual => {
            design.validate()?;
            Ok(Split {
                eh: rx.clone(),
                id: rx.clone(),
                id_offset: 0,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{average_power, watts_to_dbm};
    use proptest::prelude::*;

    fn rx(n: usize) -> IqBuffer {
        IqBuffer::new(
            (0..n)
                .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
                .collect(),
            20e6,
        )
        .unwrap()
    }

    fn ps(rho: f64) -> RxDesign {
        RxDesign {
            mode: RxMode::PowerSplitting,
            rho_rx: rho,
            ..Default::default()
        }
    }

    fn ts(alpha: f64) -> RxDesign {
        RxDesign {
            mode: RxMode::TimeSwitching,
            alpha_rx: alpha,
            ..Default::default()
        }
    }

    #[test]
    fn full_split_starves_the_decoder() {
        let s = power_split(&rx(100), &ps(1.0)).unwrap();
        assert_eq!(average_power(&s.id).unwrap(), 0.0);
    }

    #[test]
    fn half_split_halves_power() {
        let r = rx(100);
        let p = average_power(&r).unwrap();
        let s = power_split(&r, &ps(0.5)).unwrap();
        assert!((average_power(&s.eh).unwrap() - p / 2.0).abs() < 1e-12 * p);
        assert!((average_power(&s.id).unwrap() - p / 2.0).abs() < 1e-12 * p);
    }

    #[test]
    fn worst_case_decoder_power_is_minus_40_dbm() {
        // -20 dBm at the antenna, 10% of it WIT, 10% of that to the ID
        let wit_at_antenna = crate::signal::dbm_to_watts(-20.0) * (1.0 - 0.9);
        let r = IqBuffer::new(vec![Complex64::new(wit_at_antenna.sqrt(), 0.0); 10], 20e6).unwrap();
        let s = power_split(&r, &ps(0.9)).unwrap();
        let dbm = watts_to_dbm(average_power(&s.id).unwrap());
        assert!((dbm + 40.0).abs() < 1e-9, "{dbm}");
    }

    #[test]
    fn switch_boundaries() {
        let r = rx(1000);
        let s0 = time_switch(&r, &ts(0.0)).unwrap();
        assert!(s0.eh.is_empty());
        assert_eq!(s0.id, r);
        let s1 = time_switch(&r, &ts(1.0)).unwrap();
        assert!(s1.id.is_empty());
        assert_eq!(SegmentMap::for_ratio(0.5, 1_000_000).boundary, 500_000);
        let half = time_switch(&rx(1_000_000), &ts(0.5)).unwrap();
        assert_eq!(half.eh.len(), 500_000);
        assert_eq!(half.id_offset, 500_000);
    }

    #[test]
    fn switch_follows_segment_map() {
        let mut d = ts(0.5);
        d.segment_map = Some(SegmentMap {
            boundary: 123,
            n_samples: 1000,
        });
        let s = time_switch(&rx(1000), &d).unwrap();
        assert_eq!(s.eh.len(), 123);
    }

    #[test]
    fn ratios_are_validated() {
        assert!(power_split(&rx(4), &ps(1.5)).is_err());
        assert!(time_switch(&rx(4), &ts(-0.1)).is_err());
    }

    proptest! {
        #[test]
        fn power_split_conserves_energy(rho in 0.0f64..=1.0, n in 1usize..300) {
            let r = rx(n);
            let s = power_split(&r, &ps(rho)).unwrap();
            let e = r.energy();
            prop_assert!((s.eh.energy() + s.id.energy() - e).abs() <= 1e-12 * e);
        }

        #[test]
        fn time_switch_conserves_samples(alpha in 0.0f64..=1.0, n in 1usize..300) {
            let r = rx(n);
            let s = time_switch(&r, &ts(alpha)).unwrap();
            let mut joined = s.eh.samples.clone();
            joined.extend_from_slice(&s.id.samples);
            prop_assert_eq!(joined, r.samples);
        }
    }
}
