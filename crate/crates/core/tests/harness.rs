use swipt_sim::harness::{run_trial, sweep, Estimation, Scenario};
use swipt_sim::rectifier::{DiodeCircuit, RectifierModel};
use swipt_sim::signal::linear_to_db;
use swipt_sim::wit::ModulationScheme;
use swipt_sim::Error;

#[test]
fn worst_power_split_corner_still_decodes() {
    for m in ModulationScheme::ALL {
        let mut s = Scenario::power_splitting(m);
        s.tx.rho_tx = 0.9;
        s.rx.rho_rx = 0.9;
        // splitting scales signal and antenna noise alike
        let id_snr = s.channel.antenna_snr_db() + linear_to_db(1.0 - s.tx.rho_tx);
        assert!(id_snr >= 35.0, "{m}: {id_snr} dB");

        let bits_per_trial = s
            .plan
            .payload_capacity(s.sim_samples() / s.plan.symbol_len());
        let trials = 100_000usize.div_ceil(bits_per_trial) as u64;
        for t in 0..trials {
            let o = run_trial(&s, t).unwrap();
            assert_eq!(o.ber, Some(0.0), "{m} trial {t}");
            assert_eq!(o.throughput_mbps, s.plan.max_data_rate_mbps());
        }
    }
}

#[test]
fn pilot_estimation_also_decodes_at_default_snr() {
    let mut s = Scenario::power_splitting(ModulationScheme::Qam16);
    s.estimation = Estimation::Pilot;
    s.tx.rho_tx = 0.5;
    s.rx.rho_rx = 0.5;
    assert_eq!(run_trial(&s, 0).unwrap().ber, Some(0.0));
}

#[test]
fn time_switching_trades_monotonically() {
    let mut s = Scenario::time_switching(ModulationScheme::Qpsk);
    s.n_trials = 8;
    let points = sweep(&s, 0.1).unwrap();
    assert_eq!(points.len(), 11);
    for w in points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        assert!(a.alpha < b.alpha);
        let se_e = a.stderr_energy_j.hypot(b.stderr_energy_j);
        let se_t = a.stderr_throughput_mbps.hypot(b.stderr_throughput_mbps);
        assert!(
            b.mean_energy_j >= a.mean_energy_j - 2.0 * se_e,
            "{a:?} -> {b:?}"
        );
        assert!(
            b.mean_throughput_mbps <= a.mean_throughput_mbps + 2.0 * se_t,
            "{a:?} -> {b:?}"
        );
    }
    assert_eq!(points[0].mean_energy_j, 0.0);
    assert_eq!(points[10].mean_throughput_mbps, 0.0);
    assert_eq!(points[10].mean_ber, None);
}

#[test]
fn sweep_failure_names_the_point_and_trial() {
    let mut s = Scenario::power_splitting(ModulationScheme::Qpsk);
    s.n_trials = 2;
    s.sim_slot_s = 1e-4;
    s.rectifier = RectifierModel::Circuit(DiodeCircuit {
        max_periods: 2,
        ..Default::default()
    });
    match sweep(&s, 0.5) {
        Err(Error::Trial {
            point,
            trial,
            source,
        }) => {
            assert!(matches!(*source, Error::NonConvergence { .. }), "{source}");
            assert!(trial < 2);
            assert!(point < 9);
        }
        other => panic!("expected a trial error, got {other:?}"),
    }
}
