//! Time-switching versus power-splitting energy/throughput regions.
//!
//! ```text
//! cargo run --release --example et_sweep -- [trials]
//! ```

use std::time::Instant;

use swipt_sim::harness::{pareto_frontier, region_dominates, sweep, undominated_by, Scenario};
use swipt_sim::wit::ModulationScheme;

fn main() -> swipt_sim::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(20);

    let mut ts = Scenario::time_switching(ModulationScheme::Qpsk);
    let mut ps = Scenario::power_splitting(ModulationScheme::Qpsk);
    ts.n_trials = trials;
    ps.n_trials = trials;

    let t0 = Instant::now();
    let ts_points = sweep(&ts, 0.1)?;
    let t1 = Instant::now();
    let ps_points = sweep(&ps, 0.1)?;
    let t2 = Instant::now();
    println!(
        "{} TS points in {:.1?}, {} PS points in {:.1?}",
        ts_points.len(),
        t1 - t0,
        ps_points.len(),
        t2 - t1
    );

    let ts_front = pareto_frontier(&ts_points);
    let ps_front = pareto_frontier(&ps_points);
    println!("\nTS frontier (alpha, energy J, throughput Mbps)");
    for p in &ts_front {
        println!(
            "  {:>4} {:.6e} {:>7.3}",
            p.alpha.unwrap_or(f64::NAN),
            p.mean_energy_j,
            p.mean_throughput_mbps
        );
    }
    println!("\nPS frontier (rho_tx, rho_rx, energy J, throughput Mbps)");
    for p in &ps_front {
        println!(
            "  {:>4} {:>4} {:.6e} {:>7.3}",
            p.rho_tx.unwrap_or(f64::NAN),
            p.rho_rx.unwrap_or(f64::NAN),
            p.mean_energy_j,
            p.mean_throughput_mbps
        );
    }

    println!(
        "\nPS region contains TS region: {}",
        region_dominates(&ps_front, &ts_front)
    );
    for p in undominated_by(&ps_front, &ts_front) {
        println!(
            "  TS point alpha={} ({:.6e} J, {:.3} Mbps) lies outside the PS region",
            p.alpha.unwrap_or(f64::NAN),
            p.mean_energy_j,
            p.mean_throughput_mbps
        );
    }
    Ok(())
}
