use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use swipt_sim::config::RunConfig;
use swipt_sim::harness::{
    pareto_frontier, read_points_csv, run_trial, sweep_with_jobs, transmit_waveform, wit_waveform,
    wpt_waveform, write_frontier_csv, write_points_csv,
};
use swipt_sim::iq::{sidecar_path, write_iq, Metadata};
use swipt_sim::rectifier::RectifierModel;
use swipt_sim::signal::{average_power, watts_to_dbm};

/// SWIPT link-level simulator.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// Configuration file (`section.key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Base seed, overriding `sweep.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Wit,
    Wpt,
    Combined,
}

#[derive(Subcommand)]
enum Command {
    /// Write one slot of a waveform as cf32 IQ plus a `.meta` sidecar.
    Gen {
        #[arg(value_enum)]
        kind: Kind,
    },
    /// Run a single trial and report energy, BER and throughput.
    Simulate {
        #[arg(long, default_value_t = 0)]
        trial: u64,
    },
    /// Sweep the ratio grid and write the energy/throughput CSV.
    Sweep {
        /// Also write the frontier (all rows plus a `dominated` column).
        #[arg(long)]
        pareto: bool,
        /// Compute the frontier of an existing sweep CSV instead of running.
        #[arg(long, requires = "pareto")]
        input: Option<PathBuf>,
    },
}

enum Failure {
    Config(swipt_sim::Error),
    Runtime(swipt_sim::Error),
}

impl From<swipt_sim::Error> for Failure {
    fn from(e: swipt_sim::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn load(cli: &Cli) -> Result<RunConfig, Failure> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(|e| {
            Failure::Config(match e {
                swipt_sim::Error::Io(io) => swipt_sim::Error::InvalidParameter(format!(
                    "cannot read {}: {io}",
                    path.display()
                )),
                other => other,
            })
        })?,
        None => RunConfig::default(),
    };
    Ok(match cli.seed {
        Some(seed) => cfg.with_seed(seed),
        None => cfg,
    })
}

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn energy_unit(model: &RectifierModel) -> &'static str {
    match model {
        RectifierModel::Polynomial(_) => "proxy-J",
        RectifierModel::Circuit(_) => "J",
    }
}

fn header(cfg: &RunConfig) -> Vec<String> {
    let s = &cfg.scenario;
    vec![
        format!("config_sha256={}", cfg.sha256),
        format!("seed={}", s.base_seed),
        format!("rectifier={}", s.rectifier.variant_name()),
        format!(
            "energy_unit={} per {} s slot",
            energy_unit(&s.rectifier),
            s.tx.slot_duration_s
        ),
        format!("sim_slot_s={}", s.sim_slot_s),
    ]
}

fn gen(cli: &Cli, kind: Kind) -> Result<(), Failure> {
    let cfg = load(cli)?;
    let s = &cfg.scenario;
    let out = cli.out.as_deref().ok_or_else(|| {
        Failure::Config(swipt_sim::Error::InvalidParameter("gen needs --out".into()))
    })?;
    let (buf, map, name) = match kind {
        Kind::Wpt => (wpt_waveform(s)?, None, "wpt"),
        Kind::Wit => (wit_waveform(s, 0)?, None, "wit"),
        Kind::Combined => {
            let (b, m) = transmit_waveform(s, 0)?;
            (b, m, "combined")
        }
    };
    let mut meta = Metadata::new();
    meta.set("kind", name);
    meta.set("config_sha256", &cfg.sha256);
    meta.set("seed", s.base_seed);
    meta.set("power_dbm", watts_to_dbm(average_power(&buf)?));
    meta.set("carrier_hz", 2.4e9);
    meta.set("tx_mode", s.tx.mode);
    meta.set("alpha_tx", s.tx.alpha_tx);
    meta.set("rho_tx", s.tx.rho_tx);
    meta.set("modulation", s.plan.modulation);
    meta.set(
        "tones",
        s.multisine
            .tone_subcarriers
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    if let Some(m) = map {
        meta.set("segment_boundary", m.boundary);
        meta.set("segment_n_samples", m.n_samples);
    }
    write_iq(out, &buf, &meta)?;
    info!(
        "wrote {} samples to {} and {}",
        buf.len(),
        out.display(),
        sidecar_path(out).display()
    );
    Ok(())
}

fn simulate(cli: &Cli, trial: u64) -> Result<(), Failure> {
    let cfg = load(cli)?;
    let s = &cfg.scenario;
    let o = run_trial(s, trial)?;
    let ber = o.ber.map_or("undefined".to_string(), |b| b.to_string());
    println!("mode             {}", s.mode_label());
    println!("modulation       {}", s.plan.modulation);
    println!("rectifier        {}", s.rectifier.variant_name());
    println!("seed             {}", s.base_seed);
    println!("trial            {trial}");
    println!("dc_metric        {}", o.dc_metric);
    println!(
        "energy           {} {}",
        o.energy_j,
        energy_unit(&s.rectifier)
    );
    println!("ber              {ber}");
    println!("throughput_mbps  {}", o.throughput_mbps);

    if let Some(path) = &cli.out {
        let mut w = BufWriter::new(File::create(path)?);
        for c in header(&cfg) {
            writeln!(w, "# {c}")?;
        }
        writeln!(
            w,
            "trial,mode,modulation,dc_metric,energy_j,ber,throughput_mbps"
        )?;
        writeln!(
            w,
            "{trial},{},{},{},{},{},{}",
            s.mode_label(),
            s.plan.modulation,
            o.dc_metric,
            o.energy_j,
            o.ber.map_or("nan".to_string(), |b| b.to_string()),
            o.throughput_mbps
        )?;
        w.flush()?;
    }
    Ok(())
}

fn frontier_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy();
    out.with_file_name(format!("{stem}.frontier.csv"))
}

fn sweep_cmd(cli: &Cli, pareto: bool, input: Option<&Path>) -> Result<(), Failure> {
    if let Some(path) = input {
        let points = read_points_csv(File::open(path)?).map_err(|e| match e {
            e @ swipt_sim::Error::Config { .. } => Failure::Config(e),
            other => Failure::Runtime(other),
        })?;
        let comments = vec![format!("source={}", path.display())];
        write_frontier_csv(output(cli.out.as_deref())?, &points, &comments)?;
        info!(
            "{} of {} points on the frontier",
            pareto_frontier(&points).len(),
            points.len()
        );
        return Ok(());
    }

    let cfg = load(cli)?;
    let points = sweep_with_jobs(&cfg.scenario, cfg.grid_step, cli.jobs)?;
    let mut comments = header(&cfg);
    comments.push(format!("grid_step={}", cfg.grid_step));
    comments.push(format!("n_trials={}", cfg.scenario.n_trials));
    match (&cli.out, pareto) {
        (Some(out), _) => {
            write_points_csv(output(Some(out))?, &points, &comments)?;
            if pareto {
                write_frontier_csv(output(Some(&frontier_path(out)))?, &points, &comments)?;
            }
        }
        (None, false) => write_points_csv(output(None)?, &points, &comments)?,
        (None, true) => write_frontier_csv(output(None)?, &points, &comments)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SWIPT_SIM_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen { kind } => gen(&cli, *kind),
        Command::Simulate { trial } => simulate(&cli, *trial),
        Command::Sweep { pareto, input } => sweep_cmd(&cli, *pareto, input.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
