use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cqed_bell::bell::{confirm_mixture_baseline, confirm_projective, prepare_bell_label, AngleSet, BellLabel};
use cqed_bell::chsh::{chsh_scan, chsh_simulated, Pipeline, ScanSource};
use cqed_bell::config::{ConfigFile, DeviceConfig, CONFIG_ENV};
use cqed_bell::inputs::{GridSpec, StateSpec};
use cqed_bell::manifest::RunManifest;
use cqed_bell::quantum::LogicState;
use cqed_bell::readout::{extract_probs, ExtractionMethod};
use cqed_bell::schedule::{full_budget, BudgetPolicy};
use cqed_bell::spectrum::{write_trace_csv, DispersiveParams, Engine, Spectrometer, DEFAULT_N_MAX};
use cqed_bell::units::to_mhz;
use cqed_bell::{Error, Result};

#[derive(Parser)]
#[command(name = "cqed-bell", version, about = "Circuit-QED Bell test by joint spectral measurement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prepare a Bell state and print the confirmation probabilities.
    Prepare {
        #[arg(long, default_value = "phi-minus")]
        bell: BellLabel,
        /// Also print the statistics of the |00⟩/|11⟩ classical mixture.
        #[arg(long)]
        mixture_baseline: bool,
    },
    /// Compute a transmission spectrum and write it as CSV.
    Spectrum {
        /// bell:<label>, basis:<kl>, encoded:<θ1>,<θ2>, amps:<8 numbers>, random:<seed>
        #[arg(long, default_value = "bell:phi-minus")]
        state: StateSpec,
        #[command(flatten)]
        sim: SimArgs,
        /// Run all three engines and print their largest normalized deviation.
        #[arg(long)]
        compare: bool,
        /// Print the peak table read with this method.
        #[arg(long)]
        peaks: Option<ExtractionMethod>,
        #[arg(long, default_value = "spectrum.csv")]
        out: PathBuf,
    },
    /// Run the CHSH test. Exit status 0 if violated, 1 if not, 2 on error.
    Chsh {
        #[arg(long, conflicts_with = "angles", default_value = "set1")]
        preset: Preset,
        /// θ1 θ2 θ1' θ2' in radians.
        #[arg(long, num_args = 4, allow_negative_numbers = true)]
        angles: Option<Vec<f64>>,
        #[arg(long, default_value = "naive")]
        method: ExtractionMethod,
        #[command(flatten)]
        sim: SimArgs,
        /// Text report destination (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON report destination.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Search f over a uniform angle grid and export the landscape.
    Scan {
        #[arg(long, default_value_t = 16)]
        resolution: usize,
        /// Simulate with this extraction method instead of using exact probabilities.
        #[arg(long)]
        method: Option<ExtractionMethod>,
        /// Only visit θ1' = θ1, θ2' = θ2.
        #[arg(long)]
        restricted: bool,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, default_value = "landscape.csv")]
        out: PathBuf,
    },
    /// Gate durations and the time budget against T2.
    Schedule {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 40.0)]
        measurement_ns: f64,
        #[arg(long, default_value_t = 4)]
        chsh_measurements: u32,
        /// Count the two initial rx(π/4) rotations once, at the longer duration.
        #[arg(long)]
        parallel_rotations: bool,
        /// JSON schedule destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Preset {
    Set1,
    Set2,
}

#[derive(Args)]
struct SimArgs {
    /// Configuration file (default: $CQED_BELL_CONFIG, then built-in values).
    #[arg(long)]
    config: Option<PathBuf>,
    /// lo:hi:points in MHz of Δr/2π.
    #[arg(long, default_value_t = GridSpec::default(), allow_hyphen_values = true)]
    grid: GridSpec,
    #[arg(long, default_value = "lorentzian")]
    engine: Engine,
    /// Photon-number cutoff of the master-equation engine.
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    n_max: usize,
}

impl SimArgs {
    fn config_path(&self) -> Option<PathBuf> {
        self.config
            .clone()
            .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from))
    }

    fn resolve(&self) -> Result<(DispersiveParams, Spectrometer)> {
        let params = DispersiveParams::from_config(&ConfigFile::resolve(self.config.as_deref())?)?;
        let spectrometer = Spectrometer::new(self.engine, &params, &self.grid.build()?, self.n_max)?;
        Ok((params, spectrometer))
    }

    fn manifest(&self, command: &str, params: &DispersiveParams) -> RunManifest {
        let mut m = RunManifest::new(command, std::env::args().skip(1).collect(), self.config_path().as_deref());
        m.parameter("gamma_1_MHz", to_mhz(params.gamma1))
            .parameter("gamma_2_MHz", to_mhz(params.gamma2))
            .parameter("kappa_MHz", to_mhz(params.kappa))
            .parameter("probe_epsilon_MHz", to_mhz(params.epsilon))
            .parameter("grid", self.grid)
            .parameter("engine", self.engine)
            .parameter("n_max", self.n_max);
        m
    }
}

fn print_probs(label: &str, p: &[f64; 4]) {
    let cells: Vec<String> = LogicState::ALL
        .iter()
        .map(|s| format!("P{} = {:.6}", s.label(), p[s.index()]))
        .collect();
    println!("{label:<10} {}", cells.join("  "));
}

fn write_with_manifest(out: &Path, contents: &[u8], manifest: &mut RunManifest) -> Result<()> {
    std::fs::write(out, contents)?;
    manifest.output(out);
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Prepare { bell, mixture_baseline } => {
            let s = prepare_bell_label(bell);
            println!("state {bell}");
            for b in LogicState::ALL {
                let a = s.amplitude(b);
                println!("  |{}⟩  {:+.6} {:+.6}i", b.label(), a.re, a.im);
            }
            let c = confirm_projective(&s);
            print_probs("direct", &c.direct);
            print_probs("rotated", &c.rotated);
            if mixture_baseline {
                let m = confirm_mixture_baseline();
                println!("classical mixture of |00⟩ and |11⟩:");
                print_probs("direct", &m.direct);
                print_probs("rotated", &m.rotated);
            }
        }
        Command::Spectrum {
            state,
            sim,
            compare,
            peaks,
            out,
        } => {
            let (params, spectrometer) = sim.resolve()?;
            let s = state.build()?;
            let trace = spectrometer.trace(&s)?;
            let mut buf = Vec::new();
            write_trace_csv(&trace, &mut buf)?;
            let mut manifest = sim.manifest("spectrum", &params);
            manifest.parameter("state", &state);
            write_with_manifest(&out, &buf, &mut manifest)?;
            println!("{} trace of {state} written to {}", sim.engine, out.display());
            if let Some(method) = peaks {
                let table = extract_probs(&trace, &params, method)?;
                let mut csv = Vec::new();
                table.write_csv(&mut csv)?;
                print!("{}", String::from_utf8_lossy(&csv));
                for note in &table.notes {
                    println!("note: {note}");
                }
            }
            if compare {
                let grid = sim.grid.build()?;
                let traces = Engine::ALL
                    .iter()
                    .map(|&e| Spectrometer::new(e, &params, &grid, sim.n_max)?.trace(&s))
                    .collect::<Result<Vec<_>>>()?;
                for i in 0..3 {
                    for j in i + 1..3 {
                        println!(
                            "max normalized deviation {} vs {}: {:.3e}",
                            Engine::ALL[i],
                            Engine::ALL[j],
                            traces[i].max_normalized_deviation(&traces[j])?
                        );
                    }
                }
            }
            manifest.write(&RunManifest::path_for(&out))?;
        }
        Command::Chsh {
            preset,
            angles,
            method,
            sim,
            out,
            json,
        } => {
            let angles = match angles.as_deref() {
                Some(&[a, b, c, d]) => AngleSet::new(a, b, c, d)?,
                Some(_) => return Err(Error::InvalidArgument("--angles expects four values".into())),
                None => match preset {
                    Preset::Set1 => AngleSet::set1(),
                    Preset::Set2 => AngleSet::set2(),
                },
            };
            let params = DispersiveParams::from_config(&ConfigFile::resolve(sim.config.as_deref())?)?;
            let pipeline = Pipeline::new(sim.engine, &params, &sim.grid.build()?, sim.n_max, method)?;
            let report = chsh_simulated(&angles, &pipeline)?;
            let mut manifest = sim.manifest("chsh", &params);
            manifest.parameter("method", method);
            let text = format!("{report}\n");
            match &out {
                Some(path) => write_with_manifest(path, text.as_bytes(), &mut manifest)?,
                None => print!("{text}"),
            }
            if let Some(path) = &json {
                write_with_manifest(path, (report.to_json() + "\n").as_bytes(), &mut manifest)?;
            }
            if let Some(primary) = out.as_ref().or(json.as_ref()) {
                manifest.write(&RunManifest::path_for(primary))?;
            }
            return Ok(if report.violated { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Scan {
            resolution,
            method,
            restricted,
            sim,
            out,
        } => {
            let params = DispersiveParams::from_config(&ConfigFile::resolve(sim.config.as_deref())?)?;
            let pipeline = match method {
                Some(m) => Some(Pipeline::new(sim.engine, &params, &sim.grid.build()?, sim.n_max, m)?),
                None => None,
            };
            let source = pipeline.as_ref().map_or(ScanSource::Analytic, ScanSource::Simulated);
            let result = chsh_scan(resolution, source, restricted)?;
            let mut buf = Vec::new();
            result.write_landscape_csv(&mut buf)?;
            let mut manifest = sim.manifest("scan", &params);
            manifest
                .parameter("resolution", resolution)
                .parameter("restricted", restricted)
                .parameter("method", method.map_or("exact".to_string(), |m| m.to_string()));
            write_with_manifest(&out, &buf, &mut manifest)?;
            manifest.write(&RunManifest::path_for(&out))?;
            println!("best of {} combinations:", result.landscape.len());
            println!("{}", result.best);
        }
        Command::Schedule {
            config,
            measurement_ns,
            chsh_measurements,
            parallel_rotations,
            out,
        } => {
            let device = DeviceConfig::from_config(&ConfigFile::resolve(config.as_deref())?)?;
            for w in device.warnings() {
                eprintln!("warning: {w}");
            }
            let policy = BudgetPolicy {
                measurement_ns,
                chsh_measurements,
                sequential_state_rotations: !parallel_rotations,
                ..BudgetPolicy::default()
            };
            let schedule = full_budget(&device, &policy)?;
            println!("{schedule}");
            if let Some(path) = out {
                std::fs::write(&path, schedule.to_json() + "\n")?;
                let config_path = config.or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
                let mut manifest =
                    RunManifest::new("schedule", std::env::args().skip(1).collect(), config_path.as_deref());
                manifest.parameter("measurement_ns", measurement_ns).output(&path);
                manifest.write(&RunManifest::path_for(&path))?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
