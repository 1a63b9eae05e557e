//! Command-line front end. Exit codes: 0 success, 1 I/O or usage, 2 domain errors.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{debug, info};

use crate::error::{Error, Result};
use crate::forward::{effective_hamiltonian, g_function, g_function_dense_oracle};
use crate::instance::{max_entry_error, pole_estimates, probe_window, CouplingSign, InstanceGenerator};
use crate::inverse::{choose_probe_energies, reconstruct};
use crate::model::{matrix_rows, GSample, PartitionedHamiltonian, SampleSet, TridiagonalChain};
use crate::spectral::{
    eigenvalues_dense, hidden_levels, self_consistent_solve, SelfConsistentOptions,
};
use crate::toys::{m2_paradox, two_level_reconstruct, M2ToyInput, ParadoxSetup, TwoLevelInput};

pub const ROUNDTRIP_TOL: f64 = 1e-7;

#[derive(Debug, Parser)]
#[command(name = "effham", version, about = "Effective Hamiltonians: projection and reconstruction")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write H_eff(E) as a JSON matrix.
    Project {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        energy: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sample G(E) at comma-separated energies into a sample-set JSON.
    Gfun {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        energies: Vec<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the spectrum of H, or a self-consistent H_eff level.
    Spectrum(SpectrumArgs),
    /// Reconstruct the chain from 2K+1 samples.
    Reconstruct {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        holdout: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Random instance through the full forward and inverse cycle.
    Roundtrip(RoundtripArgs),
    /// Worked examples.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub self_consistent: bool,
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub eta0: f64,
    #[arg(long, default_value_t = 0.5)]
    pub damping: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub fp_tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    #[arg(long = "K")]
    pub k: usize,
    #[arg(long = "M", default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = SignArg::Positive)]
    pub sign: SignArg,
    #[arg(long, default_value_t = 0.05)]
    pub margin: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SignArg {
    Positive,
    Negative,
    Mixed,
}

#[derive(Debug, Subcommand)]
pub enum Demo {
    /// 2x2 Hamiltonian from two levels.
    TwoLevel {
        #[arg(long = "X", default_value_t = 2.0, allow_hyphen_values = true)]
        x: f64,
        #[arg(long = "Y", default_value_t = -2.0, allow_hyphen_values = true)]
        y: f64,
        #[arg(long = "a", default_value_t = 1.0, allow_hyphen_values = true)]
        a: f64,
    },
    /// M = 2 reconstruction with a consistent and a perturbed G guess.
    M2Paradox {
        #[arg(long = "A", default_value_t = 1.0, allow_hyphen_values = true)]
        a: f64,
        #[arg(long = "B", default_value_t = 1.0, allow_hyphen_values = true)]
        b: f64,
        #[arg(long = "C", default_value_t = 1.0, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        a0: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        rho0: f64,
        #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
        a1: f64,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        epsilon: f64,
    },
}

/// Sets up logging from `EFFHAM_LOG` (`quiet`, `info` or `debug`).
pub fn init_logging() {
    let level = match std::env::var("EFFHAM_LOG").as_deref() {
        Ok("debug") => log::LevelFilter::Debug,
        Ok("info") => log::LevelFilter::Info,
        _ => log::LevelFilter::Off,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .try_init();
}

/// Runs one command; diagnostics go to stderr as `effham: <Kind>: <detail>`.
pub fn run(config: CliConfig) -> i32 {
    match execute(config.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("effham: {}", err.to_string().replace('\n', " "));
            if err.is_domain() {
                2
            } else {
                1
            }
        }
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, format!("{text}\n"))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Project {
            input,
            energy,
            output,
        } => {
            let h = PartitionedHamiltonian::read(&input)?;
            info!("projecting {}x{} Hamiltonian at E = {energy}", h.n(), h.n());
            let heff = effective_hamiltonian(&h, energy)?;
            emit(&serde_json::to_string(&matrix_rows(&heff))?, output.as_ref())?;
            Ok(0)
        }
        Command::Gfun {
            input,
            energies,
            output,
        } => {
            let h = PartitionedHamiltonian::read(&input)?;
            let samples = energies
                .iter()
                .map(|&e| Ok(GSample::new(e, g_function(&h.chain, e)?)))
                .collect::<Result<Vec<_>>>()?;
            emit(&SampleSet { samples }.to_json()?, output.as_ref())?;
            Ok(0)
        }
        Command::Spectrum(args) => spectrum(args),
        Command::Reconstruct {
            samples,
            k,
            holdout,
            output,
        } => {
            let set = SampleSet::read(&samples)?;
            let held = match holdout {
                Some(path) => SampleSet::read(&path)?.samples,
                None => Vec::new(),
            };
            let report = reconstruct(&set.samples, k, &held)?;
            debug!("condition estimate {:e}", report.condition_estimate);
            emit(&report.to_json()?, output.as_ref())?;
            Ok(0)
        }
        Command::Roundtrip(args) => roundtrip(args),
        Command::Demo { which } => demo(which),
    }
}

fn spectrum(args: SpectrumArgs) -> Result<i32> {
    let h = PartitionedHamiltonian::read(&args.input)?;
    let mut out = String::new();
    if args.self_consistent {
        let options = SelfConsistentOptions {
            damping: args.damping,
            fp_tol: args.fp_tol,
            max_iter: args.max_iter,
            ..Default::default()
        };
        let r = self_consistent_solve(&h, args.eta0, args.level, &options)?;
        writeln!(out, "# iter eta").unwrap();
        for (i, eta) in r.trace.iter().enumerate() {
            writeln!(out, "{i} {eta:.17e}").unwrap();
        }
        writeln!(out, "level = {}", r.level_index).unwrap();
        writeln!(out, "energy = {:.17e}", r.energy).unwrap();
        writeln!(out, "iterations = {}", r.iterations).unwrap();
        let vec: Vec<String> = r.eigvec_model.iter().map(|x| format!("{x:.12e}")).collect();
        write!(out, "eigvec_model = {}", vec.join(" ")).unwrap();
    } else {
        let full = h.assemble_dense()?;
        let values = eigenvalues_dense(&full)?;
        writeln!(out, "# n re im  (N = {})", h.n()).unwrap();
        for (i, z) in values.iter().enumerate() {
            writeln!(out, "{} {:.17e} {:.17e}", i + 1, z.re, z.im).unwrap();
        }
        let scale = full.amax().max(1.0);
        let hidden = hidden_levels(&h, 1e-9 * scale)?;
        write!(out, "# levels shared with QHQ (invisible to H_eff): {}", hidden.len()).unwrap();
    }
    emit(&out, None)?;
    Ok(0)
}

fn roundtrip(args: RoundtripArgs) -> Result<i32> {
    if args.m == 0 {
        return Err(Error::InvalidInput("--M must be at least 1".into()));
    }
    let sign = match args.sign {
        SignArg::Positive => CouplingSign::Positive,
        SignArg::Negative => CouplingSign::Negative,
        SignArg::Mixed => CouplingSign::Mixed,
    };
    let mut generator = InstanceGenerator::new(args.seed).with_sign(sign);
    let mut worst: f64 = 0.0;
    for trial in 0..args.trials.max(1) {
        let h = generator.hamiltonian(args.m, args.k);
        let err = roundtrip_instance(&h, args.margin)?;
        info!("trial {trial}: max_err {err:e}");
        worst = worst.max(err);
    }
    let verdict = if worst <= ROUNDTRIP_TOL { "<=" } else { ">" };
    println!(
        "K={} M={} seed={} trials={}",
        args.k,
        args.m,
        args.seed,
        args.trials.max(1)
    );
    println!("max_err = {worst:e}");
    println!("max_err {verdict} 1e-7");
    Ok(if worst <= ROUNDTRIP_TOL { 0 } else { 2 })
}

/// Samples G through the dense oracle of the full Hamiltonian, then reconstructs.
fn roundtrip_instance(h: &PartitionedHamiltonian, margin: f64) -> Result<f64> {
    let chain: &TridiagonalChain = &h.chain;
    let k = chain.k();
    let poles = pole_estimates(chain, margin)?;
    let probes = choose_probe_energies(2 * k + 1, probe_window(chain)?, &poles, margin)?;
    let samples = probes
        .iter()
        .map(|&e| Ok(GSample::new(e, g_function_dense_oracle(h, e)?)))
        .collect::<Result<Vec<_>>>()?;
    let report = reconstruct(&samples, k, &[])?;
    Ok(max_entry_error(chain, &report.chain))
}

fn demo(which: Demo) -> Result<i32> {
    let mut out = String::new();
    match which {
        Demo::TwoLevel { x, y, a } => {
            let r = two_level_reconstruct(&TwoLevelInput { x, y, a })?;
            writeln!(out, "levels X = {x}, Y = {y}").unwrap();
            writeln!(out, "energy origin shifted by {} so that X + Y = 0", r.shift).unwrap();
            writeln!(out, "centred level X = {}", r.half_gap).unwrap();
            writeln!(out, "free parameter a = {}, d = -a = {}", r.a, r.d).unwrap();
            writeln!(out, "varrho = X^2 - a^2 = {}", r.varrho).unwrap();
            let m = r.matrix;
            writeln!(out, "H = [[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1]).unwrap();
            let ev = eigenvalues_dense(&r.uncentered())?;
            let ev: Vec<String> = ev.iter().map(|z| format!("{}", z.re)).collect();
            writeln!(out, "eigenvalues (original frame): {}", ev.join(", ")).unwrap();
            write!(
                out,
                "symmetric form b = c = sqrt(varrho): {}",
                if r.is_symmetrizable() { "available" } else { "not available (varrho < 0)" }
            )
            .unwrap();
        }
        Demo::M2Paradox {
            a,
            b,
            c,
            a0,
            rho0,
            a1,
            epsilon,
        } => {
            let setup = ParadoxSetup {
                model: M2ToyInput { a, b, c },
                chain: TridiagonalChain::new(vec![a0, a1], vec![rho0])?,
                epsilon,
                third_probe: None,
            };
            let r = m2_paradox(&setup)?;
            writeln!(out, "original H = [[{a}, {b}, 0], [{c}, {a0}, {rho0}], [0, 1, {a1}]]").unwrap();
            writeln!(out, "original spectrum: {:?}", r.original_spectrum).unwrap();
            writeln!(out, "measured levels E- = {}, E+ = {}", r.measured[0], r.measured[1]).unwrap();
            for (e, (g, closed)) in r.measured.iter().zip(r.closed_form_check) {
                writeln!(out, "  G({e}) = {g}   BC/(A-E) = {closed}").unwrap();
            }
            for g in [&r.lucky, &r.wrong] {
                writeln!(out, "{} guess:", g.label).unwrap();
                for s in &g.samples {
                    writeln!(out, "  G_input({}) = {}", s.energy, s.g_value).unwrap();
                }
                writeln!(
                    out,
                    "  reconstructed a0 = {}, rho0 = {}, a1 = {}",
                    g.chain.a[0], g.chain.rho[0], g.chain.a[1]
                )
                .unwrap();
                writeln!(out, "  spectrum: {:?}", g.spectrum).unwrap();
                writeln!(out, "  max level mismatch: {:e}", g.spectral_mismatch).unwrap();
            }
            out.pop();
        }
    }
    emit(&out, None)?;
    Ok(0)
}
