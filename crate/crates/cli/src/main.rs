mod commands;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::SetSpec;
use crate::output::{Emitter, Format};

/// Gap counts between consecutive units modulo square-free integers and primorials.
#[derive(Debug, Parser)]
#[command(name = "gapcensus", version, propagate_version = true)]
struct Cli {
    /// Worker threads for coefficient enumeration and sieve segments
    /// (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Directory holding cached coefficient listings.
    #[arg(
        long,
        global = true,
        env = "GAPCENSUS_CACHE",
        default_value = ".gapcache"
    )]
    cache_dir: PathBuf,

    /// Neither read nor write the coefficient cache.
    #[arg(long, global = true)]
    no_cache: bool,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Size of the core of a configuration: how many x have x + T inside E.
    Nu {
        #[arg(long)]
        n: u64,
        /// `U` for the units of Z/nZ, or a comma-separated residue list.
        #[arg(long = "set", default_value = "U")]
        set: SetSpec,
        /// Comma-separated offsets; must include 0.
        #[arg(
            long = "config",
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        config: Vec<i128>,
    },
    /// Number of x for which x + T is a consecutive run of E.
    Kappa {
        #[arg(long)]
        n: u64,
        #[arg(long = "set", default_value = "U")]
        set: SetSpec,
        #[arg(
            long = "config",
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        config: Vec<i128>,
        #[arg(long, value_enum, default_value_t = KappaMethod::Ie)]
        method: KappaMethod,
    },
    /// Coefficient listing for gap length D.
    Coeffs {
        #[arg(long = "D", value_name = "D")]
        gap: u64,
    },
    /// K(D, p#): gaps of length D between consecutive units modulo p#.
    Gaps {
        #[arg(long = "D", value_name = "D")]
        gap: u64,
        #[arg(long)]
        p: u64,
    },
    /// Every nonzero K(D, p#) for one prime p, with checksum flags.
    Census {
        #[arg(long)]
        p: u64,
        /// Enumerate U(p#) instead of evaluating coefficient listings.
        #[arg(long)]
        oracle: bool,
    },
    /// Grid of K(D, p#): rows D, columns p.
    Table {
        #[arg(long = "max-p", default_value_t = 29)]
        max_p: u64,
        #[arg(long = "max-D", value_name = "MAX_D", default_value_t = 50)]
        max_gap: u64,
    },
    /// Euler's phi or Nagell's theta for a square-free modulus.
    Totient {
        #[arg(long, conflicts_with = "theta", required_unless_present = "theta")]
        phi: bool,
        /// Shift m in theta(m, P).
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<i128>,
        /// Prime divisors of P, comma-separated.
        #[arg(
            long,
            value_delimiter = ',',
            conflicts_with = "modulus",
            required_unless_present = "modulus"
        )]
        support: Vec<u64>,
        #[arg(long)]
        modulus: Option<u64>,
    },
    /// Cross-checks formulas against enumeration and sampled invariants.
    Verify {
        #[arg(long = "max-p", default_value_t = 13)]
        max_p: u64,
        #[arg(long = "max-D", value_name = "MAX_D", default_value_t = 30)]
        max_gap: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random instances per sampled invariant.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KappaMethod {
    /// Scan E for consecutive runs.
    Direct,
    /// Inclusion-exclusion over the complement of T.
    Ie,
    /// Both, failing if they disagree.
    Both,
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let cache = (!cli.no_cache).then_some(cli.cache_dir.as_path());
    let mut out = Emitter::new(cli.format);
    match cli.command {
        Command::Nu { n, set, config } => commands::nu(&mut out, n, &set, &config)?,
        Command::Kappa {
            n,
            set,
            config,
            method,
        } => commands::kappa(&mut out, n, &set, &config, method)?,
        Command::Coeffs { gap } => commands::coeffs(&mut out, &commands::engine(cache)?, gap)?,
        Command::Gaps { gap, p } => commands::gaps(&mut out, &commands::engine(cache)?, gap, p)?,
        Command::Census { p, oracle } => {
            if oracle {
                commands::census_oracle(&mut out, p)?
            } else {
                commands::census(&mut out, &commands::engine(cache)?, p)?
            }
        }
        Command::Table { max_p, max_gap } => {
            commands::table(&mut out, &commands::engine(cache)?, max_p, max_gap)?
        }
        Command::Totient {
            phi: _,
            theta,
            support,
            modulus,
        } => commands::totient(&mut out, theta, support, modulus)?,
        Command::Verify {
            max_p,
            max_gap,
            seed,
            samples,
        } => {
            let opts = verify::Options {
                max_p,
                max_gap,
                seed,
                samples,
            };
            if !verify::run(&mut out, cache, &opts)? {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
