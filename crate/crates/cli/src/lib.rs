//! Experiment runner for the counted-transfer models: regenerates every
//! table and figure dataset from a scenario config with seeded determinism,
//! and verifies outputs against the embedded expected values.

pub mod config;
pub mod expected;
pub mod manifest;
pub mod outputs;
pub mod run;
pub mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::ScenarioConfig;
use verify::ToleranceProfile;

#[derive(Debug, Parser)]
#[command(
    name = "erc7634",
    version,
    about = "Counted NFT transfer models: ledger fuzzing, economics tables, and verification"
)]
struct Cli {
    /// Scenario config (TOML); defaults cover the published setup.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed override for all randomized stages.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory override.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Verification strictness.
    #[arg(long, global = true, value_enum, default_value = "paper")]
    tolerance_profile: ToleranceProfile,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Randomized ledger workload: safety, liveness, replay determinism.
    LedgerFuzz {
        /// Operation count (default from config).
        #[arg(long)]
        ops: Option<u64>,
        /// Token population (default from config).
        #[arg(long)]
        tokens: Option<u64>,
    },
    /// Valuation and marginal-cost tables (table4.csv, table5.csv).
    EconTables,
    /// Wash-trade profitability and trajectories (table6.csv, fig6.csv, fig7.csv).
    MarketTable,
    /// Leverage bounds under transfer caps (table7.csv).
    LeverageTable,
    /// Cascade losses under price shocks (fig9.csv).
    Cascade,
    /// Population statistics and cap exceedance (table2.csv, table3.csv, hist_*.csv).
    PopgenTables,
    /// Gas comparison and wrapper break-even curve (table8.csv, fig10a.csv).
    CostsTables {
        /// Wrapper deployment gas override.
        #[arg(long)]
        deploy_gas: Option<u64>,
        /// Wrapper deposit gas override.
        #[arg(long)]
        deposit_gas: Option<u64>,
        /// Per-transfer wrapper gas override.
        #[arg(long)]
        wrapper_transfer_gas: Option<u64>,
        /// Direct counted-transfer gas override.
        #[arg(long)]
        direct_transfer_gas: Option<u64>,
    },
    /// Every dataset plus the run manifest.
    All,
    /// Check an output directory against the embedded expected tables.
    Verify,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::LedgerFuzz { .. } => "ledger-fuzz",
            Command::EconTables => "econ-tables",
            Command::MarketTable => "market-table",
            Command::LeverageTable => "leverage-table",
            Command::Cascade => "cascade",
            Command::PopgenTables => "popgen-tables",
            Command::CostsTables { .. } => "costs-tables",
            Command::All => "all",
            Command::Verify => "verify",
        }
    }
}

fn run_cli() -> Result<()> {
    let cli = Cli::parse();
    let mut config = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out = out.clone();
    }

    match &cli.command {
        Command::Verify => {
            verify::verify_dir(&config.out, cli.tolerance_profile)?;
            println!("verify: all checks passed");
            Ok(())
        }
        Command::LedgerFuzz { ops, tokens } => run::run_fuzz(&config, *ops, *tokens),
        Command::CostsTables {
            deploy_gas,
            deposit_gas,
            wrapper_transfer_gas,
            direct_transfer_gas,
        } => {
            if let Some(gas) = deploy_gas {
                config.costs.deploy_gas = *gas;
            }
            if let Some(gas) = deposit_gas {
                config.costs.deposit_gas = *gas;
            }
            if let Some(gas) = wrapper_transfer_gas {
                config.costs.wrapper_transfer_gas = *gas;
            }
            if let Some(gas) = direct_transfer_gas {
                config.costs.direct_transfer_gas = *gas;
            }
            run::run_subcommand("costs-tables", &config)
        }
        other => run::run_subcommand(other.name(), &config),
    }
}

pub fn main_entry() -> ExitCode {
    match run_cli() {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            // One machine-parsable line, whatever shape the source error had.
            let message: Vec<String> = format!("{error:#}")
                .split_whitespace()
                .map(str::to_string)
                .collect();
            eprintln!("error: {}", message.join(" "));
            ExitCode::FAILURE
        }
    }
}
