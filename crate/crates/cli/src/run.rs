//! Subcommand execution: builds the requested outputs, writes them under the
//! output directory, and records the run manifest.

use std::path::Path;

use anyhow::{bail, Context, Result};
use erc7634_core::ledger::sim;

use crate::config::ScenarioConfig;
use crate::manifest;
use crate::outputs::{self, OutputFile, PopgenFit};

/// Every CSV the pipeline can produce, from one config. Used by `all` and by
/// strict verification.
pub fn regenerate_all(config: &ScenarioConfig) -> Result<Vec<OutputFile>> {
    let mut files = Vec::new();
    let (mut popgen_files, _fits) = outputs::popgen_tables(config)?;
    files.append(&mut popgen_files);
    files.append(&mut outputs::econ_tables(config)?);
    files.append(&mut outputs::market_tables(config));
    files.append(&mut outputs::leverage_table(config));
    files.append(&mut outputs::cascade_curves(config));
    files.append(&mut outputs::costs_tables(config));
    Ok(files)
}

fn write_outputs(
    subcommand: &str,
    config: &ScenarioConfig,
    files: &[OutputFile],
    fits: &[PopgenFit],
) -> Result<()> {
    let dir: &Path = &config.out;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for file in files {
        let path = dir.join(&file.name);
        std::fs::write(&path, &file.content)
            .with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    let manifest_text = manifest::render(subcommand, config, files, fits);
    let path = dir.join(manifest::MANIFEST_NAME);
    std::fs::write(&path, manifest_text).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn run_fuzz(config: &ScenarioConfig, ops: Option<u64>, tokens: Option<u64>) -> Result<()> {
    let fuzz = sim::FuzzConfig {
        seed: config.seed,
        ops: ops.unwrap_or(config.ledger_fuzz.ops),
        tokens: tokens.unwrap_or(config.ledger_fuzz.tokens),
        max_limit: config.ledger_fuzz.max_limit,
    };
    let report = sim::run(&fuzz);
    println!(
        "ledger-fuzz: {} ops over {} tokens in {:.2?} (seed {})",
        report.ops, fuzz.tokens, report.elapsed, fuzz.seed
    );
    println!(
        "  transfers: {} ok / {} rejected; mints {}, limit updates {}, burns {}, unlocks {}, policies {}",
        report.transfers_succeeded,
        report.transfers_rejected,
        report.mints,
        report.limit_updates,
        report.burns,
        report.unlocks,
        report.policies_fired
    );
    println!(
        "  safety violations: {}; liveness mismatches: {}; replay: {}; event counts: {}",
        report.safety_violations,
        report.liveness_mismatches,
        if report.replay_matches { "exact" } else { "MISMATCH" },
        if report.event_count_consistent { "consistent" } else { "INCONSISTENT" },
    );
    if !report.clean() {
        bail!("ledger fuzz found violations");
    }
    Ok(())
}

pub fn run_subcommand(name: &str, config: &ScenarioConfig) -> Result<()> {
    match name {
        "econ-tables" => write_outputs(name, config, &outputs::econ_tables(config)?, &[]),
        "market-table" => write_outputs(name, config, &outputs::market_tables(config), &[]),
        "leverage-table" => write_outputs(name, config, &outputs::leverage_table(config), &[]),
        "cascade" => write_outputs(name, config, &outputs::cascade_curves(config), &[]),
        "popgen-tables" => {
            let (files, fits) = outputs::popgen_tables(config)?;
            report_fits(&fits);
            write_outputs(name, config, &files, &fits)
        }
        "costs-tables" => write_outputs(name, config, &outputs::costs_tables(config), &[]),
        "all" => {
            run_fuzz(config, None, None)?;
            let (popgen_files, fits) = outputs::popgen_tables(config)?;
            report_fits(&fits);
            let mut files = popgen_files;
            files.append(&mut outputs::econ_tables(config)?);
            files.append(&mut outputs::market_tables(config));
            files.append(&mut outputs::leverage_table(config));
            files.append(&mut outputs::cascade_curves(config));
            files.append(&mut outputs::costs_tables(config));
            write_outputs(name, config, &files, &fits)
        }
        other => bail!("unknown subcommand {other}"),
    }
}

fn report_fits(fits: &[PopgenFit]) {
    for fit in fits {
        println!(
            "calibrated {}: alpha = {:.4}, x_max = {} (p90/p95/p99 residuals {:+.3}/{:+.3}/{:+.3})",
            fit.collection.label(),
            fit.alpha,
            fit.x_max,
            fit.residuals[0],
            fit.residuals[1],
            fit.residuals[2]
        );
    }
}
