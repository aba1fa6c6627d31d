//! Run manifest: artifact version, generator, seed, fitted parameters,
//! per-output checksums, and a config echo sufficient to regenerate the run
//! byte for byte.

use std::path::Path;

use anyhow::{anyhow, Context, Result};
use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;
use crate::outputs::{OutputFile, PopgenFit};

pub const MANIFEST_NAME: &str = "manifest.txt";
const CONFIG_MARKER: &str = "--- config ---";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn render(
    subcommand: &str,
    config: &ScenarioConfig,
    outputs: &[OutputFile],
    fits: &[PopgenFit],
) -> String {
    let mut text = String::new();
    text.push_str("# run manifest\n");
    text.push_str(&format!(
        "artifact = erc7634-cli {}\n",
        env!("CARGO_PKG_VERSION")
    ));
    text.push_str(&format!("generator = {}\n", erc7634_core::popgen::GENERATOR_NAME));
    text.push_str(&format!("seed = {}\n", config.seed));
    text.push_str(&format!("subcommand = {subcommand}\n"));
    for fit in fits {
        let name = fit.collection.label();
        text.push_str(&format!("popgen.{name}.alpha = {:.6}\n", fit.alpha));
        text.push_str(&format!("popgen.{name}.x_max = {}\n", fit.x_max));
        text.push_str(&format!(
            "popgen.{name}.residuals = {:.4},{:.4},{:.4}\n",
            fit.residuals[0], fit.residuals[1], fit.residuals[2]
        ));
    }
    for output in outputs {
        text.push_str(&format!(
            "checksum sha256 {} {}\n",
            sha256_hex(output.content.as_bytes()),
            output.name
        ));
    }
    text.push_str(CONFIG_MARKER);
    text.push('\n');
    text.push_str(&config.to_toml());
    text
}

/// Parsed view of a manifest: the echoed config and the checksum list.
#[derive(Debug, Clone)]
pub struct Manifest {
    pub config: ScenarioConfig,
    pub checksums: Vec<(String, String)>, // (file name, sha256 hex)
}

pub fn parse(text: &str) -> Result<Manifest> {
    let marker = text
        .find(CONFIG_MARKER)
        .ok_or_else(|| anyhow!("manifest has no config section"))?;
    let config_text = &text[marker + CONFIG_MARKER.len()..];
    let config: ScenarioConfig =
        toml::from_str(config_text.trim_start()).context("parsing manifest config echo")?;

    let mut checksums = Vec::new();
    for line in text[..marker].lines() {
        if let Some(rest) = line.strip_prefix("checksum sha256 ") {
            let (hash, name) = rest
                .split_once(' ')
                .ok_or_else(|| anyhow!("malformed checksum line: {line}"))?;
            checksums.push((name.to_string(), hash.to_string()));
        }
    }
    Ok(Manifest { config, checksums })
}

pub fn load(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST_NAME);
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("missing file {}", path.display()))?;
    parse(&text)
}
