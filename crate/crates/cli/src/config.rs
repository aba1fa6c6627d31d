//! Scenario configuration: defaults match the published experiment setup,
//! a TOML file overrides the defaults, and command-line flags override the
//! file. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    /// Output directory. Accepted from config files but never echoed back:
    /// where a dataset is written is not part of its identity, and the
    /// manifest must be byte-stable across output locations.
    #[serde(skip_serializing)]
    pub out: PathBuf,
    pub econ: EconConfig,
    pub market: MarketConfig,
    pub credit: CreditConfig,
    pub cascade: CascadeConfig,
    pub popgen: PopgenConfig,
    pub costs: CostsConfig,
    pub ledger_fuzz: LedgerFuzzConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seed: 42,
            out: PathBuf::from("out"),
            econ: EconConfig::default(),
            market: MarketConfig::default(),
            credit: CreditConfig::default(),
            cascade: CascadeConfig::default(),
            popgen: PopgenConfig::default(),
            costs: CostsConfig::default(),
            ledger_fuzz: LedgerFuzzConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: ScenarioConfig = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EconConfig {
    pub v_base: f64,
    /// Limit of the valuation table.
    pub limit: u64,
    /// Limits of the marginal-cost table columns.
    pub marginal_limits: Vec<u64>,
}

impl Default for EconConfig {
    fn default() -> Self {
        EconConfig {
            v_base: 10.0,
            limit: 20,
            marginal_limits: vec![5, 10, 20, 50],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarketConfig {
    pub v_base: f64,
    pub inflation: f64,
    pub trade_cost: f64,
    /// Limits traced in the trajectory figure.
    pub trajectory_limits: Vec<u64>,
    /// `(limit, wash count)` rows of the profit table.
    pub table_rows: Vec<(u64, u64)>,
    /// Limits swept for the break-even figure.
    pub break_even_limits: Vec<u64>,
}

impl Default for MarketConfig {
    fn default() -> Self {
        MarketConfig {
            v_base: 10.0,
            inflation: 0.3,
            trade_cost: 0.005,
            trajectory_limits: vec![5, 10, 20],
            table_rows: vec![
                (5, 1),
                (5, 3),
                (5, 5),
                (10, 3),
                (10, 5),
                (10, 10),
                (20, 5),
                (20, 9),
                (20, 15),
            ],
            break_even_limits: (2..=30).collect(),
        }
    }
}

impl MarketConfig {
    pub fn scenario(&self, limit: u64) -> erc7634_core::WashScenario {
        erc7634_core::WashScenario {
            limit,
            v_base: self.v_base,
            inflation: self.inflation,
            trade_cost: self.trade_cost,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CreditConfig {
    pub ltv: f64,
    pub v0: f64,
    pub limits: Vec<u64>,
}

impl Default for CreditConfig {
    fn default() -> Self {
        CreditConfig {
            ltv: 0.7,
            v0: 10.0,
            limits: vec![4, 6, 10, 20, 50],
        }
    }
}

impl CreditConfig {
    pub fn scenario(&self, limit: u64) -> erc7634_core::LeverageScenario {
        erc7634_core::LeverageScenario {
            limit,
            ltv: self.ltv,
            v0: self.v0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CascadeConfig {
    pub ltv: f64,
    pub v0: f64,
    /// Markdown applied to the next position per liquidation.
    pub liquidation_penalty: f64,
    pub shocks: Vec<f64>,
    /// Chains compared under the shocks.
    pub chain_limits: Vec<u64>,
}

impl Default for CascadeConfig {
    fn default() -> Self {
        CascadeConfig {
            ltv: 0.7,
            v0: 10.0,
            liquidation_penalty: 0.05,
            shocks: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            chain_limits: vec![10, 50],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PopgenConfig {
    pub tokens_per_collection: usize,
    pub caps: Vec<u64>,
}

impl Default for PopgenConfig {
    fn default() -> Self {
        PopgenConfig {
            tokens_per_collection: 10_000,
            caps: vec![3, 5, 10, 20, 50, 100],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostsConfig {
    pub deploy_gas: u64,
    pub deposit_gas: u64,
    pub wrapper_transfer_gas: u64,
    pub direct_transfer_gas: u64,
    pub gas_price_gwei: f64,
    pub eth_price_usd: f64,
    /// Upper end of the break-even curve.
    pub curve_max_n: u64,
}

impl Default for CostsConfig {
    fn default() -> Self {
        let params = erc7634_core::costs::BypassParams::default();
        CostsConfig {
            deploy_gas: params.deploy_gas,
            deposit_gas: params.deposit_gas,
            wrapper_transfer_gas: params.wrapper_transfer_gas,
            direct_transfer_gas: params.direct_transfer_gas,
            gas_price_gwei: params.gas_price_gwei,
            eth_price_usd: params.eth_price_usd,
            curve_max_n: 300,
        }
    }
}

impl CostsConfig {
    pub fn bypass_params(&self) -> erc7634_core::costs::BypassParams {
        erc7634_core::costs::BypassParams {
            deploy_gas: self.deploy_gas,
            deposit_gas: self.deposit_gas,
            wrapper_transfer_gas: self.wrapper_transfer_gas,
            direct_transfer_gas: self.direct_transfer_gas,
            gas_price_gwei: self.gas_price_gwei,
            eth_price_usd: self.eth_price_usd,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LedgerFuzzConfig {
    pub ops: u64,
    pub tokens: u64,
    pub max_limit: u64,
}

impl Default for LedgerFuzzConfig {
    fn default() -> Self {
        LedgerFuzzConfig {
            ops: 100_000,
            tokens: 1_000,
            max_limit: 20,
        }
    }
}
