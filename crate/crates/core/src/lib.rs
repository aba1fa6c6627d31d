//! Counted NFT transfers: a deterministic, runtime-free model of
//! transfer-bounded token ownership (ERC-7634 semantics) together with the
//! economics it induces.
//!
//! - [`ledger`]: event-sourced state machine enforcing per-token transfer
//!   budgets, with post-cap policies and exact replay.
//! - [`econ`]: mobility-premium valuation and marginal mobility cost.
//! - [`market`]: cap-aware wash-trading profitability and break-even.
//! - [`credit`]: recursive collateralization bounds and shock cascades.
//! - [`popgen`]: calibrated power-law transfer-count populations.
//! - [`costs`]: gas model, wrapper-bypass economics, mitigation catalog.
//!
//! The valuation and risk math is generic over the scalar type through
//! [`scalar::Real`]; every model defaults to `f64`, and the aliases below fix
//! the concrete types used by the CLI.

pub mod costs;
pub mod credit;
pub mod econ;
pub mod ledger;
pub mod market;
pub mod popgen;
pub mod scalar;

pub use scalar::Real;

/// Default value scalar for table reproduction and the CLI.
pub type Eth = f64;

/// `f64` instantiations of the generic models.
pub type PremiumModel = econ::PremiumModel<Eth>;
pub type ValuationInput = econ::ValuationInput<Eth>;
pub type WashScenario = market::WashScenario<Eth>;
pub type LeverageScenario = credit::LeverageScenario<Eth>;
pub type LeverageChain = credit::LeverageChain<Eth>;
