//! Cap-aware wash-trading profitability.
//!
//! In a cap-aware market, buyers observe the remaining transfer budget and
//! price a token at its transfer-adjusted fair value, which under the concave
//! (γ = 0.5) premium is `v_base * sqrt((L - n) / L)` after `n` consumed
//! transfers. The attacker buys at base value, inflates by a fraction, and
//! can sell at most the inflated fair value; every wash trade burns budget
//! and per-trade cost, so the scheme is self-limiting.

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WashScenario<T = f64> {
    /// Transfer limit; must be positive.
    pub limit: u64,
    pub v_base: T,
    /// Artificial price inflation fraction achieved by the wash trades.
    pub inflation: T,
    /// Per-trade cost.
    pub trade_cost: T,
}

impl<T: Real> WashScenario<T> {
    /// Baseline parameters: 10 base value, 30% inflation, 0.005 per trade.
    pub fn with_limit(limit: u64) -> Self {
        WashScenario {
            limit,
            v_base: T::from_count(10),
            inflation: T::from_f64(0.3).unwrap(),
            trade_cost: T::from_f64(0.005).unwrap(),
        }
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum MarketError {
    #[error("wash count exceeds transfer budget")]
    BudgetExceeded,
}

type Result<T> = std::result::Result<T, MarketError>;

/// Transfer-adjusted fair value after `n` consumed transfers. The square
/// root is applied directly here; an integration test cross-checks it against
/// the general valuation path.
pub fn fair_value_after<T: Real>(n: u64, scenario: &WashScenario<T>) -> Result<T> {
    let remaining = scenario
        .limit
        .checked_sub(n)
        .ok_or(MarketError::BudgetExceeded)?;
    let x = T::from_count(remaining) / T::from_count(scenario.limit);
    Ok(scenario.v_base * x.sqrt())
}

/// Best achievable resale price after `n` wash trades: fair value times
/// `(1 + inflation)`.
pub fn max_sell<T: Real>(n: u64, scenario: &WashScenario<T>) -> Result<T> {
    Ok(fair_value_after(n, scenario)? * (T::one() + scenario.inflation))
}

/// Attacker profit in the cap-aware market after `n` wash trades.
pub fn profit_cap<T: Real>(n: u64, scenario: &WashScenario<T>) -> Result<T> {
    let sell = max_sell(n, scenario)?;
    Ok(sell - scenario.v_base - T::from_count(n) * scenario.trade_cost)
}

/// Baseline profit without caps: inflation gain minus trade costs.
pub fn profit_nocap<T: Real>(n: u64, scenario: &WashScenario<T>) -> T {
    scenario.v_base * scenario.inflation - T::from_count(n) * scenario.trade_cost
}

/// Smallest `n` in `1..=L` at which cap-aware profit is non-positive, or
/// `None` if profit stays positive through the whole budget.
pub fn break_even<T: Real>(scenario: &WashScenario<T>) -> Option<u64> {
    (1..=scenario.limit).find(|&n| {
        profit_cap(n, scenario).expect("n <= limit") <= T::zero()
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint<T = f64> {
    pub n: u64,
    pub fair_value: T,
    pub max_sell: T,
    pub profit_cap: T,
    pub profit_nocap: T,
}

/// Full wash-trade trajectory for `n = 0..=L`, ready for plotting.
pub fn trajectory<T: Real>(scenario: &WashScenario<T>) -> Vec<TrajectoryPoint<T>> {
    (0..=scenario.limit)
        .map(|n| TrajectoryPoint {
            n,
            fair_value: fair_value_after(n, scenario).expect("n <= limit"),
            max_sell: max_sell(n, scenario).expect("n <= limit"),
            profit_cap: profit_cap(n, scenario).expect("n <= limit"),
            profit_nocap: profit_nocap(n, scenario),
        })
        .collect()
}
