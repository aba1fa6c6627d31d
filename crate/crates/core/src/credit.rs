//! Recursive collateralization under transfer caps.
//!
//! Each re-hypothecation cycle needs two native transfers (deposit and
//! redeem), so a cap `L` bounds the depth at `floor(L / 2)`. Borrowing at a
//! fixed loan-to-value ratio then forms a truncated geometric leverage chain,
//! and price shocks propagate losses down that chain.

use crate::ledger::{Address, Ledger, LedgerError, PostCapPolicy, TokenId};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeverageScenario<T = f64> {
    /// Transfer limit; 0 = unbounded.
    pub limit: u64,
    /// Loan-to-value ratio in (0, 1).
    pub ltv: T,
    /// Initial collateral value.
    pub v0: T,
}

impl<T: Real> LeverageScenario<T> {
    /// Baseline parameters: LTV 0.7 on 10 units of collateral.
    pub fn with_limit(limit: u64) -> Self {
        LeverageScenario {
            limit,
            ltv: T::from_f64(0.7).unwrap(),
            v0: T::from_count(10),
        }
    }
}

/// Re-hypothecation depth permitted by a transfer limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxDepth {
    Unbounded,
    Finite(u64),
}

/// `floor(L / 2)` deposit/redeem cycles; unbounded tokens have no structural
/// bound.
pub fn max_depth(limit: u64) -> MaxDepth {
    if limit == 0 {
        MaxDepth::Unbounded
    } else {
        MaxDepth::Finite(limit / 2)
    }
}

/// Maximum leverage multiplier: the truncated geometric sum
/// `(1 - LTV^(d_max + 1)) / (1 - LTV)`, or `1 / (1 - LTV)` when unbounded.
pub fn max_leverage<T: Real>(scenario: &LeverageScenario<T>) -> T {
    let one = T::one();
    match max_depth(scenario.limit) {
        MaxDepth::Unbounded => one / (one - scenario.ltv),
        MaxDepth::Finite(depth) => {
            let exponent = T::from_count(depth + 1);
            (one - scenario.ltv.powf(exponent)) / (one - scenario.ltv)
        }
    }
}

/// Leverage lost to the cap, as a percentage of the unbounded maximum.
pub fn reduction_vs_unbounded<T: Real>(scenario: &LeverageScenario<T>) -> T {
    let unbounded = T::one() / (T::one() - scenario.ltv);
    (T::one() - max_leverage(scenario) / unbounded) * T::hundred()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position<T = f64> {
    pub collateral_value: T,
    pub debt: T,
}

/// Geometric chain of collateral positions; position `i + 1` is bought with
/// the loan against position `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeverageChain<T = f64> {
    pub positions: Vec<Position<T>>,
}

impl<T: Real> LeverageChain<T> {
    /// Number of re-hypothecation cycles (positions beyond the original).
    pub fn depth(&self) -> usize {
        self.positions.len().saturating_sub(1)
    }

    pub fn total_exposure(&self) -> T {
        self.positions
            .iter()
            .fold(T::zero(), |sum, p| sum + p.collateral_value)
    }
}

/// Positions below this value are not opened; keeps unbounded chains finite.
pub const CHAIN_VALUE_FLOOR: f64 = 0.01;

/// Expands the leverage chain: depth-capped by the transfer limit and
/// truncated once the next position would fall below the value floor.
pub fn build_chain<T: Real>(scenario: &LeverageScenario<T>) -> LeverageChain<T> {
    let floor = T::from_f64(CHAIN_VALUE_FLOOR).unwrap();
    let mut positions = Vec::new();
    let mut collateral = scenario.v0;
    loop {
        if let MaxDepth::Finite(depth) = max_depth(scenario.limit) {
            if positions.len() as u64 > depth {
                break;
            }
        }
        if collateral < floor {
            break;
        }
        positions.push(Position {
            collateral_value: collateral,
            debt: scenario.ltv * collateral,
        });
        collateral *= scenario.ltv;
    }
    LeverageChain { positions }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeOutcome<T = f64> {
    /// Number of liquidated positions.
    pub cascade_depth: usize,
    /// Total shortfall `max(debt - marked value, 0)` across liquidations.
    pub aggregate_loss: T,
}

/// Marks every position down by `shock`; a position whose marked value does
/// not exceed its debt liquidates (ties liquidate: the boundary arises
/// exactly at `shock = 1 - LTV`), and each liquidation marks the next
/// position down by a further `penalty`.
pub fn cascade<T: Real>(chain: &LeverageChain<T>, shock: T, penalty: T) -> CascadeOutcome<T> {
    let one = T::one();
    let mut depth = 0usize;
    let mut loss = T::zero();
    let mut contagion = one;
    for position in &chain.positions {
        let marked = position.collateral_value * (one - shock) * contagion;
        contagion = one;
        if marked <= position.debt {
            depth += 1;
            let shortfall = position.debt - marked;
            if shortfall > T::zero() {
                loss += shortfall;
            }
            contagion = one - penalty;
        }
    }
    CascadeOutcome {
        cascade_depth: depth,
        aggregate_loss: loss,
    }
}

/// Outcome of driving deposit/redeem cycles against a real ledger token.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRun {
    pub cycles_completed: u64,
    pub transfers_used: u64,
    /// Error that ended the run, if the budget ran out before `max_cycles`.
    pub stopped_by: Option<LedgerError>,
}

/// Co-simulation against the ledger: mints a token with the scenario's limit
/// on a private ledger, then alternates deposit and redeem transfers until a
/// transfer fails or `max_cycles` is reached. Two transfers per cycle.
pub fn ledger_cycle_capacity(limit: u64, policy: PostCapPolicy, max_cycles: u64) -> CycleRun {
    let mut ledger = Ledger::new();
    let owner = Address(1);
    let venue = Address(2);
    let token = TokenId(1);
    ledger
        .mint(owner, token, limit, policy)
        .expect("fresh ledger mint");

    let mut transfers = 0u64;
    let mut stopped_by = None;
    'cycles: for _ in 0..max_cycles {
        for (from, to) in [(owner, venue), (venue, owner)] {
            match ledger.transfer(from, to, token) {
                Ok(_) => transfers += 1,
                Err(err) => {
                    stopped_by = Some(err);
                    break 'cycles;
                }
            }
        }
    }
    CycleRun {
        cycles_completed: transfers / 2,
        transfers_used: transfers,
        stopped_by,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn depth_examples() {
        assert_eq!(max_depth(10), MaxDepth::Finite(5));
        assert_eq!(max_depth(4), MaxDepth::Finite(2));
        assert_eq!(max_depth(1), MaxDepth::Finite(0));
        assert_eq!(max_depth(0), MaxDepth::Unbounded);
    }

    #[test]
    fn leverage_examples() {
        let s10 = LeverageScenario::<f64>::with_limit(10);
        assert!(close(max_leverage(&s10), 2.94, 0.005));
        assert!(close(max_leverage(&s10) * s10.v0, 29.41, 0.005));
        let s50 = LeverageScenario::<f64>::with_limit(50);
        assert!(close(max_leverage(&s50), 3.33, 0.005));
        // No borrowing power at all.
        let timid = LeverageScenario { ltv: 1e-9, ..s10 };
        assert!(close(max_leverage(&timid), 1.0, 1e-6));
    }

    #[test]
    fn reduction_examples() {
        // Exact arithmetic gives 11.76 / 24.01 / 34.30; the printed figures
        // round to one decimal, so compare at the 0.1 pp tolerance.
        assert!(close(
            reduction_vs_unbounded(&LeverageScenario::<f64>::with_limit(10)),
            11.7,
            0.1
        ));
        assert!(close(
            reduction_vs_unbounded(&LeverageScenario::<f64>::with_limit(6)),
            24.0,
            0.1
        ));
        assert!(close(
            reduction_vs_unbounded(&LeverageScenario::<f64>::with_limit(4)),
            34.2,
            0.1001
        ));
    }

    #[test]
    fn closed_form_matches_series_sum() {
        for limit in 0..=100u64 {
            for step in 1..19u64 {
                let ltv = step as f64 * 0.05;
                let s = LeverageScenario { limit, ltv, v0: 10.0 };
                let closed = max_leverage(&s);
                let brute: f64 = match max_depth(limit) {
                    MaxDepth::Finite(d) => (0..=d).map(|i| ltv.powi(i as i32)).sum(),
                    MaxDepth::Unbounded => 1.0 / (1.0 - ltv),
                };
                assert!(
                    (closed - brute).abs() <= 1e-12,
                    "L={limit} ltv={ltv}: {closed} vs {brute}"
                );
            }
        }
    }

    #[test]
    fn leverage_is_monotone_in_limit() {
        let mut previous_lev = 0.0;
        let mut previous_red = f64::INFINITY;
        for limit in 1..=60u64 {
            let s = LeverageScenario::<f64>::with_limit(limit);
            let lev = max_leverage(&s);
            let red = reduction_vs_unbounded(&s);
            assert!(lev >= previous_lev - 1e-12);
            assert!(red <= previous_red + 1e-12);
            previous_lev = lev;
            previous_red = red;
        }
    }

    #[test]
    fn chain_expansion_matches_geometric_series() {
        let chain = build_chain(&LeverageScenario::<f64>::with_limit(10));
        let expected = [10.0, 7.0, 4.9, 3.43, 2.401, 1.6807];
        assert_eq!(chain.positions.len(), expected.len());
        for (position, want) in chain.positions.iter().zip(expected) {
            assert!(close(position.collateral_value, want, 1e-9));
            assert!(close(position.debt, 0.7 * want, 1e-9));
        }
        assert!(close(chain.total_exposure(), 29.41, 0.005));
        assert!(close(
            chain.total_exposure(),
            max_leverage(&LeverageScenario::<f64>::with_limit(10)) * 10.0,
            1e-9
        ));
        assert_eq!(chain.depth(), 5);
    }

    #[test]
    fn unbounded_chain_is_cut_by_the_value_floor() {
        let chain = build_chain(&LeverageScenario::<f64>::with_limit(0));
        assert!(!chain.positions.is_empty());
        assert!(chain.positions.last().unwrap().collateral_value >= CHAIN_VALUE_FLOOR);
        let next = chain.positions.last().unwrap().collateral_value * 0.7;
        assert!(next < CHAIN_VALUE_FLOOR);
    }

    #[test]
    fn no_shock_no_losses() {
        let chain = build_chain(&LeverageScenario::<f64>::with_limit(10));
        let outcome = cascade(&chain, 0.0, 0.05);
        assert_eq!(outcome.cascade_depth, 0);
        assert!(close(outcome.aggregate_loss, 0.0, 1e-12));
    }

    #[test]
    fn boundary_shock_liquidates_the_whole_chain() {
        // At shock = 1 - LTV every marked value equals its debt; the tie rule
        // liquidates, and contagion pushes the rest strictly under water.
        let chain = build_chain(&LeverageScenario::<f64>::with_limit(10));
        let outcome = cascade(&chain, 0.3, 0.05);
        assert_eq!(outcome.cascade_depth, chain.positions.len());
        assert!(outcome.aggregate_loss > 0.0);
    }

    #[test]
    fn capped_chain_loses_less_than_long_chain() {
        let short = build_chain(&LeverageScenario::<f64>::with_limit(10));
        let long = build_chain(&LeverageScenario::<f64>::with_limit(50));
        let a = cascade(&short, 0.3, 0.05);
        let b = cascade(&long, 0.3, 0.05);
        assert!(a.cascade_depth < b.cascade_depth);
        assert!(a.aggregate_loss < b.aggregate_loss);
    }

    #[test]
    fn losses_grow_with_the_shock() {
        let chain = build_chain(&LeverageScenario::<f64>::with_limit(10));
        let mut previous = -1.0;
        for shock in [0.1, 0.2, 0.3, 0.4, 0.5] {
            let outcome = cascade(&chain, shock, 0.05);
            assert!(outcome.aggregate_loss >= previous);
            previous = outcome.aggregate_loss;
        }
    }

    #[test]
    fn ledger_cosim_allows_exactly_half_the_budget_in_cycles() {
        let run = ledger_cycle_capacity(10, PostCapPolicy::ProvenanceFreeze, 100);
        assert_eq!(run.cycles_completed, 5);
        assert_eq!(run.transfers_used, 10);
        // The budget, not anything else, ends the run.
        assert_eq!(run.stopped_by, Some(LedgerError::TransferLimitReached));

        // Odd budgets strand the token at the venue mid-cycle.
        let run = ledger_cycle_capacity(11, PostCapPolicy::ProvenanceFreeze, 100);
        assert_eq!(run.cycles_completed, 5);
        assert_eq!(run.transfers_used, 11);

        // Unbounded tokens are stopped only by the cycle allowance.
        let run = ledger_cycle_capacity(0, PostCapPolicy::ProvenanceFreeze, 25);
        assert_eq!(run.cycles_completed, 25);
        assert_eq!(run.stopped_by, None);
    }

    #[test]
    fn cosim_agrees_with_max_depth_for_even_budgets() {
        for limit in (2..=20u64).step_by(2) {
            let run = ledger_cycle_capacity(limit, PostCapPolicy::SoulboundConvert, 1_000);
            assert_eq!(MaxDepth::Finite(run.cycles_completed), max_depth(limit));
        }
    }
}
