//! Mobility-premium valuation.
//!
//! A capped token's value is its base value scaled by a premium function of
//! the remaining-transfer fraction `x = (L - k) / L`; unbounded tokens
//! (`L = 0`) keep their base value. The marginal mobility cost is the value
//! destroyed by consuming one more transfer.

use thiserror::Error;

use crate::scalar::Real;

/// Premium function over the remaining-transfer fraction. All variants map
/// `[0, 1]` into `[0, 1]` with `f(1) = 1` and are monotone non-decreasing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PremiumModel<T = f64> {
    /// `f(x) = x`.
    Linear,
    /// `f(x) = x^gamma`; concave for `gamma < 1`, convex for `gamma > 1`.
    Power { gamma: T },
    /// `f(x) = (x - tau) / (1 - tau)` above the threshold, `residual` below.
    Threshold { tau: T, residual: T },
}

impl<T: Real> PremiumModel<T> {
    pub fn linear() -> Self {
        PremiumModel::Linear
    }

    pub fn power(gamma: f64) -> Self {
        PremiumModel::Power {
            gamma: T::from_f64(gamma).expect("gamma representable"),
        }
    }

    pub fn threshold(tau: f64, residual: f64) -> Self {
        PremiumModel::Threshold {
            tau: T::from_f64(tau).expect("tau representable"),
            residual: T::from_f64(residual).expect("residual representable"),
        }
    }

    /// The four reference shapes: linear, concave (γ = 0.5), convex (γ = 2),
    /// and threshold (τ = 0.2 with residual 0.05).
    pub fn reference_set() -> [PremiumModel<T>; 4] {
        [
            Self::linear(),
            Self::power(0.5),
            Self::power(2.0),
            Self::threshold(0.2, 0.05),
        ]
    }

    pub fn label(&self) -> &'static str {
        match self {
            PremiumModel::Linear => "linear",
            PremiumModel::Power { .. } => "power",
            PremiumModel::Threshold { .. } => "threshold",
        }
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum EconError {
    #[error("premium input outside [0, 1]")]
    DomainError,
    #[error("no remaining transfer budget")]
    NoRemainingBudget,
    #[error("token is unbounded")]
    UnboundedToken,
}

type Result<T> = std::result::Result<T, EconError>;

/// Valuation inputs: base value plus the token's `(k, L)` transfer state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValuationInput<T = f64> {
    pub v_base: T,
    pub count: u64,
    /// 0 = unbounded.
    pub limit: u64,
}

/// Evaluates the premium function at `x` in `[0, 1]`.
pub fn premium<T: Real>(model: PremiumModel<T>, x: T) -> Result<T> {
    if x < T::zero() || x > T::one() {
        return Err(EconError::DomainError);
    }
    Ok(match model {
        PremiumModel::Linear => x,
        PremiumModel::Power { gamma } => x.powf(gamma),
        PremiumModel::Threshold { tau, residual } => {
            if x > tau {
                (x - tau) / (T::one() - tau)
            } else {
                residual
            }
        }
    })
}

/// Transfer-adjusted value: `v_base` when unbounded, otherwise
/// `v_base * f((L - k) / L)`.
pub fn value<T: Real>(model: PremiumModel<T>, input: ValuationInput<T>) -> Result<T> {
    if input.limit == 0 {
        return Ok(input.v_base);
    }
    let remaining = input
        .limit
        .checked_sub(input.count)
        .ok_or(EconError::DomainError)?;
    let x = T::from_count(remaining) / T::from_count(input.limit);
    Ok(input.v_base * premium(model, x)?)
}

/// Value destroyed by consuming the transfer at state `(k, L)`: the drop from
/// remaining `r = L - k` to `r - 1`.
pub fn marginal_cost<T: Real>(model: PremiumModel<T>, count: u64, limit: u64, v_base: T) -> Result<T> {
    if limit == 0 {
        return Err(EconError::UnboundedToken);
    }
    if count >= limit {
        return Err(EconError::NoRemainingBudget);
    }
    let before = value(
        model,
        ValuationInput {
            v_base,
            count,
            limit,
        },
    )?;
    let after = value(
        model,
        ValuationInput {
            v_base,
            count: count + 1,
            limit,
        },
    )?;
    Ok(before - after)
}

/// Remaining-transfer fractions shown in the valuation table, from full
/// budget down to exhausted.
pub const VALUATION_RATIOS: [f64; 7] = [1.0, 0.9, 0.75, 0.5, 0.25, 0.1, 0.0];

#[derive(Debug, Clone, PartialEq)]
pub struct ValuationRow<T = f64> {
    pub remaining: u64,
    pub ratio: T,
    pub values: Vec<T>,
}

/// Valuation matrix: one row per displayed remaining-budget level, one column
/// per model.
pub fn table4<T: Real>(
    v_base: T,
    limit: u64,
    models: &[PremiumModel<T>],
) -> Result<Vec<ValuationRow<T>>> {
    if limit == 0 {
        return Err(EconError::UnboundedToken);
    }
    VALUATION_RATIOS
        .iter()
        .map(|&ratio| {
            let remaining = (ratio * limit as f64).round() as u64;
            let count = limit - remaining;
            let values = models
                .iter()
                .map(|&model| {
                    value(
                        model,
                        ValuationInput {
                            v_base,
                            count,
                            limit,
                        },
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ValuationRow {
                remaining,
                ratio: T::from_count(remaining) / T::from_count(limit),
                values,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferStage {
    /// `k = 0`: full budget.
    First,
    /// The drop from three remaining transfers to two. The matching row of
    /// the printed table is labeled "mid-point" but its numbers correspond to
    /// this transition for every limit, so that is what we reproduce.
    MidPoint,
    /// `k = L - 1`: last remaining transfer.
    Last,
}

impl TransferStage {
    pub const ALL: [TransferStage; 3] =
        [TransferStage::First, TransferStage::MidPoint, TransferStage::Last];

    pub fn label(&self) -> &'static str {
        match self {
            TransferStage::First => "first",
            TransferStage::MidPoint => "mid_point",
            TransferStage::Last => "last",
        }
    }

    fn count_for(&self, limit: u64) -> Option<u64> {
        match self {
            TransferStage::First => Some(0),
            TransferStage::MidPoint => limit.checked_sub(3),
            TransferStage::Last => limit.checked_sub(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginalCostRow<T = f64> {
    pub stage: TransferStage,
    /// Marginal cost as a percentage of base value, one entry per limit.
    pub pct_of_base: Vec<T>,
}

/// Concave-model (γ = 0.5) marginal cost matrix as percentages of base value,
/// at the first-transfer, three-to-two, and last-transfer stages.
pub fn table5<T: Real>(v_base: T, limits: &[u64]) -> Result<Vec<MarginalCostRow<T>>> {
    let concave = PremiumModel::power(0.5);
    TransferStage::ALL
        .iter()
        .map(|&stage| {
            let pct_of_base = limits
                .iter()
                .map(|&limit| {
                    let count = stage.count_for(limit).ok_or(EconError::DomainError)?;
                    let cost = marginal_cost(concave, count, limit, v_base)?;
                    Ok(cost / v_base * T::hundred())
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(MarginalCostRow { stage, pct_of_base })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn premium_is_identity_at_full_budget() {
        for model in PremiumModel::<f64>::reference_set() {
            assert!(close(premium(model, 1.0).unwrap(), 1.0, 1e-12));
        }
    }

    #[test]
    #[allow(clippy::approx_constant)] // 0.7071 is the published cell, not a stand-in constant
    fn concave_midpoint_premium() {
        let p = premium(PremiumModel::<f64>::power(0.5), 0.5).unwrap();
        assert!(close(p, 0.7071, 5e-5));
    }

    #[test]
    fn threshold_below_tau_returns_residual() {
        let p = premium(PremiumModel::<f64>::threshold(0.2, 0.05), 0.10).unwrap();
        assert!(close(p, 0.05, 1e-12));
    }

    #[test]
    fn premium_rejects_out_of_domain() {
        assert_eq!(
            premium(PremiumModel::<f64>::linear(), 1.5),
            Err(EconError::DomainError)
        );
        assert_eq!(
            premium(PremiumModel::<f64>::linear(), -0.1),
            Err(EconError::DomainError)
        );
    }

    #[test]
    fn value_examples() {
        let concave = PremiumModel::<f64>::power(0.5);
        let convex = PremiumModel::<f64>::power(2.0);
        // Remaining 10 of 20.
        let v = value(concave, ValuationInput { v_base: 10.0, count: 10, limit: 20 }).unwrap();
        assert!(close(v, 7.07, 0.005));
        // Remaining 15 of 20.
        let v = value(convex, ValuationInput { v_base: 10.0, count: 5, limit: 20 }).unwrap();
        assert!(close(v, 5.63, 0.005));
        // Unbounded keeps base value regardless of count.
        let v = value(concave, ValuationInput { v_base: 10.0, count: 99, limit: 0 }).unwrap();
        assert!(close(v, 10.0, 1e-12));
    }

    #[test]
    fn value_rejects_count_above_limit() {
        assert_eq!(
            value(PremiumModel::<f64>::linear(), ValuationInput { v_base: 1.0, count: 6, limit: 5 }),
            Err(EconError::DomainError)
        );
    }

    #[test]
    fn marginal_cost_examples() {
        let concave = PremiumModel::<f64>::power(0.5);
        let first = marginal_cost(concave, 0, 5, 10.0).unwrap();
        assert!(close(first / 10.0 * 100.0, 10.6, 0.05));
        let last = marginal_cost(concave, 49, 50, 10.0).unwrap();
        assert!(close(last / 10.0 * 100.0, 14.1, 0.05));
    }

    #[test]
    fn linear_marginal_cost_is_constant() {
        let linear = PremiumModel::<f64>::linear();
        for limit in [1u64, 4, 10, 33] {
            for count in 0..limit {
                let mc = marginal_cost(linear, count, limit, 10.0).unwrap();
                assert!(close(mc, 10.0 / limit as f64, 1e-12));
            }
        }
    }

    #[test]
    fn marginal_cost_errors() {
        let m = PremiumModel::<f64>::linear();
        assert_eq!(marginal_cost(m, 5, 5, 1.0), Err(EconError::NoRemainingBudget));
        assert_eq!(marginal_cost(m, 0, 0, 1.0), Err(EconError::UnboundedToken));
    }

    #[test]
    fn value_is_monotone_in_count() {
        for model in PremiumModel::<f64>::reference_set() {
            let mut previous = f64::INFINITY;
            for count in 0..=20 {
                let v = value(model, ValuationInput { v_base: 10.0, count, limit: 20 }).unwrap();
                assert!(v <= previous + 1e-12);
                previous = v;
            }
        }
    }

    #[test]
    fn concave_marginal_cost_escalates() {
        let concave = PremiumModel::<f64>::power(0.5);
        for limit in [5u64, 10, 20, 50] {
            let mut previous = 0.0;
            for count in 0..limit {
                let mc = marginal_cost(concave, count, limit, 10.0).unwrap();
                assert!(mc > previous, "L={limit} k={count}");
                previous = mc;
            }
        }
    }

    #[test]
    fn marginal_costs_telescope() {
        for model in PremiumModel::<f64>::reference_set() {
            for limit in [1u64, 3, 7, 20] {
                let total: f64 = (0..limit)
                    .map(|count| marginal_cost(model, count, limit, 10.0).unwrap())
                    .sum();
                let full = value(model, ValuationInput { v_base: 10.0, count: 0, limit }).unwrap();
                let spent = value(model, ValuationInput { v_base: 10.0, count: limit, limit }).unwrap();
                assert!(close(total, full - spent, 1e-9));
            }
        }
    }

    #[test]
    fn boundary_values() {
        let v_base = 10.0;
        for model in PremiumModel::<f64>::reference_set() {
            let full = value(model, ValuationInput { v_base, count: 0, limit: 20 }).unwrap();
            assert!(close(full, v_base, 1e-12));
        }
        let exhausted_power =
            value(PremiumModel::<f64>::power(0.5), ValuationInput { v_base, count: 20, limit: 20 })
                .unwrap();
        assert!(close(exhausted_power, 0.0, 1e-12));
        let exhausted_threshold = value(
            PremiumModel::<f64>::threshold(0.2, 0.05),
            ValuationInput { v_base, count: 20, limit: 20 },
        )
        .unwrap();
        assert!(close(exhausted_threshold, 0.05 * v_base, 1e-12));
    }

    #[test]
    fn table5_rejects_tiny_limits() {
        assert!(table5(10.0f64, &[2]).is_err());
        assert!(table5(10.0f64, &[3]).is_ok());
    }

    #[test]
    fn models_work_in_single_precision() {
        let concave = PremiumModel::<f32>::power(0.5);
        let v = value(concave, ValuationInput { v_base: 10.0f32, count: 10, limit: 20 }).unwrap();
        assert!((v - 7.07).abs() < 0.01);
    }
}
