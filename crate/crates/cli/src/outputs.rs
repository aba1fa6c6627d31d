//! Table and figure dataset builders. Each builder renders its CSVs in
//! memory so runs can write them and verification can regenerate them for
//! byte comparison.

use std::fmt::Write as _;

use anyhow::{anyhow, Result};
use erc7634_core::econ::{self, PremiumModel};
use erc7634_core::credit;
use erc7634_core::market;
use erc7634_core::popgen::{self, Collection, CollectionProfile};

use crate::config::ScenarioConfig;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub content: String,
}

impl OutputFile {
    fn new(name: &str, content: String) -> Self {
        OutputFile {
            name: name.to_string(),
            content,
        }
    }
}

/// Fixed-precision cell formatting; negative zero renders as zero.
pub fn cell(value: f64, decimals: usize) -> String {
    let text = format!("{value:.decimals$}");
    if text.starts_with('-') && text[1..].chars().all(|c| c == '0' || c == '.') {
        text[1..].to_string()
    } else {
        text
    }
}

/// Valuation and marginal-cost tables.
pub fn econ_tables(config: &ScenarioConfig) -> Result<Vec<OutputFile>> {
    let models = PremiumModel::<f64>::reference_set();

    let mut table4 = String::from("remaining,ratio,linear,concave,convex,threshold\n");
    let rows = econ::table4(config.econ.v_base, config.econ.limit, &models)
        .map_err(|e| anyhow!("valuation table: {e}"))?;
    for row in rows {
        write!(table4, "{},{}", row.remaining, cell(row.ratio, 2)).unwrap();
        for value in row.values {
            write!(table4, ",{}", cell(value, 2)).unwrap();
        }
        table4.push('\n');
    }

    let limits = &config.econ.marginal_limits;
    let mut table5 = String::from("stage");
    for limit in limits {
        write!(table5, ",L{limit}").unwrap();
    }
    table5.push('\n');
    let rows = econ::table5(config.econ.v_base, limits).map_err(|e| anyhow!("marginal table: {e}"))?;
    for row in rows {
        table5.push_str(row.stage.label());
        for pct in row.pct_of_base {
            write!(table5, ",{}", cell(pct, 1)).unwrap();
        }
        table5.push('\n');
    }

    Ok(vec![
        OutputFile::new("table4.csv", table4),
        OutputFile::new("table5.csv", table5),
    ])
}

/// Wash-trade profit table plus the break-even and trajectory figures.
pub fn market_tables(config: &ScenarioConfig) -> Vec<OutputFile> {
    let mcfg = &config.market;

    let mut table6 = String::from("limit,n,profit_nocap,fair_value,max_sell,profit_cap,deterred\n");
    for &(limit, n) in &mcfg.table_rows {
        let scenario = mcfg.scenario(limit);
        let nocap = market::profit_nocap(n, &scenario);
        let fair = market::fair_value_after(n, &scenario).expect("row within budget");
        let sell = market::max_sell(n, &scenario).expect("row within budget");
        let profit = market::profit_cap(n, &scenario).expect("row within budget");
        let deterred = if profit <= 0.0 { "yes" } else { "no" };
        writeln!(
            table6,
            "{limit},{n},{},{},{},{},{deterred}",
            cell(nocap, 2),
            cell(fair, 2),
            cell(sell, 2),
            cell(profit, 2)
        )
        .unwrap();
    }

    let mut fig6 = String::from("limit,break_even_n\n");
    for &limit in &mcfg.break_even_limits {
        let scenario = mcfg.scenario(limit);
        match market::break_even(&scenario) {
            Some(n) => writeln!(fig6, "{limit},{n}").unwrap(),
            None => writeln!(fig6, "{limit},never").unwrap(),
        }
    }

    let mut fig7 = String::from("limit,n,fair_value,max_sell,profit_cap,profit_nocap\n");
    for &limit in &mcfg.trajectory_limits {
        let scenario = mcfg.scenario(limit);
        for point in market::trajectory(&scenario) {
            writeln!(
                fig7,
                "{limit},{},{},{},{},{}",
                point.n,
                cell(point.fair_value, 4),
                cell(point.max_sell, 4),
                cell(point.profit_cap, 4),
                cell(point.profit_nocap, 4)
            )
            .unwrap();
        }
    }

    vec![
        OutputFile::new("table6.csv", table6),
        OutputFile::new("fig6.csv", fig6),
        OutputFile::new("fig7.csv", fig7),
    ]
}

/// Leverage bound table.
pub fn leverage_table(config: &ScenarioConfig) -> Vec<OutputFile> {
    let mut table7 = String::from("limit,max_depth,max_exposure,effective_leverage,reduction_pct\n");
    for &limit in &config.credit.limits {
        let scenario = config.credit.scenario(limit);
        let depth = match credit::max_depth(limit) {
            credit::MaxDepth::Finite(d) => d.to_string(),
            credit::MaxDepth::Unbounded => "unbounded".to_string(),
        };
        let leverage = credit::max_leverage(&scenario);
        writeln!(
            table7,
            "{limit},{depth},{},{},{}",
            cell(leverage * scenario.v0, 2),
            cell(leverage, 2),
            cell(credit::reduction_vs_unbounded(&scenario), 1)
        )
        .unwrap();
    }
    vec![OutputFile::new("table7.csv", table7)]
}

/// Cascade losses under price shocks, per chain limit.
pub fn cascade_curves(config: &ScenarioConfig) -> Vec<OutputFile> {
    let ccfg = &config.cascade;
    let mut fig9 = String::from("shock,limit,cascade_depth,aggregate_loss\n");
    for &shock in &ccfg.shocks {
        for &limit in &ccfg.chain_limits {
            let chain = credit::build_chain(&erc7634_core::LeverageScenario {
                limit,
                ltv: ccfg.ltv,
                v0: ccfg.v0,
            });
            let outcome = credit::cascade(&chain, shock, ccfg.liquidation_penalty);
            writeln!(
                fig9,
                "{},{limit},{},{}",
                cell(shock, 2),
                outcome.cascade_depth,
                cell(outcome.aggregate_loss, 4)
            )
            .unwrap();
        }
    }
    vec![OutputFile::new("fig9.csv", fig9)]
}

/// Fitted parameters reported alongside the population tables.
#[derive(Debug, Clone, PartialEq)]
pub struct PopgenFit {
    pub collection: Collection,
    pub alpha: f64,
    pub x_max: u64,
    pub residuals: [f64; 3],
}

/// Population statistics, cap-exceedance table, and per-collection
/// histograms. Returns the fitted parameters for the run manifest.
pub fn popgen_tables(config: &ScenarioConfig) -> Result<(Vec<OutputFile>, Vec<PopgenFit>)> {
    let pcfg = &config.popgen;
    let mut fits = Vec::new();
    let mut table2 = String::from("collection,mean,median,p90,p95,p99\n");
    let mut table3 = String::from("collection");
    for cap in &pcfg.caps {
        write!(table3, ",cap_{cap}").unwrap();
    }
    table3.push('\n');
    let mut outputs = Vec::new();

    for collection in Collection::ALL {
        let (profile, fit) =
            CollectionProfile::calibrated(collection, pcfg.tokens_per_collection)
                .map_err(|e| anyhow!("calibrating {}: {e}", collection.label()))?;
        let counts = popgen::sample(&profile, config.seed).map_err(|e| anyhow!("sampling: {e}"))?;
        let stats = popgen::stats(&counts).map_err(|e| anyhow!("stats: {e}"))?;
        writeln!(
            table2,
            "{},{},{},{},{},{}",
            collection.label(),
            cell(stats.mean, 2),
            stats.median,
            stats.p90,
            stats.p95,
            stats.p99
        )
        .unwrap();

        let exceed = popgen::exceed_fraction(&counts, &pcfg.caps)
            .map_err(|e| anyhow!("exceedance: {e}"))?;
        table3.push_str(collection.label());
        for pct in exceed {
            write!(table3, ",{}", cell(pct, 1)).unwrap();
        }
        table3.push('\n');

        let mut histogram: std::collections::BTreeMap<u64, u64> = std::collections::BTreeMap::new();
        for count in &counts {
            *histogram.entry(*count).or_default() += 1;
        }
        let mut hist_csv = String::from("count,frequency\n");
        for (count, frequency) in histogram {
            writeln!(hist_csv, "{count},{frequency}").unwrap();
        }
        outputs.push(OutputFile::new(
            &format!("hist_{}.csv", collection.label().to_ascii_lowercase()),
            hist_csv,
        ));

        fits.push(PopgenFit {
            collection,
            alpha: fit.alpha,
            x_max: fit.x_max,
            residuals: fit.residuals,
        });
    }

    let mut all = vec![
        OutputFile::new("table2.csv", table2),
        OutputFile::new("table3.csv", table3),
    ];
    all.append(&mut outputs);
    Ok((all, fits))
}

/// Gas table and the wrapper break-even curve.
pub fn costs_tables(config: &ScenarioConfig) -> Vec<OutputFile> {
    let gas = erc7634_core::costs::GasTable::default();
    let mut table8 = String::from("operation,erc721_gas,erc7634_gas,overhead_pct\n");
    for (op, row) in gas.rows() {
        let base = row
            .erc721
            .map_or("N/A".to_string(), |g| g.to_string());
        let overhead = gas
            .overhead(op)
            .map_or("N/A".to_string(), |pct| cell(pct, 1));
        writeln!(table8, "{},{base},{},{overhead}", op.label(), row.erc7634).unwrap();
    }

    let params = config.costs.bypass_params();
    let mut fig10a = String::from("n,direct_gas,wrapper_gas\n");
    for n in 0..=config.costs.curve_max_n {
        writeln!(
            fig10a,
            "{n},{},{}",
            params.direct_cost(n).gas,
            params.bypass_cost(n).gas
        )
        .unwrap();
    }

    vec![
        OutputFile::new("table8.csv", table8),
        OutputFile::new("fig10a.csv", fig10a),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_zero_never_leaks_into_cells() {
        assert_eq!(cell(-0.0001, 2), "0.00");
        assert_eq!(cell(-0.004, 2), "0.00");
        assert_eq!(cell(-0.43, 2), "-0.43");
        assert_eq!(cell(0.0, 1), "0.0");
    }

    #[test]
    fn builders_are_deterministic() {
        let config = ScenarioConfig::default();
        assert_eq!(econ_tables(&config).unwrap(), econ_tables(&config).unwrap());
        assert_eq!(market_tables(&config), market_tables(&config));
        assert_eq!(costs_tables(&config), costs_tables(&config));
        let (a, fits_a) = popgen_tables(&config).unwrap();
        let (b, fits_b) = popgen_tables(&config).unwrap();
        assert_eq!(a, b);
        assert_eq!(fits_a, fits_b);
    }

    #[test]
    fn table_headers_and_row_counts() {
        let config = ScenarioConfig::default();
        let files = econ_tables(&config).unwrap();
        assert_eq!(files[0].name, "table4.csv");
        assert_eq!(files[0].content.lines().count(), 8); // header + 7 rows
        assert_eq!(files[1].content.lines().count(), 4); // header + 3 stages

        let market = market_tables(&config);
        assert_eq!(market[0].content.lines().count(), 10); // header + 9 rows

        let costs = costs_tables(&config);
        assert!(costs[0].content.contains("transfer_first,48947,54283,10.9"));
        assert!(costs[0].content.contains("mint_with_limit,N/A,74812,N/A"));
    }
}
