//! Verification of a run directory against the embedded expected tables.
//!
//! The `paper` profile checks every table cell at its published tolerance.
//! The `strict` profile additionally replays the manifest's config and
//! requires the regenerated outputs to be byte-identical to the files on
//! disk (and to their recorded checksums).

use std::collections::HashMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

use crate::expected as exp;
use crate::manifest;
use crate::run::regenerate_all;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ToleranceProfile {
    /// Published-table tolerances only.
    Paper,
    /// Published tolerances plus byte-exact regeneration from the manifest.
    Strict,
}

/// A parsed CSV: header fields and data rows.
struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_csv(dir: &Path, name: &str) -> Result<Csv> {
    let path = dir.join(name);
    let text =
        std::fs::read_to_string(&path).with_context(|| format!("missing file {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| anyhow!("{name}: empty file"))?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    Ok(Csv { header, rows })
}

impl Csv {
    fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| anyhow!("column {name:?} not found in {:?}", self.header))
    }

    fn number(&self, row: &[String], column: usize) -> Result<f64> {
        row[column]
            .parse::<f64>()
            .with_context(|| format!("cell {:?} is not numeric", row[column]))
    }
}

fn check(name: &str, cell: &str, got: f64, want: f64, tolerance: f64) -> Result<()> {
    if exp::within(got, want, tolerance) {
        Ok(())
    } else {
        bail!("{name} cell {cell}: got {got} want {want} (tolerance {tolerance})")
    }
}

fn verify_table4(dir: &Path) -> Result<usize> {
    let csv = read_csv(dir, "table4.csv")?;
    let col_remaining = csv.column("remaining")?;
    let mut checked = 0;
    for (remaining, _ratio, values) in exp::TABLE4 {
        let row = csv
            .rows
            .iter()
            .find(|r| r[col_remaining] == remaining.to_string())
            .ok_or_else(|| anyhow!("table4.csv: no row for remaining={remaining}"))?;
        for (model_index, model) in ["linear", "concave", "convex", "threshold"].iter().enumerate() {
            let got = csv.number(row, csv.column(model)?)?;
            check(
                "table4.csv",
                &format!("(remaining={remaining}, {model})"),
                got,
                values[model_index],
                exp::TABLE4_TOLERANCE,
            )?;
            checked += 1;
        }
    }
    Ok(checked)
}

fn verify_table5(dir: &Path) -> Result<usize> {
    let csv = read_csv(dir, "table5.csv")?;
    let col_stage = csv.column("stage")?;
    let mut checked = 0;
    for (stage, cells) in exp::TABLE5 {
        let row = csv
            .rows
            .iter()
            .find(|r| r[col_stage] == stage)
            .ok_or_else(|| anyhow!("table5.csv: no row for stage={stage}"))?;
        for (i, limit) in exp::TABLE5_LIMITS.iter().enumerate() {
            let got = csv.number(row, csv.column(&format!("L{limit}"))?)?;
            check(
                "table5.csv",
                &format!("({stage}, L={limit})"),
                got,
                cells[i],
                exp::TABLE5_TOLERANCE,
            )?;
            checked += 1;
        }
    }
    Ok(checked)
}

fn verify_table6(dir: &Path) -> Result<usize> {
    let csv = read_csv(dir, "table6.csv")?;
    let (col_l, col_n) = (csv.column("limit")?, csv.column("n")?);
    let mut checked = 0;
    for (limit, n, nocap, fair, sell, profit, profit_tol, deterred) in exp::TABLE6 {
        let row = csv
            .rows
            .iter()
            .find(|r| r[col_l] == limit.to_string() && r[col_n] == n.to_string())
            .ok_or_else(|| anyhow!("table6.csv: no row for (L={limit}, n={n})"))?;
        let tag = format!("(L={limit}, n={n})");
        check("table6.csv", &format!("{tag} profit_nocap"),
            csv.number(row, csv.column("profit_nocap")?)?, nocap, exp::TABLE6_TOLERANCE)?;
        check("table6.csv", &format!("{tag} fair_value"),
            csv.number(row, csv.column("fair_value")?)?, fair, exp::TABLE6_TOLERANCE)?;
        check("table6.csv", &format!("{tag} max_sell"),
            csv.number(row, csv.column("max_sell")?)?, sell, exp::TABLE6_TOLERANCE)?;
        check("table6.csv", &format!("{tag} profit_cap"),
            csv.number(row, csv.column("profit_cap")?)?, profit, profit_tol)?;
        let got_deterred = row[csv.column("deterred")?] == "yes";
        if got_deterred != deterred {
            bail!("table6.csv cell {tag} deterred: got {got_deterred} want {deterred}");
        }
        checked += 5;
    }
    Ok(checked)
}

fn verify_fig6(dir: &Path) -> Result<usize> {
    let csv = read_csv(dir, "fig6.csv")?;
    let col_l = csv.column("limit")?;
    let col_n = csv.column("break_even_n")?;
    let mut checked = 0;
    for (limit, want) in [(5u64, exp::BREAK_EVEN_L5), (10, exp::BREAK_EVEN_L10)] {
        let row = csv
            .rows
            .iter()
            .find(|r| r[col_l] == limit.to_string())
            .ok_or_else(|| anyhow!("fig6.csv: no row for limit={limit}"))?;
        if row[col_n] != want.to_string() {
            bail!(
                "fig6.csv cell (L={limit}): got {} want {want}",
                row[col_n]
            );
        }
        checked += 1;
    }
    // Break-even never decreases with the limit.
    let mut previous = 0u64;
    for row in &csv.rows {
        let n: u64 = row[col_n].parse().context("fig6.csv break_even_n")?;
        if n < previous {
            bail!("fig6.csv: break-even not monotone at limit {}", row[col_l]);
        }
        previous = n;
        checked += 1;
    }
    Ok(checked)
}

fn verify_fig7(dir: &Path) -> Result<usize> {
    let csv = read_csv(dir, "fig7.csv")?;
    let col_l = csv.column("limit")?;
    let col_n = csv.column("n")?;
    let col_fair = csv.column("fair_value")?;
    let col_profit = csv.column("profit_cap")?;
    let mut checked = 0;

    // Fair value strictly decreasing along each limit's trajectory.
    let mut last: HashMap<String, f64> = HashMap::new();
    for row in &csv.rows {
        let fair = csv.number(row, col_fair)?;
        if let Some(previous) = last.get(&row[col_l]) {
            if fair >= *previous {
                bail!("fig7.csv: fair value not decreasing at L={} n={}", row[col_l], row[col_n]);
            }
        }
        last.insert(row[col_l].clone(), fair);
        checked += 1;
    }

    // Profit sign change for L=10 between n=4 and n=5.
    let profit_at = |n: &str| -> Result<f64> {
        let row = csv
            .rows
            .iter()
            .find(|r| r[col_l] == "10" && r[col_n] == n)
            .ok_or_else(|| anyhow!("fig7.csv: no row for (L=10, n={n})"))?;
        csv.number(row, col_profit)
    };
    if profit_at("4")? <= 0.0 || profit_at("5")? > 0.0 {
        bail!("fig7.csv: profit does not change sign between n=4 and n=5 at L=10");
    }
    checked += 2;
    Ok(checked)
}

fn verify_table7(dir: &Path) -> Result<usize> {
    let csv = read_csv(dir, "table7.csv")?;
    let col_l = csv.column("limit")?;
    let mut checked = 0;
    for (limit, depth, exposure, leverage, reduction) in exp::TABLE7 {
        let row = csv
            .rows
            .iter()
            .find(|r| r[col_l] == limit.to_string())
            .ok_or_else(|| anyhow!("table7.csv: no row for limit={limit}"))?;
        let tag = format!("(L={limit})");
        if row[csv.column("max_depth")?] != depth.to_string() {
            bail!("table7.csv cell {tag} max_depth: got {} want {depth}", row[csv.column("max_depth")?]);
        }
        check("table7.csv", &format!("{tag} max_exposure"),
            csv.number(row, csv.column("max_exposure")?)?, exposure, exp::TABLE7_VALUE_TOLERANCE)?;
        check("table7.csv", &format!("{tag} effective_leverage"),
            csv.number(row, csv.column("effective_leverage")?)?, leverage, exp::TABLE7_VALUE_TOLERANCE)?;
        check("table7.csv", &format!("{tag} reduction_pct"),
            csv.number(row, csv.column("reduction_pct")?)?, reduction, exp::TABLE7_REDUCTION_TOLERANCE)?;
        checked += 4;
    }
    Ok(checked)
}

fn verify_table8(dir: &Path) -> Result<usize> {
    let csv = read_csv(dir, "table8.csv")?;
    let col_op = csv.column("operation")?;
    let mut checked = 0;
    for (op, base, counted, overhead) in exp::TABLE8 {
        let row = csv
            .rows
            .iter()
            .find(|r| r[col_op] == op)
            .ok_or_else(|| anyhow!("table8.csv: no row for {op}"))?;
        let want_base = base.map_or("N/A".to_string(), |g| g.to_string());
        let got_base = &row[csv.column("erc721_gas")?];
        if *got_base != want_base {
            bail!("table8.csv cell ({op}, erc721_gas): got {got_base} want {want_base}");
        }
        let got_counted = &row[csv.column("erc7634_gas")?];
        if *got_counted != counted.to_string() {
            bail!("table8.csv cell ({op}, erc7634_gas): got {got_counted} want {counted}");
        }
        let got_overhead = &row[csv.column("overhead_pct")?];
        if got_overhead != overhead {
            bail!("table8.csv cell ({op}, overhead_pct): got {got_overhead} want {overhead}");
        }
        checked += 3;
    }
    Ok(checked)
}

fn verify_fig10a(dir: &Path) -> Result<usize> {
    let csv = read_csv(dir, "fig10a.csv")?;
    let col_n = csv.column("n")?;
    let col_direct = csv.column("direct_gas")?;
    let col_wrapper = csv.column("wrapper_gas")?;
    let crossing = csv
        .rows
        .iter()
        .find(|row| {
            let direct: u64 = row[col_direct].parse().unwrap_or(0);
            let wrapper: u64 = row[col_wrapper].parse().unwrap_or(u64::MAX);
            wrapper <= direct
        })
        .map(|row| row[col_n].clone())
        .ok_or_else(|| anyhow!("fig10a.csv: wrapper route never breaks even on the curve"))?;
    if crossing != exp::WRAPPER_BREAK_EVEN.to_string() {
        bail!(
            "fig10a.csv: wrapper breaks even at n={crossing}, want {}",
            exp::WRAPPER_BREAK_EVEN
        );
    }
    Ok(1)
}

fn verify_table2(dir: &Path) -> Result<usize> {
    let csv = read_csv(dir, "table2.csv")?;
    let col_name = csv.column("collection")?;
    let mut checked = 0;
    for (name, median, p90) in exp::TABLE2_TARGETS {
        let row = csv
            .rows
            .iter()
            .find(|r| r[col_name] == name)
            .ok_or_else(|| anyhow!("table2.csv: no row for {name}"))?;
        let got_median = &row[csv.column("median")?];
        if *got_median != median.to_string() {
            bail!("table2.csv cell ({name}, median): got {got_median} want {median}");
        }
        let got_p90 = csv.number(row, csv.column("p90")?)?;
        let relative = (got_p90 - p90 as f64).abs() / p90 as f64;
        if relative > exp::TABLE2_P90_RELATIVE_TOLERANCE {
            bail!(
                "table2.csv cell ({name}, p90): got {got_p90} want {p90} (relative error {relative:.2} > {})",
                exp::TABLE2_P90_RELATIVE_TOLERANCE
            );
        }
        checked += 2;
    }
    Ok(checked)
}

fn verify_table3(dir: &Path) -> Result<usize> {
    let csv = read_csv(dir, "table3.csv")?;
    let col_name = csv.column("collection")?;
    let mut checked = 0;
    for (name, cells) in exp::TABLE3 {
        let row = csv
            .rows
            .iter()
            .find(|r| r[col_name] == name)
            .ok_or_else(|| anyhow!("table3.csv: no row for {name}"))?;
        for (i, cap) in exp::TABLE3_CAPS.iter().enumerate() {
            let got = csv.number(row, csv.column(&format!("cap_{cap}"))?)?;
            check(
                "table3.csv",
                &format!("({name}, cap={cap})"),
                got,
                cells[i],
                exp::TABLE3_TOLERANCE,
            )?;
            checked += 1;
        }
    }
    // Strict cross-collection ordering at every cap.
    for cap in exp::TABLE3_CAPS {
        let column = csv.column(&format!("cap_{cap}"))?;
        let mut previous = f64::INFINITY;
        for name in exp::TABLE3_ORDERING {
            let row = csv.rows.iter().find(|r| r[col_name] == name).unwrap();
            let got = csv.number(row, column)?;
            if got >= previous {
                bail!("table3.csv: ordering violated at cap {cap}: {name} = {got} >= {previous}");
            }
            previous = got;
            checked += 1;
        }
    }
    Ok(checked)
}

fn verify_fig9(dir: &Path) -> Result<usize> {
    let csv = read_csv(dir, "fig9.csv")?;
    let col_shock = csv.column("shock")?;
    let col_limit = csv.column("limit")?;
    let col_depth = csv.column("cascade_depth")?;
    let col_loss = csv.column("aggregate_loss")?;
    let mut checked = 0;

    // Per shock: the capped chain loses no more than the long chain, and
    // strictly less once something actually liquidates.
    let mut shocks: Vec<String> = csv.rows.iter().map(|r| r[col_shock].clone()).collect();
    shocks.dedup();
    for shock in &shocks {
        let find = |limit: &str| -> Result<(f64, u64)> {
            let row = csv
                .rows
                .iter()
                .find(|r| &r[col_shock] == shock && r[col_limit] == limit)
                .ok_or_else(|| anyhow!("fig9.csv: no row for shock {shock} limit {limit}"))?;
            Ok((
                csv.number(row, col_loss)?,
                row[col_depth].parse().context("cascade_depth")?,
            ))
        };
        let (loss_short, depth_short) = find("10")?;
        let (loss_long, depth_long) = find("50")?;
        if loss_short > loss_long {
            bail!("fig9.csv: capped loss {loss_short} exceeds uncapped {loss_long} at shock {shock}");
        }
        if loss_long > 0.0 && !(loss_short < loss_long && depth_short < depth_long) {
            bail!("fig9.csv: capped chain not strictly better at shock {shock}");
        }
        checked += 1;
    }

    // Loss monotone in the shock for each limit.
    for limit in ["10", "50"] {
        let mut previous = -1.0;
        for shock in &shocks {
            let row = csv
                .rows
                .iter()
                .find(|r| &r[col_shock] == shock && r[col_limit] == limit)
                .unwrap();
            let loss = csv.number(row, col_loss)?;
            if loss < previous {
                bail!("fig9.csv: loss not monotone in shock for limit {limit}");
            }
            previous = loss;
            checked += 1;
        }
    }
    Ok(checked)
}

fn verify_strict_regeneration(dir: &Path) -> Result<usize> {
    let manifest = manifest::load(dir)?;
    let outputs = regenerate_all(&manifest.config)?;
    let by_name: HashMap<&str, &str> = outputs
        .iter()
        .map(|o| (o.name.as_str(), o.content.as_str()))
        .collect();

    let mut checked = 0;
    for (name, recorded_hash) in &manifest.checksums {
        let path = dir.join(name);
        let on_disk = std::fs::read_to_string(&path)
            .with_context(|| format!("missing file {}", path.display()))?;
        let disk_hash = manifest::sha256_hex(on_disk.as_bytes());
        if disk_hash != *recorded_hash {
            bail!("{name}: checksum mismatch (file {disk_hash}, manifest {recorded_hash})");
        }
        let regenerated = by_name
            .get(name.as_str())
            .ok_or_else(|| anyhow!("{name}: not produced by regeneration"))?;
        if *regenerated != on_disk {
            bail!("{name}: regenerated bytes differ from the file on disk");
        }
        checked += 2;
    }
    Ok(checked)
}

type TableCheck = fn(&Path) -> Result<usize>;

/// Runs every table check, printing one line per table. Returns an error on
/// the first mismatching cell.
pub fn verify_dir(dir: &Path, profile: ToleranceProfile) -> Result<()> {
    let checks: [(&str, TableCheck); 10] = [
        ("table2.csv", verify_table2),
        ("table3.csv", verify_table3),
        ("table4.csv", verify_table4),
        ("table5.csv", verify_table5),
        ("table6.csv", verify_table6),
        ("table7.csv", verify_table7),
        ("table8.csv", verify_table8),
        ("fig6.csv", verify_fig6),
        ("fig7.csv", verify_fig7),
        ("fig9.csv", verify_fig9),
    ];
    for (name, checker) in checks {
        let checked = checker(dir)?;
        println!("verify {name}: ok ({checked} checks)");
    }
    let checked = verify_fig10a(dir)?;
    println!("verify fig10a.csv: ok ({checked} checks)");

    if profile == ToleranceProfile::Strict {
        let checked = verify_strict_regeneration(dir)?;
        println!("verify regeneration: ok ({checked} checks)");
    }
    Ok(())
}
