//! Published table values the outputs are verified against, with the
//! tolerance each comparison runs at. Cells printed at one decimal carry a
//! half-ULP tolerance of 0.05; two-decimal cells use 0.01.

/// Valuation table: `(remaining, ratio, [linear, concave, convex, threshold])`
/// at base value 10 and limit 20. Tolerance 0.01 per cell.
pub const TABLE4: [(u64, f64, [f64; 4]); 7] = [
    (20, 1.00, [10.00, 10.00, 10.00, 10.00]),
    (18, 0.90, [9.00, 9.49, 8.10, 8.75]),
    (15, 0.75, [7.50, 8.66, 5.63, 6.88]),
    (10, 0.50, [5.00, 7.07, 2.50, 3.75]),
    (5, 0.25, [2.50, 5.00, 0.63, 0.63]),
    (2, 0.10, [1.00, 3.16, 0.10, 0.50]),
    (0, 0.00, [0.00, 0.00, 0.00, 0.50]),
];
pub const TABLE4_TOLERANCE: f64 = 0.01;

/// Marginal-cost percentages per stage for limits 5/10/20/50.
/// Tolerance 0.1 percentage points.
pub const TABLE5: [(&str, [f64; 4]); 3] = [
    ("first", [10.6, 5.1, 2.5, 1.0]),
    ("mid_point", [14.2, 10.1, 7.1, 4.5]),
    ("last", [44.7, 31.6, 22.4, 14.1]),
];
pub const TABLE5_LIMITS: [u64; 4] = [5, 10, 20, 50];
pub const TABLE5_TOLERANCE: f64 = 0.1;

/// `(limit, n, no-cap profit, fair value, max sell, cap profit, profit tolerance, deterred)`.
pub type WashRow = (u64, u64, f64, f64, f64, f64, f64, bool);

/// Wash-trade profitability rows. The two exhausted-budget rows are printed
/// at one decimal, hence their 0.05 tolerance.
pub const TABLE6: [WashRow; 9] = [
    (5, 1, 3.00, 8.94, 11.63, 1.62, 0.01, false),
    (5, 3, 2.99, 6.33, 8.22, -1.79, 0.01, true),
    (5, 5, 2.98, 0.00, 0.00, -10.0, 0.05, true),
    (10, 3, 2.99, 8.37, 10.88, 0.86, 0.01, false),
    (10, 5, 2.98, 7.07, 9.19, -0.83, 0.01, true),
    (10, 10, 2.95, 0.00, 0.00, -10.1, 0.05, true),
    (20, 5, 2.98, 8.66, 11.26, 1.23, 0.01, false),
    (20, 9, 2.96, 7.42, 9.64, -0.41, 0.01, true),
    (20, 15, 2.93, 5.00, 6.50, -3.58, 0.01, true),
];
pub const TABLE6_TOLERANCE: f64 = 0.01;

pub const BREAK_EVEN_L10: u64 = 5;
pub const BREAK_EVEN_L5: u64 = 3;

/// Leverage rows: `(limit, depth, exposure, leverage, reduction %)`.
/// Exposure and leverage within 0.01; reduction within 0.1 points.
pub const TABLE7: [(u64, u64, f64, f64, f64); 5] = [
    (4, 2, 21.90, 2.19, 34.2),
    (6, 3, 25.33, 2.53, 24.0),
    (10, 5, 29.41, 2.94, 11.7),
    (20, 10, 32.67, 3.27, 1.9),
    (50, 25, 33.33, 3.33, 0.0),
];
pub const TABLE7_VALUE_TOLERANCE: f64 = 0.01;
pub const TABLE7_REDUCTION_TOLERANCE: f64 = 0.1;

/// Gas rows: `(operation, erc721, erc7634, overhead cell)`.
/// Gas values and the rendered overhead column are exact.
pub const TABLE8: [(&str, Option<u64>, u64, &str); 6] = [
    ("mint", Some(51_316), 51_316, "0.0"),
    ("mint_with_limit", None, 74_812, "N/A"),
    ("transfer_first", Some(48_947), 54_283, "10.9"),
    ("transfer_near_cap", Some(48_947), 54_471, "11.3"),
    ("approve_transfer", Some(73_221), 78_557, "7.3"),
    ("set_limit", None, 23_496, "N/A"),
];

pub const WRAPPER_BREAK_EVEN: u64 = 221;

/// Population percentile targets per collection:
/// `(collection, median, p90)`. Medians must match exactly; p90 within 30%.
pub const TABLE2_TARGETS: [(&str, u64, u64); 5] = [
    ("PFP", 1, 9),
    ("Art", 1, 4),
    ("Gaming", 2, 17),
    ("Memberships", 1, 3),
    ("Metaverse", 1, 6),
];
pub const TABLE2_P90_RELATIVE_TOLERANCE: f64 = 0.30;

/// Cap-exceedance percentages per collection over caps 3/5/10/20/50/100.
/// Tolerance 5 percentage points per cell; rows must stay strictly ordered
/// Gaming > PFP > Metaverse > Art > Memberships at every cap.
pub const TABLE3: [(&str, [f64; 6]); 5] = [
    ("PFP", [24.1, 16.0, 8.8, 4.4, 1.7, 0.9]),
    ("Art", [13.1, 7.0, 2.9, 1.2, 0.3, 0.1]),
    ("Gaming", [32.4, 23.3, 14.2, 8.5, 4.3, 2.5]),
    ("Memberships", [6.0, 2.6, 0.8, 0.2, 0.0, 0.0]),
    ("Metaverse", [18.8, 11.7, 5.5, 2.5, 1.0, 0.4]),
];
pub const TABLE3_CAPS: [u64; 6] = [3, 5, 10, 20, 50, 100];
pub const TABLE3_TOLERANCE: f64 = 5.0;
pub const TABLE3_ORDERING: [&str; 5] = ["Gaming", "PFP", "Metaverse", "Art", "Memberships"];

/// Float comparison with a representation-noise pad well below any printed
/// precision.
pub fn within(got: f64, want: f64, tolerance: f64) -> bool {
    (got - want).abs() <= tolerance + 1e-9
}
