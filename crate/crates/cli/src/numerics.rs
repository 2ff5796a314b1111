//! `identities`, `cover` and `singexp`: the numerical suites.

use anyhow::{bail, Result};
use clap::Args;
use kecover_core::covers1d::{run_cover_suite, CoverSuiteConfig};
use kecover_core::divisor_algebra::to_f64;
use kecover_core::kahler1d::{
    convergence_table, run_identity_suite, Calculus, Grid, IdentityConfig, Stencil, Tolerances, DEFAULT_HALF_WIDTH,
    DEFAULT_INTERVALS,
};
use kecover_core::singexp::{
    classify_at_threshold, reduced_integral, threshold, Classification, MonomialSum, QuadratureResult, DEFAULT_LEVELS,
    THRESHOLD_CATALOG,
};
use serde::Serialize;
use serde_json::json;

use crate::report::{Report, Table};

pub const MAX_INTERVALS: usize = 65536;
pub const MIN_WINDOW: f64 = 8.0;

/// `N` must be a power of two in `[64, 65536]` and `T >= 8`.
pub fn run_grid(intervals: usize, window: f64) -> Result<Grid> {
    if !intervals.is_power_of_two() || !(64..=MAX_INTERVALS).contains(&intervals) {
        bail!("--n-grid must be a power of two in [64, {MAX_INTERVALS}], got {intervals}");
    }
    if !(window.is_finite() && window >= MIN_WINDOW) {
        bail!("--window must be at least {MIN_WINDOW}, got {window}");
    }
    Ok(Grid::new(window, intervals)?)
}

fn calculus(break_kappa: Option<f64>) -> Result<Calculus> {
    let calc = Calculus::default();
    match break_kappa {
        None => Ok(calc),
        Some(f) if f.is_finite() && f > 0.0 => Ok(calc.with_kappa_factor(f)),
        Some(f) => bail!("--break-kappa must be a positive factor, got {f}"),
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IdentitiesArgs {
    /// Number of grid intervals.
    #[arg(long, default_value_t = DEFAULT_INTERVALS)]
    pub n_grid: usize,
    /// Half-width `T` of the window `[-T, T]` in `t = log |z|^2`.
    #[arg(long, default_value_t = DEFAULT_HALF_WIDTH)]
    pub window: f64,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Fault injection: multiply the Monge-Ampere constant by this factor.
    #[arg(long)]
    pub break_kappa: Option<f64>,
    #[arg(long)]
    pub tol_j: Option<f64>,
    #[arg(long)]
    pub tol_f0: Option<f64>,
    #[arg(long)]
    pub tol_cocycle: Option<f64>,
    #[arg(long)]
    pub tol_scaling: Option<f64>,
    #[arg(long)]
    pub tol_constant: Option<f64>,
    /// Doublings in the second-order convergence table, starting at `--n-grid`.
    #[arg(long, default_value_t = 4)]
    pub convergence_levels: usize,
}

fn tolerances(args: &IdentitiesArgs) -> Result<Tolerances> {
    let mut tol = Tolerances::default();
    for (slot, value) in [
        (&mut tol.j, args.tol_j),
        (&mut tol.f0, args.tol_f0),
        (&mut tol.cocycle, args.tol_cocycle),
        (&mut tol.scaling, args.tol_scaling),
        (&mut tol.constant, args.tol_constant),
    ] {
        if let Some(v) = value {
            if !(v.is_finite() && v > 0.0) {
                bail!("tolerances must be positive, got {v}");
            }
            *slot = v;
        }
    }
    Ok(tol)
}

fn tolerance_of(tol: &Tolerances, name: &str) -> Option<f64> {
    match name {
        "j_three_way" => Some(tol.j),
        "f0_two_way" | "ricci_round" => Some(tol.f0),
        "cocycle" => Some(tol.cocycle),
        "scaling" => Some(tol.scaling),
        "constant_invariance" => Some(tol.constant),
        "mass_conservation" => Some(tol.mass),
        "dilation_density" => Some(tol.density_match),
        _ => None,
    }
}

pub fn cmd_identities(args: &IdentitiesArgs, seed: u64) -> Result<Report> {
    let grid = run_grid(args.n_grid, args.window)?;
    if args.samples == 0 {
        bail!("--samples must be positive");
    }
    if args.convergence_levels > 8 || args.n_grid << args.convergence_levels > 1 << 20 {
        bail!("--convergence-levels too large");
    }
    let calc = calculus(args.break_kappa)?;
    let mut config = IdentityConfig::new(grid, args.samples, seed);
    config.tolerances = tolerances(args)?;
    let result = run_identity_suite(&calc, &config)?;

    let mut table = Table::new(&["identity", "worst", "tolerance", "passed"]);
    for ((name, worst), (_, ok)) in result.worst.iter().zip(&result.passed) {
        let tol = tolerance_of(&config.tolerances, name);
        table.push(vec![json!(name), json!(worst), json!(tol), json!(ok)]);
    }
    let mut report = Report::new("identities", serde_json::to_value(args)?, table);
    report.passed = result.all_passed();
    report.note("seed", seed);
    report.note("samples", args.samples);
    report.note("kappa", calc.kappa);
    if args.convergence_levels > 0 {
        let rows = convergence_table(args.window, args.n_grid, args.convergence_levels, Stencil::Second)?;
        report.note("convergence_second_order", serde_json::to_value(&rows)?);
    }
    let largest_f = result.records.iter().map(|r| r.f.abs()).fold(0.0, f64::max);
    report.note("largest_abs_f", largest_f);
    Ok(report)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CoverArgs {
    /// Degree of the cyclic cover `z -> z^d`.
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_INTERVALS)]
    pub n_grid: usize,
    #[arg(long, default_value_t = DEFAULT_HALF_WIDTH)]
    pub window: f64,
    /// Fault injection: multiply the Monge-Ampere constant by this factor.
    #[arg(long)]
    pub break_kappa: Option<f64>,
}

pub fn cmd_cover(args: &CoverArgs, seed: u64) -> Result<Report> {
    if args.d < 2 || args.d > 16 {
        bail!("--d must lie in 2..=16, got {}", args.d);
    }
    if args.samples == 0 {
        bail!("--samples must be positive");
    }
    let grid = run_grid(args.n_grid, args.window)?;
    let calc = calculus(args.break_kappa)?;
    let config = CoverSuiteConfig::new(args.d, grid, args.samples, seed);
    let result = run_cover_suite(&calc, &config)?;
    let values = [
        ("pullback_mass", result.mass_error, config.mass_tolerance),
        ("u_density", result.u_density_mismatch, config.density_tolerance),
        ("pullback_f0", result.worst_pullback_residual, config.pullback_tolerance),
        ("descent_roundtrip", result.worst_roundtrip, config.roundtrip_tolerance),
        ("lifting_bounded", -result.probe.empirical_constant, f64::NEG_INFINITY),
        ("lifting_stable", result.stability, config.stability_tolerance),
    ];
    let mut table = Table::new(&["check", "value", "tolerance", "passed"]);
    for ((name, value, tol), (_, ok)) in values.iter().zip(&result.passed) {
        let tol = if tol.is_finite() { json!(tol) } else { json!("finite") };
        table.push(vec![json!(name), json!(value), tol, json!(ok)]);
    }
    let mut report = Report::new("cover", serde_json::to_value(args)?, table);
    report.passed = result.all_passed();
    report.note("seed", seed);
    report.note("beta", result.beta);
    report.note("mass_ratio", result.mass_ratio);
    report.note("empirical_constant", result.probe.empirical_constant);
    report.note("refined_constant", result.refined_constant);
    report.note("margins", serde_json::to_value(&result.probe.margins)?);
    Ok(report)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SingexpArgs {
    /// Exponent tuple such as `2,2`; repeat for several. Defaults to the
    /// threshold catalog.
    #[arg(long)]
    pub m: Vec<String>,
    /// Comma-separated `lambda` values. Without it each tuple is probed at
    /// `threshold (1 -+ epsilon)`.
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_LEVELS)]
    pub levels: usize,
}

/// Classification implied by the exact condition `lambda < sum 1/m_i`,
/// or `None` within 5% of the threshold where either outcome is accepted.
fn expected(lambda: f64, threshold: f64) -> Option<Classification> {
    if lambda < 0.95 * threshold {
        Some(Classification::Convergent)
    } else if lambda > 1.05 * threshold {
        Some(Classification::Divergent)
    } else {
        None
    }
}

pub fn cmd_singexp(args: &SingexpArgs) -> Result<Report> {
    let tuples: Vec<MonomialSum> = if args.m.is_empty() {
        THRESHOLD_CATALOG
            .iter()
            .map(|m| MonomialSum::new(m.to_vec()))
            .collect::<Result<_, _>>()?
    } else {
        args.m.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
    };
    let mut table = Table::new(&[
        "m",
        "threshold",
        "lambda",
        "classification",
        "expected",
        "last_ratio",
        "estimate",
        "passed",
    ]);
    let mut passed = true;
    let mut push = |m: &MonomialSum, t: f64, result: &QuadratureResult| {
        let want = expected(result.lambda, t);
        let ok = want.is_none_or(|w| w == result.classification);
        passed &= ok;
        table.push(vec![
            json!(m.to_string()),
            json!(threshold(m).to_string()),
            json!(result.lambda),
            json!(result.classification.to_string()),
            json!(want.map_or("either".to_string(), |w| w.to_string())),
            json!(result.growth_ratios.last()),
            json!(result.estimates.last()),
            json!(ok),
        ]);
    };
    for m in &tuples {
        let t = to_f64(&threshold(m));
        if args.lambda.is_empty() {
            let probe = classify_at_threshold(m, args.epsilon, args.levels)?;
            push(m, t, &probe.below);
            push(m, t, &probe.above);
        } else {
            for &lambda in &args.lambda {
                push(m, t, &reduced_integral(m, lambda, args.levels)?);
            }
        }
    }
    let rows = table.rows.len();
    let mut report = Report::new("singexp", serde_json::to_value(args)?, table);
    report.passed = passed;
    report.note("tuples", tuples.len());
    report.note("rows", rows);
    Ok(report)
}
