//! Cross-oracle comparison of amplitudes on a common grid.

use std::f64::consts::PI;

use dirac_decay::branch_cut::spectral_series;
use dirac_decay::discretized::propagate_discretized;
use dirac_decay::model::to_dimensionless;
use dirac_decay::resolvent::{bromwich_invert, default_sigma, ResolventFn};
use dirac_decay::volterra::{solve_volterra, Scheme, VolterraConfig};
use dirac_decay::{DecayError, ModelParams, Regime, Scaling, TimeGrid};
use num_complex::Complex64;

use crate::commands::param_header;
use crate::error::CliError;
use crate::output::{num, Table};

/// Relative deviation above which a pair is flagged.
pub const FLAG_THRESHOLD: f64 = 1e-3;

/// Step that divides the output spacing into an even number of solver steps.
fn aligned_step(spacing: f64, n: usize, dt: f64) -> (f64, usize) {
    let mut k = (spacing / dt).ceil().max(1.0) as usize;
    if (k * n) % 2 == 1 {
        k += 1;
    }
    (spacing / k as f64, k)
}

fn method_values(p: &ModelParams, method: &str, grid: &TimeGrid, dt: f64) -> Result<Vec<Complex64>, DecayError> {
    let pts = grid.points();
    let n = pts.len();
    let t_max = pts[n - 1];
    match method {
        "volterra" | "discretized" => {
            let (h, k) = aligned_step(t_max / n as f64, n, dt);
            let cfg = VolterraConfig::new(h, t_max, Scheme::Simpson);
            let series = if method == "volterra" {
                solve_volterra(p, &cfg)?
            } else {
                propagate_discretized(p, 2000, &cfg)?.0
            };
            Ok((1..=n).map(|i| series.values[i * k]).collect())
        }
        "bromwich" => {
            let sigma = default_sigma(to_dimensionless(t_max, p));
            Ok(bromwich_invert(&ResolventFn::principal(*p), grid, sigma)?.values)
        }
        "spectral" => Ok(spectral_series(p, grid)?.total.values),
        "closed" => {
            if p.regime() != Regime::MasslessNocut {
                return Err(DecayError::Regime {
                    regime: p.regime().to_string(),
                    reason: "closed form exists only for MASSLESS_NOCUT".into(),
                });
            }
            Ok(pts
                .iter()
                .map(|&t| Complex64::new((-2.0 * PI * to_dimensionless(t, p)).exp(), 0.0))
                .collect())
        }
        other => Err(DecayError::InvalidParam(format!("unknown method '{other}'"))),
    }
}

/// Amplitude table for each applicable method plus pairwise deviations.
/// Returns the table and, when any pair exceeds the flag threshold, a message.
pub fn compare_oracles(
    p: &ModelParams,
    t_max: f64,
    n: usize,
    dt: f64,
    methods: &[String],
) -> Result<(Table, Option<String>), CliError> {
    if methods.len() < 2 {
        return Err(CliError::MethodCount(methods.len()));
    }
    if n == 0 || !(t_max > 0.0) || !(dt > 0.0) {
        return Err(CliError::Config("compare needs n >= 1, t_max > 0, dt > 0".into()));
    }
    let grid = TimeGrid::new(
        (1..=n).map(|i| t_max * i as f64 / n as f64).collect(),
        Scaling::Physical,
    )?;
    let mut ok: Vec<(String, Vec<Complex64>)> = Vec::new();
    let mut skipped = Vec::new();
    for m in methods {
        match method_values(p, m, &grid, dt) {
            Ok(v) => ok.push((m.clone(), v)),
            Err(e) => skipped.push((m.clone(), e)),
        }
    }
    let mut table = Table::new("compare", &[]);
    param_header(&mut table, p);
    table.meta("methods", methods.join(" "));
    table.meta("flag_threshold", num(FLAG_THRESHOLD));
    table.meta("dt", num(dt));
    for (m, e) in &skipped {
        table.meta(&format!("skipped_{m}"), format!("{} {}", e.code(), e));
    }
    if ok.len() < 2 {
        return Err(CliError::MethodCount(ok.len()));
    }
    let mut breaches = Vec::new();
    for i in 0..ok.len() {
        for j in i + 1..ok.len() {
            let dev = ok[i]
                .1
                .iter()
                .zip(&ok[j].1)
                .map(|(a, b)| (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max);
            let key = format!("max_rel_dev_{}_{}", ok[i].0, ok[j].0);
            let flagged = dev > FLAG_THRESHOLD;
            table.meta(&key, format!("{}{}", num(dev), if flagged { " FLAGGED" } else { "" }));
            if flagged {
                breaches.push(format!("{key}={dev:.3e}"));
            }
        }
    }
    let mut cols = vec!["t".to_string()];
    for (m, _) in &ok {
        cols.push(format!("re_{m}"));
        cols.push(format!("im_{m}"));
    }
    table.columns = cols;
    for (k, t) in grid.points().iter().enumerate() {
        let mut row = vec![num(*t)];
        for (_, v) in &ok {
            row.push(num(v[k].re));
            row.push(num(v[k].im));
        }
        table.push(row);
    }
    let breach = (!breaches.is_empty()).then(|| breaches.join(", "));
    Ok((table, breach))
}
