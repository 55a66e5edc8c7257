//! Single-purpose subcommands; each returns one table.

use dirac_decay::branch_cut::spectral_series;
use dirac_decay::discretized::propagate_discretized;
use dirac_decay::kernel::{kernel_eval, KernelForm, KernelSpec};
use dirac_decay::markov::{
    gksl_reference_survival, semigroup_deviation, window_slopes, zeno_protocol, GkslMode, GkslRates,
};
use dirac_decay::poles::{crossover_map, find_poles};
use dirac_decay::resolvent::{bromwich_invert, default_sigma, ResolventFn};
use dirac_decay::short_time::{survival_series, survival_series_corrected};
use dirac_decay::ssh::{survival_vs_depth, SshChain};
use dirac_decay::volterra::{solve_volterra, Scheme, VolterraConfig};
use dirac_decay::wavefunction::{psi_massless, psi_numeric, psi_time_domain, SpatialGrid, WaveField};
use dirac_decay::{
    ComplexSeries, DecayError, ModelParams, Picture, Regime, Scaling, TimeGrid,
};
use num_complex::Complex64;

use crate::error::CliError;
use crate::output::{num, Table};
use crate::{ParamArgs, SshArgs, SurvivalMethod, WaveMethod};

/// Echo of the model parameters and regime.
pub fn param_header(table: &mut Table, p: &ModelParams) {
    table.meta_all(p.to_kv());
    table.meta("regime", p.regime());
}

/// Columns t, Re, Im, P for an amplitude series (physical t).
pub fn amplitude_table(name: &str, series: &ComplexSeries, p: &ModelParams) -> Table {
    let s = series.rescaled(Scaling::Physical, p);
    let mut t = Table::new(name, &["t", "re_phi", "im_phi", "p"]);
    param_header(&mut t, p);
    t.meta("picture", format!("{:?}", s.picture));
    t.meta("error_bound", num(s.error_bound));
    for (ti, v) in s.grid.points().iter().zip(&s.values) {
        t.push_nums(&[*ti, v.re, v.im, v.norm_sqr()]);
    }
    t
}

pub fn kernel(p: &ModelParams, t_max: f64, n: usize, quadrature: bool) -> Result<Table, CliError> {
    if n == 0 || !(t_max > 0.0) {
        return Err(CliError::Config("kernel grid needs n >= 1 and t_max > 0".into()));
    }
    let spec = if quadrature {
        KernelSpec::new(*p, KernelForm::Quadrature)?
    } else {
        KernelSpec::natural(*p)
    };
    let mut t = Table::new("kernel", &["t", "re_k", "im_k"]);
    param_header(&mut t, p);
    t.meta("form", format!("{:?}", spec.form));
    t.meta("delta_weight", num(-spec.delta_rate() * p.g2()));
    for i in 1..=n {
        let ti = t_max * i as f64 / n as f64;
        let k = kernel_eval(&spec, ti)?;
        t.push_nums(&[ti, k.re, k.im]);
    }
    Ok(t)
}

fn uniform(t_max: f64, dt: f64) -> Result<TimeGrid, CliError> {
    if !(dt > 0.0 && t_max >= dt) {
        return Err(CliError::Config(format!("need 0 < dt <= t_max, got dt={dt}, t_max={t_max}")));
    }
    Ok(TimeGrid::uniform(t_max, (t_max / dt).round() as usize, Scaling::Physical)?)
}

pub fn survival(
    p: &ModelParams,
    method: SurvivalMethod,
    t_max: f64,
    dt: f64,
    order: usize,
    nominal: bool,
    modes: usize,
) -> Result<Table, CliError> {
    let mut table = match method {
        SurvivalMethod::Volterra => {
            let cfg = VolterraConfig::new(dt, t_max, Scheme::Simpson);
            let mut t = amplitude_table("survival_volterra", &solve_volterra(p, &cfg)?, p);
            t.meta("scheme", "simpson").meta("dt", num(dt));
            t
        }
        SurvivalMethod::Discretized => {
            let cfg = VolterraConfig::new(dt, t_max, Scheme::Simpson);
            let (series, field) = propagate_discretized(p, modes, &cfg)?;
            let mut t = amplitude_table("survival_discretized", &series, p);
            t.meta("modes", modes).meta("dt", num(dt));
            t.meta("final_norm", num(field.norm()));
            t.meta("lambda_eff", num(field.lambda_eff));
            t
        }
        SurvivalMethod::Bromwich => {
            let grid = uniform(t_max, dt)?;
            let sigma = default_sigma(dirac_decay::model::to_dimensionless(t_max, p));
            let s = bromwich_invert(&ResolventFn::principal(*p), &grid, sigma)?;
            let mut t = amplitude_table("survival_bromwich", &s, p);
            t.meta("sigma", num(sigma));
            t
        }
        SurvivalMethod::Spectral => {
            let grid = uniform(t_max, dt)?;
            let positive = TimeGrid::new(grid.points()[1..].to_vec(), Scaling::Physical)?;
            let s = spectral_series(p, &positive)?;
            let mut t = Table::new(
                "survival_spectral",
                &["t", "re_phi", "im_phi", "p", "re_pole", "im_pole", "re_bc", "im_bc"],
            );
            param_header(&mut t, p);
            t.meta("picture", "Interaction");
            t.meta("error_bound", num(s.total.error_bound));
            for (i, ti) in positive.points().iter().enumerate() {
                let (v, a, b) = (s.total.values[i], s.pole[i], s.branch_cut[i]);
                t.push_nums(&[*ti, v.re, v.im, v.norm_sqr(), a.re, a.im, b.re, b.im]);
            }
            t
        }
        SurvivalMethod::Series => {
            let series = if nominal { survival_series(p) } else { survival_series_corrected(p) };
            if order > series.max_order() {
                return Err(CliError::Config(format!(
                    "order {order} exceeds available order {}",
                    series.max_order()
                )));
            }
            let grid = uniform(t_max, dt)?;
            let mut t = Table::new("survival_series", &["t", "p"]);
            param_header(&mut t, p);
            t.meta("order", order);
            t.meta("coefficients", if nominal { "nominal" } else { "corrected" });
            t.meta("numeric", series.is_numeric());
            for &ti in grid.points() {
                t.push_nums(&[ti, series.eval(p, ti, order)]);
            }
            t
        }
    };
    table.meta("method", format!("{method:?}").to_lowercase());
    Ok(table)
}

pub fn poles(p: &ModelParams) -> Result<Table, CliError> {
    let set = find_poles(p)?;
    let mut t = Table::new(
        "poles",
        &["regime", "label", "re_z", "im_z", "sheet", "re_residue", "im_residue", "discriminant"],
    );
    param_header(&mut t, p);
    let disc = set.discriminant.map(num).unwrap_or_default();
    for pole in &set.poles {
        t.push(vec![
            p.regime().to_string(),
            format!("{:?}", pole.label),
            num(pole.z.re),
            num(pole.z.im),
            pole.sheet.0.to_string(),
            num(pole.residue.re),
            num(pole.residue.im),
            disc.clone(),
        ]);
    }
    Ok(t)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn crossover(w: (f64, f64, usize), l: (f64, f64, usize)) -> Result<Table, CliError> {
    if w.2 == 0 || l.2 == 0 || w.0 <= 0.0 || l.0 <= 0.0 || w.1 < w.0 || l.1 < l.0 {
        return Err(CliError::Config("crossover grids must be positive and non-empty".into()));
    }
    let wg = linspace(w.0, w.1, w.2);
    let lg = linspace(l.0, l.1, l.2);
    let map = crossover_map(&wg, &lg);
    let mut cols = vec!["w".to_string()];
    cols.extend(lg.iter().map(|v| format!("L={}", num(*v))));
    let mut t = Table::new("crossover", &[]);
    t.columns = cols;
    t.meta("quantity", "exp(-|x1-x2|)");
    t.meta("rows", "omega0/g^2").meta("columns", "lambda/g^2");
    for (wi, row) in wg.iter().zip(&map) {
        let mut r = vec![num(*wi)];
        r.extend(row.iter().map(|c| c.map(num).unwrap_or_default()));
        t.push(r);
    }
    Ok(t)
}

pub fn wave_table(name: &str, field: &WaveField) -> Table {
    let mut t = Table::new(name, &["x", "re_psi", "im_psi", "abs2"]);
    param_header(&mut t, &field.params);
    t.meta("t", num(field.t));
    t.meta("integrated_probability", num(field.integrated_prob));
    for (x, v) in field.x_grid.iter().zip(&field.values) {
        t.push_nums(&[*x, v.re, v.im, v.norm_sqr()]);
    }
    t
}

pub fn wavefunction(p: &ModelParams, t: f64, method: WaveMethod, per_segment: usize) -> Result<Table, CliError> {
    let grid = SpatialGrid::light_cone(t, per_segment)?;
    let field = match method {
        WaveMethod::Numeric => psi_numeric(p, t, &grid)?,
        WaveMethod::Massless => {
            if p.regime() != Regime::MasslessNocut {
                return Err(DecayError::Regime {
                    regime: p.regime().to_string(),
                    reason: "closed-form resonant state needs m = 0 without cutoff".into(),
                }
                .into());
            }
            let vals = grid.points.iter().map(|&x| psi_massless(p, t, x)).collect();
            WaveField::new(&grid, vals, t, *p, true)
        }
        WaveMethod::TimeDomain => psi_time_domain(p, t, &grid, 4000)?,
    };
    let mut table = wave_table("wavefunction", &field);
    table.meta("method", format!("{method:?}").to_lowercase());
    Ok(table)
}

fn chain_from(args: &SshArgs, params: &ParamArgs, t1: f64, t2: f64) -> Result<SshChain, CliError> {
    Ok(SshChain::new(
        args.cells,
        t1,
        t2,
        params.g.unwrap_or(0.136),
        params.omega0.unwrap_or(0.01),
    )?)
}

fn depth_grid(args: &SshArgs) -> Result<Vec<f64>, CliError> {
    if !(args.dl > 0.0 && args.lmax >= args.dl) {
        return Err(CliError::Config("need 0 < dl <= lmax".into()));
    }
    let n = (args.lmax / args.dl).round() as usize;
    Ok((0..=n).map(|i| i as f64 * args.dl).collect())
}

fn chain_header(t: &mut Table, c: &SshChain) {
    t.meta("cells", c.n_cells).meta("g", num(c.g)).meta("omega0", num(c.omega0));
}

pub fn ssh(args: &SshArgs, params: &ParamArgs, t1: f64, t2: f64) -> Result<Table, CliError> {
    let chain = chain_from(args, params, t1, t2)?;
    let l = depth_grid(args)?;
    let s = survival_vs_depth(&chain, &l)?;
    let mut t = Table::new("ssh", &["l", "p"]);
    chain_header(&mut t, &chain);
    t.meta("t1", num(t1)).meta("t2", num(t2));
    for (li, v) in l.iter().zip(&s.values) {
        t.push_nums(&[*li, v.norm_sqr()]);
    }
    Ok(t)
}

/// P(l) columns for t₁,₂ = (sum ± δ)/2.
pub fn ssh_sweep_series(
    args: &SshArgs,
    params: &ParamArgs,
    sum: f64,
    deltas: &[f64],
) -> Result<(Vec<f64>, Vec<Vec<f64>>), CliError> {
    let l = depth_grid(args)?;
    let cols = deltas
        .iter()
        .map(|&d| {
            let chain = chain_from(args, params, 0.5 * (sum + d), 0.5 * (sum - d))?;
            Ok(survival_vs_depth(&chain, &l)?.survival())
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok((l, cols))
}

pub fn ssh_sweep(args: &SshArgs, params: &ParamArgs, sum: f64, deltas: &[f64]) -> Result<Table, CliError> {
    if deltas.is_empty() {
        return Err(CliError::Config("no deltas given".into()));
    }
    let (l, cols) = ssh_sweep_series(args, params, sum, deltas)?;
    let mut names = vec!["l".to_string()];
    names.extend(deltas.iter().map(|d| format!("p_delta={}", num(*d))));
    let mut t = Table::new("ssh_sweep", &[]);
    t.columns = names;
    t.meta("cells", args.cells).meta("t1_plus_t2", num(sum));
    t.meta("g", num(params.g.unwrap_or(0.136)));
    t.meta("omega0", num(params.omega0.unwrap_or(0.01)));
    for (i, li) in l.iter().enumerate() {
        let mut row = vec![*li];
        row.extend(cols.iter().map(|c| c[i]));
        t.push_nums(&row);
    }
    Ok(t)
}

pub fn semigroup(p: &ModelParams, times: &[f64], dt: f64) -> Result<Table, CliError> {
    let t_max = times.iter().cloned().fold(0.0, f64::max);
    if times.is_empty() || !(t_max > 0.0) {
        return Err(CliError::Config("need positive test times".into()));
    }
    let cfg = VolterraConfig::new(dt, t_max, Scheme::Simpson);
    let phi = solve_volterra(p, &cfg)?.to_picture(Picture::Schrodinger, p);
    let mut t = Table::new("markov_semigroup", &["t", "max_deviation", "s_at_max", "s_points"]);
    param_header(&mut t, p);
    t.meta("oracle", "volterra").meta("dt", num(dt));
    for &ti in times {
        let r = semigroup_deviation(&phi, ti)?;
        t.push(vec![num(ti), num(r.max_deviation), num(r.s_at_max), r.s_points.to_string()]);
    }
    Ok(t)
}

pub fn zeno(p: &ModelParams, t_total: f64, n_max: usize) -> Result<Table, CliError> {
    let mut t = Table::new("markov_zeno", &["n", "q"]);
    param_header(&mut t, p);
    t.meta("oracle", "bromwich").meta("t_total", num(t_total));
    let mut n = 1usize;
    while n <= n_max.max(1) {
        t.push(vec![n.to_string(), num(zeno_protocol(p, t_total, n)?)]);
        n *= 2;
    }
    Ok(t)
}

pub fn gksl(alpha: f64, beta: f64) -> Result<Table, CliError> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let single = GkslRates {
        diagonalizable: true,
        modes: vec![GkslMode { eigenvalue: c(-alpha, 0.0), coefficients: vec![c(1.0, 0.0)] }],
    };
    let pair = GkslRates {
        diagonalizable: true,
        modes: vec![
            GkslMode { eigenvalue: c(-alpha, beta), coefficients: vec![c(0.5, 0.0)] },
            GkslMode { eigenvalue: c(-alpha, -beta), coefficients: vec![c(0.5, 0.0)] },
        ],
    };
    let jordan = GkslRates {
        diagonalizable: false,
        modes: vec![GkslMode {
            eigenvalue: c(-alpha, 0.0),
            coefficients: vec![c(1.0, 0.0), c(alpha, 0.0)],
        }],
    };
    let grid: Vec<f64> = (0..=400).map(|i| i as f64 * 0.05).collect();
    let cols = [single, pair, jordan]
        .iter()
        .map(|r| gksl_reference_survival(r, &grid))
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new("markov_gksl", &["t", "p_exponential", "p_pair", "p_jordan"]);
    t.meta("alpha", num(alpha)).meta("beta", num(beta));
    let windows = [(1.0, 4.0), (4.0, 10.0), (10.0, 20.0)];
    let slopes = window_slopes(&grid, &cols[2], &windows)?;
    t.meta(
        "jordan_loglog_slopes",
        slopes.iter().map(|s| num(*s)).collect::<Vec<_>>().join(" "),
    );
    for (i, ti) in grid.iter().enumerate() {
        t.push_nums(&[*ti, cols[0][i], cols[1][i], cols[2][i]]);
    }
    Ok(t)
}
