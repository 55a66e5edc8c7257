//! Named figure and table reproductions with fixed parameter sets.

use dirac_decay::branch_cut::{asymptotic_phi, branchcut_series, spectral_series};
use dirac_decay::markov::window_slopes;
use dirac_decay::model::to_dimensionless;
use dirac_decay::poles::{crossover_map, quartic_roots, residue_phi_z0};
use dirac_decay::resolvent::{bromwich_invert, bromwich_point, default_sigma, ResolventFn};
use dirac_decay::short_time::{survival_series, survival_series_corrected};
use dirac_decay::ssh::{envelope_indices, linear_fit};
use dirac_decay::wavefunction::{psi_massless, psi_numeric, SpatialGrid};
use dirac_decay::{Cutoff, ModelParams, Scaling, TimeGrid};

use crate::commands::{param_header, ssh_sweep_series};
use crate::error::CliError;
use crate::output::{num, Table};
use crate::{ParamArgs, SshArgs};

pub const SCENARIOS: [&str; 9] = [
    "fig4", "fig5", "fig8", "fig9", "fig10", "fig11", "fig12", "fig13", "table1",
];

pub fn run_scenario(name: &str) -> Result<Vec<Table>, CliError> {
    let mut tables = match name {
        "fig4" => fig4()?,
        "fig5" => fig5()?,
        "fig8" => fig8()?,
        "fig9" => fig9()?,
        "fig10" => fig10()?,
        "fig11" => fig11()?,
        "fig12" => fig12()?,
        "fig13" => fig13()?,
        "table1" => table1()?,
        other => return Err(CliError::UnknownScenario(other.to_string())),
    };
    for t in &mut tables {
        t.header.insert(1, ("scenario".into(), name.into()));
    }
    Ok(tables)
}

fn params(omega0: f64, g: f64, m: f64, lambda: Cutoff) -> Result<ModelParams, CliError> {
    Ok(ModelParams::with_unit_hbar(omega0, g, m, lambda)?)
}

fn grid(points: Vec<f64>) -> Result<TimeGrid, CliError> {
    Ok(TimeGrid::new(points, Scaling::Physical)?)
}

fn range(a: f64, b: f64, step: f64) -> Vec<f64> {
    let n = ((b - a) / step).round() as usize;
    (0..=n).map(|i| a + step * i as f64).collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// |Φ_BC|² with both asymptotic orders.
fn asymptote_table(name: &str, p: &ModelParams, ts: Vec<f64>) -> Result<Table, CliError> {
    let g = grid(ts)?;
    let bc = branchcut_series(p, &g)?;
    let mut t = Table::new(name, &["t", "p_bc", "p_asym1", "p_asym2"]);
    param_header(&mut t, p);
    t.meta("method", "branch_cut+asymptotic").meta("cut_tolerance", "1e-8");
    for (ti, v) in g.points().iter().zip(&bc) {
        let a1 = asymptotic_phi(p, *ti, 1)?;
        let a2 = asymptotic_phi(p, *ti, 2)?;
        t.push_nums(&[*ti, v.norm_sqr(), a1.norm_sqr(), a2.norm_sqr()]);
    }
    Ok(t)
}

fn fig4() -> Result<Vec<Table>, CliError> {
    let p = params(3.0 / 11.0, (1.0f64 / 11.0).sqrt(), 1.0, Cutoff::Infinite)?;
    Ok(vec![asymptote_table("fig4", &p, range(1.0, 100.0, 0.5))?])
}

fn fig5() -> Result<Vec<Table>, CliError> {
    let ts = range(0.0, 10.0, 0.05);
    let g = grid(ts.clone())?;
    let mut cols = vec!["t".to_string()];
    let mut data = Vec::new();
    let mut t = Table::new("fig5", &[]);
    t.meta("g", "1").meta("m", "11").meta("lambda", "inf").meta("hbar", "1");
    t.meta("method", "bromwich+pole_z0");
    for w in [1.0, 2.0, 3.0] {
        let p = params(w, 1.0, 11.0, Cutoff::Infinite)?;
        let s = bromwich_invert(&ResolventFn::principal(p), &g, default_sigma(10.0))?;
        let poles = quartic_roots(&p)?;
        let z0 = residue_phi_z0(&p, &poles, 1.0)?.norm_sqr();
        cols.push(format!("p_omega0={w}"));
        cols.push(format!("p_z0_omega0={w}"));
        t.meta(&format!("error_bound_omega0_{w}"), num(s.error_bound));
        data.push((s.survival(), z0));
    }
    t.columns = cols;
    for (i, ti) in ts.iter().enumerate() {
        let mut row = vec![*ti];
        for (p, z0) in &data {
            row.push(p[i]);
            row.push(*z0);
        }
        t.push_nums(&row);
    }
    Ok(vec![t])
}

fn fig8() -> Result<Vec<Table>, CliError> {
    let wg: Vec<f64> = range(0.5, 15.0, 0.5);
    let lg: Vec<f64> = range(0.5, 10.0, 0.5);
    let map = crossover_map(&wg, &lg);
    let mut m = Table::new("fig8_map", &[]);
    m.meta("quantity", "exp(-|x1-x2|)").meta("rows", "omega0/g^2").meta("columns", "lambda/g^2");
    m.columns = std::iter::once("w".to_string())
        .chain(lg.iter().map(|l| format!("L={}", num(*l))))
        .collect();
    for (w, row) in wg.iter().zip(&map) {
        let mut r = vec![num(*w)];
        r.extend(row.iter().map(|c| c.map(num).unwrap_or_default()));
        m.push(r);
    }
    let ts = range(0.05, 50.0, 0.05);
    let g = grid(ts.clone())?;
    let mut s = Table::new(
        "fig8_survival",
        &["t", "p_w1", "p_pole_w1", "p_bc_w1", "p_w10", "p_pole_w10", "p_bc_w10"],
    );
    s.meta("g", "1").meta("m", "0").meta("lambda", "5").meta("hbar", "1");
    s.meta("omega0", "1 10").meta("method", "spectral");
    let a = spectral_series(&params(1.0, 1.0, 0.0, Cutoff::Finite(5.0))?, &g)?;
    let b = spectral_series(&params(10.0, 1.0, 0.0, Cutoff::Finite(5.0))?, &g)?;
    for (i, ti) in ts.iter().enumerate() {
        s.push_nums(&[
            *ti,
            a.total.values[i].norm_sqr(),
            a.pole[i].norm_sqr(),
            a.branch_cut[i].norm_sqr(),
            b.total.values[i].norm_sqr(),
            b.pole[i].norm_sqr(),
            b.branch_cut[i].norm_sqr(),
        ]);
    }
    Ok(vec![m, s])
}

fn fig9() -> Result<Vec<Table>, CliError> {
    let p = params(1.0, 1.0, 0.0, Cutoff::Finite(5.0))?;
    Ok(vec![asymptote_table("fig9", &p, range(1.0, 105.0, 0.25))?])
}

fn fig10() -> Result<Vec<Table>, CliError> {
    let p = params(1.0, 1.0, 0.0, Cutoff::Finite(5.0))?;
    let ts = logspace(1e-3, 1.0, 61);
    let nominal = survival_series(&p);
    let corrected = survival_series_corrected(&p);
    let f = ResolventFn::principal(p);
    let mut t = Table::new(
        "fig10",
        &["t", "one_minus_p", "series_order2", "series_order4", "series_order4_nominal"],
    );
    param_header(&mut t, &p);
    t.meta("method", "bromwich+series").meta("zeno_time", num(0.5 / 5f64.sqrt()));
    for ti in ts {
        let (phi, _) = bromwich_point(&f, 1.0, to_dimensionless(ti, &p))?;
        t.push_nums(&[
            ti,
            1.0 - phi.norm_sqr(),
            1.0 - corrected.eval(&p, ti, 2),
            1.0 - corrected.eval(&p, ti, 4),
            1.0 - nominal.eval(&p, ti, 4),
        ]);
    }
    Ok(vec![t])
}

fn fig11() -> Result<Vec<Table>, CliError> {
    let t_eval = 1.0;
    let grid = SpatialGrid::default_for(t_eval)?;
    let lambdas = [10.0, 30.0, 50.0];
    let mut cols = vec![];
    for l in lambdas {
        let p = params(1.0, 0.3, 0.0, Cutoff::Finite(l))?;
        cols.push(psi_numeric(&p, t_eval, &grid)?);
    }
    let pm = params(1.0, 0.3, 0.0, Cutoff::Infinite)?;
    let mut t = Table::new("fig11", &["x", "abs2_L10", "abs2_L30", "abs2_L50", "abs2_massless"]);
    t.meta("omega0", "1").meta("g", "0.3").meta("m", "0").meta("hbar", "1");
    t.meta("t", num(t_eval)).meta("method", "numeric+closed_form");
    for (i, x) in grid.points.iter().enumerate() {
        t.push_nums(&[
            *x,
            cols[0].values[i].norm_sqr(),
            cols[1].values[i].norm_sqr(),
            cols[2].values[i].norm_sqr(),
            psi_massless(&pm, t_eval, *x).norm_sqr(),
        ]);
    }
    Ok(vec![t])
}

fn fig12() -> Result<Vec<Table>, CliError> {
    let ms = [0.5, 1.0, 2.0];
    let cutoffs = [Cutoff::Finite(10.0), Cutoff::Infinite];
    let long_ts = range(0.0, 20.0, 0.2);
    let short_ts = logspace(1e-3, 1.0, 31);
    let mut long = Table::new("fig12_long", &[]);
    let mut short = Table::new("fig12_short", &[]);
    for t in [&mut long, &mut short] {
        t.meta("omega0", "1").meta("g", "0.5").meta("hbar", "1").meta("method", "bromwich");
    }
    let mut lcols = vec!["t".to_string()];
    let mut scols = vec!["t".to_string()];
    let mut ldata = Vec::new();
    let mut sdata = Vec::new();
    for lam in cutoffs {
        for m in ms {
            let p = params(1.0, 0.5, m, lam)?;
            let tag = format!("m={m}_lambda={}", p.to_kv().iter().find(|(k, _)| k == "lambda").unwrap().1);
            let f = ResolventFn::principal(p);
            let s = bromwich_invert(&f, &grid(long_ts.clone())?, default_sigma(to_dimensionless(20.0, &p)))?;
            lcols.push(format!("p_{tag}"));
            ldata.push(s.survival());
            let sg = grid(short_ts.clone())?;
            let s = bromwich_invert(&f, &sg, 1.0)?;
            scols.push(format!("one_minus_p_{tag}"));
            sdata.push(s.survival().iter().map(|v| 1.0 - v).collect::<Vec<_>>());
        }
    }
    long.columns = lcols;
    short.columns = scols;
    for (i, ti) in long_ts.iter().enumerate() {
        let mut row = vec![*ti];
        row.extend(ldata.iter().map(|c| c[i]));
        long.push_nums(&row);
    }
    for (i, ti) in short_ts.iter().enumerate() {
        let mut row = vec![*ti];
        row.extend(sdata.iter().map(|c| c[i]));
        short.push_nums(&row);
    }
    Ok(vec![long, short])
}

fn fig13() -> Result<Vec<Table>, CliError> {
    let args = SshArgs { cells: 2000, lmax: 150.0, dl: 0.5 };
    let pa = ParamArgs {
        config: None,
        omega0: Some(0.01),
        g: Some(0.136),
        m: None,
        lambda: None,
        hbar: None,
    };
    let deltas = [0.0, 0.001, 0.0025];
    let (l, cols) = ssh_sweep_series(&args, &pa, 0.36, &deltas)?;
    let mut t = Table::new("fig13", &["l", "p_delta=0", "p_delta=0.001", "p_delta=0.0025"]);
    t.meta("cells", 2000).meta("g", "0.136").meta("omega0", "0.01").meta("t1_plus_t2", "0.36");
    for (i, li) in l.iter().enumerate() {
        t.push_nums(&[*li, cols[0][i], cols[1][i], cols[2][i]]);
    }
    Ok(vec![t])
}

/// Fitted short-time slope and long-time profile per regime.
fn table1() -> Result<Vec<Table>, CliError> {
    let cases = [
        params(1.0, 1.0, 0.0, Cutoff::Infinite)?,
        params(3.0 / 11.0, (1.0f64 / 11.0).sqrt(), 1.0, Cutoff::Infinite)?,
        params(1.0, 1.0, 0.0, Cutoff::Finite(5.0))?,
        params(1.0, 0.5, 1.0, Cutoff::Finite(10.0))?,
    ];
    let mut t = Table::new(
        "table1",
        &[
            "regime",
            "short_loglog_slope",
            "long_quantity",
            "long_loglog_slope",
            "long_loglog_r2",
            "long_semilog_r2",
            "long_profile",
        ],
    );
    t.meta("short_window", "t in [1e-3, 1e-2], quantity 1-P");
    t.meta("long_window", "tau in [20, 200] envelope maxima");
    for p in &cases {
        let f = ResolventFn::principal(*p);
        let ts = logspace(1e-3, 1e-2, 10);
        let one_minus: Vec<f64> = ts
            .iter()
            .map(|&ti| bromwich_point(&f, 1.0, to_dimensionless(ti, p)).map(|(v, _)| 1.0 - v.norm_sqr()))
            .collect::<Result<_, _>>()?;
        let short = window_slopes(&ts, &one_minus, &[(1e-3, 1e-2)])?[0];

        let taus = range(20.0, 200.0, 0.25);
        let phys: Vec<f64> = taus.iter().map(|tau| tau * p.hbar() / p.g2()).collect();
        let (quantity, values): (&str, Vec<f64>) = match p.regime() {
            dirac_decay::Regime::MasslessNocut => (
                "P",
                taus.iter().map(|tau| (-4.0 * std::f64::consts::PI * tau).exp()).collect(),
            ),
            dirac_decay::Regime::General => {
                let s = bromwich_invert(&f, &grid(phys.clone())?, 1.0 / 200.0)?;
                let surv = s.survival();
                let mean = surv.iter().sum::<f64>() / surv.len() as f64;
                ("|P-mean(P)|", surv.iter().map(|v| (v - mean).abs()).collect())
            }
            _ => (
                "|Phi_BC|^2",
                branchcut_series(p, &grid(phys.clone())?)?.iter().map(|v| v.norm_sqr()).collect(),
            ),
        };
        let env = envelope_indices(&values);
        let pick: Vec<usize> = env.into_iter().filter(|&i| values[i] > 0.0).collect();
        let ln_v: Vec<f64> = pick.iter().map(|&i| values[i].ln()).collect();
        let ln_t: Vec<f64> = pick.iter().map(|&i| phys[i].ln()).collect();
        let lin_t: Vec<f64> = pick.iter().map(|&i| phys[i]).collect();
        let (slope, _, _, r2_log) = linear_fit(&ln_t, &ln_v);
        let (_, _, _, r2_lin) = linear_fit(&lin_t, &ln_v);
        let profile = if r2_lin >= r2_log { "exponential" } else { "power_law" };
        t.push(vec![
            p.regime().to_string(),
            num(short),
            quantity.to_string(),
            num(slope),
            num(r2_log),
            num(r2_lin),
            profile.to_string(),
        ]);
    }
    Ok(vec![t])
}
