//! Acceptance criteria 1–13. Each criterion prints one PASS/FAIL line with the
//! measured quantities; the test fails if any criterion fails.

use std::f64::consts::PI;
use std::io::Write;

use dirac_decay::branch_cut::{asymptotic_phi, branchcut_phi, spectral_series};
use dirac_decay::markov::{semigroup_deviation, zeno_protocol};
use dirac_decay::model::to_dimensionless;
use dirac_decay::poles::{crossover_map, discriminant, quartic_roots, PoleLabel};
use dirac_decay::resolvent::{bromwich_invert, bromwich_point, default_sigma, ResolventFn};
use dirac_decay::short_time::{survival_series, survival_series_corrected, zeno_time};
use dirac_decay::ssh::{fit_power_law, linear_fit, survival_vs_depth, SshChain};
use dirac_decay::volterra::{solve_volterra, Scheme, VolterraConfig};
use dirac_decay::wavefunction::{psi_massless, psi_numeric, SpatialGrid, WaveField};
use dirac_decay::{ComplexSeries, Cutoff, ModelParams, Picture, Scaling, TimeGrid};
use num_complex::Complex64;

type Outcome = (bool, String);

fn params(omega0: f64, g: f64, m: f64, lambda: Cutoff) -> ModelParams {
    ModelParams::with_unit_hbar(omega0, g, m, lambda).unwrap()
}

fn grid(points: Vec<f64>) -> TimeGrid {
    TimeGrid::new(points, Scaling::Physical).unwrap()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    linear_fit(&lx, &ly).0
}

fn criterion_1() -> Outcome {
    let p = params(1.0, 1.0, 0.0, Cutoff::Infinite);
    let g = grid((10..=300).map(|i| i as f64 * 0.01).collect());
    let b = bromwich_invert(&ResolventFn::principal(p), &g, default_sigma(3.0)).unwrap();
    let v = solve_volterra(&p, &VolterraConfig::new(0.01, 3.0, Scheme::Simpson)).unwrap();
    let rel = |t: f64, z: Complex64| (z.norm() / (-2.0 * PI * t).exp() - 1.0).abs();
    let eb = g.points().iter().zip(&b.values).map(|(t, z)| rel(*t, *z)).fold(0.0, f64::max);
    let ev = v
        .grid
        .points()
        .iter()
        .zip(&v.values)
        .filter(|(t, _)| **t >= 0.1 - 1e-12)
        .map(|(t, z)| rel(*t, *z))
        .fold(0.0, f64::max);
    (
        eb < 1e-4 && ev < 1e-4,
        format!("max rel err bromwich {eb:.2e}, volterra {ev:.2e} (tol 1e-4)"),
    )
}

fn criterion_2() -> Outcome {
    let p = params(1.0, 1.0, 0.0, Cutoff::Infinite);
    let mut worst: f64 = 0.0;
    for t in [0.5, 1.0, 2.0] {
        let g = SpatialGrid::default_for(t).unwrap();
        let vals = g.points.iter().map(|&x| psi_massless(&p, t, x)).collect();
        let field = WaveField::new(&g, vals, t, p, true);
        let phi2 = (-4.0 * PI * to_dimensionless(t, &p)).exp();
        worst = worst.max((phi2 + field.integrated_prob - 1.0).abs());
    }
    (worst < 1e-8, format!("max |norm - 1| = {worst:.2e} (tol 1e-8)"))
}

fn criterion_3() -> Outcome {
    let mut msgs = Vec::new();
    let mut ok = true;
    let pos = ModelParams::from_ratios(1.0, 1.0, 10.0, None).unwrap();
    let set = quartic_roots(&pos).unwrap();
    let d = discriminant(1.0, 10.0);
    let imag = set.poles.len() == 4 && set.poles.iter().all(|p| p.z.re.abs() < 1e-9 * p.z.norm());
    ok &= d > 0.0 && imag;
    msgs.push(format!("(1,10) disc {d:.3e} four imaginary {imag}"));
    let neg = ModelParams::from_ratios(1.0, 1.0, 8.0, None).unwrap();
    let set = quartic_roots(&neg).unwrap();
    let d = discriminant(1.0, 8.0);
    let pair = match (set.get(PoleLabel::ResonantZPlus), set.get(PoleLabel::AntiresonantZMinus)) {
        (Some(a), Some(b)) => (a.z + b.z.conj()).norm() < 1e-9 * a.z.norm() && a.z.re.abs() > 1e-6,
        _ => false,
    };
    ok &= d < 0.0 && pair;
    msgs.push(format!("(1,8) disc {d:.3e} z+=-conj(z-) {pair}"));
    let mut bad = 0;
    for i in 0..10 {
        for j in 0..10 {
            let w = 0.5 + 3.0 * i as f64 / 9.0;
            let mu = 7.0 + 5.0 * j as f64 / 9.0;
            let p = ModelParams::from_ratios(w, 1.0, mu, None).unwrap();
            let good = match quartic_roots(&p) {
                Ok(s) => {
                    let principal: Vec<_> = s.principal().collect();
                    principal.len() == 1
                        && principal[0].label == PoleLabel::BoundZ0
                        && principal[0].z.re.abs() < 1e-9 * principal[0].z.norm()
                        && principal[0].z.norm() > 0.0
                        && principal[0].z.norm() < mu
                }
                Err(_) => false,
            };
            if !good {
                bad += 1;
            }
        }
    }
    ok &= bad == 0;
    msgs.push(format!("10x10 grid cells without a unique bound z0: {bad}"));
    (ok, msgs.join("; "))
}

fn criterion_4() -> Outcome {
    let p = params(3.0 / 11.0, (1.0f64 / 11.0).sqrt(), 1.0, Cutoff::Infinite);
    let mut lead_max: f64 = 0.0;
    let mut parts = Vec::new();
    let mut improved = true;
    for t in [10.0, 15.0, 20.0, 25.0, 30.0, 40.0, 60.0, 80.0, 100.0] {
        let bc = branchcut_phi(&p, t).unwrap();
        let e1 = (asymptotic_phi(&p, t, 1).unwrap() - bc).norm() / bc.norm();
        let e2 = (asymptotic_phi(&p, t, 2).unwrap() - bc).norm() / bc.norm();
        lead_max = lead_max.max(e1);
        if [10.0, 20.0, 40.0].contains(&t) {
            improved &= e2 < e1;
            parts.push(format!("t={t}: lead {e1:.3} next {e2:.3}"));
        }
    }
    (
        lead_max <= 0.1 && improved,
        format!(
            "max leading rel err over t in [10,100] {lead_max:.3} (tol 0.1); {}",
            parts.join(", ")
        ),
    )
}

fn criterion_5() -> Outcome {
    let p = params(1.0, 1.0, 0.0, Cutoff::Finite(5.0));
    let mut worst: f64 = 0.0;
    let mut worst2: f64 = 0.0;
    for i in 0..=20 {
        let t = 100.0 + 0.25 * i as f64;
        let bc = branchcut_phi(&p, t).unwrap();
        worst = worst.max((asymptotic_phi(&p, t, 1).unwrap() - bc).norm() / bc.norm());
        worst2 = worst2.max((asymptotic_phi(&p, t, 2).unwrap() - bc).norm() / bc.norm());
    }
    (
        worst <= 0.1,
        format!("max leading rel err on t in [100,105] {worst:.3} (tol 0.1); log-corrected form {worst2:.3}"),
    )
}

fn criterion_6() -> Outcome {
    let mut ok = true;
    let mut msgs = Vec::new();
    let massive = params(1.0, 1.0, 2.0, Cutoff::Infinite);
    let f = ResolventFn::principal(massive);
    let ts = logspace(2e-3, 2e-2, 8);
    let series = survival_series(&massive);
    let rem: Vec<f64> = ts
        .iter()
        .map(|&t| bromwich_point(&f, 1.0, t).unwrap().0.norm_sqr() - series.eval(&massive, t, 3))
        .collect();
    let s = loglog_slope(&ts, &rem);
    ok &= (s - 4.0).abs() <= 0.3;
    msgs.push(format!("no-cutoff k=3 slope {s:.3} (want 4)"));

    let cut = params(1.0, 1.0, 0.0, Cutoff::Finite(5.0));
    let f = ResolventFn::principal(cut);
    let corrected = survival_series_corrected(&cut);
    for (k, lo, hi) in [(2usize, 2e-3, 2e-2), (4, 5e-3, 3e-2)] {
        let ts = logspace(lo, hi, 8);
        let rem: Vec<f64> = ts
            .iter()
            .map(|&t| bromwich_point(&f, 1.0, t).unwrap().0.norm_sqr() - corrected.eval(&cut, t, k))
            .collect();
        let s = loglog_slope(&ts, &rem);
        ok &= (s - (k as f64 + 1.0)).abs() <= 0.3;
        msgs.push(format!("cutoff k={k} slope {s:.3} (want {})", k + 1));
    }

    let tau = 1e-2;
    let a = params(1.0, 1.0, 0.5, Cutoff::Infinite);
    let b = params(1.0, 1.0, 1.0, Cutoff::Infinite);
    let pa = bromwich_point(&ResolventFn::principal(a), 1.0, tau).unwrap().0.norm_sqr();
    let pb = bromwich_point(&ResolventFn::principal(b), 1.0, tau).unwrap().0.norm_sqr();
    let diff = (pa - pb).abs();
    ok &= diff < 1e-6;
    msgs.push(format!("m-independence |P(m=0.5)-P(m=1)| at tau=1e-2 {diff:.2e} (tol 1e-6)"));
    (ok, msgs.join("; "))
}

fn criterion_7() -> Outcome {
    let p = params(1.0, 1.0, 0.0, Cutoff::Finite(5.0));
    let tz = zeno_time(&p).unwrap();
    let time_ok = (tz - 0.2236).abs() <= 1e-4;
    let f = ResolventFn::principal(p);
    let mut worst: f64 = 0.0;
    for i in 1..=40 {
        let t = tz * i as f64 / 40.0;
        let full = 1.0 - bromwich_point(&f, 1.0, t).unwrap().0.norm_sqr();
        let quad = 4.0 * 5.0 * t * t;
        worst = worst.max((quad - full).abs() / full);
    }
    let track_ok = worst <= 0.1;
    let qs: Vec<f64> = (0..=10).map(|k| zeno_protocol(&p, 1.0, 1 << k).unwrap()).collect();
    let mono = qs.windows(2).all(|w| w[1] >= w[0]);
    let last = qs[10];
    (
        time_ok && track_ok && mono && last > 0.99,
        format!(
            "t_Zeno {tz:.6}; max rel err of 4Lt^2 vs 1-P on (0,t_Zeno] {worst:.3} (tol 0.1); \
             Q^n monotone {mono}; Q(1/1024)^1024 {last:.5} (want > 0.99)"
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut ok = true;
    let mut msgs = Vec::new();
    let cases = [
        (
            "MASSIVE_NOCUT",
            params(3.0 / 11.0, (1.0f64 / 11.0).sqrt(), 1.0, Cutoff::Infinite),
            vec![0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 12.0, 20.0, 30.0, 50.0],
            0.05,
        ),
        (
            "MASSLESS_CUT",
            params(1.0, 1.0, 0.0, Cutoff::Finite(5.0)),
            vec![0.2, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0],
            0.01,
        ),
    ];
    for (name, p, ts, dt) in cases {
        let g = grid(ts.clone());
        let spec = spectral_series(&p, &g).unwrap().total.values;
        let t_max = ts[ts.len() - 1];
        let brom = bromwich_invert(&ResolventFn::principal(p), &g, default_sigma(to_dimensionless(t_max, &p)))
            .unwrap()
            .values;
        let vol = solve_volterra(&p, &VolterraConfig::new(dt, t_max, Scheme::Simpson)).unwrap();
        let mut eb: f64 = 0.0;
        let mut ev: f64 = 0.0;
        for (k, t) in ts.iter().enumerate() {
            let idx = (t / dt).round() as usize;
            eb = eb.max((spec[k] - brom[k]).norm() / brom[k].norm());
            ev = ev.max((spec[k] - vol.values[idx]).norm() / vol.values[idx].norm());
        }
        ok &= eb < 1e-3 && ev < 1e-3;
        msgs.push(format!("{name}: vs bromwich {eb:.2e}, vs volterra {ev:.2e}"));
    }
    (ok, format!("{} (tol 1e-3)", msgs.join("; ")))
}

/// Local maxima of P with the drop to the following minimum.
fn oscillation_peaks(p: &[f64]) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for i in 1..p.len() - 1 {
        if p[i] >= p[i - 1] && p[i] > p[i + 1] {
            let mut j = i + 1;
            while j + 1 < p.len() && p[j + 1] <= p[j] {
                j += 1;
            }
            out.push((i, p[i] - p[j]));
        }
    }
    out
}

fn criterion_9() -> Outcome {
    let map = crossover_map(&[1.0, 10.0], &[5.0]);
    let (a, b) = (map[0][0].unwrap(), map[1][0].unwrap());
    let map_ok = (a - b).abs() >= 0.5 && a > 0.5 && b < 0.5;
    let ts: Vec<f64> = (1..=1000).map(|i| i as f64 * 0.05).collect();
    let g = grid(ts.clone());
    let rabi = spectral_series(&params(1.0, 1.0, 0.0, Cutoff::Finite(5.0)), &g)
        .unwrap()
        .total
        .survival();
    let peaks = oscillation_peaks(&rabi);
    let biggest = peaks.iter().map(|p| p.1).fold(0.0, f64::max);
    let comparable = peaks.iter().filter(|p| p.1 >= 0.5 * biggest).count();
    let bound = spectral_series(&params(10.0, 1.0, 0.0, Cutoff::Finite(5.0)), &g)
        .unwrap()
        .total
        .survival();
    let late: Vec<f64> = ts.iter().zip(&bound).filter(|(t, _)| **t >= 25.0).map(|(_, v)| *v).collect();
    let mean = late.iter().sum::<f64>() / late.len() as f64;
    let amp = 0.5 * (late.iter().cloned().fold(f64::MIN, f64::max) - late.iter().cloned().fold(f64::MAX, f64::min));
    (
        map_ok && comparable >= 3 && amp < 0.1 * mean,
        format!(
            "map (1,5)={a:.3} (10,5)={b:.3}; (1,5) maxima with amplitude >= half the largest: {comparable}; \
             (10,5) late amplitude/plateau {:.3e} (tol 0.1)",
            amp / mean
        ),
    )
}

fn criterion_10() -> Outcome {
    let t = 1.0;
    let grid = SpatialGrid::default_for(t).unwrap();
    let massless = |omega0: f64| {
        let p = params(omega0, 0.3, 0.0, Cutoff::Infinite);
        let vals = grid.points.iter().map(|&x| psi_massless(&p, t, x)).collect();
        WaveField::new(&grid, vals, t, p, true)
    };
    let ref_m = massless(0.09);
    let dm: Vec<f64> = [1.08, 0.9, 0.09]
        .iter()
        .map(|&m| {
            let f = psi_numeric(&params(0.09, 0.3, m, Cutoff::Infinite), t, &grid).unwrap();
            f.l2_distance(&ref_m).unwrap()
        })
        .collect();
    let ref_l = massless(1.0);
    let dl: Vec<f64> = [10.0, 30.0, 50.0]
        .iter()
        .map(|&l| {
            let f = psi_numeric(&params(1.0, 0.3, 0.0, Cutoff::Finite(l)), t, &grid).unwrap();
            f.l2_distance(&ref_l).unwrap()
        })
        .collect();
    let mono = |d: &[f64]| d.windows(2).all(|w| w[1] < w[0]);
    (
        mono(&dm) && mono(&dl),
        format!("m 1.08,0.9,0.09 -> {dm:.4?}; Lambda 10,30,50 -> {dl:.4?}"),
    )
}

fn criterion_11() -> Outcome {
    let ts = logspace(1e-3, 1e-2, 8);
    let slope = |lambda: Cutoff| {
        let p = params(1.0, 0.5, 1.0, lambda);
        let f = ResolventFn::principal(p);
        let y: Vec<f64> = ts
            .iter()
            .map(|&t| 1.0 - bromwich_point(&f, 1.0, to_dimensionless(t, &p)).unwrap().0.norm_sqr())
            .collect();
        loglog_slope(&ts, &y)
    };
    let slopes: Vec<f64> = [Cutoff::Finite(10.0), Cutoff::Finite(100.0), Cutoff::Finite(1000.0), Cutoff::Infinite]
        .into_iter()
        .map(slope)
        .collect();
    let ends = (slopes[0] - 2.0).abs() < 0.2 && (slopes[3] - 1.0).abs() < 0.2;
    let mono = slopes.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    let late: Vec<f64> = (0..=50).map(|i| 30.0 + 0.2 * i as f64).collect();
    let plateaus: Vec<f64> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&m| {
            let p = params(1.0, 0.5, m, Cutoff::Finite(10.0));
            let s = bromwich_invert(&ResolventFn::principal(p), &grid(late.clone()), default_sigma(10.0)).unwrap();
            s.survival().iter().sum::<f64>() / late.len() as f64
        })
        .collect();
    let rising = plateaus.windows(2).all(|w| w[1] > w[0]);
    (
        ends && mono && rising,
        format!(
            "1-P slopes for Lambda 10,100,1000,inf: {slopes:.3?}; plateau mean P(t in [30,40]) for m 0.5,1,2: {plateaus:.4?}"
        ),
    )
}

fn criterion_12() -> Outcome {
    let l: Vec<f64> = (1..=1500).map(|i| i as f64 * 0.1).collect();
    let gapless = SshChain::new(2000, 0.18, 0.18, 0.136, 0.01).unwrap();
    let p = survival_vs_depth(&gapless, &l).unwrap().survival();
    let (xs, ys): (Vec<f64>, Vec<f64>) = l
        .iter()
        .zip(&p)
        .filter(|(x, _)| **x >= 5.0 && **x <= 40.0)
        .map(|(x, v)| (*x, v.ln()))
        .unzip();
    let (rate, _, _, r2) = linear_fit(&xs, &ys);
    let gapped = SshChain::new(2000, 0.1805, 0.1795, 0.136, 0.01).unwrap();
    let q = survival_vs_depth(&gapped, &l).unwrap().survival();
    let (exp, err) = fit_power_law(&l, &q, 30.0, 80.0).unwrap();
    let tail: Vec<f64> = l.iter().zip(&q).filter(|(x, _)| **x > 100.0).map(|(_, v)| *v).collect();
    let tail_min = tail.iter().cloned().fold(f64::MAX, f64::min);
    let tail_max = tail.iter().cloned().fold(f64::MIN, f64::max);
    let plateau = tail_min > 0.0 && tail_max <= 10.0 * tail_min;
    (
        r2 > 0.99 && (exp + 1.5).abs() <= 0.3 && plateau,
        format!(
            "gapless log P slope {rate:.4}, R^2 {r2:.4} (want > 0.99); gapped exponent {exp:.3} +- {err:.3} \
             (want -1.5 +- 0.3); P on l > 100 in [{tail_min:.2e}, {tail_max:.2e}] (plateau needs max <= 10 min)"
        ),
    )
}

fn criterion_13() -> Outcome {
    let g = TimeGrid::uniform(5.0, 1000, Scaling::Physical).unwrap();
    let vals = g
        .points()
        .iter()
        .map(|&t| (Complex64::new(-2.0 * PI, -1.0) * t).exp())
        .collect();
    let closed = ComplexSeries::new(g, vals, Picture::Schrodinger, 0.0).unwrap();
    let dm = [1.0, 2.5, 5.0]
        .iter()
        .map(|&t| semigroup_deviation(&closed, t).unwrap().max_deviation)
        .fold(0.0, f64::max);
    let massive = params(3.0 / 11.0, (1.0f64 / 11.0).sqrt(), 1.0, Cutoff::Infinite);
    let s = solve_volterra(&massive, &VolterraConfig::new(0.02, 20.0, Scheme::Simpson))
        .unwrap()
        .to_picture(Picture::Schrodinger, &massive);
    let dmass = semigroup_deviation(&s, 20.0).unwrap().max_deviation;
    let cut = params(1.0, 1.0, 0.0, Cutoff::Finite(5.0));
    let s = solve_volterra(&cut, &VolterraConfig::new(0.002, 1.0, Scheme::Simpson))
        .unwrap()
        .to_picture(Picture::Schrodinger, &cut);
    let dcut = semigroup_deviation(&s, 1.0).unwrap().max_deviation;
    (
        dm < 1e-8 && dmass > 1e-3 && dcut > 1e-3,
        format!("Markovian {dm:.2e} (< 1e-8); massive t=20 {dmass:.3e} (> 1e-3); cutoff t=1 {dcut:.3e} (> 1e-3)"),
    )
}

#[test]
fn acceptance() {
    let criteria: [(u32, fn() -> Outcome); 13] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
        (12, criterion_12),
        (13, criterion_13),
    ];
    let mut failed = Vec::new();
    for (n, f) in criteria {
        let start = std::time::Instant::now();
        let (pass, detail) = f();
        let line = format!(
            "criterion {n}: {} ({:.1} s) {detail}\n",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
        // Written to the raw stream so the lines survive output capture.
        let _ = std::io::stderr().write_all(line.as_bytes());
        if !pass {
            failed.push(n);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
