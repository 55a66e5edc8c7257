use dirac_decay::ssh::{linear_fit, state_at_depth, survival_vs_depth, SshChain};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn evolution_is_unitary(l in 0.0f64..500.0, t1 in 0.05f64..0.3, t2 in 0.05f64..0.3, g in 0.01f64..0.3) {
        let chain = SshChain::new(50, t1, t2, g, 0.01).unwrap();
        let psi = state_at_depth(&chain, l).unwrap();
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() <= 1e-10, "{}", norm);
        let p = survival_vs_depth(&chain, &[l]).unwrap().survival()[0];
        prop_assert!((p - psi[0].norm_sqr()).abs() <= 1e-10);
    }
}

fn depths(l_max: f64, dl: f64) -> Vec<f64> {
    (0..=(l_max / dl).round() as usize).map(|i| i as f64 * dl).collect()
}

#[test]
fn doubling_the_ring_leaves_early_survival_unchanged() {
    let l = depths(100.0, 0.5);
    for (t1, t2) in [(0.18, 0.18), (0.1805, 0.1795), (0.2, 0.16)] {
        let a = survival_vs_depth(&SshChain::new(200, t1, t2, 0.136, 0.01).unwrap(), &l).unwrap().survival();
        let b = survival_vs_depth(&SshChain::new(400, t1, t2, 0.136, 0.01).unwrap(), &l).unwrap().survival();
        let d = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(d < 1e-3, "t1 = {t1}, t2 = {t2}: {d:.3e}");
    }
}

/// First depth after the initial decay at which P climbs back above 0.1.
fn revival_onset(n: usize) -> f64 {
    let l = depths(1500.0, 0.5);
    let p = survival_vs_depth(&SshChain::new(n, 0.18, 0.18, 0.136, 0.01).unwrap(), &l).unwrap().survival();
    let decayed = p.iter().position(|v| *v < 0.01).expect("initial decay");
    let k = (decayed..p.len()).find(|&i| p[i] > 0.1).expect("revival");
    l[k]
}

#[test]
fn revival_onset_scales_linearly_with_ring_size() {
    let ns = [20.0, 40.0, 80.0];
    let onsets: Vec<f64> = [20, 40, 80].iter().map(|&n| revival_onset(n)).collect();
    let (slope, intercept, _, r2) = linear_fit(&ns, &onsets);
    assert!(r2 > 0.99, "onsets {onsets:?}, R^2 {r2}");
    assert!(intercept.abs() < 0.2 * onsets[0], "onsets {onsets:?}, intercept {intercept}");
    // Fastest group velocity on the ring is t (t1 = t2 = t); the wave front
    // needs N/t to circle it.
    assert!((slope * 0.18 - 1.0).abs() < 0.25, "slope {slope}");
}

#[test]
fn gapless_rate_matches_golden_rule() {
    let (t, g, w0) = (0.18, 0.136, 0.01);
    let l = depths(40.0, 0.1);
    let p = survival_vs_depth(&SshChain::new(2000, t, t, g, w0).unwrap(), &l).unwrap().survival();
    let (xs, ys): (Vec<f64>, Vec<f64>) = l
        .iter()
        .zip(&p)
        .filter(|(x, _)| **x >= 5.0)
        .map(|(x, v)| (*x, v.ln()))
        .unzip();
    let rate = -linear_fit(&xs, &ys).0;
    let v_g = t * (1.0 - (w0 / (2.0 * t)).powi(2)).sqrt();
    let golden = g * g / v_g;
    assert!((rate / golden - 1.0).abs() < 0.1, "fitted {rate:.4}, golden rule {golden:.4}");
}
