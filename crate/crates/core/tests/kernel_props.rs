use dirac_decay::kernel::{kernel_double_integral, kernel_eval, KernelForm, KernelSpec};
use dirac_decay::ssh::linear_fit;
use dirac_decay::{Cutoff, ModelParams};
use proptest::prelude::*;

fn p(m: f64, lambda: Cutoff) -> ModelParams {
    ModelParams::with_unit_hbar(1.0, 1.0, m, lambda).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn quadrature_matches_sinc(t in 1e-3f64..=10.0) {
        let params = p(0.0, Cutoff::Finite(5.0));
        let q = kernel_eval(&KernelSpec::new(params, KernelForm::Quadrature).unwrap(), t).unwrap();
        let s = kernel_eval(&KernelSpec::natural(params), t).unwrap();
        prop_assert!((q - s).norm() <= 1e-10 * s.norm(), "t={} q={} s={}", t, q, s);
    }
}

/// With the finite-Λ sinc part of the delta removed, the quadrature kernel
/// approaches the Bessel closed form as Λ doubles.
#[test]
fn quadrature_approaches_bessel() {
    let bessel = KernelSpec::natural(p(1.0, Cutoff::Infinite));
    let devs: Vec<f64> = [100.0, 200.0, 400.0, 800.0]
        .iter()
        .map(|&l| {
            let q = KernelSpec::new(p(1.0, Cutoff::Finite(l)), KernelForm::Quadrature).unwrap();
            let sinc = KernelSpec::natural(p(0.0, Cutoff::Finite(l)));
            (0..=490)
                .map(|i| {
                    let t = 0.1 + 0.01 * i as f64;
                    let d = kernel_eval(&q, t).unwrap()
                        - kernel_eval(&sinc, t).unwrap()
                        - kernel_eval(&bessel, t).unwrap();
                    d.norm()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(devs.windows(2).all(|w| w[1] < w[0]), "{devs:?}");
}

#[test]
fn double_integral_remainder_is_quartic() {
    let spec = KernelSpec::natural(p(1.0, Cutoff::Infinite));
    let ts: Vec<f64> = (0..9).map(|i| 1e-3 * 10f64.powf(i as f64 / 4.0)).collect();
    let rem: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let series = -2.0 * std::f64::consts::PI * t + std::f64::consts::PI / 6.0 * t.powi(3);
            let v = kernel_double_integral(&spec, t).unwrap();
            (v.re - series).hypot(v.im)
        })
        .collect();
    let lx: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = rem.iter().map(|r| r.ln()).collect();
    let (slope, ..) = linear_fit(&lx, &ly);
    assert!((slope - 4.0).abs() <= 0.2, "slope {slope}, remainders {rem:?}");
}

#[test]
fn kernel_examples() {
    let sinc = KernelSpec::natural(p(0.0, Cutoff::Finite(5.0)));
    assert!((kernel_eval(&sinc, 1e-7).unwrap().norm() - 20.0).abs() < 1e-6);
    let bessel = KernelSpec::natural(p(1.0, Cutoff::Infinite));
    assert!(kernel_eval(&bessel, 1e-9).unwrap().norm() < 1e-6);
    assert_eq!(kernel_double_integral(&bessel, 0.0).unwrap().norm(), 0.0);
    let delta = KernelSpec::natural(p(0.0, Cutoff::Infinite));
    let v = kernel_double_integral(&delta, 0.7).unwrap();
    assert!((v.re + 2.0 * std::f64::consts::PI * 0.7).abs() < 1e-14 && v.im.abs() < 1e-14);
    assert!(kernel_eval(&sinc, 0.0).is_err());
    assert!(KernelSpec::new(p(0.0, Cutoff::Infinite), KernelForm::Quadrature).is_err());
}
