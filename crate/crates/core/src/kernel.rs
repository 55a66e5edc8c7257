//! Memory kernel of the amplitude equation and its double time integral.
//!
//! Internally everything is dimensionless: with τ = g²t/ħ the kernel is
//! 𝒦(t) = (g⁴/ħ²)·k(τ) and the delta part contributes an instantaneous
//! amplitude decay rate γ = 2π.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{DecayError, Result};
use crate::model::{to_dimensionless, Cutoff, ModelParams, Regime};
use crate::quad;

/// Representation of the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelForm {
    ClosedDelta,
    ClosedBessel,
    ClosedSinc,
    Quadrature,
}

/// Kernel evaluator bound to a parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub params: ModelParams,
    pub form: KernelForm,
}

impl KernelSpec {
    /// Checks that the form is admissible for the regime.
    pub fn new(params: ModelParams, form: KernelForm) -> Result<Self> {
        let regime = params.regime();
        let ok = match form {
            KernelForm::ClosedDelta => regime == Regime::MasslessNocut,
            KernelForm::ClosedBessel => regime == Regime::MassiveNocut,
            KernelForm::ClosedSinc => regime == Regime::MasslessCut,
            KernelForm::Quadrature => !params.lambda().is_infinite(),
        };
        if !ok {
            return Err(DecayError::Regime {
                regime: regime.to_string(),
                reason: format!("kernel form {form:?} not admissible"),
            });
        }
        Ok(Self { params, form })
    }

    /// The closed form of the regime, or quadrature in the general case.
    pub fn natural(params: ModelParams) -> Self {
        let form = match params.regime() {
            Regime::MasslessNocut => KernelForm::ClosedDelta,
            Regime::MassiveNocut => KernelForm::ClosedBessel,
            Regime::MasslessCut => KernelForm::ClosedSinc,
            Regime::General => KernelForm::Quadrature,
        };
        Self { params, form }
    }

    /// Dimensionless amplitude decay rate carried by the delta part.
    pub fn delta_rate(&self) -> f64 {
        match self.form {
            KernelForm::ClosedDelta | KernelForm::ClosedBessel => 2.0 * PI,
            _ => 0.0,
        }
    }

    /// Regular part k(u) of the dimensionless kernel; u ≥ 0 (u = 0 is the limit).
    pub fn eval_dimensionless(&self, u: f64) -> Complex64 {
        let d = self.params.dimensionless();
        let phase = Complex64::from_polar(1.0, d.w * u);
        match self.form {
            KernelForm::ClosedDelta => Complex64::new(0.0, 0.0),
            KernelForm::ClosedBessel => phase * (2.0 * PI * d.mu * bessel_j1(d.mu * u)),
            KernelForm::ClosedSinc => {
                let l = d.lambda.expect("finite cutoff");
                let s = if u == 0.0 { l } else { (l * u).sin() / u };
                phase * (-4.0 * s)
            }
            KernelForm::Quadrature => {
                let l = d.lambda.expect("finite cutoff");
                phase * (-4.0 * cos_dispersion_integral(l, d.mu, u))
            }
        }
    }
}

/// J₁(x).
pub fn bessel_j1(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        return 0.5 * x;
    }
    puruspe::besseljy(1.0, x).0
}

/// ∫_0^L cos(√(q²+μ²)·u) dq with panels split at the zeros of the cosine.
pub fn cos_dispersion_integral(l: f64, mu: f64, u: f64) -> f64 {
    if u == 0.0 {
        return l;
    }
    let mut bp = vec![0.0];
    let ua = u.abs();
    let mut k = 0usize;
    loop {
        let arg = (k as f64 + 0.5) * PI / ua;
        if arg > mu {
            let q = (arg * arg - mu * mu).sqrt();
            if q >= l {
                break;
            }
            if q > 0.0 {
                bp.push(q);
            }
        }
        k += 1;
        if k > 2_000_000 {
            break;
        }
    }
    bp.push(l);
    let f = |q: f64| ((q * q + mu * mu).sqrt() * u).cos();
    let (v, _, _) = quad::adaptive_real(&f, &bp, 1e-14 * l.max(1.0), 1e-12, bp.len() * 8 + 200);
    v
}

/// 𝒦(t) in physical units; t > 0.
pub fn kernel_eval(spec: &KernelSpec, t: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(DecayError::Domain(format!("kernel_eval needs t > 0, got {t}")));
    }
    if spec.form == KernelForm::Quadrature && spec.params.lambda() == Cutoff::Infinite {
        return Err(DecayError::Regime {
            regime: spec.params.regime().to_string(),
            reason: "quadrature kernel needs a finite cutoff".into(),
        });
    }
    let p = &spec.params;
    let scale = p.g2() * p.g2() / (p.hbar() * p.hbar());
    Ok(spec.eval_dimensionless(to_dimensionless(t, p)) * scale)
}

/// ∫_0^t ds ∫_0^{t-s} du 𝒦(u), including the delta contribution −2πτ.
pub fn kernel_double_integral(spec: &KernelSpec, t: f64) -> Result<Complex64> {
    if !(t >= 0.0) {
        return Err(DecayError::Domain(format!("negative time {t}")));
    }
    if t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let tau = to_dimensionless(t, &spec.params);
    Ok(double_integral_dimensionless(spec, tau))
}

pub(crate) fn double_integral_dimensionless(spec: &KernelSpec, tau: f64) -> Complex64 {
    let delta = Complex64::new(-spec.delta_rate() * tau, 0.0);
    if spec.form == KernelForm::ClosedDelta {
        return delta;
    }
    let d = spec.params.dimensionless();
    let freq = d.w.abs() + d.mu + d.lambda.unwrap_or(0.0) + 1.0;
    let n = ((tau * freq / 1.0).ceil() as usize).clamp(4, 200_000);
    let f = |u: f64| spec.eval_dimensionless(u) * (tau - u);
    let r = quad::adaptive_uniform(&f, 0.0, tau, n, 1e-15, 1e-13, 4 * n + 1000);
    r.value + delta
}
