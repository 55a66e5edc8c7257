//! Branch-cut contributions Φ_BC(t) and their long-time expansions.
//!
//! Each cut runs from a branch point ±ic to −∞ parallel to the real axis. With
//! ζ = −v ± ic and J = F(just above) − F(just below), the cut part of the
//! Bromwich integral is −e^{iwτ}/(2πi)·Σ_cuts e^{±icτ}∫₀^∞ e^{−vτ}J(v) dv.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{DecayError, Result};
use crate::model::{to_dimensionless, ComplexSeries, ModelParams, Picture, Regime, Scaling, TimeGrid};
use crate::poles::{find_poles, principal_pole_sum, quartic_eval};
use crate::quad;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Which of the two horizontal cuts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cut {
    /// Cut from +ic.
    Upper,
    /// Cut from −ic.
    Lower,
}

impl Cut {
    fn sign(self) -> f64 {
        match self {
            Cut::Upper => 1.0,
            Cut::Lower => -1.0,
        }
    }
}

/// Sheet-jump function of one regime along its cuts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpFn {
    pub regime: Regime,
    /// ω₀/g².
    pub w: f64,
    /// Branch-point height: m/g² (massive) or Λ/g² (cutoff).
    pub c: f64,
}

impl JumpFn {
    pub fn new(params: &ModelParams) -> Result<Self> {
        let d = params.dimensionless();
        let c = match params.regime() {
            Regime::MassiveNocut => d.mu,
            Regime::MasslessCut => d.lambda.expect("finite cutoff"),
            r => {
                return Err(DecayError::Regime {
                    regime: r.to_string(),
                    reason: "branch-cut decomposition needs MASSIVE_NOCUT or MASSLESS_CUT".into(),
                })
            }
        };
        Ok(Self {
            regime: params.regime(),
            w: d.w,
            c,
        })
    }

    /// Cut point ζ = −v ± ic.
    pub fn point(&self, cut: Cut, v: f64) -> Complex64 {
        Complex64::new(-v, cut.sign() * self.c)
    }

    /// J(v) = F(ζ + i0) − F(ζ − i0) for v > 0.
    pub fn eval(&self, cut: Cut, v: f64) -> Complex64 {
        let zeta = self.point(cut, v);
        match self.regime {
            Regime::MassiveNocut => {
                let s_above = self.massive_sqrt_above(cut, v);
                let (p, _) = quartic_eval(self.w, self.c, zeta);
                -4.0 * PI * zeta * s_above / p
            }
            _ => {
                let g = self.cutoff_denominator_above(cut, v);
                match cut {
                    Cut::Upper => g.inv() - (g + 4.0 * PI).inv(),
                    Cut::Lower => g.inv() - (g - 4.0 * PI).inv(),
                }
            }
        }
    }

    /// √(ζ−iμ)√(ζ+iμ) evaluated from above the cut.
    fn massive_sqrt_above(&self, cut: Cut, v: f64) -> Complex64 {
        let root_v = I * v.sqrt();
        match cut {
            Cut::Upper => root_v * Complex64::new(-v, 2.0 * self.c).sqrt(),
            Cut::Lower => Complex64::new(-v, -2.0 * self.c).sqrt() * root_v,
        }
    }

    /// ζ + iw + 4 arctan(L/ζ) from above the cut.
    fn cutoff_denominator_above(&self, cut: Cut, v: f64) -> Complex64 {
        let zeta = self.point(cut, v);
        let l = self.c;
        let log_at_cut = Complex64::new(v.ln(), PI);
        let bracket = match cut {
            Cut::Upper => (zeta + I * l).ln() - log_at_cut,
            Cut::Lower => log_at_cut - (zeta - I * l).ln(),
        };
        zeta + I * self.w - 2.0 * I * bracket
    }

    /// Leading coefficients (f₀, f₁) with J(v) = √v(f₀ + f₁v + ...), massive only.
    fn massive_series(&self, cut: Cut) -> (Complex64, Complex64) {
        let s = cut.sign();
        let mu = self.c;
        let zeta = Complex64::new(0.0, s * mu);
        let inner = Complex64::new(0.0, 2.0 * s * mu);
        let (p, dp) = quartic_eval(self.w, mu, zeta);
        let f0 = -4.0 * PI * zeta * I * inner.sqrt() / p;
        // d/dv ln f with dζ/dv = −1.
        let dlog = -zeta.inv() - 0.5 * inner.inv() + dp / p;
        (f0, f0 * dlog)
    }
}

/// Truncation point of the damped v-integral.
fn truncation(tau: f64) -> f64 {
    // e^{−Rτ} < 1e−12.
    (12.0 * 10f64.ln() / tau).max(50.0)
}

/// ∫₀^∞ e^{−vτ}J(v) dv along one cut and its error estimate.
fn cut_integral(jump: &JumpFn, cut: Cut, tau: f64) -> Result<(Complex64, f64)> {
    let r = truncation(tau);
    let res = match jump.regime {
        Regime::MassiveNocut => {
            // v = s² removes the √v endpoint behavior.
            let smax = r.sqrt();
            let f = |s: f64| {
                if s <= 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let v = s * s;
                jump.eval(cut, v) * (2.0 * s * (-v * tau).exp())
            };
            let mut bps: Vec<f64> = (0..40).rev().map(|k| smax * 0.5f64.powi(k)).collect();
            bps.insert(0, 0.0);
            quad::adaptive(&f, &bps, 1e-13, 1e-11, 20_000)
        }
        _ => {
            let f = |v: f64| {
                if v <= 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                jump.eval(cut, v) * (-v * tau).exp()
            };
            let mut bps: Vec<f64> = (0..120).rev().map(|k| r * 0.5f64.powi(k)).collect();
            bps.insert(0, 0.0);
            quad::adaptive(&f, &bps, 1e-13, 1e-11, 20_000)
        }
    };
    if !res.converged || res.error > 1e-8 {
        return Err(DecayError::Quadrature {
            level: format!("branch-cut integral at tau = {tau} (R = {r})"),
            estimate: res.error,
            tolerance: 1e-8,
        });
    }
    Ok((res.value, res.error))
}

/// Φ_BC at dimensionless time τ.
pub fn branchcut_phi_dimensionless(jump: &JumpFn, tau: f64) -> Result<Complex64> {
    if !(tau > 0.0) {
        return Err(DecayError::Domain(format!("branch-cut time must be > 0, got {tau}")));
    }
    let (iu, _) = cut_integral(jump, Cut::Upper, tau)?;
    let (il, _) = cut_integral(jump, Cut::Lower, tau)?;
    let c = jump.c;
    let sum = Complex64::from_polar(1.0, c * tau) * iu + Complex64::from_polar(1.0, -c * tau) * il;
    Ok(-Complex64::from_polar(1.0, jump.w * tau) * sum / (2.0 * PI * I))
}

/// Φ_BC(t) for the MASSIVE_NOCUT or MASSLESS_CUT regime (t physical).
pub fn branchcut_phi(params: &ModelParams, t: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(DecayError::Domain(format!("t must be > 0, got {t}")));
    }
    let jump = JumpFn::new(params)?;
    branchcut_phi_dimensionless(&jump, to_dimensionless(t, params))
}

/// Φ_BC over a grid, parallel over t.
pub fn branchcut_series(params: &ModelParams, grid: &TimeGrid) -> Result<Vec<Complex64>> {
    let jump = JumpFn::new(params)?;
    let taus = grid.to_scaling(Scaling::Dimensionless, params);
    taus.points()
        .par_iter()
        .map(|&tau| branchcut_phi_dimensionless(&jump, tau))
        .collect()
}

/// Spectral decomposition over a physical grid: total Φ with its pole and cut parts.
pub struct SpectralSeries {
    pub total: ComplexSeries,
    pub pole: Vec<Complex64>,
    pub branch_cut: Vec<Complex64>,
}

/// Φ = Σ principal residues + Φ_BC on a grid of positive physical times.
pub fn spectral_series(params: &ModelParams, grid: &TimeGrid) -> Result<SpectralSeries> {
    let poles = find_poles(params)?;
    let phys = grid.to_scaling(Scaling::Physical, params);
    let branch_cut = branchcut_series(params, &phys)?;
    let pole: Vec<Complex64> = phys
        .points()
        .iter()
        .map(|&t| principal_pole_sum(params, &poles, t))
        .collect();
    let values = pole.iter().zip(&branch_cut).map(|(a, b)| a + b).collect();
    // Each cut integral is accepted only below 1e-8 absolute error.
    let total = ComplexSeries::new(phys, values, Picture::Interaction, 1e-8)?;
    Ok(SpectralSeries { total, pole, branch_cut })
}

/// Long-time expansion of Φ_BC (t physical), order 1 or 2.
///
/// Massive: order 1 is −e^{iwτ}(4πμ)^{−1/2}π^{−1}τ^{−3/2}[cos μτ + sin μτ]; order 2
/// adds the τ^{−5/2} term from the next coefficient of J(v)/√v at the branch point.
/// Cutoff: order 1 is e^{iwτ}(−4 sin Lτ)/[(w − 2πi)(w − 6πi)τ]; order 2 replaces
/// it by the logarithmic Watson estimate J(e^{−γ}/τ)/τ on each cut.
pub fn asymptotic_phi(params: &ModelParams, t: f64, order: u32) -> Result<Complex64> {
    if !(1..=2).contains(&order) {
        return Err(DecayError::InvalidParam(format!("order must be 1 or 2, got {order}")));
    }
    if !(t > 0.0) {
        return Err(DecayError::Domain(format!("t must be > 0, got {t}")));
    }
    let jump = JumpFn::new(params)?;
    let tau = to_dimensionless(t, params);
    let phase = Complex64::from_polar(1.0, jump.w * tau);
    let c = jump.c;
    match jump.regime {
        Regime::MassiveNocut => {
            let mu = c;
            let lead = -(1.0 / (4.0 * mu * PI.powi(3))).sqrt()
                * tau.powf(-1.5)
                * ((mu * tau).cos() + (mu * tau).sin());
            let mut val = phase * lead;
            if order == 2 {
                let gamma52 = 0.75 * PI.sqrt();
                let mut corr = Complex64::new(0.0, 0.0);
                for cut in [Cut::Upper, Cut::Lower] {
                    let (_, f1) = jump.massive_series(cut);
                    corr += Complex64::from_polar(1.0, cut.sign() * mu * tau) * f1;
                }
                val += -phase * corr * gamma52 * tau.powf(-2.5) / (2.0 * PI * I);
            }
            Ok(val)
        }
        _ => {
            let w = jump.w;
            if order == 1 {
                let den = Complex64::new(w, -2.0 * PI) * Complex64::new(w, -6.0 * PI);
                Ok(phase * (-4.0 * (c * tau).sin()) / (den * tau))
            } else {
                let vstar = (-EULER_GAMMA).exp() / tau;
                let sum = Complex64::from_polar(1.0, c * tau) * jump.eval(Cut::Upper, vstar)
                    + Complex64::from_polar(1.0, -c * tau) * jump.eval(Cut::Lower, vstar);
                Ok(-phase * sum / (2.0 * PI * I * tau))
            }
        }
    }
}
