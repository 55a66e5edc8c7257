//! Time-domain solution of the amplitude equation Φ' = ∫_0^τ k(τ-s)Φ(s)ds - γΦ.
//!
//! The delta part is removed with an integrating factor, which turns the
//! integro-differential equation into a second-kind Volterra equation
//! Φ(τ) = e^{-γτ} + ∫_0^τ Kc(τ-r)Φ(r)dr with Kc(u) = ∫_0^u e^{-γ(u-v)}k(v)dv.
//! A purely Markovian kernel gives Kc ≡ 0 and the exact exponential.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{DecayError, Result};
use crate::kernel::KernelSpec;
use crate::model::{to_dimensionless, ComplexSeries, ModelParams, Picture, Scaling, TimeGrid};
use crate::quad;

/// Convolution quadrature rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Trapezoid,
    Simpson,
}

impl Scheme {
    pub fn order(&self) -> i32 {
        match self {
            Scheme::Trapezoid => 2,
            Scheme::Simpson => 4,
        }
    }
}

/// Fixed-step configuration in physical time units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolterraConfig {
    pub dt: f64,
    pub t_max: f64,
    pub scheme: Scheme,
}

impl VolterraConfig {
    pub fn new(dt: f64, t_max: f64, scheme: Scheme) -> Self {
        Self { dt, t_max, scheme }
    }

    /// Number of output steps.
    pub fn steps(&self) -> usize {
        ((self.t_max / self.dt).round() as usize).max(1)
    }

    /// Checks dt ≤ t_max and dt·max(ω₀, m, Λ)/ħ ≤ 0.2.
    pub fn validate(&self, params: &ModelParams, lambda_eff: Option<f64>) -> Result<()> {
        if !(self.dt > 0.0 && self.t_max > 0.0) {
            return Err(DecayError::StepSize("dt and t_max must be positive".into()));
        }
        if self.dt > self.t_max {
            return Err(DecayError::StepSize(format!(
                "dt = {} exceeds t_max = {}",
                self.dt, self.t_max
            )));
        }
        let lam = lambda_eff.or(params.lambda().finite()).unwrap_or(0.0);
        let fastest = params.omega0().max(params.m()).max(lam);
        let resolution = self.dt * fastest / params.hbar();
        if resolution > 0.2 + 1e-12 {
            return Err(DecayError::StepSize(format!(
                "dt·max(omega0, m, lambda)/hbar = {resolution:.4} > 0.2"
            )));
        }
        if self.scheme == Scheme::Simpson && self.steps() % 2 == 1 {
            return Err(DecayError::StepSize(
                "Simpson scheme needs an even number of steps".into(),
            ));
        }
        Ok(())
    }
}

/// Solves for Φ(t) with the regime's natural kernel.
pub fn solve_volterra(params: &ModelParams, cfg: &VolterraConfig) -> Result<ComplexSeries> {
    solve_volterra_with_kernel(&KernelSpec::natural(*params), cfg)
}

/// Solves for Φ(t) with an explicit kernel representation.
///
/// Three runs at h, h/2 and h/4 (h = dt in dimensionless units) are made; the
/// h/4 solution is returned on the dt grid and its error bound is the
/// Richardson estimate d(h/2, h/4)/(2^p - 1).
pub fn solve_volterra_with_kernel(spec: &KernelSpec, cfg: &VolterraConfig) -> Result<ComplexSeries> {
    let params = &spec.params;
    cfg.validate(params, None)?;
    let n = cfg.steps();
    let tau_max = to_dimensionless(cfg.t_max, params);
    let h = tau_max / n as f64;
    let gamma = spec.delta_rate();
    let refine = 4usize;
    let hf = h / refine as f64;
    let kc = integrated_kernel(spec, gamma, hf, n * refine);
    let kc_half_fine = half_step_kernel(spec, gamma, hf);

    let run = |stride: usize, kc_half: Complex64| {
        let steps = n * refine / stride;
        let k = |i: usize| kc[i * stride];
        march(&k, kc_half, hf * stride as f64, steps, gamma, cfg.scheme)
    };
    let coarse = run(4, kc[2]);
    let mid = run(2, kc[1]);
    let fine = run(1, kc_half_fine);

    let d_coarse = (0..=n).map(|i| (mid[2 * i] - coarse[i]).norm()).fold(0.0, f64::max);
    let d_fine = (0..=2 * n).map(|i| (fine[2 * i] - mid[i]).norm()).fold(0.0, f64::max);
    if d_fine > 1e-12 && d_fine >= d_coarse {
        return Err(DecayError::NoConvergence(format!(
            "successive differences {d_coarse:.3e} -> {d_fine:.3e}"
        )));
    }
    let err = d_fine / (2f64.powi(cfg.scheme.order()) - 1.0);
    let values: Vec<Complex64> = (0..=n).map(|i| fine[refine * i]).collect();
    let dt = cfg.t_max / n as f64;
    let grid = TimeGrid::new((0..=n).map(|i| i as f64 * dt).collect(), Scaling::Physical)?;
    ComplexSeries::new(grid, values, Picture::Interaction, err)
}

/// Kc on the grid j·h, j = 0..=n, by the recurrence over single steps.
fn integrated_kernel(spec: &KernelSpec, gamma: f64, h: f64, n: usize) -> Vec<Complex64> {
    let decay = (-gamma * h).exp();
    let pieces: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let a = j as f64 * h;
            let b = a + h;
            let f = |v: f64| spec.eval_dimensionless(v) * (-gamma * (b - v)).exp();
            quad::gk21(&f, a, b).0
        })
        .collect();
    let mut kc = Vec::with_capacity(n + 1);
    kc.push(Complex64::new(0.0, 0.0));
    for (j, p) in pieces.iter().enumerate() {
        let next = kc[j] * decay + p;
        kc.push(next);
    }
    kc
}

fn half_step_kernel(spec: &KernelSpec, gamma: f64, h: f64) -> Complex64 {
    let b = 0.5 * h;
    let f = |v: f64| spec.eval_dimensionless(v) * (-gamma * (b - v)).exp();
    quad::gk21(&f, 0.0, b).0
}

/// Σ_{j in range} w(j)·k(i - j)·phi[j] in fixed chunks so the result is
/// independent of thread scheduling.
fn conv_sum<K, W>(k: &K, w: &W, phi: &[Complex64], i: usize, lo: usize, hi: usize) -> Complex64
where
    K: Fn(usize) -> Complex64 + Sync,
    W: Fn(usize) -> f64 + Sync,
{
    const CHUNK: usize = 2048;
    if hi <= lo {
        return Complex64::new(0.0, 0.0);
    }
    let body = |a: usize, b: usize| {
        let mut s = Complex64::new(0.0, 0.0);
        for j in a..b {
            s += k(i - j) * phi[j] * w(j);
        }
        s
    };
    if hi - lo <= 2 * CHUNK {
        return body(lo, hi);
    }
    let starts: Vec<usize> = (lo..hi).step_by(CHUNK).collect();
    let parts: Vec<Complex64> = starts
        .par_iter()
        .map(|&a| body(a, (a + CHUNK).min(hi)))
        .collect();
    parts.iter().fold(Complex64::new(0.0, 0.0), |acc, p| acc + p)
}

fn march<K>(k: &K, kc_half: Complex64, h: f64, n: usize, gamma: f64, scheme: Scheme) -> Vec<Complex64>
where
    K: Fn(usize) -> Complex64 + Sync,
{
    let f = |i: usize| Complex64::new((-gamma * h * i as f64).exp(), 0.0);
    let mut phi = vec![Complex64::new(0.0, 0.0); n + 1];
    phi[0] = Complex64::new(1.0, 0.0);
    match scheme {
        Scheme::Trapezoid => {
            for i in 1..=n {
                let w = |j: usize| if j == 0 { 0.5 } else { 1.0 };
                let s = conv_sum(k, &w, &phi, i, 0, i);
                phi[i] = f(i) + s * h;
            }
        }
        Scheme::Simpson => {
            let k1 = k(1);
            let a = kc_half * (h / 2.0);
            let b = kc_half * (h / 12.0);
            let c = k1 * (4.0 * h / 3.0);
            for m in 0..n / 2 {
                let (i0, i1, i2) = (2 * m, 2 * m + 1, 2 * m + 2);
                // Composite Simpson over [0, τ_{i2}] without the unknown nodes.
                let wa = |j: usize| {
                    if j == 0 {
                        1.0
                    } else if j % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    }
                };
                let a0 = f(i2) + conv_sum(k, &wa, &phi, i2, 0, i0 + 1) * (h / 3.0);
                // Composite Simpson over [0, τ_{i0}] plus a quadratic on the last step.
                let wb = |j: usize| {
                    if j == 0 || j == i0 {
                        1.0
                    } else if j % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    }
                };
                let mut b0 = f(i1);
                if m > 0 {
                    b0 += conv_sum(k, &wb, &phi, i1, 0, i0 + 1) * (h / 3.0);
                }
                b0 += (k1 + kc_half * 1.5) * phi[i0] * (h / 6.0);
                let p1 = (b0 - b * a0) / (Complex64::new(1.0, 0.0) - a + b * c);
                phi[i1] = p1;
                phi[i2] = a0 + c * p1;
            }
        }
    }
    phi
}
