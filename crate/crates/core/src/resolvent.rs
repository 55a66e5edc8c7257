//! Laplace-domain resolvent F(z) on its Riemann sheets and numerical Bromwich
//! inversion along a vertical line.
//!
//! All quantities are dimensionless (z in units of g²/ħ). Square roots
//! √(z² + μ²) are taken as √(z - iμ)·√(z + iμ) and the arctangent of the cutoff
//! regime as a difference of principal logarithms, so every cut runs
//! leftward from its branch point.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{DecayError, Result};
use crate::model::{ComplexSeries, ModelParams, Picture, Regime, Scaling, TimeGrid};
use crate::quad;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Riemann sheet label: 0 principal; ±1 for 𝓡± of the square-root surface;
/// n ∈ ℤ for the arctangent surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SheetId(pub i64);

impl SheetId {
    pub const PRINCIPAL: SheetId = SheetId(0);
    pub const PLUS: SheetId = SheetId(1);
    pub const MINUS: SheetId = SheetId(-1);
}

/// Resolvent bound to parameters and a sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventFn {
    pub params: ModelParams,
    pub sheet: SheetId,
}

impl ResolventFn {
    pub fn principal(params: ModelParams) -> Self {
        Self {
            params,
            sheet: SheetId::PRINCIPAL,
        }
    }

    pub fn on_sheet(params: ModelParams, sheet: SheetId) -> Result<Self> {
        let ok = match params.regime() {
            Regime::MasslessNocut | Regime::General => sheet.0 == 0,
            Regime::MassiveNocut => sheet.0.abs() <= 1,
            Regime::MasslessCut => true,
        };
        if !ok {
            return Err(DecayError::InvalidParam(format!(
                "sheet {} does not exist in regime {}",
                sheet.0,
                params.regime()
            )));
        }
        Ok(Self { params, sheet })
    }

    fn is_principal(&self) -> bool {
        match self.params.regime() {
            Regime::MassiveNocut => self.sheet.0 >= 0,
            _ => self.sheet.0 == 0,
        }
    }
}

/// √(z - ic)·√(z + ic), principal factors.
pub fn split_sqrt(z: Complex64, c: f64) -> Complex64 {
    (z - I * c).sqrt() * (z + I * c).sqrt()
}

/// 4·arctan(L/z) as -2i[Log(z + iL) - Log(z - iL)].
pub fn four_arctan_cut(z: Complex64, l: f64) -> Complex64 {
    -2.0 * I * ((z + I * l).ln() - (z - I * l).ln())
}

fn cut_distance(z: Complex64, c: f64) -> f64 {
    let d = |b: f64| {
        if z.re <= 0.0 {
            (z.im - b).abs()
        } else {
            (z - I * b).norm()
        }
    };
    d(c).min(d(-c))
}

/// Self-energy Σ(z) with F(z) = 1/(z + iω₀/g² + Σ(z)) on the selected sheet.
pub fn self_energy(f: &ResolventFn, z: Complex64) -> Complex64 {
    let d = f.params.dimensionless();
    match f.params.regime() {
        Regime::MasslessNocut => Complex64::new(2.0 * PI, 0.0),
        Regime::MassiveNocut => {
            let s = split_sqrt(z, d.mu);
            let sign = if f.sheet.0 >= 0 { 1.0 } else { -1.0 };
            sign * 2.0 * PI * z / s
        }
        Regime::MasslessCut => {
            let l = d.lambda.expect("finite cutoff");
            four_arctan_cut(z, l) + 4.0 * PI * f.sheet.0 as f64
        }
        Regime::General => {
            let l = d.lambda.expect("finite cutoff");
            let s = split_sqrt(z, d.mu);
            let atan = ((s + I * l).ln() - (s - I * l).ln()) / (2.0 * I);
            4.0 * z * atan / s
        }
    }
}

/// F(z) on the sheet of `f`.
pub fn resolvent_eval(f: &ResolventFn, z: Complex64) -> Result<Complex64> {
    let d = f.params.dimensionless();
    let branch_point = match f.params.regime() {
        Regime::MassiveNocut => Some(d.mu),
        Regime::MasslessCut => d.lambda,
        Regime::General => Some(d.mu),
        Regime::MasslessNocut => None,
    };
    if let Some(c) = branch_point {
        if cut_distance(z, c) < 1e-12 {
            return Err(DecayError::BranchCut(format!(
                "z = {z} within 1e-12 of a cut from ±{c}i"
            )));
        }
    }
    let den = z + I * d.w + self_energy(f, z);
    let val = den.inv();
    let mag = val.norm();
    if !mag.is_finite() || mag > 1e12 {
        return Err(DecayError::PoleProximity(mag));
    }
    Ok(val)
}

/// Constant c of the subtracted term 1/(z + c) whose inverse is known exactly.
fn subtraction(params: &ModelParams) -> Complex64 {
    let d = params.dimensionless();
    let gamma = if params.lambda().is_infinite() { 2.0 * PI } else { 0.0 };
    Complex64::new(gamma, d.w)
}

/// A σ that keeps e^{στ} bounded over [0, τ_max].
pub fn default_sigma(tau_max: f64) -> f64 {
    if tau_max > 1.0 {
        1.0 / tau_max
    } else {
        1.0
    }
}

/// ∫ℝ g(y) dy for a Bromwich-line integrand whose tails oscillate like e^{iyω}.
///
/// GK21 panels of at most `width` on [−y0, y0], then cycle-wise tails with
/// Wynn extrapolation (ω > 0) or a mapped tail (ω = 0). Returns value and error.
pub(crate) fn line_quadrature<F: Fn(f64) -> Complex64>(
    g: &F,
    omega: f64,
    y0: f64,
    width: f64,
    abs_tol: f64,
) -> (Complex64, f64) {
    let n = ((2.0 * y0 / width).ceil() as usize).clamp(16, 400_000);
    let core = quad::adaptive_uniform(g, -y0, y0, n, abs_tol, 1e-13, 8 * n + 2000);
    let (up, down) = if omega > 0.0 {
        let cyc = PI / omega;
        (
            quad::oscillatory_tail(g, y0, 1.0, cyc, abs_tol, 2000),
            quad::oscillatory_tail(g, -y0, -1.0, cyc, abs_tol, 2000),
        )
    } else {
        let flip = |y: f64| g(-y);
        (
            quad::mapped_tail(g, y0, y0, abs_tol),
            quad::mapped_tail(&flip, y0, y0, abs_tol),
        )
    };
    (
        core.value + up.value + down.value,
        core.error + up.error + down.error,
    )
}

/// Φ(τ) and its estimated quadrature error for one dimensionless time.
pub fn bromwich_point(f: &ResolventFn, sigma: f64, tau: f64) -> Result<(Complex64, f64)> {
    let params = &f.params;
    let d = params.dimensionless();
    let c = subtraction(params);
    let rem = |y: f64| -> Complex64 {
        let z = Complex64::new(sigma, y);
        let den = z + I * d.w + self_energy(f, z);
        (den.inv() - (z + c).inv()) * Complex64::from_polar(1.0, y * tau)
    };
    let scale = d
        .w
        .abs()
        .max(d.mu)
        .max(d.lambda.map(|l| (l * l + d.mu * d.mu).sqrt()).unwrap_or(0.0));
    let y0 = 2.0 * scale + 20.0;
    let width = sigma.min(if tau > 0.0 { PI / tau } else { 1.0 }).min(0.5);
    let amp = (sigma * tau).exp() / (2.0 * PI);
    let (integral, qerr) = line_quadrature(&rem, tau, y0, width, 1e-11 / amp);
    let err = amp * qerr;
    if err > 1e-6 {
        return Err(DecayError::Quadrature {
            level: format!("bromwich line at tau = {tau}"),
            estimate: err,
            tolerance: 1e-6,
        });
    }
    let lead = (-c * tau).exp();
    let phi = Complex64::from_polar(1.0, d.w * tau) * (lead + integral * amp);
    Ok((phi, err))
}

/// Φ(t) = e^{iω₀t/ħ}(1/2πi)∫F(z)e^{zτ}dz along Re z = σ (σ in units of g²/ħ).
pub fn bromwich_invert(f: &ResolventFn, t_grid: &TimeGrid, sigma: f64) -> Result<ComplexSeries> {
    if !(sigma > 0.0) {
        return Err(DecayError::InvalidParam(format!("sigma must be > 0, got {sigma}")));
    }
    if !f.is_principal() {
        return Err(DecayError::InvalidParam(
            "Bromwich inversion runs on the principal sheet".into(),
        ));
    }
    let taus = t_grid.to_scaling(Scaling::Dimensionless, &f.params);
    let out: Vec<Result<(Complex64, f64)>> = taus
        .points()
        .par_iter()
        .map(|&tau| bromwich_point(f, sigma, tau))
        .collect();
    let mut values = Vec::with_capacity(out.len());
    let mut err: f64 = 0.0;
    for r in out {
        let (v, e) = r?;
        values.push(v);
        err = err.max(e);
    }
    ComplexSeries::new(t_grid.clone(), values, Picture::Interaction, err)
}
