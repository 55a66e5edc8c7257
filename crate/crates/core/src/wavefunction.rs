//! Environmental wave functions ψ(t, x).
//!
//! All forms share the prefactor −i√(2g²π/ħ) and depend on x through
//! ξ = g²|x|/ħ. The line integrands are written in dimensionless z.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{DecayError, Result};
use crate::model::{to_dimensionless, ModelParams, Regime};
use crate::poles::{quartic_roots, PoleLabel, PoleSet};
use crate::quad;
use crate::resolvent::{default_sigma, line_quadrature, resolvent_eval, split_sqrt, ResolventFn};
use crate::volterra::{solve_volterra, Scheme, VolterraConfig};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Symmetric spatial grid with quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// Weights of the segments inside |x| ≤ t only, for fields that vanish
    /// outside the light cone and jump at its edge (light-cone grids only).
    pub causal_weights: Option<Vec<f64>>,
}

impl SpatialGrid {
    /// 4·per_segment + 1 points on [−2t, 2t] with nodes at −t, 0 and t.
    ///
    /// Composite Boole weights on each of the four segments, so the light-cone
    /// jump and the kink at x = 0 fall on segment ends.
    pub fn light_cone(t: f64, per_segment: usize) -> Result<Self> {
        if !(t > 0.0) {
            return Err(DecayError::InvalidParam(format!("grid needs t > 0, got {t}")));
        }
        if per_segment == 0 || per_segment % 4 != 0 {
            return Err(DecayError::InvalidParam(format!(
                "points per segment must be a positive multiple of 4, got {per_segment}"
            )));
        }
        let n = 4 * per_segment;
        let h = 4.0 * t / n as f64;
        // Scaling exact fractions of t keeps the nodes −t, 0 and t exact.
        let points = (0..=n).map(|i| t * (-2.0 + 4.0 * i as f64 / n as f64)).collect();
        let mut weights = vec![0.0; n + 1];
        let mut causal = vec![0.0; n + 1];
        let boole = [7.0, 32.0, 12.0, 32.0, 7.0];
        for block in 0..n / 4 {
            let inner = block >= n / 16 && block < 3 * n / 16;
            for (k, c) in boole.iter().enumerate() {
                weights[4 * block + k] += 2.0 * h * c / 45.0;
                if inner {
                    causal[4 * block + k] += 2.0 * h * c / 45.0;
                }
            }
        }
        Ok(Self {
            points,
            weights,
            causal_weights: Some(causal),
        })
    }

    /// Default grid: 2049 points on [−2t, 2t].
    pub fn default_for(t: f64) -> Result<Self> {
        Self::light_cone(t, 512)
    }

    /// Trapezoid weights on arbitrary increasing points.
    pub fn trapezoid(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 || points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(DecayError::InvalidParam("x grid must be strictly increasing".into()));
        }
        let n = points.len();
        let mut weights = vec![0.0; n];
        for i in 0..n - 1 {
            let h = points[i + 1] - points[i];
            weights[i] += 0.5 * h;
            weights[i + 1] += 0.5 * h;
        }
        Ok(Self {
            points,
            weights,
            causal_weights: None,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// ψ(t, x) on a grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub x_grid: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<Complex64>,
    pub t: f64,
    pub params: ModelParams,
    /// Σ w_x |ψ|².
    pub integrated_prob: f64,
}

impl WaveField {
    /// `causal` marks fields that vanish for |x| > t; they use the grid's
    /// inner-segment weights when available.
    pub fn new(grid: &SpatialGrid, values: Vec<Complex64>, t: f64, params: ModelParams, causal: bool) -> Self {
        let weights = match (&grid.causal_weights, causal) {
            (Some(c), true) => c.clone(),
            _ => grid.weights.clone(),
        };
        let integrated_prob = weights
            .iter()
            .zip(&values)
            .map(|(w, v)| w * v.norm_sqr())
            .sum();
        Self {
            x_grid: grid.points.clone(),
            weights,
            values,
            t,
            params,
            integrated_prob,
        }
    }

    /// (Σ w_x |ψ − φ|²)^{1/2} against another field on the same grid.
    pub fn l2_distance(&self, other: &WaveField) -> Result<f64> {
        if self.x_grid != other.x_grid {
            return Err(DecayError::InvalidParam("fields live on different grids".into()));
        }
        Ok(self
            .weights
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(w, (a, b))| w * (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// (Σ w_x |ψ|²)^{1/2}.
    pub fn l2_norm(&self) -> f64 {
        self.integrated_prob.sqrt()
    }
}

fn prefactor(params: &ModelParams) -> Complex64 {
    -I * (2.0 * params.g2() * PI / params.hbar()).sqrt()
}

fn xi_of(params: &ModelParams, x: f64) -> f64 {
    params.g2() * x.abs() / params.hbar()
}

/// Time-evolving resonant state of the massless no-cutoff regime, θ(0) = 1.
pub fn psi_massless(params: &ModelParams, t: f64, x: f64) -> Complex64 {
    if x.abs() > t {
        return Complex64::new(0.0, 0.0);
    }
    let s = t - x.abs();
    let g2 = params.g2();
    let hb = params.hbar();
    prefactor(params) * Complex64::from_polar((-2.0 * g2 * PI * s / hb).exp(), -params.omega0() * s / hb)
}

/// Bound-state component ψ_{z₀}(t, x).
pub fn psi_bound(params: &ModelParams, poles: &PoleSet, t: f64, x: f64) -> Result<Complex64> {
    if params.regime() != Regime::MassiveNocut {
        return Err(DecayError::Regime {
            regime: params.regime().to_string(),
            reason: "bound state exists for m > 0 without cutoff".into(),
        });
    }
    let z0 = poles
        .get(PoleLabel::BoundZ0)
        .ok_or_else(|| DecayError::InvalidParam("pole set lacks z0".into()))?;
    Ok(prefactor(params) * pole_term(params, z0.z, z0.residue, to_dimensionless(t, params), xi_of(params, x)))
}

/// Residue of z e^{−ξS}/((z+iw)S + 2πz) from the residue of F at the same pole.
fn pole_term(params: &ModelParams, z: Complex64, f_residue: Complex64, tau: f64, xi: f64) -> Complex64 {
    let s = split_sqrt(z, params.dimensionless().mu);
    z * (-xi * s + z * tau).exp() * f_residue / s
}

/// e^a − 1 without cancellation for small |a|.
fn expm1_complex(a: Complex64) -> Complex64 {
    let half = (0.5 * a.im).sin();
    Complex64::new(a.re.exp_m1() * a.im.cos() - 2.0 * half * half, a.re.exp() * a.im.sin())
}

/// [z e^{−ξS}/((z+iw)S + 2πz) − e^{−ξz}/(z+c)]·e^{ξz} on the principal sheet.
///
/// With d = S − z = μ²/(S+z) the difference is formed as one fraction, so it
/// stays accurate where both terms agree to many digits (large |z|).
fn massive_remainder(w: f64, mu: f64, c: Complex64, z: Complex64, xi: f64) -> Complex64 {
    let s = split_sqrt(z, mu);
    let d = mu * mu / (s + z);
    let num = z * (z + c) * expm1_complex(-xi * d) - (z + I * w) * d;
    num / (((z + I * w) * s + 2.0 * PI * z) * (z + c))
}

/// Direct line inversion of the massive integrand at one ξ.
fn massive_line(params: &ModelParams, tau: f64, xi: f64) -> Result<Complex64> {
    if xi > tau {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let d = params.dimensionless();
    let sigma = default_sigma(tau);
    let c = Complex64::new(2.0 * PI, d.w);
    let lag = tau - xi;
    let rem = |y: f64| {
        let z = Complex64::new(sigma, y);
        massive_remainder(d.w, d.mu, c, z, xi) * (z * lag).exp()
    };
    let y0 = 2.0 * d.w.abs().max(d.mu) + 20.0;
    let width = sigma.min(if lag > 0.0 { PI / lag } else { 1.0 }).min(0.5);
    let (val, err) = line_quadrature(&rem, lag, y0, width, 1e-11);
    if err > 1e-6 {
        return Err(DecayError::Quadrature {
            level: format!("wave-function line at xi = {xi}"),
            estimate: err,
            tolerance: 1e-6,
        });
    }
    Ok((-c * lag).exp() + val / (2.0 * PI))
}

/// ψ_BC/prefactor at one ξ: −(1/2πi)Σ_cuts ∫₀^∞ e^{ζτ}[h(ζ+i0) − h(ζ−i0)] dv.
fn massive_branch_cut(params: &ModelParams, tau: f64, xi: f64) -> Result<Complex64> {
    if xi >= tau {
        return Err(DecayError::Domain(format!(
            "cut decomposition needs xi < tau (xi = {xi}, tau = {tau})"
        )));
    }
    let d = params.dimensionless();
    let (w, mu) = (d.w, d.mu);
    let lag = tau - xi;
    let mut total = Complex64::new(0.0, 0.0);
    let mut err_total = 0.0;
    for sign in [1.0, -1.0] {
        // On the side where S ≈ ζ the integrand grows like e^{ξv}; subtract
        // e^{−ξζ}/(ζ − ζc) with ζc = ±iμ + 1 and add its transform back.
        let zc = Complex64::new(1.0, sign * mu);
        let jump = |v: f64| -> Complex64 {
            let zeta = Complex64::new(-v, sign * mu);
            let root_v = I * v.sqrt();
            let s_above = if sign > 0.0 {
                root_v * Complex64::new(-v, 2.0 * mu).sqrt()
            } else {
                Complex64::new(-v, -2.0 * mu).sqrt() * root_v
            };
            // Exponents are combined so e^{ξv}e^{−vτ} never overflows.
            let den = |s: Complex64| (zeta + I * w) * s + 2.0 * PI * zeta;
            let above = zeta * (zeta * tau - xi * s_above).exp() / den(s_above);
            let below = zeta * (zeta * tau + xi * s_above).exp() / den(-s_above);
            let model = (zeta * lag).exp() / (zeta - zc);
            if sign > 0.0 {
                (above - model) - below
            } else {
                above - (below - model)
            }
        };
        let r = (28.0 / lag).clamp(1e4, 1e9);
        let f = |s: f64| {
            if s <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            jump(s * s) * (2.0 * s)
        };
        let smax = r.sqrt();
        let mut bps: Vec<f64> = (0..40).rev().map(|k| smax * 0.5f64.powi(k)).collect();
        bps.insert(0, 0.0);
        let res = quad::adaptive(&f, &bps, 1e-12, 1e-10, 40_000);
        // ∫₀^∞ e^{−v·lag}/(−v − 1) dv = −e^{lag}E1(lag).
        let model_int = -Complex64::from_polar(1.0, sign * mu * lag) * lag.exp() * exp_integral_e1(Complex64::new(lag, 0.0));
        let signed_model = if sign > 0.0 { model_int } else { -model_int };
        total += res.value + signed_model;
        // The subtracted integrand decays like 1/v²; the tail beyond R is about |J(R)|R.
        err_total += res.error + jump(r).norm() * r;
    }
    if err_total > 1e-4 {
        return Err(DecayError::Quadrature {
            level: format!("wave-function branch cut at xi = {xi}"),
            estimate: err_total,
            tolerance: 1e-4,
        });
    }
    Ok(-total / (2.0 * PI * I))
}

/// Complex exponential integral E1 on the principal branch.
pub fn exp_integral_e1(a: Complex64) -> Complex64 {
    let r = a.norm();
    if r == 0.0 {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    if r <= 4.0 || (a.re < 0.0 && a.im.abs() < 4.0 && r < 40.0) {
        // Series −γ − Log a − Σ (−a)^k/(k·k!).
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 1..400 {
            term *= -a / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.norm() < 1e-17 * sum.norm().max(1e-300) {
                break;
            }
        }
        return -EULER_GAMMA - a.ln() - sum;
    }
    // Modified Lentz on e^{−a}/(a + 1 − 1²/(a + 3 − 2²/(a + 5 − ...))).
    let tiny = 1e-300;
    let mut b = a + 1.0;
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut dd = b.inv();
    let mut h = dd;
    for k in 1..2000 {
        let an = -((k * k) as f64);
        b += 2.0;
        dd = (an * dd + b).inv();
        c = b + an / c;
        if c.norm() < tiny {
            c = Complex64::new(tiny, 0.0);
        }
        let del = c * dd;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h * (-a).exp()
}

/// ∫_{−L}^{L} z cos(pξ)/(z² + p²) dp for Re z > 0.
pub fn cutoff_momentum_integral(z: Complex64, xi: f64, l: f64) -> Complex64 {
    if xi == 0.0 {
        return 2.0 * ((z + I * l).ln() - (z - I * l).ln()) / (2.0 * I);
    }
    let a = -I * (xi * z).exp() * (exp_integral_e1(xi * (z - I * l)) - exp_integral_e1(xi * (z + I * l)));
    // −ξ(z + ip) crosses the negative real axis at p = −Im z when |Im z| < L.
    let cross = if z.im.abs() < l { -2.0 * PI * I } else { Complex64::new(0.0, 0.0) };
    let b = I * (-xi * z).exp()
        * (exp_integral_e1(-xi * (z + I * l)) + cross - exp_integral_e1(-xi * (z - I * l)));
    0.5 * (a + b)
}

/// ψ/prefactor for the massless cutoff regime at one ξ: nested line inversion.
fn cutoff_line(params: &ModelParams, tau: f64, xi: f64) -> Result<Complex64> {
    let d = params.dimensionless();
    let l = d.lambda.expect("finite cutoff");
    let f = ResolventFn::principal(*params);
    let sigma = default_sigma(tau);
    let integrand = |y: f64| {
        let z = Complex64::new(sigma, y);
        let fz = resolvent_eval(&f, z).unwrap_or(Complex64::new(0.0, 0.0));
        fz * cutoff_momentum_integral(z, xi, l) / PI * Complex64::from_polar(1.0, y * tau)
    };
    let y0 = 2.0 * (l + d.w.abs()) + 20.0;
    let width = (PI / (3.0 * tau)).min(8.0);
    let amp = (sigma * tau).exp() / (2.0 * PI);
    let (val, err) = line_quadrature(&integrand, tau, y0, width, 1e-9 / amp);
    if amp * err > 1e-5 {
        return Err(DecayError::Quadrature {
            level: format!("outer Bromwich line of the cutoff wave function at xi = {xi}"),
            estimate: amp * err,
            tolerance: 1e-5,
        });
    }
    Ok(val * amp)
}

/// Numerically evaluated ψ(t, x) on a grid.
///
/// MASSIVE_NOCUT: every principal-sheet pole plus the two cut integrals
/// (zero outside the light cone; the light-cone node itself uses the line
/// inversion, where the cut split is singular). MASSLESS_CUT: nested line
/// inversion with the momentum integral in closed form. MASSLESS_NOCUT:
/// the closed form.
pub fn psi_numeric(params: &ModelParams, t: f64, grid: &SpatialGrid) -> Result<WaveField> {
    if !(t > 0.0) {
        return Err(DecayError::Domain(format!("t must be > 0, got {t}")));
    }
    let tau = to_dimensionless(t, params);
    let pref = prefactor(params);
    let values: Vec<Complex64> = match params.regime() {
        Regime::MasslessNocut => grid.points.iter().map(|&x| psi_massless(params, t, x)).collect(),
        Regime::MassiveNocut => {
            let poles = quartic_roots(params)?;
            let eval = |x: f64| -> Result<Complex64> {
                let xi = xi_of(params, x);
                if xi > tau {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                if xi == tau {
                    return Ok(pref * massive_line(params, tau, xi)?);
                }
                let mut v = massive_branch_cut(params, tau, xi)?;
                for p in poles.principal() {
                    v += pole_term(params, p.z, p.residue, tau, xi);
                }
                Ok(pref * v)
            };
            map_symmetric(grid, eval)?
        }
        Regime::MasslessCut => map_symmetric(grid, |x| Ok(pref * cutoff_line(params, tau, xi_of(params, x))?))?,
        Regime::General => {
            return Err(DecayError::Regime {
                regime: params.regime().to_string(),
                reason: "no wave function for m > 0 with a finite cutoff".into(),
            })
        }
    };
    let causal = params.lambda().is_infinite();
    Ok(WaveField::new(grid, values, t, *params, causal))
}

/// Direct line inversion of the massive wave function (no pole/cut split).
pub fn psi_line_massive(params: &ModelParams, t: f64, grid: &SpatialGrid) -> Result<WaveField> {
    if params.regime() != Regime::MassiveNocut {
        return Err(DecayError::Regime {
            regime: params.regime().to_string(),
            reason: "direct massive line inversion needs MASSIVE_NOCUT".into(),
        });
    }
    let tau = to_dimensionless(t, params);
    let pref = prefactor(params);
    let values = map_symmetric(grid, |x| Ok(pref * massive_line(params, tau, xi_of(params, x))?))?;
    Ok(WaveField::new(grid, values, t, *params, true))
}

/// Evaluates an even function of x once per distinct |x|, in parallel.
fn map_symmetric<F>(grid: &SpatialGrid, f: F) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    let mut keys: Vec<f64> = grid.points.iter().map(|x| x.abs()).collect();
    keys.sort_by(f64::total_cmp);
    keys.dedup();
    let vals: Vec<Result<Complex64>> = keys.par_iter().map(|&k| f(k)).collect();
    let vals: Vec<Complex64> = vals.into_iter().collect::<Result<_>>()?;
    Ok(grid
        .points
        .iter()
        .map(|x| {
            let i = keys.binary_search_by(|k| k.total_cmp(&x.abs())).expect("key present");
            vals[i]
        })
        .collect())
}

/// Time-domain form for the massless cutoff regime:
/// ψ = −i√(2g²π/ħ)(1/π)∫₀^τ φ(s)K(τ − s, ξ) ds with
/// K(u, ξ) = sin(L(u+ξ))/(u+ξ) + sin(L(u−ξ))/(u−ξ) and φ the Schrödinger amplitude.
pub fn psi_time_domain(params: &ModelParams, t: f64, grid: &SpatialGrid, steps: usize) -> Result<WaveField> {
    if params.regime() != Regime::MasslessCut {
        return Err(DecayError::Regime {
            regime: params.regime().to_string(),
            reason: "time-domain form is for m = 0 with a finite cutoff".into(),
        });
    }
    if steps < 2 || steps % 2 == 1 {
        return Err(DecayError::InvalidParam("steps must be even and >= 2".into()));
    }
    let l = params.dimensionless().lambda.expect("finite cutoff");
    let w = params.dimensionless().w;
    let tau = to_dimensionless(t, params);
    let cfg = VolterraConfig::new(t / steps as f64, t, Scheme::Simpson);
    let amp = solve_volterra(params, &cfg)?;
    let h = tau / steps as f64;
    let phi: Vec<Complex64> = amp
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| v * Complex64::from_polar(1.0, -w * h * i as f64))
        .collect();
    let wts = quad::simpson_weights(steps + 1, h);
    let sinc = |a: f64| if a == 0.0 { l } else { (l * a).sin() / a };
    let pref = prefactor(params);
    let values = map_symmetric(grid, |x| {
        let xi = xi_of(params, x);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (p, wt)) in phi.iter().zip(&wts).enumerate() {
            let u = tau - h * i as f64;
            acc += p * (wt * (sinc(u + xi) + sinc(u - xi)));
        }
        Ok(pref * acc / PI)
    })?;
    Ok(WaveField::new(grid, values, t, *params, false))
}
