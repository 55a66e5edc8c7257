//! Markovianity diagnostics: semigroup composition test, GKSL reference
//! survival forms and repeated-measurement (Zeno) protocol.

use num_complex::Complex64;

use crate::error::{DecayError, Result};
use crate::model::{to_dimensionless, ComplexSeries, ModelParams, Picture};
use crate::resolvent::{bromwich_point, default_sigma, ResolventFn};

/// Result of the composition-law check at one t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemigroupReport {
    pub t: f64,
    /// max over s ∈ (0, t) of |φ(t) − φ(s)φ(t − s)|.
    pub max_deviation: f64,
    /// s at which the maximum occurs.
    pub s_at_max: f64,
    /// Number of interior s samples.
    pub s_points: usize,
}

/// Interpolates a complex series through ln|φ| and the unwrapped phase.
struct PolarInterp {
    x: Vec<f64>,
    log_amp: Vec<f64>,
    phase: Vec<f64>,
}

impl PolarInterp {
    fn new(series: &ComplexSeries) -> Result<Self> {
        let x = series.grid.points().to_vec();
        if x.len() < 4 {
            return Err(DecayError::InsufficientData("need at least 4 samples".into()));
        }
        let mut phase = Vec::with_capacity(x.len());
        let mut log_amp = Vec::with_capacity(x.len());
        let mut prev: Option<f64> = None;
        for v in &series.values {
            let a = v.norm();
            if !(a > 0.0) {
                return Err(DecayError::InsufficientData("amplitude vanishes on the grid".into()));
            }
            log_amp.push(a.ln());
            let mut ph = v.arg();
            if let Some(p) = prev {
                ph += (2.0 * std::f64::consts::PI) * ((p - ph) / (2.0 * std::f64::consts::PI)).round();
            }
            phase.push(ph);
            prev = Some(ph);
        }
        Ok(Self { x, log_amp, phase })
    }

    /// Cubic Lagrange interpolation on the four nearest nodes.
    fn eval(&self, s: f64) -> Complex64 {
        let n = self.x.len();
        let k = match self.x.binary_search_by(|v| v.total_cmp(&s)) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        let start = k.saturating_sub(1).min(n - 4);
        let xs = &self.x[start..start + 4];
        let lag = |ys: &[f64]| -> f64 {
            let mut acc = 0.0;
            for i in 0..4 {
                let mut l = 1.0;
                for j in 0..4 {
                    if i != j {
                        l *= (s - xs[j]) / (xs[i] - xs[j]);
                    }
                }
                acc += l * ys[start + i];
            }
            acc
        };
        Complex64::from_polar(lag(&self.log_amp).exp(), lag(&self.phase))
    }
}

/// Composition-law deviation at time t over 512 interior s samples.
pub fn semigroup_deviation(amplitude: &ComplexSeries, t: f64) -> Result<SemigroupReport> {
    if amplitude.picture != Picture::Schrodinger {
        return Err(DecayError::InvalidParam(
            "semigroup test expects the Schrodinger-picture amplitude".into(),
        ));
    }
    let pts = amplitude.grid.points();
    let (lo, hi) = (pts[0], pts[pts.len() - 1]);
    if !(t > 0.0) || lo > 0.0 || t > hi {
        return Err(DecayError::InsufficientData(format!(
            "series covers [{lo}, {hi}], need [0, {t}]"
        )));
    }
    let interp = PolarInterp::new(amplitude)?;
    let n = 512usize;
    let phi_t = interp.eval(t);
    let mut best = (0.0, 0.0);
    for i in 1..n {
        let s = t * i as f64 / n as f64;
        let d = (phi_t - interp.eval(s) * interp.eval(t - s)).norm();
        if d > best.0 {
            best = (d, s);
        }
    }
    Ok(SemigroupReport {
        t,
        max_deviation: best.0,
        s_at_max: best.1,
        s_points: n - 1,
    })
}

/// One eigenvalue of the reduced generator with its polynomial prefactor
/// (coefficients of 1, t, t², ...); a diagonalizable mode has one coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct GkslMode {
    pub eigenvalue: Complex64,
    pub coefficients: Vec<Complex64>,
}

/// Spectral data of a GKSL survival curve.
#[derive(Debug, Clone, PartialEq)]
pub struct GkslRates {
    pub diagonalizable: bool,
    pub modes: Vec<GkslMode>,
}

/// P(t) = Σ_i p_i(t)e^{λ_i t} with p_i constant when diagonalizable.
pub fn gksl_reference_survival(rates: &GkslRates, t_grid: &[f64]) -> Result<Vec<f64>> {
    if rates.modes.is_empty() {
        return Err(DecayError::InvalidParam("no modes supplied".into()));
    }
    for m in &rates.modes {
        if m.eigenvalue.re > 0.0 {
            return Err(DecayError::InvalidParam(format!(
                "eigenvalue {} has a positive real part",
                m.eigenvalue
            )));
        }
        if m.coefficients.is_empty() || (rates.diagonalizable && m.coefficients.len() != 1) {
            return Err(DecayError::InvalidParam(
                "diagonalizable modes carry exactly one weight".into(),
            ));
        }
        if m.eigenvalue.im != 0.0 {
            let partner = rates.modes.iter().any(|o| {
                (o.eigenvalue - m.eigenvalue.conj()).norm() < 1e-12
                    && o.coefficients.len() == m.coefficients.len()
                    && o.coefficients
                        .iter()
                        .zip(&m.coefficients)
                        .all(|(a, b)| (a - b.conj()).norm() < 1e-12)
            });
            if !partner {
                return Err(DecayError::InvalidParam(format!(
                    "complex eigenvalue {} lacks a conjugate partner",
                    m.eigenvalue
                )));
            }
        }
    }
    let w0: Complex64 = rates.modes.iter().map(|m| m.coefficients[0]).sum();
    if (w0 - 1.0).norm() > 1e-10 {
        return Err(DecayError::InvalidParam(format!("weights sum to {w0} at t = 0, not 1")));
    }
    Ok(t_grid
        .iter()
        .map(|&t| {
            rates
                .modes
                .iter()
                .map(|m| {
                    let poly = m.coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c);
                    poly * (m.eigenvalue * t).exp()
                })
                .sum::<Complex64>()
                .re
        })
        .collect())
}

/// Least-squares slopes of ln P against ln t over consecutive windows.
pub fn window_slopes(t: &[f64], p: &[f64], windows: &[(f64, f64)]) -> Result<Vec<f64>> {
    windows
        .iter()
        .map(|&(a, b)| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = t
                .iter()
                .zip(p)
                .filter(|(x, v)| **x >= a && **x <= b && **x > 0.0 && **v > 0.0)
                .map(|(x, v)| (x.ln(), v.ln()))
                .unzip();
            if xs.len() < 3 {
                return Err(DecayError::InsufficientData(format!("window [{a}, {b}] has < 3 points")));
            }
            Ok(crate::ssh::linear_fit(&xs, &ys).0)
        })
        .collect()
}

/// Q(t/n)^n for a survival function Q.
pub fn zeno_protocol_with<Q>(q: Q, t_total: f64, n: usize) -> Result<f64>
where
    Q: Fn(f64) -> Result<f64>,
{
    if n == 0 {
        return Err(DecayError::InvalidParam("need at least one measurement".into()));
    }
    if !(t_total > 0.0) {
        return Err(DecayError::InvalidParam(format!("t_total must be > 0, got {t_total}")));
    }
    Ok(q(t_total / n as f64)?.powi(n as i32))
}

/// Q(t/n)^n with Q from the Bromwich inversion of the regime's resolvent.
pub fn zeno_protocol(params: &ModelParams, t_total: f64, n: usize) -> Result<f64> {
    let f = ResolventFn::principal(*params);
    zeno_protocol_with(
        |t| {
            let tau = to_dimensionless(t, params);
            let (phi, _) = bromwich_point(&f, default_sigma(tau), tau)?;
            Ok(phi.norm_sqr())
        },
        t_total,
        n,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Scaling, TimeGrid};

    fn exp_series(gamma: f64, omega: f64, t_max: f64, n: usize) -> ComplexSeries {
        let grid = TimeGrid::uniform(t_max, n, Scaling::Physical).unwrap();
        let values = grid
            .points()
            .iter()
            .map(|&t| (Complex64::new(-gamma, omega) * t).exp())
            .collect();
        ComplexSeries::new(grid, values, Picture::Schrodinger, 0.0).unwrap()
    }

    #[test]
    fn exponentials_compose() {
        let s = exp_series(0.7, 3.0, 5.0, 101);
        let r = semigroup_deviation(&s, 4.3).unwrap();
        assert!(r.max_deviation < 1e-12, "{}", r.max_deviation);
    }

    #[test]
    fn gksl_forms() {
        let t = [0.0, 0.5, 2.0];
        let single = GkslRates {
            diagonalizable: true,
            modes: vec![GkslMode {
                eigenvalue: Complex64::new(-0.3, 0.0),
                coefficients: vec![Complex64::new(1.0, 0.0)],
            }],
        };
        let p = gksl_reference_survival(&single, &t).unwrap();
        for (ti, pi) in t.iter().zip(&p) {
            assert!((pi - (-0.3 * ti).exp()).abs() < 1e-15);
        }
        let jordan = GkslRates {
            diagonalizable: false,
            modes: vec![GkslMode {
                eigenvalue: Complex64::new(-0.5, 0.0),
                coefficients: vec![Complex64::new(1.0, 0.0), Complex64::new(0.25, 0.0)],
            }],
        };
        let p = gksl_reference_survival(&jordan, &t).unwrap();
        assert!((p[2] - 1.5 * (-1.0f64).exp()).abs() < 1e-15);
        let unpaired = GkslRates {
            diagonalizable: true,
            modes: vec![GkslMode {
                eigenvalue: Complex64::new(-0.5, 1.0),
                coefficients: vec![Complex64::new(1.0, 0.0)],
            }],
        };
        assert!(gksl_reference_survival(&unpaired, &t).is_err());
    }

    #[test]
    fn zeno_with_exponential_is_flat() {
        let q = |t: f64| Ok((-2.0 * t).exp());
        for n in [1, 2, 8, 64] {
            assert!((zeno_protocol_with(q, 1.5, n).unwrap() - (-3.0f64).exp()).abs() < 1e-14);
        }
    }
}
