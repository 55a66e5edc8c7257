//! Short-time expansions of the survival probability and the Zeno time.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{DecayError, Result};
use crate::model::{to_dimensionless, ModelParams, Regime};

/// Rational multiple of π^pi·μ^mu·L^lambda·w^w.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Monomial {
    pub num: i64,
    pub den: i64,
    pub pi: u32,
    pub mu: u32,
    pub lambda: u32,
    pub w: u32,
}

impl Monomial {
    pub const fn new(num: i64, den: i64, pi: u32, mu: u32, lambda: u32, w: u32) -> Self {
        Self {
            num,
            den,
            pi,
            mu,
            lambda,
            w,
        }
    }

    pub fn eval(&self, mu: f64, lambda: f64, w: f64) -> f64 {
        let mut v = self.num as f64 / self.den as f64;
        for (base, p) in [(PI, self.pi), (mu, self.mu), (lambda, self.lambda), (w, self.w)] {
            if p > 0 {
                v *= base.powi(p as i32);
            }
        }
        v
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)?;
        } else {
            write!(f, "({}/{})", self.num, self.den)?;
        }
        for (name, p) in [("pi", self.pi), ("mu", self.mu), ("L", self.lambda), ("w", self.w)] {
            match p {
                0 => {}
                1 => write!(f, "*{name}")?,
                _ => write!(f, "*{name}^{p}")?,
            }
        }
        Ok(())
    }
}

/// Coefficients of P in powers of τ = g²t/ħ.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortTimeSeries {
    pub regime: Regime,
    /// Symbolic coefficient of τ^k at index k (empty = 0). Unused when `numeric`.
    pub terms: Vec<Vec<Monomial>>,
    /// Float coefficients for regimes without a closed form.
    pub numeric: Option<Vec<f64>>,
    mu: f64,
    lambda: f64,
    w: f64,
}

impl ShortTimeSeries {
    /// Highest power carried.
    pub fn max_order(&self) -> usize {
        match &self.numeric {
            Some(c) => c.len() - 1,
            None => self.terms.len() - 1,
        }
    }

    /// Whether the coefficients come from the numeric fallback.
    pub fn is_numeric(&self) -> bool {
        self.numeric.is_some()
    }

    /// Float value of the τ^k coefficient.
    pub fn coefficient(&self, k: usize) -> f64 {
        match &self.numeric {
            Some(c) => c.get(k).copied().unwrap_or(0.0),
            None => self
                .terms
                .get(k)
                .map(|ms| ms.iter().map(|m| m.eval(self.mu, self.lambda, self.w)).sum())
                .unwrap_or(0.0),
        }
    }

    /// Partial sum through τ^order at dimensionless time τ.
    pub fn eval_tau(&self, tau: f64, order: usize) -> f64 {
        (0..=order.min(self.max_order()))
            .rev()
            .fold(0.0, |acc, k| acc * tau + self.coefficient(k))
    }

    /// Partial sum through τ^order at physical time t.
    pub fn eval(&self, params: &ModelParams, t: f64, order: usize) -> f64 {
        self.eval_tau(to_dimensionless(t, params), order)
    }
}

fn no_cutoff_terms() -> Vec<Vec<Monomial>> {
    vec![
        vec![Monomial::new(1, 1, 0, 0, 0, 0)],
        vec![Monomial::new(-4, 1, 1, 0, 0, 0)],
        vec![Monomial::new(8, 1, 2, 0, 0, 0)],
        vec![Monomial::new(1, 3, 1, 2, 0, 0), Monomial::new(-32, 3, 3, 0, 0, 0)],
    ]
}

fn cutoff_terms(lambda2_num: i64, lambda2_den: i64) -> Vec<Vec<Monomial>> {
    vec![
        vec![Monomial::new(1, 1, 0, 0, 0, 0)],
        vec![],
        vec![Monomial::new(-4, 1, 0, 0, 1, 0)],
        vec![],
        vec![
            Monomial::new(lambda2_num, lambda2_den, 0, 0, 2, 0),
            Monomial::new(1, 9, 0, 0, 3, 0),
            Monomial::new(1, 3, 0, 0, 1, 2),
        ],
    ]
}

fn build(params: &ModelParams, terms: Vec<Vec<Monomial>>) -> ShortTimeSeries {
    let d = params.dimensionless();
    ShortTimeSeries {
        regime: params.regime(),
        terms,
        numeric: None,
        mu: d.mu,
        lambda: d.lambda.unwrap_or(f64::INFINITY),
        w: d.w,
    }
}

/// Nominal short-time coefficients.
///
/// No cutoff (any m): 1 − 4πτ + 8π²τ² + (πμ²/3 − 32π³/3)τ³.
/// Massless with cutoff: 1 − 4Lτ² + (8L² + L³/9 + w²L/3)τ⁴.
/// GENERAL: numeric series through τ⁴, flagged by `is_numeric`.
pub fn survival_series(params: &ModelParams) -> ShortTimeSeries {
    match params.regime() {
        Regime::MasslessNocut | Regime::MassiveNocut => build(params, no_cutoff_terms()),
        Regime::MasslessCut => build(params, cutoff_terms(8, 1)),
        Regime::General => numeric_series(params, 4),
    }
}

/// Same as [`survival_series`] with the cutoff τ⁴ coefficient taken from the
/// exact expansion of the sinc-kernel equation: 16L²/3 + L³/9 + w²L/3.
pub fn survival_series_corrected(params: &ModelParams) -> ShortTimeSeries {
    match params.regime() {
        Regime::MasslessCut => build(params, cutoff_terms(16, 3)),
        _ => survival_series(params),
    }
}

/// Taylor coefficients of the dimensionless kernel at u = 0 (finite cutoff).
fn kernel_taylor(w: f64, mu: f64, l: f64, n: usize) -> Vec<Complex64> {
    // ∫₀^L cos(√(q²+μ²)u)dq = Σ_b (−1)^b u^{2b}/(2b)! · M_b with M_b = ∫₀^L (q²+μ²)^b dq.
    let moment = |b: usize| -> f64 {
        let mut s = 0.0;
        let mut binom = 1.0;
        for k in 0..=b {
            s += binom * mu.powi(2 * (b - k) as i32) * l.powi(2 * k as i32 + 1) / (2 * k + 1) as f64;
            binom = binom * (b - k) as f64 / (k + 1) as f64;
        }
        s
    };
    let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
    let mut cos_part = vec![0.0; n];
    for (j, c) in cos_part.iter_mut().enumerate() {
        if j % 2 == 0 {
            let b = j / 2;
            *c = if b % 2 == 0 { 1.0 } else { -1.0 } * moment(b) / fact(j);
        }
    }
    (0..n)
        .map(|j| {
            (0..=j)
                .map(|a| Complex64::new(0.0, w).powi(a as i32) / fact(a) * cos_part[j - a])
                .sum::<Complex64>()
                * -4.0
        })
        .collect()
}

/// P coefficients through τ^order from Φ' = ∫₀^τ k(τ−s)Φ(s)ds with a kernel regular at 0.
fn numeric_series(params: &ModelParams, order: usize) -> ShortTimeSeries {
    let d = params.dimensionless();
    let l = d.lambda.expect("finite cutoff");
    let kappa = kernel_taylor(d.w, d.mu, l, order + 1);
    let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
    let mut a = vec![Complex64::new(0.0, 0.0); order + 1];
    a[0] = Complex64::new(1.0, 0.0);
    for n in 0..order {
        // ∫₀^τ (τ−s)^j s^i ds = τ^{i+j+1} i! j!/(i+j+1)!.
        let mut rhs = Complex64::new(0.0, 0.0);
        if n >= 1 {
            for i in 0..n {
                let j = n - 1 - i;
                rhs += kappa[j] * a[i] * (fact(i) * fact(j) / fact(n));
            }
        }
        a[n + 1] = rhs / (n + 1) as f64;
    }
    let coeffs = (0..=order)
        .map(|k| (0..=k).map(|i| (a[i] * a[k - i].conj()).re).sum())
        .collect();
    ShortTimeSeries {
        regime: params.regime(),
        terms: Vec::new(),
        numeric: Some(coeffs),
        mu: d.mu,
        lambda: l,
        w: d.w,
    }
}

/// Numeric series through τ^order for any finite-cutoff regime.
pub fn survival_series_numeric(params: &ModelParams, order: usize) -> Result<ShortTimeSeries> {
    if params.lambda().is_infinite() {
        return Err(DecayError::Regime {
            regime: params.regime().to_string(),
            reason: "numeric series needs a kernel regular at the origin (finite cutoff)".into(),
        });
    }
    Ok(numeric_series(params, order))
}

/// t_Zeno = ħ/(2g√Λ), where the quadratic term 1 − 4Lτ² reaches zero.
pub fn zeno_time(params: &ModelParams) -> Result<f64> {
    match params.lambda().finite() {
        Some(l) => Ok(params.hbar() / (2.0 * params.g() * l.sqrt())),
        None => Err(DecayError::Regime {
            regime: params.regime().to_string(),
            reason: "no Zeno time without a cutoff (no quadratic decay)".into(),
        }),
    }
}
