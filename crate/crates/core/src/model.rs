//! Physical parameters, regimes, dimensionless scalings and grids.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{DecayError, Result};

/// Momentum cutoff of the bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    Finite(f64),
    Infinite,
}

impl Cutoff {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Cutoff::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Cutoff::Finite(v) => Some(*v),
            Cutoff::Infinite => None,
        }
    }
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cutoff::Finite(v) => write!(f, "{v}"),
            Cutoff::Infinite => write!(f, "inf"),
        }
    }
}

/// Gap/cutoff regime of the bath.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    MasslessNocut,
    MassiveNocut,
    MasslessCut,
    General,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::MasslessNocut => "MASSLESS_NOCUT",
            Regime::MassiveNocut => "MASSIVE_NOCUT",
            Regime::MasslessCut => "MASSLESS_CUT",
            Regime::General => "GENERAL",
        };
        f.write_str(s)
    }
}

/// Validated model parameters (ω₀, g, m, Λ, ħ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    omega0: f64,
    g: f64,
    m: f64,
    lambda: Cutoff,
    hbar: f64,
}

/// Dimensionless ratios ω₀/g², m/g², Λ/g².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dimensionless {
    pub w: f64,
    pub mu: f64,
    pub lambda: Option<f64>,
}

impl ModelParams {
    pub fn new(omega0: f64, g: f64, m: f64, lambda: Cutoff, hbar: f64) -> Result<Self> {
        let bad = |s: &str| Err(DecayError::InvalidParam(s.to_string()));
        if !(omega0.is_finite() && omega0 > 0.0) {
            return bad("omega0 must be finite and > 0");
        }
        if !(g.is_finite() && g != 0.0) {
            return bad("g must be finite and nonzero");
        }
        if !(m.is_finite() && m >= 0.0) {
            return bad("m must be finite and >= 0");
        }
        if let Cutoff::Finite(l) = lambda {
            if !(l.is_finite() && l > 0.0) {
                return bad("lambda must be > 0 or inf");
            }
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return bad("hbar must be finite and > 0");
        }
        Ok(Self {
            omega0,
            g,
            m,
            lambda,
            hbar,
        })
    }

    /// Parameters with ħ = 1.
    pub fn with_unit_hbar(omega0: f64, g: f64, m: f64, lambda: Cutoff) -> Result<Self> {
        Self::new(omega0, g, m, lambda, 1.0)
    }

    /// Builds parameters from the dimensionless ratios at a given g and ħ = 1.
    pub fn from_ratios(w: f64, g: f64, mu: f64, lambda: Option<f64>) -> Result<Self> {
        let g2 = g * g;
        let cut = match lambda {
            Some(l) => Cutoff::Finite(l * g2),
            None => Cutoff::Infinite,
        };
        Self::new(w * g2, g, mu * g2, cut, 1.0)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }
    pub fn g(&self) -> f64 {
        self.g
    }
    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn lambda(&self) -> Cutoff {
        self.lambda
    }
    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn g2(&self) -> f64 {
        self.g * self.g
    }

    pub fn regime(&self) -> Regime {
        classify_regime(self)
    }

    pub fn dimensionless(&self) -> Dimensionless {
        let g2 = self.g2();
        Dimensionless {
            w: self.omega0 / g2,
            mu: self.m / g2,
            lambda: self.lambda.finite().map(|l| l / g2),
        }
    }

    /// Copy with a different mass.
    pub fn with_m(&self, m: f64) -> Result<Self> {
        Self::new(self.omega0, self.g, m, self.lambda, self.hbar)
    }

    /// Copy with a different cutoff.
    pub fn with_lambda(&self, lambda: Cutoff) -> Result<Self> {
        Self::new(self.omega0, self.g, self.m, lambda, self.hbar)
    }

    /// Copy with a different coupling.
    pub fn with_g(&self, g: f64) -> Result<Self> {
        Self::new(self.omega0, g, self.m, self.lambda, self.hbar)
    }

    /// Flat key=value echo used in output headers.
    pub fn to_kv(&self) -> Vec<(String, String)> {
        vec![
            ("omega0".into(), format!("{}", self.omega0)),
            ("g".into(), format!("{}", self.g)),
            ("m".into(), format!("{}", self.m)),
            ("lambda".into(), format!("{}", self.lambda)),
            ("hbar".into(), format!("{}", self.hbar)),
        ]
    }
}

/// Regime tag as a pure function of (m == 0, Λ == ∞).
pub fn classify_regime(params: &ModelParams) -> Regime {
    match (params.m == 0.0, params.lambda.is_infinite()) {
        (true, true) => Regime::MasslessNocut,
        (false, true) => Regime::MassiveNocut,
        (true, false) => Regime::MasslessCut,
        (false, false) => Regime::General,
    }
}

/// τ = g²t/ħ.
pub fn to_dimensionless(t: f64, params: &ModelParams) -> f64 {
    t * params.g2() / params.hbar
}

/// t = ħτ/g².
pub fn from_dimensionless(tau: f64, params: &ModelParams) -> f64 {
    tau * params.hbar / params.g2()
}

/// Unit system of a time grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    Physical,
    Dimensionless,
}

/// Strictly increasing nonnegative times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
    scaling: Scaling,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>, scaling: Scaling) -> Result<Self> {
        if points.is_empty() {
            return Err(DecayError::InvalidParam("empty time grid".into()));
        }
        if !(points[0] >= 0.0) || points.iter().any(|t| !t.is_finite()) {
            return Err(DecayError::InvalidParam(
                "time grid must be finite and start at t >= 0".into(),
            ));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DecayError::InvalidParam(
                "time grid must be strictly increasing".into(),
            ));
        }
        Ok(Self { points, scaling })
    }

    /// n+1 equispaced points on [0, t_max].
    pub fn uniform(t_max: f64, n: usize, scaling: Scaling) -> Result<Self> {
        if n == 0 || !(t_max > 0.0) {
            return Err(DecayError::InvalidParam(
                "uniform grid needs n >= 1 and t_max > 0".into(),
            ));
        }
        let h = t_max / n as f64;
        Self::new((0..=n).map(|i| i as f64 * h).collect(), scaling)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
    pub fn scaling(&self) -> Scaling {
        self.scaling
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Same grid expressed in the requested units.
    pub fn to_scaling(&self, scaling: Scaling, params: &ModelParams) -> TimeGrid {
        if scaling == self.scaling {
            return self.clone();
        }
        let f: fn(f64, &ModelParams) -> f64 = match scaling {
            Scaling::Dimensionless => to_dimensionless,
            Scaling::Physical => from_dimensionless,
        };
        TimeGrid {
            points: self.points.iter().map(|&t| f(t, params)).collect(),
            scaling,
        }
    }
}

/// Picture of an amplitude series: Φ (interaction) or φ (Schrödinger).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picture {
    Interaction,
    Schrodinger,
}

/// Complex amplitude on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSeries {
    pub grid: TimeGrid,
    pub values: Vec<Complex64>,
    pub picture: Picture,
    /// Reported absolute error bound of the producing solver.
    pub error_bound: f64,
}

impl ComplexSeries {
    pub fn new(grid: TimeGrid, values: Vec<Complex64>, picture: Picture, error_bound: f64) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(DecayError::InvalidParam(format!(
                "grid has {} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self {
            grid,
            values,
            picture,
            error_bound,
        })
    }

    /// Survival probability |value|².
    pub fn survival(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Converts between Φ = e^{iω₀t/ħ}φ and φ.
    pub fn to_picture(&self, picture: Picture, params: &ModelParams) -> ComplexSeries {
        if picture == self.picture {
            return self.clone();
        }
        let sign = match picture {
            Picture::Schrodinger => -1.0,
            Picture::Interaction => 1.0,
        };
        let phys = self.grid.to_scaling(Scaling::Physical, params);
        let values = self
            .values
            .iter()
            .zip(phys.points())
            .map(|(v, &t)| v * Complex64::from_polar(1.0, sign * params.omega0 * t / params.hbar))
            .collect();
        ComplexSeries {
            grid: self.grid.clone(),
            values,
            picture,
            error_bound: self.error_bound,
        }
    }

    /// Same values on a grid expressed in other units.
    pub fn rescaled(&self, scaling: Scaling, params: &ModelParams) -> ComplexSeries {
        ComplexSeries {
            grid: self.grid.to_scaling(scaling, params),
            ..self.clone()
        }
    }
}

/// Parses a flat `key=value` file; `#` starts a comment.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            DecayError::InvalidParam(format!("line {}: expected key=value", lineno + 1))
        })?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Parses a cutoff value: a positive number or `inf`.
pub fn parse_cutoff(s: &str) -> Result<Cutoff> {
    let t = s.trim().to_ascii_lowercase();
    if t == "inf" || t == "infinite" || t == "infinity" {
        return Ok(Cutoff::Infinite);
    }
    t.parse::<f64>()
        .map(Cutoff::Finite)
        .map_err(|_| DecayError::InvalidParam(format!("lambda: cannot parse '{s}'")))
}

/// Builds parameters from a key map; missing keys take defaults (ω₀=1, g=1, m=0, Λ=∞, ħ=1).
pub fn params_from_map(map: &BTreeMap<String, String>) -> Result<ModelParams> {
    let num = |key: &str, default: f64| -> Result<f64> {
        match map.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| DecayError::InvalidParam(format!("{key}: cannot parse '{v}'"))),
        }
    };
    for key in map.keys() {
        if !["omega0", "g", "m", "lambda", "hbar"].contains(&key.as_str()) {
            return Err(DecayError::InvalidParam(format!("unknown key '{key}'")));
        }
    }
    let lambda = match map.get("lambda") {
        None => Cutoff::Infinite,
        Some(v) => parse_cutoff(v)?,
    };
    ModelParams::new(num("omega0", 1.0)?, num("g", 1.0)?, num("m", 0.0)?, lambda, num("hbar", 1.0)?)
}
