//! Single waveguide coupled to a periodic SSH array, by dense diagonalization.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{DecayError, Result};
use crate::model::{ComplexSeries, Picture, Scaling, TimeGrid};

/// Periodic SSH ring with a side-coupled system site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SshChain {
    pub n_cells: usize,
    pub t1: f64,
    pub t2: f64,
    pub g: f64,
    pub omega0: f64,
}

impl SshChain {
    pub fn new(n_cells: usize, t1: f64, t2: f64, g: f64, omega0: f64) -> Result<Self> {
        if n_cells < 2 {
            return Err(DecayError::InvalidParam(format!("need at least 2 cells, got {n_cells}")));
        }
        for (name, v) in [("t1", t1), ("t2", t2), ("g", g), ("omega0", omega0)] {
            if !v.is_finite() {
                return Err(DecayError::InvalidParam(format!("{name} must be finite")));
            }
        }
        Ok(Self {
            n_cells,
            t1,
            t2,
            g,
            omega0,
        })
    }

    /// Matrix dimension 2N + 1.
    pub fn dim(&self) -> usize {
        2 * self.n_cells + 1
    }

    /// Gap parameter |t₁ − t₂|.
    pub fn m_eff(&self) -> f64 {
        (self.t1 - self.t2).abs()
    }

    /// Band edge t₁ + t₂.
    pub fn l_eff(&self) -> f64 {
        self.t1 + self.t2
    }

    /// Site index of A_n (system site is 0).
    pub fn a_site(&self, n: usize) -> usize {
        1 + 2 * (n % self.n_cells)
    }

    /// Site index of B_n.
    pub fn b_site(&self, n: usize) -> usize {
        2 + 2 * (n % self.n_cells)
    }
}

/// Real symmetric Hamiltonian: ω₀ on the system site, g to A₀, t₁ within a
/// cell, t₂ from B_n to A_{n+1} with A_N ≡ A₀.
pub fn build_hamiltonian(chain: &SshChain) -> Mat<f64> {
    let mut h = Mat::<f64>::zeros(chain.dim(), chain.dim());
    let mut link = |i: usize, j: usize, v: f64| {
        h.write(i, j, h.read(i, j) + v);
        h.write(j, i, h.read(j, i) + v);
    };
    for n in 0..chain.n_cells {
        link(chain.a_site(n), chain.b_site(n), chain.t1);
        link(chain.b_site(n), chain.a_site(n + 1), chain.t2);
    }
    link(0, chain.a_site(0), chain.g);
    h.write(0, 0, chain.omega0);
    h
}

/// Eigenvalues and the system-site weights |⟨0|v_j⟩|².
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpectrum {
    pub energies: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Diagonalizes H and keeps the spectral measure of the system site.
pub fn system_spectrum(chain: &SshChain) -> Result<SystemSpectrum> {
    let h = build_hamiltonian(chain);
    let eig = h.selfadjoint_eigendecomposition(Side::Lower);
    let s = eig.s().column_vector();
    let u = eig.u();
    let n = chain.dim();
    let energies: Vec<f64> = (0..n).map(|j| s.read(j)).collect();
    let weights: Vec<f64> = (0..n).map(|j| u.read(0, j).powi(2)).collect();
    let total: f64 = weights.iter().sum();
    if !energies.iter().all(|e| e.is_finite()) || (total - 1.0).abs() > 1e-8 {
        return Err(DecayError::Eigen(format!(
            "eigendecomposition lost normalization (sum of weights = {total})"
        )));
    }
    Ok(SystemSpectrum { energies, weights })
}

/// Φ(l) = e^{iω₀l}Σ_j |⟨0|v_j⟩|² e^{−iE_j l} on an increasing depth grid.
pub fn survival_vs_depth(chain: &SshChain, l_grid: &[f64]) -> Result<ComplexSeries> {
    if l_grid.is_empty() || l_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(DecayError::InvalidParam("depth grid must be strictly increasing".into()));
    }
    let spec = system_spectrum(chain)?;
    Ok(amplitudes_from_spectrum(chain, &spec, l_grid))
}

/// Evaluates the amplitude on a grid from a precomputed spectrum.
pub fn amplitudes_from_spectrum(chain: &SshChain, spec: &SystemSpectrum, l_grid: &[f64]) -> ComplexSeries {
    let values = l_grid
        .iter()
        .map(|&l| {
            let sum: Complex64 = spec
                .energies
                .iter()
                .zip(&spec.weights)
                .map(|(e, w)| Complex64::from_polar(*w, -e * l))
                .sum();
            sum * Complex64::from_polar(1.0, chain.omega0 * l)
        })
        .collect();
    let grid = TimeGrid::new(l_grid.to_vec(), Scaling::Physical).expect("validated grid");
    ComplexSeries::new(grid, values, Picture::Interaction, 1e-10).expect("matching lengths")
}

/// Full state vector at depth l (for unitarity checks), starting on the system site.
pub fn state_at_depth(chain: &SshChain, l: f64) -> Result<Vec<Complex64>> {
    let h = build_hamiltonian(chain);
    let eig = h.selfadjoint_eigendecomposition(Side::Lower);
    let s = eig.s().column_vector();
    let u = eig.u();
    let n = chain.dim();
    let mut psi = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        let c = Complex64::from_polar(u.read(0, j), -s.read(j) * l);
        for (i, p) in psi.iter_mut().enumerate() {
            *p += c * u.read(i, j);
        }
    }
    Ok(psi)
}

/// Indices of envelope points: local maxima that exceed every later sample.
///
/// A series with no interior maxima (monotone) uses every point.
pub fn envelope_indices(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    let maxima: Vec<usize> = (1..n.saturating_sub(1))
        .filter(|&i| values[i] >= values[i - 1] && values[i] > values[i + 1])
        .collect();
    if maxima.is_empty() {
        return (0..n).collect();
    }
    let mut keep = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for &i in maxima.iter().rev() {
        if values[i] > best {
            keep.push(i);
            best = values[i];
        }
    }
    keep.reverse();
    keep
}

/// Least-squares slope of ln P against ln l over envelope maxima in [l_min, l_max].
///
/// Returns (exponent, standard error).
pub fn fit_power_law(l: &[f64], p: &[f64], l_min: f64, l_max: f64) -> Result<(f64, f64)> {
    if l.len() != p.len() {
        return Err(DecayError::InvalidParam("depth and probability lengths differ".into()));
    }
    let idx: Vec<usize> = (0..l.len()).filter(|&i| l[i] >= l_min && l[i] <= l_max).collect();
    if idx.iter().any(|&i| !(p[i] > 0.0) || !(l[i] > 0.0)) {
        return Err(DecayError::InvalidParam("power-law fit needs P > 0 and l > 0".into()));
    }
    let window: Vec<f64> = idx.iter().map(|&i| p[i]).collect();
    let env = envelope_indices(&window);
    if env.len() < 4 {
        return Err(DecayError::InsufficientData(format!(
            "{} envelope points in [{l_min}, {l_max}], need 4",
            env.len()
        )));
    }
    let xs: Vec<f64> = env.iter().map(|&k| l[idx[k]].ln()).collect();
    let ys: Vec<f64> = env.iter().map(|&k| window[k].ln()).collect();
    let (slope, _, stderr, _) = linear_fit(&xs, &ys);
    Ok((slope, stderr))
}

/// Ordinary least squares y = a·x + b; returns (a, b, stderr(a), R²).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let a = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let b = my - a * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a * x - b).powi(2)).sum();
    let stderr = if xs.len() > 2 && sxx > 0.0 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    (a, b, stderr, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamiltonian_is_symmetric_with_expected_links() {
        let c = SshChain::new(5, 0.2, 0.3, 0.1, 0.05).unwrap();
        let h = build_hamiltonian(&c);
        for i in 0..c.dim() {
            for j in 0..c.dim() {
                assert_eq!(h.read(i, j), h.read(j, i));
            }
        }
        assert_eq!(h.read(0, 0), 0.05);
        assert_eq!(h.read(0, 1), 0.1);
        assert_eq!(h.read(1, 2), 0.2);
        assert_eq!(h.read(2, 3), 0.3);
        assert_eq!(h.read(c.b_site(4), c.a_site(0)), 0.3);
    }

    #[test]
    fn decoupled_chain_survives() {
        let c = SshChain::new(4, 0.0, 0.0, 0.0, 0.3).unwrap();
        let s = survival_vs_depth(&c, &[0.5, 1.0, 7.0]).unwrap();
        for p in s.survival() {
            assert!((p - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_power_law_fit() {
        let l: Vec<f64> = (1..=200).map(|i| i as f64 * 0.5).collect();
        let p: Vec<f64> = l.iter().map(|x| x.powf(-3.0)).collect();
        let (k, _) = fit_power_law(&l, &p, 2.0, 80.0).unwrap();
        assert!((k + 3.0).abs() < 1e-10);
        let flat = vec![0.4; l.len()];
        let (k, _) = fit_power_law(&l, &flat, 2.0, 80.0).unwrap();
        assert!(k.abs() < 1e-12);
    }
}
