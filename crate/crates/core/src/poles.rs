//! Poles of the resolvent: quartic roots with sheet assignment in the massive
//! no-cutoff regime and the imaginary pole pair of the massless cutoff regime.

use std::f64::consts::PI;

use faer::complex_native::c64;
use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use roots::{find_root_brent, SimpleConvergency};

use crate::error::{DecayError, Result};
use crate::model::{to_dimensionless, ModelParams, Regime};
use crate::resolvent::{four_arctan_cut, split_sqrt, SheetId};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Role of a pole in the spectral decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoleLabel {
    BoundZ0,
    ImagZ1,
    ResonantZPlus,
    AntiresonantZMinus,
    UpperIx1,
    LowerIx2,
    /// Complex principal-sheet pole of the cutoff regime, off the imaginary axis.
    CutoffComplex,
}

/// A located pole (z dimensionless, in units of g²/ħ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub z: Complex64,
    pub sheet: SheetId,
    /// Residue of F(z) at the pole; zero for poles off the principal sheet.
    pub residue: Complex64,
    pub label: PoleLabel,
}

/// Poles of one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet {
    pub regime: Regime,
    pub poles: Vec<Pole>,
    /// Quartic discriminant (massive no-cutoff regime only).
    pub discriminant: Option<f64>,
}

impl PoleSet {
    pub fn get(&self, label: PoleLabel) -> Option<&Pole> {
        self.poles.iter().find(|p| p.label == label)
    }

    /// Poles on the principal sheet (𝓡₊ or the principal arctangent sheet).
    pub fn principal(&self) -> impl Iterator<Item = &Pole> {
        self.poles.iter().filter(|p| p.sheet.0 >= 0)
    }
}

/// Coefficients of 𝒫(z) = (z + iw)²(z² + μ²) − 4π²z², highest power first.
pub fn quartic_coefficients(w: f64, mu: f64) -> [Complex64; 5] {
    [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 2.0 * w),
        Complex64::new(mu * mu - w * w - 4.0 * PI * PI, 0.0),
        Complex64::new(0.0, 2.0 * w * mu * mu),
        Complex64::new(-w * w * mu * mu, 0.0),
    ]
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = c[0];
    let mut dp = Complex64::new(0.0, 0.0);
    for &ci in &c[1..] {
        dp = dp * z + p;
        p = p * z + ci;
    }
    (p, dp)
}

/// 𝒫(z) and 𝒫'(z).
pub fn quartic_eval(w: f64, mu: f64, z: Complex64) -> (Complex64, Complex64) {
    horner(&quartic_coefficients(w, mu), z)
}

/// Quartic discriminant with a = w²μ², b± = w² ± μ².
pub fn discriminant(w: f64, mu: f64) -> f64 {
    let a = w * w * mu * mu;
    let bm = w * w - mu * mu;
    let bp = w * w + mu * mu;
    let p2 = PI * PI;
    -64.0 * p2 * a * (bm.powi(3) + 48.0 * p2 * p2 * bm + 12.0 * p2 * (bp * bp + 5.0 * a) + 64.0 * p2 * p2 * p2)
}

/// F₊⁻¹ and F₋⁻¹ at z.
fn sheet_residuals(w: f64, mu: f64, z: Complex64) -> (f64, f64) {
    let s = split_sqrt(z, mu);
    let base = z + I * w;
    let term = 2.0 * PI * z / s;
    ((base + term).norm(), (base - term).norm())
}

/// Pole set of the regime: quartic roots (massive) or cutoff poles (cutoff).
pub fn find_poles(params: &ModelParams) -> Result<PoleSet> {
    match params.regime() {
        Regime::MassiveNocut => quartic_roots(params),
        Regime::MasslessCut => cutoff_poles(params),
        r => Err(DecayError::Regime {
            regime: r.to_string(),
            reason: "pole structure is certified only for MASSIVE_NOCUT and MASSLESS_CUT".into(),
        }),
    }
}

/// Roots of 𝒫 (companion eigenvalues + Newton polish), sheet assignment and labels.
pub fn quartic_roots(params: &ModelParams) -> Result<PoleSet> {
    if params.regime() != Regime::MassiveNocut {
        return Err(DecayError::Regime {
            regime: params.regime().to_string(),
            reason: "quartic poles exist only for m > 0 without cutoff".into(),
        });
    }
    let d = params.dimensionless();
    let (w, mu) = (d.w, d.mu);
    let c = quartic_coefficients(w, mu);
    let comp = Mat::<c64>::from_fn(4, 4, |i, j| {
        if i == 0 {
            let v = -c[j + 1];
            c64::new(v.re, v.im)
        } else if i == j + 1 {
            c64::new(1.0, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    });
    let eig = comp.complex_eigenvalues();
    let maxc = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut roots = Vec::with_capacity(4);
    for e in eig {
        let mut z = Complex64::new(e.re, e.im);
        for _ in 0..8 {
            let (p, dp) = horner(&c, z);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            z -= step;
            if step.norm() <= 1e-16 * z.norm().max(1.0) {
                break;
            }
        }
        let res = horner(&c, z).0.norm();
        let limit = 1e-8 * maxc;
        if res > limit {
            return Err(DecayError::RootPolish {
                residual: res,
                limit,
            });
        }
        roots.push(z);
    }

    let scale = 1.0 + roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let mut sheets = Vec::with_capacity(4);
    for &z in &roots {
        let (rp, rm) = sheet_residuals(w, mu, z);
        let tol = 1e-8 * scale;
        if rp < tol && rm < tol {
            return Err(DecayError::AmbiguousSheet(format!("{z}")));
        }
        if rp.min(rm) > 1e-6 * scale {
            return Err(DecayError::RootPolish {
                residual: rp.min(rm),
                limit: 1e-6 * scale,
            });
        }
        sheets.push(if rp < rm { SheetId::PLUS } else { SheetId::MINUS });
    }

    let imag_tol = 1e-9 * scale;
    let is_imag = |z: &Complex64| z.re.abs() <= imag_tol;
    // Bound state: the imaginary 𝓡₊ root inside the gap.
    let z0_idx = (0..4)
        .filter(|&i| sheets[i] == SheetId::PLUS && is_imag(&roots[i]))
        .filter(|&i| roots[i].im < 0.0 && roots[i].im.abs() < mu)
        .min_by(|&a, &b| roots[a].im.abs().total_cmp(&roots[b].im.abs()))
        .ok_or_else(|| DecayError::AmbiguousSheet("no imaginary bound root on R+".into()))?;
    let mut labels = [PoleLabel::BoundZ0; 4];
    let rest: Vec<usize> = (0..4).filter(|&i| i != z0_idx).collect();
    let imag_rest: Vec<usize> = rest.iter().copied().filter(|&i| is_imag(&roots[i])).collect();
    if imag_rest.len() == 3 {
        let mut sorted = imag_rest.clone();
        sorted.sort_by(|&a, &b| roots[b].im.total_cmp(&roots[a].im));
        labels[sorted[0]] = PoleLabel::ImagZ1;
        labels[sorted[1]] = PoleLabel::ResonantZPlus;
        labels[sorted[2]] = PoleLabel::AntiresonantZMinus;
    } else {
        for &i in &rest {
            labels[i] = if is_imag(&roots[i]) {
                PoleLabel::ImagZ1
            } else if roots[i].re < 0.0 {
                PoleLabel::ResonantZPlus
            } else {
                PoleLabel::AntiresonantZMinus
            };
        }
    }

    let mut poles = Vec::with_capacity(4);
    for i in 0..4 {
        let residue = if sheets[i] == SheetId::PLUS {
            principal_residue(w, mu, &roots, i)?
        } else {
            Complex64::new(0.0, 0.0)
        };
        poles.push(Pole {
            z: roots[i],
            sheet: sheets[i],
            residue,
            label: labels[i],
        });
    }
    Ok(PoleSet {
        regime: Regime::MassiveNocut,
        poles,
        discriminant: Some(discriminant(w, mu)),
    })
}

/// Residue of F₊ at roots[k]: [(z+iw)(μ²+z²) − 2πz√(μ²+z²)] / Π_{j≠k}(z − z_j).
fn principal_residue(w: f64, mu: f64, roots: &[Complex64], k: usize) -> Result<Complex64> {
    let z = roots[k];
    let scale = 1.0 + roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let mut den = Complex64::new(1.0, 0.0);
    let mut min_sep = f64::INFINITY;
    for (j, r) in roots.iter().enumerate() {
        if j != k {
            den *= z - r;
        }
        for q in roots.iter().skip(j + 1) {
            min_sep = min_sep.min((r - q).norm());
        }
    }
    if min_sep < 1e-6 * scale {
        return Err(DecayError::ExceptionalPoint(min_sep));
    }
    let s = split_sqrt(z, mu);
    let num = (z + I * w) * s * s - 2.0 * PI * z * s;
    Ok(num / den)
}

/// Φ_{z₀}(t) = Res[F]·e^{iω₀t/ħ + z₀g²t/ħ}.
pub fn residue_phi_z0(params: &ModelParams, poles: &PoleSet, t: f64) -> Result<Complex64> {
    if params.regime() != Regime::MassiveNocut {
        return Err(DecayError::Regime {
            regime: params.regime().to_string(),
            reason: "bound-state residue needs m > 0 without cutoff".into(),
        });
    }
    let z0 = poles
        .get(PoleLabel::BoundZ0)
        .ok_or_else(|| DecayError::InvalidParam("pole set lacks z0".into()))?;
    if let Some(d) = poles.discriminant {
        if d == 0.0 {
            return Err(DecayError::ExceptionalPoint(0.0));
        }
    }
    let tau = to_dimensionless(t, params);
    let w = params.dimensionless().w;
    Ok(z0.residue * (I * w * tau + z0.z * tau).exp())
}

/// Sum of residue contributions of every principal-sheet pole at time t (either regime).
pub fn principal_pole_sum(params: &ModelParams, poles: &PoleSet, t: f64) -> Complex64 {
    let tau = to_dimensionless(t, params);
    let w = params.dimensionless().w;
    poles
        .principal()
        .map(|p| p.residue * (I * w * tau + p.z * tau).exp())
        .sum()
}

/// Residue weight (x² − L²)/(x² + (4 − L)L) of an imaginary cutoff pole.
pub fn cutoff_residue_weight(x: f64, delta: f64, l: f64) -> f64 {
    // x² − L² = δ(2L + δ) keeps precision when x hugs the branch point.
    delta * (2.0 * l + delta) / (x * x + (4.0 - l) * l)
}

/// Solves for δ = x − L on the log scale s = ln δ.
fn cutoff_root(w_signed: f64, l: f64) -> Result<f64> {
    // Root of x + w_signed − 2 ln((x + L)/(x − L)) with x = L + e^s.
    let f = |s: f64| {
        let delta = s.exp();
        l + delta + w_signed - 2.0 * (2.0 * l + delta).ln() + 2.0 * s
    };
    let lo = l.ln() - 700.0;
    let hi = (l * 999.0).ln();
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo < 0.0 && fhi > 0.0) {
        return Err(DecayError::Bracket(format!(
            "no sign change on x in [L(1+e^-700), 1000L] for w = {w_signed}, L = {l}"
        )));
    }
    let mut conv = SimpleConvergency {
        eps: 1e-15,
        max_iter: 200,
    };
    let s = find_root_brent(lo, hi, f, &mut conv)
        .map_err(|e| DecayError::Bracket(format!("Brent search failed: {e:?}")))?;
    Ok(s.exp())
}

/// The two principal-sheet poles ix₁ and −ix₂ with x₁, x₂ > Λ/g².
pub fn cutoff_poles(params: &ModelParams) -> Result<PoleSet> {
    if params.regime() != Regime::MasslessCut {
        return Err(DecayError::Regime {
            regime: params.regime().to_string(),
            reason: "imaginary pole pair exists for m = 0 with finite cutoff".into(),
        });
    }
    let d = params.dimensionless();
    let l = d.lambda.expect("finite cutoff");
    let d1 = cutoff_root(d.w, l)?;
    let d2 = cutoff_root(-d.w, l)?;
    let (x1, x2) = (l + d1, l + d2);
    let r1 = cutoff_residue_weight(x1, d1, l);
    let r2 = cutoff_residue_weight(x2, d2, l);
    let complex = cutoff_complex_poles(d.w, l, &[Complex64::new(0.0, x1), Complex64::new(0.0, -x2)]);
    let mut poles = vec![
            Pole {
                z: Complex64::new(0.0, x1),
                sheet: SheetId::PRINCIPAL,
                residue: Complex64::new(r1, 0.0),
                label: PoleLabel::UpperIx1,
            },
            Pole {
                z: Complex64::new(0.0, -x2),
                sheet: SheetId::PRINCIPAL,
                residue: Complex64::new(r2, 0.0),
                label: PoleLabel::LowerIx2,
            },
        ];
    poles.extend(complex.into_iter().map(|z| Pole {
        z,
        sheet: SheetId::PRINCIPAL,
        residue: cutoff_denominator_derivative(z, l).inv(),
        label: PoleLabel::CutoffComplex,
    }));
    Ok(PoleSet {
        regime: Regime::MasslessCut,
        poles,
        discriminant: None,
    })
}

fn cutoff_denominator(z: Complex64, w: f64, l: f64) -> Complex64 {
    z + I * w + four_arctan_cut(z, l)
}

fn cutoff_denominator_derivative(z: Complex64, l: f64) -> Complex64 {
    1.0 - 4.0 * l / (z * z + l * l)
}

/// Zeros of z + iw + 4 arctan(L/z) off the imaginary axis on the principal sheet.
///
/// Coarse scan of |G| for local minima over a box that contains every zero,
/// then Newton polish; imaginary roots in `known` are excluded.
fn cutoff_complex_poles(w: f64, l: f64, known: &[Complex64]) -> Vec<Complex64> {
    let r = w.abs() + 4.0 * PI + 2.0 * l.sqrt() + 10.0;
    let n = 801usize;
    let step = 2.0 * r / (n - 1) as f64;
    let at = |i: usize, j: usize| Complex64::new(-r + step * i as f64, -r + step * j as f64);
    let mag: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let v = cutoff_denominator(at(k / n, k % n), w, l).norm();
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let mut found: Vec<Complex64> = Vec::new();
    for i in 1..n - 1 {
        for j in 1..n - 1 {
            let m = mag[i * n + j];
            if !(m < 1.0) {
                continue;
            }
            let is_min = (i - 1..=i + 1)
                .flat_map(|a| (j - 1..=j + 1).map(move |b| (a, b)))
                .all(|(a, b)| mag[a * n + b] >= m);
            if !is_min {
                continue;
            }
            let mut z = at(i, j);
            let mut ok = false;
            for _ in 0..60 {
                let g = cutoff_denominator(z, w, l);
                let dz = g / cutoff_denominator_derivative(z, l);
                z -= dz;
                if !z.is_finite() {
                    break;
                }
                if dz.norm() < 1e-15 * (1.0 + z.norm()) {
                    ok = true;
                    break;
                }
            }
            let scale = 1.0 + z.norm();
            if !ok || cutoff_denominator(z, w, l).norm() > 1e-10 * scale {
                continue;
            }
            if z.re.abs() < 1e-9 * scale
                || known.iter().chain(found.iter()).any(|k| (k - z).norm() < 1e-7 * scale)
            {
                continue;
            }
            found.push(z);
        }
    }
    found.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    found
}

/// Distance of each pole from its branch point, x − L, for the cutoff pair.
pub fn cutoff_gaps(poles: &PoleSet, l: f64) -> Option<(f64, f64)> {
    let x1 = poles.get(PoleLabel::UpperIx1)?.z.im;
    let x2 = -poles.get(PoleLabel::LowerIx2)?.z.im;
    Some((x1 - l, x2 - l))
}

/// Whether the pair is nearly conjugate: |x₁ − x₂| < 10⁻³·x₁.
pub fn is_rabi_pair(poles: &PoleSet) -> bool {
    match (poles.get(PoleLabel::UpperIx1), poles.get(PoleLabel::LowerIx2)) {
        (Some(a), Some(b)) => (a.z.im + b.z.im).abs() < 1e-3 * a.z.im,
        _ => false,
    }
}

/// Pole(t) = e^{iω₀t/ħ}[r₁e^{ix₁τ} + r₂e^{−ix₂τ}].
pub fn pole_contribution_cut(params: &ModelParams, poles: &PoleSet, t: f64) -> Result<Complex64> {
    let up = poles
        .get(PoleLabel::UpperIx1)
        .ok_or_else(|| DecayError::InvalidParam("pole set lacks ix1".into()))?;
    let lo = poles
        .get(PoleLabel::LowerIx2)
        .ok_or_else(|| DecayError::InvalidParam("pole set lacks -ix2".into()))?;
    let tau = to_dimensionless(t, params);
    let w = params.dimensionless().w;
    let phase = Complex64::from_polar(1.0, w * tau);
    Ok(phase * (up.residue * (up.z * tau).exp() + lo.residue * (lo.z * tau).exp()))
}

/// Residual of the r-Lambert form w e^w + r w = α for a cutoff pole.
///
/// For ix₁: w = x₁/2 − L/2, r = −e^{−ω/2 − L/2}; for −ix₂ the same with ω → −ω.
/// The consistent right-hand side is α = −rL.
pub fn r_lambert_residual(params: &ModelParams, pole: &Pole) -> Result<f64> {
    let d = params.dimensionless();
    let l = d
        .lambda
        .ok_or_else(|| DecayError::InvalidParam("finite cutoff required".into()))?;
    let (x, wsign) = match pole.label {
        PoleLabel::UpperIx1 => (pole.z.im, 1.0),
        PoleLabel::LowerIx2 => (-pole.z.im, -1.0),
        _ => return Err(DecayError::InvalidParam("not a cutoff pole".into())),
    };
    let wl = 0.5 * (x - l);
    let r = -(-0.5 * wsign * d.w - 0.5 * l).exp();
    let alpha = -r * l;
    Ok((wl * wl.exp() + r * wl - alpha).abs())
}

/// e^{−|x₁ − x₂|} over a grid of (ω₀/g², Λ/g²); failed cells are None.
pub fn crossover_map(w_grid: &[f64], l_grid: &[f64]) -> Vec<Vec<Option<f64>>> {
    w_grid
        .par_iter()
        .map(|&w| {
            l_grid
                .iter()
                .map(|&l| {
                    let p = ModelParams::from_ratios(w, 1.0, 0.0, Some(l)).ok()?;
                    let poles = cutoff_poles(&p).ok()?;
                    let x1 = poles.get(PoleLabel::UpperIx1)?.z.im;
                    let x2 = -poles.get(PoleLabel::LowerIx2)?.z.im;
                    Some((-(x1 - x2).abs()).exp())
                })
                .collect()
        })
        .collect()
}
