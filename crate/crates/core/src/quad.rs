//! Adaptive Gauss-Kronrod quadrature for complex integrands, Wynn epsilon
//! acceleration and semi-infinite tails.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208980864390,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

/// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// Outcome of an integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

/// One 21-point Kronrod panel with its embedded 10-point Gauss error estimate.
pub fn gk21<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[10];
    let mut g = Complex64::new(0.0, 0.0);
    for i in 0..10 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[i];
        if i % 2 == 1 {
            g += s * WG[i / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    (k, (k - g).norm())
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive GK21 over the panels delimited by `breakpoints` (sorted).
/// Stops when the summed error estimate is below max(abs_tol, rel_tol·|I|)
/// or when `max_panels` is reached (then `converged` is false).
pub fn adaptive<F: Fn(f64) -> Complex64>(
    f: &F,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> QuadResult {
    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut evals = 0;
    for w in breakpoints.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk21(f, w[0], w[1]);
        evals += 21;
        total += v;
        err += e;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    let target = |t: Complex64| abs_tol.max(rel_tol * t.norm());
    while err > target(total) && heap.len() < max_panels {
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk21(f, worst.a, mid);
        let (v2, e2) = gk21(f, mid, worst.b);
        evals += 42;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed accumulated rounding in the running totals.
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for p in heap.iter() {
        value += p.value;
        error += p.error;
    }
    QuadResult {
        value,
        error,
        evals,
        converged: error <= target(value),
    }
}

/// Adaptive integral over [a, b] split into `n` equal initial panels.
pub fn adaptive_uniform<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    n: usize,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> QuadResult {
    let n = n.max(1);
    let bp: Vec<f64> = (0..=n)
        .map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
        .collect();
    adaptive(f, &bp, abs_tol, rel_tol, max_panels.max(n + 1))
}

/// Real-valued convenience wrapper.
pub fn adaptive_real<F: Fn(f64) -> f64>(
    f: &F,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> (f64, f64, bool) {
    let g = |x: f64| Complex64::new(f(x), 0.0);
    let r = adaptive(&g, breakpoints, abs_tol, rel_tol, max_panels);
    (r.value.re, r.error, r.converged)
}

/// Wynn epsilon extrapolation of a sequence of partial sums. Returns the
/// estimate of the limit and the spread between the last two estimates.
pub fn wynn_epsilon(s: &[Complex64]) -> (Complex64, f64) {
    let n = s.len();
    if n == 0 {
        return (Complex64::new(0.0, 0.0), f64::INFINITY);
    }
    if n < 3 {
        let last = s[n - 1];
        let spread = if n == 2 { (s[1] - s[0]).norm() } else { f64::INFINITY };
        return (last, spread);
    }
    // prev = column k-1, cur = column k; even columns hold estimates.
    let zero = Complex64::new(0.0, 0.0);
    let mut prev: Vec<Complex64> = vec![zero; n + 1];
    let mut cur: Vec<Complex64> = s.to_vec();
    let mut estimates: Vec<Complex64> = vec![s[n - 1]];
    let mut k = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        let mut broke = false;
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d.norm() == 0.0 {
                broke = true;
                break;
            }
            next.push(prev[i + 1] + d.inv());
        }
        if broke {
            break;
        }
        k += 1;
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            if let Some(last) = cur.last() {
                if last.re.is_finite() && last.im.is_finite() {
                    estimates.push(*last);
                }
            }
        }
    }
    let m = estimates.len();
    if m >= 2 {
        (estimates[m - 1], (estimates[m - 1] - estimates[m - 2]).norm())
    } else {
        (estimates[0], (s[n - 1] - s[n - 2]).norm())
    }
}

/// ∫_a^{a + dir·∞} g(y) dy for an integrand oscillating with half-period
/// `cycle`, by summing over cycles and extrapolating the partial sums.
pub fn oscillatory_tail<F: Fn(f64) -> Complex64>(
    g: &F,
    a: f64,
    dir: f64,
    cycle: f64,
    abs_tol: f64,
    max_cycles: usize,
) -> QuadResult {
    let mut partial = Vec::new();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut evals = 0;
    let mut small_run = 0;
    let mut last_est: Option<Complex64> = None;
    for k in 0..max_cycles {
        let lo = a + dir * cycle * k as f64;
        let hi = a + dir * cycle * (k + 1) as f64;
        let (x0, x1) = if dir > 0.0 { (lo, hi) } else { (hi, lo) };
        let r = adaptive(g, &[x0, x1], abs_tol * 1e-2, 1e-12, 400);
        evals += r.evals;
        let term = r.value;
        sum += term;
        partial.push(sum);
        if term.norm() < abs_tol * 1e-3 {
            small_run += 1;
            if small_run >= 3 {
                return QuadResult {
                    value: sum,
                    error: term.norm() * 3.0,
                    evals,
                    converged: true,
                };
            }
        } else {
            small_run = 0;
        }
        if partial.len() >= 6 {
            let (est, spread) = wynn_epsilon(&partial);
            if let Some(prev) = last_est {
                let diff: f64 = (est - prev).norm();
                if diff.max(spread) < abs_tol {
                    return QuadResult {
                        value: est,
                        error: diff.max(spread),
                        evals,
                        converged: true,
                    };
                }
            }
            last_est = Some(est);
        }
    }
    let (est, spread) = wynn_epsilon(&partial);
    QuadResult {
        value: est,
        error: spread,
        evals,
        converged: spread < abs_tol,
    }
}

/// ∫_a^∞ g(y) dy for a non-oscillatory integrand, via y = a + (1-u)/u.
pub fn mapped_tail<F: Fn(f64) -> Complex64>(g: &F, a: f64, scale: f64, abs_tol: f64) -> QuadResult {
    let h = |u: f64| {
        if u <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let y = a + scale * (1.0 - u) / u;
        g(y) * (scale / (u * u))
    };
    adaptive(&h, &[0.0, 0.25, 0.5, 0.75, 1.0], abs_tol, 1e-12, 2000)
}

/// Composite Simpson weights for an odd number of equispaced points.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 3 && n % 2 == 1, "Simpson needs an odd point count >= 3");
    (0..n)
        .map(|i| {
            let c = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_exact_for_degree_31() {
        for p in [0, 5, 19, 30, 31] {
            let f = |x: f64| Complex64::new(x.powi(p), 0.0);
            let (v, _) = gk21(&f, 0.0, 1.0);
            let exact = 1.0 / (p as f64 + 1.0);
            assert!((v.re - exact).abs() < 1e-14, "degree {p}");
        }
    }

    #[test]
    fn gauss_part_exact_for_degree_19() {
        // The estimate |K - G| vanishes when both rules are exact.
        let f = |x: f64| Complex64::new(x.powi(19) + x.powi(4), 0.0);
        let (_, e) = gk21(&f, -0.3, 1.2);
        assert!(e < 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let f = |x: f64| Complex64::new(1.0 / x.sqrt(), 0.0);
        let r = adaptive(&f, &[0.0, 1.0], 1e-10, 1e-12, 500);
        assert!((r.value.re - 2.0).abs() < 1e-9);
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // ln 2 = 1 - 1/2 + 1/3 - ...
        let mut s = Vec::new();
        let mut acc = 0.0;
        for k in 1..=20 {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign / k as f64;
            s.push(Complex64::new(acc, 0.0));
        }
        let (v, _) = wynn_epsilon(&s);
        assert!((v.re - std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn fourier_tail_of_decaying_oscillation() {
        // ∫_1^∞ e^{iy}/y² dy; real part is cos 1 - (π/2 - Si 1).
        let g = |y: f64| Complex64::from_polar(1.0 / (y * y), y);
        let r = oscillatory_tail(&g, 1.0, 1.0, std::f64::consts::PI, 1e-11, 400);
        // Frozen from an mpmath quadosc evaluation at 30 digits.
        let exact = Complex64::new(-0.08441095055957389, 0.5040670619069284);
        assert!((r.value - exact).norm() < 1e-9, "{:?}", r.value);
    }

    #[test]
    fn simpson_weights_integrate_cubics() {
        let w = simpson_weights(5, 0.25);
        let s: f64 = (0..5).map(|i| w[i] * (0.25 * i as f64).powi(3)).sum();
        assert!((s - 0.25).abs() < 1e-15);
    }
}
