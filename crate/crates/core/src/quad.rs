//! Adaptive Gauss-Legendre quadrature.
//!
//! The inequality functionals produce three kinds of segment integrals
//! once the law is reduced to the quantile scale: smooth integrands,
//! power-type endpoint singularities `u^{-p}` with `0 < p < 1`, and
//! logarithmic integrands `(c + s ln(1/u))^p` near `u = 0`. The first kind
//! goes straight to composite 15-point Gauss-Legendre with adaptive
//! bisection; the singular kinds are transformed to smooth integrals first
//! (a power substitution and an exponential substitution respectively).

use once_cell::sync::Lazy;

const GL_N: usize = 15;

/// Nodes and weights of the 15-point Gauss-Legendre rule on [-1, 1],
/// computed once by Newton iteration on the Legendre recurrence.
static GL15: Lazy<([f64; GL_N], [f64; GL_N])> = Lazy::new(|| {
    let n = GL_N;
    let mut nodes = [0.0; GL_N];
    let mut weights = [0.0; GL_N];
    for k in 0..n {
        // Chebyshev-like initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pair(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        nodes[k] = x;
        weights[k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
});

/// Returns `(P_n(x), P_n'(x))` via the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Options shared by the quadrature-driven evaluators.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    /// Absolute tolerance target for a whole integral.
    pub tol: f64,
    /// Bisection depth cap per initial interval.
    pub max_depth: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            tol: 1e-10,
            max_depth: 64,
        }
    }
}

/// An integral value and an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
}

impl QuadResult {
    pub const ZERO: QuadResult = QuadResult {
        value: 0.0,
        abs_error: 0.0,
    };

    pub fn exact(value: f64) -> Self {
        QuadResult {
            value,
            abs_error: 0.0,
        }
    }

    pub fn add(&mut self, other: QuadResult) {
        self.value += other.value;
        self.abs_error += other.abs_error;
    }
}

fn gl15_interval(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = &*GL15;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..GL_N {
        acc += weights[i] * f(mid + half * nodes[i]);
    }
    acc * half
}

/// Adaptive bisection with a per-interval error estimate from comparing one
/// 15-point panel against its two halves. A non-finite integrand value
/// propagates to the result with an infinite error estimate.
pub fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> QuadResult {
    if a == b {
        return QuadResult::ZERO;
    }
    let mut budget: i64 = 1 << 21;
    adaptive_rec(f, a, b, tol, max_depth, &mut budget)
}

fn adaptive_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
    budget: &mut i64,
) -> QuadResult {
    let whole = gl15_interval(f, a, b);
    let m = 0.5 * (a + b);
    let halves = gl15_interval(f, a, m) + gl15_interval(f, m, b);
    *budget -= 3 * GL_N as i64;
    if !halves.is_finite() || !whole.is_finite() {
        return QuadResult {
            value: if halves.is_nan() || whole.is_nan() {
                f64::NAN
            } else {
                halves
            },
            abs_error: f64::INFINITY,
        };
    }
    let est = (whole - halves).abs();
    if est <= tol || depth == 0 || *budget <= 0 || m <= a || m >= b {
        return QuadResult {
            value: halves,
            abs_error: est,
        };
    }
    let mut left = adaptive_rec(f, a, m, 0.5 * tol, depth - 1, budget);
    let right = adaptive_rec(f, m, b, 0.5 * tol, depth - 1, budget);
    left.add(right);
    left
}

/// `\int_{u0}^{u1} ((a + b u) / u)^p du` for `a + b u >= 0` on the interval.
///
/// The `u0 = 0` endpoint is the only singular one: for `a > 0` the integrand
/// behaves like `a^p u^{-p}` there, which is integrable exactly when
/// `0 < p < 1` and is removed by the substitution `u = u1 t^{1/(1-p)}`.
pub fn ratio_pow_integral(a: f64, b: f64, u0: f64, u1: f64, p: f64, opts: &QuadOptions) -> QuadResult {
    debug_assert!(u0 >= 0.0 && u1 >= u0);
    if u1 == u0 {
        return QuadResult::ZERO;
    }
    if u0 == 0.0 {
        if a == 0.0 {
            // Ratio is identically b.
            return QuadResult::exact(b.powf(p) * (u1 - u0));
        }
        if a < 0.0 {
            return QuadResult {
                value: f64::NAN,
                abs_error: f64::INFINITY,
            };
        }
        if p >= 1.0 {
            // Non-integrable u^{-p} singularity with positive numerator.
            return QuadResult {
                value: f64::INFINITY,
                abs_error: 0.0,
            };
        }
        let q = 1.0 / (1.0 - p);
        let scale = u1.powf(1.0 - p) * q;
        let g = |t: f64| {
            let base = (a + b * u1 * t.powf(q)).max(0.0);
            base.powf(p)
        };
        let r = adaptive(&g, 0.0, 1.0, opts.tol / scale.max(1e-300), opts.max_depth);
        return QuadResult {
            value: scale * r.value,
            abs_error: scale * r.abs_error,
        };
    }
    let g = |u: f64| ((a + b * u).max(0.0) / u).powf(p);
    adaptive(&g, u0, u1, opts.tol, opts.max_depth)
}

/// `\int_0^{u1} (r1 + s ln(u1 / u))^p du` with `r1, s >= 0`.
///
/// Substituting `u = u1 e^{-w}` turns the logarithmic endpoint at `u = 0`
/// into `u1 \int_0^\infty (r1 + s w)^p e^{-w} dw`; the upper limit is cut at
/// `w = 700`, far below double-precision underflow of the weight.
pub fn log_pow_integral(r1: f64, s: f64, u1: f64, p: f64, opts: &QuadOptions) -> QuadResult {
    if u1 == 0.0 {
        return QuadResult::ZERO;
    }
    if s == 0.0 {
        return QuadResult::exact(r1.powf(p) * u1);
    }
    let g = |w: f64| (r1 + s * w).powf(p) * (-w).exp();
    let mut total = QuadResult::ZERO;
    // Geometric panels concentrate effort where the weight lives.
    let cuts = [
        0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 700.0,
    ];
    let tol_piece = opts.tol / (u1.max(1e-300) * (cuts.len() - 1) as f64);
    for w in cuts.windows(2) {
        total.add(adaptive(&g, w[0], w[1], tol_piece, opts.max_depth));
    }
    QuadResult {
        value: u1 * total.value,
        abs_error: u1 * total.abs_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gl15_is_exact_for_low_degree_polynomials() {
        // Degree up to 2n-1 = 29.
        for k in 0..=29u32 {
            let r = gl15_interval(&|x| x.powi(k as i32), 0.0, 1.0);
            let exact = 1.0 / (k as f64 + 1.0);
            assert!((r - exact).abs() < 1e-13, "k={k}: {r} vs {exact}");
        }
        let (_, weights) = &*GL15;
        let sum: f64 = weights.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_smooth_and_kinked() {
        let r = adaptive(&|x: f64| x.sin(), 0.0, PI, 1e-12, 64);
        assert!((r.value - 2.0).abs() < 1e-12);
        let r = adaptive(&|x: f64| x.abs(), -1.0, 2.0, 1e-12, 64);
        assert!((r.value - 2.5).abs() < 1e-12);
    }

    #[test]
    fn ratio_pow_reproduces_beta_integral() {
        // int_0^1 ((1-u)/u)^{1/2} du = pi/2.
        let r = ratio_pow_integral(1.0, -1.0, 0.0, 1.0, 0.5, &QuadOptions::default());
        assert!((r.value - PI / 2.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn ratio_pow_constant_ratio_is_exact() {
        let r = ratio_pow_integral(0.0, 3.0, 0.0, 0.25, 2.0, &QuadOptions::default());
        assert_eq!(r.value, 9.0 * 0.25);
        assert_eq!(r.abs_error, 0.0);
    }

    #[test]
    fn ratio_pow_divergent_case() {
        let r = ratio_pow_integral(1.0, 0.0, 0.0, 1.0, 1.5, &QuadOptions::default());
        assert!(r.value.is_infinite());
    }

    #[test]
    fn log_pow_reproduces_gamma_values() {
        // int_0^1 (-ln u)^2 du = Gamma(3) = 2.
        let r = log_pow_integral(0.0, 1.0, 1.0, 2.0, &QuadOptions::default());
        assert!((r.value - 2.0).abs() < 1e-10, "{}", r.value);
        // int_0^1 sqrt(-ln u) du = Gamma(3/2) = sqrt(pi)/2.
        let r = log_pow_integral(0.0, 1.0, 1.0, 0.5, &QuadOptions::default());
        assert!((r.value - PI.sqrt() / 2.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn non_finite_integrand_propagates() {
        let f = |x: f64| if x < 0.5 { f64::INFINITY } else { 1.0 };
        let r = adaptive(&f, 0.0, 1.0, 1e-10, 24);
        assert!(r.value.is_infinite());
        assert!(r.abs_error.is_infinite());
    }
}
