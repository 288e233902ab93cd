//! Small numerical helpers shared across modules.

use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

const TABLE_LEN: usize = 4096;

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![0.0; TABLE_LEN];
        for n in 1..TABLE_LEN {
            t[n] = t[n - 1] + (n as f64).ln();
        }
        t
    })
}

/// `ln(n!)`.
pub fn ln_factorial(n: usize) -> f64 {
    if n < TABLE_LEN {
        return table()[n];
    }
    let x = n as f64 + 1.0;
    // Stirling series for ln Gamma(x)
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
}

/// Binomial pmf `C(n, k) p^k (1-p)^(n-k)` for every `k` in `0..=n`.
pub fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    if p <= 0.0 {
        let mut v = vec![0.0; n + 1];
        v[0] = 1.0;
        return v;
    }
    if p >= 1.0 {
        let mut v = vec![0.0; n + 1];
        v[n] = 1.0;
        return v;
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    (0..=n)
        .map(|k| {
            (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
                + k as f64 * lp
                + (n - k) as f64 * lq)
                .exp()
        })
        .collect()
}

/// Richardson combination of two central-difference estimates at steps `h` and `h/2`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Elementwise derivative of `f` at `x` from central differences at `h` and `h/2`,
/// Richardson-combined. All evaluations must return vectors of equal length.
pub fn richardson_derivative<T, E>(
    f: impl Fn(f64) -> Result<Vec<T>, E>,
    x: f64,
    h: f64,
) -> Result<Vec<T>, E>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let diff = |step: f64| -> Result<Vec<T>, E> {
        let (hi, lo) = (f(x + step)?, f(x - step)?);
        debug_assert_eq!(hi.len(), lo.len());
        Ok(hi.iter().zip(&lo).map(|(&a, &b)| (a - b) * (0.5 / step)).collect())
    };
    let coarse = diff(h)?;
    let fine = diff(0.5 * h)?;
    Ok(fine.iter().zip(&coarse).map(|(&f, &c)| f * (4.0 / 3.0) + c * (-1.0 / 3.0)).collect())
}

/// Golden-section minimisation of a unimodal `f` on `[a, b]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
