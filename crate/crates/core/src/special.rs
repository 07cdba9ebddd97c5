//! Scalar kernels used by the closed-form model: principal-branch Lambert-W,
//! integer-shape regularized incomplete gamma functions and generalized
//! harmonic sums.

use std::f64::consts::E;

use crate::error::{Error, Result};

pub const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

const HALLEY_MAX_ITER: usize = 64;

/// Principal branch of the Lambert-W function, `w·e^w = x` with `w ≥ −1`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if x.is_nan() || x < branch {
        return Err(Error::domain("lambert_w0", format!("x = {x} < -1/e")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == branch {
        return Ok(-1.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }

    let seed = if x < 0.0 {
        // series about the branch point
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x <= E {
        x.ln_1p()
    } else {
        let l = x.ln();
        l - l.ln()
    };

    let tol = 1e-12 * x.abs().max(1.0);
    let w = halley(x, seed);
    if (w * w.exp() - x).abs() <= tol && w >= -1.0 {
        return Ok(w);
    }
    Ok(bisect_w(x))
}

fn halley(x: f64, mut w: f64) -> f64 {
    for _ in 0..HALLEY_MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs().max(1e-300) {
            break;
        }
    }
    w
}

fn bisect_w(x: f64) -> f64 {
    let mut lo = -1.0;
    let mut hi = if x <= E { 1.0 } else { x.ln() };
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mid * mid.exp() > x {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `W(e^a)` without forming `e^a`, so that very large log-arguments do not
/// overflow. Solves `w + ln w = a`.
pub fn lambert_w0_exp(a: f64) -> Result<f64> {
    if a.is_nan() {
        return Err(Error::domain("lambert_w0_exp", "NaN argument"));
    }
    if a < 700.0 {
        return lambert_w0(a.exp());
    }
    let mut w = a - a.ln();
    for _ in 0..HALLEY_MAX_ITER {
        let g = w + w.ln() - a;
        let step = g / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w {
            break;
        }
    }
    Ok(w)
}

/// `e^{-x} Σ_{i<k} x^i / i!`, evaluated with log-domain terms.
fn poisson_head(k: u32, x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let lx = x.ln();
    let mut log_term = -x;
    let mut acc = CompensatedSum::new();
    acc.add(log_term.exp());
    for i in 1..k {
        log_term += lx - f64::from(i).ln();
        acc.add(log_term.exp());
    }
    acc.value().clamp(0.0, 1.0)
}

fn check_gamma_args(func: &'static str, k: u32, x: f64) -> Result<()> {
    if k < 1 {
        return Err(Error::domain(func, "shape k must be >= 1"));
    }
    if !(x >= 0.0) {
        return Err(Error::domain(func, format!("x = {x} must be >= 0")));
    }
    Ok(())
}

/// Regularized upper incomplete gamma `Γ(k,x)/Γ(k)` for integer shape.
pub fn upper_reg_gamma_int(k: u32, x: f64) -> Result<f64> {
    check_gamma_args("upper_reg_gamma_int", k, x)?;
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(poisson_head(k, x))
}

/// Regularized lower incomplete gamma, the complement of
/// [`upper_reg_gamma_int`].
pub fn lower_reg_gamma_int(k: u32, x: f64) -> Result<f64> {
    Ok(1.0 - upper_reg_gamma_int(k, x)?)
}

/// `Σ_{j=1}^{n} j^{-δ}`.
pub fn harmonic_sum(n: u64, delta: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::domain("harmonic_sum", "n must be >= 1"));
    }
    if !(delta >= 0.0) || delta.is_infinite() {
        return Err(Error::domain("harmonic_sum", format!("skew {delta} must be finite and >= 0")));
    }
    if delta == 0.0 {
        return Ok(n as f64);
    }
    // smallest terms first
    Ok((1..=n).rev().map(|j| (j as f64).powf(-delta)).collect::<CompensatedSum>().value())
}
