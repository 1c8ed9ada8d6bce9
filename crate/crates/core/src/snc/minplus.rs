use crate::error::{Error, Result};

/// A non-negative, non-increasing bounding function on `[0, inf)`.
pub trait TailBound {
    fn eval(&self, x: f64) -> f64;

    /// `Some((scale, rate))` when the function is `scale * exp(-rate x)`.
    fn as_exponential(&self) -> Option<(f64, f64)> {
        None
    }
}

impl<F: Fn(f64) -> f64> TailBound for F {
    fn eval(&self, x: f64) -> f64 {
        self(x)
    }
}

/// `scale * exp(-rate x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTail {
    pub scale: f64,
    pub rate: f64,
}

impl TailBound for ExpTail {
    fn eval(&self, x: f64) -> f64 {
        self.scale * (-self.rate * x).exp()
    }

    fn as_exponential(&self) -> Option<(f64, f64)> {
        Some((self.scale, self.rate))
    }
}

/// Stationary split of `A e^{-a tau} + C e^{-c (x - tau)}`, clamped to `[0, x]`.
fn exponential_split(f: (f64, f64), g: (f64, f64), x: f64) -> Option<f64> {
    let ((fa, fr), (ga, gr)) = (f, g);
    if fa <= 0.0 || ga <= 0.0 || fr <= 0.0 || gr <= 0.0 {
        return None;
    }
    let tau = ((fa * fr).ln() - (ga * gr).ln() + gr * x) / (fr + gr);
    Some(tau.clamp(0.0, x))
}

fn golden_section<F: Fn(f64) -> f64>(h: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (h(c), h(d));
    for _ in 0..iters {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = h(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = h(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `(f ⊗ g)(x) = inf_{0 <= tau <= x} f(tau) + g(x - tau)`.
///
/// Evaluated on `grid + 1` equally spaced splits, then refined: in closed form
/// when both arguments are exponentials, otherwise by golden-section search in
/// the bracket around the best grid point. The result never exceeds the grid
/// minimum.
pub fn minplus_convolve(f: &dyn TailBound, g: &dyn TailBound, x: f64, grid: usize) -> Result<f64> {
    if grid == 0 {
        return Err(Error::InvalidArgument("min-plus grid must have at least one interval".into()));
    }
    if !(x >= 0.0) {
        return Err(Error::InvalidArgument(format!("min-plus argument {x} must be non-negative")));
    }
    let n = grid as f64;
    // tau and x - tau both computed from integer counts so f⊗g and g⊗f see the same pairs
    let value_at = |i: usize| f.eval(x * i as f64 / n) + g.eval(x * (grid - i) as f64 / n);
    let (best_i, mut best) = (0..=grid)
        .map(|i| (i, value_at(i)))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });

    let split = |tau: f64| f.eval(tau) + g.eval(x - tau);
    if let (Some(fe), Some(ge)) = (f.as_exponential(), g.as_exponential()) {
        if let Some(tau) = exponential_split(fe, ge, x) {
            best = best.min(split(tau));
        }
        return Ok(best);
    }
    if grid >= 2 && x > 0.0 {
        let lo = x * best_i.saturating_sub(1) as f64 / n;
        let hi = x * (best_i + 1).min(grid) as f64 / n;
        let (_, v) = golden_section(split, lo, hi, 80);
        best = best.min(v);
    }
    Ok(best)
}

/// Discrete min-plus convolution of two sampled functions on a common grid:
/// `out[k] = min_{i + j = k} a[i] + b[j]` for `k < min(len a, len b)`.
pub fn minplus_sequences(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len().min(b.len());
    (0..len)
        .map(|k| (0..=k).map(|i| a[i] + b[k - i]).fold(f64::INFINITY, f64::min))
        .collect()
}
