//! Parameter grids and exhaustive argmax oracles.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Upper bound on grid length accepted from text.
pub const MAX_GRID_POINTS: usize = 10_000_000;

/// A nonempty, strictly monotone list of finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    values: Vec<f64>,
}

impl Grid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Grid("grid is empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Grid(format!("non-finite grid value {v}")));
        }
        if values.len() > 1 {
            let up = values.windows(2).all(|w| w[1] > w[0]);
            let down = values.windows(2).all(|w| w[1] < w[0]);
            if !up && !down {
                return Err(Error::Grid("grid is not strictly monotone".into()));
            }
        }
        Ok(Self { values })
    }

    /// `n` evenly spaced points from `lo` to `hi` inclusive.
    pub fn linear(lo: f64, hi: f64, n: usize) -> Result<Self> {
        check_count(n)?;
        if n == 1 {
            return Self::new(vec![lo]);
        }
        let step = (hi - lo) / (n - 1) as f64;
        let mut v: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
        v[n - 1] = hi;
        Self::new(v)
    }

    /// `n` logarithmically spaced points from `lo` to `hi` inclusive.
    pub fn log(lo: f64, hi: f64, n: usize) -> Result<Self> {
        check_count(n)?;
        if !(lo > 0.0) || !(hi > 0.0) {
            return Err(Error::Grid(format!("log grid bounds must be positive, got {lo}..{hi}")));
        }
        if n == 1 {
            return Self::new(vec![lo]);
        }
        let (a, b) = (lo.ln(), hi.ln());
        let step = (b - a) / (n - 1) as f64;
        let mut v: Vec<f64> = (0..n).map(|i| (a + step * i as f64).exp()).collect();
        v[0] = lo;
        v[n - 1] = hi;
        Self::new(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Grid("grid needs at least one point".into()));
    }
    if n > MAX_GRID_POINTS {
        return Err(Error::Grid(format!("grid of {n} points exceeds {MAX_GRID_POINTS}")));
    }
    Ok(())
}

/// Parses `log:LO:HI:N`, `lin:LO:HI:N` or a comma-separated list.
pub fn parse_grid(text: &str) -> Result<Grid> {
    let text = text.trim();
    let ranged = |rest: &str, log: bool| -> Result<Grid> {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Grid(format!("expected LO:HI:N, got `{rest}`")));
        }
        let lo = parse_number(parts[0])?;
        let hi = parse_number(parts[1])?;
        let n: usize = parts[2].trim().parse().map_err(|_| Error::Grid(format!("bad point count `{}`", parts[2])))?;
        if log {
            Grid::log(lo, hi, n)
        } else {
            Grid::linear(lo, hi, n)
        }
    };
    if let Some(rest) = text.strip_prefix("log:") {
        return ranged(rest, true);
    }
    if let Some(rest) = text.strip_prefix("lin:") {
        return ranged(rest, false);
    }
    if text.is_empty() {
        return Err(Error::Grid("grid is empty".into()));
    }
    let values = text.split(',').map(parse_number).collect::<Result<Vec<_>>>()?;
    Grid::new(values)
}

fn parse_number(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Grid(format!("bad number `{}`", s.trim())))
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_grid(s)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| format!("{v:e}")).collect();
        f.write_str(&parts.join(","))
    }
}

/// Result of a 1-D grid search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Argmax {
    pub index: usize,
    pub arg: f64,
    pub value: f64,
}

/// Exhaustive maximization over `grid`. NaN values are skipped; ties go to
/// the smaller argument. Returns `None` if every value is NaN.
pub fn grid_argmax<F>(f: F, grid: &Grid) -> Option<Argmax>
where
    F: Fn(f64) -> f64 + Sync,
{
    let values: Vec<f64> = grid.values().par_iter().map(|&x| f(x)).collect();
    let mut best: Option<Argmax> = None;
    for (i, (&x, &v)) in grid.values().iter().zip(&values).enumerate() {
        if v.is_nan() {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => v > b.value || (v == b.value && x < b.arg),
        };
        if better {
            best = Some(Argmax { index: i, arg: x, value: v });
        }
    }
    best
}

/// Result of a 2-D grid search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Argmax2 {
    pub index: (usize, usize),
    pub arg: (f64, f64),
    pub value: f64,
}

/// Exhaustive maximization over the product grid. Ties go to the smaller
/// first argument, then the smaller second argument.
pub fn grid_argmax_2d<F>(f: F, first: &Grid, second: &Grid) -> Option<Argmax2>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let rows: Vec<Vec<f64>> =
        first.values().par_iter().map(|&x| second.values().iter().map(|&y| f(x, y)).collect()).collect();
    let mut best: Option<Argmax2> = None;
    for (i, (&x, row)) in first.values().iter().zip(&rows).enumerate() {
        for (j, (&y, &v)) in second.values().iter().zip(row).enumerate() {
            if v.is_nan() {
                continue;
            }
            let better = match best {
                None => true,
                Some(b) => v > b.value || (v == b.value && (x, y) < b.arg),
            };
            if better {
                best = Some(Argmax2 { index: (i, j), arg: (x, y), value: v });
            }
        }
    }
    best
}
