/// Streaming mean/variance with an associative merge, so per-worker partial
/// results can be combined in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&self, other: &RunningStats) -> RunningStats {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * self.count as f64 * other.count as f64 / n as f64;
        RunningStats { count: n, mean, m2 }
    }

    /// Pairwise merge in slice order.
    pub fn merge_all(parts: &[RunningStats]) -> RunningStats {
        match parts.len() {
            0 => RunningStats::new(),
            1 => parts[0],
            n => {
                let (a, b) = parts.split_at(n / 2);
                Self::merge_all(a).merge(&Self::merge_all(b))
            }
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return f64::INFINITY;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = RunningStats::new();
        for x in iter {
            s.push(x);
        }
        s
    }
}

/// Estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl From<RunningStats> for Estimate {
    fn from(s: RunningStats) -> Self {
        Estimate { mean: s.mean(), std_error: s.std_error() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_matches_sequential() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let whole: RunningStats = xs.iter().copied().collect();
        let parts: Vec<RunningStats> = xs.chunks(64).map(|c| c.iter().copied().collect()).collect();
        let merged = RunningStats::merge_all(&parts);
        assert_eq!(merged.count(), whole.count());
        assert!((merged.mean() - whole.mean()).abs() < 1e-12);
        assert!((merged.variance() - whole.variance()).abs() < 1e-9);
    }

    #[test]
    fn empty_and_single() {
        let e = RunningStats::new();
        assert_eq!(e.merge(&e).count(), 0);
        let one: RunningStats = [2.0].into_iter().collect();
        assert_eq!(one.variance(), 0.0);
        assert_eq!(e.merge(&one), one);
    }
}
