//! Zipf-like content popularity, cache hit ratios and the content-update
//! energy estimate.

use rand::Rng;

use crate::error::{Error, Result};
use crate::special::{harmonic_sum, CompensatedSum};

/// Bits in one megabyte (10^6 bytes).
pub const BITS_PER_MB: f64 = 8.0e6;

/// Content catalog and per-BS cache size. Contents are equal-size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContentConfig {
    pub catalog_size: u64,
    /// Bits per content.
    pub content_size: f64,
    pub skew: f64,
    /// Number of most popular contents cached at each BS.
    pub cached_count: u64,
}

impl ContentConfig {
    pub fn new(catalog_size: u64, content_size: f64, skew: f64, cached_count: u64) -> Result<Self> {
        let cfg = Self { catalog_size, content_size, skew, cached_count };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.catalog_size < 1 {
            return Err(Error::InvalidConfig("catalog_size must be >= 1".into()));
        }
        if !(self.content_size > 0.0) || !self.content_size.is_finite() {
            return Err(Error::InvalidConfig("content_size must be positive".into()));
        }
        if !(self.skew >= 0.0) || !self.skew.is_finite() {
            return Err(Error::InvalidConfig("skew must be finite and >= 0".into()));
        }
        if self.cached_count > self.catalog_size {
            return Err(Error::InvalidConfig(format!(
                "cached_count {} exceeds catalog_size {}",
                self.cached_count, self.catalog_size
            )));
        }
        Ok(())
    }

    /// Normalized cache capacity `N_c / N_f`.
    pub fn eta(&self) -> f64 {
        self.cached_count as f64 / self.catalog_size as f64
    }

    /// Same catalog with `round(eta · N_f)` cached contents.
    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidConfig(format!("normalized cache capacity {eta} outside [0,1]")));
        }
        self.cached_count = (eta * self.catalog_size as f64).round() as u64;
        Ok(self)
    }

    pub fn with_cached(mut self, cached_count: u64) -> Result<Self> {
        self.cached_count = cached_count;
        self.validate()?;
        Ok(self)
    }

    /// Bits held in one BS cache.
    pub fn cache_bits(&self) -> f64 {
        self.cached_count as f64 * self.content_size
    }
}

/// Probability of requesting the content of rank `rank` (1-based).
pub fn zipf_pmf(rank: u64, cfg: &ContentConfig) -> Result<f64> {
    if rank < 1 || rank > cfg.catalog_size {
        return Err(Error::domain("zipf_pmf", format!("rank {rank} outside 1..={}", cfg.catalog_size)));
    }
    Ok((rank as f64).powf(-cfg.skew) / harmonic_sum(cfg.catalog_size, cfg.skew)?)
}

/// Probability that a request hits a cache holding the `N_c` most popular
/// contents.
pub fn hit_ratio(cfg: &ContentConfig) -> Result<f64> {
    cfg.validate()?;
    if cfg.cached_count == 0 {
        return Ok(0.0);
    }
    if cfg.cached_count == cfg.catalog_size {
        return Ok(1.0);
    }
    Ok(harmonic_sum(cfg.cached_count, cfg.skew)? / harmonic_sum(cfg.catalog_size, cfg.skew)?)
}

/// Large-catalog approximation `1 + ln η / ln N_f` of the hit ratio, valid
/// for skew 1. Clamped to `[0, 1]`.
pub fn hit_ratio_asymptotic(eta: f64, catalog_size: u64) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::domain("hit_ratio_asymptotic", format!("eta = {eta} must be > 0")));
    }
    if catalog_size < 2 {
        return Err(Error::domain("hit_ratio_asymptotic", "catalog_size must be >= 2"));
    }
    Ok((1.0 + eta.ln() / (catalog_size as f64).ln()).clamp(0.0, 1.0))
}

/// Fraction of the energy spent over a refresh period `period_s` that goes
/// to pushing a fraction `update_fraction` of every cache through the
/// backhaul. `network_power` is the average total power of all `bs_count`
/// BSs.
pub fn update_energy_fraction(
    update_fraction: f64,
    period_s: f64,
    bs_count: u32,
    cfg: &ContentConfig,
    backhaul_coeff: f64,
    network_power: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&update_fraction) {
        return Err(Error::domain("update_energy_fraction", "update fraction outside [0,1]"));
    }
    if !(period_s > 0.0) {
        return Err(Error::domain("update_energy_fraction", "period must be positive"));
    }
    if !(network_power > 0.0) {
        return Err(Error::domain("update_energy_fraction", "power must be positive"));
    }
    let update_bits = update_fraction * f64::from(bs_count) * cfg.cache_bits();
    Ok(update_bits * backhaul_coeff / (period_s * network_power))
}

/// Cumulative popularity table for O(1) hit ratios and inverse-CDF sampling
/// of requested ranks.
#[derive(Debug, Clone)]
pub struct ZipfTable {
    skew: f64,
    /// `cumulative[n] = Σ_{j≤n} j^{-δ}`; `cumulative[0] = 0`.
    cumulative: Vec<f64>,
}

impl ZipfTable {
    pub fn new(catalog_size: u64, skew: f64) -> Result<Self> {
        if catalog_size < 1 {
            return Err(Error::domain("ZipfTable::new", "catalog_size must be >= 1"));
        }
        if !(skew >= 0.0) || !skew.is_finite() {
            return Err(Error::domain("ZipfTable::new", "skew must be finite and >= 0"));
        }
        let mut cumulative = Vec::with_capacity(catalog_size as usize + 1);
        cumulative.push(0.0);
        let mut acc = CompensatedSum::new();
        for j in 1..=catalog_size {
            acc.add((j as f64).powf(-skew));
            cumulative.push(acc.value());
        }
        Ok(Self { skew, cumulative })
    }

    pub fn for_content(cfg: &ContentConfig) -> Result<Self> {
        Self::new(cfg.catalog_size, cfg.skew)
    }

    pub fn catalog_size(&self) -> u64 {
        (self.cumulative.len() - 1) as u64
    }

    pub fn skew(&self) -> f64 {
        self.skew
    }

    /// `Σ_{j≤n} j^{-δ}` for `n ≤ N_f`.
    pub fn partial_sum(&self, n: u64) -> f64 {
        self.cumulative[n.min(self.catalog_size()) as usize]
    }

    pub fn hit_ratio(&self, cached_count: u64) -> f64 {
        let n_f = self.catalog_size();
        if cached_count >= n_f {
            return 1.0;
        }
        self.partial_sum(cached_count) / self.partial_sum(n_f)
    }

    pub fn pmf(&self, rank: u64) -> f64 {
        (rank as f64).powf(-self.skew) / self.partial_sum(self.catalog_size())
    }

    /// Draws a rank in `1..=N_f`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let total = self.partial_sum(self.catalog_size());
        let u = rng.random::<f64>() * total;
        // first index with cumulative > u
        let idx = self.cumulative.partition_point(|&c| c <= u);
        (idx as u64).clamp(1, self.catalog_size())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n_f: u64, skew: f64, n_c: u64) -> ContentConfig {
        ContentConfig::new(n_f, 30.0 * BITS_PER_MB, skew, n_c).unwrap()
    }

    #[test]
    fn pmf_examples() {
        assert!((zipf_pmf(37, &cfg(100, 0.0, 0)).unwrap() - 0.01).abs() < 1e-15);
        assert_eq!(zipf_pmf(1, &cfg(1, 0.8, 0)).unwrap(), 1.0);
        assert!((zipf_pmf(1, &cfg(4, 1.0, 0)).unwrap() - 0.48).abs() < 1e-12);
        assert!(zipf_pmf(0, &cfg(4, 1.0, 0)).is_err());
        assert!(zipf_pmf(5, &cfg(4, 1.0, 0)).is_err());
    }

    #[test]
    fn hit_ratio_examples() {
        assert_eq!(hit_ratio(&cfg(4, 1.0, 0)).unwrap(), 0.0);
        assert_eq!(hit_ratio(&cfg(4, 1.0, 4)).unwrap(), 1.0);
        assert!((hit_ratio(&cfg(4, 1.0, 2)).unwrap() - 0.72).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_examples() {
        assert_eq!(hit_ratio_asymptotic(1.0, 10_000).unwrap(), 1.0);
        assert!(hit_ratio_asymptotic(1e-4, 10_000).unwrap().abs() < 1e-15);
        assert!((hit_ratio_asymptotic(0.1, 10_000).unwrap() - 0.75).abs() < 1e-12);
        assert_eq!(hit_ratio_asymptotic(1e-9, 10_000).unwrap(), 0.0);
        assert!(hit_ratio_asymptotic(0.0, 10_000).is_err());
    }

    #[test]
    fn update_energy_linear_in_fraction() {
        let c = cfg(10_000, 0.8, 1000);
        assert_eq!(update_energy_fraction(0.0, 43_200.0, 37, &c, 5e-7, 1000.0).unwrap(), 0.0);
        let a = update_energy_fraction(0.1, 43_200.0, 37, &c, 5e-7, 1000.0).unwrap();
        let b = update_energy_fraction(0.2, 43_200.0, 37, &c, 5e-7, 1000.0).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-15);
        assert!(update_energy_fraction(0.1, 0.0, 37, &c, 5e-7, 1000.0).is_err());
        assert!(update_energy_fraction(0.1, 1.0, 37, &c, 5e-7, 0.0).is_err());
    }

    #[test]
    fn config_invariants() {
        assert!(ContentConfig::new(10, 1.0, 1.0, 11).is_err());
        assert!(ContentConfig::new(10, 0.0, 1.0, 1).is_err());
        assert!(ContentConfig::new(0, 1.0, 1.0, 0).is_err());
        let c = cfg(10_000, 0.8, 0).with_eta(0.1).unwrap();
        assert_eq!(c.cached_count, 1000);
        assert!((c.eta() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn table_matches_direct() {
        let t = ZipfTable::new(1000, 0.8).unwrap();
        for n_c in [0, 1, 10, 500, 999, 1000] {
            let direct = hit_ratio(&cfg(1000, 0.8, n_c)).unwrap();
            assert!((t.hit_ratio(n_c) - direct).abs() < 1e-13);
        }
    }
}
