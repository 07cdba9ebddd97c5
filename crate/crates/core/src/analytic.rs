//! Closed-form throughput, power and energy-efficiency model.
//!
//! Rates follow the high-SINR approximations for zero-forcing with equal
//! power split: a cache-hit user of a BS serving `K_b` users averages
//! `αB/(2 ln 2) + R_e(K_b)`, and the cache-miss users share a backhaul of
//! capacity `C_bh`. All quantities are per BS; network totals are `N_b`
//! times these and cancel in the efficiency ratio.
//!
//! The path-loss intercept enters through [`NetworkConfig::edge_noise`],
//! so the same configuration drives both this model and the simulator.

use std::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{active_probability, scheduled_count_pmf, CellLayout, NetworkConfig};
use crate::popularity::{hit_ratio, ContentConfig};
use crate::special::{lower_reg_gamma_int, upper_reg_gamma_int};
use crate::stats::RunningStats;

/// BS power model coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConfig {
    /// Amplifier, cooling and supply overhead `ρ`.
    pub amplifier_factor: f64,
    /// Circuit power when active, W.
    pub circuit_active: f64,
    /// Circuit power when idle, W.
    pub circuit_idle: f64,
    /// Cache power per stored bit, W/bit.
    pub cache_coeff: f64,
    /// Backhaul energy per carried bit, J/bit.
    pub backhaul_coeff: f64,
    /// Backhaul capacity in bit/s; `f64::INFINITY` for unlimited.
    pub backhaul_capacity: f64,
}

impl PowerConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("amplifier_factor", self.amplifier_factor),
            ("circuit_active", self.circuit_active),
            ("circuit_idle", self.circuit_idle),
            ("cache_coeff", self.cache_coeff),
            ("backhaul_coeff", self.backhaul_coeff),
        ];
        for (name, v) in fields {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite and >= 0")));
            }
        }
        if !(self.backhaul_capacity >= 0.0) {
            return Err(Error::InvalidConfig("backhaul_capacity must be >= 0".into()));
        }
        Ok(())
    }

    /// Total power of an active BS, `ρP + P_cc,a`.
    pub fn active_power(&self, transmit_power: f64) -> f64 {
        self.amplifier_factor * transmit_power + self.circuit_active
    }

    pub fn idle_power(&self) -> f64 {
        self.circuit_idle
    }

    /// Average transmit-plus-circuit power of one BS.
    pub fn tx_circuit(&self, net: &NetworkConfig) -> f64 {
        let pa = net.active_probability();
        pa * self.active_power(net.transmit_power) + (1.0 - pa) * self.idle_power()
    }
}

/// Interference geometry constant (base-2 log domain) with its Monte-Carlo
/// uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiEstimate {
    pub phi: f64,
    pub std_error: f64,
    pub samples: u64,
    pub alpha: f64,
    pub bs_count: usize,
}

impl PhiEstimate {
    /// A fixed value, for closed-form evaluations that do not need the
    /// estimator (e.g. interference-free settings).
    pub fn exact(phi: f64, alpha: f64) -> Self {
        Self { phi, std_error: f64::MIN_POSITIVE, samples: 0, alpha, bs_count: 0 }
    }
}

pub const MIN_PHI_SAMPLES: u64 = 100_000;
const PHI_BLOCK: u64 = 4096;

/// Per-interferer fading power `‖h W‖²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InterfererFading {
    /// Unit-mean Gamma with shape equal to the interferer's stream count.
    Streams(u32),
    /// No fading; gives the Jensen upper bound on the constant.
    None,
}

/// Estimates `Φ = E log2 Σ_{j≠0} d_j^{-α} I_j` for a user uniform in the
/// unit disk around BS 0, with BS coordinates normalized by the cell radius
/// and single-stream (exponential) fading.
pub fn estimate_phi(alpha: f64, layout: &CellLayout, samples: u64, seed: u64) -> Result<PhiEstimate> {
    estimate_phi_with(alpha, layout, samples, seed, InterfererFading::Streams(1))
}

pub fn estimate_phi_with(
    alpha: f64,
    layout: &CellLayout,
    samples: u64,
    seed: u64,
    fading: InterfererFading,
) -> Result<PhiEstimate> {
    if !(alpha > 2.0) {
        return Err(Error::domain("estimate_phi", format!("alpha = {alpha} must be > 2")));
    }
    if samples < MIN_PHI_SAMPLES {
        return Err(Error::domain("estimate_phi", format!("need >= {MIN_PHI_SAMPLES} samples, got {samples}")));
    }
    if layout.len() < 2 {
        return Err(Error::domain("estimate_phi", "layout has no interferers"));
    }
    let gamma = match fading {
        InterfererFading::Streams(0) => return Err(Error::domain("estimate_phi", "stream count must be >= 1")),
        InterfererFading::Streams(k) => {
            let shape = f64::from(k);
            Some(Gamma::new(shape, 1.0 / shape).map_err(|e| Error::domain("estimate_phi", e.to_string()))?)
        }
        InterfererFading::None => None,
    };
    let center = layout.bs_positions[0];
    let interferers: Vec<(f64, f64)> = layout.bs_positions[1..]
        .iter()
        .map(|p| ((p.x - center.x) / layout.cell_radius, (p.y - center.y) / layout.cell_radius))
        .collect();
    let half_alpha = alpha / 2.0;

    let blocks = samples.div_ceil(PHI_BLOCK);
    let parts: Vec<RunningStats> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let n = PHI_BLOCK.min(samples - b * PHI_BLOCK);
            let mut st = RunningStats::new();
            for _ in 0..n {
                let r = rng.random::<f64>().sqrt();
                let th = std::f64::consts::TAU * rng.random::<f64>();
                let (x, y) = (r * th.cos(), r * th.sin());
                let mut sum = 0.0;
                for &(u, v) in &interferers {
                    let d2 = (x - u) * (x - u) + (y - v) * (y - v);
                    let fade = gamma.as_ref().map_or(1.0, |g| g.sample(&mut rng));
                    sum += d2.powf(-half_alpha) * fade;
                }
                st.push(sum.log2());
            }
            st
        })
        .collect();
    let st = RunningStats::merge_all(&parts);
    Ok(PhiEstimate { phi: st.mean(), std_error: st.std_error(), samples, alpha, bs_count: layout.len() })
}

/// Average rate of a cell-edge user when the BS serves `k_b` users:
/// `B log2((N_t−K_b+1)P / (K_b(p_a β P 2^Φ + L0 D^α σ²)))`.
///
/// High-SINR form: it goes negative once the edge SINR drops below one,
/// and the rates built on it are meaningless there.
pub fn edge_rate(k_b: u32, net: &NetworkConfig, phi: &PhiEstimate) -> Result<f64> {
    if k_b < 1 || k_b > net.antennas {
        return Err(Error::domain("edge_rate", format!("K_b = {k_b} outside 1..={}", net.antennas)));
    }
    let p = net.transmit_power;
    let pa = net.active_probability();
    let interference = pa * net.interference_factor * p * phi.phi.exp2();
    let num = f64::from(net.antennas - k_b + 1) * p;
    let den = f64::from(k_b) * (interference + net.edge_noise());
    Ok(net.bandwidth * (num / den).log2())
}

/// Per-user gain of the average position over the cell edge, `αB/(2 ln 2)`.
pub fn position_gain(net: &NetworkConfig) -> f64 {
    net.pathloss_exponent * net.bandwidth / (2.0 * LN_2)
}

/// Average sum rate of `k_c` cache-hit users when `k_b` are served.
pub fn rate_cache_hit(k_b: u32, k_c: u32, net: &NetworkConfig, phi: &PhiEstimate) -> Result<f64> {
    if k_c > k_b {
        return Err(Error::domain("rate_cache_hit", "K_c > K_b"));
    }
    if k_c == 0 {
        return Ok(0.0);
    }
    Ok(f64::from(k_c) * (position_gain(net) + edge_rate(k_b, net, phi)?))
}

/// Average backhaul-limited sum rate of the `k_b − k_c` cache-miss users.
pub fn rate_cache_miss(k_b: u32, k_c: u32, backhaul_capacity: f64, net: &NetworkConfig, phi: &PhiEstimate) -> Result<f64> {
    if k_c > k_b {
        return Err(Error::domain("rate_cache_miss", "K_c > K_b"));
    }
    if !(backhaul_capacity >= 0.0) {
        return Err(Error::domain("rate_cache_miss", "backhaul capacity must be >= 0"));
    }
    let misses = k_b - k_c;
    if misses == 0 {
        return Ok(0.0);
    }
    let r_e = edge_rate(k_b, net, phi)?;
    Ok(miss_rate_from_edge(misses, r_e, position_gain(net), backhaul_capacity))
}

/// Core of the cache-miss rate: `m` users whose sum rate is
/// `m·R_e + c·Y`, `Y ~ Gamma(m, 1)`, capped at `C_bh`.
fn miss_rate_from_edge(misses: u32, r_e: f64, c: f64, cap: f64) -> f64 {
    let m = f64::from(misses);
    if cap.is_infinite() {
        return m * (c + r_e);
    }
    if cap <= 0.0 || cap <= m * r_e {
        return cap;
    }
    let z = (cap - m * r_e) / c;
    // shapes here are >= 1, so the kernels cannot fail
    let g_lo_next = lower_reg_gamma_int(misses + 1, z).unwrap_or(1.0);
    let g_lo = lower_reg_gamma_int(misses, z).unwrap_or(1.0);
    let g_up = upper_reg_gamma_int(misses, z).unwrap_or(0.0);
    m * (c * g_lo_next + r_e * g_lo) + cap * g_up
}

/// Per-BS averages of the general (multi-user) model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellAverages {
    pub throughput: f64,
    pub hit_throughput: f64,
    /// Average backhaul traffic, `E{R_b,bh}`.
    pub backhaul_throughput: f64,
}

/// Double sum over the scheduled count `K_b ≤ max_users` and the number of
/// cache-hit users `K_c ~ Binomial(K_b, p_h)`.
pub fn cell_averages(
    net: &NetworkConfig,
    backhaul_capacity: f64,
    hit_prob: f64,
    phi: &PhiEstimate,
    max_users: u32,
) -> Result<CellAverages> {
    if !(0.0..=1.0).contains(&hit_prob) {
        return Err(Error::domain("cell_averages", format!("hit ratio {hit_prob} outside [0,1]")));
    }
    let max_users = max_users.min(net.antennas);
    let pmf = scheduled_count_pmf(net.mean_users, net.bs_count, max_users);
    let c = position_gain(net);
    let (mut hit, mut miss) = (0.0, 0.0);
    for k_b in 1..=max_users {
        let p_kb = pmf[k_b as usize];
        if p_kb == 0.0 {
            continue;
        }
        let r_e = edge_rate(k_b, net, phi)?;
        for k_c in 0..=k_b {
            let w = p_kb * binomial_pmf(k_b, k_c, hit_prob);
            if w == 0.0 {
                continue;
            }
            hit += w * f64::from(k_c) * (c + r_e);
            if k_c < k_b {
                miss += w * miss_rate_from_edge(k_b - k_c, r_e, c, backhaul_capacity);
            }
        }
    }
    Ok(CellAverages { throughput: hit + miss, hit_throughput: hit, backhaul_throughput: miss })
}

fn binomial_pmf(n: u32, k: u32, p: f64) -> f64 {
    let mut coeff = 1.0;
    for i in 0..k {
        coeff *= f64::from(n - i) / f64::from(i + 1);
    }
    coeff * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

/// Average throughput of one cell.
pub fn cell_throughput(net: &NetworkConfig, pw: &PowerConfig, content: &ContentConfig, phi: &PhiEstimate) -> Result<f64> {
    let p_h = hit_ratio(content)?;
    Ok(cell_averages(net, pw.backhaul_capacity, p_h, phi, net.antennas)?.throughput)
}

/// Average per-BS power, split by consumer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBreakdown {
    pub tx_circuit: f64,
    pub caching: f64,
    pub backhauling: f64,
    pub total: f64,
}

impl PowerBreakdown {
    pub fn new(tx_circuit: f64, caching: f64, backhauling: f64) -> Self {
        Self { tx_circuit, caching, backhauling, total: tx_circuit + caching + backhauling }
    }
}

pub fn avg_total_power(net: &NetworkConfig, pw: &PowerConfig, content: &ContentConfig, phi: &PhiEstimate) -> Result<PowerBreakdown> {
    Ok(network_ee(net, pw, content, phi)?.power)
}

/// Per-user rates of the single-served-user model together with the
/// per-BS rate averages of the model that produced a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBreakdown {
    /// `R_e` of a lone served user.
    pub edge_rate: f64,
    /// Average rate of a lone cache-hit user, `R_ca`.
    pub cache_hit_rate: f64,
    /// Average rate of a lone cache-miss user, `R_bh`.
    pub cache_miss_rate: f64,
    pub hit_throughput: f64,
    pub backhaul_throughput: f64,
    pub cell_throughput: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EEReport {
    /// Average cell throughput, bit/s.
    pub throughput: f64,
    /// Average per-BS power, W.
    pub total_power: f64,
    /// Bits per Joule.
    pub ee: f64,
    pub rate: RateBreakdown,
    pub power: PowerBreakdown,
}

/// Rates of a BS serving exactly one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleUserRates {
    pub edge_rate: f64,
    pub hit_rate: f64,
    pub miss_rate: f64,
    pub active_probability: f64,
}

pub fn single_user_rates(net: &NetworkConfig, backhaul_capacity: f64, phi: &PhiEstimate) -> Result<SingleUserRates> {
    if !(backhaul_capacity >= 0.0) {
        return Err(Error::domain("single_user_rates", "backhaul capacity must be >= 0"));
    }
    let r_e = edge_rate(1, net, phi)?;
    let c = position_gain(net);
    let hit_rate = c + r_e;
    let miss_rate = if backhaul_capacity.is_infinite() {
        hit_rate
    } else if backhaul_capacity <= r_e {
        backhaul_capacity
    } else {
        hit_rate - c * (-2.0 * (backhaul_capacity - r_e) / (net.pathloss_exponent * net.bandwidth)).exp2()
    };
    Ok(SingleUserRates { edge_rate: r_e, hit_rate, miss_rate, active_probability: net.active_probability() })
}

fn report(
    net: &NetworkConfig,
    pw: &PowerConfig,
    content: &ContentConfig,
    phi: &PhiEstimate,
    avg: CellAverages,
) -> Result<EEReport> {
    let su = single_user_rates(net, pw.backhaul_capacity, phi)?;
    let power = PowerBreakdown::new(
        pw.tx_circuit(net),
        pw.cache_coeff * content.cache_bits(),
        pw.backhaul_coeff * avg.backhaul_throughput,
    );
    Ok(EEReport {
        throughput: avg.throughput,
        total_power: power.total,
        ee: avg.throughput / power.total,
        rate: RateBreakdown {
            edge_rate: su.edge_rate,
            cache_hit_rate: su.hit_rate,
            cache_miss_rate: su.miss_rate,
            hit_throughput: avg.hit_throughput,
            backhaul_throughput: avg.backhaul_throughput,
            cell_throughput: avg.throughput,
        },
        power,
    })
}

/// Energy efficiency of the general model with exact Zipf hit ratio.
pub fn network_ee(net: &NetworkConfig, pw: &PowerConfig, content: &ContentConfig, phi: &PhiEstimate) -> Result<EEReport> {
    network_ee_with_hit_ratio(net, pw, content, hit_ratio(content)?, phi, net.antennas)
}

/// [`network_ee`] with a caller-supplied hit ratio and a cap on the number
/// of users scheduled per slot.
pub fn network_ee_with_hit_ratio(
    net: &NetworkConfig,
    pw: &PowerConfig,
    content: &ContentConfig,
    hit_prob: f64,
    phi: &PhiEstimate,
    max_users: u32,
) -> Result<EEReport> {
    net.validate()?;
    pw.validate()?;
    let avg = cell_averages(net, pw.backhaul_capacity, hit_prob, phi, max_users)?;
    report(net, pw, content, phi, avg)
}

/// Energy efficiency when each BS serves at most one user per slot.
pub fn single_user_ee(net: &NetworkConfig, pw: &PowerConfig, content: &ContentConfig, phi: &PhiEstimate) -> Result<EEReport> {
    single_user_ee_with_hit_ratio(net, pw, content, hit_ratio(content)?, phi)
}

pub fn single_user_ee_with_hit_ratio(
    net: &NetworkConfig,
    pw: &PowerConfig,
    content: &ContentConfig,
    hit_prob: f64,
    phi: &PhiEstimate,
) -> Result<EEReport> {
    net.validate()?;
    pw.validate()?;
    let su = single_user_rates(net, pw.backhaul_capacity, phi)?;
    let pa = su.active_probability;
    let hit = pa * hit_prob * su.hit_rate;
    let miss = pa * (1.0 - hit_prob) * su.miss_rate;
    report(net, pw, content, phi, CellAverages { throughput: hit + miss, hit_throughput: hit, backhaul_throughput: miss })
}

/// Closed-form approximation of `E{log2(β I_k + σ²/P)}`, with `I_k` the
/// received interference normalized by the transmit power:
/// `log2(p_a β 2^Φ g(D) + σ²/P)`.
pub fn interference_log_term(net: &NetworkConfig, phi: &PhiEstimate) -> f64 {
    let pa = active_probability(net.mean_users, net.bs_count);
    let edge_gain = net.pathloss().gain(net.cell_radius);
    (pa * net.interference_factor * phi.phi.exp2() * edge_gain + net.noise_power / net.transmit_power).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(beta: f64) -> NetworkConfig {
        NetworkConfig {
            bs_count: 37,
            antennas: 4,
            cell_radius: 40.0,
            bandwidth: 20e6,
            pathloss_exponent: 3.67,
            pathloss_intercept_db: 0.0,
            noise_power: 3.162e-13,
            mean_users: 30.0,
            interference_factor: beta,
            transmit_power: 0.1259,
        }
    }

    fn phi() -> PhiEstimate {
        PhiEstimate::exact(0.5, 3.67)
    }

    #[test]
    fn edge_rate_interference_free_example() {
        // hand evaluation: 20e6 * log2(4 * 0.1259 / (40^3.67 * 3.162e-13))
        let arg = 4.0 * 0.1259 / (40f64.powf(3.67) * 3.162e-13);
        let expected = 20e6 * arg.log2();
        let r = edge_rate(1, &net(0.0), &phi()).unwrap();
        assert!((r - expected).abs() < 1e-6 * expected);
        assert!((r / 4.2e8 - 1.0).abs() < 0.01);
    }

    #[test]
    fn edge_rate_scaling_and_range() {
        let n = net(0.5);
        let mut wide = n;
        wide.bandwidth *= 2.0;
        let r = edge_rate(2, &n, &phi()).unwrap();
        assert!((edge_rate(2, &wide, &phi()).unwrap() - 2.0 * r).abs() < 1e-6);
        assert!(edge_rate(4, &n, &phi()).unwrap() < edge_rate(1, &n, &phi()).unwrap());
        assert!(edge_rate(0, &n, &phi()).is_err());
        assert!(edge_rate(5, &n, &phi()).is_err());
    }

    #[test]
    fn hit_rate_linear_in_users() {
        let n = net(0.5);
        assert_eq!(rate_cache_hit(3, 0, &n, &phi()).unwrap(), 0.0);
        let one = rate_cache_hit(3, 1, &n, &phi()).unwrap();
        assert!((rate_cache_hit(3, 2, &n, &phi()).unwrap() - 2.0 * one).abs() < 1e-6);
    }

    #[test]
    fn miss_rate_limits() {
        let n = net(0.5);
        let p = phi();
        assert_eq!(rate_cache_miss(3, 1, 0.0, &n, &p).unwrap(), 0.0);
        assert_eq!(rate_cache_miss(3, 3, 1e8, &n, &p).unwrap(), 0.0);
        let inf = rate_cache_miss(3, 1, f64::INFINITY, &n, &p).unwrap();
        let full = rate_cache_hit(3, 2, &n, &p).unwrap();
        assert!((inf - full).abs() < 1e-6);
        // large finite capacity converges to the unlimited value
        let big = rate_cache_miss(3, 1, 1e12, &n, &p).unwrap();
        assert!((big - inf).abs() < 1e-6 * inf);
    }

    #[test]
    fn miss_rate_single_user_matches_closed_form() {
        let n = net(0.5);
        let p = phi();
        for cap in [1e6, 5e7, 1e8, 2e8, 1e9] {
            let lemma = rate_cache_miss(1, 0, cap, &n, &p).unwrap();
            let su = single_user_rates(&n, cap, &p).unwrap().miss_rate;
            assert!((lemma - su).abs() <= 1e-9 * su, "cap={cap}: {lemma} vs {su}");
        }
    }

    #[test]
    fn miss_rate_matches_quadrature() {
        // E min(m R_e + c Y, C) with Y ~ Gamma(m,1), by midpoint quadrature
        let n = net(1.0);
        let p = phi();
        let (k_b, k_c, cap) = (4, 1, 3.0e8);
        let r_e = edge_rate(k_b, &n, &p).unwrap();
        let c = position_gain(&n);
        let m = 3.0;
        let steps = 400_000;
        let top = 60.0;
        let h = top / steps as f64;
        let mut acc = 0.0;
        for i in 0..steps {
            let y = (i as f64 + 0.5) * h;
            let pdf = y * y * (-y).exp() / 2.0;
            acc += (m * r_e + c * y).min(cap) * pdf * h;
        }
        let lemma = rate_cache_miss(k_b, k_c, cap, &n, &p).unwrap();
        assert!((lemma - acc).abs() < 1e-6 * acc, "{lemma} vs {acc}");
    }

    #[test]
    fn binomial_sums_to_one() {
        for n in [1, 4, 30] {
            let s: f64 = (0..=n).map(|k| binomial_pmf(n, k, 0.37)).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        assert_eq!(binomial_pmf(3, 0, 0.0), 1.0);
        assert_eq!(binomial_pmf(3, 3, 1.0), 1.0);
    }

    #[test]
    fn power_breakdown_sums() {
        let b = PowerBreakdown::new(1.0, 2.0, 3.5);
        assert_eq!(b.total, 6.5);
    }
}
