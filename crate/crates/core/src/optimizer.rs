//! Closed-form optima of the single-user model (cache capacity, transmit
//! power and their joint fixed point) and the matching grid oracles.
//!
//! Every closed form here assumes Zipf skew 1 and the large-catalog hit
//! ratio `1 + ln η / ln N_f`; they reject other skews with
//! [`Error::Regime`]. The EE expressions they were derived from are
//! exposed so they can be maximized numerically for any input.

use std::f64::consts::LN_2;

use crate::analytic::{single_user_rates, PhiEstimate, PowerConfig};
use crate::error::{Error, Result};
use crate::geometry::NetworkConfig;
use crate::grid::{grid_argmax, grid_argmax_2d, Argmax2, Grid};
use crate::popularity::ContentConfig;
use crate::special::{harmonic_sum, lambert_w0, lambert_w0_exp};

/// Points in the η oracle grid.
pub const ETA_GRID_POINTS: usize = 10_000;
/// Points per axis in the joint (P, η) oracle grid.
pub const JOINT_GRID_POINTS: usize = 200;
/// Half-width of the transmit-power oracle range, in dB.
pub const POWER_SPAN_DB: f64 = 30.0;

const JOINT_MAX_ITER: usize = 1000;
const JOINT_TOL: f64 = 1e-6;

fn require_unit_skew(content: &ContentConfig) -> Result<()> {
    if (content.skew - 1.0).abs() > 1e-12 {
        return Err(Error::Regime(format!("closed forms need skew 1, got {}", content.skew)));
    }
    if content.catalog_size < 2 {
        return Err(Error::Regime("closed forms need at least two contents".into()));
    }
    Ok(())
}

/// Scalars of the single-user EE as a function of η.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CachingTerms {
    pub active_probability: f64,
    /// `R_ca`, bit/s.
    pub hit_rate: f64,
    /// `R_bh`, bit/s.
    pub miss_rate: f64,
    /// `p_a P_a + (1−p_a) P_i`, W.
    pub tx_circuit: f64,
    pub cache_coeff: f64,
    pub backhaul_coeff: f64,
    /// Bits per content.
    pub content_size: f64,
    pub catalog_size: f64,
}

impl CachingTerms {
    pub fn new(net: &NetworkConfig, pw: &PowerConfig, content: &ContentConfig, phi: &PhiEstimate) -> Result<Self> {
        net.validate()?;
        pw.validate()?;
        content.validate()?;
        let su = single_user_rates(net, pw.backhaul_capacity, phi)?;
        Ok(Self {
            active_probability: su.active_probability,
            hit_rate: su.hit_rate,
            miss_rate: su.miss_rate,
            tx_circuit: pw.tx_circuit(net),
            cache_coeff: pw.cache_coeff,
            backhaul_coeff: pw.backhaul_coeff,
            content_size: content.content_size,
            catalog_size: content.catalog_size as f64,
        })
    }

    fn ln_catalog(&self) -> f64 {
        self.catalog_size.ln()
    }

    /// Single-user EE with the asymptotic hit ratio, unclamped in η.
    pub fn ee_vs_eta(&self, eta: f64) -> f64 {
        let x = eta.ln() / self.ln_catalog();
        let pa = self.active_probability;
        let num = pa * (self.hit_rate + x * (self.hit_rate - self.miss_rate));
        let den = self.tx_circuit + self.cache_coeff * eta * self.catalog_size * self.content_size
            - pa * self.backhaul_coeff * self.miss_rate * x;
        num / den
    }

    /// [`Self::ee_vs_eta`] with unlimited backhaul (`R_bh = R_ca`).
    pub fn ee_vs_eta_unlimited(&self, eta: f64) -> f64 {
        Self { miss_rate: self.hit_rate, ..*self }.ee_vs_eta(eta)
    }

    /// EE with no cache at all (`p_h = 0`, no cache power), unlimited backhaul.
    pub fn ee_without_cache_unlimited(&self) -> f64 {
        let pa = self.active_probability;
        pa * self.hit_rate / (self.tx_circuit + pa * self.backhaul_coeff * self.hit_rate)
    }

    /// Log-grid over `[1/N_f, 1]`.
    pub fn eta_grid(&self, points: usize) -> Result<Grid> {
        Grid::log(1.0 / self.catalog_size, 1.0, points)
    }
}

/// Both sides of the caching-benefit condition; caching improves EE iff
/// `lhs < rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    pub lhs: f64,
    /// `f64::INFINITY` when there is no backhaul at all.
    pub rhs: f64,
    pub holds: bool,
}

impl ConditionReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, holds: lhs < rhs }
    }
}

fn condition_lhs(pw: &PowerConfig, content: &ContentConfig) -> Result<f64> {
    Ok(pw.cache_coeff * content.content_size * harmonic_sum(content.catalog_size, 1.0)?)
}

pub fn caching_benefit_condition(
    net: &NetworkConfig,
    pw: &PowerConfig,
    content: &ContentConfig,
    phi: &PhiEstimate,
) -> Result<ConditionReport> {
    require_unit_skew(content)?;
    let t = CachingTerms::new(net, pw, content, phi)?;
    let lhs = condition_lhs(pw, content)?;
    if t.miss_rate <= 0.0 {
        return Ok(ConditionReport::new(lhs, f64::INFINITY));
    }
    let rhs = (t.hit_rate / t.miss_rate - 1.0) * t.tx_circuit
        + t.active_probability * t.backhaul_coeff * t.hit_rate;
    Ok(ConditionReport::new(lhs, rhs))
}

/// The condition with unlimited backhaul, where only the backhaul energy
/// saving remains on the right-hand side.
pub fn caching_benefit_condition_infinite_backhaul(
    net: &NetworkConfig,
    pw: &PowerConfig,
    content: &ContentConfig,
    phi: &PhiEstimate,
) -> Result<ConditionReport> {
    require_unit_skew(content)?;
    let unlimited = PowerConfig { backhaul_capacity: f64::INFINITY, ..*pw };
    let t = CachingTerms::new(net, &unlimited, content, phi)?;
    let lhs = condition_lhs(pw, content)?;
    Ok(ConditionReport::new(lhs, t.active_probability * t.backhaul_coeff * t.hit_rate))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimumReport {
    /// `min(η₀, 1)`.
    pub eta_star: f64,
    /// Stationary point `η₀`.
    pub eta_unclamped: f64,
    /// `Ω`; infinite for unlimited backhaul.
    pub omega: f64,
    /// Whether the grid oracle puts the maximizer within one step of `eta_star`.
    pub maximizer_verified: bool,
}

/// True if the grid argmax of `ee` over `[1/N_f, 1]` lies within one log
/// step of `eta`.
pub fn verify_eta_maximizer(ee: impl Fn(f64) -> f64 + Sync, eta: f64, catalog_size: f64, points: usize) -> Result<bool> {
    let grid = Grid::log(1.0 / catalog_size, 1.0, points)?;
    let step = catalog_size.ln() / (points - 1) as f64;
    let best = grid_argmax(ee, &grid).ok_or_else(|| Error::domain("verify_eta_maximizer", "EE is NaN everywhere"))?;
    let target = eta.clamp(1.0 / catalog_size, 1.0);
    Ok((best.arg.ln() - target.ln()).abs() <= step * (1.0 + 1e-9))
}

/// Stationary cache capacity of the single-user EE with finite backhaul.
pub fn optimal_eta(net: &NetworkConfig, pw: &PowerConfig, content: &ContentConfig, phi: &PhiEstimate) -> Result<OptimumReport> {
    require_unit_skew(content)?;
    let t = CachingTerms::new(net, pw, content, phi)?;
    let gap = t.hit_rate - t.miss_rate;
    if !(gap > 1e-9 * t.hit_rate) {
        return optimal_eta_infinite_backhaul(net, pw, content, phi);
    }
    if t.cache_coeff <= 0.0 {
        return Ok(OptimumReport { eta_star: 1.0, eta_unclamped: f64::INFINITY, omega: f64::INFINITY, maximizer_verified: true });
    }
    let pa = t.active_probability;
    let omega = (t.hit_rate * t.miss_rate / gap * t.backhaul_coeff * pa + t.tx_circuit) / (t.cache_coeff * t.content_size);
    let log_arg = omega.ln() - 1.0 + t.miss_rate / gap * t.ln_catalog();
    let w = lambert_w0_exp(log_arg)?;
    let eta0 = omega / (t.catalog_size * w);
    let eta_star = eta0.min(1.0);
    let verified = verify_eta_maximizer(|e| t.ee_vs_eta(e), eta_star, t.catalog_size, ETA_GRID_POINTS)?;
    Ok(OptimumReport { eta_star, eta_unclamped: eta0, omega, maximizer_verified: verified })
}

/// Stationary cache capacity with unlimited backhaul.
pub fn optimal_eta_infinite_backhaul(
    net: &NetworkConfig,
    pw: &PowerConfig,
    content: &ContentConfig,
    phi: &PhiEstimate,
) -> Result<OptimumReport> {
    require_unit_skew(content)?;
    let unlimited = PowerConfig { backhaul_capacity: f64::INFINITY, ..*pw };
    let t = CachingTerms::new(net, &unlimited, content, phi)?;
    let eta0 = unlimited_eta0(&t);
    let eta_star = eta0.min(1.0);
    let verified = verify_eta_maximizer(|e| t.ee_vs_eta_unlimited(e), eta_star, t.catalog_size, ETA_GRID_POINTS)?;
    Ok(OptimumReport { eta_star, eta_unclamped: eta0, omega: f64::INFINITY, maximizer_verified: verified })
}

fn unlimited_eta0(t: &CachingTerms) -> f64 {
    t.active_probability * t.backhaul_coeff * t.hit_rate
        / (t.cache_coeff * t.content_size * t.catalog_size * t.ln_catalog())
}

/// Catalog size below which caching everything maximizes EE (unlimited
/// backhaul).
pub fn tradeoff_threshold(net: &NetworkConfig, pw: &PowerConfig, content: &ContentConfig, phi: &PhiEstimate) -> Result<f64> {
    require_unit_skew(content)?;
    let unlimited = PowerConfig { backhaul_capacity: f64::INFINITY, ..*pw };
    let t = CachingTerms::new(net, &unlimited, content, phi)?;
    if t.cache_coeff <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let a = t.active_probability * (t.backhaul_coeff / t.cache_coeff) * t.hit_rate / t.content_size;
    Ok(lambert_w0(a)?.exp())
}

/// Catalog-size threshold with finite backhaul: the `N_f` at which the
/// finite-backhaul stationary point reaches `η₀ = 1`, found by bisection
/// on `Ω = N_f (R_ca ln N_f / (R_ca − R_bh) − 1)`. Falls back to
/// [`tradeoff_threshold`] when the backhaul does not bind.
pub fn tradeoff_threshold_limited_backhaul(
    net: &NetworkConfig,
    pw: &PowerConfig,
    content: &ContentConfig,
    phi: &PhiEstimate,
) -> Result<f64> {
    require_unit_skew(content)?;
    let t = CachingTerms::new(net, pw, content, phi)?;
    let gap = t.hit_rate - t.miss_rate;
    if !(gap > 1e-9 * t.hit_rate) {
        return tradeoff_threshold(net, pw, content, phi);
    }
    if t.cache_coeff <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let omega = (t.hit_rate * t.miss_rate / gap * t.backhaul_coeff * t.active_probability + t.tx_circuit)
        / (t.cache_coeff * t.content_size);
    let excess = |ln_n: f64| ln_n.exp() * (t.hit_rate * ln_n / gap - 1.0) - omega;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while excess(hi) < 0.0 {
        hi *= 2.0;
        if hi > 700.0 {
            return Ok(f64::INFINITY);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// Ratio of the maximal EE with caching to the EE without caching, under
/// unlimited backhaul. Returns 1 when caching cannot help.
pub fn max_ee_gain(net: &NetworkConfig, pw: &PowerConfig, content: &ContentConfig, phi: &PhiEstimate) -> Result<f64> {
    require_unit_skew(content)?;
    let unlimited = PowerConfig { backhaul_capacity: f64::INFINITY, ..*pw };
    let t = CachingTerms::new(net, &unlimited, content, phi)?;
    if t.cache_coeff <= 0.0 {
        return Err(Error::Regime("EE gain is unbounded without cache power".into()));
    }
    let eta0 = unlimited_eta0(&t);
    let saving = t.active_probability * t.backhaul_coeff * t.hit_rate;
    if eta0 >= 1.0 {
        // everything cached
        let cached = t.tx_circuit + t.cache_coeff * t.catalog_size * t.content_size;
        return Ok(((t.tx_circuit + saving) / cached).max(1.0));
    }
    if eta0 * t.catalog_size <= 1.0 {
        return Ok(1.0);
    }
    let l = t.ln_catalog();
    let g = ((eta0 * t.catalog_size).ln() - 1.0) / l / (t.tx_circuit / saving + 1.0);
    if g <= 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 / (1.0 - g))
}

/// Single-user EE versus transmit power with unlimited backhaul.
/// `hit_prob` only affects backhaul power; `cache_power` is per BS.
pub fn ee_vs_power(net: &NetworkConfig, pw: &PowerConfig, phi: &PhiEstimate, hit_prob: f64, cache_power: f64, power: f64) -> f64 {
    let pa = net.active_probability();
    let interference = pa * net.interference_factor * power * phi.phi.exp2();
    let rate = net.bandwidth * (net.pathloss_exponent / (2.0 * LN_2)
        + (f64::from(net.antennas) * power / (interference + net.edge_noise())).log2());
    let den = pa * pw.active_power(power) + (1.0 - pa) * pw.idle_power() + cache_power
        + pa * pw.backhaul_coeff * (1.0 - hit_prob) * rate;
    pa * rate / den
}

/// Circuit plus cache power per BS, the constant that sets the optimal
/// transmit power.
fn static_power(net: &NetworkConfig, pw: &PowerConfig, cache_power: f64) -> f64 {
    let pa = net.active_probability();
    pa * pw.circuit_active + (1.0 - pa) * pw.circuit_idle + cache_power
}

/// Stationary transmit power of the noise-limited EE at a given cache
/// power: the root of `S = p_a ρ P (ln(N_t P / (L0 D^α σ²)) + α/2 − 1)`.
pub fn optimal_power_for_cache_power(net: &NetworkConfig, pw: &PowerConfig, cache_power: f64) -> Result<f64> {
    net.validate()?;
    pw.validate()?;
    let pa = net.active_probability();
    let denom = pa * pw.amplifier_factor;
    if !(denom > 0.0) {
        return Err(Error::Regime("transmit power is free (p_a ρ = 0)".into()));
    }
    let s = static_power(net, pw, cache_power);
    if !(s > 0.0) {
        return Err(Error::Regime("no static power to balance".into()));
    }
    let log_y = s.ln() + f64::from(net.antennas).ln() + net.pathloss_exponent / 2.0 - 1.0
        - denom.ln()
        - net.edge_noise().ln();
    Ok(s / (denom * lambert_w0_exp(log_y)?))
}

/// Optimal transmit power in the noise-limited regime at the configured
/// cache size. Fails with [`Error::Regime`] if interference at the optimum
/// exceeds a tenth of the edge noise.
pub fn optimal_power_noise_limited(
    net: &NetworkConfig,
    pw: &PowerConfig,
    content: &ContentConfig,
    phi: &PhiEstimate,
) -> Result<f64> {
    let p0 = optimal_power_for_cache_power(net, pw, pw.cache_coeff * content.cache_bits())?;
    require_noise_limited(net, phi, p0)?;
    Ok(p0)
}

fn require_noise_limited(net: &NetworkConfig, phi: &PhiEstimate, power: f64) -> Result<()> {
    let interference = net.active_probability() * net.interference_factor * power * phi.phi.exp2();
    if interference > 0.1 * net.edge_noise() {
        return Err(Error::Regime(format!(
            "not noise limited at P = {power:.4e} W: interference/noise = {:.3}",
            interference / net.edge_noise()
        )));
    }
    Ok(())
}

/// Log-grid of transmit powers `±POWER_SPAN_DB` around `center`.
pub fn power_grid(center: f64, points: usize) -> Result<Grid> {
    let k = 10f64.powf(POWER_SPAN_DB / 10.0);
    Grid::log(center / k, center * k, points)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointOptimum {
    pub power: f64,
    pub eta: f64,
    pub iterations: usize,
    /// False if the alternating iteration did not settle; `power` and
    /// `eta` then come from the 2-D grid.
    pub converged: bool,
    pub damped: bool,
}

/// Single-user, unlimited-backhaul EE over `(P, η)` with the asymptotic
/// hit ratio.
pub fn joint_ee(net: &NetworkConfig, pw: &PowerConfig, content: &ContentConfig, phi: &PhiEstimate, power: f64, eta: f64) -> f64 {
    let n_f = content.catalog_size as f64;
    let hit = (1.0 + eta.ln() / n_f.ln()).clamp(0.0, 1.0);
    let cache_power = pw.cache_coeff * eta * n_f * content.content_size;
    ee_vs_power(net, pw, phi, hit, cache_power, power)
}

fn eta0_at_power(net: &NetworkConfig, pw: &PowerConfig, content: &ContentConfig, phi: &PhiEstimate, power: f64) -> Result<f64> {
    let net_p = NetworkConfig { transmit_power: power, ..*net };
    let unlimited = PowerConfig { backhaul_capacity: f64::INFINITY, ..*pw };
    let t = CachingTerms::new(&net_p, &unlimited, content, phi)?;
    Ok(unlimited_eta0(&t).clamp(1.0 / t.catalog_size, 1.0))
}

/// Crossing point of `η₀(P)` and `P₀(η)`, found by alternating updates
/// starting from the configured power. Damped by one half in the log
/// domain once either coordinate reverses direction. The power condition
/// is the noise-limited one, so a crossing where interference exceeds a
/// tenth of the edge noise is rejected with [`Error::Regime`].
pub fn joint_optimum(net: &NetworkConfig, pw: &PowerConfig, content: &ContentConfig, phi: &PhiEstimate) -> Result<JointOptimum> {
    require_unit_skew(content)?;
    let n_f = content.catalog_size as f64;
    let mut p = net.transmit_power;
    let mut eta = eta0_at_power(net, pw, content, phi, p)?;
    let mut damp = 1.0;
    let mut prev_steps = (0.0f64, 0.0f64);
    for it in 1..=JOINT_MAX_ITER {
        let p_target = optimal_power_for_cache_power(net, pw, pw.cache_coeff * eta * n_f * content.content_size)?;
        let p_next = (p.ln() + damp * (p_target.ln() - p.ln())).exp();
        let eta_target = eta0_at_power(net, pw, content, phi, p_next)?;
        let eta_next = (eta.ln() + damp * (eta_target.ln() - eta.ln())).exp();
        let steps = ((p_next / p).ln(), (eta_next / eta).ln());
        if damp == 1.0 && (steps.0 * prev_steps.0 < 0.0 || steps.1 * prev_steps.1 < 0.0) {
            damp = 0.5;
        }
        prev_steps = steps;
        let settled = (p_next - p).abs() <= JOINT_TOL * p && (eta_next - eta).abs() <= JOINT_TOL * eta;
        p = p_next;
        eta = eta_next;
        if settled {
            require_noise_limited(net, phi, p)?;
            return Ok(JointOptimum { power: p, eta, iterations: it, converged: true, damped: damp < 1.0 });
        }
    }
    let g = joint_grid_argmax(net, pw, content, phi, JOINT_GRID_POINTS)?;
    Ok(JointOptimum { power: g.arg.0, eta: g.arg.1, iterations: JOINT_MAX_ITER, converged: false, damped: damp < 1.0 })
}

/// Exhaustive search of [`joint_ee`] over a `points × points` log grid:
/// power within `±POWER_SPAN_DB` of the configured value, η over `[1/N_f, 1]`.
pub fn joint_grid_argmax(
    net: &NetworkConfig,
    pw: &PowerConfig,
    content: &ContentConfig,
    phi: &PhiEstimate,
    points: usize,
) -> Result<Argmax2> {
    let pg = power_grid(net.transmit_power, points)?;
    let eg = Grid::log(1.0 / content.catalog_size as f64, 1.0, points)?;
    grid_argmax_2d(|p, e| joint_ee(net, pw, content, phi, p, e), &pg, &eg)
        .ok_or_else(|| Error::domain("joint_grid_argmax", "EE is NaN everywhere"))
}

/// Derivative-free check of the stationarity equations at `(P, η)`:
/// returns the relative residuals of the power and cache conditions.
pub fn joint_residuals(net: &NetworkConfig, pw: &PowerConfig, content: &ContentConfig, phi: &PhiEstimate, power: f64, eta: f64) -> Result<(f64, f64)> {
    let n_f = content.catalog_size as f64;
    let s = static_power(net, pw, pw.cache_coeff * eta * n_f * content.content_size);
    let pa = net.active_probability();
    let rhs = pa * pw.amplifier_factor * power
        * ((f64::from(net.antennas) * power / net.edge_noise()).ln() + net.pathloss_exponent / 2.0 - 1.0);
    let eta0 = eta0_at_power(net, pw, content, phi, power)?;
    Ok(((s - rhs).abs() / s, (eta0 - eta).abs() / eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dbm_to_watt;
    use crate::popularity::BITS_PER_MB;

    fn net() -> NetworkConfig {
        NetworkConfig {
            bs_count: 37,
            antennas: 4,
            cell_radius: 250.0 / 37f64.sqrt(),
            bandwidth: 20e6,
            pathloss_exponent: 3.67,
            pathloss_intercept_db: 30.6,
            noise_power: dbm_to_watt(-95.0),
            mean_users: 30.0,
            interference_factor: 0.0,
            transmit_power: dbm_to_watt(21.0),
        }
    }

    fn power(c_bh: f64) -> PowerConfig {
        PowerConfig {
            amplifier_factor: 15.13,
            circuit_active: 10.16,
            circuit_idle: 3.85,
            cache_coeff: 6.25e-12,
            backhaul_coeff: 5e-7,
            backhaul_capacity: c_bh,
        }
    }

    fn content(n_f: u64) -> ContentConfig {
        ContentConfig::new(n_f, 30.0 * BITS_PER_MB, 1.0, n_f / 10).unwrap()
    }

    fn phi() -> PhiEstimate {
        PhiEstimate::exact(-2.0, 3.67)
    }

    #[test]
    fn rejects_other_skew() {
        let mut c = content(10_000);
        c.skew = 0.8;
        assert!(matches!(optimal_eta(&net(), &power(1e8), &c, &phi()), Err(Error::Regime(_))));
        assert!(matches!(caching_benefit_condition(&net(), &power(1e8), &c, &phi()), Err(Error::Regime(_))));
    }

    #[test]
    fn joint_optimum_rejects_interference_limited() {
        let loud = NetworkConfig { interference_factor: 0.5, ..net() };
        let r = joint_optimum(&loud, &power(f64::INFINITY), &content(10_000), &PhiEstimate::exact(0.7, 3.67));
        assert!(matches!(r, Err(Error::Regime(_))));
        assert!(joint_optimum(&net(), &power(f64::INFINITY), &content(10_000), &phi()).unwrap().converged);
    }

    #[test]
    fn zero_backhaul_always_benefits() {
        let r = caching_benefit_condition(&net(), &power(0.0), &content(10_000), &phi()).unwrap();
        assert!(r.holds);
        assert!(r.rhs.is_infinite());
    }

    #[test]
    fn infinite_condition_consistent() {
        let a = caching_benefit_condition(&net(), &power(f64::INFINITY), &content(10_000), &phi()).unwrap();
        let b = caching_benefit_condition_infinite_backhaul(&net(), &power(1e8), &content(10_000), &phi()).unwrap();
        assert!((a.rhs - b.rhs).abs() <= 1e-9 * b.rhs);
        assert_eq!(a.lhs, b.lhs);
    }

    #[test]
    fn finite_eta_is_grid_maximizer() {
        let r = optimal_eta(&net(), &power(1e8), &content(10_000), &phi()).unwrap();
        assert!(r.maximizer_verified, "{r:?}");
        assert!(r.eta_star <= 1.0);
        assert!(r.omega.is_finite());
    }

    #[test]
    fn unlimited_eta_is_grid_maximizer() {
        let r = optimal_eta_infinite_backhaul(&net(), &power(1e8), &content(100_000), &phi()).unwrap();
        assert!(r.maximizer_verified, "{r:?}");
    }

    #[test]
    fn threshold_identity() {
        let n = net();
        let pw = power(f64::INFINITY);
        let n_th = tradeoff_threshold(&n, &pw, &content(10_000), &phi()).unwrap();
        // at N_f = N_th the unlimited stationary point is exactly 1
        let t = CachingTerms::new(&n, &pw, &content(10_000), &phi()).unwrap();
        let t = CachingTerms { catalog_size: n_th, ..t };
        assert!((unlimited_eta0(&t) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn power_solves_stationarity() {
        let n = net();
        let pw = power(f64::INFINITY);
        let p0 = optimal_power_for_cache_power(&n, &pw, 1.5).unwrap();
        let s = static_power(&n, &pw, 1.5);
        let pa = n.active_probability();
        let rhs = pa * pw.amplifier_factor * p0 * ((4.0 * p0 / n.edge_noise()).ln() + 3.67 / 2.0 - 1.0);
        assert!((s - rhs).abs() < 1e-9 * s);
    }
}
