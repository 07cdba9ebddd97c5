//! Monte-Carlo link-level simulator.
//!
//! Each drop places users, associates them, schedules up to `N_t` users per
//! BS, draws Rayleigh fading and zero-forcing precoders for every BS, and
//! measures throughput and power at the core cells. Drop `i` uses its own
//! ChaCha8 stream, and per-drop results are reduced in drop order, so a
//! run is reproducible bit for bit regardless of the number of workers.

mod zfbf;

pub use zfbf::{complex_normal, rayleigh_matrix, zfbf_precoder};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::analytic::PowerConfig;
use crate::error::{Error, Result};
use crate::geometry::{
    associate_by_loss, associate_distributed, associate_nearest, build_hex_layout, drop_users, CellLayout,
    DistributedCache, NetworkConfig, UserDrop,
};
use crate::popularity::{ContentConfig, ZipfTable};
use crate::stats::{Estimate, RunningStats};

/// Distances below this are clamped; the path-loss model is not meant for
/// the near field.
const MIN_DISTANCE_M: f64 = 1.0;
const MAX_RESAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Association {
    /// Closest BS.
    #[default]
    Nearest,
    /// Lowest path loss including shadowing.
    Strongest,
    /// Three-class distributed caching; users go to the nearest BS that
    /// holds their request.
    Distributed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub drops: u64,
    pub seed: u64,
    /// Log-normal shadowing standard deviation in dB; 0 disables it.
    pub shadowing_db: f64,
    pub association: Association,
    /// Rayon worker count; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { drops: 10_000, seed: 1, shadowing_db: 0.0, association: Association::Nearest, workers: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSummary {
    /// Mean throughput of a core cell, bit/s.
    pub mean_cell_throughput: Estimate,
    /// Part of the cell throughput delivered from the local cache.
    pub mean_hit_throughput: Estimate,
    /// Mean backhaul traffic of a core cell, bit/s.
    pub mean_backhaul_rate: Estimate,
    /// Mean power of a core BS, W.
    pub mean_total_power: Estimate,
    /// Fraction of core BSs with at least one user.
    pub active_fraction: Estimate,
    /// Ratio of means, bit/J.
    pub ee: f64,
    pub drops: u64,
    pub seed: u64,
}

/// Hexagonal layout with three guard tiers whose core holds `bs_count`
/// cells (1, 7, 19, 37, ...).
pub fn layout_for(net: &NetworkConfig) -> Result<CellLayout> {
    let n = net.bs_count;
    let tiers = (0..64u32)
        .find(|&t| 3 * t * (t + 1) + 1 == n)
        .ok_or_else(|| Error::InvalidConfig(format!("bs_count {n} is not a hexagonal number (1, 7, 19, 37, ...)")))?;
    build_hex_layout(tiers, 3, net.cell_radius)
}

/// Scheduled users, activity flags, own-cell channels and precoders of one
/// time slot.
#[derive(Debug, Clone)]
pub struct SlotRealization {
    /// User indices scheduled at each BS, at most `N_t`.
    pub scheduled: Vec<Vec<usize>>,
    pub active: Vec<bool>,
    /// Per BS, `K_b × N_t` with rows `h^H` of its scheduled users.
    pub channels: Vec<DMatrix<Complex64>>,
    /// Per BS, `N_t × K_b` unit-norm beams.
    pub precoders: Vec<DMatrix<Complex64>>,
}

impl SlotRealization {
    /// `|h_k^H w_k|²` of the `i`-th scheduled user of `bs`.
    pub fn beam_gain(&self, bs: usize, i: usize) -> f64 {
        let h = self.channels[bs].row(i);
        let w = self.precoders[bs].column(i);
        h.iter().zip(w.iter()).map(|(a, b)| a * b).sum::<Complex64>().norm_sqr()
    }
}

/// Schedules a uniform random subset of `min(K, N_t)` users at every BS
/// and draws channels and precoders.
pub fn realize_slot<R: Rng + ?Sized>(drop: &UserDrop, bs_count: usize, antennas: usize, rng: &mut R) -> Result<SlotRealization> {
    let per_bs = drop.users_per_bs(bs_count);
    let mut slot = SlotRealization {
        scheduled: Vec::with_capacity(bs_count),
        active: Vec::with_capacity(bs_count),
        channels: Vec::with_capacity(bs_count),
        precoders: Vec::with_capacity(bs_count),
    };
    for users in per_bs {
        let k = users.len().min(antennas);
        let mut picked: Vec<usize> = if users.len() > antennas {
            sample(rng, users.len(), k).into_iter().map(|i| users[i]).collect()
        } else {
            users
        };
        picked.sort_unstable();
        if k == 0 {
            slot.channels.push(DMatrix::zeros(0, antennas));
            slot.precoders.push(DMatrix::zeros(antennas, 0));
        } else {
            let mut tries = 0;
            loop {
                let h = rayleigh_matrix(k, antennas, rng);
                match zfbf_precoder(&h) {
                    Ok(w) => {
                        slot.channels.push(h);
                        slot.precoders.push(w);
                        break;
                    }
                    Err(Error::RankDeficient) if tries < MAX_RESAMPLES => tries += 1,
                    Err(e) => return Err(e),
                }
            }
        }
        slot.active.push(k > 0);
        slot.scheduled.push(picked);
    }
    Ok(slot)
}

/// Interference power seen by a user served by `serving`, normalized by the
/// transmit power: `Σ_{j≠b active} g_j ‖h_j^H W_j‖² / K_j` with fresh
/// Rayleigh cross channels.
pub fn interference_power<R: Rng + ?Sized>(
    slot: &SlotRealization,
    serving: usize,
    link_gain: impl Fn(usize) -> f64,
    antennas: usize,
    rng: &mut R,
) -> f64 {
    let mut total = 0.0;
    let mut h = vec![Complex64::new(0.0, 0.0); antennas];
    for (j, w) in slot.precoders.iter().enumerate() {
        if j == serving || !slot.active[j] {
            continue;
        }
        for x in h.iter_mut() {
            *x = complex_normal(rng);
        }
        let k_j = w.ncols();
        let mut leak = 0.0;
        for col in w.column_iter() {
            leak += h.iter().zip(col.iter()).map(|(a, b)| a * b).sum::<Complex64>().norm_sqr();
        }
        total += link_gain(j) * leak / k_j as f64;
    }
    total
}

/// `P g |h^H w|² / (K_b (β P I + σ²))`, with `signal` = `g |h^H w|²` and
/// `interference` the normalized interference power.
pub fn slot_sinr(signal: f64, scheduled: usize, interference: f64, net: &NetworkConfig, beta: f64) -> f64 {
    let p = net.transmit_power;
    p * signal / (scheduled as f64 * (beta * p * interference + net.noise_power))
}

/// Throughput split of one cell in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CellSlotRate {
    pub hit: f64,
    /// Backhaul-carried rate, at most `C_bh`.
    pub backhaul: f64,
}

impl CellSlotRate {
    pub fn total(&self) -> f64 {
        self.hit + self.backhaul
    }
}

/// Sum of cache-hit rates plus the backhaul-capped sum of miss rates.
/// `rates` holds `(rate, hit)` for the scheduled users of one cell.
pub fn slot_throughput(rates: &[(f64, bool)], backhaul_capacity: f64) -> CellSlotRate {
    let hit = rates.iter().filter(|r| r.1).map(|r| r.0).sum();
    let miss: f64 = rates.iter().filter(|r| !r.1).map(|r| r.0).sum();
    CellSlotRate { hit, backhaul: miss.min(backhaul_capacity) }
}

struct Context<'a> {
    net: &'a NetworkConfig,
    pw: &'a PowerConfig,
    content: &'a ContentConfig,
    layout: &'a CellLayout,
    zipf: ZipfTable,
    distributed: Option<DistributedCache>,
    opts: SimOptions,
}

#[derive(Debug, Clone, Copy, Default)]
struct DropOutcome {
    throughput: f64,
    hit: f64,
    backhaul: f64,
    power: f64,
    active: f64,
}

fn drop_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Per-link shadowing in dB, users × BSs, row-major.
fn draw_shadowing<R: Rng + ?Sized>(users: usize, bs: usize, sigma_db: f64, rng: &mut R) -> Option<Vec<f64>> {
    if sigma_db <= 0.0 {
        return None;
    }
    Some((0..users * bs).map(|_| sigma_db * rng.sample::<f64, _>(StandardNormal)).collect())
}

fn link_gain(ctx_net: &NetworkConfig, layout: &CellLayout, drop: &UserDrop, shadow: Option<&[f64]>, u: usize, j: usize) -> f64 {
    let d = drop.user_positions[u].dist(&layout.bs_positions[j]).max(MIN_DISTANCE_M);
    let g = ctx_net.pathloss().gain(d);
    match shadow {
        Some(s) => g * 10f64.powf(-s[u * layout.len() + j] / 10.0),
        None => g,
    }
}

fn associate(ctx: &Context<'_>, drop: UserDrop, shadow: Option<&[f64]>) -> UserDrop {
    let layout = ctx.layout;
    match ctx.opts.association {
        Association::Nearest => associate_nearest(drop, layout),
        Association::Strongest => {
            let positions = drop.user_positions.clone();
            let pl = ctx.net.pathloss();
            let n = layout.len();
            associate_by_loss(
                drop,
                layout,
                |u, j| {
                    let d = positions[u].dist(&layout.bs_positions[j]).max(MIN_DISTANCE_M);
                    pl.db(d).unwrap_or(f64::INFINITY) + shadow.map_or(0.0, |s| s[u * n + j])
                },
                |_, _| true,
            )
        }
        Association::Distributed => {
            associate_distributed(drop, layout, ctx.distributed.as_ref().expect("distributed cache is built"))
        }
    }
}

fn is_hit(ctx: &Context<'_>, bs: usize, rank: u64) -> bool {
    match &ctx.distributed {
        Some(cache) => cache.contains(bs, rank),
        None => rank <= ctx.content.cached_count,
    }
}

fn run_drop(ctx: &Context<'_>, index: u64) -> Result<DropOutcome> {
    let mut rng = drop_rng(ctx.opts.seed, index);
    let net = ctx.net;
    let layout = ctx.layout;
    let drop = drop_users(layout, net.mean_users, &ctx.zipf, &mut rng);
    let shadow = draw_shadowing(drop.len(), layout.len(), ctx.opts.shadowing_db, &mut rng);
    let drop = associate(ctx, drop, shadow.as_deref());
    let antennas = net.antennas as usize;
    let slot = realize_slot(&drop, layout.len(), antennas, &mut rng)?;

    let pw = ctx.pw;
    let cache_power = pw.cache_coeff * ctx.content.cache_bits();
    let mut out = DropOutcome::default();
    let mut rates = Vec::with_capacity(antennas);
    for &b in &layout.core_cells {
        rates.clear();
        let k_b = slot.scheduled[b].len();
        for (i, &u) in slot.scheduled[b].iter().enumerate() {
            let gain = |j: usize| link_gain(net, layout, &drop, shadow.as_deref(), u, j);
            let signal = gain(b) * slot.beam_gain(b, i);
            let interference = interference_power(&slot, b, gain, antennas, &mut rng);
            let sinr = slot_sinr(signal, k_b, interference, net, net.interference_factor);
            rates.push((net.bandwidth * sinr.ln_1p() / std::f64::consts::LN_2, is_hit(ctx, b, drop.requested_content[u])));
        }
        let cell = slot_throughput(&rates, pw.backhaul_capacity);
        let active = slot.active[b];
        out.throughput += cell.total();
        out.hit += cell.hit;
        out.backhaul += cell.backhaul;
        out.power += if active { pw.active_power(net.transmit_power) } else { pw.idle_power() }
            + cache_power
            + pw.backhaul_coeff * cell.backhaul;
        out.active += f64::from(u8::from(active));
    }
    let n = layout.core_cells.len() as f64;
    out.throughput /= n;
    out.hit /= n;
    out.backhaul /= n;
    out.power /= n;
    out.active /= n;
    Ok(out)
}

fn run_parallel<T: Send>(drops: u64, workers: Option<usize>, f: impl Fn(u64) -> Result<T> + Sync) -> Result<Vec<T>> {
    let job = || (0..drops).into_par_iter().map(&f).collect::<Result<Vec<T>>>();
    match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot build worker pool: {e}")))?
            .install(job),
        None => job(),
    }
}

/// Monte-Carlo estimate of per-cell throughput, power and EE.
pub fn simulate(
    net: &NetworkConfig,
    pw: &PowerConfig,
    content: &ContentConfig,
    layout: &CellLayout,
    opts: &SimOptions,
) -> Result<SimSummary> {
    net.validate()?;
    pw.validate()?;
    content.validate()?;
    if opts.drops == 0 {
        return Err(Error::InvalidConfig("need at least one drop".into()));
    }
    if !(opts.shadowing_db >= 0.0) || !opts.shadowing_db.is_finite() {
        return Err(Error::InvalidConfig("shadowing deviation must be finite and >= 0".into()));
    }
    let distributed = (opts.association == Association::Distributed)
        .then(|| DistributedCache::new(layout, content.cached_count));
    let ctx = Context {
        net,
        pw,
        content,
        layout,
        zipf: ZipfTable::for_content(content)?,
        distributed,
        opts: *opts,
    };
    let outcomes = run_parallel(opts.drops, opts.workers, |d| run_drop(&ctx, d))?;

    let mut st = [RunningStats::new(); 5];
    for o in &outcomes {
        for (s, x) in st.iter_mut().zip([o.throughput, o.hit, o.backhaul, o.power, o.active]) {
            s.push(x);
        }
    }
    let [thr, hit, bh, power, active] = st;
    Ok(SimSummary {
        mean_cell_throughput: thr.into(),
        mean_hit_throughput: hit.into(),
        mean_backhaul_rate: bh.into(),
        mean_total_power: power.into(),
        active_fraction: active.into(),
        ee: thr.mean() / power.mean(),
        drops: opts.drops,
        seed: opts.seed,
    })
}

/// Estimates `E{log2(β I_k + σ²/P)}` over scheduled users of the central
/// cell, with `I_k` the received interference normalized by the transmit
/// power. Users are served by the nearest BS.
pub fn simulate_interference_log_term(
    net: &NetworkConfig,
    layout: &CellLayout,
    drops: u64,
    seed: u64,
    beta: f64,
    workers: Option<usize>,
) -> Result<Estimate> {
    net.validate()?;
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidConfig(format!("beta = {beta} outside [0,1]")));
    }
    if drops == 0 {
        return Err(Error::InvalidConfig("need at least one drop".into()));
    }
    let zipf = ZipfTable::new(1, 0.0)?;
    let antennas = net.antennas as usize;
    let floor = net.noise_power / net.transmit_power;
    let per_drop = run_parallel(drops, workers, |d| {
        let mut rng = drop_rng(seed, d);
        let drop = associate_nearest(drop_users(layout, net.mean_users, &zipf, &mut rng), layout);
        let slot = realize_slot(&drop, layout.len(), antennas, &mut rng)?;
        let mut values = Vec::with_capacity(slot.scheduled[0].len());
        for &u in &slot.scheduled[0] {
            let gain = |j: usize| link_gain(net, layout, &drop, None, u, j);
            let i_k = interference_power(&slot, 0, gain, antennas, &mut rng);
            values.push((beta * i_k + floor).log2());
        }
        Ok(values)
    })?;
    let st: RunningStats = per_drop.into_iter().flatten().collect();
    Ok(st.into())
}
