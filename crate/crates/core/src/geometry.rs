//! Radio-plane configuration, hexagonal cell layouts, Poisson user drops,
//! path loss and user association.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::popularity::ZipfTable;
use crate::special::lower_reg_gamma_int;

pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watt_to_dbm(watt: f64) -> f64 {
    10.0 * watt.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Path loss in dB of the pico-cell model, `30.6 + 36.7 log10(r)`.
pub fn pathloss_db(r: f64) -> Result<f64> {
    PathLoss::PICO.db(r)
}

/// Log-distance path loss `intercept + 10·α·log10(r)` (r in meters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLoss {
    pub intercept_db: f64,
    pub exponent: f64,
}

impl PathLoss {
    pub const PICO: PathLoss = PathLoss { intercept_db: 30.6, exponent: 3.67 };

    pub fn db(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::domain("pathloss_db", format!("distance {r} must be > 0")));
        }
        Ok(self.intercept_db + 10.0 * self.exponent * r.log10())
    }

    /// Linear power gain `10^{-PL/10}`.
    #[inline]
    pub fn gain(&self, r: f64) -> f64 {
        10f64.powf(-self.intercept_db / 10.0) * r.powf(-self.exponent)
    }
}

/// Radio-plane parameters, SI units throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    pub bs_count: u32,
    pub antennas: u32,
    /// Cell radius `D` in meters.
    pub cell_radius: f64,
    /// Bandwidth in Hz.
    pub bandwidth: f64,
    pub pathloss_exponent: f64,
    /// Path loss at 1 m, in dB. The analytic model folds it into the noise.
    pub pathloss_intercept_db: f64,
    /// Noise power in W.
    pub noise_power: f64,
    /// Mean number of users in the whole (measured) network.
    pub mean_users: f64,
    /// Fraction of inter-cell interference that remains after coordination.
    pub interference_factor: f64,
    /// Transmit power in W.
    pub transmit_power: f64,
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.bs_count < 1 {
            return bad("bs_count must be >= 1");
        }
        if self.antennas < 1 {
            return bad("antennas must be >= 1");
        }
        if !(self.cell_radius > 0.0) || !self.cell_radius.is_finite() {
            return bad("cell_radius must be positive");
        }
        if !(self.bandwidth > 0.0) || !self.bandwidth.is_finite() {
            return bad("bandwidth must be positive");
        }
        if !(self.pathloss_exponent > 2.0) || !self.pathloss_exponent.is_finite() {
            return bad("pathloss_exponent must be > 2");
        }
        if !self.pathloss_intercept_db.is_finite() {
            return bad("pathloss_intercept_db must be finite");
        }
        if !(self.noise_power >= 0.0) || !self.noise_power.is_finite() {
            return bad("noise_power must be >= 0");
        }
        if !(self.mean_users >= 0.0) || !self.mean_users.is_finite() {
            return bad("mean_users must be >= 0");
        }
        if !(0.0..=1.0).contains(&self.interference_factor) {
            return bad("interference_factor must be in [0,1]");
        }
        if !(self.transmit_power > 0.0) || !self.transmit_power.is_finite() {
            return bad("transmit_power must be positive");
        }
        Ok(())
    }

    pub fn pathloss(&self) -> PathLoss {
        PathLoss { intercept_db: self.pathloss_intercept_db, exponent: self.pathloss_exponent }
    }

    /// Mean users per cell, `λ / N_b`.
    pub fn load(&self) -> f64 {
        self.mean_users / f64::from(self.bs_count)
    }

    pub fn active_probability(&self) -> f64 {
        active_probability(self.mean_users, self.bs_count)
    }

    /// Noise referred to the cell edge: `σ² / g(D)`, i.e. `L0·D^α·σ²`.
    pub fn edge_noise(&self) -> f64 {
        self.noise_power / self.pathloss().gain(self.cell_radius)
    }

    /// Cell-edge SNR `P·g(D)/σ²`.
    pub fn edge_snr(&self) -> f64 {
        self.transmit_power / self.edge_noise()
    }
}

/// Probability that a BS has at least one user.
pub fn active_probability(mean_users: f64, bs_count: u32) -> f64 {
    -(-mean_users / f64::from(bs_count)).exp_m1()
}

/// Distribution of the number of scheduled users `K_b ∈ {0..=max_users}`:
/// Poisson(λ/N_b) with the tail mass at `max_users`.
pub fn scheduled_count_pmf(mean_users: f64, bs_count: u32, max_users: u32) -> Vec<f64> {
    let mu = mean_users / f64::from(bs_count);
    let mut pmf = Vec::with_capacity(max_users as usize + 1);
    if max_users == 0 {
        pmf.push(1.0);
        return pmf;
    }
    let mut log_term = -mu;
    let lmu = mu.ln();
    for k in 0..max_users {
        if k > 0 {
            log_term += lmu - f64::from(k).ln();
        }
        pmf.push(if mu == 0.0 { if k == 0 { 1.0 } else { 0.0 } } else { log_term.exp() });
    }
    let tail = if mu == 0.0 { 0.0 } else { lower_reg_gamma_int(max_users, mu).unwrap_or(0.0) };
    pmf.push(tail);
    pmf
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        self.dist2(other).sqrt()
    }
}

/// Axial coordinates of a pointy-top hexagon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Axial {
    pub q: i32,
    pub r: i32,
}

impl Axial {
    const DIRECTIONS: [Axial; 6] = [
        Axial { q: 1, r: 0 },
        Axial { q: 1, r: -1 },
        Axial { q: 0, r: -1 },
        Axial { q: -1, r: 0 },
        Axial { q: -1, r: 1 },
        Axial { q: 0, r: 1 },
    ];

    pub fn distance(&self, other: &Axial) -> i32 {
        let dq = self.q - other.q;
        let dr = self.r - other.r;
        (dq.abs() + dr.abs() + (dq + dr).abs()) / 2
    }

    /// Proper 3-coloring of the hexagonal lattice.
    pub fn color(&self) -> u8 {
        (self.q - self.r).rem_euclid(3) as u8
    }

    fn to_point(self, radius: f64) -> Point {
        let q = f64::from(self.q);
        let r = f64::from(self.r);
        Point::new(radius * 3f64.sqrt() * (q + r / 2.0), radius * 1.5 * r)
    }
}

/// Hexagonal cell grid. Cell 0 is the center; cells are ordered ring by ring.
#[derive(Debug, Clone)]
pub struct CellLayout {
    pub bs_positions: Vec<Point>,
    pub axial: Vec<Axial>,
    pub core_cells: Vec<usize>,
    pub guard_cells: Vec<usize>,
    /// Hexagon circumradius in meters.
    pub cell_radius: f64,
    pub core_tiers: u32,
    pub guard_tiers: u32,
}

/// Cells within `core_tiers` rings of the center are measured; `guard_tiers`
/// further rings only add interference.
pub fn build_hex_layout(core_tiers: u32, guard_tiers: u32, cell_radius: f64) -> Result<CellLayout> {
    if guard_tiers < 3 {
        return Err(Error::InvalidConfig(format!("need >= 3 guard tiers, got {guard_tiers}")));
    }
    build_hex_layout_unchecked(core_tiers, guard_tiers, cell_radius)
}

/// Like [`build_hex_layout`] but without the guard-tier minimum; used where
/// a bare lattice is wanted (e.g. convergence studies of the interference
/// constant).
pub fn build_hex_layout_unchecked(core_tiers: u32, guard_tiers: u32, cell_radius: f64) -> Result<CellLayout> {
    if !(cell_radius > 0.0) || !cell_radius.is_finite() {
        return Err(Error::InvalidConfig("cell_radius must be positive".into()));
    }
    let total = core_tiers + guard_tiers;
    let mut axial = vec![Axial { q: 0, r: 0 }];
    for ring in 1..=total as i32 {
        // start at ring * direction 4, walk the six sides
        let mut cur = Axial { q: -ring, r: ring };
        for dir in Axial::DIRECTIONS {
            for _ in 0..ring {
                axial.push(cur);
                cur = Axial { q: cur.q + dir.q, r: cur.r + dir.r };
            }
        }
    }
    let origin = Axial { q: 0, r: 0 };
    let (mut core_cells, mut guard_cells) = (Vec::new(), Vec::new());
    for (i, a) in axial.iter().enumerate() {
        if a.distance(&origin) as u32 <= core_tiers {
            core_cells.push(i);
        } else {
            guard_cells.push(i);
        }
    }
    let bs_positions = axial.iter().map(|a| a.to_point(cell_radius)).collect();
    Ok(CellLayout { bs_positions, axial, core_cells, guard_cells, cell_radius, core_tiers, guard_tiers })
}

impl CellLayout {
    pub fn len(&self) -> usize {
        self.bs_positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bs_positions.is_empty()
    }

    pub fn is_core(&self, cell: usize) -> bool {
        self.axial[cell].distance(&Axial { q: 0, r: 0 }) as u32 <= self.core_tiers
    }

    /// Whether `p` lies in the hexagon of `cell`.
    pub fn hex_contains(&self, cell: usize, p: &Point) -> bool {
        let c = self.bs_positions[cell];
        let dx = (p.x - c.x).abs();
        let dy = (p.y - c.y).abs();
        let half_w = 3f64.sqrt() / 2.0 * self.cell_radius;
        dx <= half_w && dy <= self.cell_radius - dx / 3f64.sqrt()
    }

    /// Uniform point in the hexagon of `cell`, by rejection from its bounding box.
    pub fn sample_in_cell<R: Rng + ?Sized>(&self, cell: usize, rng: &mut R) -> Point {
        let c = self.bs_positions[cell];
        let half_w = 3f64.sqrt() / 2.0 * self.cell_radius;
        loop {
            let p = Point::new(
                c.x + (2.0 * rng.random::<f64>() - 1.0) * half_w,
                c.y + (2.0 * rng.random::<f64>() - 1.0) * self.cell_radius,
            );
            if self.hex_contains(cell, &p) {
                return p;
            }
        }
    }

    /// Index of the closest BS; ties go to the lowest index.
    pub fn nearest_bs(&self, p: &Point) -> usize {
        self.nearest_bs_where(p, |_| true).unwrap_or(0)
    }

    fn nearest_bs_where(&self, p: &Point, mut eligible: impl FnMut(usize) -> bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (j, bs) in self.bs_positions.iter().enumerate() {
            if !eligible(j) {
                continue;
            }
            let d = p.dist2(bs);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        best.map(|(j, _)| j)
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.axial[a].distance(&self.axial[b]) == 1
    }
}

/// One realization of user positions, requests and association.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UserDrop {
    pub user_positions: Vec<Point>,
    /// Cell in which the user was dropped.
    pub home_cell: Vec<usize>,
    pub serving_bs: Vec<usize>,
    pub requested_content: Vec<u64>,
}

impl UserDrop {
    pub fn len(&self) -> usize {
        self.user_positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.user_positions.is_empty()
    }

    /// Users dropped inside core cells.
    pub fn core_user_count(&self, layout: &CellLayout) -> usize {
        self.home_cell.iter().filter(|&&c| layout.is_core(c)).count()
    }

    /// Users associated to each BS.
    pub fn users_per_bs(&self, bs_count: usize) -> Vec<Vec<usize>> {
        let mut per = vec![Vec::new(); bs_count];
        for (u, &b) in self.serving_bs.iter().enumerate() {
            per[b].push(u);
        }
        per
    }
}

/// Poisson sample by sequential inversion of the CDF.
pub fn poisson_inversion<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u32 {
    if !(mean > 0.0) {
        return 0;
    }
    let u: f64 = rng.random();
    let mut k = 0u32;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u > cdf && k < 10_000 {
        k += 1;
        p *= mean / f64::from(k);
        cdf += p;
        if p == 0.0 && cdf < u {
            break;
        }
    }
    k
}

/// Poisson point process over the whole layout at density `mean_users`
/// per core region: each cell receives Poisson(λ / |core|) users placed
/// uniformly in its hexagon, with i.i.d. Zipf requests. Users are
/// initially served by their home cell.
pub fn drop_users<R: Rng + ?Sized>(layout: &CellLayout, mean_users: f64, zipf: &ZipfTable, rng: &mut R) -> UserDrop {
    let per_cell = mean_users / layout.core_cells.len() as f64;
    let mut drop = UserDrop::default();
    for cell in 0..layout.len() {
        let n = poisson_inversion(per_cell, rng);
        for _ in 0..n {
            drop.user_positions.push(layout.sample_in_cell(cell, rng));
            drop.home_cell.push(cell);
            drop.serving_bs.push(cell);
            drop.requested_content.push(zipf.sample(rng));
        }
    }
    drop
}

/// [`drop_users`] with a fresh ChaCha8 stream for `seed`.
pub fn drop_users_seeded(layout: &CellLayout, mean_users: f64, zipf: &ZipfTable, seed: u64) -> UserDrop {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    drop_users(layout, mean_users, zipf, &mut rng)
}

pub fn associate_nearest(mut drop: UserDrop, layout: &CellLayout) -> UserDrop {
    for (u, p) in drop.user_positions.iter().enumerate() {
        drop.serving_bs[u] = layout.nearest_bs(p);
    }
    drop
}

/// Associates every user with the BS minimizing `loss_db(user, bs)`
/// (ties to the lowest index) among eligible BSs; users with no eligible BS
/// fall back to the global minimum.
pub fn associate_by_loss(
    mut drop: UserDrop,
    layout: &CellLayout,
    loss_db: impl Fn(usize, usize) -> f64,
    eligible: impl Fn(usize, usize) -> bool,
) -> UserDrop {
    for u in 0..drop.len() {
        let mut best: Option<(usize, f64)> = None;
        let mut best_any: Option<(usize, f64)> = None;
        for j in 0..layout.len() {
            let l = loss_db(u, j);
            if best_any.is_none_or(|(_, bl)| l < bl) {
                best_any = Some((j, l));
            }
            if eligible(u, j) && best.is_none_or(|(_, bl)| l < bl) {
                best = Some((j, l));
            }
        }
        drop.serving_bs[u] = best.or(best_any).map(|(j, _)| j).unwrap_or(0);
    }
    drop
}

/// Distributed caching: BSs are split into three classes by a proper
/// 3-coloring; class `c` caches ranks `≡ c+1 (mod 3)` among the first
/// `3·N_c`, so each BS still holds `N_c` contents.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributedCache {
    pub cached_per_bs: u64,
    pub classes: Vec<u8>,
}

impl DistributedCache {
    pub fn new(layout: &CellLayout, cached_per_bs: u64) -> Self {
        let classes = layout.axial.iter().map(Axial::color).collect();
        Self { cached_per_bs, classes }
    }

    /// Uses the given class per BS, rejecting colorings in which two
    /// adjacent cells share a class.
    pub fn from_classes(layout: &CellLayout, cached_per_bs: u64, classes: Vec<u8>) -> Result<Self> {
        if classes.len() != layout.len() {
            return Err(Error::Coloring(format!("{} classes for {} cells", classes.len(), layout.len())));
        }
        if let Some(&c) = classes.iter().find(|&&c| c > 2) {
            return Err(Error::Coloring(format!("class {c} is not in 0..3")));
        }
        for a in 0..layout.len() {
            for b in (a + 1)..layout.len() {
                if classes[a] == classes[b] && layout.are_adjacent(a, b) {
                    return Err(Error::Coloring(format!("adjacent cells {a} and {b} share class {}", classes[a])));
                }
            }
        }
        Ok(Self { cached_per_bs, classes })
    }

    /// Class whose caches hold `rank`, if any.
    pub fn class_of_rank(&self, rank: u64) -> Option<u8> {
        if rank >= 1 && rank <= 3 * self.cached_per_bs {
            Some(((rank - 1) % 3) as u8)
        } else {
            None
        }
    }

    pub fn contains(&self, bs: usize, rank: u64) -> bool {
        self.class_of_rank(rank) == Some(self.classes[bs])
    }

    /// Ranks cached at `bs`, most popular first.
    pub fn cached_ranks(&self, bs: usize) -> impl Iterator<Item = u64> + '_ {
        let first = u64::from(self.classes[bs]) + 1;
        (0..self.cached_per_bs).map(move |i| first + 3 * i)
    }
}

/// Serves each user from the nearest BS caching its request; requests
/// outside the `3·N_c` cached ranks go to the nearest BS.
pub fn associate_distributed(mut drop: UserDrop, layout: &CellLayout, cache: &DistributedCache) -> UserDrop {
    for u in 0..drop.len() {
        let p = drop.user_positions[u];
        let serving = match cache.class_of_rank(drop.requested_content[u]) {
            Some(class) => layout.nearest_bs_where(&p, |j| cache.classes[j] == class),
            None => None,
        };
        drop.serving_bs[u] = serving.unwrap_or_else(|| layout.nearest_bs(&p));
    }
    drop
}
