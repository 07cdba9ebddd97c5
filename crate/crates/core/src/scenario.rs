//! Named parameter presets and the scenario file format.
//!
//! A scenario file is a list of `key = value` lines grouped under
//! `[network]`, `[power]`, `[content]` and `[sim]`, optionally preceded by
//! a top-level `preset = NAME`. `#` and `;` start comments. Units are part
//! of the key name. Unknown or repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::analytic::PowerConfig;
use crate::error::{Error, Result};
use crate::geometry::{dbm_to_watt, NetworkConfig};
use crate::popularity::{ContentConfig, BITS_PER_MB};
use crate::sim::{Association, SimOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub net: NetworkConfig,
    pub power: PowerConfig,
    pub content: ContentConfig,
    pub sim: SimOptions,
}

pub const PRESET_NAMES: [&str; 6] = ["pico", "macro", "ssd", "dram", "microwave", "fiber"];

fn pico() -> Scenario {
    Scenario {
        name: "pico".into(),
        net: NetworkConfig {
            bs_count: 37,
            antennas: 4,
            cell_radius: 250.0 / 37f64.sqrt(),
            bandwidth: 20e6,
            pathloss_exponent: 3.67,
            pathloss_intercept_db: 30.6,
            noise_power: dbm_to_watt(-95.0),
            mean_users: 30.0,
            interference_factor: 0.5,
            transmit_power: dbm_to_watt(21.0),
        },
        power: PowerConfig {
            amplifier_factor: 15.13,
            circuit_active: 10.16,
            circuit_idle: 3.85,
            cache_coeff: 6.25e-12,
            backhaul_coeff: 5e-7,
            backhaul_capacity: 100e6,
        },
        content: ContentConfig { catalog_size: 10_000, content_size: 30.0 * BITS_PER_MB, skew: 0.8, cached_count: 1_000 },
        sim: SimOptions::default(),
    }
}

/// Same coverage and user density as `pico`, with each macro cell the size
/// of a whole pico cluster.
fn macro_cell() -> Scenario {
    let mut s = pico();
    s.name = "macro".into();
    s.net.cell_radius = 250.0;
    s.net.antennas = 4 * 37;
    s.net.mean_users = 30.0 * 37.0;
    s.net.transmit_power = dbm_to_watt(46.0);
    s.power.amplifier_factor = 3.22;
    s.power.circuit_idle = 2.01e3;
    s.power.circuit_active = 3.81e3;
    s.power.backhaul_capacity = 3.7e9;
    s
}

fn apply_hardware(s: &mut Scenario, name: &str) -> bool {
    match name {
        "ssd" => s.power.cache_coeff = 6.25e-12,
        "dram" => s.power.cache_coeff = 2.5e-9,
        "microwave" => {
            s.power.backhaul_coeff = 5e-7;
            s.power.backhaul_capacity = 100e6;
        }
        "fiber" => {
            s.power.backhaul_coeff = 4e-8;
            s.power.backhaul_capacity = 1e9;
        }
        _ => return false,
    }
    true
}

/// Looks up a preset. Names compose with `+`: at most one base (`pico`,
/// `macro`; `pico` if omitted) followed by hardware presets applied in
/// order, e.g. `pico+dram+fiber`.
pub fn preset(name: &str) -> Result<Scenario> {
    let parts: Vec<&str> = name.split('+').map(str::trim).collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::UnknownPreset(name.to_string()));
    }
    let (mut s, rest) = match parts[0] {
        "pico" => (pico(), &parts[1..]),
        "macro" => (macro_cell(), &parts[1..]),
        _ => (pico(), &parts[..]),
    };
    for p in rest {
        if !apply_hardware(&mut s, p) {
            return Err(Error::UnknownPreset((*p).to_string()));
        }
    }
    s.name = name.trim().to_string();
    Ok(s)
}

/// Parses a preset name without building it; used to validate user input.
pub fn parse_preset(name: &str) -> Result<String> {
    preset(name).map(|s| s.name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Top,
    Network,
    Power,
    Content,
    Sim,
}

impl Section {
    fn name(self) -> &'static str {
        match self {
            Section::Top => "",
            Section::Network => "network",
            Section::Power => "power",
            Section::Content => "content",
            Section::Sim => "sim",
        }
    }
}

/// Canonical quantity for a key, so that unit variants of one quantity
/// count as a repeat.
fn quantity(section: Section, key: &str) -> Option<&'static str> {
    use Section::*;
    Some(match (section, key) {
        (Top, "preset") => "preset",
        (Network, "bs_count") => "bs_count",
        (Network, "antennas") => "antennas",
        (Network, "cell_radius_m") => "cell_radius",
        (Network, "bandwidth_mhz" | "bandwidth_hz") => "bandwidth",
        (Network, "pathloss_exponent") => "pathloss_exponent",
        (Network, "pathloss_intercept_db") => "pathloss_intercept",
        (Network, "noise_power_dbm" | "noise_power_w") => "noise_power",
        (Network, "mean_users") => "mean_users",
        (Network, "interference_factor") => "interference_factor",
        (Network, "transmit_power_dbm" | "transmit_power_w") => "transmit_power",
        (Power, "amplifier_factor") => "amplifier_factor",
        (Power, "circuit_active_w") => "circuit_active",
        (Power, "circuit_idle_w") => "circuit_idle",
        (Power, "cache_coeff_w_per_bit") => "cache_coeff",
        (Power, "backhaul_coeff_j_per_bit") => "backhaul_coeff",
        (Power, "backhaul_capacity_mbps" | "backhaul_capacity_bps") => "backhaul_capacity",
        (Content, "catalog_size") => "catalog_size",
        (Content, "content_size_mb" | "content_size_bits") => "content_size",
        (Content, "skew") => "skew",
        (Content, "cached_count" | "normalized_cache") => "cache_size",
        (Sim, "drops") => "drops",
        (Sim, "seed") => "seed",
        (Sim, "shadowing_db") => "shadowing",
        (Sim, "association") => "association",
        _ => return None,
    })
}

struct Entry {
    line: usize,
    section: Section,
    key: String,
    value: String,
}

fn err(e: &Entry, msg: impl Into<String>) -> Error {
    Error::Config { line: e.line, key: e.key.clone(), msg: msg.into() }
}

fn real(e: &Entry) -> Result<f64> {
    let v: f64 = e.value.parse().map_err(|_| err(e, format!("`{}` is not a number", e.value)))?;
    if !v.is_finite() {
        return Err(err(e, "value must be finite"));
    }
    Ok(v)
}

fn real_or_inf(e: &Entry) -> Result<f64> {
    match e.value.to_ascii_lowercase().as_str() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        _ => real(e),
    }
}

fn integer<T: std::str::FromStr>(e: &Entry) -> Result<T> {
    e.value.parse().map_err(|_| err(e, format!("`{}` is not a nonnegative integer", e.value)))
}

fn tokenize(text: &str) -> Result<Vec<Entry>> {
    let mut section = Section::Top;
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split(['#', ';']).next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(inner) = content.strip_prefix('[') {
            let name = inner
                .strip_suffix(']')
                .ok_or_else(|| Error::Config { line, key: content.into(), msg: "unterminated section header".into() })?
                .trim();
            section = match name {
                "network" => Section::Network,
                "power" => Section::Power,
                "content" => Section::Content,
                "sim" => Section::Sim,
                _ => return Err(Error::Config { line, key: name.into(), msg: "unknown section".into() }),
            };
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::Config { line, key: content.into(), msg: "expected `key = value`".into() })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(Error::Config { line, key: String::new(), msg: "missing key".into() });
        }
        if value.is_empty() {
            return Err(Error::Config { line, key: key.into(), msg: "missing value".into() });
        }
        entries.push(Entry { line, section, key: key.into(), value: value.into() });
    }
    Ok(entries)
}

/// Parses scenario text on top of `base`. A `preset` key replaces `base`
/// before the other overrides are applied.
pub fn parse_config(text: &str, base: &Scenario) -> Result<Scenario> {
    let entries = tokenize(text)?;
    let mut seen: BTreeMap<(&'static str, &'static str), usize> = BTreeMap::new();
    for e in &entries {
        let q = quantity(e.section, &e.key).ok_or_else(|| {
            let where_ = if e.section == Section::Top { "top level".to_string() } else { format!("[{}]", e.section.name()) };
            err(e, format!("unknown key in {where_}"))
        })?;
        if let Some(first) = seen.insert((e.section.name(), q), e.line) {
            return Err(err(e, format!("repeats a setting from line {first}")));
        }
    }

    let mut s = base.clone();
    if let Some(e) = entries.iter().find(|e| e.section == Section::Top) {
        s = preset(&e.value).map_err(|x| err(e, x.to_string()))?;
    }
    for e in entries.iter().filter(|e| e.section != Section::Top) {
        apply(&mut s, e)?;
    }
    s.net.validate()?;
    s.power.validate()?;
    s.content.validate()?;
    Ok(s)
}

fn apply(s: &mut Scenario, e: &Entry) -> Result<()> {
    match e.key.as_str() {
        "bs_count" => s.net.bs_count = integer(e)?,
        "antennas" => s.net.antennas = integer(e)?,
        "cell_radius_m" => s.net.cell_radius = real(e)?,
        "bandwidth_mhz" => s.net.bandwidth = real(e)? * 1e6,
        "bandwidth_hz" => s.net.bandwidth = real(e)?,
        "pathloss_exponent" => s.net.pathloss_exponent = real(e)?,
        "pathloss_intercept_db" => s.net.pathloss_intercept_db = real(e)?,
        "noise_power_dbm" => s.net.noise_power = dbm_to_watt(real(e)?),
        "noise_power_w" => s.net.noise_power = real(e)?,
        "mean_users" => s.net.mean_users = real(e)?,
        "interference_factor" => s.net.interference_factor = real(e)?,
        "transmit_power_dbm" => s.net.transmit_power = dbm_to_watt(real(e)?),
        "transmit_power_w" => s.net.transmit_power = real(e)?,
        "amplifier_factor" => s.power.amplifier_factor = real(e)?,
        "circuit_active_w" => s.power.circuit_active = real(e)?,
        "circuit_idle_w" => s.power.circuit_idle = real(e)?,
        "cache_coeff_w_per_bit" => s.power.cache_coeff = real(e)?,
        "backhaul_coeff_j_per_bit" => s.power.backhaul_coeff = real(e)?,
        "backhaul_capacity_mbps" => s.power.backhaul_capacity = real_or_inf(e)? * 1e6,
        "backhaul_capacity_bps" => s.power.backhaul_capacity = real_or_inf(e)?,
        "catalog_size" => {
            let eta = s.content.eta();
            s.content.catalog_size = integer(e)?;
            // keep the cache fraction unless the file sets the cache size
            s.content.cached_count = ((eta * s.content.catalog_size as f64).round() as u64).min(s.content.catalog_size);
        }
        "content_size_mb" => s.content.content_size = real(e)? * BITS_PER_MB,
        "content_size_bits" => s.content.content_size = real(e)?,
        "skew" => s.content.skew = real(e)?,
        "cached_count" => s.content.cached_count = integer(e)?,
        "normalized_cache" => {
            let eta = real(e)?;
            s.content = s.content.with_eta(eta).map_err(|x| err(e, x.to_string()))?;
        }
        "drops" => s.sim.drops = integer(e)?,
        "seed" => s.sim.seed = integer(e)?,
        "shadowing_db" => s.sim.shadowing_db = real(e)?,
        "association" => {
            s.sim.association = match e.value.as_str() {
                "nearest" => Association::Nearest,
                "strongest" => Association::Strongest,
                "distributed" => Association::Distributed,
                other => return Err(err(e, format!("unknown association `{other}`"))),
            }
        }
        _ => return Err(err(e, "unknown key")),
    }
    Ok(())
}

/// Reads and parses a scenario file on top of `base`.
pub fn load_config(path: &Path, base: &Scenario) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, base)
}

impl Scenario {
    /// Scenario file that reproduces `self` exactly, in SI keys. Catalog
    /// size is written before the cache size so the latter wins.
    pub fn to_config_string(&self) -> String {
        let n = &self.net;
        let p = &self.power;
        let c = &self.content;
        let o = &self.sim;
        let mut out = String::new();
        let _ = writeln!(out, "[network]");
        let _ = writeln!(out, "bs_count = {}", n.bs_count);
        let _ = writeln!(out, "antennas = {}", n.antennas);
        let _ = writeln!(out, "cell_radius_m = {:?}", n.cell_radius);
        let _ = writeln!(out, "bandwidth_hz = {:?}", n.bandwidth);
        let _ = writeln!(out, "pathloss_exponent = {:?}", n.pathloss_exponent);
        let _ = writeln!(out, "pathloss_intercept_db = {:?}", n.pathloss_intercept_db);
        let _ = writeln!(out, "noise_power_w = {:?}", n.noise_power);
        let _ = writeln!(out, "mean_users = {:?}", n.mean_users);
        let _ = writeln!(out, "interference_factor = {:?}", n.interference_factor);
        let _ = writeln!(out, "transmit_power_w = {:?}", n.transmit_power);
        let _ = writeln!(out, "\n[power]");
        let _ = writeln!(out, "amplifier_factor = {:?}", p.amplifier_factor);
        let _ = writeln!(out, "circuit_active_w = {:?}", p.circuit_active);
        let _ = writeln!(out, "circuit_idle_w = {:?}", p.circuit_idle);
        let _ = writeln!(out, "cache_coeff_w_per_bit = {:?}", p.cache_coeff);
        let _ = writeln!(out, "backhaul_coeff_j_per_bit = {:?}", p.backhaul_coeff);
        if p.backhaul_capacity.is_infinite() {
            let _ = writeln!(out, "backhaul_capacity_bps = inf");
        } else {
            let _ = writeln!(out, "backhaul_capacity_bps = {:?}", p.backhaul_capacity);
        }
        let _ = writeln!(out, "\n[content]");
        let _ = writeln!(out, "catalog_size = {}", c.catalog_size);
        let _ = writeln!(out, "content_size_bits = {:?}", c.content_size);
        let _ = writeln!(out, "skew = {:?}", c.skew);
        let _ = writeln!(out, "cached_count = {}", c.cached_count);
        let _ = writeln!(out, "\n[sim]");
        let _ = writeln!(out, "drops = {}", o.drops);
        let _ = writeln!(out, "seed = {}", o.seed);
        let _ = writeln!(out, "shadowing_db = {:?}", o.shadowing_db);
        let assoc = match o.association {
            Association::Nearest => "nearest",
            Association::Strongest => "strongest",
            Association::Distributed => "distributed",
        };
        let _ = writeln!(out, "association = {assoc}");
        out
    }

    /// First 16 hex digits of the SHA-256 of the canonical config text.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_config_string().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_values() {
        assert_eq!(preset("pico").unwrap().power.cache_coeff, 6.25e-12);
        assert_eq!(preset("dram").unwrap().power.cache_coeff, 2.5e-9);
        let f = preset("fiber").unwrap();
        assert_eq!(f.power.backhaul_coeff, 4e-8);
        assert_eq!(f.power.backhaul_capacity, 1e9);
        let m = preset("macro").unwrap();
        assert_eq!(m.net.antennas, 148);
        assert_eq!(m.power.backhaul_capacity, 3.7e9);
        let c = preset("pico+dram+fiber").unwrap();
        assert_eq!((c.power.cache_coeff, c.power.backhaul_coeff), (2.5e-9, 4e-8));
        assert!(matches!(preset("nano"), Err(Error::UnknownPreset(_))));
        assert!(preset("pico+").is_err());
        assert!(preset("dram+pico").is_err());
    }

    #[test]
    fn empty_file_keeps_preset() {
        let base = preset("pico").unwrap();
        assert_eq!(parse_config("", &base).unwrap(), base);
        assert_eq!(parse_config("# nothing\n\n; here\n", &base).unwrap(), base);
    }

    #[test]
    fn overrides_and_units() {
        let base = preset("pico").unwrap();
        let s = parse_config(
            "preset = pico+fiber\n[network]\ntransmit_power_dbm = 30 # 1 W\n[power]\nbackhaul_capacity_mbps = inf\n[content]\nnormalized_cache = 0.5\n[sim]\nassociation = distributed\n",
            &base,
        )
        .unwrap();
        assert!((s.net.transmit_power - 1.0).abs() < 1e-12);
        assert!(s.power.backhaul_capacity.is_infinite());
        assert_eq!(s.power.backhaul_coeff, 4e-8);
        assert_eq!(s.content.cached_count, 5000);
        assert_eq!(s.sim.association, Association::Distributed);
    }

    #[test]
    fn errors_report_line_and_key() {
        let base = preset("pico").unwrap();
        match parse_config("[network]\nantennas = 4\nwarp_factor = 9\n", &base) {
            Err(Error::Config { line, key, .. }) => assert_eq!((line, key.as_str()), (3, "warp_factor")),
            other => panic!("{other:?}"),
        }
        match parse_config("[content]\ncached_count = 3\nnormalized_cache = 0.1\n", &base) {
            Err(Error::Config { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_config("[radio]\n", &base).is_err());
        assert!(parse_config("[network]\nantennas = four\n", &base).is_err());
        assert!(parse_config("[network]\ntransmit_power_dbm = nan\n", &base).is_err());
        assert!(parse_config("[content]\ncached_count = 20000\n", &base).is_err());
        assert!(parse_config("[network]\npreset = pico\n", &base).is_err());
    }

    #[test]
    fn canonical_round_trip() {
        for name in PRESET_NAMES {
            let s = preset(name).unwrap();
            let back = parse_config(&s.to_config_string(), &preset("macro").unwrap()).unwrap();
            assert_eq!(back.net, s.net);
            assert_eq!(back.power, s.power);
            assert_eq!(back.content, s.content);
            assert_eq!(back.sim, s.sim);
        }
    }

    #[test]
    fn hash_tracks_content() {
        let a = preset("pico").unwrap();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.net.interference_factor = 1.0;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }
}
