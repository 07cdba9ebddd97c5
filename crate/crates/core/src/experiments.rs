//! Experiment drivers behind the command-line tool: single-scenario
//! reports, Table-style condition checks, figure sweeps, generic sweeps and
//! the validation suite. Everything renders to CSV.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::analytic::{
    cell_throughput, estimate_phi, interference_log_term, network_ee, single_user_ee, PhiEstimate,
};
use crate::error::{Error, Result};
use crate::geometry::{dbm_to_watt, watt_to_dbm};
use crate::grid::{grid_argmax, Grid};
use crate::optimizer::{
    caching_benefit_condition, ee_vs_power, joint_grid_argmax, joint_optimum, max_ee_gain, optimal_eta,
    optimal_eta_infinite_backhaul, optimal_power_for_cache_power, power_grid, tradeoff_threshold,
    JOINT_GRID_POINTS, POWER_SPAN_DB,
};
use crate::popularity::{hit_ratio, ContentConfig, BITS_PER_MB};
use crate::scenario::{preset, Scenario};
use crate::sim::{layout_for, simulate, simulate_interference_log_term, Association};

/// Samples used for the interference constant.
pub const PHI_SAMPLES: u64 = 200_000;
/// Seed of the interference-constant estimate; fixed so analytic outputs
/// do not depend on the simulation seed.
pub const PHI_SEED: u64 = 0x5eed;

pub const VERSION: &str = concat!("cachee ", env!("CARGO_PKG_VERSION"));

/// Interference constant for the scenario's path-loss exponent and layout.
pub fn phi_for(s: &Scenario) -> Result<PhiEstimate> {
    estimate_phi(s.net.pathloss_exponent, &layout_for(&s.net)?, PHI_SAMPLES, PHI_SEED)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "true" } else { "false" }.to_string())
    }
}

/// Nine significant digits; infinities as `inf`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.8e}")
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Num(v) => f.write_str(&format_float(*v)),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(t) => f.write_str(t),
        }
    }
}

/// Comma-separated table with `#` metadata lines above the header.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Csv {
    pub meta: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { meta: Vec::new(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Standard metadata: scenario hash, seed and version.
    pub fn stamped(self, s: &Scenario) -> Self {
        self.meta("scenario", s.hash()).meta("seed", s.sim.seed).meta("version", VERSION)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Closed-form summary of one scenario as `quantity,value` rows.
pub fn analyze(s: &Scenario, phi: &PhiEstimate) -> Result<Csv> {
    let r = network_ee(&s.net, &s.power, &s.content, phi)?;
    let su = single_user_ee(&s.net, &s.power, &s.content, phi)?;
    let mut csv = Csv::new(&["quantity", "value"]).stamped(s);
    let rows: [(&str, f64); 17] = [
        ("phi", phi.phi),
        ("phi_std_error", phi.std_error),
        ("active_probability", s.net.active_probability()),
        ("hit_ratio", hit_ratio(&s.content)?),
        ("edge_rate_bps", r.rate.edge_rate),
        ("cache_hit_rate_bps", r.rate.cache_hit_rate),
        ("cache_miss_rate_bps", r.rate.cache_miss_rate),
        ("cell_throughput_bps", r.throughput),
        ("hit_throughput_bps", r.rate.hit_throughput),
        ("backhaul_throughput_bps", r.rate.backhaul_throughput),
        ("tx_circuit_power_w", r.power.tx_circuit),
        ("caching_power_w", r.power.caching),
        ("backhaul_power_w", r.power.backhauling),
        ("total_power_w", r.total_power),
        ("ee_bit_per_joule", r.ee),
        ("single_user_throughput_bps", su.throughput),
        ("single_user_ee_bit_per_joule", su.ee),
    ];
    for (k, v) in rows {
        csv.push(vec![k.into(), v.into()]);
    }
    Ok(csv)
}

/// Closed-form optima with skew forced to 1, as `quantity,value` rows.
pub fn optimize(s: &Scenario, phi: &PhiEstimate) -> Result<Csv> {
    let content = ContentConfig { skew: 1.0, ..s.content };
    let (net, pw) = (&s.net, &s.power);
    let cond = caching_benefit_condition(net, pw, &content, phi)?;
    let eta = optimal_eta(net, pw, &content, phi)?;
    let eta_inf = optimal_eta_infinite_backhaul(net, pw, &content, phi)?;
    let quiet = crate::geometry::NetworkConfig { interference_factor: 0.0, ..*net };
    let joint = joint_optimum(&quiet, pw, &content, phi)?;
    let mut csv = Csv::new(&["quantity", "value"]).stamped(s).meta("skew", "1");
    let mut put = |k: &str, v: Cell| csv.push(vec![k.into(), v]);
    put("condition_lhs_w", cond.lhs.into());
    put("condition_rhs_w", cond.rhs.into());
    put("condition_holds", cond.holds.into());
    put("eta_star", eta.eta_star.into());
    put("eta_unclamped", eta.eta_unclamped.into());
    put("omega", eta.omega.into());
    put("eta_verified", eta.maximizer_verified.into());
    put("eta_star_unlimited_backhaul", eta_inf.eta_star.into());
    put("eta_unclamped_unlimited_backhaul", eta_inf.eta_unclamped.into());
    put("eta_unlimited_verified", eta_inf.maximizer_verified.into());
    put("tradeoff_threshold", tradeoff_threshold(net, pw, &content, phi)?.into());
    put("max_ee_gain", max_ee_gain(net, pw, &content, phi)?.into());
    let p0 = optimal_power_for_cache_power(&quiet, pw, pw.cache_coeff * content.cache_bits())?;
    put("optimal_power_noise_limited_dbm", watt_to_dbm(p0).into());
    put("joint_power_noise_limited_dbm", watt_to_dbm(joint.power).into());
    put("joint_eta_noise_limited", joint.eta.into());
    put("joint_converged", joint.converged.into());
    Ok(csv)
}

/// Monte-Carlo summary as `quantity,value,std_error` rows.
pub fn simulate_report(s: &Scenario) -> Result<Csv> {
    let layout = layout_for(&s.net)?;
    let r = simulate(&s.net, &s.power, &s.content, &layout, &s.sim)?;
    let mut csv = Csv::new(&["quantity", "value", "std_error"]).stamped(s).meta("drops", s.sim.drops);
    for (k, e) in [
        ("cell_throughput_bps", r.mean_cell_throughput),
        ("hit_throughput_bps", r.mean_hit_throughput),
        ("backhaul_rate_bps", r.mean_backhaul_rate),
        ("total_power_w", r.mean_total_power),
        ("active_fraction", r.active_fraction),
    ] {
        csv.push(vec![k.into(), e.mean.into(), e.std_error.into()]);
    }
    csv.push(vec!["ee_bit_per_joule".into(), r.ee.into(), f64::NAN.into()]);
    Ok(csv)
}

/// One row of the caching-benefit table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub cache: &'static str,
    pub backhaul: &'static str,
    pub catalog_size: u64,
    pub content_size_mb: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Hardware and catalog combinations of the caching-benefit table.
pub const TABLE1_CASES: [(&str, &str, u64, f64); 6] = [
    ("ssd", "microwave", 100_000, 10.0),
    ("ssd", "fiber", 100_000, 10.0),
    ("ssd", "fiber", 1_000, 1_000.0),
    ("dram", "microwave", 100_000, 10.0),
    ("dram", "fiber", 100_000, 10.0),
    ("dram", "microwave", 1_000, 1_000.0),
];

/// Evaluates the caching-benefit condition for each case on the pico
/// network with full interference and skew 1.
pub fn table1_rows(phi: &PhiEstimate) -> Result<Vec<Table1Row>> {
    TABLE1_CASES
        .iter()
        .map(|&(cache, backhaul, n_f, f_mb)| {
            let mut s = preset(&format!("pico+{cache}+{backhaul}"))?;
            s.net.interference_factor = 1.0;
            s.content = ContentConfig { catalog_size: n_f, content_size: f_mb * BITS_PER_MB, skew: 1.0, cached_count: 0 };
            let c = caching_benefit_condition(&s.net, &s.power, &s.content, phi)?;
            Ok(Table1Row { cache, backhaul, catalog_size: n_f, content_size_mb: f_mb, lhs: c.lhs, rhs: c.rhs, holds: c.holds })
        })
        .collect()
}

pub fn table1(phi: &PhiEstimate) -> Result<Csv> {
    let base = preset("pico")?;
    let mut csv = Csv::new(&["case", "cache", "backhaul", "catalog_size", "content_size_mb", "lhs_w", "rhs_w", "holds"])
        .stamped(&base)
        .meta("interference_factor", "1")
        .meta("skew", "1")
        .meta("phi", format_float(phi.phi));
    for (i, r) in table1_rows(phi)?.into_iter().enumerate() {
        csv.push(vec![
            (i as u64 + 1).into(),
            r.cache.into(),
            r.backhaul.into(),
            r.catalog_size.into(),
            r.content_size_mb.into(),
            r.lhs.into(),
            r.rhs.into(),
            r.holds.into(),
        ]);
    }
    Ok(csv)
}

/// Parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Normalized cache capacity.
    Eta,
    BackhaulCapacityMbps,
    InterferenceFactor,
    TransmitPowerDbm,
    /// Mean users per BS.
    Load,
    Skew,
    CatalogSize,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Eta => "eta",
            SweepParam::BackhaulCapacityMbps => "backhaul_capacity_mbps",
            SweepParam::InterferenceFactor => "interference_factor",
            SweepParam::TransmitPowerDbm => "transmit_power_dbm",
            SweepParam::Load => "load",
            SweepParam::Skew => "skew",
            SweepParam::CatalogSize => "catalog_size",
        }
    }

    /// Copy of `s` with the parameter set to `v`.
    pub fn apply(self, s: &Scenario, v: f64) -> Result<Scenario> {
        let mut s = s.clone();
        match self {
            SweepParam::Eta => s.content = s.content.with_eta(v)?,
            SweepParam::BackhaulCapacityMbps => s.power.backhaul_capacity = v * 1e6,
            SweepParam::InterferenceFactor => s.net.interference_factor = v,
            SweepParam::TransmitPowerDbm => s.net.transmit_power = dbm_to_watt(v),
            SweepParam::Load => s.net.mean_users = v * f64::from(s.net.bs_count),
            SweepParam::Skew => s.content.skew = v,
            SweepParam::CatalogSize => {
                if !(v >= 1.0) || v.fract() != 0.0 {
                    return Err(Error::InvalidConfig(format!("catalog size {v} is not a positive integer")));
                }
                let eta = s.content.eta();
                s.content.catalog_size = v as u64;
                s.content = s.content.with_eta(eta)?;
            }
        }
        s.net.validate()?;
        s.power.validate()?;
        s.content.validate()?;
        Ok(s)
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "eta" => SweepParam::Eta,
            "backhaul_capacity_mbps" => SweepParam::BackhaulCapacityMbps,
            "interference_factor" => SweepParam::InterferenceFactor,
            "transmit_power_dbm" => SweepParam::TransmitPowerDbm,
            "load" => SweepParam::Load,
            "skew" => SweepParam::Skew,
            "catalog_size" => SweepParam::CatalogSize,
            other => return Err(Error::InvalidConfig(format!("unknown sweep parameter `{other}`"))),
        })
    }
}

/// Column group a sweep reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepOutput {
    /// Analytic throughput, power and EE.
    Analytic,
    /// Single-user throughput and EE.
    SingleUser,
    /// Monte-Carlo throughput, power and EE with standard errors.
    Sim,
}

impl FromStr for SweepOutput {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "analytic" => SweepOutput::Analytic,
            "single_user" => SweepOutput::SingleUser,
            "sim" => SweepOutput::Sim,
            other => return Err(Error::InvalidConfig(format!("unknown sweep output `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub grid: Grid,
    pub outputs: Vec<SweepOutput>,
}

/// One row per grid point.
pub fn run_sweep(spec: &SweepSpec, s: &Scenario, phi: &PhiEstimate) -> Result<Csv> {
    if spec.outputs.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one output".into()));
    }
    let mut header = vec![spec.param.name()];
    for o in &spec.outputs {
        header.extend_from_slice(match o {
            SweepOutput::Analytic => &["throughput_bps", "total_power_w", "ee_bit_per_joule"][..],
            SweepOutput::SingleUser => &["single_user_throughput_bps", "single_user_ee_bit_per_joule"][..],
            SweepOutput::Sim => &[
                "sim_throughput_bps",
                "sim_throughput_se",
                "sim_total_power_w",
                "sim_total_power_se",
                "sim_ee_bit_per_joule",
            ][..],
        });
    }
    let mut csv = Csv::new(&header).stamped(s).meta("sweep", spec.param.name()).meta("grid", &spec.grid);
    let layout = layout_for(&s.net)?;
    for &v in spec.grid.values() {
        let point = spec.param.apply(s, v)?;
        let mut row: Vec<Cell> = vec![v.into()];
        for o in &spec.outputs {
            match o {
                SweepOutput::Analytic => {
                    let r = network_ee(&point.net, &point.power, &point.content, phi)?;
                    row.extend([r.throughput.into(), r.total_power.into(), r.ee.into()]);
                }
                SweepOutput::SingleUser => {
                    let r = single_user_ee(&point.net, &point.power, &point.content, phi)?;
                    row.extend([r.throughput.into(), r.ee.into()]);
                }
                SweepOutput::Sim => {
                    let r = simulate(&point.net, &point.power, &point.content, &layout, &point.sim)?;
                    row.extend([
                        r.mean_cell_throughput.mean.into(),
                        r.mean_cell_throughput.std_error.into(),
                        r.mean_total_power.mean.into(),
                        r.mean_total_power.std_error.into(),
                        r.ee.into(),
                    ]);
                }
            }
        }
        csv.push(row);
    }
    Ok(csv)
}

pub const FIGURES: [&str; 8] = ["fig1", "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig5"];

fn eta_axis() -> Result<Vec<f64>> {
    let mut v = vec![0.0];
    v.extend_from_slice(Grid::log(1e-4, 1.0, 41)?.values());
    Ok(v)
}

/// Figure-reproduction sweep on top of `base`. Monte-Carlo columns are
/// added to the figures that have them when `with_sim` is set.
pub fn figure(name: &str, base: &Scenario, phi: &PhiEstimate, with_sim: bool) -> Result<Csv> {
    let layout = layout_for(&base.net)?;
    let stamp = |csv: Csv| csv.stamped(base).meta("figure", name).meta("phi", format_float(phi.phi));
    let mut csv;
    match name {
        "fig1" => {
            let betas = [0.1, 0.5, 1.0];
            let mut header = vec!["load".to_string()];
            for b in betas {
                header.push(format!("closed_form_beta{b}"));
                if with_sim {
                    header.push(format!("sim_beta{b}"));
                    header.push(format!("sim_beta{b}_se"));
                }
            }
            csv = stamp(Csv { header, ..Csv::default() });
            for &load in Grid::linear(0.2, 3.0, 15)?.values() {
                let mut row: Vec<Cell> = vec![load.into()];
                for b in betas {
                    let mut net = base.net;
                    net.mean_users = load * f64::from(net.bs_count);
                    net.interference_factor = b;
                    row.push(interference_log_term(&net, phi).into());
                    if with_sim {
                        let e = simulate_interference_log_term(&net, &layout, base.sim.drops, base.sim.seed, b, base.sim.workers)?;
                        row.extend([e.mean.into(), e.std_error.into()]);
                    }
                }
                csv.push(row);
            }
        }
        "fig2a" | "fig3a" => {
            let throughput = name == "fig2a";
            let series: Vec<(String, Scenario)> = if throughput {
                [0.0, 1.0]
                    .iter()
                    .map(|&b| {
                        let mut s = base.content.with_eta(0.1).map(|c| Scenario { content: c, ..base.clone() })?;
                        s.net.interference_factor = b;
                        Ok((format!("beta{b}"), s))
                    })
                    .collect::<Result<_>>()?
            } else {
                [0.0, 0.001, 0.01, 0.1]
                    .iter()
                    .map(|&eta| {
                        let mut s = Scenario { content: base.content.with_eta(eta)?, ..base.clone() };
                        s.net.interference_factor = 0.5;
                        Ok((format!("eta{eta}"), s))
                    })
                    .collect::<Result<_>>()?
            };
            let mut header = vec!["backhaul_capacity_mbps".to_string()];
            for (label, _) in &series {
                header.push(if throughput { format!("throughput_{label}") } else { format!("ee_{label}") });
                if with_sim && throughput {
                    header.push(format!("sim_throughput_{label}"));
                    header.push(format!("sim_throughput_{label}_se"));
                }
            }
            csv = stamp(Csv { header, ..Csv::default() });
            for &c in Grid::linear(10.0, 300.0, 30)?.values() {
                let mut row: Vec<Cell> = vec![c.into()];
                for (_, s) in &series {
                    let pw = crate::analytic::PowerConfig { backhaul_capacity: c * 1e6, ..s.power };
                    if throughput {
                        row.push(cell_throughput(&s.net, &pw, &s.content, phi)?.into());
                        if with_sim {
                            let r = simulate(&s.net, &pw, &s.content, &layout, &s.sim)?;
                            row.extend([r.mean_cell_throughput.mean.into(), r.mean_cell_throughput.std_error.into()]);
                        }
                    } else {
                        row.push(network_ee(&s.net, &pw, &s.content, phi)?.ee.into());
                    }
                }
                csv.push(row);
            }
        }
        "fig2b" | "fig3b" | "fig4a" => {
            let mut series: Vec<(String, Scenario)> = Vec::new();
            match name {
                "fig2b" => {
                    for b in [0.0, 1.0] {
                        let mut s = base.clone();
                        s.net.interference_factor = b;
                        series.push((format!("throughput_beta{b}"), s));
                    }
                }
                "fig3b" => {
                    for n_f in [5_000u64, 100_000] {
                        for b in [0.0, 1.0] {
                            let mut s = base.clone();
                            s.net.interference_factor = b;
                            s.content.catalog_size = n_f;
                            series.push((format!("ee_nf{n_f}_beta{b}"), s));
                        }
                    }
                }
                _ => {
                    for d in [0.5, 0.8, 1.0, 1.2] {
                        let mut s = base.clone();
                        s.net.interference_factor = 0.5;
                        s.content.skew = d;
                        series.push((format!("ee_skew{d}"), s));
                    }
                }
            }
            let mut header = vec!["eta".to_string()];
            header.extend(series.iter().map(|(l, _)| l.clone()));
            csv = stamp(Csv { header, ..Csv::default() });
            for eta in eta_axis()? {
                let mut row: Vec<Cell> = vec![eta.into()];
                for (_, s) in &series {
                    let content = s.content.with_eta(eta)?;
                    let v = if name == "fig2b" {
                        cell_throughput(&s.net, &s.power, &content, phi)?
                    } else {
                        network_ee(&s.net, &s.power, &content, phi)?.ee
                    };
                    row.push(v.into());
                }
                csv.push(row);
            }
        }
        "fig4b" => {
            let etas = [0.0, 0.01, 0.1];
            let mut header = vec!["load".to_string()];
            header.extend(etas.iter().map(|e| format!("ee_eta{e}")));
            csv = stamp(Csv { header, ..Csv::default() });
            for &load in Grid::linear(0.1, 3.0, 30)?.values() {
                let mut row: Vec<Cell> = vec![load.into()];
                for &eta in &etas {
                    let mut net = base.net;
                    net.mean_users = load * f64::from(net.bs_count);
                    net.interference_factor = 0.5;
                    row.push(network_ee(&net, &base.power, &base.content.with_eta(eta)?, phi)?.ee.into());
                }
                csv.push(row);
            }
        }
        "fig5" => {
            let cases = [(f64::INFINITY, 0.01), (f64::INFINITY, 0.1), (100e6, 0.01), (100e6, 0.1)];
            let mut header = vec!["transmit_power_dbm".to_string()];
            for (c, eta) in cases {
                let c = if c.is_infinite() { "inf".to_string() } else { format!("{}", c / 1e6) };
                header.push(format!("ee_cbh{c}_eta{eta}"));
            }
            csv = stamp(Csv { header, ..Csv::default() });
            for &dbm in Grid::linear(0.0, 40.0, 41)?.values() {
                let mut row: Vec<Cell> = vec![dbm.into()];
                for (c, eta) in cases {
                    let mut s = base.clone();
                    s.net.transmit_power = dbm_to_watt(dbm);
                    s.power.backhaul_capacity = c;
                    s.content = s.content.with_eta(eta)?;
                    row.push(single_user_ee(&s.net, &s.power, &s.content, phi)?.ee.into());
                }
                csv.push(row);
            }
        }
        other => return Err(Error::InvalidConfig(format!("unknown figure `{other}` (expected one of {})", FIGURES.join(", ")))),
    }
    Ok(csv)
}

/// Outcome of one validation check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check { name: name.to_string(), passed, detail });
    }

    pub fn to_csv(&self, s: &Scenario) -> Csv {
        let mut csv = Csv::new(&["check", "passed", "detail"]).stamped(s).meta("drops", s.sim.drops);
        for c in &self.checks {
            csv.push(vec![c.name.as_str().into(), c.passed.into(), Cell::Text(c.detail.replace(',', ";"))]);
        }
        csv
    }
}

/// Simulator-versus-model and optimizer-versus-oracle checks for one
/// scenario.
pub fn run_validate(s: &Scenario, phi: &PhiEstimate) -> Result<ValidationReport> {
    let mut rep = ValidationReport::default();
    let layout = layout_for(&s.net)?;

    let sim = simulate(&s.net, &s.power, &s.content, &layout, &s.sim)?;
    let an = cell_throughput(&s.net, &s.power, &s.content, phi)?;
    let rel = sim.mean_cell_throughput.mean / an - 1.0;
    rep.check(
        "throughput_sim_vs_model",
        rel.abs() <= 0.10,
        format!("sim {:.4e} +- {:.2e} vs model {an:.4e} ({:+.1}%; tolerance 10%)", sim.mean_cell_throughput.mean, sim.mean_cell_throughput.std_error, 100.0 * rel),
    );
    if s.sim.association == Association::Nearest {
        let pa = s.net.active_probability();
        let z = (sim.active_fraction.mean - pa) / sim.active_fraction.std_error.max(f64::MIN_POSITIVE);
        rep.check(
            "active_fraction",
            z.abs() <= 3.0,
            format!("{:.4} vs p_a {pa:.4} ({z:+.2} std errors)", sim.active_fraction.mean),
        );
    }
    let cf = interference_log_term(&s.net, phi);
    let lt = simulate_interference_log_term(&s.net, &layout, s.sim.drops, s.sim.seed, s.net.interference_factor, s.sim.workers)?;
    let rel = (lt.mean - cf) / cf.abs();
    rep.check(
        "interference_log_term",
        rel.abs() <= 0.05,
        format!("sim {:.4} +- {:.4} vs closed form {cf:.4} ({:+.2}%; tolerance 5%)", lt.mean, lt.std_error, 100.0 * rel),
    );

    let mut unit = s.clone();
    unit.content.skew = 1.0;
    let (net, pw, content) = (&unit.net, &unit.power, &unit.content);
    let eta = optimal_eta(net, pw, content, phi)?;
    rep.check("eta_finite_backhaul_oracle", eta.maximizer_verified, format!("eta* = {:.5e}", eta.eta_star));
    let eta_inf = optimal_eta_infinite_backhaul(net, pw, content, phi)?;
    rep.check("eta_unlimited_backhaul_oracle", eta_inf.maximizer_verified, format!("eta* = {:.5e}", eta_inf.eta_star));

    let mut quiet = unit.net;
    quiet.interference_factor = 0.0;
    let unlimited = crate::analytic::PowerConfig { backhaul_capacity: f64::INFINITY, ..unit.power };
    let cache_power = pw.cache_coeff * content.cache_bits();
    let p0 = optimal_power_for_cache_power(&quiet, &unlimited, cache_power)?;
    let grid = power_grid(quiet.transmit_power, 10_000)?;
    let hit = hit_ratio(content)?;
    let best = grid_argmax(|p| ee_vs_power(&quiet, &unlimited, phi, hit, cache_power, p), &grid)
        .ok_or_else(|| Error::domain("run_validate", "power grid is NaN"))?;
    let rel = best.arg / p0 - 1.0;
    rep.check(
        "power_noise_limited_oracle",
        rel.abs() <= 0.01,
        format!("P0 {:.3} dBm vs grid {:.3} dBm ({:+.3}%; tolerance 1%)", watt_to_dbm(p0), watt_to_dbm(best.arg), 100.0 * rel),
    );

    let joint = joint_optimum(&quiet, &unlimited, content, phi)?;
    let g = joint_grid_argmax(&quiet, &unlimited, content, phi, JOINT_GRID_POINTS)?;
    let p_step = (2.0 * POWER_SPAN_DB / 10.0 * std::f64::consts::LN_10) / (JOINT_GRID_POINTS - 1) as f64;
    let e_step = (content.catalog_size as f64).ln() / (JOINT_GRID_POINTS - 1) as f64;
    let dp = (joint.power / g.arg.0).ln().abs() / p_step;
    let de = (joint.eta / g.arg.1).ln().abs() / e_step;
    rep.check(
        "joint_optimum_oracle",
        joint.converged && dp <= 1.0 + 1e-9 && de <= 1.0 + 1e-9,
        format!(
            "fixed point ({:.3} dBm, {:.4e}) vs grid ({:.3} dBm, {:.4e}); offsets {dp:.2} and {de:.2} cells",
            watt_to_dbm(joint.power),
            joint.eta,
            watt_to_dbm(g.arg.0),
            g.arg.1
        ),
    );

    let caps = Grid::log(1e6, 1e10, 20)?;
    let etas = Grid::log(1e-4, 1.0, 20)?;
    let mut monotone = true;
    for &e in etas.values() {
        let c = s.content.with_eta(e)?;
        let mut prev = f64::NEG_INFINITY;
        for &cap in caps.values() {
            let pw = crate::analytic::PowerConfig { backhaul_capacity: cap, ..s.power };
            let t = cell_throughput(&s.net, &pw, &c, phi)?;
            monotone &= t >= prev * (1.0 - 1e-12);
            prev = t;
        }
    }
    for &cap in caps.values() {
        let pw = crate::analytic::PowerConfig { backhaul_capacity: cap, ..s.power };
        let mut prev = f64::NEG_INFINITY;
        for &e in etas.values() {
            let t = cell_throughput(&s.net, &pw, &s.content.with_eta(e)?, phi)?;
            monotone &= t >= prev * (1.0 - 1e-12);
            prev = t;
        }
    }
    rep.check("throughput_monotone", monotone, "20 x 20 grid over backhaul capacity and eta".into());
    Ok(rep)
}
