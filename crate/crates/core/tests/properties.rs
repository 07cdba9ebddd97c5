use cachee_core::analytic::{cell_throughput, edge_rate, rate_cache_hit, rate_cache_miss, PhiEstimate, PowerConfig};
use cachee_core::geometry::{build_hex_layout, scheduled_count_pmf, NetworkConfig, Point};
use cachee_core::grid::{grid_argmax, parse_grid, Grid};
use cachee_core::optimizer::{optimal_eta_infinite_backhaul, CachingTerms};
use cachee_core::popularity::{hit_ratio, zipf_pmf, ContentConfig, ZipfTable};
use cachee_core::scenario::{parse_config, preset};
use cachee_core::sim::{rayleigh_matrix, slot_throughput, zfbf_precoder};
use cachee_core::special::{harmonic_sum, lambert_w0, lambert_w0_exp, lower_reg_gamma_int, upper_reg_gamma_int};
use cachee_core::stats::RunningStats;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pico_net(beta: f64, load: f64) -> NetworkConfig {
    let mut n = preset("pico").unwrap().net;
    n.interference_factor = beta;
    n.mean_users = load * f64::from(n.bs_count);
    n
}

proptest! {
    #[test]
    fn lambert_w_inverts(log_x in -14.0f64..14.0) {
        let x = 10f64.powf(log_x);
        let w = lambert_w0(x).unwrap();
        prop_assert!(w >= -1.0);
        prop_assert!((w * w.exp() - x).abs() <= 1e-12 * x.max(1.0));
    }

    #[test]
    fn lambert_w_of_exponential_matches(a in -20.0f64..600.0) {
        let w = lambert_w0_exp(a).unwrap();
        // w + ln w = a
        prop_assert!((w + w.ln() - a).abs() <= 1e-12 * a.abs().max(1.0));
        if a < 700.0 {
            prop_assert!((w - lambert_w0(a.exp()).unwrap()).abs() <= 1e-12 * w.max(1e-300));
        }
    }

    #[test]
    fn gamma_pair_is_a_partition(k in 1u32..=64, x in 0.0f64..200.0) {
        let q = upper_reg_gamma_int(k, x).unwrap();
        let p = lower_reg_gamma_int(k, x).unwrap();
        prop_assert!((0.0..=1.0).contains(&q));
        prop_assert_eq!(q + p, 1.0);
        prop_assert!(upper_reg_gamma_int(k + 1, x).unwrap() >= q);
    }

    #[test]
    fn harmonic_sum_grows(n in 1u64..5_000, delta in 0.0f64..2.0) {
        let h = harmonic_sum(n, delta).unwrap();
        prop_assert!(harmonic_sum(n + 1, delta).unwrap() > h);
        prop_assert!(h <= n as f64 + 1e-9);
    }

    #[test]
    fn zipf_is_a_distribution(n_f in 1u64..3_000, skew in 0.0f64..2.0) {
        let c = ContentConfig::new(n_f, 1.0, skew, 0).unwrap();
        let total: f64 = (1..=n_f).map(|f| zipf_pmf(f, &c).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        if n_f > 1 {
            prop_assert!(zipf_pmf(1, &c).unwrap() >= zipf_pmf(2, &c).unwrap());
        }
    }

    #[test]
    fn hit_ratio_grows_with_cache(n_f in 2u64..20_000, skew in 0.0f64..1.5, frac in 0.0f64..1.0) {
        let n_c = (frac * n_f as f64) as u64;
        let c = ContentConfig::new(n_f, 1.0, skew, n_c).unwrap();
        let h = hit_ratio(&c).unwrap();
        let h1 = hit_ratio(&c.with_cached((n_c + 1).min(n_f)).unwrap()).unwrap();
        prop_assert!((0.0..=1.0).contains(&h));
        prop_assert!(h1 >= h);
        // caching the most popular contents beats the uniform share
        prop_assert!(h >= n_c as f64 / n_f as f64 - 1e-12);
    }

    #[test]
    fn zipf_sampling_stays_in_catalog(n_f in 1u64..1_000, skew in 0.0f64..2.0, seed in any::<u64>()) {
        let t = ZipfTable::new(n_f, skew).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let r = t.sample(&mut rng);
            prop_assert!((1..=n_f).contains(&r));
        }
    }

    #[test]
    fn scheduled_count_pmf_sums_to_one(load in 0.0f64..20.0, n_t in 1u32..16) {
        let pmf = scheduled_count_pmf(load * 37.0, 37, n_t);
        prop_assert_eq!(pmf.len(), n_t as usize + 1);
        prop_assert!(pmf.iter().all(|&p| p >= 0.0));
        prop_assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nearest_bs_is_nearest(x in -300.0f64..300.0, y in -300.0f64..300.0) {
        let l = build_hex_layout(3, 3, 40.0).unwrap();
        let p = Point::new(x, y);
        let b = l.nearest_bs(&p);
        let d = l.bs_positions[b].dist2(&p);
        prop_assert!(l.bs_positions.iter().all(|q| q.dist2(&p) >= d));
    }

    #[test]
    fn miss_rate_capped_and_monotone(
        k_b in 1u32..=4,
        frac in 0.0f64..1.0,
        log_cap in 5.0f64..11.0,
        beta in 0.0f64..1.0,
        phi in -1.0f64..2.0,
    ) {
        let k_c = ((k_b as f64) * frac) as u32;
        let net = pico_net(beta, 0.8);
        let phi = PhiEstimate::exact(phi, net.pathloss_exponent);
        // the high-SINR rates only describe cells whose edge SINR exceeds one
        prop_assume!(edge_rate(k_b, &net, &phi).unwrap() >= 0.0);
        let cap = 10f64.powf(log_cap);
        let r = rate_cache_miss(k_b, k_c, cap, &net, &phi).unwrap();
        let r2 = rate_cache_miss(k_b, k_c, 1.5 * cap, &net, &phi).unwrap();
        let unlimited = rate_cache_hit(k_b, k_b - k_c, &net, &phi).unwrap();
        prop_assert!(r >= 0.0);
        prop_assert!(r <= cap * (1.0 + 1e-12));
        prop_assert!(r2 >= r * (1.0 - 1e-12));
        prop_assert!(r <= unlimited * (1.0 + 1e-12));
    }

    #[test]
    fn throughput_monotone_in_capacity_and_cache(
        beta in 0.0f64..1.0,
        load in 0.2f64..3.0,
        eta in 0.0f64..0.9,
        log_cap in 6.0f64..10.0,
    ) {
        let s = preset("pico").unwrap();
        let net = pico_net(beta, load);
        let phi = PhiEstimate::exact(0.68, net.pathloss_exponent);
        let c = s.content.with_eta(eta).unwrap();
        let more = s.content.with_eta(eta + 0.1).unwrap();
        let pw = PowerConfig { backhaul_capacity: 10f64.powf(log_cap), ..s.power };
        let pw2 = PowerConfig { backhaul_capacity: 2.0 * pw.backhaul_capacity, ..s.power };
        let t = cell_throughput(&net, &pw, &c, &phi).unwrap();
        prop_assert!(cell_throughput(&net, &pw2, &c, &phi).unwrap() >= t * (1.0 - 1e-12));
        prop_assert!(cell_throughput(&net, &pw, &more, &phi).unwrap() >= t * (1.0 - 1e-12));
    }

    #[test]
    fn unlimited_optimum_is_a_maximum(log_n_f in 3.0f64..6.0, beta in 0.0f64..1.0, log_wca in -13.0f64..-9.0) {
        let s = preset("pico").unwrap();
        let content = ContentConfig { skew: 1.0, catalog_size: 10f64.powf(log_n_f) as u64, ..s.content };
        let content = content.with_cached(1).unwrap();
        let pw = PowerConfig { cache_coeff: 10f64.powf(log_wca), backhaul_capacity: f64::INFINITY, ..s.power };
        let net = pico_net(beta, 0.8);
        let phi = PhiEstimate::exact(0.68, net.pathloss_exponent);
        let r = optimal_eta_infinite_backhaul(&net, &pw, &content, &phi).unwrap();
        let t = CachingTerms::new(&net, &pw, &content, &phi).unwrap();
        let lo = 1.0 / content.catalog_size as f64;
        let best = t.ee_vs_eta_unlimited(r.eta_star);
        for f in [0.5, 0.9, 1.1, 2.0] {
            let e = (r.eta_star * f).clamp(lo, 1.0);
            prop_assert!(t.ee_vs_eta_unlimited(e) <= best * (1.0 + 1e-12));
        }
    }

    #[test]
    fn slot_throughput_caps_backhaul(rates in prop::collection::vec((0.0f64..1e9, any::<bool>()), 0..8), cap in 0.0f64..1e9) {
        let r = slot_throughput(&rates, cap);
        prop_assert!(r.backhaul <= cap);
        let hit: f64 = rates.iter().filter(|x| x.1).map(|x| x.0).sum();
        prop_assert_eq!(r.hit, hit);
        prop_assert!(r.total() <= rates.iter().map(|x| x.0).sum::<f64>() + 1e-6);
    }

    #[test]
    fn zero_forcing_nulls_other_users(seed in any::<u64>(), k in 1usize..=4, extra in 0usize..4) {
        let n_t = k + extra;
        let h = rayleigh_matrix(k, n_t, &mut ChaCha8Rng::seed_from_u64(seed));
        let w = zfbf_precoder(&h).unwrap();
        let hw = &h * &w;
        let scale = h.norm();
        for i in 0..k {
            prop_assert!((w.column(i).norm() - 1.0).abs() < 1e-12);
            for j in 0..k {
                if i != j {
                    prop_assert!(hw[(i, j)].norm() <= 1e-9 * scale);
                }
            }
        }
    }

    #[test]
    fn running_stats_merge_matches_sequential(xs in prop::collection::vec(-1e6f64..1e6, 1..200), split in 0usize..200) {
        let split = split.min(xs.len());
        let all: RunningStats = xs.iter().copied().collect();
        let a: RunningStats = xs[..split].iter().copied().collect();
        let b: RunningStats = xs[split..].iter().copied().collect();
        let m = a.merge(&b);
        prop_assert_eq!(m.count(), all.count());
        prop_assert!((m.mean() - all.mean()).abs() <= 1e-9 * all.mean().abs().max(1.0));
        if xs.len() > 1 {
            prop_assert!((m.variance() - all.variance()).abs() <= 1e-9 * all.variance().max(1.0));
        }
    }

    #[test]
    fn grid_text_round_trips(lo in 1e-3f64..1e3, ratio in 1.5f64..1e3, n in 2usize..50, log in any::<bool>()) {
        let g = if log { Grid::log(lo, lo * ratio, n) } else { Grid::linear(lo, lo * ratio, n) }.unwrap();
        let back = parse_grid(&g.to_string()).unwrap();
        prop_assert_eq!(back.len(), g.len());
        for (a, b) in g.values().iter().zip(back.values()) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs());
        }
        prop_assert!(g.values().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn grid_argmax_finds_vertex(v in -0.9f64..0.9) {
        let g = Grid::linear(-1.0, 1.0, 401).unwrap();
        let best = grid_argmax(|x| -(x - v) * (x - v), &g).unwrap();
        prop_assert!((best.arg - v).abs() <= 0.5 * 2.0 / 400.0 + 1e-12);
    }

    #[test]
    fn config_round_trips(
        n_t in 1u32..16,
        beta in 0.0f64..1.0,
        p_dbm in 0.0f64..40.0,
        cap in prop_oneof![Just(f64::INFINITY), 1e6f64..1e10],
        n_c in 0u64..10_000,
        skew in 0.0f64..2.0,
        drops in 1u64..100_000,
        seed in any::<u64>(),
    ) {
        let mut s = preset("pico").unwrap();
        s.net.antennas = n_t;
        s.net.interference_factor = beta;
        s.net.transmit_power = cachee_core::geometry::dbm_to_watt(p_dbm);
        s.power.backhaul_capacity = cap;
        s.content.cached_count = n_c;
        s.content.skew = skew;
        s.sim.drops = drops;
        s.sim.seed = seed;
        let text = s.to_config_string();
        let back = parse_config(&text, &preset("macro").unwrap()).unwrap();
        prop_assert_eq!(back.to_config_string(), text);
        prop_assert_eq!(back.hash(), s.hash());
    }

    #[test]
    fn config_parser_never_panics(text in "\\PC{0,200}") {
        let _ = parse_config(&text, &preset("pico").unwrap());
    }
}
