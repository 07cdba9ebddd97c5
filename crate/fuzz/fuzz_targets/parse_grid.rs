#![no_main]
use cachee_core::grid::parse_grid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(g) = parse_grid(text) {
        assert!(!g.is_empty());
        assert!(g.values().iter().all(|v| v.is_finite()));
        let v = g.values();
        assert!(v.windows(2).all(|w| w[1] > w[0]) || v.windows(2).all(|w| w[1] < w[0]));
        let back = parse_grid(&g.to_string()).expect("displayed grid reparses");
        assert_eq!(back.values(), g.values());
    }
});
