#![no_main]
use cachee_core::scenario::{parse_config, preset};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let base = preset("pico").unwrap();
    if let Ok(s) = parse_config(text, &base) {
        // whatever parses must survive its own canonical form
        let canon = s.to_config_string();
        let back = parse_config(&canon, &base).expect("canonical config reparses");
        assert_eq!(back.to_config_string(), canon);
    }
});
