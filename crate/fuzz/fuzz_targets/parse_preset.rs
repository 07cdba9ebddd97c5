#![no_main]
use cachee_core::scenario::{parse_preset, preset};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(name) = parse_preset(text) {
        let s = preset(&name).expect("normalized name resolves");
        assert_eq!(s.name, name);
    }
});
