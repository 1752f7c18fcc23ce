#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(scenario) = cjkit::parse_scenario(text) {
        let again = cjkit::parse_scenario(&scenario.serialize()).expect("serialized scenario parses");
        assert_eq!(again, scenario);
        // Building and checking must not panic either; closure is bounded
        // by the world limit.
        if scenario.worlds.len() <= 4 {
            let _ = cjkit::run_scenario(&scenario);
        }
    }
});
