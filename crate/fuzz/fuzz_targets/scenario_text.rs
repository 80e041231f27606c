#![no_main]

use libfuzzer_sys::fuzz_target;
use pneumodel::scenario::parse_scenario;
use pneumodel::ModelConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((cfg, sc)) = parse_scenario(text, &ModelConfig::default()) {
        assert!(cfg.check().is_ok());
        assert!(sc.check().is_ok());
        assert!(sc.duration > 0.0 && sc.duration.is_finite());
    }
});
