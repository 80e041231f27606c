#![no_main]

use libfuzzer_sys::fuzz_target;
use pneumodel::config::{parse_entries, ModelConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let entries = parse_entries(text);
    let parsed = ModelConfig::from_config_str(text);
    // a document that fully parses must also split into entries
    if parsed.is_ok() {
        assert!(entries.is_ok());
    }
    if let Ok(cfg) = parsed {
        // serialised configs parse back
        let again = ModelConfig::from_config_str(&cfg.to_config_string());
        assert!(again.is_ok(), "{:?}", again.err());
    }
});
