#![no_main]

use libfuzzer_sys::fuzz_target;
use pneumodel_cli::args::{parse_list, parse_range, parse_values, MAX_POINTS};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    for parsed in [parse_range(text), parse_list(text), parse_values(text)] {
        if let Ok(v) = parsed {
            assert!(!v.is_empty() && v.len() <= MAX_POINTS + 1);
            assert!(v.iter().all(|x| x.is_finite()));
        }
    }
    if let Ok(v) = parse_range(text) {
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }
});
