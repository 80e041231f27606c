#![no_main]

use clap::Parser;
use libfuzzer_sys::fuzz_target;
use pneumodel_cli::Cli;

// Argument parsing only; executing commands would make the target slow.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let argv = std::iter::once("pneumodel").chain(text.split('\0'));
    let _ = Cli::try_parse_from(argv);
});
