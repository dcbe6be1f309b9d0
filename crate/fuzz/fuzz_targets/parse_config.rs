#![no_main]

use libfuzzer_sys::fuzz_target;
use tfwd_cli::parse_config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = parse_config(text) {
        // Resolution may reject the values, but must not panic.
        let _ = cfg.resolve();
    }
});
