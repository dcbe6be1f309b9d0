#![no_main]

use libfuzzer_sys::fuzz_target;
use tfwd_core::model::io::{parse_density, parse_density_table};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = parse_density_table(text) {
        assert_eq!(table.radii.len(), table.values.len());
    }
    if let Ok(rho) = parse_density(text) {
        assert_eq!(rho.values().len(), rho.grid().nodes().len());
    }
});
