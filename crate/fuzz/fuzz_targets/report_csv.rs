#![no_main]

use libfuzzer_sys::fuzz_target;
use mixfem::analysis::parse_csv;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(parsed) = parse_csv(text) {
            assert!(parsed.rows.iter().all(|r| r.errors().iter().all(|e| e.is_finite() && *e > 0.0)));
            assert_eq!(parsed.orders.len(), parsed.rows.len().saturating_sub(1));
        }
    }
});
