#![no_main]

use libfuzzer_sys::fuzz_target;
use mixfem::analysis::parse_mesh_list;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(meshes) = parse_mesh_list(text) {
            assert!(!meshes.is_empty() && meshes[0] > 0);
            assert!(meshes.windows(2).all(|w| w[1] == 2 * w[0]));
        }
    }
});
