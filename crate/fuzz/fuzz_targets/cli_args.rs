#![no_main]

use clap::Parser;
use libfuzzer_sys::fuzz_target;
use mixfem_cli::Args;

// Arguments are NUL-separated; only parsing and validation run, never a study.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let argv = std::iter::once("mixfem").chain(text.split('\0'));
        if let Ok(args) = Args::try_parse_from(argv) {
            let _ = args.validate();
        }
    }
});
