#![no_main]

use coopgraph::coalescence::{decode_tau_dump, encode_tau_dump};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(mt) = decode_tau_dump(data) {
        assert_eq!(encode_tau_dump(&mt), data);
        for i in 0..mt.n() {
            assert_eq!(mt.get(i, i), 0.0);
        }
    }
});
