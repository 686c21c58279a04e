#![no_main]

use coopgraph::experiments::{ExperimentConfig, ExperimentKind};
use coopgraph::generators::GeneratorSpec;
use coopgraph::kv::KvMap;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(kv) = KvMap::parse(text) else {
        return;
    };
    let reparsed = KvMap::parse(&kv.to_text()).expect("kv round trip");
    assert_eq!(reparsed.to_text(), kv.to_text());
    if let Ok(spec) = GeneratorSpec::from_kv(&kv) {
        let again = GeneratorSpec::parse(&spec.to_kv_string()).expect("spec round trip");
        assert_eq!(again, spec);
    }
    for kind in ExperimentKind::ALL {
        let _ = ExperimentConfig::resolve(kind, Some(&kv), &[]);
    }
});
