#![no_main]

use coopgraph::Graph;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = Graph::parse_edge_list(text) {
        let again = Graph::parse_edge_list(&g.to_edge_list_string()).expect("round trip");
        assert_eq!(again.n(), g.n());
        assert_eq!(again.edge_count(), g.edge_count());
        let _ = g.degree_moments();
        let _ = g.component_sizes();
    }
});
