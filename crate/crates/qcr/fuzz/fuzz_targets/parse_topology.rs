//! Feeds arbitrary text to the topology parser. Accepted inputs must
//! round-trip through serialization without changing.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qcr::topology::Topology;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(t) = Topology::parse(text) {
        let again = Topology::parse(&t.to_edge_list()).expect("serialized form parses");
        assert_eq!(again.edges(), t.edges());
        assert_eq!(again.n(), t.n());
    }
});
