//! Feeds arbitrary text to the catalog parser. Accepted inputs must
//! round-trip through the emitter losslessly.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qcr::quorum::catalog::Catalog;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(c) = Catalog::parse(text) {
        let again = Catalog::parse(&c.to_text()).expect("emitted form parses");
        assert_eq!(again, c);
    }
});
