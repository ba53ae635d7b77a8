//! Feeds arbitrary text to the report JSON reader. Accepted inputs
//! must survive an emit-and-reparse cycle unchanged.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qcr::experiment::ExperimentReport;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(report) = ExperimentReport::from_json(text) {
        let emitted = report.to_json();
        let again = ExperimentReport::from_json(&emitted).expect("emitted form parses");
        assert_eq!(again.to_json(), emitted);
    }
});
