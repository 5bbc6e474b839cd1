#![no_main]

use g2cone::flow::io::read_flow_table;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(flow) = read_flow_table(data) {
        for y in [-1.0, 0.0, 0.5, 2.0] {
            let _ = flow.f.value(y);
            let _ = flow.h.derivative(y);
        }
    }
});
