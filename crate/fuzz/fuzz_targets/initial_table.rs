#![no_main]

use g2cone::flow::io::InitialTable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(table) = InitialTable::read(data) {
        if let Ok(flow) = table.to_flow_data(1e-8) {
            let y = table.y[0];
            let _ = flow.f.value(y);
            let _ = flow.h.value(y);
        }
    }
});
