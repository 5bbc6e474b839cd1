#![no_main]

use g2cone::cli::{Command, ScenarioConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = ScenarioConfig::parse(text) {
        for command in [Command::VerifyAppendix, Command::Solve, Command::Converge, Command::Torsion, Command::CheckMetric] {
            let _ = cfg.resolved(command);
        }
        let _ = cfg.r_grid();
    }
});
