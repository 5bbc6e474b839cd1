//! The checked-in fuzz seeds are valid inputs for their entry points.

use std::path::PathBuf;

use g2cone::cli::{FnSpec, ProfileSpec, ScenarioConfig};
use g2cone::flow::io::{read_flow_table, InitialTable};

fn seeds(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("seed_"))
        .map(|p| {
            let bytes = std::fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn config_seeds_parse() {
    for (path, bytes) in seeds("config_parse") {
        let text = String::from_utf8(bytes).unwrap();
        ScenarioConfig::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

#[test]
fn spec_seeds_parse() {
    for (path, bytes) in seeds("spec_parse") {
        let text = String::from_utf8(bytes).unwrap();
        let ok = text.parse::<FnSpec>().is_ok() || text.parse::<ProfileSpec>().is_ok();
        assert!(ok, "{}", path.display());
    }
}

#[test]
fn table_seeds_read() {
    for (path, bytes) in seeds("initial_table") {
        let table = InitialTable::read(bytes.as_slice()).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        table.to_flow_data(1e-10).unwrap();
    }
    for (path, bytes) in seeds("flow_table") {
        read_flow_table(bytes.as_slice()).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
