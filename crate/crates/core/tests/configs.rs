//! The shipped configuration files parse, validate and build their states.

use lc_emulsion::io::load_config;

#[test]
fn shipped_configs_load() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = load_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            let s = cfg.initial_state().unwrap();
            assert_eq!(s.flow.is_some(), cfg.flow.enabled, "{}", path.display());
            n += 1;
        }
    }
    assert!(n >= 4);
}
