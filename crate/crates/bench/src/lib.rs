//! Criterion benchmarks for `repvol-core`; see `benches/`.

/// Reads a corpus file from the workspace `data/` directory.
pub fn corpus(name: &str) -> repvol_core::Input {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    let bytes = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    repvol_core::parse(&bytes).expect("corpus files parse")
}
