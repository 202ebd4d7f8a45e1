use cbs_core::library::{load, Loaded};
use std::path::Path;
use std::sync::OnceLock;

/// The bundled library and SIMPLE, loaded once per process.
pub fn simple() -> &'static Loaded {
    static L: OnceLock<Loaded> = OnceLock::new();
    L.get_or_init(|| {
        let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("..");
        load(&[root.join("lib/funcons"), root.join("languages/simple/simple.cbs")]).expect("bundled files load")
    })
}
