use std::fs;
use std::path::{Path, PathBuf};

use cbs_core::parse_cbs;
use cbs_core::printer::print_spec;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn bundled_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(root().join("lib/funcons"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "cbs"))
        .collect();
    files.sort();
    files.push(root().join("languages/simple/simple.cbs"));
    files
}

#[test]
fn bundled_specs_parse_and_round_trip() {
    for f in bundled_files() {
        let text = fs::read_to_string(&f).unwrap();
        let spec =
            parse_cbs(&text, &f.display().to_string()).unwrap_or_else(|d| panic!("{}", cbs_core::diag::render(&d)));
        let printed = print_spec(&spec);
        let back = parse_cbs(&printed, "printed.cbs").unwrap_or_else(|d| panic!("{printed}\n{d:?}"));
        assert_eq!(spec.without_spans(), back.without_spans(), "{}", f.display());
    }
}

#[test]
fn library_manifest_matches_files() {
    use sha2::{Digest, Sha256};
    let manifest = fs::read_to_string(root().join("lib/MANIFEST")).unwrap();
    let mut listed = Vec::new();
    for line in manifest.lines() {
        let (digest, rel) = line.split_once("  ").expect("`<sha256>  <path>` lines");
        let bytes = fs::read(root().join("lib").join(rel)).unwrap();
        let actual: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(digest, actual, "{rel} changed without updating lib/MANIFEST");
        listed.push(root().join("lib").join(rel));
    }
    let mut on_disk = bundled_files();
    on_disk.pop();
    assert_eq!(listed, on_disk, "every library file is listed, in order");
}
