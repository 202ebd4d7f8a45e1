#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use cbs_cli::{run_cli, Invocation};

pub mod oracle;

pub fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

pub fn lib_dir() -> PathBuf {
    root().join("lib/funcons")
}

pub fn simple_spec() -> PathBuf {
    root().join("languages/simple/simple.cbs")
}

pub fn program(name: &str) -> PathBuf {
    root().join("languages/simple/programs").join(name)
}

pub fn programs() -> Vec<PathBuf> {
    let mut ps: Vec<PathBuf> = fs::read_dir(root().join("languages/simple/programs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    ps.sort();
    ps
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Runs `cbs` in-process with the given library paths.
pub fn cbs_with(lib: &[PathBuf], args: &[&str]) -> Invocation {
    let mut argv: Vec<String> = vec!["cbs".into()];
    for l in lib {
        argv.push("--lib".into());
        argv.push(l.display().to_string());
    }
    argv.extend(args.iter().map(|a| a.to_string()));
    run_cli(argv, &mut std::io::empty())
}

pub fn cbs(args: &[&str]) -> Invocation {
    cbs_with(&[lib_dir()], args)
}

pub fn cbs_stdin(args: &[&str], input: &str) -> Invocation {
    let mut argv: Vec<String> = vec!["cbs".into(), "--lib".into(), lib_dir().display().to_string()];
    argv.extend(args.iter().map(|a| a.to_string()));
    run_cli(argv, &mut input.as_bytes())
}

pub fn s(p: &Path) -> String {
    p.display().to_string()
}

/// A fresh, empty scratch directory.
pub fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cbs-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

pub fn read_tree(dir: &Path) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                out.insert(rel, fs::read_to_string(&p).unwrap());
            }
        }
    }
    out
}

/// Every pinned artifact, keyed by its path under `tests/golden`:
/// translated terms, run reports, traces, the parse of `a && b`, the reused
/// funcon list, and the documentation site.
pub fn golden_outputs(lib: &[PathBuf]) -> BTreeMap<String, String> {
    let spec = s(&simple_spec());
    let mut out = BTreeMap::new();
    let ok = |inv: Invocation, what: &str| {
        assert!(inv.code <= 1, "{what}: exit {} {}", inv.code, inv.stderr);
        inv.stdout
    };
    for p in programs() {
        let stem = p.file_stem().unwrap().to_string_lossy().into_owned();
        let prog = s(&p);
        out.insert(
            format!("programs/{stem}.term"),
            ok(cbs_with(lib, &["translate", &spec, &prog]), &stem),
        );
        out.insert(
            format!("programs/{stem}.run"),
            ok(cbs_with(lib, &["run", &spec, &prog]), &stem),
        );
    }
    for stem in ["if_then", "break_loop"] {
        let prog = s(&program(&format!("{stem}.simple")));
        out.insert(
            format!("traces/{stem}.trace"),
            ok(cbs_with(lib, &["run", "--trace", &spec, &prog]), stem),
        );
    }
    let dir = scratch("golden-src");
    let and = dir.join("and.exp");
    fs::write(&and, "a && b").unwrap();
    out.insert(
        "parse/and.ast".into(),
        ok(cbs_with(lib, &["parse", "--sort", "Exp", &spec, &s(&and)]), "and"),
    );
    out.insert(
        "parse/and.term".into(),
        ok(cbs_with(lib, &["translate", "--sort", "Exp", &spec, &s(&and)]), "and"),
    );
    out.insert("funcons.txt".into(), ok(cbs_with(lib, &["funcons", &spec]), "funcons"));
    let docs = dir.join("docs");
    ok(cbs_with(lib, &["doc", &spec, "--out", &s(&docs)]), "doc");
    for (rel, text) in read_tree(&docs) {
        out.insert(format!("docs/{rel}"), text);
    }
    let _ = fs::remove_dir_all(&dir);
    out
}

/// Small hand-written inputs.
pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}
