//! Pinned outputs. Set `UPDATE_GOLDEN=1` to rewrite them after reviewing a
//! deliberate change.

mod common;

use std::fs;

use common::*;

#[test]
fn outputs_match_golden_files() {
    let actual = golden_outputs(&[lib_dir()]);
    let dir = golden_dir();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        let _ = fs::remove_dir_all(&dir);
        for (rel, text) in &actual {
            let p = dir.join(rel);
            fs::create_dir_all(p.parent().unwrap()).unwrap();
            fs::write(p, text).unwrap();
        }
    }
    let expected = read_tree(&dir);
    let names = |m: &std::collections::BTreeMap<String, String>| m.keys().cloned().collect::<Vec<_>>();
    assert_eq!(names(&actual), names(&expected), "set of golden files");
    for (rel, text) in &expected {
        assert_eq!(&actual[rel], text, "{rel}");
    }
}

#[test]
fn translate_then_run_term_matches_run() {
    let spec = s(&simple_spec());
    for p in programs() {
        let prog = s(&p);
        let term = cbs(&["translate", &spec, &prog]);
        let piped = cbs_stdin(&["run-term", &spec, "-"], &term.stdout);
        let direct = cbs(&["run", &spec, &prog]);
        assert_eq!((piped.code, &piped.stdout), (direct.code, &direct.stdout), "{prog}");
    }
}
