//! Replays the checked-in fuzz corpus through the same checks the fuzz
//! targets make, so the seeds stay meaningful without a nightly toolchain.

use std::fs;
use std::path::{Path, PathBuf};

use cbs_core::analysis::analyze;
use cbs_core::grammar::compile_grammar;
use cbs_core::interp::{canonicalize, Interpreter, RunOptions};
use cbs_core::library::load;
use cbs_core::printer::print_spec;
use cbs_core::translate::translate_program;
use cbs_core::{parse_cbs, parse_term};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn seeds(target: &str) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = fs::read_dir(root().join("fuzz/corpus").join(target))
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.display().to_string(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn parse_cbs_seeds() {
    for (name, text) in seeds("parse_cbs") {
        let spec = parse_cbs(&text, &name).unwrap_or_else(|d| panic!("{name}: {d:?}"));
        let back = parse_cbs(&print_spec(&spec), "printed.cbs").unwrap();
        assert_eq!(back.without_spans(), spec.without_spans(), "{name}");
        analyze(&spec);
    }
}

#[test]
fn parse_term_seeds() {
    for (name, text) in seeds("parse_term") {
        let t = parse_term(&text, &name).unwrap_or_else(|d| panic!("{name}: {d:?}"));
        assert_eq!(
            parse_term(&t.to_string(), "printed").unwrap().to_string(),
            t.to_string()
        );
    }
}

#[test]
fn compile_grammar_seeds() {
    for (name, text) in seeds("compile_grammar") {
        let (g_text, input) = text.split_once("\n%%\n").unwrap();
        let spec = parse_cbs(g_text, &name).unwrap();
        for lang in &spec.language_specs {
            let g = compile_grammar(lang).unwrap_or_else(|d| panic!("{name}: {d:?}"));
            for sort in g.cf_sorts() {
                let _ = g.parse_program(input, &sort, "input");
            }
        }
    }
}

#[test]
fn program_seeds() {
    let l = load(&[root().join("lib/funcons"), root().join("languages/simple/simple.cbs")]).unwrap();
    let lang = l.language(Some("simple")).unwrap();
    let g = &l.analysis.grammars["simple"];
    for (name, text) in seeds("parse_program") {
        if let Ok(p) = g.parse_program(&text, "Pgm", &name) {
            assert_eq!(p.source_text(g), text, "{name}");
        }
    }
    for (name, text) in seeds("translate_program") {
        let t = translate_program(lang, g, l.table(), &text, &name, None).unwrap_or_else(|d| panic!("{name}: {d:?}"));
        Interpreter::new(l.table()).run(
            &t,
            &RunOptions {
                fuel: 2_000,
                trace: false,
            },
        );
    }
    for (name, text) in seeds("run_term") {
        let t = canonicalize(&parse_term(&text, &name).unwrap(), l.table());
        let opts = RunOptions { fuel: 500, trace: true };
        assert_eq!(
            Interpreter::new(l.table()).run(&t, &opts),
            Interpreter::new(l.table()).run(&t, &opts),
            "{name}"
        );
    }
}
