#![no_main]

mod simple;

use cbs_core::interp::{Interpreter, RunOptions};
use cbs_core::translate::translate_program;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let l = simple::simple();
    let lang = l.language(Some("simple")).unwrap();
    let g = &l.analysis.grammars["simple"];
    if let Ok(t) = translate_program(lang, g, l.table(), text, "fuzz", None) {
        let _ = Interpreter::new(l.table()).run(
            &t,
            &RunOptions {
                fuel: 2_000,
                trace: false,
            },
        );
    }
});
