#![no_main]

mod simple;

use cbs_core::interp::{canonicalize, Interpreter, RunOptions};
use cbs_core::parse_term;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(t) = parse_term(text, "fuzz") else { return };
    let table = simple::simple().table();
    let opts = RunOptions { fuel: 500, trace: true };
    let a = Interpreter::new(table).run(&canonicalize(&t, table), &opts);
    let b = Interpreter::new(table).run(&canonicalize(&t, table), &opts);
    assert_eq!(a, b);
});
