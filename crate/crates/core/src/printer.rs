//! Pretty-printing of specifications back into the meta-language.
//!
//! `parse_cbs(&print_spec(s))` reproduces `s` up to spans.

use std::fmt::Write;

use crate::syntax::*;
use crate::term::Term;

pub fn print_spec(spec: &CbsSpec) -> String {
    let mut out = String::new();
    for d in &spec.datatype_defs {
        out.push_str(&datatype_line(d));
        out.push('\n');
    }
    for e in &spec.entity_decls {
        out.push_str(&entity_line(e));
        out.push('\n');
    }
    for f in &spec.funcon_defs {
        out.push_str(&signature_line(f));
        out.push('\n');
        for r in &f.rules {
            out.push_str(&rule_line(r));
            out.push('\n');
        }
    }
    for a in &spec.aliases {
        let _ = writeln!(out, "Alias {} = {}", a.alias, a.target);
    }
    for l in &spec.language_specs {
        out.push_str(&print_language(l));
    }
    out
}

pub fn print_language(l: &LanguageSpec) -> String {
    let mut out = format!("Language {}\n", l.name);
    for p in &l.productions {
        out.push_str(&production_line(p));
        out.push('\n');
    }
    for p in &l.priorities {
        let chain: Vec<&str> = p.chain.iter().map(|n| &**n).collect();
        let _ = writeln!(out, "Priority {}", chain.join(" > "));
    }
    for s in &l.semantics_decls {
        out.push_str(&semantics_line(s));
        out.push('\n');
    }
    for e in &l.equations {
        out.push_str(&equation_line(e));
        out.push('\n');
    }
    for d in &l.desugar_rules {
        let _ = writeln!(out, "Desugar [[ {} ]] = [[ {} ]]", d.lhs, d.rhs);
    }
    out
}

pub fn signature_line(f: &FunconDef) -> String {
    let mut s = String::new();
    if f.builtin {
        s.push_str("Builtin ");
    }
    let _ = write!(s, "Funcon {}", f.name);
    if !f.signature.params.is_empty() {
        let params: Vec<String> = f
            .signature
            .params
            .iter()
            .map(|p| {
                format!(
                    "{}:{}{}{}",
                    p.name.as_deref().unwrap_or("_"),
                    if p.strict { "" } else { "=>" },
                    p.sort,
                    if p.variadic { "*" } else { "" }
                )
            })
            .collect();
        let _ = write!(s, "({})", params.join(", "));
    }
    let sig = &f.signature;
    let _ = write!(
        s,
        " : {}{}{}",
        if sig.result_computes { "=>" } else { "" },
        sig.result_sort,
        if sig.result_optional { "?" } else { "" }
    );
    s
}

pub fn entity_line(e: &EntityDecl) -> String {
    let mut s = format!("Entity {} {} : {}", e.class.as_str(), e.name, e.value_sort);
    if let Some(d) = &e.default {
        let _ = write!(s, " default {d}");
    }
    s
}

pub fn datatype_line(d: &DatatypeDef) -> String {
    let ctors: Vec<String> = d
        .constructors
        .iter()
        .map(|c| {
            if c.arg_sorts.is_empty() {
                c.name.to_string()
            } else {
                let args: Vec<&str> = c.arg_sorts.iter().map(|a| &**a).collect();
                format!("{}({})", c.name, args.join(", "))
            }
        })
        .collect();
    format!("Datatype {} ::= {}", d.sort, ctors.join(" | "))
}

pub fn production_line(p: &Production) -> String {
    let mut s = if p.lexical && &*p.sort == LAYOUT_SORT {
        "Layout ::=".to_string()
    } else if p.lexical {
        format!("Lexical {} ::=", p.sort)
    } else {
        format!("Syntax {} ::=", p.sort)
    };
    for sym in &p.symbols {
        let _ = write!(s, " {sym}");
    }
    let mut attrs = Vec::new();
    if let Some(a) = p.attrs.assoc {
        attrs.push(a.as_str().to_string());
    }
    if let Some(n) = p.attrs.prio {
        attrs.push(format!("prio {n}"));
    }
    if let Some(n) = &p.attrs.name {
        attrs.push(format!("name {n}"));
    }
    if !attrs.is_empty() {
        let _ = write!(s, "  {{{}}}", attrs.join(", "));
    }
    s
}

pub fn semantics_line(d: &SemanticsDecl) -> String {
    format!(
        "Semantics {}(_:{}) : {}{}",
        d.fn_name,
        d.source_sort,
        if d.result_computes { "=>" } else { "" },
        d.result_sort
    )
}

pub fn equation_line(e: &TranslationEquation) -> String {
    format!("Rule {}({}) = {}", e.fn_name, e.lhs, e.rhs)
}

fn bindings(bs: &[EntityBinding]) -> String {
    bs.iter()
        .map(|b| format!("{}({})", b.entity, b.term))
        .collect::<Vec<_>>()
        .join(", ")
}

fn config(t: &Term, state: &[EntityBinding]) -> String {
    if state.is_empty() {
        t.to_string()
    } else {
        format!("<{}, {}>", t, bindings(state))
    }
}

fn arrow(a: Arrow, labels: &[EntityBinding]) -> String {
    if !labels.is_empty() {
        format!("--{}->", bindings(labels))
    } else if a == Arrow::Rewrite {
        "~>".to_string()
    } else {
        "--->".to_string()
    }
}

#[allow(clippy::too_many_arguments)]
fn judgement(
    ctx: &[EntityBinding],
    lhs: &Term,
    before: &[EntityBinding],
    a: Arrow,
    labels: &[EntityBinding],
    rhs: &Term,
    after: &[EntityBinding],
) -> String {
    let mut s = String::new();
    if !ctx.is_empty() {
        let _ = write!(s, "{} |- ", bindings(ctx));
    }
    let _ = write!(s, "{} {} {}", config(lhs, before), arrow(a, labels), config(rhs, after));
    s
}

pub fn rule_line(r: &Rule) -> String {
    let mut s = String::from("Rule ");
    if !r.premises.is_empty() {
        let ps: Vec<String> = r
            .premises
            .iter()
            .map(|p| {
                judgement(
                    &p.ctx_overrides,
                    &Term::var(&p.subject),
                    &p.state_before,
                    p.arrow,
                    &p.observed_signals,
                    &p.result,
                    &p.state_after,
                )
            })
            .collect();
        let _ = write!(s, "{} ==> ", ps.join("; "));
    }
    s.push_str(&judgement(
        &r.context_reads,
        &r.lhs,
        &r.state_reads,
        r.arrow,
        &r.emitted,
        &r.rhs,
        &r.entity_writes,
    ));
    if !r.side_conditions.is_empty() {
        let cs: Vec<String> = r
            .side_conditions
            .iter()
            .map(|c| match c {
                Condition::Eq(a, b) => format!("{a} == {b}"),
                Condition::Ne(a, b) => format!("{a} != {b}"),
                Condition::HasSort(a, s) => format!("{a} : {s}"),
            })
            .collect();
        let _ = write!(s, " where {}", cs.join(", "));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_cbs;

    const SAMPLE: &str = r#"
Datatype booleans ::= true | false
Entity mutable store : stores default {}
Entity control abrupted : values
Funcon if-true-else(_:booleans, _:=>T, _:=>T) : =>T
Rule if-true-else(true, X, Y) ~> X
Rule if-true-else(false, X, Y) ~> Y
Builtin Funcon map-lookup(_:maps, _:values) : values?
Funcon h(_:=>T, H:=>T) : =>T
Rule X --abrupted(V)-> X' ==> h(X, H) ---> H where V != 0, V : integers
Rule <X, store(S)> ---> <X', store(S')> ==> <h(X, H), store(S)> ---> <h(X', H), store(S')>
Alias if-else = if-true-else
Language demo
Layout ::= [\ \t\n]
Lexical ID ::= [a-z]+
Syntax Exp ::= ID | Exp "&&" Exp  {left, prio 3, name and}
Syntax Exp ::= Exp "||" Exp {name or}
Priority and > or
Semantics rval(_:Exp) : =>values
Rule rval(Exp1 "&&" Exp2) = if-else(rval(Exp1), rval(Exp2), false)
Desugar [[ Exp1 "||" Exp2 ]] = [[ Exp2 "||" Exp1 ]]
"#;

    #[test]
    fn printed_spec_reparses_equal() {
        let s = parse_cbs(SAMPLE, "a.cbs").unwrap();
        let printed = print_spec(&s);
        let back = parse_cbs(&printed, "b.cbs").unwrap_or_else(|d| panic!("{printed}\n{d:?}"));
        assert_eq!(s.without_spans(), back.without_spans());
        assert_eq!(print_spec(&back), printed);
    }

    #[test]
    fn rule_rendering() {
        let s = parse_cbs(SAMPLE, "a.cbs").unwrap();
        assert_eq!(
            rule_line(&s.funcon_defs[0].rules[0]),
            "Rule if-true-else(true,X,Y) ~> X"
        );
        assert_eq!(
            signature_line(&s.funcon_defs[1]),
            "Builtin Funcon map-lookup(_:maps, _:values) : values?"
        );
    }
}
