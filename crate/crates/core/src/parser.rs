//! Recursive-descent parser for the `.cbs` meta-language.
//!
//! Parsing stops at the first error; the returned diagnostic carries the
//! position of the offending token.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::diag::{Category, Diagnostic};
use crate::lexer::{tokenize, Keyword, Tok, Token};
use crate::span::{LineIndex, SourceSpan};
use crate::syntax::*;
use crate::term::{MetaVar, Term};
use crate::value::{Name, Value};

/// Parses one `.cbs` file.
pub fn parse_cbs(text: &str, file_id: &str) -> Result<CbsSpec, Vec<Diagnostic>> {
    let mut p = Parser::new(text, file_id)?;
    p.spec().map_err(|d| vec![d])
}

/// Parses a standalone funcon term, as printed by the term pretty-printer.
pub fn parse_term(text: &str, file_id: &str) -> Result<Term, Vec<Diagnostic>> {
    let mut p = Parser::new(text, file_id)?;
    let run = |p: &mut Parser| -> PResult<Term> {
        let t = p.term(false)?;
        p.expect(&Tok::Eof, "end of input")?;
        Ok(t)
    };
    run(&mut p).map_err(|d| vec![d])
}

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    file: Arc<str>,
    index: LineIndex,
    language: Option<usize>,
}

fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Splits `Exp12''` into its stem `Exp`.
pub fn metavar_stem(var: &str) -> &str {
    var.trim_end_matches('\'')
        .trim_end_matches(|c: char| c.is_ascii_digit())
}

impl Parser {
    fn new(text: &str, file_id: &str) -> Result<Self, Vec<Diagnostic>> {
        let file: Arc<str> = Arc::from(file_id);
        let index = LineIndex::new(text);
        let toks = tokenize(text).map_err(|e| {
            let (l, c) = index.position(e.offset);
            vec![Diagnostic::error(
                Category::Parse,
                SourceSpan::point(file.clone(), l, c),
                e.message,
            )]
        })?;
        Ok(Parser {
            toks,
            pos: 0,
            file,
            index,
            language: None,
        })
    }

    // -- token plumbing ---------------------------------------------------

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if matches!(self.peek(), Tok::Lower(s) if s == w) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn span_from(&self, start_tok: usize) -> SourceSpan {
        let start = self.toks[start_tok].start;
        let end = if self.pos > start_tok {
            self.toks[self.pos - 1].end
        } else {
            self.toks[start_tok].end
        };
        self.index.span(&self.file, start, end)
    }

    fn error_here(&self, message: impl Into<String>) -> Diagnostic {
        let t = &self.toks[self.pos];
        Diagnostic::error(Category::Parse, self.index.span(&self.file, t.start, t.end), message)
    }

    fn expected<T>(&self, what: &str) -> PResult<T> {
        Err(self.error_here(format!("expected {what}, found {}", self.peek().describe())))
    }

    fn expect(&mut self, t: &Tok, what: &str) -> PResult<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.expected(what)
        }
    }

    fn lower(&mut self, what: &str) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Lower(s) => {
                self.bump();
                Ok(name(&s))
            }
            _ => self.expected(what),
        }
    }

    fn upper(&mut self, what: &str) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Upper(s) => {
                self.bump();
                Ok(name(&s))
            }
            _ => self.expected(what),
        }
    }

    fn sort_name(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Lower(s) | Tok::Upper(s) => {
                self.bump();
                Ok(name(&s))
            }
            _ => self.expected("a sort name"),
        }
    }

    // -- items ------------------------------------------------------------

    fn spec(&mut self) -> PResult<CbsSpec> {
        let mut spec = CbsSpec::default();
        loop {
            let start = self.pos;
            match self.peek().clone() {
                Tok::Eof => return Ok(spec),
                Tok::Keyword(k) => {
                    self.bump();
                    self.item(k, start, &mut spec)?;
                }
                _ => return self.expected("a declaration keyword"),
            }
        }
    }

    fn current_language<'s>(&self, spec: &'s mut CbsSpec, kw: Keyword, start: usize) -> PResult<&'s mut LanguageSpec> {
        match self.language {
            Some(i) => Ok(&mut spec.language_specs[i]),
            None => Err(Diagnostic::error(
                Category::Parse,
                self.span_from(start),
                format!("`{}` outside a Language section", kw.as_str()),
            )),
        }
    }

    fn item(&mut self, kw: Keyword, start: usize, spec: &mut CbsSpec) -> PResult<()> {
        match kw {
            Keyword::Builtin => {
                if !self.eat(&Tok::Keyword(Keyword::Funcon)) {
                    return self.expected("`Funcon` after `Builtin`");
                }
                let f = self.funcon(true, start)?;
                spec.funcon_defs.push(f);
            }
            Keyword::Funcon => {
                let f = self.funcon(false, start)?;
                spec.funcon_defs.push(f);
            }
            Keyword::Rule => {
                if self.rule_is_equation() {
                    self.current_language(spec, kw, start)?;
                    let eq = self.equation(start)?;
                    self.current_language(spec, kw, start)?.equations.push(eq);
                } else {
                    let rule = self.rule(start)?;
                    let head = rule.head().cloned().expect("rule heads are applications");
                    match spec.funcon_defs.iter_mut().rev().find(|f| f.name == head) {
                        Some(f) if f.builtin => {
                            return Err(Diagnostic::error(
                                Category::Parse,
                                rule.span,
                                format!("builtin funcon `{head}` cannot have rules"),
                            ))
                        }
                        Some(f) => f.rules.push(rule),
                        None => {
                            return Err(Diagnostic::error(
                                Category::Parse,
                                rule.span,
                                format!("rule for `{head}` must follow its Funcon declaration in the same file"),
                            ))
                        }
                    }
                }
            }
            Keyword::Alias => {
                let alias = self.lower("an alias name")?;
                self.expect(&Tok::Equals, "`=`")?;
                let target = self.lower("a funcon name")?;
                spec.aliases.push(AliasDef {
                    alias,
                    target,
                    span: self.span_from(start),
                });
            }
            Keyword::Entity => spec.entity_decls.push(self.entity(start)?),
            Keyword::Datatype => spec.datatype_defs.push(self.datatype(start)?),
            Keyword::Language => {
                let n = self.lower("a language name")?;
                spec.language_specs.push(LanguageSpec::new(n, self.span_from(start)));
                self.language = Some(spec.language_specs.len() - 1);
            }
            Keyword::Syntax | Keyword::Lexical | Keyword::Layout => {
                self.current_language(spec, kw, start)?;
                let sort = if kw == Keyword::Layout {
                    name(LAYOUT_SORT)
                } else {
                    self.upper("a sort name")?
                };
                self.expect(&Tok::Defines, "`::=`")?;
                let lexical = kw != Keyword::Syntax;
                let alts = self.alternatives()?;
                let span = self.span_from(start);
                let lang = self.current_language(spec, kw, start)?;
                if lexical {
                    lang.lexical_sorts.insert(sort.clone());
                }
                for (symbols, attrs) in alts {
                    let id = lang.productions.len();
                    lang.productions.push(Production {
                        id,
                        sort: sort.clone(),
                        symbols,
                        attrs,
                        lexical,
                        span: span.clone(),
                    });
                }
            }
            Keyword::Priority => {
                let mut chain = vec![self.lower("a production name")?];
                while self.eat(&Tok::Gt) {
                    chain.push(self.lower("a production name")?);
                }
                if chain.len() < 2 {
                    return self.expected("`>`");
                }
                let span = self.span_from(start);
                self.current_language(spec, kw, start)?
                    .priorities
                    .push(PriorityDecl { chain, span });
            }
            Keyword::Semantics => {
                let fn_name = self.lower("a translation function name")?;
                self.expect(&Tok::LParen, "`(`")?;
                self.expect(&Tok::Underscore, "`_`")?;
                self.expect(&Tok::Colon, "`:`")?;
                let source_sort = self.upper("a syntax sort")?;
                self.expect(&Tok::RParen, "`)`")?;
                self.expect(&Tok::Colon, "`:`")?;
                let result_computes = self.eat(&Tok::Computes);
                let result_sort = self.sort_name()?;
                let span = self.span_from(start);
                self.current_language(spec, kw, start)?
                    .semantics_decls
                    .push(SemanticsDecl {
                        fn_name,
                        source_sort,
                        result_sort,
                        result_computes,
                        span,
                    });
            }
            Keyword::Desugar => {
                self.current_language(spec, kw, start)?;
                self.expect(&Tok::LSyntax, "`[[`")?;
                let lhs = self.pattern(&Tok::RSyntax)?;
                self.expect(&Tok::RSyntax, "`]]`")?;
                self.expect(&Tok::Equals, "`=`")?;
                self.expect(&Tok::LSyntax, "`[[`")?;
                let rhs = self.pattern(&Tok::RSyntax)?;
                self.expect(&Tok::RSyntax, "`]]`")?;
                let span = self.span_from(start);
                self.current_language(spec, kw, start)?
                    .desugar_rules
                    .push(DesugarRule { lhs, rhs, span });
            }
        }
        Ok(())
    }

    fn funcon(&mut self, builtin: bool, start: usize) -> PResult<FunconDef> {
        let fname = self.lower("a funcon name")?;
        let mut params = Vec::new();
        if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
            loop {
                let pname = match self.peek().clone() {
                    Tok::Underscore => {
                        self.bump();
                        None
                    }
                    Tok::Upper(s) => {
                        self.bump();
                        Some(name(&s))
                    }
                    _ => return self.expected("`_` or a parameter name"),
                };
                self.expect(&Tok::Colon, "`:`")?;
                let lazy = self.eat(&Tok::Computes);
                let sort = self.sort_name()?;
                let variadic = self.eat(&Tok::Star);
                if params.iter().any(|p: &Param| p.variadic) {
                    return Err(self.error_here("only the last parameter may be variadic"));
                }
                params.push(Param {
                    name: pname,
                    sort,
                    strict: !lazy,
                    variadic,
                });
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(&Tok::Comma, "`,` or `)`")?;
            }
        }
        self.expect(&Tok::Colon, "`:` before the result sort")?;
        let result_computes = self.eat(&Tok::Computes);
        let result_sort = self.sort_name()?;
        let result_optional = self.eat(&Tok::Question);
        Ok(FunconDef {
            name: fname,
            signature: Signature {
                params,
                result_sort,
                result_computes,
                result_optional,
            },
            rules: Vec::new(),
            builtin,
            span: self.span_from(start),
        })
    }

    fn entity(&mut self, start: usize) -> PResult<EntityDecl> {
        let class = match self.peek() {
            Tok::Lower(s) if s == "contextual" => EntityClass::Contextual,
            Tok::Lower(s) if s == "mutable" => EntityClass::Mutable,
            Tok::Lower(s) if s == "control" => EntityClass::Control,
            Tok::Lower(s) if s == "output" => EntityClass::Output,
            _ => return self.expected("an entity class (contextual, mutable, control, output)"),
        };
        self.bump();
        let ename = self.lower("an entity name")?;
        self.expect(&Tok::Colon, "`:`")?;
        let value_sort = self.sort_name()?;
        let default = if self.eat_word("default") {
            Some(self.term(false)?)
        } else {
            None
        };
        Ok(EntityDecl {
            name: ename,
            class,
            value_sort,
            default,
            span: self.span_from(start),
        })
    }

    fn datatype(&mut self, start: usize) -> PResult<DatatypeDef> {
        let sort = self.lower("a datatype sort name")?;
        self.expect(&Tok::Defines, "`::=`")?;
        let mut constructors = Vec::new();
        loop {
            let cname = self.lower("a constructor name")?;
            let mut arg_sorts = Vec::new();
            if self.eat(&Tok::LParen) {
                loop {
                    arg_sorts.push(self.sort_name()?);
                    if self.eat(&Tok::RParen) {
                        break;
                    }
                    self.expect(&Tok::Comma, "`,` or `)`")?;
                }
            }
            constructors.push(ConstructorDef { name: cname, arg_sorts });
            if !self.eat(&Tok::Bar) {
                break;
            }
        }
        Ok(DatatypeDef {
            sort,
            constructors,
            span: self.span_from(start),
        })
    }

    // -- grammar productions ----------------------------------------------

    fn alternatives(&mut self) -> PResult<Vec<(Vec<Symbol>, ProdAttrs)>> {
        let mut alts = Vec::new();
        loop {
            let mut symbols = Vec::new();
            loop {
                let mut sym = match self.peek().clone() {
                    Tok::Str(s) => {
                        if s.is_empty() {
                            return Err(self.error_here("empty terminal literal"));
                        }
                        Symbol::Terminal(s)
                    }
                    Tok::Upper(s) => Symbol::Nonterm(name(&s)),
                    Tok::Class(c) => Symbol::CharClass(c),
                    _ => break,
                };
                self.bump();
                loop {
                    sym = match self.peek() {
                        Tok::Star => Symbol::Star(Box::new(sym)),
                        Tok::Plus => Symbol::Plus(Box::new(sym)),
                        Tok::Question => Symbol::Opt(Box::new(sym)),
                        _ => break,
                    };
                    self.bump();
                }
                symbols.push(sym);
            }
            let attrs = if self.eat(&Tok::LBrace) {
                self.attributes()?
            } else {
                ProdAttrs::default()
            };
            alts.push((symbols, attrs));
            if !self.eat(&Tok::Bar) {
                return Ok(alts);
            }
        }
    }

    fn attributes(&mut self) -> PResult<ProdAttrs> {
        let mut attrs = ProdAttrs::default();
        if self.eat(&Tok::RBrace) {
            return Ok(attrs);
        }
        loop {
            let word = self.lower("a production attribute")?;
            match &*word {
                "left" | "right" | "non-assoc" => {
                    if attrs.assoc.is_some() {
                        return Err(self.error_here("associativity given twice"));
                    }
                    attrs.assoc = Some(match &*word {
                        "left" => Assoc::Left,
                        "right" => Assoc::Right,
                        _ => Assoc::NonAssoc,
                    });
                }
                "prio" => match self.bump() {
                    Tok::Int(n) => {
                        attrs.prio = Some(n.parse().map_err(|_| self.error_here("priority level out of range"))?)
                    }
                    _ => return self.expected("a priority level"),
                },
                "name" => attrs.name = Some(self.lower("a production name")?),
                other => return Err(self.error_here(format!("unknown production attribute `{other}`"))),
            }
            if self.eat(&Tok::RBrace) {
                return Ok(attrs);
            }
            self.expect(&Tok::Comma, "`,` or `}`")?;
        }
    }

    // -- syntax patterns and equations -------------------------------------

    fn pattern(&mut self, close: &Tok) -> PResult<SyntaxPattern> {
        let mut items = Vec::new();
        while self.peek() != close {
            match self.peek().clone() {
                Tok::Str(s) => {
                    self.bump();
                    items.push(PatternItem::Literal(s));
                }
                Tok::Upper(s) => {
                    self.bump();
                    let op = match self.peek() {
                        Tok::Star if self.toks[self.pos].glued => Some(RegOp::Star),
                        Tok::Plus if self.toks[self.pos].glued => Some(RegOp::Plus),
                        Tok::Question if self.toks[self.pos].glued => Some(RegOp::Opt),
                        _ => None,
                    };
                    if op.is_some() {
                        self.bump();
                    }
                    items.push(PatternItem::Var {
                        stem: name(metavar_stem(&s)),
                        name: name(&s),
                        op,
                    });
                }
                _ => return self.expected("a quoted terminal or a meta-variable"),
            }
        }
        Ok(SyntaxPattern { items })
    }

    /// An equation has a top-level `=` before any transition arrow.
    fn rule_is_equation(&self) -> bool {
        let mut depth = 0i32;
        for t in &self.toks[self.pos..] {
            match &t.tok {
                Tok::LParen | Tok::LBrace => depth += 1,
                Tok::RParen | Tok::RBrace => depth -= 1,
                Tok::Equals if depth == 0 => return true,
                Tok::Rewrites | Tok::Steps | Tok::LabelOpen | Tok::Infers | Tok::Turnstile if depth == 0 => {
                    return false
                }
                Tok::Keyword(_) | Tok::Eof => return false,
                _ => {}
            }
        }
        false
    }

    fn equation(&mut self, start: usize) -> PResult<TranslationEquation> {
        let fn_name = self.lower("a translation function name")?;
        self.expect(&Tok::LParen, "`(`")?;
        let lhs = self.pattern(&Tok::RParen)?;
        self.expect(&Tok::RParen, "`)`")?;
        self.expect(&Tok::Equals, "`=`")?;
        let rhs = self.term(false)?;
        Ok(TranslationEquation {
            fn_name,
            lhs,
            rhs,
            span: self.span_from(start),
        })
    }

    // -- funcon rules -------------------------------------------------------

    fn rule(&mut self, start: usize) -> PResult<Rule> {
        let mut judgements = vec![self.judgement()?];
        while self.eat(&Tok::Semi) {
            judgements.push(self.judgement()?);
        }
        let (premises, conclusion) = if self.eat(&Tok::Infers) {
            (judgements, self.judgement()?)
        } else if judgements.len() == 1 {
            (Vec::new(), judgements.pop().unwrap())
        } else {
            return self.expected("`==>` after premises");
        };
        let mut side_conditions = Vec::new();
        if self.eat_word("where") {
            loop {
                side_conditions.push(self.condition()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        let span = self.span_from(start);
        let mut ps = Vec::new();
        for j in premises {
            let subject = match &j.lhs {
                Term::Var(v) if !v.seq && v.sort.is_none() => v.name.clone(),
                _ => {
                    return Err(Diagnostic::error(
                        Category::Parse,
                        span,
                        "a premise must step a plain meta-variable",
                    ))
                }
            };
            ps.push(Premise {
                subject,
                result: j.rhs,
                arrow: j.arrow,
                ctx_overrides: j.context,
                state_before: j.state_before,
                state_after: j.state_after,
                observed_signals: j.labels,
            });
        }
        let c = conclusion;
        if !matches!(c.lhs, Term::Apply(..)) {
            return Err(Diagnostic::error(
                Category::Parse,
                span,
                "the left side of a rule must be a funcon application",
            ));
        }
        let kind = if c.arrow == Arrow::Rewrite
            && ps.is_empty()
            && c.context.is_empty()
            && c.state_before.is_empty()
            && c.state_after.is_empty()
            && c.labels.is_empty()
        {
            RuleKind::Rewrite
        } else {
            RuleKind::Step
        };
        Ok(Rule {
            kind,
            arrow: c.arrow,
            lhs: c.lhs,
            rhs: c.rhs,
            premises: ps,
            context_reads: c.context,
            state_reads: c.state_before,
            entity_writes: c.state_after,
            emitted: c.labels,
            side_conditions,
            span,
        })
    }

    fn entity_binding(&self, t: Term) -> PResult<EntityBinding> {
        match t {
            Term::Apply(n, mut args) if args.len() == 1 => Ok(EntityBinding::new(n, args.pop().unwrap())),
            other => Err(self.error_here(format!("expected an entity binding `name(term)`, found `{other}`"))),
        }
    }

    fn config(&mut self) -> PResult<(Term, Vec<EntityBinding>)> {
        if self.eat(&Tok::Lt) {
            let t = self.term(true)?;
            let mut ents = Vec::new();
            while self.eat(&Tok::Comma) {
                let e = self.term(false)?;
                ents.push(self.entity_binding(e)?);
            }
            self.expect(&Tok::Gt, "`>`")?;
            Ok((t, ents))
        } else {
            Ok((self.term(true)?, Vec::new()))
        }
    }

    fn judgement(&mut self) -> PResult<Judgement> {
        let mut context = Vec::new();
        let (lhs, state_before) = if self.peek() == &Tok::Lt {
            self.config()?
        } else {
            let first = self.term(true)?;
            if matches!(self.peek(), Tok::Comma | Tok::Turnstile) {
                context.push(self.entity_binding(first)?);
                while self.eat(&Tok::Comma) {
                    let e = self.term(false)?;
                    context.push(self.entity_binding(e)?);
                }
                self.expect(&Tok::Turnstile, "`|-`")?;
                self.config()?
            } else {
                (first, Vec::new())
            }
        };
        let mut labels = Vec::new();
        let arrow = match self.bump() {
            Tok::Rewrites => Arrow::Rewrite,
            Tok::Steps => Arrow::Step,
            Tok::LabelOpen => {
                loop {
                    let e = self.term(false)?;
                    labels.push(self.entity_binding(e)?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(&Tok::LabelClose, "`->`")?;
                Arrow::Step
            }
            _ => {
                self.pos -= 1;
                return self.expected("a transition arrow (`~>`, `--->` or `--E(..)->`)");
            }
        };
        let (rhs, state_after) = self.config()?;
        Ok(Judgement {
            context,
            lhs,
            state_before,
            arrow,
            labels,
            rhs,
            state_after,
        })
    }

    fn condition(&mut self) -> PResult<Condition> {
        let left = self.term(false)?;
        match self.bump() {
            Tok::EqEq => Ok(Condition::Eq(left, self.term(false)?)),
            Tok::NotEq => Ok(Condition::Ne(left, self.term(false)?)),
            Tok::Colon => Ok(Condition::HasSort(left, self.sort_name()?)),
            _ => {
                self.pos -= 1;
                self.expected("`==`, `!=` or `:` in a side condition")
            }
        }
    }

    // -- terms --------------------------------------------------------------

    fn term(&mut self, typed: bool) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Int(s) => {
                self.bump();
                let n: BigInt = s.parse().map_err(|_| self.error_here("malformed integer"))?;
                Ok(Term::Value(Value::Integer(n)))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Term::Value(Value::Identifier(Arc::from(s.as_str()))))
            }
            Tok::At => {
                self.bump();
                match self.bump() {
                    Tok::Int(s) if !s.starts_with('-') => Ok(Term::Value(Value::Location(
                        s.parse().map_err(|_| self.error_here("location out of range"))?,
                    ))),
                    _ => {
                        self.pos -= 1;
                        self.expected("a location number")
                    }
                }
            }
            Tok::LBrace => {
                self.bump();
                let mut map = BTreeMap::new();
                if !self.eat(&Tok::RBrace) {
                    loop {
                        let k = self.value_term()?;
                        self.expect(&Tok::Colon, "`:`")?;
                        let v = self.value_term()?;
                        map.insert(k, v);
                        if self.eat(&Tok::RBrace) {
                            break;
                        }
                        self.expect(&Tok::Comma, "`,` or `}`")?;
                    }
                }
                Ok(Term::Value(Value::Map(map)))
            }
            Tok::Upper(s) => {
                self.bump();
                let seq = self.peek() == &Tok::Star && self.toks[self.pos].glued;
                if seq {
                    self.bump();
                }
                let sort = if typed && self.peek() == &Tok::Colon && self.toks[self.pos].glued {
                    self.bump();
                    Some(self.sort_name()?)
                } else {
                    None
                };
                Ok(Term::Var(MetaVar {
                    name: name(&s),
                    seq,
                    sort,
                }))
            }
            Tok::Lower(s) => {
                self.bump();
                if s == "null" {
                    return Ok(Term::Value(Value::Null));
                }
                let mut args = Vec::new();
                if self.peek() == &Tok::LParen && self.toks[self.pos].glued {
                    self.bump();
                    if !self.eat(&Tok::RParen) {
                        loop {
                            args.push(self.term(typed)?);
                            if self.eat(&Tok::RParen) {
                                break;
                            }
                            self.expect(&Tok::Comma, "`,` or `)`")?;
                        }
                    }
                }
                Ok(Term::Apply(name(&s), args))
            }
            _ => self.expected("a term"),
        }
    }

    fn value_term(&mut self) -> PResult<Value> {
        match self.term(false)? {
            Term::Value(v) => Ok(v),
            other => Err(self.error_here(format!("map literals may only contain values, found `{other}`"))),
        }
    }
}

struct Judgement {
    context: Vec<EntityBinding>,
    lhs: Term,
    state_before: Vec<EntityBinding>,
    arrow: Arrow,
    labels: Vec<EntityBinding>,
    rhs: Term,
    state_after: Vec<EntityBinding>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> CbsSpec {
        parse_cbs(s, "t.cbs").unwrap_or_else(|d| panic!("{}", crate::diag::render(&d)))
    }

    #[test]
    fn empty_file_is_empty_spec() {
        assert!(parse("").is_empty());
        assert!(parse("// only a comment\n").is_empty());
    }

    #[test]
    fn if_true_else_signature() {
        let s = parse("Funcon if-true-else(_:booleans, _:=>T, _:=>T) : =>T");
        let f = &s.funcon_defs[0];
        assert_eq!(&*f.name, "if-true-else");
        let shape: Vec<_> = f
            .signature
            .params
            .iter()
            .map(|p| (&*p.sort, p.strict, p.variadic))
            .collect();
        assert_eq!(
            shape,
            vec![("booleans", true, false), ("T", false, false), ("T", false, false)]
        );
        assert_eq!(&*f.signature.result_sort, "T");
        assert!(f.signature.result_computes);
        assert!(!f.builtin);
    }

    #[test]
    fn alias_declaration() {
        let s = parse("Alias if-else = if-true-else");
        assert_eq!(&*s.aliases[0].alias, "if-else");
        assert_eq!(&*s.aliases[0].target, "if-true-else");
    }

    #[test]
    fn rewrite_and_step_rules() {
        let s = parse(
            "Funcon bound-value(_:identifiers) : =>values\n\
             Rule environment(Rho) |- bound-value(I) ~> map-lookup(Rho, I)\n\
             Funcon f(_:values) : =>values\n\
             Rule f(X) ~> X",
        );
        let r = &s.funcon_defs[0].rules[0];
        assert_eq!(r.kind, RuleKind::Step);
        assert_eq!(&*r.context_reads[0].entity, "environment");
        let r = &s.funcon_defs[1].rules[0];
        assert_eq!(r.kind, RuleKind::Rewrite);
        assert_eq!(r.rhs, Term::var("X"));
    }

    #[test]
    fn premise_form() {
        let s = parse(
            "Funcon assign-seq(_:=>values) : =>values\n\
             Rule <X, store(S)> ---> <X', store(S')>  ==>  <assign-seq(X), store(S)> ---> <assign-seq(X'), store(S')>",
        );
        let r = &s.funcon_defs[0].rules[0];
        assert_eq!(r.premises.len(), 1);
        let p = &r.premises[0];
        assert_eq!(&*p.subject, "X");
        assert_eq!(p.result, Term::var("X'"));
        assert_eq!(&*p.state_after[0].entity, "store");
        assert_eq!(r.entity_writes[0].term, Term::var("S'"));
    }

    #[test]
    fn labels_and_conditions() {
        let s = parse(
            "Funcon h(_:=>values, _:=>values) : =>values\n\
             Rule X --abrupted(V)-> X' ==> h(X, H) ---> H where V != 0, V : integers, W == V",
        );
        let r = &s.funcon_defs[0].rules[0];
        assert_eq!(&*r.premises[0].observed_signals[0].entity, "abrupted");
        assert_eq!(r.side_conditions.len(), 3);
        assert!(matches!(r.side_conditions[1], Condition::HasSort(_, ref s) if &**s == "integers"));
    }

    #[test]
    fn language_section() {
        let s = parse(
            "Language demo\n\
             Lexical ID ::= [a-z]+\n\
             Syntax Exp ::= ID | Exp \"&&\" Exp  {left, prio 3}\n\
             Semantics rval(_:Exp) : =>values\n\
             Rule rval(Exp1 \"&&\" Exp2) = if-else(rval(Exp1), rval(Exp2), false)\n\
             Desugar [[ \"if\" \"(\" Exp \")\" Stmt ]] = [[ \"if\" \"(\" Exp \")\" Stmt \"else\" \"{\" \"}\" ]]",
        );
        let l = &s.language_specs[0];
        assert_eq!(l.productions.len(), 3);
        assert!(l.lexical_sorts.contains("ID"));
        assert_eq!(l.productions[2].attrs.assoc, Some(Assoc::Left));
        assert_eq!(l.productions[2].attrs.prio, Some(3));
        assert_eq!(l.equations[0].lhs.to_string(), "Exp1 \"&&\" Exp2");
        assert_eq!(l.desugar_rules[0].rhs.items.len(), 8);
    }

    #[test]
    fn sequence_variables() {
        let s = parse("Language l\nSyntax S ::= \"{\" S* \"}\"\nSemantics e(_:S) : =>null\nRule e(\"{\" S* \"}\") = sequential(e(S*))");
        let eq = &s.language_specs[0].equations[0];
        assert!(matches!(
            &eq.lhs.items[1],
            PatternItem::Var {
                op: Some(RegOp::Star),
                ..
            }
        ));
        assert_eq!(eq.rhs.to_string(), "sequential(e(S*))");
    }

    #[test]
    fn errors_point_at_the_offending_token() {
        let d = parse_cbs("Funcon f(_:values) =>values", "x.cbs").unwrap_err();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].category, Category::Parse);
        assert_eq!((d[0].span.start_line, d[0].span.start_col), (1, 20));
    }

    #[test]
    fn syntax_outside_language_is_rejected() {
        let d = parse_cbs("Syntax Exp ::= \"x\"", "x.cbs").unwrap_err();
        assert!(d[0].message.contains("outside a Language"));
    }

    #[test]
    fn orphan_rule_is_rejected() {
        assert!(parse_cbs("Funcon g : =>values\nRule f(X) ~> X", "x.cbs").is_err());
    }

    #[test]
    fn standalone_terms() {
        let t = parse_term("if-true-else(bound-value(\"a\"),bound-value(\"b\"),false)", "-").unwrap();
        assert_eq!(
            t.to_string(),
            "if-true-else(bound-value(\"a\"),bound-value(\"b\"),false)"
        );
        let t = parse_term("{\"x\":@0, 1:null}", "-").unwrap();
        assert_eq!(t.to_string(), "{1:null,\"x\":@0}");
        assert!(parse_term("f(", "-").is_err());
    }

    #[test]
    fn stems() {
        assert_eq!(metavar_stem("Exp12''"), "Exp");
        assert_eq!(metavar_stem("ID"), "ID");
    }
}
