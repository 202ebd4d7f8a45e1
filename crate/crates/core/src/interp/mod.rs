//! Small-step execution of funcon terms by direct interpretation of the
//! library's transition rules.
//!
//! A step of `f(args)` tries, in order: `f`'s own rules (once its strict
//! arguments are values), a congruence step on the leftmost unevaluated
//! strict argument, and finally `f`'s native implementation if it is a
//! builtin. Entities ride along in the configuration: contextual ones are
//! scoped by premises, mutable ones are threaded, output is appended, and
//! control signals travel upward until a premise observes them or they reach
//! the root.

mod builtins;
mod matching;

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write};

pub use builtins::eval_builtin;
pub use matching::{canonicalize, instantiate, match_term_pattern, Binding, Bindings};

use crate::analysis::{Resolved, SymbolTable};
use crate::sorts::builtin_has_sort;
use crate::syntax::{Condition, EntityClass, Rule};
use crate::term::Term;
use crate::value::{Name, Value};
use matching::{match_into, mk_apply};

pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Membership of a value in a builtin or declared datatype sort; `None` for
/// sorts the table does not know.
pub fn value_has_sort(v: &Value, sort: &str, table: &SymbolTable) -> Option<bool> {
    if let Some(b) = builtin_has_sort(v, sort) {
        return Some(b);
    }
    if table.datatypes.contains_key(sort) {
        return Some(
            matches!(v, Value::Constructor(c, _) if table.constructors.get(c).is_some_and(|(s, _)| &**s == sort)),
        );
    }
    None
}

pub type EntityMap = BTreeMap<Name, Value>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub focus: Term,
    pub contextual: EntityMap,
    pub mutable: EntityMap,
    pub output: BTreeMap<Name, Vec<Value>>,
    pub fuel: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StuckReason {
    NoRule,
    BuiltinUndefined,
    Arity,
}

impl StuckReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StuckReason::NoRule => "no-rule",
            StuckReason::BuiltinUndefined => "builtin-undefined",
            StuckReason::Arity => "arity",
        }
    }
}

impl fmt::Display for StuckReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The effects and result of one transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub focus: Term,
    /// The complete mutable state after the step.
    pub mutable: EntityMap,
    /// Output appends, in emission order.
    pub emitted: Vec<(Name, Value)>,
    /// Unobserved control signals, at most one per entity.
    pub signals: BTreeMap<Name, Value>,
    /// `f#k` for rule `k` of `f`, `congruence`, or `f#builtin`, joined by
    /// `>` from the root of the step down to where it happened.
    pub rule: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Stepped(Transition),
    Terminal(Value),
    Stuck(Term, StuckReason),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Completion {
    Completed(Value),
    Aborted { entity: Name, value: Value },
    Stuck { term: Term, reason: StuckReason },
    OutOfFuel,
}

impl fmt::Display for Completion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Completion::Completed(v) => write!(f, "result: {v}"),
            Completion::Aborted { entity, value } => write!(f, "aborted: {entity}({value})"),
            Completion::Stuck { term, reason } => write!(f, "stuck ({reason}): {term}"),
            Completion::OutOfFuel => f.write_str("out of fuel"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub result: Completion,
    /// Every output entity's appends, in emission order.
    pub output: Vec<Value>,
    pub steps: u64,
    /// One line per step, when tracing was requested.
    pub trace: Vec<String>,
    pub final_config: Configuration,
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub fuel: u64,
    pub trace: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            fuel: DEFAULT_FUEL,
            trace: false,
        }
    }
}

type Cache = HashMap<(Term, EntityMap, EntityMap), StepOutcome>;

/// A rule interpreter over a resolved specification.
pub struct Interpreter<'a> {
    table: &'a SymbolTable,
    defaults: EntityMap,
}

impl<'a> Interpreter<'a> {
    pub fn new(table: &'a SymbolTable) -> Self {
        let mut it = Interpreter {
            table,
            defaults: EntityMap::new(),
        };
        let mut defaults = EntityMap::new();
        for (name, e) in &table.entities {
            if let Some(d) = &e.default {
                if let Some(v) = it.eval_pure(d, &Bindings::new()) {
                    defaults.insert(name.clone(), v);
                }
            }
        }
        it.defaults = defaults;
        it
    }

    pub fn table(&self) -> &SymbolTable {
        self.table
    }

    /// The configuration a run starts from: entity defaults and full fuel.
    pub fn initial_config(&self, term: &Term, fuel: u64) -> Configuration {
        let of_class = |class: EntityClass| -> EntityMap {
            self.defaults
                .iter()
                .filter(|(n, _)| self.table.entities[*n].class == class)
                .map(|(n, v)| (n.clone(), v.clone()))
                .collect()
        };
        Configuration {
            focus: canonicalize(term, self.table),
            contextual: of_class(EntityClass::Contextual),
            mutable: of_class(EntityClass::Mutable),
            output: BTreeMap::new(),
            fuel,
        }
    }

    /// One transition of the configuration's focus.
    pub fn step(&self, cfg: &Configuration) -> StepOutcome {
        self.step_term(&cfg.focus, &cfg.contextual, &cfg.mutable, &mut Cache::new())
    }

    pub fn run(&self, term: &Term, opts: &RunOptions) -> Outcome {
        let mut cfg = self.initial_config(term, opts.fuel);
        let mut output = Vec::new();
        let mut trace = Vec::new();
        let mut steps = 0;
        let result = loop {
            if let Term::Value(v) = &cfg.focus {
                break Completion::Completed(v.clone());
            }
            if cfg.fuel == 0 {
                break Completion::OutOfFuel;
            }
            let tr = match self.step(&cfg) {
                StepOutcome::Stepped(tr) => tr,
                StepOutcome::Terminal(v) => break Completion::Completed(v),
                StepOutcome::Stuck(term, reason) => break Completion::Stuck { term, reason },
            };
            steps += 1;
            cfg.fuel -= 1;
            if opts.trace {
                trace.push(trace_line(steps, &cfg.mutable, &tr));
            }
            for (e, v) in &tr.emitted {
                cfg.output.entry(e.clone()).or_default().push(v.clone());
                output.push(v.clone());
            }
            cfg.focus = tr.focus;
            cfg.mutable = tr.mutable;
            if let Some((entity, value)) = tr.signals.into_iter().next() {
                break Completion::Aborted { entity, value };
            }
        };
        Outcome {
            result,
            output,
            steps,
            trace,
            final_config: cfg,
        }
    }

    fn step_term(&self, t: &Term, ctx: &EntityMap, mutable: &EntityMap, cache: &mut Cache) -> StepOutcome {
        let (name, args) = match t {
            Term::Value(v) => return StepOutcome::Terminal(v.clone()),
            Term::Var(_) => return StepOutcome::Stuck(t.clone(), StuckReason::NoRule),
            Term::Apply(name, args) => (self.table.canonical(name), args),
        };
        let f = match self.table.resolve(name) {
            Some(Resolved::Funcon(f)) => f,
            Some(Resolved::Constructor(..)) => {
                return match args.iter().position(|a| !a.is_value()) {
                    Some(i) => self.congruence(name, args, i, ctx, mutable, cache),
                    None => StepOutcome::Stuck(t.clone(), StuckReason::Arity),
                };
            }
            None => return StepOutcome::Stuck(t.clone(), StuckReason::NoRule),
        };
        if !f.signature.accepts(args.len()) {
            return StepOutcome::Stuck(t.clone(), StuckReason::Arity);
        }
        if let Some(i) = (0..args.len()).find(|&i| f.signature.is_strict_at(i) && !args[i].is_value()) {
            return self.congruence(name, args, i, ctx, mutable, cache);
        }
        let mut inner_stuck = None;
        for (k, rule) in f.rules.iter().enumerate() {
            if let Some(tr) = self.try_rule(name, k + 1, rule, t, ctx, mutable, cache, &mut inner_stuck) {
                return StepOutcome::Stepped(tr);
            }
        }
        if f.builtin {
            let vals: Vec<Value> = args.iter().filter_map(|a| a.as_value().cloned()).collect();
            return match eval_builtin(name, &vals) {
                Some(v) => StepOutcome::Stepped(Transition {
                    focus: Term::Value(v),
                    mutable: mutable.clone(),
                    emitted: Vec::new(),
                    signals: BTreeMap::new(),
                    rule: format!("{name}#builtin"),
                }),
                None => StepOutcome::Stuck(t.clone(), StuckReason::BuiltinUndefined),
            };
        }
        match inner_stuck {
            Some((term, reason)) => StepOutcome::Stuck(term, reason),
            None => StepOutcome::Stuck(t.clone(), StuckReason::NoRule),
        }
    }

    fn congruence(
        &self,
        name: &Name,
        args: &[Term],
        i: usize,
        ctx: &EntityMap,
        mutable: &EntityMap,
        cache: &mut Cache,
    ) -> StepOutcome {
        match self.step_term(&args[i], ctx, mutable, cache) {
            StepOutcome::Stepped(tr) => {
                let mut args = args.to_vec();
                args[i] = tr.focus;
                StepOutcome::Stepped(Transition {
                    focus: mk_apply(name.clone(), args, self.table),
                    rule: format!("congruence>{}", tr.rule),
                    ..tr
                })
            }
            StepOutcome::Terminal(_) => unreachable!("congruence only steps non-values"),
            stuck => stuck,
        }
    }

    fn sub_step(&self, t: &Term, ctx: &EntityMap, mutable: &EntityMap, cache: &mut Cache) -> StepOutcome {
        let key = (t.clone(), ctx.clone(), mutable.clone());
        if let Some(o) = cache.get(&key) {
            return o.clone();
        }
        let o = self.step_term(t, ctx, mutable, cache);
        cache.insert(key, o.clone());
        o
    }

    #[allow(clippy::too_many_arguments)]
    fn try_rule(
        &self,
        name: &Name,
        k: usize,
        rule: &Rule,
        t: &Term,
        ctx: &EntityMap,
        mutable: &EntityMap,
        cache: &mut Cache,
        inner_stuck: &mut Option<(Term, StuckReason)>,
    ) -> Option<Transition> {
        let table = self.table;
        let mut b = match_term_pattern(&rule.lhs, t, table)?;
        for r in &rule.context_reads {
            let v = Term::Value(ctx.get(&r.entity)?.clone());
            if !match_into(&r.term, &v, table, &mut b) {
                return None;
            }
        }
        for r in &rule.state_reads {
            let v = Term::Value(mutable.get(&r.entity)?.clone());
            if !match_into(&r.term, &v, table, &mut b) {
                return None;
            }
        }
        let mut state = mutable.clone();
        let mut emitted = Vec::new();
        let mut signals = BTreeMap::new();
        let mut path = format!("{name}#{k}");
        for p in &rule.premises {
            let Some(Binding::One(subject)) = b.get(&p.subject).cloned() else {
                return None;
            };
            let mut sub_ctx = ctx.clone();
            for o in &p.ctx_overrides {
                sub_ctx.insert(o.entity.clone(), self.eval_pure(&o.term, &b)?);
            }
            for s in &p.state_before {
                let v = Term::Value(state.get(&s.entity)?.clone());
                if !match_into(&s.term, &v, table, &mut b) {
                    return None;
                }
            }
            let tr = match self.sub_step(&subject, &sub_ctx, &state, cache) {
                StepOutcome::Stepped(tr) => tr,
                StepOutcome::Stuck(term, reason) => {
                    inner_stuck.get_or_insert((term, reason));
                    return None;
                }
                StepOutcome::Terminal(_) => return None,
            };
            if !match_into(&p.result, &tr.focus, table, &mut b) {
                return None;
            }
            for s in &p.state_after {
                let v = Term::Value(tr.mutable.get(&s.entity)?.clone());
                if !match_into(&s.term, &v, table, &mut b) {
                    return None;
                }
            }
            let mut sigs = tr.signals;
            for o in &p.observed_signals {
                let v = Term::Value(sigs.remove(&o.entity)?);
                if !match_into(&o.term, &v, table, &mut b) {
                    return None;
                }
            }
            for (e, v) in sigs {
                if signals.insert(e, v).is_some() {
                    return None;
                }
            }
            emitted.extend(tr.emitted);
            state = tr.mutable;
            path.push('>');
            path.push_str(&tr.rule);
        }
        for c in &rule.side_conditions {
            let ok = match c {
                Condition::Eq(pat, rhs) => {
                    let v = Term::Value(self.eval_pure(rhs, &b)?);
                    match_into(pat, &v, table, &mut b)
                }
                Condition::Ne(x, y) => self.eval_pure(x, &b)? != self.eval_pure(y, &b)?,
                Condition::HasSort(x, s) => value_has_sort(&self.eval_pure(x, &b)?, s, table) == Some(true),
            };
            if !ok {
                return None;
            }
        }
        let focus = instantiate(&rule.rhs, &b, table)?;
        for w in &rule.entity_writes {
            state.insert(w.entity.clone(), self.eval_pure(&w.term, &b)?);
        }
        for e in &rule.emitted {
            let v = self.eval_pure(&e.term, &b)?;
            match table.entities.get(&e.entity)?.class {
                EntityClass::Output => emitted.push((e.entity.clone(), v)),
                EntityClass::Control => {
                    if signals.insert(e.entity.clone(), v).is_some() {
                        return None;
                    }
                }
                EntityClass::Contextual | EntityClass::Mutable => return None,
            }
        }
        Some(Transition {
            focus,
            mutable: state,
            emitted,
            signals,
            rule: path,
        })
    }

    /// Evaluates a term built only from values, constructors and builtins.
    pub fn eval_pure(&self, t: &Term, b: &Bindings) -> Option<Value> {
        match t {
            Term::Value(v) => Some(v.clone()),
            Term::Var(v) => match b.get(&v.name)? {
                Binding::One(Term::Value(x)) => Some(x.clone()),
                _ => None,
            },
            Term::Apply(f, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    match a {
                        Term::Var(v) if v.seq => match b.get(&v.name)? {
                            Binding::Many(ts) => {
                                for t in ts {
                                    vals.push(t.as_value()?.clone());
                                }
                            }
                            Binding::One(t) => vals.push(t.as_value()?.clone()),
                        },
                        _ => vals.push(self.eval_pure(a, b)?),
                    }
                }
                let f = self.table.canonical(f);
                match self.table.resolve(f)? {
                    Resolved::Constructor(_, c) if c.arg_sorts.len() == vals.len() => {
                        Some(Value::Constructor(f.clone(), vals))
                    }
                    Resolved::Funcon(def) if def.builtin && def.signature.accepts(vals.len()) => eval_builtin(f, &vals),
                    _ => None,
                }
            }
        }
    }
}

/// `{index}: {rule}` followed by mutable-entity changes, output appends and
/// signals.
fn trace_line(index: u64, before: &EntityMap, tr: &Transition) -> String {
    let mut s = format!("{index}: {}", tr.rule);
    let names: std::collections::BTreeSet<&Name> = before.keys().chain(tr.mutable.keys()).collect();
    for e in names {
        match (before.get(e), tr.mutable.get(e)) {
            (Some(Value::Map(old)), Some(Value::Map(new))) => {
                for (k, v) in new {
                    if old.get(k) != Some(v) {
                        let _ = write!(s, " {e}[{k}]:={v}");
                    }
                }
                for k in old.keys().filter(|k| !new.contains_key(k)) {
                    let _ = write!(s, " {e}-=[{k}]");
                }
            }
            (old, Some(new)) if old != Some(new) => {
                let _ = write!(s, " {e}:={new}");
            }
            (Some(_), None) => {
                let _ = write!(s, " {e}:=undefined");
            }
            _ => {}
        }
    }
    for (e, v) in &tr.emitted {
        let _ = write!(s, " {e}+={v}");
    }
    for (e, v) in &tr.signals {
        let _ = write!(s, " {e}!{v}");
    }
    s
}
