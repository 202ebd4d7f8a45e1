use std::collections::{BTreeMap, BTreeSet};

use crate::diag::{sort_diagnostics, Category, Diagnostic};
use crate::span::SourceSpan;
use crate::syntax::{CbsSpec, ConstructorDef, DatatypeDef, EntityDecl, FunconDef};
use crate::value::Name;

/// Resolved global names of a merged specification.
#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    pub funcons: BTreeMap<Name, FunconDef>,
    /// Constructor name to (datatype, index of the constructor within it).
    pub constructors: BTreeMap<Name, (Name, usize)>,
    pub datatypes: BTreeMap<Name, DatatypeDef>,
    pub entities: BTreeMap<Name, EntityDecl>,
    /// Alias to canonical funcon name, fully resolved.
    pub alias_target: BTreeMap<Name, Name>,
}

/// What a lowercase name in a term refers to.
#[derive(Clone, Copy, Debug)]
pub enum Resolved<'a> {
    Funcon(&'a FunconDef),
    Constructor(&'a DatatypeDef, &'a ConstructorDef),
}

impl SymbolTable {
    /// The canonical name of a funcon, expanding aliases; other names unchanged.
    pub fn canonical<'a>(&'a self, name: &'a Name) -> &'a Name {
        self.alias_target.get(name).unwrap_or(name)
    }

    pub fn funcon(&self, name: &str) -> Option<&FunconDef> {
        let name = self.alias_target.get(name).map(|n| &**n).unwrap_or(name);
        self.funcons.get(name)
    }

    pub fn constructor(&self, name: &str) -> Option<(&DatatypeDef, &ConstructorDef)> {
        let (sort, i) = self.constructors.get(name)?;
        let dt = &self.datatypes[sort];
        Some((dt, &dt.constructors[*i]))
    }

    pub fn is_constructor(&self, name: &str) -> bool {
        self.constructors.contains_key(name)
    }

    pub fn resolve(&self, name: &str) -> Option<Resolved<'_>> {
        if let Some(f) = self.funcon(name) {
            return Some(Resolved::Funcon(f));
        }
        self.constructor(name).map(|(d, c)| Resolved::Constructor(d, c))
    }

    /// Builtin sorts plus declared datatype sorts.
    pub fn is_known_sort(&self, sort: &str) -> bool {
        crate::sorts::is_builtin_sort(sort) || self.datatypes.contains_key(sort)
    }
}

/// Builds the symbol table, failing on any error diagnostic.
pub fn build_symbol_table(spec: &CbsSpec) -> Result<SymbolTable, Vec<Diagnostic>> {
    let (table, diags) = collect_symbols(spec);
    if diags.iter().any(Diagnostic::is_error) {
        Err(diags)
    } else {
        Ok(table)
    }
}

/// Builds a best-effort table (first definition wins, by source position)
/// together with all naming diagnostics.
///
/// Duplicates are reported at every definition after the earliest one, so the
/// result does not depend on the order in which files were merged.
pub fn collect_symbols(spec: &CbsSpec) -> (SymbolTable, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    let mut table = SymbolTable::default();

    // Funcons, aliases and constructors share one namespace.
    let mut terms: BTreeMap<Name, Vec<(SourceSpan, &'static str)>> = BTreeMap::new();
    for f in &spec.funcon_defs {
        terms
            .entry(f.name.clone())
            .or_default()
            .push((f.span.clone(), "funcon"));
    }
    for a in &spec.aliases {
        terms
            .entry(a.alias.clone())
            .or_default()
            .push((a.span.clone(), "alias"));
    }
    for d in &spec.datatype_defs {
        for c in &d.constructors {
            terms
                .entry(c.name.clone())
                .or_default()
                .push((d.span.clone(), "constructor"));
        }
    }
    let mut winner: BTreeMap<Name, SourceSpan> = BTreeMap::new();
    for (name, mut defs) in terms {
        defs.sort();
        for (span, kind) in &defs[1..] {
            diags.push(Diagnostic::error(
                Category::DuplicateDef,
                span.clone(),
                format!("{kind} `{name}` is already defined at {}", defs[0].0),
            ));
        }
        winner.insert(name, defs[0].0.clone());
    }

    for f in &spec.funcon_defs {
        if winner.get(&f.name) == Some(&f.span) && !table.funcons.contains_key(&f.name) {
            table.funcons.insert(f.name.clone(), f.clone());
        }
    }

    let mut datatype_spans: BTreeMap<Name, Vec<&DatatypeDef>> = BTreeMap::new();
    for d in &spec.datatype_defs {
        datatype_spans.entry(d.sort.clone()).or_default().push(d);
    }
    for (sort, mut defs) in datatype_spans {
        defs.sort_by(|a, b| a.span.cmp(&b.span));
        for d in &defs[1..] {
            diags.push(Diagnostic::error(
                Category::DuplicateDef,
                d.span.clone(),
                format!("datatype `{sort}` is already defined at {}", defs[0].span),
            ));
        }
        let d = defs[0];
        for (i, c) in d.constructors.iter().enumerate() {
            if winner.get(&c.name) == Some(&d.span) && !table.constructors.contains_key(&c.name) {
                table.constructors.insert(c.name.clone(), (sort.clone(), i));
            }
        }
        table.datatypes.insert(sort, d.clone());
    }

    let mut entities: BTreeMap<Name, Vec<&EntityDecl>> = BTreeMap::new();
    for e in &spec.entity_decls {
        entities.entry(e.name.clone()).or_default().push(e);
    }
    for (name, mut defs) in entities {
        defs.sort_by(|a, b| a.span.cmp(&b.span));
        for e in &defs[1..] {
            diags.push(Diagnostic::error(
                Category::DuplicateDef,
                e.span.clone(),
                format!("entity `{name}` is already defined at {}", defs[0].span),
            ));
        }
        table.entities.insert(name, defs[0].clone());
    }

    resolve_aliases(spec, &winner, &mut table, &mut diags);
    sort_diagnostics(&mut diags);
    (table, diags)
}

fn resolve_aliases(
    spec: &CbsSpec,
    winner: &BTreeMap<Name, SourceSpan>,
    table: &mut SymbolTable,
    diags: &mut Vec<Diagnostic>,
) {
    let direct: BTreeMap<&Name, (&Name, &SourceSpan)> = spec
        .aliases
        .iter()
        .filter(|a| winner.get(&a.alias) == Some(&a.span))
        .map(|a| (&a.alias, (&a.target, &a.span)))
        .collect();
    let mut reported_cycles: BTreeSet<Vec<Name>> = BTreeSet::new();
    for (&alias, &(_, span)) in &direct {
        let mut seen: Vec<Name> = vec![alias.clone()];
        let mut cur = alias;
        loop {
            let next = direct[cur].0;
            if let Some(pos) = seen.iter().position(|n| n == next) {
                let mut cycle = seen[pos..].to_vec();
                cycle.sort();
                if reported_cycles.insert(cycle.clone()) {
                    let first = cycle
                        .iter()
                        .map(|n| direct[n].1)
                        .min()
                        .expect("cycles are non-empty")
                        .clone();
                    let names: Vec<&str> = cycle.iter().map(|n| &**n).collect();
                    diags.push(Diagnostic::error(
                        Category::AliasCycle,
                        first,
                        format!("aliases form a cycle: {}", names.join(", ")),
                    ));
                }
                break;
            }
            if direct.contains_key(next) {
                seen.push(next.clone());
                cur = next;
                continue;
            }
            if table.funcons.contains_key(next) {
                table.alias_target.insert(alias.clone(), next.clone());
            } else {
                diags.push(Diagnostic::error(
                    Category::UnknownName,
                    span.clone(),
                    format!("alias `{alias}` refers to `{next}`, which is not a funcon"),
                ));
            }
            break;
        }
    }
}
