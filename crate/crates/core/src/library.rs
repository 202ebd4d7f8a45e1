//! Loading specification files and the reusable funcon library.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::analysis::{analyze, Analysis, SymbolTable};
use crate::diag::{sort_diagnostics, Category, Diagnostic};
use crate::parser::parse_cbs;
use crate::span::SourceSpan;
use crate::syntax::{merge_specs, CbsSpec, LanguageSpec};
use crate::term::Term;
use crate::value::Name;

/// Environment variable naming the library directory.
pub const LIB_PATH_VAR: &str = "FUNCON_LIB_PATH";

fn io_error(path: &Path, e: impl std::fmt::Display) -> Diagnostic {
    Diagnostic::error(
        Category::Io,
        SourceSpan::point(Arc::from(path.display().to_string()), 1, 1),
        format!("cannot read {}: {e}", path.display()),
    )
}

/// Expands directories into their `.cbs` files, sorted by name.
pub fn cbs_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>, Vec<Diagnostic>> {
    let mut out = Vec::new();
    let mut diags = Vec::new();
    for p in paths {
        if p.is_dir() {
            match fs::read_dir(p) {
                Ok(entries) => {
                    let mut files: Vec<PathBuf> = entries
                        .filter_map(Result::ok)
                        .map(|e| e.path())
                        .filter(|f| f.extension().is_some_and(|x| x == "cbs") && f.is_file())
                        .collect();
                    files.sort();
                    out.extend(files);
                }
                Err(e) => diags.push(io_error(p, e)),
            }
        } else {
            out.push(p.clone());
        }
    }
    if diags.is_empty() {
        Ok(out)
    } else {
        Err(diags)
    }
}

/// Reads and parses files, collecting every io and parse diagnostic.
pub fn read_specs(files: &[PathBuf]) -> (Vec<CbsSpec>, Vec<Diagnostic>) {
    let mut specs = Vec::new();
    let mut diags = Vec::new();
    for f in files {
        match fs::read_to_string(f) {
            Ok(text) => match parse_cbs(&text, &f.display().to_string()) {
                Ok(s) => specs.push(s),
                Err(ds) => diags.extend(ds),
            },
            Err(e) => diags.push(io_error(f, e)),
        }
    }
    (specs, diags)
}

/// A merged, analyzed set of specification files.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub files: Vec<PathBuf>,
    pub spec: CbsSpec,
    pub analysis: Analysis,
}

impl Loaded {
    pub fn table(&self) -> &SymbolTable {
        &self.analysis.table
    }

    pub fn language(&self, name: Option<&str>) -> Option<&LanguageSpec> {
        match name {
            Some(n) => self.spec.language_specs.iter().find(|l| &*l.name == n),
            None => self.spec.language_specs.first(),
        }
    }
}

/// Reads, parses, merges and analyzes. Io and parse failures stop before
/// analysis; analysis diagnostics are returned inside [`Loaded`].
pub fn load(paths: &[PathBuf]) -> Result<Loaded, Vec<Diagnostic>> {
    let files = cbs_files(paths)?;
    let (specs, mut diags) = read_specs(&files);
    if !diags.is_empty() {
        sort_diagnostics(&mut diags);
        return Err(diags);
    }
    let spec = merge_specs(specs);
    let analysis = analyze(&spec);
    Ok(Loaded { files, spec, analysis })
}

/// The frozen library: definitions, their source positions, and load order.
#[derive(Clone, Debug)]
pub struct FunconTable {
    pub files: Vec<PathBuf>,
    pub spec: CbsSpec,
    pub table: SymbolTable,
}

impl FunconTable {
    /// Where a funcon, alias, entity or datatype was defined.
    pub fn provenance(&self, name: &str) -> Option<&SourceSpan> {
        let t = &self.table;
        if let Some(f) = t.funcons.get(name) {
            return Some(&f.span);
        }
        if let Some(a) = self.spec.aliases.iter().find(|a| &*a.alias == name) {
            return Some(&a.span);
        }
        if let Some(e) = t.entities.get(name) {
            return Some(&e.span);
        }
        t.datatypes.get(name).map(|d| &d.span)
    }
}

/// Loads library files; succeeds only without error diagnostics.
pub fn load_library(paths: &[PathBuf]) -> Result<FunconTable, Vec<Diagnostic>> {
    let loaded = load(paths)?;
    if loaded.analysis.has_errors() {
        return Err(loaded.analysis.diagnostics);
    }
    Ok(FunconTable {
        files: loaded.files,
        spec: loaded.spec,
        table: loaded.analysis.table,
    })
}

/// Canonical funcon names applied in `t`, sorted.
pub fn reused_in_term(t: &Term, table: &SymbolTable) -> Vec<Name> {
    let mut out = BTreeSet::new();
    collect_funcons(t, table, &mut out);
    out.into_iter().collect()
}

/// Canonical funcon names applied in a language's equation right sides,
/// sorted. Translation functions and constructors are not funcons.
pub fn reused_in_language(lang: &LanguageSpec, table: &SymbolTable) -> Vec<Name> {
    let mut out = BTreeSet::new();
    for eq in &lang.equations {
        collect_funcons(&eq.rhs, table, &mut out);
    }
    out.into_iter().collect()
}

fn collect_funcons(t: &Term, table: &SymbolTable, out: &mut BTreeSet<Name>) {
    t.for_each_apply(&mut |name, _| {
        if table.funcon(name).is_some() {
            out.insert(table.canonical(name).clone());
        }
    });
}
