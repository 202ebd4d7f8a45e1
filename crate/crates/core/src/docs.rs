//! Static documentation pages: one per funcon, one per language, and an
//! index. Pages are Markdown with embedded HTML so that funcon names inside
//! code blocks can be hyperlinks.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::analysis::SymbolTable;
use crate::library::reused_in_language;
use crate::printer::{
    datatype_line, entity_line, equation_line, production_line, rule_line, semantics_line, signature_line,
};
use crate::span::SourceSpan;
use crate::syntax::{CbsSpec, FunconDef, LanguageSpec};

/// Relative path to page text, in a stable order.
pub type Site = BTreeMap<PathBuf, String>;

pub const FUNCON_DIR: &str = "funcons";
pub const LANGUAGE_DIR: &str = "languages";
pub const INDEX: &str = "index.md";

/// Renders every page for a checked specification.
pub fn render_site(spec: &CbsSpec, table: &SymbolTable) -> Site {
    let mut site = Site::new();
    for f in &spec.funcon_defs {
        site.insert(funcon_page_path(&f.name), funcon_page(f, spec, table));
    }
    for l in &spec.language_specs {
        site.insert(language_page_path(&l.name), language_page(l, table));
    }
    site.insert(PathBuf::from(INDEX), index_page(spec, table));
    site
}

fn funcon_page_path(name: &str) -> PathBuf {
    Path::new(FUNCON_DIR).join(format!("{name}.md"))
}

fn language_page_path(name: &str) -> PathBuf {
    Path::new(LANGUAGE_DIR).join(format!("{name}.md"))
}

fn origin(span: &SourceSpan) -> String {
    let file = Path::new(&*span.file_id)
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| span.file_id.to_string());
    format!("{file}:{}", span.start_line)
}

fn funcon_page(f: &FunconDef, spec: &CbsSpec, table: &SymbolTable) -> String {
    let link = |s: &str| linkify(s, table, "");
    let mut out = format!("# {}\n\n", f.name);
    let _ = writeln!(out, "Defined at `{}`.\n", origin(&f.span));
    let _ = writeln!(out, "<pre>\n{}\n</pre>\n", link(&signature_line(f)));
    let aliases: Vec<&str> = spec
        .aliases
        .iter()
        .filter(|a| table.canonical(&a.target) == &f.name)
        .map(|a| &*a.alias)
        .collect();
    if !aliases.is_empty() {
        let _ = writeln!(
            out,
            "Aliases: {}\n",
            aliases.iter().map(|a| format!("`{a}`")).collect::<Vec<_>>().join(", ")
        );
    }
    if f.rules.is_empty() {
        out.push_str(if f.builtin {
            "Computed by the interpreter.\n"
        } else {
            "No rules.\n"
        });
    } else {
        out.push_str("## Rules\n\n<pre>\n");
        for r in &f.rules {
            out.push_str(&link(&rule_line(r)));
            out.push('\n');
        }
        out.push_str("</pre>\n");
    }
    out
}

fn language_page(l: &LanguageSpec, table: &SymbolTable) -> String {
    let link = |s: &str| linkify(s, table, &format!("../{FUNCON_DIR}/"));
    let mut out = format!("# Language {}\n\n", l.name);
    out.push_str("## Syntax\n\n<pre>\n");
    for p in &l.productions {
        out.push_str(&escape(&production_line(p)));
        out.push('\n');
    }
    for p in &l.priorities {
        let chain: Vec<&str> = p.chain.iter().map(|n| &**n).collect();
        let _ = writeln!(out, "Priority {}", escape(&chain.join(" > ")));
    }
    out.push_str("</pre>\n\n## Semantics\n\n<pre>\n");
    for d in &l.semantics_decls {
        out.push_str(&escape(&semantics_line(d)));
        out.push('\n');
    }
    for e in &l.equations {
        out.push_str(&link(&equation_line(e)));
        out.push('\n');
    }
    for d in &l.desugar_rules {
        let _ = writeln!(out, "{}", escape(&format!("Desugar [[ {} ]] = [[ {} ]]", d.lhs, d.rhs)));
    }
    out.push_str("</pre>\n\n## Reused funcons\n\n");
    for name in reused_in_language(l, table) {
        let _ = writeln!(out, "- [{name}](../{FUNCON_DIR}/{name}.md)");
    }
    out
}

fn index_page(spec: &CbsSpec, table: &SymbolTable) -> String {
    let mut out = String::from("# Funcon catalog\n\n");
    let mut funcons: Vec<&FunconDef> = spec.funcon_defs.iter().collect();
    funcons.sort_by(|a, b| a.name.cmp(&b.name));
    for f in funcons {
        let _ = writeln!(out, "- [{0}]({FUNCON_DIR}/{0}.md)", f.name);
    }
    let mut aliases: Vec<_> = spec.aliases.iter().collect();
    aliases.sort_by(|a, b| a.alias.cmp(&b.alias));
    for a in aliases {
        let _ = writeln!(
            out,
            "- `{}` is an alias of [{1}]({FUNCON_DIR}/{1}.md)",
            a.alias,
            table.canonical(&a.target)
        );
    }
    let mut lines: Vec<String> = spec.entity_decls.iter().map(entity_line).collect();
    lines.extend(spec.datatype_defs.iter().map(datatype_line));
    lines.sort();
    for l in lines {
        let _ = writeln!(out, "- `{l}`");
    }
    let mut langs: Vec<&str> = spec.language_specs.iter().map(|l| &*l.name).collect();
    langs.sort();
    for l in langs {
        let _ = writeln!(out, "- language [{l}]({LANGUAGE_DIR}/{l}.md)");
    }
    out
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '-' || c == '_'
}

/// Escapes `s` and turns every funcon or alias name outside string
/// literals into a link to the canonical funcon's page under `prefix`.
fn linkify(s: &str, table: &SymbolTable, prefix: &str) -> String {
    let mut out = String::new();
    let mut rest = s;
    while let Some(c) = rest.chars().next() {
        if c == '"' {
            let end = rest[1..].find('"').map_or(rest.len(), |i| i + 2);
            out.push_str(&escape(&rest[..end]));
            rest = &rest[end..];
        } else if is_name_char(c) {
            let end = rest.find(|c: char| !is_name_char(c)).unwrap_or(rest.len());
            let word = &rest[..end];
            match table.funcon(word) {
                Some(f) => {
                    let _ = write!(out, "<a href=\"{prefix}{}.md\">{word}</a>", f.name);
                }
                None => out.push_str(word),
            }
            rest = &rest[end..];
        } else {
            out.push_str(&escape(&rest[..c.len_utf8()]));
            rest = &rest[c.len_utf8()..];
        }
    }
    out
}

/// What [`write_site`] did.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WriteStats {
    pub written: usize,
    pub unchanged: usize,
    pub removed: usize,
}

/// Writes pages under `out`. Pages whose content is already on disk are left
/// alone; each other page is written to a temporary file and renamed into
/// place. Generated pages with no counterpart in `site` are deleted.
pub fn write_site(out: &Path, site: &Site) -> io::Result<WriteStats> {
    let mut stats = WriteStats::default();
    for (rel, text) in site {
        let path = out.join(rel);
        if fs::read(&path).is_ok_and(|old| old == text.as_bytes()) {
            stats.unchanged += 1;
            continue;
        }
        let dir = path.parent().unwrap_or(out);
        fs::create_dir_all(dir)?;
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
        fs::write(&tmp, text)?;
        fs::rename(&tmp, &path)?;
        stats.written += 1;
    }
    for sub in [FUNCON_DIR, LANGUAGE_DIR] {
        let Ok(entries) = fs::read_dir(out.join(sub)) else {
            continue;
        };
        for e in entries {
            let path = e?.path();
            let rel = Path::new(sub).join(path.file_name().unwrap_or_default());
            if path.extension().is_some_and(|x| x == "md") && !site.contains_key(&rel) {
                fs::remove_file(&path)?;
                stats.removed += 1;
            }
        }
    }
    Ok(stats)
}
