//! Diagnostics shared by every static pass and the command-line driver.
//!
//! The rendered form is line oriented, `file:line:col: severity category: message`,
//! and is consumed verbatim by tests.

use std::fmt;

use crate::span::SourceSpan;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// The closed set of diagnostic categories.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Io,
    Parse,
    DuplicateDef,
    AliasCycle,
    UnknownName,
    Arity,
    UndefinedResult,
    PatternMismatch,
    UnboundVar,
    UnknownSort,
    PriorityCycle,
    BadProduction,
    BadDefault,
    Ambiguity,
    NoEquation,
    DesugarDivergence,
    Overlap,
    UnusedParam,
    UnusedAlias,
    Stuck,
}

impl Category {
    pub const ALL: [Category; 20] = [
        Category::Io,
        Category::Parse,
        Category::DuplicateDef,
        Category::AliasCycle,
        Category::UnknownName,
        Category::Arity,
        Category::UndefinedResult,
        Category::PatternMismatch,
        Category::UnboundVar,
        Category::UnknownSort,
        Category::PriorityCycle,
        Category::BadProduction,
        Category::BadDefault,
        Category::Ambiguity,
        Category::NoEquation,
        Category::DesugarDivergence,
        Category::Overlap,
        Category::UnusedParam,
        Category::UnusedAlias,
        Category::Stuck,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Io => "io",
            Category::Parse => "parse",
            Category::DuplicateDef => "duplicate-def",
            Category::AliasCycle => "alias-cycle",
            Category::UnknownName => "unknown-name",
            Category::Arity => "arity",
            Category::UndefinedResult => "undefined-result",
            Category::PatternMismatch => "pattern-mismatch",
            Category::UnboundVar => "unbound-var",
            Category::UnknownSort => "unknown-sort",
            Category::PriorityCycle => "priority-cycle",
            Category::BadProduction => "bad-production",
            Category::BadDefault => "bad-default",
            Category::Ambiguity => "ambiguity",
            Category::NoEquation => "no-equation",
            Category::DesugarDivergence => "desugar-divergence",
            Category::Overlap => "overlap",
            Category::UnusedParam => "unused-param",
            Category::UnusedAlias => "unused-alias",
            Category::Stuck => "stuck",
        }
    }

    pub fn parse(token: &str) -> Option<Category> {
        Category::ALL.iter().copied().find(|c| c.as_str() == token)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    pub severity: Severity,
    pub category: Category,
    pub span: SourceSpan,
    pub message: String,
}

impl Diagnostic {
    pub fn error(category: Category, span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            category,
            span,
            message: message.into(),
        }
    }

    pub fn warning(category: Category, span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            category,
            span,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    fn sort_key(&self) -> impl Ord + '_ {
        (
            &self.span.file_id,
            self.span.start_line,
            self.span.start_col,
            self.span.end_line,
            self.span.end_col,
            self.category,
            self.severity,
            &self.message,
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {} {}: {}",
            self.span.file_id, self.span.start_line, self.span.start_col, self.severity, self.category, self.message
        )
    }
}

/// Sorts by (file, span) and removes exact duplicates.
pub fn sort_diagnostics(diags: &mut Vec<Diagnostic>) {
    diags.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    diags.dedup();
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

pub fn render(diags: &[Diagnostic]) -> String {
    let mut out = String::new();
    for d in diags {
        out.push_str(&d.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn line_format() {
        let d = Diagnostic::error(
            Category::Arity,
            SourceSpan::point(Arc::from("lang.cbs"), 4, 7),
            "if-true-else expects 3 arguments, found 2",
        );
        assert_eq!(
            d.to_string(),
            "lang.cbs:4:7: error arity: if-true-else expects 3 arguments, found 2"
        );
    }

    #[test]
    fn categories_round_trip_through_tokens() {
        for c in Category::ALL {
            assert_eq!(Category::parse(c.as_str()), Some(c));
        }
    }

    #[test]
    fn sorting_is_by_file_then_position() {
        let f =
            |file: &str, line| Diagnostic::warning(Category::Overlap, SourceSpan::point(Arc::from(file), line, 1), "x");
        let mut ds = vec![f("b", 1), f("a", 9), f("a", 2), f("a", 2)];
        sort_diagnostics(&mut ds);
        let order: Vec<_> = ds
            .iter()
            .map(|d| (d.span.file_id.to_string(), d.span.start_line))
            .collect();
        assert_eq!(order, vec![("a".into(), 2), ("a".into(), 9), ("b".into(), 1)]);
    }
}
