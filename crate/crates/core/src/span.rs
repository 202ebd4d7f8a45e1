use std::fmt;
use std::sync::Arc;

/// A region of a source file, 1-based and inclusive of the start position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SourceSpan {
    pub file_id: Arc<str>,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl SourceSpan {
    pub fn new(file_id: Arc<str>, start: (u32, u32), end: (u32, u32)) -> Self {
        let (start, end) = if start <= end { (start, end) } else { (end, start) };
        SourceSpan {
            file_id,
            start_line: start.0,
            start_col: start.1,
            end_line: end.0,
            end_col: end.1,
        }
    }

    pub fn point(file_id: Arc<str>, line: u32, col: u32) -> Self {
        Self::new(file_id, (line, col), (line, col))
    }

    /// Placeholder used where a span is irrelevant (synthesised nodes, span-stripped comparisons).
    pub fn dummy() -> Self {
        Self::point(Arc::from("<none>"), 1, 1)
    }

    pub fn join(&self, other: &SourceSpan) -> SourceSpan {
        let start = (self.start_line, self.start_col).min((other.start_line, other.start_col));
        let end = (self.end_line, self.end_col).max((other.end_line, other.end_col));
        SourceSpan::new(self.file_id.clone(), start, end)
    }
}

impl Default for SourceSpan {
    fn default() -> Self {
        Self::dummy()
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file_id, self.start_line, self.start_col)
    }
}

/// Maps byte offsets of a text to line/column positions (columns count chars).
#[derive(Clone, Debug)]
pub struct LineIndex {
    line_starts: Vec<usize>,
    text: Arc<str>,
}

impl LineIndex {
    pub fn new(text: &str) -> Self {
        let mut line_starts = vec![0];
        for (i, b) in text.bytes().enumerate() {
            if b == b'\n' {
                line_starts.push(i + 1);
            }
        }
        LineIndex {
            line_starts,
            text: Arc::from(text),
        }
    }

    pub fn position(&self, offset: usize) -> (u32, u32) {
        let offset = offset.min(self.text.len());
        let line = match self.line_starts.binary_search(&offset) {
            Ok(l) => l,
            Err(l) => l - 1,
        };
        let start = self.line_starts[line];
        let col = self.text[start..offset].chars().count();
        (line as u32 + 1, col as u32 + 1)
    }

    pub fn span(&self, file_id: &Arc<str>, start: usize, end: usize) -> SourceSpan {
        SourceSpan::new(file_id.clone(), self.position(start), self.position(end))
    }
}
