//! Tokenizer for the `.cbs` meta-language.

use crate::syntax::CharClass;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keyword {
    Funcon,
    Builtin,
    Rule,
    Alias,
    Entity,
    Datatype,
    Language,
    Syntax,
    Lexical,
    Layout,
    Priority,
    Semantics,
    Desugar,
}

impl Keyword {
    fn from_word(w: &str) -> Option<Keyword> {
        Some(match w {
            "Funcon" => Keyword::Funcon,
            "Builtin" => Keyword::Builtin,
            "Rule" => Keyword::Rule,
            "Alias" => Keyword::Alias,
            "Entity" => Keyword::Entity,
            "Datatype" => Keyword::Datatype,
            "Language" => Keyword::Language,
            "Syntax" => Keyword::Syntax,
            "Lexical" => Keyword::Lexical,
            "Layout" => Keyword::Layout,
            "Priority" => Keyword::Priority,
            "Semantics" => Keyword::Semantics,
            "Desugar" => Keyword::Desugar,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Funcon => "Funcon",
            Keyword::Builtin => "Builtin",
            Keyword::Rule => "Rule",
            Keyword::Alias => "Alias",
            Keyword::Entity => "Entity",
            Keyword::Datatype => "Datatype",
            Keyword::Language => "Language",
            Keyword::Syntax => "Syntax",
            Keyword::Lexical => "Lexical",
            Keyword::Layout => "Layout",
            Keyword::Priority => "Priority",
            Keyword::Semantics => "Semantics",
            Keyword::Desugar => "Desugar",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Keyword(Keyword),
    /// `if-true-else`, `environment`, `default`, ...
    Lower(String),
    /// `Exp1`, `X'`, `LAYOUT`, ...
    Upper(String),
    Int(String),
    Str(String),
    Class(CharClass),
    Underscore,
    LParen,
    RParen,
    LBrace,
    RBrace,
    /// `[[`
    LSyntax,
    /// `]]`
    RSyntax,
    Comma,
    Semi,
    Colon,
    Star,
    Plus,
    Question,
    Bar,
    /// `::=`
    Defines,
    /// `=`
    Equals,
    /// `==`
    EqEq,
    /// `!=`
    NotEq,
    /// `=>`
    Computes,
    /// `~>`
    Rewrites,
    /// `--->`
    Steps,
    /// `--` opening a labelled arrow
    LabelOpen,
    /// `->` closing a labelled arrow
    LabelClose,
    /// `==>`
    Infers,
    /// `|-`
    Turnstile,
    Lt,
    Gt,
    At,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Keyword(k) => format!("keyword `{}`", k.as_str()),
            Tok::Lower(s) => format!("name `{s}`"),
            Tok::Upper(s) => format!("meta-variable `{s}`"),
            Tok::Int(s) => format!("integer `{s}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Class(c) => format!("character class `{c}`"),
            Tok::Eof => "end of file".to_string(),
            other => format!("`{}`", punct_text(other)),
        }
    }
}

fn punct_text(t: &Tok) -> &'static str {
    match t {
        Tok::Underscore => "_",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::LSyntax => "[[",
        Tok::RSyntax => "]]",
        Tok::Comma => ",",
        Tok::Semi => ";",
        Tok::Colon => ":",
        Tok::Star => "*",
        Tok::Plus => "+",
        Tok::Question => "?",
        Tok::Bar => "|",
        Tok::Defines => "::=",
        Tok::Equals => "=",
        Tok::EqEq => "==",
        Tok::NotEq => "!=",
        Tok::Computes => "=>",
        Tok::Rewrites => "~>",
        Tok::Steps => "--->",
        Tok::LabelOpen => "--",
        Tok::LabelClose => "->",
        Tok::Infers => "==>",
        Tok::Turnstile => "|-",
        Tok::Lt => "<",
        Tok::Gt => ">",
        Tok::At => "@",
        _ => "?",
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
    /// Set when no whitespace or comment separates this token from the previous one.
    pub glued: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub offset: usize,
    pub message: String,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    Lexer {
        src: text,
        bytes: text.as_bytes(),
        pos: 0,
    }
    .run()
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&self, k: usize) -> Option<u8> {
        self.bytes.get(self.pos + k).copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s)
    }

    fn err<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, LexError> {
        Err(LexError {
            offset,
            message: message.into(),
        })
    }

    fn run(mut self) -> Result<Vec<Token>, LexError> {
        let mut out = Vec::new();
        let mut glued = false;
        loop {
            let before = self.pos;
            self.skip_trivia();
            if self.pos != before {
                glued = false;
            }
            let start = self.pos;
            let Some(c) = self.peek(0) else {
                out.push(Token {
                    tok: Tok::Eof,
                    start,
                    end: start,
                    glued: false,
                });
                return Ok(out);
            };
            let tok = self.token(c)?;
            out.push(Token {
                tok,
                start,
                end: self.pos,
                glued: glued && !out.is_empty(),
            });
            glued = true;
        }
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek(0) {
                Some(b' ' | b'\t' | b'\r' | b'\n') => self.pos += 1,
                Some(b'/') if self.peek(1) == Some(b'/') => {
                    while let Some(c) = self.peek(0) {
                        if c == b'\n' {
                            break;
                        }
                        self.pos += 1;
                    }
                }
                _ => return,
            }
        }
    }

    fn punct(&mut self, s: &str, t: Tok) -> Option<Tok> {
        if self.starts_with(s) {
            self.pos += s.len();
            Some(t)
        } else {
            None
        }
    }

    fn token(&mut self, c: u8) -> Result<Tok, LexError> {
        let start = self.pos;
        match c {
            b'a'..=b'z' => Ok(self.lower()),
            b'A'..=b'Z' => Ok(self.upper()),
            b'0'..=b'9' => Ok(self.int()),
            b'-' if self.peek(1).is_some_and(|d| d.is_ascii_digit()) => {
                self.pos += 1;
                match self.int() {
                    Tok::Int(s) => Ok(Tok::Int(format!("-{s}"))),
                    _ => unreachable!(),
                }
            }
            b'"' => self.string(),
            b'[' if self.peek(1) == Some(b'[') => {
                self.pos += 2;
                Ok(Tok::LSyntax)
            }
            b'[' => self.class(),
            b'_' => {
                if self.peek(1).is_some_and(|d| d.is_ascii_alphanumeric()) {
                    return self.err(start, "identifiers may not start with `_`");
                }
                self.pos += 1;
                Ok(Tok::Underscore)
            }
            _ => {
                let table: &[(&str, Tok)] = &[
                    ("--->", Tok::Steps),
                    ("--", Tok::LabelOpen),
                    ("->", Tok::LabelClose),
                    ("::=", Tok::Defines),
                    ("==>", Tok::Infers),
                    ("==", Tok::EqEq),
                    ("=>", Tok::Computes),
                    ("=", Tok::Equals),
                    ("!=", Tok::NotEq),
                    ("~>", Tok::Rewrites),
                    ("|-", Tok::Turnstile),
                    ("|", Tok::Bar),
                    ("]]", Tok::RSyntax),
                    ("(", Tok::LParen),
                    (")", Tok::RParen),
                    ("{", Tok::LBrace),
                    ("}", Tok::RBrace),
                    (",", Tok::Comma),
                    (";", Tok::Semi),
                    (":", Tok::Colon),
                    ("*", Tok::Star),
                    ("+", Tok::Plus),
                    ("?", Tok::Question),
                    ("<", Tok::Lt),
                    (">", Tok::Gt),
                    ("@", Tok::At),
                ];
                for (s, t) in table {
                    if let Some(t) = self.punct(s, t.clone()) {
                        return Ok(t);
                    }
                }
                let ch = self.src[start..].chars().next().unwrap_or('?');
                self.err(start, format!("unexpected character {ch:?}"))
            }
        }
    }

    fn lower(&mut self) -> Tok {
        let start = self.pos;
        loop {
            match self.peek(0) {
                Some(b'a'..=b'z' | b'0'..=b'9') => self.pos += 1,
                Some(b'-')
                    if self
                        .peek(1)
                        .is_some_and(|d| d.is_ascii_lowercase() || d.is_ascii_digit()) =>
                {
                    self.pos += 1
                }
                _ => break,
            }
        }
        Tok::Lower(self.src[start..self.pos].to_string())
    }

    fn upper(&mut self) -> Tok {
        let start = self.pos;
        while self.peek(0).is_some_and(|d| d.is_ascii_alphanumeric() || d == b'_') {
            self.pos += 1;
        }
        while self.peek(0) == Some(b'\'') {
            self.pos += 1;
        }
        let word = &self.src[start..self.pos];
        match Keyword::from_word(word) {
            Some(k) => Tok::Keyword(k),
            None => Tok::Upper(word.to_string()),
        }
    }

    fn int(&mut self) -> Tok {
        let start = self.pos;
        while self.peek(0).is_some_and(|d| d.is_ascii_digit()) {
            self.pos += 1;
        }
        Tok::Int(self.src[start..self.pos].to_string())
    }

    fn escape(&mut self, in_class: bool) -> Result<char, LexError> {
        let at = self.pos;
        self.pos += 1;
        let Some(c) = self.src[self.pos..].chars().next() else {
            return self.err(at, "unterminated escape");
        };
        self.pos += c.len_utf8();
        Ok(match c {
            'n' => '\n',
            't' => '\t',
            'r' => '\r',
            '\\' | '"' => c,
            c if in_class => c,
            c => return self.err(at, format!("unknown escape `\\{c}`")),
        })
    }

    fn string(&mut self) -> Result<Tok, LexError> {
        let start = self.pos;
        self.pos += 1;
        let mut s = String::new();
        loop {
            match self.src[self.pos..].chars().next() {
                None | Some('\n') => return self.err(start, "unterminated string literal"),
                Some('"') => {
                    self.pos += 1;
                    return Ok(Tok::Str(s));
                }
                Some('\\') => s.push(self.escape(false)?),
                Some(c) => {
                    self.pos += c.len_utf8();
                    s.push(c);
                }
            }
        }
    }

    fn class_char(&mut self, start: usize) -> Result<char, LexError> {
        match self.src[self.pos..].chars().next() {
            None | Some('\n') => self.err(start, "unterminated character class"),
            Some('\\') => self.escape(true),
            Some(c) => {
                self.pos += c.len_utf8();
                Ok(c)
            }
        }
    }

    fn class(&mut self) -> Result<Tok, LexError> {
        let start = self.pos;
        self.pos += 1;
        let negated = if self.peek(0) == Some(b'^') {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut ranges = Vec::new();
        loop {
            if self.peek(0) == Some(b']') {
                self.pos += 1;
                return Ok(Tok::Class(CharClass { negated, ranges }));
            }
            let lo = self.class_char(start)?;
            let hi = if self.peek(0) == Some(b'-') && self.peek(1) != Some(b']') {
                self.pos += 1;
                self.class_char(start)?
            } else {
                lo
            };
            if hi < lo {
                return self.err(start, format!("empty character range `{lo}-{hi}`"));
            }
            ranges.push((lo, hi));
        }
    }
}
