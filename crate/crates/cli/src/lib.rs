//! The `cbs` command-line driver.
//!
//! [`run_cli`] executes one command in-process and returns what would be
//! written to stdout and stderr together with the exit code, so the binary
//! is a thin wrapper and tests need no subprocesses.

use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cbs_core::analysis::SymbolTable;
use cbs_core::diag::{render, sort_diagnostics, Category, Diagnostic};
use cbs_core::docs::{render_site, write_site};
use cbs_core::grammar::CompiledGrammar;
use cbs_core::interp::{canonicalize, Completion, Interpreter, RunOptions, DEFAULT_FUEL};
use cbs_core::library::{load, reused_in_language, Loaded, LIB_PATH_VAR};
use cbs_core::syntax::LanguageSpec;
use cbs_core::translate::{desugar, start_function, Translator, DESUGAR_BUDGET};
use cbs_core::{parse_term, Name, Term, Value};
use clap::{Args, Parser, Subcommand};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ABORTED: i32 = 1;
pub const EXIT_STUCK: i32 = 2;
pub const EXIT_STATIC: i32 = 3;
pub const EXIT_PARSE: i32 = 4;
pub const EXIT_FUEL: i32 = 5;
/// Malformed command lines.
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "cbs",
    version,
    about = "Specify languages by translation to reusable funcons"
)]
pub struct Cli {
    /// Library file or directory; repeatable. Defaults to $FUNCON_LIB_PATH,
    /// then ./lib/funcons.
    #[arg(long = "lib", global = true, value_name = "PATH")]
    pub lib: Vec<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check specification files and print diagnostics.
    Check { files: Vec<PathBuf> },
    /// Parse a program and print its syntax tree.
    Parse(ProgramArgs),
    /// Translate a program to a funcon term.
    Translate(ProgramArgs),
    /// Translate a program and run the resulting funcon term.
    Run {
        #[command(flatten)]
        program: ProgramArgs,
        #[command(flatten)]
        exec: ExecArgs,
    },
    /// Run a funcon term read from a file, or from stdin given `-`.
    RunTerm {
        /// Specification files (`.cbs`) declaring extra constructors or
        /// funcons, followed by the term file.
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        exec: ExecArgs,
    },
    /// List the library funcons a language reuses.
    Funcons {
        files: Vec<PathBuf>,
        #[arg(long)]
        lang: Option<String>,
    },
    /// Generate documentation pages.
    Doc {
        files: Vec<PathBuf>,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct ProgramArgs {
    /// Language specification files (`.cbs`) followed by one program file.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long)]
    pub lang: Option<String>,
    /// Start sort; defaults to the source sort of the first translation
    /// function.
    #[arg(long)]
    pub sort: Option<String>,
    /// Also print the parsed syntax tree (after desugaring for translate).
    #[arg(long)]
    pub ast: bool,
}

#[derive(Args, Debug)]
pub struct ExecArgs {
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    pub fuel: u64,
    /// Print one line per transition before the report.
    #[arg(long)]
    pub trace: bool,
}

/// Captured result of one command.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Invocation {
    fn fail(code: i32, diags: &[Diagnostic]) -> Self {
        Invocation {
            code,
            stdout: String::new(),
            stderr: render(diags),
        }
    }
}

/// Outcome summary of running a term.
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub kind: &'static str,
    /// The `result:`, `aborted:`, `stuck` or `out of fuel` line.
    pub result: String,
    pub output: Vec<String>,
    pub steps: u64,
    pub wall_ms: f64,
    pub exit_code: i32,
    pub trace: Vec<String>,
}

impl RunReport {
    /// The deterministic part of the report, as printed on stdout.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for l in self.trace.iter().chain(&self.output) {
            s.push_str(l);
            s.push('\n');
        }
        let _ = writeln!(s, "{}\nsteps: {}", self.result, self.steps);
        s
    }
}

/// Output lines show text without quotes; every other value in its
/// printed form.
pub fn output_line(v: &Value) -> String {
    match v {
        Value::Text(s) => s.to_string(),
        v => v.to_string(),
    }
}

pub fn run_term(term: &Term, table: &SymbolTable, exec: &ExecArgs) -> RunReport {
    let start = Instant::now();
    let out = Interpreter::new(table).run(
        term,
        &RunOptions {
            fuel: exec.fuel,
            trace: exec.trace,
        },
    );
    let wall_ms = start.elapsed().as_secs_f64() * 1000.0;
    let (kind, exit_code) = match &out.result {
        Completion::Completed(_) => ("completed", EXIT_OK),
        Completion::Aborted { .. } => ("aborted", EXIT_ABORTED),
        Completion::Stuck { .. } => ("stuck", EXIT_STUCK),
        Completion::OutOfFuel => ("out-of-fuel", EXIT_FUEL),
    };
    RunReport {
        kind,
        result: out.result.to_string(),
        output: out.output.iter().map(output_line).collect(),
        steps: out.steps,
        wall_ms,
        exit_code,
        trace: out.trace,
    }
}

/// Library paths from flags, the environment, or the working directory.
pub fn library_paths(flags: &[PathBuf]) -> Vec<PathBuf> {
    if !flags.is_empty() {
        return flags.to_vec();
    }
    if let Some(v) = std::env::var_os(LIB_PATH_VAR) {
        return std::env::split_paths(&v).collect();
    }
    let local = PathBuf::from("lib/funcons");
    if local.is_dir() {
        vec![local]
    } else {
        Vec::new()
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, stdin: &mut dyn Read) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, stdin),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Invocation {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Invocation {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}

pub fn execute(cli: &Cli, stdin: &mut dyn Read) -> Invocation {
    let lib = library_paths(&cli.lib);
    match &cli.command {
        Command::Check { files } => check(&lib, files),
        Command::Parse(p) => with_program(&lib, p, |ctx| Ok(success(ctx.parse()?.pretty() + "\n"))),
        Command::Translate(p) => with_program(&lib, p, |ctx| Ok(success(format!("{}\n", ctx.translate()?)))),
        Command::Run { program, exec } => with_program(&lib, program, |ctx| {
            let term = ctx.translate()?;
            Ok(report_invocation(run_term(&term, ctx.loaded.table(), exec)))
        }),
        Command::RunTerm { files, exec } => run_term_file(&lib, files, exec, stdin),
        Command::Funcons { files, lang } => {
            let loaded = match checked(&lib, files) {
                Ok(l) => l,
                Err(inv) => return inv,
            };
            let Some(l) = loaded.language(lang.as_deref().or(first_language_in(&loaded, files))) else {
                return Invocation::fail(EXIT_STATIC, &[no_language(lang.as_deref())]);
            };
            let mut stdout = String::new();
            for n in reused_in_language(l, loaded.table()) {
                let _ = writeln!(stdout, "{n}");
            }
            success(stdout)
        }
        Command::Doc { files, out } => {
            let loaded = match checked(&lib, files) {
                Ok(l) => l,
                Err(inv) => return inv,
            };
            let site = render_site(&loaded.spec, loaded.table());
            match write_site(out, &site) {
                Ok(s) => Invocation {
                    code: EXIT_OK,
                    stdout: String::new(),
                    stderr: format!(
                        "{} written, {} unchanged, {} removed\n",
                        s.written, s.unchanged, s.removed
                    ),
                },
                Err(e) => Invocation::fail(EXIT_PARSE, &[io_diag(out, e)]),
            }
        }
    }
}

fn io_diag(path: &Path, e: impl std::fmt::Display) -> Diagnostic {
    Diagnostic::error(
        Category::Io,
        cbs_core::SourceSpan::point(path.display().to_string().into(), 1, 1),
        format!("{}: {e}", path.display()),
    )
}

fn no_language(name: Option<&str>) -> Diagnostic {
    let msg = match name {
        Some(n) => format!("no language named `{n}`"),
        None => "no language specification given".to_string(),
    };
    Diagnostic::error(
        Category::UnknownName,
        cbs_core::SourceSpan::point("<command line>".into(), 1, 1),
        msg,
    )
}

fn exit_for(diags: &[Diagnostic]) -> i32 {
    if diags
        .iter()
        .any(|d| d.is_error() && matches!(d.category, Category::Io | Category::Parse | Category::Ambiguity))
    {
        EXIT_PARSE
    } else {
        EXIT_STATIC
    }
}

fn load_all(lib: &[PathBuf], files: &[PathBuf]) -> Result<Loaded, Invocation> {
    let mut paths = lib.to_vec();
    paths.extend(files.iter().cloned());
    load(&paths).map_err(|d| Invocation::fail(exit_for(&d), &d))
}

fn check(lib: &[PathBuf], files: &[PathBuf]) -> Invocation {
    let loaded = match load_all(lib, files) {
        Ok(l) => l,
        Err(inv) => {
            return Invocation {
                stdout: inv.stderr,
                stderr: String::new(),
                ..inv
            }
        }
    };
    let mut diags = loaded.analysis.diagnostics.clone();
    sort_diagnostics(&mut diags);
    Invocation {
        code: if loaded.analysis.has_errors() {
            EXIT_STATIC
        } else {
            EXIT_OK
        },
        stdout: render(&diags),
        stderr: String::new(),
    }
}

/// Loads and requires a clean analysis; errors and warnings go to stderr.
fn checked(lib: &[PathBuf], files: &[PathBuf]) -> Result<Loaded, Invocation> {
    let loaded = load_all(lib, files)?;
    if loaded.analysis.has_errors() {
        let mut d = loaded.analysis.diagnostics.clone();
        sort_diagnostics(&mut d);
        return Err(Invocation::fail(EXIT_STATIC, &d));
    }
    Ok(loaded)
}

fn first_language_in<'a>(loaded: &'a Loaded, files: &[PathBuf]) -> Option<&'a str> {
    let ids: Vec<String> = files.iter().map(|f| f.display().to_string()).collect();
    loaded
        .spec
        .language_specs
        .iter()
        .find(|l| ids.iter().any(|i| **i == *l.span.file_id))
        .map(|l| &*l.name)
}

struct ProgramCtx<'a> {
    loaded: &'a Loaded,
    lang: &'a LanguageSpec,
    grammar: &'a CompiledGrammar,
    text: String,
    file_id: String,
    args: &'a ProgramArgs,
    /// Text printed before the command's own output.
    prefix: String,
}

impl ProgramCtx<'_> {
    /// The translation function for the start sort, if any, and the sort.
    /// Parsing alone accepts any sort of the grammar.
    fn start(&self) -> Result<(Option<Name>, Name), Invocation> {
        match start_function(self.lang, self.args.sort.as_deref()) {
            Some((f, s)) => Ok((Some(f.clone()), s.clone())),
            None => match &self.args.sort {
                Some(s) if self.grammar.is_sort(s) => Ok((None, Name::from(s.as_str()))),
                _ => Err(no_translation(self.lang)),
            },
        }
    }

    fn parse(&self) -> Result<cbs_core::grammar::ObjectAst, Invocation> {
        let (_, sort) = self.start()?;
        self.grammar
            .parse_program(&self.text, &sort, &self.file_id)
            .map(|p| p.ast)
            .map_err(|d| Invocation::fail(exit_for(&d), &d))
    }

    fn translate(&mut self) -> Result<Term, Invocation> {
        let (f, _) = self.start()?;
        let ast = self.parse()?;
        let fail = |d: Diagnostic| Invocation::fail(exit_for(std::slice::from_ref(&d)), &[d]);
        let ast = desugar(&ast, self.lang, self.grammar, DESUGAR_BUDGET).map_err(fail)?;
        if self.args.ast {
            self.prefix.push_str(&ast.pretty());
            self.prefix.push('\n');
        }
        let Some(f) = f else {
            return Err(no_translation(self.lang));
        };
        Translator::new(self.lang, self.grammar, self.loaded.table())
            .translate(&ast, &f)
            .map_err(fail)
    }
}

/// Separates `.cbs` specifications from the single input file.
fn split_program(files: &[PathBuf], what: &str) -> Result<(Vec<PathBuf>, PathBuf), Invocation> {
    let (specs, mut rest): (Vec<PathBuf>, Vec<PathBuf>) = files
        .iter()
        .cloned()
        .partition(|f| f.extension().is_some_and(|x| x == "cbs"));
    if rest.len() != 1 {
        return Err(Invocation {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!(
                "expected exactly one {what} file besides `.cbs` specifications, found {}\n",
                rest.len()
            ),
        });
    }
    Ok((specs, rest.remove(0)))
}

fn with_program(
    lib: &[PathBuf],
    args: &ProgramArgs,
    body: impl FnOnce(&mut ProgramCtx) -> Result<Invocation, Invocation>,
) -> Invocation {
    let (specs, program) = match split_program(&args.files, "program") {
        Ok(x) => x,
        Err(inv) => return inv,
    };
    let program = &program;
    let loaded = match checked(lib, &specs) {
        Ok(l) => l,
        Err(inv) => return inv,
    };
    let Some(lang) = loaded.language(args.lang.as_deref().or(first_language_in(&loaded, &specs))) else {
        return Invocation::fail(EXIT_STATIC, &[no_language(args.lang.as_deref())]);
    };
    let Some(grammar) = loaded.analysis.grammars.get(&lang.name) else {
        return Invocation::fail(EXIT_STATIC, &[no_language(Some(&lang.name))]);
    };
    let text = match std::fs::read_to_string(program) {
        Ok(t) => t,
        Err(e) => return Invocation::fail(EXIT_PARSE, &[io_diag(program, e)]),
    };
    let mut ctx = ProgramCtx {
        loaded: &loaded,
        lang,
        grammar,
        text,
        file_id: program.display().to_string(),
        args,
        prefix: String::new(),
    };
    match body(&mut ctx) {
        Ok(inv) => Invocation {
            stdout: ctx.prefix + &inv.stdout,
            ..inv
        },
        Err(inv) => inv,
    }
}

fn success(stdout: String) -> Invocation {
    Invocation {
        code: EXIT_OK,
        stdout,
        stderr: String::new(),
    }
}

fn no_translation(lang: &LanguageSpec) -> Invocation {
    Invocation::fail(
        EXIT_STATIC,
        &[Diagnostic::error(
            Category::UnknownName,
            lang.span.clone(),
            format!(
                "language `{}` has no translation function for the start sort",
                lang.name
            ),
        )],
    )
}

fn report_invocation(r: RunReport) -> Invocation {
    Invocation {
        code: r.exit_code,
        stdout: r.render(),
        stderr: format!("time: {:.3} ms\n", r.wall_ms),
    }
}

fn run_term_file(lib: &[PathBuf], files: &[PathBuf], exec: &ExecArgs, stdin: &mut dyn Read) -> Invocation {
    let (specs, inputs) = match split_program(files, "term") {
        Ok(x) => x,
        Err(inv) => return inv,
    };
    let file = inputs.as_path();
    let loaded = match checked(lib, &specs) {
        Ok(l) => l,
        Err(inv) => return inv,
    };
    let mut text = String::new();
    let read = if file == Path::new("-") {
        stdin.read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(file).map(|t| text = t)
    };
    if let Err(e) = read {
        return Invocation::fail(EXIT_PARSE, &[io_diag(file, e)]);
    }
    let file_id = if file == Path::new("-") {
        "<stdin>".to_string()
    } else {
        file.display().to_string()
    };
    let term = match parse_term(&text, &file_id) {
        Ok(t) => t,
        Err(d) => return Invocation::fail(EXIT_PARSE, &d),
    };
    let term = canonicalize(&term, loaded.table());
    report_invocation(run_term(&term, loaded.table(), exec))
}
