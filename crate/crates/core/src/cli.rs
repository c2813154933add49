//! The `unleft` command line.
//!
//! Exit codes: 0 success (or no left recursion), 1 left recursion found or
//! parse failure, 2 unreadable or invalid grammar, 3 rewrite refused,
//! 4 parse depth exceeded.

use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::analysis::analyze;
use crate::bnf::{parse_grammar, render_pretty, validate, Finding, Grammar, GrammarError};
use crate::engine::{try_parse, ParseOptions, ParseResult, DEFAULT_MAX_DEPTH};
use crate::lexer::Lexicon;
use crate::rewrite::{eliminate_left_recursion, Role};
use crate::tree::{abridge, render_ascii, render_dot, render_json, AbridgementMap};

pub const DEFAULT_PORT: u16 = 7878;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FOUND: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_REWRITE_REFUSED: u8 = 3;
pub const EXIT_DEPTH_EXCEEDED: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "unleft", version, about = "Find and remove left recursion in BNF grammars, and parse with them")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify every reachable definition and list left recursive cycles.
    Analyze {
        /// Grammar file, or `-` for standard input.
        grammar: PathBuf,
        #[arg(long)]
        start: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Print the grammar with its left recursion eliminated.
    Rewrite {
        grammar: PathBuf,
        #[arg(long)]
        start: Option<String>,
        /// Follow the grammar with comments naming the rule each
        /// generated rule came from.
        #[arg(long)]
        provenance: bool,
        /// Align definitions one per line instead of one rule per line.
        #[arg(long)]
        pretty: bool,
    },
    /// Tokenize input and parse it with the grammar.
    Parse {
        grammar: PathBuf,
        #[arg(long)]
        start: Option<String>,
        /// Text to parse. Without this or `--input-file`, standard input is read.
        #[arg(long, conflicts_with = "input_file")]
        input: Option<String>,
        #[arg(long)]
        input_file: Option<PathBuf>,
        /// JSON token classes: `[{"name": .., "pattern": .., "skip": bool}]`.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
        /// Hide the rules introduced by rewriting.
        #[arg(long)]
        abridged: bool,
        /// Eliminate left recursion before parsing.
        #[arg(long)]
        rewrite: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
    },
    /// Serve the JSON API on localhost.
    Serve {
        #[arg(long, env = "UNLEFT_PORT", default_value_t = DEFAULT_PORT)]
        port: u16,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Ascii,
    Dot,
    Json,
}

/// What a command printed and how it exited.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn fail(code: u8, stderr: String) -> Self {
        Output {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{0}")]
    Syntax(#[from] GrammarError),
    #[error("{}", .0.iter().filter(|f| f.is_error()).map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Finding>),
}

/// Reads grammar text, applies the start rule override and rejects grammars
/// with validation errors. Warnings are returned alongside.
pub fn load_grammar(text: &str, start: Option<&str>) -> Result<(Grammar, Vec<Finding>), LoadError> {
    let mut grammar = parse_grammar(text)?;
    if let Some(start) = start {
        grammar = grammar.with_start(start);
    }
    let findings = validate(&grammar);
    if findings.iter().any(Finding::is_error) {
        return Err(LoadError::Invalid(findings));
    }
    Ok((grammar, findings))
}

fn read_source(path: &Path, stdin: &mut dyn FnMut() -> std::io::Result<String>) -> Result<String, String> {
    if path == Path::new("-") {
        stdin().map_err(|e| format!("cannot read standard input: {e}"))
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn load(
    path: &Path,
    start: Option<&str>,
    stdin: &mut dyn FnMut() -> std::io::Result<String>,
) -> Result<(Grammar, String), Output> {
    let text = read_source(path, stdin).map_err(|e| Output::fail(EXIT_INVALID, e + "\n"))?;
    match load_grammar(&text, start) {
        Ok((grammar, findings)) => {
            let warnings = findings.iter().map(|f| format!("warning: {f}\n")).collect();
            Ok((grammar, warnings))
        }
        Err(e) => Err(Output::fail(EXIT_INVALID, format!("{}: {e}\n", path.display()))),
    }
}

/// Runs every command except `serve`. `stdin` is called at most once, when
/// a command reads from standard input.
pub fn execute(command: &Command, stdin: &mut dyn FnMut() -> std::io::Result<String>) -> Output {
    match command {
        Command::Analyze { grammar, start, json } => {
            let (grammar, warnings) = match load(grammar, start.as_deref(), stdin) {
                Ok(loaded) => loaded,
                Err(out) => return out,
            };
            let report = analyze(&grammar);
            let stdout = if *json {
                serde_json::to_string_pretty(&report).expect("reports serialize") + "\n"
            } else {
                report.summary()
            };
            let code = if report.has_left_recursion() { EXIT_FOUND } else { EXIT_OK };
            Output {
                code,
                stdout,
                stderr: warnings,
            }
        }
        Command::Rewrite {
            grammar,
            start,
            provenance,
            pretty,
        } => {
            let (grammar, warnings) = match load(grammar, start.as_deref(), stdin) {
                Ok(loaded) => loaded,
                Err(out) => return out,
            };
            match eliminate_left_recursion(&grammar) {
                Ok(outcome) => {
                    let mut stdout = if *pretty {
                        render_pretty(&outcome.grammar)
                    } else {
                        outcome.grammar.to_string()
                    };
                    if *provenance {
                        for (generated, origin) in &outcome.provenance {
                            let role = match origin.role {
                                Role::Reduced => "reduced",
                                Role::Repeated => "repeated",
                            };
                            stdout.push_str(&format!("// {generated}: {role} from {}\n", origin.original));
                        }
                    }
                    Output {
                        code: EXIT_OK,
                        stdout,
                        stderr: warnings,
                    }
                }
                Err(e) => Output::fail(EXIT_REWRITE_REFUSED, format!("{warnings}{}: {e}\n", e.kind.name())),
            }
        }
        Command::Parse {
            grammar,
            start,
            input,
            input_file,
            lexicon,
            format,
            abridged,
            rewrite,
            max_depth,
        } => {
            let (mut grammar, mut warnings) = match load(grammar, start.as_deref(), stdin) {
                Ok(loaded) => loaded,
                Err(out) => return out,
            };
            let mut map = None;
            if *rewrite {
                match eliminate_left_recursion(&grammar) {
                    Ok(outcome) => {
                        grammar = outcome.grammar;
                        map = Some(AbridgementMap::new(outcome.provenance));
                    }
                    Err(e) => {
                        return Output::fail(EXIT_REWRITE_REFUSED, format!("{warnings}{}: {e}\n", e.kind.name()));
                    }
                }
            }
            let text = match (input, input_file) {
                (Some(text), _) => text.clone(),
                (None, Some(path)) => match read_source(path, stdin) {
                    Ok(text) => text,
                    Err(e) => return Output::fail(EXIT_INVALID, e + "\n"),
                },
                (None, None) => match stdin() {
                    Ok(text) => text,
                    Err(e) => return Output::fail(EXIT_INVALID, format!("cannot read standard input: {e}\n")),
                },
            };
            let lexicon = match lexicon {
                Some(path) => match Lexicon::load(path) {
                    Ok(lexicon) => lexicon,
                    Err(e) => return Output::fail(EXIT_INVALID, format!("{}: {e}\n", path.display())),
                },
                None => Lexicon::default(),
            };
            let tokens = match lexicon.tokenize(&text) {
                Ok(tokens) => tokens,
                Err(e) => return Output::fail(EXIT_INVALID, format!("{warnings}input: {e}\n")),
            };
            let result = match try_parse(&grammar, &tokens, ParseOptions { max_depth: *max_depth }) {
                Ok(result) => result,
                Err(e) => return Output::fail(EXIT_INVALID, format!("{warnings}{e}\n")),
            };
            match result {
                ParseResult::Success { tree } => {
                    let tree = if *abridged {
                        let map = map.unwrap_or_else(|| AbridgementMap::infer(&grammar));
                        abridge(&tree, &map)
                    } else {
                        tree
                    };
                    let stdout = match format {
                        Format::Ascii => render_ascii(&tree),
                        Format::Dot => render_dot(&tree),
                        Format::Json => render_json(&tree) + "\n",
                    };
                    Output {
                        code: EXIT_OK,
                        stdout,
                        stderr: warnings,
                    }
                }
                ParseResult::Failure {
                    furthest_token_index,
                    expected,
                } => {
                    let found = match tokens.get(furthest_token_index) {
                        Some(token) => format!("{:?} at offset {}", token.value, token.offset),
                        None => "end of input".to_string(),
                    };
                    warnings.push_str(&format!(
                        "no parse: stopped at token {furthest_token_index} ({found}), expected {}\n",
                        expected.join(" or ")
                    ));
                    Output::fail(EXIT_FOUND, warnings)
                }
                ParseResult::DepthExceeded { rule } => {
                    warnings.push_str(&format!(
                        "no parse: rule `{rule}` nested more than {max_depth} times without consuming input\n"
                    ));
                    Output::fail(EXIT_DEPTH_EXCEEDED, warnings)
                }
            }
        }
        Command::Serve { .. } => Output::fail(EXIT_INVALID, "serve is not a one-shot command\n".into()),
    }
}

/// Entry point of the `unleft` binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Serve { port } = cli.command {
        let runtime = tokio::runtime::Builder::new_multi_thread()
            .enable_all()
            // Parse trees get as deep as inputs get long.
            .thread_stack_size(64 * 1024 * 1024)
            .build()
            .expect("tokio runtime");
        return match runtime.block_on(crate::service::serve(port)) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("unleft serve: {e}");
                ExitCode::from(EXIT_INVALID)
            }
        };
    }
    let output = std::thread::Builder::new()
        .stack_size(64 * 1024 * 1024)
        .spawn(move || {
            execute(&cli.command, &mut || {
                let mut text = String::new();
                std::io::stdin().read_to_string(&mut text)?;
                Ok(text)
            })
        })
        .expect("worker thread")
        .join()
        .unwrap_or_else(|panic| std::panic::resume_unwind(panic));
    print!("{}", output.stdout);
    eprint!("{}", output.stderr);
    ExitCode::from(output.code)
}
