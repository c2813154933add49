//! Detects and selectively eliminates left recursion in extended BNF
//! grammars, and parses with them using a backtracking top-down engine.

pub mod analysis;
pub mod bnf;
pub mod cli;
pub mod engine;
pub mod lexer;
pub mod rewrite;
pub mod service;
pub mod tree;

pub use analysis::{analyze, has_left_recursion, AnalysisReport, DefinitionId, LeftRecursiveCycle, RecursionKind};
pub use bnf::{parse_grammar, render_grammar, validate, Grammar};
pub use engine::{parse, parse_text, ParseNode, ParseOptions, ParseResult};
pub use lexer::{tokenize, Lexicon, Token};
pub use rewrite::{eliminate_left_recursion, RewriteError, RewriteErrorKind, RewriteOutcome};
pub use tree::{abridge, render_ascii, render_dot, render_json, AbridgementMap};
