//! Reading and writing the textual grammar format.
//!
//! ```text
//! L  ::= L! "c" | "a" | L "d" | "a" "b" ;
//! S  ::= /\d+/ ( "+" | "-" )* . ε ;   // comments run to end of line
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Definition, Grammar, GroupKind, Part, Quantifier, Rule, TerminalKind};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct GrammarError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Sym {
    Name(String),
    Defines,
    Bar,
    Semi,
    Open,
    Close,
    Bang,
    Question,
    Star,
    Literal(String),
    Pattern(String),
    Epsilon,
    Dot,
    End,
}

impl Sym {
    fn describe(&self) -> String {
        match self {
            Sym::Name(n) => format!("rule name `{n}`"),
            Sym::Defines => "`::=`".into(),
            Sym::Bar => "`|`".into(),
            Sym::Semi => "`;`".into(),
            Sym::Open => "`(`".into(),
            Sym::Close => "`)`".into(),
            Sym::Bang => "`!`".into(),
            Sym::Question => "`?`".into(),
            Sym::Star => "`*`".into(),
            Sym::Literal(_) => "literal".into(),
            Sym::Pattern(_) => "pattern".into(),
            Sym::Epsilon => "`ε`".into(),
            Sym::Dot => "`.`".into(),
            Sym::End => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Lexeme {
    sym: Sym,
    line: usize,
    column: usize,
}

struct Scanner<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Scanner {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, line: usize, column: usize, message: impl Into<String>) -> GrammarError {
        GrammarError {
            line,
            column,
            message: message.into(),
        }
    }

    fn scan(mut self) -> Result<Vec<Lexeme>, GrammarError> {
        let mut out = Vec::new();
        loop {
            while self.chars.peek().is_some_and(|c| c.is_whitespace()) {
                self.bump();
            }
            let (line, column) = (self.line, self.column);
            let Some(c) = self.bump() else {
                out.push(Lexeme {
                    sym: Sym::End,
                    line,
                    column,
                });
                return Ok(out);
            };
            let sym = match c {
                '|' => Sym::Bar,
                ';' => Sym::Semi,
                '(' => Sym::Open,
                ')' => Sym::Close,
                '!' => Sym::Bang,
                '?' => Sym::Question,
                '*' => Sym::Star,
                '.' => Sym::Dot,
                'ε' => Sym::Epsilon,
                ':' => {
                    if self.bump() == Some(':') && self.bump() == Some('=') {
                        Sym::Defines
                    } else {
                        return Err(self.error(line, column, "expected `::=`"));
                    }
                }
                '=' => return Err(self.error(line, column, "expected `::=`, found `=`")),
                '/' if self.chars.peek() == Some(&'/') => {
                    while self.chars.peek().is_some_and(|&c| c != '\n') {
                        self.bump();
                    }
                    continue;
                }
                '/' => Sym::Pattern(self.delimited('/', line, column)?),
                '"' => Sym::Literal(self.delimited('"', line, column)?),
                '\\' => {
                    let word: String = std::iter::from_fn(|| {
                        self.chars
                            .peek()
                            .is_some_and(|c| c.is_ascii_alphabetic())
                            .then(|| self.bump())
                            .flatten()
                    })
                    .collect();
                    if word == "epsilon" {
                        Sym::Epsilon
                    } else {
                        return Err(self.error(line, column, format!("unknown escape `\\{word}`")));
                    }
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut name = String::from(c);
                    while let Some(&n) = self.chars.peek() {
                        if n.is_ascii_alphanumeric() || n == '_' {
                            name.push(n);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    while let Some(&n) = self.chars.peek() {
                        if n == '~' || n == '_' {
                            name.push(n);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Sym::Name(name)
                }
                other => {
                    return Err(self.error(line, column, format!("unexpected character `{other}`")))
                }
            };
            out.push(Lexeme { sym, line, column });
        }
    }

    /// Reads up to the closing delimiter. A backslash escapes the delimiter
    /// and, in literals, itself; in patterns other escapes are kept verbatim.
    fn delimited(&mut self, delim: char, line: usize, column: usize) -> Result<String, GrammarError> {
        let mut text = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => {
                    return Err(self.error(line, column, format!("unterminated `{delim}`")));
                }
                Some(c) if c == delim => return Ok(text),
                Some('\\') => match self.bump() {
                    Some(c) if c == delim => text.push(c),
                    Some('\\') if delim == '"' => text.push('\\'),
                    Some(c) => {
                        text.push('\\');
                        text.push(c);
                    }
                    None => return Err(self.error(line, column, format!("unterminated `{delim}`"))),
                },
                Some(c) => text.push(c),
            }
        }
    }
}

struct Parser {
    lexemes: Vec<Lexeme>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Lexeme {
        &self.lexemes[self.pos]
    }

    fn advance(&mut self) -> Lexeme {
        let lexeme = self.lexemes[self.pos].clone();
        if self.pos + 1 < self.lexemes.len() {
            self.pos += 1;
        }
        lexeme
    }

    fn expected(&self, what: &str) -> GrammarError {
        let found = self.peek();
        GrammarError {
            line: found.line,
            column: found.column,
            message: format!("expected {what}, found {}", found.sym.describe()),
        }
    }

    fn grammar(&mut self) -> Result<Grammar, GrammarError> {
        let mut rules: Vec<Rule> = Vec::new();
        let mut seen = HashSet::new();
        while self.peek().sym != Sym::End {
            let at = self.peek().clone();
            let rule = self.rule()?;
            if !seen.insert(rule.name.clone()) {
                return Err(GrammarError {
                    line: at.line,
                    column: at.column,
                    message: format!("duplicate rule `{}`", rule.name),
                });
            }
            rules.push(rule);
        }
        Ok(Grammar::new(rules))
    }

    fn rule(&mut self) -> Result<Rule, GrammarError> {
        let name = match &self.peek().sym {
            Sym::Name(n) => n.clone(),
            _ => return Err(self.expected("rule name")),
        };
        self.advance();
        if self.peek().sym != Sym::Defines {
            return Err(self.expected("`::=`"));
        }
        self.advance();
        let mut definitions = vec![Definition::new(self.parts()?)];
        while self.peek().sym == Sym::Bar {
            self.advance();
            definitions.push(Definition::new(self.parts()?));
        }
        if self.peek().sym != Sym::Semi {
            return Err(self.expected("`|` or `;`"));
        }
        self.advance();
        Ok(Rule { name, definitions })
    }

    fn starts_part(sym: &Sym) -> bool {
        matches!(
            sym,
            Sym::Name(_) | Sym::Literal(_) | Sym::Pattern(_) | Sym::Epsilon | Sym::Dot | Sym::Open
        )
    }

    fn parts(&mut self) -> Result<Vec<Part>, GrammarError> {
        let mut parts = Vec::new();
        while Self::starts_part(&self.peek().sym) {
            parts.push(self.part()?);
        }
        Ok(parts)
    }

    fn part(&mut self) -> Result<Part, GrammarError> {
        let start = self.advance();
        let mut part = match start.sym {
            Sym::Name(name) => {
                let look_ahead = self.peek().sym == Sym::Bang;
                if look_ahead {
                    self.advance();
                }
                Part::Reference {
                    name,
                    look_ahead,
                    quantifier: Quantifier::One,
                }
            }
            Sym::Literal(text) => Part::literal(text),
            Sym::Pattern(text) => Part::pattern(text),
            Sym::Dot => Part::wildcard(),
            Sym::Epsilon => Part::epsilon(),
            Sym::Open => self.group()?,
            _ => unreachable!("starts_part guards part()"),
        };
        if self.peek().sym == Sym::Bang {
            return Err(GrammarError {
                line: self.peek().line,
                column: self.peek().column,
                message: "`!` may only follow a rule reference".into(),
            });
        }
        let quantifier = match self.peek().sym {
            Sym::Question => Quantifier::Optional,
            Sym::Star => Quantifier::ZeroOrMore,
            _ => Quantifier::One,
        };
        if quantifier != Quantifier::One {
            if matches!(
                part,
                Part::Terminal {
                    kind: TerminalKind::Epsilon,
                    ..
                }
            ) {
                return Err(GrammarError {
                    line: self.peek().line,
                    column: self.peek().column,
                    message: "`ε` cannot take a quantifier".into(),
                });
            }
            self.advance();
            part = part.with_quantifier(quantifier);
        }
        Ok(part)
    }

    fn group(&mut self) -> Result<Part, GrammarError> {
        let mut branches = vec![self.parts()?];
        while self.peek().sym == Sym::Bar {
            self.advance();
            branches.push(self.parts()?);
        }
        if self.peek().sym != Sym::Close {
            return Err(self.expected("`|` or `)`"));
        }
        if branches.iter().any(Vec::is_empty) {
            return Err(self.expected("a part inside the group"));
        }
        self.advance();
        if branches.len() == 1 {
            return Ok(Part::sequence(branches.pop().unwrap()));
        }
        let children = branches
            .into_iter()
            .map(|mut parts| {
                if parts.len() == 1 {
                    parts.pop().unwrap()
                } else {
                    Part::sequence(parts)
                }
            })
            .collect();
        Ok(Part::choice(children))
    }
}

/// Parses grammar source text. The first rule becomes the start rule.
pub fn parse_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let lexemes = Scanner::new(text).scan()?;
    Parser { lexemes, pos: 0 }.grammar()
}

fn write_part(out: &mut String, part: &Part) {
    match part {
        Part::Reference {
            name,
            look_ahead,
            quantifier,
        } => {
            out.push_str(name);
            if *look_ahead {
                out.push('!');
            }
            out.push_str(quantifier.suffix());
        }
        Part::Terminal { kind, quantifier } => {
            match kind {
                TerminalKind::Literal(text) => {
                    out.push('"');
                    for c in text.chars() {
                        if c == '"' || c == '\\' {
                            out.push('\\');
                        }
                        out.push(c);
                    }
                    out.push('"');
                }
                TerminalKind::Pattern(text) => {
                    out.push('/');
                    for c in text.chars() {
                        if c == '/' {
                            out.push('\\');
                        }
                        out.push(c);
                    }
                    out.push('/');
                }
                TerminalKind::Epsilon => out.push('ε'),
                TerminalKind::Wildcard => out.push('.'),
            }
            out.push_str(quantifier.suffix());
        }
        Part::Group {
            kind,
            children,
            quantifier,
        } => {
            out.push('(');
            match kind {
                GroupKind::Sequence => write_parts(out, children),
                GroupKind::Choice => {
                    for (i, child) in children.iter().enumerate() {
                        if i > 0 {
                            out.push_str(" | ");
                        }
                        match child {
                            Part::Group {
                                kind: GroupKind::Sequence,
                                children,
                                quantifier: Quantifier::One,
                            } if children.len() > 1 => write_parts(out, children),
                            other => write_part(out, other),
                        }
                    }
                }
            }
            out.push(')');
            out.push_str(quantifier.suffix());
        }
    }
}

fn write_parts(out: &mut String, parts: &[Part]) {
    for (i, part) in parts.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write_part(out, part);
    }
}

fn definition_text(definition: &Definition) -> String {
    let mut out = String::new();
    write_parts(&mut out, &definition.parts);
    out
}

/// Canonical form: one rule per line, `name ::= def | def ;`.
pub fn render_grammar(grammar: &Grammar) -> String {
    let mut out = String::new();
    for rule in &grammar.rules {
        let body = rule
            .definitions
            .iter()
            .map(definition_text)
            .collect::<Vec<_>>()
            .join(" | ");
        if body.is_empty() {
            let _ = writeln!(out, "{} ::= ;", rule.name);
        } else {
            let _ = writeln!(out, "{} ::= {} ;", rule.name, body);
        }
    }
    out
}

/// Aligned layout: names padded to a common width, one definition per
/// line for rules with several definitions, blank line between rules.
pub fn render_pretty(grammar: &Grammar) -> String {
    let width = grammar.rules.iter().map(|r| r.name.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (i, rule) in grammar.rules.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let pad = width - rule.name.chars().count();
        let head = format!("{}{} ::=", rule.name, " ".repeat(pad));
        if rule.definitions.len() == 1 {
            let body = definition_text(&rule.definitions[0]);
            let _ = writeln!(out, "{head} {body}{};", if body.is_empty() { "" } else { " " });
            continue;
        }
        let indent = " ".repeat(width + 3);
        for (j, definition) in rule.definitions.iter().enumerate() {
            let body = definition_text(definition);
            if j == 0 {
                let _ = writeln!(out, "{head} {body}");
            } else {
                let _ = writeln!(out, "{indent}| {body}");
            }
        }
        let _ = writeln!(out, "{indent};");
    }
    out
}
