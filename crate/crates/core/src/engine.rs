//! A deterministic backtracking top-down parser that executes a [`Grammar`]
//! directly.
//!
//! A rule tries its definitions in order and commits to the first one whose
//! parts all execute in sequence. Failure anywhere in a definition restores
//! the token position it started from. `?` and `*` are greedy and never give
//! back what they matched.
//!
//! A reference carrying `!` relaxes the commitment: each definition of the
//! referenced rule that executes is tried in turn until the remainder of the
//! enclosing sequence also executes. The enclosing sequence is the
//! definition, or the group, the reference appears in.

use std::collections::{BTreeSet, HashMap};

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::bnf::{Grammar, GroupKind, Part, Quantifier, Rule, TerminalKind};
use crate::lexer::{LexError, Lexicon, Token};

pub const DEFAULT_MAX_DEPTH: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParseOptions {
    /// Nested rule invocations allowed at a single token position.
    pub max_depth: usize,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ParseNode {
    Rule {
        name: String,
        definition: usize,
        children: Vec<ParseNode>,
    },
    Terminal(Token),
    Epsilon,
}

impl ParseNode {
    pub fn rule_name(&self) -> Option<&str> {
        match self {
            ParseNode::Rule { name, .. } => Some(name),
            _ => None,
        }
    }

    pub fn children(&self) -> &[ParseNode] {
        match self {
            ParseNode::Rule { children, .. } => children,
            _ => &[],
        }
    }

    /// Tokens at the leaves, left to right.
    pub fn frontier(&self) -> Vec<&Token> {
        self.descendants()
            .into_iter()
            .filter_map(|node| match node {
                ParseNode::Terminal(token) => Some(token),
                _ => None,
            })
            .collect()
    }

    /// Every node in the tree, parents before children.
    pub fn descendants(&self) -> Vec<&ParseNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            out.push(node);
            stack.extend(node.children().iter().rev());
        }
        out
    }
}

// Trees as deep as the input is long are normal for right-recursive rules,
// so dropping must not recurse.
impl Drop for ParseNode {
    fn drop(&mut self) {
        let ParseNode::Rule { children, .. } = self else {
            return;
        };
        let mut stack = std::mem::take(children);
        while let Some(mut node) = stack.pop() {
            if let ParseNode::Rule { children, .. } = &mut node {
                stack.append(children);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "camelCase")]
pub enum ParseResult {
    Success {
        tree: ParseNode,
    },
    #[serde(rename_all = "camelCase")]
    Failure {
        furthest_token_index: usize,
        expected: Vec<String>,
    },
    DepthExceeded {
        rule: String,
    },
}

impl ParseResult {
    pub fn is_success(&self) -> bool {
        matches!(self, ParseResult::Success { .. })
    }

    pub fn tree(&self) -> Option<&ParseNode> {
        match self {
            ParseResult::Success { tree } => Some(tree),
            _ => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ParseTextError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("invalid pattern /{pattern}/: {message}")]
    Pattern { pattern: String, message: String },
}

/// Raised out of the whole parse when the depth guard trips.
struct DepthExceeded(String);

type Step<T> = Result<Option<T>, DepthExceeded>;
type Matched = (Vec<ParseNode>, usize);

struct Engine<'a> {
    rules: &'a HashMap<&'a str, &'a Rule>,
    patterns: &'a HashMap<&'a str, Regex>,
    tokens: &'a [Token],
    max_depth: usize,
    /// Token position of the innermost rule invocation and how many
    /// invocations are stacked at it.
    depth: (usize, usize),
    furthest: usize,
    expected: BTreeSet<String>,
}

impl<'a> Engine<'a> {
    fn expect(&mut self, pos: usize, what: String) {
        if pos > self.furthest {
            self.furthest = pos;
            self.expected.clear();
        }
        if pos == self.furthest {
            self.expected.insert(what);
        }
    }

    fn match_terminal(&mut self, kind: &'a TerminalKind, pos: usize) -> Option<ParseNode> {
        if let TerminalKind::Epsilon = kind {
            return Some(ParseNode::Epsilon);
        }
        let token = self.tokens.get(pos);
        let matched = token.is_some_and(|t| match kind {
            TerminalKind::Literal(text) => t.value == *text,
            TerminalKind::Pattern(p) => self.patterns[p.as_str()].is_match(&t.value),
            TerminalKind::Wildcard => true,
            TerminalKind::Epsilon => unreachable!(),
        });
        if matched {
            return token.cloned().map(ParseNode::Terminal);
        }
        let what = match kind {
            TerminalKind::Literal(text) => format!("{text:?}"),
            TerminalKind::Pattern(p) => format!("/{p}/"),
            _ => "any token".to_string(),
        };
        self.expect(pos, what);
        None
    }

    fn execute_definition(&mut self, rule: &'a Rule, index: usize, pos: usize) -> Step<(ParseNode, usize)> {
        let saved = self.depth;
        let stacked = if saved.0 == pos { saved.1 + 1 } else { 1 };
        if stacked > self.max_depth {
            return Err(DepthExceeded(rule.name.clone()));
        }
        self.depth = (pos, stacked);
        let result = stacker::maybe_grow(64 * 1024, 2 * 1024 * 1024, || {
            self.sequence(&rule.definitions[index].parts, pos)
        });
        self.depth = saved;
        Ok(result?.map(|(children, end)| {
            let node = ParseNode::Rule {
                name: rule.name.clone(),
                definition: index,
                children,
            };
            (node, end)
        }))
    }

    fn call(&mut self, name: &str, pos: usize) -> Step<(ParseNode, usize)> {
        let rule = self.rules[name];
        for index in 0..rule.definitions.len() {
            if let Some(found) = self.execute_definition(rule, index, pos)? {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }

    /// Runs `parts` in order. A look-ahead reference at the head retries the
    /// referenced rule's definitions against the rest of `parts`.
    fn sequence(&mut self, parts: &'a [Part], pos: usize) -> Step<Matched> {
        let Some((head, rest)) = parts.split_first() else {
            return Ok(Some((Vec::new(), pos)));
        };
        if let Part::Reference {
            name,
            look_ahead: true,
            quantifier,
        } = head
        {
            let rule = self.rules[name.as_str()];
            for index in 0..rule.definitions.len() {
                let Some((node, next)) = self.execute_definition(rule, index, pos)? else {
                    continue;
                };
                // `R!*` continues with itself before the rest.
                let continuation = if *quantifier == Quantifier::ZeroOrMore {
                    if next == pos {
                        continue;
                    }
                    parts
                } else {
                    rest
                };
                if let Some((mut tail, end)) = self.sequence(continuation, next)? {
                    tail.insert(0, node);
                    return Ok(Some((tail, end)));
                }
            }
            return match quantifier {
                Quantifier::One => Ok(None),
                _ => self.sequence(rest, pos),
            };
        }
        let Some((mut nodes, next)) = self.part(head, pos)? else {
            return Ok(None);
        };
        Ok(self.sequence(rest, next)?.map(|(tail, end)| {
            nodes.extend(tail);
            (nodes, end)
        }))
    }

    /// Executes one part on its own, honouring its quantifier.
    fn part(&mut self, part: &'a Part, pos: usize) -> Step<Matched> {
        match part.quantifier() {
            Quantifier::One => self.once(part, pos),
            Quantifier::Optional => Ok(Some(self.once(part, pos)?.unwrap_or((Vec::new(), pos)))),
            Quantifier::ZeroOrMore => {
                let mut nodes = Vec::new();
                let mut at = pos;
                while let Some((more, next)) = self.once(part, at)? {
                    if next == at {
                        break;
                    }
                    nodes.extend(more);
                    at = next;
                }
                Ok(Some((nodes, at)))
            }
        }
    }

    fn once(&mut self, part: &'a Part, pos: usize) -> Step<Matched> {
        match part {
            Part::Terminal { kind, .. } => {
                let consumed = usize::from(!matches!(kind, TerminalKind::Epsilon));
                Ok(self.match_terminal(kind, pos).map(|node| (vec![node], pos + consumed)))
            }
            Part::Reference { name, .. } => Ok(self.call(name, pos)?.map(|(node, end)| (vec![node], end))),
            Part::Group {
                kind: GroupKind::Sequence,
                children,
                ..
            } => self.sequence(children, pos),
            Part::Group {
                kind: GroupKind::Choice,
                children,
                ..
            } => {
                for child in children {
                    if let Some(found) = self.sequence(std::slice::from_ref(child), pos)? {
                        return Ok(Some(found));
                    }
                }
                Ok(None)
            }
        }
    }
}

fn compile_patterns(grammar: &Grammar) -> Result<HashMap<&str, Regex>, ParseTextError> {
    let mut patterns = HashMap::new();
    for rule in &grammar.rules {
        for definition in &rule.definitions {
            for part in &definition.parts {
                let mut failure = None;
                part.walk(&mut |p| {
                    if let Part::Terminal {
                        kind: TerminalKind::Pattern(source),
                        ..
                    } = p
                    {
                        if patterns.contains_key(source.as_str()) || failure.is_some() {
                            return;
                        }
                        match Regex::new(&format!("^(?:{source})$")) {
                            Ok(regex) => {
                                patterns.insert(source.as_str(), regex);
                            }
                            Err(e) => failure = Some((source.clone(), e.to_string())),
                        }
                    }
                });
                if let Some((pattern, message)) = failure {
                    return Err(ParseTextError::Pattern { pattern, message });
                }
            }
        }
    }
    Ok(patterns)
}

/// A grammar with its patterns compiled, ready to parse any number of
/// token sequences.
///
/// The grammar must validate without errors; an unknown rule reference
/// panics.
pub struct Parser<'g> {
    grammar: &'g Grammar,
    rules: HashMap<&'g str, &'g Rule>,
    patterns: HashMap<&'g str, Regex>,
}

impl<'g> Parser<'g> {
    pub fn new(grammar: &'g Grammar) -> Result<Self, ParseTextError> {
        Ok(Parser {
            grammar,
            rules: grammar.rules.iter().map(|r| (r.name.as_str(), r)).collect(),
            patterns: compile_patterns(grammar)?,
        })
    }

    pub fn parse(&self, tokens: &[Token], options: ParseOptions) -> ParseResult {
        let mut engine = Engine {
            rules: &self.rules,
            patterns: &self.patterns,
            tokens,
            max_depth: options.max_depth.max(1),
            depth: (usize::MAX, 0),
            furthest: 0,
            expected: BTreeSet::new(),
        };
        match engine.call(&self.grammar.start, 0) {
            Err(DepthExceeded(rule)) => ParseResult::DepthExceeded { rule },
            Ok(Some((tree, end))) if end == tokens.len() => ParseResult::Success { tree },
            Ok(found) => {
                if let Some((_, end)) = found {
                    engine.expect(end, "end of input".to_string());
                }
                ParseResult::Failure {
                    furthest_token_index: engine.furthest,
                    expected: engine.expected.into_iter().collect(),
                }
            }
        }
    }
}

/// Parses `tokens` from the grammar's start rule.
pub fn try_parse(grammar: &Grammar, tokens: &[Token], options: ParseOptions) -> Result<ParseResult, ParseTextError> {
    Ok(Parser::new(grammar)?.parse(tokens, options))
}

/// Parses `tokens` from the grammar's start rule. Panics on an invalid
/// pattern; use [`try_parse`] for grammars that have not been validated.
pub fn parse(grammar: &Grammar, tokens: &[Token], options: ParseOptions) -> ParseResult {
    try_parse(grammar, tokens, options).expect("grammar patterns compile")
}

/// Tokenizes `text` with `lexicon`, then parses.
pub fn parse_text(
    grammar: &Grammar,
    text: &str,
    lexicon: &Lexicon,
    options: ParseOptions,
) -> Result<ParseResult, ParseTextError> {
    let tokens = lexicon.tokenize(text)?;
    try_parse(grammar, &tokens, options)
}
