//! The grammar model: rules, definitions and parts.
//!
//! A grammar is an ordered list of rules. Each rule has one or more
//! definitions which the parser tries in order, and each definition is a
//! sequence of parts. Parts are rule references, terminals or parenthesised
//! groups, and most of them can carry a `?` or `*` quantifier. Only rule
//! references can carry the `!` look-ahead modifier.

mod text;
mod validate;

use std::fmt;

pub use text::{parse_grammar, render_grammar, render_pretty, GrammarError};
pub use validate::{validate, Finding, FindingKind, Location, Severity};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Quantifier {
    #[default]
    One,
    Optional,
    ZeroOrMore,
}

impl Quantifier {
    pub fn suffix(self) -> &'static str {
        match self {
            Quantifier::One => "",
            Quantifier::Optional => "?",
            Quantifier::ZeroOrMore => "*",
        }
    }

    /// True when a part with this quantifier may execute without consuming.
    pub fn may_skip(self) -> bool {
        self != Quantifier::One
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TerminalKind {
    Literal(String),
    /// Regular expression matched against the whole token value.
    Pattern(String),
    Epsilon,
    Wildcard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Sequence,
    Choice,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Part {
    Reference {
        name: String,
        look_ahead: bool,
        quantifier: Quantifier,
    },
    Terminal {
        kind: TerminalKind,
        quantifier: Quantifier,
    },
    Group {
        kind: GroupKind,
        children: Vec<Part>,
        quantifier: Quantifier,
    },
}

impl Part {
    pub fn reference(name: impl Into<String>) -> Part {
        Part::Reference {
            name: name.into(),
            look_ahead: false,
            quantifier: Quantifier::One,
        }
    }

    pub fn look_ahead(name: impl Into<String>) -> Part {
        Part::Reference {
            name: name.into(),
            look_ahead: true,
            quantifier: Quantifier::One,
        }
    }

    pub fn literal(text: impl Into<String>) -> Part {
        Part::terminal(TerminalKind::Literal(text.into()))
    }

    pub fn pattern(regex: impl Into<String>) -> Part {
        Part::terminal(TerminalKind::Pattern(regex.into()))
    }

    pub fn epsilon() -> Part {
        Part::terminal(TerminalKind::Epsilon)
    }

    pub fn wildcard() -> Part {
        Part::terminal(TerminalKind::Wildcard)
    }

    pub fn terminal(kind: TerminalKind) -> Part {
        Part::Terminal {
            kind,
            quantifier: Quantifier::One,
        }
    }

    pub fn sequence(children: Vec<Part>) -> Part {
        Part::Group {
            kind: GroupKind::Sequence,
            children,
            quantifier: Quantifier::One,
        }
    }

    pub fn choice(children: Vec<Part>) -> Part {
        Part::Group {
            kind: GroupKind::Choice,
            children,
            quantifier: Quantifier::One,
        }
    }

    /// Returns the part with its quantifier replaced.
    pub fn with_quantifier(mut self, q: Quantifier) -> Part {
        match &mut self {
            Part::Reference { quantifier, .. }
            | Part::Terminal { quantifier, .. }
            | Part::Group { quantifier, .. } => *quantifier = q,
        }
        self
    }

    pub fn quantifier(&self) -> Quantifier {
        match self {
            Part::Reference { quantifier, .. }
            | Part::Terminal { quantifier, .. }
            | Part::Group { quantifier, .. } => *quantifier,
        }
    }

    pub fn is_group(&self) -> bool {
        matches!(self, Part::Group { .. })
    }

    pub fn referenced_name(&self) -> Option<&str> {
        match self {
            Part::Reference { name, .. } => Some(name),
            _ => None,
        }
    }

    /// Visits this part and every part nested inside it, depth first.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Part)) {
        f(self);
        if let Part::Group { children, .. } = self {
            for child in children {
                child.walk(f);
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Definition {
    pub parts: Vec<Part>,
}

impl Definition {
    pub fn new(parts: Vec<Part>) -> Self {
        Definition { parts }
    }

    /// Rule names referenced anywhere in the definition, left to right.
    pub fn references(&self) -> Vec<&str> {
        let mut names = Vec::new();
        for part in &self.parts {
            part.walk(&mut |p| {
                if let Part::Reference { name, .. } = p {
                    names.push(name.as_str());
                }
            });
        }
        names
    }

    pub fn contains_group(&self) -> bool {
        self.parts.iter().any(Part::is_group)
    }

    pub fn contains_epsilon(&self) -> bool {
        let mut found = false;
        for part in &self.parts {
            part.walk(&mut |p| {
                if matches!(
                    p,
                    Part::Terminal {
                        kind: TerminalKind::Epsilon,
                        ..
                    }
                ) {
                    found = true;
                }
            });
        }
        found
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub name: String,
    pub definitions: Vec<Definition>,
}

impl Rule {
    pub fn new(name: impl Into<String>, definitions: Vec<Definition>) -> Self {
        Rule {
            name: name.into(),
            definitions,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grammar {
    pub rules: Vec<Rule>,
    /// Name of the rule parsing starts from. The first rule unless overridden.
    pub start: String,
}

impl Grammar {
    pub fn new(rules: Vec<Rule>) -> Self {
        let start = rules.first().map(|r| r.name.clone()).unwrap_or_default();
        Grammar { rules, start }
    }

    pub fn with_start(mut self, start: impl Into<String>) -> Self {
        self.start = start.into();
        self
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn rule_index(&self, name: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.name == name)
    }

    pub fn start_rule(&self) -> Option<&Rule> {
        self.rule(&self.start)
    }

    pub fn contains_epsilon(&self) -> bool {
        self.rules
            .iter()
            .flat_map(|r| &r.definitions)
            .any(Definition::contains_epsilon)
    }

    /// Structural equality that ignores the order of rules (but not the
    /// order of definitions or parts).
    pub fn same_rules(&self, other: &Grammar) -> bool {
        self.start == other.start
            && self.rules.len() == other.rules.len()
            && self
                .rules
                .iter()
                .all(|r| other.rule(&r.name).is_some_and(|o| o == r))
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_grammar(self))
    }
}

impl std::str::FromStr for Grammar {
    type Err = GrammarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_grammar(s)
    }
}
