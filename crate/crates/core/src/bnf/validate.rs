use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::{Grammar, Part, Quantifier, TerminalKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Location {
    pub rule: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub definition: Option<usize>,
    /// Index of the top-level part within the definition.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub part: Option<usize>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule `{}`", self.rule)?;
        if let Some(d) = self.definition {
            write!(f, ", definition {d}")?;
        }
        if let Some(p) = self.part {
            write!(f, ", part {p}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum FindingKind {
    DuplicateRule { name: String },
    UnresolvedReference { name: String },
    MissingStartRule { name: String },
    EmptyRule,
    EmptyDefinition,
    EmptyGroup,
    QuantifiedEpsilon,
    InvalidPattern { pattern: String, message: String },
    /// `!` on a reference that sits under `?`/`*`, or carries one itself.
    LookAheadUnderRepetition { name: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub location: Location,
    #[serde(flatten)]
    pub kind: FindingKind,
}

impl Finding {
    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match &self.kind {
            FindingKind::DuplicateRule { name } => format!("duplicate rule `{name}`"),
            FindingKind::UnresolvedReference { name } => format!("reference to undefined rule `{name}`"),
            FindingKind::MissingStartRule { name } => format!("start rule `{name}` is not defined"),
            FindingKind::EmptyRule => "rule has no definitions".into(),
            FindingKind::EmptyDefinition => "definition has no parts".into(),
            FindingKind::EmptyGroup => "group has no parts".into(),
            FindingKind::QuantifiedEpsilon => "`ε` carries a quantifier".into(),
            FindingKind::InvalidPattern { pattern, message } => {
                format!("invalid pattern /{pattern}/: {message}")
            }
            FindingKind::LookAheadUnderRepetition { name } => {
                format!("look-ahead on `{name}` inside a repeated or optional context")
            }
        };
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{level}: {}: {what}", self.location)
    }
}

/// Structural checks. Errors make the grammar unusable for analysis and
/// parsing; warnings flag constructs whose behaviour is implementation-defined.
pub fn validate(grammar: &Grammar) -> Vec<Finding> {
    let mut findings = Vec::new();
    let names: HashSet<&str> = grammar.rules.iter().map(|r| r.name.as_str()).collect();
    let mut seen = HashSet::new();

    let error = |location: Location, kind| Finding {
        severity: Severity::Error,
        location,
        kind,
    };

    if grammar.rule(&grammar.start).is_none() {
        findings.push(error(
            Location {
                rule: grammar.start.clone(),
                definition: None,
                part: None,
            },
            FindingKind::MissingStartRule {
                name: grammar.start.clone(),
            },
        ));
    }

    for rule in &grammar.rules {
        let at_rule = Location {
            rule: rule.name.clone(),
            definition: None,
            part: None,
        };
        if !seen.insert(rule.name.as_str()) {
            findings.push(error(
                at_rule.clone(),
                FindingKind::DuplicateRule {
                    name: rule.name.clone(),
                },
            ));
        }
        if rule.definitions.is_empty() {
            findings.push(error(at_rule.clone(), FindingKind::EmptyRule));
        }
        for (d, definition) in rule.definitions.iter().enumerate() {
            if definition.parts.is_empty() {
                findings.push(error(
                    Location {
                        definition: Some(d),
                        ..at_rule.clone()
                    },
                    FindingKind::EmptyDefinition,
                ));
            }
            for (p, part) in definition.parts.iter().enumerate() {
                let location = Location {
                    rule: rule.name.clone(),
                    definition: Some(d),
                    part: Some(p),
                };
                check_part(part, false, &names, &location, &mut findings);
            }
        }
    }
    findings
}

fn check_part(
    part: &Part,
    repeated: bool,
    names: &HashSet<&str>,
    location: &Location,
    findings: &mut Vec<Finding>,
) {
    let mut push = |severity, kind| {
        findings.push(Finding {
            severity,
            location: location.clone(),
            kind,
        })
    };
    match part {
        Part::Reference {
            name,
            look_ahead,
            quantifier,
        } => {
            if !names.contains(name.as_str()) {
                push(Severity::Error, FindingKind::UnresolvedReference { name: name.clone() });
            }
            if *look_ahead && (repeated || *quantifier != Quantifier::One) {
                push(
                    Severity::Warning,
                    FindingKind::LookAheadUnderRepetition { name: name.clone() },
                );
            }
        }
        Part::Terminal { kind, quantifier } => match kind {
            TerminalKind::Epsilon if *quantifier != Quantifier::One => {
                push(Severity::Error, FindingKind::QuantifiedEpsilon)
            }
            TerminalKind::Pattern(pattern) => {
                if let Err(e) = regex::Regex::new(pattern) {
                    push(
                        Severity::Error,
                        FindingKind::InvalidPattern {
                            pattern: pattern.clone(),
                            message: e.to_string(),
                        },
                    );
                }
            }
            _ => {}
        },
        Part::Group {
            children,
            quantifier,
            ..
        } => {
            if children.is_empty() {
                push(Severity::Error, FindingKind::EmptyGroup);
            }
            let repeated = repeated || *quantifier != Quantifier::One;
            for child in children {
                check_part(child, repeated, names, location, findings);
            }
        }
    }
}
