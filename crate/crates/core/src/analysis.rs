//! Recursion classification and left-recursive cycle discovery.
//!
//! Definitions are classified on their own first: a definition is recursive
//! if it references a rule, left recursive if a rule reference can be reached
//! before any terminal part, and directly left recursive if one of those
//! leading references names its own rule.
//!
//! Cycles are then discovered by walking the definition graph depth first,
//! starting at the start rule and following references left to right. Only
//! definitions reachable that way are classified at all. Along leftmost
//! edges the walk keeps a stack of the left recursive definitions it is
//! inside; reaching a definition already on the stack closes a cycle. The
//! definition on the stack is implicitly left recursive, the one that closed
//! the cycle is indirectly left recursive and is treated as removed, so it is
//! never walked again.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bnf::{Definition, Grammar, GroupKind, Part, Quantifier, TerminalKind};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DefinitionId {
    pub rule: String,
    pub definition: usize,
}

impl DefinitionId {
    pub fn new(rule: impl Into<String>, definition: usize) -> Self {
        DefinitionId {
            rule: rule.into(),
            definition,
        }
    }
}

impl fmt::Display for DefinitionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.rule, self.definition)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RecursionKind {
    NonRecursive,
    Recursive,
    LeftRecursive,
    DirectlyLeftRecursive,
    IndirectlyLeftRecursive,
    ImplicitlyLeftRecursive,
}

impl RecursionKind {
    pub fn is_left_recursive(self) -> bool {
        !matches!(self, RecursionKind::NonRecursive | RecursionKind::Recursive)
    }

    /// Directly or indirectly left recursive: the kinds that get rewritten.
    pub fn needs_rewrite(self) -> bool {
        matches!(
            self,
            RecursionKind::DirectlyLeftRecursive | RecursionKind::IndirectlyLeftRecursive
        )
    }

    pub fn describe(self) -> &'static str {
        match self {
            RecursionKind::NonRecursive => "non-recursive",
            RecursionKind::Recursive => "recursive",
            RecursionKind::LeftRecursive => "left recursive",
            RecursionKind::DirectlyLeftRecursive => "directly left recursive",
            RecursionKind::IndirectlyLeftRecursive => "indirectly left recursive",
            RecursionKind::ImplicitlyLeftRecursive => "implicitly left recursive",
        }
    }
}

/// A chain of left recursive definitions, each leading with a reference to
/// the next one's rule and the last leading back to the first's rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeftRecursiveCycle {
    pub members: Vec<DefinitionId>,
}

impl LeftRecursiveCycle {
    /// The implicitly left recursive member, met first by the traversal.
    pub fn first(&self) -> &DefinitionId {
        &self.members[0]
    }

    /// The indirectly left recursive member, which closed the cycle.
    pub fn last(&self) -> &DefinitionId {
        self.members.last().expect("cycles are never empty")
    }

    /// The rule the indirectly left recursive member leads back to.
    pub fn entry_rule(&self) -> &str {
        &self.first().rule
    }

    /// Checks that every member leads with a reference to the next member's
    /// rule, wrapping around at the end.
    pub fn is_closed_in(&self, grammar: &Grammar) -> bool {
        let n = self.members.len();
        n > 0
            && (0..n).all(|i| {
                let next = &self.members[(i + 1) % n];
                definition(grammar, &self.members[i])
                    .is_some_and(|d| leftmost_references(&d.parts).contains(&next.rule.as_str()))
            })
    }
}

/// JSON has no structured map keys, so kinds travel as
/// `[{"rule": .., "definition": .., "kind": ..}]`.
mod kind_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        #[serde(flatten)]
        id: DefinitionId,
        kind: RecursionKind,
    }

    pub fn serialize<S: Serializer>(kinds: &BTreeMap<DefinitionId, RecursionKind>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(kinds.iter().map(|(id, kind)| Entry {
            id: id.clone(),
            kind: *kind,
        }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<DefinitionId, RecursionKind>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        Ok(entries.into_iter().map(|e| (e.id, e.kind)).collect())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    /// Kind of every definition reachable from the start rule.
    #[serde(with = "kind_list")]
    pub kinds: BTreeMap<DefinitionId, RecursionKind>,
    pub cycles: Vec<LeftRecursiveCycle>,
    pub reachable: BTreeSet<DefinitionId>,
    /// Directly and indirectly left recursive definitions in the order the
    /// traversal met them.
    pub encountered: Vec<DefinitionId>,
}

impl AnalysisReport {
    pub fn kind_of(&self, id: &DefinitionId) -> Option<RecursionKind> {
        self.kinds.get(id).copied()
    }

    pub fn has_left_recursion(&self) -> bool {
        self.kinds.values().any(|k| k.needs_rewrite())
    }

    pub fn definitions_of_kind(&self, kind: RecursionKind) -> impl Iterator<Item = &DefinitionId> {
        self.kinds.iter().filter(move |(_, k)| **k == kind).map(|(id, _)| id)
    }

    /// Human-readable summary, one line per left recursive definition.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        if !self.has_left_recursion() {
            out.push_str("no left recursion\n");
        }
        for id in &self.encountered {
            let kind = self.kinds[id];
            out.push_str(&format!("{id}: {}\n", kind.describe()));
        }
        for cycle in &self.cycles {
            let chain: Vec<String> = cycle.members.iter().map(ToString::to_string).collect();
            out.push_str(&format!("cycle: {} -> {}\n", chain.join(" -> "), cycle.first()));
        }
        out
    }
}

fn definition<'g>(grammar: &'g Grammar, id: &DefinitionId) -> Option<&'g Definition> {
    grammar.rule(&id.rule)?.definitions.get(id.definition)
}

/// Rule names that may be invoked before any token is consumed, left to
/// right. Skippable parts (`?`, `*`, `ε`) do not end the scan, and every
/// branch of a choice is scanned.
pub fn leftmost_references(parts: &[Part]) -> Vec<&str> {
    let mut out = Vec::new();
    scan_leftmost(parts, &mut out);
    out
}

/// Returns true when the scan hit a part that must execute first.
fn scan_leftmost<'a>(parts: &'a [Part], out: &mut Vec<&'a str>) -> bool {
    for part in parts {
        let stops = match part {
            Part::Reference { name, quantifier, .. } => {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
                *quantifier == Quantifier::One
            }
            Part::Terminal {
                kind: TerminalKind::Epsilon,
                ..
            } => false,
            Part::Terminal { quantifier, .. } => *quantifier == Quantifier::One,
            Part::Group {
                kind,
                children,
                quantifier,
            } => {
                let stops = match kind {
                    GroupKind::Sequence => scan_leftmost(children, out),
                    // Every alternative is scanned, even after one fails to stop.
                    GroupKind::Choice => {
                        let stopped: Vec<bool> =
                            children.iter().map(|c| scan_leftmost(std::slice::from_ref(c), out)).collect();
                        stopped.into_iter().all(|s| s)
                    }
                };
                stops && *quantifier == Quantifier::One
            }
        };
        if stops {
            return true;
        }
    }
    false
}

/// Classifies a definition on its own, without regard to cycles.
pub fn classify_definition(definition: &Definition, owning_rule: &str) -> RecursionKind {
    if definition.references().is_empty() {
        return RecursionKind::NonRecursive;
    }
    let leading = leftmost_references(&definition.parts);
    if leading.is_empty() {
        RecursionKind::Recursive
    } else if leading.contains(&owning_rule) {
        RecursionKind::DirectlyLeftRecursive
    } else {
        RecursionKind::LeftRecursive
    }
}

struct Walk<'g> {
    grammar: &'g Grammar,
    rules: HashMap<&'g str, usize>,
    kinds: HashMap<DefinitionId, RecursionKind>,
    stack: Vec<DefinitionId>,
    done: HashSet<DefinitionId>,
    indirect: HashSet<DefinitionId>,
    cycles: Vec<LeftRecursiveCycle>,
    encountered: Vec<DefinitionId>,
}

impl<'g> Walk<'g> {
    fn definitions_of(&self, rule: &str) -> impl Iterator<Item = (DefinitionId, &'g Definition)> + '_ {
        let rule = self.rules.get(rule).map(|&i| &self.grammar.rules[i]);
        rule.into_iter().flat_map(|r| {
            r.definitions
                .iter()
                .enumerate()
                .map(|(i, d)| (DefinitionId::new(r.name.clone(), i), d))
        })
    }

    fn visit(&mut self, id: DefinitionId, definition: &'g Definition) {
        let direct = self.kinds[&id] == RecursionKind::DirectlyLeftRecursive;
        if direct {
            self.encountered.push(id.clone());
        }
        self.stack.push(id.clone());
        for target in leftmost_references(&definition.parts) {
            let successors: Vec<_> = self
                .definitions_of(target)
                .filter(|(next, _)| self.kinds.get(next).is_some_and(|k| k.is_left_recursive()))
                .collect();
            for (next, next_definition) in successors {
                if let Some(at) = self.stack.iter().position(|s| *s == next) {
                    if !direct && next != id && !self.indirect.contains(&id) {
                        self.indirect.insert(id.clone());
                        self.encountered.push(id.clone());
                        self.cycles.push(LeftRecursiveCycle {
                            members: self.stack[at..].to_vec(),
                        });
                    }
                } else if !self.done.contains(&next) {
                    self.visit(next, next_definition);
                }
            }
        }
        self.stack.pop();
        self.done.insert(id);
    }
}

/// Definitions reachable from the start rule, in depth-first discovery order.
fn reachable_definitions(grammar: &Grammar) -> Vec<DefinitionId> {
    fn enter(grammar: &Grammar, name: &str, seen: &mut HashSet<String>, out: &mut Vec<DefinitionId>) {
        let Some(rule) = grammar.rule(name) else { return };
        if !seen.insert(rule.name.clone()) {
            return;
        }
        for (i, definition) in rule.definitions.iter().enumerate() {
            out.push(DefinitionId::new(rule.name.clone(), i));
            for reference in definition.references() {
                enter(grammar, reference, seen, out);
            }
        }
    }
    let mut out = Vec::new();
    enter(grammar, &grammar.start, &mut HashSet::new(), &mut out);
    out
}

pub fn analyze(grammar: &Grammar) -> AnalysisReport {
    let order = reachable_definitions(grammar);
    let mut walk = Walk {
        grammar,
        rules: grammar
            .rules
            .iter()
            .enumerate()
            .map(|(i, r)| (r.name.as_str(), i))
            .collect(),
        kinds: HashMap::new(),
        stack: Vec::new(),
        done: HashSet::new(),
        indirect: HashSet::new(),
        cycles: Vec::new(),
        encountered: Vec::new(),
    };
    for id in &order {
        let definition = definition(grammar, id).expect("reachable definitions exist");
        walk.kinds.insert(id.clone(), classify_definition(definition, &id.rule));
    }
    for id in &order {
        if walk.kinds[id].is_left_recursive() && !walk.done.contains(id) {
            let definition = definition(grammar, id).expect("reachable definitions exist");
            walk.visit(id.clone(), definition);
        }
    }

    let mut kinds = walk.kinds;
    for cycle in &walk.cycles {
        let first = kinds.get_mut(cycle.first()).expect("cycle members are classified");
        if *first == RecursionKind::LeftRecursive {
            *first = RecursionKind::ImplicitlyLeftRecursive;
        }
    }
    for cycle in &walk.cycles {
        kinds.insert(cycle.last().clone(), RecursionKind::IndirectlyLeftRecursive);
    }

    AnalysisReport {
        reachable: order.iter().cloned().collect(),
        kinds: kinds.into_iter().collect(),
        cycles: walk.cycles,
        encountered: walk.encountered,
    }
}

/// True when a directly or indirectly left recursive definition is reachable
/// from the start rule.
pub fn has_left_recursion(grammar: &Grammar) -> bool {
    analyze(grammar).has_left_recursion()
}
