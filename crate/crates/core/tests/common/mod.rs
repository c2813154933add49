//! Shared test support: a brute-force membership oracle for context-free
//! grammars and proptest strategies for random grammars.
#![allow(dead_code)]

use std::collections::HashMap;

use proptest::prelude::*;
use regex::Regex;
use unleft::bnf::{Definition, Grammar, GroupKind, Part, Quantifier, Rule, TerminalKind};

/// Decides membership by computing, for every rule and every start position,
/// the set of positions where a derivation of the rule can end. The table is
/// grown to a fixed point, so left recursion and ε are harmless. `!` is
/// ignored, `X?` is an alternative of `X` and nothing, and `X*` is the
/// closure of `X`. Position sets are bitmasks, so inputs are limited to 63
/// tokens.
pub struct CfgOracle<'g> {
    grammar: &'g Grammar,
    index: HashMap<&'g str, usize>,
    patterns: HashMap<&'g str, Regex>,
}

/// `table[rule][start]` is the set of end positions.
type Table = Vec<Vec<u64>>;

impl<'g> CfgOracle<'g> {
    pub fn new(grammar: &'g Grammar) -> Self {
        let mut patterns = HashMap::new();
        for rule in &grammar.rules {
            for definition in &rule.definitions {
                for part in &definition.parts {
                    part.walk(&mut |p| {
                        if let Part::Terminal {
                            kind: TerminalKind::Pattern(source),
                            ..
                        } = p
                        {
                            patterns
                                .entry(source.as_str())
                                .or_insert_with(|| Regex::new(&format!("^(?:{source})$")).unwrap());
                        }
                    });
                }
            }
        }
        let index = grammar.rules.iter().enumerate().map(|(i, r)| (r.name.as_str(), i)).collect();
        CfgOracle {
            grammar,
            index,
            patterns,
        }
    }

    pub fn accepts(&self, tokens: &[&str]) -> bool {
        let n = tokens.len();
        assert!(n < 64, "oracle inputs are limited to 63 tokens");
        let mut table: Table = vec![vec![0; n + 1]; self.grammar.rules.len()];
        loop {
            let mut changed = false;
            for (r, rule) in self.grammar.rules.iter().enumerate() {
                for i in 0..=n {
                    let mut ends = 0;
                    for definition in &rule.definitions {
                        ends |= self.sequence(&definition.parts, 1 << i, tokens, &table);
                    }
                    if ends & !table[r][i] != 0 {
                        table[r][i] |= ends;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        self.index
            .get(self.grammar.start.as_str())
            .is_some_and(|&r| table[r][0] & (1 << n) != 0)
    }

    fn sequence(&self, parts: &[Part], mut at: u64, tokens: &[&str], table: &Table) -> u64 {
        for part in parts {
            if at == 0 {
                break;
            }
            at = self.quantified(part, at, tokens, table);
        }
        at
    }

    fn quantified(&self, part: &Part, from: u64, tokens: &[&str], table: &Table) -> u64 {
        match part.quantifier() {
            Quantifier::One => self.once(part, from, tokens, table),
            Quantifier::Optional => self.once(part, from, tokens, table) | from,
            Quantifier::ZeroOrMore => {
                let mut out = from;
                let mut frontier = from;
                while frontier != 0 {
                    frontier = self.once(part, frontier, tokens, table) & !out;
                    out |= frontier;
                }
                out
            }
        }
    }

    fn once(&self, part: &Part, from: u64, tokens: &[&str], table: &Table) -> u64 {
        let positions = (0..=tokens.len()).filter(|p| from & (1 << p) != 0);
        match part {
            Part::Terminal {
                kind: TerminalKind::Epsilon,
                ..
            } => from,
            Part::Terminal { kind, .. } => positions
                .filter(|&p| {
                    p < tokens.len()
                        && match kind {
                            TerminalKind::Literal(text) => tokens[p] == text,
                            TerminalKind::Pattern(source) => self.patterns[source.as_str()].is_match(tokens[p]),
                            _ => true,
                        }
                })
                .fold(0, |out, p| out | 1 << (p + 1)),
            Part::Reference { name, .. } => {
                let spans = &table[self.index[name.as_str()]];
                positions.fold(0, |out, p| out | spans[p])
            }
            Part::Group {
                kind: GroupKind::Sequence,
                children,
                ..
            } => self.sequence(children, from, tokens, table),
            Part::Group {
                kind: GroupKind::Choice,
                children,
                ..
            } => children
                .iter()
                .fold(0, |out, child| out | self.quantified(child, from, tokens, table)),
        }
    }
}

/// Every sequence over `alphabet` of length at most `max_len`, shortest first.
pub fn sequences<'a>(alphabet: &[&'a str], max_len: usize) -> Vec<Vec<&'a str>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|prefix: &Vec<&str>| {
                alphabet.iter().map(move |&symbol| {
                    let mut next = prefix.clone();
                    next.push(symbol);
                    next
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

pub fn rule_names(count: usize) -> Vec<String> {
    (0..count).map(|i| format!("R{i}")).collect()
}

/// Any part the text format can express, nested at most `depth` deep.
pub fn any_part(names: Vec<String>, depth: u32) -> BoxedStrategy<Part> {
    let quantifier = prop_oneof![
        4 => Just(Quantifier::One),
        1 => Just(Quantifier::Optional),
        1 => Just(Quantifier::ZeroOrMore),
    ];
    let reference = (proptest::sample::select(names.clone()), any::<bool>(), quantifier.clone()).prop_map(
        |(name, look_ahead, q)| {
            let part = if look_ahead {
                Part::look_ahead(name)
            } else {
                Part::reference(name)
            };
            part.with_quantifier(q)
        },
    );
    let terminal = (
        prop_oneof![
            proptest::sample::select(vec!["a", "b", "+", "\"", "a\\b", "two words", "ε", "/"])
                .prop_map(|s| TerminalKind::Literal(s.to_string())),
            proptest::sample::select(vec![r"\d+", "[a-z]", "a/b", r"\w"]).prop_map(|s| TerminalKind::Pattern(s.to_string())),
            Just(TerminalKind::Wildcard),
        ],
        quantifier.clone(),
    )
        .prop_map(|(kind, q)| Part::terminal(kind).with_quantifier(q));
    let leaf = prop_oneof![
        4 => reference,
        4 => terminal,
        1 => Just(Part::epsilon()),
    ];
    if depth == 0 {
        return leaf.boxed();
    }
    let inner = any_part(names, depth - 1);
    let branch = prop_oneof![
        inner.clone(),
        proptest::collection::vec(inner.clone(), 2..4).prop_map(Part::sequence),
    ];
    let group = prop_oneof![
        (proptest::collection::vec(inner, 1..4), quantifier.clone())
            .prop_map(|(children, q)| Part::sequence(children).with_quantifier(q)),
        (proptest::collection::vec(branch, 2..4), quantifier)
            .prop_map(|(children, q)| Part::choice(children).with_quantifier(q)),
    ];
    prop_oneof![6 => leaf, 1 => group].boxed()
}

fn assemble(names: Vec<String>, bodies: Vec<Vec<Vec<Part>>>) -> Grammar {
    Grammar::new(
        names
            .into_iter()
            .zip(bodies)
            .map(|(name, definitions)| Rule::new(name, definitions.into_iter().map(Definition::new).collect()))
            .collect(),
    )
}

/// Puts a start rule `S ::= R0 R1 .. ;` in front so that every rule is
/// reachable.
fn reach_all(grammar: Grammar) -> Grammar {
    let start = Rule::new(
        "S",
        vec![Definition::new(
            grammar.rules.iter().map(|r| Part::reference(r.name.clone())).collect(),
        )],
    );
    Grammar::new(std::iter::once(start).chain(grammar.rules).collect())
}

/// Arbitrary grammars over the full modifier set, groups included.
pub fn any_grammar() -> impl Strategy<Value = Grammar> {
    (1usize..5).prop_flat_map(|count| {
        let names = rule_names(count);
        let definition = proptest::collection::vec(any_part(names.clone(), 2), 1..5);
        let rule = proptest::collection::vec(definition, 1..4);
        proptest::collection::vec(rule, count).prop_map(move |bodies| assemble(names.clone(), bodies))
    })
}

/// Flat grammars shaped to contain plenty of left recursion: the first part
/// of a definition is usually a reference, and there are no groups. Half of
/// them start at `R0`, the rest at a rule that reaches every other.
pub fn recursive_grammar(with_epsilon: bool) -> impl Strategy<Value = Grammar> {
    (flat_grammar(with_epsilon), any::<bool>()).prop_map(|(g, all)| if all { reach_all(g) } else { g })
}

fn flat_grammar(with_epsilon: bool) -> impl Strategy<Value = Grammar> {
    (1usize..5).prop_flat_map(move |count| {
        let names = rule_names(count);
        let reference = (proptest::sample::select(names.clone()), 0u8..10).prop_map(|(name, roll)| match roll {
            0 | 1 => Part::look_ahead(name),
            2 => Part::reference(name).with_quantifier(Quantifier::Optional),
            _ => Part::reference(name),
        });
        let literal = proptest::sample::select(vec!["a", "b", "c"]).prop_map(Part::literal);
        let tail_part = prop_oneof![
            3 => literal.clone(),
            2 => reference.clone(),
            1 => literal.clone().prop_map(|p| p.with_quantifier(Quantifier::ZeroOrMore)),
            if with_epsilon { 1 } else { 0 } => Just(Part::epsilon()),
        ];
        let definition = (
            prop_oneof![3 => reference, 2 => literal],
            proptest::collection::vec(tail_part, 0..3),
        )
            .prop_map(|(head, tail)| {
                let mut parts = vec![head];
                parts.extend(tail);
                parts
            });
        let rule = proptest::collection::vec(definition, 1..5);
        proptest::collection::vec(rule, count).prop_map(move |bodies| assemble(names.clone(), bodies))
    })
}

/// Grammars whose only left recursion is direct: a definition may lead with
/// its own rule or a later one, never an earlier one. Every rule is
/// reachable.
pub fn directly_recursive_grammar() -> impl Strategy<Value = Grammar> {
    (1usize..4).prop_flat_map(|count| {
        let names = rule_names(count);
        let rules: Vec<_> = (0..count)
            .map(|index| {
                let own = names[index].clone();
                let later: Vec<String> = names[index + 1..].to_vec();
                let literal = proptest::sample::select(vec!["a", "b", "c"]).prop_map(Part::literal);
                let recursive = (any::<bool>(), proptest::collection::vec(literal.clone(), 1..3)).prop_map(
                    move |(look_ahead, tail)| {
                        let head = if look_ahead {
                            Part::look_ahead(own.clone())
                        } else {
                            Part::reference(own.clone())
                        };
                        std::iter::once(head).chain(tail).collect::<Vec<_>>()
                    },
                );
                let head = if later.is_empty() {
                    literal.clone().boxed()
                } else {
                    prop_oneof![literal.clone(), proptest::sample::select(later).prop_map(Part::reference)].boxed()
                };
                let plain = (head, proptest::collection::vec(literal, 0..2)).prop_map(|(head, tail)| {
                    std::iter::once(head).chain(tail).collect::<Vec<_>>()
                });
                (
                    proptest::collection::vec(recursive, 0..3),
                    proptest::collection::vec(plain, 1..3),
                )
            })
            .collect();
        rules.prop_map(move |bodies| {
            let bodies = bodies
                .into_iter()
                .map(|(recursive, plain)| recursive.into_iter().chain(plain).collect())
                .collect();
            reach_all(assemble(names.clone(), bodies))
        })
    })
}

/// Interleaves two sequences, keeping the order within each, as directed by
/// `picks` (true takes from `left`).
pub fn interleave<T: Clone>(left: &[T], right: &[T], picks: &[bool]) -> Vec<T> {
    let (mut l, mut r) = (0, 0);
    let mut out = Vec::with_capacity(left.len() + right.len());
    let mut picks = picks.iter().copied().chain(std::iter::repeat(true));
    while l < left.len() || r < right.len() {
        let take_left = r == right.len() || (l < left.len() && picks.next().unwrap());
        if take_left {
            out.push(left[l].clone());
            l += 1;
        } else {
            out.push(right[r].clone());
            r += 1;
        }
    }
    out
}
