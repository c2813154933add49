//! Selective left-recursion elimination.
//!
//! Every directly or indirectly left recursive definition found by
//! [`analyze`] leads with a reference to some rule `P`. For each such `P`:
//!
//! * `P_`, the reduced rule, receives the definitions of `P` that cannot lead
//!   back to `P`, in their original order. `P` keeps the rest and gains a
//!   final definition consisting of a lone `P_` reference.
//! * `P~`, the repeated rule, receives the tail of each left recursive
//!   definition pointing at `P`: its parts after the leading reference.
//! * Each left recursive definition pointing at `P` becomes
//!   `P_ <tail> P~*`, the `P_` reference inheriting any `!` of the reference
//!   it replaces.
//!
//! Nothing else in the grammar changes, and no `ε` parts are introduced.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{analyze, classify_definition, leftmost_references, AnalysisReport, DefinitionId, RecursionKind};
use crate::bnf::{Definition, Grammar, Part, Quantifier, Rule};

pub fn reduced_rule_name(name: &str) -> String {
    format!("{name}_")
}

pub fn repeated_rule_name(name: &str) -> String {
    format!("{name}~")
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "error", rename_all = "PascalCase")]
pub enum RewriteErrorKind {
    #[error("unary directly left recursive definition {definition}")]
    UnaryDirectlyLeftRecursive { definition: DefinitionId },
    #[error("directly left recursive rule `{rule}` has no sibling non-left recursive definitions")]
    DirectNoNonLeftRecursiveSiblings { rule: String },
    #[error("unary indirectly left recursive definition {definition}")]
    UnaryIndirectlyLeftRecursive { definition: DefinitionId },
    #[error("implicitly left recursive rule `{rule}` has no sibling non-left recursive definitions")]
    ImplicitNoNonLeftRecursiveSiblings { rule: String },
    #[error("complex left recursive definition {definition}")]
    ComplexLeftRecursiveDefinition { definition: DefinitionId },
}

impl RewriteErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            RewriteErrorKind::UnaryDirectlyLeftRecursive { .. } => "UnaryDirectlyLeftRecursive",
            RewriteErrorKind::DirectNoNonLeftRecursiveSiblings { .. } => "DirectNoNonLeftRecursiveSiblings",
            RewriteErrorKind::UnaryIndirectlyLeftRecursive { .. } => "UnaryIndirectlyLeftRecursive",
            RewriteErrorKind::ImplicitNoNonLeftRecursiveSiblings { .. } => "ImplicitNoNonLeftRecursiveSiblings",
            RewriteErrorKind::ComplexLeftRecursiveDefinition { .. } => "ComplexLeftRecursiveDefinition",
        }
    }
}

/// A rewrite failure together with the analysis that led to it.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind}")]
pub struct RewriteError {
    pub kind: RewriteErrorKind,
    pub report: Box<AnalysisReport>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Reduced,
    Repeated,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Origin {
    pub original: String,
    pub role: Role,
}

/// Generated rule name to the rule it was derived from.
pub type Provenance = BTreeMap<String, Origin>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteOutcome {
    pub grammar: Grammar,
    pub provenance: Provenance,
    pub report: AnalysisReport,
}

impl fmt::Display for RewriteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.grammar.fmt(f)
    }
}

/// A left recursive definition to rewrite and the rule it leads with.
#[derive(Clone, Debug)]
struct Target {
    id: DefinitionId,
    points_to: String,
    direct: bool,
}

/// Rules reachable from `start` through leading references of left
/// recursive definitions.
fn leftmost_closure<'g>(grammar: &'g Grammar, start: &'g Definition) -> HashSet<&'g str> {
    let mut seen = HashSet::new();
    let mut work: Vec<&str> = leftmost_references(&start.parts);
    while let Some(name) = work.pop() {
        if !seen.insert(name) {
            continue;
        }
        if let Some(rule) = grammar.rule(name) {
            for definition in &rule.definitions {
                work.extend(leftmost_references(&definition.parts));
            }
        }
    }
    seen
}

fn fresh_name(base: &str, suffix: char, taken: &HashSet<String>) -> String {
    let mut name = format!("{base}{suffix}");
    while taken.contains(&name) {
        name.push(suffix);
    }
    name
}

fn definition<'g>(grammar: &'g Grammar, id: &DefinitionId) -> &'g Definition {
    &grammar.rule(&id.rule).expect("analysed rule").definitions[id.definition]
}

/// The leading reference of a simple left recursive definition: a plain
/// rule reference as the first part and no groups anywhere.
fn leading_reference(definition: &Definition) -> Option<(&str, bool)> {
    if definition.contains_group() {
        return None;
    }
    match definition.parts.first()? {
        Part::Reference {
            name,
            look_ahead,
            quantifier: Quantifier::One,
        } => Some((name, *look_ahead)),
        _ => None,
    }
}

pub fn eliminate_left_recursion(grammar: &Grammar) -> Result<RewriteOutcome, RewriteError> {
    let report = analyze(grammar);
    let fail = |kind| RewriteError {
        kind,
        report: Box::new(report.clone()),
    };

    let mut targets = Vec::new();
    for id in &report.encountered {
        let def = definition(grammar, id);
        let direct = report.kind_of(id) == Some(RecursionKind::DirectlyLeftRecursive);
        let Some((points_to, _)) = leading_reference(def) else {
            return Err(fail(RewriteErrorKind::ComplexLeftRecursiveDefinition { definition: id.clone() }));
        };
        if direct && points_to != id.rule {
            return Err(fail(RewriteErrorKind::ComplexLeftRecursiveDefinition { definition: id.clone() }));
        }
        if def.parts.len() == 1 {
            return Err(fail(if direct {
                RewriteErrorKind::UnaryDirectlyLeftRecursive { definition: id.clone() }
            } else {
                RewriteErrorKind::UnaryIndirectlyLeftRecursive { definition: id.clone() }
            }));
        }
        targets.push(Target {
            id: id.clone(),
            points_to: points_to.to_string(),
            direct,
        });
    }

    // Rules to split, in grammar order. Generated rules are appended in the
    // same order, independent of the order the traversal met them.
    let mut split_order: Vec<&str> = Vec::new();
    for target in &targets {
        if !split_order.contains(&target.points_to.as_str()) {
            split_order.push(&target.points_to);
        }
    }
    split_order.sort_by_key(|name| grammar.rule_index(name));

    let mut taken: HashSet<String> = grammar.rules.iter().map(|r| r.name.clone()).collect();
    let mut provenance = Provenance::new();
    let mut names: HashMap<&str, (String, String)> = HashMap::new();
    // For each split rule, which definitions stay behind.
    let mut kept: HashMap<&str, Vec<bool>> = HashMap::new();

    for &rule_name in &split_order {
        let rule = grammar.rule(rule_name).expect("targets point at existing rules");
        let first_direct = targets.iter().find(|t| t.points_to == rule_name).is_some_and(|t| t.direct);
        let mut stays = Vec::with_capacity(rule.definitions.len());
        for (i, def) in rule.definitions.iter().enumerate() {
            let left_recursive = classify_definition(def, rule_name).is_left_recursive();
            if left_recursive && def.contains_group() {
                return Err(fail(RewriteErrorKind::ComplexLeftRecursiveDefinition {
                    definition: DefinitionId::new(rule_name, i),
                }));
            }
            stays.push(left_recursive && leftmost_closure(grammar, def).contains(rule_name));
        }
        if stays.iter().all(|&s| s) {
            return Err(fail(if first_direct {
                RewriteErrorKind::DirectNoNonLeftRecursiveSiblings { rule: rule_name.to_string() }
            } else {
                RewriteErrorKind::ImplicitNoNonLeftRecursiveSiblings { rule: rule_name.to_string() }
            }));
        }
        kept.insert(rule_name, stays);

        let reduced = fresh_name(rule_name, '_', &taken);
        taken.insert(reduced.clone());
        let repeated = fresh_name(rule_name, '~', &taken);
        taken.insert(repeated.clone());
        for (name, role) in [(&reduced, Role::Reduced), (&repeated, Role::Repeated)] {
            provenance.insert(
                name.clone(),
                Origin {
                    original: rule_name.to_string(),
                    role,
                },
            );
        }
        names.insert(rule_name, (reduced, repeated));
    }

    let rewritten: HashMap<&DefinitionId, &Target> = targets.iter().map(|t| (&t.id, t)).collect();
    let rewrite_definition = |id: &DefinitionId, def: &Definition| -> Definition {
        let Some(target) = rewritten.get(id) else {
            return def.clone();
        };
        let (reduced, repeated) = &names[target.points_to.as_str()];
        let look_ahead = leading_reference(def).is_some_and(|(_, l)| l);
        let mut parts = Vec::with_capacity(def.parts.len() + 1);
        parts.push(Part::Reference {
            name: reduced.clone(),
            look_ahead,
            quantifier: Quantifier::One,
        });
        parts.extend(def.parts[1..].iter().cloned());
        parts.push(Part::reference(repeated.clone()).with_quantifier(Quantifier::ZeroOrMore));
        Definition::new(parts)
    };

    let mut rules = Vec::with_capacity(grammar.rules.len() + 2 * split_order.len());
    let mut reduced_rules: HashMap<&str, Vec<Definition>> = HashMap::new();
    for rule in &grammar.rules {
        let stays = kept.get(rule.name.as_str());
        let mut definitions = Vec::new();
        for (i, def) in rule.definitions.iter().enumerate() {
            let new = rewrite_definition(&DefinitionId::new(rule.name.clone(), i), def);
            match stays {
                Some(stays) if !stays[i] => reduced_rules.entry(&rule.name).or_default().push(new),
                _ => definitions.push(new),
            }
        }
        if stays.is_some() {
            let (reduced, _) = &names[rule.name.as_str()];
            definitions.push(Definition::new(vec![Part::reference(reduced.clone())]));
        }
        rules.push(Rule::new(rule.name.clone(), definitions));
    }

    for &rule_name in &split_order {
        let (reduced, repeated) = &names[rule_name];
        rules.push(Rule::new(reduced.clone(), reduced_rules.remove(rule_name).unwrap_or_default()));
        // Direct tails in definition order, then indirect tails in the order
        // their cycles were found.
        let pointing: Vec<&Target> = targets.iter().filter(|t| t.points_to == rule_name).collect();
        let mut direct: Vec<&&Target> = pointing.iter().filter(|t| t.direct).collect();
        direct.sort_by_key(|t| t.id.definition);
        let tails = direct
            .into_iter()
            .chain(pointing.iter().filter(|t| !t.direct))
            .map(|t| Definition::new(definition(grammar, &t.id).parts[1..].to_vec()))
            .collect();
        rules.push(Rule::new(repeated.clone(), tails));
    }

    Ok(RewriteOutcome {
        grammar: Grammar {
            rules,
            start: grammar.start.clone(),
        },
        provenance,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::has_left_recursion;
    use crate::bnf::parse_grammar;

    fn rewrite(source: &str) -> Result<Grammar, RewriteErrorKind> {
        eliminate_left_recursion(&parse_grammar(source).unwrap())
            .map(|o| o.grammar)
            .map_err(|e| e.kind)
    }

    fn grammar(source: &str) -> Grammar {
        parse_grammar(source).unwrap()
    }

    #[test]
    fn names() {
        assert_eq!(reduced_rule_name("L"), "L_");
        assert_eq!(repeated_rule_name("expression"), "expression~");
        assert_eq!(reduced_rule_name("L_"), "L__");
    }

    #[test]
    fn direct_with_look_ahead() {
        let out = rewrite(r#"L ::= L! "c" | "a" | L "d" | "a" "b" ;"#).unwrap();
        let expected = grammar(
            r#"L  ::= L_! "c" L~* | L_ "d" L~* | L_ ;
               L_ ::= "a" | "a" "b" ;
               L~ ::= "c" | "d" ;"#,
        );
        assert_eq!(out, expected);
        assert!(!has_left_recursion(&out));
    }

    #[test]
    fn unary_implicit_is_allowed() {
        let out = rewrite(r#"C ::= D | "f" ; D ::= C "e" ;"#).unwrap();
        let expected = grammar(r#"C ::= D | C_ ; D ::= C_ "e" C~* ; C~ ::= "e" ; C_ ::= "f" ;"#);
        assert!(out.same_rules(&expected), "{out}");
    }

    #[test]
    fn special_cases() {
        assert_eq!(
            rewrite(r#"C ::= C | "e" ;"#),
            Err(RewriteErrorKind::UnaryDirectlyLeftRecursive {
                definition: DefinitionId::new("C", 0)
            })
        );
        assert_eq!(
            rewrite(r#"C ::= C "a" ;"#),
            Err(RewriteErrorKind::DirectNoNonLeftRecursiveSiblings { rule: "C".into() })
        );
        assert_eq!(
            rewrite(r#"C ::= D "e" | "f" ; D ::= C ;"#),
            Err(RewriteErrorKind::UnaryIndirectlyLeftRecursive {
                definition: DefinitionId::new("D", 0)
            })
        );
        assert_eq!(
            rewrite(r#"C ::= D "a" ; D ::= C "b" ;"#),
            Err(RewriteErrorKind::ImplicitNoNonLeftRecursiveSiblings { rule: "C".into() })
        );
        assert_eq!(
            rewrite(r#"D ::= ( D | ( "a" E ) ) "d" | "x" ; E ::= "e" ;"#),
            Err(RewriteErrorKind::ComplexLeftRecursiveDefinition {
                definition: DefinitionId::new("D", 0)
            })
        );
    }

    #[test]
    fn quantified_leading_reference_is_complex() {
        assert!(matches!(
            rewrite(r#"S ::= S* "x" | "y" ;"#),
            Err(RewriteErrorKind::ComplexLeftRecursiveDefinition { .. })
        ));
        assert!(matches!(
            rewrite(r#"S ::= "q"? S "x" | "y" ;"#),
            Err(RewriteErrorKind::ComplexLeftRecursiveDefinition { .. })
        ));
    }

    #[test]
    fn no_left_recursion_is_identity() {
        let g = grammar(r#"S ::= "a" S | "b" T ; T ::= "t" ;"#);
        let out = eliminate_left_recursion(&g).unwrap();
        assert_eq!(out.grammar, g);
        assert!(out.provenance.is_empty());
    }

    #[test]
    fn name_collisions() {
        let out = rewrite(r#"L ::= L "x" | L_ ; L_ ::= "a" ;"#).unwrap();
        let expected = grammar(
            r#"L ::= L__ "x" L~* | L__ ; L_ ::= "a" ; L__ ::= L_ ; L~ ::= "x" ;"#,
        );
        assert_eq!(out, expected);
    }

    #[test]
    fn provenance_roles() {
        let out = eliminate_left_recursion(&grammar(r#"L ::= L "x" | "a" ;"#)).unwrap();
        assert_eq!(
            out.provenance["L_"],
            Origin {
                original: "L".into(),
                role: Role::Reduced
            }
        );
        assert_eq!(out.provenance["L~"].role, Role::Repeated);
    }

    #[test]
    fn shared_implicit_definition() {
        let out = rewrite(r#"P ::= Q | "a" ; Q ::= P "x" | P "y" ;"#).unwrap();
        let expected = grammar(
            r#"P ::= Q | P_ ; Q ::= P_ "x" P~* | P_ "y" P~* ; P_ ::= "a" ; P~ ::= "x" | "y" ;"#,
        );
        assert_eq!(out, expected);
        assert!(!has_left_recursion(&out));
    }

    #[test]
    fn direct_and_indirect_on_one_rule() {
        let out = rewrite(r#"R ::= R "x" | S "y" | "a" ; S ::= R "z" ;"#).unwrap();
        assert!(!has_left_recursion(&out), "{out}");
        let expected = grammar(
            r#"R ::= R_ "x" R~* | S "y" | R_ ; S ::= R_ "z" R~* ; R_ ::= "a" ; R~ ::= "x" | "z" ;"#,
        );
        assert_eq!(out, expected);
    }
}
