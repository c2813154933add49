//! Parse tree abridgement and rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bnf::Grammar;
use crate::engine::ParseNode;
use crate::lexer::Token;
use crate::rewrite::{Origin, Provenance, Role};

/// Generated rule names and the rules they stand in for.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AbridgementMap {
    pub entries: Provenance,
}

impl AbridgementMap {
    pub fn new(entries: Provenance) -> Self {
        AbridgementMap { entries }
    }

    /// Recovers the map from naming alone: a rule `X_` or `X~` (with any
    /// number of repeated suffixes) whose root name `X` is also a rule.
    /// Useful for grammars that were rewritten earlier and saved as text.
    pub fn infer(grammar: &Grammar) -> Self {
        let mut entries = BTreeMap::new();
        for rule in &grammar.rules {
            let name = &rule.name;
            let role = match name.chars().last() {
                Some('_') => Role::Reduced,
                Some('~') => Role::Repeated,
                _ => continue,
            };
            let root = name.trim_end_matches(['_', '~']);
            if !root.is_empty() && grammar.rule(root).is_some() {
                entries.insert(
                    name.clone(),
                    Origin {
                        original: root.to_string(),
                        role,
                    },
                );
            }
        }
        AbridgementMap { entries }
    }
}

impl From<Provenance> for AbridgementMap {
    fn from(entries: Provenance) -> Self {
        AbridgementMap { entries }
    }
}

/// Removes the traces of rewriting from a tree: repeated-rule nodes are
/// replaced by their children, reduced-rule nodes take the original rule's
/// name, and a node left with a single identically named child merges with
/// it.
pub fn abridge(tree: &ParseNode, map: &AbridgementMap) -> ParseNode {
    let mut out = abridge_into(tree, map);
    if out.len() == 1 {
        return out.pop().unwrap();
    }
    // A repeated node at the root has nowhere to splice into.
    match tree {
        ParseNode::Rule { name, definition, .. } => ParseNode::Rule {
            name: name.clone(),
            definition: *definition,
            children: out,
        },
        _ => unreachable!("only rule nodes splice"),
    }
}

fn abridge_into(node: &ParseNode, map: &AbridgementMap) -> Vec<ParseNode> {
    grow(|| abridge_node(node, map))
}

fn abridge_node(node: &ParseNode, map: &AbridgementMap) -> Vec<ParseNode> {
    let ParseNode::Rule {
        name,
        definition,
        children,
    } = node
    else {
        return vec![node.clone()];
    };
    let mut renamed_children = Vec::new();
    let mut new_children = Vec::new();
    for child in children {
        let renamed = child
            .rule_name()
            .and_then(|n| map.entries.get(n))
            .is_some_and(|o| o.role == Role::Reduced);
        for abridged in abridge_into(child, map) {
            renamed_children.push(renamed);
            new_children.push(abridged);
        }
    }
    let origin = map.entries.get(name.as_str());
    if origin.is_some_and(|o| o.role == Role::Repeated) {
        return new_children;
    }
    let name = match origin {
        Some(o) => o.original.clone(),
        None => name.clone(),
    };
    if new_children.len() == 1 && renamed_children[0] && new_children[0].rule_name() == Some(name.as_str()) {
        return new_children;
    }
    vec![ParseNode::Rule {
        name,
        definition: *definition,
        children: new_children,
    }]
}

fn grow<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(64 * 1024, 2 * 1024 * 1024, f)
}

fn label(node: &ParseNode) -> String {
    match node {
        ParseNode::Rule { name, .. } => name.clone(),
        ParseNode::Terminal(token) => format!("{:?}", token.value),
        ParseNode::Epsilon => "ε".to_string(),
    }
}

/// Indented tree drawing, one node per line.
pub fn render_ascii(tree: &ParseNode) -> String {
    fn walk(node: &ParseNode, prefix: &str, last: bool, root: bool, out: &mut String) {
        grow(|| walk_inner(node, prefix, last, root, out))
    }
    fn walk_inner(node: &ParseNode, prefix: &str, last: bool, root: bool, out: &mut String) {
        if root {
            let _ = writeln!(out, "{}", label(node));
        } else {
            let branch = if last { "└── " } else { "├── " };
            let _ = writeln!(out, "{prefix}{branch}{}", label(node));
        }
        let children = node.children();
        let next_prefix = if root {
            String::new()
        } else {
            format!("{prefix}{}", if last { "    " } else { "│   " })
        };
        for (i, child) in children.iter().enumerate() {
            walk(child, &next_prefix, i + 1 == children.len(), false, out);
        }
    }
    let mut out = String::new();
    walk(tree, "", true, true, &mut out);
    out
}

/// Graphviz digraph with one node per parse tree node.
pub fn render_dot(tree: &ParseNode) -> String {
    fn escape(text: &str) -> String {
        text.replace('\\', "\\\\").replace('"', "\\\"")
    }
    fn walk(node: &ParseNode, next_id: &mut usize, out: &mut String) -> usize {
        grow(|| walk_inner(node, next_id, out))
    }
    fn walk_inner(node: &ParseNode, next_id: &mut usize, out: &mut String) -> usize {
        let id = *next_id;
        *next_id += 1;
        let shape = match node {
            ParseNode::Rule { .. } => "box",
            _ => "plaintext",
        };
        let _ = writeln!(out, "  n{id} [label=\"{}\", shape={shape}];", escape(&label(node)));
        for child in node.children() {
            let child_id = walk(child, next_id, out);
            let _ = writeln!(out, "  n{id} -> n{child_id};");
        }
        id
    }
    let mut out = String::from("digraph parse_tree {\n  ordering=out;\n");
    walk(tree, &mut 0, &mut out);
    out.push_str("}\n");
    out
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NodeRepr {
    Rule {
        rule: String,
        definition: usize,
        children: Vec<NodeRepr>,
    },
    Terminal {
        token: String,
        index: usize,
        #[serde(default)]
        offset: usize,
    },
    Epsilon {
        epsilon: bool,
    },
}

impl From<&ParseNode> for NodeRepr {
    fn from(node: &ParseNode) -> Self {
        grow(|| match node {
            ParseNode::Rule {
                name,
                definition,
                children,
            } => NodeRepr::Rule {
                rule: name.clone(),
                definition: *definition,
                children: children.iter().map(NodeRepr::from).collect(),
            },
            ParseNode::Terminal(token) => NodeRepr::Terminal {
                token: token.value.clone(),
                index: token.index,
                offset: token.offset,
            },
            ParseNode::Epsilon => NodeRepr::Epsilon { epsilon: true },
        })
    }
}

impl From<NodeRepr> for ParseNode {
    fn from(repr: NodeRepr) -> Self {
        grow(|| match repr {
            NodeRepr::Rule {
                rule,
                definition,
                children,
            } => ParseNode::Rule {
                name: rule,
                definition,
                children: children.into_iter().map(ParseNode::from).collect(),
            },
            NodeRepr::Terminal { token, index, offset } => ParseNode::Terminal(Token {
                value: token,
                index,
                offset,
            }),
            NodeRepr::Epsilon { .. } => ParseNode::Epsilon,
        })
    }
}

impl Serialize for ParseNode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        NodeRepr::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ParseNode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        NodeRepr::deserialize(deserializer).map(ParseNode::from)
    }
}

pub fn render_json(tree: &ParseNode) -> String {
    serde_json::to_string_pretty(tree).expect("parse trees serialize")
}

pub fn parse_json(json: &str) -> Result<ParseNode, serde_json::Error> {
    serde_json::from_str(json)
}
