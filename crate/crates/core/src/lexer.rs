//! Splitting input text into the token sequence the engine consumes.

use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub value: String,
    /// Position in the token sequence, counting from zero.
    pub index: usize,
    /// Character (not byte) offset of the token in the source text.
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenClassSpec {
    pub name: String,
    pub pattern: String,
    #[serde(default)]
    pub skip: bool,
}

#[derive(Clone, Debug)]
pub struct TokenClass {
    pub name: String,
    pub skip: bool,
    source: String,
    regex: Regex,
}

impl TokenClass {
    pub fn new(name: impl Into<String>, pattern: &str, skip: bool) -> Result<Self, LexError> {
        let name = name.into();
        let regex = Regex::new(&format!("^(?:{pattern})")).map_err(|e| LexError::BadPattern {
            class: name.clone(),
            message: e.to_string(),
        })?;
        Ok(TokenClass {
            name,
            skip,
            source: pattern.to_string(),
            regex,
        })
    }

    pub fn pattern(&self) -> &str {
        &self.source
    }
}

#[derive(Debug, Error)]
pub enum LexError {
    #[error("unrecognised character `{character}` at offset {offset}")]
    Unrecognised { character: char, offset: usize },
    #[error("token class `{class}` has an invalid pattern: {message}")]
    BadPattern { class: String, message: String },
    #[error("cannot read lexicon: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed lexicon: {0}")]
    Json(#[from] serde_json::Error),
}

/// Ordered token classes. Longest match wins; ties go to the earlier class.
#[derive(Clone, Debug)]
pub struct Lexicon {
    pub classes: Vec<TokenClass>,
}

/// A piece of the input, kept or skipped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lexeme<'a> {
    pub class: &'a str,
    pub text: &'a str,
    pub offset: usize,
    pub skipped: bool,
}

impl Lexicon {
    pub fn from_specs(specs: &[TokenClassSpec]) -> Result<Self, LexError> {
        let classes = specs
            .iter()
            .map(|s| TokenClass::new(&s.name, &s.pattern, s.skip))
            .collect::<Result<_, _>>()?;
        Ok(Lexicon { classes })
    }

    /// Reads `[{"name": .., "pattern": .., "skip": bool}, ..]`.
    pub fn from_json(json: &str) -> Result<Self, LexError> {
        let specs: Vec<TokenClassSpec> = serde_json::from_str(json)?;
        Self::from_specs(&specs)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn specs(&self) -> Vec<TokenClassSpec> {
        self.classes
            .iter()
            .map(|c| TokenClassSpec {
                name: c.name.clone(),
                pattern: c.source.clone(),
                skip: c.skip,
            })
            .collect()
    }

    /// Every lexeme of `text` in order, including skipped ones.
    pub fn lexemes<'a>(&'a self, text: &'a str) -> Result<Vec<Lexeme<'a>>, LexError> {
        let mut out = Vec::new();
        let mut byte = 0;
        let mut offset = 0;
        while byte < text.len() {
            let rest = &text[byte..];
            let mut best: Option<(usize, &TokenClass)> = None;
            for class in &self.classes {
                if let Some(m) = class.regex.find(rest) {
                    if m.end() > 0 && best.is_none_or(|(len, _)| m.end() > len) {
                        best = Some((m.end(), class));
                    }
                }
            }
            let Some((len, class)) = best else {
                return Err(LexError::Unrecognised {
                    character: rest.chars().next().unwrap_or_default(),
                    offset,
                });
            };
            let lexeme = &rest[..len];
            out.push(Lexeme {
                class: &class.name,
                text: lexeme,
                offset,
                skipped: class.skip,
            });
            byte += len;
            offset += lexeme.chars().count();
        }
        Ok(out)
    }

    pub fn tokenize(&self, text: &str) -> Result<Vec<Token>, LexError> {
        Ok(self
            .lexemes(text)?
            .into_iter()
            .filter(|l| !l.skipped)
            .enumerate()
            .map(|(index, l)| Token {
                value: l.text.to_string(),
                index,
                offset: l.offset,
            })
            .collect())
    }
}

impl Default for Lexicon {
    /// Numbers, words, single punctuation characters; whitespace skipped.
    fn default() -> Self {
        let class = |name, pattern, skip| TokenClass::new(name, pattern, skip).expect("built-in pattern");
        Lexicon {
            classes: vec![
                class("number", r"\d+", false),
                class("word", r"[A-Za-z_]\w*", false),
                class("punctuation", r"[^\w\s]", false),
                class("whitespace", r"\s+", true),
            ],
        }
    }
}

pub fn default_lexicon() -> Lexicon {
    Lexicon::default()
}

/// Tokenizes with `lexicon`.
pub fn tokenize(text: &str, lexicon: &Lexicon) -> Result<Vec<Token>, LexError> {
    lexicon.tokenize(text)
}

/// Builds tokens directly from their values, offsets counted as if the
/// values were separated by single spaces.
pub fn tokens_from<S: AsRef<str>>(values: &[S]) -> Vec<Token> {
    let mut offset = 0;
    values
        .iter()
        .enumerate()
        .map(|(index, v)| {
            let value = v.as_ref().to_string();
            let token = Token { value, index, offset };
            offset += token.value.chars().count() + 1;
            token
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(text: &str) -> Vec<String> {
        tokenize(text, &Lexicon::default())
            .unwrap()
            .into_iter()
            .map(|t| t.value)
            .collect()
    }

    #[test]
    fn empty_and_blank() {
        assert!(values("").is_empty());
        assert!(values("  ").is_empty());
    }

    #[test]
    fn simple_words() {
        assert_eq!(values("a b c"), ["a", "b", "c"]);
        assert_eq!(values("ab"), ["ab"]);
    }

    #[test]
    fn arithmetic() {
        assert_eq!(values("(1+2)/3"), ["(", "1", "+", "2", ")", "/", "3"]);
        assert_eq!(values("12+3"), ["12", "+", "3"]);
    }

    #[test]
    fn indices_and_offsets() {
        let tokens = tokenize("é + 12", &Lexicon::default());
        // `é` is a word character for `\w` but not for `[A-Za-z_]`, and not
        // punctuation either.
        assert!(matches!(
            tokens,
            Err(LexError::Unrecognised {
                character: 'é',
                offset: 0
            })
        ));
        let tokens = tokenize(" ab  + 12", &Lexicon::default()).unwrap();
        let got: Vec<_> = tokens.iter().map(|t| (t.index, t.offset)).collect();
        assert_eq!(got, [(0, 1), (1, 5), (2, 7)]);
    }

    #[test]
    fn first_class_wins_ties() {
        let lexicon = Lexicon::from_json(
            r#"[{"name":"kw","pattern":"if"},{"name":"id","pattern":"[a-z]+"},{"name":"ws","pattern":" ","skip":true}]"#,
        )
        .unwrap();
        let tokens: Vec<_> = lexicon
            .lexemes("if iffy")
            .unwrap()
            .into_iter()
            .map(|l| (l.class, l.text))
            .collect();
        assert_eq!(tokens, [("kw", "if"), ("ws", " "), ("id", "iffy")]);
    }

    #[test]
    fn bad_lexicon() {
        assert!(matches!(
            Lexicon::from_json(r#"[{"name":"x","pattern":"("}]"#),
            Err(LexError::BadPattern { .. })
        ));
        assert!(matches!(Lexicon::from_json("{}"), Err(LexError::Json(_))));
    }

    #[test]
    fn single_character_lexicon() {
        let lexicon = Lexicon::from_json(r#"[{"name":"char","pattern":"\\S"},{"name":"ws","pattern":"\\s+","skip":true}]"#)
            .unwrap();
        let got: Vec<_> = lexicon.tokenize("acdd").unwrap().into_iter().map(|t| t.value).collect();
        assert_eq!(got, ["a", "c", "d", "d"]);
    }
}
