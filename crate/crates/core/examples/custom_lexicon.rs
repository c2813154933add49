//! Loads a lexicon from JSON so that every non-space character is a token,
//! which is what the single-letter grammars expect of input like "acdd".

use unleft::bnf::parse_grammar;
use unleft::engine::{parse_text, ParseOptions};
use unleft::lexer::Lexicon;
use unleft::tree::render_ascii;

const LEXICON: &str = r#"[
    {"name": "char", "pattern": "\\S"},
    {"name": "space", "pattern": "\\s+", "skip": true}
]"#;

fn main() {
    let grammar = parse_grammar(
        r#"L ::= L_! "c" L~* | L_ "d" L~* | L_ ; L_ ::= "a" | "a" "b" ; L~ ::= "c" | "d" ;"#,
    )
    .unwrap();
    let lexicon = Lexicon::from_json(LEXICON).unwrap();

    for input in ["acdd", "a c d d"] {
        let tokens = lexicon.tokenize(input).unwrap();
        let values: Vec<_> = tokens.iter().map(|t| t.value.as_str()).collect();
        println!("{input:?} -> {values:?}");
    }
    let result = parse_text(&grammar, "acdd", &lexicon, ParseOptions::default()).unwrap();
    print!("{}", render_ascii(result.tree().unwrap()));

    // The default lexicon reads "acdd" as a single word.
    let result = parse_text(&grammar, "acdd", &Lexicon::default(), ParseOptions::default()).unwrap();
    println!("default lexicon: success = {}", result.is_success());
}
