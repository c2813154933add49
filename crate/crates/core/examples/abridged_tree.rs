//! Parses `(1+2)/3` with the rewritten expression grammar and shows the full
//! tree next to the abridged one, where `expression_` and `expression~` no
//! longer appear.

use unleft::bnf::parse_grammar;
use unleft::engine::{parse_text, ParseOptions};
use unleft::lexer::Lexicon;
use unleft::rewrite::eliminate_left_recursion;
use unleft::tree::{abridge, render_ascii, render_dot, AbridgementMap};

const GRAMMAR: &str = r#"
expression         ::= compoundExpression | "(" expression ")" | term ;
compoundExpression ::= expression operator expression ;
operator           ::= "+" | "-" | "/" | "*" ;
term               ::= naturalNumber ;
naturalNumber      ::= /\d+/ ;
"#;

fn main() {
    let outcome = eliminate_left_recursion(&parse_grammar(GRAMMAR).unwrap()).unwrap();
    let result = parse_text(&outcome.grammar, "(1+2)/3", &Lexicon::default(), ParseOptions::default()).unwrap();
    let tree = result.tree().expect("(1+2)/3 parses");

    println!("full:\n{}", render_ascii(tree));
    let abridged = abridge(tree, &AbridgementMap::new(outcome.provenance));
    println!("abridged:\n{}", render_ascii(&abridged));

    if std::env::args().any(|a| a == "--dot") {
        print!("{}", render_dot(&abridged));
    }
}
