//! The same input under plain backtracking and under look-ahead.

use unleft::bnf::parse_grammar;
use unleft::engine::{parse, ParseOptions, ParseResult};
use unleft::lexer::tokens_from;
use unleft::tree::render_ascii;

fn main() {
    let tokens = tokens_from(&["a", "b", "c"]);
    for source in [
        r#"S ::= AAB BC ; AAB ::= "a" "b" | "a" ; BC ::= "b" "c" ;"#,
        r#"S ::= AAB! BC ; AAB ::= "a" "b" | "a" ; BC ::= "b" "c" ;"#,
    ] {
        let grammar = parse_grammar(source).unwrap();
        println!("{source}");
        match parse(&grammar, &tokens, ParseOptions::default()) {
            ParseResult::Success { tree } => println!("{}", render_ascii(&tree)),
            ParseResult::Failure {
                furthest_token_index,
                expected,
            } => println!("failed at token {furthest_token_index}, expected {expected:?}\n"),
            ParseResult::DepthExceeded { rule } => println!("`{rule}` recursed without progress\n"),
        }
    }
}
