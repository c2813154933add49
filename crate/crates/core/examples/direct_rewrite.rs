//! Eliminates direct left recursion from a rule whose definitions carry
//! look-ahead, then parses with the result.

use unleft::bnf::{parse_grammar, render_pretty};
use unleft::engine::{parse, ParseOptions};
use unleft::lexer::tokens_from;
use unleft::rewrite::eliminate_left_recursion;
use unleft::tree::render_ascii;

fn main() {
    let grammar = parse_grammar(r#"L ::= L! "c" | "a" | L "d" | "a" "b" ;"#).unwrap();
    let outcome = eliminate_left_recursion(&grammar).expect("rewritable");
    println!("{}", render_pretty(&outcome.grammar));

    for input in [&["a", "c", "d", "d"][..], &["a", "b", "c"], &["a", "b", "d"]] {
        let result = parse(&outcome.grammar, &tokens_from(input), ParseOptions::default());
        match result.tree() {
            Some(tree) => println!("{}:\n{}", input.join(" "), render_ascii(tree)),
            None => println!("{}: rejected\n", input.join(" ")),
        }
    }
}
