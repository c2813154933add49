//! Grammars the rewrite refuses, and why.

use unleft::bnf::parse_grammar;
use unleft::rewrite::eliminate_left_recursion;

fn main() {
    let cases = [
        r#"C ::= C | "e" ;"#,
        r#"C ::= C "a" ;"#,
        r#"C ::= D "e" | "f" ; D ::= C ;"#,
        r#"C ::= D "a" ; D ::= C "b" ;"#,
        r#"D ::= ( D | ( "a" E ) ) "d" | "b" ; E ::= "e" ;"#,
        // Allowed: the unary definition is the implicit one.
        r#"C ::= D | "f" ; D ::= C "e" ;"#,
    ];
    for source in cases {
        let grammar = parse_grammar(source).unwrap();
        match eliminate_left_recursion(&grammar) {
            Ok(outcome) => println!("{source}\n  rewritten: {}", outcome.grammar.to_string().replace('\n', " ")),
            Err(e) => println!("{source}\n  {}: {e}", e.kind.name()),
        }
    }
}
