//! Rewrites indirect left recursion of depth one and two. The implicitly
//! left recursive `expression` definition survives untouched.

use unleft::bnf::{parse_grammar, render_pretty};
use unleft::rewrite::eliminate_left_recursion;

const TAIL: &str = r#"
operator      ::= "+" | "-" | "/" | "*" ;
term          ::= naturalNumber ;
naturalNumber ::= /\d+/ ;
"#;

fn main() {
    let depth_one = r#"
        expression         ::= compoundExpression | "(" expression ")" | term ;
        compoundExpression ::= expression operator expression ;
    "#;
    let depth_two = r#"
        expression             ::= intermediateExpression | "(" expression ")" | term ;
        intermediateExpression ::= compoundExpression ;
        compoundExpression     ::= expression operator expression ;
    "#;
    for source in [depth_one, depth_two] {
        let grammar = parse_grammar(&format!("{source}{TAIL}")).unwrap();
        let outcome = eliminate_left_recursion(&grammar).unwrap();
        print!("{}", outcome.report.summary());
        println!("{}", render_pretty(&outcome.grammar));
        for (generated, origin) in &outcome.provenance {
            println!("{generated} comes from {} ({:?})", origin.original, origin.role);
        }
        println!();
    }
}
