//! Classifies the definitions of a grammar with indirect left recursion and
//! prints the cycle that connects them.

use unleft::analysis::{analyze, RecursionKind};
use unleft::bnf::parse_grammar;

const GRAMMAR: &str = r#"
S ::= A C ;
A ::= "a" B ;
B ::= A | "b" C ;
C ::= D E | "c" ;
D ::= C "d" ;
E ::= "e" ;
"#;

fn main() {
    let grammar = parse_grammar(GRAMMAR).expect("grammar parses");
    let report = analyze(&grammar);

    for (id, kind) in &report.kinds {
        if *kind != RecursionKind::NonRecursive {
            println!("{id:<6} {}", kind.describe());
        }
    }
    println!();
    print!("{}", report.summary());
}
