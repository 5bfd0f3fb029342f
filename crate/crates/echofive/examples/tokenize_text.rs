//! Token classification: words, numbers, emoticons, URLs, punctuation.
//!
//! ```bash
//! cargo run --example tokenize_text
//! ```

use echofive::lexical::{Lexicons, Tokenizer};

fn main() {
    let lexicons = Lexicons::builtin();
    let tokenizer = Tokenizer::new(&lexicons);

    let comments = [
        "I won!! :)",
        "see http://a.io (now)",
        "Over 9000 reasons, and counting...",
        "You never listen :( but we're still here",
        "My mother-in-law rates it 3.14/10",
    ];

    for comment in comments {
        println!("{comment:?}");
        for token in tokenizer.tokenize(comment) {
            println!(
                "  {:12} {:?}  [{}..{}]",
                format!("{:?}", token.kind).to_lowercase(),
                token.text,
                token.span.start,
                token.span.end
            );
        }
        println!();
    }
}
