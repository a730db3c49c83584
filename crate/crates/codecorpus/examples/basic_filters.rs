//! Minimal rule filters: syntax validity with a pluggable parser adapter,
//! and the <10-words web heuristic.
//!
//! ```bash
//! cargo run -p codecorpus --example basic_filters
//! ```

use codecorpus::corpus::CodeDocument;
use codecorpus::filter::{syntax_check, web_minimal_filter, ParserRegistry, SyntaxParser};

/// A toy adapter standing in for a real grammar-based parser binding.
struct KeywordParser;

impl SyntaxParser for KeywordParser {
    fn syntax_errors(&self, content: &str) -> Result<usize, String> {
        Ok(content.matches("<<<ERROR>>>").count())
    }
}

fn main() {
    let docs = vec![
        CodeDocument::new("ok.py", "ok.py", "def f():\n    return 1\n"),
        CodeDocument::new("bad.py", "bad.py", "def f(:"),
        CodeDocument::new("prose.md", "prose.md", "unbalanced ( parens are fine in prose"),
        CodeDocument::new("page.html", "page.html", "<p>just six words in this page</p>"),
    ];

    // No parser registered: code languages fall back to the
    // balanced-delimiter check, prose is exempt.
    let registry = ParserRegistry::new();
    println!("fallback syntax checks:");
    for doc in &docs {
        let v = syntax_check(doc, &registry);
        println!("  {:<10} kept={} rule={:?}", doc.id, v.kept, v.rule);
    }

    // Bind an adapter for Python; it now decides instead of the fallback.
    let mut registry = ParserRegistry::new();
    registry.register("Python", Box::new(KeywordParser));
    let flagged = CodeDocument::new("weird.py", "weird.py", "x = 1  # <<<ERROR>>> here");
    let v = syntax_check(&flagged, &registry);
    println!("\nwith a bound parser: {:<10} kept={} rule={:?}", flagged.id, v.kept, v.rule);

    println!("\nweb minimal filter (<10 words drops):");
    for doc in &docs {
        let v = web_minimal_filter(doc);
        println!("  {:<10} kept={} rule={:?}", doc.id, v.kept, v.rule);
    }
}
