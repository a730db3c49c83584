//! Minimal rule filters: syntax validity via pluggable parser adapters, and
//! low-quality web-document heuristics.
//!
//! Filters are pure per-document; the kept set does not depend on corpus
//! order. Parser crashes fail open: the document is kept and flagged rather
//! than silently destroying corpus mass.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{language, CodeDocument, DocId};

pub const RULE_SYNTAX: &str = "syntax";
pub const RULE_WEB_MIN_WORDS: &str = "web-min-words";
pub const FLAG_PARSER_ERROR: &str = "parser-error";

/// Minimum word count for web documents.
pub const WEB_MIN_WORDS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterVerdict {
    pub doc_id: DocId,
    pub kept: bool,
    /// Name of the triggering rule when dropped; a flag (e.g. `parser-error`)
    /// may be present on kept documents.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
}

impl FilterVerdict {
    fn kept(doc_id: DocId) -> Self {
        FilterVerdict { doc_id, kept: true, rule: None }
    }

    fn dropped(doc_id: DocId, rule: &str) -> Self {
        FilterVerdict { doc_id, kept: false, rule: Some(rule.to_string()) }
    }
}

/// Adapter binding an external parser to a language. Implementations must be
/// callable from multiple worker threads.
pub trait SyntaxParser: Send + Sync {
    /// Number of syntax errors in `content`; `Err` means the parser itself
    /// failed (crash, resource limit), which is treated as fail-open.
    fn syntax_errors(&self, content: &str) -> Result<usize, String>;
}

/// Registry of per-language parser adapters with a balanced-delimiter
/// fallback for code languages.
#[derive(Default)]
pub struct ParserRegistry {
    parsers: HashMap<String, Box<dyn SyntaxParser>>,
}

impl ParserRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, language: impl Into<String>, parser: Box<dyn SyntaxParser>) {
        self.parsers.insert(language.into(), parser);
    }

    pub fn get(&self, language: &str) -> Option<&dyn SyntaxParser> {
        self.parsers.get(language).map(|b| b.as_ref())
    }
}

/// Syntax filter: kept iff the bound parser reports zero errors. Languages
/// with no parser use the fallback balanced-delimiter check, which never
/// drops prose/markup languages or unknown-language documents.
pub fn syntax_check(doc: &CodeDocument, registry: &ParserRegistry) -> FilterVerdict {
    if let Some(parser) = registry.get(&doc.language) {
        return match parser.syntax_errors(&doc.content) {
            Ok(0) => FilterVerdict::kept(doc.id.clone()),
            Ok(_) => FilterVerdict::dropped(doc.id.clone(), RULE_SYNTAX),
            Err(reason) => {
                log::warn!("parser for {} failed on {}: {reason}; keeping", doc.language, doc.id);
                FilterVerdict {
                    doc_id: doc.id.clone(),
                    kept: true,
                    rule: Some(FLAG_PARSER_ERROR.to_string()),
                }
            }
        };
    }
    if language::is_prose(&doc.language) || doc.language == language::UNKNOWN {
        return FilterVerdict::kept(doc.id.clone());
    }
    if balanced_delimiters(&doc.content) {
        FilterVerdict::kept(doc.id.clone())
    } else {
        FilterVerdict::dropped(doc.id.clone(), RULE_SYNTAX)
    }
}

/// Fallback checker: (), [] and {} must nest correctly and balance out.
pub fn balanced_delimiters(content: &str) -> bool {
    let mut stack = Vec::new();
    for ch in content.chars() {
        match ch {
            '(' | '[' | '{' => stack.push(ch),
            ')' | ']' | '}' => {
                let expected = match ch {
                    ')' => '(',
                    ']' => '[',
                    _ => '{',
                };
                if stack.pop() != Some(expected) {
                    return false;
                }
            }
            _ => {}
        }
    }
    stack.is_empty()
}

/// Web-document heuristic: dropped iff fewer than [`WEB_MIN_WORDS`] words or
/// whitespace-only content.
pub fn web_minimal_filter(doc: &CodeDocument) -> FilterVerdict {
    let words = doc.content.split_whitespace().count();
    if words == 0 || words < WEB_MIN_WORDS {
        FilterVerdict::dropped(doc.id.clone(), RULE_WEB_MIN_WORDS)
    } else {
        FilterVerdict::kept(doc.id.clone())
    }
}
