//! Rating extraction from oracle responses.

use regex::Regex;
use std::sync::OnceLock;

use crate::error::{Error, Result};

fn pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"Rating:\s*\[\[([^\]]*)\]\]").expect("valid regex"))
}

/// Parses the numerical rating from a response. Oracles ramble, so the last
/// occurrence of the bracketed pattern wins; whitespace inside the brackets
/// is tolerated. Values outside 0..=10 and non-integer payloads are errors —
/// there is no silent default.
pub fn extract_rating(response: &str) -> Result<u8> {
    let capture = pattern()
        .captures_iter(response)
        .last()
        .ok_or(Error::RatingMissing)?;
    let raw = capture.get(1).map(|m| m.as_str().trim()).unwrap_or("");
    let value: i64 = raw
        .parse()
        .map_err(|_| Error::invalid(format!("rating is not an integer: {raw:?}")))?;
    if !(0..=10).contains(&value) {
        return Err(Error::RatingOutOfRange(value));
    }
    Ok(value as u8)
}
