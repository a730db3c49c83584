//! Percentile filtering: drop the bottom fraction of scored documents.

use std::collections::BTreeSet;

use crate::corpus::DocId;
use crate::error::{Error, Result};

/// Drops exactly `floor(n * drop_fraction)` of the lowest-scored documents;
/// score ties break by id (smaller ids drop first). Every document must
/// carry a score.
pub fn percentile_filter(
    scored: &[(DocId, Option<f64>)],
    drop_fraction: f64,
) -> Result<BTreeSet<DocId>> {
    if !(0.0..1.0).contains(&drop_fraction) {
        return Err(Error::config(format!(
            "drop_fraction must be in [0, 1), got {drop_fraction}"
        )));
    }
    let mut ranked: Vec<(&DocId, f64)> = Vec::with_capacity(scored.len());
    for (id, score) in scored {
        match score {
            Some(s) => ranked.push((id, *s)),
            None => return Err(Error::Unscored(id.to_string())),
        }
    }
    ranked.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(b.0))
    });
    let drop = (scored.len() as f64 * drop_fraction).floor() as usize;
    Ok(ranked[drop..].iter().map(|(id, _)| (*id).clone()).collect())
}
