//! Integer lists like `3..7`, `1,3,5` or `1,4..6`.

use std::collections::BTreeSet;

/// Parses a comma-separated list of integers and inclusive ranges.
/// The result is sorted and deduplicated.
pub fn parse_list(s: &str) -> Result<Vec<u64>, String> {
    let mut out = BTreeSet::new();
    for part in s.split(',').map(str::trim) {
        if part.is_empty() {
            return Err(format!("empty item in list {s:?}"));
        }
        if let Some((lo, hi)) = part.split_once("..") {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            let lo = parse_one(lo)?;
            let hi = parse_one(hi)?;
            if lo > hi {
                return Err(format!("empty range {part:?}"));
            }
            out.extend(lo..=hi);
        } else {
            out.insert(parse_one(part)?);
        }
    }
    Ok(out.into_iter().collect())
}

fn parse_one(s: &str) -> Result<u64, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("not a non-negative integer: {s:?}"))
}
