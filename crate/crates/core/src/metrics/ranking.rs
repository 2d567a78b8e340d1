//! Rank-based relevance and (normalized) discounted cumulative gain.
//!
//! Relevance of an entity is its reversed rank scaled into `(0, 1]`: in a
//! ranking of length `m`, the entry at 1-based rank `r` has relevance
//! `(m - r + 1) / m`. The ideal gain of a list of length `L` puts relevance 1
//! at every position.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Relevance of the entry at 0-based `position` of a ranking of length `len`.
#[inline]
pub(crate) fn relevance_at<S: Scalar>(position: usize, len: usize) -> S {
    S::of_usize(len - position) / S::of_usize(len)
}

/// `1 / log2(p + 1)` for 1-based position `p`.
#[inline]
pub fn discount<S: Scalar>(position: usize) -> S {
    S::one() / S::of_usize(position + 1).log2()
}

pub fn relevance<S: Scalar>(entity: usize, pref: &[usize]) -> Result<S> {
    let r = pref
        .iter()
        .position(|&x| x == entity)
        .ok_or(Error::NotRanked(entity))?;
    Ok(relevance_at(r, pref.len()))
}

/// DCG of `list` in the order given.
pub fn dcg<S: Scalar>(list: &[usize], pref: &[usize]) -> Result<S> {
    let mut total = S::zero();
    for (p, &x) in list.iter().enumerate() {
        total = total + relevance::<S>(x, pref)? * discount(p + 1);
    }
    Ok(total)
}

/// DCG of a length-`len` list with maximal relevance everywhere.
pub fn idcg<S: Scalar>(len: usize) -> S {
    (1..=len).fold(S::zero(), |acc, p| acc + discount(p))
}

/// `dcg(list) / idcg(|list|)`; an empty list scores 0.
pub fn ndcg<S: Scalar>(list: &[usize], pref: &[usize]) -> Result<S> {
    if list.is_empty() {
        return Ok(S::zero());
    }
    Ok(dcg::<S>(list, pref)? / idcg::<S>(list.len()))
}

/// Gain of a list given each entry's 0-based rank (`None` = unranked,
/// relevance 0), after sorting entries best first, normalized by the ideal
/// gain of `ideal_len` positions.
pub(crate) fn sorted_ndcg<S: Scalar>(
    ranks: &mut [Option<usize>],
    pref_len: usize,
    ideal_len: usize,
) -> S {
    if ranks.is_empty() || ideal_len == 0 {
        return S::zero();
    }
    ranks.sort_unstable_by_key(|r| r.unwrap_or(usize::MAX));
    let gain = ranks.iter().enumerate().fold(S::zero(), |acc, (p, r)| match r {
        Some(r) => acc + relevance_at::<S>(*r, pref_len) * discount(p + 1),
        None => acc,
    });
    gain / idcg::<S>(ideal_len)
}
