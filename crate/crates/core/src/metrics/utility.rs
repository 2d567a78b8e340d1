//! User- and item-side utilities of a matching.
//!
//! A list is scored against its owner's preference after re-sorting it by
//! that preference. User lists are normalized by the ideal gain of their own
//! length. Item lists are normalized by the ideal gain of the item's
//! capacity when caps are given (so an item's utility only grows as it gains
//! or upgrades members), otherwise by their own length.

use crate::capacity::CapacityConfig;
use crate::matching::Matching;
use crate::metrics::ranking::sorted_ndcg;
use crate::prefs::PreferenceProfile;
use crate::scalar::{ordered_sum, Scalar};

/// NDCG of `items` for `user`. Empty lists score 0.
pub fn user_utility<S: Scalar>(prefs: &PreferenceProfile, user: usize, items: &[usize]) -> S {
    let mut ranks: Vec<Option<usize>> = items.iter().map(|&i| prefs.user_rank(user, i)).collect();
    sorted_ndcg(&mut ranks, prefs.user_pref(user).len(), items.len())
}

/// NDCG of `users` for `item` against an ideal list of `ideal_len` entries.
pub fn item_utility<S: Scalar>(
    prefs: &PreferenceProfile,
    item: usize,
    users: &[usize],
    ideal_len: usize,
) -> S {
    let mut ranks: Vec<Option<usize>> = users.iter().map(|&u| prefs.item_rank(item, u)).collect();
    sorted_ndcg(&mut ranks, prefs.item_pref(item).len(), ideal_len.max(users.len()))
}

/// Ideal list length for `item` holding `held` users.
pub(crate) fn item_ideal_len(caps: Option<&CapacityConfig>, item: usize, held: usize) -> usize {
    caps.map_or(held, |c| c.cap(item).max(held))
}

/// Mean user utility over all users.
pub fn aggregate_user_utility<S: Scalar>(matching: &Matching, prefs: &PreferenceProfile) -> S {
    let n = matching.n_users();
    if n == 0 {
        return S::zero();
    }
    ordered_sum((0..n).map(|u| user_utility::<S>(prefs, u, matching.user_items(u)))) / S::of_usize(n)
}

/// Mean item utility over the whole catalog, unmatched items counting 0.
pub fn aggregate_item_utility<S: Scalar>(
    matching: &Matching,
    prefs: &PreferenceProfile,
    caps: Option<&CapacityConfig>,
) -> S {
    let m = matching.n_items();
    if m == 0 {
        return S::zero();
    }
    ordered_sum((0..m).map(|i| {
        let users = matching.item_users(i);
        item_utility::<S>(prefs, i, users, item_ideal_len(caps, i, users.len()))
    })) / S::of_usize(m)
}
