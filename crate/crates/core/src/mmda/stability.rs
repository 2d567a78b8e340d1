use crate::capacity::CapacityConfig;
use crate::matching::Matching;
use crate::prefs::PreferenceProfile;

/// Every pair `(u, i)` outside `matching` such that `u` prefers `i` to some
/// item it holds, and `i` either has spare capacity or holds a user it likes
/// less than `u`. Sorted by user, then by `u`'s preference.
pub fn blocking_pairs(
    matching: &Matching,
    prefs: &PreferenceProfile,
    caps: &CapacityConfig,
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for u in 0..matching.n_users() {
        let held = matching.user_items(u);
        let pref = prefs.user_pref(u);
        // items ranked above u's least preferred holding
        let worst = held
            .iter()
            .map(|&i| prefs.user_rank(u, i).unwrap_or(pref.len()))
            .max();
        let Some(worst) = worst else { continue };
        for &i in &pref[..worst.min(pref.len())] {
            if matching.contains(u, i) {
                continue;
            }
            let holders = matching.item_users(i);
            if holders.len() < caps.cap(i) || holders.iter().any(|&v| prefs.item_prefers(i, u, v))
            {
                out.push((u, i));
            }
        }
    }
    out
}

pub fn is_stable(matching: &Matching, prefs: &PreferenceProfile, caps: &CapacityConfig) -> bool {
    blocking_pairs(matching, prefs, caps).is_empty()
}
