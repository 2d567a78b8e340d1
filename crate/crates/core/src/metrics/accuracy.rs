use crate::dataset::InteractionDataset;
use crate::matching::Matching;
use crate::scalar::{ordered_sum, Scalar};

/// Mean over all users of `|μ_u ∩ T_u| / k`, where `T_u` are the user's
/// held-out items in `test`. Users without test items contribute 0.
pub fn precision_at_k<S: Scalar>(matching: &Matching, test: &InteractionDataset<S>, k: usize) -> S {
    let n = matching.n_users();
    if n == 0 || k == 0 {
        return S::zero();
    }
    let mut held_out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for it in test.interactions() {
        if it.user < n {
            held_out[it.user].push(it.item);
        }
    }
    for t in &mut held_out {
        t.sort_unstable();
    }
    let per_user = (0..n).map(|u| {
        let hits = matching
            .user_items(u)
            .iter()
            .filter(|i| held_out[u].binary_search(i).is_ok())
            .count();
        S::of_usize(hits) / S::of_usize(k)
    });
    ordered_sum(per_user) / S::of_usize(n)
}
