//! Comparison re-rankers and a brute-force stable-matching oracle for small
//! instances.

use std::collections::BTreeSet;

use crate::capacity::{validate_feasibility, CapacityConfig};
use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::metrics::aggregate_user_utility;
use crate::mmda::blocking_pairs;
use crate::prefs::{build_preferences, Completion, PreferenceProfile};
use crate::scalar::Scalar;
use crate::scores::ScoreMatrix;

pub const ENUMERATION_MAX_USERS: usize = 6;
pub const ENUMERATION_MAX_ITEMS: usize = 6;
pub const ENUMERATION_MAX_K: usize = 2;
pub const ENUMERATION_MAX_CAP: usize = 3;

/// Every user gets the first `k` entries of its preference list. Caps are
/// ignored.
pub fn topk_identity(prefs: &PreferenceProfile, k: usize) -> Result<Matching> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let lists = (0..prefs.n_users())
        .map(|u| {
            let pref = prefs.user_pref(u);
            if pref.len() < k {
                Err(Error::ShortPreferenceList {
                    user: u,
                    len: pref.len(),
                    k,
                })
            } else {
                Ok(pref[..k].to_vec())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Matching::from_user_lists(prefs.n_items(), lists)
}

/// Popularity-penalty exponent of the Bayesian re-ranker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrConfig<S> {
    alpha: S,
}

impl<S: Scalar> BrConfig<S> {
    pub fn new(alpha: S) -> Result<Self> {
        if !alpha.is_finite() || alpha < S::zero() {
            return Err(Error::InvalidConfig(format!(
                "alpha must be finite and non-negative, got {alpha}"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> S {
        self.alpha
    }
}

/// `s(u, i) · (Σ_u' s(u', i))^(-α)`, the sum running over every user with a
/// score for `i`. Zero scores stay zero.
pub fn bayesian_rescore<S: Scalar>(
    scores: &ScoreMatrix<S>,
    config: &BrConfig<S>,
) -> Result<ScoreMatrix<S>> {
    let mut popularity = vec![S::zero(); scores.n_items()];
    for u in 0..scores.n_users() {
        for (i, s) in scores.row(u) {
            if s < S::zero() {
                return Err(Error::NegativeScore {
                    user: u,
                    item: i,
                    score: s.to_f64_lossy(),
                });
            }
            popularity[i] = popularity[i] + s;
        }
    }
    let alpha = config.alpha();
    let penalty: Vec<S> = popularity
        .into_iter()
        .map(|p| if p > S::zero() { p.powf(-alpha) } else { S::one() })
        .collect();
    Ok(scores.map(|_, i, s| s * penalty[i]))
}

/// Re-scores with [`bayesian_rescore`] and returns every user's top `k`.
pub fn bayesian_rerank<S: Scalar>(
    scores: &ScoreMatrix<S>,
    config: &BrConfig<S>,
    k: usize,
    completion: Completion,
) -> Result<Matching> {
    let rescored = bayesian_rescore(scores, config)?;
    let prefs = build_preferences(&rescored, None, completion)?;
    topk_identity(&prefs, k)
}

fn check_guard(prefs: &PreferenceProfile, caps: &CapacityConfig) -> Result<()> {
    if prefs.n_users() > ENUMERATION_MAX_USERS
        || prefs.n_items() > ENUMERATION_MAX_ITEMS
        || caps.k() > ENUMERATION_MAX_K
        || caps.max_cap() > ENUMERATION_MAX_CAP
    {
        return Err(Error::EnumerationGuard {
            users: prefs.n_users(),
            items: prefs.n_items(),
            k: caps.k(),
            max_cap: caps.max_cap(),
        });
    }
    Ok(())
}

fn k_subsets(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(pool: &[usize], k: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for at in from..pool.len() {
            if pool.len() - at < k - cur.len() {
                break;
            }
            cur.push(pool[at]);
            go(pool, k, at + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(pool, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

struct Search<'a> {
    prefs: &'a PreferenceProfile,
    caps: &'a CapacityConfig,
    options: Vec<Vec<Vec<usize>>>,
    lists: Vec<Vec<usize>>,
    holders: Vec<Vec<usize>>,
    found: Vec<Matching>,
}

impl Search<'_> {
    // (u, i) blocks no matter how the remaining users are assigned: i is
    // full, so its holders are final.
    fn settled_block(&self, u: usize, i: usize) -> bool {
        let holders = &self.holders[i];
        if holders.len() < self.caps.cap(i) || holders.contains(&u) {
            return false;
        }
        let held = &self.lists[u];
        held.iter().any(|&j| self.prefs.user_prefers(u, i, j))
            && holders.iter().any(|&v| self.prefs.item_prefers(i, u, v))
    }

    fn violates(&self, user: usize) -> bool {
        // newly assigned user against every full item
        let own = (0..self.prefs.n_items()).any(|i| self.settled_block(user, i));
        // earlier users against items this user just filled
        own || self.lists[user]
            .iter()
            .filter(|&&i| self.holders[i].len() == self.caps.cap(i))
            .any(|&i| (0..user).any(|v| self.settled_block(v, i)))
    }

    fn descend(&mut self, user: usize) {
        if user == self.prefs.n_users() {
            let m = Matching::from_user_lists(self.prefs.n_items(), self.lists.clone())
                .expect("subsets never repeat an item");
            if blocking_pairs(&m, self.prefs, self.caps).is_empty() {
                self.found.push(m);
            }
            return;
        }
        for o in 0..self.options[user].len() {
            let set = self.options[user][o].clone();
            if set
                .iter()
                .any(|&i| self.holders[i].len() >= self.caps.cap(i))
            {
                continue;
            }
            for &i in &set {
                self.holders[i].push(user);
            }
            self.lists[user] = set;
            if !self.violates(user) {
                self.descend(user + 1);
            }
            for &i in &self.lists[user] {
                self.holders[i].pop();
            }
            self.lists[user].clear();
        }
    }
}

/// Every matching with exactly `k` ranked items per user and at most `c_i`
/// users per item that has no blocking pair. Refuses instances beyond the
/// enumeration guard.
pub fn enumerate_stable_matchings(
    prefs: &PreferenceProfile,
    caps: &CapacityConfig,
) -> Result<Vec<Matching>> {
    check_guard(prefs, caps)?;
    if caps.caps().len() != prefs.n_items() {
        return Err(Error::InvalidConfig(format!(
            "{} caps given for {} items",
            caps.caps().len(),
            prefs.n_items()
        )));
    }
    let options = (0..prefs.n_users())
        .map(|u| {
            let mut pool = prefs.user_pref(u).to_vec();
            pool.sort_unstable();
            k_subsets(&pool, caps.k())
        })
        .collect();
    let mut search = Search {
        prefs,
        caps,
        options,
        lists: vec![Vec::new(); prefs.n_users()],
        holders: vec![Vec::new(); prefs.n_items()],
        found: Vec::new(),
    };
    search.descend(0);
    Ok(search.found)
}

/// The stable matching with the highest mean user NDCG; ties go to the
/// lexicographically smallest set of pairs.
pub fn user_optimal_oracle(prefs: &PreferenceProfile, caps: &CapacityConfig) -> Result<Matching> {
    check_guard(prefs, caps)?;
    validate_feasibility(prefs, caps)?;
    let mut best: Option<(f64, BTreeSet<(usize, usize)>, Matching)> = None;
    for m in enumerate_stable_matchings(prefs, caps)? {
        let utility: f64 = aggregate_user_utility(&m, prefs);
        let pairs = m.pairs();
        let better = match &best {
            None => true,
            Some((u, p, _)) => {
                utility > *u + 1e-12 || ((utility - *u).abs() <= 1e-12 && pairs < *p)
            }
        };
        if better {
            best = Some((utility, pairs, m));
        }
    }
    best.map(|(_, _, m)| m)
        .ok_or_else(|| Error::InvalidMatching("instance has no stable matching".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(users: Vec<Vec<usize>>, items: Vec<Vec<usize>>) -> PreferenceProfile {
        PreferenceProfile::from_rankings(users, items, None).unwrap()
    }

    fn pairs(m: &Matching) -> Vec<(usize, usize)> {
        m.pairs().into_iter().collect()
    }

    #[test]
    fn identity_takes_prefix() {
        let p = profile(vec![vec![2, 0, 1]], vec![vec![0]; 3]);
        let m = topk_identity(&p, 2).unwrap();
        assert_eq!(m.user_items(0), &[2, 0]);
    }

    #[test]
    fn identity_ignores_caps() {
        let p = profile(vec![vec![0, 1]; 3], vec![vec![0, 1, 2]; 2]);
        let m = topk_identity(&p, 1).unwrap();
        assert_eq!(m.item_count(0), 3);
    }

    #[test]
    fn identity_short_list() {
        let p = profile(vec![vec![0]], vec![vec![0]]);
        assert!(matches!(
            topk_identity(&p, 2),
            Err(Error::ShortPreferenceList { user: 0, len: 1, k: 2 })
        ));
    }

    #[test]
    fn br_formula() {
        let mut s = ScoreMatrix::<f64>::new(1, vec![vec![]; 2]);
        s.set(0, 0, 0.8).unwrap();
        s.set(1, 0, 3.2).unwrap();
        let r = bayesian_rescore(&s, &BrConfig::new(1.0).unwrap()).unwrap();
        assert!((r.get(0, 0).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn br_penalizes_popular_items() {
        // item 0 popularity 10, item 1 popularity 1
        let mut s = ScoreMatrix::<f64>::new(2, vec![vec![]; 2]);
        s.set(0, 0, 0.9).unwrap();
        s.set(0, 1, 0.8).unwrap();
        s.set(1, 0, 9.1).unwrap();
        s.set(1, 1, 0.2).unwrap();
        let cfg = BrConfig::new(1.0).unwrap();
        let r = bayesian_rescore(&s, &cfg).unwrap();
        assert!((r.get(0, 0).unwrap() - 0.09).abs() < 1e-12);
        assert!((r.get(0, 1).unwrap() - 0.8).abs() < 1e-12);
        let m = bayesian_rerank(&s, &cfg, 1, Completion::ScoredOnly).unwrap();
        assert_eq!(m.user_items(0), &[1]);
    }

    #[test]
    fn br_rejects_negative_scores() {
        let mut s = ScoreMatrix::<f64>::new(1, vec![vec![]]);
        s.set(0, 0, -0.1).unwrap();
        assert!(matches!(
            bayesian_rescore(&s, &BrConfig::new(0.5).unwrap()),
            Err(Error::NegativeScore { .. })
        ));
        assert!(BrConfig::new(-1.0).is_err());
        assert!(BrConfig::new(f64::NAN).is_err());
    }

    #[test]
    fn conflict_instance_has_one_stable_matching() {
        let p = profile(vec![vec![0, 1], vec![0, 1]], vec![vec![1, 0], vec![0, 1]]);
        let caps = CapacityConfig::uniform(1, 1, 2).unwrap();
        let all = enumerate_stable_matchings(&p, &caps).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(pairs(&all[0]), vec![(0, 1), (1, 0)]);
        assert_eq!(user_optimal_oracle(&p, &caps).unwrap(), all[0]);
    }

    #[test]
    fn singleton() {
        let p = profile(vec![vec![0]], vec![vec![0]]);
        let caps = CapacityConfig::uniform(1, 1, 1).unwrap();
        let all = enumerate_stable_matchings(&p, &caps).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(pairs(&all[0]), vec![(0, 0)]);
    }

    #[test]
    fn aligned_first_choices() {
        let p = profile(vec![vec![0, 1], vec![1, 0]], vec![vec![0, 1], vec![1, 0]]);
        let caps = CapacityConfig::uniform(1, 1, 2).unwrap();
        let all = enumerate_stable_matchings(&p, &caps).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(pairs(&all[0]), vec![(0, 0), (1, 1)]);
        let swapped = Matching::from_user_lists(2, vec![vec![1], vec![0]]).unwrap();
        assert!(blocking_pairs(&swapped, &p, &caps).contains(&(0, 0)));
    }

    #[test]
    fn oracle_is_identity_when_caps_slack() {
        let p = profile(
            vec![vec![2, 0, 1], vec![0, 2, 1], vec![1, 0, 2]],
            vec![vec![0, 1, 2], vec![2, 1, 0], vec![1, 0, 2]],
        );
        let caps = CapacityConfig::uniform(2, 3, 3).unwrap();
        assert_eq!(
            pairs(&user_optimal_oracle(&p, &caps).unwrap()),
            pairs(&topk_identity(&p, 2).unwrap())
        );
    }

    #[test]
    fn guard_refuses_large_instances() {
        let p = profile(vec![vec![0]; 7], vec![(0..7).collect()]);
        let caps = CapacityConfig::uniform(1, 3, 1).unwrap();
        assert!(matches!(
            enumerate_stable_matchings(&p, &caps),
            Err(Error::EnumerationGuard { users: 7, .. })
        ));
    }
}
