#![allow(dead_code)]

pub mod reference;

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stable_rerank::{
    CapacityConfig, EntityIndex, Interaction, InteractionDataset, PreferenceProfile, ScoreMatrix,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct Instance {
    pub user_prefs: Vec<Vec<usize>>,
    pub item_prefs: Vec<Vec<usize>>,
    pub caps: Vec<usize>,
    pub k: usize,
}

impl Instance {
    pub fn profile(&self) -> PreferenceProfile {
        PreferenceProfile::from_rankings(self.user_prefs.clone(), self.item_prefs.clone(), None)
            .unwrap()
    }

    pub fn capacity(&self) -> CapacityConfig {
        CapacityConfig::new(self.k, self.caps.clone()).unwrap()
    }

    pub fn n_users(&self) -> usize {
        self.user_prefs.len()
    }

    pub fn n_items(&self) -> usize {
        self.item_prefs.len()
    }
}

fn permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

/// Complete strict preferences on both sides and caps that pass the
/// feasibility check: `sum(min(c_i, n_users)) >= n_users * k`.
pub fn random_instance(
    rng: &mut ChaCha8Rng,
    max_users: usize,
    max_items: usize,
    max_k: usize,
    max_cap: usize,
) -> Instance {
    let n_items = rng.gen_range(1..=max_items);
    let k = rng.gen_range(1..=max_k.min(n_items));
    let sizes: Vec<usize> = (1..=max_users)
        .filter(|&n| n_items * max_cap.min(n) >= n * k)
        .collect();
    let n_users = *sizes.choose(rng).unwrap();
    let top = max_cap.min(n_users);
    let mut caps: Vec<usize> = (0..n_items).map(|_| rng.gen_range(1..=max_cap)).collect();
    while caps.iter().map(|&c| c.min(n_users)).sum::<usize>() < n_users * k {
        let open: Vec<usize> = (0..n_items).filter(|&i| caps[i] < top).collect();
        caps[*open.choose(rng).unwrap()] += 1;
    }
    Instance {
        user_prefs: (0..n_users).map(|_| permutation(rng, n_items)).collect(),
        item_prefs: (0..n_items).map(|_| permutation(rng, n_users)).collect(),
        caps,
        k,
    }
}

fn pos(list: &[usize], x: usize) -> Option<usize> {
    list.iter().position(|&y| y == x)
}

/// Blocking pairs straight from the definition, over a set of pairs.
pub fn naive_blocking_pairs(
    pairs: &BTreeSet<(usize, usize)>,
    inst: &Instance,
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for u in 0..inst.n_users() {
        for i in 0..inst.n_items() {
            if pairs.contains(&(u, i)) {
                continue;
            }
            let Some(ri) = pos(&inst.user_prefs[u], i) else {
                continue;
            };
            let user_wants = pairs.iter().any(|&(v, j)| {
                v == u && pos(&inst.user_prefs[u], j).is_none_or(|rj| ri < rj)
            });
            if !user_wants {
                continue;
            }
            let holders: Vec<usize> = pairs
                .iter()
                .filter(|&&(_, j)| j == i)
                .map(|&(v, _)| v)
                .collect();
            let ru = pos(&inst.item_prefs[i], u);
            let item_wants = holders.len() < inst.caps[i]
                || holders.iter().any(|&v| match (ru, pos(&inst.item_prefs[i], v)) {
                    (Some(a), Some(b)) => a < b,
                    (Some(_), None) => true,
                    _ => false,
                });
            if item_wants {
                out.push((u, i));
            }
        }
    }
    out
}

/// Every assignment of `k` distinct ranked items per user within caps.
pub fn all_feasible_assignments(inst: &Instance) -> Vec<BTreeSet<(usize, usize)>> {
    fn subsets(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for (at, &x) in pool.iter().enumerate() {
            for mut rest in subsets(&pool[at + 1..], k - 1) {
                rest.insert(0, x);
                out.push(rest);
            }
        }
        out
    }
    let mut acc = vec![(BTreeSet::new(), vec![0usize; inst.n_items()])];
    for u in 0..inst.n_users() {
        let mut pool = inst.user_prefs[u].clone();
        pool.sort_unstable();
        let options = subsets(&pool, inst.k);
        let mut next = Vec::new();
        for (pairs, counts) in &acc {
            for set in &options {
                if set.iter().any(|&i| counts[i] >= inst.caps[i]) {
                    continue;
                }
                let mut p: BTreeSet<(usize, usize)> = pairs.clone();
                let mut c = counts.clone();
                for &i in set {
                    p.insert((u, i));
                    c[i] += 1;
                }
                next.push((p, c));
            }
        }
        acc = next;
    }
    acc.into_iter().map(|(p, _)| p).collect()
}

pub fn names(prefix: &str, n: usize) -> EntityIndex {
    let ids: Vec<String> = (0..n).map(|x| format!("{prefix}{x}")).collect();
    ids.iter().map(String::as_str).collect()
}

/// Integer ratings in `1..=5`, each pair present with probability `density`.
/// Every user and item keeps at least one rating.
pub fn random_dataset(
    rng: &mut ChaCha8Rng,
    n_users: usize,
    n_items: usize,
    density: f64,
) -> InteractionDataset<f64> {
    let mut present = vec![vec![false; n_items]; n_users];
    for row in present.iter_mut() {
        for cell in row.iter_mut() {
            *cell = rng.gen_bool(density);
        }
    }
    for (u, row) in present.iter_mut().enumerate() {
        if !row.iter().any(|&x| x) {
            row[u % n_items] = true;
        }
    }
    for i in 0..n_items {
        if !present.iter().any(|row| row[i]) {
            present[i % n_users][i] = true;
        }
    }
    let mut interactions = Vec::new();
    for (u, row) in present.iter().enumerate() {
        for (i, &p) in row.iter().enumerate() {
            if p {
                interactions.push(Interaction {
                    user: u,
                    item: i,
                    rating: rng.gen_range(1..=5) as f64,
                    timestamp: None,
                });
            }
        }
    }
    interactions.shuffle(rng);
    InteractionDataset::from_parts(
        Arc::new(names("u", n_users)),
        Arc::new(names("i", n_items)),
        interactions,
    )
    .unwrap()
}

/// Dense positive scores, no masking.
pub fn random_scores(rng: &mut ChaCha8Rng, n_users: usize, n_items: usize) -> ScoreMatrix<f64> {
    let mut m = ScoreMatrix::new(n_items, vec![Vec::new(); n_users]);
    for u in 0..n_users {
        for i in 0..n_items {
            m.set(u, i, rng.gen_range(0.01..5.0)).unwrap();
        }
    }
    m
}

/// `k` distinct random items per user.
pub fn random_lists(rng: &mut ChaCha8Rng, n_users: usize, n_items: usize, k: usize) -> Vec<Vec<usize>> {
    (0..n_users)
        .map(|_| {
            let mut v = permutation(rng, n_items);
            v.truncate(k);
            v
        })
        .collect()
}
