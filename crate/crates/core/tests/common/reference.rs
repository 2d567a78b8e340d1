//! Straightforward re-derivations of every metric, written without looking
//! at the library's data structures.

use std::collections::HashMap;

use stable_rerank::InteractionDataset;

pub fn rel(x: usize, pref: &[usize]) -> f64 {
    let m = pref.len() as f64;
    let r = pref.iter().position(|&y| y == x).unwrap() as f64 + 1.0;
    (m - r + 1.0) / m
}

pub fn dcg(list: &[usize], pref: &[usize]) -> f64 {
    list.iter()
        .enumerate()
        .map(|(p, &x)| rel(x, pref) / ((p + 2) as f64).log2())
        .sum()
}

pub fn idcg(len: usize) -> f64 {
    (1..=len).map(|p| 1.0 / ((p + 1) as f64).log2()).sum()
}

pub fn ndcg(list: &[usize], pref: &[usize]) -> f64 {
    if list.is_empty() {
        0.0
    } else {
        dcg(list, pref) / idcg(list.len())
    }
}

fn sort_by_pref(list: &[usize], pref: &[usize]) -> Vec<usize> {
    let mut v = list.to_vec();
    v.sort_by_key(|&x| pref.iter().position(|&y| y == x).unwrap());
    v
}

pub fn user_utility(lists: &[Vec<usize>], user_prefs: &[Vec<usize>]) -> f64 {
    let total: f64 = lists
        .iter()
        .zip(user_prefs)
        .map(|(l, p)| ndcg(&sort_by_pref(l, p), p))
        .sum();
    total / lists.len() as f64
}

/// Item lists are normalized by `max(cap, |list|)` positions when caps are
/// given, by `|list|` otherwise.
pub fn item_utility(
    lists: &[Vec<usize>],
    item_prefs: &[Vec<usize>],
    caps: Option<&[usize]>,
) -> f64 {
    let n_items = item_prefs.len();
    let mut holders = vec![Vec::new(); n_items];
    for (u, l) in lists.iter().enumerate() {
        for &i in l {
            holders[i].push(u);
        }
    }
    let total: f64 = (0..n_items)
        .map(|i| {
            if holders[i].is_empty() {
                return 0.0;
            }
            let sorted = sort_by_pref(&holders[i], &item_prefs[i]);
            let ideal = caps.map_or(sorted.len(), |c| c[i].max(sorted.len()));
            dcg(&sorted, &item_prefs[i]) / idcg(ideal)
        })
        .sum();
    total / n_items as f64
}

pub fn precision(lists: &[Vec<usize>], test: &InteractionDataset<f64>, k: usize) -> f64 {
    let mut hits = 0usize;
    for it in test.interactions() {
        if lists[it.user].contains(&it.item) {
            hits += 1;
        }
    }
    hits as f64 / k as f64 / lists.len() as f64
}

pub fn gini(lists: &[Vec<usize>], catalog: usize) -> f64 {
    let mut counts = vec![0usize; catalog];
    for l in lists {
        for &i in l {
            counts[i] += 1;
        }
    }
    counts.sort();
    let total: usize = counts.iter().sum();
    let n = catalog as f64;
    counts
        .iter()
        .enumerate()
        .map(|(k, &c)| (2.0 * (k + 1) as f64 - n - 1.0) * c as f64 / total as f64)
        .sum::<f64>()
        / n
}

pub fn cosine_distance(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        1.0
    } else {
        1.0 - dot / (na * nb)
    }
}

pub fn ild(lists: &[Vec<usize>], train: &InteractionDataset<f64>) -> f64 {
    let mut vectors: HashMap<usize, Vec<f64>> = HashMap::new();
    for it in train.interactions() {
        vectors
            .entry(it.item)
            .or_insert_with(|| vec![0.0; train.n_users()])[it.user] = it.rating;
    }
    let zero = vec![0.0; train.n_users()];
    let vec_of = |i: usize| vectors.get(&i).unwrap_or(&zero);
    let mut per_user = Vec::new();
    for l in lists {
        if l.len() < 2 {
            continue;
        }
        let mut s = 0.0;
        for &i in l {
            for &j in l {
                if i != j {
                    s += cosine_distance(vec_of(i), vec_of(j));
                }
            }
        }
        per_user.push(s / (l.len() * (l.len() - 1)) as f64);
    }
    if per_user.is_empty() {
        0.0
    } else {
        per_user.iter().sum::<f64>() / per_user.len() as f64
    }
}
