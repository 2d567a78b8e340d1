//! Aggregate and individual diversity: item distribution, Gini index,
//! intra-list distance and catalog coverage.

use crate::dataset::InteractionDataset;
use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::scalar::{mean, ordered_sum, Scalar};

/// Number of users holding each item, padded with zeros to `catalog_size`.
pub fn item_counts(matching: &Matching, catalog_size: usize) -> Vec<usize> {
    let mut counts: Vec<usize> = (0..matching.n_items()).map(|i| matching.item_count(i)).collect();
    counts.resize(catalog_size.max(counts.len()), 0);
    counts
}

/// Share of all recommendations that went to each item, least recommended first.
pub fn item_distribution<S: Scalar>(matching: &Matching, catalog_size: usize) -> Result<Vec<S>> {
    let mut counts = item_counts(matching, catalog_size);
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyMatching);
    }
    counts.sort_unstable();
    let total = S::of_usize(total);
    Ok(counts.into_iter().map(|c| S::of_usize(c) / total).collect())
}

/// Gini index of an ascending probability vector:
/// `(1/n) Σ_k (2k - n - 1) p_k`.
///
/// Terms are combined pairwise (`k` with `n + 1 - k`, whose coefficients are
/// opposite), so a uniform vector yields exactly zero.
pub fn gini_index<S: Scalar>(p: &[S]) -> Result<S> {
    let n = p.len();
    if n == 0 {
        return Err(Error::InvalidDistribution("empty vector".into()));
    }
    if p.iter().any(|x| !x.is_finite() || *x < S::zero()) {
        return Err(Error::InvalidDistribution("entries must be finite and non-negative".into()));
    }
    if p.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidDistribution("entries must be sorted ascending".into()));
    }
    let total = ordered_sum(p.iter().copied());
    let tolerance = S::of_f64(1e-9) + S::epsilon() * S::of_usize(n);
    if (total - S::one()).abs() > tolerance {
        return Err(Error::InvalidDistribution(format!("entries sum to {total}, not 1")));
    }
    // coefficient of 1-based k is 2k - n - 1; pair k with n + 1 - k
    let mut acc = S::zero();
    for lo in 0..n / 2 {
        let hi = n - 1 - lo;
        let coefficient = S::of_usize(2 * (hi + 1)) - S::of_usize(n + 1);
        acc = acc + coefficient * (p[hi] - p[lo]);
    }
    Ok(acc / S::of_usize(n))
}

/// Fraction of the catalog recommended at least once.
pub fn catalog_coverage<S: Scalar>(matching: &Matching, catalog_size: usize) -> S {
    if catalog_size == 0 {
        return S::zero();
    }
    let covered = (0..matching.n_items())
        .filter(|&i| matching.item_count(i) > 0)
        .count();
    S::of_usize(covered) / S::of_usize(catalog_size)
}

/// Items as sparse rating vectors over users, for cosine distance.
pub struct ItemVectors<S> {
    columns: Vec<Vec<(usize, S)>>,
    sq_norms: Vec<S>,
}

impl<S: Scalar> ItemVectors<S> {
    pub fn from_ratings(train: &InteractionDataset<S>) -> Self {
        let columns = train.by_item();
        let sq_norms = columns
            .iter()
            .map(|c| ordered_sum(c.iter().map(|&(_, r)| r * r)))
            .collect();
        Self { columns, sq_norms }
    }

    /// `1 - cos(a, b)`; 1 when either vector is all zero, 0 for `a == b`.
    pub fn distance(&self, a: usize, b: usize) -> S {
        if a == b && self.sq_norms[a] > S::zero() {
            return S::zero();
        }
        let (na, nb) = (self.sq_norms[a], self.sq_norms[b]);
        if na == S::zero() || nb == S::zero() {
            return S::one();
        }
        let (ca, cb) = (&self.columns[a], &self.columns[b]);
        let (mut x, mut y) = (0, 0);
        let mut dot = S::zero();
        while x < ca.len() && y < cb.len() {
            match ca[x].0.cmp(&cb[y].0) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => {
                    dot = dot + ca[x].1 * cb[y].1;
                    x += 1;
                    y += 1;
                }
            }
        }
        S::one() - dot / (na * nb).sqrt()
    }
}

/// Average pairwise distance within one list; `None` for lists shorter than 2.
pub fn intra_list_distance<S: Scalar>(list: &[usize], vectors: &ItemVectors<S>) -> Option<S> {
    let len = list.len();
    if len < 2 {
        return None;
    }
    let mut total = S::zero();
    for (a, &i) in list.iter().enumerate() {
        for (b, &j) in list.iter().enumerate() {
            if a != b {
                total = total + vectors.distance(i, j);
            }
        }
    }
    Some(total / S::of_usize(len * (len - 1)))
}

/// Mean intra-list distance over users holding at least two items.
pub fn ild<S: Scalar>(matching: &Matching, train: &InteractionDataset<S>) -> S {
    let vectors = ItemVectors::from_ratings(train);
    mean((0..matching.n_users()).filter_map(|u| intra_list_distance(matching.user_items(u), &vectors)))
}
