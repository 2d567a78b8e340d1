//! User-based k-nearest-neighbour scoring.
//!
//! Similarity is the cosine of two users' raw rating vectors restricted to
//! the items both rated. Each user keeps a single global neighbourhood of the
//! `neighbors` most similar users with positive similarity, and the score of
//! a candidate item is the similarity-weighted mean of the neighbours'
//! ratings for it. Items no neighbour rated stay unscored.

use rayon::prelude::*;

use crate::dataset::InteractionDataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::scores::ScoreMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnnConfig {
    /// Neighbourhood size.
    pub neighbors: usize,
    /// Minimum number of co-rated items for a similarity to count.
    pub min_overlap: usize,
}

impl KnnConfig {
    pub fn new(neighbors: usize, min_overlap: usize) -> Result<Self> {
        if neighbors == 0 {
            return Err(Error::InvalidConfig("neighbors must be at least 1".into()));
        }
        Ok(Self {
            neighbors,
            min_overlap,
        })
    }
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self {
            neighbors: 10,
            min_overlap: 1,
        }
    }
}

struct Accumulator<S> {
    dot: Vec<S>,
    own_norm: Vec<S>,
    other_norm: Vec<S>,
    overlap: Vec<usize>,
    touched: Vec<usize>,
}

impl<S: Scalar> Accumulator<S> {
    fn new(n: usize) -> Self {
        Self {
            dot: vec![S::zero(); n],
            own_norm: vec![S::zero(); n],
            other_norm: vec![S::zero(); n],
            overlap: vec![0; n],
            touched: Vec::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.dot[v] = S::zero();
            self.own_norm[v] = S::zero();
            self.other_norm[v] = S::zero();
            self.overlap[v] = 0;
        }
        self.touched.clear();
    }
}

fn similarity_row<S: Scalar>(
    user: usize,
    rows: &[Vec<(usize, S)>],
    cols: &[Vec<(usize, S)>],
    min_overlap: usize,
    acc: &mut Accumulator<S>,
) -> Vec<(usize, S)> {
    acc.reset();
    for &(i, r_u) in &rows[user] {
        for &(v, r_v) in &cols[i] {
            if v == user {
                continue;
            }
            if acc.overlap[v] == 0 {
                acc.touched.push(v);
            }
            acc.overlap[v] += 1;
            acc.dot[v] = acc.dot[v] + r_u * r_v;
            acc.own_norm[v] = acc.own_norm[v] + r_u * r_u;
            acc.other_norm[v] = acc.other_norm[v] + r_v * r_v;
        }
    }
    let mut sims: Vec<(usize, S)> = acc
        .touched
        .iter()
        .filter(|&&v| acc.overlap[v] >= min_overlap)
        .filter_map(|&v| {
            let denom = acc.own_norm[v].sqrt() * acc.other_norm[v].sqrt();
            let sim = if denom > S::zero() {
                acc.dot[v] / denom
            } else {
                S::zero()
            };
            (sim > S::zero()).then_some((v, sim))
        })
        .collect();
    sims.sort_unstable_by_key(|&(v, _)| v);
    sims
}

/// Positive cosine similarities of every user, as `(other user, similarity)`
/// ascending by user index. Users below `min_overlap` co-ratings are omitted.
pub fn user_similarities<S: Scalar>(
    train: &InteractionDataset<S>,
    config: &KnnConfig,
) -> Vec<Vec<(usize, S)>> {
    let rows = train.by_user();
    let cols = train.by_item();
    (0..train.n_users())
        .into_par_iter()
        .map_init(
            || Accumulator::new(train.n_users()),
            |acc, u| similarity_row(u, &rows, &cols, config.min_overlap, acc),
        )
        .collect()
}

/// Selects the `k` most similar users, most similar first, ties by index.
pub fn top_neighbors<S: Scalar>(mut sims: Vec<(usize, S)>, k: usize) -> Vec<(usize, S)> {
    sims.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("finite similarity")
            .then(a.0.cmp(&b.0))
    });
    sims.truncate(k);
    sims
}

/// Scores every candidate pair for which some neighbour has evidence.
pub fn knn_scores<S: Scalar>(
    train: &InteractionDataset<S>,
    config: &KnnConfig,
) -> Result<ScoreMatrix<S>> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if config.neighbors == 0 {
        return Err(Error::InvalidConfig("neighbors must be at least 1".into()));
    }
    let rows = train.by_user();
    let cols = train.by_item();
    let n_items = train.n_items();

    let scored: Vec<Vec<(usize, S)>> = (0..train.n_users())
        .into_par_iter()
        .map_init(
            || {
                (
                    Accumulator::new(train.n_users()),
                    vec![S::zero(); n_items],
                    vec![S::zero(); n_items],
                    vec![false; n_items],
                )
            },
            |(acc, num, den, own), u| {
                let sims = similarity_row(u, &rows, &cols, config.min_overlap, acc);
                let neighbors = top_neighbors(sims, config.neighbors);
                for &(i, _) in &rows[u] {
                    own[i] = true;
                }
                let mut touched = Vec::new();
                for &(v, sim) in &neighbors {
                    for &(i, r) in &rows[v] {
                        if own[i] {
                            continue;
                        }
                        if den[i] == S::zero() {
                            touched.push(i);
                        }
                        num[i] = num[i] + sim * r;
                        den[i] = den[i] + sim;
                    }
                }
                let entries = touched
                    .iter()
                    .map(|&i| (i, num[i] / den[i]))
                    .collect::<Vec<_>>();
                for &i in &touched {
                    num[i] = S::zero();
                    den[i] = S::zero();
                }
                for &(i, _) in &rows[u] {
                    own[i] = false;
                }
                entries
            },
        )
        .collect();

    let mut matrix = ScoreMatrix::for_training(train);
    for (u, entries) in scored.into_iter().enumerate() {
        matrix.set_row(u, entries)?;
    }
    Ok(matrix)
}
