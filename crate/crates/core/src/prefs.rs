//! Strict preference orders of users over items and items over users.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::scores::ScoreMatrix;

/// How candidates without a score enter the rankings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Completion {
    /// Only scored pairs are ranked.
    #[default]
    ScoredOnly,
    /// Unscored candidate pairs follow all scored ones, ascending by index,
    /// on both the user and the item side.
    AppendUnscored,
}

/// Dense `rows x cols` table of 1-based positions, 0 for "not ranked".
#[derive(Debug, Clone, PartialEq, Eq)]
struct RankTable {
    cols: usize,
    positions: Vec<u32>,
}

impl RankTable {
    fn build(lists: &[Vec<usize>], cols: usize, what: &str) -> Result<Self> {
        if cols >= u32::MAX as usize {
            return Err(Error::InvalidRanking(format!("too many {what} entries")));
        }
        let mut positions = vec![0u32; lists.len() * cols];
        for (owner, list) in lists.iter().enumerate() {
            let row = &mut positions[owner * cols..(owner + 1) * cols];
            for (p, &x) in list.iter().enumerate() {
                if x >= cols {
                    return Err(Error::InvalidRanking(format!(
                        "{what} ranking {owner} references {x}, outside 0..{cols}"
                    )));
                }
                if row[x] != 0 {
                    return Err(Error::InvalidRanking(format!(
                        "{what} ranking {owner} lists {x} twice"
                    )));
                }
                row[x] = (p + 1) as u32;
            }
        }
        Ok(Self { cols, positions })
    }

    #[inline]
    fn get(&self, owner: usize, x: usize) -> Option<usize> {
        match self.positions[owner * self.cols + x] {
            0 => None,
            p => Some(p as usize - 1),
        }
    }
}

/// `≻_u` for every user and `≻_i` for every item, stored as ranked
/// sequences (best first) with constant-time rank lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceProfile {
    user_prefs: Vec<Vec<usize>>,
    item_prefs: Vec<Vec<usize>>,
    user_ranks: RankTable,
    item_ranks: RankTable,
    truncation: Option<usize>,
}

impl PreferenceProfile {
    /// Validates and indexes explicit rankings.
    pub fn from_rankings(
        user_prefs: Vec<Vec<usize>>,
        item_prefs: Vec<Vec<usize>>,
        truncation: Option<usize>,
    ) -> Result<Self> {
        if user_prefs.is_empty() || item_prefs.is_empty() {
            return Err(Error::InvalidRanking(
                "need at least one user and one item".into(),
            ));
        }
        if let Some(t) = truncation {
            if t == 0 {
                return Err(Error::InvalidConfig("truncation length must be positive".into()));
            }
            let longest = user_prefs.iter().chain(&item_prefs).map(Vec::len).max();
            if longest.unwrap_or(0) > t {
                return Err(Error::InvalidRanking(format!(
                    "a ranking is longer than the truncation length {t}"
                )));
            }
        }
        let user_ranks = RankTable::build(&user_prefs, item_prefs.len(), "user")?;
        let item_ranks = RankTable::build(&item_prefs, user_prefs.len(), "item")?;
        Ok(Self {
            user_prefs,
            item_prefs,
            user_ranks,
            item_ranks,
            truncation,
        })
    }

    pub fn n_users(&self) -> usize {
        self.user_prefs.len()
    }

    pub fn n_items(&self) -> usize {
        self.item_prefs.len()
    }

    /// `≻_u`, best item first.
    pub fn user_pref(&self, user: usize) -> &[usize] {
        &self.user_prefs[user]
    }

    /// `≻_i`, best user first.
    pub fn item_pref(&self, item: usize) -> &[usize] {
        &self.item_prefs[item]
    }

    pub fn truncation(&self) -> Option<usize> {
        self.truncation
    }

    /// 0-based position of `item` in `≻_user`.
    #[inline]
    pub fn user_rank(&self, user: usize, item: usize) -> Option<usize> {
        self.user_ranks.get(user, item)
    }

    /// 0-based position of `user` in `≻_item`.
    #[inline]
    pub fn item_rank(&self, item: usize, user: usize) -> Option<usize> {
        self.item_ranks.get(item, user)
    }

    /// Total order key of `user` for `item`: its position when ranked,
    /// otherwise after every ranked user, ordered by index. Smaller is better.
    #[inline]
    pub fn item_order_key(&self, item: usize, user: usize) -> usize {
        self.item_rank(item, user)
            .unwrap_or(self.item_prefs[item].len() + user)
    }

    /// True when `item` strictly prefers user `a` to user `b`.
    #[inline]
    pub fn item_prefers(&self, item: usize, a: usize, b: usize) -> bool {
        self.item_order_key(item, a) < self.item_order_key(item, b)
    }

    /// True when `user` strictly prefers item `a` to item `b`. Unranked items
    /// are never preferred to anything.
    #[inline]
    pub fn user_prefers(&self, user: usize, a: usize, b: usize) -> bool {
        match (self.user_rank(user, a), self.user_rank(user, b)) {
            (Some(ra), Some(rb)) => ra < rb,
            (Some(_), None) => true,
            _ => false,
        }
    }
}

fn by_score_then_index<S: Scalar>(a: &(usize, S), b: &(usize, S)) -> std::cmp::Ordering {
    b.1.partial_cmp(&a.1)
        .expect("scores are finite")
        .then(a.0.cmp(&b.0))
}

/// Ranks candidates by descending score on both sides, breaking ties by
/// ascending index, optionally truncating every list.
pub fn build_preferences<S: Scalar>(
    scores: &ScoreMatrix<S>,
    truncation: Option<usize>,
    completion: Completion,
) -> Result<PreferenceProfile> {
    if scores.is_empty() && completion == Completion::ScoredOnly {
        return Err(Error::InvalidConfig("score matrix is empty".into()));
    }
    let cut = |mut v: Vec<usize>| {
        if let Some(t) = truncation {
            v.truncate(t);
        }
        v
    };

    let user_prefs: Vec<Vec<usize>> = (0..scores.n_users())
        .into_par_iter()
        .map(|u| {
            let mut row: Vec<(usize, S)> = scores.row(u).collect();
            row.sort_by(by_score_then_index);
            let mut order: Vec<usize> = row.iter().map(|&(i, _)| i).collect();
            if completion == Completion::AppendUnscored {
                order.extend(scores.candidates(u).filter(|&i| scores.get(u, i).is_none()));
            }
            cut(order)
        })
        .collect();

    let mut columns: Vec<Vec<(usize, S)>> = vec![Vec::new(); scores.n_items()];
    for u in 0..scores.n_users() {
        for (i, s) in scores.row(u) {
            columns[i].push((u, s));
        }
    }
    let mut unscored: Vec<Vec<usize>> = vec![Vec::new(); scores.n_items()];
    if completion == Completion::AppendUnscored {
        for u in 0..scores.n_users() {
            for i in scores.candidates(u).filter(|&i| scores.get(u, i).is_none()) {
                unscored[i].push(u);
            }
        }
    }
    let item_prefs: Vec<Vec<usize>> = columns
        .into_par_iter()
        .zip(unscored)
        .map(|(mut col, tail)| {
            col.sort_by(by_score_then_index);
            let mut order: Vec<usize> = col.iter().map(|&(u, _)| u).collect();
            order.extend(tail);
            cut(order)
        })
        .collect();

    PreferenceProfile::from_rankings(user_prefs, item_prefs, truncation)
}
