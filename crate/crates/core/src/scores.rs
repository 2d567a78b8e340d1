//! Sparse predicted-relevance matrix with a per-user candidate mask.

use std::io::{BufRead, BufReader, Read, Write};

use crate::dataset::{EntityIndex, InteractionDataset};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Predicted score `s(u, i)` for scoreable user–item pairs.
///
/// Pairs in a user's training set are masked: they can never carry a score.
/// Pairs that are neither masked nor scored are candidates without evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix<S> {
    n_items: usize,
    rows: Vec<Vec<(u32, S)>>,
    masked: Vec<Vec<u32>>,
}

impl<S: Scalar> ScoreMatrix<S> {
    /// Empty matrix. `masked[u]` lists the items excluded for user `u`.
    pub fn new(n_items: usize, masked: Vec<Vec<usize>>) -> Self {
        assert!(n_items <= u32::MAX as usize, "item count exceeds u32 range");
        let masked = masked
            .into_iter()
            .map(|mut m| {
                m.sort_unstable();
                m.dedup();
                m.into_iter().map(|i| i as u32).collect()
            })
            .collect::<Vec<_>>();
        Self {
            n_items,
            rows: vec![Vec::new(); masked.len()],
            masked,
        }
    }

    /// Empty matrix over the training set's indices, masking training pairs.
    pub fn for_training(train: &InteractionDataset<S>) -> Self {
        let masked = train
            .by_user()
            .into_iter()
            .map(|row| row.into_iter().map(|(i, _)| i).collect())
            .collect();
        Self::new(train.n_items(), masked)
    }

    pub fn n_users(&self) -> usize {
        self.rows.len()
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn is_masked(&self, user: usize, item: usize) -> bool {
        self.masked[user].binary_search(&(item as u32)).is_ok()
    }

    /// Items user `user` may be recommended, ascending.
    pub fn candidates(&self, user: usize) -> impl Iterator<Item = usize> + '_ {
        let mask = &self.masked[user];
        let mut next_masked = 0;
        (0..self.n_items).filter(move |&i| {
            while next_masked < mask.len() && (mask[next_masked] as usize) < i {
                next_masked += 1;
            }
            !(next_masked < mask.len() && mask[next_masked] as usize == i)
        })
    }

    pub fn get(&self, user: usize, item: usize) -> Option<S> {
        let row = &self.rows[user];
        row.binary_search_by_key(&(item as u32), |&(i, _)| i)
            .ok()
            .map(|p| row[p].1)
    }

    /// Scored `(item, score)` pairs of `user`, ascending by item.
    pub fn row(&self, user: usize) -> impl ExactSizeIterator<Item = (usize, S)> + '_ {
        self.rows[user].iter().map(|&(i, s)| (i as usize, s))
    }

    /// Number of scored pairs.
    pub fn len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    /// Inserts or overwrites one score.
    pub fn set(&mut self, user: usize, item: usize, score: S) -> Result<()> {
        self.check(user, item, score)?;
        let row = &mut self.rows[user];
        match row.binary_search_by_key(&(item as u32), |&(i, _)| i) {
            Ok(p) => row[p].1 = score,
            Err(p) => row.insert(p, (item as u32, score)),
        }
        Ok(())
    }

    /// Replaces a whole row. Entries need not be sorted.
    pub fn set_row(&mut self, user: usize, mut entries: Vec<(usize, S)>) -> Result<()> {
        for &(item, score) in &entries {
            self.check(user, item, score)?;
        }
        entries.sort_unstable_by_key(|&(i, _)| i);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidConfig(format!(
                "duplicate item in score row of user {user}"
            )));
        }
        self.rows[user] = entries.into_iter().map(|(i, s)| (i as u32, s)).collect();
        Ok(())
    }

    fn check(&self, user: usize, item: usize, score: S) -> Result<()> {
        if user >= self.rows.len() || item >= self.n_items {
            return Err(Error::InvalidConfig(format!(
                "score for ({user}, {item}) outside a {}x{} matrix",
                self.rows.len(),
                self.n_items
            )));
        }
        if !score.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "non-finite score for ({user}, {item})"
            )));
        }
        if self.is_masked(user, item) {
            return Err(Error::InvalidConfig(format!(
                "({user}, {item}) is a training pair and cannot be scored"
            )));
        }
        Ok(())
    }

    /// Applies `f(user, item, score)` to every scored pair.
    pub fn map(&self, mut f: impl FnMut(usize, usize, S) -> S) -> Self {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(u, row)| row.iter().map(|&(i, s)| (i, f(u, i as usize, s))).collect())
            .collect();
        Self {
            n_items: self.n_items,
            rows,
            masked: self.masked.clone(),
        }
    }

    /// Writes `user,item,score` rows with a header, users and items resolved
    /// through the given indices.
    pub fn write<W: Write>(
        &self,
        mut out: W,
        users: &EntityIndex,
        items: &EntityIndex,
    ) -> Result<()> {
        writeln!(out, "user,item,score")?;
        for (u, row) in self.rows.iter().enumerate() {
            for &(i, s) in row {
                writeln!(out, "{},{},{}", users.id(u), items.id(i as usize), s)?;
            }
        }
        Ok(())
    }
}

/// Reads externally computed scores (`user,item,score`, optional header)
/// against the indices and training mask of `train`.
pub fn load_external_scores<S: Scalar, R: Read>(
    source: R,
    train: &InteractionDataset<S>,
) -> Result<ScoreMatrix<S>> {
    let mut matrix = ScoreMatrix::for_training(train);
    let (users, items) = (train.users(), train.items());
    let mut first_content = true;
    for (n, line) in BufReader::new(source).lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| Error::parse(line_no, format!("unreadable line: {e}")))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let is_first = std::mem::replace(&mut first_content, false);
        if fields.len() != 3 {
            return Err(Error::parse(
                line_no,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        let score = match fields[2].trim().parse::<S>() {
            Ok(s) if s.is_finite() => s,
            Ok(_) => return Err(Error::parse(line_no, "non-finite score")),
            Err(_) if is_first => continue,
            Err(_) => {
                return Err(Error::parse(
                    line_no,
                    format!("score {:?} is not a number", fields[2]),
                ))
            }
        };
        let user = users
            .index_of(fields[0])
            .ok_or_else(|| Error::UnknownIdentifier {
                line: line_no,
                kind: "user",
                id: fields[0].to_owned(),
            })?;
        let item = items
            .index_of(fields[1])
            .ok_or_else(|| Error::UnknownIdentifier {
                line: line_no,
                kind: "item",
                id: fields[1].to_owned(),
            })?;
        if matrix.is_masked(user, item) {
            return Err(Error::MaskViolation {
                line: line_no,
                user: fields[0].to_owned(),
                item: fields[1].to_owned(),
            });
        }
        if matrix.get(user, item).is_some() {
            return Err(Error::parse(line_no, "duplicate score for this pair"));
        }
        matrix.set(user, item, score)?;
    }
    Ok(matrix)
}
