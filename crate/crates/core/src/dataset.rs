//! Rating datasets: ingestion, dense indexing and serialization.

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;
use std::sync::Arc;

use indexmap::IndexSet;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// On-disk layout of a ratings file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// `user::item::rating::timestamp`
    MovielensDat,
    /// `user,item,rating[,timestamp]` with an optional header line.
    Csv,
}

impl Format {
    fn separator(self) -> &'static str {
        match self {
            Format::MovielensDat => "::",
            Format::Csv => ",",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "movielens-dat" | "dat" => Ok(Format::MovielensDat),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidConfig(format!(
                "unknown dataset format {other:?} (expected movielens-dat or csv)"
            ))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::MovielensDat => "movielens-dat",
            Format::Csv => "csv",
        })
    }
}

/// Bijection between opaque identifiers and dense indices `0..len`.
///
/// Indices follow first-appearance order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EntityIndex {
    ids: IndexSet<String>,
}

impl EntityIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the index of `id`, assigning the next one if unseen.
    pub fn intern(&mut self, id: &str) -> usize {
        match self.ids.get_index_of(id) {
            Some(idx) => idx,
            None => self.ids.insert_full(id.to_owned()).0,
        }
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.get_index_of(id)
    }

    pub fn id(&self, index: usize) -> &str {
        &self.ids[index]
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.ids.iter().map(String::as_str)
    }
}

impl<'a> FromIterator<&'a str> for EntityIndex {
    fn from_iter<T: IntoIterator<Item = &'a str>>(iter: T) -> Self {
        let mut index = EntityIndex::new();
        for id in iter {
            index.intern(id);
        }
        index
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interaction<S> {
    pub user: usize,
    pub item: usize,
    pub rating: S,
    pub timestamp: Option<i64>,
}

/// User–item–rating triples over shared user and item indices.
///
/// The indices are reference counted so that the parts of a split and the
/// source dataset can share one bijection.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionDataset<S> {
    users: Arc<EntityIndex>,
    items: Arc<EntityIndex>,
    interactions: Vec<Interaction<S>>,
}

impl<S: Scalar> InteractionDataset<S> {
    /// Assembles a dataset, rejecting duplicate pairs and out-of-range indices.
    pub fn from_parts(
        users: Arc<EntityIndex>,
        items: Arc<EntityIndex>,
        interactions: Vec<Interaction<S>>,
    ) -> Result<Self> {
        if users.is_empty() || items.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut seen = HashSet::with_capacity(interactions.len());
        for (n, it) in interactions.iter().enumerate() {
            if it.user >= users.len() || it.item >= items.len() {
                return Err(Error::InvalidConfig(format!(
                    "interaction {n} references user {} / item {} outside the index",
                    it.user, it.item
                )));
            }
            if !it.rating.is_finite() {
                return Err(Error::parse(n + 1, "non-finite rating"));
            }
            if !seen.insert((it.user, it.item)) {
                return Err(Error::Duplicate {
                    line: n + 1,
                    user: users.id(it.user).to_owned(),
                    item: items.id(it.item).to_owned(),
                });
            }
        }
        Ok(Self {
            users,
            items,
            interactions,
        })
    }

    /// Same indices, different interactions. Callers guarantee uniqueness.
    pub(crate) fn with_interactions(&self, interactions: Vec<Interaction<S>>) -> Self {
        Self {
            users: Arc::clone(&self.users),
            items: Arc::clone(&self.items),
            interactions,
        }
    }

    pub fn users(&self) -> &Arc<EntityIndex> {
        &self.users
    }

    pub fn items(&self) -> &Arc<EntityIndex> {
        &self.items
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn interactions(&self) -> &[Interaction<S>] {
        &self.interactions
    }

    pub fn len(&self) -> usize {
        self.interactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interactions.is_empty()
    }

    /// Per-user `(item, rating)` lists sorted by item index.
    pub fn by_user(&self) -> Vec<Vec<(usize, S)>> {
        let mut rows = vec![Vec::new(); self.n_users()];
        for it in &self.interactions {
            rows[it.user].push((it.item, it.rating));
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|&(i, _)| i);
        }
        rows
    }

    /// Per-item `(user, rating)` lists sorted by user index.
    pub fn by_item(&self) -> Vec<Vec<(usize, S)>> {
        let mut cols = vec![Vec::new(); self.n_items()];
        for it in &self.interactions {
            cols[it.item].push((it.user, it.rating));
        }
        for col in &mut cols {
            col.sort_unstable_by_key(|&(u, _)| u);
        }
        cols
    }

    /// Smallest and largest rating, `None` when empty.
    pub fn rating_range(&self) -> Option<(S, S)> {
        self.interactions.iter().fold(None, |acc, it| match acc {
            None => Some((it.rating, it.rating)),
            Some((lo, hi)) => Some((lo.min(it.rating), hi.max(it.rating))),
        })
    }

    /// Iteratively drops users with fewer than `min_user` and items with
    /// fewer than `min_item` interactions until both thresholds hold, then
    /// re-indexes the survivors in their original order.
    pub fn k_core(&self, min_user: usize, min_item: usize) -> Result<Self> {
        let mut alive = vec![true; self.interactions.len()];
        loop {
            let mut user_deg = vec![0usize; self.n_users()];
            let mut item_deg = vec![0usize; self.n_items()];
            for (it, _) in self.interactions.iter().zip(&alive).filter(|(_, a)| **a) {
                user_deg[it.user] += 1;
                item_deg[it.item] += 1;
            }
            let mut changed = false;
            for (it, a) in self.interactions.iter().zip(alive.iter_mut()) {
                if *a && (user_deg[it.user] < min_user || item_deg[it.item] < min_item) {
                    *a = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let mut users = EntityIndex::new();
        let mut items = EntityIndex::new();
        let kept = self
            .interactions
            .iter()
            .zip(&alive)
            .filter(|(_, a)| **a)
            .map(|(it, _)| Interaction {
                user: users.intern(self.users.id(it.user)),
                item: items.intern(self.items.id(it.item)),
                ..*it
            })
            .collect::<Vec<_>>();
        if kept.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(Self {
            users: Arc::new(users),
            items: Arc::new(items),
            interactions: kept,
        })
    }

    /// Writes one line per interaction in `format`. CSV output has no header.
    pub fn write<W: Write>(&self, mut out: W, format: Format) -> Result<()> {
        let sep = format.separator();
        for it in &self.interactions {
            write!(
                out,
                "{}{sep}{}{sep}{}",
                self.users.id(it.user),
                self.items.id(it.item),
                it.rating
            )?;
            if let Some(ts) = it.timestamp {
                write!(out, "{sep}{ts}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Reads a ratings file. Blank lines are skipped; in CSV a first line whose
/// rating column is not numeric is treated as a header.
pub fn load_interactions<S: Scalar, R: Read>(
    source: R,
    format: Format,
) -> Result<InteractionDataset<S>> {
    let reader = BufReader::new(source);
    let sep = format.separator();
    let mut users = EntityIndex::new();
    let mut items = EntityIndex::new();
    let mut seen = HashSet::new();
    let mut interactions = Vec::new();
    let mut first_content = true;

    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| Error::parse(line_no, format!("unreadable line: {e}")))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(sep).collect();
        let is_first = std::mem::replace(&mut first_content, false);
        if is_first
            && format == Format::Csv
            && fields.get(2).is_none_or(|r| r.trim().parse::<f64>().is_err())
        {
            // header
            continue;
        }
        if fields.len() != 3 && fields.len() != 4 {
            return Err(Error::parse(
                line_no,
                format!("expected 3 or 4 fields, found {}", fields.len()),
            ));
        }
        let rating = match fields[2].trim().parse::<S>() {
            Ok(r) if r.is_finite() => r,
            Ok(_) => return Err(Error::parse(line_no, "non-finite rating")),
            Err(_) => {
                return Err(Error::parse(
                    line_no,
                    format!("rating {:?} is not a number", fields[2]),
                ))
            }
        };
        let timestamp = match fields.get(3) {
            None => None,
            Some(t) => Some(t.trim().parse::<i64>().map_err(|_| {
                Error::parse(line_no, format!("timestamp {t:?} is not an integer"))
            })?),
        };
        let user = users.intern(fields[0]);
        let item = items.intern(fields[1]);
        if !seen.insert((user, item)) {
            return Err(Error::Duplicate {
                line: line_no,
                user: fields[0].to_owned(),
                item: fields[1].to_owned(),
            });
        }
        interactions.push(Interaction {
            user,
            item,
            rating,
            timestamp,
        });
    }

    if interactions.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(InteractionDataset {
        users: Arc::new(users),
        items: Arc::new(items),
        interactions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str, format: Format) -> Result<InteractionDataset<f64>> {
        load_interactions(text.as_bytes(), format)
    }

    #[test]
    fn movielens_line() {
        let d = load("1::1193::5::978300760\n", Format::MovielensDat).unwrap();
        let it = d.interactions()[0];
        assert_eq!(d.users().id(it.user), "1");
        assert_eq!(d.items().id(it.item), "1193");
        assert_eq!(it.rating, 5.0);
        assert_eq!(it.timestamp, Some(978300760));
    }

    #[test]
    fn csv_without_timestamp() {
        let d = load("u1,i1,4.0\n", Format::Csv).unwrap();
        let it = d.interactions()[0];
        assert_eq!((d.users().id(0), d.items().id(0)), ("u1", "i1"));
        assert_eq!(it.rating, 4.0);
        assert_eq!(it.timestamp, None);
    }

    #[test]
    fn csv_header_is_skipped() {
        let d = load("user,item,rating\nu1,i1,4\n\nu2,i1,3\n", Format::Csv).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.n_users(), 2);
        assert_eq!(d.n_items(), 1);
    }

    #[test]
    fn duplicate_pair_reports_line() {
        match load("u1,i1,4.0\nu1,i1,3.0\n", Format::Csv) {
            Err(Error::Duplicate { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected duplicate error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(
            load("u1,i1,4\nu2,i2\n", Format::Csv),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            load("1::2::x::3\n", Format::MovielensDat),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            load("u1,i1,4\nu2,i2,five\n", Format::Csv),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(load("\n\n", Format::Csv), Err(Error::EmptyDataset)));
    }

    #[test]
    fn indices_follow_first_appearance() {
        let d = load("b,y,1\na,x,2\nb,x,3\n", Format::Csv).unwrap();
        assert_eq!(d.users().index_of("b"), Some(0));
        assert_eq!(d.users().index_of("a"), Some(1));
        assert_eq!(d.items().index_of("y"), Some(0));
        assert_eq!(d.items().index_of("x"), Some(1));
    }

    #[test]
    fn k_core_drops_sparse_entities() {
        let text = "a,x,1\na,y,1\nb,x,1\nb,y,1\nc,z,1\n";
        let d = load(text, Format::Csv).unwrap();
        let core = d.k_core(2, 2).unwrap();
        assert_eq!(core.len(), 4);
        assert_eq!(core.n_users(), 2);
        assert_eq!(core.n_items(), 2);
        assert!(core.users().index_of("c").is_none());
    }

    #[test]
    fn format_names() {
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert_eq!(
            "movielens-dat".parse::<Format>().unwrap(),
            Format::MovielensDat
        );
        assert!("tsv".parse::<Format>().is_err());
    }
}
