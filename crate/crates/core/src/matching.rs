//! Bipartite user–item assignments and their csv form.

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Read, Write};

use crate::capacity::CapacityConfig;
use crate::dataset::EntityIndex;
use crate::error::{Error, Result};
use crate::prefs::PreferenceProfile;

/// An assignment `μ` seen from both sides.
///
/// `μ_u` keeps an explicit order (acquisition order for deferred acceptance,
/// rank order for baselines); `μ_i` is kept ascending by user index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    user_lists: Vec<Vec<usize>>,
    item_lists: Vec<Vec<usize>>,
}

impl Matching {
    pub fn empty(n_users: usize, n_items: usize) -> Self {
        Self {
            user_lists: vec![Vec::new(); n_users],
            item_lists: vec![Vec::new(); n_items],
        }
    }

    /// Builds both views from per-user item sequences.
    pub fn from_user_lists(n_items: usize, user_lists: Vec<Vec<usize>>) -> Result<Self> {
        let mut item_lists = vec![Vec::new(); n_items];
        for (u, list) in user_lists.iter().enumerate() {
            for (p, &i) in list.iter().enumerate() {
                if i >= n_items {
                    return Err(Error::InvalidMatching(format!(
                        "user {u} is matched to item {i}, outside 0..{n_items}"
                    )));
                }
                if list[..p].contains(&i) {
                    return Err(Error::InvalidMatching(format!(
                        "user {u} is matched to item {i} twice"
                    )));
                }
                item_lists[i].push(u);
            }
        }
        Ok(Self {
            user_lists,
            item_lists,
        })
    }

    /// Builds a matching from a pair set; user lists come out ascending.
    pub fn from_pairs(
        n_users: usize,
        n_items: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut lists = vec![Vec::new(); n_users];
        for (u, i) in pairs {
            if u >= n_users {
                return Err(Error::InvalidMatching(format!("user {u} out of range")));
            }
            lists[u].push(i);
        }
        for l in &mut lists {
            l.sort_unstable();
        }
        Self::from_user_lists(n_items, lists)
    }

    pub fn n_users(&self) -> usize {
        self.user_lists.len()
    }

    pub fn n_items(&self) -> usize {
        self.item_lists.len()
    }

    /// `μ_u` in stored order.
    pub fn user_items(&self, user: usize) -> &[usize] {
        &self.user_lists[user]
    }

    /// `μ_i`, ascending by user index.
    pub fn item_users(&self, item: usize) -> &[usize] {
        &self.item_lists[item]
    }

    /// `n_i`.
    pub fn item_count(&self, item: usize) -> usize {
        self.item_lists[item].len()
    }

    pub fn contains(&self, user: usize, item: usize) -> bool {
        self.item_lists[item].binary_search(&user).is_ok()
    }

    /// Number of assigned pairs.
    pub fn len(&self) -> usize {
        self.user_lists.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pairs(&self) -> BTreeSet<(usize, usize)> {
        self.user_lists
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().map(move |&i| (u, i)))
            .collect()
    }

    /// Copy with every `μ_u` re-ordered by `≻_u` (unranked items last, by index).
    pub fn sorted_by_preference(&self, prefs: &PreferenceProfile) -> Self {
        let user_lists = self
            .user_lists
            .iter()
            .enumerate()
            .map(|(u, l)| {
                let mut l = l.clone();
                l.sort_by_key(|&i| (prefs.user_rank(u, i).unwrap_or(usize::MAX), i));
                l
            })
            .collect();
        Self {
            user_lists,
            item_lists: self.item_lists.clone(),
        }
    }

    /// Checks `|μ_u| = k` for every user and `n_i <= c_i` for every item.
    pub fn check_complete(&self, caps: &CapacityConfig) -> Result<()> {
        if caps.caps().len() != self.n_items() {
            return Err(Error::InvalidMatching(format!(
                "{} caps for {} items",
                caps.caps().len(),
                self.n_items()
            )));
        }
        if let Some(u) = self.user_lists.iter().position(|l| l.len() != caps.k()) {
            return Err(Error::InvalidMatching(format!(
                "user {u} holds {} items, expected {}",
                self.user_lists[u].len(),
                caps.k()
            )));
        }
        if let Some(i) = (0..self.n_items()).find(|&i| self.item_count(i) > caps.cap(i)) {
            return Err(Error::InvalidMatching(format!(
                "item {i} is matched {} times, cap {}",
                self.item_count(i),
                caps.cap(i)
            )));
        }
        Ok(())
    }

    /// Writes `user,item,rank` rows (rank = 1-based position in `μ_u`) with a header.
    pub fn write_csv<W: Write>(
        &self,
        mut out: W,
        users: &EntityIndex,
        items: &EntityIndex,
    ) -> Result<()> {
        writeln!(out, "user,item,rank")?;
        for (u, list) in self.user_lists.iter().enumerate() {
            for (p, &i) in list.iter().enumerate() {
                writeln!(out, "{},{},{}", users.id(u), items.id(i), p + 1)?;
            }
        }
        Ok(())
    }

    /// Reads a `user,item,rank` file, ordering each `μ_u` by rank.
    pub fn read_csv<R: Read>(source: R, users: &EntityIndex, items: &EntityIndex) -> Result<Self> {
        let mut ranked: Vec<Vec<(usize, usize)>> = vec![Vec::new(); users.len()];
        for (n, line) in BufReader::new(source).lines().enumerate() {
            let line_no = n + 1;
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || (line_no == 1 && line == "user,item,rank") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::parse(line_no, "expected user,item,rank"));
            }
            let resolve = |index: &EntityIndex, id: &str, kind| {
                index.index_of(id).ok_or_else(|| Error::UnknownIdentifier {
                    line: line_no,
                    kind,
                    id: id.to_owned(),
                })
            };
            let u = resolve(users, fields[0], "user")?;
            let i = resolve(items, fields[1], "item")?;
            let rank = fields[2]
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::parse(line_no, format!("bad rank {:?}", fields[2])))?;
            ranked[u].push((rank, i));
        }
        let lists = ranked
            .into_iter()
            .map(|mut l| {
                l.sort_unstable();
                l.into_iter().map(|(_, i)| i).collect()
            })
            .collect();
        Self::from_user_lists(items.len(), lists)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn views_agree() {
        let m = Matching::from_user_lists(3, vec![vec![2, 0], vec![0]]).unwrap();
        assert_eq!(m.item_users(0), &[0, 1]);
        assert_eq!(m.item_users(2), &[0]);
        assert_eq!(m.item_count(1), 0);
        assert!(m.contains(1, 0));
        assert_eq!(m.pairs().len(), m.len());
    }

    #[test]
    fn rejects_repeated_item() {
        assert!(Matching::from_user_lists(2, vec![vec![1, 1]]).is_err());
        assert!(Matching::from_user_lists(2, vec![vec![2]]).is_err());
    }

    #[test]
    fn completeness() {
        let m = Matching::from_user_lists(2, vec![vec![0], vec![0]]).unwrap();
        assert!(m.check_complete(&CapacityConfig::uniform(1, 2, 2).unwrap()).is_ok());
        assert!(m.check_complete(&CapacityConfig::uniform(1, 1, 2).unwrap()).is_err());
        assert!(m.check_complete(&CapacityConfig::uniform(2, 2, 2).unwrap()).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let users: EntityIndex = ["a", "b"].into_iter().collect();
        let items: EntityIndex = ["x", "y", "z"].into_iter().collect();
        let m = Matching::from_user_lists(3, vec![vec![2, 0], vec![1, 2]]).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf, &users, &items).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("user,item,rank\na,z,1\na,x,2\n"));
        assert_eq!(Matching::read_csv(buf.as_slice(), &users, &items).unwrap(), m);
    }
}
