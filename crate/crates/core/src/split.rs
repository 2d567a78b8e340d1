//! Per-user stratified train/validation/test splitting and the split manifest.

use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{EntityIndex, Interaction, InteractionDataset};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Users with fewer interactions than this keep everything in train.
pub const MIN_SPLIT_INTERACTIONS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Train,
    Validation,
    Test,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Train => "train",
            Role::Validation => "validation",
            Role::Test => "test",
        })
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "train" => Ok(Role::Train),
            "validation" => Ok(Role::Validation),
            "test" => Ok(Role::Test),
            other => Err(format!("unknown role {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl SplitRatios {
    pub fn new(train: f64, validation: f64, test: f64) -> Result<Self> {
        let r = Self {
            train,
            validation,
            test,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.validation, self.test];
        if parts.iter().any(|p| !p.is_finite() || *p <= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "split ratios must be positive, got {parts:?}"
            )));
        }
        let total: f64 = parts.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "split ratios must sum to 1, got {total}"
            )));
        }
        Ok(())
    }
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self {
            train: 0.8,
            validation: 0.1,
            test: 0.1,
        }
    }
}

/// Three disjoint parts of one source dataset over shared indices.
#[derive(Debug, Clone)]
pub struct DatasetSplit<S> {
    pub train: InteractionDataset<S>,
    pub validation: InteractionDataset<S>,
    pub test: InteractionDataset<S>,
    source: InteractionDataset<S>,
    roles: Vec<Role>,
    seed: Option<u64>,
}

impl<S: Scalar> DatasetSplit<S> {
    fn assemble(source: InteractionDataset<S>, roles: Vec<Role>, seed: Option<u64>) -> Self {
        let pick = |role: Role| {
            source.with_interactions(
                source
                    .interactions()
                    .iter()
                    .zip(&roles)
                    .filter(|(_, r)| **r == role)
                    .map(|(it, _)| *it)
                    .collect(),
            )
        };
        Self {
            train: pick(Role::Train),
            validation: pick(Role::Validation),
            test: pick(Role::Test),
            source,
            roles,
            seed,
        }
    }

    pub fn source(&self) -> &InteractionDataset<S> {
        &self.source
    }

    /// Role of each source interaction, aligned with `source().interactions()`.
    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    /// Seed the split was drawn with; `None` when read back from a manifest.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn part(&self, role: Role) -> &InteractionDataset<S> {
        match role {
            Role::Train => &self.train,
            Role::Validation => &self.validation,
            Role::Test => &self.test,
        }
    }

    /// Writes `user,item,rating,role` rows in source order, with a header.
    pub fn write_manifest<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "user,item,rating,role")?;
        let (users, items) = (self.source.users(), self.source.items());
        for (it, role) in self.source.interactions().iter().zip(&self.roles) {
            writeln!(
                out,
                "{},{},{},{}",
                users.id(it.user),
                items.id(it.item),
                it.rating,
                role
            )?;
        }
        Ok(())
    }
}

/// Reads a manifest written by [`DatasetSplit::write_manifest`].
pub fn read_manifest<S: Scalar, R: Read>(source: R) -> Result<DatasetSplit<S>> {
    let mut users = EntityIndex::new();
    let mut items = EntityIndex::new();
    let mut interactions = Vec::new();
    let mut roles = Vec::new();
    for (n, line) in BufReader::new(source).lines().enumerate() {
        let line_no = n + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || (line_no == 1 && line.starts_with("user,item,")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::parse(
                line_no,
                format!("expected 4 fields, found {}", fields.len()),
            ));
        }
        let rating = fields[2]
            .trim()
            .parse::<S>()
            .ok()
            .filter(|r| r.is_finite())
            .ok_or_else(|| Error::parse(line_no, format!("bad rating {:?}", fields[2])))?;
        let role = fields[3]
            .trim()
            .parse::<Role>()
            .map_err(|e| Error::parse(line_no, e))?;
        interactions.push(Interaction {
            user: users.intern(fields[0]),
            item: items.intern(fields[1]),
            rating,
            timestamp: None,
        });
        roles.push(role);
    }
    if interactions.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let source = InteractionDataset::from_parts(Arc::new(users), Arc::new(items), interactions)?;
    Ok(DatasetSplit::assemble(source, roles, None))
}

/// Splits each user's interactions by `ratios`, shuffling with a generator
/// seeded from `seed`. Validation and test sizes are rounded to the nearest
/// integer; train takes the remainder.
pub fn split_dataset<S: Scalar>(
    data: &InteractionDataset<S>,
    ratios: SplitRatios,
    seed: u64,
) -> Result<DatasetSplit<S>> {
    ratios.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let mut per_user: Vec<Vec<usize>> = vec![Vec::new(); data.n_users()];
    for (pos, it) in data.interactions().iter().enumerate() {
        per_user[it.user].push(pos);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut roles = vec![Role::Train; data.len()];
    for positions in &mut per_user {
        let n = positions.len();
        if n < MIN_SPLIT_INTERACTIONS {
            continue;
        }
        positions.shuffle(&mut rng);
        let n_test = (n as f64 * ratios.test).round() as usize;
        let n_val = ((n as f64 * ratios.validation).round() as usize).min(n - n_test);
        for &pos in &positions[..n_test] {
            roles[pos] = Role::Test;
        }
        for &pos in &positions[n_test..n_test + n_val] {
            roles[pos] = Role::Validation;
        }
    }
    Ok(DatasetSplit::assemble(data.clone(), roles, Some(seed)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{load_interactions, Format};

    fn user_dataset(counts: &[usize]) -> InteractionDataset<f64> {
        let mut text = String::new();
        for (u, &c) in counts.iter().enumerate() {
            for i in 0..c {
                text.push_str(&format!("u{u},i{i},{}\n", 1 + i % 5));
            }
        }
        load_interactions(text.as_bytes(), Format::Csv).unwrap()
    }

    fn count(d: &InteractionDataset<f64>, user: usize) -> usize {
        d.interactions().iter().filter(|it| it.user == user).count()
    }

    #[test]
    fn ten_interactions_split_8_1_1() {
        let d = user_dataset(&[10]);
        let s = split_dataset(&d, SplitRatios::default(), 7).unwrap();
        assert_eq!(
            (count(&s.train, 0), count(&s.validation, 0), count(&s.test, 0)),
            (8, 1, 1)
        );
    }

    #[test]
    fn deterministic_given_seed() {
        let d = user_dataset(&[10, 25, 4, 17]);
        let a = split_dataset(&d, SplitRatios::default(), 11).unwrap();
        let b = split_dataset(&d, SplitRatios::default(), 11).unwrap();
        assert_eq!(a.roles(), b.roles());
        let c = split_dataset(&d, SplitRatios::default(), 12).unwrap();
        assert_ne!(a.roles(), c.roles());
    }

    #[test]
    fn tiny_users_stay_in_train() {
        let d = user_dataset(&[2, 10]);
        let s = split_dataset(&d, SplitRatios::default(), 3).unwrap();
        assert_eq!(count(&s.train, 0), 2);
        assert_eq!(count(&s.validation, 0) + count(&s.test, 0), 0);
    }

    #[test]
    fn ratios_must_sum_to_one() {
        assert!(SplitRatios::new(0.5, 0.5, 0.5).is_err());
        assert!(SplitRatios::new(0.8, 0.2, 0.0).is_err());
        assert!(SplitRatios::new(0.7, 0.2, 0.1).is_ok());
    }

    #[test]
    fn manifest_round_trip() {
        let d = user_dataset(&[10, 5, 2]);
        let s = split_dataset(&d, SplitRatios::default(), 5).unwrap();
        let mut buf = Vec::new();
        s.write_manifest(&mut buf).unwrap();
        let back: DatasetSplit<f64> = read_manifest(buf.as_slice()).unwrap();
        assert_eq!(back.roles(), s.roles());
        assert_eq!(back.train.interactions().len(), s.train.interactions().len());
        assert_eq!(back.source().users(), s.source().users());
        assert_eq!(back.test.interactions(), s.test.interactions());
    }
}
