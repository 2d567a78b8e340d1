use crate::error::{Error, Result};
use crate::prefs::PreferenceProfile;

/// List size `k` and per-item caps `c_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityConfig {
    k: usize,
    caps: Vec<usize>,
}

impl CapacityConfig {
    pub fn new(k: usize, caps: Vec<usize>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if let Some(i) = caps.iter().position(|&c| c == 0) {
            return Err(Error::InvalidConfig(format!("item {i} has cap 0")));
        }
        Ok(Self { k, caps })
    }

    pub fn uniform(k: usize, cap: usize, n_items: usize) -> Result<Self> {
        Self::new(k, vec![cap; n_items])
    }

    /// Smallest uniform cap that can serve every slot: `ceil(n_users * k / n_items)`.
    pub fn lower_bound(n_users: usize, k: usize, n_items: usize) -> usize {
        (n_users * k).div_ceil(n_items.max(1))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cap(&self, item: usize) -> usize {
        self.caps[item]
    }

    pub fn caps(&self) -> &[usize] {
        &self.caps
    }

    pub fn total(&self) -> usize {
        self.caps.iter().sum()
    }

    pub fn max_cap(&self) -> usize {
        self.caps.iter().copied().max().unwrap_or(0)
    }
}

/// Checks that caps can absorb `n_users * k` slots and that every user ranks
/// at least `k` items. An item can serve each user at most once, so its cap
/// counts for at most `n_users` slots.
pub fn validate_feasibility(prefs: &PreferenceProfile, caps: &CapacityConfig) -> Result<()> {
    if caps.caps.len() != prefs.n_items() {
        return Err(Error::InvalidConfig(format!(
            "{} caps given for {} items",
            caps.caps.len(),
            prefs.n_items()
        )));
    }
    let required = prefs.n_users() * caps.k;
    let total: usize = caps.caps.iter().map(|&c| c.min(prefs.n_users())).sum();
    if total < required {
        return Err(Error::InfeasibleCapacity { total, required });
    }
    for u in 0..prefs.n_users() {
        let len = prefs.user_pref(u).len();
        if len < caps.k {
            return Err(Error::ShortPreferenceList {
                user: u,
                len,
                k: caps.k,
            });
        }
    }
    Ok(())
}
