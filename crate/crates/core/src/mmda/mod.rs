//! Many-to-many deferred acceptance.
//!
//! Users propose down their preference lists, one item at a time, until each
//! holds `k` items. An item tentatively accepts every proposal; once it holds
//! more users than its cap it drops the ones it likes least, and those users
//! go back to proposing. The result is the user-optimal stable matching, and
//! it does not depend on the order in which waiting users are served.

mod engine;
mod stability;
mod trace;

pub use engine::{Discipline, Ejection, MmdaObserver, MmdaState, Proposal, Step};
pub use stability::{blocking_pairs, is_stable};
pub use trace::{MmdaTrace, TraceSnapshot};

use crate::capacity::{validate_feasibility, CapacityConfig};
use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::prefs::PreferenceProfile;
use crate::scalar::Scalar;
use crate::scores::ScoreMatrix;
use engine::{run, OnExhaustion};
use trace::Tracer;

/// User-optimal stable matching under `caps`, FIFO proposal order.
///
/// `μ_u` lists are returned in acquisition order.
pub fn mmda_rerank(prefs: &PreferenceProfile, caps: &CapacityConfig) -> Result<Matching> {
    mmda_run(prefs, caps, Discipline::Fifo, &mut ())
}

/// Like [`mmda_rerank`] with an explicit queue discipline and an observer.
pub fn mmda_run(
    prefs: &PreferenceProfile,
    caps: &CapacityConfig,
    discipline: Discipline,
    observer: &mut dyn MmdaObserver,
) -> Result<Matching> {
    validate_feasibility(prefs, caps)?;
    Ok(run(prefs, caps, discipline, OnExhaustion::Fail, observer)?.matching)
}

/// Runs [`mmda_rerank`] while sampling aggregate user and item utilities
/// every `sample_interval` proposals.
pub fn mmda_trace<S: Scalar>(
    prefs: &PreferenceProfile,
    caps: &CapacityConfig,
    sample_interval: usize,
) -> Result<(Matching, MmdaTrace<S>)> {
    if sample_interval == 0 {
        return Err(Error::InvalidConfig("sample interval must be positive".into()));
    }
    validate_feasibility(prefs, caps)?;
    let mut tracer = Tracer::new(prefs.n_users(), prefs.n_items(), sample_interval);
    let outcome = run(prefs, caps, Discipline::Fifo, OnExhaustion::Fail, &mut tracer)?;
    let trace = tracer.finish(outcome.proposals, outcome.matching.len());
    Ok((outcome.matching, trace))
}

/// Deferred-acceptance outcome that may leave some users short.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialMatching {
    pub matching: Matching,
    /// Users holding fewer than `k` items, ascending.
    pub short_users: Vec<usize>,
}

/// Runs deferred acceptance to the end even when some users run out of
/// preferences. The result is stable whether or not it is complete; when it
/// is short, no complete stable matching exists.
pub fn mmda_rerank_partial(
    prefs: &PreferenceProfile,
    caps: &CapacityConfig,
) -> Result<PartialMatching> {
    validate_feasibility(prefs, caps)?;
    let outcome = run(prefs, caps, Discipline::Fifo, OnExhaustion::LeaveShort, &mut ())?;
    Ok(PartialMatching {
        matching: outcome.matching,
        short_users: outcome.short_users,
    })
}

/// Result of [`mmda_rerank_filled`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilledMatching {
    pub matching: Matching,
    /// Users whose (truncated) list ran out and who were topped up.
    pub filled_users: Vec<usize>,
}

/// Deferred acceptance over possibly truncated lists. Users that run out of
/// preferences keep what they won and are then topped up, in ascending user
/// order, with items that still have spare capacity, best score first
/// (unscored candidates after scored ones, by index).
///
/// Stability is only guaranteed for users that did not need topping up.
pub fn mmda_rerank_filled<S: Scalar>(
    prefs: &PreferenceProfile,
    caps: &CapacityConfig,
    scores: &ScoreMatrix<S>,
) -> Result<FilledMatching> {
    validate_feasibility(prefs, caps)?;
    let outcome = run(prefs, caps, Discipline::Fifo, OnExhaustion::LeaveShort, &mut ())?;
    if outcome.short_users.is_empty() {
        return Ok(FilledMatching {
            matching: outcome.matching,
            filled_users: Vec::new(),
        });
    }

    let k = caps.k();
    let mut counts: Vec<usize> = (0..prefs.n_items())
        .map(|i| outcome.matching.item_count(i))
        .collect();
    let mut lists: Vec<Vec<usize>> = (0..prefs.n_users())
        .map(|u| outcome.matching.user_items(u).to_vec())
        .collect();
    for &u in &outcome.short_users {
        let mut pool: Vec<(usize, Option<S>)> = scores
            .candidates(u)
            .filter(|&i| counts[i] < caps.cap(i) && !lists[u].contains(&i))
            .map(|i| (i, scores.get(u, i)))
            .collect();
        pool.sort_by(|a, b| match (a.1, b.1) {
            (Some(x), Some(y)) => y.partial_cmp(&x).expect("finite").then(a.0.cmp(&b.0)),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => a.0.cmp(&b.0),
        });
        for (i, _) in pool {
            if lists[u].len() == k {
                break;
            }
            lists[u].push(i);
            counts[i] += 1;
        }
        if lists[u].len() < k {
            return Err(Error::ExhaustedPreferences {
                user: u,
                shortfall: k - lists[u].len(),
            });
        }
    }
    Ok(FilledMatching {
        matching: Matching::from_user_lists(prefs.n_items(), lists)?,
        filled_users: outcome.short_users,
    })
}
