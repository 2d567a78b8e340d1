use std::io::Write;

use crate::error::Result;
use crate::metrics::{item_ideal_len, item_utility, user_utility};
use crate::mmda::engine::{MmdaObserver, MmdaState, Step};
use crate::scalar::{ordered_sum, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSnapshot<S> {
    pub proposals: usize,
    pub user_utility: S,
    pub item_utility: S,
    pub filled_slots: usize,
}

/// Aggregate utilities of the partial matching, sampled every
/// `sample_interval` proposals and once more at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct MmdaTrace<S> {
    pub sample_interval: usize,
    pub snapshots: Vec<TraceSnapshot<S>>,
}

impl<S: Scalar> MmdaTrace<S> {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "proposals,user_utility,item_utility,filled_slots")?;
        for s in &self.snapshots {
            writeln!(
                out,
                "{},{},{},{}",
                s.proposals, s.user_utility, s.item_utility, s.filled_slots
            )?;
        }
        Ok(())
    }
}

/// Keeps per-entity utilities current as the matching evolves, so a snapshot
/// costs one ordered pass over the stored values.
pub(crate) struct Tracer<S> {
    interval: usize,
    user_util: Vec<S>,
    item_util: Vec<S>,
    snapshots: Vec<TraceSnapshot<S>>,
}

impl<S: Scalar> Tracer<S> {
    pub fn new(n_users: usize, n_items: usize, interval: usize) -> Self {
        Self {
            interval: interval.max(1),
            user_util: vec![S::zero(); n_users],
            item_util: vec![S::zero(); n_items],
            snapshots: Vec::new(),
        }
    }

    fn refresh_user(&mut self, st: &MmdaState<'_>, user: usize) {
        self.user_util[user] = user_utility(st.prefs(), user, st.user_items(user));
    }

    fn snapshot(&self, proposals: usize, filled_slots: usize) -> TraceSnapshot<S> {
        let mean = |v: &[S]| {
            if v.is_empty() {
                S::zero()
            } else {
                ordered_sum(v.iter().copied()) / S::of_usize(v.len())
            }
        };
        TraceSnapshot {
            proposals,
            user_utility: mean(&self.user_util),
            item_utility: mean(&self.item_util),
            filled_slots,
        }
    }

    pub fn finish(mut self, proposals: usize, filled_slots: usize) -> MmdaTrace<S> {
        if self.snapshots.last().map(|s| s.proposals) != Some(proposals) {
            let last = self.snapshot(proposals, filled_slots);
            self.snapshots.push(last);
        }
        MmdaTrace {
            sample_interval: self.interval,
            snapshots: self.snapshots,
        }
    }
}

impl<S: Scalar> MmdaObserver for Tracer<S> {
    fn on_step(&mut self, st: &MmdaState<'_>, step: &Step) {
        let Step { proposal, ejected } = step;
        self.refresh_user(st, proposal.user);
        for &w in ejected {
            self.refresh_user(st, w);
        }
        let item = proposal.item;
        let users = st.item_users(item);
        let ideal = item_ideal_len(Some(st.caps()), item, users.len());
        self.item_util[item] = item_utility(st.prefs(), item, users, ideal);
        if proposal.counter % self.interval == 0 {
            let snap = self.snapshot(proposal.counter, st.filled_slots());
            self.snapshots.push(snap);
        }
    }
}
