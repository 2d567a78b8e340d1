use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::capacity::CapacityConfig;
use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::prefs::PreferenceProfile;

/// Order in which users waiting for a slot get to propose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Discipline {
    /// Oldest waiting user first; initial queue is ascending by index.
    #[default]
    Fifo,
    /// Most recently queued user first.
    Lifo,
    /// Uniformly random waiting user, drawn from a seeded generator.
    Random { seed: u64 },
}

enum PendingQueue {
    Fifo(VecDeque<usize>),
    Lifo(Vec<usize>),
    Random(Vec<usize>, ChaCha8Rng),
}

impl PendingQueue {
    fn new(discipline: Discipline) -> Self {
        match discipline {
            Discipline::Fifo => PendingQueue::Fifo(VecDeque::new()),
            Discipline::Lifo => PendingQueue::Lifo(Vec::new()),
            Discipline::Random { seed } => {
                PendingQueue::Random(Vec::new(), ChaCha8Rng::seed_from_u64(seed))
            }
        }
    }

    fn push(&mut self, user: usize) {
        match self {
            PendingQueue::Fifo(q) => q.push_back(user),
            PendingQueue::Lifo(q) | PendingQueue::Random(q, _) => q.push(user),
        }
    }

    fn pop(&mut self) -> Option<usize> {
        match self {
            PendingQueue::Fifo(q) => q.pop_front(),
            PendingQueue::Lifo(q) => q.pop(),
            PendingQueue::Random(q, rng) => {
                if q.is_empty() {
                    None
                } else {
                    let at = rng.gen_range(0..q.len());
                    Some(q.swap_remove(at))
                }
            }
        }
    }

    fn len(&self) -> usize {
        match self {
            PendingQueue::Fifo(q) => q.len(),
            PendingQueue::Lifo(q) | PendingQueue::Random(q, _) => q.len(),
        }
    }

    fn to_vec(&self) -> Vec<usize> {
        match self {
            PendingQueue::Fifo(q) => q.iter().copied().collect(),
            PendingQueue::Lifo(q) | PendingQueue::Random(q, _) => q.clone(),
        }
    }
}

/// One proposal: `user` asks for `item`, the entry at `position` of `≻_user`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Proposal {
    pub counter: usize,
    pub user: usize,
    pub item: usize,
    pub position: usize,
}

/// `item` dropped `user`; `remaining` is the item's current list, best first.
#[derive(Debug, Clone, Copy)]
pub struct Ejection<'a> {
    pub item: usize,
    pub user: usize,
    pub remaining: &'a [usize],
}

/// Outcome of one proposal once caps are restored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub proposal: Proposal,
    pub ejected: Vec<usize>,
}

/// Hooks into a running deferred-acceptance loop. All methods default to no-ops.
pub trait MmdaObserver {
    fn on_proposal(&mut self, _state: &MmdaState<'_>, _proposal: &Proposal) {}
    fn on_ejection(&mut self, _state: &MmdaState<'_>, _ejection: &Ejection<'_>) {}
    fn on_step(&mut self, _state: &MmdaState<'_>, _step: &Step) {}
}

impl MmdaObserver for () {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum OnExhaustion {
    Fail,
    LeaveShort,
}

/// Matching under construction plus the bookkeeping of the proposal loop.
pub struct MmdaState<'p> {
    prefs: &'p PreferenceProfile,
    caps: &'p CapacityConfig,
    user_lists: Vec<Vec<usize>>,
    // kept best-first by the item's preference
    item_lists: Vec<Vec<usize>>,
    // S_u is the first `proposed[u]` entries of ≻_u
    proposed: Vec<usize>,
    queue: PendingQueue,
    queued: Vec<bool>,
    proposals: usize,
    filled: usize,
}

impl<'p> MmdaState<'p> {
    fn new(prefs: &'p PreferenceProfile, caps: &'p CapacityConfig, discipline: Discipline) -> Self {
        let n = prefs.n_users();
        let mut queue = PendingQueue::new(discipline);
        for u in 0..n {
            queue.push(u);
        }
        Self {
            prefs,
            caps,
            user_lists: vec![Vec::with_capacity(caps.k()); n],
            item_lists: (0..prefs.n_items())
                .map(|i| Vec::with_capacity(caps.cap(i) + 1))
                .collect(),
            proposed: vec![0; n],
            queue,
            queued: vec![true; n],
            proposals: 0,
            filled: 0,
        }
    }

    pub fn prefs(&self) -> &PreferenceProfile {
        self.prefs
    }

    pub fn caps(&self) -> &CapacityConfig {
        self.caps
    }

    /// `μ_u` in acquisition order.
    pub fn user_items(&self, user: usize) -> &[usize] {
        &self.user_lists[user]
    }

    /// `μ_i`, best first by `≻_i`.
    pub fn item_users(&self, item: usize) -> &[usize] {
        &self.item_lists[item]
    }

    /// `S_u`: every item `user` has proposed to, in proposal order.
    pub fn selected(&self, user: usize) -> &[usize] {
        &self.prefs.user_pref(user)[..self.proposed[user]]
    }

    /// Users currently waiting to propose, in queue storage order.
    pub fn pending(&self) -> Vec<usize> {
        self.queue.to_vec()
    }

    pub fn pending_len(&self) -> usize {
        self.queue.len()
    }

    pub fn proposals(&self) -> usize {
        self.proposals
    }

    pub fn filled_slots(&self) -> usize {
        self.filled
    }

    fn enqueue(&mut self, user: usize) {
        if !self.queued[user] && self.user_lists[user].len() < self.caps.k() {
            self.queued[user] = true;
            self.queue.push(user);
        }
    }

    fn into_matching(self) -> Matching {
        Matching::from_user_lists(self.prefs.n_items(), self.user_lists)
            .expect("deferred acceptance never repeats a pair")
    }
}

pub(crate) struct RunOutcome {
    pub matching: Matching,
    pub short_users: Vec<usize>,
    pub proposals: usize,
}

/// Runs the proposal loop to completion. Feasibility is the caller's concern.
pub(crate) fn run(
    prefs: &PreferenceProfile,
    caps: &CapacityConfig,
    discipline: Discipline,
    on_exhaustion: OnExhaustion,
    observer: &mut dyn MmdaObserver,
) -> Result<RunOutcome> {
    let k = caps.k();
    let mut st = MmdaState::new(prefs, caps, discipline);
    let mut short_users = Vec::new();

    while let Some(user) = st.queue.pop() {
        st.queued[user] = false;
        let held = st.user_lists[user].len();
        if held >= k {
            continue;
        }
        let pref = prefs.user_pref(user);
        let position = st.proposed[user];
        if position >= pref.len() {
            match on_exhaustion {
                OnExhaustion::Fail => {
                    return Err(Error::ExhaustedPreferences {
                        user,
                        shortfall: k - held,
                    })
                }
                OnExhaustion::LeaveShort => {
                    short_users.push(user);
                    continue;
                }
            }
        }

        let item = pref[position];
        st.proposed[user] += 1;
        st.proposals += 1;
        let proposal = Proposal {
            counter: st.proposals,
            user,
            item,
            position,
        };
        observer.on_proposal(&st, &proposal);

        st.user_lists[user].push(item);
        st.filled += 1;
        let key = prefs.item_order_key(item, user);
        let holders = &mut st.item_lists[item];
        let at = holders.partition_point(|&v| prefs.item_order_key(item, v) < key);
        holders.insert(at, user);

        let mut ejected = Vec::new();
        let cap = caps.cap(item);
        while st.item_lists[item].len() > cap {
            let loser = st.item_lists[item].pop().expect("over cap implies non-empty");
            let list = &mut st.user_lists[loser];
            let p = list
                .iter()
                .position(|&i| i == item)
                .expect("matched views agree");
            list.remove(p);
            st.filled -= 1;
            ejected.push(loser);
            observer.on_ejection(
                &st,
                &Ejection {
                    item,
                    user: loser,
                    remaining: &st.item_lists[item],
                },
            );
        }
        for &loser in &ejected {
            if loser != user {
                st.enqueue(loser);
            }
        }
        st.enqueue(user);
        observer.on_step(&st, &Step { proposal, ejected });
    }

    short_users.sort_unstable();
    short_users.dedup();
    let proposals = st.proposals;
    Ok(RunOutcome {
        matching: st.into_matching(),
        short_users,
        proposals,
    })
}
