//! Finite strategic games with a designated null strategy per player.
//!
//! The mediators of an instance form the canonical game: player `t`'s
//! strategies are the coarsenings of its base partition with the whole-set
//! report (silence) at index 0, and the value of a profile is the revenue of
//! the joint signal. [`TableGame`] supplies arbitrary value functions for
//! oracle tests over the same mechanism code paths.

use crate::instance::{Instance, RevenueCache, StrategyProfile};
use crate::partition::{meet, Partition, PartitionError};
use crate::rational::Rational;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("every player needs at least one strategy")]
    EmptyStrategyList,
    #[error("value table has {found} entries, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("profile space of {product} profiles is not addressable")]
    TooManyProfiles { product: u128 },
}

/// A finite game: per-player strategy counts and a total value function.
///
/// Index 0 of every strategy list is the player's null strategy; payment
/// rules normalize null players to payment 0 through this convention.
pub trait Game: Sync {
    fn strategy_counts(&self) -> &[usize];

    /// Value of a full strategy profile. Panics on a malformed profile;
    /// callers validate at their boundary.
    fn value(&self, profile: &[usize]) -> Rational;

    fn player_count(&self) -> usize {
        self.strategy_counts().len()
    }
}

pub(crate) fn profile_count(counts: &[usize]) -> u128 {
    counts.iter().map(|&c| c as u128).product()
}

/// Decodes a profile id into strategy indices, most significant digit first:
/// ids enumerate profiles in lexicographic order.
pub(crate) fn decode_profile(idx: u64, counts: &[usize], out: &mut [usize]) {
    debug_assert_eq!(counts.len(), out.len());
    let mut rem = idx;
    for t in (0..counts.len()).rev() {
        let c = counts[t] as u64;
        out[t] = (rem % c) as usize;
        rem /= c;
    }
    debug_assert_eq!(rem, 0, "profile id out of range");
}

pub(crate) fn encode_profile(digits: &[usize], counts: &[usize]) -> u64 {
    debug_assert_eq!(digits.len(), counts.len());
    let mut idx = 0u64;
    for (&d, &c) in digits.iter().zip(counts) {
        debug_assert!(d < c, "strategy index out of range");
        idx = idx * c as u64 + d as u64;
    }
    idx
}

fn check_profile(profile: &[usize], counts: &[usize]) {
    assert_eq!(profile.len(), counts.len(), "profile length mismatch");
    for (t, (&s, &c)) in profile.iter().zip(counts).enumerate() {
        assert!(s < c, "strategy {s} out of range for player {t}");
    }
}

/// An explicit value table over the full profile space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableGame {
    counts: Vec<usize>,
    values: Vec<Rational>,
}

impl TableGame {
    /// `values` holds one entry per profile, indexed in lexicographic
    /// profile order (last player's strategy varies fastest).
    pub fn new(counts: Vec<usize>, values: Vec<Rational>) -> Result<Self, GameError> {
        if counts.contains(&0) {
            return Err(GameError::EmptyStrategyList);
        }
        let product = profile_count(&counts);
        if product > usize::MAX as u128 {
            return Err(GameError::TooManyProfiles { product });
        }
        if values.len() != product as usize {
            return Err(GameError::TableSize {
                expected: product as usize,
                found: values.len(),
            });
        }
        Ok(TableGame { counts, values })
    }

    /// Builds the table by calling `f` once per profile, in lexicographic
    /// profile order (deterministic, so `f` may consume a seeded generator).
    pub fn from_fn<F>(counts: Vec<usize>, mut f: F) -> Result<Self, GameError>
    where
        F: FnMut(&[usize]) -> Rational,
    {
        if counts.contains(&0) {
            return Err(GameError::EmptyStrategyList);
        }
        let product = profile_count(&counts);
        if product > usize::MAX as u128 {
            return Err(GameError::TooManyProfiles { product });
        }
        let mut values = Vec::with_capacity(product as usize);
        let mut digits = vec![0usize; counts.len()];
        for idx in 0..product as u64 {
            decode_profile(idx, &counts, &mut digits);
            values.push(f(&digits));
        }
        Ok(TableGame { counts, values })
    }
}

impl Game for TableGame {
    fn strategy_counts(&self) -> &[usize] {
        &self.counts
    }

    fn value(&self, profile: &[usize]) -> Rational {
        check_profile(profile, &self.counts);
        self.values[encode_profile(profile, &self.counts) as usize].clone()
    }
}

/// The game induced by an instance: one player per mediator, strategies are
/// the coarsenings of its base partition (silence first, then canonical
/// order), value is the revenue of the joint signal.
pub struct DspGame<'a> {
    inst: &'a Instance,
    strategies: Vec<Vec<Partition>>,
    counts: Vec<usize>,
    cache: RevenueCache<'a>,
}

impl<'a> DspGame<'a> {
    /// Fails when some mediator has more than `max_parts` parts and its
    /// coarsening list would exceed the Bell-number cap.
    pub fn new(inst: &'a Instance, max_parts: usize) -> Result<Self, PartitionError> {
        let whole = Partition::whole(inst.item_count());
        let mut strategies = Vec::with_capacity(inst.mediator_count());
        for base in inst.mediators() {
            let mut list = base.coarsenings(max_parts)?;
            let pos = list
                .iter()
                .position(|p| *p == whole)
                .expect("coarsenings always include the whole-set report");
            let null = list.remove(pos);
            list.insert(0, null);
            strategies.push(list);
        }
        let counts = strategies.iter().map(Vec::len).collect();
        Ok(DspGame {
            inst,
            strategies,
            counts,
            cache: RevenueCache::new(inst),
        })
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn strategies(&self, player: usize) -> &[Partition] {
        &self.strategies[player]
    }

    pub fn strategy(&self, player: usize, s: usize) -> &Partition {
        &self.strategies[player][s]
    }

    pub fn strategy_index(&self, player: usize, report: &Partition) -> Option<usize> {
        self.strategies[player].iter().position(|p| p == report)
    }

    /// Joint signal of a profile: the meet of the selected reports.
    pub fn joint(&self, profile: &[usize]) -> Partition {
        check_profile(profile, &self.counts);
        if profile.is_empty() {
            return Partition::whole(self.inst.item_count());
        }
        let selected: Vec<&Partition> = profile
            .iter()
            .enumerate()
            .map(|(t, &s)| &self.strategies[t][s])
            .collect();
        meet(selected).expect("reports share the instance ground set")
    }

    pub fn to_strategy_profile(&self, profile: &[usize]) -> StrategyProfile {
        check_profile(profile, &self.counts);
        let reports = profile
            .iter()
            .enumerate()
            .map(|(t, &s)| self.strategies[t][s].clone())
            .collect();
        StrategyProfile::new(self.inst, reports).expect("coarsenings are valid reports")
    }

    /// Maps a report tuple back to strategy indices; `None` when some report
    /// is not in the corresponding strategy list.
    pub fn index_profile(&self, profile: &StrategyProfile) -> Option<Vec<usize>> {
        if profile.reports().len() != self.counts.len() {
            return None;
        }
        profile
            .reports()
            .iter()
            .enumerate()
            .map(|(t, report)| self.strategy_index(t, report))
            .collect()
    }
}

impl Game for DspGame<'_> {
    fn strategy_counts(&self) -> &[usize] {
        &self.counts
    }

    fn value(&self, profile: &[usize]) -> Rational {
        self.cache.revenue(&self.joint(profile))
    }
}
