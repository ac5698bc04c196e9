//! Market instances and the revenue of a joint signal.
//!
//! An [`Instance`] is a ground set of items with a prior (given as
//! nonnegative weights, normalized on demand), a valuation matrix, and one
//! base partition per mediator. Selling a bundle `S` means running a
//! second-price auction on the bids `v_{i,S}`, the expected per-item value
//! of `S` for each bidder conditioned on the bundle; the price is the
//! second-highest bid, counted with multiplicity. The revenue of a joint
//! partition is the mass-weighted sum of its per-part prices.

use crate::partition::{meet, Partition};
use crate::rational::Rational;
use dashmap::DashMap;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("instance has no items")]
    NoItems,
    #[error("negative weight at index {index}")]
    NegativeWeight { index: usize },
    #[error("total weight is zero")]
    ZeroTotalWeight,
    #[error("valuations row {row}: expected {expected} entries, found {found}")]
    ValuationRowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("negative valuation for bidder {bidder} on item {item}")]
    NegativeValuation { bidder: usize, item: usize },
    #[error("item names: expected {expected}, found {found}")]
    ItemNameCount { expected: usize, found: usize },
    #[error("bidder names: expected {expected}, found {found}")]
    BidderNameCount { expected: usize, found: usize },
    #[error("mediator names: expected {expected}, found {found}")]
    MediatorNameCount { expected: usize, found: usize },
    #[error("mediator {mediator}: partition covers {found} items, instance has {expected}")]
    MediatorGroundMismatch {
        mediator: usize,
        expected: usize,
        found: usize,
    },
    #[error("bidder index {bidder} out of range ({k} bidders)")]
    BidderOutOfRange { bidder: usize, k: usize },
    #[error("bundle is empty")]
    EmptyBundle,
    #[error("bundle items must be strictly increasing and in range (offender {item})")]
    MalformedBundle { item: usize },
    #[error("bundle has zero probability mass")]
    ZeroMassBundle,
    #[error("partition covers {found} items, instance has {expected}")]
    PartitionGroundMismatch { expected: usize, found: usize },
    #[error("profile has {found} reports, instance has {expected} mediators")]
    ReportCount { expected: usize, found: usize },
    #[error("report {mediator} is not a coarsening of the mediator's base partition")]
    NotACoarsening { mediator: usize },
}

/// A signaling-game instance: prior weights, valuation matrix, and one base
/// partition per mediator. Immutable after construction; construction
/// validates every invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    item_names: Vec<String>,
    weights: Vec<Rational>,
    total_weight: Rational,
    bidder_names: Vec<String>,
    valuations: Vec<Vec<Rational>>,
    mediator_names: Vec<String>,
    mediators: Vec<Partition>,
}

impl Instance {
    /// Builds an instance with generated names (`item0`, `bidder0`,
    /// `mediator0`, ..).
    pub fn new(
        weights: Vec<Rational>,
        valuations: Vec<Vec<Rational>>,
        mediators: Vec<Partition>,
    ) -> Result<Self, ModelError> {
        let item_names = (0..weights.len()).map(|j| format!("item{j}")).collect();
        let bidder_names = (0..valuations.len()).map(|i| format!("bidder{i}")).collect();
        let mediator_names = (0..mediators.len())
            .map(|t| format!("mediator{t}"))
            .collect();
        Self::with_names(
            item_names,
            weights,
            bidder_names,
            valuations,
            mediator_names,
            mediators,
        )
    }

    pub fn with_names(
        item_names: Vec<String>,
        weights: Vec<Rational>,
        bidder_names: Vec<String>,
        valuations: Vec<Vec<Rational>>,
        mediator_names: Vec<String>,
        mediators: Vec<Partition>,
    ) -> Result<Self, ModelError> {
        let total_weight = weights.iter().sum();
        let inst = Instance {
            item_names,
            weights,
            total_weight,
            bidder_names,
            valuations,
            mediator_names,
            mediators,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Re-checks every structural invariant. Constructors call this, so a
    /// constructed instance is always valid; exposed for documents built
    /// from external input.
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.weights.len();
        if n == 0 {
            return Err(ModelError::NoItems);
        }
        if self.item_names.len() != n {
            return Err(ModelError::ItemNameCount {
                expected: n,
                found: self.item_names.len(),
            });
        }
        for (index, w) in self.weights.iter().enumerate() {
            if w < &Rational::zero() {
                return Err(ModelError::NegativeWeight { index });
            }
        }
        if self.total_weight.is_zero() {
            return Err(ModelError::ZeroTotalWeight);
        }
        debug_assert_eq!(self.total_weight, self.weights.iter().sum());
        if self.bidder_names.len() != self.valuations.len() {
            return Err(ModelError::BidderNameCount {
                expected: self.valuations.len(),
                found: self.bidder_names.len(),
            });
        }
        for (row, vals) in self.valuations.iter().enumerate() {
            if vals.len() != n {
                return Err(ModelError::ValuationRowLength {
                    row,
                    expected: n,
                    found: vals.len(),
                });
            }
            for (item, v) in vals.iter().enumerate() {
                if v < &Rational::zero() {
                    return Err(ModelError::NegativeValuation { bidder: row, item });
                }
            }
        }
        if self.mediator_names.len() != self.mediators.len() {
            return Err(ModelError::MediatorNameCount {
                expected: self.mediators.len(),
                found: self.mediator_names.len(),
            });
        }
        for (mediator, p) in self.mediators.iter().enumerate() {
            if p.ground_size() != n {
                return Err(ModelError::MediatorGroundMismatch {
                    mediator,
                    expected: n,
                    found: p.ground_size(),
                });
            }
        }
        Ok(())
    }

    pub fn item_count(&self) -> usize {
        self.weights.len()
    }

    pub fn bidder_count(&self) -> usize {
        self.valuations.len()
    }

    pub fn mediator_count(&self) -> usize {
        self.mediators.len()
    }

    pub fn item_names(&self) -> &[String] {
        &self.item_names
    }

    pub fn bidder_names(&self) -> &[String] {
        &self.bidder_names
    }

    pub fn mediator_names(&self) -> &[String] {
        &self.mediator_names
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, item: usize) -> &Rational {
        &self.weights[item]
    }

    pub fn total_weight(&self) -> &Rational {
        &self.total_weight
    }

    pub fn valuations(&self) -> &[Vec<Rational>] {
        &self.valuations
    }

    pub fn valuation(&self, bidder: usize, item: usize) -> &Rational {
        &self.valuations[bidder][item]
    }

    pub fn mediators(&self) -> &[Partition] {
        &self.mediators
    }

    pub fn mediator(&self, t: usize) -> &Partition {
        &self.mediators[t]
    }

    fn check_bundle(&self, items: &[usize]) -> Result<(), ModelError> {
        if items.is_empty() {
            return Err(ModelError::EmptyBundle);
        }
        let mut prev: Option<usize> = None;
        for &item in items {
            let ascending = prev.is_none_or(|p| item > p);
            if item >= self.item_count() || !ascending {
                return Err(ModelError::MalformedBundle { item });
            }
            prev = Some(item);
        }
        Ok(())
    }

    /// Unnormalized mass of a bundle (sum of item weights).
    pub fn bundle_mass(&self, items: &[usize]) -> Rational {
        items.iter().map(|&j| &self.weights[j]).sum()
    }

    /// Prior probability of a bundle.
    pub fn bundle_probability(&self, items: &[usize]) -> Rational {
        self.bundle_mass(items) / &self.total_weight
    }

    /// Conditional expected per-item value of the bundle for one bidder:
    /// the weight-averaged valuation over the bundle. Requires positive
    /// bundle mass.
    pub fn bundle_bid(&self, bidder: usize, items: &[usize]) -> Result<Rational, ModelError> {
        if bidder >= self.bidder_count() {
            return Err(ModelError::BidderOutOfRange {
                bidder,
                k: self.bidder_count(),
            });
        }
        self.check_bundle(items)?;
        let mass = self.bundle_mass(items);
        if mass.is_zero() {
            return Err(ModelError::ZeroMassBundle);
        }
        let weighted: Rational = items
            .iter()
            .map(|&j| &self.weights[j] * &self.valuations[bidder][j])
            .sum();
        Ok(weighted / mass)
    }

    /// Second-price value of a bundle: the second-highest bid over all
    /// bidders, with multiplicity. Degenerate cases (fewer than two bidders,
    /// zero-mass bundle) are worth 0; item indices must be valid.
    pub fn bundle_value(&self, items: &[usize]) -> Rational {
        assert!(
            items.iter().all(|&j| j < self.item_count()),
            "bundle item out of range"
        );
        if self.bidder_count() < 2 || self.bundle_mass(items).is_zero() {
            return Rational::zero();
        }
        let mass = self.bundle_mass(items);
        let mut bids: Vec<Rational> = (0..self.bidder_count())
            .map(|i| {
                let weighted: Rational = items
                    .iter()
                    .map(|&j| &self.weights[j] * &self.valuations[i][j])
                    .sum();
                weighted / &mass
            })
            .collect();
        bids.sort_unstable_by(|a, b| b.cmp(a));
        bids.swap_remove(1)
    }

    /// Expected auction revenue of selling each part of `p` as one bundle.
    pub fn revenue(&self, p: &Partition) -> Result<Rational, ModelError> {
        if p.ground_size() != self.item_count() {
            return Err(ModelError::PartitionGroundMismatch {
                expected: self.item_count(),
                found: p.ground_size(),
            });
        }
        let mut total = Rational::zero();
        for part in p.iter() {
            total += self.bundle_probability(part) * self.bundle_value(part);
        }
        Ok(total)
    }
}

/// Concurrent memo of part contributions `mu(S) * v(S)`, shared across the
/// many revenue evaluations of a profile scan. Purely an accelerator: the
/// cached value is exactly what [`Instance::revenue`] would recompute.
pub(crate) struct RevenueCache<'a> {
    inst: &'a Instance,
    parts: DashMap<Vec<usize>, Rational>,
}

impl<'a> RevenueCache<'a> {
    pub(crate) fn new(inst: &'a Instance) -> Self {
        RevenueCache {
            inst,
            parts: DashMap::new(),
        }
    }

    fn contribution(&self, part: &[usize]) -> Rational {
        if let Some(hit) = self.parts.get(part) {
            return hit.clone();
        }
        let value = self.inst.bundle_probability(part) * self.inst.bundle_value(part);
        self.parts.insert(part.to_vec(), value.clone());
        value
    }

    pub(crate) fn revenue(&self, p: &Partition) -> Rational {
        debug_assert_eq!(p.ground_size(), self.inst.item_count());
        let mut total = Rational::zero();
        for part in p.iter() {
            total += self.contribution(part);
        }
        total
    }
}

/// One report per mediator, each a coarsening of that mediator's base
/// partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyProfile {
    n: usize,
    reports: Vec<Partition>,
}

impl StrategyProfile {
    pub fn new(inst: &Instance, reports: Vec<Partition>) -> Result<Self, ModelError> {
        if reports.len() != inst.mediator_count() {
            return Err(ModelError::ReportCount {
                expected: inst.mediator_count(),
                found: reports.len(),
            });
        }
        for (mediator, report) in reports.iter().enumerate() {
            if report.ground_size() != inst.item_count() {
                return Err(ModelError::MediatorGroundMismatch {
                    mediator,
                    expected: inst.item_count(),
                    found: report.ground_size(),
                });
            }
            let coarsens = inst.mediator(mediator).is_refinement_of(report).expect(
                "ground sizes checked above",
            );
            if !coarsens {
                return Err(ModelError::NotACoarsening { mediator });
            }
        }
        Ok(StrategyProfile {
            n: inst.item_count(),
            reports,
        })
    }

    /// Every mediator pools everything (reports `{I}`).
    pub fn all_silent(inst: &Instance) -> Self {
        StrategyProfile {
            n: inst.item_count(),
            reports: vec![Partition::whole(inst.item_count()); inst.mediator_count()],
        }
    }

    /// Every mediator reports its base partition in full.
    pub fn all_report(inst: &Instance) -> Self {
        StrategyProfile {
            n: inst.item_count(),
            reports: inst.mediators().to_vec(),
        }
    }

    pub fn reports(&self) -> &[Partition] {
        &self.reports
    }

    pub fn report(&self, t: usize) -> &Partition {
        &self.reports[t]
    }

    /// The joint signal: the meet of all reports ( `{I}` when there are no
    /// mediators).
    pub fn joint(&self) -> Partition {
        if self.reports.is_empty() {
            Partition::whole(self.n)
        } else {
            meet(self.reports.iter()).expect("reports share the instance ground set")
        }
    }
}
