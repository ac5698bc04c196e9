//! Revenue-maximization solvers: the silent and all-report baselines, an
//! exhaustive profile search, and the greedy local-expert approximation
//! (best of three candidates, within factor 5 of the optimum).

use crate::game::{decode_profile, profile_count};
use crate::instance::{Instance, ModelError, RevenueCache, StrategyProfile};
use crate::partition::{meet, Partition, PartitionError};
use crate::rational::Rational;
use num_traits::Zero;
use rayon::prelude::*;
use std::fmt;
use std::time::{Duration, Instant};
use thiserror::Error;

/// Enumeration limits for the exhaustive operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest admissible product of per-mediator strategy-space sizes.
    pub max_profiles: u64,
    /// Largest admissible part count per base partition (the strategy space
    /// of a `q`-part mediator has Bell(`q`) coarsenings).
    pub max_parts: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_profiles: 10_000_000,
            max_parts: 10,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("profile space of {product} profiles exceeds the cap of {cap}")]
    ProfileSpaceTooLarge { product: u128, cap: u64 },
    #[error("mediator {mediator} is not a local expert")]
    NotLocalExpert { mediator: usize },
    #[error("cover target {item} must be alive and inside an expert domain")]
    CoverPrecondition { item: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Exact,
    Silent,
    AllReport,
    LocalExperts,
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SolveMethod::Exact => "exact",
            SolveMethod::Silent => "silent",
            SolveMethod::AllReport => "all-report",
            SolveMethod::LocalExperts => "local-experts",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveStats {
    pub profiles_examined: u64,
    pub elapsed: Duration,
}

/// A solver outcome. `revenue` is exactly the revenue of `joint`, which is
/// exactly the meet of `profile`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub method: SolveMethod,
    pub profile: StrategyProfile,
    pub joint: Partition,
    pub revenue: Rational,
    pub stats: SolveStats,
}

fn finish(
    method: SolveMethod,
    inst: &Instance,
    profile: StrategyProfile,
    profiles_examined: u64,
    started: Instant,
) -> Result<SolveResult, SolveError> {
    let joint = profile.joint();
    let revenue = inst.revenue(&joint)?;
    Ok(SolveResult {
        method,
        profile,
        joint,
        revenue,
        stats: SolveStats {
            profiles_examined,
            elapsed: started.elapsed(),
        },
    })
}

/// The all-silent profile: every mediator reports the whole ground set, the
/// joint signal is `{I}`. Within factor max{1, min{n, k-1}} of the optimum.
pub fn baseline_silent(inst: &Instance) -> Result<SolveResult, SolveError> {
    let started = Instant::now();
    finish(
        SolveMethod::Silent,
        inst,
        StrategyProfile::all_silent(inst),
        1,
        started,
    )
}

/// Every mediator reports its base partition; the joint signal is the meet
/// of all base partitions.
pub fn all_report(inst: &Instance) -> Result<SolveResult, SolveError> {
    let started = Instant::now();
    finish(
        SolveMethod::AllReport,
        inst,
        StrategyProfile::all_report(inst),
        1,
        started,
    )
}

/// Exhaustive search over all products of coarsenings. Revenue ties are
/// broken toward the lexicographically-smallest profile, where each
/// mediator's strategies are ordered canonically; the parallel scan reduces
/// to the same winner as a sequential one.
pub fn solve_exact(inst: &Instance, caps: &Caps) -> Result<SolveResult, SolveError> {
    let started = Instant::now();
    let lists: Vec<Vec<Partition>> = inst
        .mediators()
        .iter()
        .map(|base| base.coarsenings(caps.max_parts))
        .collect::<Result<_, _>>()?;
    let counts: Vec<usize> = lists.iter().map(Vec::len).collect();
    let product = profile_count(&counts);
    if product > caps.max_profiles as u128 {
        return Err(SolveError::ProfileSpaceTooLarge {
            product,
            cap: caps.max_profiles,
        });
    }
    let total = product as u64;
    let n = inst.item_count();
    let cache = RevenueCache::new(inst);

    const CHUNK: u64 = 512;
    let chunks = total.div_ceil(CHUNK);
    let best = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(total);
            let mut digits = vec![0usize; counts.len()];
            let mut local: Option<(u64, Rational)> = None;
            for idx in lo..hi {
                decode_profile(idx, &counts, &mut digits);
                let joint = if digits.is_empty() {
                    Partition::whole(n)
                } else {
                    meet(digits.iter().enumerate().map(|(t, &s)| &lists[t][s]))
                        .expect("reports share the instance ground set")
                };
                let revenue = cache.revenue(&joint);
                if local.as_ref().is_none_or(|(_, top)| revenue > *top) {
                    local = Some((idx, revenue));
                }
            }
            local
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, winner) | (winner, None) => winner,
                (Some((ia, ra)), Some((ib, rb))) => {
                    if ra > rb || (ra == rb && ia < ib) {
                        Some((ia, ra))
                    } else {
                        Some((ib, rb))
                    }
                }
            },
        );

    let (winner, revenue) = best.expect("profile space is never empty");
    let mut digits = vec![0usize; counts.len()];
    decode_profile(winner, &counts, &mut digits);
    let reports: Vec<Partition> = digits
        .iter()
        .enumerate()
        .map(|(t, &s)| lists[t][s].clone())
        .collect();
    let profile = StrategyProfile::new(inst, reports)?;
    let result = finish(SolveMethod::Exact, inst, profile, total, started)?;
    debug_assert_eq!(result.revenue, revenue);
    Ok(result)
}

/// Per-item statistics over the expert domains.
///
/// `h[j]` and `s[j]` are the prior-weighted top and second valuations of
/// item `j` (second with multiplicity, so a two-way top tie gives
/// `h = s`); `owner[j]` is the lowest bidder index attaining the top.
/// `domains[t]` is mediator `t`'s perfectly-known item set and `hat_items`
/// is their sorted union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpertView {
    pub hat_items: Vec<usize>,
    pub h: Vec<Rational>,
    pub s: Vec<Rational>,
    pub owner: Vec<usize>,
    pub domains: Vec<Vec<usize>>,
}

/// When mediator `t`'s base partition consists of singletons plus at most
/// one remainder part, returns the sorted union of the singletons (the
/// domain the mediator knows perfectly); otherwise `None`.
pub fn is_local_expert(inst: &Instance, t: usize) -> Option<Vec<usize>> {
    let mut singles: Vec<usize> = Vec::new();
    let mut large_parts = 0usize;
    for part in inst.mediator(t).iter() {
        if part.len() == 1 {
            singles.push(part[0]);
        } else {
            large_parts += 1;
        }
    }
    if large_parts > 1 {
        return None;
    }
    singles.sort_unstable();
    Some(singles)
}

/// Computes the item statistics; fails on the first mediator that is not a
/// local expert.
pub fn expert_view(inst: &Instance) -> Result<ExpertView, SolveError> {
    let mut domains = Vec::with_capacity(inst.mediator_count());
    for t in 0..inst.mediator_count() {
        match is_local_expert(inst, t) {
            Some(domain) => domains.push(domain),
            None => return Err(SolveError::NotLocalExpert { mediator: t }),
        }
    }
    let mut hat: Vec<usize> = domains.iter().flatten().copied().collect();
    hat.sort_unstable();
    hat.dedup();

    let n = inst.item_count();
    let k = inst.bidder_count();
    let mut h = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    let mut owner = Vec::with_capacity(n);
    for j in 0..n {
        let mu = inst.weight(j) / inst.total_weight();
        let mut bids: Vec<(usize, &Rational)> = (0..k).map(|i| (i, inst.valuation(i, j))).collect();
        // Stable sort by descending value keeps the lowest bidder first
        // among top ties.
        bids.sort_by(|a, b| b.1.cmp(a.1));
        let top = match bids.first() {
            Some((_, v)) => (*v).clone(),
            None => Rational::zero(),
        };
        let second = if bids.len() > 1 {
            bids[1].1.clone()
        } else {
            Rational::zero()
        };
        h.push(&mu * top);
        s.push(&mu * second);
        owner.push(bids.first().map(|(i, _)| *i).unwrap_or(0));
    }
    Ok(ExpertView {
        hat_items: hat,
        h,
        s,
        owner,
        domains,
    })
}

/// The diagnostic lower-bound potential of a bundle: per-bidder sums of
/// owned `h` weights inside `items`, total minus the single largest.
pub fn phi(inst: &Instance, view: &ExpertView, items: &[usize]) -> Rational {
    let k = inst.bidder_count();
    if k == 0 {
        return Rational::zero();
    }
    let mut sums = vec![Rational::zero(); k];
    for &j in items {
        assert!(j < inst.item_count(), "item {j} out of range");
        sums[view.owner[j]] += &view.h[j];
    }
    let top = sums.iter().max().cloned().expect("at least one bidder");
    let total: Rational = sums.iter().sum();
    total - top
}

/// Greedy cover search for item `j` among still-alive items: the best
/// candidate `domains[t] ∩ {owner = i'} ∩ alive` over all pairs with
/// `j ∈ domains[t]` and `i' ≠ owner[j]`, ties toward the lowest `(t, i')`.
/// A candidate with h-sum at least `h[j]` is trimmed (largest `h` first,
/// higher index first on ties) until the sum is at most `2·h[j]`.
pub fn find_cover(
    inst: &Instance,
    view: &ExpertView,
    j: usize,
    alive: &[usize],
) -> Result<Vec<usize>, SolveError> {
    let n = inst.item_count();
    let mut live = vec![false; n];
    for &item in alive {
        assert!(item < n, "alive item {item} out of range");
        live[item] = true;
    }
    if j >= n || !live[j] || view.hat_items.binary_search(&j).is_err() {
        return Err(SolveError::CoverPrecondition { item: j });
    }

    let k = inst.bidder_count();
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for domain in &view.domains {
        if domain.binary_search(&j).is_err() {
            continue;
        }
        for other in 0..k {
            if other == view.owner[j] {
                continue;
            }
            let candidate: Vec<usize> = domain
                .iter()
                .copied()
                .filter(|&x| live[x] && view.owner[x] == other)
                .collect();
            let sum: Rational = candidate.iter().map(|&x| &view.h[x]).sum();
            if best.as_ref().is_none_or(|(top, _)| sum > *top) {
                best = Some((sum, candidate));
            }
        }
    }
    let (mut sum, mut cover) = best.unwrap_or_else(|| (Rational::zero(), Vec::new()));

    let target = &view.h[j];
    if sum >= *target {
        let double = target * Rational::from_integer(2.into());
        while sum > double {
            let drop = (0..cover.len())
                .max_by(|&a, &b| {
                    view.h[cover[a]]
                        .cmp(&view.h[cover[b]])
                        .then(cover[a].cmp(&cover[b]))
                })
                .expect("positive sum implies a nonempty cover");
            sum -= &view.h[cover[drop]];
            cover.remove(drop);
        }
    }
    Ok(cover)
}

/// The auxiliary partition and a strategy profile realizing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxiliaryResult {
    pub partition: Partition,
    pub profile: StrategyProfile,
}

/// Greedy pairing over the expert domains: repeatedly take the alive item
/// with the largest `h` (lowest index on ties), bundle it with its cover,
/// and retire the bundle. Items outside every domain stay in one remainder
/// part. Each bundle lies inside a single domain, so the partition is
/// realizable; the returned profile assigns every bundle to the
/// lowest-index mediator whose domain contains it.
pub fn local_expert_auxiliary(inst: &Instance) -> Result<AuxiliaryResult, SolveError> {
    let view = expert_view(inst)?;
    let n = inst.item_count();
    let mut live = vec![false; n];
    for &j in &view.hat_items {
        live[j] = true;
    }

    let mut parts: Vec<Vec<usize>> = Vec::new();
    let mut assigned_to: Vec<usize> = Vec::new();
    loop {
        let next = (0..n)
            .filter(|&j| live[j])
            .max_by(|&a, &b| view.h[a].cmp(&view.h[b]).then(b.cmp(&a)));
        let Some(j) = next else { break };
        let alive: Vec<usize> = (0..n).filter(|&x| live[x]).collect();
        let mut part = find_cover(inst, &view, j, &alive)?;
        part.push(j);
        part.sort_unstable();
        let mediator = (0..inst.mediator_count())
            .find(|&t| {
                part.iter()
                    .all(|item| view.domains[t].binary_search(item).is_ok())
            })
            .expect("covers stay inside a single expert domain");
        for &item in &part {
            live[item] = false;
        }
        parts.push(part);
        assigned_to.push(mediator);
    }

    let remainder: Vec<usize> = (0..n)
        .filter(|&j| view.hat_items.binary_search(&j).is_err())
        .collect();
    let mut all_parts = parts.clone();
    if !remainder.is_empty() {
        all_parts.push(remainder);
    }
    let partition = Partition::new(n, all_parts)?;

    let mut reports: Vec<Partition> = Vec::with_capacity(inst.mediator_count());
    for t in 0..inst.mediator_count() {
        let mut report_parts: Vec<Vec<usize>> = parts
            .iter()
            .zip(&assigned_to)
            .filter(|(_, &owner)| owner == t)
            .map(|(part, _)| part.clone())
            .collect();
        let covered: Vec<bool> = {
            let mut mask = vec![false; n];
            for part in &report_parts {
                for &item in part {
                    mask[item] = true;
                }
            }
            mask
        };
        let rest: Vec<usize> = (0..n).filter(|&j| !covered[j]).collect();
        if !rest.is_empty() {
            report_parts.push(rest);
        }
        reports.push(Partition::new(n, report_parts)?);
    }
    let profile = StrategyProfile::new(inst, reports)?;
    debug_assert_eq!(profile.joint(), partition);
    Ok(AuxiliaryResult { partition, profile })
}

/// Best of three candidates: all-silent, all-report, and the greedy
/// auxiliary partition. Ties keep the earlier candidate in that order.
/// Guaranteed within factor 5 of the optimum when every mediator is a
/// local expert.
pub fn local_expert_solve(inst: &Instance) -> Result<SolveResult, SolveError> {
    let started = Instant::now();
    let auxiliary = local_expert_auxiliary(inst)?;

    let mut candidates = vec![
        StrategyProfile::all_silent(inst),
        StrategyProfile::all_report(inst),
        auxiliary.profile,
    ];
    let mut best: Option<(Rational, usize)> = None;
    for (pos, profile) in candidates.iter().enumerate() {
        let revenue = inst.revenue(&profile.joint())?;
        if best.as_ref().is_none_or(|(top, _)| revenue > *top) {
            best = Some((revenue, pos));
        }
    }
    let (_, pos) = best.expect("three candidates were scored");
    let profile = candidates.swap_remove(pos);
    finish(SolveMethod::LocalExperts, inst, profile, 3, started)
}
