//! The strategic layer over a [`Game`]: Shapley payments, the exact
//! potential, Nash checks, best-response dynamics, equilibrium enumeration,
//! and efficiency ratios.
//!
//! Payments follow two interchangeable formulas. The permutation form
//! averages marginal contributions over all player orderings; the subset
//! form weighs every coalition `J` not containing the player by
//! `gamma(J) = |J|! (m-|J|-1)! / m!`. The potential weighs every nonempty
//! coalition by `beta(J) = (|J|-1)! (m-|J|)! / m!`; since
//! `gamma(J \ {t}) = beta(J)` whenever `t` is in `J`, a unilateral payment
//! change always equals the potential change, which drives both the
//! dynamics and the equilibrium scan.

use crate::game::{decode_profile, encode_profile, profile_count, Game};
use crate::rational::Rational;
use crate::solvers::Caps;
use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Player cap for the factorial-time permutation formula (9! orderings).
pub const PERMUTATION_PLAYER_CAP: usize = 9;
/// Player cap for the subset formulas (2^20 coalitions).
pub const SUBSET_PLAYER_CAP: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MechanismError {
    #[error("profile has {found} entries, game has {expected} players")]
    ProfileLength { expected: usize, found: usize },
    #[error("strategy {strategy} out of range for player {player} ({count} strategies)")]
    StrategyOutOfRange {
        player: usize,
        strategy: usize,
        count: usize,
    },
    #[error("player {player} out of range ({players} players)")]
    PlayerOutOfRange { player: usize, players: usize },
    #[error("{players} players exceed the permutation cap of {cap}")]
    PermutationCap { players: usize, cap: usize },
    #[error("{players} players exceed the subset cap of {cap}")]
    SubsetCap { players: usize, cap: usize },
    #[error("profile space of {product} profiles exceeds the cap of {cap}")]
    ProfileSpaceTooLarge { product: u128, cap: u64 },
    #[error("order must be a permutation of the {players} players")]
    InvalidOrder { players: usize },
    #[error("not a single-bump game: some profile other than the target differs from the baseline")]
    NotSingleBump,
}

/// One payment per player, exact.
pub type PaymentVector = Vec<Rational>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaymentRule {
    Permutation,
    Subsets,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrdStep {
    pub player: usize,
    pub from: usize,
    pub to: usize,
    pub potential_before: Rational,
    pub potential_after: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicsTrace {
    pub steps: Vec<BrdStep>,
    pub final_profile: Vec<usize>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equilibrium {
    pub profile: Vec<usize>,
    pub value: Rational,
    pub payments: PaymentVector,
}

/// An efficiency ratio: `Infinite` when the reference equilibrium value is 0
/// while the optimum is positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RatioBound {
    Finite(Rational),
    Infinite,
}

impl RatioBound {
    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            RatioBound::Finite(r) => Some(r),
            RatioBound::Infinite => None,
        }
    }
}

impl fmt::Display for RatioBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatioBound::Finite(r) => write!(f, "{r}"),
            RatioBound::Infinite => f.write_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoaPos {
    pub poa: RatioBound,
    pub pos: RatioBound,
    pub opt: Rational,
}

fn validate_profile<G: Game + ?Sized>(g: &G, profile: &[usize]) -> Result<(), MechanismError> {
    let counts = g.strategy_counts();
    if profile.len() != counts.len() {
        return Err(MechanismError::ProfileLength {
            expected: counts.len(),
            found: profile.len(),
        });
    }
    for (player, (&strategy, &count)) in profile.iter().zip(counts).enumerate() {
        if strategy >= count {
            return Err(MechanismError::StrategyOutOfRange {
                player,
                strategy,
                count,
            });
        }
    }
    Ok(())
}

/// Profile-value memo; behaves exactly like calling `g.value`.
struct Evaluator<'g, G: Game + ?Sized> {
    g: &'g G,
    memo: HashMap<Vec<usize>, Rational>,
}

impl<'g, G: Game + ?Sized> Evaluator<'g, G> {
    fn new(g: &'g G) -> Self {
        Evaluator {
            g,
            memo: HashMap::new(),
        }
    }

    fn value(&mut self, profile: &[usize]) -> Rational {
        if let Some(hit) = self.memo.get(profile) {
            return hit.clone();
        }
        let value = self.g.value(profile);
        self.memo.insert(profile.to_vec(), value.clone());
        value
    }
}

fn factorials(m: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(m + 1);
    let mut acc = BigInt::from(1);
    out.push(acc.clone());
    for i in 1..=m {
        acc *= i;
        out.push(acc.clone());
    }
    out
}

/// `gamma` by coalition size: `size! (m-size-1)! / m!` for `size < m`.
fn gamma_by_size(m: usize) -> Vec<Rational> {
    let fact = factorials(m);
    (0..m)
        .map(|size| {
            Rational::new(
                &fact[size] * &fact[m - size - 1],
                fact[m].clone(),
            )
        })
        .collect()
}

/// `beta` by coalition size, index 0 unused: `(size-1)! (m-size)! / m!`.
fn beta_by_size(m: usize) -> Vec<Rational> {
    let fact = factorials(m);
    let mut out = vec![Rational::zero()];
    for size in 1..=m {
        out.push(Rational::new(
            &fact[size - 1] * &fact[m - size],
            fact[m].clone(),
        ));
    }
    out
}

/// Profile with the players outside `mask` silenced.
fn masked(profile: &[usize], mask: usize) -> Vec<usize> {
    profile
        .iter()
        .enumerate()
        .map(|(p, &s)| if mask >> p & 1 == 1 { s } else { 0 })
        .collect()
}

fn perm_payments<G: Game + ?Sized>(eval: &mut Evaluator<'_, G>, a: &[usize]) -> Vec<Rational> {
    let m = a.len();
    let mut totals = vec![Rational::zero(); m];
    let mut current = vec![0usize; m];
    for perm in (0..m).permutations(m) {
        current.fill(0);
        let mut prev = eval.value(&current);
        for &t in &perm {
            current[t] = a[t];
            let next = eval.value(&current);
            totals[t] += &next - &prev;
            prev = next;
        }
    }
    let scale = Rational::from_integer(factorials(m)[m].clone());
    totals.into_iter().map(|v| v / &scale).collect()
}

fn subset_payment<G: Game + ?Sized>(
    eval: &mut Evaluator<'_, G>,
    gammas: &[Rational],
    a: &[usize],
    t: usize,
) -> Rational {
    if a[t] == 0 {
        // Null players never change the masked profile, so every marginal
        // term vanishes.
        return Rational::zero();
    }
    let m = a.len();
    let mut total = Rational::zero();
    for mask in 0..(1usize << m) {
        if mask >> t & 1 == 1 {
            continue;
        }
        let without = eval.value(&masked(a, mask));
        let with = eval.value(&masked(a, mask | (1 << t)));
        total += &gammas[mask.count_ones() as usize] * (with - without);
    }
    total
}

fn potential_value<G: Game + ?Sized>(
    eval: &mut Evaluator<'_, G>,
    betas: &[Rational],
    a: &[usize],
) -> Rational {
    let m = a.len();
    let mut total = Rational::zero();
    for mask in 1..(1usize << m) {
        total += &betas[mask.count_ones() as usize] * eval.value(&masked(a, mask));
    }
    total
}

fn payment_one<G: Game + ?Sized>(
    eval: &mut Evaluator<'_, G>,
    rule: PaymentRule,
    gammas: &[Rational],
    a: &[usize],
    t: usize,
) -> Rational {
    match rule {
        PaymentRule::Subsets => subset_payment(eval, gammas, a, t),
        PaymentRule::Permutation => perm_payments(eval, a).swap_remove(t),
    }
}

fn check_rule_cap(m: usize, rule: PaymentRule) -> Result<(), MechanismError> {
    match rule {
        PaymentRule::Permutation if m > PERMUTATION_PLAYER_CAP => {
            Err(MechanismError::PermutationCap {
                players: m,
                cap: PERMUTATION_PLAYER_CAP,
            })
        }
        _ if m > SUBSET_PLAYER_CAP => Err(MechanismError::SubsetCap {
            players: m,
            cap: SUBSET_PLAYER_CAP,
        }),
        _ => Ok(()),
    }
}

/// Shapley payments by averaging marginal contributions over all `m!`
/// player orderings.
pub fn shapley_permutation<G: Game + ?Sized>(
    g: &G,
    a: &[usize],
) -> Result<PaymentVector, MechanismError> {
    validate_profile(g, a)?;
    check_rule_cap(a.len(), PaymentRule::Permutation)?;
    let mut eval = Evaluator::new(g);
    Ok(perm_payments(&mut eval, a))
}

/// Shapley payments via the coalition sum; exactly equal to
/// [`shapley_permutation`] on every game.
pub fn shapley_subsets<G: Game + ?Sized>(
    g: &G,
    a: &[usize],
) -> Result<PaymentVector, MechanismError> {
    validate_profile(g, a)?;
    check_rule_cap(a.len(), PaymentRule::Subsets)?;
    let gammas = gamma_by_size(a.len());
    let mut eval = Evaluator::new(g);
    Ok((0..a.len())
        .map(|t| subset_payment(&mut eval, &gammas, a, t))
        .collect())
}

/// The exact potential, summed over nonempty coalitions.
pub fn potential<G: Game + ?Sized>(g: &G, a: &[usize]) -> Result<Rational, MechanismError> {
    validate_profile(g, a)?;
    check_rule_cap(a.len(), PaymentRule::Subsets)?;
    let betas = beta_by_size(a.len());
    let mut eval = Evaluator::new(g);
    Ok(potential_value(&mut eval, &betas, a))
}

/// True iff no player has a unilateral deviation with a strictly larger
/// payment under the given rule.
pub fn is_nash<G: Game + ?Sized>(
    g: &G,
    a: &[usize],
    rule: PaymentRule,
) -> Result<bool, MechanismError> {
    validate_profile(g, a)?;
    check_rule_cap(a.len(), rule)?;
    let counts = g.strategy_counts().to_vec();
    let gammas = gamma_by_size(a.len());
    let mut eval = Evaluator::new(g);
    let mut dev = a.to_vec();
    for t in 0..a.len() {
        if counts[t] == 1 {
            continue;
        }
        let base = payment_one(&mut eval, rule, &gammas, a, t);
        for s in 0..counts[t] {
            if s == a[t] {
                continue;
            }
            dev[t] = s;
            if payment_one(&mut eval, rule, &gammas, &dev, t) > base {
                return Ok(false);
            }
        }
        dev[t] = a[t];
    }
    Ok(true)
}

/// The payment-maximizing strategy for player `t` against `a_{-t}` (subset
/// rule). The current strategy is kept when it attains the maximum;
/// remaining ties go to the lowest strategy index.
pub fn best_response<G: Game + ?Sized>(
    g: &G,
    a: &[usize],
    t: usize,
) -> Result<usize, MechanismError> {
    validate_profile(g, a)?;
    check_rule_cap(a.len(), PaymentRule::Subsets)?;
    if t >= a.len() {
        return Err(MechanismError::PlayerOutOfRange {
            player: t,
            players: a.len(),
        });
    }
    let gammas = gamma_by_size(a.len());
    let mut eval = Evaluator::new(g);
    Ok(best_response_inner(&mut eval, &gammas, g.strategy_counts(), a, t).0)
}

fn best_response_inner<G: Game + ?Sized>(
    eval: &mut Evaluator<'_, G>,
    gammas: &[Rational],
    counts: &[usize],
    a: &[usize],
    t: usize,
) -> (usize, Rational) {
    let mut best_s = a[t];
    let mut best_pay = subset_payment(eval, gammas, a, t);
    let mut dev = a.to_vec();
    for s in 0..counts[t] {
        if s == a[t] {
            continue;
        }
        dev[t] = s;
        let pay = subset_payment(eval, gammas, &dev, t);
        if pay > best_pay {
            best_pay = pay;
            best_s = s;
        }
    }
    (best_s, best_pay)
}

/// Round-robin best-response dynamics from `start`, visiting players in
/// `order`; stops after the first full pass with no strictly improving
/// move. The potential strictly increases at every recorded step, so the
/// dynamics always terminate, and the final profile is a Nash equilibrium.
pub fn run_brd<G: Game + ?Sized>(
    g: &G,
    start: &[usize],
    order: &[usize],
) -> Result<DynamicsTrace, MechanismError> {
    validate_profile(g, start)?;
    check_rule_cap(start.len(), PaymentRule::Subsets)?;
    let m = start.len();
    {
        let mut seen = vec![false; m];
        for &t in order {
            if t >= m || seen[t] {
                return Err(MechanismError::InvalidOrder { players: m });
            }
            seen[t] = true;
        }
        if order.len() != m {
            return Err(MechanismError::InvalidOrder { players: m });
        }
    }

    let counts = g.strategy_counts().to_vec();
    let gammas = gamma_by_size(m);
    let betas = beta_by_size(m);
    let mut eval = Evaluator::new(g);
    let mut a = start.to_vec();
    let mut steps = Vec::new();
    loop {
        let mut improved = false;
        for &t in order {
            if counts[t] == 1 {
                continue;
            }
            let (next, _) = best_response_inner(&mut eval, &gammas, &counts, &a, t);
            if next != a[t] {
                let potential_before = potential_value(&mut eval, &betas, &a);
                let from = a[t];
                a[t] = next;
                let potential_after = potential_value(&mut eval, &betas, &a);
                debug_assert!(potential_after > potential_before);
                steps.push(BrdStep {
                    player: t,
                    from,
                    to: next,
                    potential_before,
                    potential_after,
                });
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    Ok(DynamicsTrace {
        steps,
        final_profile: a,
        converged: true,
    })
}

/// Strategy counts, the value table in profile-id order, and a Nash flag
/// per profile.
type NashTables = (Vec<usize>, Vec<Rational>, Vec<bool>);

/// Fills the value table in parallel and marks Nash profiles. A profile is
/// an equilibrium iff for every player `t` its strategy maximizes
/// `q_t(s) = sum over coalitions J containing t of beta(J) * v((s, a_-t)_J)`,
/// which differs from the payment by a constant over the player's line.
fn nash_core<G: Game + ?Sized>(g: &G, caps: &Caps) -> Result<NashTables, MechanismError> {
    let counts = g.strategy_counts().to_vec();
    let m = counts.len();
    if m > SUBSET_PLAYER_CAP {
        return Err(MechanismError::SubsetCap {
            players: m,
            cap: SUBSET_PLAYER_CAP,
        });
    }
    let product = profile_count(&counts);
    if product > caps.max_profiles as u128 {
        return Err(MechanismError::ProfileSpaceTooLarge {
            product,
            cap: caps.max_profiles,
        });
    }
    let total = product as u64;

    let values: Vec<Rational> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut digits = vec![0usize; m];
            decode_profile(idx, &counts, &mut digits);
            g.value(&digits)
        })
        .collect();

    let mut stride = vec![1u64; m];
    for t in (0..m.saturating_sub(1)).rev() {
        stride[t] = stride[t + 1] * counts[t + 1] as u64;
    }
    let betas = beta_by_size(m);
    let mut ne = vec![true; total as usize];
    let mut digits = vec![0usize; m];
    let mut q: Vec<Rational> = Vec::new();
    for t in 0..m {
        let ct = counts[t];
        if ct <= 1 {
            continue;
        }
        let st = stride[t];
        let groups = total / ct as u64;
        for r in 0..groups {
            let base = (r / st) * st * ct as u64 + (r % st);
            decode_profile(base, &counts, &mut digits);
            q.clear();
            for s in 0..ct {
                digits[t] = s;
                let mut qs = Rational::zero();
                for mask in 1usize..(1usize << m) {
                    if mask >> t & 1 == 0 {
                        continue;
                    }
                    let mut idx = 0u64;
                    for (p, &digit) in digits.iter().enumerate() {
                        if mask >> p & 1 == 1 {
                            idx += digit as u64 * stride[p];
                        }
                    }
                    qs += &betas[mask.count_ones() as usize] * &values[idx as usize];
                }
                q.push(qs);
            }
            let top = q.iter().max().expect("nonempty strategy list").clone();
            for (s, qs) in q.iter().enumerate() {
                if *qs < top {
                    ne[(base + s as u64 * st) as usize] = false;
                }
            }
        }
    }
    Ok((counts, values, ne))
}

/// All pure Nash equilibria under the Shapley payment rule, in
/// lexicographic profile order, with values and payments.
pub fn enumerate_equilibria<G: Game + ?Sized>(
    g: &G,
    caps: &Caps,
) -> Result<Vec<Equilibrium>, MechanismError> {
    let (counts, values, ne) = nash_core(g, caps)?;
    let m = counts.len();
    let gammas = gamma_by_size(m);
    let mut eval = Evaluator::new(g);
    let mut out = Vec::new();
    for (idx, flag) in ne.iter().enumerate() {
        if !flag {
            continue;
        }
        let mut profile = vec![0usize; m];
        decode_profile(idx as u64, &counts, &mut profile);
        let payments = (0..m)
            .map(|t| subset_payment(&mut eval, &gammas, &profile, t))
            .collect();
        out.push(Equilibrium {
            profile,
            value: values[idx].clone(),
            payments,
        });
    }
    Ok(out)
}

fn ratio_bound(opt: &Rational, reference: &Rational) -> RatioBound {
    if reference.is_zero() {
        if opt.is_zero() {
            RatioBound::Finite(Rational::from_integer(1.into()))
        } else {
            RatioBound::Infinite
        }
    } else {
        RatioBound::Finite(opt / reference)
    }
}

/// Price of anarchy and stability: the optimal value over the worst and
/// best equilibrium values. A zero-valued reference with a positive
/// optimum reports `Infinite`; `0/0` reports 1.
pub fn poa_pos<G: Game + ?Sized>(g: &G, caps: &Caps) -> Result<PoaPos, MechanismError> {
    let (_counts, values, ne) = nash_core(g, caps)?;
    let opt = values.iter().max().expect("profile space nonempty").clone();
    let mut worst: Option<&Rational> = None;
    let mut best: Option<&Rational> = None;
    for (idx, flag) in ne.iter().enumerate() {
        if !flag {
            continue;
        }
        let v = &values[idx];
        if worst.is_none_or(|w| v < w) {
            worst = Some(v);
        }
        if best.is_none_or(|b| v > b) {
            best = Some(v);
        }
    }
    let worst = worst.expect("a finite potential game has a pure equilibrium");
    let best = best.expect("a finite potential game has a pure equilibrium");
    Ok(PoaPos {
        poa: ratio_bound(&opt, worst),
        pos: ratio_bound(&opt, best),
        opt: opt.clone(),
    })
}

/// For a game whose value differs from the baseline only at `a_star`,
/// checks that both Shapley formulas split the surplus equally among the
/// non-null players of `a_star` and pay null players nothing.
pub fn anonymity_check<G: Game + ?Sized>(g: &G, a_star: &[usize]) -> Result<bool, MechanismError> {
    validate_profile(g, a_star)?;
    check_rule_cap(a_star.len(), PaymentRule::Subsets)?;
    let counts = g.strategy_counts().to_vec();
    let m = counts.len();
    let caps = Caps::default();
    let product = profile_count(&counts);
    if product > caps.max_profiles as u128 {
        return Err(MechanismError::ProfileSpaceTooLarge {
            product,
            cap: caps.max_profiles,
        });
    }

    let baseline = g.value(&vec![0usize; m]);
    let star = encode_profile(a_star, &counts);
    let mut digits = vec![0usize; m];
    for idx in 0..product as u64 {
        if idx == star {
            continue;
        }
        decode_profile(idx, &counts, &mut digits);
        if g.value(&digits) != baseline {
            return Err(MechanismError::NotSingleBump);
        }
    }

    let surplus = g.value(a_star) - &baseline;
    let active = a_star.iter().filter(|&&s| s != 0).count();
    let share = if active == 0 {
        Rational::zero()
    } else {
        surplus / Rational::from_integer(BigInt::from(active))
    };
    let expected: PaymentVector = a_star
        .iter()
        .map(|&s| if s == 0 { Rational::zero() } else { share.clone() })
        .collect();

    let mut ok = shapley_subsets(g, a_star)? == expected;
    if m <= PERMUTATION_PLAYER_CAP {
        ok = ok && shapley_permutation(g, a_star)? == expected;
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{DspGame, TableGame};
    use crate::generators::{gen_dspn, gen_identity};
    use crate::rational::{from_int, ratio};

    fn ident4_game(inst: &crate::instance::Instance) -> DspGame<'_> {
        DspGame::new(inst, 10).unwrap()
    }

    #[test]
    fn shapley_matches_hand_values_on_identity() {
        let inst = gen_identity(4, &from_int(1)).unwrap();
        let g = ident4_game(&inst);
        // Strategy 1 is the base-partition report for both mediators.
        let both = vec![ratio(-1, 8), ratio(-1, 8)];
        assert_eq!(shapley_permutation(&g, &[1, 1]).unwrap(), both);
        assert_eq!(shapley_subsets(&g, &[1, 1]).unwrap(), both);

        let solo = vec![ratio(1, 4), from_int(0)];
        assert_eq!(shapley_permutation(&g, &[1, 0]).unwrap(), solo);
        assert_eq!(shapley_subsets(&g, &[1, 0]).unwrap(), solo);

        let null = vec![from_int(0), from_int(0)];
        assert_eq!(shapley_permutation(&g, &[0, 0]).unwrap(), null);
        assert_eq!(shapley_subsets(&g, &[0, 0]).unwrap(), null);
    }

    #[test]
    fn single_player_payment_is_the_surplus() {
        let g = TableGame::new(vec![3], vec![from_int(2), from_int(7), from_int(1)]).unwrap();
        assert_eq!(shapley_subsets(&g, &[1]).unwrap(), vec![from_int(5)]);
        assert_eq!(shapley_permutation(&g, &[2]).unwrap(), vec![from_int(-1)]);
    }

    #[test]
    fn payment_caps_are_enforced() {
        let g = TableGame::new(vec![1; 10], vec![from_int(0)]).unwrap();
        assert_eq!(
            shapley_permutation(&g, &[0; 10]).unwrap_err(),
            MechanismError::PermutationCap {
                players: 10,
                cap: 9
            }
        );
        let big = TableGame::new(vec![1; 21], vec![from_int(0)]).unwrap();
        assert_eq!(
            shapley_subsets(&big, &[0; 21]).unwrap_err(),
            MechanismError::SubsetCap {
                players: 21,
                cap: 20
            }
        );
        assert_eq!(
            shapley_subsets(&big, &[0; 3]).unwrap_err(),
            MechanismError::ProfileLength {
                expected: 21,
                found: 3
            }
        );
    }

    #[test]
    fn potential_matches_hand_values() {
        let inst = gen_identity(4, &from_int(1)).unwrap();
        let g = ident4_game(&inst);
        assert_eq!(potential(&g, &[1, 1]).unwrap(), ratio(1, 2));
        assert_eq!(potential(&g, &[0, 1]).unwrap(), ratio(5, 8));
        assert_eq!(potential(&g, &[0, 0]).unwrap(), ratio(3, 8));
    }

    #[test]
    fn exact_potential_identity_holds_on_identity_game() {
        let inst = gen_identity(4, &from_int(1)).unwrap();
        let g = ident4_game(&inst);
        for a0 in 0..2usize {
            for a1 in 0..2usize {
                let a = [a0, a1];
                let pay = shapley_subsets(&g, &a).unwrap();
                let phi_a = potential(&g, &a).unwrap();
                for t in 0..2 {
                    for s in 0..2usize {
                        let mut dev = a;
                        dev[t] = s;
                        let dpay = shapley_subsets(&g, &dev).unwrap();
                        let dphi = potential(&g, &dev).unwrap();
                        assert_eq!(&dpay[t] - &pay[t], dphi - &phi_a);
                    }
                }
            }
        }
    }

    #[test]
    fn nash_checks_match_hand_analysis() {
        let inst = gen_identity(4, &from_int(1)).unwrap();
        let g = ident4_game(&inst);
        for rule in [PaymentRule::Permutation, PaymentRule::Subsets] {
            assert!(is_nash(&g, &[0, 1], rule).unwrap());
            assert!(is_nash(&g, &[1, 0], rule).unwrap());
            assert!(!is_nash(&g, &[1, 1], rule).unwrap());
            assert!(!is_nash(&g, &[0, 0], rule).unwrap());
        }

        let rigid = TableGame::new(vec![1, 1], vec![from_int(3)]).unwrap();
        assert!(is_nash(&rigid, &[0, 0], PaymentRule::Subsets).unwrap());
    }

    #[test]
    fn best_response_avoids_lateral_moves() {
        let inst = gen_identity(4, &from_int(1)).unwrap();
        let g = ident4_game(&inst);
        assert_eq!(best_response(&g, &[1, 1], 0).unwrap(), 0);
        assert_eq!(best_response(&g, &[0, 1], 1).unwrap(), 1);
        assert_eq!(best_response(&g, &[0, 1], 0).unwrap(), 0);

        let flat = TableGame::new(vec![3], vec![from_int(1); 3]).unwrap();
        assert_eq!(best_response(&flat, &[2], 0).unwrap(), 2);
        assert_eq!(
            best_response(&flat, &[2], 1).unwrap_err(),
            MechanismError::PlayerOutOfRange {
                player: 1,
                players: 1
            }
        );
    }

    #[test]
    fn brd_reaches_equilibria() {
        let inst = gen_identity(4, &from_int(1)).unwrap();
        let g = ident4_game(&inst);

        let trace = run_brd(&g, &[1, 1], &[0, 1]).unwrap();
        assert_eq!(trace.final_profile, vec![0, 1]);
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].player, 0);
        assert_eq!(trace.steps[0].from, 1);
        assert_eq!(trace.steps[0].to, 0);
        assert_eq!(trace.steps[0].potential_before, ratio(1, 2));
        assert_eq!(trace.steps[0].potential_after, ratio(5, 8));
        assert!(trace.converged);

        let from_null = run_brd(&g, &[0, 0], &[0, 1]).unwrap();
        assert_eq!(from_null.final_profile, vec![1, 0]);
        assert_eq!(from_null.steps.len(), 1);
        assert!(is_nash(&g, &from_null.final_profile, PaymentRule::Subsets).unwrap());

        let already = run_brd(&g, &[0, 1], &[0, 1]).unwrap();
        assert!(already.steps.is_empty());

        assert_eq!(
            run_brd(&g, &[0, 0], &[0, 0]).unwrap_err(),
            MechanismError::InvalidOrder { players: 2 }
        );
    }

    #[test]
    fn equilibria_enumeration_matches_is_nash() {
        let inst = gen_identity(4, &from_int(1)).unwrap();
        let g = ident4_game(&inst);
        let caps = Caps::default();
        let found = enumerate_equilibria(&g, &caps).unwrap();
        let profiles: Vec<Vec<usize>> = found.iter().map(|e| e.profile.clone()).collect();
        assert_eq!(profiles, vec![vec![0, 1], vec![1, 0]]);
        for eq in &found {
            assert_eq!(eq.value, ratio(1, 2));
            assert_eq!(eq.payments.iter().sum::<Rational>(), ratio(1, 4));
        }

        // Cross-check the potential-based scan against direct deviation
        // tests on an asymmetric table game.
        let table = TableGame::from_fn(vec![2, 3, 2], |p| {
            from_int((p[0] * 5 + p[1] * p[1] + 3 * p[2]) as i64 % 7)
        })
        .unwrap();
        let listed = enumerate_equilibria(&table, &caps).unwrap();
        let mut expected = Vec::new();
        for a0 in 0..2 {
            for a1 in 0..3 {
                for a2 in 0..2 {
                    let a = vec![a0, a1, a2];
                    if is_nash(&table, &a, PaymentRule::Subsets).unwrap() {
                        expected.push(a);
                    }
                }
            }
        }
        assert_eq!(
            listed.iter().map(|e| e.profile.clone()).collect::<Vec<_>>(),
            expected
        );
    }

    #[test]
    fn constant_games_make_every_profile_an_equilibrium() {
        let g = TableGame::from_fn(vec![2, 2], |_| from_int(5)).unwrap();
        let found = enumerate_equilibria(&g, &Caps::default()).unwrap();
        assert_eq!(found.len(), 4);
        for eq in &found {
            assert!(eq.payments.iter().all(|p| p.is_zero()));
        }
    }

    #[test]
    fn dspn_equilibria_all_share_one_value() {
        let inst = gen_dspn(1, &ratio(1, 2)).unwrap();
        let g = DspGame::new(&inst, 10).unwrap();
        let found = enumerate_equilibria(&g, &Caps::default()).unwrap();
        assert!(!found.is_empty());
        for eq in &found {
            assert_eq!(eq.value, ratio(3, 8));
        }
    }

    #[test]
    fn efficiency_ratios_on_identity_and_dspn() {
        let inst = gen_identity(4, &from_int(1)).unwrap();
        let g = ident4_game(&inst);
        let ratios = poa_pos(&g, &Caps::default()).unwrap();
        assert_eq!(ratios.opt, ratio(1, 2));
        assert_eq!(ratios.poa, RatioBound::Finite(from_int(1)));
        assert_eq!(ratios.pos, RatioBound::Finite(from_int(1)));

        let dspn = gen_dspn(2, &ratio(1, 4)).unwrap();
        let g2 = DspGame::new(&dspn, 10).unwrap();
        let ratios2 = poa_pos(&g2, &Caps::default()).unwrap();
        assert_eq!(ratios2.pos, RatioBound::Finite(from_int(2)));
        assert_eq!(ratios2.opt, ratio(3, 7));
    }

    #[test]
    fn zero_value_equilibria_report_infinite_ratios() {
        // Coordination game: value 1 only when both players leave null.
        let g = TableGame::from_fn(vec![2, 2], |p| {
            if p == [1, 1] {
                from_int(1)
            } else {
                from_int(0)
            }
        })
        .unwrap();
        let ratios = poa_pos(&g, &Caps::default()).unwrap();
        assert_eq!(ratios.poa, RatioBound::Infinite);
        assert_eq!(ratios.pos, RatioBound::Finite(from_int(1)));
        assert_eq!(format!("{}", ratios.poa), "infinite");

        let flat = TableGame::from_fn(vec![2], |_| from_int(0)).unwrap();
        let zero = poa_pos(&flat, &Caps::default()).unwrap();
        assert_eq!(zero.poa, RatioBound::Finite(from_int(1)));
    }

    #[test]
    fn enumeration_respects_profile_caps() {
        let g = TableGame::from_fn(vec![3, 3], |_| from_int(0)).unwrap();
        let caps = Caps {
            max_profiles: 5,
            max_parts: 10,
        };
        assert_eq!(
            enumerate_equilibria(&g, &caps).unwrap_err(),
            MechanismError::ProfileSpaceTooLarge { product: 9, cap: 5 }
        );
    }

    #[test]
    fn anonymity_examples() {
        let bump3 = TableGame::from_fn(vec![2, 2, 2], |p| {
            if p == [1, 1, 0] {
                from_int(8)
            } else {
                from_int(2)
            }
        })
        .unwrap();
        assert!(anonymity_check(&bump3, &[1, 1, 0]).unwrap());
        assert_eq!(
            shapley_subsets(&bump3, &[1, 1, 0]).unwrap(),
            vec![from_int(3), from_int(3), from_int(0)]
        );

        let bump2 = TableGame::from_fn(vec![2, 2], |p| {
            if p == [1, 1] {
                from_int(1)
            } else {
                from_int(0)
            }
        })
        .unwrap();
        assert!(anonymity_check(&bump2, &[1, 1]).unwrap());
        assert_eq!(
            shapley_subsets(&bump2, &[1, 1]).unwrap(),
            vec![ratio(1, 2), ratio(1, 2)]
        );

        // A bump at the all-null profile only satisfies the precondition
        // when the game is constant; the surplus is then 0 and everyone is
        // paid nothing.
        let constant = TableGame::from_fn(vec![2, 2], |_| from_int(9)).unwrap();
        assert!(anonymity_check(&constant, &[0, 0]).unwrap());
        let null_bump = TableGame::from_fn(vec![2, 2], |p| {
            if p == [0, 0] {
                from_int(9)
            } else {
                from_int(0)
            }
        })
        .unwrap();
        assert_eq!(
            anonymity_check(&null_bump, &[0, 0]).unwrap_err(),
            MechanismError::NotSingleBump
        );

        let not_bump = TableGame::from_fn(vec![2, 2], |p| from_int(p[0] as i64)).unwrap();
        assert_eq!(
            anonymity_check(&not_bump, &[1, 1]).unwrap_err(),
            MechanismError::NotSingleBump
        );
    }
}
