//! Instance families: the identity benchmark, the priced-signal family
//! with a tunable gap between equilibrium and optimal revenue, seeded
//! random instances, and the reduction from maximum independent set.

use crate::graph::{Graph, GraphError};
use crate::instance::{Instance, ModelError};
use crate::partition::Partition;
use crate::rational::{from_int, Rational};
use crate::solvers::{SolveError, SolveResult};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("size parameters must be at least 1")]
    SizeRange,
    #[error("epsilon must be strictly between 0 and 1")]
    EpsilonRange,
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// `n` uniform items and `n` single-minded bidders: bidder `i` values only
/// item `i`, at `value`. With `n = 4` the instance carries the two
/// crossing pair mediators (pooling beats both full transparency and
/// silence); other sizes get a single fully-informed mediator.
pub fn gen_identity(n: usize, value: &Rational) -> Result<Instance, GenError> {
    if n == 0 {
        return Err(GenError::SizeRange);
    }
    let weights = vec![from_int(1); n];
    let valuations = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { value.clone() } else { Rational::zero() })
                .collect()
        })
        .collect();
    let mediators = if n == 4 {
        vec![
            Partition::new(4, vec![vec![0, 1], vec![2, 3]]).expect("fixed partition"),
            Partition::new(4, vec![vec![0, 2], vec![1, 3]]).expect("fixed partition"),
        ]
    } else {
        vec![Partition::singletons(n)]
    };
    Ok(Instance::new(weights, valuations, mediators)?)
}

/// The stability-gap family of size `n`: `3n + 1` uniform items
/// (`a_1..a_n`, `b_1..b_n`, `c_1..c_n`, `d`), a generalist who values the
/// `b` items at `eps` and everything else at 1, a specialist for `d`, one
/// specialist per `b` item, and two mediators that overlap on the middle
/// items. Every equilibrium is worth `(n*eps + 1) / (3n + 1)` while the
/// optimum reaches `(n + 1) / (3n + 1)`, so at `eps = 1/n^2` the best
/// equilibrium is a factor `n` below optimal.
pub fn gen_dspn(n: usize, eps: &Rational) -> Result<Instance, GenError> {
    if n == 0 {
        return Err(GenError::SizeRange);
    }
    if eps <= &Rational::zero() || eps >= &Rational::one() {
        return Err(GenError::EpsilonRange);
    }
    let items = 3 * n + 1;
    let d = 3 * n;

    let mut item_names = Vec::with_capacity(items);
    for prefix in ["a", "b", "c"] {
        for idx in 1..=n {
            item_names.push(format!("{prefix}{idx}"));
        }
    }
    item_names.push("d".to_string());

    let mut bidder_names = vec!["iG".to_string(), "iO".to_string()];
    bidder_names.extend((1..=n).map(|idx| format!("i{idx}")));

    let generalist: Vec<Rational> = (0..items)
        .map(|j| {
            if (n..2 * n).contains(&j) {
                eps.clone()
            } else {
                Rational::one()
            }
        })
        .collect();
    let d_specialist: Vec<Rational> = (0..items)
        .map(|j| if j == d { Rational::one() } else { Rational::zero() })
        .collect();
    let mut valuations = vec![generalist, d_specialist];
    for l in 0..n {
        valuations.push(
            (0..items)
                .map(|j| {
                    if j == n + l {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect(),
        );
    }

    let mut t1_parts: Vec<Vec<usize>> = (0..2 * n).map(|j| vec![j]).collect();
    t1_parts.push((2 * n..=d).collect());
    let mut t2_parts: Vec<Vec<usize>> = (n..3 * n).map(|j| vec![j]).collect();
    let mut pooled: Vec<usize> = (0..n).collect();
    pooled.push(d);
    t2_parts.push(pooled);
    let mediators = vec![
        Partition::new(items, t1_parts).expect("family partition"),
        Partition::new(items, t2_parts).expect("family partition"),
    ];

    Ok(Instance::with_names(
        item_names,
        vec![from_int(1); items],
        bidder_names,
        valuations,
        vec!["t1".to_string(), "t2".to_string()],
        mediators,
    )?)
}

/// Index bookkeeping for the independent-set reduction: node `v`, layer `k`
/// maps to a main/helper item pair, a bidder, and a mediator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionMap {
    pub ell: usize,
    pub node_count: usize,
}

impl ReductionMap {
    pub fn main_item(&self, v: usize, k: usize) -> usize {
        2 * (v * self.ell + k)
    }

    pub fn helper_item(&self, v: usize, k: usize) -> usize {
        self.main_item(v, k) + 1
    }

    pub fn bidder(&self, v: usize, k: usize) -> usize {
        v * self.ell + k
    }

    pub fn helper_bidder(&self) -> usize {
        self.node_count * self.ell
    }

    pub fn mediator(&self, v: usize, k: usize) -> usize {
        v * self.ell + k
    }

    pub fn mediator_node(&self, t: usize) -> usize {
        t / self.ell
    }
}

/// Encodes a graph as an instance with `ell` layers per node. Each node
/// and layer contributes a main/helper item pair and a mediator whose base
/// partition isolates the pair together with all helper items of adjacent
/// nodes. One bidder per main item and a shared helper bidder value their
/// items at `2*ell*N`, so a sold part contributes exactly 1 when it has at
/// least two items including a main item, and 0 otherwise. Speaking for
/// all layers of an independent set `A` yields revenue at least
/// `ell * |A|`, and no profile with speaking set `S` exceeds
/// `|nodes(S)| + N + 1`, which makes near-optimal profiles decodable back
/// into large independent sets.
pub fn gen_mis_reduction(g: &Graph, ell: usize) -> Result<(Instance, ReductionMap), GenError> {
    let nodes = g.node_count();
    if nodes == 0 {
        return Err(GenError::EmptyGraph);
    }
    if ell == 0 {
        return Err(GenError::SizeRange);
    }
    let map = ReductionMap {
        ell,
        node_count: nodes,
    };
    let items = 2 * ell * nodes;
    let big = from_int((2 * ell * nodes) as i64);

    let mut item_names = Vec::with_capacity(items);
    let mut bidder_names = Vec::with_capacity(ell * nodes + 1);
    let mut mediator_names = Vec::with_capacity(ell * nodes);
    for v in 0..nodes {
        for k in 0..ell {
            item_names.push(format!("j_{v}_{k}"));
            item_names.push(format!("h_{v}_{k}"));
            bidder_names.push(format!("i_{v}_{k}"));
            mediator_names.push(format!("m_{v}_{k}"));
        }
    }
    bidder_names.push("ih".to_string());

    let mut valuations = Vec::with_capacity(ell * nodes + 1);
    for v in 0..nodes {
        for k in 0..ell {
            let mut row = vec![Rational::zero(); items];
            row[map.main_item(v, k)] = big.clone();
            valuations.push(row);
        }
    }
    let mut helper_row = vec![Rational::zero(); items];
    for v in 0..nodes {
        for k in 0..ell {
            helper_row[map.helper_item(v, k)] = big.clone();
        }
    }
    valuations.push(helper_row);

    let mut mediators = Vec::with_capacity(ell * nodes);
    for v in 0..nodes {
        let neighbor_helpers: Vec<usize> = g
            .neighbors(v)
            .iter()
            .flat_map(|&u| (0..ell).map(move |k| 2 * (u * ell + k) + 1))
            .collect();
        for k in 0..ell {
            let mut special = vec![map.main_item(v, k), map.helper_item(v, k)];
            special.extend_from_slice(&neighbor_helpers);
            special.sort_unstable();
            let mut inside = vec![false; items];
            for &item in &special {
                inside[item] = true;
            }
            let rest: Vec<usize> = (0..items).filter(|&j| !inside[j]).collect();
            let mut parts = vec![special];
            if !rest.is_empty() {
                parts.push(rest);
            }
            mediators.push(Partition::new(items, parts).expect("reduction partition"));
        }
    }

    let inst = Instance::with_names(
        item_names,
        vec![from_int(1); items],
        bidder_names,
        valuations,
        mediator_names,
        mediators,
    )?;
    Ok((inst, map))
}

/// Decodes a speaking set of mediators into an independent set: the nodes
/// that speak on some layer and have no speaking neighbor. Falls back to
/// `{0}` when that set is empty, so the result is always a nonempty
/// independent set.
pub fn extract_independent_set(g: &Graph, map: &ReductionMap, speaking: &[usize]) -> Vec<usize> {
    let mut speaks = vec![false; map.node_count];
    for &t in speaking {
        speaks[map.mediator_node(t)] = true;
    }
    let mut out: Vec<usize> = (0..map.node_count)
        .filter(|&v| speaks[v] && g.neighbors(v).iter().all(|&u| !speaks[u]))
        .collect();
    if out.is_empty() {
        out.push(0);
    }
    out
}

#[derive(Debug, Clone)]
pub struct MisPipelineResult {
    pub independent_set: Vec<usize>,
    pub map: ReductionMap,
    pub solve: SolveResult,
}

/// Full reduction pipeline: encode the graph, run `solver` on the
/// instance, and decode the winning profile's speaking mediators into an
/// independent set (a mediator speaks when its report is not the whole
/// ground set).
pub fn run_mis_pipeline<F>(
    g: &Graph,
    ell: usize,
    solver: F,
) -> Result<MisPipelineResult, GenError>
where
    F: Fn(&Instance) -> Result<SolveResult, SolveError>,
{
    let (inst, map) = gen_mis_reduction(g, ell)?;
    let solve = solver(&inst)?;
    let speaking: Vec<usize> = (0..inst.mediator_count())
        .filter(|&t| solve.profile.report(t).part_count() > 1)
        .collect();
    let independent_set = extract_independent_set(g, &map, &speaking);
    Ok(MisPipelineResult {
        independent_set,
        map,
        solve,
    })
}

/// Shape knobs for [`gen_random`]. Weights are integers in
/// `0..=max_weight` (with a fixup so the total stays positive) and
/// valuations are fractions with numerator up to `value_numerator_max`
/// and denominator up to `value_denominator_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomConfig {
    /// Draw base partitions of singletons plus one remainder, so every
    /// mediator is a local expert.
    pub local_experts: bool,
    pub max_weight: u64,
    pub value_numerator_max: u64,
    pub value_denominator_max: u64,
    /// Upper bound on base-partition part counts, local expert or not.
    pub max_parts: usize,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            local_experts: false,
            max_weight: 4,
            value_numerator_max: 10,
            value_denominator_max: 4,
            max_parts: 4,
        }
    }
}

/// Seeded random instance with `n` items, `k` bidders, and `m` mediators.
/// The same seed and config always produce the same instance.
pub fn gen_random(
    n: usize,
    k: usize,
    m: usize,
    seed: u64,
    cfg: &RandomConfig,
) -> Result<Instance, GenError> {
    if n == 0 {
        return Err(GenError::SizeRange);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut weights: Vec<Rational> = (0..n)
        .map(|_| from_int(rng.gen_range(0..=cfg.max_weight) as i64))
        .collect();
    if weights.iter().all(Rational::is_zero) {
        weights[0] = from_int(1);
    }

    let valuations: Vec<Vec<Rational>> = (0..k)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let numer = rng.gen_range(0..=cfg.value_numerator_max) as i64;
                    let denom = rng.gen_range(1..=cfg.value_denominator_max.max(1)) as i64;
                    Rational::new(numer.into(), denom.into())
                })
                .collect()
        })
        .collect();

    let mut mediators = Vec::with_capacity(m);
    for _ in 0..m {
        if cfg.local_experts {
            let upper = n.min(cfg.max_parts.saturating_sub(1));
            let singles = rng.gen_range(0..=upper);
            let mut chosen = rand::seq::index::sample(&mut rng, n, singles).into_vec();
            chosen.sort_unstable();
            let mut inside = vec![false; n];
            let mut parts: Vec<Vec<usize>> = Vec::with_capacity(singles + 1);
            for &j in &chosen {
                inside[j] = true;
                parts.push(vec![j]);
            }
            let rest: Vec<usize> = (0..n).filter(|&j| !inside[j]).collect();
            if !rest.is_empty() {
                parts.push(rest);
            }
            mediators.push(Partition::new(n, parts).expect("sampled parts cover the items"));
        } else {
            let q = rng.gen_range(1..=n.min(cfg.max_parts).max(1));
            let key: Vec<usize> = (0..n).map(|_| rng.gen_range(0..q)).collect();
            mediators.push(Partition::from_assignment(n, &key));
        }
    }

    Ok(Instance::new(weights, valuations, mediators)?)
}

/// Two items, diagonal valuations 10 and 8, one fully-informed mediator.
/// Weighted top bids per item are 5 and 4; silence already extracts 4.
pub fn loc2() -> Instance {
    Instance::new(
        vec![from_int(1); 2],
        vec![
            vec![from_int(10), from_int(0)],
            vec![from_int(0), from_int(8)],
        ],
        vec![Partition::singletons(2)],
    )
    .expect("fixture is valid")
}

/// Three items, diagonal valuations 9, 6, 6, one fully-informed mediator.
/// Pairing item 0 with either rival item is optimal (revenue 2).
pub fn loc3() -> Instance {
    Instance::new(
        vec![from_int(1); 3],
        vec![
            vec![from_int(9), from_int(0), from_int(0)],
            vec![from_int(0), from_int(6), from_int(0)],
            vec![from_int(0), from_int(0), from_int(6)],
        ],
        vec![Partition::singletons(3)],
    )
    .expect("fixture is valid")
}

/// Five items, two bidders: one values item 0 at 12, the other values
/// items 1..4 at 8 each. The greedy cover of item 0 starts oversized and
/// must be trimmed.
pub fn trim5() -> Instance {
    let mut rival = vec![from_int(0)];
    rival.extend(std::iter::repeat_n(from_int(8), 4));
    let mut top = vec![from_int(12)];
    top.extend(std::iter::repeat_n(from_int(0), 4));
    Instance::new(
        vec![from_int(1); 5],
        vec![top, rival],
        vec![Partition::singletons(5)],
    )
    .expect("fixture is valid")
}

/// The single-edge graph with its one-layer reduction: 4 items, 3
/// bidders, 2 mediators.
pub fn edge2() -> (Graph, Instance, ReductionMap) {
    let g = Graph::new(2, vec![(0, 1)]).expect("fixture graph");
    let (inst, map) = gen_mis_reduction(&g, 1).expect("fixture reduction");
    (g, inst, map)
}
