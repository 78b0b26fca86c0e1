//! Symbol random mapping: low-to-high-order confusion.
//!
//! Each source symbol `a_m` owns a subset of the disguise alphabet and is
//! replaced by one of its members, drawn per the mapping probabilities. The
//! optimizer trades the disguise quality (KL divergence from the uniform
//! disguise distribution) against a union-bound BER budget; its KKT structure
//! is an exponential family with one shared dual variable, so the solver is a
//! bisection on that scalar.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;
use rand::Rng;

use crate::channel::ScalarChannel;
use crate::constellation::{hamming_distance, Constellation};
use crate::channel::RngStream;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SrmError {
    #[error("unsupported constellation pair (orders {source_order} -> {target_order})")]
    UnsupportedPair {
        source_order: usize,
        target_order: usize,
    },
    #[error("invalid partition: {0}")]
    InvalidPartition(&'static str),
    #[error("invalid mapping probabilities: {0}")]
    InvalidProbabilities(&'static str),
    #[error("symbol index {index} outside source alphabet of order {order}")]
    Alphabet { index: usize, order: usize },
    #[error("channel gain is zero")]
    SingularChannel,
    #[error("BER budget {eta} is below the minimum attainable bound {theta_min}")]
    Infeasible { eta: f64, theta_min: f64 },
}

/// Gaussian tail function `Q(x) = erfc(x / sqrt(2)) / 2`.
pub fn q_func(x: f64) -> f64 {
    0.5 * libm::erfc(x / core::f64::consts::SQRT_2)
}

/// Partition of a disguise alphabet into per-source-symbol subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetPartition {
    base: Constellation,
    groups: Vec<Vec<usize>>,
    subset_of: Vec<usize>,
}

impl SubsetPartition {
    pub fn new(base: Constellation, groups: Vec<Vec<usize>>) -> Result<Self, SrmError> {
        let n = base.order();
        let mut owner = vec![usize::MAX; n];
        for (m, group) in groups.iter().enumerate() {
            if group.is_empty() {
                return Err(SrmError::InvalidPartition("empty subset"));
            }
            for &i in group {
                if i >= n {
                    return Err(SrmError::InvalidPartition("index out of range"));
                }
                if owner[i] != usize::MAX {
                    return Err(SrmError::InvalidPartition("subsets overlap"));
                }
                owner[i] = m;
            }
        }
        if owner.contains(&usize::MAX) {
            return Err(SrmError::InvalidPartition("subsets do not cover the alphabet"));
        }
        Ok(Self {
            base,
            groups,
            subset_of: owner,
        })
    }

    pub fn base(&self) -> &Constellation {
        &self.base
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// Common subset size; panics if the split is uneven.
    pub fn group_size(&self) -> usize {
        let k = self.groups[0].len();
        assert!(
            self.groups.iter().all(|g| g.len() == k),
            "partition is uneven"
        );
        k
    }

    pub fn subset_of(&self, base_index: usize) -> usize {
        self.subset_of[base_index]
    }
}

/// Splits 16QAM into four rotationally symmetric quadrant subsets, one per
/// QPSK symbol, each ordered so element `i` of every subset is the 90-degree
/// rotation of element `i` of the first.
pub fn partition_rotational(
    source: &Constellation,
    base: &Constellation,
) -> Result<SubsetPartition, SrmError> {
    if source.order() != 4 || base.order() != 16 {
        return Err(SrmError::UnsupportedPair {
            source_order: source.order(),
            target_order: base.order(),
        });
    }
    let quadrant = |p: Complex64| -> usize {
        match (p.re > 0.0, p.im > 0.0) {
            (true, true) => 0,
            (false, true) => 1,
            (false, false) => 2,
            (true, false) => 3,
        }
    };
    let wrap = |a: f64| -> f64 {
        let mut x = a;
        while x > core::f64::consts::PI {
            x -= 2.0 * core::f64::consts::PI;
        }
        while x <= -core::f64::consts::PI {
            x += 2.0 * core::f64::consts::PI;
        }
        x
    };
    let mut groups = vec![Vec::new(); 4];
    let mut used = [false; 4];
    for m in 0..4 {
        let phase = source.point(m).arg();
        // quadrant whose bisector is nearest in phase; ties go counter-clockwise
        let mut best = 0usize;
        let mut best_key = (f64::INFINITY, 0.0f64);
        for q in 0..4 {
            let center = core::f64::consts::FRAC_PI_4 + core::f64::consts::FRAC_PI_2 * q as f64;
            let diff = wrap(center - phase);
            let key = (diff.abs(), -diff);
            if key < best_key {
                best_key = key;
                best = q;
            }
        }
        if used[best] {
            return Err(SrmError::InvalidPartition(
                "two source symbols align with the same quadrant",
            ));
        }
        used[best] = true;
        let rot = Complex64::from_polar(1.0, -core::f64::consts::FRAC_PI_2 * best as f64);
        let mut members: Vec<usize> = (0..base.order())
            .filter(|&i| quadrant(base.point(i)) == best)
            .collect();
        // snap the back-rotated coordinates to a fine grid so the sort order
        // is identical across quadrants despite rotation round-off
        let key = |i: usize| {
            let p = base.point(i) * rot;
            (libm::round(p.re * 1e9) as i64, libm::round(p.im * 1e9) as i64)
        };
        members.sort_by_key(|&i| key(i));
        groups[m] = members;
    }
    SubsetPartition::new(base.clone(), groups)
}

/// Per-subset mapping probability rows.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingProbabilities {
    rows: Vec<Vec<f64>>,
}

impl MappingProbabilities {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, SrmError> {
        for row in &rows {
            if row.is_empty() {
                return Err(SrmError::InvalidProbabilities("empty row"));
            }
            if row.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
                return Err(SrmError::InvalidProbabilities("negative or non-finite entry"));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(SrmError::InvalidProbabilities("row does not sum to 1"));
            }
        }
        Ok(Self { rows })
    }

    pub fn uniform(groups: usize, size: usize) -> Self {
        Self {
            rows: vec![vec![1.0 / size as f64; size]; groups],
        }
    }

    /// One probability vector replicated for every subset.
    pub fn replicated(groups: usize, row: &[f64]) -> Result<Self, SrmError> {
        Self::new(vec![row.to_vec(); groups])
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.rows[m]
    }
}

/// A complete low-to-high confusion plan.
#[derive(Debug, Clone, PartialEq)]
pub struct SrmPlan {
    source: Constellation,
    partition: SubsetPartition,
    probs: MappingProbabilities,
    cost_table: Vec<Vec<f64>>,
    sigma: f64,
}

impl SrmPlan {
    pub fn new(
        source: Constellation,
        partition: SubsetPartition,
        probs: MappingProbabilities,
        sigma: f64,
    ) -> Result<Self, SrmError> {
        if source.order() != partition.group_count() {
            return Err(SrmError::InvalidPartition(
                "source order does not match subset count",
            ));
        }
        if probs.rows().len() != partition.group_count()
            || probs
                .rows()
                .iter()
                .zip(partition.groups())
                .any(|(row, group)| row.len() != group.len())
        {
            return Err(SrmError::InvalidProbabilities(
                "row shapes do not match the partition",
            ));
        }
        if !(sigma > 0.0) {
            return Err(SrmError::InvalidProbabilities("sigma must be positive"));
        }
        let cost_table = cost_table(&source, &partition, sigma);
        Ok(Self {
            source,
            partition,
            probs,
            cost_table,
            sigma,
        })
    }

    pub fn source(&self) -> &Constellation {
        &self.source
    }

    pub fn partition(&self) -> &SubsetPartition {
        &self.partition
    }

    pub fn probs(&self) -> &MappingProbabilities {
        &self.probs
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Union-bound cost per (subset, element) at the sigma the plan was built
    /// with; `theta(p) = sum_m sum_i p_i^(m) * cost[m][i]`.
    pub fn cost_table(&self) -> &[Vec<f64>] {
        &self.cost_table
    }

    pub fn with_probs(&self, probs: MappingProbabilities) -> Result<Self, SrmError> {
        Self::new(self.source.clone(), self.partition.clone(), probs, self.sigma)
    }

    /// Text dump (partition indices plus probability rows) for reproducible
    /// harness runs.
    pub fn to_config(&self) -> String {
        let mut out = format!(
            "source {}\ntarget {}\nsigma {:.17e}\n",
            self.source.name(),
            self.partition.base().name(),
            self.sigma
        );
        for (m, group) in self.partition.groups().iter().enumerate() {
            out += &format!("subset {m}");
            for &i in group {
                out += &format!(" {i}");
            }
            out += "\n";
        }
        for (m, row) in self.probs.rows().iter().enumerate() {
            out += &format!("p {m}");
            for &p in row {
                out += &format!(" {p:.17e}");
            }
            out += "\n";
        }
        out
    }
}

/// Union-bound cost table: entry `(m, i)` is
/// `(1/(M log2 M)) * sum_j rho(m, j) * Q(|b_i - complement_j| / (sqrt(2) sigma))`
/// where `j` ranges over the complement of subset `m` and `rho` is the source
/// label Hamming distance between `a_m` and the subset owning the complement
/// point (errors landing inside subset `m` cost no bits).
pub fn cost_table(
    source: &Constellation,
    partition: &SubsetPartition,
    sigma: f64,
) -> Vec<Vec<f64>> {
    let m_count = partition.group_count();
    let bits = (m_count as f64).log2();
    let norm = 1.0 / (m_count as f64 * bits);
    let base = partition.base();
    partition
        .groups()
        .iter()
        .enumerate()
        .map(|(m, group)| {
            group
                .iter()
                .map(|&bi| {
                    let mut acc = 0.0;
                    for j in 0..base.order() {
                        let owner = partition.subset_of(j);
                        if owner == m {
                            continue;
                        }
                        let rho = hamming_distance(source.label(m), source.label(owner))
                            .expect("source labels share a width")
                            as f64;
                        let delta = (base.point(bi) - base.point(j)).norm();
                        acc += rho * q_func(delta / (core::f64::consts::SQRT_2 * sigma));
                    }
                    norm * acc
                })
                .collect()
        })
        .collect()
}

/// Maps source symbol indices to disguise alphabet indices, drawing each
/// replacement from its subset's probability row.
pub fn srm_encode(
    source_indices: &[usize],
    plan: &SrmPlan,
    rng: &mut RngStream,
) -> Result<Vec<usize>, SrmError> {
    let order = plan.source.order();
    let mut out = Vec::with_capacity(source_indices.len());
    for &s in source_indices {
        if s >= order {
            return Err(SrmError::Alphabet { index: s, order });
        }
        let row = plan.probs.row(s);
        let group = &plan.partition.groups()[s];
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = group.len() - 1;
        for (i, &p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                chosen = i;
                break;
            }
        }
        out.push(group[chosen]);
    }
    Ok(out)
}

/// Equalizes, demodulates onto the disguise alphabet, then folds the decision
/// back to the source symbol owning its subset.
pub fn srm_decode(
    y: &[Complex64],
    plan: &SrmPlan,
    ch: &ScalarChannel,
) -> Result<Vec<usize>, SrmError> {
    if ch.gain.norm() == 0.0 {
        return Err(SrmError::SingularChannel);
    }
    let base = plan.partition.base();
    Ok(y
        .iter()
        .map(|&v| plan.partition.subset_of(base.nearest(v / ch.gain)))
        .collect())
}

/// KL divergence (bits) between the confused symbol distribution and the
/// uniform disguise distribution: `log2 K - mean_m H(p_m)`, with `0 log 0 = 0`.
pub fn kl_divergence(probs: &MappingProbabilities) -> f64 {
    let k = probs.row(0).len();
    assert!(
        probs.rows().iter().all(|r| r.len() == k),
        "rows must share a length"
    );
    let mean_entropy = probs
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(|&p| if p > 0.0 { -p * p.log2() } else { 0.0 })
                .sum::<f64>()
        })
        .sum::<f64>()
        / probs.rows().len() as f64;
    (k as f64).log2() - mean_entropy
}

/// Union-bound BER of the plan's probabilities at the given noise level.
pub fn ber_union_bound(plan: &SrmPlan, sigma: f64) -> f64 {
    let table;
    let costs = if sigma == plan.sigma {
        plan.cost_table()
    } else {
        table = cost_table(&plan.source, &plan.partition, sigma);
        &table
    };
    bound_of(costs, plan.probs.rows())
}

fn bound_of(costs: &[Vec<f64>], rows: &[Vec<f64>]) -> f64 {
    costs
        .iter()
        .zip(rows)
        .map(|(c, p)| c.iter().zip(p).map(|(ci, pi)| ci * pi).sum::<f64>())
        .sum()
}

fn gibbs_rows(costs: &[Vec<f64>], beta: f64) -> Vec<Vec<f64>> {
    costs
        .iter()
        .map(|row| {
            let min = row.iter().copied().fold(f64::INFINITY, f64::min);
            let weights: Vec<f64> = row.iter().map(|&c| (-beta * (c - min)).exp()).collect();
            let z: f64 = weights.iter().sum();
            weights.into_iter().map(|w| w / z).collect()
        })
        .collect()
}

/// Result of the mapping-probability optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedMapping {
    pub probs: MappingProbabilities,
    /// Gibbs exponent: each row is `softmax(-dual * cost_row)`. Zero iff the
    /// uniform mapping already meets the budget.
    pub dual: f64,
    /// Achieved union-bound value.
    pub bound: f64,
}

/// Minimizes the KL divergence subject to `ber_union_bound <= eta` over the
/// plan's partition at noise level `sigma`.
///
/// The objective is separable entropy and the constraint is linear, so the
/// optimum is the exponential family `p_i ∝ exp(-beta * c_i)` with one shared
/// `beta >= 0`; a bisection drives the bound onto the budget (within 1e-10).
pub fn optimize_probabilities(
    plan: &SrmPlan,
    eta: f64,
    sigma: f64,
) -> Result<OptimizedMapping, SrmError> {
    let table;
    let costs: &[Vec<f64>] = if sigma == plan.sigma {
        plan.cost_table()
    } else {
        table = cost_table(&plan.source, &plan.partition, sigma);
        &table
    };

    let theta_min: f64 = costs
        .iter()
        .map(|row| row.iter().copied().fold(f64::INFINITY, f64::min))
        .sum();
    if eta < theta_min - 1e-12 {
        return Err(SrmError::Infeasible { eta, theta_min });
    }

    let uniform = gibbs_rows(costs, 0.0);
    if bound_of(costs, &uniform) <= eta {
        let probs = MappingProbabilities::new(uniform).expect("uniform rows are valid");
        let bound = bound_of(costs, probs.rows());
        return Ok(OptimizedMapping {
            probs,
            dual: 0.0,
            bound,
        });
    }

    // Expand until the budget is met, then bisect; bound(beta) is
    // nonincreasing and reaches theta_min in the limit.
    let mut hi = 1.0;
    for _ in 0..200 {
        if bound_of(costs, &gibbs_rows(costs, hi)) <= eta {
            break;
        }
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bound_of(costs, &gibbs_rows(costs, mid)) > eta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rows = gibbs_rows(costs, hi);
    let bound = bound_of(costs, &rows);
    debug_assert!((bound - eta).abs() <= 1e-10 * eta.max(1.0) || bound <= theta_min + 1e-12);
    Ok(OptimizedMapping {
        probs: MappingProbabilities::new(rows).expect("softmax rows are valid"),
        dual: hi,
        bound,
    })
}
