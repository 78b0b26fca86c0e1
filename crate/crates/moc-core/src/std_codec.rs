//! Symbol time diversity: high-to-low-order confusion.
//!
//! The transmitter maps source symbol `a_i^(n)` to `i` repeats of the
//! low-order symbol `b_n`, escaping to the reserved last symbol when two
//! consecutive source symbols share a subset; adjacent runs therefore always
//! carry distinct symbols. The receiver cannot see run boundaries, so it
//! partitions the symbol-rate samples with a dynamic program over (samples
//! consumed, runs produced) and backtracks the stored path.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::channel::ScalarChannel;
use crate::constellation::Constellation;

/// Initial value of every unreached DP cell.
pub const DP_SENTINEL: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StdError {
    #[error("invalid codebook: {0}")]
    InvalidCodebook(&'static str),
    #[error("observed length {observed} incompatible with frame of {frame_len} (k_max {k_max})")]
    FrameLength {
        observed: usize,
        frame_len: usize,
        k_max: usize,
    },
    #[error("dynamic program backtrack failed")]
    DecodeFailure,
    #[error("escape run without a predecessor")]
    Protocol,
    #[error("run duration {duration} exceeds the agreed k_max {k_max}")]
    Duration { duration: usize, k_max: usize },
    #[error("channel gain is zero")]
    SingularChannel,
}

/// Shared agreement between the endpoints: the subset split of the source
/// alphabet, the disguise alphabet, and the escape symbol (its last point).
#[derive(Debug, Clone, PartialEq)]
pub struct StdCodebook {
    source: Constellation,
    target: Constellation,
    groups: Vec<Vec<usize>>,
    position: Vec<(usize, usize)>,
    k_max: usize,
}

impl StdCodebook {
    /// `groups` must hold `target.order() - 1` disjoint subsets covering the
    /// source alphabet; subset `n` rides on target symbol `n`.
    pub fn new(
        source: Constellation,
        target: Constellation,
        groups: Vec<Vec<usize>>,
    ) -> Result<Self, StdError> {
        if target.order() < 2 {
            return Err(StdError::InvalidCodebook("target order must be >= 2"));
        }
        if groups.len() != target.order() - 1 {
            return Err(StdError::InvalidCodebook(
                "need exactly target order - 1 subsets",
            ));
        }
        let m = source.order();
        let mut position = vec![(usize::MAX, 0); m];
        for (n, group) in groups.iter().enumerate() {
            if group.is_empty() {
                return Err(StdError::InvalidCodebook("empty subset"));
            }
            for (i, &a) in group.iter().enumerate() {
                if a >= m {
                    return Err(StdError::InvalidCodebook("index out of range"));
                }
                if position[a].0 != usize::MAX {
                    return Err(StdError::InvalidCodebook("subsets overlap"));
                }
                position[a] = (n, i + 1);
            }
        }
        if position.iter().any(|&(n, _)| n == usize::MAX) {
            return Err(StdError::InvalidCodebook(
                "subsets do not cover the source alphabet",
            ));
        }
        let k_max = groups.iter().map(Vec::len).max().unwrap();
        Ok(Self {
            source,
            target,
            groups,
            position,
            k_max,
        })
    }

    /// Even split: subset `n` takes the next `M / (N-1)` source symbols in
    /// index order (16PSK -> 9GAM, 8PSK -> 5GAM, ...).
    pub fn even(source: Constellation, target: Constellation) -> Result<Self, StdError> {
        let m = source.order();
        let n_groups = target.order() - 1;
        if n_groups == 0 || m % n_groups != 0 {
            return Err(StdError::InvalidCodebook(
                "source order not divisible by target order - 1",
            ));
        }
        let k = m / n_groups;
        let groups = (0..n_groups)
            .map(|n| (n * k..(n + 1) * k).collect())
            .collect();
        Self::new(source, target, groups)
    }

    pub fn source(&self) -> &Constellation {
        &self.source
    }

    pub fn target(&self) -> &Constellation {
        &self.target
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Index of the escape symbol `b_N` in the target alphabet.
    pub fn escape_index(&self) -> usize {
        self.target.order() - 1
    }

    /// Subset index and 1-based position (the transmit duration) of a source
    /// symbol.
    pub fn locate(&self, source_index: usize) -> (usize, usize) {
        self.position[source_index]
    }
}

/// One transmitted run: a target symbol repeated `duration` symbol periods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DurationRun {
    pub symbol_index: usize,
    pub duration: usize,
}

/// Encodes a source frame into duration runs (Algorithm 1 of the scheme).
pub fn std_encode(source_indices: &[usize], cb: &StdCodebook) -> Vec<DurationRun> {
    let mut runs = Vec::with_capacity(source_indices.len());
    let mut prev: Option<(usize, bool)> = None;
    for &s in source_indices {
        let (n, duration) = cb.locate(s);
        let escaped = matches!(prev, Some((pn, pe)) if pn == n && !pe);
        runs.push(DurationRun {
            symbol_index: if escaped { cb.escape_index() } else { n },
            duration,
        });
        prev = Some((n, escaped));
    }
    runs
}

/// Expands runs into the symbol-rate index sequence `x'`.
pub fn expand_runs(runs: &[DurationRun]) -> Vec<usize> {
    let mut out = Vec::with_capacity(runs.iter().map(|r| r.duration).sum());
    for run in runs {
        out.extend(core::iter::repeat(run.symbol_index).take(run.duration));
    }
    out
}

/// Nearest target symbol to the mean of a received window; ties break toward
/// the lower index.
pub fn group_mean_symbol(window: &[Complex64], target: &Constellation) -> usize {
    debug_assert!(!window.is_empty());
    let mean = window.iter().sum::<Complex64>() / window.len() as f64;
    target.nearest(mean)
}

/// Cost and path tables of the deconfusion dynamic program.
#[derive(Debug, Clone, PartialEq)]
pub struct DpState {
    /// `cost[j][l]`: min dissimilarity partitioning the first `j` samples into
    /// `l` runs; unreached cells stay at [`DP_SENTINEL`].
    pub cost: Vec<Vec<f64>>,
    /// `path[j][l]`: duration of the last run on the optimal path (0 =
    /// unreached).
    pub path: Vec<Vec<usize>>,
    pub observed: usize,
    pub frame_len: usize,
}

/// Knobs of the dynamic program.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DpOptions {
    /// Fixed cost for single-sample runs; `None` scores them like any other
    /// window (`|y - nearest|`).
    pub single_symbol_cost: Option<f64>,
}

/// Fills the DP tables over equalized samples.
///
/// Each cell minimizes the accumulated cost `cost[j-k][l-1] + c'(j,k)` with
/// `c'(j,k)` the mean distance of the window to its group-mean symbol; ties
/// prefer the shorter duration.
pub fn dp_fill(
    equalized: &[Complex64],
    cb: &StdCodebook,
    frame_len: usize,
    opts: DpOptions,
) -> DpState {
    let j_max = equalized.len();
    let mut cost = vec![vec![DP_SENTINEL; frame_len + 1]; j_max + 1];
    let mut path = vec![vec![0usize; frame_len + 1]; j_max + 1];
    cost[0][0] = 0.0;
    for j in 1..=j_max {
        for l in 1..=frame_len.min(j) {
            let mut best = DP_SENTINEL;
            let mut best_k = 0;
            for k in 1..=cb.k_max().min(j) {
                let prev = cost[j - k][l - 1];
                if prev >= DP_SENTINEL {
                    continue;
                }
                let window = &equalized[j - k..j];
                let local = if k == 1 {
                    opts.single_symbol_cost.unwrap_or_else(|| {
                        (window[0] - cb.target().point(cb.target().nearest(window[0]))).norm()
                    })
                } else {
                    let b = cb.target().point(group_mean_symbol(window, cb.target()));
                    window.iter().map(|&y| (y - b).norm()).sum::<f64>() / k as f64
                };
                let total = prev + local;
                if total < best {
                    best = total;
                    best_k = k;
                }
            }
            if best_k > 0 {
                cost[j][l] = best;
                path[j][l] = best_k;
            }
        }
    }
    DpState {
        cost,
        path,
        observed: j_max,
        frame_len,
    }
}

/// Backtracks the path table into the run sequence.
pub fn dp_backtrack(
    state: &DpState,
    equalized: &[Complex64],
    cb: &StdCodebook,
) -> Result<Vec<DurationRun>, StdError> {
    let mut j = state.observed;
    let mut l = state.frame_len;
    let mut runs = Vec::with_capacity(l);
    while j > 0 && l > 0 {
        let k = state.path[j][l];
        if k == 0 {
            return Err(StdError::DecodeFailure);
        }
        let window = &equalized[j - k..j];
        runs.push(DurationRun {
            symbol_index: group_mean_symbol(window, cb.target()),
            duration: k,
        });
        j -= k;
        l -= 1;
    }
    if j != 0 || l != 0 {
        return Err(StdError::DecodeFailure);
    }
    runs.reverse();
    Ok(runs)
}

/// Full deconfusion receiver (Algorithm 2): equalize, fill the DP tables,
/// backtrack. Produces exactly `frame_len` runs whose durations sum to the
/// observed length.
pub fn dp_decode(
    received: &[Complex64],
    cb: &StdCodebook,
    frame_len: usize,
    ch: &ScalarChannel,
) -> Result<Vec<DurationRun>, StdError> {
    dp_decode_opts(received, cb, frame_len, ch, DpOptions::default())
}

pub fn dp_decode_opts(
    received: &[Complex64],
    cb: &StdCodebook,
    frame_len: usize,
    ch: &ScalarChannel,
    opts: DpOptions,
) -> Result<Vec<DurationRun>, StdError> {
    let observed = received.len();
    if frame_len == 0 || observed < frame_len || observed > frame_len * cb.k_max() {
        return Err(StdError::FrameLength {
            observed,
            frame_len,
            k_max: cb.k_max(),
        });
    }
    if ch.gain.norm() == 0.0 {
        return Err(StdError::SingularChannel);
    }
    let equalized: Vec<Complex64> = received.iter().map(|&y| y / ch.gain).collect();
    let state = dp_fill(&equalized, cb, frame_len, opts);
    dp_backtrack(&state, &equalized, cb)
}

/// Demapped frame plus how many durations had to be clamped into their
/// subset's range (each clamp is a symbol error surfaced to the caller).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemapOutcome {
    pub symbols: Vec<usize>,
    pub clamped: usize,
}

/// Inverts the duration mapping: run `(b_n, i)` becomes `a_i^(n)`; escape runs
/// inherit the subset of the previously demapped symbol.
pub fn demap_runs(runs: &[DurationRun], cb: &StdCodebook) -> Result<DemapOutcome, StdError> {
    let escape = cb.escape_index();
    let mut symbols = Vec::with_capacity(runs.len());
    let mut clamped = 0;
    let mut prev_subset: Option<usize> = None;
    for run in runs {
        if run.duration == 0 || run.duration > cb.k_max() {
            return Err(StdError::Duration {
                duration: run.duration,
                k_max: cb.k_max(),
            });
        }
        let n = if run.symbol_index == escape {
            prev_subset.ok_or(StdError::Protocol)?
        } else {
            run.symbol_index
        };
        let group = &cb.groups()[n];
        let pos = if run.duration > group.len() {
            clamped += 1;
            group.len()
        } else {
            run.duration
        };
        symbols.push(group[pos - 1]);
        prev_subset = Some(n);
    }
    Ok(DemapOutcome { symbols, clamped })
}
