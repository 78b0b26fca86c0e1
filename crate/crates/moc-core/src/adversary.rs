//! The eavesdropper's toolchain: expert-feature modulation classifiers and
//! blind source separation.
//!
//! Classifier references are always derived from the candidate constellations
//! at call time (exact moments for the cumulant path, large synthetic sample
//! sets for the K-S path), never from hardcoded tables, so the candidate list
//! is freely extensible.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;
use rand::Rng;

use crate::channel::{snr_db_to_sigma2, RngStream};
use crate::constellation::Constellation;
use crate::linalg::{hermitian_eigen, CMat};

/// Minimum samples for a usable cumulant estimate.
pub const MIN_CUMULANT_SAMPLES: usize = 64;

/// Synthetic sample count behind each K-S reference CDF.
pub const KS_REFERENCE_SAMPLES: usize = 1_000_000;

/// Master seed of the deterministic reference generators.
const KS_REFERENCE_SEED: u64 = 0x4b53_5245_4644;

const ICA_MAX_ITERATIONS: usize = 200;
const ICA_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AdversaryError {
    #[error("{got} samples, need at least {need}")]
    SampleSize { got: usize, need: usize },
    #[error("candidate list is empty")]
    NoCandidates,
    #[error("cannot separate {sources} sources from {sensors} sensors")]
    SourceCount { sources: usize, sensors: usize },
}

/// Second- and fourth-order sample statistics of a symbol stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantFeatures {
    /// `E[s^2]`
    pub c20: Complex64,
    /// `E[|s|^2]`
    pub c21: f64,
    /// `E[s^4] - 3 C20^2`
    pub c40: Complex64,
    /// `E[|s|^4] - |C20|^2 - 2 C21^2`
    pub c42: f64,
}

/// Sample cumulants of a stream (plain sample means throughout).
pub fn estimate_cumulants(samples: &[Complex64]) -> Result<CumulantFeatures, AdversaryError> {
    if samples.len() < MIN_CUMULANT_SAMPLES {
        return Err(AdversaryError::SampleSize {
            got: samples.len(),
            need: MIN_CUMULANT_SAMPLES,
        });
    }
    let n = samples.len() as f64;
    let mut m2 = Complex64::ZERO;
    let mut p2 = 0.0;
    let mut m4 = Complex64::ZERO;
    let mut p4 = 0.0;
    for &s in samples {
        let s2 = s * s;
        let a2 = s.norm_sqr();
        m2 += s2;
        p2 += a2;
        m4 += s2 * s2;
        p4 += a2 * a2;
    }
    let c20 = m2 / n;
    let c21 = p2 / n;
    Ok(CumulantFeatures {
        c20,
        c21,
        c40: m4 / n - 3.0 * c20 * c20,
        c42: p4 / n - c20.norm_sqr() - 2.0 * c21 * c21,
    })
}

/// Exact normalized `C42` of an alphabet (uniform symbols, unit reference
/// power): `C42 / C21^2`.
pub fn theoretical_c42(c: &Constellation) -> f64 {
    let n = c.order() as f64;
    let mut m2 = Complex64::ZERO;
    let mut p2 = 0.0;
    let mut p4 = 0.0;
    for &p in c.points() {
        m2 += p * p;
        p2 += p.norm_sqr();
        p4 += p.norm_sqr() * p.norm_sqr();
    }
    let c20 = m2 / n;
    let c21 = p2 / n;
    let c42 = p4 / n - c20.norm_sqr() - 2.0 * c21 * c21;
    c42 / (c21 * c21)
}

/// Outcome of a classification: `chosen` indexes the candidate list; lower
/// score = better fit; ties resolve to the first candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierVerdict {
    pub chosen: usize,
    pub scores: Vec<f64>,
}

fn argmin(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s < scores[best] {
            best = i;
        }
    }
    best
}

/// Nearest-candidate decision on the noise-compensated normalized `C42`.
///
/// Gaussian noise leaves fourth-order cumulants untouched but inflates the
/// power estimate, so the supplied `noise_variance` is subtracted from `C21`
/// before normalizing.
pub fn cumulant_classify(
    samples: &[Complex64],
    candidates: &[Constellation],
    noise_variance: f64,
) -> Result<ClassifierVerdict, AdversaryError> {
    if candidates.is_empty() {
        return Err(AdversaryError::NoCandidates);
    }
    let feats = estimate_cumulants(samples)?;
    let signal_power = (feats.c21 - noise_variance).max(1e-12);
    let normalized = feats.c42 / (signal_power * signal_power);
    let scores: Vec<f64> = candidates
        .iter()
        .map(|c| (normalized - theoretical_c42(c)).abs())
        .collect();
    Ok(ClassifierVerdict {
        chosen: argmin(&scores),
        scores,
    })
}

/// Statistic the K-S classifiers compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KsMode {
    /// `|z|` per sample.
    Magnitude,
    /// Pooled in-phase and quadrature projections (two values per sample).
    Quadrature,
}

fn ks_statistic_samples(samples: &[Complex64], mode: KsMode) -> Vec<f64> {
    match mode {
        KsMode::Magnitude => samples.iter().map(|z| z.norm()).collect(),
        KsMode::Quadrature => samples
            .iter()
            .flat_map(|z| [z.re, z.im])
            .collect(),
    }
}

/// Reference CDF of one candidate at one SNR, sampled synthetically.
#[derive(Debug, Clone)]
pub struct KsReference {
    mode: KsMode,
    sorted: Vec<f64>,
}

impl KsReference {
    /// Draws `sample_count` candidate symbols through an AWGN channel at
    /// `snr_db` and keeps the sorted statistic values.
    pub fn build(
        candidate: &Constellation,
        mode: KsMode,
        snr_db: f64,
        sample_count: usize,
        rng: &mut RngStream,
    ) -> Self {
        let sigma2 = snr_db_to_sigma2(snr_db, candidate.mean_power());
        let order = candidate.order();
        let mut symbols = Vec::with_capacity(sample_count);
        for _ in 0..sample_count {
            let idx = rng.random_range(0..order);
            symbols.push(candidate.point(idx) + rng.complex_normal(sigma2));
        }
        let mut sorted = ks_statistic_samples(&symbols, mode);
        sorted.sort_unstable_by(f64::total_cmp);
        Self { mode, sorted }
    }

    pub fn mode(&self) -> KsMode {
        self.mode
    }

    /// Empirical CDF value at `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let pos = self.sorted.partition_point(|&v| v <= x);
        pos as f64 / self.sorted.len() as f64
    }
}

/// One-sample Kolmogorov-Smirnov sup-distance of a statistic sample against a
/// reference CDF.
pub fn ks_distance(statistic: &mut [f64], reference: &KsReference) -> f64 {
    statistic.sort_unstable_by(f64::total_cmp);
    let n = statistic.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &x) in statistic.iter().enumerate() {
        let f = reference.cdf(x);
        sup = sup.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    sup
}

/// K-S classification against prebuilt references (the hot-loop variant).
pub fn ks_classify_with(
    samples: &[Complex64],
    references: &[KsReference],
) -> Result<ClassifierVerdict, AdversaryError> {
    if references.is_empty() {
        return Err(AdversaryError::NoCandidates);
    }
    let mode = references[0].mode;
    let scores: Vec<f64> = references
        .iter()
        .map(|r| {
            debug_assert!(r.mode == mode);
            let mut stat = ks_statistic_samples(samples, r.mode);
            ks_distance(&mut stat, r)
        })
        .collect();
    Ok(ClassifierVerdict {
        chosen: argmin(&scores),
        scores,
    })
}

/// K-S classification: builds a deterministic reference per candidate at the
/// estimated SNR, then picks the candidate with the smallest sup-distance.
pub fn ks_classify(
    samples: &[Complex64],
    candidates: &[Constellation],
    mode: KsMode,
    snr_db: f64,
) -> Result<ClassifierVerdict, AdversaryError> {
    if candidates.is_empty() {
        return Err(AdversaryError::NoCandidates);
    }
    let references: Vec<KsReference> = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut rng = RngStream::new(KS_REFERENCE_SEED, i as u64);
            KsReference::build(c, mode, snr_db, KS_REFERENCE_SAMPLES, &mut rng)
        })
        .collect();
    ks_classify_with(samples, &references)
}

/// Blind source separation output; streams are recovered up to permutation
/// and per-stream phase.
#[derive(Debug, Clone)]
pub struct IcaResult {
    /// `source_count x samples`, rows normalized to unit empirical power.
    pub separated: CMat,
    /// `source_count x sensors` demixing matrix (includes whitening).
    pub demixing: CMat,
    pub converged: bool,
    pub iterations: usize,
}

fn symmetric_decorrelation(w: &CMat) -> CMat {
    let m = w.mul(&w.adjoint());
    let (values, vectors) = hermitian_eigen(&m);
    let n = values.len();
    let inv_sqrt = CMat::from_fn(n, n, |r, c| {
        if r == c {
            Complex64::new(1.0 / values[r].max(1e-18).sqrt(), 0.0)
        } else {
            Complex64::ZERO
        }
    });
    vectors.mul(&inv_sqrt).mul(&vectors.adjoint()).mul(w)
}

/// Complex FastICA: whitening by eigendecomposition of the sample covariance,
/// then fixed-point iterations with the log-cosh contrast on `|w^H x|^2` and
/// symmetric decorrelation each round.
pub fn fastica_separate(
    observations: &CMat,
    source_count: usize,
    rng: &mut RngStream,
) -> Result<IcaResult, AdversaryError> {
    let sensors = observations.rows();
    let samples = observations.cols();
    if source_count == 0 || source_count > sensors {
        return Err(AdversaryError::SourceCount {
            sources: source_count,
            sensors,
        });
    }
    if samples < 50 * source_count {
        return Err(AdversaryError::SampleSize {
            got: samples,
            need: 50 * source_count,
        });
    }

    // center
    let mut centered = observations.clone();
    for r in 0..sensors {
        let mean: Complex64 = centered.row(r).iter().sum::<Complex64>() / samples as f64;
        for c in 0..samples {
            centered[(r, c)] -= mean;
        }
    }

    // whiten: keep the strongest source_count eigenpairs of the covariance
    let cov = CMat::from_fn(sensors, sensors, |r, c| {
        let mut acc = Complex64::ZERO;
        for s in 0..samples {
            acc += centered[(r, s)] * centered[(c, s)].conj();
        }
        acc / samples as f64
    });
    let (values, vectors) = hermitian_eigen(&cov);
    let whitener = CMat::from_fn(source_count, sensors, |r, c| {
        vectors[(c, r)].conj() / values[r].max(1e-18).sqrt()
    });
    let x = whitener.mul(&centered);

    // fixed-point iterations; W rows are the conjugated projections (y = W x)
    let mut w = CMat::from_fn(source_count, source_count, |_, _| rng.complex_normal(1.0));
    w = symmetric_decorrelation(&w);
    let mut converged = false;
    let mut iterations = 0;
    for iter in 0..ICA_MAX_ITERATIONS {
        iterations = iter + 1;
        let w_old = w.clone();
        let y = w.mul(&x);
        let mut w_new = CMat::zeros(source_count, source_count);
        for k in 0..source_count {
            let mut scal = 0.0;
            let mut acc = alloc::vec![Complex64::ZERO; source_count];
            for s in 0..samples {
                let yk = y[(k, s)];
                let a = yk.norm_sqr();
                let g = a.tanh();
                let gp = 1.0 - g * g;
                scal += g + a * gp;
                let w0 = yk * g;
                for (j, slot) in acc.iter_mut().enumerate() {
                    *slot += x[(j, s)].conj() * w0;
                }
            }
            let inv = 1.0 / samples as f64;
            for j in 0..source_count {
                w_new[(k, j)] = acc[j] * inv - scal * inv * w[(k, j)];
            }
        }
        w = symmetric_decorrelation(&w_new);
        let mut crit: f64 = 0.0;
        for k in 0..source_count {
            let mut dot = Complex64::ZERO;
            for j in 0..source_count {
                dot += w[(k, j)] * w_old[(k, j)].conj();
            }
            crit = crit.max((1.0 - dot.norm()).abs());
        }
        if crit < ICA_TOLERANCE {
            converged = true;
            break;
        }
    }

    let mut separated = w.mul(&x);
    for r in 0..source_count {
        let power: f64 =
            separated.row(r).iter().map(|z| z.norm_sqr()).sum::<f64>() / samples as f64;
        let scale = 1.0 / power.max(1e-18).sqrt();
        for c in 0..samples {
            separated[(r, c)] *= scale;
        }
    }
    Ok(IcaResult {
        separated,
        demixing: w.mul(&whitener),
        converged,
        iterations,
    })
}
