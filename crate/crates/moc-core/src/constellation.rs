//! Modulation alphabets: PSK, square/cross QAM, and golden angle modulation.
//!
//! Every builder returns a power-normalized alphabet with bit labels attached,
//! so downstream code can count bit errors and compute label Hamming weights
//! without caring which family the points came from.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use num_traits::Float;

/// Fixed-width bit label attached to a constellation point (MSB first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitLabel {
    bits: u32,
    len: u8,
}

impl BitLabel {
    pub fn new(bits: u32, len: u8) -> Self {
        debug_assert!(len <= 32 && (len == 32 || bits < (1 << len)));
        Self { bits, len }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> u8 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl fmt::Display for BitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.len).rev() {
            write!(f, "{}", (self.bits >> i) & 1)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstellationError {
    #[error("order {0} is not supported for this builder")]
    InvalidOrder(usize),
    #[error("labels have different lengths ({0} vs {1})")]
    LabelLength(u8, u8),
    #[error("points must be pairwise distinct")]
    DuplicatePoint,
    #[error("radius must be positive")]
    InvalidRadius,
    #[error("GAM spec invalid: {0}")]
    InvalidGamSpec(&'static str),
}

/// An ordered complex alphabet with bit labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    name: String,
    points: Vec<Complex64>,
    labels: Vec<BitLabel>,
    power_normalized: bool,
}

impl Constellation {
    /// Assembles an alphabet from raw parts, checking the distinctness
    /// invariants shared by every builder.
    pub fn from_parts(
        name: String,
        points: Vec<Complex64>,
        labels: Vec<BitLabel>,
    ) -> Result<Self, ConstellationError> {
        assert_eq!(points.len(), labels.len());
        for (i, a) in points.iter().enumerate() {
            for b in &points[i + 1..] {
                if (a - b).norm() < 1e-12 {
                    return Err(ConstellationError::DuplicatePoint);
                }
            }
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[i + 1..].contains(a) {
                return Err(ConstellationError::DuplicatePoint);
            }
        }
        let mean = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64;
        Ok(Self {
            name,
            points,
            labels,
            power_normalized: (mean - 1.0).abs() < 1e-12,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.labels.first().map_or(0, |l| u32::from(l.len()))
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Complex64 {
        self.points[index]
    }

    pub fn labels(&self) -> &[BitLabel] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> BitLabel {
        self.labels[index]
    }

    pub fn is_power_normalized(&self) -> bool {
        self.power_normalized
    }

    pub fn mean_power(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.order() as f64
    }

    pub fn max_amplitude(&self) -> f64 {
        self.points.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// Nearest-neighbor decision; ties break toward the lower index.
    pub fn nearest(&self, sample: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (sample - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    pub fn map_indices(&self, indices: &[usize]) -> Vec<Complex64> {
        indices.iter().map(|&i| self.points[i]).collect()
    }

    /// Uniformly scales all points. The name is kept; normalization flags are
    /// recomputed.
    pub fn scaled(&self, factor: f64) -> Self {
        let points = self.points.iter().map(|p| p * factor).collect();
        Self::from_parts(self.name.clone(), points, self.labels.clone())
            .expect("scaling preserves distinctness")
    }

    /// One row per point: `index<TAB>re<TAB>im<TAB>label`.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for (i, (p, l)) in self.points.iter().zip(&self.labels).enumerate() {
            out += &format!("{i}\t{:.12e}\t{:.12e}\t{l}\n", p.re, p.im);
        }
        out
    }
}

/// Number of bit positions in which two equal-length labels differ.
pub fn hamming_distance(a: BitLabel, b: BitLabel) -> Result<u32, ConstellationError> {
    if a.len() != b.len() {
        return Err(ConstellationError::LabelLength(a.len(), b.len()));
    }
    Ok((a.bits() ^ b.bits()).count_ones())
}

fn reflected_gray(k: u32) -> u32 {
    k ^ (k >> 1)
}

/// PSK alphabet with points `exp(j(phase_offset + 2*pi*k/order))`, reflected
/// Gray labels.
pub fn build_psk(order: usize, phase_offset: f64) -> Result<Constellation, ConstellationError> {
    if order < 2 || !order.is_power_of_two() {
        return Err(ConstellationError::InvalidOrder(order));
    }
    let bits = order.trailing_zeros() as u8;
    let points = (0..order)
        .map(|k| {
            Complex64::from_polar(
                1.0,
                phase_offset + 2.0 * core::f64::consts::PI * k as f64 / order as f64,
            )
        })
        .collect();
    let labels = (0..order)
        .map(|k| BitLabel::new(reflected_gray(k as u32), bits))
        .collect();
    let name = match order {
        2 => String::from("BPSK"),
        4 => String::from("QPSK"),
        n => format!("{n}PSK"),
    };
    Constellation::from_parts(name, points, labels)
}

fn gray_axis_levels(bits: u8) -> Vec<(f64, u32)> {
    // (amplitude level, Gray code) ordered by level
    let n = 1usize << bits;
    (0..n)
        .map(|i| {
            let level = (2 * i as i64 - (n as i64 - 1)) as f64;
            (level, reflected_gray(i as u32))
        })
        .collect()
}

/// Square QAM (orders 4, 16, 64) with per-axis Gray labels, or the standard
/// 32-point cross. Power-normalized (16QAM scale 1/sqrt(10)).
pub fn build_qam(order: usize) -> Result<Constellation, ConstellationError> {
    let (points, labels): (Vec<Complex64>, Vec<BitLabel>) = match order {
        4 | 16 | 64 => {
            let axis_bits = (order.trailing_zeros() / 2) as u8;
            let levels = gray_axis_levels(axis_bits);
            let mut pts = Vec::with_capacity(order);
            let mut labs = Vec::with_capacity(order);
            for (i_level, i_gray) in &levels {
                for (q_level, q_gray) in &levels {
                    pts.push(Complex64::new(*i_level, *q_level));
                    labs.push(BitLabel::new(
                        (i_gray << axis_bits) | q_gray,
                        2 * axis_bits,
                    ));
                }
            }
            (pts, labs)
        }
        32 => {
            // 6x6 grid of odd levels minus the four corners.
            let levels = [-5.0, -3.0, -1.0, 1.0, 3.0, 5.0];
            let mut pts = Vec::with_capacity(32);
            for &i in &levels {
                for &q in &levels {
                    if i.abs() == 5.0 && q.abs() == 5.0 {
                        continue;
                    }
                    pts.push(Complex64::new(i, q));
                }
            }
            // The cross has no clean per-axis Gray map; labels are only needed
            // to be distinct (32QAM appears just as a classifier candidate).
            let labs = (0..32)
                .map(|k| BitLabel::new(reflected_gray(k as u32), 5))
                .collect();
            (pts, labs)
        }
        other => return Err(ConstellationError::InvalidOrder(other)),
    };
    let mean = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / order as f64;
    let scale = 1.0 / mean.sqrt();
    let points = points.iter().map(|p| p * scale).collect();
    Constellation::from_parts(format!("{order}QAM"), points, labels)
}

/// Parameters of a golden angle modulation alphabet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GamSpec {
    pub order: usize,
    pub mean_power: f64,
}

impl GamSpec {
    pub fn new(order: usize) -> Self {
        Self {
            order,
            mean_power: 1.0,
        }
    }

    pub fn with_mean_power(order: usize, mean_power: f64) -> Self {
        Self { order, mean_power }
    }

    /// The golden fraction `1 - (sqrt(5) - 1)/2`.
    pub fn golden_fraction(&self) -> f64 {
        1.0 - (5.0f64.sqrt() - 1.0) / 2.0
    }

    /// Radial scale `sqrt(2 * mean_power / (order + 1))`.
    pub fn disc_scale(&self) -> f64 {
        (2.0 * self.mean_power / (self.order as f64 + 1.0)).sqrt()
    }
}

/// Golden angle modulation: point `n` (1-based) is
/// `disc_scale * sqrt(n) * exp(j * 2*pi * golden_fraction * n)`.
pub fn build_gam(spec: &GamSpec) -> Result<Constellation, ConstellationError> {
    if spec.order < 2 {
        return Err(ConstellationError::InvalidGamSpec("order must be >= 2"));
    }
    if !(spec.mean_power > 0.0) {
        return Err(ConstellationError::InvalidGamSpec("mean power must be > 0"));
    }
    let c = spec.disc_scale();
    let phi = spec.golden_fraction();
    let points = (1..=spec.order)
        .map(|n| {
            Complex64::from_polar(
                c * (n as f64).sqrt(),
                2.0 * core::f64::consts::PI * phi * n as f64,
            )
        })
        .collect();
    let bits = (usize::BITS - (spec.order - 1).leading_zeros()) as u8;
    let labels = (0..spec.order)
        .map(|k| BitLabel::new(reflected_gray(k as u32), bits))
        .collect();
    Constellation::from_parts(format!("{}GAM", spec.order), points, labels)
}

/// Rescales so the largest point magnitude equals `radius` exactly.
pub fn normalize_amplitude(
    c: &Constellation,
    radius: f64,
) -> Result<Constellation, ConstellationError> {
    if !(radius > 0.0) {
        return Err(ConstellationError::InvalidRadius);
    }
    Ok(c.scaled(radius / c.max_amplitude()))
}
