//! RIS reflection design and the combined beamformer.
//!
//! The feasibility programs ask for a passive reflection vector whose
//! reflected gain clears a per-antenna power-budget bound. We recast them as
//! max-min margin maximization: projected subgradient ascent on the worst
//! constraint, with each element projected back onto the unit disc. The
//! real-part form is a restriction of the modulus form, so a failure here is
//! reported as `RestrictedInfeasible` unless the modulus problem is provably
//! infeasible too.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::linalg::CMat;
use crate::mimo::Beamformer;

/// Feasibility tolerance of the first-order solver.
pub const MARGIN_TOLERANCE: f64 = 1e-7;

const ITERATIONS: usize = 5000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RisError {
    #[error("inconsistent dimensions: {0}")]
    Dimension(&'static str),
    #[error("antenna {antenna} needs |qRD| >= {required} but at most {attainable} is reachable")]
    Infeasible {
        antenna: usize,
        required: f64,
        attainable: f64,
    },
    #[error("real-part restriction infeasible at antenna {antenna} (margin {margin})")]
    RestrictedInfeasible { antenna: usize, margin: f64 },
    #[error("effective channel of antenna {antenna} is zero")]
    SingularEffectiveChannel { antenna: usize },
}

/// Channels and budgets of the RIS-assisted link.
#[derive(Debug, Clone, PartialEq)]
pub struct RisSystem {
    q: Vec<Complex64>,
    d: CMat,
    h: Option<Vec<Complex64>>,
    power_budgets: Vec<f64>,
}

impl RisSystem {
    /// `q`: RIS-to-receiver (length V); `d`: transmitter-to-RIS (V x T_A);
    /// `h`: optional direct link (length T_A); `power_budgets`: per-antenna.
    pub fn new(
        q: Vec<Complex64>,
        d: CMat,
        h: Option<Vec<Complex64>>,
        power_budgets: Vec<f64>,
    ) -> Result<Self, RisError> {
        if d.rows() != q.len() {
            return Err(RisError::Dimension("q length must match RIS rows of D"));
        }
        if d.cols() != power_budgets.len() {
            return Err(RisError::Dimension("one power budget per antenna"));
        }
        if let Some(h) = &h {
            if h.len() != d.cols() {
                return Err(RisError::Dimension("direct link length must match antennas"));
            }
        }
        if power_budgets.iter().any(|&g| !(g > 0.0)) {
            return Err(RisError::Dimension("power budgets must be positive"));
        }
        Ok(Self {
            q,
            d,
            h,
            power_budgets,
        })
    }

    pub fn element_count(&self) -> usize {
        self.q.len()
    }

    pub fn antenna_count(&self) -> usize {
        self.d.cols()
    }

    pub fn has_direct_link(&self) -> bool {
        self.h.is_some()
    }

    pub fn q(&self) -> &[Complex64] {
        &self.q
    }

    pub fn d(&self) -> &CMat {
        &self.d
    }

    pub fn h(&self) -> Option<&[Complex64]> {
        self.h.as_deref()
    }

    pub fn power_budgets(&self) -> &[f64] {
        &self.power_budgets
    }

    /// `q diag(r) D_{:,t}`.
    pub fn reflected_gain(&self, r: &Reflection, antenna: usize) -> Complex64 {
        (0..self.element_count())
            .map(|v| self.q[v] * r.coefficients()[v] * self.d[(v, antenna)])
            .sum()
    }

    /// Right-hand side of the feasibility constraint for one antenna:
    /// `1/sqrt(budget) - |h_t|` (the direct term drops without a direct link).
    pub fn constraint_bound(&self, antenna: usize) -> f64 {
        let direct = self.h.as_ref().map_or(0.0, |h| h[antenna].norm());
        1.0 / self.power_budgets[antenna].sqrt() - direct
    }

    /// `Re{q diag(r) D_{:,t}} - bound_t`.
    pub fn margin(&self, r: &Reflection, antenna: usize) -> f64 {
        self.reflected_gain(r, antenna).re - self.constraint_bound(antenna)
    }

    /// Worst-antenna margin.
    pub fn min_margin(&self, r: &Reflection) -> (usize, f64) {
        let mut worst = (0, f64::INFINITY);
        for t in 0..self.antenna_count() {
            let m = self.margin(r, t);
            if m < worst.1 {
                worst = (t, m);
            }
        }
        worst
    }

    /// `h_t + q diag(r) D_{:,t}` per antenna.
    pub fn effective_channel(&self, r: &Reflection) -> Vec<Complex64> {
        (0..self.antenna_count())
            .map(|t| {
                let direct = self.h.as_ref().map_or(Complex64::ZERO, |h| h[t]);
                direct + self.reflected_gain(r, t)
            })
            .collect()
    }
}

/// Passive reflection coefficients, `|r_v| <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reflection {
    r: Vec<Complex64>,
}

impl Reflection {
    pub fn new(r: Vec<Complex64>) -> Result<Self, RisError> {
        if r.iter().any(|z| z.norm() > 1.0 + 1e-9) {
            return Err(RisError::Dimension("passive elements need |r_v| <= 1"));
        }
        Ok(Self { r })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.r
    }
}

/// Solves the reflection feasibility program by maximizing the minimum
/// constraint margin.
///
/// Projected subgradient ascent, step `1/sqrt(iter)`, 5000 iterations,
/// phase-aligned initialization `r_v = exp(-j arg(q_v sum_t D_{v,t}))`; the
/// best iterate is kept. Deterministic for a fixed instance.
pub fn ris_design(sys: &RisSystem) -> Result<Reflection, RisError> {
    let v_count = sys.element_count();
    let t_count = sys.antenna_count();
    // a[v][t] = q_v D_{v,t}; the constraint is sum_v Re{a[v][t] r_v} >= bound_t
    let gains = CMat::from_fn(v_count, t_count, |v, t| sys.q[v] * sys.d[(v, t)]);

    for t in 0..t_count {
        let attainable: f64 = (0..v_count).map(|v| gains[(v, t)].norm()).sum();
        let required = sys.constraint_bound(t);
        if attainable < required - MARGIN_TOLERANCE {
            return Err(RisError::Infeasible {
                antenna: t,
                required,
                attainable,
            });
        }
    }

    let mut r: Vec<Complex64> = (0..v_count)
        .map(|v| {
            let sum: Complex64 = (0..t_count).map(|t| gains[(v, t)]).sum();
            Complex64::from_polar(1.0, -sum.arg())
        })
        .collect();

    let eval = |r: &[Complex64]| -> (usize, f64) {
        let mut worst = (0usize, f64::INFINITY);
        for t in 0..t_count {
            let gain: f64 = (0..v_count).map(|v| (gains[(v, t)] * r[v]).re).sum();
            let m = gain - sys.constraint_bound(t);
            if m < worst.1 {
                worst = (t, m);
            }
        }
        worst
    };

    let mut best = r.clone();
    let mut best_margin = eval(&r).1;
    for iter in 1..=ITERATIONS {
        let (worst_t, margin) = eval(&r);
        if margin > best_margin {
            best_margin = margin;
            best.copy_from_slice(&r);
        }
        let step = 1.0 / (iter as f64).sqrt();
        for v in 0..v_count {
            r[v] += step * gains[(v, worst_t)].conj();
            let norm = r[v].norm();
            if norm > 1.0 {
                r[v] /= norm;
            }
        }
    }
    let (final_t, final_margin) = eval(&r);
    if final_margin > best_margin {
        best_margin = final_margin;
        best.copy_from_slice(&r);
        let _ = final_t;
    }

    if best_margin < -MARGIN_TOLERANCE {
        let reflection = Reflection { r: best };
        let (worst_t, margin) = sys.min_margin(&reflection);
        return Err(RisError::RestrictedInfeasible {
            antenna: worst_t,
            margin,
        });
    }
    Ok(Reflection { r: best })
}

/// Beamformer over the combined channel, `w_t = 1/(h_t + q diag(r) D_{:,t})`.
///
/// When the feasibility constraints hold, `|qRD_t| >= Re{qRD_t} >= bound_t`,
/// which keeps the weights within the power budgets for the instances this
/// crate simulates.
pub fn ris_beamformer(sys: &RisSystem, r: &Reflection) -> Result<Beamformer, RisError> {
    let effective = sys.effective_channel(r);
    if let Some(t) = effective.iter().position(|e| e.norm() == 0.0) {
        return Err(RisError::SingularEffectiveChannel { antenna: t });
    }
    Beamformer::from_effective_channel(&effective)
        .map_err(|_| RisError::SingularEffectiveChannel { antenna: 0 })
}
