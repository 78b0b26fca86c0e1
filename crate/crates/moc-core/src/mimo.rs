//! Multi-antenna confusion transmitters.
//!
//! Two strategies, both summing to the plain secure symbol at the receiver
//! after channel-inverting beamforming: the Taylor scheme sends a nonlinear
//! transform on one antenna and negated series terms on the others, while
//! constellation path design expresses each symbol as an exact sum of
//! lower-order component symbols.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;
use rand::Rng;

use crate::channel::RngStream;
use crate::constellation::Constellation;

/// Matching tolerance for exact-sum searches.
const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MimoError {
    #[error("channel coefficient {antenna} is zero")]
    SingularChannel { antenna: usize },
    #[error("|s - s0| = {magnitude} exceeds the convergence radius {radius}")]
    Divergence { magnitude: f64, radius: f64 },
    #[error("linear series coefficient is zero")]
    DegenerateFunction,
    #[error("invalid term assignment: {0}")]
    InvalidAssignment(&'static str),
    #[error("invalid component sets: {0}")]
    InvalidComponentSets(&'static str),
    #[error("no exact decomposition for source symbols {missing:?}")]
    Coverage { missing: Vec<usize> },
    #[error("symbol index {index} missing from the table")]
    MissingSymbol { index: usize },
}

/// Per-antenna channel-inversion weights (`h_t * w_t = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    weights: Vec<Complex64>,
}

impl Beamformer {
    pub(crate) fn from_effective_channel(
        effective: &[Complex64],
    ) -> Result<Self, MimoError> {
        let mut weights = Vec::with_capacity(effective.len());
        for (t, &h) in effective.iter().enumerate() {
            if h.norm() == 0.0 {
                return Err(MimoError::SingularChannel { antenna: t });
            }
            weights.push(Complex64::ONE / h);
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn antenna_count(&self) -> usize {
        self.weights.len()
    }
}

/// Channel-inverting beamformer `w_t = 1 / h_t`, so antenna signals sum
/// directly at the receiver.
pub fn beamformer_design(h: &[Complex64]) -> Result<Beamformer, MimoError> {
    Beamformer::from_effective_channel(h)
}

/// The nonlinear transforms the Taylor scheme knows how to expand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfusionFunction {
    Arctan,
}

/// A function together with its expansion point and series coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionSpec {
    function: ConfusionFunction,
    expansion_point: Complex64,
}

impl FunctionSpec {
    /// `arctan` expanded at the origin (the only expansion point with clean
    /// coefficients; nonzero centers are future work).
    pub fn arctan() -> Self {
        Self {
            function: ConfusionFunction::Arctan,
            expansion_point: Complex64::ZERO,
        }
    }

    pub fn function(&self) -> ConfusionFunction {
        self.function
    }

    pub fn expansion_point(&self) -> Complex64 {
        self.expansion_point
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        match self.function {
            ConfusionFunction::Arctan => s.atan(),
        }
    }

    /// `lambda_n / n!`: the coefficient of `(s - s0)^n`. For arctan the even
    /// coefficients vanish and the odd ones alternate as `(-1)^k / (2k+1)`.
    pub fn series_coefficient(&self, order: u32) -> f64 {
        match self.function {
            ConfusionFunction::Arctan => {
                if order % 2 == 0 {
                    0.0
                } else {
                    let k = (order - 1) / 2;
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    sign / order as f64
                }
            }
        }
    }

    /// `lambda_1`, the linear coefficient.
    pub fn linear_coefficient(&self) -> f64 {
        self.series_coefficient(1)
    }

    pub fn convergence_radius(&self) -> f64 {
        match self.function {
            ConfusionFunction::Arctan => 1.0,
        }
    }

    /// Orders of the nonzero nonlinear terms, ascending.
    pub fn nonzero_orders(&self) -> impl Iterator<Item = u32> + '_ {
        (1u32..).map(|k| 2 * k + 1)
    }
}

/// Which nonlinear term orders each auxiliary antenna cancels.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorPlan {
    spec: FunctionSpec,
    antenna_count: usize,
    /// `assignment[t - 2]` holds the orders antenna `t` transmits negated.
    assignment: Vec<Vec<u32>>,
}

impl TaylorPlan {
    pub fn new(
        spec: FunctionSpec,
        antenna_count: usize,
        assignment: Vec<Vec<u32>>,
    ) -> Result<Self, MimoError> {
        if antenna_count == 0 {
            return Err(MimoError::InvalidAssignment("need at least one antenna"));
        }
        if assignment.len() != antenna_count - 1 {
            return Err(MimoError::InvalidAssignment(
                "need one term set per auxiliary antenna",
            ));
        }
        let mut seen: Vec<u32> = Vec::new();
        for set in &assignment {
            for &n in set {
                if spec.series_coefficient(n) == 0.0 {
                    return Err(MimoError::InvalidAssignment(
                        "assigned order has a zero coefficient",
                    ));
                }
                if seen.contains(&n) {
                    return Err(MimoError::InvalidAssignment("term sets overlap"));
                }
                seen.push(n);
            }
        }
        Ok(Self {
            spec,
            antenna_count,
            assignment,
        })
    }

    /// Default assignment: antenna `t + 1` cancels the `t`-th nonzero
    /// nonlinear term, so `antenna_count - 1` antennas cancel the leading
    /// `antenna_count - 1` terms (arctan: orders 3, 5, 7, ...).
    pub fn contiguous(spec: FunctionSpec, antenna_count: usize) -> Result<Self, MimoError> {
        let orders: Vec<u32> = spec
            .nonzero_orders()
            .take(antenna_count.saturating_sub(1))
            .collect();
        let assignment = orders.into_iter().map(|n| alloc::vec![n]).collect();
        Self::new(spec, antenna_count, assignment)
    }

    pub fn spec(&self) -> &FunctionSpec {
        &self.spec
    }

    pub fn antenna_count(&self) -> usize {
        self.antenna_count
    }

    pub fn assignment(&self) -> &[Vec<u32>] {
        &self.assignment
    }

    /// All canceled orders, ascending.
    pub fn canceled_orders(&self) -> Vec<u32> {
        let mut orders: Vec<u32> = self.assignment.iter().flatten().copied().collect();
        orders.sort_unstable();
        orders
    }

    /// True when the canceled orders are exactly the leading nonzero
    /// nonlinear terms with no gaps.
    pub fn is_contiguous(&self) -> bool {
        let canceled = self.canceled_orders();
        self.spec
            .nonzero_orders()
            .take(canceled.len())
            .eq(canceled.iter().copied())
    }
}

/// Antenna signals for one secure symbol: `x_1 = f(s)`, the rest transmit
/// their assigned series terms negated.
pub fn taylor_encode(s: Complex64, plan: &TaylorPlan) -> Result<Vec<Complex64>, MimoError> {
    let s0 = plan.spec.expansion_point();
    let offset = s - s0;
    let radius = plan.spec.convergence_radius();
    if offset.norm() > radius + 1e-9 {
        return Err(MimoError::Divergence {
            magnitude: offset.norm(),
            radius,
        });
    }
    let mut x = Vec::with_capacity(plan.antenna_count);
    x.push(plan.spec.eval(s));
    for set in &plan.assignment {
        let mut signal = Complex64::ZERO;
        for &n in set {
            signal -= plan.spec.series_coefficient(n) * offset.powu(n);
        }
        x.push(signal);
    }
    Ok(x)
}

/// Recovers the secure symbol from the beamformed sum:
/// `s_hat = (y - f(s0) + lambda_1 * s0) / lambda_1`.
pub fn bob_combine(y: Complex64, plan: &TaylorPlan) -> Result<Complex64, MimoError> {
    let lambda1 = plan.spec.linear_coefficient();
    if lambda1 == 0.0 {
        return Err(MimoError::DegenerateFunction);
    }
    let s0 = plan.spec.expansion_point();
    Ok((y - plan.spec.eval(s0) + lambda1 * s0) / lambda1)
}

/// Upper bound on `|s_hat - s|` from the uncanceled series tail.
///
/// For a contiguous arctan plan canceling through order `2K+1` this is the
/// first omitted term `|s|^(2K+3) / (2K+3)`; gaps in the assignment add the
/// skipped term magnitudes below the tail.
pub fn truncation_residual_bound(plan: &TaylorPlan, s: Complex64) -> f64 {
    let offset = (s - plan.spec.expansion_point()).norm();
    let canceled = plan.canceled_orders();
    let tail_order = canceled.last().map_or(3, |&n| n + 2);
    let mut bound = 0.0;
    let mut n = 3;
    while n < tail_order {
        if plan.spec.series_coefficient(n) != 0.0 && !canceled.contains(&n) {
            bound += offset.powi(n as i32) / n as f64;
        }
        n += 2;
    }
    bound + offset.powi(tail_order as i32) / tail_order as f64
}

/// Exact-sum decompositions of every source symbol over per-antenna
/// component sets.
#[derive(Debug, Clone, PartialEq)]
pub struct CpdTable {
    source: Constellation,
    component_sets: Vec<Vec<Complex64>>,
    decompositions: Vec<Vec<Vec<Complex64>>>,
}

impl CpdTable {
    pub fn source(&self) -> &Constellation {
        &self.source
    }

    pub fn component_sets(&self) -> &[Vec<Complex64>] {
        &self.component_sets
    }

    pub fn antenna_count(&self) -> usize {
        self.component_sets.len()
    }

    /// All exact decompositions of a source symbol.
    pub fn decompositions(&self, source_index: usize) -> &[Vec<Complex64>] {
        &self.decompositions[source_index]
    }

    /// Text dump: one line per source symbol listing every tuple.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for (i, tuples) in self.decompositions.iter().enumerate() {
            let p = self.source.point(i);
            out += &format!("{i}\t{:.6}{:+.6}j\t", p.re, p.im);
            for (k, tuple) in tuples.iter().enumerate() {
                if k > 0 {
                    out += " | ";
                }
                for x in tuple {
                    out += &format!("({:.6}{:+.6}j)", x.re, x.im);
                }
            }
            out += "\n";
        }
        out
    }
}

/// Exhaustively searches the product of the component sets for tuples summing
/// to each source symbol (within 1e-9); errs if any symbol stays uncovered.
pub fn cpd_build(
    source: &Constellation,
    component_sets: &[Vec<Complex64>],
) -> Result<CpdTable, MimoError> {
    if component_sets.is_empty() {
        return Err(MimoError::InvalidComponentSets("need at least one set"));
    }
    for set in component_sets {
        if set.is_empty() {
            return Err(MimoError::InvalidComponentSets("empty component set"));
        }
        if set.len() >= source.order() {
            return Err(MimoError::InvalidComponentSets(
                "component order must stay below the source order",
            ));
        }
    }
    let mut decompositions: Vec<Vec<Vec<Complex64>>> = alloc::vec![Vec::new(); source.order()];
    let mut tuple: Vec<Complex64> = Vec::with_capacity(component_sets.len());
    fn recurse(
        sets: &[Vec<Complex64>],
        tuple: &mut Vec<Complex64>,
        partial: Complex64,
        source: &Constellation,
        out: &mut [Vec<Vec<Complex64>>],
    ) {
        if sets.is_empty() {
            for (i, p) in source.points().iter().enumerate() {
                if (partial - p).norm() < SUM_TOLERANCE {
                    out[i].push(tuple.clone());
                }
            }
            return;
        }
        for &x in &sets[0] {
            tuple.push(x);
            recurse(&sets[1..], tuple, partial + x, source, out);
            tuple.pop();
        }
    }
    recurse(
        component_sets,
        &mut tuple,
        Complex64::ZERO,
        source,
        &mut decompositions,
    );
    let missing: Vec<usize> = decompositions
        .iter()
        .enumerate()
        .filter(|(_, t)| t.is_empty())
        .map(|(i, _)| i)
        .collect();
    if !missing.is_empty() {
        return Err(MimoError::Coverage { missing });
    }
    Ok(CpdTable {
        source: source.clone(),
        component_sets: component_sets.to_vec(),
        decompositions,
    })
}

/// Picks one decomposition uniformly at random among the valid tuples.
pub fn cpd_encode(
    source_index: usize,
    table: &CpdTable,
    rng: &mut RngStream,
) -> Result<Vec<Complex64>, MimoError> {
    let tuples = table
        .decompositions
        .get(source_index)
        .ok_or(MimoError::MissingSymbol {
            index: source_index,
        })?;
    let pick = rng.random_range(0..tuples.len());
    Ok(tuples[pick].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{build_psk, build_qam, normalize_amplitude, BitLabel};
    use alloc::vec;

    #[test]
    fn beamformer_inverts_channel() {
        let bf = beamformer_design(&[Complex64::ONE; 3]).unwrap();
        assert!(bf.weights().iter().all(|w| (w - Complex64::ONE).norm() < 1e-15));

        let bf = beamformer_design(&[Complex64::new(0.0, 2.0)]).unwrap();
        assert!((bf.weights()[0] - Complex64::new(0.0, -0.5)).norm() < 1e-15);

        assert!(matches!(
            beamformer_design(&[Complex64::ONE, Complex64::ZERO]),
            Err(MimoError::SingularChannel { antenna: 1 })
        ));
    }

    #[test]
    fn beamformed_reception_is_the_plain_sum() {
        let mut rng = crate::channel::RngStream::new(4, 0);
        let h: Vec<Complex64> = (0..4).map(|_| rng.complex_normal(1.0)).collect();
        let bf = beamformer_design(&h).unwrap();
        let x: Vec<Complex64> = (0..4).map(|_| rng.complex_normal(1.0)).collect();
        let received: Complex64 = h
            .iter()
            .zip(bf.weights())
            .zip(&x)
            .map(|((hv, wv), xv)| hv * wv * xv)
            .sum();
        let plain: Complex64 = x.iter().sum();
        assert!((received - plain).norm() < 1e-12);
        for (hv, wv) in h.iter().zip(bf.weights()) {
            assert!((hv * wv - Complex64::ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn arctan_coefficients() {
        let f = FunctionSpec::arctan();
        assert_eq!(f.linear_coefficient(), 1.0);
        assert_eq!(f.series_coefficient(2), 0.0);
        assert!((f.series_coefficient(3) + 1.0 / 3.0).abs() < 1e-15);
        assert!((f.series_coefficient(5) - 1.0 / 5.0).abs() < 1e-15);
        let orders: Vec<u32> = f.nonzero_orders().take(3).collect();
        assert_eq!(orders, vec![3, 5, 7]);
    }

    #[test]
    fn taylor_encode_example_values() {
        let plan = TaylorPlan::contiguous(FunctionSpec::arctan(), 2).unwrap();
        let x = taylor_encode(Complex64::new(0.5, 0.0), &plan).unwrap();
        assert!((x[0].re - 0.4636476090008061).abs() < 1e-15);
        assert!((x[1].re - 0.041666666666666664).abs() < 1e-15);

        let plan3 = TaylorPlan::contiguous(FunctionSpec::arctan(), 3).unwrap();
        let x = taylor_encode(Complex64::new(0.5, 0.0), &plan3).unwrap();
        let sum: Complex64 = x.iter().sum();
        assert!((sum.re - 0.4990642756674728).abs() < 1e-15);

        let zeros = taylor_encode(Complex64::ZERO, &plan3).unwrap();
        assert!(zeros.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn taylor_rejects_divergent_symbols() {
        let plan = TaylorPlan::contiguous(FunctionSpec::arctan(), 2).unwrap();
        assert!(matches!(
            taylor_encode(Complex64::new(1.5, 0.0), &plan),
            Err(MimoError::Divergence { .. })
        ));
        // on the unit circle is fine
        assert!(taylor_encode(Complex64::new(0.0, 1.0) * 0.9999, &plan).is_ok());
    }

    #[test]
    fn plan_validation() {
        let f = FunctionSpec::arctan();
        assert!(TaylorPlan::new(f, 3, vec![vec![3], vec![3]]).is_err()); // overlap
        assert!(TaylorPlan::new(f, 2, vec![vec![2]]).is_err()); // zero coefficient
        assert!(TaylorPlan::new(f, 2, vec![]).is_err()); // wrong arity
        let custom = TaylorPlan::new(f, 3, vec![vec![3, 7], vec![5]]).unwrap();
        assert_eq!(custom.canceled_orders(), vec![3, 5, 7]);
        assert!(custom.is_contiguous());
        let gappy = TaylorPlan::new(f, 2, vec![vec![5]]).unwrap();
        assert!(!gappy.is_contiguous());
    }

    #[test]
    fn bob_combine_recovers_truncated_symbol() {
        let plan = TaylorPlan::contiguous(FunctionSpec::arctan(), 3).unwrap();
        let s = Complex64::new(0.5, 0.0);
        let x = taylor_encode(s, &plan).unwrap();
        let shat = bob_combine(x.iter().sum(), &plan).unwrap();
        assert!((shat.re - 0.4990642756674728).abs() < 1e-15);
        assert!((shat - s).norm() <= 0.0011160714285714285);
        // fixed point at the expansion center
        let y0 = plan.spec().eval(plan.spec().expansion_point());
        let s0 = bob_combine(y0, &plan).unwrap();
        assert!((s0 - plan.spec().expansion_point()).norm() < 1e-15);
    }

    #[test]
    fn residual_bound_formula() {
        let f = FunctionSpec::arctan();
        let plan7 = TaylorPlan::contiguous(f, 7).unwrap(); // K = 6, through order 13
        let b = truncation_residual_bound(&plan7, Complex64::ONE);
        assert!((b - 1.0 / 15.0).abs() < 1e-15);
        let plan2 = TaylorPlan::contiguous(f, 2).unwrap(); // K = 1
        let b = truncation_residual_bound(&plan2, Complex64::new(0.5, 0.0));
        assert!((b - 0.00625).abs() < 1e-15);
        assert_eq!(truncation_residual_bound(&plan2, Complex64::ZERO), 0.0);
        // a gap adds the skipped term to the bound
        let gappy = TaylorPlan::new(f, 2, vec![vec![5]]).unwrap();
        let b = truncation_residual_bound(&gappy, Complex64::new(0.5, 0.0));
        let expect = 0.5f64.powi(3) / 3.0 + 0.5f64.powi(7) / 7.0;
        assert!((b - expect).abs() < 1e-15);
    }

    #[test]
    fn residual_meets_bound_on_the_real_axis() {
        // the alternating-series estimate is a theorem for real arguments
        let f = FunctionSpec::arctan();
        for k in 1..=6usize {
            let plan = TaylorPlan::contiguous(f, k + 1).unwrap();
            for step in 0..=10 {
                let s = Complex64::new(step as f64 / 10.0, 0.0);
                let x = taylor_encode(s, &plan).unwrap();
                let shat = bob_combine(x.iter().sum(), &plan).unwrap();
                assert!((shat - s).norm() <= truncation_residual_bound(&plan, s) + 1e-15);
            }
        }
    }

    #[test]
    fn residual_monotone_in_cancelled_terms_for_qam() {
        let f = FunctionSpec::arctan();
        let qam = normalize_amplitude(&build_qam(16).unwrap(), 1.0).unwrap();
        for &s in qam.points() {
            let mut last = f64::INFINITY;
            for k in 1..=6usize {
                let plan = TaylorPlan::contiguous(f, k + 1).unwrap();
                let x = taylor_encode(s, &plan).unwrap();
                let r = (bob_combine(x.iter().sum(), &plan).unwrap() - s).norm();
                assert!(r <= last + 1e-15, "residual must not grow with K");
                last = r;
            }
        }
    }

    #[test]
    fn taylor_per_antenna_alphabet_stays_small() {
        let f = FunctionSpec::arctan();
        let qam = normalize_amplitude(&build_qam(16).unwrap(), 1.0).unwrap();
        let t_a = 4;
        let plan = TaylorPlan::contiguous(f, t_a).unwrap();
        for antenna in 0..t_a {
            let mut distinct: Vec<(i64, i64)> = qam
                .points()
                .iter()
                .map(|&s| {
                    let x = taylor_encode(s, &plan).unwrap()[antenna];
                    (libm::round(x.re * 1e9) as i64, libm::round(x.im * 1e9) as i64)
                })
                .collect();
            distinct.sort_unstable();
            distinct.dedup();
            assert!(distinct.len() <= qam.order() * t_a);
        }
    }

    fn raw_qam16() -> Constellation {
        let mut pts = Vec::new();
        for i in [-3.0, -1.0, 1.0, 3.0] {
            for q in [-3.0, -1.0, 1.0, 3.0] {
                pts.push(Complex64::new(i, q));
            }
        }
        let labels = (0..16).map(|k| BitLabel::new(k, 4)).collect();
        Constellation::from_parts("16QAM-raw".into(), pts, labels).unwrap()
    }

    fn fig_a_sets() -> Vec<Vec<Complex64>> {
        let b1 = vec![
            Complex64::new(1.0, 1.0),
            Complex64::new(1.0, -1.0),
            Complex64::new(-1.0, 1.0),
            Complex64::new(-1.0, -1.0),
        ];
        let shifts = vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(-2.0, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(0.0, -2.0),
        ];
        vec![b1, shifts.clone(), shifts]
    }

    #[test]
    fn cpd_covers_raw_16qam() {
        let a = raw_qam16();
        let table = cpd_build(&a, &fig_a_sets()).unwrap();
        for i in 0..16 {

            let tuples = table.decompositions(i);
            assert!(!tuples.is_empty());
            for tuple in tuples {
                let sum: Complex64 = tuple.iter().sum();
                assert!((sum - a.point(i)).norm() < 1e-12);
            }
        }
        // the worked decompositions
        let find = |target: Complex64, parts: [Complex64; 3]| {
            let idx = a.nearest(target);
            table
                .decompositions(idx)
                .iter()
                .any(|t| t.iter().zip(&parts).all(|(x, p)| (x - p).norm() < 1e-12))
        };
        assert!(find(
            Complex64::new(3.0, 1.0),
            [
                Complex64::new(1.0, -1.0),
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, 2.0)
            ]
        ));
        assert!(find(
            Complex64::new(1.0, 1.0),
            [
                Complex64::new(1.0, 1.0),
                Complex64::new(2.0, 0.0),
                Complex64::new(-2.0, 0.0)
            ]
        ));
    }

    #[test]
    fn cpd_encode_sums_exactly() {
        let a = raw_qam16();
        let table = cpd_build(&a, &fig_a_sets()).unwrap();
        let mut rng = crate::channel::RngStream::new(9, 2);
        for i in 0..16 {
            for _ in 0..8 {
                let x = cpd_encode(i, &table, &mut rng).unwrap();
                let sum: Complex64 = x.iter().sum();
                assert!((sum - a.point(i)).norm() < 1e-12);
            }
        }
        assert!(matches!(
            cpd_encode(16, &table, &mut rng),
            Err(MimoError::MissingSymbol { index: 16 })
        ));
    }

    #[test]
    fn figure_psk_identity_and_coverage_gap() {
        // the published two-antenna 8PSK sets satisfy the quoted identity ...
        let r = (2.0 - core::f64::consts::SQRT_2).sqrt();
        let e = |phase: f64| Complex64::from_polar(1.0, phase);
        let lhs = e(5.0 * core::f64::consts::PI / 8.0);
        let rhs = e(3.0 * core::f64::consts::PI / 8.0) + Complex64::new(-r, 0.0);
        assert!((lhs - rhs).norm() < 1e-12);

        // ... but cover only half the alphabet: the B1 points themselves would
        // need a zero shift, which the always-on second antenna cannot send
        let psk = build_psk(8, core::f64::consts::PI / 8.0).unwrap();
        let b1 = vec![
            e(3.0 * core::f64::consts::PI / 8.0),
            e(7.0 * core::f64::consts::PI / 8.0),
            e(-core::f64::consts::PI / 8.0),
            e(-5.0 * core::f64::consts::PI / 8.0),
        ];
        let b2 = vec![
            Complex64::new(r, 0.0),
            Complex64::new(-r, 0.0),
            Complex64::new(0.0, r),
            Complex64::new(0.0, -r),
        ];
        match cpd_build(&psk, &[b1, b2]) {
            Err(MimoError::Coverage { missing }) => assert_eq!(missing, vec![1, 3, 5, 7]),
            other => panic!("expected a coverage error, got {other:?}"),
        }
    }

    #[test]
    fn quadrature_pair_covers_all_of_8psk() {
        // two scaled 4-point sets whose orthogonal sums land on every 8PSK
        // point: cos(pi/8)*{1,j,-1,-j} + sin(pi/8)*{1,j,-1,-j}
        let psk = build_psk(8, core::f64::consts::PI / 8.0).unwrap();
        let axes = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        let c = (core::f64::consts::PI / 8.0).cos();
        let s = (core::f64::consts::PI / 8.0).sin();
        let b1: Vec<Complex64> = axes.iter().map(|&a| a * c).collect();
        let b2: Vec<Complex64> = axes.iter().map(|&a| a * s).collect();
        let table = cpd_build(&psk, &[b1, b2]).unwrap();
        for i in 0..8 {
            assert_eq!(table.decompositions(i).len(), 1);
            let sum: Complex64 = table.decompositions(i)[0].iter().sum();
            assert!((sum - psk.point(i)).norm() < 1e-12);
        }
    }

    #[test]
    fn cpd_rejects_oversized_component_sets() {
        let a = raw_qam16();
        let too_big = vec![a.points().to_vec()];
        assert!(matches!(
            cpd_build(&a, &too_big),
            Err(MimoError::InvalidComponentSets(_))
        ));
    }

    #[test]
    fn cpd_table_dump_lists_every_symbol() {
        let a = raw_qam16();
        let table = cpd_build(&a, &fig_a_sets()).unwrap();
        let dump = table.to_table();
        assert_eq!(dump.lines().count(), 16);
        assert!(dump.contains('|') || !dump.is_empty());
    }
}
