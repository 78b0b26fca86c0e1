//! Independent check of the mapping-probability optimizer: a projected
//! gradient solver must agree with the closed-form Gibbs/bisection path.
//!
//! The projection onto {simplex rows} ∩ {cost·p <= eta} is computed exactly by
//! bisecting the budget multiplier over row-simplex projections.

use moc_core::constellation::{build_psk, build_qam};
use moc_core::srm::{
    ber_union_bound, kl_divergence, optimize_probabilities, partition_rotational,
    MappingProbabilities, SrmPlan,
};

/// Euclidean projection onto the probability simplex (Duchi et al.).
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i as f64 + 1.0);
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

fn bound_of(costs: &[Vec<f64>], p: &[Vec<f64>]) -> f64 {
    costs
        .iter()
        .zip(p)
        .map(|(c, row)| c.iter().zip(row).map(|(ci, pi)| ci * pi).sum::<f64>())
        .sum()
}

/// Exact projection onto {rows on the simplex} ∩ {cost·p <= eta}.
///
/// KKT of the projection problem: p = proj_rows(z - nu * cost) for some
/// multiplier nu >= 0 with complementary slackness; the budget value is
/// nonincreasing in nu, so a bisection finds it.
fn project_feasible(costs: &[Vec<f64>], eta: f64, z: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let rows_at = |nu: f64| -> Vec<Vec<f64>> {
        z.iter()
            .zip(costs)
            .map(|(row, c)| {
                let shifted: Vec<f64> =
                    row.iter().zip(c).map(|(zi, ci)| zi - nu * ci).collect();
                project_simplex(&shifted)
            })
            .collect()
    };
    let at_zero = rows_at(0.0);
    if bound_of(costs, &at_zero) <= eta {
        return at_zero;
    }
    let mut hi = 1.0;
    while bound_of(costs, &rows_at(hi)) > eta {
        hi *= 2.0;
        assert!(hi < 1e18, "projection multiplier diverged");
    }
    let mut lo = 0.0;
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if bound_of(costs, &rows_at(mid)) > eta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    rows_at(hi)
}

fn objective(p: &[Vec<f64>]) -> f64 {
    let k = p[0].len() as f64;
    let mean_entropy = p
        .iter()
        .map(|row| {
            row.iter()
                .map(|&x| if x > 0.0 { -x * x.log2() } else { 0.0 })
                .sum::<f64>()
        })
        .sum::<f64>()
        / p.len() as f64;
    k.log2() - mean_entropy
}

/// Projected-gradient minimizer of the confusion objective under the budget.
fn projected_gradient(costs: &[Vec<f64>], eta: f64) -> Vec<Vec<f64>> {
    let m = costs.len() as f64;
    let ln2 = core::f64::consts::LN_2;
    let uniform: Vec<Vec<f64>> = costs
        .iter()
        .map(|r| vec![1.0 / r.len() as f64; r.len()])
        .collect();
    let mut p = project_feasible(costs, eta, &uniform);
    for k in 0..12_000 {
        let step = 0.25 / (1.0 + k as f64 / 500.0);
        let stepped: Vec<Vec<f64>> = p
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&x| x - step * (x.max(1e-15).ln() + 1.0) / (m * ln2))
                    .collect()
            })
            .collect();
        p = project_feasible(costs, eta, &stepped);
    }
    p
}

#[test]
fn gibbs_solver_matches_projected_gradient() {
    let source = build_psk(4, core::f64::consts::FRAC_PI_4).unwrap();
    let base = build_qam(16).unwrap();
    let partition = partition_rotational(&source, &base).unwrap();
    let sigma = 0.1f64.sqrt(); // 10 dB on unit-power alphabets
    let plan = SrmPlan::new(
        source,
        partition,
        MappingProbabilities::uniform(4, 4),
        sigma,
    )
    .unwrap();
    let costs = plan.cost_table().to_vec();

    let theta_min: f64 = costs
        .iter()
        .map(|r| r.iter().copied().fold(f64::INFINITY, f64::min))
        .sum();
    let theta_uniform = ber_union_bound(&plan, sigma);

    let mut last_kl = f64::INFINITY;
    for step in 0..10 {
        let eta = theta_min + (theta_uniform - theta_min) * step as f64 / 9.0;
        let opt = optimize_probabilities(&plan, eta, sigma).unwrap();
        let kl = kl_divergence(&opt.probs);

        // budget met within 1e-8 (exactly active unless uniform is feasible)
        assert!(opt.bound <= eta + 1e-8, "eta {eta}: bound {}", opt.bound);
        assert!(kl <= last_kl + 1e-9, "KL(eta) must be nonincreasing");
        last_kl = kl;

        // independent projected-gradient run
        let pg = projected_gradient(&costs, eta);
        assert!(bound_of(&costs, &pg) <= eta + 1e-8, "PG iterate stays feasible");
        let pg_kl = objective(&pg);
        assert!(
            (kl - pg_kl).abs() < 1e-5,
            "eta {eta}: gibbs {kl} vs pg {pg_kl}"
        );
    }
}
