use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssggm::conditional::{enumerate_probabilities, log_model_weight, sample_column, ColumnContext, ModelCache};
use ssggm::state::ColumnModel;
use ssggm::Hyperparams;

/// Composite Simpson weights on `k` (odd) equally spaced points over `[a, b]`.
fn simpson(a: f64, b: f64, k: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / (k - 1) as f64;
    (0..k)
        .map(|i| {
            let w = if i == 0 || i == k - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            (a + i as f64 * h, w * h / 3.0)
        })
        .collect()
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Log of the unnormalized posterior mass of `ω12 ≠ 0` against `ω12 = 0`
/// for column 2 of a bivariate model with `Ω_11 = a` held fixed, from a
/// direct 2-d quadrature over `(ω12, ω22)` on the positive-definite region.
fn quadrature_log_odds(a: f64, s12: f64, s22: f64, n: usize, hyper: &Hyperparams) -> f64 {
    let c = s22 + hyper.lambda;
    let nh = n as f64 / 2.0;
    // u2 = ω22 - ω12²/a ranges over the Gamma(n/2 + 1, c/2) bulk
    let shape = nh + 1.0;
    let u_hi = (shape + 40.0 * shape.sqrt() + 40.0) * 2.0 / c;
    let us = simpson(0.0, u_hi, 4001);
    let prec = c / a + hyper.g1.powi(-2);
    let centre = -s12 / prec;
    let half = 14.0 / prec.sqrt();
    let ws = simpson(centre - half, centre + half, 4001);
    let log_lik = |w: f64, u: f64| {
        let omega22 = u + w * w / a;
        nh * (a * u).ln() - s12 * w - 0.5 * (s22 + hyper.lambda) * omega22
    };
    let slab = |w: f64| -0.5 * (w / hyper.g1).powi(2) - (hyper.g1 * (2.0 * std::f64::consts::PI).sqrt()).ln();
    let mut on = Vec::new();
    for &(w, qw) in &ws {
        for &(u, qu) in us.iter().skip(1) {
            on.push(log_lik(w, u) + slab(w) + (qw * qu).ln());
        }
    }
    let off: Vec<f64> = us.iter().skip(1).map(|&(u, qu)| log_lik(0.0, u) + qu.ln()).collect();
    (hyper.theta / (1.0 - hyper.theta)).ln() + log_sum_exp(&on) - log_sum_exp(&off)
}

#[test]
fn bivariate_weight_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..12 {
        let n = rng.random_range(2..7);
        let y = DMatrix::from_fn(n, 2, |_, _| rng.random_range(-1.5..1.5));
        let s = y.transpose() * &y;
        let a = rng.random_range(0.3..3.0);
        let hyper = Hyperparams::new(
            rng.random_range(0.1..0.9),
            rng.random_range(0.3..3.0),
            rng.random_range(0.05..2.0),
        );
        let ctx = ColumnContext::new(
            1,
            DMatrix::from_element(1, 1, 1.0 / a),
            vec![s[(0, 1)]],
            s[(1, 1)],
            n,
            &hyper,
        )
        .unwrap();
        let mut cache = ModelCache::new();
        let on = log_model_weight(&ctx, &ColumnModel::from_mask(1, 1), &mut cache, None).unwrap();
        let off = log_model_weight(&ctx, &ColumnModel::from_mask(1, 0), &mut cache, None).unwrap();
        let want = quadrature_log_odds(a, s[(0, 1)], s[(1, 1)], n, &hyper);
        assert!(
            (on - off - want).abs() < 1e-7,
            "n={n}: closed form {} vs quadrature {want}",
            on - off
        );
    }
}

fn context(p: usize, n: usize, seed: u64) -> (ColumnContext<'static>, Hyperparams) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = p - 1;
    let b = DMatrix::from_fn(m, m, |_, _| rng.random_range(-0.5..0.5));
    let ainv = &b * b.transpose() + DMatrix::identity(m, m);
    let y = DMatrix::from_fn(n, p, |_, _| rng.random_range(-1.0..1.0));
    let s = y.transpose() * &y;
    let hyper = Hyperparams::new(0.3, 1.2, 0.4);
    let s_col = (0..m).map(|r| s[(r, m)]).collect();
    (ColumnContext::new(m, ainv, s_col, s[(m, m)], n, &hyper).unwrap(), hyper)
}

#[test]
fn enumerated_probabilities_are_a_distribution() {
    for p in 2..8 {
        let (ctx, _) = context(p, 12, p as u64);
        let probs = enumerate_probabilities(&ctx).unwrap();
        assert_eq!(probs.len(), 1 << (p - 1));
        assert!(probs.iter().all(|&q| (0.0..=1.0).contains(&q)));
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn hinted_and_fresh_weights_agree() {
    let (ctx, _) = context(7, 15, 3);
    let mut fresh = ModelCache::new();
    let mut hinted = ModelCache::new();
    let mut prev = ColumnModel::from_mask(6, 0);
    for mask in [1u64, 3, 7, 6, 22, 54, 63, 62, 30, 2] {
        let z = ColumnModel::from_mask(6, mask);
        let a = log_model_weight(&ctx, &z, &mut fresh, None).unwrap();
        fresh.clear();
        let b = log_model_weight(&ctx, &z, &mut hinted, Some(&prev)).unwrap();
        assert!((a - b).abs() < 1e-10, "mask {mask}: {a} vs {b}");
        prev = z;
    }
}

#[test]
fn column_draw_moments() {
    let (ctx, hyper) = context(4, 10, 5);
    let z = ColumnModel::from_mask(3, 0b101);
    let ainv = ctx.ainv_dense();
    let u = ctx.u_matrix(&z);
    let b: Vec<f64> = z.iter().map(|r| ctx.s_col()[r]).collect();
    let mean_u1 = u.clone().cholesky().unwrap().solve(&nalgebra::DVector::from_vec(b));
    let c = ctx.s_jj() + hyper.lambda;
    let mean_u2 = (ctx.n() as f64 / 2.0 + 1.0) * 2.0 / c;

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut cache = ModelCache::new();
    let draws = 40_000;
    let (mut s1, mut s2) = (vec![0.0; 2], 0.0);
    for _ in 0..draws {
        let d = sample_column(&ctx, &z, &mut cache, &mut rng).unwrap();
        assert_eq!(d.indices, vec![0, 2]);
        // assembled column is consistent with (u1, u2)
        let quad: f64 = (0..2)
            .flat_map(|a| (0..2).map(move |b| (a, b)))
            .map(|(a, bb)| d.u1[a] * ainv[(d.indices[a], d.indices[bb])] * d.u1[bb])
            .sum();
        assert!((d.omega_diag - d.u2 - quad).abs() < 1e-12);
        for (k, &(_, v)) in d.omega_col.iter().enumerate() {
            assert_eq!(v, -d.u1[k]);
        }
        s1[0] += d.u1[0];
        s1[1] += d.u1[1];
        s2 += d.u2;
    }
    let n = draws as f64;
    let sd_u1 = u.try_inverse().unwrap().diagonal().map(f64::sqrt);
    for k in 0..2 {
        assert!((s1[k] / n - mean_u1[k]).abs() < 5.0 * sd_u1[k] / n.sqrt());
    }
    let sd_u2 = (ctx.n() as f64 / 2.0 + 1.0).sqrt() * 2.0 / c;
    assert!((s2 / n - mean_u2).abs() < 5.0 * sd_u2 / n.sqrt());
}
