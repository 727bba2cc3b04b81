use proptest::prelude::*;
use ssggm::rng::stream_rng;
use ssggm::synth::{gen_data, gen_graph, gen_precision, generate_truth, pattern};
use ssggm::Scenario;

fn scenarios() -> impl Strategy<Value = (Scenario, usize)> {
    prop_oneof![
        (2usize..25).prop_map(|p| (Scenario::Tridiagonal, p)),
        (1usize..6).prop_map(|k| (Scenario::Block { b: 4 }, 4 * k)),
        (2usize..25, 0.01..0.2f64).prop_map(|(p, q)| (Scenario::Random { q }, p)),
        (4usize..25).prop_map(|p| (Scenario::IllConditioned, p)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truth_is_positive_definite_with_the_drawn_pattern((sc, p) in scenarios(), seed in any::<u64>()) {
        let truth = generate_truth(&sc, p, &mut stream_rng(seed, 0)).unwrap();
        let o = &truth.omega0;
        prop_assert_eq!(o, &o.transpose());
        prop_assert!(o.clone().cholesky().is_some());
        prop_assert!(truth.min_eigenvalue > 0.0);
        prop_assert_eq!(&pattern(o), &truth.z0);
        let degree = (0..p).map(|j| (0..p).filter(|&i| truth.z0[(i, j)] == 1).count()).max().unwrap();
        prop_assert_eq!(degree, truth.max_degree);
    }

    #[test]
    fn generated_precision_has_bounded_partial_correlations(p in 2usize..20, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let z = gen_graph(&Scenario::Tridiagonal, p, &mut rng).unwrap();
        let o = gen_precision(&z, &mut rng).unwrap();
        for i in 0..p {
            for j in i + 1..p {
                let rho = o[(i, j)] / (o[(i, i)] * o[(j, j)]).sqrt();
                if z[(i, j)] == 1 {
                    let tenths = (rho.abs() * 10.0).round();
                    prop_assert!((1.0..=5.0).contains(&tenths));
                    prop_assert!((rho.abs() * 10.0 - tenths).abs() < 1e-9);
                } else {
                    prop_assert_eq!(rho, 0.0);
                }
            }
        }
    }
}

#[test]
fn fixed_graphs_have_the_expected_edges() {
    let mut rng = stream_rng(0, 0);
    let tri = gen_graph(&Scenario::Tridiagonal, 7, &mut rng).unwrap();
    assert_eq!(tri.iter().map(|&v| v as usize).sum::<usize>(), 2 * 6);
    let block = gen_graph(&Scenario::Block { b: 3 }, 9, &mut rng).unwrap();
    assert_eq!(block.iter().map(|&v| v as usize).sum::<usize>(), 3 * 6);
    assert!(gen_graph(&Scenario::Block { b: 4 }, 10, &mut rng).is_err());
}

#[test]
fn random_graph_density_follows_q() {
    let (p, q) = (40, 0.15);
    let mut rng = stream_rng(3, 0);
    let pairs = (p * (p - 1) / 2) as f64;
    let mut total = 0.0;
    let reps = 30;
    for _ in 0..reps {
        let z = gen_graph(&Scenario::Random { q }, p, &mut rng).unwrap();
        total += z.iter().map(|&v| v as f64).sum::<f64>() / 2.0 / pairs;
    }
    let sd = (q * (1.0 - q) / pairs / reps as f64).sqrt();
    assert!((total / reps as f64 - q).abs() < 5.0 * sd);
}

#[test]
fn sample_covariance_approaches_the_truth() {
    let mut rng = stream_rng(8, 0);
    let truth = generate_truth(&Scenario::Tridiagonal, 5, &mut rng).unwrap();
    let n = 200_000;
    let data = gen_data(&truth.omega0, n, &mut rng).unwrap();
    let sigma = truth.omega0.clone().try_inverse().unwrap();
    let emp = data.gram() / n as f64;
    for i in 0..5 {
        for j in 0..5 {
            let tol = 5.0 * ((sigma[(i, i)] * sigma[(j, j)] + sigma[(i, j)].powi(2)) / n as f64).sqrt();
            assert!((emp[(i, j)] - sigma[(i, j)]).abs() < tol, "entry ({i},{j})");
        }
    }
}

#[test]
fn same_seed_same_data() {
    let run = |seed| {
        let mut rng = stream_rng(seed, 0);
        let t = generate_truth(&Scenario::Random { q: 0.2 }, 12, &mut rng).unwrap();
        (t.omega0.clone(), gen_data(&t.omega0, 30, &mut rng).unwrap().y().clone())
    };
    assert_eq!(run(5), run(5));
    assert_ne!(run(5).1, run(6).1);
}
