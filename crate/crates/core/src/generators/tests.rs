use super::*;
use crate::generators::growth::gen_spatial_sf_with_positions;
use crate::generators::ucm::{truncated_power_law_mean, ucm_cutoff};

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn mean_degrees<F: Fn(u64) -> Graph>(draws: u64, f: F) -> Vec<f64> {
    (0..draws).map(|s| f(s).degree_moments().mu1).collect()
}

fn expected_balanced_sbm_mean_degree(p: SbmParams) -> f64 {
    let mut sizes = vec![0usize; p.m];
    for i in 0..p.n {
        sizes[i % p.m] += 1;
    }
    let intra: usize = sizes.iter().map(|s| s * (s - 1) / 2).sum();
    let inter = p.n * (p.n - 1) / 2 - intra;
    2.0 * (p.p * intra as f64 + p.q * inter as f64) / p.n as f64
}

#[test]
fn sbm_deterministic_limit_is_disjoint_cliques() {
    let g = gen_sbm(SbmParams::new(60, 3, 1.0, 0.0).unwrap(), 3).unwrap();
    assert_eq!(g.component_sizes(), vec![20, 20, 20]);
    assert_eq!(g.edge_count(), 3 * 190);
}

#[test]
fn sbm_mean_degree_matches_balanced_expectation() {
    let params = SbmParams::new(100, 3, 0.7, 0.1).unwrap();
    let xs = mean_degrees(100, |s| gen_sbm(params, s).unwrap());
    let (mean, se) = mean_se(&xs);
    let expected = expected_balanced_sbm_mean_degree(params);
    assert!(
        (mean - expected).abs() < 3.0 * se,
        "{mean} vs {expected} (se {se})"
    );
    // Balanced groups put fewer same-group partners next to each node than the
    // (N-1)/m of the group-average value p(N-1)/m + q(N-1)(1-1/m) = 29.7.
    assert!((expected - 29.304).abs() < 1e-9);
}

#[test]
fn sbm_single_group_matches_er_in_distribution() {
    let draws = 200;
    let a: Vec<f64> = (0..draws)
        .map(|s| {
            gen_sbm(SbmParams::new(100, 1, 0.3, 0.3).unwrap(), s)
                .unwrap()
                .edge_count() as f64
        })
        .collect();
    let b: Vec<f64> = (0..draws)
        .map(|s| gen_er(100, 0.3, 10_000 + s).unwrap().edge_count() as f64)
        .collect();
    let c: Vec<f64> = (0..draws)
        .map(|s| {
            gen_sbm(SbmParams::new(100, 4, 0.3, 0.3).unwrap(), 20_000 + s)
                .unwrap()
                .edge_count() as f64
        })
        .collect();
    let (ma, sa) = mean_se(&a);
    let (mb, sb) = mean_se(&b);
    let (mc, sc) = mean_se(&c);
    let z_ab = (ma - mb) / (sa * sa + sb * sb).sqrt();
    let z_cb = (mc - mb) / (sc * sc + sb * sb).sqrt();
    assert!(z_ab.abs() < 2.576, "z = {z_ab}");
    assert!(z_cb.abs() < 2.576, "z = {z_cb}");
}

#[test]
fn er_limits_and_mean() {
    assert_eq!(gen_er(7, 1.0, 1).unwrap(), Graph::complete(7).unwrap());
    assert_eq!(gen_er(7, 0.0, 1).unwrap().edge_count(), 0);
    let xs = mean_degrees(100, |s| gen_er(100, 0.5, s).unwrap());
    let (mean, se) = mean_se(&xs);
    assert!((mean - 49.5).abs() < 3.0 * se, "{mean} (se {se})");
    assert!(gen_er(10, 1.5, 0).is_err());
}

#[test]
fn small_world_lattice_and_shortcuts() {
    let g = gen_small_world(20, 4, 0.0, 9).unwrap();
    assert_eq!(g, Graph::ring_lattice(20, 4).unwrap());
    let m = g.degree_moments();
    assert_eq!((m.mu1, m.mu2), (4.0, 16.0));
    let xs = mean_degrees(100, |s| gen_small_world(200, 8, 0.05, s).unwrap());
    let (mean, se) = mean_se(&xs);
    assert!((mean - 8.4).abs() < 3.0 * se, "{mean} (se {se})");
    assert!(gen_small_world(8, 8, 0.1, 0).is_err());
    assert!(gen_small_world(20, 3, 0.1, 0).is_err());
}

fn growth_edge_count(n: usize, c: usize) -> usize {
    c * (n - (c + 1)) + c * (c + 1) / 2
}

#[test]
fn growth_models_have_exact_edge_counts() {
    for c in 1..=4 {
        let n = 120;
        let graphs = [
            gen_pa_shifted(n, c, 1.5, 1).unwrap(),
            gen_pa_superlinear(n, c, 1.2, 2).unwrap(),
            gen_holme_kim(n, c, 0.6, 3).unwrap(),
            gen_klemm_eguiluz(n, c, 0.4, 4).unwrap(),
            gen_spatial_sf(n, c, 0.1, 5).unwrap(),
        ];
        for g in &graphs {
            assert_eq!(g.edge_count(), growth_edge_count(n, c));
            assert!(g.is_connected());
        }
    }
}

#[test]
fn single_link_growth_builds_trees() {
    for seed in 0..5 {
        for g in [
            gen_pa_shifted(80, 1, 0.0, seed).unwrap(),
            gen_holme_kim(80, 1, 1.0, seed).unwrap(),
            gen_pa_superlinear(80, 1, 2.0, seed).unwrap(),
        ] {
            assert_eq!(g.edge_count(), 79);
            assert!(g.is_connected());
        }
    }
}

#[test]
fn pa_mean_degree_near_twice_links() {
    let g = gen_pa_shifted(500, 3, 0.0, 17).unwrap();
    assert!((g.degree_moments().mu1 - 6.0).abs() < 0.2);
}

#[test]
fn superlinear_kernel_condenses() {
    let hits = (0..100)
        .filter(|&s| gen_pa_superlinear(300, 2, 2.5, s).unwrap().max_degree() > 100)
        .count();
    assert!(hits >= 50, "{hits}");
}

#[test]
fn superlinear_theta_one_matches_linear_pa() {
    let a: Vec<f64> = (0..100)
        .map(|s| gen_pa_superlinear(200, 2, 1.0, s).unwrap().max_degree() as f64)
        .collect();
    let b: Vec<f64> = (0..100)
        .map(|s| gen_pa_shifted(200, 2, 0.0, 1000 + s).unwrap().max_degree() as f64)
        .collect();
    let (ma, sa) = mean_se(&a);
    let (mb, sb) = mean_se(&b);
    assert!(((ma - mb) / (sa * sa + sb * sb).sqrt()).abs() < 2.576);
}

fn paired_clustering<F, G>(draws: u64, high: F, low: G) -> (f64, f64)
where
    F: Fn(u64) -> Graph,
    G: Fn(u64) -> Graph,
{
    let h: f64 = (0..draws).map(|s| high(s).mean_clustering()).sum();
    let l: f64 = (0..draws).map(|s| low(s).mean_clustering()).sum();
    (h / draws as f64, l / draws as f64)
}

#[test]
fn holme_kim_triads_raise_clustering() {
    let (h, l) = paired_clustering(
        50,
        |s| gen_holme_kim(300, 3, 1.0, s).unwrap(),
        |s| gen_holme_kim(300, 3, 0.0, s).unwrap(),
    );
    assert!(h > l, "{h} <= {l}");
}

#[test]
fn klemm_eguiluz_crossover_lowers_clustering() {
    let (h, l) = paired_clustering(
        50,
        |s| gen_klemm_eguiluz(300, 3, 0.0, s).unwrap(),
        |s| gen_klemm_eguiluz(300, 3, 1.0, s).unwrap(),
    );
    assert!(h > l, "{h} <= {l}");
}

fn mean_edge_length(n: usize, r_c: f64, seed: u64) -> f64 {
    let (g, pos) = gen_spatial_sf_with_positions(n, 2, r_c, seed).unwrap();
    let total: f64 = g
        .edges()
        .map(|(u, v)| ((pos[u][0] - pos[v][0]).powi(2) + (pos[u][1] - pos[v][1]).powi(2)).sqrt())
        .sum();
    total / g.edge_count() as f64
}

#[test]
fn spatial_decay_shortens_edges() {
    let short: f64 = (0..50).map(|s| mean_edge_length(300, 0.05, s)).sum();
    let long: f64 = (0..50).map(|s| mean_edge_length(300, 0.2, s)).sum();
    assert!(short < long);
    let g = gen_spatial_sf(300, 2, 0.1, 1).unwrap();
    assert_eq!(g.edge_count(), 3 + 2 * (300 - 3));
}

#[test]
fn spatial_large_radius_behaves_like_pa() {
    let a: Vec<f64> = (0..100)
        .map(|s| {
            gen_spatial_sf(200, 2, 10.0, s)
                .unwrap()
                .degree_moments()
                .mu2
        })
        .collect();
    let b: Vec<f64> = (0..100)
        .map(|s| {
            gen_pa_shifted(200, 2, 0.0, 500 + s)
                .unwrap()
                .degree_moments()
                .mu2
        })
        .collect();
    let (ma, sa) = mean_se(&a);
    let (mb, sb) = mean_se(&b);
    assert!(
        ((ma - mb) / (sa * sa + sb * sb).sqrt()).abs() < 3.0,
        "{ma} vs {mb}"
    );
}

#[test]
fn ucm_respects_cutoff_and_mean() {
    for s in 0..20 {
        let g = gen_ucm(400, 4.0, 2, s).unwrap();
        assert!(g.max_degree() <= ucm_cutoff(400));
        assert!(g.min_degree() >= 2);
        assert_eq!(g.degrees().iter().sum::<usize>() % 2, 0);
    }
    let xs = mean_degrees(100, |s| gen_ucm(400, 2.5, 2, s).unwrap());
    let (mean, se) = mean_se(&xs);
    let expected = truncated_power_law_mean(2.5, 2, 20);
    assert!(
        (mean - expected).abs() < 3.0 * se,
        "{mean} vs {expected} (se {se})"
    );
    assert!(gen_ucm(400, 0.5, 2, 0).is_err());
    assert!(gen_ucm(16, 2.0, 5, 0).is_err());
}

#[test]
fn ensure_connected_behaviour() {
    let er = GeneratorSpec::new(50, Model::Er { p: 0.5 }, 1).unwrap();
    assert_eq!(ensure_connected(&er, 10).unwrap().attempts, 1);

    let split = GeneratorSpec::new(
        60,
        Model::Sbm {
            m: 3,
            p: 1.0,
            q: 0.0,
        },
        1,
    )
    .unwrap();
    match ensure_connected(&split, 5) {
        Err(Error::AttemptsExhausted {
            attempts: 5,
            detail,
        }) => assert!(detail.contains("3 components")),
        other => panic!("{other:?}"),
    }

    let successes = (0..100)
        .filter(|&s| {
            let spec = GeneratorSpec::new(
                100,
                Model::Sbm {
                    m: 2,
                    p: 0.8,
                    q: 0.01,
                },
                s,
            )
            .unwrap();
            ensure_connected(&spec, DEFAULT_MAX_ATTEMPTS).is_ok()
        })
        .count();
    assert!(successes >= 99, "{successes}");
}

#[test]
fn specs_are_deterministic_and_round_trip() {
    let mut rng = crate::seed::rng_from_seed(99);
    for kind in FamilyKind::ALL {
        for _ in 0..3 {
            let model = kind.sample_model(&mut rng);
            let spec = GeneratorSpec::new(120, model, 7).unwrap();
            let text = spec.to_kv_string();
            let back = GeneratorSpec::parse(&text).unwrap();
            assert_eq!(back, spec, "{text}");
            let a = spec.generate().unwrap().to_edge_list_string();
            let b = back.generate().unwrap().to_edge_list_string();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn spec_parse_rejects_bad_input() {
    assert!(GeneratorSpec::parse("family = er\nn = 10\np = 2\n").is_err());
    assert!(GeneratorSpec::parse("family = er\nn = 10\np = 0.5\nq = 0.1\n").is_err());
    assert!(GeneratorSpec::parse("family = lfr\nn = 10\n").is_err());
    assert!(
        GeneratorSpec::parse("family = small-world\nn = 10\nlattice_degree = 3\np_add = 0.1")
            .is_err()
    );
}
