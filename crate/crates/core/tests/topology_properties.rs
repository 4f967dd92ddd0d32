use proptest::prelude::*;
use topoflow_core::topology::{
    algebraic_connectivity, betweenness_centrality, degree_sequence, generate_ba, generate_er_gnm, graph_summary,
    Graph,
};

fn graph_from_mask(n: usize, mask: &[bool]) -> Graph {
    let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    Graph::from_edges(n, pairs.zip(mask).filter(|(_, &keep)| keep).map(|(e, _)| e)).unwrap()
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn lambda2_never_drops_when_an_edge_is_added(mask in prop::collection::vec(prop::bool::weighted(0.3), 66),
                                                 pick in any::<prop::sample::Index>()) {
        let g = graph_from_mask(12, &mask);
        let missing: Vec<(usize, usize)> = (0..12)
            .flat_map(|i| (i + 1..12).map(move |j| (i, j)))
            .filter(|&(i, j)| !g.has_edge(i, j))
            .collect();
        prop_assume!(!missing.is_empty());
        let (i, j) = missing[pick.index(missing.len())];
        let mut h = g.clone();
        h.add_edge(i, j).unwrap();
        prop_assert!(algebraic_connectivity(&h) >= algebraic_connectivity(&g) - 1e-9);
    }

    #[test]
    fn summary_invariants(n in 2usize..14, mask in prop::collection::vec(prop::bool::weighted(0.25), 91)) {
        let g = graph_from_mask(n, &mask);
        let s = graph_summary(&g);
        prop_assert_eq!(degree_sequence(&g).iter().sum::<usize>(), 2 * s.edge_count);
        prop_assert!((s.avg_degree - 2.0 * s.edge_count as f64 / n as f64).abs() < 1e-12);
        prop_assert!((s.density - s.edge_count as f64 / (n * (n - 1) / 2) as f64).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&s.density));
        prop_assert_eq!(s.connected, s.algebraic_connectivity > 1e-9);
        prop_assert_eq!(s.connected, g.connected_components().len() == 1);
    }

    #[test]
    fn generators_are_pure(seed in any::<u64>()) {
        prop_assert_eq!(generate_ba(40, 3, seed).unwrap(), generate_ba(40, 3, seed).unwrap());
        prop_assert_eq!(generate_er_gnm(40, 111, seed).unwrap(), generate_er_gnm(40, 111, seed).unwrap());
    }
}

#[test]
fn degree_and_betweenness_correlate_on_ba() {
    for seed in 0..5 {
        let g = generate_ba(100, 10, seed).unwrap();
        let d: Vec<f64> = degree_sequence(&g).into_iter().map(|x| x as f64).collect();
        let r = pearson(&d, &betweenness_centrality(&g));
        assert!(r > 0.8, "seed {seed}: r = {r}");
    }
}

#[test]
fn ba_100_2_summary_bands() {
    for seed in 0..20 {
        let s = graph_summary(&generate_ba(100, 2, seed).unwrap());
        assert_eq!(s.edge_count, 196);
        assert!(s.connected);
        assert!((s.avg_shortest_path - 2.85).abs() <= 0.4, "seed {seed}: {}", s.avg_shortest_path);
        assert!((4..=6).contains(&s.diameter), "seed {seed}: {}", s.diameter);
        assert!((s.algebraic_connectivity - 0.612).abs() <= 0.15, "seed {seed}: {}", s.algebraic_connectivity);
    }
}

#[test]
fn idempotent_er_loses_the_hubs() {
    let mut ba_max = 0;
    let mut er_max = 0;
    for seed in 0..10 {
        let ba = generate_ba(100, 2, seed).unwrap();
        let er = generate_er_gnm(100, ba.edge_count(), seed).unwrap();
        assert_eq!(er.edge_count(), ba.edge_count());
        ba_max += degree_sequence(&ba).into_iter().max().unwrap();
        er_max += degree_sequence(&er).into_iter().max().unwrap();
    }
    assert!(ba_max > 2 * er_max, "BA max degree {ba_max} vs ER {er_max}");
}
