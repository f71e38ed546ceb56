use proptest::prelude::*;

use hplscape::fla::{self, WalkConfig, DEFAULT_EPSILON};
use hplscape::local::{self, build_lon, escape_improve_rates, find_local_optima, EscapeConfig};
use hplscape::similarity::{compare_report, gamma_set, shakeup, spearman};
use hplscape::space::{HpKind, HyperparameterDecl, SearchSpace};
use hplscape::{Direction, Landscape, Scenario};

fn space_strategy() -> impl Strategy<Value = SearchSpace> {
    prop::collection::vec((any::<bool>(), 1usize..=4), 1..=3).prop_map(|hps| {
        SearchSpace::new(
            hps.into_iter()
                .enumerate()
                .map(|(i, (categorical, m))| {
                    let name = format!("h{i}");
                    if categorical {
                        HyperparameterDecl::categorical(&name, (0..m).map(|v| format!("c{v}")))
                    } else {
                        HyperparameterDecl::numerical(&name, (0..m).map(|v| v as f64 * 0.5))
                    }
                })
                .collect(),
        )
        .unwrap()
    })
}

/// Random landscape: possibly partial grid, losses with frequent ties.
fn landscape_strategy() -> impl Strategy<Value = Landscape> {
    space_strategy().prop_flat_map(|space| {
        let n = space.cardinality() as usize;
        (
            Just(space),
            prop::collection::vec((0u8..6, any::<bool>(), 0u8..10), n),
            any::<bool>(),
        )
            .prop_map(|(space, cells, maximize)| {
                let direction = if maximize {
                    Direction::Maximize
                } else {
                    Direction::Minimize
                };
                let mut rows: Vec<_> = space
                    .iter_all()
                    .zip(&cells)
                    .filter(|(_, &(_, _, keep))| keep < 8)
                    .map(|(c, &(v, frac, _))| {
                        (c, f64::from(v) + if frac { 0.25 } else { 0.0 })
                    })
                    .collect();
                if rows.is_empty() {
                    rows.push((space.iter_all().next().unwrap(), 1.0));
                }
                Landscape::from_rows(space, Scenario::new("loss", direction), rows).unwrap()
            })
    })
}

/// Strictly increasing transform drawn from a small family.
fn monotone(kind: u8, x: f64) -> f64 {
    match kind % 4 {
        0 => 3.0 * x + 7.0,
        1 => (x / 4.0).exp(),
        2 => x * x * x + x,
        _ => (x + 20.0).ln() * 10.0,
    }
}

fn is_acyclic(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut indeg = vec![0usize; n];
    let mut out = vec![Vec::new(); n];
    for &(a, b) in edges {
        indeg[b] += 1;
        out[a].push(b);
    }
    let mut stack: Vec<usize> = (0..n).filter(|&u| indeg[u] == 0).collect();
    let mut seen = 0;
    while let Some(u) = stack.pop() {
        seen += 1;
        for &v in &out[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                stack.push(v);
            }
        }
    }
    seen == n
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn distance_is_a_metric(space in space_strategy(), picks in prop::collection::vec(any::<u64>(), 3)) {
        let card = space.cardinality();
        let c: Vec<_> = picks.iter().map(|p| space.from_linear_index(p % card)).collect();
        let d = |i: usize, j: usize| space.distance(&c[i], &c[j]);
        prop_assert_eq!(d(0, 1), d(1, 0));
        prop_assert_eq!(d(0, 0), 0);
        prop_assert_eq!(d(0, 1) == 0, c[0] == c[1]);
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2));
    }

    #[test]
    fn neighbor_count_formula(space in space_strategy(), pick in any::<u64>()) {
        let c = space.from_linear_index(pick % space.cardinality());
        let expected: usize = space.hps().iter().zip(c.indices()).map(|(hp, &i)| match hp.kind {
            HpKind::Categorical => hp.len() - 1,
            HpKind::Numerical => usize::from(i > 0) + usize::from((i as usize) + 1 < hp.len()),
        }).sum();
        let ns = space.neighbors(&c);
        prop_assert_eq!(ns.len(), expected);
        prop_assert!(ns.iter().all(|n| space.distance(&c, n) == 1));
    }

    #[test]
    fn graph_invariants(l in landscape_strategy(), kind in any::<u8>()) {
        prop_assert!(is_acyclic(l.len(), l.edges()));
        for &(u, v) in l.edges() {
            prop_assert_eq!(l.distance(u, v), 1);
            prop_assert!(l.is_better(v, u));
        }
        for &(u, v) in l.neutral_pairs() {
            prop_assert_eq!(l.loss(u), l.loss(v));
        }
        // every present d=1 pair is exactly one edge or neutral pair
        let links: usize = (0..l.len()).map(|u| l.neighbors_of(u).len()).sum();
        prop_assert_eq!(links, 2 * l.adjacency_count());

        let t = l.with_losses(l.losses().iter().map(|&x| monotone(kind, x)).collect()).unwrap();
        prop_assert_eq!(t.edges(), l.edges());
        prop_assert_eq!(t.neutral_pairs(), l.neutral_pairs());
    }

    #[test]
    fn local_structure_invariants(l in landscape_strategy()) {
        let b = find_local_optima(&l);
        let total: usize = b.optima().iter().map(|&o| b.basin_size(o)).sum();
        prop_assert_eq!(total, l.len());
        for u in 0..l.len() {
            let trace = local::local_search(&l, u);
            prop_assert_eq!(trace.optimum, b.optimum_of(u));
            prop_assert_eq!(trace.steps, b.steps(u));
            prop_assert!(trace.steps < l.len());
            for w in trace.path.windows(2) {
                prop_assert!(l.is_better(w[1], w[0]));
            }
            prop_assert_eq!(b.optimum_of(b.optimum_of(u)), b.optimum_of(u));
        }
        for &o in b.optima() {
            prop_assert_eq!(b.steps(o), 0);
        }

        let lon = build_lon(&l, &b);
        let ids: Vec<usize> = lon.vertices.iter().map(|v| v.id).collect();
        prop_assert_eq!(&ids[..], b.optima());
        let lon_edges: Vec<(usize, usize)> = lon.edges.iter().map(|e| (e.src, e.dst)).collect();
        prop_assert!(is_acyclic(l.len(), &lon_edges));
        for e in &lon.edges {
            prop_assert!(e.weight >= 1);
            prop_assert!(l.is_better(e.dst, e.src));
        }
        for &o in b.optima() {
            let out: u64 = lon.edges.iter().filter(|e| e.src == o).map(|e| e.weight).sum();
            prop_assert!(out as usize <= lon.perturbation_count(o));
        }

        let esc = escape_improve_rates(&l, &b, &EscapeConfig::default());
        for e in &esc.entries {
            prop_assert!(e.improve_rate <= e.escape_rate);
            if let Some(r) = e.escape_rate {
                prop_assert!((0.0..=1.0).contains(&r));
            }
        }
    }

    #[test]
    fn local_structure_is_rank_determined(l in landscape_strategy(), kind in any::<u8>()) {
        let t = l.with_losses(l.losses().iter().map(|&x| monotone(kind, x)).collect()).unwrap();
        let (b1, b2) = (find_local_optima(&l), find_local_optima(&t));
        prop_assert_eq!(b1.optima(), b2.optima());
        prop_assert_eq!(b1.to_csv(), b2.to_csv());
        let (n1, n2) = (build_lon(&l, &b1), build_lon(&t, &b2));
        prop_assert_eq!(&n1.edges, &n2.edges);
        let cfg = EscapeConfig::default();
        prop_assert_eq!(
            escape_improve_rates(&l, &b1, &cfg).entries,
            escape_improve_rates(&t, &b2, &cfg).entries
        );
    }

    #[test]
    fn metric_ranges(l in landscape_strategy(), seed in any::<u64>(), scale in 0.5f64..20.0) {
        let w = WalkConfig { n_walks: 10, walk_length: 20, lag: 1, seed };
        if let Some(r) = fla::autocorrelation(&l, &w).unwrap() {
            prop_assert!((-1.0..=1.0).contains(&r));
        }
        if let Some(r) = fla::loss_assortativity(&l) {
            prop_assert!((-1.0..=1.0).contains(&r));
        }
        let nd = fla::ndc(&l, DEFAULT_EPSILON).unwrap();
        for v in [nd.walk, nd.direct].into_iter().flatten() {
            prop_assert!((-1.0..=1.0).contains(&v));
        }
        let nu = fla::mean_neutrality(&l, DEFAULT_EPSILON).unwrap();
        if let Some(v) = nu {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        // neutrality is scale-free; assortativity is affine-invariant
        let scaled = l.with_losses(l.losses().iter().map(|x| x * scale).collect()).unwrap();
        prop_assert_eq!(fla::mean_neutrality(&scaled, DEFAULT_EPSILON).unwrap(), nu);
        let affine = l.with_losses(l.losses().iter().map(|x| x * scale + 3.0).collect()).unwrap();
        match (fla::loss_assortativity(&l), fla::loss_assortativity(&affine)) {
            (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-9),
            (a, b) => prop_assert_eq!(a, b),
        }
    }

    #[test]
    fn similarity_invariants(l in landscape_strategy(), other in prop::collection::vec(0u8..8, 64), kind in any::<u8>()) {
        let l2 = l.with_losses((0..l.len()).map(|i| f64::from(other[i % 64])).collect()).unwrap();
        let t1 = l.with_losses(l.losses().iter().map(|&x| monotone(kind, x)).collect()).unwrap();
        let t2 = l2.with_losses(l2.losses().iter().map(|&x| monotone(kind.wrapping_add(1), x)).collect()).unwrap();

        prop_assert_eq!(shakeup(&l, &l), Some(0.0));
        let r = compare_report(&l, &l2, 0.1).unwrap();
        let swapped = compare_report(&l2, &l, 0.1).unwrap();
        let transformed = compare_report(&t1, &t2, 0.1).unwrap();
        prop_assert_eq!(r.spearman, swapped.spearman);
        prop_assert_eq!(r.shakeup, swapped.shakeup);
        prop_assert_eq!(r.gamma_set, swapped.gamma_set);
        prop_assert_eq!(r.spearman, transformed.spearman);
        prop_assert_eq!(r.shakeup, transformed.shakeup);
        prop_assert_eq!(r.gamma_set, transformed.gamma_set);
        if let Some(s) = spearman(&l, &l2) {
            prop_assert!((-1.0..=1.0).contains(&s));
        }
        let sh = shakeup(&l, &l2).unwrap();
        prop_assert!((0.0..1.0).contains(&sh));
        let g = gamma_set(&l, &l2, 0.1).unwrap().unwrap();
        prop_assert!((0.0..=1.0).contains(&g));
    }
}
