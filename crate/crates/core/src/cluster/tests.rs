use super::*;
use crate::pluecker::Gr20Coords;
use itertools::Itertools;
use std::collections::BTreeSet;

fn d(n: usize, i: usize, j: usize) -> Diagonal {
    Diagonal::new(n, i, j).unwrap()
}

fn tri(n: usize, ds: &[(usize, usize)]) -> Triangulation {
    Triangulation::new(n, ds.iter().map(|&(i, j)| d(n, i, j))).unwrap()
}

fn catalan(k: usize) -> usize {
    (0..k).fold(1, |c, i| c * 2 * (2 * i + 1) / (i + 2))
}

fn brute_force_triangulations(n: usize) -> Vec<Triangulation> {
    let all: Vec<Diagonal> = (1..=n)
        .tuple_combinations()
        .filter_map(|(i, j)| Diagonal::new(n, i, j).ok())
        .collect();
    let mut out: Vec<Triangulation> = all
        .into_iter()
        .combinations(n - 3)
        .filter(|ds| ds.iter().tuple_combinations().all(|(a, b)| !a.crosses(*b)))
        .map(|ds| Triangulation::new(n, ds).unwrap())
        .collect();
    out.sort();
    out
}

fn ground_truth(seed: u64, n: usize) -> Gr20Coords {
    Gr20Coords::from_plane(&sample_generic_plane(seed, n).unwrap()).unwrap()
}

#[test]
fn diagonal_validation() {
    assert_eq!(d(5, 4, 1).endpoints(), (1, 4));
    assert!(Diagonal::new(5, 1, 2).is_err());
    assert!(Diagonal::new(5, 1, 5).is_err());
    assert!(Diagonal::new(5, 2, 7).is_err());
    assert!(Diagonal::new(5, 0, 3).is_err());
    assert!(d(6, 1, 4).crosses(d(6, 2, 5)));
    assert!(!d(6, 1, 4).crosses(d(6, 1, 3)));
    assert!(!d(6, 1, 4).crosses(d(6, 4, 6)));
    assert!(Triangulation::new(6, [d(6, 1, 4), d(6, 2, 5), d(6, 1, 3)]).is_err());
    assert!(Triangulation::new(6, [d(6, 1, 4)]).is_err());
    assert!(matches!(
        Triangulation::new(3, []),
        Err(ClusterError::PolygonTooSmall(3))
    ));
}

#[test]
fn triangulation_counts_match_brute_force() {
    for n in 4..=9 {
        let listed = enumerate_triangulations(n).unwrap();
        assert_eq!(listed.len(), catalan(n - 2), "n={n}");
        assert_eq!(listed, brute_force_triangulations(n));
    }
    assert_eq!(enumerate_triangulations(4).unwrap().len(), 2);
    assert_eq!(enumerate_triangulations(5).unwrap().len(), 5);
    assert_eq!(enumerate_triangulations(6).unwrap().len(), 14);
    assert!(enumerate_triangulations(3).is_err());
}

#[test]
fn quadrilaterals() {
    let t = tri(5, &[(1, 3), (1, 4)]);
    let q = t.quad_of(d(5, 1, 4)).unwrap();
    assert_eq!(q.vertices, [1, 3, 4, 5]);
    assert_eq!(q.target, d(5, 3, 5));
    let sq = tri(4, &[(1, 3)]);
    let q = sq.quad_of(d(4, 1, 3)).unwrap();
    assert_eq!((q.vertices, q.target), ([1, 2, 3, 4], d(4, 2, 4)));
    assert!(matches!(
        t.quad_of(d(5, 2, 4)),
        Err(ClusterError::NotInTriangulation(_))
    ));
}

#[test]
fn odd_moves_follow_diagonals_only() {
    let dec = DecoratedTriangulation::new(tri(5, &[(1, 3), (1, 4)]), d(5, 1, 4)).unwrap();
    let next = dec.odd_move(4, 3).unwrap();
    assert_eq!(next.marked(), d(5, 1, 3));
    // (1,2) and (1,5) are sides
    assert!(matches!(
        dec.odd_move(4, 2),
        Err(ClusterError::IllegalOddMutation { .. })
    ));
    assert!(dec.odd_move(4, 5).is_err());
    assert!(matches!(
        dec.odd_move(2, 3),
        Err(ClusterError::NotMarked(2))
    ));
    let moves: Vec<_> = dec
        .odd_moves()
        .into_iter()
        .map(|(f, t, _)| (f, t))
        .collect();
    assert_eq!(moves, vec![(4, 3)]);
    let (flipped, _) = dec.even_move().unwrap();
    assert_eq!(flipped.triangulation(), &tri(5, &[(1, 3), (3, 5)]));
    assert_eq!(flipped.marked(), d(5, 3, 5));
}

#[test]
fn marking_is_always_reachable() {
    for n in 4..=8 {
        for t in enumerate_triangulations(n).unwrap() {
            assert!(marking_reachability(&t), "{t}");
        }
    }
}

#[test]
fn exchange_graph_sizes() {
    for n in 4..=8 {
        let g = exchange_graph(n).unwrap();
        assert_eq!(g.vertex_count(), catalan(n - 2) * (n - 3), "n={n}");
        assert!(g.is_connected());
        assert!(g.edges.iter().all(|e| e.from < e.to));
    }
    assert_eq!(exchange_graph(4).unwrap().vertex_count(), 2);
    assert_eq!(exchange_graph(5).unwrap().vertex_count(), 10);
    assert_eq!(exchange_graph(6).unwrap().vertex_count(), 42);
    assert!(exchange_graph(3).is_err());
}

#[test]
fn quotient_is_the_flip_graph() {
    for n in 4..=8 {
        let q = exchange_graph(n).unwrap().quotient();
        let brute = brute_force_triangulations(n);
        assert_eq!(q.vertices, brute);
        let expected: BTreeSet<(usize, usize)> = (0..brute.len())
            .tuple_combinations()
            .filter(|&(a, b)| {
                brute[a]
                    .diagonals()
                    .symmetric_difference(brute[b].diagonals())
                    .count()
                    == 2
            })
            .collect();
        assert_eq!(q.edges, expected, "n={n}");
    }
}

#[test]
fn odd_edges_join_markings_sharing_an_endpoint() {
    let g = exchange_graph(6).unwrap();
    for e in g.edges.iter().filter(|e| e.kind == EdgeKind::Odd) {
        let (a, b) = (&g.vertices[e.from], &g.vertices[e.to]);
        assert_eq!(a.triangulation(), b.triangulation());
        let (x, y) = a.marked().endpoints();
        assert!(b.marked().contains(x) || b.marked().contains(y));
    }
}

#[test]
fn exports_are_deterministic() {
    let a = exchange_graph(6).unwrap();
    let b = exchange_graph(6).unwrap();
    assert_eq!(a.to_dot(), b.to_dot());
    assert_eq!(a.to_json(), b.to_json());
    let g = exchange_graph(5).unwrap();
    let dot = g.to_dot();
    assert!(dot.contains("[label=\"T:{1-3,1-4};M:1-3\"]"));
    assert!(dot.contains("kind=odd") && dot.contains("kind=even"));
    let json: serde_json::Value = serde_json::from_str(&g.to_json()).unwrap();
    assert_eq!(json["n"], 5);
    assert_eq!(
        json["vertices"][0]["diagonals"],
        serde_json::json!([[1, 3], [1, 4]])
    );
    assert_eq!(json["vertices"][0]["marked"], serde_json::json!([1, 3]));
    assert_eq!(json["edges"].as_array().unwrap().len(), g.edges.len());
    assert!(["odd", "even"].contains(&json["edges"][0]["kind"].as_str().unwrap()));
}

#[test]
fn pentagon_odd_mutation() {
    let coords = ground_truth(1, 5);
    let dec = DecoratedTriangulation::new(tri(5, &[(1, 3), (1, 4)]), d(5, 1, 4)).unwrap();
    let c = ground_truth_cluster(&coords, &dec).unwrap();
    let m = c.odd_mutation(4, 3).unwrap();
    assert_eq!(m.decoration().marked(), d(5, 1, 3));
    assert_eq!(&m.odd_vars()[&3], coords.theta(3));
    assert_eq!(&m.odd_vars()[&1], coords.theta(1));
    assert_eq!(m.even_vars(), c.even_vars());
}

#[test]
fn odd_mutation_sign_cases() {
    let coords = ground_truth(2, 6);
    let (t, th) = (|a, b| coords.t(a, b), |a| coords.theta(a).clone());
    // a<b<c: θ^c = (T^{ac}θ^b − θ^a T^{bc}) / T^{ab}, with (2,6) reached by flips
    let dec = DecoratedTriangulation::new(tri(6, &[(1, 4), (2, 4), (4, 6)]), d(6, 2, 4)).unwrap();
    let c = ground_truth_cluster(&coords, &dec).unwrap();
    let (a, b, cc) = (2, 4, 6);
    let expected = &(&(&t(a, cc) * &th(b)) - &(&th(a) * &t(b, cc))) * &t(a, b).invert().unwrap();
    assert_eq!(c.odd_mutation(a, cc).unwrap().odd_vars()[&cc], expected);
    assert_eq!(c.t_value(a, cc).unwrap(), t(a, cc));
    // a<c<b: θ^c = (T^{ac}θ^b + θ^a T^{cb}) / T^{ab}
    let dec = DecoratedTriangulation::new(tri(6, &[(1, 3), (1, 5), (3, 5)]), d(6, 1, 5)).unwrap();
    let c = ground_truth_cluster(&coords, &dec).unwrap();
    let (a, b, cc) = (1, 5, 3);
    let expected = &(&(&t(a, cc) * &th(b)) + &(&th(a) * &t(cc, b))) * &t(a, b).invert().unwrap();
    assert_eq!(c.odd_mutation(a, cc).unwrap().odd_vars()[&cc], expected);
}

#[test]
fn pentagon_even_mutation() {
    let coords = ground_truth(3, 5);
    let dec = DecoratedTriangulation::new(tri(5, &[(1, 3), (1, 4)]), d(5, 1, 4)).unwrap();
    let c = ground_truth_cluster(&coords, &dec).unwrap();
    let m = c.even_mutation().unwrap();
    assert_eq!(m.decoration().marked(), d(5, 3, 5));
    assert_eq!(m.even_vars()[&d(5, 3, 5)], coords.t(3, 5));
    assert_eq!(&m.odd_vars()[&3], coords.theta(3));
    assert_eq!(&m.odd_vars()[&5], coords.theta(5));
    assert!(!m.even_vars().contains_key(&d(5, 1, 4)));
}

#[test]
fn exchange_identities_on_ground_truth() {
    let coords = ground_truth(4, 6);
    let (t, th) = (|a, b| coords.t(a, b), |a| coords.theta(a).clone());
    for (a, b, c, dd) in (1..=6).tuple_combinations() {
        let inv = t(a, b).invert().unwrap();
        // T^{cd} = (T^{ac}T^{bd} − T^{ad}T^{bc}) / T^{ab}
        let tcd = &(&(&t(a, c) * &t(b, dd)) - &(&t(a, dd) * &t(b, c))) * &inv;
        assert_eq!(tcd, t(c, dd));
        // θ^d from the sorted triple (a, b, d)
        let good = &(&(&t(a, dd) * &th(b)) - &(&th(a) * &t(b, dd))) * &inv;
        assert_eq!(good, th(dd));
        let flipped = &(&(&t(a, dd) * &th(b)) + &(&th(a) * &t(b, dd))) * &inv;
        assert_ne!(flipped, th(dd));
    }
}

#[test]
fn mutations_round_trip() {
    let coords = ground_truth(5, 7);
    for dec in exchange_graph(7).unwrap().vertices.iter().step_by(7) {
        let c = ground_truth_cluster(&coords, dec).unwrap();
        assert_eq!(c.even_mutation().unwrap().even_mutation().unwrap(), c);
        for (from, to, _) in dec.odd_moves() {
            let there = c.odd_mutation(from, to).unwrap();
            assert_eq!(there.odd_mutation(to, from).unwrap(), c, "{from}->{to}");
        }
    }
}

#[test]
fn mutation_walks_match_ground_truth() {
    for (seed, n, steps) in [(6, 5, 200), (7, 6, 300), (8, 8, 150)] {
        let plane = sample_generic_plane(seed, n).unwrap();
        let start = DecoratedTriangulation::canonical_seed(n).unwrap();
        let moves = random_moves(&start, steps, seed);
        assert!(moves.iter().any(|m| matches!(m, Move::Odd { .. })));
        assert!(moves.contains(&Move::Even));
        let report = verify_walk(&plane, &start, &moves).unwrap();
        assert!(report.is_consistent(), "{:?}", report.discrepancy);
        assert_eq!(report.steps, steps);
    }
}

#[test]
fn empty_walk_is_consistent() {
    let plane = sample_generic_plane(9, 5).unwrap();
    let start = DecoratedTriangulation::canonical_seed(5).unwrap();
    let report = verify_walk(&plane, &start, &[]).unwrap();
    assert!(report.is_consistent() && report.steps == 0);
}

#[test]
fn walk_detects_tampering() {
    let coords = ground_truth(10, 5);
    let start = DecoratedTriangulation::canonical_seed(5).unwrap();
    let c = ground_truth_cluster(&coords, &start).unwrap();
    let mut odd = c.odd_vars().clone();
    let v = odd[&3].scale(&crate::rational::int(3));
    odd.insert(3, v);
    let bad = DecoratedCluster::new(
        start.clone(),
        c.even_vars().clone(),
        c.frozen_vars().clone(),
        odd,
    )
    .unwrap();
    let m = bad.even_mutation().unwrap();
    let (q, s) = m.decoration().marked().endpoints();
    assert!(&m.odd_vars()[&q] != coords.theta(q) || &m.odd_vars()[&s] != coords.theta(s));
}

#[test]
fn illegal_walk_is_an_error() {
    let plane = sample_generic_plane(11, 5).unwrap();
    let start = DecoratedTriangulation::canonical_seed(5).unwrap();
    let err = verify_walk(&plane, &start, &[Move::Odd { from: 3, to: 2 }]).unwrap_err();
    assert!(matches!(err, ClusterError::IllegalOddMutation { .. }));
}

#[test]
fn cluster_invariants_are_checked() {
    let coords = ground_truth(12, 5);
    let start = DecoratedTriangulation::canonical_seed(5).unwrap();
    let c = ground_truth_cluster(&coords, &start).unwrap();
    let mut odd = c.odd_vars().clone();
    odd.insert(4, coords.theta(4).clone());
    assert!(DecoratedCluster::new(
        start.clone(),
        c.even_vars().clone(),
        c.frozen_vars().clone(),
        odd
    )
    .is_err());
    let mut even = c.even_vars().clone();
    even.insert(
        d(5, 1, 3),
        crate::grassmann::GrassmannElement::zero(coords.generators()),
    );
    assert!(matches!(
        DecoratedCluster::new(start, even, c.frozen_vars().clone(), c.odd_vars().clone()),
        Err(ClusterError::NotInvertible(_))
    ));
}
