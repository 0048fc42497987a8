use std::time::Instant;

use num::{BigRational, One, Signed, Zero};
use polyscribe::circuits::{prismatic_circuits, CycleLimits, PrismaticCircuit};
use polyscribe::fixtures;
use polyscribe::inscribability::{check_weights, rivin_feasibility, rivin_slack_with_circuits};
use polyscribe::PlanarGraph;
use proptest::prelude::*;

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// Solves a square system exactly; None if singular.
fn solve_exact(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let v = &f * &a[col][c];
                    a[r][c] -= v;
                }
                let v = &f * &b[col];
                b[r] -= v;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), f);
}

/// Maximum of t over the polytope in (w, t), found by enumerating its vertices.
fn brute_force_slack(g: &PlanarGraph, circuits: &[PrismaticCircuit]) -> Option<Q> {
    let m = g.edge_count();
    let n = m + 1;
    // rows (coeffs, rhs) meaning coeffs . x >= rhs
    let mut ineq: Vec<(Vec<Q>, Q)> = Vec::new();
    for e in 0..m {
        let mut lo = vec![Q::zero(); n];
        lo[e] = Q::one();
        lo[m] = -Q::one();
        ineq.push((lo, Q::zero()));
        let mut hi = vec![Q::zero(); n];
        hi[e] = -Q::one();
        hi[m] = -Q::one();
        ineq.push((hi, q(-1, 2)));
    }
    for c in circuits {
        let mut row = vec![Q::zero(); n];
        for &e in &c.edges {
            row[e] = Q::one();
        }
        row[m] = -Q::one();
        ineq.push((row, Q::one()));
    }
    let eq: Vec<Vec<Q>> = (0..g.vertex_count())
        .map(|v| {
            let mut row = vec![Q::zero(); n];
            for u in g.neighbors(v) {
                row[g.edge_between(u, v).unwrap()] = Q::one();
            }
            row
        })
        .collect();
    let k = n - eq.len();
    let mut best: Option<Q> = None;
    combinations(ineq.len(), k, &mut |pick| {
        let mut a = eq.clone();
        let mut b = vec![Q::one(); eq.len()];
        for &i in pick {
            a.push(ineq[i].0.clone());
            b.push(ineq[i].1.clone());
        }
        let Some(x) = solve_exact(a, b) else { return };
        let feasible = ineq.iter().all(|(row, rhs)| {
            let lhs: Q = row.iter().zip(&x).map(|(r, v)| r * v).sum();
            lhs >= *rhs
        });
        if feasible && best.as_ref().is_none_or(|b| x[m] > *b) {
            best = Some(x[m].clone());
        }
    });
    best
}

#[test]
fn vertex_enumeration_agrees_on_small_graphs() {
    for g in [fixtures::tetrahedron(), fixtures::square_pyramid()] {
        assert!(g.edge_count() <= 8);
        let circuits = prismatic_circuits(&g, CycleLimits::default()).unwrap();
        let oracle = brute_force_slack(&g, &circuits).unwrap();
        let verdict = rivin_feasibility(&g).unwrap();
        assert_eq!(verdict.slack.clone().unwrap(), oracle);
        assert_eq!(verdict.inscribable, oracle.is_positive());
    }
}

#[test]
fn tetrahedron_optimum_is_uniform() {
    // symmetry and the vertex sums force w = 1/3, so t* = min(1/3, 1/6, 4/3 - 1)
    let v = rivin_feasibility(&fixtures::tetrahedron()).unwrap();
    assert_eq!(v.slack.unwrap(), q(1, 6));
    assert!(v.certificate.unwrap().values.iter().all(|w| *w == q(1, 3)));
}

#[test]
fn platonic_certificates_are_sound() {
    for name in ["tetrahedron", "cube", "octahedron", "dodecahedron", "icosahedron"] {
        let g = fixtures::by_name(name).unwrap();
        let start = Instant::now();
        let v = rivin_feasibility(&g).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        assert!(v.inscribable, "{name}");
        assert!(v.complete);
        let t = v.slack.unwrap();
        let report = check_weights(&g, v.certificate.as_ref().unwrap()).unwrap();
        assert!(report.all_pass(), "{name}");
        assert!(report.min_strict_margin().unwrap() >= t, "{name}");
        eprintln!("{name}: t* = {t}, {}/{} circuits, {elapsed:.2}s", v.circuits_used, v.circuits_total);
    }
}

#[test]
fn figure_graph_is_not_inscribable() {
    let g = fixtures::truncated_cube_one_corner();
    let v = rivin_feasibility(&g).unwrap();
    assert!(!v.inscribable);
    assert!(!v.slack.unwrap().is_positive());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn adding_circuits_never_raises_slack(mask in proptest::collection::vec(any::<bool>(), 15), extra in 0usize..15) {
        let g = fixtures::cube();
        let all = prismatic_circuits(&g, CycleLimits::up_to(4)).unwrap();
        prop_assume!(all.len() == 15);
        let subset: Vec<&PrismaticCircuit> = all.iter().zip(&mask).filter(|(_, m)| **m).map(|(c, _)| c).collect();
        let base = rivin_slack_with_circuits(&g, subset.iter().copied()).unwrap();
        let mut bigger = subset.clone();
        bigger.push(&all[extra]);
        let more = rivin_slack_with_circuits(&g, bigger.iter().copied()).unwrap();
        prop_assert!(more <= base);
        let full = rivin_feasibility(&g).unwrap().slack.unwrap();
        prop_assert!(full <= more);
    }
}
