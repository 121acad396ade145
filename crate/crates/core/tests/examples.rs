use std::sync::Arc;

use harmonic_core::analysis::{caccioppoli_ratio, mean_value_ratio, poincare_ratio, DirichletProblem, EliminationOrder};
use harmonic_core::cayley::{BallFunction, CayleyGraph};
use harmonic_core::group::AbelianGroup;
use harmonic_core::laplace::{apply_laplacian, harmonic_space_dimension};
use num_rational::BigRational;
use num_traits::{One, Zero};

fn z2() -> (AbelianGroup, CayleyGraph) {
    let g = AbelianGroup::free(2).unwrap();
    (g.clone(), CayleyGraph::standard(g))
}

#[test]
fn caccioppoli_of_linear_function_matches_direct_count() {
    let (g, graph) = z2();
    let r = 3i64;
    let ball = Arc::new(graph.ball(&g.zero(), 6 * r as u32).unwrap());
    let f = BallFunction::from_fn(ball, |x| x.free[0] as f64);
    // |∇x|^2 = 2 at every vertex; |B_3| = 25.
    let lhs = 2.0 * 25.0;
    let mut mass = 0.0;
    for a in -6 * r..=6 * r {
        for b in -6 * r..=6 * r {
            if a.abs() + b.abs() <= 6 * r {
                mass += (a * a) as f64;
            }
        }
    }
    let got = caccioppoli_ratio(&graph, &f, r as u32).unwrap();
    assert!((got.value - lhs / (mass / (r * r) as f64)).abs() < 1e-12);
}

#[test]
fn poincare_of_linear_function_matches_direct_count() {
    let (g, graph) = z2();
    let ball = Arc::new(graph.ball(&g.zero(), 3).unwrap());
    let f = BallFunction::from_fn(ball, |x| x.free[0] as f64);
    // B_1 = {0, ±e1, ±e2}: average 0, variance sum 2. Only e1-edges of B_3
    // contribute, each counted in both orientations.
    let inside = |a: i64, b: i64| a.abs() + b.abs() <= 3;
    let pairs = (-3..=3)
        .flat_map(|a| (-3..=3).map(move |b| (a, b)))
        .filter(|&(a, b)| inside(a, b) && inside(a + 1, b))
        .count();
    let got = poincare_ratio(&graph, &f, 1).unwrap();
    assert!((got.value - 2.0 / (2 * pairs) as f64).abs() < 1e-12);
}

#[test]
fn mean_value_of_constant_is_one() {
    let (g, graph) = z2();
    let ball = Arc::new(graph.ball(&g.zero(), 2).unwrap());
    let f = BallFunction::from_fn(ball, |_| 3.5);
    assert_eq!(mean_value_ratio(&f, 2).unwrap().value, 1.0);
}

#[test]
fn kernel_basis_is_annihilated() {
    let g = AbelianGroup::new(1, vec![3]).unwrap();
    let graph = CayleyGraph::standard(g);
    let report = harmonic_space_dimension(&graph, 4.0, 1).unwrap();
    assert_eq!(report.computed_dim, 2);
    for f in &report.kernel.functions {
        assert!(apply_laplacian(&graph, f, 1).unwrap().is_zero());
        assert!(f.is_torsion_constant());
    }
}

#[test]
fn dirichlet_on_torsion_group_respects_the_cycle() {
    let g = AbelianGroup::new(1, vec![2]).unwrap();
    let graph = CayleyGraph::standard(g.clone());
    let problem = DirichletProblem::on_ball(&graph, &g.zero(), 1).unwrap();
    let n = problem.ball().boundary().len();
    let b: Vec<BigRational> = (0..n).map(|_| BigRational::one()).collect();
    let f = problem.solve_exact(&b, EliminationOrder::Natural).unwrap();
    assert!(f.values().iter().all(|v| v.is_one()));
    let zero: Vec<BigRational> = (0..n).map(|_| BigRational::zero()).collect();
    let f = problem.solve_exact(&zero, EliminationOrder::Reversed).unwrap();
    assert!(f.values().iter().all(|v| v.is_zero()));
}
