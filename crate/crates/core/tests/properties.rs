use std::sync::Arc;

use harmonic_core::analysis::{DirichletProblem, EliminationOrder};
use harmonic_core::cayley::{BallFunction, CayleyGraph};
use harmonic_core::group::{AbelianGroup, GeneratingSet, GroupElement};
use harmonic_core::laplace::harmonic_space_dimension;
use harmonic_core::poly::{Monomial, PolyTorsionFunction, Shape};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn z_z2() -> AbelianGroup {
    AbelianGroup::new(2, vec![2]).unwrap()
}

fn element(g: &AbelianGroup, free: Vec<i64>, torsion: i64) -> GroupElement {
    g.element(free, vec![torsion]).unwrap()
}

fn small_element() -> impl Strategy<Value = (Vec<i64>, i64)> {
    (prop::collection::vec(-3i64..=3, 2), 0i64..2)
}

/// Random polynomial on `Z^2 ⊕ Z_2` of degree at most 3.
fn polynomial() -> impl Strategy<Value = Vec<(u32, u32, u64, i64)>> {
    prop::collection::vec((0u32..=2, 0u32..=1, 0u64..2, -5i64..=5), 1..6)
}

fn build(terms: &[(u32, u32, u64, i64)]) -> PolyTorsionFunction {
    let shape = Shape::new(2, vec![2]);
    let mut f = PolyTorsionFunction::zero(&shape);
    for &(a, b, t, c) in terms {
        f.add_term(Monomial { alpha: vec![a, b], torsion: vec![t] }, BigRational::from_integer(c.into()));
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shift_composes(p in polynomial(), a in small_element(), b in small_element()) {
        let g = z_z2();
        let f = build(&p);
        let (sa, sb) = (element(&g, a.0, a.1), element(&g, b.0, b.1));
        let lhs = f.shift(&sa).unwrap().shift(&sb).unwrap();
        prop_assert_eq!(lhs, f.shift(&g.add(&sa, &sb)).unwrap());
    }

    #[test]
    fn evaluate_commutes_with_shift(p in polynomial(), s in small_element(), x in small_element()) {
        let g = z_z2();
        let f = build(&p);
        let (s, x) = (element(&g, s.0, s.1), element(&g, x.0, x.1));
        prop_assert_eq!(f.shift(&s).unwrap().evaluate(&x).unwrap(), f.evaluate(&g.add(&x, &s)).unwrap());
    }

    #[test]
    fn opposite_differences_cancel(p in polynomial(), s in small_element()) {
        let g = z_z2();
        let f = build(&p);
        let s = element(&g, s.0, s.1);
        let forward = f.partial_difference(&s).unwrap();
        let back = f.shift(&s).unwrap().partial_difference(&g.neg(&s)).unwrap();
        prop_assert!(forward.add(&back).is_zero());
    }

    #[test]
    fn word_metric_is_invariant(x in small_element(), y in small_element(), z in small_element()) {
        let g = z_z2();
        let graph = CayleyGraph::standard(g.clone());
        let (x, y, z) = (element(&g, x.0, x.1), element(&g, y.0, y.1), element(&g, z.0, z.1));
        let dxy = graph.distance(&x, &y).unwrap();
        prop_assert_eq!(dxy, graph.distance(&g.add(&x, &z), &g.add(&y, &z)).unwrap());
        prop_assert_eq!(dxy, graph.distance(&y, &x).unwrap());
        prop_assert!(dxy <= graph.distance(&x, &z).unwrap() + graph.distance(&z, &y).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn harmonic_dimension_ignores_generating_set(
        extra in prop::collection::vec((prop::collection::vec(-2i64..=2, 2), 0i64..2), 0..3),
        k in 0u32..=3,
    ) {
        let g = z_z2();
        let mut half: Vec<GroupElement> = g.standard_generators().half().to_vec();
        half.extend(extra.into_iter().map(|(f, t)| element(&g, f, t)));
        let graph = CayleyGraph::new(g.clone(), GeneratingSet::symmetrize(&g, half)).unwrap();
        let r = harmonic_space_dimension(&graph, k as f64, 1).unwrap();
        let want = if k == 0 { 1 } else { 2 * k as usize + 1 };
        prop_assert_eq!(r.computed_dim, want);
        prop_assert!(r.torsion_constant);
    }

    #[test]
    fn dirichlet_is_linear_and_bounded(
        a in prop::collection::vec(-50i64..=50, 8),
        b in prop::collection::vec(-50i64..=50, 8),
        c in -4i64..=4,
    ) {
        let g = AbelianGroup::free(2).unwrap();
        let graph = CayleyGraph::standard(g.clone());
        let problem = DirichletProblem::on_ball(&graph, &g.zero(), 1).unwrap();
        prop_assert_eq!(problem.ball().boundary().len(), 8);
        let q = |v: &[i64]| -> Vec<BigRational> { v.iter().map(|&x| BigRational::new(x.into(), BigInt::from(7))).collect() };
        let (ba, bb) = (q(&a), q(&b));
        let c = BigRational::from_integer(c.into());
        let combo: Vec<BigRational> = ba.iter().zip(&bb).map(|(x, y)| &c * x + y).collect();
        let fa = problem.solve_exact(&ba, EliminationOrder::Natural).unwrap();
        let fb = problem.solve_exact(&bb, EliminationOrder::Natural).unwrap();
        let fc = problem.solve_exact(&combo, EliminationOrder::Reversed).unwrap();
        for i in 0..fa.values().len() {
            prop_assert_eq!(&fc.values()[i], &(&c * &fa.values()[i] + &fb.values()[i]));
        }
        let (lo, hi) = (ba.iter().min().unwrap(), ba.iter().max().unwrap());
        prop_assert!(fa.values().iter().all(|v| v >= lo && v <= hi));
        prop_assert!(problem.is_harmonic_exact(&fa));
    }
}

#[test]
fn ball_function_lookup_matches_closure_order() {
    let g = AbelianGroup::free(1).unwrap();
    let graph = CayleyGraph::standard(g.clone());
    let ball = Arc::new(graph.ball(&g.zero(), 2).unwrap());
    let f = BallFunction::from_fn(ball.clone(), |x| x.free[0] * 10);
    for (i, x) in ball.closure().iter().enumerate() {
        assert_eq!(f.values()[i], x.free[0] * 10);
        assert_eq!(f.get(x), Some(&(x.free[0] * 10)));
    }
    assert_eq!(f.get(&g.element(vec![4], vec![]).unwrap()), None);
}
