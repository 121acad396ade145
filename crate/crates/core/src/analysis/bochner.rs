//! Seeded Bochner samples: `L^S |∇f|^2 (x)` for Dirichlet-generated `f`
//! harmonic on `B_1(x)`, in both arithmetic modes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::dirichlet::{DirichletProblem, EliminationOrder};
use super::measure::{trial_rng, BoundaryData};
use crate::cayley::CayleyGraph;
use crate::error::Result;
use crate::laplace::{bochner_check, bochner_check_f64};

/// Radius of the solve ball; sample points lie in `B_{SOLVE_RADIUS - 1}`.
pub const SOLVE_RADIUS: u32 = 3;

/// Random rationals with denominator 1000, on `[1, 2]` or `[-1, 1]`.
pub fn random_rationals(rng: &mut ChaCha8Rng, n: usize, data: BoundaryData) -> Vec<BigRational> {
    let range = match data {
        BoundaryData::Positive => 1000i64..=2000,
        BoundaryData::Signed => -1000i64..=1000,
    };
    (0..n)
        .map(|_| BigRational::new(BigInt::from(rng.random_range(range.clone())), BigInt::from(1000)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BochnerSample {
    pub point: String,
    /// Exact `L^S |∇f|^2 (x)` as `p/q`.
    pub exact: String,
    pub exact_nonnegative: bool,
    pub float: f64,
    /// `max |f|^2` over the solve ball, the scale for the float tolerance.
    pub scale: f64,
}

/// Float values must satisfy `value ≥ -FLOAT_TOLERANCE · scale`.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

impl BochnerSample {
    pub fn float_ok(&self) -> bool {
        self.float >= -FLOAT_TOLERANCE * self.scale
    }
}

/// `count` samples; sample `i` uses stream `i` of `seed` for its boundary data
/// and its evaluation point.
pub fn bochner_samples(graph: &CayleyGraph, count: usize, seed: u64) -> Result<Vec<BochnerSample>> {
    let zero = graph.group().zero();
    let problem = DirichletProblem::on_ball(graph, &zero, SOLVE_RADIUS)?;
    let candidates: Vec<_> = problem.ball().inner(SOLVE_RADIUS - 1).map(|(_, x)| x.clone()).collect();
    (0..count)
        .map(|i| {
            let mut rng = trial_rng(seed, SOLVE_RADIUS, i);
            let b = random_rationals(&mut rng, problem.ball().boundary().len(), BoundaryData::Signed);
            let x = &candidates[rng.random_range(0..candidates.len())];
            let exact_f = problem.solve_exact(&b, EliminationOrder::Natural)?;
            let exact = bochner_check(graph, &exact_f, x)?;
            let bf: Vec<f64> = b.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
            let float_f = problem.solve_float(&bf)?;
            let scale = float_f.values().iter().fold(0.0f64, |a, v| a.max(v * v));
            let float = bochner_check_f64(graph, &float_f, x, 1e-10)?;
            Ok(BochnerSample {
                point: x.encode(),
                exact_nonnegative: crate::laplace::is_nonnegative(&exact),
                exact: crate::io::format_rational(&exact),
                float,
                scale,
            })
        })
        .collect()
}
