//! Dirichlet problem on a word-metric ball: find `f` on `B̄_r` with prescribed
//! boundary values and `L^S f = 0` at every member of `B_r`.
//!
//! The linear system is `deg · f(x) - Σ_{y ∼ x, y ∈ B_r} f(y) = Σ_{y ∼ x, y ∈ ∂B_r} f(y)`
//! with edge multiplicities, where `deg` counts the nonzero generators (self-loops
//! cancel). It is symmetric positive definite whenever the boundary is nonempty.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::cayley::{Ball, BallFunction, CayleyGraph};
use crate::error::{Error, Result};
use crate::group::GroupElement;

use super::modular;

/// Balls up to this many members are solved exactly in [`SolveMode::Auto`].
pub const EXACT_VERTEX_LIMIT: usize = 5000;

/// Residual target of the floating-point solver, relative to `max |boundary|`.
pub const FLOAT_RESIDUAL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    Exact,
    Float,
    /// Exact up to [`EXACT_VERTEX_LIMIT`] members, floating point above.
    Auto,
}

/// Pivot order for the exact elimination. Both orders give the same
/// solution; comparing them is a uniqueness check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EliminationOrder {
    /// Breadth-first order from the center.
    #[default]
    Natural,
    Reversed,
}

/// A solution in the mode it was computed in.
#[derive(Debug, Clone)]
pub enum Solution {
    Exact(BallFunction<BigRational>),
    Float(BallFunction<f64>),
}

impl Solution {
    pub fn to_f64(&self) -> BallFunction<f64> {
        match self {
            Solution::Exact(f) => f.map(|v| v.to_f64().unwrap_or(f64::NAN)),
            Solution::Float(f) => f.clone(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Solution::Exact(_))
    }
}

/// Precomputed adjacency of a ball for repeated solves.
#[derive(Debug, Clone)]
pub struct DirichletProblem {
    ball: Arc<Ball>,
    /// Per member: closure indices of `x + s` for every nonzero `s ∈ S`.
    neighbors: Vec<Vec<usize>>,
    degree: usize,
}

impl DirichletProblem {
    pub fn new(graph: &CayleyGraph, ball: Arc<Ball>) -> Result<Self> {
        if ball.boundary().is_empty() {
            return Err(Error::EmptyBoundary);
        }
        let zero_loops: Vec<bool> = graph.gens().elements().iter().map(|s| s.is_zero()).collect();
        let neighbors: Vec<Vec<usize>> = ball
            .neighbor_table(graph)
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .zip(&zero_loops)
                    .filter(|(_, &z)| !z)
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        let degree = zero_loops.iter().filter(|&&z| !z).count();
        Ok(Self {
            ball,
            neighbors,
            degree,
        })
    }

    /// Solves on `B_radius(center)`.
    pub fn on_ball(graph: &CayleyGraph, center: &GroupElement, radius: u32) -> Result<Self> {
        Self::new(graph, Arc::new(graph.ball(center, radius)?))
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    pub fn shared_ball(&self) -> Arc<Ball> {
        Arc::clone(&self.ball)
    }

    fn members(&self) -> usize {
        self.ball.member_count()
    }

    /// Boundary values keyed by element, reordered to match `ball.boundary()`.
    pub fn boundary_vector<T: Clone>(&self, values: &HashMap<GroupElement, T>) -> Result<Vec<T>> {
        self.ball
            .boundary()
            .iter()
            .map(|z| {
                values
                    .get(z)
                    .cloned()
                    .ok_or_else(|| Error::MissingValue(z.to_string()))
            })
            .collect()
    }

    pub fn solve_exact(
        &self,
        boundary: &[BigRational],
        order: EliminationOrder,
    ) -> Result<BallFunction<BigRational>> {
        let n = self.members();
        if boundary.len() != self.ball.boundary().len() {
            return Err(Error::ShapeMismatch("boundary vector length".into()));
        }
        // Integer system A y = D b with D the common boundary denominator.
        let den = boundary.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let scaled: Vec<BigInt> = boundary.iter().map(|v| v.numer() * (&den / v.denom())).collect();
        let order: Vec<usize> = match order {
            EliminationOrder::Natural => (0..n).collect(),
            EliminationOrder::Reversed => (0..n).rev().collect(),
        };
        let mut position = vec![0usize; n];
        for (pos, &i) in order.iter().enumerate() {
            position[i] = pos;
        }
        let mut rows: Vec<Vec<(usize, i64)>> = Vec::with_capacity(n);
        let mut rhs: Vec<BigInt> = Vec::with_capacity(n);
        for &i in &order {
            let mut row: BTreeMap<usize, i64> = BTreeMap::new();
            row.insert(position[i], self.degree as i64);
            let mut c = BigInt::zero();
            for &j in &self.neighbors[i] {
                if j < n {
                    *row.entry(position[j]).or_insert(0) -= 1;
                } else {
                    c += &scaled[j - n];
                }
            }
            rows.push(row.into_iter().filter(|&(_, v)| v != 0).collect());
            rhs.push(c);
        }
        let (num, d) = modular::solve_spd(&rows, &rhs)
            .ok_or_else(|| Error::Consistency("exact Dirichlet solve did not certify".into()))?;
        let total = d * &den;
        let mut x: Vec<BigRational> = (0..n)
            .map(|i| BigRational::new(num[position[i]].clone(), total.clone()))
            .collect();
        x.extend(boundary.iter().cloned());
        BallFunction::new(self.shared_ball(), x)
    }

    /// Conjugate gradients on the interior system. The residual
    /// `max_x |L^S f(x)|` is driven below `FLOAT_RESIDUAL · max |boundary|`.
    pub fn solve_float(&self, boundary: &[f64]) -> Result<BallFunction<f64>> {
        let n = self.members();
        if boundary.len() != self.ball.boundary().len() {
            return Err(Error::ShapeMismatch("boundary vector length".into()));
        }
        if boundary.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("boundary values must be finite".into()));
        }
        let scale = boundary.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let tol = FLOAT_RESIDUAL * scale;
        let deg = self.degree as f64;

        let mut b = vec![0.0; n];
        for (i, nbrs) in self.neighbors.iter().enumerate() {
            b[i] = nbrs.iter().filter(|&&j| j >= n).map(|&j| boundary[j - n]).sum();
        }
        let apply = |v: &[f64], out: &mut [f64]| {
            for (i, nbrs) in self.neighbors.iter().enumerate() {
                let mut s = deg * v[i];
                for &j in nbrs {
                    if j < n {
                        s -= v[j];
                    }
                }
                out[i] = s;
            }
        };
        let mean = boundary.iter().sum::<f64>() / boundary.len() as f64;
        let mut x = vec![mean; n];
        let mut ax = vec![0.0; n];
        apply(&x, &mut ax);
        let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let mut p = r.clone();
        let mut rr: f64 = r.iter().map(|v| v * v).sum();
        let mut ap = vec![0.0; n];
        let max_iter = 20 * n + 1000;
        let mut iterations = 0;
        let inf_norm = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        while inf_norm(&r) > tol && iterations < max_iter {
            apply(&p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap <= 0.0 {
                break;
            }
            let alpha = rr / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            iterations += 1;
            // Refresh the recursive residual now and then to avoid drift.
            if iterations % 200 == 0 {
                apply(&x, &mut ax);
                for i in 0..n {
                    r[i] = b[i] - ax[i];
                }
            }
            let rr_new: f64 = r.iter().map(|v| v * v).sum();
            let beta = rr_new / rr;
            rr = rr_new;
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
            }
        }
        apply(&x, &mut ax);
        let residual = b.iter().zip(&ax).fold(0.0f64, |a, (b, v)| a.max((b - v).abs()));
        if residual > tol {
            return Err(Error::NoConvergence {
                residual,
                iterations,
            });
        }
        x.extend_from_slice(boundary);
        BallFunction::new(self.shared_ball(), x)
    }

    pub fn solve(&self, boundary: &[BigRational], mode: SolveMode) -> Result<Solution> {
        let exact = match mode {
            SolveMode::Exact => true,
            SolveMode::Float => false,
            SolveMode::Auto => self.members() <= EXACT_VERTEX_LIMIT,
        };
        if exact {
            Ok(Solution::Exact(self.solve_exact(boundary, EliminationOrder::Natural)?))
        } else {
            let b: Vec<f64> = boundary.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
            Ok(Solution::Float(self.solve_float(&b)?))
        }
    }

    /// `max_x |L^S f(x)|` over the members.
    pub fn residual(&self, f: &BallFunction<f64>) -> f64 {
        let v = f.values();
        let deg = self.degree as f64;
        self.neighbors
            .iter()
            .enumerate()
            .map(|(i, nbrs)| (nbrs.iter().map(|&j| v[j]).sum::<f64>() - deg * v[i]).abs())
            .fold(0.0, f64::max)
    }

    /// True when `L^S f(x) = 0` exactly at every member.
    pub fn is_harmonic_exact(&self, f: &BallFunction<BigRational>) -> bool {
        let v = f.values();
        let deg = BigRational::from_integer(self.degree.into());
        self.neighbors.iter().enumerate().all(|(i, nbrs)| {
            let s = nbrs
                .iter()
                .fold(BigRational::zero(), |acc, &j| acc + &v[j]);
            s == &deg * &v[i]
        })
    }
}

/// Solves the Dirichlet problem on `ball` with boundary values keyed by element.
pub fn solve_dirichlet(
    graph: &CayleyGraph,
    ball: Arc<Ball>,
    boundary_values: &HashMap<GroupElement, BigRational>,
    mode: SolveMode,
) -> Result<Solution> {
    let problem = DirichletProblem::new(graph, ball)?;
    let b = problem.boundary_vector(boundary_values)?;
    problem.solve(&b, mode)
}
