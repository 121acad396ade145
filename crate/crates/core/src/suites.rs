//! Grids of exact checks, one row per grid point.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::analysis::bochner_samples;
use crate::cayley::CayleyGraph;
use crate::error::{Error, Result};
use crate::group::{AbelianGroup, GeneratingSet};
use crate::laplace::{difference_rank_on_harmonics, harmonic_space_dimension};
use crate::poly::{dim_harmonic_polynomials, dim_polynomials, harmonic_recursion_holds, polynomial_recursion_holds};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Theorem1_2,
    Theorem1_4,
    Theorem1_5,
    Corollary5_4,
    Bochner,
    DimRecursions,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Theorem1_2,
        Suite::Theorem1_4,
        Suite::Theorem1_5,
        Suite::Corollary5_4,
        Suite::Bochner,
        Suite::DimRecursions,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Theorem1_2 => "theorem1_2",
            Suite::Theorem1_4 => "theorem1_4",
            Suite::Theorem1_5 => "theorem1_5",
            Suite::Corollary5_4 => "corollary5_4",
            Suite::Bochner => "bochner",
            Suite::DimRecursions => "dim_recursions",
        }
    }

    fn defaults(self) -> (usize, u32, u32) {
        match self {
            Suite::Theorem1_2 => (2, 3, 1),
            Suite::Theorem1_4 => (3, 5, 1),
            Suite::Theorem1_5 => (2, 5, 3),
            Suite::Corollary5_4 => (3, 5, 1),
            Suite::Bochner => (3, 0, 1),
            Suite::DimRecursions => (6, 10, 1),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuiteLimits {
    pub max_rank: Option<usize>,
    pub max_degree: Option<u32>,
    pub max_order: Option<u32>,
    /// Bochner only.
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRow {
    pub m: usize,
    pub torsion: String,
    pub gens: String,
    /// Degree, or the sample index in the Bochner suite.
    pub k: u32,
    /// Laplacian order; 0 for pure dimension identities.
    pub n: u32,
    pub check: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

fn torsion_label(g: &AbelianGroup) -> String {
    g.torsion_orders()
        .iter()
        .map(|q| q.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn graphs(g: &AbelianGroup) -> Result<Vec<(String, CayleyGraph)>> {
    GeneratingSet::catalogue(g)
        .into_iter()
        .map(|(name, s)| Ok((name, CayleyGraph::new(g.clone(), s)?)))
        .collect()
}

/// Torsion groups and their free ranks used by the torsion-constancy suite.
pub fn torsion_groups() -> Vec<AbelianGroup> {
    [(1, vec![2]), (1, vec![3]), (2, vec![2]), (1, vec![2, 2])]
        .into_iter()
        .map(|(m, t)| AbelianGroup::new(m, t).expect("valid group"))
        .collect()
}

pub fn run_suite(suite: Suite, limits: &SuiteLimits) -> Result<Vec<SuiteRow>> {
    let (rank, degree, order) = suite.defaults();
    let max_rank = limits.max_rank.unwrap_or(rank);
    let max_degree = limits.max_degree.unwrap_or(degree);
    let max_order = limits.max_order.unwrap_or(order);
    let mut rows = Vec::new();
    match suite {
        Suite::Theorem1_4 | Suite::Theorem1_5 => {
            let orders = if suite == Suite::Theorem1_4 { 1..=1 } else { 1..=max_order };
            for m in 1..=max_rank {
                let g = AbelianGroup::free(m)?;
                for (name, graph) in graphs(&g)? {
                    for k in 0..=max_degree {
                        for n in orders.clone() {
                            let r = harmonic_space_dimension(&graph, k as f64, n)?;
                            rows.push(SuiteRow {
                                m,
                                torsion: String::new(),
                                gens: name.clone(),
                                k,
                                n,
                                check: "kernel dimension".into(),
                                expected: r.expected_dim.to_string(),
                                computed: r.computed_dim.to_string(),
                                pass: r.matches(),
                            });
                        }
                    }
                }
            }
        }
        Suite::Theorem1_2 => {
            for g in torsion_groups().into_iter().filter(|g| g.free_rank() <= max_rank) {
                for (name, graph) in graphs(&g)? {
                    for k in 0..=max_degree {
                        let r = harmonic_space_dimension(&graph, k as f64, 1)?;
                        let free = dim_harmonic_polynomials(g.free_rank(), k);
                        rows.push(SuiteRow {
                            m: g.free_rank(),
                            torsion: torsion_label(&g),
                            gens: name.clone(),
                            k,
                            n: 1,
                            check: "torsion-constant kernel".into(),
                            expected: format!("{free} torsion-constant"),
                            computed: format!(
                                "{}{}",
                                r.computed_dim,
                                if r.torsion_constant { " torsion-constant" } else { " torsion-varying" }
                            ),
                            pass: r.torsion_constant && r.computed_dim as u128 == free,
                        });
                    }
                }
            }
        }
        Suite::Corollary5_4 => {
            for m in 1..=max_rank {
                let g = AbelianGroup::free(m)?;
                for (name, graph) in graphs(&g)? {
                    for k in 2..=max_degree {
                        let r = harmonic_space_dimension(&graph, k as f64, 1)?;
                        let target = dim_polynomials(m, k - 2);
                        rows.push(SuiteRow {
                            m,
                            torsion: String::new(),
                            gens: name.clone(),
                            k,
                            n: 1,
                            check: "rank L onto P^{k-2}".into(),
                            expected: target.to_string(),
                            computed: r.restricted_rank.to_string(),
                            pass: r.restricted_rank as u128 == target,
                        });
                        let (rank, dim) = difference_rank_on_harmonics(&graph, k)?;
                        rows.push(SuiteRow {
                            m,
                            torsion: String::new(),
                            gens: name.clone(),
                            k,
                            n: 1,
                            check: "rank delta_1 onto D^{k-1}".into(),
                            expected: dim.to_string(),
                            computed: rank.to_string(),
                            pass: rank == dim,
                        });
                    }
                }
            }
        }
        Suite::Bochner => {
            let seed = limits
                .seed
                .ok_or_else(|| Error::Parse("the bochner suite needs an explicit seed".into()))?;
            let samples = limits.samples.unwrap_or(100);
            for m in 2..=max_rank.max(2) {
                let graph = CayleyGraph::standard(AbelianGroup::free(m)?);
                for (i, s) in bochner_samples(&graph, samples, seed)?.into_iter().enumerate() {
                    rows.push(SuiteRow {
                        m,
                        torsion: String::new(),
                        gens: "standard".into(),
                        k: i as u32,
                        n: 1,
                        check: format!("L|grad f|^2 at {}", s.point),
                        expected: ">= 0".into(),
                        computed: format!("{} (float {:e})", s.exact, s.float),
                        pass: s.exact_nonnegative && s.float_ok(),
                    });
                }
            }
        }
        Suite::DimRecursions => {
            for m in 1..=max_rank {
                for k in 1..=max_degree {
                    if m >= 2 {
                        let lhs = dim_harmonic_polynomials(m, k);
                        let rhs = dim_harmonic_polynomials(m - 1, k) + dim_harmonic_polynomials(m, k - 1);
                        rows.push(SuiteRow {
                            m,
                            torsion: String::new(),
                            gens: String::new(),
                            k,
                            n: 0,
                            check: "R^k_m = R^k_{m-1} + R^{k-1}_m".into(),
                            expected: lhs.to_string(),
                            computed: rhs.to_string(),
                            pass: harmonic_recursion_holds(m, k),
                        });
                    }
                    if k >= 2 {
                        let lhs = dim_polynomials(m, k);
                        let rhs = dim_harmonic_polynomials(m, k) + dim_polynomials(m, k - 2);
                        rows.push(SuiteRow {
                            m,
                            torsion: String::new(),
                            gens: String::new(),
                            k,
                            n: 0,
                            check: "P^k_m = R^k_m + P^{k-2}_m".into(),
                            expected: lhs.to_string(),
                            computed: rhs.to_string(),
                            pass: polynomial_recursion_holds(m, k),
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}
