//! Dirichlet solves and empirical constant estimates on word-metric balls.

pub mod bochner;
pub mod dirichlet;
pub mod measure;
mod modular;

pub use bochner::{bochner_samples, random_rationals, BochnerSample};
pub use dirichlet::{
    solve_dirichlet, DirichletProblem, EliminationOrder, Solution, SolveMode, EXACT_VERTEX_LIMIT, FLOAT_RESIDUAL,
};
pub use measure::{
    caccioppoli_ratio, gradient_sq, mean_value_ratio, measure, measure_at, measure_energy_constant,
    measure_gradient_constant, measure_harnack, poincare_ratio, random_values, trial_rng, verify_onesided_growth, BoundaryData, EnergyRatio,
    MeasurementConfig, MeasurementKind, MeasurementReport, RadiusMeasurement,
};
