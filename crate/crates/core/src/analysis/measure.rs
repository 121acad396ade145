//! Seeded empirical estimates of the analytic constants at several scales.
//!
//! All balls are centered at the identity. Each trial draws its boundary data
//! from `ChaCha8Rng::seed_from_u64(seed)` on stream `(R << 32) | trial`, so a
//! report is a pure function of its inputs.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::dirichlet::DirichletProblem;
use crate::cayley::{BallFunction, CayleyGraph};
use crate::error::{Error, Result};
use crate::group::GroupElement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementKind {
    Harnack,
    Gradient,
    Poincare,
    Caccioppoli,
    MeanValue,
    OneSided,
}

impl MeasurementKind {
    pub const ALL: [MeasurementKind; 6] = [
        MeasurementKind::Harnack,
        MeasurementKind::Gradient,
        MeasurementKind::Poincare,
        MeasurementKind::Caccioppoli,
        MeasurementKind::MeanValue,
        MeasurementKind::OneSided,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MeasurementKind::Harnack => "harnack",
            MeasurementKind::Gradient => "gradient",
            MeasurementKind::Poincare => "poincare",
            MeasurementKind::Caccioppoli => "caccioppoli",
            MeasurementKind::MeanValue => "meanvalue",
            MeasurementKind::OneSided => "onesided",
        }
    }
}

impl fmt::Display for MeasurementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasurementKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown measurement kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementConfig {
    pub radii: Vec<u32>,
    /// Ratio between the solve ball and the inner ball where applicable.
    pub outer_factor: u32,
    pub trials: usize,
    pub seed: u64,
}

impl MeasurementConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            radii: vec![2, 4, 8, 16],
            outer_factor: 4,
            trials: 20,
            seed,
        }
    }
}

/// Worst case over the trials at one radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusMeasurement {
    pub radius: u32,
    pub constant: f64,
    /// Gradient only: `R · max_{B_1} |∇f| / osc f`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub secondary: Option<f64>,
    pub trials: usize,
    /// Trials whose ratio was `0/0`, reported as 0.
    pub degenerate: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementReport {
    pub kind: MeasurementKind,
    pub group: String,
    pub generators: usize,
    pub outer_factor: u32,
    pub trials: usize,
    pub seed: u64,
    pub rows: Vec<RadiusMeasurement>,
}

impl MeasurementReport {
    pub fn sup(&self) -> f64 {
        self.rows.iter().map(|r| r.constant).fold(0.0, f64::max)
    }

    pub fn at_radius(&self, radius: u32) -> Option<&RadiusMeasurement> {
        self.rows.iter().find(|r| r.radius == radius)
    }
}

/// `lhs / rhs` with the convention `0/0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRatio {
    pub value: f64,
    pub degenerate: bool,
}

impl EnergyRatio {
    pub fn new(lhs: f64, rhs: f64) -> Result<Self> {
        if rhs == 0.0 {
            if lhs == 0.0 {
                return Ok(Self {
                    value: 0.0,
                    degenerate: true,
                });
            }
            return Err(Error::Consistency(format!(
                "left side {lhs} is positive while the right side vanishes"
            )));
        }
        Ok(Self {
            value: lhs / rhs,
            degenerate: false,
        })
    }
}

/// Boundary data distribution for random trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryData {
    /// Uniform on `[1, 2]`.
    Positive,
    /// Uniform on `[-1, 1]`.
    Signed,
}

pub fn trial_rng(seed: u64, radius: u32, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((radius as u64) << 32) | trial as u64);
    rng
}

pub fn random_values(rng: &mut ChaCha8Rng, n: usize, data: BoundaryData) -> Vec<f64> {
    (0..n)
        .map(|_| match data {
            BoundaryData::Positive => rng.random_range(1.0..=2.0),
            BoundaryData::Signed => rng.random_range(-1.0..=1.0),
        })
        .collect()
}

/// `|∇f|^2 (x) = Σ_s (f(x+s) - f(x))^2`; `f` must be known on `B_1(x)`.
pub fn gradient_sq(graph: &CayleyGraph, f: &BallFunction<f64>, x: &GroupElement) -> Result<f64> {
    let fx = *f.at(x)?;
    graph.gens().elements().iter().try_fold(0.0, |acc, s| {
        let d = f.at(&graph.group().add(x, s))? - fx;
        Ok(acc + d * d)
    })
}

fn check_radius(f: &BallFunction<f64>, needed: u32) -> Result<()> {
    if f.ball().radius() < needed {
        return Err(Error::MissingValue(format!(
            "function known on a ball of radius {}, radius {needed} required",
            f.ball().radius()
        )));
    }
    Ok(())
}

/// `Σ_{B_R} (f - f_avg)^2` over `R^2 Σ |f(x) - f(y)|^2`, the second sum running
/// over ordered adjacent pairs of `B_{3R}` with edge multiplicity. `f` must be
/// given on a ball of radius at least `3R` around the center.
pub fn poincare_ratio(graph: &CayleyGraph, f: &BallFunction<f64>, radius: u32) -> Result<EnergyRatio> {
    check_radius(f, 3 * radius)?;
    let ball = f.ball();
    let v = f.values();
    let inner: Vec<usize> = ball.inner(radius).map(|(i, _)| i).collect();
    let avg = inner.iter().map(|&i| v[i]).sum::<f64>() / inner.len() as f64;
    let lhs: f64 = inner.iter().map(|&i| (v[i] - avg).powi(2)).sum();
    let outer = 3 * radius;
    let mut edges = 0.0;
    for (_, x) in ball.inner(outer) {
        let fx = *f.at(x)?;
        for s in graph.gens().elements() {
            let y = graph.group().add(x, s);
            if ball.distance_of(&y).is_some_and(|d| d <= outer) {
                edges += (f.at(&y)? - fx).powi(2);
            }
        }
    }
    EnergyRatio::new(lhs, (radius as f64).powi(2) * edges)
}

/// `Σ_{B_R} |∇f|^2` over `R^{-2} Σ_{B_{6R}} f^2`. `f` must be given on a ball
/// of radius at least `6R`.
pub fn caccioppoli_ratio(graph: &CayleyGraph, f: &BallFunction<f64>, radius: u32) -> Result<EnergyRatio> {
    check_radius(f, 6 * radius)?;
    let mut lhs = 0.0;
    for (_, x) in f.ball().inner(radius) {
        lhs += gradient_sq(graph, f, x)?;
    }
    let mass: f64 = f.ball().inner(6 * radius).map(|(i, _)| f.values()[i].powi(2)).sum();
    EnergyRatio::new(lhs, mass / (radius as f64).powi(2))
}

/// `f(p) |B_R| / Σ_{B_R} f` for nonnegative `f` given on a ball of radius at
/// least `R` around `p`.
pub fn mean_value_ratio(f: &BallFunction<f64>, radius: u32) -> Result<EnergyRatio> {
    check_radius(f, radius)?;
    let center = *f.at(f.ball().center())?;
    let (count, total) = f
        .ball()
        .inner(radius)
        .fold((0usize, 0.0), |(c, t), (i, _)| (c + 1, t + f.values()[i]));
    EnergyRatio::new(center * count as f64, total)
}

struct TrialOutcome {
    value: f64,
    secondary: Option<f64>,
    degenerate: bool,
}

impl TrialOutcome {
    fn plain(value: f64) -> Self {
        Self {
            value,
            secondary: None,
            degenerate: false,
        }
    }

    fn ratio(r: EnergyRatio) -> Self {
        Self {
            value: r.value,
            secondary: None,
            degenerate: r.degenerate,
        }
    }
}

fn solve_random(
    problem: &DirichletProblem,
    seed: u64,
    radius: u32,
    trial: usize,
    data: BoundaryData,
) -> Result<BallFunction<f64>> {
    let mut rng = trial_rng(seed, radius, trial);
    let b = random_values(&mut rng, problem.ball().boundary().len(), data);
    problem.solve_float(&b)
}

fn collect(radius: u32, outcomes: Vec<Result<TrialOutcome>>) -> Result<RadiusMeasurement> {
    let outcomes: Vec<TrialOutcome> = outcomes.into_iter().collect::<Result<_>>()?;
    let constant = outcomes.iter().map(|o| o.value).fold(0.0, f64::max);
    let secondary = outcomes
        .iter()
        .filter_map(|o| o.secondary)
        .reduce(f64::max);
    Ok(RadiusMeasurement {
        radius,
        constant,
        secondary,
        trials: outcomes.len(),
        degenerate: outcomes.iter().filter(|o| o.degenerate).count(),
    })
}

fn check_config(config: &MeasurementConfig) -> Result<()> {
    if config.trials == 0 {
        return Err(Error::Parse("at least one trial is required".into()));
    }
    if config.outer_factor < 2 {
        return Err(Error::Parse("outer factor must be at least 2".into()));
    }
    if config.radii.contains(&0) {
        return Err(Error::Parse("radii must be positive".into()));
    }
    Ok(())
}

/// `max_{B_R} f / min_{B_R} f` for `f > 0` harmonic on `B_{cR}`, worst over trials.
pub fn measure_harnack(graph: &CayleyGraph, radius: u32, config: &MeasurementConfig) -> Result<RadiusMeasurement> {
    let zero = graph.group().zero();
    let problem = DirichletProblem::on_ball(graph, &zero, config.outer_factor * radius)?;
    let outcomes = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let f = solve_random(&problem, config.seed, radius, t, BoundaryData::Positive)?;
            let (lo, hi) = f
                .ball()
                .inner(radius)
                .map(|(i, _)| f.values()[i])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            if lo <= 0.0 {
                return Err(Error::Consistency("positive boundary data gave a nonpositive solution".into()));
            }
            Ok(TrialOutcome::plain(hi / lo))
        })
        .collect();
    collect(radius, outcomes)
}

/// `R |∇f|(p) / f(p)` for `f > 0` harmonic on `B_{cR}`; the secondary column
/// records `R max_{B_1(p)} |∇f| / osc_{B_{cR}} f`.
pub fn measure_gradient_constant(
    graph: &CayleyGraph,
    radius: u32,
    config: &MeasurementConfig,
) -> Result<RadiusMeasurement> {
    let zero = graph.group().zero();
    let problem = DirichletProblem::on_ball(graph, &zero, config.outer_factor * radius)?;
    let near: Vec<GroupElement> = graph.ball(&zero, 1)?.members().to_vec();
    let r = radius as f64;
    let outcomes = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let f = solve_random(&problem, config.seed, radius, t, BoundaryData::Positive)?;
            let fp = *f.at(&zero)?;
            let k = r * gradient_sq(graph, &f, &zero)?.sqrt() / fp;
            let members = &f.values()[..f.ball().member_count()];
            let (lo, hi) = members
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            let osc = hi - lo;
            let mut g = 0.0f64;
            for y in &near {
                g = g.max(gradient_sq(graph, &f, y)?.sqrt());
            }
            let k2 = if osc > 0.0 { r * g / osc } else { 0.0 };
            Ok(TrialOutcome {
                value: k,
                secondary: Some(k2),
                degenerate: false,
            })
        })
        .collect();
    collect(radius, outcomes)
}

/// Energy-type constants: Poincaré, Caccioppoli and mean value.
pub fn measure_energy_constant(
    graph: &CayleyGraph,
    kind: MeasurementKind,
    radius: u32,
    config: &MeasurementConfig,
) -> Result<RadiusMeasurement> {
    let zero = graph.group().zero();
    match kind {
        MeasurementKind::Poincare => {
            let ball = std::sync::Arc::new(graph.ball(&zero, 3 * radius)?);
            let outcomes = (0..config.trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(config.seed, radius, t);
                    let v = random_values(&mut rng, ball.closure().len(), BoundaryData::Signed);
                    let f = BallFunction::new(std::sync::Arc::clone(&ball), v)?;
                    Ok(TrialOutcome::ratio(poincare_ratio(graph, &f, radius)?))
                })
                .collect();
            collect(radius, outcomes)
        }
        MeasurementKind::Caccioppoli => {
            let problem = DirichletProblem::on_ball(graph, &zero, 6 * radius)?;
            let outcomes = (0..config.trials)
                .into_par_iter()
                .map(|t| {
                    let f = solve_random(&problem, config.seed, radius, t, BoundaryData::Signed)?;
                    Ok(TrialOutcome::ratio(caccioppoli_ratio(graph, &f, radius)?))
                })
                .collect();
            collect(radius, outcomes)
        }
        MeasurementKind::MeanValue => {
            let problem = DirichletProblem::on_ball(graph, &zero, radius + 1)?;
            let inner = std::sync::Arc::new(graph.ball(&zero, radius)?);
            let seeds = convex_seeds(graph);
            let mut outcomes: Vec<Result<TrialOutcome>> = seeds
                .iter()
                .map(|seed| {
                    let f = BallFunction::from_fn(std::sync::Arc::clone(&inner), seed);
                    Ok(TrialOutcome::ratio(mean_value_ratio(&f, radius)?))
                })
                .collect();
            outcomes.par_extend((0..config.trials).into_par_iter().map(|t| {
                let h = solve_random(&problem, config.seed, radius, t, BoundaryData::Signed)?;
                let mut vals = Vec::with_capacity(inner.closure().len());
                for x in inner.closure() {
                    vals.push(gradient_sq(graph, &h, x)?);
                }
                let f = BallFunction::new(std::sync::Arc::clone(&inner), vals)?;
                Ok(TrialOutcome::ratio(mean_value_ratio(&f, radius)?))
            }));
            collect(radius, outcomes)
        }
        other => Err(Error::Parse(format!("{other} is not an energy constant"))),
    }
}

/// Nonnegative subharmonic polynomials used alongside the random trials.
fn convex_seeds(graph: &CayleyGraph) -> Vec<Box<dyn Fn(&GroupElement) -> f64 + Sync>> {
    if graph.group().free_rank() == 0 {
        return Vec::new();
    }
    vec![
        Box::new(|x: &GroupElement| (x.free[0] as f64).powi(2)),
        Box::new(|x: &GroupElement| (x.free[0] as f64 + 1.0).powi(2)),
        Box::new(|x: &GroupElement| 1.0 + x.free.iter().map(|&c| (c as f64).powi(2)).sum::<f64>()),
    ]
}

/// `max_{B_R} f / M` where `f` is harmonic on `B_{(c+1)R}` with `f(p) = 0` and
/// `M = -min f` over that ball. Trials with `M = 0` report 0.
pub fn verify_onesided_growth(
    graph: &CayleyGraph,
    radius: u32,
    config: &MeasurementConfig,
) -> Result<RadiusMeasurement> {
    let zero = graph.group().zero();
    let problem = DirichletProblem::on_ball(graph, &zero, (config.outer_factor + 1) * radius)?;
    let outcomes = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let f = solve_random(&problem, config.seed, radius, t, BoundaryData::Signed)?;
            let fp = *f.at(&zero)?;
            let members = &f.values()[..f.ball().member_count()];
            let m = -members.iter().map(|v| v - fp).fold(f64::INFINITY, f64::min);
            let top = f
                .ball()
                .inner(radius)
                .map(|(i, _)| f.values()[i] - fp)
                .fold(f64::NEG_INFINITY, f64::max);
            if m <= 0.0 {
                return Ok(TrialOutcome {
                    value: 0.0,
                    secondary: None,
                    degenerate: true,
                });
            }
            Ok(TrialOutcome::plain(top / m))
        })
        .collect();
    collect(radius, outcomes)
}

pub fn measure_at(
    graph: &CayleyGraph,
    kind: MeasurementKind,
    radius: u32,
    config: &MeasurementConfig,
) -> Result<RadiusMeasurement> {
    match kind {
        MeasurementKind::Harnack => measure_harnack(graph, radius, config),
        MeasurementKind::Gradient => measure_gradient_constant(graph, radius, config),
        MeasurementKind::OneSided => verify_onesided_growth(graph, radius, config),
        _ => measure_energy_constant(graph, kind, radius, config),
    }
}

/// Sweeps `config.radii` for one kind.
pub fn measure(graph: &CayleyGraph, kind: MeasurementKind, config: &MeasurementConfig) -> Result<MeasurementReport> {
    check_config(config)?;
    let rows = config
        .radii
        .iter()
        .map(|&r| measure_at(graph, kind, r, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasurementReport {
        kind,
        group: graph.group().to_string(),
        generators: graph.degree(),
        outer_factor: config.outer_factor,
        trials: config.trials,
        seed: config.seed,
        rows,
    })
}
