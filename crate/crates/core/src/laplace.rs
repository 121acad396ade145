//! The Laplacian `L^S` and its powers as exact linear maps on spaces of
//! polynomial-growth candidate functions, with kernel and rank computations.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::{BallFunction, CayleyGraph};
use crate::error::{Error, Result};
use crate::group::{project_to_free_part, AbelianGroup, GroupElement};
use crate::linalg::{rref, Matrix};
use crate::poly::{
    dim_polyharmonic, enumerate_basis, MonomialBasis, PolyTorsionFunction, Shape,
};

/// Shape of the functions living on the graph's group.
pub fn shape_of(graph: &CayleyGraph) -> Shape {
    let g = graph.group();
    Shape::new(g.free_rank(), g.torsion_orders().to_vec())
}

/// `L^{n,S} f`, with `L^S f = Σ_{s ∈ S} (f(· + s) - f)` counted with multiplicity.
pub fn apply_laplacian(
    graph: &CayleyGraph,
    f: &PolyTorsionFunction,
    n: u32,
) -> Result<PolyTorsionFunction> {
    if f.shape() != &shape_of(graph) {
        return Err(Error::ShapeMismatch(format!(
            "function does not live on {}",
            graph.group()
        )));
    }
    let mut cur = f.clone();
    for _ in 0..n {
        let mut next = PolyTorsionFunction::zero(f.shape());
        for s in graph.gens().elements() {
            if s.is_zero() {
                continue;
            }
            next = next.add(&cur.partial_difference(s)?);
        }
        cur = next;
    }
    Ok(cur)
}

/// An exact matrix between two monomial bases; column `j` holds the image of
/// domain basis element `j`.
#[derive(Debug, Clone)]
pub struct LinearMap {
    pub domain: MonomialBasis,
    pub codomain: MonomialBasis,
    pub matrix: Matrix,
}

impl LinearMap {
    /// Builds the matrix of `op` column by column.
    pub fn from_operator<F>(domain: MonomialBasis, codomain: MonomialBasis, op: F) -> Result<Self>
    where
        F: Fn(&PolyTorsionFunction) -> Result<PolyTorsionFunction> + Sync,
    {
        let columns: Vec<Vec<BigRational>> = (0..domain.len())
            .into_par_iter()
            .map(|j| {
                let image = op(&domain.function(j))?;
                image.coordinates(&codomain).ok_or_else(|| {
                    Error::OutsideCodomain(format!(
                        "image of basis element {j} has degree {:?}, codomain degree {:?}",
                        image.degree(),
                        codomain.max_degree()
                    ))
                })
            })
            .collect::<Result<_>>()?;
        let matrix = Matrix::from_columns(codomain.len(), &columns);
        Ok(Self {
            domain,
            codomain,
            matrix,
        })
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// Applies the map to a function expressed in the domain basis.
    pub fn apply(&self, f: &PolyTorsionFunction) -> Option<PolyTorsionFunction> {
        let coords = f.coordinates(&self.domain)?;
        Some(PolyTorsionFunction::from_coordinates(
            &self.codomain,
            &self.matrix.mul_vec(&coords),
        ))
    }
}

/// Matrix of `L^{n,S}` on `P^k ⊗ F(G_2)`.
///
/// For torsion-free groups the codomain is `P^{k-2n}` (the zero space when
/// `k < 2n`); an image outside it means `S` is not symmetric. With torsion the
/// codomain is `P^k ⊗ F(G_2)` itself, because torsion shifts do not lower the
/// free degree of slice-varying functions.
pub fn assemble_matrix(graph: &CayleyGraph, k: u32, n: u32) -> Result<LinearMap> {
    let shape = shape_of(graph);
    let domain = enumerate_basis(&shape, k)?;
    let codomain = if shape.torsion_orders.is_empty() {
        let drop = 2 * n;
        if k >= drop {
            enumerate_basis(&shape, k - drop)?
        } else {
            MonomialBasis::zero_space(&shape)
        }
    } else {
        domain.clone()
    };
    LinearMap::from_operator(domain, codomain, |f| apply_laplacian(graph, f, n))
}

/// Matrix of the partial difference `δ_s` on `P^k ⊗ F(G_2)`.
pub fn difference_matrix(graph: &CayleyGraph, s: &GroupElement, k: u32) -> Result<LinearMap> {
    let shape = shape_of(graph);
    let domain = enumerate_basis(&shape, k)?;
    LinearMap::from_operator(domain.clone(), domain, |f| f.partial_difference(s))
}

/// Canonical kernel basis of a [`LinearMap`].
#[derive(Debug, Clone)]
pub struct KernelBasis {
    pub functions: Vec<PolyTorsionFunction>,
    /// Row-reduced coordinates in the domain basis, one row per function.
    pub coordinates: Vec<Vec<BigRational>>,
}

impl KernelBasis {
    pub fn dimension(&self) -> usize {
        self.functions.len()
    }

    pub fn is_torsion_constant(&self) -> bool {
        self.functions.iter().all(PolyTorsionFunction::is_torsion_constant)
    }
}

pub fn kernel_basis(map: &LinearMap) -> KernelBasis {
    let coordinates = map.matrix.nullspace();
    let functions = coordinates
        .iter()
        .map(|c| PolyTorsionFunction::from_coordinates(&map.domain, c))
        .collect();
    KernelBasis {
        functions,
        coordinates,
    }
}

/// Outcome of [`harmonic_space_dimension`].
#[derive(Debug, Clone, Serialize)]
pub struct DimensionReport {
    pub degree: u32,
    pub order: u32,
    pub computed_dim: usize,
    pub expected_dim: usize,
    pub torsion_constant: bool,
    pub surjective: bool,
    /// Rank of `L^{n,S}` restricted to torsion-constant functions.
    pub restricted_rank: usize,
    #[serde(skip)]
    pub kernel: KernelBasis,
}

impl DimensionReport {
    pub fn matches(&self) -> bool {
        self.computed_dim == self.expected_dim
    }
}

/// Reference dimension of the `n`-harmonic functions of growth order `k`.
/// Pure torsion groups only carry constants.
pub fn expected_dimension(group: &AbelianGroup, k: u32, n: u32) -> usize {
    if group.free_rank() == 0 {
        1
    } else {
        dim_polyharmonic(group.free_rank(), k, n) as usize
    }
}

/// Computes the nullity of `L^{n,S}` on `P^{⌊d⌋} ⊗ F(G_2)` and compares it to
/// the closed form. `surjective` refers to the torsion-constant restriction
/// `P^k_m → P^{k-2n}_m` (vacuously true when `k < 2n`).
pub fn harmonic_space_dimension(graph: &CayleyGraph, d: f64, n: u32) -> Result<DimensionReport> {
    if d.is_nan() || d < 0.0 || !d.is_finite() {
        return Err(Error::Parse(format!("growth order {d} must be a finite number ≥ 0")));
    }
    if n == 0 {
        return Err(Error::Parse("order must be at least 1".into()));
    }
    let k = d.floor() as u32;
    let map = assemble_matrix(graph, k, n)?;
    let kernel = kernel_basis(&map);
    let group = graph.group();
    let m = group.free_rank();

    let (restricted_rank, surjective) = if m == 0 {
        (0, k < 2 * n)
    } else if group.is_torsion_free() {
        let r = map.rank();
        (r, r == map.codomain.len())
    } else {
        let free = CayleyGraph::new(AbelianGroup::free(m)?, project_to_free_part(graph.gens()))?;
        let restricted = assemble_matrix(&free, k, n)?;
        let r = restricted.rank();
        (r, r == restricted.codomain.len())
    };

    Ok(DimensionReport {
        degree: k,
        order: n,
        computed_dim: kernel.dimension(),
        expected_dim: expected_dimension(group, k, n),
        torsion_constant: kernel.is_torsion_constant(),
        surjective,
        restricted_rank,
        kernel,
    })
}

/// Rank of `δ_{e_1}` from the harmonic polynomials of degree `≤ k` into
/// those of degree `≤ k - 1`, together with `dim D^{k-1}`. Torsion-free only.
pub fn difference_rank_on_harmonics(graph: &CayleyGraph, k: u32) -> Result<(usize, usize)> {
    let group = graph.group();
    if !group.is_torsion_free() || group.free_rank() == 0 || k == 0 {
        return Err(Error::ShapeMismatch(
            "difference rank needs a torsion-free group and k ≥ 1".into(),
        ));
    }
    let upper = kernel_basis(&assemble_matrix(graph, k, 1)?);
    let lower_map = assemble_matrix(graph, k - 1, 1)?;
    let lower = kernel_basis(&lower_map);
    let e1 = group.free_unit(0);
    let mut images = Vec::with_capacity(upper.dimension());
    for f in &upper.functions {
        let img = f.partial_difference(&e1)?;
        // δ_1 commutes with L^S, so the image is again harmonic.
        if !apply_laplacian(graph, &img, 1)?.is_zero() {
            return Err(Error::Consistency("δ_1 image is not harmonic".into()));
        }
        images.push(img.coordinates(&lower_map.domain).ok_or_else(|| {
            Error::Consistency("δ_1 did not lower the degree".into())
        })?);
    }
    let rank = rref(&images, lower_map.domain.len()).rank();
    Ok((rank, lower.dimension()))
}

fn laplacian_at<T>(graph: &CayleyGraph, f: &BallFunction<T>, y: &GroupElement) -> Result<T>
where
    T: Clone + Zero + for<'a> std::ops::Sub<&'a T, Output = T>,
{
    let fy = f.at(y)?.clone();
    let mut acc = T::zero();
    for s in graph.gens().elements() {
        let z = graph.group().add(y, s);
        acc = acc + (f.at(&z)?.clone() - &fy);
    }
    Ok(acc)
}

fn grad_sq_at<T>(graph: &CayleyGraph, f: &BallFunction<T>, y: &GroupElement) -> Result<T>
where
    T: Clone + Zero + for<'a> std::ops::Sub<&'a T, Output = T> + std::ops::Mul<Output = T>,
{
    let fy = f.at(y)?.clone();
    let mut acc = T::zero();
    for s in graph.gens().elements() {
        let z = graph.group().add(y, s);
        let d = f.at(&z)?.clone() - &fy;
        acc = acc + d.clone() * d;
    }
    Ok(acc)
}

/// `L^S |∇f|^2 (x)` without any harmonicity check. Needs `f` on `B_2(x)`.
pub fn laplacian_of_gradient_sq<T>(graph: &CayleyGraph, f: &BallFunction<T>, x: &GroupElement) -> Result<T>
where
    T: Clone + Zero + for<'a> std::ops::Sub<&'a T, Output = T> + std::ops::Mul<Output = T>,
{
    let gx = grad_sq_at(graph, f, x)?;
    let mut acc = T::zero();
    for s in graph.gens().elements() {
        let y = graph.group().add(x, s);
        acc = acc + (grad_sq_at(graph, f, &y)? - &gx);
    }
    Ok(acc)
}

/// Exact `L^S |∇f|^2 (x)` for `f` harmonic at every point of `B_1(x)`.
///
/// The harmonicity hypothesis is checked at `x` and at each `x + s`; `f` must
/// therefore be known on `B_2(x)`.
pub fn bochner_check(
    graph: &CayleyGraph,
    f: &BallFunction<BigRational>,
    x: &GroupElement,
) -> Result<BigRational> {
    for y in std::iter::once(x.clone()).chain(graph.gens().elements().iter().map(|s| graph.group().add(x, s))) {
        if !laplacian_at(graph, f, &y)?.is_zero() {
            return Err(Error::NotHarmonic(y.to_string()));
        }
    }
    laplacian_of_gradient_sq(graph, f, x)
}

/// Floating-point variant of [`bochner_check`]; harmonicity is accepted up to
/// `tol` in absolute value.
pub fn bochner_check_f64(graph: &CayleyGraph, f: &BallFunction<f64>, x: &GroupElement, tol: f64) -> Result<f64> {
    for y in std::iter::once(x.clone()).chain(graph.gens().elements().iter().map(|s| graph.group().add(x, s))) {
        if laplacian_at(graph, f, &y)?.abs() > tol {
            return Err(Error::NotHarmonic(y.to_string()));
        }
    }
    laplacian_of_gradient_sq(graph, f, x)
}

/// Per-generator pieces of the Bochner identity at `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct BochnerTerm {
    /// `L^S |δ_{s_i} f|^2 (x)`.
    pub laplacian: BigRational,
    /// `(1/♯S) [Σ_{y∼x} δ_{s_i} f(y)]^2 - ♯S |δ_{s_i} f|^2 (x)`, the Cauchy-Schwarz
    /// lower bound for `laplacian`; zero when `f` is harmonic at `x` and `x + s_i`.
    pub lower_bound: BigRational,
}

/// Splits `L^S |∇f|^2 (x) = Σ_i L^S |δ_{s_i} f|^2 (x)` and evaluates the lower
/// bound for each summand.
pub fn bochner_terms(
    graph: &CayleyGraph,
    f: &BallFunction<BigRational>,
    x: &GroupElement,
) -> Result<Vec<BochnerTerm>> {
    let g = graph.group();
    let deg = BigRational::from_integer(graph.degree().into());
    let delta = |si: &GroupElement, y: &GroupElement| -> Result<BigRational> {
        Ok(f.at(&g.add(y, si))?.clone() - f.at(y)?)
    };
    graph
        .gens()
        .elements()
        .iter()
        .map(|si| {
            let dx = delta(si, x)?;
            let dx2 = &dx * &dx;
            let mut lap = BigRational::zero();
            let mut sum = BigRational::zero();
            for s in graph.gens().elements() {
                let y = g.add(x, s);
                let dy = delta(si, &y)?;
                lap += &dy * &dy - &dx2;
                sum += dy;
            }
            let lower_bound = &sum * &sum / &deg - &deg * &dx2;
            Ok(BochnerTerm {
                laplacian: lap,
                lower_bound,
            })
        })
        .collect()
}

/// True when the value is nonnegative.
pub fn is_nonnegative(v: &BigRational) -> bool {
    !v.is_negative()
}
