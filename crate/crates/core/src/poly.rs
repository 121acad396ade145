//! Polynomial-growth candidate functions on `Z^m ⊕ G_2`: polynomials in the
//! free coordinates whose coefficients depend on the torsion component.
//!
//! A basis element `(α, t)` is the function `x ↦ x^α · [x_torsion = t]`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::group::GroupElement;

/// Default cap on the number of basis elements.
pub const DEFAULT_BASIS_BUDGET: usize = 200_000;

/// A monomial `x^α` restricted to the torsion slice `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub alpha: Vec<u32>,
    pub torsion: Vec<u64>,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.alpha.iter().sum()
    }
}

impl Ord for Monomial {
    // Graded-lex on α (x before y within a degree), then lex on the slice.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.alpha.cmp(&self.alpha))
            .then_with(|| self.torsion.cmp(&other.torsion))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Free rank and torsion orders of the group a function lives on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    pub free_rank: usize,
    pub torsion_orders: Vec<u64>,
}

impl Shape {
    pub fn new(free_rank: usize, torsion_orders: Vec<u64>) -> Self {
        Self {
            free_rank,
            torsion_orders,
        }
    }

    pub fn torsion_free(&self) -> Shape {
        Shape::new(self.free_rank, Vec::new())
    }

    fn admits(&self, x: &GroupElement) -> bool {
        x.free.len() == self.free_rank && x.torsion.len() == self.torsion_orders.len()
    }

    /// Every torsion element in lexicographic order.
    pub fn torsion_elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for &q in &self.torsion_orders {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..q).map(move |t| {
                        let mut v = prefix.clone();
                        v.push(t);
                        v
                    })
                })
                .collect();
        }
        out
    }
}

/// Ordered basis of `P^k_m ⊗ F(G_2)`; `max_degree = None` is the zero space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    shape: Shape,
    max_degree: Option<u32>,
    elements: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

/// Multi-indices of total degree exactly `d` in `m` variables, lex-descending.
fn multi_indices(m: usize, d: u32) -> Vec<Vec<u32>> {
    if m == 0 {
        return if d == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for rest in multi_indices(m - 1, d - first) {
            let mut v = Vec::with_capacity(m);
            v.push(first);
            v.extend(rest);
            out.push(v);
        }
    }
    out
}

/// Deterministic graded-lex basis of `P^k_m ⊗ F(G_2)`.
pub fn enumerate_basis(shape: &Shape, k: u32) -> Result<MonomialBasis> {
    enumerate_basis_with_budget(shape, k, DEFAULT_BASIS_BUDGET)
}

pub fn enumerate_basis_with_budget(shape: &Shape, k: u32, budget: usize) -> Result<MonomialBasis> {
    let free_dim = dim_polynomials(shape.free_rank, k);
    let torsion: usize = shape.torsion_orders.iter().map(|&q| q as usize).product();
    let needed = (free_dim as usize).saturating_mul(torsion);
    if needed > budget {
        return Err(Error::BasisBudget { needed, budget });
    }
    let slices = shape.torsion_elements();
    let mut elements = Vec::with_capacity(needed);
    for d in 0..=k {
        for alpha in multi_indices(shape.free_rank, d) {
            for t in &slices {
                elements.push(Monomial {
                    alpha: alpha.clone(),
                    torsion: t.clone(),
                });
            }
        }
    }
    Ok(MonomialBasis::from_elements(shape.clone(), Some(k), elements))
}

impl MonomialBasis {
    fn from_elements(shape: Shape, max_degree: Option<u32>, elements: Vec<Monomial>) -> Self {
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        Self {
            shape,
            max_degree,
            elements,
            index,
        }
    }

    pub fn zero_space(shape: &Shape) -> Self {
        Self::from_elements(shape.clone(), None, Vec::new())
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Monomial] {
        &self.elements
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// The basis function at position `i`.
    pub fn function(&self, i: usize) -> PolyTorsionFunction {
        PolyTorsionFunction::monomial(&self.shape, self.elements[i].clone(), BigRational::one())
    }
}

/// A function on `Z^m ⊕ G_2` with exact rational coefficients in the
/// monomial-times-slice basis. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyTorsionFunction {
    shape: Shape,
    terms: BTreeMap<Monomial, BigRational>,
}

impl PolyTorsionFunction {
    pub fn zero(shape: &Shape) -> Self {
        Self {
            shape: shape.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(shape: &Shape, m: Monomial, c: BigRational) -> Self {
        let mut f = Self::zero(shape);
        f.add_term(m, c);
        f
    }

    /// `c · x^α`, identical on every torsion slice.
    pub fn torsion_constant(shape: &Shape, alpha: Vec<u32>, c: BigRational) -> Self {
        let mut f = Self::zero(shape);
        for t in shape.torsion_elements() {
            f.add_term(
                Monomial {
                    alpha: alpha.clone(),
                    torsion: t,
                },
                c.clone(),
            );
        }
        f
    }

    /// Builds `Σ terms` from `(α, c)` pairs, torsion-constant.
    pub fn from_free_terms(shape: &Shape, terms: &[(Vec<u32>, i64)]) -> Self {
        let mut f = Self::zero(shape);
        for (alpha, c) in terms {
            f = f.add(&Self::torsion_constant(shape, alpha.clone(), BigRational::from_integer((*c).into())));
        }
        f
    }

    pub fn from_coordinates(basis: &MonomialBasis, coords: &[BigRational]) -> Self {
        let mut f = Self::zero(basis.shape());
        for (m, c) in basis.elements().iter().zip(coords) {
            f.add_term(m.clone(), c.clone());
        }
        f
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Largest `|α|` carrying a nonzero coefficient; `None` for the zero function.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.shape);
        }
        Self {
            shape: self.shape.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Coordinates in `basis`, or `None` if some term lies outside it.
    pub fn coordinates(&self, basis: &MonomialBasis) -> Option<Vec<BigRational>> {
        let mut out = vec![BigRational::zero(); basis.len()];
        for (m, c) in &self.terms {
            out[basis.position(m)?] = c.clone();
        }
        Some(out)
    }

    /// True when every free monomial has the same coefficient on all slices.
    pub fn is_torsion_constant(&self) -> bool {
        let slices = self.shape.torsion_elements();
        let mut alphas: Vec<&Vec<u32>> = self.terms.keys().map(|m| &m.alpha).collect();
        alphas.dedup();
        alphas.iter().all(|alpha| {
            let first = self.coefficient(&Monomial {
                alpha: (*alpha).clone(),
                torsion: slices[0].clone(),
            });
            slices.iter().all(|t| {
                self.coefficient(&Monomial {
                    alpha: (*alpha).clone(),
                    torsion: t.clone(),
                }) == first
            })
        })
    }

    /// Restriction to a single slice as a torsion-free polynomial.
    pub fn slice(&self, t: &[u64]) -> PolyTorsionFunction {
        let shape = self.shape.torsion_free();
        let mut f = Self::zero(&shape);
        for (m, c) in &self.terms {
            if m.torsion == t {
                f.add_term(
                    Monomial {
                        alpha: m.alpha.clone(),
                        torsion: Vec::new(),
                    },
                    c.clone(),
                );
            }
        }
        f
    }

    /// Exact value at `x`.
    pub fn evaluate(&self, x: &GroupElement) -> Result<BigRational> {
        if !self.shape.admits(x) {
            return Err(Error::ShapeMismatch(format!("cannot evaluate at {x}")));
        }
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            if m.torsion != x.torsion {
                continue;
            }
            let mut v = BigInt::one();
            for (&xi, &a) in x.free.iter().zip(&m.alpha) {
                v *= BigInt::from(xi).pow(a);
            }
            total += c * BigRational::from_integer(v);
        }
        Ok(total)
    }

    /// `x ↦ f(x + s)`.
    ///
    /// Each free factor `x_i^{α_i}` expands binomially; the slice indicator
    /// `[x_t + s_t = t]` becomes `[x_t = t - s_t]`.
    pub fn shift(&self, s: &GroupElement) -> Result<Self> {
        if !self.shape.admits(s) {
            return Err(Error::ShapeMismatch(format!("cannot shift by {s}")));
        }
        let mut out = Self::zero(&self.shape);
        let mut cache: HashMap<(usize, u32), Vec<(u32, BigInt)>> = HashMap::new();
        for (m, c) in &self.terms {
            let torsion: Vec<u64> = m
                .torsion
                .iter()
                .zip(&s.torsion)
                .zip(&self.shape.torsion_orders)
                .map(|((&t, &st), &q)| (t + q - st % q) % q)
                .collect();
            // Running product of the per-variable expansions.
            let mut partial: Vec<(Vec<u32>, BigInt)> = vec![(Vec::new(), BigInt::one())];
            for (i, &a) in m.alpha.iter().enumerate() {
                let expansion = cache
                    .entry((i, a))
                    .or_insert_with(|| binomial_expansion(a, s.free[i]));
                let mut next = Vec::with_capacity(partial.len() * expansion.len());
                for (prefix, pc) in &partial {
                    for (j, ec) in expansion.iter() {
                        let mut alpha = prefix.clone();
                        alpha.push(*j);
                        next.push((alpha, pc * ec));
                    }
                }
                partial = next;
            }
            for (alpha, coef) in partial {
                out.add_term(
                    Monomial {
                        alpha,
                        torsion: torsion.clone(),
                    },
                    c * BigRational::from_integer(coef),
                );
            }
        }
        Ok(out)
    }

    /// `δ_s f = f(· + s) - f`.
    pub fn partial_difference(&self, s: &GroupElement) -> Result<Self> {
        Ok(self.shift(s)?.sub(self))
    }
}

/// `(x + s)^a = Σ_j C(a, j) s^{a-j} x^j`, nonzero terms only.
fn binomial_expansion(a: u32, s: i64) -> Vec<(u32, BigInt)> {
    if s == 0 {
        return vec![(a, BigInt::one())];
    }
    let s = BigInt::from(s);
    (0..=a)
        .map(|j| {
            let c = binomial(BigInt::from(a), BigInt::from(j)) * s.clone().pow(a - j);
            (j, c)
        })
        .collect()
}

/// `C(n, r)` with the conventions `C(n, 0) = 1` for every `n ≥ -1` reached
/// here and `C(n, r) = 0` for `r > n ≥ 0`.
fn choose(n: i64, r: i64) -> u128 {
    if r < 0 {
        return 0;
    }
    if r == 0 {
        return 1;
    }
    if n < r {
        return 0;
    }
    binomial(n as u128, r as u128)
}

/// `dim P^k_m = Σ_{i=0..k} C(m+i-1, i)`; equals 1 for `m = 0`.
pub fn dim_polynomials(m: usize, k: u32) -> u128 {
    (0..=k as i64).map(|i| choose(m as i64 + i - 1, i)).sum()
}

/// Dimension of the space of harmonic polynomials of degree at most `k` on
/// `R^m`: `C(m+k-1, k) + C(m+k-2, k-1)` for `k ≥ 1`, and 1 for `k = 0`.
pub fn dim_harmonic_polynomials(m: usize, k: u32) -> u128 {
    if k == 0 {
        return 1;
    }
    let (m, k) = (m as i64, k as i64);
    choose(m + k - 1, k) + choose(m + k - 2, k - 1)
}

/// `Σ_{i=max(k-2n+1,0)}^{k} C(m+i-1, i)`: the dimension of polynomial
/// solutions of the `n`-th iterated Laplacian of degree at most `k`.
pub fn dim_polyharmonic(m: usize, k: u32, n: u32) -> u128 {
    let lo = (k as i64 - 2 * n as i64 + 1).max(0);
    (lo..=k as i64).map(|i| choose(m as i64 + i - 1, i)).sum()
}

/// Reference dimensions `(dim P^k_m, dim HP^k(R^m))`.
pub fn dim_reference(m: usize, k: u32) -> (u128, u128) {
    (dim_polynomials(m, k), dim_harmonic_polynomials(m, k))
}

/// Checks `dim R^k_m = dim R^k_{m-1} + dim R^{k-1}_m` (needs `m ≥ 2`, `k ≥ 1`).
pub fn harmonic_recursion_holds(m: usize, k: u32) -> bool {
    dim_harmonic_polynomials(m, k)
        == dim_harmonic_polynomials(m - 1, k) + dim_harmonic_polynomials(m, k - 1)
}

/// Checks `dim P^k_m = dim R^k_m + dim P^{k-2}_m` (needs `k ≥ 2`).
pub fn polynomial_recursion_holds(m: usize, k: u32) -> bool {
    dim_polynomials(m, k) == dim_harmonic_polynomials(m, k) + dim_polynomials(m, k - 2)
}
