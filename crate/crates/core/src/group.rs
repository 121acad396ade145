//! Finitely generated abelian groups `Z^m ⊕ Z_{q_1} ⊕ ... ⊕ Z_{q_l}`, their
//! elements, and symmetric generating multisets.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::snf::invariant_factors;

/// An abelian group in normal form: free rank `m` plus cyclic torsion factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    free_rank: usize,
    torsion_orders: Vec<u64>,
}

/// An element of an [`AbelianGroup`]. Torsion coordinates are always reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub free: Vec<i64>,
    pub torsion: Vec<u64>,
}

impl GroupElement {
    pub fn is_zero(&self) -> bool {
        self.free.iter().all(|&v| v == 0) && self.torsion.iter().all(|&v| v == 0)
    }

    /// Compact text encoding: free coordinates, then `;` and the torsion
    /// coordinates when there are any, e.g. `2,-1;1`.
    pub fn encode(&self) -> String {
        let free = join(self.free.iter());
        if self.torsion.is_empty() {
            free
        } else {
            format!("{};{}", free, join(self.torsion.iter()))
        }
    }
}

fn join<T: fmt::Display>(items: impl Iterator<Item = T>) -> String {
    items.map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.encode())
    }
}

impl AbelianGroup {
    pub fn new(free_rank: usize, torsion_orders: Vec<u64>) -> Result<Self> {
        if let Some(&q) = torsion_orders.iter().find(|&&q| q < 2) {
            return Err(Error::TorsionOrder(q));
        }
        if free_rank == 0 && torsion_orders.is_empty() {
            return Err(Error::TrivialGroup);
        }
        Ok(Self {
            free_rank,
            torsion_orders,
        })
    }

    /// The free abelian group `Z^m`.
    pub fn free(m: usize) -> Result<Self> {
        Self::new(m, Vec::new())
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion_orders(&self) -> &[u64] {
        &self.torsion_orders
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion_orders.is_empty()
    }

    /// Order of the torsion subgroup (1 when torsion-free).
    pub fn torsion_size(&self) -> usize {
        self.torsion_orders.iter().map(|&q| q as usize).product()
    }

    /// Builds an element, reducing torsion coordinates modulo their orders.
    pub fn element(&self, free: Vec<i64>, torsion: Vec<i64>) -> Result<GroupElement> {
        if free.len() != self.free_rank {
            return Err(Error::ShapeMismatch(format!(
                "expected {} free coordinates, got {}",
                self.free_rank,
                free.len()
            )));
        }
        if torsion.len() != self.torsion_orders.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} torsion coordinates, got {}",
                self.torsion_orders.len(),
                torsion.len()
            )));
        }
        let torsion = torsion
            .iter()
            .zip(&self.torsion_orders)
            .map(|(&t, &q)| t.rem_euclid(q as i64) as u64)
            .collect();
        Ok(GroupElement { free, torsion })
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            free: vec![0; self.free_rank],
            torsion: vec![0; self.torsion_orders.len()],
        }
    }

    /// The `i`-th free unit vector `e_i`.
    pub fn free_unit(&self, i: usize) -> GroupElement {
        let mut e = self.zero();
        e.free[i] = 1;
        e
    }

    /// The `j`-th torsion unit shift `w_j`.
    pub fn torsion_unit(&self, j: usize) -> GroupElement {
        let mut w = self.zero();
        w.torsion[j] = 1 % self.torsion_orders[j];
        w
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        x.free.len() == self.free_rank
            && x.torsion.len() == self.torsion_orders.len()
            && x.torsion.iter().zip(&self.torsion_orders).all(|(&t, &q)| t < q)
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement {
            free: a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&b.torsion)
                .zip(&self.torsion_orders)
                .map(|((x, y), q)| (x + y) % q)
                .collect(),
        }
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement {
            free: a.free.iter().map(|x| -x).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&self.torsion_orders)
                .map(|(x, q)| (q - x) % q)
                .collect(),
        }
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.neg(b))
    }

    /// `k · a` for an integer `k`.
    pub fn scale(&self, k: i64, a: &GroupElement) -> GroupElement {
        GroupElement {
            free: a.free.iter().map(|x| k * x).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&self.torsion_orders)
                .map(|(&x, &q)| ((k as i128 * x as i128).rem_euclid(q as i128)) as u64)
                .collect(),
        }
    }

    /// The canonical generating set `S^0 = {±e_1, ..., ±e_m, ±w_1, ..., ±w_l}`.
    pub fn standard_generators(&self) -> GeneratingSet {
        let half = (0..self.free_rank)
            .map(|i| self.free_unit(i))
            .chain((0..self.torsion_orders.len()).map(|j| self.torsion_unit(j)))
            .collect();
        GeneratingSet::symmetrize(self, half)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            m => parts.push(format!("Z^{m}")),
        }
        parts.extend(self.torsion_orders.iter().map(|q| format!("Z_{q}")));
        write!(f, "{}", parts.join("+"))
    }
}

/// Symmetric generating multiset `S = {s_1, ..., s_{2l}}` with `s_i = -s_{i+l}`.
///
/// The pairing is structural: the first half lists `s_1..s_l`, the second half
/// lists their negations in the same order. Duplicates and `0` are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratingSet {
    elements: Vec<GroupElement>,
}

/// Outcome of [`validate_generating_set`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub symmetric: bool,
    pub generates: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.symmetric && self.generates
    }
}

impl GeneratingSet {
    /// Takes `s_1..s_l` and appends their negations.
    pub fn symmetrize(g: &AbelianGroup, half: Vec<GroupElement>) -> Self {
        let negs: Vec<_> = half.iter().map(|s| g.neg(s)).collect();
        let mut elements = half;
        elements.extend(negs);
        Self { elements }
    }

    /// Accepts elements that are already in paired order
    /// (`elements[i] = -elements[i + l]`).
    pub fn from_paired(g: &AbelianGroup, elements: Vec<GroupElement>) -> Result<Self> {
        check_members(g, &elements)?;
        if !elements.len().is_multiple_of(2) {
            return Err(Error::NotSymmetric(format!(
                "odd cardinality {}",
                elements.len()
            )));
        }
        let half = elements.len() / 2;
        for i in 0..half {
            if g.neg(&elements[i]) != elements[i + half] {
                return Err(Error::NotSymmetric(format!(
                    "element {} is {} but element {} is {}",
                    i + half,
                    elements[i + half],
                    i,
                    elements[i]
                )));
            }
        }
        Ok(Self { elements })
    }

    /// Accepts any multiset that equals its own negation and rearranges it into
    /// paired order. Elements keep the relative order of first appearance.
    pub fn from_multiset(g: &AbelianGroup, elements: Vec<GroupElement>) -> Result<Self> {
        check_members(g, &elements)?;
        let mut used = vec![false; elements.len()];
        let mut first = Vec::new();
        let mut second = Vec::new();
        for i in 0..elements.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let target = g.neg(&elements[i]);
            let partner = (i + 1..elements.len()).find(|&j| !used[j] && elements[j] == target);
            match partner {
                Some(j) => {
                    used[j] = true;
                    first.push(elements[i].clone());
                    second.push(elements[j].clone());
                }
                None => {
                    return Err(Error::NotSymmetric(format!(
                        "element {} = {} has no unpaired negation",
                        i, elements[i]
                    )))
                }
            }
        }
        first.extend(second);
        Ok(Self { elements: first })
    }

    /// Wraps elements without any checks. Used for projected sets and tests.
    pub fn from_raw(elements: Vec<GroupElement>) -> Self {
        Self { elements }
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `s_1..s_l` (half of the pairing).
    pub fn half(&self) -> &[GroupElement] {
        &self.elements[..self.elements.len() / 2]
    }

    /// Distinct nonzero elements: the metric neighbor steps.
    pub fn distinct_steps(&self) -> Vec<GroupElement> {
        let mut steps: Vec<_> = self
            .elements
            .iter()
            .filter(|s| !s.is_zero())
            .cloned()
            .collect();
        steps.sort();
        steps.dedup();
        steps
    }

    /// Sorted copy of the multiset, for comparisons independent of ordering.
    pub fn sorted(&self) -> Vec<GroupElement> {
        let mut v = self.elements.clone();
        v.sort();
        v
    }

    /// Sample generating sets used by the verification suites: the standard
    /// set, one with a duplicated generator and `0`, and a skewed one.
    pub fn catalogue(g: &AbelianGroup) -> Vec<(String, GeneratingSet)> {
        let m = g.free_rank();
        let l = g.torsion_orders().len();
        let std = g.standard_generators();
        let mut out = vec![("standard".to_string(), std.clone())];

        let mut half = std.half().to_vec();
        half.push(half[0].clone());
        half.push(g.zero());
        out.push(("dup_zero".to_string(), GeneratingSet::symmetrize(g, half)));

        if m == 0 {
            return out;
        }
        let mut half = Vec::new();
        let w_all = {
            let mut w = g.zero();
            for j in 0..l {
                w = g.add(&w, &g.torsion_unit(j));
            }
            w
        };
        if m == 1 {
            half.push(g.add(&g.scale(2, &g.free_unit(0)), &w_all));
            half.push(g.scale(3, &g.free_unit(0)));
        } else {
            half.push(g.add(&g.add(&g.free_unit(0), &g.free_unit(1)), &w_all));
            for i in 1..m {
                half.push(g.free_unit(i));
            }
            half.push(g.sub(&g.free_unit(0), &g.free_unit(m - 1)));
        }
        for j in 0..l {
            half.push(g.add(&g.torsion_unit(j), &g.free_unit(0)));
        }
        out.push(("skew".to_string(), GeneratingSet::symmetrize(g, half)));
        out
    }
}

fn check_members(g: &AbelianGroup, elements: &[GroupElement]) -> Result<()> {
    for (index, e) in elements.iter().enumerate() {
        if !g.contains(e) {
            return Err(Error::BadElement {
                index,
                reason: format!("{e} is not an element of {g}"),
            });
        }
    }
    Ok(())
}

/// Checks multiset symmetry and generation of the whole group.
///
/// Generation is decided by the Smith normal form of the integer matrix whose
/// columns are the generators (torsion coordinates lifted to integers) together
/// with `q_i` times each torsion unit: `S` generates iff that lattice is all of
/// `Z^{m+l}`, i.e. the matrix has full row rank with every invariant factor 1.
pub fn validate_generating_set(g: &AbelianGroup, s: &GeneratingSet) -> ValidationReport {
    let sorted = s.sorted();
    let mut negated: Vec<_> = s.elements().iter().map(|e| g.neg(e)).collect();
    negated.sort();
    let symmetric = sorted == negated;

    let m = g.free_rank();
    let l = g.torsion_orders().len();
    let n = m + l;
    let mut rows: Vec<Vec<BigInt>> = vec![Vec::new(); n];
    for e in s.elements() {
        for (i, &v) in e.free.iter().enumerate() {
            rows[i].push(BigInt::from(v));
        }
        for (j, &t) in e.torsion.iter().enumerate() {
            rows[m + j].push(BigInt::from(t));
        }
    }
    for (j, &q) in g.torsion_orders().iter().enumerate() {
        for (r, row) in rows.iter_mut().enumerate() {
            row.push(if r == m + j { BigInt::from(q) } else { BigInt::from(0) });
        }
    }
    let factors = invariant_factors(&rows);
    let generates = factors.len() == n && factors.iter().all(|d| d.is_one());
    ValidationReport {
        symmetric,
        generates,
    }
}

/// `π_{G_1} S`: drops torsion coordinates, keeping multiplicities and order.
pub fn project_to_free_part(s: &GeneratingSet) -> GeneratingSet {
    GeneratingSet::from_raw(
        s.elements()
            .iter()
            .map(|e| GroupElement {
                free: e.free.clone(),
                torsion: Vec::new(),
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(m: usize) -> AbelianGroup {
        AbelianGroup::free(m).unwrap()
    }

    fn ints(g: &AbelianGroup, vals: &[i64]) -> GeneratingSet {
        let elems = vals
            .iter()
            .map(|&v| g.element(vec![v], vec![]).unwrap())
            .collect();
        GeneratingSet::from_paired(g, elems).unwrap()
    }

    #[test]
    fn make_group_cases() {
        let g = AbelianGroup::new(2, vec![]).unwrap();
        assert_eq!(g.free_rank(), 2);
        let h = AbelianGroup::new(1, vec![2]).unwrap();
        assert_eq!(h.torsion_orders(), &[2]);
        assert_eq!(h.to_string(), "Z+Z_2");
        assert_eq!(AbelianGroup::new(0, vec![1]), Err(Error::TorsionOrder(1)));
        assert_eq!(AbelianGroup::new(0, vec![]), Err(Error::TrivialGroup));
        // Non prime-power orders are accepted.
        assert!(AbelianGroup::new(0, vec![6]).is_ok());
    }

    #[test]
    fn standard_set_shape() {
        let g = AbelianGroup::new(2, vec![3]).unwrap();
        let s = g.standard_generators();
        assert_eq!(s.len(), 6);
        assert_eq!(s.elements()[0], g.free_unit(0));
        assert_eq!(s.elements()[3], g.neg(&g.free_unit(0)));
        assert_eq!(s.elements()[5].torsion, vec![2]);
    }

    #[test]
    fn validation_examples() {
        let g = z(2);
        let r = validate_generating_set(&g, &g.standard_generators());
        assert!(r.symmetric && r.generates);

        let z1 = z(1);
        let r = validate_generating_set(&z1, &ints(&z1, &[2, -2]));
        assert!(r.symmetric && !r.generates);

        let r = validate_generating_set(&z1, &ints(&z1, &[2, 3, -2, -3]));
        assert!(r.symmetric && r.generates);
    }

    #[test]
    fn validation_detects_asymmetry() {
        let g = z(1);
        let s = GeneratingSet::from_raw(vec![
            g.element(vec![1], vec![]).unwrap(),
            g.element(vec![1], vec![]).unwrap(),
        ]);
        let r = validate_generating_set(&g, &s);
        assert!(!r.symmetric);
        assert!(r.generates);
    }

    #[test]
    fn torsion_generation() {
        let g = AbelianGroup::new(1, vec![2]).unwrap();
        // (1,0) alone misses the torsion factor.
        let s = GeneratingSet::symmetrize(&g, vec![g.free_unit(0)]);
        assert!(!validate_generating_set(&g, &s).generates);
        // (1,1) and (2,0): 2*(1,1) - (2,0) = 0, still missing torsion.
        let s = GeneratingSet::symmetrize(
            &g,
            vec![g.element(vec![1], vec![1]).unwrap(), g.element(vec![2], vec![0]).unwrap()],
        );
        assert!(!validate_generating_set(&g, &s).generates);
        // Z_2 + Z_2 is not cyclic; Z_2 + Z_3 is.
        let k = AbelianGroup::new(0, vec![2, 2]).unwrap();
        let s = GeneratingSet::symmetrize(&k, vec![k.element(vec![], vec![1, 1]).unwrap()]);
        assert!(!validate_generating_set(&k, &s).generates);
        let c = AbelianGroup::new(0, vec![2, 3]).unwrap();
        let s = GeneratingSet::symmetrize(&c, vec![c.element(vec![], vec![1, 1]).unwrap()]);
        assert!(validate_generating_set(&c, &s).generates);
    }

    #[test]
    fn multiset_pairing() {
        let g = AbelianGroup::new(1, vec![2]).unwrap();
        let e = |f: i64, t: i64| g.element(vec![f], vec![t]).unwrap();
        let s = GeneratingSet::from_multiset(&g, vec![e(1, 1), e(-1, 1), e(0, 1), e(0, 1)]).unwrap();
        assert_eq!(s.elements(), &[e(1, 1), e(0, 1), e(-1, 1), e(0, 1)]);
        assert!(GeneratingSet::from_multiset(&g, vec![e(0, 1)]).is_err());
        assert!(GeneratingSet::from_paired(&g, vec![e(1, 1), e(-1, 1), e(0, 1), e(0, 1)]).is_err());
    }

    #[test]
    fn projection() {
        let g = AbelianGroup::new(1, vec![2]).unwrap();
        let e = |f: i64, t: i64| g.element(vec![f], vec![t]).unwrap();
        let s = GeneratingSet::from_multiset(&g, vec![e(1, 1), e(-1, 1), e(0, 1), e(0, 1)]).unwrap();
        let p = project_to_free_part(&s);
        let mut frees: Vec<i64> = p.elements().iter().map(|x| x.free[0]).collect();
        frees.sort();
        assert_eq!(frees, vec![-1, 0, 0, 1]);
        let f = z(1);
        assert!(validate_generating_set(&f, &p).is_valid());

        let t = AbelianGroup::new(0, vec![3]).unwrap();
        let p = project_to_free_part(&t.standard_generators());
        assert_eq!(p.len(), 2);
        assert!(p.elements().iter().all(|x| x.is_zero()));

        let std = z(2).standard_generators();
        assert_eq!(project_to_free_part(&std), std);
    }

    #[test]
    fn catalogue_is_valid() {
        for (m, tor) in [(1, vec![]), (2, vec![]), (3, vec![]), (1, vec![2]), (1, vec![3]), (2, vec![2]), (1, vec![2, 2]), (0, vec![4])] {
            let g = AbelianGroup::new(m, tor).unwrap();
            for (name, s) in GeneratingSet::catalogue(&g) {
                let r = validate_generating_set(&g, &s);
                assert!(r.is_valid(), "{g} {name}");
                assert!(GeneratingSet::from_paired(&g, s.elements().to_vec()).is_ok());
            }
        }
    }
}
