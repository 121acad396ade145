//! Word metric, geodesic balls and volume measurements on a Cayley graph.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{validate_generating_set, AbelianGroup, GeneratingSet, GroupElement};

/// Default vertex budget for ball enumeration.
pub const DEFAULT_VERTEX_BUDGET: usize = 1_000_000;

/// A Cayley graph `(G, S)` with a validated symmetric generating set.
#[derive(Debug, Clone)]
pub struct CayleyGraph {
    group: AbelianGroup,
    gens: GeneratingSet,
    steps: Vec<GroupElement>,
    budget: usize,
}

impl CayleyGraph {
    /// Validates `gens` (symmetric and generating) and builds the graph.
    pub fn new(group: AbelianGroup, gens: GeneratingSet) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::EmptyGeneratingSet);
        }
        for (index, e) in gens.elements().iter().enumerate() {
            if !group.contains(e) {
                return Err(Error::BadElement {
                    index,
                    reason: format!("{e} is not an element of {group}"),
                });
            }
        }
        let report = validate_generating_set(&group, &gens);
        if !report.symmetric {
            return Err(Error::NotSymmetric("multiset differs from its negation".into()));
        }
        if !report.generates {
            return Err(Error::DoesNotGenerate);
        }
        let steps = gens.distinct_steps();
        Ok(Self {
            group,
            gens,
            steps,
            budget: DEFAULT_VERTEX_BUDGET,
        })
    }

    /// The graph on the standard generating set `S^0`.
    pub fn standard(group: AbelianGroup) -> Self {
        let gens = group.standard_generators();
        Self::new(group, gens).expect("standard generators are valid")
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn gens(&self) -> &GeneratingSet {
        &self.gens
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// `♯S`, the vertex degree counted with multiplicity.
    pub fn degree(&self) -> usize {
        self.gens.len()
    }

    /// Breadth-first layers around `center` out to distance `radius`.
    fn bfs(&self, center: &GroupElement, radius: u32) -> Result<(Vec<GroupElement>, Vec<u32>)> {
        let mut seen: HashSet<GroupElement> = HashSet::new();
        let mut order = vec![center.clone()];
        let mut dist = vec![0u32];
        seen.insert(center.clone());
        let mut head = 0;
        while head < order.len() {
            let d = dist[head];
            if d == radius {
                break;
            }
            let x = order[head].clone();
            head += 1;
            for s in &self.steps {
                let y = self.group.add(&x, s);
                if seen.insert(y.clone()) {
                    order.push(y);
                    dist.push(d + 1);
                    if order.len() > self.budget {
                        return Err(Error::Budget {
                            needed: order.len(),
                            budget: self.budget,
                        });
                    }
                }
            }
        }
        Ok((order, dist))
    }

    /// The closed ball `B_r(center)` together with its outer boundary.
    pub fn ball(&self, center: &GroupElement, radius: u32) -> Result<Ball> {
        if !self.group.contains(center) {
            return Err(Error::ShapeMismatch(format!("{center} is not in {}", self.group)));
        }
        let (vertices, distances) = self.bfs(center, radius + 1)?;
        let member_count = distances.iter().take_while(|&&d| d <= radius).count();
        let index = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        Ok(Ball {
            center: center.clone(),
            radius,
            vertices,
            distances,
            member_count,
            index,
        })
    }

    /// Exact word distance `d^S(x, y)`.
    pub fn distance(&self, x: &GroupElement, y: &GroupElement) -> Result<u32> {
        let target = self.group.sub(y, x);
        let origin = self.group.zero();
        if target == origin {
            return Ok(0);
        }
        let mut seen: HashSet<GroupElement> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(origin.clone());
        queue.push_back((origin, 0u32));
        while let Some((v, d)) = queue.pop_front() {
            for s in &self.steps {
                let w = self.group.add(&v, s);
                if w == target {
                    return Ok(d + 1);
                }
                if seen.insert(w.clone()) {
                    if seen.len() > self.budget {
                        return Err(Error::Budget {
                            needed: seen.len(),
                            budget: self.budget,
                        });
                    }
                    queue.push_back((w, d + 1));
                }
            }
        }
        Err(Error::DoesNotGenerate)
    }

    /// `|B_r|`, independent of the center.
    pub fn ball_volume(&self, radius: u32) -> Result<usize> {
        Ok(self.volumes(radius)?[radius as usize])
    }

    /// `|B_r|` for every `r` in `0..=max_radius`, from one breadth-first pass.
    pub fn volumes(&self, max_radius: u32) -> Result<Vec<usize>> {
        let (_, dist) = self.bfs(&self.group.zero(), max_radius)?;
        let mut counts = vec![0usize; max_radius as usize + 1];
        for d in dist {
            counts[d as usize] += 1;
        }
        let mut acc = 0;
        Ok(counts
            .into_iter()
            .map(|c| {
                acc += c;
                acc
            })
            .collect())
    }

    /// Doubling ratios `|B_{2r}| / |B_r|` and normalized volumes `|B_r| / r^m`.
    pub fn measure_volume_doubling(&self, radii: &[u32]) -> Result<Vec<VolumeRow>> {
        let Some(&max_r) = radii.iter().max() else {
            return Ok(Vec::new());
        };
        if let Some(&r) = radii.iter().find(|&&r| r == 0) {
            return Err(Error::Parse(format!("radius {r} must be at least 1")));
        }
        let vols = self.volumes(2 * max_r)?;
        let m = self.group.free_rank() as u32;
        Ok(radii
            .iter()
            .map(|&r| {
                let v = vols[r as usize];
                let v2 = vols[2 * r as usize];
                VolumeRow {
                    radius: r,
                    volume: v,
                    doubling_ratio: BigRational::new(BigInt::from(v2), BigInt::from(v)),
                    normalized_volume: BigRational::new(
                        BigInt::from(v),
                        BigInt::from(r).pow(m),
                    ),
                }
            })
            .collect())
    }
}

/// One row of the volume-doubling table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeRow {
    pub radius: u32,
    pub volume: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub doubling_ratio: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub normalized_volume: BigRational,
}

fn ser_ratio<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Ratio as `f64`, for CSV output.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Closed ball `B_r(center)` plus its boundary `∂B_r` (the sphere at `r + 1`).
///
/// `vertices` lists members in breadth-first order followed by the boundary.
#[derive(Debug, Clone)]
pub struct Ball {
    center: GroupElement,
    radius: u32,
    vertices: Vec<GroupElement>,
    distances: Vec<u32>,
    member_count: usize,
    index: HashMap<GroupElement, usize>,
}

impl Ball {
    pub fn center(&self) -> &GroupElement {
        &self.center
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn members(&self) -> &[GroupElement] {
        &self.vertices[..self.member_count]
    }

    pub fn boundary(&self) -> &[GroupElement] {
        &self.vertices[self.member_count..]
    }

    /// Members followed by boundary vertices.
    pub fn closure(&self) -> &[GroupElement] {
        &self.vertices
    }

    pub fn member_count(&self) -> usize {
        self.member_count
    }

    pub fn len(&self) -> usize {
        self.member_count
    }

    pub fn is_empty(&self) -> bool {
        self.member_count == 0
    }

    /// Position in `closure()`.
    pub fn index_of(&self, x: &GroupElement) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn is_member(&self, x: &GroupElement) -> bool {
        self.index_of(x).is_some_and(|i| i < self.member_count)
    }

    /// Distance from the center for a closure vertex.
    pub fn distance_of(&self, x: &GroupElement) -> Option<u32> {
        self.index_of(x).map(|i| self.distances[i])
    }

    /// Members at distance at most `r` from the center (`r ≤ radius`).
    pub fn inner(&self, r: u32) -> impl Iterator<Item = (usize, &GroupElement)> {
        self.vertices[..self.member_count]
            .iter()
            .enumerate()
            .filter(move |(i, _)| self.distances[*i] <= r)
    }

    /// For each member, the closure indices of `x + s` for every `s ∈ S`
    /// (with multiplicity, self-loops included).
    pub fn neighbor_table(&self, graph: &CayleyGraph) -> Vec<Vec<usize>> {
        self.members()
            .iter()
            .map(|x| {
                graph
                    .gens()
                    .elements()
                    .iter()
                    .map(|s| {
                        let y = graph.group().add(x, s);
                        self.index[&y]
                    })
                    .collect()
            })
            .collect()
    }
}

/// Values on the closure of a ball (members and boundary), exact or floating.
#[derive(Debug, Clone)]
pub struct BallFunction<T> {
    ball: Arc<Ball>,
    values: Vec<T>,
}

impl<T> BallFunction<T> {
    /// `values[i]` is the value at `ball.closure()[i]`.
    pub fn new(ball: Arc<Ball>, values: Vec<T>) -> Result<Self> {
        if values.len() != ball.closure().len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for {} closure vertices",
                values.len(),
                ball.closure().len()
            )));
        }
        Ok(Self { ball, values })
    }

    pub fn from_fn(ball: Arc<Ball>, f: impl Fn(&GroupElement) -> T) -> Self {
        let values = ball.closure().iter().map(f).collect();
        Self { ball, values }
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    pub fn shared_ball(&self) -> Arc<Ball> {
        Arc::clone(&self.ball)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, x: &GroupElement) -> Option<&T> {
        self.ball.index_of(x).map(|i| &self.values[i])
    }

    /// Value at `x`, or a [`Error::MissingValue`].
    pub fn at(&self, x: &GroupElement) -> Result<&T> {
        self.get(x).ok_or_else(|| Error::MissingValue(x.to_string()))
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> BallFunction<U> {
        BallFunction {
            ball: Arc::clone(&self.ball),
            values: self.values.iter().map(f).collect(),
        }
    }
}

/// Empirical bi-Lipschitz constants between two word metrics at scale `r`:
/// min and max of `d^{S_2}(0, y) / d^{S_1}(0, y)` over `y ∈ B^{S_1}_r(0) \ {0}`.
pub fn compare_word_metrics(
    g1: &CayleyGraph,
    g2: &CayleyGraph,
    r: u32,
) -> Result<(BigRational, BigRational)> {
    if g1.group() != g2.group() {
        return Err(Error::ShapeMismatch("metrics on different groups".into()));
    }
    let origin = g1.group().zero();
    let ball = g1.ball(&origin, r)?;
    let targets: Vec<(&GroupElement, u32)> = ball
        .members()
        .iter()
        .filter(|y| !y.is_zero())
        .map(|y| (y, ball.distance_of(y).unwrap()))
        .collect();
    if targets.is_empty() {
        return Err(Error::Consistency("ball has no nonzero members".into()));
    }
    // Grow S_2 balls until every target is covered.
    let wanted: HashSet<&GroupElement> = targets.iter().map(|(y, _)| *y).collect();
    let mut d2: HashMap<GroupElement, u32> = HashMap::new();
    let mut frontier = vec![origin.clone()];
    let mut seen: HashSet<GroupElement> = HashSet::from([origin]);
    let mut depth = 0;
    while d2.len() < wanted.len() {
        if frontier.is_empty() {
            return Err(Error::DoesNotGenerate);
        }
        depth += 1;
        let mut next = Vec::new();
        for v in &frontier {
            for s in &g2.steps {
                let w = g2.group().add(v, s);
                if seen.insert(w.clone()) {
                    if seen.len() > g2.budget {
                        return Err(Error::Budget {
                            needed: seen.len(),
                            budget: g2.budget,
                        });
                    }
                    if wanted.contains(&w) {
                        d2.insert(w.clone(), depth);
                    }
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    let mut lo: Option<BigRational> = None;
    let mut hi: Option<BigRational> = None;
    for (y, d1) in targets {
        let ratio = BigRational::new(BigInt::from(d2[y]), BigInt::from(d1));
        if lo.as_ref().is_none_or(|l| &ratio < l) {
            lo = Some(ratio.clone());
        }
        if hi.as_ref().is_none_or(|h| &ratio > h) {
            hi = Some(ratio);
        }
    }
    let lo = lo.unwrap_or_else(BigRational::zero);
    let hi = hi.unwrap_or_else(BigRational::zero);
    Ok((lo, hi))
}
