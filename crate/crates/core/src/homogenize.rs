//! Homogenized surface tension by first-passage costs on the dual lattice.
//!
//! Dual nodes are the plaquette centres `(x + 1/2, y + 1/2)`, addressed by
//! the integer pair `(x, y)`. Each dual edge crosses exactly one primal bond
//! and costs that bond's weight, so a path of bonds is an edge path here.
//!
//! For a primitive integer direction `z` the cost `d_k` of the cheapest dual
//! path from the base node `(0, 0)` to `k T z` is subadditive in `k`, hence
//! `d_k / (k T |z|)` decreases toward `phi(nu)` and every finite-`k` value is
//! a certified upper bound. The normal is `nu = rot(-pi/2) z / |z|`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::projection_bounds;
use crate::error::{Error, Result};
use crate::lattice::BondField;
use crate::scalar::{Real, Scalar};
use crate::shortest::dijkstra;

/// Default cap on the number of dual nodes in one search window.
pub const DEFAULT_MAX_NODES: usize = 8_000_000;

/// The four dual steps, in the order neighbours are expanded.
const STEPS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

/// The dual lattice of a bond field.
#[derive(Debug, Clone, Copy)]
pub struct DualGraph<'a, S> {
    field: &'a BondField<S>,
}

impl<'a, S: Scalar> DualGraph<'a, S> {
    pub fn new(field: &'a BondField<S>) -> Self {
        Self { field }
    }

    /// Weight of the dual edge from `(x, y)` to `(x + dx, y + dy)`, a unit step.
    #[inline]
    pub fn step_weight(&self, x: i64, y: i64, dx: i64, dy: i64) -> S {
        match (dx, dy) {
            // Horizontal dual steps cross vertical bonds.
            (1, 0) => self.field.v(x + 1, y),
            (-1, 0) => self.field.v(x, y),
            // Vertical dual steps cross horizontal bonds.
            (0, 1) => self.field.h(x, y + 1),
            (0, -1) => self.field.h(x, y),
            _ => panic!("({dx}, {dy}) is not a unit dual step"),
        }
    }

    /// Neighbours of `(x, y)` with the crossed weights.
    pub fn neighbors(&self, x: i64, y: i64) -> [((i64, i64), S); 4] {
        STEPS.map(|(dx, dy)| ((x + dx, y + dy), self.step_weight(x, y, dx, dy)))
    }

    /// Cost of an explicit path given as a node sequence.
    pub fn path_cost(&self, nodes: &[(i64, i64)]) -> S {
        nodes.windows(2).fold(S::zero(), |acc, w| {
            let (a, b) = (w[0], w[1]);
            acc + self.step_weight(a.0, a.1, b.0 - a.0, b.1 - a.1)
        })
    }

    /// Cost of the axis staircase from `(0, 0)` to `(tx, ty)` that moves
    /// vertically along dual column 0 first, then horizontally.
    pub fn staircase_cost(&self, tx: i64, ty: i64) -> S {
        let mut cost = S::zero();
        let dy = ty.signum();
        let mut y = 0;
        while y != ty {
            cost = cost + self.step_weight(0, y, 0, dy);
            y += dy;
        }
        let dx = tx.signum();
        let mut x = 0;
        while x != tx {
            cost = cost + self.step_weight(x, ty, dx, 0);
            x += dx;
        }
        cost
    }
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn is_primitive(z: [i64; 2]) -> bool {
    gcd(z[0], z[1]) == 1
}

/// Unit normal associated with a crossing direction.
pub fn normal_of<S: Real>(z: [i64; 2]) -> [S; 2] {
    let (a, b) = (z[0] as f64, z[1] as f64);
    let len = a.hypot(b);
    // Adding zero turns a negative zero into a positive one.
    [S::from_f64_lossy(b / len + 0.0), S::from_f64_lossy(-a / len + 0.0)]
}

/// A crossing: direction `z`, its unit normal, and the number of periods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingSpec<S> {
    pub z: [i64; 2],
    pub nu: [S; 2],
    pub k: usize,
}

impl<S: Real> CrossingSpec<S> {
    pub fn new(z: [i64; 2], k: usize) -> Result<Self> {
        if !is_primitive(z) {
            return Err(Error::NonPrimitiveDirection(z[0], z[1]));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        Ok(Self { z, nu: normal_of(z), k })
    }

    /// Euclidean length `R = k T |z|` of the crossing.
    pub fn length(&self, period: usize) -> S {
        let (a, b) = (S::from_i64(self.z[0]), S::from_i64(self.z[1]));
        S::from_usize(self.k * period) * a.hypot(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossingOptions {
    pub max_nodes: usize,
}

impl Default for CrossingOptions {
    fn default() -> Self {
        Self { max_nodes: DEFAULT_MAX_NODES }
    }
}

/// Minimum dual path cost from `(0, 0)` to `k T z`.
pub fn crossing_cost<S: Scalar>(field: &BondField<S>, z: [i64; 2], k: usize) -> Result<S> {
    crossing_cost_with(field, z, k, &CrossingOptions::default())
}

pub fn crossing_cost_with<S: Scalar>(
    field: &BondField<S>,
    z: [i64; 2],
    k: usize,
    options: &CrossingOptions,
) -> Result<S> {
    if !is_primitive(z) {
        return Err(Error::NonPrimitiveDirection(z[0], z[1]));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let graph = DualGraph::new(field);
    let span = (k * field.period()) as i64;
    let (tx, ty) = (span * z[0], span * z[1]);

    // Any path reaching `margin` beyond the endpoint box has l1 length at least
    // `l1 + 2 (margin + 1)`, hence cost above the staircase bound.
    let upper = graph.staircase_cost(tx, ty);
    let l1 = (tx.abs() + ty.abs()) as f64;
    let excess = (upper / field.min_weight()).to_f64() - l1;
    let margin = (excess / 2.0).max(0.0).ceil() as i64 + 1;

    let (x0, x1) = (tx.min(0) - margin, tx.max(0) + margin);
    let (y0, y1) = (ty.min(0) - margin, ty.max(0) + margin);
    let width = (x1 - x0 + 1) as usize;
    let height = (y1 - y0 + 1) as usize;
    let nodes = width.saturating_mul(height);
    if nodes > options.max_nodes {
        return Err(Error::WindowOverflow { nodes, budget: options.max_nodes });
    }

    // Row-major index gives lexicographic (y, x) tie-breaking.
    let id = |x: i64, y: i64| ((y - y0) as usize) * width + (x - x0) as usize;
    let source = id(0, 0);
    let target = id(tx, ty);
    let dist = dijkstra(nodes, source, Some(target), |u, out| {
        let (x, y) = (x0 + (u % width) as i64, y0 + (u / width) as i64);
        for ((nx, ny), w) in graph.neighbors(x, y) {
            if (x0..=x1).contains(&nx) && (y0..=y1).contains(&ny) {
                out.push((id(nx, ny), w));
            }
        }
    });
    Ok(dist[target].expect("target is connected to the source inside the window"))
}

/// Upper-certified estimate of `phi(nu)` for one rational direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiEstimate<S> {
    pub z: [i64; 2],
    pub nu: [S; 2],
    pub value: S,
    pub upper_certificate: S,
    pub lower_certificate: S,
    pub k_used: usize,
    pub converged: bool,
}

/// Evaluates `d_k / (k T |z|)` for `k = 1, 2, 4, ...` up to `k_max`.
///
/// Stops early once the estimate is within `rel_tol` of the projection lower
/// bound, or when a doubling of `k` changes it by less than `rel_tol`.
pub fn phi_direction<S: Real>(field: &BondField<S>, z: [i64; 2], k_max: usize, rel_tol: S) -> Result<PhiEstimate<S>> {
    phi_direction_with(field, z, k_max, rel_tol, &CrossingOptions::default())
}

pub fn phi_direction_with<S: Real>(
    field: &BondField<S>,
    z: [i64; 2],
    k_max: usize,
    rel_tol: S,
    options: &CrossingOptions,
) -> Result<PhiEstimate<S>> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    let spec = CrossingSpec::<S>::new(z, 1)?;
    let nu = spec.nu;
    let lower = projection_bounds(field).evaluate(nu);
    let slack = S::geom_eps();

    let mut ks = Vec::new();
    let mut k = 1;
    while k < k_max {
        ks.push(k);
        k *= 2;
    }
    ks.push(k_max);

    let mut upper = S::infinity();
    let mut previous: Option<S> = None;
    let mut k_used = 1;
    let mut converged = false;
    for k in ks {
        let cost = crossing_cost_with(field, z, k, options)?;
        let length = CrossingSpec::<S> { z, nu, k }.length(field.period());
        upper = upper.min(cost / length);
        k_used = k;
        if upper <= lower * (S::one() + rel_tol) + slack * upper {
            converged = true;
            break;
        }
        if let Some(p) = previous {
            if (p - upper).abs() <= rel_tol * upper + slack * upper {
                converged = true;
                break;
            }
        }
        previous = Some(upper);
    }
    Ok(PhiEstimate { z, nu, value: upper, upper_certificate: upper, lower_certificate: lower, k_used, converged })
}

/// Primitive directions `z` with `max(|z1|, |z2|) <= D` on the half plane
/// `z1 > 0` (plus `z = (0, 1)`), ordered by the angle of their normal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionFan {
    max_coordinate: i64,
    directions: Vec<[i64; 2]>,
}

impl DirectionFan {
    pub fn with_max_coordinate(max_coordinate: i64) -> Result<Self> {
        if max_coordinate < 1 {
            return Err(Error::InvalidParameter("fan bound D must be at least 1".into()));
        }
        let d = max_coordinate;
        let mut directions: Vec<[i64; 2]> = (0..=d)
            .flat_map(|a| (-d..=d).map(move |b| [a, b]))
            .filter(|&[a, b]| (a > 0 || (a == 0 && b == 1)) && gcd(a, b) == 1)
            .collect();
        directions.sort_by(|p, q| angle(*p).total_cmp(&angle(*q)));
        Ok(Self { max_coordinate, directions })
    }

    /// Smallest fan with at least `count` directions (`count >= 4`).
    pub fn at_least(count: usize) -> Result<Self> {
        if count < 4 {
            return Err(Error::InvalidParameter("a fan needs at least 4 directions".into()));
        }
        let mut d = 1;
        loop {
            let fan = Self::with_max_coordinate(d)?;
            if fan.len() >= count {
                return Ok(fan);
            }
            d += 1;
        }
    }

    pub fn max_coordinate(&self) -> i64 {
        self.max_coordinate
    }

    pub fn directions(&self) -> &[[i64; 2]] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

/// Angle of the normal of `z`.
fn angle(z: [i64; 2]) -> f64 {
    (-(z[0] as f64)).atan2(z[1] as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample<S> {
    pub z: [i64; 2],
    pub nu: [S; 2],
    pub value: S,
    pub upper: S,
    pub lower: S,
    pub k: usize,
    pub converged: bool,
}

impl<S: Real> From<PhiEstimate<S>> for ProfileSample<S> {
    fn from(e: PhiEstimate<S>) -> Self {
        Self {
            z: e.z,
            nu: e.nu,
            value: e.value,
            upper: e.upper_certificate,
            lower: e.lower_certificate,
            k: e.k_used,
            converged: e.converged,
        }
    }
}

/// Sampled surface tension over a half-circle of directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de>"))]
pub struct SurfaceTensionProfile<S> {
    pub field_hash: String,
    pub samples: Vec<ProfileSample<S>>,
}

impl<S: Real> SurfaceTensionProfile<S> {
    /// Exact samples of an analytic surface tension; certificates equal the value.
    pub fn from_fn(fan: &DirectionFan, label: &str, phi: impl Fn([S; 2]) -> S) -> Self {
        let samples = fan
            .directions()
            .iter()
            .map(|&z| {
                let nu = normal_of(z);
                let value = phi(nu);
                ProfileSample { z, nu, value, upper: value, lower: value, k: 0, converged: true }
            })
            .collect();
        Self { field_hash: label.to_string(), samples }
    }

    /// Samples of `c1 |x1| + c2 |x2|`.
    pub fn weighted_l1(fan: &DirectionFan, c1: S, c2: S) -> Self {
        let label = format!("weighted-l1:{},{}", c1.to_f64(), c2.to_f64());
        Self::from_fn(fan, &label, |nu| c1 * nu[0].abs() + c2 * nu[1].abs())
    }

    pub fn sample(&self, z: [i64; 2]) -> Option<&ProfileSample<S>> {
        self.samples.iter().find(|s| s.z == z || s.z == [-z[0], -z[1]])
    }

    /// All samples and their mirror images, sorted by the angle of `nu`.
    /// Each entry carries the index of its source sample and a mirror flag.
    pub fn full_circle(&self) -> Vec<CircleSample<S>> {
        let mut out: Vec<CircleSample<S>> = self
            .samples
            .iter()
            .enumerate()
            .flat_map(|(i, s)| {
                [
                    CircleSample { nu: s.nu, value: s.value, source: i, mirrored: false },
                    CircleSample { nu: [-s.nu[0], -s.nu[1]], value: s.value, source: i, mirrored: true },
                ]
            })
            .collect();
        out.sort_by(|a, b| {
            let ta = a.nu[1].to_f64().atan2(a.nu[0].to_f64());
            let tb = b.nu[1].to_f64().atan2(b.nu[0].to_f64());
            ta.total_cmp(&tb)
        });
        out
    }

    pub fn to_document(&self) -> ProfileDocument {
        ProfileDocument {
            field_hash: self.field_hash.clone(),
            samples: self
                .samples
                .iter()
                .map(|s| ProfileSample {
                    z: s.z,
                    nu: s.nu.map(Scalar::to_f64),
                    value: s.value.to_f64(),
                    upper: s.upper.to_f64(),
                    lower: s.lower.to_f64(),
                    k: s.k,
                    converged: s.converged,
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &ProfileDocument) -> Self {
        Self {
            field_hash: doc.field_hash.clone(),
            samples: doc
                .samples
                .iter()
                .map(|s| ProfileSample {
                    z: s.z,
                    nu: s.nu.map(S::from_f64_lossy),
                    value: S::from_f64_lossy(s.value),
                    upper: S::from_f64_lossy(s.upper),
                    lower: S::from_f64_lossy(s.lower),
                    k: s.k,
                    converged: s.converged,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("profile serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ProfileDocument = serde_json::from_str(text)?;
        Ok(Self::from_document(&doc))
    }
}

pub type ProfileDocument = SurfaceTensionProfile<f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleSample<S> {
    pub nu: [S; 2],
    pub value: S,
    pub source: usize,
    pub mirrored: bool,
}

/// SHA-256 of the canonical JSON form of a field.
pub fn field_hash<S: Scalar>(field: &BondField<S>) -> String {
    hex::encode(Sha256::digest(field.to_json().as_bytes()))
}

/// `phi_direction` over every direction of `fan`, evaluated in parallel.
pub fn phi_profile<S: Real>(
    field: &BondField<S>,
    fan: &DirectionFan,
    k_max: usize,
    rel_tol: S,
) -> Result<SurfaceTensionProfile<S>> {
    let samples = fan
        .directions()
        .par_iter()
        .map(|&z| phi_direction(field, z, k_max, rel_tol).map(ProfileSample::from))
        .collect::<Result<Vec<_>>>()?;
    Ok(SurfaceTensionProfile { field_hash: field_hash(field), samples })
}

/// A consecutive triple whose middle sample lies above the chord of its neighbours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityViolation<S> {
    /// Index into `profile.samples` of the middle direction.
    pub sample: usize,
    pub z: [i64; 2],
    pub nu: [S; 2],
    pub defect: S,
}

/// Convexity defects of the 1-homogeneous, even extension of the samples.
pub fn convexity_report<S: Real>(profile: &SurfaceTensionProfile<S>) -> Vec<ConvexityViolation<S>> {
    convexity_report_with_tol(profile, S::geom_eps())
}

/// As [`convexity_report`], flagging defects above `rel_tol * phi(b)`.
pub fn convexity_report_with_tol<S: Real>(
    profile: &SurfaceTensionProfile<S>,
    rel_tol: S,
) -> Vec<ConvexityViolation<S>> {
    let circle = profile.full_circle();
    let n = circle.len();
    let cross = |p: [S; 2], q: [S; 2]| p[0] * q[1] - p[1] * q[0];
    let mut out = Vec::new();
    if n < 3 {
        return out;
    }
    for i in 0..n {
        let b = &circle[i];
        if b.mirrored {
            continue;
        }
        let a = &circle[(i + n - 1) % n];
        let c = &circle[(i + 1) % n];
        let det = cross(a.nu, c.nu);
        if det <= S::zero() {
            // The triple spans half a turn or more.
            continue;
        }
        let lambda = cross(b.nu, c.nu) / det;
        let mu = cross(a.nu, b.nu) / det;
        let defect = b.value - lambda * a.value - mu * c.value;
        if defect > rel_tol * b.value.abs() {
            let s = &profile.samples[b.source];
            out.push(ConvexityViolation { sample: b.source, z: s.z, nu: s.nu, defect });
        }
    }
    out.sort_by_key(|v| v.sample);
    out
}
