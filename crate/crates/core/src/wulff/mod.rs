//! Wulff shapes, the rectangle envelope and the admissibility predicates.
//!
//! The Wulff shape of a sampled surface tension is the intersection of the
//! half-planes `x . nu <= phi(nu)` over all samples and their mirrors,
//! rescaled so that its boundary energy `sum |edge| phi(normal)` is one. For
//! `phi = c1 |x1| + c2 |x2|` this is the rectangle with vertex
//! `(1/(8 c2), 1/(8 c1))`; the vertices of the extreme rectangles with
//! `c1 + c2 = 2m` trace the curve `1/|x1| + 1/|x2| = 16 m`.

mod svg;

use serde::{Deserialize, Serialize};

use crate::bounds::mixture_mean;
use crate::error::{Error, Result};
use crate::homogenize::SurfaceTensionProfile;
use crate::scalar::{Real, Scalar};

pub use svg::render_svg;

/// Default number of samples per envelope arc.
pub const ARC_SAMPLES: usize = 512;

/// Angular tolerance for merging half-plane normals.
const ANGLE_TOL: f64 = 1e-12;

#[inline]
fn dot<S: Real>(a: [S; 2], b: [S; 2]) -> S {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
fn cross<S: Real>(a: [S; 2], b: [S; 2]) -> S {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
fn sub<S: Real>(a: [S; 2], b: [S; 2]) -> [S; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

/// Convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon<S> {
    vertices: Vec<[S; 2]>,
}

impl<S: Real> ConvexPolygon<S> {
    /// Convex hull of `points` (monotone chain, collinear points dropped).
    pub fn hull(points: &[[S; 2]]) -> Result<Self> {
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap().then(a[1].partial_cmp(&b[1]).unwrap()));
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::DegenerateIntersection("empty or degenerate"));
        }
        let turn = |o: [S; 2], a: [S; 2], b: [S; 2]| cross(sub(a, o), sub(b, o));
        let mut lower: Vec<[S; 2]> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= S::zero() {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<[S; 2]> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= S::zero() {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        if lower.len() < 3 {
            return Err(Error::DegenerateIntersection("empty or degenerate"));
        }
        Ok(Self::canonical(lower))
    }

    /// Hull of `points` together with their negations.
    pub fn symmetric_hull(points: &[[S; 2]]) -> Result<Self> {
        let mut all = points.to_vec();
        all.extend(points.iter().map(|p| [-p[0], -p[1]]));
        Self::hull(&all)
    }

    /// Axis-aligned rectangle `[-a, a] x [-b, b]`.
    pub fn rectangle(a: S, b: S) -> Self {
        Self::canonical(vec![[a, -b], [a, b], [-a, b], [-a, -b]])
    }

    /// Rotates the vertex list to start at the first vertex counterclockwise
    /// from the positive `x1` axis.
    fn canonical(mut vertices: Vec<[S; 2]>) -> Self {
        let key = |v: &[S; 2]| {
            let a = v[1].to_f64().atan2(v[0].to_f64());
            if a < 0.0 {
                a + std::f64::consts::TAU
            } else {
                a
            }
        };
        if let Some(start) = (0..vertices.len()).min_by(|&i, &j| key(&vertices[i]).total_cmp(&key(&vertices[j]))) {
            vertices.rotate_left(start);
        }
        Self { vertices }
    }

    pub fn vertices(&self) -> &[[S; 2]] {
        &self.vertices
    }

    fn edges(&self) -> impl Iterator<Item = ([S; 2], [S; 2])> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Outward unit normals and offsets `(n_i, n_i . v_i)` of the edges.
    pub fn edge_halfplanes(&self) -> Vec<([S; 2], S)> {
        self.edges()
            .map(|(a, b)| {
                let e = sub(b, a);
                let len = e[0].hypot(e[1]);
                let n = [e[1] / len, -e[0] / len];
                (n, dot(n, a))
            })
            .collect()
    }

    /// `max_i (n_i . p - h_i)`: nonpositive exactly on the polygon.
    pub fn gauge(&self, p: [S; 2]) -> S {
        self.edge_halfplanes().into_iter().map(|(n, h)| dot(n, p) - h).fold(S::neg_infinity(), S::max)
    }

    pub fn contains(&self, p: [S; 2], tol: S) -> bool {
        self.gauge(p) <= tol
    }

    /// Support function `max_v v . dir`.
    pub fn support(&self, dir: [S; 2]) -> S {
        self.vertices.iter().map(|&v| dot(v, dir)).fold(S::neg_infinity(), S::max)
    }

    pub fn area(&self) -> S {
        self.edges().fold(S::zero(), |acc, (a, b)| acc + cross(a, b)) / S::two()
    }

    pub fn is_convex_ccw(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let (a, b, c) = (self.vertices[i], self.vertices[(i + 1) % n], self.vertices[(i + 2) % n]);
            cross(sub(b, a), sub(c, b)) > S::zero()
        })
    }

    pub fn is_centrally_symmetric(&self, tol: S) -> bool {
        self.vertices
            .iter()
            .all(|v| self.vertices.iter().any(|w| (v[0] + w[0]).abs() <= tol && (v[1] + w[1]).abs() <= tol))
    }

    pub fn max_abs_coordinate(&self) -> S {
        self.vertices.iter().fold(S::zero(), |m, v| m.max(v[0].abs()).max(v[1].abs()))
    }

    pub fn scaled(&self, lambda: S) -> Self {
        Self { vertices: self.vertices.iter().map(|v| [v[0] * lambda, v[1] * lambda]).collect() }
    }
}

/// Energy-normalized Wulff shape.
#[derive(Debug, Clone, PartialEq)]
pub struct WulffPolygon<S> {
    pub polygon: ConvexPolygon<S>,
    /// `phi` at the outward normal of edge `i` (from vertex `i` to `i + 1`).
    pub edge_tension: Vec<S>,
    pub scale: S,
    pub energy: S,
}

impl<S: Real> WulffPolygon<S> {
    pub fn vertices(&self) -> &[[S; 2]] {
        self.polygon.vertices()
    }

    /// Boundary energy `sum |edge| phi(normal)` of the stored polygon.
    pub fn boundary_energy(&self) -> S {
        boundary_energy(self.polygon.vertices(), &self.edge_tension)
    }

    pub fn to_document(&self) -> ShapeDocument {
        ShapeDocument {
            vertices: self.polygon.vertices().iter().map(|v| v.map(Scalar::to_f64)).collect(),
            scale: self.scale.to_f64(),
            energy: self.energy.to_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeDocument {
    pub vertices: Vec<[f64; 2]>,
    pub scale: f64,
    pub energy: f64,
}

fn boundary_energy<S: Real>(vertices: &[[S; 2]], tension: &[S]) -> S {
    let n = vertices.len();
    (0..n).fold(S::zero(), |acc, i| {
        let e = sub(vertices[(i + 1) % n], vertices[i]);
        acc + e[0].hypot(e[1]) * tension[i]
    })
}

/// Normalized Wulff shape of a sampled surface tension.
pub fn wulff_shape<S: Real>(profile: &SurfaceTensionProfile<S>) -> Result<WulffPolygon<S>> {
    let axis = |z: [i64; 2]| profile.sample(z).map(|s| s.value).ok_or(Error::MissingAxisDirection(z));
    // z = (0, 1) has normal e1; z = (1, 0) has normal -e2.
    let h1 = axis([0, 1])?;
    let h2 = axis([1, 0])?;
    if !(h1 > S::zero() && h2 > S::zero()) {
        return Err(Error::DegenerateIntersection("empty (non-positive axis tension)"));
    }

    // Half-planes by angle, near-parallel normals merged keeping the smaller offset.
    let mut planes: Vec<([S; 2], S)> = Vec::new();
    for c in profile.full_circle() {
        if !(c.value > S::zero()) {
            return Err(Error::DegenerateIntersection("unbounded (non-positive tension)"));
        }
        match planes.last_mut() {
            Some(last) if (cross(last.0, c.nu).to_f64()).abs() < ANGLE_TOL && dot(last.0, c.nu) > S::zero() => {
                if c.value < last.1 {
                    *last = (c.nu, c.value);
                }
            }
            _ => planes.push((c.nu, c.value)),
        }
    }

    let o = S::zero();
    let one = S::one();
    // Each vertex carries the half-plane of the edge leaving it.
    let mut poly: Vec<Labeled<S>> = vec![
        ([h1, -h2], ([one, o], h1)),
        ([h1, h2], ([o, one], h2)),
        ([-h1, h2], ([-one, o], h1)),
        ([-h1, -h2], ([o, -one], h2)),
    ];
    let eps = S::geom_eps() * h1.max(h2);
    for &(n, h) in &planes {
        poly = clip(&poly, n, h, eps);
        if poly.len() < 3 {
            return Err(Error::DegenerateIntersection("empty"));
        }
    }
    let poly = prune(poly, eps);
    if poly.len() < 3 {
        return Err(Error::DegenerateIntersection("empty"));
    }

    let vertices: Vec<[S; 2]> = poly.iter().map(|p| p.0).collect();
    let tension: Vec<S> = poly.iter().map(|p| (p.1).1).collect();
    let raw_energy = boundary_energy(&vertices, &tension);
    let scale = one / raw_energy;
    let scaled = ConvexPolygon { vertices: vertices.iter().map(|v| [v[0] * scale, v[1] * scale]).collect() };
    // Keep edge labels aligned with the canonical rotation.
    let canonical = ConvexPolygon::canonical(scaled.vertices.clone());
    let shift = scaled.vertices.iter().position(|v| *v == canonical.vertices[0]).unwrap_or(0);
    let mut edge_tension = tension;
    edge_tension.rotate_left(shift);
    let energy = boundary_energy(canonical.vertices(), &edge_tension);
    Ok(WulffPolygon { polygon: canonical, edge_tension, scale, energy })
}

type Labeled<S> = ([S; 2], ([S; 2], S));

/// Clips by `x . n <= h`; the new edge along the cut line gets label `(n, h)`.
fn clip<S: Real>(poly: &[Labeled<S>], n: [S; 2], h: S, eps: S) -> Vec<Labeled<S>> {
    let len = poly.len();
    let mut out = Vec::with_capacity(len + 1);
    for i in 0..len {
        let (cur, label) = poly[i];
        let next = poly[(i + 1) % len].0;
        let dc = dot(n, cur) - h;
        let dn = dot(n, next) - h;
        let crossing = |t: S| [cur[0] + (next[0] - cur[0]) * t, cur[1] + (next[1] - cur[1]) * t];
        if dc <= eps {
            out.push((cur, label));
            if dn > eps && dc < -eps {
                out.push((crossing(dc / (dc - dn)), (n, h)));
            } else if dn > eps {
                // Current vertex lies on the line; the cut edge starts here.
                out.last_mut().unwrap().1 = (n, h);
            }
        } else if dn <= eps && dn < -eps {
            out.push((crossing(dc / (dc - dn)), label));
        }
    }
    out
}

/// Drops zero-length edges and merges collinear neighbours.
fn prune<S: Real>(mut poly: Vec<Labeled<S>>, eps: S) -> Vec<Labeled<S>> {
    loop {
        let n = poly.len();
        if n < 3 {
            return poly;
        }
        let mut removed = false;
        for i in 0..n {
            let prev = poly[(i + n - 1) % n].0;
            let cur = poly[i].0;
            let next = poly[(i + 1) % n].0;
            let e_out = sub(next, cur);
            if e_out[0].hypot(e_out[1]) <= eps {
                // Edge i is degenerate; the incoming edge now ends at `next`.
                poly.remove(i);
                removed = true;
                break;
            }
            let e_in = sub(cur, prev);
            let scale = e_in[0].hypot(e_in[1]) * e_out[0].hypot(e_out[1]);
            if cross(e_in, e_out).abs() <= eps * scale.sqrt() && dot(e_in, e_out) > S::zero() {
                poly.remove(i);
                removed = true;
                break;
            }
        }
        if !removed {
            return poly;
        }
    }
}

/// One quadrant branch of `1/|x1| + 1/|x2| = 16 m` inside the square of
/// half-side `1/(8 alpha)`, parameterized by `u = 1/|x1|`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeArc<S> {
    pub theta: S,
    pub alpha: S,
    pub beta: S,
    pub m: S,
    /// Signs of `(x1, x2)` for this quadrant.
    pub quadrant: [i8; 2],
    /// Restricted to `|x1|, |x2| >= 1/(8 beta)`.
    pub restricted: bool,
    pub u_range: (S, S),
    pub half_side: S,
    pub points: Vec<[S; 2]>,
}

impl<S: Real> EnvelopeArc<S> {
    fn new(theta: S, alpha: S, beta: S, quadrant: [i8; 2], restricted: bool, n_points: usize) -> Self {
        let eight = S::from_usize(8);
        let m = mixture_mean(theta, alpha, beta);
        let total = eight * S::two() * m;
        let (mut lo, mut hi) = (eight * alpha, total - eight * alpha);
        if restricted {
            lo = lo.max(total - eight * beta);
            hi = hi.min(eight * beta);
        }
        let mut arc = Self {
            theta,
            alpha,
            beta,
            m,
            quadrant,
            restricted,
            u_range: (lo, hi),
            half_side: S::one() / (eight * alpha),
            points: Vec::new(),
        };
        let n = n_points.max(2);
        arc.points = (0..n).map(|j| arc.point(lo + (hi - lo) * S::from_usize(j) / S::from_usize(n - 1))).collect();
        arc
    }

    /// Point with `1/|x1| = u`.
    pub fn point(&self, u: S) -> [S; 2] {
        let total = S::from_usize(16) * self.m;
        let sign = |s: i8| if s < 0 { -S::one() } else { S::one() };
        [sign(self.quadrant[0]) / u, sign(self.quadrant[1]) / (total - u)]
    }

    /// `|1/|x1| + 1/|x2| - 16 m|` at a point.
    pub fn residual(&self, p: [S; 2]) -> S {
        (S::one() / p[0].abs() + S::one() / p[1].abs() - S::from_usize(16) * self.m).abs()
    }

    pub fn is_empty(&self) -> bool {
        self.u_range.0 > self.u_range.1
    }
}

const QUADRANTS: [[i8; 2]; 4] = [[1, 1], [-1, 1], [-1, -1], [1, -1]];

/// The four clipped arcs, followed by the four restricted arcs when `theta >= 1/2`.
pub fn envelope<S: Real>(theta: S, alpha: S, beta: S, n_points: usize) -> Result<Vec<EnvelopeArc<S>>> {
    if !(S::zero() < alpha && alpha < beta) {
        return Err(Error::InvalidLevels { alpha: alpha.to_f64(), beta: beta.to_f64() });
    }
    if !(theta >= S::zero() && theta <= S::one()) {
        return Err(Error::InvalidParameter("theta must lie in [0, 1]".into()));
    }
    let half = S::one() / S::two();
    let mut arcs: Vec<_> =
        QUADRANTS.iter().map(|&q| EnvelopeArc::new(theta, alpha, beta, q, false, n_points)).collect();
    if theta >= half {
        arcs.extend(QUADRANTS.iter().map(|&q| EnvelopeArc::new(theta, alpha, beta, q, true, n_points)));
    }
    Ok(arcs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdmissibilityTest {
    /// Four full arcs inside the square (`theta <= 1/2`).
    ThetaAtMostHalf,
    /// Four arcs restricted to `|x_i| >= 1/(8 beta)` (`theta >= 1/2`).
    ThetaAtLeastHalf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Admissibility {
    pub admissible: bool,
    pub which_test: AdmissibilityTest,
    pub in_square: bool,
    pub arcs_hit: [bool; 4],
}

/// Sampling density and tolerance for the arc and rectangle searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub samples: usize,
    /// Tolerance relative to the square's half-side.
    pub rel_tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { samples: ARC_SAMPLES, rel_tol: 1e-9 }
    }
}

/// Minimizes `f` on `[lo, hi]`: grid sampling, then golden-section search
/// around the best grid point. Returns `(argmin, min)`.
fn minimize<S: Real>(lo: S, hi: S, samples: usize, f: impl Fn(S) -> S) -> (S, S) {
    let n = samples.max(2);
    let at = |j: usize| lo + (hi - lo) * S::from_usize(j) / S::from_usize(n - 1);
    let (best, _) = (0..n).map(|j| (j, f(at(j)))).fold((0, S::infinity()), |b, c| if c.1 < b.1 { c } else { b });
    let (mut a, mut b) = (at(best.saturating_sub(1)), at((best + 1).min(n - 1)));
    let g = S::from_f64_lossy(0.5 * (5f64.sqrt() - 1.0));
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let candidates = [(at(best), f(at(best))), (c, fc), (d, fd), (lo, f(lo)), (hi, f(hi))];
    candidates.into_iter().fold((lo, S::infinity()), |b, c| if c.1 < b.1 { c } else { b })
}

/// Square containment plus intersection with each of the four envelope portions.
pub fn admissible<S: Real>(polygon: &ConvexPolygon<S>, theta: S, alpha: S, beta: S) -> Result<Admissibility> {
    admissible_with(polygon, theta, alpha, beta, &SearchOptions::default())
}

pub fn admissible_with<S: Real>(
    polygon: &ConvexPolygon<S>,
    theta: S,
    alpha: S,
    beta: S,
    options: &SearchOptions,
) -> Result<Admissibility> {
    let half = S::one() / S::two();
    let restricted = theta > half;
    let arcs = envelope(theta, alpha, beta, 2)?;
    let arcs: Vec<_> = arcs.into_iter().filter(|a| a.restricted == restricted).collect();
    let half_side = arcs[0].half_side;
    let tol = half_side * S::from_f64_lossy(options.rel_tol);
    let in_square = polygon.max_abs_coordinate() <= half_side + tol;
    let mut arcs_hit = [false; 4];
    for (hit, arc) in arcs_hit.iter_mut().zip(&arcs) {
        if arc.is_empty() {
            continue;
        }
        let (lo, hi) = arc.u_range;
        let (_, best) = minimize(lo, hi, options.samples, |u| polygon.gauge(arc.point(u)));
        *hit = best <= tol;
    }
    Ok(Admissibility {
        admissible: in_square && arcs_hit.iter().all(|&h| h),
        which_test: if restricted { AdmissibilityTest::ThetaAtLeastHalf } else { AdmissibilityTest::ThetaAtMostHalf },
        in_square,
        arcs_hit,
    })
}

/// Searches `c1 = m + s`, `c2 = m - s` with `|s| <= beta - m` for a rectangle
/// with vertex `(1/(8 c2), 1/(8 c1))` inside the polygon; returns the witness `s`.
pub fn contains_admissible_rectangle<S: Real>(
    polygon: &ConvexPolygon<S>,
    theta: S,
    alpha: S,
    beta: S,
) -> Result<Option<S>> {
    contains_admissible_rectangle_with(polygon, theta, alpha, beta, &SearchOptions::default())
}

pub fn contains_admissible_rectangle_with<S: Real>(
    polygon: &ConvexPolygon<S>,
    theta: S,
    alpha: S,
    beta: S,
    options: &SearchOptions,
) -> Result<Option<S>> {
    if !(S::zero() < alpha && alpha < beta) {
        return Err(Error::InvalidLevels { alpha: alpha.to_f64(), beta: beta.to_f64() });
    }
    let m = mixture_mean(theta, alpha, beta);
    let eight = S::from_usize(8);
    // Keep both coefficients positive so the vertex stays finite.
    let floor = m * S::from_f64_lossy(1e-6);
    let lo = (m - beta).max(floor - m);
    let hi = (beta - m).min(m - floor);
    let tol = S::from_f64_lossy(options.rel_tol) / (eight * alpha);
    let corners = |s: S| {
        let (a, b) = (S::one() / (eight * (m - s)), S::one() / (eight * (m + s)));
        [[a, b], [-a, b], [-a, -b], [a, -b]]
    };
    let objective = |s: S| corners(s).into_iter().map(|p| polygon.gauge(p)).fold(S::neg_infinity(), S::max);
    if lo > hi {
        return Ok(None);
    }
    let (s, best) = minimize(lo, hi, options.samples, objective);
    Ok((best <= tol).then_some(s))
}
