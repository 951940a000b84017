//! Brute-force check of the path formulation through spin configurations.
//!
//! A window of `width x height` free sites is surrounded by a one-site frame
//! whose spins are fixed by a half-plane trace. The normalized energy is
//! `(1/8) sum c_ij (u_i - u_j)^2` over ordered nearest-neighbour pairs, which
//! equals the total weight of the bonds joining opposite spins. Bonds between
//! two frame sites are fixed by the trace and left out.
//!
//! By planar duality the minimal energy is the cheapest dual path between
//! the two places where the frame changes sign; both routes are computed here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::BondField;
use crate::scalar::Scalar;
use crate::shortest::dijkstra;

/// Largest number of free sites accepted by exhaustive enumeration.
pub const EXHAUSTIVE_LIMIT: usize = 16;

/// Spins on a window plus its frame, frame fixed by a half-plane trace.
///
/// Sites are indexed by `(i, j)` with `-1 <= i <= width` and
/// `-1 <= j <= height`; the free sites are `0 <= i < width`, `0 <= j < height`.
/// Site `(i, j)` sits at lattice point `origin + (i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinWindow {
    width: usize,
    height: usize,
    origin: [i64; 2],
    nu: [f64; 2],
    offset: f64,
    values: Vec<i8>,
}

impl SpinWindow {
    /// Every site, free or not, starts at the trace value.
    pub fn new(width: usize, height: usize, origin: [i64; 2], nu: [f64; 2], offset: f64) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter("spin window needs positive extents".into()));
        }
        if !(nu[0].is_finite() && nu[1].is_finite() && offset.is_finite()) || (nu[0] == 0.0 && nu[1] == 0.0) {
            return Err(Error::InvalidParameter("spin window needs a finite nonzero normal".into()));
        }
        let mut w = Self { width, height, origin, nu, offset, values: vec![1; (width + 2) * (height + 2)] };
        for j in -1..=height as i64 {
            for i in -1..=width as i64 {
                let s = w.trace(i, j);
                let k = w.index(i, j);
                w.values[k] = s;
            }
        }
        Ok(w)
    }

    /// Interface through the centre of the window.
    pub fn centered(width: usize, height: usize, origin: [i64; 2], nu: [f64; 2]) -> Result<Self> {
        let c = [(width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0];
        let offset = nu[0] * (origin[0] as f64 + c[0]) + nu[1] * (origin[1] as f64 + c[1]);
        Self::new(width, height, origin, nu, offset)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn nu(&self) -> [f64; 2] {
        self.nu
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn free_sites(&self) -> usize {
        self.width * self.height
    }

    /// `sign(<x, nu> - offset)`, with `+1` on the line.
    pub fn trace(&self, i: i64, j: i64) -> i8 {
        let x = [(self.origin[0] + i) as f64, (self.origin[1] + j) as f64];
        if x[0] * self.nu[0] + x[1] * self.nu[1] - self.offset >= 0.0 {
            1
        } else {
            -1
        }
    }

    #[inline]
    fn index(&self, i: i64, j: i64) -> usize {
        ((j + 1) as usize) * (self.width + 2) + (i + 1) as usize
    }

    fn is_frame(&self, i: i64, j: i64) -> bool {
        i < 0 || j < 0 || i >= self.width as i64 || j >= self.height as i64
    }

    pub fn get(&self, i: i64, j: i64) -> i8 {
        self.values[self.index(i, j)]
    }

    /// Sets a free site; frame sites are fixed.
    pub fn set(&mut self, i: usize, j: usize, spin: i8) -> Result<()> {
        if i >= self.width || j >= self.height || !(spin == 1 || spin == -1) {
            return Err(Error::InvalidParameter(format!("cannot set site ({i}, {j}) to {spin}")));
        }
        let k = self.index(i as i64, j as i64);
        self.values[k] = spin;
        Ok(())
    }

    /// Free sites from the bits of `mask`, row-major; a set bit is `-1`.
    pub fn set_from_mask(&mut self, mask: u64) {
        for j in 0..self.height {
            for i in 0..self.width {
                let bit = (mask >> (j * self.width + i)) & 1;
                let k = self.index(i as i64, j as i64);
                self.values[k] = if bit == 1 { -1 } else { 1 };
            }
        }
    }

    /// Values are `+-1` and the frame carries the trace.
    pub fn is_valid(&self) -> bool {
        (-1..=self.height as i64).all(|j| {
            (-1..=self.width as i64).all(|i| {
                let s = self.get(i, j);
                (s == 1 || s == -1) && (!self.is_frame(i, j) || s == self.trace(i, j))
            })
        })
    }

    /// Global spin flip, frame included (the trace flips with it).
    pub fn flipped(&self) -> Self {
        let mut out = self.clone();
        out.nu = [-self.nu[0], -self.nu[1]];
        out.offset = -self.offset;
        for s in &mut out.values {
            *s = -*s;
        }
        out
    }

    /// Bonds with at least one free endpoint, as `(site, site, weight)` in
    /// value-array indices.
    fn bonds<S: Scalar>(&self, field: &BondField<S>) -> Vec<(usize, usize, S)> {
        let (w, h) = (self.width as i64, self.height as i64);
        let mut out = Vec::new();
        for j in -1..=h {
            for i in -1..=w {
                let (x, y) = (self.origin[0] + i, self.origin[1] + j);
                if i < w && !(self.is_frame(i, j) && self.is_frame(i + 1, j)) {
                    out.push((self.index(i, j), self.index(i + 1, j), field.h(x, y)));
                }
                if j < h && !(self.is_frame(i, j) && self.is_frame(i, j + 1)) {
                    out.push((self.index(i, j), self.index(i, j + 1), field.v(x, y)));
                }
            }
        }
        out
    }
}

/// `(1/8) sum_{ordered pairs} c_ij (u_i - u_j)^2` over bonds with a free endpoint.
pub fn spin_energy<S: Scalar>(field: &BondField<S>, window: &SpinWindow) -> S {
    energy_over(&window.bonds(field), &window.values)
}

fn energy_over<S: Scalar>(bonds: &[(usize, usize, S)], values: &[i8]) -> S {
    let raw = bonds.iter().fold(S::zero(), |acc, &(a, b, c)| {
        let d = S::from_i64((values[a] - values[b]) as i64);
        // Both orderings of the pair.
        acc + S::two() * c * d * d
    });
    raw / S::from_usize(8)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleMode {
    /// Enumeration when the window is small enough, dual path otherwise.
    Auto,
    Exhaustive,
    DualPath,
}

/// Minimum over all configurations of the free sites.
pub fn min_interface_energy<S: Scalar>(field: &BondField<S>, window: &SpinWindow, mode: OracleMode) -> Result<S> {
    match mode {
        OracleMode::Exhaustive => exhaustive_min(field, window).map(|(e, _)| e),
        OracleMode::DualPath => Ok(dual_path_min(field, window)),
        OracleMode::Auto if window.free_sites() <= EXHAUSTIVE_LIMIT => exhaustive_min(field, window).map(|(e, _)| e),
        OracleMode::Auto => Ok(dual_path_min(field, window)),
    }
}

/// Minimal energy by enumeration, with a minimizing configuration.
pub fn exhaustive_min<S: Scalar>(field: &BondField<S>, window: &SpinWindow) -> Result<(S, SpinWindow)> {
    let n = window.free_sites();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::WindowTooLarge { sites: n, limit: EXHAUSTIVE_LIMIT });
    }
    let bonds = window.bonds(field);
    let mut scratch = window.clone();
    let mut best: Option<(S, u64)> = None;
    for mask in 0..(1u64 << n) {
        scratch.set_from_mask(mask);
        let e = energy_over(&bonds, &scratch.values);
        if best.is_none_or(|(b, _)| e < b) {
            best = Some((e, mask));
        }
    }
    let (energy, mask) = best.expect("at least one configuration");
    scratch.set_from_mask(mask);
    Ok((energy, scratch))
}

/// Frame sites in counterclockwise order starting at the lower-left corner.
fn ring(width: i64, height: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for i in -1..width {
        out.push((i, -1));
    }
    for j in -1..height {
        out.push((width, j));
    }
    for i in (0..=width).rev() {
        out.push((i, height));
    }
    for j in (0..=height).rev() {
        out.push((-1, j));
    }
    out
}

/// Minimal energy as the cheapest dual path between the two sign changes
/// of the frame.
///
/// Dual nodes are the unit plaquettes of `[-1, width] x [-1, height]`; two
/// plaquettes are adjacent across a bond with a free endpoint, at that bond's
/// weight. Each sign change on the frame is a frame bond, which borders
/// exactly one plaquette.
pub fn dual_path_min<S: Scalar>(field: &BondField<S>, window: &SpinWindow) -> S {
    let (w, h) = (window.width as i64, window.height as i64);
    let cycle = ring(w, h);
    let changes: Vec<usize> = (0..cycle.len())
        .filter(|&k| {
            let (a, b) = (cycle[k], cycle[(k + 1) % cycle.len()]);
            window.get(a.0, a.1) != window.get(b.0, b.1)
        })
        .collect();
    if changes.is_empty() {
        return S::zero();
    }
    debug_assert_eq!(changes.len(), 2, "a half-plane trace changes sign twice on the frame");

    // Plaquette (p, q) has lower-left site (p, q), -1 <= p < w, -1 <= q < h.
    let (pw, ph) = ((w + 1) as usize, (h + 1) as usize);
    let node = |p: i64, q: i64| ((q + 1) as usize) * pw + (p + 1) as usize;
    let inside = |p: i64, q: i64| p >= -1 && p < w && q >= -1 && q < h;
    let plaquette_of = |k: usize| {
        let (a, b) = (cycle[k], cycle[(k + 1) % cycle.len()]);
        // Frame bonds run counterclockwise, so the region lies to their left.
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        match (dx, dy) {
            (1, 0) => (a.0, a.1),
            (0, 1) => (a.0 - 1, a.1),
            (-1, 0) => (b.0, b.1 - 1),
            _ => (b.0, b.1),
        }
    };
    let source = plaquette_of(changes[0]);
    let target = plaquette_of(changes[1]);
    debug_assert!(inside(source.0, source.1) && inside(target.0, target.1));
    let is_frame = |i: i64, j: i64| window.is_frame(i, j);
    let (ox, oy) = (window.origin[0], window.origin[1]);
    let dist = dijkstra(pw * ph, node(source.0, source.1), Some(node(target.0, target.1)), |u, out| {
        let (p, q) = ((u % pw) as i64 - 1, (u / pw) as i64 - 1);
        // Right: across the vertical bond {(p+1, q), (p+1, q+1)}.
        if inside(p + 1, q) && !(is_frame(p + 1, q) && is_frame(p + 1, q + 1)) {
            out.push((node(p + 1, q), field.v(ox + p + 1, oy + q)));
        }
        if inside(p - 1, q) && !(is_frame(p, q) && is_frame(p, q + 1)) {
            out.push((node(p - 1, q), field.v(ox + p, oy + q)));
        }
        // Up: across the horizontal bond {(p, q+1), (p+1, q+1)}.
        if inside(p, q + 1) && !(is_frame(p, q + 1) && is_frame(p + 1, q + 1)) {
            out.push((node(p, q + 1), field.h(ox + p, oy + q + 1)));
        }
        if inside(p, q - 1) && !(is_frame(p, q) && is_frame(p + 1, q)) {
            out.push((node(p, q - 1), field.h(ox + p, oy + q)));
        }
    });
    dist[node(target.0, target.1)].expect("plaquette region is connected")
}

/// Number of cut bonds on the boundary of each plaquette, frame bonds included.
///
/// Every entry is even: the cut set is a union of dual paths whose endpoints
/// can only sit on the outer face.
pub fn cut_degrees(window: &SpinWindow) -> Vec<usize> {
    let (w, h) = (window.width as i64, window.height as i64);
    let mut out = Vec::with_capacity(((w + 1) * (h + 1)) as usize);
    for q in -1..h {
        for p in -1..w {
            let corners = [(p, q), (p + 1, q), (p + 1, q + 1), (p, q + 1)];
            let cuts = (0..4)
                .filter(|&k| {
                    let (a, b) = (corners[k], corners[(k + 1) % 4]);
                    window.get(a.0, a.1) != window.get(b.0, b.1)
                })
                .count();
            out.push(cuts);
        }
    }
    out
}

/// Oracle report document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub nu: [f64; 2],
    pub window: [usize; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustive: Option<f64>,
    pub dual_path: f64,
    pub agree: bool,
}

/// Runs the dual path and, when the window is small enough, enumeration.
pub fn oracle_report<S: Scalar>(field: &BondField<S>, window: &SpinWindow) -> Result<OracleReport> {
    let dual = dual_path_min(field, window);
    let exhaustive =
        if window.free_sites() <= EXHAUSTIVE_LIMIT { Some(exhaustive_min(field, window)?.0) } else { None };
    Ok(OracleReport {
        nu: window.nu,
        window: [window.width, window.height],
        exhaustive: exhaustive.map(Scalar::to_f64),
        dual_path: dual.to_f64(),
        agree: exhaustive.is_none_or(|e| e == dual),
    })
}
