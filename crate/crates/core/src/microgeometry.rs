//! Periodic alpha/beta geometries whose surface tension is known exactly.
//!
//! All constructions share one layout. Horizontal bonds in rows `0..N1` are
//! beta; every other row has an alpha bond in column 0. Vertical bonds in
//! columns `0..N2` are beta; every other column has an alpha bond in row 0.
//! Row minima then give `c1 = (N1 beta + (T - N1) alpha) / T` (and likewise
//! `c2`), and the dual corridors along column 0 and row 0 cost exactly
//! `T c1` and `T c2` per period, so `phi = c1 |nu1| + c2 |nu2|` whatever the
//! remaining bonds are.

use num_rational::Rational64;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bounds::mixture_mean;
use crate::error::{Error, Result};
use crate::lattice::{BondField, BondFieldDocument};
use crate::scalar::{Real, Scalar};

/// Parameters of the special construction.
///
/// `t_i T` and `T^2 theta_i` must be integers with `t_i < theta_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpecialSpec {
    pub period: usize,
    pub t1: Rational64,
    pub t2: Rational64,
    pub theta1: Rational64,
    pub theta2: Rational64,
    pub seed: u64,
}

impl SpecialSpec {
    /// Overall volume fraction `(theta1 + theta2) / 2`.
    pub fn theta(&self) -> Rational64 {
        (self.theta1 + self.theta2) / 2
    }

    fn counts(&self) -> Result<(usize, usize, usize, usize)> {
        let t = self.period as i64;
        let integral = |r: Rational64, scale: i64, what: &str| -> Result<usize> {
            let v = r * scale;
            if !v.is_integer() || v < Rational64::from_integer(0) {
                return Err(Error::InvalidParameter(format!(
                    "{what} = {r} is not a nonnegative multiple of 1/{scale}"
                )));
            }
            Ok(v.to_integer() as usize)
        };
        Ok((
            integral(self.t1, t, "t1")?,
            integral(self.t2, t, "t2")?,
            integral(self.theta1, t * t, "theta1")?,
            integral(self.theta2, t * t, "theta2")?,
        ))
    }
}

fn check_levels<S: Scalar>(alpha: S, beta: S) -> Result<()> {
    if S::zero() < alpha && alpha < beta {
        Ok(())
    } else {
        Err(Error::InvalidLevels { alpha: alpha.to_f64(), beta: beta.to_f64() })
    }
}

/// Rows `0..n1` of horizontal bonds and columns `0..n2` of vertical bonds are
/// beta, all else alpha.
pub fn laminate<S: Scalar>(period: usize, n1: usize, n2: usize, alpha: S, beta: S) -> Result<BondField<S>> {
    if period == 0 || n1 > period || n2 > period {
        return Err(Error::InvalidParameter(format!("laminate needs 0 <= N1, N2 <= T (T={period}, N1={n1}, N2={n2})")));
    }
    check_levels(alpha, beta)?;
    let t = period;
    let mut h = vec![alpha; t * t];
    let mut v = vec![alpha; t * t];
    for y in 0..t {
        for x in 0..t {
            if y < n1 {
                h[y * t + x] = beta;
            }
            if x < n2 {
                v[y * t + x] = beta;
            }
        }
    }
    BondField::from_flat(t, h, v, Some(alpha), Some(beta))
}

/// The special construction with `t_i < theta_i` enforced.
pub fn prop_special_field<S: Scalar>(spec: &SpecialSpec, alpha: S, beta: S) -> Result<BondField<S>> {
    if spec.t1 >= spec.theta1 || spec.t2 >= spec.theta2 {
        return Err(Error::InvalidParameter(format!(
            "need t1 < theta1 and t2 < theta2 (t1={}, theta1={}, t2={}, theta2={})",
            spec.t1, spec.theta1, spec.t2, spec.theta2
        )));
    }
    let (n1, n2, b1, b2) = spec.counts()?;
    corridor_field(spec.period, [n1, n2], [b1, b2], spec.seed, alpha, beta)
}

/// Shared builder: `n[i]` full beta rows/columns, `b[i]` beta bonds per
/// orientation, remaining betas placed by a seeded sample away from the
/// alpha corridor. Allows `b[i] = n[i] T` (pure laminate rows).
fn corridor_field<S: Scalar>(
    period: usize,
    n: [usize; 2],
    b: [usize; 2],
    seed: u64,
    alpha: S,
    beta: S,
) -> Result<BondField<S>> {
    check_levels(alpha, beta)?;
    let t = period;
    if t == 0 || n[0] > t || n[1] > t {
        return Err(Error::InvalidParameter(format!("need 0 <= N1, N2 <= T (T={t}, N={n:?})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fields = [vec![alpha; t * t], vec![alpha; t * t]];
    for (i, weights) in fields.iter_mut().enumerate() {
        let forced = n[i] * t;
        let free = (t - n[i]) * (t - 1);
        if b[i] < forced || b[i] - forced > free {
            let name = if i == 0 { "horizontal" } else { "vertical" };
            return Err(Error::Infeasible(format!(
                "{name}: {} beta bonds requested, but {forced} are forced and only {free} free slots remain",
                b[i]
            )));
        }
        // Position of the j-th bond of line `line` at offset `along`, where
        // lines are rows (horizontal) or columns (vertical).
        let at = |line: usize, along: usize| if i == 0 { line * t + along } else { along * t + line };
        for line in 0..n[i] {
            for along in 0..t {
                weights[at(line, along)] = beta;
            }
        }
        for slot in index::sample(&mut rng, free.max(1), b[i] - forced) {
            let line = n[i] + slot / (t - 1).max(1);
            let along = 1 + slot % (t - 1).max(1);
            weights[at(line, along)] = beta;
        }
    }
    let [h, v] = fields;
    BondField::from_flat(t, h, v, Some(alpha), Some(beta))
}

/// Outcome of [`realize`], with every rounded quantity reported.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization<S> {
    pub field: BondField<S>,
    pub target: [S; 2],
    pub target_theta: S,
    pub n: [usize; 2],
    pub t: [Rational64; 2],
    pub thetas: [Rational64; 2],
    pub achieved: [S; 2],
    pub achieved_theta: Rational64,
}

/// Builds a field with `phi = c1 |nu1| + c2 |nu2|` (up to rounding of
/// `t_i` to multiples of `1/T`) and volume fraction `round(2 T^2 theta) / (2 T^2)`.
pub fn realize<S: Real>(c1: S, c2: S, theta: S, alpha: S, beta: S, period: usize, seed: u64) -> Result<Realization<S>> {
    check_levels(alpha, beta)?;
    if period == 0 {
        return Err(Error::InvalidParameter("period T must be positive".into()));
    }
    let eps = S::geom_eps() * beta;
    if !(theta >= S::zero() && theta <= S::one()) {
        return Err(Error::InvalidParameter("theta must lie in [0, 1]".into()));
    }
    for c in [c1, c2] {
        if !(c >= alpha - eps && c <= beta + eps) {
            return Err(Error::InvalidParameter(format!("coefficient {} outside [alpha, beta]", c.to_f64())));
        }
    }
    let m = mixture_mean(theta, alpha, beta);
    if c1 + c2 > S::two() * m + eps {
        return Err(Error::InvalidParameter(format!(
            "c1 + c2 = {} exceeds 2 (theta beta + (1 - theta) alpha) = {}",
            (c1 + c2).to_f64(),
            (S::two() * m).to_f64()
        )));
    }
    let t = period;
    let tf = S::from_usize(t);
    let exact = [c1, c2].map(|c| ((c - alpha) / (beta - alpha) * tf).to_f64().clamp(0.0, t as f64));
    let mut n = exact.map(|r| r.round() as usize);
    let cells = t * t;
    let total = (S::from_usize(2 * cells) * theta).round().to_f64() as usize;
    // Rounding both rows up can overshoot the beta budget; undo the larger round-up.
    while (n[0] + n[1]) * t > total {
        let up = [n[0] as f64 - exact[0], n[1] as f64 - exact[1]];
        let i = if up[0] >= up[1] { 0 } else { 1 };
        if up[i] <= 0.0 {
            break;
        }
        n[i] -= 1;
    }
    let lo = [n[0] * t, n[1] * t];
    let hi = [cells - t + n[0], cells - t + n[1]];
    let b1_min = lo[0].max(total.saturating_sub(hi[1]));
    let b1_max = hi[0].min(total.saturating_sub(lo[1]));
    if total < lo[0] + lo[1] || b1_min > b1_max {
        return Err(Error::Infeasible(format!(
            "no split of {total} beta bonds with N1={}, N2={} at T={t}",
            n[0], n[1]
        )));
    }
    // Share the free beta bonds in proportion to the free capacity per orientation.
    let extra = total - lo[0] - lo[1];
    let cap = [hi[0] - lo[0], hi[1] - lo[1]];
    let share =
        if cap[0] + cap[1] == 0 { 0 } else { ((extra * cap[0]) as f64 / (cap[0] + cap[1]) as f64).round() as usize };
    let b1 = (lo[0] + share).clamp(b1_min, b1_max);
    let b = [b1, total - b1];
    let field = corridor_field(t, n, b, seed, alpha, beta)?;

    let coeff = |k: usize| (S::from_usize(k) * beta + S::from_usize(t - k) * alpha) / tf;
    let frac = |k: usize, d: usize| Rational64::new(k as i64, d as i64);
    Ok(Realization {
        field,
        target: [c1, c2],
        target_theta: theta,
        n,
        t: [frac(n[0], t), frac(n[1], t)],
        thetas: [frac(b[0], cells), frac(b[1], cells)],
        achieved: [coeff(n[0]), coeff(n[1])],
        achieved_theta: frac(total, 2 * cells),
    })
}

/// Provenance block attached to generated field documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    pub params: serde_json::Value,
    pub achieved: serde_json::Value,
}

fn ratio_str(r: Rational64) -> String {
    r.to_string()
}

/// Bond-field document plus the achieved fractions of a mixture field.
pub fn document_with_provenance<S: Scalar>(
    field: &BondField<S>,
    construction: &str,
    params: serde_json::Value,
) -> Result<BondFieldDocument> {
    let vf = field.volume_fractions()?;
    let proj = crate::bounds::projection_bounds(field);
    let achieved = json!({
        "c1": proj.c1.to_f64(),
        "c2": proj.c2.to_f64(),
        "theta": ratio_str(vf.theta),
        "theta_h": ratio_str(vf.theta_h),
        "theta_v": ratio_str(vf.theta_v),
    });
    let mut doc = field.to_document();
    let prov = Provenance { construction: construction.to_string(), params, achieved };
    doc.provenance = Some(serde_json::to_value(prov)?);
    Ok(doc)
}
