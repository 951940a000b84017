//! Projection and averaging bounds, and the optimal-bounds membership test.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homogenize::SurfaceTensionProfile;
use crate::lattice::BondField;
use crate::scalar::{Real, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Projection,
    Averaging,
    Mixture,
    Witness,
}

/// Coefficients of the comparison function `c1 |x1| + c2 |x2|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPair<S> {
    pub c1: S,
    pub c2: S,
    pub kind: BoundKind,
}

impl<S: Scalar> BoundPair<S> {
    pub fn new(c1: S, c2: S, kind: BoundKind) -> Self {
        Self { c1, c2, kind }
    }

    pub fn evaluate(&self, x: [S; 2]) -> S {
        self.c1 * x[0].abs() + self.c2 * x[1].abs()
    }

    pub fn as_array(&self) -> [S; 2] {
        [self.c1, self.c2]
    }
}

fn mean<S: Scalar>(values: impl Iterator<Item = S>, count: usize) -> S {
    values.fold(S::zero(), |acc, x| acc + x) / S::from_usize(count)
}

/// Lower bound: `c1` averages the row minima of horizontal weights and `c2`
/// the column minima of vertical weights.
pub fn projection_bounds<S: Scalar>(field: &BondField<S>) -> BoundPair<S> {
    let t = field.period();
    let row_min = |y: usize| {
        let row = field.horizontal_row(y);
        row.iter().copied().fold(row[0], S::min_of)
    };
    let col_min = |x: usize| {
        let mut col = field.vertical_column(x);
        let first = col.next().expect("period is positive");
        col.fold(first, S::min_of)
    };
    BoundPair::new(mean((0..t).map(row_min), t), mean((0..t).map(col_min), t), BoundKind::Projection)
}

/// Upper bound: means of all horizontal and all vertical weights of a cell.
pub fn averaging_bounds<S: Scalar>(field: &BondField<S>) -> BoundPair<S> {
    let cells = field.period() * field.period();
    BoundPair::new(
        mean(field.horizontal().iter().copied(), cells),
        mean(field.vertical().iter().copied(), cells),
        BoundKind::Averaging,
    )
}

/// The averaging bound rewritten through the orientation fractions:
/// `(theta_h beta + (1 - theta_h) alpha, theta_v beta + (1 - theta_v) alpha)`.
pub fn mixture_upper_bound<S: Scalar>(field: &BondField<S>) -> Result<BoundPair<S>> {
    let (alpha, beta) = field.levels().ok_or(Error::NotMixture)?;
    let vf = field.volume_fractions()?;
    let cells = S::from_usize(field.period() * field.period());
    let coeff = |count: usize| {
        let frac = S::from_usize(count) / cells;
        frac * beta + (S::one() - frac) * alpha
    };
    Ok(BoundPair::new(coeff(vf.beta_horizontal), coeff(vf.beta_vertical), BoundKind::Mixture))
}

/// `theta beta + (1 - theta) alpha`.
pub fn mixture_mean<S: Scalar>(theta: S, alpha: S, beta: S) -> S {
    theta * beta + (S::one() - theta) * alpha
}

/// Direction and size of the largest violated constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation<S> {
    pub nu: [S; 2],
    pub amount: S,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipVerdict<S> {
    pub member: bool,
    pub witness: Option<BoundPair<S>>,
    pub worst_violation: Option<Violation<S>>,
    pub theta: S,
    pub alpha: S,
    pub beta: S,
    pub tolerance: S,
}

impl<S: Real> MembershipVerdict<S> {
    pub fn to_document(&self) -> VerdictDocument {
        VerdictDocument {
            member: self.member,
            witness: self.witness.map(|w| [w.c1.to_f64(), w.c2.to_f64()]),
            violation: self
                .worst_violation
                .map(|v| ViolationDocument { nu: v.nu.map(Scalar::to_f64), amount: v.amount.to_f64() }),
            theta: self.theta.to_f64(),
            alpha: self.alpha.to_f64(),
            beta: self.beta.to_f64(),
            tol: self.tolerance.to_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictDocument {
    pub member: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<ViolationDocument>,
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationDocument {
    pub nu: [f64; 2],
    pub amount: f64,
}

/// Decides whether the sampled `phi` satisfies
/// `alpha |x|_1 <= phi <= c1 |x1| + c2 |x2|` for some `c1, c2 <= beta` with
/// `c1 + c2 = 2 (theta beta + (1 - theta) alpha)`.
///
/// Writing `c1 = m + s`, `c2 = m - s`, every sample gives a half-line
/// constraint on `s`; together with `|s| <= beta - m` they cut out an
/// interval whose midpoint is reported as the witness.
pub fn theorem_membership<S: Real>(
    profile: &SurfaceTensionProfile<S>,
    alpha: S,
    beta: S,
    theta: S,
    tol: S,
) -> Result<MembershipVerdict<S>> {
    for axis in [[1, 0], [0, 1]] {
        if profile.sample(axis).is_none() {
            return Err(Error::MissingAxisDirection(axis));
        }
    }
    if !(S::zero() < alpha && alpha < beta) {
        return Err(Error::InvalidLevels { alpha: alpha.to_f64(), beta: beta.to_f64() });
    }
    if !(theta >= S::zero() && theta <= S::one()) || !(tol >= S::zero()) {
        return Err(Error::InvalidParameter("need theta in [0, 1] and tol >= 0".into()));
    }
    let m = mixture_mean(theta, alpha, beta);
    let radius = beta - m;

    // Each sample: phi <= m |nu|_1 + s d + tol with d = |nu1| - |nu2|,
    // i.e. s d >= excess - tol.
    let constraints: Vec<([S; 2], S, S)> = profile
        .samples
        .iter()
        .map(|s| {
            let l1 = s.nu[0].abs() + s.nu[1].abs();
            (s.nu, s.nu[0].abs() - s.nu[1].abs(), s.value - m * l1)
        })
        .collect();

    let mut lo = -radius;
    let mut hi = radius;
    let mut upper_ok = true;
    for &(_, d, excess) in &constraints {
        let rhs = excess - tol;
        if d > S::zero() {
            lo = lo.max(rhs / d);
        } else if d < S::zero() {
            hi = hi.min(rhs / d);
        } else if rhs > S::zero() {
            upper_ok = false;
        }
    }
    upper_ok &= lo <= hi;

    let mut lower_violation: Option<Violation<S>> = None;
    for s in &profile.samples {
        let short = alpha * (s.nu[0].abs() + s.nu[1].abs()) - tol - s.value;
        if short > S::zero() && lower_violation.is_none_or(|v| short > v.amount) {
            lower_violation = Some(Violation { nu: s.nu, amount: short });
        }
    }

    let upper_violation = if upper_ok { None } else { Some(worst_upper_violation(&constraints, radius, tol)) };
    let worst = match (lower_violation, upper_violation) {
        (Some(a), Some(b)) => Some(if a.amount >= b.amount { a } else { b }),
        (a, b) => a.or(b),
    };
    let member = worst.is_none();
    let two = S::two();
    let witness = member.then(|| {
        let s = (lo + hi) / two;
        BoundPair::new(m + s, m - s, BoundKind::Witness)
    });
    Ok(MembershipVerdict { member, witness, worst_violation: worst, theta, alpha, beta, tolerance: tol })
}

/// Minimizes over admissible `s` the largest constraint excess and reports
/// the sample attaining it. The objective is a maximum of affine functions of
/// `s`, so its minimum sits at an endpoint or at a crossing of two lines.
fn worst_upper_violation<S: Real>(constraints: &[([S; 2], S, S)], radius: S, tol: S) -> Violation<S> {
    // Excess of constraint j at s: excess_j - tol - s d_j.
    let objective = |s: S| {
        constraints
            .iter()
            .map(|&(nu, d, e)| (e - tol - s * d, nu))
            .fold((S::neg_infinity(), [S::zero(); 2]), |best, cur| if cur.0 > best.0 { cur } else { best })
    };
    let mut candidates = vec![-radius, radius, S::zero()];
    for (i, a) in constraints.iter().enumerate() {
        for b in &constraints[i + 1..] {
            if a.1 != b.1 {
                let s = (a.2 - b.2) / (a.1 - b.1);
                if s.abs() <= radius {
                    candidates.push(s);
                }
            }
        }
    }
    let (amount, nu) = candidates.into_iter().map(objective).fold((S::infinity(), [S::zero(); 2]), |best, cur| {
        if cur.0 < best.0 {
            cur
        } else {
            best
        }
    });
    Violation { nu, amount }
}
