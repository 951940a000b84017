//! Periodic bond fields on the square lattice.
//!
//! A [`BondField`] stores one periodicity cell of `T x T` horizontal and
//! `T x T` vertical bonds. Entry `h[y][x]` is the weight of the unordered
//! bond `{(x, y), (x + 1, y)}` and `v[y][x]` the weight of
//! `{(x, y), (x, y + 1)}`; every other bond is obtained by reducing its base
//! site modulo `T`. Each unordered bond belongs to the cell that contains its
//! midpoint, so a cell holds exactly `2 T^2` bonds.

use std::fmt;

use num_rational::Rational64;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Orientation::Horizontal => f.write_str("horizontal"),
            Orientation::Vertical => f.write_str("vertical"),
        }
    }
}

/// T-periodic positive bond weights, optionally tagged as an alpha/beta mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct BondField<S> {
    period: usize,
    alpha: Option<S>,
    beta: Option<S>,
    horizontal: Vec<S>,
    vertical: Vec<S>,
}

impl<S: Scalar> BondField<S> {
    /// Validating constructor from nested `[y][x]` arrays.
    ///
    /// When both `alpha` and `beta` are given the field is mixture-tagged and
    /// every weight must equal one of them exactly.
    pub fn new(
        period: usize,
        horizontal: Vec<Vec<S>>,
        vertical: Vec<Vec<S>>,
        alpha: Option<S>,
        beta: Option<S>,
    ) -> Result<Self> {
        let h = flatten(period, horizontal, Orientation::Horizontal)?;
        let v = flatten(period, vertical, Orientation::Vertical)?;
        Self::from_flat(period, h, v, alpha, beta)
    }

    /// Validating constructor from row-major `y * T + x` storage.
    pub fn from_flat(
        period: usize,
        horizontal: Vec<S>,
        vertical: Vec<S>,
        alpha: Option<S>,
        beta: Option<S>,
    ) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidParameter("period T must be positive".into()));
        }
        let cells = period * period;
        for (name, len) in [("horizontal", horizontal.len()), ("vertical", vertical.len())] {
            if len != cells {
                return Err(Error::ShapeMismatch {
                    expected: format!("{cells} {name} weights"),
                    found: format!("{len}"),
                });
            }
        }
        for (orientation, weights) in [(Orientation::Horizontal, &horizontal), (Orientation::Vertical, &vertical)] {
            for (i, &w) in weights.iter().enumerate() {
                if !(w > S::zero()) {
                    return Err(Error::NonPositiveWeight { orientation, x: i % period, y: i / period });
                }
            }
        }
        for level in [alpha, beta].into_iter().flatten() {
            if !(level > S::zero()) {
                return Err(Error::InvalidParameter(format!("mixture level {} must be positive", level.to_f64())));
            }
        }
        if let (Some(a), Some(b)) = (alpha, beta) {
            if !(a < b) {
                return Err(Error::InvalidLevels { alpha: a.to_f64(), beta: b.to_f64() });
            }
            for (orientation, weights) in [(Orientation::Horizontal, &horizontal), (Orientation::Vertical, &vertical)] {
                if let Some(i) = weights.iter().position(|&w| w != a && w != b) {
                    return Err(Error::NotInMixture {
                        orientation,
                        x: i % period,
                        y: i / period,
                        weight: weights[i].to_f64(),
                    });
                }
            }
        }
        Ok(Self { period, alpha, beta, horizontal, vertical })
    }

    /// Constant field, untagged.
    pub fn homogeneous(period: usize, weight: S) -> Result<Self> {
        let cells = period * period;
        Self::from_flat(period, vec![weight; cells], vec![weight; cells], None, None)
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn alpha(&self) -> Option<S> {
        self.alpha
    }

    pub fn beta(&self) -> Option<S> {
        self.beta
    }

    /// `(alpha, beta)` when the field is mixture-tagged.
    pub fn levels(&self) -> Option<(S, S)> {
        self.alpha.zip(self.beta)
    }

    pub fn is_mixture(&self) -> bool {
        self.levels().is_some()
    }

    #[inline]
    fn index(&self, x: i64, y: i64) -> usize {
        let t = self.period as i64;
        (y.rem_euclid(t) * t + x.rem_euclid(t)) as usize
    }

    /// Weight of the horizontal bond `{(x, y), (x + 1, y)}`.
    #[inline]
    pub fn h(&self, x: i64, y: i64) -> S {
        self.horizontal[self.index(x, y)]
    }

    /// Weight of the vertical bond `{(x, y), (x, y + 1)}`.
    #[inline]
    pub fn v(&self, x: i64, y: i64) -> S {
        self.vertical[self.index(x, y)]
    }

    pub fn weight(&self, orientation: Orientation, x: i64, y: i64) -> S {
        match orientation {
            Orientation::Horizontal => self.h(x, y),
            Orientation::Vertical => self.v(x, y),
        }
    }

    pub fn horizontal(&self) -> &[S] {
        &self.horizontal
    }

    pub fn vertical(&self) -> &[S] {
        &self.vertical
    }

    /// Row `y` of horizontal weights.
    pub fn horizontal_row(&self, y: usize) -> &[S] {
        &self.horizontal[y * self.period..(y + 1) * self.period]
    }

    /// Column `x` of vertical weights, bottom to top.
    pub fn vertical_column(&self, x: usize) -> impl Iterator<Item = S> + '_ {
        (0..self.period).map(move |y| self.vertical[y * self.period + x])
    }

    pub fn min_weight(&self) -> S {
        self.all_weights().fold(self.horizontal[0], S::min_of)
    }

    pub fn max_weight(&self) -> S {
        self.all_weights().fold(self.horizontal[0], S::max_of)
    }

    fn all_weights(&self) -> impl Iterator<Item = S> + '_ {
        self.horizontal.iter().chain(self.vertical.iter()).copied()
    }

    /// Reflection across the diagonal `x = y`, which swaps orientations.
    pub fn transpose(&self) -> Self {
        let t = self.period;
        let mut horizontal = Vec::with_capacity(t * t);
        let mut vertical = Vec::with_capacity(t * t);
        for y in 0..t {
            for x in 0..t {
                horizontal.push(self.vertical[x * t + y]);
                vertical.push(self.horizontal[x * t + y]);
            }
        }
        Self { period: t, alpha: self.alpha, beta: self.beta, horizontal, vertical }
    }

    /// Multiplies every weight (and the mixture levels) by `lambda > 0`.
    pub fn scale(&self, lambda: S) -> Result<Self> {
        if !(lambda > S::zero()) {
            return Err(Error::InvalidParameter(format!("scale factor must be positive, got {}", lambda.to_f64())));
        }
        Ok(Self {
            period: self.period,
            alpha: self.alpha.map(|a| a * lambda),
            beta: self.beta.map(|b| b * lambda),
            horizontal: self.horizontal.iter().map(|&w| w * lambda).collect(),
            vertical: self.vertical.iter().map(|&w| w * lambda).collect(),
        })
    }

    /// Converts the weights to another scalar type.
    pub fn convert<U: Scalar>(&self, f: impl Fn(S) -> U) -> Result<BondField<U>> {
        BondField::from_flat(
            self.period,
            self.horizontal.iter().map(|&w| f(w)).collect(),
            self.vertical.iter().map(|&w| f(w)).collect(),
            self.alpha.map(&f),
            self.beta.map(&f),
        )
    }

    /// Exact beta-bond fractions of one periodicity cell.
    pub fn volume_fractions(&self) -> Result<VolumeFractions> {
        let (_, beta) = self.levels().ok_or(Error::NotMixture)?;
        let count = |w: &[S]| w.iter().filter(|&&c| c == beta).count();
        Ok(VolumeFractions::from_counts(self.period, count(&self.horizontal), count(&self.vertical)))
    }

    pub fn to_document(&self) -> BondFieldDocument {
        let rows = |w: &[S]| w.chunks(self.period).map(|row| row.iter().map(|&c| c.to_f64()).collect()).collect();
        BondFieldDocument {
            period: self.period,
            alpha: self.alpha.map(Scalar::to_f64),
            beta: self.beta.map(Scalar::to_f64),
            horizontal: rows(&self.horizontal),
            vertical: rows(&self.vertical),
            provenance: None,
        }
    }

    pub fn from_document(doc: &BondFieldDocument) -> Result<Self> {
        let conv = |x: f64| S::from_f64(x).ok_or_else(|| Error::InvalidParameter(format!("non-finite number {x}")));
        let rows = |a: &Vec<Vec<f64>>| -> Result<Vec<Vec<S>>> {
            a.iter().map(|row| row.iter().map(|&x| conv(x)).collect()).collect()
        };
        Self::new(
            doc.period,
            rows(&doc.horizontal)?,
            rows(&doc.vertical)?,
            doc.alpha.map(conv).transpose()?,
            doc.beta.map(conv).transpose()?,
        )
    }

    pub fn to_json(&self) -> String {
        self.to_document().to_json()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: BondFieldDocument = serde_json::from_str(text)?;
        Self::from_document(&doc)
    }
}

fn flatten<S: Scalar>(period: usize, rows: Vec<Vec<S>>, orientation: Orientation) -> Result<Vec<S>> {
    if rows.len() != period || rows.iter().any(|r| r.len() != period) {
        let found = rows.iter().map(|r| r.len().to_string()).collect::<Vec<_>>().join(",");
        return Err(Error::ShapeMismatch {
            expected: format!("{period}x{period} {orientation} array"),
            found: format!("{} rows of lengths [{found}]", rows.len()),
        });
    }
    Ok(rows.into_iter().flatten().collect())
}

/// Exact beta-bond fractions.
///
/// `theta_h` and `theta_v` count unordered bonds per orientation over `T^2`;
/// `theta` is their mean, which equals the ordered-pair count over `4 T^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VolumeFractions {
    pub theta: Rational64,
    pub theta_h: Rational64,
    pub theta_v: Rational64,
    pub beta_horizontal: usize,
    pub beta_vertical: usize,
    pub period: usize,
}

impl VolumeFractions {
    pub fn from_counts(period: usize, beta_horizontal: usize, beta_vertical: usize) -> Self {
        let cells = (period * period) as i64;
        let theta_h = Rational64::new(beta_horizontal as i64, cells);
        let theta_v = Rational64::new(beta_vertical as i64, cells);
        Self { theta: (theta_h + theta_v) / 2, theta_h, theta_v, beta_horizontal, beta_vertical, period }
    }

    pub fn total_beta(&self) -> usize {
        self.beta_horizontal + self.beta_vertical
    }
}

/// Field whose `round(2 T^2 theta)` beta bonds are placed uniformly without
/// replacement among the `2 T^2` bonds of a cell (ChaCha8 seeded with `seed`).
pub fn random_mixture<S: Scalar>(period: usize, theta: f64, alpha: S, beta: S, seed: u64) -> Result<BondField<S>> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!("theta {theta} outside [0, 1]")));
    }
    if period == 0 {
        return Err(Error::InvalidParameter("period T must be positive".into()));
    }
    let cells = period * period;
    let bonds = 2 * cells;
    let count = (bonds as f64 * theta).round() as usize;
    let mut weights = vec![alpha; bonds];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in index::sample(&mut rng, bonds, count) {
        weights[i] = beta;
    }
    let vertical = weights.split_off(cells);
    BondField::from_flat(period, weights, vertical, Some(alpha), Some(beta))
}

/// JSON form of a bond field. Extra keys are ignored on input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BondFieldDocument {
    #[serde(rename = "T")]
    pub period: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub horizontal: Vec<Vec<f64>>,
    pub vertical: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

impl BondFieldDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bond field document serializes")
    }
}
