//! Domain values shared by every stage: decision vectors, box bounds,
//! fitness values and population members.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in decision space. Every coordinate is finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DecisionVector(Vec<f64>);

impl DecisionVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(DecisionVector(coords))
    }

    /// Wraps coordinates produced by arithmetic on finite inputs.
    pub(crate) fn from_finite(coords: Vec<f64>) -> Self {
        debug_assert!(coords.iter().all(|c| c.is_finite()));
        DecisionVector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        DecisionVector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn distance(&self, other: &DecisionVector) -> f64 {
        euclidean(&self.0, &other.0)
    }

    pub fn linf_distance(&self, other: &DecisionVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Deref for DecisionVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for DecisionVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        DecisionVector::new(v)
    }
}

impl From<DecisionVector> for Vec<f64> {
    fn from(v: DecisionVector) -> Self {
        v.0
    }
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

/// Axis-aligned box `lower[i] <= x[i] <= upper[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch { expected: lower.len(), actual: upper.len() });
        }
        for (index, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::InvalidBounds { index, lower: lo, upper: hi });
            }
        }
        Ok(Bounds { lower, upper })
    }

    /// The same interval on every coordinate.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Bounds::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(self.lower.iter().zip(&self.upper)).all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    /// Reflects each out-of-range coordinate once across the violated bound,
    /// then clamps whatever is still outside. In-range coordinates are untouched.
    pub fn repair_in_place(&self, x: &mut [f64]) {
        for ((v, &lo), &hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = reflect_then_clamp(*v, lo, hi);
        }
    }
}

#[inline]
pub(crate) fn reflect_then_clamp(v: f64, lo: f64, hi: f64) -> f64 {
    if v < lo {
        (2.0 * lo - v).min(hi)
    } else if v > hi {
        (2.0 * hi - v).max(lo)
    } else {
        v
    }
}

/// How a mutant coordinate outside the box is brought back.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryRepair {
    /// Set to the violated bound.
    #[default]
    Clamp,
    /// Reflect once across the violated bound, then clamp.
    Reflect,
}

impl Bounds {
    pub fn repair_with(&self, rule: BoundaryRepair, x: &mut [f64]) {
        match rule {
            BoundaryRepair::Reflect => self.repair_in_place(x),
            BoundaryRepair::Clamp => {
                for ((v, &lo), &hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
                    *v = v.clamp(lo, hi);
                }
            }
        }
    }
}

/// Boundary repair for mutants: reflect once across the violated bound, then
/// clamp to the nearer bound if the reflection is still outside.
pub fn clamp_reflect(x: &DecisionVector, bounds: &Bounds) -> Result<DecisionVector> {
    if x.dim() != bounds.dim() {
        return Err(Error::DimensionMismatch { expected: bounds.dim(), actual: x.dim() });
    }
    let mut coords = x.0.clone();
    bounds.repair_in_place(&mut coords);
    Ok(DecisionVector(coords))
}

/// An objective value in the maximization sense.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Fitness(f64);

impl Fitness {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Fitness(value))
        } else {
            Err(Error::NonFinite { index: 0 })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Fitness {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Fitness::new(v)
    }
}

impl From<Fitness> for f64 {
    fn from(f: Fitness) -> f64 {
        f.0
    }
}

/// A population member with whatever fitness values have been computed for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub x: DecisionVector,
    pub raw_fitness: Option<Fitness>,
    pub eff_fitness: Option<Fitness>,
}

impl Individual {
    pub fn new(x: DecisionVector) -> Self {
        Individual { x, raw_fitness: None, eff_fitness: None }
    }

    pub fn with_raw(x: DecisionVector, raw: Fitness) -> Self {
        Individual { x, raw_fitness: Some(raw), eff_fitness: None }
    }

    pub fn with_eff(x: DecisionVector, eff: Fitness) -> Self {
        Individual { x, raw_fitness: None, eff_fitness: Some(eff) }
    }

    pub(crate) fn eff(&self) -> f64 {
        self.eff_fitness.map_or(f64::NEG_INFINITY, Fitness::value)
    }

    pub(crate) fn raw(&self) -> f64 {
        self.raw_fitness.map_or(f64::NEG_INFINITY, Fitness::value)
    }
}

/// Index of the first maximum of `key` over `items`; `None` for an empty slice.
pub(crate) fn argmax_first<T>(items: &[T], key: impl Fn(&T) -> f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, item) in items.iter().enumerate() {
        let v = key(item);
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> Bounds {
        Bounds::uniform(1, 0.0, 1.0).unwrap()
    }

    fn dv(v: &[f64]) -> DecisionVector {
        DecisionVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn clamp_repair_projects_onto_the_box() {
        let b = Bounds::uniform(4, 0.0, 1.0).unwrap();
        let mut x = [0.5, 1.2, -3.0, -0.01];
        b.repair_with(BoundaryRepair::Clamp, &mut x);
        assert_eq!(x, [0.5, 1.0, 0.0, 0.0]);
        let mut y = [0.5, 1.2, -3.0, -0.01];
        b.repair_with(BoundaryRepair::Reflect, &mut y);
        assert_eq!(y, [0.5, 0.8, 1.0, 0.01]);
    }

    #[test]
    fn interior_point_unchanged() {
        assert_eq!(clamp_reflect(&dv(&[0.5]), &unit()).unwrap(), dv(&[0.5]));
    }

    #[test]
    fn reflects_across_upper_bound() {
        let r = clamp_reflect(&dv(&[1.2]), &unit()).unwrap();
        assert!((r[0] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn reflects_then_clamps_far_outside() {
        // -3 reflects to +3, which is still outside, so it clamps to 1.
        assert_eq!(clamp_reflect(&dv(&[-3.0]), &unit()).unwrap(), dv(&[1.0]));
    }

    #[test]
    fn rejects_non_finite_and_bad_bounds() {
        assert!(matches!(DecisionVector::new(vec![0.0, f64::NAN]), Err(Error::NonFinite { index: 1 })));
        assert!(Bounds::new(vec![1.0], vec![1.0]).is_err());
        assert!(Bounds::new(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(Fitness::new(f64::INFINITY).is_err());
    }

    #[test]
    fn argmax_prefers_first_occurrence() {
        assert_eq!(argmax_first(&[1.0, 3.0, 3.0, 2.0], |v| *v), Some(1));
        assert_eq!(argmax_first::<f64>(&[], |v| *v), None);
    }

    proptest! {
        #[test]
        fn clamp_reflect_lands_inside_and_is_idempotent(
            coords in prop::collection::vec(-50.0f64..50.0, 1..8),
            lo in -5.0f64..0.0,
            width in 0.1f64..10.0,
        ) {
            let b = Bounds::uniform(coords.len(), lo, lo + width).unwrap();
            let x = dv(&coords);
            let once = clamp_reflect(&x, &b).unwrap();
            prop_assert!(b.contains(&once));
            let twice = clamp_reflect(&once, &b).unwrap();
            prop_assert_eq!(&once, &twice);
            for (orig, rep) in coords.iter().zip(once.iter()) {
                if *orig >= lo && *orig <= lo + width {
                    prop_assert_eq!(orig, rep);
                }
            }
        }
    }
}
