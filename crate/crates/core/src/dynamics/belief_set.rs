use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::beliefs::hull_membership;
use crate::experiment::Belief;
use crate::numerics::{rational_to_f64, Rational};
use crate::{Error, Result};

/// A polytope of beliefs, stored as its extreme points in sorted order so
/// that equal hulls compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BeliefSet {
    points: Vec<Belief>,
}

impl BeliefSet {
    pub fn new(points: Vec<Belief>) -> Result<Self> {
        let dimension = points.first().ok_or(Error::Empty("belief set"))?.len();
        for p in &points {
            if p.len() != dimension {
                return Err(Error::Dimension("beliefs of different lengths".into()));
            }
            if p.iter().any(Signed::is_negative) || !p.iter().sum::<Rational>().is_one() {
                return Err(Error::Precondition(format!(
                    "point {} is not a belief",
                    p.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
                )));
            }
        }
        Ok(BeliefSet {
            points: extreme_points(points)?,
        })
    }

    /// The whole simplex, spanned by the point masses.
    pub fn simplex(states: usize) -> Self {
        let points = (0..states)
            .map(|i| {
                (0..states)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        BeliefSet::new(points).expect("point masses are beliefs")
    }

    pub fn points(&self) -> &[Belief] {
        &self.points
    }

    pub fn state_count(&self) -> usize {
        self.points[0].len()
    }

    pub fn contains(&self, belief: &[Rational]) -> Result<bool> {
        Ok(hull_membership(belief, &self.points)?.is_some())
    }

    /// Every extreme point of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &BeliefSet) -> Result<bool> {
        for p in &self.points {
            if !other.contains(p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Euclidean distance from `belief` to the hull. Zero inside; outside,
    /// the nearest point lies on a segment between two extreme points,
    /// which is exact for hulls of dimension at most two.
    pub fn distance(&self, belief: &[Rational]) -> Result<f64> {
        if self.contains(belief)? {
            return Ok(0.0);
        }
        let target = to_f64(belief);
        let pts: Vec<Vec<f64>> = self.points.iter().map(|p| to_f64(p)).collect();
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            best = best.min(segment_distance(&target, &pts[i], &pts[i]));
            for j in i + 1..pts.len() {
                best = best.min(segment_distance(&target, &pts[i], &pts[j]));
            }
        }
        Ok(best)
    }

    pub fn hausdorff(&self, other: &BeliefSet) -> Result<f64> {
        let mut gap: f64 = 0.0;
        for p in &self.points {
            gap = gap.max(other.distance(p)?);
        }
        for p in &other.points {
            gap = gap.max(self.distance(p)?);
        }
        Ok(gap)
    }
}

fn to_f64(v: &[Rational]) -> Vec<f64> {
    v.iter().map(rational_to_f64).collect()
}

fn segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let ap: Vec<f64> = a.iter().zip(p).map(|(x, y)| y - x).collect();
    let len2: f64 = ab.iter().map(|x| x * x).sum();
    let t = if len2 == 0.0 {
        0.0
    } else {
        (ab.iter().zip(&ap).map(|(x, y)| x * y).sum::<f64>() / len2).clamp(0.0, 1.0)
    };
    ap.iter()
        .zip(&ab)
        .map(|(x, y)| (x - t * y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Extreme points of the hull of `points`, sorted.
///
/// Beliefs over two states lie on a segment and over three states in a
/// plane, where the first two coordinates determine the point; those cases
/// use exact one- and two-dimensional hulls. Larger state sets fall back
/// to removing points that lie in the hull of the others.
fn extreme_points(mut points: Vec<Belief>) -> Result<Vec<Belief>> {
    points.sort();
    points.dedup();
    let mut hull = match points[0].len() {
        0 => return Err(Error::Empty("belief")),
        1 => points,
        2 => {
            let first = points.first().cloned();
            let last = points.last().cloned();
            let mut out: Vec<Belief> = first.into_iter().chain(last).collect();
            out.dedup();
            out
        }
        3 => planar_hull(points),
        _ => prune_by_membership(points)?,
    };
    hull.sort();
    Ok(hull)
}

fn cross(o: &Belief, a: &Belief, b: &Belief) -> Rational {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

/// Andrew's monotone chain on the first two coordinates; collinear
/// boundary points are dropped.
fn planar_hull(points: Vec<Belief>) -> Vec<Belief> {
    if points.len() < 3 {
        return points;
    }
    let mut sorted = points;
    sorted.sort_by(|a, b| match a[0].cmp(&b[0]) {
        Ordering::Equal => a[1].cmp(&b[1]),
        other => other,
    });
    let mut lower: Vec<Belief> = Vec::new();
    for p in &sorted {
        while lower.len() >= 2 && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Belief> = Vec::new();
    for p in sorted.iter().rev() {
        while upper.len() >= 2 && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower.dedup();
    lower
}

fn prune_by_membership(points: Vec<Belief>) -> Result<Vec<Belief>> {
    let mut kept = points;
    let mut i = 0;
    while i < kept.len() && kept.len() > 1 {
        let others: Vec<Belief> = kept
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| p.clone())
            .collect();
        if hull_membership(&kept[i], &others)?.is_some() {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(kept)
}
