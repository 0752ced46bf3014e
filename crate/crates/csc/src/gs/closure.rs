//! The closure relation and the specialization order.

use serde::{Deserialize, Serialize};

use crate::space::{BasisIndex, GenIndex, Point};
use crate::truncation::{Shared, Truncation};

use super::solvers::FinitePoset;
use crate::error::Result;

/// `y ∈ cl(x)` iff every basic set containing `y` contains `x`. On a window
/// this holds unless some window generator contains `y` but not `x`, which is
/// then recorded as the refutation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureRelation {
    pub points: Vec<Point>,
    /// `refuted[i][j]`: least generator containing `points[i]` but not `points[j]`.
    refuted: Vec<Vec<Option<GenIndex>>>,
}

impl ClosureRelation {
    pub fn from_truncation(t: &Truncation, points: &[Point]) -> Self {
        let refuted = points
            .iter()
            .map(|&y| {
                let gens = t.generators_at(y);
                points
                    .iter()
                    .map(|&x| gens.iter().copied().find(|&g| !t.generator_set(g).contains(x as usize)))
                    .collect()
            })
            .collect();
        ClosureRelation { points: points.to_vec(), refuted }
    }

    fn pos(&self, p: Point) -> usize {
        self.points.binary_search(&p).expect("point in relation")
    }

    /// `y ∈ cl(x)` on the window.
    pub fn in_closure(&self, y: Point, x: Point) -> bool {
        self.refuted[self.pos(y)][self.pos(x)].is_none()
    }

    /// A basic set containing `y` but not `x`.
    pub fn witness(&self, y: Point, x: Point) -> Option<BasisIndex> {
        self.refuted[self.pos(y)][self.pos(x)].map(BasisIndex::single)
    }
}

/// [`ClosureRelation`] on the points below `n`, generators relevant below `m`.
pub fn closure_relation<S: Shared + ?Sized>(s: &S, n: u64, m: u64) -> ClosureRelation {
    let t = Truncation::window(s, n, n, m);
    ClosureRelation::from_truncation(&t, &t.points())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quotient {
    pub classes: Vec<Vec<Point>>,
    pub representatives: Vec<Point>,
}

/// Classes of `x ∼ y` iff `cl(x) = cl(y)`; representatives are least elements.
pub fn sim_quotient(cl: &ClosureRelation) -> Quotient {
    let n = cl.points.len();
    let mut class_of: Vec<Option<usize>> = vec![None; n];
    let mut classes: Vec<Vec<Point>> = Vec::new();
    for i in 0..n {
        if class_of[i].is_some() {
            continue;
        }
        let id = classes.len();
        let mut members = Vec::new();
        for j in i..n {
            if class_of[j].is_none() && cl.refuted[i][j].is_none() && cl.refuted[j][i].is_none() {
                class_of[j] = Some(id);
                members.push(cl.points[j]);
            }
        }
        classes.push(members);
    }
    let representatives = classes.iter().map(|c| c[0]).collect();
    Quotient { classes, representatives }
}

/// `x ≤ y` iff `x ∈ cl(y)`, on representatives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecializationOrder {
    pub points: Vec<Point>,
    pub order: FinitePoset,
}

pub fn specialization_order(cl: &ClosureRelation, reps: &[Point]) -> Result<SpecializationOrder> {
    let order = FinitePoset::from_fn(reps.len(), |i, j| cl.in_closure(reps[i], reps[j]))?;
    Ok(SpecializationOrder { points: reps.to_vec(), order })
}

impl SpecializationOrder {
    pub fn leq(&self, x: Point, y: Point) -> bool {
        let i = self.points.iter().position(|&p| p == x).expect("point in order");
        let j = self.points.iter().position(|&p| p == y).expect("point in order");
        self.order.leq(i, j)
    }
}
