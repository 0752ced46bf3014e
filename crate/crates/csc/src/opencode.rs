//! Open codes: sequences of basis indices naming the union of their sets.

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{CscError, Result};
use crate::space::{BasisIndex, Point, Space};
use crate::truncation::{bits_to_points, Truncation};

#[derive(Clone)]
pub enum OpenCode {
    Finite(Vec<BasisIndex>),
    Lazy(Arc<dyn Fn(usize) -> Option<BasisIndex> + Send + Sync>),
}

impl OpenCode {
    pub fn finite<I: IntoIterator<Item = BasisIndex>>(it: I) -> Self {
        OpenCode::Finite(it.into_iter().collect())
    }

    pub fn lazy<F: Fn(usize) -> Option<BasisIndex> + Send + Sync + 'static>(f: F) -> Self {
        OpenCode::Lazy(Arc::new(f))
    }

    pub fn get(&self, i: usize) -> Option<BasisIndex> {
        match self {
            OpenCode::Finite(v) => v.get(i).cloned(),
            OpenCode::Lazy(f) => f(i),
        }
    }

    /// The first `budget` entries.
    pub fn prefix(&self, budget: usize) -> Vec<BasisIndex> {
        (0..budget).map_while(|i| self.get(i)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    In(BasisIndex),
    NotFoundWithinBudget,
}

pub fn open_code_eval(s: &dyn Space, o: &OpenCode, x: Point, budget: usize) -> Membership {
    for n in o.prefix(budget) {
        if s.basis(&n, x) {
            return Membership::In(n);
        }
    }
    Membership::NotFoundWithinBudget
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SegmentKind {
    InitialSegment,
    FinalSegment,
    AlmostCofinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalForm {
    Empty,
    Basic(BasisIndex),
    /// Everything from `tail_from` on, plus the points below it except `exceptions`.
    Explicit { exceptions: Vec<Point>, tail_from: Point },
}

impl NormalForm {
    pub fn points(&self, t: &Truncation) -> Vec<Point> {
        match self {
            NormalForm::Empty => Vec::new(),
            NormalForm::Basic(n) => bits_to_points(&t.trace(n)),
            NormalForm::Explicit { exceptions, tail_from } => {
                t.points().into_iter().filter(|x| x >= tail_from || !exceptions.contains(x)).collect()
            }
        }
    }
}

/// Normal form of the union named by the first `budget` entries of `o`.
///
/// In initial- and final-segment spaces the nonempty members form a chain, so
/// the union is the largest member. In almost-cofinite spaces every nonempty
/// member is cofinite, so the union is described by its finitely many gaps.
pub fn open_code_normalize(t: &Truncation, kind: SegmentKind, o: &OpenCode, budget: usize) -> Result<NormalForm> {
    let members: Vec<(BasisIndex, FixedBitSet)> = o
        .prefix(budget)
        .into_iter()
        .map(|n| {
            let tr = t.trace(&n);
            (n, tr)
        })
        .filter(|(_, tr)| tr.count_ones(..) > 0)
        .collect();
    if members.is_empty() {
        return Ok(NormalForm::Empty);
    }
    match kind {
        SegmentKind::InitialSegment | SegmentKind::FinalSegment => {
            let mut best = &members[0];
            for m in &members[1..] {
                if best.1.is_subset(&m.1) {
                    if m.1 != best.1 || m.0 < best.0 {
                        best = m;
                    }
                } else if !m.1.is_subset(&best.1) {
                    return Err(CscError::TagViolatedOnWindow(format!(
                        "members {:?} and {:?} are incomparable",
                        best.0, m.0
                    )));
                }
            }
            Ok(NormalForm::Basic(best.0.clone()))
        }
        SegmentKind::AlmostCofinite => {
            let mut union = t.empty_set();
            for (n, tr) in &members {
                if !t.looks_cofinite(tr) {
                    return Err(CscError::TagViolatedOnWindow(format!("member {n:?} is not cofinite on the window")));
                }
                union.union_with(tr);
            }
            let pts = t.points();
            let tail_from = pts.iter().rev().take_while(|&&x| union.contains(x as usize)).last().copied().unwrap_or(t.n());
            let exceptions = pts.into_iter().filter(|&x| x < tail_from && !union.contains(x as usize)).collect();
            Ok(NormalForm::Explicit { exceptions, tail_from })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{CofiniteSingles, FnFamily, InitialSegments, Singletons};
    use crate::space::make_generated_space;
    use crate::truncation::materialize;

    #[test]
    fn full_code_contains_everything() {
        let s = make_generated_space(Singletons);
        let o = OpenCode::finite([BasisIndex::full()]);
        assert_eq!(open_code_eval(&s, &o, 7, 1), Membership::In(BasisIndex::full()));
    }

    #[test]
    fn empty_members_never_witness() {
        let s = make_generated_space(Singletons);
        let o = OpenCode::lazy(|i| Some(BasisIndex::from_gens([i as u64, i as u64 + 1])));
        for budget in [0, 1, 10, 100] {
            assert_eq!(open_code_eval(&s, &o, 3, budget), Membership::NotFoundWithinBudget);
        }
    }

    #[test]
    fn eval_agrees_with_union() {
        let s = make_generated_space(FnFamily::new("mod", |g, x| x % (g + 2) == 1));
        let o = OpenCode::finite([3u64, 5, 9, 16].map(BasisIndex::from_u64));
        let t = materialize(&s, 64, 32);
        let mut union = t.empty_set();
        for n in o.prefix(4) {
            union.union_with(&t.trace(&n));
        }
        for x in 0..64 {
            let hit = matches!(open_code_eval(&s, &o, x, 4), Membership::In(_));
            assert_eq!(hit, union.contains(x as usize));
        }
    }

    #[test]
    fn max_level_rule() {
        let t = materialize(&make_generated_space(InitialSegments), 16, 256);
        let o = OpenCode::finite([BasisIndex::single(1), BasisIndex::single(3)]);
        let nf = open_code_normalize(&t, SegmentKind::InitialSegment, &o, 10).unwrap();
        assert_eq!(nf, NormalForm::Basic(BasisIndex::single(3)));
        let empty = OpenCode::finite([BasisIndex::from_gens([0, 1]).union(&BasisIndex::single(99))]);
        let s = make_generated_space(Singletons);
        let ts = materialize(&s, 16, 16);
        assert_eq!(open_code_normalize(&ts, SegmentKind::AlmostCofinite, &empty, 5).unwrap(), NormalForm::Empty);
    }

    #[test]
    fn incomparable_members_violate_segment_tag() {
        let t = materialize(&make_generated_space(Singletons), 8, 16);
        let o = OpenCode::finite([BasisIndex::single(0), BasisIndex::single(1)]);
        assert!(matches!(
            open_code_normalize(&t, SegmentKind::InitialSegment, &o, 2),
            Err(CscError::TagViolatedOnWindow(_))
        ));
    }

    #[test]
    fn cofinite_union_matches_window() {
        let s = make_generated_space(CofiniteSingles);
        let t = materialize(&s, 32, 64);
        let o = OpenCode::finite([BasisIndex::from_gens([1, 2, 4]), BasisIndex::from_gens([2, 5])]);
        let nf = open_code_normalize(&t, SegmentKind::AlmostCofinite, &o, 2).unwrap();
        assert_eq!(nf, NormalForm::Explicit { exceptions: vec![2], tail_from: 3 });
        let mut union = t.empty_set();
        for n in o.prefix(2) {
            union.union_with(&t.trace(&n));
        }
        assert_eq!(nf.points(&t), bits_to_points(&union));
    }
}
