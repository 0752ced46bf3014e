//! Extraction with a bounded jump oracle.

use std::cell::RefCell;
use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::classify::{isolate_on, separation_counterexample, SepAxiom, SubspaceCertificate, Tag, Witnesses};
use crate::error::{CscError, Result};
use crate::space::{BasisIndex, Point};
use crate::truncation::{Shared, Truncation};

use super::t1::pure_t1_cofinite;
use super::{attach_probe, ExtractParams};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "query", rename_all = "snake_case")]
pub enum JumpQuery {
    Empty { n: BasisIndex },
    Disjoint { m: BasisIndex, n: BasisIndex },
    Subset { m: BasisIndex, n: BasisIndex },
    /// `U_n` lies in the lower half of the window.
    Finite { n: BasisIndex },
}

/// Answers questions about basic sets by inspecting `[0, B)`, and re-asks each
/// on `[0, 2B)`. An answer that changes marks the oracle as not tame.
pub struct JumpOracle {
    b: u64,
    t: Truncation,
    lower: FixedBitSet,
    tame: RefCell<bool>,
    cache: RefCell<HashMap<BasisIndex, FixedBitSet>>,
    around: RefCell<HashMap<Point, BasisIndex>>,
}

impl JumpOracle {
    pub fn new<S: Shared + ?Sized>(s: &S, b: u64, gen_bound: u64) -> Self {
        let t = Truncation::window(s, 2 * b, 2 * b, gen_bound);
        let mut lower = t.empty_set();
        lower.insert_range(..b as usize);
        JumpOracle { b, t, lower, tame: RefCell::new(true), cache: RefCell::new(HashMap::new()), around: RefCell::new(HashMap::new()) }
    }

    pub fn budget(&self) -> u64 {
        self.b
    }

    pub fn is_tame(&self) -> bool {
        *self.tame.borrow()
    }

    fn trace(&self, n: &BasisIndex) -> FixedBitSet {
        self.cache.borrow_mut().entry(n.clone()).or_insert_with(|| self.t.trace(n)).clone()
    }

    fn lower(&self, set: &FixedBitSet) -> FixedBitSet {
        let mut s = set.clone();
        s.intersect_with(&self.lower);
        s
    }

    fn settle(&self, q: &JumpQuery, small: bool, large: bool) -> Result<bool> {
        if small != large {
            *self.tame.borrow_mut() = false;
            return Err(CscError::OracleNotTame(format!("{q:?} answered {small} at {} and {large} at {}", self.b, 2 * self.b)));
        }
        Ok(small)
    }

    pub fn query(&self, q: &JumpQuery) -> Result<bool> {
        let (small, large) = match q {
            JumpQuery::Empty { n } => {
                let tr = self.trace(n);
                (self.lower(&tr).count_ones(..) == 0, tr.count_ones(..) == 0)
            }
            JumpQuery::Disjoint { m, n } => {
                let (a, b) = (self.trace(m), self.trace(n));
                (self.lower(&a).is_disjoint(&self.lower(&b)), a.is_disjoint(&b))
            }
            JumpQuery::Subset { m, n } => {
                let (a, b) = (self.trace(m), self.trace(n));
                (self.lower(&a).is_subset(&self.lower(&b)), a.is_subset(&b))
            }
            JumpQuery::Finite { n } => {
                let tr = self.trace(n);
                let half = (self.b / 2) as usize;
                (self.lower(&tr).ones().all(|x| x < half), tr.ones().all(|x| x < self.b as usize))
            }
        };
        self.settle(q, small, large)
    }

    fn min_index(&self, x: Point) -> BasisIndex {
        self.around.borrow_mut().entry(x).or_insert_with(|| BasisIndex::from_gens(self.t.generators_at(x))).clone()
    }

    /// Disjointness of the smallest window neighbourhoods of two points.
    fn disjoint_points(&self, x: Point, y: Point) -> Result<bool> {
        let (m, n) = (self.min_index(x), self.min_index(y));
        self.query(&JumpQuery::Disjoint { m, n })
    }

    /// Disjoint basic sets around `x` and `y`, shrunk to few generators.
    fn split(&self, x: Point, y: Point) -> Result<(BasisIndex, BasisIndex)> {
        let ((mx, _), (my, sy)) = (self.t.min_basic(x), self.t.min_basic(y));
        let pair = self.t.mask(&[x, y]);
        let u = self.t.reduce_index(&mx, &pair, |s| s.is_disjoint(&sy));
        let su = self.trace(&u);
        let v = self.t.reduce_index(&my, &pair, |s| s.is_disjoint(&su));
        if !self.query(&JumpQuery::Disjoint { m: u.clone(), n: v.clone() })? {
            return Err(CscError::OracleNotTame(format!("split of {x}, {y} is not disjoint")));
        }
        Ok((u, v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Infinitely many points have a finite neighbourhood.
    FiniteNeighbourhoods,
    /// Some basic set holds no T2 pair.
    PureBasic,
    /// Every basic set holds a T2 pair.
    NestedPairs,
}

#[derive(Clone, Debug)]
pub struct Delta2Outcome {
    pub branch: Branch,
    pub cert: SubspaceCertificate,
}

/// Three branches, tried in order: points with a finite neighbourhood; a
/// basic set without T2 pairs; and the nested recursion splitting each basic
/// set along a T2 pair.
pub fn delta2_extract<S: Shared + ?Sized>(s: &S, oracle: &JumpOracle, count: usize, params: &ExtractParams) -> Result<Delta2Outcome> {
    let t = params.window().truncation(s);
    if let Some((x, y)) = separation_counterexample(&t, SepAxiom::T1, &t.focus()) {
        return Err(CscError::NotT1OnWindow { x, y });
    }
    let focus = t.focus();

    let mut finite = Vec::new();
    for &x in &focus {
        if oracle.query(&JumpQuery::Finite { n: t.min_basic(x).0 })? {
            finite.push(x);
        }
    }
    let isolated: Vec<(Point, BasisIndex)> =
        finite.iter().filter_map(|&x| isolate_on(&t, x).ok().flatten().map(|n| (x, n))).take(count).collect();
    if isolated.len() >= count {
        let (points, isolating): (Vec<_>, Vec<_>) = isolated.into_iter().unzip();
        let cert = SubspaceCertificate::new(points, Tag::Discrete, Witnesses::Discrete { isolating }, "delta2-finite", params.window());
        return Ok(Delta2Outcome { branch: Branch::FiniteNeighbourhoods, cert: attach_probe(s, cert, params.probe).verified(s) });
    }

    let rest: Vec<Point> = focus.iter().copied().filter(|x| !finite.contains(x)).collect();
    for col in t.columns() {
        let tr = t.trace(col);
        let inside: Vec<Point> = rest.iter().copied().filter(|&x| tr.contains(x as usize)).collect();
        if inside.len() < count {
            continue;
        }
        if find_t2_pair(oracle, &inside)?.is_none() {
            let cert = pure_t1_cofinite(s, Some(&inside), count, params)?;
            return Ok(Delta2Outcome { branch: Branch::PureBasic, cert });
        }
    }

    let pts: Vec<Point> = t.points().into_iter().filter(|x| !finite.contains(x)).collect();
    let space = t.space().clone();
    let mut around = BasisIndex::full();
    let mut xs: Vec<Point> = Vec::new();
    let mut ms: Vec<BasisIndex> = Vec::new();
    let mut last_y: Option<Point> = None;
    while xs.len() < count {
        let tr = t.trace(&around);
        let inside: Vec<Point> = pts.iter().copied().filter(|&x| tr.contains(x as usize)).collect();
        let Some((x, y)) = find_t2_pair(oracle, &inside)? else {
            return Err(CscError::WindowTooSmall(format!("no T2 pair inside {around} on the window")));
        };
        let (sx, sy) = oracle.split(x, y)?;
        let m = space.k(x, &around, &sx);
        let n = space.k(y, &around, &sy);
        let next_x = t.trace(&m).ones().map(|z| z as Point).find(|&z| xs.last().is_none_or(|&l| z > l));
        let next_y = t.trace(&n).ones().map(|z| z as Point).find(|&z| last_y.is_none_or(|l| z > l));
        let (Some(nx), Some(ny)) = (next_x, next_y) else {
            return Err(CscError::WindowTooSmall(format!("step {} ran past the window", xs.len())));
        };
        xs.push(nx);
        ms.push(m);
        last_y = Some(ny);
        around = n;
    }
    let cert = SubspaceCertificate::new(xs, Tag::Discrete, Witnesses::Discrete { isolating: ms }, "delta2-nested", params.window());
    Ok(Delta2Outcome { branch: Branch::NestedPairs, cert: attach_probe(s, cert, params.probe).verified(s) })
}

/// The lexicographically least T2 pair among `pts`.
fn find_t2_pair(oracle: &JumpOracle, pts: &[Point]) -> Result<Option<(Point, Point)>> {
    for (i, &x) in pts.iter().enumerate() {
        for &y in &pts[i + 1..] {
            if oracle.disjoint_points(x, y)? {
                return Ok(Some((x, y)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{BinaryTree, CofiniteSingles, FnFamily, Singletons};
    use crate::space::make_generated_space;

    #[test]
    fn oracle_queries() {
        let s = make_generated_space(Singletons);
        let o = JumpOracle::new(&s, 16, 16);
        assert!(o.query(&JumpQuery::Empty { n: BasisIndex::from_gens([0, 2]) }).unwrap());
        assert!(o.query(&JumpQuery::Disjoint { m: BasisIndex::single(1), n: BasisIndex::single(3) }).unwrap());
        let evens = make_generated_space(FnFamily::new("evens", |_, x| x % 2 == 0));
        let o = JumpOracle::new(&evens, 16, 1);
        assert!(o.query(&JumpQuery::Subset { m: BasisIndex::single(0), n: BasisIndex::full() }).unwrap());
        assert!(o.is_tame());
    }

    #[test]
    fn three_branches() {
        let params = ExtractParams::new(16, 16, 6).with_horizon(64);
        let s = make_generated_space(Singletons);
        let out = delta2_extract(&s, &JumpOracle::new(&s, 64, 16), 6, &params).unwrap();
        assert_eq!(out.branch, Branch::FiniteNeighbourhoods);
        assert!(out.cert.passed(), "{:?}", out.cert.report);

        let s = make_generated_space(CofiniteSingles);
        let out = delta2_extract(&s, &JumpOracle::new(&s, 64, 16), 6, &params).unwrap();
        assert_eq!(out.branch, Branch::PureBasic);
        assert!(out.cert.passed(), "{:?}", out.cert.report);

        let s = make_generated_space(BinaryTree);
        let params = ExtractParams::new(128, 128, 5).with_horizon(256);
        let out = delta2_extract(&s, &JumpOracle::new(&s, 256, 128), 5, &params).unwrap();
        assert_eq!(out.branch, Branch::NestedPairs);
        assert!(out.cert.passed(), "{:?}", out.cert.report);
    }

    #[test]
    fn late_tail_is_not_tame() {
        let s = make_generated_space(FnFamily::new("late-tail", |g, x| x == g || x >= 100));
        let params = ExtractParams::new(16, 16, 6).with_horizon(64);
        let r = delta2_extract(&s, &JumpOracle::new(&s, 64, 16), 6, &params);
        assert!(matches!(r, Err(CscError::OracleNotTame(_))), "{r:?}");
    }
}
