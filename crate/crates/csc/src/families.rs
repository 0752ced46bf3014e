//! Ready-made generator families used by the tests, the CLI and the demos.

use std::sync::Arc;

use crate::space::{GenIndex, GeneratorFamily, Point};

/// `V_n = {n}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Singletons;

impl GeneratorFamily for Singletons {
    fn rule(&self) -> String {
        "singletons".into()
    }
    fn member(&self, g: GenIndex, x: Point) -> bool {
        g == x
    }
}

/// One generator, equal to the carrier.
#[derive(Clone, Copy, Debug, Default)]
pub struct Indiscrete;

impl GeneratorFamily for Indiscrete {
    fn rule(&self) -> String {
        "indiscrete".into()
    }
    fn member(&self, _g: GenIndex, _x: Point) -> bool {
        true
    }
    fn window(&self, _bound: u64) -> Vec<GenIndex> {
        vec![0]
    }
}

/// `V_n = ℕ ∖ {n}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CofiniteSingles;

impl GeneratorFamily for CofiniteSingles {
    fn rule(&self) -> String {
        "cofinite".into()
    }
    fn member(&self, g: GenIndex, x: Point) -> bool {
        g != x
    }
}

/// `V_n = [0, n]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct InitialSegments;

impl GeneratorFamily for InitialSegments {
    fn rule(&self) -> String {
        "initial-segments".into()
    }
    fn member(&self, g: GenIndex, x: Point) -> bool {
        x <= g
    }
}

/// `V_n = [n, ∞)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct FinalSegments;

impl GeneratorFamily for FinalSegments {
    fn rule(&self) -> String {
        "final-segments".into()
    }
    fn member(&self, g: GenIndex, x: Point) -> bool {
        x >= g
    }
}

/// Isolated points `1, 2, …` accumulating at `0`:
/// `V_{2m} = {0} ∪ [m+1, ∞)` and `V_{2n+1} = {n+1}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct LimitPoint;

impl LimitPoint {
    pub fn tail_gen(m: u64) -> GenIndex {
        2 * m
    }
    pub fn point_gen(x: Point) -> GenIndex {
        debug_assert!(x > 0);
        2 * (x - 1) + 1
    }
}

impl GeneratorFamily for LimitPoint {
    fn rule(&self) -> String {
        "limit-point".into()
    }
    fn member(&self, g: GenIndex, x: Point) -> bool {
        if g.is_multiple_of(2) {
            x == 0 || x > g / 2
        } else {
            x == g / 2 + 1
        }
    }
    fn window(&self, bound: u64) -> Vec<GenIndex> {
        (0..2 * bound).collect()
    }
}

/// Points are binary strings (`x ↦` the binary expansion of `x+1` without its
/// leading 1). `V_{2x}` is the cone above the string of `x`, `V_{2t+1}` is
/// `ℕ ∖ {t}`. Every nonempty basic set splits into two disjoint ones.
#[derive(Clone, Copy, Debug, Default)]
pub struct BinaryTree;

impl BinaryTree {
    pub fn extends(x: Point, sigma: Point) -> bool {
        let (mut a, b) = (x + 1, sigma + 1);
        while a > b {
            a >>= 1;
        }
        a == b
    }
}

impl GeneratorFamily for BinaryTree {
    fn rule(&self) -> String {
        "binary-tree".into()
    }
    fn member(&self, g: GenIndex, x: Point) -> bool {
        if g.is_multiple_of(2) {
            BinaryTree::extends(x, g / 2)
        } else {
            x != g / 2
        }
    }
    fn window(&self, bound: u64) -> Vec<GenIndex> {
        (0..2 * bound).collect()
    }
}

/// A finite list of generator sets over `[0, bound)`.
#[derive(Clone, Debug)]
pub struct Explicit {
    sets: Vec<Vec<Point>>,
    bound: u64,
}

impl Explicit {
    pub fn new(mut sets: Vec<Vec<Point>>, bound: Option<u64>) -> Self {
        for s in &mut sets {
            s.sort_unstable();
            s.dedup();
        }
        let max = sets.iter().flat_map(|s| s.last()).max().map_or(0, |m| m + 1);
        Explicit { bound: bound.unwrap_or(max).max(max), sets }
    }

    pub fn sets(&self) -> &[Vec<Point>] {
        &self.sets
    }
}

impl GeneratorFamily for Explicit {
    fn rule(&self) -> String {
        "explicit".into()
    }
    fn carrier(&self, x: Point) -> bool {
        x < self.bound
    }
    fn member(&self, g: GenIndex, x: Point) -> bool {
        self.sets.get(g as usize).is_some_and(|s| s.binary_search(&x).is_ok())
    }
    fn window(&self, _bound: u64) -> Vec<GenIndex> {
        (0..self.sets.len() as u64).collect()
    }
    fn carrier_bound(&self) -> Option<u64> {
        Some(self.bound)
    }
}

type MemberFn = Arc<dyn Fn(GenIndex, Point) -> bool + Send + Sync>;
type CarrierFn = Arc<dyn Fn(Point) -> bool + Send + Sync>;
type WindowFn = Arc<dyn Fn(u64) -> Vec<GenIndex> + Send + Sync>;

/// A family given by closures.
#[derive(Clone)]
pub struct FnFamily {
    name: String,
    member: MemberFn,
    carrier: Option<CarrierFn>,
    window: Option<WindowFn>,
    carrier_bound: Option<u64>,
}

impl FnFamily {
    pub fn new<F: Fn(GenIndex, Point) -> bool + Send + Sync + 'static>(name: &str, member: F) -> Self {
        FnFamily { name: name.to_string(), member: Arc::new(member), carrier: None, window: None, carrier_bound: None }
    }

    pub fn with_carrier<F: Fn(Point) -> bool + Send + Sync + 'static>(mut self, f: F) -> Self {
        self.carrier = Some(Arc::new(f));
        self
    }

    pub fn with_window<F: Fn(u64) -> Vec<GenIndex> + Send + Sync + 'static>(mut self, f: F) -> Self {
        self.window = Some(Arc::new(f));
        self
    }

    pub fn with_carrier_bound(mut self, n: u64) -> Self {
        self.carrier_bound = Some(n);
        let prev = self.carrier.take();
        self.carrier = Some(Arc::new(move |x| x < n && prev.as_ref().is_none_or(|f| f(x))));
        self
    }
}

impl GeneratorFamily for FnFamily {
    fn rule(&self) -> String {
        self.name.clone()
    }
    fn carrier(&self, x: Point) -> bool {
        self.carrier.as_ref().is_none_or(|f| f(x))
    }
    fn member(&self, g: GenIndex, x: Point) -> bool {
        (self.member)(g, x)
    }
    fn window(&self, bound: u64) -> Vec<GenIndex> {
        match &self.window {
            Some(f) => f(bound),
            None => (0..bound).collect(),
        }
    }
    fn carrier_bound(&self) -> Option<u64> {
        self.carrier_bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_tree_cones() {
        // 0 = ε, 1 = "0", 2 = "1", 3 = "00", 4 = "01", 5 = "10", 6 = "11".
        assert!((0..50).all(|x| BinaryTree::extends(x, 0)));
        assert!(BinaryTree::extends(3, 1) && BinaryTree::extends(4, 1));
        assert!(!BinaryTree::extends(5, 1) && BinaryTree::extends(5, 2));
        assert!(!BinaryTree::extends(1, 3));
    }

    #[test]
    fn limit_point_generators() {
        let f = LimitPoint;
        assert!(f.member(LimitPoint::tail_gen(3), 0));
        assert!(!f.member(LimitPoint::tail_gen(3), 3));
        assert!(f.member(LimitPoint::tail_gen(3), 4));
        assert!(f.member(LimitPoint::point_gen(5), 5));
        assert!(!f.member(LimitPoint::point_gen(5), 0));
    }

    #[test]
    fn explicit_bound() {
        let e = Explicit::new(vec![vec![3, 1], vec![]], None);
        assert_eq!(e.carrier_bound(), Some(4));
        assert!(e.member(0, 1) && !e.member(1, 1) && !e.member(7, 1));
    }
}
