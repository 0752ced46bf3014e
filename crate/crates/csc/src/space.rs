//! Generated CSC spaces: a generator family, the coded basis of its finite
//! intersections, the selector `k`, its extension `kbar`, and subspaces.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coding::{decode_finset, encode_finset};
use crate::error::CscError;

pub type Point = u64;
pub type GenIndex = u64;

/// A basis index, kept as the finite set of generator indices it intersects.
///
/// The numeric index is the bitmask code of that set; `Ord` agrees with the
/// numeric order of codes, so "least index" means the same thing either way.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BasisIndex(Vec<GenIndex>);

impl BasisIndex {
    /// Index 0: the empty intersection, i.e. the whole carrier.
    pub fn full() -> Self {
        BasisIndex(Vec::new())
    }

    pub fn single(g: GenIndex) -> Self {
        BasisIndex(vec![g])
    }

    pub fn from_gens<I: IntoIterator<Item = GenIndex>>(gens: I) -> Self {
        let mut v: Vec<GenIndex> = gens.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        BasisIndex(v)
    }

    pub fn from_code(code: &BigUint) -> Self {
        BasisIndex(decode_finset(code))
    }

    pub fn from_u64(code: u64) -> Self {
        BasisIndex((0..64).filter(|i| code >> i & 1 == 1).collect())
    }

    pub fn code(&self) -> BigUint {
        encode_finset(self.0.iter().copied())
    }

    /// The code, when it fits in 64 bits.
    pub fn code_u64(&self) -> Option<u64> {
        if self.0.last().is_none_or(|&g| g < 64) {
            Some(self.0.iter().fold(0, |acc, &g| acc | 1 << g))
        } else {
            None
        }
    }

    pub fn gens(&self) -> &[GenIndex] {
        &self.0
    }

    pub fn is_full(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of `U_self ∩ U_other`.
    pub fn union(&self, other: &BasisIndex) -> BasisIndex {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let next = match (self.0.get(i), other.0.get(j)) {
                (Some(&a), Some(&b)) if a == b => {
                    i += 1;
                    j += 1;
                    a
                }
                (Some(&a), Some(&b)) if a < b => {
                    i += 1;
                    a
                }
                (Some(_), Some(&b)) => {
                    j += 1;
                    b
                }
                (Some(&a), None) => {
                    i += 1;
                    a
                }
                (None, Some(&b)) => {
                    j += 1;
                    b
                }
                (None, None) => unreachable!(),
            };
            v.push(next);
        }
        BasisIndex(v)
    }
}

impl Ord for BasisIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        // Numeric order of bitmask codes: compare from the highest bit down.
        let mut a = self.0.iter().rev();
        let mut b = other.0.iter().rev();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(x), Some(y)) if x != y => return x.cmp(y),
                _ => {}
            }
        }
    }
}

impl PartialOrd for BasisIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U{:?}", self.0)
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.code_u64() {
            Some(c) => write!(f, "{c}"),
            None => write!(f, "code{{{}}}", self.0.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(",")),
        }
    }
}

// Written as the generator list: codes overflow any fixed-width integer fast.
impl Serialize for BasisIndex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BasisIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(BasisIndex::from_gens(Vec::<GenIndex>::deserialize(d)?))
    }
}

/// A family `⟨V_n⟩` of generator sets over a carrier.
pub trait GeneratorFamily: Send + Sync {
    /// Construction tag, e.g. `singletons` or `poset`.
    fn rule(&self) -> String;

    fn carrier(&self, _x: Point) -> bool {
        true
    }

    fn member(&self, g: GenIndex, x: Point) -> bool;

    /// Generator indices relevant to points below `bound`, ascending.
    fn window(&self, bound: u64) -> Vec<GenIndex> {
        (0..bound).collect()
    }

    /// Largest carrier size, for finite instances.
    fn carrier_bound(&self) -> Option<u64> {
        None
    }
}

/// Read access shared by spaces and subspaces.
pub trait Space: Send + Sync {
    fn in_carrier(&self, x: Point) -> bool;
    fn in_generator(&self, g: GenIndex, x: Point) -> bool;
    fn generator_window(&self, bound: u64) -> Vec<GenIndex>;
    fn rule(&self) -> String;

    fn carrier_bound(&self) -> Option<u64> {
        None
    }

    fn basis(&self, n: &BasisIndex, x: Point) -> bool {
        self.in_carrier(x) && n.gens().iter().all(|&g| self.in_generator(g, x))
    }

    /// `k(x, m, n)`: the index of the coded intersection.
    fn k(&self, _x: Point, m: &BasisIndex, n: &BasisIndex) -> BasisIndex {
        m.union(n)
    }

    /// Points of `U_n` below `bound`.
    fn basic_points(&self, n: &BasisIndex, bound: u64) -> Vec<Point> {
        (0..bound).filter(|&x| self.basis(n, x)).collect()
    }

    fn carrier_points(&self, bound: u64) -> Vec<Point> {
        (0..bound).filter(|&x| self.in_carrier(x)).collect()
    }
}

/// `kbar(x, F)` following the recursion: 0 for `F = ∅`, otherwise fold `k`
/// over `F` in increasing order starting from its least element.
pub fn kbar(s: &dyn Space, x: Point, f: &[BasisIndex]) -> Result<BasisIndex, CscError> {
    if let Some(bad) = f.iter().find(|n| !s.basis(n, x)) {
        return Err(CscError::PointNotInIntersection { point: x, index: bad.clone() });
    }
    let mut sorted: Vec<&BasisIndex> = f.iter().collect();
    sorted.sort();
    sorted.dedup();
    let mut it = sorted.into_iter();
    let Some(first) = it.next() else {
        return Ok(BasisIndex::full());
    };
    Ok(it.fold(first.clone(), |g, n| s.k(x, &g, n)))
}

#[derive(Clone)]
pub struct CscSpace {
    gens: Arc<dyn GeneratorFamily>,
}

impl fmt::Debug for CscSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CscSpace({})", self.gens.rule())
    }
}

pub fn make_generated_space<G: GeneratorFamily + 'static>(g: G) -> CscSpace {
    CscSpace { gens: Arc::new(g) }
}

impl CscSpace {
    pub fn from_arc(gens: Arc<dyn GeneratorFamily>) -> Self {
        CscSpace { gens }
    }

    pub fn family(&self) -> &Arc<dyn GeneratorFamily> {
        &self.gens
    }

    pub fn restrict(&self, y: PointSet) -> Result<Subspace, CscError> {
        if let PointSet::Finite(pts) = &y {
            if let Some(&bad) = pts.iter().find(|&&p| !self.in_carrier(p)) {
                return Err(CscError::PointOutsideCarrier(bad));
            }
        }
        Ok(Subspace { parent: self.clone(), points: y })
    }
}

impl Space for CscSpace {
    fn in_carrier(&self, x: Point) -> bool {
        self.gens.carrier(x)
    }
    fn in_generator(&self, g: GenIndex, x: Point) -> bool {
        self.gens.member(g, x)
    }
    fn generator_window(&self, bound: u64) -> Vec<GenIndex> {
        self.gens.window(bound)
    }
    fn rule(&self) -> String {
        self.gens.rule()
    }
    fn carrier_bound(&self) -> Option<u64> {
        self.gens.carrier_bound()
    }
}

/// The point set `Y` of a subspace.
#[derive(Clone)]
pub enum PointSet {
    Finite(BTreeSet<Point>),
    Predicate(Arc<dyn Fn(Point) -> bool + Send + Sync>),
}

impl PointSet {
    pub fn finite<I: IntoIterator<Item = Point>>(pts: I) -> Self {
        PointSet::Finite(pts.into_iter().collect())
    }

    pub fn predicate<F: Fn(Point) -> bool + Send + Sync + 'static>(f: F) -> Self {
        PointSet::Predicate(Arc::new(f))
    }

    pub fn contains(&self, x: Point) -> bool {
        match self {
            PointSet::Finite(s) => s.contains(&x),
            PointSet::Predicate(f) => f(x),
        }
    }
}

/// `⟨Y, 𝒰↾Y, k⟩`: basic sets are `U_n ∩ Y`, `k` is inherited.
#[derive(Clone)]
pub struct Subspace {
    parent: CscSpace,
    points: PointSet,
}

impl Subspace {
    pub fn parent(&self) -> &CscSpace {
        &self.parent
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }
}

impl Space for Subspace {
    fn in_carrier(&self, x: Point) -> bool {
        self.points.contains(x) && self.parent.in_carrier(x)
    }
    fn in_generator(&self, g: GenIndex, x: Point) -> bool {
        self.parent.in_generator(g, x)
    }
    fn generator_window(&self, bound: u64) -> Vec<GenIndex> {
        self.parent.generator_window(bound)
    }
    fn rule(&self) -> String {
        format!("{}|subspace", self.parent.rule())
    }
    fn carrier_bound(&self) -> Option<u64> {
        match &self.points {
            PointSet::Finite(s) => Some(s.iter().next_back().map_or(0, |m| m + 1)),
            PointSet::Predicate(_) => self.parent.carrier_bound(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{FnFamily, Singletons};

    #[test]
    fn index_order_matches_codes() {
        let mut all: Vec<BasisIndex> = (0u64..256).map(BasisIndex::from_u64).collect();
        all.reverse();
        all.sort();
        for (i, b) in all.iter().enumerate() {
            assert_eq!(b.code_u64(), Some(i as u64));
            assert_eq!(b.code(), BigUint::from(i as u64));
        }
        assert!(BasisIndex::single(70) > BasisIndex::from_gens([1, 2, 69]));
    }

    #[test]
    fn union_is_set_union() {
        for m in 0u64..64 {
            for n in 0u64..64 {
                let u = BasisIndex::from_u64(m).union(&BasisIndex::from_u64(n));
                assert_eq!(u.code_u64(), Some(m | n));
            }
        }
    }

    #[test]
    fn singleton_intersections() {
        let s = make_generated_space(Singletons);
        let u5 = BasisIndex::from_u64(5);
        assert!((0..100).all(|x| !s.basis(&u5, x)));
        assert!((0..100).all(|x| s.basis(&BasisIndex::full(), x)));
    }

    #[test]
    fn evens_and_threes() {
        let s = make_generated_space(FnFamily::new("evens-threes", |g, x| match g {
            0 => x % 2 == 0,
            1 => x % 3 == 0,
            _ => false,
        }));
        let both = BasisIndex::from_gens([0, 1]);
        assert_eq!(s.basic_points(&both, 60), (0..60).filter(|x| x % 6 == 0).collect::<Vec<_>>());
    }

    #[test]
    fn kbar_cases() {
        let s = make_generated_space(FnFamily::new("mod", |g, x| x % (g + 2) == 0));
        assert_eq!(kbar(&s, 7, &[]).unwrap(), BasisIndex::full());
        let n = BasisIndex::from_gens([3]);
        assert_eq!(kbar(&s, 10, std::slice::from_ref(&n)).unwrap(), n);
        let m = BasisIndex::from_gens([0]);
        let out = kbar(&s, 30, &[n.clone(), m.clone()]).unwrap();
        assert_eq!(out, s.k(30, &m, &n));
        assert!(matches!(kbar(&s, 7, &[m]), Err(CscError::PointNotInIntersection { point: 7, .. })));
    }

    #[test]
    fn restriction() {
        let s = make_generated_space(Singletons);
        let evens = s.restrict(PointSet::predicate(|x| x % 2 == 0)).unwrap();
        for x in 0..20 {
            let single = BasisIndex::single(x);
            assert_eq!(evens.basis(&single, x), x % 2 == 0);
        }
        let none = s.restrict(PointSet::finite([])).unwrap();
        assert!((0..20).all(|x| !none.basis(&BasisIndex::full(), x)));
    }
}
