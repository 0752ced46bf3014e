//! Finite windows on a space.
//!
//! A truncation covers the points `[0, n)`. Points below `tail_from` are the
//! points of interest; the carrier points in `[tail_from, n)` form the tail,
//! which stands in for "all sufficiently large points" when judging whether a
//! basic set looks finite or cofinite. The inspected basic sets are the
//! `columns`; generator traces over the window are cached.

use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::space::{BasisIndex, GenIndex, Point, Space};

pub type PointSetBits = FixedBitSet;

/// Anything that can be shared as a trait object.
pub trait Shared {
    fn shared(&self) -> Arc<dyn Space>;
}

impl<T: Space + Clone + 'static> Shared for T {
    fn shared(&self) -> Arc<dyn Space> {
        Arc::new(self.clone())
    }
}

impl Space for Arc<dyn Space> {
    fn in_carrier(&self, x: Point) -> bool {
        (**self).in_carrier(x)
    }
    fn in_generator(&self, g: GenIndex, x: Point) -> bool {
        (**self).in_generator(g, x)
    }
    fn generator_window(&self, bound: u64) -> Vec<GenIndex> {
        (**self).generator_window(bound)
    }
    fn rule(&self) -> String {
        (**self).rule()
    }
    fn carrier_bound(&self) -> Option<u64> {
        (**self).carrier_bound()
    }
    fn k(&self, x: Point, m: &BasisIndex, n: &BasisIndex) -> BasisIndex {
        (**self).k(x, m, n)
    }
}

#[derive(Clone)]
pub struct Truncation {
    n: u64,
    tail_from: u64,
    carrier: FixedBitSet,
    gen_ids: Vec<GenIndex>,
    gen_pos: HashMap<GenIndex, usize>,
    gen_sets: Vec<FixedBitSet>,
    columns: Vec<BasisIndex>,
    space: Arc<dyn Space>,
}

impl std::fmt::Debug for Truncation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Truncation")
            .field("rule", &self.space.rule())
            .field("n", &self.n)
            .field("tail_from", &self.tail_from)
            .field("generators", &self.gen_ids.len())
            .field("columns", &self.columns.len())
            .finish()
    }
}

/// Exact window `[0, n)` with the columns `U_0, …, U_{m-1}`; the upper half of
/// the window is the tail.
pub fn materialize<S: Shared + ?Sized>(s: &S, n: u64, m: u64) -> Truncation {
    let bits = 64 - m.saturating_sub(1).leading_zeros() as u64;
    let gens: Vec<GenIndex> = (0..bits).collect();
    let columns = (0..m).map(BasisIndex::from_u64).collect();
    Truncation::build(s.shared(), n, (n / 2).max(1).min(n), gens, columns)
}

impl Truncation {
    /// Window for the extraction pipelines: points of interest below `domain`,
    /// tail `[domain, horizon)`, generators relevant to points below `gen_bound`.
    /// Columns are `U_0` and the single generators.
    pub fn window<S: Shared + ?Sized>(s: &S, domain: u64, horizon: u64, gen_bound: u64) -> Truncation {
        let space = s.shared();
        let gens = space.generator_window(gen_bound);
        let columns = std::iter::once(BasisIndex::full()).chain(gens.iter().map(|&g| BasisIndex::single(g))).collect();
        Truncation::build(space, horizon.max(domain), domain, gens, columns)
    }

    fn build(space: Arc<dyn Space>, n: u64, tail_from: u64, gens: Vec<GenIndex>, columns: Vec<BasisIndex>) -> Truncation {
        let mut carrier = FixedBitSet::with_capacity(n as usize);
        for x in 0..n {
            carrier.set(x as usize, space.in_carrier(x));
        }
        let gen_sets: Vec<FixedBitSet> = gens
            .iter()
            .map(|&g| {
                let mut b = FixedBitSet::with_capacity(n as usize);
                for x in carrier.ones() {
                    if space.in_generator(g, x as u64) {
                        b.insert(x);
                    }
                }
                b
            })
            .collect();
        let gen_pos = gens.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        Truncation { n, tail_from, carrier, gen_ids: gens, gen_pos, gen_sets, columns, space }
    }

    pub fn with_columns<I: IntoIterator<Item = BasisIndex>>(mut self, extra: I) -> Self {
        for c in extra {
            if !self.columns.contains(&c) {
                self.columns.push(c);
            }
        }
        self
    }

    pub fn with_tail(mut self, tail_from: u64) -> Self {
        self.tail_from = tail_from.min(self.n);
        self
    }

    pub fn space(&self) -> &Arc<dyn Space> {
        &self.space
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn tail_from(&self) -> u64 {
        self.tail_from
    }

    pub fn columns(&self) -> &[BasisIndex] {
        &self.columns
    }

    pub fn generators(&self) -> &[GenIndex] {
        &self.gen_ids
    }

    pub fn carrier(&self) -> &FixedBitSet {
        &self.carrier
    }

    pub fn in_carrier(&self, x: Point) -> bool {
        x < self.n && self.carrier.contains(x as usize)
    }

    /// Carrier points of the window.
    pub fn points(&self) -> Vec<Point> {
        self.carrier.ones().map(|x| x as u64).collect()
    }

    /// Carrier points below the tail.
    pub fn focus(&self) -> Vec<Point> {
        self.carrier.ones().map(|x| x as u64).take_while(|&x| x < self.tail_from).collect()
    }

    pub fn tail(&self) -> Vec<Point> {
        self.carrier.ones().map(|x| x as u64).filter(|&x| x >= self.tail_from).collect()
    }

    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.n as usize)
    }

    pub fn mask(&self, pts: &[Point]) -> FixedBitSet {
        let mut b = self.empty_set();
        for &p in pts {
            if p < self.n {
                b.insert(p as usize);
            }
        }
        b
    }

    /// `V_g` on the window.
    pub fn generator_set(&self, g: GenIndex) -> FixedBitSet {
        match self.gen_pos.get(&g) {
            Some(&i) => self.gen_sets[i].clone(),
            None => {
                let mut b = self.empty_set();
                for x in self.carrier.ones() {
                    if self.space.in_generator(g, x as u64) {
                        b.insert(x);
                    }
                }
                b
            }
        }
    }

    /// `U_n` on the window.
    pub fn trace(&self, n: &BasisIndex) -> FixedBitSet {
        let mut acc = self.carrier.clone();
        for &g in n.gens() {
            match self.gen_pos.get(&g) {
                Some(&i) => acc.intersect_with(&self.gen_sets[i]),
                None => acc.intersect_with(&self.generator_set(g)),
            }
        }
        acc
    }

    pub fn basis(&self, n: &BasisIndex, x: Point) -> bool {
        x < self.n && self.trace(n).contains(x as usize)
    }

    /// The incidence matrix, one row per point, one entry per column.
    pub fn incidence(&self) -> Vec<Vec<bool>> {
        let cols: Vec<FixedBitSet> = self.columns.iter().map(|c| self.trace(c)).collect();
        (0..self.n as usize).map(|x| cols.iter().map(|c| c.contains(x)).collect()).collect()
    }

    /// Window generators containing `x`.
    pub fn generators_at(&self, x: Point) -> Vec<GenIndex> {
        self.gen_ids.iter().zip(&self.gen_sets).filter(|(_, s)| s.contains(x as usize)).map(|(&g, _)| g).collect()
    }

    /// The smallest basic set the window can build around `x`: the
    /// intersection of every window generator containing it.
    pub fn min_basic(&self, x: Point) -> (BasisIndex, FixedBitSet) {
        let idx = BasisIndex::from_gens(self.generators_at(x));
        let set = self.trace(&idx);
        (idx, set)
    }

    /// Contains every tail point (and the tail is nonempty).
    pub fn looks_cofinite(&self, set: &FixedBitSet) -> bool {
        let mut any = false;
        for x in self.carrier.ones().filter(|&x| x as u64 >= self.tail_from) {
            any = true;
            if !set.contains(x) {
                return false;
            }
        }
        any
    }

    /// Misses every tail point.
    pub fn looks_finite(&self, set: &FixedBitSet) -> bool {
        set.ones().all(|x| (x as u64) < self.tail_from)
    }

    /// Shrink `idx` by dropping generators, highest first, while the trace on
    /// `within` is unchanged and `keep` still holds. Gives small deterministic
    /// witness indices.
    pub fn reduce_index<F: Fn(&FixedBitSet) -> bool>(&self, idx: &BasisIndex, within: &FixedBitSet, keep: F) -> BasisIndex {
        let target = {
            let mut t = self.trace(idx);
            t.intersect_with(within);
            t
        };
        let mut gens: Vec<GenIndex> = idx.gens().to_vec();
        let mut i = gens.len();
        while i > 0 {
            i -= 1;
            let mut trial = gens.clone();
            trial.remove(i);
            let cand = BasisIndex::from_gens(trial.iter().copied());
            let full = self.trace(&cand);
            let mut t = full.clone();
            t.intersect_with(within);
            if t == target && keep(&full) {
                gens = trial;
            }
        }
        BasisIndex::from_gens(gens)
    }
}

pub fn bits_to_points(b: &FixedBitSet) -> Vec<Point> {
    b.ones().map(|x| x as u64).collect()
}
