//! Discrete subspaces of Hausdorff spaces.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::classify::{separation_counterexample, SepAxiom, SubspaceCertificate, Tag, Witnesses};
use crate::coding::pair_big;
use crate::error::{CscError, Result};
use crate::space::{kbar, BasisIndex, GenIndex, Point};
use crate::truncation::{Shared, Truncation};

use super::{attach_probe, ExtractParams};

/// `⟨m, n⟩` with `x ∈ U_m ∖ U_n`, `y ∈ U_n ∖ U_m` and `U_m ∩ U_n` empty below
/// the stage; `code` is the pair code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeastPair {
    pub m: BasisIndex,
    pub n: BasisIndex,
    pub code: BigUint,
}

/// Indices built from `gens` (at most 63 of them), in increasing code order,
/// restricted to those containing at least one generator flagged in `need`.
struct SubsetWalk {
    gens: Vec<GenIndex>,
    need: u64,
    next: Option<u64>,
}

impl SubsetWalk {
    fn new(mut gens: Vec<GenIndex>, need: impl Fn(GenIndex) -> bool) -> Self {
        gens.truncate(63);
        let need = gens.iter().enumerate().filter(|(_, &g)| need(g)).fold(0u64, |m, (i, _)| m | 1 << i);
        let mut w = SubsetWalk { gens, need, next: None };
        w.next = w.advance(0);
        w
    }

    /// Least `j ≥ from` whose bits hit `need`.
    fn advance(&self, from: u64) -> Option<u64> {
        if self.need == 0 || from >> self.gens.len() != 0 {
            return None;
        }
        if from & self.need != 0 {
            return Some(from);
        }
        let mut best: Option<u64> = None;
        let mut bits = self.need;
        while bits != 0 {
            let b = bits.trailing_zeros();
            bits &= bits - 1;
            let cand = (from | 1 << b) & !((1u64 << b) - 1);
            if cand >= from && cand >> self.gens.len() == 0 {
                best = Some(best.map_or(cand, |c| c.min(cand)));
            }
        }
        best
    }

    fn index(&self, j: u64) -> BasisIndex {
        BasisIndex::from_gens((0..self.gens.len()).filter(|&i| j >> i & 1 == 1).map(|i| self.gens[i]))
    }
}

impl Iterator for SubsetWalk {
    type Item = BasisIndex;
    fn next(&mut self) -> Option<BasisIndex> {
        let j = self.next?;
        self.next = j.checked_add(1).and_then(|n| self.advance(n));
        Some(self.index(j))
    }
}

struct Lazy {
    walk: SubsetWalk,
    items: Vec<(BasisIndex, BigUint, FixedBitSet)>,
}

impl Lazy {
    fn get(&mut self, i: usize, t: &Truncation, below: &FixedBitSet) -> Option<&(BasisIndex, BigUint, FixedBitSet)> {
        while self.items.len() <= i {
            let n = self.walk.next()?;
            let mut tr = t.trace(&n);
            tr.intersect_with(below);
            let code = n.code();
            self.items.push((n, code, tr));
        }
        self.items.get(i)
    }
}

/// The least pair in pair-code order separating `x` from `y` below `stage`,
/// over indices built from the window generators relevant below `gen_bound`.
/// At most `search` candidate pairs are examined.
pub fn least_t2_pair<S: Shared + ?Sized>(
    s: &S,
    x: Point,
    y: Point,
    stage: u64,
    gen_bound: u64,
    search: usize,
) -> Result<LeastPair> {
    if x == y {
        return Err(CscError::Precondition(format!("least pair needs distinct points, got {x} twice")));
    }
    let n = stage.max(x + 1).max(y + 1);
    let t = Truncation::window(s, n, n, gen_bound);
    let mut below = t.empty_set();
    below.insert_range(..stage.min(n) as usize);
    let gen_has = |g: GenIndex, p: Point| t.generator_set(g).contains(p as usize);
    let mut ms = Lazy { walk: SubsetWalk::new(t.generators_at(x), |g| !gen_has(g, y)), items: Vec::new() };
    let mut ns = Lazy { walk: SubsetWalk::new(t.generators_at(y), |g| !gen_has(g, x)), items: Vec::new() };

    let key = |a: &BigUint, b: &BigUint| (a + b, b.clone());
    let mut heap = BinaryHeap::new();
    let mut seen = HashSet::new();
    let (Some(a), Some(b)) = (ms.get(0, &t, &below).map(|e| e.1.clone()), ns.get(0, &t, &below).map(|e| e.1.clone())) else {
        return Err(CscError::NotFoundWithinRange { x, y });
    };
    heap.push(Reverse((key(&a, &b), 0usize, 0usize)));
    seen.insert((0, 0));
    let mut popped = 0;
    while let Some(Reverse((_, i, j))) = heap.pop() {
        popped += 1;
        if popped > search {
            break;
        }
        let (mi, ma, mt) = ms.get(i, &t, &below).cloned().expect("listed");
        let (ni, na, nt) = ns.get(j, &t, &below).cloned().expect("listed");
        if mt.is_disjoint(&nt) {
            let code = pair_big(&ma, &na);
            return Ok(LeastPair { m: mi, n: ni, code });
        }
        for (a, b) in [(i + 1, j), (i, j + 1)] {
            if seen.contains(&(a, b)) {
                continue;
            }
            let Some(ca) = ms.get(a, &t, &below).map(|e| e.1.clone()) else { continue };
            let Some(cb) = ns.get(b, &t, &below).map(|e| e.1.clone()) else { continue };
            seen.insert((a, b));
            heap.push(Reverse((key(&ca, &cb), a, b)));
        }
    }
    Err(CscError::NotFoundWithinRange { x, y })
}

/// The least point of `among` whose smallest window neighbourhood holds at
/// least `count` other points of `cands`.
pub fn find_limit_point(t: &Truncation, among: &[Point], cands: &[Point], count: usize) -> Option<Point> {
    let within = t.mask(cands);
    among.iter().copied().find(|&p| {
        let (_, mut set) = t.min_basic(p);
        set.intersect_with(&within);
        set.set(p as usize, false);
        set.count_ones(..) >= count
    })
}

fn candidates(t: &Truncation, pool: Option<&[Point]>) -> Vec<Point> {
    match pool {
        Some(p) => p.iter().copied().filter(|&x| t.in_carrier(x)).collect(),
        None => t.points(),
    }
}

pub(crate) fn discrete_certificate<S: Shared + ?Sized>(
    s: &S,
    t: &Truncation,
    points: Vec<Point>,
    provenance: &str,
    params: &ExtractParams,
) -> SubspaceCertificate {
    let within = t.mask(&points);
    let isolating = points
        .iter()
        .map(|&x| {
            let (idx, _) = t.min_basic(x);
            t.reduce_index(&idx, &within, |_| true)
        })
        .collect();
    let cert = SubspaceCertificate::new(points, Tag::Discrete, Witnesses::Discrete { isolating }, provenance, params.window());
    attach_probe(s, cert, params.probe).verified(s)
}

/// `count` points forming a discrete subspace of a Hausdorff window. Without a
/// limit point the least candidates already are one; otherwise points are
/// chosen inside shrinking neighbourhoods of the limit point `p`, each
/// neighbourhood built with `kbar` from the least pairs separating `p` from
/// the points chosen so far.
pub fn hausdorff_discrete<S: Shared + ?Sized>(
    s: &S,
    count: usize,
    params: &ExtractParams,
    pool: Option<&[Point]>,
) -> Result<SubspaceCertificate> {
    let t = params.window().truncation(s);
    let cands = candidates(&t, pool);
    let focus: Vec<Point> = cands.iter().copied().filter(|&x| x < params.n).collect();
    if let Some((x, y)) = separation_counterexample(&t, SepAxiom::T2, &focus) {
        return Err(CscError::NotHausdorffOnWindow { x, y });
    }
    let Some(p) = find_limit_point(&t, &focus, &cands, count) else {
        if cands.len() < count {
            return Err(CscError::BudgetExhausted(format!("{} candidate points, wanted {count}", cands.len())));
        }
        return Ok(discrete_certificate(s, &t, cands[..count].to_vec(), "hausdorff", params));
    };

    let allowed = t.mask(&cands);
    let mut xs: Vec<Point> = Vec::new();
    let Some(&x0) = cands.iter().find(|&&x| x != p) else {
        return Err(CscError::BudgetExhausted("no point besides the limit point".into()));
    };
    xs.push(x0);
    let mut stage = params.stage;
    while xs.len() < count {
        let mut f = Vec::with_capacity(xs.len());
        for &x in &xs {
            f.push(least_t2_pair(s, p, x, stage, params.m, params.search)?.m);
        }
        let m_s = kbar(t.space().as_ref(), p, &f)?;
        let last = *xs.last().expect("nonempty");
        let next = t.trace(&m_s).ones().map(|z| z as Point).find(|&z| z > last && z != p && allowed.contains(z as usize));
        match next {
            Some(z) => xs.push(z),
            None => {
                return Err(CscError::BudgetExhausted(format!(
                    "neighbourhood {m_s} of the limit point {p} has no point beyond {last} on the window"
                )))
            }
        }
        stage += 1;
    }
    Ok(discrete_certificate(s, &t, xs, "hausdorff-limit", params))
}

/// Effectively discrete subspace of an effectively Hausdorff space that has a
/// limit point. `e(x, y) = (m, n)` must give `x ∈ U_m`, `y ∈ U_n` with `U_m`
/// and `U_n` disjoint; this is checked on the window at every call. The
/// certificate's witnesses are the indices `n_i`.
pub fn eff_hausdorff_eff_discrete<S, E>(s: &S, e: E, count: usize, params: &ExtractParams) -> Result<SubspaceCertificate>
where
    S: Shared + ?Sized,
    E: Fn(Point, Point) -> (BasisIndex, BasisIndex),
{
    let t = params.window().truncation(s);
    let space = t.space().clone();
    let focus = t.focus();
    let Some(p) = find_limit_point(&t, &focus, &t.points(), count) else {
        return Err(CscError::Precondition("no limit point on the window; the space looks discrete".into()));
    };
    let call = |x: Point, y: Point| -> Result<(BasisIndex, BasisIndex)> {
        let (m, n) = e(x, y);
        let (tm, tn) = (t.trace(&m), t.trace(&n));
        if !tm.contains(x as usize) || !tn.contains(y as usize) || !tm.is_disjoint(&tn) {
            return Err(CscError::WitnessContractViolated(format!("e({x}, {y}) = ({m}, {n}) does not separate them")));
        }
        Ok((m, n))
    };
    let kb = |x: Point, f: &[BasisIndex]| {
        kbar(space.as_ref(), x, f).map_err(|err| CscError::WitnessContractViolated(err.to_string()))
    };

    let Some(&x0) = t.points().iter().find(|&&x| x != p) else {
        return Err(CscError::BudgetExhausted("no point besides the limit point".into()));
    };
    let (m0, n0) = call(p, x0)?;
    let mut xs = vec![x0];
    let mut ms = vec![m0];
    let mut ns = vec![n0];
    while xs.len() < count {
        let around_p = kb(p, &ms)?;
        let last = *xs.last().expect("nonempty");
        let Some(next) = t.trace(&around_p).ones().map(|z| z as Point).find(|&z| z > last && z != p) else {
            return Err(CscError::BudgetExhausted(format!("no point of {around_p} beyond {last} on the window")));
        };
        let (m, n) = call(p, next)?;
        let m_s = ms.last().expect("nonempty").clone();
        let mut grown = ms.clone();
        grown.push(m);
        ms.push(kb(p, &grown)?);
        ns.push(kb(next, &[m_s, n])?);
        xs.push(next);
    }
    for (i, n) in ns.iter().enumerate() {
        let tr = t.trace(n);
        if let Some(&bad) = xs.iter().enumerate().find(|&(j, &x)| tr.contains(x as usize) != (i == j)).map(|(_, x)| x) {
            return Err(CscError::WitnessContractViolated(format!("n_{i} = {n} disagrees at point {bad}")));
        }
    }
    let cert = SubspaceCertificate::new(xs, Tag::Discrete, Witnesses::Discrete { isolating: ns }, "eff-hausdorff", params.window());
    Ok(attach_probe(s, cert, params.probe).verified(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::singleton_isolated;
    use crate::families::{Explicit, Indiscrete, LimitPoint, Singletons};
    use crate::space::make_generated_space;

    #[test]
    fn least_pair_examples() {
        let s = make_generated_space(Singletons);
        let lp = least_t2_pair(&s, 2, 5, 8, 8, 1000).unwrap();
        assert_eq!((lp.m, lp.n), (BasisIndex::single(2), BasisIndex::single(5)));
        assert!(matches!(least_t2_pair(&s, 3, 3, 8, 8, 10), Err(CscError::Precondition(_))));

        let late = make_generated_space(Explicit::new(
            vec![(0..40).filter(|&x| x == 0 || x >= 10).collect(), (0..40).filter(|&x| x == 1 || x >= 10).collect(), vec![0], vec![1]],
            Some(40),
        ));
        let early = least_t2_pair(&late, 0, 1, 5, 4, 1000).unwrap();
        assert_eq!(early.code, pair_big(&BigUint::from(1u8), &BigUint::from(2u8)));
        for stage in [11, 20, 40] {
            let lp = least_t2_pair(&late, 0, 1, stage, 4, 1000).unwrap();
            assert_eq!((lp.m, lp.n), (BasisIndex::single(2), BasisIndex::single(1)));
        }
    }

    #[test]
    fn subset_walk_is_ordered() {
        let w = SubsetWalk::new(vec![0, 1, 2, 3], |g| g == 2);
        let codes: Vec<u64> = w.map(|n| n.code_u64().unwrap()).collect();
        assert_eq!(codes, vec![4, 5, 6, 7, 12, 13, 14, 15]);
    }

    #[test]
    fn limit_point_family() {
        let s = make_generated_space(LimitPoint);
        let params = ExtractParams::new(16, 16, 10).with_horizon(64);
        let c = hausdorff_discrete(&s, 10, &params, None).unwrap();
        assert_eq!(c.points, (1..=10).collect::<Vec<_>>());
        assert!(c.passed(), "{:?}", c.report);
        for &x in &c.points {
            assert!(singleton_isolated(&s, x, 16).unwrap().is_some());
        }
    }

    #[test]
    fn identity_and_failure() {
        let params = ExtractParams::new(16, 16, 6);
        let c = hausdorff_discrete(&make_generated_space(Singletons), 6, &params, None).unwrap();
        assert_eq!(c.points, vec![0, 1, 2, 3, 4, 5]);
        assert!(c.passed());
        assert!(matches!(
            hausdorff_discrete(&make_generated_space(Indiscrete), 6, &params, None),
            Err(CscError::NotHausdorffOnWindow { .. })
        ));
    }

    fn limit_e(x: Point, y: Point) -> (BasisIndex, BasisIndex) {
        let around = |a: Point, b: Point| {
            if a == 0 {
                BasisIndex::single(LimitPoint::tail_gen(b))
            } else {
                BasisIndex::single(LimitPoint::point_gen(a))
            }
        };
        (around(x, y), around(y, x))
    }

    #[test]
    fn effective_version() {
        let s = make_generated_space(LimitPoint);
        let params = ExtractParams::new(16, 16, 8).with_horizon(64);
        let c = eff_hausdorff_eff_discrete(&s, limit_e, 8, &params).unwrap();
        assert_eq!(c.points, (1..=8).collect::<Vec<_>>());
        assert!(c.passed(), "{:?}", c.report);
        let one = eff_hausdorff_eff_discrete(&s, limit_e, 1, &params).unwrap();
        assert_eq!(one.points, vec![1]);
        let bad = |x: Point, y: Point| (BasisIndex::full(), limit_e(x, y).1);
        assert!(matches!(eff_hausdorff_eff_discrete(&s, bad, 4, &params), Err(CscError::WitnessContractViolated(_))));
        assert!(matches!(
            eff_hausdorff_eff_discrete(&make_generated_space(Singletons), limit_e, 4, &params),
            Err(CscError::Precondition(_))
        ));
    }
}
