//! The finite constraint trees `T_{F,H,J}` and their structural properties.
//!
//! Strings have length at most `max F` (with `max ∅ = 0`). A string `σ`
//! survives when
//! - `σ(e) ≠ Φ_e^{X⊕F}(e)` for `e < |σ|`, the computation using at most
//!   `|σ|` bits of the join (even bits `X`, odd bits `F`);
//! - no `⟨e,k⟩ ∈ H` has `k < x0 < x1 ≤ |σ|` with `Φ_e^σ(x0) = Φ_e^σ(x1) = 1`;
//! - `Φ_e^σ(e)` diverges for every `e ∈ J`.
//!
//! `X` is a finite prefix; bits past its end read as 0.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CscError, Result};
use crate::functional::{bits_to_string, Axiom, FunctionalTable};

/// Longest strings enumerated exhaustively.
pub const MAX_TREE_DEPTH: u64 = 20;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    pub x_prefix: Vec<bool>,
    pub f: BTreeSet<u64>,
    pub h: BTreeSet<(u64, u64)>,
    pub j: BTreeSet<u64>,
}

impl TreeParams {
    pub fn new(f: impl IntoIterator<Item = u64>) -> Self {
        TreeParams { f: f.into_iter().collect(), ..Default::default() }
    }

    pub fn with_h(mut self, h: impl IntoIterator<Item = (u64, u64)>) -> Self {
        self.h = h.into_iter().collect();
        self
    }

    pub fn with_j(mut self, j: impl IntoIterator<Item = u64>) -> Self {
        self.j = j.into_iter().collect();
        self
    }

    pub fn with_x(mut self, x: Vec<bool>) -> Self {
        self.x_prefix = x;
        self
    }

    pub fn max_f(&self) -> u64 {
        self.f.last().copied().unwrap_or(0)
    }

    /// The first `len` bits of `X ⊕ F`.
    pub fn join_prefix(&self, len: usize) -> Vec<bool> {
        (0..len)
            .map(|i| {
                let k = i / 2;
                if i % 2 == 0 {
                    self.x_prefix.get(k).copied().unwrap_or(false)
                } else {
                    self.f.contains(&(k as u64))
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintTree {
    pub params: TreeParams,
    /// Surviving strings, shortlex.
    pub strings: BTreeSet<Bits>,
}

/// A binary string ordered by length, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Bits(pub Vec<bool>);

impl Ord for Bits {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Bits {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bits_to_string(&self.0))
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bits_to_string(&self.0))
    }
}

impl From<Bits> for String {
    fn from(b: Bits) -> String {
        b.to_string()
    }
}

impl TryFrom<String> for Bits {
    type Error = String;
    fn try_from(s: String) -> std::result::Result<Self, String> {
        crate::functional::parse_bits(&s).map(Bits).ok_or_else(|| format!("not a bit string: {s}"))
    }
}

impl Bits {
    pub fn parse(s: &str) -> Option<Self> {
        crate::functional::parse_bits(s).map(Bits)
    }
}

/// Whether `σ` passes all three clauses.
pub fn qualifies(table: &FunctionalTable, p: &TreeParams, sigma: &[bool]) -> Result<bool> {
    let n = sigma.len();
    let join = p.join_prefix(n);
    for e in 0..n as u64 {
        if table.apply(e, &join, e)?.value() == Some(sigma[e as usize] as u64) {
            return Ok(false);
        }
    }
    for &(e, k) in &p.h {
        let ones = ((k + 1)..=n as u64).filter(|&x| matches!(table.apply(e, sigma, x), Ok(o) if o.value() == Some(1)));
        if ones.take(2).count() == 2 {
            return Ok(false);
        }
    }
    for &e in &p.j {
        if table.apply(e, sigma, e)?.value().is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every string of length at most `max F` that passes, found by testing
/// each candidate on its own.
pub fn build_tree(table: &FunctionalTable, p: &TreeParams) -> Result<ConstraintTree> {
    table.ensure_consistent()?;
    let depth = p.max_f();
    if depth > MAX_TREE_DEPTH {
        return Err(CscError::Precondition(format!("max F = {depth} exceeds {MAX_TREE_DEPTH}")));
    }
    let mut strings = BTreeSet::new();
    for len in 0..=depth as usize {
        for code in 0..(1u64 << len) {
            let sigma: Vec<bool> = (0..len).map(|i| code >> (len - 1 - i) & 1 == 1).collect();
            if qualifies(table, p, &sigma)? {
                strings.insert(Bits(sigma));
            }
        }
    }
    Ok(ConstraintTree { params: p.clone(), strings })
}

impl ConstraintTree {
    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn contains(&self, s: &[bool]) -> bool {
        self.strings.contains(&Bits(s.to_vec()))
    }

    pub fn maximal(&self) -> impl Iterator<Item = &Bits> {
        let m = self.params.max_f() as usize;
        self.strings.iter().filter(move |b| b.0.len() == m)
    }

    /// A string whose proper prefix is missing, if any.
    pub fn prefix_gap(&self) -> Option<&Bits> {
        self.strings.iter().find(|b| !b.0.is_empty() && !self.contains(&b.0[..b.0.len() - 1]))
    }

    pub fn up_to(&self, len: usize) -> BTreeSet<&Bits> {
        self.strings.iter().filter(|b| b.0.len() <= len).collect()
    }
}

/// Contains a string of length `max F`.
pub fn looks_extendible(t: &ConstraintTree) -> bool {
    t.maximal().next().is_some()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseReport {
    pub checked: u64,
    pub failures: Vec<String>,
}

impl ClauseReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.failures.len() < 16 {
            self.failures.push(what());
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralReport {
    /// Prefix closure.
    pub tree: ClauseReport,
    /// Growing `F` keeps the tree below `max F0`.
    pub extension: ClauseReport,
    /// Growing `H` and `J` shrinks the tree.
    pub monotone: ClauseReport,
    /// Finite surrogate along a chain: the union grows strictly, stays inside
    /// `T_U` for the last `U`, and holds a string of each length `max F_n`.
    pub chain: ClauseReport,
}

impl StructuralReport {
    pub fn passed(&self) -> bool {
        self.tree.passed() && self.extension.passed() && self.monotone.passed() && self.chain.passed()
    }

    pub fn merge(&mut self, o: StructuralReport) {
        for (a, b) in [(&mut self.tree, o.tree), (&mut self.extension, o.extension), (&mut self.monotone, o.monotone), (&mut self.chain, o.chain)] {
            a.checked += b.checked;
            a.failures.extend(b.failures);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "part", rename_all = "snake_case")]
pub enum StructuralCase {
    Tree(TreeParams),
    Extension { small: TreeParams, large: BTreeSet<u64> },
    Monotone { weak: TreeParams, h: BTreeSet<(u64, u64)>, j: BTreeSet<u64> },
    Chain { base: TreeParams, chain: Vec<BTreeSet<u64>> },
}

fn extends_cleanly(f0: &BTreeSet<u64>, f1: &BTreeSet<u64>) -> bool {
    let m = f0.last().copied();
    f0.is_subset(f1) && f1.difference(f0).next().is_none_or(|&d| m.is_none_or(|m| d > m))
}

/// Checks every case. A case whose hypotheses fail is an error.
pub fn check_structural(table: &FunctionalTable, cases: &[StructuralCase]) -> Result<StructuralReport> {
    let mut rep = StructuralReport::default();
    for case in cases {
        match case {
            StructuralCase::Tree(p) => {
                let t = build_tree(table, p)?;
                rep.tree.check(t.prefix_gap().is_none(), || format!("{p:?}: {:?} lacks its parent", t.prefix_gap()));
            }
            StructuralCase::Extension { small, large } => {
                if !extends_cleanly(&small.f, large) {
                    return Err(CscError::HypothesisViolated(format!("{:?} does not extend {:?} above its max", large, small.f)));
                }
                let p1 = TreeParams { f: large.clone(), ..small.clone() };
                let (t0, t1) = (build_tree(table, small)?, build_tree(table, &p1)?);
                let m = small.max_f() as usize;
                rep.extension.check(t0.strings.is_subset(&t1.strings) && t0.up_to(m) == t1.up_to(m), || {
                    format!("{small:?} vs F = {large:?}")
                });
            }
            StructuralCase::Monotone { weak, h, j } => {
                if !weak.h.is_subset(h) || !weak.j.is_subset(j) {
                    return Err(CscError::HypothesisViolated("H and J must grow".into()));
                }
                let strong = TreeParams { h: h.clone(), j: j.clone(), ..weak.clone() };
                let (t0, t1) = (build_tree(table, weak)?, build_tree(table, &strong)?);
                rep.monotone.check(t1.strings.is_subset(&t0.strings), || format!("{weak:?} vs H = {h:?}, J = {j:?}"));
            }
            StructuralCase::Chain { base, chain } => {
                let grows = chain.windows(2).all(|w| {
                    extends_cleanly(&w[0], &w[1]) && w[1].last() > w[0].last()
                });
                if chain.is_empty() || !grows {
                    return Err(CscError::HypothesisViolated("chain must grow above each max".into()));
                }
                let trees = chain
                    .iter()
                    .map(|f| build_tree(table, &TreeParams { f: f.clone(), ..base.clone() }))
                    .collect::<Result<Vec<_>>>()?;
                if !trees.iter().all(looks_extendible) {
                    return Err(CscError::HypothesisViolated("every tree on the chain must look extendible".into()));
                }
                let top = TreeParams { f: chain.last().expect("nonempty").clone(), x_prefix: base.x_prefix.clone(), ..Default::default() };
                let t_top = build_tree(table, &top)?;
                let mut union: BTreeSet<Bits> = BTreeSet::new();
                let mut last = 0;
                for t in &trees {
                    union.extend(t.strings.iter().cloned());
                    let m = t.params.max_f() as usize;
                    let ok = union.len() > last
                        && union.iter().any(|b| b.0.len() == m)
                        && union.is_subset(&t_top.strings);
                    rep.chain.check(ok, || format!("{base:?} at F = {:?}", t.params.f));
                    last = union.len();
                }
            }
        }
    }
    Ok(rep)
}

/// A consistent random table over `Φ_e` for `e < indices`, inputs below
/// `inputs` and oracle strings of length at most `max_use`.
pub fn random_table(rng: &mut impl Rng, indices: u64, inputs: u64, max_use: usize, axioms: usize) -> FunctionalTable {
    let mut ax: Vec<Axiom> = Vec::new();
    let mut tries = 0;
    while ax.len() < axioms && tries < axioms * 20 {
        tries += 1;
        let len = rng.gen_range(0..=max_use);
        let a = Axiom {
            e: rng.gen_range(0..indices),
            oracle: (0..len).map(|_| rng.gen()).collect(),
            x: rng.gen_range(0..inputs),
            y: rng.gen_range(0..3),
        };
        let mut next = ax.clone();
        next.push(a);
        if FunctionalTable::new(next.clone()).ensure_consistent().is_ok() {
            ax = next;
        }
    }
    FunctionalTable::new(ax)
}

/// The seeded corpus used by the self-checks.
pub fn table_corpus(seed: u64, n: usize) -> Vec<FunctionalTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_table(&mut rng, 4, 7, 5, 12)).collect()
}

/// All subsets of `items`, by bitmask.
fn subsets<T: Clone + Ord>(items: &[T], max_size: usize) -> Vec<BTreeSet<T>> {
    (0u32..1 << items.len())
        .filter(|m| m.count_ones() as usize <= max_size)
        .map(|m| items.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, t)| t.clone()).collect())
        .collect()
}

/// Cases over every `F ⊆ [0, max_f]`, with `H` and `J` of size at most 2
/// sampled from small pools.
pub fn structural_cases(rng: &mut impl Rng, max_f: u64, per_f: usize) -> Vec<StructuralCase> {
    let hs = subsets(&[(0, 0), (0, 2), (1, 1), (2, 0), (3, 3)], 2);
    let js = subsets(&[0, 1, 2, 3], 2);
    let fs = subsets(&(0..=max_f).collect::<Vec<_>>(), usize::MAX);
    let mut cases = Vec::new();
    for f in &fs {
        for _ in 0..per_f {
            let h = hs[rng.gen_range(0..hs.len())].clone();
            let j = js[rng.gen_range(0..js.len())].clone();
            let x: Vec<bool> = (0..4).map(|_| rng.gen()).collect();
            let p = TreeParams { x_prefix: x, f: f.clone(), h: h.clone(), j: j.clone() };
            cases.push(StructuralCase::Tree(p.clone()));
            // every clean shrinking of F is an initial cut
            for cut in f.iter() {
                let small: BTreeSet<u64> = f.range(..=cut).copied().collect();
                cases.push(StructuralCase::Extension { small: TreeParams { f: small, ..p.clone() }, large: f.clone() });
            }
            let weak = TreeParams {
                h: h.iter().copied().filter(|_| rng.gen()).collect(),
                j: j.iter().copied().filter(|_| rng.gen()).collect(),
                ..p.clone()
            };
            cases.push(StructuralCase::Monotone { weak, h, j });
        }
    }
    cases
}

/// A growing chain of `len` sets whose maxima climb by 1 or 2 from `start`.
pub fn random_chain(rng: &mut impl Rng, start: u64, len: usize) -> Vec<BTreeSet<u64>> {
    let mut cur: BTreeSet<u64> = [start].into();
    let mut out = vec![cur.clone()];
    for _ in 1..len {
        let m = *cur.last().expect("nonempty");
        let next = m + rng.gen_range(1..=2);
        if next > m + 1 && rng.gen() {
            cur.insert(m + 1);
        }
        cur.insert(next);
        out.push(cur.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        crate::functional::parse_bits(s).unwrap()
    }

    #[test]
    fn vacuous_tree_is_full() {
        let t = build_tree(&FunctionalTable::empty(), &TreeParams::new([3])).unwrap();
        assert_eq!(t.len(), 15);
        assert!(looks_extendible(&t));
        let t = build_tree(&FunctionalTable::empty(), &TreeParams::new([0])).unwrap();
        assert_eq!(t.len(), 1);
        assert!(looks_extendible(&t));
    }

    #[test]
    fn dnc_clause_filters_first_bit() {
        let table = FunctionalTable::new(vec![Axiom::new(0, "-", 0, 1)]);
        let t = build_tree(&table, &TreeParams::new([3])).unwrap();
        assert!(t.strings.iter().all(|b| b.0.first() != Some(&true)));
        assert_eq!(t.len(), 1 + 1 + 2 + 4);
    }

    #[test]
    fn dnc_reads_the_join() {
        // Φ_1 answers 1 only when 0 ∈ F, which is bit 1 of X ⊕ F
        let table = FunctionalTable::new(vec![Axiom::new(1, "01", 1, 1)]);
        let with = build_tree(&table, &TreeParams::new([0, 2])).unwrap();
        let without = build_tree(&table, &TreeParams::new([2])).unwrap();
        assert!(!with.contains(&bits("01")) && without.contains(&bits("01")));
    }

    #[test]
    fn j_clause_with_empty_use_empties_the_tree() {
        let table = FunctionalTable::new(vec![Axiom::new(2, "-", 2, 0)]);
        let t = build_tree(&table, &TreeParams::new([3]).with_j([2])).unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn h_clause() {
        // Φ_0^σ(x) = 1 for x = 1, 2 once σ starts with 1
        let table = FunctionalTable::new(vec![Axiom::new(0, "1", 1, 1), Axiom::new(0, "1", 2, 1)]);
        let t = build_tree(&table, &TreeParams::new([3]).with_h([(0, 0)])).unwrap();
        assert!(t.contains(&bits("1")) && !t.contains(&bits("10")) && t.contains(&bits("01")));
        let t = build_tree(&table, &TreeParams::new([3]).with_h([(0, 1)])).unwrap();
        assert!(t.contains(&bits("111")));
    }

    #[test]
    fn blocked_at_the_root() {
        // DNC forbids σ(0) = 1, J forbids σ(0) = 0
        let table = FunctionalTable::new(vec![Axiom::new(0, "-", 0, 1), Axiom::new(1, "0", 1, 0)]);
        let t = build_tree(&table, &TreeParams::new([1]).with_j([1])).unwrap();
        assert_eq!(t.strings.iter().cloned().collect::<Vec<_>>(), vec![Bits(vec![])]);
        assert!(!looks_extendible(&t));
    }

    #[test]
    fn inconsistent_and_too_deep() {
        let bad = FunctionalTable::new(vec![Axiom::new(0, "-", 0, 0), Axiom::new(0, "1", 0, 1)]);
        assert!(matches!(build_tree(&bad, &TreeParams::new([2])), Err(CscError::Table(_))));
        assert!(matches!(build_tree(&FunctionalTable::empty(), &TreeParams::new([40])), Err(CscError::Precondition(_))));
    }

    #[test]
    fn structural_on_small_corpus() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cases = structural_cases(&mut rng, 4, 1);
        for table in table_corpus(1, 5) {
            let rep = check_structural(&table, &cases).unwrap();
            assert!(rep.passed(), "{rep:?}");
        }
    }

    #[test]
    fn agreement_below_max_f0() {
        let cases = [StructuralCase::Extension { small: TreeParams::new([2]), large: [2, 5].into() }];
        let rep = check_structural(&FunctionalTable::empty(), &cases).unwrap();
        assert!(rep.passed() && rep.extension.checked == 1);
    }

    #[test]
    fn hypotheses_enforced() {
        let cases = [StructuralCase::Extension { small: TreeParams::new([2, 4]), large: [2, 3, 4].into() }];
        assert!(matches!(check_structural(&FunctionalTable::empty(), &cases), Err(CscError::HypothesisViolated(_))));
        let cases = [StructuralCase::Monotone { weak: TreeParams::new([2]).with_j([1]), h: BTreeSet::new(), j: BTreeSet::new() }];
        assert!(matches!(check_structural(&FunctionalTable::empty(), &cases), Err(CscError::HypothesisViolated(_))));
    }

    #[test]
    fn chain_surrogate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let chain = random_chain(&mut rng, 1, 6);
        let cases = [StructuralCase::Chain { base: TreeParams::default(), chain }];
        let rep = check_structural(&table_corpus(9, 1)[0], &cases).unwrap();
        assert!(rep.passed() && rep.chain.checked == 6, "{rep:?}");
    }

    #[test]
    fn bits_roundtrip() {
        let b = Bits(bits("0110"));
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(s, "\"0110\"");
        assert_eq!(serde_json::from_str::<Bits>(&s).unwrap(), b);
    }
}
