//! Stage-by-stage simulation of the finite-injury construction of a
//! computable, effectively Hausdorff, discrete space without a computable
//! effectively discrete subspace.
//!
//! Generators: `V_{2⟨x,y⟩}` and `V_{2⟨x,y⟩+1}` start as `{x}`; at the end of
//! stage `s`, `s` enters every `V_n` claimed by an `R` requirement.
//! Requirements are ordered `D_0, R_0, D_1, R_1, …` with `R_i = R_{e,u}` for
//! `i = ⟨e,u⟩`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coding::{decode_seq, pair, unpair};
use crate::error::{CscError, Result};
use crate::families::FnFamily;
use crate::functional::FunctionalTable;
use crate::space::{make_generated_space, BasisIndex, CscSpace, GenIndex, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "req", rename_all = "snake_case")]
pub enum Requirement {
    D { x: u64 },
    R { e: u64, u: u64 },
}

impl Requirement {
    pub fn from_priority(p: u64) -> Self {
        if p.is_multiple_of(2) {
            Requirement::D { x: p / 2 }
        } else {
            let (e, u) = unpair(p / 2);
            Requirement::R { e, u }
        }
    }

    /// Position in the priority order; smaller is stronger.
    pub fn priority(self) -> u64 {
        match self {
            Requirement::D { x } => 2 * x,
            Requirement::R { e, u } => 2 * pair(e, u) + 1,
        }
    }
}

impl fmt::Display for Requirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Requirement::D { x } => write!(f, "D_{x}"),
            Requirement::R { e, u } => write!(f, "R_{e},{u}"),
        }
    }
}

/// `n̄ = 2⟨y,x⟩` for even `n = 2⟨x,y⟩`.
pub fn bar(n: u64) -> Option<u64> {
    n.is_multiple_of(2).then(|| {
        let (x, y) = unpair(n / 2);
        2 * pair(y, x)
    })
}

/// The point every `V_n` starts with.
pub fn base_point(n: u64) -> Point {
    unpair(n / 2).0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    Claim { req: Requirement, indices: Vec<u64>, witness: Option<u64> },
    Cancel { req: Requirement, indices: Vec<u64> },
    Enumerate { point: u64, indices: Vec<u64> },
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Claim { req, indices, witness: Some(x) } => write!(f, "{req} claims {indices:?} for x = {x}"),
            Action::Claim { req, indices, .. } => write!(f, "{req} claims {indices:?}"),
            Action::Cancel { req, indices } => write!(f, "{req} loses {indices:?}"),
            Action::Enumerate { point, indices } => write!(f, "enumerate {point} into {indices:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageLog {
    pub stage: u64,
    pub actions: Vec<Action>,
}

impl StageLog {
    pub fn acted(&self) -> Option<Requirement> {
        self.actions.iter().find_map(|a| match a {
            Action::Claim { req, .. } => Some(*req),
            _ => None,
        })
    }

    pub fn lines(&self) -> impl Iterator<Item = String> + '_ {
        self.actions.iter().map(move |a| format!("stage {}: {a}", self.stage))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub indices: Vec<u64>,
    pub stage: u64,
    pub witness: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct ConstructionState {
    pub stage: u64,
    /// Seeding window: `x, y < bound`.
    pub bound: u64,
    table: FunctionalTable,
    claims: BTreeMap<Requirement, Claim>,
    enumerated: HashMap<u64, Vec<u64>>,
    max_claimed: Option<u64>,
    open_d: BTreeSet<u64>,
    introduced_d: u64,
    r_reqs: Vec<Requirement>,
    actions: HashMap<Requirement, u64>,
}

/// Stage 0: nothing claimed, every `V_n` is its base point.
pub fn init_construction(table: FunctionalTable, bound: u64) -> Result<ConstructionState> {
    table.ensure_consistent()?;
    let idx = table.indices();
    let mut r_reqs: Vec<Requirement> = idx.iter().flat_map(|&e| idx.iter().map(move |&u| Requirement::R { e, u })).collect();
    r_reqs.sort_by_key(|r| r.priority());
    Ok(ConstructionState {
        stage: 0,
        bound,
        table,
        claims: BTreeMap::new(),
        enumerated: HashMap::new(),
        max_claimed: None,
        open_d: BTreeSet::new(),
        introduced_d: 0,
        r_reqs,
        actions: HashMap::new(),
    })
}

impl ConstructionState {
    pub fn table(&self) -> &FunctionalTable {
        &self.table
    }

    pub fn claim(&self, r: Requirement) -> Option<&Claim> {
        self.claims.get(&r)
    }

    pub fn claims(&self) -> &BTreeMap<Requirement, Claim> {
        &self.claims
    }

    /// Times each requirement has acted.
    pub fn action_count(&self, r: Requirement) -> u64 {
        self.actions.get(&r).copied().unwrap_or(0)
    }

    /// Points enumerated into `V_n` after seeding.
    pub fn enumerated(&self, n: u64) -> &[u64] {
        self.enumerated.get(&n).map_or(&[], |v| v.as_slice())
    }

    /// `V_n` as enumerated so far.
    pub fn generator(&self, n: u64) -> Vec<Point> {
        let mut v = vec![base_point(n)];
        v.extend_from_slice(self.enumerated(n));
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn member(&self, n: u64, p: Point) -> bool {
        p == base_point(n) || self.enumerated(n).binary_search(&p).is_ok()
    }

    fn claimed_by_stronger(&self, than: Requirement, n: u64, only_r: bool) -> bool {
        self.claims
            .iter()
            .any(|(r, c)| r.priority() < than.priority() && (!only_r || matches!(r, Requirement::R { .. })) && c.indices.contains(&n))
    }

    /// The least `x` and indices that make `R_{e,u}` require attention.
    fn r_attention(&self, req: Requirement) -> Result<Option<(u64, Vec<u64>)>> {
        let Requirement::R { e, u } = req else { return Ok(None) };
        let s = self.stage;
        for x in self.table.inputs(e).into_iter().take_while(|&x| x < s) {
            if self.table.apply_at_stage(e, x, s)? != Some(1) {
                continue;
            }
            let Some(code) = self.table.apply_at_stage(u, x, s)? else { continue };
            if code == 0 || code >= s {
                continue;
            }
            let ns = decode_seq(code);
            let ok = ns.iter().all(|&n| {
                !self.claimed_by_stronger(req, n, false)
                    && bar(n).is_none_or(|b| b == n || !self.claimed_by_stronger(req, b, true))
            }) && !ns.iter().any(|&a| bar(a).is_some_and(|b| b != a && ns.contains(&b)));
            if ok {
                return Ok(Some((x, ns)));
            }
        }
        Ok(None)
    }

    fn note_claimed(&mut self, indices: &[u64]) {
        let m = indices.iter().copied().max();
        self.max_claimed = self.max_claimed.max(m);
    }
}

/// One stage: the strongest requirement with priority below `s` that
/// requires attention acts, then `s` is enumerated into every `R`-claimed
/// generator.
pub fn run_stage(st: &mut ConstructionState) -> Result<StageLog> {
    let s = st.stage;
    while 2 * st.introduced_d < s {
        st.open_d.insert(st.introduced_d);
        st.introduced_d += 1;
    }
    let mut actions = Vec::new();
    let strongest_d = st.open_d.first().map(|&x| Requirement::D { x });
    let mut chosen: Option<(Requirement, Option<(u64, Vec<u64>)>)> = None;
    for &r in st.r_reqs.iter().take_while(|r| r.priority() < s) {
        if strongest_d.is_some_and(|d| d.priority() < r.priority()) {
            break;
        }
        if st.claims.contains_key(&r) {
            continue;
        }
        if let Some(w) = st.r_attention(r)? {
            chosen = Some((r, Some(w)));
            break;
        }
    }
    if chosen.is_none() {
        chosen = strongest_d.map(|d| (d, None));
    }

    match chosen {
        Some((req @ Requirement::D { x }, _)) => {
            let floor = st.max_claimed;
            let y = (0..).find(|&y| floor.is_none_or(|m| 2 * pair(x, y) + 1 > m)).expect("unbounded");
            let n = 2 * pair(x, y) + 1;
            st.open_d.remove(&x);
            st.claims.insert(req, Claim { indices: vec![n], stage: s, witness: None });
            st.note_claimed(&[n]);
            *st.actions.entry(req).or_default() += 1;
            actions.push(Action::Claim { req, indices: vec![n], witness: None });
        }
        Some((req, Some((x, ns)))) => {
            let weaker: Vec<Requirement> = st.claims.keys().copied().filter(|r| r.priority() > req.priority()).collect();
            for r in weaker {
                let c = st.claims.remove(&r).expect("present");
                if let Requirement::D { x } = r {
                    st.open_d.insert(x);
                }
                actions.push(Action::Cancel { req: r, indices: c.indices });
            }
            st.claims.insert(req, Claim { indices: ns.clone(), stage: s, witness: Some(x) });
            st.note_claimed(&ns);
            *st.actions.entry(req).or_default() += 1;
            actions.push(Action::Claim { req, indices: ns, witness: Some(x) });
        }
        _ => {}
    }

    let mut into: Vec<u64> =
        st.claims.iter().filter(|(r, _)| matches!(r, Requirement::R { .. })).flat_map(|(_, c)| c.indices.iter().copied()).collect();
    into.sort_unstable();
    into.dedup();
    for &n in &into {
        st.enumerated.entry(n).or_default().push(s);
    }
    if !into.is_empty() {
        actions.push(Action::Enumerate { point: s, indices: into });
    }
    st.stage += 1;
    Ok(StageLog { stage: s, actions })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Audit {
    pub stages: u64,
    pub checks: u64,
    pub violations: Vec<String>,
}

impl Audit {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The three invariants, for the stage just logged.
fn audit_stage(st: &ConstructionState, log: &StageLog, audit: &mut Audit) {
    let s = log.stage;
    audit.checks += 3;
    let acted = log.actions.iter().filter(|a| matches!(a, Action::Claim { .. })).count();
    if acted > 1 {
        audit.violations.push(format!("stage {s}: {acted} requirements acted"));
    }
    for a in &log.actions {
        let Action::Enumerate { point, indices } = a else { continue };
        if *point != s {
            audit.violations.push(format!("stage {s}: enumerated {point}"));
        }
        for &n in indices {
            let Some(b) = bar(n).filter(|&b| b != n) else { continue };
            if indices.contains(&b) || st.member(b, s) {
                audit.violations.push(format!("stage {s}: V_{n} and V_{b} share {s}"));
            }
        }
    }
}

/// Run `stages` stages, auditing every one. A violated invariant is an
/// error.
pub fn run_stages(st: &mut ConstructionState, stages: u64) -> Result<(Vec<StageLog>, Audit)> {
    let mut logs = Vec::with_capacity(stages as usize);
    let mut audit = Audit::default();
    for _ in 0..stages {
        let log = run_stage(st)?;
        audit_stage(st, &log, &mut audit);
        audit.stages += 1;
        logs.push(log);
        if let Some(v) = audit.violations.first() {
            return Err(CscError::InvariantViolated(v.clone()));
        }
    }
    Ok((logs, audit))
}

/// Full scan of `V_{2⟨x,y⟩} ∩ V_{2⟨y,x⟩} = ∅` for `x ≠ y < bound`.
pub fn check_disjoint(st: &ConstructionState, bound: u64) -> Option<(u64, u64)> {
    for x in 0..bound {
        for y in 0..bound {
            if x == y {
                continue;
            }
            let (m, n) = (2 * pair(x, y), 2 * pair(y, x));
            if st.generator(m).iter().any(|&p| st.member(n, p)) {
                return Some((m, n));
            }
        }
    }
    None
}

/// `e(x, y)`: the indices of `V_{2⟨x,y⟩}` and `V_{2⟨y,x⟩}`.
pub fn hausdorff_witness(x: Point, y: Point) -> (BasisIndex, BasisIndex) {
    (BasisIndex::single(2 * pair(x, y)), BasisIndex::single(2 * pair(y, x)))
}

/// The generated space of the enumeration so far. Generators relevant below
/// `b` are `2⟨x,y⟩` and `2⟨x,y⟩+1` for `x, y < b`, plus every index with
/// base point below `b` that has been claimed or enumerated into.
pub fn snapshot_space(st: &ConstructionState) -> CscSpace {
    let enumerated = st.enumerated.clone();
    let mut touched: Vec<u64> = enumerated.keys().copied().chain(st.claims.values().flat_map(|c| c.indices.iter().copied())).collect();
    touched.sort_unstable();
    touched.dedup();
    let member = move |n: GenIndex, p: Point| p == base_point(n) || enumerated.get(&n).is_some_and(|v| v.binary_search(&p).is_ok());
    let window = move |b: u64| {
        let mut v: Vec<GenIndex> = (0..b).flat_map(|x| (0..b).flat_map(move |y| [2 * pair(x, y), 2 * pair(x, y) + 1])).collect();
        v.extend(touched.iter().copied().filter(|&n| base_point(n) < b));
        v.sort_unstable();
        v.dedup();
        v
    };
    make_generated_space(FnFamily::new("priority", member).with_window(window))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ReqStatus {
    /// `V_n = {x}` for the claimed index.
    SatisfiedOnWindow { index: u64 },
    /// Every stage since the claim lies in each claimed generator, so their
    /// intersection holds `tail` as well as `x`.
    SatisfiedOnWindowR { x: u64, indices: Vec<u64>, tail: u64 },
    Pending,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequirementReport {
    pub stage: u64,
    pub entries: Vec<(Requirement, ReqStatus)>,
}

impl RequirementReport {
    pub fn status(&self, r: Requirement) -> Option<&ReqStatus> {
        self.entries.iter().find(|(q, _)| *q == r).map(|(_, s)| s)
    }

    pub fn all_satisfied(&self) -> bool {
        self.entries.iter().all(|(_, s)| *s != ReqStatus::Pending)
    }
}

/// `D_x` for `x < bound`, and the `R_{e,u}` with `⟨e,u⟩ < bound` whose
/// functionals have axioms.
pub fn verify_requirements(st: &ConstructionState, bound: u64) -> RequirementReport {
    let mut entries = Vec::new();
    for x in 0..bound {
        let r = Requirement::D { x };
        let status = match st.claims.get(&r) {
            Some(c) if st.enumerated(c.indices[0]).is_empty() => ReqStatus::SatisfiedOnWindow { index: c.indices[0] },
            _ => ReqStatus::Pending,
        };
        entries.push((r, status));
    }
    for &r in &st.r_reqs {
        let Requirement::R { e, u } = r else { continue };
        if pair(e, u) >= bound {
            continue;
        }
        let status = match st.claims.get(&r) {
            Some(c) if st.stage > c.stage + 1 => {
                let full = c.indices.iter().all(|&n| {
                    let v = st.enumerated(n);
                    (c.stage..st.stage).all(|t| v.binary_search(&t).is_ok())
                });
                match (full, c.witness) {
                    (true, Some(x)) => ReqStatus::SatisfiedOnWindowR { x, indices: c.indices.clone(), tail: st.stage - 1 },
                    _ => ReqStatus::Pending,
                }
            }
            _ => ReqStatus::Pending,
        };
        entries.push((r, status));
    }
    RequirementReport { stage: st.stage, entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::encode_seq;
    use crate::functional::Axiom;
    use crate::space::Space;

    /// `Φ_0` is the characteristic function of `{3, …, 8}` and `Φ_1(x)`
    /// proposes the single index `2⟨x,0⟩+1`.
    pub(crate) fn adversary() -> FunctionalTable {
        let mut ax = Vec::new();
        for x in 3..=8 {
            ax.push(Axiom::new(0, "-", x, 1));
            ax.push(Axiom::new(1, "-", x, encode_seq(&[2 * pair(x, 0) + 1])));
        }
        FunctionalTable::new(ax)
    }

    #[test]
    fn seeding() {
        let st = init_construction(FunctionalTable::empty(), 4).unwrap();
        assert_eq!(st.generator(2 * pair(1, 2)), vec![1]);
        let s = snapshot_space(&st);
        assert!(s.in_generator(2 * pair(1, 2), 1));
        let bad = FunctionalTable::new(vec![Axiom::new(0, "-", 0, 0), Axiom::new(0, "-", 0, 1)]);
        assert!(matches!(init_construction(bad, 4), Err(CscError::Table(_))));
    }

    #[test]
    fn d_requirements_claim_fresh_odd_indices() {
        let mut st = init_construction(FunctionalTable::empty(), 4).unwrap();
        assert!(run_stage(&mut st).unwrap().actions.is_empty());
        let log = run_stage(&mut st).unwrap();
        assert_eq!(log.actions, vec![Action::Claim { req: Requirement::D { x: 0 }, indices: vec![1], witness: None }]);
        run_stage(&mut st).unwrap();
        let log = run_stage(&mut st).unwrap();
        assert_eq!(log.acted(), Some(Requirement::D { x: 1 }));
        assert_eq!(st.claim(Requirement::D { x: 1 }).unwrap().indices, vec![3]);
    }

    #[test]
    fn empty_tables_long_run() {
        let mut st = init_construction(FunctionalTable::empty(), 8).unwrap();
        let (_, audit) = run_stages(&mut st, 1000).unwrap();
        assert!(audit.passed());
        let rep = verify_requirements(&st, 8);
        assert!(rep.all_satisfied(), "{rep:?}");
        assert_eq!(check_disjoint(&st, 8), None);
    }

    #[test]
    fn scripted_adversary() {
        let mut st = init_construction(adversary(), 8).unwrap();
        let (logs, audit) = run_stages(&mut st, 1000).unwrap();
        assert!(audit.passed());
        let r = Requirement::R { e: 0, u: 1 };
        let rep = verify_requirements(&st, 8);
        assert!(matches!(rep.status(r), Some(ReqStatus::SatisfiedOnWindowR { x: 3, .. })), "{rep:?}");
        assert!((0..8).all(|x| matches!(rep.status(Requirement::D { x }), Some(ReqStatus::SatisfiedOnWindow { .. }))));
        // R acted once and injured the D requirements below it once each
        let acted_at = logs.iter().find(|l| l.acted() == Some(r)).unwrap().stage;
        assert_eq!(st.action_count(r), 1);
        for x in 3..8 {
            let d = Requirement::D { x };
            assert_eq!(st.action_count(d), 2, "{d}");
            assert!(logs.iter().filter(|l| l.stage > acted_at && l.acted() == Some(d)).count() <= 1);
        }
        assert_eq!(check_disjoint(&st, 12), None);
    }

    #[test]
    fn snapshot_is_effectively_hausdorff() {
        let mut st = init_construction(adversary(), 8).unwrap();
        run_stages(&mut st, 300).unwrap();
        let s = snapshot_space(&st);
        for x in 0..12 {
            for y in 0..12 {
                if x == y {
                    continue;
                }
                let (m, n) = hausdorff_witness(x, y);
                assert!(s.basis(&m, x) && s.basis(&n, y));
                assert!(s.basic_points(&m, 300).iter().all(|&p| !s.basis(&n, p)));
            }
        }
    }

    #[test]
    fn deterministic() {
        let run = || {
            let mut st = init_construction(adversary(), 8).unwrap();
            run_stages(&mut st, 400).unwrap().0
        };
        assert_eq!(run(), run());
    }
}
