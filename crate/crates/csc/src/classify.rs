//! Separation axioms, minimal-topology recognition and certificates.
//!
//! Every verdict is relative to a [`Truncation`]. The "basis window" of a
//! truncation is the set of all finite intersections of its generators, so the
//! smallest basic set around `x` is [`Truncation::min_basic`].

use std::collections::BTreeMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{CscError, Result};
use crate::space::{kbar, BasisIndex, Point};
use crate::truncation::{bits_to_points, Shared, Truncation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SepAxiom {
    T0,
    T1,
    T2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SepStatus {
    HoldsOnWindow,
    Refuted,
}

/// `u` contains `x` but not `y`, `v` contains `y` but not `x`; for T2 they are
/// disjoint on the window. T0 records only one side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairWitness {
    pub x: Point,
    pub y: Point,
    pub u: Option<BasisIndex>,
    pub v: Option<BasisIndex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationVerdict {
    pub axiom: SepAxiom,
    pub status: SepStatus,
    pub witnesses: Vec<PairWitness>,
    pub counterexample: Option<(Point, Point)>,
}

impl SeparationVerdict {
    pub fn holds(&self) -> bool {
        self.status == SepStatus::HoldsOnWindow
    }
}

pub fn check_separation(t: &Truncation, axiom: SepAxiom) -> SeparationVerdict {
    check_separation_among(t, axiom, &t.focus())
}

/// Separation among `pts`, with basic sets judged on the whole window.
pub fn check_separation_among(t: &Truncation, axiom: SepAxiom, pts: &[Point]) -> SeparationVerdict {
    let mins: BTreeMap<Point, (BasisIndex, FixedBitSet)> = pts.iter().map(|&p| (p, t.min_basic(p))).collect();
    let mut witnesses = Vec::new();
    for (i, &x) in pts.iter().enumerate() {
        for &y in &pts[i + 1..] {
            match separate_pair(t, axiom, x, y, &mins[&x], &mins[&y]) {
                Some(w) => witnesses.push(w),
                None => {
                    return SeparationVerdict {
                        axiom,
                        status: SepStatus::Refuted,
                        witnesses: Vec::new(),
                        counterexample: Some((x, y)),
                    }
                }
            }
        }
    }
    SeparationVerdict { axiom, status: SepStatus::HoldsOnWindow, witnesses, counterexample: None }
}

/// The first pair of `pts` violating `axiom`, without building witnesses.
pub fn separation_counterexample(t: &Truncation, axiom: SepAxiom, pts: &[Point]) -> Option<(Point, Point)> {
    let mins: Vec<FixedBitSet> = pts.iter().map(|&p| t.min_basic(p).1).collect();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let x_out = !mins[i].contains(pts[j] as usize);
            let y_out = !mins[j].contains(pts[i] as usize);
            let ok = match axiom {
                SepAxiom::T0 => x_out || y_out,
                SepAxiom::T1 => x_out && y_out,
                SepAxiom::T2 => mins[i].is_disjoint(&mins[j]),
            };
            if !ok {
                return Some((pts[i], pts[j]));
            }
        }
    }
    None
}

fn separate_pair(
    t: &Truncation,
    axiom: SepAxiom,
    x: Point,
    y: Point,
    mx: &(BasisIndex, FixedBitSet),
    my: &(BasisIndex, FixedBitSet),
) -> Option<PairWitness> {
    let pair = t.mask(&[x, y]);
    let x_out = !mx.1.contains(y as usize);
    let y_out = !my.1.contains(x as usize);
    match axiom {
        SepAxiom::T0 => {
            if x_out {
                Some(PairWitness { x, y, u: Some(t.reduce_index(&mx.0, &pair, |_| true)), v: None })
            } else if y_out {
                Some(PairWitness { x, y, u: None, v: Some(t.reduce_index(&my.0, &pair, |_| true)) })
            } else {
                None
            }
        }
        SepAxiom::T1 => (x_out && y_out).then(|| PairWitness {
            x,
            y,
            u: Some(t.reduce_index(&mx.0, &pair, |_| true)),
            v: Some(t.reduce_index(&my.0, &pair, |_| true)),
        }),
        SepAxiom::T2 => {
            if mx.1.intersection(&my.1).next().is_some() {
                return None;
            }
            let u = t.reduce_index(&mx.0, &pair, |s| s.is_disjoint(&my.1));
            let us = t.trace(&u);
            let v = t.reduce_index(&my.0, &pair, |s| s.is_disjoint(&us));
            Some(PairWitness { x, y, u: Some(u), v: Some(v) })
        }
    }
}

/// Isolating index for `x` following the singleton lemma: for every other
/// window point `y` take the least window generator containing `x` but not `y`,
/// then combine them with `kbar`. `Ok(None)` when only tail points resist
/// exclusion, i.e. every candidate looks infinite.
pub fn isolate_on(t: &Truncation, x: Point) -> Result<Option<BasisIndex>> {
    if !t.in_carrier(x) {
        return Err(CscError::PointOutsideCarrier(x));
    }
    let at_x = t.generators_at(x);
    let mut f: Vec<BasisIndex> = Vec::new();
    let mut blocked = false;
    for y in t.points() {
        if y == x {
            continue;
        }
        match at_x.iter().find(|&&g| !t.generator_set(g).contains(y as usize)) {
            Some(&g) => {
                let b = BasisIndex::single(g);
                if !f.contains(&b) {
                    f.push(b);
                }
            }
            None if y < t.tail_from() => return Err(CscError::NotT1OnWindow { x, y }),
            None => blocked = true,
        }
    }
    if blocked {
        return Ok(None);
    }
    let n = kbar(t.space().as_ref(), x, &f)?;
    let tr = t.trace(&n);
    debug_assert_eq!(bits_to_points(&tr), vec![x]);
    Ok(Some(n))
}

/// [`isolate_on`] over the window with points of interest below `budget` and
/// tail `[budget, 2·budget)`.
pub fn singleton_isolated<S: Shared + ?Sized>(s: &S, x: Point, budget: u64) -> Result<Option<BasisIndex>> {
    let domain = budget.max(x + 1);
    isolate_on(&Truncation::window(s, domain, 2 * domain, domain), x)
}

/// `d(x)` for each listed point: the least window generator whose trace is
/// `{x}`, else the singleton-lemma index. `Err` names the first failure.
pub fn effectively_discrete_witness(t: &Truncation, points: &[Point]) -> std::result::Result<BTreeMap<Point, BasisIndex>, Point> {
    let mut d = BTreeMap::new();
    for &x in points {
        let direct = t.generators_at(x).into_iter().find(|&g| {
            let s = t.generator_set(g);
            s.count_ones(..) == 1
        });
        let idx = match direct {
            Some(g) => Some(BasisIndex::single(g)),
            None => isolate_on(t, x).ok().flatten(),
        };
        match idx {
            Some(n) => {
                d.insert(x, n);
            }
            None => return Err(x),
        }
    }
    Ok(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tag {
    Indiscrete,
    InitialSegment,
    FinalSegment,
    Discrete,
    Cofinite,
    #[serde(rename = "t1-only")]
    T1Only,
}

impl Tag {
    pub const MINIMAL: [Tag; 5] = [Tag::Indiscrete, Tag::InitialSegment, Tag::FinalSegment, Tag::Discrete, Tag::Cofinite];

    pub fn name(self) -> &'static str {
        match self {
            Tag::Indiscrete => "indiscrete",
            Tag::InitialSegment => "initial-segment",
            Tag::FinalSegment => "final-segment",
            Tag::Discrete => "discrete",
            Tag::Cofinite => "cofinite",
            Tag::T1Only => "t1-only",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recognition {
    pub consistent: Vec<Tag>,
    pub confirmed: Vec<Tag>,
    pub refuted: Vec<(Tag, String)>,
}

impl Recognition {
    pub fn is_consistent(&self, tag: Tag) -> bool {
        self.consistent.contains(&tag)
    }
    pub fn is_confirmed(&self, tag: Tag) -> bool {
        self.confirmed.contains(&tag)
    }
    pub fn is_refuted(&self, tag: Tag) -> bool {
        self.refuted.iter().any(|(t, _)| *t == tag)
    }
}

pub fn recognize_minimal(t: &Truncation) -> Recognition {
    recognize_minimal_on(t, &t.focus(), &t.tail())
}

/// Which minimal topologies the columns of `t` allow on the subspace whose
/// first points are `pts` and whose remaining points are represented by
/// `probe` (both ascending, probe above pts). Finite in the subspace means
/// missing the probe, cofinite means containing all of it.
///
/// A tag is confirmed when it is consistent and its characteristic witness is
/// present; for two or more points at most one tag is confirmed.
pub fn recognize_minimal_on(t: &Truncation, pts: &[Point], probe: &[Point]) -> Recognition {
    let k = pts.len();
    let q: Vec<Point> = pts.iter().chain(probe).copied().collect();
    let rows: Vec<(BasisIndex, Vec<bool>)> = t
        .columns()
        .iter()
        .map(|c| {
            let s = t.trace(c);
            (c.clone(), q.iter().map(|&p| s.contains(p as usize)).collect())
        })
        .collect();
    let count = |row: &[bool]| row.iter().filter(|&&b| b).count();
    let mut r = Recognition::default();
    let verdict = |tag: Tag, res: std::result::Result<bool, String>, r: &mut Recognition| match res {
        Ok(confirmed) => {
            r.consistent.push(tag);
            if confirmed {
                r.confirmed.push(tag);
            }
        }
        Err(why) => r.refuted.push((tag, why)),
    };

    let bad = rows.iter().find(|(_, row)| {
        let c = count(row);
        c != 0 && c != q.len()
    });
    verdict(
        Tag::Indiscrete,
        match bad {
            Some((c, row)) => Err(format!("column {c} meets {} of {} points", count(row), q.len())),
            None => Ok(k >= 2),
        },
        &mut r,
    );

    let lonely = (0..k).find(|&i| !rows.iter().any(|(_, row)| count(row) == 1 && row[i]));
    verdict(
        Tag::Discrete,
        match lonely {
            Some(i) => Err(format!("no column isolates point {}", pts[i])),
            None => Ok(k >= 1),
        },
        &mut r,
    );

    for tag in [Tag::InitialSegment, Tag::FinalSegment] {
        let initial = tag == Tag::InitialSegment;
        let res = match rows.iter().find(|(_, row)| !if initial { is_prefix(row) } else { is_suffix(row) }) {
            Some((c, _)) => Err(format!("trace of column {c} is not a {}", if initial { "prefix" } else { "suffix" })),
            None => {
                let sizes: Vec<usize> = rows.iter().map(|(_, row)| count(row)).collect();
                let need = |i: usize| if initial { i } else { q.len() - i };
                Ok(k >= 2 && (1..k).all(|i| sizes.contains(&need(i))))
            }
        };
        verdict(tag, res, &mut r);
    }

    let res = if probe.is_empty() {
        Err("no probe points beyond the certified ones".to_string())
    } else {
        match rows.iter().find(|(_, row)| row[..k].iter().any(|&b| b) && !row[k..].iter().all(|&b| b)) {
            Some((c, _)) => Err(format!("column {c} meets the points but misses the probe")),
            None => {
                let t1 = (0..k).all(|i| (0..k).all(|j| i == j || rows.iter().any(|(_, row)| row[i] && !row[j])));
                Ok(k >= 2 && t1)
            }
        }
    };
    verdict(Tag::Cofinite, res, &mut r);
    r
}

fn is_prefix(row: &[bool]) -> bool {
    row.windows(2).all(|w| w[0] || !w[1])
}

fn is_suffix(row: &[bool]) -> bool {
    row.windows(2).all(|w| !w[0] || w[1])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Initial,
    Final,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakSegmentVerdict {
    pub side: Side,
    /// Clauses (a) to (d), `None` when the clause holds on the window.
    pub clauses: [Option<String>; 4],
}

impl WeakSegmentVerdict {
    pub fn holds(&self) -> bool {
        self.clauses.iter().all(Option::is_none)
    }

    pub fn first_failure(&self) -> Option<(char, &str)> {
        self.clauses.iter().zip(['a', 'b', 'c', 'd']).find_map(|(c, l)| c.as_deref().map(|m| (l, m)))
    }
}

/// The four clauses of the weak initial (final) segment topology on the
/// columns of `t`. Finite means missing the tail, cofinite means containing
/// it; sizes are counted on the window and clause (c) is checked for every
/// size up to the number of points of interest.
pub fn check_weak_segment(t: &Truncation, side: Side) -> WeakSegmentVerdict {
    let cols: Vec<(BasisIndex, FixedBitSet)> = t.columns().iter().map(|c| (c.clone(), t.trace(c))).collect();
    let carrier = t.carrier();
    let total = carrier.count_ones(..);
    let focus = t.focus();
    let mut clauses: [Option<String>; 4] = Default::default();

    clauses[0] = cols.iter().find_map(|(c, s)| {
        let ok = match side {
            Side::Initial => t.looks_finite(s) || s == carrier,
            Side::Final => s.count_ones(..) == 0 || t.looks_cofinite(s),
        };
        (!ok).then(|| format!("column {c} is neither {}", if side == Side::Initial { "finite nor everything" } else { "empty nor cofinite" }))
    });

    'b: for (i, (a, sa)) in cols.iter().enumerate() {
        for (b, sb) in &cols[i + 1..] {
            if !sa.is_subset(sb) && !sb.is_subset(sa) {
                clauses[1] = Some(format!("columns {a} and {b} are incomparable"));
                break 'b;
            }
        }
    }

    let sizes: Vec<usize> = cols
        .iter()
        .filter_map(|(_, s)| match side {
            Side::Initial => t.looks_finite(s).then(|| s.count_ones(..)),
            Side::Final => (s.count_ones(..) > 0 && t.looks_cofinite(s)).then(|| total - s.count_ones(..)),
        })
        .collect();
    let range = match side {
        Side::Initial => 1..=focus.len(),
        Side::Final => 0..=focus.len().saturating_sub(1),
    };
    clauses[2] = range.clone().find(|n| !sizes.contains(n)).map(|n| format!("no column of the required shape with size {n}"));

    clauses[3] = focus.iter().find_map(|&x| {
        let ok = cols.iter().any(|(_, s)| match side {
            Side::Initial => t.looks_finite(s) && s.contains(x as usize),
            Side::Final => s.count_ones(..) > 0 && !s.contains(x as usize),
        });
        (!ok).then(|| format!("point {x} has no witness column"))
    });
    WeakSegmentVerdict { side, clauses }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub domain: u64,
    pub horizon: u64,
    pub gen_bound: u64,
}

impl WindowSpec {
    pub fn new(domain: u64, horizon: u64, gen_bound: u64) -> Self {
        WindowSpec { domain, horizon: horizon.max(domain), gen_bound }
    }

    pub fn truncation<S: Shared + ?Sized>(&self, s: &S) -> Truncation {
        Truncation::window(s, self.domain, self.horizon, self.gen_bound)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witnesses {
    /// `isolating[i]` meets the points in `points[i]` alone.
    Discrete { isolating: Vec<BasisIndex> },
    /// `levels[i]` meets the points in the first (last) `i+1` of them.
    Segment { levels: Vec<BasisIndex> },
    /// Each basic set contains every point from its bound on.
    Cofinite { exceptions: Vec<(BasisIndex, Point)> },
    Indiscrete,
    T1Only { pairs: Vec<PairWitness> },
}

impl Witnesses {
    pub fn indices(&self) -> Vec<BasisIndex> {
        match self {
            Witnesses::Discrete { isolating } => isolating.clone(),
            Witnesses::Segment { levels } => levels.clone(),
            Witnesses::Cofinite { exceptions } => exceptions.iter().map(|(n, _)| n.clone()).collect(),
            Witnesses::Indiscrete => Vec::new(),
            Witnesses::T1Only { pairs } => pairs.iter().flat_map(|w| w.u.iter().chain(w.v.iter()).cloned()).collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    pub confirmed: Vec<Tag>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceCertificate {
    pub points: Vec<Point>,
    /// Further points of the same subspace, standing in for the rest of it.
    #[serde(default)]
    pub probe: Vec<Point>,
    pub tag: Tag,
    pub witnesses: Witnesses,
    pub provenance: String,
    pub window: WindowSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<VerificationReport>,
}

impl SubspaceCertificate {
    pub fn new(points: Vec<Point>, tag: Tag, witnesses: Witnesses, provenance: &str, window: WindowSpec) -> Self {
        SubspaceCertificate {
            points,
            probe: Vec::new(),
            tag,
            witnesses,
            provenance: provenance.to_string(),
            window,
            report: None,
        }
    }

    pub fn with_probe(mut self, probe: Vec<Point>) -> Self {
        self.probe = probe;
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Certified points followed by the probe.
    pub fn all_points(&self) -> Vec<Point> {
        self.points.iter().chain(&self.probe).copied().collect()
    }

    /// The certificate's own truncation: its window, with the witness indices
    /// added as columns.
    pub fn truncation<S: Shared + ?Sized>(&self, s: &S) -> Truncation {
        self.window.truncation(s).with_columns(self.witnesses.indices())
    }

    /// Verify against the certificate's own truncation and attach the report.
    pub fn verified<S: Shared + ?Sized>(mut self, s: &S) -> Self {
        let t = self.truncation(s);
        self.report = Some(verify_certificate(&t, &self));
        self
    }

    pub fn passed(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// Check every witness of `c` against `t`. Traces are read on the certified
/// points followed by the probe.
pub fn verify_certificate(t: &Truncation, c: &SubspaceCertificate) -> VerificationReport {
    let mut rep = VerificationReport::default();
    let fail = |rep: &mut VerificationReport, ok: bool, msg: String| {
        rep.checks += 1;
        if !ok {
            rep.failures.push(msg);
        }
    };
    let pts = &c.points;
    let k = pts.len();
    let q = c.all_points();
    fail(&mut rep, k > 0, "no points".into());
    fail(&mut rep, q.windows(2).all(|w| w[0] < w[1]), "points and probe are not strictly increasing".into());
    for &p in &q {
        fail(&mut rep, t.in_carrier(p), format!("point {p} is outside the window"));
    }
    let on_q = |n: &BasisIndex| -> Vec<bool> {
        let tr = t.trace(n);
        q.iter().map(|&p| tr.contains(p as usize)).collect()
    };

    match (&c.tag, &c.witnesses) {
        (Tag::Discrete, Witnesses::Discrete { isolating }) => {
            fail(&mut rep, isolating.len() == k, format!("{} witnesses for {k} points", isolating.len()));
            for (i, (&p, n)) in pts.iter().zip(isolating).enumerate() {
                let ok = on_q(n).iter().enumerate().all(|(j, &b)| b == (i == j));
                fail(&mut rep, ok, format!("witness {n} does not isolate point {p}"));
            }
        }
        (Tag::InitialSegment | Tag::FinalSegment, Witnesses::Segment { levels }) => {
            let initial = c.tag == Tag::InitialSegment;
            fail(&mut rep, levels.len() == k, format!("{} levels for {k} points", levels.len()));
            for (i, n) in levels.iter().enumerate() {
                let ok = on_q(n).iter().enumerate().all(|(j, &b)| b == if initial { j <= i } else { j >= i });
                fail(&mut rep, ok, format!("level {i} ({n}) breaks the staircase"));
            }
            for col in t.columns() {
                let row = on_q(col);
                let ok = if initial { is_prefix(&row) } else { is_suffix(&row) };
                fail(&mut rep, ok, format!("column {col} breaks the nesting"));
            }
        }
        (Tag::Cofinite, Witnesses::Cofinite { exceptions }) => {
            let last = pts.last().copied().unwrap_or(0);
            for (n, b) in exceptions {
                let ok = *b <= last && q.iter().zip(on_q(n)).all(|(&p, inside)| p < *b || inside);
                fail(&mut rep, ok, format!("basic {n} misses a point beyond its bound {b}"));
            }
            fail(&mut rep, !exceptions.is_empty() || k <= 1, "no exception bounds recorded".into());
        }
        (Tag::Indiscrete, Witnesses::Indiscrete) => {
            for col in t.columns() {
                let n = on_q(col).iter().filter(|&&b| b).count();
                fail(&mut rep, n == 0 || n == q.len(), format!("column {col} splits the points"));
            }
        }
        (Tag::T1Only, Witnesses::T1Only { pairs }) => {
            for (i, &x) in pts.iter().enumerate() {
                for &y in &pts[i + 1..] {
                    let w = pairs.iter().find(|w| w.x == x && w.y == y);
                    let ok = w.is_some_and(|w| match (&w.u, &w.v) {
                        (Some(u), Some(v)) => t.basis(u, x) && !t.basis(u, y) && t.basis(v, y) && !t.basis(v, x),
                        _ => false,
                    });
                    fail(&mut rep, ok, format!("no T1 witness for {x}, {y}"));
                }
            }
        }
        (tag, _) => fail(&mut rep, false, format!("witnesses do not match tag {tag}")),
    }
    rep.confirmed = recognize_minimal_on(t, pts, &c.probe).confirmed;
    if Tag::MINIMAL.contains(&c.tag) {
        let ok = rep.confirmed.contains(&c.tag);
        fail(&mut rep, ok, format!("tag {} is not confirmed on the window", c.tag));
    }
    rep.passed = rep.failures.is_empty();
    rep
}

/// Points `x_0, …, x_{count-1}` and basic sets with `x_i ∈ U_j` iff `i ≤ j`
/// (`i ≥ j` on the final side), read off a chain of columns. When the chain
/// does not list its points in increasing order, the longest increasing
/// subsequence is kept, which is again a staircase.
pub fn weak_to_segment_subspace<S: Shared + ?Sized>(s: &S, side: Side, count: usize, budget: u64) -> Result<SubspaceCertificate> {
    let gen_bound = match side {
        Side::Initial => budget,
        Side::Final => budget + 1,
    };
    let spec = WindowSpec::new(budget, 2 * budget, gen_bound);
    let t = spec.truncation(s);
    let v = check_weak_segment(&t, side);
    if let Some((clause, msg)) = v.clauses[..2].iter().zip(['a', 'b']).find_map(|(c, l)| c.as_deref().map(|m| (l, m))) {
        return Err(CscError::Precondition(format!("clause ({clause}): {msg}")));
    }
    let mut cols: Vec<(BasisIndex, FixedBitSet)> = t
        .columns()
        .iter()
        .map(|c| (c.clone(), t.trace(c)))
        .filter(|(_, s)| match side {
            Side::Initial => s.count_ones(..) > 0 && t.looks_finite(s),
            Side::Final => s.count_ones(..) > 0,
        })
        .collect();
    cols.sort_by(|a, b| a.1.count_ones(..).cmp(&b.1.count_ones(..)).then(a.0.cmp(&b.0)));
    cols.dedup_by(|b, a| a.1 == b.1);
    if side == Side::Final {
        cols.reverse();
    }

    // Along the chain, each step adds (removes) some points; the least one is
    // the next x.
    let mut xs = Vec::new();
    let mut levels = Vec::new();
    let mut prev: Option<&FixedBitSet> = None;
    for (i, (n, set)) in cols.iter().enumerate() {
        let x = match side {
            Side::Initial => set.ones().find(|&p| prev.is_none_or(|q| !q.contains(p))),
            Side::Final => match cols.get(i + 1) {
                Some((_, next)) => set.ones().find(|&p| !next.contains(p)),
                None => None,
            },
        };
        let Some(x) = x else { break };
        xs.push(x as Point);
        levels.push(n.clone());
        prev = Some(set);
    }

    let keep = longest_increasing(&xs);
    if keep.len() < count {
        return Err(CscError::BudgetExhausted(format!(
            "found a staircase of {} increasing points, wanted {count}",
            keep.len()
        )));
    }
    let points: Vec<Point> = keep[..count].iter().map(|&i| xs[i]).collect();
    let probe: Vec<Point> = keep[count..].iter().map(|&i| xs[i]).collect();
    let levels: Vec<BasisIndex> = keep[..count].iter().map(|&i| levels[i].clone()).collect();
    let tag = match side {
        Side::Initial => Tag::InitialSegment,
        Side::Final => Tag::FinalSegment,
    };
    Ok(SubspaceCertificate::new(points, tag, Witnesses::Segment { levels }, "weak-segment", spec).with_probe(probe).verified(s))
}

/// Positions of a longest strictly increasing subsequence (leftmost choice).
pub fn longest_increasing(xs: &[Point]) -> Vec<usize> {
    let n = xs.len();
    let mut len = vec![1usize; n];
    let mut next = vec![usize::MAX; n];
    for i in (0..n).rev() {
        for j in i + 1..n {
            if xs[j] > xs[i] && len[j] + 1 > len[i] {
                len[i] = len[j] + 1;
                next[i] = j;
            }
        }
    }
    let Some(start) = (0..n).max_by(|&a, &b| len[a].cmp(&len[b]).then(b.cmp(&a))) else {
        return Vec::new();
    };
    let mut out = vec![start];
    while next[*out.last().unwrap()] != usize::MAX {
        out.push(next[*out.last().unwrap()]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::*;
    use crate::space::make_generated_space;
    use crate::truncation::materialize;

    #[test]
    fn separation_examples() {
        let t = materialize(&make_generated_space(Singletons), 16, 256);
        let v = check_separation(&t, SepAxiom::T2);
        assert!(v.holds());
        let w = &v.witnesses[0];
        assert_eq!((w.u.clone().unwrap(), w.v.clone().unwrap()), (BasisIndex::single(0), BasisIndex::single(1)));

        let t = materialize(&make_generated_space(Indiscrete), 4, 4);
        assert_eq!(check_separation(&t, SepAxiom::T0).counterexample, Some((0, 1)));

        let t = materialize(&make_generated_space(CofiniteSingles), 16, 256);
        assert!(check_separation(&t, SepAxiom::T1).holds());
        assert_eq!(check_separation(&t, SepAxiom::T2).status, SepStatus::Refuted);
    }

    #[test]
    fn isolation() {
        let s = make_generated_space(Singletons);
        assert_eq!(singleton_isolated(&s, 5, 16).unwrap(), Some(BasisIndex::single(5)));
        let c = make_generated_space(CofiniteSingles);
        for b in [4, 16, 64] {
            assert_eq!(singleton_isolated(&c, 2, b).unwrap(), None);
        }
        let i = make_generated_space(Indiscrete);
        assert!(matches!(singleton_isolated(&i, 0, 8), Err(CscError::NotT1OnWindow { .. })));
    }

    #[test]
    fn recognition_examples() {
        let r = recognize_minimal(&materialize(&make_generated_space(Singletons), 8, 16));
        assert!(r.is_confirmed(Tag::Discrete));
        for tag in [Tag::Indiscrete, Tag::InitialSegment, Tag::FinalSegment] {
            assert!(r.is_refuted(tag));
        }
        let r = recognize_minimal(&materialize(&make_generated_space(InitialSegments), 16, 256));
        assert_eq!(r.confirmed, vec![Tag::InitialSegment]);
        let r = recognize_minimal(&materialize(&make_generated_space(Indiscrete), 4, 4));
        assert_eq!(r.confirmed, vec![Tag::Indiscrete]);
        assert!(r.is_refuted(Tag::Discrete));
    }

    #[test]
    fn weak_segments() {
        let t = Truncation::window(&make_generated_space(InitialSegments), 8, 16, 8);
        assert!(check_weak_segment(&t, Side::Initial).holds());
        let t = Truncation::window(&make_generated_space(FinalSegments), 8, 16, 9);
        assert!(check_weak_segment(&t, Side::Final).holds());
        let t = Truncation::window(&make_generated_space(Singletons), 8, 16, 8);
        assert_eq!(check_weak_segment(&t, Side::Initial).first_failure().unwrap().0, 'b');
    }

    #[test]
    fn staircases() {
        let c = weak_to_segment_subspace(&make_generated_space(InitialSegments), Side::Initial, 5, 16).unwrap();
        assert_eq!(c.points, vec![0, 1, 2, 3, 4]);
        assert_eq!(c.witnesses, Witnesses::Segment { levels: (0..5).map(BasisIndex::single).collect() });
        assert!(c.passed());
        assert_eq!(c.report.as_ref().unwrap().confirmed, vec![Tag::InitialSegment]);
        let c = weak_to_segment_subspace(&make_generated_space(FinalSegments), Side::Final, 5, 16).unwrap();
        assert_eq!(c.points, vec![0, 1, 2, 3, 4]);
        assert!(c.passed());
        assert_eq!(c.report.as_ref().unwrap().confirmed, vec![Tag::FinalSegment]);
        let c = weak_to_segment_subspace(&make_generated_space(InitialSegments), Side::Initial, 1, 16).unwrap();
        assert_eq!(c.points, vec![0]);
    }

    #[test]
    fn forged_discrete_witness_fails() {
        let s = make_generated_space(Singletons);
        let spec = WindowSpec::new(8, 16, 8);
        let good = SubspaceCertificate::new(
            vec![1, 3, 5],
            Tag::Discrete,
            Witnesses::Discrete { isolating: [1, 3, 5].map(BasisIndex::single).to_vec() },
            "test",
            spec,
        );
        assert!(good.clone().verified(&s).passed());
        let mut bad = good;
        bad.witnesses = Witnesses::Discrete { isolating: [1, 4, 5].map(BasisIndex::single).to_vec() };
        let bad = bad.verified(&s);
        assert!(!bad.passed());
        assert!(bad.report.unwrap().failures[0].contains("point 3"));
    }

    #[test]
    fn effectively_discrete() {
        let t = Truncation::window(&make_generated_space(Singletons), 8, 16, 8);
        let d = effectively_discrete_witness(&t, &[0, 3]).unwrap();
        assert_eq!(d[&3], BasisIndex::single(3));
        let t = Truncation::window(&make_generated_space(Indiscrete), 8, 16, 8);
        assert_eq!(effectively_discrete_witness(&t, &[2, 3]), Err(2));
    }

    #[test]
    fn lis() {
        assert_eq!(longest_increasing(&[3, 1, 2, 5, 4]), vec![1, 2, 3]);
        assert!(longest_increasing(&[]).is_empty());
    }
}
