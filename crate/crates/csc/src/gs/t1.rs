//! T1 windows: the T2-pair colouring, pure T1 spaces, stability and
//! cohesive stabilization.

use serde::{Deserialize, Serialize};

use crate::classify::{separation_counterexample, isolate_on, SepAxiom, SubspaceCertificate, Tag, Witnesses};
use crate::error::{CscError, Result};
use crate::space::{BasisIndex, CscSpace, Point, PointSet, Space, Subspace};
use crate::truncation::{Shared, Truncation};

use super::hausdorff::{discrete_certificate, hausdorff_discrete};
use super::solvers::{max_homogeneous_of, solve_coh, solve_rt22, Coloring, SOLVER_CAP};
use super::{attach_probe, ExtractParams};

/// A cofinite subspace of a window with no T2 pair among `pool`. The `j`-th
/// point is the least pool point beyond the previous one inside every column
/// among the first `j+1` that meet the pool.
pub fn pure_t1_cofinite<S: Shared + ?Sized>(
    s: &S,
    pool: Option<&[Point]>,
    count: usize,
    params: &ExtractParams,
) -> Result<SubspaceCertificate> {
    let t = params.window().truncation(s);
    let pool: Vec<Point> = match pool {
        Some(p) => p.iter().copied().filter(|&x| t.in_carrier(x)).collect(),
        None => t.focus(),
    };
    let mins: Vec<_> = pool.iter().map(|&x| t.min_basic(x).1).collect();
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            if mins[i].is_disjoint(&mins[j]) {
                return Err(CscError::T2PairFound { x: pool[i], y: pool[j] });
            }
        }
    }
    let in_pool = t.mask(&pool);
    let meeting: Vec<BasisIndex> = t.columns().iter().filter(|c| !t.trace(c).is_disjoint(&in_pool)).cloned().collect();
    let mut acc = in_pool;
    let mut exceptions = Vec::with_capacity(count);
    let mut last: Option<Point> = None;
    for step in 0..count {
        let Some(f) = meeting.get(step) else {
            return Err(CscError::EmptyIntersectionWithinWindow { step });
        };
        acc.intersect_with(&t.trace(f));
        let next = acc.ones().map(|z| z as Point).find(|&z| last.is_none_or(|l| z > l));
        let Some(x) = next else {
            return Err(CscError::EmptyIntersectionWithinWindow { step });
        };
        exceptions.push((f.clone(), x));
        last = Some(x);
    }
    let points = exceptions.iter().map(|(_, x)| *x).collect();
    let cert = SubspaceCertificate::new(points, Tag::Cofinite, Witnesses::Cofinite { exceptions }, "pure-t1", params.window());
    Ok(attach_probe(s, cert, params.probe.max(1)).verified(s))
}

/// Colour a pair 0 when the smallest window neighbourhoods of its points are
/// disjoint on the pool and the tail, 1 otherwise; a homogeneous set decides
/// between a discrete (colour 0) and a cofinite (colour 1) subspace.
pub fn gst1_extract<S: Shared + ?Sized>(s: &S, params: &ExtractParams, pool: Option<&[Point]>) -> Result<SubspaceCertificate> {
    let t = params.window().truncation(s);
    let mut pool: Vec<Point> = match pool {
        Some(p) => p.iter().copied().filter(|&x| t.in_carrier(x)).collect(),
        None => t.focus(),
    };
    pool.truncate(SOLVER_CAP);
    if let Some((x, y)) = separation_counterexample(&t, SepAxiom::T1, &pool) {
        return Err(CscError::NotT1OnWindow { x, y });
    }
    let mut seen = t.mask(&pool);
    for z in t.tail() {
        seen.insert(z as usize);
    }
    let mins: Vec<_> = pool
        .iter()
        .map(|&x| {
            let mut m = t.min_basic(x).1;
            m.intersect_with(&seen);
            m
        })
        .collect();
    let c = Coloring::new(pool.len(), |i, j| u8::from(!mins[i].is_disjoint(&mins[j])));
    let Some(h) = solve_rt22(&c, params.k)? else {
        return Err(CscError::WindowTooSmall(format!("no homogeneous set of size {} among {} points", params.k, pool.len())));
    };
    let mut sub: Vec<Point> = max_homogeneous_of(&c, h.color)?.into_iter().map(|i| pool[i]).collect();
    if h.color == 1 {
        return pure_t1_cofinite(s, Some(&sub), params.k, params);
    }
    let isolated: Vec<Point> = sub.iter().copied().filter(|&x| !t.looks_cofinite(&t.min_basic(x).1)).collect();
    if isolated.len() >= params.k {
        sub = isolated;
    }
    match hausdorff_discrete(s, params.k, params, Some(&sub)) {
        Err(CscError::NotHausdorffOnWindow { .. }) => {
            // separated on the pool and the tail only
            let cert = discrete_certificate(s, &t, sub[..params.k].to_vec(), "gst1-relative", params);
            if cert.passed() {
                Ok(cert)
            } else {
                Err(CscError::TagViolatedOnWindow(format!("relative discrete certificate on {:?} failed", cert.points)))
            }
        }
        r => r,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Stability {
    Isolated { witness: BasisIndex },
    CofinitePattern,
    Undetermined,
}

/// Per point below `n`: isolated, or every window generator around it looks
/// cofinite, or neither.
pub fn stability_check<S: Shared + ?Sized>(s: &S, n: u64, m: u64) -> Vec<(Point, Stability)> {
    let t = Truncation::window(s, n, 2 * n, m);
    stability_on(&t)
}

pub fn stability_on(t: &Truncation) -> Vec<(Point, Stability)> {
    t.focus()
        .into_iter()
        .map(|x| {
            let v = match isolate_on(t, x) {
                Ok(Some(witness)) => Stability::Isolated { witness },
                _ if t.looks_cofinite(&t.min_basic(x).1) => Stability::CofinitePattern,
                _ => Stability::Undetermined,
            };
            (x, v)
        })
        .collect()
}

/// The stabilizing subspace: the largest cell of the Boolean algebra spanned
/// by `U_0, …, U_{m-1}` on `[0, n)`.
#[derive(Clone)]
pub struct Cohesive {
    pub points: Vec<Point>,
    pub sides: Vec<bool>,
    pub subspace: Subspace,
}

pub fn cohesive_stabilize(s: &CscSpace, n: u64, m: u64) -> Result<Cohesive> {
    let t = Truncation::window(s, n, n, 0);
    let family: Vec<BasisIndex> = (0..m).map(BasisIndex::from_u64).collect();
    let rows: Vec<Vec<bool>> = family
        .iter()
        .map(|b| {
            let tr = t.trace(b);
            (0..n as usize).map(|x| tr.contains(x) && t.carrier().contains(x)).collect()
        })
        .collect();
    let carrier: Vec<Point> = t.points();
    let sol = solve_coh(&rows, n as usize);
    let points: Vec<Point> = sol.points.into_iter().map(|x| x as Point).filter(|x| carrier.contains(x)).collect();
    let parent = s.clone();
    let sides = sol.sides.clone();
    let cell = move |x: Point| family.iter().zip(&sides).all(|(b, &inside)| parent.basis(b, x) == inside);
    let subspace = s.restrict(PointSet::predicate(cell))?;
    Ok(Cohesive { points, sides: sol.sides, subspace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{CofiniteSingles, FnFamily, Singletons};
    use crate::space::make_generated_space;

    #[test]
    fn pure_t1_diagonal() {
        let s = make_generated_space(CofiniteSingles);
        let params = ExtractParams::new(32, 32, 10);
        let c = pure_t1_cofinite(&s, None, 10, &params).unwrap();
        assert_eq!(c.points, (0..10).collect::<Vec<_>>());
        assert!(c.passed(), "{:?}", c.report);
        assert!(c.probe.iter().all(|&z| z >= 32));
        let one = pure_t1_cofinite(&s, None, 1, &params).unwrap();
        assert_eq!(one.points, vec![0]);
        assert!(matches!(
            pure_t1_cofinite(&make_generated_space(Singletons), None, 3, &params),
            Err(CscError::T2PairFound { x: 0, y: 1 })
        ));
    }

    #[test]
    fn gst1_branches() {
        let params = ExtractParams::new(32, 32, 8);
        let d = gst1_extract(&make_generated_space(Singletons), &params, None).unwrap();
        assert_eq!(d.tag, Tag::Discrete);
        assert!(d.passed());
        let c = gst1_extract(&make_generated_space(CofiniteSingles), &params, None).unwrap();
        assert_eq!(c.tag, Tag::Cofinite);
        assert!(c.passed(), "{:?}", c.report);
        // evens are isolated, odds carry cofinite-on-odds neighbourhoods
        let union = make_generated_space(FnFamily::new("disjoint-union", |g, x| {
            if g % 2 == 0 {
                x == g
            } else {
                x % 2 == 1 && x != g
            }
        }));
        let u = gst1_extract(&union, &params, None).unwrap();
        assert!(u.passed(), "{:?}", u.report);
    }

    #[test]
    fn stability_examples() {
        let v = stability_check(&make_generated_space(Singletons), 8, 8);
        assert!(v.iter().all(|(_, s)| matches!(s, Stability::Isolated { .. })));
        let v = stability_check(&make_generated_space(CofiniteSingles), 8, 8);
        assert!(v.iter().all(|(_, s)| *s == Stability::CofinitePattern));
    }

    #[test]
    fn cohesive_examples() {
        let evens = make_generated_space(FnFamily::new("evens", |_, x| x % 2 == 0));
        assert_eq!(stability_check(&evens, 8, 1)[0].1, Stability::Undetermined);
        let c = cohesive_stabilize(&evens, 16, 2).unwrap();
        assert_eq!(c.points, vec![0, 2, 4, 6, 8, 10, 12, 14]);
        let v = stability_check(&c.subspace, 16, 1);
        assert!(v.iter().all(|(_, s)| *s == Stability::CofinitePattern));
        let all = cohesive_stabilize(&make_generated_space(Singletons), 8, 0).unwrap();
        assert_eq!(all.points, (0..8).collect::<Vec<_>>());
    }
}
