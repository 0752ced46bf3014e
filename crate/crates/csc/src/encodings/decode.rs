use serde::{Deserialize, Serialize};

use crate::classify::{SubspaceCertificate, Tag, Witnesses};
use crate::coding::unpair;
use crate::error::{CscError, Result};
use crate::gs::ClosureRelation;
use crate::space::Point;
use crate::truncation::Truncation;

use super::build::encode_injection_closure;
use super::instance::{InjectionSpec, OrderSpec, Theta};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Ascending,
    Descending,
}

/// `x ∈ ran(f)` as read from the closure relation; `settled` is false when
/// a negative answer could still change beyond the budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeDecision {
    pub x: u64,
    pub in_range: bool,
    pub settled: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "answer", rename_all = "snake_case")]
pub enum Answer {
    Chain { points: Vec<Point>, direction: Direction },
    Antichain { points: Vec<Point> },
    /// Listed in the instance order.
    Sequence { points: Vec<Point>, direction: Direction },
    /// All points satisfy `φ` (or all fail it).
    Side { points: Vec<Point>, phi: bool },
    Range { decisions: Vec<RangeDecision> },
    RangeBelow { w: u64, range: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodedSolution {
    pub instance: String,
    #[serde(flatten)]
    pub answer: Answer,
    pub validated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<Tag>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub provenance: String,
}

impl DecodedSolution {
    fn from_cert(instance: &str, answer: Answer, cert: &SubspaceCertificate) -> Self {
        DecodedSolution { instance: instance.into(), answer, validated: true, tag: Some(cert.tag), provenance: cert.provenance.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }
}

fn sorted(points: &[Point]) -> Vec<Point> {
    let mut v = points.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Initial segment: a descending sequence; final segment: ascending; discrete
/// or cofinite: an antichain. Checked pair by pair against the order.
pub fn decode_poset_solution(order: &OrderSpec, cert: &SubspaceCertificate) -> Result<DecodedSolution> {
    let pts = sorted(&cert.points);
    let answer = match cert.tag {
        Tag::InitialSegment | Tag::FinalSegment => {
            let dir = if cert.tag == Tag::FinalSegment { Direction::Ascending } else { Direction::Descending };
            for (i, &p) in pts.iter().enumerate() {
                for &q in &pts[i + 1..] {
                    let ok = match dir {
                        Direction::Ascending => order.lt(p, q),
                        Direction::Descending => order.lt(q, p),
                    };
                    if !ok {
                        return Err(CscError::ValidationFailed(format!("{p}, {q} break the {dir:?} chain")));
                    }
                }
            }
            Answer::Chain { points: pts, direction: dir }
        }
        Tag::Discrete | Tag::Cofinite => {
            for (i, &p) in pts.iter().enumerate() {
                if let Some(&q) = pts[i + 1..].iter().find(|&&q| order.comparable(p, q)) {
                    return Err(CscError::ValidationFailed(format!("{p}, {q} are comparable")));
                }
            }
            Answer::Antichain { points: pts }
        }
        t => return Err(CscError::ValidationFailed(format!("a {t} certificate has no reading in a partial order"))),
    };
    Ok(DecodedSolution::from_cert("poset", answer, cert))
}

/// Discrete: ascending under the order, each point having at most as many
/// strict predecessors among the certificate's points as its witness has
/// generators. Cofinite: descending, the probe lying below every point.
pub fn decode_linear_solution(order: &OrderSpec, cert: &SubspaceCertificate) -> Result<DecodedSolution> {
    let mut pts = sorted(&cert.points);
    let all = cert.all_points();
    let answer = match (cert.tag, &cert.witnesses) {
        (Tag::Discrete, Witnesses::Discrete { isolating }) => {
            for (x, f) in cert.points.iter().zip(isolating) {
                let below = all.iter().filter(|&&w| order.lt(w, *x)).count();
                if below > f.gens().len() {
                    return Err(CscError::ValidationFailed(format!(
                        "{x} has {below} predecessors but its witness {f} has {} generators",
                        f.gens().len()
                    )));
                }
            }
            pts.sort_by(|&a, &b| if order.leq(a, b) { std::cmp::Ordering::Less } else { std::cmp::Ordering::Greater });
            Answer::Sequence { points: pts, direction: Direction::Ascending }
        }
        (Tag::Cofinite, _) => {
            if cert.probe.is_empty() {
                return Err(CscError::ValidationFailed("a cofinite certificate without probe points".into()));
            }
            for &z in &cert.probe {
                if let Some(&x) = pts.iter().find(|&&x| !order.lt(z, x)) {
                    return Err(CscError::ValidationFailed(format!("probe point {z} is not below {x}")));
                }
            }
            pts.sort_by(|&a, &b| if order.leq(b, a) { std::cmp::Ordering::Less } else { std::cmp::Ordering::Greater });
            Answer::Sequence { points: pts, direction: Direction::Descending }
        }
        (t, _) => return Err(CscError::ValidationFailed(format!("a {t} certificate has no reading in a linear order"))),
    };
    if let Answer::Sequence { points, direction } = &answer {
        for w in points.windows(2) {
            let ok = match direction {
                Direction::Ascending => order.lt(w[0], w[1]),
                Direction::Descending => order.lt(w[1], w[0]),
            };
            if !ok {
                return Err(CscError::ValidationFailed(format!("{}, {} are out of order", w[0], w[1])));
            }
        }
    }
    Ok(DecodedSolution::from_cert("linear_order", answer, cert))
}

/// Every certified point satisfies `φ` (discrete) or none does (cofinite).
pub fn decode_sigma2_solution(theta: &Theta, cert: &SubspaceCertificate, limit: u64) -> Result<DecodedSolution> {
    let phi = match cert.tag {
        Tag::Discrete => true,
        Tag::Cofinite => false,
        t => return Err(CscError::ValidationFailed(format!("a {t} certificate decides no side"))),
    };
    if let Some(&x) = cert.points.iter().find(|&&x| theta.phi(x, limit) != phi) {
        return Err(CscError::ValidationFailed(format!("φ({x}) is {} on a {} certificate", !phi, cert.tag)));
    }
    Ok(DecodedSolution::from_cert("sigma2", Answer::Side { points: sorted(&cert.points), phi }, cert))
}

/// `x ∈ ran(f)` iff `2x ∉ cl(2x+1)` on the window of the closure encoding,
/// for `x < bound`. A negative answer is settled when `f` is increasing and
/// already past `x` at the budget.
pub fn range_via_closure(f: &InjectionSpec, budget: u64, bound: u64) -> Result<DecodedSolution> {
    let s = encode_injection_closure(f, budget);
    let t = Truncation::window(&s, 2 * bound, 2 * bound, 2 * bound);
    let pts: Vec<Point> = (0..2 * bound).collect();
    let cl = ClosureRelation::from_truncation(&t, &pts);
    let last = budget.checked_sub(1).and_then(|b| f.value(b.min(f.len().map_or(b, |n| n.saturating_sub(1)))));
    let mut decisions = Vec::with_capacity(bound as usize);
    for x in 0..bound {
        let in_range = !cl.in_closure(2 * x, 2 * x + 1);
        let settled = in_range || (f.is_increasing() && last.is_some_and(|v| v > x));
        let truth = f.preimage_upto(x, budget.saturating_sub(1)).is_some();
        if in_range != truth {
            return Err(CscError::ValidationFailed(format!("closure says {x} is {}in range", if in_range { "" } else { "not " })));
        }
        decisions.push(RangeDecision { x, in_range, settled });
    }
    Ok(DecodedSolution {
        instance: "injection".into(),
        answer: Answer::Range { decisions },
        validated: true,
        tag: None,
        provenance: format!("closure, budget {budget}"),
    })
}

fn check_range(f: &InjectionSpec, w: u64, range: Vec<u64>, cert: &SubspaceCertificate) -> Result<DecodedSolution> {
    let truth = f.range_below(w);
    if range != truth {
        return Err(CscError::ValidationFailed(format!("decoded ran(f) below {w} as {range:?}, but it is {truth:?}")));
    }
    Ok(DecodedSolution::from_cert("injection", Answer::RangeBelow { w, range }, cert))
}

/// From a discrete certificate: the least certified `x > w` and the largest
/// `s` with `⟨x, s⟩` in its witness give `ran(f)↾w = ran(f↾s+1)↾w`.
pub fn decode_injection_discrete(f: &InjectionSpec, cert: &SubspaceCertificate, w: u64) -> Result<DecodedSolution> {
    let Witnesses::Discrete { isolating } = &cert.witnesses else {
        return Err(CscError::ValidationFailed(format!("expected a discrete certificate, got {}", cert.tag)));
    };
    let Some((x, idx)) = cert.points.iter().zip(isolating).filter(|(&x, _)| x > w).min_by_key(|(&x, _)| x) else {
        return Err(CscError::DecoderWindowInsufficient(format!("no certified point above {w}")));
    };
    let Some(s) = idx.gens().iter().map(|&g| unpair(g)).filter(|&(z, _)| z == *x).map(|(_, s)| s).max() else {
        return Err(CscError::DecoderWindowInsufficient(format!("witness {idx} of {x} has no generator ⟨{x}, s⟩")));
    };
    check_range(f, w, f.range_upto(w, s), cert)
}

/// From an initial-segment certificate: certified or probe points
/// `z > x > w` give `ran(f)↾w = ran(f↾z+1)↾w`.
pub fn decode_injection_wgs(f: &InjectionSpec, cert: &SubspaceCertificate, w: u64) -> Result<DecodedSolution> {
    if cert.tag != Tag::InitialSegment {
        return Err(CscError::ValidationFailed(format!("expected an initial-segment certificate, got {}", cert.tag)));
    }
    let ys = sorted(&cert.all_points());
    let mut above = ys.into_iter().filter(|&y| y > w);
    let (Some(_x), Some(z)) = (above.next(), above.next()) else {
        return Err(CscError::DecoderWindowInsufficient(format!("fewer than two certificate points above {w}")));
    };
    check_range(f, w, f.range_upto(w, z), cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::WindowSpec;
    use crate::encodings::{encode_injection_discrete, encode_injection_wgs, encode_linear, encode_poset, encode_sigma2};
    use crate::gs::{gs_pipeline, gst1_extract, ExtractParams};

    #[test]
    fn poset_round_trips() {
        let s = encode_poset(&OrderSpec::Omega).unwrap();
        let c = gs_pipeline(&s, &ExtractParams::new(32, 32, 10)).unwrap();
        assert_eq!(c.tag, Tag::FinalSegment);
        let d = decode_poset_solution(&OrderSpec::Omega, &c).unwrap();
        assert!(matches!(d.answer, Answer::Chain { direction: Direction::Ascending, .. }));

        let s = encode_poset(&OrderSpec::Antichain).unwrap();
        let c = gs_pipeline(&s, &ExtractParams::new(32, 32, 10)).unwrap();
        assert_eq!(c.tag, Tag::Discrete);
        assert!(matches!(decode_poset_solution(&OrderSpec::Antichain, &c).unwrap().answer, Answer::Antichain { .. }));

        let mut forged = c.clone();
        forged.tag = Tag::FinalSegment;
        assert!(matches!(decode_poset_solution(&OrderSpec::Antichain, &forged), Err(CscError::ValidationFailed(m)) if m.contains("0, 1")));
    }

    #[test]
    fn finite_poset_round_trip() {
        // 0 < 2 < 4 < 5 < 6, with 1 and 3 off to the side
        let chain = [0u64, 2, 4, 5, 6];
        let o = OrderSpec::from_fn(7, |i, j| {
            i == j || (chain.contains(&(i as u64)) && chain.contains(&(j as u64)) && i < j)
        });
        let s = encode_poset(&o).unwrap();
        let c = gs_pipeline(&s, &ExtractParams::new(7, 7, 5)).unwrap();
        assert!(c.passed(), "{:?}", c.report);
        let d = decode_poset_solution(&o, &c).unwrap();
        assert_eq!(d.answer, Answer::Chain { points: chain.to_vec(), direction: Direction::Ascending });
    }

    #[test]
    fn linear_round_trips() {
        let s = encode_linear(&OrderSpec::Omega).unwrap();
        let c = gst1_extract(&s, &ExtractParams::new(24, 24, 8), None).unwrap();
        assert_eq!(c.tag, Tag::Discrete);
        assert!(c.passed());
        let d = decode_linear_solution(&OrderSpec::Omega, &c).unwrap();
        assert!(matches!(d.answer, Answer::Sequence { direction: Direction::Ascending, .. }));

        let s = encode_linear(&OrderSpec::ReverseOmega).unwrap();
        let c = gst1_extract(&s, &ExtractParams::new(24, 24, 8), None).unwrap();
        assert_eq!(c.tag, Tag::Cofinite);
        assert!(c.passed(), "{:?}", c.report);
        let d = decode_linear_solution(&OrderSpec::ReverseOmega, &c).unwrap();
        let Answer::Sequence { points, direction: Direction::Descending } = d.answer else { panic!("{d:?}") };
        assert_eq!(points.len(), 8);
    }

    #[test]
    fn sigma2_sides() {
        let th = Theta::XEven;
        let c = gst1_extract(&encode_sigma2(&th), &ExtractParams::new(24, 24, 8), None).unwrap();
        assert!(c.passed(), "{:?}", c.report);
        let d = decode_sigma2_solution(&th, &c, 0).unwrap();
        assert!(matches!(d.answer, Answer::Side { phi: true, .. }), "{d:?}");
    }

    #[test]
    fn closure_ranges() {
        let d = range_via_closure(&InjectionSpec::Identity, 16, 10).unwrap();
        let Answer::Range { decisions } = d.answer else { panic!() };
        assert!(decisions.iter().all(|r| r.in_range && r.settled));

        let d = range_via_closure(&InjectionSpec::Double, 16, 10).unwrap();
        let Answer::Range { decisions } = d.answer else { panic!() };
        assert!(decisions.iter().all(|r| r.in_range == (r.x % 2 == 0) && r.settled));

        let d = range_via_closure(&InjectionSpec::Table { values: vec![] }, 16, 10).unwrap();
        let Answer::Range { decisions } = d.answer else { panic!() };
        assert!(decisions.iter().all(|r| !r.in_range && !r.settled));
    }

    #[test]
    fn discrete_range() {
        for f in [InjectionSpec::Identity, InjectionSpec::Shift { by: 5 }] {
            let s = encode_injection_discrete(&f);
            let c = gst1_extract(&s, &ExtractParams::new(24, 24, 8), None).unwrap();
            assert_eq!(c.tag, Tag::Discrete, "{f:?}");
            let d = decode_injection_discrete(&f, &c, 4).unwrap();
            assert_eq!(d.answer, Answer::RangeBelow { w: 4, range: f.range_below(4) });
        }
    }

    #[test]
    fn wgs_range() {
        let f = InjectionSpec::Shift { by: 5 };
        let s = encode_injection_wgs(&f, 32);
        let c = gs_pipeline(&s, &ExtractParams::new(24, 24, 8)).unwrap();
        assert_eq!(c.tag, Tag::InitialSegment);
        let d = decode_injection_wgs(&f, &c, 6).unwrap();
        assert_eq!(d.answer, Answer::RangeBelow { w: 6, range: vec![5] });
        assert!(matches!(decode_injection_wgs(&f, &c, 1000), Err(CscError::DecoderWindowInsufficient(_))));

        let fake = SubspaceCertificate::new(vec![1, 2], Tag::Discrete, Witnesses::Discrete { isolating: vec![] }, "t", WindowSpec::new(4, 4, 4));
        assert!(decode_injection_wgs(&f, &fake, 0).is_err());
    }
}
