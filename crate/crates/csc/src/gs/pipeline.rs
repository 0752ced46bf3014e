//! The general extraction: indiscrete classes, then monotone chains of the
//! specialization order, then antichains.

use crate::classify::{SubspaceCertificate, Tag, Witnesses};
use crate::error::{CscError, Result};
use crate::space::Point;
use crate::truncation::{Shared, Truncation};

use super::closure::{sim_quotient, specialization_order, ClosureRelation};
use super::solvers::{largest_antichain, longest_chain, FinitePoset, SOLVER_CAP};
use super::t1::gst1_extract;
use super::{attach_probe, ExtractParams};

pub fn gs_pipeline<S: Shared + ?Sized>(s: &S, params: &ExtractParams) -> Result<SubspaceCertificate> {
    let k = params.k;
    let t = params.window().truncation(s);
    let focus = t.focus();
    let cl = ClosureRelation::from_truncation(&t, &focus);
    let q = sim_quotient(&cl);

    if let Some(class) = q.classes.iter().find(|c| c.len() >= k) {
        let probe = class[k..].iter().copied().take(params.probe).collect();
        let cert = SubspaceCertificate::new(class[..k].to_vec(), Tag::Indiscrete, Witnesses::Indiscrete, "closure-class", params.window())
            .with_probe(probe);
        return Ok(attach_probe(s, cert, params.probe).verified(s));
    }

    let reps: Vec<Point> = q.representatives.iter().copied().take(SOLVER_CAP).collect();
    let order = specialization_order(&cl, &reps)?;
    // chains of the specialization order that rise (fall) with the point order
    let up = FinitePoset::from_fn(reps.len(), |i, j| i == j || (reps[i] < reps[j] && order.order.leq(i, j)))?;
    let down = FinitePoset::from_fn(reps.len(), |i, j| i == j || (reps[i] < reps[j] && order.order.leq(j, i)))?;
    let (asc, desc) = (longest_chain(&up)?, longest_chain(&down)?);
    let longest = asc.len().max(desc.len());
    if longest >= k {
        let (chain, tag) = if asc.len() >= desc.len() { (asc, Tag::FinalSegment) } else { (desc, Tag::InitialSegment) };
        let mut seq: Vec<Point> = chain.iter().map(|&i| reps[i]).collect();
        seq.sort_unstable();
        seq.truncate(k + params.probe);
        let cert = segment_certificate(&t, seq, k, tag, params);
        return Ok(attach_probe(s, cert, params.probe).verified(s));
    }

    let anti = largest_antichain(&order.order)?;
    if anti.len() >= k {
        let pool: Vec<Point> = anti.iter().map(|&i| reps[i]).collect();
        return gst1_extract(s, params, Some(&pool));
    }
    Err(CscError::WindowTooSmall(format!(
        "{} classes, longest monotone chain {}, largest antichain {}; wanted {k}",
        q.classes.len(),
        longest,
        anti.len()
    )))
}

/// Levels are the smallest window neighbourhoods of the points, reduced on the
/// certified points and the probe.
fn segment_certificate(t: &Truncation, seq: Vec<Point>, k: usize, tag: Tag, params: &ExtractParams) -> SubspaceCertificate {
    let within = t.mask(&seq);
    let levels = seq[..k]
        .iter()
        .map(|&x| {
            let (idx, _) = t.min_basic(x);
            t.reduce_index(&idx, &within, |_| true)
        })
        .collect();
    SubspaceCertificate::new(seq[..k].to_vec(), tag, Witnesses::Segment { levels }, "specialization-chain", params.window())
        .with_probe(seq[k..].to_vec())
}
