//! Extraction of minimal subspaces: closure and specialization, the
//! Ramsey-type solvers, and the pipelines built from them.

pub mod closure;
pub mod delta2;
pub mod hausdorff;
pub mod pipeline;
pub mod solvers;
pub mod t1;

use serde::{Deserialize, Serialize};

use crate::classify::{verify_certificate, SubspaceCertificate, WindowSpec};
use crate::space::Point;
use crate::truncation::Shared;

pub use closure::{closure_relation, sim_quotient, specialization_order, ClosureRelation, Quotient, SpecializationOrder};
pub use delta2::{delta2_extract, Branch, Delta2Outcome, JumpOracle, JumpQuery};
pub use hausdorff::{eff_hausdorff_eff_discrete, find_limit_point, hausdorff_discrete, least_t2_pair, LeastPair};
pub use pipeline::gs_pipeline;
pub use solvers::*;
pub use t1::{cohesive_stabilize, gst1_extract, pure_t1_cofinite, stability_check, Cohesive, Stability};

/// Window and search budgets shared by the pipelines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractParams {
    /// Points of interest lie below `n`.
    pub n: u64,
    /// Generators relevant to points below `m` are inspected.
    pub m: u64,
    /// Requested certificate size.
    pub k: usize,
    /// The window runs to `horizon`; points in `[n, horizon)` form the tail.
    pub horizon: u64,
    /// Probe points wanted on each certificate.
    pub probe: usize,
    /// Candidate pairs examined per least-pair query.
    pub search: usize,
    /// Stage of the first least-pair query.
    pub stage: u64,
}

impl ExtractParams {
    pub fn new(n: u64, m: u64, k: usize) -> Self {
        ExtractParams { n, m, k, horizon: 4 * n, probe: 3, search: 1 << 16, stage: n }
    }

    pub fn with_horizon(mut self, horizon: u64) -> Self {
        self.horizon = horizon.max(self.n);
        self
    }

    pub fn with_stage(mut self, stage: u64) -> Self {
        self.stage = stage;
        self
    }

    pub fn window(&self) -> WindowSpec {
        WindowSpec::new(self.n, self.horizon, self.m)
    }
}

/// Extend the probe of `cert` with tail points, least first, that keep the
/// certificate verifying, until it has `want` probe points.
pub fn attach_probe<S: Shared + ?Sized>(s: &S, mut cert: SubspaceCertificate, want: usize) -> SubspaceCertificate {
    if cert.probe.len() >= want {
        return cert;
    }
    let t = cert.truncation(s);
    let last = cert.all_points().last().map_or(0, |&p| p + 1);
    let from: Point = last.max(cert.window.domain);
    for z in from..t.n() {
        if cert.probe.len() >= want {
            break;
        }
        if !t.in_carrier(z) {
            continue;
        }
        let mut trial = cert.clone();
        trial.probe.push(z);
        if verify_certificate(&t, &trial).passed {
            cert = trial;
        }
    }
    cert
}
