use serde::{Deserialize, Serialize};

use crate::coding::{pair, triple, unpair, untriple};
use crate::error::{CscError, Result};
use crate::families::{Explicit, FnFamily};
use crate::space::{make_generated_space, CscSpace, GenIndex};

use super::instance::{ColoringSpec, InjectionSpec, InstanceSpec, OrderSpec, Theta};

/// Pairs `⟨x, s⟩` with `x < xs` and `s < ss`, ascending.
fn pair_window(xs: u64, ss: u64) -> Vec<GenIndex> {
    let mut v: Vec<GenIndex> = (0..xs).flat_map(|x| (0..ss).map(move |s| pair(x, s))).collect();
    v.sort_unstable();
    v
}

/// `V_p = {q : p ≤_P q}`.
pub fn encode_poset(order: &OrderSpec) -> Result<CscSpace> {
    order.check(false).map_err(CscError::InvalidOrder)?;
    let o = order.clone();
    let size = order.size();
    let mut fam = FnFamily::new("poset", move |p, q| o.leq(p, q)).with_window(move |b| (0..size.map_or(b, |n| b.min(n))).collect());
    if let Some(n) = size {
        fam = fam.with_carrier_bound(n);
    }
    Ok(make_generated_space(fam))
}

/// `V_⟨x,x⟩ = {w : w ≤_L x}` and `V_⟨x,y⟩ = {w : w ≤_L x} ∖ {y}`.
pub fn encode_linear(order: &OrderSpec) -> Result<CscSpace> {
    order.check(true).map_err(CscError::InvalidOrder)?;
    let o = order.clone();
    let size = order.size();
    let mut fam = FnFamily::new("linear", move |g, w| {
        let (x, y) = unpair(g);
        o.contains(y) && o.leq(w, x) && (x == y || w != y)
    })
    .with_window(move |b| {
        let b = size.map_or(b, |n| b.min(n));
        pair_window(b, b)
    });
    if let Some(n) = size {
        fam = fam.with_carrier_bound(n);
    }
    Ok(make_generated_space(fam))
}

/// `V_⟨x,y,s⟩ = {x} ∪ {w > max(x, s) : (∃z ≤ w) ¬θ(x, y, z)}`.
pub fn encode_sigma2(theta: &Theta) -> CscSpace {
    let th = theta.clone();
    let ys = theta.ys();
    let fam = FnFamily::new("sigma2", move |g, w| {
        let (x, y, s) = untriple(g);
        w == x || (w > x.max(s) && th.first_false(x, y, w).is_some_and(|z| z <= w))
    })
    .with_window(move |b| {
        let mut v: Vec<GenIndex> = (0..b).flat_map(|x| (0..ys).flat_map(move |y| (0..b).map(move |s| triple(x, y, s)))).collect();
        v.sort_unstable();
        v
    });
    make_generated_space(fam)
}

/// `θ(x, y, z) ⇔ z < max(y, x+1) ∨ c(x, z) = 1` on the pair window, after checking the
/// declared limits; `φ(x)` then says the limit colour of `x` is 1.
pub fn stable_coloring_to_sigma2(c: &ColoringSpec) -> Result<Theta> {
    c.check().map_err(CscError::Instance)?;
    let n = c.pairs.len() as u64;
    if c.limits.len() as u64 != n {
        return Err(CscError::Instance(format!("{} limits declared for {n} points", c.limits.len())));
    }
    for x in 0..n {
        let lim = c.limits[x as usize];
        if let Some(_y) = (lim.bound.max(x + 1)..n).find(|&y| c.pair(x, y) != lim.value) {
            return Err(CscError::NotStableOnWindow { x });
        }
    }
    let rows = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    (0..n)
                        .map(|z| match z < y.max(x + 1) {
                            true => 1,
                            // the last point has no pairs above it on the window
                            false if x + 1 == n => c.limits[x as usize].value,
                            false => u8::from(c.pair(x, z) == 1),
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(Theta::Table { dims: [n, n, n], rows, default: true })
}

/// `V_⟨x,s⟩ = {2x, 2x+1}` until `f` is seen to hit `x` by stage `s`, then
/// `{2x}`.
pub fn encode_injection_closure(f: &InjectionSpec, budget: u64) -> CscSpace {
    let f = f.clone();
    let fam = FnFamily::new("injection-closure", move |g, p| {
        let (x, s) = unpair(g);
        p == 2 * x || (p == 2 * x + 1 && f.preimage_upto(x, s).is_none())
    })
    .with_window(move |b| pair_window(b / 2 + 1, budget));
    make_generated_space(fam)
}

/// `V_⟨x,s⟩ = {x} ∪ {z > s : c(z) = c(x)}`.
pub fn encode_coloring_discrete(c: &ColoringSpec) -> Result<CscSpace> {
    c.check().map_err(CscError::Instance)?;
    let c = c.clone();
    let fam = FnFamily::new("coloring-discrete", move |g, z| {
        let (x, s) = unpair(g);
        z == x || (z > s && c.color(z) == c.color(x))
    })
    .with_window(|b| pair_window(b, b));
    Ok(make_generated_space(fam))
}

/// `V_⟨x,s⟩ = {x} ∪ {z > s : ran(f↾s+1)↾x ≠ ran(f↾z+1)↾x}`.
pub fn encode_injection_discrete(f: &InjectionSpec) -> CscSpace {
    let f = f.clone();
    let fam = FnFamily::new("injection-discrete", move |g, z| {
        let (x, s) = unpair(g);
        z == x || (z > s && f.next_below(x, s).is_some_and(|y| y <= z))
    })
    .with_window(|b| pair_window(b, b));
    make_generated_space(fam)
}

/// `V_⟨x,s⟩ = {x} ∪ {w < x : ran(f↾x+1)↾w = ran(f↾x+s+1)↾w}`.
pub fn encode_injection_wgs(f: &InjectionSpec, budget: u64) -> CscSpace {
    let f = f.clone();
    let fam = FnFamily::new("injection-wgs", move |g, w| {
        let (x, s) = unpair(g);
        w == x || (w < x && f.next_below(w, x).is_none_or(|y| y > x + s))
    })
    .with_window(move |b| pair_window(b, budget));
    make_generated_space(fam)
}

/// Which construction an instance goes through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    /// The natural one for the instance kind.
    #[default]
    Default,
    /// Linear orders through the poset construction.
    Poset,
    /// Injections through the closure construction.
    Closure,
    /// Colourings and injections through the discrete construction.
    Discrete,
    /// Injections through the weak initial-segment construction.
    Wgs,
    /// Stable pair colourings through their Σ⁰₂ matrix.
    Sigma2,
}

impl std::str::FromStr for Encoding {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| format!("unknown encoding {s:?}"))
    }
}

/// Build the space of an instance.
pub fn encode(spec: &InstanceSpec, how: Encoding) -> Result<CscSpace> {
    use Encoding as E;
    use InstanceSpec as I;
    match (spec, how) {
        (I::ExplicitGenerators { generators, carrier_bound }, E::Default) => {
            Ok(make_generated_space(Explicit::new(generators.clone(), *carrier_bound)))
        }
        (I::Poset { order }, E::Default | E::Poset) => encode_poset(order),
        (I::LinearOrder { order }, E::Default) => encode_linear(order),
        (I::LinearOrder { order }, E::Poset) => encode_poset(order),
        (I::Coloring(c), E::Default | E::Discrete) if c.pairs.is_empty() => encode_coloring_discrete(c),
        (I::Coloring(c), E::Default | E::Sigma2) => Ok(encode_sigma2(&stable_coloring_to_sigma2(c)?)),
        (I::Sigma2 { theta }, E::Default) => Ok(encode_sigma2(theta)),
        (I::Injection { f, budget }, E::Default | E::Closure) => Ok(encode_injection_closure(f, *budget)),
        (I::Injection { f, .. }, E::Discrete) => Ok(encode_injection_discrete(f)),
        (I::Injection { f, budget }, E::Wgs) => Ok(encode_injection_wgs(f, *budget)),
        (spec, how) => Err(CscError::Precondition(format!("no {how:?} encoding for a {} instance", spec.kind()))),
    }
}
