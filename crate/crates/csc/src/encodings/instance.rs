use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{CscError, Result};
use crate::space::Point;

/// A partial or linear order on `ℕ` or on `[0, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum OrderSpec {
    /// The usual order on `ℕ`.
    Omega,
    /// `x ≤ y` iff `y ≤ x` numerically.
    ReverseOmega,
    /// Only `x ≤ x`.
    Antichain,
    /// `leq[x][y]` on `[0, n)`.
    Table { leq: Vec<Vec<u8>> },
    /// `x ≤ y` iff `ranks[x] ≤ ranks[y]`, on `[0, ranks.len())`.
    Ranks { ranks: Vec<u64> },
}

impl OrderSpec {
    pub fn size(&self) -> Option<u64> {
        match self {
            OrderSpec::Table { leq } => Some(leq.len() as u64),
            OrderSpec::Ranks { ranks } => Some(ranks.len() as u64),
            _ => None,
        }
    }

    pub fn contains(&self, x: Point) -> bool {
        self.size().is_none_or(|n| x < n)
    }

    pub fn leq(&self, x: Point, y: Point) -> bool {
        if !self.contains(x) || !self.contains(y) {
            return false;
        }
        match self {
            OrderSpec::Omega => x <= y,
            OrderSpec::ReverseOmega => x >= y,
            OrderSpec::Antichain => x == y,
            OrderSpec::Table { leq } => leq[x as usize][y as usize] != 0,
            OrderSpec::Ranks { ranks } => ranks[x as usize] <= ranks[y as usize],
        }
    }

    pub fn lt(&self, x: Point, y: Point) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn comparable(&self, x: Point, y: Point) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    /// The order from a relation table, e.g. for random instances.
    pub fn from_fn<F: Fn(usize, usize) -> bool>(n: usize, f: F) -> Self {
        OrderSpec::Table { leq: (0..n).map(|i| (0..n).map(|j| u8::from(f(i, j))).collect()).collect() }
    }

    /// Checks reflexivity, antisymmetry and transitivity on the table (and
    /// totality when `linear`). Names the offending pair or triple.
    pub fn check(&self, linear: bool) -> std::result::Result<(), String> {
        match self {
            OrderSpec::Antichain if linear => return Err("an antichain is not a linear order".into()),
            OrderSpec::Table { leq } => {
                let n = leq.len();
                if let Some(i) = leq.iter().position(|r| r.len() != n) {
                    return Err(format!("row {i} has {} entries, expected {n}", leq[i].len()));
                }
            }
            OrderSpec::Ranks { ranks } => {
                let mut seen = HashMap::new();
                for (x, r) in ranks.iter().enumerate() {
                    if let Some(y) = seen.insert(r, x) {
                        return Err(format!("points {y} and {x} share rank {r}"));
                    }
                }
                return Ok(());
            }
            _ => return Ok(()),
        }
        let n = self.size().unwrap_or(0);
        for x in 0..n {
            if !self.leq(x, x) {
                return Err(format!("not reflexive at {x}"));
            }
            for y in 0..n {
                if x != y && self.leq(x, y) && self.leq(y, x) {
                    return Err(format!("not antisymmetric at ({x}, {y})"));
                }
                if linear && !self.comparable(x, y) {
                    return Err(format!("not total at ({x}, {y})"));
                }
                for z in 0..n {
                    if self.leq(x, y) && self.leq(y, z) && !self.leq(x, z) {
                        return Err(format!("not transitive at ({x}, {y}, {z})"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A one-to-one function `ℕ → ℕ`, or its restriction to `[0, values.len())`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum InjectionSpec {
    Identity,
    Double,
    Shift { by: u64 },
    Table { values: Vec<u64> },
}

impl InjectionSpec {
    pub fn value(&self, y: u64) -> Option<u64> {
        match self {
            InjectionSpec::Identity => Some(y),
            InjectionSpec::Double => Some(2 * y),
            InjectionSpec::Shift { by } => Some(y + by),
            InjectionSpec::Table { values } => values.get(y as usize).copied(),
        }
    }

    /// Number of arguments with a value, if finite.
    pub fn len(&self) -> Option<u64> {
        match self {
            InjectionSpec::Table { values } => Some(values.len() as u64),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn is_increasing(&self) -> bool {
        match self {
            InjectionSpec::Table { values } => values.windows(2).all(|w| w[0] < w[1]),
            _ => true,
        }
    }

    /// The least `y ≤ s` with `f(y) = x`.
    pub fn preimage_upto(&self, x: u64, s: u64) -> Option<u64> {
        let y = match self {
            InjectionSpec::Identity => Some(x),
            InjectionSpec::Double => x.is_multiple_of(2).then_some(x / 2),
            InjectionSpec::Shift { by } => x.checked_sub(*by),
            InjectionSpec::Table { values } => values.iter().position(|&v| v == x).map(|y| y as u64),
        };
        y.filter(|&y| y <= s)
    }

    /// The least `y > s` with `f(y) < x`.
    pub fn next_below(&self, x: u64, s: u64) -> Option<u64> {
        if self.is_increasing() {
            return self.value(s + 1).filter(|&v| v < x).map(|_| s + 1);
        }
        let InjectionSpec::Table { values } = self else { unreachable!("named rules are increasing") };
        (s + 1..values.len() as u64).find(|&y| values[y as usize] < x)
    }

    /// `{w < x : (∃y ≤ s) f(y) = w}`.
    pub fn range_upto(&self, x: u64, s: u64) -> Vec<u64> {
        (0..x).filter(|&w| self.preimage_upto(w, s).is_some()).collect()
    }

    /// `ran(f) ∩ [0, w)`, read from the whole instance.
    pub fn range_below(&self, w: u64) -> Vec<u64> {
        (0..w).filter(|&v| self.preimage_upto(v, u64::MAX).is_some()).collect()
    }

    pub fn check(&self) -> std::result::Result<(), String> {
        if let InjectionSpec::Table { values } = self {
            let mut seen = HashMap::new();
            for (y, v) in values.iter().enumerate() {
                if let Some(z) = seen.insert(v, y) {
                    return Err(format!("f({z}) = f({y}) = {v}"));
                }
            }
        }
        Ok(())
    }
}

/// The eventual colour of `c(x, ·)` and the point from which it holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limit {
    pub value: u8,
    pub bound: u64,
}

/// A colouring window. `values` colours points (`beyond` colours the rest);
/// `pairs[x][y]` colours pairs `x < y` below `pairs.len()`, and `limits`
/// declares the limit colours of a stable pair colouring.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringSpec {
    pub colors: u8,
    #[serde(default)]
    pub values: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beyond: Option<u8>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub limits: Vec<Limit>,
}

impl ColoringSpec {
    pub fn points(colors: u8, values: Vec<u8>, beyond: Option<u8>) -> Self {
        ColoringSpec { colors, values, beyond, ..Default::default() }
    }

    pub fn pair_coloring(pairs: Vec<Vec<u8>>, limits: Vec<Limit>) -> Self {
        ColoringSpec { colors: 2, pairs, limits, ..Default::default() }
    }

    pub fn color(&self, x: Point) -> u8 {
        self.values.get(x as usize).copied().or(self.beyond).unwrap_or(self.colors)
    }

    /// `c(x, y)` for `x ≠ y` inside the pair window, symmetric.
    pub fn pair(&self, x: Point, y: Point) -> u8 {
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        self.pairs[a as usize][b as usize]
    }

    pub fn check(&self) -> std::result::Result<(), String> {
        if let Some(x) = self.values.iter().position(|&c| c >= self.colors) {
            return Err(format!("colour {} of point {x} is not below {}", self.values[x], self.colors));
        }
        if self.beyond.is_some_and(|c| c >= self.colors) {
            return Err(format!("beyond colour is not below {}", self.colors));
        }
        let n = self.pairs.len();
        if let Some(i) = self.pairs.iter().position(|r| r.len() != n) {
            return Err(format!("pair row {i} has {} entries, expected {n}", self.pairs[i].len()));
        }
        for x in 0..n {
            for y in x + 1..n {
                if self.pairs[x][y] >= self.colors {
                    return Err(format!("colour of ({x}, {y}) is not below {}", self.colors));
                }
            }
        }
        if !self.limits.is_empty() && self.limits.len() != n {
            return Err(format!("{} limits for a pair window of {n}", self.limits.len()));
        }
        Ok(())
    }
}

type ThetaFn = Arc<dyn Fn(u64, u64, u64) -> bool + Send + Sync>;

/// A decidable matrix `θ(x, y, z)` standing for `φ(x) ⇔ ∃y ∀z θ(x, y, z)`.
/// A table covers `x < dims[0]`, `y < dims[1]`, `z < dims[2]`; beyond it in
/// `z` the default applies and beyond it in `x` or `y` the matrix is false.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Theta {
    Const { value: bool },
    /// `θ(x, y, z) ⇔ x` even.
    XEven,
    Table { dims: [u64; 3], rows: Vec<Vec<Vec<u8>>>, default: bool },
    #[serde(skip)]
    Fn { name: String, ys: u64, f: ThetaFn },
}

impl std::fmt::Debug for Theta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Theta::Const { value } => write!(f, "Theta::Const({value})"),
            Theta::XEven => f.write_str("Theta::XEven"),
            Theta::Table { dims, default, .. } => write!(f, "Theta::Table({dims:?}, default {default})"),
            Theta::Fn { name, .. } => write!(f, "Theta::Fn({name})"),
        }
    }
}

impl Theta {
    pub fn from_fn<F: Fn(u64, u64, u64) -> bool + Send + Sync + 'static>(name: &str, ys: u64, f: F) -> Self {
        Theta::Fn { name: name.into(), ys, f: Arc::new(f) }
    }

    pub fn eval(&self, x: u64, y: u64, z: u64) -> bool {
        match self {
            Theta::Const { value } => *value,
            Theta::XEven => x.is_multiple_of(2),
            Theta::Table { dims, rows, default } => {
                if x >= dims[0] || y >= dims[1] {
                    false
                } else if z >= dims[2] {
                    *default
                } else {
                    rows[x as usize][y as usize][z as usize] != 0
                }
            }
            Theta::Fn { f, .. } => f(x, y, z),
        }
    }

    /// Values of `y` worth trying.
    pub fn ys(&self) -> u64 {
        match self {
            Theta::Table { dims, .. } => dims[1],
            Theta::Fn { ys, .. } => *ys,
            _ => 1,
        }
    }

    /// The least `z` with `¬θ(x, y, z)`, looking at most to `limit`.
    pub fn first_false(&self, x: u64, y: u64, limit: u64) -> Option<u64> {
        match self {
            Theta::Const { value } => (!value).then_some(0),
            Theta::XEven => (x % 2 == 1).then_some(0),
            Theta::Table { dims, rows, default } => {
                if x >= dims[0] || y >= dims[1] {
                    return Some(0);
                }
                let row = &rows[x as usize][y as usize];
                row.iter().position(|&b| b == 0).map(|z| z as u64).or((!default).then_some(dims[2]))
            }
            Theta::Fn { f, .. } => (0..=limit).find(|&z| !f(x, y, z)),
        }
    }

    /// `φ(x)`, with `∀z` read up to `limit` for closure-given matrices.
    pub fn phi(&self, x: u64, limit: u64) -> bool {
        (0..self.ys()).any(|y| self.first_false(x, y, limit).is_none())
    }

    pub fn check(&self) -> std::result::Result<(), String> {
        if let Theta::Table { dims, rows, .. } = self {
            if rows.len() as u64 != dims[0] {
                return Err(format!("{} rows in x, expected {}", rows.len(), dims[0]));
            }
            for (x, r) in rows.iter().enumerate() {
                if r.len() as u64 != dims[1] {
                    return Err(format!("θ({x}, ·, ·) has {} rows, expected {}", r.len(), dims[1]));
                }
                if let Some(y) = r.iter().position(|c| c.len() as u64 != dims[2]) {
                    return Err(format!("θ({x}, {y}, ·) has {} entries, expected {}", r[y].len(), dims[2]));
                }
            }
        }
        Ok(())
    }
}

/// Instance files: `{"kind": ..., ...payload}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceSpec {
    ExplicitGenerators {
        generators: Vec<Vec<Point>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        carrier_bound: Option<u64>,
    },
    Poset {
        order: OrderSpec,
    },
    LinearOrder {
        order: OrderSpec,
    },
    Coloring(ColoringSpec),
    Sigma2 {
        theta: Theta,
    },
    Injection {
        f: InjectionSpec,
        /// Stages `s` used by the generators `V_⟨x,s⟩`.
        #[serde(default = "default_budget")]
        budget: u64,
    },
}

fn default_budget() -> u64 {
    64
}

impl InstanceSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            InstanceSpec::ExplicitGenerators { .. } => "explicit_generators",
            InstanceSpec::Poset { .. } => "poset",
            InstanceSpec::LinearOrder { .. } => "linear_order",
            InstanceSpec::Coloring(_) => "coloring",
            InstanceSpec::Sigma2 { .. } => "sigma2",
            InstanceSpec::Injection { .. } => "injection",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let r = match self {
            InstanceSpec::ExplicitGenerators { generators, carrier_bound } => match carrier_bound {
                Some(b) => generators
                    .iter()
                    .enumerate()
                    .find_map(|(g, s)| s.iter().find(|&&x| x >= *b).map(|x| format!("generator {g} holds {x}, beyond the carrier bound {b}")))
                    .map_or(Ok(()), Err),
                None => Ok(()),
            },
            InstanceSpec::Poset { order } => order.check(false),
            InstanceSpec::LinearOrder { order } => order.check(true),
            InstanceSpec::Coloring(c) => c.check(),
            InstanceSpec::Sigma2 { theta } => theta.check(),
            InstanceSpec::Injection { f, .. } => f.check(),
        };
        r.map_err(|e| CscError::Instance(format!("{}: {e}", self.kind())))
    }
}

/// Parse and validate an instance file.
pub fn parse_instance(text: &str) -> Result<InstanceSpec> {
    let spec: InstanceSpec =
        serde_json::from_str(text).map_err(|e| CscError::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    spec.validate()?;
    Ok(spec)
}
