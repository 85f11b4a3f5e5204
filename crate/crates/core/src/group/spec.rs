use std::collections::{BTreeMap, HashSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::GroupError;
use crate::poly::Q;

/// Integer point of the lattice in second-kind (Malcev) coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn identity(dim: usize) -> Self {
        LatticePoint(vec![0; dim])
    }

    pub fn unit(dim: usize, i: usize, value: i64) -> Self {
        let mut v = vec![0; dim];
        v[i] = value;
        LatticePoint(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        LatticePoint(v)
    }
}

/// Rational number as stored in spec documents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        let q = Q::new(num as i128, den as i128);
        Rational { num: *q.numer() as i64, den: *q.denom() as i64 }
    }

    pub fn to_q(self) -> Q {
        Q::new(self.num as i128, self.den as i128)
    }
}

/// One BCH monomial `value * X^alpha * Y^beta` contributing to coordinate
/// `coord` (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BchTerm {
    pub coord: usize,
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub value: Rational,
}

impl BchTerm {
    pub fn new(coord: usize, alpha: Vec<u32>, beta: Vec<u32>, value: Rational) -> Self {
        BchTerm { coord, alpha, beta, value }
    }
}

/// Complete description of a torsion-free nilpotent lattice.
///
/// Coordinates are second-kind: the lattice point `x` is the group element
/// `exp(x_{i_1} X_{i_1}) * ... * exp(x_{i_d} X_{i_d})` where the factors are
/// ordered by decreasing weight, and by decreasing index within a weight.
/// `bch_main` holds the homogeneous BCH terms shared by both products;
/// `bch_lower` holds the lower-weight terms present only in the original one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub name: String,
    pub dim: usize,
    pub weights: Vec<u32>,
    pub step: u32,
    pub growth_degree: u32,
    pub bch_main: Vec<BchTerm>,
    pub bch_lower: Vec<BchTerm>,
    pub generators: Vec<LatticePoint>,
}

/// A single Lie bracket `[X_i, X_j] = value * X_k` for step-2 data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bracket {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: i64,
}

/// Structure data for a step-2 nilpotent Lie algebra with a graded basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step2Data {
    pub weights: Vec<u32>,
    pub brackets: Vec<Bracket>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Builtin {
    Zd(usize),
    Heisenberg3,
    GenericStep2(Step2Data),
    /// Four-dimensional step-3 lattice with a filtered (non-graded) basis,
    /// `[X1,X2] = X3 - X4/2`, `[X1,X3] = X4`, so both BCH tables are nonempty.
    Filiform4,
}

impl Builtin {
    /// Parses the names used by the CLI: `z<d>`, `zd:<d>`, `heisenberg3`,
    /// `filiform4`.
    pub fn parse(name: &str) -> Result<Builtin, GroupError> {
        let lower = name.to_ascii_lowercase();
        match lower.as_str() {
            "heisenberg3" | "heisenberg" | "h3" => return Ok(Builtin::Heisenberg3),
            "filiform4" => return Ok(Builtin::Filiform4),
            _ => {}
        }
        let digits = lower
            .strip_prefix("zd:")
            .or_else(|| lower.strip_prefix('z'))
            .ok_or_else(|| GroupError::InvalidSpec(format!("unknown group '{name}'")))?;
        let d: usize = digits
            .parse()
            .map_err(|_| GroupError::InvalidSpec(format!("unknown group '{name}'")))?;
        Ok(Builtin::Zd(d))
    }
}

pub fn builtin_spec(which: &Builtin) -> Result<GroupSpec, GroupError> {
    let spec = match which {
        Builtin::Zd(d) => {
            if *d == 0 {
                return Err(GroupError::InvalidSpec("Z^d needs d >= 1".into()));
            }
            GroupSpec {
                name: format!("z{d}"),
                dim: *d,
                weights: vec![1; *d],
                step: 1,
                growth_degree: *d as u32,
                bch_main: vec![],
                bch_lower: vec![],
                generators: standard_generators(&vec![1; *d]),
            }
        }
        Builtin::Heisenberg3 => {
            let mut spec = step2_spec(
                "heisenberg3",
                &Step2Data {
                    weights: vec![1, 1, 2],
                    brackets: vec![Bracket { i: 0, j: 1, k: 2, value: 1 }],
                },
            )?;
            spec.name = "heisenberg3".into();
            spec
        }
        Builtin::GenericStep2(data) => step2_spec("step2", data)?,
        Builtin::Filiform4 => filiform4(),
    };
    spec.validate()?;
    Ok(spec)
}

/// `{0, +-e_i : weight(e_i) = 1}`.
fn standard_generators(weights: &[u32]) -> Vec<LatticePoint> {
    let d = weights.len();
    let mut gens = vec![LatticePoint::identity(d)];
    for (i, &w) in weights.iter().enumerate() {
        if w == 1 {
            gens.push(LatticePoint::unit(d, i, 1));
            gens.push(LatticePoint::unit(d, i, -1));
        }
    }
    gens
}

fn unit_exps(d: usize, i: usize) -> Vec<u32> {
    let mut e = vec![0; d];
    e[i] = 1;
    e
}

fn step2_spec(name: &str, data: &Step2Data) -> Result<GroupSpec, GroupError> {
    let d = data.weights.len();
    if d == 0 || data.weights.iter().any(|&w| w == 0 || w > 2) {
        return Err(GroupError::InvalidSpec("step-2 weights must be 1 or 2".into()));
    }
    // (min, max, k) -> coefficient of [X_min, X_max] along X_k
    let mut consts: BTreeMap<(usize, usize, usize), i64> = BTreeMap::new();
    for b in &data.brackets {
        if b.i >= d || b.j >= d || b.k >= d {
            return Err(GroupError::InvalidSpec(format!("bracket index out of range: {b:?}")));
        }
        if b.i == b.j {
            if b.value != 0 {
                return Err(GroupError::InvalidSpec(format!(
                    "antisymmetry violated: [X{0},X{0}] must vanish",
                    b.i
                )));
            }
            continue;
        }
        if data.weights[b.i] != 1 || data.weights[b.j] != 1 || data.weights[b.k] != 2 {
            return Err(GroupError::InvalidSpec(format!(
                "bracket {b:?} must map weight-1 pairs to weight 2"
            )));
        }
        let (key, v) = if b.i < b.j { ((b.i, b.j, b.k), b.value) } else { ((b.j, b.i, b.k), -b.value) };
        match consts.get(&key) {
            Some(&prev) if prev != v => {
                return Err(GroupError::InvalidSpec(format!(
                    "antisymmetry violated for [X{},X{}]",
                    key.0, key.1
                )))
            }
            _ => {
                consts.insert(key, v);
            }
        }
    }
    let mut bch_main = Vec::new();
    for (&(i, j, k), &v) in &consts {
        if v == 0 {
            continue;
        }
        // degree-2 BCH term 1/2 [X, Y] = 1/2 sum c (x_i y_j - x_j y_i) X_k
        bch_main.push(BchTerm::new(k, unit_exps(d, i), unit_exps(d, j), Rational::new(v, 2)));
        bch_main.push(BchTerm::new(k, unit_exps(d, j), unit_exps(d, i), Rational::new(-v, 2)));
    }
    let step = *data.weights.iter().max().unwrap();
    Ok(GroupSpec {
        name: name.into(),
        dim: d,
        weights: data.weights.clone(),
        step,
        growth_degree: data.weights.iter().sum(),
        bch_main,
        bch_lower: vec![],
        generators: standard_generators(&data.weights),
    })
}

fn filiform4() -> GroupSpec {
    let e = |v: [u32; 4]| v.to_vec();
    let r = Rational::new;
    // Z semidirect Z^3 with t acting by the unipotent Jordan block, so
    // [X1,X2] = X3 - X4/2 and [X1,X3] = X4. BCH stops at third order.
    let bch_main = vec![
        BchTerm::new(2, e([1, 0, 0, 0]), e([0, 1, 0, 0]), r(1, 2)),
        BchTerm::new(2, e([0, 1, 0, 0]), e([1, 0, 0, 0]), r(-1, 2)),
        BchTerm::new(3, e([1, 0, 0, 0]), e([0, 0, 1, 0]), r(1, 2)),
        BchTerm::new(3, e([0, 0, 1, 0]), e([1, 0, 0, 0]), r(-1, 2)),
        BchTerm::new(3, e([2, 0, 0, 0]), e([0, 1, 0, 0]), r(1, 12)),
        BchTerm::new(3, e([1, 1, 0, 0]), e([1, 0, 0, 0]), r(-1, 12)),
        BchTerm::new(3, e([1, 0, 0, 0]), e([1, 1, 0, 0]), r(-1, 12)),
        BchTerm::new(3, e([0, 1, 0, 0]), e([2, 0, 0, 0]), r(1, 12)),
    ];
    let bch_lower = vec![
        BchTerm::new(3, e([1, 0, 0, 0]), e([0, 1, 0, 0]), r(-1, 4)),
        BchTerm::new(3, e([0, 1, 0, 0]), e([1, 0, 0, 0]), r(1, 4)),
    ];
    GroupSpec {
        name: "filiform4".into(),
        dim: 4,
        weights: vec![1, 1, 2, 3],
        step: 3,
        growth_degree: 7,
        bch_main,
        bch_lower,
        generators: standard_generators(&[1, 1, 2, 3]),
    }
}

impl GroupSpec {
    pub fn from_json(s: &str) -> Result<GroupSpec, GroupError> {
        let spec: GroupSpec =
            serde_json::from_str(s).map_err(|e| GroupError::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn weighted_degree(&self, exps: &[u32]) -> u32 {
        exps.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    pub fn is_abelian(&self) -> bool {
        self.bch_main.is_empty() && self.bch_lower.is_empty()
    }

    /// `sum |C_{alpha,beta}|` over the homogeneous table.
    pub fn main_coefficient_mass(&self) -> Q {
        self.bch_main.iter().map(|t| t.value.to_q().abs()).fold(Q::zero(), |a, b| a + b)
    }

    /// Checks every structural invariant except associativity of the tables,
    /// which is exercised by the property tests.
    pub fn validate(&self) -> Result<(), GroupError> {
        let bad = |m: String| Err(GroupError::InvalidSpec(m));
        if self.dim == 0 || self.weights.len() != self.dim {
            return bad(format!("weights length {} != dim {}", self.weights.len(), self.dim));
        }
        if self.weights.iter().any(|&w| w == 0) {
            return bad("weights must be positive".into());
        }
        let max_w = *self.weights.iter().max().unwrap();
        if self.step != max_w {
            return bad(format!("step {} != max weight {}", self.step, max_w));
        }
        let degree: u32 = self.weights.iter().sum();
        if self.growth_degree != degree {
            return bad(format!(
                "growth degree {} != sum_i i*d_i = {}",
                self.growth_degree, degree
            ));
        }
        for (table, lower) in [(&self.bch_main, false), (&self.bch_lower, true)] {
            for t in table {
                if t.coord >= self.dim || t.alpha.len() != self.dim || t.beta.len() != self.dim {
                    return bad(format!("malformed BCH term {t:?}"));
                }
                if t.value.den == 0 {
                    return bad(format!("zero denominator in {t:?}"));
                }
                let a = self.weighted_degree(&t.alpha);
                let b = self.weighted_degree(&t.beta);
                let target = self.weights[t.coord];
                let ok = a >= 1 && b >= 1 && if lower { a + b < target } else { a + b == target };
                if !ok {
                    let which = if lower { "lower" } else { "main" };
                    return bad(format!(
                        "{which} term {t:?} has weighted degrees ({a}, {b}) against weight {target}"
                    ));
                }
                if t.alpha.iter().chain(&t.beta).any(|&e| e > 32) {
                    return bad(format!("exponent too large in {t:?}"));
                }
            }
        }
        let id = LatticePoint::identity(self.dim);
        if self.generators.iter().any(|g| g.dim() != self.dim) {
            return bad("generator of wrong dimension".into());
        }
        if !self.generators.contains(&id) {
            return bad("generating set must contain the identity".into());
        }
        // Symmetry is checked against the group inverse in `Group::new`;
        // here only duplicates are rejected.
        let set: HashSet<_> = self.generators.iter().collect();
        if set.len() != self.generators.len() {
            return bad("duplicate generators".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zd_has_empty_tables() {
        let s = builtin_spec(&Builtin::Zd(2)).unwrap();
        assert_eq!(s.weights, vec![1, 1]);
        assert_eq!(s.growth_degree, 2);
        assert!(s.bch_main.is_empty() && s.bch_lower.is_empty());
        assert_eq!(s.generators.len(), 5);
    }

    #[test]
    fn heisenberg_shape() {
        let s = builtin_spec(&Builtin::Heisenberg3).unwrap();
        assert_eq!(s.dim, 3);
        assert_eq!(s.weights, vec![1, 1, 2]);
        assert_eq!(s.step, 2);
        // d_1 = 2, d_2 = 1 -> 1*2 + 2*1
        assert_eq!(s.growth_degree, 4);
        let gens: HashSet<_> = s.generators.iter().cloned().collect();
        for g in [[0, 0, 0], [1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]] {
            assert!(gens.contains(&LatticePoint(g.to_vec())));
        }
    }

    #[test]
    fn step2_structure_constant_scales_table() {
        let data = Step2Data {
            weights: vec![1, 1, 2],
            brackets: vec![Bracket { i: 0, j: 1, k: 2, value: 2 }],
        };
        let s = builtin_spec(&Builtin::GenericStep2(data)).unwrap();
        let find = |a: Vec<u32>, b: Vec<u32>| {
            s.bch_main.iter().find(|t| t.coord == 2 && t.alpha == a && t.beta == b).unwrap().value
        };
        assert_eq!(find(vec![1, 0, 0], vec![0, 1, 0]), Rational::new(1, 1));
        assert_eq!(find(vec![0, 1, 0], vec![1, 0, 0]), Rational::new(-1, 1));
    }

    #[test]
    fn step2_rejects_antisymmetry_violation() {
        let data = Step2Data {
            weights: vec![1, 1, 2],
            brackets: vec![
                Bracket { i: 0, j: 1, k: 2, value: 1 },
                Bracket { i: 1, j: 0, k: 2, value: 1 },
            ],
        };
        assert!(matches!(
            builtin_spec(&Builtin::GenericStep2(data)),
            Err(GroupError::InvalidSpec(_))
        ));
        let diag = Step2Data {
            weights: vec![1, 1, 2],
            brackets: vec![Bracket { i: 0, j: 0, k: 2, value: 3 }],
        };
        assert!(builtin_spec(&Builtin::GenericStep2(diag)).is_err());
    }

    #[test]
    fn weighted_degree_bookkeeping() {
        for b in [Builtin::Heisenberg3, Builtin::Filiform4] {
            let s = builtin_spec(&b).unwrap();
            for t in &s.bch_main {
                assert_eq!(s.weighted_degree(&t.alpha) + s.weighted_degree(&t.beta), s.weights[t.coord]);
            }
            for t in &s.bch_lower {
                assert!(s.weighted_degree(&t.alpha) + s.weighted_degree(&t.beta) < s.weights[t.coord]);
            }
        }
        assert!(!builtin_spec(&Builtin::Filiform4).unwrap().bch_lower.is_empty());
    }

    #[test]
    fn validation_catches_bad_degree() {
        let mut s = builtin_spec(&Builtin::Heisenberg3).unwrap();
        s.growth_degree = 3;
        assert!(s.validate().is_err());
        let mut s = builtin_spec(&Builtin::Heisenberg3).unwrap();
        s.bch_main[0].alpha = vec![0, 0, 1];
        assert!(s.validate().is_err());
    }

    #[test]
    fn json_round_trip_preserves_spec() {
        let s = builtin_spec(&Builtin::Filiform4).unwrap();
        let back = GroupSpec::from_json(&s.to_json()).unwrap();
        assert_eq!(s, back);
        assert!(s.to_json().contains("\"num\""));
    }

    #[test]
    fn parse_names() {
        assert_eq!(Builtin::parse("z2").unwrap(), Builtin::Zd(2));
        assert_eq!(Builtin::parse("zd:5").unwrap(), Builtin::Zd(5));
        assert_eq!(Builtin::parse("Heisenberg3").unwrap(), Builtin::Heisenberg3);
        assert!(Builtin::parse("sl2").is_err());
    }
}
