//! Sparse multivariate polynomials over the rationals.
//!
//! The group laws of a nilpotent lattice are polynomial in coordinates, so
//! every coordinate map (BCH products, first/second kind changes, inverses)
//! is compiled once into a [`Poly`] and then evaluated exactly on integers
//! or rationals, or approximately on doubles.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::GroupError;
use crate::interval::Interval;

/// Exact rational scalar used throughout the crate.
pub type Q = Ratio<i128>;

/// Exponent vector of a monomial.
pub type Exponents = Vec<u8>;

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Poly::zero(nvars);
        p.add_term(e, Q::one());
        p
    }

    /// Builds the monomial `c * x^exps`.
    pub fn monomial(exps: Exponents, c: Q) -> Self {
        let mut p = Poly::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, exps: Exponents, c: Q) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-Q::one()))
    }

    pub fn scale(&self, c: Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::constant(self.nvars, Q::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitutes `args[i]` for variable `i`. All arguments must share a
    /// variable count, which becomes the variable count of the result.
    pub fn compose(&self, args: &[Poly]) -> Poly {
        assert_eq!(args.len(), self.nvars, "one argument per variable");
        let m = args.first().map_or(0, |a| a.nvars);
        let mut cache: Vec<Vec<Poly>> = args
            .iter()
            .map(|a| vec![Poly::constant(a.nvars, Q::one()), a.clone()])
            .collect();
        let mut out = Poly::zero(m);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(m, *c);
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while cache[i].len() <= k as usize {
                    let next = cache[i].last().unwrap().mul(&args[i]);
                    cache[i].push(next);
                }
                term = term.mul(&cache[i][k as usize]);
            }
            out = out.add(&term);
        }
        out
    }

    /// Weighted degree of every monomial, `sum_j e_j * w_j`.
    pub fn weighted_degrees<'a>(&'a self, weights: &'a [u32]) -> impl Iterator<Item = u32> + 'a {
        self.terms
            .keys()
            .map(move |e| e.iter().zip(weights).map(|(&a, &w)| a as u32 * w).sum())
    }

    /// Indices of the variables that appear with a nonzero exponent.
    pub fn support(&self) -> Vec<usize> {
        let mut used = vec![false; self.nvars];
        for e in self.terms.keys() {
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    used[i] = true;
                }
            }
        }
        used.iter().enumerate().filter(|(_, &u)| u).map(|(i, _)| i).collect()
    }

    pub fn eval_q(&self, x: &[Q]) -> Q {
        assert_eq!(x.len(), self.nvars);
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = *c;
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t *= *xi;
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = q_to_f64(c);
                for (xi, &k) in x.iter().zip(e) {
                    t *= xi.powi(k as i32);
                }
                t
            })
            .sum()
    }

    pub fn eval_interval(&self, x: &[Interval]) -> Interval {
        assert_eq!(x.len(), self.nvars);
        let mut acc = Interval::point(0.0);
        for (e, c) in &self.terms {
            let mut t = Interval::point(q_to_f64(c));
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t = t.mul(&xi.powi(k as u32));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    pub fn to_f64(&self) -> F64Poly {
        F64Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), q_to_f64(c))).collect(),
        }
    }

    /// Clears denominators so the polynomial can be evaluated on integers.
    pub fn to_int(&self) -> Result<IntPoly, GroupError> {
        let mut denom: i128 = 1;
        for c in self.terms.values() {
            denom = denom.lcm(c.denom());
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let scaled = c.numer().checked_mul(denom / c.denom()).ok_or(GroupError::Overflow)?;
                Ok((e.clone(), scaled))
            })
            .collect::<Result<Vec<_>, GroupError>>()?;
        Ok(IntPoly { nvars: self.nvars, denom, terms })
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{}", i)?,
                    _ => write!(f, "*x{}^{}", i, k)?,
                }
            }
        }
        Ok(())
    }
}

pub fn q_to_f64(q: &Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Exact rational from a double (every finite double is dyadic). Returns
/// `None` for non-finite values or magnitudes outside the `i128` range.
pub fn q_from_f64(x: f64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(Q::zero());
    }
    let bits = x.to_bits();
    let sign: i128 = if bits >> 63 == 0 { 1 } else { -1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i128;
    let (mantissa, exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1i128 << 52), exp_bits - 1075)
    };
    if exp >= 0 {
        if exp > 70 {
            return None;
        }
        Some(Q::from_integer(sign * (mantissa << exp)))
    } else {
        let shift = -exp;
        let tz = mantissa.trailing_zeros() as i32;
        let cancel = tz.min(shift);
        let (m, sh) = (mantissa >> cancel, shift - cancel);
        if sh > 120 {
            return None;
        }
        Some(Q::new(sign * m, 1i128 << sh))
    }
}

pub fn q_from_int(x: i64) -> Q {
    Q::from_integer(x as i128)
}

/// Polynomial with integer numerators over a common denominator.
#[derive(Clone, Debug)]
pub struct IntPoly {
    nvars: usize,
    denom: i128,
    terms: Vec<(Exponents, i128)>,
}

impl IntPoly {
    pub fn denom(&self) -> i128 {
        self.denom
    }

    /// Numerator of the value at an integer point, i.e. `denom * p(x)`.
    pub fn eval_numerator(&self, x: &[i64]) -> Result<i128, GroupError> {
        debug_assert_eq!(x.len(), self.nvars);
        let mut acc: i128 = 0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (&xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t = t.checked_mul(xi as i128).ok_or(GroupError::Overflow)?;
                }
            }
            acc = acc.checked_add(t).ok_or(GroupError::Overflow)?;
        }
        Ok(acc)
    }

    /// Value at an integer point; errors when the value is not an integer.
    pub fn eval_int(&self, x: &[i64]) -> Result<i64, GroupError> {
        let n = self.eval_numerator(x)?;
        if n % self.denom != 0 {
            return Err(GroupError::NonIntegral);
        }
        i64::try_from(n / self.denom).map_err(|_| GroupError::Overflow)
    }
}

#[derive(Clone, Debug)]
pub struct F64Poly {
    nvars: usize,
    terms: Vec<(Exponents, f64)>,
}

impl F64Poly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (&xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t *= xi;
                }
            }
            acc += t;
        }
        acc
    }
}

/// Evaluates a vector-valued polynomial map.
pub fn eval_map_q(map: &[Poly], x: &[Q]) -> Vec<Q> {
    map.iter().map(|p| p.eval_q(x)).collect()
}

/// Concatenates two argument vectors into the argument list of a map over
/// `2d` variables: the first `d` variables come from `left`, the rest from
/// `right`.
pub fn split_args(d: usize, m: usize) -> (Vec<Poly>, Vec<Poly>) {
    let left = (0..d).map(|i| Poly::var(m, i)).collect();
    let right = (0..d).map(|i| Poly::var(m, d + i)).collect();
    (left, right)
}
