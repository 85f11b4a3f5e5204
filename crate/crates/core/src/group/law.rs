use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::spec::{BchTerm, GroupSpec, LatticePoint};
use crate::error::GroupError;
use crate::poly::{q_from_f64, q_to_f64, F64Poly, IntPoly, Poly, Q};

/// Which Lie structure a product uses: the original one (`*`) or the graded
/// one of the asymptotic cone (`*_inf`, homogeneous BCH terms only).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Structure {
    Original,
    Graded,
}

/// First-kind (exponential) coordinates of a group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraVector(pub Vec<Q>);

impl AlgebraVector {
    pub fn zero(dim: usize) -> Self {
        AlgebraVector(vec![Q::zero(); dim])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        AlgebraVector(v.iter().map(|&c| Q::from_integer(c as i128)).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(q_to_f64).collect()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn neg(&self) -> Self {
        AlgebraVector(self.0.iter().map(|c| -c).collect())
    }
}

#[derive(Debug)]
struct Law {
    /// `(X . Y)_i` over `2d` variables.
    bch: Vec<Poly>,
    bch_f64: Vec<F64Poly>,
    /// log of the second-kind parametrization, over `d` variables.
    to_exp: Vec<Poly>,
    to_exp_f64: Vec<F64Poly>,
    /// inverse of `to_exp`.
    to_second: Vec<Poly>,
    /// product in second-kind coordinates, over `2d` variables.
    mult: Vec<Poly>,
    inv: Vec<Poly>,
}

#[derive(Debug)]
struct Inner {
    spec: GroupSpec,
    /// Factor order of the second-kind parametrization, left to right.
    order: Vec<usize>,
    original: Law,
    graded: Law,
    mult_int: Vec<IntPoly>,
    inv_int: Vec<IntPoly>,
}

/// A validated [`GroupSpec`] with its coordinate maps compiled to
/// polynomials. Cheap to clone; safe to share across threads.
#[derive(Clone, Debug)]
pub struct Group {
    inner: Arc<Inner>,
}

fn table_poly(d: usize, coord: usize, terms: &[&BchTerm]) -> Poly {
    let n = 2 * d;
    let mut p = Poly::var(n, coord).add(&Poly::var(n, d + coord));
    for t in terms.iter().filter(|t| t.coord == coord) {
        let exps: Vec<u8> = t.alpha.iter().chain(&t.beta).map(|&e| e as u8).collect();
        p = p.add(&Poly::monomial(exps, t.value.to_q()));
    }
    p
}

fn embed(polys: &[Poly], m: usize, offset: usize) -> Vec<Poly> {
    let d = polys.first().map_or(0, |p| p.nvars());
    let args: Vec<Poly> = (0..d).map(|i| Poly::var(m, offset + i)).collect();
    polys.iter().map(|p| p.compose(&args)).collect()
}

fn apply(map: &[Poly], args: &[Poly]) -> Vec<Poly> {
    map.iter().map(|p| p.compose(args)).collect()
}

impl Law {
    fn build(spec: &GroupSpec, order: &[usize], terms: Vec<&BchTerm>) -> Result<Law, GroupError> {
        let d = spec.dim;
        let bch: Vec<Poly> = (0..d).map(|i| table_poly(d, i, &terms)).collect();

        // log(exp(x_{o1} X_{o1}) * ... * exp(x_{od} X_{od})), folded left to right
        let mut acc: Vec<Poly> = vec![Poly::zero(d); d];
        for &j in order {
            let mut args = acc.clone();
            args.extend((0..d).map(|k| if k == j { Poly::var(d, j) } else { Poly::zero(d) }));
            acc = apply(&bch, &args);
        }
        let to_exp = acc;

        // peel factors from the right: the rightmost factor's coordinate is
        // read off directly because corrections only involve lower weights
        let mut rest: Vec<Poly> = (0..d).map(|i| Poly::var(d, i)).collect();
        let mut to_second = vec![Poly::zero(d); d];
        for &j in order.iter().rev() {
            let xj = rest[j].clone();
            let mut args = rest.clone();
            args.extend((0..d).map(|k| if k == j { xj.scale(-Q::one()) } else { Poly::zero(d) }));
            rest = apply(&bch, &args);
            to_second[j] = xj;
        }
        if rest.iter().any(|p| !p.is_zero()) {
            return Err(GroupError::InvalidSpec(
                "BCH tables are not triangular with respect to the weight order".into(),
            ));
        }

        let m = 2 * d;
        let mut args = embed(&to_exp, m, 0);
        args.extend(embed(&to_exp, m, d));
        let product_exp = apply(&bch, &args);
        let mult = apply(&to_second, &product_exp);

        let neg: Vec<Poly> = to_exp.iter().map(|p| p.scale(-Q::one())).collect();
        let inv = apply(&to_second, &neg);

        Ok(Law {
            bch_f64: bch.iter().map(Poly::to_f64).collect(),
            to_exp_f64: to_exp.iter().map(Poly::to_f64).collect(),
            bch,
            to_exp,
            to_second,
            mult,
            inv,
        })
    }
}

impl Group {
    pub fn new(spec: GroupSpec) -> Result<Group, GroupError> {
        spec.validate()?;
        let d = spec.dim;
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| spec.weights[b].cmp(&spec.weights[a]).then(b.cmp(&a)));

        let main: Vec<&BchTerm> = spec.bch_main.iter().collect();
        let all: Vec<&BchTerm> = spec.bch_main.iter().chain(&spec.bch_lower).collect();
        let original = Law::build(&spec, &order, all)?;
        let graded = Law::build(&spec, &order, main)?;
        let mult_int = original.mult.iter().map(Poly::to_int).collect::<Result<Vec<_>, _>>()?;
        let inv_int = original.inv.iter().map(Poly::to_int).collect::<Result<Vec<_>, _>>()?;
        let group = Group { inner: Arc::new(Inner { spec, order, original, graded, mult_int, inv_int }) };

        for g in &group.spec().generators {
            let inv = group.inverse(g)?;
            if !group.spec().generators.contains(&inv) {
                return Err(GroupError::InvalidSpec(format!(
                    "generating set is not symmetric: inverse of {:?} missing",
                    g.0
                )));
            }
        }
        Ok(group)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.inner.spec
    }

    pub fn dim(&self) -> usize {
        self.inner.spec.dim
    }

    pub fn weights(&self) -> &[u32] {
        &self.inner.spec.weights
    }

    pub fn identity(&self) -> LatticePoint {
        LatticePoint::identity(self.dim())
    }

    /// Factor order of the second-kind parametrization.
    pub fn factor_order(&self) -> &[usize] {
        &self.inner.order
    }

    fn law(&self, s: Structure) -> &Law {
        match s {
            Structure::Original => &self.inner.original,
            Structure::Graded => &self.inner.graded,
        }
    }

    fn check_dim(&self, n: usize) -> Result<(), GroupError> {
        if n != self.dim() {
            return Err(GroupError::DimensionMismatch { expected: self.dim(), got: n });
        }
        Ok(())
    }

    /// BCH polynomial of coordinate `i` over `(x, y)`.
    pub fn bch_polynomial(&self, s: Structure, i: usize) -> &Poly {
        &self.law(s).bch[i]
    }

    /// `log Psi` (or `log Psi_inf`) as polynomials in the second-kind
    /// coordinates.
    pub fn exponential_polynomials(&self, s: Structure) -> &[Poly] {
        &self.law(s).to_exp
    }

    pub fn second_kind_polynomials(&self, s: Structure) -> &[Poly] {
        &self.law(s).to_second
    }

    /// Product on the lattice (original structure), exact.
    pub fn multiply(&self, x: &LatticePoint, y: &LatticePoint) -> Result<LatticePoint, GroupError> {
        self.check_dim(x.dim())?;
        self.check_dim(y.dim())?;
        let d = self.dim();
        let mut args = Vec::with_capacity(2 * d);
        args.extend_from_slice(&x.0);
        args.extend_from_slice(&y.0);
        self.inner
            .mult_int
            .iter()
            .map(|p| p.eval_int(&args))
            .collect::<Result<Vec<_>, _>>()
            .map(LatticePoint)
    }

    pub fn inverse(&self, x: &LatticePoint) -> Result<LatticePoint, GroupError> {
        self.check_dim(x.dim())?;
        self.inner
            .inv_int
            .iter()
            .map(|p| p.eval_int(&x.0))
            .collect::<Result<Vec<_>, _>>()
            .map(LatticePoint)
    }

    /// Product of rational second-kind coordinates under either structure.
    pub fn multiply_second_kind(&self, s: Structure, x: &[Q], y: &[Q]) -> Result<Vec<Q>, GroupError> {
        self.check_dim(x.len())?;
        self.check_dim(y.len())?;
        let args: Vec<Q> = x.iter().chain(y).copied().collect();
        Ok(self.law(s).mult.iter().map(|p| p.eval_q(&args)).collect())
    }

    pub fn inverse_second_kind(&self, s: Structure, x: &[Q]) -> Result<Vec<Q>, GroupError> {
        self.check_dim(x.len())?;
        Ok(self.law(s).inv.iter().map(|p| p.eval_q(x)).collect())
    }

    /// `X . Y` in exponential coordinates under the given structure.
    pub fn bch_multiply(&self, s: Structure, x: &AlgebraVector, y: &AlgebraVector) -> Result<AlgebraVector, GroupError> {
        self.check_dim(x.dim())?;
        self.check_dim(y.dim())?;
        let args: Vec<Q> = x.0.iter().chain(&y.0).copied().collect();
        Ok(AlgebraVector(self.law(s).bch.iter().map(|p| p.eval_q(&args)).collect()))
    }

    /// `X ._inf Y`: the graded product, homogeneous BCH terms only.
    pub fn graded_multiply(&self, x: &AlgebraVector, y: &AlgebraVector) -> Result<AlgebraVector, GroupError> {
        self.bch_multiply(Structure::Graded, x, y)
    }

    pub fn bch_multiply_f64(&self, s: Structure, x: &[f64], y: &[f64]) -> Result<Vec<f64>, GroupError> {
        self.check_dim(x.len())?;
        self.check_dim(y.len())?;
        let mut args = Vec::with_capacity(2 * x.len());
        args.extend_from_slice(x);
        args.extend_from_slice(y);
        Ok(self.law(s).bch_f64.iter().map(|p| p.eval(&args)).collect())
    }

    pub fn graded_multiply_f64(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>, GroupError> {
        self.bch_multiply_f64(Structure::Graded, x, y)
    }

    /// `log Psi(x)`.
    pub fn to_exponential(&self, x: &LatticePoint) -> Result<AlgebraVector, GroupError> {
        self.check_dim(x.dim())?;
        let q: Vec<Q> = x.0.iter().map(|&c| Q::from_integer(c as i128)).collect();
        self.to_exponential_q(Structure::Original, &q)
    }

    pub fn to_exponential_q(&self, s: Structure, x: &[Q]) -> Result<AlgebraVector, GroupError> {
        self.check_dim(x.len())?;
        Ok(AlgebraVector(self.law(s).to_exp.iter().map(|p| p.eval_q(x)).collect()))
    }

    pub fn to_exponential_f64(&self, s: Structure, x: &[f64]) -> Result<Vec<f64>, GroupError> {
        self.check_dim(x.len())?;
        Ok(self.law(s).to_exp_f64.iter().map(|p| p.eval(x)).collect())
    }

    /// Inverts `to_exponential` for the chosen structure.
    pub fn to_second_kind(&self, v: &AlgebraVector, s: Structure) -> Result<Vec<Q>, GroupError> {
        self.check_dim(v.dim())?;
        Ok(self.law(s).to_second.iter().map(|p| p.eval_q(&v.0)).collect())
    }

    pub fn to_second_kind_f64(&self, v: &[f64], s: Structure) -> Result<Vec<f64>, GroupError> {
        self.check_dim(v.len())?;
        Ok(self.law(s).to_second.iter().map(|p| p.eval_f64(v)).collect())
    }

    /// Lattice point whose exponential coordinates are `v`, if integral.
    pub fn lattice_point_of(&self, v: &AlgebraVector) -> Result<LatticePoint, GroupError> {
        let x = self.to_second_kind(v, Structure::Original)?;
        x.iter()
            .map(|c| {
                if c.is_integer() {
                    i64::try_from(*c.numer()).map_err(|_| GroupError::Overflow)
                } else {
                    Err(GroupError::NonIntegral)
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .map(LatticePoint)
    }

    /// `delta_lambda`: scales coordinate `i` by `lambda^{s_i}`.
    pub fn dilate(&self, lambda: f64, x: &[f64]) -> Result<Vec<f64>, GroupError> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(GroupError::NonPositiveScale(lambda));
        }
        self.check_dim(x.len())?;
        Ok(x.iter().zip(self.weights()).map(|(c, &w)| c * lambda.powi(w as i32)).collect())
    }

    pub fn dilate_q(&self, lambda: Q, x: &AlgebraVector) -> Result<AlgebraVector, GroupError> {
        if lambda <= Q::zero() {
            return Err(GroupError::NonPositiveScale(q_to_f64(&lambda)));
        }
        self.check_dim(x.dim())?;
        Ok(AlgebraVector(
            x.0.iter().zip(self.weights()).map(|(c, &w)| c * num_traits::pow(lambda, w as usize)).collect(),
        ))
    }

    /// `log F_r(x)` with `F_r = delta_{1/r} o Psi o delta_r`, in doubles.
    pub fn rescaled_embedding(&self, r: f64, x: &[f64]) -> Result<Vec<f64>, GroupError> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(GroupError::NonPositiveScale(r));
        }
        let scaled = self.dilate(r, x)?;
        let v = self.to_exponential_f64(Structure::Original, &scaled)?;
        self.dilate(1.0 / r, &v)
    }

    /// Exact `log F_r(x)` for rational `r`.
    pub fn rescaled_embedding_q(&self, r: Q, x: &[Q]) -> Result<AlgebraVector, GroupError> {
        if r <= Q::zero() {
            return Err(GroupError::NonPositiveScale(q_to_f64(&r)));
        }
        let scaled = self.dilate_q(r, &AlgebraVector(x.to_vec()))?;
        let v = self.to_exponential_q(Structure::Original, &scaled.0)?;
        self.dilate_q(Q::one() / r, &v)
    }

    /// Word-length-free exact check that `x * y = y * x` in exponential
    /// coordinates under `s`.
    pub fn commutes(&self, s: Structure, x: &AlgebraVector, y: &AlgebraVector) -> Result<bool, GroupError> {
        Ok(self.bch_multiply(s, x, y)? == self.bch_multiply(s, y, x)?)
    }

    /// Exponential coordinates `c * e_i` as a lattice element, when integral.
    pub fn exp_axis(&self, i: usize, c: f64) -> Result<LatticePoint, GroupError> {
        let q = q_from_f64(c).ok_or(GroupError::NonIntegral)?;
        let mut v = AlgebraVector::zero(self.dim());
        v.0[i] = q;
        self.lattice_point_of(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::spec::{builtin_spec, Builtin};

    fn group(b: Builtin) -> Group {
        Group::new(builtin_spec(&b).unwrap()).unwrap()
    }

    fn lp(v: &[i64]) -> LatticePoint {
        LatticePoint(v.to_vec())
    }

    fn qv(v: &[(i128, i128)]) -> AlgebraVector {
        AlgebraVector(v.iter().map(|&(n, d)| Q::new(n, d)).collect())
    }

    /// Integer unitriangular 3x3 matrix with entries (1,2)=a, (2,3)=b, (1,3)=c.
    fn heis_matrix(p: &LatticePoint) -> [[i64; 3]; 3] {
        [[1, p.0[0], p.0[2]], [0, 1, p.0[1]], [0, 0, 1]]
    }

    fn matmul(a: [[i64; 3]; 3], b: [[i64; 3]; 3]) -> [[i64; 3]; 3] {
        let mut c = [[0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        c
    }

    #[test]
    fn heisenberg_product_matches_matrices() {
        let g = group(Builtin::Heisenberg3);
        let a = lp(&[1, 0, 0]);
        let b = lp(&[0, 1, 0]);
        let ab = g.multiply(&a, &b).unwrap();
        assert_eq!(ab, lp(&[1, 1, 1]));
        assert_eq!(heis_matrix(&ab), matmul(heis_matrix(&a), heis_matrix(&b)));
        let x = lp(&[3, -2, 7]);
        let y = lp(&[-5, 4, 1]);
        assert_eq!(heis_matrix(&g.multiply(&x, &y).unwrap()), matmul(heis_matrix(&x), heis_matrix(&y)));
    }

    #[test]
    fn heisenberg_inverse() {
        let g = group(Builtin::Heisenberg3);
        assert_eq!(g.inverse(&lp(&[1, 1, 1])).unwrap(), lp(&[-1, -1, 0]));
        assert_eq!(g.inverse(&lp(&[0, 0, 0])).unwrap(), lp(&[0, 0, 0]));
    }

    #[test]
    fn zd_is_vector_addition() {
        let g = group(Builtin::Zd(2));
        assert_eq!(g.multiply(&lp(&[3, -1]), &lp(&[1, 4])).unwrap(), lp(&[4, 3]));
        assert_eq!(g.inverse(&lp(&[2, -7])).unwrap(), lp(&[-2, 7]));
        let v = qv(&[(1, 3), (-2, 1)]);
        let w = qv(&[(5, 1), (1, 2)]);
        assert_eq!(g.graded_multiply(&v, &w).unwrap(), qv(&[(16, 3), (-3, 2)]));
        assert_eq!(g.to_exponential(&lp(&[4, -9])).unwrap(), AlgebraVector::from_ints(&[4, -9]));
    }

    #[test]
    fn heisenberg_graded_product_and_log() {
        let g = group(Builtin::Heisenberg3);
        let x = AlgebraVector::from_ints(&[1, 0, 0]);
        let y = AlgebraVector::from_ints(&[0, 1, 0]);
        assert_eq!(g.graded_multiply(&x, &y).unwrap(), qv(&[(1, 1), (1, 1), (1, 2)]));
        assert_eq!(g.graded_multiply(&x, &AlgebraVector::zero(3)).unwrap(), x);
        assert_eq!(g.to_exponential(&lp(&[1, 1, 0])).unwrap(), qv(&[(1, 1), (1, 1), (-1, 2)]));
    }

    #[test]
    fn heisenberg_log_matches_matrix_log() {
        // log(I + N) = N - N^2/2 for a strictly upper triangular 3x3 N
        let g = group(Builtin::Heisenberg3);
        for p in [[1, 1, 0], [2, -3, 5], [-4, 7, -1]] {
            let v = g.to_exponential(&lp(&p)).unwrap();
            let want = qv(&[(p[0] as i128, 1), (p[1] as i128, 1), (2 * p[2] as i128 - (p[0] * p[1]) as i128, 2)]);
            assert_eq!(v, want);
        }
    }

    #[test]
    fn dilation_examples() {
        let g = group(Builtin::Heisenberg3);
        assert_eq!(g.dilate(2.0, &[1.0, 1.0, 1.0]).unwrap(), vec![2.0, 2.0, 4.0]);
        assert_eq!(g.dilate(1.0, &[0.3, -2.0, 5.0]).unwrap(), vec![0.3, -2.0, 5.0]);
        assert!(matches!(g.dilate(0.0, &[0.0; 3]), Err(GroupError::NonPositiveScale(_))));
        assert!(g.dilate(-1.0, &[0.0; 3]).is_err());
    }

    #[test]
    fn dimension_errors() {
        let g = group(Builtin::Heisenberg3);
        assert!(matches!(
            g.multiply(&lp(&[1, 0]), &lp(&[0, 1, 0])),
            Err(GroupError::DimensionMismatch { expected: 3, got: 2 })
        ));
        assert!(g.inverse(&lp(&[1])).is_err());
        assert!(g.to_exponential(&lp(&[1, 2, 3, 4])).is_err());
    }

    #[test]
    fn rescaled_embedding_is_trivial_when_abelian() {
        let g = group(Builtin::Zd(3));
        let x = [1.5, -2.0, 0.25];
        for r in [0.5, 3.0, 100.0] {
            assert_eq!(g.rescaled_embedding(r, &x).unwrap(), x.to_vec());
        }
        assert!(g.rescaled_embedding(0.0, &x).is_err());
    }

    #[test]
    fn filiform_lower_terms_vanish_under_rescaling() {
        let g = group(Builtin::Filiform4);
        let x = [1.0, 1.0, 0.0, 0.0];
        let limit = g.to_exponential_f64(Structure::Graded, &x).unwrap();
        let err = |r: f64| {
            let v = g.rescaled_embedding(r, &x).unwrap();
            v.iter().zip(&limit).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        assert!(err(10.0) > 0.0);
        assert!(err(10.0) / err(100.0) >= 5.0);
    }

    #[test]
    fn asymmetric_generators_rejected() {
        let mut spec = builtin_spec(&Builtin::Heisenberg3).unwrap();
        spec.generators.retain(|g| g.0 != vec![-1, 0, 0]);
        assert!(matches!(Group::new(spec), Err(GroupError::InvalidSpec(_))));
    }

    #[test]
    fn lattice_closed_and_associative() {
        for b in [Builtin::Heisenberg3, Builtin::Filiform4] {
            let g = group(b);
            let d = g.dim();
            let pts: Vec<LatticePoint> = (0..40)
                .map(|k: i64| lp(&(0..d as i64).map(|i| ((k * 7 + i * 13) % 9) - 4).collect::<Vec<_>>()))
                .collect();
            for w in pts.windows(3) {
                let ab = g.multiply(&w[0], &w[1]).unwrap();
                let bc = g.multiply(&w[1], &w[2]).unwrap();
                assert_eq!(g.multiply(&ab, &w[2]).unwrap(), g.multiply(&w[0], &bc).unwrap());
                let inv = g.inverse(&w[0]).unwrap();
                assert!(g.multiply(&w[0], &inv).unwrap().is_identity());
                assert!(g.multiply(&inv, &w[0]).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn filiform_matches_semidirect_product() {
        // (t, v)(s, w) = (t + s, v + A^t w), A the 3x3 unipotent Jordan block;
        // second-kind coordinates (t, v3, v2, v1)
        fn oracle(x: &[i64], y: &[i64]) -> Vec<i64> {
            let t = x[0];
            let binom = t * (t - 1) / 2;
            let (w1, w2, w3) = (y[3], y[2], y[1]);
            vec![x[0] + y[0], x[1] + w3, x[2] + w2 + t * w3, x[3] + w1 + t * w2 + binom * w3]
        }
        let g = group(Builtin::Filiform4);
        for k in 0..60i64 {
            let x: Vec<i64> = (0..4).map(|i| ((k * 5 + i * 11) % 9) - 4).collect();
            let y: Vec<i64> = (0..4).map(|i| ((k * 3 + i * 7 + 1) % 11) - 5).collect();
            assert_eq!(g.multiply(&lp(&x), &lp(&y)).unwrap().0, oracle(&x, &y));
        }
    }
}
