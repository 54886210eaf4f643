//! Polynomial stand-ins for the entire functions that parametrize the twists.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::Mat2;
use crate::scalar::{is_finite, Cx, Real};

/// Default bound on the total degree of a [`MonomialTable`].
pub const DEFAULT_MAX_DEGREE: u32 = 8;

/// Univariate polynomial with complex coefficients, ascending degree.
///
/// Trailing zero coefficients are trimmed, so the zero polynomial has no
/// coefficients and two equal polynomials compare equal structurally.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EntirePoly<T> {
    coeffs: Vec<Cx<T>>,
}

impl<T: Real> EntirePoly<T> {
    pub fn new(mut coeffs: Vec<Cx<T>>) -> Result<Self> {
        if !coeffs.iter().copied().all(is_finite) {
            return Err(Error::InvalidParameter(
                "polynomial coefficients must be finite".into(),
            ));
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Ok(Self { coeffs })
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Cx<T>) -> Self {
        Self::new(vec![c]).expect("finite constant")
    }

    /// `t ↦ t`.
    pub fn identity() -> Self {
        Self::new(vec![Cx::zero(), Cx::one()]).expect("finite")
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_nonconstant(&self) -> bool {
        self.coeffs.iter().skip(1).any(|c| !c.is_zero())
    }

    pub fn eval(&self, t: Cx<T>) -> Cx<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Cx::zero(), |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * T::lit(k as f64))
            .collect();
        Self { coeffs }
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }
}

/// Exponent triple `(i, j, k)` of a monomial in three variables.
pub type Exponents = (u32, u32, u32);

/// Sparse polynomial in three formal variables with a bounded total degree.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialTable<T> {
    terms: BTreeMap<Exponents, Cx<T>>,
    max_degree: u32,
}

impl<T: Real> MonomialTable<T> {
    pub fn new(terms: impl IntoIterator<Item = (Exponents, Cx<T>)>) -> Result<Self> {
        Self::with_max_degree(terms, DEFAULT_MAX_DEGREE)
    }

    /// Repeated exponents are summed; zero coefficients are dropped.
    pub fn with_max_degree(
        terms: impl IntoIterator<Item = (Exponents, Cx<T>)>,
        max_degree: u32,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            if !is_finite(c) {
                return Err(Error::InvalidParameter(
                    "monomial coefficients must be finite".into(),
                ));
            }
            let degree = e.0 + e.1 + e.2;
            if degree > max_degree {
                return Err(Error::DegreeTooHigh {
                    degree,
                    max: max_degree,
                });
            }
            let slot: &mut Cx<T> = map.entry(e).or_insert_with(Cx::zero);
            *slot = *slot + c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Self {
            terms: map,
            max_degree,
        })
    }

    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
            max_degree: DEFAULT_MAX_DEGREE,
        }
    }

    pub fn constant(c: Cx<T>) -> Self {
        Self::new([((0, 0, 0), c)]).expect("finite constant")
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponents, Cx<T>)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, u: Cx<T>, v: Cx<T>, w: Cx<T>) -> Cx<T> {
        self.terms.iter().fold(Cx::zero(), |acc, (&(i, j, k), &c)| {
            acc + c * u.powu(i) * v.powu(j) * w.powu(k)
        })
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&e, &c)| (e, -c)).collect(),
            max_degree: self.max_degree,
        }
    }
}

/// Scalar `a(x12, tr x, det x)` in the lower-triangular conjugator
/// `[[1, 0], [a, 1]]`. Monomial `(i, j, k)` is `x12^i · tr^j · det^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistFunction<T> {
    pub g: MonomialTable<T>,
}

impl<T: Real> TwistFunction<T> {
    pub fn new(g: MonomialTable<T>) -> Self {
        Self { g }
    }

    pub fn eval(&self, x: &Mat2<T>) -> Cx<T> {
        self.g.eval(x.x12, x.trace(), x.det())
    }

    pub fn neg(&self) -> Self {
        Self { g: self.g.neg() }
    }
}

/// How the monomial table of an [`InvariantFunction`] becomes the scalar `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScalarForm {
    /// `a = g`.
    #[default]
    Poly,
    /// `a = exp(g)`, never zero.
    Exp,
}

/// Scalar `a(x11, x22, x12·x21)` in the diagonal conjugator `diag(a, 1/a)`.
/// Monomial `(i, j, k)` is `x11^i · x22^j · (x12·x21)^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantFunction<T> {
    pub g: MonomialTable<T>,
    pub form: ScalarForm,
    /// Evaluate `1/a` instead of `a`.
    pub reciprocal: bool,
}

impl<T: Real> InvariantFunction<T> {
    pub fn poly(g: MonomialTable<T>) -> Self {
        Self {
            g,
            form: ScalarForm::Poly,
            reciprocal: false,
        }
    }

    pub fn exp(g: MonomialTable<T>) -> Self {
        Self {
            g,
            form: ScalarForm::Exp,
            reciprocal: false,
        }
    }

    pub fn eval(&self, x: &Mat2<T>) -> Cx<T> {
        let v = self.g.eval(x.x11, x.x22, x.x12 * x.x21);
        let a = match self.form {
            ScalarForm::Poly => v,
            ScalarForm::Exp => v.exp(),
        };
        if self.reciprocal {
            a.inv()
        } else {
            a
        }
    }

    /// The function `1/a`.
    pub fn reciprocal(&self) -> Self {
        match self.form {
            ScalarForm::Exp => Self {
                g: self.g.neg(),
                ..self.clone()
            },
            ScalarForm::Poly => Self {
                reciprocal: !self.reciprocal,
                ..self.clone()
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    type P = EntirePoly<f64>;

    fn c(re: f64, im: f64) -> Cx<f64> {
        cx(re, im)
    }

    #[test]
    fn horner_examples() {
        assert_eq!(P::identity().eval(c(0.1, 0.0)), c(0.1, 0.0));
        let k = c(0.3, -2.0);
        assert_eq!(P::constant(k).eval(c(17.0, 4.0)), k);
        let p = P::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert_eq!(p.eval(c(2.0, 0.0)), c(17.0, 0.0));
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = P::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(p, P::constant(c(1.0, 0.0)));
        assert_eq!(p.degree(), Some(0));
        assert!(!p.is_nonconstant());
        assert_eq!(P::new(vec![c(0.0, 0.0)]).unwrap(), P::zero());
        assert_eq!(P::zero().degree(), None);
        assert!(P::new(vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn nonconstancy() {
        assert!(P::identity().is_nonconstant());
        let p = P::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1e-30)]).unwrap();
        assert!(p.is_nonconstant());
        assert!(!P::zero().is_nonconstant());
    }

    #[test]
    fn derivative_matches_power_rule() {
        let p = P::new(vec![c(5.0, 0.0), c(3.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]).unwrap();
        let d = p.derivative();
        assert_eq!(d.coeffs(), &[c(3.0, 0.0), c(0.0, 0.0), c(0.0, 3.0)]);
    }

    #[test]
    fn monomials_merge_and_drop_zeros() {
        let t = MonomialTable::new([
            ((1, 0, 0), c(1.0, 0.0)),
            ((1, 0, 0), c(-1.0, 0.0)),
            ((0, 1, 1), c(2.0, 0.0)),
        ])
        .unwrap();
        assert_eq!(t.terms().count(), 1);
        let v = t.eval(c(9.0, 9.0), c(0.5, 0.0), c(0.0, 2.0));
        assert_eq!(v, c(0.0, 2.0));
    }

    #[test]
    fn degree_bound_is_enforced() {
        let err = MonomialTable::<f64>::new([((4, 4, 1), c(1.0, 0.0))]).unwrap_err();
        assert_eq!(err, Error::DegreeTooHigh { degree: 9, max: 8 });
        assert!(MonomialTable::<f64>::with_max_degree([((4, 4, 1), c(1.0, 0.0))], 9).is_ok());
    }

    #[test]
    fn twist_function_arguments() {
        // a = tr · x12 with tr = 1/2, x12 = 0.2
        let a = TwistFunction::new(MonomialTable::new([((1, 1, 0), c(1.0, 0.0))]).unwrap());
        let x = Mat2::new(c(0.3, 0.0), c(0.2, 0.0), c(7.0, 0.0), c(0.2, 0.0));
        assert!((a.eval(&x) - c(0.1, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn invariant_function_reciprocals() {
        let x = Mat2::new(c(0.3, 0.1), c(0.2, 0.0), c(-1.0, 0.5), c(0.2, -0.4));
        let g = MonomialTable::new([((1, 0, 0), c(1.0, 0.0)), ((0, 0, 1), c(1.0, 0.0))]).unwrap();
        for f in [InvariantFunction::poly(g.clone()), InvariantFunction::exp(g)] {
            let prod = f.eval(&x) * f.reciprocal().eval(&x);
            assert!((prod - c(1.0, 0.0)).norm() < 1e-15);
            assert_eq!(f.reciprocal().reciprocal(), f);
        }
    }
}
