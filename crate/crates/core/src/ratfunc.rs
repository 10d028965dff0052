//! The fraction field K = k(t) of the coefficient ring.
//!
//! Invariant: denominators are monic, nonzero, and coprime to the
//! numerator, so equality of reduced forms is plain structural equality.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::ring::{Field, KAlgebra, Ring};
use crate::unipoly::{PolyRing, UniPoly};

#[derive(Clone, PartialEq, Debug)]
pub struct RatFunc<F: Field> {
    pub num: UniPoly<F>,
    pub den: UniPoly<F>,
}

/// The field k(t) as a ring object.
#[derive(Clone, PartialEq, Debug)]
pub struct FracRing<F: Field> {
    pub poly: PolyRing<F>,
}

impl<F: Field> FracRing<F> {
    pub fn new(base: F) -> Self {
        FracRing { poly: PolyRing::new(base) }
    }

    /// Build num/den in lowest terms with monic denominator.
    pub fn frac(&self, num: UniPoly<F>, den: UniPoly<F>) -> Result<RatFunc<F>> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc { num, den: self.poly.one() });
        }
        let g = self.poly.gcd(&num, &den);
        let mut num = self.poly.div_exact(&num, &g)?;
        let mut den = self.poly.div_exact(&den, &g)?;
        let lead = den.leading().unwrap().clone();
        if !self.poly.base.is_one(&lead) {
            let inv = self.poly.base.inv(&lead)?;
            num = self.poly.scale(&num, &inv);
            den = self.poly.scale(&den, &inv);
        }
        Ok(RatFunc { num, den })
    }

    pub fn from_poly(&self, p: UniPoly<F>) -> RatFunc<F> {
        RatFunc { num: p, den: self.poly.one() }
    }

    /// Some(p) when the reduced denominator is 1.
    pub fn to_poly(&self, a: &RatFunc<F>) -> Option<UniPoly<F>> {
        if self.poly.is_one(&a.den) {
            Some(a.num.clone())
        } else {
            None
        }
    }
}

impl<F: Field> Ring for FracRing<F> {
    type Elem = RatFunc<F>;

    fn zero(&self) -> RatFunc<F> {
        RatFunc { num: self.poly.zero(), den: self.poly.one() }
    }

    fn one(&self) -> RatFunc<F> {
        RatFunc { num: self.poly.one(), den: self.poly.one() }
    }

    fn add(&self, a: &RatFunc<F>, b: &RatFunc<F>) -> RatFunc<F> {
        let num = self.poly.add(
            &self.poly.mul(&a.num, &b.den),
            &self.poly.mul(&b.num, &a.den),
        );
        let den = self.poly.mul(&a.den, &b.den);
        self.frac(num, den).expect("nonzero denominator")
    }

    fn neg(&self, a: &RatFunc<F>) -> RatFunc<F> {
        RatFunc { num: self.poly.neg(&a.num), den: a.den.clone() }
    }

    fn mul(&self, a: &RatFunc<F>, b: &RatFunc<F>) -> RatFunc<F> {
        self.frac(
            self.poly.mul(&a.num, &b.num),
            self.poly.mul(&a.den, &b.den),
        )
        .expect("nonzero denominator")
    }

    fn is_zero(&self, a: &RatFunc<F>) -> bool {
        a.num.is_zero()
    }

    fn cmp_elem(&self, a: &RatFunc<F>, b: &RatFunc<F>) -> Ordering {
        self.poly
            .cmp_elem(&a.num, &b.num)
            .then_with(|| self.poly.cmp_elem(&a.den, &b.den))
    }

    fn fmt_elem(&self, a: &RatFunc<F>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_one(&a.den) {
            return self.poly.fmt_elem(&a.num, f);
        }
        write!(f, "(")?;
        self.poly.fmt_elem(&a.num, f)?;
        write!(f, ")/(")?;
        self.poly.fmt_elem(&a.den, f)?;
        write!(f, ")")
    }
}

impl<F: Field> Field for FracRing<F> {
    fn inv(&self, a: &RatFunc<F>) -> Result<RatFunc<F>> {
        if a.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.frac(a.den.clone(), a.num.clone())
    }
}

impl<F: Field> KAlgebra<F> for FracRing<F> {
    fn base_field(&self) -> &F {
        &self.poly.base
    }
    fn embed_scalar(&self, c: &F::Elem) -> RatFunc<F> {
        self.from_poly(self.poly.constant(c.clone()))
    }
    fn try_scalar(&self, a: &RatFunc<F>) -> Option<F::Elem> {
        if !self.poly.is_one(&a.den) {
            return None;
        }
        self.poly.try_scalar(&a.num)
    }
}
