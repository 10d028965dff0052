//! Residue fields kappa = k[t]/(pi) for pi monic irreducible, used when a
//! prime of k[t] is inverted during the descent.
//!
//! Elements are canonical representatives: polynomials of degree less than
//! deg pi.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::factor::UniFactor;
use crate::ring::{Field, KAlgebra, Ring};
use crate::unipoly::{PolyRing, UniPoly};

#[derive(Clone, PartialEq, Debug)]
pub struct ExtField<F: Field> {
    pub poly: PolyRing<F>,
    modulus: UniPoly<F>,
}

impl<F: Field + UniFactor> ExtField<F> {
    /// Build k[t]/(pi). The modulus must be monic of positive degree and is
    /// verified irreducible by the factorization routine.
    pub fn new(poly: PolyRing<F>, modulus: UniPoly<F>) -> Result<Self> {
        if modulus.degree().unwrap_or(0) == 0 {
            return Err(Error::ModulusNotIrreducible("constant modulus".into()));
        }
        if !poly.is_monic(&modulus) {
            return Err(Error::ModulusNotIrreducible("modulus must be monic".into()));
        }
        if !poly.base.is_irreducible(&modulus)? {
            return Err(Error::ModulusNotIrreducible(format!(
                "{}",
                poly.show(&modulus)
            )));
        }
        Ok(ExtField { poly, modulus })
    }
}

impl<F: Field> ExtField<F> {
    pub fn modulus(&self) -> &UniPoly<F> {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap()
    }

    /// Canonical representative of a residue class.
    pub fn reduce(&self, a: &UniPoly<F>) -> UniPoly<F> {
        self.poly.div_rem(a, &self.modulus).expect("nonzero modulus").1
    }

    /// Number of elements when the base field is GF(p).
    pub fn size_hint(&self, base_order: u64) -> Option<u128> {
        (base_order as u128).checked_pow(self.degree() as u32)
    }
}

impl<F: Field> Ring for ExtField<F> {
    type Elem = UniPoly<F>;

    fn zero(&self) -> UniPoly<F> {
        self.poly.zero()
    }
    fn one(&self) -> UniPoly<F> {
        self.poly.one()
    }
    fn add(&self, a: &UniPoly<F>, b: &UniPoly<F>) -> UniPoly<F> {
        self.poly.add(a, b)
    }
    fn neg(&self, a: &UniPoly<F>) -> UniPoly<F> {
        self.poly.neg(a)
    }
    fn mul(&self, a: &UniPoly<F>, b: &UniPoly<F>) -> UniPoly<F> {
        self.reduce(&self.poly.mul(a, b))
    }
    fn is_zero(&self, a: &UniPoly<F>) -> bool {
        a.is_zero()
    }
    fn cmp_elem(&self, a: &UniPoly<F>, b: &UniPoly<F>) -> Ordering {
        self.poly.cmp_elem(a, b)
    }
    fn fmt_elem(&self, a: &UniPoly<F>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.fmt_elem(a, f)
    }
}

impl<F: Field> Field for ExtField<F> {
    fn inv(&self, a: &UniPoly<F>) -> Result<UniPoly<F>> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (g, s, _) = self.poly.extended_gcd(a, &self.modulus);
        if !self.poly.is_one(&g) {
            // cannot happen for an irreducible modulus and reduced input
            return Err(Error::Internal("non-invertible residue".into()));
        }
        Ok(self.reduce(&s))
    }
}

impl<F: Field> KAlgebra<F> for ExtField<F> {
    fn base_field(&self) -> &F {
        &self.poly.base
    }
    fn embed_scalar(&self, c: &F::Elem) -> UniPoly<F> {
        self.poly.constant(c.clone())
    }
    fn try_scalar(&self, a: &UniPoly<F>) -> Option<F::Elem> {
        self.poly.try_scalar(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::PrimeField;

    fn gf49() -> ExtField<PrimeField> {
        let poly = PolyRing::new(PrimeField::new(7).unwrap());
        let modulus = poly.poly(vec![1, 0, 1]); // t^2 + 1, irreducible mod 7
        ExtField::new(poly, modulus).unwrap()
    }

    #[test]
    fn rejects_reducible_modulus() {
        let poly = PolyRing::new(PrimeField::new(7).unwrap());
        let reducible = poly.poly(vec![6, 0, 1]); // t^2 - 1
        assert!(matches!(
            ExtField::new(poly, reducible),
            Err(Error::ModulusNotIrreducible(_))
        ));
    }

    #[test]
    fn inverse_via_extended_gcd() {
        let k = gf49();
        let a = k.poly.poly(vec![3, 1]); // t + 3
        let inv = k.inv(&a).unwrap();
        assert!(k.is_one(&k.mul(&a, &inv)));
    }

    #[test]
    fn every_nonzero_element_of_gf49_is_invertible() {
        let k = gf49();
        for c0 in 0..7u64 {
            for c1 in 0..7u64 {
                let a = k.poly.poly(vec![c0, c1]);
                if a.is_zero() {
                    continue;
                }
                let inv = k.inv(&a).unwrap();
                assert!(k.is_one(&k.mul(&a, &inv)));
            }
        }
    }
}
