//! Sparse bivariate polynomials R[x1, x2] over any coefficient ring R.
//!
//! Terms are keyed by exponent pairs ordered graded-lexicographically
//! (total degree first, then x1-exponent), so iteration order, leading
//! terms, and printing are canonical.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::extfield::ExtField;
use crate::ring::{Field, KAlgebra, Ring};
use crate::unipoly::{PolyRing, UniPoly};

/// Exponent pair x1^a * x2^b with graded-lex order (largest = leading).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Expo {
    pub a: u32,
    pub b: u32,
}

impl Expo {
    pub fn total(&self) -> u32 {
        self.a + self.b
    }
}

impl Ord for Expo {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.total(), self.a).cmp(&(other.total(), other.a))
    }
}

impl PartialOrd for Expo {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct BiPoly<R: Ring> {
    pub ring: R,
    terms: BTreeMap<Expo, R::Elem>,
}

impl<R: Ring> BiPoly<R> {
    pub fn zero(ring: &R) -> Self {
        BiPoly { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &R, c: R::Elem) -> Self {
        let mut p = Self::zero(ring);
        p.set(Expo { a: 0, b: 0 }, c);
        p
    }

    pub fn one(ring: &R) -> Self {
        Self::constant(ring, ring.one())
    }

    /// The variable x1 or x2 (index 1 or 2).
    pub fn var(ring: &R, index: u8) -> Self {
        let e = match index {
            1 => Expo { a: 1, b: 0 },
            2 => Expo { a: 0, b: 1 },
            _ => panic!("variable index must be 1 or 2"),
        };
        let mut p = Self::zero(ring);
        p.set(e, ring.one());
        p
    }

    pub fn term(ring: &R, c: R::Elem, a: u32, b: u32) -> Self {
        let mut p = Self::zero(ring);
        p.set(Expo { a, b }, c);
        p
    }

    fn set(&mut self, e: Expo, c: R::Elem) {
        if !self.ring.is_zero(&c) {
            self.terms.insert(e, c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterate terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Expo, &R::Elem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, a: u32, b: u32) -> R::Elem {
        self.terms
            .get(&Expo { a, b })
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    /// Total degree; None for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|e| e.total())
    }

    /// Leading exponent and coefficient in graded-lex order.
    pub fn leading(&self) -> Option<(&Expo, &R::Elem)> {
        self.terms.iter().next_back()
    }

    /// The top total-degree homogeneous part.
    pub fn leading_form(&self) -> Self {
        let Some(d) = self.total_degree() else {
            return self.clone();
        };
        let mut out = Self::zero(&self.ring);
        for (e, c) in &self.terms {
            if e.total() == d {
                out.set(*e, c.clone());
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.ring, other.ring, "coefficient domain mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            let s = match out.terms.get(e) {
                Some(x) => self.ring.add(x, c),
                None => c.clone(),
            };
            if self.ring.is_zero(&s) {
                out.terms.remove(e);
            } else {
                out.terms.insert(*e, s);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = self.ring.neg(c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ring, other.ring, "coefficient domain mismatch");
        let mut out = Self::zero(&self.ring);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = Expo { a: e1.a + e2.a, b: e1.b + e2.b };
                let prod = self.ring.mul(c1, c2);
                let s = match out.terms.get(&e) {
                    Some(x) => self.ring.add(x, &prod),
                    None => prod,
                };
                if self.ring.is_zero(&s) {
                    out.terms.remove(&e);
                } else {
                    out.terms.insert(e, s);
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let mut out = Self::zero(&self.ring);
        for (e, x) in &self.terms {
            out.set(*e, self.ring.mul(x, c));
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.ring);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative with respect to x1 (index 1) or x2 (index 2).
    pub fn derivative(&self, index: u8) -> Self {
        let mut out = Self::zero(&self.ring);
        for (e, c) in &self.terms {
            let (k, ne) = match index {
                1 if e.a > 0 => (e.a, Expo { a: e.a - 1, b: e.b }),
                2 if e.b > 0 => (e.b, Expo { a: e.a, b: e.b - 1 }),
                _ => continue,
            };
            let f = self.ring.from_i64(k as i64);
            out.set(ne, self.ring.mul(c, &f));
        }
        out
    }

    /// Substitute (x1, x2) -> (g1, g2). Powers of the images are cached.
    pub fn substitute(&self, g1: &Self, g2: &Self) -> Self {
        assert_eq!(self.ring, g1.ring, "coefficient domain mismatch");
        assert_eq!(self.ring, g2.ring, "coefficient domain mismatch");
        let mut pow1: Vec<Self> = vec![Self::one(&self.ring)];
        let mut pow2: Vec<Self> = vec![Self::one(&self.ring)];
        let mut out = Self::zero(&self.ring);
        for (e, c) in &self.terms {
            while pow1.len() <= e.a as usize {
                pow1.push(pow1.last().unwrap().mul(g1));
            }
            while pow2.len() <= e.b as usize {
                pow2.push(pow2.last().unwrap().mul(g2));
            }
            let term = pow1[e.a as usize]
                .mul(&pow2[e.b as usize])
                .scale(c);
            out = out.add(&term);
        }
        out
    }

    /// Map coefficients into another ring, dropping zero images.
    pub fn map_coeffs<S: Ring>(&self, target: &S, f: impl Fn(&R::Elem) -> S::Elem) -> BiPoly<S> {
        let mut out = BiPoly::zero(target);
        for (e, c) in &self.terms {
            out.set(*e, f(c));
        }
        out
    }

    /// Fallible coefficient map.
    pub fn try_map_coeffs<S: Ring, E>(
        &self,
        target: &S,
        mut f: impl FnMut(&R::Elem) -> std::result::Result<S::Elem, E>,
    ) -> std::result::Result<BiPoly<S>, E> {
        let mut out = BiPoly::zero(target);
        for (e, c) in &self.terms {
            out.set(*e, f(c)?);
        }
        Ok(out)
    }

    /// Canonical comparison: term-by-term from the leading end.
    pub fn cmp_canonical(&self, other: &Self) -> Ordering {
        let mut it1 = self.terms.iter().rev();
        let mut it2 = other.terms.iter().rev();
        loop {
            match (it1.next(), it2.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((e1, c1)), Some((e2, c2))) => {
                    match e1.cmp(e2).then_with(|| self.ring.cmp_elem(c1, c2)) {
                        Ordering::Equal => {}
                        o => return o,
                    }
                }
            }
        }
    }
}

/// Determinant of the Jacobian matrix of an image pair.
pub fn jacobian_det<R: Ring>(f1: &BiPoly<R>, f2: &BiPoly<R>) -> BiPoly<R> {
    let a = f1.derivative(1).mul(&f2.derivative(2));
    let b = f1.derivative(2).mul(&f2.derivative(1));
    a.sub(&b)
}

impl<F: Field> BiPoly<PolyRing<F>> {
    /// Monic gcd of all coefficients; zero polynomial has content zero.
    pub fn content(&self) -> UniPoly<F> {
        let ring = &self.ring;
        let mut g = ring.zero();
        for (_, c) in self.terms() {
            g = ring.gcd(&g, c);
            if ring.is_one(&g) {
                break;
            }
        }
        g
    }

    /// Split f = content * primitive with monic content.
    pub fn content_primitive(&self) -> Result<(UniPoly<F>, Self)> {
        if self.is_zero() {
            return Err(Error::FactorZero);
        }
        let c = self.content();
        let prim = self.try_map_coeffs(&self.ring, |x| self.ring.div_exact(x, &c))?;
        Ok((c, prim))
    }

    /// Reduce coefficients modulo the modulus of kappa.
    pub fn residue(&self, kappa: &ExtField<F>) -> BiPoly<ExtField<F>> {
        self.map_coeffs(kappa, |c| kappa.reduce(c))
    }
}

impl<F: Field> BiPoly<ExtField<F>> {
    /// Lift canonical representatives back to k[t].
    pub fn lift(&self, ring: &PolyRing<F>) -> BiPoly<PolyRing<F>> {
        self.map_coeffs(ring, |c| c.clone())
    }
}

impl<R: Ring> fmt::Display for BiPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff = format!("{}", self.ring.show(c));
            let atomic = !coeff.contains('+') && !coeff.contains(' ');
            let is_one = coeff == "1";
            let mut wrote_factor = false;
            if e.total() == 0 || !is_one {
                if atomic {
                    write!(f, "{coeff}")?;
                } else {
                    write!(f, "({coeff})")?;
                }
                wrote_factor = true;
            }
            for (sym, k) in [("x1", e.a), ("x2", e.b)] {
                if k == 0 {
                    continue;
                }
                if wrote_factor {
                    write!(f, "*")?;
                }
                wrote_factor = true;
                if k == 1 {
                    write!(f, "{sym}")?;
                } else {
                    write!(f, "{sym}^{k}")?;
                }
            }
        }
        Ok(())
    }
}

/// Apply the ring endomorphism x_i -> images_i to f.
pub fn poly_substitute<R: Ring>(f: &BiPoly<R>, g1: &BiPoly<R>, g2: &BiPoly<R>) -> BiPoly<R> {
    f.substitute(g1, g2)
}

/// Embed a polynomial with k[t] coefficients into k(t)[x1, x2].
pub fn poly_to_frac<F: Field>(
    f: &BiPoly<PolyRing<F>>,
    frac: &crate::ratfunc::FracRing<F>,
) -> BiPoly<crate::ratfunc::FracRing<F>> {
    f.map_coeffs(frac, |c| frac.from_poly(c.clone()))
}

/// Restrict a k(t)-coefficient polynomial to k[t] when every denominator
/// is trivial.
pub fn frac_to_poly<F: Field>(
    f: &BiPoly<crate::ratfunc::FracRing<F>>,
    poly: &PolyRing<F>,
) -> Option<BiPoly<PolyRing<F>>> {
    f.try_map_coeffs(poly, |c| f.ring.to_poly(c).ok_or(()))
        .ok()
}

/// Embed k-coefficients into any k-algebra.
pub fn scalar_to_algebra<F: Field, R: KAlgebra<F>>(
    f: &BiPoly<F>,
    target: &R,
) -> BiPoly<R> {
    f.map_coeffs(target, |c| target.embed_scalar(c))
}

/// Restrict to k-coefficients when every coefficient is scalar.
pub fn algebra_to_scalar<F: Field, R: KAlgebra<F>>(f: &BiPoly<R>) -> Option<BiPoly<F>> {
    let base = f.ring.base_field().clone();
    f.try_map_coeffs(&base, |c| f.ring.try_scalar(c).ok_or(()))
        .ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::PrimeField;

    fn rt() -> PolyRing<PrimeField> {
        PolyRing::new(PrimeField::new(7).unwrap())
    }

    #[test]
    fn grlex_leading_term_prefers_total_degree_then_x1() {
        let r = rt();
        let one = r.one();
        let mut f = BiPoly::zero(&r);
        f.set(Expo { a: 2, b: 0 }, one.clone());
        f.set(Expo { a: 0, b: 3 }, one.clone());
        f.set(Expo { a: 1, b: 2 }, one.clone());
        let (lead, _) = f.leading().unwrap();
        assert_eq!(*lead, Expo { a: 1, b: 2 });
    }

    #[test]
    fn substitution_matches_hand_expansion() {
        // x2^2 under (x1, x2 + x1^2) -> x2^2 + 2 x1^2 x2 + x1^4
        let r = rt();
        let x1 = BiPoly::var(&r, 1);
        let x2 = BiPoly::var(&r, 2);
        let f = x2.pow(2);
        let image = f.substitute(&x1, &x2.add(&x1.pow(2)));
        let expected = x2
            .pow(2)
            .add(&x1.pow(2).mul(&x2).scale(&r.constant(2)))
            .add(&x1.pow(4));
        assert_eq!(image, expected);
    }

    #[test]
    fn jacobian_of_elementary_map() {
        // (x1, 2 x2 + t x1^3) has jacobian determinant 2
        let r = rt();
        let x1 = BiPoly::var(&r, 1);
        let x2 = BiPoly::var(&r, 2);
        let f2 = x2.scale(&r.constant(2)).add(&x1.pow(3).scale(&r.var()));
        let det = jacobian_det(&x1, &f2);
        assert_eq!(det, BiPoly::constant(&r, r.constant(2)));
    }

    #[test]
    fn content_primitive_splits_and_recombines() {
        let r = rt();
        let t = r.var();
        let x1 = BiPoly::var(&r, 1);
        let x2 = BiPoly::var(&r, 2);
        // t*x1 + t^2*x2 -> content t, primitive x1 + t*x2
        let f = x1.scale(&t).add(&x2.scale(&r.mul(&t, &t)));
        let (c, prim) = f.content_primitive().unwrap();
        assert_eq!(c, t);
        assert_eq!(prim, x1.add(&x2.scale(&t)));
        assert_eq!(prim.mul(&BiPoly::constant(&r, c)), f);
        assert!(r.is_one(&prim.content()));
    }

    #[test]
    fn residue_and_lift_round_trip() {
        let r = rt();
        let kappa = ExtField::new(r.clone(), r.poly(vec![1, 0, 1])).unwrap();
        let x1 = BiPoly::var(&r, 1);
        let f = x1.scale(&r.var());
        let res = f.residue(&kappa);
        let back = res.lift(&r);
        assert_eq!(back, f);
        // (t^2 + 1) * x1 reduces to zero
        let g = x1.scale(&r.poly(vec![1, 0, 1]));
        assert!(g.residue(&kappa).is_zero());
        // under t - 2 the coefficient t^2 + 1 evaluates to 5
        let lin = ExtField::new(r.clone(), r.poly(vec![5, 1])).unwrap();
        let res2 = g.residue(&lin);
        assert_eq!(res2, BiPoly::var(&lin, 1).scale(&lin.embed_scalar(&5)));
    }

    #[test]
    fn zero_polynomial_has_no_degree() {
        let r = rt();
        assert_eq!(BiPoly::zero(&r).total_degree(), None);
        assert_eq!(BiPoly::one(&r).total_degree(), Some(0));
    }

    #[test]
    fn display_uses_grammar() {
        let r = rt();
        let x1 = BiPoly::var(&r, 1);
        let x2 = BiPoly::var(&r, 2);
        let f = x2
            .scale(&r.constant(2))
            .add(&x1.pow(3).scale(&r.var()))
            .add(&BiPoly::one(&r));
        assert_eq!(format!("{f}"), "t*x1^3 + 2*x2 + 1");
    }
}
