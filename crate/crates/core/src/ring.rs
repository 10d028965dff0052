//! Ring and field traits. Arithmetic is dispatched through a small ring
//! object so that towers like k, k[t], k(t) and k[t]/(pi) share one
//! interface; elements themselves are plain data.

use std::cmp::Ordering;
use std::fmt;

use crate::error::Result;

/// A commutative ring with identity. The ring object owns whatever runtime
/// data is needed (modulus, base field, ...); elements are inert values.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    /// Total order used only for canonical sorting and printing.
    fn cmp_elem(&self, a: &Self::Elem, b: &Self::Elem) -> Ordering;

    fn fmt_elem(&self, a: &Self::Elem, f: &mut fmt::Formatter<'_>) -> fmt::Result;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// Image of a signed integer under the canonical map from Z.
    fn from_i64(&self, n: i64) -> Self::Elem {
        let neg = n < 0;
        let mut m = n.unsigned_abs();
        let mut acc = self.zero();
        let mut base = self.one();
        while m > 0 {
            if m & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            m >>= 1;
        }
        if neg {
            self.neg(&acc)
        } else {
            acc
        }
    }

    /// Nonnegative power by repeated squaring.
    fn pow(&self, a: &Self::Elem, e: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Wrap an element for display.
    fn show(&self, a: &Self::Elem) -> ElemDisplay<'_, Self> {
        ElemDisplay { ring: self, elem: a.clone() }
    }
}

/// A field: every nonzero element is invertible.
pub trait Field: Ring {
    /// Multiplicative inverse. Errors on zero.
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Power with signed exponent.
    fn pow_i(&self, a: &Self::Elem, e: i64) -> Result<Self::Elem> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(&self.inv(a)?, e.unsigned_abs()))
        }
    }
}

/// An algebra over a ground field k with a canonical embedding of scalars
/// and a partial inverse that recognises embedded scalars.
pub trait KAlgebra<F: Field>: Ring {
    fn base_field(&self) -> &F;
    fn embed_scalar(&self, c: &F::Elem) -> Self::Elem;
    /// Some(c) exactly when the element is the image of the scalar c.
    fn try_scalar(&self, a: &Self::Elem) -> Option<F::Elem>;
}

/// Display adapter returned by [`Ring::show`].
pub struct ElemDisplay<'r, R: Ring + ?Sized> {
    ring: &'r R,
    elem: R::Elem,
}

impl<R: Ring> fmt::Display for ElemDisplay<'_, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ring.fmt_elem(&self.elem, f)
    }
}
