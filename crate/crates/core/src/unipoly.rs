//! Dense univariate polynomials over a field, used for the coefficient
//! ring k[t] and everything built on it.
//!
//! Invariant: the coefficient vector is empty (the zero polynomial) or its
//! last entry is nonzero.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::ring::{Field, KAlgebra, Ring};

#[derive(Clone, PartialEq, Debug)]
pub struct UniPoly<F: Ring> {
    /// Coefficients by ascending degree.
    coeffs: Vec<F::Elem>,
}

impl<F: Ring> UniPoly<F> {
    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Total degree; None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&F::Elem> {
        self.coeffs.last()
    }
}

/// The polynomial ring F[t] as a ring object.
#[derive(Clone, PartialEq, Debug)]
pub struct PolyRing<F: Field> {
    pub base: F,
}

impl<F: Field> PolyRing<F> {
    pub fn new(base: F) -> Self {
        PolyRing { base }
    }

    pub fn poly(&self, mut coeffs: Vec<F::Elem>) -> UniPoly<F> {
        while coeffs.last().is_some_and(|c| self.base.is_zero(c)) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn constant(&self, c: F::Elem) -> UniPoly<F> {
        self.poly(vec![c])
    }

    /// The variable t.
    pub fn var(&self) -> UniPoly<F> {
        self.poly(vec![self.base.zero(), self.base.one()])
    }

    /// c * t^k
    pub fn term(&self, c: F::Elem, k: usize) -> UniPoly<F> {
        let mut v = vec![self.base.zero(); k + 1];
        v[k] = c;
        self.poly(v)
    }

    pub fn coeff(&self, a: &UniPoly<F>, k: usize) -> F::Elem {
        a.coeffs.get(k).cloned().unwrap_or_else(|| self.base.zero())
    }

    pub fn eval(&self, a: &UniPoly<F>, x: &F::Elem) -> F::Elem {
        let mut acc = self.base.zero();
        for c in a.coeffs.iter().rev() {
            acc = self.base.add(&self.base.mul(&acc, x), c);
        }
        acc
    }

    pub fn derivative(&self, a: &UniPoly<F>) -> UniPoly<F> {
        if a.coeffs.len() <= 1 {
            return self.zero();
        }
        let v = a
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| self.base.mul(&self.base.from_i64(k as i64), c))
            .collect();
        self.poly(v)
    }

    pub fn scale(&self, a: &UniPoly<F>, c: &F::Elem) -> UniPoly<F> {
        self.poly(a.coeffs.iter().map(|x| self.base.mul(x, c)).collect())
    }

    pub fn is_monic(&self, a: &UniPoly<F>) -> bool {
        a.leading().is_some_and(|c| self.base.is_one(c))
    }

    /// Monic normalization. Errors on zero.
    pub fn monic(&self, a: &UniPoly<F>) -> Result<UniPoly<F>> {
        let lead = a.leading().ok_or(Error::DivisionByZero)?;
        Ok(self.scale(a, &self.base.inv(lead)?))
    }

    /// Euclidean division: a = q*b + r with deg r < deg b. Errors when b = 0.
    pub fn div_rem(&self, a: &UniPoly<F>, b: &UniPoly<F>) -> Result<(UniPoly<F>, UniPoly<F>)> {
        let db = b.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = self.base.inv(b.leading().unwrap())?;
        let mut rem = a.coeffs.clone();
        if rem.len() <= db {
            return Ok((self.zero(), a.clone()));
        }
        let mut quot = vec![self.base.zero(); rem.len() - db];
        while rem.len() > db {
            let c = self.base.mul(rem.last().unwrap(), &lead_inv);
            let k = rem.len() - 1 - db;
            if !self.base.is_zero(&c) {
                quot[k] = c.clone();
                for (i, bc) in b.coeffs.iter().enumerate() {
                    let t = self.base.mul(&c, bc);
                    rem[k + i] = self.base.sub(&rem[k + i], &t);
                }
            }
            rem.pop();
            while rem.last().is_some_and(|c| self.base.is_zero(c)) {
                rem.pop();
            }
            if rem.len() <= db {
                break;
            }
        }
        Ok((self.poly(quot), self.poly(rem)))
    }

    /// Exact division; errors when the remainder is nonzero.
    pub fn div_exact(&self, a: &UniPoly<F>, b: &UniPoly<F>) -> Result<UniPoly<F>> {
        let (q, r) = self.div_rem(a, b)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::Internal("inexact univariate division".into()))
        }
    }

    /// Monic greatest common divisor; gcd(0, 0) = 0.
    pub fn gcd(&self, a: &UniPoly<F>, b: &UniPoly<F>) -> UniPoly<F> {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let (_, r) = self.div_rem(&x, &y).expect("nonzero divisor");
            x = y;
            y = r;
        }
        if x.is_zero() {
            x
        } else {
            self.monic(&x).expect("nonzero")
        }
    }

    /// Extended gcd: returns (g, s, u) with g = s*a + u*b, g monic or zero.
    pub fn extended_gcd(
        &self,
        a: &UniPoly<F>,
        b: &UniPoly<F>,
    ) -> (UniPoly<F>, UniPoly<F>, UniPoly<F>) {
        let mut r0 = a.clone();
        let mut r1 = b.clone();
        let mut s0 = self.one();
        let mut s1 = self.zero();
        let mut t0 = self.zero();
        let mut t1 = self.one();
        while !r1.is_zero() {
            let (q, r) = self.div_rem(&r0, &r1).expect("nonzero divisor");
            let ns = self.sub(&s0, &self.mul(&q, &s1));
            let nt = self.sub(&t0, &self.mul(&q, &t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = ns;
            t0 = t1;
            t1 = nt;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let lead_inv = self.base.inv(r0.leading().unwrap()).expect("nonzero lead");
        (
            self.scale(&r0, &lead_inv),
            self.scale(&s0, &lead_inv),
            self.scale(&t0, &lead_inv),
        )
    }

    pub fn lcm(&self, a: &UniPoly<F>, b: &UniPoly<F>) -> UniPoly<F> {
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        let g = self.gcd(a, b);
        let q = self.div_exact(a, &g).expect("gcd divides");
        self.monic(&self.mul(&q, b)).expect("nonzero")
    }

    /// Substitute t -> t^e. Used by square-free decomposition in char p.
    pub fn inflate(&self, a: &UniPoly<F>, e: usize) -> UniPoly<F> {
        if a.is_zero() || e == 1 {
            return a.clone();
        }
        let mut v = vec![self.base.zero(); (a.coeffs.len() - 1) * e + 1];
        for (k, c) in a.coeffs.iter().enumerate() {
            v[k * e] = c.clone();
        }
        self.poly(v)
    }

    /// a^e mod m
    pub fn pow_mod(&self, a: &UniPoly<F>, mut e: u64, m: &UniPoly<F>) -> Result<UniPoly<F>> {
        let mut acc = self.one();
        let mut base = self.div_rem(a, m)?.1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.div_rem(&self.mul(&acc, &base), m)?.1;
            }
            base = self.div_rem(&self.mul(&base, &base), m)?.1;
            e >>= 1;
        }
        Ok(acc)
    }
}

impl<F: Field> Ring for PolyRing<F> {
    type Elem = UniPoly<F>;

    fn zero(&self) -> UniPoly<F> {
        UniPoly { coeffs: Vec::new() }
    }

    fn one(&self) -> UniPoly<F> {
        UniPoly { coeffs: vec![self.base.one()] }
    }

    fn add(&self, a: &UniPoly<F>, b: &UniPoly<F>) -> UniPoly<F> {
        let n = a.coeffs.len().max(b.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            let x = match (a.coeffs.get(k), b.coeffs.get(k)) {
                (Some(x), Some(y)) => self.base.add(x, y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => unreachable!(),
            };
            v.push(x);
        }
        self.poly(v)
    }

    fn neg(&self, a: &UniPoly<F>) -> UniPoly<F> {
        UniPoly { coeffs: a.coeffs.iter().map(|c| self.base.neg(c)).collect() }
    }

    fn mul(&self, a: &UniPoly<F>, b: &UniPoly<F>) -> UniPoly<F> {
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        let mut v = vec![self.base.zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                let t = self.base.mul(x, y);
                v[i + j] = self.base.add(&v[i + j], &t);
            }
        }
        self.poly(v)
    }

    fn is_zero(&self, a: &UniPoly<F>) -> bool {
        a.is_zero()
    }

    fn cmp_elem(&self, a: &UniPoly<F>, b: &UniPoly<F>) -> Ordering {
        match a.coeffs.len().cmp(&b.coeffs.len()) {
            Ordering::Equal => {}
            o => return o,
        }
        for (x, y) in a.coeffs.iter().rev().zip(b.coeffs.iter().rev()) {
            match self.base.cmp_elem(x, y) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }

    fn fmt_elem(&self, a: &UniPoly<F>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if a.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in a.coeffs.iter().enumerate().rev() {
            if self.base.is_zero(c) {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            let is_one = self.base.is_one(c);
            if k == 0 || !is_one {
                self.base.fmt_elem(c, f)?;
                if k > 0 {
                    write!(f, "*")?;
                }
            }
            match k {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{k}")?,
            }
        }
        Ok(())
    }
}

impl<F: Field> KAlgebra<F> for PolyRing<F> {
    fn base_field(&self) -> &F {
        &self.base
    }
    fn embed_scalar(&self, c: &F::Elem) -> UniPoly<F> {
        self.constant(c.clone())
    }
    fn try_scalar(&self, a: &UniPoly<F>) -> Option<F::Elem> {
        match a.coeffs.len() {
            0 => Some(self.base.zero()),
            1 => Some(a.coeffs[0].clone()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::PrimeField;

    fn gf7() -> PolyRing<PrimeField> {
        PolyRing::new(PrimeField::new(7).unwrap())
    }

    #[test]
    fn division_round_trips() {
        let r = gf7();
        // a = t^5 + 3t^2 + 1, b = 2t^2 + t
        let a = r.poly(vec![1, 0, 3, 0, 0, 1]);
        let b = r.poly(vec![0, 1, 2]);
        let (q, rem) = r.div_rem(&a, &b).unwrap();
        assert_eq!(r.add(&r.mul(&q, &b), &rem), a);
        assert!(rem.degree() < b.degree());
    }

    #[test]
    fn gcd_is_monic_common_divisor() {
        let r = gf7();
        let a = r.poly(vec![6, 1]); // t + 6 = t - 1
        let b = r.poly(vec![1, 1]); // t + 1
        let f = r.mul(&a, &a);
        let g = r.mul(&a, &b);
        let d = r.gcd(&f, &g);
        assert_eq!(d, a);
        let (gg, s, u) = r.extended_gcd(&f, &g);
        assert_eq!(gg, d);
        assert_eq!(r.add(&r.mul(&s, &f), &r.mul(&u, &g)), d);
    }

    #[test]
    fn eval_by_horner() {
        let r = gf7();
        let a = r.poly(vec![1, 0, 1]); // t^2 + 1
        assert_eq!(r.eval(&a, &2), 5);
        assert_eq!(r.eval(&a, &0), 1);
    }

    #[test]
    fn derivative_in_char_p_kills_t_powers_of_p() {
        let r = gf7();
        let a = r.inflate(&r.var(), 7); // t^7
        assert!(r.derivative(&a).is_zero());
    }

    #[test]
    fn display_is_descending_with_carets() {
        let r = gf7();
        let a = r.poly(vec![5, 0, 3, 1]);
        assert_eq!(format!("{}", r.show(&a)), "t^3+3*t^2+5");
    }
}
