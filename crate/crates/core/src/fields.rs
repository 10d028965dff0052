//! Ground fields: GF(p) with p prime below 2^32, and the rationals.
//! Both expose the unit-group structure needed by the character lattice:
//! a torsion part (discrete logarithms for GF(p), the sign for Q) and,
//! for Q, a free part given by prime exponents.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num::bigint::{BigInt, Sign};
use num::{BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ring::{Field, KAlgebra, Ring};

/// Multiplicative data of a unit: exponents over a free basis of primes
/// (empty for finite fields) plus a torsion coordinate modulo
/// [`UnitGroup::torsion_modulus`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitCode {
    pub free: BTreeMap<u64, i64>,
    pub torsion: i64,
}

/// Hooks a ground field must provide for the lattice and search machinery.
pub trait UnitGroup: Field {
    /// Order of the torsion subgroup of the units: p-1 for GF(p), 2 for Q.
    fn torsion_modulus(&self) -> u64;
    /// Encode a unit into its multiplicative coordinates. Errors on zero.
    fn encode_unit(&self, a: &Self::Elem) -> Result<UnitCode>;
    /// A primitive d-th root of unity, if the field has one.
    fn primitive_root_of_unity(&self, d: u64) -> Option<Self::Elem>;
    /// Multiplicative order; None when infinite.
    fn unit_order(&self, a: &Self::Elem) -> Option<u64>;
    /// Exact square root, if one exists in the field.
    fn sqrt(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// All nonzero elements when there are at most `cap` of them. Used by
    /// small exhaustive searches; None signals "too many to enumerate".
    fn unit_candidates(&self, cap: usize) -> Option<Vec<Self::Elem>>;
}

// ---- GF(p) ----

type BabyTable = HashMap<u64, u64>;

/// The prime field GF(p), p < 2^32, with a verified generator of the unit
/// group and a lazily built baby-step table for discrete logarithms.
#[derive(Clone)]
pub struct PrimeField {
    p: u64,
    g: u64,
    /// Prime factors of p-1, ascending, without multiplicity.
    cofactors: Vec<u64>,
    baby: Arc<OnceLock<BabyTable>>,
}

impl PartialEq for PrimeField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.g == other.g
    }
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factors of n, ascending, without multiplicity.
pub fn prime_factors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl PrimeField {
    /// Build GF(p). Verifies primality, the bound p < 2^32, and that the
    /// chosen generator g has g^((p-1)/q) != 1 for every prime q | p-1.
    pub fn new(p: u64) -> Result<Self> {
        if p >= (1u64 << 32) {
            return Err(Error::PrimeTooLarge(p));
        }
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        let cofactors = prime_factors_u64(p - 1);
        let mut g = 1u64;
        if p > 2 {
            g = (2..p)
                .find(|&c| {
                    cofactors
                        .iter()
                        .all(|&q| pow_mod(c, (p - 1) / q, p) != 1)
                })
                .ok_or_else(|| Error::Internal(format!("no generator for GF({p})")))?;
        }
        Ok(PrimeField { p, g, cofactors, baby: Arc::new(OnceLock::new()) })
    }

    pub fn order(&self) -> u64 {
        self.p
    }

    /// The verified generator of GF(p)*.
    pub fn generator(&self) -> u64 {
        self.g
    }

    pub fn elem(&self, n: i64) -> u64 {
        let p = self.p as i64;
        n.rem_euclid(p) as u64
    }

    /// Discrete logarithm base the field generator, by baby-step giant-step.
    /// The baby table is built once per field value.
    pub fn dlog(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::NotAUnit("0".into()));
        }
        if self.p == 2 {
            return Ok(0);
        }
        let n = self.p - 1;
        let m = (n as f64).sqrt().ceil() as u64;
        let baby = self.baby.get_or_init(|| {
            let mut t = HashMap::with_capacity(m as usize);
            let mut cur = 1u64;
            for j in 0..m {
                t.entry(cur).or_insert(j);
                cur = cur * self.g % self.p;
            }
            t
        });
        // giant = g^(-m)
        let giant = pow_mod(
            pow_mod(self.g, self.p - 2, self.p),
            m,
            self.p,
        );
        let mut cur = a % self.p;
        for i in 0..=m {
            if let Some(&j) = baby.get(&cur) {
                return Ok((i * m + j) % n);
            }
            cur = cur * giant % self.p;
        }
        Err(Error::Internal(format!("dlog of {a} not found in GF({})", self.p)))
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

impl Ring for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn cmp_elem(&self, a: &u64, b: &u64) -> Ordering {
        a.cmp(b)
    }
    fn fmt_elem(&self, a: &u64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{a}")
    }
}

impl Field for PrimeField {
    fn inv(&self, a: &u64) -> Result<u64> {
        if *a == 0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(pow_mod(*a, self.p - 2, self.p))
        }
    }
}

impl UnitGroup for PrimeField {
    fn torsion_modulus(&self) -> u64 {
        self.p - 1
    }

    fn encode_unit(&self, a: &u64) -> Result<UnitCode> {
        Ok(UnitCode { free: BTreeMap::new(), torsion: self.dlog(*a)? as i64 })
    }

    fn primitive_root_of_unity(&self, d: u64) -> Option<u64> {
        if d == 0 || (self.p - 1) % d != 0 {
            return None;
        }
        Some(pow_mod(self.g, (self.p - 1) / d, self.p))
    }

    fn unit_order(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        let mut ord = self.p - 1;
        for &q in &self.cofactors {
            while ord % q == 0 && pow_mod(*a, ord / q, self.p) == 1 {
                ord /= q;
            }
        }
        Some(ord)
    }

    fn sqrt(&self, a: &u64) -> Option<u64> {
        let p = self.p;
        let a = *a % p;
        if a == 0 || p == 2 {
            return Some(a);
        }
        if pow_mod(a, (p - 1) / 2, p) != 1 {
            return None;
        }
        if p % 4 == 3 {
            return Some(pow_mod(a, (p + 1) / 4, p));
        }
        // Tonelli-Shanks for p = 1 mod 4.
        let mut q = p - 1;
        let mut s = 0u32;
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let z = (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)?;
        let mut m = s;
        let mut c = pow_mod(z, q, p);
        let mut t = pow_mod(a, q, p);
        let mut r = pow_mod(a, (q + 1) / 2, p);
        while t != 1 {
            let mut i = 0u32;
            let mut tt = t;
            while tt != 1 {
                tt = tt * tt % p;
                i += 1;
                if i == m {
                    return None;
                }
            }
            let b = pow_mod(c, 1 << (m - i - 1), p);
            m = i;
            c = b * b % p;
            t = t * c % p;
            r = r * b % p;
        }
        Some(r)
    }

    fn unit_candidates(&self, cap: usize) -> Option<Vec<u64>> {
        if (self.p - 1) as usize > cap {
            return None;
        }
        Some((1..self.p).collect())
    }
}

// ---- Q ----

/// The field of rational numbers with exact big-integer arithmetic.
#[derive(Clone, PartialEq, Default)]
pub struct Rationals;

impl fmt::Debug for Rationals {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QQ")
    }
}

impl Ring for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn cmp_elem(&self, a: &BigRational, b: &BigRational) -> Ordering {
        a.cmp(b)
    }
    fn fmt_elem(&self, a: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{a}")
    }
}

impl Field for Rationals {
    fn inv(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(a.recip())
        }
    }
}

/// Trial-divide |n| into primes. Errors when a cofactor above the trial
/// bound remains, which desk-scale inputs never produce.
fn factor_bigint(n: &BigInt) -> Result<BTreeMap<u64, i64>> {
    let mut out = BTreeMap::new();
    let mut m = n.abs();
    if m.is_zero() {
        return Err(Error::NotAUnit("0".into()));
    }
    let one: BigInt = BigInt::one();
    let mut d = 2u64;
    while m > one {
        let bd = BigInt::from(d);
        if (&bd * &bd) > m {
            break;
        }
        while (&m % &bd).is_zero() {
            *out.entry(d).or_insert(0) += 1;
            m /= &bd;
        }
        d += if d == 2 { 1 } else { 2 };
        if d > 1_000_000 {
            break;
        }
    }
    if m > one {
        let (sign, digits) = m.to_u64_digits();
        if sign == Sign::Plus && digits.len() == 1 {
            *out.entry(digits[0]).or_insert(0) += 1;
        } else {
            return Err(Error::Unsupported(format!(
                "rational entry has a prime factor above the trial bound: {m}"
            )));
        }
    }
    Ok(out)
}

impl UnitGroup for Rationals {
    fn torsion_modulus(&self) -> u64 {
        2
    }

    fn encode_unit(&self, a: &BigRational) -> Result<UnitCode> {
        if a.is_zero() {
            return Err(Error::NotAUnit("0".into()));
        }
        let mut free = factor_bigint(a.numer())?;
        for (p, e) in factor_bigint(a.denom())? {
            *free.entry(p).or_insert(0) -= e;
        }
        free.retain(|_, e| *e != 0);
        Ok(UnitCode { free, torsion: i64::from(a.is_negative()) })
    }

    fn primitive_root_of_unity(&self, d: u64) -> Option<BigRational> {
        match d {
            1 => Some(BigRational::one()),
            2 => Some(-BigRational::one()),
            _ => None,
        }
    }

    fn unit_order(&self, a: &BigRational) -> Option<u64> {
        if a.is_one() {
            Some(1)
        } else if (-a).is_one() {
            Some(2)
        } else {
            None
        }
    }

    fn sqrt(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_negative() {
            return None;
        }
        let n = a.numer().sqrt();
        let d = a.denom().sqrt();
        let cand = BigRational::new(n, d);
        if &cand * &cand == *a {
            Some(cand)
        } else {
            None
        }
    }

    fn unit_candidates(&self, _cap: usize) -> Option<Vec<BigRational>> {
        None
    }
}

// The ground fields are trivial algebras over themselves, which lets the
// grading machinery treat the coefficient ring and the scalar field
// uniformly. A blanket impl would make scalar embedding ambiguous for
// extension and fraction fields, so only the ground fields get one.
macro_rules! reflexive_algebra {
    ($t:ty) => {
        impl KAlgebra<$t> for $t {
            fn base_field(&self) -> &$t {
                self
            }
            fn embed_scalar(&self, c: &<$t as Ring>::Elem) -> <$t as Ring>::Elem {
                c.clone()
            }
            fn try_scalar(&self, a: &<$t as Ring>::Elem) -> Option<<$t as Ring>::Elem> {
                Some(a.clone())
            }
        }
    };
}

reflexive_algebra!(PrimeField);
reflexive_algebra!(Rationals);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf7_generator_is_verified_primitive() {
        let f = PrimeField::new(7).unwrap();
        // 3 is the least generator of GF(7)*: 3^2 = 2, 3^3 = 6, both != 1.
        assert_eq!(f.generator(), 3);
        for q in [2u64, 3] {
            assert_ne!(f.pow(&f.generator(), 6 / q), 1);
        }
    }

    #[test]
    fn rejects_non_prime_and_oversized_orders() {
        assert!(matches!(PrimeField::new(6), Err(Error::NotPrime(6))));
        assert!(matches!(PrimeField::new(1u64 << 33), Err(Error::PrimeTooLarge(_))));
    }

    #[test]
    fn dlog_round_trips_over_gf31() {
        let f = PrimeField::new(31).unwrap();
        for a in 1..31u64 {
            let e = f.dlog(a).unwrap();
            assert_eq!(pow_mod(f.generator(), e, 31), a);
        }
    }

    #[test]
    fn unit_orders_match_brute_force() {
        let f = PrimeField::new(13).unwrap();
        for a in 1..13u64 {
            let mut ord = 1u64;
            let mut cur = a;
            while cur != 1 {
                cur = cur * a % 13;
                ord += 1;
            }
            assert_eq!(f.unit_order(&a), Some(ord));
        }
    }

    #[test]
    fn sqrt_agrees_with_squaring() {
        for p in [2u64, 3, 7, 13, 31, 29] {
            let f = PrimeField::new(p).unwrap();
            for a in 0..p {
                let sq = a * a % p;
                let r = f.sqrt(&sq).expect("square must have a root");
                assert_eq!(r * r % p, sq);
            }
        }
    }

    #[test]
    fn rational_unit_code_tracks_primes_and_sign() {
        let q = Rationals;
        let x = BigRational::new(BigInt::from(-12), BigInt::from(35));
        let code = q.encode_unit(&x).unwrap();
        let expected: BTreeMap<u64, i64> =
            [(2, 2), (3, 1), (5, -1), (7, -1)].into_iter().collect();
        assert_eq!(code.free, expected);
        assert_eq!(code.torsion, 1);
    }

    #[test]
    fn rational_roots_of_unity_are_plus_minus_one() {
        let q = Rationals;
        assert_eq!(q.primitive_root_of_unity(2), Some(-BigRational::one()));
        assert_eq!(q.primitive_root_of_unity(3), None);
        assert_eq!(q.unit_order(&BigRational::from(BigInt::from(5))), None);
    }
}
