//! Univariate factorization into monic irreducibles.
//!
//! Over GF(p) this is the full square-free / distinct-degree /
//! Cantor-Zassenhaus chain. Over Q only rational roots and small cofactors
//! (degree at most three) are handled, which covers the determinant
//! factorizations that arise at desk scale; larger cofactors error out
//! rather than guess.

use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fields::{PrimeField, Rationals, UnitGroup};
use crate::ring::{Field, KAlgebra, Ring};
use crate::unipoly::{PolyRing, UniPoly};

/// f = unit * prod factors[i].0 ^ factors[i].1 with monic irreducible
/// factors sorted by degree then coefficient order.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization<F: Field> {
    pub unit: F::Elem,
    pub factors: Vec<(UniPoly<F>, u32)>,
}

impl<F: Field> Factorization<F> {
    /// Multiply the factorization back together.
    pub fn expand(&self, ring: &PolyRing<F>) -> UniPoly<F> {
        let mut acc = ring.constant(self.unit.clone());
        for (f, m) in &self.factors {
            for _ in 0..*m {
                acc = ring.mul(&acc, f);
            }
        }
        acc
    }

    /// Number of prime factors counted with multiplicity.
    pub fn length(&self) -> usize {
        self.factors.iter().map(|(_, m)| *m as usize).sum()
    }
}

/// Fields over which monic univariate polynomials can be factored.
pub trait UniFactor: Field {
    fn uni_factor(&self, f: &UniPoly<Self>) -> Result<Factorization<Self>>;

    fn is_irreducible(&self, f: &UniPoly<Self>) -> Result<bool> {
        if f.degree().unwrap_or(0) == 0 {
            return Ok(false);
        }
        let fac = self.uni_factor(f)?;
        Ok(fac.factors.len() == 1 && fac.factors[0].1 == 1)
    }
}

/// Everything the pipeline needs from a ground field k.
pub trait GroundField: Field + UnitGroup + UniFactor + KAlgebra<Self> {}
impl<T: Field + UnitGroup + UniFactor + KAlgebra<T>> GroundField for T {}

fn sort_factors<F: Field>(ring: &PolyRing<F>, factors: &mut Vec<(UniPoly<F>, u32)>) {
    factors.sort_by(|a, b| {
        a.0.degree()
            .cmp(&b.0.degree())
            .then_with(|| ring.cmp_elem(&a.0, &b.0))
    });
}

// ---- GF(p) ----

/// p-th root of a polynomial of the form g(t^p); valid over GF(p) where
/// c^(1/p) = c.
fn pth_root(ring: &PolyRing<PrimeField>, f: &UniPoly<PrimeField>, p: usize) -> UniPoly<PrimeField> {
    let v: Vec<u64> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(k, _)| k % p == 0)
        .map(|(_, c)| *c)
        .collect();
    ring.poly(v)
}

fn squarefree_parts(
    ring: &PolyRing<PrimeField>,
    f: &UniPoly<PrimeField>,
    p: usize,
) -> Vec<(UniPoly<PrimeField>, u32)> {
    let mut out: Vec<(UniPoly<PrimeField>, u32)> = Vec::new();
    let df = ring.derivative(f);
    if df.is_zero() {
        // f = g(t^p) = (p-th root)^p
        let root = pth_root(ring, f, p);
        for (g, m) in squarefree_parts(ring, &root, p) {
            out.push((g, m * p as u32));
        }
        return out;
    }
    let mut c = ring.gcd(f, &df);
    let mut w = ring.div_exact(f, &c).expect("gcd divides");
    let mut i = 1u32;
    while w.degree().unwrap_or(0) > 0 {
        let y = ring.gcd(&w, &c);
        let z = ring.div_exact(&w, &y).expect("gcd divides");
        if z.degree().unwrap_or(0) > 0 {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = ring.div_exact(&c, &w).expect("gcd divides");
    }
    if c.degree().unwrap_or(0) > 0 {
        let root = pth_root(ring, &c, p);
        for (g, m) in squarefree_parts(ring, &root, p) {
            out.push((g, m * p as u32));
        }
    }
    out
}

/// Split a monic square-free product of degree-d irreducibles.
fn equal_degree_split(
    ring: &PolyRing<PrimeField>,
    f: &UniPoly<PrimeField>,
    d: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<UniPoly<PrimeField>>> {
    let n = f.degree().unwrap();
    if n == d {
        return Ok(vec![f.clone()]);
    }
    let p = ring.base.order();
    let q = (p as u128)
        .checked_pow(d as u32)
        .ok_or_else(|| Error::Unsupported("field power overflow in factorization".into()))?;
    loop {
        let mut coeffs = Vec::with_capacity(n);
        for _ in 0..n {
            coeffs.push(rng.random_range(0..p));
        }
        let r = ring.poly(coeffs);
        if r.degree().unwrap_or(0) == 0 {
            continue;
        }
        let s = if p == 2 {
            // trace map over GF(2^d)
            let mut acc = ring.zero();
            let mut cur = ring.div_rem(&r, f)?.1;
            for _ in 0..d {
                acc = ring.add(&acc, &cur);
                cur = ring.div_rem(&ring.mul(&cur, &cur), f)?.1;
            }
            acc
        } else {
            let e = (q - 1) / 2;
            let pow = pow_mod_u128(ring, &r, e, f)?;
            ring.sub(&pow, &ring.one())
        };
        let g = ring.gcd(&s, f);
        let dg = g.degree().unwrap_or(0);
        if dg == 0 || dg == n {
            continue;
        }
        let rest = ring.div_exact(f, &g)?;
        let mut out = equal_degree_split(ring, &g, d, rng)?;
        out.extend(equal_degree_split(ring, &rest, d, rng)?);
        return Ok(out);
    }
}

fn pow_mod_u128(
    ring: &PolyRing<PrimeField>,
    a: &UniPoly<PrimeField>,
    mut e: u128,
    m: &UniPoly<PrimeField>,
) -> Result<UniPoly<PrimeField>> {
    let mut acc = ring.one();
    let mut base = ring.div_rem(a, m)?.1;
    while e > 0 {
        if e & 1 == 1 {
            acc = ring.div_rem(&ring.mul(&acc, &base), m)?.1;
        }
        base = ring.div_rem(&ring.mul(&base, &base), m)?.1;
        e >>= 1;
    }
    Ok(acc)
}

/// Factor a monic square-free polynomial into irreducibles.
fn factor_squarefree(
    ring: &PolyRing<PrimeField>,
    f: &UniPoly<PrimeField>,
) -> Result<Vec<UniPoly<PrimeField>>> {
    let p = ring.base.order();
    let mut out = Vec::new();
    let mut rem = f.clone();
    // distinct-degree stage: h = t^(p^d) mod rem
    let mut h = ring.div_rem(&ring.var(), &rem)?.1;
    let mut d = 0usize;
    // deterministic splitting randomness
    let mut rng = ChaCha8Rng::seed_from_u64(0xA07D ^ p);
    while rem.degree().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = ring.pow_mod(&h, p, &rem)?;
        let g = ring.gcd(&ring.sub(&h, &ring.var()), &rem);
        if g.degree().unwrap_or(0) > 0 {
            out.extend(equal_degree_split(ring, &g, d, &mut rng)?);
            rem = ring.div_exact(&rem, &g)?;
            h = ring.div_rem(&h, &rem)?.1;
        }
    }
    if rem.degree().unwrap_or(0) > 0 {
        out.push(rem);
    }
    Ok(out)
}

impl UniFactor for PrimeField {
    fn uni_factor(&self, f: &UniPoly<Self>) -> Result<Factorization<Self>> {
        let ring = PolyRing::new(self.clone());
        if f.is_zero() {
            return Err(Error::FactorZero);
        }
        let unit = f.leading().copied().unwrap();
        if f.degree() == Some(0) {
            return Ok(Factorization { unit, factors: Vec::new() });
        }
        let monic = ring.monic(f)?;
        let mut factors = Vec::new();
        for (part, mult) in squarefree_parts(&ring, &monic, self.order() as usize) {
            for irr in factor_squarefree(&ring, &part)? {
                factors.push((irr, mult));
            }
        }
        sort_factors(&ring, &mut factors);
        Ok(Factorization { unit, factors })
    }
}

// ---- Q ----

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let code = crate::fields::Rationals.encode_unit(&BigRational::from(n.abs()))?;
    let mut divs = vec![BigInt::one()];
    for (p, e) in code.free {
        let mut next = Vec::new();
        for d in &divs {
            let mut cur = d.clone();
            for _ in 0..=e {
                next.push(cur.clone());
                cur *= BigInt::from(p);
            }
        }
        divs = next;
    }
    Ok(divs)
}

impl UniFactor for Rationals {
    fn uni_factor(&self, f: &UniPoly<Self>) -> Result<Factorization<Self>> {
        let ring = PolyRing::new(Rationals);
        if f.is_zero() {
            return Err(Error::FactorZero);
        }
        let unit = f.leading().cloned().unwrap();
        let mut factors: Vec<(UniPoly<Rationals>, u32)> = Vec::new();
        let mut rem = ring.monic(f)?;
        // strip powers of t
        let mut tmult = 0u32;
        while rem.degree().unwrap_or(0) > 0 && rem.coeffs()[0].is_zero() {
            rem = ring.div_exact(&rem, &ring.var())?;
            tmult += 1;
        }
        if tmult > 0 {
            factors.push((ring.var(), tmult));
        }
        if rem.degree().unwrap_or(0) > 0 {
            // integer model: clear denominators for the root bound
            let mut den = BigInt::one();
            for c in rem.coeffs() {
                let g = num::Integer::gcd(&den, c.denom());
                den = &den / &g * c.denom();
            }
            let ints: Vec<BigInt> = rem
                .coeffs()
                .iter()
                .map(|c| (c * BigRational::from(den.clone())).to_integer())
                .collect();
            let a0 = ints[0].clone();
            let an = ints.last().unwrap().clone();
            let mut candidates = Vec::new();
            for num_d in divisors(&a0)? {
                for den_d in divisors(&an)? {
                    let r = BigRational::new(num_d.clone(), den_d.clone());
                    candidates.push(r.clone());
                    candidates.push(-r);
                }
            }
            candidates.sort();
            candidates.dedup();
            for root in candidates {
                loop {
                    if rem.degree().unwrap_or(0) == 0 {
                        break;
                    }
                    if !ring.eval(&rem, &root).is_zero() {
                        break;
                    }
                    let lin = ring.poly(vec![-root.clone(), BigRational::one()]);
                    rem = ring.div_exact(&rem, &lin)?;
                    match factors.iter_mut().find(|(g, _)| *g == lin) {
                        Some(entry) => entry.1 += 1,
                        None => factors.push((lin, 1)),
                    }
                }
            }
        }
        match rem.degree().unwrap_or(0) {
            0 => {}
            // no rational root: quadratics and cubics are irreducible
            2 | 3 => factors.push((rem, 1)),
            d => {
                return Err(Error::Unsupported(format!(
                    "factorization over QQ: rootless cofactor of degree {d}"
                )))
            }
        }
        sort_factors(&ring, &mut factors);
        Ok(Factorization { unit, factors })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> PolyRing<PrimeField> {
        PolyRing::new(PrimeField::new(p).unwrap())
    }

    #[test]
    fn splits_t_squared_minus_one_over_gf7() {
        let r = gf(7);
        let f = r.poly(vec![6, 0, 1]); // t^2 - 1
        let fac = r.base.uni_factor(&f).unwrap();
        assert_eq!(fac.unit, 1);
        assert_eq!(
            fac.factors,
            vec![(r.poly(vec![1, 1]), 1), (r.poly(vec![6, 1]), 1)]
        );
    }

    #[test]
    fn constant_has_empty_factor_list() {
        let r = gf(7);
        let fac = r.base.uni_factor(&r.constant(3)).unwrap();
        assert_eq!(fac.unit, 3);
        assert!(fac.factors.is_empty());
        assert!(matches!(r.base.uni_factor(&r.zero()), Err(Error::FactorZero)));
    }

    #[test]
    fn t_squared_plus_one_is_irreducible_over_gf7() {
        let r = gf(7);
        let f = r.poly(vec![1, 0, 1]);
        assert!(r.base.is_irreducible(&f).unwrap());
    }

    #[test]
    fn random_products_reassemble_over_small_primes() {
        // oracle: multiply random monic factors, refactor, compare the
        // expanded product and the factor multiset
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for p in [2u64, 3, 7, 13, 31] {
            let r = gf(p);
            for _ in 0..40 {
                let deg = rng.random_range(1..=12usize);
                let mut coeffs: Vec<u64> =
                    (0..deg).map(|_| rng.random_range(0..p)).collect();
                coeffs.push(rng.random_range(1..p));
                let f = r.poly(coeffs);
                let fac = r.base.uni_factor(&f).unwrap();
                assert_eq!(fac.expand(&r), f, "p={p} f={:?}", f);
                for (g, _) in &fac.factors {
                    assert!(r.is_monic(g));
                    assert!(r.base.is_irreducible(g).unwrap());
                }
            }
        }
    }

    #[test]
    fn rational_factorization_extracts_roots() {
        let r = PolyRing::new(Rationals);
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        // f = 2 * (t - 1/2) * (t + 3) * (t^2 + 1)
        let f = {
            let a = r.poly(vec![q(-1, 2), q(1, 1)]);
            let b = r.poly(vec![q(3, 1), q(1, 1)]);
            let c = r.poly(vec![q(1, 1), q(0, 1), q(1, 1)]);
            r.scale(&r.mul(&r.mul(&a, &b), &c), &q(2, 1))
        };
        let fac = Rationals.uni_factor(&f).unwrap();
        assert_eq!(fac.unit, q(2, 1));
        assert_eq!(fac.length(), 3);
        assert_eq!(fac.expand(&r), f);
        assert!(Rationals.is_irreducible(&r.poly(vec![q(1, 1), q(0, 1), q(1, 1)])).unwrap());
    }
}
