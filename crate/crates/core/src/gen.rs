//! Seeded random test instances: diagonal groups of declared orders
//! conjugated by random tame words over k[t].  Everything is driven by a
//! ChaCha stream, so one seed always yields one byte-identical instance.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::automorphism::{PolyMap, TameFactor, TameWord};
use crate::bipoly::BiPoly;
use crate::error::{Error, Result};
use crate::fields::PrimeField;
use crate::parse::{InstanceFile, RingSpec};
use crate::ratfunc::FracRing;
use crate::ring::{KAlgebra, Ring};
use crate::unipoly::{PolyRing, UniPoly};

/// Size bounds on a random tame word, measured on its recomposed map.
#[derive(Clone, Copy, Debug)]
pub struct WordBounds {
    /// Number of factors, 1..=max.
    pub max_factors: usize,
    /// Total degree of either image of the recomposed map.
    pub max_total_degree: u32,
    /// Degree in t of any coefficient of the recomposed map.
    pub max_t_degree: usize,
}

impl Default for WordBounds {
    fn default() -> Self {
        WordBounds { max_factors: 5, max_total_degree: 6, max_t_degree: 3 }
    }
}

/// Everything `random_instance` needs.
#[derive(Clone, Debug)]
pub struct InstanceSpec {
    pub seed: u64,
    pub p: u64,
    /// Declared order of each generator; each must divide p−1.
    pub orders: Vec<u64>,
    pub word: WordBounds,
}

/// A root of unity of exact multiplicative order d in GF(p).
pub fn root_of_order(field: &PrimeField, d: u64) -> Result<u64> {
    let p = field.order();
    if d == 0 || (p - 1) % d != 0 {
        return Err(Error::InvalidGroup(format!(
            "no root of unity of order {d} in GF({p}): {d} does not divide p-1 = {}",
            p - 1
        )));
    }
    Ok(field.pow(&field.generator(), (p - 1) / d))
}

/// Degree in t across all coefficients; None for the zero polynomial.
/// Only meaningful for denominator-free maps, which is all this module makes.
fn t_degree(f: &BiPoly<FracRing<PrimeField>>) -> Option<usize> {
    f.terms()
        .filter_map(|(_, c)| c.num.degree().map(|n| n.saturating_sub(c.den.degree().unwrap_or(0))))
        .max()
}

fn random_elem(rng: &mut ChaCha8Rng, field: &PrimeField) -> u64 {
    rng.random_range(0..field.order())
}

fn random_unit(rng: &mut ChaCha8Rng, field: &PrimeField) -> u64 {
    rng.random_range(1..field.order())
}

/// Random element of k[t] with degree ≤ max_t, embedded into K = k(t).
/// Half the draws are plain scalars so that composed t-degrees stay small.
fn random_coeff(
    rng: &mut ChaCha8Rng,
    frac: &FracRing<PrimeField>,
    max_t: usize,
) -> <FracRing<PrimeField> as Ring>::Elem {
    let field = frac.poly.base.clone();
    let deg = if max_t == 0 || rng.random_bool(0.5) {
        0
    } else {
        rng.random_range(1..=max_t)
    };
    let coeffs: Vec<u64> = (0..=deg).map(|_| random_elem(rng, &field)).collect();
    frac.from_poly(frac.poly.poly(coeffs))
}

/// Random polynomial in the single variable `var` (1 or 2) of degree
/// 1..=max_deg with k[t]-coefficients of degree ≤ max_t.
fn random_shift(
    rng: &mut ChaCha8Rng,
    frac: &FracRing<PrimeField>,
    var: u8,
    max_deg: u32,
    max_t: usize,
) -> BiPoly<FracRing<PrimeField>> {
    let deg = rng.random_range(1..=max_deg);
    let mut out = BiPoly::zero(frac);
    for k in 0..=deg {
        if k != deg && rng.random_bool(0.5) {
            continue;
        }
        let c = random_coeff(rng, frac, max_t);
        let (a, b) = if var == 1 { (k, 0) } else { (0, k) };
        out = out.add(&BiPoly::term(frac, c, a, b));
    }
    if out.total_degree() != Some(deg) {
        // The leading coefficient drew 0 from k[t]; patch it to t^0·1.
        let (a, b) = if var == 1 { (deg, 0) } else { (0, deg) };
        out = out.add(&BiPoly::term(frac, frac.one(), a, b));
    }
    out
}

/// Random tame word over R = k[t] inside the given bounds, built from
/// elementary factors with k[t]-shifts and invertible k-linear factors.
/// Rejection-sampled: factors are redrawn until the recomposed map respects
/// the bounds, so the construction is deterministic per RNG state.
pub fn random_tame_word(
    rng: &mut ChaCha8Rng,
    frac: &FracRing<PrimeField>,
    bounds: &WordBounds,
) -> Result<TameWord<FracRing<PrimeField>>> {
    let field = frac.poly.base.clone();
    for _ in 0..500 {
        let n = rng.random_range(1..=bounds.max_factors);
        // Degrees of elementary factors multiply under composition; keep
        // their running product inside the total-degree bound so every draw
        // recomposes cheaply and most survive the final check.
        let mut deg_budget = bounds.max_total_degree.max(1);
        let mut factors = Vec::with_capacity(n);
        for _ in 0..n {
            if rng.random_bool(0.5) {
                let index: u8 = if rng.random_bool(0.5) { 1 } else { 2 };
                let d = rng.random_range(1..=deg_budget.min(3));
                deg_budget /= d;
                let shift = random_shift(rng, frac, 3 - index, d, bounds.max_t_degree);
                factors.push(TameFactor::elementary(index, shift)?);
            } else {
                let (m00, m01, m10, m11) = loop {
                    let (m00, m11) = (random_unit(rng, &field), random_unit(rng, &field));
                    let (m01, m10) = (random_elem(rng, &field), random_elem(rng, &field));
                    let det = field.sub(&field.mul(&m00, &m11), &field.mul(&m01, &m10));
                    if !field.is_zero(&det) {
                        break (m00, m01, m10, m11);
                    }
                };
                let trans = if rng.random_bool(0.25) {
                    [random_coeff(rng, frac, bounds.max_t_degree), frac.zero()]
                } else {
                    [frac.zero(), frac.zero()]
                };
                factors.push(TameFactor::Affine {
                    mat: [
                        [frac.embed_scalar(&m00), frac.embed_scalar(&m01)],
                        [frac.embed_scalar(&m10), frac.embed_scalar(&m11)],
                    ],
                    trans,
                });
            }
        }
        let word = TameWord { ring: frac.clone(), factors };
        let w = word.recompose();
        let total_ok = w
            .images
            .iter()
            .all(|f| f.total_degree().is_some_and(|d| d <= bounds.max_total_degree));
        let t_ok = w
            .images
            .iter()
            .all(|f| t_degree(f).unwrap_or(0) <= bounds.max_t_degree);
        if total_ok && t_ok {
            return Ok(word);
        }
    }
    Err(Error::Internal(
        "no tame word inside the requested bounds after 500 draws".into(),
    ))
}

/// Random tame word over the plain field GF(p): scalar shifts and affine
/// factors, rejection-sampled against the recomposed total degree.
pub fn random_base_word(
    rng: &mut ChaCha8Rng,
    field: &PrimeField,
    bounds: &WordBounds,
) -> Result<TameWord<PrimeField>> {
    for _ in 0..500 {
        let n = rng.random_range(1..=bounds.max_factors);
        let mut deg_budget = bounds.max_total_degree.max(1);
        let mut factors = Vec::with_capacity(n);
        for _ in 0..n {
            if rng.random_bool(0.5) {
                let index: u8 = if rng.random_bool(0.5) { 1 } else { 2 };
                let d = rng.random_range(1..=deg_budget.min(3));
                deg_budget /= d;
                let other = 3 - index;
                let mut shift = BiPoly::zero(field);
                for k in 0..=d {
                    if k != d && rng.random_bool(0.5) {
                        continue;
                    }
                    let (a, b) = if other == 1 { (k, 0) } else { (0, k) };
                    shift = shift.add(&BiPoly::term(field, random_elem(rng, field), a, b));
                }
                let (a, b) = if other == 1 { (d, 0) } else { (0, d) };
                if shift.total_degree() != Some(d) {
                    shift = shift.add(&BiPoly::term(field, field.one(), a, b));
                }
                factors.push(TameFactor::elementary(index, shift)?);
            } else {
                let (m00, m01, m10, m11) = loop {
                    let (m00, m11) = (random_unit(rng, field), random_unit(rng, field));
                    let (m01, m10) = (random_elem(rng, field), random_elem(rng, field));
                    let det = field.sub(&field.mul(&m00, &m11), &field.mul(&m01, &m10));
                    if !field.is_zero(&det) {
                        break (m00, m01, m10, m11);
                    }
                };
                let trans = [random_elem(rng, field), random_elem(rng, field)];
                factors.push(TameFactor::Affine { mat: [[m00, m01], [m10, m11]], trans });
            }
        }
        let word = TameWord { ring: field.clone(), factors };
        let w = word.recompose();
        if w
            .images
            .iter()
            .all(|f| f.total_degree().is_some_and(|d| d <= bounds.max_total_degree))
        {
            return Ok(word);
        }
    }
    Err(Error::Internal(
        "no tame word inside the requested bounds after 500 draws".into(),
    ))
}

/// Random element of K = k(t) allowed to carry a denominator.
fn random_frac_elem(
    rng: &mut ChaCha8Rng,
    frac: &FracRing<PrimeField>,
    max_t: usize,
) -> <FracRing<PrimeField> as Ring>::Elem {
    let num = random_coeff(rng, frac, max_t);
    if rng.random_bool(0.5) {
        return num;
    }
    let field = frac.poly.base.clone();
    let den = loop {
        let deg = rng.random_range(0..=max_t);
        let mut coeffs: Vec<u64> = (0..deg).map(|_| random_elem(rng, &field)).collect();
        coeffs.push(1);
        let den = frac.poly.poly(coeffs);
        if !frac.poly.is_zero(&den) {
            break den;
        }
    };
    frac.mul(&num, &frac.frac(frac.poly.one(), den).expect("nonzero denominator"))
}

/// Random tame word over K = k(t) whose coefficients may carry denominators.
pub fn random_frac_word(
    rng: &mut ChaCha8Rng,
    frac: &FracRing<PrimeField>,
    bounds: &WordBounds,
) -> Result<TameWord<FracRing<PrimeField>>> {
    for _ in 0..500 {
        let n = rng.random_range(1..=bounds.max_factors);
        let mut deg_budget = bounds.max_total_degree.max(1);
        let mut factors = Vec::with_capacity(n);
        for _ in 0..n {
            if rng.random_bool(0.5) {
                let index: u8 = if rng.random_bool(0.5) { 1 } else { 2 };
                let d = rng.random_range(1..=deg_budget.min(3));
                deg_budget /= d;
                let other = 3 - index;
                let mut shift = BiPoly::zero(frac);
                for k in 0..=d {
                    if k != d && rng.random_bool(0.5) {
                        continue;
                    }
                    let c = random_frac_elem(rng, frac, bounds.max_t_degree);
                    let (a, b) = if other == 1 { (k, 0) } else { (0, k) };
                    shift = shift.add(&BiPoly::term(frac, c, a, b));
                }
                let (a, b) = if other == 1 { (d, 0) } else { (0, d) };
                if shift.total_degree() != Some(d) {
                    shift = shift.add(&BiPoly::term(frac, frac.one(), a, b));
                }
                factors.push(TameFactor::elementary(index, shift)?);
            } else {
                let field = frac.poly.base.clone();
                let (m00, m01, m10, m11) = loop {
                    let (m00, m11) = (random_unit(rng, &field), random_unit(rng, &field));
                    let (m01, m10) = (random_elem(rng, &field), random_elem(rng, &field));
                    let det = field.sub(&field.mul(&m00, &m11), &field.mul(&m01, &m10));
                    if !field.is_zero(&det) {
                        break (m00, m01, m10, m11);
                    }
                };
                let trans = [
                    random_frac_elem(rng, frac, bounds.max_t_degree),
                    random_frac_elem(rng, frac, bounds.max_t_degree),
                ];
                factors.push(TameFactor::Affine {
                    mat: [
                        [frac.embed_scalar(&m00), frac.embed_scalar(&m01)],
                        [frac.embed_scalar(&m10), frac.embed_scalar(&m11)],
                    ],
                    trans,
                });
            }
        }
        let word = TameWord { ring: frac.clone(), factors };
        let w = word.recompose();
        if w
            .images
            .iter()
            .all(|f| f.total_degree().is_some_and(|d| d <= bounds.max_total_degree))
        {
            return Ok(word);
        }
    }
    Err(Error::Internal(
        "no tame word inside the requested bounds after 500 draws".into(),
    ))
}

/// Diagonal pair (ζ^{e₁}, ζ^{e₂}) whose joint multiplicative order is
/// exactly d, where ζ has exact order d.
fn random_diagonal_pair(
    rng: &mut ChaCha8Rng,
    field: &PrimeField,
    zeta: u64,
    d: u64,
) -> (u64, u64) {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    loop {
        let e1 = rng.random_range(0..d);
        let e2 = rng.random_range(0..d);
        let o1 = d / gcd(d, e1);
        let o2 = d / gcd(d, e2);
        // lcm of the two entry orders must be d for the pair to have exact
        // order d.
        if o1 * o2 / gcd(o1, o2) == d {
            return (field.pow(&zeta, e1), field.pow(&zeta, e2));
        }
    }
}

/// Random instance: a diagonal group with the declared orders, conjugated by
/// one random tame word over k[t].  The returned instance is revalidated
/// (orders, commutation, roots) before it is handed out.
pub fn random_instance(spec: &InstanceSpec) -> Result<InstanceFile<PrimeField>> {
    let field = PrimeField::new(spec.p)?;
    if spec.orders.is_empty() {
        return Err(Error::InvalidGroup("at least one generator order".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let frac = FracRing { poly: PolyRing::new(field.clone()) };
    let mut zetas = Vec::with_capacity(spec.orders.len());
    let mut pairs = Vec::with_capacity(spec.orders.len());
    for &d in &spec.orders {
        let zeta = root_of_order(&field, d)?;
        pairs.push(random_diagonal_pair(&mut rng, &field, zeta, d));
        zetas.push(zeta);
    }
    let word = random_tame_word(&mut rng, &frac, &spec.word)?;
    let w = word.recompose();
    let w_inv = word.inverse()?.recompose();
    let gens: Vec<PolyMap<FracRing<PrimeField>>> = pairs
        .iter()
        .map(|(a, b)| {
            let delta =
                PolyMap::diagonal(&frac, frac.embed_scalar(a), frac.embed_scalar(b));
            w.compose(&delta.compose(&w_inv))
        })
        .collect();
    let names = (1..=gens.len()).map(|j| format!("phi{j}")).collect();
    let inst = InstanceFile {
        field,
        ring_spec: RingSpec::Poly,
        names,
        gens,
        orders: spec.orders.clone(),
        zetas,
        conjugator: None,
    };
    inst.group_over_poly()?;
    Ok(inst)
}

/// Random bivariate polynomial over K = k(t) with denominator-free
/// coefficients, for exercising graded decompositions.  Never zero.
pub fn random_bipoly(
    rng: &mut ChaCha8Rng,
    frac: &FracRing<PrimeField>,
    max_total: u32,
    max_t: usize,
) -> BiPoly<FracRing<PrimeField>> {
    loop {
        let mut out = BiPoly::zero(frac);
        let terms = rng.random_range(1..=4);
        for _ in 0..terms {
            let a = rng.random_range(0..=max_total);
            let b = rng.random_range(0..=max_total.saturating_sub(a));
            let c = random_coeff(rng, frac, max_t);
            out = out.add(&BiPoly::term(frac, c, a, b));
        }
        if !out.is_zero() {
            return out;
        }
    }
}

/// Random univariate polynomial over k of degree exactly `deg`.
pub fn random_unipoly(
    rng: &mut ChaCha8Rng,
    ring: &PolyRing<PrimeField>,
    deg: usize,
) -> UniPoly<PrimeField> {
    let field = ring.base.clone();
    let mut coeffs: Vec<u64> = (0..deg).map(|_| random_elem(rng, &field)).collect();
    coeffs.push(random_unit(rng, &field));
    ring.poly(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_have_the_exact_order() {
        use crate::fields::UnitGroup;
        let f = PrimeField::new(13).unwrap();
        for d in [1, 2, 3, 4, 6, 12] {
            let z = root_of_order(&f, d).unwrap();
            assert_eq!(f.unit_order(&z), Some(d));
        }
        let err = root_of_order(&f, 5).unwrap_err();
        assert!(err.to_string().contains("does not divide"), "{err}");
    }

    #[test]
    fn instances_are_deterministic_per_seed() {
        let spec = InstanceSpec {
            seed: 42,
            p: 7,
            orders: vec![3],
            word: WordBounds::default(),
        };
        let a = random_instance(&spec).unwrap();
        let b = random_instance(&spec).unwrap();
        assert_eq!(a.print(), b.print());
        let other = InstanceSpec { seed: 43, ..spec };
        let c = random_instance(&other).unwrap();
        assert_ne!(a.print(), c.print());
    }

    #[test]
    fn instances_parse_back_and_validate() {
        use crate::parse::{parse_instance_any, AnyInstance};
        for seed in 0..10 {
            let spec = InstanceSpec {
                seed,
                p: 13,
                orders: vec![3, 2],
                word: WordBounds::default(),
            };
            let inst = random_instance(&spec).unwrap();
            let text = inst.print();
            let back = match parse_instance_any(&text).unwrap() {
                AnyInstance::Gf(i) => i,
                AnyInstance::Qq(_) => panic!("wrong field"),
            };
            assert_eq!(back.print(), text);
            let group = back.group_over_poly().unwrap();
            assert_eq!(group.orders, vec![3, 2]);
        }
    }

    #[test]
    fn words_respect_their_bounds() {
        let frac = FracRing { poly: PolyRing::new(PrimeField::new(7).unwrap()) };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let bounds = WordBounds::default();
            let word = random_tame_word(&mut rng, &frac, &bounds).unwrap();
            assert!(!word.factors.is_empty());
            assert!(word.factors.len() <= bounds.max_factors);
            let w = word.recompose();
            for img in &w.images {
                assert!(img.total_degree().unwrap() <= bounds.max_total_degree);
                assert!(t_degree(img).unwrap_or(0) <= bounds.max_t_degree);
            }
            // Inverse really inverts over K.
            let inv = word.inverse().unwrap().recompose();
            assert!(w.compose(&inv).is_identity());
        }
    }

    #[test]
    fn rejected_orders_explain_the_root_hypothesis() {
        let spec = InstanceSpec {
            seed: 1,
            p: 7,
            orders: vec![5],
            word: WordBounds::default(),
        };
        let err = random_instance(&spec).unwrap_err();
        assert!(matches!(err, Error::InvalidGroup(_)));
        assert!(err.to_string().contains("5 does not divide p-1 = 6"), "{err}");
    }
}
