//! Descent of a diagonalizing conjugator from k(t) to k[t] coefficients.
//!
//! Input: ψ over K = k(t) whose conjugates ψ⁻¹∘φⱼ∘ψ are the recorded
//! diagonal maps, for generators φⱼ defined over R = k[t].  Output: a new
//! conjugator with R-coefficients and the same diagonal conjugates, obtained
//! by composing ψ on the right with centralizer moves.  Progress is measured
//! by the number m of prime factors of det Jψ in R; every descent step
//! removes at least one factor, so the loop terminates in at most m steps.

use std::cmp::Ordering;

use crate::action::DiagonalContext;
use crate::automorphism::{invert, keller_descend, PolyMap};
use crate::bipoly::{frac_to_poly, poly_to_frac, BiPoly, Expo};
use crate::error::{Error, Result};
use crate::extfield::ExtField;
use crate::factor::GroundField;
use crate::ratfunc::FracRing;
use crate::fields::UnitGroup;
use crate::ring::{Field, Ring};
use crate::unipoly::{PolyRing, UniPoly};

use super::certificate::{map_to_frac, record_stage, verify_conjugation, StageRecord};
use super::centralizer::homogeneous_coordinate_lift;

/// Exact quotient num/den in L[x₁,x₂], or `None` when den does not divide
/// num.  Greedy cancellation of leading terms in graded-lex order is exact
/// here: leading terms are multiplicative in a domain, so num = den·c forces
/// every intermediate remainder to keep a leading term divisible by den's.
pub fn exact_divide<L: Field>(ring: &L, num: &BiPoly<L>, den: &BiPoly<L>) -> Option<BiPoly<L>> {
    let (den_e, den_c) = den.leading()?;
    let (den_e, den_c) = (*den_e, den_c.clone());
    let mut rem = num.clone();
    let mut quot = BiPoly::zero(ring);
    while !rem.is_zero() {
        let (e, c) = rem.leading().expect("nonzero polynomial has a leading term");
        if e.a < den_e.a || e.b < den_e.b {
            return None;
        }
        let qe = Expo { a: e.a - den_e.a, b: e.b - den_e.b };
        let qc = ring.div(c, &den_c).ok()?;
        let term = BiPoly::term(ring, qc, qe.a, qe.b);
        quot = quot.add(&term);
        rem = rem.sub(&term.mul(den));
    }
    Some(quot)
}

/// Least-degree nonzero element of ker ψ̄ ⊆ κ[x₁,x₂], returned monic.
///
/// Searching total degrees in increasing order makes an explicit
/// irreducibility test unnecessary: a nontrivial factorization q = q₁q₂
/// would give 0 = ψ̄(q₁)·ψ̄(q₂) in the integral domain κ[x₁,x₂], placing one
/// factor — of strictly smaller degree — inside the kernel, contradicting
/// the minimality of deg q.  For the same reason, when the kernel is a
/// principal ideal its least-degree elements are exactly the scalar
/// multiples of a generator.  The supplied witness is a known kernel
/// element; its exact divisibility by q is checked before returning, which
/// certifies the choice against a kernel of height two.
pub fn kernel_generator<F: Field>(
    kappa: &ExtField<F>,
    psibar: &PolyMap<ExtField<F>>,
    witness: &BiPoly<ExtField<F>>,
) -> Result<BiPoly<ExtField<F>>> {
    let bound = witness
        .total_degree()
        .ok_or_else(|| Error::Internal("kernel witness is zero".into()))?;
    let image_x1 = &psibar.images[0];
    let image_x2 = &psibar.images[1];
    let mut pow1 = vec![BiPoly::one(kappa)];
    let mut pow2 = vec![BiPoly::one(kappa)];
    for d in 1..=bound {
        pow1.push(pow1[(d - 1) as usize].mul(image_x1));
        pow2.push(pow2[(d - 1) as usize].mul(image_x2));

        // Unknown coefficients: one per monomial of total degree ≤ d.
        let mut monomials: Vec<Expo> = Vec::new();
        for total in 0..=d {
            for a in (0..=total).rev() {
                monomials.push(Expo { a, b: total - a });
            }
        }
        let images: Vec<BiPoly<ExtField<F>>> = monomials
            .iter()
            .map(|e| pow1[e.a as usize].mul(&pow2[e.b as usize]))
            .collect();
        let mut rows: std::collections::BTreeSet<Expo> = std::collections::BTreeSet::new();
        for im in &images {
            for (e, _) in im.terms() {
                rows.insert(*e);
            }
        }
        let matrix: Vec<Vec<<ExtField<F> as Ring>::Elem>> = rows
            .iter()
            .map(|e| images.iter().map(|im| im.coeff(e.a, e.b)).collect())
            .collect();
        let basis = crate::linalg::kernel(kappa, &matrix);
        let mut candidates: Vec<BiPoly<ExtField<F>>> = basis
            .iter()
            .map(|v| {
                let mut q = BiPoly::zero(kappa);
                for (e, c) in monomials.iter().zip(v) {
                    q = q.add(&BiPoly::term(kappa, c.clone(), e.a, e.b));
                }
                q
            })
            .filter(|q| !q.is_zero())
            .collect();
        if candidates.is_empty() {
            continue;
        }
        candidates.sort_by(|x, y| {
            let ex = x.leading().expect("nonzero").0;
            let ey = y.leading().expect("nonzero").0;
            ex.cmp(ey)
        });
        let q = &candidates[0];
        let lead = q.leading().expect("nonzero").1.clone();
        let q = q.scale(&kappa.inv(&lead)?);
        if !psibar.apply(&q).is_zero() {
            return Err(Error::Internal(
                "kernel solve produced an element outside the kernel".into(),
            ));
        }
        if exact_divide(kappa, witness, &q).is_none() {
            return Err(Error::Verification(format!(
                "kernel element {q} does not divide the witness {witness}; \
                 the kernel is not principal"
            )));
        }
        return Ok(q);
    }
    Err(Error::KernelBound(bound as usize))
}

/// Normalize a kernel-generator candidate to the Γ-homogeneous generator.
///
/// When ψ̄ sends q to a nonzero constant (possible for candidates built with
/// a floating constant term), that constant is subtracted first, putting q
/// in the kernel exactly.  Every graded component of a kernel element is
/// again a kernel element and no two components share a monomial, so for a
/// principal kernel exactly one nonzero component survives; more than one
/// means the conjugation data violated its contract.  The surviving
/// component is returned monic.
pub fn homogenize_kernel_coordinate<F: Field + UnitGroup>(
    ctx: &DiagonalContext<F>,
    psibar: &PolyMap<ExtField<F>>,
    q: &BiPoly<ExtField<F>>,
) -> Result<BiPoly<ExtField<F>>> {
    let kappa = &psibar.ring;
    let image = psibar.apply(q);
    let q = match image.total_degree() {
        None => q.clone(),
        Some(0) => q.sub(&BiPoly::constant(kappa, image.coeff(0, 0))),
        Some(_) => {
            return Err(Error::Verification(format!(
                "image {image} of the kernel candidate is not a constant"
            )))
        }
    };
    if !psibar.apply(&q).is_zero() {
        return Err(Error::Internal(
            "subtracting the constant image did not reach the kernel".into(),
        ));
    }
    let mut components: Vec<BiPoly<ExtField<F>>> = ctx
        .diagonal_components(&q)
        .into_values()
        .filter(|c| !c.is_zero())
        .collect();
    if components.len() != 1 {
        return Err(Error::Verification(format!(
            "kernel generator {q} is not homogeneous for the group grading"
        )));
    }
    let h = components.pop().expect("exactly one component");
    let lead = h.leading().expect("nonzero").1.clone();
    Ok(h.scale(&kappa.inv(&lead)?))
}

/// Clear denominators and divide out the k[t]-content of one image.  As a
/// map move this is right-composition with a diagonal scaling over K, which
/// commutes with every diagonal map and so preserves all conjugates.
fn primitive_part<F: Field>(
    frac: &FracRing<F>,
    f: &BiPoly<FracRing<F>>,
) -> Result<BiPoly<PolyRing<F>>> {
    let poly = &frac.poly;
    let mut den = poly.one();
    for (_, c) in f.terms() {
        den = poly.lcm(&den, &c.den);
    }
    let cleared = f.scale(&frac.from_poly(den));
    let as_poly = frac_to_poly(&cleared, poly)
        .ok_or_else(|| Error::Internal("clearing denominators left a denominator".into()))?;
    let (_, prim) = as_poly.content_primitive()?;
    Ok(prim)
}

fn primitivize<F: Field>(psi: &PolyMap<FracRing<F>>) -> Result<PolyMap<FracRing<F>>> {
    let frac = psi.ring.clone();
    let f1 = primitive_part(&frac, &psi.images[0])?;
    let f2 = primitive_part(&frac, &psi.images[1])?;
    Ok(PolyMap::new(
        frac.clone(),
        poly_to_frac(&f1, &frac),
        poly_to_frac(&f2, &frac),
    ))
}

/// det Jψ as an element of k[t].  For a map with primitive polynomial
/// images the determinant is a scalar of K lying in k[t].
fn scalar_det<F: Field>(psi: &PolyMap<FracRing<F>>) -> Result<UniPoly<F>> {
    let frac = &psi.ring;
    if psi.jac.total_degree() != Some(0) {
        return Err(Error::JacobianNotUnit(format!("{}", psi.jac)));
    }
    frac.to_poly(&psi.jac.coeff(0, 0)).ok_or_else(|| {
        Error::Internal("determinant of a primitive map kept a denominator".into())
    })
}

/// ψ(g) must be b·x_index with b ∈ k[t]; return b.
fn scaled_coordinate<F: Field>(
    psi: &PolyMap<FracRing<F>>,
    g: &BiPoly<PolyRing<F>>,
    index: u8,
) -> Result<UniPoly<F>> {
    let frac = &psi.ring;
    let image = psi.apply(&poly_to_frac(g, frac));
    let want = if index == 1 { Expo { a: 1, b: 0 } } else { Expo { a: 0, b: 1 } };
    let fail = || {
        Error::Internal(format!(
            "image of a rescaled inverse coordinate must be a k[t]-multiple of x{index}"
        ))
    };
    if image.num_terms() != 1 {
        return Err(fail());
    }
    let (e, c) = image.leading().expect("single term");
    if *e != want {
        return Err(fail());
    }
    frac.to_poly(c).ok_or_else(fail)
}

/// Replace a diagonalizing conjugator over K = k(t) by one over R = k[t]
/// with the same diagonal conjugates.
///
/// Each step factors det Jψ in R, picks its canonically-last prime p, and
/// removes it: the reduction ψ̄ of ψ modulo p has a principal prime kernel
/// (q), the generator q is homogeneous for the group grading, and lifting q
/// to a centralizer pair (h₁,h₂) over R with det J = 1 lets ψ absorb p by
/// composing with σ₂ = (…, p⁻¹hᵢ, …).  The witness placing q's degree bound
/// is the reduction of a primitive rescaling of ψ⁻¹(xᵢ), where the index is
/// chosen so that p divides the scaling factor; such an index exists since
/// the product of the two factors is det J(g₁,g₂)·det Jψ.  Strict decrease
/// of the factor count is asserted after every step.  Once the count is
/// zero, restriction to R is checked directly and the restricted map is
/// returned together with the step log.
pub fn descend_conjugator<F: GroundField>(
    ctx: &DiagonalContext<F>,
    checks: &[(PolyMap<FracRing<F>>, (F::Elem, F::Elem))],
    psi0: &PolyMap<FracRing<F>>,
) -> Result<(PolyMap<PolyRing<F>>, Vec<StageRecord>)> {
    let frac = psi0.ring.clone();
    let poly = frac.poly.clone();
    let field = poly.base.clone();

    if checks.len() != ctx.pairs.len() {
        return Err(Error::Internal(
            "conjugation checks and grading context disagree in length".into(),
        ));
    }
    for ((_, (a, b)), (ca, cb)) in checks.iter().zip(&ctx.pairs) {
        if field.cmp_elem(a, ca) != Ordering::Equal
            || field.cmp_elem(b, cb) != Ordering::Equal
        {
            return Err(Error::Internal(
                "conjugation checks and grading context disagree on a pair".into(),
            ));
        }
    }
    for (j, (phi, _)) in checks.iter().enumerate() {
        for im in &phi.images {
            if frac_to_poly(im, &poly).is_none() {
                return Err(Error::Verification(format!(
                    "group generator {} has a denominator",
                    j + 1
                )));
            }
        }
    }
    verify_conjugation(&field, &frac, checks, psi0)?;

    let mut stages: Vec<StageRecord> = Vec::new();
    // Trivial group: nothing constrains the conjugator, so take the identity.
    if checks
        .iter()
        .all(|(_, (a, b))| field.is_one(a) && field.is_one(b))
    {
        return Ok((PolyMap::identity(&poly), stages));
    }

    let before = format!("{psi0}");
    let mut psi = primitivize(psi0)?;
    if !psi.equals(psi0) {
        record_stage(&mut stages, "primitivize", &before, &format!("{psi}"));
    }

    let mut m_prev: Option<u32> = None;
    loop {
        let det = scalar_det(&psi)?;
        let fact = field.uni_factor(&det)?;
        let m: u32 = fact.factors.iter().map(|(_, e)| e).sum();
        if let Some(prev) = m_prev {
            if m >= prev {
                return Err(Error::Internal(
                    "descent step failed to shrink the determinant".into(),
                ));
            }
        }
        m_prev = Some(m);

        if m == 0 {
            let down = keller_descend(&psi)?;
            verify_conjugation(&field, &frac, checks, &map_to_frac(&frac, &down))?;
            return Ok((down, stages));
        }

        let p = fact
            .factors
            .last()
            .expect("positive factor count")
            .0
            .clone();
        let kappa = ExtField::new(poly.clone(), p.clone())?;
        let f1 = frac_to_poly(&psi.images[0], &poly)
            .ok_or_else(|| Error::Internal("primitive map has a denominator".into()))?;
        let f2 = frac_to_poly(&psi.images[1], &poly)
            .ok_or_else(|| Error::Internal("primitive map has a denominator".into()))?;
        let psibar = PolyMap::new(kappa.clone(), f1.residue(&kappa), f2.residue(&kappa));

        let inv = invert(&psi)?;
        let g1 = primitive_part(&frac, &inv.images[0])?;
        let g2 = primitive_part(&frac, &inv.images[1])?;
        let b1 = scaled_coordinate(&psi, &g1, 1)?;
        let b2 = scaled_coordinate(&psi, &g2, 2)?;
        let witness = if poly.div_exact(&b1, &p).is_ok() {
            &g1
        } else if poly.div_exact(&b2, &p).is_ok() {
            &g2
        } else {
            return Err(Error::Internal(
                "chosen determinant prime divides neither coordinate scaling".into(),
            ));
        };
        let w = witness.residue(&kappa);
        if w.is_zero() {
            return Err(Error::Internal(
                "primitive inverse coordinate reduced to zero".into(),
            ));
        }
        if !psibar.apply(&w).is_zero() {
            return Err(Error::Internal("kernel witness escaped the kernel".into()));
        }

        let q = kernel_generator(&kappa, &psibar, &w)?;
        let q = homogenize_kernel_coordinate(ctx, &psibar, &q)?;
        let lift = homogeneous_coordinate_lift(ctx, &kappa, &poly, &q)?;

        let mut images = [
            poly_to_frac(&lift.pair.images[0], &frac),
            poly_to_frac(&lift.pair.images[1], &frac),
        ];
        let i = usize::from(lift.index - 1);
        let p_inv = frac.frac(poly.one(), p.clone())?;
        images[i] = images[i].scale(&p_inv);
        let sigma2 = PolyMap::new(frac.clone(), images[0].clone(), images[1].clone());

        let step_input = format!("{psi}");
        let next = psi.compose(&sigma2);
        for im in &next.images {
            if frac_to_poly(im, &poly).is_none() {
                return Err(Error::Internal("descent step left a denominator".into()));
            }
        }
        psi = primitivize(&next)?;
        record_stage(
            &mut stages,
            &format!("descent-step m={m} p={}", poly.show(&p)),
            &step_input,
            &format!("{psi}"),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::PrimeField;
    use crate::ring::KAlgebra;

    fn gf7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    fn rt() -> PolyRing<PrimeField> {
        PolyRing::new(gf7())
    }

    fn kt() -> FracRing<PrimeField> {
        FracRing { poly: rt() }
    }

    fn kappa_t() -> ExtField<PrimeField> {
        // κ = GF(7)[t]/(t) ≅ GF(7).
        let r = rt();
        let modulus = r.var();
        ExtField::new(r, modulus).unwrap()
    }

    /// Γ = ⟨(1,2)⟩ ⊂ GF(7)*²; 2 has multiplicative order 3 mod 7.
    fn ctx_1_2() -> DiagonalContext<PrimeField> {
        DiagonalContext::new(gf7(), vec![(1, 2)]).unwrap()
    }

    #[test]
    fn exact_divide_finds_cofactors_and_rejects_nondivisors() {
        let k = kappa_t();
        let x1 = BiPoly::var(&k, 1);
        let x2 = BiPoly::var(&k, 2);
        let q = x2.sub(&x1.pow(3));
        let w = q.mul(&x1.add(&x2));
        let c = exact_divide(&k, &w, &q).expect("divides");
        assert_eq!(format!("{c}"), "x1 + x2");
        assert!(exact_divide(&k, &w.add(&BiPoly::one(&k)), &q).is_none());
        assert!(exact_divide(&k, &w, &BiPoly::zero(&k)).is_none());
    }

    #[test]
    fn kernel_generator_for_a_collapsed_coordinate() {
        // ψ̄ = (x̄₁, 0): kernel is (x₂).
        let k = kappa_t();
        let psibar = PolyMap::new(k.clone(), BiPoly::var(&k, 1), BiPoly::zero(&k));
        let w = BiPoly::var(&k, 2);
        let q = kernel_generator(&k, &psibar, &w).unwrap();
        assert_eq!(format!("{q}"), "x2");
    }

    #[test]
    fn kernel_generator_for_a_cubic_relation() {
        // ψ̄ = (x̄₁, x̄₁³): kernel is (x₂ − x₁³), monic x₁³ + 6x₂.
        let k = kappa_t();
        let x1 = BiPoly::var(&k, 1);
        let psibar = PolyMap::new(k.clone(), x1.clone(), x1.pow(3));
        let w = BiPoly::var(&k, 2).sub(&x1.pow(3));
        let q = kernel_generator(&k, &psibar, &w).unwrap();
        assert_eq!(format!("{q}"), "x1^3 + 6*x2");
    }

    #[test]
    fn kernel_generator_reports_its_bound_for_an_injective_map() {
        // ψ̄ = identity has trivial kernel; x₂ is not in it, so the witness
        // is dishonest and the search must exhaust its degree bound.
        let k = kappa_t();
        let psibar = PolyMap::identity(&k);
        let w = BiPoly::var(&k, 2);
        match kernel_generator(&k, &psibar, &w) {
            Err(Error::KernelBound(1)) => {}
            other => panic!("expected KernelBound(1), got {other:?}"),
        }
    }

    #[test]
    fn homogenize_subtracts_a_constant_image() {
        // ψ̄ = (x̄₁, 0) sends x₂ + 1 to the constant 1; subtracting it gives
        // the homogeneous kernel generator x₂.
        let k = kappa_t();
        let psibar = PolyMap::new(k.clone(), BiPoly::var(&k, 1), BiPoly::zero(&k));
        let q = BiPoly::var(&k, 2).add(&BiPoly::one(&k));
        let h = homogenize_kernel_coordinate(&ctx_1_2(), &psibar, &q).unwrap();
        assert_eq!(format!("{h}"), "x2");
    }

    #[test]
    fn homogenize_rejects_a_mixed_class_kernel_element() {
        // ψ̄ = (0, 0) annihilates x₁ + x₂, but the classes of x₁ and x₂
        // differ under ⟨(1,2)⟩, so no single homogeneous generator exists.
        let k = kappa_t();
        let psibar = PolyMap::new(k.clone(), BiPoly::zero(&k), BiPoly::zero(&k));
        let q = BiPoly::var(&k, 1).add(&BiPoly::var(&k, 2));
        match homogenize_kernel_coordinate(&ctx_1_2(), &psibar, &q) {
            Err(Error::Verification(_)) => {}
            other => panic!("expected Verification, got {other:?}"),
        }
    }

    #[test]
    fn integral_conjugator_restricts_without_any_step() {
        // ψ = (x₁, x₂ + x₁³) already has k[t]-coefficients and det Jψ = 1;
        // it conjugates φ = (x₁, 2x₂ + x₁³) to (x₁, 2x₂).
        let frac = kt();
        let x1 = BiPoly::var(&frac, 1);
        let x2 = BiPoly::var(&frac, 2);
        let psi = PolyMap::new(frac.clone(), x1.clone(), x2.add(&x1.pow(3)));
        let two = frac.embed_scalar(&2);
        let phi = PolyMap::new(
            frac.clone(),
            x1.clone(),
            x2.scale(&two).add(&x1.pow(3)),
        );
        let checks = vec![(phi, (1u64, 2u64))];
        let (down, stages) = descend_conjugator(&ctx_1_2(), &checks, &psi).unwrap();
        assert_eq!(format!("{down}"), "(x1, x1^3 + x2)");
        assert!(stages.is_empty());
    }

    #[test]
    fn content_denominators_disappear_without_a_descent_step() {
        // ψ = (x₁, t·x₂) conjugates (x₁, 2x₂) to itself; clearing the
        // content already lands in k[t], so no prime must be stripped.
        let frac = kt();
        let poly = rt();
        let t = frac.from_poly(poly.var());
        let psi = PolyMap::new(
            frac.clone(),
            BiPoly::var(&frac, 1),
            BiPoly::var(&frac, 2).scale(&t),
        );
        let delta = PolyMap::diagonal(&frac, frac.one(), frac.embed_scalar(&2));
        let checks = vec![(delta, (1u64, 2u64))];
        let (down, stages) = descend_conjugator(&ctx_1_2(), &checks, &psi).unwrap();
        assert_eq!(format!("{down}"), "(x1, x2)");
        assert_eq!(stages.len(), 1);
        assert_eq!(stages[0].operation, "primitivize");
    }

    #[test]
    fn one_descent_step_removes_a_determinant_prime() {
        // ψ = (x₁ + t⁻¹(x₂+x₁³)³, x₂+x₁³) conjugates φ = (x₁, 2x₂+x₁³) to
        // (x₁, 2x₂): it is (x₁, x₂+x₁³) composed with the centralizer move
        // (x₁ + t⁻¹x₂³, x₂).  After clearing denominators det Jψ = t; the
        // reduction mod t has kernel (x₂³ − x₁), whose lift yields the move
        // σ₂ = (t⁻¹(x₁+6x₂³), x₂) that restores the integral conjugator.
        let frac = kt();
        let poly = rt();
        let t_inv = frac.frac(poly.one(), poly.var()).unwrap();
        let x1 = BiPoly::var(&frac, 1);
        let x2 = BiPoly::var(&frac, 2);
        let s = x2.add(&x1.pow(3));
        let psi = PolyMap::new(frac.clone(), x1.add(&s.pow(3).scale(&t_inv)), s);
        let two = frac.embed_scalar(&2);
        let phi = PolyMap::new(
            frac.clone(),
            x1.clone(),
            x2.scale(&two).add(&x1.pow(3)),
        );
        let checks = vec![(phi, (1u64, 2u64))];
        let (down, stages) = descend_conjugator(&ctx_1_2(), &checks, &psi).unwrap();
        assert_eq!(format!("{down}"), "(x1, x1^3 + x2)");
        let ops: Vec<&str> = stages.iter().map(|s| s.operation.as_str()).collect();
        assert_eq!(ops, vec!["primitivize", "descent-step m=1 p=t"]);
    }

    #[test]
    fn trivial_group_descends_to_the_identity() {
        let frac = kt();
        let psi = PolyMap::identity(&frac);
        let ctx = DiagonalContext::new(gf7(), vec![(1, 1)]).unwrap();
        let checks = vec![(PolyMap::identity(&frac), (1u64, 1u64))];
        let (down, stages) = descend_conjugator(&ctx, &checks, &psi).unwrap();
        assert_eq!(format!("{down}"), "(x1, x2)");
        assert!(stages.is_empty());
    }

    #[test]
    fn dishonest_conjugator_is_rejected_up_front() {
        // The identity does not conjugate (x₁, 2x₂) to (x₁, 3x₂).
        let frac = kt();
        let psi = PolyMap::identity(&frac);
        let delta = PolyMap::diagonal(&frac, frac.one(), frac.embed_scalar(&2));
        let ctx = DiagonalContext::new(gf7(), vec![(1, 3)]).unwrap();
        let checks = vec![(delta, (1u64, 3u64))];
        match descend_conjugator(&ctx, &checks, &psi) {
            Err(Error::Verification(_)) => {}
            other => panic!("expected Verification, got {other:?}"),
        }
    }
}
