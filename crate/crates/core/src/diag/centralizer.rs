//! Factorization inside the centralizer of a diagonal group, and lifting of
//! homogeneous coordinates from the residue field κ = R/pR back to R = k[t].
//!
//! The centralizer C_Γ of a diagonal group Γ ⊆ D₂(k) consists exactly of the
//! automorphisms whose two images are homogeneous for the monomial grading
//! induced by Γ, with the classes of x₁ and x₂ respectively.  Every such
//! automorphism factors as σ₁∘⋯∘σ_r∘τ where each σ_l is an elementary
//! automorphism lying in C_Γ and τ is diagonal; the factorization is computed
//! by degree reduction and is the engine behind coordinate lifting.

use crate::action::DiagonalContext;
use crate::automorphism::{keller_descend, vdk_decompose, PolyMap, TameFactor, TameWord};
use crate::bipoly::{jacobian_det, poly_to_frac, BiPoly, Expo};
use crate::error::{Error, Result};
use crate::extfield::ExtField;
use crate::lattice::Class;
use crate::linalg;
use crate::ratfunc::FracRing;
use crate::fields::UnitGroup;
use crate::ring::{Field, Ring};
use crate::unipoly::{PolyRing, UniPoly};

/// Minimal-degree mate: a polynomial g with det J(h, g) = 1 such that (h, g)
/// is certified to be an automorphism of L[x₁, x₂].
///
/// Searches degree bounds 1, …, deg h; at each bound the condition
/// det J(h, g) = 1 is linear in the unknown coefficients of g.  A solution is
/// reduced modulo powers of h (which leave the Jacobian unchanged) and then
/// certified by tame factorization; kernel adjustments of the linear system
/// are tried when the first solution fails to certify.  Returns `None` when
/// no bounded solution certifies, which is the correct answer for
/// non-coordinates such as x₁x₂.
pub fn coordinate_mate<L: Field>(ring: &L, h: &BiPoly<L>) -> Result<Option<BiPoly<L>>> {
    let deg_h = match h.total_degree() {
        None | Some(0) => return Ok(None),
        Some(d) => d,
    };
    for bound in 1..=deg_h {
        if let Some(g) = mate_at_degree(ring, h, bound) {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

fn mate_at_degree<L: Field>(ring: &L, h: &BiPoly<L>, bound: u32) -> Option<BiPoly<L>> {
    // Unknown coefficients of g, one per monomial of total degree ≤ bound.
    let mut unknowns: Vec<Expo> = Vec::new();
    for total in 0..=bound {
        for a in (0..=total).rev() {
            unknowns.push(Expo { a, b: total - a });
        }
    }
    // Column p_m = det J(h, x^m); the system matches Σ c_m p_m against 1.
    let columns: Vec<BiPoly<L>> = unknowns
        .iter()
        .map(|e| jacobian_det(h, &BiPoly::term(ring, ring.one(), e.a, e.b)))
        .collect();
    let mut rows: std::collections::BTreeSet<Expo> = std::collections::BTreeSet::new();
    rows.insert(Expo { a: 0, b: 0 });
    for col in &columns {
        for (e, _) in col.terms() {
            rows.insert(*e);
        }
    }
    let rows: Vec<Expo> = rows.into_iter().collect();
    let mat: Vec<Vec<L::Elem>> = rows
        .iter()
        .map(|e| columns.iter().map(|col| col.coeff(e.a, e.b)).collect())
        .collect();
    let rhs: Vec<L::Elem> = rows
        .iter()
        .map(|e| if e.a == 0 && e.b == 0 { ring.one() } else { ring.zero() })
        .collect();
    let particular = linalg::solve(ring, &mat, &rhs)?;
    let base = poly_from_coeffs(ring, &unknowns, &particular);
    let mut candidates = vec![reduce_by_powers(ring, &base, h)];
    for kv in linalg::kernel(ring, &mat) {
        let kp = poly_from_coeffs(ring, &unknowns, &kv);
        candidates.push(reduce_by_powers(ring, &base.sub(&kp), h));
        candidates.push(reduce_by_powers(ring, &base.add(&kp), h));
    }
    candidates.into_iter().find(|g| certifies_pair(ring, h, g))
}

fn poly_from_coeffs<L: Field>(ring: &L, unknowns: &[Expo], coeffs: &[L::Elem]) -> BiPoly<L> {
    let mut g = BiPoly::zero(ring);
    for (e, c) in unknowns.iter().zip(coeffs) {
        if !ring.is_zero(c) {
            g = g.add(&BiPoly::term(ring, c.clone(), e.a, e.b));
        }
    }
    g
}

/// Subtract multiples of powers of h while the leading form of g is
/// proportional to a power of the leading form of h.  det J(h, ·) kills
/// polynomials in h, so this leaves the Jacobian condition intact while
/// producing the canonical low-degree representative.
fn reduce_by_powers<L: Field>(ring: &L, g: &BiPoly<L>, h: &BiPoly<L>) -> BiPoly<L> {
    let dh = match h.total_degree() {
        Some(d) if d > 0 => d,
        _ => return g.clone(),
    };
    let mut cur = g.clone();
    loop {
        let dg = match cur.total_degree() {
            Some(d) => d,
            None => return cur,
        };
        if dg == 0 {
            // A constant is h⁰-proportional; drop it for canonicity.
            return BiPoly::zero(ring);
        }
        if dg % dh != 0 {
            return cur;
        }
        let j = dg / dh;
        let hj = h.leading_form().pow(j);
        let (_, lc_g) = cur.leading().expect("nonzero");
        let (_, lc_h) = hj.leading().expect("nonzero");
        let c = match ring.div(lc_g, lc_h) {
            Ok(c) => c,
            Err(_) => return cur,
        };
        if !cur.leading_form().sub(&hj.scale(&c)).is_zero() {
            return cur;
        }
        cur = cur.sub(&h.pow(j).scale(&c));
    }
}

fn certifies_pair<L: Field>(ring: &L, h: &BiPoly<L>, g: &BiPoly<L>) -> bool {
    let pair = PolyMap::new(ring.clone(), h.clone(), g.clone());
    if !pair.jac.sub(&BiPoly::one(ring)).is_zero() {
        return false;
    }
    vdk_decompose(&pair).is_ok()
}

/// Factorization of a centralizer element: elementary factors σ₁,…,σ_r
/// (each with a Γ-homogeneous shift) followed by a diagonal τ, composing to
/// the original map as σ₁∘⋯∘σ_r∘τ.
#[derive(Debug, Clone)]
pub struct CentralizerWord<L: Ring> {
    pub shears: Vec<TameFactor<L>>,
    pub diag: (L::Elem, L::Elem),
}

impl<L: Field> CentralizerWord<L> {
    pub fn to_word(&self, ring: &L) -> TameWord<L> {
        let mut factors = self.shears.clone();
        factors.push(TameFactor::diagonal(ring, self.diag.0.clone(), self.diag.1.clone()));
        TameWord { ring: ring.clone(), factors }
    }

    pub fn recompose(&self, ring: &L) -> PolyMap<L> {
        self.to_word(ring).recompose()
    }
}

/// Factor an automorphism of the centralizer C_Γ as σ₁∘⋯∘σ_r∘τ with every
/// σ_l elementary in C_Γ and τ diagonal.
///
/// Preconditions: both images of φ are nonzero and Γ-homogeneous of the
/// classes of x₁ and x₂.  Reduction steps that would leave C_Γ cannot occur
/// for such input; that impossibility is asserted.
pub fn centralizer_decompose<F, L>(
    ctx: &DiagonalContext<F>,
    ring: &L,
    phi: &PolyMap<L>,
) -> Result<CentralizerWord<L>>
where
    F: Field + UnitGroup,
    L: Field,
{
    let g1 = ctx.gamma1();
    let g2 = ctx.gamma2();
    for (idx, want) in [(0usize, &g1), (1usize, &g2)] {
        let img = &phi.images[idx];
        if img.is_zero() {
            return Err(Error::NotAutomorphism(format!("image {} is zero", idx + 1)));
        }
        match ctx.is_homogeneous(img) {
            Some(ref c) if c == want => {}
            _ => {
                return Err(Error::NotHomogeneous(format!(
                    "image {} = {} is not homogeneous of the class of x{}",
                    idx + 1,
                    img,
                    idx + 1
                )))
            }
        }
    }

    let mut cur = phi.clone();
    let mut rights: Vec<TameFactor<L>> = Vec::new();
    let tau = loop {
        let f1 = cur.images[0].clone();
        let f2 = cur.images[1].clone();
        let d1 = f1
            .total_degree()
            .ok_or_else(|| Error::NotAutomorphism("an image reduced to zero".into()))?;
        let d2 = f2
            .total_degree()
            .ok_or_else(|| Error::NotAutomorphism("an image reduced to zero".into()))?;
        let sigma = if d1 <= 1 && d2 <= 1 {
            let a00 = f1.coeff(1, 0);
            let a01 = f1.coeff(0, 1);
            let c0 = f1.coeff(0, 0);
            let a10 = f2.coeff(1, 0);
            let a11 = f2.coeff(0, 1);
            let c1 = f2.coeff(0, 0);
            let nz = |e: &L::Elem| !ring.is_zero(e);
            if !nz(&a01) && !nz(&a10) && !nz(&c0) && !nz(&c1) {
                if !nz(&a00) || !nz(&a11) {
                    return Err(Error::NotAutomorphism(
                        "linear part is singular".into(),
                    ));
                }
                break (a00, a11);
            }
            if nz(&a01) || nz(&a10) {
                if !nz(&a00) {
                    // Make the (1,1) entry nonzero first: f1 ← f1 + f2.
                    TameFactor::elementary(1, BiPoly::var(ring, 2))?
                } else if nz(&a10) {
                    // f2 ← f2 − (a10/a00)·f1.
                    let c = ring.neg(&ring.div(&a10, &a00)?);
                    TameFactor::elementary(2, BiPoly::term(ring, c, 1, 0))?
                } else {
                    // a10 = 0 forces a11 ≠ 0; f1 ← f1 − (a01/a11)·f2.
                    let c = ring.neg(&ring.div(&a01, &a11)?);
                    TameFactor::elementary(1, BiPoly::term(ring, c, 0, 1))?
                }
            } else if nz(&c0) {
                TameFactor::elementary(1, BiPoly::constant(ring, ring.neg(&c0)))?
            } else {
                TameFactor::elementary(2, BiPoly::constant(ring, ring.neg(&c1)))?
            }
        } else {
            // Reduce the image of larger degree by a power of the other.
            let (i, di, dj, fi, fj) = if d1 >= d2 {
                (0usize, d1, d2, &f1, &f2)
            } else {
                (1usize, d2, d1, &f2, &f1)
            };
            if dj == 0 || di % dj != 0 {
                return Err(Error::NotAutomorphism(format!(
                    "no elementary reduction applies to degrees {di} and {dj}"
                )));
            }
            let l = di / dj;
            let target = fj.leading_form().pow(l);
            let (_, lc_i) = fi.leading().expect("nonzero");
            let (_, lc_t) = target.leading().expect("nonzero");
            let c = ring.div(lc_i, lc_t)?;
            if !fi.leading_form().sub(&target.scale(&c)).is_zero() {
                return Err(Error::NotAutomorphism(
                    "leading forms are not proportional; the pair is not an automorphism"
                        .into(),
                ));
            }
            let (index, ea, eb) = if i == 0 { (1u8, 0, l) } else { (2u8, l, 0) };
            TameFactor::elementary(index, BiPoly::term(ring, ring.neg(&c), ea, eb))?
        };
        // Every reduction must itself stay inside the centralizer: the class
        // of the shift must be the class of the shifted variable.  For
        // homogeneous input this is automatic, so a violation is a bug.
        if let TameFactor::Elementary { index, shift } = &sigma {
            let want = if *index == 1 { &g1 } else { &g2 };
            let got = ctx.is_homogeneous(shift);
            assert_eq!(
                got.as_ref(),
                Some(want),
                "reduction shift left the centralizer"
            );
        }
        cur = cur.compose(&sigma.to_map(ring));
        rights.push(sigma);
        // A zero image means the input was not an automorphism; the next
        // pass reports that cleanly, so only check classes of nonzero images.
        debug_assert!(
            cur.images[0].is_zero()
                || ctx.is_homogeneous(&cur.images[0]).as_ref() == Some(&g1)
        );
        debug_assert!(
            cur.images[1].is_zero()
                || ctx.is_homogeneous(&cur.images[1]).as_ref() == Some(&g2)
        );
    };

    // cur = φ∘r₁∘⋯∘r_N = τ, hence φ = τ∘r_N⁻¹∘⋯∘r₁⁻¹.  Move τ to the right:
    // τ∘σ = (τστ⁻¹)∘τ, and conjugating an elementary factor by a diagonal
    // map transforms its shift by s(x_j) ↦ a_i⁻¹·s(a_j·x_j).
    let mut shears: Vec<TameFactor<L>> = Vec::new();
    for factor in rights.iter().rev() {
        let inverted = match factor {
            TameFactor::Elementary { index, shift } => {
                TameFactor::elementary(*index, shift.neg())?
            }
            TameFactor::Affine { .. } => unreachable!("only elementary reductions are pushed"),
        };
        shears.push(conjugate_shear_by_diagonal(ring, &inverted, &tau)?);
    }
    let word = CentralizerWord { shears, diag: tau };
    if !word.recompose(ring).equals(phi) {
        return Err(Error::Internal(
            "centralizer factorization failed to recompose".into(),
        ));
    }
    Ok(word)
}

/// τ∘σ∘τ⁻¹ for elementary σ and diagonal τ = (a₁x₁, a₂x₂): again elementary
/// with shift a_i⁻¹·s(a_j·x_j); the shift's monomials, hence its class, are
/// unchanged.
fn conjugate_shear_by_diagonal<L: Field>(
    ring: &L,
    sigma: &TameFactor<L>,
    tau: &(L::Elem, L::Elem),
) -> Result<TameFactor<L>> {
    match sigma {
        TameFactor::Elementary { index, shift } => {
            let (ai, _aj) = if *index == 1 {
                (&tau.0, &tau.1)
            } else {
                (&tau.1, &tau.0)
            };
            let x1 = BiPoly::var(ring, 1).scale(&tau.0);
            let x2 = BiPoly::var(ring, 2).scale(&tau.1);
            let moved = shift.substitute(&x1, &x2);
            let scaled = moved.scale(&ring.inv(ai)?);
            TameFactor::elementary(*index, scaled)
        }
        TameFactor::Affine { .. } => Err(Error::Internal(
            "cannot conjugate an affine factor as a shear".into(),
        )),
    }
}

/// Termwise coefficient lift κ[x₁,x₂] → R[x₁,x₂] of an elementary factor,
/// taking canonical representatives of the residue classes.  Monomials, and
/// therefore grading classes, are preserved, and the lift is elementary with
/// Jacobian determinant 1.
pub fn lift_elementary<F: Field>(
    ring: &PolyRing<F>,
    sigma: &TameFactor<ExtField<F>>,
) -> Result<TameFactor<PolyRing<F>>> {
    match sigma {
        TameFactor::Elementary { index, shift } => {
            TameFactor::elementary(*index, shift.lift(ring))
        }
        TameFactor::Affine { .. } => Err(Error::Unsupported(
            "only elementary factors are lifted coefficient-wise".into(),
        )),
    }
}

/// Result of lifting a Γ-homogeneous coordinate h of κ[x₁,x₂]: a pair
/// (h₁, h₂) ∈ C_Γ(R) with det J = 1, a scalar a ∈ κ*, and the position i
/// such that h = a·h̄ᵢ in κ[x₁,x₂].
#[derive(Debug, Clone)]
pub struct HomogeneousLift<F: Field> {
    pub pair: PolyMap<PolyRing<F>>,
    /// Canonical representative of a ∈ κ*.
    pub scalar: UniPoly<F>,
    /// 1-based coordinate position i with h = a·h̄ᵢ.
    pub index: u8,
}

/// Lift a Γ-homogeneous coordinate of the residue plane κ[x₁,x₂] to a
/// centralizer pair over R with Jacobian determinant 1.
///
/// Builds a centralizer automorphism φ of κ[x₁,x₂] with φ(xᵢ) = h, factors
/// it as σ₁∘⋯∘σ_r∘τ, lifts the elementary factors coefficient-wise, and
/// keeps τ in κ: the lifted word (h₁, h₂) then satisfies h = aᵢ·h̄ᵢ where
/// aᵢ is the i-th diagonal entry of τ.  Both the Jacobian and the residue
/// identity are checked exactly before returning.
pub fn homogeneous_coordinate_lift<F: Field + UnitGroup>(
    ctx: &DiagonalContext<F>,
    kappa: &ExtField<F>,
    ring: &PolyRing<F>,
    h: &BiPoly<ExtField<F>>,
) -> Result<HomogeneousLift<F>> {
    if h.is_zero() {
        return Err(Error::NotHomogeneous("zero is not a coordinate".into()));
    }
    let mu = ctx
        .is_homogeneous(h)
        .ok_or_else(|| Error::NotHomogeneous(format!("{h} is not homogeneous")))?;
    let g1 = ctx.gamma1();
    let g2 = ctx.gamma2();
    // Prefer position 2, matching the convention used by the descent.
    let index: u8 = if mu == g2 {
        2
    } else if mu == g1 {
        1
    } else {
        return Err(Error::NotHomogeneous(format!(
            "class of {h} is neither coordinate class"
        )));
    };
    let mate = coordinate_mate(kappa, h)?
        .ok_or_else(|| Error::NoMate(format!("{h}")))?;
    // Complementary class γ₀ = γ₁ + γ₂ − μ; the component of the mate in
    // that class has the same Jacobian against h as the full mate.
    let gamma0: Class = {
        let raw: Vec<i128> = g1
            .iter()
            .zip(g2.iter())
            .zip(mu.iter())
            .map(|((u, v), w)| u + v - w)
            .collect();
        ctx.quotient.reduce(&raw)
    };
    let g0 = ctx
        .diagonal_components(&mate)
        .remove(&gamma0)
        .ok_or_else(|| {
            Error::Internal("homogeneous part of the mate vanished".into())
        })?;
    if !jacobian_det(h, &g0).sub(&BiPoly::one(kappa)).is_zero() {
        return Err(Error::Internal(
            "homogeneous mate component lost the Jacobian identity".into(),
        ));
    }
    let phi = if index == 1 {
        PolyMap::new(kappa.clone(), h.clone(), g0)
    } else {
        PolyMap::new(kappa.clone(), g0.neg(), h.clone())
    };
    let word = centralizer_decompose(ctx, kappa, &phi)?;
    let mut lifted = TameWord::identity(ring);
    for factor in &word.shears {
        lifted.factors.push(lift_elementary(ring, factor)?);
    }
    let pair = lifted.recompose();
    if !pair.jac.sub(&BiPoly::one(ring)).is_zero() {
        return Err(Error::Internal(
            "lifted centralizer word must have Jacobian determinant 1".into(),
        ));
    }
    let scalar = if index == 1 { word.diag.0.clone() } else { word.diag.1.clone() };
    // Residue identity h = a·h̄ᵢ, checked in κ[x₁,x₂].
    let residue_i = pair.images[(index - 1) as usize].residue(kappa);
    if !residue_i.scale(&kappa.reduce(&scalar)).sub(h).is_zero() {
        return Err(Error::Internal(
            "residue of the lifted pair does not reproduce the coordinate".into(),
        ));
    }
    Ok(HomogeneousLift { pair, scalar, index })
}

/// Replace the mate g of a Γ-homogeneous coordinate f₁ of R[x₁,x₂] by its
/// component in the complementary class, and certify that the homogeneous
/// pair is still an automorphism of R[x₁,x₂].
pub fn homogenize_last_coordinate<F: Field + UnitGroup>(
    ctx: &DiagonalContext<F>,
    ring: &PolyRing<F>,
    f1: &BiPoly<PolyRing<F>>,
    g: &BiPoly<PolyRing<F>>,
) -> Result<BiPoly<PolyRing<F>>> {
    let nu = ctx
        .is_homogeneous(f1)
        .ok_or_else(|| Error::NotHomogeneous(format!("{f1} is not homogeneous")))?;
    let g1 = ctx.gamma1();
    let g2 = ctx.gamma2();
    let (mu, first_position) = if nu == g1 {
        (g2, true)
    } else if nu == g2 {
        (g1, false)
    } else {
        return Err(Error::NotHomogeneous(format!(
            "class of {f1} is neither coordinate class"
        )));
    };
    let g_mu = ctx.diagonal_components(g).remove(&mu).ok_or_else(|| {
        Error::Verification(
            "mate has no component in the complementary class".into(),
        )
    })?;
    let frac = FracRing { poly: ring.clone() };
    let pair = if first_position {
        PolyMap::new(
            frac.clone(),
            poly_to_frac(f1, &frac),
            poly_to_frac(&g_mu, &frac),
        )
    } else {
        PolyMap::new(
            frac.clone(),
            poly_to_frac(&g_mu, &frac),
            poly_to_frac(f1, &frac),
        )
    };
    keller_descend(&pair).map_err(|e| {
        Error::Verification(format!(
            "homogeneous mate component fails to certify: {e}"
        ))
    })?;
    Ok(g_mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::PrimeField;

    fn gf7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    fn ctx_1_2() -> DiagonalContext<PrimeField> {
        // Γ = ⟨(1, 2)⟩ over GF(7): x₁ has class 0, x₂ generates ℤ/3.
        DiagonalContext::new(gf7(), vec![(1, 2)]).unwrap()
    }

    #[test]
    fn mate_of_x1_is_x2() {
        let f = gf7();
        let h = BiPoly::var(&f, 1);
        let g = coordinate_mate(&f, &h).unwrap().unwrap();
        assert_eq!(format!("{g}"), "x2");
    }

    #[test]
    fn mate_of_shifted_coordinate_has_unit_jacobian() {
        // h = x2 + x1^3: the minimal mate with det J(h, g) = 1 is -x1 = 6*x1.
        let f = gf7();
        let x1 = BiPoly::var(&f, 1);
        let h = BiPoly::var(&f, 2).add(&x1.pow(3));
        let g = coordinate_mate(&f, &h).unwrap().unwrap();
        assert_eq!(format!("{g}"), "6*x1");
        assert!(jacobian_det(&h, &g).sub(&BiPoly::one(&f)).is_zero());
    }

    #[test]
    fn non_coordinate_has_no_mate() {
        let f = gf7();
        let h = BiPoly::term(&f, 1, 1, 1); // x1*x2
        assert!(coordinate_mate(&f, &h).unwrap().is_none());
    }

    #[test]
    fn centralizer_word_splits_homogeneous_shear() {
        // Γ = ⟨(2, 1)⟩: x₁ has class 1 mod 3, x₂ class 0; the shear
        // (x1, x2 + 5) and diagonal parts must be recovered exactly.
        let f = gf7();
        let ctx = DiagonalContext::new(f.clone(), vec![(2, 1)]).unwrap();
        // φ = (4x1, 3x2 + 5): image classes γ₁ (pure x1) and γ₂ = 0.
        let x1 = BiPoly::var(&f, 1);
        let x2 = BiPoly::var(&f, 2);
        let phi = PolyMap::new(
            f.clone(),
            x1.scale(&4),
            x2.scale(&3).add(&BiPoly::constant(&f, 5)),
        );
        let word = centralizer_decompose(&ctx, &f, &phi).unwrap();
        assert_eq!(word.diag, (4, 3));
        assert_eq!(word.shears.len(), 1);
        assert!(word.recompose(&f).equals(&phi));
    }

    #[test]
    fn centralizer_word_reduces_cubic_shear() {
        // Γ = ⟨(1, 2)⟩ wait-free: use Γ with γ₁ = 0 so x1^3 has class γ₂
        // exactly when γ₂ = 0... choose the trivial group Γ = ⟨(1, 1)⟩ so
        // every shift is allowed, and factor (x1, x2 + x1^3)∘diag(2, 3).
        let f = gf7();
        let ctx = DiagonalContext::new(f.clone(), vec![(1, 1)]).unwrap();
        let x1 = BiPoly::var(&f, 1);
        let x2 = BiPoly::var(&f, 2);
        let phi = PolyMap::new(
            f.clone(),
            x1.scale(&2),
            x2.scale(&3).add(&x1.pow(3).scale(&5)),
        );
        let word = centralizer_decompose(&ctx, &f, &phi).unwrap();
        assert!(word.recompose(&f).equals(&phi));
        assert_eq!(word.diag, (2, 3));
    }

    #[test]
    fn centralizer_rejects_inhomogeneous_image() {
        let f = gf7();
        let ctx = DiagonalContext::new(f.clone(), vec![(2, 4)]).unwrap();
        let x1 = BiPoly::var(&f, 1);
        let x2 = BiPoly::var(&f, 2);
        // x2 + x1: classes differ under Γ = ⟨(2, 4)⟩.
        let phi = PolyMap::new(f.clone(), x1.clone(), x2.add(&x1));
        let err = centralizer_decompose(&ctx, &f, &phi).unwrap_err();
        assert!(matches!(err, Error::NotHomogeneous(_)));
    }

    #[test]
    fn centralizer_decomposes_gl2_mixing_when_classes_agree() {
        // Γ = ⟨(2, 2)⟩: γ₁ = γ₂, so full GL₂ mixing stays in C_Γ.
        let f = gf7();
        let ctx = DiagonalContext::new(f.clone(), vec![(2, 2)]).unwrap();
        let x1 = BiPoly::var(&f, 1);
        let x2 = BiPoly::var(&f, 2);
        let phi = PolyMap::new(
            f.clone(),
            x1.scale(&2).add(&x2.scale(&3)),
            x1.scale(&1).add(&x2.scale(&4)),
        );
        let word = centralizer_decompose(&ctx, &f, &phi).unwrap();
        assert!(word.recompose(&f).equals(&phi));
        for shear in &word.shears {
            assert!(matches!(shear, TameFactor::Elementary { .. }));
        }
    }

    #[test]
    fn lift_elementary_preserves_shift_monomials() {
        let f = gf7();
        let ring = PolyRing::new(f.clone());
        let kappa = ExtField::new(ring.clone(), ring.var()).unwrap(); // κ = GF(7)[t]/(t) ≅ GF(7)
        let shift = BiPoly::term(&kappa, kappa.reduce(&ring.constant(3)), 0, 2);
        let sigma = TameFactor::elementary(1, shift).unwrap();
        let lifted = lift_elementary(&ring, &sigma).unwrap();
        match lifted {
            TameFactor::Elementary { index, shift } => {
                assert_eq!(index, 1);
                assert_eq!(format!("{shift}"), "3*x2^2");
            }
            _ => panic!("expected elementary"),
        }
    }

    #[test]
    fn homogeneous_lift_of_plain_coordinate() {
        // κ = GF(7)[t]/(t); h = x̄₂ lifts to the pair (x1, x2) with a = 1, i = 2.
        let f = gf7();
        let ring = PolyRing::new(f.clone());
        let ctx = ctx_1_2();
        let kappa = ExtField::new(ring.clone(), ring.var()).unwrap();
        let h = BiPoly::var(&kappa, 2);
        let lift = homogeneous_coordinate_lift(&ctx, &kappa, &ring, &h).unwrap();
        assert_eq!(lift.index, 2);
        assert!(lift.pair.is_identity());
        assert!(ring.is_one(&lift.scalar));
    }

    #[test]
    fn homogeneous_lift_of_scaled_coordinate() {
        // h = 3x̄₂ → pair (x1, x2), a = 3, i = 2.
        let f = gf7();
        let ring = PolyRing::new(f.clone());
        let ctx = ctx_1_2();
        let kappa = ExtField::new(ring.clone(), ring.var()).unwrap();
        let h = BiPoly::var(&kappa, 2).scale(&kappa.reduce(&ring.constant(3)));
        let lift = homogeneous_coordinate_lift(&ctx, &kappa, &ring, &h).unwrap();
        assert_eq!(lift.index, 2);
        assert_eq!(format!("{}", ring.show(&lift.scalar)), "3");
        let residue = lift.pair.images[1].residue(&kappa);
        assert!(residue.scale(&kappa.reduce(&lift.scalar)).sub(&h).is_zero());
    }

    #[test]
    fn homogeneous_lift_of_cubic_coordinate() {
        // Γ = ⟨(4, 1)⟩ over GF(7): γ₁ has order 3, γ₂ = 0, so x̄₂ + c̄·x̄₁³
        // is homogeneous of class γ₂ = 0.  Its lift must reproduce it as
        // a·h̄₂ with det J = 1.
        let f = gf7();
        let ring = PolyRing::new(f.clone());
        let ctx = DiagonalContext::new(f.clone(), vec![(4, 1)]).unwrap();
        let kappa = ExtField::new(ring.clone(), ring.var()).unwrap();
        let x1 = BiPoly::var(&kappa, 1);
        let h = BiPoly::var(&kappa, 2)
            .add(&x1.pow(3).scale(&kappa.reduce(&ring.constant(5))));
        let lift = homogeneous_coordinate_lift(&ctx, &kappa, &ring, &h).unwrap();
        assert_eq!(lift.index, 2);
        let residue = lift.pair.images[1].residue(&kappa);
        assert!(residue.scale(&kappa.reduce(&lift.scalar)).sub(&h).is_zero());
        assert!(lift.pair.jac.sub(&BiPoly::one(&ring)).is_zero());
    }

    #[test]
    fn homogenize_last_coordinate_drops_cross_class_terms() {
        // Γ = ⟨(1, 2)⟩ over GF(7)[t]: f₁ = x₁ (class 0), mate g = x₂ + x₁²
        // has the class-γ₂ component x₂; (x₁, x₂) certifies.
        let f = gf7();
        let ring = PolyRing::new(f.clone());
        let ctx = ctx_1_2();
        let x1 = BiPoly::var(&ring, 1);
        let x2 = BiPoly::var(&ring, 2);
        let g = x2.add(&x1.pow(2));
        let g_mu = homogenize_last_coordinate(&ctx, &ring, &x1, &g).unwrap();
        assert_eq!(format!("{g_mu}"), "x2");
    }

    #[test]
    fn homogenize_last_coordinate_rejects_missing_component() {
        let f = gf7();
        let ring = PolyRing::new(f.clone());
        let ctx = ctx_1_2();
        let x1 = BiPoly::var(&ring, 1);
        let g = x1.pow(2); // no class-γ₂ component at all
        let err = homogenize_last_coordinate(&ctx, &ring, &x1, &g).unwrap_err();
        assert!(matches!(err, Error::Verification(_)));
    }
}
