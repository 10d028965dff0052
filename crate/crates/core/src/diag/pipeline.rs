//! End-to-end diagonalization over R = k[t], and the fixed-coordinate
//! construction that diagonalizes a single automorphism with scalar
//! Jacobian determinant.

use crate::action::{DiagonalContext, FiniteAbelianSubgroup};
use crate::automorphism::PolyMap;
use crate::bipoly::BiPoly;
use crate::error::{Error, Result};
use crate::factor::GroundField;
use crate::ratfunc::FracRing;
use crate::ring::{Field, KAlgebra};
use crate::unipoly::PolyRing;

use super::centralizer::coordinate_mate;
use super::certificate::{map_to_frac, record_stage, Certificate};
use super::descent::descend_conjugator;
use super::field_stage::diagonalize_over_field;

/// Diagonalize a finite abelian subgroup of Aut_R R[x₁,x₂], R = k[t]:
/// re-validate the group data, conjugate the generators into diagonal form
/// over K = k(t), then descend the conjugator to R.  The returned
/// certificate has been verified against the input group.
pub fn diagonalize_finite_abelian<F: GroundField>(
    group: &FiniteAbelianSubgroup<F, PolyRing<F>>,
) -> Result<Certificate<F, PolyRing<F>>> {
    let ring = group.ring.clone();
    let field = group.field.clone();
    // Re-validate rather than trust the caller: orders, commutation, roots.
    let group = FiniteAbelianSubgroup::new(
        ring.clone(),
        field.clone(),
        group.gens.clone(),
        group.orders.clone(),
        group.zetas.clone(),
    )?;
    let frac = FracRing { poly: ring.clone() };
    let gens_k: Vec<PolyMap<FracRing<F>>> =
        group.gens.iter().map(|g| map_to_frac(&frac, g)).collect();
    let group_k = FiniteAbelianSubgroup::unchecked(
        frac.clone(),
        field.clone(),
        gens_k.clone(),
        group.orders.clone(),
        group.zetas.clone(),
    );
    let field_cert = diagonalize_over_field(&group_k)?;
    let ctx = DiagonalContext::new(field.clone(), field_cert.diagonals.clone())?;
    let checks: Vec<(PolyMap<FracRing<F>>, (F::Elem, F::Elem))> = gens_k
        .into_iter()
        .zip(field_cert.diagonals.iter().cloned())
        .collect();
    let (psi, descent_stages) = descend_conjugator(&ctx, &checks, &field_cert.psi)?;
    let mut stages = field_cert.stages;
    stages.extend(descent_stages);
    let cert = Certificate {
        psi,
        diagonals: field_cert.diagonals,
        stages,
    };
    cert.verify(&group)?;
    Ok(cert)
}

/// Whether h lies in K[f], decided by repeated leading-term elimination.
/// When h = Σ cⱼ·f^j, the leading term of h is c_J·(leading term of f)^J for
/// the top exponent J, so subtracting c_J·f^J strictly lowers the leading
/// monomial; the procedure therefore terminates and never misses a member.
fn is_polynomial_in<F: Field>(
    frac: &FracRing<F>,
    h: &BiPoly<FracRing<F>>,
    f: &BiPoly<FracRing<F>>,
) -> bool {
    let df = match f.total_degree() {
        Some(d) if d > 0 => d,
        _ => return false,
    };
    let mut rem = h.clone();
    loop {
        let d = match rem.total_degree() {
            None | Some(0) => return true,
            Some(d) => d,
        };
        if d % df != 0 {
            return false;
        }
        let fj = f.pow(d / df);
        let (e, c) = rem.leading().expect("nonzero");
        let (ef, cf) = fj.leading().expect("nonzero");
        if e != ef {
            return false;
        }
        let ratio = match frac.div(c, cf) {
            Ok(r) => r,
            Err(_) => return false,
        };
        rem = rem.sub(&fj.scale(&ratio));
    }
}

/// Diagonalize ⟨φ⟩ for φ ∈ Aut_R R[x₁,x₂] with det Jφ = u ∈ k∖{1}, given a
/// coordinate f of K[x₁,x₂] fixed by φ.
///
/// With g a mate of f, the difference h = φ(g) − u·g is a polynomial in f,
/// so the frame ψ = (f, g + (u−1)⁻¹h) satisfies φ(ψ₂) = u·ψ₂ and hence
/// ψ⁻¹∘φ∘ψ = (x₁, u·x₂) over K; the frame is then descended to R.  The
/// group ⟨(1,u)⟩ may be infinite — the descent only uses the induced
/// grading, never the group order.
pub fn fixed_coordinate_conjugator<F: GroundField>(
    phi: &PolyMap<PolyRing<F>>,
    f: &BiPoly<FracRing<F>>,
) -> Result<Certificate<F, PolyRing<F>>> {
    let ring = phi.ring.clone();
    let field = ring.base.clone();
    let frac = FracRing { poly: ring.clone() };
    if phi.jac.total_degree() != Some(0) {
        return Err(Error::JacobianNotUnit(format!("{}", phi.jac)));
    }
    let u = ring
        .try_scalar(&phi.jac.coeff(0, 0))
        .ok_or_else(|| Error::JacobianNotUnit(format!("{}", phi.jac)))?;
    if field.is_zero(&u) {
        return Err(Error::JacobianNotUnit("zero determinant".into()));
    }
    if field.is_one(&u) {
        return Err(Error::Unsupported(
            "the fixed-coordinate frame needs det Jφ ≠ 1".into(),
        ));
    }
    let phi_k = map_to_frac(&frac, phi);
    if !phi_k.apply(f).sub(f).is_zero() {
        return Err(Error::Verification(format!("{phi} does not fix {f}")));
    }
    let g = coordinate_mate(&frac, f)?.ok_or_else(|| Error::NoMate(format!("{f}")))?;
    let u_k = frac.embed_scalar(&u);
    let h = phi_k.apply(&g).sub(&g.scale(&u_k));
    if !is_polynomial_in(&frac, &h, f) {
        return Err(Error::Verification(format!(
            "φ(g) − u·g = {h} is not a polynomial in the fixed coordinate {f}"
        )));
    }
    let shift = field.inv(&field.sub(&u, &field.one()))?;
    let g_prime = g.add(&h.scale(&frac.embed_scalar(&shift)));
    let psi_k = PolyMap::new(frac.clone(), f.clone(), g_prime);
    let mut stages = Vec::new();
    record_stage(
        &mut stages,
        "fixed-coordinate-frame",
        &format!("{phi}"),
        &format!("{psi_k}"),
    );
    let ctx = DiagonalContext::new(field.clone(), vec![(field.one(), u.clone())])?;
    let checks = vec![(phi_k, (field.one(), u.clone()))];
    let (psi, descent_stages) = descend_conjugator(&ctx, &checks, &psi_k)?;
    stages.extend(descent_stages);
    Ok(Certificate {
        psi,
        diagonals: vec![(field.one(), u)],
        stages,
    })
}
