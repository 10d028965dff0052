//! Endomorphisms and automorphisms of the polynomial plane R[x₁,x₂]:
//! composition, tame-word factorization with degree descent (which doubles
//! as the automorphism test), inversion, and descent of unit-Jacobian maps
//! from k(t)-coefficients to k[t]-coefficients.

use std::fmt;

use crate::bipoly::{frac_to_poly, jacobian_det, BiPoly};
use crate::error::{Error, Result};
use crate::ratfunc::FracRing;
use crate::ring::{Field, KAlgebra, Ring};
use crate::unipoly::PolyRing;

/// A pair of images (φ(x₁), φ(x₂)). Composition reads φ as the ring map
/// g ↦ g(φ₁, φ₂), so (φ∘ψ)(x_i) = φ(ψ(x_i)).
#[derive(Clone, Debug)]
pub struct PolyMap<R: Ring> {
    pub ring: R,
    pub images: [BiPoly<R>; 2],
    /// Jacobian determinant, computed once at construction.
    pub jac: BiPoly<R>,
}

impl<R: Ring> PolyMap<R> {
    pub fn new(ring: R, f1: BiPoly<R>, f2: BiPoly<R>) -> Self {
        let jac = jacobian_det(&f1, &f2);
        PolyMap { ring, images: [f1, f2], jac }
    }

    pub fn identity(ring: &R) -> Self {
        PolyMap::new(ring.clone(), BiPoly::var(ring, 1), BiPoly::var(ring, 2))
    }

    pub fn diagonal(ring: &R, a: R::Elem, b: R::Elem) -> Self {
        let f1 = BiPoly::var(ring, 1).scale(&a);
        let f2 = BiPoly::var(ring, 2).scale(&b);
        PolyMap::new(ring.clone(), f1, f2)
    }

    /// The ring map g ↦ g(φ₁, φ₂).
    pub fn apply(&self, g: &BiPoly<R>) -> BiPoly<R> {
        g.substitute(&self.images[0], &self.images[1])
    }

    /// φ∘ψ: images are φ applied to ψ's images.
    pub fn compose(&self, other: &Self) -> Self {
        PolyMap::new(
            self.ring.clone(),
            self.apply(&other.images[0]),
            self.apply(&other.images[1]),
        )
    }

    /// n-fold self-composition (n ≥ 0; n = 0 is the identity).
    pub fn power(&self, n: u64) -> Self {
        let mut acc = PolyMap::identity(&self.ring);
        for _ in 0..n {
            acc = self.compose(&acc);
        }
        acc
    }

    pub fn equals(&self, other: &Self) -> bool {
        self.images[0].sub(&other.images[0]).is_zero()
            && self.images[1].sub(&other.images[1]).is_zero()
    }

    pub fn is_identity(&self) -> bool {
        self.equals(&PolyMap::identity(&self.ring))
    }

    /// Sum of the total degrees of the two images (a constant counts 0).
    pub fn degree(&self) -> u32 {
        self.images[0].total_degree().unwrap_or(0) + self.images[1].total_degree().unwrap_or(0)
    }
}

impl<R: Ring> fmt::Display for PolyMap<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.images[0], self.images[1])
    }
}

/// One factor of a tame word: a shear in one coordinate, or an affine map.
#[derive(Clone, Debug)]
pub enum TameFactor<R: Ring> {
    /// x_index ← x_index + shift(x_other), the other coordinate fixed.
    Elementary { index: u8, shift: BiPoly<R> },
    /// x ← M·x + c.
    Affine { mat: [[R::Elem; 2]; 2], trans: [R::Elem; 2] },
}

impl<R: Ring> TameFactor<R> {
    pub fn elementary(index: u8, shift: BiPoly<R>) -> Result<Self> {
        if !(index == 1 || index == 2) {
            return Err(Error::Internal("coordinate index must be 1 or 2".into()));
        }
        let bad = shift.terms().any(|(e, _)| if index == 1 { e.a != 0 } else { e.b != 0 });
        if bad {
            return Err(Error::NotAutomorphism(
                "elementary shift must involve only the other variable".into(),
            ));
        }
        Ok(TameFactor::Elementary { index, shift })
    }

    pub fn diagonal(ring: &R, a: R::Elem, b: R::Elem) -> Self {
        TameFactor::Affine {
            mat: [[a, ring.zero()], [ring.zero(), b]],
            trans: [ring.zero(), ring.zero()],
        }
    }

    pub fn to_map(&self, ring: &R) -> PolyMap<R> {
        match self {
            TameFactor::Elementary { index, shift } => {
                let fixed = BiPoly::var(ring, 3 - index);
                let moved = BiPoly::var(ring, *index).add(shift);
                let (f1, f2) = if *index == 1 { (moved, fixed) } else { (fixed, moved) };
                PolyMap::new(ring.clone(), f1, f2)
            }
            TameFactor::Affine { mat, trans } => {
                let lin = |r: usize| {
                    BiPoly::var(ring, 1)
                        .scale(&mat[r][0])
                        .add(&BiPoly::var(ring, 2).scale(&mat[r][1]))
                        .add(&BiPoly::constant(ring, trans[r].clone()))
                };
                PolyMap::new(ring.clone(), lin(0), lin(1))
            }
        }
    }

    /// True when the factor is an affine map with zero off-diagonal part
    /// and zero translation.
    pub fn is_diagonal(&self, ring: &R) -> bool {
        match self {
            TameFactor::Elementary { shift, .. } => shift.is_zero(),
            TameFactor::Affine { mat, trans } => {
                ring.is_zero(&mat[0][1])
                    && ring.is_zero(&mat[1][0])
                    && ring.is_zero(&trans[0])
                    && ring.is_zero(&trans[1])
            }
        }
    }
}

/// Ordered factor list: the word evaluates to factors[0]∘factors[1]∘⋯.
#[derive(Clone, Debug)]
pub struct TameWord<R: Ring> {
    pub ring: R,
    pub factors: Vec<TameFactor<R>>,
}

impl<R: Ring> TameWord<R> {
    pub fn identity(ring: &R) -> Self {
        TameWord { ring: ring.clone(), factors: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn recompose(&self) -> PolyMap<R> {
        let mut acc = PolyMap::identity(&self.ring);
        for f in &self.factors {
            acc = acc.compose(&f.to_map(&self.ring));
        }
        acc
    }
}

impl<F: Field> TameWord<F> {
    /// Reverse the factors and invert each one.
    pub fn inverse(&self) -> Result<TameWord<F>> {
        let mut factors = Vec::with_capacity(self.factors.len());
        for f in self.factors.iter().rev() {
            factors.push(invert_factor(&self.ring, f)?);
        }
        Ok(TameWord { ring: self.ring.clone(), factors })
    }
}

fn invert_factor<F: Field>(field: &F, f: &TameFactor<F>) -> Result<TameFactor<F>> {
    match f {
        TameFactor::Elementary { index, shift } => Ok(TameFactor::Elementary {
            index: *index,
            shift: shift.neg(),
        }),
        TameFactor::Affine { mat, trans } => {
            let det = field.sub(
                &field.mul(&mat[0][0], &mat[1][1]),
                &field.mul(&mat[0][1], &mat[1][0]),
            );
            if field.is_zero(&det) {
                return Err(Error::NotAutomorphism("affine factor is singular".into()));
            }
            let di = field.inv(&det)?;
            let inv = [
                [field.mul(&mat[1][1], &di), field.neg(&field.mul(&mat[0][1], &di))],
                [field.neg(&field.mul(&mat[1][0], &di)), field.mul(&mat[0][0], &di)],
            ];
            let t = [
                field.neg(&field.add(
                    &field.mul(&inv[0][0], &trans[0]),
                    &field.mul(&inv[0][1], &trans[1]),
                )),
                field.neg(&field.add(
                    &field.mul(&inv[1][0], &trans[0]),
                    &field.mul(&inv[1][1], &trans[1]),
                )),
            ];
            Ok(TameFactor::Affine { mat: inv, trans: t })
        }
    }
}

/// Factor an automorphism of F[x₁,x₂] into elementary shears and one affine
/// map by repeated leading-form cancellation on the higher-degree image
/// (ties reduce the first image). Rejection at any stage proves the input
/// is not an automorphism.
pub fn vdk_decompose<F: Field>(phi: &PolyMap<F>) -> Result<TameWord<F>> {
    let field = &phi.ring;
    let mut cur = phi.clone();
    let mut tail: Vec<TameFactor<F>> = Vec::new();
    let budget = cur.degree() as usize + 4;
    for _ in 0..budget {
        let d1 = cur.images[0].total_degree();
        let d2 = cur.images[1].total_degree();
        let (Some(d1), Some(d2)) = (d1, d2) else {
            return Err(Error::NotAutomorphism("an image is zero".into()));
        };
        if d1 == 0 || d2 == 0 {
            return Err(Error::NotAutomorphism("an image is constant".into()));
        }
        if d1 == 1 && d2 == 1 {
            let mat = [
                [cur.images[0].coeff(1, 0), cur.images[0].coeff(0, 1)],
                [cur.images[1].coeff(1, 0), cur.images[1].coeff(0, 1)],
            ];
            let trans = [cur.images[0].coeff(0, 0), cur.images[1].coeff(0, 0)];
            let det = field.sub(
                &field.mul(&mat[0][0], &mat[1][1]),
                &field.mul(&mat[0][1], &mat[1][0]),
            );
            if field.is_zero(&det) {
                return Err(Error::NotAutomorphism("affine part is singular".into()));
            }
            let mut factors = vec![TameFactor::Affine { mat, trans }];
            factors.extend(tail.into_iter().rev());
            let word = TameWord { ring: field.clone(), factors };
            debug_assert!(word.recompose().equals(phi));
            return Ok(word);
        }
        // Reduce the higher-degree image; on a tie reduce the first.
        let (i, j, di, dj) = if d1 >= d2 { (0, 1, d1, d2) } else { (1, 0, d2, d1) };
        if di % dj != 0 {
            return Err(Error::NotAutomorphism(format!(
                "image degrees {di} and {dj} admit no leading cancellation",
            )));
        }
        let l = di / dj;
        let lead_i = cur.images[i].leading_form();
        let lead_j_pow = cur.images[j].leading_form().pow(l);
        let (_, ci) = cur.images[i].leading().expect("nonzero");
        let (_, cj) = lead_j_pow.leading().expect("nonzero");
        let c = field.div(ci, cj)?;
        if !lead_i.sub(&lead_j_pow.scale(&c)).is_zero() {
            return Err(Error::NotAutomorphism(
                "leading forms are not proportional".into(),
            ));
        }
        let shift = BiPoly::var(field, (j + 1) as u8)
            .pow(l)
            .scale(&field.neg(&c));
        let sigma = TameFactor::elementary((i + 1) as u8, shift.clone())?;
        let next = cur.compose(&sigma.to_map(field));
        assert!(
            next.images[i].total_degree().unwrap_or(0) < di,
            "leading cancellation must lower the degree"
        );
        cur = next;
        tail.push(TameFactor::Elementary { index: (i + 1) as u8, shift: shift.neg() });
    }
    Err(Error::NotAutomorphism(
        "degree descent exceeded its budget".into(),
    ))
}

/// Inverse of an automorphism over a field, via tame factorization.
pub fn invert<F: Field>(phi: &PolyMap<F>) -> Result<PolyMap<F>> {
    let word = vdk_decompose(phi)?;
    let inv = word.inverse()?.recompose();
    if !phi.compose(&inv).is_identity() || !inv.compose(phi).is_identity() {
        return Err(Error::Internal("inverse failed its composition check".into()));
    }
    Ok(inv)
}

/// Restrict a k(t)-automorphism to k[t]-coefficients. Requires polynomial
/// entries, Jacobian determinant in k*, and a polynomial-entry inverse;
/// all three are verified.
pub fn keller_descend<F: Field>(psi: &PolyMap<FracRing<F>>) -> Result<PolyMap<PolyRing<F>>> {
    let frac = &psi.ring;
    let poly = frac.poly.clone();
    let f1 = frac_to_poly(&psi.images[0], &poly)
        .ok_or_else(|| Error::NotAutomorphism("an image has a denominator".into()))?;
    let f2 = frac_to_poly(&psi.images[1], &poly)
        .ok_or_else(|| Error::NotAutomorphism("an image has a denominator".into()))?;
    let scalar_jac = match psi.jac.total_degree() {
        Some(0) => frac.try_scalar(&psi.jac.coeff(0, 0)),
        _ => None,
    };
    let Some(j0) = scalar_jac else {
        return Err(Error::JacobianNotUnit(format!("{}", psi.jac)));
    };
    if frac.poly.base.is_zero(&j0) {
        return Err(Error::JacobianNotUnit("zero determinant".into()));
    }
    let inv = invert(psi)?;
    for im in &inv.images {
        if frac_to_poly(im, &poly).is_none() {
            return Err(Error::NotAutomorphism(
                "the inverse has a denominator".into(),
            ));
        }
    }
    Ok(PolyMap::new(poly, f1, f2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::PrimeField;
    use crate::unipoly::PolyRing;

    fn gf7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    fn rt() -> PolyRing<PrimeField> {
        PolyRing::new(gf7())
    }

    fn kt() -> FracRing<PrimeField> {
        FracRing::new(gf7())
    }

    /// (x1, x2 + t·x1^3) over GF(7)[t].
    fn shear_rt() -> PolyMap<PolyRing<PrimeField>> {
        let r = rt();
        let t = r.var();
        let f2 = BiPoly::var(&r, 2).add(&BiPoly::term(&r, t, 3, 0));
        PolyMap::new(r.clone(), BiPoly::var(&r, 1), f2)
    }

    #[test]
    fn composition_follows_the_ring_map_convention() {
        let r = rt();
        let delta = PolyMap::diagonal(&r, r.one(), r.constant(2));
        let e = shear_rt();
        // e∘δ scales the shear coefficient: (x1, 2x2 + 2t·x1^3).
        let ed = e.compose(&delta);
        assert_eq!(format!("{ed}"), "(x1, 2*t*x1^3 + 2*x2)");
        // δ∘e leaves it alone: (x1, 2x2 + t·x1^3).
        let de = delta.compose(&e);
        assert_eq!(format!("{de}"), "(x1, t*x1^3 + 2*x2)");
    }

    #[test]
    fn power_and_identity() {
        let e = shear_rt();
        assert!(e.power(0).is_identity());
        let e3 = e.power(3);
        // Triangular shears add their shifts: x2 + 3t·x1^3.
        assert_eq!(format!("{e3}"), "(x1, 3*t*x1^3 + x2)");
        assert_eq!(e.degree(), 4);
    }

    #[test]
    fn tame_word_recomposes_and_inverts() {
        let f = gf7();
        let s1 = TameFactor::elementary(2, BiPoly::term(&f, 3, 2, 0)).unwrap();
        let s2 = TameFactor::elementary(1, BiPoly::term(&f, 1, 0, 5)).unwrap();
        let aff = TameFactor::Affine { mat: [[2, 1], [0, 4]], trans: [1, 6] };
        let word = TameWord { ring: f.clone(), factors: vec![aff, s1, s2] };
        let phi = word.recompose();
        let inv = word.inverse().unwrap().recompose();
        assert!(phi.compose(&inv).is_identity());
        assert!(inv.compose(&phi).is_identity());
    }

    #[test]
    fn decompose_recovers_a_built_word() {
        let f = gf7();
        let s1 = TameFactor::elementary(2, BiPoly::term(&f, 3, 2, 0)).unwrap();
        let s2 = TameFactor::elementary(1, BiPoly::term(&f, 2, 0, 3)).unwrap();
        let aff = TameFactor::Affine { mat: [[1, 2], [3, 0]], trans: [0, 5] };
        let word = TameWord { ring: f.clone(), factors: vec![aff, s1, s2] };
        let phi = word.recompose();
        let re = vdk_decompose(&phi).unwrap();
        assert!(re.recompose().equals(&phi));
        let inv = invert(&phi).unwrap();
        assert!(phi.compose(&inv).is_identity());
    }

    #[test]
    fn decompose_rejects_non_automorphisms() {
        let f = gf7();
        // Zero Jacobian with mixed images.
        let phi = PolyMap::new(
            f.clone(),
            BiPoly::var(&f, 1),
            BiPoly::var(&f, 1).mul(&BiPoly::var(&f, 2)),
        );
        assert!(matches!(vdk_decompose(&phi), Err(Error::NotAutomorphism(_))));
        // Constant image.
        let psi = PolyMap::new(f.clone(), BiPoly::one(&f), BiPoly::var(&f, 2));
        assert!(matches!(vdk_decompose(&psi), Err(Error::NotAutomorphism(_))));
        // Singular affine part.
        let lin = PolyMap::new(
            f.clone(),
            BiPoly::var(&f, 1).add(&BiPoly::var(&f, 2)),
            BiPoly::var(&f, 1).add(&BiPoly::var(&f, 2)),
        );
        assert!(matches!(vdk_decompose(&lin), Err(Error::NotAutomorphism(_))));
        // Equal-degree images with non-proportional leading forms.
        let sq = PolyMap::new(
            f.clone(),
            BiPoly::term(&f, 1, 2, 0).add(&BiPoly::var(&f, 2)),
            BiPoly::term(&f, 1, 0, 2).add(&BiPoly::var(&f, 1)),
        );
        assert!(matches!(vdk_decompose(&sq), Err(Error::NotAutomorphism(_))));
    }

    #[test]
    fn decompose_works_over_the_fraction_field() {
        let k = kt();
        let t = k.from_poly(k.poly.var());
        // (x1 + t·x2^2, x2) then a diagonal twist.
        let shear = TameFactor::elementary(1, BiPoly::term(&k, t.clone(), 0, 2)).unwrap();
        let diag = TameFactor::diagonal(&k, k.embed_scalar(&3), k.embed_scalar(&1));
        let word = TameWord { ring: k.clone(), factors: vec![diag, shear] };
        let phi = word.recompose();
        let re = vdk_decompose(&phi).unwrap();
        assert!(re.recompose().equals(&phi));
        let inv = invert(&phi).unwrap();
        assert!(inv.compose(&phi).is_identity());
    }

    #[test]
    fn keller_descent_accepts_integral_unit_jacobian_maps() {
        let k = kt();
        let t = k.from_poly(k.poly.var());
        let f2 = BiPoly::var(&k, 2).add(&BiPoly::term(&k, t, 3, 0));
        let psi = PolyMap::new(k.clone(), BiPoly::var(&k, 1), f2);
        let down = keller_descend(&psi).unwrap();
        assert_eq!(format!("{down}"), "(x1, t*x1^3 + x2)");
    }

    #[test]
    fn keller_descent_rejects_bad_inputs() {
        let k = kt();
        let t = k.from_poly(k.poly.var());
        // Jacobian determinant t is not a scalar.
        let stretch = PolyMap::new(
            k.clone(),
            BiPoly::var(&k, 1).scale(&t),
            BiPoly::var(&k, 2),
        );
        assert!(matches!(keller_descend(&stretch), Err(Error::JacobianNotUnit(_))));
        // Image with a denominator.
        let inv_t = k.frac(k.poly.one(), k.poly.var()).unwrap();
        let denom = PolyMap::new(
            k.clone(),
            BiPoly::var(&k, 1).scale(&inv_t),
            BiPoly::var(&k, 2),
        );
        assert!(matches!(keller_descend(&denom), Err(Error::NotAutomorphism(_))));
    }

    #[test]
    fn elementary_shift_validation() {
        let f = gf7();
        assert!(TameFactor::elementary(1, BiPoly::term(&f, 1, 2, 0)).is_err());
        assert!(TameFactor::elementary(1, BiPoly::term(&f, 1, 0, 2)).is_ok());
    }
}
