//! Conjugation certificates: the conjugator, the diagonal images of every
//! group generator, and a replayable log of the stages that produced them.
//!
//! A certificate is only handed out after its master property has been
//! checked exactly: ψ⁻¹∘φⱼ∘ψ equals the recorded diagonal map for every
//! generator φⱼ, with all arithmetic over the fraction field.

use sha2::{Digest, Sha256};

use crate::action::FiniteAbelianSubgroup;
use crate::automorphism::{invert, PolyMap};
use crate::bipoly::poly_to_frac;
use crate::error::{Error, Result};
use crate::ratfunc::FracRing;
use crate::fields::UnitGroup;
use crate::ring::{Field, KAlgebra};
use crate::unipoly::PolyRing;

/// One replayable step of a diagonalization run.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct StageRecord {
    /// What was done, e.g. `peak-reduction i=1 l=3` or `descent-step p=t`.
    pub operation: String,
    /// SHA-256 of the canonical rendering of the stage's input.
    pub input_hash: String,
    /// Canonical rendering of the cumulative conjugator after the stage.
    pub conjugator: String,
}

/// Hex SHA-256 of a canonical string rendering.
pub fn stage_hash(input: &str) -> String {
    let digest = Sha256::digest(input.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// Record a stage: operation name, hash of the input rendering, and the
/// conjugator after the stage.
pub fn record_stage(log: &mut Vec<StageRecord>, operation: &str, input: &str, conjugator: &str) {
    log.push(StageRecord {
        operation: operation.to_string(),
        input_hash: stage_hash(input),
        conjugator: conjugator.to_string(),
    });
}

/// Proof object for one diagonalization: a conjugator ψ with coefficients in
/// `R`, plus the diagonal pair (aⱼ, bⱼ) attached to each group generator.
#[derive(Debug, Clone)]
pub struct Certificate<F: Field + UnitGroup, R: KAlgebra<F>> {
    pub psi: PolyMap<R>,
    /// Per generator j: ψ⁻¹∘φⱼ∘ψ = (aⱼ·x₁, bⱼ·x₂).
    pub diagonals: Vec<(F::Elem, F::Elem)>,
    pub stages: Vec<StageRecord>,
}

/// Check ψ⁻¹∘φ∘ψ = (a·x₁, b·x₂) for every supplied pair, exactly, over a
/// coefficient field `L`.
///
/// The equality is verified in the form ψ⁻¹∘φ = δ∘ψ⁻¹ after first checking
/// ψ∘ψ⁻¹ = ψ⁻¹∘ψ = id.  This shape only ever substitutes the small maps
/// ψ, ψ⁻¹, and δ into other polynomials; it never takes powers of φ itself,
/// whose images may be orders of magnitude larger than ψ's.
pub fn verify_conjugation<F, L>(
    field: &F,
    ring: &L,
    checks: &[(PolyMap<L>, (F::Elem, F::Elem))],
    psi: &PolyMap<L>,
) -> Result<()>
where
    F: Field + UnitGroup,
    L: Field + KAlgebra<F>,
{
    let psi_inv = invert(psi)?;
    if !psi.compose(&psi_inv).is_identity() || !psi_inv.compose(psi).is_identity() {
        return Err(Error::Verification(
            "conjugator and its computed inverse do not compose to the identity".into(),
        ));
    }
    for (j, (phi, (a, b))) in checks.iter().enumerate() {
        let delta = PolyMap::diagonal(ring, ring.embed_scalar(a), ring.embed_scalar(b));
        let lhs = psi_inv.compose(phi);
        let rhs = delta.compose(&psi_inv);
        if !lhs.equals(&rhs) {
            return Err(Error::Verification(format!(
                "conjugation equality fails for generator {}: ψ⁻¹∘φ = {} but ({}, {}) requires {}",
                j + 1,
                lhs,
                field.show(a),
                field.show(b),
                rhs,
            )));
        }
    }
    Ok(())
}

/// Check that every diagonal entry lies in the cyclic group generated by the
/// declared root of unity of its generator, and that each diagonal pair has
/// exact multiplicative order equal to the declared order of its generator.
/// Together with the conjugation equalities this pins the order of every
/// group generator without ever composing the generators themselves.
pub fn verify_entries_are_root_powers<F: Field + UnitGroup>(
    field: &F,
    orders: &[u64],
    zetas: &[F::Elem],
    diagonals: &[(F::Elem, F::Elem)],
) -> Result<()> {
    for (j, (a, b)) in diagonals.iter().enumerate() {
        let d = orders[j];
        let zeta = &zetas[j];
        for (name, entry) in [("first", a), ("second", b)] {
            let mut power = field.one();
            let mut found = false;
            for _ in 0..d {
                if field.cmp_elem(&power, entry) == std::cmp::Ordering::Equal {
                    found = true;
                    break;
                }
                power = field.mul(&power, zeta);
            }
            if !found {
                return Err(Error::Verification(format!(
                    "{} diagonal entry {} of generator {} is not a power of its root of unity {}",
                    name,
                    field.show(entry),
                    j + 1,
                    field.show(zeta),
                )));
            }
        }
        let pair_order = match (field.unit_order(a), field.unit_order(b)) {
            (Some(oa), Some(ob)) => {
                fn gcd(a: u64, b: u64) -> u64 {
                    if b == 0 { a } else { gcd(b, a % b) }
                }
                Some(oa / gcd(oa, ob) * ob)
            }
            _ => None,
        };
        if pair_order != Some(d) {
            return Err(Error::Verification(format!(
                "diagonal pair ({}, {}) of generator {} does not have exact order {}",
                field.show(a),
                field.show(b),
                j + 1,
                d,
            )));
        }
    }
    Ok(())
}

impl<F: Field + UnitGroup> Certificate<F, PolyRing<F>> {
    /// Full verification against a group over R = k[t]: conjugation is
    /// checked exactly over K = k(t), and every diagonal entry must be a
    /// power of the declared root of unity of its generator.
    pub fn verify(&self, group: &FiniteAbelianSubgroup<F, PolyRing<F>>) -> Result<()> {
        if group.gens.len() != self.diagonals.len() {
            return Err(Error::Verification(format!(
                "certificate records {} diagonals for {} generators",
                self.diagonals.len(),
                group.gens.len()
            )));
        }
        // ψ must be invertible over R itself: det Jψ has to be a nonzero
        // scalar of k, not merely a unit of K = k(t).
        let scalar_jac = match self.psi.jac.total_degree() {
            Some(0) => self.psi.ring.try_scalar(&self.psi.jac.coeff(0, 0)),
            _ => None,
        };
        match scalar_jac {
            Some(c) if !group.field.is_zero(&c) => {}
            _ => {
                return Err(Error::Verification(format!(
                    "conjugator jacobian {} is not a nonzero scalar of the ground field",
                    self.psi.jac
                )))
            }
        }
        let frac = FracRing { poly: self.psi.ring.clone() };
        let psi_k = map_to_frac(&frac, &self.psi);
        let checks: Vec<(PolyMap<FracRing<F>>, (F::Elem, F::Elem))> = group
            .gens
            .iter()
            .zip(self.diagonals.iter())
            .map(|(phi, pair)| (map_to_frac(&frac, phi), pair.clone()))
            .collect();
        verify_conjugation(&group.field, &frac, &checks, &psi_k)?;
        verify_entries_are_root_powers(&group.field, &group.orders, &group.zetas, &self.diagonals)
    }
}

impl<F: Field + UnitGroup + KAlgebra<F>> Certificate<F, F> {
    /// Verification for a certificate whose conjugator already lives over
    /// the coefficient field itself.
    pub fn verify_over_field(&self, group: &FiniteAbelianSubgroup<F, F>) -> Result<()> {
        if group.gens.len() != self.diagonals.len() {
            return Err(Error::Verification(format!(
                "certificate records {} diagonals for {} generators",
                self.diagonals.len(),
                group.gens.len()
            )));
        }
        let checks: Vec<(PolyMap<F>, (F::Elem, F::Elem))> = group
            .gens
            .iter()
            .zip(self.diagonals.iter())
            .map(|(phi, pair)| (phi.clone(), pair.clone()))
            .collect();
        verify_conjugation(&group.field, &self.psi.ring, &checks, &self.psi)?;
        verify_entries_are_root_powers(&group.field, &group.orders, &group.zetas, &self.diagonals)
    }
}

/// Embed a map over R = k[t] into K = k(t) coefficient-wise.
pub fn map_to_frac<F: Field>(frac: &FracRing<F>, m: &PolyMap<PolyRing<F>>) -> PolyMap<FracRing<F>> {
    PolyMap::new(
        frac.clone(),
        poly_to_frac(&m.images[0], frac),
        poly_to_frac(&m.images[1], frac),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipoly::BiPoly;
    use crate::fields::PrimeField;

    fn gf7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    #[test]
    fn stage_hash_is_stable_hex_sha256() {
        // Fixed digest of the empty string, a universal reference value.
        assert_eq!(
            stage_hash(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(stage_hash("x1").len(), 64);
        assert_ne!(stage_hash("x1"), stage_hash("x2"));
    }

    #[test]
    fn verify_conjugation_accepts_shear_conjugate() {
        // ψ = (x1, x2 + x1^3) conjugates (x1, 2x2 + x1^3)... check the known
        // identity ψ⁻¹∘φ∘ψ = (x1, 2x2) over GF(7) directly.
        let f = gf7();
        let x1 = BiPoly::var(&f, 1);
        let x2 = BiPoly::var(&f, 2);
        let cube = x1.pow(3);
        let psi = PolyMap::new(f.clone(), x1.clone(), x2.add(&cube));
        let phi = PolyMap::new(
            f.clone(),
            x1.clone(),
            x2.scale(&2).add(&cube),
        );
        let checks = vec![(phi, (1u64, 2u64))];
        verify_conjugation(&f, &f, &checks, &psi).unwrap();
    }

    #[test]
    fn verify_rejects_a_conjugator_with_nonscalar_jacobian() {
        // ψ = (t·x1, x2) commutes with every diagonal map, so conjugation
        // alone would pass; the jacobian gate must reject it because t is
        // not invertible in k[t].
        use crate::action::FiniteAbelianSubgroup;
        use crate::unipoly::PolyRing;
        let f = gf7();
        let r = PolyRing::new(f.clone());
        let t = r.var();
        let delta = PolyMap::diagonal(&r, r.embed_scalar(&2), r.embed_scalar(&4));
        let group = FiniteAbelianSubgroup::new(
            r.clone(),
            f.clone(),
            vec![delta],
            vec![3],
            vec![2],
        )
        .unwrap();
        let psi = PolyMap::new(r.clone(), BiPoly::var(&r, 1).scale(&t), BiPoly::var(&r, 2));
        let cert = Certificate {
            psi,
            diagonals: vec![(2u64, 4u64)],
            stages: Vec::new(),
        };
        let err = cert.verify(&group).unwrap_err();
        assert!(matches!(err, Error::Verification(_)));
        assert!(err.to_string().contains("jacobian"));
    }

    #[test]
    fn verify_conjugation_rejects_wrong_diagonal() {
        let f = gf7();
        let psi = PolyMap::identity(&f);
        let phi = PolyMap::diagonal(&f, 1, 2);
        let checks = vec![(phi, (1u64, 3u64))];
        let err = verify_conjugation(&f, &f, &checks, &psi).unwrap_err();
        assert!(matches!(err, Error::Verification(_)));
    }

    #[test]
    fn entries_must_be_root_powers() {
        let f = gf7();
        // Generator of order 3 with zeta = 2: powers {1, 2, 4}.
        verify_entries_are_root_powers(&f, &[3], &[2], &[(1, 4)]).unwrap();
        let err = verify_entries_are_root_powers(&f, &[3], &[2], &[(1, 3)]).unwrap_err();
        assert!(matches!(err, Error::Verification(_)));
    }
}
