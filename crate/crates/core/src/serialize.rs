//! JSON certificates.  Every ring element is stored as canonical grammar
//! text, so a document can be audited by eye and re-verified by any process
//! that has the parser — no solver state is needed for replay.
//!
//! Schema (all strings in the shared text grammar):
//!
//! ```json
//! {
//!   "field": "GF(7)",
//!   "ring": "k[t]",
//!   "generators": [
//!     { "name": "phi1", "order": 3, "zeta": "2", "map": "(x1, t*x1^3 + 2*x2)" }
//!   ],
//!   "conjugator": "(x1, t*x1^3 + x2)",
//!   "diagonals": [["1", "2"]],
//!   "stages": [
//!     { "operation": "descent-step m=1 p=t", "input_hash": "…", "conjugator": "…" }
//!   ],
//!   "verify": {
//!     "conjugates": ["(x1, 2*x2)"],
//!     "jacobian": "1"
//!   }
//! }
//! ```
//!
//! The `verify` block spells out the claims to replay: `conjugates[j]` is the
//! diagonal map that conjugating generator j by the conjugator must produce,
//! and `jacobian` is the scalar determinant of the conjugator's Jacobian.

use serde::{Deserialize, Serialize};

use crate::action::FiniteAbelianSubgroup;
use crate::automorphism::PolyMap;
use crate::bipoly::frac_to_poly;
use crate::diag::{Certificate, StageRecord};
use crate::error::{Error, Result};
use crate::fields::{PrimeField, Rationals, UnitGroup};
use crate::parse::{
    parse_field_and_suffix, parse_map, parse_scalar, FieldSpec, ParseField, ParseRing, RingSpec,
};
use crate::ratfunc::FracRing;
use crate::ring::KAlgebra;
use crate::unipoly::PolyRing;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorDoc {
    pub name: String,
    pub order: u64,
    pub zeta: String,
    pub map: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyDoc {
    /// Diagonal map each generator must conjugate to, e.g. `(2*x1, 4*x2)`.
    pub conjugates: Vec<String>,
    /// Scalar value of det J(conjugator).
    pub jacobian: String,
}

/// A complete certificate document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub field: String,
    pub ring: String,
    pub generators: Vec<GeneratorDoc>,
    pub conjugator: String,
    pub diagonals: Vec<[String; 2]>,
    pub stages: Vec<StageRecord>,
    pub verify: VerifyDoc,
}

impl CertificateDoc {
    /// Assemble the document for a certificate over R = k[t].
    pub fn from_certificate<F: ParseField + UnitGroup>(
        group: &FiniteAbelianSubgroup<F, PolyRing<F>>,
        names: &[String],
        cert: &Certificate<F, PolyRing<F>>,
    ) -> Result<Self> {
        if names.len() != group.gens.len() || cert.diagonals.len() != group.gens.len() {
            return Err(Error::Internal(
                "generator names and diagonals must match the group".into(),
            ));
        }
        let field = &group.field;
        let generators = names
            .iter()
            .zip(&group.gens)
            .zip(group.orders.iter().zip(&group.zetas))
            .map(|((name, map), (&order, zeta))| GeneratorDoc {
                name: name.clone(),
                order,
                zeta: format!("{}", field.show(zeta)),
                map: format!("{map}"),
            })
            .collect();
        let diagonals: Vec<[String; 2]> = cert
            .diagonals
            .iter()
            .map(|(a, b)| [format!("{}", field.show(a)), format!("{}", field.show(b))])
            .collect();
        let conjugates = cert
            .diagonals
            .iter()
            .map(|(a, b)| {
                let d = PolyMap::diagonal(
                    &group.ring,
                    group.ring.embed_scalar(a),
                    group.ring.embed_scalar(b),
                );
                format!("{d}")
            })
            .collect();
        let jac = cert
            .psi
            .ring
            .try_scalar(&cert.psi.jac.coeff(0, 0))
            .filter(|_| cert.psi.jac.total_degree() == Some(0))
            .ok_or_else(|| {
                Error::Internal("certificate conjugator jacobian is not scalar".into())
            })?;
        Ok(CertificateDoc {
            field: field.header(),
            ring: RingSpec::Poly.decl().to_string(),
            generators,
            conjugator: format!("{}", cert.psi),
            diagonals,
            stages: cert.stages.clone(),
            verify: VerifyDoc {
                conjugates,
                jacobian: format!("{}", field.show(&jac)),
            },
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate documents always serialize")
    }

    pub fn from_json(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| Error::Parse(format!("bad certificate JSON: {e}")))
    }

    /// Re-run every check from the document alone: parse the group and the
    /// conjugator, validate the group data, confirm ψ⁻¹∘φⱼ∘ψ equals both the
    /// recorded conjugate and the recorded diagonal pair, confirm the pairs
    /// are powers of the declared roots, and confirm det Jψ is the recorded
    /// nonzero scalar.
    pub fn replay(&self) -> Result<()> {
        match parse_field_and_suffix(&self.field)? {
            (FieldSpec::Gf(p), RingSpec::Base) => self.replay_in(&PrimeField::new(p)?),
            (FieldSpec::Q, RingSpec::Base) => self.replay_in(&Rationals),
            _ => Err(Error::Parse(format!(
                "field header {} must be bare; the ring is declared separately",
                self.field
            ))),
        }
    }

    fn replay_in<F>(&self, field: &F) -> Result<()>
    where
        F: ParseField + ParseRing<F> + UnitGroup,
    {
        if RingSpec::parse_decl(&self.ring)? != RingSpec::Poly {
            return Err(Error::Unsupported(format!(
                "certificates are issued over k[t]; this one declares {}",
                self.ring
            )));
        }
        let poly = PolyRing::new(field.clone());
        let frac = FracRing { poly: poly.clone() };
        let narrow = |src: &str, what: &str| -> Result<PolyMap<PolyRing<F>>> {
            let over_k = parse_map::<F, FracRing<F>>(&frac, src)?;
            let f1 = frac_to_poly(&over_k.images[0], &poly);
            let f2 = frac_to_poly(&over_k.images[1], &poly);
            match (f1, f2) {
                (Some(f1), Some(f2)) => Ok(PolyMap::new(poly.clone(), f1, f2)),
                _ => Err(Error::Verification(format!("{what} has denominators: {src}"))),
            }
        };
        let mut gens = Vec::new();
        let mut orders = Vec::new();
        let mut zetas = Vec::new();
        for g in &self.generators {
            gens.push(narrow(&g.map, &format!("generator {}", g.name))?);
            orders.push(g.order);
            zetas.push(parse_scalar(field, &g.zeta)?);
        }
        let group =
            FiniteAbelianSubgroup::new(poly.clone(), field.clone(), gens, orders, zetas)?;
        let psi = narrow(&self.conjugator, "the conjugator")?;
        if self.diagonals.len() != group.gens.len()
            || self.verify.conjugates.len() != group.gens.len()
        {
            return Err(Error::Verification(
                "diagonal and conjugate counts must match the generator count".into(),
            ));
        }
        let mut diagonals = Vec::new();
        for (pair, conj_src) in self.diagonals.iter().zip(&self.verify.conjugates) {
            let a = parse_scalar(field, &pair[0])?;
            let b = parse_scalar(field, &pair[1])?;
            let want =
                PolyMap::diagonal(&poly, poly.embed_scalar(&a), poly.embed_scalar(&b));
            let stated = narrow(conj_src, "a recorded conjugate")?;
            if !stated.equals(&want) {
                return Err(Error::Verification(format!(
                    "recorded conjugate {stated} does not match the diagonal pair ({}, {})",
                    field.show(&a),
                    field.show(&b)
                )));
            }
            diagonals.push((a, b));
        }
        let jac = parse_scalar(field, &self.verify.jacobian)?;
        let actual = psi
            .ring
            .try_scalar(&psi.jac.coeff(0, 0))
            .filter(|_| psi.jac.total_degree() == Some(0));
        match actual {
            Some(c) if c == jac && !field.is_zero(&c) => {}
            _ => {
                return Err(Error::Verification(format!(
                    "conjugator jacobian is {} but the document records the scalar {}",
                    psi.jac,
                    field.show(&jac)
                )))
            }
        }
        let cert = Certificate { psi, diagonals, stages: self.stages.clone() };
        cert.verify(&group)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::diagonalize_finite_abelian;
    use crate::parse::{parse_instance_any, AnyInstance};

    fn twisted_shear_doc() -> CertificateDoc {
        let src = "field GF(7)\nring k[t]\n\
                   gen phi1 order 3 zeta 2 = (x1, 2*x2 + t*x1^3)\n";
        let inst = match parse_instance_any(src).unwrap() {
            AnyInstance::Gf(inst) => inst,
            AnyInstance::Qq(_) => panic!("wrong field"),
        };
        let group = inst.group_over_poly().unwrap();
        let cert = diagonalize_finite_abelian(&group).unwrap();
        CertificateDoc::from_certificate(&group, &inst.names, &cert).unwrap()
    }

    #[test]
    fn documents_roundtrip_through_json_and_replay() {
        let doc = twisted_shear_doc();
        assert_eq!(doc.field, "GF(7)");
        assert_eq!(doc.ring, "k[t]");
        assert_eq!(doc.conjugator, "(x1, t*x1^3 + x2)");
        assert_eq!(doc.diagonals, vec![["1".to_string(), "2".to_string()]]);
        assert_eq!(doc.verify.conjugates, vec!["(x1, 2*x2)".to_string()]);
        assert_eq!(doc.verify.jacobian, "1");
        let json = doc.to_json();
        let back = CertificateDoc::from_json(&json).unwrap();
        assert_eq!(back, doc);
        back.replay().unwrap();
    }

    #[test]
    fn tampered_documents_fail_replay() {
        // A flipped diagonal entry, a swapped conjugator, and a jacobian
        // mismatch must each be caught.
        let doc = twisted_shear_doc();

        let mut bad = doc.clone();
        bad.diagonals[0] = ["1".into(), "4".into()];
        bad.verify.conjugates[0] = "(x1, 4*x2)".into();
        assert!(matches!(bad.replay(), Err(Error::Verification(_))));

        let mut bad = doc.clone();
        bad.conjugator = "(x1, x2)".into();
        assert!(matches!(bad.replay(), Err(Error::Verification(_))));

        let mut bad = doc.clone();
        bad.verify.jacobian = "3".into();
        let err = bad.replay().unwrap_err();
        assert!(err.to_string().contains("jacobian"), "{err}");

        let mut bad = doc.clone();
        bad.verify.conjugates[0] = "(x1, 3*x2)".into();
        assert!(matches!(bad.replay(), Err(Error::Verification(_))));

        let mut bad = doc;
        bad.conjugator = "(t*x1, x2)".into();
        let err = bad.replay().unwrap_err();
        assert!(err.to_string().contains("jacobian"), "{err}");
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(
            CertificateDoc::from_json("{\"field\": 3}"),
            Err(Error::Parse(_))
        ));
    }
}
