//! Conjugating a finite abelian automorphism group over a coefficient field
//! into the diagonal group, by elementary peak reduction followed by
//! simultaneous diagonalization of the resulting affine family.
//!
//! The search loop maintains the sum of the generators' degrees as a strictly
//! decreasing potential: each round collects candidate elementary
//! conjugations σ = (xᵢ + c·xⱼˡ) from the structure of the current
//! generators, applies each to the whole family, and keeps the best strict
//! improvement.  When every generator is affine, a common fixed point is
//! removed by translation and the commuting linear parts are put on a shared
//! eigenbasis; eigenvalues are located exactly among the powers of the
//! declared roots of unity, never by radicals.

use crate::action::{kspan_decompose, FiniteAbelianSubgroup};
use crate::automorphism::{invert, PolyMap, TameFactor};
use crate::bipoly::BiPoly;
use crate::diag::certificate::{
    record_stage, verify_conjugation, verify_entries_are_root_powers, Certificate, StageRecord,
};
use crate::error::{Error, Result};
use crate::linalg;
use crate::fields::UnitGroup;
use crate::ring::{Field, KAlgebra};

/// How many base-field units the candidate search will enumerate per step
/// before falling back to derived candidates only.
const UNIT_CANDIDATE_CAP: usize = 64;

/// Conjugate a finite abelian subgroup of Aut L[x₁,x₂] into D₂, returning a
/// verified certificate whose conjugator has coefficients in L.
pub fn diagonalize_over_field<F, L>(
    group: &FiniteAbelianSubgroup<F, L>,
) -> Result<Certificate<F, L>>
where
    F: Field + UnitGroup,
    L: Field + KAlgebra<F>,
{
    let ring = &group.ring;
    let mut stages: Vec<StageRecord> = Vec::new();
    let mut psi = PolyMap::identity(ring);
    let mut gens: Vec<PolyMap<L>> = group.gens.clone();

    // Peak reduction: drive every generator down to the affine range.
    let mut budget = gens.iter().map(|g| g.degree() as u64).sum::<u64>() + 1;
    while gens.iter().any(|g| g.degree() > 2) {
        if budget == 0 {
            return Err(Error::Internal(
                "peak reduction exceeded its strict-descent budget".into(),
            ));
        }
        budget -= 1;
        let total: u64 = gens.iter().map(|g| g.degree() as u64).sum();
        let mut best: Option<(u64, TameFactor<L>, Vec<PolyMap<L>>)> = None;
        for (index, l, c) in reduction_candidates(group, &gens) {
            let (ea, eb) = if index == 1 { (0, l) } else { (l, 0) };
            let shift = BiPoly::term(ring, c, ea, eb);
            let sigma = match TameFactor::elementary(index, shift) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let conjugated = conjugate_family(ring, &gens, &sigma)?;
            let t: u64 = conjugated.iter().map(|g| g.degree() as u64).sum();
            if t < total && best.as_ref().map_or(true, |(b, _, _)| t < *b) {
                best = Some((t, sigma, conjugated));
            }
        }
        let Some((_, sigma, conjugated)) = best else {
            return Err(Error::PeakReductionStalled(format!(
                "no elementary conjugation reduces the family {}",
                render_family(&gens)
            )));
        };
        let before = render_family(&gens);
        gens = conjugated;
        psi = psi.compose(&sigma.to_map(ring));
        let op = match &sigma {
            TameFactor::Elementary { index, shift } => {
                format!("peak-reduction i={index} shift={shift}")
            }
            TameFactor::Affine { .. } => unreachable!("candidates are elementary"),
        };
        record_stage(&mut stages, &op, &before, &format!("{psi}"));
    }

    // Affine stage: remove the common translation part.
    if !gens.is_empty() {
        let (mats, consts) = split_affine(&gens)?;
        if consts.iter().any(|c| !ring.is_zero(&c[0]) || !ring.is_zero(&c[1])) {
            let mut rows: Vec<Vec<L::Elem>> = Vec::new();
            let mut rhs: Vec<L::Elem> = Vec::new();
            for (a, c) in mats.iter().zip(&consts) {
                for m in 0..2 {
                    let mut row = vec![a[m][0].clone(), a[m][1].clone()];
                    row[m] = ring.sub(&row[m], &ring.one());
                    rows.push(row);
                    rhs.push(c[m].clone());
                }
            }
            let v = linalg::solve(ring, &rows, &rhs).ok_or_else(|| {
                Error::NotDiagonalizable(
                    "the affine family has no common fixed point".into(),
                )
            })?;
            let x1 = BiPoly::var(ring, 1).add(&BiPoly::constant(ring, v[0].clone()));
            let x2 = BiPoly::var(ring, 2).add(&BiPoly::constant(ring, v[1].clone()));
            let translation = PolyMap::new(ring.clone(), x1, x2);
            let before = render_family(&gens);
            gens = conjugate_family_by_map(&gens, &translation)?;
            psi = psi.compose(&translation);
            record_stage(&mut stages, "translation-removal", &before, &format!("{psi}"));
            let (_, consts2) = split_affine(&gens)?;
            assert!(
                consts2
                    .iter()
                    .all(|c| ring.is_zero(&c[0]) && ring.is_zero(&c[1])),
                "translation removal must clear all constant parts"
            );
        }
    }

    // Affine stage: shared eigenbasis for the commuting linear parts.
    if !gens.is_empty() {
        let (mats, _) = split_affine(&gens)?;
        if let Some(pivot) = mats
            .iter()
            .position(|a| !ring.is_zero(&a[0][1]) || !ring.is_zero(&a[1][0]))
        {
            let basis = eigenbasis(group, ring, &mats[pivot], pivot)?;
            let before = render_family(&gens);
            gens = conjugate_family_by_map(&gens, &basis)?;
            psi = psi.compose(&basis);
            record_stage(&mut stages, "linear-eigenbasis", &before, &format!("{psi}"));
        }
    }

    // Every generator must now be exactly diagonal.
    let mut diagonals: Vec<(F::Elem, F::Elem)> = Vec::new();
    for (j, g) in gens.iter().enumerate() {
        let pair = read_diagonal(ring, g).ok_or_else(|| {
            Error::NotDiagonalizable(format!(
                "generator {} stays non-diagonal after the eigenbasis change: {}",
                j + 1,
                g
            ))
        })?;
        let a = ring.try_scalar(&pair.0).ok_or_else(|| {
            Error::NotDiagonalizable("diagonal entry is not a base-field scalar".into())
        })?;
        let b = ring.try_scalar(&pair.1).ok_or_else(|| {
            Error::NotDiagonalizable("diagonal entry is not a base-field scalar".into())
        })?;
        diagonals.push((a, b));
    }

    // Canonical extraction: both conjugator images must be homogeneous for
    // the group action, i.e. single components under the eigenspace split.
    if !group.gens.is_empty() && !psi.is_identity() {
        let before = format!("{psi}");
        for i in 0..2 {
            let comps = kspan_decompose(group, &psi.images[i])?;
            if comps.len() != 1 {
                return Err(Error::Internal(format!(
                    "conjugator image {} splits into {} semi-invariant components",
                    i + 1,
                    comps.len()
                )));
            }
        }
        record_stage(&mut stages, "graded-extraction", &before, &format!("{psi}"));
    }

    let checks: Vec<(PolyMap<L>, (F::Elem, F::Elem))> = group
        .gens
        .iter()
        .cloned()
        .zip(diagonals.iter().cloned())
        .collect();
    verify_conjugation(&group.field, ring, &checks, &psi)?;
    verify_entries_are_root_powers(&group.field, &group.orders, &group.zetas, &diagonals)?;
    Ok(Certificate { psi, diagonals, stages })
}

fn render_family<L: Field>(gens: &[PolyMap<L>]) -> String {
    gens.iter()
        .map(|g| format!("{g}"))
        .collect::<Vec<_>>()
        .join(" | ")
}

fn conjugate_family<L: Field>(
    ring: &L,
    gens: &[PolyMap<L>],
    sigma: &TameFactor<L>,
) -> Result<Vec<PolyMap<L>>> {
    conjugate_family_by_map(gens, &sigma.to_map(ring))
}

fn conjugate_family_by_map<L: Field>(
    gens: &[PolyMap<L>],
    sigma: &PolyMap<L>,
) -> Result<Vec<PolyMap<L>>> {
    let sigma_inv = invert(sigma)?;
    Ok(gens
        .iter()
        .map(|phi| sigma_inv.compose(&phi.compose(sigma)))
        .collect())
}

/// Candidate elementary conjugations (index, l, c): σ shifts x_index by
/// c·x_otherˡ.  Three families, all deterministic:
/// leading-form ratios (the van der Kulk reduction constant of each
/// generator), resonance quotients q/(β − αˡ) from the triangular
/// conjugation formula, and embedded base-field units when the base field
/// can enumerate them.
fn reduction_candidates<F, L>(
    group: &FiniteAbelianSubgroup<F, L>,
    gens: &[PolyMap<L>],
) -> Vec<(u8, u32, L::Elem)>
where
    F: Field + UnitGroup,
    L: Field + KAlgebra<F>,
{
    let ring = &group.ring;
    let mut raw: Vec<(u8, u32, L::Elem)> = Vec::new();
    let mut max_degree = 1u32;
    for phi in gens {
        for (i, j) in [(0usize, 1usize), (1usize, 0usize)] {
            let fi = &phi.images[i];
            let fj = &phi.images[j];
            let (Some(di), Some(dj)) = (fi.total_degree(), fj.total_degree()) else {
                continue;
            };
            max_degree = max_degree.max(di).max(dj);
            let index = (i + 1) as u8;
            // Leading-form ratio: lf(fᵢ) = c·lf(fⱼ)ˡ.
            if dj >= 1 && di >= 2 && di % dj == 0 {
                let l = di / dj;
                let target = fj.leading_form().pow(l);
                let (_, lc_i) = fi.leading().expect("nonzero");
                let (_, lc_t) = target.leading().expect("nonzero");
                if let Ok(c) = ring.div(lc_i, lc_t) {
                    if fi.leading_form().sub(&target.scale(&c)).is_zero() {
                        raw.push((index, l, c.clone()));
                        raw.push((index, l, ring.neg(&c)));
                    }
                }
            }
            // Resonance quotients: for a pure x_jˡ term q of fᵢ, the
            // conjugated coefficient is q + c(αˡ − β) where α, β are the
            // linear self-coefficients; c = q/(β − αˡ) cancels it.
            let alpha = if j == 0 { fj.coeff(1, 0) } else { fj.coeff(0, 1) };
            let beta = if i == 0 { fi.coeff(1, 0) } else { fi.coeff(0, 1) };
            for (e, q) in fi.terms() {
                let l = if i == 0 {
                    if e.a != 0 || e.b == 0 { continue } else { e.b }
                } else if e.b != 0 || e.a == 0 {
                    continue;
                } else {
                    e.a
                };
                let denom = ring.sub(&beta, &ring.pow(&alpha, l as u64));
                if ring.is_zero(&denom) {
                    continue;
                }
                if let Ok(c) = ring.div(q, &denom) {
                    raw.push((index, l, c.clone()));
                    raw.push((index, l, ring.neg(&c)));
                }
            }
        }
    }
    // Base-field unit sweep, exhaustive for small prime fields.
    if let Some(units) = group.field.unit_candidates(UNIT_CANDIDATE_CAP) {
        for index in [1u8, 2u8] {
            for l in 1..=max_degree {
                for u in &units {
                    raw.push((index, l, ring.embed_scalar(u)));
                }
            }
        }
    }
    // Deterministic order and deduplication.
    raw.sort_by(|x, y| {
        x.0.cmp(&y.0)
            .then(x.1.cmp(&y.1))
            .then(ring.cmp_elem(&x.2, &y.2))
    });
    raw.dedup_by(|x, y| {
        x.0 == y.0 && x.1 == y.1 && ring.cmp_elem(&x.2, &y.2) == std::cmp::Ordering::Equal
    });
    raw.retain(|(_, _, c)| !ring.is_zero(c));
    raw
}

/// Split an affine family into linear matrices and constant vectors;
/// errors if some generator is not affine.
#[allow(clippy::type_complexity)]
fn split_affine<L: Field>(
    gens: &[PolyMap<L>],
) -> Result<(Vec<[[L::Elem; 2]; 2]>, Vec<[L::Elem; 2]>)> {
    let mut mats = Vec::new();
    let mut consts = Vec::new();
    for g in gens {
        if g.degree() > 2 {
            return Err(Error::Internal(
                "affine stage reached with a non-affine generator".into(),
            ));
        }
        let f1 = &g.images[0];
        let f2 = &g.images[1];
        mats.push([
            [f1.coeff(1, 0), f1.coeff(0, 1)],
            [f2.coeff(1, 0), f2.coeff(0, 1)],
        ]);
        consts.push([f1.coeff(0, 0), f2.coeff(0, 0)]);
    }
    Ok((mats, consts))
}

/// Change of coordinates putting a non-scalar finite-order matrix (and with
/// it the whole commuting family) into diagonal form.  Its eigenvalues are
/// located among the powers of the declared root of unity of its generator,
/// exactly; two distinct ones must exist, otherwise the matrix is not
/// semisimple and the family is not diagonalizable over the base field.
fn eigenbasis<F, L>(
    group: &FiniteAbelianSubgroup<F, L>,
    ring: &L,
    a: &[[L::Elem; 2]; 2],
    generator_index: usize,
) -> Result<PolyMap<L>>
where
    F: Field + UnitGroup,
    L: Field + KAlgebra<F>,
{
    let field = &group.field;
    let d = group.orders[generator_index];
    let zeta = &group.zetas[generator_index];
    let mut eigenvalues: Vec<L::Elem> = Vec::new();
    let mut power = field.one();
    for _ in 0..d {
        let lam = ring.embed_scalar(&power);
        let det = ring.sub(
            &ring.mul(&ring.sub(&a[0][0], &lam), &ring.sub(&a[1][1], &lam)),
            &ring.mul(&a[0][1], &a[1][0]),
        );
        if ring.is_zero(&det)
            && !eigenvalues
                .iter()
                .any(|e| ring.cmp_elem(e, &lam) == std::cmp::Ordering::Equal)
        {
            eigenvalues.push(lam);
        }
        power = field.mul(&power, zeta);
    }
    if eigenvalues.len() != 2 {
        return Err(Error::NotDiagonalizable(format!(
            "the linear part of generator {} has {} distinct eigenvalues among \
             the powers of its root of unity; it is not semisimple over the base field",
            generator_index + 1,
            eigenvalues.len()
        )));
    }
    let mut columns: Vec<Vec<L::Elem>> = Vec::new();
    for lam in &eigenvalues {
        let shifted = vec![
            vec![ring.sub(&a[0][0], lam), a[0][1].clone()],
            vec![a[1][0].clone(), ring.sub(&a[1][1], lam)],
        ];
        let basis = linalg::kernel(ring, &shifted);
        let v = basis.into_iter().next().ok_or_else(|| {
            Error::Internal("eigenvalue with empty eigenspace".into())
        })?;
        columns.push(v);
    }
    let p = vec![
        vec![columns[0][0].clone(), columns[1][0].clone()],
        vec![columns[0][1].clone(), columns[1][1].clone()],
    ];
    let q = linalg::mat_inv(ring, &p).ok_or_else(|| {
        Error::Internal("eigenvectors of distinct eigenvalues must be independent".into())
    })?;
    // The conjugation Λ⁻¹∘φ∘Λ acts on image matrices as A ↦ P⁻¹AP when Λ's
    // image matrix is P⁻¹.
    let image = |row: &[L::Elem]| {
        BiPoly::term(ring, row[0].clone(), 1, 0).add(&BiPoly::term(ring, row[1].clone(), 0, 1))
    };
    Ok(PolyMap::new(ring.clone(), image(&q[0]), image(&q[1])))
}

/// Read a map as (a·x₁, b·x₂) if it has exactly that shape.
fn read_diagonal<L: Field>(ring: &L, g: &PolyMap<L>) -> Option<(L::Elem, L::Elem)> {
    let f1 = &g.images[0];
    let f2 = &g.images[1];
    if f1.num_terms() != 1 || f2.num_terms() != 1 {
        return None;
    }
    let a = f1.coeff(1, 0);
    let b = f2.coeff(0, 1);
    if ring.is_zero(&a) || ring.is_zero(&b) {
        return None;
    }
    Some((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{PrimeField, Rationals};
    use num::BigRational;

    fn gf7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    #[test]
    fn cubic_shear_conjugate_of_order_three() {
        // G = ⟨(x₁, 2x₂ + x₁³)⟩ over GF(7): the cubic term is removed by the
        // shear (x₁, x₂ + x₁³) and the diagonal form is (x₁, 2x₂).
        let f = gf7();
        let x1 = BiPoly::var(&f, 1);
        let x2 = BiPoly::var(&f, 2);
        let phi = PolyMap::new(f.clone(), x1.clone(), x2.scale(&2).add(&x1.pow(3)));
        let group =
            FiniteAbelianSubgroup::new(f.clone(), f.clone(), vec![phi], vec![3], vec![2]).unwrap();
        let cert = diagonalize_over_field(&group).unwrap();
        assert_eq!(format!("{}", cert.psi), "(x1, x1^3 + x2)");
        assert_eq!(cert.diagonals, vec![(1, 2)]);
        assert!(cert.stages.iter().any(|s| s.operation.starts_with("peak-reduction")));
        cert.verify_over_field(&group).unwrap();
    }

    #[test]
    fn affine_mixing_resolved_by_eigenbasis() {
        // φ = (x₁ + 6x₂, 2x₂) = w∘(x₁, 2x₂)∘w⁻¹ for w = (x₁ + x₂, x₂).
        let f = gf7();
        let x1 = BiPoly::var(&f, 1);
        let x2 = BiPoly::var(&f, 2);
        let phi = PolyMap::new(f.clone(), x1.add(&x2.scale(&6)), x2.scale(&2));
        let group =
            FiniteAbelianSubgroup::new(f.clone(), f.clone(), vec![phi], vec![3], vec![2]).unwrap();
        let cert = diagonalize_over_field(&group).unwrap();
        assert_eq!(format!("{}", cert.psi), "(x1 + x2, x2)");
        assert_eq!(cert.diagonals, vec![(1, 2)]);
        cert.verify_over_field(&group).unwrap();
    }

    #[test]
    fn two_generators_share_one_shear() {
        // φ₁ = (2x₁, 2x₂ + 5x₁²), φ₂ = (4x₁, 2x₂): both are conjugates of
        // diagonal maps by (x₁, x₂ + x₁²).
        let f = gf7();
        let x1 = BiPoly::var(&f, 1);
        let x2 = BiPoly::var(&f, 2);
        let phi1 = PolyMap::new(
            f.clone(),
            x1.scale(&2),
            x2.scale(&2).add(&x1.pow(2).scale(&5)),
        );
        let phi2 = PolyMap::new(f.clone(), x1.scale(&4), x2.scale(&2));
        let group = FiniteAbelianSubgroup::new(
            f.clone(),
            f.clone(),
            vec![phi1, phi2],
            vec![3, 3],
            vec![2, 2],
        )
        .unwrap();
        let cert = diagonalize_over_field(&group).unwrap();
        assert_eq!(format!("{}", cert.psi), "(x1, x1^2 + x2)");
        assert_eq!(cert.diagonals, vec![(2, 2), (4, 2)]);
        cert.verify_over_field(&group).unwrap();
    }

    #[test]
    fn translation_only_group_gets_fixed_point() {
        // φ = (x₁, 6x₂ + 3): order 2, fixed point at x₂ = 3/(1−6)... the
        // translation stage must clear the constant exactly.
        let f = gf7();
        let x1 = BiPoly::var(&f, 1);
        let x2 = BiPoly::var(&f, 2);
        let phi = PolyMap::new(
            f.clone(),
            x1.clone(),
            x2.scale(&6).add(&BiPoly::constant(&f, 3)),
        );
        let group =
            FiniteAbelianSubgroup::new(f.clone(), f.clone(), vec![phi], vec![2], vec![6]).unwrap();
        let cert = diagonalize_over_field(&group).unwrap();
        assert_eq!(cert.diagonals, vec![(1, 6)]);
        assert!(cert.stages.iter().any(|s| s.operation == "translation-removal"));
        cert.verify_over_field(&group).unwrap();
    }

    #[test]
    fn already_diagonal_group_needs_identity_conjugator() {
        let f = gf7();
        let phi = PolyMap::diagonal(&f, 2, 4);
        let group =
            FiniteAbelianSubgroup::new(f.clone(), f.clone(), vec![phi], vec![3], vec![2]).unwrap();
        let cert = diagonalize_over_field(&group).unwrap();
        assert!(cert.psi.is_identity());
        assert_eq!(cert.diagonals, vec![(2, 4)]);
        assert!(cert.stages.is_empty());
    }

    #[test]
    fn trivial_group_diagonalizes_trivially() {
        let f = gf7();
        let group =
            FiniteAbelianSubgroup::new(f.clone(), f.clone(), vec![], vec![], vec![]).unwrap();
        let cert = diagonalize_over_field(&group).unwrap();
        assert!(cert.psi.is_identity());
        assert!(cert.diagonals.is_empty());
    }

    #[test]
    fn unipotent_map_is_not_diagonalizable() {
        // (x₁, x₂ + x₁) over ℚ is unipotent: its only eigenvalue is 1 with a
        // one-dimensional eigenspace.
        let q = Rationals;
        let x1 = BiPoly::var(&q, 1);
        let x2 = BiPoly::var(&q, 2);
        let phi = PolyMap::new(q.clone(), x1.clone(), x2.add(&x1));
        let group = FiniteAbelianSubgroup::unchecked(
            q.clone(),
            q.clone(),
            vec![phi],
            vec![2],
            vec![BigRational::from_integer((-1).into())],
        );
        let err = diagonalize_over_field(&group).unwrap_err();
        assert!(matches!(err, Error::NotDiagonalizable(_)));
    }

    #[test]
    fn stalled_reduction_reports_honestly() {
        // (x₂ + x₁², x₁) is a valid automorphism of infinite order; after one
        // forced reduction the family cycles without strict descent, so the
        // search must stop with the stall error rather than loop.
        let f = gf7();
        let x1 = BiPoly::var(&f, 1);
        let x2 = BiPoly::var(&f, 2);
        let phi = PolyMap::new(f.clone(), x2.add(&x1.pow(2)), x1.clone());
        let group =
            FiniteAbelianSubgroup::unchecked(f.clone(), f.clone(), vec![phi], vec![2], vec![6]);
        let err = diagonalize_over_field(&group).unwrap_err();
        assert!(matches!(
            err,
            Error::PeakReductionStalled(_) | Error::NotDiagonalizable(_)
        ));
    }

    #[test]
    fn swap_involution_diagonalizes_over_gf7() {
        // (x₂, x₁) has eigenvalues ±1 with eigenvectors (1, ±1).
        let f = gf7();
        let phi = PolyMap::new(f.clone(), BiPoly::var(&f, 2), BiPoly::var(&f, 1));
        let group =
            FiniteAbelianSubgroup::new(f.clone(), f.clone(), vec![phi], vec![2], vec![6]).unwrap();
        let cert = diagonalize_over_field(&group).unwrap();
        assert_eq!(cert.diagonals.len(), 1);
        cert.verify_over_field(&group).unwrap();
    }
}
