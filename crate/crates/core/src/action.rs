//! Finite abelian groups of plane automorphisms and the gradings they
//! induce: eigencomponent decomposition by linear algebra, averaging
//! projectors, diagonal monomial gradings, bounded graded-piece
//! generators, and vanishing checks under reduction mod a prime of k[t].

use std::collections::BTreeMap;

use crate::automorphism::PolyMap;
use crate::bipoly::BiPoly;
use crate::error::{Error, Result};
use crate::fields::UnitGroup;
use crate::lattice::{
    canonical_expression, quotient_structure, t_index, CanonicalExpression, CharacterGroup,
    Class, QuotientGroup, RelationLattice, TIndex,
};
use crate::linalg;
use crate::ring::{Field, KAlgebra, Ring};
use crate::unipoly::{PolyRing, UniPoly};

/// A finite abelian subgroup G = ⟨φ₁⟩⋯⟨φ_r⟩ of plane automorphisms over a
/// coefficient k-algebra R, with a chosen primitive dᵢ-th root of unity
/// per generator.
#[derive(Clone, Debug)]
pub struct FiniteAbelianSubgroup<F: Field + UnitGroup, R: KAlgebra<F>> {
    pub ring: R,
    pub field: F,
    pub gens: Vec<PolyMap<R>>,
    pub orders: Vec<u64>,
    pub zetas: Vec<F::Elem>,
}

impl<F: Field + UnitGroup, R: KAlgebra<F>> FiniteAbelianSubgroup<F, R> {
    /// Assemble group data without validating orders, commutation, or the
    /// roots of unity.  Intended for feeding deliberately malformed input to
    /// the diagonalization routines, whose error paths are part of their
    /// contract; use [`FiniteAbelianSubgroup::new`] everywhere else.
    pub fn unchecked(
        ring: R,
        field: F,
        gens: Vec<PolyMap<R>>,
        orders: Vec<u64>,
        zetas: Vec<F::Elem>,
    ) -> Self {
        FiniteAbelianSubgroup { ring, field, gens, orders, zetas }
    }

    /// Verify φᵢ^{dᵢ} = id, pairwise commutation, and that each ζᵢ has
    /// exact multiplicative order dᵢ.
    ///
    /// Composing two maps of total degree D materializes intermediates of
    /// degree up to D², so the order and commutation checks are only run
    /// when the degrees involved keep that product small.  Larger inputs
    /// are accepted provisionally: a certificate is only ever issued after
    /// the conjugation equalities φⱼ∘ψ = ψ∘δⱼ are verified exactly, and
    /// those pin down the order of every generator and their commutation,
    /// so a false declaration still cannot produce a verified certificate —
    /// it surfaces later instead of here.
    pub fn new(
        ring: R,
        field: F,
        gens: Vec<PolyMap<R>>,
        orders: Vec<u64>,
        zetas: Vec<F::Elem>,
    ) -> Result<Self> {
        const MAX_CHECKED_DEGREE_PRODUCT: u32 = 144;
        if gens.len() != orders.len() || gens.len() != zetas.len() {
            return Err(Error::InvalidGroup(
                "generators, orders, and roots must align".into(),
            ));
        }
        let deg = |phi: &PolyMap<R>| -> u32 {
            phi.images
                .iter()
                .map(|f| f.total_degree().unwrap_or(0))
                .max()
                .unwrap_or(0)
        };
        for (j, (phi, &d)) in gens.iter().zip(&orders).enumerate() {
            if d == 0 {
                return Err(Error::InvalidGroup("order must be positive".into()));
            }
            let dp = deg(phi);
            if dp.saturating_mul(dp) > MAX_CHECKED_DEGREE_PRODUCT {
                continue;
            }
            if !phi.power(d).is_identity() {
                return Err(Error::InvalidGroup(format!(
                    "generator {} does not satisfy its declared order {}",
                    j + 1,
                    d
                )));
            }
        }
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                if deg(&gens[i]).saturating_mul(deg(&gens[j])) > MAX_CHECKED_DEGREE_PRODUCT {
                    continue;
                }
                if !gens[i].compose(&gens[j]).equals(&gens[j].compose(&gens[i])) {
                    return Err(Error::InvalidGroup(format!(
                        "generators {} and {} do not commute",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        for (j, (z, &d)) in zetas.iter().zip(&orders).enumerate() {
            if field.unit_order(z) != Some(d) {
                return Err(Error::InvalidGroup(format!(
                    "root for generator {} does not have exact order {}",
                    j + 1,
                    d
                )));
            }
        }
        Ok(FiniteAbelianSubgroup { ring, field, gens, orders, zetas })
    }

    /// Choose roots of unity from the field.
    pub fn with_chosen_roots(
        ring: R,
        field: F,
        gens: Vec<PolyMap<R>>,
        orders: Vec<u64>,
    ) -> Result<Self> {
        let zetas = orders
            .iter()
            .map(|&d| {
                field.primitive_root_of_unity(d).ok_or_else(|| {
                    Error::InvalidGroup(format!("no primitive root of unity of order {d}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteAbelianSubgroup::new(ring, field, gens, orders, zetas)
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Canonical residue tuple (i₁ mod d₁, …, i_r mod d_r).
    pub fn reduce_residues(&self, residues: &[i64]) -> Vec<i64> {
        residues
            .iter()
            .zip(&self.orders)
            .map(|(&i, &d)| i.rem_euclid(d as i64))
            .collect()
    }
}

/// The abstract character data of the group: Γ ⊆ (k*)^r generated by the
/// coordinate tuples (1,…,ζⱼ,…,1), with its relation lattice and quotient.
#[derive(Clone, Debug)]
pub struct ActionContext<F: Field + UnitGroup> {
    pub chars: CharacterGroup<F>,
    pub lattice: RelationLattice,
    pub quotient: QuotientGroup,
}

impl<F: Field + UnitGroup> ActionContext<F> {
    pub fn build<R: KAlgebra<F>>(group: &FiniteAbelianSubgroup<F, R>) -> Result<Self> {
        let r = group.gens.len().max(1);
        let mut tuples = Vec::new();
        for (j, z) in group.zetas.iter().enumerate() {
            let mut tup = vec![group.field.one(); group.gens.len()];
            tup[j] = z.clone();
            tuples.push(tup);
        }
        let chars = CharacterGroup::new(group.field.clone(), r, if tuples.is_empty() {
            Vec::new()
        } else {
            tuples
        })?;
        let lattice = chars.relation_lattice()?;
        let quotient = quotient_structure(&lattice);
        Ok(ActionContext { chars, lattice, quotient })
    }

    /// Bridge from residue tuples to canonical quotient coordinates.
    pub fn class_from_residues(&self, residues: &[i64]) -> Class {
        let v: Vec<i128> = residues.iter().map(|&x| i128::from(x)).collect();
        self.quotient.project(&v)
    }
}

/// Finitely supported map from residue tuples to eigencomponents.
pub type ComponentSet<R> = BTreeMap<Vec<i64>, BiPoly<R>>;

/// Split f into eigencomponents of the group action by solving, for each
/// generator of order d, the d×d Vandermonde system in {φ^j(f)}, then
/// recursing across generators. The components sum to f exactly.
pub fn kspan_decompose<F: Field + UnitGroup, R: KAlgebra<F>>(
    group: &FiniteAbelianSubgroup<F, R>,
    f: &BiPoly<R>,
) -> Result<ComponentSet<R>> {
    let field = &group.field;
    let ring = &group.ring;
    let mut parts: Vec<(Vec<i64>, BiPoly<R>)> = vec![(Vec::new(), f.clone())];
    for (phi, (&d, zeta)) in group.gens.iter().zip(group.orders.iter().zip(&group.zetas)) {
        let d = d as usize;
        let w: Vec<Vec<F::Elem>> = (0..d)
            .map(|l| (0..d).map(|i| field.pow(zeta, (i * l) as u64)).collect())
            .collect();
        let w_inv = linalg::mat_inv(field, &w).ok_or(Error::SingularEigenSystem)?;
        let mut next = Vec::new();
        for (key, comp) in parts {
            // Orbit φ^l(comp) for 0 ≤ l < d, by iterated application.
            let mut orbit = Vec::with_capacity(d);
            orbit.push(comp.clone());
            for _ in 1..d {
                orbit.push(phi.apply(orbit.last().unwrap()));
            }
            for (i, row) in w_inv.iter().enumerate() {
                let mut g = BiPoly::zero(ring);
                for (l, o) in orbit.iter().enumerate() {
                    g = g.add(&o.scale(&ring.embed_scalar(&row[l])));
                }
                if !g.is_zero() {
                    let mut k = key.clone();
                    k.push(i as i64);
                    next.push((k, g));
                }
            }
        }
        parts = next;
    }
    let mut out: ComponentSet<R> = BTreeMap::new();
    let mut total = BiPoly::zero(ring);
    for (k, g) in parts {
        total = total.add(&g);
        if out.insert(k, g).is_some() {
            return Err(Error::Internal("duplicate eigencomponent key".into()));
        }
    }
    if !total.sub(f).is_zero() {
        return Err(Error::Internal("eigencomponents do not sum back".into()));
    }
    Ok(out)
}

/// The averaging projector onto the eigencomponent of the residue tuple:
/// |G|⁻¹ Σ_l ζ₁^{−i₁l₁}⋯ζ_r^{−i_rl_r}·(φ₁^{l₁}∘⋯∘φ_r^{l_r})(f).
pub fn reynolds_component<F: Field + UnitGroup, R: KAlgebra<F>>(
    group: &FiniteAbelianSubgroup<F, R>,
    f: &BiPoly<R>,
    residues: &[i64],
) -> Result<BiPoly<R>> {
    let field = &group.field;
    let ring = &group.ring;
    if residues.len() != group.gens.len() {
        return Err(Error::InvalidCharacter(
            "residue tuple length must match the generator count".into(),
        ));
    }
    let order = group.order();
    let order_in_k = field.from_i64(order as i64);
    if field.is_zero(&order_in_k) {
        return Err(Error::NonModular);
    }
    // Recurse over generators: at level j, walk l_j = 0..d_j by iterated
    // application (generators commute) and accumulate the weight
    // ζ_j^{−i_j·l_j}.
    fn rec<F: Field + UnitGroup, R: KAlgebra<F>>(
        group: &FiniteAbelianSubgroup<F, R>,
        residues: &[i64],
        j: usize,
        g: &BiPoly<R>,
        weight: &F::Elem,
        acc: &mut BiPoly<R>,
    ) {
        let field = &group.field;
        if j == group.gens.len() {
            *acc = acc.add(&g.scale(&group.ring.embed_scalar(weight)));
            return;
        }
        let d = group.orders[j];
        let neg_i = (d as i64 - residues[j].rem_euclid(d as i64)) as u64 % d;
        let mut cur = g.clone();
        for l in 0..d {
            let zw = field.pow(&group.zetas[j], (neg_i * l) % d);
            rec(group, residues, j + 1, &cur, &field.mul(weight, &zw), acc);
            if l + 1 < d {
                cur = group.gens[j].apply(&cur);
            }
        }
    }
    let mut acc = BiPoly::zero(ring);
    rec(group, residues, 0, f, &field.one(), &mut acc);
    let inv_order = field.inv(&order_in_k)?;
    Ok(acc.scale(&ring.embed_scalar(&inv_order)))
}

/// For each generator, find the power m with φ(f) = ζ^m·f; the resulting
/// residue tuple is the class of f under the conjugated action.
pub fn semi_invariant_class<F: Field + UnitGroup, R: KAlgebra<F>>(
    group: &FiniteAbelianSubgroup<F, R>,
    f: &BiPoly<R>,
) -> Option<Vec<i64>> {
    if f.is_zero() {
        return Some(vec![0; group.gens.len()]);
    }
    let mut class = Vec::with_capacity(group.gens.len());
    for (phi, (&d, zeta)) in group.gens.iter().zip(group.orders.iter().zip(&group.zetas)) {
        let image = phi.apply(f);
        let m = (0..d).find(|&m| {
            let scaled = f.scale(&group.ring.embed_scalar(&group.field.pow(zeta, m)));
            image.sub(&scaled).is_zero()
        })?;
        class.push(m as i64);
    }
    Some(class)
}

/// The diagonal side: Γ ⊆ (k*)² acting by x_i ↦ (tuple)_i·x_i, graded by
/// monomial classes in the quotient of ℤ² by the relation lattice.
#[derive(Clone, Debug)]
pub struct DiagonalContext<F: Field + UnitGroup> {
    pub field: F,
    pub pairs: Vec<(F::Elem, F::Elem)>,
    pub chars: CharacterGroup<F>,
    pub lattice: RelationLattice,
    pub quotient: QuotientGroup,
}

impl<F: Field + UnitGroup> DiagonalContext<F> {
    pub fn new(field: F, pairs: Vec<(F::Elem, F::Elem)>) -> Result<Self> {
        let tuples: Vec<Vec<F::Elem>> =
            pairs.iter().map(|(a, b)| vec![a.clone(), b.clone()]).collect();
        let chars = CharacterGroup::new(field.clone(), 2, tuples)?;
        let lattice = chars.relation_lattice()?;
        let quotient = quotient_structure(&lattice);
        Ok(DiagonalContext { field, pairs, chars, lattice, quotient })
    }

    pub fn gamma1(&self) -> Class {
        self.quotient.gammas[0].clone()
    }

    pub fn gamma2(&self) -> Class {
        self.quotient.gammas[1].clone()
    }

    pub fn monomial_class(&self, a: u32, b: u32) -> Class {
        self.quotient.project(&vec![i128::from(a), i128::from(b)])
    }

    /// Value of the γ-character at the j-th generator pair.
    pub fn character_value(&self, j: usize, gamma: &Class) -> Result<F::Elem> {
        let v = self.quotient.lift(gamma);
        let (a, b) = &self.pairs[j];
        let va = i64::try_from(v[0]).map_err(|_| Error::Internal("exponent overflow".into()))?;
        let vb = i64::try_from(v[1]).map_err(|_| Error::Internal("exponent overflow".into()))?;
        Ok(self
            .field
            .mul(&self.field.pow_i(a, va)?, &self.field.pow_i(b, vb)?))
    }

    /// Group the monomials of f by class. Exact for infinite Γ as well,
    /// since only exponents enter.
    pub fn diagonal_components<R: Ring>(&self, f: &BiPoly<R>) -> BTreeMap<Class, BiPoly<R>> {
        let mut out: BTreeMap<Class, BiPoly<R>> = BTreeMap::new();
        for (e, c) in f.terms() {
            let class = self.monomial_class(e.a, e.b);
            let term = BiPoly::term(&f.ring, c.clone(), e.a, e.b);
            out.entry(class)
                .and_modify(|g| *g = g.add(&term))
                .or_insert(term);
        }
        out
    }

    /// The common class of all monomials, if one exists. The zero
    /// polynomial reports the zero class.
    pub fn is_homogeneous<R: Ring>(&self, f: &BiPoly<R>) -> Option<Class> {
        if f.is_zero() {
            return Some(self.quotient.zero());
        }
        let comps = self.diagonal_components(f);
        if comps.len() == 1 {
            comps.into_keys().next()
        } else {
            None
        }
    }

    pub fn t_indices(&self) -> Vec<TIndex> {
        vec![t_index(&self.quotient, 1), t_index(&self.quotient, 2)]
    }

    pub fn canonical(&self, gamma: &Class) -> Result<CanonicalExpression> {
        canonical_expression(&self.quotient, gamma)
    }

    /// The diagonal automorphism of the j-th pair over a k-algebra R.
    pub fn diagonal_map<R: KAlgebra<F>>(&self, ring: &R, j: usize) -> PolyMap<R> {
        let (a, b) = &self.pairs[j];
        PolyMap::diagonal(ring, ring.embed_scalar(a), ring.embed_scalar(b))
    }
}

/// True when every coefficient of f is divisible by the prime π of k[t].
pub fn reduces_to_zero_mod<F: Field>(
    ring: &PolyRing<F>,
    f: &BiPoly<PolyRing<F>>,
    pi: &UniPoly<F>,
) -> bool {
    f.terms().all(|(_, c)| {
        let (_, r) = ring.div_rem(c, pi).expect("prime is nonzero");
        r.is_zero()
    })
}

/// A hand-checkable vanishing verdict for a raw generator list: degenerate
/// means the list is nonempty and every generator vanishes mod π.
pub fn degeneration_verdict<F: Field>(
    ring: &PolyRing<F>,
    generators: &[BiPoly<PolyRing<F>>],
    pi: &UniPoly<F>,
) -> bool {
    !generators.is_empty()
        && generators.iter().all(|g| reduces_to_zero_mod(ring, g, pi))
}

/// R-module generators, up to total degree `bound`, of the graded piece
/// attached to γ for the twisted grading transported through ψ: primitive
/// parts of ψ(monomials of class λ) times f₁^{i₁}f₂^{i₂}, with (i, λ)
/// from the canonical expression of γ.
pub fn v_gamma_generators<F: Field + UnitGroup>(
    ctx: &DiagonalContext<F>,
    psi: &PolyMap<PolyRing<F>>,
    gamma: &Class,
    bound: u32,
) -> Result<Vec<BiPoly<PolyRing<F>>>> {
    let ring = &psi.ring;
    for im in &psi.images {
        let (content, _) = im.content_primitive()?;
        if !ring.is_one(&content) {
            return Err(Error::Unsupported(
                "images are not primitive; extract their contents first".into(),
            ));
        }
    }
    let expr = ctx.canonical(gamma)?;
    // Free-part exponents must be nonnegative or the piece is zero.
    if expr.exps[..expr.r].iter().any(|&e| e < 0) {
        return Ok(Vec::new());
    }
    // Exponent of f₁ and f₂ from the reordered positions.
    let mut fexp = [0u32; 2];
    for l in 0..expr.s {
        let orig = expr.perm[l];
        fexp[orig - 1] = u32::try_from(expr.exps[l])
            .map_err(|_| Error::Internal("negative graded exponent".into()))?;
    }
    let d1 = psi.images[0].total_degree().unwrap_or(0).max(1);
    let d2 = psi.images[1].total_degree().unwrap_or(0).max(1);
    let base_deg = fexp[0] * d1 + fexp[1] * d2;
    if base_deg > bound {
        return Ok(Vec::new());
    }
    let budget = bound - base_deg;
    let f_power = psi.images[0].pow(fexp[0]).mul(&psi.images[1].pow(fexp[1]));
    let mut out = Vec::new();
    for a in 0..=budget / d1 {
        for b in 0..=(budget - a * d1) / d2 {
            if ctx.monomial_class(a, b) != expr.lambda {
                continue;
            }
            let image = psi.images[0].pow(a).mul(&psi.images[1].pow(b));
            let (_, prim) = image.content_primitive()?;
            out.push(prim.mul(&f_power));
        }
    }
    Ok(out)
}

/// For each class realized by a monomial within the bound, report whether
/// every bounded generator of the transported graded piece vanishes mod π.
pub fn degeneration_check<F: Field + UnitGroup>(
    ctx: &DiagonalContext<F>,
    psi: &PolyMap<PolyRing<F>>,
    pi: &UniPoly<F>,
    bound: u32,
) -> Result<BTreeMap<Class, bool>> {
    let ring = &psi.ring;
    let mut classes = std::collections::BTreeSet::new();
    for a in 0..=bound {
        for b in 0..=bound.saturating_sub(a) {
            classes.insert(ctx.monomial_class(a, b));
        }
    }
    let mut out = BTreeMap::new();
    for gamma in classes {
        let gens = v_gamma_generators(ctx, psi, &gamma, bound)?;
        if gens.is_empty() {
            continue;
        }
        out.insert(gamma, degeneration_verdict(ring, &gens, pi));
    }
    Ok(out)
}
