//! Integer lattice computations behind the character grading: Hermite and
//! Smith normal forms with unimodular certificates, relation lattices of
//! unit-tuple subgroups, quotient groups with canonical coordinates,
//! t-indices, and the unique graded expression of a class.
//!
//! All integer work uses i128; inputs are unit-group exponents of desk
//! scale, far from overflow.

use std::fmt;

use crate::error::{Error, Result};
use crate::fields::{UnitCode, UnitGroup};
use crate::ring::Field;

pub type IVec = Vec<i128>;
pub type IMat = Vec<IVec>;

pub fn identity_mat(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

pub fn mat_mul_i(a: &IMat, b: &IMat) -> IMat {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "dimension mismatch");
            (0..cols)
                .map(|j| (0..inner).map(|i| row[i] * b[i][j]).sum())
                .collect()
        })
        .collect()
}

pub fn mat_vec_i(a: &IMat, x: &IVec) -> IVec {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(c, v)| c * v).sum())
        .collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det_i(a: &IMat) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m = a.to_vec();
    let mut sign: i128 = 1;
    let mut prev: i128 = 1;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(s) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return 0;
            };
            m.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Row-style Hermite normal form: returns (H, U, rank) with U·A = H,
/// U unimodular, pivots positive, entries above each pivot reduced into
/// [0, pivot). Zero rows of H sit at the bottom.
pub fn hnf_rows(a: &IMat) -> (IMat, IMat, usize) {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut h = a.to_vec();
    let mut u = identity_mat(rows);
    let mut rank = 0;
    for col in 0..cols {
        // Euclidean elimination below the working row.
        loop {
            let mut best: Option<usize> = None;
            for r in rank..rows {
                if h[r][col] != 0 {
                    best = Some(match best {
                        Some(b) if h[b][col].abs() <= h[r][col].abs() => b,
                        _ => r,
                    });
                }
            }
            let Some(b) = best else { break };
            h.swap(rank, b);
            u.swap(rank, b);
            if h[rank][col] < 0 {
                for x in h[rank].iter_mut() {
                    *x = -*x;
                }
                for x in u[rank].iter_mut() {
                    *x = -*x;
                }
            }
            let p = h[rank][col];
            let mut done = true;
            for r in rank + 1..rows {
                let q = h[r][col].div_euclid(p);
                if q != 0 {
                    for c in 0..cols {
                        h[r][c] -= q * h[rank][c];
                    }
                    for c in 0..rows {
                        u[r][c] -= q * u[rank][c];
                    }
                }
                if h[r][col] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rank < rows && h[rank][col] != 0 {
            // Reduce the entries above the new pivot.
            let p = h[rank][col];
            for r in 0..rank {
                let q = h[r][col].div_euclid(p);
                if q != 0 {
                    for c in 0..cols {
                        h[r][c] -= q * h[rank][c];
                    }
                    for c in 0..rows {
                        u[r][c] -= q * u[rank][c];
                    }
                }
            }
            rank += 1;
        }
    }
    (h, u, rank)
}

/// Basis of the left kernel {x : x·A = 0}, read off the U-rows matching
/// zero rows of the Hermite form.
pub fn left_kernel_rows(a: &IMat) -> IMat {
    let (h, u, rank) = hnf_rows(a);
    let _ = &h;
    u[rank..].to_vec()
}

fn transpose(a: &IMat) -> IMat {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    (0..cols)
        .map(|j| (0..rows).map(|i| a[i][j]).collect())
        .collect()
}

/// Basis of the right kernel {x : A·x = 0}, as a list of column vectors.
pub fn right_kernel_cols(a: &IMat, cols: usize) -> IMat {
    if a.is_empty() {
        return identity_mat(cols);
    }
    left_kernel_rows(&transpose(a))
}

/// One integer solution of A·x = b, or None when b is outside the
/// column lattice of A.
pub fn solve_integer(a: &IMat, b: &IVec) -> Option<IVec> {
    let rows = a.len();
    assert_eq!(rows, b.len(), "row/rhs mismatch");
    let cols = if rows == 0 { 0 } else { a[0].len() };
    if rows == 0 {
        return Some(Vec::new());
    }
    let at = transpose(a);
    let (h, u, rank) = hnf_rows(&at);
    // Solve z·H = bᵀ by forward substitution over the echelon rows.
    let mut residual = b.clone();
    let mut z = vec![0i128; cols];
    for r in 0..rank {
        let Some(pc) = h[r].iter().position(|&x| x != 0) else {
            break;
        };
        let p = h[r][pc];
        if residual[pc] % p != 0 {
            return None;
        }
        let q = residual[pc] / p;
        z[r] = q;
        for c in 0..rows {
            residual[c] -= q * h[r][c];
        }
    }
    if residual.iter().any(|&x| x != 0) {
        return None;
    }
    // x = zᵀ·U as a column vector.
    let mut x = vec![0i128; cols];
    for (r, &zr) in z.iter().enumerate() {
        if zr != 0 {
            for c in 0..cols {
                x[c] += zr * u[r][c];
            }
        }
    }
    Some(x)
}

/// Smith normal form with unimodular certificates: U·A·V = D, plus the
/// inverse of V for coordinate lifting. Verified on every call.
pub struct Snf {
    pub d: IMat,
    pub u: IMat,
    pub v: IMat,
    pub v_inv: IMat,
}

// Column operation helpers keep v and v_inv in sync:
// d ← d·E, v ← v·E, v_inv ← E⁻¹·v_inv.
fn col_swap(d: &mut IMat, v: &mut IMat, vi: &mut IMat, i: usize, j: usize) {
    for row in d.iter_mut() {
        row.swap(i, j);
    }
    for row in v.iter_mut() {
        row.swap(i, j);
    }
    vi.swap(i, j);
}

fn col_neg(d: &mut IMat, v: &mut IMat, vi: &mut IMat, i: usize) {
    for row in d.iter_mut() {
        row[i] = -row[i];
    }
    for row in v.iter_mut() {
        row[i] = -row[i];
    }
    for x in vi[i].iter_mut() {
        *x = -*x;
    }
}

fn col_addmul(d: &mut IMat, v: &mut IMat, vi: &mut IMat, dst: usize, src: usize, q: i128) {
    // Column dst += q · column src; the inverse acts on vi as
    // row src -= q · row dst.
    for row in d.iter_mut() {
        row[dst] += q * row[src];
    }
    for row in v.iter_mut() {
        row[dst] += q * row[src];
    }
    let tmp = vi[dst].clone();
    for (x, t) in vi[src].iter_mut().zip(&tmp) {
        *x -= q * *t;
    }
}

/// Diagonalize d in place by unimodular row and column operations.
fn snf_eliminate(d: &mut IMat, u: &mut IMat, v: &mut IMat, v_inv: &mut IMat) {
    let rows = d.len();
    let cols = if rows == 0 { 0 } else { d[0].len() };
    let n = rows.min(cols);
    for k in 0..n {
        // Find a nonzero pivot in the remaining block.
        let mut pivot = None;
        'search: for i in k..rows {
            for j in k..cols {
                if d[i][j] != 0 {
                    pivot = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        d.swap(k, pi);
        u.swap(k, pi);
        if pj != k {
            col_swap(d, v, v_inv, k, pj);
        }
        // Clear row and column k alternately until both are clean.
        loop {
            let mut dirty = false;
            for i in k + 1..rows {
                while d[i][k] != 0 {
                    let q = d[i][k].div_euclid(d[k][k]);
                    for c in 0..cols {
                        d[i][c] -= q * d[k][c];
                    }
                    for c in 0..rows {
                        u[i][c] -= q * u[k][c];
                    }
                    if d[i][k] != 0 {
                        d.swap(k, i);
                        u.swap(k, i);
                        dirty = true;
                    }
                }
            }
            for j in k + 1..cols {
                while d[k][j] != 0 {
                    let q = d[k][j].div_euclid(d[k][k]);
                    col_addmul(d, v, v_inv, j, k, -q);
                    if d[k][j] != 0 {
                        col_swap(d, v, v_inv, k, j);
                        dirty = true;
                    }
                }
            }
            if !dirty {
                break;
            }
        }
        if d[k][k] < 0 {
            col_neg(d, v, v_inv, k);
        }
    }
}

pub fn snf(a: &IMat) -> Snf {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut d = a.to_vec();
    let mut u = identity_mat(rows);
    let mut v = identity_mat(cols);
    let mut v_inv = identity_mat(cols);
    let n = rows.min(cols);
    loop {
        snf_eliminate(&mut d, &mut u, &mut v, &mut v_inv);
        // Enforce the divisibility chain d₁ | d₂ | ⋯ by folding the first
        // offending column and re-eliminating; each fold strictly shrinks
        // a diagonal entry, so this terminates.
        let violation = (0..n.saturating_sub(1)).find(|&i| {
            let (a, b) = (d[i][i], d[i + 1][i + 1]);
            a != 0 && b % a != 0
        });
        match violation {
            Some(i) => col_addmul(&mut d, &mut v, &mut v_inv, i, i + 1, 1),
            None => break,
        }
    }
    let cert = Snf { d, u, v, v_inv };
    verify_snf(a, &cert);
    cert
}

/// The per-call certificate: U·A·V = D diagonal with divisibility chain,
/// U and V unimodular, V·V⁻¹ = 1.
fn verify_snf(a: &IMat, s: &Snf) {
    let ua = mat_mul_i(&s.u, a);
    let uav = mat_mul_i(&ua, &s.v);
    assert_eq!(uav, s.d, "normal form product mismatch");
    assert_eq!(det_i(&s.u).abs(), 1, "row transform not unimodular");
    assert_eq!(det_i(&s.v).abs(), 1, "column transform not unimodular");
    let vv = mat_mul_i(&s.v, &s.v_inv);
    assert_eq!(vv, identity_mat(s.v.len()), "column transform inverse mismatch");
    let rows = s.d.len();
    let cols = if rows == 0 { 0 } else { s.d[0].len() };
    let mut prev: Option<i128> = None;
    for i in 0..rows.min(cols) {
        for j in 0..cols {
            if j != i {
                assert_eq!(s.d[i][j], 0, "off-diagonal residue");
            }
        }
        let di = s.d[i][i];
        assert!(di >= 0);
        if let Some(p) = prev {
            if p == 0 {
                assert_eq!(di, 0, "divisibility chain broken");
            } else {
                assert_eq!(di % p, 0, "divisibility chain broken");
            }
        }
        prev = Some(di);
    }
}

/// A subgroup of (k*)ⁿ presented by generator tuples.
#[derive(Clone, Debug)]
pub struct CharacterGroup<F: Field + UnitGroup> {
    pub field: F,
    pub n: usize,
    pub gens: Vec<Vec<F::Elem>>,
}

impl<F: Field + UnitGroup> CharacterGroup<F> {
    pub fn new(field: F, n: usize, gens: Vec<Vec<F::Elem>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidCharacter("arity must be at least 1".into()));
        }
        for g in &gens {
            if g.len() != n {
                return Err(Error::InvalidCharacter(format!(
                    "generator tuple length {} does not match arity {}",
                    g.len(),
                    n
                )));
            }
            for e in g {
                if field.is_zero(e) {
                    return Err(Error::NotAUnit("zero entry in character tuple".into()));
                }
            }
        }
        Ok(CharacterGroup { field, n, gens })
    }

    /// Evaluate a tuple at an exponent vector: ∏ g[l]^{e_l}.
    pub fn tuple_power(&self, tuple: &[F::Elem], e: &[i128]) -> Result<F::Elem> {
        let mut acc = self.field.one();
        for (g, &exp) in tuple.iter().zip(e) {
            let exp_i64 =
                i64::try_from(exp).map_err(|_| Error::Internal("exponent overflow".into()))?;
            acc = self.field.mul(&acc, &self.field.pow_i(g, exp_i64)?);
        }
        Ok(acc)
    }

    /// The full lattice of exponent vectors annihilating every generator.
    pub fn relation_lattice(&self) -> Result<RelationLattice> {
        let m = self.field.torsion_modulus();
        // Encode each entry; one exact row per (generator, prime), one
        // torsion row per generator, with auxiliary mod-m columns.
        let codes: Vec<Vec<UnitCode>> = self
            .gens
            .iter()
            .map(|g| g.iter().map(|e| self.field.encode_unit(e)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        let mut primes: Vec<u64> = Vec::new();
        for gc in &codes {
            for c in gc {
                for &p in c.free.keys() {
                    if !primes.contains(&p) {
                        primes.push(p);
                    }
                }
            }
        }
        primes.sort_unstable();
        // Stack auxiliary mod-m columns so torsion congruences become exact:
        // a vector i lies in the lattice iff (i, y) solves the stacked
        // homogeneous system for some auxiliary y.
        let torsion_rows = codes.len();
        let width = self.n + torsion_rows;
        let mut stacked: IMat = Vec::new();
        for (gi, gc) in codes.iter().enumerate() {
            for &p in &primes {
                let mut row: IVec = gc
                    .iter()
                    .map(|c| i128::from(c.free.get(&p).copied().unwrap_or(0)))
                    .collect();
                if row.iter().any(|&x| x != 0) {
                    row.resize(width, 0);
                    stacked.push(row);
                }
            }
            let mut trow: IVec = gc.iter().map(|c| i128::from(c.torsion)).collect();
            trow.resize(width, 0);
            trow[self.n + gi] = i128::from(m);
            stacked.push(trow);
        }
        let kernel = right_kernel_cols(&stacked, width);
        let projected: IMat = kernel.iter().map(|k| k[..self.n].to_vec()).collect();
        let (h, _, rank) = hnf_rows(&projected);
        let basis: IMat = h[..rank].to_vec();
        let lattice = RelationLattice { n: self.n, basis };
        // Certify: every basis row evaluates to 1 on every generator.
        for row in &lattice.basis {
            for g in &self.gens {
                let val = self.tuple_power(g, row)?;
                if !self.field.is_one(&val) {
                    return Err(Error::Internal(
                        "relation basis row fails the unit equation".into(),
                    ));
                }
            }
        }
        Ok(lattice)
    }
}

/// Row basis of the lattice M ⊆ ℤⁿ of exponent relations.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationLattice {
    pub n: usize,
    pub basis: IMat,
}

impl RelationLattice {
    pub fn contains(&self, x: &IVec) -> bool {
        assert_eq!(x.len(), self.n);
        if self.basis.is_empty() {
            return x.iter().all(|&c| c == 0);
        }
        solve_integer(&transpose(&self.basis), x).is_some()
    }
}

/// Element of the quotient ℤⁿ/M in canonical factor coordinates.
pub type Class = Vec<i128>;

/// ℤⁿ/M with coordinates along the invariant factors.
#[derive(Clone, Debug)]
pub struct QuotientGroup {
    pub n: usize,
    /// One entry per coordinate: d ≥ 1 for a ℤ/d factor, 0 for ℤ.
    pub factors: Vec<i128>,
    v: IMat,
    v_inv: IMat,
    /// Images of the coordinate unit vectors e₁,…,e_n.
    pub gammas: Vec<Class>,
}

impl QuotientGroup {
    pub fn reduce(&self, w: &IVec) -> Class {
        w.iter()
            .zip(&self.factors)
            .map(|(&c, &d)| if d == 0 { c } else { c.rem_euclid(d) })
            .collect()
    }

    /// Map an exponent vector to its class.
    pub fn project(&self, x: &IVec) -> Class {
        assert_eq!(x.len(), self.n);
        let w = (0..self.n)
            .map(|j| (0..self.n).map(|i| x[i] * self.v[i][j]).sum())
            .collect();
        self.reduce(&w)
    }

    /// Any integer-vector representative of a class.
    pub fn lift(&self, c: &Class) -> IVec {
        assert_eq!(c.len(), self.n);
        (0..self.n)
            .map(|j| (0..self.n).map(|i| c[i] * self.v_inv[i][j]).sum())
            .collect()
    }

    pub fn zero(&self) -> Class {
        vec![0; self.n]
    }

    pub fn add(&self, a: &Class, b: &Class) -> Class {
        self.reduce(&a.iter().zip(b).map(|(x, y)| x + y).collect())
    }

    pub fn neg(&self, a: &Class) -> Class {
        self.reduce(&a.iter().map(|x| -x).collect())
    }

    pub fn sub(&self, a: &Class, b: &Class) -> Class {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, k: i128, a: &Class) -> Class {
        self.reduce(&a.iter().map(|x| k * x).collect())
    }

    pub fn is_zero_class(&self, a: &Class) -> bool {
        a.iter().all(|&x| x == 0)
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.iter().all(|&d| d == 1)
    }

    /// Columns d·e_i for the finite factors, used to express congruences
    /// as exact integer systems.
    fn factor_columns(&self) -> Vec<IVec> {
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != 0)
            .map(|(i, &d)| {
                let mut col = vec![0; self.n];
                col[i] = d;
                col
            })
            .collect()
    }

    /// Solve target = Σ c_j·gens_j in the quotient; returns the c_j.
    pub fn express_in(&self, gens: &[Class], target: &Class) -> Option<IVec> {
        let extra = self.factor_columns();
        let width = gens.len() + extra.len();
        if width == 0 {
            return if self.is_zero_class(target) {
                Some(Vec::new())
            } else {
                None
            };
        }
        let mut cols: Vec<IVec> = gens.to_vec();
        cols.extend(extra);
        let a: IMat = (0..self.n)
            .map(|r| cols.iter().map(|c| c[r]).collect())
            .collect();
        solve_integer(&a, target).map(|sol| sol[..gens.len()].to_vec())
    }

    pub fn member_of(&self, gens: &[Class], target: &Class) -> bool {
        self.express_in(gens, target).is_some()
    }

    /// The subgroup generated by all γ_j with j ≠ i (1-based i).
    pub fn subgroup_without(&self, i: usize) -> Vec<Class> {
        assert!((1..=self.n).contains(&i));
        self.gammas
            .iter()
            .enumerate()
            .filter(|(j, _)| j + 1 != i)
            .map(|(_, g)| g.clone())
            .collect()
    }

    /// Order of a class: None means infinite.
    pub fn class_order(&self, a: &Class) -> Option<i128> {
        // The set {t : t·a = 0} is t₀ℤ; compute t₀ from an integer kernel.
        let extra = self.factor_columns();
        let mut cols: Vec<IVec> = vec![a.clone()];
        cols.extend(extra);
        let m: IMat = (0..self.n)
            .map(|r| cols.iter().map(|c| c[r]).collect())
            .collect();
        let kernel = right_kernel_cols(&m, cols.len());
        let g = kernel.iter().map(|k| k[0]).fold(0i128, gcd_i);
        if g == 0 {
            None
        } else {
            Some(g.abs())
        }
    }
}

pub fn gcd_i(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Quotient ℤⁿ/M via Smith normal form, with verified certificates.
pub fn quotient_structure(m: &RelationLattice) -> QuotientGroup {
    let n = m.n;
    if m.basis.is_empty() {
        let q = QuotientGroup {
            n,
            factors: vec![0; n],
            v: identity_mat(n),
            v_inv: identity_mat(n),
            gammas: Vec::new(),
        };
        return finish_quotient(q);
    }
    let s = snf(&m.basis);
    let rank = m.basis.len().min(n);
    let mut factors = vec![0i128; n];
    for i in 0..rank {
        factors[i] = s.d[i][i];
    }
    let q = QuotientGroup {
        n,
        factors,
        v: s.v,
        v_inv: s.v_inv,
        gammas: Vec::new(),
    };
    finish_quotient(q)
}

fn finish_quotient(mut q: QuotientGroup) -> QuotientGroup {
    q.gammas = (0..q.n)
        .map(|i| {
            let mut e = vec![0; q.n];
            e[i] = 1;
            q.project(&e)
        })
        .collect();
    q
}

/// The minimal t ≥ 1 with t·γ_i in the subgroup spanned by the other γ_j.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TIndex {
    Finite(i128),
    Infinite,
}

impl fmt::Display for TIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TIndex::Finite(t) => write!(f, "{t}"),
            TIndex::Infinite => write!(f, "inf"),
        }
    }
}

pub fn t_index(q: &QuotientGroup, i: usize) -> TIndex {
    assert!((1..=q.n).contains(&i));
    let others = q.subgroup_without(i);
    // {t : t·γ_i ∈ ⟨others⟩} is a subgroup t₀ℤ of ℤ: read t₀ from the
    // kernel of the assembled exact system.
    let gi = &q.gammas[i - 1];
    let mut cols: Vec<IVec> = vec![gi.clone()];
    cols.extend(others.iter().cloned());
    cols.extend(q.factor_columns());
    let m: IMat = (0..q.n)
        .map(|r| cols.iter().map(|c| c[r]).collect())
        .collect();
    let kernel = right_kernel_cols(&m, cols.len());
    let g = kernel.iter().map(|k| k[0]).fold(0i128, gcd_i);
    if g == 0 {
        TIndex::Infinite
    } else {
        TIndex::Finite(g.abs())
    }
}

/// Unique graded expression of a class: γ = Σ_{l≤s} i_l·γ_{perm[l]} + λ.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalExpression {
    /// perm[l] = original 1-based index of the l-th reordered coordinate;
    /// infinite t first, then finite t ≥ 2, then t = 1.
    pub perm: Vec<usize>,
    pub r: usize,
    pub s: usize,
    pub t: Vec<TIndex>,
    /// Exponents i_1..i_s in reordered positions; free ℤ for l ≤ r,
    /// ranges [0, t_l) for r < l ≤ s.
    pub exps: Vec<i128>,
    pub lambda: Class,
}

pub fn canonical_expression(q: &QuotientGroup, gamma: &Class) -> Result<CanonicalExpression> {
    let n = q.n;
    let t_orig: Vec<TIndex> = (1..=n).map(|i| t_index(q, i)).collect();
    let bucket = |t: &TIndex| match t {
        TIndex::Infinite => 0u8,
        TIndex::Finite(v) if *v >= 2 => 1,
        TIndex::Finite(_) => 2,
    };
    let mut perm: Vec<usize> = (1..=n).collect();
    perm.sort_by_key(|&i| (bucket(&t_orig[i - 1]), i));
    let t: Vec<TIndex> = perm.iter().map(|&i| t_orig[i - 1]).collect();
    let r = t.iter().filter(|x| bucket(x) == 0).count();
    let s = r + t.iter().filter(|x| bucket(x) == 1).count();

    let reordered_gammas: Vec<Class> =
        perm.iter().map(|&i| q.gammas[i - 1].clone()).collect();
    let j = q
        .express_in(&reordered_gammas, gamma)
        .ok_or_else(|| Error::InvalidCharacter("class not generated by the images".into()))?;

    let mut exps = vec![0i128; s];
    let mut lambda = q.zero();
    for l in 0..n {
        match t[l] {
            TIndex::Infinite => {
                exps[l] = j[l];
            }
            TIndex::Finite(tl) => {
                let rem = j[l].rem_euclid(tl);
                let quo = (j[l] - rem) / tl;
                if l < s {
                    exps[l] = rem;
                } else {
                    debug_assert_eq!(rem, 0, "t = 1 leaves no remainder");
                }
                lambda = q.add(&lambda, &q.scale(quo * tl, &reordered_gammas[l]));
            }
        }
    }

    // Cross-checks from the uniqueness argument: recombination, range
    // constraints, and λ in every Λ_j for the finite-index coordinates.
    let mut recomb = lambda.clone();
    for l in 0..s {
        recomb = q.add(&recomb, &q.scale(exps[l], &reordered_gammas[l]));
    }
    if recomb != *gamma {
        return Err(Error::Internal("graded expression does not recombine".into()));
    }
    for (l, e) in exps.iter().enumerate().take(s).skip(r) {
        let TIndex::Finite(tl) = t[l] else {
            unreachable!()
        };
        if !(0..tl).contains(e) {
            return Err(Error::Internal("graded exponent out of range".into()));
        }
    }
    for jj in r..n {
        let lam_gens: Vec<Class> = (r..n)
            .filter(|&l| l != jj)
            .map(|l| reordered_gammas[l].clone())
            .collect();
        if !q.member_of(&lam_gens, &lambda) {
            return Err(Error::Internal(
                "λ-part escapes the finite-index intersection".into(),
            ));
        }
    }
    Ok(CanonicalExpression { perm, r, s, t, exps, lambda })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{PrimeField, Rationals};
    use crate::ring::Ring;
    use num::BigRational;

    #[test]
    fn hnf_of_known_lattice() {
        // Rows (1,-1) and (3,0) generate {(i,j) : i+j ≡ 0 mod 3}.
        let a = vec![vec![1, -1], vec![3, 0]];
        let (h, u, rank) = hnf_rows(&a);
        assert_eq!(rank, 2);
        assert_eq!(h[..2], [vec![1, 2], vec![0, 3]]);
        assert_eq!(mat_mul_i(&u, &a), h);
        assert_eq!(det_i(&u).abs(), 1);
    }

    #[test]
    fn left_kernel_annihilates() {
        let a = vec![vec![2, 4], vec![1, 2], vec![3, 6]];
        let k = left_kernel_rows(&a);
        assert_eq!(k.len(), 2);
        for row in &k {
            let prod: IVec = (0..2).map(|j| (0..3).map(|i| row[i] * a[i][j]).sum()).collect();
            assert_eq!(prod, vec![0, 0]);
        }
    }

    #[test]
    fn snf_certificate_verified_and_chain_sorted() {
        let a = vec![vec![2, 0], vec![0, 3]];
        let s = snf(&a);
        assert_eq!(s.d, vec![vec![1, 0], vec![0, 6]]);
        let a2 = vec![vec![6, 4, 2], vec![4, 4, 4], vec![2, 4, 6]];
        let s2 = snf(&a2);
        assert_eq!(s2.d[0][0], 2);
        assert_eq!(s2.d[1][1] % s2.d[0][0], 0);
    }

    #[test]
    fn solve_integer_finds_and_rejects() {
        // x + 2y = 5 over ℤ with second row 2x + 4y = 10: consistent.
        let a = vec![vec![1, 2], vec![2, 4]];
        let x = solve_integer(&a, &vec![5, 10]).unwrap();
        assert_eq!(x[0] + 2 * x[1], 5);
        assert!(solve_integer(&a, &vec![5, 11]).is_none());
        // 2x = 3 has no integer solution.
        assert!(solve_integer(&vec![vec![2]], &vec![3]).is_none());
    }

    fn gf7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    #[test]
    fn relation_lattice_of_diagonal_pair() {
        // Γ = ⟨(2,2)⟩ over GF(7): ord(2) = 3, lattice {(i,j) : 3 | i+j}.
        let cg = CharacterGroup::new(gf7(), 2, vec![vec![2, 2]]).unwrap();
        let m = cg.relation_lattice().unwrap();
        assert_eq!(m.basis, vec![vec![1, 2], vec![0, 3]]);
        // Brute force agreement over a full period.
        for i in -6i128..6 {
            for j in -6i128..6 {
                let expected = (i + j).rem_euclid(3) == 0;
                assert_eq!(m.contains(&vec![i, j]), expected, "at ({i},{j})");
            }
        }
    }

    #[test]
    fn relation_lattice_with_trivial_second_entry() {
        // Γ = ⟨(2,1)⟩ over GF(7): lattice 3ℤ × ℤ.
        let cg = CharacterGroup::new(gf7(), 2, vec![vec![2, 1]]).unwrap();
        let m = cg.relation_lattice().unwrap();
        assert_eq!(m.basis, vec![vec![3, 0], vec![0, 1]]);
    }

    #[test]
    fn empty_generator_list_gives_full_lattice() {
        let cg = CharacterGroup::new(gf7(), 2, vec![]).unwrap();
        let m = cg.relation_lattice().unwrap();
        assert_eq!(m.basis, identity_mat(2));
        let q = quotient_structure(&m);
        assert!(q.is_trivial());
        assert!(q.is_zero_class(&q.gammas[0]));
        assert!(q.is_zero_class(&q.gammas[1]));
    }

    #[test]
    fn quotient_of_diagonal_pair_is_cyclic_of_order_three() {
        let cg = CharacterGroup::new(gf7(), 2, vec![vec![2, 2]]).unwrap();
        let q = quotient_structure(&cg.relation_lattice().unwrap());
        // Γ_Γ ≅ ℤ/3 with γ₁ = γ₂ a generator.
        assert_eq!(q.class_order(&q.gammas[0]), Some(3));
        assert_eq!(q.gammas[0], q.gammas[1]);
        assert_eq!(t_index(&q, 1), TIndex::Finite(1));
        assert_eq!(t_index(&q, 2), TIndex::Finite(1));
    }

    #[test]
    fn quotient_with_decoupled_coordinates() {
        let cg = CharacterGroup::new(gf7(), 2, vec![vec![2, 1]]).unwrap();
        let q = quotient_structure(&cg.relation_lattice().unwrap());
        assert_eq!(q.class_order(&q.gammas[0]), Some(3));
        assert!(q.is_zero_class(&q.gammas[1]));
        assert_eq!(t_index(&q, 1), TIndex::Finite(3));
        assert_eq!(t_index(&q, 2), TIndex::Finite(1));
        // Membership: Γ^{(1)} = ⟨γ₂⟩ = {0}.
        let g1 = q.subgroup_without(1);
        assert!(q.member_of(&g1, &q.zero()));
        assert!(!q.member_of(&g1, &q.gammas[0]));
    }

    #[test]
    fn canonical_expression_matches_lemma_arithmetic() {
        let cg = CharacterGroup::new(gf7(), 2, vec![vec![2, 1]]).unwrap();
        let q = quotient_structure(&cg.relation_lattice().unwrap());
        // γ = 2γ₁: t₁ = 3 so the x₁-coordinate leads after reordering.
        let gamma = q.scale(2, &q.gammas[0]);
        let e = canonical_expression(&q, &gamma).unwrap();
        assert_eq!(e.r, 0);
        assert_eq!(e.s, 1);
        assert_eq!(e.perm[0], 1);
        assert_eq!(e.exps, vec![2]);
        assert!(q.is_zero_class(&e.lambda));
        // γ = 0 reached as 3γ₁ : exponent 0, λ = 0.
        let z = canonical_expression(&q, &q.zero()).unwrap();
        assert_eq!(z.exps, vec![0]);
        assert!(q.is_zero_class(&z.lambda));
    }

    #[test]
    fn rational_free_quotient_has_infinite_indices() {
        let qq = Rationals;
        let two = BigRational::from_integer(2.into());
        let one = BigRational::from_integer(1.into());
        let cg = CharacterGroup::new(qq, 2, vec![vec![one, two]]).unwrap();
        let m = cg.relation_lattice().unwrap();
        // (i, j) is a relation iff 2^j = 1 iff j = 0.
        assert_eq!(m.basis, vec![vec![1, 0]]);
        let q = quotient_structure(&m);
        assert!(q.is_zero_class(&q.gammas[0]));
        assert_eq!(q.class_order(&q.gammas[1]), None);
        assert_eq!(t_index(&q, 1), TIndex::Finite(1));
        assert_eq!(t_index(&q, 2), TIndex::Infinite);
        // Canonical expression in a free quotient: exponents are integers.
        let gamma = q.scale(-4, &q.gammas[1]);
        let e = canonical_expression(&q, &gamma).unwrap();
        assert_eq!(e.r, 1);
        assert_eq!(e.perm[0], 2);
        assert_eq!(e.exps, vec![-4]);
        assert!(q.is_zero_class(&e.lambda));
    }

    #[test]
    fn mixed_sign_and_free_rational_lattice() {
        let qq = Rationals;
        let neg1 = BigRational::from_integer((-1).into());
        let two = BigRational::from_integer(2.into());
        let cg = CharacterGroup::new(qq, 2, vec![vec![neg1, two]]).unwrap();
        let m = cg.relation_lattice().unwrap();
        // (-1)^i 2^j = 1 iff i even and j = 0.
        assert_eq!(m.basis, vec![vec![2, 0]]);
        let q = quotient_structure(&m);
        assert_eq!(q.class_order(&q.gammas[0]), Some(2));
        assert_eq!(q.class_order(&q.gammas[1]), None);
    }

    #[test]
    fn brute_force_quotient_agreement_over_gf13() {
        // Structural oracle: for Γ = ⟨(a,b)⟩ the quotient order must equal
        // (p−1)² / #{(i,j) mod (p−1) in the lattice} … restricted to the
        // fundamental box. Scan a few generator pairs.
        let f = PrimeField::new(13).unwrap();
        for &(a, b) in &[(2u64, 5u64), (4, 4), (12, 1), (3, 9)] {
            let cg = CharacterGroup::new(f.clone(), 2, vec![vec![a, b]]).unwrap();
            let m = cg.relation_lattice().unwrap();
            let mut in_lattice = 0u64;
            for i in 0..12i128 {
                for j in 0..12i128 {
                    let hit = f.is_one(&f.mul(
                        &f.pow(&a, i as u64),
                        &f.pow(&b, j as u64),
                    ));
                    assert_eq!(m.contains(&vec![i, j]), hit);
                    if hit {
                        in_lattice += 1;
                    }
                }
            }
            let q = quotient_structure(&m);
            let order: i128 = q.factors.iter().product();
            assert_eq!(order as u64 * in_lattice, 144);
        }
    }
}
