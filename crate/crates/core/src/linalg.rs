//! Dense exact linear algebra over an arbitrary field.
//!
//! All routines use Gauss-Jordan elimination with the first nonzero
//! entry as pivot, which keeps results canonical for exact arithmetic.
//! Particular solutions set every free variable to zero, and kernel
//! bases carry a single 1 in their distinguishing free position, so
//! repeated runs produce identical output.

use crate::ring::Field;

/// Reduced row echelon form in place; returns the pivot column of each
/// pivot row (rows beyond the returned length are zero).
pub fn rref<F: Field>(field: &F, mat: &mut [Vec<F::Elem>]) -> Vec<usize> {
    let rows = mat.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = mat[0].len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(src) = (row..rows).find(|&r| !field.is_zero(&mat[r][col])) else {
            continue;
        };
        mat.swap(row, src);
        let inv = field
            .inv(&mat[row][col])
            .expect("nonzero pivot must be invertible");
        for c in col..cols {
            mat[row][c] = field.mul(&mat[row][c], &inv);
        }
        for r in 0..rows {
            if r != row && !field.is_zero(&mat[r][col]) {
                let factor = mat[r][col].clone();
                for c in col..cols {
                    let s = field.mul(&factor, &mat[row][c]);
                    mat[r][c] = field.sub(&mat[r][c], &s);
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    pivots
}

/// One solution of `a x = b` with free variables zero, or None if the
/// system is inconsistent.
pub fn solve<F: Field>(
    field: &F,
    a: &[Vec<F::Elem>],
    b: &[F::Elem],
) -> Option<Vec<F::Elem>> {
    let rows = a.len();
    assert_eq!(rows, b.len(), "row/rhs length mismatch");
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut aug: Vec<Vec<F::Elem>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(field, &mut aug);
    // A pivot in the appended column marks an inconsistent row.
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![field.zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

/// Canonical basis of the null space of `a` (n columns).
pub fn kernel<F: Field>(field: &F, a: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
    let rows = a.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = a[0].len();
    let mut mat: Vec<Vec<F::Elem>> = a.to_vec();
    let pivots = rref(field, &mut mat);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![field.zero(); cols];
        v[free] = field.one();
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = field.neg(&mat[r][free]);
        }
        basis.push(v);
    }
    basis
}

/// Inverse of a square matrix, or None when singular.
pub fn mat_inv<F: Field>(field: &F, a: &[Vec<F::Elem>]) -> Option<Vec<Vec<F::Elem>>> {
    let n = a.len();
    let mut aug: Vec<Vec<F::Elem>> = Vec::with_capacity(n);
    for (i, row) in a.iter().enumerate() {
        assert_eq!(row.len(), n, "matrix must be square");
        let mut r = row.clone();
        for j in 0..n {
            r.push(if i == j { field.one() } else { field.zero() });
        }
        aug.push(r);
    }
    let pivots = rref(field, &mut aug);
    // A singular left block pushes a pivot into the appended identity.
    if pivots.len() != n || pivots.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_vec<F: Field>(field: &F, a: &[Vec<F::Elem>], x: &[F::Elem]) -> Vec<F::Elem> {
    a.iter()
        .map(|row| {
            let mut acc = field.zero();
            for (c, xi) in row.iter().zip(x) {
                acc = field.add(&acc, &field.mul(c, xi));
            }
            acc
        })
        .collect()
}

pub fn mat_mul<F: Field>(
    field: &F,
    a: &[Vec<F::Elem>],
    b: &[Vec<F::Elem>],
) -> Vec<Vec<F::Elem>> {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "dimension mismatch");
            (0..cols)
                .map(|j| {
                    let mut acc = field.zero();
                    for i in 0..inner {
                        acc = field.add(&acc, &field.mul(&row[i], &b[i][j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn det2<F: Field>(field: &F, a: &[Vec<F::Elem>]) -> F::Elem {
    assert_eq!(a.len(), 2, "det2 expects a 2x2 matrix");
    field.sub(
        &field.mul(&a[0][0], &a[1][1]),
        &field.mul(&a[0][1], &a[1][0]),
    )
}
