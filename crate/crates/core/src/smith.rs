//! Smith normal form over the integers, with the unimodular transforms,
//! plus the integer linear solvers built on it. This is the engine behind
//! coboundary solving, `Ext`, and the determinant-repair step of the
//! modular matrix lift.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMat = Vec<Vec<BigInt>>;

/// `p * a * q = d` with `p`, `q` unimodular and `d` diagonal with
/// `d[0] | d[1] | ...` (nonnegative diagonal).
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub p: IntMat,
    pub q: IntMat,
    pub d: IntMat,
}

fn identity(n: usize) -> IntMat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_mul_int(a: &IntMat, b: &IntMat) -> IntMat {
    let rows = a.len();
    let inner = if rows > 0 { a[0].len() } else { 0 };
    let cols = if b.is_empty() { 0 } else { b[0].len() };
    let mut out = vec![vec![BigInt::zero(); cols]; rows];
    for i in 0..rows {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..cols {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

/// Compute the Smith normal form of an integer matrix.
pub fn smith_normal_form(a: &IntMat) -> SmithForm {
    let rows = a.len();
    let cols = if rows > 0 { a[0].len() } else { 0 };
    let mut d = a.clone();
    let mut p = identity(rows);
    let mut q = identity(cols);

    let mut k = 0;
    while k < rows.min(cols) {
        // locate a pivot: nonzero entry of least absolute value in the
        // trailing submatrix
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if d[i][j].is_zero() {
                    continue;
                }
                match &pivot {
                    None => pivot = Some((i, j)),
                    Some((pi, pj)) => {
                        if d[i][j].abs() < d[*pi][*pj].abs() {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        d.swap(k, pi);
        p.swap(k, pi);
        for row in d.iter_mut() {
            row.swap(k, pj);
        }
        for row in q.iter_mut() {
            row.swap(k, pj);
        }

        // clear row k and column k by Euclidean steps
        let mut dirty = true;
        while dirty {
            dirty = false;
            for i in (k + 1)..rows {
                if d[i][k].is_zero() {
                    continue;
                }
                let f = d[i][k].div_floor(&d[k][k]);
                if !f.is_zero() {
                    for j in 0..cols {
                        let t = &f * &d[k][j];
                        d[i][j] -= t;
                    }
                    for j in 0..rows {
                        let t = &f * &p[k][j];
                        p[i][j] -= t;
                    }
                }
                if !d[i][k].is_zero() {
                    // remainder nonzero: swap rows to continue Euclid
                    d.swap(k, i);
                    p.swap(k, i);
                    dirty = true;
                }
            }
            for j in (k + 1)..cols {
                if d[k][j].is_zero() {
                    continue;
                }
                let f = d[k][j].div_floor(&d[k][k]);
                if !f.is_zero() {
                    for i in 0..rows {
                        let t = &f * &d[i][k];
                        d[i][j] -= t;
                    }
                    for row in q.iter_mut() {
                        let tq = &f * &row[k];
                        row[j] -= tq;
                    }
                }
                if !d[k][j].is_zero() {
                    for row in d.iter_mut() {
                        row.swap(k, j);
                    }
                    for row in q.iter_mut() {
                        row.swap(k, j);
                    }
                    dirty = true;
                }
            }
        }

        // enforce divisibility d[k][k] | d[i][j] for the trailing block
        let mut fixed = false;
        'scan: for i in (k + 1)..rows {
            for j in (k + 1)..cols {
                if !(&d[i][j] % &d[k][k]).is_zero() {
                    // add row i to row k, then restart elimination at k
                    for c in 0..cols {
                        let t = d[i][c].clone();
                        d[k][c] += t;
                    }
                    for c in 0..rows {
                        let t = p[i][c].clone();
                        p[k][c] += t;
                    }
                    fixed = true;
                    break 'scan;
                }
            }
        }
        if fixed {
            continue; // redo this k
        }

        if d[k][k].is_negative() {
            for j in 0..cols {
                d[k][j] = -d[k][j].clone();
            }
            for j in 0..rows {
                p[k][j] = -p[k][j].clone();
            }
        }
        k += 1;
    }

    SmithForm { p, q, d }
}

/// Solve `a * x = b` over the integers. Returns any solution, or `None`
/// when the system is inconsistent.
pub fn solve_integer(a: &IntMat, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let rows = a.len();
    let cols = if rows > 0 { a[0].len() } else { 0 };
    if rows == 0 || cols == 0 {
        return if b.iter().all(|v| v.is_zero()) {
            Some(vec![BigInt::zero(); cols])
        } else {
            None
        };
    }
    let snf = smith_normal_form(a);
    // a = p^-1 d q^-1, so a x = b <=> d (q^-1 x) = p b
    let pb: Vec<BigInt> = snf
        .p
        .iter()
        .map(|row| row.iter().zip(b).map(|(c, v)| c * v).sum())
        .collect();
    let mut z = vec![BigInt::zero(); cols];
    for i in 0..rows.min(cols) {
        let dk = &snf.d[i][i];
        if dk.is_zero() {
            if !pb[i].is_zero() {
                return None;
            }
        } else {
            let (quot, rem) = pb[i].div_rem(dk);
            if !rem.is_zero() {
                return None;
            }
            z[i] = quot;
        }
    }
    for i in cols.min(rows)..rows {
        if !pb[i].is_zero() {
            return None;
        }
    }
    // x = q z
    let x: Vec<BigInt> = snf
        .q
        .iter()
        .map(|row| row.iter().zip(&z).map(|(c, v)| c * v).sum())
        .collect();
    Some(x)
}

/// Solve `a * x ≡ b (mod m)` over the integers, `m >= 1`. Returns the
/// unknowns only (slack multipliers are discarded).
pub fn solve_congruence(a: &IntMat, b: &[BigInt], modulus: &BigInt) -> Option<Vec<BigInt>> {
    let rows = a.len();
    let cols = if rows > 0 { a[0].len() } else { 0 };
    // augment with m * I on the right: [A | mI] [x; k] = b
    let mut aug = Vec::with_capacity(rows);
    for (i, row) in a.iter().enumerate() {
        let mut r = row.clone();
        for j in 0..rows {
            r.push(if i == j { modulus.clone() } else { BigInt::zero() });
        }
        aug.push(r);
    }
    let sol = solve_integer(&aug, b)?;
    Some(sol.into_iter().take(cols).collect())
}

/// Extended gcd of a vector: returns `(g, coeffs)` with
/// `sum(coeffs[i] * values[i]) = g >= 0`.
pub fn ext_gcd_vec(values: &[BigInt]) -> (BigInt, Vec<BigInt>) {
    let mut g = BigInt::zero();
    let mut coeffs = vec![BigInt::zero(); values.len()];
    for (i, v) in values.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        if g.is_zero() {
            if v.is_negative() {
                g = -v.clone();
                coeffs[i] = -BigInt::one();
            } else {
                g = v.clone();
                coeffs[i] = BigInt::one();
            }
            continue;
        }
        let e = g.extended_gcd(v);
        // e.gcd = e.x * g + e.y * v
        for c in coeffs.iter_mut() {
            *c *= &e.x;
        }
        coeffs[i] = e.y.clone();
        g = e.gcd;
    }
    (g, coeffs)
}
