//! Words in the transvection/dilation generators, their evaluation, the
//! ordered unitriangular factorization, and elementary-matrix
//! decomposition realizing bounded generation at desk scale.
//!
//! Decomposition over the integers is Euclidean row reduction: row
//! operations `t_ij(q)` run the Euclidean algorithm down each column.
//! Decomposition over `Z/m` lifts the matrix to an integer matrix of
//! determinant exactly one, decomposes over `Z`, and reduces the
//! parameters mod `m`; the round trip certifies each output.

use crate::matgroup::{self, Mat, MatError};
use crate::rings::{int_det, RingElem, RingError, RingKind, RingSpec};
use crate::smith::ext_gcd_vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("letter index ({i},{j}) out of range for dimension {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
    #[error("transvection letter requires i != j")]
    EqualIndices,
    #[error("dilation parameter is not a unit")]
    NonUnitDilation,
    #[error("matrix determinant is not 1")]
    DetNotOne,
    #[error("matrix determinant is not a unit")]
    DetNotUnit,
    #[error("decomposition supports only the integers and modular rings")]
    UnsupportedRing,
    #[error("integer lift failed: {0}")]
    LiftFailure(String),
    #[error("matrix is not unitriangular")]
    NotUnitriangular,
    #[error("factor order is not admissible for peeling: residual is not the identity")]
    InadmissibleOrder,
    #[error("factor order must cover each pair i<j exactly once")]
    BadOrder,
    #[error("word does not evaluate to the given matrix")]
    EvalMismatch,
    #[error("bad word serialization: {0}")]
    Serde(String),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// One generator letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Letter {
    /// `t_ij(param)`, 1-based indices.
    Transvection { i: usize, j: usize, param: RingElem },
    /// `d_i(param)`, param a unit.
    Dilation { i: usize, param: RingElem },
}

/// A word in the generators with a fixed left-to-right evaluation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenWord {
    pub n: usize,
    pub letters: Vec<Letter>,
}

impl GenWord {
    pub fn empty(n: usize) -> Self {
        GenWord {
            n,
            letters: Vec::new(),
        }
    }

    pub fn transvections_only(&self) -> bool {
        self.letters
            .iter()
            .all(|l| matches!(l, Letter::Transvection { .. }))
    }
}

/// A fixed surjection onto index pairs, stored as an explicit list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorOrder {
    pub pairs: Vec<(usize, usize)>,
}

impl FactorOrder {
    /// The default order: lexicographic on `(j - i, i)`, superdiagonals
    /// first. Back-substitution is direct in this order.
    pub fn superdiagonal(n: usize) -> Self {
        let mut pairs = Vec::new();
        for offset in 1..n {
            for i in 1..=(n - offset) {
                pairs.push((i, i + offset));
            }
        }
        FactorOrder { pairs }
    }

    /// Check the order covers each pair `i < j` exactly once.
    pub fn validate(&self, n: usize) -> Result<(), WordError> {
        let mut seen = std::collections::HashSet::new();
        for &(i, j) in &self.pairs {
            if i >= j || j > n || i < 1 || !seen.insert((i, j)) {
                return Err(WordError::BadOrder);
            }
        }
        if seen.len() != n * (n - 1) / 2 {
            return Err(WordError::BadOrder);
        }
        Ok(())
    }
}

/// The matrix of a single letter.
pub fn letter_matrix(spec: &RingSpec, n: usize, letter: &Letter) -> Result<Mat, WordError> {
    match letter {
        Letter::Transvection { i, j, param } => {
            if *i == *j {
                return Err(WordError::EqualIndices);
            }
            if *i < 1 || *j < 1 || *i > n || *j > n {
                return Err(WordError::IndexOutOfRange { i: *i, j: *j, n });
            }
            Ok(matgroup::transvection(spec, n, *i, *j, param)?)
        }
        Letter::Dilation { i, param } => {
            if *i < 1 || *i > n {
                return Err(WordError::IndexOutOfRange { i: *i, j: *i, n });
            }
            if !spec.is_unit(param) {
                return Err(WordError::NonUnitDilation);
            }
            Ok(matgroup::dilation(spec, n, *i, param)?)
        }
    }
}

/// Left-to-right product of the generator matrices. Letters are applied
/// as sparse column operations.
pub fn eval_word(spec: &RingSpec, word: &GenWord) -> Result<Mat, WordError> {
    if let Some(fast) = eval_word_small_modular(spec, word) {
        return fast;
    }
    let n = word.n;
    let mut acc = matgroup::identity(spec, n);
    for letter in &word.letters {
        match letter {
            Letter::Transvection { i, j, param } => {
                if *i == *j {
                    return Err(WordError::EqualIndices);
                }
                if *i < 1 || *j < 1 || *i > n || *j > n {
                    return Err(WordError::IndexOutOfRange { i: *i, j: *j, n });
                }
                // acc * t_ij(p): column j += column i * p
                for r in 0..n {
                    let add = spec.mul(acc.at(r, i - 1), param);
                    let v = spec.add(acc.at(r, j - 1), &add);
                    acc.set(r, j - 1, v);
                }
            }
            Letter::Dilation { i, param } => {
                if *i < 1 || *i > n {
                    return Err(WordError::IndexOutOfRange { i: *i, j: *i, n });
                }
                if !spec.is_unit(param) {
                    return Err(WordError::NonUnitDilation);
                }
                for r in 0..n {
                    let v = spec.mul(acc.at(r, i - 1), param);
                    acc.set(r, i - 1, v);
                }
            }
        }
    }
    Ok(acc)
}

/// Fast path for degree-1 modular rings with a small modulus: column
/// operations on machine integers, reducing after every step.
fn eval_word_small_modular(
    spec: &RingSpec,
    word: &GenWord,
) -> Option<Result<Mat, WordError>> {
    let modulus = spec.modulus()?;
    if spec.degree() != 1 || modulus > 1 << 20 {
        return None;
    }
    let n = word.n;
    let mut acc = vec![0i64; n * n];
    for i in 0..n {
        acc[i * n + i] = 1;
    }
    for letter in &word.letters {
        match letter {
            Letter::Transvection { i, j, param } => {
                if *i == *j {
                    return Some(Err(WordError::EqualIndices));
                }
                if *i < 1 || *j < 1 || *i > n || *j > n {
                    return Some(Err(WordError::IndexOutOfRange { i: *i, j: *j, n }));
                }
                let p = i64::try_from(param.coeffs()[0].clone()).ok()?;
                for r in 0..n {
                    acc[r * n + (j - 1)] =
                        (acc[r * n + (j - 1)] + acc[r * n + (i - 1)] * p).rem_euclid(modulus);
                }
            }
            Letter::Dilation { i, param } => {
                if *i < 1 || *i > n {
                    return Some(Err(WordError::IndexOutOfRange { i: *i, j: *i, n }));
                }
                if !spec.is_unit(param) {
                    return Some(Err(WordError::NonUnitDilation));
                }
                let p = i64::try_from(param.coeffs()[0].clone()).ok()?;
                for r in 0..n {
                    acc[r * n + (i - 1)] = (acc[r * n + (i - 1)] * p).rem_euclid(modulus);
                }
            }
        }
    }
    let entries: Vec<_> = acc
        .into_iter()
        .map(|v| spec.elem(vec![v]).expect("reduced residue"))
        .collect();
    Some(Ok(Mat::from_rows_flat(n, entries)))
}

/// The matrix entries as polynomial images of the word parameters,
/// computed by evaluation. This is the executable form of the entry
/// polynomials attached to a fixed product schema.
pub fn reconstruct_entries(spec: &RingSpec, word: &GenWord) -> Result<Mat, WordError> {
    eval_word(spec, word)
}

// ---------------------------------------------------------------------
// Ordered unitriangular factorization
// ---------------------------------------------------------------------

/// Factor a unitriangular matrix as the ordered product
/// `prod t_{f(k)}(γ_k)` in the default superdiagonal order. Exactly
/// `n(n-1)/2` letters; the factorization in a fixed order is unique.
pub fn ut_factor(spec: &RingSpec, g: &Mat) -> Result<GenWord, WordError> {
    ut_factor_in(spec, g, &FactorOrder::superdiagonal(g.n()))
}

/// Factor in an explicit order by peeling: at each pair, read the
/// parameter off the residual and strip the letter. Orders that revisit
/// already-cleared entries are rejected.
pub fn ut_factor_in(spec: &RingSpec, g: &Mat, order: &FactorOrder) -> Result<GenWord, WordError> {
    let n = g.n();
    if !matgroup::in_family(spec, g, &matgroup::GroupFamily::Ut)? {
        return Err(WordError::NotUnitriangular);
    }
    order.validate(n)?;
    let mut residual = g.clone();
    let mut letters = Vec::with_capacity(order.pairs.len());
    for &(i, j) in &order.pairs {
        let param = residual.at(i - 1, j - 1).clone();
        // strip t_ij(param) from the left: row i -= param * row j
        for c in 0..n {
            let sub = spec.mul(&param, residual.at(j - 1, c));
            let v = spec.sub(residual.at(i - 1, c), &sub);
            residual.set(i - 1, c, v);
        }
        letters.push(Letter::Transvection { i, j, param });
    }
    if !matgroup::is_identity(spec, &residual) {
        return Err(WordError::InadmissibleOrder);
    }
    Ok(GenWord { n, letters })
}

// ---------------------------------------------------------------------
// Elementary decomposition
// ---------------------------------------------------------------------

/// Decompose `g` with `det(g) = 1` into a transvection word over the
/// integers or a modular ring.
pub fn decompose_sl(spec: &RingSpec, g: &Mat) -> Result<GenWord, WordError> {
    if !spec.is_one(&matgroup::det(spec, g)) {
        return Err(WordError::DetNotOne);
    }
    let n = g.n();
    match spec.kind() {
        RingKind::Integers => {
            let rows = to_int_rows(g);
            let ops = euclid_reduce(rows)?;
            Ok(ops_to_word(spec, n, ops, None))
        }
        RingKind::Modular(m) => {
            let lift = lift_to_det_one(spec, g, *m)?;
            let ops = euclid_reduce(lift)?;
            let word = ops_to_word(spec, n, ops, Some(*m));
            // certify: reduced parameters must still multiply out to g
            let check = eval_word(spec, &word)?;
            if &check != g {
                return Err(WordError::LiftFailure(
                    "round-trip check failed after reduction".into(),
                ));
            }
            Ok(word)
        }
        _ => Err(WordError::UnsupportedRing),
    }
}

/// Decompose an invertible matrix as a leading dilation `d_1(det g)`
/// followed by a transvection word.
pub fn decompose_gl(spec: &RingSpec, g: &Mat) -> Result<GenWord, WordError> {
    let d = matgroup::det(spec, g);
    if !spec.is_unit(&d) {
        return Err(WordError::DetNotUnit);
    }
    if spec.is_one(&d) {
        return decompose_sl(spec, g);
    }
    let n = g.n();
    let head = matgroup::dilation(spec, n, 1, &d)?;
    let rest = matgroup::mat_mul(spec, &matgroup::mat_inv(spec, &head)?, g);
    let mut word = decompose_sl(spec, &rest)?;
    let mut letters = vec![Letter::Dilation { i: 1, param: d }];
    letters.append(&mut word.letters);
    Ok(GenWord { n, letters })
}

fn to_int_rows(g: &Mat) -> Vec<Vec<BigInt>> {
    let n = g.n();
    (0..n)
        .map(|r| (0..n).map(|c| g.at(r, c).coeffs()[0].clone()).collect())
        .collect()
}

/// Balanced integer lift of a matrix over `Z/m`, with the determinant
/// repaired to exactly 1. Fast path: add multiples of `m` to a row
/// (solved as an integer gcd problem on the row cofactors), with
/// single-entry perturbations as a second attempt. The row congruence
/// has a genuine gcd obstruction for some inputs, so the guaranteed
/// fallback reduces the matrix directly over `Z/m` to a transvection
/// word and lifts that word: its integer product has determinant
/// exactly 1 and the right residues.
fn lift_to_det_one(spec: &RingSpec, g: &Mat, m: i64) -> Result<Vec<Vec<BigInt>>, WordError> {
    let n = g.n();
    let mb = BigInt::from(m);
    let half = BigInt::from(m / 2);
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let v = g.at(r, c).coeffs()[0].clone();
                    if v > half {
                        v - &mb
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();

    if try_repair_rows(&mut rows, &mb) {
        return Ok(rows);
    }
    // systematic single-entry perturbations, then retry the row repair
    for r in 0..n {
        for c in 0..n {
            for delta in [mb.clone(), -mb.clone()] {
                let mut alt = rows.clone();
                alt[r][c] += &delta;
                if try_repair_rows(&mut alt, &mb) {
                    return Ok(alt);
                }
            }
        }
    }
    // guaranteed path: decompose over Z/m, lift the word
    let word = modular_word(spec, g)?;
    let z = RingSpec::integers();
    let lifted = GenWord {
        n,
        letters: word
            .letters
            .iter()
            .map(|l| match l {
                Letter::Transvection { i, j, param } => {
                    let v = param.coeffs()[0].clone();
                    let v = if v > half { v - &mb } else { v };
                    Ok(Letter::Transvection {
                        i: *i,
                        j: *j,
                        param: z.elem_big(vec![v])?,
                    })
                }
                Letter::Dilation { .. } => Err(WordError::LiftFailure(
                    "modular reduction produced a dilation letter".into(),
                )),
            })
            .collect::<Result<_, WordError>>()?,
    };
    let lift = eval_word(&z, &lifted)?;
    let rows = to_int_rows(&lift);
    debug_assert!(int_det(&rows).is_one());
    Ok(rows)
}

/// Transvection word for `g` computed directly over `Z/m`: unit-pivot
/// column reduction (a pivot can always be made a unit because the
/// trailing minor has unit determinant), then the residual diagonal
/// `diag(u_1..u_n)` with product 1 is emitted as a telescope of the
/// 6-letter words for `diag(v, v^{-1})` in adjacent positions.
fn modular_word(spec: &RingSpec, g: &Mat) -> Result<GenWord, WordError> {
    let n = g.n();
    let mut rows: Vec<Vec<RingElem>> = (0..n)
        .map(|r| (0..n).map(|c| g.at(r, c).clone()).collect())
        .collect();
    let mut ops: Vec<(usize, usize, RingElem)> = Vec::new();

    // row_r += q * row_c
    let apply = |rows: &mut Vec<Vec<RingElem>>,
                 ops: &mut Vec<(usize, usize, RingElem)>,
                 r: usize,
                 c: usize,
                 q: &RingElem| {
        if spec.is_zero(q) {
            return;
        }
        let src = rows[c].clone();
        for (dst, s) in rows[r].iter_mut().zip(&src) {
            *dst = spec.add(dst, &spec.mul(q, s));
        }
        ops.push((r, c, q.clone()));
    };

    let elems: Vec<RingElem> = spec.enumerate_elements()?.collect();
    for c in 0..n {
        if !spec.is_unit(&rows[c][c]) {
            // make the pivot a unit with row additions from below; a
            // suitable coefficient tuple exists since the column
            // generates the unit ideal
            let below: Vec<usize> = ((c + 1)..n).collect();
            let found = search_pivot_coeffs(spec, &rows, c, &below, &elems, &mut Vec::new());
            match found {
                Some(coeffs) => {
                    for (r, q) in below.iter().zip(&coeffs) {
                        apply(&mut rows, &mut ops, c, *r, q);
                    }
                }
                None => {
                    return Err(WordError::LiftFailure(format!(
                        "no unit pivot in column {} of the modular reduction",
                        c + 1
                    )))
                }
            }
        }
        let pivot_inv = spec.inverse(&rows[c][c])?;
        for r in 0..n {
            if r == c || spec.is_zero(&rows[r][c]) {
                continue;
            }
            let q = spec.neg(&spec.mul(&rows[r][c], &pivot_inv));
            apply(&mut rows, &mut ops, r, c, &q);
        }
    }
    let diag: Vec<RingElem> = (0..n).map(|i| rows[i][i].clone()).collect();

    // A = op_1^{-1} ... op_k^{-1} diag
    let mut letters: Vec<Letter> = ops
        .into_iter()
        .map(|(r, c, q)| Letter::Transvection {
            i: r + 1,
            j: c + 1,
            param: spec.neg(&q),
        })
        .collect();
    letters.extend(diag_unit_word(spec, n, &diag)?);
    let word = GenWord { n, letters };
    debug_assert_eq!(&eval_word(spec, &word).unwrap(), g);
    Ok(word)
}

fn search_pivot_coeffs(
    spec: &RingSpec,
    rows: &[Vec<RingElem>],
    c: usize,
    below: &[usize],
    elems: &[RingElem],
    acc: &mut Vec<RingElem>,
) -> Option<Vec<RingElem>> {
    if acc.len() == below.len() {
        let mut pivot = rows[c][c].clone();
        for (r, q) in below.iter().zip(acc.iter()) {
            pivot = spec.add(&pivot, &spec.mul(q, &rows[*r][c]));
        }
        return spec.is_unit(&pivot).then(|| acc.clone());
    }
    for e in elems {
        acc.push(e.clone());
        if let Some(hit) = search_pivot_coeffs(spec, rows, c, below, elems, acc) {
            return Some(hit);
        }
        acc.pop();
    }
    None
}

/// `diag(u_1, ..., u_n)` with unit entries and product 1, as transvection
/// letters: the telescope `prod_i diag[.., v_i, v_i^{-1}, ..]` with
/// `v_i = u_1 ... u_i`, each factor expanded by the 6-letter word
/// `t_ij(v) t_ji(-v^{-1}) t_ij(v) t_ij(-1) t_ji(1) t_ij(-1)`.
fn diag_unit_word(
    spec: &RingSpec,
    n: usize,
    diag: &[RingElem],
) -> Result<Vec<Letter>, WordError> {
    let mut letters = Vec::new();
    let mut v = spec.one();
    for (idx, u) in diag.iter().take(n - 1).enumerate() {
        v = spec.mul(&v, u);
        if spec.is_one(&v) {
            continue;
        }
        let (i, j) = (idx + 1, idx + 2);
        let vinv = spec.inverse(&v)?;
        for (swap, param) in [
            (false, v.clone()),
            (true, spec.neg(&vinv)),
            (false, v.clone()),
            (false, spec.int(-1)),
            (true, spec.int(1)),
            (false, spec.int(-1)),
        ] {
            let (a, b) = if swap { (j, i) } else { (i, j) };
            letters.push(Letter::Transvection { i: a, j: b, param });
        }
    }
    Ok(letters)
}

fn try_repair_rows(rows: &mut [Vec<BigInt>], m: &BigInt) -> bool {
    let n = rows.len();
    let d = int_det(rows);
    if d.is_one() {
        return true;
    }
    let diff = BigInt::one() - &d;
    let (target, rem) = diff.div_rem(m);
    if !rem.is_zero() {
        return false; // determinant not 1 mod m: not repairable
    }
    for r in (0..n).rev() {
        let cofs: Vec<BigInt> = (0..n).map(|c| cofactor(rows, r, c)).collect();
        let (gcd, coeffs) = ext_gcd_vec(&cofs);
        if gcd.is_zero() {
            continue;
        }
        let (scale, rem) = target.div_rem(&gcd);
        if !rem.is_zero() {
            continue;
        }
        for c in 0..n {
            rows[r][c] += m * &coeffs[c] * &scale;
        }
        debug_assert!(int_det(rows).is_one());
        return true;
    }
    false
}

fn cofactor(rows: &[Vec<BigInt>], r: usize, c: usize) -> BigInt {
    let minor: Vec<Vec<BigInt>> = rows
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != r)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|(j, _)| *j != c)
                .map(|(_, v)| v.clone())
                .collect()
        })
        .collect();
    let d = int_det(&minor);
    if (r + c).is_multiple_of(2) {
        d
    } else {
        -d
    }
}

/// Row operations `(r, c, q)` meaning `row_r += q * row_c`, i.e. a left
/// multiplication by `t_{r+1,c+1}(q)`.
type RowOp = (usize, usize, BigInt);

/// Reduce an integer matrix of determinant 1 to the identity by row
/// operations, returning the applied operations in order.
fn euclid_reduce(mut rows: Vec<Vec<BigInt>>) -> Result<Vec<RowOp>, WordError> {
    let n = rows.len();
    debug_assert!(int_det(&rows).is_one());
    let mut ops: Vec<RowOp> = Vec::new();

    // row_r += q * row_c
    fn apply(rows: &mut [Vec<BigInt>], ops: &mut Vec<RowOp>, r: usize, c: usize, q: BigInt) {
        if q.is_zero() {
            return;
        }
        let src = rows[c].clone();
        for (dst, s) in rows[r].iter_mut().zip(&src) {
            *dst += &q * s;
        }
        ops.push((r, c, q));
    }

    // (row_c, row_r) -> (row_r, -row_c)
    fn swap_with_sign(rows: &mut [Vec<BigInt>], ops: &mut Vec<RowOp>, c: usize, r: usize) {
        apply(rows, ops, c, r, BigInt::one());
        apply(rows, ops, r, c, -BigInt::one());
        apply(rows, ops, c, r, BigInt::one());
    }

    for c in 0..n {
        // Euclid down column c
        for r in (c + 1)..n {
            loop {
                if rows[r][c].is_zero() {
                    break;
                }
                if rows[c][c].is_zero() {
                    swap_with_sign(&mut rows, &mut ops, c, r);
                    continue;
                }
                let q = &rows[r][c] / &rows[c][c]; // truncated
                apply(&mut rows, &mut ops, r, c, -q);
                if rows[r][c].is_zero() {
                    break;
                }
                swap_with_sign(&mut rows, &mut ops, c, r);
            }
        }
        // pivot is ±gcd of the column, and the gcd divides det = 1
        if rows[c][c].is_negative() {
            if c + 1 < n {
                let r = c + 1;
                apply(&mut rows, &mut ops, r, c, BigInt::one());
                apply(&mut rows, &mut ops, c, r, BigInt::from(-2));
                apply(&mut rows, &mut ops, r, c, BigInt::one());
            } else {
                // determinant of the trailing 1x1 block would be -1
                return Err(WordError::DetNotOne);
            }
        }
        if !rows[c][c].is_one() {
            return Err(WordError::DetNotOne);
        }
        // clear the column above the pivot
        for r in 0..c {
            let q = -rows[r][c].clone();
            apply(&mut rows, &mut ops, r, c, q);
        }
    }
    debug_assert!(rows
        .iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, v)| {
            if i == j {
                v.is_one()
            } else {
                v.is_zero()
            }
        })));
    Ok(ops)
}

/// Convert recorded reduction ops `L_k ... L_1 A = I` into the word
/// `A = L_1^{-1} ... L_k^{-1}`, reducing parameters for modular specs and
/// dropping letters that became trivial.
fn ops_to_word(spec: &RingSpec, n: usize, ops: Vec<RowOp>, modulus: Option<i64>) -> GenWord {
    let mut letters = Vec::with_capacity(ops.len());
    for (r, c, q) in ops {
        let neg = -q;
        let param = match modulus {
            Some(_) => spec.reduce(vec![neg]),
            None => spec
                .elem_big(vec![neg])
                .expect("degree-1 coefficient vector"),
        };
        if spec.is_zero(&param) {
            continue;
        }
        letters.push(Letter::Transvection {
            i: r + 1,
            j: c + 1,
            param,
        });
    }
    GenWord { n, letters }
}

// ---------------------------------------------------------------------
// Stats, random instances, serialization
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct WordStats {
    pub length: usize,
    pub per_pair: BTreeMap<String, usize>,
}

pub fn word_stats(word: &GenWord) -> WordStats {
    let mut per_pair = BTreeMap::new();
    for l in &word.letters {
        let key = match l {
            Letter::Transvection { i, j, .. } => format!("t({i},{j})"),
            Letter::Dilation { i, .. } => format!("d({i})"),
        };
        *per_pair.entry(key).or_insert(0) += 1;
    }
    WordStats {
        length: word.letters.len(),
        per_pair,
    }
}

/// A random `n x n` integer matrix of determinant 1 with entries in
/// `[-bound, bound]`, by rejection sampling.
pub fn random_sl(spec: &RingSpec, rng: &mut impl Rng, n: usize, bound: i64) -> Mat {
    assert!(matches!(spec.kind(), RingKind::Integers));
    loop {
        let rows: Vec<Vec<BigInt>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| BigInt::from(rng.gen_range(-bound..=bound)))
                    .collect()
            })
            .collect();
        if int_det(&rows).is_one() {
            let entries = rows
                .into_iter()
                .flatten()
                .map(|v| spec.elem_big(vec![v]).unwrap())
                .collect();
            return Mat::from_rows_flat(n, entries);
        }
    }
}

/// JSON array of `{"g": "t"|"d", "i": int, "j": int?, "p": coeff-vector}`.
pub fn word_to_json(word: &GenWord) -> serde_json::Value {
    let letters: Vec<serde_json::Value> = word
        .letters
        .iter()
        .map(|l| match l {
            Letter::Transvection { i, j, param } => serde_json::json!({
                "g": "t", "i": i, "j": j, "p": coeffs_json(param),
            }),
            Letter::Dilation { i, param } => serde_json::json!({
                "g": "d", "i": i, "p": coeffs_json(param),
            }),
        })
        .collect();
    serde_json::Value::Array(letters)
}

fn coeffs_json(e: &RingElem) -> serde_json::Value {
    serde_json::Value::Array(
        e.coeffs()
            .iter()
            .map(|c| match i64::try_from(c.clone()) {
                Ok(v) => serde_json::json!(v),
                Err(_) => serde_json::json!(c.to_string()),
            })
            .collect(),
    )
}

pub fn word_from_json(
    spec: &RingSpec,
    n: usize,
    value: &serde_json::Value,
) -> Result<GenWord, WordError> {
    let arr = value
        .as_array()
        .ok_or_else(|| WordError::Serde("expected array".into()))?;
    let mut letters = Vec::with_capacity(arr.len());
    for item in arr {
        let kind = item["g"]
            .as_str()
            .ok_or_else(|| WordError::Serde("missing `g`".into()))?;
        let i = item["i"]
            .as_u64()
            .ok_or_else(|| WordError::Serde("missing `i`".into()))? as usize;
        let coeffs = item["p"]
            .as_array()
            .ok_or_else(|| WordError::Serde("missing `p`".into()))?;
        let mut vec = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            let v: BigInt = if let Some(x) = c.as_i64() {
                BigInt::from(x)
            } else if let Some(s) = c.as_str() {
                s.parse()
                    .map_err(|_| WordError::Serde(format!("bad coefficient `{s}`")))?
            } else {
                return Err(WordError::Serde("bad coefficient".into()));
            };
            vec.push(v);
        }
        let param = spec.elem_big(vec)?;
        match kind {
            "t" => {
                let j = item["j"]
                    .as_u64()
                    .ok_or_else(|| WordError::Serde("missing `j`".into()))?
                    as usize;
                letters.push(Letter::Transvection { i, j, param });
            }
            "d" => letters.push(Letter::Dilation { i, param }),
            other => return Err(WordError::Serde(format!("unknown letter kind `{other}`"))),
        }
    }
    Ok(GenWord { n, letters })
}

impl Mat {
    /// Internal constructor from a flat row-major entry list.
    pub(crate) fn from_rows_flat(n: usize, entries: Vec<RingElem>) -> Mat {
        debug_assert_eq!(entries.len(), n * n);
        let rows: Vec<Vec<RingElem>> = entries
            .chunks(n)
            .map(|chunk| chunk.to_vec())
            .collect();
        Mat::from_rows(rows).expect("square by construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(i: usize, j: usize, p: i64, spec: &RingSpec) -> Letter {
        Letter::Transvection {
            i,
            j,
            param: spec.int(p),
        }
    }

    #[test]
    fn eval_basics() {
        let spec = RingSpec::integers();
        assert!(matgroup::is_identity(
            &spec,
            &eval_word(&spec, &GenWord::empty(3)).unwrap()
        ));
        let w = GenWord {
            n: 3,
            letters: vec![t(1, 2, 2, &spec), t(1, 2, 3, &spec)],
        };
        assert_eq!(
            eval_word(&spec, &w).unwrap(),
            matgroup::transvection(&spec, 3, 1, 2, &spec.int(5)).unwrap()
        );
        // explicit commutator letters multiply out to t_13(ab)
        let (a, b) = (3i64, 5i64);
        let w = GenWord {
            n: 3,
            letters: vec![t(1, 2, -a, &spec), t(2, 3, -b, &spec), t(1, 2, a, &spec), t(2, 3, b, &spec)],
        };
        assert_eq!(
            eval_word(&spec, &w).unwrap(),
            matgroup::transvection(&spec, 3, 1, 3, &spec.int(a * b)).unwrap()
        );
    }

    #[test]
    fn eval_rejects_bad_letters() {
        let spec = RingSpec::integers();
        let w = GenWord {
            n: 3,
            letters: vec![Letter::Dilation {
                i: 1,
                param: spec.int(2),
            }],
        };
        assert!(matches!(eval_word(&spec, &w), Err(WordError::NonUnitDilation)));
        let w = GenWord {
            n: 3,
            letters: vec![t(1, 4, 1, &spec)],
        };
        assert!(matches!(
            eval_word(&spec, &w),
            Err(WordError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn ut_factorization() {
        let spec = RingSpec::integers();
        // identity: all parameters zero
        let id = matgroup::identity(&spec, 3);
        let w = ut_factor(&spec, &id).unwrap();
        assert_eq!(w.letters.len(), 3);
        assert!(w
            .letters
            .iter()
            .all(|l| matches!(l, Letter::Transvection { param, .. } if spec.is_zero(param))));

        // recover parameters so that eval = g
        let mut g = matgroup::identity(&spec, 3);
        g.set(0, 1, spec.int(2));
        g.set(1, 2, spec.int(4));
        g.set(0, 2, spec.int(3));
        let w = ut_factor(&spec, &g).unwrap();
        assert_eq!(eval_word(&spec, &w).unwrap(), g);

        // non-unitriangular input is rejected
        let d = matgroup::scalar_diag(&spec, 3, &spec.int(-1));
        assert!(matches!(ut_factor(&spec, &d), Err(WordError::NotUnitriangular)));
    }

    #[test]
    fn ut_factorization_is_bijective_over_z3() {
        let spec = RingSpec::modular(3).unwrap();
        let mut seen = std::collections::HashSet::new();
        let mut count = 0usize;
        for g in matgroup::enumerate_group(&spec, 3, &matgroup::GroupFamily::Ut).unwrap() {
            let w = ut_factor(&spec, &g).unwrap();
            assert_eq!(w.letters.len(), 3);
            assert_eq!(eval_word(&spec, &w).unwrap(), g);
            let params: Vec<RingElem> = w
                .letters
                .iter()
                .map(|l| match l {
                    Letter::Transvection { param, .. } => param.clone(),
                    _ => unreachable!(),
                })
                .collect();
            assert!(seen.insert(params), "distinct matrices gave equal parameter tuples");
            count += 1;
        }
        assert_eq!(count, 27);
        assert_eq!(seen.len(), 27);
    }

    #[test]
    fn decompose_generators_and_identity() {
        let spec = RingSpec::integers();
        let g = matgroup::transvection(&spec, 3, 1, 3, &spec.int(5)).unwrap();
        let w = decompose_sl(&spec, &g).unwrap();
        assert_eq!(w.letters.len(), 1);
        assert_eq!(eval_word(&spec, &w).unwrap(), g);

        let id = matgroup::identity(&spec, 3);
        let w = decompose_sl(&spec, &id).unwrap();
        assert!(w.letters.is_empty());
    }

    #[test]
    fn decompose_rejects_bad_input() {
        let spec = RingSpec::integers();
        let d = matgroup::scalar_diag(&spec, 3, &spec.int(2));
        assert!(matches!(decompose_sl(&spec, &d), Err(WordError::DetNotOne)));
        assert!(matches!(decompose_gl(&spec, &d), Err(WordError::DetNotUnit)));
        let zi = RingSpec::gaussian();
        let id = matgroup::identity(&zi, 3);
        assert!(matches!(decompose_sl(&zi, &id), Err(WordError::UnsupportedRing)));
    }

    #[test]
    fn decompose_roundtrip_exhaustive_sl3_z2() {
        let spec = RingSpec::modular(2).unwrap();
        let mut count = 0usize;
        for g in matgroup::enumerate_group(&spec, 3, &matgroup::GroupFamily::Sl).unwrap() {
            let w = decompose_sl(&spec, &g).unwrap();
            assert!(w.transvections_only());
            assert_eq!(eval_word(&spec, &w).unwrap(), g);
            count += 1;
        }
        assert_eq!(count, 168);
    }

    #[test]
    fn decompose_roundtrip_random_integer_matrices() {
        let spec = RingSpec::integers();
        let mut rng = ChaCha8Rng::seed_from_u64(crate::DEFAULT_SEED);
        for _ in 0..50 {
            let g = random_sl(&spec, &mut rng, 3, 9);
            let w = decompose_sl(&spec, &g).unwrap();
            assert!(w.transvections_only());
            assert_eq!(eval_word(&spec, &w).unwrap(), g);
        }
    }

    #[test]
    fn decompose_gl_shapes() {
        let spec = RingSpec::integers();
        let u = spec.int(-1);
        let g = matgroup::dilation(&spec, 3, 1, &u).unwrap();
        let w = decompose_gl(&spec, &g).unwrap();
        assert!(matches!(
            w.letters.first(),
            Some(Letter::Dilation { i: 1, .. })
        ));
        assert_eq!(eval_word(&spec, &w).unwrap(), g);

        let spec3 = RingSpec::modular(3).unwrap();
        for g in matgroup::enumerate_group(&spec3, 3, &matgroup::GroupFamily::Gl)
            .unwrap()
            .take(500)
        {
            let w = decompose_gl(&spec3, &g).unwrap();
            assert_eq!(eval_word(&spec3, &w).unwrap(), g);
        }
    }

    #[test]
    fn stats_and_serialization() {
        let spec = RingSpec::integers();
        assert_eq!(word_stats(&GenWord::empty(3)).length, 0);
        let w = GenWord {
            n: 3,
            letters: vec![t(1, 2, 7, &spec)],
        };
        let st = word_stats(&w);
        assert_eq!(st.length, 1);
        assert_eq!(st.per_pair.get("t(1,2)"), Some(&1));

        let g = matgroup::dilation(&spec, 3, 1, &spec.int(-1)).unwrap();
        let w = decompose_gl(&spec, &g).unwrap();
        let json = word_to_json(&w);
        let back = word_from_json(&spec, 3, &json).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn eval_agrees_with_letter_matrix_products() {
        // the column-operation evaluator (and its machine-integer fast
        // path) against the plain matrix product of the letters
        for name in ["Zmod:7", "Zi/3", "Z"] {
            let spec = RingSpec::preset(name).unwrap();
            let params: Vec<i64> = vec![3, -2, 1, 4, 0, 5];
            let mut letters = Vec::new();
            for (idx, p) in params.iter().enumerate() {
                let (i, j) = [(1, 2), (2, 3), (1, 3), (3, 1), (2, 1), (3, 2)][idx];
                letters.push(Letter::Transvection {
                    i,
                    j,
                    param: spec.int(*p),
                });
            }
            letters.push(Letter::Dilation {
                i: 2,
                param: spec.int(-1),
            });
            let w = GenWord { n: 3, letters };
            let direct = w.letters.iter().fold(
                matgroup::identity(&spec, 3),
                |acc, l| {
                    matgroup::mat_mul(&spec, &acc, &letter_matrix(&spec, 3, l).unwrap())
                },
            );
            assert_eq!(eval_word(&spec, &w).unwrap(), direct, "ring {name}");
        }
    }

    #[test]
    fn modular_lift_gcd_obstruction_falls_back_to_word_lift() {
        // the row-cofactor congruence has no solution for this matrix
        // (any row, any single-entry perturbation); the word-based lift
        // must take over
        let spec = RingSpec::modular(5).unwrap();
        let g = matgroup::parse_mat(&spec, "0,2,3;0,2,2;2,0,0").unwrap();
        assert!(spec.is_one(&matgroup::det(&spec, &g)));
        let w = decompose_sl(&spec, &g).unwrap();
        assert!(w.transvections_only());
        assert_eq!(eval_word(&spec, &w).unwrap(), g);
    }

    #[test]
    fn modular_lift_word_lengths_reported() {
        let spec = RingSpec::modular(3).unwrap();
        let mut wmax = 0usize;
        for g in matgroup::enumerate_group(&spec, 3, &matgroup::GroupFamily::Sl)
            .unwrap()
            .take(300)
        {
            let w = decompose_sl(&spec, &g).unwrap();
            wmax = wmax.max(w.letters.len());
        }
        assert!(wmax > 0);
    }
}
