//! Matrices over a [`RingSpec`], the transvection/dilation generators,
//! the classical subgroup families, and exhaustive centralizer/center
//! computations over finite rings.
//!
//! Group elements are plain matrices; subgroups at desk scale are
//! explicit element sets.

use crate::rings::{RingElem, RingError, RingSpec};
use std::collections::HashSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatError {
    #[error("matrix index ({i},{j}) out of range for dimension {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
    #[error("transvection requires i != j")]
    EqualIndices,
    #[error("dilation parameter is not a unit: {0}")]
    NonUnitDilation(String),
    #[error("matrix is not invertible (determinant is not a unit)")]
    NotInvertible,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension must be at least 2")]
    BadDimension,
    #[error("enumeration requires a finite ring")]
    InfiniteRing,
    #[error("family generators over this infinite ring need declared unit generators")]
    NeedUnitGenerators,
    #[error("enumeration cap of {0} candidates exceeded")]
    EnumerationCap(usize),
    #[error("cannot parse matrix literal: {0}")]
    Parse(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// An `n x n` matrix over a shared ring spec, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    n: usize,
    entries: Vec<RingElem>,
}

impl Mat {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry at row `r`, column `c` (0-based).
    pub fn at(&self, r: usize, c: usize) -> &RingElem {
        &self.entries[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: RingElem) {
        self.entries[r * self.n + c] = v;
    }

    pub fn from_rows(rows: Vec<Vec<RingElem>>) -> Result<Self, MatError> {
        let n = rows.len();
        if n < 2 {
            return Err(MatError::BadDimension);
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(MatError::DimensionMismatch(n, rows[0].len()));
        }
        Ok(Mat {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }
}

pub fn identity(spec: &RingSpec, n: usize) -> Mat {
    let mut entries = vec![spec.zero(); n * n];
    for i in 0..n {
        entries[i * n + i] = spec.one();
    }
    Mat { n, entries }
}

/// `t_ij(param) = 1 + param * e_ij`; indices are 1-based, `i != j`.
pub fn transvection(
    spec: &RingSpec,
    n: usize,
    i: usize,
    j: usize,
    param: &RingElem,
) -> Result<Mat, MatError> {
    if i == j {
        return Err(MatError::EqualIndices);
    }
    if i < 1 || j < 1 || i > n || j > n {
        return Err(MatError::IndexOutOfRange { i, j, n });
    }
    let mut m = identity(spec, n);
    m.set(i - 1, j - 1, param.clone());
    Ok(m)
}

/// `d_i(param)`: identity with the unit `param` at position `i` (1-based).
pub fn dilation(spec: &RingSpec, n: usize, i: usize, param: &RingElem) -> Result<Mat, MatError> {
    if i < 1 || i > n {
        return Err(MatError::IndexOutOfRange { i, j: i, n });
    }
    if !spec.is_unit(param) {
        return Err(MatError::NonUnitDilation(spec.render(param)));
    }
    let mut m = identity(spec, n);
    m.set(i - 1, i - 1, param.clone());
    Ok(m)
}

/// The sign dilation `d_i = d_i(-1)`.
pub fn dilation_neg(spec: &RingSpec, n: usize, i: usize) -> Mat {
    dilation(spec, n, i, &spec.int(-1)).expect("-1 is always a unit")
}

/// `diag[param, ..., param]`, the scalar matrix.
pub fn scalar_diag(spec: &RingSpec, n: usize, param: &RingElem) -> Mat {
    let mut m = identity(spec, n);
    for i in 0..n {
        m.set(i, i, param.clone());
    }
    m
}

/// `diag[params[0], ..., params[n-1]]`.
pub fn diag(spec: &RingSpec, params: &[RingElem]) -> Mat {
    let n = params.len();
    let mut m = identity(spec, n);
    for (i, p) in params.iter().enumerate() {
        m.set(i, i, p.clone());
    }
    m
}

pub fn mat_mul(spec: &RingSpec, a: &Mat, b: &Mat) -> Mat {
    debug_assert_eq!(a.n, b.n);
    let n = a.n;
    let mut entries = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let mut acc = spec.zero();
            for k in 0..n {
                let x = a.at(r, k);
                if spec.is_zero(x) {
                    continue;
                }
                acc = spec.add(&acc, &spec.mul(x, b.at(k, c)));
            }
            entries.push(acc);
        }
    }
    Mat { n, entries }
}

/// Exact determinant: cofactor expansion for `n <= 4`, memoized Laplace
/// expansion over column subsets above (valid over any commutative ring,
/// unlike fraction-free elimination which needs exact division).
pub fn det(spec: &RingSpec, m: &Mat) -> RingElem {
    if let Some(d) = det_small_modular(spec, m) {
        return d;
    }
    if m.n <= 4 {
        det_cofactor(spec, &as_rows(m))
    } else {
        det_subsets(spec, m)
    }
}

/// Fast path for degree-1 modular rings with a small modulus: cofactor
/// expansion on machine integers, reducing after every multiplication so
/// intermediates stay below `modulus^2`.
fn det_small_modular(spec: &RingSpec, m: &Mat) -> Option<RingElem> {
    let modulus = spec.modulus()?;
    if spec.degree() != 1 || modulus > 1 << 20 || m.n > 6 {
        return None;
    }
    let n = m.n;
    let entries: Vec<i64> = m
        .entries
        .iter()
        .map(|e| i64::try_from(e.coeffs()[0].clone()).ok())
        .collect::<Option<_>>()?;
    fn go(rows: &[Vec<i64>], modulus: i64) -> i64 {
        let n = rows.len();
        match n {
            1 => rows[0][0],
            2 => (rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]).rem_euclid(modulus),
            _ => {
                let mut acc = 0i64;
                for (j, &head) in rows[0].iter().enumerate() {
                    if head == 0 {
                        continue;
                    }
                    let minor: Vec<Vec<i64>> = rows[1..]
                        .iter()
                        .map(|row| {
                            row.iter()
                                .enumerate()
                                .filter(|(c, _)| *c != j)
                                .map(|(_, v)| *v)
                                .collect()
                        })
                        .collect();
                    let term = head * go(&minor, modulus);
                    acc = if j % 2 == 0 { acc + term } else { acc - term };
                    acc = acc.rem_euclid(modulus);
                }
                acc
            }
        }
    }
    let rows: Vec<Vec<i64>> = entries.chunks(n).map(|r| r.to_vec()).collect();
    Some(spec.int(go(&rows, modulus)))
}

fn as_rows(m: &Mat) -> Vec<Vec<RingElem>> {
    (0..m.n)
        .map(|r| (0..m.n).map(|c| m.at(r, c).clone()).collect())
        .collect()
}

fn det_cofactor(spec: &RingSpec, rows: &[Vec<RingElem>]) -> RingElem {
    let n = rows.len();
    match n {
        0 => spec.one(),
        1 => rows[0][0].clone(),
        2 => spec.sub(
            &spec.mul(&rows[0][0], &rows[1][1]),
            &spec.mul(&rows[0][1], &rows[1][0]),
        ),
        _ => {
            let mut acc = spec.zero();
            for (j, head) in rows[0].iter().enumerate() {
                if spec.is_zero(head) {
                    continue;
                }
                let minor: Vec<Vec<RingElem>> = rows[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = spec.mul(head, &det_cofactor(spec, &minor));
                acc = if j % 2 == 0 {
                    spec.add(&acc, &term)
                } else {
                    spec.sub(&acc, &term)
                };
            }
            acc
        }
    }
}

fn det_subsets(spec: &RingSpec, m: &Mat) -> RingElem {
    let n = m.n;
    // dp over column subsets: after processing |mask| rows, dp[mask] is
    // the determinant of the top-left block on those columns
    let mut dp = vec![None::<RingElem>; 1usize << n];
    dp[0] = Some(spec.one());
    for mask in 1usize..(1 << n) {
        let row = (mask as u32).count_ones() as usize - 1;
        let mut acc = spec.zero();
        let mut parity = 0usize;
        for c in 0..n {
            if mask & (1 << c) == 0 {
                continue;
            }
            let sub = dp[mask ^ (1 << c)].as_ref().unwrap();
            let term = spec.mul(m.at(row, c), sub);
            acc = if parity.is_multiple_of(2) {
                spec.add(&acc, &term)
            } else {
                spec.sub(&acc, &term)
            };
            parity += 1;
        }
        dp[mask] = Some(acc);
    }
    dp[(1 << n) - 1].take().unwrap()
}

/// Inverse by adjugate over the ring: `m^{-1} = det^{-1} * adj(m)`.
/// Errors when the determinant is not a unit.
pub fn mat_inv(spec: &RingSpec, m: &Mat) -> Result<Mat, MatError> {
    let d = det(spec, m);
    if !spec.is_unit(&d) {
        return Err(MatError::NotInvertible);
    }
    let dinv = spec.inverse(&d)?;
    let n = m.n;
    let mut out = identity(spec, n);
    for i in 0..n {
        for j in 0..n {
            // cofactor C_ij goes to entry (j, i)
            let minor: Vec<Vec<RingElem>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != j)
                        .map(|c| m.at(r, c).clone())
                        .collect()
                })
                .collect();
            let mut cof = det_cofactor(spec, &minor);
            if (i + j) % 2 == 1 {
                cof = spec.neg(&cof);
            }
            out.set(j, i, spec.mul(&cof, &dinv));
        }
    }
    debug_assert!(is_identity(spec, &mat_mul(spec, m, &out)));
    Ok(out)
}

pub fn is_identity(spec: &RingSpec, m: &Mat) -> bool {
    *m == identity(spec, m.n)
}

/// `[x, y] = x^{-1} y^{-1} x y`.
pub fn commutator(spec: &RingSpec, x: &Mat, y: &Mat) -> Result<Mat, MatError> {
    let xi = mat_inv(spec, x)?;
    let yi = mat_inv(spec, y)?;
    Ok(mat_mul(
        spec,
        &mat_mul(spec, &xi, &yi),
        &mat_mul(spec, x, y),
    ))
}

/// `x^y = y^{-1} x y`.
pub fn conjugate(spec: &RingSpec, x: &Mat, y: &Mat) -> Result<Mat, MatError> {
    let yi = mat_inv(spec, y)?;
    Ok(mat_mul(spec, &mat_mul(spec, &yi, x), y))
}

// ---------------------------------------------------------------------
// Subgroup families
// ---------------------------------------------------------------------

/// The named subgroup families of `GL_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupFamily {
    /// All invertible matrices.
    Gl,
    /// Determinant one.
    Sl,
    /// Upper unitriangular.
    Ut,
    /// Invertible upper triangular.
    T,
    /// Invertible diagonal.
    D,
    /// The center of another family.
    ZOf(Box<GroupFamily>),
}

impl GroupFamily {
    pub fn parse(s: &str) -> Option<GroupFamily> {
        match s {
            "GL" | "gl" => Some(GroupFamily::Gl),
            "SL" | "sl" => Some(GroupFamily::Sl),
            "UT" | "ut" => Some(GroupFamily::Ut),
            "T" | "t" => Some(GroupFamily::T),
            "D" | "d" => Some(GroupFamily::D),
            other => {
                let inner = other
                    .strip_prefix("Z-of(")
                    .or_else(|| other.strip_prefix("Zof("))?
                    .strip_suffix(')')?;
                Some(GroupFamily::ZOf(Box::new(GroupFamily::parse(inner)?)))
            }
        }
    }
}

impl std::fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupFamily::Gl => write!(f, "GL"),
            GroupFamily::Sl => write!(f, "SL"),
            GroupFamily::Ut => write!(f, "UT"),
            GroupFamily::T => write!(f, "T"),
            GroupFamily::D => write!(f, "D"),
            GroupFamily::ZOf(inner) => write!(f, "Z-of({inner})"),
        }
    }
}

/// Membership predicate for each family tag.
pub fn in_family(spec: &RingSpec, g: &Mat, fam: &GroupFamily) -> Result<bool, MatError> {
    let n = g.n;
    match fam {
        GroupFamily::Gl => Ok(spec.is_unit(&det(spec, g))),
        GroupFamily::Sl => Ok(spec.is_one(&det(spec, g))),
        GroupFamily::Ut => {
            for r in 0..n {
                if !spec.is_one(g.at(r, r)) {
                    return Ok(false);
                }
                for c in 0..r {
                    if !spec.is_zero(g.at(r, c)) {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        GroupFamily::T => {
            for r in 0..n {
                if !spec.is_unit(g.at(r, r)) {
                    return Ok(false);
                }
                for c in 0..r {
                    if !spec.is_zero(g.at(r, c)) {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        GroupFamily::D => {
            for r in 0..n {
                for c in 0..n {
                    if r == c {
                        if !spec.is_unit(g.at(r, c)) {
                            return Ok(false);
                        }
                    } else if !spec.is_zero(g.at(r, c)) {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        GroupFamily::ZOf(inner) => {
            if !in_family(spec, g, inner)? {
                return Ok(false);
            }
            for h in family_generators(spec, n, inner)? {
                if mat_mul(spec, g, &h) != mat_mul(spec, &h, g) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// A generating set for the family (transvections on basis elements,
/// dilations on units). Commuting with these is equivalent to commuting
/// with the whole group.
pub fn family_generators(
    spec: &RingSpec,
    n: usize,
    fam: &GroupFamily,
) -> Result<Vec<Mat>, MatError> {
    let units: Vec<RingElem> = if spec.is_finite() {
        spec.enumerate_units().map_err(MatError::Ring)?.collect()
    } else if spec.degree() == 1 {
        vec![spec.int(1), spec.int(-1)]
    } else {
        let declared = spec.unit_generators();
        if declared.is_empty() && matches!(fam, GroupFamily::T | GroupFamily::D | GroupFamily::Gl)
        {
            return Err(MatError::NeedUnitGenerators);
        }
        let mut u = vec![spec.int(1), spec.int(-1)];
        u.extend(declared);
        u
    };
    let mut gens = Vec::new();
    let basis: Vec<RingElem> = (1..=spec.degree()).map(|s| spec.basis(s)).collect();
    let transvection_pairs: Vec<(usize, usize)> = match fam {
        GroupFamily::Gl | GroupFamily::Sl => {
            let mut v = Vec::new();
            for i in 1..=n {
                for j in 1..=n {
                    if i != j {
                        v.push((i, j));
                    }
                }
            }
            v
        }
        GroupFamily::Ut | GroupFamily::T => {
            let mut v = Vec::new();
            for i in 1..=n {
                for j in (i + 1)..=n {
                    v.push((i, j));
                }
            }
            v
        }
        GroupFamily::D => Vec::new(),
        GroupFamily::ZOf(_) => Vec::new(),
    };
    for (i, j) in transvection_pairs {
        for b in &basis {
            gens.push(transvection(spec, n, i, j, b)?);
        }
    }
    let with_dilations = matches!(
        fam,
        GroupFamily::Gl | GroupFamily::T | GroupFamily::D
    );
    if with_dilations {
        for i in 1..=n {
            for u in &units {
                gens.push(dilation(spec, n, i, u)?);
            }
        }
    }
    Ok(gens)
}

/// Stream exactly the members of the family over a finite ring, each
/// once. `GL`/`SL` scan all matrices and filter by determinant; the
/// triangular and diagonal families enumerate only their free positions.
pub fn enumerate_group<'a>(
    spec: &'a RingSpec,
    n: usize,
    fam: &GroupFamily,
) -> Result<Box<dyn Iterator<Item = Mat> + 'a>, MatError> {
    if !spec.is_finite() {
        return Err(MatError::InfiniteRing);
    }
    let elems: Vec<RingElem> = spec.enumerate_elements()?.collect();
    let units: Vec<RingElem> = elems.iter().filter(|e| spec.is_unit(e)).cloned().collect();
    match fam {
        GroupFamily::Gl | GroupFamily::Sl => {
            let want_sl = matches!(fam, GroupFamily::Sl);
            let it = tuples(vec![elems; n * n]).filter_map(move |vals| {
                let m = Mat { n, entries: vals };
                let d = det(spec, &m);
                let keep = if want_sl {
                    spec.is_one(&d)
                } else {
                    spec.is_unit(&d)
                };
                keep.then_some(m)
            });
            Ok(Box::new(it))
        }
        GroupFamily::Ut => {
            let pairs = upper_pairs(n);
            let it = tuples(vec![elems; pairs.len()]).map(move |vals| {
                let mut m = identity(spec, n);
                for ((i, j), v) in pairs.iter().zip(vals) {
                    m.set(i - 1, j - 1, v);
                }
                m
            });
            Ok(Box::new(it))
        }
        GroupFamily::T => {
            let pairs = upper_pairs(n);
            let mut options = vec![units; n];
            options.extend(vec![elems; pairs.len()]);
            let it = tuples(options).map(move |mut vals| {
                let upper = vals.split_off(n);
                let mut m = diag(spec, &vals);
                for ((i, j), v) in pairs.iter().zip(upper) {
                    m.set(i - 1, j - 1, v);
                }
                m
            });
            Ok(Box::new(it))
        }
        GroupFamily::D => {
            let it = tuples(vec![units; n]).map(move |vals| diag(spec, &vals));
            Ok(Box::new(it))
        }
        GroupFamily::ZOf(inner) => {
            let gens = family_generators(spec, n, inner)?;
            let it = enumerate_group(spec, n, inner)?.filter(move |g| {
                gens.iter()
                    .all(|h| mat_mul(spec, g, h) == mat_mul(spec, h, g))
            });
            Ok(Box::new(it))
        }
    }
}

pub fn upper_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 1..=n {
        for j in (i + 1)..=n {
            v.push((i, j));
        }
    }
    v
}

fn tuples(options: Vec<Vec<RingElem>>) -> impl Iterator<Item = Vec<RingElem>> {
    let len = options.len();
    let mut counter = vec![0usize; len];
    let mut done = options.iter().any(|o| o.is_empty());
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out: Vec<RingElem> = counter
            .iter()
            .zip(&options)
            .map(|(&idx, opts)| opts[idx].clone())
            .collect();
        let mut pos = 0;
        loop {
            if pos == len {
                done = true;
                break;
            }
            counter[pos] += 1;
            if counter[pos] < options[pos].len() {
                break;
            }
            counter[pos] = 0;
            pos += 1;
        }
        Some(out)
    })
}

// ---------------------------------------------------------------------
// Centralizers, centers, set algebra
// ---------------------------------------------------------------------

/// `C_G(g) = {x in G : xg = gx}` as a literal subset.
pub fn centralizer(spec: &RingSpec, group: &[Mat], g: &Mat) -> Vec<Mat> {
    group
        .iter()
        .filter(|x| mat_mul(spec, x, g) == mat_mul(spec, g, x))
        .cloned()
        .collect()
}

/// `Z(G)` as a literal subset. A cheap prefilter against the first few
/// elements keeps the scan near-linear; every surviving candidate is
/// verified against the whole set.
pub fn center(spec: &RingSpec, group: &[Mat]) -> Vec<Mat> {
    let probes: Vec<&Mat> = group.iter().take(24).collect();
    group
        .iter()
        .filter(|x| {
            probes
                .iter()
                .all(|p| mat_mul(spec, x, p) == mat_mul(spec, p, x))
                && group
                    .iter()
                    .all(|y| mat_mul(spec, x, y) == mat_mul(spec, y, x))
        })
        .cloned()
        .collect()
}

/// Literal element-wise product set `{a*b : a in A, b in B}`, deduplicated.
pub fn product_set(spec: &RingSpec, a: &[Mat], b: &[Mat]) -> Vec<Mat> {
    let mut out: Vec<Mat> = a
        .iter()
        .flat_map(|x| b.iter().map(move |y| mat_mul(spec, x, y)))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Closure check: contains the identity and is closed under products and
/// inverses.
pub fn is_subgroup(spec: &RingSpec, set: &[Mat]) -> Result<bool, MatError> {
    if set.is_empty() {
        return Ok(false);
    }
    let n = set[0].n;
    let members: HashSet<&Mat> = set.iter().collect();
    if !members.contains(&identity(spec, n)) {
        return Ok(false);
    }
    for x in set {
        if !members.contains(&mat_inv(spec, x)?) {
            return Ok(false);
        }
        for y in set {
            if !members.contains(&mat_mul(spec, x, y)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Sorted, deduplicated copy (canonical set form).
pub fn canonical_set(set: &[Mat]) -> Vec<Mat> {
    let mut v = set.to_vec();
    v.sort();
    v.dedup();
    v
}

pub fn sets_equal(a: &[Mat], b: &[Mat]) -> bool {
    canonical_set(a) == canonical_set(b)
}

/// First element of the symmetric difference, if the sets differ.
pub fn set_difference_witness(a: &[Mat], b: &[Mat]) -> Option<Mat> {
    let sa: HashSet<&Mat> = a.iter().collect();
    let sb: HashSet<&Mat> = b.iter().collect();
    for x in a {
        if !sb.contains(x) {
            return Some(x.clone());
        }
    }
    for y in b {
        if !sa.contains(y) {
            return Some(y.clone());
        }
    }
    None
}

// ---------------------------------------------------------------------
// Matrix literals
// ---------------------------------------------------------------------

/// Parse the CLI matrix literal: semicolon-separated rows of
/// comma-separated entries in ring coefficient notation.
pub fn parse_mat(spec: &RingSpec, text: &str) -> Result<Mat, MatError> {
    let rows: Vec<&str> = text.split(';').collect();
    let n = rows.len();
    if n < 2 {
        return Err(MatError::Parse("need at least 2 rows".into()));
    }
    let mut parsed = Vec::with_capacity(n);
    for row in rows {
        let entries: Vec<&str> = row.split(',').collect();
        if entries.len() != n {
            return Err(MatError::Parse(format!(
                "row `{row}` has {} entries, expected {n}",
                entries.len()
            )));
        }
        let mut out = Vec::with_capacity(n);
        for e in entries {
            out.push(spec.parse_elem(e.trim())?);
        }
        parsed.push(out);
    }
    Mat::from_rows(parsed)
}

pub fn render_mat(spec: &RingSpec, m: &Mat) -> String {
    (0..m.n)
        .map(|r| {
            (0..m.n)
                .map(|c| spec.render(m.at(r, c)))
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join(";")
}
