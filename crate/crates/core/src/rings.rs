//! Commutative rings presented exactly: the integers, modular rings
//! `Z/m`, rings of rank `m` over `Z` given by structure constants, and
//! finite quotients of those by an integer modulus.
//!
//! A ring element is a coefficient vector over the distinguished basis;
//! basis index 1 is always the ring identity. Multiplication is driven by
//! the structure-constant table `c[i][j][k]` with
//! `e_i · e_j = Σ_k c[i][j][k] e_k`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Errors raised by ring construction and arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    #[error("basis element 1 must be the ring identity: e_1*e_{j} != e_{j}")]
    IdentityAxiom { j: usize },
    #[error("structure constants not commutative at triple ({i},{j},{k})")]
    NotCommutative { i: usize, j: usize, k: usize },
    #[error("structure constants not associative at triple ({i},{j},{k})")]
    NotAssociative { i: usize, j: usize, k: usize },
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(i64),
    #[error("degree must be at least 1")]
    BadDegree,
    #[error("structure constant table has wrong shape")]
    BadConstants,
    #[error("declared unit generator {0} is not a unit")]
    BadUnitGenerator(String),
    #[error("element has {got} coefficients, ring has degree {want}")]
    DegreeMismatch { got: usize, want: usize },
    #[error("element is not a unit: {0}")]
    NonUnit(String),
    #[error("ring is infinite; operation requires a finite (modular or quotient) ring")]
    InfiniteRing,
    #[error("unknown ring preset `{0}`")]
    UnknownPreset(String),
    #[error("cannot parse ring element `{text}`: {reason}")]
    ElemParse { text: String, reason: String },
    #[error("bad ring spec: {0}")]
    BadSpec(String),
}

/// Structure-constant data for a ring that is free of rank `degree`
/// as a module over the integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumberRingData {
    degree: usize,
    /// Flattened `degree^3` table, index `(i*degree + j)*degree + k`.
    constants: Vec<i64>,
    /// Basis names for parsing/printing; `names[0]` is the identity and
    /// renders as a bare integer coefficient.
    names: Vec<String>,
    /// Optional user-supplied generators of the unit group. They are
    /// validated but never computed by this crate.
    unit_generators: Vec<Vec<i64>>,
}

/// The four supported ring kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingKind {
    Integers,
    Modular(i64),
    NumberRing(NumberRingData),
    Quotient(NumberRingData, i64),
}

/// A commutative ring with exact arithmetic on coefficient vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingSpec {
    kind: RingKind,
    name: String,
}

/// An element of a [`RingSpec`]: a coefficient vector over the basis.
/// Residue coefficients of modular/quotient rings are kept reduced into
/// the canonical range `[0, modulus)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElem {
    coeffs: Vec<BigInt>,
}

impl RingElem {
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// The coefficient on the identity basis element.
    pub fn lead(&self) -> &BigInt {
        &self.coeffs[0]
    }
}

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

impl RingSpec {
    pub fn integers() -> Self {
        RingSpec {
            kind: RingKind::Integers,
            name: "Z".into(),
        }
    }

    pub fn modular(m: i64) -> Result<Self, RingError> {
        if m < 2 {
            return Err(RingError::BadModulus(m));
        }
        Ok(RingSpec {
            kind: RingKind::Modular(m),
            name: format!("Zmod:{m}"),
        })
    }

    /// A ring of rank `degree` over `Z` with the given structure
    /// constants (`constants[i][j][k]`, 0-based) and basis names.
    pub fn number_ring(
        degree: usize,
        constants: Vec<Vec<Vec<i64>>>,
        names: Option<Vec<String>>,
    ) -> Result<Self, RingError> {
        let data = NumberRingData::new(degree, constants, names, Vec::new())?;
        let spec = RingSpec {
            name: format!("ring[{}]", data.names.join(",")),
            kind: RingKind::NumberRing(data),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The quotient of a number ring by the ideal generated by the
    /// integer `q`.
    pub fn quotient_of(base: &RingSpec, q: i64) -> Result<Self, RingError> {
        if q < 2 {
            return Err(RingError::BadModulus(q));
        }
        match &base.kind {
            RingKind::NumberRing(data) => Ok(RingSpec {
                kind: RingKind::Quotient(data.clone(), q),
                name: format!("{}/{q}", base.name),
            }),
            RingKind::Integers => RingSpec::modular(q),
            _ => Err(RingError::BadSpec(
                "quotient base must be an infinite ring".into(),
            )),
        }
    }

    /// Gaussian integers `Z[i]`.
    pub fn gaussian() -> Self {
        let mut spec = RingSpec::number_ring(
            2,
            vec![
                vec![vec![1, 0], vec![0, 1]],
                vec![vec![0, 1], vec![-1, 0]],
            ],
            Some(vec!["1".into(), "i".into()]),
        )
        .expect("Z[i] table is valid");
        spec.name = "Zi".into();
        spec
    }

    /// `Z[r]` with `r^2 = d`.
    pub fn sqrt_ring(d: i64) -> Self {
        let mut spec = RingSpec::number_ring(
            2,
            vec![
                vec![vec![1, 0], vec![0, 1]],
                vec![vec![0, 1], vec![d, 0]],
            ],
            Some(vec!["1".into(), "r".into()]),
        )
        .expect("Z[sqrt d] table is valid");
        spec.name = format!("Zsqrt:{d}");
        spec
    }

    /// Resolve a ring preset: `Z`, `Zmod:<m>`, `Zi`, `Zsqrt:<d>`, `Zi/<q>`.
    pub fn preset(name: &str) -> Result<Self, RingError> {
        let bad = || RingError::UnknownPreset(name.to_string());
        if name == "Z" {
            return Ok(RingSpec::integers());
        }
        if name == "Zi" {
            return Ok(RingSpec::gaussian());
        }
        if let Some(m) = name.strip_prefix("Zmod:") {
            let m: i64 = m.parse().map_err(|_| bad())?;
            return RingSpec::modular(m);
        }
        if let Some(rest) = name.strip_prefix("Zi/") {
            let q: i64 = rest.parse().map_err(|_| bad())?;
            let mut spec = RingSpec::quotient_of(&RingSpec::gaussian(), q)?;
            spec.name = format!("Zi/{q}");
            return Ok(spec);
        }
        if let Some(d) = name.strip_prefix("Zsqrt:") {
            let d: i64 = d.parse().map_err(|_| bad())?;
            return Ok(RingSpec::sqrt_ring(d));
        }
        Err(bad())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &RingKind {
        &self.kind
    }

    /// Rank of the ring as a module over `Z` (or over `Z/q`).
    pub fn degree(&self) -> usize {
        match &self.kind {
            RingKind::Integers | RingKind::Modular(_) => 1,
            RingKind::NumberRing(d) | RingKind::Quotient(d, _) => d.degree,
        }
    }

    pub fn modulus(&self) -> Option<i64> {
        match &self.kind {
            RingKind::Modular(m) | RingKind::Quotient(_, m) => Some(*m),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.modulus().is_some()
    }

    /// Number of elements of a finite ring.
    pub fn size(&self) -> Result<u64, RingError> {
        let m = self.modulus().ok_or(RingError::InfiniteRing)? as u64;
        Ok(m.pow(self.degree() as u32))
    }

    fn constant(&self, i: usize, j: usize, k: usize) -> i64 {
        match &self.kind {
            RingKind::Integers | RingKind::Modular(_) => 1, // degree 1, only (0,0,0)
            RingKind::NumberRing(d) | RingKind::Quotient(d, _) => {
                d.constants[(i * d.degree + j) * d.degree + k]
            }
        }
    }

    pub fn basis_names(&self) -> Vec<String> {
        match &self.kind {
            RingKind::Integers | RingKind::Modular(_) => vec!["1".to_string()],
            RingKind::NumberRing(d) | RingKind::Quotient(d, _) => d.names.clone(),
        }
    }

    /// User-supplied unit generators, if any were declared.
    pub fn unit_generators(&self) -> Vec<RingElem> {
        match &self.kind {
            RingKind::NumberRing(d) | RingKind::Quotient(d, _) => d
                .unit_generators
                .iter()
                .map(|v| self.reduce(v.iter().map(|&c| big(c)).collect()))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Check every [`RingSpec`] invariant: identity basis element,
    /// commutativity and associativity of the structure constants, and
    /// validity of any declared unit generators. Reports the first
    /// violated triple (indices are 1-based).
    pub fn validate(&self) -> Result<(), RingError> {
        let m = self.degree();
        // e_1 * e_j = e_j
        for j in 0..m {
            for k in 0..m {
                let want = if j == k { 1 } else { 0 };
                if self.constant(0, j, k) != want {
                    return Err(RingError::IdentityAxiom { j: j + 1 });
                }
            }
        }
        // commutativity on basis pairs
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    if self.constant(i, j, k) != self.constant(j, i, k) {
                        return Err(RingError::NotCommutative {
                            i: i + 1,
                            j: j + 1,
                            k: k + 1,
                        });
                    }
                }
            }
        }
        // associativity on basis triples, computed over Z before reduction
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let ij = self.basis_product_z(i, j);
                    let jk = self.basis_product_z(j, k);
                    // (e_i e_j) e_k = sum_s ij[s] * (e_s e_k)
                    let mut lhs = vec![BigInt::zero(); m];
                    let mut rhs = vec![BigInt::zero(); m];
                    for s in 0..m {
                        for t in 0..m {
                            lhs[t] += &ij[s] * big(self.constant(s, k, t));
                            rhs[t] += &jk[s] * big(self.constant(i, s, t));
                        }
                    }
                    let (lhs, rhs) = (self.reduce(lhs), self.reduce(rhs));
                    if lhs != rhs {
                        return Err(RingError::NotAssociative {
                            i: i + 1,
                            j: j + 1,
                            k: k + 1,
                        });
                    }
                }
            }
        }
        for g in self.unit_generators() {
            if !self.is_unit(&g) {
                return Err(RingError::BadUnitGenerator(self.render(&g)));
            }
        }
        Ok(())
    }

    fn basis_product_z(&self, i: usize, j: usize) -> Vec<BigInt> {
        (0..self.degree())
            .map(|k| big(self.constant(i, j, k)))
            .collect()
    }

    /// Canonicalize a coefficient vector into this ring (residues reduced
    /// into `[0, modulus)` for finite kinds).
    pub fn reduce(&self, coeffs: Vec<BigInt>) -> RingElem {
        let coeffs = match self.modulus() {
            Some(m) => {
                let m = big(m);
                coeffs.into_iter().map(|c| c.mod_floor(&m)).collect()
            }
            None => coeffs,
        };
        RingElem { coeffs }
    }

    /// Build an element from raw coefficients, checking the degree.
    pub fn elem(&self, coeffs: Vec<i64>) -> Result<RingElem, RingError> {
        self.check_len(coeffs.len())?;
        Ok(self.reduce(coeffs.into_iter().map(big).collect()))
    }

    pub fn elem_big(&self, coeffs: Vec<BigInt>) -> Result<RingElem, RingError> {
        self.check_len(coeffs.len())?;
        Ok(self.reduce(coeffs))
    }

    fn check_len(&self, got: usize) -> Result<(), RingError> {
        if got != self.degree() {
            return Err(RingError::DegreeMismatch {
                got,
                want: self.degree(),
            });
        }
        Ok(())
    }

    /// The image of the rational integer `v` in this ring.
    pub fn int(&self, v: i64) -> RingElem {
        let mut coeffs = vec![BigInt::zero(); self.degree()];
        coeffs[0] = big(v);
        self.reduce(coeffs)
    }

    pub fn zero(&self) -> RingElem {
        self.int(0)
    }

    pub fn one(&self) -> RingElem {
        self.int(1)
    }

    /// The `idx`-th basis element, 1-based (`basis(1)` is the identity).
    pub fn basis(&self, idx: usize) -> RingElem {
        assert!(idx >= 1 && idx <= self.degree(), "basis index out of range");
        let mut coeffs = vec![BigInt::zero(); self.degree()];
        coeffs[idx - 1] = BigInt::one();
        self.reduce(coeffs)
    }

    pub fn is_zero(&self, a: &RingElem) -> bool {
        a.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self, a: &RingElem) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &RingElem, b: &RingElem) -> RingElem {
        debug_assert_eq!(a.coeffs.len(), self.degree());
        debug_assert_eq!(b.coeffs.len(), self.degree());
        self.reduce(
            a.coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| x + y)
                .collect(),
        )
    }

    /// Checked variant of [`RingSpec::add`]: rejects coefficient vectors
    /// whose length does not match this ring.
    pub fn try_add(&self, a: &RingElem, b: &RingElem) -> Result<RingElem, RingError> {
        self.check_len(a.coeffs.len())?;
        self.check_len(b.coeffs.len())?;
        Ok(self.add(a, b))
    }

    pub fn neg(&self, a: &RingElem) -> RingElem {
        self.reduce(a.coeffs.iter().map(|x| -x).collect())
    }

    pub fn sub(&self, a: &RingElem, b: &RingElem) -> RingElem {
        self.reduce(
            a.coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| x - y)
                .collect(),
        )
    }

    pub fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        debug_assert_eq!(a.coeffs.len(), self.degree());
        debug_assert_eq!(b.coeffs.len(), self.degree());
        let m = self.degree();
        if m == 1 {
            return self.reduce(vec![&a.coeffs[0] * &b.coeffs[0]]);
        }
        let mut out = vec![BigInt::zero(); m];
        for i in 0..m {
            if a.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..m {
                if b.coeffs[j].is_zero() {
                    continue;
                }
                let prod = &a.coeffs[i] * &b.coeffs[j];
                for k in 0..m {
                    let c = self.constant(i, j, k);
                    if c != 0 {
                        out[k] += &prod * big(c);
                    }
                }
            }
        }
        self.reduce(out)
    }

    pub fn try_mul(&self, a: &RingElem, b: &RingElem) -> Result<RingElem, RingError> {
        self.check_len(a.coeffs.len())?;
        self.check_len(b.coeffs.len())?;
        Ok(self.mul(a, b))
    }

    /// The matrix of multiplication by `a` in the basis, column `i` being
    /// the coefficient vector of `a * e_i`. Entries are integers (residue
    /// representatives for finite kinds).
    pub fn mul_matrix(&self, a: &RingElem) -> Vec<Vec<BigInt>> {
        let m = self.degree();
        let mut cols = Vec::with_capacity(m);
        for i in 0..m {
            let col = self.mul(a, &self.basis(i + 1));
            cols.push(col.coeffs);
        }
        // transpose to rows
        (0..m)
            .map(|r| (0..m).map(|c| cols[c][r].clone()).collect())
            .collect()
    }

    fn mul_matrix_det(&self, a: &RingElem) -> BigInt {
        int_det(&self.mul_matrix(a))
    }

    /// `a` is a unit iff the determinant of its multiplication matrix is
    /// a unit integer (`±1` for infinite kinds) or a unit residue.
    pub fn is_unit(&self, a: &RingElem) -> bool {
        let d = self.mul_matrix_det(a);
        match self.modulus() {
            None => d.abs().is_one(),
            Some(m) => d.gcd(&big(m)).is_one(),
        }
    }

    /// Multiplicative inverse. Errors on non-units.
    pub fn inverse(&self, a: &RingElem) -> Result<RingElem, RingError> {
        if !self.is_unit(a) {
            return Err(RingError::NonUnit(self.render(a)));
        }
        let mat = self.mul_matrix(a);
        let det = int_det(&mat);
        let adj = int_adjugate(&mat);
        // solve M x = e_1: x = adj * e_1 / det, i.e. first column of adj
        // divided by det (modularly for finite kinds).
        let m = self.degree();
        let col: Vec<BigInt> = (0..m).map(|r| adj[r][0].clone()).collect();
        let coeffs = match self.modulus() {
            None => {
                // det is ±1 here
                if det == BigInt::one() {
                    col
                } else {
                    col.into_iter().map(|c| -c).collect()
                }
            }
            Some(modulus) => {
                let mb = big(modulus);
                let dinv = mod_inverse(&det.mod_floor(&mb), &mb)
                    .expect("unit residue has modular inverse");
                col.into_iter().map(|c| (c * &dinv).mod_floor(&mb)).collect()
            }
        };
        let inv = self.reduce(coeffs);
        debug_assert!(self.is_one(&self.mul(a, &inv)));
        Ok(inv)
    }

    /// Stream every element of a finite ring exactly once.
    pub fn enumerate_elements(&self) -> Result<impl Iterator<Item = RingElem> + '_, RingError> {
        let m = self.modulus().ok_or(RingError::InfiniteRing)?;
        let degree = self.degree();
        let mut counter = vec![0i64; degree];
        let mut done = false;
        Ok(std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = RingElem {
                coeffs: counter.iter().map(|&c| big(c)).collect(),
            };
            // advance mixed-radix counter
            let mut pos = 0;
            loop {
                if pos == degree {
                    done = true;
                    break;
                }
                counter[pos] += 1;
                if counter[pos] < m {
                    break;
                }
                counter[pos] = 0;
                pos += 1;
            }
            Some(out)
        }))
    }

    /// Stream the units of a finite ring.
    pub fn enumerate_units(&self) -> Result<impl Iterator<Item = RingElem> + '_, RingError> {
        Ok(self.enumerate_elements()?.filter(|a| self.is_unit(a)))
    }

    /// Search for units among elements with all coefficients in
    /// `[-bound, bound]`. Usable on infinite rings; this is the bounded
    /// global unit search (e.g. it finds exactly `{±1, ±i}` in `Z[i]`
    /// with bound 1).
    pub fn search_units_bounded(&self, bound: i64) -> Vec<RingElem> {
        let m = self.degree();
        let width = 2 * bound + 1;
        let total = (width as u64).pow(m as u32);
        let mut out = Vec::new();
        for idx in 0..total {
            let mut rem = idx;
            let mut coeffs = Vec::with_capacity(m);
            for _ in 0..m {
                coeffs.push(big((rem % width as u64) as i64 - bound));
                rem /= width as u64;
            }
            let e = self.reduce(coeffs);
            if self.is_unit(&e) {
                out.push(e);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Render an element in coefficient notation, e.g. `1+2i`.
    pub fn render(&self, a: &RingElem) -> String {
        let names = self.basis_names();
        let mut out = String::new();
        for (idx, c) in a.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = if idx == 0 { "" } else { names[idx].as_str() };
            let mag = c.abs();
            let term = if name.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                name.to_string()
            } else {
                format!("{mag}{name}")
            };
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push('-');
            } else {
                out.push('+');
            }
            out.push_str(&term);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// Parse coefficient notation: signed integer terms with optional
    /// basis names, e.g. `1+2i`, `-3`, `r-1`.
    pub fn parse_elem(&self, text: &str) -> Result<RingElem, RingError> {
        let err = |reason: &str| RingError::ElemParse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let names = self.basis_names();
        let mut coeffs = vec![BigInt::zero(); self.degree()];
        let s: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err("empty"));
        }
        let mut pos = 0;
        while pos < s.len() {
            let mut sign = 1i64;
            while pos < s.len() && (s[pos] == '+' || s[pos] == '-') {
                if s[pos] == '-' {
                    sign = -sign;
                }
                pos += 1;
            }
            if pos >= s.len() {
                return Err(err("dangling sign"));
            }
            let mut digits = String::new();
            while pos < s.len() && s[pos].is_ascii_digit() {
                digits.push(s[pos]);
                pos += 1;
            }
            let mut word = String::new();
            while pos < s.len() && (s[pos].is_alphanumeric() || s[pos] == '_') {
                word.push(s[pos]);
                pos += 1;
            }
            if digits.is_empty() && word.is_empty() {
                return Err(err(&format!("unexpected character at {pos}")));
            }
            let mag: BigInt = if digits.is_empty() {
                BigInt::one()
            } else {
                digits.parse().map_err(|_| err("bad integer"))?
            };
            let basis_idx = if word.is_empty() || word == "1" {
                0
            } else {
                names
                    .iter()
                    .position(|n| *n == word)
                    .ok_or_else(|| err(&format!("unknown basis name `{word}`")))?
            };
            coeffs[basis_idx] += big(sign) * mag;
        }
        Ok(self.reduce(coeffs))
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

impl NumberRingData {
    fn new(
        degree: usize,
        constants: Vec<Vec<Vec<i64>>>,
        names: Option<Vec<String>>,
        unit_generators: Vec<Vec<i64>>,
    ) -> Result<Self, RingError> {
        if degree == 0 {
            return Err(RingError::BadDegree);
        }
        if constants.len() != degree
            || constants
                .iter()
                .any(|p| p.len() != degree || p.iter().any(|r| r.len() != degree))
        {
            return Err(RingError::BadConstants);
        }
        let mut flat = Vec::with_capacity(degree * degree * degree);
        for plane in &constants {
            for row in plane {
                flat.extend_from_slice(row);
            }
        }
        let names = match names {
            Some(n) => {
                if n.len() != degree {
                    return Err(RingError::BadSpec("names length != degree".into()));
                }
                n
            }
            None => (0..degree)
                .map(|i| if i == 0 { "1".to_string() } else { format!("b{}", i + 1) })
                .collect(),
        };
        Ok(NumberRingData {
            degree,
            constants: flat,
            names,
            unit_generators,
        })
    }
}

// ---------------------------------------------------------------------
// JSON spec file format
// ---------------------------------------------------------------------

/// On-disk JSON form of a ring spec:
/// `{"kind": "...", "m": int, "c": [[[int]]], "modulus": int?, "names": [string]?}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RingSpecFile {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<Vec<Vec<i64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_generators: Option<Vec<Vec<i64>>>,
}

impl RingSpecFile {
    pub fn resolve(&self) -> Result<RingSpec, RingError> {
        match self.kind.as_str() {
            "integers" => Ok(RingSpec::integers()),
            "modular" => {
                let m = self
                    .modulus
                    .ok_or_else(|| RingError::BadSpec("modular kind needs `modulus`".into()))?;
                RingSpec::modular(m)
            }
            "number-ring" | "quotient" => {
                let degree = self
                    .m
                    .ok_or_else(|| RingError::BadSpec("need degree field `m`".into()))?;
                let constants = self
                    .c
                    .clone()
                    .ok_or_else(|| RingError::BadSpec("need constants field `c`".into()))?;
                let data = NumberRingData::new(
                    degree,
                    constants,
                    self.names.clone(),
                    self.unit_generators.clone().unwrap_or_default(),
                )?;
                let mut spec = RingSpec {
                    name: format!("ring[{}]", data.names.join(",")),
                    kind: RingKind::NumberRing(data),
                };
                spec.validate()?;
                if self.kind == "quotient" {
                    let q = self
                        .modulus
                        .ok_or_else(|| RingError::BadSpec("quotient kind needs `modulus`".into()))?;
                    spec = RingSpec::quotient_of(&spec, q)?;
                    spec.validate()?;
                }
                Ok(spec)
            }
            other => Err(RingError::BadSpec(format!("unknown kind `{other}`"))),
        }
    }
}

// ---------------------------------------------------------------------
// Exact integer linear algebra on small matrices (degree-sized)
// ---------------------------------------------------------------------

/// Determinant of a square integer matrix by cofactor expansion.
pub(crate) fn int_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    match n {
        0 => BigInt::one(),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        _ => {
            let mut acc = BigInt::zero();
            for (j, head) in m[0].iter().enumerate() {
                if head.is_zero() {
                    continue;
                }
                let minor: Vec<Vec<BigInt>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = head * int_det(&minor);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
    }
}

pub(crate) fn int_adjugate(m: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![BigInt::one()]];
    }
    let mut adj = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<BigInt>> = m
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != i)
                .map(|(_, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != j)
                        .map(|(_, v)| v.clone())
                        .collect()
                })
                .collect();
            let mut cof = int_det(&minor);
            if (i + j) % 2 == 1 {
                cof = -cof;
            }
            adj[j][i] = cof; // transposed
        }
    }
    adj
}

/// Inverse of `a` modulo `m`, both nonnegative with `m >= 2`.
pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}
