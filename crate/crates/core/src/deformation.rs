//! Abelian deformations of the triangular group: the torus multiplication
//! is twisted by symmetric 2-cocycles `f_1, ..., f_{n-1}` on the unit
//! group, and the whole group is the internal semidirect product of the
//! deformed torus with the unitriangular subgroup.
//!
//! Elements are kept in a normal form: torus coordinates
//! `(a_1, ..., a_{n-1})` for the dilation generators `d_1 .. d_{n-1}`, a
//! central coordinate, and a unitriangular matrix. `d_n(a)` is
//! represented as the central scalar `diag(a)` times the inverse of
//! `d_1(a) ... d_{n-1}(a)`.
//!
//! Exhaustive scans (group axioms, derived subgroup, center) run on a
//! packed index engine built from small multiplication tables.

use crate::matgroup::{self, GroupFamily, Mat, MatError};
use crate::rings::{RingElem, RingError, RingSpec};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{HashMap, HashSet, VecDeque};

/// Cap on `|G|` for closure computations (derived subgroup, center,
/// axiom scans).
pub const CLOSURE_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeformError {
    #[error("deformations require a finite ring")]
    InfiniteRing,
    #[error("dimension must be at least 3")]
    TooSmallN,
    #[error("expected {0} cocycles (one per d_1..d_{{n-1}})")]
    WrongCocycleCount(usize),
    #[error("table is not a normalized symmetric 2-cocycle on the unit group")]
    NotCocycle,
    #[error("no cocycle class with index {0}; the unit group has {1} classes")]
    UnknownClass(usize, usize),
    #[error("cannot construct class representatives: unit group is not cyclic and brute enumeration exceeds the cap")]
    ClassConstruction,
    #[error("group of order {0} exceeds the closure cap {1}")]
    CapExceeded(usize, usize),
    #[error("element does not belong to this deformed group")]
    SpecMismatch,
    #[error("cannot parse cocycle spec `{0}`")]
    Parse(String),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A symmetric normalized 2-cocycle on the unit group, written
/// multiplicatively: a dense table of unit indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitCocycle {
    table: Vec<u16>,
    k: usize,
}

impl UnitCocycle {
    pub fn value_idx(&self, a: usize, b: usize) -> usize {
        self.table[a * self.k + b] as usize
    }
}

/// How to build each deforming cocycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CocycleSpec {
    Trivial,
    /// The `k`-th symmetric cocycle class on the unit group, in canonical
    /// order (`Class(0)` is the trivial class).
    Class(usize),
    /// Explicit table: `f(units[a], units[b]) = units[table[a*k+b]]`.
    Table(Vec<u16>),
}

impl CocycleSpec {
    /// Parse `trivial` or `class:<k>`.
    pub fn parse(s: &str) -> Result<Self, DeformError> {
        if s == "trivial" {
            return Ok(CocycleSpec::Trivial);
        }
        if let Some(k) = s.strip_prefix("class:") {
            let k: usize = k.parse().map_err(|_| DeformError::Parse(s.to_string()))?;
            return Ok(CocycleSpec::Class(k));
        }
        Err(DeformError::Parse(s.to_string()))
    }
}

/// The deformed triangular group over a finite ring.
#[derive(Debug, Clone)]
pub struct DeformedGroup {
    pub ring: RingSpec,
    pub n: usize,
    units: Vec<RingElem>,
    unit_index: HashMap<RingElem, u16>,
    unit_mul: Vec<u16>,
    unit_inv: Vec<u16>,
    cocycles: Vec<UnitCocycle>,
}

/// Normal form: torus coordinates for `d_1..d_{n-1}` (as unit indices),
/// the central coordinate, and the unitriangular part.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeformedElem {
    pub torus: Vec<u16>,
    pub central: u16,
    pub u: Mat,
}

impl DeformedGroup {
    pub fn new(ring: RingSpec, n: usize, specs: Vec<CocycleSpec>) -> Result<Self, DeformError> {
        if !ring.is_finite() {
            return Err(DeformError::InfiniteRing);
        }
        if n < 3 {
            return Err(DeformError::TooSmallN);
        }
        if specs.len() != n - 1 {
            return Err(DeformError::WrongCocycleCount(n - 1));
        }
        let units: Vec<RingElem> = ring.enumerate_units()?.collect();
        let k = units.len();
        let unit_index: HashMap<RingElem, u16> = units
            .iter()
            .enumerate()
            .map(|(i, u)| (u.clone(), i as u16))
            .collect();
        let mut unit_mul = vec![0u16; k * k];
        for i in 0..k {
            for j in 0..k {
                unit_mul[i * k + j] = unit_index[&ring.mul(&units[i], &units[j])];
            }
        }
        let mut unit_inv = vec![0u16; k];
        for (i, item) in unit_inv.iter_mut().enumerate() {
            *item = unit_index[&ring.inverse(&units[i])?];
        }
        let mut group = DeformedGroup {
            ring,
            n,
            units,
            unit_index,
            unit_mul,
            unit_inv,
            cocycles: Vec::new(),
        };
        for s in specs {
            let c = group.build_cocycle(&s)?;
            group.check_cocycle(&c)?;
            group.cocycles.push(c);
        }
        Ok(group)
    }

    pub fn units(&self) -> &[RingElem] {
        &self.units
    }

    pub fn unit_count(&self) -> usize {
        self.units.len()
    }

    pub fn unit_idx(&self, u: &RingElem) -> Option<u16> {
        self.unit_index.get(u).copied()
    }

    pub fn cocycles(&self) -> &[UnitCocycle] {
        &self.cocycles
    }

    pub fn one_idx(&self) -> u16 {
        self.unit_index[&self.ring.one()]
    }

    pub fn umul(&self, a: u16, b: u16) -> u16 {
        self.unit_mul[a as usize * self.units.len() + b as usize]
    }

    pub fn uinv(&self, a: u16) -> u16 {
        self.unit_inv[a as usize]
    }

    fn build_cocycle(&self, spec: &CocycleSpec) -> Result<UnitCocycle, DeformError> {
        let k = self.units.len();
        match spec {
            CocycleSpec::Trivial => Ok(UnitCocycle {
                table: vec![self.one_idx(); k * k],
                k,
            }),
            CocycleSpec::Table(t) => {
                if t.len() != k * k || t.iter().any(|&v| v as usize >= k) {
                    return Err(DeformError::NotCocycle);
                }
                Ok(UnitCocycle { table: t.clone(), k })
            }
            CocycleSpec::Class(idx) => {
                let reps = self.cocycle_class_reps()?;
                reps.get(*idx)
                    .cloned()
                    .ok_or(DeformError::UnknownClass(*idx, reps.len()))
            }
        }
    }

    /// Exhaustive normalization, symmetry, and cocycle-identity check,
    /// multiplicatively over the unit group.
    pub fn check_cocycle(&self, f: &UnitCocycle) -> Result<(), DeformError> {
        let k = self.units.len();
        if f.k != k || f.table.len() != k * k {
            return Err(DeformError::NotCocycle);
        }
        let one = self.one_idx() as usize;
        for a in 0..k {
            if f.value_idx(one, a) != one || f.value_idx(a, one) != one {
                return Err(DeformError::NotCocycle);
            }
            for b in 0..k {
                if f.value_idx(a, b) != f.value_idx(b, a) {
                    return Err(DeformError::NotCocycle);
                }
                let ab = self.umul(a as u16, b as u16) as usize;
                for c in 0..k {
                    let bc = self.umul(b as u16, c as u16) as usize;
                    let lhs = self.umul(f.table[ab * k + c], f.table[a * k + b]);
                    let rhs = self.umul(f.table[a * k + bc], f.table[b * k + c]);
                    if lhs != rhs {
                        return Err(DeformError::NotCocycle);
                    }
                }
            }
        }
        Ok(())
    }

    /// Canonical representatives of the symmetric 2-cocycle classes on
    /// the unit group; the first is the trivial class. Uses the carry
    /// construction when the unit group is cyclic, otherwise brute table
    /// enumeration.
    pub fn cocycle_class_reps(&self) -> Result<Vec<UnitCocycle>, DeformError> {
        let k = self.units.len();
        let one = self.one_idx();
        if let Some(gen_idx) = self.cyclic_generator() {
            // unit = gen^log[unit]
            let mut log = vec![0usize; k];
            let mut pow_of = vec![0u16; k]; // gen^e
            let mut cur = one;
            for e in 0..k {
                log[cur as usize] = e;
                pow_of[e] = cur;
                cur = self.umul(cur, gen_idx);
            }
            // k-th powers of units
            let powers: HashSet<u16> = (0..k as u16)
                .map(|i| {
                    let mut acc = one;
                    for _ in 0..k {
                        acc = self.umul(acc, i);
                    }
                    acc
                })
                .collect();
            let mut reps = Vec::new();
            let mut covered: HashSet<u16> = HashSet::new();
            // trivial class first
            for v in std::iter::once(one).chain(0..k as u16) {
                if covered.contains(&v) {
                    continue;
                }
                for &p in &powers {
                    covered.insert(self.umul(v, p));
                }
                // carry cocycle f(gen^a, gen^b) = v^((a+b) div k)
                let mut table = vec![one; k * k];
                for a in 0..k {
                    for b in 0..k {
                        let carry = (a + b) / k;
                        let mut val = one;
                        for _ in 0..carry {
                            val = self.umul(val, v);
                        }
                        table[pow_of[a] as usize * k + pow_of[b] as usize] = val;
                    }
                }
                reps.push(UnitCocycle { table, k });
            }
            for r in &reps {
                self.check_cocycle(r)?;
            }
            return Ok(reps);
        }
        // brute enumeration of all normalized symmetric tables
        let free: Vec<(usize, usize)> = {
            let one = one as usize;
            let mut v = Vec::new();
            for a in 0..k {
                for b in a..k {
                    if a != one && b != one {
                        v.push((a, b));
                    }
                }
            }
            v
        };
        let count = match (k as u128).checked_pow(free.len() as u32) {
            Some(c) if c <= 1 << 22 => c,
            _ => return Err(DeformError::ClassConstruction),
        };
        let mut classes: Vec<(Vec<u16>, UnitCocycle)> = Vec::new();
        let mut seen: HashSet<Vec<u16>> = HashSet::new();
        for mut idx in 0..count {
            let mut table = vec![one; k * k];
            for &(a, b) in &free {
                let v = (idx % k as u128) as u16;
                idx /= k as u128;
                table[a * k + b] = v;
                table[b * k + a] = v;
            }
            let f = UnitCocycle { table, k };
            if self.check_cocycle(&f).is_err() {
                continue;
            }
            let ck = self.canonical_class_key(&f);
            if seen.insert(ck.clone()) {
                classes.push((ck, f));
            }
        }
        classes.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(classes.into_iter().map(|(_, f)| f).collect())
    }

    fn cyclic_generator(&self) -> Option<u16> {
        let k = self.units.len();
        let one = self.one_idx();
        (0..k as u16).find(|&g| {
            let mut acc = g;
            let mut ord = 1;
            while acc != one {
                acc = self.umul(acc, g);
                ord += 1;
            }
            ord == k
        })
    }

    /// Lexicographically smallest table in the cohomology class of `f`
    /// (brute search over all coboundaries of the unit group).
    fn canonical_class_key(&self, f: &UnitCocycle) -> Vec<u16> {
        let k = self.units.len();
        let one = self.one_idx();
        let free: Vec<usize> = (0..k).filter(|&i| i as u16 != one).collect();
        let count = (k as u64).pow(free.len() as u32);
        let mut best: Option<Vec<u16>> = None;
        for mut idx in 0..count {
            let mut psi = vec![one; k];
            for &pos in &free {
                psi[pos] = (idx % k as u64) as u16;
                idx /= k as u64;
            }
            let mut cand = Vec::with_capacity(k * k);
            for a in 0..k {
                for b in 0..k {
                    // f(a,b) * psi(ab) * psi(a)^-1 * psi(b)^-1
                    let ab = self.umul(a as u16, b as u16) as usize;
                    let mut v = f.table[a * k + b];
                    v = self.umul(v, psi[ab]);
                    v = self.umul(v, self.uinv(psi[a]));
                    v = self.umul(v, self.uinv(psi[b]));
                    cand.push(v);
                }
            }
            if best.as_ref().is_none_or(|b| &cand < b) {
                best = Some(cand);
            }
        }
        best.unwrap()
    }

    /// Whether two unit cocycles are cohomologous.
    pub fn cohomologous(&self, f: &UnitCocycle, g: &UnitCocycle) -> bool {
        self.canonical_class_key(f) == self.canonical_class_key(g)
    }

    // -- elements ------------------------------------------------------

    pub fn identity(&self) -> DeformedElem {
        DeformedElem {
            torus: vec![self.one_idx(); self.n - 1],
            central: self.one_idx(),
            u: matgroup::identity(&self.ring, self.n),
        }
    }

    pub fn transvection(
        &self,
        i: usize,
        j: usize,
        param: &RingElem,
    ) -> Result<DeformedElem, DeformError> {
        assert!(i < j, "deformed transvections live in the unitriangular part");
        Ok(DeformedElem {
            u: matgroup::transvection(&self.ring, self.n, i, j, param)?,
            ..self.identity()
        })
    }

    /// `d_i(a)` for `1 <= i <= n`; `d_n` is represented through the
    /// central coordinate.
    pub fn dilation(&self, i: usize, param: &RingElem) -> Result<DeformedElem, DeformError> {
        let idx = *self
            .unit_index
            .get(param)
            .ok_or_else(|| DeformError::Ring(RingError::NonUnit(self.ring.render(param))))?;
        let mut e = self.identity();
        if i < self.n {
            e.torus[i - 1] = idx;
            return Ok(e);
        }
        // d_n(a) = diag(a) * (d_1(a) ... d_{n-1}(a))^{-1}
        let inv = self.uinv(idx);
        for c in e.torus.iter_mut() {
            *c = inv;
        }
        let mut central = idx;
        for f in &self.cocycles {
            let fv = f.table[idx as usize * self.units.len() + inv as usize];
            central = self.umul(central, self.uinv(fv));
        }
        e.central = central;
        Ok(e)
    }

    /// The central scalar `diag(a)`.
    pub fn central(&self, param: &RingElem) -> Result<DeformedElem, DeformError> {
        let idx = *self
            .unit_index
            .get(param)
            .ok_or_else(|| DeformError::Ring(RingError::NonUnit(self.ring.render(param))))?;
        let mut e = self.identity();
        e.central = idx;
        Ok(e)
    }

    /// Wrap a unitriangular matrix.
    pub fn from_unitriangular(&self, u: Mat) -> Result<DeformedElem, DeformError> {
        if !matgroup::in_family(&self.ring, &u, &GroupFamily::Ut)? {
            return Err(DeformError::SpecMismatch);
        }
        Ok(DeformedElem {
            u,
            ..self.identity()
        })
    }

    /// Conjugation action of the torus part on a unitriangular matrix:
    /// entry `(i,j)` is scaled by `a_i^{-1} a_j` where `a` is the
    /// diagonal read of the torus coordinates (the coordinate for row `n`
    /// is 1; the central coordinate acts trivially).
    fn act(&self, torus: &[u16], u: &Mat) -> Mat {
        let n = self.n;
        let one = self.one_idx();
        let mut out = u.clone();
        for i in 0..n {
            for j in (i + 1)..n {
                let ai = if i < n - 1 { torus[i] } else { one };
                let aj = if j < n - 1 { torus[j] } else { one };
                let factor = self.umul(self.uinv(ai), aj);
                if factor != one {
                    let v = self.ring.mul(u.at(i, j), &self.units[factor as usize]);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    fn check_member(&self, x: &DeformedElem) -> Result<(), DeformError> {
        if x.torus.len() != self.n - 1
            || x.torus.iter().any(|&t| t as usize >= self.units.len())
            || x.central as usize >= self.units.len()
            || x.u.n() != self.n
        {
            return Err(DeformError::SpecMismatch);
        }
        Ok(())
    }

    /// Product in the normal form: torus coordinates multiply pointwise,
    /// the central coordinate picks up the cocycle values
    /// `f_i(a_i, a'_i)`, and the left unitriangular part is conjugated
    /// through the right torus before multiplying.
    pub fn mul(&self, x: &DeformedElem, y: &DeformedElem) -> Result<DeformedElem, DeformError> {
        self.check_member(x)?;
        self.check_member(y)?;
        let k = self.units.len();
        let mut torus = Vec::with_capacity(self.n - 1);
        let mut central = self.umul(x.central, y.central);
        for (i, (&a, &b)) in x.torus.iter().zip(&y.torus).enumerate() {
            torus.push(self.umul(a, b));
            central = self.umul(central, self.cocycles[i].table[a as usize * k + b as usize]);
        }
        let ux = self.act(&y.torus, &x.u);
        let u = matgroup::mat_mul(&self.ring, &ux, &y.u);
        Ok(DeformedElem { torus, central, u })
    }

    pub fn inv(&self, x: &DeformedElem) -> Result<DeformedElem, DeformError> {
        self.check_member(x)?;
        let k = self.units.len();
        let mut torus = Vec::with_capacity(self.n - 1);
        let mut central = self.uinv(x.central);
        for (i, &a) in x.torus.iter().enumerate() {
            let ai = self.uinv(a);
            torus.push(ai);
            // correction so that e * e^{-1} has trivial central part
            let fv = self.cocycles[i].table[a as usize * k + ai as usize];
            central = self.umul(central, self.uinv(fv));
        }
        let u_inv = matgroup::mat_inv(&self.ring, &x.u)?;
        let u = self.act(&torus, &u_inv);
        Ok(DeformedElem { torus, central, u })
    }

    pub fn commutator(
        &self,
        x: &DeformedElem,
        y: &DeformedElem,
    ) -> Result<DeformedElem, DeformError> {
        let xi = self.inv(x)?;
        let yi = self.inv(y)?;
        self.mul(&self.mul(&xi, &yi)?, &self.mul(x, y)?)
    }

    pub fn order(&self) -> usize {
        let k = self.units.len();
        let pairs = self.n * (self.n - 1) / 2;
        let r = self.ring.size().expect("finite") as usize;
        k.pow(self.n as u32) * r.pow(pairs as u32)
    }

    /// The coordinate reading of an element as an invertible triangular
    /// matrix (`diag(a_1 z, ..., a_{n-1} z, z) * u`). With every cocycle
    /// trivial this is a group isomorphism onto the triangular group.
    pub fn to_matrix(&self, x: &DeformedElem) -> Result<Mat, DeformError> {
        self.check_member(x)?;
        let zeta = &self.units[x.central as usize];
        let mut diag_params = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let base = if i < self.n - 1 {
                self.units[x.torus[i] as usize].clone()
            } else {
                self.ring.one()
            };
            diag_params.push(self.ring.mul(&base, zeta));
        }
        let d = matgroup::diag(&self.ring, &diag_params);
        Ok(matgroup::mat_mul(&self.ring, &d, &x.u))
    }
}

// ---------------------------------------------------------------------
// Packed engine
// ---------------------------------------------------------------------

/// Index-based engine for exhaustive scans over a deformed group:
/// elements are `torus_index * |UT| + ut_index`, and multiplication is a
/// handful of table lookups.
pub struct PackedGroup<'a> {
    pub group: &'a DeformedGroup,
    pub ut_mats: Vec<Mat>,
    ut_index: HashMap<Mat, u32>,
    pub torus_count: usize,
    ut_mul: Vec<u32>,
    torus_mul: Vec<u32>,
    torus_inv: Vec<u32>,
    ut_inv: Vec<u32>,
    /// `act[torus][u]`: index of the conjugate of `u` through the torus.
    act: Vec<u32>,
}

impl<'a> PackedGroup<'a> {
    pub fn build(group: &'a DeformedGroup) -> Result<Self, DeformError> {
        let order = group.order();
        if order > CLOSURE_CAP {
            return Err(DeformError::CapExceeded(order, CLOSURE_CAP));
        }
        let ring = &group.ring;
        let ut_mats: Vec<Mat> =
            matgroup::enumerate_group(ring, group.n, &GroupFamily::Ut)?.collect();
        let m = ut_mats.len();
        let ut_index: HashMap<Mat, u32> = ut_mats
            .iter()
            .enumerate()
            .map(|(i, u)| (u.clone(), i as u32))
            .collect();
        let mut ut_mul = vec![0u32; m * m];
        for i in 0..m {
            for j in 0..m {
                ut_mul[i * m + j] = ut_index[&matgroup::mat_mul(ring, &ut_mats[i], &ut_mats[j])];
            }
        }
        let mut ut_inv = vec![0u32; m];
        for (i, item) in ut_inv.iter_mut().enumerate() {
            *item = ut_index[&matgroup::mat_inv(ring, &ut_mats[i])?];
        }
        let k = group.units.len();
        let torus_count = k.pow(group.n as u32);
        let decode = |mut t: usize| {
            let mut coords = Vec::with_capacity(group.n);
            for _ in 0..group.n {
                coords.push((t % k) as u16);
                t /= k;
            }
            coords
        };
        let torus_elem = |coords: &[u16]| DeformedElem {
            torus: coords[..group.n - 1].to_vec(),
            central: coords[group.n - 1],
            u: matgroup::identity(ring, group.n),
        };
        let mut torus_mul = vec![0u32; torus_count * torus_count];
        let mut torus_inv = vec![0u32; torus_count];
        for ti in 0..torus_count {
            let ci = decode(ti);
            let xi = torus_elem(&ci);
            torus_inv[ti] = Self::encode_torus(k, &group.inv(&xi)?) as u32;
            for tj in 0..torus_count {
                let xj = torus_elem(&decode(tj));
                let prod = group.mul(&xi, &xj)?;
                torus_mul[ti * torus_count + tj] = Self::encode_torus(k, &prod) as u32;
            }
        }
        let mut act = vec![0u32; torus_count * m];
        for ti in 0..torus_count {
            let coords = decode(ti);
            for (ui, u) in ut_mats.iter().enumerate() {
                let conj = group.act(&coords[..group.n - 1], u);
                act[ti * m + ui] = ut_index[&conj];
            }
        }
        Ok(PackedGroup {
            group,
            ut_mats,
            ut_index,
            torus_count,
            ut_mul,
            torus_mul,
            torus_inv,
            ut_inv,
            act,
        })
    }

    fn encode_torus(k: usize, x: &DeformedElem) -> usize {
        let mut idx = 0usize;
        let mut mult = 1usize;
        for &c in &x.torus {
            idx += c as usize * mult;
            mult *= k;
        }
        idx + x.central as usize * mult
    }

    pub fn size(&self) -> usize {
        self.torus_count * self.ut_mats.len()
    }

    pub fn id_of(&self, x: &DeformedElem) -> u32 {
        let k = self.group.units.len();
        (Self::encode_torus(k, x) * self.ut_mats.len() + self.ut_index[&x.u] as usize) as u32
    }

    pub fn elem_of(&self, id: u32) -> DeformedElem {
        let m = self.ut_mats.len();
        let (ti, ui) = (id as usize / m, id as usize % m);
        let k = self.group.units.len();
        let mut t = ti;
        let mut coords = Vec::with_capacity(self.group.n);
        for _ in 0..self.group.n {
            coords.push((t % k) as u16);
            t /= k;
        }
        DeformedElem {
            torus: coords[..self.group.n - 1].to_vec(),
            central: coords[self.group.n - 1],
            u: self.ut_mats[ui].clone(),
        }
    }

    pub fn identity_id(&self) -> u32 {
        self.id_of(&self.group.identity())
    }

    #[inline]
    pub fn mul_id(&self, a: u32, b: u32) -> u32 {
        let m = self.ut_mats.len();
        let (ta, ua) = (a as usize / m, a as usize % m);
        let (tb, ub) = (b as usize / m, b as usize % m);
        let t = self.torus_mul[ta * self.torus_count + tb] as usize;
        let ua_conj = self.act[tb * m + ua] as usize;
        let u = self.ut_mul[ua_conj * m + ub] as usize;
        (t * m + u) as u32
    }

    #[inline]
    pub fn inv_id(&self, a: u32) -> u32 {
        let m = self.ut_mats.len();
        let (ta, ua) = (a as usize / m, a as usize % m);
        let ti = self.torus_inv[ta] as usize;
        let u = self.act[ti * m + self.ut_inv[ua] as usize] as usize;
        (ti * m + u) as u32
    }

    /// Closure of an id set under products.
    pub fn product_closure(&self, generators: &[u32]) -> Vec<u32> {
        let mut member = vec![false; self.size()];
        let mut queue: VecDeque<u32> = VecDeque::new();
        for &g in generators {
            if !member[g as usize] {
                member[g as usize] = true;
                queue.push_back(g);
            }
        }
        while let Some(x) = queue.pop_front() {
            for &g in generators {
                let next = self.mul_id(x, g);
                if !member[next as usize] {
                    member[next as usize] = true;
                    queue.push_back(next);
                }
            }
        }
        (0..self.size() as u32)
            .filter(|&i| member[i as usize])
            .collect()
    }

    /// All pairwise commutators, then closure under products.
    pub fn derived_subgroup(&self) -> Vec<u32> {
        let size = self.size() as u32;
        let inv: Vec<u32> = (0..size).map(|i| self.inv_id(i)).collect();
        let mut seen = vec![false; size as usize];
        let mut commutators = Vec::new();
        for x in 0..size {
            let xi = inv[x as usize];
            for y in 0..size {
                let c = self.mul_id(self.mul_id(xi, inv[y as usize]), self.mul_id(x, y));
                if !seen[c as usize] {
                    seen[c as usize] = true;
                    commutators.push(c);
                }
            }
        }
        self.product_closure(&commutators)
    }

    /// `sqrt(G') = {x : x^2 in G'}` over the packed ids.
    pub fn sqrt_derived(&self) -> Vec<u32> {
        let derived = self.derived_subgroup();
        let mut in_derived = vec![false; self.size()];
        for &d in &derived {
            in_derived[d as usize] = true;
        }
        (0..self.size() as u32)
            .filter(|&x| in_derived[self.mul_id(x, x) as usize])
            .collect()
    }

    /// Brute-force center: prefilter against a generating set, then
    /// verify candidates against every element.
    pub fn center(&self) -> Result<Vec<u32>, DeformError> {
        let gens = self.generator_ids()?;
        let size = self.size() as u32;
        let mut out = Vec::new();
        'outer: for x in 0..size {
            for &g in &gens {
                if self.mul_id(x, g) != self.mul_id(g, x) {
                    continue 'outer;
                }
            }
            for y in 0..size {
                if self.mul_id(x, y) != self.mul_id(y, x) {
                    continue 'outer;
                }
            }
            out.push(x);
        }
        Ok(out)
    }

    fn generator_ids(&self) -> Result<Vec<u32>, DeformError> {
        let g = self.group;
        let mut out = Vec::new();
        for i in 1..=g.n {
            for j in (i + 1)..=g.n {
                for s in 1..=g.ring.degree() {
                    out.push(self.id_of(&g.transvection(i, j, &g.ring.basis(s))?));
                }
            }
        }
        for i in 1..=g.n {
            for u in g.units.clone() {
                out.push(self.id_of(&g.dilation(i, &u)?));
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------
// Verification reports
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct RelationCheck {
    pub name: String,
    pub ok: bool,
    pub checked: usize,
    pub counterexample: Option<String>,
}

/// Exhaustive check of the five defining relations over the generators'
/// parameter ranges. Relation 5 is checked in conjugation form
/// (`d_k(a)^{-1} t_ij(b) d_k(a)` with the group inverse); the printed
/// shorthand `d_k(a^{-1}) t_ij(b) d_k(a)` is reported separately since
/// the two differ by a central cocycle value when `f_k(a, a^{-1}) != 1`.
pub fn verify_presentation(group: &DeformedGroup) -> Result<Vec<RelationCheck>, DeformError> {
    let ring = &group.ring;
    let n = group.n;
    let elems: Vec<RingElem> = ring.enumerate_elements()?.collect();
    let units = group.units.clone();
    let k = units.len();
    let mut out = Vec::new();

    // relation 1: t_ij(a) t_ij(b) = t_ij(a+b)
    {
        let mut check = RelationCheck {
            name: "additivity of transvections".into(),
            ok: true,
            checked: 0,
            counterexample: None,
        };
        'r1: for i in 1..=n {
            for j in (i + 1)..=n {
                for a in &elems {
                    for b in &elems {
                        let lhs = group.mul(
                            &group.transvection(i, j, a)?,
                            &group.transvection(i, j, b)?,
                        )?;
                        let rhs = group.transvection(i, j, &ring.add(a, b))?;
                        check.checked += 1;
                        if lhs != rhs {
                            check.ok = false;
                            check.counterexample = Some(format!(
                                "t_{i}{j}({}) t_{i}{j}({})",
                                ring.render(a),
                                ring.render(b)
                            ));
                            break 'r1;
                        }
                    }
                }
            }
        }
        out.push(check);
    }

    // relation 2: commutator cases among upper transvections
    {
        let mut check = RelationCheck {
            name: "transvection commutators".into(),
            ok: true,
            checked: 0,
            counterexample: None,
        };
        'r2: for i in 1..=n {
            for j in (i + 1)..=n {
                for kk in 1..=n {
                    for l in (kk + 1)..=n {
                        if j == kk && i == l {
                            continue;
                        }
                        for a in &elems {
                            for b in &elems {
                                let x = group.transvection(i, j, a)?;
                                let y = group.transvection(kk, l, b)?;
                                let c = group.commutator(&x, &y)?;
                                let want = if j == kk {
                                    group.transvection(i, l, &ring.mul(a, b))?
                                } else if i == l {
                                    group.transvection(kk, j, &ring.neg(&ring.mul(a, b)))?
                                } else {
                                    group.identity()
                                };
                                check.checked += 1;
                                if c != want {
                                    check.ok = false;
                                    check.counterexample =
                                        Some(format!("[t_{i}{j}, t_{kk}{l}]"));
                                    break 'r2;
                                }
                            }
                        }
                    }
                }
            }
        }
        out.push(check);
    }

    // relation 3: d_i(a) d_i(b) = d_i(ab) diag(f_i(a,b)), i <= n-1
    {
        let mut check = RelationCheck {
            name: "dilation products twist by the cocycle".into(),
            ok: true,
            checked: 0,
            counterexample: None,
        };
        'r3: for i in 1..n {
            for a in &units {
                for b in &units {
                    let lhs = group.mul(&group.dilation(i, a)?, &group.dilation(i, b)?)?;
                    let ai = group.unit_index[a] as usize;
                    let bi = group.unit_index[b] as usize;
                    let fv = group.cocycles[i - 1].table[ai * k + bi];
                    let rhs = group.mul(
                        &group.dilation(i, &ring.mul(a, b))?,
                        &group.central(&group.units[fv as usize].clone())?,
                    )?;
                    check.checked += 1;
                    if lhs != rhs {
                        check.ok = false;
                        check.counterexample = Some(format!(
                            "d_{i}({}) d_{i}({})",
                            ring.render(a),
                            ring.render(b)
                        ));
                        break 'r3;
                    }
                }
            }
        }
        out.push(check);
    }

    // relation 4: [d_i(a), d_j(b)] = 1, including d_n
    {
        let mut check = RelationCheck {
            name: "dilations commute".into(),
            ok: true,
            checked: 0,
            counterexample: None,
        };
        'r4: for i in 1..=n {
            for j in 1..=n {
                for a in &units {
                    for b in &units {
                        let c =
                            group.commutator(&group.dilation(i, a)?, &group.dilation(j, b)?)?;
                        check.checked += 1;
                        if c != group.identity() {
                            check.ok = false;
                            check.counterexample = Some(format!(
                                "[d_{i}({}), d_{j}({})]",
                                ring.render(a),
                                ring.render(b)
                            ));
                            break 'r4;
                        }
                    }
                }
            }
        }
        out.push(check);
    }

    // relation 5, conjugation form
    {
        let mut check = RelationCheck {
            name: "torus conjugation scales transvections".into(),
            ok: true,
            checked: 0,
            counterexample: None,
        };
        'r5: for kk in 1..=n {
            for i in 1..=n {
                for j in (i + 1)..=n {
                    for a in &units {
                        for b in &elems {
                            let d = group.dilation(kk, a)?;
                            let t = group.transvection(i, j, b)?;
                            let got = group.mul(&group.mul(&group.inv(&d)?, &t)?, &d)?;
                            let want_param = if kk == i {
                                ring.mul(&ring.inverse(a)?, b)
                            } else if kk == j {
                                ring.mul(a, b)
                            } else {
                                b.clone()
                            };
                            let want = group.transvection(i, j, &want_param)?;
                            check.checked += 1;
                            if got != want {
                                check.ok = false;
                                check.counterexample = Some(format!(
                                    "d_{kk}({})^-1 t_{i}{j}({}) d_{kk}({})",
                                    ring.render(a),
                                    ring.render(b),
                                    ring.render(a)
                                ));
                                break 'r5;
                            }
                        }
                    }
                }
            }
        }
        out.push(check);
    }

    // the printed shorthand with d_k(a^{-1}) in place of the inverse
    {
        let mut check = RelationCheck {
            name: "printed shorthand d_k(a^-1) t d_k(a) (informational)".into(),
            ok: true,
            checked: 0,
            counterexample: None,
        };
        'r5s: for kk in 1..n {
            for i in 1..=n {
                for j in (i + 1)..=n {
                    for a in &units {
                        for b in &elems {
                            let d = group.dilation(kk, a)?;
                            let d_inv_param = group.dilation(kk, &ring.inverse(a)?)?;
                            let got = group
                                .mul(&group.mul(&d_inv_param, &group.transvection(i, j, b)?)?, &d)?;
                            let want_param = if kk == i {
                                ring.mul(&ring.inverse(a)?, b)
                            } else if kk == j {
                                ring.mul(a, b)
                            } else {
                                b.clone()
                            };
                            let want = group.transvection(i, j, &want_param)?;
                            check.checked += 1;
                            if got != want {
                                check.ok = false;
                                check.counterexample = Some(format!(
                                    "d_{kk}({}^-1) t_{i}{j}({}) d_{kk}({})",
                                    ring.render(a),
                                    ring.render(b),
                                    ring.render(a)
                                ));
                                break 'r5s;
                            }
                        }
                    }
                }
            }
        }
        out.push(check);
    }

    Ok(out)
}

#[derive(Debug, Clone)]
pub struct DerivedLemmaReport {
    pub group_order: usize,
    pub derived_order: usize,
    pub generated_order: usize,
    pub equal: bool,
}

/// The derived subgroup by brute commutator closure equals the closure
/// of the literal generator set
/// `X = {t_{i,i+1}((1-a)b)} ∪ {t_kl(b) : l-k >= 2}`.
pub fn verify_derived_lemma(group: &DeformedGroup) -> Result<DerivedLemmaReport, DeformError> {
    let packed = PackedGroup::build(group)?;
    let derived = packed.derived_subgroup();
    let ring = &group.ring;
    let mut x_ids = Vec::new();
    for i in 1..group.n {
        for alpha in &group.units.clone() {
            let one_minus = ring.sub(&ring.one(), alpha);
            for beta in ring.enumerate_elements()? {
                let p = ring.mul(&one_minus, &beta);
                x_ids.push(packed.id_of(&group.transvection(i, i + 1, &p)?));
            }
        }
    }
    for k in 1..=group.n {
        for l in (k + 2)..=group.n {
            for beta in ring.enumerate_elements()? {
                x_ids.push(packed.id_of(&group.transvection(k, l, &beta)?));
            }
        }
    }
    x_ids.sort_unstable();
    x_ids.dedup();
    let generated = packed.product_closure(&x_ids);
    Ok(DerivedLemmaReport {
        group_order: packed.size(),
        derived_order: derived.len(),
        generated_order: generated.len(),
        equal: derived == generated,
    })
}

#[derive(Debug, Clone)]
pub struct CenterReport {
    pub group_order: usize,
    pub brute_order: usize,
    pub central_coordinate_order: usize,
    pub equal: bool,
    /// An element of the symmetric difference, if any.
    pub witness: Option<DeformedElem>,
}

/// Brute-force center against the central-coordinate subgroup
/// `{diag(a)}`. Over rings with trivial units the brute center can be
/// strictly larger (the unitriangular center survives).
pub fn center_of_deformed(group: &DeformedGroup) -> Result<CenterReport, DeformError> {
    let packed = PackedGroup::build(group)?;
    let brute = packed.center()?;
    let mut central = Vec::new();
    for u in group.units.clone() {
        central.push(packed.id_of(&group.central(&u)?));
    }
    central.sort_unstable();
    let equal = brute == central;
    let witness = if equal {
        None
    } else {
        brute
            .iter()
            .find(|id| central.binary_search(id).is_err())
            .or_else(|| central.iter().find(|id| brute.binary_search(id).is_err()))
            .map(|&id| packed.elem_of(id))
    };
    Ok(CenterReport {
        group_order: packed.size(),
        brute_order: brute.len(),
        central_coordinate_order: central.len(),
        equal,
        witness,
    })
}

/// How associativity was established for the axiom report.
#[derive(Debug, Clone)]
pub enum AssocCheck {
    /// All `|G|^3` triples.
    Exhaustive { triples: usize },
    /// Factor-exhaustive: torus and unitriangular triples in full, the
    /// torus action verified to be a homomorphism into automorphisms,
    /// plus a seeded sample of full triples.
    Factored {
        torus_triples: usize,
        ut_triples: usize,
        action_automorphism_checks: usize,
        action_homomorphism_checks: usize,
        sampled_triples: usize,
    },
}

#[derive(Debug, Clone)]
pub struct GroupAxiomReport {
    pub order: usize,
    pub identity_ok: bool,
    pub inverses_ok: bool,
    pub closure_ok: bool,
    pub assoc_ok: bool,
    pub assoc: AssocCheck,
    /// Packed-engine products agree with the normal-form products.
    pub packed_matches_direct: bool,
}

/// Exhaustive group-axiom verification. Associativity over all triples
/// when `|G|^3` fits the budget, otherwise factor-exhaustive plus a
/// seeded random sample.
pub fn verify_group_axioms(
    group: &DeformedGroup,
    triple_budget: u64,
    seed: u64,
) -> Result<GroupAxiomReport, DeformError> {
    let packed = PackedGroup::build(group)?;
    let size = packed.size();
    let id = packed.identity_id();

    let mut identity_ok = true;
    let mut inverses_ok = true;
    for x in 0..size as u32 {
        if packed.mul_id(x, id) != x || packed.mul_id(id, x) != x {
            identity_ok = false;
        }
        let xi = packed.inv_id(x);
        if packed.mul_id(x, xi) != id || packed.mul_id(xi, x) != id {
            inverses_ok = false;
        }
    }

    // closure over all pairs: every product id is a valid element id
    let mut closure_ok = true;
    for x in 0..size as u32 {
        for y in 0..size as u32 {
            if packed.mul_id(x, y) as usize >= size {
                closure_ok = false;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut packed_matches_direct = true;
    if (size as u64) * (size as u64) <= 200_000 {
        for x in 0..size as u32 {
            for y in 0..size as u32 {
                let d = group.mul(&packed.elem_of(x), &packed.elem_of(y))?;
                if packed.id_of(&d) != packed.mul_id(x, y) {
                    packed_matches_direct = false;
                }
            }
        }
    } else {
        for _ in 0..50_000 {
            let x = rng.gen_range(0..size) as u32;
            let y = rng.gen_range(0..size) as u32;
            let d = group.mul(&packed.elem_of(x), &packed.elem_of(y))?;
            if packed.id_of(&d) != packed.mul_id(x, y) {
                packed_matches_direct = false;
            }
        }
    }

    let mut assoc_ok = true;
    let assoc = if (size as u64).pow(3) <= triple_budget {
        let mut triples = 0usize;
        for x in 0..size as u32 {
            for y in 0..size as u32 {
                let xy = packed.mul_id(x, y);
                for z in 0..size as u32 {
                    triples += 1;
                    if packed.mul_id(xy, z) != packed.mul_id(x, packed.mul_id(y, z)) {
                        assoc_ok = false;
                    }
                }
            }
        }
        AssocCheck::Exhaustive { triples }
    } else {
        let m = packed.ut_mats.len();
        let tc = packed.torus_count;
        let mut torus_triples = 0usize;
        for a in 0..tc {
            for b in 0..tc {
                let ab = packed.torus_mul[a * tc + b] as usize;
                for c in 0..tc {
                    torus_triples += 1;
                    let bc = packed.torus_mul[b * tc + c] as usize;
                    if packed.torus_mul[ab * tc + c] != packed.torus_mul[a * tc + bc] {
                        assoc_ok = false;
                    }
                }
            }
        }
        let mut ut_triples = 0usize;
        for a in 0..m {
            for b in 0..m {
                let ab = packed.ut_mul[a * m + b] as usize;
                for c in 0..m {
                    ut_triples += 1;
                    let bc = packed.ut_mul[b * m + c] as usize;
                    if packed.ut_mul[ab * m + c] != packed.ut_mul[a * m + bc] {
                        assoc_ok = false;
                    }
                }
            }
        }
        // the torus acts by automorphisms
        let mut action_automorphism_checks = 0usize;
        for t in 0..tc {
            for a in 0..m {
                let ta = packed.act[t * m + a] as usize;
                for b in 0..m {
                    action_automorphism_checks += 1;
                    let tb = packed.act[t * m + b] as usize;
                    let ab = packed.ut_mul[a * m + b] as usize;
                    if packed.act[t * m + ab] != packed.ut_mul[ta * m + tb] {
                        assoc_ok = false;
                    }
                }
            }
        }
        // and acting is a homomorphism: act(t1*t2) = act(t2) after act(t1)
        let mut action_homomorphism_checks = 0usize;
        for t1 in 0..tc {
            for t2 in 0..tc {
                let t12 = packed.torus_mul[t1 * tc + t2] as usize;
                for a in 0..m {
                    action_homomorphism_checks += 1;
                    let step = packed.act[t1 * m + a] as usize;
                    if packed.act[t12 * m + a] != packed.act[t2 * m + step] {
                        assoc_ok = false;
                    }
                }
            }
        }
        let sampled_triples = 200_000usize;
        for _ in 0..sampled_triples {
            let x = rng.gen_range(0..size) as u32;
            let y = rng.gen_range(0..size) as u32;
            let z = rng.gen_range(0..size) as u32;
            if packed.mul_id(packed.mul_id(x, y), z) != packed.mul_id(x, packed.mul_id(y, z)) {
                assoc_ok = false;
            }
        }
        AssocCheck::Factored {
            torus_triples,
            ut_triples,
            action_automorphism_checks,
            action_homomorphism_checks,
            sampled_triples,
        }
    };

    Ok(GroupAxiomReport {
        order: size,
        identity_ok,
        inverses_ok,
        closure_ok,
        assoc_ok,
        assoc,
        packed_matches_direct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zmod(m: i64) -> RingSpec {
        RingSpec::modular(m).unwrap()
    }

    fn trivial_group(m: i64) -> DeformedGroup {
        DeformedGroup::new(zmod(m), 3, vec![CocycleSpec::Trivial; 2]).unwrap()
    }

    fn twisted_group(m: i64) -> DeformedGroup {
        DeformedGroup::new(
            zmod(m),
            3,
            vec![CocycleSpec::Class(1), CocycleSpec::Trivial],
        )
        .unwrap()
    }

    #[test]
    fn construction_and_sizes() {
        let g = trivial_group(3);
        assert_eq!(g.order(), 216); // units^3 * 3^3
        let g5 = trivial_group(5);
        assert_eq!(g5.order(), 8000);
        assert!(
            DeformedGroup::new(RingSpec::integers(), 3, vec![CocycleSpec::Trivial; 2]).is_err()
        );
        assert!(DeformedGroup::new(zmod(3), 2, vec![CocycleSpec::Trivial]).is_err());
        assert!(DeformedGroup::new(zmod(3), 3, vec![CocycleSpec::Trivial]).is_err());
    }

    #[test]
    fn cocycle_classes_on_small_unit_groups() {
        // units of Z/3 form a 2-element group: two classes
        let g = trivial_group(3);
        let reps = g.cocycle_class_reps().unwrap();
        assert_eq!(reps.len(), 2);
        // units of Z/5 are cyclic of order 4: four classes
        let g5 = trivial_group(5);
        let reps5 = g5.cocycle_class_reps().unwrap();
        assert_eq!(reps5.len(), 4);
        for (i, a) in reps5.iter().enumerate() {
            for b in reps5.iter().skip(i + 1) {
                assert!(!g5.cohomologous(a, b));
            }
        }
        assert!(matches!(
            DeformedGroup::new(zmod(5), 3, vec![CocycleSpec::Class(7), CocycleSpec::Trivial]),
            Err(DeformError::UnknownClass(7, 4))
        ));
    }

    #[test]
    fn class_zero_is_trivial() {
        for m in [3i64, 5, 7] {
            let g = DeformedGroup::new(
                zmod(m),
                3,
                vec![CocycleSpec::Class(0), CocycleSpec::Trivial],
            )
            .unwrap();
            let one = g.one_idx();
            assert!(g.cocycles[0].table.iter().all(|&v| v == one));
        }
    }

    #[test]
    fn undeformed_multiplication_matches_matrix_group() {
        // with trivial cocycles the coordinate map is an isomorphism onto
        // T_3(Z/3), checked exhaustively on all pairs
        let g = trivial_group(3);
        let packed = PackedGroup::build(&g).unwrap();
        let size = packed.size();
        assert_eq!(size, 216);
        let mut images = HashSet::new();
        for id in 0..size as u32 {
            let m = g.to_matrix(&packed.elem_of(id)).unwrap();
            assert!(matgroup::in_family(&g.ring, &m, &GroupFamily::T).unwrap());
            assert!(images.insert(m));
        }
        for x in 0..size as u32 {
            for y in 0..size as u32 {
                let prod = packed.mul_id(x, y);
                let lhs = g.to_matrix(&packed.elem_of(prod)).unwrap();
                let rhs = matgroup::mat_mul(
                    &g.ring,
                    &g.to_matrix(&packed.elem_of(x)).unwrap(),
                    &g.to_matrix(&packed.elem_of(y)).unwrap(),
                );
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn torus_twist_reads_off_the_table() {
        // pure torus times pure torus picks up f_1(a, a')
        let g = twisted_group(3);
        let two = g.ring.int(2);
        let d = g.dilation(1, &two).unwrap();
        let prod = g.mul(&d, &d).unwrap();
        let ai = g.unit_idx(&two).unwrap() as usize;
        let f = g.cocycles[0].table[ai * g.unit_count() + ai];
        assert_eq!(prod.torus, vec![g.one_idx(); 2]);
        assert_eq!(prod.central, f);
        // for the nontrivial class on a 2-element unit group, f(2,2) != 1
        assert_ne!(g.units()[f as usize], g.ring.one());
    }

    #[test]
    fn inverses_and_commutators() {
        for g in [trivial_group(3), twisted_group(3), twisted_group(5)] {
            let id = g.identity();
            assert_eq!(g.inv(&id).unwrap(), id);
            let two = g.ring.int(2);
            let x = g
                .mul(
                    &g.dilation(1, &two).unwrap(),
                    &g.transvection(1, 3, &g.ring.int(1)).unwrap(),
                )
                .unwrap();
            assert_eq!(g.mul(&x, &g.inv(&x).unwrap()).unwrap(), id);
            assert_eq!(g.mul(&g.inv(&x).unwrap(), &x).unwrap(), id);
            assert_eq!(g.commutator(&x, &x).unwrap(), id);
        }
    }

    #[test]
    fn presentation_relations_hold() {
        for g in [trivial_group(3), twisted_group(3)] {
            let checks = verify_presentation(&g).unwrap();
            for c in checks.iter().take(5) {
                assert!(c.ok, "{} failed: {:?}", c.name, c.counterexample);
                assert!(c.checked > 0);
            }
            // the printed shorthand holds iff the twist is trivial on
            // inverse pairs
            let shorthand = &checks[5];
            let trivial = g.cocycles.iter().all(|f| {
                (0..g.unit_count())
                    .all(|a| f.value_idx(a, g.uinv(a as u16) as usize) == g.one_idx() as usize)
            });
            assert_eq!(shorthand.ok, trivial);
        }
    }

    #[test]
    fn derived_lemma_small_cases() {
        // T_3(Z/3), trivial: G' = UT_3 (27 elements)
        let rep = verify_derived_lemma(&trivial_group(3)).unwrap();
        assert!(rep.equal);
        assert_eq!(rep.group_order, 216);
        assert_eq!(rep.derived_order, 27);
        // nontrivial twist: the lemma holds for any cocycles
        let rep = verify_derived_lemma(&twisted_group(3)).unwrap();
        assert!(rep.equal);
        assert_eq!(rep.derived_order, 27);
    }

    #[test]
    fn center_reports() {
        // Z/3 trivial: center = central coordinate = units (order 2)
        let rep = center_of_deformed(&trivial_group(3)).unwrap();
        assert!(rep.equal);
        assert_eq!(rep.brute_order, 2);
        // Z/3 twisted: still the central coordinate subgroup
        let rep = center_of_deformed(&twisted_group(3)).unwrap();
        assert!(rep.equal);
        // Z/2: units are trivial, the group is UT_3(Z/2) and its center
        // is T_13 (order 2), strictly bigger than the trivial central
        // coordinate subgroup
        let rep = center_of_deformed(&trivial_group(2)).unwrap();
        assert!(!rep.equal);
        assert_eq!(rep.brute_order, 2);
        assert_eq!(rep.central_coordinate_order, 1);
        assert!(rep.witness.is_some());
    }

    #[test]
    fn axioms_exhaustive_z3() {
        for g in [trivial_group(3), twisted_group(3)] {
            let rep = verify_group_axioms(&g, 20_000_000, crate::DEFAULT_SEED).unwrap();
            assert!(rep.identity_ok && rep.inverses_ok && rep.closure_ok && rep.assoc_ok);
            assert!(rep.packed_matches_direct);
            assert!(
                matches!(rep.assoc, AssocCheck::Exhaustive { triples } if triples == 216usize.pow(3))
            );
        }
    }

    #[test]
    fn sqrt_derived_contains_unitriangulars() {
        // trivial twist: sqrt(G') contains G_u and all the d_i; with a
        // nontrivial twist d_1 squares to a central value outside G'
        let g = trivial_group(3);
        let packed = PackedGroup::build(&g).unwrap();
        let sqrt: HashSet<u32> = packed.sqrt_derived().into_iter().collect();
        for u in packed.ut_mats.clone() {
            let id = packed.id_of(&g.from_unitriangular(u).unwrap());
            assert!(sqrt.contains(&id));
        }
        let minus_one = g.ring.int(-1);
        for i in 1..=3 {
            let id = packed.id_of(&g.dilation(i, &minus_one).unwrap());
            assert!(sqrt.contains(&id));
        }

        let g = twisted_group(3);
        let packed = PackedGroup::build(&g).unwrap();
        let sqrt: HashSet<u32> = packed.sqrt_derived().into_iter().collect();
        for u in packed.ut_mats.clone() {
            let id = packed.id_of(&g.from_unitriangular(u).unwrap());
            assert!(sqrt.contains(&id));
        }
        // f_1(-1,-1) = f_1(2,2) is the nontrivial value, so d_1 is out
        let d1 = packed.id_of(&g.dilation(1, &g.ring.int(-1)).unwrap());
        assert!(!sqrt.contains(&d1));
    }

    #[test]
    fn torus_quotient_by_center() {
        // E_n / central coordinate has order units^(n-1), and the same
        // exponent as the unit group
        let g = twisted_group(5);
        let k = g.unit_count();
        let packed = PackedGroup::build(&g).unwrap();
        assert_eq!(packed.torus_count, k.pow(3));
        let mut cosets = HashSet::new();
        for t in 0..packed.torus_count {
            let e = packed.elem_of((t * packed.ut_mats.len()) as u32);
            cosets.insert(e.torus.clone());
        }
        assert_eq!(cosets.len(), k.pow(2));
        // exponent of the quotient: least e with every coset^e trivial
        let unit_exponent = 4u32; // units of Z/5 are cyclic of order 4
        let one = g.one_idx();
        let mut exponent = 1u32;
        for t in 0..packed.torus_count {
            let base = packed.elem_of((t * packed.ut_mats.len()) as u32);
            let mut acc = g.identity();
            let mut ord = 0u32;
            loop {
                acc = g.mul(&acc, &base).unwrap();
                ord += 1;
                if acc.torus.iter().all(|&c| c == one) {
                    break;
                }
            }
            exponent = exponent.max(ord);
        }
        assert_eq!(exponent, unit_exponent);
    }

    #[test]
    fn closure_cap_enforced() {
        // Z/11: units^3 * 11^3 = 1.33M exceeds the cap
        let g = DeformedGroup::new(zmod(11), 3, vec![CocycleSpec::Trivial; 2]).unwrap();
        assert!(matches!(
            PackedGroup::build(&g),
            Err(DeformError::CapExceeded(_, _))
        ));
    }
}
