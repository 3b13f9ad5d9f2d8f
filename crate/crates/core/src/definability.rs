//! The definability constructions executed concretely: centralizer and
//! commutator identities for the one-parameter subgroups, the
//! multiplication interpreted on `T_1n`, the letter-wise map of
//! decomposition words into `T_1n`, the conjugation predicate for the
//! dilation subgroups, squared-subgroup identities, derived subgroups and
//! their square roots, and the audit of the 6-letter dilation identity.
//!
//! Every claim is verified two ways: a formula-driven computation using
//! only group operations and quantifier search over a finite model, and a
//! direct parameter computation. The comparison itself is the test.

use crate::matgroup::{
    self, centralizer, center, enumerate_group, in_family, sets_equal, set_difference_witness,
    GroupFamily, Mat, MatError,
};
use crate::rings::{RingElem, RingError, RingSpec};
use crate::words::{self, GenWord, Letter, WordError};
use std::collections::{HashMap, HashSet, VecDeque};

pub use crate::words::reconstruct_entries;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DefinabilityError {
    #[error("operation requires a finite ring")]
    InfiniteRing,
    #[error("family must be one of {0}")]
    BadFamily(&'static str),
    #[error("bad indices: {0}")]
    BadIndices(String),
    #[error("element is not in the one-parameter subgroup T_1n")]
    NotInT1n,
    #[error("witness search failed: {0}")]
    WitnessSearchFailed(String),
    #[error("word does not evaluate to the given matrix")]
    EvalMismatch,
    #[error("letter image is not in T_1n with the letter parameter: {0}")]
    PhiBroken(String),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Outcome of one set-identity check over a finite model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefinabilityReport {
    pub claim: String,
    pub instance: String,
    /// lhs size, rhs size (three entries for three-way identities).
    pub sizes: Vec<usize>,
    pub equal: bool,
    pub counterexample: Option<Mat>,
}

impl DefinabilityReport {
    fn from_sets(claim: &str, instance: String, lhs: &[Mat], rhs: &[Mat]) -> Self {
        let equal = sets_equal(lhs, rhs);
        let counterexample = if equal {
            None
        } else {
            set_difference_witness(lhs, rhs)
        };
        DefinabilityReport {
            claim: claim.to_string(),
            instance,
            sizes: vec![
                matgroup::canonical_set(lhs).len(),
                matgroup::canonical_set(rhs).len(),
            ],
            equal,
            counterexample,
        }
    }

    pub fn to_json(&self, spec: &RingSpec) -> serde_json::Value {
        let mut obj = serde_json::json!({
            "claim": self.claim,
            "instance": self.instance,
            "status": if self.equal { "equal" } else { "unequal" },
            "sizes": self.sizes,
        });
        if let Some(cx) = &self.counterexample {
            obj["counterexample"] = serde_json::json!(matgroup::render_mat(spec, cx));
        }
        obj
    }
}

fn require_finite(spec: &RingSpec) -> Result<(), DefinabilityError> {
    if spec.is_finite() {
        Ok(())
    } else {
        Err(DefinabilityError::InfiniteRing)
    }
}

/// `T_kl = {t_kl(a) : a in R}` as a literal set (finite rings).
pub fn one_param_subgroup(
    spec: &RingSpec,
    n: usize,
    k: usize,
    l: usize,
) -> Result<Vec<Mat>, DefinabilityError> {
    require_finite(spec)?;
    let mut out = Vec::new();
    for a in spec.enumerate_elements()? {
        out.push(matgroup::transvection(spec, n, k, l, &a)?);
    }
    Ok(out)
}

/// The center of the family group by parameter arithmetic: scalar
/// matrices with unit parameter, filtered by family membership (for `SL`
/// this is the determinant-one condition on the scalar).
pub fn parametric_center(
    spec: &RingSpec,
    n: usize,
    fam: &GroupFamily,
) -> Result<Vec<Mat>, DefinabilityError> {
    require_finite(spec)?;
    let mut out = Vec::new();
    for u in spec.enumerate_units()? {
        let s = matgroup::scalar_diag(spec, n, &u);
        if in_family(spec, &s, fam)? {
            out.push(s);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Centralizer / commutator identities
// ---------------------------------------------------------------------

/// `Z(C_G(t_kl)) = T_kl x Z(G)`: the left side by exhaustive centralizer
/// and center scans, the right side by parameter arithmetic.
pub fn verify_zc_lemma(
    spec: &RingSpec,
    n: usize,
    fam: &GroupFamily,
    k: usize,
    l: usize,
) -> Result<DefinabilityReport, DefinabilityError> {
    require_finite(spec)?;
    if !matches!(fam, GroupFamily::Sl | GroupFamily::Gl) {
        return Err(DefinabilityError::BadFamily("SL, GL"));
    }
    if k == l || k < 1 || l < 1 || k > n || l > n {
        return Err(DefinabilityError::BadIndices(format!("(k,l)=({k},{l})")));
    }
    let g: Vec<Mat> = enumerate_group(spec, n, fam)?.collect();
    let t = matgroup::transvection(spec, n, k, l, &spec.one())?;
    let cent = centralizer(spec, &g, &t);
    let lhs = center(spec, &cent);
    let rhs = matgroup::product_set(
        spec,
        &one_param_subgroup(spec, n, k, l)?,
        &parametric_center(spec, n, fam)?,
    );
    Ok(DefinabilityReport::from_sets(
        "zc-lemma",
        format!("{} {fam}_{n}, (k,l)=({k},{l})", spec.name()),
        &lhs,
        &rhs,
    ))
}

/// `T_kl = [Z(C_G(t_kj)), t_jl]`, or the mirrored form
/// `T_kl = [t_kj, Z(C_G(t_jl))]`.
pub fn verify_tkl_commutator(
    spec: &RingSpec,
    n: usize,
    fam: &GroupFamily,
    k: usize,
    l: usize,
    j: usize,
    mirrored: bool,
) -> Result<DefinabilityReport, DefinabilityError> {
    require_finite(spec)?;
    if j == k || j == l || k == l || [j, k, l].iter().any(|&v| v < 1 || v > n) {
        return Err(DefinabilityError::BadIndices(format!(
            "(k,l,j)=({k},{l},{j})"
        )));
    }
    let g: Vec<Mat> = enumerate_group(spec, n, fam)?.collect();
    let lhs = one_param_subgroup(spec, n, k, l)?;
    let t_kj = matgroup::transvection(spec, n, k, j, &spec.one())?;
    let t_jl = matgroup::transvection(spec, n, j, l, &spec.one())?;
    let rhs: Vec<Mat> = if !mirrored {
        let zc = center(spec, &centralizer(spec, &g, &t_kj));
        zc.iter()
            .map(|z| matgroup::commutator(spec, z, &t_jl))
            .collect::<Result<_, _>>()?
    } else {
        let zc = center(spec, &centralizer(spec, &g, &t_jl));
        zc.iter()
            .map(|z| matgroup::commutator(spec, &t_kj, z))
            .collect::<Result<_, _>>()?
    };
    let form = if mirrored { "mirrored" } else { "plain" };
    Ok(DefinabilityReport::from_sets(
        "tkl-commutator",
        format!("{} {fam}_{n}, (k,l,j)=({k},{l},{j}), {form}", spec.name()),
        &lhs,
        &rhs,
    ))
}

// ---------------------------------------------------------------------
// The ring interpreted on T_1n
// ---------------------------------------------------------------------

fn t1n_param(spec: &RingSpec, n: usize, x: &Mat) -> Result<RingElem, DefinabilityError> {
    let shape = matgroup::transvection(spec, n, 1, n, x.at(0, n - 1))?;
    if &shape != x {
        return Err(DefinabilityError::NotInT1n);
    }
    Ok(x.at(0, n - 1).clone())
}

/// Interpreted addition on `T_1n`: the group product.
pub fn malcev_add(spec: &RingSpec, x: &Mat, y: &Mat) -> Result<Mat, DefinabilityError> {
    let n = x.n();
    t1n_param(spec, n, x)?;
    t1n_param(spec, n, y)?;
    Ok(matgroup::mat_mul(spec, x, y))
}

/// Interpreted multiplication on `T_1n` through the middle index `j`:
/// the unique `z = [u, v]` with `u in T_1j`, `v in T_jn`, `[u, t_jn] = x`
/// and `[t_1j, v] = y`. Computed by parameter extraction, and confirmed
/// on finite rings by exhaustive witness search; the two must agree.
pub fn malcev_mul(spec: &RingSpec, x: &Mat, y: &Mat, j: usize) -> Result<Mat, DefinabilityError> {
    let n = x.n();
    if j <= 1 || j >= n {
        return Err(DefinabilityError::BadIndices(format!("middle index j={j}")));
    }
    let alpha = t1n_param(spec, n, x)?;
    let beta = t1n_param(spec, n, y)?;
    let direct = matgroup::transvection(spec, n, 1, n, &spec.mul(&alpha, &beta))?;

    if spec.is_finite() {
        let t_jn = matgroup::transvection(spec, n, j, n, &spec.one())?;
        let t_1j = matgroup::transvection(spec, n, 1, j, &spec.one())?;
        let mut u = None;
        for a in spec.enumerate_elements()? {
            let cand = matgroup::transvection(spec, n, 1, j, &a)?;
            if &matgroup::commutator(spec, &cand, &t_jn)? == x {
                u = Some(cand);
                break; // first witness in enumeration order
            }
        }
        let mut v = None;
        for b in spec.enumerate_elements()? {
            let cand = matgroup::transvection(spec, n, j, n, &b)?;
            if &matgroup::commutator(spec, &t_1j, &cand)? == y {
                v = Some(cand);
                break;
            }
        }
        let (u, v) = match (u, v) {
            (Some(u), Some(v)) => (u, v),
            _ => {
                return Err(DefinabilityError::WitnessSearchFailed(
                    "no commutator witness found".into(),
                ))
            }
        };
        let z = matgroup::commutator(spec, &u, &v)?;
        if z != direct {
            return Err(DefinabilityError::WitnessSearchFailed(
                "witness-search product disagrees with parameter extraction".into(),
            ));
        }
    }
    Ok(direct)
}

// ---------------------------------------------------------------------
// The letter-wise map into T_1n
// ---------------------------------------------------------------------

/// Per-letter data of the map into `T_1n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiLetter {
    pub i: usize,
    pub j: usize,
    pub param: RingElem,
    /// The four-case commutator expression evaluated literally.
    pub literal: Mat,
    /// Whether the literal expression already lies in `T_1n`.
    pub literal_in_t1n: bool,
    /// The `(1,n)` entry of the literal expression.
    pub literal_entry_read: RingElem,
    /// The image in `T_1n`, via commutator compositions that are exact
    /// for every index pattern; always `t_1n(param)`.
    pub image: Mat,
}

/// Maps the letters of a transvection word into `T_1n`, caching per
/// distinct letter. Reuse one mapper across many words of the same shape.
pub struct PhiMapper<'a> {
    spec: &'a RingSpec,
    n: usize,
    cache: HashMap<(usize, usize, RingElem), PhiLetter>,
}

impl<'a> PhiMapper<'a> {
    pub fn new(spec: &'a RingSpec, n: usize) -> Self {
        PhiMapper {
            spec,
            n,
            cache: HashMap::new(),
        }
    }

    /// The literal four-case expression for a letter `t_ij(p)`:
    /// the letter itself when `(i,j) = (1,n)`; `[t_1i, g]` when `j = n`;
    /// `[g, t_jn]` when `i = 1`; `[[t_1i, g], t_jn]` otherwise.
    pub fn literal_expression(
        &self,
        i: usize,
        j: usize,
        param: &RingElem,
    ) -> Result<Mat, DefinabilityError> {
        let (spec, n) = (self.spec, self.n);
        let g = matgroup::transvection(spec, n, i, j, param)?;
        let one = spec.one();
        Ok(if i == 1 && j == n {
            g
        } else if i != 1 && j == n {
            let t1i = matgroup::transvection(spec, n, 1, i, &one)?;
            matgroup::commutator(spec, &t1i, &g)?
        } else if i == 1 && j != n {
            let tjn = matgroup::transvection(spec, n, j, n, &one)?;
            matgroup::commutator(spec, &g, &tjn)?
        } else {
            let t1i = matgroup::transvection(spec, n, 1, i, &one)?;
            let inner = matgroup::commutator(spec, &t1i, &g)?;
            let tjn = matgroup::transvection(spec, n, j, n, &one)?;
            matgroup::commutator(spec, &inner, &tjn)?
        })
    }

    /// The exact image `t_1n(p)` of `t_ij(p)`, built from commutator
    /// compositions that stay inside the clean commutation patterns for
    /// every `(i,j)`. Letters with `j = 1` need an extra step: the
    /// four-case expression leaves a stray component there.
    pub fn exact_image(
        &self,
        i: usize,
        j: usize,
        param: &RingElem,
    ) -> Result<Mat, DefinabilityError> {
        let (spec, n) = (self.spec, self.n);
        let g = matgroup::transvection(spec, n, i, j, param)?;
        let one = spec.one();
        let image = if i == 1 && j == n {
            g
        } else if i != 1 && j == n {
            let t1i = matgroup::transvection(spec, n, 1, i, &one)?;
            matgroup::commutator(spec, &t1i, &g)?
        } else if i == 1 {
            let tjn = matgroup::transvection(spec, n, j, n, &one)?;
            matgroup::commutator(spec, &g, &tjn)?
        } else if j != 1 {
            let t1i = matgroup::transvection(spec, n, 1, i, &one)?;
            let inner = matgroup::commutator(spec, &t1i, &g)?;
            let tjn = matgroup::transvection(spec, n, j, n, &one)?;
            matgroup::commutator(spec, &inner, &tjn)?
        } else if i != n {
            // t_i1(p): [g, t_1n] = t_in(p), then [t_1i, t_in(p)] = t_1n(p)
            let t1n = matgroup::transvection(spec, n, 1, n, &one)?;
            let step = matgroup::commutator(spec, &g, &t1n)?;
            let t1i = matgroup::transvection(spec, n, 1, i, &one)?;
            matgroup::commutator(spec, &t1i, &step)?
        } else {
            // t_n1(p): route through a middle index m
            let m = 2; // n >= 3, so 2 is neither 1 nor n
            let t1m = matgroup::transvection(spec, n, 1, m, &one)?;
            let step = matgroup::commutator(spec, &g, &t1m)?; // t_nm(p)
            let t1n = matgroup::transvection(spec, n, 1, n, &one)?;
            let inner = matgroup::commutator(spec, &t1n, &step)?; // t_1m(p)
            let tmn = matgroup::transvection(spec, n, m, n, &one)?;
            matgroup::commutator(spec, &inner, &tmn)?
        };
        let want = matgroup::transvection(spec, n, 1, n, param)?;
        if image != want {
            return Err(DefinabilityError::PhiBroken(format!(
                "letter t_{i}{j} mapped off T_1n"
            )));
        }
        Ok(image)
    }

    pub fn map_letter(
        &mut self,
        i: usize,
        j: usize,
        param: &RingElem,
    ) -> Result<PhiLetter, DefinabilityError> {
        let key = (i, j, param.clone());
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit.clone());
        }
        let literal = self.literal_expression(i, j, param)?;
        let image = self.exact_image(i, j, param)?;
        let n = self.n;
        let literal_entry_read = literal.at(0, n - 1).clone();
        let literal_in_t1n =
            literal == matgroup::transvection(self.spec, n, 1, n, &literal_entry_read)?;
        let out = PhiLetter {
            i,
            j,
            param: param.clone(),
            literal,
            literal_in_t1n,
            literal_entry_read,
            image,
        };
        self.cache.insert(key, out.clone());
        Ok(out)
    }

    /// Map every letter of a transvection word for `g`. The word must
    /// evaluate to `g`.
    pub fn map_word(
        &mut self,
        g: &Mat,
        word: &GenWord,
    ) -> Result<Vec<PhiLetter>, DefinabilityError> {
        if &words::eval_word(self.spec, word)? != g {
            return Err(DefinabilityError::EvalMismatch);
        }
        let mut out = Vec::with_capacity(word.letters.len());
        for letter in &word.letters {
            match letter {
                Letter::Transvection { i, j, param } => {
                    out.push(self.map_letter(*i, *j, param)?);
                }
                Letter::Dilation { .. } => {
                    return Err(DefinabilityError::PhiBroken(
                        "word must contain transvection letters only".into(),
                    ))
                }
            }
        }
        Ok(out)
    }
}

/// One-shot convenience over [`PhiMapper`].
pub fn phi_map(
    spec: &RingSpec,
    g: &Mat,
    word: &GenWord,
) -> Result<Vec<PhiLetter>, DefinabilityError> {
    PhiMapper::new(spec, g.n()).map_word(g, word)
}

// ---------------------------------------------------------------------
// The dilation-subgroup predicate
// ---------------------------------------------------------------------

/// Conjugation predicate for membership in `d_k(R^x) . Z(G)`: `x` fixes
/// every `t_ij` with `i,j != k` and sends `t_ij` with `i = k` or `j = k`
/// into `{t_ij(a) : a a unit}`.
pub fn delta_k_membership(spec: &RingSpec, x: &Mat, k: usize) -> Result<bool, DefinabilityError> {
    require_finite(spec)?;
    let n = x.n();
    if k < 1 || k > n {
        return Err(DefinabilityError::BadIndices(format!("k={k}")));
    }
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            let t = matgroup::transvection(spec, n, i, j, &spec.one())?;
            let y = matgroup::conjugate(spec, &t, x)?;
            if i != k && j != k {
                if y != t {
                    return Ok(false);
                }
            } else {
                let param = y.at(i - 1, j - 1).clone();
                if !spec.is_unit(&param) || y != matgroup::transvection(spec, n, i, j, &param)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Set equality `{x in G : delta_k predicate} = d_k(R^x) . Z(G)`.
pub fn delta_k_report(
    spec: &RingSpec,
    n: usize,
    fam: &GroupFamily,
    k: usize,
) -> Result<DefinabilityReport, DefinabilityError> {
    require_finite(spec)?;
    let g: Vec<Mat> = enumerate_group(spec, n, fam)?.collect();
    let mut lhs = Vec::new();
    for x in &g {
        if delta_k_membership(spec, x, k)? {
            lhs.push(x.clone());
        }
    }
    let mut dk = Vec::new();
    for u in spec.enumerate_units()? {
        let d = matgroup::dilation(spec, n, k, &u)?;
        if in_family(spec, &d, fam)? {
            dk.push(d);
        }
    }
    let rhs = matgroup::product_set(spec, &dk, &parametric_center(spec, n, fam)?);
    Ok(DefinabilityReport::from_sets(
        "delta-k",
        format!("{} {fam}_{n}, k={k}", spec.name()),
        &lhs,
        &rhs,
    ))
}

// ---------------------------------------------------------------------
// T_kl squared
// ---------------------------------------------------------------------

/// Three-way set identity inside `T_n(R)`:
/// `{t^2 : t in T_kl}`, `{t_kl(2b) : b in R}`, and
/// `{[d_k, z] : z in Z(C_G(t_kl))}`.
pub fn tkl_squared_identity(
    spec: &RingSpec,
    n: usize,
    k: usize,
    l: usize,
) -> Result<DefinabilityReport, DefinabilityError> {
    require_finite(spec)?;
    if k >= l || k < 1 || l > n {
        return Err(DefinabilityError::BadIndices(format!("(k,l)=({k},{l})")));
    }
    let tkl = one_param_subgroup(spec, n, k, l)?;
    let squares: Vec<Mat> = tkl.iter().map(|t| matgroup::mat_mul(spec, t, t)).collect();
    let doubled: Vec<Mat> = spec
        .enumerate_elements()?
        .map(|b| {
            matgroup::transvection(spec, n, k, l, &spec.add(&b, &b))
                .map_err(DefinabilityError::from)
        })
        .collect::<Result<_, _>>()?;
    let g: Vec<Mat> = enumerate_group(spec, n, &GroupFamily::T)?.collect();
    let t = matgroup::transvection(spec, n, k, l, &spec.one())?;
    let zc = center(spec, &centralizer(spec, &g, &t));
    let dk = matgroup::dilation_neg(spec, n, k);
    let commutators: Vec<Mat> = zc
        .iter()
        .map(|z| matgroup::commutator(spec, &dk, z))
        .collect::<Result<_, _>>()?;

    let eq01 = sets_equal(&squares, &doubled);
    let eq12 = sets_equal(&doubled, &commutators);
    let equal = eq01 && eq12;
    let counterexample = if equal {
        None
    } else if !eq01 {
        set_difference_witness(&squares, &doubled)
    } else {
        set_difference_witness(&doubled, &commutators)
    };
    Ok(DefinabilityReport {
        claim: "tkl-squared".into(),
        instance: format!("{} T_{n}, (k,l)=({k},{l})", spec.name()),
        sizes: vec![
            matgroup::canonical_set(&squares).len(),
            matgroup::canonical_set(&doubled).len(),
            matgroup::canonical_set(&commutators).len(),
        ],
        equal,
        counterexample,
    })
}

// ---------------------------------------------------------------------
// Derived subgroups
// ---------------------------------------------------------------------

/// Commutator closure: the set of all pairwise commutators, closed under
/// products to a fixpoint.
pub fn derived_subgroup(spec: &RingSpec, group: &[Mat]) -> Result<Vec<Mat>, DefinabilityError> {
    let inverses: Vec<Mat> = group
        .iter()
        .map(|x| matgroup::mat_inv(spec, x))
        .collect::<Result<_, _>>()?;
    let mut commutators: Vec<Mat> = Vec::new();
    let mut seen: HashSet<Mat> = HashSet::new();
    for (x, xi) in group.iter().zip(&inverses) {
        for (y, yi) in group.iter().zip(&inverses) {
            let c = matgroup::mat_mul(
                spec,
                &matgroup::mat_mul(spec, xi, yi),
                &matgroup::mat_mul(spec, x, y),
            );
            if seen.insert(c.clone()) {
                commutators.push(c);
            }
        }
    }
    Ok(product_closure(spec, commutators))
}

/// Closure of a set under products (in a finite group this is the
/// generated subgroup).
pub fn product_closure(spec: &RingSpec, generators: Vec<Mat>) -> Vec<Mat> {
    let mut members: HashSet<Mat> = generators.iter().cloned().collect();
    let mut queue: VecDeque<Mat> = generators.iter().cloned().collect();
    while let Some(x) = queue.pop_front() {
        for g in &generators {
            let next = matgroup::mat_mul(spec, &x, g);
            if members.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<Mat> = members.into_iter().collect();
    out.sort();
    out
}

/// `sqrt(G') = {x in G : x^2 in G'}`.
pub fn sqrt_derived(spec: &RingSpec, group: &[Mat]) -> Result<Vec<Mat>, DefinabilityError> {
    let derived: HashSet<Mat> = derived_subgroup(spec, group)?.into_iter().collect();
    Ok(group
        .iter()
        .filter(|x| derived.contains(&matgroup::mat_mul(spec, x, x)))
        .cloned()
        .collect())
}

// ---------------------------------------------------------------------
// The 6-letter dilation identity
// ---------------------------------------------------------------------

/// Audit of `d_i(b) d_j(b^{-1}) = t_ij(b) t_ji(-b^{-1}) t_ij(b) t_ij(-1)
/// t_ji(1) t_ij(-1)` over every unit `b`. The printed word is data under
/// test: if it fails for some unit, a bounded search over sign/order
/// variants of the 6-letter word reports any variant that holds for all
/// units.
#[derive(Debug, Clone)]
pub struct DilationAudit {
    pub instance: String,
    /// Per unit: the parameter and whether the literal word matched.
    pub per_unit: Vec<(RingElem, bool)>,
    pub all_pass: bool,
    /// A repaired variant (rendered), when the literal word failed and a
    /// variant passes for every unit.
    pub repaired: Option<String>,
}

fn dilation_word_letters(
    spec: &RingSpec,
    beta: &RingElem,
) -> Result<Vec<(bool, RingElem)>, DefinabilityError> {
    // (ji-swap?, parameter) for the six letters, in order
    let binv = spec.inverse(beta)?;
    Ok(vec![
        (false, beta.clone()),
        (true, spec.neg(&binv)),
        (false, beta.clone()),
        (false, spec.int(-1)),
        (true, spec.int(1)),
        (false, spec.int(-1)),
    ])
}

fn eval_variant(
    spec: &RingSpec,
    n: usize,
    i: usize,
    j: usize,
    letters: &[(bool, RingElem)],
    swap_mask: u8,
    sign_mask: u8,
) -> Result<Mat, DefinabilityError> {
    let mut acc = matgroup::identity(spec, n);
    for (idx, (swapped, param)) in letters.iter().enumerate() {
        let mut swapped = *swapped;
        if swap_mask & (1 << idx) != 0 {
            swapped = !swapped;
        }
        let mut param = param.clone();
        if sign_mask & (1 << idx) != 0 {
            param = spec.neg(&param);
        }
        let (a, b) = if swapped { (j, i) } else { (i, j) };
        let t = matgroup::transvection(spec, n, a, b, &param)?;
        acc = matgroup::mat_mul(spec, &acc, &t);
    }
    Ok(acc)
}

pub fn verify_dilation_identity(
    spec: &RingSpec,
    n: usize,
    i: usize,
    j: usize,
) -> Result<DilationAudit, DefinabilityError> {
    require_finite(spec)?;
    if i == j || i < 1 || j < 1 || i > n || j > n {
        return Err(DefinabilityError::BadIndices(format!("(i,j)=({i},{j})")));
    }
    let units: Vec<RingElem> = spec.enumerate_units()?.collect();
    let mut per_unit = Vec::with_capacity(units.len());
    let mut all_pass = true;
    for beta in &units {
        let binv = spec.inverse(beta)?;
        let lhs = matgroup::mat_mul(
            spec,
            &matgroup::dilation(spec, n, i, beta)?,
            &matgroup::dilation(spec, n, j, &binv)?,
        );
        let letters = dilation_word_letters(spec, beta)?;
        let rhs = eval_variant(spec, n, i, j, &letters, 0, 0)?;
        let ok = lhs == rhs;
        all_pass &= ok;
        per_unit.push((beta.clone(), ok));
    }
    let mut repaired = None;
    if !all_pass {
        'variants: for swap_mask in 0u8..64 {
            for sign_mask in 0u8..64 {
                if swap_mask == 0 && sign_mask == 0 {
                    continue;
                }
                let mut variant_ok = true;
                for beta in &units {
                    let binv = spec.inverse(beta)?;
                    let lhs = matgroup::mat_mul(
                        spec,
                        &matgroup::dilation(spec, n, i, beta)?,
                        &matgroup::dilation(spec, n, j, &binv)?,
                    );
                    let letters = dilation_word_letters(spec, beta)?;
                    if eval_variant(spec, n, i, j, &letters, swap_mask, sign_mask)? != lhs {
                        variant_ok = false;
                        break;
                    }
                }
                if variant_ok {
                    repaired = Some(format!(
                        "swap_mask={swap_mask:06b} sign_mask={sign_mask:06b}"
                    ));
                    break 'variants;
                }
            }
        }
    }
    Ok(DilationAudit {
        instance: format!("{} n={n}, (i,j)=({i},{j})", spec.name()),
        per_unit,
        all_pass,
        repaired,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zmod(m: i64) -> RingSpec {
        RingSpec::modular(m).unwrap()
    }

    #[test]
    fn zc_lemma_small_instances() {
        // SL_3(Z/2): Z(G) trivial, both sides are T_13 of size 2
        let r = verify_zc_lemma(&zmod(2), 3, &GroupFamily::Sl, 1, 3).unwrap();
        assert!(r.equal);
        assert_eq!(r.sizes, vec![2, 2]);
        // GL_3(Z/2) = SL_3(Z/2): units are {1}
        let r = verify_zc_lemma(&zmod(2), 3, &GroupFamily::Gl, 1, 3).unwrap();
        assert!(r.equal);
        // lower pair also works
        let r = verify_zc_lemma(&zmod(2), 3, &GroupFamily::Sl, 3, 1).unwrap();
        assert!(r.equal);
        // bad inputs
        assert!(verify_zc_lemma(&zmod(2), 3, &GroupFamily::Ut, 1, 3).is_err());
        assert!(verify_zc_lemma(&zmod(2), 3, &GroupFamily::Sl, 2, 2).is_err());
    }

    #[test]
    fn zc_lemma_sl3_z3_center_is_trivial() {
        // the center of SL_3(Z/3) is trivial: the only cube root of 1 in
        // Z/3 is 1, so both sides have exactly |T_13| = 3 elements
        let spec = zmod(3);
        let z = parametric_center(&spec, 3, &GroupFamily::Sl).unwrap();
        assert_eq!(z.len(), 1);
        let r = verify_zc_lemma(&spec, 3, &GroupFamily::Sl, 1, 3).unwrap();
        assert!(r.equal);
        assert_eq!(r.sizes, vec![3, 3]);
    }

    #[test]
    fn tkl_commutator_both_forms() {
        for mirrored in [false, true] {
            let r =
                verify_tkl_commutator(&zmod(2), 3, &GroupFamily::Sl, 1, 3, 2, mirrored).unwrap();
            assert!(r.equal, "form mirrored={mirrored}");
            assert_eq!(r.sizes[0], r.sizes[1]);
        }
        assert!(verify_tkl_commutator(&zmod(2), 3, &GroupFamily::Sl, 1, 3, 1, false).is_err());
    }

    #[test]
    fn malcev_ring_on_t13() {
        let spec = zmod(5);
        let t = |p: i64| matgroup::transvection(&spec, 3, 1, 3, &spec.int(p)).unwrap();
        // 2*3 = 6 = 1 mod 5, confirmed by witness search
        assert_eq!(malcev_mul(&spec, &t(2), &t(3), 2).unwrap(), t(1));
        // ring identity
        assert_eq!(malcev_mul(&spec, &t(2), &t(1), 2).unwrap(), t(2));
        // addition is the group product
        let z = RingSpec::integers();
        let tz = |p: i64| matgroup::transvection(&z, 3, 1, 3, &z.int(p)).unwrap();
        assert_eq!(malcev_add(&z, &tz(2), &tz(3)).unwrap(), tz(5));
        // non-T_1n input rejected
        let d = matgroup::dilation_neg(&spec, 3, 1);
        assert!(matches!(
            malcev_add(&spec, &d, &t(1)),
            Err(DefinabilityError::NotInT1n)
        ));
    }

    #[test]
    fn malcev_ring_isomorphic_to_base_ring_z3() {
        // full interpreted tables match the ring via t_13(a) <-> a
        let spec = zmod(3);
        let t = |p: &RingElem| matgroup::transvection(&spec, 3, 1, 3, p).unwrap();
        let elems: Vec<RingElem> = spec.enumerate_elements().unwrap().collect();
        for a in &elems {
            for b in &elems {
                assert_eq!(malcev_add(&spec, &t(a), &t(b)).unwrap(), t(&spec.add(a, b)));
                assert_eq!(
                    malcev_mul(&spec, &t(a), &t(b), 2).unwrap(),
                    t(&spec.mul(a, b))
                );
            }
        }
    }

    #[test]
    fn phi_clean_cases() {
        let spec = zmod(5);
        let mut mapper = PhiMapper::new(&spec, 3);
        // t_1n letter: image is itself
        let p = spec.int(3);
        let l = mapper.map_letter(1, 3, &p).unwrap();
        assert_eq!(l.image, l.literal);
        assert!(l.literal_in_t1n);
        // t_23: [t_12, t_23(p)] = t_13(p)
        let l = mapper.map_letter(2, 3, &p).unwrap();
        assert!(l.literal_in_t1n);
        assert_eq!(l.image, matgroup::transvection(&spec, 3, 1, 3, &p).unwrap());
        // t_12: [t_12(p), t_23] = t_13(p)
        let l = mapper.map_letter(1, 2, &p).unwrap();
        assert!(l.literal_in_t1n);
        assert_eq!(l.literal_entry_read, p);
    }

    #[test]
    fn phi_t21_literal_carries_stray_component() {
        // exact computation: [[t_12, t_21(p)], t_13] = t_13(p) t_23(-p^2),
        // so the literal expression leaves T_13 whenever p^2 != 0, while
        // the (1,3)-entry read still equals p; the exact image is clean
        let spec = zmod(5);
        let mut mapper = PhiMapper::new(&spec, 3);
        for p in spec.enumerate_elements().unwrap() {
            let l = mapper.map_letter(2, 1, &p).unwrap();
            let psq = spec.mul(&p, &p);
            let mut expected = matgroup::identity(&spec, 3);
            expected.set(0, 2, p.clone());
            expected.set(1, 2, spec.neg(&psq));
            assert_eq!(l.literal, expected);
            assert_eq!(l.literal_in_t1n, spec.is_zero(&psq));
            assert_eq!(l.literal_entry_read, p);
            assert_eq!(l.image, matgroup::transvection(&spec, 3, 1, 3, &p).unwrap());
        }
    }

    #[test]
    fn phi_t31_literal_entry_read_is_wrong_in_general() {
        // for t_31(p) the literal double commutator reads 2p - p^3 at
        // (1,3); the exact image still carries p
        let spec = zmod(5);
        let mut mapper = PhiMapper::new(&spec, 3);
        for p in spec.enumerate_elements().unwrap() {
            let l = mapper.map_letter(3, 1, &p).unwrap();
            let want_read = spec.sub(&spec.add(&p, &p), &spec.mul(&p, &spec.mul(&p, &p)));
            assert_eq!(l.literal_entry_read, want_read);
            assert_eq!(l.image, matgroup::transvection(&spec, 3, 1, 3, &p).unwrap());
        }
    }

    #[test]
    fn phi_exact_image_all_patterns_n4() {
        // every index pattern lands in T_14 with the letter parameter,
        // including the j = 1 letters that need the repaired composites
        let spec = zmod(3);
        let mut mapper = PhiMapper::new(&spec, 4);
        for i in 1..=4usize {
            for j in 1..=4usize {
                if i == j {
                    continue;
                }
                for p in spec.enumerate_elements().unwrap() {
                    let l = mapper.map_letter(i, j, &p).unwrap();
                    assert_eq!(
                        l.image,
                        matgroup::transvection(&spec, 4, 1, 4, &p).unwrap(),
                        "pattern ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn phi_word_roundtrip() {
        let spec = zmod(5);
        let mut mapper = PhiMapper::new(&spec, 3);
        let mut checked = 0;
        for g in enumerate_group(&spec, 3, &GroupFamily::Sl)
            .unwrap()
            .take(200)
        {
            let word = crate::words::decompose_sl(&spec, &g).unwrap();
            let letters = mapper.map_word(&g, &word).unwrap();
            for (phi, letter) in letters.iter().zip(&word.letters) {
                match letter {
                    Letter::Transvection { param, .. } => {
                        assert_eq!(&phi.param, param);
                        assert_eq!(
                            phi.image,
                            matgroup::transvection(&spec, 3, 1, 3, param).unwrap()
                        );
                    }
                    _ => unreachable!(),
                }
            }
            assert_eq!(reconstruct_entries(&spec, &word).unwrap(), g);
            checked += 1;
        }
        assert!(checked > 0);
    }

    #[test]
    fn delta_k_predicate() {
        let spec = zmod(3);
        // constructed members: d_2(u) * scalar
        let u = spec.int(2);
        let x = matgroup::mat_mul(
            &spec,
            &matgroup::dilation(&spec, 3, 2, &u).unwrap(),
            &matgroup::scalar_diag(&spec, 3, &spec.int(2)),
        );
        assert!(delta_k_membership(&spec, &x, 2).unwrap());
        // a transvection is never a member
        let t = matgroup::transvection(&spec, 3, 1, 2, &spec.one()).unwrap();
        for k in 1..=3 {
            assert!(!delta_k_membership(&spec, &t, k).unwrap());
        }
        // set equality over T_3(Z/3)
        let r = delta_k_report(&spec, 3, &GroupFamily::T, 2).unwrap();
        assert!(r.equal, "sizes {:?}", r.sizes);
    }

    #[test]
    fn report_json_shape() {
        let spec = zmod(2);
        let rep = verify_zc_lemma(&spec, 3, &GroupFamily::Sl, 1, 3).unwrap();
        let json = rep.to_json(&spec);
        assert_eq!(json["claim"], "zc-lemma");
        assert_eq!(json["status"], "equal");
        assert_eq!(json["sizes"], serde_json::json!([2, 2]));
        assert!(json.get("counterexample").is_none());
        // an unequal report carries the witness
        let fake = DefinabilityReport {
            claim: "zc-lemma".into(),
            instance: "test".into(),
            sizes: vec![1, 2],
            equal: false,
            counterexample: Some(matgroup::identity(&spec, 3)),
        };
        let json = fake.to_json(&spec);
        assert_eq!(json["status"], "unequal");
        assert_eq!(json["counterexample"], "1,0,0;0,1,0;0,0,1");
    }

    #[test]
    fn tkl_squared_three_rings() {
        // Z/5: 2 is a unit, all three sets are all of T_kl
        let r = tkl_squared_identity(&zmod(5), 3, 1, 3).unwrap();
        assert!(r.equal);
        assert_eq!(r.sizes, vec![5, 5, 5]);
        // Z/2: 2 = 0, everything is trivial
        let r = tkl_squared_identity(&zmod(2), 3, 1, 3).unwrap();
        assert!(r.equal);
        assert_eq!(r.sizes, vec![1, 1, 1]);
        // Z/6: the index-2 subgroup {t_kl(even)}
        let r = tkl_squared_identity(&zmod(6), 3, 1, 3).unwrap();
        assert!(r.equal);
        assert_eq!(r.sizes, vec![3, 3, 3]);
    }

    #[test]
    fn derived_and_sqrt() {
        let spec = zmod(3);
        // abelian group: derived trivial, sqrt = elements of order <= 2
        let d3: Vec<Mat> = enumerate_group(&spec, 3, &GroupFamily::D).unwrap().collect();
        let der = derived_subgroup(&spec, &d3).unwrap();
        assert_eq!(der, vec![matgroup::identity(&spec, 3)]);
        let sqrt = sqrt_derived(&spec, &d3).unwrap();
        for x in &d3 {
            let sq = matgroup::mat_mul(&spec, x, x);
            assert_eq!(sqrt.contains(x), matgroup::is_identity(&spec, &sq));
        }

        // G = UT_3(Z/3): G' = T_13
        let ut: Vec<Mat> = enumerate_group(&spec, 3, &GroupFamily::Ut).unwrap().collect();
        let der = derived_subgroup(&spec, &ut).unwrap();
        let t13 = one_param_subgroup(&spec, 3, 1, 3).unwrap();
        assert!(sets_equal(&der, &t13));

        // G = T_3(Z/3): sqrt(G') contains UT_3 and all the d_i
        let t: Vec<Mat> = enumerate_group(&spec, 3, &GroupFamily::T).unwrap().collect();
        let der_t = derived_subgroup(&spec, &t).unwrap();
        assert!(matgroup::is_subgroup(&spec, &der_t).unwrap());
        let sqrt: std::collections::HashSet<Mat> =
            sqrt_derived(&spec, &t).unwrap().into_iter().collect();
        for u in &ut {
            assert!(sqrt.contains(u));
        }
        for i in 1..=3 {
            assert!(sqrt.contains(&matgroup::dilation_neg(&spec, 3, i)));
        }
    }

    #[test]
    fn dilation_identity_audit() {
        // the printed 6-letter word is exact: passes for every unit
        for m in [5i64, 7] {
            let audit = verify_dilation_identity(&zmod(m), 3, 1, 2).unwrap();
            assert!(audit.all_pass, "failed over Z/{m}");
            assert_eq!(audit.per_unit.len(), (m - 1) as usize);
            assert!(audit.repaired.is_none());
        }
        // instance with beta = 1 evaluates too
        let audit = verify_dilation_identity(&zmod(2), 3, 1, 2).unwrap();
        assert!(audit.all_pass);
    }
}
