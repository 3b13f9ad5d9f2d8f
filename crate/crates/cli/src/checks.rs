//! The named checks behind the CLI subcommands, each producing
//! machine-readable reports, plus the composition of checks into suites.

use crate::report::{timed, CheckReport};
use grouplab::cohomology::{self, CocycleTable, FinAbGroup};
use grouplab::definability;
use grouplab::deformation::{self, CocycleSpec, DeformedGroup};
use grouplab::folang;
use grouplab::matgroup::{self, GroupFamily, Mat};
use grouplab::rings::{RingSpec, RingSpecFile};
use grouplab::words;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Resolve `--ring`: a preset name, or a JSON spec file given as
/// `@path` or a path ending in `.json`.
pub fn resolve_ring(arg: &str) -> Result<RingSpec, String> {
    let path = arg.strip_prefix('@').or_else(|| {
        if arg.ends_with(".json") {
            Some(arg)
        } else {
            None
        }
    });
    if let Some(path) = path {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
        let file: RingSpecFile =
            serde_json::from_str(&text).map_err(|e| format!("bad ring spec file: {e}"))?;
        return file.resolve().map_err(|e| e.to_string());
    }
    RingSpec::preset(arg).map_err(|e| e.to_string())
}

pub fn parse_family(arg: &str) -> Result<GroupFamily, String> {
    GroupFamily::parse(arg).ok_or_else(|| format!("unknown family `{arg}`"))
}

fn def_report_to_check(check: &str, spec: &RingSpec, rep: definability::DefinabilityReport) -> CheckReport {
    let details = serde_json::json!({ "sizes": rep.sizes });
    if rep.equal {
        CheckReport::pass(check, rep.instance, details)
    } else {
        let cx = rep
            .counterexample
            .as_ref()
            .map(|m| serde_json::json!(matgroup::render_mat(spec, m)))
            .unwrap_or(serde_json::Value::Null);
        CheckReport::fail(check, rep.instance, cx, details)
    }
}

// ---------------------------------------------------------------------
// verify subcommands
// ---------------------------------------------------------------------

pub fn ring_validate(ring: &str) -> CheckReport {
    timed("ring-validate", ring.to_string(), || {
        let spec = resolve_ring(ring)?;
        match spec.validate() {
            Ok(()) => Ok(CheckReport::pass(
                "ring-validate",
                ring.to_string(),
                serde_json::json!({ "degree": spec.degree(), "finite": spec.is_finite() }),
            )),
            Err(e) => Ok(CheckReport::fail(
                "ring-validate",
                ring.to_string(),
                serde_json::json!(e.to_string()),
                serde_json::json!({}),
            )),
        }
    })
}

/// Exhaustive check of the two transvection relations over a finite ring:
/// additivity in the parameter, and the three commutator cases over all
/// index patterns.
pub fn steinberg(ring: &str, n: usize) -> CheckReport {
    let instance = format!("{ring} n={n}");
    timed("steinberg", instance.clone(), || {
        let spec = resolve_ring(ring)?;
        let elems: Vec<_> = spec
            .enumerate_elements()
            .map_err(|e| e.to_string())?
            .collect();
        let mut checks = 0usize;
        for i in 1..=n {
            for j in 1..=n {
                if i == j {
                    continue;
                }
                for a in &elems {
                    for b in &elems {
                        let lhs = matgroup::mat_mul(
                            &spec,
                            &matgroup::transvection(&spec, n, i, j, a).map_err(|e| e.to_string())?,
                            &matgroup::transvection(&spec, n, i, j, b).map_err(|e| e.to_string())?,
                        );
                        let rhs = matgroup::transvection(&spec, n, i, j, &spec.add(a, b))
                            .map_err(|e| e.to_string())?;
                        checks += 1;
                        if lhs != rhs {
                            return Ok(CheckReport::fail(
                                "steinberg",
                                instance.clone(),
                                serde_json::json!(format!(
                                    "t_{i}{j}({}) t_{i}{j}({})",
                                    spec.render(a),
                                    spec.render(b)
                                )),
                                serde_json::json!({ "relation": "additivity" }),
                            ));
                        }
                    }
                }
                for k in 1..=n {
                    for l in 1..=n {
                        if k == l || (j == k && i == l) {
                            continue;
                        }
                        for a in &elems {
                            for b in &elems {
                                let x = matgroup::transvection(&spec, n, i, j, a)
                                    .map_err(|e| e.to_string())?;
                                let y = matgroup::transvection(&spec, n, k, l, b)
                                    .map_err(|e| e.to_string())?;
                                let got =
                                    matgroup::commutator(&spec, &x, &y).map_err(|e| e.to_string())?;
                                let want = if j == k {
                                    matgroup::transvection(&spec, n, i, l, &spec.mul(a, b))
                                        .map_err(|e| e.to_string())?
                                } else if i == l {
                                    matgroup::transvection(
                                        &spec,
                                        n,
                                        k,
                                        j,
                                        &spec.neg(&spec.mul(a, b)),
                                    )
                                    .map_err(|e| e.to_string())?
                                } else {
                                    matgroup::identity(&spec, n)
                                };
                                checks += 1;
                                if got != want {
                                    return Ok(CheckReport::fail(
                                        "steinberg",
                                        instance.clone(),
                                        serde_json::json!(format!(
                                            "[t_{i}{j}({}), t_{k}{l}({})]",
                                            spec.render(a),
                                            spec.render(b)
                                        )),
                                        serde_json::json!({ "relation": "commutator" }),
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(CheckReport::pass(
            "steinberg",
            instance.clone(),
            serde_json::json!({ "checked": checks }),
        ))
    })
}

pub fn centralizer(ring: &str, n: usize, family: &str, k: usize, l: usize) -> CheckReport {
    let instance = format!("{ring} {family}_{n} (k,l)=({k},{l})");
    timed("centralizer", instance, || {
        let spec = resolve_ring(ring)?;
        let fam = parse_family(family)?;
        let rep = definability::verify_zc_lemma(&spec, n, &fam, k, l).map_err(|e| e.to_string())?;
        Ok(def_report_to_check("centralizer", &spec, rep))
    })
}

pub fn tkl_commutator(
    ring: &str,
    n: usize,
    family: &str,
    k: usize,
    l: usize,
    j: usize,
) -> Vec<CheckReport> {
    [false, true]
        .into_iter()
        .map(|mirrored| {
            let instance = format!(
                "{ring} {family}_{n} (k,l,j)=({k},{l},{j}){}",
                if mirrored { " mirrored" } else { "" }
            );
            timed("tkl-commutator", instance, || {
                let spec = resolve_ring(ring)?;
                let fam = parse_family(family)?;
                let rep = definability::verify_tkl_commutator(&spec, n, &fam, k, l, j, mirrored)
                    .map_err(|e| e.to_string())?;
                Ok(def_report_to_check("tkl-commutator", &spec, rep))
            })
        })
        .collect()
}

pub fn tkl_squared(ring: &str, n: usize, k: usize, l: usize) -> CheckReport {
    let instance = format!("{ring} T_{n} (k,l)=({k},{l})");
    timed("tkl-squared", instance, || {
        let spec = resolve_ring(ring)?;
        let rep =
            definability::tkl_squared_identity(&spec, n, k, l).map_err(|e| e.to_string())?;
        Ok(def_report_to_check("tkl-squared", &spec, rep))
    })
}

pub fn dilation_identity(ring: &str, n: usize, i: usize, j: usize) -> CheckReport {
    let instance = format!("{ring} n={n} (i,j)=({i},{j})");
    timed("dilation-identity", instance, || {
        let spec = resolve_ring(ring)?;
        let audit =
            definability::verify_dilation_identity(&spec, n, i, j).map_err(|e| e.to_string())?;
        let per_unit: Vec<serde_json::Value> = audit
            .per_unit
            .iter()
            .map(|(u, ok)| serde_json::json!({ "unit": spec.render(u), "ok": ok }))
            .collect();
        let details = serde_json::json!({ "per_unit": per_unit, "repaired": audit.repaired });
        if audit.all_pass {
            Ok(CheckReport::pass("dilation-identity", audit.instance, details))
        } else {
            let cx = audit
                .per_unit
                .iter()
                .find(|(_, ok)| !ok)
                .map(|(u, _)| serde_json::json!(spec.render(u)))
                .unwrap_or(serde_json::Value::Null);
            Ok(CheckReport::fail(
                "dilation-identity",
                audit.instance,
                cx,
                details,
            ))
        }
    })
}

pub fn delta_k(ring: &str, n: usize, family: &str, k: usize) -> CheckReport {
    let instance = format!("{ring} {family}_{n} k={k}");
    timed("delta-k", instance, || {
        let spec = resolve_ring(ring)?;
        let fam = parse_family(family)?;
        let rep = definability::delta_k_report(&spec, n, &fam, k).map_err(|e| e.to_string())?;
        Ok(def_report_to_check("delta-k", &spec, rep))
    })
}

/// Decompose every element of `SL_n`, map each letter into `T_1n`, and
/// confirm the parameters carry over exactly and the word multiplies
/// back to the element.
pub fn phi(ring: &str, n: usize, cap: usize) -> CheckReport {
    let instance = format!("{ring} SL_{n}");
    timed("phi", instance.clone(), || {
        let spec = resolve_ring(ring)?;
        let mut mapper = definability::PhiMapper::new(&spec, n);
        let mut count = 0usize;
        let mut letters = 0usize;
        let mut literal_off = 0usize;
        let t1n = |p: &grouplab::rings::RingElem| {
            matgroup::transvection(&spec, n, 1, n, p).expect("t_1n")
        };
        for g in matgroup::enumerate_group(&spec, n, &GroupFamily::Sl).map_err(|e| e.to_string())? {
            count += 1;
            if count > cap {
                return Err(format!("enumeration cap of {cap} elements exceeded"));
            }
            let word = words::decompose_sl(&spec, &g).map_err(|e| e.to_string())?;
            for letter in &word.letters {
                if let words::Letter::Transvection { i, j, param } = letter {
                    let img = mapper.map_letter(*i, *j, param).map_err(|e| e.to_string())?;
                    letters += 1;
                    if !img.literal_in_t1n {
                        literal_off += 1;
                    }
                    if img.param != *param || img.image != t1n(param) {
                        return Ok(CheckReport::fail(
                            "phi",
                            instance.clone(),
                            serde_json::json!(matgroup::render_mat(&spec, &g)),
                            serde_json::json!({ "letter": format!("t_{i}{j}") }),
                        ));
                    }
                }
            }
            if definability::reconstruct_entries(&spec, &word).map_err(|e| e.to_string())? != g {
                return Ok(CheckReport::fail(
                    "phi",
                    instance.clone(),
                    serde_json::json!(matgroup::render_mat(&spec, &g)),
                    serde_json::json!({ "reason": "entry reconstruction mismatch" }),
                ));
            }
        }
        Ok(CheckReport::pass(
            "phi",
            instance.clone(),
            serde_json::json!({
                "elements": count,
                "letters": letters,
                "literal_expression_off_t1n": literal_off,
            }),
        ))
    })
}

/// Derived-subgroup checks. For the triangular family the brute
/// commutator closure is compared against the closure of the literal
/// generator set; for the others the closure and its square-root set are
/// computed and verified to be subgroups (group order is capped).
pub fn derived(ring: &str, n: usize, family: &str) -> CheckReport {
    let instance = format!("{ring} {family}_{n}");
    timed("derived", instance.clone(), || {
        let spec = resolve_ring(ring)?;
        let fam = parse_family(family)?;
        if matches!(fam, GroupFamily::T) {
            let group = DeformedGroup::new(spec, n, vec![CocycleSpec::Trivial; n - 1])
                .map_err(|e| e.to_string())?;
            let rep = deformation::verify_derived_lemma(&group).map_err(|e| e.to_string())?;
            let details = serde_json::json!({
                "group_order": rep.group_order,
                "derived_order": rep.derived_order,
                "generated_order": rep.generated_order,
            });
            return Ok(if rep.equal {
                CheckReport::pass("derived", instance.clone(), details)
            } else {
                CheckReport::fail(
                    "derived",
                    instance.clone(),
                    serde_json::json!("commutator closure differs from the generator closure"),
                    details,
                )
            });
        }
        let mats: Vec<Mat> = matgroup::enumerate_group(&spec, n, &fam)
            .map_err(|e| e.to_string())?
            .collect();
        if mats.len() > 2000 {
            return Err(format!(
                "group of order {} exceeds the derived-subgroup cap of 2000",
                mats.len()
            ));
        }
        let der = definability::derived_subgroup(&spec, &mats).map_err(|e| e.to_string())?;
        let sqrt = definability::sqrt_derived(&spec, &mats).map_err(|e| e.to_string())?;
        let ok = matgroup::is_subgroup(&spec, &der).map_err(|e| e.to_string())?;
        let details = serde_json::json!({
            "group_order": mats.len(),
            "derived_order": der.len(),
            "sqrt_order": sqrt.len(),
        });
        Ok(if ok {
            CheckReport::pass("derived", instance.clone(), details)
        } else {
            CheckReport::fail(
                "derived",
                instance.clone(),
                serde_json::json!("derived closure is not a subgroup"),
                details,
            )
        })
    })
}

pub fn parse_cocycles(arg: &str, n: usize) -> Result<Vec<CocycleSpec>, String> {
    let parts: Vec<&str> = arg.split(',').collect();
    let specs: Result<Vec<CocycleSpec>, _> = parts.iter().map(|p| CocycleSpec::parse(p.trim())).collect();
    let mut specs = specs.map_err(|e| e.to_string())?;
    if specs.len() == 1 && n > 2 {
        specs = vec![specs[0].clone(); n - 1];
    }
    if specs.len() != n - 1 {
        return Err(format!("expected {} cocycles, got {}", n - 1, specs.len()));
    }
    Ok(specs)
}

pub fn deform_presentation(ring: &str, n: usize, cocycle: &str) -> Vec<CheckReport> {
    let instance = format!("{ring} T_{n}({cocycle})");
    let build = || -> Result<Vec<deformation::RelationCheck>, String> {
        let spec = resolve_ring(ring)?;
        let specs = parse_cocycles(cocycle, n)?;
        let group = DeformedGroup::new(spec, n, specs).map_err(|e| e.to_string())?;
        deformation::verify_presentation(&group).map_err(|e| e.to_string())
    };
    match build() {
        Ok(relations) => relations
            .into_iter()
            .map(|r| {
                let check = "deform-presentation";
                let inst = format!("{instance}: {}", r.name);
                let details = serde_json::json!({ "checked": r.checked });
                let informational = r.name.contains("informational");
                if r.ok || informational {
                    let mut d = details;
                    if !r.ok {
                        d["holds"] = serde_json::json!(false);
                        d["note"] = serde_json::json!(r.counterexample);
                    }
                    CheckReport::pass(check, inst, d)
                } else {
                    CheckReport::fail(
                        check,
                        inst,
                        serde_json::json!(r.counterexample),
                        details,
                    )
                }
            })
            .collect(),
        Err(message) => vec![CheckReport::error(
            "deform-presentation",
            instance,
            message,
        )],
    }
}

pub fn deform_derived(ring: &str, n: usize, cocycle: &str) -> CheckReport {
    let instance = format!("{ring} T_{n}({cocycle})");
    timed("deform-derived", instance.clone(), || {
        let spec = resolve_ring(ring)?;
        let specs = parse_cocycles(cocycle, n)?;
        let group = DeformedGroup::new(spec, n, specs).map_err(|e| e.to_string())?;
        let rep = deformation::verify_derived_lemma(&group).map_err(|e| e.to_string())?;
        let details = serde_json::json!({
            "group_order": rep.group_order,
            "derived_order": rep.derived_order,
            "generated_order": rep.generated_order,
        });
        Ok(if rep.equal {
            CheckReport::pass("deform-derived", instance.clone(), details)
        } else {
            CheckReport::fail(
                "deform-derived",
                instance.clone(),
                serde_json::json!("commutator closure differs from the generator closure"),
                details,
            )
        })
    })
}

pub fn center(
    ring: &str,
    n: usize,
    family: Option<&str>,
    cocycle: Option<&str>,
) -> CheckReport {
    match family {
        Some(fam) => {
            let instance = format!("{ring} {fam}_{n}");
            timed("center", instance.clone(), || {
                let spec = resolve_ring(ring)?;
                let fam = parse_family(fam)?;
                let mats: Vec<Mat> = matgroup::enumerate_group(&spec, n, &fam)
                    .map_err(|e| e.to_string())?
                    .collect();
                let brute = matgroup::center(&spec, &mats);
                let parametric =
                    definability::parametric_center(&spec, n, &fam).map_err(|e| e.to_string())?;
                let equal = matgroup::sets_equal(&brute, &parametric);
                let details = serde_json::json!({
                    "sizes": [brute.len(), parametric.len()],
                });
                Ok(if equal {
                    CheckReport::pass("center", instance.clone(), details)
                } else {
                    let cx = matgroup::set_difference_witness(&brute, &parametric)
                        .map(|m| serde_json::json!(matgroup::render_mat(&spec, &m)))
                        .unwrap_or(serde_json::Value::Null);
                    CheckReport::fail("center", instance.clone(), cx, details)
                })
            })
        }
        None => {
            let cocycle = cocycle.unwrap_or("trivial");
            let instance = format!("{ring} T_{n}({cocycle})");
            timed("center", instance.clone(), || {
                let spec = resolve_ring(ring)?;
                let specs = parse_cocycles(cocycle, n)?;
                let group = DeformedGroup::new(spec, n, specs).map_err(|e| e.to_string())?;
                let rep = deformation::center_of_deformed(&group).map_err(|e| e.to_string())?;
                let details = serde_json::json!({
                    "sizes": [rep.brute_order, rep.central_coordinate_order],
                    "group_order": rep.group_order,
                });
                Ok(if rep.equal {
                    CheckReport::pass("center", instance.clone(), details)
                } else {
                    let cx = rep
                        .witness
                        .as_ref()
                        .map(|w| {
                            serde_json::json!(matgroup::render_mat(
                                &group.ring,
                                &group.to_matrix(w).expect("witness renders")
                            ))
                        })
                        .unwrap_or(serde_json::Value::Null);
                    CheckReport::fail("center", instance.clone(), cx, details)
                })
            })
        }
    }
}

// ---------------------------------------------------------------------
// decompose
// ---------------------------------------------------------------------

pub fn decompose(kind: &str, ring: &str, mat: &str) -> CheckReport {
    let instance = format!("{ring} {kind} {mat}");
    timed("decompose", instance.clone(), || {
        let spec = resolve_ring(ring)?;
        let g = matgroup::parse_mat(&spec, mat).map_err(|e| e.to_string())?;
        let word = match kind {
            "sl" => words::decompose_sl(&spec, &g),
            "gl" => words::decompose_gl(&spec, &g),
            "ut" => words::ut_factor(&spec, &g),
            other => return Err(format!("unknown decomposition `{other}`")),
        }
        .map_err(|e| e.to_string())?;
        let roundtrip = words::eval_word(&spec, &word).map_err(|e| e.to_string())? == g;
        let stats = words::word_stats(&word);
        let details = serde_json::json!({
            "word": words::word_to_json(&word),
            "length": stats.length,
            "per_pair": stats.per_pair,
            "roundtrip": roundtrip,
        });
        Ok(if roundtrip {
            CheckReport::pass("decompose", instance.clone(), details)
        } else {
            CheckReport::fail(
                "decompose",
                instance.clone(),
                serde_json::json!(mat),
                details,
            )
        })
    })
}

// ---------------------------------------------------------------------
// cohomology
// ---------------------------------------------------------------------

pub fn parse_group(arg: &str) -> Result<FinAbGroup, String> {
    FinAbGroup::parse(arg).map_err(|e| e.to_string())
}

/// Cocycle table input: `trivial`, or a JSON map
/// `{"x1,x2;y1,y2": [v, ...]}` (inline or `@file`).
pub fn parse_cocycle_table(
    b: &FinAbGroup,
    a: &FinAbGroup,
    arg: &str,
) -> Result<CocycleTable, String> {
    if arg == "trivial" {
        return CocycleTable::trivial(b.clone(), a.clone()).map_err(|e| e.to_string());
    }
    let text = if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?
    } else {
        arg.to_string()
    };
    let map: BTreeMap<String, Vec<i64>> =
        serde_json::from_str(&text).map_err(|e| format!("bad cocycle JSON: {e}"))?;
    let parse_tuple = |s: &str| -> Result<Vec<i64>, String> {
        s.split(',')
            .map(|p| p.trim().parse::<i64>().map_err(|e| e.to_string()))
            .collect()
    };
    let nb = b.size().map_err(|e| e.to_string())? as usize;
    let mut table = vec![a.zero(); nb * nb];
    for (key, value) in map {
        let (xs, ys) = key
            .split_once(';')
            .ok_or_else(|| format!("key `{key}` is not `x;y`"))?;
        let x = b.reduce(parse_tuple(xs)?);
        let y = b.reduce(parse_tuple(ys)?);
        table[b.index_of(&x) as usize * nb + b.index_of(&y) as usize] = a.reduce(value);
    }
    CocycleTable::new(b.clone(), a.clone(), table).map_err(|e| e.to_string())
}

pub fn cohomology_check(b: &str, a: &str, cocycle: &str) -> CheckReport {
    let instance = format!("B={b} A={a}");
    timed("cocycle-check", instance.clone(), || {
        let bg = parse_group(b)?;
        let ag = parse_group(a)?;
        let f = parse_cocycle_table(&bg, &ag, cocycle)?;
        let is_c = cohomology::is_cocycle(&f);
        let is_s = cohomology::is_symmetric(&f);
        let details = serde_json::json!({ "cocycle": is_c, "symmetric": is_s });
        Ok(if is_c {
            CheckReport::pass("cocycle-check", instance.clone(), details)
        } else {
            CheckReport::fail(
                "cocycle-check",
                instance.clone(),
                serde_json::json!("table violates normalization or the cocycle identity"),
                details,
            )
        })
    })
}

pub fn cohomology_coboundary(b: &str, a: &str, cocycle: &str) -> CheckReport {
    let instance = format!("B={b} A={a}");
    timed("coboundary", instance.clone(), || {
        let bg = parse_group(b)?;
        let ag = parse_group(a)?;
        let f = parse_cocycle_table(&bg, &ag, cocycle)?;
        let witness = cohomology::is_coboundary(&f);
        let details = serde_json::json!({
            "coboundary": witness.is_some(),
            "witness": witness,
        });
        Ok(CheckReport::pass("coboundary", instance.clone(), details))
    })
}

pub fn cohomology_h2(b: &str, a: &str, cap: usize) -> CheckReport {
    let instance = format!("B={b} A={a}");
    timed("h2", instance.clone(), || {
        let bg = parse_group(b)?;
        let ag = parse_group(a)?;
        let brute = cohomology::h2_brute(&bg, &ag, cap as u128).map_err(|e| e.to_string())?;
        Ok(CheckReport::pass(
            "h2",
            instance.clone(),
            serde_json::json!({
                "z2": brute.z2_count,
                "b2": brute.b2_count,
                "h2_order": brute.h2_order,
                "s2": brute.s2_count,
                "ext_order": brute.ext_order,
            }),
        ))
    })
}

/// `Ext` by the divisor formula, cross-checked against brute table
/// enumeration when the candidate count is within the cap.
pub fn cohomology_ext(b: &str, a: &str, cap: usize) -> CheckReport {
    let instance = format!("B={b} A={a}");
    timed("ext", instance.clone(), || {
        let bg = parse_group(b)?;
        let ag = parse_group(a)?;
        let formula = cohomology::ext_formula(&bg, &ag);
        let mut details = serde_json::json!({
            "order": formula.order(),
            "divisors": formula.canonical.divisors(),
        });
        if bg.is_finite() && ag.is_finite() {
            match cohomology::h2_brute(&bg, &ag, cap as u128) {
                Ok(brute) => {
                    details["brute_ext_order"] = serde_json::json!(brute.ext_order);
                    if brute.ext_order as u64 != formula.order() {
                        return Ok(CheckReport::fail(
                            "ext",
                            instance.clone(),
                            serde_json::json!(format!(
                                "brute order {} != formula order {}",
                                brute.ext_order,
                                formula.order()
                            )),
                            details,
                        ));
                    }
                }
                Err(cohomology::CohomologyError::CapExceeded(_, _)) => {
                    details["brute_ext_order"] = serde_json::json!("skipped (cap)");
                }
                Err(e) => return Err(e.to_string()),
            }
        }
        Ok(CheckReport::pass("ext", instance.clone(), details))
    })
}

pub fn cohomology_extend(b: &str, a: &str, cocycle: &str) -> CheckReport {
    let instance = format!("B={b} A={a}");
    timed("extend", instance.clone(), || {
        let bg = parse_group(b)?;
        let ag = parse_group(a)?;
        let f = parse_cocycle_table(&bg, &ag, cocycle)?;
        let e = cohomology::extension_group(&f).map_err(|e| e.to_string())?;
        e.verify().map_err(|err| err.to_string())?;
        Ok(CheckReport::pass(
            "extend",
            instance.clone(),
            serde_json::json!({
                "order": e.order(),
                "abelian": e.is_abelian(),
                "order_profile": e.order_profile(),
            }),
        ))
    })
}

pub fn cohomology_cot(b: &str, a: &str, cocycle: Option<&str>) -> CheckReport {
    let instance = format!("B={b} A={a}");
    timed("cot", instance.clone(), || {
        let bg = parse_group(b)?;
        let ag = parse_group(a)?;
        let torsion = bg.torsion_divisors();
        let table = match cocycle {
            Some(c) => {
                let tg = FinAbGroup::new(torsion).map_err(|e| e.to_string())?;
                Some(parse_cocycle_table(&tg, &ag, c)?)
            }
            None => None,
        };
        let is_cot = cohomology::is_cot(&bg, table.as_ref()).map_err(|e| e.to_string())?;
        Ok(CheckReport::pass(
            "cot",
            instance.clone(),
            serde_json::json!({ "cot": is_cot }),
        ))
    })
}

// ---------------------------------------------------------------------
// formula
// ---------------------------------------------------------------------

pub fn formula_parse(texts: Vec<(String, String)>) -> Vec<CheckReport> {
    texts
        .into_iter()
        .map(|(name, text)| {
            timed("formula-parse", name.clone(), || {
                match folang::parse(&text) {
                    Ok(f) => Ok(CheckReport::pass(
                        "formula-parse",
                        name.clone(),
                        serde_json::json!({
                            "ast": f.to_string(),
                            "free_vars": f.free_vars(),
                            "constants": f.constants(),
                        }),
                    )),
                    Err(e) => Err(e.to_string()),
                }
            })
        })
        .collect()
}

fn build_structure(
    spec: &RingSpec,
    n: usize,
    fam: &GroupFamily,
    consts: &[String],
    cap: usize,
) -> Result<folang::GroupStructure, String> {
    let mut mats = Vec::new();
    for m in matgroup::enumerate_group(spec, n, fam).map_err(|e| e.to_string())? {
        mats.push(m);
        if mats.len() > cap {
            return Err(format!("enumeration cap of {cap} elements exceeded"));
        }
    }
    let mut bound = BTreeMap::new();
    for c in consts {
        let (name, literal) = c
            .split_once('=')
            .ok_or_else(|| format!("bad constant binding `{c}`; expected name=matrix"))?;
        let m = matgroup::parse_mat(spec, literal).map_err(|e| e.to_string())?;
        bound.insert(name.trim().to_string(), m);
    }
    folang::GroupStructure::from_matrices(spec, mats, bound).map_err(|e| e.to_string())
}

pub fn formula_eval(
    text: &str,
    ring: &str,
    n: usize,
    family: &str,
    consts: &[String],
    cap: usize,
) -> CheckReport {
    let instance = format!("{text} over {ring} {family}_{n}");
    timed("formula-eval", instance.clone(), || {
        let spec = resolve_ring(ring)?;
        let fam = parse_family(family)?;
        let f = folang::parse(text).map_err(|e| e.to_string())?;
        if !f.free_vars().is_empty() {
            return Err(format!(
                "formula has free variables {:?}; eval needs a sentence",
                f.free_vars()
            ));
        }
        let s = build_structure(&spec, n, &fam, consts, cap)?;
        let value = folang::eval(&f, &s, &mut Default::default()).map_err(|e| e.to_string())?;
        let details = serde_json::json!({ "value": value, "structure_size": s.size() });
        Ok(if value {
            CheckReport::pass("formula-eval", instance.clone(), details)
        } else {
            CheckReport::fail(
                "formula-eval",
                instance.clone(),
                serde_json::json!("sentence is false in the structure"),
                details,
            )
        })
    })
}

pub fn formula_define(
    text: &str,
    ring: &str,
    n: usize,
    family: &str,
    consts: &[String],
    cap: usize,
) -> CheckReport {
    let instance = format!("{text} over {ring} {family}_{n}");
    timed("formula-define", instance.clone(), || {
        let spec = resolve_ring(ring)?;
        let fam = parse_family(family)?;
        let f = folang::parse(text).map_err(|e| e.to_string())?;
        let s = build_structure(&spec, n, &fam, consts, cap)?;
        let set = folang::define_set(&f, &s).map_err(|e| e.to_string())?;
        let members: Vec<String> = set
            .iter()
            .take(32)
            .map(|&i| matgroup::render_mat(&spec, s.element(i).expect("matrix structure")))
            .collect();
        Ok(CheckReport::pass(
            "formula-define",
            instance.clone(),
            serde_json::json!({
                "size": set.len(),
                "structure_size": s.size(),
                "members": members,
                "truncated": set.len() > 32,
            }),
        ))
    })
}

// ---------------------------------------------------------------------
// suites
// ---------------------------------------------------------------------

fn decompose_roundtrips(seed: u64) -> Vec<CheckReport> {
    let mut out = Vec::new();
    out.push(timed(
        "decompose-roundtrip",
        "Zmod:3 SL_3 exhaustive".into(),
        || {
            let spec = RingSpec::modular(3).map_err(|e| e.to_string())?;
            let mut count = 0usize;
            for g in
                matgroup::enumerate_group(&spec, 3, &GroupFamily::Sl).map_err(|e| e.to_string())?
            {
                let w = words::decompose_sl(&spec, &g).map_err(|e| e.to_string())?;
                if words::eval_word(&spec, &w).map_err(|e| e.to_string())? != g
                    || !w.transvections_only()
                {
                    return Ok(CheckReport::fail(
                        "decompose-roundtrip",
                        "Zmod:3 SL_3 exhaustive".into(),
                        serde_json::json!(matgroup::render_mat(&spec, &g)),
                        serde_json::json!({}),
                    ));
                }
                count += 1;
            }
            Ok(CheckReport::pass(
                "decompose-roundtrip",
                "Zmod:3 SL_3 exhaustive".into(),
                serde_json::json!({ "elements": count }),
            ))
        },
    ));
    out.push(timed(
        "decompose-roundtrip",
        "Z SL_3 random".into(),
        || {
            let spec = RingSpec::integers();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut max_len = 0usize;
            for _ in 0..1000 {
                let g = words::random_sl(&spec, &mut rng, 3, 9);
                let w = words::decompose_sl(&spec, &g).map_err(|e| e.to_string())?;
                if words::eval_word(&spec, &w).map_err(|e| e.to_string())? != g {
                    return Ok(CheckReport::fail(
                        "decompose-roundtrip",
                        "Z SL_3 random".into(),
                        serde_json::json!(matgroup::render_mat(&spec, &g)),
                        serde_json::json!({}),
                    ));
                }
                max_len = max_len.max(w.letters.len());
            }
            Ok(CheckReport::pass(
                "decompose-roundtrip",
                "Z SL_3 random".into(),
                serde_json::json!({ "samples": 1000, "max_word_length": max_len, "seed": seed }),
            ))
        },
    ));
    out
}

fn malcev_check() -> CheckReport {
    timed("malcev-ring", "Zmod:5 T_13".into(), || {
        let spec = RingSpec::modular(5).map_err(|e| e.to_string())?;
        let t = |p: &grouplab::rings::RingElem| {
            matgroup::transvection(&spec, 3, 1, 3, p).expect("t_13")
        };
        let elems: Vec<_> = spec.enumerate_elements().map_err(|e| e.to_string())?.collect();
        for a in &elems {
            for b in &elems {
                let add = definability::malcev_add(&spec, &t(a), &t(b)).map_err(|e| e.to_string())?;
                let mul =
                    definability::malcev_mul(&spec, &t(a), &t(b), 2).map_err(|e| e.to_string())?;
                if add != t(&spec.add(a, b)) || mul != t(&spec.mul(a, b)) {
                    return Ok(CheckReport::fail(
                        "malcev-ring",
                        "Zmod:5 T_13".into(),
                        serde_json::json!(format!("a={}, b={}", spec.render(a), spec.render(b))),
                        serde_json::json!({}),
                    ));
                }
            }
        }
        Ok(CheckReport::pass(
            "malcev-ring",
            "Zmod:5 T_13".into(),
            serde_json::json!({ "table_entries": 25 }),
        ))
    })
}

fn formula_agreement() -> Vec<CheckReport> {
    let instances = [("Zmod:2", "SL"), ("Zmod:3", "SL"), ("Zmod:3", "GL")];
    instances
        .iter()
        .map(|(ring, fam)| {
            let instance = format!("{ring} {fam}_3");
            timed("formula-agreement", instance.clone(), || {
                let spec = resolve_ring(ring)?;
                let family = parse_family(fam)?;
                let mats: Vec<Mat> = matgroup::enumerate_group(&spec, 3, &family)
                    .map_err(|e| e.to_string())?
                    .collect();
                let brute_center = matgroup::center(&spec, &mats);
                let t = matgroup::transvection(&spec, 3, 1, 3, &spec.one())
                    .map_err(|e| e.to_string())?;
                let brute_centralizer = matgroup::centralizer(&spec, &mats, &t);
                let mut consts = BTreeMap::new();
                consts.insert("c1".to_string(), t);
                let s = folang::GroupStructure::from_matrices(&spec, mats, consts)
                    .map_err(|e| e.to_string())?;
                for (formula, brute) in [
                    (folang::center_formula(), &brute_center),
                    (folang::centralizer_formula(), &brute_centralizer),
                ] {
                    let f = folang::parse(&formula).map_err(|e| e.to_string())?;
                    let got: Vec<Mat> = folang::define_set(&f, &s)
                        .map_err(|e| e.to_string())?
                        .into_iter()
                        .map(|i| s.element(i).expect("matrix structure").clone())
                        .collect();
                    if !matgroup::sets_equal(&got, brute) {
                        return Ok(CheckReport::fail(
                            "formula-agreement",
                            instance.clone(),
                            serde_json::json!(formula),
                            serde_json::json!({}),
                        ));
                    }
                }
                Ok(CheckReport::pass(
                    "formula-agreement",
                    instance.clone(),
                    serde_json::json!({ "formulas": ["center", "centralizer"] }),
                ))
            })
        })
        .collect()
}

pub fn suite_sl(seed: u64, cap: usize) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for ring in ["Zmod:5", "Zmod:7"] {
        for n in [3usize, 4] {
            out.push(steinberg(ring, n));
        }
    }
    for (ring, fam) in [("Zmod:2", "SL"), ("Zmod:3", "SL"), ("Zmod:3", "GL")] {
        for (k, l) in [(1usize, 3usize), (3, 1)] {
            out.push(centralizer(ring, 3, fam, k, l));
        }
        out.extend(tkl_commutator(ring, 3, fam, 1, 3, 2));
    }
    out.push(malcev_check());
    out.extend(decompose_roundtrips(seed));
    out.push(phi("Zmod:5", 3, cap));
    out.extend(formula_agreement());
    out
}

pub fn suite_t(_seed: u64) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for ring in ["Zmod:2", "Zmod:5", "Zmod:6"] {
        for (k, l) in [(1usize, 2usize), (1, 3), (2, 3)] {
            out.push(tkl_squared(ring, 3, k, l));
        }
    }
    for (ring, fam) in [("Zmod:2", "T"), ("Zmod:3", "T"), ("Zmod:2", "GL"), ("Zmod:3", "GL")] {
        for k in 1..=3 {
            out.push(delta_k(ring, 3, fam, k));
        }
    }
    out.push(derived("Zmod:3", 3, "T"));
    out.push(derived("Zmod:3", 3, "UT"));
    for cocycle in ["trivial", "class:1"] {
        out.extend(deform_presentation("Zmod:3", 3, cocycle));
        out.push(deform_derived("Zmod:3", 3, cocycle));
        out.push(deform_derived("Zmod:5", 3, cocycle));
        out.push(center("Zmod:3", 3, None, Some(cocycle)));
    }
    out
}

pub fn suite_gl(_seed: u64) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for ring in ["Zmod:5", "Zmod:7"] {
        out.push(dilation_identity(ring, 3, 1, 2));
    }
    out.push(center("Zmod:3", 3, Some("GL"), None));
    out.push(center("Zmod:2", 3, Some("SL"), None));
    out.push(timed(
        "decompose-roundtrip",
        "Zmod:3 GL_3 exhaustive".into(),
        || {
            let spec = RingSpec::modular(3).map_err(|e| e.to_string())?;
            let mut count = 0usize;
            for g in
                matgroup::enumerate_group(&spec, 3, &GroupFamily::Gl).map_err(|e| e.to_string())?
            {
                let w = words::decompose_gl(&spec, &g).map_err(|e| e.to_string())?;
                if words::eval_word(&spec, &w).map_err(|e| e.to_string())? != g {
                    return Ok(CheckReport::fail(
                        "decompose-roundtrip",
                        "Zmod:3 GL_3 exhaustive".into(),
                        serde_json::json!(matgroup::render_mat(&spec, &g)),
                        serde_json::json!({}),
                    ));
                }
                count += 1;
            }
            Ok(CheckReport::pass(
                "decompose-roundtrip",
                "Zmod:3 GL_3 exhaustive".into(),
                serde_json::json!({ "elements": count }),
            ))
        },
    ));
    out
}

pub fn suite_cohomology(cap: usize) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for b in ["2", "3", "4", "2,2"] {
        for a in ["2", "3", "4", "2,2"] {
            out.push(cohomology_ext(b, a, cap));
        }
    }
    out.push(cohomology_check("2", "2", "{\"1;1\": [1]}"));
    out.push(cohomology_coboundary("2", "2", "{\"1;1\": [1]}"));
    out.push(cohomology_extend("2", "2", "{\"1;1\": [1]}"));
    out.push(cohomology_extend("2", "2", "trivial"));
    out.push(cohomology_cot("2", "2", Some("{\"1;1\": [1]}")));
    out.push(cohomology_cot("0", "2", None));
    out
}

pub fn suite_all(seed: u64, cap: usize) -> Vec<CheckReport> {
    let mut out = suite_sl(seed, cap);
    out.extend(suite_t(seed));
    out.extend(suite_gl(seed));
    out.extend(suite_cohomology(cap));
    out
}
