//! The acceptance suite: one test per criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them) and enforcing its
//! stated time budget. Criteria are serialized through a global lock so
//! the wall-clock budgets are measured without interference.

use grouplab::cohomology::{self, FinAbGroup};
use grouplab::definability::{self, PhiMapper};
use grouplab::deformation::{self, CocycleSpec, DeformedGroup};
use grouplab::folang;
use grouplab::matgroup::{self, GroupFamily, Mat};
use grouplab::rings::RingSpec;
use grouplab::words::{self, Letter};
use grouplab::DEFAULT_SEED;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Mutex;
use std::time::Instant;

static GATE: Mutex<()> = Mutex::new(());

struct Criterion {
    name: &'static str,
    budget_ms: u128,
    started: Instant,
    _guard: std::sync::MutexGuard<'static, ()>,
}

impl Criterion {
    fn start(name: &'static str, budget_ms: u128) -> Self {
        let guard = GATE.lock().unwrap_or_else(|e| e.into_inner());
        Criterion {
            name,
            budget_ms,
            started: Instant::now(),
            _guard: guard,
        }
    }

    fn finish(self, ok: bool, detail: &str) {
        let elapsed = self.started.elapsed().as_millis();
        let in_budget = elapsed < self.budget_ms;
        let verdict = if ok && in_budget { "PASS" } else { "FAIL" };
        println!(
            "{verdict}: {} — {detail} [{elapsed} ms, budget {} ms]",
            self.name, self.budget_ms
        );
        assert!(ok, "{} failed: {detail}", self.name);
        assert!(
            in_budget,
            "{} exceeded its budget: {elapsed} ms >= {} ms",
            self.name, self.budget_ms
        );
    }
}

fn zmod(m: i64) -> RingSpec {
    RingSpec::modular(m).unwrap()
}

#[test]
fn criterion_01_steinberg_relations() {
    let c = Criterion::start("criterion 1: Steinberg relations", 10_000);
    let mut checks = 0usize;
    let mut violations = 0usize;
    for m in [5i64, 7] {
        let spec = zmod(m);
        let elems: Vec<_> = spec.enumerate_elements().unwrap().collect();
        for n in [3usize, 4] {
            for i in 1..=n {
                for j in 1..=n {
                    if i == j {
                        continue;
                    }
                    // additivity
                    for a in &elems {
                        for b in &elems {
                            let lhs = matgroup::mat_mul(
                                &spec,
                                &matgroup::transvection(&spec, n, i, j, a).unwrap(),
                                &matgroup::transvection(&spec, n, i, j, b).unwrap(),
                            );
                            let rhs =
                                matgroup::transvection(&spec, n, i, j, &spec.add(a, b)).unwrap();
                            checks += 1;
                            if lhs != rhs {
                                violations += 1;
                            }
                        }
                    }
                    // commutator cases over all index patterns
                    for k in 1..=n {
                        for l in 1..=n {
                            if k == l || (j == k && i == l) {
                                continue;
                            }
                            for a in &elems {
                                for b in &elems {
                                    let x = matgroup::transvection(&spec, n, i, j, a).unwrap();
                                    let y = matgroup::transvection(&spec, n, k, l, b).unwrap();
                                    let got = matgroup::commutator(&spec, &x, &y).unwrap();
                                    let want = if j == k {
                                        matgroup::transvection(&spec, n, i, l, &spec.mul(a, b))
                                            .unwrap()
                                    } else if i == l {
                                        matgroup::transvection(
                                            &spec,
                                            n,
                                            k,
                                            j,
                                            &spec.neg(&spec.mul(a, b)),
                                        )
                                        .unwrap()
                                    } else {
                                        matgroup::identity(&spec, n)
                                    };
                                    checks += 1;
                                    if got != want {
                                        violations += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let ok = violations == 0;
    c.finish(
        ok,
        &format!("Z/5 and Z/7, n in {{3,4}}, {checks} relation instances, {violations} violations"),
    );
}

#[test]
fn criterion_02_centralizer_lemma() {
    let c = Criterion::start("criterion 2: centralizer lemma", 60_000);
    let instances: [(RingSpec, GroupFamily, usize); 3] = [
        (zmod(2), GroupFamily::Sl, 168),
        (zmod(3), GroupFamily::Sl, 5616),
        (zmod(3), GroupFamily::Gl, 11232),
    ];
    let mut ok = true;
    let mut detail = String::new();
    for (spec, fam, expected_order) in &instances {
        let order = matgroup::enumerate_group(spec, 3, fam).unwrap().count();
        if order != *expected_order {
            ok = false;
            detail.push_str(&format!("{fam}({}) has order {order}; ", spec.name()));
            continue;
        }
        for k in 1..=3usize {
            for l in 1..=3usize {
                if k == l {
                    continue;
                }
                let rep = definability::verify_zc_lemma(spec, 3, fam, k, l).unwrap();
                if !rep.equal {
                    ok = false;
                    detail.push_str(&format!("{} unequal; ", rep.instance));
                }
            }
        }
    }
    if detail.is_empty() {
        detail = "set equality at all 6 index pairs in SL_3(Z/2), SL_3(Z/3), GL_3(Z/3)".into();
    }
    c.finish(ok, &detail);
}

#[test]
fn criterion_03_commutator_definability() {
    let c = Criterion::start("criterion 3: commutator definability", 60_000);
    let instances: [(RingSpec, GroupFamily); 3] = [
        (zmod(2), GroupFamily::Sl),
        (zmod(3), GroupFamily::Sl),
        (zmod(3), GroupFamily::Gl),
    ];
    let mut ok = true;
    let mut count = 0usize;
    for (spec, fam) in &instances {
        for k in 1..=3usize {
            for l in 1..=3usize {
                if k == l {
                    continue;
                }
                let j = (1..=3).find(|j| *j != k && *j != l).unwrap();
                for mirrored in [false, true] {
                    let rep =
                        definability::verify_tkl_commutator(spec, 3, fam, k, l, j, mirrored)
                            .unwrap();
                    count += 1;
                    ok &= rep.equal;
                }
            }
        }
    }
    c.finish(ok, &format!("{count} instances, both displayed forms"));
}

#[test]
fn criterion_04_malcev_ring() {
    let c = Criterion::start("criterion 4: interpreted ring on T_13", 1_000);
    let spec = zmod(5);
    let t = |p: &grouplab::rings::RingElem| matgroup::transvection(&spec, 3, 1, 3, p).unwrap();
    let elems: Vec<_> = spec.enumerate_elements().unwrap().collect();
    let mut entries = 0usize;
    let mut ok = true;
    for a in &elems {
        for b in &elems {
            let add = definability::malcev_add(&spec, &t(a), &t(b)).unwrap();
            ok &= add == t(&spec.add(a, b));
            let mul = definability::malcev_mul(&spec, &t(a), &t(b), 2).unwrap();
            ok &= mul == t(&spec.mul(a, b));
            entries += 1;
        }
    }
    c.finish(
        ok,
        &format!("all {entries} add/mul table entries match Z/5 through t_13"),
    );
}

#[test]
fn criterion_05_decomposition_roundtrip() {
    let c = Criterion::start("criterion 5: decomposition round trip", 120_000);
    let spec3 = zmod(3);
    let mut ok = true;
    let mut count = 0usize;
    for g in matgroup::enumerate_group(&spec3, 3, &GroupFamily::Sl).unwrap() {
        let w = words::decompose_sl(&spec3, &g).unwrap();
        ok &= w.transvections_only();
        ok &= words::eval_word(&spec3, &w).unwrap() == g;
        count += 1;
    }
    ok &= count == 5616;

    let z = RingSpec::integers();
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut max_len = 0usize;
    for _ in 0..1000 {
        let g = words::random_sl(&z, &mut rng, 3, 9);
        let w = words::decompose_sl(&z, &g).unwrap();
        ok &= w.transvections_only();
        ok &= words::eval_word(&z, &w).unwrap() == g;
        max_len = max_len.max(w.letters.len());
    }
    c.finish(
        ok,
        &format!(
            "all 5616 of SL_3(Z/3) plus 1000 seeded random integer matrices (max word length {max_len})"
        ),
    );
}

#[test]
fn criterion_06_phi_map_consistency() {
    let c = Criterion::start("criterion 6: letter map into T_1n", 30_000);
    let spec = zmod(5);
    let mut mapper = PhiMapper::new(&spec, 3);
    let mut ok = true;
    let mut count = 0usize;
    let mut letters_total = 0usize;
    let mut literal_off_t1n = 0usize;
    for g in matgroup::enumerate_group(&spec, 3, &GroupFamily::Sl).unwrap() {
        let word = words::decompose_sl(&spec, &g).unwrap();
        for letter in &word.letters {
            let (i, j, param) = match letter {
                Letter::Transvection { i, j, param } => (*i, *j, param),
                _ => unreachable!("decomposition words are transvection-only"),
            };
            let phi = mapper.map_letter(i, j, param).unwrap();
            // the image in T_1n carries exactly the word parameter
            ok &= &phi.param == param;
            ok &= phi.image == matgroup::transvection(&spec, 3, 1, 3, param).unwrap();
            if !phi.literal_in_t1n {
                literal_off_t1n += 1;
            }
            letters_total += 1;
        }
        // the entry polynomials invert the parameters
        ok &= definability::reconstruct_entries(&spec, &word).unwrap() == g;
        count += 1;
    }
    ok &= count == 372_000;
    c.finish(
        ok,
        &format!(
            "all {count} of SL_3(Z/5); {letters_total} letters mapped, parameters exact; \
             literal four-case expression left T_13 for {literal_off_t1n} letters (repaired composite used)"
        ),
    );
}

#[test]
fn criterion_07_tkl_squared() {
    let c = Criterion::start("criterion 7: squared one-parameter subgroups", 10_000);
    let mut ok = true;
    let mut detail = String::new();
    for m in [2i64, 5, 6] {
        let spec = zmod(m);
        for (k, l) in [(1usize, 2usize), (1, 3), (2, 3)] {
            let rep = definability::tkl_squared_identity(&spec, 3, k, l).unwrap();
            ok &= rep.equal;
            if (k, l) == (1, 3) {
                detail.push_str(&format!("Z/{m}: sizes {:?}; ", rep.sizes));
            }
        }
    }
    c.finish(ok, &format!("three-way equality in T_3 — {detail}"));
}

#[test]
fn criterion_08_cohomology_cross_validation() {
    let c = Criterion::start("criterion 8: Ext cross-validation", 60_000);
    let groups = [
        FinAbGroup::cyclic(2),
        FinAbGroup::cyclic(3),
        FinAbGroup::cyclic(4),
        FinAbGroup::parse("2,2").unwrap(),
    ];
    let mut ok = true;
    let mut combos = 0usize;
    for b in &groups {
        for a in &groups {
            let brute = cohomology::h2_brute(b, a, 1 << 22).unwrap();
            let formula = cohomology::ext_formula(b, a);
            combos += 1;
            if brute.ext_order as u64 != formula.order() {
                ok = false;
            }
            // order profiles of the two class groups agree
            let formula_profile = formula.order_profile();
            if brute.ext_order_profile != formula_profile {
                ok = false;
            }
            // sanity: |S2| / |B2| equals the class count
            if !brute.s2_count.is_multiple_of(brute.b2_count)
                || brute.s2_count / brute.b2_count != brute.ext_order
            {
                ok = false;
            }
        }
    }
    // |Ext(Z/2, Z/2)| = 2 and the nontrivial class gives a cyclic
    // extension of order 4
    let z2 = FinAbGroup::cyclic(2);
    let brute = cohomology::h2_brute(&z2, &z2, 1 << 20).unwrap();
    ok &= brute.ext_order == 2;
    let nontrivial = brute
        .ext_reps
        .iter()
        .find(|f| cohomology::is_coboundary(f).is_none())
        .expect("a nontrivial class exists");
    let e = cohomology::extension_group(nontrivial).unwrap();
    e.verify().unwrap();
    ok &= e.order() == 4;
    ok &= e.order_profile().get(&4) == Some(&2);
    c.finish(
        ok,
        &format!("{combos} (B, A) combinations, brute table enumeration equals the divisor formula"),
    );
}

#[test]
fn criterion_09_deformation_lemmas() {
    let c = Criterion::start("criterion 9: deformed triangular groups", 300_000);
    let mut ok = true;
    let mut detail = String::new();
    for (m, expected_order) in [(3i64, 216usize), (5, 8000)] {
        for specs in [
            vec![CocycleSpec::Trivial, CocycleSpec::Trivial],
            vec![CocycleSpec::Class(1), CocycleSpec::Trivial],
        ] {
            let twisted = specs[0] != CocycleSpec::Trivial;
            let group = DeformedGroup::new(zmod(m), 3, specs).unwrap();
            if group.order() != expected_order {
                ok = false;
            }
            // presentation relations, exhaustively over parameter ranges
            let relations = deformation::verify_presentation(&group).unwrap();
            for r in relations.iter().take(5) {
                ok &= r.ok;
            }
            // group axioms: full triples for the 216-element groups,
            // factor-exhaustive plus a seeded sample for the 8000s
            let axioms =
                deformation::verify_group_axioms(&group, 20_000_000, DEFAULT_SEED).unwrap();
            ok &= axioms.identity_ok
                && axioms.inverses_ok
                && axioms.closure_ok
                && axioms.assoc_ok
                && axioms.packed_matches_direct;
            // derived subgroup: brute commutator closure vs the literal
            // generator set
            let derived = deformation::verify_derived_lemma(&group).unwrap();
            ok &= derived.equal;
            detail.push_str(&format!(
                "Z/{m}{}: |G|={} |G'|={}; ",
                if twisted { " twisted" } else { "" },
                group.order(),
                derived.derived_order
            ));
        }
    }
    c.finish(ok, &detail);
}

#[test]
fn criterion_10_dilation_identity() {
    let c = Criterion::start("criterion 10: 6-letter dilation identity", 10_000);
    let mut ok = true;
    let mut detail = String::new();
    for m in [5i64, 7] {
        let audit = definability::verify_dilation_identity(&zmod(m), 3, 1, 2).unwrap();
        let verdicts: Vec<String> = audit
            .per_unit
            .iter()
            .map(|(u, pass)| format!("{}:{}", zmod(m).render(u), if *pass { "ok" } else { "FAIL" }))
            .collect();
        detail.push_str(&format!("Z/{m} [{}] ", verdicts.join(", ")));
        // definitive verdict per unit; if the literal word had failed, a
        // repaired variant must be exhibited
        if !audit.all_pass {
            ok &= audit.repaired.is_some();
            detail.push_str(&format!("repaired: {:?} ", audit.repaired));
        }
        ok &= audit.per_unit.len() == (m - 1) as usize;
    }
    c.finish(ok, &detail);
}

#[test]
fn criterion_11_formula_engine_agreement() {
    let c = Criterion::start("criterion 11: formula engine agreement", 60_000);
    let instances: [(RingSpec, GroupFamily); 3] = [
        (zmod(2), GroupFamily::Sl),
        (zmod(3), GroupFamily::Sl),
        (zmod(3), GroupFamily::Gl),
    ];
    let mut ok = true;
    let mut checked = 0usize;
    for (spec, fam) in &instances {
        let mats: Vec<Mat> = matgroup::enumerate_group(spec, 3, fam).unwrap().collect();
        let brute_center = matgroup::center(spec, &mats);
        let t = matgroup::transvection(spec, 3, 1, 3, &spec.one()).unwrap();
        let brute_centralizer = matgroup::centralizer(spec, &mats, &t);

        let mut consts = BTreeMap::new();
        consts.insert("c1".to_string(), t);
        let s = folang::GroupStructure::from_matrices(spec, mats, consts).unwrap();

        let f = folang::parse(&folang::center_formula()).unwrap();
        let got: Vec<Mat> = folang::define_set(&f, &s)
            .unwrap()
            .into_iter()
            .map(|i| s.element(i).unwrap().clone())
            .collect();
        ok &= matgroup::sets_equal(&got, &brute_center);

        let f = folang::parse(&folang::centralizer_formula()).unwrap();
        let got: Vec<Mat> = folang::define_set(&f, &s)
            .unwrap()
            .into_iter()
            .map(|i| s.element(i).unwrap().clone())
            .collect();
        ok &= matgroup::sets_equal(&got, &brute_centralizer);
        checked += 1;
    }
    c.finish(
        ok,
        &format!("center and centralizer formulas match brute force on {checked} groups"),
    );
}
