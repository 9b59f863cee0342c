//! Acceptance suite. Prints one line per criterion and exits nonzero if
//! any criterion fails or exceeds its time budget.

mod common;

use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use configcalc::config::{
    build_from_subobjects, check_config_morphism, extract_subobjects, kappa, quotient_configuration,
    solve_config_morphism, subconfiguration, substitute, validate_config, ConfigMorphism, Configuration,
};
use configcalc::doc::{parse_document, Document};
use configcalc::improve::{
    best_search, coarsen, enumerate_improvements, is_best, split_pair_test,
};
use configcalc::poset::{FinitePoset, Subset};
use configcalc::quivercat::{enumerate_subobjects, hom_space, jh_poset, Rep, RepMor};
use rand::Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn poset_axioms() -> Outcome {
    let mut rng = rng(0xC0FFEE);
    let mut pair_checks = 0usize;
    for round in 0..500 {
        let n = rng.gen_range(1..=6);
        let p = random_poset(&mut rng, n);
        let subsets: Vec<Subset> = all_subsets(n).collect();
        let ss = p.ssets();
        let fs = p.fsets();
        ensure!(
            ss == subsets.iter().copied().filter(|&s| oracle_is_sset(&p, s)).collect::<Vec<_>>(),
            "poset {round}: s-sets differ from the definition"
        );
        ensure!(
            p.qsets() == subsets.iter().copied().filter(|&s| oracle_is_qset(&p, s)).collect::<Vec<_>>(),
            "poset {round}: q-sets differ from the definition"
        );
        ensure!(
            fs == subsets.iter().copied().filter(|&s| oracle_is_fset(&p, s)).collect::<Vec<_>>(),
            "poset {round}: f-sets differ from the definition"
        );
        // s-sets form a sublattice containing the bounds
        ensure!(ss.contains(&Subset::EMPTY) && ss.contains(&p.full()), "poset {round}: bounds missing");
        for &a in &ss {
            for &b in &ss {
                ensure!(
                    p.is_sset(a.union(b)) && p.is_sset(a.intersection(b)),
                    "poset {round}: s-sets not closed under union/intersection"
                );
            }
        }
        for &s in &subsets {
            ensure!(
                p.is_sset(s) == p.is_qset(p.full().difference(s)),
                "poset {round}: complement duality fails"
            );
        }
        for &f in &fs {
            let k = Subset::from_indices((0..n).filter(|&i| f.iter().any(|j| p.leq(i, j))));
            let j = k.difference(f);
            ensure!(
                p.is_sset(k) && p.is_sset(j) && j.is_subset(k) && k.difference(j) == f,
                "poset {round}: f-set is not a difference of s-sets"
            );
            for &g in &fs {
                ensure!(p.is_fset(f.intersection(g)), "poset {round}: f-sets not closed under intersection");
            }
        }
        for i in 0..n {
            for j in 0..n {
                let recovered = ss.iter().all(|s| !s.contains(j) || s.contains(i));
                ensure!(recovered == p.leq(i, j), "poset {round}: order recovery fails at ({i},{j})");
            }
        }
        if n <= 5 {
            for &a in &fs {
                for &b in &fs {
                    let g = p.is_g_pair(a, b);
                    ensure!(g == oracle_is_g(&p, a, b), "poset {round}: G membership differs");
                    ensure!(p.is_h_pair(a, b) == oracle_is_h(&p, a, b), "poset {round}: H membership differs");
                    if a.is_subset(b) {
                        ensure!(g == p.is_h_pair(b, b.difference(a)), "poset {round}: G/H complement duality fails");
                    } else {
                        ensure!(!g, "poset {round}: G pair that is not nested");
                    }
                    for &c in &fs {
                        pair_checks += 1;
                        if g && p.is_g_pair(b, c) {
                            ensure!(p.is_g_pair(a, c), "poset {round}: G not transitive");
                        }
                        if p.is_h_pair(a, b) && p.is_h_pair(b, c) {
                            ensure!(p.is_h_pair(a, c), "poset {round}: H not transitive");
                        }
                        if g && p.is_h_pair(b, c) {
                            let m = a.intersection(c);
                            ensure!(
                                p.is_h_pair(a, m) && p.is_g_pair(m, c),
                                "poset {round}: mixed G/H property fails"
                            );
                        }
                    }
                }
            }
        }
    }
    Ok(format!("500 posets, {pair_checks} f-set triples"))
}

fn rep_seed(k: u64) -> u64 {
    0x5EED_0000 + k
}

fn random_rep(k: u64) -> Rep {
    let mut r = rng(rep_seed(k));
    let p = if r.gen_bool(0.5) { 2 } else { 3 };
    random_mf_nilpotent_rep(&mut r, field(p))
}

fn jordan_holder() -> Outcome {
    let mut series_total = 0;
    for k in 0..100 {
        let x = Arc::new(random_rep(k));
        let jh = jh_poset(&x).map_err(|e| format!("rep {k}: {e}"))?;
        let series = oracle_composition_series(&x).ok_or(format!("rep {k}: a maximal chain has a non-simple step"))?;
        let supp = support(&x);
        ensure!(
            enumerate_subobjects(&x).unwrap().len() == oracle_closed_sets(&x).len(),
            "rep {k}: subobject count differs"
        );
        let idx = |pos: usize| jh.poset.index_of(&x.quiver().vertices()[supp[pos]]).unwrap();
        for a in 0..supp.len() {
            for b in 0..supp.len() {
                let before = |s: &Vec<usize>| {
                    s.iter().position(|&v| v == a).unwrap() <= s.iter().position(|&v| v == b).unwrap()
                };
                let expected = series.iter().all(before);
                ensure!(jh.poset.leq(idx(a), idx(b)) == expected, "rep {k}: order differs at ({a},{b})");
            }
        }
        let count = jh.poset.count_linear_extensions().unwrap() as usize;
        ensure!(count == series.len(), "rep {k}: {count} linear extensions but {} series", series.len());
        series_total += count;
    }
    Ok(format!("100 reps, {series_total} composition series"))
}

fn round_trip_configs() -> Result<(String, Vec<Configuration>), String> {
    let mut out = Vec::new();
    for k in 0..100 {
        let x = Arc::new(random_rep(k));
        let jh = jh_poset(&x).unwrap().poset;
        let mut r = rng(rep_seed(k) ^ 0xABCD);
        let mut posets = vec![jh.clone()];
        for _ in 0..2 {
            let q = random_coarsening(&mut r, &jh);
            if !posets.contains(&q) {
                posets.push(q);
            }
        }
        for p in posets {
            let fam = coordinate_family(&x, &p);
            let c = build_from_subobjects(&fam).map_err(|e| format!("rep {k}: {e}"))?;
            let v = validate_config(&c);
            ensure!(v.is_empty(), "rep {k}: {}", v[0].describe(c.poset()));
            let back = extract_subobjects(&c).unwrap();
            ensure!(back.poset == fam.poset && back.table == fam.table, "rep {k}: family not reproduced");
            ensure!(*back.ambient == *fam.ambient, "rep {k}: ambient not reproduced");
            out.push(c);
        }
    }
    Ok((format!("{} configurations", out.len()), out))
}

fn additivity(configs: &[Configuration]) -> Outcome {
    let mut checks = 0;
    for (n, c) in configs.iter().enumerate() {
        let kap = kappa(c).map_err(|e| e.to_string())?;
        let q = c.quiver();
        for (i, label) in c.poset().labels().iter().enumerate() {
            let v = q.vertex_index(label).unwrap();
            let unit: Vec<usize> = (0..q.vertex_count()).map(|w| usize::from(w == v)).collect();
            ensure!(kap[i] == unit, "configuration {n}: kappa of {label} is {:?}", kap[i]);
        }
        for f in c.poset().fsets() {
            let sum: Vec<usize> =
                (0..q.vertex_count()).map(|v| f.iter().map(|i| kap[i][v]).sum()).collect();
            ensure!(c.sigma(f).dims() == sum.as_slice(), "configuration {n}: dimension vector not additive");
            checks += 1;
        }
    }
    Ok(format!("{checks} f-sets"))
}

fn direct_sums(configs: &[Configuration]) -> Outcome {
    let mut checks = 0;
    for (n, c) in configs.iter().enumerate() {
        let p = c.poset();
        let fs: Vec<Subset> = p.fsets().into_iter().filter(|s| !s.is_empty()).collect();
        for &j in &fs {
            for &k in &fs {
                let incomparable = j.iter().all(|a| k.iter().all(|b| !p.leq(a, b) && !p.leq(b, a)));
                if !incomparable {
                    continue;
                }
                let u = j.union(k);
                let sum = c
                    .iota(j, u)
                    .after(c.pi(u, j))
                    .unwrap()
                    .add(&c.iota(k, u).after(c.pi(u, k)).unwrap())
                    .unwrap();
                ensure!(sum.is_identity(), "configuration {n}: direct-sum identity fails");
                checks += 1;
            }
        }
    }
    ensure!(checks > 0, "no incomparable pairs were exercised");
    Ok(format!("{checks} incomparable pairs"))
}

fn gluing() -> Outcome {
    let mut r = rng(0x61_0E);
    let mut twisted = 0;
    for n in 0..50 {
        let spec = random_gluing(&mut r, 4);
        let (ip, phi) = FinitePoset::glue(&spec).map_err(|e| format!("gluing {n}: {e}"))?;
        let f = field(if r.gen_bool(0.5) { 2 } else { 3 });
        let c = random_config_on(&mut r, &ip, f, 6).config;
        let jset = ip.subset_from_labels(spec.sub_poset.labels()).unwrap();
        let inner = subconfiguration(&c, jset).unwrap();
        ensure!(inner.poset() == &spec.sub_poset, "gluing {n}: J order not restored");
        let kp = &spec.ambient_poset;
        let outer = quotient_configuration(&c, kp, &phi).unwrap();
        let (lp, lmap) = kp.restrict(spec.glue_fset);
        let psi_l: Vec<usize> = spec.psi.iter().map(|k| lmap.iter().position(|x| x == k).unwrap()).collect();
        let hat = quotient_configuration(&inner, &lp, &psi_l).unwrap();
        let check = subconfiguration(&outer, spec.glue_fset).unwrap();
        ensure!(hat == check, "gluing {n}: sub-then-quotient differs from quotient-then-sub");

        let verify = |s: &configcalc::config::Substitution, what: &str| -> Result<(), String> {
            for (w, name) in [(&s.sub_witness, "sub"), (&s.quot_witness, "quotient")] {
                ensure!(check_config_morphism(w).is_empty(), "gluing {n} ({what}): {name} witness fails");
                ensure!(w.is_isomorphism(), "gluing {n} ({what}): {name} witness not invertible");
            }
            ensure!(
                *s.sub_witness.source == subconfiguration(&s.result, s.inner_set).unwrap()
                    && *s.sub_witness.target == inner,
                "gluing {n} ({what}): sub witness endpoints"
            );
            ensure!(
                *s.quot_witness.source == quotient_configuration(&s.result, kp, &s.phi).unwrap()
                    && *s.quot_witness.target == outer,
                "gluing {n} ({what}): quotient witness endpoints"
            );
            ensure!(validate_config(&s.result).is_empty(), "gluing {n} ({what}): result invalid");
            Ok(())
        };
        let s = substitute(&outer, &inner, &spec, None).map_err(|e| format!("gluing {n}: {e}"))?;
        verify(&s, "equal")?;
        ensure!(s.result.poset() == &ip && s.phi == phi, "gluing {n}: glued order differs");
        let iso = solve_config_morphism(&c, &s.result, &RepMor::identity(c.top()))
            .map_err(|e| format!("gluing {n}: result not isomorphic to the source: {e}"))?;
        ensure!(iso.is_isomorphism(), "gluing {n}: comparison map not invertible");

        if f.modulus() == 3 {
            let check = Arc::new(check);
            let mut alpha = ConfigMorphism::identity(&check);
            alpha.target = Arc::new(hat);
            for m in alpha.alphas.values_mut() {
                *m = m.scale(2);
            }
            let s = substitute(&outer, &inner, &spec, Some(&alpha)).map_err(|e| format!("gluing {n}: {e}"))?;
            verify(&s, "twisted")?;
            twisted += 1;
        }
    }
    Ok(format!("50 gluings, {twisted} with a nontrivial identification"))
}

struct ImproveStats {
    best: Vec<Configuration>,
    split_pairs: usize,
    improvements: usize,
}

fn best_criterion() -> Result<(String, ImproveStats), String> {
    let mut r = rng(0xBE57);
    let mut stats = ImproveStats { best: Vec::new(), split_pairs: 0, improvements: 0 };
    let mut n_best = 0;
    for n in 0..200 {
        let c = random_config(&mut r, 4, 6).config;
        let b = is_best(&c).map_err(|e| e.to_string())?;
        let o = !oracle_improvable(&c);
        ensure!(b == o, "configuration {n}: is_best = {b}, exhaustive search = {o}");
        if b {
            n_best += 1;
            stats.best.push(c.clone());
        }
        let p = c.poset().covering_pairs();
        for (i, j) in p {
            let split = split_pair_test(&c, i, j).unwrap().split;
            ensure!(split == oracle_pair_improvable(&c, i, j), "configuration {n}: split test differs at ({i},{j})");
            let all = enumerate_improvements(&c, i, j).map_err(|e| e.to_string())?;
            if !split {
                ensure!(all.is_empty(), "configuration {n}: improvements at a non-split pair");
                continue;
            }
            stats.split_pairs += 1;
            let (si, sj) = (Subset::singleton(i), Subset::singleton(j));
            let d = hom_space(c.sigma(sj), c.sigma(si)).unwrap().len();
            let expected = (c.field().modulus() as usize).pow(d as u32);
            ensure!(all.len() == expected, "configuration {n}: {} improvements, expected {expected}", all.len());
            for (a, s) in all.iter().enumerate() {
                ensure!(validate_config(&s.result).is_empty(), "configuration {n}: improvement invalid");
                ensure!(coarsen(s, c.poset()).unwrap() == c, "configuration {n}: improvement does not quotient back");
                for t in &all[a + 1..] {
                    ensure!(s.result != t.result, "configuration {n}: repeated improvement");
                }
            }
            stats.improvements += all.len();
        }
        let found = best_search(&c).map_err(|e| e.to_string())?;
        ensure!(is_best(&found.best).unwrap(), "configuration {n}: search ended at a non-best configuration");
        ensure!(found.trail.len() <= c.poset().strict_pair_count(), "configuration {n}: trail too long");
        let mut prev = c.poset().clone();
        for step in &found.trail {
            let rep = FinitePoset::domination(step.result.poset(), &prev).unwrap();
            ensure!(rep.dominates && rep.steps == 1, "configuration {n}: trail step is not one-step domination");
            prev = step.result.poset().clone();
        }
        stats.best.push(found.best);
    }
    Ok((format!("200 configurations, {n_best} already best"), stats))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn load_config(name: &str) -> Configuration {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    match parse_document(&text, None).unwrap() {
        Document::Configuration(c) => c,
        d => panic!("{name}: {}", d.kind()),
    }
}

fn improvement_counts(stats: &ImproveStats) -> Outcome {
    let cases = [("ysplit_config.json", "v2", "v1", 1), ("double_s1_config.json", "1", "2", 2), ("a2_config.json", "v2", "v1", 0)];
    for (name, i, j, expected) in cases {
        let c = load_config(name);
        let p = c.poset();
        let all = enumerate_improvements(&c, p.index_of(i).unwrap(), p.index_of(j).unwrap()).unwrap();
        ensure!(all.len() == expected, "{name}: {} improvements, expected {expected}", all.len());
    }
    ensure!(stats.split_pairs > 0, "no split pairs were exercised");
    Ok(format!("{} split pairs, {} improvements, fixtures 1/2/0", stats.split_pairs, stats.improvements))
}

fn subconfigurations_best(stats: &ImproveStats) -> Outcome {
    let mut checks = 0;
    for (n, c) in stats.best.iter().enumerate() {
        for f in c.poset().fsets() {
            let s = subconfiguration(c, f).unwrap();
            ensure!(is_best(&s).unwrap(), "best configuration {n}: subconfiguration is not best");
            checks += 1;
        }
    }
    Ok(format!("{} best configurations, {checks} subconfigurations", stats.best.len()))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_configcalc")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn cli_determinism() -> Outcome {
    let mut runs = 0;
    for (name, i, j) in [("a2_config.json", "v2", "v1"), ("ysplit_config.json", "v2", "v1"), ("double_s1_config.json", "1", "2")] {
        let path = fixture(name);
        let path = path.to_str().unwrap();
        let shipped = std::fs::read(fixture(name)).unwrap();
        let c = load_config(name);
        ensure!(
            configcalc::doc::to_text(&configcalc::doc::config_value(&c)).into_bytes() == shipped,
            "{name}: parse then emit is not byte-identical"
        );
        let commands: Vec<Vec<&str>> = vec![
            vec!["validate", path],
            vec!["kappa", path],
            vec!["extract", path],
            vec!["split", path, i, j],
            vec!["enumerate", path, i, j],
            vec!["improve", path, i, j],
            vec!["best", path],
        ];
        for args in commands {
            let first = run_cli(&args);
            let second = run_cli(&args);
            ensure!(first.0 == 0, "{name}: {} exited with {}", args[0], first.0);
            ensure!(first == second, "{name}: {} is not deterministic", args[0]);
            runs += 2;
        }
    }
    let (code, out) = run_cli(&["best", fixture("ysplit_config.json").to_str().unwrap()]);
    ensure!(code == 0, "best exited with {code}");
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    ensure!(v["steps"] == 1, "best trail has {} steps", v["steps"]);
    let last = &v["trail"][0]["result"]["poset"]["relations"];
    ensure!(last.as_array().is_some_and(|a| a.is_empty()), "trail does not end at the discrete order");
    ensure!(v["best"]["poset"]["relations"].as_array().is_some_and(|a| a.is_empty()), "best is not discrete");
    Ok(format!("{runs} runs byte-identical"))
}

struct Criterion {
    number: usize,
    name: &'static str,
    limit: Option<Duration>,
}

fn report(c: &Criterion, elapsed: Duration, outcome: &Outcome) -> bool {
    let over = c.limit.is_some_and(|l| elapsed > l);
    let ok = outcome.is_ok() && !over;
    let detail = match outcome {
        Ok(d) if over => format!("{d}; exceeded {:?}", c.limit.unwrap()),
        Ok(d) => d.clone(),
        Err(e) => e.clone(),
    };
    println!(
        "[{}] {:>2} {}: {} ({:.2}s)",
        if ok { "PASS" } else { "FAIL" },
        c.number,
        c.name,
        detail,
        elapsed.as_secs_f64()
    );
    ok
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let mut all_ok = true;
    let mut check = |number, name, limit, elapsed, outcome: &Outcome| {
        all_ok &= report(&Criterion { number, name, limit }, elapsed, outcome);
    };

    let (o, t) = timed(poset_axioms);
    check(1, "poset axiom suite", secs(30), t, &o);

    let (o, t) = timed(jordan_holder);
    check(2, "Jordan-Hölder oracle", secs(60), t, &o);

    let (rt, t) = timed(round_trip_configs);
    let (o, configs) = match rt {
        Ok((d, cs)) => (Ok(d), cs),
        Err(e) => (Err(e), Vec::new()),
    };
    check(3, "subobject family round trip", secs(60), t, &o);

    let (o, t) = timed(|| if configs.is_empty() { Err("no configurations".into()) } else { additivity(&configs) });
    check(4, "dimension vector additivity", None, t, &o);

    let (o, t) = timed(gluing);
    check(5, "gluing and substitution", secs(60), t, &o);

    let (bc, t) = timed(best_criterion);
    let (o, stats) = match bc {
        Ok((d, s)) => (Ok(d), Some(s)),
        Err(e) => (Err(e), None),
    };
    check(6, "best criterion vs exhaustive search", secs(120), t, &o);

    let (o, t) = timed(|| stats.as_ref().ok_or("criterion 6 failed".to_string()).and_then(improvement_counts));
    check(7, "improvement count", None, t, &o);

    let (o, t) = timed(|| if configs.is_empty() { Err("no configurations".into()) } else { direct_sums(&configs) });
    check(8, "direct-sum identity", None, t, &o);

    let (o, t) = timed(|| stats.as_ref().ok_or("criterion 6 failed".to_string()).and_then(subconfigurations_best));
    check(9, "subconfigurations of best are best", None, t, &o);

    let (o, t) = timed(cli_determinism);
    check(10, "CLI determinism and fixtures", None, t, &o);

    if !all_ok {
        std::process::exit(1);
    }
}
