//! Acceptance suite: one PASS/FAIL line per criterion, with pinned time limits.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use wkb_core::bench::graph::{
    all_graphs_up_to_isomorphism, gen_3col, gen_independent_set, goal_query, in_every_maximum_independent_set,
    is_three_colorable, Graph,
};
use wkb_core::bench::lexmax::{gen_lexmax, TwoTwoFormula};
use wkb_core::bench::oracle::{raw_count, OracleTable, Signature};
use wkb_core::bench::random::{
    random_bcq, random_interpretation, random_iq, random_repair_kb, random_wkb, RandomKbParams,
};
use wkb_core::bench::{ar_entails, brave_entails, visa_fixture};
use wkb_core::configs::{enumerate_configurations, interpretation_satisfies_config};
use wkb_core::interp::{concept_extension, cost_of};
use wkb_core::kb::{subconcepts, ExtendedCost, Query, WeightedKB};
use wkb_core::reason::{Engine, Reasoner, Semantics};
use wkb_core::search::{filtrate, DomainBound};
use wkb_core::text::parse_query;

type Check = Result<String, String>;

const ORACLE_BUDGET: u64 = 1 << 18;

fn fin(k: u64) -> ExtendedCost {
    ExtendedCost::fin(k)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(text: &str) -> Query {
    parse_query(text).expect("query text")
}

fn visa_suite(r: &mut Reasoner) -> Check {
    let kb = visa_fixture();
    let (opt, complete) = r.optimal_cost(&kb).map_err(|e| e.to_string())?;
    ensure(opt == fin(1) && complete, || format!("opt = {opt}, complete = {complete}"))?;
    let cases = [
        ("q() := NoVisa(p)", Semantics::CertainOpt, true),
        ("q() := Visa(p)", Semantics::PossibleOpt, false),
        ("q() := hasNat(p, b)", Semantics::PossibleOpt, true),
        ("q() := hasNat(p, c)", Semantics::PossibleOpt, true),
        ("q() := NoVisa(p)", Semantics::CertainBounded(fin(2)), false),
        ("q() := Visa(p)", Semantics::PossibleBounded(fin(2)), true),
        ("q() := hasNat(p, c), Visa(p)", Semantics::PossibleBounded(fin(2)), false),
        ("q() := hasNat(p, c), Visa(p)", Semantics::PossibleBounded(fin(3)), true),
    ];
    for (text, sem, want) in &cases {
        let v = r.entails(&kb, &q(text), sem).map_err(|e| e.to_string())?;
        ensure(v.answer == *want, || format!("{text} under {sem}: got {}", v.answer))?;
        ensure(v.answer || v.complete, || format!("{text} under {sem}: negative answer is not complete"))?;
    }
    Ok(format!("{} verdicts, opt = 1, conjunction first satisfiable at cost 3", cases.len() + 1))
}

fn criterion1() -> Check {
    visa_suite(&mut Reasoner::default())
}

fn criterion2() -> Check {
    let graphs = all_graphs_up_to_isomorphism(6);
    ensure(graphs.len() == 156, || format!("{} graphs", graphs.len()))?;
    let mut r = Reasoner::default();
    let (mut colorable, mut complete_no) = (0, 0);
    for g in &graphs {
        let (kb, k) = gen_3col(g);
        let v = r.bcs(&kb, &fin(k)).map_err(|e| e.to_string())?;
        let truth = is_three_colorable(g);
        ensure(v.answer == truth, || format!("graph {g:?}: bcs = {}, colorer = {truth}", v.answer))?;
        colorable += usize::from(truth);
        complete_no += usize::from(!v.answer && v.complete);
    }
    Ok(format!("{} graphs agree ({colorable} 3-colorable, {complete_no} negatives proved outright)", graphs.len()))
}

fn criterion3() -> Check {
    let mut rng = StdRng::seed_from_u64(3);
    let mut r = Reasoner::default();
    let (mut checks, mut positives) = (0, 0);
    for _ in 0..50 {
        let n = rng.gen_range(1..=7);
        let g = Graph::random(n, rng.gen_range(0.2..0.6), &mut rng);
        for w in 0..n {
            let kb = gen_independent_set(&g, w).map_err(|e| e.to_string())?;
            let v = r.entails(&kb, &goal_query(w), &Semantics::CertainOpt).map_err(|e| e.to_string())?;
            let truth = in_every_maximum_independent_set(&g, w);
            ensure(v.answer == truth, || format!("{g:?}, w = {w}: reasoner {}, enumeration {truth}", v.answer))?;
            checks += 1;
            positives += usize::from(truth);
        }
    }
    Ok(format!("{checks} (graph, vertex) pairs agree ({positives} in every maximum set)"))
}

fn criterion4() -> Check {
    let mut rng = StdRng::seed_from_u64(4);
    let mut r = Reasoner::default();
    let (mut checks, mut positives) = (0, 0);
    for _ in 0..30 {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(1..=6);
        let phi = TwoTwoFormula::random_satisfiable(n, m, &mut rng);
        let nu = phi.lexmax_model().expect("satisfiable");
        for k in 1..=n {
            let (kb, query) = gen_lexmax(&phi, k).map_err(|e| e.to_string())?;
            let c = r.entails(&kb, &query, &Semantics::CertainOpt).map_err(|e| e.to_string())?;
            let p = r.entails(&kb, &query, &Semantics::PossibleOpt).map_err(|e| e.to_string())?;
            ensure(c.answer == nu[k - 1] && p.answer == nu[k - 1], || {
                format!("{phi}k = {k}: certain {}, possible {}, lexmax {}", c.answer, p.answer, nu[k - 1])
            })?;
            checks += 1;
            positives += usize::from(nu[k - 1]);
        }
    }
    Ok(format!("{checks} (formula, k) pairs agree ({positives} with x_k true)"))
}

/// A random tiny KB with 3 instance queries and 2 BCQs, and the largest
/// anonymous bound ≤ 2 whose enumeration fits the oracle budget. KBs whose
/// named part alone exceeds the budget are redrawn; the count is returned.
struct Instance {
    kb: WeightedKB,
    queries: Vec<Query>,
    anon: usize,
}

fn tiny_instances(seed: u64, count: usize) -> (Vec<Instance>, usize) {
    let mut rng = StdRng::seed_from_u64(seed);
    let p = RandomKbParams::default();
    let mut out = Vec::new();
    let mut redrawn = 0;
    while out.len() < count {
        let kb = random_wkb(&p, &mut rng);
        let mut queries: Vec<Query> = (0..3).filter_map(|_| random_iq(&kb, &mut rng)).collect();
        queries.extend((0..2).filter_map(|_| random_bcq(&kb, &mut rng)));
        let sig = Signature::of(&kb, &queries);
        let named = kb.individuals().len();
        let fits = |a| raw_count(named, &sig, a) <= ORACLE_BUDGET.into();
        match (0..=2).rev().find(|&a| fits(a)) {
            Some(anon) => out.push(Instance { kb, queries, anon }),
            None => redrawn += 1,
        }
    }
    (out, redrawn)
}

fn all_semantics() -> Vec<Semantics> {
    let ks = [fin(0), fin(1), fin(2), fin(3), ExtendedCost::Inf];
    let mut out: Vec<Semantics> = ks.iter().cloned().map(Semantics::CertainBounded).collect();
    out.extend(ks.iter().cloned().map(Semantics::PossibleBounded));
    out.push(Semantics::CertainOpt);
    out.push(Semantics::PossibleOpt);
    out
}

fn criterion5() -> Check {
    let (instances, redrawn) = tiny_instances(5, 200);
    let mut verdicts = 0;
    let mut positive_opt = 0;
    for (n, inst) in instances.iter().enumerate() {
        let table = OracleTable::build(&inst.kb, &inst.queries, inst.anon, ORACLE_BUDGET).map_err(|e| e.to_string())?;
        let mut r = Reasoner::with_bound(DomainBound::new(inst.anon, false));
        let ctx = || format!("instance {n} (anon {}): {:?}", inst.anon, inst.kb);
        for k in [fin(0), fin(1), fin(2), fin(3), ExtendedCost::Inf] {
            let v = r.bcs(&inst.kb, &k).map_err(|e| e.to_string())?;
            ensure(v.answer == table.bcs(&k), || format!("{} bcs k = {k}", ctx()))?;
            verdicts += 1;
        }
        let (opt, _) = r.optimal_cost(&inst.kb).map_err(|e| e.to_string())?;
        ensure(opt == table.opt(), || format!("{}: opt {opt} vs oracle {}", ctx(), table.opt()))?;
        positive_opt += usize::from(!opt.is_zero());
        for (i, query) in inst.queries.iter().enumerate() {
            for sem in all_semantics() {
                let v = r.entails(&inst.kb, query, &sem).map_err(|e| e.to_string())?;
                let want = table.entails(i, &sem);
                ensure(v.answer == want, || format!("{}: {query:?} under {sem}: {} vs oracle {want}", ctx(), v.answer))?;
                verdicts += 1;
            }
        }
    }
    Ok(format!("{verdicts} verdicts and 200 optimal costs agree ({positive_opt} with opt > 0, {redrawn} oversized KBs redrawn)"))
}

fn criterion6() -> Check {
    let mut rng = StdRng::seed_from_u64(6);
    let p = RandomKbParams::default();
    let mut done = 0;
    let mut max_cost = 0u128;
    while done < 100 {
        let kb = random_wkb(&p, &mut rng);
        let anon = rng.gen_range(0..=3);
        let i = random_interpretation(&kb.individuals(), &kb.concept_names(), &kb.role_names(), anon, 0.4, &mut rng);
        let cost = cost_of(&i, &kb).map_err(|e| e.to_string())?;
        let Some(c) = cost.to_u128_saturating() else { continue };
        let mut least = None;
        for k in 0..=c + 1 {
            let mut hit = false;
            for gamma in enumerate_configurations(&kb, k) {
                if interpretation_satisfies_config(&i, &kb, &gamma).map_err(|e| e.to_string())? {
                    hit = true;
                    break;
                }
            }
            if hit {
                least = Some(k);
                break;
            }
        }
        ensure(least == Some(c), || format!("cost {c}, least configured k {least:?} for {kb:?}"))?;
        max_cost = max_cost.max(c);
        done += 1;
    }
    Ok(format!("100 interpretations (costs up to {max_cost})"))
}

fn criterion7() -> Check {
    let mut search = Reasoner::default();
    let kb = visa_fixture();
    let mut compared = 0;
    for text in ["q() := NoVisa(p)", "q() := Visa(p)", "q() := hasNat(p, b)", "q() := hasNat(p, c)", "q() := hasNat(p, c), Visa(p)"] {
        for k in 0..=3 {
            for sem in [Semantics::CertainBounded(fin(k)), Semantics::PossibleBounded(fin(k))] {
                let a = search.entails_with(&kb, &q(text), &sem, Engine::Search).map_err(|e| e.to_string())?;
                let b = search.entails_with(&kb, &q(text), &sem, Engine::Configurations).map_err(|e| e.to_string())?;
                ensure(a.answer == b.answer, || format!("visa {text} under {sem}"))?;
                compared += 1;
            }
        }
    }
    let (instances, _) = tiny_instances(5, 200);
    for (n, inst) in instances.iter().enumerate() {
        let mut r = Reasoner::with_bound(DomainBound::new(inst.anon, false));
        for query in &inst.queries {
            for k in 0..=3 {
                for sem in [Semantics::CertainBounded(fin(k)), Semantics::PossibleBounded(fin(k))] {
                    let a = r.entails_with(&inst.kb, query, &sem, Engine::Search).map_err(|e| e.to_string())?;
                    let b = r.entails_with(&inst.kb, query, &sem, Engine::Configurations).map_err(|e| e.to_string())?;
                    ensure(a.answer == b.answer, || format!("instance {n}: {query:?} under {sem}"))?;
                    compared += 1;
                }
            }
        }
    }
    Ok(format!("{compared} finite-k verdicts identical across engines"))
}

fn criterion8() -> Check {
    let mut rng = StdRng::seed_from_u64(8);
    let p = RandomKbParams::default();
    let mut merged = 0;
    for _ in 0..100 {
        let kb = random_wkb(&p, &mut rng);
        let anon = rng.gen_range(0..=8);
        let i = random_interpretation(&kb.individuals(), &kb.concept_names(), &kb.role_names(), anon, 0.4, &mut rng);
        let j = filtrate(&i, &kb.tbox).map_err(|e| e.to_string())?;
        let s = subconcepts(&kb.tbox);
        let bound = (i.named().len() as u128).saturating_add(1u128.checked_shl(s.len() as u32).unwrap_or(u128::MAX));
        ensure((j.domain_size() as u128) <= bound, || format!("size {} exceeds {bound}", j.domain_size()))?;
        for c in &s {
            let (x, y) = (concept_extension(&i, c).map_err(|e| e.to_string())?, concept_extension(&j, c).map_err(|e| e.to_string())?);
            for e in 0..i.named().len() {
                ensure(x.contains(e) == y.contains(e), || format!("{c} differs on {}", i.label(e)))?;
            }
        }
        let (ci, cj) = (cost_of(&i, &kb).map_err(|e| e.to_string())?, cost_of(&j, &kb).map_err(|e| e.to_string())?);
        ensure(cj <= ci, || format!("cost grew from {ci} to {cj}"))?;
        merged += i.domain_size() - j.domain_size();
    }
    Ok(format!("100 interpretations ({merged} anonymous elements merged in total)"))
}

fn criterion9() -> Check {
    let (instances, _) = tiny_instances(9, 60);
    let mut consistent = 0;
    for (n, inst) in instances.iter().enumerate() {
        let mut r = Reasoner::with_bound(DomainBound::new(inst.anon, false));
        let (opt, _) = r.optimal_cost(&inst.kb).map_err(|e| e.to_string())?;
        for query in &inst.queries {
            let mut prev: Option<(bool, bool)> = None;
            for k in 0..=4u64 {
                let c = r.entails(&inst.kb, query, &Semantics::CertainBounded(fin(k))).map_err(|e| e.to_string())?.answer;
                let p = r.entails(&inst.kb, query, &Semantics::PossibleBounded(fin(k))).map_err(|e| e.to_string())?.answer;
                if let Some((pc, pp)) = prev {
                    ensure(pc || !c, || format!("instance {n}: certain not antitone at k = {k}"))?;
                    ensure(!pp || p, || format!("instance {n}: possible not monotone at k = {k}"))?;
                }
                if fin(k) < opt {
                    ensure(c && !p, || format!("instance {n}: k = {k} < opt but certain {c}, possible {p}"))?;
                }
                prev = Some((c, p));
            }
        }
        if opt.is_zero() {
            consistent += 1;
            let table = OracleTable::build(&inst.kb, &inst.queries, inst.anon, ORACLE_BUDGET).map_err(|e| e.to_string())?;
            for (i, query) in inst.queries.iter().enumerate() {
                let c = r.entails(&inst.kb, query, &Semantics::CertainOpt).map_err(|e| e.to_string())?.answer;
                let p = r.entails(&inst.kb, query, &Semantics::PossibleOpt).map_err(|e| e.to_string())?.answer;
                ensure(c == table.classically_entailed(i), || format!("instance {n}: certain-opt vs classical"))?;
                ensure(p == table.classically_satisfiable(i), || format!("instance {n}: possible-opt vs satisfiable"))?;
            }
        }
    }
    Ok(format!("60 KBs monotone in k; {consistent} consistent KBs match classical semantics"))
}

fn criterion10() -> Check {
    let mut rng = StdRng::seed_from_u64(10);
    let p = RandomKbParams { max_roles: 1, ..RandomKbParams::default() };
    let mut r = Reasoner::default();
    let (mut done, mut ar_yes, mut brave_yes) = (0, 0, 0);
    while done < 50 {
        let kb = random_repair_kb(&p, &mut rng);
        if !r.bcs(&wkb_core::bench::repairs::hard_kb(&kb, &[]), &fin(0)).map_err(|e| e.to_string())?.answer {
            continue;
        }
        let mut queries: Vec<Query> = (0..2).filter_map(|_| random_iq(&kb, &mut rng)).collect();
        queries.extend(random_bcq(&kb, &mut rng));
        for query in &queries {
            let ar = ar_entails(&kb, query).map_err(|e| e.to_string())?;
            let brave = brave_entails(&kb, query).map_err(|e| e.to_string())?;
            let c = r.entails(&kb, query, &Semantics::CertainOpt).map_err(|e| e.to_string())?.answer;
            let p = r.entails(&kb, query, &Semantics::PossibleOpt).map_err(|e| e.to_string())?.answer;
            ensure(c == ar, || format!("{kb:?} {query:?}: certain-opt {c}, AR {ar}"))?;
            ensure(!brave || p, || format!("{kb:?} {query:?}: brave but not possible-opt"))?;
            ar_yes += usize::from(ar);
            brave_yes += usize::from(brave);
        }
        done += 1;
    }
    Ok(format!("50 KBs: certain-opt = AR ({ar_yes} entailed), brave ⇒ possible-opt ({brave_yes} brave)"))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Duration, fn() -> Check); 10] = [
        (1, "example suite", Duration::from_secs(1), criterion1),
        (2, "3-colorability biconditional", Duration::from_secs(60), criterion2),
        (3, "independent-set biconditional", Duration::from_secs(120), criterion3),
        (4, "lexmax biconditional", Duration::from_secs(120), criterion4),
        (5, "oracle equivalence", Duration::from_secs(600), criterion5),
        (6, "configuration cost characterization", Duration::from_secs(120), criterion6),
        (7, "engine agreement", Duration::from_secs(600), criterion7),
        (8, "filtration invariants", Duration::from_secs(120), criterion8),
        (9, "monotonicity and consistent case", Duration::from_secs(600), criterion9),
        (10, "repair bridge", Duration::from_secs(300), criterion10),
    ];
    let only: Option<u32> = std::env::args().nth(1).and_then(|a| a.parse().ok());
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let (status, detail) = match result {
            Ok(d) if took <= limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; too slow")),
            Err(e) => ("FAIL", e),
        };
        failed += usize::from(status == "FAIL");
        println!("criterion {id:>2} {name}: {status} ({detail}) [{:.2}s, limit {}s]", took.as_secs_f64(), limit.as_secs());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
