mod common;

use kctrace::cnf::{parse_dimacs, Cnf, Literal, Variable};
use kctrace::compiler::{compile, compile_observed, CompileConfig, SearchObserver, VarOrder};
use kctrace::lang_check::{check_decision_dnnf, check_fbdd, check_obdd, circuit_to_cnf, compile_guided, isomorphic};
use kctrace::nnf::{parse_nnf, Circuit, Node};
use kctrace::queries::{
    condition_circuit, entails_clause, enumerate_models, evaluate_polynomial, is_implicant, model_count, prob_equiv,
    EqOutcome,
};
use num_bigint::BigUint;
use proptest::prelude::*;

use common::*;

fn raw_cnf(max_vars: u32, max_clauses: usize) -> impl Strategy<Value = (u32, RawCnf)> {
    (1..=max_vars).prop_flat_map(move |n| {
        let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, pos)| if pos { v } else { -v });
        let clause = prop::collection::vec(lit, 1..=4);
        (Just(n), prop::collection::vec(clause, 0..=max_clauses))
    })
}

fn literal_set(n: u32) -> impl Strategy<Value = Vec<i32>> {
    prop::collection::btree_map(1..=n as i32, any::<bool>(), 0..=n as usize)
        .prop_map(|m| m.into_iter().map(|(v, pos)| if pos { v } else { -v }).collect())
}

fn order_of(n: u32) -> impl Strategy<Value = VarOrder> {
    Just((1..=n).collect::<Vec<u32>>())
        .prop_shuffle()
        .prop_map(|vs| VarOrder::new(vs.into_iter().map(|i| Variable::new(i).unwrap()).collect()).unwrap())
}

fn mode_config(n: u32) -> impl Strategy<Value = CompileConfig> {
    (0..3u8, order_of(n), any::<bool>(), any::<bool>()).prop_map(|(m, order, caching, up)| {
        let base = match m {
            0 => CompileConfig::free(),
            1 => CompileConfig::ordered(order),
            _ => CompileConfig::decomposed(),
        };
        base.caching(caching).unit_propagation(up)
    })
}

/// A formula, a compile configuration for it, and a literal set over it.
fn compiled_case() -> impl Strategy<Value = (u32, RawCnf, CompileConfig, Vec<i32>)> {
    raw_cnf(8, 24).prop_flat_map(|(n, raw)| (Just(n), Just(raw), mode_config(n), literal_set(n)))
}

fn count(f: &Cnf) -> BigUint {
    f.brute_force_count().unwrap()
}

fn lit(x: i32) -> Literal {
    Literal::from_dimacs(x).unwrap()
}

struct Instrumented {
    failures: Vec<String>,
}

impl SearchObserver for Instrumented {
    fn branched(&mut self, delta: &Cnf, var: Variable) {
        // Conditioning leaves `var` free over the same universe.
        let whole = count(delta) << 1;
        let split = count(&delta.condition(var.negative())) + count(&delta.condition(var.positive()));
        if whole != split {
            self.failures.push(format!("split on {var}: {whole} vs {split}"));
        }
    }

    fn decomposed(&mut self, _delta: &Cnf, parts: &[Cnf]) {
        let mut seen = std::collections::HashSet::new();
        for part in parts {
            for v in part.variables() {
                if !seen.insert(v) {
                    self.failures.push(format!("{v} in two components"));
                }
            }
        }
    }
}

fn has_literal_nodes(c: &Circuit) -> bool {
    c.reachable().iter().any(|&id| matches!(c.node(id), Node::Literal(_)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn conditioning_commutes((n, raw) in raw_cnf(6, 12), a in 1..=6i32, b in 1..=6i32, sa: bool, sb: bool) {
        prop_assume!(a != b && a <= n as i32 && b <= n as i32);
        let f = to_cnf(n, &raw);
        let (la, lb) = (lit(if sa { a } else { -a }), lit(if sb { b } else { -b }));
        prop_assert_eq!(f.condition(la).condition(lb), f.condition(lb).condition(la));
        prop_assert_eq!(f.condition(la).condition(lb), f.condition_all(&[la, lb]));
    }

    #[test]
    fn split_identity((n, raw) in raw_cnf(8, 20)) {
        let f = to_cnf(n, &raw);
        for v in f.variables() {
            let split = count(&f.condition(v.negative())) + count(&f.condition(v.positive()));
            prop_assert_eq!(count(&f) << 1, split);
        }
    }

    #[test]
    fn component_product((n, raw) in raw_cnf(10, 12)) {
        let f = to_cnf(n, &raw);
        prop_assume!(!f.has_empty_clause());
        let parts = f.components();
        let mut mentioned = 0usize;
        let mut product = BigUint::from(1u32);
        for part in &parts {
            let vars = part.variables();
            mentioned += vars.len();
            // Count the part over its own variables only.
            let own = count(part) >> (n as usize - vars.len());
            product *= own;
        }
        prop_assert_eq!(product << (n as usize - mentioned), count(&f));
        prop_assert_eq!(parts.iter().map(Cnf::len).sum::<usize>(), f.len());
    }

    #[test]
    fn propagation_preserves_count((n, raw) in raw_cnf(8, 20)) {
        let f = to_cnf(n, &raw);
        let p = f.unit_propagate();
        if p.conflict {
            prop_assert_eq!(count(&f), BigUint::from(0u32));
        } else {
            for l in &p.implied {
                prop_assert!(p.residual.clauses().iter().all(|c| c.literals().iter().all(|x| x.var() != l.var())));
            }
            prop_assert_eq!(count(&p.residual), count(&f) << p.implied.len());
            prop_assert!(p.residual.clauses().iter().all(|c| c.len() > 1));
        }
        prop_assert_eq!(p.conflict, f.propagation_conflict());
    }

    #[test]
    fn dimacs_round_trip((n, raw) in raw_cnf(8, 20)) {
        let f = to_cnf(n, &raw);
        let back = parse_dimacs(&f.to_string()).unwrap().cnf;
        let lits_of = |g: &Cnf| g.clauses().iter().map(|c| c.literals().to_vec()).collect::<Vec<_>>();
        prop_assert_eq!(back.num_vars(), f.num_vars());
        prop_assert_eq!(lits_of(&back), lits_of(&f));
    }

    #[test]
    fn compiled_count_matches_oracle((n, raw, cfg, _t) in compiled_case()) {
        let f = to_cnf(n, &raw);
        let c = compile(&f, &cfg).unwrap().circuit;
        let oracle = models(n, &raw);
        prop_assert_eq!(model_count(&c).unwrap(), BigUint::from(oracle.len()));
        for bits in 0..1u32 << n {
            prop_assert_eq!(c.evaluate(&assignment(n, bits)), oracle.contains(&bits));
        }
        prop_assert!(c.store().audit().is_ok());
    }

    #[test]
    fn instrumented_search_is_sound((n, raw, cfg, _t) in compiled_case()) {
        let f = to_cnf(n, &raw);
        let mut obs = Instrumented { failures: Vec::new() };
        compile_observed(&f, &cfg, &mut obs).unwrap();
        prop_assert!(obs.failures.is_empty(), "{:?}", obs.failures);
    }

    #[test]
    fn caching_never_changes_answers((n, raw, cfg, t) in compiled_case()) {
        let f = to_cnf(n, &raw);
        let on = compile(&f, &cfg.clone().caching(true)).unwrap().circuit;
        let off = compile(&f, &cfg.clone().caching(false)).unwrap().circuit;
        prop_assert_eq!(model_count(&on).unwrap(), model_count(&off).unwrap());
        prop_assert_eq!(entails_clause(&on, &lits(&t)), entails_clause(&off, &lits(&t)));
        prop_assert_eq!(is_implicant(&term(&t), &on).unwrap(), is_implicant(&term(&t), &off).unwrap());
        if cfg.order.is_some() {
            prop_assert!(isomorphic(&on, &off));
            prop_assert_eq!(on.stats(), off.stats());
        }
    }

    #[test]
    fn enumeration_is_a_disjoint_cover((n, raw, cfg, _t) in compiled_case()) {
        let c = compile(&to_cnf(n, &raw), &cfg).unwrap().circuit;
        let terms: Vec<_> = enumerate_models(&c).unwrap().collect();
        let oracle = models(n, &raw);
        for bits in 0..1u32 << n {
            let a = assignment(n, bits);
            let hits = terms.iter().filter(|t| t.is_satisfied_by(&a)).count();
            prop_assert_eq!(hits, oracle.contains(&bits) as usize);
        }
        let weight: BigUint = terms.iter().map(|t| BigUint::from(1u32) << (n as usize - t.len())).sum();
        prop_assert_eq!(weight, model_count(&c).unwrap());
    }

    #[test]
    fn entailment_agrees_with_enumeration((n, raw, cfg, clause) in compiled_case()) {
        let c = compile(&to_cnf(n, &raw), &cfg).unwrap().circuit;
        let by_models = enumerate_models(&c).unwrap().all(|t| {
            (0..1u32 << n)
                .map(|b| assignment(n, b))
                .filter(|a| t.is_satisfied_by(a))
                .all(|a| clause.iter().any(|&l| lit(l).eval(a[l.unsigned_abs() as usize - 1])))
        });
        prop_assert_eq!(entails_clause(&c, &lits(&clause)), by_models);
        prop_assert_eq!(by_models, entails(&models(n, &raw), &clause));
    }

    #[test]
    fn conditioning_counts_extensions((n, raw, cfg, t) in compiled_case()) {
        let c = compile(&to_cnf(n, &raw), &cfg).unwrap().circuit;
        let d = condition_circuit(&c, &term(&t));
        let extending = models(n, &raw).into_iter().filter(|&m| term_holds(&t, m)).count();
        prop_assert_eq!(model_count(&d).unwrap(), BigUint::from(extending));
        prop_assert_eq!(d.universe() as usize, n as usize - t.len());
        let report = match cfg.order {
            Some(ref order) => check_obdd(&d, Some(order)),
            None if cfg.mode == kctrace::compiler::Mode::Free => check_fbdd(&d),
            None => check_decision_dnnf(&d),
        };
        prop_assert!(report.verdict(), "{}", report);
    }

    #[test]
    fn polynomial_matches_boolean_evaluation((n, raw, cfg, _t) in compiled_case()) {
        let c = compile(&to_cnf(n, &raw), &cfg).unwrap().circuit;
        for bits in 0..1u32 << n {
            let a = assignment(n, bits);
            let mut point = vec![0u64];
            point.extend(a.iter().map(|&b| b as u64));
            prop_assert_eq!(evaluate_polynomial(&c, &point), c.evaluate(&a) as u64);
        }
    }

    #[test]
    fn equivalent_compilations_are_accepted(
        (n, raw, a, b) in raw_cnf(8, 24).prop_flat_map(|(n, raw)| (Just(n), Just(raw), mode_config(n), mode_config(n))),
        seed: u64,
    ) {
        let f = to_cnf(n, &raw);
        let x = compile(&f, &a).unwrap().circuit;
        let y = compile(&f, &b).unwrap().circuit;
        prop_assert_eq!(prob_equiv(&x, &y, seed, 5).unwrap().outcome, EqOutcome::EquivalentProbably);
    }

    #[test]
    fn membership_chain((n, raw, cfg, _t) in compiled_case()) {
        let c = compile(&to_cnf(n, &raw), &cfg).unwrap().circuit;
        let obdd = check_obdd(&c, None);
        let fbdd = check_fbdd(&c);
        let ddnnf = check_decision_dnnf(&c);
        prop_assert!(!obdd.verdict() || fbdd.verdict());
        prop_assert!(!fbdd.verdict() || ddnnf.verdict());
        prop_assert!(ddnnf.verdict());
        if let Some(order) = &cfg.order {
            prop_assert!(check_obdd(&c, Some(order)).verdict());
        }
        if let Some(order) = &obdd.order {
            prop_assert!(check_obdd(&c, Some(order)).verdict());
        }
    }

    #[test]
    fn guided_round_trip((n, raw, cfg, _t) in compiled_case()) {
        let c = compile(&to_cnf(n, &raw), &cfg).unwrap().circuit;
        let g = circuit_to_cnf(&c).unwrap();
        prop_assert_eq!(count(&g.base().unwrap()), model_count(&c).unwrap());
        let back = compile_guided(&g).unwrap();
        prop_assert!(isomorphic(&back, &c));
        prop_assert!(isomorphic(&c, &back));
        prop_assert_eq!(model_count(&back).unwrap(), model_count(&c).unwrap());
        if !has_literal_nodes(&c) {
            prop_assert_eq!(back.stats(), c.stats());
        }
    }

    #[test]
    fn serialization_round_trip((n, raw, cfg, t) in compiled_case()) {
        let c = compile(&to_cnf(n, &raw), &cfg).unwrap().circuit;
        let back = parse_nnf(&c.serialize()).unwrap();
        prop_assert!(isomorphic(&back, &c));
        prop_assert_eq!(back.stats(), c.stats());
        prop_assert_eq!(back.universe(), c.universe());
        let d = condition_circuit(&c, &term(&t));
        let again = parse_nnf(&d.serialize()).unwrap();
        prop_assert!(isomorphic(&again, &d));
    }

    #[test]
    fn isomorphism_is_an_equivalence((n, raw, a, b) in raw_cnf(6, 16).prop_flat_map(|(n, raw)| (Just(n), Just(raw), mode_config(n), mode_config(n)))) {
        let f = to_cnf(n, &raw);
        let x = compile(&f, &a).unwrap().circuit;
        let y = compile(&f, &b).unwrap().circuit;
        let z = parse_nnf(&y.serialize()).unwrap();
        prop_assert!(isomorphic(&x, &x));
        prop_assert_eq!(isomorphic(&x, &y), isomorphic(&y, &x));
        prop_assert_eq!(isomorphic(&x, &y), isomorphic(&x, &z));
        if isomorphic(&x, &y) {
            prop_assert_eq!(model_count(&x).unwrap(), model_count(&y).unwrap());
        }
    }
}

#[test]
fn circuits_cross_threads() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<Circuit>();
    let f = to_cnf(3, &running_raw());
    let c = compile(&f, &CompileConfig::decomposed()).unwrap().circuit;
    let counts: Vec<BigUint> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..4).map(|_| s.spawn(|| model_count(&c).unwrap())).collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert!(counts.iter().all(|k| *k == BigUint::from(4u32)));
}
