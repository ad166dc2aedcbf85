use intersub::axiomatic::{check_ax, AxRule};
use intersub::harness::*;
use intersub::isc::{decide_with, prove, Mutation};
use intersub::lambda::check_typing;
use intersub::{check_isc, Sequent, Signature};

#[test]
fn default_run_has_no_failures() {
    let cfg = GenConfig {
        cases: 100,
        ..GenConfig::default()
    };
    let rep = run_difftest(&cfg);
    assert!(rep.passed(), "{}", rep.to_text());
    for p in &rep.properties {
        assert!(p.runs > 0, "{} never ran", p.name);
    }
}

#[test]
fn reports_are_reproducible() {
    let cfg = GenConfig {
        cases: 30,
        seed: 7,
        ..GenConfig::default()
    };
    assert_eq!(run_difftest(&cfg), run_difftest(&cfg));
    assert_eq!(gen_typing_derivation(&cfg, 20), gen_typing_derivation(&cfg, 20));
    let other = GenConfig { seed: 8, ..cfg.clone() };
    assert_ne!(gen_sequent(&cfg, 20), gen_sequent(&other, 20));
}

#[test]
fn empty_signature_passes_vacuously() {
    let cfg = GenConfig {
        signature: Signature::new(),
        cases: 20,
        ..GenConfig::default()
    };
    let rep = run_difftest(&cfg);
    assert!(rep.passed());
    assert!(rep.properties.iter().all(|p| p.runs == 0));
    assert!(gen_type(&cfg, 5).is_empty());
}

#[test]
fn width_mutant_is_flagged_with_shrunk_counterexamples() {
    let cfg = GenConfig {
        cases: 200,
        mutation: Mutation::SkipWidthCheck,
        ..GenConfig::default()
    };
    let rep = run_difftest(&cfg);
    let p = rep.property("decision").unwrap();
    assert!(p.failures > 0);
    assert!(!rep.passed());
    // Ω ⊢ Ω×Ω is the smallest member of the class the mutant gets wrong
    let sig = &cfg.signature;
    let s = Sequent::parse("Omega |- Omega * Omega", sig).unwrap();
    assert!(decide_with(&s, sig, Mutation::SkipWidthCheck).unwrap());
    assert!(!decide_with(&s, sig, Mutation::None).unwrap());
    let json: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
    assert_eq!(json["properties"][0]["name"], "decision");
    assert!(json["properties"][0]["counterexamples"][0]["seed"].is_u64());
}

#[test]
fn singleton_mutant_is_flagged() {
    let cfg = GenConfig {
        cases: 300,
        mutation: Mutation::FirstQualifiedSingleton,
        ..GenConfig::default()
    };
    assert!(run_difftest(&cfg).property("decision").unwrap().failures > 0);
}

#[test]
fn shrinking_keeps_the_failure() {
    let sig = Signature::arrow_product(["X", "Y"]);
    let s = Sequent::parse("X * Omega, Y -> X |- (Omega -> X) * Omega /\\ Y", &sig).unwrap();
    let fails = |t: &Sequent| {
        decide_with(t, &sig, Mutation::SkipWidthCheck).unwrap() != decide_with(t, &sig, Mutation::None).unwrap()
    };
    assert!(fails(&s));
    let small = shrink_sequent(&s, &sig, fails);
    assert!(fails(&small));
    assert!(small.context.len() <= s.context.len());
    let size = |q: &Sequent| q.context.iter().chain([&q.goal]).map(|t| t.size()).sum::<usize>();
    assert!(size(&small) < size(&s));
}

#[test]
fn generators_meet_their_contracts() {
    let cfg = GenConfig {
        seed: 11,
        ..GenConfig::default()
    };
    let sig = &cfg.signature;
    for t in gen_type(&cfg, 300) {
        t.validate(sig).unwrap();
        assert!(t.size() <= cfg.max_type_size);
        if t.size() == 1 {
            assert!(t.head().is_some() && t.children().is_empty());
        }
    }
    for s in gen_sequent(&cfg, 200) {
        s.validate(sig).unwrap();
        assert!(s.context.len() <= cfg.max_ctx_len);
    }
    for s in gen_derivable(&cfg, 200) {
        assert!(prove(&s, sig).unwrap().is_some(), "{s}");
    }
    for d in gen_ax_derivation(&cfg, 200) {
        check_ax(&d, sig).unwrap();
    }
    for rule in AxRule::ALL {
        let ds = gen_rule_instance(&cfg, rule, 20);
        if matches!(rule, AxRule::UnaryMono | AxRule::UnaryDistrib) {
            assert!(ds.is_empty());
            continue;
        }
        assert_eq!(ds.len(), 20);
        for d in ds {
            assert_eq!(d.rule(), rule);
            check_ax(&d, sig).unwrap();
        }
    }
    for (l, r, pos) in gen_cut_pair(&cfg, 50) {
        check_isc(&l, sig).unwrap();
        check_isc(&r, sig).unwrap();
        assert_eq!(&r.context()[pos], l.goal());
    }
    for arrow in [true, false] {
        for s in gen_homogeneous(&cfg, arrow, 100) {
            assert!(prove(&s, sig).unwrap().is_some(), "{s}");
        }
    }
    let ds = gen_typing_derivation(&cfg, 200);
    let with_redex = ds.iter().filter(|d| !d.term().find_redexes().is_empty()).count();
    assert!(with_redex > 100, "only {with_redex} subjects with redexes");
    for d in &ds {
        check_typing(d, sig).unwrap();
    }
    for (d, info) in gen_expansion_case(&cfg, 100) {
        check_typing(&d, sig).unwrap();
        assert!(info.expand_term(d.term()).is_some());
    }
}

#[test]
fn redex_bias_controls_redex_density() {
    let count = |bias: f64| {
        let cfg = GenConfig {
            redex_bias: bias,
            ..GenConfig::default()
        };
        gen_term(&cfg, 200)
            .iter()
            .map(|t| t.find_redexes().len())
            .sum::<usize>()
    };
    assert!(count(0.0) < count(0.8));
}

#[test]
fn merged_reports_add_up() {
    let a = run_difftest(&GenConfig {
        cases: 10,
        seed: 1,
        ..GenConfig::default()
    });
    let b = run_difftest(&GenConfig {
        cases: 10,
        seed: 2,
        ..GenConfig::default()
    });
    let mut m = a.clone();
    m.merge(b.clone());
    assert_eq!(m.cases, 20);
    for p in &m.properties {
        let runs = a.property(&p.name).unwrap().runs + b.property(&p.name).unwrap().runs;
        assert_eq!(p.runs, runs);
    }
}

#[test]
fn small_sweep_agrees() {
    let sig = Signature::arrow_product(["X"]);
    let rep = sweep(&sig, 1, 3, Mutation::None, 100_000);
    assert_eq!(rep.disagreements, 0);
    assert_eq!(
        rep.checked,
        enumerate_types(&sig, 3).len() * (1 + enumerate_types(&sig, 3).len())
    );
}
