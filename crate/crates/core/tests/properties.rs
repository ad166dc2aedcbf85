use intersub::harness::{enumerate_types, gen_derivable, gen_sequent, gen_term, gen_type, GenConfig};
use intersub::isc::{derive_exchange, derive_interl_e, derive_weaken_gen, prove, prove_exhaustive};
use intersub::lambda::Term;
use intersub::{check_isc, parse_type, Sequent, Signature, Type};
use proptest::prelude::*;

fn cfg(seed: u64) -> GenConfig {
    GenConfig {
        seed,
        max_type_size: 7,
        max_ctx_len: 3,
        ..GenConfig::default()
    }
}

#[test]
fn enumeration_counts() {
    // over {X, Y, Ω, →, ×}: 3 leaves, no size-2 or size-4 types, and
    // 3 binary forms (→, ×, ∩) over 3 × 3 leaf pairs at size 3
    let sig = Signature::arrow_product(["X", "Y"]);
    let ts = enumerate_types(&sig, 4);
    assert_eq!(ts.len(), 3 + 27);
    assert_eq!(enumerate_types(&sig, 5).len(), 30 + 3 * 2 * 3 * 27);
    let mut dedup = ts.clone();
    dedup.sort_by_key(|t| t.to_string());
    dedup.dedup();
    assert_eq!(dedup.len(), ts.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn types_print_and_parse_back(seed in any::<u64>()) {
        let c = cfg(seed);
        for t in gen_type(&c, 20) {
            let text = t.to_string();
            prop_assert_eq!(parse_type(&text, &c.signature).unwrap(), t);
        }
    }

    #[test]
    fn terms_print_and_parse_back(seed in any::<u64>()) {
        for t in gen_term(&GenConfig { seed, max_term_depth: 6, ..GenConfig::default() }, 10) {
            let text = t.to_string();
            let back = Term::parse(&text).unwrap();
            prop_assert_eq!(back.to_string(), text);
            prop_assert_eq!(back, t);
        }
    }

    #[test]
    fn prover_agrees_with_search(seed in any::<u64>()) {
        let c = GenConfig { seed, max_type_size: 5, ..GenConfig::default() };
        for s in gen_sequent(&c, 8) {
            let fast = prove(&s, &c.signature).unwrap();
            let slow = prove_exhaustive(&s, &c.signature, 500_000).unwrap().verdict();
            if let Some(v) = slow {
                prop_assert_eq!(fast.is_some(), v, "{}", s);
            }
            if let Some(d) = fast {
                check_isc(&d, &c.signature).unwrap();
                prop_assert_eq!(d.conclusion(), &s);
            }
        }
    }

    #[test]
    fn structural_rules_keep_proofs_valid(seed in any::<u64>(), extra in 0usize..3) {
        let c = cfg(seed);
        let sig = &c.signature;
        let pad = gen_type(&c, 1).pop().unwrap();
        for s in gen_derivable(&c, 6) {
            let d = prove(&s, sig).unwrap().unwrap();
            let pos = extra.min(s.context.len());
            let w = derive_weaken_gen(&d, pos, &pad).unwrap();
            check_isc(&w, sig).unwrap();
            let mut ctx = s.context.clone();
            ctx.insert(pos, pad.clone());
            prop_assert_eq!(w.conclusion(), &Sequent::new(ctx, s.goal.clone()));

            let perm: Vec<usize> = (0..s.context.len()).rev().collect();
            let e = derive_exchange(&d, &perm).unwrap();
            check_isc(&e, sig).unwrap();
            let rev: Vec<Type> = s.context.iter().rev().cloned().collect();
            prop_assert_eq!(e.conclusion(), &Sequent::new(rev, s.goal.clone()));

            if let Some(Type::Inter(a, b)) = s.context.first() {
                let m = derive_interl_e(&d, 0).unwrap();
                check_isc(&m, sig).unwrap();
                prop_assert_eq!(&m.context()[..2], &[(**a).clone(), (**b).clone()][..]);
            }
        }
    }
}
