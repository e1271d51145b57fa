//! Randomized cross-checks against brute force.

use dnfenum::cli::{build_enumerator, enumerate, replay_flips, AlgoSpec, Algo, Instance, Mode, OutputFormat};
use dnfenum::format::write_sets;
use dnfenum::monotone::{minimize_monotone, normalize_unate, MonotoneDnf};
use dnfenum::setunion::{brute_force_unions, enum_unions, unions_by_closure, SetFamily};
use dnfenum::stats::collect_models;
use dnfenum::{brute_force_models, parse_dnf, parse_sets, Dnf, Lit, Term};
use proptest::prelude::*;

const SIGNED: [Algo; 7] = [
    Algo::UnionPriority,
    Algo::UnionOrdered,
    Algo::Flashlight,
    Algo::Kdnf,
    Algo::KdnfHybrid,
    Algo::Avg,
    Algo::Avg,
];

fn term(n: usize, monotone: bool) -> impl Strategy<Value = Term> {
    proptest::collection::btree_map(1..=n, any::<bool>(), 1..=n.min(4))
        .prop_map(move |m| Term::new(m.into_iter().map(|(v, s)| Lit::new(v, monotone || s)).collect()).unwrap())
}

fn dnf(monotone: bool) -> impl Strategy<Value = Dnf> {
    (1usize..=8).prop_flat_map(move |n| {
        proptest::collection::vec(term(n, monotone), 1..=12).prop_map(move |ts| Dnf::new(n, ts).unwrap())
    })
}

fn family() -> impl Strategy<Value = SetFamily> {
    (1usize..=10).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::btree_set(1..=n, 1..=n), 1..=8)
            .prop_map(move |sets| SetFamily::new(n, sets.into_iter().map(|s| s.into_iter().collect())).unwrap())
    })
}

fn oracle(d: &Dnf) -> Vec<Vec<bool>> {
    brute_force_models(d).unwrap().iter().map(|a| a.bits().to_vec()).collect()
}

fn sorted(mut v: Vec<Vec<bool>>) -> Vec<Vec<bool>> {
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dnf_text_round_trip(d in dnf(false)) {
        // The text form is canonical: same terms, and printing is a fixed point.
        let back = parse_dnf(&d.to_string()).unwrap();
        prop_assert_eq!(back.num_vars(), d.num_vars());
        prop_assert_eq!(back.sorted_terms(), d.sorted_terms());
        prop_assert_eq!(back.to_string(), d.to_string());
    }

    #[test]
    fn sets_text_round_trip(f in family()) {
        let mut buf = Vec::new();
        write_sets(&mut buf, f.n(), f.sets()).unwrap();
        let (n, sets) = parse_sets(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(SetFamily::new(n, sets).unwrap(), f);
    }

    #[test]
    fn signed_algorithms_match_brute_force(d in dnf(false)) {
        let expect = oracle(&d);
        let inst = Instance::Dnf(d);
        for (i, algo) in SIGNED.into_iter().enumerate() {
            let mode = if i == SIGNED.len() - 1 { Mode::T10 } else { Mode::T11 };
            let spec = AlgoSpec { mode, ..AlgoSpec::new(algo) };
            let got = collect_models(&mut *build_enumerator(&spec, &inst).unwrap());
            prop_assert_eq!(got.len(), expect.len(), "{:?} {:?}", algo, mode);
            prop_assert_eq!(sorted(got), expect.clone(), "{:?} {:?}", algo, mode);
        }
    }

    #[test]
    fn monotone_algorithms_match_brute_force(d in dnf(true), flip in any::<u8>()) {
        // Flipping a fixed set of variables keeps the input unate.
        let flipped = Dnf::new(d.num_vars(), d.terms().iter().map(|t| {
            Term::new(t.lits().iter().map(|l| if flip >> (l.var() - 1) & 1 == 1 { l.negate() } else { *l }).collect()).unwrap()
        })).unwrap();
        let expect = oracle(&flipped);
        let inst = Instance::Dnf(flipped);
        for algo in [Algo::MonotoneRs, Algo::MonotoneAvg, Algo::MonotoneLog] {
            let got = collect_models(&mut *build_enumerator(&AlgoSpec::new(algo), &inst).unwrap());
            prop_assert_eq!(got.len(), expect.len(), "{:?}", algo);
            prop_assert_eq!(sorted(got), expect.clone(), "{:?}", algo);
        }
    }

    #[test]
    fn minimizing_keeps_models(d in dnf(true)) {
        let m = MonotoneDnf::new(d.clone()).unwrap();
        prop_assert_eq!(oracle(minimize_monotone(&m).dnf()), oracle(&d));
    }

    #[test]
    fn unate_normalization_is_an_involution(d in dnf(true)) {
        let (m, mask) = normalize_unate(&d).unwrap();
        prop_assert!(mask.iter().all(|&b| !b));
        prop_assert_eq!(m.dnf(), &d);
    }

    #[test]
    fn flips_replay_to_bits(d in dnf(false)) {
        let inst = Instance::Dnf(d);
        for algo in [Algo::Flashlight, Algo::Kdnf, Algo::Avg] {
            let spec = AlgoSpec::new(algo);
            let (mut bits, mut flips) = (Vec::new(), Vec::new());
            enumerate(&spec, &inst, None, Some(OutputFormat::Bits), false, &mut bits).unwrap();
            enumerate(&spec, &inst, None, Some(OutputFormat::Flips), false, &mut flips).unwrap();
            let replayed: String = replay_flips(std::str::from_utf8(&flips).unwrap())
                .unwrap()
                .iter()
                .map(|m| m.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>() + "\n")
                .collect();
            prop_assert_eq!(replayed, String::from_utf8(bits).unwrap());
        }
    }

    #[test]
    fn set_unions_match_brute_force(f in family()) {
        let expect = brute_force_unions(&f);
        prop_assert_eq!(&unions_by_closure(&f), &expect);
        let got = collect_models(&mut enum_unions(&f));
        prop_assert_eq!(got.len(), expect.len());
        prop_assert_eq!(sorted(got), expect);
    }
}
