use proptest::prelude::*;

use gifpo::circuit::{elaborate, library, parse_circuit, print_circuit, ElaboratedCircuit};
use gifpo::gif::{FalsePathDb, FpdEntry, Model};
use gifpo::sim::{run_coverage_frames, run_coverage_reference, CoverageOptions, Frame, Stimulus};
use gifpo::stuckat::{
    exhaustive_equivalence, fault_simulate, fault_simulate_serial, parse_netlist, print_netlist, remove_all_redundant,
};
use gifpo::synth::{lower, SynthStyle};
use gifpo::tpg::{compact, gen_random, greedy_select, test_set, Metric};

const SMALL: &[&str] = &["c1", "c2", "add2", "add4", "mux4", "mul3", "b01", "b02"];

fn small() -> impl Strategy<Value = ElaboratedCircuit> {
    prop::sample::select(SMALL).prop_map(|n| elaborate(&library::by_name(n).unwrap()))
}

fn frames(e: &ElaboratedCircuit, n: usize, seed: u64) -> Vec<Frame> {
    gen_random(e, n, seed).frames(e).unwrap()
}

fn style() -> impl Strategy<Value = SynthStyle> {
    prop_oneof![
        Just(SynthStyle::Ripple),
        Just(SynthStyle::AoTree),
        (0u64..1000, 0usize..40).prop_map(|(seed, steps)| SynthStyle::Rewrite { seed, steps }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn packed_coverage_matches_scalar(e in small(), n in 1usize..40, seed in any::<u64>()) {
        let m = Model::from_elaborated(&e);
        let fr = frames(&m.elab, n, seed);
        let opts = CoverageOptions { parallel: true, mark_unreachable: true };
        let packed = run_coverage_frames(&m.elab, &m.universe, &fr, opts);
        let scalar = run_coverage_frames(&m.elab, &m.universe, &fr, CoverageOptions { parallel: false, ..opts });
        prop_assert_eq!(&packed, &scalar);
        prop_assert_eq!(&packed, &run_coverage_reference(&m.elab, &m.universe, &fr, opts));
        let curve = packed.curve();
        prop_assert!(curve.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn lowering_preserves_function(e in small(), s in style()) {
        let n = lower(&e, s).unwrap();
        let back = parse_netlist(&print_netlist(&n)).unwrap();
        prop_assert_eq!(print_netlist(&back), print_netlist(&n));
        let cells = e.to_cells();
        prop_assert_eq!(gifpo::stuckat::exhaustive_compare(&cells, &n.to_cells()).unwrap(), None);
    }

    #[test]
    fn parallel_fault_sim_matches_serial(e in small(), s in style(), n in 1usize..30, seed in any::<u64>()) {
        let net = lower(&e, s).unwrap();
        let fr = frames(&e, n, seed);
        prop_assert_eq!(fault_simulate(&net, &fr).unwrap(), fault_simulate_serial(&net, &fr).unwrap());
    }

    #[test]
    fn redundancy_removal_keeps_function_and_detection(e in small(), s in style(), n in 1usize..20, seed in any::<u64>()) {
        let net = lower(&e, s).unwrap();
        let (reduced, _) = remove_all_redundant(&net).unwrap();
        prop_assert_eq!(exhaustive_equivalence(&net, &reduced).unwrap(), None);
        let fr = frames(&e, n, seed);
        let before = fault_simulate(&net, &fr).unwrap();
        let after = fault_simulate(&reduced, &fr).unwrap();
        prop_assert!(after.faults.len() - after.detected() <= before.faults.len() - before.detected());
    }

    #[test]
    fn selection_and_compaction_keep_coverage(e in small(), n in 1usize..60, seed in any::<u64>()) {
        let m = Model::from_elaborated(&e);
        let st = gen_random(&e, n, seed);
        let full = test_set(&m.elab, &st, Metric::GifPo(&m.universe)).unwrap();
        let sel = greedy_select(&m.elab, &m.universe, &st).unwrap();
        prop_assert_eq!(sel.coverage, full.coverage);
        prop_assert!(sel.origin.windows(2).all(|w| w[0] < w[1]));
        let c = compact(&m.elab, &sel, Metric::GifPo(&m.universe)).unwrap();
        prop_assert_eq!(c.coverage, sel.coverage);
        prop_assert!(c.len() <= sel.len());
        let net = lower(&e, SynthStyle::Ripple).unwrap();
        let sa = test_set(&e, &st, Metric::StuckAt(&net)).unwrap();
        let sc = compact(&e, &sa, Metric::StuckAt(&net)).unwrap();
        prop_assert_eq!(sc.coverage, sa.coverage);
    }

    #[test]
    fn stimulus_text_round_trips(e in small(), n in 0usize..20, seed in any::<u64>()) {
        let st = gen_random(&e, n, seed);
        prop_assert_eq!(Stimulus::parse(&st.to_text()).unwrap(), st);
    }

    #[test]
    fn fpd_lines_round_trip(
        gate in "[a-z][a-z0-9_/*]{0,12}",
        out in "(Y|S|CO)",
        m in "[01]{1,3}",
        po in "[a-z*][a-z0-9\\[\\]*]{0,6}",
        reason in "[ -~]{0,20}",
        author in "[a-zA-Z \"\\\\]{0,8}",
    ) {
        let e = FpdEntry { gate, out, m, po, reason, author };
        let db = FalsePathDb { entries: vec![e] };
        prop_assert_eq!(FalsePathDb::parse(&db.to_text()).unwrap(), db);
    }

    #[test]
    fn adder_and_mux_sources_round_trip(n in 1u32..12, k in 1u32..5) {
        for text in [library::adder_gnl(n), library::mux_tree_gnl(k), library::multiplier_gnl(n.min(6))] {
            let printed = print_circuit(&parse_circuit(&text).unwrap());
            prop_assert_eq!(print_circuit(&parse_circuit(&printed).unwrap()), printed);
        }
    }

    #[test]
    fn adder_universe_closed_form(n in 2usize..40) {
        let m = Model::new(&library::adder(n as u32));
        prop_assert_eq!(m.universe.len(), 4 + 11 * (n - 1) + 3 * (n - 2) * (n - 1));
    }
}
