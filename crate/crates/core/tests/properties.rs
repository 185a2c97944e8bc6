use std::sync::OnceLock;

use proptest::prelude::*;

use fjsp_mixer::bits::BitString;
use fjsp_mixer::circuit::MixerMode;
use fjsp_mixer::control::{chi, plan_transposition_path, shortest_transposition_path, Permutation};
use fjsp_mixer::fixtures;
use fjsp_mixer::instance::{decode, encode};
use fjsp_mixer::qaoa::{build_ansatz, LayerChain, Problem, QaoaParams};

fn wide() -> &'static (Problem, Vec<BitString>) {
    static CELL: OnceLock<(Problem, Vec<BitString>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = Problem::new(fixtures::two_jobs().with_horizon(4).unwrap());
        let f = p.feasible_set().unwrap();
        (p, f)
    })
}

fn two_jobs() -> &'static Problem {
    static CELL: OnceLock<Problem> = OnceLock::new();
    CELL.get_or_init(|| Problem::new(fixtures::two_jobs()))
}

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::new(v).unwrap())
}

proptest! {
    #[test]
    fn permutations_preserve_weight(
        (p, bits) in (1usize..40).prop_flat_map(|n| (permutation(n), prop::collection::vec(any::<bool>(), n)))
    ) {
        let x = BitString::from_bools(&bits);
        let y = p.apply(&x).unwrap();
        prop_assert_eq!(y.count_ones(), x.count_ones());
        prop_assert_eq!(p.inverse().apply(&y).unwrap(), x);
        for (i, &b) in bits.iter().enumerate() {
            prop_assert_eq!(y.get(p.image(i)), b);
        }
    }

    #[test]
    fn bit_strings_parse_back(bits in prop::collection::vec(any::<bool>(), 0..150)) {
        let x = BitString::from_bools(&bits);
        prop_assert_eq!(x.to_string().parse::<BitString>().unwrap(), x);
    }

    #[test]
    fn feasible_strings_round_trip_through_schedules(i in 0usize..72) {
        let (p, f) = wide();
        let s = decode(&p.index, &f[i]).unwrap();
        prop_assert_eq!(encode(&p.index, &s).unwrap(), f[i].clone());
    }

    #[test]
    fn predicate_matches_image_feasibility(i in 0usize..72, j in 0usize..62) {
        let (p, f) = wide();
        let perm = &p.family[j];
        let image = perm.apply(&f[i]).unwrap();
        prop_assert_eq!(chi(&p.graph, perm, &f[i]), p.graph.is_feasible(&image).unwrap());
    }

    #[test]
    fn shortest_paths_stay_feasible(i in 0usize..72, j in 0usize..72) {
        let (p, f) = wide();
        let family: Vec<Permutation> = p.family.iter().map(|q| (**q).clone()).collect();
        let plan = shortest_transposition_path(&p.graph, &family, &f[i], &f[j]).unwrap();
        prop_assert!(plan.len() <= 2 * p.graph.mark_count());
        for s in plan.prefix_images() {
            prop_assert!(p.graph.is_feasible(&s).unwrap());
        }
        prop_assert_eq!(plan.final_image(), f[j].clone());
        if let Ok(two_phase) = plan_transposition_path(&p.graph, &p.instance, &p.index, &f[i], &f[j]) {
            prop_assert!(two_phase.len() >= plan.len());
            prop_assert_eq!(two_phase.final_image(), f[j].clone());
        }
    }

    #[test]
    fn mixer_keeps_weight_and_feasibility(i in 0usize..72, beta in 0.0f64..std::f64::consts::PI) {
        let (p, f) = wide();
        let chain = LayerChain::new(p, MixerMode::Corrected);
        let dist = chain.run(&f[i], &[beta]).unwrap();
        let total: f64 = dist.values().sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        for y in dist.keys() {
            prop_assert_eq!(y.count_ones(), 3);
            prop_assert!(p.graph.is_feasible(y).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phases_never_change_the_marginal(
        i in 0usize..4,
        b1 in -3.2f64..3.2, b2 in -3.2f64..3.2,
        g1 in -3.2f64..3.2, g2 in -3.2f64..3.2,
    ) {
        let p = two_jobs();
        let x0 = p.feasible_set().unwrap()[i].clone();
        let with = QaoaParams::new(vec![b1, b2], vec![g1, g2]).unwrap();
        let without = QaoaParams::new(vec![b1, b2], vec![0.0, 0.0]).unwrap();
        let (c, s1) = build_ansatz(p, &x0, &with, MixerMode::Corrected).unwrap();
        let (_, s2) = build_ansatz(p, &x0, &without, MixerMode::Corrected).unwrap();
        let m1 = s1.marginal(c.layout.main());
        let m2 = s2.marginal(c.layout.main());
        prop_assert_eq!(m1.len(), m2.len());
        for (k, v) in &m1 {
            prop_assert!((m2[k] - v).abs() < 1e-12);
        }
        prop_assert!(s1.max_norm_deviation() < 1e-10);
    }
}
