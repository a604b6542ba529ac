use distill::cli::{reduced_document, simulation_rows};
use distill::doc::{InstanceDocument, Kind};
use distill_core::reduce::{reduce_full, ReduceOptions, StochasticInstance};
use distill_testkit::gen::{centred_target, dyn_zero_chain, planted_chain, random_automaton, random_target};
use distill_testkit::seeded;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn markov_documents_round_trip(seed in any::<u64>(), k in 3usize..=5) {
        let mut rng = seeded(seed);
        let chain = planted_chain(&mut rng, k);
        let targets = vec![random_target(&mut rng, k, 2, false), centred_target(&mut rng, k)];
        let doc = InstanceDocument {
            kind: Kind::Markov,
            matrix: chain.matrix,
            initial: chain.initial,
            targets,
            intrinsic_dim: vec![None, Some(1)],
            spec: random_automaton(&mut rng, 2, 4),
        };
        let again = InstanceDocument::parse(&doc.to_json_string()).unwrap();
        prop_assert_eq!(again, doc);
    }

    #[test]
    fn reduced_documents_round_trip(seed in any::<u64>(), k in 3usize..=5) {
        let mut rng = seeded(seed);
        let chain = planted_chain(&mut rng, k);
        let targets = vec![centred_target(&mut rng, k)];
        let inst = StochasticInstance::new(chain.matrix, chain.initial, targets, random_automaton(&mut rng, 1, 3)).unwrap();
        let red = reduce_full(&inst, &ReduceOptions::default()).unwrap();
        let doc = reduced_document(&red);
        prop_assert_eq!(InstanceDocument::parse(&doc.to_json_string()).unwrap(), doc);
    }
}

/// Replays the exported LDS document and maps its letters back through the
/// certificate; the result must match direct simulation of the chain.
#[test]
fn reduced_documents_replay_the_original_word() {
    let mut rng = seeded(61);
    for i in 0..40 {
        let chain = if i % 3 == 0 {
            dyn_zero_chain(&mut rng, 2 + i % 5)
        } else {
            planted_chain(&mut rng, 3 + i % 4)
        };
        let k = chain.matrix.rows();
        let targets = vec![centred_target(&mut rng, k), centred_target(&mut rng, k)];
        let inst =
            StochasticInstance::new(chain.matrix, chain.initial, targets, random_automaton(&mut rng, 2, 4)).unwrap();
        let red = reduce_full(&inst, &ReduceOptions::default()).unwrap();
        let cert = &red.certificate;
        let lds = InstanceDocument::parse(&reduced_document(&red).to_json_string()).unwrap();

        let window = 96;
        let direct: Vec<_> = simulation_rows(inst.matrix(), inst.initial(), inst.targets(), window)
            .into_iter()
            .map(|(_, l)| l)
            .collect();
        let reduced_steps = window.div_ceil(cert.c);
        let mut replayed = cert.prefix_letters.clone();
        for (_, l) in simulation_rows(&lds.matrix, &lds.initial, &lds.targets, reduced_steps) {
            replayed.extend((0..cert.c).map(|r| cert.original_letter(l, r)));
        }
        assert_eq!(&replayed[..window], &direct[..], "instance {i}");
    }
}
