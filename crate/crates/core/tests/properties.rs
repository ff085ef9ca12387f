use std::collections::HashSet;

use compound_codes::codec::{
    count_good_codewords, decode_threshold_in, distortion_radius, nearest_codeword, threshold_radius, Codebook,
    Constraint, DecodeStatus, Decoder,
};
use compound_codes::ensembles::AssembleOptions;
use compound_codes::rng::from_seed;
use compound_codes::sideinfo::{run_ccsi_batch, run_scsi_batch, RatePlan, SideInfoMode};
use compound_codes::{BitVector, CompoundCode, EnsembleParams};
use proptest::prelude::*;

/// `(m, k, dv, dc′)` combinations with `m·dv = k·dc′` and `m ≤ 16`.
const SHAPES: [(usize, usize, usize, usize); 4] = [(12, 9, 3, 4), (16, 12, 3, 4), (16, 8, 3, 6), (16, 10, 5, 8)];

fn code(seed: u64, shape: usize, k1_frac: f64, n: usize) -> CompoundCode {
    let (m, k, dv, dc) = SHAPES[shape];
    let params = EnsembleParams::new(n, m, k, 3, dv, dc, seed).unwrap();
    let k1 = ((k as f64) * k1_frac).round() as usize;
    CompoundCode::assemble_seeded(&params, &AssembleOptions::new(k1.min(k))).unwrap()
}

fn all_words(len: usize) -> impl Iterator<Item = BitVector> {
    (0u64..1 << len).map(move |v| BitVector::from_bools(&(0..len).map(|i| v >> i & 1 == 1).collect::<Vec<_>>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cosets_partition_the_base_code(seed in any::<u64>(), shape in 0usize..4, k1_frac in 0.0f64..=1.0) {
        let c = code(seed, shape, k1_frac, 20);
        let h1 = c.h1();
        let base: HashSet<BitVector> = all_words(c.m()).filter(|y| h1.matvec(y).unwrap().is_zero()).collect();
        let full: HashSet<BitVector> = all_words(c.m()).filter(|y| c.h().matvec(y).unwrap().is_zero()).collect();
        prop_assert!(full.is_subset(&base));

        let mut union = HashSet::new();
        for s in all_words(c.k2()) {
            if let Some(space) = c.coset(&s).unwrap() {
                let book = Codebook::from_space(&c, space).unwrap();
                for (y, _) in book.iter() {
                    prop_assert!(base.contains(&y));
                    prop_assert_eq!(c.h2().matvec(&y).unwrap(), s.clone());
                    prop_assert!(union.insert(y), "word in two cosets");
                }
            }
        }
        prop_assert_eq!(union, base);
    }

    #[test]
    fn exhaustive_encoder_and_good_counts(seed in any::<u64>(), shape in 0usize..4, d in 0.05f64..0.45) {
        let c = code(seed, shape, 0.5, 18);
        let book = Codebook::new(&c, &Constraint::Base).unwrap();
        let mut rng = from_seed(seed ^ 1);
        let s = BitVector::random_uniform(c.n(), &mut rng);
        let best = nearest_codeword(&book, &s).unwrap();
        let scan = book.iter().map(|(_, x)| x.distance(&s)).min().unwrap();
        prop_assert_eq!(best.distance, scan);
        prop_assert_eq!(c.encode(&best.y_hat).unwrap(), best.x_hat.clone());

        // at least one good codeword exactly when the best one is good
        let good = count_good_codewords(&c, &s, d, &Constraint::Base).unwrap();
        prop_assert_eq!(good > 0, best.distance <= distortion_radius(c.n(), d));
    }

    #[test]
    fn threshold_decisions_are_unique_within_radius(seed in any::<u64>(), shape in 0usize..4, p in 0.0f64..0.2) {
        let c = code(seed, shape, 1.0, 20);
        let book = Codebook::new(&c, &Constraint::Base).unwrap();
        let mut rng = from_seed(seed ^ 2);
        let v = BitVector::random(c.n(), 0.3, &mut rng);
        let eps = Some(1.0);
        let r = decode_threshold_in(&book, &v, p, eps).unwrap();
        let radius = threshold_radius(c.n(), p, eps);
        let inside: HashSet<BitVector> = book
            .iter()
            .filter(|(_, x)| x.distance(&v) as f64 <= radius)
            .map(|(_, x)| x)
            .collect();
        match r.status {
            DecodeStatus::Decoded => {
                prop_assert_eq!(inside.len(), 1);
                prop_assert!(inside.contains(r.x_hat.as_ref().unwrap()));
            }
            _ => prop_assert_ne!(inside.len(), 1),
        }
    }

    #[test]
    fn side_information_traces_keep_their_identities(seed in any::<u64>(), p in 0.0f64..0.15) {
        let c = code(seed, 1, 8.0 / 12.0, 24);
        let plan = RatePlan::for_code(SideInfoMode::Scsi, &c, 0.11, p, 0.02).unwrap();
        let batch = run_scsi_batch(&c, &plan, &Decoder::default(), 20, seed, true).unwrap();
        prop_assert_eq!(batch.invariant_violations, 0);
        for t in batch.traces.as_ref().unwrap() {
            prop_assert_eq!(&t.received ^ &t.quantized, &t.quantization_error ^ &t.noise);
            if let Some(y) = &t.decoded_y {
                prop_assert_eq!(c.h2().matvec(y).unwrap(), t.syndrome.clone());
            }
        }

        let plan = RatePlan::for_code(SideInfoMode::Ccsi, &c, 0.25, p, 0.0).unwrap();
        let batch = run_ccsi_batch(&c, &plan, &Decoder::MaximumLikelihood, 20, seed, true).unwrap();
        prop_assert_eq!(batch.invariant_violations, 0);
        for t in batch.traces.as_ref().unwrap().iter().filter(|t| t.feasible) {
            prop_assert_eq!(t.distortion, t.quantization_distortion);
            prop_assert_eq!(c.h2().matvec(&t.info_word).unwrap(), t.syndrome.clone());
            if t.recovered {
                prop_assert_eq!(t.decoded_message.as_ref(), Some(&t.syndrome));
            }
        }
    }
}
