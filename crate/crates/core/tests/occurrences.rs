mod common;

use common::{as_pairs, brute_max_no, brute_no_general, brute_starts, dataset, episode};
use episodeseq::occurrences::{
    count_no_general, count_no_in, cover, find_distinct_starts, find_no_occurrences, occurrences,
};
use episodeseq::{FrequencyMode, SerialEpisode};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn distinct_starts_match_direct_scan(data in dataset(30), ep in episode(3)) {
        let found = find_distinct_starts(&data, &ep);
        let expected = brute_starts(&data, &ep);
        prop_assert_eq!(found.entries(), expected.as_slice());
        prop_assert!(found.verify(&data).is_ok());
    }

    #[test]
    fn no_occurrences_are_a_maximum_non_overlapped_set(data in dataset(30), ep in episode(3)) {
        let distinct = find_distinct_starts(&data, &ep);
        let no = find_no_occurrences(&distinct);
        let span = ep.span();
        for w in no.entries().windows(2) {
            prop_assert!(w[0].0 != w[1].0 || w[0].1 + span < w[1].1);
        }
        prop_assert!(no.entries().iter().all(|e| distinct.entries().contains(e)));
        prop_assume!(distinct.frequency() <= 16);
        prop_assert_eq!(no.frequency(), brute_max_no(distinct.entries(), span));
    }

    #[test]
    fn extending_an_episode_never_raises_its_frequency(
        data in dataset(30),
        ep in episode(2),
        sym in 0u32..5,
        gap in 1u32..=3,
    ) {
        if let Some(longer) = ep.extended(episodeseq::SymbolId(sym), gap) {
            for mode in [FrequencyMode::Distinct, FrequencyMode::NonOverlapped] {
                prop_assert!(
                    occurrences(&data, &longer, mode).frequency() <= occurrences(&data, &ep, mode).frequency()
                );
            }
        }
    }

    #[test]
    fn distinct_occurrences_of_injective_episodes_share_no_event(data in dataset(30), ep in episode(3)) {
        let occ = find_distinct_starts(&data, &ep);
        let covered = cover(&data, &occ).unwrap();
        prop_assert_eq!(covered.len(), occ.frequency() * ep.len());
    }

    #[test]
    fn general_count_matches_brute_force(data in dataset(16), ep in episode(3)) {
        let serial = SerialEpisode::new(ep.event_types().to_vec()).unwrap();
        let brute: usize = data.sequences().iter().map(|s| brute_no_general(&as_pairs(s), ep.event_types())).sum();
        prop_assert_eq!(count_no_general(&data, &serial), brute);
    }

    #[test]
    fn fixed_interval_count_is_at_most_the_general_count(data in dataset(30), ep in episode(3)) {
        let serial = SerialEpisode::new(ep.event_types().to_vec()).unwrap();
        let fixed = occurrences(&data, &ep, FrequencyMode::NonOverlapped).frequency();
        prop_assert!(fixed <= count_no_general(&data, &serial));
    }

    #[test]
    fn count_on_a_concatenation_is_at_least_the_sum(data in dataset(16), ep in episode(3)) {
        let s0 = as_pairs(data.sequence(0));
        let shift = 100;
        let joined: Vec<_> = s0.iter().copied().chain(s0.iter().map(|&(x, t)| (x, t + shift))).collect();
        let once = count_no_in(s0.iter().copied(), ep.event_types());
        prop_assert!(count_no_in(joined, ep.event_types()) >= 2 * once);
    }
}
