mod common;

use common::{dataset, episode, planted};
use episodeseq::mdl::{
    decode, encode, overlap_score, select, total_length, EncodingTable, SelectConfig, Selection,
};
use episodeseq::{EventDataset, FixedIntervalEpisode, FrequencyMode};
use proptest::prelude::*;

fn mode() -> impl Strategy<Value = FrequencyMode> {
    prop_oneof![
        Just(FrequencyMode::Distinct),
        Just(FrequencyMode::NonOverlapped)
    ]
}

fn multi_node_set(max: usize) -> impl Strategy<Value = Vec<FixedIntervalEpisode>> {
    prop::collection::vec(episode(3), 0..=max).prop_map(|eps| {
        let mut out: Vec<FixedIntervalEpisode> = Vec::new();
        for ep in eps {
            if ep.len() >= 2 && !out.contains(&ep) {
                out.push(ep);
            }
        }
        out
    })
}

fn round_trip(data: &EventDataset, selection: &Selection) -> Result<(), TestCaseError> {
    let table = encode(data, selection).unwrap();
    let decoded = decode(&table).unwrap();
    prop_assert_eq!(decoded.to_text(), data.to_text());
    let csv = table.to_csv();
    let reparsed = EncodingTable::parse_csv(&csv).unwrap();
    prop_assert_eq!(reparsed.to_csv(), csv);
    prop_assert_eq!(decode(&reparsed).unwrap().to_text(), data.to_text());
    let cost: usize = table.rows.iter().map(|r| r.cost()).sum();
    prop_assert_eq!(total_length(&table), cost);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn selected_summaries_decode_exactly(data in dataset(40), max_gap in 1u32..=4, mode in mode()) {
        let selection = select(&data, SelectConfig::new(max_gap, None, mode)).unwrap();
        for s in &selection.episodes {
            prop_assert!(s.episode.len() >= 2);
            prop_assert!(s.overlap_score > 0);
        }
        round_trip(&data, &selection)?;
    }

    #[test]
    fn summaries_of_patterned_data_decode_exactly((data, _) in planted(30), mode in mode()) {
        let selection = select(&data, SelectConfig::new(3, None, mode)).unwrap();
        round_trip(&data, &selection)?;
    }

    #[test]
    fn forced_summaries_decode_exactly(data in dataset(40), eps in multi_node_set(4), mode in mode()) {
        let selection = Selection::forced(&data, &eps, mode).unwrap();
        round_trip(&data, &selection)?;
    }

    #[test]
    fn selection_never_lengthens_the_encoding(data in dataset(40), max_gap in 1u32..=4, mode in mode()) {
        let none = Selection::forced(&data, &[], mode).unwrap();
        let baseline = total_length(&encode(&data, &none).unwrap());
        let selection = select(&data, SelectConfig::new(max_gap, None, mode)).unwrap();
        let mined = total_length(&encode(&data, &selection).unwrap());
        prop_assert!(mined <= baseline);
        prop_assert_eq!(mined < baseline, !selection.is_empty());
    }

    #[test]
    fn adding_a_positive_episode_shortens_the_encoding(
        (data, alpha) in planted(30),
        base in multi_node_set(3),
        mode in mode(),
    ) {
        prop_assume!(!base.contains(&alpha));
        prop_assume!(overlap_score(&data, &alpha, &base, mode) > 0);
        let before = total_length(&encode(&data, &Selection::forced(&data, &base, mode).unwrap()).unwrap());
        let mut grown = base.clone();
        grown.push(alpha);
        let after = total_length(&encode(&data, &Selection::forced(&data, &grown, mode).unwrap()).unwrap());
        prop_assert!(after < before, "{} !< {}", after, before);
    }

    #[test]
    fn top_k_caps_the_selection(data in dataset(40), k in 1usize..=3) {
        let selection = select(&data, SelectConfig::new(3, Some(k), FrequencyMode::NonOverlapped)).unwrap();
        prop_assert!(selection.len() <= k);
    }
}
