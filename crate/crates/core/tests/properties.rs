use std::collections::BTreeSet;

use proptest::prelude::*;
use xcoref_core::autodiff::{ParamStore, Tensor};
use xcoref_core::coref::{antecedent_distribution, form_clusters};
use xcoref_core::corpus::{generate_toy_corpus, pseudo_translate, Span, TranslationMode, Vocabulary};
use xcoref_core::metrics::{b_cubed, ceaf_e, ceaf_e_similarity, muc};
use xcoref_core::model::{bucket, enumerate_spans, prune_spans, pruned_count, ScoredSpan};

/// Groups `0..labels.len()` by label; `None` leaves a mention out.
fn clustering(labels: &[Option<u8>]) -> Vec<Vec<u32>> {
    let mut groups: std::collections::BTreeMap<u8, Vec<u32>> = Default::default();
    for (m, l) in labels.iter().enumerate() {
        if let Some(l) = l {
            groups.entry(*l).or_default().push(m as u32);
        }
    }
    groups.into_values().collect()
}

fn labels(max_mentions: usize, max_label: u8) -> impl Strategy<Value = Vec<Option<u8>>> {
    prop::collection::vec(prop::option::weighted(0.8, 0..max_label), 1..max_mentions)
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Best φ4 alignment by enumerating every injective map from the smaller
/// side into the larger, in exact rational arithmetic.
fn brute_force_similarity(gold: &[Vec<u32>], pred: &[Vec<u32>]) -> f64 {
    let (small, large) = if gold.len() <= pred.len() { (gold, pred) } else { (pred, gold) };
    if small.is_empty() {
        return 0.0;
    }
    let mut lcm = 1u128;
    for a in small {
        for b in large {
            let d = (a.len() + b.len()) as u128;
            lcm = lcm / gcd(lcm, d) * d;
        }
    }
    let weight = |a: &Vec<u32>, b: &Vec<u32>| -> u128 {
        let sa: BTreeSet<_> = a.iter().collect();
        let overlap = b.iter().filter(|m| sa.contains(m)).count() as u128;
        2 * overlap * (lcm / (a.len() + b.len()) as u128)
    };
    fn search(i: usize, used: &mut Vec<bool>, w: &dyn Fn(usize, usize) -> u128, n: usize, m: usize) -> u128 {
        if i == n {
            return 0;
        }
        let mut best = 0;
        for j in 0..m {
            if !used[j] {
                used[j] = true;
                best = best.max(w(i, j) + search(i + 1, used, w, n, m));
                used[j] = false;
            }
        }
        best
    }
    let w = |i: usize, j: usize| weight(&small[i], &large[j]);
    let total = search(0, &mut vec![false; large.len()], &w, small.len(), large.len());
    let g = gcd(total, lcm).max(1);
    (total / g) as f64 / (lcm / g) as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ceaf_matches_brute_force(g in labels(14, 6), p in labels(14, 6)) {
        let (gold, pred) = (clustering(&g), clustering(&p));
        prop_assert_eq!(ceaf_e_similarity(&gold, &pred), brute_force_similarity(&gold, &pred));
    }

    #[test]
    fn metrics_are_bounded_and_perfect_on_identity(g in labels(20, 5), p in labels(20, 5)) {
        let (gold, pred) = (clustering(&g), clustering(&p));
        for prf in [muc(&gold, &pred), b_cubed(&gold, &pred), ceaf_e(&gold, &pred)] {
            for v in [prf.recall, prf.precision, prf.f1] {
                prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
            }
        }
        let keep: Vec<Vec<u32>> = gold.iter().filter(|c| c.len() >= 2).cloned().collect();
        if !keep.is_empty() {
            for prf in [muc(&keep, &keep), b_cubed(&keep, &keep), ceaf_e(&keep, &keep)] {
                prop_assert_eq!(prf.f1, 1.0);
            }
        }
    }

    #[test]
    fn swapping_sides_swaps_recall_and_precision(g in labels(16, 4), p in labels(16, 4)) {
        let (gold, pred) = (clustering(&g), clustering(&p));
        for (a, b) in [
            (muc(&gold, &pred), muc(&pred, &gold)),
            (b_cubed(&gold, &pred), b_cubed(&pred, &gold)),
            (ceaf_e(&gold, &pred), ceaf_e(&pred, &gold)),
        ] {
            prop_assert_eq!(a.recall, b.precision);
            prop_assert_eq!(a.precision, b.recall);
        }
    }

    #[test]
    fn antecedent_rows_sum_to_one(scores in prop::collection::vec(-30.0f64..30.0, 1..60)) {
        let p = antecedent_distribution(&scores);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn decoded_clusters_are_disjoint_and_non_singleton(choices in prop::collection::vec(any::<prop::sample::Index>(), 1..40),
                                                       dummy in prop::collection::vec(any::<bool>(), 40)) {
        let mentions: Vec<Span> = (0..choices.len()).map(|i| Span::new(i, i)).collect();
        let links: Vec<Option<usize>> = choices
            .iter()
            .enumerate()
            .map(|(i, c)| if i == 0 || dummy[i] { None } else { Some(c.index(i)) })
            .collect();
        let clusters = form_clusters(&mentions, &links).unwrap();
        let mut seen = BTreeSet::new();
        for c in &clusters {
            prop_assert!(c.len() >= 2);
            for m in c {
                prop_assert!(seen.insert(*m));
            }
        }
        for (i, l) in links.iter().enumerate() {
            if let Some(j) = l {
                prop_assert!(clusters.iter().any(|c| c.contains(&mentions[i]) && c.contains(&mentions[*j])));
            }
        }
    }

    #[test]
    fn pruning_keeps_non_crossing_sorted_subset(lengths in prop::collection::vec(1usize..8, 1..4),
                                                width in 1usize..5,
                                                ratio in 0.05f64..1.5,
                                                max in 1usize..30,
                                                seed in any::<u64>()) {
        let spans = enumerate_spans(&lengths, width);
        let expected: usize = lengths.iter().map(|&l| (0..l).map(|s| width.min(l - s)).sum::<usize>()).sum();
        prop_assert_eq!(spans.len(), expected);
        let scored: Vec<ScoredSpan> = spans
            .iter()
            .enumerate()
            .map(|(i, &span)| ScoredSpan { span, index: i, score: ((seed as f64 + i as f64) * 1.37).sin() })
            .collect();
        let tokens: usize = lengths.iter().sum();
        let kept = prune_spans(&scored, tokens, ratio, max);
        prop_assert!(kept.len() <= pruned_count(tokens, ratio, max));
        prop_assert!(kept.windows(2).all(|w| w[0].span < w[1].span));
        for a in &kept {
            prop_assert!(kept.iter().all(|b| !a.span.crosses(&b.span)));
        }
    }

    #[test]
    fn buckets_are_monotone(d in 0usize..200) {
        prop_assert!(bucket(d) <= bucket(d + 1));
        prop_assert!(bucket(d) < 8);
    }

    #[test]
    fn checkpoint_round_trip_is_byte_identical(values in prop::collection::vec(-1e6f64..1e6, 1..24), step in any::<u32>()) {
        let mut store = ParamStore::new();
        store.insert("b", Tensor::from_vec(1, values.len(), values.clone()).unwrap(), true).unwrap();
        store.insert("a", Tensor::from_vec(values.len(), 1, values).unwrap(), false).unwrap();
        store.set_step(step as u64);
        let bytes = store.to_bytes();
        let back = ParamStore::from_bytes(&bytes).unwrap();
        prop_assert_eq!(back.to_bytes(), bytes);
    }

    #[test]
    fn xenoglot_translation_preserves_sentence_shape(seed in any::<u64>()) {
        let doc = &generate_toy_corpus(1, seed % 50)[0];
        let p = pseudo_translate(doc, TranslationMode::Xenoglot, seed);
        prop_assert_eq!(p.target_sentence_lengths(), doc.sentence_lengths());
        for (s, t) in doc.sentences.iter().zip(&p.target_sentences) {
            let mut a: Vec<String> = s.iter().map(|w| format!("zx_{}", w.chars().rev().collect::<String>())).collect();
            let mut b = t.clone();
            a.sort();
            b.sort();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn vocabulary_round_trips_tokens(seed in 0u64..40) {
        let docs = generate_toy_corpus(2, seed);
        let vocab = Vocabulary::build(&docs).unwrap();
        for d in &docs {
            let ids = vocab.encode(&d.sentences);
            let back: Vec<Vec<String>> =
                ids.iter().map(|s| s.iter().map(|&i| vocab.token(i).unwrap().to_string()).collect()).collect();
            prop_assert_eq!(&back, &d.sentences);
        }
    }
}
