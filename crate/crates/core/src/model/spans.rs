use alloc::vec::Vec;

use crate::corpus::Span;

/// Bucket index for a width or distance: `≤1, 2, 3, 4, 5–7, 8–15, 16–31, 32+`.
pub fn bucket(d: usize) -> usize {
    match d {
        0..=1 => 0,
        2 => 1,
        3 => 2,
        4 => 3,
        5..=7 => 4,
        8..=15 => 5,
        16..=31 => 6,
        _ => 7,
    }
}

/// Every span of width ≤ `max_width` inside a sentence, ordered by
/// `(start, end)`.
pub fn enumerate_spans(sentence_lengths: &[usize], max_width: usize) -> Vec<Span> {
    let mut out = Vec::new();
    let mut offset = 0;
    for &len in sentence_lengths {
        for start in offset..offset + len {
            let last = (start + max_width).min(offset + len);
            for end in start..last {
                out.push(Span::new(start, end));
            }
        }
        offset += len;
    }
    out
}

/// A candidate span with its position in the enumerated list and its
/// mention score.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoredSpan {
    pub span: Span,
    pub index: usize,
    pub score: f64,
}

/// `min(⌈ratio · token_count⌉, max_count)`.
pub fn pruned_count(token_count: usize, ratio: f64, max_count: usize) -> usize {
    let k = libm::ceil(ratio * token_count as f64) as usize;
    k.min(max_count)
}

/// Keeps up to [`pruned_count`] spans by descending mention score (ties to
/// the lexicographically first span), skipping any span that crosses an
/// already kept one, and returns them ordered by `(start, end)`.
pub fn prune_spans(scored: &[ScoredSpan], token_count: usize, ratio: f64, max_count: usize) -> Vec<ScoredSpan> {
    let k = pruned_count(token_count, ratio, max_count);
    let mut order: Vec<&ScoredSpan> = scored.iter().collect();
    order.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.span.cmp(&b.span)));
    let mut kept: Vec<ScoredSpan> = Vec::with_capacity(k);
    for cand in order {
        if kept.len() >= k {
            break;
        }
        if kept.iter().any(|s| s.span.crosses(&cand.span)) {
            continue;
        }
        kept.push(*cand);
    }
    kept.sort_by(|a, b| a.span.cmp(&b.span));
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn scored(spans: &[(usize, usize)], scores: &[f64]) -> Vec<ScoredSpan> {
        spans
            .iter()
            .zip(scores)
            .enumerate()
            .map(|(i, (&(s, e), &score))| ScoredSpan { span: Span::new(s, e), index: i, score })
            .collect()
    }

    #[test]
    fn exhaustive_enumeration_of_short_sentence() {
        let spans = enumerate_spans(&[3], 2);
        let expected: Vec<Span> = [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2)].iter().map(|&(s, e)| Span::new(s, e)).collect();
        assert_eq!(spans, expected);
        assert_eq!(enumerate_spans(&[7], 1).len(), 7);
    }

    #[test]
    fn spans_do_not_cross_sentences() {
        let spans = enumerate_spans(&[2, 1], 2);
        assert!(spans.contains(&Span::new(0, 1)));
        assert!(!spans.contains(&Span::new(1, 2)));
    }

    #[test]
    fn buckets() {
        let got: Vec<usize> = [0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 31, 32, 500].iter().map(|&d| bucket(d)).collect();
        assert_eq!(got, vec![0, 0, 1, 2, 3, 4, 4, 5, 5, 6, 6, 7, 7]);
    }

    #[test]
    fn pruned_count_arithmetic() {
        assert_eq!(pruned_count(10, 0.4, 50), 4);
        assert_eq!(pruned_count(10, 0.4, 3), 3);
        assert_eq!(pruned_count(11, 0.4, 50), 5);
    }

    #[test]
    fn equal_scores_keep_lexicographic_first() {
        let spans = enumerate_spans(&[10], 1);
        let s: Vec<ScoredSpan> = spans.iter().enumerate().map(|(i, &span)| ScoredSpan { span, index: i, score: 0.5 }).collect();
        let kept = prune_spans(&s, 10, 0.4, 50);
        let starts: Vec<usize> = kept.iter().map(|s| s.span.start).collect();
        assert_eq!(starts, vec![0, 1, 2, 3]);
    }

    #[test]
    fn full_ratio_without_crossings_is_identity() {
        let s = scored(&[(0, 0), (0, 1), (1, 1), (2, 2)], &[0.1, -2.0, 3.0, 0.0]);
        let kept = prune_spans(&s, 4, 1.0, 100);
        assert_eq!(kept, s);
    }

    #[test]
    fn crossing_spans_are_suppressed() {
        // (1,2) crosses the higher-scoring (0,1); the next candidate fills in.
        let s = scored(&[(0, 1), (1, 2), (2, 2)], &[5.0, 4.0, 1.0]);
        let kept = prune_spans(&s, 5, 0.4, 50);
        let got: Vec<Span> = kept.iter().map(|s| s.span).collect();
        assert_eq!(got, vec![Span::new(0, 1), Span::new(2, 2)]);
    }
}
