//! Coreference metrics: MUC, B³, CEAF_e, their average, and mention
//! detection.
//!
//! Each metric produces [`Counts`] (recall and precision numerators and
//! denominators) so corpus-level scores sum counts over documents before
//! dividing. Clusters are slices of mention keys; any `Ord` type works.
//!
//! For B³ a mention missing from the other side's clustering is treated as
//! a singleton there. For CEAF_e both clusterings are first extended with
//! singleton clusters so that they cover the same mention universe.

mod hungarian;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

pub use hungarian::{max_weight_assignment, Weight};

/// Recall, precision and F1, each in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prf {
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

impl Prf {
    pub fn new(recall: f64, precision: f64) -> Self {
        let f1 = if recall + precision == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        Prf { recall, precision, f1 }
    }
}

/// Numerators and denominators of a metric; summable across documents.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Counts {
    pub recall_num: f64,
    pub recall_den: f64,
    pub precision_num: f64,
    pub precision_den: f64,
}

impl Counts {
    pub fn prf(&self) -> Prf {
        let ratio = |n: f64, d: f64| if d == 0.0 { 0.0 } else { n / d };
        Prf::new(ratio(self.recall_num, self.recall_den), ratio(self.precision_num, self.precision_den))
    }

    pub fn add(&mut self, other: &Counts) {
        self.recall_num += other.recall_num;
        self.recall_den += other.recall_den;
        self.precision_num += other.precision_num;
        self.precision_den += other.precision_den;
    }
}

fn cluster_index<M: Ord + Clone>(clusters: &[Vec<M>]) -> BTreeMap<M, usize> {
    clusters.iter().enumerate().flat_map(|(c, ms)| ms.iter().map(move |m| (m.clone(), c))).collect()
}

/// Σ(|K| − |partition of K by `other`|) and Σ(|K| − 1) over `key`.
fn muc_side<M: Ord + Clone>(key: &[Vec<M>], other: &[Vec<M>]) -> (f64, f64) {
    let index = cluster_index(other);
    let (mut num, mut den) = (0usize, 0usize);
    for k in key {
        let mut parts = BTreeSet::new();
        let mut unaligned = 0;
        for m in k {
            match index.get(m) {
                Some(c) => {
                    parts.insert(*c);
                }
                None => unaligned += 1,
            }
        }
        num += k.len() - (parts.len() + unaligned);
        den += k.len() - 1;
    }
    (num as f64, den as f64)
}

pub fn muc_counts<M: Ord + Clone>(gold: &[Vec<M>], pred: &[Vec<M>]) -> Counts {
    let (rn, rd) = muc_side(gold, pred);
    let (pn, pd) = muc_side(pred, gold);
    Counts { recall_num: rn, recall_den: rd, precision_num: pn, precision_den: pd }
}

/// Link-based MUC.
pub fn muc<M: Ord + Clone>(gold: &[Vec<M>], pred: &[Vec<M>]) -> Prf {
    muc_counts(gold, pred).prf()
}

/// Σ over mentions of `key` of `|C_other(m) ∩ C_key(m)| / |C_key(m)|`, and
/// the number of such mentions.
fn b_cubed_side<M: Ord + Clone>(key: &[Vec<M>], other: &[Vec<M>]) -> (f64, f64) {
    let index = cluster_index(other);
    let (mut num, mut den) = (0.0, 0usize);
    for k in key {
        let mut overlap: BTreeMap<usize, usize> = BTreeMap::new();
        let mut unaligned = 0usize;
        for m in k {
            match index.get(m) {
                Some(c) => *overlap.entry(*c).or_default() += 1,
                None => unaligned += 1,
            }
        }
        // Each of the `n` mentions in an overlap of size n scores n/|K|;
        // an unaligned mention is its own singleton and scores 1/|K|.
        let squares: usize = overlap.values().map(|n| n * n).sum::<usize>() + unaligned;
        num += squares as f64 / k.len() as f64;
        den += k.len();
    }
    (num, den as f64)
}

pub fn b_cubed_counts<M: Ord + Clone>(gold: &[Vec<M>], pred: &[Vec<M>]) -> Counts {
    let (rn, rd) = b_cubed_side(gold, pred);
    let (pn, pd) = b_cubed_side(pred, gold);
    Counts { recall_num: rn, recall_den: rd, precision_num: pn, precision_den: pd }
}

/// Mention-based B³.
pub fn b_cubed<M: Ord + Clone>(gold: &[Vec<M>], pred: &[Vec<M>]) -> Prf {
    b_cubed_counts(gold, pred).prf()
}

/// Adds a singleton cluster for every mention of `other` that `clusters`
/// does not cover.
fn with_implicit_singletons<M: Ord + Clone>(clusters: &[Vec<M>], other: &[Vec<M>]) -> Vec<Vec<M>> {
    let covered: BTreeSet<&M> = clusters.iter().flatten().collect();
    let mut out = clusters.to_vec();
    let missing: BTreeSet<&M> = other.iter().flatten().filter(|m| !covered.contains(m)).collect();
    out.extend(missing.into_iter().map(|m| alloc::vec![m.clone()]));
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Optimal total φ4 similarity `Σ 2|K∩R| / (|K| + |R|)` over one-to-one
/// cluster alignments.
///
/// Weights are scaled to integers by the least common multiple of the
/// denominators so the solver runs exactly; the float solver is the
/// fallback when that multiple grows too large.
pub fn ceaf_e_similarity<M: Ord + Clone>(gold: &[Vec<M>], pred: &[Vec<M>]) -> f64 {
    let (n, m) = (gold.len(), pred.len());
    if n == 0 || m == 0 {
        return 0.0;
    }
    let index = cluster_index(pred);
    let mut overlap = alloc::vec![0u64; n * m];
    for (i, k) in gold.iter().enumerate() {
        for mention in k {
            if let Some(&j) = index.get(mention) {
                overlap[i * m + j] += 1;
            }
        }
    }
    let denom = |i: usize, j: usize| (gold[i].len() + pred[j].len()) as u64;

    let mut lcm: Option<u64> = Some(1);
    for i in 0..n {
        for j in 0..m {
            if overlap[i * m + j] > 0 {
                lcm = lcm.and_then(|l| {
                    let d = denom(i, j);
                    (l / gcd(l, d)).checked_mul(d).filter(|&v| v < (1 << 40))
                });
            }
        }
    }
    match lcm {
        Some(l) => {
            let weights: Vec<i64> = (0..n * m)
                .map(|p| (2 * overlap[p] * (l / denom(p / m, p % m))) as i64)
                .collect();
            let total: i64 = max_weight_assignment(&weights, n, m).iter().map(|&(i, j)| weights[i * m + j]).sum();
            total as f64 / l as f64
        }
        None => {
            let weights: Vec<f64> =
                (0..n * m).map(|p| 2.0 * overlap[p] as f64 / denom(p / m, p % m) as f64).collect();
            max_weight_assignment(&weights, n, m).iter().map(|&(i, j)| weights[i * m + j]).sum()
        }
    }
}

pub fn ceaf_e_counts<M: Ord + Clone>(gold: &[Vec<M>], pred: &[Vec<M>]) -> Counts {
    let gold_u = with_implicit_singletons(gold, pred);
    let pred_u = with_implicit_singletons(pred, gold);
    let phi = ceaf_e_similarity(&gold_u, &pred_u);
    Counts {
        recall_num: phi,
        recall_den: gold_u.len() as f64,
        precision_num: phi,
        precision_den: pred_u.len() as f64,
    }
}

/// Entity-based CEAF with the φ4 similarity.
pub fn ceaf_e<M: Ord + Clone>(gold: &[Vec<M>], pred: &[Vec<M>]) -> Prf {
    ceaf_e_counts(gold, pred).prf()
}

/// Unweighted mean of the three F1 scores.
pub fn avg_f1(muc: &Prf, b3: &Prf, ceafe: &Prf) -> f64 {
    (muc.f1 + b3.f1 + ceafe.f1) / 3.0
}

pub fn mention_counts<M: Ord>(gold: &BTreeSet<M>, pred: &BTreeSet<M>) -> Counts {
    let hits = gold.intersection(pred).count() as f64;
    Counts { recall_num: hits, recall_den: gold.len() as f64, precision_num: hits, precision_den: pred.len() as f64 }
}

/// Exact-boundary mention detection.
pub fn mention_f1<M: Ord>(gold: &BTreeSet<M>, pred: &BTreeSet<M>) -> Prf {
    mention_counts(gold, pred).prf()
}

/// Row of corpus-level results.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scores {
    pub mention: Prf,
    pub muc: Prf,
    pub b_cubed: Prf,
    pub ceaf_e: Prf,
    pub avg_f1: f64,
}

/// Accumulates counts document by document.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorpusScorer {
    mention: Counts,
    muc: Counts,
    b_cubed: Counts,
    ceaf_e: Counts,
    documents: usize,
}

impl CorpusScorer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_document<M: Ord + Clone>(
        &mut self,
        gold: &[Vec<M>],
        pred: &[Vec<M>],
        gold_mentions: &BTreeSet<M>,
        pred_mentions: &BTreeSet<M>,
    ) {
        self.mention.add(&mention_counts(gold_mentions, pred_mentions));
        self.muc.add(&muc_counts(gold, pred));
        self.b_cubed.add(&b_cubed_counts(gold, pred));
        self.ceaf_e.add(&ceaf_e_counts(gold, pred));
        self.documents += 1;
    }

    pub fn documents(&self) -> usize {
        self.documents
    }

    pub fn scores(&self) -> Scores {
        let (muc, b_cubed, ceaf_e) = (self.muc.prf(), self.b_cubed.prf(), self.ceaf_e.prf());
        Scores { mention: self.mention.prf(), muc, b_cubed, ceaf_e, avg_f1: avg_f1(&muc, &b_cubed, &ceaf_e) }
    }
}
