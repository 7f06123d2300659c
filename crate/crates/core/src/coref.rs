//! Antecedent scoring, the antecedent softmax, the marginal log-likelihood
//! loss and greedy cluster decoding.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::autodiff::{Graph, Var};
use crate::corpus::Span;
use crate::model::{bucket, ModelConfig, Side, SideEncoding};
use crate::{Error, Result};

/// Disjoint mention sets, each with at least two mentions.
pub type ClusterSet = Vec<Vec<Span>>;

/// Pair scores `s_m(a) + s_m(b) + FFN_c([g_a, g_b, g_a ∘ g_b, φ])` for
/// aligned index lists into two sets of span rows. `φ` is the `coref.dist`
/// embedding of each pair's distance bucket. Returns a `P×1` column.
#[allow(clippy::too_many_arguments)]
pub fn pair_scores(
    g: &mut Graph<'_>,
    left_reps: Var,
    left_scores: Var,
    left_idx: &[usize],
    right_reps: Var,
    right_scores: Var,
    right_idx: &[usize],
    buckets: &[usize],
) -> Result<Var> {
    let gi = g.gather_rows(left_reps, left_idx)?;
    let gj = g.gather_rows(right_reps, right_idx)?;
    let prod = g.mul(gi, gj)?;
    let table = g.param("coref.dist")?;
    let phi = g.gather_rows(table, buckets)?;
    let features = g.concat(&[gi, gj, prod, phi], 1)?;
    let pair = g.ffn("coref.ffn", features)?;
    let si = g.gather_rows(left_scores, left_idx)?;
    let sj = g.gather_rows(right_scores, right_idx)?;
    let unary = g.add(si, sj)?;
    g.add(unary, pair)
}

/// `s(i, j)` for two spans of one side, given the span rows of `side`.
pub fn pairwise_score(g: &mut Graph<'_>, side: &SideEncoding, i: usize, j: usize, distance: usize) -> Result<f64> {
    let v = pair_scores(g, side.reps, side.scores, &[i], side.reps, side.scores, &[j], &[bucket(distance)])?;
    Ok(g.value(v).item())
}

/// Scores of one mention against `ε` (always 0) and its candidates.
#[derive(Clone, Debug, PartialEq)]
pub struct CorefScoreRow {
    /// Pruned-list positions of the candidate antecedents, nearest first.
    pub candidates: Vec<usize>,
    /// `scores[0]` is the dummy antecedent; `scores[c + 1]` is `candidates[c]`.
    pub scores: Vec<f64>,
}

/// Forward pass of the monolingual scorer over one document.
#[derive(Clone, Debug)]
pub struct CorefForward {
    pub side: SideEncoding,
    /// Candidate antecedents of every pruned mention, nearest first.
    pub candidates: Vec<Vec<usize>>,
    /// `k × cols` score matrix; column 0 is `ε`.
    pub matrix: Var,
    pub cols: usize,
    pub mask: Vec<bool>,
}

impl CorefForward {
    pub fn build(g: &mut Graph<'_>, cfg: &ModelConfig, sentences: &[Vec<usize>]) -> Result<Self> {
        let side = SideEncoding::build(g, cfg, Side::Source, sentences, false)?;
        let k = side.pruned.len();
        let max_ant = cfg.max_antecedents.min(k.saturating_sub(1));
        let cols = max_ant + 1;

        let mut candidates = Vec::with_capacity(k);
        let (mut left, mut right, mut buckets, mut positions) = (vec![], vec![], vec![], vec![]);
        let mut mask = vec![false; k * cols];
        for i in 0..k {
            mask[i * cols] = true;
            let cands: Vec<usize> = (i.saturating_sub(max_ant)..i).rev().collect();
            for (c, &j) in cands.iter().enumerate() {
                left.push(side.pruned[i].index);
                right.push(side.pruned[j].index);
                buckets.push(bucket(i - j));
                positions.push(i * cols + c + 1);
                mask[i * cols + c + 1] = true;
            }
            candidates.push(cands);
        }
        let matrix = if left.is_empty() {
            g.input(crate::autodiff::Tensor::zeros(k, cols))?
        } else {
            let scores = pair_scores(g, side.reps, side.scores, &left, side.reps, side.scores, &right, &buckets)?;
            g.scatter(scores, &positions, k, cols)?
        };
        Ok(CorefForward { side, candidates, matrix, cols, mask })
    }

    pub fn rows(&self, g: &Graph<'_>) -> Vec<CorefScoreRow> {
        let m = g.value(self.matrix);
        self.candidates
            .iter()
            .enumerate()
            .map(|(i, cands)| CorefScoreRow { candidates: cands.clone(), scores: m.row_slice(i)[..cands.len() + 1].to_vec() })
            .collect()
    }

    /// Admissible gold antecedent columns: candidates in the mention's gold
    /// cluster, or `ε` when there are none.
    pub fn gold_mask(&self, clusters: &[Vec<Span>]) -> Vec<bool> {
        let cluster_of: BTreeMap<Span, usize> =
            clusters.iter().enumerate().flat_map(|(c, spans)| spans.iter().map(move |s| (*s, c))).collect();
        let pruned = self.side.pruned_spans();
        let ids: Vec<Option<usize>> = pruned.iter().map(|s| cluster_of.get(s).copied()).collect();
        let mut gold = vec![false; self.mask.len()];
        for (i, cands) in self.candidates.iter().enumerate() {
            let mut any = false;
            if let Some(ci) = ids[i] {
                for (c, &j) in cands.iter().enumerate() {
                    if ids[j] == Some(ci) {
                        gold[i * self.cols + c + 1] = true;
                        any = true;
                    }
                }
            }
            if !any {
                gold[i * self.cols] = true;
            }
        }
        gold
    }

    /// `−Σ_i log Σ_{y ∈ GOLD(i)} P(y)` as a 1x1 graph value.
    pub fn loss(&self, g: &mut Graph<'_>, clusters: &[Vec<Span>]) -> Result<Var> {
        let gold = self.gold_mask(clusters);
        let all = g.logsumexp_rows(self.matrix, &self.mask)?;
        let correct = g.logsumexp_rows(self.matrix, &gold)?;
        let per_mention = g.sub(all, correct)?;
        g.sum(per_mention)
    }

    /// Greedy decoding into clusters over the pruned spans.
    pub fn predict(&self, g: &Graph<'_>) -> Result<ClusterSet> {
        let links = predict_antecedents(&self.rows(g));
        form_clusters(&self.side.pruned_spans(), &links)
    }
}

/// `P(y) = e^{s(i,y)} / Σ_{y′} e^{s(i,y′)}` over one row.
pub fn antecedent_distribution(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| libm::exp(s - max)).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Highest-scoring antecedent per mention; `None` is the dummy. Ties go to
/// `ε`, then to the nearest candidate.
pub fn predict_antecedents(rows: &[CorefScoreRow]) -> Vec<Option<usize>> {
    rows.iter()
        .map(|row| {
            let mut best = 0;
            for (c, &s) in row.scores.iter().enumerate().skip(1) {
                if s > row.scores[best] {
                    best = c;
                }
            }
            (best > 0).then(|| row.candidates[best - 1])
        })
        .collect()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Transitive closure of antecedent links; singleton groups are dropped.
/// Clusters come out ordered by their first mention.
pub fn form_clusters(mentions: &[Span], links: &[Option<usize>]) -> Result<ClusterSet> {
    if mentions.len() != links.len() {
        return Err(Error::Internal(format!("{} links for {} mentions", links.len(), mentions.len())));
    }
    let mut uf = UnionFind::new(mentions.len());
    for (i, link) in links.iter().enumerate() {
        if let Some(j) = *link {
            if j >= i {
                return Err(Error::Internal(format!("mention {i} links forward to {j}")));
            }
            uf.union(i, j);
        }
    }
    let mut groups: BTreeMap<usize, Vec<Span>> = BTreeMap::new();
    for (i, span) in mentions.iter().enumerate() {
        let root = uf.find(i);
        groups.entry(root).or_default().push(*span);
    }
    Ok(groups.into_values().filter(|c| c.len() >= 2).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spans(n: usize) -> Vec<Span> {
        (0..n).map(|i| Span::new(i, i)).collect()
    }

    #[test]
    fn uniform_scores_give_uniform_distribution() {
        for p in antecedent_distribution(&[0.0, 0.0, 0.0]) {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn negative_scores_choose_dummy() {
        let rows = vec![CorefScoreRow { candidates: vec![1, 0], scores: vec![0.0, -0.5, -3.0] }];
        assert_eq!(predict_antecedents(&rows), vec![None]);
    }

    #[test]
    fn best_candidate_wins_and_ties_prefer_dummy_then_nearest() {
        let rows = vec![
            CorefScoreRow { candidates: vec![], scores: vec![0.0] },
            CorefScoreRow { candidates: vec![0], scores: vec![0.0, 0.0] },
            CorefScoreRow { candidates: vec![1, 0], scores: vec![0.0, 2.0, 2.0] },
        ];
        assert_eq!(predict_antecedents(&rows), vec![None, None, Some(1)]);
    }

    #[test]
    fn clusters_from_links() {
        let m = spans(4);
        let got = form_clusters(&m, &[None, None, Some(0), Some(1)]).unwrap();
        assert_eq!(got, vec![vec![m[0], m[2]], vec![m[1], m[3]]]);
        assert!(form_clusters(&m, &[None; 4]).unwrap().is_empty());
        let chain = form_clusters(&m[..3], &[None, Some(0), Some(1)]).unwrap();
        assert_eq!(chain, vec![m[..3].to_vec()]);
    }

    #[test]
    fn forward_link_is_internal_error() {
        assert!(matches!(form_clusters(&spans(2), &[Some(1), None]), Err(Error::Internal(_))));
    }
}
