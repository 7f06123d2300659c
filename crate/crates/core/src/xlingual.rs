//! Cross-lingual coreference between source mentions and the mentions of an
//! unannotated translation.
//!
//! Target spans are scored through residual adapters in front of the shared
//! source-side scorers. Each source mention picks its best-scoring target
//! mention within a position window, and the loss `Σ_i exp(−s_iĵ)` pushes
//! those best scores up; its gradient reaches the source-side encoder and
//! scorers as well as the adapters.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::autodiff::{Graph, Var};
use crate::coref::{pair_scores, CorefForward};
use crate::corpus::{ParallelDocument, Span};
use crate::model::{adapter, bucket, ModelConfig, Side, SideEncoding, WindowIndexing};
use crate::{Error, Result};

/// Indices `j` with `target_positions[j] ≤ source_position + window`.
pub fn xl_candidates(source_position: usize, target_positions: &[usize], window: usize) -> Vec<usize> {
    let limit = source_position + window;
    target_positions.iter().enumerate().filter(|(_, &p)| p <= limit).map(|(j, _)| j).collect()
}

/// Joint forward pass over one parallel document.
#[derive(Clone, Debug)]
pub struct XlForward {
    pub coref: CorefForward,
    pub target: SideEncoding,
    /// `m × n` cross-lingual scores (source mentions × target mentions).
    pub matrix: Var,
    pub mask: Vec<bool>,
    /// Best admissible target mention for each source mention.
    pub argmax: Vec<Option<usize>>,
    pub xl_loss: Var,
}

impl XlForward {
    pub fn build(
        g: &mut Graph<'_>,
        cfg: &ModelConfig,
        source_ids: &[Vec<usize>],
        target_ids: &[Vec<usize>],
    ) -> Result<Self> {
        let coref = CorefForward::build(g, cfg, source_ids)?;
        let target = SideEncoding::build(g, cfg, Side::Target, target_ids, true)?;
        let source = &coref.side;
        let (m, n) = (source.pruned.len(), target.pruned.len());

        let position = |side: &SideEncoding, span: Span| match cfg.window_indexing {
            WindowIndexing::Document => span.start,
            WindowIndexing::Sentence => side.local_positions[span.start],
        };
        let target_positions: Vec<usize> = target.pruned.iter().map(|s| position(&target, s.span)).collect();

        let (mut left, mut right, mut buckets, mut positions) = (vec![], vec![], vec![], vec![]);
        let mut mask = vec![false; m * n];
        for (i, s) in source.pruned.iter().enumerate() {
            let ps = position(source, s.span);
            for j in xl_candidates(ps, &target_positions, cfg.window) {
                left.push(s.index);
                right.push(j);
                buckets.push(bucket(ps.abs_diff(target_positions[j])));
                positions.push(i * n + j);
                mask[i * n + j] = true;
            }
        }

        let (matrix, argmax, xl_loss) = if left.is_empty() {
            let matrix = g.input(crate::autodiff::Tensor::zeros(m, n))?;
            (matrix, vec![None; m], g.scalar(0.0)?)
        } else {
            let target_idx = target.pruned_indices();
            let target_reps = g.gather_rows(target.reps, &target_idx)?;
            let adapted = adapter(g, "adapter_c", target_reps)?;
            let target_scores = g.gather_rows(target.scores, &target_idx)?;
            let scores = pair_scores(g, source.reps, source.scores, &left, adapted, target_scores, &right, &buckets)?;
            let matrix = g.scatter(scores, &positions, m, n)?;
            let (loss, argmax) = xl_loss(g, matrix, &mask)?;
            (matrix, argmax, loss)
        };
        Ok(XlForward { coref, target, matrix, mask, argmax, xl_loss })
    }

    /// `(source mention, target mention)` for every source mention with at
    /// least one admissible target.
    pub fn predicted_pairs(&self) -> Vec<(Span, Span)> {
        self.argmax
            .iter()
            .enumerate()
            .filter_map(|(i, j)| j.map(|j| (self.coref.side.pruned[i].span, self.target.pruned[j].span)))
            .collect()
    }
}

/// `Σ_i exp(−max_j s_ij)` over rows with at least one admissible entry.
/// Rows without candidates are skipped. Returns the loss and the per-row
/// argmax.
pub fn xl_loss(g: &mut Graph<'_>, matrix: Var, mask: &[bool]) -> Result<(Var, Vec<Option<usize>>)> {
    let (best, argmax) = g.max_rows(matrix, Some(mask))?;
    let live: Vec<usize> = argmax.iter().enumerate().filter(|(_, a)| a.is_some()).map(|(i, _)| i).collect();
    if live.is_empty() {
        return Ok((g.scalar(0.0)?, argmax));
    }
    let best = g.gather_rows(best, &live)?;
    let neg = g.scale(best, -1.0)?;
    let terms = g.exp(neg)?;
    Ok((g.sum(terms)?, argmax))
}

/// `l_coref + ratio · l_x`. A zero ratio returns `l_coref` itself so the
/// cross-lingual path contributes nothing to the gradient.
pub fn joint_loss(g: &mut Graph<'_>, l_coref: Var, l_x: Var, ratio: f64) -> Result<Var> {
    if ratio == 0.0 {
        return Ok(l_coref);
    }
    let weighted = g.scale(l_x, ratio)?;
    g.add(l_coref, weighted)
}

/// Counts of predicted cross-lingual pairs by category.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PairAnalysis {
    pub total: usize,
    pub identical: usize,
    pub coreferential: usize,
    pub same_surface: usize,
    pub other: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairCategory {
    Identical,
    Coreferential,
    SameSurface,
    Other,
}

impl PairAnalysis {
    pub fn add(&mut self, category: PairCategory) {
        self.total += 1;
        match category {
            PairCategory::Identical => self.identical += 1,
            PairCategory::Coreferential => self.coreferential += 1,
            PairCategory::SameSurface => self.same_surface += 1,
            PairCategory::Other => self.other += 1,
        }
    }

    pub fn merge(&mut self, other: &PairAnalysis) {
        self.total += other.total;
        self.identical += other.identical;
        self.coreferential += other.coreferential;
        self.same_surface += other.same_surface;
        self.other += other.other;
    }
}

/// Classifies pairs predicted on an identity translation, first match wins:
/// identical span, same gold cluster, equal token strings, other.
pub fn classify_pairs(pairs: &[(Span, Span)], pdoc: &ParallelDocument) -> Result<Vec<PairCategory>> {
    if !pdoc.is_identity() {
        return Err(Error::Analysis(format!(
            "document `{}` is not an identity translation; pair categories need index-aligned spans",
            pdoc.source.doc_key
        )));
    }
    let cluster_of: BTreeMap<Span, usize> = pdoc
        .source
        .clusters
        .iter()
        .enumerate()
        .flat_map(|(c, spans)| spans.iter().map(move |s| (*s, c)))
        .collect();
    let target_tokens: Vec<&str> = pdoc.target_tokens().collect();
    Ok(pairs
        .iter()
        .map(|&(s, t)| {
            let same_cluster = matches!((cluster_of.get(&s), cluster_of.get(&t)), (Some(a), Some(b)) if a == b);
            if s == t {
                PairCategory::Identical
            } else if same_cluster {
                PairCategory::Coreferential
            } else if pdoc.source.surface(s) == target_tokens[t.start..=t.end] {
                PairCategory::SameSurface
            } else {
                PairCategory::Other
            }
        })
        .collect())
}

pub fn analyze_pairs(pairs: &[(Span, Span)], pdoc: &ParallelDocument) -> Result<PairAnalysis> {
    let mut out = PairAnalysis::default();
    for c in classify_pairs(pairs, pdoc)? {
        out.add(c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::{ParamStore, Tensor};
    use crate::corpus::{pseudo_translate, Document, TranslationMode};
    use alloc::string::String;

    #[test]
    fn window_rule_is_inclusive() {
        assert_eq!(xl_candidates(10, &[0, 60, 61], 50), vec![0, 1]);
        assert_eq!(xl_candidates(7, &[7], 0), vec![0]);
        assert!(xl_candidates(0, &[5, 9], 2).is_empty());
    }

    #[test]
    fn single_row_loss() {
        let s = ParamStore::new();
        let mut g = Graph::new(&s);
        let m = g.input(Tensor::row(&[1.0, 2.0])).unwrap();
        let (loss, arg) = xl_loss(&mut g, m, &[true, true]).unwrap();
        assert!((g.value(loss).item() - libm::exp(-2.0)).abs() < 1e-12);
        assert_eq!(arg, vec![Some(1)]);
    }

    #[test]
    fn zero_rows_and_empty_rows() {
        let s = ParamStore::new();
        let mut g = Graph::new(&s);
        let m = g.input(Tensor::from_vec(2, 2, vec![0.0, -1.0, -3.0, 0.0]).unwrap()).unwrap();
        let (loss, _) = xl_loss(&mut g, m, &[true; 4]).unwrap();
        assert_eq!(g.value(loss).item(), 2.0);
        let (loss, arg) = xl_loss(&mut g, m, &[false; 4]).unwrap();
        assert_eq!(g.value(loss).item(), 0.0);
        assert_eq!(arg, vec![None, None]);
    }

    #[test]
    fn joint_loss_weights() {
        let s = ParamStore::new();
        let mut g = Graph::new(&s);
        let (c, x) = (g.scalar(2.0).unwrap(), g.scalar(0.5).unwrap());
        let j = joint_loss(&mut g, c, x, 1.0).unwrap();
        assert_eq!(g.value(j).item(), 2.5);
        let zero = g.scalar(0.0).unwrap();
        let j = joint_loss(&mut g, c, zero, 1.0).unwrap();
        assert_eq!(g.value(j).item(), 2.0);
        assert_eq!(joint_loss(&mut g, c, x, 0.0).unwrap(), c);
    }

    fn sents(raw: &[&[&str]]) -> Vec<Vec<String>> {
        raw.iter().map(|s| s.iter().map(|t| String::from(*t)).collect()).collect()
    }

    #[test]
    fn pair_categories_follow_precedence() {
        let doc = Document::new(
            "a".into(),
            sents(&[&["the", "cat", "saw", "Tom"], &["the", "cat", "and", "he"]]),
            vec![vec![Span::new(3, 3), Span::new(7, 7)]],
        )
        .unwrap();
        let pdoc = pseudo_translate(&doc, TranslationMode::Identity, 0);
        let pairs = [
            (Span::new(0, 1), Span::new(0, 1)),
            (Span::new(7, 7), Span::new(3, 3)),
            (Span::new(0, 1), Span::new(4, 5)),
            (Span::new(2, 2), Span::new(6, 6)),
        ];
        let cats = classify_pairs(&pairs, &pdoc).unwrap();
        assert_eq!(
            cats,
            vec![PairCategory::Identical, PairCategory::Coreferential, PairCategory::SameSurface, PairCategory::Other]
        );
        let a = analyze_pairs(&pairs, &pdoc).unwrap();
        assert_eq!(a, PairAnalysis { total: 4, identical: 1, coreferential: 1, same_surface: 1, other: 1 });
    }

    #[test]
    fn analysis_rejects_non_identity() {
        let doc = Document::new("b".into(), sents(&[&["x", "y"]]), vec![]).unwrap();
        let pdoc = pseudo_translate(&doc, TranslationMode::Xenoglot, 3);
        assert!(matches!(analyze_pairs(&[], &pdoc), Err(Error::Analysis(_))));
    }
}
