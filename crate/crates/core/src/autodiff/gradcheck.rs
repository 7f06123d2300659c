use alloc::string::String;

use super::graph::{Graph, Var};
use super::params::ParamStore;
use crate::Result;

/// Worst disagreement between analytic and central-difference gradients.
#[derive(Clone, Debug, PartialEq)]
pub struct GradCheckReport {
    /// `max |g_a - g_n| / max(1, |g_a|, |g_n|)` over all trainable scalars.
    pub max_rel_error: f64,
    /// Parameter name and flat index where the maximum occurred.
    pub worst: Option<(String, usize)>,
    pub checked: usize,
}

/// Compares the gradient from [`Graph::backward`] against central finite
/// differences for every trainable scalar in `store`.
///
/// `loss_fn` must build the same scalar loss deterministically from the
/// graph it is handed. Values are restored exactly after each probe.
pub fn grad_check<F>(store: &mut ParamStore, epsilon: f64, mut loss_fn: F) -> Result<GradCheckReport>
where
    F: FnMut(&mut Graph<'_>) -> Result<Var>,
{
    let analytic = {
        let mut g = Graph::new(store);
        let loss = loss_fn(&mut g)?;
        g.backward(loss)?
    };
    let mut eval = |store: &ParamStore| -> Result<f64> {
        let mut g = Graph::new(store);
        let loss = loss_fn(&mut g)?;
        Ok(g.value(loss).item())
    };

    let mut report = GradCheckReport { max_rel_error: 0.0, worst: None, checked: 0 };
    let names: alloc::vec::Vec<String> = store
        .entries()
        .iter()
        .filter(|e| e.trainable())
        .map(|e| String::from(e.name()))
        .collect();
    for name in names {
        let grad = analytic.get(&name).expect("trainable parameter has a gradient").clone();
        for k in 0..grad.len() {
            let original = store.value_mut(&name)?[k];
            store.value_mut(&name)?[k] = original + epsilon;
            let plus = eval(store)?;
            store.value_mut(&name)?[k] = original - epsilon;
            let minus = eval(store)?;
            store.value_mut(&name)?[k] = original;

            let numeric = (plus - minus) / (2.0 * epsilon);
            let ga = grad.data()[k];
            let rel = libm::fabs(ga - numeric) / 1f64.max(libm::fabs(ga)).max(libm::fabs(numeric));
            report.checked += 1;
            if rel > report.max_rel_error || report.worst.is_none() {
                report.max_rel_error = report.max_rel_error.max(rel);
                report.worst = Some((name.clone(), k));
            }
        }
    }
    Ok(report)
}
