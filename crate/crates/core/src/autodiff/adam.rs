use alloc::string::String;

use super::graph::Gradients;
use super::params::ParamStore;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { lr: 1e-3, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// One bias-corrected adaptive-moment update of every trainable parameter.
///
/// All gradients are checked before anything is modified, so a missing key
/// leaves the store untouched.
pub fn adam_step(store: &mut ParamStore, grads: &Gradients, cfg: &AdamConfig) -> Result<()> {
    for e in store.entries().iter().filter(|e| e.trainable()) {
        match grads.get(e.name()) {
            Some(g) if g.shape() == e.value().shape() => {}
            Some(_) => {
                return Err(Error::Shape { op: "adam_step", detail: String::from(e.name()) });
            }
            None => return Err(Error::MissingGradient(String::from(e.name()))),
        }
    }
    let t = store.step() + 1;
    store.set_step(t);
    let correction1 = 1.0 - libm::pow(cfg.beta1, t as f64);
    let correction2 = 1.0 - libm::pow(cfg.beta2, t as f64);
    for e in store.entries_mut().iter_mut().filter(|e| e.trainable()) {
        let g = grads.get(e.name()).expect("checked above").data();
        let (value, m, v) = e.parts_mut();
        for (((p, m), v), g) in value.data_mut().iter_mut().zip(m.iter_mut()).zip(v.iter_mut()).zip(g) {
            *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
            *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
            let m_hat = *m / correction1;
            let v_hat = *v / correction2;
            *p -= cfg.lr * m_hat / (libm::sqrt(v_hat) + cfg.eps);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::{Graph, Tensor};

    fn quadratic_grads(store: &ParamStore) -> Gradients {
        let mut g = Graph::new(store);
        let x = g.param("x").unwrap();
        let sq = g.mul(x, x).unwrap();
        let loss = g.sum(sq).unwrap();
        g.backward(loss).unwrap()
    }

    #[test]
    fn zero_gradient_leaves_values() {
        let mut s = ParamStore::new();
        s.insert("x", Tensor::row(&[1.0, -2.0]), true).unwrap();
        let mut grads = Gradients::default();
        grads.insert("x".into(), Tensor::zeros(1, 2));
        adam_step(&mut s, &grads, &AdamConfig::default()).unwrap();
        assert_eq!(s.get("x").unwrap().data(), &[1.0, -2.0]);
        assert_eq!(s.step(), 1);
    }

    #[test]
    fn step_descends_quadratic() {
        let mut s = ParamStore::new();
        s.insert("x", Tensor::scalar(1.0), true).unwrap();
        let grads = quadratic_grads(&s);
        let cfg = AdamConfig { lr: 0.1, ..AdamConfig::default() };
        adam_step(&mut s, &grads, &cfg).unwrap();
        assert!(s.get("x").unwrap().item() < 1.0);
    }

    #[test]
    fn repeated_runs_bit_identical() {
        let run = || {
            let mut s = ParamStore::new();
            s.insert("x", Tensor::row(&[0.3, -1.7, 2.2]), true).unwrap();
            for _ in 0..25 {
                let grads = quadratic_grads(&s);
                adam_step(&mut s, &grads, &AdamConfig::default()).unwrap();
            }
            s.to_bytes()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn missing_gradient_is_an_error() {
        let mut s = ParamStore::new();
        s.insert("x", Tensor::scalar(1.0), true).unwrap();
        let err = adam_step(&mut s, &Gradients::default(), &AdamConfig::default()).unwrap_err();
        assert_eq!(err, Error::MissingGradient("x".into()));
        assert_eq!(s.step(), 0);
    }
}
