//! One-vs-rest logistic regression, trained by full-batch gradient descent.
//!
//! Deliberately minimal: zero initialization and a fixed iteration budget make
//! the classifier fully deterministic, which downstream comparisons rely on.

use crate::embed::sigmoid;

pub(crate) struct OneVsRest {
    classes: Vec<usize>,
    /// Per class: `dim` weights followed by one bias term.
    params: Vec<Vec<f64>>,
    dim: usize,
}

pub(crate) struct FitConfig {
    pub learning_rate: f64,
    pub iterations: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig { learning_rate: 1.0, iterations: 300 }
    }
}

/// Fits one binary logistic regressor per class on `(x, y)`.
///
/// `classes` lists the distinct labels to model; rows whose label is not in
/// `classes` still act as negatives for every regressor.
pub(crate) fn fit(x: &[&[f64]], y: &[usize], classes: &[usize], cfg: &FitConfig) -> OneVsRest {
    assert_eq!(x.len(), y.len());
    assert!(!x.is_empty() && !classes.is_empty());
    let dim = x[0].len();
    let n = x.len() as f64;
    let mut params = Vec::with_capacity(classes.len());
    for &class in classes {
        let mut w = vec![0.0; dim + 1];
        let mut grad = vec![0.0; dim + 1];
        for _ in 0..cfg.iterations {
            grad.iter_mut().for_each(|g| *g = 0.0);
            for (xi, &yi) in x.iter().zip(y) {
                let target = if yi == class { 1.0 } else { 0.0 };
                let z = score(&w, xi);
                let err = sigmoid(z) - target;
                for (g, &f) in grad.iter_mut().zip(xi.iter()) {
                    *g += err * f;
                }
                grad[dim] += err;
            }
            for (wi, g) in w.iter_mut().zip(grad.iter()) {
                *wi -= cfg.learning_rate * g / n;
            }
        }
        params.push(w);
    }
    OneVsRest { classes: classes.to_vec(), params, dim }
}

fn score(w: &[f64], x: &[f64]) -> f64 {
    let dim = w.len() - 1;
    w[..dim].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w[dim]
}

impl OneVsRest {
    /// Predicted class: argmax of the per-class linear scores, lowest class
    /// id on ties.
    pub fn predict(&self, x: &[f64]) -> usize {
        assert_eq!(x.len(), self.dim);
        let mut best = (f64::NEG_INFINITY, 0);
        for (&class, w) in self.classes.iter().zip(&self.params) {
            let s = score(w, x);
            if s > best.0 {
                best = (s, class);
            }
        }
        best.1
    }
}
