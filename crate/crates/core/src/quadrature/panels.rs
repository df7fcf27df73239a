//! Composite Gauss–Legendre panel grids with barycentric interpolation.

use crate::error::{invalid, Result};

use super::rules::gauss_legendre;

#[derive(Debug, Clone, PartialEq)]
pub struct PanelGrid {
    breaks: Vec<f64>,
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    reference: Vec<f64>,
    bary: Vec<f64>,
}

impl PanelGrid {
    /// Panels [breaks[i], breaks[i+1]] with `order` Gauss nodes each.
    pub fn new(breaks: Vec<f64>, order: usize) -> Result<Self> {
        if breaks.len() < 2 || order == 0 {
            return Err(invalid("a panel grid needs at least one panel and one node"));
        }
        if breaks.iter().any(|b| !b.is_finite()) || breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("panel breaks must be finite and strictly increasing"));
        }
        let (reference, ref_w) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity((breaks.len() - 1) * order);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in breaks.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let half = 0.5 * (w[1] - w[0]);
            for (x, wt) in reference.iter().zip(&ref_w) {
                nodes.push(mid + half * x);
                weights.push(half * wt);
            }
        }
        let bary = (0..order)
            .map(|j| {
                let prod: f64 = (0..order)
                    .filter(|&k| k != j)
                    .map(|k| reference[j] - reference[k])
                    .product();
                1.0 / prod
            })
            .collect();
        Ok(Self { breaks, order, nodes, weights, reference, bary })
    }

    pub fn uniform(a: f64, b: f64, panels: usize, order: usize) -> Result<Self> {
        if panels == 0 || !(a < b) {
            return Err(invalid("uniform grid needs a < b and at least one panel"));
        }
        let h = (b - a) / panels as f64;
        let mut breaks: Vec<f64> = (0..panels).map(|i| a + i as f64 * h).collect();
        breaks.push(b);
        Self::new(breaks, order)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn lower(&self) -> f64 {
        self.breaks[0]
    }

    pub fn upper(&self) -> f64 {
        *self.breaks.last().expect("non-empty breaks")
    }

    /// Index of the panel containing x, if x lies in the grid's span.
    pub fn locate(&self, x: f64) -> Option<usize> {
        if !(x >= self.lower() && x <= self.upper()) {
            return None;
        }
        let i = self.breaks.partition_point(|&b| b <= x);
        Some(i.saturating_sub(1).min(self.breaks.len() - 2))
    }

    /// Polynomial interpolant of node values within the panel containing x; 0 outside.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        let Some(p) = self.locate(x) else {
            return 0.0;
        };
        let (a, b) = (self.breaks[p], self.breaks[p + 1]);
        let t = (2.0 * x - a - b) / (b - a);
        let vals = &values[p * self.order..(p + 1) * self.order];
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..self.order {
            let diff = t - self.reference[j];
            if diff == 0.0 {
                return vals[j];
            }
            let c = self.bary[j] / diff;
            num += c * vals[j];
            den += c;
        }
        num / den
    }

    /// Derivative of the panel interpolant at every node.
    pub fn differentiate(&self, values: &[f64]) -> Vec<f64> {
        let n = self.order;
        // Differentiation matrix on the reference panel.
        let mut dm = vec![0.0; n * n];
        for i in 0..n {
            let mut diag = 0.0;
            for j in 0..n {
                if i != j {
                    let v = self.bary[j] / self.bary[i] / (self.reference[i] - self.reference[j]);
                    dm[i * n + j] = v;
                    diag -= v;
                }
            }
            dm[i * n + i] = diag;
        }
        let mut out = vec![0.0; values.len()];
        for p in 0..self.breaks.len() - 1 {
            let scale = 2.0 / (self.breaks[p + 1] - self.breaks[p]);
            let vals = &values[p * n..(p + 1) * n];
            for i in 0..n {
                let s: f64 = (0..n).map(|j| dm[i * n + j] * vals[j]).sum();
                out[p * n + i] = s * scale;
            }
        }
        out
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}
