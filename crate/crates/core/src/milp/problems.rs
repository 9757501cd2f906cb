//! The two benchmark problems and their exact objective functions.

use serde::{Deserialize, Serialize};

use crate::concave_core::ConcaveFn;

/// Expected utility maximization over binary portfolios:
/// `max sum_j pi_j (1 - exp(-v_j'x / lambda))` subject to `a'x <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EumInstance {
    pub lambda: f64,
    /// Capital requirement of each option.
    pub a: Vec<f64>,
    /// Scenario probabilities.
    pub pi: Vec<f64>,
    /// `v[j][i]`: value of option `i` in scenario `j`.
    pub v: Vec<Vec<f64>>,
}

impl EumInstance {
    pub fn n(&self) -> usize {
        self.a.len()
    }
    pub fn m(&self) -> usize {
        self.pi.len()
    }
    pub fn utility(&self) -> ConcaveFn {
        ConcaveFn::ExpUtility {
            lambda: self.lambda,
            c: 0.0,
        }
    }
    pub fn is_feasible(&self, x: &[u32]) -> bool {
        x.iter().all(|&v| v <= 1)
            && self.a.iter().zip(x).map(|(a, &v)| a * v as f64).sum::<f64>() <= 1.0 + 1e-12
    }
    pub fn objective(&self, x: &[u32]) -> f64 {
        let f = self.utility();
        self.pi
            .iter()
            .zip(&self.v)
            .map(|(p, vj)| {
                let z: f64 = vj.iter().zip(x).map(|(v, &xi)| v * xi as f64).sum();
                p * f.eval(z)
            })
            .sum()
    }
}

/// Weapon-target assignment: `x[i][j]` copies of weapon type `i` fire at
/// target `j`, at most `mu[i]` in total; the objective is the expected value
/// destroyed, `sum_j V_j (1 - prod_i (1 - p_ij)^x_ij)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WtaInstance {
    /// `p[i][j]`: kill probability of one weapon `i` against target `j`.
    pub p: Vec<Vec<f64>>,
    pub value: Vec<f64>,
    pub mu: Vec<u32>,
}

impl WtaInstance {
    pub fn n(&self) -> usize {
        self.mu.len()
    }
    pub fn m(&self) -> usize {
        self.value.len()
    }
    /// `a_ij = -ln(1 - p_ij)`, so target `j` survives with `exp(-sum_i a_ij x_ij)`.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        -(-self.p[i][j]).ln_1p()
    }
    pub fn kill_fn(&self) -> ConcaveFn {
        ConcaveFn::ExpUtility {
            lambda: 1.0,
            c: 0.0,
        }
    }
    /// Objective for an assignment stored row-major, `x[i * m + j]`.
    pub fn objective(&self, x: &[u32]) -> f64 {
        let m = self.m();
        let f = self.kill_fn();
        (0..m)
            .map(|j| {
                let z: f64 = (0..self.n()).map(|i| self.weight(i, j) * x[i * m + j] as f64).sum();
                self.value[j] * f.eval(z)
            })
            .sum()
    }
    pub fn is_feasible(&self, x: &[u32]) -> bool {
        let m = self.m();
        (0..self.n()).all(|i| x[i * m..(i + 1) * m].iter().sum::<u32>() <= self.mu[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum Problem {
    Eum(EumInstance),
    Wta(WtaInstance),
}

impl Problem {
    pub fn objective(&self, x: &[u32]) -> f64 {
        match self {
            Problem::Eum(p) => p.objective(x),
            Problem::Wta(p) => p.objective(x),
        }
    }
    pub fn is_feasible(&self, x: &[u32]) -> bool {
        match self {
            Problem::Eum(p) => p.is_feasible(x),
            Problem::Wta(p) => p.is_feasible(x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wta_single() {
        let p = WtaInstance {
            p: vec![vec![0.3]],
            value: vec![10.0],
            mu: vec![1],
        };
        assert!((p.objective(&[1]) - 3.0).abs() < 1e-12);
        assert_eq!(p.objective(&[0]), 0.0);
        assert!(!p.is_feasible(&[2]));
    }

    #[test]
    fn eum_budget() {
        let p = EumInstance {
            lambda: 1.0,
            a: vec![0.6, 0.5],
            pi: vec![1.0],
            v: vec![vec![1.0, 1.0]],
        };
        assert!(p.is_feasible(&[1, 0]));
        assert!(!p.is_feasible(&[1, 1]));
    }
}
