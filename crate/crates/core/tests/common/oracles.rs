//! Brute-force reference implementations used to check the engine.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;

/// Attack graph over arguments `0..n`.
#[derive(Debug, Clone)]
pub struct Graph {
    pub n: usize,
    pub attacks: Vec<(usize, usize)>,
}

impl Graph {
    pub fn random<R: Rng>(rng: &mut R, n: usize, density: f64) -> Self {
        let mut attacks = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if rng.gen_bool(density) {
                    attacks.push((a, b));
                }
            }
        }
        Graph { n, attacks }
    }

    pub fn name(i: usize) -> String {
        format!("a{i:02}")
    }

    pub fn names(&self, set: &BTreeSet<usize>) -> BTreeSet<String> {
        set.iter().map(|i| Self::name(*i)).collect()
    }

    fn matrix(&self) -> Vec<Vec<bool>> {
        let mut m = vec![vec![false; self.n]; self.n];
        for (a, b) in &self.attacks {
            m[*a][*b] = true;
        }
        m
    }

    pub fn conflict_free(&self, s: &BTreeSet<usize>) -> bool {
        conflict_free(&self.matrix(), s)
    }

    pub fn admissible(&self, s: &BTreeSet<usize>) -> bool {
        admissible(&self.matrix(), s)
    }

    /// Least fixed point of the characteristic function, iterated from ∅.
    pub fn grounded(&self) -> BTreeSet<usize> {
        let m = self.matrix();
        let mut s = BTreeSet::new();
        loop {
            let next: BTreeSet<usize> = (0..self.n).filter(|a| defends(&m, &s, *a)).collect();
            if next == s {
                return s;
            }
            s = next;
        }
    }

    /// Inclusion-maximal admissible sets by exhaustive subset enumeration.
    pub fn preferred(&self) -> BTreeSet<BTreeSet<usize>> {
        let m = self.matrix();
        let admissible: Vec<BTreeSet<usize>> = (0u32..1 << self.n)
            .map(|mask| (0..self.n).filter(|i| mask >> i & 1 == 1).collect::<BTreeSet<usize>>())
            .filter(|s| admissible(&m, s))
            .collect();
        admissible
            .iter()
            .filter(|s| !admissible.iter().any(|t| t.len() > s.len() && s.is_subset(t)))
            .cloned()
            .collect()
    }
}

/// Every attacker of `a` is attacked by some member of `s`.
fn defends(m: &[Vec<bool>], s: &BTreeSet<usize>, a: usize) -> bool {
    (0..m.len()).filter(|b| m[*b][a]).all(|b| s.iter().any(|c| m[*c][b]))
}

fn conflict_free(m: &[Vec<bool>], s: &BTreeSet<usize>) -> bool {
    s.iter().all(|a| s.iter().all(|b| !m[*a][*b]))
}

fn admissible(m: &[Vec<bool>], s: &BTreeSet<usize>) -> bool {
    conflict_free(m, s) && s.iter().all(|a| defends(m, s, *a))
}

/// Mid-ranks by counting, quadratic but obviously correct.
pub fn ranks(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .enumerate()
        .map(|(i, x)| {
            let below = xs.iter().filter(|y| *y < x).count() as f64;
            let ties = xs.iter().enumerate().filter(|(j, y)| *j != i && *y == x).count() as f64;
            1.0 + below + ties / 2.0
        })
        .collect()
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&ranks(x), &ranks(y))
}
