//! Closed-form constants of the partition estimates.

use serde::{Deserialize, Serialize};

use crate::pmap::RegularityReport;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    #[serde(rename = "Q")]
    pub q_bound: u64,
    pub v: f64,
    pub p: f64,
    /// Conjugate exponent, `1/q = 1 - 1/p`.
    pub q_conj: f64,
    pub ko_norm_p: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub c8: f64,
    pub kappa: f64,
    pub lambda: f64,
}

impl Constants {
    pub fn new(q_bound: u64, v: f64, p: f64, ko_norm_p: f64) -> Self {
        let q = q_bound as f64;
        let q_conj = p / (p - 1.0);
        let c2 = 1.0 / ((q + 1.0) * ((q + 3.0) * v).exp());
        let c3 = (1.0 / ((q + 1.0) * ((q + 1.0) * v).exp())).powi(2);
        let c4 = 1.0 / (1.0 + (-v).exp());
        let w = q * (q * v).exp();
        Self {
            q_bound,
            v,
            p,
            q_conj,
            ko_norm_p,
            c2,
            c3,
            c4,
            c5: ((1.0 + v.exp()) * (3.0 * v).exp()).powf(1.0 / q_conj) * ko_norm_p,
            c6: 1.0 / (1.0 + w),
            c7: 1.0 / (w * (1.0 + w)),
            c8: w / (1.0 + w),
            kappa: c3.sqrt().min(c2),
            lambda: 1.0 / (1.0 + (-v).exp()).sqrt(),
        }
    }

    /// Constants of the map whose regularity is `reg`, for quotients bounded by `q_bound`.
    pub fn for_map(reg: &RegularityReport, q_bound: u64) -> Self {
        Self::new(q_bound, reg.v, reg.p, reg.ko_norm_p)
    }

    /// Consecutive `D_n` atoms are comparable with this constant.
    pub fn d_comparability(&self) -> f64 {
        self.c2 * self.c6 * self.c6
    }

    /// Gap between consecutive breaks of `f^{q_m}`, relative to the ambient
    /// `Delta^{m-1}` atom, is at least this.
    pub fn break_gap(&self) -> f64 {
        let ev = self.v.exp();
        let c7sq = self.c7 * self.c7;
        (c7sq / ((1.0 + ev) * (4.0 * self.v).exp())).min(c7sq * self.c2 * (-3.0 * self.v).exp())
    }

    /// Smallest `l` with `2 (1 + e^v) e^{3v} lambda^l` below [`break_gap`](Self::break_gap).
    pub fn separation_l(&self) -> u64 {
        let lhs = 2.0 * (1.0 + self.v.exp()) * (3.0 * self.v).exp();
        let l = ((self.break_gap() / lhs).ln() / self.lambda.ln()).floor() + 1.0;
        l.max(1.0) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_values() {
        let c = Constants::new(1, 0.0, 2.0, 0.0);
        assert_eq!(c.c2, 0.5);
        assert_eq!(c.c4, 0.5);
        assert!((c.lambda - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(c.kappa, 0.5);
        assert_eq!(c.c5, 0.0);
    }

    #[test]
    fn pl2_c2() {
        // (Q + 1) e^{(Q + 3) v} = 2 * 3^8 for v = 2 ln 3
        let c = Constants::new(1, 2.0 * 3f64.ln(), 2.0, 0.0);
        assert!((c.c2 - 1.0 / (2.0 * 6561.0)).abs() < 1e-18);
        assert!((c.c2 - 7.62e-5).abs() < 1e-7);
    }

    #[test]
    fn identities_and_orderings() {
        for q in 1..5u64 {
            for v in [0.0, 0.3, 1.0, 2.2, 4.0] {
                let c = Constants::new(q, v, 3.0, 1.5);
                let qf = q as f64;
                let w = qf * (qf * v).exp();
                assert!((c.c6 - 1.0 / (1.0 + w)).abs() < 1e-15);
                assert!((c.c7 * c.c8 - c.c6 * c.c6).abs() < 1e-15 * c.c6);
                assert!(c.kappa > 0.0 && c.kappa < c.lambda && c.lambda < 1.0);
                assert!(c.c7 <= c.c8 && c.c8 < 1.0);
                assert!((1.0 / c.q_conj + 1.0 / c.p - 1.0).abs() < 1e-15);
                assert!((c.kappa - c.c3.sqrt().min(c.c2)).abs() < 1e-18);
            }
        }
    }

    #[test]
    fn c2_decreases_with_v() {
        let mut prev = f64::INFINITY;
        for i in 0..20 {
            let c = Constants::new(2, i as f64 * 0.25, 2.0, 0.0);
            assert!(c.c2 < prev);
            prev = c.c2;
        }
    }
}
