#![allow(dead_code)]

use breaklab::pmap::build_moebius2;
use breaklab::rotation::{tune_to_rotation, TunedMap};
use breaklab::{build_pl2, CirclePoint, Constants, ContinuedFraction};

pub fn p(x: f64) -> CirclePoint {
    CirclePoint::new(x).unwrap()
}

pub fn golden() -> ContinuedFraction {
    ContinuedFraction::golden(20)
}

pub fn tuned_pl2(b: f64, s1: f64) -> TunedMap {
    let base = build_pl2(p(0.0), p(b), s1, 0.0).unwrap();
    tune_to_rotation(&base, &golden(), 24).unwrap()
}

pub fn tuned_moebius2(sigma: f64) -> TunedMap {
    let base = build_moebius2(p(0.0), p(0.5), sigma, 0.0).unwrap();
    tune_to_rotation(&base, &golden(), 24).unwrap()
}

pub fn constants(tm: &TunedMap) -> Constants {
    let reg = tm.map.regularity(2.0).unwrap();
    Constants::for_map(&reg, tm.cf.bounded_type().q_max)
}

/// `F_1 = F_2 = 1`, `F_{k+2} = F_{k+1} + F_k`.
pub fn fibonacci(k: usize) -> u64 {
    let (mut a, mut b) = (1u64, 1u64);
    for _ in 1..k {
        (a, b) = (b, a + b);
    }
    a
}
