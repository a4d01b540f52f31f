mod common;

use breaklab::conjugacy::{
    build_h, phi_to_rotation, singularity_profile, ConjugatePair, MeasureCase,
};
use breaklab::partition::build_p;
use breaklab::{ccw_distance, Side};
use common::*;

fn singular() -> ConjugatePair {
    let (f1, f2) = (tuned_pl2(0.5, 1.5), tuned_pl2(0.4, 2.0));
    let table = f1.table();
    ConjugatePair::new(f1.map, f2.map, table, 24).unwrap()
}

#[test]
fn phi_mesh_and_first_arc() {
    let tm = tuned_pl2(0.5, 1.5);
    let t = tm.table();
    let phi = phi_to_rotation(&tm.map, tm.rho(), &t, 10).unwrap();
    let p10 = build_p(&tm.map, tm.marked_point, &t, 10).unwrap();
    // largest rotation atom at level 10 is ||q_9 rho||
    let q9 = fibonacci(11) as f64;
    let rot = (q9 * tm.rho() - (q9 * tm.rho()).round()).abs();
    assert!((phi.mesh() - p10.max_atom_length().max(rot)).abs() < 1e-12);
    let a = tm.marked_point;
    let mu = ccw_distance(phi.eval(a), phi.eval(tm.map.eval(a)));
    assert!((mu - tm.rho()).abs() <= phi.mesh());
}

#[test]
fn residual_within_two_meshes() {
    let (f1, f2) = (tuned_pl2(0.5, 1.5), tuned_pl2(0.4, 2.0));
    let h = build_h(&f1.map, &f2.map, &f1.table(), 14).unwrap();
    let r = breaklab::conjugacy::conjugacy_residual(&h, &f1.map, &f2.map, 4096);
    assert!(r <= 2.0 * h.mesh(), "{r} vs mesh {}", h.mesh());
    let (x0, y0) = h.pinned();
    let mut prev = 0.0;
    for k in 1..2000 {
        let y = ccw_distance(y0, h.eval(x0.shifted(k as f64 / 2000.0)));
        assert!(y >= prev);
        prev = y;
    }
}

#[test]
fn fn_bounded_by_both_variations() {
    let pair = singular();
    let v = pair.f1.regularity(2.0).unwrap().v + pair.f2.regularity(2.0).unwrap().v;
    let mut seen = 0;
    for (i, x, _) in pair.h.knots() {
        if i % 7 != 0 {
            continue;
        }
        let val = pair.log_fn(10, x, Side::Right).unwrap();
        assert!(val.abs() <= v, "{val} at knot {i}");
        seen += 1;
    }
    assert!(seen > 1000);
}

#[test]
fn jumps_at_unmatched_breaks() {
    let pair = singular();
    let th = pair.thresholds().unwrap();
    assert_eq!(th.case, MeasureCase::Distinct);
    let (s1b, s2b) = (3.0, 6.0);
    for k in [0, 3, 50] {
        for jp in pair.jump_points(12, k).unwrap() {
            let want = match jp.kind {
                'b' => 1.0 / s1b,
                'c' => s2b,
                _ => continue,
            };
            assert!((jp.jump / want - 1.0).abs() < 1e-6, "{jp:?}");
        }
    }
}

#[test]
fn identity_pair_is_undetermined_and_flat() {
    let tm = tuned_pl2(0.5, 1.5);
    let pair = ConjugatePair::new(tm.map.clone(), tm.map.clone(), tm.table(), 24).unwrap();
    let th = pair.thresholds().unwrap();
    assert_eq!(th.case, MeasureCase::Undetermined);
    assert_eq!(th.delta0, 0.0);
    let prof = singularity_profile(&pair.h, &pair.f1, &pair.table, 12, &[0.5]).unwrap();
    assert!(prof.is_degenerate(1e-9));
    assert_eq!(prof.m_at(0.5), Some(0.0));
}

#[test]
fn deviation_intervals_written() {
    let pair = singular();
    let th = pair.thresholds().unwrap();
    let r = pair.deviation_measure(10, th.delta0, 2e-3).unwrap();
    let sum: f64 = r.intervals.iter().map(|i| i.length).sum();
    assert!((sum - r.measure).abs() < 1e-12);
    assert!(r
        .intervals
        .iter()
        .all(|i| i.log_fn_min.abs().max(i.log_fn_max.abs()) >= th.delta0));
    let path = std::env::temp_dir().join(format!("breaklab-dev-{}.csv", std::process::id()));
    r.write_intervals_csv(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("start,length,log_Fn_min,log_Fn_max"));
    assert_eq!(text.lines().count(), r.intervals.len() + 1);
    std::fs::remove_file(path).unwrap();
}
