mod common;

use breaklab::partition::{build_d, build_p};
use breaklab::verify::{
    break_separation, comparability_report, decay_report, scan_barycentric_subsequence,
    search_separation, verify_denjoy, verify_finzi, verify_oscillation, Sampling,
};
use breaklab::Execution;
use common::*;

#[test]
fn finzi_at_level_ten() {
    let pl = tuned_pl2(0.5, 1.5);
    let r = verify_finzi(
        &pl.map,
        &pl.table(),
        10,
        2.0 * 3f64.ln(),
        &Sampling::new(1000, 1),
    )
    .unwrap();
    assert!(r.pass);
    assert!(r.observed_max <= 2.0 * 3f64.ln() + 1e-9);
    let mo = tuned_moebius2(2.0);
    let c = constants(&mo);
    let r = verify_finzi(&mo.map, &mo.table(), 10, c.v, &Sampling::new(1000, 1)).unwrap();
    assert!(r.pass && r.observed_max > 0.0);
}

#[test]
fn denjoy_for_map_and_inverse() {
    let tm = tuned_pl2(0.5, 1.5);
    let v = 2.0 * 3f64.ln();
    let inv = tm.map.inverse_map();
    for n in 8..=14 {
        for map in [&tm.map, &inv] {
            let r = verify_denjoy(map, &tm.table(), n, v, &Sampling::new(500, 2)).unwrap();
            assert!(
                r.pass && r.observed_min >= -v && r.observed_max <= v,
                "{r:?}"
            );
        }
    }
}

#[test]
fn oscillation_positive_and_degenerate_l() {
    let tm = tuned_moebius2(2.0);
    let c = constants(&tm);
    let t = tm.table();
    let s = Sampling::new(1000, 3);
    let r = verify_oscillation(&tm.map, &t, 8, 4, &c, &s).unwrap();
    assert!(r.pass && r.observed_max > 0.0 && r.observed_max < r.bound);
    let r0 = verify_oscillation(&tm.map, &t, 8, 0, &c, &s).unwrap();
    assert!(r0.pass && r0.bound >= c.c5);
    assert!(r0.observed_max >= r.observed_max);
}

#[test]
fn comparability_and_decay_on_pl2() {
    let tm = tuned_pl2(0.5, 1.5);
    let c = constants(&tm);
    let t = tm.table();
    for n in 1..=14 {
        let r = comparability_report(&build_p(&tm.map, tm.marked_point, &t, n).unwrap(), &c);
        assert!(r.pass && r.observed_min > 1000.0 * c.c2, "{r:?}");
        let r = comparability_report(&build_d(&tm.map, tm.marked_point, &t, n).unwrap(), &c);
        assert!(r.pass, "{r:?}");
    }
    let d = decay_report(
        &tm.map,
        tm.marked_point,
        &t,
        2,
        14,
        &c,
        &Sampling::new(1000, 4),
    )
    .unwrap();
    assert!(d.pass && d.report().pass);
    assert!(d.fitted_rate < c.lambda);
}

#[test]
fn separation_needs_large_enough_l() {
    let tm = tuned_pl2(0.5, 1.5);
    let c = constants(&tm);
    let t = tm.table();
    let br = tm.map.breaks();
    let scan = scan_barycentric_subsequence(&tm.map, &t, br[0], br[1], 14, &c).unwrap();
    assert!(scan.warning.is_none());
    let m = scan.passing[0];
    let r0 = break_separation(&tm.map, &t, br[1], m, 0, &scan.passing, &c).unwrap();
    assert!(!r0.one_break_each);
    assert!(r0.atoms.iter().any(|a| a.breaks_inside > 1));
    let s = search_separation(&tm.map, &t, br[1], m, 10, &scan.passing, &c).unwrap();
    let l = s.empirical_l.unwrap();
    assert!(l > 0 && (l as u64) < s.theoretical_l);
    assert!(s.reports.last().unwrap().pass());
}

#[test]
fn sequential_fallback_matches() {
    let tm = tuned_moebius2(2.0);
    let c = constants(&tm);
    let t = tm.table();
    let s = Sampling::new(800, 5);
    let seq = s.with_exec(Execution::Sequential);
    assert_eq!(
        verify_finzi(&tm.map, &t, 9, c.v, &s).unwrap(),
        verify_finzi(&tm.map, &t, 9, c.v, &seq).unwrap()
    );
    assert_eq!(
        verify_oscillation(&tm.map, &t, 8, 2, &c, &s).unwrap(),
        verify_oscillation(&tm.map, &t, 8, 2, &c, &seq).unwrap()
    );
}
