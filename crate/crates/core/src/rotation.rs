//! Rotation numbers, closest returns and tuning a family `f_t = f + t`
//! to a prescribed irrational rotation number.

use serde::{Deserialize, Serialize};

use crate::cf::{convergents, ContinuedFraction, ConvergentTable};
use crate::circle::{ccw_distance, circle_distance, sort_ccw, CirclePoint};
use crate::error::{Error, Result};
use crate::pmap::PiecewiseHomeo;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    LiftAverage,
    ReturnTimes,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationEstimate {
    pub estimate: f64,
    pub error_bound: f64,
    pub rational: bool,
}

/// Forward orbit on the circle with the integer part of the lift kept
/// exactly: `L^i(x0) = winding[i] + points[i]`.
struct LiftOrbit<'a> {
    map: &'a PiecewiseHomeo,
    y: f64,
    winding: i64,
}

impl<'a> LiftOrbit<'a> {
    fn new(map: &'a PiecewiseHomeo, x0: CirclePoint) -> Self {
        Self {
            map,
            y: x0.value(),
            winding: 0,
        }
    }

    fn step(&mut self) -> (CirclePoint, i64) {
        let l = self.map.lift(self.y);
        let k = l.floor();
        let mut y = l - k;
        let mut k = k as i64;
        if y >= 1.0 {
            y = 0.0;
            k += 1;
        }
        self.y = y;
        self.winding += k;
        (CirclePoint::wrap(y), self.winding)
    }
}

fn base_point(map: &PiecewiseHomeo) -> CirclePoint {
    map.first_break().unwrap_or(CirclePoint::ZERO)
}

pub fn rotation_number(
    map: &PiecewiseHomeo,
    iterations: usize,
    method: Method,
) -> Result<RotationEstimate> {
    if iterations == 0 {
        return Err(Error::InvalidArgument("iterations must be >= 1".into()));
    }
    let x0 = base_point(map);
    let tol = map.ctx().min_resolvable_length();
    let mut orbit = LiftOrbit::new(map, x0);
    let mut last = (x0, 0);
    for i in 1..=iterations {
        let (y, w) = orbit.step();
        if circle_distance(y, x0) < tol {
            let p = (w as f64 + y.value() - x0.value()).round() as i64;
            return Ok(RotationEstimate {
                estimate: p as f64 / i as f64,
                error_bound: 0.0,
                rational: true,
            });
        }
        last = (y, w);
    }
    match method {
        Method::LiftAverage => {
            let disp = last.1 as f64 + (last.0.value() - x0.value());
            Ok(RotationEstimate {
                estimate: disp / iterations as f64,
                error_bound: 1.0 / iterations as f64,
                rational: false,
            })
        }
        Method::ReturnTimes => {
            // The latest record i sits on the far side of the last
            // completed return q_N, so |i rho - p| < ||q_{N-1} rho|| < 1 / q_N.
            let (closed, open) = return_records(map, x0, usize::MAX, iterations)?;
            let q_n = closed.last().map_or(1, |r| r.0);
            let (i, p) = open.expect("iterations >= 1 starts a run");
            Ok(RotationEstimate {
                estimate: p as f64 / i as f64,
                error_bound: 1.0 / (i as f64 * q_n as f64),
                rational: false,
            })
        }
    }
}

/// Closest-return times `q_0, q_1, ...` of the orbit of `xi0`.
///
/// A time is a one-sided record when no earlier orbit point lies strictly
/// between `xi0` and it on that side; the `q_n` are the last records of
/// each run of same-side records. Only the order of orbit points is used,
/// so conjugate maps give identical answers.
pub fn closest_return_times(
    map: &PiecewiseHomeo,
    xi0: CirclePoint,
    n_max: usize,
) -> Result<Vec<u64>> {
    let horizon = 1usize << 24;
    let (rec, _) = return_records(map, xi0, n_max, horizon)?;
    if rec.len() < n_max {
        return Err(Error::Precondition(format!(
            "only {} closest returns found within {horizon} iterates",
            rec.len()
        )));
    }
    Ok(rec.into_iter().map(|(q, _)| q).collect())
}

type Records = (Vec<(u64, i64)>, Option<(u64, i64)>);

/// `(q_n, p_n)` pairs, stopping after `n_max` pairs or `horizon` iterates,
/// plus the latest record of the run still open at the end.
fn return_records(
    map: &PiecewiseHomeo,
    x0: CirclePoint,
    n_max: usize,
    horizon: usize,
) -> Result<Records> {
    let tol = map.ctx().min_resolvable_length();
    let mut orbit = LiftOrbit::new(map, x0);
    let (mut best_r, mut best_l) = (f64::INFINITY, f64::INFINITY);
    // latest run of same-side records: (side, time, p); +1 is right
    let mut run: Option<(i8, u64, i64)> = None;
    let mut out: Vec<(u64, i64)> = vec![];
    for i in 1..=horizon as u64 {
        let (y, w) = orbit.step();
        let dr = ccw_distance(x0, y);
        let dl = ccw_distance(y, x0);
        if dr.min(dl) < tol {
            let p = (w as f64 + y.value() - x0.value()).round() as i64;
            return Err(Error::Periodic { p, period: i });
        }
        let p_right = w - i64::from(y.value() < x0.value());
        if i == 1 {
            // f(x0) is the right record q_{-1} = 1 and starts the left run
            // that ends at q_0
            best_r = dr;
            best_l = dl;
            run = Some((-1, 1, p_right + 1));
            continue;
        }
        let (side, p) = if dr < best_r {
            best_r = dr;
            (1i8, p_right)
        } else if dl < best_l {
            best_l = dl;
            (-1i8, p_right + 1)
        } else {
            continue;
        };
        if let Some((s, q, pp)) = run {
            if s != side {
                out.push((q, pp));
                check_recurrence(&out)?;
                if out.len() >= n_max {
                    return Ok((out, None));
                }
            }
        }
        run = Some((side, i, p));
    }
    Ok((out, run.map(|(_, q, p)| (q, p))))
}

fn check_recurrence(q: &[(u64, i64)]) -> Result<()> {
    let n = q.len();
    let prev2 = if n >= 3 {
        q[n - 3].0
    } else if n == 2 {
        1
    } else {
        return Ok(());
    };
    let (a, b) = (q[n - 2].0, q[n - 1].0);
    if b <= prev2 || (b - prev2) % a != 0 {
        return Err(Error::Inconsistent {
            index: n - 1,
            detail: format!("q = {b} is not k * {a} + {prev2}"),
        });
    }
    Ok(())
}

/// A member of `f_t = f + t` whose marked orbit has the circular order of
/// the target rotation.
#[derive(Debug, Clone)]
pub struct TunedMap {
    pub map: PiecewiseHomeo,
    pub t: f64,
    pub marked_point: CirclePoint,
    pub requested_depth: usize,
    /// Deepest level `N` at which the orbit over `[-q_N, q_N + q_{N-1}]` was
    /// verified against the rotation.
    pub achieved_depth: usize,
    /// Target quotients, padded with ones up to `achieved_depth`.
    pub cf: ContinuedFraction,
}

impl TunedMap {
    pub fn table(&self) -> ConvergentTable {
        convergents(&self.cf).expect("verified depth fits in u64")
    }

    pub fn rho(&self) -> f64 {
        self.cf.value()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Pace {
    Slow,
    Fast,
    Matched,
}

/// Compare `floor(L^i(a) - a)` with `floor(i rho)` for `i <= horizon`.
fn pace(map: &PiecewiseHomeo, a: CirclePoint, rho: f64, horizon: u64) -> Pace {
    let mut orbit = LiftOrbit::new(map, a);
    for i in 1..=horizon {
        let (y, w) = orbit.step();
        let got = w - i64::from(y.value() < a.value());
        let want = (i as f64 * rho).floor() as i64;
        if got != want {
            return if got > want { Pace::Fast } else { Pace::Slow };
        }
    }
    Pace::Matched
}

/// Largest level the working precision and orbit budget allow.
fn level_cap(table: &ConvergentTable, u: f64) -> usize {
    let mut cap = 0;
    for n in 1..table.len() as i64 {
        let q = table.q(n) as f64;
        let len = 2 * table.q(n) + table.q(n - 1);
        if 10.0 * u * q * q >= 1.0 || len > 1 << 20 {
            break;
        }
        cap = n as usize;
    }
    cap
}

/// Same circular order as the rotation over `[-q_N, q_N + q_{N-1}]`.
pub fn verify_combinatorics(
    map: &PiecewiseHomeo,
    a: CirclePoint,
    rho: f64,
    table: &ConvergentTable,
    n: usize,
) -> Result<()> {
    let n = n as i64;
    let lo = -(table.try_q(n)? as i64);
    let hi = (table.q(n) + table.try_q(n - 1)?) as i64;
    let pts = map.orbit(a, lo, hi)?;
    let rot: Vec<CirclePoint> = (lo..=hi)
        .map(|i| CirclePoint::wrap(i as f64 * rho))
        .collect();
    let got = sort_ccw(&pts, a, map.ctx())?;
    let want = sort_ccw(&rot, CirclePoint::ZERO, map.ctx())?;
    if let Some(k) = got.iter().zip(&want).position(|(g, w)| g != w) {
        return Err(Error::Combinatorics(format!(
            "position {k}: orbit index {} where the rotation has {}",
            lo + got[k] as i64,
            lo + want[k] as i64
        )));
    }
    Ok(())
}

/// Bisection in `t` for `f_t = base + t`, refined level by level.
///
/// The target's tail beyond its listed quotients is all ones. Tuning keeps
/// deepening until the working precision gives out, and the requested depth
/// is then verified on the final parameter.
pub fn tune_to_rotation(
    base: &PiecewiseHomeo,
    target: &ContinuedFraction,
    depth: usize,
) -> Result<TunedMap> {
    if target.is_terminated() {
        return Err(Error::InvalidArgument(
            "target is rational at working precision".into(),
        ));
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be >= 1".into()));
    }
    let a = base_point(base);
    let rho = target.value();
    let u = base.ctx().unit_roundoff();
    let deep = target.extended(depth.max(target.depth()).max(80))?;
    let table = match convergents(&deep) {
        Ok(t) => t,
        Err(Error::Overflow { n }) => convergents(&deep.truncated(n))?,
        Err(e) => return Err(e),
    };
    let cap = level_cap(&table, u);

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut t = None;
    let mut tuned_level = 0;
    for level in 1..=cap {
        let horizon = 2 * table.q(level as i64) + table.q(level as i64 - 1);
        let mut found = None;
        let mut mid = 0.5 * (lo + hi);
        if let Some(t0) = t {
            if t0 > lo && t0 < hi {
                mid = t0;
            }
        }
        loop {
            match pace(&base.with_offset(mid), a, rho, horizon) {
                Pace::Matched => {
                    found = Some(mid);
                    break;
                }
                Pace::Fast => hi = mid,
                Pace::Slow => lo = mid,
            }
            let next = 0.5 * (lo + hi);
            if next <= lo || next >= hi {
                break;
            }
            mid = next;
        }
        match found {
            Some(m) => {
                t = Some(m);
                tuned_level = level;
            }
            None => break,
        }
    }
    let t = t.ok_or(Error::DepthUnachievable {
        requested: depth,
        achieved: 0,
    })?;
    let map = base.with_offset(t);
    let mut achieved = 0;
    for level in 1..=tuned_level {
        if verify_combinatorics(&map, a, rho, &table, level).is_err() {
            break;
        }
        achieved = level;
    }
    if achieved < depth {
        return Err(Error::DepthUnachievable {
            requested: depth,
            achieved,
        });
    }
    Ok(TunedMap {
        map,
        t,
        marked_point: a,
        requested_depth: depth,
        achieved_depth: achieved,
        cf: deep.truncated(achieved + 1),
    })
}
