//! Conjugacies built from matched orbits, the ratio `F_n`, deviation sets
//! and the slope profile of `h`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cf::ConvergentTable;
use crate::circle::{ccw_distance, circle_distance, sort_ccw, Arc, CirclePoint};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::partition::{build_d, build_p};
use crate::pmap::{PiecewiseHomeo, Side};

/// Monotone piecewise-linear circle map through matched orbit knots.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugacyMap {
    i_min: i64,
    orbit_x: Vec<CirclePoint>,
    orbit_y: Vec<CirclePoint>,
    /// Orbit positions in ccw order from the pinned knot.
    order: Vec<usize>,
    off_x: Vec<f64>,
    off_y: Vec<f64>,
    mesh: f64,
    min_res: f64,
}

impl ConjugacyMap {
    /// Knots `(xs[k], ys[k])` carrying orbit times `i_min + k`; time 0 is pinned.
    pub fn from_orbits(
        xs: Vec<CirclePoint>,
        ys: Vec<CirclePoint>,
        i_min: i64,
        ctx: &crate::circle::PrecisionContext,
    ) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 || i_min > 0 || (-i_min) as usize >= xs.len() {
            return Err(Error::InvalidArgument("knot lists do not match".into()));
        }
        let x0 = xs[(-i_min) as usize];
        let y0 = ys[(-i_min) as usize];
        let order = sort_ccw(&xs, x0, ctx)?;
        let oy = sort_ccw(&ys, y0, ctx)?;
        if let Some(k) = order.iter().zip(&oy).position(|(a, b)| a != b) {
            return Err(Error::Combinatorics(format!(
                "knot {k}: orbit time {} in the domain, {} in the range",
                i_min + order[k] as i64,
                i_min + oy[k] as i64
            )));
        }
        let off_x: Vec<f64> = order.iter().map(|&k| ccw_distance(x0, xs[k])).collect();
        let off_y: Vec<f64> = order.iter().map(|&k| ccw_distance(y0, ys[k])).collect();
        let gap = |off: &[f64]| {
            let n = off.len();
            (0..n)
                .map(|k| {
                    if k + 1 < n {
                        off[k + 1] - off[k]
                    } else {
                        1.0 - off[k]
                    }
                })
                .fold(0.0, f64::max)
        };
        let mesh = gap(&off_x).max(gap(&off_y));
        Ok(Self {
            i_min,
            orbit_x: xs,
            orbit_y: ys,
            order,
            off_x,
            off_y,
            mesh,
            min_res: ctx.min_resolvable_length(),
        })
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Orbit time range covered by the knots.
    pub fn times(&self) -> std::ops::RangeInclusive<i64> {
        self.i_min..=self.i_min + self.orbit_x.len() as i64 - 1
    }

    /// Knot at orbit time `i`.
    pub fn knot(&self, i: i64) -> Option<(CirclePoint, CirclePoint)> {
        let k = usize::try_from(i - self.i_min).ok()?;
        Some((*self.orbit_x.get(k)?, self.orbit_y[k]))
    }

    /// `(time, x, y)` in ccw order.
    pub fn knots(&self) -> Vec<(i64, CirclePoint, CirclePoint)> {
        self.order
            .iter()
            .map(|&k| (self.i_min + k as i64, self.orbit_x[k], self.orbit_y[k]))
            .collect()
    }

    pub fn pinned(&self) -> (CirclePoint, CirclePoint) {
        self.knot(0).expect("time 0 is a knot")
    }

    fn interpolate(
        &self,
        p: CirclePoint,
        base: CirclePoint,
        from: &[f64],
        to: &[f64],
        to_base: CirclePoint,
    ) -> (CirclePoint, usize, f64) {
        let d = ccw_distance(base, p);
        let k = from.partition_point(|&o| o <= d).saturating_sub(1);
        let n = from.len();
        let (gf, gt) = if k + 1 < n {
            (from[k + 1] - from[k], to[k + 1] - to[k])
        } else {
            (1.0 - from[k], 1.0 - to[k])
        };
        let t = ((d - from[k]) / gf).clamp(0.0, 1.0);
        (to_base.shifted(to[k] + gt * t), k, d - from[k])
    }

    pub fn eval(&self, x: CirclePoint) -> CirclePoint {
        let (x0, y0) = self.pinned();
        let (y, k, r) = self.interpolate(x, x0, &self.off_x, &self.off_y, y0);
        if r == 0.0 {
            return self.orbit_y[self.order[k]];
        }
        y
    }

    pub fn inverse(&self, y: CirclePoint) -> CirclePoint {
        let (x0, y0) = self.pinned();
        let (x, k, r) = self.interpolate(y, y0, &self.off_y, &self.off_x, x0);
        if r == 0.0 {
            return self.orbit_x[self.order[k]];
        }
        x
    }

    /// Index of the knot interval `[y_k, y_{k+1})` holding `y`, in ccw order.
    fn y_cell(&self, y: CirclePoint) -> usize {
        let d = ccw_distance(self.pinned().1, y);
        self.off_y.partition_point(|&o| o <= d).saturating_sub(1)
    }

    /// Orbit time of the knot at `x`, if `x` is one within the resolvable length.
    pub fn knot_time(&self, x: CirclePoint) -> Option<i64> {
        let (x0, _) = self.pinned();
        let d = ccw_distance(x0, x);
        let k = self.off_x.partition_point(|&o| o <= d).saturating_sub(1);
        let n = self.off_x.len();
        for j in [k, (k + 1) % n] {
            if circle_distance(self.orbit_x[self.order[j]], x) < self.min_res {
                return Some(self.i_min + self.order[j] as i64);
            }
        }
        None
    }

    /// Knot pairs as CSV rows `(time, x, y)`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        #[derive(Serialize)]
        struct Row {
            time: i64,
            x: f64,
            y: f64,
        }
        let mut w = csv::Writer::from_path(path)?;
        for (time, x, y) in self.knots() {
            w.serialize(Row {
                time,
                x: x.value(),
                y: y.value(),
            })?;
        }
        w.flush()?;
        Ok(())
    }
}

/// First break, or 0 for a rotation.
pub fn normalization_point(map: &PiecewiseHomeo) -> CirclePoint {
    map.first_break().unwrap_or(CirclePoint::ZERO)
}

/// `phi: f^i(a) -> {i rho}` for `0 <= i < q_n + q_{n-1}`.
pub fn phi_to_rotation(
    map: &PiecewiseHomeo,
    rho: f64,
    table: &ConvergentTable,
    n: usize,
) -> Result<ConjugacyMap> {
    let ni = n as i64;
    let hi = (table.try_q(ni)? + table.try_q(ni - 1)?) as i64 - 1;
    let a = normalization_point(map);
    let xs = map.orbit(a, 0, hi)?;
    let ys = (0..=hi)
        .map(|i| CirclePoint::wrap(i as f64 * rho))
        .collect();
    ConjugacyMap::from_orbits(xs, ys, 0, map.ctx())
}

/// `h: f1^i(a1) -> f2^i(a2)` for `-q_M <= i <= q_M + q_{M-1}`, with `a1`, `a2`
/// the normalization points.
pub fn build_h(
    f1: &PiecewiseHomeo,
    f2: &PiecewiseHomeo,
    table: &ConvergentTable,
    depth: usize,
) -> Result<ConjugacyMap> {
    build_h_at(
        f1,
        normalization_point(f1),
        f2,
        normalization_point(f2),
        table,
        depth,
    )
}

pub fn build_h_at(
    f1: &PiecewiseHomeo,
    a1: CirclePoint,
    f2: &PiecewiseHomeo,
    a2: CirclePoint,
    table: &ConvergentTable,
    depth: usize,
) -> Result<ConjugacyMap> {
    let m = depth as i64;
    let lo = -(table.try_q(m)? as i64);
    let hi = (table.q(m) + table.try_q(m - 1)?) as i64;
    let xs = f1.orbit(a1, lo, hi)?;
    let ys = f2.orbit(a2, lo, hi)?;
    ConjugacyMap::from_orbits(xs, ys, lo, f1.ctx())
}

/// `max dist(h(f1(x)), f2(h(x)))` over a uniform grid and every knot.
pub fn conjugacy_residual(
    h: &ConjugacyMap,
    f1: &PiecewiseHomeo,
    f2: &PiecewiseHomeo,
    grid_size: usize,
) -> f64 {
    let r = |x: CirclePoint| circle_distance(h.eval(f1.eval(x)), f2.eval(h.eval(x)));
    let grid = (0..grid_size)
        .map(|k| r(CirclePoint::wrap(k as f64 / grid_size as f64)))
        .fold(0.0, f64::max);
    h.orbit_x.iter().map(|&x| r(x)).fold(grid, f64::max)
}

/// Which of the two cases `mu_1[a1, b1]` vs `mu_2[a2, b2]` holds, to mesh accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureCase {
    Distinct,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub case: MeasureCase,
    /// `|h(b1) - b2|`, against the mesh of `h`.
    pub separation: f64,
    pub delta0: f64,
    pub delta1: f64,
}

/// Jump point of `F_n` with its ratio `F_n(c - 0) / F_n(c + 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpPoint {
    pub kind: char,
    pub k: usize,
    pub x: f64,
    pub jump: f64,
}

/// Two maps with the same rotation number and a conjugacy between them.
#[derive(Debug, Clone)]
pub struct ConjugatePair {
    pub f1: PiecewiseHomeo,
    pub f2: PiecewiseHomeo,
    pub h: ConjugacyMap,
    pub table: ConvergentTable,
    pub exec: Execution,
}

/// Backward break orbits up to `q_n`.
struct Level {
    n: usize,
    qn: usize,
    a1: Option<CirclePoint>,
    b1: Vec<CirclePoint>,
    a2: Option<CirclePoint>,
    b2: Vec<CirclePoint>,
    /// `b2` orbit sorted ccw from 0, for nearest lookups.
    b2_sorted: Vec<f64>,
}

fn back_orbit(f: &PiecewiseHomeo, c: Option<CirclePoint>, len: usize) -> Vec<CirclePoint> {
    let Some(mut y) = c else { return vec![] };
    let mut v = Vec::with_capacity(len);
    for _ in 0..len {
        v.push(y);
        y = f.inverse(y);
    }
    v
}

fn orbit_through(f: &PiecewiseHomeo, c: CirclePoint, back: usize, len: usize) -> Vec<CirclePoint> {
    let mut pts: Vec<CirclePoint> = back_orbit(f, Some(c), back + 1).into_iter().rev().collect();
    pts.truncate(len);
    let mut y = f.eval(c);
    while pts.len() < len {
        pts.push(y);
        y = f.eval(y);
    }
    pts
}

/// `sigma` of `f^{len}` at `f^{-back}(c)`.
fn orbit_jump(f: &PiecewiseHomeo, c: CirclePoint, back: usize, len: usize) -> f64 {
    let pts = orbit_through(f, c, back, len);
    (f.log_cocycle_along(&pts, Side::Left) - f.log_cocycle_along(&pts, Side::Right)).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationInterval {
    pub start: f64,
    pub length: f64,
    #[serde(rename = "log_Fn_min")]
    pub log_fn_min: f64,
    #[serde(rename = "log_Fn_max")]
    pub log_fn_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub n: usize,
    pub delta: f64,
    pub measure: f64,
    pub intervals: Vec<DeviationInterval>,
    /// Largest evaluation cell.
    pub resolution: f64,
    /// Level of the `D` partition the cells refine.
    pub partition_level: usize,
    /// Mass of cells too close to a jump of `F_n` to evaluate.
    pub unresolved: f64,
}

impl DeviationReport {
    pub fn write_intervals_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for i in &self.intervals {
            w.serialize(i)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Cells of the circle on which `log F_n` is evaluated once.
#[derive(Debug, Clone, PartialEq)]
pub struct Cells {
    pub n: usize,
    pub partition_level: usize,
    pub arcs: Vec<Arc>,
    pub log_fn: Vec<Option<f64>>,
}

impl Cells {
    pub fn resolution(&self) -> f64 {
        self.arcs.iter().map(|a| a.length).fold(0.0, f64::max)
    }

    pub fn measure(&self, delta: f64) -> DeviationReport {
        let mut intervals: Vec<DeviationInterval> = vec![];
        let mut measure = 0.0;
        let mut unresolved = 0.0;
        let mut open = false;
        for (arc, v) in self.arcs.iter().zip(&self.log_fn) {
            match v {
                Some(v) if v.abs() >= delta => {
                    measure += arc.length;
                    match intervals.last_mut() {
                        Some(last) if open => {
                            last.length += arc.length;
                            last.log_fn_min = last.log_fn_min.min(*v);
                            last.log_fn_max = last.log_fn_max.max(*v);
                        }
                        _ => intervals.push(DeviationInterval {
                            start: arc.start.value(),
                            length: arc.length,
                            log_fn_min: *v,
                            log_fn_max: *v,
                        }),
                    }
                    open = true;
                }
                Some(_) => open = false,
                None => {
                    unresolved += arc.length;
                    open = false;
                }
            }
        }
        DeviationReport {
            n: self.n,
            delta,
            measure,
            intervals,
            resolution: self.resolution(),
            partition_level: self.partition_level,
            unresolved,
        }
    }
}

impl ConjugatePair {
    pub fn new(
        f1: PiecewiseHomeo,
        f2: PiecewiseHomeo,
        table: ConvergentTable,
        depth: usize,
    ) -> Result<Self> {
        let h = build_h(&f1, &f2, &table, depth)?;
        Ok(Self {
            f1,
            f2,
            h,
            table,
            exec: Execution::Auto,
        })
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    fn level(&self, n: usize) -> Result<Level> {
        let qn = self.table.try_q(n as i64)? as usize;
        if !self.h.times().contains(&-(qn as i64)) {
            return Err(Error::Precondition(format!(
                "h has no knots back to -q_{n} = -{qn}"
            )));
        }
        let second = |f: &PiecewiseHomeo| f.breaks().get(1).copied();
        let b2 = back_orbit(&self.f2, second(&self.f2), qn);
        let mut b2_sorted: Vec<f64> = b2.iter().map(|p| p.value()).collect();
        b2_sorted.sort_by(f64::total_cmp);
        Ok(Level {
            n,
            qn,
            a1: self.f1.first_break(),
            b1: back_orbit(&self.f1, second(&self.f1), qn),
            a2: self.f2.first_break(),
            b2,
            b2_sorted,
        })
    }

    /// A jump of `Df2^{q_n}` shares the knot interval of `y`, so the side of
    /// the true `h(x)` relative to it is unknown.
    fn shares_knot_interval(&self, lv: &Level, y: CirclePoint) -> bool {
        let s = &lv.b2_sorted;
        if s.is_empty() {
            return false;
        }
        let cell = self.h.y_cell(y);
        let k = s.partition_point(|&v| v < y.value());
        [k.checked_sub(1).unwrap_or(s.len() - 1), k % s.len()]
            .iter()
            .any(|&j| self.h.y_cell(CirclePoint::wrap(s[j])) == cell)
    }

    fn log_fn_at(&self, lv: &Level, x: CirclePoint, side: Side) -> Result<f64> {
        let qn = lv.qn;
        let knot = self.h.knot_time(x);
        if let Some(i) = knot {
            if i + qn as i64 - 1 <= *self.h.times().end() {
                let k = (i - self.h.i_min) as usize;
                let s1 = self.f1.log_cocycle_along(&self.h.orbit_x[k..k + qn], side);
                let s2 = self.f2.log_cocycle_along(&self.h.orbit_y[k..k + qn], side);
                return Ok(s2 - s1);
            }
        }
        let y = match knot {
            Some(i) => self.h.knot(i).expect("knot time").1,
            None => self.h.eval(x),
        };
        if knot.is_none() && self.shares_knot_interval(lv, y) {
            return Err(Error::Ambiguous {
                x: x.value(),
                detail: format!("h(x) shares a knot interval with a jump of Df2^q_{}", lv.n),
            });
        }
        Ok(self.f2.log_cocycle(qn, y, side) - self.f1.log_cocycle(qn, x, side))
    }

    /// `log F_n(x) = log Df2^{q_n}(h(x)) - log Df1^{q_n}(x)`.
    pub fn log_fn(&self, n: usize, x: CirclePoint, side: Side) -> Result<f64> {
        let lv = self.level(n)?;
        self.log_fn_at(&lv, x, side)
    }

    fn jump_at(&self, lv: &Level, c: CirclePoint) -> Result<(char, usize, f64)> {
        let ctx = self.f1.ctx();
        let qn = lv.qn;
        let mut kind = None;
        let mut j1 = 1.0;
        for k in 0..qn {
            if let (Some((x, _)), Some(a1)) = (self.h.knot(-(k as i64)), lv.a1) {
                if ctx.coincide(x, c) {
                    j1 = orbit_jump(&self.f1, a1, k, qn);
                    kind = Some(('a', k));
                    break;
                }
            }
            if lv.b1.get(k).is_some_and(|&p| ctx.coincide(p, c)) {
                j1 = orbit_jump(&self.f1, self.f1.breaks()[1], k, qn);
                kind = Some(('b', k));
                break;
            }
        }
        let hc = self.h.eval(c);
        let mut j2 = 1.0;
        for k in 0..qn {
            if let (Some((_, y)), Some(a2)) = (self.h.knot(-(k as i64)), lv.a2) {
                if ctx.coincide(y, hc) {
                    j2 = orbit_jump(&self.f2, a2, k, qn);
                    kind.get_or_insert(('a', k));
                    break;
                }
            }
            if let Some(&p) = lv.b2.get(k) {
                if ctx.coincide(p, hc) || ctx.coincide(self.h.inverse(p), c) {
                    j2 = orbit_jump(&self.f2, self.f2.breaks()[1], k, qn);
                    kind.get_or_insert(('c', k));
                    break;
                }
            }
        }
        let (ch, k) = kind.ok_or(Error::NotAJumpPoint(c.value()))?;
        Ok((ch, k, j2 / j1))
    }

    /// `F_n(c - 0) / F_n(c + 0)` at a jump point `c`.
    pub fn fn_jump(&self, n: usize, c: CirclePoint) -> Result<f64> {
        let lv = self.level(n)?;
        Ok(self.jump_at(&lv, c)?.2)
    }

    /// The jump points `a_k = f1^{-k}(a1)`, `b_k = f1^{-k}(b1)` and
    /// `c_k = h^{-1}(f2^{-k}(b2))`, with their jumps.
    pub fn jump_points(&self, n: usize, k: usize) -> Result<Vec<JumpPoint>> {
        let lv = self.level(n)?;
        if k >= lv.qn {
            return Err(Error::InvalidArgument(format!("k = {k} >= q_{n}")));
        }
        let mut pts = vec![];
        if lv.a1.is_some() || lv.a2.is_some() {
            pts.push(self.h.knot(-(k as i64)).expect("level checked").0);
        }
        if let Some(&p) = lv.b1.get(k) {
            pts.push(p);
        }
        if let Some(&p) = lv.b2.get(k) {
            let c = self.h.inverse(p);
            if !pts.iter().any(|&q| self.f1.ctx().coincide(q, c)) {
                pts.push(c);
            }
        }
        pts.into_iter()
            .map(|c| {
                let (kind, kk, jump) = self.jump_at(&lv, c)?;
                Ok(JumpPoint {
                    kind,
                    k: kk,
                    x: c.value(),
                    jump,
                })
            })
            .collect()
    }

    /// Case split by comparing `h(b1)` with `b2`, and the thresholds
    /// `delta_0`, `delta_1` from the jumps at the breaks.
    pub fn thresholds(&self) -> Result<Thresholds> {
        let (b1, b2) = match (self.f1.breaks().get(1), self.f2.breaks().get(1)) {
            (Some(&x), Some(&y)) => (x, y),
            _ => return Err(Error::Precondition("both maps need two breaks".into())),
        };
        let s1a = self.f1.jump_ratio(self.f1.breaks()[0])?.ln();
        let s2a = self.f2.jump_ratio(self.f2.breaks()[0])?.ln();
        let s2b = self.f2.jump_ratio(b2)?.ln();
        let sep = circle_distance(self.h.eval(b1), b2);
        let d = (s2a - s1a).abs();
        Ok(Thresholds {
            case: if sep > self.h.mesh {
                MeasureCase::Distinct
            } else {
                MeasureCase::Undetermined
            },
            separation: sep,
            delta0: d / 3.0,
            delta1: (s2a - s1a + s2b).abs().min(d) / 3.0,
        })
    }

    /// `log F_n` on cells of `D_{n+r}` for the smallest `r` whose atoms are
    /// at most `resolution`, further cut at the jumps of `F_n` off the marked orbit.
    pub fn cells(&self, n: usize, resolution: f64) -> Result<Cells> {
        if 10.0 * self.h.mesh > resolution {
            return Err(Error::Precondition(format!(
                "mesh {:e} exceeds a tenth of the resolution {resolution:e}",
                self.h.mesh
            )));
        }
        let lv = self.level(n)?;
        let a1 = self.h.pinned().0;
        let mut level = n;
        let part = loop {
            if self.table.try_q(level as i64).is_err() {
                return Err(Error::Resolution {
                    what: format!("no partition level at or above {n} reaches the resolution"),
                    gap: resolution,
                    min: self.f1.ctx().min_resolvable_length(),
                });
            }
            let d = build_d(&self.f1, a1, &self.table, level)?;
            if d.max_atom_length() <= resolution {
                break d;
            }
            level += 1;
        };
        let min = self.f1.ctx().min_resolvable_length();
        let mut cuts: Vec<f64> = part
            .atoms
            .iter()
            .map(|a| ccw_distance(a1, a.arc.start))
            .chain(lv.b1.iter().map(|&p| ccw_distance(a1, p)))
            .chain(lv.b2.iter().map(|&p| ccw_distance(a1, self.h.inverse(p))))
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|b, a| *b - *a < min);
        if cuts.len() > 1 && 1.0 - cuts[cuts.len() - 1] < min {
            cuts.pop();
        }
        let arcs: Vec<Arc> = (0..cuts.len())
            .map(|k| {
                let end = if k + 1 < cuts.len() { cuts[k + 1] } else { 1.0 };
                Arc::new(a1.shifted(cuts[k]), end - cuts[k])
            })
            .collect();
        let log_fn = self.exec.map(&arcs, |arc| {
            self.log_fn_at(&lv, arc.midpoint(), Side::Right).ok()
        });
        Ok(Cells {
            n,
            partition_level: level,
            arcs,
            log_fn,
        })
    }

    /// `l(S_delta^n)`, the measure of `|log F_n| >= delta`.
    pub fn deviation_measure(
        &self,
        n: usize,
        delta: f64,
        resolution: f64,
    ) -> Result<DeviationReport> {
        Ok(self.cells(n, resolution)?.measure(delta))
    }

    pub fn residual(&self, grid_size: usize) -> f64 {
        conjugacy_residual(&self.h, &self.f1, &self.f2, grid_size)
    }
}

/// Slopes `|h(A)| / |A|` over the atoms `A` of `P_n(f1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityProfile {
    pub level: usize,
    /// `(floor(log2 slope), Lebesgue mass)`, sorted by bucket.
    pub histogram: Vec<(i32, f64)>,
    pub eps: Vec<f64>,
    /// Mass of atoms with slope below each `eps`.
    pub m_of_eps: Vec<f64>,
    pub min_slope: f64,
    pub max_slope: f64,
}

impl SingularityProfile {
    /// Every slope is 1 to within `tol`.
    pub fn is_degenerate(&self, tol: f64) -> bool {
        (self.min_slope - 1.0).abs() <= tol && (self.max_slope - 1.0).abs() <= tol
    }

    pub fn m_at(&self, eps: f64) -> Option<f64> {
        self.eps
            .iter()
            .position(|&e| e == eps)
            .map(|k| self.m_of_eps[k])
    }
}

pub fn singularity_profile(
    h: &ConjugacyMap,
    f1: &PiecewiseHomeo,
    table: &ConvergentTable,
    n: usize,
    eps_grid: &[f64],
) -> Result<SingularityProfile> {
    let part = build_p(f1, h.pinned().0, table, n)?;
    let mut slopes = Vec::with_capacity(part.len());
    for a in &part.atoms {
        let img = ccw_distance(h.eval(a.arc.start), h.eval(a.arc.end()));
        slopes.push((img / a.arc.length, a.arc.length));
    }
    let mut hist = std::collections::BTreeMap::<i32, f64>::new();
    for &(s, m) in &slopes {
        *hist.entry(s.log2().floor() as i32).or_insert(0.0) += m;
    }
    let mut eps = eps_grid.to_vec();
    eps.sort_by(f64::total_cmp);
    let m_of_eps = eps
        .iter()
        .map(|&e| {
            slopes
                .iter()
                .filter(|s| s.0 < e)
                .fold(0.0, |acc, s| acc + s.1)
        })
        .collect();
    let (lo, hi) = slopes.iter().fold((f64::INFINITY, 0.0f64), |(l, u), s| {
        (l.min(s.0), u.max(s.0))
    });
    Ok(SingularityProfile {
        level: n,
        histogram: hist.into_iter().collect(),
        eps,
        m_of_eps,
        min_slope: lo,
        max_slope: hi,
    })
}
