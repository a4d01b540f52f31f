//! Executable forms of the distortion and partition estimates.
//!
//! Every check returns a [`Report`] with the bound it was held to and the
//! observed extremes. Sampling is seeded and counter based, so reports are
//! the same under [`Execution::Auto`] and [`Execution::Sequential`].

use serde::{Deserialize, Serialize};

use crate::cf::ConvergentTable;
use crate::circle::{ccw_distance, sort_ccw, Arc, CirclePoint};
use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::partition::{build_d, build_p, DynamicalPartition, Flavor};
use crate::pmap::{PiecewiseHomeo, Side};
use crate::sampling::Sampler;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub level: usize,
    pub bound: f64,
    pub observed_min: f64,
    pub observed_max: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

/// Sample budget and execution policy shared by the sampled verifiers.
#[derive(Debug, Clone, Copy)]
pub struct Sampling {
    pub samples: usize,
    pub sampler: Sampler,
    pub exec: Execution,
}

impl Sampling {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            sampler: Sampler::new(seed, 0),
            exec: Execution::Auto,
        }
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    fn stream(&self, check: u64, level: usize) -> Sampler {
        self.sampler.substream(check).substream(level as u64)
    }
}

/// Slack allowed on a cocycle of `q_n` terms.
pub fn tolerance(qn: u64) -> f64 {
    1e-9 * qn as f64
}

/// `[C_2, 1/C_2]` for `P_n` and `[C_2 C_6^2, (C_2 C_6^2)^{-1}]` for `D_n`,
/// over all cyclically consecutive atoms. Atoms that do not share an
/// endpoint fail outright.
pub fn comparability_report(part: &DynamicalPartition, c: &Constants) -> Report {
    let (check, bound) = match part.flavor {
        Flavor::P => ("comparability-P", c.c2),
        Flavor::D => ("comparability-D", c.d_comparability()),
    };
    let m = part.atoms.len();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    let mut failure = None;
    let tol = m as f64 * 10.0 * f64::EPSILON;
    for k in 0..m {
        let (x, y) = (&part.atoms[k], &part.atoms[(k + 1) % m]);
        let r = y.arc.length / x.arc.length;
        lo = lo.min(r);
        hi = hi.max(r);
        if failure.is_none() {
            if crate::circle::circle_distance(x.arc.end(), y.arc.start) > tol {
                failure = Some(format!("atoms {k} and {} are not adjacent", (k + 1) % m));
            } else if r < bound || r > 1.0 / bound {
                failure = Some(format!(
                    "atoms {k} ({:?}_{}) and {} ({:?}_{}) have ratio {r:e}",
                    x.kind,
                    x.index,
                    (k + 1) % m,
                    y.kind,
                    y.index
                ));
            }
        }
    }
    Report {
        check: check.into(),
        level: part.level,
        bound,
        observed_min: lo,
        observed_max: hi,
        pass: failure.is_none(),
        note: failure,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub n_from: usize,
    pub n_to: usize,
    pub pairs: usize,
    /// `max |atom|` of `P_n`, for `n` in `n_from..=n_to`.
    pub max_atom_length: Vec<f64>,
    /// Per-level geometric rate from a least-squares fit of the above.
    pub fitted_rate: f64,
    /// Smallest `ratio / (e^{-3v} kappa^{m+1})` over nested pairs.
    pub lower_margin: f64,
    /// Smallest `ratio / (e^{-3v} kappa^m)`.
    pub literal_lower_margin: f64,
    /// Largest `ratio / ((1 + e^v) e^{3v} lambda^m)`.
    pub upper_margin: f64,
    /// Marked atoms `Delta_0^n`: extremes of `ratio / kappa^m` and
    /// `ratio / ((1 + e^v) lambda^m)`.
    pub marked_lower_margin: f64,
    pub marked_upper_margin: f64,
    pub literal_pass: bool,
    pub pass: bool,
}

impl DecayReport {
    pub fn report(&self) -> Report {
        Report {
            check: "decay".into(),
            level: self.n_to,
            bound: 1.0,
            observed_min: self.lower_margin.min(self.marked_lower_margin),
            observed_max: self.upper_margin.max(self.marked_upper_margin),
            pass: self.pass,
            note: Some(format!(
                "{} nested pairs, fitted rate {:.6}, literal lower bound {}",
                self.pairs,
                self.fitted_rate,
                if self.literal_pass { "holds" } else { "fails" }
            )),
        }
    }
}

fn fit_rate(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    if ys.len() < 2 {
        return f64::NAN;
    }
    let xm = (n - 1.0) / 2.0;
    let lm = ys.iter().map(|y| y.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = i as f64 - xm;
        sxy += dx * (y.ln() - lm);
        sxx += dx * dx;
    }
    (sxy / sxx).exp()
}

/// Length decay of nested atoms: an atom of `P_{n+m}` inside an atom of
/// `P_n`, with `m >= 0`, sampled at random points.
pub fn decay_report(
    map: &PiecewiseHomeo,
    xi0: CirclePoint,
    table: &ConvergentTable,
    n_from: usize,
    n_to: usize,
    c: &Constants,
    sampling: &Sampling,
) -> Result<DecayReport> {
    if n_from == 0 || n_to < n_from {
        return Err(Error::InvalidArgument(format!(
            "level range {n_from}..={n_to}"
        )));
    }
    let parts: Vec<DynamicalPartition> = (n_from..=n_to)
        .map(|n| build_p(map, xi0, table, n))
        .collect::<Result<_>>()?;
    let combos: Vec<(usize, usize)> = (0..parts.len())
        .flat_map(|i| (0..parts.len() - i).map(move |m| (i, m)))
        .collect();
    let v = c.v;
    let e3 = (-3.0 * v).exp();
    let upper = (1.0 + v.exp()) * (3.0 * v).exp();
    let stream = sampling.stream(11, n_from);
    let margins = sampling.exec.map_range(sampling.samples, |s| {
        let (i, m) = combos[s % combos.len()];
        let x = CirclePoint::wrap(stream.uniform(s as u64));
        let outer = parts[i].atoms[parts[i].locate(x)].arc.length;
        let inner = parts[i + m].atoms[parts[i + m].locate(x)].arc.length;
        let r = inner / outer;
        let km = c.kappa.powi(m as i32);
        (
            r / (e3 * km * c.kappa),
            r / (e3 * km),
            r / (upper * c.lambda.powi(m as i32)),
        )
    });
    let lower_margin = margins.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
    let literal_lower_margin = margins.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
    let upper_margin = margins.iter().map(|t| t.2).fold(0.0, f64::max);

    let marked: Vec<f64> = (n_from..=n_to)
        .map(|n| {
            let q = table.try_q(n as i64)?;
            Ok(ccw_short(xi0, map.iterate(xi0, q as usize)))
        })
        .collect::<Result<_>>()?;
    let (mut ml, mut mu) = (f64::INFINITY, 0.0f64);
    for i in 0..marked.len() {
        for j in i..marked.len() {
            let m = (j - i) as i32;
            let r = marked[j] / marked[i];
            ml = ml.min(r / c.kappa.powi(m));
            mu = mu.max(r / ((1.0 + v.exp()) * c.lambda.powi(m)));
        }
    }
    let max_atom_length: Vec<f64> = parts.iter().map(|p| p.max_atom_length()).collect();
    let tol = 1e-12;
    let bounds_ok = upper_margin <= 1.0 + tol && ml >= 1.0 - tol && mu <= 1.0 + tol;
    Ok(DecayReport {
        n_from,
        n_to,
        pairs: margins.len(),
        fitted_rate: fit_rate(&max_atom_length),
        max_atom_length,
        lower_margin,
        literal_lower_margin,
        upper_margin,
        marked_lower_margin: ml,
        marked_upper_margin: mu,
        literal_pass: bounds_ok && literal_lower_margin >= 1.0 - tol,
        pass: bounds_ok && lower_margin >= 1.0 - tol,
    })
}

fn ccw_short(a: CirclePoint, b: CirclePoint) -> f64 {
    crate::circle::circle_distance(a, b)
}

/// Relative position `|[start, gamma]| / |arc|`.
pub fn barycentric(gamma: CirclePoint, arc: &Arc) -> Result<f64> {
    match arc.offset_of(gamma) {
        Some(d) if arc.length > 0.0 => Ok(d / arc.length),
        _ => Err(Error::OutOfArc {
            point: gamma.value(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarycentricScan {
    pub bound: f64,
    /// `(n, B(b; I^n(b)))` for every level scanned.
    pub coefficients: Vec<(usize, f64)>,
    pub passing: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub warning: Option<String>,
}

/// Levels `n <= n_max` at which the second break sits well inside its `D_n(a)` atom.
pub fn scan_barycentric_subsequence(
    map: &PiecewiseHomeo,
    table: &ConvergentTable,
    a: CirclePoint,
    b: CirclePoint,
    n_max: usize,
    c: &Constants,
) -> Result<BarycentricScan> {
    for x in [a, b] {
        if map.break_index(x).is_none() {
            return Err(Error::NotABreak(x.value()));
        }
    }
    scan_barycentric_point(map, table, a, b, n_max, c)
}

/// As [`scan_barycentric_subsequence`] for an arbitrary point `b`.
pub fn scan_barycentric_point(
    map: &PiecewiseHomeo,
    table: &ConvergentTable,
    a: CirclePoint,
    b: CirclePoint,
    n_max: usize,
    c: &Constants,
) -> Result<BarycentricScan> {
    let bound = c.c7 * c.c7;
    let ctx = map.ctx();
    let mut out = BarycentricScan {
        bound,
        coefficients: vec![],
        passing: vec![],
        warning: None,
    };
    for n in 1..=n_max {
        let d = build_d(map, a, table, n)?;
        let atom = &d.atoms[d.locate(b)];
        if ctx.coincide(atom.arc.start, b) || ctx.coincide(atom.arc.end(), b) {
            out.warning.get_or_insert(format!(
                "level {n}: {:.17} is an endpoint of D_{n}; the two points share an orbit",
                b.value()
            ));
            continue;
        }
        let beta = barycentric(b, &atom.arc)?;
        out.coefficients.push((n, beta));
        if beta >= bound && beta <= 1.0 - bound {
            out.passing.push(n);
        }
    }
    Ok(out)
}

/// The arc `Delta_0^m(xi)` between `xi` and `f^{q_m}(xi)`.
fn delta0(map: &PiecewiseHomeo, xi: CirclePoint, m: i64, table: &ConvergentTable) -> Result<Arc> {
    let y = map.iterate(xi, table.try_q(m)? as usize);
    Ok(if ConvergentTable::side(m) > 0 {
        Arc::between(xi, y)
    } else {
        Arc::between(y, xi)
    })
}

/// `len` orbit points starting at `f^{-back}(c)`, passing through `c` exactly.
fn orbit_through(
    map: &PiecewiseHomeo,
    c: CirclePoint,
    back: usize,
    len: usize,
) -> Vec<CirclePoint> {
    let mut pts = Vec::with_capacity(len.max(back));
    let mut y = c;
    for _ in 0..back {
        y = map.inverse(y);
        pts.push(y);
    }
    pts.reverse();
    pts.truncate(len);
    let mut y = c;
    while pts.len() < len {
        pts.push(y);
        y = map.eval(y);
    }
    pts
}

/// `log Df^k` for `k = 0..=pts.len()`.
fn prefix_cocycle(map: &PiecewiseHomeo, pts: &[CirclePoint], side: Side) -> Vec<f64> {
    let mut acc = Vec::with_capacity(pts.len() + 1);
    let mut s = 0.0;
    acc.push(s);
    for &y in pts {
        s += map.log_deriv(y, side);
        acc.push(s);
    }
    acc
}

fn forward(map: &PiecewiseHomeo, x: CirclePoint, len: usize) -> Vec<CirclePoint> {
    let mut pts = Vec::with_capacity(len);
    let mut y = x;
    for _ in 0..len {
        pts.push(y);
        y = map.eval(y);
    }
    pts
}

fn max_gap(a: &[f64], b: &[f64], k_max: usize) -> f64 {
    a.iter()
        .zip(b)
        .take(k_max + 1)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn extremes(xs: impl IntoIterator<Item = f64>) -> (f64, f64) {
    xs.into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        })
}

/// `|log Df^k(eta) - log Df^k(zeta)|` for `eta, zeta` in one `Delta_0^{n-1}`
/// arc and `0 <= k < q_n`, at random arcs and at every one-sided limit on
/// the backward orbits of the breaks.
pub fn verify_finzi(
    map: &PiecewiseHomeo,
    table: &ConvergentTable,
    n: usize,
    v: f64,
    sampling: &Sampling,
) -> Result<Report> {
    if n == 0 {
        return Err(Error::InvalidArgument("Finzi check needs n >= 1".into()));
    }
    let ni = n as i64;
    let qn = table.try_q(ni)? as usize;
    table.try_q(ni - 1)?;
    let st = sampling.stream(1, n);
    let k_max = qn - 1;
    let random = sampling.exec.map_range(sampling.samples, |s| {
        let x = CirclePoint::wrap(st.uniform(s as u64));
        let arc = delta0(map, x, ni - 1, table).expect("level checked");
        let (u, w) = st.substream(1).uniform_pair(s as u64);
        let eta = prefix_cocycle(
            map,
            &forward(map, arc.point_at(u * arc.length), k_max),
            Side::Right,
        );
        let zeta = prefix_cocycle(
            map,
            &forward(map, arc.point_at(w * arc.length), k_max),
            Side::Right,
        );
        max_gap(&eta, &zeta, k_max)
    });

    let mut cases = vec![];
    for c in map.breaks() {
        for j in 0..qn {
            cases.push((c, j));
        }
    }
    let at_breaks = sampling.exec.map(&cases, |&(c, j)| {
        let pts = orbit_through(map, c, j, k_max);
        let eta = pts.first().copied().unwrap_or(c);
        let mut worst = 0.0f64;
        // eta as the start of one arc and the end of the other
        let arcs = [
            delta0(map, eta, ni - 1, table),
            delta0(
                map,
                map.inverse_iterate(eta, table.q(ni - 1) as usize),
                ni - 1,
                table,
            ),
        ];
        for (t, arc) in arcs.iter().enumerate() {
            let arc = arc.as_ref().expect("level checked");
            let at_start = ccw_distance(arc.start, eta) < 0.5 * arc.length;
            let side = if at_start { Side::Right } else { Side::Left };
            let s_eta = prefix_cocycle(map, &pts, side);
            let u = st.substream(2).uniform((j * 2 + t) as u64);
            let zeta = prefix_cocycle(
                map,
                &forward(map, arc.point_at(u * arc.length), k_max),
                side,
            );
            worst = worst.max(max_gap(&s_eta, &zeta, k_max));
        }
        worst
    });
    let (lo, hi) = extremes(random.iter().chain(&at_breaks).copied());
    let bound = v + tolerance(qn as u64);
    Ok(Report {
        check: "finzi".into(),
        level: n,
        bound,
        observed_min: lo,
        observed_max: hi,
        pass: hi <= bound,
        note: Some(format!(
            "{} random pairs, {} one-sided break cases",
            random.len(),
            2 * at_breaks.len()
        )),
    })
}

/// Range of `log Df^{q_n}` over random points and both one-sided limits at
/// every point of the backward break orbits up to `q_n`.
pub fn verify_denjoy(
    map: &PiecewiseHomeo,
    table: &ConvergentTable,
    n: usize,
    v: f64,
    sampling: &Sampling,
) -> Result<Report> {
    let qn = table.try_q(n as i64)? as usize;
    let st = sampling.stream(2, n);
    let random = sampling.exec.map_range(sampling.samples, |s| {
        map.log_cocycle(qn, CirclePoint::wrap(st.uniform(s as u64)), Side::Right)
    });
    let mut cases = vec![];
    for c in map.breaks() {
        for j in 0..qn {
            for side in [Side::Left, Side::Right] {
                cases.push((c, j, side));
            }
        }
    }
    let at_breaks = sampling.exec.map(&cases, |&(c, j, side)| {
        map.log_cocycle_along(&orbit_through(map, c, j, qn), side)
    });
    let (lo, hi) = extremes(random.iter().chain(&at_breaks).copied());
    let bound = v + tolerance(qn as u64);
    Ok(Report {
        check: "denjoy".into(),
        level: n,
        bound,
        observed_min: lo,
        observed_max: hi,
        pass: lo >= -bound && hi <= bound,
        note: Some(format!(
            "{} random points, {} one-sided break cases",
            random.len(),
            at_breaks.len()
        )),
    })
}

/// Oscillation of `log Df^k` across `[xi, eta]` with `eta` in
/// `Delta_0^{n+l}(xi)`, for `k <= q_n` while `f^i([xi, eta])` stays clear of
/// the breaks for `i < k`.
pub fn verify_oscillation(
    map: &PiecewiseHomeo,
    table: &ConvergentTable,
    n: usize,
    l: usize,
    c: &Constants,
    sampling: &Sampling,
) -> Result<Report> {
    let qn = table.try_q(n as i64)? as usize;
    table.try_q((n + l) as i64)?;
    let breaks = map.breaks();
    let st = sampling.stream(3, n * 64 + l);
    let margin = map.ctx().min_resolvable_length();
    let osc = sampling.exec.map_range(sampling.samples, |s| {
        let x = CirclePoint::wrap(st.uniform(s as u64));
        let arc = delta0(map, x, (n + l) as i64, table).expect("level checked");
        let eta = arc.point_at(st.substream(1).uniform(s as u64) * arc.length);
        let forward_from_start = arc.start == x;
        let (mut y, mut z) = (x, eta);
        let (mut sy, mut sz) = (0.0f64, 0.0f64);
        let mut worst = 0.0f64;
        for _ in 0..qn {
            let span = if forward_from_start {
                Arc::between(y, z)
            } else {
                Arc::between(z, y)
            };
            if breaks.iter().any(|&b| span.contains_interior(b, -margin)) {
                break;
            }
            sy += map.log_deriv(y, Side::Right);
            sz += map.log_deriv(z, Side::Left);
            worst = worst.max((sy - sz).abs());
            y = map.eval(y);
            z = map.eval(z);
        }
        worst
    });
    let (lo, hi) = extremes(osc.iter().copied());
    let bound = c.c5 * c.lambda.powf(l as f64 / c.q_conj) + tolerance(qn as u64);
    Ok(Report {
        check: "oscillation".into(),
        level: n,
        bound,
        observed_min: lo,
        observed_max: hi,
        pass: hi <= bound,
        note: Some(format!("l = {l}")),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatedBreak {
    pub j: usize,
    pub atom: Arc,
    pub breaks_inside: usize,
    pub barycentric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub m: usize,
    pub l: usize,
    pub atoms: Vec<SeparatedBreak>,
    pub one_break_each: bool,
    pub barycentric_bound: f64,
    pub barycentric_ok: bool,
    /// Smallest gap between consecutive breaks of `f^{q_m}`, relative to
    /// the `P_m` atom holding its left end.
    pub min_relative_gap: f64,
    pub gap_bound: f64,
}

impl SeparationReport {
    pub fn pass(&self) -> bool {
        self.one_break_each && self.barycentric_ok
    }
}

fn empty_separation(m: usize, l: usize, c: &Constants) -> SeparationReport {
    SeparationReport {
        m,
        l,
        atoms: vec![],
        one_break_each: true,
        barycentric_bound: c.c6,
        barycentric_ok: true,
        min_relative_gap: f64::NAN,
        gap_bound: c.break_gap(),
    }
}

/// Where the breaks `f^{-j}(a), f^{-j}(b)`, `0 <= j < q_m`, of `f^{q_m}` fall
/// in the atoms `Delta^{m+l}(a_j)` between `f^{q_{m+l} - j}(a)` and
/// `f^{q_{m+l} + q_{m+l-1} - j}(a)`.
pub fn break_separation(
    map: &PiecewiseHomeo,
    table: &ConvergentTable,
    b: CirclePoint,
    m: usize,
    l: usize,
    passing: &[usize],
    c: &Constants,
) -> Result<SeparationReport> {
    let Some(a) = map.first_break() else {
        return Ok(empty_separation(m, l, c));
    };
    if map.break_index(b).is_none() {
        return Err(Error::NotABreak(b.value()));
    }
    if !passing.contains(&m) {
        return Err(Error::Precondition(format!(
            "level {m} is not in the barycentric passing list {passing:?}"
        )));
    }
    if m == 0 {
        return Err(Error::Precondition("m must be >= 1".into()));
    }
    let big = (m + l) as i64;
    let qm = table.try_q(m as i64)? as usize;
    let qb = table.try_q(big)? as usize;
    let qb1 = table.try_q(big - 1)? as usize;
    let back = |x: CirclePoint| {
        let mut v = Vec::with_capacity(qm);
        let mut y = x;
        for _ in 0..qm {
            v.push(y);
            y = map.inverse(y);
        }
        v
    };
    let a_j = back(a);
    let b_j = back(b);
    let all: Vec<CirclePoint> = a_j.iter().chain(&b_j).copied().collect();
    // xi_i for i in (q_B - q_m, q_B + q_{B-1}]
    let lo = qb + 1 - qm;
    let fwd = map.orbit(a, lo as i64, (qb + qb1) as i64)?;
    let at = |i: usize| fwd[i - lo];
    let margin = map.ctx().min_resolvable_length();
    let mut atoms = Vec::with_capacity(qm);
    for (j, &x) in a_j.iter().enumerate() {
        let (e1, e2) = (at(qb - j), at(qb + qb1 - j));
        let atom = if ConvergentTable::side(big) > 0 {
            Arc::between(e2, e1)
        } else {
            Arc::between(e1, e2)
        };
        let beta = barycentric(x, &atom).map_err(|_| {
            Error::Combinatorics(format!("a_{j} is outside Delta^{}(a_{j})", m + l))
        })?;
        let inside = all
            .iter()
            .filter(|&&p| atom.contains_interior(p, margin))
            .count();
        atoms.push(SeparatedBreak {
            j,
            atom,
            breaks_inside: inside,
            barycentric: beta,
        });
    }

    let pm = build_p(map, a, table, m)?;
    let order = sort_ccw(&all, a, map.ctx())?;
    let mut min_rel = f64::INFINITY;
    for k in 0..order.len() {
        let (p, q) = (all[order[k]], all[order[(k + 1) % order.len()]]);
        let ambient = pm.atoms[pm.locate(p)].arc.length;
        min_rel = min_rel.min(ccw_distance(p, q) / ambient);
    }
    Ok(SeparationReport {
        m,
        l,
        one_break_each: atoms.iter().all(|s| s.breaks_inside == 1),
        barycentric_ok: atoms
            .iter()
            .all(|s| s.barycentric >= c.c6 && s.barycentric <= 1.0 - c.c6),
        atoms,
        barycentric_bound: c.c6,
        min_relative_gap: min_rel,
        gap_bound: c.break_gap(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationSearch {
    pub m: usize,
    /// The `l` the closed-form constants guarantee.
    pub theoretical_l: u64,
    /// Smallest `l <= l_max` at which every atom holds one break and every
    /// barycentric coefficient is in range.
    pub empirical_l: Option<usize>,
    pub reports: Vec<SeparationReport>,
}

pub fn search_separation(
    map: &PiecewiseHomeo,
    table: &ConvergentTable,
    b: CirclePoint,
    m: usize,
    l_max: usize,
    passing: &[usize],
    c: &Constants,
) -> Result<SeparationSearch> {
    let mut reports = vec![];
    let mut found = None;
    for l in 1..=l_max {
        let r = break_separation(map, table, b, m, l, passing, c)?;
        let ok = r.pass();
        reports.push(r);
        if ok {
            found = Some(l);
            break;
        }
    }
    Ok(SeparationSearch {
        m,
        theoretical_l: c.separation_l(),
        empirical_l: found,
        reports,
    })
}
