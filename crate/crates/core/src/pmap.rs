//! Circle homeomorphisms that are piecewise fractional-linear between
//! finitely many break points.
//!
//! Each branch is an affine rescaling of `psi(s) = s / (1 + beta (1 - s))`
//! on `[0, 1]`, so evaluation, derivatives and inverses are all closed
//! form. `beta = 0` gives a linear branch.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circle::{ccw_distance, frac, CirclePoint, PrecisionContext};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Rotation,
    Pl2,
    Moebius2,
}

/// Serializable recipe from which a map is rebuilt bit-identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub family: Family,
    #[serde(default)]
    pub breaks: Vec<f64>,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default)]
    pub offset: f64,
    #[serde(default = "default_precision")]
    pub precision: u32,
}

fn default_precision() -> u32 {
    53
}

impl MapSpec {
    pub fn rotation(angle: f64) -> Self {
        Self {
            family: Family::Rotation,
            breaks: vec![],
            parameters: BTreeMap::new(),
            offset: angle,
            precision: 53,
        }
    }

    pub fn pl2(a: f64, b: f64, s1: f64, offset: f64) -> Self {
        Self {
            family: Family::Pl2,
            breaks: vec![a, b],
            parameters: BTreeMap::from([("s1".to_string(), s1)]),
            offset,
            precision: 53,
        }
    }

    pub fn moebius2(a: f64, b: f64, sigma_a: f64, offset: f64) -> Self {
        Self {
            family: Family::Moebius2,
            breaks: vec![a, b],
            parameters: BTreeMap::from([("sigma_a".to_string(), sigma_a)]),
            offset,
            precision: 53,
        }
    }

    fn param(&self, key: &str) -> Result<f64> {
        self.parameters
            .get(key)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("missing parameter `{key}`")))
    }

    fn two_breaks(&self) -> Result<(CirclePoint, CirclePoint)> {
        match self.breaks.as_slice() {
            [a, b] => Ok((frac(*a)?, frac(*b)?)),
            other => Err(Error::InvalidArgument(format!(
                "expected two breaks, got {}",
                other.len()
            ))),
        }
    }

    pub fn build(&self) -> Result<PiecewiseHomeo> {
        let ctx = PrecisionContext::new(self.precision)?;
        let mut map = match self.family {
            Family::Rotation => rotation(self.offset)?,
            Family::Pl2 => {
                let (a, b) = self.two_breaks()?;
                build_pl2(a, b, self.param("s1")?, self.offset)?
            }
            Family::Moebius2 => {
                let (a, b) = self.two_breaks()?;
                let sigma = self.param("sigma_a")?;
                match self.parameters.get("c_ab") {
                    Some(&c1) => {
                        let c2 = self.param("c_ba")?;
                        build_moebius2_curved(a, b, sigma, c1, c2, self.offset)?
                    }
                    None => build_moebius2(a, b, sigma, self.offset)?,
                }
            }
        };
        map.ctx = ctx;
        Ok(map)
    }

    pub fn with_offset(&self, offset: f64) -> Self {
        Self {
            offset,
            ..self.clone()
        }
    }
}

fn psi(beta: f64, s: f64) -> f64 {
    if beta == 0.0 {
        s
    } else {
        s / (1.0 + beta * (1.0 - s))
    }
}

fn psi_inv(beta: f64, u: f64) -> f64 {
    if beta == 0.0 {
        u
    } else {
        u * (1.0 + beta) / (1.0 + beta * u)
    }
}

fn dpsi(beta: f64, s: f64) -> f64 {
    let w = 1.0 + beta * (1.0 - s);
    (1.0 + beta) / (w * w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseHomeo {
    spec: Option<MapSpec>,
    /// Lift coordinate of the first break, in `[0, 1)`.
    origin: f64,
    /// Cumulative domain offsets from `origin`, `0 = cum_l[0] < ... < cum_l[m] = 1`.
    cum_l: Vec<f64>,
    /// Cumulative image offsets from `image_origin`.
    cum_m: Vec<f64>,
    beta: Vec<f64>,
    image_origin: f64,
    has_breaks: bool,
    ctx: PrecisionContext,
}

/// Rigid rotation `x -> x + angle`.
pub fn rotation(angle: f64) -> Result<PiecewiseHomeo> {
    if !angle.is_finite() {
        return Err(Error::NonFinite(angle));
    }
    Ok(PiecewiseHomeo {
        spec: Some(MapSpec::rotation(angle)),
        origin: 0.0,
        cum_l: vec![0.0, 1.0],
        cum_m: vec![0.0, 1.0],
        beta: vec![0.0],
        image_origin: angle,
        has_breaks: false,
        ctx: PrecisionContext::binary64(),
    })
}

fn check_breaks(a: CirclePoint, b: CirclePoint) -> Result<f64> {
    let ctx = PrecisionContext::binary64();
    Ok(ctx.resolved_arc(a, b)?.length)
}

/// Two linear branches: slope `s1` on `[a, b]`, the complementary slope on `[b, a]`.
pub fn build_pl2(a: CirclePoint, b: CirclePoint, s1: f64, offset: f64) -> Result<PiecewiseHomeo> {
    if !s1.is_finite() || !offset.is_finite() {
        return Err(Error::NonFinite(if s1.is_finite() { offset } else { s1 }));
    }
    if s1 <= 0.0 {
        return Err(Error::Infeasible(format!(
            "slope s1 = {s1} must be positive"
        )));
    }
    let l = check_breaks(a, b)?;
    let m1 = s1 * l;
    let s2 = (1.0 - m1) / (1.0 - l);
    if s2 <= 0.0 {
        return Err(Error::Infeasible(format!(
            "complementary slope s2 = {s2} for s1 = {s1} on an arc of length {l}"
        )));
    }
    if s1 == 1.0 {
        let mut r = rotation(offset)?;
        r.spec = Some(MapSpec::pl2(a.value(), b.value(), s1, offset));
        return Ok(r);
    }
    Ok(PiecewiseHomeo {
        spec: Some(MapSpec::pl2(a.value(), b.value(), s1, offset)),
        origin: a.value(),
        cum_l: vec![0.0, l, 1.0],
        cum_m: vec![0.0, m1, 1.0],
        beta: vec![0.0, 0.0],
        image_origin: a.value() + offset,
        has_breaks: true,
        ctx: PrecisionContext::binary64(),
    })
}

/// Two fractional-linear branches with jump `sigma_a` at `a` and `1 / sigma_a` at `b`.
///
/// The branch on `[a, b]` steepens by the factor `sqrt(sigma_a)` end to end,
/// the other flattens by the same factor.
pub fn build_moebius2(
    a: CirclePoint,
    b: CirclePoint,
    sigma_a: f64,
    offset: f64,
) -> Result<PiecewiseHomeo> {
    if !sigma_a.is_finite() {
        return Err(Error::NonFinite(sigma_a));
    }
    if sigma_a <= 0.0 {
        return Err(Error::Infeasible(format!(
            "jump {sigma_a} must be positive"
        )));
    }
    let c = sigma_a.sqrt();
    let mut m = build_moebius2_curved(a, b, sigma_a, c, 1.0 / c, offset)?;
    m.spec = Some(MapSpec::moebius2(a.value(), b.value(), sigma_a, offset));
    Ok(m)
}

/// As [`build_moebius2`] with explicit end-to-end derivative factors
/// `c_ab` (branch on `[a, b]`) and `c_ba`. Matching total jumps forces
/// `c_ab * c_ba = 1`.
pub fn build_moebius2_curved(
    a: CirclePoint,
    b: CirclePoint,
    sigma_a: f64,
    c_ab: f64,
    c_ba: f64,
    offset: f64,
) -> Result<PiecewiseHomeo> {
    for v in [sigma_a, c_ab, c_ba, offset] {
        if !v.is_finite() {
            return Err(Error::NonFinite(v));
        }
    }
    if sigma_a <= 0.0 || c_ab <= 0.0 || c_ba <= 0.0 {
        return Err(Error::Infeasible(
            "jump and derivative factors must be positive".into(),
        ));
    }
    if ((c_ab * c_ba) - 1.0).abs() > 1e-12 {
        return Err(Error::Infeasible(format!(
            "derivative factors {c_ab} * {c_ba} != 1: jumps at a and b would not cancel"
        )));
    }
    let l1 = check_breaks(a, b)?;
    let l2 = 1.0 - l1;
    let m1 = l1 / (l1 + sigma_a * l2);
    let mut spec = MapSpec::moebius2(a.value(), b.value(), sigma_a, offset);
    spec.parameters.insert("c_ab".into(), c_ab);
    spec.parameters.insert("c_ba".into(), c_ba);
    if sigma_a == 1.0 && c_ab == 1.0 {
        let mut r = rotation(offset)?;
        r.spec = Some(spec);
        return Ok(r);
    }
    Ok(PiecewiseHomeo {
        spec: Some(spec),
        origin: a.value(),
        cum_l: vec![0.0, l1, 1.0],
        cum_m: vec![0.0, m1, 1.0],
        beta: vec![c_ab - 1.0, c_ba - 1.0],
        image_origin: a.value() + offset,
        has_breaks: true,
        ctx: PrecisionContext::binary64(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub c1: f64,
    pub c2: f64,
    pub v: f64,
    pub ko_norm_p: f64,
    pub p: f64,
}

impl PiecewiseHomeo {
    pub fn spec(&self) -> Option<&MapSpec> {
        self.spec.as_ref()
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn is_rotation(&self) -> bool {
        !self.has_breaks
    }

    pub fn num_branches(&self) -> usize {
        self.beta.len()
    }

    /// Break points in construction order (the normalising break first).
    pub fn breaks(&self) -> Vec<CirclePoint> {
        if !self.has_breaks {
            return vec![];
        }
        (0..self.num_branches())
            .map(|i| CirclePoint::wrap(self.origin + self.cum_l[i]))
            .collect()
    }

    pub fn first_break(&self) -> Option<CirclePoint> {
        self.breaks().first().copied()
    }

    /// Same map followed by the extra rotation `t` (absolute: `g + t`).
    pub fn with_offset(&self, t: f64) -> PiecewiseHomeo {
        let mut m = self.clone();
        let current = self.spec.as_ref().map(|s| s.offset).unwrap_or(0.0);
        m.image_origin = self.image_origin - current + t;
        if let Some(s) = m.spec.as_mut() {
            s.offset = t;
        }
        m
    }

    pub fn offset(&self) -> f64 {
        self.spec.as_ref().map(|s| s.offset).unwrap_or(0.0)
    }

    fn len_l(&self, i: usize) -> f64 {
        self.cum_l[i + 1] - self.cum_l[i]
    }

    fn len_m(&self, i: usize) -> f64 {
        self.cum_m[i + 1] - self.cum_m[i]
    }

    fn branch_of(cum: &[f64], u: f64) -> usize {
        let m = cum.len() - 1;
        cum[1..m].partition_point(|&c| c <= u)
    }

    /// Lift `F: R -> R` with `F(x + 1) = F(x) + 1`.
    pub fn lift(&self, x: f64) -> f64 {
        let d = x - self.origin;
        let mut k = d.floor();
        let mut u = d - k;
        if u >= 1.0 {
            u = 0.0;
            k += 1.0;
        }
        let i = Self::branch_of(&self.cum_l, u);
        let s = ((u - self.cum_l[i]) / self.len_l(i)).clamp(0.0, 1.0);
        self.image_origin + k + self.cum_m[i] + self.len_m(i) * psi(self.beta[i], s)
    }

    pub fn inverse_lift(&self, y: f64) -> f64 {
        let d = y - self.image_origin;
        let mut k = d.floor();
        let mut u = d - k;
        if u >= 1.0 {
            u = 0.0;
            k += 1.0;
        }
        let i = Self::branch_of(&self.cum_m, u);
        let t = ((u - self.cum_m[i]) / self.len_m(i)).clamp(0.0, 1.0);
        self.origin + k + self.cum_l[i] + self.len_l(i) * psi_inv(self.beta[i], t)
    }

    pub fn eval(&self, x: CirclePoint) -> CirclePoint {
        CirclePoint::wrap(self.lift(x.value()))
    }

    pub fn inverse(&self, y: CirclePoint) -> CirclePoint {
        CirclePoint::wrap(self.inverse_lift(y.value()))
    }

    /// Branch and local coordinate of `x`; within the resolvable length of a
    /// break the side decides which branch owns it.
    fn locate(&self, x: CirclePoint, side: Side) -> (usize, f64) {
        let u = ccw_distance(CirclePoint::wrap(self.origin), x);
        let m = self.num_branches();
        if self.has_breaks {
            let tol = self.ctx.min_resolvable_length();
            for j in 0..=m {
                if (u - self.cum_l[j]).abs() < tol || (j == 0 && 1.0 - u < tol) {
                    let j = j % m;
                    return match side {
                        Side::Right => (j, 0.0),
                        Side::Left => ((j + m - 1) % m, 1.0),
                    };
                }
            }
        }
        let i = Self::branch_of(&self.cum_l, u);
        (i, ((u - self.cum_l[i]) / self.len_l(i)).clamp(0.0, 1.0))
    }

    fn branch_deriv(&self, i: usize, s: f64) -> f64 {
        self.len_m(i) / self.len_l(i) * dpsi(self.beta[i], s)
    }

    /// One-sided derivative `Df_-(x)` or `Df_+(x)`.
    pub fn deriv_one_sided(&self, x: CirclePoint, side: Side) -> f64 {
        let (i, s) = self.locate(x, side);
        self.branch_deriv(i, s)
    }

    pub fn log_deriv(&self, x: CirclePoint, side: Side) -> f64 {
        self.deriv_one_sided(x, side).ln()
    }

    /// Index of the break at `b`, if any (within the resolvable length).
    pub fn break_index(&self, b: CirclePoint) -> Option<usize> {
        self.breaks().iter().position(|&c| self.ctx.coincide(b, c))
    }

    /// `sigma_f(b) = Df_-(b) / Df_+(b)`.
    pub fn jump_ratio(&self, b: CirclePoint) -> Result<f64> {
        if self.break_index(b).is_none() {
            return Err(Error::NotABreak(b.value()));
        }
        Ok(self.deriv_one_sided(b, Side::Left) / self.deriv_one_sided(b, Side::Right))
    }

    /// Product of all jump ratios.
    pub fn total_jump(&self) -> f64 {
        self.breaks()
            .iter()
            .map(|&b| self.jump_ratio(b).expect("own break"))
            .product()
    }

    /// `f^j(x)` for `j >= 0` without collision checks.
    pub fn iterate(&self, x: CirclePoint, j: usize) -> CirclePoint {
        (0..j).fold(x, |y, _| self.eval(y))
    }

    /// `f^{-j}(x)`.
    pub fn inverse_iterate(&self, x: CirclePoint, j: usize) -> CirclePoint {
        (0..j).fold(x, |y, _| self.inverse(y))
    }

    /// `f^{i}(x0)` for `i` in `i_from ..= i_to`.
    pub fn orbit(&self, x0: CirclePoint, i_from: i64, i_to: i64) -> Result<Vec<CirclePoint>> {
        if i_from > i_to {
            return Err(Error::InvalidArgument(format!(
                "empty orbit range {i_from}..={i_to}"
            )));
        }
        let mut fwd = vec![x0];
        for _ in 0..i_to.max(0) {
            let y = self.eval(*fwd.last().unwrap());
            fwd.push(y);
        }
        let mut back = vec![];
        let mut y = x0;
        for _ in 0..(-i_from).max(0) {
            y = self.inverse(y);
            back.push(y);
        }
        back.reverse();
        let skip_fwd = i_from.max(0) as usize;
        let mut out = back;
        out.extend(fwd.into_iter().skip(skip_fwd));
        let take = (i_to - i_from + 1) as usize;
        out.truncate(take);
        let tol = self.ctx.min_resolvable_length();
        for (k, w) in out.windows(2).enumerate() {
            let gap = crate::circle::circle_distance(w[0], w[1]);
            if gap < tol {
                return Err(Error::Resolution {
                    what: format!("orbit points collide at i = {}", i_from + k as i64),
                    gap,
                    min: tol,
                });
            }
        }
        Ok(out)
    }

    /// `log Df^k(x)`, summed along the forward orbit; the side flag applies
    /// at every orbit point that sits on a break.
    pub fn log_cocycle(&self, k: usize, x: CirclePoint, side: Side) -> f64 {
        if !self.has_breaks {
            return 0.0;
        }
        let mut y = x;
        let mut acc = 0.0;
        for _ in 0..k {
            acc += self.log_deriv(y, side);
            y = self.eval(y);
        }
        acc
    }

    /// Cocycle sum over explicitly supplied orbit points.
    pub fn log_cocycle_along(&self, points: &[CirclePoint], side: Side) -> f64 {
        if !self.has_breaks {
            return 0.0;
        }
        points
            .iter()
            .map(|&y| self.log_deriv(y, side))
            .fold(0.0, |acc, x| acc + x)
    }

    /// `log Df^k` at `f^{-back}(c)` for a break `c`, using the backward orbit of
    /// `c` so that step `back` lands on the break exactly.
    pub fn log_cocycle_at_preimage(
        &self,
        c: CirclePoint,
        back: usize,
        k: usize,
        side: Side,
    ) -> Result<f64> {
        if self.break_index(c).is_none() {
            return Err(Error::NotABreak(c.value()));
        }
        let mut pts = Vec::with_capacity(k);
        let mut y = c;
        let mut pre = Vec::with_capacity(back);
        for _ in 0..back {
            y = self.inverse(y);
            pre.push(y);
        }
        pre.reverse();
        pts.extend(pre.into_iter().take(k));
        let mut y = c;
        while pts.len() < k {
            pts.push(y);
            y = self.eval(y);
        }
        Ok(self.log_cocycle_along(&pts, side))
    }

    /// The inverse map, with its own branches (images of the old ones).
    pub fn inverse_map(&self) -> PiecewiseHomeo {
        let n = self.image_origin.floor();
        PiecewiseHomeo {
            spec: None,
            origin: self.image_origin - n,
            cum_l: self.cum_m.clone(),
            cum_m: self.cum_l.clone(),
            beta: self.beta.iter().map(|&b| -b / (1.0 + b)).collect(),
            image_origin: self.origin - n,
            has_breaks: self.has_breaks,
            ctx: self.ctx,
        }
    }

    /// `|D log Df|` on branch `i` at local coordinate `s`.
    fn dlogdf(&self, i: usize, s: f64) -> f64 {
        let b = self.beta[i];
        (2.0 * b / (self.len_l(i) * (1.0 + b * (1.0 - s)))).abs()
    }

    pub fn regularity(&self, p: f64) -> Result<RegularityReport> {
        if p.is_nan() || p <= 1.0 || p.is_infinite() {
            return Err(Error::InvalidArgument(format!(
                "exponent p = {p} must exceed 1"
            )));
        }
        let mut c1 = f64::INFINITY;
        let mut c2 = 0.0f64;
        for i in 0..self.num_branches() {
            for s in [0.0, 1.0] {
                let d = self.branch_deriv(i, s);
                c1 = c1.min(d);
                c2 = c2.max(d);
            }
        }
        let jumps: f64 = self
            .breaks()
            .iter()
            .map(|&b| self.jump_ratio(b).map(|s| s.ln().abs()))
            .sum::<Result<f64>>()?;
        let mut smooth = 0.0;
        let mut lp = 0.0;
        for i in 0..self.num_branches() {
            if self.beta[i] == 0.0 {
                continue;
            }
            let l = self.len_l(i);
            smooth += integrate(|s| self.dlogdf(i, s) * l)?;
            lp += integrate(|s| self.dlogdf(i, s).powf(p) * l)?;
        }
        Ok(RegularityReport {
            c1,
            c2,
            v: jumps + smooth,
            ko_norm_p: lp.powf(1.0 / p),
            p,
        })
    }

    /// Closed-form total variation of `log Df`, for cross-checking [`regularity`](Self::regularity).
    pub fn variation_closed_form(&self) -> f64 {
        let jumps: f64 = self
            .breaks()
            .iter()
            .map(|&b| self.jump_ratio(b).unwrap().ln().abs())
            .sum();
        jumps
            + self
                .beta
                .iter()
                .map(|&b| 2.0 * (1.0 + b).ln().abs())
                .sum::<f64>()
    }
}

fn integrate(f: impl Fn(f64) -> f64) -> Result<f64> {
    let out = quadrature::double_exponential::integrate(f, 0.0, 1.0, 1e-12);
    if !out.integral.is_finite() || out.error_estimate > 1e-9 {
        return Err(Error::Quadrature {
            achieved: out.error_estimate,
        });
    }
    Ok(out.integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: f64) -> CirclePoint {
        CirclePoint::new(x).unwrap()
    }

    fn pl(s1: f64) -> PiecewiseHomeo {
        build_pl2(p(0.0), p(0.5), s1, 0.0).unwrap()
    }

    #[test]
    fn pl2_examples() {
        let f = pl(1.5);
        assert!((f.eval(p(0.25)).value() - 0.375).abs() < 1e-15);
        assert_eq!(f.deriv_one_sided(p(0.5), Side::Left), 1.5);
        assert_eq!(f.deriv_one_sided(p(0.5), Side::Right), 0.5);
        assert!((f.jump_ratio(p(0.5)).unwrap() - 3.0).abs() < 1e-15);
        assert!((f.jump_ratio(p(0.0)).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((f.total_jump() - 1.0).abs() < 1e-15);

        // s1 * 0.25 + s2 * 0.75 = 1 with s1 = 3
        let g = build_pl2(p(0.0), p(0.25), 3.0, 0.0).unwrap();
        assert!((g.deriv_one_sided(p(0.5), Side::Right) - 1.0 / 3.0).abs() < 1e-15);
        assert!((g.jump_ratio(p(0.25)).unwrap() - 9.0).abs() < 1e-12);
    }

    #[test]
    fn pl2_degenerate_and_infeasible() {
        let r = build_pl2(p(0.0), p(0.5), 1.0, 0.3).unwrap();
        assert!(r.is_rotation());
        assert!(r.breaks().is_empty());
        assert!((r.eval(p(0.1)).value() - 0.4).abs() < 1e-15);
        assert!(matches!(
            build_pl2(p(0.0), p(0.5), 2.0, 0.0),
            Err(Error::Infeasible(_))
        ));
        assert!(build_pl2(p(0.2), p(0.2), 1.5, 0.0).is_err());
    }

    #[test]
    fn rotation_has_no_breaks() {
        let r = rotation(0.25).unwrap();
        assert!(matches!(r.jump_ratio(p(0.1)), Err(Error::NotABreak(_))));
        assert_eq!(r.log_cocycle(17, p(0.3), Side::Right), 0.0);
        let rep = r.regularity(2.0).unwrap();
        assert_eq!((rep.v, rep.ko_norm_p, rep.c1, rep.c2), (0.0, 0.0, 1.0, 1.0));
        let o = r.orbit(p(0.0), 0, 3).unwrap();
        let want = [0.0, 0.25, 0.5, 0.75];
        for (a, b) in o.iter().zip(want) {
            assert!((a.value() - b).abs() < 1e-15);
        }
    }

    #[test]
    fn orbit_negative_index() {
        let f = pl(1.5).with_offset(0.2);
        let x = p(0.37);
        assert_eq!(f.orbit(x, -1, -1).unwrap(), vec![f.inverse(x)]);
        let o = f.orbit(x, -3, 2).unwrap();
        assert_eq!(o.len(), 6);
        assert_eq!(o[3], x);
        assert!(crate::circle::circle_distance(f.eval(o[2]), x) < 1e-15);
        assert!(matches!(
            rotation(0.0).unwrap().orbit(x, 0, 2),
            Err(Error::Resolution { .. })
        ));
    }

    #[test]
    fn pl2_regularity() {
        let rep = pl(1.5).regularity(2.0).unwrap();
        assert!((rep.v - 2.0 * 3f64.ln()).abs() < 1e-12);
        assert_eq!(rep.ko_norm_p, 0.0);
        assert_eq!((rep.c1, rep.c2), (0.5, 1.5));
    }

    #[test]
    fn moebius_jumps_and_variation() {
        let f = build_moebius2(p(0.0), p(0.5), 2.0, 0.0).unwrap();
        assert!((f.jump_ratio(p(0.0)).unwrap() - 2.0).abs() < 1e-12);
        assert!((f.jump_ratio(p(0.5)).unwrap() - 0.5).abs() < 1e-12);
        assert!((f.total_jump() - 1.0).abs() < 1e-12);
        let rep = f.regularity(2.0).unwrap();
        // two jumps of ln 2 plus two monotone branches each varying by ln 2
        assert!((rep.v - 4.0 * 2f64.ln()).abs() < 1e-9);
        assert!((rep.v - f.variation_closed_form()).abs() < 1e-9);
        // oracle: integral of (2|b| / (L w))^p L ds with w = 1 + b(1 - s)
        let closed = |b: f64, l: f64, pp: f64| {
            l.powf(1.0 - pp) * (2.0 * b.abs()).powf(pp) * ((1.0 + b).powf(1.0 - pp) - 1.0)
                / (b * (1.0 - pp))
        };
        let c = 2f64.sqrt();
        let want = (closed(c - 1.0, 0.5, 2.0) + closed(1.0 / c - 1.0, 0.5, 2.0)).sqrt();
        assert!((rep.ko_norm_p - want).abs() < 1e-9 * want);
        assert!(rep.ko_norm_p > 0.0);

        assert!(build_moebius2(p(0.0), p(0.5), 1.0, 0.1)
            .unwrap()
            .is_rotation());
        assert!(matches!(
            build_moebius2_curved(p(0.0), p(0.5), 2.0, 1.5, 1.5, 0.0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn spec_round_trip() {
        for spec in [
            MapSpec::rotation(0.3),
            MapSpec::pl2(0.0, 0.5, 1.5, 0.123),
            MapSpec::moebius2(0.1, 0.6, 2.0, 0.4),
        ] {
            let json = serde_json::to_string(&spec).unwrap();
            let back: MapSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(back, spec);
            let (f, g) = (spec.build().unwrap(), back.build().unwrap());
            for i in 0..50 {
                let x = p(i as f64 / 50.0);
                assert_eq!(f.eval(x).value().to_bits(), g.eval(x).value().to_bits());
            }
        }
        let mut bad = MapSpec::pl2(0.0, 0.5, 1.5, 0.0);
        bad.precision = 64;
        assert!(matches!(bad.build(), Err(Error::UnsupportedPrecision(64))));
    }

    #[test]
    fn inverse_map_is_inverse() {
        let f = build_moebius2(p(0.1), p(0.7), 3.0, 0.37).unwrap();
        let g = f.inverse_map();
        for i in 0..200 {
            let x = p(i as f64 / 200.0 + 0.001);
            assert!(crate::circle::circle_distance(g.eval(f.eval(x)), x) < 1e-14);
            assert!(crate::circle::circle_distance(f.inverse(x), g.eval(x)) < 1e-15);
        }
        assert!((g.total_jump() - 1.0).abs() < 1e-12);
        // chain rule at a point: Df^{-1}(f x) = 1 / Df(x)
        let x = p(0.33);
        let d = f.deriv_one_sided(x, Side::Right) * g.deriv_one_sided(f.eval(x), Side::Right);
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cocycle_at_preimage_sees_jump() {
        let f = pl(1.5).with_offset(0.31);
        let b = p(0.5);
        let l = f.log_cocycle_at_preimage(b, 3, 5, Side::Left).unwrap();
        let r = f.log_cocycle_at_preimage(b, 3, 5, Side::Right).unwrap();
        assert!((l - r - f.jump_ratio(b).unwrap().ln()).abs() < 1e-12);
        assert!(f.log_cocycle_at_preimage(p(0.3), 1, 2, Side::Left).is_err());
    }

    #[test]
    fn pl2_inverse_four_ulp() {
        let f = pl(1.5).with_offset(0.2);
        let s = crate::sampling::Sampler::new(1, 0);
        for i in 0..1000 {
            let x = p(s.uniform(i));
            let back = f.inverse(f.eval(x));
            assert!(
                crate::circle::circle_distance(back, x) <= 4.0 * f64::EPSILON,
                "{x:?}"
            );
        }
    }

    fn any_map() -> impl Strategy<Value = PiecewiseHomeo> {
        (
            0f64..1.0,
            0.1f64..0.9,
            0.2f64..1.8,
            0f64..1.0,
            any::<bool>(),
        )
            .prop_map(|(a, len, s, t, moeb)| {
                let (a, b) = (p(a), p(a + len));
                if moeb {
                    build_moebius2(a, b, s + 0.1, t).unwrap()
                } else {
                    let s1 = s.min(0.95 / len);
                    build_pl2(a, b, s1, t).unwrap()
                }
            })
    }

    proptest! {
        #[test]
        fn degree_one(f in any_map(), x in -3f64..3.0) {
            prop_assert!((f.lift(x + 1.0) - f.lift(x) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn monotone(f in any_map()) {
            let n = 2000;
            let mut prev = f.lift(0.0);
            for i in 1..=n {
                let y = f.lift(i as f64 / n as f64);
                prop_assert!(y > prev);
                prev = y;
            }
            for b in f.breaks() {
                let x = b.value();
                prop_assert!(f.lift(x - 1e-9) < f.lift(x) && f.lift(x) < f.lift(x + 1e-9));
            }
        }

        #[test]
        fn inverse_within_ulps(f in any_map(), x in 0f64..1.0) {
            let x = p(x);
            let back = f.inverse(f.eval(x));
            prop_assert!(crate::circle::circle_distance(back, x) <= 8.0 * f64::EPSILON);
        }

        #[test]
        fn chain_rule(f in any_map(), x in 0f64..1.0, j in 1usize..40, k in 1usize..40) {
            let x = p(x);
            let whole = f.log_cocycle(j + k, x, Side::Right);
            let y = f.iterate(x, j);
            let parts = f.log_cocycle(j, x, Side::Right) + f.log_cocycle(k, y, Side::Right);
            prop_assert!((whole - parts).abs() < 1e-11);
        }

        #[test]
        fn jumps_multiply_to_one(f in any_map()) {
            prop_assert!((f.total_jump() - 1.0).abs() < 1e-12);
        }
    }
}
