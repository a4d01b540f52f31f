//! Continued fractions `rho = [k1, k2, ...)` and their convergents.
//!
//! Rows are indexed the way the dynamical partitions consume them:
//! `p_{-1} = 0, q_{-1} = 1, p_0 = 1, q_0 = k1` and, for `n >= 1`,
//! `q_n = k_{n+1} q_{n-1} + q_{n-2}` (likewise `p_n`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Golden mean `(sqrt 5 - 1) / 2`, the value of `[1, 1, 1, ...)`.
pub const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    quotients: Vec<u64>,
    terminated: bool,
    value: f64,
}

impl ContinuedFraction {
    /// Finite prefix of an irrational; the tail is taken to be all ones, so
    /// [`value`](Self::value) is a bounded-type irrational in the cylinder of
    /// the given prefix.
    pub fn from_quotients(quotients: Vec<u64>) -> Result<Self> {
        if quotients.is_empty() {
            return Err(Error::InvalidArgument("empty continued fraction".into()));
        }
        if quotients.contains(&0) {
            return Err(Error::InvalidArgument(
                "partial quotients must be >= 1".into(),
            ));
        }
        let value = quotients
            .iter()
            .rev()
            .fold(GOLDEN, |tail, &k| 1.0 / (k as f64 + tail));
        Ok(Self {
            quotients,
            terminated: false,
            value,
        })
    }

    /// `depth` copies of `k`, e.g. all ones for the golden mean.
    pub fn constant(k: u64, depth: usize) -> Result<Self> {
        Self::from_quotients(vec![k; depth])
    }

    pub fn golden(depth: usize) -> Self {
        Self::constant(1, depth).expect("depth >= 1")
    }

    pub fn quotients(&self) -> &[u64] {
        &self.quotients
    }

    pub fn depth(&self) -> usize {
        self.quotients.len()
    }

    /// The expansion ended before the requested depth (rational at working precision).
    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Same number, prefix padded with the all-ones tail up to `depth` quotients.
    pub fn extended(&self, depth: usize) -> Result<Self> {
        if self.terminated && depth > self.depth() {
            return Err(Error::InvalidArgument(
                "cannot extend a terminated (rational) expansion".into(),
            ));
        }
        let mut q = self.quotients.clone();
        while q.len() < depth {
            q.push(1);
        }
        Ok(Self {
            quotients: q,
            terminated: self.terminated,
            value: self.value,
        })
    }

    /// First `len` quotients of the same number.
    pub fn truncated(&self, len: usize) -> Self {
        Self {
            quotients: self.quotients[..len.min(self.depth()).max(1)].to_vec(),
            terminated: self.terminated && len >= self.depth(),
            value: self.value,
        }
    }

    /// Finite evaluation `1/(k1 + 1/(k2 + ... + 1/kN))`.
    pub fn finite_value(&self) -> f64 {
        self.quotients
            .iter()
            .rev()
            .fold(0.0, |tail, &k| 1.0 / (k as f64 + tail))
    }

    pub fn bounded_type(&self) -> BoundedTypeWitness {
        BoundedTypeWitness {
            q_max: self.quotients.iter().copied().max().unwrap_or(1),
            depth_checked: self.depth(),
        }
    }
}

/// `Q = sup k_n` over the quotients that were actually inspected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedTypeWitness {
    pub q_max: u64,
    pub depth_checked: usize,
}

/// First `depth` partial quotients of `rho`.
///
/// Quotients come from the ratios `theta_{n-1} / theta_n` with
/// `theta_n = |q_n rho - p_n|` evaluated by fused multiply-add against exact
/// integer convergents, so rounding in one step does not feed the next. The
/// expansion stops, flagged terminated, once the remainder drops below
/// `10 u q_n^2`.
pub fn cf_expand(rho: f64, depth: usize) -> Result<ContinuedFraction> {
    if !rho.is_finite() {
        return Err(Error::NonFinite(rho));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidArgument(format!("rho = {rho} not in (0, 1)")));
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be >= 1".into()));
    }
    let u = f64::EPSILON / 2.0;
    let (mut p2, mut q2) = (1i128, 0i128);
    let (mut p1, mut q1) = (0i128, 1i128);
    let (mut th2, mut th1) = (1.0f64, rho);
    let mut quotients = Vec::with_capacity(depth);
    let mut terminated = false;
    let mut last = (0i128, 1i128);
    for n in 0..depth {
        let mut k = ((th2 / th1).floor() as i128).max(1);
        let want_positive = n % 2 == 1;
        let mut tries = 0;
        let (p, q, s) = loop {
            tries += 1;
            let p = k * p1 + p2;
            let q = k * q1 + q2;
            if q > (1i128 << 53) {
                return Err(Error::Overflow { n });
            }
            let s = rho.mul_add(q as f64, -(p as f64));
            let wrong_side = s != 0.0 && (s > 0.0) != want_positive;
            if tries > 4 {
                break (p, q, s);
            }
            if wrong_side && k > 1 {
                k -= 1;
                continue;
            }
            if !wrong_side && s.abs() >= th1 {
                k += 1;
                continue;
            }
            break (p, q, s);
        };
        quotients.push(k as u64);
        last = (p, q);
        let th = s.abs();
        let remainder = th / th1;
        if remainder < 10.0 * u * (q as f64) * (q as f64) {
            terminated = true;
            break;
        }
        p2 = p1;
        q2 = q1;
        p1 = p;
        q1 = q;
        th2 = th1;
        th1 = th;
    }
    if terminated {
        // [.., k, 1] and [.., k + 1] name the same rational
        if quotients.len() > 1 && *quotients.last().unwrap() == 1 {
            quotients.pop();
            *quotients.last_mut().unwrap() += 1;
        }
        return Ok(ContinuedFraction {
            quotients,
            terminated,
            value: last.0 as f64 / last.1 as f64,
        });
    }
    Ok(ContinuedFraction {
        quotients,
        terminated,
        value: rho,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergentRow {
    pub n: usize,
    pub p: u64,
    pub q: u64,
}

/// Convergents `p_n / q_n` for `n = 0 .. depth-1`, plus the `n = -1` convention row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergentTable {
    rows: Vec<ConvergentRow>,
}

pub fn convergents(cf: &ContinuedFraction) -> Result<ConvergentTable> {
    let k = cf.quotients();
    if k.is_empty() {
        return Err(Error::InvalidArgument("empty continued fraction".into()));
    }
    let mut rows: Vec<ConvergentRow> = Vec::with_capacity(k.len());
    let (mut p2, mut q2) = (0u64, 1u64); // n = -1
    let (mut p1, mut q1) = (1u64, 0u64); // n = -2
    for (n, &kn) in k.iter().enumerate() {
        let p = kn
            .checked_mul(p2)
            .and_then(|x| x.checked_add(p1))
            .ok_or(Error::Overflow { n })?;
        let q = kn
            .checked_mul(q2)
            .and_then(|x| x.checked_add(q1))
            .ok_or(Error::Overflow { n })?;
        rows.push(ConvergentRow { n, p, q });
        p1 = p2;
        q1 = q2;
        p2 = p;
        q2 = q;
    }
    Ok(ConvergentTable { rows })
}

impl ConvergentTable {
    pub fn rows(&self) -> &[ConvergentRow] {
        &self.rows
    }

    /// Number of rows with `n >= 0`.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `q_n` for `n >= -1`.
    pub fn q(&self, n: i64) -> u64 {
        match n {
            -1 => 1,
            n if n >= 0 => self.rows[n as usize].q,
            _ => panic!("q_{n} undefined"),
        }
    }

    pub fn p(&self, n: i64) -> u64 {
        match n {
            -1 => 0,
            n if n >= 0 => self.rows[n as usize].p,
            _ => panic!("p_{n} undefined"),
        }
    }

    pub fn try_q(&self, n: i64) -> Result<u64> {
        if n >= -1 && n < self.rows.len() as i64 {
            Ok(self.q(n))
        } else {
            Err(Error::Precondition(format!(
                "q_{n} needs a deeper continued fraction (have {} rows)",
                self.rows.len()
            )))
        }
    }

    /// `k` with `q_n = k q_{n-1} + q_{n-2}`; the number of `Delta^{n-1}`
    /// atoms a level-`(n-2)` atom splits into when refining to level `n`.
    pub fn multiplier(&self, n: i64) -> u64 {
        let q2 = if n == 0 { 0 } else { self.q(n - 2) };
        (self.q(n) - q2) / self.q(n - 1)
    }

    /// `+1` when `f^{q_n}(x)` lands counterclockwise of `x` (sign of `q_n rho - p_n`).
    pub fn side(n: i64) -> i64 {
        if n.rem_euclid(2) == 1 {
            1
        } else {
            -1
        }
    }
}
