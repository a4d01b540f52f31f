//! Points and positively oriented arcs on the unit circle `R/Z`.
//!
//! Every value here is immutable. Comparisons that fall inside the
//! resolvable band of the active [`PrecisionContext`] are errors, never
//! silent tie-breaks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Floating-point budget shared by every computation in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionContext {
    mantissa_bits: u32,
    min_resolvable_length: f64,
}

impl PrecisionContext {
    /// Binary64 arithmetic is the only backend; other widths are rejected.
    pub fn new(mantissa_bits: u32) -> Result<Self> {
        if mantissa_bits != 53 {
            return Err(Error::UnsupportedPrecision(mantissa_bits));
        }
        let u = 0.5f64.powi(mantissa_bits as i32);
        Ok(Self {
            mantissa_bits,
            min_resolvable_length: 1e3 * u,
        })
    }

    pub fn binary64() -> Self {
        Self::new(53).expect("53 bits is always supported")
    }

    pub fn mantissa_bits(&self) -> u32 {
        self.mantissa_bits
    }

    /// `2^-bits`.
    pub fn unit_roundoff(&self) -> f64 {
        0.5f64.powi(self.mantissa_bits as i32)
    }

    /// Spacing of floats just below 1.
    pub fn ulp(&self) -> f64 {
        2.0 * self.unit_roundoff()
    }

    pub fn min_resolvable_length(&self) -> f64 {
        self.min_resolvable_length
    }

    /// Arc from `a` to `b`, refusing lengths that cannot be told apart from zero.
    pub fn resolved_arc(&self, a: CirclePoint, b: CirclePoint) -> Result<Arc> {
        let len = ccw_distance(a, b);
        if len < self.min_resolvable_length || 1.0 - len < self.min_resolvable_length {
            return Err(Error::Resolution {
                what: format!("arc from {:.17} to {:.17}", a.value(), b.value()),
                gap: len.min(1.0 - len),
                min: self.min_resolvable_length,
            });
        }
        Ok(Arc::new(a, len))
    }

    /// True when the two points are closer than the resolvable length (either way round).
    pub fn coincide(&self, a: CirclePoint, b: CirclePoint) -> bool {
        circle_distance(a, b) < self.min_resolvable_length
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::binary64()
    }
}

/// Canonical representative of a point of `R/Z`, always in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CirclePoint(f64);

impl CirclePoint {
    pub const ZERO: CirclePoint = CirclePoint(0.0);

    pub fn new(x: f64) -> Result<Self> {
        frac(x)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Reduce a finite value that is already known to be finite.
    pub(crate) fn wrap(x: f64) -> Self {
        debug_assert!(x.is_finite());
        let r = x - x.floor();
        CirclePoint(if r >= 1.0 { 0.0 } else { r })
    }

    pub fn shifted(self, t: f64) -> Self {
        Self::wrap(self.0 + t)
    }
}

/// `x mod 1` in `[0, 1)`.
pub fn frac(x: f64) -> Result<CirclePoint> {
    if !x.is_finite() {
        return Err(Error::NonFinite(x));
    }
    Ok(CirclePoint::wrap(x))
}

/// Length of the positively oriented arc from `a` to `b`.
pub fn ccw_distance(a: CirclePoint, b: CirclePoint) -> f64 {
    CirclePoint::wrap(b.0 - a.0).0
}

/// Shortest distance on the circle.
pub fn circle_distance(a: CirclePoint, b: CirclePoint) -> f64 {
    let d = ccw_distance(a, b);
    d.min(1.0 - d)
}

/// Ordering of `points` by counterclockwise distance from `base`.
///
/// Points closer than the resolvable length (including across the wrap)
/// make the order meaningless and are reported as a resolution error.
pub fn sort_ccw(
    points: &[CirclePoint],
    base: CirclePoint,
    ctx: &PrecisionContext,
) -> Result<Vec<usize>> {
    let keys: Vec<f64> = points.iter().map(|&p| ccw_distance(base, p)).collect();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| keys[i].total_cmp(&keys[j]).then(i.cmp(&j)));
    let min = ctx.min_resolvable_length();
    for w in order.windows(2) {
        let gap = keys[w[1]] - keys[w[0]];
        if gap < min {
            return Err(Error::Resolution {
                what: format!("points {} and {} coincide", w[0], w[1]),
                gap,
                min,
            });
        }
    }
    if points.len() >= 2 {
        let gap = 1.0 - (keys[order[points.len() - 1]] - keys[order[0]]);
        if gap < min {
            return Err(Error::Resolution {
                what: "points coincide across the wrap".into(),
                gap,
                min,
            });
        }
    }
    Ok(order)
}

/// Positively oriented arc `[start, start + length]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: CirclePoint,
    pub length: f64,
}

impl Arc {
    pub fn new(start: CirclePoint, length: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&length));
        Self { start, length }
    }

    pub fn between(a: CirclePoint, b: CirclePoint) -> Self {
        Self::new(a, ccw_distance(a, b))
    }

    pub fn end(&self) -> CirclePoint {
        self.start.shifted(self.length)
    }

    /// Offset of `p` from the start, if `p` lies on the closed arc.
    pub fn offset_of(&self, p: CirclePoint) -> Option<f64> {
        let d = ccw_distance(self.start, p);
        if self.length >= 1.0 || d <= self.length {
            Some(d)
        } else {
            None
        }
    }

    pub fn contains(&self, p: CirclePoint) -> bool {
        self.offset_of(p).is_some()
    }

    /// Interior membership with a margin at both ends.
    pub fn contains_interior(&self, p: CirclePoint, margin: f64) -> bool {
        matches!(self.offset_of(p), Some(d) if d > margin && d < self.length - margin)
    }

    pub fn point_at(&self, offset: f64) -> CirclePoint {
        self.start.shifted(offset)
    }

    pub fn midpoint(&self) -> CirclePoint {
        self.point_at(0.5 * self.length)
    }
}
