//! Dynamical partitions `P_n` and `D_n` of a marked orbit.
//!
//! Both are assembled by sorting orbit points and reading each atom's
//! type off the index difference of its endpoints; refinement between
//! levels is checked afterwards rather than used for construction.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cf::ConvergentTable;
use crate::circle::{ccw_distance, circle_distance, sort_ccw, Arc, CirclePoint};
use crate::error::{Error, Result};
use crate::pmap::PiecewiseHomeo;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AtomKind {
    /// `Delta^{n-1}_i`, `0 <= i < q_n`
    Dnm1,
    /// `Delta^n_j`, `0 <= j < q_{n-1}`
    Dn,
    /// `I^n_j`, `0 <= j < q_n + q_{n-1}`
    In,
    /// `I^{n-1,n}_i`, `0 <= i < q_n`
    Inm1n,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flavor {
    P,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub arc: Arc,
    pub kind: AtomKind,
    pub index: i64,
}

impl Atom {
    /// Orbit indices of the endpoints, in ccw order.
    pub fn endpoints(&self, n: i64, table: &ConvergentTable) -> (i64, i64) {
        let (qn, qm) = (table.q(n) as i64, table.q(n - 1) as i64);
        let (a, b) = match self.kind {
            AtomKind::Dnm1 => (self.index, self.index + qm),
            AtomKind::Dn => (self.index, self.index + qn),
            AtomKind::In => (self.index - qn, self.index),
            AtomKind::Inm1n => (self.index - qn, self.index + qm),
        };
        // the endpoint with the larger index lies on the side of its offset
        let sign = match self.kind {
            AtomKind::Dnm1 => -ConvergentTable::side(n),
            AtomKind::Dn | AtomKind::In => ConvergentTable::side(n),
            AtomKind::Inm1n => -ConvergentTable::side(n),
        };
        if sign > 0 {
            (a, b)
        } else {
            (b, a)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicalPartition {
    pub level: usize,
    pub marked_point: CirclePoint,
    pub flavor: Flavor,
    /// Sorted ccw starting at the marked point.
    pub atoms: Vec<Atom>,
}

fn label(
    n: i64,
    table: &ConvergentTable,
    flavor: Flavor,
    l: i64,
    r: i64,
) -> Result<(AtomKind, i64)> {
    let (qn, qm) = (table.q(n) as i64, table.q(n - 1) as i64);
    let sigma = ConvergentTable::side(n);
    let d = r - l;
    let lo = l.min(r);
    let hi = l.max(r);
    let kind = match flavor {
        Flavor::P if d == sigma * qn => Some((AtomKind::Dn, lo)),
        Flavor::P if d == -sigma * qm => Some((AtomKind::Dnm1, lo)),
        Flavor::D if d == sigma * qn => Some((AtomKind::In, hi)),
        Flavor::D if d == -sigma * (qn + qm) => Some((AtomKind::Inm1n, lo + qn)),
        _ => None,
    };
    kind.ok_or_else(|| {
        Error::Combinatorics(format!(
            "level {n}: consecutive orbit points {l} and {r} do not bound an atom"
        ))
    })
}

fn assemble(
    map: &PiecewiseHomeo,
    xi0: CirclePoint,
    table: &ConvergentTable,
    n: usize,
    flavor: Flavor,
) -> Result<DynamicalPartition> {
    let ni = n as i64;
    let qn = table.try_q(ni)? as i64;
    let qm = table.try_q(ni - 1)? as i64;
    let lo = match flavor {
        Flavor::P => 0,
        Flavor::D => -qn,
    };
    let hi = qn + qm - 1;
    let pts = map.orbit(xi0, lo, hi)?;
    let order = sort_ccw(&pts, xi0, map.ctx())?;
    let m = order.len();
    let mut atoms = Vec::with_capacity(m);
    for k in 0..m {
        let (il, ir) = (order[k], order[(k + 1) % m]);
        let (l, r) = (lo + il as i64, lo + ir as i64);
        let (kind, index) = label(ni, table, flavor, l, r)?;
        atoms.push(Atom {
            arc: Arc::between(pts[il], pts[ir]),
            kind,
            index,
        });
    }
    Ok(DynamicalPartition {
        level: n,
        marked_point: xi0,
        flavor,
        atoms,
    })
}

/// `P_n`: atoms `Delta^{n-1}_i` and `Delta^n_j` cut out by `xi_0 .. xi_{q_n + q_{n-1} - 1}`.
pub fn build_p(
    map: &PiecewiseHomeo,
    xi0: CirclePoint,
    table: &ConvergentTable,
    n: usize,
) -> Result<DynamicalPartition> {
    assemble(map, xi0, table, n, Flavor::P)
}

/// `D_n`: `P_n` with each `Delta^{n-1}_i` split at `xi_{i - q_n}`.
pub fn build_d(
    map: &PiecewiseHomeo,
    xi0: CirclePoint,
    table: &ConvergentTable,
    n: usize,
) -> Result<DynamicalPartition> {
    assemble(map, xi0, table, n, Flavor::D)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub atoms: usize,
    pub total_length: f64,
    pub max_endpoint_gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineReport {
    pub level: usize,
    pub atoms_checked: usize,
    pub max_mismatch: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub inner_atoms: usize,
    /// Inner atoms not inside exactly one outer atom.
    pub violations: Vec<usize>,
    pub pass: bool,
}

impl DynamicalPartition {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn find(&self, kind: AtomKind, index: i64) -> Option<&Atom> {
        self.atoms
            .iter()
            .find(|a| a.kind == kind && a.index == index)
    }

    /// The atom `[left, right)` that contains `p`.
    pub fn locate(&self, p: CirclePoint) -> usize {
        let d = ccw_distance(self.marked_point, p);
        let k = self
            .atoms
            .partition_point(|a| ccw_distance(self.marked_point, a.arc.start) <= d);
        k.saturating_sub(1)
    }

    pub fn max_atom_length(&self) -> f64 {
        self.atoms.iter().map(|a| a.arc.length).fold(0.0, f64::max)
    }

    pub fn coverage(&self) -> CoverageReport {
        let total: f64 = self.atoms.iter().map(|a| a.arc.length).sum();
        let mut gap = 0.0f64;
        let m = self.atoms.len();
        for k in 0..m {
            let end = self.atoms[k].arc.end();
            let next = self.atoms[(k + 1) % m].arc.start;
            gap = gap.max(circle_distance(end, next));
        }
        let tol = m as f64 * 10.0 * f64::EPSILON;
        CoverageReport {
            atoms: m,
            total_length: total,
            max_endpoint_gap: gap,
            tolerance: tol,
            pass: (total - 1.0).abs() <= tol && gap <= tol,
        }
    }

    /// Every atom of `self` lies in exactly one atom of `outer`.
    pub fn containment_in(&self, outer: &DynamicalPartition) -> ContainmentReport {
        let tol = 4.0 * f64::EPSILON;
        let base = outer.marked_point;
        let starts: Vec<f64> = outer
            .atoms
            .iter()
            .map(|a| ccw_distance(base, a.arc.start))
            .collect();
        let mut violations = vec![];
        for (k, a) in self.atoms.iter().enumerate() {
            let s = ccw_distance(base, a.arc.start);
            let mut hits = 0;
            let j = starts.partition_point(|&x| x <= s + tol).saturating_sub(1);
            // the candidate and its neighbours cover every tolerance-sized ambiguity
            for jj in [j + outer.len() - 1, j, j + 1] {
                let o = &outer.atoms[jj % outer.len()];
                let off = ccw_distance(o.arc.start, a.arc.start);
                let off = if off > 1.0 - tol { 0.0 } else { off };
                if off < o.arc.length - tol && off + a.arc.length <= o.arc.length + tol {
                    hits += 1;
                }
            }
            if hits != 1 {
                violations.push(k);
            }
        }
        ContainmentReport {
            inner_atoms: self.len(),
            pass: violations.is_empty(),
            violations,
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for row in self.csv_rows() {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn csv_rows(&self) -> Vec<CsvAtom> {
        self.atoms
            .iter()
            .map(|a| CsvAtom {
                level: self.level,
                flavor: self.flavor,
                kind: a.kind,
                index: a.index,
                start: a.arc.start.value(),
                length: a.arc.length,
            })
            .collect()
    }

    /// Inverse of [`write_csv`](Self::write_csv); the marked point is the first atom's start.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let rows: Vec<CsvAtom> = r.deserialize().collect::<std::result::Result<_, _>>()?;
        let first = rows
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty partition file".into()))?;
        let (level, flavor) = (first.level, first.flavor);
        let atoms = rows
            .iter()
            .map(|row| {
                Ok(Atom {
                    arc: Arc::new(CirclePoint::new(row.start)?, row.length.clamp(0.0, 1.0)),
                    kind: row.kind,
                    index: row.index,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            level,
            marked_point: atoms[0].arc.start,
            flavor,
            atoms,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsvAtom {
    pub level: usize,
    pub flavor: Flavor,
    pub kind: AtomKind,
    pub index: i64,
    pub start: f64,
    pub length: f64,
}

/// Refinement of `P_n` by `P_{n+1}`: each `Delta^{n-1}_i` is `Delta^{n+1}_i`
/// followed by `k` atoms `Delta^n_{i + q_{n-1} + s q_n}`, where
/// `q_{n+1} = k q_n + q_{n-1}`; each `Delta^n_j` of `P_n` survives unchanged.
pub fn refine_check(
    pn: &DynamicalPartition,
    pn1: &DynamicalPartition,
    table: &ConvergentTable,
) -> Result<RefineReport> {
    if pn.flavor != Flavor::P || pn1.flavor != Flavor::P || pn1.level != pn.level + 1 {
        return Err(Error::Precondition(
            "refine_check needs P_n and P_{n+1}".into(),
        ));
    }
    let n = pn.level as i64;
    let (qn, qm) = (table.try_q(n)? as i64, table.try_q(n - 1)? as i64);
    let k = table.multiplier(n + 1) as i64;
    let tol = 1e-12;
    let mut worst = 0.0f64;
    let mut checked = 0;
    for parent in &pn.atoms {
        let i = parent.index;
        let mut pieces: Vec<(i64, &Atom)> = vec![];
        match parent.kind {
            AtomKind::Dnm1 => {
                let a = pn1.find(AtomKind::Dn, i).ok_or_else(|| Error::Refinement {
                    i,
                    s: -1,
                    detail: "missing Delta^{n+1}_i".into(),
                })?;
                pieces.push((-1, a));
                for s in 0..k {
                    let j = i + qm + s * qn;
                    let a = pn1
                        .find(AtomKind::Dnm1, j)
                        .ok_or_else(|| Error::Refinement {
                            i,
                            s,
                            detail: format!("missing Delta^n_{j}"),
                        })?;
                    pieces.push((s, a));
                }
            }
            AtomKind::Dn => {
                let a = pn1
                    .find(AtomKind::Dnm1, i)
                    .ok_or_else(|| Error::Refinement {
                        i,
                        s: -1,
                        detail: "Delta^n_j missing from the finer level".into(),
                    })?;
                pieces.push((-1, a));
            }
            _ => {
                return Err(Error::Precondition("P partition holds I atoms".into()));
            }
        }
        // tile the parent arc in ccw order
        pieces.sort_by(|x, y| {
            ccw_distance(parent.arc.start, x.1.arc.start)
                .total_cmp(&ccw_distance(parent.arc.start, y.1.arc.start))
        });
        let mut cursor = parent.arc.start;
        for &(s, a) in &pieces {
            let miss = circle_distance(cursor, a.arc.start);
            worst = worst.max(miss);
            if miss > tol {
                return Err(Error::Refinement {
                    i,
                    s,
                    detail: format!("piece starts {miss:e} away from where the previous ended"),
                });
            }
            cursor = a.arc.end();
        }
        let miss = circle_distance(cursor, parent.arc.end());
        worst = worst.max(miss);
        if miss > tol {
            return Err(Error::Refinement {
                i,
                s: k,
                detail: format!("pieces end {miss:e} short of the parent atom"),
            });
        }
        checked += 1;
    }
    Ok(RefineReport {
        level: pn.level,
        atoms_checked: checked,
        max_mismatch: worst,
        pass: true,
    })
}
