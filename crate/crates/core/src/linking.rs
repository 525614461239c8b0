//! Points on the oriented circle `T = R/Z` and the linking form on pairs of points.
//!
//! Positions are exact rationals in `[0,1)`. The linking number
//! `[Xx,Yy]` is evaluated after unrolling the circle through a cut point,
//! and is always one of `-1, -1/2, 0, 1/2, 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Index of a distinct point inside a [`PointConfig`].
///
/// Ids are assigned in increasing order of position, so comparing ids
/// compares positions.
pub type PointId = usize;

/// Reduce a rational into the canonical range `[0,1)`.
pub fn reduce_position(p: Rational64) -> Rational64 {
    let f = p - p.floor();
    if f < Rational64::zero() {
        f + Rational64::one()
    } else {
        f
    }
}

/// A labeled point of the circle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CirclePoint {
    pub label: String,
    pub position: Rational64,
}

impl CirclePoint {
    pub fn new(label: impl Into<String>, position: Rational64) -> Self {
        CirclePoint {
            label: label.into(),
            position: reduce_position(position),
        }
    }

    /// Convenience constructor from `num/den`.
    pub fn at(label: impl Into<String>, num: i64, den: i64) -> Self {
        Self::new(label, Rational64::new(num, den))
    }
}

/// Midpoint of the largest gap between consecutive positions (cyclically).
///
/// Ties go to the first gap in increasing order. The wrap-around gap is
/// measured from the largest position to the smallest one plus 1.
pub fn default_cut(positions: &[Rational64]) -> Rational64 {
    let mut ps: Vec<Rational64> = positions.iter().map(|p| reduce_position(*p)).collect();
    ps.sort();
    ps.dedup();
    if ps.len() <= 1 {
        let base = ps.first().copied().unwrap_or_else(Rational64::zero);
        return reduce_position(base + Rational64::new(1, 2));
    }
    let n = ps.len();
    let mut best_gap = Rational64::zero();
    let mut best_mid = Rational64::zero();
    for i in 0..n {
        let a = ps[i];
        let b = if i + 1 < n { ps[i + 1] } else { ps[0] + Rational64::one() };
        let gap = b - a;
        if gap > best_gap {
            best_gap = gap;
            best_mid = (a + b) / Rational64::from_integer(2);
        }
    }
    reduce_position(best_mid)
}

/// Twice the linking number given a comparison of unrolled positions.
fn twice_linking_by<F: Fn(Rational64, Rational64) -> i32>(pos: [Rational64; 4], s: F) -> i32 {
    let [xx, x, yy, y] = pos;
    let s_xx = s(xx, x);
    s_xx * s(xx, y) * s(y, x) - s_xx * s(xx, yy) * s(yy, x)
}

/// Twice the linking number given raw positions and a cut.
///
/// Unrolling through `c` sends `p >= c` to `p - c` and `p < c` to `p - c + 1`,
/// so unrolled order is the order of the keys `(p < c, p)`.
fn twice_linking(pos: [Rational64; 4], cut: Rational64) -> Result<i32> {
    if let Some(p) = pos.iter().find(|p| reduce_position(**p) == cut) {
        return Err(Error::InvalidCut(format!("cut {} equals position {}", cut, p)));
    }
    let pos = pos.map(reduce_position);
    Ok(twice_linking_by(pos, |a, b| (a < cut, a).cmp(&(b < cut, b)) as i32))
}

/// Cutting in the gap that contains 0 needs no arithmetic: unrolled order is
/// the order of the reduced positions. By cut independence this agrees with
/// every valid cut, [`default_cut`] included.
fn twice_linking_default(pos: [Rational64; 4]) -> i32 {
    twice_linking_by(pos, |a, b| a.cmp(&b) as i32)
}

fn half(twice: i32) -> Rational64 {
    Rational64::new(twice as i64, 2)
}

/// `[Xx,Yy]` through the default cut.
pub fn linking_number(xx: &CirclePoint, x: &CirclePoint, yy: &CirclePoint, y: &CirclePoint) -> Rational64 {
    half(twice_linking_default([xx.position, x.position, yy.position, y.position]))
}

/// `[Xx,Yy]` unrolled through an explicit cut.
pub fn linking_number_with_cut(
    xx: &CirclePoint,
    x: &CirclePoint,
    yy: &CirclePoint,
    y: &CirclePoint,
    cut: Rational64,
) -> Result<Rational64> {
    twice_linking([xx.position, x.position, yy.position, y.position], reduce_position(cut)).map(half)
}

/// `[Xx,Yy]` from bare positions, default cut.
pub fn linking_positions(xx: Rational64, x: Rational64, yy: Rational64, y: Rational64) -> Rational64 {
    half(twice_linking_default([xx, x, yy, y].map(reduce_position)))
}

/// `F = [Xx,Yy][Xy,Zz] + [Zz,Xx][Zx,Yy] + [Yy,Zz][Yz,Xx]`.
pub fn six_point_f(
    xx: &CirclePoint,
    x: &CirclePoint,
    yy: &CirclePoint,
    y: &CirclePoint,
    zz: &CirclePoint,
    z: &CirclePoint,
) -> Rational64 {
    let l = linking_number;
    l(xx, x, yy, y) * l(xx, y, zz, z) + l(zz, z, xx, x) * l(zz, x, yy, y) + l(yy, y, zz, z) * l(yy, z, xx, x)
}

/// `G = [Xx,Yy][Yx,Zz] + [Zz,Xx][Xz,Yy] + [Yy,Zz][Zy,Xx]`.
pub fn six_point_g(
    xx: &CirclePoint,
    x: &CirclePoint,
    yy: &CirclePoint,
    y: &CirclePoint,
    zz: &CirclePoint,
    z: &CirclePoint,
) -> Rational64 {
    let l = linking_number;
    l(xx, x, yy, y) * l(yy, x, zz, z) + l(zz, z, xx, x) * l(xx, z, yy, y) + l(yy, y, zz, z) * l(zz, y, xx, x)
}

/// `[zy,XY] + [zy,YZ] + [zy,ZX]`, identically zero.
pub fn cocycle_defect(
    z: &CirclePoint,
    y: &CirclePoint,
    xx: &CirclePoint,
    yy: &CirclePoint,
    zz: &CirclePoint,
) -> Rational64 {
    let l = linking_number;
    l(z, y, xx, yy) + l(z, y, yy, zz) + l(z, y, zz, xx)
}

static NEXT_TAG: AtomicU64 = AtomicU64::new(1);

/// A finite set of labeled circle points.
///
/// Distinct labels at equal positions are aliases of one point. Point ids
/// follow the cyclic order starting from position 0.
#[derive(Debug)]
pub struct PointConfig {
    tag: u64,
    points: Vec<CirclePoint>,
    labels: BTreeMap<String, PointId>,
    cut: Option<Rational64>,
}

impl PointConfig {
    /// Build a configuration from `(label, position)` entries.
    pub fn new<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Rational64)>,
        S: Into<String>,
    {
        let mut raw: Vec<(String, Rational64)> = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for (label, pos) in entries {
            let label = label.into();
            if label.is_empty() {
                return Err(Error::InvalidInput("empty point label".into()));
            }
            if !seen.insert(label.clone()) {
                return Err(Error::DuplicateLabel(label));
            }
            raw.push((label, reduce_position(pos)));
        }
        let mut positions: Vec<Rational64> = raw.iter().map(|(_, p)| *p).collect();
        positions.sort();
        positions.dedup();
        let points: Vec<CirclePoint> = positions
            .iter()
            .map(|p| {
                let label = raw.iter().find(|(_, q)| q == p).map(|(l, _)| l.clone()).unwrap_or_default();
                CirclePoint { label, position: *p }
            })
            .collect();
        let labels = raw
            .into_iter()
            .map(|(l, p)| {
                let id = positions.binary_search(&p).expect("position registered");
                (l, id)
            })
            .collect();
        Ok(PointConfig {
            tag: NEXT_TAG.fetch_add(1, Ordering::Relaxed),
            points,
            labels,
            cut: None,
        })
    }

    /// Fix the cut used for every linking number of this configuration.
    pub fn with_cut(mut self, cut: Rational64) -> Result<Self> {
        let cut = reduce_position(cut);
        if let Some(p) = self.points.iter().find(|p| p.position == cut) {
            return Err(Error::InvalidCut(format!("cut {} equals point `{}`", cut, p.label)));
        }
        self.cut = Some(cut);
        Ok(self)
    }

    /// Parse the `label = p/q` line format; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (label, value) = line.split_once('=').ok_or_else(|| Error::Syntax {
                line: lineno + 1,
                column: 1,
                message: "expected `label = p/q`".into(),
            })?;
            let label = label.trim();
            let value = value.trim();
            let pos = parse_rational(value).ok_or_else(|| Error::Syntax {
                line: lineno + 1,
                column: line.find('=').unwrap_or(0) + 2,
                message: format!("invalid rational `{}`", value),
            })?;
            entries.push((label.to_string(), pos));
        }
        Self::new(entries)
    }

    pub fn tag(&self) -> u64 {
        self.tag
    }

    /// Number of distinct points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, id: PointId) -> &CirclePoint {
        &self.points[id]
    }

    pub fn points(&self) -> &[CirclePoint] {
        &self.points
    }

    pub fn cut(&self) -> Option<Rational64> {
        self.cut
    }

    pub fn id(&self, label: &str) -> Result<PointId> {
        self.labels.get(label).copied().ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// All labels with their point ids, in label order.
    pub fn labels(&self) -> impl Iterator<Item = (&str, PointId)> {
        self.labels.iter().map(|(l, id)| (l.as_str(), *id))
    }

    /// Twice `[Xx,Yy]` for point ids.
    pub fn twice_linking(&self, xx: PointId, x: PointId, yy: PointId, y: PointId) -> i32 {
        let pos = [xx, x, yy, y].map(|i| self.points[i].position);
        match self.cut {
            Some(c) => twice_linking(pos, c).expect("cut validated at construction"),
            None => twice_linking_default(pos),
        }
    }

    /// `[Xx,Yy]` for point ids.
    pub fn linking(&self, xx: PointId, x: PointId, yy: PointId, y: PointId) -> Rational64 {
        half(self.twice_linking(xx, x, yy, y))
    }
}

impl fmt::Display for PointConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, id) in &self.labels {
            writeln!(f, "{} = {}", label, self.points[*id].position)?;
        }
        Ok(())
    }
}

/// Parse `p/q`, an integer, or a finite decimal like `0.25` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational64> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Rational64::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) || frac.len() > 17 {
            return None;
        }
        let negative = int.trim_start().starts_with('-');
        let int_part: i64 = if int.is_empty() || int == "-" || int == "+" { 0 } else { int.parse().ok()? };
        let den = 10i64.checked_pow(frac.len() as u32)?;
        let frac_part: i64 = frac.parse().ok()?;
        let mag = int_part.abs().checked_mul(den)?.checked_add(frac_part)?;
        return Some(Rational64::new(if negative { -mag } else { mag }, den));
    }
    s.parse::<i64>().ok().map(Rational64::from_integer)
}
