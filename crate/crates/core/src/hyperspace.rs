//! Compact subsets of `[0,1]` and `[0,1]^d` with the Hausdorff metric.
//!
//! One-dimensional sets are either finite point sets or finite unions of
//! disjoint closed intervals. Both are stored sorted, and every distance is
//! computed exactly. Conversions between the two representations are
//! explicit.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Grid, Scalar};

/// A closed interval `[lo, hi]` with `lo <= hi`. Degenerate intervals are points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidSet(format!("interval [{lo}, {hi}] has lo > hi")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: Scalar) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn length(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn shifted(&self, by: &Scalar) -> Interval {
        Interval { lo: &self.lo + by, hi: &self.hi + by }
    }

    pub fn midpoint(&self) -> Scalar {
        Scalar::midpoint(&self.lo, &self.hi)
    }
}

/// A nonempty compact subset of `[0,1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CompactSet1D {
    /// Sorted, deduplicated points.
    Points(Vec<Scalar>),
    /// Sorted closed intervals with `hi_i < lo_{i+1}`.
    Intervals(Vec<Interval>),
}

impl CompactSet1D {
    /// Builds a finite point set; input order and duplicates are irrelevant.
    pub fn points(mut pts: Vec<Scalar>) -> Result<Self> {
        if pts.is_empty() {
            return Err(Error::EmptySet("point set"));
        }
        for p in &pts {
            if !p.in_unit_interval() {
                return Err(Error::OutOfRange { coordinate: 0, value: p.to_string() });
            }
        }
        pts.sort();
        pts.dedup();
        Ok(CompactSet1D::Points(pts))
    }

    /// Builds an interval union that must already be sorted and pairwise disjoint.
    pub fn intervals(ivs: Vec<Interval>) -> Result<Self> {
        if ivs.is_empty() {
            return Err(Error::EmptySet("interval union"));
        }
        for iv in &ivs {
            check_interval_in_unit(iv)?;
        }
        for (i, w) in ivs.windows(2).enumerate() {
            if w[0].hi >= w[1].lo {
                return Err(Error::InvalidSet(format!(
                    "intervals {i} and {} overlap or are unsorted",
                    i + 1
                )));
            }
        }
        Ok(CompactSet1D::Intervals(ivs))
    }

    /// Sorts and merges arbitrary closed intervals (touching intervals merge).
    pub fn from_intervals_normalized(ivs: Vec<Interval>) -> Result<Self> {
        if ivs.is_empty() {
            return Err(Error::EmptySet("interval union"));
        }
        for iv in &ivs {
            check_interval_in_unit(iv)?;
        }
        Ok(CompactSet1D::Intervals(merge_intervals(ivs)))
    }

    pub fn unit_interval() -> Self {
        CompactSet1D::Intervals(vec![Interval { lo: Scalar::zero(), hi: Scalar::one() }])
    }

    pub fn is_points(&self) -> bool {
        matches!(self, CompactSet1D::Points(_))
    }

    /// Number of components (points or intervals).
    pub fn len(&self) -> usize {
        match self {
            CompactSet1D::Points(p) => p.len(),
            CompactSet1D::Intervals(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Component `i` as a (possibly degenerate) interval, borrowed.
    pub fn span(&self, i: usize) -> (&Scalar, &Scalar) {
        match self {
            CompactSet1D::Points(p) => (&p[i], &p[i]),
            CompactSet1D::Intervals(v) => (&v[i].lo, &v[i].hi),
        }
    }

    pub fn spans(&self) -> impl Iterator<Item = (&Scalar, &Scalar)> + '_ {
        (0..self.len()).map(move |i| self.span(i))
    }

    /// Components as owned intervals.
    pub fn to_intervals(&self) -> Vec<Interval> {
        self.spans()
            .map(|(l, h)| Interval { lo: l.clone(), hi: h.clone() })
            .collect()
    }

    /// The same set in interval-union form.
    pub fn as_interval_union(&self) -> CompactSet1D {
        match self {
            CompactSet1D::Intervals(_) => self.clone(),
            CompactSet1D::Points(p) => {
                CompactSet1D::Intervals(p.iter().cloned().map(Interval::point).collect())
            }
        }
    }

    pub fn min(&self) -> &Scalar {
        self.span(0).0
    }

    pub fn max(&self) -> &Scalar {
        self.span(self.len() - 1).1
    }

    /// Every endpoint of every component, sorted.
    pub fn endpoints(&self) -> Vec<Scalar> {
        let mut out = Vec::with_capacity(self.len() * 2);
        for (l, h) in self.spans() {
            out.push(l.clone());
            if l != h {
                out.push(h.clone());
            }
        }
        out
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        // first component whose hi >= x
        let idx = self.partition_hi_below(x);
        idx < self.len() && self.span(idx).0 <= x
    }

    /// Index of the first component with `hi >= x`.
    fn partition_hi_below(&self, x: &Scalar) -> usize {
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.span(mid).1 < x {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Exact distance from `x` to the set.
    pub fn distance_to_point(&self, x: &Scalar) -> Scalar {
        let idx = self.partition_hi_below(x);
        point_distance_at(self, x, idx)
    }

    /// `self ⊆ other`, exactly.
    pub fn is_subset_of(&self, other: &CompactSet1D) -> bool {
        let mut j = 0usize;
        for (l, h) in self.spans() {
            while j < other.len() && other.span(j).1 < l {
                j += 1;
            }
            if j == other.len() {
                return false;
            }
            let (ol, oh) = other.span(j);
            if !(ol <= l && h <= oh) {
                return false;
            }
        }
        true
    }

    /// Total length (zero for point sets).
    pub fn measure(&self) -> Scalar {
        self.spans().map(|(l, h)| h - l).sum()
    }

    /// Image under `x ↦ r·x + t`, which must stay in `[0,1]`.
    pub fn scale_translate(&self, r: &Scalar, t: &Scalar) -> Result<CompactSet1D> {
        let img = |x: &Scalar| -> Result<Scalar> {
            let y = r * x + t;
            if !y.in_unit_interval() {
                return Err(Error::OutOfRange { coordinate: 0, value: y.to_string() });
            }
            Ok(y)
        };
        match self {
            CompactSet1D::Points(p) => {
                CompactSet1D::points(p.iter().map(img).collect::<Result<Vec<_>>>()?)
            }
            CompactSet1D::Intervals(v) => {
                let mut out = Vec::with_capacity(v.len());
                for iv in v {
                    let (a, b) = (img(&iv.lo)?, img(&iv.hi)?);
                    out.push(if a <= b { Interval { lo: a, hi: b } } else { Interval { lo: b, hi: a } });
                }
                CompactSet1D::from_intervals_normalized(out)
            }
        }
    }

    /// Finite sampling of the set: points as-is, intervals at spacing `step`
    /// (both endpoints always included).
    pub fn sample(&self, step: &Scalar) -> Result<CompactSet1D> {
        if !step.is_positive() {
            return Err(Error::InvalidArgument("sampling step must be positive".into()));
        }
        let mut out = Vec::new();
        for (l, h) in self.spans() {
            let mut x = l.clone();
            while &x < h {
                out.push(x.clone());
                x = &x + step;
            }
            out.push(h.clone());
        }
        CompactSet1D::points(out)
    }
}

fn check_interval_in_unit(iv: &Interval) -> Result<()> {
    if iv.lo > iv.hi {
        return Err(Error::InvalidSet(format!("interval [{}, {}] has lo > hi", iv.lo, iv.hi)));
    }
    if !iv.lo.in_unit_interval() {
        return Err(Error::OutOfRange { coordinate: 0, value: iv.lo.to_string() });
    }
    if !iv.hi.in_unit_interval() {
        return Err(Error::OutOfRange { coordinate: 0, value: iv.hi.to_string() });
    }
    Ok(())
}

/// Sorts closed intervals and merges any that overlap or touch.
pub fn merge_intervals(mut ivs: Vec<Interval>) -> Vec<Interval> {
    ivs.sort_by(|a, b| a.lo.cmp(&b.lo).then_with(|| a.hi.cmp(&b.hi)));
    let mut out: Vec<Interval> = Vec::with_capacity(ivs.len());
    for iv in ivs {
        match out.last_mut() {
            Some(last) if iv.lo <= last.hi => {
                if iv.hi > last.hi {
                    last.hi = iv.hi;
                }
            }
            _ => out.push(iv),
        }
    }
    out
}

/// Ordered coordinates the sweep can run on: exact scalars, or integer
/// numerators on a doubled common grid (so midpoints and halves stay exact).
trait Coord: Ord + Clone {
    fn zero() -> Self;
    fn diff(&self, lower: &Self) -> Self;
    fn mid(a: &Self, b: &Self) -> Self;
    fn halve(&self) -> Self;
}

impl Coord for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn diff(&self, lower: &Self) -> Self {
        self - lower
    }
    fn mid(a: &Self, b: &Self) -> Self {
        Scalar::midpoint(a, b)
    }
    fn halve(&self) -> Self {
        self.half()
    }
}

// values are even, so both divisions are exact
impl Coord for i128 {
    fn zero() -> Self {
        0
    }
    fn diff(&self, lower: &Self) -> Self {
        self - lower
    }
    fn mid(a: &Self, b: &Self) -> Self {
        (a + b) / 2
    }
    fn halve(&self) -> Self {
        self / 2
    }
}

/// Sorted disjoint components `(lo, hi)`.
trait Spans<T> {
    fn count(&self) -> usize;
    fn at(&self, i: usize) -> (&T, &T);
}

impl Spans<Scalar> for CompactSet1D {
    fn count(&self) -> usize {
        self.len()
    }
    fn at(&self, i: usize) -> (&Scalar, &Scalar) {
        self.span(i)
    }
}

impl Spans<i128> for [(i128, i128)] {
    fn count(&self) -> usize {
        self.len()
    }
    fn at(&self, i: usize) -> (&i128, &i128) {
        (&self[i].0, &self[i].1)
    }
}

/// Distance from `x` to `set`, given `idx` = first component with `hi >= x`.
fn point_distance_at<T: Coord, S: Spans<T> + ?Sized>(set: &S, x: &T, idx: usize) -> T {
    let n = set.count();
    if idx < n {
        let (l, _) = set.at(idx);
        if l <= x {
            return T::zero();
        }
        let right = l.diff(x);
        if idx == 0 {
            return right;
        }
        let left = x.diff(set.at(idx - 1).1);
        return left.min(right);
    }
    x.diff(set.at(n - 1).1)
}

/// On each component `[l, u]` of `a`, `dist(·, b)` is maximized at `l`, at
/// `u`, or at the midpoint of a gap of `b` lying inside `[l, u]`.
fn sweep<T: Coord, S: Spans<T> + ?Sized>(a: &S, b: &S) -> T {
    let mut best = T::zero();
    let mut lo_ptr = 0usize;
    let mut hi_ptr = 0usize;
    let nb = b.count();
    for i in 0..a.count() {
        let (l, u) = a.at(i);
        while lo_ptr < nb && b.at(lo_ptr).1 < l {
            lo_ptr += 1;
        }
        let dl = point_distance_at(b, l, lo_ptr);
        if dl > best {
            best = dl;
        }
        if l != u {
            // gaps (b[t].hi, b[t+1].lo) with a midpoint inside [l, u]
            let mut t = lo_ptr.saturating_sub(1);
            while t + 1 < nb {
                let g_lo = b.at(t).1;
                let g_hi = b.at(t + 1).0;
                let mid = T::mid(g_lo, g_hi);
                if &mid > u {
                    break;
                }
                if &mid >= l {
                    let half = g_hi.diff(g_lo).halve();
                    if half > best {
                        best = half;
                    }
                }
                t += 1;
            }
            if hi_ptr < lo_ptr {
                hi_ptr = lo_ptr;
            }
            while hi_ptr < nb && b.at(hi_ptr).1 < u {
                hi_ptr += 1;
            }
            let du = point_distance_at(b, u, hi_ptr);
            if du > best {
                best = du;
            }
        }
    }
    best
}

/// Components as doubled numerators on a common grid.
type Lifted = Vec<(i128, i128)>;

fn lift_spans(set: &CompactSet1D, grid: &Grid) -> Option<Lifted> {
    set.spans().map(|(l, h)| Some((2 * grid.lift(l)?, 2 * grid.lift(h)?))).collect()
}

/// A common grid for `a` and `b` and both sets lifted onto it.
fn lift_pair(a: &CompactSet1D, b: &CompactSet1D) -> Option<(Grid, Lifted, Lifted)> {
    let grid = Grid::fit(a.spans().chain(b.spans()).flat_map(|(l, h)| [l, h]))?;
    let la = lift_spans(a, &grid)?;
    let lb = lift_spans(b, &grid)?;
    Some((Grid::with_den(2 * grid.den())?, la, lb))
}

/// `sup_{a ∈ A} dist(a, B)` by a monotone sweep over both sorted sets.
pub fn directed_hausdorff(a: &CompactSet1D, b: &CompactSet1D) -> Scalar {
    match lift_pair(a, b) {
        Some((grid, la, lb)) => grid.scalar(sweep(la.as_slice(), lb.as_slice())),
        None => sweep(a, b),
    }
}

/// Exact Hausdorff distance between two compact subsets of `[0,1]`.
///
/// Mixed representations are allowed: points are treated as degenerate
/// intervals.
pub fn hausdorff_distance(a: &CompactSet1D, b: &CompactSet1D) -> Scalar {
    if let Some((grid, la, lb)) = lift_pair(a, b) {
        let (la, lb) = (la.as_slice(), lb.as_slice());
        return grid.scalar(sweep(la, lb).max(sweep(lb, la)));
    }
    Scalar::max_of(&sweep(a, b), &sweep(b, a))
}

/// Closed `r`-neighbourhood of `c`, clipped to `[0,1]`, as a normalized
/// interval union.
pub fn dilate(c: &CompactSet1D, r: &Scalar) -> Result<CompactSet1D> {
    if r.is_negative() {
        return Err(Error::InvalidArgument(format!("dilation radius {r} is negative")));
    }
    let zero = Scalar::zero();
    let one = Scalar::one();
    let ivs: Vec<Interval> = c
        .spans()
        .map(|(l, h)| {
            let lo = Scalar::max_of(&(l - r), &zero);
            let hi = Scalar::min_of(&(h + r), &one);
            Interval { lo, hi }
        })
        .collect();
    Ok(CompactSet1D::Intervals(merge_intervals(ivs)))
}

/// A nonempty finite subset of `[0,1]^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompactSetD {
    dim: usize,
    points: Vec<Vec<Scalar>>,
}

impl CompactSetD {
    pub fn new(dim: usize, mut points: Vec<Vec<Scalar>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if points.is_empty() {
            return Err(Error::EmptySet("point set"));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::InvalidSet(format!(
                    "point of dimension {} in a {dim}-dimensional set",
                    p.len()
                )));
            }
            for (c, v) in p.iter().enumerate() {
                if !v.in_unit_interval() {
                    return Err(Error::OutOfRange { coordinate: c, value: v.to_string() });
                }
            }
        }
        points.sort();
        points.dedup();
        Ok(CompactSetD { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<Scalar>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &[Scalar]) -> bool {
        self.points.binary_search_by(|q| q.as_slice().cmp(p)).is_ok()
    }

    /// Smallest squared distance between two distinct points, if any.
    pub fn min_pairwise_sq(&self) -> Option<Scalar> {
        let mut best: Option<Scalar> = None;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let d = squared_distance(&self.points[i], &self.points[j]);
                if best.as_ref().is_none_or(|b| &d < b) {
                    best = Some(d);
                }
            }
        }
        best
    }

    /// Union with another set of the same dimension.
    pub fn union(&self, other: &CompactSetD) -> Result<CompactSetD> {
        if self.dim != other.dim {
            return Err(Error::Incompatible(format!("dimensions {} and {}", self.dim, other.dim)));
        }
        let mut pts = self.points.clone();
        pts.extend(other.points.iter().cloned());
        CompactSetD::new(self.dim, pts)
    }
}

pub fn squared_distance(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            &d * &d
        })
        .sum()
}

/// A Euclidean distance held as its exact square.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EuclideanDistance {
    pub squared: Scalar,
}

impl EuclideanDistance {
    /// The distance itself when it is rational.
    pub fn exact(&self) -> Option<Scalar> {
        self.squared.sqrt_exact()
    }

    pub fn to_f64(&self) -> f64 {
        self.squared.to_f64().sqrt()
    }

    /// Compares the distance against a nonnegative radius.
    pub fn cmp_radius(&self, r: &Scalar) -> Ordering {
        self.squared.cmp(&(r * r))
    }
}

fn directed_sq(a: &CompactSetD, b: &CompactSetD) -> Scalar {
    let mut best = Scalar::zero();
    for p in &a.points {
        let mut near: Option<Scalar> = None;
        for q in &b.points {
            let d = squared_distance(p, q);
            if near.as_ref().is_none_or(|n| &d < n) {
                let zero = d.is_zero();
                near = Some(d);
                if zero {
                    break;
                }
            }
        }
        let near = near.expect("nonempty set");
        if near > best {
            best = near;
        }
    }
    best
}

/// Hausdorff distance in `[0,1]^d` under the Euclidean metric, compared exactly
/// through squared distances.
pub fn hausdorff_distance_d(a: &CompactSetD, b: &CompactSetD) -> Result<EuclideanDistance> {
    if a.dim != b.dim {
        return Err(Error::Incompatible(format!("dimensions {} and {}", a.dim, b.dim)));
    }
    let ab = directed_sq(a, b);
    let ba = directed_sq(b, a);
    Ok(EuclideanDistance { squared: Scalar::max_of(&ab, &ba) })
}

/// `x + r·A`; every coordinate must land in `[0,1]`.
pub fn scale_translate(a: &CompactSetD, r: &Scalar, x: &[Scalar]) -> Result<CompactSetD> {
    if x.len() != a.dim {
        return Err(Error::Incompatible(format!(
            "translation of dimension {} for a {}-dimensional set",
            x.len(),
            a.dim
        )));
    }
    let mut pts = Vec::with_capacity(a.points.len());
    for p in &a.points {
        let mut img = Vec::with_capacity(a.dim);
        for (c, (pc, xc)) in p.iter().zip(x).enumerate() {
            let v = xc + r * pc;
            if !v.in_unit_interval() {
                return Err(Error::OutOfRange { coordinate: c, value: v.to_string() });
            }
            img.push(v);
        }
        pts.push(img);
    }
    CompactSetD::new(a.dim, pts)
}

/// `A × {0}^{d-1}`. Interval unions need an explicit sampling step.
pub fn embed(a: &CompactSet1D, d: usize, sampling: Option<&Scalar>) -> Result<CompactSetD> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let pts = match (a, sampling) {
        (CompactSet1D::Points(p), _) => p.clone(),
        (CompactSet1D::Intervals(_), Some(step)) => match a.sample(step)? {
            CompactSet1D::Points(p) => p,
            CompactSet1D::Intervals(_) => unreachable!("sampling yields points"),
        },
        (CompactSet1D::Intervals(_), None) => {
            return Err(Error::Unsupported(
                "embedding an interval union requires a sampling resolution".into(),
            ))
        }
    };
    let lifted = pts
        .into_iter()
        .map(|x| {
            let mut v = vec![Scalar::zero(); d];
            v[0] = x;
            v
        })
        .collect();
    CompactSetD::new(d, lifted)
}

/// Largest open ball inside `B(x, R) ∖ A` on the real line, relative to `R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PorosityRatioReport {
    pub center: Scalar,
    pub radius: Scalar,
    pub gap_radius: Scalar,
    pub gap_center: Scalar,
    pub ratio: Scalar,
}

/// Exact supremum of `r/R` over open balls `B(y, r) ⊆ B(x, R) ∖ A`.
///
/// Balls are open subsets of the real line; `A` is closed, so the sets
/// `B(x,R) ∖ A` split into finitely many open gaps and the supremum is half the
/// widest gap.
pub fn porosity_ratio_line(a: &CompactSet1D, x: &Scalar, radius: &Scalar) -> Result<PorosityRatioReport> {
    if !radius.is_positive() {
        return Err(Error::InvalidArgument("porosity radius must be positive".into()));
    }
    let left = x - radius;
    let right = x + radius;
    let mut cursor = left.clone();
    let mut best: Option<(Scalar, Scalar)> = None;
    let mut consider = |lo: &Scalar, hi: &Scalar| {
        if lo < hi {
            let w = hi - lo;
            if best.as_ref().is_none_or(|(bw, _)| &w > bw) {
                best = Some((w, Scalar::midpoint(lo, hi)));
            }
        }
    };
    for (l, h) in a.spans() {
        if h <= &left {
            continue;
        }
        if l >= &right {
            break;
        }
        consider(&cursor, l);
        if h > &cursor {
            cursor = h.clone();
        }
    }
    consider(&cursor, &right);
    let (gap_radius, gap_center) = match best {
        Some((w, c)) => (w.half(), c),
        None => (Scalar::zero(), x.clone()),
    };
    let ratio = &gap_radius / radius;
    Ok(PorosityRatioReport {
        center: x.clone(),
        radius: radius.clone(),
        gap_radius,
        gap_center,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn pts(v: &[(i64, i64)]) -> CompactSet1D {
        CompactSet1D::points(v.iter().map(|&(a, b)| q(a, b)).collect()).unwrap()
    }

    type Ends = ((i64, i64), (i64, i64));

    #[test]
    fn grid_sweep_matches_exact_sweep() {
        let a = ivs(&[((0, 1), (1, 7)), ((2, 7), (3, 7)), ((5, 6), (1, 1))]);
        let b = pts(&[(1, 3), (1, 2), (13, 14)]);
        let (grid, la, lb) = lift_pair(&a, &b).unwrap();
        assert_eq!(grid.scalar(sweep(la.as_slice(), lb.as_slice())), sweep(&a, &b));
        assert_eq!(grid.scalar(sweep(lb.as_slice(), la.as_slice())), sweep(&b, &a));
        let huge = CompactSet1D::points(vec![Scalar::zero(), Scalar::pow10_neg(40)]).unwrap();
        assert!(lift_pair(&huge, &b).is_none());
        assert_eq!(hausdorff_distance(&huge, &b), Scalar::max_of(&sweep(&huge, &b), &sweep(&b, &huge)));
    }

    fn ivs(v: &[Ends]) -> CompactSet1D {
        CompactSet1D::intervals(
            v.iter()
                .map(|&((a, b), (c, d))| Interval::new(q(a, b), q(c, d)).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn hausdorff_examples() {
        let a = pts(&[(1, 3), (1, 2)]);
        assert_eq!(hausdorff_distance(&a, &a), Scalar::zero());
        assert_eq!(hausdorff_distance(&pts(&[(0, 1)]), &pts(&[(1, 1)])), Scalar::one());
        assert_eq!(hausdorff_distance(&pts(&[(0, 1), (1, 1)]), &pts(&[(1, 2)])), q(1, 2));
    }

    #[test]
    fn hausdorff_interval_gap_midpoint() {
        // [0,1] against [0,1/3] ∪ [2/3,1]: worst point is 1/2, at distance 1/6
        let cantor1 = ivs(&[((0, 1), (1, 3)), ((2, 3), (1, 1))]);
        let unit = CompactSet1D::unit_interval();
        assert_eq!(directed_hausdorff(&unit, &cantor1), q(1, 6));
        assert_eq!(directed_hausdorff(&cantor1, &unit), Scalar::zero());
        assert_eq!(hausdorff_distance(&unit, &cantor1), q(1, 6));
    }

    #[test]
    fn hausdorff_mixed_kinds() {
        let a = pts(&[(1, 10)]);
        let b = ivs(&[((0, 1), (1, 5))]);
        assert_eq!(hausdorff_distance(&a, &b), q(1, 10));
    }

    #[test]
    fn empty_sets_rejected() {
        assert!(CompactSet1D::points(vec![]).is_err());
        assert!(CompactSet1D::intervals(vec![]).is_err());
        assert!(CompactSetD::new(2, vec![]).is_err());
    }

    #[test]
    fn interval_union_validation() {
        let overlapping = vec![
            Interval::new(q(0, 1), q(1, 2)).unwrap(),
            Interval::new(q(1, 2), q(1, 1)).unwrap(),
        ];
        assert!(CompactSet1D::intervals(overlapping.clone()).is_err());
        let merged = CompactSet1D::from_intervals_normalized(overlapping).unwrap();
        assert_eq!(merged, CompactSet1D::unit_interval());
        assert!(CompactSet1D::points(vec![q(3, 2)]).is_err());
    }

    #[test]
    fn dilate_examples() {
        let d = dilate(&pts(&[(1, 2)]), &q(1, 10)).unwrap();
        assert_eq!(d, ivs(&[((2, 5), (3, 5))]));
        let d = dilate(&pts(&[(0, 1), (1, 1)]), &q(1, 4)).unwrap();
        assert_eq!(d, ivs(&[((0, 1), (1, 4)), ((3, 4), (1, 1))]));
        // overlapping neighbourhoods merge
        let d = dilate(&pts(&[(1, 4), (1, 2)]), &q(1, 8)).unwrap();
        assert_eq!(d, ivs(&[((1, 8), (5, 8))]));
        assert!(dilate(&pts(&[(1, 2)]), &q(-1, 2)).is_err());
    }

    #[test]
    fn dilated_components_have_minimum_length() {
        let c = ivs(&[((3, 10), (31, 100)), ((6, 10), (7, 10))]);
        let r = q(1, 50);
        let d = dilate(&c, &r).unwrap();
        for iv in d.to_intervals() {
            assert!(iv.length() >= q(1, 100) + &r + &r);
        }
    }

    #[test]
    fn subset_checks() {
        let big = ivs(&[((0, 1), (1, 3)), ((2, 3), (1, 1))]);
        assert!(pts(&[(0, 1), (1, 3), (3, 4)]).is_subset_of(&big));
        assert!(!pts(&[(1, 2)]).is_subset_of(&big));
        assert!(!CompactSet1D::unit_interval().is_subset_of(&big));
        assert!(big.is_subset_of(&CompactSet1D::unit_interval()));
    }

    #[test]
    fn scale_translate_examples() {
        let a = CompactSetD::new(1, vec![vec![q(0, 1)], vec![q(1, 1)]]).unwrap();
        let b = scale_translate(&a, &q(1, 2), &[q(1, 4)]).unwrap();
        assert_eq!(b, CompactSetD::new(1, vec![vec![q(1, 4)], vec![q(3, 4)]]).unwrap());
        assert_eq!(scale_translate(&a, &Scalar::one(), &[Scalar::zero()]).unwrap(), a);
        match scale_translate(&a, &Scalar::one(), &[q(1, 2)]) {
            Err(Error::OutOfRange { coordinate, .. }) => assert_eq!(coordinate, 0),
            other => panic!("expected range error, got {other:?}"),
        }
        let a2 = CompactSetD::new(2, vec![vec![q(0, 1), q(1, 1)]]).unwrap();
        match scale_translate(&a2, &Scalar::one(), &[q(0, 1), q(1, 10)]) {
            Err(Error::OutOfRange { coordinate, .. }) => assert_eq!(coordinate, 1),
            other => panic!("expected range error, got {other:?}"),
        }
    }

    #[test]
    fn embed_examples() {
        let a = pts(&[(0, 1), (1, 2)]);
        let e = embed(&a, 3, None).unwrap();
        let z = Scalar::zero();
        assert_eq!(
            e.points(),
            &[vec![z.clone(), z.clone(), z.clone()], vec![q(1, 2), z.clone(), z.clone()]]
        );
        let e1 = embed(&a, 1, None).unwrap();
        assert_eq!(e1.points(), &[vec![q(0, 1)], vec![q(1, 2)]]);
        assert!(embed(&CompactSet1D::unit_interval(), 2, None).is_err());
        let sampled = embed(&CompactSet1D::unit_interval(), 2, Some(&q(1, 4))).unwrap();
        assert_eq!(sampled.len(), 5);
    }

    #[test]
    fn hausdorff_d_squared() {
        let a = CompactSetD::new(2, vec![vec![q(0, 1), q(0, 1)]]).unwrap();
        let b = CompactSetD::new(2, vec![vec![q(3, 10), q(4, 10)]]).unwrap();
        let d = hausdorff_distance_d(&a, &b).unwrap();
        assert_eq!(d.squared, q(1, 4));
        assert_eq!(d.exact(), Some(q(1, 2)));
        assert_eq!(d.cmp_radius(&q(1, 2)), Ordering::Equal);
        let c = CompactSetD::new(3, vec![vec![q(0, 1), q(0, 1), q(0, 1)]]).unwrap();
        assert!(hausdorff_distance_d(&a, &c).is_err());
    }

    #[test]
    fn porosity_examples() {
        let a = ivs(&[((2, 5), (3, 5))]);
        let inside = porosity_ratio_line(&a, &q(1, 2), &q(1, 20)).unwrap();
        assert_eq!(inside.ratio, Scalar::zero());
        let outside = porosity_ratio_line(&a, &q(7, 10), &q(1, 20)).unwrap();
        assert_eq!(outside.ratio, Scalar::one());
        assert_eq!(outside.gap_center, q(7, 10));
        // boundary point of A: the gap is one side of the ball
        let edge = porosity_ratio_line(&a, &q(3, 5), &q(1, 20)).unwrap();
        assert_eq!(edge.ratio, q(1, 2));
        assert!(porosity_ratio_line(&a, &q(1, 2), &Scalar::zero()).is_err());
    }

    #[test]
    fn porosity_interior_gap() {
        // A = {0} ∪ [1/3, 1], x = 1/3, R = 1/3: gap (0, 1/3) has radius 1/6
        let a = ivs(&[((0, 1), (0, 1)), ((1, 3), (1, 1))]);
        let r = porosity_ratio_line(&a, &q(1, 3), &q(1, 3)).unwrap();
        assert_eq!(r.gap_radius, q(1, 6));
        assert_eq!(r.gap_center, q(1, 6));
        assert_eq!(r.ratio, q(1, 2));
    }
}
