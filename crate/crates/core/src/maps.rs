//! Self-maps of `[0,1]`: contractions and weak contractions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperspace::{CompactSet1D, Interval};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapKind {
    /// `x ↦ a·x + b`
    Affine { a: Scalar, b: Scalar },
    /// `x ↦ x − x²`
    QuadraticLogistic,
    /// Linear interpolation through breakpoints spanning `[0,1]`.
    PiecewiseLinear { breakpoints: Vec<(Scalar, Scalar)> },
    Constant { c: Scalar },
}

/// A self-map of `[0,1]` with its exact Lipschitz constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MapSpec", into = "MapSpec")]
pub struct ContractionMap {
    kind: MapKind,
    lip: Scalar,
    weak_only: bool,
}

/// File-format view of a map.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MapSpec {
    Affine { a: Scalar, b: Scalar },
    #[serde(alias = "logistic")]
    Quadratic,
    Piecewise { points: Vec<(Scalar, Scalar)> },
    Constant { c: Scalar },
}

impl TryFrom<MapSpec> for ContractionMap {
    type Error = Error;
    fn try_from(spec: MapSpec) -> Result<Self> {
        match spec {
            MapSpec::Affine { a, b } => ContractionMap::affine(a, b),
            MapSpec::Quadratic => Ok(ContractionMap::quadratic_logistic()),
            MapSpec::Piecewise { points } => ContractionMap::piecewise_linear(points),
            MapSpec::Constant { c } => ContractionMap::constant(c),
        }
    }
}

impl From<ContractionMap> for MapSpec {
    fn from(m: ContractionMap) -> Self {
        match m.kind {
            MapKind::Affine { a, b } => MapSpec::Affine { a, b },
            MapKind::QuadraticLogistic => MapSpec::Quadratic,
            MapKind::PiecewiseLinear { breakpoints } => MapSpec::Piecewise { points: breakpoints },
            MapKind::Constant { c } => MapSpec::Constant { c },
        }
    }
}

impl ContractionMap {
    pub fn affine(a: Scalar, b: Scalar) -> Result<Self> {
        let at0 = b.clone();
        let at1 = &a + &b;
        if !at0.in_unit_interval() || !at1.in_unit_interval() {
            return Err(Error::InvalidMap(format!("{a}·x + {b} does not map [0,1] into [0,1]")));
        }
        let lip = a.abs();
        Ok(ContractionMap { kind: MapKind::Affine { a, b }, lip, weak_only: false })
    }

    pub fn quadratic_logistic() -> Self {
        // sup |1 − 2x| over [0,1]; distances still strictly shrink
        ContractionMap { kind: MapKind::QuadraticLogistic, lip: Scalar::one(), weak_only: true }
    }

    pub fn constant(c: Scalar) -> Result<Self> {
        if !c.in_unit_interval() {
            return Err(Error::InvalidMap(format!("constant {c} is outside [0,1]")));
        }
        Ok(ContractionMap { kind: MapKind::Constant { c }, lip: Scalar::zero(), weak_only: false })
    }

    /// Breakpoints must start at `x = 0`, end at `x = 1`, be strictly
    /// increasing in `x`, and have values in `[0,1]`.
    pub fn piecewise_linear(breakpoints: Vec<(Scalar, Scalar)>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidMap("piecewise-linear map needs two breakpoints".into()));
        }
        if !breakpoints[0].0.is_zero() || breakpoints[breakpoints.len() - 1].0 != Scalar::one() {
            return Err(Error::InvalidMap("breakpoints must span x = 0 to x = 1".into()));
        }
        for (i, (_, y)) in breakpoints.iter().enumerate() {
            if !y.in_unit_interval() {
                return Err(Error::InvalidMap(format!("breakpoint {i} has value {y} outside [0,1]")));
            }
        }
        let mut lip = Scalar::zero();
        for (i, w) in breakpoints.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidMap(format!("breakpoints {i} and {} are not increasing", i + 1)));
            }
            let s = ((&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0)).abs();
            if s > lip {
                lip = s;
            }
        }
        Ok(ContractionMap { kind: MapKind::PiecewiseLinear { breakpoints }, lip, weak_only: false })
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn lipschitz_constant(&self) -> &Scalar {
        &self.lip
    }

    /// True when the Lipschitz constant is `>= 1` yet distinct points still
    /// move strictly closer.
    pub fn weak_only(&self) -> bool {
        self.weak_only
    }

    pub fn is_contraction(&self) -> bool {
        self.lip < Scalar::one()
    }

    pub fn is_weak_contraction(&self) -> bool {
        self.is_contraction() || self.weak_only
    }

    pub fn is_affine_like(&self) -> bool {
        matches!(self.kind, MapKind::Affine { .. } | MapKind::Constant { .. })
    }

    pub fn apply(&self, x: &Scalar) -> Result<Scalar> {
        if !x.in_unit_interval() {
            return Err(Error::Domain(x.to_string()));
        }
        Ok(self.eval(x))
    }

    /// Evaluation without the domain check; callers guarantee `x ∈ [0,1]`.
    pub(crate) fn eval(&self, x: &Scalar) -> Scalar {
        match &self.kind {
            MapKind::Affine { a, b } => a * x + b,
            MapKind::QuadraticLogistic => x - x * x,
            MapKind::Constant { c } => c.clone(),
            MapKind::PiecewiseLinear { breakpoints } => {
                let idx = breakpoints.partition_point(|(bx, _)| bx < x);
                if idx < breakpoints.len() && &breakpoints[idx].0 == x {
                    return breakpoints[idx].1.clone();
                }
                let (x0, y0) = &breakpoints[idx - 1];
                let (x1, y1) = &breakpoints[idx];
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    }

    /// Image of a closed interval, for affine and constant maps.
    pub fn image_interval(&self, iv: &Interval) -> Option<Interval> {
        match &self.kind {
            MapKind::Affine { a, b } => {
                let p = a * &iv.lo + b;
                let q = a * &iv.hi + b;
                Some(if p <= q { Interval { lo: p, hi: q } } else { Interval { lo: q, hi: p } })
            }
            MapKind::Constant { c } => Some(Interval::point(c.clone())),
            _ => None,
        }
    }
}

/// Verdict of a pairwise strict-decrease check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakContractionVerdict {
    pub holds: bool,
    pub pairs_checked: usize,
    pub violation: Option<(Scalar, Scalar)>,
}

/// Checks `|f(x) − f(y)| < |x − y|` on every distinct pair of `sample`.
pub fn is_weak_contraction_on(f: &ContractionMap, sample: &CompactSet1D) -> Result<WeakContractionVerdict> {
    let pts = sample.endpoints();
    if pts.len() < 2 {
        return Err(Error::InvalidArgument("weak-contraction check needs at least two points".into()));
    }
    let images: Vec<Scalar> = pts.iter().map(|x| f.eval(x)).collect();
    let mut checked = 0usize;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            checked += 1;
            if (&images[j] - &images[i]).abs() >= &pts[j] - &pts[i] {
                return Ok(WeakContractionVerdict {
                    holds: false,
                    pairs_checked: checked,
                    violation: Some((pts[i].clone(), pts[j].clone())),
                });
            }
        }
    }
    Ok(WeakContractionVerdict { holds: true, pairs_checked: checked, violation: None })
}

/// How an interpolant is extended outside the interpolated points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    /// Hold the boundary value.
    Constant,
    /// Continue the boundary segment, clamped to `[0,1]`.
    Clamp,
}

/// Piecewise-linear interpolant through `points` with every slope `< 1` in
/// absolute value, extended to `[0,1]` by `tail`.
pub fn build_interpolant(points: &[(Scalar, Scalar)], tail: Tail) -> Result<ContractionMap> {
    if points.is_empty() {
        return Err(Error::Interpolant { segment: 0, reason: "no points".into() });
    }
    for (i, (x, y)) in points.iter().enumerate() {
        if !x.in_unit_interval() || !y.in_unit_interval() {
            return Err(Error::Interpolant { segment: i, reason: format!("point ({x}, {y}) outside [0,1]²") });
        }
    }
    let one = Scalar::one();
    for (i, w) in points.windows(2).enumerate() {
        if w[1].0 <= w[0].0 {
            return Err(Error::Interpolant { segment: i, reason: "x values not strictly increasing".into() });
        }
        let slope = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
        if slope.abs() >= one {
            return Err(Error::Interpolant { segment: i, reason: format!("slope {slope} is not below 1 in absolute value") });
        }
    }
    let first_slope = points
        .windows(2)
        .next()
        .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0));
    let last_slope = points
        .windows(2)
        .last()
        .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0));

    let mut bps: Vec<(Scalar, Scalar)> = Vec::with_capacity(points.len() + 4);
    let (x0, y0) = &points[0];
    if !x0.is_zero() {
        match (tail, &first_slope) {
            (Tail::Clamp, Some(s)) if !s.is_zero() => {
                bps.extend(clamped_extension(x0, y0, s, &Scalar::zero()).into_iter().rev());
            }
            _ => bps.push((Scalar::zero(), y0.clone())),
        }
    }
    bps.extend(points.iter().cloned());
    let (xn, yn) = &points[points.len() - 1];
    if xn != &one {
        match (tail, &last_slope) {
            (Tail::Clamp, Some(s)) if !s.is_zero() => {
                bps.extend(clamped_extension(xn, yn, s, &one));
            }
            _ => bps.push((one.clone(), yn.clone())),
        }
    }
    ContractionMap::piecewise_linear(bps)
}

/// Breakpoints continuing the line through `(x, y)` with slope `s` towards
/// `end` (0 or 1), clamping values to `[0,1]`. Ordered from `x` outwards.
fn clamped_extension(x: &Scalar, y: &Scalar, s: &Scalar, end: &Scalar) -> Vec<(Scalar, Scalar)> {
    let at_end = y + s * (end - x);
    if at_end.in_unit_interval() {
        return vec![(end.clone(), at_end)];
    }
    let bound = if at_end.is_negative() { Scalar::zero() } else { Scalar::one() };
    let hit = x + (&bound - y) / s;
    vec![(hit, bound.clone()), (end.clone(), bound)]
}

/// A nonempty finite family of maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "IfsSpec", into = "IfsSpec")]
pub struct Ifs {
    maps: Vec<ContractionMap>,
    strict: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IfsSpec {
    pub maps: Vec<ContractionMap>,
}

impl TryFrom<IfsSpec> for Ifs {
    type Error = Error;
    fn try_from(spec: IfsSpec) -> Result<Self> {
        Ifs::new(spec.maps)
    }
}

impl From<Ifs> for IfsSpec {
    fn from(ifs: Ifs) -> Self {
        IfsSpec { maps: ifs.maps }
    }
}

impl Ifs {
    pub fn new(maps: Vec<ContractionMap>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidMap("an IFS needs at least one map".into()));
        }
        let strict = maps.iter().all(ContractionMap::is_contraction);
        Ok(Ifs { maps, strict })
    }

    pub fn maps(&self) -> &[ContractionMap] {
        &self.maps
    }

    /// Every map has Lipschitz constant `< 1`.
    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn is_weak(&self) -> bool {
        self.maps.iter().all(ContractionMap::is_weak_contraction)
    }

    /// `max_i Lip(s_i)`.
    pub fn lipschitz_constant(&self) -> Scalar {
        self.maps
            .iter()
            .map(|m| m.lip.clone())
            .max()
            .expect("nonempty IFS")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    type Knots = ((i64, i64), (i64, i64));

    fn pl(v: &[Knots]) -> Result<ContractionMap> {
        ContractionMap::piecewise_linear(v.iter().map(|&((a, b), (c, d))| (q(a, b), q(c, d))).collect())
    }

    #[test]
    fn apply_examples() {
        let f1 = ContractionMap::affine(q(1, 10), q(2, 10)).unwrap();
        assert_eq!(f1.apply(&Scalar::zero()).unwrap(), q(1, 5));
        let g = ContractionMap::quadratic_logistic();
        assert_eq!(g.apply(&q(1, 2)).unwrap(), q(1, 4));
        let c = ContractionMap::constant(q(3, 7)).unwrap();
        assert_eq!(c.apply(&q(9, 10)).unwrap(), q(3, 7));
        assert!(matches!(f1.apply(&q(11, 10)), Err(Error::Domain(_))));
        assert!(f1.apply(&q(-1, 10)).is_err());
    }

    #[test]
    fn lipschitz_examples() {
        let f2 = ContractionMap::affine(q(1, 10), q(7, 10)).unwrap();
        assert_eq!(f2.lipschitz_constant(), &q(1, 10));
        assert_eq!(ContractionMap::quadratic_logistic().lipschitz_constant(), &Scalar::one());
        let p = pl(&[((0, 1), (0, 1)), ((1, 2), (1, 4)), ((1, 1), (1, 4))]).unwrap();
        assert_eq!(p.lipschitz_constant(), &q(1, 2));
        assert_eq!(ContractionMap::constant(q(1, 2)).unwrap().lipschitz_constant(), &Scalar::zero());
        let flip = ContractionMap::affine(q(-1, 2), q(1, 2)).unwrap();
        assert_eq!(flip.lipschitz_constant(), &q(1, 2));
    }

    #[test]
    fn invalid_maps_rejected() {
        assert!(ContractionMap::affine(q(1, 2), q(3, 4)).is_err());
        assert!(ContractionMap::constant(q(2, 1)).is_err());
        assert!(pl(&[((0, 1), (0, 1)), ((1, 2), (1, 1))]).is_err());
        assert!(pl(&[((0, 1), (0, 1)), ((0, 1), (1, 2)), ((1, 1), (1, 1))]).is_err());
    }

    #[test]
    fn weak_only_flag() {
        assert!(ContractionMap::quadratic_logistic().weak_only());
        assert!(!ContractionMap::affine(q(1, 3), q(0, 1)).unwrap().weak_only());
        let id = ContractionMap::affine(Scalar::one(), Scalar::zero()).unwrap();
        assert!(!id.weak_only());
        assert!(!id.is_weak_contraction());
    }

    #[test]
    fn weak_contraction_checks() {
        let s = CompactSet1D::points(vec![q(1, 4), q(1, 2), q(3, 4)]).unwrap();
        let v = is_weak_contraction_on(&ContractionMap::quadratic_logistic(), &s).unwrap();
        assert!(v.holds);
        assert_eq!(v.pairs_checked, 3);

        let ident_seg = pl(&[((0, 1), (0, 1)), ((1, 2), (1, 2)), ((1, 1), (1, 2))]).unwrap();
        let on_seg = CompactSet1D::points(vec![q(1, 8), q(3, 8)]).unwrap();
        let v = is_weak_contraction_on(&ident_seg, &on_seg).unwrap();
        assert!(!v.holds);
        assert_eq!(v.violation, Some((q(1, 8), q(3, 8))));

        let c = ContractionMap::constant(q(1, 3)).unwrap();
        assert!(is_weak_contraction_on(&c, &s).unwrap().holds);

        let single = CompactSet1D::points(vec![q(1, 2)]).unwrap();
        assert!(is_weak_contraction_on(&c, &single).is_err());
    }

    #[test]
    fn interpolant_basics() {
        let g = build_interpolant(&[(q(0, 1), q(0, 1)), (q(1, 1), q(1, 2))], Tail::Constant).unwrap();
        assert_eq!(g.lipschitz_constant(), &q(1, 2));
        assert_eq!(g.apply(&q(1, 3)).unwrap(), q(1, 6));

        let g = build_interpolant(&[(q(1, 4), q(1, 8)), (q(1, 2), q(1, 4))], Tail::Constant).unwrap();
        assert_eq!(g.apply(&q(1, 4)).unwrap(), q(1, 8));
        assert_eq!(g.apply(&q(1, 2)).unwrap(), q(1, 4));
        assert_eq!(g.apply(&Scalar::zero()).unwrap(), q(1, 8));
        assert_eq!(g.apply(&Scalar::one()).unwrap(), q(1, 4));

        let g = build_interpolant(&[(q(1, 4), q(1, 8)), (q(1, 2), q(1, 4))], Tail::Clamp).unwrap();
        assert_eq!(g.apply(&Scalar::zero()).unwrap(), Scalar::zero());
        assert_eq!(g.apply(&Scalar::one()).unwrap(), q(1, 2));
        assert_eq!(g.lipschitz_constant(), &q(1, 2));
    }

    #[test]
    fn interpolant_clamps_at_bounds() {
        // slope 9/10 from (1/2, 9/10) would exceed 1 before x = 1
        let g = build_interpolant(&[(q(0, 1), q(9, 20)), (q(1, 2), q(9, 10))], Tail::Clamp).unwrap();
        assert_eq!(g.apply(&Scalar::one()).unwrap(), Scalar::one());
        assert_eq!(g.apply(&q(11, 18)).unwrap(), Scalar::one());
        assert_eq!(g.lipschitz_constant(), &q(9, 10));
    }

    #[test]
    fn interpolant_errors_name_segment() {
        let err = build_interpolant(&[(q(0, 1), q(0, 1)), (q(1, 4), q(1, 4)), (q(1, 2), q(1, 4))], Tail::Constant)
            .unwrap_err();
        assert!(matches!(err, Error::Interpolant { segment: 0, .. }));
        let err = build_interpolant(&[(q(1, 2), q(0, 1)), (q(1, 4), q(1, 8))], Tail::Constant).unwrap_err();
        assert!(matches!(err, Error::Interpolant { segment: 0, .. }));
    }

    #[test]
    fn ifs_strictness() {
        let cantor = Ifs::new(vec![
            ContractionMap::affine(q(1, 3), Scalar::zero()).unwrap(),
            ContractionMap::affine(q(1, 3), q(2, 3)).unwrap(),
        ])
        .unwrap();
        assert!(cantor.is_strict());
        assert_eq!(cantor.lipschitz_constant(), q(1, 3));
        let weak = Ifs::new(vec![ContractionMap::quadratic_logistic()]).unwrap();
        assert!(!weak.is_strict());
        assert!(weak.is_weak());
        assert!(Ifs::new(vec![]).is_err());
    }

    #[test]
    fn ifs_file_format() {
        let json = r#"{"maps":[{"kind":"affine","a":"1/10","b":"2/10"},{"kind":"quadratic"},
            {"kind":"constant","c":"1/2"},{"kind":"piecewise","points":[["0","0"],["1","1/2"]]}]}"#;
        let ifs: Ifs = serde_json::from_str(json).unwrap();
        assert_eq!(ifs.maps().len(), 4);
        assert!(!ifs.is_strict());
        let out = serde_json::to_string(&ifs).unwrap();
        assert!(out.starts_with(r#"{"maps":[{"kind":"affine","a":"1/10","b":"1/5"}"#));
        assert!(serde_json::from_str::<Ifs>(r#"{"maps":[{"kind":"affine","a":0.1,"b":"0"}]}"#).is_err());
        assert!(serde_json::from_str::<Ifs>(r#"{"maps":[{"kind":"affine","a":"2","b":"0"}]}"#).is_err());
    }
}
