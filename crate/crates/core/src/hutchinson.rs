//! The Hutchinson operator and fixed-point solvers.

use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperspace::{hausdorff_distance, merge_intervals, CompactSet1D, Interval};
use crate::maps::{is_weak_contraction_on, Ifs, MapKind};
use crate::scalar::{Grid, Scalar};

/// Hard iteration cap for the strict solver.
pub const MAX_STRICT_ITERATIONS: usize = 10_000;

/// `S(A) = ⋃ s_i(A)`, renormalized.
///
/// Interval unions only admit affine and constant maps; point sets admit
/// every map kind.
pub fn hutchinson_apply(ifs: &Ifs, a: &CompactSet1D) -> Result<CompactSet1D> {
    match a {
        CompactSet1D::Points(pts) => {
            let images: Vec<Scalar> = ifs
                .maps()
                .par_iter()
                .flat_map_iter(|m| pts.iter().map(move |x| m.eval(x)))
                .collect();
            CompactSet1D::points(images)
        }
        CompactSet1D::Intervals(ivs) => {
            if let Some(bad) = ifs.maps().iter().position(|m| !m.is_affine_like()) {
                return Err(Error::Unsupported(format!(
                    "map {bad} is nonlinear; iterate a finite point set instead"
                )));
            }
            let merged = images_on_grid(ifs, ivs).unwrap_or_else(|| images_exact(ifs, ivs));
            Ok(CompactSet1D::Intervals(merged))
        }
    }
}

/// Interval images of affine-like maps, sorted and merged.
fn images_exact(ifs: &Ifs, ivs: &[Interval]) -> Vec<Interval> {
    let images: Vec<Interval> = ifs
        .maps()
        .par_iter()
        .flat_map_iter(|m| ivs.iter().map(move |iv| m.image_interval(iv).expect("affine-like map")))
        .collect();
    merge_intervals(images)
}

/// The interval images of affine and constant maps computed on a common
/// integer grid, sorted and merged; `None` when the grid would overflow.
fn images_on_grid(ifs: &Ifs, ivs: &[Interval]) -> Option<Vec<Interval>> {
    let zero = Scalar::zero();
    let coeffs: Vec<(&Scalar, &Scalar)> = ifs
        .maps()
        .iter()
        .map(|m| match m.kind() {
            MapKind::Affine { a, b } => Some((a, b)),
            MapKind::Constant { c } => Some((&zero, c)),
            _ => None,
        })
        .collect::<Option<_>>()?;
    let src = Grid::fit(ivs.iter().flat_map(|iv| [&iv.lo, &iv.hi]))?;
    // a·x + b with x = X / D lies on the grid lcm(den(a)·D, den(b))
    let mut den: i128 = 1;
    for (a, b) in &coeffs {
        for d in [a.denom().to_i128()?.checked_mul(src.den())?, b.denom().to_i128()?] {
            den = den.checked_mul(d / den.gcd(&d))?;
        }
    }
    let dst = Grid::with_den(den)?;
    let lifted: Vec<(i128, i128)> = ivs
        .iter()
        .map(|iv| Some((src.lift(&iv.lo)?, src.lift(&iv.hi)?)))
        .collect::<Option<_>>()?;
    let mut images = Vec::with_capacity(coeffs.len() * lifted.len());
    for (a, b) in &coeffs {
        let scale = a.numer().to_i128()?.checked_mul(den / (a.denom().to_i128()? * src.den()))?;
        let shift = dst.lift(b)?;
        for &(lo, hi) in &lifted {
            let p = scale.checked_mul(lo)?.checked_add(shift)?;
            let q = scale.checked_mul(hi)?.checked_add(shift)?;
            images.push(if p <= q { (p, q) } else { (q, p) });
        }
    }
    images.sort_unstable();
    let mut merged: Vec<(i128, i128)> = Vec::with_capacity(images.len());
    for (lo, hi) in images {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    Some(merged.into_iter().map(|(lo, hi)| Interval { lo: dst.scalar(lo), hi: dst.scalar(hi) }).collect())
}

/// Successive Hutchinson iterates `S(A), S²(A), …`.
pub struct Orbit<'a> {
    ifs: &'a Ifs,
    current: CompactSet1D,
}

impl<'a> Orbit<'a> {
    pub fn new(ifs: &'a Ifs, start: CompactSet1D) -> Self {
        Orbit { ifs, current: start }
    }
}

impl Iterator for Orbit<'_> {
    type Item = Result<CompactSet1D>;

    fn next(&mut self) -> Option<Self::Item> {
        match hutchinson_apply(self.ifs, &self.current) {
            Ok(next) => {
                self.current = next.clone();
                Some(Ok(next))
            }
            Err(e) => Some(Err(e)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttractorResult {
    pub attractor: CompactSet1D,
    pub iterations: usize,
    /// `L/(1−L)·d_H(A_{n−1}, A_n)`; absent for weak systems.
    pub a_posteriori_bound: Option<Scalar>,
    /// `d_H(A_{n−1}, A_n)` for every step taken.
    pub steps: Vec<Scalar>,
    pub converged: bool,
    pub stalled: bool,
}

impl AttractorResult {
    pub fn last_step(&self) -> Option<&Scalar> {
        self.steps.last()
    }
}

/// Banach iteration from `start` (default `[0,1]`) until the a-posteriori
/// bound `L/(1−L)·d_H(A_{n−1}, A_n)` is at most `tol`.
pub fn solve_attractor(ifs: &Ifs, tol: &Scalar, start: Option<CompactSet1D>) -> Result<AttractorResult> {
    if !ifs.is_strict() {
        return Err(Error::InvalidArgument(
            "IFS has a map with Lipschitz constant >= 1; use iterate_weak".into(),
        ));
    }
    if !tol.is_positive() {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let lip = ifs.lipschitz_constant();
    let factor = &lip / &(Scalar::one() - &lip);
    let mut prev = start.unwrap_or_else(CompactSet1D::unit_interval);
    let mut steps = Vec::new();
    for (n, next) in Orbit::new(ifs, prev.clone()).enumerate() {
        let next = next?;
        let step = hausdorff_distance(&prev, &next);
        let bound = &factor * &step;
        steps.push(step);
        prev = next;
        if &bound <= tol {
            return Ok(AttractorResult {
                attractor: prev,
                iterations: n + 1,
                a_posteriori_bound: Some(bound),
                steps,
                converged: true,
                stalled: false,
            });
        }
        if n + 1 >= MAX_STRICT_ITERATIONS {
            break;
        }
    }
    Err(Error::Construction(format!(
        "no convergence within {MAX_STRICT_ITERATIONS} iterations"
    )))
}

/// Best-effort iteration for weak systems: stops when a step is at most
/// `tol`, or flags `stalled` after `max_iter` steps.
pub fn iterate_weak(ifs: &Ifs, start: CompactSet1D, tol: &Scalar, max_iter: usize) -> Result<AttractorResult> {
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    if start.endpoints().len() >= 2 {
        for (i, m) in ifs.maps().iter().enumerate() {
            let verdict = is_weak_contraction_on(m, &start)?;
            if !verdict.holds {
                let (x, y) = verdict.violation.expect("violation recorded");
                return Err(Error::InvalidArgument(format!(
                    "map {i} is not a weak contraction on the start set: pair ({x}, {y})"
                )));
            }
        }
    }
    let mut prev = start;
    let mut steps = Vec::new();
    for (n, next) in Orbit::new(ifs, prev.clone()).take(max_iter).enumerate() {
        let next = next?;
        let step = hausdorff_distance(&prev, &next);
        let done = &step <= tol;
        steps.push(step);
        prev = next;
        if done {
            return Ok(AttractorResult {
                attractor: prev,
                iterations: n + 1,
                a_posteriori_bound: None,
                steps,
                converged: true,
                stalled: false,
            });
        }
    }
    Ok(AttractorResult {
        attractor: prev,
        iterations: max_iter,
        a_posteriori_bound: None,
        steps,
        converged: false,
        stalled: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::ContractionMap;
    use crate::scalar::q;

    fn affine(a: Scalar, b: Scalar) -> ContractionMap {
        ContractionMap::affine(a, b).unwrap()
    }

    #[test]
    fn grid_images_match_exact_images() {
        let ifs = Ifs::new(vec![
            affine(q(-2, 7), q(2, 7)),
            affine(q(1, 3), q(1, 2)),
            ContractionMap::constant(q(9, 10)).unwrap(),
        ])
        .unwrap();
        let mut a = CompactSet1D::intervals(vec![
            Interval::new(q(0, 1), q(1, 5)).unwrap(),
            Interval::new(q(3, 11), q(1, 1)).unwrap(),
        ])
        .unwrap();
        for _ in 0..4 {
            let CompactSet1D::Intervals(ivs) = &a else { unreachable!() };
            let grid = images_on_grid(&ifs, ivs).expect("small denominators fit");
            assert_eq!(grid, images_exact(&ifs, ivs));
            a = CompactSet1D::Intervals(grid);
        }
        // 10^-40 lifted onto a grid with denominator 10^41 overflows the bound
        let tiny = vec![Interval::new(Scalar::zero(), Scalar::pow10_neg(40)).unwrap()];
        let deep = Ifs::new(vec![affine(Scalar::pow10_neg(1), Scalar::zero())]).unwrap();
        assert!(images_on_grid(&deep, &tiny).is_none());
        assert_eq!(
            hutchinson_apply(&deep, &CompactSet1D::Intervals(tiny)).unwrap(),
            CompactSet1D::intervals(vec![Interval::new(Scalar::zero(), Scalar::pow10_neg(41)).unwrap()]).unwrap()
        );
    }

    fn cantor() -> Ifs {
        Ifs::new(vec![affine(q(1, 3), q(0, 1)), affine(q(1, 3), q(2, 3))]).unwrap()
    }

    fn iv(a: Scalar, b: Scalar) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn cantor_step() {
        let out = hutchinson_apply(&cantor(), &CompactSet1D::unit_interval()).unwrap();
        let want = CompactSet1D::intervals(vec![iv(q(0, 1), q(1, 3)), iv(q(2, 3), q(1, 1))]).unwrap();
        assert_eq!(out, want);
    }

    #[test]
    fn coded_pair_step() {
        let ifs = Ifs::new(vec![affine(q(1, 10), q(2, 10)), affine(q(1, 10), q(7, 10))]).unwrap();
        let out = hutchinson_apply(&ifs, &CompactSet1D::unit_interval()).unwrap();
        let want = CompactSet1D::intervals(vec![iv(q(1, 5), q(3, 10)), iv(q(7, 10), q(4, 5))]).unwrap();
        assert_eq!(out, want);
    }

    #[test]
    fn constant_map_collapses() {
        let ifs = Ifs::new(vec![ContractionMap::constant(q(2, 7)).unwrap()]).unwrap();
        let out = hutchinson_apply(&ifs, &CompactSet1D::unit_interval()).unwrap();
        assert_eq!(out, CompactSet1D::intervals(vec![Interval::point(q(2, 7))]).unwrap());
        let res = solve_attractor(&ifs, &q(1, 1000), None).unwrap();
        assert_eq!(res.iterations, 1);
        assert!(res.attractor.contains(&q(2, 7)));
        assert_eq!(res.attractor.len(), 1);
    }

    #[test]
    fn nonlinear_maps_need_points() {
        let ifs = Ifs::new(vec![ContractionMap::quadratic_logistic()]).unwrap();
        assert!(matches!(
            hutchinson_apply(&ifs, &CompactSet1D::unit_interval()),
            Err(Error::Unsupported(_))
        ));
        let pts = CompactSet1D::points(vec![q(1, 2)]).unwrap();
        assert_eq!(hutchinson_apply(&ifs, &pts).unwrap(), CompactSet1D::points(vec![q(1, 4)]).unwrap());
    }

    #[test]
    fn single_affine_map_fixed_point() {
        let ifs = Ifs::new(vec![affine(q(1, 2), q(1, 4))]).unwrap();
        let tol = q(1, 1 << 20);
        let res = solve_attractor(&ifs, &tol, None).unwrap();
        assert!(res.converged);
        assert!(res.attractor.contains(&q(1, 2)));
        assert!(hausdorff_distance(&res.attractor, &CompactSet1D::points(vec![q(1, 2)]).unwrap()) <= tol);
    }

    #[test]
    fn rejects_bad_arguments() {
        let weak = Ifs::new(vec![ContractionMap::quadratic_logistic()]).unwrap();
        assert!(solve_attractor(&weak, &q(1, 10), None).is_err());
        assert!(solve_attractor(&cantor(), &Scalar::zero(), None).is_err());
        let start = CompactSet1D::points(vec![q(1, 2)]).unwrap();
        assert!(iterate_weak(&weak, start, &q(1, 10), 0).is_err());
    }

    #[test]
    fn weak_iteration_single_step_stalls() {
        let weak = Ifs::new(vec![ContractionMap::quadratic_logistic()]).unwrap();
        let start = CompactSet1D::points(vec![q(1, 2), q(1, 4)]).unwrap();
        let res = iterate_weak(&weak, start.clone(), &q(1, 1000), 1).unwrap();
        assert!(res.stalled);
        assert_eq!(res.iterations, 1);
        assert_eq!(res.attractor, hutchinson_apply(&weak, &start).unwrap());
    }

    #[test]
    fn weak_iteration_steps_do_not_grow() {
        let weak = Ifs::new(vec![
            ContractionMap::quadratic_logistic(),
            ContractionMap::constant(q(1, 2)).unwrap(),
        ])
        .unwrap();
        let start = CompactSet1D::points(vec![q(1, 2)]).unwrap();
        let res = iterate_weak(&weak, start, &Scalar::zero(), 6).unwrap();
        for w in res.steps.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn weak_precondition_checked() {
        let id = Ifs::new(vec![affine(Scalar::one(), Scalar::zero())]).unwrap();
        let start = CompactSet1D::points(vec![q(1, 4), q(1, 2)]).unwrap();
        assert!(iterate_weak(&id, start, &q(1, 10), 3).is_err());
    }
}
