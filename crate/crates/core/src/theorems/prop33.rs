//! Strong-porosity witnesses at finite sets.
//!
//! For `x ∈ F` off the corner set, `G_n = (F∖{x}) ∪ {x − r_n e_c, x + r_n e_c}`
//! sits at Hausdorff distance exactly `r_n` from `F`, and the `|F| + 1` open
//! balls of radius `r_n` around its points are pairwise disjoint, so every
//! set within distance `< r_n` of `G_n` has more than `|F|` points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperspace::{hausdorff_distance_d, squared_distance, CompactSetD};
use crate::scalar::{q, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessStep {
    pub radius: Scalar,
    pub y: Vec<Scalar>,
    pub z: Vec<Scalar>,
    /// Squared `d_H(G_n, F)`.
    pub distance_sq: Scalar,
    pub balls_disjoint: bool,
    /// `r_n / d_H(G_n, F) = 1`
    pub ratio_is_one: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongPorosityWitness {
    pub base: CompactSetD,
    pub removed: Vec<Scalar>,
    /// Coordinate along which `y_n, z_n` are displaced.
    pub axis: usize,
    pub steps: Vec<WitnessStep>,
}

impl StrongPorosityWitness {
    /// `G_n` for the 0-based step index.
    pub fn g_set(&self, step: usize) -> CompactSetD {
        let s = &self.steps[step];
        let mut pts: Vec<Vec<Scalar>> =
            self.base.points().iter().filter(|p| **p != self.removed).cloned().collect();
        pts.push(s.y.clone());
        pts.push(s.z.clone());
        CompactSetD::new(self.base.dim(), pts).expect("witness points lie in the cube")
    }

    pub fn holds(&self) -> bool {
        self.steps.iter().all(|s| s.balls_disjoint && s.ratio_is_one && s.y != s.z)
            && self.steps.windows(2).all(|w| w[1].radius < w[0].radius)
    }
}

/// First coordinate strictly inside `(0,1)`; `None` on the corner set.
pub fn interior_axis(x: &[Scalar]) -> Option<usize> {
    let one = Scalar::one();
    x.iter().position(|c| c.is_positive() && c < &one)
}

/// `min(sep/4, dist(x_c, {0,1})/2)` where `sep` is the minimum pairwise
/// distance of `F`, rounded down to a power of two.
pub fn default_first_radius(f: &CompactSetD, x: &[Scalar]) -> Result<Scalar> {
    let c = interior_axis(x).ok_or_else(|| Error::Hypothesis("x lies in the corner set".into()))?;
    let edge = Scalar::min_of(&x[c], &(Scalar::one() - &x[c])).half();
    let mut r = Scalar::one();
    while r > edge {
        r = r.half();
    }
    if let Some(sep_sq) = f.min_pairwise_sq() {
        // 16 r² ≤ sep²
        while &(&r * &r) * &Scalar::from_int(16) > sep_sq {
            r = r.half();
        }
    }
    Ok(r)
}

fn balls_disjoint(centers: &[&Vec<Scalar>], r: &Scalar) -> bool {
    let four_r_sq = &(r * r) * &Scalar::from_int(4);
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            if squared_distance(centers[i], centers[j]) < four_r_sq {
                return false;
            }
        }
    }
    true
}

/// Builds `count` steps with `r_{n+1} = r_n / 2`, starting from `first_radius`
/// (or [`default_first_radius`]). Requires `3·r_1 ≤ min pairwise distance`.
pub fn prop33_witness(
    f: &CompactSetD,
    x: &[Scalar],
    count: usize,
    first_radius: Option<Scalar>,
) -> Result<StrongPorosityWitness> {
    if x.len() != f.dim() {
        return Err(Error::Incompatible(format!("point of dimension {} for a {}-dimensional set", x.len(), f.dim())));
    }
    if !f.contains(x) {
        return Err(Error::InvalidArgument("x is not a point of F".into()));
    }
    let axis = interior_axis(x)
        .ok_or_else(|| Error::Hypothesis("x lies in the corner set; no interior coordinate to move along".into()))?;
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let r1 = match first_radius {
        Some(r) => r,
        None => default_first_radius(f, x)?,
    };
    if !r1.is_positive() {
        return Err(Error::InvalidArgument("first radius must be positive".into()));
    }
    if let Some(sep_sq) = f.min_pairwise_sq() {
        let three_r = &r1 * &Scalar::from_int(3);
        if &three_r * &three_r > sep_sq {
            return Err(Error::Hypothesis(format!("3·r_1 = {three_r} exceeds the minimum pairwise distance of F")));
        }
    }
    if r1 > x[axis] || r1 > &Scalar::one() - &x[axis] {
        return Err(Error::Hypothesis(format!("r_1 = {r1} pushes the witness points out of [0,1]")));
    }

    let others: Vec<&Vec<Scalar>> = f.points().iter().filter(|p| p.as_slice() != x).collect();
    let mut steps = Vec::with_capacity(count);
    let mut r = r1;
    for _ in 0..count {
        let mut y = x.to_vec();
        let mut z = x.to_vec();
        y[axis] = &x[axis] - &r;
        z[axis] = &x[axis] + &r;
        let mut centers = others.clone();
        centers.push(&y);
        centers.push(&z);
        let disjoint = balls_disjoint(&centers, &r);
        let mut g_pts: Vec<Vec<Scalar>> = others.iter().map(|p| (*p).clone()).collect();
        g_pts.push(y.clone());
        g_pts.push(z.clone());
        let g = CompactSetD::new(f.dim(), g_pts)?;
        let d = hausdorff_distance_d(&g, f)?;
        let ratio_is_one = d.squared == &r * &r;
        steps.push(WitnessStep {
            radius: r.clone(),
            y,
            z,
            distance_sq: d.squared,
            balls_disjoint: disjoint,
            ratio_is_one,
        });
        r = r.half();
    }
    Ok(StrongPorosityWitness { base: f.clone(), removed: x.to_vec(), axis, steps })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FalsificationReport {
    pub step: usize,
    pub attempts: usize,
    /// Attempts with `d_H(H, G_n) < r_n`, which the disjoint balls forbid.
    pub counterexamples: usize,
    /// Attempts that met every ball but one.
    pub near_misses: usize,
}

/// Random `|F|`-point sets clustered near `G_n`: each attempt drops one ball
/// centre and jitters the rest by less than `r_n`, or draws uniform points.
pub fn falsify_prop33(witness: &StrongPorosityWitness, step: usize, attempts: usize, seed: u64) -> Result<FalsificationReport> {
    if step >= witness.steps.len() {
        return Err(Error::InvalidArgument(format!("witness has {} steps", witness.steps.len())));
    }
    let g = witness.g_set(step);
    let r = witness.steps[step].radius.clone();
    let dim = g.dim();
    let size = witness.base.len();
    let counts: Vec<(bool, bool)> = (0..attempts)
        .into_par_iter()
        .map(|a| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(a as u64);
            let centers = g.points();
            let mut pts = Vec::with_capacity(size);
            let uniform = rng.gen_ratio(1, 10);
            let drop = rng.gen_range(0..centers.len());
            const GRID: i64 = 1 << 20;
            for i in 0..size {
                let p: Vec<Scalar> = if uniform {
                    (0..dim).map(|_| q(rng.gen_range(0..=GRID), GRID)).collect()
                } else {
                    let c = &centers[if i >= drop { i + 1 } else { i }];
                    c.iter()
                        .map(|v| {
                            // |offset| < r / √d per coordinate keeps the point inside B(c, r)
                            let off = &r * &q(rng.gen_range(-999..=999), 1000 * dim as i64);
                            let w = v + &off;
                            Scalar::max_of(&Scalar::zero(), &Scalar::min_of(&w, &Scalar::one()))
                        })
                        .collect()
                };
                pts.push(p);
            }
            let h = CompactSetD::new(dim, pts).expect("clamped points");
            let d = hausdorff_distance_d(&h, &g).expect("same dimension");
            let counter = d.cmp_radius(&r) == std::cmp::Ordering::Less;
            (counter, !uniform)
        })
        .collect();
    Ok(FalsificationReport {
        step,
        attempts,
        counterexamples: counts.iter().filter(|c| c.0).count(),
        near_misses: counts.iter().filter(|c| c.1).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_example() {
        let f = CompactSetD::new(1, vec![vec![q(1, 2)]]).unwrap();
        let w = prop33_witness(&f, &[q(1, 2)], 4, Some(q(1, 8))).unwrap();
        assert!(w.holds());
        assert_eq!(w.steps[0].y, vec![q(3, 8)]);
        assert_eq!(w.steps[0].z, vec![q(5, 8)]);
        assert_eq!(w.steps[1].radius, q(1, 16));
        assert_eq!(w.g_set(0).len(), 2);
    }

    #[test]
    fn corner_points_rejected() {
        let f = CompactSetD::new(2, vec![vec![q(0, 1), q(1, 1)], vec![q(1, 2), q(1, 2)]]).unwrap();
        assert!(matches!(prop33_witness(&f, &[q(0, 1), q(1, 1)], 2, None), Err(Error::Hypothesis(_))));
        assert!(prop33_witness(&f, &[q(1, 2), q(1, 2)], 3, None).unwrap().holds());
        assert!(prop33_witness(&f, &[q(1, 4), q(1, 2)], 3, None).is_err());
    }

    #[test]
    fn separation_enforced() {
        let f = CompactSetD::new(1, vec![vec![q(1, 2)], vec![q(6, 10)]]).unwrap();
        assert!(prop33_witness(&f, &[q(1, 2)], 2, Some(q(1, 20))).is_err());
        assert!(prop33_witness(&f, &[q(1, 2)], 2, Some(q(1, 40))).unwrap().holds());
    }

    #[test]
    fn small_falsification() {
        let f = CompactSetD::new(1, vec![vec![q(1, 5)], vec![q(1, 2)], vec![q(4, 5)]]).unwrap();
        let w = prop33_witness(&f, &[q(1, 2)], 3, None).unwrap();
        let rep = falsify_prop33(&w, 2, 200, 7).unwrap();
        assert_eq!(rep.counterexamples, 0);
    }
}
