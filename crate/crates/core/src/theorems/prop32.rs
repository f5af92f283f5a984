//! A countable compact set `X = {0} ∪ {x_i}` that is the attractor of a weak
//! IFS yet has annulus counts growing too fast for any strict IFS.
//!
//! Annuli are `(t_{n+1}, t_n]` with `t_1 = 1/2` and `t_{n+1} = t_n − t_n²`.
//! Annulus `n` starts at `t_n` and holds `k_n` points whose `k_n` outgoing
//! gaps sum to `t_n²`, the last gap landing on `t_{n+1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperspace::{CompactSet1D, CompactSetD};
use crate::maps::{build_interpolant, is_weak_contraction_on, ContractionMap, Tail};
use crate::scalar::{q, Scalar};

/// Ratio bumps per annulus boundary before `k_{n+1}` is enlarged.
const RATIO_RETRIES: usize = 64;
/// Enlargements of a single annulus count.
const COUNT_RETRIES: usize = 8;

/// `f(x) = x − x²`.
pub fn annulus_map(x: &Scalar) -> Scalar {
    x - &(x * x)
}

/// `t_1, …, t_len`.
pub fn interval_recurrence(len: usize) -> Vec<Scalar> {
    let mut t = Vec::with_capacity(len);
    let mut cur = q(1, 2);
    for _ in 0..len {
        t.push(cur.clone());
        cur = annulus_map(&cur);
    }
    t
}

/// Smallest `k_n` with `k_n > n + n·Σ_{i<n} k_i`, given earlier counts.
pub fn minimal_count(n: usize, earlier: &[usize]) -> usize {
    let s: usize = earlier.iter().sum();
    n + n * s + 1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionTrace {
    /// every `x_i ∈ I_1`
    pub a: bool,
    /// strictly decreasing
    pub b: bool,
    /// consecutive gaps strictly decreasing
    pub c: bool,
    /// each annulus holds finitely many points, and exactly `k_n`
    pub d: bool,
    /// `k_n > n + n·Σ_{i<n} k_i`
    pub e: bool,
    /// `t_{n+1} = t_n − t_n²` with `t_1 = 1/2`
    pub recurrence: bool,
    /// `g(x_i) = x_{i+1}` for every `i` below the last point
    pub g_successor: bool,
    /// `h ≡ x_1`
    pub h_constant: bool,
    pub g_weak: bool,
    pub h_weak: bool,
}

impl ConditionTrace {
    pub fn all(&self) -> bool {
        self.a
            && self.b
            && self.c
            && self.d
            && self.e
            && self.recurrence
            && self.g_successor
            && self.h_constant
            && self.g_weak
            && self.h_weak
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnulusConstruction {
    pub annuli: usize,
    pub gap_ratio: Scalar,
    /// `t_1, …, t_{N+1}`; `I_n = [0, t_n]`.
    pub t: Vec<Scalar>,
    /// Final geometric ratio used in each annulus.
    pub ratios: Vec<Scalar>,
    pub counts: Vec<usize>,
    /// `x_1 > x_2 > …`
    pub points: Vec<Scalar>,
    pub g: ContractionMap,
    pub h: ContractionMap,
    pub conditions: ConditionTrace,
}

impl AnnulusConstruction {
    /// `{0} ∪ {x_i}`.
    pub fn truncated_set(&self) -> CompactSet1D {
        let mut pts = self.points.clone();
        pts.push(Scalar::zero());
        CompactSet1D::points(pts).expect("points lie in [0,1/2]")
    }

    pub fn intervals(&self) -> Vec<(Scalar, Scalar)> {
        self.t.iter().map(|t| (Scalar::zero(), t.clone())).collect()
    }
}

fn geometric_gaps(width: &Scalar, ratio: &Scalar, k: usize) -> Vec<Scalar> {
    let one = Scalar::one();
    let first = width * &(&one - ratio) / (&one - &ratio.pow(k as u32));
    let mut gaps = Vec::with_capacity(k);
    let mut g = first;
    for _ in 0..k {
        gaps.push(g.clone());
        g = &g * ratio;
    }
    gaps
}

fn bump(r: &Scalar) -> Scalar {
    (Scalar::one() + r).half()
}

/// Builds `N` annuli with minimal counts and geometric gaps of ratio `ρ`,
/// raising ratios towards 1 where a cross-annulus gap would grow.
pub fn build_prop32_set(annuli: usize, gap_ratio: &Scalar) -> Result<AnnulusConstruction> {
    if annuli < 2 {
        return Err(Error::InvalidArgument("need at least 2 annuli".into()));
    }
    if !gap_ratio.is_positive() || gap_ratio >= &Scalar::one() {
        return Err(Error::InvalidArgument(format!("gap ratio {gap_ratio} is outside (0,1)")));
    }
    let t = interval_recurrence(annuli + 1);
    let widths: Vec<Scalar> = t[..annuli].iter().map(|x| x * x).collect();

    let mut counts: Vec<usize> = Vec::with_capacity(annuli);
    for n in 1..=annuli {
        let k = minimal_count(n, &counts);
        counts.push(k);
    }
    let mut ratios = vec![gap_ratio.clone(); annuli];
    let mut gaps: Vec<Vec<Scalar>> =
        (0..annuli).map(|i| geometric_gaps(&widths[i], &ratios[i], counts[i])).collect();

    for b in 0..annuli - 1 {
        let mut enlargements = 0;
        loop {
            let mut tries = 0;
            while gaps[b].last() <= gaps[b + 1].first() && tries < RATIO_RETRIES {
                ratios[b] = bump(&ratios[b]);
                ratios[b + 1] = bump(&ratios[b + 1]);
                gaps[b] = geometric_gaps(&widths[b], &ratios[b], counts[b]);
                gaps[b + 1] = geometric_gaps(&widths[b + 1], &ratios[b + 1], counts[b + 1]);
                tries += 1;
            }
            if gaps[b].last() > gaps[b + 1].first() {
                break;
            }
            if enlargements == COUNT_RETRIES {
                return Err(Error::Construction(format!(
                    "condition (c) fails between annuli {} and {} after bounded retries",
                    b + 1,
                    b + 2
                )));
            }
            enlargements += 1;
            counts[b + 1] *= 2;
            for n in b + 2..annuli {
                counts[n] = counts[n].max(minimal_count(n + 1, &counts[..n]));
            }
            for n in b + 1..annuli {
                gaps[n] = geometric_gaps(&widths[n], &ratios[n], counts[n]);
            }
        }
    }

    let mut points = Vec::with_capacity(counts.iter().sum());
    for n in 0..annuli {
        let mut x = t[n].clone();
        for g in &gaps[n] {
            points.push(x.clone());
            x = &x - g;
        }
        debug_assert_eq!(x, t[n + 1]);
    }

    let mut knots = vec![(Scalar::zero(), Scalar::zero())];
    for i in (0..points.len() - 1).rev() {
        knots.push((points[i].clone(), points[i + 1].clone()));
    }
    let g = build_interpolant(&knots, Tail::Constant)?;
    let h = ContractionMap::constant(points[0].clone())?;

    let conditions = check_conditions(&t, &counts, &points, &g, &h)?;
    if !conditions.all() {
        return Err(Error::Construction(format!("condition trace fails: {conditions:?}")));
    }
    Ok(AnnulusConstruction {
        annuli,
        gap_ratio: gap_ratio.clone(),
        t,
        ratios,
        counts,
        points,
        g,
        h,
        conditions,
    })
}

fn check_conditions(
    t: &[Scalar],
    counts: &[usize],
    points: &[Scalar],
    g: &ContractionMap,
    h: &ContractionMap,
) -> Result<ConditionTrace> {
    let half = q(1, 2);
    let a = points.iter().all(|x| !x.is_negative() && x <= &half);
    let b = points.windows(2).all(|w| w[0] > w[1]);
    let gap_seq: Vec<Scalar> = points.windows(2).map(|w| &w[0] - &w[1]).collect();
    let c = gap_seq.windows(2).all(|w| w[0] > w[1]);
    let d = counts.iter().enumerate().all(|(n, &k)| {
        let inside = points.iter().filter(|x| *x > &t[n + 1] && *x <= &t[n]).count();
        inside == k
    });
    let mut e = true;
    for n in 1..=counts.len() {
        let s: usize = counts[..n - 1].iter().sum();
        if counts[n - 1] <= n + n * s {
            e = false;
        }
    }
    let recurrence = t[0] == half && t.windows(2).all(|w| w[1] == annulus_map(&w[0]));
    let g_successor = points.windows(2).all(|w| g.apply(&w[0]).is_ok_and(|y| y == w[1]));
    let sample = {
        let mut pts = points.to_vec();
        pts.push(Scalar::zero());
        CompactSet1D::points(pts)?
    };
    let h_constant = matches!(h.kind(), crate::maps::MapKind::Constant { c } if c == &points[0])
        && sample.endpoints().iter().all(|x| h.apply(x).is_ok_and(|y| y == points[0]));
    let g_weak = is_weak_contraction_on(g, &sample)?.holds;
    let h_weak = is_weak_contraction_on(h, &sample)?.holds;
    Ok(ConditionTrace { a, b, c, d, e, recurrence, g_successor, h_constant, g_weak, h_weak })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub label: String,
    pub lhs: String,
    pub relation: String,
    pub rhs: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountingVerdict {
    pub holds: bool,
    pub trace: Vec<Comparison>,
}

/// Evaluates `n > k·|F|` and `k·(|F| + Σ_{i<n} k_i) < n + n·Σ_{i<n} k_i < k_n`.
pub fn counting_check(f_size: usize, k: usize, counts: &[usize], n: usize) -> CountingVerdict {
    let mut trace = Vec::new();
    let mut push = |label: &str, lhs: u128, rel: &str, rhs: u128, holds: bool| {
        trace.push(Comparison {
            label: label.into(),
            lhs: lhs.to_string(),
            relation: rel.into(),
            rhs: rhs.to_string(),
            holds,
        });
        holds
    };
    let len_ok = push("n <= len(counts)", n as u128, "<=", counts.len() as u128, n >= 1 && n <= counts.len());
    if !len_ok {
        return CountingVerdict { holds: false, trace };
    }
    let (f, k, n_) = (f_size as u128, k as u128, n as u128);
    let s: u128 = counts[..n - 1].iter().map(|&c| c as u128).sum();
    let kn = counts[n - 1] as u128;
    let i = push("(i) n > k|F|", n_, ">", k * f, n_ > k * f);
    let lhs = k * (f + s);
    let mid = n_ + n_ * s;
    let left = push("k(|F| + S) < n + nS", lhs, "<", mid, lhs < mid);
    let right = push("n + nS < k_n", mid, "<", kn, mid < kn);
    CountingVerdict { holds: i && left && right, trace }
}

/// `F ∪ (w + δ·(X × {0}^{d−1}))` for the truncated `X`.
pub fn build_prop32_embedded(
    f: &CompactSetD,
    delta: &Scalar,
    construction: &AnnulusConstruction,
    w: &[Scalar],
) -> Result<CompactSetD> {
    if !f.contains(w) {
        return Err(Error::InvalidArgument("w is not a point of F".into()));
    }
    if !delta.is_positive() {
        return Err(Error::InvalidArgument("δ must be positive".into()));
    }
    if let Some(min_sq) = f.min_pairwise_sq() {
        let two_delta = delta + delta;
        if &two_delta * &two_delta >= min_sq {
            return Err(Error::Hypothesis(format!(
                "2δ = {two_delta} is not below the minimum pairwise distance of F"
            )));
        }
    }
    let mut pts: Vec<Vec<Scalar>> = f.points().to_vec();
    for x in construction.truncated_set().endpoints() {
        let mut p = w.to_vec();
        p[0] = &p[0] + &(delta * &x);
        pts.push(p);
    }
    CompactSetD::new(f.dim(), pts)
}
