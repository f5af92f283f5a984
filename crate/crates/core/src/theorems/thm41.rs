//! Witness search showing that coded Cantor sets are not strongly porous in
//! the hyperspace: near any `Y` close to `E` there is a coded attractor `H`
//! with `d_H(Y, H) ≤ (99/100)·d_H(Y, E)`.
//!
//! With `δ = d_H(Y, E)` and `δ ∈ [1/(2·10^{j+1}), 1/(2·10^j))`, only the
//! level-`(j+2)` entries of `E` change. Each level-`(j+2)` interval `J_i`
//! is shifted by `v_i·10^{−(j+2)}` into `dilate(Y, 0.99δ)`, with `|v_i|`
//! kept above `10^j·δ` so that `H` differs from `E` at that scale.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coded_family::{epsilon_for_k, max_shift, Code, CodedSystem};
use crate::error::{Error, Result};
use crate::hyperspace::{dilate, hausdorff_distance, CompactSet1D, Interval};
use crate::scalar::{q, Scalar};

/// Auto-depth margin: `m = j + DEPTH_MARGIN`.
pub const DEPTH_MARGIN: usize = 6;
/// The search refuses depths below `j + MIN_DEPTH_MARGIN`.
pub const MIN_DEPTH_MARGIN: usize = 4;
const DEPTH_ROUNDS: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
}

fn check(checks: &mut Vec<Check>, name: &str, holds: bool) {
    checks.push(Check { name: name.into(), holds });
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thm41Witness {
    pub j: usize,
    /// `10^j·δ`
    pub band: Scalar,
    /// `(99/100)·δ`
    pub radius: Scalar,
    /// Components of `dilate(Y, radius)`.
    pub dilation: Vec<Interval>,
    /// `J_1, …, J_{2^{j+2}}`
    pub level_intervals: Vec<Interval>,
    /// Positive-length components of each `U_i`; the closures of its interior.
    pub admissible: Vec<Vec<Interval>>,
    /// Components of each `V_i`; endpoints on the band are excluded.
    pub selected: Vec<Vec<Interval>>,
    /// `v_i`, empty when some `V_i` is empty.
    pub choices: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thm41Certificate {
    pub k: usize,
    pub n: usize,
    pub epsilon: Scalar,
    pub depth: usize,
    /// `E`, padded to `depth`.
    pub e_code: Code,
    pub y: CompactSet1D,
    /// `d_H(Y, expand(E, depth))`
    pub delta: Scalar,
    pub witness: Option<Thm41Witness>,
    /// 1-based indices `i` with empty `U_i` or `V_i`.
    pub failed_indices: Vec<usize>,
    pub h_code: Code,
    /// `d_H(Y, expand(H, depth))`
    pub final_distance: Scalar,
    /// `10^{−depth}`
    pub slack: Scalar,
    /// `(99/100)·δ + slack`
    pub bound: Scalar,
    pub margin: Scalar,
    pub checks: Vec<Check>,
    pub success: bool,
}

/// `j` with `δ ∈ [1/(2·10^{j+1}), 1/(2·10^j))`.
pub fn bracket_level(delta: &Scalar) -> Result<usize> {
    if !delta.is_positive() || delta >= &q(1, 2) {
        return Err(Error::InvalidArgument(format!("δ = {delta} is outside (0, 1/2)")));
    }
    let mut j = 0usize;
    while delta < &Scalar::pow10_neg(j as u32 + 1).half() {
        j += 1;
    }
    Ok(j)
}

fn distance_at(e_code: &Code, y: &CompactSet1D, m: usize) -> Result<(Code, Scalar)> {
    let e = e_code.resized(m);
    let set = CodedSystem::build(&e, m)?.expand(m)?;
    let d = hausdorff_distance(y, &set);
    Ok((e, d))
}

/// Values `v ∈ [−3/2, 3/2]` with `J + v·w ⊆ D`, as positive-length pieces.
fn admissible_shifts(j_iv: &Interval, w: &Scalar, dilation: &[Interval]) -> Vec<Interval> {
    let bound = max_shift();
    let neg = -&bound;
    let reach_lo = &j_iv.lo - &(&bound * w);
    let reach_hi = &j_iv.hi + &(&bound * w);
    let start = dilation.partition_point(|c| c.hi < reach_lo);
    let mut out = Vec::new();
    for c in &dilation[start..] {
        if c.lo > reach_hi {
            break;
        }
        let lo = Scalar::max_of(&((&c.lo - &j_iv.lo) / w), &neg);
        let hi = Scalar::min_of(&((&c.hi - &j_iv.lo) / w - Scalar::one()), &bound);
        if lo < hi {
            out.push(Interval { lo, hi });
        }
    }
    out
}

fn clip(ivs: &[Interval], lo: Option<&Scalar>, hi: Option<&Scalar>) -> Vec<Interval> {
    ivs.iter()
        .filter_map(|iv| {
            let l = lo.map_or(iv.lo.clone(), |b| Scalar::max_of(&iv.lo, b));
            let h = hi.map_or(iv.hi.clone(), |b| Scalar::min_of(&iv.hi, b));
            (l < h).then_some(Interval { lo: l, hi: h })
        })
        .collect()
}

/// Parity rule: odd `i` prefers `[−3/2, −b)`, even `i` prefers `(b, 3/2]`;
/// otherwise anything outside `[−b, b]`.
fn select_band(index: usize, u: &[Interval], band: &Scalar) -> Vec<Interval> {
    let neg_band = -band;
    let below = clip(u, None, Some(&neg_band));
    let above = clip(u, Some(band), None);
    let preferred = if index % 2 == 1 { &below } else { &above };
    if !preferred.is_empty() {
        return preferred.clone();
    }
    let mut both = below;
    both.extend(above);
    both
}

fn widest_midpoint(v: &[Interval]) -> Option<Scalar> {
    let mut best: Option<&Interval> = None;
    for iv in v {
        if best.is_none_or(|b| iv.length() > b.length()) {
            best = Some(iv);
        }
    }
    best.map(Interval::midpoint)
}

/// Runs the witness search at `depth`, or at the self-consistent depth
/// `m = j + 6` when `depth` is `None`.
pub fn thm41_witness_search(e_code: &Code, k: usize, y: &CompactSet1D, depth: Option<usize>) -> Result<Thm41Certificate> {
    let (n, epsilon) = epsilon_for_k(k)?;
    if !e_code.zero_beyond(k) {
        return Err(Error::Hypothesis(format!("E has nonzero entries beyond position {k}")));
    }

    let (m, e, delta) = match depth {
        Some(m) => {
            let (e, d) = distance_at(e_code, y, m)?;
            (m, e, d)
        }
        None => {
            let mut m = n + DEPTH_MARGIN;
            let mut visited = vec![m];
            let (mut e, mut d) = distance_at(e_code, y, m)?;
            for _ in 0..DEPTH_ROUNDS {
                if d.is_zero() || d >= epsilon {
                    break;
                }
                let target = bracket_level(&d)? + DEPTH_MARGIN;
                if target == m {
                    break;
                }
                let cycle = visited.contains(&target);
                if cycle && target < m {
                    break;
                }
                m = target;
                visited.push(m);
                (e, d) = distance_at(e_code, y, m)?;
                if cycle {
                    break;
                }
            }
            (m, e, d)
        }
    };

    if delta >= epsilon {
        return Err(Error::Hypothesis(format!(
            "d_H(Y, E) = {delta} is not below ε = {epsilon}"
        )));
    }
    let slack = Scalar::pow10_neg(m as u32);
    let mut checks = Vec::new();

    if delta.is_zero() {
        check(&mut checks, "delta = 0 gives H = E", true);
        return Ok(Thm41Certificate {
            k,
            n,
            epsilon,
            depth: m,
            h_code: e.clone(),
            e_code: e,
            y: y.clone(),
            delta,
            witness: None,
            failed_indices: Vec::new(),
            final_distance: Scalar::zero(),
            bound: slack.clone(),
            margin: slack.clone(),
            slack,
            checks,
            success: true,
        });
    }

    let j = bracket_level(&delta)?;
    if m < j + MIN_DEPTH_MARGIN {
        return Err(Error::InvalidArgument(format!(
            "depth {m} is below j + {MIN_DEPTH_MARGIN} = {}",
            j + MIN_DEPTH_MARGIN
        )));
    }
    let lower = Scalar::pow10_neg(j as u32 + 1).half();
    let upper = Scalar::pow10_neg(j as u32).half();
    check(&mut checks, "0 < delta < epsilon", delta.is_positive() && delta < epsilon);
    check(&mut checks, "delta in [1/(2*10^(j+1)), 1/(2*10^j))", lower <= delta && delta < upper);
    check(&mut checks, "depth >= j + 4", m >= j + MIN_DEPTH_MARGIN);

    let level = j + 2;
    let w = Scalar::pow10_neg(level as u32);
    let band = &Scalar::pow10(j as u32) * &delta;
    let radius = &q(99, 100) * &delta;
    let hundredth = &delta - &radius;
    check(&mut checks, "delta/100 < 1/(2*10^(j+2))", hundredth < w.half());
    check(&mut checks, "3/(2*10^(j+2)) > |J_i| + delta/100", &q(3, 2) * &w > &w + &hundredth);

    let dilation = match dilate(y, &radius)? {
        CompactSet1D::Intervals(v) => v,
        CompactSet1D::Points(_) => unreachable!("dilation is an interval union"),
    };
    let two_r = &radius + &radius;
    let (zero, one) = (Scalar::zero(), Scalar::one());
    let unclipped_long = dilation
        .iter()
        .filter(|c| c.lo > zero && c.hi < one)
        .all(|c| c.length() >= two_r);
    check(&mut checks, "unclipped dilation components have length >= 2*radius > |J_i|", unclipped_long && two_r > w);

    let sys = CodedSystem::build(&e, level)?;
    let level_intervals = sys.level_intervals(level);
    let admissible: Vec<Vec<Interval>> =
        level_intervals.par_iter().map(|jv| admissible_shifts(jv, &w, &dilation)).collect();
    let selected: Vec<Vec<Interval>> = admissible
        .iter()
        .enumerate()
        .map(|(i, u)| select_band(i + 1, u, &band))
        .collect();
    let failed_indices: Vec<usize> = (0..admissible.len())
        .filter(|&i| admissible[i].is_empty() || selected[i].is_empty())
        .map(|i| i + 1)
        .collect();
    check(&mut checks, "every U_i has a component", admissible.iter().all(|u| !u.is_empty()));
    check(&mut checks, "every V_i has a component", selected.iter().all(|v| !v.is_empty()));

    if !failed_indices.is_empty() {
        let final_distance = delta.clone();
        let bound = &radius + &slack;
        return Ok(Thm41Certificate {
            k,
            n,
            epsilon,
            depth: m,
            h_code: e.clone(),
            e_code: e,
            y: y.clone(),
            margin: &bound - &final_distance,
            delta,
            witness: Some(Thm41Witness {
                j,
                band,
                radius,
                dilation,
                level_intervals,
                admissible,
                selected,
                choices: Vec::new(),
            }),
            failed_indices,
            final_distance,
            slack,
            bound,
            checks,
            success: false,
        });
    }

    let choices: Vec<Scalar> = selected.iter().map(|v| widest_midpoint(v).expect("nonempty V_i")).collect();
    let in_v = choices
        .iter()
        .zip(&selected)
        .all(|(x, v)| v.iter().any(|iv| &iv.lo < x && x < &iv.hi));
    let v_in_u = selected
        .iter()
        .zip(&admissible)
        .all(|(v, u)| v.iter().all(|iv| u.iter().any(|c| c.contains_interval(iv))));
    check(&mut checks, "v_i in V_i", in_v);
    check(&mut checks, "V_i within U_i", v_in_u);
    check(&mut checks, "|v_i| > 10^j*delta", choices.iter().all(|x| x.abs() > band));

    let h = e.with_level(level, &choices)?;
    let untouched = (1..=m).filter(|&l| l != level).all(|l| h.level_entries(l) == e.level_entries(l));
    check(&mut checks, "H agrees with E off level j+2", untouched);

    let h_sys = CodedSystem::build(&h, m)?;
    let dil_set = CompactSet1D::Intervals(dilation.clone());
    check(&mut checks, "expand(H, j+2) within dilate(Y, radius)", h_sys.expand(level)?.is_subset_of(&dil_set));
    let final_distance = hausdorff_distance(y, &h_sys.expand(m)?);
    let bound = &radius + &slack;
    check(&mut checks, "d_H(Y, expand(H, m)) <= radius + 10^-m", final_distance <= bound);

    let success = checks.iter().all(|c| c.holds);
    Ok(Thm41Certificate {
        k,
        n,
        epsilon,
        depth: m,
        e_code: e,
        y: y.clone(),
        delta,
        witness: Some(Thm41Witness { j, band, radius, dilation, level_intervals, admissible, selected, choices }),
        failed_indices: Vec::new(),
        h_code: h,
        margin: &bound - &final_distance,
        final_distance,
        slack,
        bound,
        checks,
        success,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleParams {
    /// `false` returns `expand(E, m)` itself.
    pub perturb: bool,
    /// Random points per sampled node, besides its two extreme points.
    pub interior_per_node: usize,
    /// Extra jittered points anywhere on `E`.
    pub extra_points: usize,
}

impl Default for SampleParams {
    fn default() -> Self {
        SampleParams { perturb: true, interior_per_node: 1, extra_points: 2 }
    }
}

/// `sample_y_trial` with trial 0 and default parameters.
pub fn sample_y(e_code: &Code, epsilon: &Scalar, m: usize, seed: u64) -> Result<CompactSet1D> {
    sample_y_trial(e_code, epsilon, m, seed, 0, &SampleParams::default())
}

/// Deterministic `Y` with `d_H(Y, expand(E, m)) ≤ 3η/2 < ε`.
///
/// `η` is log-uniform in `[ε/1000, ε/2)`. Every level-`q` node with
/// `10^{−q} ≤ η` contributes its extreme points in `expand(E, m)` plus
/// random interior points, each moved by less than `η`.
pub fn sample_y_trial(
    e_code: &Code,
    epsilon: &Scalar,
    m: usize,
    seed: u64,
    trial: u64,
    params: &SampleParams,
) -> Result<CompactSet1D> {
    if !epsilon.is_positive() {
        return Err(Error::InvalidArgument("ε must be positive".into()));
    }
    let e = e_code.resized(m);
    let sys = CodedSystem::build(&e, m)?;
    if !params.perturb {
        return sys.expand(m);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);

    let res_exp = m as u32 + 4;
    let unit = Scalar::pow10_neg(res_exp);
    let eps_units = (epsilon / &unit).floor_int();
    let eps_units: i64 = i64::try_from(eps_units).map_err(|_| Error::InvalidArgument("ε too large".into()))?;
    let lo_units = (eps_units / 1000).max(2);
    let hi_units = (eps_units / 2 - 1).max(lo_units);
    let u: f64 = rng.gen();
    let eta_f = (lo_units as f64) * ((hi_units as f64) / (lo_units as f64)).powf(u);
    let eta_units = (eta_f.floor() as i64).clamp(lo_units, hi_units);
    let eta = &Scalar::from_int(eta_units) * &unit;

    let mut depth_q = 0usize;
    while depth_q < m && Scalar::pow10_neg(depth_q as u32) > eta {
        depth_q += 1;
    }
    let leaves = sys.level_intervals(m);
    let per_node = 1usize << (m - depth_q);
    let leaf_len = Scalar::pow10_neg(m as u32);
    let jitter = |rng: &mut ChaCha8Rng, x: Scalar| -> Scalar {
        let off = rng.gen_range(-(eta_units - 1)..=(eta_units - 1));
        let v = &x + &(&Scalar::from_int(off) * &unit);
        Scalar::max_of(&Scalar::zero(), &Scalar::min_of(&v, &Scalar::one()))
    };
    let random_point = |rng: &mut ChaCha8Rng, from: usize, to: usize| -> Scalar {
        let leaf = &leaves[rng.gen_range(from..to)];
        &leaf.lo + &(&leaf_len * &q(rng.gen_range(0..=1000), 1000))
    };
    let mut pts = Vec::new();
    for node in 0..leaves.len() / per_node {
        let first = node * per_node;
        let last = first + per_node - 1;
        let l = leaves[first].lo.clone();
        let r = leaves[last].hi.clone();
        pts.push(jitter(&mut rng, l));
        pts.push(jitter(&mut rng, r));
        for _ in 0..params.interior_per_node {
            let p = random_point(&mut rng, first, last + 1);
            pts.push(jitter(&mut rng, p));
        }
    }
    for _ in 0..params.extra_points {
        let p = random_point(&mut rng, 0, leaves.len());
        pts.push(jitter(&mut rng, p));
    }
    CompactSet1D::points(pts)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thm41TrialConfig {
    pub k: usize,
    pub seed: u64,
    pub trials: usize,
    /// Fixed search depth; `None` selects `m = j + 6` per trial.
    pub depth: Option<usize>,
    pub sample: SampleParams,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thm41Summary {
    pub trials: usize,
    pub passed: usize,
    pub min_margin: Option<Scalar>,
    pub mean_margin: Option<Scalar>,
}

/// Sampling depth when the search depth is automatic.
pub fn default_sample_depth(n: usize) -> usize {
    n + 8
}

/// Runs independent trials in parallel; trial `t` draws from stream `t` of
/// the seeded generator.
pub fn run_thm41_trials(e_code: &Code, cfg: &Thm41TrialConfig) -> Result<(Vec<Thm41Certificate>, Thm41Summary)> {
    let (n, eps) = epsilon_for_k(cfg.k)?;
    let sample_depth = cfg.depth.unwrap_or_else(|| default_sample_depth(n));
    let certs: Vec<Thm41Certificate> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let y = sample_y_trial(e_code, &eps, sample_depth, cfg.seed, t as u64, &cfg.sample)?;
            let depth = if cfg.sample.perturb { cfg.depth } else { Some(sample_depth) };
            thm41_witness_search(e_code, cfg.k, &y, depth)
                .map_err(|err| Error::Verification(format!("trial {t}: {err}")))
        })
        .collect::<Result<_>>()?;
    let summary = summarize(&certs);
    Ok((certs, summary))
}

pub fn summarize(certs: &[Thm41Certificate]) -> Thm41Summary {
    let passed = certs.iter().filter(|c| c.success).count();
    let min_margin = certs.iter().map(|c| c.margin.clone()).min();
    let mean_margin = if certs.is_empty() {
        None
    } else {
        let total: Scalar = certs.iter().map(|c| c.margin.clone()).sum();
        Some(&total / &Scalar::from_int(certs.len() as i64))
    };
    Thm41Summary { trials: certs.len(), passed, min_margin, mean_margin }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coded_family::{expand, midpoint_code};

    fn e_k2(depth: usize) -> Code {
        let full = (q(-3, 2), q(3, 2));
        midpoint_code(&[(q(-1, 1), q(1, 2)), full], depth).unwrap()
    }

    #[test]
    fn brackets() {
        assert_eq!(bracket_level(&q(3, 1000)).unwrap(), 2);
        assert_eq!(bracket_level(&q(1, 2000)).unwrap(), 2);
        assert_eq!(bracket_level(&q(1, 200)).unwrap(), 1);
        assert!(bracket_level(&Scalar::zero()).is_err());
    }

    #[test]
    fn identity_case() {
        let e = e_k2(8);
        let y = expand(&e, 8).unwrap();
        let c = thm41_witness_search(&e, 2, &y, Some(8)).unwrap();
        assert!(c.success);
        assert!(c.delta.is_zero());
        assert_eq!(c.h_code, c.e_code);
    }

    #[test]
    fn far_sets_rejected() {
        let e = e_k2(6);
        let y = CompactSet1D::points(vec![q(1, 2)]).unwrap();
        assert!(matches!(thm41_witness_search(&e, 2, &y, Some(6)), Err(Error::Hypothesis(_))));
        let loud = Code::from_prefix(vec![q(0, 1), q(0, 1), q(1, 1)], 6).unwrap();
        assert!(matches!(thm41_witness_search(&loud, 2, &y, Some(6)), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn sampled_trials_pass() {
        let e = e_k2(2);
        let (n, eps) = epsilon_for_k(2).unwrap();
        assert_eq!(n, 2);
        for t in 0..4 {
            let y = sample_y_trial(&e, &eps, 10, 3, t, &SampleParams::default()).unwrap();
            let c = thm41_witness_search(&e, 2, &y, None).unwrap();
            assert!(c.success, "trial {t}: {:?}", c.checks);
            assert!(c.delta < eps && c.delta.is_positive());
            let j = c.witness.as_ref().unwrap().j;
            assert_eq!(c.depth, j + DEPTH_MARGIN);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let e = e_k2(2);
        let eps = q(1, 200);
        assert_eq!(sample_y(&e, &eps, 9, 11).unwrap(), sample_y(&e, &eps, 9, 11).unwrap());
        assert_ne!(sample_y(&e, &eps, 9, 11).unwrap(), sample_y(&e, &eps, 9, 12).unwrap());
    }
}
