//! Cantor-like sets coded by sequences in `[−3/2, 3/2]`.
//!
//! A code assigns one shift to every node of the binary tree. The node at
//! level `n` owns the interval `[L, L + 10^{−n}]`, where
//!
//! ```text
//! L(child) = L(parent) + (2 | 7)·10^{−n} + v·10^{−n}
//! ```
//!
//! with `2` for a left child, `7` for a right child and `v` the node's entry.
//! The zero code reproduces the pair `x/10 + 2/10`, `x/10 + 7/10`.
//!
//! Entries use flat 1-based indices: level `n` occupies `2^n − 1 ..= 2^{n+1} − 2`,
//! and children of the node with in-level ordinal `o` have ordinals `2o` and
//! `2o + 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperspace::{CompactSet1D, Interval};
use crate::scalar::{q, Scalar};

/// Largest admissible shift magnitude.
pub fn max_shift() -> Scalar {
    q(3, 2)
}

/// Number of entries in a depth-`m` code: `Σ_{i=1}^{m} 2^i`.
pub fn code_len(depth: usize) -> usize {
    (1usize << (depth + 1)) - 2
}

/// Flat 1-based index range `(first, last)` of level `n`.
pub fn level_index_range(n: usize) -> Result<(usize, usize)> {
    if n < 1 {
        return Err(Error::InvalidArgument("levels start at 1".into()));
    }
    Ok(((1 << n) - 1, (1 << (n + 1)) - 2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Child {
    Left,
    Right,
}

impl Child {
    fn base_offset(self) -> i64 {
        match self {
            Child::Left => 2,
            Child::Right => 7,
        }
    }

    fn bit(self) -> usize {
        match self {
            Child::Left => 0,
            Child::Right => 1,
        }
    }
}

/// A node of the coding tree, addressed by its path from the root.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeAddress {
    path: Vec<Child>,
}

impl NodeAddress {
    pub fn new(path: Vec<Child>) -> Result<Self> {
        if path.is_empty() {
            return Err(Error::InvalidArgument("node address needs at least one step".into()));
        }
        Ok(NodeAddress { path })
    }

    /// Node `ordinal` (0-based, left to right) at `level`.
    pub fn from_ordinal(level: usize, ordinal: usize) -> Result<Self> {
        if level < 1 || ordinal >= 1 << level {
            return Err(Error::InvalidArgument(format!("no node {ordinal} at level {level}")));
        }
        let path = (0..level)
            .rev()
            .map(|shift| if (ordinal >> shift) & 1 == 0 { Child::Left } else { Child::Right })
            .collect();
        Ok(NodeAddress { path })
    }

    pub fn level(&self) -> usize {
        self.path.len()
    }

    pub fn path(&self) -> &[Child] {
        &self.path
    }

    /// Position within the level, 0-based.
    pub fn ordinal(&self) -> usize {
        self.path.iter().fold(0, |o, c| 2 * o + c.bit())
    }

    /// Flat 1-based code index.
    pub fn global_index(&self) -> usize {
        (1 << self.level()) - 1 + self.ordinal()
    }

    pub fn parent(&self) -> Option<NodeAddress> {
        if self.path.len() <= 1 {
            None
        } else {
            Some(NodeAddress { path: self.path[..self.path.len() - 1].to_vec() })
        }
    }

    pub fn last_step(&self) -> Child {
        *self.path.last().expect("nonempty path")
    }
}

/// A finite prefix of a code sequence, complete through `depth` levels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CodeFile", into = "CodeFile")]
pub struct Code {
    entries: Vec<Scalar>,
    depth: usize,
}

/// File format: `{"entries":["p/q",...],"depth":m}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodeFile {
    pub entries: Vec<Scalar>,
    pub depth: usize,
}

impl TryFrom<CodeFile> for Code {
    type Error = Error;
    fn try_from(f: CodeFile) -> Result<Self> {
        Code::from_prefix(f.entries, f.depth)
    }
}

impl From<Code> for CodeFile {
    fn from(c: Code) -> Self {
        CodeFile { entries: c.entries, depth: c.depth }
    }
}

impl Code {
    /// Exactly `code_len(depth)` entries, each in `[−3/2, 3/2]`.
    pub fn new(entries: Vec<Scalar>, depth: usize) -> Result<Self> {
        if entries.len() != code_len(depth) {
            return Err(Error::InvalidArgument(format!(
                "a depth-{depth} code has {} entries, got {}",
                code_len(depth),
                entries.len()
            )));
        }
        let bound = max_shift();
        for (i, e) in entries.iter().enumerate() {
            if e.abs() > bound {
                return Err(Error::InvalidArgument(format!("entry x_{} = {e} is outside [-3/2, 3/2]", i + 1)));
            }
        }
        Ok(Code { entries, depth })
    }

    /// Zero-pads `prefix` to a complete depth.
    pub fn from_prefix(mut prefix: Vec<Scalar>, depth: usize) -> Result<Self> {
        let len = code_len(depth);
        if prefix.len() > len {
            return Err(Error::InvalidArgument(format!(
                "{} entries do not fit in a depth-{depth} code",
                prefix.len()
            )));
        }
        prefix.resize(len, Scalar::zero());
        Code::new(prefix, depth)
    }

    pub fn zero(depth: usize) -> Self {
        Code { entries: vec![Scalar::zero(); code_len(depth)], depth }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    /// Entry `x_i`, 1-based.
    pub fn entry(&self, index: usize) -> &Scalar {
        &self.entries[index - 1]
    }

    pub fn node_entry(&self, addr: &NodeAddress) -> Result<&Scalar> {
        if addr.level() > self.depth {
            return Err(Error::InvalidArgument(format!(
                "level {} is deeper than the code depth {}",
                addr.level(),
                self.depth
            )));
        }
        Ok(self.entry(addr.global_index()))
    }

    /// Entries of level `n`, in ordinal order.
    pub fn level_entries(&self, n: usize) -> &[Scalar] {
        let (first, last) = level_index_range(n).expect("level >= 1");
        &self.entries[first - 1..last]
    }

    /// Same code, truncated or zero-padded to `depth`.
    pub fn resized(&self, depth: usize) -> Code {
        let mut entries = self.entries.clone();
        entries.resize(code_len(depth), Scalar::zero());
        Code { entries, depth }
    }

    /// True when every entry after flat position `k` is zero.
    pub fn zero_beyond(&self, k: usize) -> bool {
        self.entries.iter().skip(k).all(Scalar::is_zero)
    }

    /// Replaces the entries of level `n`.
    pub fn with_level(&self, n: usize, values: &[Scalar]) -> Result<Code> {
        if n < 1 || n > self.depth || values.len() != 1 << n {
            return Err(Error::InvalidArgument(format!("level {n} needs {} values", 1usize << n)));
        }
        let (first, _) = level_index_range(n)?;
        let mut entries = self.entries.clone();
        entries[first - 1..first - 1 + values.len()].clone_from_slice(values);
        Code::new(entries, self.depth)
    }
}

/// Left endpoints of every node, level by level.
#[derive(Clone, Debug, PartialEq)]
pub struct CodedSystem {
    code: Code,
    /// `lefts[n - 1][o]` is the left endpoint of node `o` at level `n`.
    lefts: Vec<Vec<Scalar>>,
}

impl CodedSystem {
    pub fn build(code: &Code, depth: usize) -> Result<Self> {
        if depth > code.depth() {
            return Err(Error::InvalidArgument(format!(
                "expansion depth {depth} exceeds code depth {}",
                code.depth()
            )));
        }
        let mut lefts: Vec<Vec<Scalar>> = Vec::with_capacity(depth);
        let mut parents = vec![Scalar::zero()];
        for n in 1..=depth {
            let unit = Scalar::pow10_neg(n as u32);
            let entries = code.level_entries(n);
            let mut level = Vec::with_capacity(parents.len() * 2);
            for (o, lp) in parents.iter().enumerate() {
                for child in [Child::Left, Child::Right] {
                    let v = &entries[2 * o + child.bit()];
                    let offset = Scalar::from_int(child.base_offset()) + v;
                    level.push(lp + &(&offset * &unit));
                }
            }
            lefts.push(level.clone());
            parents = level;
        }
        Ok(CodedSystem { code: code.clone(), lefts })
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    pub fn depth(&self) -> usize {
        self.lefts.len()
    }

    /// Intervals at level `n` (level 0 is `[0,1]`).
    pub fn level_intervals(&self, n: usize) -> Vec<Interval> {
        if n == 0 {
            return vec![Interval { lo: Scalar::zero(), hi: Scalar::one() }];
        }
        let len = Scalar::pow10_neg(n as u32);
        self.lefts[n - 1]
            .iter()
            .map(|l| Interval { lo: l.clone(), hi: l + &len })
            .collect()
    }

    pub fn node_interval(&self, addr: &NodeAddress) -> Result<Interval> {
        if addr.level() > self.depth() {
            return Err(Error::InvalidArgument(format!(
                "level {} is deeper than the expansion depth {}",
                addr.level(),
                self.depth()
            )));
        }
        let n = addr.level();
        let l = self.lefts[n - 1][addr.ordinal()].clone();
        let hi = &l + &Scalar::pow10_neg(n as u32);
        Ok(Interval { lo: l, hi })
    }

    pub fn expand(&self, depth: usize) -> Result<CompactSet1D> {
        if depth > self.depth() {
            return Err(Error::InvalidArgument(format!("depth {depth} exceeds {}", self.depth())));
        }
        CompactSet1D::intervals(self.level_intervals(depth))
    }
}

/// Interval of a node, computed directly from the recurrence.
pub fn node_interval(code: &Code, addr: &NodeAddress) -> Result<Interval> {
    if addr.level() > code.depth() {
        return Err(Error::InvalidArgument(format!(
            "level {} is deeper than the code depth {}",
            addr.level(),
            code.depth()
        )));
    }
    let mut lo = Scalar::zero();
    let mut ordinal = 0usize;
    for (i, step) in addr.path().iter().enumerate() {
        let n = i + 1;
        ordinal = 2 * ordinal + step.bit();
        let v = code.entry((1 << n) - 1 + ordinal);
        let offset = Scalar::from_int(step.base_offset()) + v;
        lo = &lo + &(&offset * &Scalar::pow10_neg(n as u32));
    }
    let hi = &lo + &Scalar::pow10_neg(addr.level() as u32);
    Ok(Interval { lo, hi })
}

/// Union of the `2^depth` level-`depth` intervals.
pub fn expand(code: &Code, depth: usize) -> Result<CompactSet1D> {
    CodedSystem::build(code, depth)?.expand(depth)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSeparation {
    pub level: usize,
    pub min_sibling_gap: Scalar,
    pub required_gap: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationFailure {
    pub level: usize,
    pub ordinal: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    pub depth: usize,
    pub levels: Vec<LevelSeparation>,
    pub failures: Vec<SeparationFailure>,
}

impl SeparationCertificate {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks every node through `depth`: each child lies in its parent's
/// containment box (`[1/20, 9/20]` or `[11/20, 19/20]` of the parent,
/// rescaled) and siblings are at least `10^{−(n+1)}` apart.
pub fn verify_separation(code: &Code, depth: usize) -> Result<SeparationCertificate> {
    let sys = CodedSystem::build(code, depth)?;
    let mut levels = Vec::with_capacity(depth);
    let mut failures = Vec::new();
    let boxes = [(q(1, 20), q(9, 20)), (q(11, 20), q(19, 20))];
    for n in 1..=depth {
        let parents = sys.level_intervals(n - 1);
        let children = sys.level_intervals(n);
        let parent_len = Scalar::pow10_neg(n as u32 - 1);
        let required = Scalar::pow10_neg(n as u32 + 1);
        let mut min_gap: Option<Scalar> = None;
        for (o, parent) in parents.iter().enumerate() {
            let left = &children[2 * o];
            let right = &children[2 * o + 1];
            for (b, child) in [left, right].into_iter().enumerate() {
                let lo = &parent.lo + &(&boxes[b].0 * &parent_len);
                let hi = &parent.lo + &(&boxes[b].1 * &parent_len);
                if !(lo <= child.lo && child.hi <= hi) {
                    failures.push(SeparationFailure {
                        level: n,
                        ordinal: 2 * o + b,
                        reason: format!("child [{}, {}] leaves its box [{lo}, {hi}]", child.lo, child.hi),
                    });
                }
                if !parent.contains_interval(child) {
                    failures.push(SeparationFailure {
                        level: n,
                        ordinal: 2 * o + b,
                        reason: "child not contained in parent".into(),
                    });
                }
            }
            let gap = &right.lo - &left.hi;
            if gap < required {
                failures.push(SeparationFailure {
                    level: n,
                    ordinal: 2 * o,
                    reason: format!("sibling gap {gap} below {required}"),
                });
            }
            if min_gap.as_ref().is_none_or(|m| &gap < m) {
                min_gap = Some(gap);
            }
        }
        levels.push(LevelSeparation {
            level: n,
            min_sibling_gap: min_gap.expect("at least one parent"),
            required_gap: required,
        });
    }
    Ok(SeparationCertificate { depth, levels, failures })
}

/// The bracket `Σ_{i=1}^{n−2} 2^i < k ≤ Σ_{i=1}^{n−1} 2^i` and
/// `ε = 1/(2·10^n)`.
pub fn epsilon_for_k(k: usize) -> Result<(usize, Scalar)> {
    if k < 1 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let mut n = 2usize;
    while k > (1usize << n) - 2 {
        n += 1;
    }
    let eps = Scalar::pow10_neg(n as u32).half();
    Ok((n, eps))
}

/// Code whose first `k` entries are midpoints of the given open intervals,
/// zero afterwards.
pub fn midpoint_code(intervals: &[(Scalar, Scalar)], total_depth: usize) -> Result<Code> {
    let bound = max_shift();
    let mut prefix = Vec::with_capacity(intervals.len());
    for (i, (lo, hi)) in intervals.iter().enumerate() {
        if lo >= hi {
            return Err(Error::InvalidArgument(format!("interval I_{} = ({lo}, {hi}) is degenerate", i + 1)));
        }
        if lo < &-&bound || hi > &bound {
            return Err(Error::InvalidArgument(format!("interval I_{} leaves [-3/2, 3/2]", i + 1)));
        }
        prefix.push(Scalar::midpoint(lo, hi));
    }
    Code::from_prefix(prefix, total_depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: Scalar, b: Scalar) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn index_ranges() {
        assert_eq!(level_index_range(1).unwrap(), (1, 2));
        assert_eq!(level_index_range(2).unwrap(), (3, 6));
        assert_eq!(level_index_range(3).unwrap(), (7, 14));
        assert!(level_index_range(0).is_err());
    }

    #[test]
    fn addresses_follow_listing() {
        use Child::*;
        let cases = [
            (vec![Left], 1),
            (vec![Right], 2),
            (vec![Left, Left], 3),
            (vec![Left, Right], 4),
            (vec![Right, Left], 5),
            (vec![Right, Right], 6),
            (vec![Left, Left, Left], 7),
        ];
        for (path, idx) in cases {
            let a = NodeAddress::new(path).unwrap();
            assert_eq!(a.global_index(), idx);
            assert_eq!(NodeAddress::from_ordinal(a.level(), a.ordinal()).unwrap(), a);
        }
    }

    #[test]
    fn node_interval_examples() {
        use Child::*;
        let left = NodeAddress::new(vec![Left]).unwrap();
        assert_eq!(node_interval(&Code::zero(2), &left).unwrap(), iv(q(1, 5), q(3, 10)));
        let all_min = Code::new(vec![q(-3, 2); code_len(1)], 1).unwrap();
        assert_eq!(node_interval(&all_min, &left).unwrap(), iv(q(1, 20), q(3, 20)));
        let mut e = vec![Scalar::zero(); code_len(2)];
        e[0] = q(1, 1);
        e[2] = q(-1, 1);
        let c = Code::new(e, 2).unwrap();
        let ll = NodeAddress::new(vec![Left, Left]).unwrap();
        assert_eq!(node_interval(&c, &ll).unwrap(), iv(q(31, 100), q(32, 100)));
        assert_eq!(CodedSystem::build(&c, 2).unwrap().node_interval(&ll).unwrap(), iv(q(31, 100), q(32, 100)));
        let deep = NodeAddress::new(vec![Left; 3]).unwrap();
        assert!(node_interval(&c, &deep).is_err());
    }

    #[test]
    fn expand_examples() {
        let z = Code::zero(2);
        assert_eq!(
            expand(&z, 1).unwrap(),
            CompactSet1D::intervals(vec![iv(q(1, 5), q(3, 10)), iv(q(7, 10), q(4, 5))]).unwrap()
        );
        assert_eq!(
            expand(&z, 2).unwrap(),
            CompactSet1D::intervals(vec![
                iv(q(11, 50), q(23, 100)),
                iv(q(27, 100), q(7, 25)),
                iv(q(18, 25), q(73, 100)),
                iv(q(77, 100), q(39, 50)),
            ])
            .unwrap()
        );
        assert_eq!(expand(&z, 0).unwrap(), CompactSet1D::unit_interval());
        assert!(expand(&z, 3).is_err());
    }

    #[test]
    fn separation_examples() {
        let z = Code::zero(1);
        let cert = verify_separation(&z, 1).unwrap();
        assert!(cert.holds());
        assert_eq!(cert.levels[0].min_sibling_gap, q(2, 5));
        let worst = Code::new(vec![q(3, 2), q(-3, 2)], 1).unwrap();
        let cert = verify_separation(&worst, 1).unwrap();
        assert!(cert.holds());
        assert_eq!(cert.levels[0].min_sibling_gap, q(1, 10));
        let sys = CodedSystem::build(&worst, 1).unwrap();
        let ivs = sys.level_intervals(1);
        assert_eq!(ivs[0].hi, q(9, 20));
        assert_eq!(ivs[1].lo, q(11, 20));
    }

    #[test]
    fn extreme_codes_match_stated_maps() {
        // constant −3/2 gives x/10 + 1/20 and x/10 + 11/20; constant 3/2 gives 7/20 and 17/20
        let lo = Code::new(vec![q(-3, 2); 2], 1).unwrap();
        let hi = Code::new(vec![q(3, 2); 2], 1).unwrap();
        let l = CodedSystem::build(&lo, 1).unwrap().level_intervals(1);
        let h = CodedSystem::build(&hi, 1).unwrap().level_intervals(1);
        assert_eq!((l[0].lo.clone(), l[1].lo.clone()), (q(1, 20), q(11, 20)));
        assert_eq!((h[0].lo.clone(), h[1].lo.clone()), (q(7, 20), q(17, 20)));
    }

    #[test]
    fn epsilon_bracket() {
        assert_eq!(epsilon_for_k(1).unwrap(), (2, q(1, 200)));
        assert_eq!(epsilon_for_k(2).unwrap(), (2, q(1, 200)));
        assert_eq!(epsilon_for_k(6).unwrap(), (3, q(1, 2000)));
        assert_eq!(epsilon_for_k(7).unwrap(), (4, q(1, 20000)));
        assert_eq!(epsilon_for_k(14).unwrap().0, 4);
        assert_eq!(epsilon_for_k(15).unwrap().0, 5);
        assert!(epsilon_for_k(0).is_err());
    }

    #[test]
    fn midpoint_codes() {
        let full = (q(-3, 2), q(3, 2));
        let c = midpoint_code(&[full.clone(), full], 3).unwrap();
        assert_eq!(c, Code::zero(3));
        let c = midpoint_code(&[(q(0, 1), q(1, 1))], 2).unwrap();
        assert_eq!(c.entry(1), &q(1, 2));
        assert!(c.zero_beyond(1));
        assert!(midpoint_code(&[(q(1, 2), q(1, 2))], 2).is_err());
        assert!(midpoint_code(&[(q(0, 1), q(2, 1))], 2).is_err());
    }

    #[test]
    fn code_validation_and_file() {
        assert!(Code::new(vec![Scalar::zero(); 3], 1).is_err());
        assert!(Code::new(vec![q(2, 1), Scalar::zero()], 1).is_err());
        let c: Code = serde_json::from_str(r#"{"entries":["1/2","-1"],"depth":2}"#).unwrap();
        assert_eq!(c.entries().len(), 6);
        assert_eq!(
            serde_json::to_string(&Code::zero(1)).unwrap(),
            r#"{"entries":["0","0"],"depth":1}"#
        );
        let r = c.resized(1);
        assert_eq!(r.entries(), &[q(1, 2), q(-1, 1)]);
        let w = c.with_level(2, &[q(1, 1), q(0, 1), q(0, 1), q(-1, 2)]).unwrap();
        assert_eq!(w.entry(6), &q(-1, 2));
        assert!(c.with_level(2, &[q(1, 1)]).is_err());
    }
}
