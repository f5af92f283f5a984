//! Tagged certificate files and bit-exact replay.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::prop32::{build_prop32_set, counting_check, AnnulusConstruction, CountingVerdict};
use super::prop33::{falsify_prop33, prop33_witness, FalsificationReport, StrongPorosityWitness};
use super::thm41::{thm41_witness_search, Thm41Certificate};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountingParams {
    pub f_size: usize,
    pub k: usize,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop32Certificate {
    pub construction: AnnulusConstruction,
    pub counting_params: CountingParams,
    pub counting: CountingVerdict,
}

impl Prop32Certificate {
    pub fn build(annuli: usize, gap_ratio: &Scalar, params: CountingParams) -> Result<Self> {
        let construction = build_prop32_set(annuli, gap_ratio)?;
        let counting = counting_check(params.f_size, params.k, &construction.counts, params.n);
        Ok(Prop32Certificate { construction, counting_params: params, counting })
    }

    pub fn holds(&self) -> bool {
        self.construction.conditions.all() && self.counting.holds
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop33Certificate {
    pub first_radius: Option<Scalar>,
    pub count: usize,
    pub seed: u64,
    pub attempts: usize,
    pub witness: StrongPorosityWitness,
    /// One report per step.
    pub falsification: Vec<FalsificationReport>,
}

impl Prop33Certificate {
    pub fn build(
        f: &crate::hyperspace::CompactSetD,
        x: &[Scalar],
        count: usize,
        first_radius: Option<Scalar>,
        attempts: usize,
        seed: u64,
    ) -> Result<Self> {
        let witness = prop33_witness(f, x, count, first_radius.clone())?;
        let falsification = (0..witness.steps.len())
            .map(|s| falsify_prop33(&witness, s, attempts, seed.wrapping_add(s as u64)))
            .collect::<Result<_>>()?;
        Ok(Prop33Certificate { first_radius, count, seed, attempts, witness, falsification })
    }

    pub fn holds(&self) -> bool {
        self.witness.holds() && self.falsification.iter().all(|r| r.counterexamples == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Certificate {
    Thm41(Thm41Certificate),
    Prop32(Prop32Certificate),
    Prop33(Prop33Certificate),
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Thm41(_) => "thm41",
            Certificate::Prop32(_) => "prop32",
            Certificate::Prop33(_) => "prop33",
        }
    }

    /// Every recorded check holds.
    pub fn holds(&self) -> bool {
        match self {
            Certificate::Thm41(c) => c.success,
            Certificate::Prop32(c) => c.holds(),
            Certificate::Prop33(c) => c.holds(),
        }
    }

    /// Recomputes the certificate from its recorded inputs.
    pub fn recompute(&self) -> Result<Certificate> {
        Ok(match self {
            Certificate::Thm41(c) => {
                Certificate::Thm41(thm41_witness_search(&c.e_code, c.k, &c.y, Some(c.depth))?)
            }
            Certificate::Prop32(c) => Certificate::Prop32(Prop32Certificate::build(
                c.construction.annuli,
                &c.construction.gap_ratio,
                c.counting_params.clone(),
            )?),
            Certificate::Prop33(c) => Certificate::Prop33(Prop33Certificate::build(
                &c.witness.base,
                &c.witness.removed,
                c.count,
                c.first_radius.clone(),
                c.attempts,
                c.seed,
            )?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub kind: String,
    pub matches: bool,
    /// JSON path of the first field that differs from the recomputation.
    pub first_difference: Option<String>,
    pub checks_hold: bool,
}

impl ReplayReport {
    pub fn passed(&self) -> bool {
        self.matches && self.checks_hold
    }
}

/// First differing JSON path between `a` and `b`, depth first.
pub fn first_difference(a: &Value, b: &Value) -> Option<String> {
    fn walk(a: &Value, b: &Value, path: &mut String) -> Option<String> {
        match (a, b) {
            (Value::Object(x), Value::Object(y)) => {
                for (k, va) in x {
                    let len = path.len();
                    if !path.is_empty() {
                        path.push('.');
                    }
                    path.push_str(k);
                    let found = match y.get(k) {
                        Some(vb) => walk(va, vb, path),
                        None => Some(path.clone()),
                    };
                    if found.is_some() {
                        return found;
                    }
                    path.truncate(len);
                }
                y.keys().find(|k| !x.contains_key(*k)).map(|k| {
                    if path.is_empty() {
                        k.clone()
                    } else {
                        format!("{path}.{k}")
                    }
                })
            }
            (Value::Array(x), Value::Array(y)) => {
                for (i, (va, vb)) in x.iter().zip(y).enumerate() {
                    let len = path.len();
                    path.push_str(&format!("[{i}]"));
                    if let Some(f) = walk(va, vb, path) {
                        return Some(f);
                    }
                    path.truncate(len);
                }
                (x.len() != y.len()).then(|| format!("{path}.length"))
            }
            _ => (a != b).then(|| if path.is_empty() { "<root>".to_string() } else { path.clone() }),
        }
    }
    walk(a, b, &mut String::new())
}

/// Recomputes `cert` from its inputs and compares every field.
pub fn replay(cert: &Certificate) -> Result<ReplayReport> {
    let fresh = cert.recompute()?;
    let to_value = |c: &Certificate| serde_json::to_value(c).map_err(|e| Error::Verification(e.to_string()));
    let diff = first_difference(&to_value(cert)?, &to_value(&fresh)?);
    Ok(ReplayReport {
        kind: cert.kind().to_string(),
        matches: diff.is_none(),
        first_difference: diff,
        checks_hold: cert.holds(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn diff_paths() {
        let a: Value = serde_json::json!({"a": [1, {"b": 2}], "c": 3});
        let b: Value = serde_json::json!({"a": [1, {"b": 5}], "c": 3});
        assert_eq!(first_difference(&a, &b).as_deref(), Some("a[1].b"));
        assert_eq!(first_difference(&a, &a), None);
        let c: Value = serde_json::json!({"a": [1], "c": 3});
        assert_eq!(first_difference(&a, &c).as_deref(), Some("a.length"));
    }

    #[test]
    fn prop32_round_trip_and_tamper() {
        let params = CountingParams { f_size: 1, k: 1, n: 2 };
        let cert = Certificate::Prop32(Prop32Certificate::build(2, &q(1, 2), params).unwrap());
        let json = serde_json::to_string(&cert).unwrap();
        assert!(json.starts_with(r#"{"kind":"prop32""#));
        let back: Certificate = serde_json::from_str(&json).unwrap();
        assert!(replay(&back).unwrap().passed());
        let Certificate::Prop32(mut bad) = back else { unreachable!() };
        bad.construction.counts[1] = 8;
        let rep = replay(&Certificate::Prop32(bad)).unwrap();
        assert_eq!(rep.first_difference.as_deref(), Some("construction.counts[1]"));
    }
}
