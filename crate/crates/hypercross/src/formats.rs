//! JSON and JSON-lines encodings of sequences, multi-indices, fields and problems.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use anyhow::{bail, Context, Result};
use hypercross_core::pde::{Complex, ProblemSpec, TrigFunction};
use hypercross_core::tensorfield::CoefficientField;
use hypercross_core::{Interval, MultiIndex, Tail, WeightSequence};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TailJson {
    #[default]
    Zero,
    Power {
        kappa: f64,
        q: f64,
    },
}

/// `{"head": [...], "tail": {"kind": "zero"}}` or `{"kind": "power", "kappa": .., "q": ..}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceJson {
    pub head: Vec<f64>,
    #[serde(default)]
    pub tail: TailJson,
}

impl SequenceJson {
    pub fn build(&self) -> Result<WeightSequence> {
        let tail = match self.tail {
            TailJson::Zero => Tail::Zero,
            TailJson::Power { kappa, q } => Tail::Power { kappa, q },
        };
        Ok(WeightSequence::new(self.head.clone(), tail)?)
    }

    pub fn from_sequence(b: &WeightSequence) -> Self {
        let tail = match b.tail() {
            Tail::Zero => TailJson::Zero,
            Tail::Power { kappa, q } => TailJson::Power { kappa, q },
        };
        Self { head: b.head().to_vec(), tail }
    }
}

pub fn parse_sequence(text: &str) -> Result<WeightSequence> {
    let raw: SequenceJson = serde_json::from_str(text).context("weight sequence JSON")?;
    raw.build()
}

pub fn read_sequence(path: &std::path::Path) -> Result<WeightSequence> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_sequence(&text)
}

/// `{"1": 2, "3": 1}`, keys in increasing dimension.
pub fn multiindex_to_json(s: &MultiIndex) -> Value {
    let map: serde_json::Map<String, Value> =
        s.entries().iter().map(|&(d, e)| (d.to_string(), Value::from(e))).collect();
    Value::Object(map)
}

pub fn multiindex_from_map(map: &BTreeMap<String, u32>) -> Result<MultiIndex> {
    let mut entries = Vec::with_capacity(map.len());
    for (d, &e) in map {
        let dim: u32 = d.parse().with_context(|| format!("dimension key {d:?}"))?;
        if e > 0 {
            entries.push((dim, e));
        }
    }
    entries.sort_unstable();
    Ok(MultiIndex::from_entries(entries)?)
}

pub fn interval_json(i: &Interval) -> Value {
    serde_json::json!([i.lo, i.hi])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub k: Vec<i64>,
    pub s: BTreeMap<String, u32>,
    pub value: f64,
}

/// Reads one `{k, s, value}` record per nonblank line.
pub fn read_field(reader: impl BufRead) -> Result<CoefficientField> {
    let mut field: Option<CoefficientField> = None;
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: FieldRecord =
            serde_json::from_str(&line).with_context(|| format!("field record on line {}", n + 1))?;
        let f = field.get_or_insert_with(|| CoefficientField::new(rec.k.len()));
        f.insert(rec.k, multiindex_from_map(&rec.s)?, rec.value)?;
    }
    field.context("the field file has no entries")
}

pub fn write_field(field: &CoefficientField, mut out: impl Write) -> Result<()> {
    for (idx, v) in field.iter() {
        let rec = serde_json::json!({"k": idx.k, "s": multiindex_to_json(&idx.s), "value": v});
        writeln!(out, "{rec}")?;
    }
    Ok(())
}

pub fn write_pairs(pairs: &[(Vec<i64>, MultiIndex)], mut out: impl Write) -> Result<()> {
    for (k, s) in pairs {
        writeln!(out, "{}", serde_json::json!({"k": k, "s": multiindex_to_json(s)}))?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmpTerm {
    pub k: Vec<i64>,
    pub amp: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeTerm {
    pub k: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// A real trigonometric polynomial as a sum of a constant, cosines, sines and raw modes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrigJson {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub cos: Vec<AmpTerm>,
    #[serde(default)]
    pub sin: Vec<AmpTerm>,
    #[serde(default)]
    pub modes: Vec<ModeTerm>,
}

impl TrigJson {
    pub fn build(&self, m: usize) -> Result<TrigFunction> {
        let mut g = TrigFunction::from_modes(m, self.modes.iter().map(|t| (t.k.clone(), Complex::new(t.re, t.im))))?;
        g = g.axpy(1.0, &TrigFunction::constant(m, self.constant));
        for t in &self.cos {
            check_len(&t.k, m)?;
            g = g.axpy(1.0, &TrigFunction::cosine(&t.k, t.amp)?);
        }
        for t in &self.sin {
            check_len(&t.k, m)?;
            g = g.axpy(1.0, &TrigFunction::sine(&t.k, t.amp)?);
        }
        Ok(g)
    }

    /// Every Fourier coefficient listed as a raw mode.
    pub fn from_function(g: &TrigFunction) -> Self {
        let modes = g.modes().map(|(k, c)| ModeTerm { k: k.clone(), re: c.re, im: c.im }).collect();
        Self { modes, ..Self::default() }
    }
}

fn check_len(k: &[i64], m: usize) -> Result<()> {
    if k.len() != m {
        bail!("frequency {k:?} does not have length {m}");
    }
    Ok(())
}

/// `{"m": 1, "abar": {...}, "psi": [...], "f": {...}, "r": .., "R": ..}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemJson {
    pub m: usize,
    pub abar: TrigJson,
    #[serde(default)]
    pub psi: Vec<TrigJson>,
    pub f: TrigJson,
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
}

impl ProblemJson {
    pub fn build(&self) -> Result<ProblemSpec> {
        let m = self.m;
        let psi = self.psi.iter().map(|p| p.build(m)).collect::<Result<Vec<_>>>()?;
        Ok(ProblemSpec::new(self.abar.build(m)?, psi, self.f.build(m)?, self.r, self.big_r)?)
    }

    pub fn from_spec(spec: &ProblemSpec) -> Self {
        Self {
            m: spec.m,
            abar: TrigJson::from_function(&spec.abar),
            psi: spec.psi.iter().map(TrigJson::from_function).collect(),
            f: TrigJson::from_function(&spec.f),
            r: spec.r,
            big_r: spec.big_r,
        }
    }
}

pub fn read_problem(path: &std::path::Path) -> Result<ProblemSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let raw: ProblemJson = serde_json::from_str(&text).context("problem JSON")?;
    raw.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_round_trip() {
        let b = parse_sequence(r#"{"head":[0.25,0.125],"tail":{"kind":"power","kappa":0.0625,"q":3}}"#).unwrap();
        assert_eq!(b.tail(), Tail::Power { kappa: 0.0625, q: 3.0 });
        let again = SequenceJson::from_sequence(&b).build().unwrap();
        assert_eq!(again, b);
        assert_eq!(parse_sequence(r#"{"head":[0.5]}"#).unwrap().tail(), Tail::Zero);
    }

    #[test]
    fn multiindex_keys_are_dimensions() {
        let s = MultiIndex::from_dense(&[2, 0, 3]);
        let v = multiindex_to_json(&s);
        assert_eq!(v.to_string(), r#"{"1":2,"3":3}"#);
        let map: BTreeMap<String, u32> = serde_json::from_value(v).unwrap();
        assert_eq!(multiindex_from_map(&map).unwrap(), s);
    }

    #[test]
    fn field_round_trip() {
        let mut f = CoefficientField::new(2);
        f.insert(vec![1, -2], MultiIndex::from_dense(&[0, 1]), 0.5).unwrap();
        f.insert(vec![3, 1], MultiIndex::zero(), -1.25).unwrap();
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        assert_eq!(read_field(buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn problem_from_terms() {
        let text = r#"{"m":1,"abar":{"constant":1,"cos":[{"k":[1],"amp":0.4}]},
            "f":{"sin":[{"k":[2],"amp":1}]},"r":0.5,"R":1.5}"#;
        let raw: ProblemJson = serde_json::from_str(text).unwrap();
        let spec = raw.build().unwrap();
        assert!((spec.abar.eval(&[0.0]) - 1.4).abs() < 1e-15);
        assert_eq!(ProblemJson::from_spec(&spec).build().unwrap(), spec);
    }
}
