//! JSON formats for quivers, representations, dimension vectors and weights,
//! plus atomic file output.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::IoError;
use crate::linalg::{c, CMat, C64};
use crate::quiver::{validate_quiver, DimVector, Quiver, QuiverSpec, StabilityParameter};
use crate::rep::Representation;

/// On-disk representation: edge matrices keyed by edge index, row-major,
/// complex entries as `[re, im]` with numbers or decimal strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepJson {
    pub quiver: QuiverSpec,
    pub dims: BTreeMap<String, usize>,
    #[serde(default)]
    pub mats: BTreeMap<String, Value>,
}

pub fn quiver_from_spec(spec: &QuiverSpec) -> Result<Quiver, IoError> {
    validate_quiver(spec).map(|(q, _)| q).map_err(|errs| {
        IoError::Format(errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))
    })
}

fn number(v: &Value) -> Result<f64, IoError> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| IoError::Format(format!("bad number {n}"))),
        Value::String(s) => s.trim().parse::<f64>().map_err(|_| IoError::Format(format!("bad numeric string '{s}'"))),
        other => Err(IoError::Format(format!("expected a number, found {other}"))),
    }
}

fn entry(v: &Value) -> Result<C64, IoError> {
    match v {
        Value::Array(p) if p.len() == 2 => Ok(c(number(&p[0])?, number(&p[1])?)),
        // A bare real number is accepted as a complex entry with zero imaginary part.
        Value::Number(_) | Value::String(_) => Ok(c(number(v)?, 0.0)),
        other => Err(IoError::Format(format!("expected [re, im], found {other}"))),
    }
}

/// Parses a row-major matrix of the given shape.
pub fn matrix_from_json(v: &Value, rows: usize, cols: usize) -> Result<CMat, IoError> {
    let rs = v.as_array().ok_or_else(|| IoError::Format("matrix must be an array of rows".into()))?;
    // An empty row list stands for any matrix with no entries.
    if rows * cols == 0 && rs.iter().all(|r| r.as_array().is_some_and(|r| r.is_empty())) {
        return Ok(CMat::zeros(rows, cols));
    }
    if rs.len() != rows {
        return Err(IoError::Format(format!("expected {rows} rows, found {}", rs.len())));
    }
    let mut m = CMat::zeros(rows, cols);
    for (i, r) in rs.iter().enumerate() {
        let r = r.as_array().ok_or_else(|| IoError::Format("matrix row must be an array".into()))?;
        if r.len() != cols {
            return Err(IoError::Format(format!("row {i}: expected {cols} entries, found {}", r.len())));
        }
        for (j, z) in r.iter().enumerate() {
            m[(i, j)] = entry(z)?;
        }
    }
    Ok(m)
}

pub fn matrix_to_json(m: &CMat) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect())).collect())
}

impl RepJson {
    pub fn to_rep(&self) -> Result<Representation, IoError> {
        let q = Arc::new(quiver_from_spec(&self.quiver)?);
        let dims = DimVector::from_map(&q, &self.dims)?;
        for key in self.mats.keys() {
            match key.parse::<usize>() {
                Ok(i) if i < q.num_edges() => {}
                _ => return Err(IoError::Format(format!("unknown edge index '{key}'"))),
            }
        }
        let mats = q
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let (r, cc) = (dims.0[e.head], dims.0[e.tail]);
                match self.mats.get(&i.to_string()) {
                    Some(v) => matrix_from_json(v, r, cc),
                    None => Ok(CMat::zeros(r, cc)),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Representation::new(q, dims, mats)?)
    }

    pub fn from_rep(x: &Representation) -> RepJson {
        RepJson {
            quiver: x.quiver.to_spec(),
            dims: x.dims.to_map(&x.quiver),
            mats: x.mats.iter().enumerate().map(|(i, m)| (i.to_string(), matrix_to_json(m))).collect(),
        }
    }
}

pub fn rep_to_json(x: &Representation) -> Value {
    serde_json::to_value(RepJson::from_rep(x)).expect("representation serializes")
}

pub fn rep_from_json(v: &Value) -> Result<Representation, IoError> {
    serde_json::from_value::<RepJson>(v.clone())?.to_rep()
}

/// Per-vertex square matrices keyed by vertex id.
pub fn blocks_to_json(q: &Quiver, blocks: &[CMat]) -> Value {
    Value::Object(q.vertices().iter().zip(blocks).map(|(v, b)| (v.clone(), matrix_to_json(b))).collect())
}

pub fn dims_from_json(q: &Quiver, v: &Value) -> Result<DimVector, IoError> {
    let map: BTreeMap<String, usize> = serde_json::from_value(v.get("dims").cloned().unwrap_or_else(|| v.clone()))?;
    Ok(DimVector::from_map(q, &map)?)
}

pub fn dims_to_json(q: &Quiver, d: &DimVector) -> Value {
    json!({ "dims": d.to_map(q) })
}

/// Weights given as numbers or as decimal / `p/q` strings.
pub fn weights_from_json(q: &Quiver, v: &Value) -> Result<StabilityParameter, IoError> {
    let obj = v.get("weights").unwrap_or(v).as_object().ok_or_else(|| IoError::Format("weights must be an object".into()))?;
    let mut map = BTreeMap::new();
    for (k, w) in obj {
        let s = match w {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            other => return Err(IoError::Format(format!("weight for '{k}' must be a number or string, found {other}"))),
        };
        map.insert(k.clone(), s);
    }
    Ok(StabilityParameter::from_map(q, &map)?)
}

pub fn weights_to_json(q: &Quiver, alpha: &StabilityParameter) -> Value {
    json!({ "weights": alpha.to_map(q) })
}

pub fn read_json(path: &Path) -> Result<Value, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::File { path: path.display().to_string(), source })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_rep(path: &Path) -> Result<Representation, IoError> {
    rep_from_json(&read_json(path)?)
}

/// Writes through a sibling temporary file and a rename, so readers never
/// see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), IoError> {
    let err = |source| IoError::File { path: path.display().to_string(), source };
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    fs::write(&tmp, contents).map_err(err)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        err(e)
    })
}

pub fn write_json(path: &Path, v: &Value) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    write_atomic(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn representation_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (q, d) = fixtures::hs2_quiver();
        let x = Representation::random(q, d, &mut rng);
        let back = rep_from_json(&rep_to_json(&x)).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn strings_and_missing_edges_are_accepted() {
        let v = json!({
            "quiver": {"vertices": ["inf", "1"], "edges": [{"tail": "inf", "head": "1", "label": "a"}, {"tail": "1", "head": "inf", "label": "b"}], "infinity": "inf", "pairs": [[0, 1]]},
            "dims": {"inf": 1, "1": 1},
            "mats": {"1": [[["1.5", "-0.25"]]]}
        });
        let x = rep_from_json(&v).unwrap();
        assert_eq!(x.mats[0], CMat::zeros(1, 1));
        assert_eq!(x.mats[1][(0, 0)], c(1.5, -0.25));
        assert!(x.quiver.pairs().is_some());
    }

    #[test]
    fn shape_errors_are_reported() {
        let v = json!({
            "quiver": {"vertices": ["1", "2"], "edges": [{"tail": "1", "head": "2", "label": "a"}]},
            "dims": {"1": 1, "2": 2},
            "mats": {"0": [[[1, 0]]]}
        });
        assert!(matches!(rep_from_json(&v), Err(IoError::Format(_))));
        let bad_edge = json!({
            "quiver": {"vertices": ["1"], "edges": []},
            "dims": {"1": 1},
            "mats": {"3": []}
        });
        assert!(matches!(rep_from_json(&bad_edge), Err(IoError::Format(_))));
    }

    #[test]
    fn weights_accept_rationals() {
        let q = fixtures::f1_quiver();
        let w = weights_from_json(&q, &json!({"weights": {"inf": "-1/2", "1": 0.5}})).unwrap();
        assert_eq!(w.to_f64(), vec![-0.5, 0.5]);
        assert_eq!(weights_from_json(&q, &weights_to_json(&q, &w)).unwrap(), w);
        let d = dims_from_json(&q, &json!({"dims": {"inf": 1, "1": 3}})).unwrap();
        assert_eq!(d, DimVector(vec![1, 3]));
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = std::env::temp_dir().join(format!("quiverflow-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join("out.json");
        write_json(&p, &json!({"a": 1})).unwrap();
        write_json(&p, &json!({"a": 2})).unwrap();
        assert_eq!(read_json(&p).unwrap(), json!({"a": 2}));
        assert_eq!(fs::read_dir(&dir).unwrap().count(), 1);
        fs::remove_dir_all(&dir).unwrap();
    }
}
