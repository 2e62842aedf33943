//! Quiver combinatorics: vertices, edges, dimension vectors, stability
//! parameters and the structural constructions (doubling, framing, reversal,
//! handsaw).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::QuiverError;

/// A directed edge between two vertex indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub label: String,
}

/// A directed multigraph with string vertex ids, indexed edges and an
/// optional distinguished vertex of dimension one.
///
/// Doubled quivers carry a pairing: each pair `(a, r)` lists an original edge
/// `a` and its reversal `r`. The first entry plays the role of `A`, the second
/// of `B` in the complex moment map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    infinity: Option<usize>,
    pairs: Option<Vec<(usize, usize)>>,
}

/// Serialized form of a quiver. Also the input to [`validate_quiver`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuiverSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infinity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[usize; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub tail: String,
    pub head: String,
    #[serde(default)]
    pub label: String,
}

/// Outcome of a successful validation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Validation {
    pub vertices: usize,
    pub edges: usize,
    pub loop_free: bool,
    pub has_infinity: bool,
    pub doubled: bool,
}

/// Checks every structural invariant and collects all diagnostics at once.
pub fn validate_quiver(spec: &QuiverSpec) -> Result<(Quiver, Validation), Vec<QuiverError>> {
    let mut errors = Vec::new();
    let mut index = HashMap::new();
    for (i, v) in spec.vertices.iter().enumerate() {
        if index.insert(v.clone(), i).is_some() {
            errors.push(QuiverError::DuplicateVertex(v.clone()));
        }
    }
    let mut edges = Vec::with_capacity(spec.edges.len());
    for (e, edge) in spec.edges.iter().enumerate() {
        let tail = index.get(&edge.tail).copied();
        let head = index.get(&edge.head).copied();
        if tail.is_none() {
            errors.push(QuiverError::DanglingEndpoint { edge: e, vertex: edge.tail.clone() });
        }
        if head.is_none() && edge.head != edge.tail {
            errors.push(QuiverError::DanglingEndpoint { edge: e, vertex: edge.head.clone() });
        }
        if let (Some(t), Some(h)) = (tail, head) {
            edges.push(Edge { tail: t, head: h, label: edge.label.clone() });
        }
    }
    let infinity = match &spec.infinity {
        Some(id) => match index.get(id) {
            Some(&i) => Some(i),
            None => {
                errors.push(QuiverError::UnknownInfinity(id.clone()));
                None
            }
        },
        None => None,
    };
    if !errors.is_empty() {
        return Err(errors);
    }
    let mut q = Quiver { vertices: spec.vertices.clone(), edges, infinity, pairs: None };
    if let Some(pairs) = &spec.pairs {
        let pairs: Vec<(usize, usize)> = pairs.iter().map(|p| (p[0], p[1])).collect();
        q = q.with_pairs(pairs).map_err(|e| vec![e])?;
    }
    let report = q.validation();
    Ok((q, report))
}

impl Quiver {
    /// Builds a quiver from vertex ids and `(tail, head, label)` triples.
    pub fn new<S: AsRef<str>>(
        vertices: &[S],
        edges: &[(S, S, S)],
        infinity: Option<&str>,
    ) -> Result<Quiver, QuiverError> {
        let spec = QuiverSpec {
            vertices: vertices.iter().map(|v| v.as_ref().to_string()).collect(),
            edges: edges
                .iter()
                .map(|(t, h, l)| EdgeSpec {
                    tail: t.as_ref().to_string(),
                    head: h.as_ref().to_string(),
                    label: l.as_ref().to_string(),
                })
                .collect(),
            infinity: infinity.map(str::to_string),
            pairs: None,
        };
        validate_quiver(&spec).map(|(q, _)| q).map_err(|mut e| e.remove(0))
    }

    /// Attaches a doubling pairing after checking that each pair is an edge
    /// and its reversal and that every edge appears exactly once.
    pub fn with_pairs(mut self, pairs: Vec<(usize, usize)>) -> Result<Quiver, QuiverError> {
        let n = self.edges.len();
        let mut seen = vec![false; n];
        for &(a, r) in &pairs {
            if a >= n || r >= n || a == r {
                return Err(QuiverError::InvalidPairing(format!("bad pair ({a},{r})")));
            }
            let (ea, er) = (&self.edges[a], &self.edges[r]);
            if ea.tail != er.head || ea.head != er.tail {
                return Err(QuiverError::InvalidPairing(format!("edges {a} and {r} are not reverse")));
            }
            if seen[a] || seen[r] {
                return Err(QuiverError::InvalidPairing(format!("edge repeated in ({a},{r})")));
            }
            seen[a] = true;
            seen[r] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(QuiverError::InvalidPairing("some edge is unpaired".into()));
        }
        self.pairs = Some(pairs);
        Ok(self)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn infinity(&self) -> Option<usize> {
        self.infinity
    }

    pub fn pairs(&self) -> Option<&[(usize, usize)]> {
        self.pairs.as_deref()
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn edge_by_label(&self, label: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.label == label)
    }

    pub fn loop_free(&self) -> bool {
        self.edges.iter().all(|e| e.head != e.tail)
    }

    /// Partner of an edge under the doubling pairing.
    pub fn partner(&self, e: usize) -> Option<usize> {
        self.pairs()?.iter().find_map(|&(a, r)| {
            if a == e {
                Some(r)
            } else if r == e {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn incoming(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().enumerate().filter(move |(_, e)| e.head == k).map(|(i, _)| i)
    }

    pub fn outgoing(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().enumerate().filter(move |(_, e)| e.tail == k).map(|(i, _)| i)
    }

    pub fn validation(&self) -> Validation {
        Validation {
            vertices: self.vertices.len(),
            edges: self.edges.len(),
            loop_free: self.loop_free(),
            has_infinity: self.infinity.is_some(),
            doubled: self.pairs.is_some(),
        }
    }

    pub fn to_spec(&self) -> QuiverSpec {
        QuiverSpec {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    tail: self.vertices[e.tail].clone(),
                    head: self.vertices[e.head].clone(),
                    label: e.label.clone(),
                })
                .collect(),
            infinity: self.infinity.map(|i| self.vertices[i].clone()),
            pairs: self.pairs.as_ref().map(|p| p.iter().map(|&(a, r)| [a, r]).collect()),
        }
    }
}

/// Per-vertex nonnegative dimensions, aligned with the quiver's vertex order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DimVector(pub Vec<usize>);

impl DimVector {
    pub fn zeros(n: usize) -> DimVector {
        DimVector(vec![0; n])
    }

    /// The unit vector concentrated at vertex `k`.
    pub fn unit(n: usize, k: usize) -> DimVector {
        let mut d = vec![0; n];
        d[k] = 1;
        DimVector(d)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &DimVector) -> DimVector {
        DimVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference, or `None` if some entry would go negative.
    pub fn checked_sub(&self, other: &DimVector) -> Option<DimVector> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(DimVector)
    }

    pub fn leq(&self, other: &DimVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn from_map(q: &Quiver, map: &BTreeMap<String, usize>) -> Result<DimVector, QuiverError> {
        check_keys(q, map.keys())?;
        Ok(DimVector(q.vertices().iter().map(|v| map[v]).collect()))
    }

    pub fn to_map(&self, q: &Quiver) -> BTreeMap<String, usize> {
        q.vertices().iter().cloned().zip(self.0.iter().copied()).collect()
    }
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn check_keys<'a>(q: &Quiver, keys: impl Iterator<Item = &'a String>) -> Result<(), QuiverError> {
    let keys: Vec<&String> = keys.collect();
    let mut expected: Vec<&String> = q.vertices().iter().collect();
    expected.sort();
    let mut got = keys.clone();
    got.sort();
    if expected != got {
        return Err(QuiverError::KeyMismatch(format!("expected {:?}, got {:?}", expected, got)));
    }
    Ok(())
}

/// Per-vertex rational weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityParameter(pub Vec<Rational64>);

impl StabilityParameter {
    pub fn zero(n: usize) -> StabilityParameter {
        StabilityParameter(vec![Rational64::zero(); n])
    }

    pub fn from_ints(w: &[i64]) -> StabilityParameter {
        StabilityParameter(w.iter().map(|&x| Rational64::from_integer(x)).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn neg(&self) -> StabilityParameter {
        StabilityParameter(self.0.iter().map(|r| -r).collect())
    }

    pub fn from_map(q: &Quiver, map: &BTreeMap<String, String>) -> Result<StabilityParameter, QuiverError> {
        check_keys(q, map.keys())?;
        let w = q.vertices().iter().map(|v| parse_weight(&map[v])).collect::<Result<Vec<_>, _>>()?;
        Ok(StabilityParameter(w))
    }

    pub fn to_map(&self, q: &Quiver) -> BTreeMap<String, String> {
        q.vertices().iter().cloned().zip(self.0.iter().map(format_weight)).collect()
    }
}

/// Parses `"3"`, `"-1/2"` or a decimal like `"0.125"` into an exact rational.
pub fn parse_weight(s: &str) -> Result<Rational64, QuiverError> {
    let bad = || QuiverError::BadWeight(s.to_string());
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(p, q));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let negative = mantissa.starts_with('-');
    let digits = mantissa.trim_start_matches(['-', '+']);
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let num: i64 = all.parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    let ten = Rational64::from_integer(10);
    let mut r = Rational64::from_integer(num);
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        r *= factor;
    } else {
        r /= factor;
    }
    Ok(if negative { -r } else { r })
}

pub fn format_weight(r: &Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Appends a reversed edge for every edge and records the pairing.
/// Reversed edges are labelled with a trailing `*`.
pub fn double_quiver(q: &Quiver) -> Quiver {
    let m = q.num_edges();
    let mut edges = q.edges.clone();
    for e in &q.edges {
        edges.push(Edge { tail: e.head, head: e.tail, label: format!("{}*", e.label) });
    }
    Quiver {
        vertices: q.vertices.clone(),
        edges,
        infinity: q.infinity,
        pairs: Some((0..m).map(|a| (a, a + m)).collect()),
    }
}

/// Extends a dimension vector of the unframed quiver by `1` at the new vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramingExtension {
    pub infinity: usize,
}

impl FramingExtension {
    pub fn extend(&self, v: &DimVector) -> DimVector {
        let mut d = v.0.clone();
        d.insert(self.infinity, 1);
        DimVector(d)
    }
}

/// Adds a vertex `inf` (placed first) with `w[i]` edges from it to each vertex `i`.
pub fn crawley_boevey_frame(q: &Quiver, w: &[i64]) -> Result<(Quiver, FramingExtension), QuiverError> {
    if q.infinity.is_some() {
        return Err(QuiverError::AlreadyFramed);
    }
    if w.len() != q.num_vertices() {
        return Err(QuiverError::LengthMismatch(format!(
            "framing has {} entries for {} vertices",
            w.len(),
            q.num_vertices()
        )));
    }
    if let Some(i) = w.iter().position(|&x| x < 0) {
        return Err(QuiverError::NegativeFraming(q.vertices[i].clone()));
    }
    let mut name = "inf".to_string();
    while q.vertex_index(&name).is_some() {
        name.push('\'');
    }
    let mut vertices = vec![name];
    vertices.extend(q.vertices.iter().cloned());
    let mut edges: Vec<Edge> = q
        .edges
        .iter()
        .map(|e| Edge { tail: e.tail + 1, head: e.head + 1, label: e.label.clone() })
        .collect();
    for (i, &wi) in w.iter().enumerate() {
        for j in 1..=wi {
            edges.push(Edge { tail: 0, head: i + 1, label: format!("f_{}^{}", q.vertices[i], j) });
        }
    }
    let framed = Quiver { vertices, edges, infinity: Some(0), pairs: None };
    Ok((framed, FramingExtension { infinity: 0 }))
}

/// Same vertices and edge order, every edge reversed.
pub fn reverse_quiver(q: &Quiver) -> Quiver {
    Quiver {
        vertices: q.vertices.clone(),
        edges: q.edges.iter().map(|e| Edge { tail: e.head, head: e.tail, label: e.label.clone() }).collect(),
        infinity: q.infinity,
        pairs: q.pairs.clone(),
    }
}

/// Weight `-sum(v_i)` at infinity and `1` elsewhere.
pub fn canonical_stability(q: &Quiver, v: &DimVector) -> Result<StabilityParameter, QuiverError> {
    let inf = q.infinity.ok_or(QuiverError::MissingInfinity)?;
    if v.len() != q.num_vertices() {
        return Err(QuiverError::LengthMismatch("dimension vector length".into()));
    }
    if v.0[inf] != 1 {
        return Err(QuiverError::InfinityDimension(v.0[inf]));
    }
    let rest: i64 = v.0.iter().enumerate().filter(|(i, _)| *i != inf).map(|(_, &d)| d as i64).sum();
    let w = (0..q.num_vertices()).map(|i| if i == inf { -rest } else { 1 }).collect::<Vec<_>>();
    Ok(StabilityParameter::from_ints(&w))
}

pub fn degree(alpha: &StabilityParameter, v: &DimVector) -> Rational64 {
    alpha.0.iter().zip(&v.0).map(|(a, &d)| a * Rational64::from_integer(d as i64)).sum()
}

pub fn slope(alpha: &StabilityParameter, v: &DimVector) -> Result<Rational64, QuiverError> {
    let r = v.rank();
    if r == 0 {
        return Err(QuiverError::ZeroRank);
    }
    Ok(degree(alpha, v) / Rational64::from_integer(r as i64))
}

/// `(degree, rank, slope)` computed exactly.
pub fn degree_rank_slope(
    alpha: &StabilityParameter,
    v: &DimVector,
) -> Result<(Rational64, usize, Rational64), QuiverError> {
    Ok((degree(alpha, v), v.rank(), slope(alpha, v)?))
}

pub fn is_admissible(alpha: &StabilityParameter, v: &DimVector) -> bool {
    degree(alpha, v).is_zero()
}

/// Float variant with the `1e-12` tolerance used for non-rational inputs.
pub fn is_admissible_f64(alpha: &[f64], v: &DimVector) -> bool {
    alpha.iter().zip(&v.0).map(|(a, &d)| a * d as f64).sum::<f64>().abs() <= 1e-12
}

/// Shifts every weight by the slope of `vp`, making the result admissible for `vp`.
pub fn induced_parameter(alpha: &StabilityParameter, vp: &DimVector) -> Result<StabilityParameter, QuiverError> {
    let s = slope(alpha, vp)?;
    Ok(StabilityParameter(alpha.0.iter().map(|a| a - s).collect()))
}

/// Role of an edge in a handsaw quiver, decoded from its label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HandsawRole {
    /// `V_k -> V_{k+1}`
    B1(usize),
    /// loop at `V_k`
    B2(usize),
    /// column `j` of `a_k : W_k -> V_k`
    A(usize, usize),
    /// row `j` of `b_k : V_{k-1} -> W_k`
    B(usize, usize),
}

impl HandsawRole {
    pub fn parse(label: &str) -> Option<HandsawRole> {
        if let Some(k) = label.strip_prefix("B1_") {
            return k.parse().ok().map(HandsawRole::B1);
        }
        if let Some(k) = label.strip_prefix("B2_") {
            return k.parse().ok().map(HandsawRole::B2);
        }
        let (kind, rest) = label.split_at(label.find('_')?);
        let (k, j) = rest[1..].split_once('^')?;
        let (k, j) = (k.parse().ok()?, j.parse().ok()?);
        match kind {
            "a" => Some(HandsawRole::A(k, j)),
            "b" => Some(HandsawRole::B(k, j)),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            HandsawRole::B1(k) => format!("B1_{k}"),
            HandsawRole::B2(k) => format!("B2_{k}"),
            HandsawRole::A(k, j) => format!("a_{k}^{j}"),
            HandsawRole::B(k, j) => format!("b_{k}^{j}"),
        }
    }
}

/// Builds the framed quiver of a handsaw with `n - 1` V-vertices and `n`
/// W-spaces. Vertices are `inf, V1, ..., V{n-1}`.
pub fn handsaw_to_quiver(n: usize, dims_v: &[usize], dims_w: &[usize]) -> Result<(Quiver, DimVector), QuiverError> {
    if n < 2 {
        return Err(QuiverError::LengthMismatch(format!("n must be at least 2, got {n}")));
    }
    if dims_v.len() != n - 1 {
        return Err(QuiverError::LengthMismatch(format!("dimsV has {} entries, expected {}", dims_v.len(), n - 1)));
    }
    if dims_w.len() != n {
        return Err(QuiverError::LengthMismatch(format!("dimsW has {} entries, expected {n}", dims_w.len())));
    }
    let mut vertices = vec!["inf".to_string()];
    vertices.extend((1..n).map(|k| format!("V{k}")));
    let mut edges = Vec::new();
    for k in 1..n - 1 {
        edges.push(Edge { tail: k, head: k + 1, label: HandsawRole::B1(k).label() });
    }
    for k in 1..n {
        edges.push(Edge { tail: k, head: k, label: HandsawRole::B2(k).label() });
    }
    for k in 1..n {
        for j in 1..=dims_w[k - 1] {
            edges.push(Edge { tail: 0, head: k, label: HandsawRole::A(k, j).label() });
        }
    }
    for k in 2..=n {
        for j in 1..=dims_w[k - 1] {
            edges.push(Edge { tail: k - 1, head: 0, label: HandsawRole::B(k, j).label() });
        }
    }
    let mut dims = vec![1];
    dims.extend_from_slice(dims_v);
    Ok((Quiver { vertices, edges, infinity: Some(0), pairs: None }, DimVector(dims)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    fn f1() -> Quiver {
        let framed = Quiver::new(&["inf", "1"], &[("inf", "1", "a")], Some("inf")).unwrap();
        double_quiver(&framed)
    }

    #[test]
    fn validation_reports_loops_and_dangling_endpoints() {
        let q = f1();
        assert!(q.loop_free());
        let l = Quiver::new(&["1"], &[("1", "1", "l")], None).unwrap();
        assert!(!l.loop_free());
        let spec = QuiverSpec {
            vertices: vec!["1".into()],
            edges: vec![EdgeSpec { tail: "1".into(), head: "x".into(), label: String::new() }],
            infinity: Some("y".into()),
            pairs: None,
        };
        let errs = validate_quiver(&spec).unwrap_err();
        assert!(errs.iter().any(|e| e.to_string().contains("dangling endpoint")));
        assert!(errs.iter().any(|e| matches!(e, QuiverError::UnknownInfinity(_))));
        let dup = QuiverSpec { vertices: vec!["1".into(), "1".into()], edges: vec![], infinity: None, pairs: None };
        assert!(matches!(validate_quiver(&dup).unwrap_err()[0], QuiverError::DuplicateVertex(_)));
    }

    #[test]
    fn doubling_pairs_every_edge() {
        let a2 = Quiver::new(&["1", "2"], &[("1", "2", "a")], None).unwrap();
        let d = double_quiver(&a2);
        assert_eq!(d.num_edges(), 2);
        assert_eq!((d.edges()[1].tail, d.edges()[1].head), (1, 0));
        let q3 = Quiver::new(&["1", "2", "3"], &[("1", "2", "x"), ("2", "3", "y"), ("3", "1", "z")], None).unwrap();
        let d3 = double_quiver(&q3);
        assert_eq!(d3.num_edges(), 6);
        assert_eq!(d3.pairs().unwrap().len(), 3);
        for e in 0..6 {
            let p = d3.partner(e).unwrap();
            assert_ne!(p, e);
            assert_eq!(d3.partner(p), Some(e));
        }
        assert_eq!(f1().infinity(), Some(0));
    }

    #[test]
    fn framing_adds_edges_from_infinity() {
        let a1 = Quiver::new(&["1"], &[] as &[(&str, &str, &str)], None).unwrap();
        let (q, ext) = crawley_boevey_frame(&a1, &[2]).unwrap();
        assert_eq!(q.num_vertices(), 2);
        assert_eq!(q.num_edges(), 2);
        assert!(q.edges().iter().all(|e| e.tail == 0 && e.head == 1));
        assert_eq!(ext.extend(&DimVector(vec![3])), DimVector(vec![1, 3]));
        let (q0, _) = crawley_boevey_frame(&a1, &[0]).unwrap();
        assert_eq!(q0.num_edges(), 0);
        let a2 = Quiver::new(&["1", "2"], &[("1", "2", "a")], None).unwrap();
        let (q2, _) = crawley_boevey_frame(&a2, &[1, 1]).unwrap();
        assert_eq!(q2.num_edges(), 3);
        assert!(matches!(crawley_boevey_frame(&a2, &[1, -1]), Err(QuiverError::NegativeFraming(_))));
    }

    #[test]
    fn reversal_is_an_involution() {
        let a2 = Quiver::new(&["1", "2"], &[("1", "2", "a")], None).unwrap();
        let r = reverse_quiver(&a2);
        assert_eq!((r.edges()[0].tail, r.edges()[0].head), (1, 0));
        assert_eq!(reverse_quiver(&reverse_quiver(&f1())), f1());
        let l = Quiver::new(&["1"], &[("1", "1", "l")], None).unwrap();
        assert_eq!(reverse_quiver(&l), l);
    }

    #[test]
    fn canonical_parameter_and_slopes() {
        let q = Quiver::new(&["inf", "1", "2"], &[("inf", "1", "a"), ("inf", "2", "c")], Some("inf")).unwrap();
        let v = DimVector(vec![1, 2, 3]);
        let alpha = canonical_stability(&q, &v).unwrap();
        assert_eq!(alpha, StabilityParameter::from_ints(&[-5, 1, 1]));
        assert_eq!(degree_rank_slope(&alpha, &v).unwrap(), (r(0, 1), 6, r(0, 1)));
        assert_eq!(degree_rank_slope(&alpha, &DimVector(vec![1, 1, 1])).unwrap(), (r(-3, 1), 3, r(-1, 1)));
        assert_eq!(
            canonical_stability(&f1(), &DimVector(vec![1, 1])).unwrap(),
            StabilityParameter::from_ints(&[-1, 1])
        );
        let q1 = Quiver::new(&["inf", "1"], &[("inf", "1", "a")], Some("inf")).unwrap();
        let a0 = canonical_stability(&q1, &DimVector(vec![1, 0])).unwrap();
        assert_eq!(a0, StabilityParameter::from_ints(&[0, 1]));
        assert!(is_admissible(&a0, &DimVector(vec![1, 0])));
        assert_eq!(
            canonical_stability(&q1, &DimVector(vec![2, 0])),
            Err(QuiverError::InfinityDimension(2))
        );
        assert_eq!(slope(&alpha, &DimVector(vec![0, 0, 0])), Err(QuiverError::ZeroRank));
    }

    #[test]
    fn a2_degree_and_admissibility() {
        let alpha = StabilityParameter::from_ints(&[1, -1]);
        assert_eq!(degree_rank_slope(&alpha, &DimVector(vec![0, 1])).unwrap(), (r(-1, 1), 1, r(-1, 1)));
        assert!(is_admissible(&alpha, &DimVector(vec![1, 1])));
        assert!(!is_admissible(&alpha, &DimVector(vec![2, 1])));
    }

    #[test]
    fn induced_parameter_matches_direct_evaluation() {
        let alpha = StabilityParameter::from_ints(&[-5, 1, 1]);
        let vp = DimVector(vec![1, 1, 1]);
        let ind = induced_parameter(&alpha, &vp).unwrap();
        assert_eq!(ind, StabilityParameter::from_ints(&[-4, 2, 2]));
        assert!(is_admissible(&ind, &vp));
        let v = DimVector(vec![1, 2, 3]);
        assert_eq!(induced_parameter(&alpha, &v).unwrap(), alpha);
    }

    #[test]
    fn induced_canonical_is_positive_multiple_of_canonical() {
        // Substituting the canonical weights into the induced formula gives
        // alpha' = c * canonical(v') with c = 1 - slope > 0.
        let q = Quiver::new(&["inf", "1", "2"], &[("inf", "1", "a"), ("1", "2", "c")], Some("inf")).unwrap();
        let v = DimVector(vec![1, 2, 3]);
        let alpha = canonical_stability(&q, &v).unwrap();
        for vp in [DimVector(vec![1, 1, 0]), DimVector(vec![1, 2, 1]), DimVector(vec![1, 0, 3])] {
            let ind = induced_parameter(&alpha, &vp).unwrap();
            let can = canonical_stability(&q, &vp).unwrap();
            let c = ind.0[1] / can.0[1];
            assert!(c > Rational64::zero());
            for (a, b) in ind.0.iter().zip(&can.0) {
                assert_eq!(*a, c * b);
            }
            assert!(degree(&ind, &vp).is_zero());
        }
    }

    #[test]
    fn parse_weights_exactly() {
        assert_eq!(parse_weight("3").unwrap(), r(3, 1));
        assert_eq!(parse_weight("-1/2").unwrap(), r(-1, 2));
        assert_eq!(parse_weight("0.125").unwrap(), r(1, 8));
        assert_eq!(parse_weight("-2.5e1").unwrap(), r(-25, 1));
        assert_eq!(parse_weight("1e-2").unwrap(), r(1, 100));
        assert!(parse_weight("x").is_err());
        assert!(parse_weight("1/0").is_err());
    }

    #[test]
    fn handsaw_quiver_shapes() {
        let (q, v) = handsaw_to_quiver(2, &[1], &[1, 1]).unwrap();
        assert_eq!(q.vertices(), &["inf".to_string(), "V1".to_string()]);
        assert_eq!(v, DimVector(vec![1, 1]));
        let labels: Vec<&str> = q.edges().iter().map(|e| e.label.as_str()).collect();
        assert_eq!(labels, vec!["B2_1", "a_1^1", "b_2^1"]);
        assert_eq!(q.edges()[1].tail, 0);
        assert_eq!(q.edges()[2].head, 0);

        let (q3, _) = handsaw_to_quiver(3, &[1, 1], &[1, 2, 1]).unwrap();
        let count = |f: fn(HandsawRole) -> bool| {
            q3.edges().iter().filter(|e| f(HandsawRole::parse(&e.label).unwrap())).count()
        };
        assert_eq!(count(|r| matches!(r, HandsawRole::A(..))), 3);
        assert_eq!(count(|r| matches!(r, HandsawRole::B(..))), 3);
        assert_eq!(count(|r| matches!(r, HandsawRole::B1(_))), 1);
        assert_eq!(count(|r| matches!(r, HandsawRole::B2(_))), 2);

        let (q0, _) = handsaw_to_quiver(3, &[1, 1], &[0, 0, 0]).unwrap();
        assert_eq!(q0.num_edges(), 3);
        assert!(handsaw_to_quiver(3, &[1], &[0, 0, 0]).is_err());
        assert_eq!(HandsawRole::parse("b_12^3"), Some(HandsawRole::B(12, 3)));
    }

    #[test]
    fn key_round_trip() {
        let q = f1();
        let v = DimVector(vec![1, 1]);
        assert_eq!(DimVector::from_map(&q, &v.to_map(&q)).unwrap(), v);
        let alpha = StabilityParameter(vec![r(-1, 2), r(1, 2)]);
        assert_eq!(StabilityParameter::from_map(&q, &alpha.to_map(&q)).unwrap(), alpha);
        let mut bad = v.to_map(&q);
        bad.insert("zz".into(), 1);
        assert!(DimVector::from_map(&q, &bad).is_err());
    }
}
