//! Quivers, paths, path-algebra elements and potentials.
//!
//! Paths are written in function-composition order: `arrows[0]` is the last arrow
//! traversed, so the path `a_n ⋯ a_1` is stored as `[a_n, …, a_1]` and `ab` is a
//! path when `s(a) = t(b)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::scalar::Scalar;

/// Default bound on the length of input cycles.
pub const DEFAULT_MAX_CYCLE_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("elements belong to different quivers")]
    QuiverMismatch,
    #[error("term {0} is not a cycle")]
    NotCyclic(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("arrows {0} are not composable")]
    NotComposable(String),
    #[error("cycle of length {0} exceeds the bound {1}")]
    CycleTooLong(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub id: String,
    pub source: usize,
    pub target: usize,
    pub degree: i32,
}

#[derive(Debug, Clone)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    vertex_index: HashMap<String, usize>,
    arrow_index: HashMap<String, usize>,
}

impl PartialEq for Quiver {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.arrows == other.arrows
    }
}

impl Eq for Quiver {}

impl Quiver {
    /// Builds a quiver from vertex ids and `(id, source, target)` arrow triples.
    pub fn new<V: AsRef<str>, A: AsRef<str>>(
        vertices: &[V],
        arrows: &[(A, A, A)],
    ) -> Result<Arc<Quiver>, QuiverError> {
        let graded: Vec<(&str, &str, &str, i32)> = arrows
            .iter()
            .map(|(a, s, t)| (a.as_ref(), s.as_ref(), t.as_ref(), 0))
            .collect();
        Self::graded(vertices, &graded)
    }

    /// Like [`Quiver::new`] with an explicit degree per arrow.
    pub fn graded<S: AsRef<str>>(
        vertices: &[S],
        arrows: &[(&str, &str, &str, i32)],
    ) -> Result<Arc<Quiver>, QuiverError> {
        let mut vertex_index = HashMap::new();
        let mut vs = Vec::with_capacity(vertices.len());
        for v in vertices {
            let v = v.as_ref().to_string();
            if vertex_index.insert(v.clone(), vs.len()).is_some() {
                return Err(QuiverError::DuplicateId(v));
            }
            vs.push(v);
        }
        let mut arrow_index = HashMap::new();
        let mut arr = Vec::with_capacity(arrows.len());
        for &(id, s, t, degree) in arrows {
            let source = *vertex_index.get(s).ok_or_else(|| QuiverError::UnknownVertex(s.into()))?;
            let target = *vertex_index.get(t).ok_or_else(|| QuiverError::UnknownVertex(t.into()))?;
            if arrow_index.insert(id.to_string(), arr.len()).is_some() {
                return Err(QuiverError::DuplicateId(id.into()));
            }
            arr.push(Arrow { id: id.to_string(), source, target, degree });
        }
        Ok(Arc::new(Quiver { vertices: vs, arrows: arr, vertex_index, arrow_index }))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, a: usize) -> &Arrow {
        &self.arrows[a]
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex(&self, id: &str) -> Result<usize, QuiverError> {
        self.vertex_index.get(id).copied().ok_or_else(|| QuiverError::UnknownVertex(id.into()))
    }

    pub fn arrow_by_id(&self, id: &str) -> Result<usize, QuiverError> {
        self.arrow_index.get(id).copied().ok_or_else(|| QuiverError::UnknownArrow(id.into()))
    }

    /// Arrows from `source` to `target`, in arrow order.
    pub fn arrows_between(&self, source: usize, target: usize) -> Vec<usize> {
        (0..self.arrows.len())
            .filter(|&a| self.arrows[a].source == source && self.arrows[a].target == target)
            .collect()
    }

    /// Builds the path `ids[0] ⋯ ids[n-1]` (written order).
    pub fn path(&self, ids: &[&str]) -> Result<Path, QuiverError> {
        let arrows: Vec<usize> = ids.iter().map(|id| self.arrow_by_id(id)).collect::<Result<_, _>>()?;
        self.path_from_indices(&arrows).ok_or_else(|| QuiverError::NotComposable(ids.join(" ")))
    }

    pub fn path_from_indices(&self, arrows: &[usize]) -> Option<Path> {
        let (&first, _) = arrows.split_first()?;
        for w in arrows.windows(2) {
            if self.arrows[w[0]].source != self.arrows[w[1]].target {
                return None;
            }
        }
        let last = *arrows.last().expect("nonempty");
        Some(Path {
            arrows: arrows.iter().map(|&a| a as u32).collect(),
            source: self.arrows[last].source as u32,
            target: self.arrows[first].target as u32,
        })
    }

    pub fn degree(&self, p: &Path) -> i32 {
        p.arrows.iter().map(|&a| self.arrows[a as usize].degree).sum()
    }

    pub fn format_path(&self, p: &Path) -> String {
        if p.is_stationary() {
            format!("1_{}", self.vertices[p.source as usize])
        } else {
            p.arrows.iter().map(|&a| self.arrows[a as usize].id.as_str()).collect::<Vec<_>>().join(" ")
        }
    }

    /// All paths of exactly `len` arrows, in lexicographic order of arrow indices.
    pub fn paths_of_length(&self, len: usize) -> Vec<Path> {
        if len == 0 {
            return (0..self.vertex_count()).map(Path::stationary).collect();
        }
        let mut out: Vec<Path> = (0..self.arrow_count()).map(|a| Path::arrow(self, a)).collect();
        for _ in 1..len {
            let mut next = Vec::new();
            for p in &out {
                for a in 0..self.arrow_count() {
                    if self.arrows[a].target == p.source as usize {
                        let mut arrows = p.arrows.clone();
                        arrows.push(a as u32);
                        next.push(Path { arrows, source: self.arrows[a].source as u32, target: p.target });
                    }
                }
            }
            out = next;
        }
        out
    }

    /// All cycles of length `1..=max_len`, one per rotation class.
    pub fn cycle_classes(&self, max_len: usize) -> Vec<Path> {
        let mut out = Vec::new();
        for len in 1..=max_len {
            for p in self.paths_of_length(len) {
                if p.is_cycle() && p.canonical(self) == p {
                    out.push(p);
                }
            }
        }
        out
    }
}

/// A path; stationary paths have no arrows and `source == target`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    arrows: Vec<u32>,
    source: u32,
    target: u32,
}

impl Path {
    pub fn stationary(v: usize) -> Path {
        Path { arrows: Vec::new(), source: v as u32, target: v as u32 }
    }

    pub fn arrow(q: &Quiver, a: usize) -> Path {
        let ar = q.arrow(a);
        Path { arrows: vec![a as u32], source: ar.source as u32, target: ar.target as u32 }
    }

    pub fn arrows(&self) -> impl ExactSizeIterator<Item = usize> + DoubleEndedIterator + '_ {
        self.arrows.iter().map(|&a| a as usize)
    }

    pub fn arrow_at(&self, i: usize) -> usize {
        self.arrows[i] as usize
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn is_stationary(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn source(&self) -> usize {
        self.source as usize
    }

    pub fn target(&self) -> usize {
        self.target as usize
    }

    pub fn is_cycle(&self) -> bool {
        self.source == self.target
    }

    /// `self · other`, or `None` when `s(self) ≠ t(other)`.
    pub fn compose(&self, other: &Path) -> Option<Path> {
        if self.source != other.target {
            return None;
        }
        let mut arrows = self.arrows.clone();
        arrows.extend_from_slice(&other.arrows);
        Some(Path { arrows, source: other.source, target: self.target })
    }

    /// The subpath `arrows[from..to]`; empty ranges give the stationary path at the
    /// junction.
    pub fn slice(&self, q: &Quiver, from: usize, to: usize) -> Path {
        if from == to {
            let v = if from == 0 {
                self.target()
            } else {
                q.arrow(self.arrows[from - 1] as usize).source
            };
            return Path::stationary(v);
        }
        q.path_from_indices(&self.arrows[from..to].iter().map(|&a| a as usize).collect::<Vec<_>>())
            .expect("subpath of a path")
    }

    /// Cyclic shift of a cycle's arrow sequence.
    pub fn rotate(&self, q: &Quiver, k: usize) -> Path {
        debug_assert!(self.is_cycle());
        if self.arrows.is_empty() {
            return self.clone();
        }
        let mut arrows = self.arrows.clone();
        arrows.rotate_left(k % self.arrows.len());
        let last = *arrows.last().expect("nonempty") as usize;
        let first = arrows[0] as usize;
        Path { source: q.arrow(last).source as u32, target: q.arrow(first).target as u32, arrows }
    }

    /// Lexicographically least rotation of a cycle.
    pub fn canonical(&self, q: &Quiver) -> Path {
        let n = self.arrows.len();
        let best = (1..n).fold(0, |best, k| {
            let cand = self.arrows[k..].iter().chain(&self.arrows[..k]);
            let cur = self.arrows[best..].iter().chain(&self.arrows[..best]);
            if cand.lt(cur) {
                k
            } else {
                best
            }
        });
        self.rotate(q, best)
    }
}

fn same_quiver(a: &Arc<Quiver>, b: &Arc<Quiver>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// An element of the path algebra `kQ` (finite linear combination of paths).
#[derive(Clone, Debug)]
pub struct PathElement {
    quiver: Arc<Quiver>,
    terms: BTreeMap<Path, Scalar>,
}

impl PartialEq for PathElement {
    fn eq(&self, other: &Self) -> bool {
        same_quiver(&self.quiver, &other.quiver) && self.terms == other.terms
    }
}

impl Eq for PathElement {}

impl PathElement {
    pub fn zero(q: &Arc<Quiver>) -> Self {
        PathElement { quiver: q.clone(), terms: BTreeMap::new() }
    }

    pub fn from_path(q: &Arc<Quiver>, p: Path) -> Self {
        Self::monomial(q, p, Scalar::one())
    }

    pub fn monomial(q: &Arc<Quiver>, p: Path, c: Scalar) -> Self {
        let mut e = Self::zero(q);
        e.add_term(p, c);
        e
    }

    pub fn vertex(q: &Arc<Quiver>, v: usize) -> Self {
        Self::from_path(q, Path::stationary(v))
    }

    pub fn arrow(q: &Arc<Quiver>, a: usize) -> Self {
        Self::from_path(q, Path::arrow(q, a))
    }

    /// The unit `Σ_v v`.
    pub fn one(q: &Arc<Quiver>) -> Self {
        let mut e = Self::zero(q);
        for v in 0..q.vertex_count() {
            e.add_term(Path::stationary(v), Scalar::one());
        }
        e
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn terms(&self) -> &BTreeMap<Path, Scalar> {
        &self.terms
    }

    pub fn coefficient(&self, p: &Path) -> Scalar {
        self.terms.get(p).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, p: Path, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&p) {
            Some(slot) => {
                *slot += &c;
                if slot.is_zero() {
                    self.terms.remove(&p);
                }
            }
            None => {
                self.terms.insert(p, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(same_quiver(&self.quiver, &other.quiver), "elements over different quivers");
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero(&self.quiver);
        for (p, x) in &self.terms {
            out.add_term(p.clone(), x * c);
        }
        out
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, QuiverError> {
        if !same_quiver(&self.quiver, &other.quiver) {
            return Err(QuiverError::QuiverMismatch);
        }
        let mut out = Self::zero(&self.quiver);
        for (p, x) in &self.terms {
            for (q, y) in &other.terms {
                if let Some(pq) = p.compose(q) {
                    out.add_term(pq, x * y);
                }
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.checked_mul(other).expect("elements over different quivers")
    }

    /// Terms whose path has exactly `len` arrows.
    pub fn homogeneous_part(&self, len: usize) -> Self {
        let mut out = Self::zero(&self.quiver);
        for (p, c) in &self.terms {
            if p.len() == len {
                out.add_term(p.clone(), c.clone());
            }
        }
        out
    }

    pub fn max_len(&self) -> usize {
        self.terms.keys().map(Path::len).max().unwrap_or(0)
    }

    /// `i · self · j` for vertices `i`, `j`.
    pub fn corner(&self, target: usize, source: usize) -> Self {
        let mut out = Self::zero(&self.quiver);
        for (p, c) in &self.terms {
            if p.target() == target && p.source() == source {
                out.add_term(p.clone(), c.clone());
            }
        }
        out
    }
}

impl fmt::Display for PathElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(p, c)| format!("({})·{}", c, self.quiver.format_path(p)))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// A finite potential: cycles stored as their least rotation, with coefficients.
#[derive(Clone, Debug)]
pub struct Potential {
    quiver: Arc<Quiver>,
    terms: BTreeMap<Path, Scalar>,
}

impl PartialEq for Potential {
    fn eq(&self, other: &Self) -> bool {
        same_quiver(&self.quiver, &other.quiver) && self.terms == other.terms
    }
}

impl Eq for Potential {}

impl Potential {
    pub fn zero(q: &Arc<Quiver>) -> Self {
        Potential { quiver: q.clone(), terms: BTreeMap::new() }
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn terms(&self) -> &BTreeMap<Path, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, cycle: &Path) -> Scalar {
        self.terms.get(&cycle.canonical(&self.quiver)).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Adds `c · [cycle]`.
    pub fn add_cycle(&mut self, cycle: &Path, c: Scalar) -> Result<(), QuiverError> {
        if !cycle.is_cycle() {
            return Err(QuiverError::NotCyclic(self.quiver.format_path(cycle)));
        }
        if c.is_zero() {
            return Ok(());
        }
        let key = cycle.canonical(&self.quiver);
        match self.terms.get_mut(&key) {
            Some(slot) => {
                *slot += &c;
                if slot.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Potential) -> Potential {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_cycle(p, c.clone()).expect("stored cycles are cycles");
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Potential {
        let mut out = Potential::zero(&self.quiver);
        for (p, x) in &self.terms {
            out.add_cycle(p, x * c).expect("stored cycles are cycles");
        }
        out
    }

    /// The canonical representatives as an element of `kQ`.
    pub fn lift(&self) -> PathElement {
        PathElement { quiver: self.quiver.clone(), terms: self.terms.clone() }
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.lift(), f)
    }
}

/// `s(a_n ⋯ a_1) = Σ_i a_i ⋯ a_1 a_n ⋯ a_{i+1}` over every cycle of `w`.
pub fn shuffle(w: &Potential) -> PathElement {
    shuffle_element(&w.lift())
}

/// The rotation sum on cyclic terms of an arbitrary element; non-cyclic terms vanish.
pub fn shuffle_element(x: &PathElement) -> PathElement {
    let q = x.quiver();
    let mut out = PathElement::zero(q);
    for (p, c) in x.terms() {
        if !p.is_cycle() || p.is_empty() {
            continue;
        }
        for k in 0..p.len() {
            out.add_term(p.rotate(q, k), c.clone());
        }
    }
    out
}

/// `δ_a`: strips a leading `a` from every term, dropping the others.
pub fn delta(a: usize, x: &PathElement) -> PathElement {
    let q = x.quiver();
    let mut out = PathElement::zero(q);
    for (p, c) in x.terms() {
        if !p.is_empty() && p.arrow_at(0) == a {
            out.add_term(p.slice(q, 1, p.len()), c.clone());
        }
    }
    out
}

/// Cyclic derivative `∂_a W = δ_a(s W)`.
pub fn partial(a: usize, w: &Potential) -> PathElement {
    delta(a, &shuffle(w))
}

/// `cyc(x) = Σ_i i x i`: keeps exactly the cyclic terms.
pub fn cyc(x: &PathElement) -> PathElement {
    let mut out = PathElement::zero(x.quiver());
    for (p, c) in x.terms() {
        if p.is_cycle() {
            out.add_term(p.clone(), c.clone());
        }
    }
    out
}

/// The class of `x` modulo commutators; every term must be a cycle.
pub fn canonical_potential(x: &PathElement) -> Result<Potential, QuiverError> {
    let mut out = Potential::zero(x.quiver());
    for (p, c) in x.terms() {
        out.add_cycle(p, c.clone())?;
    }
    Ok(out)
}
