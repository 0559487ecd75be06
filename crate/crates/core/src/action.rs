//! Group actions on path algebras: validation, normalization to monomial form,
//! orbits and stabilizers, arrow characters, and the choice data fixing `Q_G`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::Signed;
use thiserror::Error;

use crate::group::{characters_of, AbelianGroup, Character, GroupElement, Subgroup};
use crate::linalg;
use crate::quiver::{canonical_potential, Path, PathElement, Potential, Quiver};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("eigen-decomposition failed; the coefficient field is too small")]
    ConductorTooSmall,
    #[error("stabilizer does not act by scalars on arrow `{0}`")]
    NotMonomialOnStabilizer(String),
    #[error("invalid choice: {0}")]
    InvalidChoice(String),
}

/// Images of one group generator: a vertex permutation and, for every arrow, a
/// linear combination of arrows.
#[derive(Clone, Debug)]
pub struct RawGenerator {
    pub vertices: Vec<usize>,
    pub arrows: Vec<Vec<(usize, Scalar)>>,
}

/// An action given on the generators `(0,…,1,…,0)` of `G`.
#[derive(Clone, Debug)]
pub struct RawAction {
    pub group: Arc<AbelianGroup>,
    pub quiver: Arc<Quiver>,
    pub generators: Vec<RawGenerator>,
}

type Matrix = Vec<Vec<Scalar>>;

impl RawAction {
    /// Vertex permutations and arrow matrices for every group element; row `a` of a
    /// matrix is the image of arrow `a`.
    fn expand(&self) -> Result<(Vec<Vec<usize>>, Vec<Matrix>), ActionError> {
        let q = &self.quiver;
        let g = &self.group;
        let n = q.vertex_count();
        let m = q.arrow_count();
        if self.generators.len() != g.factors().len() {
            return Err(ActionError::InvalidAction(format!(
                "expected {} generators, found {}",
                g.factors().len(),
                self.generators.len()
            )));
        }
        let mut gen_perm = Vec::new();
        let mut gen_mat = Vec::new();
        for (k, gen) in self.generators.iter().enumerate() {
            let mut seen = vec![false; n];
            if gen.vertices.len() != n || gen.vertices.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
                return Err(ActionError::InvalidAction(format!("generator {k}: vertex map is not a permutation")));
            }
            if gen.arrows.len() != m {
                return Err(ActionError::InvalidAction(format!("generator {k}: wrong number of arrow images")));
            }
            let mut mat = vec![vec![Scalar::zero(); m]; m];
            for (a, image) in gen.arrows.iter().enumerate() {
                let ar = q.arrow(a);
                for (b, c) in image {
                    let br = q.arrow(*b);
                    if br.source != gen.vertices[ar.source] || br.target != gen.vertices[ar.target] {
                        return Err(ActionError::InvalidAction(format!(
                            "generator {k}: image of `{}` contains `{}` with wrong endpoints",
                            ar.id, br.id
                        )));
                    }
                    mat[a][*b] += c;
                }
            }
            if linalg::invert(&mat).is_none() {
                return Err(ActionError::InvalidAction(format!("generator {k}: arrow map is singular")));
            }
            gen_perm.push(gen.vertices.clone());
            gen_mat.push(mat);
        }
        for k in 0..gen_mat.len() {
            let order = g.factors()[k];
            let mut p: Vec<usize> = (0..n).collect();
            let mut mat = linalg::identity(m);
            for _ in 0..order {
                p = p.iter().map(|&v| gen_perm[k][v]).collect();
                mat = linalg::mat_mul(&mat, &gen_mat[k]);
            }
            if p.iter().enumerate().any(|(i, &v)| i != v) || mat != linalg::identity(m) {
                return Err(ActionError::InvalidAction(format!("generator {k} does not have order dividing {order}")));
            }
            for l in 0..k {
                let kl = linalg::mat_mul(&gen_mat[k], &gen_mat[l]);
                let lk = linalg::mat_mul(&gen_mat[l], &gen_mat[k]);
                let pkl: Vec<usize> = (0..n).map(|v| gen_perm[k][gen_perm[l][v]]).collect();
                let plk: Vec<usize> = (0..n).map(|v| gen_perm[l][gen_perm[k][v]]).collect();
                if kl != lk || pkl != plk {
                    return Err(ActionError::InvalidAction(format!("generators {l} and {k} do not commute")));
                }
            }
        }
        let mut perms = vec![Vec::new(); g.order()];
        let mut mats = vec![Vec::new(); g.order()];
        perms[0] = (0..n).collect();
        mats[0] = linalg::identity(m);
        for x in g.elements().skip(1) {
            let k = g.residues(x).iter().position(|&r| r > 0).expect("non-identity");
            let prev = g.op(x, g.inverse(g.generator(k)));
            perms[x.index()] = perms[prev.index()].iter().map(|&v| gen_perm[k][v]).collect();
            mats[x.index()] = linalg::mat_mul(&mats[prev.index()], &gen_mat[k]);
        }
        Ok((perms, mats))
    }
}

/// An action where every group element permutes vertices and maps each arrow to a
/// nonzero multiple of an arrow.
#[derive(Clone, Debug)]
pub struct MonomialAction {
    group: Arc<AbelianGroup>,
    quiver: Arc<Quiver>,
    vertex: Vec<Vec<usize>>,
    arrow: Vec<Vec<(Scalar, usize)>>,
    stabilizers: Vec<Arc<Subgroup>>,
}

impl PartialEq for MonomialAction {
    fn eq(&self, other: &Self) -> bool {
        *self.group == *other.group && *self.quiver == *other.quiver && self.vertex == other.vertex && self.arrow == other.arrow
    }
}

impl MonomialAction {
    /// Builds the action from generator images, checking the homomorphism property.
    pub fn from_generators(
        group: &Arc<AbelianGroup>,
        quiver: &Arc<Quiver>,
        generators: &[(Vec<usize>, Vec<(Scalar, usize)>)],
    ) -> Result<MonomialAction, ActionError> {
        let raw = RawAction {
            group: group.clone(),
            quiver: quiver.clone(),
            generators: generators
                .iter()
                .map(|(v, a)| RawGenerator {
                    vertices: v.clone(),
                    arrows: a.iter().map(|(c, b)| vec![(*b, c.clone())]).collect(),
                })
                .collect(),
        };
        let (perms, mats) = raw.expand()?;
        Self::from_matrices(group, quiver, perms, &mats)
            .ok_or_else(|| ActionError::InvalidAction("arrow images are not monomial".into()))
    }

    fn from_matrices(
        group: &Arc<AbelianGroup>,
        quiver: &Arc<Quiver>,
        vertex: Vec<Vec<usize>>,
        mats: &[Matrix],
    ) -> Option<MonomialAction> {
        let mut arrow = Vec::with_capacity(mats.len());
        for mat in mats {
            let mut images = Vec::with_capacity(mat.len());
            for row in mat {
                let mut nz = row.iter().enumerate().filter(|(_, c)| !c.is_zero());
                let (b, c) = nz.next()?;
                if nz.next().is_some() {
                    return None;
                }
                images.push((c.clone(), b));
            }
            arrow.push(images);
        }
        Some(Self::assemble(group, quiver, vertex, arrow))
    }

    fn assemble(
        group: &Arc<AbelianGroup>,
        quiver: &Arc<Quiver>,
        vertex: Vec<Vec<usize>>,
        arrow: Vec<Vec<(Scalar, usize)>>,
    ) -> MonomialAction {
        let stabilizers = (0..quiver.vertex_count())
            .map(|v| {
                let elems: Vec<GroupElement> = group.elements().filter(|g| vertex[g.index()][v] == v).collect();
                Subgroup::from_elements(group, elems)
            })
            .collect();
        MonomialAction { group: group.clone(), quiver: quiver.clone(), vertex, arrow, stabilizers }
    }

    /// The trivial action of `group` (every element acts as the identity).
    pub fn trivial(group: &Arc<AbelianGroup>, quiver: &Arc<Quiver>) -> MonomialAction {
        let vertex = vec![(0..quiver.vertex_count()).collect(); group.order()];
        let arrow = vec![(0..quiver.arrow_count()).map(|a| (Scalar::one(), a)).collect(); group.order()];
        Self::assemble(group, quiver, vertex, arrow)
    }

    /// An action given directly on all group elements (used for derived quivers).
    pub(crate) fn from_tables(
        group: &Arc<AbelianGroup>,
        quiver: &Arc<Quiver>,
        vertex: Vec<Vec<usize>>,
        arrow: Vec<Vec<(Scalar, usize)>>,
    ) -> MonomialAction {
        Self::assemble(group, quiver, vertex, arrow)
    }

    pub fn group(&self) -> &Arc<AbelianGroup> {
        &self.group
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn vertex_image(&self, g: GroupElement, v: usize) -> usize {
        self.vertex[g.index()][v]
    }

    pub fn arrow_image(&self, g: GroupElement, a: usize) -> (&Scalar, usize) {
        let (c, b) = &self.arrow[g.index()][a];
        (c, *b)
    }

    /// `g(p) = λ · p'` for a path `p`.
    pub fn apply_path(&self, g: GroupElement, p: &Path) -> (Scalar, Path) {
        if p.is_stationary() {
            return (Scalar::one(), Path::stationary(self.vertex_image(g, p.source())));
        }
        let mut c = Scalar::one();
        let mut arrows = Vec::with_capacity(p.len());
        for a in p.arrows() {
            let (x, b) = self.arrow_image(g, a);
            if !x.is_one() {
                c *= x;
            }
            arrows.push(b);
        }
        (c, self.quiver.path_from_indices(&arrows).expect("actions preserve composability"))
    }

    pub fn apply_element(&self, g: GroupElement, x: &PathElement) -> PathElement {
        let mut out = PathElement::zero(x.quiver());
        for (p, c) in x.terms() {
            let (l, q) = self.apply_path(g, p);
            out.add_term(q, &l * c);
        }
        out
    }

    pub fn apply_potential(&self, g: GroupElement, w: &Potential) -> Potential {
        canonical_potential(&self.apply_element(g, &w.lift())).expect("images of cycles are cycles")
    }

    pub fn orbit(&self, v: usize) -> Vec<usize> {
        self.group.elements().map(|g| self.vertex_image(g, v)).collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn stabilizer(&self, v: usize) -> &Arc<Subgroup> {
        &self.stabilizers[v]
    }

    /// `G_{uv} = G_u ∩ G_v`.
    pub fn pair_stabilizer(&self, u: usize, v: usize) -> Arc<Subgroup> {
        self.stabilizers[u].intersection(&self.stabilizers[v])
    }

    /// Orbit of an arrow up to scalars.
    pub fn arrow_orbit(&self, a: usize) -> Vec<usize> {
        self.group.elements().map(|g| self.arrow_image(g, a).1).collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// The character `χ_a` of `G_{s(a)t(a)}` with `g(a) = χ_a(g) a`.
    pub fn chi_of(&self, a: usize) -> Result<Character, ActionError> {
        let ar = self.quiver.arrow(a);
        let stab = self.pair_stabilizer(ar.source, ar.target);
        let n = self.group.exponent();
        let mut exps = BTreeMap::new();
        for &s in stab.elements() {
            let (c, b) = self.arrow_image(s, a);
            let e = c.root_exponent(n);
            match e {
                Some(e) if b == a => {
                    exps.insert(s, e);
                }
                _ => return Err(ActionError::NotMonomialOnStabilizer(ar.id.clone())),
            }
        }
        Character::from_fn(&stab, |s| exps[&s]).ok_or_else(|| ActionError::NotMonomialOnStabilizer(ar.id.clone()))
    }

    /// `Ok` iff `g(W) = W` for every generator; otherwise the first offending
    /// generator and cycle.
    pub fn check_invariance(&self, w: &Potential) -> Result<(), NonInvariance> {
        for k in 0..self.group.factors().len() {
            let g = self.group.generator(k);
            let image = self.apply_potential(g, w);
            if image != *w {
                let diff = image.add(&w.scale(&Scalar::from_int(-1)));
                let cycle = diff.terms().keys().next().expect("nonzero difference");
                return Err(NonInvariance {
                    generator: k,
                    element: self.group.format(g),
                    cycle: self.quiver.format_path(cycle),
                });
            }
        }
        Ok(())
    }
}

/// Witness for a potential not fixed by the action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonInvariance {
    pub generator: usize,
    pub element: String,
    pub cycle: String,
}

/// Base change on the span of arrows `source → target`.
#[derive(Clone, Debug)]
pub struct SpanChange {
    pub source: usize,
    pub target: usize,
    /// Old arrow indices spanning the space.
    pub old_arrows: Vec<usize>,
    /// New arrow indices, one per row of `matrix`.
    pub new_arrows: Vec<usize>,
    /// Row `t` expresses new arrow `t` in the old arrows.
    pub matrix: Matrix,
    /// Row `a` expresses old arrow `a` in the new arrows.
    pub inverse: Matrix,
}

#[derive(Clone, Debug)]
pub struct Normalized {
    pub action: MonomialAction,
    pub old_quiver: Arc<Quiver>,
    pub changes: Vec<SpanChange>,
}

impl Normalized {
    /// True when no arrow span was changed.
    pub fn is_identity(&self) -> bool {
        Arc::ptr_eq(&self.old_quiver, self.action.quiver())
    }

    /// Rewrites a potential on the old quiver in the new arrow basis.
    pub fn transform_potential(&self, w: &Potential) -> Potential {
        if self.is_identity() {
            return w.clone();
        }
        let q = self.action.quiver();
        let mut image: Vec<PathElement> = vec![PathElement::zero(q); self.old_quiver.arrow_count()];
        for ch in &self.changes {
            for (i, &a) in ch.old_arrows.iter().enumerate() {
                for (t, &b) in ch.new_arrows.iter().enumerate() {
                    image[a].add_term(Path::arrow(q, b), ch.inverse[i][t].clone());
                }
            }
        }
        let mut out = PathElement::zero(q);
        for (p, c) in w.terms() {
            let mut acc = PathElement::vertex(q, p.source());
            for a in p.arrows().rev() {
                acc = image[a].mul(&acc);
            }
            out = out.add(&acc.scale(c));
        }
        canonical_potential(&out).expect("images of cycles are cycles")
    }
}

fn combination_name(q: &Quiver, coords: &[(usize, Scalar)]) -> String {
    if let [(a, c)] = coords {
        if c.is_one() {
            return q.arrow(*a).id.clone();
        }
    }
    let mut out = String::new();
    for (k, (a, c)) in coords.iter().enumerate() {
        let id = &q.arrow(*a).id;
        let neg = -c;
        let (sign, mag) = if neg.as_rational().is_some_and(|r| r.is_positive()) {
            ("-", neg)
        } else {
            ("+", c.clone())
        };
        if k > 0 || sign == "-" {
            out.push_str(sign);
        }
        if !mag.is_one() {
            let s = mag.to_string();
            if s.contains(' ') {
                out.push_str(&format!("({s})*"));
            } else {
                out.push_str(&format!("{s}*"));
            }
        }
        out.push_str(id);
    }
    out
}

/// Normalizes a raw action to monomial form by simultaneous eigenbases of the
/// pair stabilizers, transported along each diagonal orbit of vertex pairs.
pub fn normalize(raw: &RawAction) -> Result<Normalized, ActionError> {
    let (perms, mats) = raw.expand()?;
    let q = &raw.quiver;
    let g = &raw.group;
    let m = q.arrow_count();
    let stab_of = |v: usize| -> Arc<Subgroup> {
        Subgroup::from_elements(g, g.elements().filter(|x| perms[x.index()][v] == v).collect())
    };

    // group arrow spans into diagonal orbits of (source, target)
    let mut pairs: Vec<(usize, usize)> =
        q.arrows().iter().map(|a| (a.source, a.target)).collect::<BTreeSet<_>>().into_iter().collect();
    pairs.sort_by_key(|&(s, t)| q.arrows().iter().position(|a| a.source == s && a.target == t));
    let mut done = BTreeSet::new();
    let mut new_rows: BTreeMap<(usize, usize), Vec<Vec<Scalar>>> = BTreeMap::new();
    let mut changed = false;
    for &(i0, j0) in &pairs {
        if done.contains(&(i0, j0)) {
            continue;
        }
        let mut orbit: Vec<((usize, usize), GroupElement)> = Vec::new();
        for x in g.elements() {
            let p = (perms[x.index()][i0], perms[x.index()][j0]);
            if !orbit.iter().any(|(o, _)| *o == p) {
                orbit.push((p, x));
            }
        }
        let span0 = q.arrows_between(i0, j0);
        let stab = stab_of(i0).intersection(&stab_of(j0));
        let orbit_arrows: Vec<usize> = orbit.iter().flat_map(|((s, t), _)| q.arrows_between(*s, *t)).collect();
        let monomial = orbit_arrows.iter().all(|&a| {
            g.elements().all(|x| mats[x.index()][a].iter().filter(|c| !c.is_zero()).count() == 1)
        });
        let diagonal = orbit.iter().all(|((s, t), _)| {
            let st = stab_of(*s).intersection(&stab_of(*t));
            q.arrows_between(*s, *t).iter().all(|&a| st.elements().iter().all(|x| !mats[x.index()][a][a].is_zero()))
        });
        for (p, _) in &orbit {
            done.insert(*p);
        }
        if monomial && diagonal {
            for ((s, t), _) in &orbit {
                let rows = q
                    .arrows_between(*s, *t)
                    .iter()
                    .map(|&a| (0..m).map(|b| if a == b { Scalar::one() } else { Scalar::zero() }).collect())
                    .collect();
                new_rows.insert((*s, *t), rows);
            }
            continue;
        }
        changed = true;
        let mut eigen: Vec<Vec<Scalar>> = Vec::new();
        for chi in characters_of(&stab) {
            let mut proj = vec![vec![Scalar::zero(); m]; span0.len()];
            for &s in stab.elements() {
                let w = chi.at(s).inverse().expect("roots of unity are invertible");
                for (r, &a) in span0.iter().enumerate() {
                    for b in 0..m {
                        let c = &mats[s.index()][a][b];
                        if !c.is_zero() {
                            proj[r][b] += &(&w * c);
                        }
                    }
                }
            }
            for row in proj {
                let Some(lead) = row.iter().find(|c| !c.is_zero()).cloned() else { continue };
                let inv = lead.inverse().expect("nonzero");
                let v: Vec<Scalar> = row.iter().map(|c| c * &inv).collect();
                let mut trial = eigen.clone();
                trial.push(v.clone());
                if linalg::rank(&trial) == trial.len() {
                    eigen.push(v);
                }
            }
        }
        if eigen.len() != span0.len() {
            return Err(ActionError::ConductorTooSmall);
        }
        for ((s, t), x) in &orbit {
            let rows: Vec<Vec<Scalar>> = eigen.iter().map(|v| linalg::mat_mul(std::slice::from_ref(v), &mats[x.index()]).remove(0)).collect();
            new_rows.insert((*s, *t), rows);
        }
    }

    if !changed {
        let action = MonomialAction::from_matrices(g, q, perms, &mats).expect("monomial");
        for a in 0..m {
            action.chi_of(a)?;
        }
        let changes = pairs
            .iter()
            .map(|&(s, t)| {
                let arrows = q.arrows_between(s, t);
                let id = linalg::identity(arrows.len());
                SpanChange { source: s, target: t, old_arrows: arrows.clone(), new_arrows: arrows, matrix: id.clone(), inverse: id }
            })
            .collect();
        return Ok(Normalized { action, old_quiver: q.clone(), changes });
    }

    // new quiver: each span's new arrows replace its old arrows at the first old position
    let mut names: Vec<(String, usize, usize)> = Vec::new();
    let mut new_index: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let mut emitted = BTreeSet::new();
    for a in q.arrows() {
        let key = (a.source, a.target);
        if !emitted.insert(key) {
            continue;
        }
        let rows = &new_rows[&key];
        let mut idx = Vec::new();
        for row in rows {
            let coords: Vec<(usize, Scalar)> =
                row.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(b, c)| (b, c.clone())).collect();
            idx.push(names.len());
            names.push((combination_name(q, &coords), a.source, a.target));
        }
        new_index.insert(key, idx);
    }
    let ids: BTreeSet<&String> = names.iter().map(|(n, _, _)| n).collect();
    if ids.len() != names.len() {
        return Err(ActionError::InvalidAction("normalized arrow names collide".into()));
    }
    let vertex_ids: Vec<&str> = q.vertices().iter().map(String::as_str).collect();
    let triples: Vec<(&str, &str, &str, i32)> =
        names.iter().map(|(n, s, t)| (n.as_str(), q.vertex_id(*s), q.vertex_id(*t), 0)).collect();
    let nq = Quiver::graded(&vertex_ids, &triples).map_err(|e| ActionError::InvalidAction(e.to_string()))?;

    let mut changes = Vec::new();
    for (&(s, t), rows) in &new_rows {
        let old = q.arrows_between(s, t);
        let matrix: Matrix = rows.iter().map(|r| old.iter().map(|&a| r[a].clone()).collect()).collect();
        let inv_t = linalg::invert(&matrix).ok_or(ActionError::ConductorTooSmall)?;
        changes.push(SpanChange {
            source: s,
            target: t,
            old_arrows: old,
            new_arrows: new_index[&(s, t)].clone(),
            matrix,
            inverse: inv_t,
        });
    }
    let change_of: BTreeMap<(usize, usize), &SpanChange> = changes.iter().map(|c| ((c.source, c.target), c)).collect();

    let mut arrow_tables = Vec::with_capacity(g.order());
    for x in g.elements() {
        let mut images = Vec::with_capacity(names.len());
        for ch in &changes {
            for row in &ch.matrix {
                // image in old coordinates, then in the new basis of the target span
                let mut img = vec![Scalar::zero(); m];
                for (k, &a) in ch.old_arrows.iter().enumerate() {
                    if row[k].is_zero() {
                        continue;
                    }
                    for b in 0..m {
                        let c = &mats[x.index()][a][b];
                        if !c.is_zero() {
                            img[b] += &(&row[k] * c);
                        }
                    }
                }
                let key = (perms[x.index()][ch.source], perms[x.index()][ch.target]);
                let target = change_of[&key];
                let coords: Vec<Scalar> = target.old_arrows.iter().map(|&a| img[a].clone()).collect();
                let newc = linalg::mat_mul(&[coords], &target.inverse).remove(0);
                let mut nz = newc.iter().enumerate().filter(|(_, c)| !c.is_zero());
                let (t, c) = nz.next().ok_or(ActionError::ConductorTooSmall)?;
                if nz.next().is_some() {
                    return Err(ActionError::ConductorTooSmall);
                }
                images.push((target.new_arrows[t], c.clone()));
            }
        }
        let mut table = vec![(Scalar::zero(), 0); names.len()];
        let order: Vec<usize> = changes.iter().flat_map(|c| c.new_arrows.iter().copied()).collect();
        for (slot, (b, c)) in order.into_iter().zip(images) {
            table[slot] = (c, b);
        }
        arrow_tables.push(table);
    }
    let action = MonomialAction::from_tables(g, &nq, perms, arrow_tables);
    for a in 0..nq.arrow_count() {
        action.chi_of(a)?;
    }
    Ok(Normalized { action, old_quiver: q.clone(), changes })
}

/// Orbit representatives `Ĩ`, elements `κ_i`, the sets `R_{i∘j∘}`, the distinguished
/// arrows `D` and their characters `χ_a`.
#[derive(Clone, Debug)]
pub struct ChoiceData {
    pub reps: Vec<usize>,
    pub rep_of: Vec<usize>,
    pub kappa: Vec<GroupElement>,
    pub r: BTreeMap<(usize, usize), Vec<usize>>,
    pub distinguished: Vec<usize>,
    pub chi: BTreeMap<usize, Character>,
    /// For every arrow `b`, the distinguished arrow in its orbit.
    pub origin: Vec<usize>,
}

/// User-supplied replacements for the default choices.
#[derive(Clone, Debug, Default)]
pub struct ChoiceOverrides {
    pub reps: Option<Vec<usize>>,
    pub kappa: BTreeMap<usize, GroupElement>,
    pub r: BTreeMap<(usize, usize), Vec<usize>>,
}

impl ChoiceData {
    /// `D(i∘, j∘)`.
    pub fn distinguished_between(&self, q: &Quiver, i: usize, j: usize) -> Vec<usize> {
        self.distinguished
            .iter()
            .copied()
            .filter(|&a| {
                let ar = q.arrow(a);
                ar.target == j && self.rep_of[ar.source] == i
            })
            .collect()
    }

    pub fn is_rep(&self, v: usize) -> bool {
        self.reps.binary_search(&v).is_ok()
    }
}

pub fn make_choices(act: &MonomialAction, overrides: &ChoiceOverrides) -> Result<ChoiceData, ActionError> {
    let q = act.quiver();
    let g = act.group();
    let n = q.vertex_count();
    let orbits: Vec<Vec<usize>> = (0..n).map(|v| act.orbit(v)).collect();
    for v in 0..n {
        for &w in &orbits[v] {
            assert!(act.stabilizer(v) == act.stabilizer(w), "stabilizers differ along an orbit");
        }
    }
    let bad = |msg: String| ActionError::InvalidChoice(msg);

    let reps: Vec<usize> = match &overrides.reps {
        None => (0..n).filter(|&v| orbits[v][0] == v).collect(),
        Some(list) => {
            let mut list = list.clone();
            list.sort_unstable();
            list.dedup();
            let covered: BTreeSet<Vec<usize>> = list.iter().map(|&v| orbits[v].clone()).collect();
            let all: BTreeSet<Vec<usize>> = orbits.iter().cloned().collect();
            if covered.len() != list.len() || covered != all {
                return Err(bad("representatives must contain exactly one vertex per orbit".into()));
            }
            list
        }
    };
    let mut rep_of = vec![0; n];
    for &r in &reps {
        for &v in &orbits[r] {
            rep_of[v] = r;
        }
    }
    let mut kappa = vec![GroupElement::IDENTITY; n];
    for v in 0..n {
        if let Some(&k) = overrides.kappa.get(&v) {
            if act.vertex_image(k, v) != rep_of[v] {
                return Err(bad(format!("kappa of `{}` does not map it to its representative", q.vertex_id(v))));
            }
            if v == rep_of[v] && k != GroupElement::IDENTITY {
                return Err(bad(format!("kappa of representative `{}` must be the identity", q.vertex_id(v))));
            }
            kappa[v] = k;
        } else {
            kappa[v] = g.elements().find(|&x| act.vertex_image(x, v) == rep_of[v]).expect("in orbit");
        }
    }

    let mut r = BTreeMap::new();
    for &i in &reps {
        for &j in &reps {
            let stab = act.stabilizer(j);
            let sub_orbit =
                |v: usize| -> BTreeSet<usize> { stab.elements().iter().map(|&x| act.vertex_image(x, v)).collect() };
            let list = match overrides.r.get(&(i, j)) {
                None => {
                    let mut out = Vec::new();
                    let mut seen = BTreeSet::new();
                    for &v in &orbits[i] {
                        if seen.insert(sub_orbit(v).into_iter().next().expect("nonempty")) {
                            out.push(v);
                        }
                    }
                    out
                }
                Some(list) => {
                    let mut list = list.clone();
                    list.sort_unstable();
                    if list.iter().any(|v| !orbits[i].contains(v)) {
                        return Err(bad(format!(
                            "R({}, {}) contains vertices outside the orbit of {}",
                            q.vertex_id(i),
                            q.vertex_id(j),
                            q.vertex_id(i)
                        )));
                    }
                    let hit: BTreeSet<BTreeSet<usize>> = list.iter().map(|&v| sub_orbit(v)).collect();
                    let all: BTreeSet<BTreeSet<usize>> = orbits[i].iter().map(|&v| sub_orbit(v)).collect();
                    if hit.len() != list.len() || hit != all {
                        return Err(bad(format!(
                            "R({}, {}) must meet each stabilizer orbit exactly once",
                            q.vertex_id(i),
                            q.vertex_id(j)
                        )));
                    }
                    list
                }
            };
            r.insert((i, j), list);
        }
    }

    let mut distinguished = Vec::new();
    for a in 0..q.arrow_count() {
        let ar = q.arrow(a);
        if rep_of[ar.target] == ar.target && r[&(rep_of[ar.source], ar.target)].contains(&ar.source) {
            distinguished.push(a);
        }
    }
    let mut chi = BTreeMap::new();
    for &a in &distinguished {
        chi.insert(a, act.chi_of(a)?);
    }
    let mut origin = vec![usize::MAX; q.arrow_count()];
    for &a in &distinguished {
        for b in act.arrow_orbit(a) {
            if origin[b] != usize::MAX {
                return Err(bad(format!("arrow orbit of `{}` has two distinguished arrows", q.arrow(b).id)));
            }
            origin[b] = a;
        }
    }
    if let Some(b) = origin.iter().position(|&o| o == usize::MAX) {
        return Err(bad(format!("arrow `{}` has no distinguished arrow in its orbit", q.arrow(b).id)));
    }
    Ok(ChoiceData { reps, rep_of, kappa, r, distinguished, chi, origin })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// The running example: `G = Z/3 × Z/3` acting on six vertices and fifteen arrows.
    pub(crate) fn example() -> (MonomialAction, Potential) {
        let mut arrows: Vec<(String, String, String)> = Vec::new();
        for l in 1..=3 {
            arrows.push((format!("x{l}"), format!("i{l}"), format!("i{l}")));
        }
        for l in 1..=3 {
            arrows.push((format!("y{l}"), format!("j{l}"), format!("j{}", l % 3 + 1)));
        }
        for l in 1..=3 {
            for m in 1..=3 {
                arrows.push((format!("u{l}{m}"), format!("i{l}"), format!("j{m}")));
            }
        }
        let q = Quiver::new(&["i1", "i2", "i3", "j1", "j2", "j3"], &arrows).unwrap();
        let grp = AbelianGroup::new(vec![3, 3]);
        let z = Scalar::root_of_unity(3, 1);
        let idx = |s: &str| q.arrow_by_id(s).unwrap();
        let shift = |l: usize| l % 3 + 1;
        let mut gv = vec![0usize; 6];
        let mut hv = vec![0usize; 6];
        for l in 1..=3 {
            gv[l - 1] = shift(l) - 1;
            gv[l + 2] = l + 2;
            hv[l - 1] = l - 1;
            hv[l + 2] = shift(l) + 2;
        }
        let mut ga = vec![(Scalar::zero(), 0); 15];
        let mut ha = vec![(Scalar::zero(), 0); 15];
        for l in 1..=3 {
            ga[idx(&format!("x{l}"))] = (Scalar::one(), idx(&format!("x{}", shift(l))));
            ha[idx(&format!("x{l}"))] = (z.clone(), idx(&format!("x{l}")));
            ga[idx(&format!("y{l}"))] = (Scalar::one(), idx(&format!("y{l}")));
            ha[idx(&format!("y{l}"))] = (Scalar::one(), idx(&format!("y{}", shift(l))));
            for m in 1..=3 {
                ga[idx(&format!("u{l}{m}"))] = (Scalar::one(), idx(&format!("u{}{m}", shift(l))));
                ha[idx(&format!("u{l}{m}"))] = (Scalar::one(), idx(&format!("u{l}{}", shift(m))));
            }
        }
        let act = MonomialAction::from_generators(&grp, &q, &[(gv, ga), (hv, ha)]).unwrap();
        let mut w = Potential::zero(&q);
        w.add_cycle(&q.path(&["y3", "y2", "y1"]).unwrap(), Scalar::one()).unwrap();
        for l in 1..=3 {
            let x = format!("x{l}");
            w.add_cycle(&q.path(&[&x, &x, &x]).unwrap(), Scalar::one()).unwrap();
        }
        (act, w)
    }

    pub(crate) fn kronecker_raw() -> RawAction {
        let q = Quiver::new(&["1", "2"], &[("a", "1", "2"), ("b", "1", "2")]).unwrap();
        RawAction {
            group: AbelianGroup::new(vec![2]),
            quiver: q,
            generators: vec![RawGenerator {
                vertices: vec![0, 1],
                arrows: vec![vec![(1, Scalar::one())], vec![(0, Scalar::one())]],
            }],
        }
    }

    #[test]
    fn orbits_and_stabilizers() {
        let (act, _) = example();
        let q = act.quiver().clone();
        let i1 = q.vertex("i1").unwrap();
        assert_eq!(act.orbit(i1), vec![0, 1, 2]);
        let h = act.group().element(&[0, 1]).unwrap();
        assert_eq!(act.stabilizer(i1).elements(), Subgroup::generated(act.group(), &[h]).elements());

        let triv = MonomialAction::trivial(&AbelianGroup::trivial(), &q);
        assert_eq!(triv.orbit(3), vec![3]);
        assert_eq!(triv.stabilizer(3).order(), 1);

        let kr = normalize(&kronecker_raw()).unwrap();
        assert_eq!(kr.action.stabilizer(0).order(), 2);
    }

    #[test]
    fn characters_of_arrows() {
        let (act, _) = example();
        let q = act.quiver().clone();
        let h = act.group().element(&[0, 1]).unwrap();
        let chi = act.chi_of(q.arrow_by_id("x1").unwrap()).unwrap();
        assert_eq!(chi.at(h), Scalar::root_of_unity(3, 1));
        assert!(act.chi_of(q.arrow_by_id("y2").unwrap()).unwrap().is_trivial());
        // characters are constant along arrow orbits
        for a in 0..q.arrow_count() {
            let c = act.chi_of(a).unwrap();
            for x in act.group().elements() {
                assert_eq!(act.chi_of(act.arrow_image(x, a).1).unwrap(), c);
            }
        }
    }

    #[test]
    fn kronecker_normalization() {
        let raw = kronecker_raw();
        let n = normalize(&raw).unwrap();
        let nq = n.action.quiver();
        let ids: Vec<&str> = nq.arrows().iter().map(|a| a.id.as_str()).collect();
        assert_eq!(ids, vec!["a+b", "a-b"]);
        assert!(n.action.chi_of(0).unwrap().is_trivial());
        let sgn = n.action.chi_of(1).unwrap();
        assert_eq!(sgn.at(GroupElement(1)), Scalar::from_int(-1));
        // oracle: the swap matrix [[0,1],[1,0]] has eigenvectors (1,1) for 1 and (1,-1) for -1
        let ch = &n.changes[0];
        assert_eq!(ch.matrix, vec![vec![Scalar::one(), Scalar::one()], vec![Scalar::one(), Scalar::from_int(-1)]]);
        assert_eq!(linalg::mat_mul(&ch.matrix, &ch.inverse), linalg::identity(2));
        // the plain swap is not monomial on the stabilizer
        assert!(MonomialAction::from_generators(
            &raw.group,
            &raw.quiver,
            &[(vec![0, 1], vec![(Scalar::one(), 1), (Scalar::one(), 0)])]
        )
        .unwrap()
        .chi_of(0)
        .is_err());
    }

    #[test]
    fn monomial_input_is_unchanged() {
        let (act, w) = example();
        let raw = RawAction {
            group: act.group().clone(),
            quiver: act.quiver().clone(),
            generators: (0..2)
                .map(|k| {
                    let g = act.group().generator(k);
                    RawGenerator {
                        vertices: (0..6).map(|v| act.vertex_image(g, v)).collect(),
                        arrows: (0..15)
                            .map(|a| {
                                let (c, b) = act.arrow_image(g, a);
                                vec![(b, c.clone())]
                            })
                            .collect(),
                    }
                })
                .collect(),
        };
        let n = normalize(&raw).unwrap();
        assert!(n.is_identity());
        assert_eq!(n.action, act);
        assert_eq!(n.transform_potential(&w), w);
    }

    #[test]
    fn invalid_actions() {
        let mut raw = kronecker_raw();
        raw.generators[0].arrows[0] = vec![(0, Scalar::from_int(2))];
        raw.generators[0].arrows[1] = vec![(1, Scalar::one())];
        assert!(matches!(normalize(&raw), Err(ActionError::InvalidAction(_))));
        let mut raw = kronecker_raw();
        raw.generators[0].vertices = vec![1, 0];
        assert!(matches!(normalize(&raw), Err(ActionError::InvalidAction(_))));
    }

    #[test]
    fn potential_rewrites_in_new_basis() {
        let q = Quiver::new(&["1", "2"], &[("a", "1", "2"), ("b", "1", "2"), ("c", "2", "1")]).unwrap();
        let raw = RawAction {
            group: AbelianGroup::new(vec![2]),
            quiver: q.clone(),
            generators: vec![RawGenerator {
                vertices: vec![0, 1],
                arrows: vec![vec![(1, Scalar::one())], vec![(0, Scalar::one())], vec![(2, Scalar::one())]],
            }],
        };
        let n = normalize(&raw).unwrap();
        let mut w = Potential::zero(&q);
        w.add_cycle(&q.path(&["c", "a"]).unwrap(), Scalar::one()).unwrap();
        w.add_cycle(&q.path(&["c", "b"]).unwrap(), Scalar::one()).unwrap();
        let nw = n.transform_potential(&w);
        // a = ((a+b) + (a-b))/2, b = ((a+b) - (a-b))/2, so ca + cb = c(a+b)
        let nq = n.action.quiver();
        let mut expected = Potential::zero(nq);
        expected.add_cycle(&nq.path(&["c", "a+b"]).unwrap(), Scalar::one()).unwrap();
        assert_eq!(nw, expected);
        assert!(n.action.check_invariance(&nw).is_ok());
    }

    #[test]
    fn invariance() {
        let (act, w) = example();
        assert!(act.check_invariance(&w).is_ok());
        let q = act.quiver().clone();
        let mut x = Potential::zero(&q);
        x.add_cycle(&q.path(&["x1", "x1", "x1"]).unwrap(), Scalar::one()).unwrap();
        let wit = act.check_invariance(&x).unwrap_err();
        assert_eq!(wit.generator, 0);
        assert!(act.check_invariance(&Potential::zero(&q)).is_ok());
    }

    #[test]
    fn default_choices() {
        let (act, _) = example();
        let q = act.quiver().clone();
        let ch = make_choices(&act, &ChoiceOverrides::default()).unwrap();
        let v = |s: &str| q.vertex(s).unwrap();
        assert_eq!(ch.reps, vec![v("i1"), v("j1")]);
        let h = act.group().element(&[0, 1]).unwrap();
        assert_eq!(ch.kappa[v("j3")], h);
        assert_eq!(ch.kappa[v("j2")], act.group().pow(h, 2));
        let djj = ch.distinguished_between(&q, v("j1"), v("j1"));
        assert_eq!(djj, vec![q.arrow_by_id("y3").unwrap()]);
        assert_eq!(ch.distinguished_between(&q, v("i1"), v("j1")), vec![q.arrow_by_id("u11").unwrap()]);
        assert_eq!(ch.distinguished_between(&q, v("i1"), v("i1")), vec![q.arrow_by_id("x1").unwrap()]);

        let triv = MonomialAction::trivial(&AbelianGroup::trivial(), &q);
        let tc = make_choices(&triv, &ChoiceOverrides::default()).unwrap();
        assert_eq!(tc.reps, (0..6).collect::<Vec<_>>());
        assert!(tc.kappa.iter().all(|&k| k == GroupElement::IDENTITY));
        assert_eq!(tc.distinguished, (0..15).collect::<Vec<_>>());
    }

    #[test]
    fn overrides_are_validated() {
        let (act, _) = example();
        let q = act.quiver().clone();
        let v = |s: &str| q.vertex(s).unwrap();
        let ok = ChoiceOverrides { reps: Some(vec![v("i2"), v("j3")]), ..Default::default() };
        let ch = make_choices(&act, &ok).unwrap();
        assert_eq!(ch.reps, vec![v("i2"), v("j3")]);
        let two = ChoiceOverrides { reps: Some(vec![v("i1"), v("i2"), v("j1")]), ..Default::default() };
        assert!(matches!(make_choices(&act, &two), Err(ActionError::InvalidChoice(_))));
        let mut bad_kappa = ChoiceOverrides::default();
        bad_kappa.kappa.insert(v("j3"), act.group().element(&[1, 0]).unwrap());
        assert!(matches!(make_choices(&act, &bad_kappa), Err(ActionError::InvalidChoice(_))));
        let mut bad_r = ChoiceOverrides::default();
        bad_r.r.insert((v("j1"), v("j1")), vec![v("j1")]);
        assert!(matches!(make_choices(&act, &bad_r), Err(ActionError::InvalidChoice(_))));
    }

    #[test]
    fn orbit_counting() {
        let (act, _) = example();
        let ch = make_choices(&act, &ChoiceOverrides::default()).unwrap();
        let g = act.group().order();
        for &i in &ch.reps {
            for &j in &ch.reps {
                let gij = act.pair_stabilizer(i, j).order();
                let expected = g * gij / (act.stabilizer(i).order() * act.stabilizer(j).order());
                assert_eq!(ch.r[&(i, j)].len(), expected);
                assert_eq!(ch.r[&(i, j)].len(), ch.r[&(j, i)].len());
            }
        }
    }

    #[test]
    fn inverse_elements_undo() {
        let (act, _) = example();
        for x in act.group().elements() {
            let xi = act.group().inverse(x);
            for a in 0..act.quiver().arrow_count() {
                let (c1, b) = act.arrow_image(x, a);
                let (c2, back) = act.arrow_image(xi, b);
                assert_eq!(back, a);
                assert!((c1 * c2).is_one());
            }
        }
    }
}
