//! The quiver `Q_G`, the isomorphism `φ: kQ_G → ē(kQ)Gē`, the transport formulas
//! for `φ⁻¹ι`, and the potential `W_G`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::action::{ChoiceData, MonomialAction, NonInvariance};
use crate::group::{characters_of, Character, GroupElement};
use crate::quiver::{canonical_potential, cyc, shuffle_element, Path, PathElement, Potential, Quiver};
use crate::scalar::Scalar;
use crate::skew::{express, idempotent_at, iota, iota_path, unit_idempotent, SkewContext, SkewElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("element is not in the image of phi")]
    NotInImage,
    #[error("no group element maps `{0}` to a distinguished arrow")]
    NotInOrbitOfDistinguished(String),
    #[error("potential is not invariant: generator {} maps it off itself at `{}`", .0.element, .0.cycle)]
    NotInvariant(NonInvariance),
}

#[derive(Clone, Debug)]
pub struct QGVertex {
    pub rep: usize,
    pub character: Character,
}

/// The arrow `ã_{ρσ}: (i∘, ρ) → (j∘, σ)` coming from the distinguished arrow `origin`.
#[derive(Clone, Debug)]
pub struct QGArrow {
    pub origin: usize,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug)]
pub struct QGQuiver {
    pub quiver: Arc<Quiver>,
    pub vertices: Vec<QGVertex>,
    pub arrows: Vec<QGArrow>,
}

impl QGQuiver {
    pub fn vertex_of(&self, rep: usize, character: &Character) -> Option<usize> {
        self.vertices.iter().position(|v| v.rep == rep && v.character == *character)
    }

    /// Arrows of `Q_G` coming from the distinguished arrow `a`.
    pub fn arrows_from_origin(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.arrows.len()).filter(move |&k| self.arrows[k].origin == a)
    }

    /// `ã_{ρσ}` for given endpoints, if it exists.
    pub fn arrow_between(&self, origin: usize, source: usize, target: usize) -> Option<usize> {
        self.arrows.iter().position(|x| x.origin == origin && x.source == source && x.target == target)
    }
}

/// Builds `Q_G`: vertices `(i∘, ρ)` and an arrow `(i∘,ρ) → (j∘,σ)` for each
/// `a ∈ D(i∘, j∘)` with `ρ| = σ|·χ_a` on `G_{i∘j∘}`.
pub fn build_qg(act: &MonomialAction, choices: &ChoiceData) -> QGQuiver {
    let q = act.quiver();
    let mut vertices = Vec::new();
    for &v in &choices.reps {
        for character in characters_of(act.stabilizer(v)) {
            vertices.push(QGVertex { rep: v, character });
        }
    }
    let mut arrows = Vec::new();
    for &a in &choices.distinguished {
        let ar = q.arrow(a);
        let i = choices.rep_of[ar.source];
        let j = ar.target;
        let gij = act.pair_stabilizer(i, j);
        let chi = &choices.chi[&a];
        for (s, vs) in vertices.iter().enumerate().filter(|(_, x)| x.rep == i) {
            let rho = vs.character.restrict(&gij).expect("subgroup");
            for (t, vt) in vertices.iter().enumerate().filter(|(_, x)| x.rep == j) {
                let sigma = vt.character.restrict(&gij).expect("subgroup");
                if rho == sigma.product(chi) {
                    arrows.push(QGArrow { origin: a, source: s, target: t });
                }
            }
        }
    }
    let vid = |x: &QGVertex| format!("{}:{}", q.vertex_id(x.rep), x.character.name());
    let vertex_ids: Vec<String> = vertices.iter().map(vid).collect();
    let arrow_ids: Vec<(String, String, String)> = arrows
        .iter()
        .map(|x| {
            (
                format!(
                    "{}[{},{}]",
                    q.arrow(x.origin).id,
                    vertices[x.source].character.name(),
                    vertices[x.target].character.name()
                ),
                vertex_ids[x.source].clone(),
                vertex_ids[x.target].clone(),
            )
        })
        .collect();
    let quiver = Quiver::new(&vertex_ids, &arrow_ids).expect("generated ids are unique");
    QGQuiver { quiver, vertices, arrows }
}

/// `φ` on generators of `kQ_G`, evaluated in a skew context whose quiver extends `Q`.
pub struct Phi {
    ctx: Arc<SkewContext>,
    choices: Arc<ChoiceData>,
    qg: Arc<QGQuiver>,
    vertices: Vec<SkewElement>,
    arrows: Vec<SkewElement>,
}

impl Phi {
    pub fn new(ctx: &Arc<SkewContext>, choices: &Arc<ChoiceData>, qg: &Arc<QGQuiver>) -> Phi {
        let q = ctx.quiver();
        let vertices: Vec<SkewElement> = qg
            .vertices
            .iter()
            .map(|v| idempotent_at(ctx, choices, v.rep, &v.character).expect("representative"))
            .collect();
        let arrows = qg
            .arrows
            .iter()
            .map(|x| {
                let rho = &qg.vertices[x.source].character;
                let sigma = &qg.vertices[x.target].character;
                unit_idempotent(ctx, sigma)
                    .mul(&iota_path(ctx, choices, &Path::arrow(q, x.origin)))
                    .mul(&unit_idempotent(ctx, rho))
            })
            .collect();
        Phi { ctx: ctx.clone(), choices: choices.clone(), qg: qg.clone(), vertices, arrows }
    }

    pub fn context(&self) -> &Arc<SkewContext> {
        &self.ctx
    }

    pub fn choices(&self) -> &Arc<ChoiceData> {
        &self.choices
    }

    pub fn qg(&self) -> &Arc<QGQuiver> {
        &self.qg
    }

    pub fn vertex(&self, v: usize) -> &SkewElement {
        &self.vertices[v]
    }

    pub fn arrow(&self, a: usize) -> &SkewElement {
        &self.arrows[a]
    }

    pub fn path(&self, p: &Path) -> SkewElement {
        if p.is_stationary() {
            return self.vertices[p.source()].clone();
        }
        let mut arrows = p.arrows();
        let first = arrows.next().expect("nonempty");
        arrows.fold(self.arrows[first].clone(), |acc, a| acc.mul(&self.arrows[a]))
    }

    pub fn apply(&self, x: &PathElement) -> SkewElement {
        let mut out = SkewElement::zero(&self.ctx);
        for (p, c) in x.terms() {
            out = out.add(&self.path(p).scale(c));
        }
        out
    }

    /// Candidate `Q_G` paths whose arrows lie over the orbits of the arrows of `p`.
    fn candidates(&self, p: &Path) -> Vec<Path> {
        let qq = &self.qg.quiver;
        let origins: Vec<usize> = p.arrows().map(|b| self.choices.origin[b]).collect();
        // build from the source end (last written arrow) towards the target
        let mut partial: Vec<Vec<usize>> = vec![Vec::new()];
        for &a in origins.iter().rev() {
            let mut next = Vec::new();
            for seq in &partial {
                for k in self.qg.arrows_from_origin(a) {
                    if seq.last().is_none_or(|&prev| self.qg.arrows[prev].target == self.qg.arrows[k].source) {
                        let mut s = seq.clone();
                        s.push(k);
                        next.push(s);
                    }
                }
            }
            partial = next;
        }
        partial
            .into_iter()
            .map(|mut seq| {
                seq.reverse();
                qq.path_from_indices(&seq).expect("composable by construction")
            })
            .collect()
    }

    /// The unique preimage under `φ` of an element of `ē(kQ)Gē`.
    pub fn inverse(&self, x: &SkewElement) -> Result<PathElement, ConstructError> {
        let qq = &self.qg.quiver;
        let mut out = PathElement::zero(qq);
        let lengths: BTreeSet<usize> = x.terms().keys().map(|(p, _)| p.len()).collect();
        for len in lengths {
            let part = x.length_part(len);
            let cands: Vec<Path> = if len == 0 {
                (0..qq.vertex_count()).map(Path::stationary).collect()
            } else {
                let mut set = BTreeSet::new();
                for (p, _) in part.terms().keys() {
                    set.extend(self.candidates(p));
                }
                set.into_iter().collect()
            };
            let images: Vec<SkewElement> = cands.iter().map(|c| self.path(c)).collect();
            let coeffs = express(&images, &part).ok_or(ConstructError::NotInImage)?;
            for (c, k) in cands.into_iter().zip(coeffs) {
                out.add_term(c, k);
            }
        }
        Ok(out)
    }
}

/// Group elements `g` with `g(b) = λ·a` for the distinguished arrow `a` in the orbit
/// of `b`, with the scalars `λ`, in increasing order of `g`.
pub fn transporters(act: &MonomialAction, choices: &ChoiceData, b: usize) -> Vec<(GroupElement, Scalar)> {
    let a = choices.origin[b];
    act.group()
        .elements()
        .filter_map(|g| {
            let (c, img) = act.arrow_image(g, b);
            (img == a).then(|| (g, c.clone()))
        })
        .collect()
}

/// `φ⁻¹ι(b) = λ Σ_{ρ,σ} σ(gκ_{t(b)}⁻¹) ρ(g⁻¹κ_{s(a)}⁻¹κ_{s(b)}) ã_{ρσ}` where `g(b) = λa`.
pub fn transport_arrow(
    act: &MonomialAction,
    choices: &ChoiceData,
    qg: &QGQuiver,
    b: usize,
    g: GroupElement,
) -> Result<PathElement, ConstructError> {
    let q = act.quiver();
    let grp = act.group();
    let a = choices.origin[b];
    let (lambda, img) = act.arrow_image(g, b);
    if img != a {
        return Err(ConstructError::NotInOrbitOfDistinguished(q.arrow(b).id.clone()));
    }
    let bb = q.arrow(b);
    let sa = q.arrow(a).source;
    let k = &choices.kappa;
    let left = grp.op(g, grp.inverse(k[bb.target]));
    let right = grp.op(grp.op(grp.inverse(g), grp.inverse(k[sa])), k[bb.source]);
    let mut out = PathElement::zero(&qg.quiver);
    for x in qg.arrows_from_origin(a) {
        let ar = &qg.arrows[x];
        let sigma = &qg.vertices[ar.target].character;
        let rho = &qg.vertices[ar.source].character;
        let c = &(lambda * &sigma.at(left)) * &rho.at(right);
        out.add_term(Path::arrow(&qg.quiver, x), c);
    }
    Ok(out)
}

/// `cyc φ⁻¹ι(b_n ⋯ b_1)` by the closed formula, with `g_i(b_i) = λ_i a_i`.
/// `gs` defaults to the least valid element for each arrow.
pub fn transport_cycle(
    act: &MonomialAction,
    choices: &ChoiceData,
    qg: &QGQuiver,
    c: &Path,
    gs: Option<&[GroupElement]>,
) -> Result<Potential, ConstructError> {
    let q = act.quiver();
    let grp = act.group();
    let qq = &qg.quiver;
    let mut out = Potential::zero(qq);
    if c.is_stationary() {
        for (v, x) in qg.vertices.iter().enumerate() {
            if x.rep == choices.rep_of[c.source()] {
                out.add_cycle(&Path::stationary(v), Scalar::one()).expect("cycle");
            }
        }
        return Ok(out);
    }
    // index i = 1..n corresponds to written position n - i
    let n = c.len();
    let b: Vec<usize> = (0..n).map(|i| c.arrow_at(n - 1 - i)).collect();
    let g: Vec<GroupElement> = match gs {
        Some(list) => list.iter().rev().copied().collect(),
        None => b
            .iter()
            .map(|&x| {
                transporters(act, choices, x)
                    .first()
                    .map(|t| t.0)
                    .ok_or_else(|| ConstructError::NotInOrbitOfDistinguished(q.arrow(x).id.clone()))
            })
            .collect::<Result<_, _>>()?,
    };
    let mut lambda = Scalar::one();
    let mut a = Vec::with_capacity(n);
    for i in 0..n {
        let (l, img) = act.arrow_image(g[i], b[i]);
        if img != choices.origin[b[i]] {
            return Err(ConstructError::NotInOrbitOfDistinguished(q.arrow(b[i]).id.clone()));
        }
        lambda *= l;
        a.push(img);
    }
    // arguments x_i = g_i⁻¹ g_{i-1} κ_{s(a_i)}⁻¹ with g_0 = g_n
    let args: Vec<GroupElement> = (0..n)
        .map(|i| {
            let prev = g[(i + n - 1) % n];
            grp.op(grp.op(grp.inverse(g[i]), prev), grp.inverse(choices.kappa[q.arrow(a[i]).source]))
        })
        .collect();
    let start_rep = choices.rep_of[q.arrow(b[0]).source];
    for (v0, x0) in qg.vertices.iter().enumerate().filter(|(_, x)| x.rep == start_rep) {
        // walk σ_1 → σ_2 → … → σ_{n+1} along arrows lying over a_1, …, a_n
        let mut walks: Vec<(Vec<usize>, usize, Scalar)> = vec![(Vec::new(), v0, x0.character.at(args[0]))];
        for i in 0..n {
            let mut next = Vec::new();
            for (seq, v, coeff) in &walks {
                for k in qg.arrows_from_origin(a[i]) {
                    let ar = &qg.arrows[k];
                    if ar.source != *v {
                        continue;
                    }
                    let mut s = seq.clone();
                    s.push(k);
                    let c = if i + 1 < n { coeff * &qg.vertices[ar.target].character.at(args[i + 1]) } else { coeff.clone() };
                    next.push((s, ar.target, c));
                }
            }
            walks = next;
        }
        for (mut seq, end, coeff) in walks {
            if end != v0 {
                continue;
            }
            seq.reverse();
            let p = qq.path_from_indices(&seq).expect("composable");
            out.add_cycle(&p, &coeff * &lambda).expect("cycle");
        }
    }
    Ok(out)
}

/// `W_G = ῑ(W)`, cycle by cycle with [`transport_cycle`].
pub fn compute_wg(
    act: &MonomialAction,
    choices: &ChoiceData,
    qg: &QGQuiver,
    w: &Potential,
) -> Result<Potential, ConstructError> {
    act.check_invariance(w).map_err(ConstructError::NotInvariant)?;
    compute_wg_rotated(act, choices, qg, w, 0)
}

/// [`compute_wg`] on the lift that rotates every stored cycle by `k` places.
pub fn compute_wg_rotated(
    act: &MonomialAction,
    choices: &ChoiceData,
    qg: &QGQuiver,
    w: &Potential,
    k: usize,
) -> Result<Potential, ConstructError> {
    let q = act.quiver();
    let mut out = Potential::zero(&qg.quiver);
    for (c, coeff) in w.terms() {
        let lift = c.rotate(q, k);
        out = out.add(&transport_cycle(act, choices, qg, &lift, None)?.scale(coeff));
    }
    Ok(out)
}

/// `cyc φ⁻¹ι(x)` through the brute-force inverse of `φ`.
pub fn oracle_cyc_transport(phi: &Phi, x: &PathElement) -> Result<PathElement, ConstructError> {
    let ix = iota(phi.context(), phi.choices(), x);
    Ok(cyc(&phi.inverse(&ix)?))
}

/// Both sides of `s φ⁻¹ι(c) = cyc φ⁻¹ι(s c)` for a cycle `c`.
pub fn shuffle_exchange(phi: &Phi, c: &Path) -> Result<(PathElement, PathElement), ConstructError> {
    let q = phi.context().quiver();
    let x = PathElement::from_path(q, c.clone());
    let lhs = shuffle_element(&phi.inverse(&iota(phi.context(), phi.choices(), &x))?);
    let rhs = oracle_cyc_transport(phi, &shuffle_element(&x))?;
    Ok((lhs, rhs))
}

/// Canonical potential of `cyc φ⁻¹ι(c)` via the oracle.
pub fn oracle_transport_cycle(phi: &Phi, c: &Path) -> Result<Potential, ConstructError> {
    let q = phi.context().quiver();
    let x = oracle_cyc_transport(phi, &PathElement::from_path(q, c.clone()))?;
    Ok(canonical_potential(&x).expect("cyc output is cyclic"))
}

/// Counts of `Q_G` arrows per `(source, target)` vertex pair.
pub fn arrow_multiplicities(qg: &QGQuiver) -> BTreeMap<(usize, usize), usize> {
    let mut out = BTreeMap::new();
    for a in &qg.arrows {
        *out.entry((a.source, a.target)).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::action::tests::{example, kronecker_raw};
    use crate::action::{make_choices, normalize, ChoiceOverrides};
    use crate::group::AbelianGroup;
    use crate::skew::{ebar, DEFAULT_TRUNCATION};

    pub(crate) struct Setup {
        pub act: Arc<MonomialAction>,
        pub w: Potential,
        pub choices: Arc<ChoiceData>,
        pub qg: Arc<QGQuiver>,
        pub phi: Phi,
    }

    pub(crate) fn setup_from(act: MonomialAction, w: Potential) -> Setup {
        let act = Arc::new(act);
        let choices = Arc::new(make_choices(&act, &ChoiceOverrides::default()).unwrap());
        let qg = Arc::new(build_qg(&act, &choices));
        let ctx = SkewContext::new(act.clone(), DEFAULT_TRUNCATION);
        let phi = Phi::new(&ctx, &choices, &qg);
        Setup { act, w, choices, qg, phi }
    }

    fn example_setup() -> Setup {
        let (act, w) = example();
        setup_from(act, w)
    }

    fn qg_arrow(s: &Setup, id: &str) -> usize {
        s.qg.quiver.arrow_by_id(id).unwrap()
    }

    #[test]
    fn example_quiver() {
        let s = example_setup();
        let qq = &s.qg.quiver;
        assert_eq!(qq.vertex_count(), 6);
        assert_eq!(qq.arrow_count(), 15);
        let names: Vec<&str> = qq.vertices().iter().map(String::as_str).collect();
        assert_eq!(names, vec!["i1:tr", "i1:(1)", "i1:(2)", "j1:tr", "j1:(1)", "j1:(2)"]);
        let mixed = s.qg.arrows.iter().filter(|a| s.qg.vertices[a.source].rep != s.qg.vertices[a.target].rep).count();
        assert_eq!(mixed, 9);
        // x̃ arrows go (i, σω) → (i, σ)
        for id in ["x1[(1),tr]", "x1[(2),(1)]", "x1[tr,(2)]"] {
            qg_arrow(&s, id);
        }
        for id in ["y3[tr,tr]", "y3[(1),(1)]", "y3[(2),(2)]"] {
            let a = qg_arrow(&s, id);
            assert_eq!(qq.arrow(a).source, qq.arrow(a).target);
        }
    }

    #[test]
    fn trivial_group_copies_quiver() {
        let (act, w) = example();
        let q = act.quiver().clone();
        let triv = MonomialAction::trivial(&AbelianGroup::trivial(), &q);
        let s = setup_from(triv, w.clone());
        assert_eq!(s.qg.quiver.vertex_count(), q.vertex_count());
        assert_eq!(s.qg.quiver.arrow_count(), q.arrow_count());
        let wg = compute_wg(&s.act, &s.choices, &s.qg, &w).unwrap();
        assert_eq!(wg.terms().len(), w.terms().len());
        for (c, coeff) in w.terms() {
            let ids: Vec<String> = c.arrows().map(|a| format!("{}[tr,tr]", q.arrow(a).id)).collect();
            let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
            assert_eq!(wg.coefficient(&s.qg.quiver.path(&refs).unwrap()), *coeff);
        }
    }

    #[test]
    fn kronecker_quiver() {
        let n = normalize(&kronecker_raw()).unwrap();
        let w = Potential::zero(n.action.quiver());
        let s = setup_from(n.action, w);
        let names: Vec<&str> = s.qg.quiver.arrows().iter().map(|a| a.id.as_str()).collect();
        assert_eq!(names, vec!["a+b[tr,tr]", "a+b[(1),(1)]", "a-b[tr,(1)]", "a-b[(1),tr]"]);
    }

    #[test]
    fn phi_is_multiplicative() {
        let s = example_setup();
        let qq = s.qg.quiver.clone();
        let e = ebar(s.phi.context(), &s.choices);
        for a in 0..qq.arrow_count() {
            let pa = s.phi.arrow(a);
            assert_eq!(e.mul(pa).mul(&e), *pa);
            let src = qq.arrow(a).source;
            let tgt = qq.arrow(a).target;
            assert_eq!(s.phi.vertex(tgt).mul(pa).mul(s.phi.vertex(src)), *pa);
            for b in 0..qq.arrow_count() {
                let prod = s.phi.arrow(a).mul(s.phi.arrow(b));
                if qq.arrow(a).source == qq.arrow(b).target {
                    assert_eq!(prod, s.phi.path(&Path::arrow(&qq, a).compose(&Path::arrow(&qq, b)).unwrap()));
                    assert!(!prod.is_zero());
                } else {
                    assert!(prod.is_zero());
                }
            }
        }
        let y = qg_arrow(&s, "y3[tr,tr]");
        let q = s.act.quiver();
        let expected = unit_idempotent(s.phi.context(), &s.qg.vertices[3].character)
            .mul(&iota_path(s.phi.context(), &s.choices, &q.path(&["y3"]).unwrap()))
            .mul(&unit_idempotent(s.phi.context(), &s.qg.vertices[3].character));
        assert_eq!(*s.phi.arrow(y), expected);
    }

    #[test]
    fn phi_inverse_round_trip() {
        let s = example_setup();
        let qq = s.qg.quiver.clone();
        for v in 0..qq.vertex_count() {
            assert_eq!(s.phi.inverse(s.phi.vertex(v)).unwrap(), PathElement::vertex(&qq, v));
        }
        for len in 1..=3 {
            for p in qq.paths_of_length(len) {
                let x = PathElement::from_path(&qq, p.clone());
                assert_eq!(s.phi.inverse(&s.phi.path(&p)).unwrap(), x);
            }
        }
        // φ⁻¹ι(y1) = ỹ_{tr,tr} + ỹ_{τ,τ} + ỹ_{τ²,τ²}
        let q = s.act.quiver();
        let got = s.phi.inverse(&iota_path(s.phi.context(), &s.choices, &q.path(&["y1"]).unwrap())).unwrap();
        let mut expected = PathElement::zero(&qq);
        for id in ["y3[tr,tr]", "y3[(1),(1)]", "y3[(2),(2)]"] {
            expected.add_term(Path::arrow(&qq, qg_arrow(&s, id)), Scalar::one());
        }
        assert_eq!(got, expected);
        // something outside ē(kQ)Gē has no preimage
        let stray = SkewElement::basis(s.phi.context(), q.path(&["y1"]).unwrap(), GroupElement::IDENTITY);
        assert_eq!(s.phi.inverse(&stray), Err(ConstructError::NotInImage));
    }

    #[test]
    fn transport_arrow_matches_oracle() {
        let s = example_setup();
        let q = s.act.quiver();
        for b in 0..q.arrow_count() {
            let oracle = s.phi.inverse(&iota_path(s.phi.context(), &s.choices, &Path::arrow(q, b))).unwrap();
            let ts = transporters(&s.act, &s.choices, b);
            assert!(!ts.is_empty());
            for (g, _) in ts {
                assert_eq!(transport_arrow(&s.act, &s.choices, &s.qg, b, g).unwrap(), oracle);
            }
        }
        let y1 = q.arrow_by_id("y1").unwrap();
        let h2 = s.act.group().element(&[0, 2]).unwrap();
        let t = transport_arrow(&s.act, &s.choices, &s.qg, y1, h2).unwrap();
        assert_eq!(t.terms().len(), 3);
        assert!(t.terms().values().all(Scalar::is_one));
        assert!(transport_arrow(&s.act, &s.choices, &s.qg, y1, GroupElement::IDENTITY).is_err());
    }

    #[test]
    fn transport_cycle_examples() {
        let s = example_setup();
        let q = s.act.quiver();
        let qq = &s.qg.quiver;
        let y = transport_cycle(&s.act, &s.choices, &s.qg, &q.path(&["y3", "y2", "y1"]).unwrap(), None).unwrap();
        assert_eq!(y.terms().len(), 3);
        for id in ["y3[tr,tr]", "y3[(1),(1)]", "y3[(2),(2)]"] {
            assert!(y.coefficient(&qq.path(&[id, id, id]).unwrap()).is_one());
        }
        let x = transport_cycle(&s.act, &s.choices, &s.qg, &q.path(&["x1", "x1", "x1"]).unwrap(), None).unwrap();
        assert_eq!(x.terms().len(), 1);
        let tri = qq.path(&["x1[(1),tr]", "x1[(2),(1)]", "x1[tr,(2)]"]).unwrap();
        // the three rotations of the triangle each appear with coefficient 1
        assert_eq!(x.coefficient(&tri), Scalar::from_int(3));
        for c in [&["y3", "y2", "y1"][..], &["x1", "x1", "x1"], &["x2", "x2", "x2"], &["u11", "x1"]] {
            let Ok(p) = q.path(c) else { continue };
            if !p.is_cycle() {
                continue;
            }
            let formula = transport_cycle(&s.act, &s.choices, &s.qg, &p, None).unwrap();
            assert_eq!(formula, oracle_transport_cycle(&s.phi, &p).unwrap());
        }
    }

    #[test]
    fn example_wg() {
        let s = example_setup();
        let qq = &s.qg.quiver;
        let wg = compute_wg(&s.act, &s.choices, &s.qg, &s.w).unwrap();
        let tri = qq.path(&["x1[(1),tr]", "x1[(2),(1)]", "x1[tr,(2)]"]).unwrap();
        assert_eq!(wg.terms().len(), 4);
        // three x_l³ terms, each contributing the three rotations of the triangle
        assert_eq!(wg.coefficient(&tri), Scalar::from_int(9));
        for id in ["y3[tr,tr]", "y3[(1),(1)]", "y3[(2),(2)]"] {
            assert!(wg.coefficient(&qq.path(&[id, id, id]).unwrap()).is_one());
        }
        for k in 1..3 {
            assert_eq!(compute_wg_rotated(&s.act, &s.choices, &s.qg, &s.w, k).unwrap(), wg);
        }
        assert!(compute_wg(&s.act, &s.choices, &s.qg, &Potential::zero(s.act.quiver())).unwrap().is_zero());
    }

    #[test]
    fn wg_requires_invariance() {
        let s = example_setup();
        let q = s.act.quiver();
        let mut w = Potential::zero(q);
        w.add_cycle(&q.path(&["x1", "x1", "x1"]).unwrap(), Scalar::one()).unwrap();
        assert!(matches!(compute_wg(&s.act, &s.choices, &s.qg, &w), Err(ConstructError::NotInvariant(_))));
    }

    #[test]
    fn shuffle_exchange_holds() {
        let s = example_setup();
        let q = s.act.quiver();
        for c in q.cycle_classes(3) {
            let (lhs, rhs) = shuffle_exchange(&s.phi, &c).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn choice_of_transporter_is_irrelevant() {
        let s = example_setup();
        let q = s.act.quiver();
        let c = q.path(&["y3", "y2", "y1"]).unwrap();
        let base = transport_cycle(&s.act, &s.choices, &s.qg, &c, None).unwrap();
        let options: Vec<Vec<GroupElement>> =
            c.arrows().map(|b| transporters(&s.act, &s.choices, b).into_iter().map(|t| t.0).collect()).collect();
        for g0 in &options[0] {
            for g1 in &options[1] {
                for g2 in &options[2] {
                    let gs = [*g0, *g1, *g2];
                    assert_eq!(transport_cycle(&s.act, &s.choices, &s.qg, &c, Some(&gs)).unwrap(), base);
                }
            }
        }
    }
}
