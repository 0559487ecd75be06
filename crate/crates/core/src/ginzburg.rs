//! Ginzburg dg algebras, the extended action on `Q̄`, and the dg map `Φ` onto
//! `ē(Γ_{Q,W}G)ē` together with its generator-level verification.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::action::{ChoiceData, MonomialAction};
use crate::construct::{Phi, QGQuiver};
use crate::group::GroupElement;
use crate::quiver::{partial, Path, PathElement, Potential, Quiver, QuiverError};
use crate::scalar::Scalar;
use crate::skew::{ebar, iota_path, rank, same_span, unit_idempotent, SkewContext, SkewElement};

/// Which generator of `Q̄` an arrow index stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Arrow(usize),
    Star(usize),
    Loop(usize),
}

/// `Q̄`: the arrows of `Q` in degree 0, then `a*` in degree −1, then `t_i` in degree −2.
/// Vertex indices agree with the base quiver.
#[derive(Clone, Debug)]
pub struct GradedQuiver {
    base: Arc<Quiver>,
    quiver: Arc<Quiver>,
}

impl GradedQuiver {
    pub fn new(base: &Arc<Quiver>) -> Result<GradedQuiver, QuiverError> {
        let m = base.arrow_count();
        let mut ids: Vec<(String, String, String, i32)> = Vec::with_capacity(2 * m + base.vertex_count());
        for a in base.arrows() {
            let (s, t) = (base.vertex_id(a.source).to_string(), base.vertex_id(a.target).to_string());
            ids.push((a.id.clone(), s, t, 0));
        }
        for a in base.arrows() {
            let (s, t) = (base.vertex_id(a.source).to_string(), base.vertex_id(a.target).to_string());
            ids.push((format!("{}*", a.id), t, s, -1));
        }
        for v in base.vertices() {
            ids.push((format!("t_{v}"), v.clone(), v.clone(), -2));
        }
        let refs: Vec<(&str, &str, &str, i32)> =
            ids.iter().map(|(a, s, t, d)| (a.as_str(), s.as_str(), t.as_str(), *d)).collect();
        let quiver = Quiver::graded(base.vertices(), &refs)?;
        Ok(GradedQuiver { base: base.clone(), quiver })
    }

    pub fn base(&self) -> &Arc<Quiver> {
        &self.base
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn star(&self, a: usize) -> usize {
        self.base.arrow_count() + a
    }

    pub fn loop_at(&self, v: usize) -> usize {
        2 * self.base.arrow_count() + v
    }

    pub fn generator(&self, idx: usize) -> Generator {
        let m = self.base.arrow_count();
        match idx {
            i if i < m => Generator::Arrow(i),
            i if i < 2 * m => Generator::Star(i - m),
            i => Generator::Loop(i - 2 * m),
        }
    }

    /// An element of `kQ` viewed in `kQ̄`.
    pub fn embed(&self, x: &PathElement) -> PathElement {
        let mut out = PathElement::zero(&self.quiver);
        for (p, c) in x.terms() {
            out.add_term(self.embed_path(p), c.clone());
        }
        out
    }

    fn embed_path(&self, p: &Path) -> Path {
        if p.is_stationary() {
            return Path::stationary(p.source());
        }
        let arrows: Vec<usize> = p.arrows().collect();
        self.quiver.path_from_indices(&arrows).expect("same endpoints")
    }
}

/// The differential of `Γ_{Q,W}`.
#[derive(Clone, Debug)]
pub struct Ginzburg {
    gq: Arc<GradedQuiver>,
    w: Potential,
    images: Vec<PathElement>,
}

impl Ginzburg {
    pub fn new(gq: &Arc<GradedQuiver>, w: &Potential) -> Ginzburg {
        let q = gq.quiver();
        let base = gq.base();
        let images = (0..q.arrow_count())
            .map(|idx| match gq.generator(idx) {
                Generator::Arrow(_) => PathElement::zero(q),
                Generator::Star(a) => gq.embed(&partial(a, w)),
                Generator::Loop(v) => {
                    let mut out = PathElement::zero(q);
                    for (a, ar) in base.arrows().iter().enumerate() {
                        let star = gq.star(a);
                        if ar.target == v {
                            out.add_term(q.path_from_indices(&[a, star]).expect("composable"), Scalar::one());
                        }
                        if ar.source == v {
                            out.add_term(q.path_from_indices(&[star, a]).expect("composable"), Scalar::from_int(-1));
                        }
                    }
                    out
                }
            })
            .collect();
        Ginzburg { gq: gq.clone(), w: w.clone(), images }
    }

    pub fn graded_quiver(&self) -> &Arc<GradedQuiver> {
        &self.gq
    }

    pub fn potential(&self) -> &Potential {
        &self.w
    }

    /// `d` of a single arrow of `Q̄`.
    pub fn generator_image(&self, idx: usize) -> &PathElement {
        &self.images[idx]
    }

    /// Extends `d` by `d(xy) = d(x)y + (−1)^{deg x} x d(y)`.
    pub fn differential(&self, x: &PathElement) -> PathElement {
        let q = self.gq.quiver();
        let mut out = PathElement::zero(q);
        for (p, c) in x.terms() {
            let arrows: Vec<usize> = p.arrows().collect();
            let mut degree = 0;
            for k in 0..arrows.len() {
                let image = &self.images[arrows[k]];
                if !image.is_zero() {
                    let left = segment(q, &arrows[..k], p.target());
                    let right = segment(q, &arrows[k + 1..], p.source());
                    let sign = if degree % 2 == 0 { c.clone() } else { -c };
                    let term = PathElement::from_path(q, left).mul(image).mul(&PathElement::from_path(q, right));
                    out = out.add(&term.scale(&sign));
                }
                degree += q.arrow(arrows[k]).degree;
            }
        }
        out
    }
}

fn segment(q: &Quiver, arrows: &[usize], endpoint: usize) -> Path {
    q.path_from_indices(arrows).unwrap_or_else(|| Path::stationary(endpoint))
}

/// The action on `Q̄`: `g(a*) = λ⁻¹ b*` when `g(a) = λ b`, and `g(t_i) = t_{g(i)}`.
pub fn extend_action(act: &MonomialAction, gq: &GradedQuiver) -> MonomialAction {
    let grp = act.group();
    let base = gq.base();
    let mut vertex = Vec::with_capacity(grp.order());
    let mut arrow = Vec::with_capacity(grp.order());
    for g in grp.elements() {
        vertex.push((0..base.vertex_count()).map(|v| act.vertex_image(g, v)).collect());
        let mut row: Vec<(Scalar, usize)> = Vec::with_capacity(gq.quiver().arrow_count());
        for a in 0..base.arrow_count() {
            let (c, b) = act.arrow_image(g, a);
            row.push((c.clone(), b));
        }
        for a in 0..base.arrow_count() {
            let (c, b) = act.arrow_image(g, a);
            row.push((c.inverse().expect("action scalars are nonzero"), gq.star(b)));
        }
        for v in 0..base.vertex_count() {
            row.push((Scalar::one(), gq.loop_at(act.vertex_image(g, v))));
        }
        arrow.push(row);
    }
    MonomialAction::from_tables(grp, gq.quiver(), vertex, arrow)
}

/// `d(x ⊗ g) = dx ⊗ g`.
pub fn skew_differential(gz: &Ginzburg, x: &SkewElement) -> SkewElement {
    let ctx = x.context();
    let q = gz.graded_quiver().quiver();
    let mut out = SkewElement::zero(ctx);
    for ((p, g), c) in x.terms() {
        let dp = gz.differential(&PathElement::monomial(q, p.clone(), c.clone()));
        for (r, k) in dp.terms() {
            out.add_term(r.clone(), *g, k.clone());
        }
    }
    out
}

/// Both dg algebras of the main theorem and the generator assignment `Φ`.
pub struct DgSetup {
    pub gamma: Ginzburg,
    pub gamma_g: Ginzburg,
    pub ctx: Arc<SkewContext>,
    pub phi: Phi,
    stars: Vec<SkewElement>,
    loops: Vec<SkewElement>,
}

impl DgSetup {
    /// Builds `Γ_{Q,W}`, `Γ_{Q_G,W_G}`, the skew algebra over `Q̄`, and `Φ` on generators.
    pub fn new(
        act: &MonomialAction,
        choices: &Arc<ChoiceData>,
        qg: &Arc<QGQuiver>,
        w: &Potential,
        wg: &Potential,
        bound: usize,
    ) -> Result<DgSetup, QuiverError> {
        let gq = Arc::new(GradedQuiver::new(act.quiver())?);
        let gqg = Arc::new(GradedQuiver::new(&qg.quiver)?);
        let gamma = Ginzburg::new(&gq, w);
        let gamma_g = Ginzburg::new(&gqg, wg);
        let ext = Arc::new(extend_action(act, &gq));
        let ctx = SkewContext::new(ext, bound);
        let phi = Phi::new(&ctx, choices, qg);
        let grp = act.group();
        let order = Scalar::from_int(grp.order() as i64);
        let stars = qg
            .arrows
            .iter()
            .map(|x| {
                let rho = &qg.vertices[x.source].character;
                let sigma = &qg.vertices[x.target].character;
                let i = qg.vertices[x.source].rep;
                let j = act.quiver().arrow(x.origin).target;
                let factor = order
                    .checked_div(&Scalar::from_int(act.pair_stabilizer(i, j).order() as i64))
                    .expect("nonzero");
                let star = Path::arrow(gq.quiver(), gq.star(x.origin));
                unit_idempotent(&ctx, rho)
                    .mul(&iota_path(&ctx, choices, &star))
                    .mul(&unit_idempotent(&ctx, sigma))
                    .scale(&factor)
            })
            .collect();
        let loops = qg
            .vertices
            .iter()
            .map(|v| {
                let factor = order
                    .checked_div(&Scalar::from_int(act.stabilizer(v.rep).order() as i64))
                    .expect("nonzero");
                let t = Path::arrow(gq.quiver(), gq.loop_at(v.rep));
                let e = unit_idempotent(&ctx, &v.character);
                e.mul(&iota_path(&ctx, choices, &t)).mul(&e).scale(&factor)
            })
            .collect();
        Ok(DgSetup { gamma, gamma_g, ctx, phi, stars, loops })
    }

    /// `Φ` on an arrow of `Q̄_G`.
    pub fn generator(&self, idx: usize) -> &SkewElement {
        match self.gamma_g.graded_quiver().generator(idx) {
            Generator::Arrow(a) => self.phi.arrow(a),
            Generator::Star(a) => &self.stars[a],
            Generator::Loop(v) => &self.loops[v],
        }
    }

    pub fn path(&self, p: &Path) -> SkewElement {
        if p.is_stationary() {
            return self.phi.vertex(p.source()).clone();
        }
        let mut arrows = p.arrows();
        let first = arrows.next().expect("nonempty");
        arrows.fold(self.generator(first).clone(), |acc, a| acc.mul(self.generator(a)))
    }

    /// `Φ` extended multiplicatively and linearly.
    pub fn apply(&self, x: &PathElement) -> SkewElement {
        let mut out = SkewElement::zero(&self.ctx);
        for (p, c) in x.terms() {
            out = out.add(&self.path(p).scale(c));
        }
        out
    }

    /// The same setup with `W_G` replaced (the generator images do not depend on it).
    pub fn with_target_potential(&self, wg: &Potential) -> DgSetup {
        DgSetup {
            gamma: self.gamma.clone(),
            gamma_g: Ginzburg::new(self.gamma_g.graded_quiver(), wg),
            ctx: self.ctx.clone(),
            phi: Phi::new(&self.ctx, self.phi.choices(), self.phi.qg()),
            stars: self.stars.clone(),
            loops: self.loops.clone(),
        }
    }
}

/// A counterexample: the generator and both sides of the failed identity.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Failure {
    pub generator: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub millis: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    /// Runs `f` over `cases` in parallel and records the first failing case in order.
    pub fn run<T, F>(&mut self, name: &str, cases: &[T], f: F)
    where
        T: Sync,
        F: Fn(&T) -> Option<Failure> + Sync,
    {
        let start = Instant::now();
        let failures: Vec<Option<Failure>> = cases.par_iter().map(&f).collect();
        let failure = failures.into_iter().flatten().next();
        self.checks.push(Check {
            name: name.to_string(),
            passed: failure.is_none(),
            cases: cases.len(),
            millis: start.elapsed().as_millis(),
            failure,
        });
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }
}

fn compare(generator: String, lhs: &SkewElement, rhs: &SkewElement) -> Option<Failure> {
    (lhs != rhs || lhs.truncated() || rhs.truncated()).then(|| Failure {
        generator,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    })
}

fn compare_paths(generator: String, lhs: &PathElement, rhs: &PathElement) -> Option<Failure> {
    (lhs != rhs).then(|| Failure { generator, lhs: lhs.to_string(), rhs: rhs.to_string() })
}

/// Checks that `Φ` is a dg isomorphism on generators: (a) `dΦ = Φd` on every `ã*`,
/// (b) on every `t`, (c) the `Φ(ã*)` form a basis of the degree −1 arrow part of
/// `ē(Γ_{Q,W}G)ē`, (d) the `Φ(t)` span its degree −2 arrow part. Also records
/// `d∘d = 0` on both sides, commutation of the action with `d`, and degrees.
pub fn verify_dg_iso(dg: &DgSetup) -> Report {
    let mut report = Report::default();
    let gqg = dg.gamma_g.graded_quiver();
    let qbar_g = gqg.quiver();
    let gq = dg.gamma.graded_quiver();
    let qbar = gq.quiver();
    let mg = gqg.base().arrow_count();
    let ng = gqg.base().vertex_count();

    let stars: Vec<usize> = (0..mg).map(|a| gqg.star(a)).collect();
    report.run("dg_commutes_star", &stars, |&idx| {
        if dg.generator(idx).truncated() {
            return Some(Failure { generator: qbar_g.arrow(idx).id.clone(), lhs: "truncated".into(), rhs: String::new() });
        }
        let lhs = skew_differential(&dg.gamma, dg.generator(idx));
        let rhs = dg.apply(dg.gamma_g.generator_image(idx));
        compare(qbar_g.arrow(idx).id.clone(), &lhs, &rhs)
    });
    let loops: Vec<usize> = (0..ng).map(|v| gqg.loop_at(v)).collect();
    report.run("dg_commutes_loop", &loops, |&idx| {
        if dg.generator(idx).truncated() {
            return Some(Failure { generator: qbar_g.arrow(idx).id.clone(), lhs: "truncated".into(), rhs: String::new() });
        }
        let lhs = skew_differential(&dg.gamma, dg.generator(idx));
        let rhs = dg.apply(dg.gamma_g.generator_image(idx));
        compare(qbar_g.arrow(idx).id.clone(), &lhs, &rhs)
    });

    let e = ebar(&dg.ctx, dg.phi.choices());
    let grp = dg.ctx.action().group();
    let brute = |kind: fn(&GradedQuiver, usize) -> usize, count: usize| -> Vec<SkewElement> {
        let mut out = Vec::new();
        for x in 0..count {
            let p = Path::arrow(qbar, kind(gq, x));
            for g in grp.elements() {
                let y = e.mul(&SkewElement::basis(&dg.ctx, p.clone(), g)).mul(&e);
                if !y.is_zero() {
                    out.push(y);
                }
            }
        }
        out
    };
    let base_m = gq.base().arrow_count();
    let base_n = gq.base().vertex_count();
    let star_images: Vec<SkewElement> = stars.iter().map(|&i| dg.generator(i).clone()).collect();
    report.run("star_basis", &[()], |_| {
        let spanning = brute(GradedQuiver::star, base_m);
        let independent = rank(&star_images) == star_images.len();
        (!independent || !same_span(&star_images, &spanning)).then(|| Failure {
            generator: "degree -1".into(),
            lhs: format!("rank {} of {} images", rank(&star_images), star_images.len()),
            rhs: format!("rank {} of corner", rank(&spanning)),
        })
    });
    let loop_images: Vec<SkewElement> = loops.iter().map(|&i| dg.generator(i).clone()).collect();
    report.run("loop_span", &[()], |_| {
        let spanning = brute(GradedQuiver::loop_at, base_n);
        (!same_span(&loop_images, &spanning)).then(|| Failure {
            generator: "degree -2".into(),
            lhs: format!("rank {} of {} images", rank(&loop_images), loop_images.len()),
            rhs: format!("rank {} of corner", rank(&spanning)),
        })
    });

    let all_g: Vec<usize> = (0..qbar_g.arrow_count()).collect();
    report.run("degree", &all_g, |&idx| {
        let want = qbar_g.arrow(idx).degree;
        let img = dg.generator(idx);
        img.terms().keys().find(|(p, _)| qbar.degree(p) != want).map(|(p, _)| Failure {
            generator: qbar_g.arrow(idx).id.clone(),
            lhs: format!("degree {}", qbar.degree(p)),
            rhs: format!("degree {want}"),
        })
    });
    for (name, gz) in [("dd_zero_source", &dg.gamma), ("dd_zero_target", &dg.gamma_g)] {
        let q = gz.graded_quiver().quiver().clone();
        let gens: Vec<usize> = (0..q.arrow_count()).collect();
        report.run(name, &gens, |&idx| {
            let dd = gz.differential(gz.generator_image(idx));
            compare_paths(q.arrow(idx).id.clone(), &dd, &PathElement::zero(&q))
        });
    }
    let act = dg.ctx.action().clone();
    let cases: Vec<(GroupElement, usize)> =
        grp.elements().flat_map(|g| (0..qbar.arrow_count()).map(move |i| (g, i))).collect();
    report.run("action_commutes_with_d", &cases, |&(g, idx)| {
        let x = PathElement::arrow(qbar, idx);
        let lhs = act.apply_element(g, dg.gamma.generator_image(idx));
        let rhs = dg.gamma.differential(&act.apply_element(g, &x));
        compare_paths(format!("{} on {}", grp.format(g), qbar.arrow(idx).id), &lhs, &rhs)
    });
    report
}

/// `W_G` with the coefficient of its first cycle doubled.
pub fn perturb(wg: &Potential) -> Potential {
    let mut out = wg.clone();
    if let Some((c, coeff)) = wg.terms().iter().next() {
        out.add_cycle(c, coeff.clone()).expect("cycle");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::tests::example;
    use crate::action::{make_choices, ChoiceOverrides};
    use crate::construct::{build_qg, compute_wg};
    use crate::group::AbelianGroup;
    use crate::skew::DEFAULT_TRUNCATION;

    fn example_gamma() -> (MonomialAction, Ginzburg) {
        let (act, w) = example();
        let gq = Arc::new(GradedQuiver::new(act.quiver()).unwrap());
        let gz = Ginzburg::new(&gq, &w);
        (act, gz)
    }

    fn dg_for(act: MonomialAction, w: Potential) -> (DgSetup, Potential) {
        let act = Arc::new(act);
        let choices = Arc::new(make_choices(&act, &ChoiceOverrides::default()).unwrap());
        let qg = Arc::new(build_qg(&act, &choices));
        let wg = compute_wg(&act, &choices, &qg, &w).unwrap();
        let dg = DgSetup::new(&act, &choices, &qg, &w, &wg, DEFAULT_TRUNCATION).unwrap();
        (dg, wg)
    }

    #[test]
    fn graded_quiver_layout() {
        let (act, gz) = example_gamma();
        let gq = gz.graded_quiver();
        let q = act.quiver();
        assert_eq!(gq.quiver().arrow_count(), 2 * q.arrow_count() + q.vertex_count());
        let y1 = q.arrow_by_id("y1").unwrap();
        let star = gq.quiver().arrow(gq.star(y1));
        assert_eq!(star.id, "y1*");
        assert_eq!((star.source, star.target, star.degree), (q.arrow(y1).target, q.arrow(y1).source, -1));
        let t = gq.quiver().arrow(gq.loop_at(0));
        assert_eq!((t.source, t.target, t.degree), (0, 0, -2));
        assert_eq!(gq.generator(gq.star(y1)), Generator::Star(y1));
    }

    #[test]
    fn differential_on_generators() {
        let (act, gz) = example_gamma();
        let gq = gz.graded_quiver();
        let qb = gq.quiver();
        let y1 = act.quiver().arrow_by_id("y1").unwrap();
        assert!(gz.generator_image(y1).is_zero());
        let expected = PathElement::from_path(qb, qb.path(&["y3", "y2"]).unwrap());
        assert_eq!(*gz.generator_image(gq.star(y1)), expected);
        // d(t_{i1}): x1 loop contributes [x1, x1*]; u1m leave i1; nothing else touches i1
        let i1 = act.quiver().vertex("i1").unwrap();
        let dt = gz.generator_image(gq.loop_at(i1));
        let mut oracle = PathElement::zero(qb);
        for a in 0..act.quiver().arrow_count() {
            let p = PathElement::arrow(qb, a);
            let s = PathElement::arrow(qb, gq.star(a));
            let v = PathElement::vertex(qb, i1);
            oracle = oracle.add(&v.mul(&p.mul(&s).sub(&s.mul(&p))).mul(&v));
        }
        assert_eq!(*dt, oracle);
        assert_eq!(dt.terms().len(), 2 + 3);
    }

    #[test]
    fn d_squared_vanishes() {
        let (_, gz) = example_gamma();
        let q = gz.graded_quiver().quiver().clone();
        for idx in 0..q.arrow_count() {
            assert!(gz.differential(gz.generator_image(idx)).is_zero(), "{}", q.arrow(idx).id);
        }
    }

    #[test]
    fn leibniz_sign() {
        let (act, gz) = example_gamma();
        let gq = gz.graded_quiver();
        let qb = gq.quiver();
        let y1 = act.quiver().arrow_by_id("y1").unwrap();
        let y2 = act.quiver().arrow_by_id("y2").unwrap();
        // y1* y2*: d = d(y1*) y2* − y1* d(y2*)
        let a = PathElement::arrow(qb, gq.star(y1));
        let b = PathElement::arrow(qb, gq.star(y2));
        let lhs = gz.differential(&a.mul(&b));
        let rhs = gz.differential(&a).mul(&b).sub(&a.mul(&gz.differential(&b)));
        assert_eq!(lhs, rhs);
        assert!(!lhs.is_zero());
    }

    #[test]
    fn extended_action_examples() {
        let (act, gz) = example_gamma();
        let gq = gz.graded_quiver();
        let ext = extend_action(&act, gq);
        let grp = act.group();
        let h = grp.element(&[0, 1]).unwrap();
        let g = grp.element(&[1, 0]).unwrap();
        let x1 = act.quiver().arrow_by_id("x1").unwrap();
        let (c, img) = ext.arrow_image(h, gq.star(x1));
        assert_eq!(img, gq.star(x1));
        assert_eq!(*c, Scalar::root_of_unity(3, 2));
        let i1 = act.quiver().vertex("i1").unwrap();
        let i2 = act.quiver().vertex("i2").unwrap();
        assert_eq!(ext.arrow_image(g, gq.loop_at(i1)).1, gq.loop_at(i2));
        let triv = extend_action(&MonomialAction::trivial(&AbelianGroup::trivial(), act.quiver()), gq);
        for a in 0..gq.quiver().arrow_count() {
            assert_eq!(triv.arrow_image(GroupElement::IDENTITY, a), (&Scalar::one(), a));
        }
        for g in grp.elements() {
            for idx in 0..gq.quiver().arrow_count() {
                let x = PathElement::arrow(gq.quiver(), idx);
                assert_eq!(
                    ext.apply_element(g, gz.generator_image(idx)),
                    gz.differential(&ext.apply_element(g, &x))
                );
            }
        }
    }

    #[test]
    fn skew_differential_rules() {
        let (act, w) = example();
        let (dg, _) = dg_for(act, w);
        let gq = dg.gamma.graded_quiver();
        let qb = gq.quiver();
        let ctx = &dg.ctx;
        let grp = ctx.action().group();
        let h = grp.element(&[0, 1]).unwrap();
        let y1 = gq.base().arrow_by_id("y1").unwrap();
        let y3 = gq.base().arrow_by_id("y3").unwrap();
        let a = SkewElement::basis(ctx, Path::arrow(qb, y1), h);
        assert!(skew_differential(&dg.gamma, &a).is_zero());
        let s = SkewElement::basis(ctx, Path::arrow(qb, gq.star(y1)), h);
        let want = SkewElement::basis(ctx, qb.path(&["y3", "y2"]).unwrap(), h);
        assert_eq!(skew_differential(&dg.gamma, &s), want);
        // d((a*⊗1)(b*⊗g)) = d(a*⊗1)(b*⊗g) − (a*⊗1)d(b*⊗g)
        let u = SkewElement::basis(ctx, Path::arrow(qb, gq.star(y3)), GroupElement::IDENTITY);
        for g in grp.elements() {
            let v = SkewElement::basis(ctx, Path::arrow(qb, gq.star(y1)), g);
            let lhs = skew_differential(&dg.gamma, &u.mul(&v));
            let rhs = skew_differential(&dg.gamma, &u)
                .mul(&v)
                .sub(&u.mul(&skew_differential(&dg.gamma, &v)));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn phi_generator_examples() {
        let (act, w) = example();
        let (dg, _) = dg_for(act, w);
        let ctx = &dg.ctx;
        let gqg = dg.gamma_g.graded_quiver();
        let gq = dg.gamma.graded_quiver();
        let qb = gq.quiver();
        let star = gqg.quiver().arrow_by_id("y3[tr,tr]*").unwrap();
        let tr = &dg.phi.qg().vertices[3].character;
        let y3 = gq.base().arrow_by_id("y3").unwrap();
        let raw = unit_idempotent(ctx, tr)
            .mul(&iota_path(ctx, dg.phi.choices(), &Path::arrow(qb, gq.star(y3))))
            .mul(&unit_idempotent(ctx, tr));
        assert_eq!(*dg.generator(star), raw.scale(&Scalar::from_int(3)));
        let t = gqg.quiver().arrow_by_id("t_i1:tr").unwrap();
        let e = unit_idempotent(ctx, &dg.phi.qg().vertices[0].character);
        let i1 = gq.base().vertex("i1").unwrap();
        let expected = e.mul(&SkewElement::basis(ctx, Path::arrow(qb, gq.loop_at(i1)), GroupElement::IDENTITY)).mul(&e);
        assert_eq!(*dg.generator(t), expected.scale(&Scalar::from_int(3)));
        assert_eq!(*dg.generator(gqg.loop_at(0)), *dg.generator(t));
    }

    #[test]
    fn example_verifies() {
        let (act, w) = example();
        let (dg, wg) = dg_for(act, w);
        let report = verify_dg_iso(&dg);
        assert!(report.passed(), "{:?}", report.first_failure());
        let bad = dg.with_target_potential(&perturb(&wg));
        let report = verify_dg_iso(&bad);
        assert!(!report.check("dg_commutes_star").unwrap().passed);
    }

    #[test]
    fn unit_triangle_coefficient_breaks_commutation() {
        let (act, w) = example();
        let (dg, wg) = dg_for(act, w);
        let mut unit = Potential::zero(wg.quiver());
        for c in wg.terms().keys() {
            unit.add_cycle(c, Scalar::one()).unwrap();
        }
        assert_ne!(unit, wg);
        let report = verify_dg_iso(&dg.with_target_potential(&unit));
        assert!(!report.check("dg_commutes_star").unwrap().passed);
    }

    #[test]
    fn trivial_group_verifies() {
        let (act, w) = example();
        let triv = MonomialAction::trivial(&AbelianGroup::trivial(), act.quiver());
        let (dg, wg) = dg_for(triv, w.clone());
        assert_eq!(wg.terms().len(), w.terms().len());
        assert!(verify_dg_iso(&dg).passed());
    }
}
