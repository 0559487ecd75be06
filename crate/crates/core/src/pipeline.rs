//! The full pipeline from a monomial action and an invariant potential to `Q_G`, `W_G`
//! and the dg map, plus the exact property suites run by `verify`.

use std::sync::Arc;

use thiserror::Error;

use crate::action::{make_choices, ActionError, ChoiceData, ChoiceOverrides, MonomialAction};
use crate::construct::{
    arrow_multiplicities, build_qg, compute_wg, compute_wg_rotated, oracle_transport_cycle, shuffle_exchange,
    transport_arrow, transport_cycle, transporters, ConstructError, Phi, QGQuiver,
};
use crate::ginzburg::{perturb, verify_dg_iso, DgSetup, Failure, Report};
use crate::quiver::{Path, PathElement, Potential, QuiverError};
use crate::skew::{corner_basis, corner_spanning_set, dual_corner_basis, ebar, iota_path, rank, SkewContext};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}

pub struct Pipeline {
    pub act: Arc<MonomialAction>,
    pub w: Potential,
    pub choices: Arc<ChoiceData>,
    pub qg: Arc<QGQuiver>,
    pub wg: Potential,
    pub bound: usize,
}

impl Pipeline {
    pub fn new(
        act: MonomialAction,
        w: Potential,
        overrides: &ChoiceOverrides,
        bound: usize,
    ) -> Result<Pipeline, PipelineError> {
        let act = Arc::new(act);
        let choices = Arc::new(make_choices(&act, overrides)?);
        let qg = Arc::new(build_qg(&act, &choices));
        let wg = compute_wg(&act, &choices, &qg, &w)?;
        Ok(Pipeline { act, w, choices, qg, wg, bound })
    }

    /// A skew context over `Q` with `φ` built in it.
    pub fn phi(&self) -> Phi {
        let ctx = SkewContext::new(self.act.clone(), self.bound);
        Phi::new(&ctx, &self.choices, &self.qg)
    }

    pub fn dg(&self) -> Result<DgSetup, PipelineError> {
        let w_len = self.w.terms().keys().map(Path::len).max().unwrap_or(0);
        let bound = self.bound.max(w_len + 2);
        Ok(DgSetup::new(&self.act, &self.choices, &self.qg, &self.w, &self.wg, bound)?)
    }

    /// Corner dimensions, `ι`, `φ`, transport formulas vs the oracle, the shuffle
    /// exchange, and independence of `W_G` from lifts and transporters.
    pub fn property_report(&self, max_len: usize) -> Report {
        let mut report = Report::default();
        let phi = self.phi();
        let ctx = phi.context().clone();
        let q = self.act.quiver().clone();
        let qq = self.qg.quiver.clone();
        let ch = &self.choices;
        let fail = |generator: String, lhs: String, rhs: String| Some(Failure { generator, lhs, rhs });

        let mut corners = Vec::new();
        for (s, vs) in self.qg.vertices.iter().enumerate() {
            for (t, vt) in self.qg.vertices.iter().enumerate() {
                corners.push((s, vs.rep, vs.character.clone(), t, vt.rep, vt.character.clone()));
            }
        }
        let mult = arrow_multiplicities(&self.qg);
        let all_arrows: Vec<usize> = (0..q.arrow_count()).collect();
        report.run("corner_dimensions", &corners, |(s, i, rho, t, j, sigma)| {
            let want = mult.get(&(*s, *t)).copied().unwrap_or(0);
            let oracle = rank(&corner_spanning_set(&ctx, ch, &all_arrows, *i, rho, *j, sigma));
            let basis = corner_basis(&ctx, ch, *i, rho, *j, sigma);
            let dual = dual_corner_basis(&ctx, ch, *i, rho, *j, sigma);
            (oracle != want || rank(&basis) != want || basis.len() != want || rank(&dual) != want).then(|| Failure {
                generator: format!("{} -> {}", qq.vertex_id(*s), qq.vertex_id(*t)),
                lhs: format!("{want} arrows"),
                rhs: format!("corner rank {oracle}, basis rank {}, dual rank {}", rank(&basis), rank(&dual)),
            })
        });

        let mut paths: Vec<Path> = (0..q.vertex_count()).map(Path::stationary).collect();
        for len in 1..=3 {
            paths.extend(q.paths_of_length(len));
        }
        let e = ebar(&ctx, ch);
        report.run("iota_corner", &paths, |p| {
            let ip = iota_path(&ctx, ch, p);
            let c = e.mul(&ip).mul(&e);
            (c != ip).then(|| Failure { generator: q.format_path(p), lhs: c.to_string(), rhs: ip.to_string() })
        });
        let mut pairs = Vec::new();
        for p in &paths {
            for r in &paths {
                if p.len() + r.len() <= 3 {
                    if let Some(pr) = p.compose(r) {
                        pairs.push((p.clone(), r.clone(), pr));
                    }
                }
            }
        }
        report.run("iota_multiplicative", &pairs, |(p, r, pr)| {
            let lhs = iota_path(&ctx, ch, pr);
            let rhs = iota_path(&ctx, ch, p).mul(&iota_path(&ctx, ch, r));
            (lhs != rhs).then(|| Failure {
                generator: format!("{} · {}", q.format_path(p), q.format_path(r)),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            })
        });

        let mut qg_paths: Vec<Path> = (0..qq.vertex_count()).map(Path::stationary).collect();
        for len in 1..=3 {
            qg_paths.extend(qq.paths_of_length(len));
        }
        report.run("phi_round_trip", &qg_paths, |p| {
            let x = PathElement::from_path(&qq, p.clone());
            match phi.inverse(&phi.path(p)) {
                Ok(y) if y == x => None,
                Ok(y) => fail(qq.format_path(p), y.to_string(), x.to_string()),
                Err(err) => fail(qq.format_path(p), err.to_string(), x.to_string()),
            }
        });
        let qg_arrows: Vec<usize> = (0..qq.arrow_count()).collect();
        report.run("phi_multiplicative", &qg_arrows, |&a| {
            for b in 0..qq.arrow_count() {
                let prod = phi.arrow(a).mul(phi.arrow(b));
                let composite = Path::arrow(&qq, a).compose(&Path::arrow(&qq, b));
                let ok = match composite {
                    Some(p) => prod == phi.path(&p) && !prod.is_zero(),
                    None => prod.is_zero(),
                };
                if !ok {
                    return fail(format!("{} · {}", qq.arrow(a).id, qq.arrow(b).id), prod.to_string(), String::new());
                }
            }
            None
        });

        report.run("transport_arrow", &all_arrows, |&b| {
            let oracle = match phi.inverse(&iota_path(&ctx, ch, &Path::arrow(&q, b))) {
                Ok(x) => x,
                Err(err) => return fail(q.arrow(b).id.clone(), err.to_string(), String::new()),
            };
            let ts = transporters(&self.act, ch, b);
            if ts.is_empty() {
                return fail(q.arrow(b).id.clone(), "no transporter".into(), oracle.to_string());
            }
            for (g, _) in ts {
                match transport_arrow(&self.act, ch, &self.qg, b, g) {
                    Ok(x) if x == oracle => {}
                    Ok(x) => return fail(q.arrow(b).id.clone(), x.to_string(), oracle.to_string()),
                    Err(err) => return fail(q.arrow(b).id.clone(), err.to_string(), oracle.to_string()),
                }
            }
            None
        });

        let cycles = q.cycle_classes(max_len);
        report.run("transport_cycle", &cycles, |c| {
            let formula = transport_cycle(&self.act, ch, &self.qg, c, None);
            let oracle = oracle_transport_cycle(&phi, c);
            match (formula, oracle) {
                (Ok(a), Ok(b)) if a == b => None,
                (a, b) => fail(q.format_path(c), format!("{a:?}"), format!("{b:?}")),
            }
        });
        report.run("transporter_independence", &cycles, |c| {
            let base = transport_cycle(&self.act, ch, &self.qg, c, None).ok()?;
            let options: Vec<Vec<_>> =
                c.arrows().map(|b| transporters(&self.act, ch, b).into_iter().map(|t| t.0).collect()).collect();
            // last choice per arrow, then a rotating choice
            for shift in 0..2 {
                let gs: Vec<_> = options.iter().enumerate().map(|(k, o)| o[(k + shift + o.len() - 1) % o.len()]).collect();
                let other = transport_cycle(&self.act, ch, &self.qg, c, Some(&gs)).ok()?;
                if other != base {
                    return fail(q.format_path(c), other.to_string(), base.to_string());
                }
            }
            None
        });
        report.run("shuffle_exchange", &cycles, |c| match shuffle_exchange(&phi, c) {
            Ok((lhs, rhs)) if lhs == rhs => None,
            Ok((lhs, rhs)) => fail(q.format_path(c), lhs.to_string(), rhs.to_string()),
            Err(err) => fail(q.format_path(c), err.to_string(), String::new()),
        });
        let max_w = self.w.terms().keys().map(Path::len).max().unwrap_or(0);
        let shifts: Vec<usize> = (1..max_w.max(1)).collect();
        report.run("wg_lift_independence", &shifts, |&k| {
            match compute_wg_rotated(&self.act, ch, &self.qg, &self.w, k) {
                Ok(x) if x == self.wg => None,
                Ok(x) => fail(format!("rotation {k}"), x.to_string(), self.wg.to_string()),
                Err(err) => fail(format!("rotation {k}"), err.to_string(), String::new()),
            }
        });

        let grp = self.act.group();
        let rep_pairs: Vec<(usize, usize)> =
            ch.reps.iter().flat_map(|&i| ch.reps.iter().map(move |&j| (i, j))).collect();
        report.run("orbit_counting", &rep_pairs, |&(i, j)| {
            let gi = self.act.stabilizer(i).order();
            let gj = self.act.stabilizer(j).order();
            let gij = self.act.pair_stabilizer(i, j).order();
            let want = grp.order() * gij / (gi * gj);
            let (rij, rji) = (ch.r[&(i, j)].len(), ch.r[&(j, i)].len());
            (rij * gi * gj != grp.order() * gij || rij != rji).then(|| Failure {
                generator: format!("R({}, {})", q.vertex_id(i), q.vertex_id(j)),
                lhs: format!("{rij} and {rji}"),
                rhs: want.to_string(),
            })
        });
        report
    }

    /// The property suites followed by the dg-isomorphism checks. With `negative_control`
    /// the coefficient of the first cycle of `W_G` is doubled first.
    pub fn verify(&self, max_len: usize, negative_control: bool) -> Result<Report, PipelineError> {
        let mut report = self.property_report(max_len);
        let dg = self.dg()?;
        let dg = if negative_control { dg.with_target_potential(&perturb(&self.wg)) } else { dg };
        report.extend(verify_dg_iso(&dg));
        Ok(report)
    }
}
