//! Command implementations; each returns a [`Report`].

use std::borrow::Cow;
use std::cell::OnceCell;

use num::complex::Complex64;
use num::{BigRational, Zero};

use crate::asymptotics::{oracle_fit, transfer_pole, transfer_sqrt, AsymptoticResult, Functional, Law, OracleFit};
use crate::cli::report::Report;
use crate::cli::ModelConfig;
use crate::curve_solver::{
    find_branch_point, jacobian_radius, newton_eval, radius_equalities_report, series_exact, RadiusReport, SingularData,
};
use crate::error::{Error, Result};
use crate::green_eval::{identity_residuals, restricted_rational, Channel, GreenSystem, IdentityResiduals};
use crate::numeric::{fmt_sig, rat_to_f64};
use crate::path_system::{DependencyDigraph, PathSystem, XiClass};
use crate::tree_model::Vertex;

/// Fit window `n ∈ [20, 60]` for `a_{dn+r}` and the number of fit terms.
pub const FIT_WINDOW: (usize, usize) = (20, 60);
pub const FIT_TERMS: usize = 4;
/// Series order used for ratio tests.
pub const RATIO_ORDER: usize = 400;

/// Lazily computed analysis shared by the commands.
pub struct Analysis<'c> {
    pub cfg: Cow<'c, ModelConfig>,
    pub sys: PathSystem,
    classes: OnceCell<Vec<XiClass>>,
    sing: OnceCell<std::result::Result<SingularData, String>>,
}

impl<'c> Analysis<'c> {
    pub fn new(cfg: &'c ModelConfig) -> Result<Self> {
        Self::build(Cow::Borrowed(cfg))
    }

    /// An analysis owning its configuration.
    pub fn owned(cfg: ModelConfig) -> Result<Analysis<'static>> {
        Analysis::build(Cow::Owned(cfg))
    }

    fn build(cfg: Cow<'c, ModelConfig>) -> Result<Self> {
        let sys = PathSystem::build(&cfg.model)?;
        Ok(Analysis { cfg, sys, classes: OnceCell::new(), sing: OnceCell::new() })
    }

    pub fn classes(&self) -> &[XiClass] {
        self.classes.get_or_init(|| self.sys.classify_all(self.cfg.budgets.classify_elements))
    }

    /// Coordinates whose excursions are bounded.
    pub fn bounded(&self) -> Vec<bool> {
        self.classes().iter().map(|c| c.is_finite()).collect()
    }

    pub fn singular(&self) -> Result<&SingularData> {
        self.sing
            .get_or_init(|| find_branch_point(self.sys.psi(), &self.cfg.tolerances).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| Error::Numeric(e.clone()))
    }

    pub fn vertex(&self, text: &str) -> Result<Vertex> {
        self.cfg.model.tree().parse_vertex(text).map_err(|e| Error::Argument(e.to_string()))
    }

    pub fn name(&self, v: &Vertex) -> String {
        self.cfg.model.tree().format_vertex(v)
    }

    /// `v_z` on the branch from the origin; on the circle `|z| = R` the `d`
    /// branch points are reached through `v_{ζ^j R} = A^j v_R`.
    pub fn solve_at(&self, z: Complex64) -> Result<Vec<Complex64>> {
        let d = self.cfg.model.d();
        if let Ok(s) = self.singular() {
            if (z.norm() - s.r).abs() <= 1e-12 * s.r {
                let turns = z.arg() * d as f64 / (2.0 * std::f64::consts::PI);
                if (turns - turns.round()).abs() < 1e-12 {
                    let j = (turns.round() as i64).rem_euclid(d as i64);
                    let mut v: Vec<Complex64> = s.v_r.iter().map(|x| Complex64::new(*x, 0.0)).collect();
                    for _ in 0..j {
                        v = self.sys.apply_a(&v);
                    }
                    return Ok(v);
                }
            }
        }
        newton_eval(self.sys.psi(), z, None, self.cfg.tolerances.fixed_point)
    }
}

/// Parse a point `z`: `0.5`, `-0.2+0.3i`, `0.9R` (multiple of the radius),
/// or polar `0.9R@1.2` (modulus@angle in radians).
pub fn parse_z(text: &str, radius: Option<f64>) -> Result<Complex64> {
    let t = text.trim();
    let real = |s: &str| -> Result<f64> {
        let s = s.trim();
        if let Some(m) = s.strip_suffix('R') {
            let r = radius.ok_or_else(|| Error::Argument("`R` used but no branch point is available".into()))?;
            let m = m.trim();
            let f = match m {
                "" | "+" => 1.0,
                "-" => -1.0,
                _ => m.parse::<f64>().map_err(|_| Error::Argument(format!("bad number {s:?}")))?,
            };
            return Ok(f * r);
        }
        s.parse::<f64>().map_err(|_| Error::Argument(format!("bad number {s:?}")))
    };
    if let Some((m, a)) = t.split_once('@') {
        let a: f64 = a.trim().parse().map_err(|_| Error::Argument(format!("bad angle in {t:?}")))?;
        return Ok(Complex64::from_polar(real(m)?, a));
    }
    if let Some(body) = t.strip_suffix('i') {
        // Split at the last sign that is not an exponent sign.
        let bytes = body.as_bytes();
        let mut cut = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
                cut = Some(i);
                break;
            }
        }
        return match cut {
            Some(i) => {
                let im = match &body[i..] {
                    "+" => 1.0,
                    "-" => -1.0,
                    s => real(s)?,
                };
                Ok(Complex64::new(real(&body[..i])?, im))
            }
            None => Ok(Complex64::new(0.0, if body.is_empty() { 1.0 } else { real(body)? })),
        };
    }
    Ok(Complex64::new(real(t)?, 0.0))
}

fn class_name(c: &XiClass) -> &'static str {
    match c {
        XiClass::Infinite { .. } => "unbounded",
        XiClass::Finite { .. } => "bounded",
        XiClass::Unknown { .. } => "unknown",
    }
}

/// `info`: range, period, coordinates and the dependency digraph.
pub fn cmd_info(cfg: &ModelConfig) -> Result<Report> {
    let a = Analysis::new(cfg)?;
    let model = &cfg.model;
    let graph = DependencyDigraph::new(a.sys.psi());
    let absorbing = graph.absorbing().map(|c| c.to_vec()).unwrap_or_default();
    let mut rep = Report::new("info", cfg);
    rep.columns(&["kind", "name", "value", "detail"]);
    let tree_kind = if model.tree().as_free_product().is_some() { "free_product" } else { "colored_tree" };
    for (k, v) in [
        ("tree", tree_kind.to_string()),
        ("range_k", model.k().to_string()),
        ("period_d", model.d().to_string()),
        ("vertex_orbits", model.tree().orbit_count().to_string()),
        ("coordinates", a.sys.dim().to_string()),
        ("psi_degree", a.sys.psi().degree().to_string()),
        ("components", graph.components.len().to_string()),
        ("absorbing_size", absorbing.len().to_string()),
        ("bounded_coordinates", a.bounded().iter().filter(|b| **b).count().to_string()),
    ] {
        rep.row(vec!["summary".into(), k.into(), v, String::new()]);
    }
    for (i, o) in a.sys.orbits().iter().enumerate() {
        let comp = graph.component_of[i];
        rep.row(vec![
            "coordinate".into(),
            a.sys.format_xi(&o.rep),
            o.residue.to_string(),
            format!(
                "index={i} witness_len={} class={} component={comp} absorbing={}",
                o.witness_len,
                class_name(&a.classes()[i]),
                absorbing.contains(&i)
            ),
        ]);
    }
    for (ci, comp) in graph.components.iter().enumerate() {
        rep.row(vec![
            "component".into(),
            ci.to_string(),
            comp.len().to_string(),
            format!("cyclic={} sink={}", graph.is_cyclic(comp), graph.sinks.contains(&ci)),
        ]);
    }
    Ok(rep)
}

/// Restriction applied by the `oracle` command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Restriction {
    /// Intermediate vertices avoid `y` (first passage).
    Target,
    /// Intermediate vertices avoid the ball `B_k(c)` around a center `c`.
    Ball(String),
}

/// `oracle`: exact `p^(n)(x, y)` rows.
pub fn cmd_oracle(
    cfg: &ModelConfig,
    x: &str,
    y: &str,
    n_max: usize,
    restricted: Option<&Restriction>,
) -> Result<Report> {
    let model = &cfg.model;
    let t = model.tree();
    let xv = t.parse_vertex(x).map_err(|e| Error::Argument(e.to_string()))?;
    let yv = t.parse_vertex(y).map_err(|e| Error::Argument(e.to_string()))?;
    let budget = cfg.budgets.oracle_states;
    let series = match restricted {
        None => model.oracle_series(&xv, &yv, n_max, budget)?,
        Some(Restriction::Target) => model.oracle_first_passage_series(&xv, &yv, n_max, budget)?,
        Some(Restriction::Ball(c)) => {
            let k = model.k();
            let cv = t.parse_vertex(c).map_err(|e| Error::Argument(e.to_string()))?;
            if t.distance(&xv, &cv) <= k {
                return Err(Error::Argument("ball restriction needs x outside B_k(center)".into()));
            }
            let outside = |w: &Vertex| t.distance(w, &cv) > k;
            model.oracle_restricted_series(&xv, &yv, &outside, n_max, budget)?
        }
    };
    let mut rep = Report::new("oracle", cfg);
    rep.comment(format!(
        "pair: x={} y={} restriction={} r(x,y)={} d={}",
        t.format_vertex(&xv),
        t.format_vertex(&yv),
        match restricted {
            None => "none".to_string(),
            Some(Restriction::Target) => "target".to_string(),
            Some(Restriction::Ball(c)) => format!("ball(center={c})"),
        },
        model.r(&xv, &yv),
        model.d()
    ));
    rep.columns(&["n", "exact", "decimal"]);
    for (n, c) in series.iter().enumerate() {
        rep.row(vec![n.to_string(), c.to_string(), fmt_sig(rat_to_f64(c))]);
    }
    Ok(rep)
}

/// `solve`: exact series of every coordinate plus residual checks.
pub fn cmd_solve(cfg: &ModelConfig, order: usize) -> Result<Report> {
    if order == 0 {
        return Err(Error::Argument("series order must be at least 1".into()));
    }
    let a = Analysis::new(cfg)?;
    let psi = a.sys.psi();
    let v = series_exact(psi, order);
    // Exact check: v − zψ(v) ≡ 0 mod z^{order+1}, via ψ's monomials.
    let mut exact_ok = true;
    for i in 0..psi.dim() {
        let mut rhs = vec![BigRational::zero(); order + 1];
        rhs[0] = psi.constants[i].clone();
        for m in &psi.monomials[i] {
            let mut p = vec![BigRational::zero(); order + 1];
            p[0] = m.coeff.clone();
            for &x in &m.vars {
                p = crate::numeric::ser_mul(&p, &v[x], order + 1);
            }
            for (r, q) in rhs.iter_mut().zip(p) {
                *r += q;
            }
        }
        for n in 1..=order {
            if v[i][n] != rhs[n - 1] {
                exact_ok = false;
            }
        }
    }
    let mut rep = Report::new("solve", cfg);
    rep.comment(format!("order: {order}"));
    rep.comment(format!("exact fixed point through order {order}: {}", if exact_ok { "PASS" } else { "FAIL" }));
    if !exact_ok {
        rep.fail();
    }
    if let Ok(s) = a.singular() {
        let z = 0.5 * s.r;
        let j = newton_eval(psi, z, None, cfg.tolerances.fixed_point)?;
        rep.comment(format!("numeric residual at z = R/2: {:.3e}", crate::curve_solver::residual(psi, z, &j)));
    }
    rep.columns(&["coordinate", "label", "n", "exact", "decimal"]);
    for (i, o) in a.sys.orbits().iter().enumerate() {
        let label = a.sys.format_xi(&o.rep);
        for (n, c) in v[i].iter().enumerate() {
            rep.row(vec![i.to_string(), label.clone(), n.to_string(), c.to_string(), fmt_sig(rat_to_f64(c))]);
        }
    }
    Ok(rep)
}

/// Checks on the branch point: criticality and the two nondegeneracy
/// surrogates.
#[derive(Clone, Debug)]
pub struct BranchChecks {
    /// `|ρ(R·Dψ(v_R)) − 1|` on the absorbing block.
    pub criticality: f64,
    /// `ρ(z·Dψ(v_z))` increases towards 1 along `z = R(1 − 2^{−j})`.
    pub monotone_approach: bool,
    pub h_positive: bool,
    pub tangent_ok: bool,
    pub curvature_ok: bool,
    pub alpha_ok: bool,
}

impl BranchChecks {
    pub fn all(&self) -> bool {
        self.criticality < 1e-8
            && self.monotone_approach
            && self.h_positive
            && self.tangent_ok
            && self.curvature_ok
            && self.alpha_ok
    }
}

pub fn branch_checks(a: &Analysis) -> Result<BranchChecks> {
    let s = a.singular()?;
    let psi = a.sys.psi();
    let rho = jacobian_radius(psi, s.r, &s.v_r, &s.absorbing, 1e-14);
    let mut prev = 0.0;
    let mut monotone = true;
    let mut start: Option<(f64, Vec<f64>)> = None;
    for j in 2..=14 {
        let z = s.r * (1.0 - 2f64.powi(-j));
        let v = newton_eval(psi, z, start.as_ref().map(|(z0, v0)| (*z0, v0.as_slice())), 1e-13)?;
        let r = jacobian_radius(psi, z, &v, &s.absorbing, 1e-13);
        monotone &= r > prev && r < 1.0;
        prev = r;
        start = Some((z, v));
    }
    Ok(BranchChecks {
        criticality: (rho - 1.0).abs(),
        monotone_approach: monotone,
        h_positive: s.absorbing.iter().all(|&i| s.h[i] > 0.0),
        tangent_ok: s.tangent_dz < 1e-8,
        curvature_ok: s.curvature.abs() > 1e-8 && s.ell_psi.abs() > 1e-8,
        alpha_ok: s.alpha_gap() < a.cfg.tolerances.alpha,
    })
}

/// `radius`: the branch point and its local data.
pub fn cmd_radius(cfg: &ModelConfig) -> Result<Report> {
    let a = Analysis::new(cfg)?;
    let s = a.singular()?.clone();
    let checks = branch_checks(&a)?;
    let mut rep = Report::new("radius", cfg);
    rep.columns(&["quantity", "index", "label", "value"]);
    let scalar = |rep: &mut Report, q: &str, v: String| rep.row(vec![q.into(), String::new(), String::new(), v]);
    scalar(&mut rep, "R", format!("{:.15e}", s.r));
    scalar(&mut rep, "bracket_low", fmt_sig(s.bracket.0));
    scalar(&mut rep, "bracket_high", fmt_sig(s.bracket.1));
    scalar(&mut rep, "augmented_residual", format!("{:.3e}", s.residual));
    scalar(&mut rep, "sigma_min", format!("{:.3e}", s.sigma_min));
    scalar(&mut rep, "jacobian_rho_minus_1", format!("{:.3e}", checks.criticality));
    scalar(&mut rep, "tangent_dz", format!("{:.3e}", s.tangent_dz));
    scalar(&mut rep, "curvature_z2", fmt_sig(s.curvature));
    scalar(&mut rep, "ell_dot_psi", fmt_sig(s.ell_psi));
    scalar(&mut rep, "ell_dot_d2psi_hh", fmt_sig(s.ell_d2));
    scalar(&mut rep, "alpha_gap", format!("{:.3e}", s.alpha_gap()));
    let verdict = |b: bool| if b { "PASS" } else { "FAIL" }.to_string();
    scalar(&mut rep, "check_tangent_vertical", verdict(checks.tangent_ok));
    scalar(&mut rep, "check_curvature_nonzero", verdict(checks.curvature_ok));
    scalar(&mut rep, "check_criticality", verdict(checks.criticality < 1e-8 && checks.monotone_approach));
    scalar(&mut rep, "check_perron_vector", verdict(checks.h_positive));
    scalar(&mut rep, "check_alpha_agreement", verdict(checks.alpha_ok));
    if !checks.all() {
        rep.fail();
    }
    for (i, o) in a.sys.orbits().iter().enumerate() {
        let label = a.sys.format_xi(&o.rep);
        for (q, v) in
            [("v_R", s.v_r[i]), ("alpha", s.alpha[i]), ("alpha_fit", s.alpha_fit[i]), ("h", s.h[i]), ("ell", s.ell[i])]
        {
            rep.row(vec![q.into(), i.to_string(), label.clone(), fmt_sig(v)]);
        }
    }
    Ok(rep)
}

/// `green`: values of `G`, `F` at the requested points with identity
/// residuals.
pub fn cmd_green(cfg: &ModelConfig, x: &str, y: &str, zs: &[String]) -> Result<Report> {
    let a = Analysis::new(cfg)?;
    let xv = a.vertex(x)?;
    let yv = a.vertex(y)?;
    let radius = a.singular().ok().map(|s| s.r);
    let g = GreenSystem::new(&a.sys, &yv);
    let mut rep = Report::new("green", cfg);
    rep.comment(format!("pair: x={} y={}", a.name(&xv), a.name(&yv)));
    rep.columns(&["z_re", "z_im", "channel", "value_re", "value_im", "identity_residual"]);
    for zt in zs {
        let z = parse_z(zt, radius)?;
        if let Some(r) = radius {
            if z.norm() > r * (1.0 + 1e-12) {
                return Err(Error::Argument(format!("|z| = {} exceeds the radius {r}", z.norm())));
            }
        }
        let v = a.solve_at(z)?;
        let vals = g.evaluate_many(std::slice::from_ref(&xv), z, &v)?;
        let (f, gv) = vals[0];
        let res = identity_residuals(&g, 2 * a.cfg.model.k() + 1, z, &v)?;
        if res.max() > cfg.tolerances.identity {
            rep.fail();
        }
        for (ch, val) in [(Channel::Full, gv), (Channel::FirstPassage, f)] {
            rep.row(vec![
                fmt_sig(z.re),
                fmt_sig(z.im),
                ch.name().into(),
                fmt_sig(val.re),
                fmt_sig(val.im),
                format!("{:.3e}", res.max()),
            ]);
        }
    }
    Ok(rep)
}

/// Oracle coefficients of a channel, if the oracle fits the budget.
pub fn channel_oracle(
    a: &Analysis,
    x: &Vertex,
    y: &Vertex,
    full: bool,
    nmax: usize,
    budget: usize,
) -> Result<Vec<BigRational>> {
    let m = &a.cfg.model;
    if full {
        m.oracle_series(x, y, nmax, budget)
    } else {
        m.oracle_first_passage_series(x, y, nmax, budget)
    }
}

/// One row of `asympt`: the transfer result and, when affordable, the fit.
#[derive(Clone, Debug)]
pub struct AsymptRow {
    pub result: AsymptoticResult,
    pub fit: Option<OracleFit>,
    pub note: String,
}

impl AsymptRow {
    pub fn gap(&self) -> Option<f64> {
        self.fit.as_ref().map(|f| (self.result.constant - f.c_hat).abs() / f.c_hat)
    }
}

/// Transfer plus oracle fit for `G(x, y)` or `F(x, y)`.
pub fn asympt_pair(a: &Analysis, x: &Vertex, y: &Vertex, full: bool, fit_budget: usize) -> Result<AsymptRow> {
    let m = &a.cfg.model;
    let s = a.singular()?;
    let g = GreenSystem::new(&a.sys, y);
    let r = m.r(x, y);
    let pair = format!("{}->{}", a.name(x), a.name(y));
    let d = m.d() as usize;
    if !full {
        // Bounded first passage: a polynomial, no singular law.
        let v = crate::curve_solver::series_solve(a.sys.psi(), 80, &1.0f64);
        let f = g.first_passage_series(x, &v, 81);
        if f[40..].iter().all(|c| *c == 0.0) {
            let degree = f.iter().rposition(|c| *c != 0.0).unwrap_or(0);
            let result = AsymptoticResult {
                pair,
                channel: Channel::FirstPassage,
                d: d as u64,
                r,
                radius: f64::INFINITY,
                constant: 0.0,
                c1: None,
                law: Law::Polynomial { degree },
                amplitude: None,
                flags: Vec::new(),
            };
            return Ok(AsymptRow { result, fit: None, note: "bounded first passage".into() });
        }
    }
    let functional = Functional::Green { system: &g, x, full };
    let mut result = transfer_sqrt(&a.sys, s, functional, pair, r, 1e-10)?;
    let (lo, hi) = FIT_WINDOW;
    let (fit, note) = match channel_oracle(a, x, y, full, d * hi + r as usize, fit_budget) {
        Ok(series) => match oracle_fit(&series, d as u64, r, s.r, lo..=hi, FIT_TERMS) {
            Ok(f) => {
                result.c1 = Some(f.c1_hat);
                (Some(f), String::new())
            }
            Err(e) => (None, format!("fit failed: {e}")),
        },
        Err(Error::Budget(_)) => (None, "oracle exceeds budget; fit skipped".into()),
        Err(e) => return Err(e),
    };
    Ok(AsymptRow { result, fit, note })
}

/// Transfer for every coordinate: square-root law for unbounded pairs, pole
/// law for bounded ones.
pub fn asympt_coordinates(a: &Analysis) -> Result<Vec<AsymptRow>> {
    let s = a.singular()?;
    let d = a.cfg.model.d();
    let mut rows = Vec::new();
    for (i, o) in a.sys.orbits().iter().enumerate() {
        let label = a.sys.format_xi(&o.rep);
        let class = &a.classes()[i];
        let row = if class.is_finite() {
            let rr = restricted_rational(&a.sys, &o.rep, class, a.cfg.budgets.oracle_states)?;
            let (res, _, eps) = transfer_pole(&rr.function, d, o.residue, label);
            AsymptRow { result: res, fit: None, note: format!("rational {}; epsilon={eps}", rr.function.to_text()) }
        } else {
            let res = transfer_sqrt(&a.sys, s, Functional::Coordinate(i), label, o.residue, 1e-10)?;
            AsymptRow { result: res, fit: None, note: String::new() }
        };
        rows.push(row);
    }
    Ok(rows)
}

fn asympt_fields(row: &AsymptRow) -> Vec<String> {
    let r = &row.result;
    let opt = |x: Option<f64>| x.map(fmt_sig).unwrap_or_else(|| "NA".into());
    vec![
        r.pair.clone(),
        r.channel.name().into(),
        r.law.name().into(),
        match r.law {
            Law::Pole { order, .. } => order.to_string(),
            Law::Polynomial { degree } => degree.to_string(),
            Law::Sqrt => "NA".into(),
        },
        r.d.to_string(),
        r.r.to_string(),
        fmt_sig(r.radius),
        fmt_sig(r.constant),
        opt(r.c1),
        opt(row.fit.as_ref().map(|f| f.c_hat)),
        opt(row.fit.as_ref().map(|f| f.drift)),
        opt(row.fit.as_ref().map(|f| f.beta)),
        opt(row.gap()),
        r.flags.join("; "),
        row.note.clone(),
    ]
}

/// `asympt`: laws and constants for the given pairs (both channels) and,
/// optionally, every coordinate.
pub fn cmd_asympt(cfg: &ModelConfig, pairs: &[(String, String)], coordinates: bool) -> Result<Report> {
    let a = Analysis::new(cfg)?;
    let mut rep = Report::new("asympt", cfg);
    rep.comment(format!("fit: n in [{}, {}], {} terms", FIT_WINDOW.0, FIT_WINDOW.1, FIT_TERMS));
    rep.columns(&[
        "pair",
        "channel",
        "law",
        "order",
        "d",
        "r",
        "radius",
        "constant",
        "c1",
        "c_hat",
        "fit_drift",
        "beta",
        "transfer_gap",
        "flags",
        "note",
    ]);
    let budget = cfg.budgets.oracle_states;
    for (x, y) in pairs {
        let xv = a.vertex(x)?;
        let yv = a.vertex(y)?;
        for full in [true, false] {
            if !full && xv == yv {
                continue;
            }
            let row = asympt_pair(&a, &xv, &yv, full, budget)?;
            if row.gap().is_some_and(|g| g > cfg.tolerances.transfer) || !row.result.flags.is_empty() {
                rep.fail();
            }
            rep.row(asympt_fields(&row));
        }
    }
    if coordinates {
        for row in asympt_coordinates(&a)? {
            rep.row(asympt_fields(&row));
        }
    }
    Ok(rep)
}

/// `radius` equality report rows, shared with validation.
pub fn radius_report(a: &Analysis) -> Result<RadiusReport> {
    let s = a.singular()?;
    let t = a.cfg.model.tree();
    let y = t.base();
    let mut pairs = vec![(y.clone(), y.clone())];
    if let Some(w) = t.neighbours(&y).into_iter().next() {
        pairs.push((w, y.clone()));
    }
    if let Some(w) = t.sphere(&y, 2 * a.cfg.model.k() + 1).into_iter().next() {
        pairs.push((w, y.clone()));
    }
    radius_equalities_report(&a.sys, s, &pairs, &a.bounded(), RATIO_ORDER)
}

/// Identity residuals at `count` points of the closed disk, plus `z = R`.
pub fn identity_samples(a: &Analysis, y: &Vertex, count: usize) -> Result<Vec<IdentityResiduals>> {
    let s = a.singular()?;
    let g = GreenSystem::new(&a.sys, y);
    let k = a.cfg.model.k();
    let mut out = Vec::new();
    let golden = 0.618_033_988_749_895;
    for j in 0..count {
        let z = if j == 0 {
            Complex64::new(s.r, 0.0)
        } else {
            let rho = s.r * (j as f64 / count as f64).sqrt();
            Complex64::from_polar(rho, 2.0 * std::f64::consts::PI * golden * j as f64)
        };
        let v = a.solve_at(z)?;
        out.push(identity_residuals(&g, 2 * k + 1, z, &v)?);
    }
    Ok(out)
}
