//! The `validate` suite: every check is recomputed from the configuration
//! and reported as one row.

use std::collections::BTreeMap;

use num::complex::Complex64;
use num::BigRational;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cli::commands::{asympt_pair, branch_checks, identity_samples, radius_report, Analysis};
use crate::cli::report::Report;
use crate::cli::ModelConfig;
use crate::curve_solver::{newton_eval, residual, series_exact};
use crate::error::{Error, Result};
use crate::green_eval::{restricted_rational, GreenSystem};
use crate::markov_kernel::Irreducibility;
use crate::path_system::DependencyDigraph;
use crate::tree_model::Vertex;

/// Number of exact coefficients compared against the path-counting oracle.
pub const ORACLE_ORDER: usize = 12;
/// Longest walk length and largest reachable set for the residue check.
pub const RESIDUE_ORDER: usize = 30;
pub const RESIDUE_STATES: usize = 200_000;
/// State cap for the oracle behind the transfer fit.
pub const FIT_STATES: usize = 250_000;
/// Number of sample points for the numeric checks.
pub const SAMPLES: usize = 20;
/// Seed of the random coordinate vectors.
pub const SEED: u64 = 0x7ee_3a1c;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skip => "SKIP",
        }
    }

    fn from(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Outcome of one check.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub verdict: Verdict,
    pub detail: String,
}

type CheckFn = fn(&Analysis) -> Result<(Verdict, String)>;

/// The checks in execution order.
pub const CHECKS: &[(&str, CheckFn)] = &[
    ("irreducibility", check_irreducible),
    ("residue_classes", check_residues),
    ("coordinate_series_vs_oracle", check_coordinate_series),
    ("psi_equivariance", check_psi_equivariance),
    ("fixed_point_residual", check_fixed_point),
    ("branch_point", check_branch_point),
    ("radius_equalities", check_radius),
    ("bounded_classification", check_classification),
    ("green_identities", check_identities),
    ("green_series_vs_oracle", check_green_series),
    ("transfer_vs_fit", check_transfer),
];

/// Run every check; errors inside a check become its verdict (budget
/// exhaustion skips, anything else fails).
pub fn run_suite(cfg: &ModelConfig) -> Result<Vec<Check>> {
    let a = Analysis::new(cfg)?;
    Ok(CHECKS
        .iter()
        .map(|(name, f)| {
            let (verdict, detail) = match f(&a) {
                Ok(v) => v,
                Err(Error::Budget(m)) => (Verdict::Skip, format!("budget: {m}")),
                Err(e) => (Verdict::Fail, e.to_string()),
            };
            Check { name, verdict, detail }
        })
        .collect())
}

/// `validate`: the suite as a report; fails if any check fails.
pub fn cmd_validate(cfg: &ModelConfig) -> Result<Report> {
    let checks = run_suite(cfg)?;
    let mut rep = Report::new("validate", cfg);
    rep.columns(&["check", "status", "detail"]);
    for c in &checks {
        if c.verdict == Verdict::Fail {
            rep.fail();
        }
        rep.row(vec![c.name.into(), c.verdict.name().into(), c.detail.clone()]);
    }
    Ok(rep)
}

/// Test sources: the base point, a neighbour and a point beyond `2k`.
fn sources(a: &Analysis) -> Vec<Vertex> {
    let t = a.cfg.model.tree();
    let y = t.base();
    let mut xs = vec![y.clone()];
    xs.extend(t.neighbours(&y).into_iter().take(1));
    xs.extend(t.sphere(&y, 2 * a.cfg.model.k() + 1).into_iter().take(1));
    xs
}

fn check_irreducible(a: &Analysis) -> Result<(Verdict, String)> {
    Ok(match a.cfg.model.check_irreducible(a.cfg.budgets.irreducibility_horizon) {
        Irreducibility::Irreducible => (Verdict::Pass, "every generator reachable".into()),
        Irreducibility::Reducible { witness } => (Verdict::Fail, format!("unreachable: {}", a.name(&witness))),
        Irreducibility::Unknown { reason } => (Verdict::Skip, reason),
    })
}

fn check_residues(a: &Analysis) -> Result<(Verdict, String)> {
    let m = &a.cfg.model;
    let t = m.tree();
    let d = m.d() as usize;
    let mut checked = 0usize;
    let mut depth = RESIDUE_ORDER;
    for x in t.representative_centers() {
        let layers = m.oracle_support(&x, RESIDUE_ORDER, RESIDUE_STATES);
        depth = depth.min(layers.len() - 1);
        for (n, layer) in layers.iter().enumerate() {
            for w in layer {
                checked += 1;
                let r = m.r(&x, w) as usize;
                if n % d != r {
                    return Ok((
                        Verdict::Fail,
                        format!("p^({n})({}, {}) > 0 but r = {r} (d = {d})", a.name(&x), a.name(w)),
                    ));
                }
            }
        }
    }
    Ok((Verdict::Pass, format!("{checked} positive entries up to n = {depth}, d = {d}")))
}

fn check_coordinate_series(a: &Analysis) -> Result<(Verdict, String)> {
    let m = &a.cfg.model;
    let t = m.tree();
    let k = m.k();
    let v = series_exact(a.sys.psi(), ORACLE_ORDER);
    // Coordinates sharing (y, a) share one dynamic programme.
    let mut groups: BTreeMap<(Vertex, Vertex), Vec<usize>> = BTreeMap::new();
    for (i, o) in a.sys.orbits().iter().enumerate() {
        groups.entry((o.rep.y.clone(), o.rep.a.clone())).or_default().push(i);
    }
    for ((y, start), idx) in &groups {
        let targets: Vec<Vertex> = idx.iter().map(|&i| a.sys.orbits()[i].rep.b.clone()).collect();
        let outside = |u: &Vertex| t.distance(u, y) > k;
        let series = m.oracle_restricted_multi(start, &targets, &outside, ORACLE_ORDER, a.cfg.budgets.oracle_states)?;
        for (&i, s) in idx.iter().zip(&series) {
            if let Some(n) = (0..=ORACLE_ORDER).find(|&n| s[n] != v[i][n]) {
                let xi = &a.sys.orbits()[i].rep;
                return Ok((
                    Verdict::Fail,
                    format!("{} at n = {n}: series {} vs oracle {}", a.sys.format_xi(xi), v[i][n], s[n]),
                ));
            }
        }
    }
    Ok((Verdict::Pass, format!("{} coordinates exact through n = {ORACLE_ORDER}", a.sys.dim())))
}

/// `ψ(A·J) = ζ⁻¹·A·ψ(J)` (the rotation `z ↦ ζz` maps solutions to solutions).
fn check_psi_equivariance(a: &Analysis) -> Result<(Verdict, String)> {
    let psi = a.sys.psi();
    let d = a.cfg.model.d();
    let zeta_inv = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI / d as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let j: Vec<Complex64> =
            (0..psi.dim()).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let lhs = psi.eval(&a.sys.apply_a(&j));
        let rhs = a.sys.apply_a(&psi.eval(&j));
        for (l, r) in lhs.iter().zip(&rhs) {
            worst = worst.max((l - zeta_inv * r).norm() / r.norm().max(1.0));
        }
    }
    Ok((Verdict::from(worst < 1e-12), format!("max deviation {worst:.3e} over {SAMPLES} seeded points")))
}

/// Sample points spread over the disk `|z| ≤ ρ`.
fn disk_points(rho: f64, count: usize) -> Vec<Complex64> {
    let golden = 0.618_033_988_749_895;
    (1..=count)
        .map(|j| {
            Complex64::from_polar(
                rho * (j as f64 / count as f64).sqrt(),
                2.0 * std::f64::consts::PI * golden * j as f64,
            )
        })
        .collect()
}

fn check_fixed_point(a: &Analysis) -> Result<(Verdict, String)> {
    let s = a.singular()?;
    let psi = a.sys.psi();
    let d = a.cfg.model.d();
    let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / d as f64);
    let tol = a.cfg.tolerances.fixed_point;
    let mut worst_res: f64 = 0.0;
    let mut worst_rot: f64 = 0.0;
    for z in disk_points(0.95 * s.r, SAMPLES) {
        let v = newton_eval(psi, z, None, tol)?;
        worst_res = worst_res.max(residual(psi, z, &v));
        let w = newton_eval(psi, zeta * z, None, tol)?;
        let av = a.sys.apply_a(&v);
        for (x, y) in w.iter().zip(&av) {
            worst_rot = worst_rot.max((x - y).norm() / y.norm().max(1.0));
        }
    }
    let ok = worst_res < 10.0 * tol && worst_rot < 1e-10;
    Ok((Verdict::from(ok), format!("residual {worst_res:.3e}; rotation {worst_rot:.3e}")))
}

fn check_branch_point(a: &Analysis) -> Result<(Verdict, String)> {
    let c = branch_checks(a)?;
    let s = a.singular()?;
    Ok((
        Verdict::from(c.all()),
        format!(
            "R={:.15} |rho-1|={:.1e} h>0={} tangent={:.1e} curvature={:.3e} alpha_gap={:.1e} approach={}",
            s.r,
            c.criticality,
            c.h_positive,
            s.tangent_dz,
            s.curvature,
            s.alpha_gap(),
            c.monotone_approach
        ),
    ))
}

fn check_radius(a: &Analysis) -> Result<(Verdict, String)> {
    let rep = radius_report(a)?;
    let tol = a.cfg.tolerances.ratio;
    let ok = rep.estimates_agree(tol) && rep.symmetry_detected();
    Ok((
        Verdict::from(ok),
        format!(
            "{} estimates, max gap {:.3e}, {} excluded, symmetry {}",
            rep.estimates.len(),
            rep.max_gap,
            rep.excluded.len(),
            rep.symmetry_detected()
        ),
    ))
}

/// Unbounded coordinates are exactly those depending on the absorbing
/// component; every bounded one has a verified rational function.
fn check_classification(a: &Analysis) -> Result<(Verdict, String)> {
    let psi = a.sys.psi();
    let classes = a.classes();
    if let Some(i) = classes.iter().position(|c| !c.is_finite() && !c.is_infinite()) {
        return Ok((Verdict::Fail, format!("{} unclassified", a.sys.format_xi(&a.sys.orbits()[i].rep))));
    }
    let graph = DependencyDigraph::new(psi);
    let absorbing: Vec<usize> = graph.absorbing().map(|c| c.to_vec()).unwrap_or_default();
    let deps = psi.dependents();
    // deps[j] lists the coordinates whose polynomial uses j; walk backwards
    // from the absorbing set.
    let mut reaches = vec![false; psi.dim()];
    let mut stack = absorbing.clone();
    for &i in &absorbing {
        reaches[i] = true;
    }
    while let Some(j) = stack.pop() {
        for &i in &deps[j] {
            if !reaches[i] {
                reaches[i] = true;
                stack.push(i);
            }
        }
    }
    let mut bounded = 0;
    for (i, c) in classes.iter().enumerate() {
        let label = a.sys.format_xi(&a.sys.orbits()[i].rep);
        if c.is_infinite() != reaches[i] {
            return Ok((Verdict::Fail, format!("{label}: class disagrees with dependency on the absorbing set")));
        }
        if c.is_finite() {
            restricted_rational(&a.sys, &a.sys.orbits()[i].rep, c, a.cfg.budgets.oracle_states)?;
            bounded += 1;
        }
    }
    Ok((
        Verdict::Pass,
        format!("{} unbounded, {bounded} bounded with exact rational functions", classes.len() - bounded),
    ))
}

fn check_identities(a: &Analysis) -> Result<(Verdict, String)> {
    let y = a.cfg.model.tree().base();
    let res = identity_samples(a, &y, SAMPLES)?;
    let worst = res.iter().map(|r| r.max()).fold(0.0, f64::max);
    Ok((
        Verdict::from(worst < a.cfg.tolerances.identity),
        format!("max residual {worst:.3e} at {SAMPLES} points including z = R"),
    ))
}

fn check_green_series(a: &Analysis) -> Result<(Verdict, String)> {
    let m = &a.cfg.model;
    let y = m.tree().base();
    let g = GreenSystem::new(&a.sys, &y);
    let v = series_exact(a.sys.psi(), ORACLE_ORDER);
    let budget = a.cfg.budgets.oracle_states;
    let xs = sources(a);
    for x in &xs {
        let full = g.green_series::<BigRational>(x, &v, ORACLE_ORDER + 1);
        let oracle = m.oracle_series(x, &y, ORACLE_ORDER, budget)?;
        if full != oracle {
            return Ok((Verdict::Fail, format!("G({}, {}) disagrees with the oracle", a.name(x), a.name(&y))));
        }
        if x == &y {
            continue;
        }
        let fp = g.first_passage_series::<BigRational>(x, &v, ORACLE_ORDER + 1);
        let oracle = m.oracle_first_passage_series(x, &y, ORACLE_ORDER, budget)?;
        if fp != oracle {
            return Ok((Verdict::Fail, format!("F({}, {}) disagrees with the oracle", a.name(x), a.name(&y))));
        }
    }
    Ok((Verdict::Pass, format!("G and F exact through n = {ORACLE_ORDER} for {} sources", xs.len())))
}

fn check_transfer(a: &Analysis) -> Result<(Verdict, String)> {
    let y = a.cfg.model.tree().base();
    let row = asympt_pair(a, &y, &y, true, a.cfg.budgets.oracle_states.min(FIT_STATES))?;
    let Some(gap) = row.gap() else {
        return Ok((Verdict::Skip, row.note));
    };
    let fit = row.fit.as_ref().expect("gap implies a fit");
    let ok = gap < a.cfg.tolerances.transfer && row.result.flags.is_empty();
    Ok((
        Verdict::from(ok),
        format!(
            "C={:.9} C_hat={:.9} gap={:.2}% drift={:.2}% beta={:.3}",
            row.result.constant,
            fit.c_hat,
            100.0 * gap,
            100.0 * fit.drift,
            fit.beta
        ),
    ))
}
