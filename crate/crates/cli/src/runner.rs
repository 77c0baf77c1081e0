//! Per-kind dispatch and record assembly.

use serde::Serialize;
use serde_json::{json, Value};

use dense_equilibria::coercive::{solve_noncompact, CoercivitySpec, NoncompactProblem};
use dense_equilibria::config::{ACCEPT_TOL, CERT_TOL, DEFAULT_SEED};
use dense_equilibria::dense_sets::{
    check_dense, check_hull_closure, check_self_segment_dense, check_self_segment_dense_pairs,
    replay_segment_witness, SsdParams,
};
use dense_equilibria::economy::solve_dgn;
use dense_equilibria::games::{exhaustive_argmin, solve_nash, solve_nash_from, validate_nash_hypotheses, Multistrategy};
use dense_equilibria::geometry::{make_grid, Point, Region};
use dense_equilibria::solver::{
    counterexample_problems, kkm_certificate, solve_compact, solve_on_grids, EquilibriumProblem, SolveConfig,
    SolveReport, SolveStatus,
};
use dense_equilibria::validators::ValidationVerdict;
use dense_equilibria::{rng, Error, Tolerances};

use crate::catalog;
use crate::config::{
    self, point, CoerciveInstance, CounterexampleInstance, DenseCheck, DenseCheckInstance, DgnInstance,
    EquilibriumInstance, Expect, NashInstance, Scenario, ScenarioKind,
};
use crate::{CliError, RunOptions};

/// Effective parameters of one scenario after defaults and overrides.
#[derive(Debug, Clone, Serialize)]
struct Effective {
    res: f64,
    d_res: f64,
    per_player: Option<Vec<f64>>,
    tol: f64,
    cert_tol: f64,
    seed: u64,
}

/// What a kind handler hands back for one record.
#[derive(Debug, Default)]
struct Outcome {
    label: Option<String>,
    verdict: String,
    point: Option<Vec<f64>>,
    /// Grid step used as the default point tolerance.
    step: f64,
    hypotheses_pass: Option<bool>,
    residual: Option<f64>,
    residuals: Value,
    witnesses: Vec<Value>,
    report: Value,
}

fn default_res(kind: ScenarioKind) -> f64 {
    match kind {
        ScenarioKind::Equilibrium | ScenarioKind::DenseCheck => 0.1,
        ScenarioKind::Coercive | ScenarioKind::Counterexample => 0.25,
        ScenarioKind::Dgn | ScenarioKind::Nash => 0.05,
    }
}

fn effective(s: &Scenario, file_seed: Option<u64>, opts: RunOptions) -> Effective {
    let res = opts.res.or(s.grids.res).unwrap_or_else(|| default_res(s.kind));
    Effective {
        res,
        d_res: if opts.res.is_some() { res } else { s.grids.d_res.unwrap_or(res) },
        per_player: if opts.res.is_some() { None } else { s.grids.per_player.clone() },
        tol: s.tolerances.tol.unwrap_or(ACCEPT_TOL),
        cert_tol: s.tolerances.cert_tol.unwrap_or(CERT_TOL),
        seed: opts.seed.or(s.seed).or(file_seed).unwrap_or(DEFAULT_SEED),
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize to JSON")
}

/// Runs one scenario and returns its records (several for the
/// counterexample suite, one otherwise).
pub fn run_scenario(s: &Scenario, file_seed: Option<u64>, opts: RunOptions) -> Result<Vec<Value>, CliError> {
    let eff = effective(s, file_seed, opts);
    let check_positive = |v: f64, path: &str| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(CliError::Config {
                scenario: Some(s.name.clone()),
                path: path.into(),
                message: format!("must be positive and finite, got {v}"),
            })
        }
    };
    check_positive(eff.res, "grids.res")?;
    check_positive(eff.d_res, "grids.d_res")?;
    check_positive(eff.tol, "tolerances.tol")?;
    check_positive(eff.cert_tol, "tolerances.cert_tol")?;
    if let Some(b) = &s.builtin {
        if catalog::entry(b).is_none() {
            return Err(CliError::Config {
                scenario: Some(s.name.clone()),
                path: "builtin".into(),
                message: format!("unknown built-in `{b}`; see `deq list`"),
            });
        }
    }
    let outcomes = match s.kind {
        ScenarioKind::Equilibrium => vec![equilibrium(s, &eff)?],
        ScenarioKind::Coercive => vec![coercive(s, &eff)?],
        ScenarioKind::Dgn => vec![dgn(s, &eff)?],
        ScenarioKind::Nash => vec![nash(s, &eff)?],
        ScenarioKind::DenseCheck => vec![dense_check(s, &eff)?],
        ScenarioKind::Counterexample => counterexample(s, &eff)?,
    };
    let anchor = s
        .anchor
        .clone()
        .or_else(|| s.builtin.as_deref().and_then(catalog::entry).map(|e| e.anchor.to_string()))
        .unwrap_or_else(|| "custom".to_string());
    Ok(outcomes
        .into_iter()
        .map(|o| record(s, &anchor, &eff, o))
        .collect())
}

fn record(s: &Scenario, anchor: &str, eff: &Effective, o: Outcome) -> Value {
    let expectation = s.expect.as_ref().map(|e| {
        let failures = check_expect(e, &o);
        json!({ "met": failures.is_empty(), "failures": failures, "expected": to_json(e) })
    });
    json!({
        "scenario": s.name,
        "kind": s.kind.name(),
        "builtin": s.builtin,
        "anchor": anchor,
        "label": o.label,
        "grids": { "res": eff.res, "d_res": eff.d_res, "per_player": eff.per_player },
        "tolerances": { "tol": eff.tol, "cert_tol": eff.cert_tol },
        "seed": eff.seed,
        "verdict": o.verdict,
        "point": o.point,
        "hypotheses_pass": o.hypotheses_pass,
        "residual": o.residual,
        "residuals": o.residuals,
        "witnesses": o.witnesses,
        "expectation": expectation,
        "report": o.report,
    })
}

fn check_expect(e: &Expect, o: &Outcome) -> Vec<String> {
    let mut fails = Vec::new();
    if let Some(v) = &e.verdict {
        if !v.eq_ignore_ascii_case(&o.verdict) {
            fails.push(format!("verdict {} != expected {v}", o.verdict));
        }
    }
    if let Some(p) = &e.point {
        let tol = e.point_tol.unwrap_or(o.step + 1e-9);
        match &o.point {
            Some(q) if q.len() == p.len() => {
                let d = p.iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                if !(d <= tol) {
                    fails.push(format!("point {q:?} is {d} from expected {p:?} (tol {tol})"));
                }
            }
            q => fails.push(format!("point {q:?} does not match expected {p:?}")),
        }
    }
    if let Some(h) = &e.hypotheses {
        let want = h.eq_ignore_ascii_case("pass");
        match o.hypotheses_pass {
            Some(got) if got == want => {}
            got => fails.push(format!("hypotheses {got:?}, expected {h}")),
        }
    }
    if let Some(r) = e.residual {
        let tol = e.residual_tol.unwrap_or(1e-9);
        match o.residual {
            Some(got) if (got - r).abs() <= tol => {}
            got => fails.push(format!("residual {got:?}, expected {r} ± {tol}")),
        }
    }
    fails
}

fn run_err<'a>(s: &'a Scenario, path: &str) -> impl Fn(Error) -> CliError + 'a {
    let path = path.to_string();
    move |source| {
        let path = match &source {
            Error::GridTooFine { .. } => "grids.res".to_string(),
            _ => path.clone(),
        };
        CliError::Run {
            scenario: s.name.clone(),
            path,
            source,
        }
    }
}

fn failing_witnesses(source: &str, verdicts: &[ValidationVerdict]) -> Vec<Value> {
    verdicts
        .iter()
        .filter(|v| v.is_fail())
        .map(|v| json!({ "source": source, "condition": v.condition, "witness": v.witness, "detail": v.detail }))
        .collect()
}

fn status_witnesses(status: &SolveStatus) -> Vec<Value> {
    match status {
        SolveStatus::Found { .. } => Vec::new(),
        SolveStatus::NoSolutionOnGrid {
            universal_witness, ..
        } => vec![json!({ "source": "solver", "universal_witness": universal_witness })],
        SolveStatus::ExtensionFailed { y, residual, .. } => {
            vec![json!({ "source": "extension", "y": y, "margin": residual })]
        }
    }
}

fn solve_config(eff: &Effective) -> SolveConfig {
    SolveConfig {
        k_res: eff.res,
        d_res: eff.d_res,
        tol: eff.tol,
        cert_tol: eff.cert_tol,
        seed: eff.seed,
        ..SolveConfig::default()
    }
}

fn solve_outcome(r: &SolveReport, step: f64) -> Outcome {
    let d_margin = match &r.status {
        SolveStatus::Found { d_margin, .. } | SolveStatus::ExtensionFailed { d_margin, .. } => Some(*d_margin),
        SolveStatus::NoSolutionOnGrid { .. } => None,
    };
    let mut witnesses = status_witnesses(&r.status);
    witnesses.extend(failing_witnesses("hypotheses", &r.hypotheses));
    Outcome {
        label: Some(r.label.clone()),
        verdict: r.status.name().to_string(),
        point: Some(r.status.point().coords().to_vec()),
        step,
        hypotheses_pass: Some(r.hypotheses_pass()),
        residual: Some(r.status.residual()),
        residuals: json!({ "residual": r.status.residual(), "d_margin": d_margin }),
        witnesses,
        report: to_json(r),
    }
}

fn equilibrium(s: &Scenario, eff: &Effective) -> Result<Outcome, CliError> {
    let inst: EquilibriumInstance = config::instance(s)?;
    let k = inst.domain.build().map_err(run_err(s, "instance.domain"))?;
    let d = inst.dense.build(k.clone()).map_err(run_err(s, "instance.dense"))?;
    let f = inst.bifunction.build(k.clone()).map_err(run_err(s, "instance.bifunction"))?;
    let p = EquilibriumProblem::new(k, d, f, inst.problem).map_err(run_err(s, "instance"))?;
    let cfg = solve_config(eff);
    let Some(samples) = inst.kkm_samples else {
        let r = solve_compact(&p, &cfg).map_err(run_err(s, "instance"))?;
        return Ok(solve_outcome(&r, eff.res));
    };
    let (grids, kkm) = kkm_certificate(&p, &cfg, samples).map_err(run_err(s, "instance.kkm_samples"))?;
    let r = solve_on_grids(&p, &cfg, &grids).map_err(run_err(s, "instance"))?;
    let mut o = solve_outcome(&r, eff.res);
    let x0_in = grids
        .all
        .find(r.status.point(), cfg.tolerances.membership)
        .is_some_and(|i| kkm.intersection_contains(i));
    o.residuals["kkm_intersection_residual"] = json!(kkm.intersection.residual);
    o.residuals["kkm_intersection_size"] = json!(kkm.intersection.size);
    o.residuals["kkm_contains_solution"] = json!(x0_in);
    if let Some(w) = &kkm.covering.witness {
        o.witnesses.push(json!({ "source": "kkm_covering", "witness": w }));
    }
    o.report = json!({ "solve": o.report, "kkm": kkm });
    Ok(o)
}

fn coercive(s: &Scenario, eff: &Effective) -> Result<Outcome, CliError> {
    let inst: CoerciveInstance = config::instance(s)?;
    let k = inst.cone.build().map_err(run_err(s, "instance.cone"))?;
    let f = inst
        .bifunction
        .build(Region::Truncated {
            set: k.clone(),
            radius: inst.r1,
        })
        .map_err(run_err(s, "instance.bifunction"))?;
    let d = inst.dense.kind().map_err(run_err(s, "instance.dense"))?;
    let p = NoncompactProblem::new(k, d, f, inst.problem).map_err(run_err(s, "instance"))?;
    let y0 = inst.y0.as_deref().map(point).transpose().map_err(run_err(s, "instance.y0"))?;
    let mut spec = CoercivitySpec::new(inst.mode, inst.r, y0, inst.r1).map_err(run_err(s, "instance"))?;
    if let Some(n) = inst.probes {
        spec.probes = n;
    }
    let out = solve_noncompact(&p, &spec, &solve_config(eff)).map_err(run_err(s, "instance"))?;
    let mut o = solve_outcome(&out.report, eff.res);
    let coercivity_ok = out.coercivity.as_ref().is_none_or(|v| v.is_pass());
    o.hypotheses_pass = Some(out.report.hypotheses_pass() && coercivity_ok);
    if let Some(v) = &out.coercivity {
        o.witnesses.extend(failing_witnesses("coercivity", std::slice::from_ref(v)));
    }
    let worst_line = out
        .certificate
        .lines
        .iter()
        .map(|l| l.direct)
        .fold(f64::INFINITY, f64::min);
    o.residuals["certificate_lines"] = json!(out.certificate.lines.len());
    o.residuals["certificate_ok"] = json!(out.certificate.all_ok());
    o.residuals["certificate_min_direct"] = json!(worst_line);
    o.report = to_json(&out);
    Ok(o)
}

fn dgn(s: &Scenario, eff: &Effective) -> Result<Outcome, CliError> {
    let inst: DgnInstance = config::instance(s)?;
    let c = inst.economy.build().map_err(run_err(s, "instance.economy"))?;
    let d = inst.dense.build(c.simplex()).map_err(run_err(s, "instance.dense"))?;
    let r = solve_dgn(&c, &d, eff.res, eff.tol).map_err(run_err(s, "instance"))?;
    let mut witnesses = failing_witnesses("walras", std::slice::from_ref(&r.walras));
    witnesses.extend(failing_witnesses("hypotheses", &r.hypotheses));
    let hyp = r.walras.is_pass() && r.hypotheses.iter().all(|v| v.is_pass());
    Ok(Outcome {
        label: Some(r.label.clone()),
        verdict: r.status.clone(),
        point: Some(r.x0.coords().to_vec()),
        step: eff.res,
        hypotheses_pass: Some(hyp),
        residual: Some(r.sigma_residual),
        residuals: json!({
            "sigma_residual": r.sigma_residual,
            "z": r.z,
            "z_negativity": r.z_negativity,
        }),
        witnesses,
        report: to_json(&r),
    })
}

fn nash(s: &Scenario, eff: &Effective) -> Result<Outcome, CliError> {
    let inst: NashInstance = config::instance(s)?;
    let g = inst.game.build().map_err(run_err(s, "instance.game"))?;
    let res = eff.per_player.clone().unwrap_or_else(|| vec![eff.res]);
    if let Some(bad) = res.iter().find(|r| !(**r > 0.0)) {
        return Err(CliError::Config {
            scenario: Some(s.name.clone()),
            path: "grids.per_player".into(),
            message: format!("resolutions must be positive, got {bad}"),
        });
    }
    let hypotheses = if inst.validate {
        validate_nash_hypotheses(&g, &res, eff.tol, eff.seed).map_err(run_err(s, "instance"))?
    } else {
        Vec::new()
    };
    let r = match &inst.start {
        Some(blocks) => {
            let blocks = blocks
                .iter()
                .map(|b| point(b))
                .collect::<dense_equilibria::Result<Vec<Point>>>()
                .map_err(run_err(s, "instance.start"))?;
            solve_nash_from(&g, &res, eff.tol, inst.max_rounds, &Multistrategy::new(blocks))
        }
        None => solve_nash(&g, &res, eff.tol, inst.max_rounds),
    }
    .map_err(run_err(s, "instance"))?;
    let step = r.resolutions.iter().copied().fold(0.0, f64::max);
    let mut residuals = json!({ "v": r.v, "rounds": r.rounds, "restarts": r.restarts });
    if inst.oracle {
        let grids = g.grids(&res).map_err(run_err(s, "grids"))?;
        let (best, v) = exhaustive_argmin(&g, &grids);
        let gap = best.flatten().dist_inf(&r.profile.flatten());
        residuals["oracle_v"] = json!(v);
        residuals["oracle_profile"] = to_json(&best);
        residuals["oracle_agrees"] = json!(gap <= step + 1e-9 && (v - r.v).abs() <= eff.tol);
    }
    let mut witnesses = failing_witnesses("hypotheses", &hypotheses);
    if !r.certified {
        witnesses.push(json!({ "source": "solver", "worst_y": r.worst_y, "v": r.v }));
    }
    Ok(Outcome {
        label: Some(r.label.clone()),
        verdict: if r.certified { "Found" } else { "NoSolutionOnGrid" }.to_string(),
        point: Some(r.profile.flatten().coords().to_vec()),
        step,
        hypotheses_pass: inst.validate.then(|| hypotheses.iter().all(|v| v.is_pass())),
        residual: Some(r.v),
        residuals,
        witnesses,
        report: json!({ "solve": r, "hypotheses": hypotheses }),
    })
}

fn dense_check(s: &Scenario, eff: &Effective) -> Result<Outcome, CliError> {
    let inst: DenseCheckInstance = config::instance(s)?;
    let parent = inst.parent.build().map_err(run_err(s, "instance.parent"))?;
    let u = inst.dense.build(parent).map_err(run_err(s, "instance.dense"))?;
    let pair = match &inst.pair {
        Some([a, b]) => Some((
            point(a).map_err(run_err(s, "instance.pair"))?,
            point(b).map_err(run_err(s, "instance.pair"))?,
        )),
        None => None,
    };
    let params = SsdParams {
        pairs: inst.pairs,
        per_segment: inst.per_segment,
        eps: inst.eps,
        seed: eff.seed,
    };
    let mut results = serde_json::Map::new();
    let mut residuals = serde_json::Map::new();
    let mut witnesses = Vec::new();
    let mut all_ok = true;
    for check in &inst.checks {
        match check {
            DenseCheck::Dense => {
                let grid = make_grid(u.parent(), eff.res, &Tolerances::default()).map_err(run_err(s, "grids.res"))?;
                let r = check_dense(&u, &grid, inst.eps, eff.seed).map_err(run_err(s, "instance.eps"))?;
                all_ok &= r.dense_ok;
                residuals.insert("worst_distance".into(), json!(r.worst_distance));
                if !r.dense_ok {
                    witnesses.push(json!({ "source": "dense", "point": r.worst_point, "distance": r.worst_distance }));
                }
                results.insert("dense".into(), to_json(&r));
            }
            DenseCheck::SelfSegmentDense => {
                let r = match &pair {
                    Some(p) => check_self_segment_dense_pairs(&u, std::slice::from_ref(p), params),
                    None => check_self_segment_dense(&u, params),
                }
                .map_err(run_err(s, "instance"))?;
                all_ok &= r.segment_ok && r.dense_ok;
                if let Some(w) = &r.witness {
                    let replay = replay_segment_witness(&u, w);
                    witnesses.push(json!({
                        "source": "self_segment_dense",
                        "segment": w,
                        "uncovered_from": w.point_lo(),
                        "uncovered_to": w.point_hi(),
                        "replays": replay == Some((w.t_lo, w.t_hi)),
                    }));
                }
                results.insert("self_segment_dense".into(), to_json(&r));
            }
            DenseCheck::HullClosure => {
                let configs: Vec<Vec<Point>> = match &pair {
                    Some((a, b)) => vec![vec![a.clone(), b.clone()]],
                    None => {
                        let mut r = rng(eff.seed);
                        (0..inst.pairs)
                            .map(|c| {
                                let k = 2 + c % 3;
                                (0..k).map(|_| u.sample(&mut r)).collect::<dense_equilibria::Result<Vec<_>>>()
                            })
                            .collect::<dense_equilibria::Result<_>>()
                            .map_err(run_err(s, "instance.dense"))?
                    }
                };
                let mut failed = None;
                let mut grid_points = 0;
                for (c, hull) in configs.iter().enumerate() {
                    let r = check_hull_closure(&u, hull, inst.hull_res, inst.eps, eff.seed.wrapping_add(c as u64))
                        .map_err(run_err(s, "instance"))?;
                    grid_points += r.grid_points;
                    if !r.ok {
                        failed = Some((hull.clone(), r));
                        break;
                    }
                }
                all_ok &= failed.is_none();
                if let Some((hull, r)) = &failed {
                    witnesses.push(json!({ "source": "hull_closure", "hull": hull, "uncovered": r.uncovered }));
                }
                results.insert(
                    "hull_closure".into(),
                    json!({ "ok": failed.is_none(), "configurations": configs.len(), "grid_points": grid_points }),
                );
            }
        }
    }
    Ok(Outcome {
        label: Some(u.label().to_string()),
        verdict: if all_ok { "pass" } else { "fail" }.to_string(),
        point: None,
        step: eff.res,
        hypotheses_pass: None,
        residual: None,
        residuals: Value::Object(residuals),
        witnesses,
        report: Value::Object(results),
    })
}

fn counterexample(s: &Scenario, eff: &Effective) -> Result<Vec<Outcome>, CliError> {
    let inst: CounterexampleInstance = config::instance(s)?;
    let problems = counterexample_problems(inst.n).map_err(run_err(s, "instance.n"))?;
    let cfg = solve_config(eff);
    problems
        .iter()
        .map(|p| {
            let r = solve_compact(p, &cfg).map_err(run_err(s, "instance"))?;
            Ok(solve_outcome(&r, eff.res))
        })
        .collect()
}
