use std::path::PathBuf;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::averaging::{
    abs_deviation, boundary_ratio_phi_i, dls, growth_bound, index_table, AveragingSets, IndexSequence,
    ZeroDensityRule,
};
use crate::covering::{
    heisenberg_incremental, incremental_witness_search, max_internal_gap, multiplicity_at, IncrementalSequence,
    RecipeBudget, SearchOutcome,
};
use crate::dynamics::{
    build_tower, compatibility, stage_init, verify_alternation, HeisenbergProvider, HopfSystem, Observable,
    Placement, ZFunction,
};
use crate::error::{Error, Result};
use crate::exact::{parse_rat, rat_str};
use crate::group::{central_powers_in_ball, bfs_lengths, GroupContext, GroupKind, DEFAULT_ELEMENT_BUDGET};

use super::{snapshot_path, Cli, Command, GroupArg, Report, Settings, Status};

pub(super) fn dispatch(cli: &Cli, s: &Settings) -> Result<Report> {
    let budget = s.get(cli.budget, "budget", DEFAULT_ELEMENT_BUDGET)?;
    if budget == 0 {
        return Err(Error::Invalid("budget must be positive".into()));
    }
    let ctx = Arc::new(context(cli, s)?.with_budget(budget));
    let seed = s.get(cli.seed, "seed", 0)?;
    let horizon = s.get(cli.horizon, "horizon", 64)?;
    match &cli.command {
        Command::Balls { max, lo, hi } => {
            let max = s.get(*max, "max", default_ball_max(ctx.kind()))?;
            balls(&ctx, max, s.get(*lo, "lo", 8)?, s.get(*hi, "hi", 16)?.min(max))
        }
        Command::Mset { r_lo, r_hi } => mset(&ctx, s.get(*r_lo, "r_lo", 0)?, s.get(*r_hi, "r_hi", 12)?),
        Command::Incremental { k, r_max, nodes } => {
            let default_r = if ctx.kind() == GroupKind::Heisenberg { 63 } else { 12 };
            incremental(&ctx, s.get(*k, "k", 3)?, s.get(*r_max, "r_max", default_r)?, s.get(*nodes, "nodes", 2_000_000)?)
        }
        Command::Avgseq { lo, hi } => avgseq(s.get(*lo, "lo", 1)?, s.get(*hi, "hi", 8)?),
        Command::Hopf { phi, psi, points, lo, hi, systems } => {
            let phi = support(&s.get(phi.clone(), "phi", "0:1,5:1".into())?)?;
            let psi = support(&s.get(psi.clone(), "psi", "0:1".into())?)?;
            let points = int_list(&s.get(points.clone(), "points", "0".into())?)?;
            let extra = s.get(*systems, "systems", 0)?;
            let mut list = vec![(phi, psi)];
            list.extend(random_systems(seed, extra));
            hopf(&list, &points, s.get(*lo, "lo", 1)?, s.get(*hi, "hi", 12)?)
        }
        Command::Stack { snapshots, shuffle, max_radius } => {
            let stages = s.get(cli.stages, "stages", 3)?;
            let shuffle = *shuffle || s.get(None, "shuffle", false)?;
            let provider = HeisenbergProvider {
                max_radius: s.get(*max_radius, "max_radius", 40)?,
                ..HeisenbergProvider::default()
            };
            let out: Option<PathBuf> = s.opt(cli.out.clone(), "out")?;
            let dir: Option<PathBuf> = s.opt(snapshots.clone(), "snapshots")?;
            let placement = if shuffle { Placement::Shuffled { seed } } else { Placement::Packed };
            stack(&ctx, &provider, stages, placement, dir, out)
        }
        Command::Maximal { phi, psi, grid } => {
            let phi = support(&s.get(phi.clone(), "phi", "0:2,3:1".into())?)?;
            let psi = support(&s.get(psi.clone(), "psi", "0:1,1:1,4:1".into())?)?;
            let grid = rat_list(&s.get(grid.clone(), "grid", "1/4,1/2,1,2,4,8,16".into())?)?;
            maximal(phi, psi, &grid, horizon)
        }
    }
}

fn context(cli: &Cli, s: &Settings) -> Result<GroupContext> {
    let group = s.value_enum(cli.group, "group", GroupArg::Heis)?;
    let rank = s.get(cli.rank, "rank", 2)?;
    if rank == 0 {
        return Err(Error::Invalid("rank must be positive".into()));
    }
    Ok(match group {
        GroupArg::Zd => GroupContext::zd(rank),
        GroupArg::Heis => GroupContext::heisenberg(),
        GroupArg::Free => GroupContext::free(rank),
        GroupArg::Zinf => GroupContext::zinf(rank as u32),
    })
}

fn default_ball_max(kind: GroupKind) -> u64 {
    match kind {
        GroupKind::Heisenberg => 16,
        GroupKind::Zd(_) => 50,
        GroupKind::Free(_) => 8,
        _ => 10,
    }
}

/// `s:value` pairs separated by commas.
fn support(text: &str) -> Result<ZFunction> {
    let mut pairs = Vec::new();
    for item in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (p, v) = item.split_once(':').ok_or_else(|| Error::Invalid(format!("expected s:value, got {item:?}")))?;
        let p: i64 = p.trim().parse().map_err(|_| Error::Invalid(format!("bad position {p:?}")))?;
        let v = parse_rat(v).ok_or_else(|| Error::Invalid(format!("bad value {v:?}")))?;
        pairs.push((p, v));
    }
    Ok(ZFunction::new(pairs))
}

fn int_list(text: &str) -> Result<Vec<i64>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Invalid(format!("bad integer {t:?}"))))
        .collect()
}

fn rat_list(text: &str) -> Result<Vec<BigRational>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse_rat(t).ok_or_else(|| Error::Invalid(format!("bad rational {t:?}"))))
        .collect()
}

fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Random `φ` with values in `[-5, 5]` and `ψ` with values in `[1, 5]`,
/// both supported in `[-20, 20]`.
pub(crate) fn random_systems(seed: u64, count: usize) -> Vec<(ZFunction, ZFunction)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut draw = |lo: i64, hi: i64| {
                let n = rng.gen_range(1..=5);
                ZFunction::new((0..n).map(|_| (rng.gen_range(-20..=20), int(rng.gen_range(lo..=hi)))).collect::<Vec<_>>())
            };
            let phi = draw(-5, 5);
            let psi = draw(1, 5);
            (phi, psi)
        })
        .collect()
}

fn balls(ctx: &GroupContext, max: u64, lo: u64, hi: u64) -> Result<Report> {
    let mut r = Report::new("balls", &["n", "size"]);
    let sizes = match ctx.ball_sizes(max) {
        Ok(s) => s,
        Err(e) => {
            r.absorb("enumeration", e)?;
            return Ok(r);
        }
    };
    for (n, size) in sizes.iter().enumerate() {
        r.row(vec![n.to_string(), size.to_string()]);
    }
    r.check("ball_0_is_identity", sizes[0] == 1, format!("|B_0| = {}", sizes[0]));
    let increasing = sizes.windows(2).all(|w| w[0] < w[1]);
    r.check("strictly_increasing", increasing, "|B_n| < |B_{n+1}|");
    match ctx.kind() {
        GroupKind::Zd(2) => {
            let ok = sizes.iter().enumerate().all(|(n, &s)| s as u64 == 2 * (n * n) as u64 + 2 * n as u64 + 1);
            r.check("matches_2n2_plus_2n_plus_1", ok, format!("n ≤ {max}"));
        }
        GroupKind::Free(rank) => {
            let q = 2 * rank as u64 - 1;
            let ok = sizes.iter().enumerate().all(|(n, &s)| {
                let sphere_sum: u64 = (1..=n as u32).map(|j| 2 * rank as u64 * q.pow(j - 1)).sum();
                s as u64 == 1 + sphere_sum
            });
            r.check("matches_free_group_count", ok, format!("n ≤ {max}"));
        }
        GroupKind::Heisenberg => {
            if max >= 2 {
                r.check("b1_is_5", sizes[1] == 5, format!("|B_1| = {}", sizes[1]));
                r.check("b2_is_17", sizes[2] == 17, format!("|B_2| = {}", sizes[2]));
            }
            let depth = max.min(8);
            let bfs = bfs_lengths(ctx, depth)?;
            let mut agree = true;
            for (g, len) in &bfs {
                agree &= ctx.word_length(g)? == *len;
            }
            r.check("closed_form_matches_bfs", agree, format!("all of B_{depth}"));
        }
        _ => {}
    }
    if lo >= 1 && hi > lo {
        let slope = crate::covering::log_log_slope(&sizes, lo, hi);
        r.note("log_log_slope_float", Status::Info, format!("{slope:.4} over [{lo}, {hi}]"));
    }
    Ok(r)
}

fn mset(ctx: &GroupContext, r_lo: u64, r_hi: u64) -> Result<Report> {
    let mut rep = Report::new("mset", &["r", "size", "min", "max", "gap_s", "gap_t", "gap"]);
    let mut symmetric = true;
    let mut gaps: Vec<(u64, i64)> = Vec::new();
    for r in r_lo..=r_hi {
        let m = match central_powers_in_ball(ctx, r) {
            Ok(m) => m,
            Err(e) => {
                rep.absorb("enumeration", e)?;
                return Ok(rep);
            }
        };
        symmetric &= m.iter().all(|x| m.binary_search(&-x).is_ok());
        let gap = max_internal_gap(&m);
        let (s, t, len) = match gap {
            Some((s, t)) => (s.to_string(), t.to_string(), (t - s).to_string()),
            None => ("-".into(), "-".into(), "-".into()),
        };
        if let Some((s, t)) = gap {
            gaps.push((r, t - s));
        }
        let lo = m.first().map(|x| x.to_string()).unwrap_or_default();
        let hi = m.last().map(|x| x.to_string()).unwrap_or_default();
        rep.row(vec![r.to_string(), m.len().to_string(), lo, hi, s, t, len]);
    }
    rep.check("symmetric", symmetric, "M_r = -M_r on every row");
    rep.check("max_gap_positive", gaps.iter().all(|g| g.1 > 0), "t_r - s_r > 0 where a gap exists");
    rep.check(
        "max_gap_weakly_increasing",
        gaps.windows(2).all(|w| w[0].1 <= w[1].1),
        format!("{} radii with a gap", gaps.len()),
    );
    Ok(rep)
}

fn certificate_rows(rep: &mut Report, ctx: &GroupContext, seq: &IncrementalSequence, k: usize) -> Result<()> {
    for (j, m) in seq.members().iter().enumerate() {
        rep.row(vec![j.to_string(), m.radius.to_string(), m.center.to_string()]);
    }
    let cert = seq.certificate();
    rep.check("incremental", cert.incremental, "each center avoids all earlier members");
    let at_e = multiplicity_at(seq.family(), &ctx.identity())?;
    rep.check("multiplicity_at_identity", at_e == k, format!("{at_e} of {k}"));
    rep.note("multiplicity", Status::Info, format!("{} at {}", cert.multiplicity, cert.witness));
    Ok(())
}

fn incremental(ctx: &Arc<GroupContext>, k: usize, r_max: u64, nodes: u64) -> Result<Report> {
    let mut rep = Report::new("incremental", &["member", "radius", "center"]);
    if ctx.kind() == GroupKind::Heisenberg {
        match heisenberg_incremental(ctx, k, RecipeBudget { r_max, nodes }) {
            Ok(found) => {
                certificate_rows(&mut rep, ctx, &found.sequence, k)?;
                rep.note("gap_recipe_verified", Status::Info, found.recipe.verified.to_string());
                if let Some(r) = found.fallback_radius {
                    rep.note("fallback_radius", Status::Info, r.to_string());
                }
            }
            Err(e) => rep.absorb("search", e)?,
        }
        return Ok(rep);
    }
    let mut explored = 0u64;
    for radius in 1..=r_max {
        match incremental_witness_search(ctx, &[radius], k, nodes) {
            Ok(SearchOutcome::Found(seq)) => {
                certificate_rows(&mut rep, ctx, &seq, k)?;
                rep.note("radius", Status::Info, radius.to_string());
                return Ok(rep);
            }
            Ok(SearchOutcome::Exhausted { nodes, .. }) => explored += nodes,
            Err(e) => {
                rep.absorb("search", e)?;
                return Ok(rep);
            }
        }
    }
    rep.note("search", Status::Unknown, format!("no witness with radius ≤ {r_max} after {explored} nodes"));
    Ok(rep)
}

fn avgseq(lo: u64, hi: u64) -> Result<Report> {
    if lo == 0 || hi < lo {
        return Err(Error::Invalid("need 1 ≤ lo ≤ hi".into()));
    }
    let seq = IndexSequence::new();
    let mut rep = Report::new("avgseq", &["i", "m", "n", "big_n", "l", "f_plus", "nested"]);
    let rows = index_table(&seq, lo, hi);
    let mut nested = true;
    for row in &rows {
        nested &= row.nested != Some(false);
        rep.row(vec![
            row.i.to_string(),
            row.m.to_string(),
            row.n.to_string(),
            row.big_n.to_string(),
            row.l.as_ref().map(|l| l.to_string()).unwrap_or_else(|| "-".into()),
            row.f_plus_radius.to_string(),
            row.nested.map(|b| b.to_string()).unwrap_or_else(|| "-".into()),
        ]);
    }
    rep.check("nesting", nested, format!("n(i-1) + N(m(i-1)) ≤ n(i) - N(m(i)) for i in [{lo}, {hi}]"));
    let top = rows.last().map(|r| r.m).unwrap_or(1).min(12);
    let bound = (1..=top).all(|m| seq.growth_bound_holds(m));
    rep.check("growth_bound", bound, format!("N(m) ≤ (6·2^(m-1))^m for m ≤ {top}"));
    rep.note("growth_bound_value", Status::Info, growth_bound(top).to_string());
    Ok(rep)
}

fn hopf(systems: &[(ZFunction, ZFunction)], points: &[i64], lo: u64, hi: u64) -> Result<Report> {
    if lo == 0 || hi < lo {
        return Err(Error::Invalid("need 1 ≤ lo ≤ hi".into()));
    }
    let seq = IndexSequence::new();
    let mut rep = Report::new("hopf", &["system", "x", "i", "n", "ratio", "at_limit", "phi_i"]);
    let mut absorbed = true;
    let mut boundary_zero = true;
    for (idx, (phi, psi)) in systems.iter().enumerate() {
        let sys = match HopfSystem::new(phi.clone(), psi.clone()) {
            Ok(s) => s,
            Err(Error::ZeroDenominator) => {
                rep.note(&format!("system_{idx}"), Status::Info, "skipped: Σψ = 0");
                continue;
            }
            Err(e) => return Err(e),
        };
        let limit = sys.limit();
        for &x in points {
            let threshold = BigUint::from(sys.absorption_threshold(x));
            let mut stable_from = None;
            let mut deviations = Vec::new();
            for i in lo..=hi {
                let n = seq.n(i);
                let ratio = sys.ratio(&n, x);
                let at_limit = ratio.as_ref().map(|r| *r == limit).unwrap_or(false);
                if n >= threshold {
                    absorbed &= at_limit;
                    stable_from.get_or_insert(i);
                }
                if let Ok(r) = &ratio {
                    deviations.push(r.clone());
                }
                let sets = AveragingSets::new(&seq, i);
                let phi_i = match boundary_ratio_phi_i(phi, &seq, i, &x) {
                    Ok(v) => {
                        let past = sets.boundary.as_ref().is_some_and(|b| b.inner >= threshold);
                        if past {
                            boundary_zero &= v.is_zero();
                        }
                        rat_str(&v)
                    }
                    Err(Error::ZeroDenominator) => "undefined".into(),
                    Err(Error::Precondition(_)) => "-".into(),
                    Err(e) => return Err(e),
                };
                rep.row(vec![
                    idx.to_string(),
                    x.to_string(),
                    i.to_string(),
                    n.to_string(),
                    ratio.as_ref().map(rat_str).unwrap_or_else(|_| "undefined".into()),
                    at_limit.to_string(),
                    phi_i,
                ]);
            }
            let name = format!("system_{idx}_x_{x}");
            let stable = stable_from.map(|i| i.to_string()).unwrap_or_else(|| "beyond range".into());
            rep.note(&format!("{name}_stabilizes_at"), Status::Info, stable);
            if !deviations.is_empty() {
                let dev = abs_deviation(&deviations, &limit);
                let grid = [int(0), BigRational::new(1.into(), 100.into()), int(1)];
                let d = dls(&dev, &grid, ZeroDensityRule::Sqrt)?;
                let v = d.value.as_ref().map(rat_str).unwrap_or_else(|| "above grid".into());
                rep.note(&format!("{name}_dls_abs_deviation"), Status::Info, v);
            }
        }
    }
    rep.check("ratio_equals_limit_past_threshold", absorbed, "R = Σφ/Σψ once n(i) reaches the support");
    rep.check("boundary_statistic_zero_past_threshold", boundary_zero, "φ_i = 0 once the annulus clears the support");
    Ok(rep)
}

fn stack(
    ctx: &Arc<GroupContext>,
    provider: &HeisenbergProvider,
    stages: u32,
    placement: Placement,
    dir: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<Report> {
    if stages == 0 {
        return Err(Error::Invalid("stages must be positive".into()));
    }
    let mut rep = Report::new(
        "stack",
        &["stage", "cuts", "v", "hitting", "radius", "r_n", "pieces", "phi_l1", "psi_l1", "alternation", "i_increasing"],
    );
    let first = stage_init(ctx.clone()).with_placement(placement);
    let (history, plans, err) = build_tower(first, provider, stages);
    let report = verify_alternation(&history)?;
    let two = int(2);
    let mut norms_ok = true;
    let mut invariants_ok = true;
    for (s, stage) in history.iter().enumerate() {
        let plan = s.checked_sub(1).map(|p| &plans[p]);
        let phi = stage.norm_l1(Observable::Phi);
        let psi = stage.norm_l1(Observable::Psi);
        norms_ok &= phi < two && psi < two;
        invariants_ok &= stage.check_invariants().is_ok();
        let row = &report.stages[s];
        rep.row(vec![
            stage.n().to_string(),
            plan.map(|p| p.cuts.to_string()).unwrap_or_else(|| "-".into()),
            plan.map(|p| rat_str(&p.v)).unwrap_or_else(|| "-".into()),
            plan.map(|p| p.hitting.len().to_string()).unwrap_or_else(|| "-".into()),
            stage.i_star().to_string(),
            rat_str(stage.r()),
            stage.pieces().len().to_string(),
            rat_str(&phi),
            rat_str(&psi),
            (row.alternation && row.persisted).to_string(),
            row.index_increasing.to_string(),
        ]);
        if let Some(path) = snapshot_path(dir.as_deref(), out.as_deref(), stage.n()) {
            let json = serde_json::to_string_pretty(&stage.snapshot()).map_err(|e| Error::Internal(e.to_string()))?;
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| Error::Invalid(format!("{}: {e}", parent.display())))?;
            }
            std::fs::write(&path, json + "\n").map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        }
    }
    let mut compat = 0usize;
    for pair in history.windows(2) {
        compat += compatibility(&pair[0], &pair[1], 200)?.len();
    }
    rep.check("interval_invariants", invariants_ok, "disjoint equal intervals, pieces tile [0, 1]");
    rep.check("norms_below_2", norms_ok, "‖φ‖₁ < 2 and ‖ψ‖₁ < 2 at every stage");
    let detail = format!("depth {} of {}", report.depth(), history.len());
    rep.check("alternation", report.violations.is_empty(), detail);
    rep.check("i_increasing", report.index_failures.is_empty(), "i_n < i_{n+1} along every point");
    rep.check("compatibility", compat == 0, format!("{compat} disagreements"));
    for v in &report.violations {
        let ratio = v.ratio.clone().unwrap_or_else(|| "undefined".into());
        rep.note("alternation_violation", Status::Fail, format!("stage {} piece {} ratio {ratio}", v.stage, v.piece));
    }
    match err {
        None => rep.check("build", true, format!("{} stages", history.len())),
        Some(e) => {
            let built = history.len();
            let e = match e {
                Error::Budget { .. } | Error::Exhausted { .. } => e,
                other => {
                    rep.check("build", false, format!("stage {}: {other}", built + 1));
                    return Ok(rep);
                }
            };
            rep.note("build", Status::Unknown, format!("stage {} of {stages}: {e}", built + 1));
        }
    }
    Ok(rep)
}

fn maximal(phi: ZFunction, psi: ZFunction, grid: &[BigRational], horizon: u64) -> Result<Report> {
    if !phi.is_nonnegative() || !psi.is_nonnegative() {
        return Err(Error::Invalid("maximal needs non-negative φ and ψ".into()));
    }
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) || grid.iter().any(|t| !t.is_positive()) {
        return Err(Error::Invalid("grid must be positive and strictly increasing".into()));
    }
    let sys = HopfSystem::new(phi.clone(), psi.clone())?;
    let seq = IndexSequence::new();
    let total_phi = phi.total();
    // Finite-horizon density limsup of R_{F_i}(x), for x in the support of ψ.
    let mut limsup: Vec<(i64, BigRational, Option<BigRational>)> = Vec::new();
    for (&x, w) in psi.support() {
        let values: Vec<BigRational> = (1..=horizon).map(|i| sys.ratio(&seq.n(i), x)).collect::<Result<_>>()?;
        let d = dls(&values, grid, ZeroDensityRule::Sqrt)?;
        limsup.push((x, w.clone(), d.value));
    }
    let mut rep = Report::new("maximal", &["t", "mass", "phi_over_t", "t_mass_over_phi"]);
    let mut masses = Vec::new();
    let mut constant = BigRational::zero();
    for t in grid {
        let mass: BigRational = limsup
            .iter()
            .filter(|(_, _, v)| v.as_ref().map_or(true, |v| v > t))
            .map(|(_, w, _)| w.clone())
            .sum();
        let ratio = if total_phi.is_zero() { None } else { Some(t * &mass / &total_phi) };
        if let Some(r) = &ratio {
            constant = constant.max(r.clone());
        }
        rep.row(vec![
            rat_str(t),
            rat_str(&mass),
            rat_str(&(&total_phi / t)),
            ratio.as_ref().map(rat_str).unwrap_or_else(|| "-".into()),
        ]);
        masses.push(mass);
    }
    rep.check("mass_non_increasing", masses.windows(2).all(|w| w[0] >= w[1]), "ν{limsup > t} falls as t grows");
    let top = masses.last().cloned().unwrap_or_default();
    rep.check("mass_vanishes_at_top", top.is_zero(), format!("ν = {} at t = {}", rat_str(&top), rat_str(&grid[grid.len() - 1])));
    rep.note("empirical_constant", Status::Info, rat_str(&constant));
    rep.note("horizon", Status::Info, horizon.to_string());
    Ok(rep)
}
