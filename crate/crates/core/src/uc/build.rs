use std::collections::BTreeSet;

use uc_milp::{Model, Sense, VarId, VarKind};

use super::{CommitmentSchedule, Penalties, Product, ReservePolicy};
use crate::error::{Error, Result};
use crate::scenario::ScenarioSet;
use crate::system::{PowerSystem, PtdfMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetworkMode {
    /// Copper plate.
    Ignore,
    /// Every line limit in every hour and block.
    Full,
    /// No line rows at build time; rows are added with
    /// [`UcProblem::add_line_limits`].
    Lazy,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CommitmentMode {
    Free,
    /// Units with `Some(status)` are fixed; the rest stay free.
    FixSome(Vec<Option<Vec<bool>>>),
    /// Every unit fixed; commitment variables become continuous constants
    /// and the commitment logic rows are omitted.
    Fixed(CommitmentSchedule),
}

/// One dispatch trajectory sharing the commitment.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpec {
    pub label: String,
    /// Available wind, `[farm][hour]`.
    pub wind: Vec<Vec<f64>>,
    /// Reporting weight (scenario probability).
    pub probability: f64,
    /// Objective weight on this block's energy cost.
    pub fuel_weight: f64,
    /// Objective weight on this block's penalty slacks.
    pub penalty_weight: f64,
    /// Per-hour requirements indexed like [`Product::ALL`].
    pub requirements: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UcSpec {
    pub horizon: usize,
    pub blocks: Vec<BlockSpec>,
    /// Extra ramp transitions `(from block at t-1, to block at t)`; each block
    /// is always linked to itself.
    pub links: Vec<(usize, usize)>,
    pub network: NetworkMode,
    pub commitment: CommitmentMode,
    pub penalties: Penalties,
    /// Startup, no-load and minimum-output fuel in the objective.
    pub first_stage_cost: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LineTuple {
    pub line: usize,
    pub hour: usize,
    pub block: usize,
}

/// Variable handles of one dispatch block.
#[derive(Debug, Clone)]
pub struct BlockVars {
    /// `[g][t]` fuel-curve segment variables (MW above minimum output).
    pub segments: Vec<Vec<Vec<VarId>>>,
    /// `[product][g][t]`; non-spinning here is the online part.
    pub reserves: [Vec<Vec<Option<VarId>>>; 4],
    /// `[g][t]` offline quick-start non-spinning reserve.
    pub offline_non_spin: Vec<Vec<Option<VarId>>>,
    /// `[f][t]`.
    pub wind: Vec<Vec<VarId>>,
    /// `[bus][t]`.
    pub shed: Vec<Vec<Option<VarId>>>,
    /// `[bus][t]`.
    pub over_generation: Vec<Vec<Option<VarId>>>,
    /// `[t][product]`.
    pub shortfall: Vec<[Option<VarId>; 4]>,
}

type Expr = Vec<(VarId, f64)>;

#[derive(Debug, Clone)]
pub struct UcProblem {
    pub model: Model,
    pub spec: UcSpec,
    /// `[g][t]`.
    pub u: Vec<Vec<VarId>>,
    pub v: Vec<Vec<VarId>>,
    pub w: Vec<Vec<VarId>>,
    pub blocks: Vec<BlockVars>,
    pub enforced: BTreeSet<LineTuple>,
    /// `[block][t][bus]` net injection as terms plus constant.
    injections: Vec<Vec<Vec<(Expr, f64)>>>,
    ptdf: Option<PtdfMatrix>,
    limits: Vec<f64>,
}

fn check_wind(system: &PowerSystem, wind: &[Vec<f64>], horizon: usize, what: &str) -> Result<()> {
    if wind.len() != system.wind_farms.len() {
        return Err(Error::invalid(what, format!("{} farm series for {} farms", wind.len(), system.wind_farms.len())));
    }
    for (f, s) in wind.iter().enumerate() {
        if s.len() != horizon {
            return Err(Error::HorizonMismatch {
                entity: format!("{what} for farm {}", system.wind_farms[f].id),
                expected: horizon,
                found: s.len(),
            });
        }
        if s.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::invalid(what, "wind values must be >= 0"));
        }
    }
    Ok(())
}

/// Commitment variables with logic, minimum up/down and initial-state rows.
pub(crate) fn add_commitment(
    m: &mut Model,
    system: &PowerSystem,
    horizon: usize,
    commitment: &CommitmentMode,
) -> Result<(Vec<Vec<VarId>>, Vec<Vec<VarId>>, Vec<Vec<VarId>>)> {
    let ng = system.generators.len();
    let fixed = match commitment {
        CommitmentMode::Fixed(s) => {
            if s.on.len() != ng || s.horizon() != horizon {
                return Err(Error::invalid("commitment", "schedule does not match generators x horizon"));
            }
            Some(s)
        }
        _ => None,
    };
    let partial = match commitment {
        CommitmentMode::FixSome(p) => {
            if p.len() != ng || p.iter().flatten().any(|s| s.len() != horizon) {
                return Err(Error::invalid("commitment", "partial fixing does not match generators x horizon"));
            }
            Some(p)
        }
        _ => None,
    };
    let (mut u, mut v, mut w) = (Vec::new(), Vec::new(), Vec::new());
    for (g, gen) in system.generators.iter().enumerate() {
        let (mut ug, mut vg, mut wg) = (Vec::new(), Vec::new(), Vec::new());
        for t in 0..horizon {
            let mut var = |name: String, val: Option<bool>| match val {
                Some(b) => {
                    let x = b as u8 as f64;
                    m.add_variable(name, x, x, VarKind::Continuous).expect("fixed bounds")
                }
                None => m.binary(name),
            };
            match fixed {
                Some(s) => {
                    ug.push(var(format!("u_{}_{}", gen.id, t + 1), Some(s.on[g][t])));
                    vg.push(var(format!("v_{}_{}", gen.id, t + 1), Some(s.startup[g][t])));
                    wg.push(var(format!("w_{}_{}", gen.id, t + 1), Some(s.shutdown[g][t])));
                }
                None => {
                    ug.push(var(format!("u_{}_{}", gen.id, t + 1), None));
                    vg.push(var(format!("v_{}_{}", gen.id, t + 1), None));
                    wg.push(var(format!("w_{}_{}", gen.id, t + 1), None));
                }
            }
        }
        u.push(ug);
        v.push(vg);
        w.push(wg);
    }

    if fixed.is_none() {
        for (g, gen) in system.generators.iter().enumerate() {
            let u0 = if gen.initially_on() { 1.0 } else { 0.0 };
            let carried = gen.initial_status.unsigned_abs() as usize;
            for t in 0..horizon {
                // initial min-up / min-down carry-in
                if gen.initially_on() && t + carried < gen.min_up as usize {
                    m.set_bounds(u[g][t], 1.0, 1.0);
                }
                if !gen.initially_on() && t + carried < gen.min_down as usize {
                    m.set_bounds(u[g][t], 0.0, 0.0);
                }
                // no shutdown before the initial output can ramp down to the shutdown limit
                if gen.initially_on() {
                    let p0 = (gen.initial_output - gen.p_min).max(0.0);
                    if p0 - t as f64 * gen.ramp_down > gen.shutdown_limit() - gen.p_min + 1e-9 {
                        m.set_bounds(w[g][t], 0.0, 0.0);
                    }
                }
                let mut terms = vec![(u[g][t], 1.0), (v[g][t], -1.0), (w[g][t], 1.0)];
                let rhs = if t == 0 {
                    u0
                } else {
                    terms.push((u[g][t - 1], -1.0));
                    0.0
                };
                m.add_constraint(format!("logic_{}_{}", gen.id, t + 1), &terms, Sense::Eq, rhs)?;
                let mut up: Expr = (t.saturating_sub(gen.min_up as usize - 1)..=t).map(|i| (v[g][i], 1.0)).collect();
                up.push((u[g][t], -1.0));
                m.add_constraint(format!("min_up_{}_{}", gen.id, t + 1), &up, Sense::Le, 0.0)?;
                let mut down: Expr =
                    (t.saturating_sub(gen.min_down as usize - 1)..=t).map(|i| (w[g][i], 1.0)).collect();
                down.push((u[g][t], 1.0));
                m.add_constraint(format!("min_down_{}_{}", gen.id, t + 1), &down, Sense::Le, 1.0)?;
            }
            if let Some(Some(status)) = partial.map(|p| &p[g]) {
                let mut prev = gen.initially_on();
                for t in 0..horizon {
                    let on = status[t];
                    let x = |b: bool| b as u8 as f64;
                    m.set_bounds(u[g][t], x(on), x(on));
                    m.set_bounds(v[g][t], x(on && !prev), x(on && !prev));
                    m.set_bounds(w[g][t], x(!on && prev), x(!on && prev));
                    prev = on;
                }
            }
        }
    }

    Ok((u, v, w))
}

/// Startup, no-load and minimum-output fuel cost on the commitment variables.
pub(crate) fn add_first_stage_cost(m: &mut Model, system: &PowerSystem, u: &[Vec<VarId>], v: &[Vec<VarId>]) {
    for (g, gen) in system.generators.iter().enumerate() {
        for t in 0..u[g].len() {
            m.add_cost(v[g][t], gen.startup_cost);
            m.add_cost(u[g][t], gen.no_load_cost + gen.base_marginal_cost() * gen.p_min);
        }
    }
}

/// Builds the MILP for an arbitrary block layout.
pub fn build(system: &PowerSystem, ptdf: Option<&PtdfMatrix>, spec: UcSpec) -> Result<UcProblem> {
    let horizon = spec.horizon;
    if system.horizon() < horizon {
        return Err(Error::HorizonMismatch { entity: "load".into(), expected: horizon, found: system.horizon() });
    }
    if spec.blocks.is_empty() {
        return Err(Error::invalid("UC spec", "at least one dispatch block is required"));
    }
    for b in &spec.blocks {
        check_wind(system, &b.wind, horizon, &format!("wind of block {}", b.label))?;
        if b.requirements.len() != horizon {
            return Err(Error::HorizonMismatch {
                entity: format!("reserve requirements of block {}", b.label),
                expected: horizon,
                found: b.requirements.len(),
            });
        }
    }
    if spec.network != NetworkMode::Ignore && ptdf.is_none() {
        return Err(Error::invalid("UC spec", "network constraints need a PTDF matrix"));
    }
    let ng = system.generators.len();
    let nb = system.buses.len();
    let pen = spec.penalties;
    let mut m = Model::new();

    let (u, v, w) = add_commitment(&mut m, system, horizon, &spec.commitment)?;
    if spec.first_stage_cost {
        add_first_stage_cost(&mut m, system, &u, &v);
    }

    // dispatch blocks
    let mut blocks = Vec::new();
    let mut injections = Vec::new();
    for (bi, bs) in spec.blocks.iter().enumerate() {
        let tag = |name: &str, id: &str, t: usize| format!("{name}_{id}_{}_b{bi}", t + 1);
        let need = |k: usize| bs.requirements.iter().any(|r| r[k] > 0.0);
        let has = [need(0), need(1), need(2), need(3)];
        let mut segments = Vec::new();
        let mut reserves: [Vec<Vec<Option<VarId>>>; 4] = Default::default();
        let mut offline = Vec::new();
        for gen in &system.generators {
            let mut seg_g = Vec::new();
            let mut res_g: [Vec<Option<VarId>>; 4] = Default::default();
            let mut off_g = Vec::new();
            for t in 0..horizon {
                let segs: Vec<VarId> = gen
                    .fuel_curve
                    .iter()
                    .enumerate()
                    .map(|(k, blk)| {
                        let x = m.continuous(format!("seg{k}_{}_{}_b{bi}", gen.id, t + 1), 0.0, blk.width);
                        m.add_cost(x, bs.fuel_weight * blk.marginal_cost);
                        x
                    })
                    .collect();
                seg_g.push(segs);
                for (k, p) in Product::ALL.iter().enumerate() {
                    res_g[k].push(has[k].then(|| m.continuous(tag(p.name(), &gen.id, t), 0.0, f64::INFINITY)));
                }
                off_g.push((has[3] && gen.quick_start).then(|| {
                    m.continuous(tag("non_spin_off", &gen.id, t), 0.0, f64::INFINITY)
                }));
            }
            segments.push(seg_g);
            for k in 0..4 {
                reserves[k].push(std::mem::take(&mut res_g[k]));
            }
            offline.push(off_g);
        }
        let wind: Vec<Vec<VarId>> = system
            .wind_farms
            .iter()
            .enumerate()
            .map(|(f, farm)| {
                (0..horizon)
                    .map(|t| {
                        let x = m.continuous(tag("wind", &farm.id, t), 0.0, bs.wind[f][t]);
                        // spill cost c * (available - used)
                        if pen.wind_spill != 0.0 {
                            m.add_cost(x, -bs.penalty_weight * pen.wind_spill);
                            m.add_offset(bs.penalty_weight * pen.wind_spill * bs.wind[f][t]);
                        }
                        x
                    })
                    .collect()
            })
            .collect();
        let loads: Vec<Vec<f64>> = (0..horizon).map(|t| system.load.at_hour(t, nb)).collect();
        let mut has_source = vec![false; nb];
        for gen in &system.generators {
            has_source[gen.bus_idx] = true;
        }
        for farm in &system.wind_farms {
            has_source[farm.bus_idx] = true;
        }
        let shed: Vec<Vec<Option<VarId>>> = (0..nb)
            .map(|b| {
                (0..horizon)
                    .map(|t| {
                        (loads[t][b] > 0.0).then(|| {
                            let x = m.continuous(tag("shed", &system.buses[b].id, t), 0.0, loads[t][b]);
                            m.add_cost(x, bs.penalty_weight * pen.load_shed);
                            x
                        })
                    })
                    .collect()
            })
            .collect();
        let over: Vec<Vec<Option<VarId>>> = (0..nb)
            .map(|b| {
                (0..horizon)
                    .map(|t| {
                        has_source[b].then(|| {
                            let x = m.continuous(tag("overgen", &system.buses[b].id, t), 0.0, f64::INFINITY);
                            m.add_cost(x, bs.penalty_weight * pen.over_generation);
                            x
                        })
                    })
                    .collect()
            })
            .collect();
        let shortfall: Vec<[Option<VarId>; 4]> = (0..horizon)
            .map(|t| {
                let mut s = [None; 4];
                for (k, p) in Product::ALL.iter().enumerate() {
                    if bs.requirements[t][k] > 0.0 {
                        let x = m.continuous(format!("short_{}_{}_b{bi}", p.name(), t + 1), 0.0, bs.requirements[t][k]);
                        m.add_cost(x, bs.penalty_weight * pen.reserve_shortfall);
                        s[k] = Some(x);
                    }
                }
                s
            })
            .collect();

        // unit limits
        for (g, gen) in system.generators.iter().enumerate() {
            let head = gen.p_max - gen.p_min;
            let su = gen.startup_limit();
            let sd = gen.shutdown_limit();
            for t in 0..horizon {
                let mut up_terms: Expr = segments[g][t].iter().map(|&x| (x, 1.0)).collect();
                for k in [0, 2, 3] {
                    if let Some(x) = reserves[k][g][t] {
                        up_terms.push((x, 1.0));
                    }
                }
                let next_w = (t + 1 < horizon).then(|| w[g][t + 1]);
                if gen.min_up > 1 {
                    let mut terms = up_terms.clone();
                    terms.push((u[g][t], -head));
                    terms.push((v[g][t], gen.p_max - su));
                    if let Some(nw) = next_w {
                        terms.push((nw, gen.p_max - sd));
                    }
                    m.add_constraint(tag("cap", &gen.id, t), &terms, Sense::Le, 0.0)?;
                } else {
                    let mut a = up_terms.clone();
                    a.push((u[g][t], -head));
                    a.push((v[g][t], gen.p_max - su));
                    m.add_constraint(tag("cap_su", &gen.id, t), &a, Sense::Le, 0.0)?;
                    if let Some(nw) = next_w {
                        let mut b = up_terms.clone();
                        b.push((u[g][t], -head));
                        b.push((nw, gen.p_max - sd));
                        m.add_constraint(tag("cap_sd", &gen.id, t), &b, Sense::Le, 0.0)?;
                    }
                }
                if let Some(ru) = reserves[0][g][t] {
                    m.add_constraint(tag("reg_up_cap", &gen.id, t), &[(ru, 1.0), (u[g][t], -gen.ramp_up / 12.0)], Sense::Le, 0.0)?;
                }
                let mut fast: Expr = [0, 2, 3].iter().filter_map(|&k| reserves[k][g][t]).map(|x| (x, 1.0)).collect();
                if !fast.is_empty() {
                    fast.push((u[g][t], -gen.ramp_up / 6.0));
                    m.add_constraint(tag("ten_min_cap", &gen.id, t), &fast, Sense::Le, 0.0)?;
                }
                if let Some(rd) = reserves[1][g][t] {
                    m.add_constraint(tag("reg_down_cap", &gen.id, t), &[(rd, 1.0), (u[g][t], -gen.ramp_down / 12.0)], Sense::Le, 0.0)?;
                    let mut terms: Expr = segments[g][t].iter().map(|&x| (x, -1.0)).collect();
                    terms.push((rd, 1.0));
                    m.add_constraint(tag("reg_down_room", &gen.id, t), &terms, Sense::Le, 0.0)?;
                }
                if let Some(ns) = offline[g][t] {
                    let cap = su;
                    m.add_constraint(tag("offline_cap", &gen.id, t), &[(ns, 1.0), (u[g][t], cap)], Sense::Le, cap)?;
                }
            }
        }

        // balance and reserve requirements
        let mut inj_block = Vec::new();
        for t in 0..horizon {
            let mut bus_inj: Vec<(Expr, f64)> = (0..nb).map(|b| (Vec::new(), -loads[t][b])).collect();
            for (g, gen) in system.generators.iter().enumerate() {
                let e = &mut bus_inj[gen.bus_idx].0;
                e.push((u[g][t], gen.p_min));
                e.extend(segments[g][t].iter().map(|&x| (x, 1.0)));
            }
            for (f, farm) in system.wind_farms.iter().enumerate() {
                bus_inj[farm.bus_idx].0.push((wind[f][t], 1.0));
            }
            for b in 0..nb {
                if let Some(x) = shed[b][t] {
                    bus_inj[b].0.push((x, 1.0));
                }
                if let Some(x) = over[b][t] {
                    bus_inj[b].0.push((x, -1.0));
                }
            }
            let terms: Expr = bus_inj.iter().flat_map(|(e, _)| e.iter().copied()).collect();
            let demand: f64 = loads[t].iter().sum();
            m.add_constraint(format!("balance_{}_b{bi}", t + 1), &terms, Sense::Eq, demand)?;
            for (k, p) in Product::ALL.iter().enumerate() {
                let req = bs.requirements[t][k];
                if req <= 0.0 {
                    continue;
                }
                let mut terms: Expr = (0..ng).filter_map(|g| reserves[k][g][t]).map(|x| (x, 1.0)).collect();
                if k == 3 {
                    terms.extend((0..ng).filter_map(|g| offline[g][t]).map(|x| (x, 1.0)));
                }
                if let Some(s) = shortfall[t][k] {
                    terms.push((s, 1.0));
                }
                m.add_constraint(format!("req_{}_{}_b{bi}", p.name(), t + 1), &terms, Sense::Ge, req)?;
            }
            inj_block.push(bus_inj);
        }
        injections.push(inj_block);
        blocks.push(BlockVars { segments, reserves, offline_non_spin: offline, wind, shed, over_generation: over, shortfall });
    }

    // ramps, including transitions between blocks
    let mut links: Vec<(usize, usize)> = (0..spec.blocks.len()).map(|b| (b, b)).collect();
    for &l in &spec.links {
        if l.0 >= spec.blocks.len() || l.1 >= spec.blocks.len() {
            return Err(Error::invalid("UC spec", format!("ramp link {l:?} names an unknown block")));
        }
        if !links.contains(&l) {
            links.push(l);
        }
    }
    for (g, gen) in system.generators.iter().enumerate() {
        let head = gen.p_max - gen.p_min;
        let su_room = gen.startup_limit() - gen.p_min;
        let sd_room = gen.shutdown_limit() - gen.p_min;
        let ramp_up_binds = gen.ramp_up < head || su_room < head;
        let ramp_down_binds = gen.ramp_down < head || sd_room < head;
        let p0 = if gen.initially_on() { (gen.initial_output - gen.p_min).max(0.0) } else { 0.0 };
        let phat = |b: usize, t: usize| -> Expr { blocks[b].segments[g][t].iter().map(|&x| (x, 1.0)).collect() };
        let neg = |e: Expr| -> Expr { e.into_iter().map(|(x, a)| (x, -a)).collect() };
        for t in 0..horizon {
            let pairs: Vec<(Option<usize>, usize)> = if t == 0 {
                (0..spec.blocks.len()).map(|b| (None, b)).collect()
            } else {
                links.iter().map(|&(a, b)| (Some(a), b)).collect()
            };
            for (from, to) in pairs {
                let name = |kind: &str| match from {
                    Some(a) => format!("{kind}_{}_{}_b{a}_b{to}", gen.id, t + 1),
                    None => format!("{kind}_{}_{}_b{to}", gen.id, t + 1),
                };
                if ramp_up_binds {
                    let mut terms = phat(to, t);
                    let mut rhs = 0.0;
                    match from {
                        Some(a) => terms.extend(neg(phat(a, t - 1))),
                        None => rhs = p0,
                    }
                    terms.push((u[g][t], -gen.ramp_up));
                    terms.push((v[g][t], -(su_room - gen.ramp_up)));
                    m.add_constraint(name("ramp_up"), &terms, Sense::Le, rhs)?;
                }
                if ramp_down_binds {
                    let mut terms = neg(phat(to, t));
                    let mut rhs = 0.0;
                    match from {
                        Some(a) => terms.extend(phat(a, t - 1)),
                        None => rhs = -p0,
                    }
                    terms.push((u[g][t], -gen.ramp_down));
                    terms.push((w[g][t], -sd_room));
                    m.add_constraint(name("ramp_down"), &terms, Sense::Le, rhs)?;
                }
            }
        }
    }

    let mut problem = UcProblem {
        model: m,
        spec,
        u,
        v,
        w,
        blocks,
        enforced: BTreeSet::new(),
        injections,
        ptdf: ptdf.cloned(),
        limits: system.lines.iter().map(|l| l.flow_limit).collect(),
    };
    if problem.spec.network == NetworkMode::Full {
        let all = problem.line_universe();
        problem.add_line_limits(&all)?;
    }
    Ok(problem)
}

impl UcProblem {
    pub fn horizon(&self) -> usize {
        self.spec.horizon
    }

    pub fn ptdf(&self) -> Option<&PtdfMatrix> {
        self.ptdf.as_ref()
    }

    /// Every (line, hour, block) tuple.
    pub fn line_universe(&self) -> Vec<LineTuple> {
        let mut out = Vec::new();
        for block in 0..self.spec.blocks.len() {
            for hour in 0..self.horizon() {
                for line in 0..self.limits.len() {
                    out.push(LineTuple { line, hour, block });
                }
            }
        }
        out
    }

    /// Adds both flow-limit rows for each tuple not yet enforced.
    pub fn add_line_limits(&mut self, tuples: &[LineTuple]) -> Result<usize> {
        let ptdf = self.ptdf.as_ref().ok_or_else(|| Error::invalid("line limits", "problem has no PTDF matrix"))?;
        let mut added = 0;
        for &lt in tuples {
            if self.enforced.contains(&lt) {
                continue;
            }
            let row = &ptdf.rows[lt.line];
            let mut terms: Expr = Vec::new();
            let mut constant = 0.0;
            for (bus, (expr, c)) in self.injections[lt.block][lt.hour].iter().enumerate() {
                let f = row[bus];
                if f == 0.0 {
                    continue;
                }
                terms.extend(expr.iter().map(|&(x, a)| (x, a * f)));
                constant += f * c;
            }
            let lim = self.limits[lt.line];
            let name = format!("flow_l{}_{}_b{}", lt.line + 1, lt.hour + 1, lt.block);
            self.model.add_constraint(format!("{name}_max"), &terms, Sense::Le, lim - constant)?;
            self.model.add_constraint(format!("{name}_min"), &terms, Sense::Ge, -lim - constant)?;
            self.enforced.insert(lt);
            added += 1;
        }
        Ok(added)
    }

    /// Net nodal injections (MW) of block `b` in hour `t` under solution `x`.
    pub fn injections(&self, x: &[f64], b: usize, t: usize) -> Vec<f64> {
        self.injections[b][t].iter().map(|(e, c)| c + e.iter().map(|&(v, a)| a * x[v.0]).sum::<f64>()).collect()
    }

    pub fn limits(&self) -> &[f64] {
        &self.limits
    }

    /// Nodal injections `[block][t][bus]` under solution `x`.
    pub fn all_injections(&self, x: &[f64]) -> Vec<Vec<Vec<f64>>> {
        (0..self.spec.blocks.len())
            .map(|b| (0..self.horizon()).map(|t| self.injections(x, b, t)).collect())
            .collect()
    }

    /// Pins every commitment variable to the schedule through its bounds.
    pub fn pin_commitment(&mut self, schedule: &CommitmentSchedule) {
        for (v, x) in self.commitment_values(schedule) {
            self.model.set_bounds(v, x, x);
        }
    }

    /// `(variable, value)` for every u, v and w handle.
    pub fn commitment_values(&self, schedule: &CommitmentSchedule) -> Vec<(VarId, f64)> {
        let x = |b: bool| b as u8 as f64;
        let mut out = Vec::new();
        for g in 0..self.u.len() {
            for t in 0..self.horizon() {
                out.push((self.u[g][t], x(schedule.on[g][t])));
                out.push((self.v[g][t], x(schedule.startup[g][t])));
                out.push((self.w[g][t], x(schedule.shutdown[g][t])));
            }
        }
        out
    }

    /// Assignment of every free commitment binary to the schedule's values.
    pub fn binary_assignment(&self, schedule: &CommitmentSchedule) -> Vec<(VarId, f64)> {
        let mut out = self.commitment_values(schedule);
        out.retain(|(v, _)| self.model.variable(*v).kind == VarKind::Binary);
        out
    }
}

/// Inputs shared by the strategy-specific builders.
#[derive(Debug, Clone, Copy)]
pub struct BuildContext<'a> {
    pub system: &'a PowerSystem,
    pub ptdf: Option<&'a PtdfMatrix>,
    pub network: NetworkMode,
    pub penalties: Penalties,
}

/// Deterministic UC on a central wind forecast with the policy's reserves.
pub fn build_duc(
    ctx: &BuildContext,
    wind: &[Vec<f64>],
    policy: &ReservePolicy,
    horizon: usize,
    commitment: CommitmentMode,
) -> Result<UcProblem> {
    policy.validate(horizon)?;
    check_wind(ctx.system, wind, horizon, "central forecast")?;
    let block = BlockSpec {
        label: "central".into(),
        wind: wind.to_vec(),
        probability: 1.0,
        fuel_weight: 1.0,
        penalty_weight: 1.0,
        requirements: policy.requirements(horizon),
    };
    build(
        ctx.system,
        ctx.ptdf,
        UcSpec {
            horizon,
            blocks: vec![block],
            links: Vec::new(),
            network: ctx.network,
            commitment,
            penalties: ctx.penalties,
            first_stage_cost: true,
        },
    )
}

/// Interval UC: central trajectory plus a lower-bound wind trajectory that
/// shares the commitment, with ramp transitions between the two.
pub fn build_iuc(
    ctx: &BuildContext,
    central: &[Vec<f64>],
    lower: &[Vec<f64>],
    policy: &ReservePolicy,
    horizon: usize,
    commitment: CommitmentMode,
) -> Result<UcProblem> {
    policy.validate(horizon)?;
    check_wind(ctx.system, central, horizon, "central forecast")?;
    check_wind(ctx.system, lower, horizon, "lower-bound forecast")?;
    for (f, (c, l)) in central.iter().zip(lower).enumerate() {
        if let Some(t) = (0..horizon).find(|&t| l[t] > c[t] + 1e-9) {
            return Err(Error::invalid(
                format!("wind bounds of farm {}", ctx.system.wind_farms[f].id),
                format!("lower bound exceeds central forecast at hour {}", t + 1),
            ));
        }
    }
    let blocks = vec![
        BlockSpec {
            label: "central".into(),
            wind: central.to_vec(),
            probability: 1.0,
            fuel_weight: 1.0,
            penalty_weight: 1.0,
            requirements: policy.requirements(horizon),
        },
        BlockSpec {
            label: "lower".into(),
            wind: lower.to_vec(),
            probability: 0.0,
            fuel_weight: 0.0,
            penalty_weight: 1.0,
            requirements: vec![[0.0; 4]; horizon],
        },
    ];
    build(
        ctx.system,
        ctx.ptdf,
        UcSpec {
            horizon,
            blocks,
            links: vec![(0, 1), (1, 0)],
            network: ctx.network,
            commitment,
            penalties: ctx.penalties,
            first_stage_cost: true,
        },
    )
}

/// Per-scenario requirement: contingency plus `rho` times scenario wind,
/// split by the policy fractions.
pub fn suc_requirements(policy: &ReservePolicy, wind: &[Vec<f64>], rho: f64, horizon: usize) -> Vec<[f64; 4]> {
    (0..horizon)
        .map(|t| {
            let total_wind: f64 = wind.iter().map(|s| s[t]).sum();
            policy.split.apply(policy.total(t) + rho * total_wind)
        })
        .collect()
}

/// Two-stage stochastic UC in extensive form.
pub fn build_suc(
    ctx: &BuildContext,
    scenarios: &ScenarioSet,
    policy: &ReservePolicy,
    rho: f64,
    horizon: usize,
    commitment: CommitmentMode,
) -> Result<UcProblem> {
    build(ctx.system, ctx.ptdf, suc_spec(ctx, scenarios, policy, rho, horizon, commitment)?)
}

pub fn suc_spec(
    ctx: &BuildContext,
    scenarios: &ScenarioSet,
    policy: &ReservePolicy,
    rho: f64,
    horizon: usize,
    commitment: CommitmentMode,
) -> Result<UcSpec> {
    policy.validate(horizon)?;
    if scenarios.is_empty() {
        return Err(Error::invalid("scenario set", "empty"));
    }
    if !(rho >= 0.0) {
        return Err(Error::invalid("wind reserve fraction", "must be >= 0"));
    }
    let total: f64 = scenarios.probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-9 || scenarios.probabilities.iter().any(|p| *p < 0.0) {
        return Err(Error::invalid("scenario set", format!("probabilities sum to {total}")));
    }
    let blocks = scenarios
        .paths
        .iter()
        .zip(&scenarios.probabilities)
        .enumerate()
        .map(|(s, (path, &p))| {
            check_wind(ctx.system, path, horizon, &format!("scenario {}", s + 1))?;
            Ok(BlockSpec {
                label: format!("s{}", s + 1),
                wind: path.clone(),
                probability: p,
                fuel_weight: p,
                penalty_weight: p,
                requirements: suc_requirements(policy, path, rho, horizon),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(UcSpec {
        horizon,
        blocks,
        links: Vec::new(),
        network: ctx.network,
        commitment,
        penalties: ctx.penalties,
        first_stage_cost: true,
    })
}

/// Economic dispatch with every commitment fixed; an LP.
pub fn build_ed(
    ctx: &BuildContext,
    commitment: &CommitmentSchedule,
    wind: &[Vec<f64>],
    policy: &ReservePolicy,
    horizon: usize,
) -> Result<UcProblem> {
    commitment.check(ctx.system).map_err(|e| Error::invalid("commitment", e))?;
    build_duc(ctx, wind, policy, horizon, CommitmentMode::Fixed(commitment.clone()))
}
