use std::path::PathBuf;

use uc_core::forecast::ProbabilisticForecast;
use uc_core::market::{
    run_day, run_horizon, write_outputs, DayInputs, MarketConfig, Prepared, RunConfig, SimulationLedger, SystemState,
    LEDGER_FILE, STATS_FILE,
};
use uc_core::system::PowerSystem;
use uc_core::uc::{CommitmentSchedule, Strategy};

fn run_config(name: &str, strategies: &[&str], days: Option<usize>) -> RunConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).join("run.json");
    let mut cfg = RunConfig::load(&path).unwrap();
    cfg.strategies = strategies.iter().map(|s| s.to_string()).collect();
    cfg.days = days;
    cfg
}

fn strategy(s: &str) -> Strategy {
    s.parse().unwrap()
}

/// Oracle: startup + no-load + piecewise fuel over the executed dispatch.
fn executed_cost(sys: &PowerSystem, schedule: &CommitmentSchedule, output: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for (g, gen) in sys.generators.iter().enumerate() {
        let mut prev = gen.initial_status > 0;
        for (t, &on) in schedule.on[g].iter().enumerate() {
            if on && !prev {
                total += gen.startup_cost;
            }
            prev = on;
            if !on {
                assert!(output[g][t].abs() < 1e-6);
                continue;
            }
            let p = output[g][t];
            assert!(p >= gen.p_min - 1e-6 && p <= gen.p_max + 1e-6);
            total += gen.no_load_cost + gen.fuel_curve[0].marginal_cost * gen.p_min;
            let mut above = p - gen.p_min;
            for b in &gen.fuel_curve {
                let x = above.clamp(0.0, b.width);
                total += x * b.marginal_cost;
                above -= x;
            }
        }
    }
    total
}

#[test]
fn rac_keeps_slow_units_at_day_ahead_status() {
    let cfg = run_config("six_bus", &["DUC-point"], None);
    let Prepared { system, ptdf, days } = cfg.prepare().unwrap();
    let state = SystemState::initial(&system);
    let (r, _) = run_day(&system, Some(&ptdf), &state, &days[0], strategy("DUC-point"), &cfg.market()).unwrap();
    for (g, gen) in system.generators.iter().enumerate() {
        if !gen.quick_start {
            assert_eq!(r.da.commitment.on[g], r.rac.commitment.on[g], "{}", gen.id);
        }
    }
    let fast: usize = system
        .generators
        .iter()
        .enumerate()
        .filter(|(_, g)| g.quick_start)
        .map(|(g, _)| r.rac.commitment.on[g].iter().filter(|u| **u).count())
        .sum();
    let total: usize = r.rac.commitment.on.iter().flatten().filter(|u| **u).count();
    assert_eq!((r.fast_uh, r.slow_uh), (fast, total - fast));
}

#[test]
fn real_time_cost_matches_executed_schedule() {
    let cfg = run_config("six_bus", &["DUC-point"], None);
    let Prepared { system, ptdf, days } = cfg.prepare().unwrap();
    let state = SystemState::initial(&system);
    let (r, _) = run_day(&system, Some(&ptdf), &state, &days[0], strategy("DUC-point"), &cfg.market()).unwrap();
    let c = r.rt.cost;
    assert!((c.startup + c.no_load + c.fuel + c.penalty - r.rt.objective).abs() < 1e-4);
    let day_sys = state.apply(&system, days[0].load.clone());
    let energy = executed_cost(&day_sys, &r.rac.commitment, &r.output);
    assert!((energy + c.penalty - r.rt.objective).abs() < 1e-4 * r.rt.objective.max(1.0));
    if r.load_shed_mwh > 0.0 {
        assert!(c.penalty >= 3500.0 * r.load_shed_mwh - 1e-6);
    }
}

#[test]
fn perfect_forecast_costs_agree_across_stages() {
    let cfg = run_config("six_bus", &["DUC-perfect"], None);
    let Prepared { system, ptdf, days } = cfg.prepare().unwrap();
    let state = SystemState::initial(&system);
    let (r, _) = run_day(&system, Some(&ptdf), &state, &days[0], strategy("DUC-perfect"), &cfg.market()).unwrap();
    let tol = 2.0 * cfg.gap * r.da.objective;
    assert!((r.da.objective - r.rt.objective).abs() <= tol, "{} vs {}", r.da.objective, r.rt.objective);
    assert!((r.da.objective - r.rac.objective).abs() <= tol);
    assert_eq!(r.load_shed_mwh, 0.0);
}

#[test]
fn without_wind_every_strategy_costs_the_same() {
    let cfg = run_config("six_bus", &["DUC-point"], None);
    let Prepared { system, ptdf, days } = cfg.prepare().unwrap();
    let zero = vec![vec![0.0; 24]; system.wind_farms.len()];
    let pf = ProbabilisticForecast::degenerate(&system.wind_farms, &zero);
    let day = DayInputs {
        day: 1,
        da_point: zero.clone(),
        da_forecast: pf.clone(),
        rac_point: zero.clone(),
        rac_forecast: pf,
        realized: zero,
        load: days[0].load.clone(),
    };
    let market = cfg.market();
    let names = ["DUC-perfect", "DUC-point", "IUC-10", "SUC-E-0", "SUC-BD-0"];
    let costs: Vec<f64> = names
        .iter()
        .map(|s| {
            let state = SystemState::initial(&system);
            run_day(&system, Some(&ptdf), &state, &day, strategy(s), &market).unwrap().0.rt.objective
        })
        .collect();
    for (s, c) in names.iter().zip(&costs) {
        assert!((c - costs[0]).abs() <= 2.0 * cfg.gap * costs[0], "{s}: {c} vs {}", costs[0]);
    }
}

#[test]
fn commitment_respects_minimum_times_across_days() {
    let cfg = run_config("scarcity_week", &["DUC-point"], Some(3));
    let Prepared { system, ptdf, days } = cfg.prepare().unwrap();
    let results = run_horizon(&system, Some(&ptdf), &days, &[strategy("DUC-point")], &cfg.market()).unwrap();
    let mut history: Vec<Vec<bool>> = system.generators.iter().map(|_| Vec::new()).collect();
    for r in &results[0] {
        for (g, row) in r.rac.commitment.on.iter().enumerate() {
            history[g].extend(row);
        }
    }
    for (g, gen) in system.generators.iter().enumerate() {
        // prefix the initial condition, then scan every switch
        let init = gen.initial_status;
        let mut on: Vec<bool> = vec![init > 0; init.unsigned_abs() as usize];
        let offset = on.len();
        on.extend(&history[g]);
        for t in offset..on.len() {
            if on[t] != on[t - 1] {
                let need = if on[t] { gen.min_up } else { gen.min_down } as usize;
                let end = (t + need).min(on.len());
                assert!(on[t..end].iter().all(|u| *u == on[t]), "{} at hour {}", gen.id, t - offset);
            }
        }
    }
}

#[test]
fn one_day_one_strategy_writes_one_ledger_row() {
    let cfg = run_config("six_bus", &["DUC-point"], None);
    let Prepared { system, ptdf, days } = cfg.prepare().unwrap();
    let results = run_horizon(&system, Some(&ptdf), &days, &cfg.parse_strategies().unwrap(), &cfg.market()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let ledger = write_outputs(dir.path(), &results, false).unwrap();
    assert_eq!(ledger.rows.len(), 1);
    let text = std::fs::read_to_string(dir.path().join(LEDGER_FILE)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3, "{text}");
    assert!(lines[1].starts_with("1,DUC-point,"));
    assert!(lines[2].starts_with("avg,DUC-point,"));
    let back = SimulationLedger::read(&dir.path().join(LEDGER_FILE), Some(&dir.path().join(STATS_FILE))).unwrap();
    assert_eq!(back.rows.len(), 1);
    let (a, b) = (&back.rows[0], &ledger.rows[0]);
    assert_eq!((a.day, &a.strategy), (b.day, &b.strategy));
    assert!((a.rt_cost - b.rt_cost).abs() < 1e-9 * b.rt_cost.abs().max(1.0));
    assert_eq!(back.stats.len(), 3);
}

#[test]
fn repeated_runs_write_identical_ledgers() {
    let cfg = run_config("six_bus", &["DUC-point", "SUC-E-0"], None);
    let Prepared { system, ptdf, days } = cfg.prepare().unwrap();
    let strategies = cfg.parse_strategies().unwrap();
    let bytes = || {
        let results = run_horizon(&system, Some(&ptdf), &days, &strategies, &cfg.market()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_outputs(dir.path(), &results, false).unwrap();
        std::fs::read(dir.path().join(LEDGER_FILE)).unwrap()
    };
    assert_eq!(bytes(), bytes());
}

#[test]
fn empty_inputs_are_rejected() {
    let cfg = run_config("six_bus", &["DUC-point"], None);
    let Prepared { system, ptdf, days } = cfg.prepare().unwrap();
    let market = MarketConfig::default();
    assert!(run_horizon(&system, Some(&ptdf), &[], &[strategy("DUC-point")], &market).is_err());
    assert!(run_horizon(&system, Some(&ptdf), &days, &[], &market).is_err());
}
