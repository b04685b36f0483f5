//! Acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::time::Instant;

use mtbound::bounds::{gate, sft_linear, Gate, Locus};
use mtbound::feasible::{check_tour, feasible_from_lower_bound, find_feasible, DEFAULT_SAMPLES};
use mtbound::graph::{build, partition};
use mtbound::gtsp::{solve_bruteforce, solve_exact, Effort};
use mtbound::kinematics::{efat_trajectory, lfdt_trajectory};
use mtbound::model::generate;
use mtbound::{ClusteredGraph, DiscretizationLevel, EdgeCost, GeneratorConfig, Instance, InstanceKind, SamplingParams, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{grid_sft, random_polyline};

const V_MAX: f64 = 4.0;

struct Outcome {
    pass: bool,
    flag: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome { pass, flag: false, detail }
    }
}

fn level_delta(level: u8) -> f64 {
    DiscretizationLevel::from_level(level).unwrap().delta()
}

fn instances(kind: InstanceKind, n: usize, seeds: std::ops::Range<u64>) -> Vec<Instance> {
    seeds.map(|s| generate(&GeneratorConfig::standard(kind, n, s)).expect("instance generation")).collect()
}

fn lower_bound(inst: &Instance, level: u8, variant: Variant) -> (ClusteredGraph, f64) {
    let g = build(inst, level_delta(level), variant, SamplingParams::default()).unwrap();
    let cost = solve_exact(&g).map_or(f64::INFINITY, |s| s.cost);
    (g, cost)
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut worst, mut counted, mut bounded) = (0.0f64, 0, 0);
    while counted < 200 {
        let ti = random_polyline(&mut rng, 1..=3, 40.0);
        let tj = random_polyline(&mut rng, 1..=3, 40.0);
        let span = ti.t_end().min(tj.t_end());
        let a = rng.gen_range(0.0..span * 0.6);
        let b = (a + rng.gen_range(0.2..5.0)).min(ti.t_end());
        let c = (a + rng.gen_range(-2.0..12.0)).clamp(0.0, tj.t_end() - 0.2);
        let d = (c + rng.gen_range(0.2..5.0)).min(tj.t_end());
        let (li, lj) = (Locus::new(&ti, a, b), Locus::new(&tj, c, d));
        let kind = gate(&li, &lj, V_MAX);
        // keep three needs-bounding pairs for every gated one
        if !matches!(kind, Gate::NeedsBounding) && counted % 4 != 0 {
            continue;
        }
        bounded += matches!(kind, Gate::NeedsBounding) as usize;
        let got = sft_linear(&li, &lj, V_MAX).value();
        let want = grid_sft(&ti, (a, b), &tj, (c, d), V_MAX, 100_000);
        let diff = if got.is_infinite() && want.is_infinite() { 0.0 } else { (got - want).abs() };
        worst = worst.max(diff);
        counted += 1;
    }
    let secs = started.elapsed().as_secs_f64();
    Outcome::new(
        worst <= 1e-4 && secs < 60.0,
        format!("200 pairs ({bounded} needing bounding), max |linear - grid| = {worst:.2e} s, {secs:.1} s"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    let mut monotone_fail = 0;
    let mut strict_checked = 0;
    for _ in 0..500 {
        let ti = random_polyline(&mut rng, 1..=3, 40.0);
        let tj = random_polyline(&mut rng, 3..=3, 40.0);
        let tj_end = tj.t_end();
        let horizon = ti.t_end().min(tj_end * 0.5);
        let t = rng.gen_range(0.0..horizon);
        let pi = ti.position_clamped(t);
        let e = efat_trajectory(pi, t, &tj, (0.0, tj_end), V_MAX).expect("reachable");
        let l = lfdt_trajectory(&ti, (0.0, ti.t_end()), tj.position_clamped(e), e, V_MAX).expect("departure exists");
        worst = worst.max((l - t).abs());

        let t1 = rng.gen_range(0.0..horizon);
        let t2 = (t1 + rng.gen_range(1e-3..5.0)).min(horizon + 5.0).min(ti.t_end());
        if t2 <= t1 {
            continue;
        }
        let e1 = efat_trajectory(ti.position_clamped(t1), t1, &tj, (0.0, tj_end), V_MAX);
        let e2 = efat_trajectory(ti.position_clamped(t2), t2, &tj, (0.0, tj_end), V_MAX);
        if let (Some(e1), Some(e2)) = (e1, e2) {
            if ti.position_clamped(t1).dist(tj.position_clamped(t1)) > 1e-6 {
                strict_checked += 1;
                monotone_fail += (e1 >= e2) as usize;
            } else {
                monotone_fail += (e1 > e2) as usize;
            }
        }
    }
    Outcome::new(
        worst <= 1e-6 && monotone_fail == 0 && strict_checked >= 400,
        format!("max |lfdt(efat(t)) - t| = {worst:.2e}, {strict_checked} strict pairs, {monotone_fail} violations"),
    )
}

/// Lower bounds for every (level, variant) plus per-edge dominance counts.
struct Sweep {
    lb: Vec<[[f64; 4]; 4]>,
    feasible: Vec<f64>,
    dominance_violations: usize,
    dominance_worst: f64,
    seconds: f64,
}

fn sweep(insts: &[Instance]) -> Sweep {
    let started = Instant::now();
    let mut out = Sweep { lb: Vec::new(), feasible: Vec::new(), dominance_violations: 0, dominance_worst: 0.0, seconds: 0.0 };
    for inst in insts {
        let ub = find_feasible(inst, DEFAULT_SAMPLES, Effort::Thorough).map_or(f64::INFINITY, |t| t.completion_time);
        out.feasible.push(ub);
        let mut table = [[0.0; 4]; 4];
        for level in 1..=4u8 {
            let built: Vec<(ClusteredGraph, f64)> = Variant::ALL.iter().map(|&v| lower_bound(inst, level, v)).collect();
            let linear = &built[3].0;
            for (g, _) in &built[..3] {
                for (u, v, c) in g.edges() {
                    let excess = c.value() - linear.value(u, v);
                    let bad = match (c, linear.cost(u, v)) {
                        (EdgeCost::Infeasible, EdgeCost::Infeasible) => false,
                        (EdgeCost::Infeasible, _) => true,
                        _ => excess > 1e-9,
                    };
                    if bad {
                        out.dominance_violations += 1;
                        out.dominance_worst = out.dominance_worst.max(excess);
                    }
                }
            }
            for (k, (_, cost)) in built.iter().enumerate() {
                table[level as usize - 1][k] = *cost;
            }
        }
        out.lb.push(table);
    }
    out.seconds = started.elapsed().as_secs_f64();
    out
}

fn criterion_3(s: &Sweep) -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut missing_ub = 0;
    for (table, &ub) in s.lb.iter().zip(&s.feasible) {
        if !ub.is_finite() {
            missing_ub += 1;
            continue;
        }
        for row in table {
            for &lb in row {
                worst = worst.max(lb - ub);
            }
        }
    }
    Outcome::new(
        worst <= 1e-6 && missing_ub == 0 && s.seconds < 600.0,
        format!(
            "{} instances x 4 levels x 4 variants, max (LB - UB) = {worst:.3e}, {missing_ub} without a tour, {:.1} s",
            s.lb.len(),
            s.seconds
        ),
    )
}

fn criterion_4(s: &Sweep) -> Outcome {
    let mut instance_fail = 0;
    for table in &s.lb {
        for row in table {
            instance_fail += row[..3].iter().filter(|&&lb| lb > row[3] + 1e-9).count();
        }
    }
    Outcome::new(
        s.dominance_violations == 0 && instance_fail == 0,
        format!(
            "{} per-edge violations (worst excess {:.2e}), {instance_fail} per-instance violations",
            s.dominance_violations, s.dominance_worst
        ),
    )
}

fn criterion_5(s: &Sweep) -> Outcome {
    let mut fails = 0;
    let mut worst = f64::NEG_INFINITY;
    for table in &s.lb {
        for variant in [0usize, 1, 3] {
            for level in 0..3 {
                let drop = table[level][variant] - table[level + 1][variant];
                worst = worst.max(drop);
                fails += (drop > 1e-9) as usize;
            }
        }
    }
    Outcome::new(fails == 0, format!("max LB(k) - LB(k+1) = {worst:.3e} over lite/geometric/linear, {fails} violations"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let mut mismatches = 0;
    for round in 0..100 {
        let n = rng.gen_range(1..=6);
        let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
        let integral = round % 3 == 0;
        let total: usize = sizes.iter().sum::<usize>() + 2;
        let table: Vec<EdgeCost> = (0..total * total)
            .map(|_| {
                if rng.gen_bool(0.15) {
                    EdgeCost::Infeasible
                } else if integral {
                    EdgeCost::Finite(rng.gen_range(0..4) as f64)
                } else {
                    EdgeCost::Finite(rng.gen_range(0.0..10.0))
                }
            })
            .collect();
        let g = ClusteredGraph::from_cost_fn(&sizes, |u, v| table[u * total + v]);
        match (solve_exact(&g), solve_bruteforce(&g)) {
            (Ok(a), Ok(b)) => mismatches += (a.cost != b.cost || a.node_sequence != b.node_sequence) as usize,
            (Err(_), Err(_)) => {}
            _ => mismatches += 1,
        }
    }
    Outcome::new(mismatches == 0, format!("100 graphs, {mismatches} mismatches in cost or node sequence"))
}

fn criterion_7() -> Outcome {
    let mut bad = Vec::new();
    for kind in [InstanceKind::Simple, InstanceKind::Complex] {
        let inst = generate(&GeneratorConfig::standard(kind, 3, 5)).unwrap();
        for (level, (count, delta)) in [(4usize, 5.0), (8, 2.5), (16, 1.25), (32, 0.625)].into_iter().enumerate() {
            let d = level_delta(level as u8 + 1);
            if d != delta {
                bad.push(format!("level {} delta {d}", level + 1));
            }
            for target in partition(&inst, d) {
                if target.len() != count {
                    bad.push(format!("{kind} level {} has {} intervals", level + 1, target.len()));
                }
            }
        }
    }
    Outcome::new(bad.is_empty(), if bad.is_empty() { "4/8/16/32 intervals at 5/2.5/1.25/0.625 s".into() } else { bad.join("; ") })
}

struct Family {
    n: usize,
    /// per variant: deviations and feasible-from-LB outcomes
    deviation: [Vec<f64>; 4],
    success: [usize; 4],
    sandwich_fail: usize,
    attempts: usize,
}

fn family(n: usize, seeds: std::ops::Range<u64>) -> Family {
    let mut f = Family { n, deviation: Default::default(), success: [0; 4], sandwich_fail: 0, attempts: 0 };
    for inst in instances(InstanceKind::Simple, n, seeds) {
        let ub = find_feasible(&inst, DEFAULT_SAMPLES, Effort::Thorough).map_or(f64::INFINITY, |t| t.completion_time);
        f.attempts += 1;
        for (k, &variant) in Variant::ALL.iter().enumerate() {
            let g = build(&inst, level_delta(4), variant, SamplingParams::default()).unwrap();
            let Ok(lb) = solve_exact(&g) else { continue };
            if ub.is_finite() {
                f.deviation[k].push((ub - lb.cost) / ub * 100.0);
            }
            if let Ok(tour) = feasible_from_lower_bound(&inst, &g, &lb) {
                f.success[k] += 1;
                if !(check_tour(&inst, &tour) && lb.cost <= tour.completion_time + 1e-6) {
                    f.sandwich_fail += 1;
                }
            }
        }
    }
    f
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn criterion_8(families: &[Family]) -> Outcome {
    let mut pass = true;
    let mut flag = false;
    let mut parts = Vec::new();
    for f in families {
        let m: Vec<f64> = f.deviation.iter().map(|d| mean(d)).collect();
        let (lite, geo, samp, lin) = (m[0], m[1], m[2], m[3]);
        let ordered = lin <= geo + 1e-9 && lin <= samp + 1e-9 && geo <= lite + 1e-9 && samp <= lite + 1e-9;
        pass &= ordered && !f.deviation[3].is_empty();
        if f.n == 5 {
            pass &= lin < lite;
            flag |= lin > 15.0;
        }
        parts.push(format!(
            "n={} ({}/{} with tours): lite {lite:.2}% geometric {geo:.2}% sampling {samp:.2}% linear {lin:.2}%",
            f.n,
            f.deviation[3].len(),
            f.attempts
        ));
    }
    let mut o = Outcome::new(pass, parts.join(" | "));
    o.flag = flag;
    o
}

fn criterion_9(families: &[Family]) -> Outcome {
    let attempts: usize = families.iter().map(|f| f.attempts * 4).sum();
    let success: usize = families.iter().map(|f| f.success.iter().sum::<usize>()).sum();
    let sandwich: usize = families.iter().map(|f| f.sandwich_fail).sum();
    let rate = success as f64 / attempts as f64;
    let per_variant: Vec<String> = Variant::ALL
        .iter()
        .enumerate()
        .map(|(k, v)| format!("{v} {}/{}", families.iter().map(|f| f.success[k]).sum::<usize>(), families.iter().map(|f| f.attempts).sum::<usize>()))
        .collect();
    Outcome::new(
        rate >= 0.8 && sandwich == 0,
        format!("success {:.1}% ({}), {sandwich} sandwich violations", rate * 100.0, per_variant.join(", ")),
    )
}

fn criterion_10() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (n, level) in [(10usize, 4u8), (15, 2)] {
        let inst = generate(&GeneratorConfig::standard(InstanceKind::Simple, n, 77)).unwrap();
        let started = Instant::now();
        let (_, cost) = lower_bound(&inst, level, Variant::Lite);
        let secs = started.elapsed().as_secs_f64();
        pass &= cost.is_finite() && secs < 900.0;
        parts.push(format!("{n} targets lvl-{level}: LB {cost:.3} in {secs:.1} s"));
    }
    Outcome::new(pass, parts.join(", "))
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut report = |id: usize, name: &'static str, o: Outcome| {
        let tag = if !o.pass {
            "FAIL"
        } else if o.flag {
            "PASS (flagged)"
        } else {
            "PASS"
        };
        println!("[{tag}] {id:>2} {name}: {}", o.detail);
        results.push((id, name, o));
    };

    report(1, "sft oracle equivalence", criterion_1());
    report(2, "kinematics identities", criterion_2());

    let mut linear_set = instances(InstanceKind::Simple, 5, 1..11);
    linear_set.extend(instances(InstanceKind::Complex, 5, 1..11));
    let s = sweep(&linear_set);
    report(3, "bound validity", criterion_3(&s));
    report(4, "dominance", criterion_4(&s));
    report(5, "refinement monotonicity", criterion_5(&s));
    report(6, "gtsp exactness", criterion_6());
    report(7, "discretization table", criterion_7());

    let families = [family(5, 101..111), family(10, 201..211)];
    report(8, "deviation trend", criterion_8(&families));
    report(9, "feasible from lower bound", criterion_9(&families));
    report(10, "desk-scale performance", criterion_10());

    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!("acceptance: {}/{} passed", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
