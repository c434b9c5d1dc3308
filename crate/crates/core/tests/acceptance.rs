//! Acceptance report: one `[PASS]` or `[FAIL]` line per criterion.
//!
//! Exits 0 after reporting so that failures stay visible without hiding the
//! rest of the test suite; set `ACCEPTANCE_STRICT=1` to exit 1 on any
//! failure.

mod common;

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use common::{chi_square_p_value, histogram, max_standard_errors};
use movco::baselines::{
    run_penalty_ga_with, run_penalty_vqe_with, PenaltyConfig, SpsaConfig, FEASIBLE_P,
};
use movco::cli::{generated_instance, GenerationSpec};
use movco::cmp::{CashSchedule, CmpInstance, Scorer};
use movco::metrics::{
    approximation_ratio, brute_force_solve, exact_expectation_product, exact_expectation_state,
    gaps, overlap, Expectation, OracleResult,
};
use movco::movco::{run_movco_with, MovcoConfig, RunRecord, RunResult};
use movco::nsga2::{
    crowding_distance, dominates, nondominated_sort, sbx_pair, select_survivors, GaConfig,
    Individual,
};
use movco::qsim::{product_probability, Ansatz, BitString, ParameterVector, Simulator};
use movco::rng::{Domain, SeedStream};
use rand::Rng;
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn instances(cash_points: usize, days: usize, count: usize, seed: u64) -> Vec<CmpInstance> {
    let spec = GenerationSpec {
        cash_points,
        days,
        count,
        seed,
    };
    (0..count)
        .map(|i| generated_instance(&spec, i).unwrap())
        .collect()
}

fn seed_for(i: usize) -> u64 {
    SeedStream::new(2718).derive_seed(Domain::Instance, i as u64)
}

fn exact(params: &ParameterVector, scorer: &Scorer) -> Expectation {
    match params.ansatz() {
        Ansatz::Product => exact_expectation_product(params, scorer).unwrap(),
        Ansatz::Layered { .. } => {
            exact_expectation_state(&Simulator::default().build_state(params).unwrap(), scorer)
        }
    }
}

fn params_at(run: &RunResult, n: usize, ansatz: Ansatz, budget: usize) -> ParameterVector {
    let rec: &RunRecord = run
        .records
        .iter()
        .rev()
        .find(|r| r.evaluations <= budget)
        .unwrap();
    ParameterVector::new(n, ansatz, rec.params.clone()).unwrap()
}

fn golden_instance() -> Outcome {
    let inst = CmpInstance::worked_example();
    let o = brute_force_solve(&inst).unwrap();
    let m = CashSchedule::from_matrix(&[vec![2, 2, 3, 0], vec![1, 1, 0, 1]]).unwrap();
    let listed = o.optimal_schedules(&inst).contains(&m);
    let cost = inst.transaction_cost(&m);
    outcome(
        listed && cost == o.c_min && o.c_min != 10.0,
        format!(
            "C_min {} over {} optima, reference schedule listed: {listed}, its cost {cost} (the quoted 10 is not attainable)",
            o.c_min,
            o.optimal.len()
        ),
    )
}

fn pareto_attainment() -> Outcome {
    let set = instances(2, 2, 20, 2);
    let hits: Vec<bool> = set
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let scorer = Scorer::new(inst);
            let o = brute_force_solve(inst).unwrap();
            let cfg = MovcoConfig {
                ga: GaConfig {
                    generations: 300,
                    ..GaConfig::default()
                },
                seed: seed_for(i),
                ..MovcoConfig::default()
            };
            let f = run_movco_with(&scorer, &cfg).unwrap().best.fitness;
            f.p == 1.0 && f.e == o.c_min - o.c_max
        })
        .collect();
    let n = hits.iter().filter(|&&h| h).count();
    outcome(
        n * 10 >= 9 * set.len(),
        format!(
            "{n}/{} instances at (1, C_min - C_max) after 300 generations (need 90%)",
            set.len()
        ),
    )
}

/// Shared 16-qubit study behind the satisfaction, comparison and ablation
/// criteria.
struct SixteenQubit {
    movco_final_p: Vec<f64>,
    movco_success: Vec<bool>,
    /// Exact `(P, approximation ratio)` at 2000 evaluations.
    movco: Vec<(f64, f64)>,
    vqe: Vec<(f64, f64)>,
    ga: Vec<(f64, f64)>,
}

const BUDGET: usize = 2000;

fn sixteen_qubit_study() -> SixteenQubit {
    let set = instances(2, 4, 20, 4);
    let penalty = PenaltyConfig::default();
    let per: Vec<_> = set
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let scorer = Scorer::new(inst);
            let n = inst.n_bits();
            let oracle: OracleResult = brute_force_solve(inst).unwrap();
            let ansatz = Ansatz::Layered { layers: 1 };
            let sim = Simulator::default();
            let summary = |params: &ParameterVector| {
                let e = exact(params, &scorer);
                (
                    e.p,
                    approximation_ratio(e.expected_cost, inst, oracle.c_min).unwrap(),
                )
            };

            let cfg = MovcoConfig {
                ga: GaConfig {
                    generations: 200,
                    ..GaConfig::default()
                },
                seed: seed_for(i),
                ..MovcoConfig::default()
            };
            let run = run_movco_with(&scorer, &cfg).unwrap();
            let final_p = exact(&run.best.params, &scorer).p;
            let success = run.records.iter().take(101).any(|r| {
                let p = ParameterVector::new(n, ansatz, r.params.clone()).unwrap();
                overlap(&p, &sim, &oracle).unwrap().success
            });
            let movco = summary(&params_at(&run, n, ansatz, BUDGET));

            let spsa = SpsaConfig {
                iterations: BUDGET / 2,
                seed: seed_for(i),
                ..SpsaConfig::default()
            };
            let vqe = summary(
                &run_penalty_vqe_with(&scorer, &penalty, &spsa)
                    .unwrap()
                    .best
                    .params,
            );

            let ga = GaConfig {
                generations: (BUDGET - 10) / 10,
                ..GaConfig::default()
            };
            let ga = summary(
                &run_penalty_ga_with(&scorer, &penalty, &ga, seed_for(i))
                    .unwrap()
                    .best
                    .params,
            );
            (final_p, success, movco, vqe, ga)
        })
        .collect();
    SixteenQubit {
        movco_final_p: per.iter().map(|r| r.0).collect(),
        movco_success: per.iter().map(|r| r.1).collect(),
        movco: per.iter().map(|r| r.2).collect(),
        vqe: per.iter().map(|r| r.3).collect(),
        ga: per.iter().map(|r| r.4).collect(),
    }
}

fn feasible_fraction(xs: &[(f64, f64)]) -> f64 {
    xs.iter().filter(|x| x.0 > FEASIBLE_P).count() as f64 / xs.len() as f64
}

fn constraint_satisfaction(s: &SixteenQubit) -> Outcome {
    let n = s.movco_final_p.len() as f64;
    let mean_p = s.movco_final_p.iter().sum::<f64>() / n;
    let success = s.movco_success.iter().filter(|&&b| b).count() as f64 / n;
    outcome(
        mean_p >= 0.99 && success >= 0.6,
        format!("mean final P {mean_p:.4} (need 0.99), overlap success by generation 100 {success:.2} (need 0.60)"),
    )
}

fn movco_vs_penalty(s: &SixteenQubit) -> Outcome {
    let (fm, fv) = (feasible_fraction(&s.movco), feasible_fraction(&s.vqe));
    let both: Vec<(f64, f64)> = s
        .movco
        .iter()
        .zip(&s.vqe)
        .filter(|(m, v)| m.0 > FEASIBLE_P && v.0 > FEASIBLE_P)
        .map(|(m, v)| (m.1, v.1))
        .collect();
    let k = both.len() as f64;
    let (rm, rv) = (
        both.iter().map(|b| b.0).sum::<f64>() / k,
        both.iter().map(|b| b.1).sum::<f64>() / k,
    );
    let ratio_ok = both.is_empty() || rm >= rv;
    outcome(
        fm > fv && ratio_ok,
        format!(
            "P>0.99 at {BUDGET} evaluations: movco {fm:.2} vs penalty-vqe {fv:.2}; mean ratio on {} jointly feasible: {rm:.4} vs {rv:.4}",
            both.len()
        ),
    )
}

fn ablation(s: &SixteenQubit) -> Outcome {
    let n = s.ga.len() as f64;
    let (fg, fv, fm) = (
        feasible_fraction(&s.ga),
        feasible_fraction(&s.vqe),
        feasible_fraction(&s.movco),
    );
    // Two-proportion z-test with pooled variance.
    let pooled = (fg + fv) / 2.0;
    let se = (pooled * (1.0 - pooled) * 2.0 / n).sqrt();
    let z = if se == 0.0 { 0.0 } else { (fg - fv) / se };
    outcome(
        z.abs() <= 1.96 && fg < fm,
        format!("P>0.99: penalty-ga {fg:.2}, penalty-vqe {fv:.2} (z = {z:.2}), movco {fm:.2}"),
    )
}

fn product_scaleup() -> Outcome {
    let set = instances(10, 7, 10, 8);
    let results: Vec<(f64, Option<f64>)> = set
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let scorer = Scorer::new(inst);
            let cfg = MovcoConfig {
                ansatz: Ansatz::Product,
                ga: GaConfig {
                    population_size: 100,
                    offspring_size: 100,
                    generations: 99,
                    ..GaConfig::default()
                },
                seed: seed_for(i),
                ..MovcoConfig::default()
            };
            let budget = cfg.ga.total_evaluations();
            let m = run_movco_with(&scorer, &cfg).unwrap();
            let penalty = PenaltyConfig {
                lambda_f: 50.0,
                lambda_l: 50.0,
                ansatz: Ansatz::Product,
                ..PenaltyConfig::default()
            };
            let spsa = SpsaConfig {
                iterations: budget / 2,
                seed: seed_for(i),
                ..SpsaConfig::default()
            };
            let v = run_penalty_vqe_with(&scorer, &penalty, &spsa).unwrap();
            let g = gaps(
                &exact(&m.best.params, &scorer),
                &exact(&v.best.params, &scorer),
            );
            (g.p_gap, g.c_gap)
        })
        .collect();
    let wins = results
        .iter()
        .filter(|(p, c)| *p >= 0.0 && c.is_some_and(|c| c >= 0.0))
        .count();
    let fmt: Vec<String> = results
        .iter()
        .map(|(p, c)| format!("({p:+.3},{:+.3})", c.unwrap_or(f64::NAN)))
        .collect();
    outcome(
        wins * 10 >= 8 * set.len(),
        format!(
            "{wins}/{} instances with P_gap >= 0 and C_gap >= 0 at 10000 evaluations (need 80%); gaps {}",
            set.len(),
            fmt.join(" ")
        ),
    )
}

/// Fronts by repeated removal of the nondominated set.
fn peel_fronts(objs: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..objs.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| !left.iter().any(|&j| dominates(&objs[j], &objs[i])))
            .collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

fn nsga2_exactness() -> Outcome {
    let mut rng = SeedStream::new(77).substream(Domain::Variation, 0, 0);
    let mut failures = Vec::new();

    for t in 0..200 {
        let size = rng.gen_range(1..=40);
        let m = rng.gen_range(2..=3);
        let objs: Vec<Vec<f64>> = (0..size)
            .map(|_| (0..m).map(|_| rng.gen_range(0..6) as f64).collect())
            .collect();
        if nondominated_sort(&objs) != peel_fronts(&objs) {
            failures.push(format!("sort mismatch on population {t}"));
            break;
        }
    }

    let cd = crowding_distance(&[[0.0, 2.0], [1.0, 1.0], [2.0, 0.0]]);
    if !(cd[0].is_infinite() && cd[2].is_infinite() && cd[1] == 2.0) {
        failures.push(format!("crowding {cd:?}"));
    }

    let mut worst = 0.0f64;
    for _ in 0..100_000 {
        let (p1, p2) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let (c1, c2) = sbx_pair(p1, p2, rng.gen::<f64>(), 15.0);
        worst = worst.max((c1 + c2 - p1 - p2).abs());
    }
    if worst > 1e-12 {
        failures.push(format!("SBX sum drift {worst:e}"));
    }

    for _ in 0..200 {
        let n = rng.gen_range(1..=30);
        let merged: Vec<Individual> = (0..n + rng.gen_range(0..=n))
            .map(|_| {
                Individual::new(
                    vec![0.0],
                    vec![rng.gen_range(0..5) as f64, rng.gen_range(0..5) as f64],
                )
            })
            .collect();
        let got = select_survivors(merged, n).len();
        if got != n {
            failures.push(format!("{got} survivors for {n}"));
            break;
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "200 sorts, crowding (inf, 2, inf), SBX drift {worst:.1e}, 200 survivor selections"
            )
        } else {
            failures.join("; ")
        },
    )
}

fn simulator_statistics() -> Outcome {
    const SHOTS: usize = 8192;
    let seeds = SeedStream::new(88);
    let sim = Simulator::default();
    let mut min_p = 1.0f64;
    for n in 1..=6 {
        for ansatz in [Ansatz::Product, Ansatz::Layered { layers: 2 }] {
            let mut r = seeds.substream(Domain::Init, n as u64, 0);
            let angles = (0..ansatz.parameter_count(n))
                .map(|_| r.gen_range(0.0..6.3))
                .collect();
            let params = ParameterVector::new(n, ansatz, angles).unwrap();
            let probs: Vec<f64> = match ansatz {
                Ansatz::Product => (0..1u64 << n)
                    .map(|x| product_probability(&params, &BitString::from_index(x, n)).unwrap())
                    .collect(),
                Ansatz::Layered { .. } => {
                    sim.build_state(&params).unwrap().probabilities().collect()
                }
            };
            let batch = sim
                .sample(
                    &params,
                    SHOTS,
                    &mut seeds.substream(Domain::Evaluation, n as u64, 0),
                )
                .unwrap();
            min_p = min_p.min(chi_square_p_value(&histogram(&batch), &probs));
        }
    }
    let mut worst_z = 0.0f64;
    for i in 0..20u64 {
        let (days, ansatz) = if i % 2 == 0 {
            (2, Ansatz::Layered { layers: 1 })
        } else {
            (4, Ansatz::Product)
        };
        let inst = &instances(2, days, 1, 100 + i)[0];
        let scorer = Scorer::new(inst);
        let n = inst.n_bits();
        let mut r = seeds.substream(Domain::Init, 100 + i, 0);
        let angles = (0..ansatz.parameter_count(n))
            .map(|_| r.gen_range(0.0..6.3))
            .collect();
        let params = ParameterVector::new(n, ansatz, angles).unwrap();
        let batch = sim
            .sample(
                &params,
                SHOTS,
                &mut seeds.substream(Domain::Evaluation, 100 + i, 0),
            )
            .unwrap();
        worst_z = worst_z.max(max_standard_errors(
            &exact(&params, &scorer),
            &scorer,
            &batch,
        ));
    }
    outcome(
        min_p > 1e-3 && worst_z <= 4.0,
        format!("smallest chi-square p-value {min_p:.4} over 12 fits; worst expectation deviation {worst_z:.2} SE over 20 states"),
    )
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().unwrap() != "timing.json" {
                files.push((
                    p.strip_prefix(dir).unwrap().display().to_string(),
                    fs::read(&p).unwrap(),
                ));
            }
        }
    }
    files.sort();
    files
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let cwd = tmp.path();
    let run = |args: &[&str], threads: &str| -> bool {
        Command::new(env!("CARGO_BIN_EXE_movco"))
            .args(args)
            .current_dir(cwd)
            .env("MOVCO_THREADS", threads)
            .status()
            .map(|s| s.success())
            .unwrap_or(false)
    };
    let mut failures = Vec::new();
    let gen = [
        "generate", "-C", "2", "-D", "4", "--count", "2", "--seed", "5", "--out",
    ];
    if !(run(&[&gen[..], &["g1"]].concat(), "1") && run(&[&gen[..], &["g2"]].concat(), "1")) {
        failures.push("generate failed".to_string());
    } else if snapshot(&cwd.join("g1")) != snapshot(&cwd.join("g2")) {
        failures.push("generate differs".into());
    }

    let methods: [&[&str]; 4] = [
        &[
            "--method",
            "movco",
            "--generations",
            "20",
            "--parallel",
            "true",
        ],
        &["--method", "penalty-vqe", "--iterations", "100"],
        &[
            "--method",
            "penalty-ga",
            "--generations",
            "20",
            "--parallel",
            "true",
        ],
        &["--method", "brute"],
    ];
    for (i, extra) in methods.iter().enumerate() {
        let first = format!("run{i}");
        let base = [
            "run",
            "-C",
            "2",
            "-D",
            "2",
            "--count",
            "2",
            "--shots",
            "1024",
            "--out",
            first.as_str(),
        ];
        let replay = format!("replay{i}");
        let ok = run(&[&base[..], extra].concat(), "1")
            && run(
                &[
                    "run",
                    "--config",
                    &format!("{first}/instance_001/summary.json"),
                    "--out",
                    &replay,
                ],
                "4",
            );
        if !ok {
            failures.push(format!("{} failed", extra[1]));
        } else if snapshot(&cwd.join(&first)) != snapshot(&cwd.join(&replay)) {
            failures.push(format!("{} replay differs", extra[1]));
        }
    }

    let cmp = [
        "compare",
        "-C",
        "2",
        "-D",
        "2",
        "--count",
        "2",
        "--generations",
        "10",
        "--iterations",
        "50",
    ];
    let sweep = [
        "sweep",
        "-C",
        "2",
        "-D",
        "2",
        "--count",
        "2",
        "--iterations",
        "50",
        "--lambdas",
        "5,25",
    ];
    for (name, args) in [("compare", &cmp[..]), ("sweep", &sweep[..])] {
        let extra: &[&str] = if name == "compare" {
            &["--budgets", "50,100"]
        } else {
            &[]
        };
        let ok = run(
            &[args, extra, &["--out", &format!("{name}1")]].concat(),
            "1",
        ) && run(
            &[args, extra, &["--out", &format!("{name}2")]].concat(),
            "4",
        );
        if !ok {
            failures.push(format!("{name} failed"));
        } else if snapshot(&cwd.join(format!("{name}1"))) != snapshot(&cwd.join(format!("{name}2")))
        {
            failures.push(format!("{name} differs"));
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            "generate, 4 run methods replayed from embedded configs, compare and sweep: byte-identical across 1 and 4 threads"
                .to_string()
        } else {
            failures.join("; ")
        },
    )
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut report = |id: usize, name: &'static str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        println!(
            "[{}] {id}. {name}: {} ({:.0}s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
        results.push((id, name, o));
    };
    report(1, "golden instance", &golden_instance);
    report(2, "Pareto-front attainment", &pareto_attainment);
    let study = sixteen_qubit_study();
    report(3, "constraint satisfaction at 16 qubits", &|| {
        constraint_satisfaction(&study)
    });
    report(4, "MOVCO vs penalty VQE", &|| movco_vs_penalty(&study));
    report(5, "single-objective GA ablation", &|| ablation(&study));
    report(6, "product-state scale-up", &product_scaleup);
    report(7, "NSGA-II exactness", &nsga2_exactness);
    report(8, "simulator statistics", &simulator_statistics);
    report(9, "determinism", &determinism);

    let passed = results.iter().filter(|r| r.2.pass).count();
    println!(
        "{passed}/{} criteria pass ({:.0}s)",
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if passed < results.len() && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
