//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use morop_core::model::is_feasible;
use morop_core::nsga2::{fast_nondominated_sort, optimize, GaConfig};
use morop_core::pareto::{rank_individuals, ObjectivePoint};
use morop_core::pipeline::{analyze_archive, fmt_float, run_pipeline, RunConfig, RunReport};
use morop_core::problems::bemt::{bemt_evaluate, BemtOptions, InductionModel};
use morop_core::problems::numerical::numerical_problem;
use morop_core::problems::polar::PolarTable;
use morop_core::problems::wind::{blade_from_dvs, environment_from_deps, wind_turbine_problem, INITIAL_DESIGN};
use morop_core::problems::wind::{NOMINAL_ENVIRONMENT, POWER_MAX_W, POWER_MIN_W};
use morop_core::sampling::lhs;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn numerical_config(out: &Path) -> RunConfig {
    let mut cfg = RunConfig::load(configs().join("numerical.json")).expect("numerical config");
    cfg.out_dir = Some(out.to_path_buf());
    cfg
}

fn numerical_report(out: &Path) -> (RunReport, Duration) {
    let t = Instant::now();
    let report = analyze_archive(configs().join("numerical_archive.csv"), &numerical_config(out)).expect("analyze");
    (report, t.elapsed())
}

fn c1(out: &Path) -> Outcome {
    let (report, elapsed) = numerical_report(out);
    let expected = [("A", 1.0), ("B", 0.0), ("C", 0.0), ("D", 2.0 / 15.0), ("E", 4.0 / 25.0)];
    let mut worst: f64 = 0.0;
    for (rec, (id, v)) in report.records.iter().zip(expected) {
        assert_eq!(rec.id, id);
        worst = worst.max((rec.i_rl() - v).abs());
    }
    Outcome {
        pass: worst <= 1e-12 && elapsed < Duration::from_secs(1),
        detail: format!("max |I_RL - expected| = {worst:.1e}, {} ms", elapsed.as_millis()),
    }
}

fn c2(out: &Path) -> Outcome {
    let (report, _) = numerical_report(out);
    // scenario 1 is p = 3
    let ip = |id: &str| report.records.iter().find(|r| r.id == id).unwrap().large.i_p[0];
    let (d, e) = (ip("D"), ip("E"));
    Outcome {
        pass: d == Some(1.0 / 3.0) && e == Some(1.0 / 5.0),
        detail: format!("I_P(D, p=3) = {d:?}, I_P(E, p=3) = {e:?}"),
    }
}

/// Closed-form `I_RS` for `f1 = x + p/2`, `f2 = (x - p)^2` with `x ~ U(x0 - w, x0 + w)`.
fn analytic_i_rs(x0: f64, p: f64, w: f64, range: [f64; 2]) -> f64 {
    let d = x0 - p;
    let sigma1 = w / 3f64.sqrt();
    let sigma2 = (4.0 * d * d * w * w / 3.0 + 4.0 * w.powi(4) / 45.0).sqrt();
    let bias2 = w * w / 3.0;
    ((sigma1 / range[0]).powi(2) + ((sigma2 + bias2) / range[1]).powi(2)).sqrt()
}

fn c3(out: &Path) -> Outcome {
    let (report, elapsed) = numerical_report(out);
    // nominal front at p = 5: f1 from 3.5 to 7.5, f2 from 0 to 16
    let range = [4.0, 16.0];
    let mut worst: f64 = 0.0;
    for rec in &report.records {
        let oracle = analytic_i_rs(rec.x[0], 5.0, 0.1, range);
        worst = worst.max((rec.i_rs() - oracle).abs() / oracle);
    }
    let mut order: Vec<(&str, f64)> = report.records.iter().map(|r| (r.id.as_str(), r.i_rs())).collect();
    order.sort_by(|a, b| a.1.total_cmp(&b.1));
    let ids: Vec<&str> = order.iter().map(|o| o.0).collect();
    Outcome {
        pass: ids == ["E", "D", "C", "B", "A"] && worst < 0.05 && elapsed < Duration::from_secs(5),
        detail: format!("order {ids:?}, max rel. error vs oracle {:.2}%, {} ms", worst * 100.0, elapsed.as_millis()),
    }
}

fn c4(out: &Path) -> Outcome {
    let (report, _) = numerical_report(out);
    let got = report.summary.robust_pareto.clone();
    Outcome { pass: got == ["C", "D", "E"], detail: format!("P_R = {got:?}") }
}

fn brute_ranks(f: &[Vec<f64>], feasible: &[bool], include_infeasible: bool) -> Vec<usize> {
    let dom = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y);
    (0..f.len())
        .map(|i| 1 + (0..f.len()).filter(|&j| (include_infeasible || feasible[j]) && dom(&f[j], &f[i])).count())
        .collect()
}

fn peeling(f: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let dom = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y);
    let mut left: Vec<usize> = (0..f.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left.iter().copied().filter(|&i| !left.iter().any(|&j| dom(&f[j], &f[i]))).collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

fn c5(out: &Path) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0;
    let mut log = String::new();
    for instance in 0..100 {
        let n = rng.random_range(1..=200);
        let m = if instance % 2 == 0 { 2 } else { 3 };
        // coarse integer grid forces ties and duplicates
        let grid = rng.random_range(3..=50);
        let f: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.random_range(0..grid) as f64).collect()).collect();
        let feasible: Vec<bool> = (0..n).map(|_| rng.random_bool(0.7)).collect();
        let points: Vec<ObjectivePoint> =
            (0..n).map(|i| ObjectivePoint::new(format!("p{i}"), f[i].clone(), feasible[i])).collect();
        for include in [true, false] {
            if rank_individuals(&points, include).unwrap().ranks != brute_ranks(&f, &feasible, include) {
                mismatches += 1;
            }
        }
        let fronts = fast_nondominated_sort(&f);
        if fronts != peeling(&f) {
            mismatches += 1;
        }
        log.push_str(&format!("{instance},{n},{m},{}\n", fronts.len()));
    }
    fs::write(out.join("c5_instances.csv"), log).unwrap();
    Outcome { pass: mismatches == 0, detail: format!("100 instances, {mismatches} disagreements") }
}

fn c6(out: &Path) -> Outcome {
    let mut checked = 0;
    let mut bad = 0;
    let mut digest = String::new();
    for &n in &[1usize, 2, 3, 7, 10, 64, 100, 1000] {
        for &d in &[1usize, 2, 5, 9] {
            for seed in 0..3u64 {
                let m = lhs(n, d, seed).unwrap();
                for j in 0..d {
                    let mut hits = vec![0; n];
                    for u in m.column(j) {
                        if (0.0..1.0).contains(&u) {
                            hits[(u * n as f64).floor() as usize] += 1;
                        } else {
                            bad += 1;
                        }
                    }
                    bad += hits.iter().filter(|&&h| h != 1).count();
                    checked += 1;
                }
                digest.push_str(&format!("{n},{d},{seed},{}\n", fmt_float(m.row(0)[0])));
            }
        }
    }
    fs::write(out.join("c6_lhs.csv"), digest).unwrap();
    Outcome { pass: bad == 0, detail: format!("{checked} columns checked, {bad} stratum violations") }
}

fn c7(out: &Path) -> Outcome {
    let problem = numerical_problem(5.0, 0.1).unwrap();
    let cfg = GaConfig { population_size: 100, generations: 100, seed: 7, ..GaConfig::default() };
    let t = Instant::now();
    let archive = optimize(&problem, &cfg).unwrap();
    let elapsed = t.elapsed();
    // vertical gap inside the front's f1 range; outside it, distance to the nearest endpoint
    let front = |f1: f64| (f1 - 7.5).powi(2);
    let mut worst: f64 = 0.0;
    let mut outside = 0;
    let mut text = String::from("id,x,f1,f2\n");
    for (k, e) in archive.nominal.iter().enumerate() {
        let (f1, f2) = (e.f[0], e.f[1]);
        let gap = if (3.5..=7.5).contains(&f1) {
            (f2 - front(f1)).abs()
        } else {
            outside += 1;
            let end = f1.clamp(3.5, 7.5);
            (f1 - end).hypot(f2 - front(end))
        };
        worst = worst.max(gap);
        text.push_str(&format!("{},{},{},{}\n", archive.ids[k], fmt_float(archive.designs[k][0]), fmt_float(f1), fmt_float(f2)));
    }
    fs::write(out.join("c7_archive.csv"), text).unwrap();
    Outcome {
        pass: worst <= 0.05 && elapsed < Duration::from_secs(10),
        detail: format!(
            "{} points, max distance to front {worst:.2e} ({outside} past an endpoint), {} ms",
            archive.len(),
            elapsed.as_millis()
        ),
    }
}

fn c8(out: &Path) -> Outcome {
    let polar = PolarTable::s809();
    let blade = blade_from_dvs(&INITIAL_DESIGN);
    let env = environment_from_deps(&NOMINAL_ENVIRONMENT);
    let base = BemtOptions::default();

    let ideal = BemtOptions {
        induction: InductionModel::Prescribed { axial: 1.0 / 3.0, tangential: 0.0 },
        tip_loss: false,
        drag: false,
        ..base
    };
    let cp = bemt_evaluate(&blade, &env, &polar, &ideal).unwrap().power_coefficient(&env);
    let a = (cp - 16.0 / 27.0).abs() <= 1e-9;

    let nominal = bemt_evaluate(&blade, &env, &polar, &base).unwrap();
    let mut rho_err: f64 = 0.0;
    for factor in [0.8, 1.1, 2.0] {
        let dense = morop_core::problems::bemt::RotorEnvironment { air_density: env.air_density * factor, ..env };
        let r = bemt_evaluate(&blade, &dense, &polar, &base).unwrap();
        rho_err = rho_err
            .max((r.power / (nominal.power * factor) - 1.0).abs())
            .max((r.thrust / (nominal.thrust * factor) - 1.0).abs());
    }
    let b = rho_err <= 1e-9;

    let fine = bemt_evaluate(&blade, &env, &polar, &BemtOptions { n_elements: 80, ..base }).unwrap();
    let mesh = ((nominal.power - fine.power) / fine.power)
        .abs()
        .max(((nominal.thrust - fine.thrust) / fine.thrust).abs());
    let c = mesh < 0.01;

    let problem = wind_turbine_problem(polar).unwrap();
    let e = problem.evaluate_nominal(&INITIAL_DESIGN).unwrap();
    let (power, thrust) = (-e.f[0], e.f[1]);
    let d = (power / 11_500.0 - 1.0).abs() <= 0.2 && (thrust / 1_455.0 - 1.0).abs() <= 0.2;

    fs::write(
        out.join("c8_bemt.csv"),
        format!(
            "quantity,value\ncp_ideal,{}\nrho_err,{}\nmesh,{}\npower,{}\nthrust,{}\n",
            fmt_float(cp),
            fmt_float(rho_err),
            fmt_float(mesh),
            fmt_float(power),
            fmt_float(thrust)
        ),
    )
    .unwrap();
    Outcome {
        pass: a && b && c && d,
        detail: format!(
            "(a) C_P = {cp:.12} [{}] (b) rho err {rho_err:.1e} [{}] (c) 40 vs 80 elements {:.3}% [{}] \
             (d) P = {:.0} W, F_a = {:.0} N [{}]",
            ok(a),
            ok(b),
            mesh * 100.0,
            ok(c),
            power,
            thrust,
            ok(d)
        ),
    }
}

fn c9(out: &Path) -> Outcome {
    let mut cfg = RunConfig::load(configs().join("wind_turbine.json")).expect("wind config");
    cfg.out_dir = Some(out.to_path_buf());
    let t = Instant::now();
    let report = match run_pipeline(&cfg) {
        Ok(r) => r,
        Err(e) => return Outcome { pass: false, detail: format!("pipeline failed: {e}") },
    };
    let elapsed = t.elapsed();
    let in_range = report.records.iter().all(|r| (0.0..=1.0).contains(&r.i_rl()));
    let infeasible = report.records.iter().filter(|r| r.large.i_f == 0).count();
    let rf_rows = fs::read_to_string(out.join("rfspace.csv")).unwrap().lines().count().saturating_sub(1);
    let power_ok = report
        .archive
        .nominal
        .iter()
        .all(|e| is_feasible(e) && (POWER_MIN_W..=POWER_MAX_W).contains(&-e.f[0]));
    Outcome {
        pass: report.scenarios.len() == 9
            && in_range
            && infeasible > 0
            && rf_rows > 0
            && power_ok
            && elapsed < Duration::from_secs(300),
        detail: format!(
            "{} alternatives, {} with I_F = 0, I_RL in [0,1]: {in_range}, 1-25 kW: {power_ok}, \
             {rf_rows} RF rows, robust set {}, {:.1} s",
            report.archive.len(),
            infeasible,
            report.summary.robust_pareto.len(),
            elapsed.as_secs_f64()
        ),
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

type Criterion = fn(&Path) -> Outcome;

const CRITERIA: [(&str, Criterion); 9] = [
    ("numerical I_RL exactness", c1),
    ("numerical I_P decomposition", c2),
    ("I_RS ordering and moment oracle", c3),
    ("robust-Pareto subset", c4),
    ("Pareto machinery vs brute force", c5),
    ("LHS stratification", c6),
    ("NSGA-II front quality", c7),
    ("BEMT physics", c8),
    ("wind-turbine end to end", c9),
];

fn run_all(root: &Path) -> Vec<Outcome> {
    CRITERIA
        .iter()
        .enumerate()
        .map(|(i, (_, f))| {
            let dir = root.join(format!("c{}", i + 1));
            fs::create_dir_all(&dir).unwrap();
            f(&dir)
        })
        .collect()
}

fn snapshot(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().unwrap() != "run_info.json" {
                files.insert(path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    files
}

fn main() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let second = tmp.path().join("second");

    let outcomes = run_all(&first);
    let mut failures = 0;
    for (i, ((name, _), o)) in CRITERIA.iter().zip(&outcomes).enumerate() {
        println!("criterion {:>2} {:<34} {}  {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failures += usize::from(!o.pass);
    }

    run_all(&second);
    let (a, b) = (snapshot(&first), snapshot(&second));
    let differing: Vec<String> = a
        .keys()
        .chain(b.keys())
        .filter(|k| a.get(*k) != b.get(*k))
        .map(|k| k.display().to_string())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let pass = differing.is_empty() && !a.is_empty();
    println!(
        "criterion 10 {:<34} {}  {} files compared, differing: {:?}",
        "byte-identical re-run",
        if pass { "PASS" } else { "FAIL" },
        a.len(),
        differing
    );
    failures += usize::from(!pass);

    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
