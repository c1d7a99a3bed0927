//! Acceptance gate: one PASS/FAIL line per criterion, each under its time budget.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use epicascade::cascade::{is_cohesive, largest_cohesive_subset, simulate};
use epicascade::control::{input_decomposition, receding_horizon_run, PolicyParams};
use epicascade::epistemics::{
    build_credibility_matrix, Agent, CredibilityMatrix, CredibilityMode, PairSettings,
};
use epicascade::network::{generate_er_graph, AgentId, AgentSet, Network};
use epicascade::scenario::{
    generate_comparative, generate_data_driven, run_closed_loop, run_open_loop,
};
use epicascade::verify::{run_suite, Suite};
use epicascade::with_worker_count;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Gate {
    failed: Vec<String>,
}

impl Gate {
    fn check(
        &mut self,
        id: u8,
        name: &str,
        budget: Duration,
        f: impl FnOnce() -> Result<String, String>,
    ) {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget {budget:?}")),
            Err(d) => (false, d),
        };
        println!(
            "{} criterion {id} ({name}): {detail} [{elapsed:.2?}]",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            self.failed.push(format!("criterion {id}"));
        }
    }
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn suite(s: Suite, trials: usize, min_checked: usize) -> Result<String, String> {
    let report = run_suite(s, trials, 20_240_601);
    if !report.passed() {
        return Err(format!(
            "{report}; first: {}",
            serde_json::to_string(&report.failures[0]).unwrap()
        ));
    }
    if report.checked < min_checked {
        return Err(format!(
            "{report}; fewer than {min_checked} qualifying trials"
        ));
    }
    Ok(report.to_string())
}

fn credibility_table() -> Result<String, String> {
    let agents = vec![
        Agent::new(0, 0.8, 0.5).with_groups(["gender", "income"]),
        Agent::new(1, 0.3, 0.5).with_groups(["gender", "income", "age"]),
        Agent::new(2, 0.6, 0.5).with_groups(["age"]),
    ];
    let m = build_credibility_matrix(&agents, CredibilityMode::Excess, &PairSettings::default())
        .map_err(|e| e.to_string())?;
    let want = [
        ((0, 1), 0.8),
        ((0, 2), 0.2),
        ((1, 0), 0.15),
        ((1, 2), 0.075),
        ((2, 0), 0.3),
        ((2, 1), 0.6),
    ];
    for ((s, h), v) in want {
        let got = m.get(AgentId(s), AgentId(h));
        if got.to_bits() != f64::to_bits(v) {
            return Err(format!("γ[{s},{h}] = {got:e}, want {v}"));
        }
    }
    Ok("six values bit-exact".into())
}

fn comparative_ordering() -> Result<String, String> {
    let mut holds = 0;
    let mut notes = Vec::new();
    for seed in 0..10u64 {
        let mut c = [0.0; 3];
        let mut t = [usize::MAX; 3];
        for id in 1..=3u8 {
            let s = generate_comparative(id, seed).map_err(|e| e.to_string())?;
            let m = run_closed_loop(&s).map_err(|e| e.to_string())?.metrics;
            c[usize::from(id - 1)] = m.c;
            t[usize::from(id - 1)] = m.t_star_star.unwrap_or(usize::MAX);
        }
        if c[2] < c[0] && c[0] < c[1] && t[2] <= t[0] && t[0] <= t[1] {
            holds += 1;
        } else {
            notes.push(format!("seed {seed}: C = {c:?}, t** = {t:?}"));
        }
    }
    let detail = format!("ordering holds for {holds}/10 seeds");
    if holds >= 9 {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", notes.join("; ")))
    }
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn input_trend() -> Result<String, String> {
    let s = generate_data_driven(fixture("survey_168.csv"), 1).map_err(|e| e.to_string())?;
    let run = run_closed_loop(&s).map_err(|e| e.to_string())?;
    let first = &run.trajectory.steps[0];
    let non_seeds: Vec<usize> = (0..s.n()).filter(|&x| first.targets[x].is_some()).collect();
    let u: Vec<f64> = non_seeds.iter().map(|&x| first.inputs[x]).collect();
    let weighted: Vec<f64> = non_seeds
        .iter()
        .map(|&x| (1.0 - first.targets[x].unwrap()) * first.rho_u[x])
        .collect();
    let rho = spearman(&u, &weighted);

    let mut pairs = 0;
    for (i, &x) in non_seeds.iter().enumerate() {
        for &y in &non_seeds[i + 1..] {
            if first.rho_u[x] != first.rho_u[y] {
                continue;
            }
            let (tx, ty) = (first.targets[x].unwrap(), first.targets[y].unwrap());
            if tx == ty {
                continue;
            }
            pairs += 1;
            let (lo, hi) = if tx < ty { (x, y) } else { (y, x) };
            if first.inputs[lo] <= first.inputs[hi] {
                return Err(format!(
                    "agents {lo} and {hi}: equal resistivity, lower influence, but u {} <= {}",
                    first.inputs[lo], first.inputs[hi]
                ));
            }
        }
    }
    if rho <= 0.0 || pairs == 0 {
        return Err(format!(
            "rank correlation {rho:.3}, {pairs} equal-resistivity pairs"
        ));
    }
    Ok(format!(
        "rank correlation {rho:.3}; {pairs} equal-resistivity pairs ordered strictly"
    ))
}

fn random_network(rng: &mut ChaCha8Rng, n: usize) -> (Network, Vec<f64>, AgentSet) {
    let g = generate_er_graph(n, rng.gen_range(0.15..0.6), rng.gen(), 10_000).unwrap();
    let m = CredibilityMatrix::from_fn(n, |_, _| rng.gen_range(0.0..=1.0)).unwrap();
    let thresholds: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
    let k = rng.gen_range(1..=(n / 4).max(1));
    let seeds = AgentSet::from_ids(n, sample(rng, n, k)).unwrap();
    (Network::new(g, m).unwrap(), thresholds, seeds)
}

fn invariants() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let groups = ["gender", "income", "age", "region"];
    for trial in 0..200 {
        let n = rng.gen_range(3..=40);
        let (net, thresholds, seeds) = random_network(&mut rng, n);

        let traj = simulate(&net, &thresholds, &seeds, n).map_err(|e| e.to_string())?;
        if !traj.fixed_point || traj.t_end() > n {
            return Err(format!("trial {trial}: no fixed point within {n} steps"));
        }
        if traj
            .states
            .windows(2)
            .any(|w| !w[0].adopted.is_subset(&w[1].adopted))
        {
            return Err(format!("trial {trial}: an agent reverted"));
        }

        let x1 = largest_cohesive_subset(&net, &thresholds, &AgentSet::from_mask(n, rng.gen()));
        let x2 = largest_cohesive_subset(&net, &thresholds, &AgentSet::from_mask(n, rng.gen()));
        if !is_cohesive(&net, &thresholds, &x1.union(&x2)) {
            return Err(format!(
                "trial {trial}: union of cohesive {x1} and {x2} is not cohesive"
            ));
        }

        let k = rng.gen_range(0.0..=1.0);
        let rho_u = rng.gen_range(0.0..=1.0);
        for x in seeds.complement().iter() {
            let (c1, term) =
                input_decomposition(&net, &seeds, k, rho_u, x).map_err(|e| e.to_string())?;
            let target = epicascade::cascade::influence_ratio(&net, &seeds, x).value;
            if (c1 + term - k * (rho_u - target)).abs() > 1e-15 {
                return Err(format!("trial {trial}: decomposition of agent {x} is off"));
            }
        }

        let agents: Vec<Agent> = (0..n)
            .map(|i| {
                let g: Vec<&str> = groups
                    .iter()
                    .copied()
                    .filter(|_| rng.gen_bool(0.4))
                    .collect();
                Agent::new(i, rng.gen_range(0.0..=1.0), 0.5).with_groups(g)
            })
            .collect();
        let m =
            build_credibility_matrix(&agents, CredibilityMode::Excess, &PairSettings::default())
                .map_err(|e| e.to_string())?;
        for s in &agents {
            for h in &agents {
                if m.get(s.id, h.id) > s.reliability {
                    return Err(format!("trial {trial}: γ[{},{}] exceeds r", s.id, h.id));
                }
            }
        }
    }

    let s = generate_data_driven(fixture("survey_168.csv"), 4).map_err(|e| e.to_string())?;
    let runs: Vec<_> = [1, 2, 8]
        .into_iter()
        .map(|w| {
            with_worker_count(Some(w), || {
                let closed = run_closed_loop(&s).unwrap();
                let open = run_open_loop(&s).unwrap();
                let verify = run_suite(Suite::Theorem1, 40, 7);
                (closed.trajectory, closed.metrics, open.summary, verify)
            })
        })
        .collect();
    if runs.windows(2).any(|w| w[0] != w[1]) {
        return Err("results differ across worker counts".into());
    }
    let policy = PolicyParams::default();
    let direct =
        receding_horizon_run(&s.network, s.agents(), &policy).map_err(|e| e.to_string())?;
    if direct != runs[0].0 {
        return Err("scenario runner and engine disagree".into());
    }
    Ok("200 random instances plus worker counts 1, 2, 8".into())
}

fn main() {
    let mut gate = Gate { failed: Vec::new() };
    gate.check(
        1,
        "credibility table",
        Duration::from_millis(1),
        credibility_table,
    );
    gate.check(
        2,
        "fixed point iff cohesive complement",
        Duration::from_secs(30),
        || suite(Suite::Lemma1, 60, 50),
    );
    gate.check(
        3,
        "final adopters from cohesive sets",
        Duration::from_secs(60),
        || suite(Suite::Theorem1, 120, 100),
    );
    gate.check(
        4,
        "Riccati gains against dense oracle",
        Duration::from_secs(10),
        || suite(Suite::Riccati, 100, 100),
    );
    gate.check(
        5,
        "credibility gaps and inputs",
        Duration::from_secs(10),
        || suite(Suite::Lemma2, 200, 50),
    );
    gate.check(
        6,
        "transient condition keeps fair adopters",
        Duration::from_secs(10),
        || suite(Suite::Prop3, 200, 50),
    );
    gate.check(
        7,
        "comparative cost ordering",
        Duration::from_secs(60),
        comparative_ordering,
    );
    gate.check(
        8,
        "input trend on survey population",
        Duration::from_secs(30),
        input_trend,
    );
    gate.check(9, "invariant suite", Duration::from_secs(60), invariants);
    if !gate.failed.is_empty() {
        eprintln!("failed: {}", gate.failed.join(", "));
        std::process::exit(1);
    }
}
