//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails. All algebraic comparisons are exact.

use itertools::Itertools;
use std::collections::BTreeSet;
use std::time::Instant;
use superpluecker::cluster::{
    enumerate_triangulations, exchange_graph, marking_reachability, Triangulation,
};
use superpluecker::ptolemy::{classical_ptolemy, ptolemy_flip, sample_quad, PtolemyQuad};
use superpluecker::GrassmannElement;
use superpluecker_cli::{run, Case, Format, RunConfig, Suite, Task, VerificationReport};

const SEED: u64 = 2024;

type Criterion = fn() -> Result<String, String>;

fn config(task: Task, trials: usize) -> RunConfig {
    let mut c = RunConfig::new(task);
    c.trials = trials;
    c.seed = SEED;
    c
}

fn run_clean(config: &RunConfig) -> Result<VerificationReport, String> {
    let report = run(config).map_err(|e| e.to_string())?;
    if let Some(f) = report.failures.first() {
        return Err(format!(
            "{} failures, first: trial {} {}: {}",
            report.failures.len(),
            f.trial,
            f.check_id,
            f.detail
        ));
    }
    Ok(report)
}

fn passed(report: &VerificationReport, id: &str) -> u64 {
    report.details["passed_checks"][id].as_u64().unwrap_or(0)
}

fn expect_count(report: &VerificationReport, id: &str, expected: u64) -> Result<(), String> {
    let found = passed(report, id);
    if found == expected {
        Ok(())
    } else {
        Err(format!("{id}: {found} passing checks, expected {expected}"))
    }
}

fn berezinian_core() -> Result<String, String> {
    let start = Instant::now();
    let report = run_clean(&config(Task::Verify(Suite::Berezinian), 100))?;
    // formats r|s with r <= 3, s <= 2, excluding 0|0
    let formats = 11;
    for id in [
        "multiplicativity",
        "ber_star_inverse",
        "row_homogeneity",
        "column_homogeneity",
    ] {
        expect_count(&report, id, 100 * formats)?;
    }
    // two elementary operations for each format of size >= 2
    expect_count(&report, "elementary_invariance", 2 * 100 * (formats - 2))?;
    Ok(format!("{} ms", start.elapsed().as_millis()))
}

fn wrong_matrices() -> Result<String, String> {
    let start = Instant::now();
    let report = run_clean(&config(Task::Verify(Suite::WrongMatrix), 100))?;
    // r = 1..4, wrong vector as row and as column
    expect_count(&report, "wrong_identity_ber_star", 100 * 4 * 2)?;
    expect_count(&report, "wrong_identity_ber", 100 * 4 * 2)?;
    expect_count(&report, "column_antisymmetry", 100 * 4)?;
    expect_count(&report, "theta_two_paths", 100 * 2)?;
    Ok(format!("{} ms", start.elapsed().as_millis()))
}

fn gr20_relations() -> Result<String, String> {
    let mut c = config(Task::Verify(Suite::Pluecker), 20);
    c.case = Some(Case::TwoZero);
    let report = run_clean(&c)?;
    expect_count(&report, "gr20_planes", 20 * 3)?;
    Ok(format!(
        "{} relation instances",
        passed(&report, "relation_instances")
    ))
}

fn r1_relations() -> Result<String, String> {
    let mut c = config(Task::Verify(Suite::Pluecker), 5);
    c.case = Some(Case::ROne);
    let report = run_clean(&c)?;
    // C(4,3) + C(5,3) + C(5,4) keys per trial
    expect_count(&report, "theta_antisymmetry", 5 * 3)?;
    let instances = passed(&report, "relation_instances");
    if instances == 0 {
        return Err("no relation instances evaluated".into());
    }
    Ok(format!("{instances} relation instances"))
}

/// Triangulations as maximal sets of pairwise non-crossing diagonals,
/// found by exhaustive search over all `(n-3)`-subsets.
fn brute_force_triangulations(n: usize) -> Vec<BTreeSet<(usize, usize)>> {
    let diagonals: Vec<(usize, usize)> = (1..=n)
        .tuple_combinations()
        .filter(|&(i, j)| j - i >= 2 && !(i == 1 && j == n))
        .collect();
    let crossing = |(a, b): (usize, usize), (c, d): (usize, usize)| {
        (a < c && c < b && b < d) || (c < a && a < d && d < b)
    };
    diagonals
        .iter()
        .copied()
        .combinations(n - 3)
        .filter(|set| {
            set.iter()
                .tuple_combinations()
                .all(|(&x, &y)| !crossing(x, y))
        })
        .map(|set| set.into_iter().collect())
        .collect()
}

fn diagonal_set(t: &Triangulation) -> BTreeSet<(usize, usize)> {
    t.diagonals().iter().map(|d| d.endpoints()).collect()
}

fn cluster_combinatorics() -> Result<String, String> {
    for (n, expected) in [(4, 2), (5, 10), (6, 42)] {
        let g = exchange_graph(n).map_err(|e| e.to_string())?;
        if g.vertex_count() != expected {
            return Err(format!(
                "n={n}: {} vertices, expected {expected}",
                g.vertex_count()
            ));
        }
    }
    for n in 4..=8 {
        let g = exchange_graph(n).map_err(|e| e.to_string())?;
        if !g.is_connected() {
            return Err(format!("n={n}: exchange graph disconnected"));
        }
        let quotient = g.quotient();
        let oracle = brute_force_triangulations(n);
        let vertices: Vec<BTreeSet<(usize, usize)>> =
            quotient.vertices.iter().map(diagonal_set).collect();
        let as_set: BTreeSet<_> = vertices.iter().cloned().collect();
        if as_set != oracle.iter().cloned().collect::<BTreeSet<_>>()
            || vertices.len() != oracle.len()
        {
            return Err(format!("n={n}: quotient vertices differ from brute force"));
        }
        let oracle_edges: BTreeSet<(usize, usize)> = (0..vertices.len())
            .tuple_combinations()
            .filter(|&(i, j)| vertices[i].symmetric_difference(&vertices[j]).count() == 2)
            .collect();
        let edges: BTreeSet<(usize, usize)> = quotient
            .edges
            .iter()
            .map(|&(i, j)| (i.min(j), i.max(j)))
            .collect();
        if edges != oracle_edges {
            return Err(format!("n={n}: quotient edges differ from the flip graph"));
        }
        let all = enumerate_triangulations(n).map_err(|e| e.to_string())?;
        if let Some(t) = all.iter().find(|t| !marking_reachability(t)) {
            return Err(format!("n={n}: markings of {t} not mutually reachable"));
        }
    }
    Ok("n = 4..8".into())
}

fn mutation_exactness() -> Result<String, String> {
    let start = Instant::now();
    let mut c = config(Task::Verify(Suite::ClusterWalk), 3);
    c.n = Some(6);
    c.steps = 1000;
    let report = run_clean(&c)?;
    expect_count(&report, "walk_consistency", 3)?;
    expect_count(&report, "even_involution", 2 * 3)?;
    if passed(&report, "odd_round_trip") == 0 {
        return Err("no odd round trips checked".into());
    }
    Ok(format!("{} ms", start.elapsed().as_millis()))
}

fn super_ptolemy() -> Result<String, String> {
    let start = Instant::now();
    let report = run_clean(&config(Task::Verify(Suite::Ptolemy), 100))?;
    for id in [
        "sigma_theta_invariant",
        "bar_ptolemy",
        "classical_degeneration",
    ] {
        expect_count(&report, id, 100)?;
    }
    // classical degeneration against the exchange relation written out directly
    for seed in 0..20 {
        let q = sample_quad(seed).map_err(|e| e.to_string())?.quad;
        let zero = GrassmannElement::zero(q.a.generator_count());
        let classical = PtolemyQuad {
            sigma: zero.clone(),
            theta: zero,
            ..q.clone()
        };
        let f = ptolemy_flip(&classical).map_err(|e| e.to_string())?.f;
        let direct =
            &(&(&q.a * &q.c) + &(&q.b * &q.d)) * &q.e.invert().map_err(|e| e.to_string())?;
        if f != direct || classical_ptolemy(&q.a, &q.b, &q.c, &q.d, &q.e).ok() != Some(direct) {
            return Err(format!(
                "seed {seed}: classical flip differs from (ac+bd)/e"
            ));
        }
    }
    Ok(format!("{} ms", start.elapsed().as_millis()))
}

fn determinism() -> Result<String, String> {
    let pool = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
    };
    let mut ber = config(Task::Verify(Suite::Berezinian), 10);
    ber.r = Some(2);
    ber.s = Some(2);
    let mut r1 = config(Task::Verify(Suite::Pluecker), 2);
    r1.case = Some(Case::ROne);
    r1.r = Some(2);
    r1.n = Some(4);
    let configs = [
        ber,
        config(Task::Verify(Suite::WrongMatrix), 5),
        r1,
        config(Task::Verify(Suite::ClusterWalk), 4),
        config(Task::Verify(Suite::Ptolemy), 20),
    ];
    for c in &configs {
        let prints: Vec<String> = [1, 3, 1]
            .into_iter()
            .map(|threads| pool(threads).install(|| run(c).map(|r| r.fingerprint())))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        if prints.iter().any(|p| p != &prints[0]) {
            return Err(format!("{}: reports differ between runs", c.command_echo()));
        }
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for format in [Format::Dot, Format::Json] {
        let mut contents = Vec::new();
        for k in 0..2 {
            let path = dir.path().join(format!("graph-{k}"));
            let mut c = config(Task::ExchangeGraph, 1);
            c.n = Some(7);
            c.format = format;
            c.out = Some(path.clone());
            run(&c).map_err(|e| e.to_string())?;
            contents.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        if contents[0] != contents[1] || contents[0].is_empty() {
            return Err(format!("{format:?} exports differ"));
        }
    }
    Ok("reports and exports identical".into())
}

fn main() {
    let criteria: [(&str, Criterion); 8] = [
        ("Berezinian core", berezinian_core),
        ("wrong-matrix identities", wrong_matrices),
        ("Gr 2|0 relations", gr20_relations),
        ("Gr r|1 reduced relations", r1_relations),
        ("cluster combinatorics", cluster_combinatorics),
        ("mutation exactness", mutation_exactness),
        ("super Ptolemy", super_ptolemy),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(note) => println!("PASS criterion {}: {name} ({note})", k + 1),
            Err(why) => {
                println!("FAIL criterion {}: {name}: {why}", k + 1);
                failed.push(k + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
