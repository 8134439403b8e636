use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use drea_bench::{load_all, run_experiment, summarize, AlgoId, CaseSpec, DimBudget, ExperimentPlan, Mark};
use drea_core::{Algorithm, ProblemId};

fn tiny_plan() -> ExperimentPlan {
    ExperimentPlan {
        cases: vec![CaseSpec::new(ProblemId::F6, 4)],
        algorithms: vec![AlgoId::Drea, AlgoId::Baseline(Algorithm::Jade)],
        repetitions: 3,
        base_seed: 100,
        budgets: vec![DimBudget { dim: 4, stage1: 400, stage2: 500 }],
        np_sweep: None,
    }
}

/// Relative path -> contents for every file under `root` except timings.
fn tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in fs::read_dir(&dir).unwrap() {
            let p = e.unwrap().path();
            let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
            if p.is_dir() {
                if rel != "timings" {
                    stack.push(p);
                }
            } else {
                out.insert(rel, fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn one_case_two_algorithms_three_runs() {
    let dir = tempfile::tempdir().unwrap();
    let outcome = run_experiment(&tiny_plan(), dir.path(), 2).unwrap();
    assert_eq!(outcome.reports.len(), 6);
    let seeds: Vec<u64> = outcome.reports.iter().map(|r| r.seed).collect();
    assert_eq!(seeds, [100, 101, 102, 100, 101, 102]);
    assert!(outcome.reports.iter().all(|r| r.wall_secs >= 0.0));

    let files = tree(dir.path());
    assert_eq!(files.keys().filter(|k| k.starts_with("convergence")).count(), 6);
    let runs = String::from_utf8(files["runs/f6-4d__drea.csv"].clone()).unwrap();
    assert_eq!(runs.lines().next(), Some("seed,reported_eff,eff_evals,raw_samples"));
    assert_eq!(runs.lines().count(), 4);
    assert_eq!(String::from_utf8(files["skipped.csv"].clone()).unwrap(), "case,reason\n");

    // values read back equal those returned
    let mut loaded = load_all(dir.path()).unwrap();
    let mut direct = outcome.reports.clone();
    for r in loaded.iter_mut().chain(direct.iter_mut()) {
        r.wall_secs = 0.0;
    }
    loaded.sort_by(|a, b| (&a.algo, a.seed).cmp(&(&b.algo, b.seed)));
    direct.sort_by(|a, b| (&a.algo, a.seed).cmp(&(&b.algo, b.seed)));
    assert_eq!(loaded, direct);
}

#[test]
fn rerun_and_resume_leave_files_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let plan = tiny_plan();
    run_experiment(&plan, a.path(), 1).unwrap();
    run_experiment(&plan, b.path(), 3).unwrap();
    assert_eq!(tree(a.path()), tree(b.path()));

    // a finished group is loaded, a missing one is recomputed
    fs::remove_file(a.path().join("runs/f6-4d__jade.csv")).unwrap();
    let before = fs::read(a.path().join("timings/f6-4d__drea.csv")).unwrap();
    let outcome = run_experiment(&plan, a.path(), 1).unwrap();
    assert_eq!(outcome.resumed, [(plan.cases[0], "drea".to_string())]);
    assert_eq!(outcome.reports.len(), 6);
    assert_eq!(fs::read(a.path().join("timings/f6-4d__drea.csv")).unwrap(), before);
    assert_eq!(tree(a.path()), tree(b.path()));
}

#[test]
fn unresolvable_cases_are_listed_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let plan = ExperimentPlan {
        cases: vec![CaseSpec::new(ProblemId::F2, 2), CaseSpec::new(ProblemId::F3, 5), CaseSpec::new(ProblemId::F6, 4)],
        algorithms: vec![AlgoId::Drea],
        repetitions: 1,
        ..tiny_plan()
    };
    let outcome = run_experiment(&plan, dir.path(), 1).unwrap();
    assert_eq!(outcome.reports.len(), 1);
    let skipped: Vec<String> = outcome.skipped.iter().map(|(c, _)| c.id()).collect();
    assert_eq!(skipped, ["f2-2d", "f3-5d"]);
    let text = fs::read_to_string(dir.path().join("skipped.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn summary_is_order_invariant_and_ties_identical_samples() {
    let dir = tempfile::tempdir().unwrap();
    let outcome = run_experiment(&tiny_plan(), dir.path(), 1).unwrap();
    let mut reports = outcome.reports.clone();
    let forward = summarize(&reports).unwrap();
    reports.reverse();
    reports.swap(0, 4);
    assert_eq!(summarize(&reports).unwrap(), forward);

    // a copy of the reference column is indistinguishable from it
    let mut twins = outcome.reports.clone();
    twins.extend(outcome.reports.iter().filter(|r| r.algo == "drea").map(|r| {
        let mut t = r.clone();
        t.algo = "twin".into();
        t
    }));
    let s = summarize(&twins).unwrap();
    assert_eq!(s.cells[&(tiny_plan().cases[0], "twin".to_string())].mark, Some(Mark::Same));

    let path = dir.path().join("nested/summary.csv");
    forward.write(&path).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap(), forward.to_csv());
}
