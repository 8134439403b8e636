use drea_core::drea::run_drea_with;
use drea_core::{
    known_original_optima, run_drea, DreaConfig, EffEstimatorConfig, Executor, Objective, ProblemId, ProblemSpec,
};

fn reduced(problem: ProblemSpec, seed: u64) -> DreaConfig {
    DreaConfig {
        est: EffEstimatorConfig { samples_per_eval: 20, report_samples: 20_000, ..Default::default() },
        stage2_eff_cap: 30_000,
        ..DreaConfig::standard(problem, seed).unwrap()
    }
}

#[test]
fn zero_perturbation_finds_an_original_optimum() {
    // F6 has four equal summits, all tabulated.
    let id = ProblemId::F6;
    for seed in [11, 12] {
        let problem = ProblemSpec::new(id, 10).unwrap().with_perturbation_halfwidth(0.0).unwrap();
        let r = run_drea(&reduced(problem.clone(), seed)).unwrap();
        assert_eq!(r.reported_eff, problem.evaluate(&r.best_x).unwrap());
        let optima = known_original_optima(id, 10).unwrap();
        let gap = optima.iter().map(|o| o.linf_distance(&r.best_x)).fold(f64::INFINITY, f64::min);
        assert!(gap < 0.01, "{id}: {:?} is {gap} from the nearest original optimum", r.best_x);
    }
}

#[test]
fn budget_ledger_and_reproducibility() {
    let cfg = reduced(ProblemSpec::new(ProblemId::F5, 10).unwrap(), 3);
    let r = run_drea(&cfg).unwrap();
    let b = r.budget_final;
    assert_eq!(b.raw_evals_used(), cfg.stage1_raw_cap);
    assert_eq!(b.eff_evals_used(), cfg.stage2_eff_cap);
    assert!(b.total_raw() <= cfg.stage1_raw_cap + 20 * b.eff_evals_used() + 20_000);
    assert_eq!(r.archive_len, 10_000);
    assert!(r.peaks_found.len() <= cfg.peaks_cfg.n_p && !r.peaks_found.is_empty());
    assert!(r.convergence.windows(2).all(|w| w[1].best_eff >= w[0].best_eff));
    assert_eq!(r.convergence.last().unwrap().eff_evals_used, cfg.stage2_eff_cap);
    assert!(cfg.problem.bounds().contains(&r.best_x));
    assert_eq!(run_drea_with(&cfg, Executor::Sequential).unwrap(), r);
}

#[test]
fn initial_population_only_stage2() {
    let mut cfg = reduced(ProblemSpec::new(ProblemId::F2, 10).unwrap(), 0);
    cfg.stage2_eff_cap = 100;
    cfg.est.samples_per_eval = 1;
    cfg.est.report_samples = 1;
    let r = run_drea(&cfg).unwrap();
    assert_eq!(r.convergence.len(), 1);
}
