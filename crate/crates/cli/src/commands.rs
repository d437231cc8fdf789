use std::fs;
use std::time::Instant;

use rlip_core::instance::{self, GenRecipe};
use rlip_core::metrics::{diversity, spacing};
use rlip_core::model::{ObjectiveVector, ProblemInstance};
use rlip_core::oracle::{exact_front_decoder_reachable, exact_front_full, OracleLimits};
use rlip_core::parallel::with_threads;
use rlip_core::rsm::{self, derive_seed, FactorSpec, TuneResponse, TunerOptions};
use rlip_core::{run_moss, run_nsga2, MossConfig, NsgaConfig, ParetoArchive, SolveError};

use crate::report::{
    self, ResultsRow, RunRow, SolveArtifact, WinsRow,
};
use crate::cli::{CliError, CompareArgs, GenerateArgs, InputArgs, OracleArgs, SolveArgs, TuneArgs};

fn resolve_instance(input: &InputArgs) -> Result<ProblemInstance, CliError> {
    let defaults = GenRecipe::default();
    let mut inst = match (&input.instance, input.generate) {
        (Some(path), _) => instance::load_csv(path)?,
        (None, Some((n, m))) => {
            let recipe = GenRecipe {
                q: input.q.unwrap_or(defaults.q),
                r_levels: input.r_levels.unwrap_or(defaults.r_levels),
                distance: input.distance.unwrap_or(defaults.distance),
                ..defaults
            };
            instance::generate(n, m, input.seed, &recipe)?
        }
        (None, None) => {
            return Err(CliError::Usage(
                "provide --instance <path> or --generate <n_customers,n_sites>".into(),
            ))
        }
    };
    if input.instance.is_some() {
        if let Some(d) = input.distance {
            if d != inst.distance_kind() {
                inst = ProblemInstance::new(
                    inst.customers().to_vec(),
                    inst.sites().to_vec(),
                    inst.q(),
                    inst.r_levels(),
                    d,
                )?;
            }
        }
        if let Some(q) = input.q {
            inst = inst.with_q(q)?;
        }
        if let Some(r) = input.r_levels {
            inst = inst.with_r_levels(r)?;
        }
    }
    Ok(inst)
}

pub fn generate(args: GenerateArgs) -> Result<(), CliError> {
    if args.input.generate.is_none() {
        return Err(CliError::Usage(
            "generate requires --generate <n_customers,n_sites>".into(),
        ));
    }
    let inst = resolve_instance(&args.input)?;
    fs::create_dir_all(&args.out)?;
    let path = args.out.join("instance.csv");
    instance::save_csv(&inst, &path)?;
    println!(
        "wrote {} ({} customers, {} sites, q={}, R={})",
        path.display(),
        inst.n_customers(),
        inst.n_sites(),
        inst.q(),
        inst.r_levels()
    );
    Ok(())
}

fn run_algorithm(
    algo: &str,
    instance: &ProblemInstance,
    pop: usize,
    pc: f64,
    pm: f64,
    iters: Option<usize>,
    refset: usize,
    facility_count: Option<usize>,
    seed: u64,
) -> Result<ParetoArchive, SolveError> {
    match algo {
        "nsga2" => run_nsga2(
            instance,
            &NsgaConfig {
                population_size: pop,
                crossover_rate: pc,
                mutation_rate: pm,
                max_iterations: iters.unwrap_or(60),
                facility_count,
                seed,
            },
        ),
        _ => run_moss(
            instance,
            &MossConfig {
                refset_size: refset,
                crossover_rate: pc,
                mutation_rate: pm,
                max_iterations: iters.unwrap_or(10),
                facility_count,
                seed,
                ..MossConfig::default()
            },
        ),
    }
}

pub fn solve(args: SolveArgs) -> Result<(), CliError> {
    let inst = resolve_instance(&args.input)?;
    fs::create_dir_all(&args.out)?;
    let started = Instant::now();
    let archive = with_threads(args.threads, || {
        run_algorithm(
            &args.algo,
            &inst,
            args.pop,
            args.pc,
            args.pm,
            args.iters,
            args.refset,
            args.facility_count,
            args.input.seed,
        )
    })?;
    let wall_time = started.elapsed().as_secs_f64();

    let front = archive.objectives();
    let front_spacing = spacing(&front);
    let front_diversity = diversity(&front);
    let rows: Vec<RunRow> = archive
        .entries()
        .iter()
        .map(|entry| RunRow {
            algorithm: args.algo.clone(),
            seed: args.input.seed,
            facility_count: Some(
                args.facility_count.unwrap_or_else(|| entry.solution.open_count()),
            ),
            archive_size: archive.len(),
            objectives: entry.objectives,
            spacing: front_spacing,
            diversity: front_diversity,
        })
        .collect();
    report::write_run_csv(&args.out.join("run.csv"), &rows)?;
    report::write_archive_json(
        &args.out.join("archive.json"),
        &SolveArtifact {
            algorithm: args.algo.clone(),
            seed: args.input.seed,
            facility_count: args.facility_count,
            entries: archive.entries().to_vec(),
        },
    )?;
    fs::write(
        args.out.join("timing.csv"),
        format!("algorithm,seed,wall_time_s\n{},{},{:.6}\n", args.algo, args.input.seed, wall_time),
    )?;
    println!(
        "{}: {} archive points in {:.3}s -> {}",
        args.algo,
        archive.len(),
        wall_time,
        args.out.display()
    );
    Ok(())
}

struct CellOutcome {
    nsga_front: Vec<ObjectiveVector>,
    moss_front: Vec<ObjectiveVector>,
    nsga_time: f64,
    moss_time: f64,
    wins: WinsRow,
}

pub fn compare(args: CompareArgs) -> Result<(), CliError> {
    if args.reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }
    if args.p_list.is_empty() || args.q_list.is_empty() {
        return Err(CliError::Usage("--p-list and --q-list must be non-empty".into()));
    }
    let base = resolve_instance(&args.input)?;
    fs::create_dir_all(&args.out)?;
    with_threads(args.threads, || compare_grid(&args, &base))
}

fn compare_grid(args: &CompareArgs, base: &ProblemInstance) -> Result<(), CliError> {
    let mut nsga_rows: Vec<ResultsRow> = Vec::new();
    let mut moss_rows: Vec<ResultsRow> = Vec::new();
    let mut wins_rows: Vec<WinsRow> = Vec::new();
    let mut time_rows: Vec<(usize, f64, &str, f64)> = Vec::new();
    let mut fig1_rows: Vec<(String, usize, f64, f64)> = Vec::new();

    let mut n = 0usize;
    for (p_idx, &p) in args.p_list.iter().enumerate() {
        for (q_idx, &q) in args.q_list.iter().enumerate() {
            n += 1;
            let cell = (p_idx * args.q_list.len() + q_idx) as u64;
            let instance = base.with_q(q)?;
            let outcome = run_cell(args, &instance, p, q, cell)?;

            let min1 = |front: &[ObjectiveVector]| {
                front.iter().map(|v| v.obj1).fold(f64::INFINITY, f64::min)
            };
            let min2 = |front: &[ObjectiveVector]| {
                front.iter().map(|v| v.obj2).fold(f64::INFINITY, f64::min)
            };
            nsga_rows.push(ResultsRow {
                n,
                q_pct: q * 100.0,
                pareto_count: outcome.nsga_front.len(),
                solution_time_s: outcome.nsga_time,
                facility_count: p,
                obj1: min1(&outcome.nsga_front),
                obj2: min2(&outcome.nsga_front),
                diversity: diversity(&outcome.nsga_front),
                spacing: spacing(&outcome.nsga_front),
            });
            moss_rows.push(ResultsRow {
                n,
                q_pct: q * 100.0,
                pareto_count: outcome.moss_front.len(),
                solution_time_s: outcome.moss_time,
                facility_count: p,
                obj1: min1(&outcome.moss_front),
                obj2: min2(&outcome.moss_front),
                diversity: diversity(&outcome.moss_front),
                spacing: spacing(&outcome.moss_front),
            });
            wins_rows.push(outcome.wins);
            time_rows.push((p, q, "nsga2", outcome.nsga_time));
            time_rows.push((p, q, "moss", outcome.moss_time));
            fig1_rows.push(("nsga2".into(), p, q, min1(&outcome.nsga_front)));
            fig1_rows.push(("moss".into(), p, q, min1(&outcome.moss_front)));
        }
    }

    report::write_results_csv(&args.out.join("results_nsga2.csv"), &nsga_rows)?;
    report::write_results_csv(&args.out.join("results_moss.csv"), &moss_rows)?;
    report::write_wins_csv(&args.out.join("wins.csv"), &wins_rows)?;
    report::write_times_csv(&args.out.join("times.csv"), &time_rows)?;
    report::write_fig1_csv(&args.out.join("fig1_obj1_vs_q.csv"), &fig1_rows)?;
    println!(
        "compared {} cells x {} reps -> {}",
        nsga_rows.len(),
        args.reps,
        args.out.display()
    );
    Ok(())
}

fn run_cell(
    args: &CompareArgs,
    instance: &ProblemInstance,
    p: usize,
    q: f64,
    cell: u64,
) -> Result<CellOutcome, CliError> {
    let mut nsga_div_wins = 0usize;
    let mut moss_div_wins = 0usize;
    let mut nsga_sp_wins = 0usize;
    let mut moss_sp_wins = 0usize;
    let mut first: Option<(Vec<ObjectiveVector>, Vec<ObjectiveVector>, f64, f64)> = None;

    for rep in 0..args.reps {
        let seed = derive_seed(args.input.seed, cell, rep as u64);
        let nsga_started = Instant::now();
        let nsga = run_algorithm(
            "nsga2", instance, args.pop, args.pc, args.pm, Some(args.iters), args.refset,
            Some(p), seed,
        )?;
        let nsga_time = nsga_started.elapsed().as_secs_f64();
        let moss_started = Instant::now();
        let moss = run_algorithm(
            "moss", instance, args.pop, args.pc, args.pm, Some(args.iters), args.refset,
            Some(p), seed,
        )?;
        let moss_time = moss_started.elapsed().as_secs_f64();

        let nsga_front = nsga.objectives();
        let moss_front = moss.objectives();
        let (dn, dm) = (diversity(&nsga_front), diversity(&moss_front));
        if dn < dm {
            nsga_div_wins += 1;
        } else if dm < dn {
            moss_div_wins += 1;
        }
        if let (Some(sn), Some(sm)) = (spacing(&nsga_front), spacing(&moss_front)) {
            if sn > sm {
                nsga_sp_wins += 1;
            } else if sm > sn {
                moss_sp_wins += 1;
            }
        }
        if rep == 0 {
            first = Some((nsga_front, moss_front, nsga_time, moss_time));
        }
    }

    let (nsga_front, moss_front, nsga_time, moss_time) =
        first.expect("reps >= 1 guarantees a first repetition");
    let pct = |wins: usize| wins as f64 * 100.0 / args.reps as f64;
    Ok(CellOutcome {
        nsga_front,
        moss_front,
        nsga_time,
        moss_time,
        wins: WinsRow {
            q,
            facility_count: p,
            nsga2_diversity_win_pct: pct(nsga_div_wins),
            moss_diversity_win_pct: pct(moss_div_wins),
            nsga2_spacing_win_pct: pct(nsga_sp_wins),
            moss_spacing_win_pct: pct(moss_sp_wins),
        },
    })
}

pub fn tune(args: TuneArgs) -> Result<(), CliError> {
    let inst = resolve_instance(&args.input)?;
    fs::create_dir_all(&args.out)?;
    let range = |name: &str, values: &[f64]| -> Result<(f64, f64), CliError> {
        match values {
            [lo, hi] if lo < hi => Ok((*lo, *hi)),
            _ => Err(CliError::Usage(format!("--{name} wants `low,high` with low < high"))),
        }
    };
    let (pop_lo, pop_hi) = range("pop-range", &args.pop_range)?;
    let (pc_lo, pc_hi) = range("pc-range", &args.pc_range)?;
    let (pm_lo, pm_hi) = range("pm-range", &args.pm_range)?;
    let factors = [
        FactorSpec::new("population_size", pop_lo, pop_hi).with_bounds(4.0, f64::INFINITY),
        FactorSpec::new("crossover_rate", pc_lo, pc_hi).with_bounds(0.0, 1.0),
        FactorSpec::new("mutation_rate", pm_lo, pm_hi).with_bounds(0.0, 1.0),
    ];
    let response = TuneResponse::parse(&args.response)
        .expect("clap restricts --response to known values");
    let base = NsgaConfig {
        max_iterations: args.iters,
        facility_count: args.facility_count,
        ..NsgaConfig::default()
    };
    let options = TunerOptions {
        replicates: args.replicates,
        center_replicates: args.center_reps,
        curvature_multiplier: args.curvature_mult,
        step_size: args.step,
        max_steps: args.max_steps,
        max_region_moves: args.max_moves,
        seed: args.input.seed,
    };
    let report =
        with_threads(args.threads, || rsm::tune_nsga2(&inst, &base, response, factors, &options))?;

    fs::write(
        args.out.join("tune_report.json"),
        serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    let mut design = String::from(
        "region,point,coded_pop,coded_pc,coded_pm,population_size,crossover_rate,mutation_rate,mean_response\n",
    );
    for (region_idx, region) in report.regions.iter().enumerate() {
        for (point_idx, (point, response)) in
            region.design.iter().zip(&region.mean_responses).enumerate()
        {
            design.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                region_idx,
                point_idx,
                point.coded[0],
                point.coded[1],
                point.coded[2],
                point.natural[0],
                point.natural[1],
                point.natural[2],
                response,
            ));
        }
    }
    fs::write(args.out.join("design_points.csv"), design)?;
    println!(
        "tuned {} region(s): population {:.0}, pc {:.3}, pm {:.3} (response {:.6}) -> {}",
        report.regions.len(),
        report.recommended_levels[0],
        report.recommended_levels[1],
        report.recommended_levels[2],
        report.recommended_response,
        args.out.display()
    );
    Ok(())
}

pub fn oracle(args: OracleArgs) -> Result<(), CliError> {
    let inst = resolve_instance(&args.input)?;
    fs::create_dir_all(&args.out)?;
    let mut limits = OracleLimits::default();
    if let Some(nodes) = args.max_nodes {
        limits.max_nodes = nodes;
    }
    match args.mode.as_str() {
        "full" => {
            let front = with_threads(args.threads, || {
                exact_front_full(&inst, args.facility_count, &limits)
            })?;
            let vectors: Vec<ObjectiveVector> = front.iter().map(|(_, v)| *v).collect();
            report::write_front_csv(&args.out.join("oracle_full.csv"), &vectors)?;
            report::write_witnesses_json(&args.out.join("oracle_witnesses.json"), &front)?;
            println!("exact front: {} points -> {}", front.len(), args.out.display());
        }
        _ => {
            let front = with_threads(args.threads, || {
                exact_front_decoder_reachable(&inst, args.facility_count, &limits)
            })?;
            report::write_front_csv(&args.out.join("oracle_reachable.csv"), &front)?;
            println!(
                "decoder-reachable front: {} points -> {}",
                front.len(),
                args.out.display()
            );
        }
    }
    Ok(())
}
