use rayon::prelude::*;
use serde::Serialize;

use crate::emsa::{
    classify_cube, decay_parameter_schedule, mass_threshold, run_emsa_seed, scale_schedule, EmsaReport, EmsaSetup,
    DecaySchedule, InteractivityVerdict, LemmaCount, ScaleSchedule,
};
use crate::error::{Error, Result};
use crate::geometry::{make_cover, rearrange, truncation_center, Configuration, Cube};
use crate::hamiltonian::DisorderRealization;
use crate::localization::{certify_cube, decay_profile};
use crate::num::Real;
use crate::rng::split;
use crate::spectral::{eigensystem, wegner_empirical};
use crate::stats::wilson_interval;

use super::config::{ExperimentConfig, ExperimentKind};
use super::output::{real, Outcome, Table};

/// Runs the experiment on a pool of `config.run.workers` threads.
///
/// Trials are independent and collected by index, so the outcome does not
/// depend on the worker count.
pub fn run_experiment(kind: ExperimentKind, config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    config.check_kind(kind)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.run.workers)
        .build()
        .map_err(|e| Error::internal(format!("worker pool: {e}")))?;
    pool.install(|| match kind {
        ExperimentKind::Localize => run_localization_probability(config),
        ExperimentKind::Wegner => run_wegner(config),
        ExperimentKind::Emsa => run_emsa(config),
        ExperimentKind::Schedule => run_schedule(config),
        ExperimentKind::Geometry => run_geometry(config),
    })
}

fn fixed_realization(config: &ExperimentConfig) -> Result<Option<DisorderRealization>> {
    match &config.model.realization {
        None => Ok(None),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            Ok(Some(DisorderRealization::from_json(&text)?))
        }
    }
}

struct LocalizeTrial {
    seed: u64,
    pass: bool,
    passes: usize,
    eigenvectors: usize,
    spectra: Vec<Vec<String>>,
    certificates: Vec<Vec<String>>,
    decay: Vec<Vec<String>>,
    realization: Option<String>,
}

/// Fraction of trials whose cube is `m`-localizing, for every `(N, L, λ)`.
pub fn run_localization_probability(config: &ExperimentConfig) -> Result<Outcome> {
    let params = config.params()?;
    let fixed = fixed_realization(config)?;
    let per_instance = config.run.per_instance;
    let mut summary = Table::new(
        "localize.csv",
        &["N", "L", "lambda", "m", "trials", "passes", "p_hat", "ci_lo", "ci_hi"],
    );
    let mut trials_table = Table::new(
        "localize_trials.csv",
        &["N", "L", "lambda", "trial", "seed", "pass", "localized_vectors", "vectors"],
    );
    let mut spectra = Table::new("spectra.csv", &["instance_id", "index", "eigenvalue", "cluster_id"]);
    let mut certificates = Table::new(
        "certificates.csv",
        &["instance_id", "eigen_index", "eigenvalue", "center", "m", "pass", "margin"],
    );
    let mut decay = Table::new("decay.csv", &["instance_id", "eigen_index", "r", "shell_max"]);
    let mut documents = Vec::new();

    for n in config.model.particles.to_vec() {
        let center = config.center(n)?;
        for big in config.geometry.half_width.to_vec() {
            let cube = Cube::new(center.clone(), big)?;
            let set = cube.set();
            if set.len() > config.run.cap {
                return Err(Error::CapExceeded {
                    size: set.len(),
                    cap: config.run.cap,
                });
            }
            for (li, lambda) in config.model.lambda.to_vec().into_iter().enumerate() {
                let model = config.model(lambda);
                let results: Vec<LocalizeTrial> = (0..config.run.trials as u64)
                    .into_par_iter()
                    .map(|i| -> Result<LocalizeTrial> {
                        let seed = split(config.run.base_seed, i);
                        let realization = match &fixed {
                            Some(r) => {
                                let mut r = r.clone();
                                r.extend(crate::geometry::project_sites(&set));
                                r
                            }
                            None => model.realize(seed, [&set])?,
                        };
                        let es = eigensystem(&model.hamiltonian(&set, &realization)?, None)?;
                        let cert = certify_cube(&es, params.m, big, params.tau);
                        let id = format!("N{n}_L{big}_lambda{li}_trial{i}");
                        let mut out = LocalizeTrial {
                            seed,
                            pass: cert.pass,
                            passes: cert.passes(),
                            eigenvectors: es.len(),
                            spectra: Vec::new(),
                            certificates: Vec::new(),
                            decay: Vec::new(),
                            realization: None,
                        };
                        if per_instance {
                            for (k, (&e, c)) in es.eigenvalues().iter().zip(es.cluster_ids()).enumerate() {
                                out.spectra.push(vec![id.clone(), k.to_string(), real(e), c.to_string()]);
                            }
                            for c in &cert.certificates {
                                out.certificates.push(vec![
                                    id.clone(),
                                    c.eigen_index.to_string(),
                                    real(c.eigenvalue.0),
                                    c.center.to_string(),
                                    real(c.m.0),
                                    c.pass.to_string(),
                                    real(c.margin.0),
                                ]);
                                for (r, shell) in decay_profile(es.vector(c.eigen_index), es.index(), &c.center) {
                                    out.decay.push(vec![id.clone(), c.eigen_index.to_string(), r.to_string(), real(shell)]);
                                }
                            }
                            out.realization = Some(realization.to_json()?);
                        }
                        Ok(out)
                    })
                    .collect::<Result<_>>()?;

                let passes = results.iter().filter(|t| t.pass).count();
                let trials = results.len();
                let (lo, hi) = wilson_interval(passes, trials);
                summary.push(vec![
                    n.to_string(),
                    real(big),
                    real(lambda),
                    real(params.m),
                    trials.to_string(),
                    passes.to_string(),
                    real(passes as f64 / trials as f64),
                    real(lo),
                    real(hi),
                ]);
                for (i, t) in results.into_iter().enumerate() {
                    trials_table.push(vec![
                        n.to_string(),
                        real(big),
                        real(lambda),
                        i.to_string(),
                        t.seed.to_string(),
                        t.pass.to_string(),
                        t.passes.to_string(),
                        t.eigenvectors.to_string(),
                    ]);
                    spectra.rows.extend(t.spectra);
                    certificates.rows.extend(t.certificates);
                    decay.rows.extend(t.decay);
                    if let Some(json) = t.realization {
                        documents.push((format!("realizations/N{n}_L{big}_lambda{li}_trial{i}.json"), json));
                    }
                }
            }
        }
    }
    let mut tables = vec![summary, trials_table];
    if per_instance {
        tables.extend([spectra, certificates, decay]);
    }
    Ok(Outcome { tables, documents })
}

fn single<T: Clone>(values: Vec<T>, what: &str) -> Result<T> {
    match values.as_slice() {
        [v] => Ok(v.clone()),
        _ => Err(Error::config(format!("this experiment takes a single {what}"))),
    }
}

/// Empirical distribution of the spectral distance of two distant cubes.
pub fn run_wegner(config: &ExperimentConfig) -> Result<Outcome> {
    let n = single(config.model.particles.to_vec(), "particle number")?;
    let big = single(config.geometry.half_width.to_vec(), "half width")?;
    let lambda = single(config.model.lambda.to_vec(), "disorder strength")?;
    let center = config.center(n)?;
    let second = match &config.geometry.second_center {
        Some(c) => Configuration::new(c.clone())?,
        None => {
            let diam = 2 * big.floor() as i64;
            let shift = (8 * n as i64 + 1) * diam + 1;
            Configuration::new(center.coords().iter().map(|c| c + shift).collect())?
        }
    };
    let theta1 = Cube::new(center, big)?.set();
    let theta2 = Cube::new(second, big)?.set();
    let table = wegner_empirical(
        &theta1,
        &theta2,
        &config.model(lambda),
        &config.run.s_grid,
        config.run.trials,
        config.run.base_seed,
    )?;
    let mut cdf = Table::new("wegner.csv", &["s", "fraction", "ci_lo", "ci_hi"]);
    for row in &table.rows {
        cdf.push(vec![real(row.s.0), real(row.fraction.0), real(row.ci_lo.0), real(row.ci_hi.0)]);
    }
    let mut trials = Table::new("wegner_trials.csv", &["trial", "seed", "distance"]);
    for (i, d) in table.distances.iter().enumerate() {
        trials.push(vec![i.to_string(), split(config.run.base_seed, i as u64).to_string(), real(d.0)]);
    }
    Ok(Outcome {
        tables: vec![cdf, trials],
        documents: vec![],
    })
}

fn emsa_setup(config: &ExperimentConfig, particles: usize, lambda: f64) -> Result<EmsaSetup> {
    let params = config.params()?;
    Ok(EmsaSetup {
        center: config.center(particles)?,
        ell: config.geometry.ell,
        model: config.model(lambda),
        params,
        mass: params.m,
        constants: config.constants(),
        trace_cap: config.run.trace_cap,
    })
}

/// Reruns the seed of a report under `config`.
pub fn replay_emsa(config: &ExperimentConfig, report: &EmsaReport) -> Result<EmsaReport> {
    let setup = emsa_setup(config, report.center.particles(), report.lambda.0)?;
    run_emsa_seed(&setup, report.seed)
}

const LEMMAS: [&str; 3] = ["local_decay", "crude_bound", "buffered_decay"];

fn lemma_counts(r: &EmsaReport) -> [&LemmaCount; 3] {
    [&r.local_decay, &r.crude_bound, &r.buffered_decay]
}

/// One scale step per seed, with per-seed JSON reports and aggregate counts.
pub fn run_emsa(config: &ExperimentConfig) -> Result<Outcome> {
    let mut seeds = Table::new(
        "emsa.csv",
        &[
            "N",
            "lambda",
            "trial",
            "seed",
            "good",
            "partial",
            "full",
            "nonresonant",
            "localizing_cubes",
            "cover_cubes",
            "local_applicable",
            "local_passed",
            "crude_applicable",
            "crude_passed",
            "buffered_applicable",
            "buffered_passed",
            "traces",
            "traces_passed",
            "violations",
        ],
    );
    let mut summary = Table::new(
        "emsa_summary.csv",
        &["N", "lambda", "lemma", "checked", "applicable", "passed", "violated", "worst_margin"],
    );
    let mut documents = Vec::new();
    for n in config.model.particles.to_vec() {
        for (li, lambda) in config.model.lambda.to_vec().into_iter().enumerate() {
            let setup = emsa_setup(config, n, lambda)?;
            let size = Cube::new(setup.center.clone(), setup.big_width())?.set().len();
            if size > config.run.cap {
                return Err(Error::CapExceeded { size, cap: config.run.cap });
            }
            let reports: Vec<EmsaReport> = (0..config.run.trials as u64)
                .into_par_iter()
                .map(|i| run_emsa_seed(&setup, split(config.run.base_seed, i)))
                .collect::<Result<_>>()?;
            let mut totals = [LemmaCount::default(), LemmaCount::default(), LemmaCount::default()];
            for (i, r) in reports.iter().enumerate() {
                for (t, c) in totals.iter_mut().zip(lemma_counts(r)) {
                    t.merge(c);
                }
                seeds.push(vec![
                    n.to_string(),
                    real(lambda),
                    i.to_string(),
                    r.seed.to_string(),
                    r.events.good.to_string(),
                    r.events.partial.to_string(),
                    r.events.full.to_string(),
                    r.events.nonresonant.to_string(),
                    r.localizing_cubes.to_string(),
                    r.cover_cubes.to_string(),
                    r.local_decay.applicable.to_string(),
                    r.local_decay.passed.to_string(),
                    r.crude_bound.applicable.to_string(),
                    r.crude_bound.passed.to_string(),
                    r.buffered_decay.applicable.to_string(),
                    r.buffered_decay.passed.to_string(),
                    r.iteration.traces.to_string(),
                    r.iteration.passed.to_string(),
                    r.violations().to_string(),
                ]);
                documents.push((format!("emsa/N{n}_lambda{li}/seed_{i:05}.json"), r.to_json()?));
            }
            for (name, t) in LEMMAS.iter().zip(&totals) {
                summary.push(vec![
                    n.to_string(),
                    real(lambda),
                    name.to_string(),
                    t.checked.to_string(),
                    t.applicable.to_string(),
                    t.passed.to_string(),
                    t.violated.to_string(),
                    real(t.worst_margin.0),
                ]);
            }
        }
    }
    Ok(Outcome {
        tables: vec![seeds, summary],
        documents,
    })
}

#[derive(Serialize)]
struct ScheduleEntry {
    particles: usize,
    mass_threshold_l0: Real,
    l0: Real,
    scales: ScaleSchedule,
    decay: DecaySchedule,
}

#[derive(Serialize)]
struct ScheduleDocument {
    schema: &'static str,
    schedules: Vec<ScheduleEntry>,
}

/// Scale and mass schedule plus decay exponents; no diagonalization.
pub fn run_schedule(config: &ExperimentConfig) -> Result<Outcome> {
    let params = config.params()?;
    let constants = config.constants();
    let mut scales = Table::new("schedule.csv", &["N", "k", "log10_L", "m_k", "M_k"]);
    let mut exponents = Table::new("decay_exponents.csv", &["N", "n", "p"]);
    let mut report = Vec::new();
    for n in config.model.particles.to_vec() {
        let threshold = mass_threshold(&params, n, &constants)?;
        let l0 = config.geometry.l0.unwrap_or(threshold);
        let schedule = scale_schedule(l0, &params, n, config.geometry.k_max, &constants)?;
        for row in &schedule.rows {
            scales.push(vec![
                n.to_string(),
                row.k.to_string(),
                real(row.log10_scale.0),
                real(row.mass.0),
                real(row.next_mass.0),
            ]);
        }
        let decay = decay_parameter_schedule(config.msa.p, n, params.gamma)?;
        for (k, p) in decay.values.iter().enumerate() {
            exponents.push(vec![n.to_string(), (k + 1).to_string(), real(p.0)]);
        }
        report.push(ScheduleEntry {
            particles: n,
            mass_threshold_l0: Real(threshold),
            l0: Real(l0),
            scales: schedule,
            decay,
        });
    }
    let doc = ScheduleDocument {
        schema: "mpal.schedule.v1",
        schedules: report,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(Outcome {
        tables: vec![scales, exponents],
        documents: vec![("schedule.json".into(), text)],
    })
}

/// Cover of `Λ_L(center)` by `Λ_ℓ` cubes with their interactivity, and an
/// exhaustive check of the covering identity.
pub fn run_geometry(config: &ExperimentConfig) -> Result<Outcome> {
    let ell = config.geometry.ell;
    let mut summary = Table::new(
        "geometry.csv",
        &["N", "L", "ell", "cube_size", "orbits", "cover_size", "cover_bound", "covered", "partially_interactive"],
    );
    let mut cubes = Table::new("cover.csv", &["N", "L", "ell", "index", "center", "interactivity", "n1", "n2"]);
    for n in config.model.particles.to_vec() {
        let center = rearrange(&config.center(n)?);
        for big in config.geometry.half_width.to_vec() {
            if ell > big {
                return Err(Error::config(format!("ell = {ell} exceeds L = {big}")));
            }
            let cover = make_cover(&center, big, ell)?;
            let big_set = cover.big().set();
            let cores: Vec<_> = (0..cover.len()).map(|i| cover.core(i, &big_set)).collect();
            let mut covered = true;
            for x in big_set.representatives() {
                let a = truncation_center(x, &center, big, ell)?;
                let ok = cover
                    .centers()
                    .iter()
                    .position(|c| *c == a)
                    .is_some_and(|i| cores[i].contains_representative(x));
                covered &= ok;
            }
            let mut partial = 0;
            for (i, a) in cover.centers().iter().enumerate() {
                let verdict = classify_cube(a, ell, &config.model.interaction);
                let (kind, n1, n2) = match &verdict {
                    InteractivityVerdict::FullyInteractive => ("full", String::new(), String::new()),
                    InteractivityVerdict::PartiallyInteractive { n1, n2, .. } => {
                        partial += 1;
                        ("partial", n1.to_string(), n2.to_string())
                    }
                };
                cubes.push(vec![
                    n.to_string(),
                    real(big),
                    real(ell),
                    i.to_string(),
                    a.to_string(),
                    kind.into(),
                    n1,
                    n2,
                ]);
            }
            let bound = (2.0 * big.floor() + 1.0).powi(n as i32);
            summary.push(vec![
                n.to_string(),
                real(big),
                real(ell),
                big_set.len().to_string(),
                big_set.orbit_count().to_string(),
                cover.len().to_string(),
                real(bound),
                covered.to_string(),
                partial.to_string(),
            ]);
        }
    }
    Ok(Outcome {
        tables: vec![summary, cubes],
        documents: vec![],
    })
}
