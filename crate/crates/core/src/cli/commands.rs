use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use super::config::{resolve_utility, ConfigFile, RunManifest};
use super::*;
use crate::codesim::{code_similarity_matrix, parse_tree, AstTree, EditCosts, SimilarityCap};
use crate::data::io::{load_patient_dir, load_prediction_dir, write_patient_dir, write_prediction_dir};
use crate::data::{
    empirical_cdf, write_prediction_file, Hospital, Hour, ParseOptions, PatientRecord, PredictionBundle,
    Variable,
};
use crate::diversity::{kappa_distribution, unweighted_matrix, weighted_matrix, Ranking, DEFAULT_KAPPA_BINS};
use crate::ensemble::{
    apply_ensemble, build_ensemble, parse_spec_file, select_regime, write_spec_file, BuildConfig, Regime,
    RegimeDecision, RegimeSelector, VoteRule,
};
use crate::labeler::{self, hourly_labels, Inclusion, LabelSummary, LabelTimeline, DEFAULT_LEAD_HOURS};
use crate::synth::{generate_cohort, generate_predictors, AlgorithmModel, SynthConfig};
use crate::utility::{rank_algorithms, utility_trace, CohortScorer, UtilityParams};

pub const TIMELINES_FILE: &str = "timelines.psv";
const TIMELINES_HEADER: &str =
    "patient_id|first_hour|length|lead|t_suspicion|t_sofa|t_sepsis|included|reason|flags";

pub(super) fn execute(command: &Command, config: &ConfigFile) -> Result<(), CliError> {
    let mut manifest = RunManifest::new(command.name());
    let output = match command {
        Command::Label(a) => label(a, config, &mut manifest)?,
        Command::Score(a) => score(a, config, &mut manifest)?,
        Command::Similarity(a) => similarity(a, config, &mut manifest)?,
        Command::Kappa(a) => kappa(a, config, &mut manifest)?,
        Command::TreeDist(a) => tree_dist(a, config, &mut manifest)?,
        Command::EnsembleBuild(a) => ensemble_build(a, config, &mut manifest)?,
        Command::EnsembleApply(a) => ensemble_apply(a, &mut manifest)?,
        Command::Synth(a) => synth(a, config, &mut manifest)?,
        Command::Stats(a) => stats(a, &mut manifest)?,
    };
    if output.manifest {
        write_out(&output.out, MANIFEST_FILE, &manifest.to_json())?;
    }
    Ok(())
}

fn write_out(out: &Path, relative: &str, contents: &str) -> Result<(), CliError> {
    let path = out.join(relative);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::Data(format!("{}: {e}", parent.display())))?;
    }
    fs::write(&path, contents).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn require_dir(path: &Path, what: &str) -> Result<(), CliError> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(CliError::Data(format!(
            "{what} directory {} not found",
            path.display()
        )))
    }
}

fn opt_hour(h: Option<Hour>) -> String {
    h.map_or_else(|| crate::data::MISSING_TOKEN.to_string(), |h| h.to_string())
}

fn timelines_psv(timelines: &[LabelTimeline], lead: Hour) -> String {
    let mut out = format!("{TIMELINES_HEADER}\n");
    for t in timelines {
        let inc = t.inclusion();
        out.push_str(&format!(
            "{}|{}|{}|{lead}|{}|{}|{}|{}|{}|{}\n",
            t.patient_id,
            t.first_hour,
            t.len(),
            opt_hour(t.t_suspicion),
            opt_hour(t.t_sofa),
            opt_hour(t.t_sepsis),
            u8::from(inc == Inclusion::Included),
            inc,
            if t.short_terminal_course {
                "short-terminal-course"
            } else {
                ""
            },
        ));
    }
    out
}

fn parse_timelines_psv(text: &str, path: &Path) -> Result<Vec<LabelTimeline>, CliError> {
    let bad = |line: usize, msg: &str| CliError::Data(format!("{}:{line}: {msg}", path.display()));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == TIMELINES_HEADER => {}
        _ => return Err(bad(1, "unexpected header")),
    }
    let hour = |tok: &str, line: usize| -> Result<Option<Hour>, CliError> {
        if tok == crate::data::MISSING_TOKEN {
            Ok(None)
        } else {
            tok.parse().map(Some).map_err(|_| bad(line, "bad hour"))
        }
    };
    let mut out = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = raw.split('|').collect();
        if f.len() != 10 {
            return Err(bad(line, "expected 10 fields"));
        }
        let first_hour: Hour = f[1].parse().map_err(|_| bad(line, "bad first_hour"))?;
        let len: usize = f[2].parse().map_err(|_| bad(line, "bad length"))?;
        let lead: Hour = f[3].parse().map_err(|_| bad(line, "bad lead"))?;
        if lead < 0 {
            return Err(bad(line, "negative lead"));
        }
        let t_sepsis = hour(f[6], line)?;
        out.push(LabelTimeline {
            patient_id: f[0].to_string(),
            first_hour,
            t_suspicion: hour(f[4], line)?,
            t_sofa: hour(f[5], line)?,
            t_sepsis,
            labels: hourly_labels(first_hour, len, t_sepsis, lead),
            short_terminal_course: f[9] == "short-terminal-course",
        });
    }
    Ok(out)
}

fn load_records(dir: &Path, truncate: bool) -> Result<Vec<PatientRecord>, CliError> {
    require_dir(dir, "record")?;
    let options = ParseOptions {
        truncate,
        hospital: Hospital::Unknown,
    };
    load_patient_dir(dir, &options).map_err(CliError::data)
}

fn label_lead(flag: Option<Hour>, config: &ConfigFile) -> Result<Hour, CliError> {
    let lead = flag.or(config.label.lead).unwrap_or(DEFAULT_LEAD_HOURS);
    if lead < 0 {
        return Err(CliError::Usage("lead must be non-negative".into()));
    }
    Ok(lead)
}

/// Included timelines from a `label` output directory, or from labeling a
/// record directory.
fn load_labels(
    dir: &Path,
    config: &ConfigFile,
    manifest: &mut RunManifest,
) -> Result<Vec<LabelTimeline>, CliError> {
    require_dir(dir, "label")?;
    let table = dir.join(TIMELINES_FILE);
    let all = if table.is_file() {
        manifest.input("labels", &table)?;
        let text =
            fs::read_to_string(&table).map_err(|e| CliError::Data(format!("{}: {e}", table.display())))?;
        parse_timelines_psv(&text, &table)?
    } else {
        manifest.input("labels", dir)?;
        let lead = label_lead(None, config)?;
        manifest.set("lead", lead);
        let truncate = config.label.truncate.unwrap_or(true);
        load_records(dir, truncate)?
            .iter()
            .map(|r| labeler::label_record(r, lead))
            .collect()
    };
    let included: Vec<LabelTimeline> = all
        .into_iter()
        .filter(|t| t.inclusion() == Inclusion::Included)
        .collect();
    if included.is_empty() {
        return Err(CliError::Data(format!(
            "no included patients under {}",
            dir.display()
        )));
    }
    Ok(included)
}

fn load_preds(dir: &Path, manifest: &mut RunManifest) -> Result<PredictionBundle, CliError> {
    require_dir(dir, "prediction")?;
    manifest.input("preds", dir)?;
    load_prediction_dir(dir).map_err(CliError::data)
}

/// The bundle limited to the labeled patients.
fn restrict_patients(bundle: &PredictionBundle, timelines: &[LabelTimeline]) -> PredictionBundle {
    let keep: BTreeSet<&str> = timelines.iter().map(|t| t.patient_id.as_str()).collect();
    let mut out = PredictionBundle::new();
    for alg in bundle.algorithms() {
        for s in bundle.streams_for(alg) {
            if keep.contains(s.patient_id.as_str()) {
                out.insert(s.clone());
            }
        }
    }
    out
}

fn utility_ranking(
    bundle: &PredictionBundle,
    timelines: &[LabelTimeline],
    params: &UtilityParams,
) -> Result<Ranking, CliError> {
    let ranked = rank_algorithms(bundle, timelines, params).map_err(CliError::data)?;
    Ok(Ranking::by_scores("normalized utility, descending", ranked))
}

fn record_params(manifest: &mut RunManifest, params: &UtilityParams) {
    manifest.set("utility", params);
}

fn label(a: &LabelArgs, config: &ConfigFile, manifest: &mut RunManifest) -> Result<Output, CliError> {
    let lead = label_lead(a.lead, config)?;
    let truncate = !a.no_truncate && config.label.truncate.unwrap_or(true);
    manifest.set("lead", lead);
    manifest.set("truncate", truncate);
    let records = load_records(&a.records, truncate)?;
    manifest.input("records", &a.records)?;

    let timelines: Vec<LabelTimeline> = records.iter().map(|r| labeler::label_record(r, lead)).collect();
    let out = &a.output.out;
    for t in &timelines {
        let mut body = String::from("ICULOS|SepsisLabel\n");
        for (h, x) in t.hours().zip(&t.labels) {
            body.push_str(&format!("{h}|{}\n", u8::from(*x)));
        }
        write_out(out, &format!("{}.psv", t.patient_id), &body)?;
    }
    write_out(out, TIMELINES_FILE, &timelines_psv(&timelines, lead))?;
    let s = LabelSummary::from_timelines(&timelines);
    let summary = format!(
        "metric,count\ntotal,{}\nincluded,{}\nincluded_septic,{}\nexcluded_{},{}\nexcluded_{},{}\nshort_terminal_course,{}\n",
        s.total,
        s.included,
        s.included_septic,
        Inclusion::TooShort,
        s.excluded_too_short,
        Inclusion::EarlyOnset,
        s.excluded_early_onset,
        s.short_terminal_course,
    );
    write_out(out, "summary.csv", &summary)?;
    Ok(a.output.clone())
}

fn score(a: &ScoreArgs, config: &ConfigFile, manifest: &mut RunManifest) -> Result<Output, CliError> {
    let params = resolve_utility(a.input.params.as_deref(), config)?;
    record_params(manifest, &params);
    let timelines = load_labels(&a.input.labels, config, manifest)?;
    let bundle = load_preds(&a.preds, manifest)?;
    let scorer = CohortScorer::new(&timelines, &params).map_err(CliError::data)?;

    let mut rows = Vec::new();
    for alg in bundle.algorithms() {
        let s = scorer.score_algorithm(&bundle, alg).map_err(CliError::data)?;
        rows.push((alg.to_string(), s));
    }
    rows.sort_by(|x, y| {
        y.1.normalized
            .total_cmp(&x.1.normalized)
            .then_with(|| x.0.cmp(&y.0))
    });
    let mut table = String::from("algorithm,normalized,observed,inaction,perfect\n");
    for (alg, s) in &rows {
        table.push_str(&format!(
            "{alg},{},{},{},{}\n",
            s.normalized, s.observed, s.inaction, s.perfect
        ));
    }
    write_out(&a.output.out, "scores.csv", &table)?;

    if !a.no_traces {
        for (alg, _) in &rows {
            for t in &timelines {
                let stream = bundle.get(alg, &t.patient_id).expect("scored above");
                let trace = utility_trace(t, &stream.labels, &params).map_err(CliError::data)?;
                write_out(
                    &a.output.out,
                    &format!("traces/{alg}/{}.psv", t.patient_id),
                    &trace.to_psv(),
                )?;
            }
        }
    }
    Ok(a.output.clone())
}

fn similarity(
    a: &SimilarityArgs,
    config: &ConfigFile,
    manifest: &mut RunManifest,
) -> Result<Output, CliError> {
    manifest.set("kind", format!("{:?}", a.kind).to_lowercase());
    let bundle = load_preds(&a.preds, manifest)?;
    let matrix = match (&a.labels, a.kind) {
        (None, SimilarityKind::Weighted) => {
            return Err(CliError::Usage("--kind weighted needs --labels".into()));
        }
        (None, SimilarityKind::Unweighted) => {
            unweighted_matrix(&bundle, &Ranking::by_id()).map_err(CliError::data)?
        }
        (Some(dir), kind) => {
            let params = resolve_utility(a.params.as_deref(), config)?;
            record_params(manifest, &params);
            let timelines = load_labels(dir, config, manifest)?;
            let bundle = restrict_patients(&bundle, &timelines);
            let ranking = utility_ranking(&bundle, &timelines, &params)?;
            match kind {
                SimilarityKind::Unweighted => unweighted_matrix(&bundle, &ranking),
                SimilarityKind::Weighted => weighted_matrix(&bundle, &timelines, &params, &ranking),
            }
            .map_err(CliError::data)?
        }
    };
    let stem = format!("similarity_{}", matrix.kind);
    write_out(&a.output.out, &format!("{stem}.csv"), &matrix.to_csv())?;
    write_out(&a.output.out, &format!("{stem}.meta"), &matrix.metadata())?;
    Ok(a.output.clone())
}

fn kappa(a: &KappaArgs, config: &ConfigFile, manifest: &mut RunManifest) -> Result<Output, CliError> {
    let bins = a.bins.or(config.kappa.bins).unwrap_or(DEFAULT_KAPPA_BINS);
    if bins == 0 {
        return Err(CliError::Usage("--bins must be positive".into()));
    }
    let bundle = load_preds(&a.preds, manifest)?;
    let (bundle, ranking) = match &a.labels {
        Some(dir) => {
            let params = resolve_utility(a.params.as_deref(), config)?;
            record_params(manifest, &params);
            let timelines = load_labels(dir, config, manifest)?;
            let bundle = restrict_patients(&bundle, &timelines);
            let ranking = utility_ranking(&bundle, &timelines, &params)?;
            (bundle, ranking)
        }
        None => (bundle, Ranking::by_id()),
    };
    let ids: Vec<&str> = bundle.algorithms().collect();
    let top = a.top.or(config.kappa.top).unwrap_or(ids.len());
    if top < 2 {
        return Err(CliError::Usage("--top must be at least 2".into()));
    }
    if top > ids.len() {
        return Err(CliError::Data(format!(
            "--top {top} exceeds the {} algorithms available",
            ids.len()
        )));
    }
    let chosen = ranking.top(&ids, top);
    manifest.set("top", top);
    manifest.set("bins", bins);
    manifest.set("raters", &chosen);
    let dist = kappa_distribution(&bundle, &chosen, bins).map_err(CliError::data)?;
    write_out(&a.output.out, &format!("kappa_top{top}.csv"), &dist.to_csv())?;
    write_out(
        &a.output.out,
        &format!("kappa_top{top}_histogram.csv"),
        &dist.histogram_csv(),
    )?;
    Ok(a.output.clone())
}

/// `algorithm,normalized,...` rows as written by `score`.
fn read_scores(path: &Path) -> Result<Ranking, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut scores = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let mut f = line.split(',');
        let (Some(id), Some(v)) = (f.next(), f.next()) else {
            return Err(CliError::Data(format!(
                "{}:{}: expected id,score",
                path.display(),
                i + 1
            )));
        };
        let v: f64 = v
            .parse()
            .map_err(|_| CliError::Data(format!("{}:{}: bad score `{v}`", path.display(), i + 1)))?;
        scores.push((id.to_string(), v));
    }
    Ok(Ranking::by_scores("normalized utility, descending", scores))
}

fn tree_dist(a: &TreeDistArgs, config: &ConfigFile, manifest: &mut RunManifest) -> Result<Output, CliError> {
    let defaults = EditCosts::default();
    let section = &config.tree_dist;
    let costs = EditCosts {
        insert: a.insert_cost.or(section.insert).unwrap_or(defaults.insert),
        delete: a.delete_cost.or(section.delete).unwrap_or(defaults.delete),
        relabel: a.relabel_cost.or(section.relabel).unwrap_or(defaults.relabel),
    };
    if !costs.is_valid() {
        return Err(CliError::Usage("edit costs must be positive and finite".into()));
    }
    let cap = match a.cap.or(section.cap) {
        Some(c) if c.is_finite() && c > 0.0 => SimilarityCap::Fixed(c),
        Some(c) => return Err(CliError::Usage(format!("cap must be positive, got {c}"))),
        None => SimilarityCap::Auto,
    };
    manifest.set("costs", costs);
    manifest.set(
        "cap",
        match cap {
            SimilarityCap::Auto => "auto".to_string(),
            SimilarityCap::Fixed(c) => c.to_string(),
        },
    );

    require_dir(&a.trees, "tree")?;
    manifest.input("trees", &a.trees)?;
    let mut paths: Vec<_> = fs::read_dir(&a.trees)
        .map_err(|e| CliError::Data(format!("{}: {e}", a.trees.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "ast"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Data(format!("no .ast files in {}", a.trees.display())));
    }
    let mut trees: Vec<(String, AstTree)> = Vec::new();
    for p in &paths {
        let text = fs::read_to_string(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
        let tree = parse_tree(&text).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
        let id = p
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        trees.push((id, tree));
    }
    let ranking = match &a.scores {
        Some(path) => {
            manifest.input("scores", path)?;
            read_scores(path)?
        }
        None => Ranking::by_id(),
    };
    let cmp = code_similarity_matrix(&trees, &ranking, &costs, cap);
    write_out(&a.output.out, "tree_distance.csv", &cmp.distance_csv())?;
    write_out(&a.output.out, "tree_similarity.csv", &cmp.similarity.to_csv())?;
    write_out(
        &a.output.out,
        "tree_similarity.meta",
        &format!("{}cap={}\n", cmp.similarity.metadata(), cmp.cap),
    )?;
    Ok(a.output.clone())
}

fn parse_rule(value: &str) -> Result<VoteRule, CliError> {
    value
        .parse()
        .map_err(|e: crate::ensemble::EnsembleError| CliError::Usage(e.to_string()))
}

fn ensemble_build(
    a: &EnsembleBuildArgs,
    config: &ConfigFile,
    manifest: &mut RunManifest,
) -> Result<Output, CliError> {
    let section = &config.ensemble;
    let params = resolve_utility(a.input.params.as_deref(), config)?;
    let mut build = BuildConfig::default();
    if let Some(r) = a.familiar_rule.as_deref().or(section.familiar_rule.as_deref()) {
        build.rules.insert(Regime::Familiar, parse_rule(r)?);
    }
    if let Some(r) = a
        .unfamiliar_rule
        .as_deref()
        .or(section.unfamiliar_rule.as_deref())
    {
        build.rules.insert(Regime::Unfamiliar, parse_rule(r)?);
    }
    if let Some(tau) = a.tau.or(section.tau) {
        if !tau.is_finite() {
            return Err(CliError::Usage("tau must be finite".into()));
        }
        build.selector = RegimeSelector::Auto { tau };
    }
    build.separate_regimes = a.separate_regimes || section.separate_regimes.unwrap_or(false);
    build.max_steps = a.max_steps.or(section.max_steps).unwrap_or(build.max_steps);
    build.tolerance = a.tolerance.or(section.tolerance).unwrap_or(build.tolerance);
    if !(build.tolerance >= 0.0 && build.tolerance.is_finite()) {
        return Err(CliError::Usage("tolerance must be a non-negative number".into()));
    }

    record_params(manifest, &params);
    let timelines = load_labels(&a.input.labels, config, manifest)?;
    let bundle = load_preds(&a.preds, manifest)?;
    let candidates: Vec<String> = if a.candidates.is_empty() {
        bundle.algorithms().map(str::to_string).collect()
    } else {
        a.candidates.clone()
    };
    manifest.set("candidates", &candidates);
    manifest.set(
        "rules",
        build
            .rules
            .iter()
            .map(|(r, v)| (r.to_string(), v.to_string()))
            .collect::<std::collections::BTreeMap<_, _>>(),
    );
    manifest.set("separate_regimes", build.separate_regimes);
    manifest.set("max_steps", build.max_steps);
    manifest.set("tolerance", build.tolerance);

    let (spec, results) =
        build_ensemble(&candidates, &bundle, &timelines, &params, &build).map_err(CliError::data)?;
    write_out(&a.output.out, "ensemble.psv", &write_spec_file(&spec))?;
    let mut trajectory = String::from("regime,step,added,score\n");
    let mut individual = String::from("algorithm,normalized\n");
    for (regime, result) in &results {
        for (i, step) in result.trajectory.iter().enumerate() {
            trajectory.push_str(&format!("{regime},{},{},{}\n", i + 1, step.added, step.score));
        }
    }
    if let Some(first) = results.values().next() {
        for (alg, s) in &first.individual_scores {
            individual.push_str(&format!("{alg},{s}\n"));
        }
    }
    write_out(&a.output.out, "trajectory.csv", &trajectory)?;
    write_out(&a.output.out, "individual_scores.csv", &individual)?;
    Ok(a.output.clone())
}

fn ensemble_apply(a: &EnsembleApplyArgs, manifest: &mut RunManifest) -> Result<Output, CliError> {
    let text =
        fs::read_to_string(&a.spec).map_err(|e| CliError::Data(format!("{}: {e}", a.spec.display())))?;
    manifest.input("spec", &a.spec)?;
    let spec = parse_spec_file(&text).map_err(|e| CliError::Data(format!("{}: {e}", a.spec.display())))?;
    let selector = match a.regime.as_deref() {
        None => spec.selector,
        Some("auto") => match spec.selector {
            RegimeSelector::Manual(_) => RegimeSelector::default(),
            auto => auto,
        },
        Some(other) => RegimeSelector::Manual(
            other
                .parse()
                .map_err(|e: crate::ensemble::EnsembleError| CliError::Usage(e.to_string()))?,
        ),
    };
    manifest.set("selector", format!("{selector:?}"));
    let bundle = load_preds(&a.preds, manifest)?;

    let ids = spec.all_member_ids();
    let decision = match selector {
        RegimeSelector::Auto { .. } if ids.len() < 2 => RegimeDecision {
            regime: Regime::Familiar,
            mean_similarity: None,
        },
        _ => select_regime(&bundle, &ids, selector).map_err(CliError::data)?,
    };
    let voted = apply_ensemble(&spec, &bundle, decision.regime).map_err(CliError::data)?;
    for (pid, stream) in &voted {
        write_out(
            &a.output.out,
            &format!("ensemble/{pid}.psv"),
            &write_prediction_file(stream),
        )?;
    }
    let mean = decision
        .mean_similarity
        .map_or_else(|| crate::data::MISSING_TOKEN.to_string(), |m| m.to_string());
    write_out(
        &a.output.out,
        "regime.txt",
        &format!(
            "regime={}\nrule={}\nmean_similarity={mean}\n",
            decision.regime,
            spec.rule_for(decision.regime)
        ),
    )?;
    Ok(a.output.clone())
}

fn synth(a: &SynthArgs, config: &ConfigFile, manifest: &mut RunManifest) -> Result<Output, CliError> {
    let s = &config.synth;
    let d = SynthConfig::default();
    let model = AlgorithmModel {
        fp_rate: a.fp_rate.or(s.fp_rate).unwrap_or(0.2),
        fn_rate: a.fn_rate.or(s.fn_rate).unwrap_or(0.2),
        max_lag: a.max_lag.or(s.max_lag).unwrap_or(0),
        rho: a.rho.or(s.rho).unwrap_or(0.0),
    };
    let k = a.algorithms.or(s.algorithms).unwrap_or(5);
    let cfg = SynthConfig {
        patients: a.patients.or(s.patients).unwrap_or(d.patients),
        min_hours: a.min_hours.or(s.min_hours).unwrap_or(d.min_hours),
        max_hours: a.max_hours.or(s.max_hours).unwrap_or(d.max_hours),
        prevalence: a.prevalence.or(s.prevalence).unwrap_or(d.prevalence),
        seed: a.seed.or(s.seed).unwrap_or(d.seed),
        lead: a.lead.or(s.lead).unwrap_or(d.lead),
        ..d
    }
    .with_uniform_algorithms(k, model);
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    manifest.seed = Some(cfg.seed);
    manifest.set("patients", cfg.patients);
    manifest.set("min_hours", cfg.min_hours);
    manifest.set("max_hours", cfg.max_hours);
    manifest.set("prevalence", cfg.prevalence);
    manifest.set("lead", cfg.lead);
    manifest.set("algorithms", k);
    manifest.set("fp_rate", model.fp_rate);
    manifest.set("fn_rate", model.fn_rate);
    manifest.set("max_lag", model.max_lag);
    manifest.set("rho", model.rho);

    let cohort = generate_cohort(&cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    let out = &a.output.out;
    write_patient_dir(&out.join("patients"), &cohort.records).map_err(CliError::data)?;
    if k > 0 {
        let bundle = generate_predictors(&cohort, &cfg).map_err(|e| CliError::Usage(e.to_string()))?;
        write_prediction_dir(&out.join("predictions"), &bundle).map_err(CliError::data)?;
    }
    Ok(a.output.clone())
}

fn stats(a: &StatsArgs, manifest: &mut RunManifest) -> Result<Output, CliError> {
    let variables: Vec<Variable> = if a.variables.is_empty() {
        Variable::all().collect()
    } else {
        a.variables
            .iter()
            .map(|n| Variable::from_name(n).ok_or_else(|| CliError::Usage(format!("unknown variable `{n}`"))))
            .collect::<Result<_, _>>()?
    };
    manifest.set(
        "variables",
        variables.iter().map(|v| v.name()).collect::<Vec<_>>(),
    );
    let mut table = String::from("group,variable,value,fraction\n");
    for spec in &a.records {
        let (group, dir) = match spec.split_once('=') {
            Some((g, d)) if !g.is_empty() => (g.to_string(), Path::new(d)),
            _ => ("all".to_string(), Path::new(spec.as_str())),
        };
        manifest.input(&format!("records:{group}"), dir)?;
        let records = load_records(dir, true)?;
        for &v in &variables {
            for (value, fraction) in empirical_cdf(&records, v) {
                table.push_str(&format!("{group},{},{value},{fraction}\n", v.name()));
            }
        }
    }
    write_out(&a.output.out, "cdf.csv", &table)?;
    Ok(a.output.clone())
}
