//! Directory layouts on disk.
//!
//! * patient directory: `<id>.psv` hourly records with optional `<id>.evt.psv`
//!   event sidecars.
//! * prediction directory: `<algorithm>/<patient>.psv`, one subdirectory per
//!   algorithm.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::error::LoadError;
use super::events::{parse_event_file, write_event_file};
use super::patient::{parse_patient_file, write_patient_file, ParseOptions, PatientRecord};
use super::prediction::{parse_prediction_file, write_prediction_file, PredictionBundle};

pub const RECORD_SUFFIX: &str = ".psv";
pub const EVENT_SUFFIX: &str = ".evt.psv";

pub(crate) fn read_to_string(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|e| LoadError::io(path, e))
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>, LoadError> {
    let mut entries = fs::read_dir(dir)
        .map_err(|e| LoadError::io(dir, e))?
        .map(|entry| entry.map(|e| e.path()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| LoadError::io(dir, e))?;
    entries.sort();
    Ok(entries)
}

fn file_name(path: &Path) -> &str {
    path.file_name().and_then(|n| n.to_str()).unwrap_or("")
}

/// Patient ids present in a directory (files ending `.psv` that are not sidecars).
pub fn list_patient_ids(dir: &Path) -> Result<Vec<String>, LoadError> {
    Ok(sorted_entries(dir)?
        .iter()
        .filter(|p| p.is_file())
        .map(|p| file_name(p))
        .filter(|n| n.ends_with(RECORD_SUFFIX) && !n.ends_with(EVENT_SUFFIX))
        .map(|n| n.trim_end_matches(RECORD_SUFFIX).to_string())
        .collect())
}

/// Reads one record and, when present, its event sidecar.
pub fn load_patient(
    dir: &Path,
    patient_id: &str,
    options: &ParseOptions,
) -> Result<PatientRecord, LoadError> {
    let path = dir.join(format!("{patient_id}{RECORD_SUFFIX}"));
    let text = read_to_string(&path)?;
    let mut record =
        parse_patient_file(&text, patient_id, options).map_err(|e| LoadError::format(&path, e))?;
    let evt_path = dir.join(format!("{patient_id}{EVENT_SUFFIX}"));
    if evt_path.exists() {
        let text = read_to_string(&evt_path)?;
        record.events = parse_event_file(&text).map_err(|e| LoadError::format(&evt_path, e))?;
    }
    Ok(record)
}

/// Loads every record in a directory, sorted by patient id. Files are parsed
/// in parallel.
pub fn load_patient_dir(dir: &Path, options: &ParseOptions) -> Result<Vec<PatientRecord>, LoadError> {
    let ids = list_patient_ids(dir)?;
    if ids.is_empty() {
        return Err(LoadError::Layout {
            path: dir.to_path_buf(),
            message: "no .psv patient records found".to_string(),
        });
    }
    ids.par_iter().map(|id| load_patient(dir, id, options)).collect()
}

pub fn write_patient_dir(dir: &Path, records: &[PatientRecord]) -> Result<(), LoadError> {
    fs::create_dir_all(dir).map_err(|e| LoadError::io(dir, e))?;
    for rec in records {
        let path = dir.join(format!("{}{RECORD_SUFFIX}", rec.patient_id));
        fs::write(&path, write_patient_file(rec)).map_err(|e| LoadError::io(&path, e))?;
        let evt = dir.join(format!("{}{EVENT_SUFFIX}", rec.patient_id));
        fs::write(&evt, write_event_file(&rec.events)).map_err(|e| LoadError::io(&evt, e))?;
    }
    Ok(())
}

/// Loads `<dir>/<algorithm>/<patient>.psv` for every algorithm subdirectory.
pub fn load_prediction_dir(dir: &Path) -> Result<PredictionBundle, LoadError> {
    let algorithms: Vec<PathBuf> = sorted_entries(dir)?.into_iter().filter(|p| p.is_dir()).collect();
    if algorithms.is_empty() {
        return Err(LoadError::Layout {
            path: dir.to_path_buf(),
            message: "no algorithm subdirectories found".to_string(),
        });
    }
    let mut jobs = Vec::new();
    for alg_dir in &algorithms {
        let alg = file_name(alg_dir).to_string();
        for pid in list_patient_ids(alg_dir)? {
            jobs.push((alg.clone(), pid, alg_dir.clone()));
        }
    }
    let streams = jobs
        .par_iter()
        .map(|(alg, pid, alg_dir)| {
            let path = alg_dir.join(format!("{pid}{RECORD_SUFFIX}"));
            let text = read_to_string(&path)?;
            parse_prediction_file(&text, alg, pid).map_err(|e| LoadError::format(&path, e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut bundle = PredictionBundle::new();
    for s in streams {
        bundle.insert(s);
    }
    Ok(bundle)
}

pub fn write_prediction_dir(dir: &Path, bundle: &PredictionBundle) -> Result<(), LoadError> {
    for alg in bundle.algorithms() {
        let alg_dir = dir.join(alg);
        fs::create_dir_all(&alg_dir).map_err(|e| LoadError::io(&alg_dir, e))?;
        for stream in bundle.streams_for(alg) {
            let path = alg_dir.join(format!("{}{RECORD_SUFFIX}", stream.patient_id));
            fs::write(&path, write_prediction_file(stream)).map_err(|e| LoadError::io(&path, e))?;
        }
    }
    Ok(())
}
