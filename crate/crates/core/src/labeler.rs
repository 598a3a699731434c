//! Sepsis onset labeling from antibiotic, culture and SOFA event timelines,
//! plus the cohort inclusion rules.

use std::collections::VecDeque;
use std::fmt;

use crate::data::{EventTimeline, Hour, PatientRecord};

/// Minimum length of an IV antibiotic course for it to count toward suspicion.
pub const MIN_ANTIBIOTIC_HOURS: Hour = 72;
/// Antibiotics first: the culture must follow within this many hours.
pub const CULTURE_AFTER_ANTIBIOTIC_HOURS: Hour = 24;
/// Culture first: antibiotics must start within this many hours.
pub const ANTIBIOTIC_AFTER_CULTURE_HOURS: Hour = 72;
/// SOFA rise that marks organ failure, and the window it must occur in.
pub const SOFA_INCREASE: i32 = 2;
pub const SOFA_WINDOW_HOURS: Hour = 24;
/// t_SOFA may precede t_suspicion by at most this many hours...
pub const SOFA_BEFORE_SUSPICION_HOURS: Hour = 24;
/// ...and follow it by at most this many.
pub const SOFA_AFTER_SUSPICION_HOURS: Hour = 12;
/// Records shorter than this are excluded.
pub const MIN_RECORD_HOURS: usize = 8;
/// Records with onset before this hour are excluded.
pub const MIN_ONSET_HOUR: Hour = 4;
pub const DEFAULT_LEAD_HOURS: Hour = 6;

/// Onset times and the hourly label vector for one record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelTimeline {
    pub patient_id: String,
    /// Hour of `labels[0]`.
    pub first_hour: Hour,
    pub t_suspicion: Option<Hour>,
    pub t_sofa: Option<Hour>,
    pub t_sepsis: Option<Hour>,
    pub labels: Vec<bool>,
    /// An antibiotic course shorter than the minimum ran to the end of the
    /// record and would otherwise have produced a suspicion time.
    pub short_terminal_course: bool,
}

impl LabelTimeline {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_septic(&self) -> bool {
        self.t_sepsis.is_some()
    }

    pub fn hours(&self) -> impl Iterator<Item = Hour> + '_ {
        (0..self.labels.len() as Hour).map(move |i| self.first_hour + i)
    }

    pub fn inclusion(&self) -> Inclusion {
        inclusion(self.labels.len(), self.t_sepsis)
    }
}

/// Earliest qualifying time among antibiotic/culture pairs, given a
/// predicate on the course duration.
fn earliest_pair(events: &EventTimeline, course_ok: impl Fn(Hour) -> bool) -> Option<Hour> {
    let mut best: Option<Hour> = None;
    for &(start, end) in &events.iv_antibiotic_intervals {
        if !course_ok(end - start) {
            continue;
        }
        for &culture in &events.culture_hours {
            let candidate = if start <= culture {
                (culture - start <= CULTURE_AFTER_ANTIBIOTIC_HOURS).then_some(start)
            } else {
                (start - culture <= ANTIBIOTIC_AFTER_CULTURE_HOURS).then_some(culture)
            };
            if let Some(t) = candidate {
                best = Some(best.map_or(t, |b| b.min(t)));
            }
        }
    }
    best
}

/// Time of clinical suspicion of infection: the earlier event of the first
/// antibiotic/culture pair that satisfies the ordering windows, where the
/// antibiotic course lasts at least 72 hours. Each interval is one
/// continuous course; intervals are not merged.
pub fn suspicion_time(events: &EventTimeline) -> Option<Hour> {
    earliest_pair(events, |duration| duration >= MIN_ANTIBIOTIC_HOURS)
}

/// True when only a too-short course that runs to (or past) `last_hour`
/// stands between this timeline and a suspicion time.
pub fn has_short_terminal_course(events: &EventTimeline, last_hour: Hour) -> bool {
    if suspicion_time(events).is_some() {
        return false;
    }
    let terminal = EventTimeline {
        iv_antibiotic_intervals: events
            .iv_antibiotic_intervals
            .iter()
            .copied()
            .filter(|&(s, e)| e - s < MIN_ANTIBIOTIC_HOURS && e >= last_hour)
            .collect(),
        ..events.clone()
    };
    earliest_pair(&terminal, |_| true).is_some()
}

/// Earliest SOFA observation that sits at least two points above the minimum
/// score observed in the preceding 24 hours (inclusive).
pub fn sofa_time(events: &EventTimeline) -> Option<Hour> {
    let series = &events.sofa_series;
    // Indices into `series` with increasing scores; front is the window minimum.
    let mut window: VecDeque<usize> = VecDeque::new();
    for (i, &(hour, score)) in series.iter().enumerate() {
        while window.back().is_some_and(|&j| series[j].1 >= score) {
            window.pop_back();
        }
        window.push_back(i);
        while window
            .front()
            .is_some_and(|&j| series[j].0 < hour - SOFA_WINDOW_HOURS)
        {
            window.pop_front();
        }
        let min = series[*window.front().expect("window holds i")].1;
        if score - min >= SOFA_INCREASE {
            return Some(hour);
        }
    }
    None
}

/// Sepsis onset: the earlier of the two times, provided t_SOFA falls between
/// 24 hours before and 12 hours after t_suspicion.
pub fn sepsis_onset(t_suspicion: Option<Hour>, t_sofa: Option<Hour>) -> Option<Hour> {
    let (susp, sofa) = (t_suspicion?, t_sofa?);
    let in_window = sofa >= susp - SOFA_BEFORE_SUSPICION_HOURS && sofa <= susp + SOFA_AFTER_SUSPICION_HOURS;
    in_window.then(|| susp.min(sofa))
}

/// Hour `h` is positive iff `h >= t_sepsis - lead`.
pub fn hourly_labels(first_hour: Hour, len: usize, t_sepsis: Option<Hour>, lead: Hour) -> Vec<bool> {
    assert!(lead >= 0, "lead must be non-negative");
    match t_sepsis {
        None => vec![false; len],
        Some(onset) => (0..len as Hour).map(|i| first_hour + i >= onset - lead).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inclusion {
    Included,
    TooShort,
    EarlyOnset,
}

impl fmt::Display for Inclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Inclusion::Included => "included",
            Inclusion::TooShort => "fewer-than-8-hours",
            Inclusion::EarlyOnset => "onset-before-hour-4",
        })
    }
}

pub fn inclusion(len: usize, t_sepsis: Option<Hour>) -> Inclusion {
    if len < MIN_RECORD_HOURS {
        Inclusion::TooShort
    } else if t_sepsis.is_some_and(|t| t < MIN_ONSET_HOUR) {
        Inclusion::EarlyOnset
    } else {
        Inclusion::Included
    }
}

pub fn include_record(record: &PatientRecord, t_sepsis: Option<Hour>) -> bool {
    inclusion(record.len(), t_sepsis) == Inclusion::Included
}

/// Runs every labeling step on one record.
pub fn label_record(record: &PatientRecord, lead: Hour) -> LabelTimeline {
    let t_suspicion = suspicion_time(&record.events);
    let t_sofa = sofa_time(&record.events);
    let t_sepsis = sepsis_onset(t_suspicion, t_sofa);
    LabelTimeline {
        patient_id: record.patient_id.clone(),
        first_hour: record.first_hour,
        t_suspicion,
        t_sofa,
        t_sepsis,
        labels: hourly_labels(record.first_hour, record.len(), t_sepsis, lead),
        short_terminal_course: has_short_terminal_course(&record.events, record.last_hour()),
    }
}

/// Counts for a labeled cohort.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelSummary {
    pub total: usize,
    pub included: usize,
    pub included_septic: usize,
    pub excluded_too_short: usize,
    pub excluded_early_onset: usize,
    pub short_terminal_course: usize,
}

impl LabelSummary {
    pub fn from_timelines<'a>(timelines: impl IntoIterator<Item = &'a LabelTimeline>) -> Self {
        let mut s = LabelSummary::default();
        for t in timelines {
            s.total += 1;
            match t.inclusion() {
                Inclusion::Included => {
                    s.included += 1;
                    if t.is_septic() {
                        s.included_septic += 1;
                    }
                }
                Inclusion::TooShort => s.excluded_too_short += 1,
                Inclusion::EarlyOnset => s.excluded_early_onset += 1,
            }
            if t.short_terminal_course {
                s.short_terminal_course += 1;
            }
        }
        s
    }
}
