use std::fmt;
use std::str::FromStr;

use super::error::FormatError;
use super::events::EventTimeline;
use super::variables::Variable;
use super::{parse_number, Hour, MISSING_TOKEN};

/// Records are cut to two weeks of hourly rows.
pub const MAX_HOURS: usize = 14 * 24;

/// Name of the optional per-hour reference label column found in
/// distributed training files.
pub const LABEL_COLUMN: &str = "SepsisLabel";

/// Hospital system a record came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Hospital {
    A,
    B,
    C,
    Other(String),
    #[default]
    Unknown,
}

impl fmt::Display for Hospital {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hospital::A => f.write_str("A"),
            Hospital::B => f.write_str("B"),
            Hospital::C => f.write_str("C"),
            Hospital::Other(name) => f.write_str(name),
            Hospital::Unknown => f.write_str("unknown"),
        }
    }
}

impl FromStr for Hospital {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "A" | "a" => Hospital::A,
            "B" | "b" => Hospital::B,
            "C" | "c" => Hospital::C,
            "" | "unknown" => Hospital::Unknown,
            other => Hospital::Other(other.to_string()),
        })
    }
}

/// One hour of measurements. Missing values stay missing.
#[derive(Debug, Clone, PartialEq)]
pub struct HourRow {
    values: [Option<f64>; Variable::COUNT],
}

impl Default for HourRow {
    fn default() -> Self {
        HourRow {
            values: [None; Variable::COUNT],
        }
    }
}

impl HourRow {
    pub fn get(&self, variable: Variable) -> Option<f64> {
        self.values[variable.index()]
    }

    pub fn set(&mut self, variable: Variable, value: Option<f64>) {
        self.values[variable.index()] = value;
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    fn validate(&self) -> Result<(), String> {
        for flag in [Variable::GENDER, Variable::UNIT1, Variable::UNIT2] {
            if let Some(v) = self.get(flag) {
                if v != 0.0 && v != 1.0 {
                    return Err(format!("{flag} must be 0 or 1, found {v}"));
                }
            }
        }
        if let Some(age) = self.get(Variable::AGE) {
            if age < 0.0 {
                return Err(format!("Age must be non-negative, found {age}"));
            }
        }
        if let Some(los) = self.get(Variable::ICULOS) {
            if los < 1.0 || los.fract() != 0.0 {
                return Err(format!("ICULOS must be a whole number >= 1, found {los}"));
            }
        }
        Ok(())
    }
}

/// One ICU stay.
#[derive(Debug, Clone, PartialEq)]
pub struct PatientRecord {
    pub patient_id: String,
    pub hospital: Hospital,
    /// ICULOS of the first row; row `i` is hour `first_hour + i`.
    pub first_hour: Hour,
    pub hours: Vec<HourRow>,
    /// Columns present in the source header, in file order.
    pub columns: Vec<Variable>,
    /// Per-hour reference labels when the source carried a `SepsisLabel` column.
    pub reference_labels: Option<Vec<bool>>,
    pub events: EventTimeline,
}

impl PatientRecord {
    pub fn len(&self) -> usize {
        self.hours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hours.is_empty()
    }

    pub fn last_hour(&self) -> Hour {
        self.first_hour + self.hours.len() as Hour - 1
    }

    /// Iterates `(hour, row)` pairs on the ICULOS grid.
    pub fn iter_hours(&self) -> impl Iterator<Item = (Hour, &HourRow)> {
        self.hours
            .iter()
            .enumerate()
            .map(move |(i, row)| (self.first_hour + i as Hour, row))
    }

    /// Number of missing cells over the columns present in the source file.
    pub fn missing_cells(&self) -> usize {
        self.hours
            .iter()
            .map(|row| self.columns.iter().filter(|c| row.get(**c).is_none()).count())
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct ParseOptions {
    /// Cut records longer than [`MAX_HOURS`] instead of rejecting them.
    pub truncate: bool,
    pub hospital: Hospital,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            truncate: true,
            hospital: Hospital::Unknown,
        }
    }
}

enum Column {
    Clinical(Variable),
    Label,
}

/// Parses a pipe-separated hourly record. Columns are bound by header name,
/// `NaN` marks a missing value.
pub fn parse_patient_file(
    text: &str,
    patient_id: &str,
    options: &ParseOptions,
) -> Result<PatientRecord, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());

    let (_, header) = lines.next().ok_or(FormatError::MissingHeader)?;
    let mut layout = Vec::new();
    let mut columns = Vec::new();
    let mut has_label = false;
    for name in header.split('|').map(str::trim) {
        if name == LABEL_COLUMN {
            if has_label {
                return Err(FormatError::DuplicateColumn(name.to_string()));
            }
            has_label = true;
            layout.push(Column::Label);
            continue;
        }
        let var = Variable::from_name(name).ok_or_else(|| FormatError::UnknownColumn(name.to_string()))?;
        if columns.contains(&var) {
            return Err(FormatError::DuplicateColumn(name.to_string()));
        }
        columns.push(var);
        layout.push(Column::Clinical(var));
    }

    let mut hours = Vec::new();
    let mut labels = Vec::new();
    let mut first_hour: Option<Hour> = None;
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split('|').collect();
        if fields.len() != layout.len() {
            return Err(FormatError::FieldCount {
                line: line_no,
                expected: layout.len(),
                found: fields.len(),
            });
        }
        let mut row = HourRow::default();
        for (column, token) in layout.iter().zip(&fields) {
            let token = token.trim();
            match column {
                Column::Clinical(var) => {
                    if token == MISSING_TOKEN {
                        continue;
                    }
                    let value = parse_number(token).ok_or_else(|| FormatError::NonNumeric {
                        line: line_no,
                        column: var.name().to_string(),
                        token: token.to_string(),
                    })?;
                    row.set(*var, Some(value));
                }
                Column::Label => match token {
                    "0" => labels.push(false),
                    "1" => labels.push(true),
                    _ => {
                        return Err(FormatError::BadLabel {
                            line: line_no,
                            token: token.to_string(),
                        })
                    }
                },
            }
        }
        row.validate().map_err(|message| FormatError::Invalid {
            line: line_no,
            message,
        })?;

        if columns.contains(&Variable::ICULOS) {
            let hour = row.get(Variable::ICULOS).ok_or_else(|| FormatError::Invalid {
                line: line_no,
                message: "ICULOS is missing".to_string(),
            })? as Hour;
            match first_hour {
                None => first_hour = Some(hour),
                Some(first) => {
                    let expected = first + hours.len() as Hour;
                    if hour != expected {
                        return Err(FormatError::Invalid {
                            line: line_no,
                            message: format!("ICULOS must be contiguous: expected {expected}, found {hour}"),
                        });
                    }
                }
            }
        }
        hours.push(row);
    }

    if hours.is_empty() {
        return Err(FormatError::NoRows);
    }
    if hours.len() > MAX_HOURS {
        if !options.truncate {
            return Err(FormatError::TooLong {
                rows: hours.len(),
                limit: MAX_HOURS,
            });
        }
        hours.truncate(MAX_HOURS);
        labels.truncate(MAX_HOURS);
    }

    Ok(PatientRecord {
        patient_id: patient_id.to_string(),
        hospital: options.hospital.clone(),
        first_hour: first_hour.unwrap_or(1),
        hours,
        columns,
        reference_labels: has_label.then_some(labels),
        events: EventTimeline::default(),
    })
}

/// Writes a record back out in the same layout it was read from.
pub fn write_patient_file(record: &PatientRecord) -> String {
    let mut out = String::new();
    let mut header: Vec<&str> = record.columns.iter().map(|c| c.name()).collect();
    if record.reference_labels.is_some() {
        header.push(LABEL_COLUMN);
    }
    out.push_str(&header.join("|"));
    out.push('\n');
    for (i, row) in record.hours.iter().enumerate() {
        let mut fields: Vec<String> = record
            .columns
            .iter()
            .map(|c| match row.get(*c) {
                Some(v) => format!("{v}"),
                None => MISSING_TOKEN.to_string(),
            })
            .collect();
        if let Some(labels) = &record.reference_labels {
            fields.push(if labels[i] { "1" } else { "0" }.to_string());
        }
        out.push_str(&fields.join("|"));
        out.push('\n');
    }
    out
}
