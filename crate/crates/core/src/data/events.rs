use super::error::FormatError;
use super::Hour;

/// Antibiotic administrations, blood cultures and SOFA scores for one stay,
/// all on the ICULOS hour grid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventTimeline {
    /// `(start, end)` hours of each continuous IV antibiotic course.
    pub iv_antibiotic_intervals: Vec<(Hour, Hour)>,
    pub culture_hours: Vec<Hour>,
    /// `(hour, score)`, sorted by hour.
    pub sofa_series: Vec<(Hour, i32)>,
}

impl EventTimeline {
    pub fn is_empty(&self) -> bool {
        self.iv_antibiotic_intervals.is_empty()
            && self.culture_hours.is_empty()
            && self.sofa_series.is_empty()
    }

    /// Checks interval ordering and non-negative hours; sorts the SOFA series.
    pub fn validated(mut self) -> Result<Self, String> {
        for &(start, end) in &self.iv_antibiotic_intervals {
            if start < 0 || end < 0 {
                return Err(format!("negative antibiotic hour ({start}, {end})"));
            }
            if start > end {
                return Err(format!(
                    "antibiotic interval starts after it ends ({start}, {end})"
                ));
            }
        }
        if let Some(h) = self.culture_hours.iter().find(|h| **h < 0) {
            return Err(format!("negative culture hour {h}"));
        }
        if let Some((h, _)) = self.sofa_series.iter().find(|(h, _)| *h < 0) {
            return Err(format!("negative SOFA hour {h}"));
        }
        self.sofa_series.sort_by_key(|(h, _)| *h);
        Ok(self)
    }
}

fn parse_hour(token: &str, line: usize) -> Result<Hour, FormatError> {
    token.trim().parse::<Hour>().map_err(|_| FormatError::Invalid {
        line,
        message: format!("expected a whole hour, found `{token}`"),
    })
}

/// Parses an event sidecar: `abx|start|end`, `culture|hour|`, `sofa|hour|score`.
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_event_file(text: &str) -> Result<EventTimeline, FormatError> {
    let mut events = EventTimeline::default();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        let kind = fields[0];
        let field = |idx: usize| -> Result<&str, FormatError> {
            fields
                .get(idx)
                .copied()
                .filter(|f| !f.is_empty())
                .ok_or(FormatError::FieldCount {
                    line: line_no,
                    expected: 3,
                    found: fields.len(),
                })
        };
        match kind {
            "abx" => {
                let start = parse_hour(field(1)?, line_no)?;
                let end = parse_hour(field(2)?, line_no)?;
                events.iv_antibiotic_intervals.push((start, end));
            }
            "culture" => {
                if fields.len() > 3 || fields.get(2).is_some_and(|f| !f.is_empty()) {
                    return Err(FormatError::Invalid {
                        line: line_no,
                        message: "culture lines take a single hour".to_string(),
                    });
                }
                events.culture_hours.push(parse_hour(field(1)?, line_no)?);
            }
            "sofa" => {
                let hour = parse_hour(field(1)?, line_no)?;
                let score = field(2)?.parse::<i32>().map_err(|_| FormatError::Invalid {
                    line: line_no,
                    message: format!("SOFA score must be an integer, found `{}`", fields[2]),
                })?;
                events.sofa_series.push((hour, score));
            }
            other => {
                return Err(FormatError::UnknownEvent {
                    line: line_no,
                    kind: other.to_string(),
                })
            }
        }
        if fields.len() > 3 {
            return Err(FormatError::FieldCount {
                line: line_no,
                expected: 3,
                found: fields.len(),
            });
        }
    }
    events
        .validated()
        .map_err(|message| FormatError::Invalid { line: 0, message })
}

pub fn write_event_file(events: &EventTimeline) -> String {
    let mut out = String::new();
    for (start, end) in &events.iv_antibiotic_intervals {
        out.push_str(&format!("abx|{start}|{end}\n"));
    }
    for hour in &events.culture_hours {
        out.push_str(&format!("culture|{hour}|\n"));
    }
    for (hour, score) in &events.sofa_series {
        out.push_str(&format!("sofa|{hour}|{score}\n"));
    }
    out
}
