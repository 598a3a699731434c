//! Text form of an [`EnsembleSpec`].
//!
//! ```text
//! alg_03|2
//! alg_07|1
//! member|unfamiliar|alg_03|1
//! rule|familiar|threshold:0.5
//! rule|unfamiliar|all-but-one
//! selector|auto|0.8
//! ```
//!
//! Two-field lines are `algorithm_id|weight`. Longer lines start with a
//! keyword. `#` starts a comment line.

use std::collections::BTreeMap;

use super::{EnsembleError, EnsembleSpec, Members, Regime, RegimeSelector, VoteRule};

fn bad(line: usize, message: impl Into<String>) -> EnsembleError {
    EnsembleError::SpecFormat {
        line,
        message: message.into(),
    }
}

fn parse_weight(token: &str, line: usize) -> Result<u32, EnsembleError> {
    match token.parse::<u32>() {
        Ok(w) if w > 0 => Ok(w),
        _ => Err(bad(
            line,
            format!("weight must be a positive integer, found `{token}`"),
        )),
    }
}

pub fn parse_spec_file(text: &str) -> Result<EnsembleSpec, EnsembleError> {
    let mut spec = EnsembleSpec::new(Members::new());
    let mut regime_members: BTreeMap<Regime, Members> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        match fields.as_slice() {
            [id, weight] => {
                if id.is_empty() {
                    return Err(bad(line_no, "empty algorithm id"));
                }
                let w = parse_weight(weight, line_no)?;
                *spec.members.entry(id.to_string()).or_insert(0) += w;
            }
            ["member", regime, id, weight] => {
                let regime: Regime = regime
                    .parse()
                    .map_err(|e: EnsembleError| bad(line_no, e.to_string()))?;
                let w = parse_weight(weight, line_no)?;
                *regime_members
                    .entry(regime)
                    .or_default()
                    .entry(id.to_string())
                    .or_insert(0) += w;
            }
            ["rule", regime, rule] => {
                let regime: Regime = regime
                    .parse()
                    .map_err(|e: EnsembleError| bad(line_no, e.to_string()))?;
                let rule: VoteRule = rule
                    .parse()
                    .map_err(|e: EnsembleError| bad(line_no, e.to_string()))?;
                spec.rules.insert(regime, rule);
            }
            ["selector", "auto", tau] => {
                let tau = tau
                    .parse::<f64>()
                    .ok()
                    .filter(|t| t.is_finite())
                    .ok_or_else(|| bad(line_no, format!("bad threshold `{tau}`")))?;
                spec.selector = RegimeSelector::Auto { tau };
            }
            ["selector", "manual", regime] => {
                let regime: Regime = regime
                    .parse()
                    .map_err(|e: EnsembleError| bad(line_no, e.to_string()))?;
                spec.selector = RegimeSelector::Manual(regime);
            }
            _ => return Err(bad(line_no, format!("unrecognized line `{line}`"))),
        }
    }
    spec.regime_members = regime_members;
    spec.validate()?;
    Ok(spec)
}

pub fn write_spec_file(spec: &EnsembleSpec) -> String {
    let mut out = String::new();
    for (id, w) in &spec.members {
        out.push_str(&format!("{id}|{w}\n"));
    }
    for (regime, members) in &spec.regime_members {
        for (id, w) in members {
            out.push_str(&format!("member|{regime}|{id}|{w}\n"));
        }
    }
    for regime in Regime::ALL {
        out.push_str(&format!("rule|{regime}|{}\n", spec.rule_for(regime)));
    }
    match spec.selector {
        RegimeSelector::Auto { tau } => out.push_str(&format!("selector|auto|{tau}\n")),
        RegimeSelector::Manual(regime) => out.push_str(&format!("selector|manual|{regime}\n")),
    }
    out
}
