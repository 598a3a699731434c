use super::patient::PatientRecord;
use super::variables::Variable;

/// Pooled empirical CDF of one variable over every non-missing hourly value
/// in the cohort. Returns `(value, cumulative fraction)` at each distinct
/// value, ascending; empty when the variable is never observed.
pub fn empirical_cdf<'a, I>(cohort: I, variable: Variable) -> Vec<(f64, f64)>
where
    I: IntoIterator<Item = &'a PatientRecord>,
{
    let mut values: Vec<f64> = cohort
        .into_iter()
        .flat_map(|rec| rec.hours.iter().filter_map(move |row| row.get(variable)))
        .collect();
    if values.is_empty() {
        return Vec::new();
    }
    values.sort_by(f64::total_cmp);

    let n = values.len() as f64;
    let mut steps: Vec<(f64, f64)> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        let fraction = (i + 1) as f64 / n;
        match steps.last_mut() {
            Some(last) if last.0 == *v => last.1 = fraction,
            _ => steps.push((*v, fraction)),
        }
    }
    if let Some(last) = steps.last_mut() {
        last.1 = 1.0;
    }
    steps
}
