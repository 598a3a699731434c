use std::fmt;

/// Column abbreviations of the hourly clinical table, in canonical order.
pub const VARIABLE_NAMES: [&str; 40] = [
    "HR",
    "O2Sat",
    "Temp",
    "SBP",
    "MAP",
    "DBP",
    "Resp",
    "EtCO2",
    "BaseExcess",
    "HCO3",
    "FiO2",
    "pH",
    "PaCO2",
    "SaO2",
    "AST",
    "BUN",
    "Alkalinephos",
    "Calcium",
    "Chloride",
    "Creatinine",
    "Bilirubin-direct",
    "Glucose",
    "Lactate",
    "Magnesium",
    "Phosphate",
    "Potassium",
    "Bilirubin-total",
    "TroponinI",
    "Hct",
    "Hgb",
    "PTT",
    "WBC",
    "Fibrinogen",
    "Platelets",
    "Age",
    "Gender",
    "Unit1",
    "Unit2",
    "HospAdmTime",
    "ICULOS",
];

/// Units for each entry of [`VARIABLE_NAMES`].
pub const VARIABLE_UNITS: [&str; 40] = [
    "beats per minute",
    "%",
    "deg C",
    "mm Hg",
    "mm Hg",
    "mm Hg",
    "breaths per minute",
    "mm Hg",
    "mmol/L",
    "mmol/L",
    "%",
    "",
    "mm Hg",
    "%",
    "IU/L",
    "mg/dL",
    "IU/L",
    "mg/dL",
    "mmol/L",
    "mg/dL",
    "mg/dL",
    "mg/dL",
    "mg/dL",
    "mmol/dL",
    "mg/dL",
    "mmol/L",
    "mg/dL",
    "ng/mL",
    "%",
    "g/dL",
    "seconds",
    "count/L",
    "mg/dL",
    "count/mL",
    "years",
    "",
    "",
    "",
    "hours",
    "hours",
];

/// One of the 40 hourly clinical variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(usize);

impl Variable {
    pub const HR: Variable = Variable(0);
    pub const O2_SAT: Variable = Variable(1);
    pub const TEMP: Variable = Variable(2);
    pub const SBP: Variable = Variable(3);
    pub const MAP: Variable = Variable(4);
    pub const RESP: Variable = Variable(6);
    pub const AGE: Variable = Variable(34);
    pub const GENDER: Variable = Variable(35);
    pub const UNIT1: Variable = Variable(36);
    pub const UNIT2: Variable = Variable(37);
    pub const HOSP_ADM_TIME: Variable = Variable(38);
    pub const ICULOS: Variable = Variable(39);

    pub const COUNT: usize = VARIABLE_NAMES.len();

    /// Looks up a column abbreviation.
    ///
    /// The underscore spellings `Bilirubin_direct` / `Bilirubin_total` found
    /// in distributed files are accepted as aliases.
    pub fn from_name(name: &str) -> Option<Variable> {
        let name = match name {
            "Bilirubin_direct" => "Bilirubin-direct",
            "Bilirubin_total" => "Bilirubin-total",
            other => other,
        };
        VARIABLE_NAMES.iter().position(|n| *n == name).map(Variable)
    }

    pub fn from_index(index: usize) -> Option<Variable> {
        (index < Self::COUNT).then_some(Variable(index))
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn name(self) -> &'static str {
        VARIABLE_NAMES[self.0]
    }

    pub fn unit(self) -> &'static str {
        VARIABLE_UNITS[self.0]
    }

    pub fn all() -> impl Iterator<Item = Variable> {
        (0..Self::COUNT).map(Variable)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
