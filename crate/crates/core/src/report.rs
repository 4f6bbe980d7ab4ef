use std::time::Duration;

use serde::Serialize;

/// Row counts of one Fourier-Motzkin round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundStats {
    pub variable: String,
    pub rows_in: usize,
    pub positive: usize,
    pub negative: usize,
    /// `(rows_in - positive - negative) + positive * negative`.
    pub generated: usize,
    pub rows_out: usize,
}

/// Statistics of one elimination run, in the shape of a results table row.
#[derive(Clone, Debug, Serialize)]
pub struct EliminationReport {
    pub method: &'static str,
    pub constraint_count: usize,
    pub aux_var_count: usize,
    /// Hilbert basis size, or the number of raw output rows for FME.
    pub basis_element_count: usize,
    /// Filled in once redundancy removal has run.
    pub non_redundant_count: Option<usize>,
    pub trivial_dropped: usize,
    #[serde(serialize_with = "seconds")]
    pub elapsed: Duration,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rounds: Vec<RoundStats>,
}

fn seconds<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl EliminationReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// `name,constraints,aux_vars,basis_or_raw_rows,non_redundant,seconds`
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{:.3}",
            self.method,
            self.constraint_count,
            self.aux_var_count,
            self.basis_element_count,
            self.non_redundant_count.map_or_else(String::new, |n| n.to_string()),
            self.elapsed.as_secs_f64()
        )
    }
}
