//! Specimen test records.

use serde::{Deserialize, Serialize};

use crate::error::{read_to_string, Error, Result};

/// Column order of the dataset CSV.
pub const DATASET_CSV_HEADER: [&str; 5] = ["profile_id", "eps_a", "temp_C", "n_obs", "censored"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    pub profile_id: String,
    /// Nominal applied strain amplitude.
    pub eps_a: f64,
    #[serde(rename = "temp_C")]
    pub temperature: f64,
    /// Observed cycles to crack initiation, or to runout when censored.
    pub n_obs: f64,
    #[serde(with = "flag")]
    pub censored: bool,
}

mod flag {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(*v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(D::Error::custom(format!("censored must be 0 or 1, got {v}"))),
        }
    }
}

/// Records from one test temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct FatigueDataset {
    records: Vec<TestRecord>,
}

impl FatigueDataset {
    pub fn new(records: Vec<TestRecord>) -> Result<Self> {
        let Some(first) = records.first() else {
            return Err(Error::invalid("dataset has no records"));
        };
        let t0 = first.temperature;
        for (i, r) in records.iter().enumerate() {
            let row = i + 1;
            if !(r.eps_a > 0.0) || !r.eps_a.is_finite() {
                return Err(Error::invalid(format!(
                    "record {row}: eps_a must be positive, got {}",
                    r.eps_a
                )));
            }
            if !(r.n_obs > 0.0) || !r.n_obs.is_finite() {
                return Err(Error::invalid(format!(
                    "record {row}: n_obs must be positive, got {}",
                    r.n_obs
                )));
            }
            if r.temperature != t0 {
                return Err(Error::invalid(format!(
                    "record {row}: temperature {} differs from {t0}; fit one test temperature at a time",
                    r.temperature
                )));
            }
            if r.profile_id.is_empty() {
                return Err(Error::invalid(format!("record {row}: empty profile id")));
            }
        }
        Ok(FatigueDataset { records })
    }

    pub fn records(&self) -> &[TestRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn temperature(&self) -> f64 {
        self.records[0].temperature
    }

    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.censored).count()
    }

    /// Smallest and largest applied strain.
    pub fn strain_range(&self) -> (f64, f64) {
        self.records
            .iter()
            .fold((f64::INFINITY, 0.0), |(lo, hi), r| (lo.min(r.eps_a), hi.max(r.eps_a)))
    }

    pub fn from_csv_reader(file: &str, reader: impl std::io::Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let parse_err = |context: String| Error::Parse {
            file: file.to_string(),
            context,
        };
        let headers = rdr.headers().map_err(|e| parse_err(e.to_string()))?.clone();
        if headers.iter().ne(DATASET_CSV_HEADER) {
            return Err(parse_err(format!(
                "header must be `{}`, got `{}`",
                DATASET_CSV_HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut records = Vec::new();
        for row in rdr.deserialize() {
            records.push(row.map_err(|e: csv::Error| parse_err(e.to_string()))?);
        }
        FatigueDataset::new(records)
    }

    pub fn from_csv_str(file: &str, text: &str) -> Result<Self> {
        FatigueDataset::from_csv_reader(file, text.as_bytes())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        FatigueDataset::from_csv_str(&path.display().to_string(), &read_to_string(path)?)
    }

    pub fn write_csv(&self, out: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::invalid(format!("writing dataset: {e}"));
        for r in &self.records {
            w.serialize(r).map_err(io)?;
        }
        w.flush().map_err(|e| Error::invalid(format!("writing dataset: {e}")))
    }
}
