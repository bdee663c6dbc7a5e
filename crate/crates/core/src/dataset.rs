//! Project records in the ISBSG-style schema and the preprocessing pipeline:
//! CSV ingestion, case filtering, mean/mode imputation, min-max
//! normalization, seeded train/test splitting and synthetic data.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Column names, in file order.
pub const CSV_HEADER: [&str; 12] = [
    "project_id",
    "function_points",
    "max_team_size",
    "ub_business_units",
    "ub_locations",
    "ub_concurrent_users",
    "development_platform",
    "work_effort",
    "data_quality_rating",
    "ufp_rating",
    "resource_level",
    "development_type",
];

/// 74 training projects out of 151.
pub const DEFAULT_TRAIN_FRACTION: f64 = 74.0 / 151.0;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("header mismatch: expected {expected:?}, found {found:?}")]
    Header { expected: Vec<String>, found: Vec<String> },
    #[error("{} invalid row(s):\n{}", .0.len(), join_lines(.0))]
    Rows(Vec<RowError>),
    #[error("duplicate project id {0:?}")]
    DuplicateId(String),
    #[error("record {project_id}: {reason}")]
    InvalidRecord { project_id: String, reason: String },
    #[error("feature {0} has no present value to impute from")]
    FeatureAllMissing(&'static str),
    #[error("record {project_id} is missing {field}")]
    Incomplete { project_id: String, field: &'static str },
    #[error("cannot normalize with an empty training set")]
    EmptyTrain,
    #[error("train fraction {0} must lie strictly between 0 and 1")]
    InvalidFraction(f64),
    #[error("split of {records} record(s) at fraction {fraction} leaves one side empty")]
    DegenerateSplit { records: usize, fraction: f64 },
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
}

fn join_lines(rows: &[RowError]) -> String {
    rows.iter().map(|r| format!("  {r}")).collect::<Vec<_>>().join("\n")
}

/// A rejected CSV row. `line` is the 1-based line in the file (header = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct RowError {
    pub line: u64,
    pub column: String,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

macro_rules! nominal {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(format!(
                        "invalid value {:?} (expected one of {})",
                        other,
                        [$($text),+].join(", ")
                    )),
                }
            }
        }
    };
}

nominal!(
    /// Primary development platform.
    Platform { Pc => "PC", MidRange => "MidRange", MainFrame => "MainFrame" }
);
nominal!(
    /// ISBSG rating code, used for both data quality and UFP integrity.
    Rating { A => "A", B => "B", C => "C", D => "D" }
);
nominal!(
    DevelopmentType {
        NewDevelopment => "NewDevelopment",
        Enhancement => "Enhancement",
        Redevelopment => "Redevelopment",
    }
);

impl Rating {
    pub fn is_high(self) -> bool {
        matches!(self, Rating::A | Rating::B)
    }
}

/// ISBSG resource level, 1 through 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResourceLevel(u8);

impl ResourceLevel {
    pub fn new(level: u8) -> Option<Self> {
        (1..=4).contains(&level).then_some(Self(level))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Levels 1 and 2 count development team effort and support only.
    pub fn is_team_effort(self) -> bool {
        self.0 <= 2
    }
}

impl fmt::Display for ResourceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Input attributes used for estimation, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Feature {
    FunctionPoints,
    MaxTeamSize,
    UbBusinessUnits,
    UbLocations,
    UbConcurrentUsers,
    DevelopmentPlatform,
}

impl Feature {
    pub const ALL: [Feature; 6] = [
        Feature::FunctionPoints,
        Feature::MaxTeamSize,
        Feature::UbBusinessUnits,
        Feature::UbLocations,
        Feature::UbConcurrentUsers,
        Feature::DevelopmentPlatform,
    ];

    /// The continuous features; index `i` here is index `i` of
    /// [`ProjectRecord::numeric`] and [`NormalizedRecord::features`].
    pub const NUMERIC: [Feature; 5] = [
        Feature::FunctionPoints,
        Feature::MaxTeamSize,
        Feature::UbBusinessUnits,
        Feature::UbLocations,
        Feature::UbConcurrentUsers,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::FunctionPoints => "function_points",
            Feature::MaxTeamSize => "max_team_size",
            Feature::UbBusinessUnits => "ub_business_units",
            Feature::UbLocations => "ub_locations",
            Feature::UbConcurrentUsers => "ub_concurrent_users",
            Feature::DevelopmentPlatform => "development_platform",
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One software project.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectRecord {
    pub project_id: String,
    pub function_points: Option<f64>,
    pub max_team_size: Option<f64>,
    pub ub_business_units: Option<f64>,
    pub ub_locations: Option<f64>,
    pub ub_concurrent_users: Option<f64>,
    pub development_platform: Option<Platform>,
    /// Total effort in hours over all life-cycle phases.
    pub work_effort: Option<f64>,
    pub data_quality_rating: Rating,
    pub ufp_rating: Rating,
    pub resource_level: ResourceLevel,
    pub development_type: DevelopmentType,
}

impl ProjectRecord {
    /// Numeric features in [`Feature::NUMERIC`] order.
    pub fn numeric(&self) -> [Option<f64>; 5] {
        [
            self.function_points,
            self.max_team_size,
            self.ub_business_units,
            self.ub_locations,
            self.ub_concurrent_users,
        ]
    }

    fn numeric_slot(&mut self, i: usize) -> &mut Option<f64> {
        match i {
            0 => &mut self.function_points,
            1 => &mut self.max_team_size,
            2 => &mut self.ub_business_units,
            3 => &mut self.ub_locations,
            4 => &mut self.ub_concurrent_users,
            _ => panic!("numeric feature index {i} out of range"),
        }
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let invalid = |reason: String| DatasetError::InvalidRecord {
            project_id: self.project_id.clone(),
            reason,
        };
        if self.project_id.is_empty() {
            return Err(invalid("empty project id".into()));
        }
        for (feature, value) in Feature::NUMERIC.iter().zip(self.numeric()) {
            if let Some(v) = value {
                if !v.is_finite() || v < 0.0 {
                    return Err(invalid(format!("{feature} must be finite and >= 0, got {v}")));
                }
            }
        }
        if let Some(e) = self.work_effort {
            if !e.is_finite() || e <= 0.0 {
                return Err(invalid(format!("work_effort must be finite and > 0, got {e}")));
            }
        }
        Ok(())
    }

    /// True when every input feature is present (effort may still be absent).
    pub fn has_all_features(&self) -> bool {
        self.numeric().iter().all(Option::is_some) && self.development_platform.is_some()
    }

    /// Input features that are absent.
    pub fn missing_features(&self) -> Vec<Feature> {
        let mut missing: Vec<Feature> = Feature::NUMERIC
            .iter()
            .zip(self.numeric())
            .filter(|(_, v)| v.is_none())
            .map(|(f, _)| *f)
            .collect();
        if self.development_platform.is_none() {
            missing.push(Feature::DevelopmentPlatform);
        }
        missing
    }
}

/// How a dataset came to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Raw,
    Synthetic,
    Filtered,
    Imputed,
    Split,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Raw => "raw",
            Provenance::Synthetic => "synthetic",
            Provenance::Filtered => "filtered",
            Provenance::Imputed => "imputed",
            Provenance::Split => "split",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<ProjectRecord>,
    provenance: Provenance,
}

impl Dataset {
    /// Validates every record and the uniqueness of ids.
    pub fn new(records: Vec<ProjectRecord>, provenance: Provenance) -> Result<Self, DatasetError> {
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            r.validate()?;
            if !seen.insert(r.project_id.as_str()) {
                return Err(DatasetError::DuplicateId(r.project_id.clone()));
            }
        }
        Ok(Self { records, provenance })
    }

    // Callers guarantee the records came from a valid dataset.
    fn derived(records: Vec<ProjectRecord>, provenance: Provenance) -> Self {
        Self { records, provenance }
    }

    pub fn records(&self) -> &[ProjectRecord] {
        &self.records
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn into_records(self) -> Vec<ProjectRecord> {
        self.records
    }
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset, DatasetError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_csv(file)
}

/// Reads the schema CSV. Every bad row is reported, not just the first.
pub fn read_csv<R: Read>(reader: R) -> Result<Dataset, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let found: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if found != CSV_HEADER {
        return Err(DatasetError::Header {
            expected: CSV_HEADER.iter().map(|s| s.to_string()).collect(),
            found,
        });
    }

    let mut records = Vec::new();
    let mut errors = Vec::new();
    let mut seen = HashSet::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != CSV_HEADER.len() {
            errors.push(RowError {
                line,
                column: "*".into(),
                message: format!("expected {} fields, found {}", CSV_HEADER.len(), row.len()),
            });
            continue;
        }
        match parse_row(&row, line) {
            Ok(rec) => {
                if !seen.insert(rec.project_id.clone()) {
                    errors.push(RowError {
                        line,
                        column: "project_id".into(),
                        message: format!("duplicate id {:?}", rec.project_id),
                    });
                } else {
                    records.push(rec);
                }
            }
            Err(mut errs) => errors.append(&mut errs),
        }
    }
    if !errors.is_empty() {
        return Err(DatasetError::Rows(errors));
    }
    Ok(Dataset::derived(records, Provenance::Raw))
}

fn parse_row(row: &csv::StringRecord, line: u64) -> Result<ProjectRecord, Vec<RowError>> {
    let mut errors = Vec::new();
    let cell = |i: usize| row.get(i).map(str::trim).unwrap_or("");
    let mut err = |col: usize, message: String| {
        errors.push(RowError {
            line,
            column: CSV_HEADER[col].to_string(),
            message,
        })
    };

    let project_id = cell(0).to_string();
    if project_id.is_empty() {
        err(0, "project id is required".into());
    }

    let mut numeric = |col: usize, strictly_positive: bool| -> Option<f64> {
        let raw = cell(col);
        if raw.is_empty() {
            return None;
        }
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() && (v > 0.0 || (!strictly_positive && v == 0.0)) => Some(v),
            Ok(v) => {
                let bound = if strictly_positive { "> 0" } else { ">= 0" };
                err(col, format!("value {v} must be finite and {bound}"));
                None
            }
            Err(_) => {
                err(col, format!("unparseable number {raw:?}"));
                None
            }
        }
    };
    let function_points = numeric(1, false);
    let max_team_size = numeric(2, false);
    let ub_business_units = numeric(3, false);
    let ub_locations = numeric(4, false);
    let ub_concurrent_users = numeric(5, false);
    let work_effort = numeric(7, true);

    let development_platform = match cell(6) {
        "" => None,
        raw => raw.parse::<Platform>().map_err(|m| err(6, m)).ok(),
    };

    let mut required = |col: usize| -> Option<&str> {
        let raw = cell(col);
        if raw.is_empty() {
            err(col, "value is required".into());
            None
        } else {
            Some(raw)
        }
    };
    let quality = required(8).map(str::to_string);
    let ufp = required(9).map(str::to_string);
    let level = required(10).map(str::to_string);
    let dev_type = required(11).map(str::to_string);

    let data_quality_rating = quality.and_then(|raw| raw.parse::<Rating>().map_err(|m| err(8, m)).ok());
    let ufp_rating = ufp.and_then(|raw| raw.parse::<Rating>().map_err(|m| err(9, m)).ok());
    let resource_level = level.and_then(|raw| {
        raw.parse::<u8>().ok().and_then(ResourceLevel::new).or_else(|| {
            err(10, format!("invalid value {raw:?} (expected 1, 2, 3 or 4)"));
            None
        })
    });
    let development_type = dev_type.and_then(|raw| raw.parse::<DevelopmentType>().map_err(|m| err(11, m)).ok());

    match (data_quality_rating, ufp_rating, resource_level, development_type) {
        (Some(data_quality_rating), Some(ufp_rating), Some(resource_level), Some(development_type))
            if errors.is_empty() =>
        {
            Ok(ProjectRecord {
                project_id,
                function_points,
                max_team_size,
                ub_business_units,
                ub_locations,
                ub_concurrent_users,
                development_platform,
                work_effort,
                data_quality_rating,
                ufp_rating,
                resource_level,
                development_type,
            })
        }
        _ => Err(errors),
    }
}

/// Writes the dataset in the schema CSV format. Missing values become empty
/// cells; numbers use the shortest representation that round-trips.
pub fn write_csv<W: Write>(ds: &Dataset, writer: W) -> Result<(), DatasetError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in ds.records() {
        w.write_record([
            r.project_id.clone(),
            num(r.function_points),
            num(r.max_team_size),
            num(r.ub_business_units),
            num(r.ub_locations),
            num(r.ub_concurrent_users),
            r.development_platform.map(|p| p.to_string()).unwrap_or_default(),
            num(r.work_effort),
            r.data_quality_rating.to_string(),
            r.ufp_rating.to_string(),
            r.resource_level.to_string(),
            r.development_type.to_string(),
        ])?;
    }
    w.flush().map_err(|source| DatasetError::Io {
        path: "<writer>".into(),
        source,
    })?;
    Ok(())
}

pub fn to_csv_string(ds: &Dataset) -> String {
    let mut buf = Vec::new();
    write_csv(ds, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is utf-8")
}

/// Case-selection rules, in the order they are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FilterCriterion {
    DataQualityRating,
    ResourceLevel,
    UfpRating,
    DevelopmentType,
}

impl FilterCriterion {
    pub const ALL: [FilterCriterion; 4] = [
        FilterCriterion::DataQualityRating,
        FilterCriterion::ResourceLevel,
        FilterCriterion::UfpRating,
        FilterCriterion::DevelopmentType,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FilterCriterion::DataQualityRating => "data_quality_rating",
            FilterCriterion::ResourceLevel => "resource_level",
            FilterCriterion::UfpRating => "ufp_rating",
            FilterCriterion::DevelopmentType => "development_type",
        }
    }

    pub fn selected(self) -> &'static str {
        match self {
            FilterCriterion::DataQualityRating | FilterCriterion::UfpRating => "A or B",
            FilterCriterion::ResourceLevel => "1 or 2",
            FilterCriterion::DevelopmentType => "NewDevelopment",
        }
    }

    pub fn accepts(self, r: &ProjectRecord) -> bool {
        match self {
            FilterCriterion::DataQualityRating => r.data_quality_rating.is_high(),
            FilterCriterion::ResourceLevel => r.resource_level.is_team_effort(),
            FilterCriterion::UfpRating => r.ufp_rating.is_high(),
            FilterCriterion::DevelopmentType => r.development_type == DevelopmentType::NewDevelopment,
        }
    }

    /// First rule the record fails, if any.
    pub fn first_failed(r: &ProjectRecord) -> Option<FilterCriterion> {
        Self::ALL.into_iter().find(|c| !c.accepts(r))
    }
}

/// Discards attributed to the first rule each record fails.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FilterSummary {
    pub examined: usize,
    pub kept: usize,
    pub discarded: BTreeMap<FilterCriterion, usize>,
}

impl FilterSummary {
    pub fn discarded_by(&self, c: FilterCriterion) -> usize {
        self.discarded.get(&c).copied().unwrap_or(0)
    }

    pub fn total_discarded(&self) -> usize {
        self.examined - self.kept
    }
}

/// Keeps high-quality, team-effort, new-development projects.
pub fn filter_cases(ds: &Dataset) -> Dataset {
    filter_cases_with_summary(ds).0
}

pub fn filter_cases_with_summary(ds: &Dataset) -> (Dataset, FilterSummary) {
    let mut summary = FilterSummary {
        examined: ds.len(),
        discarded: FilterCriterion::ALL.iter().map(|c| (*c, 0)).collect(),
        ..Default::default()
    };
    let mut kept = Vec::new();
    for r in ds.records() {
        match FilterCriterion::first_failed(r) {
            Some(c) => *summary.discarded.entry(c).or_default() += 1,
            None => kept.push(r.clone()),
        }
    }
    summary.kept = kept.len();
    (Dataset::derived(kept, Provenance::Filtered), summary)
}

/// Count of absent values per input feature, plus absent efforts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MissingCounts {
    pub features: BTreeMap<Feature, usize>,
    pub work_effort: usize,
}

pub fn missing_counts(ds: &Dataset) -> MissingCounts {
    let mut counts = MissingCounts {
        features: Feature::ALL.iter().map(|f| (*f, 0)).collect(),
        work_effort: 0,
    };
    for r in ds.records() {
        for f in r.missing_features() {
            *counts.features.entry(f).or_default() += 1;
        }
        if r.work_effort.is_none() {
            counts.work_effort += 1;
        }
    }
    counts
}

/// Mean/mode single imputation.
///
/// Records without an effort are dropped first; the target is never
/// imputed. Continuous gaps then take the mean of the present values and
/// platform gaps the most frequent value (ties go to the lexicographically
/// smallest label).
pub fn impute_mmsi(ds: &Dataset) -> Result<Dataset, DatasetError> {
    let mut records: Vec<ProjectRecord> = ds
        .records()
        .iter()
        .filter(|r| r.work_effort.is_some())
        .cloned()
        .collect();

    for (i, feature) in Feature::NUMERIC.iter().enumerate() {
        let present: Vec<f64> = records.iter().filter_map(|r| r.numeric()[i]).collect();
        if present.len() == records.len() {
            continue;
        }
        if present.is_empty() {
            return Err(DatasetError::FeatureAllMissing(feature.name()));
        }
        let mean = present.iter().sum::<f64>() / present.len() as f64;
        for r in &mut records {
            r.numeric_slot(i).get_or_insert(mean);
        }
    }

    let mut tally: BTreeMap<&'static str, (usize, Platform)> = BTreeMap::new();
    for p in records.iter().filter_map(|r| r.development_platform) {
        tally.entry(p.as_str()).or_insert((0, p)).0 += 1;
    }
    if records.iter().any(|r| r.development_platform.is_none()) {
        // BTreeMap iterates labels in ascending order, so the first maximum
        // found is the lexicographically smallest among tied modes.
        let mut mode: Option<(usize, Platform)> = None;
        for (count, p) in tally.values() {
            if mode.is_none_or(|(best, _)| *count > best) {
                mode = Some((*count, *p));
            }
        }
        let (_, mode) = mode.ok_or(DatasetError::FeatureAllMissing(Feature::DevelopmentPlatform.name()))?;
        for r in &mut records {
            r.development_platform.get_or_insert(mode);
        }
    }
    Ok(Dataset::derived(records, Provenance::Imputed))
}

/// Observed `[min, max]` of one column on the training data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueRange {
    pub min: f64,
    pub max: f64,
}

impl ValueRange {
    pub fn new(min: f64, max: f64) -> Option<Self> {
        (min.is_finite() && max.is_finite() && min <= max).then_some(Self { min, max })
    }

    fn observe(values: impl Iterator<Item = f64>) -> Option<Self> {
        values.fold(None, |acc, v| match acc {
            None => Some(Self { min: v, max: v }),
            Some(r) => Some(Self {
                min: r.min.min(v),
                max: r.max.max(v),
            }),
        })
    }

    /// `(x - min) / (max - min)` clamped to `[0, 1]`; a constant column maps
    /// to 0.
    pub fn normalize(&self, x: f64) -> f64 {
        if self.max == self.min {
            0.0
        } else {
            ((x - self.min) / (self.max - self.min)).clamp(0.0, 1.0)
        }
    }

    pub fn denormalize(&self, v: f64) -> f64 {
        self.min + v * (self.max - self.min)
    }
}

/// Min-max parameters fitted on the training set, in original units.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationParams {
    pub features: [ValueRange; 5],
    pub effort: ValueRange,
}

impl NormalizationParams {
    /// Normalizes the input features of a record. Every feature must be
    /// present.
    pub fn normalize_features(&self, r: &ProjectRecord) -> Result<([f64; 5], Platform), DatasetError> {
        let incomplete = |f: Feature| DatasetError::Incomplete {
            project_id: r.project_id.clone(),
            field: f.name(),
        };
        let mut out = [0.0; 5];
        for (i, value) in r.numeric().into_iter().enumerate() {
            let v = value.ok_or_else(|| incomplete(Feature::NUMERIC[i]))?;
            out[i] = self.features[i].normalize(v);
        }
        let platform = r
            .development_platform
            .ok_or_else(|| incomplete(Feature::DevelopmentPlatform))?;
        Ok((out, platform))
    }
}

/// A complete project with every continuous value mapped into `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedRecord {
    pub project_id: String,
    pub features: [f64; 5],
    pub platform: Platform,
    /// Normalized effort.
    pub effort: f64,
    /// Original effort in hours.
    pub effort_hours: f64,
}

pub type NormalizedDataset = Vec<NormalizedRecord>;

fn normalize_with(params: &NormalizationParams, ds: &Dataset) -> Result<NormalizedDataset, DatasetError> {
    ds.records()
        .iter()
        .map(|r| {
            let (features, platform) = params.normalize_features(r)?;
            let hours = r.work_effort.ok_or_else(|| DatasetError::Incomplete {
                project_id: r.project_id.clone(),
                field: "work_effort",
            })?;
            Ok(NormalizedRecord {
                project_id: r.project_id.clone(),
                features,
                platform,
                effort: params.effort.normalize(hours),
                effort_hours: hours,
            })
        })
        .collect()
}

/// Fits min-max parameters on `train` and applies them to both sets. Test
/// values beyond the training range are clamped.
pub fn normalize_minmax(
    train: &Dataset,
    test: &Dataset,
) -> Result<(NormalizedDataset, NormalizedDataset, NormalizationParams), DatasetError> {
    if train.is_empty() {
        return Err(DatasetError::EmptyTrain);
    }
    for r in train.records() {
        if let Some(f) = r.missing_features().first() {
            return Err(DatasetError::Incomplete {
                project_id: r.project_id.clone(),
                field: f.name(),
            });
        }
        if r.work_effort.is_none() {
            return Err(DatasetError::Incomplete {
                project_id: r.project_id.clone(),
                field: "work_effort",
            });
        }
    }
    let column = |i: usize| {
        ValueRange::observe(train.records().iter().filter_map(|r| r.numeric()[i]))
            .expect("train is non-empty and complete")
    };
    let params = NormalizationParams {
        features: std::array::from_fn(column),
        effort: ValueRange::observe(train.records().iter().filter_map(|r| r.work_effort))
            .expect("train is non-empty and complete"),
    };
    let train_n = normalize_with(&params, train)?;
    let test_n = normalize_with(&params, test)?;
    Ok((train_n, test_n, params))
}

/// Seeded shuffle, then the first `floor(fraction * n)` records go to train.
pub fn split(ds: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset), DatasetError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DatasetError::InvalidFraction(train_fraction));
    }
    let n = ds.len();
    // the epsilon keeps 74/151 * 151 from rounding down to 73
    let n_train = (train_fraction * n as f64 + 1e-9).floor() as usize;
    if n < 2 || n_train == 0 || n_train >= n {
        return Err(DatasetError::DegenerateSplit {
            records: n,
            fraction: train_fraction,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let pick = |idx: &[usize]| idx.iter().map(|&i| ds.records()[i].clone()).collect::<Vec<_>>();
    Ok((
        Dataset::derived(pick(&order[..n_train]), Provenance::Split),
        Dataset::derived(pick(&order[n_train..]), Provenance::Split),
    ))
}

/// Per-field probability of blanking a value in synthetic data.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MissingRates {
    pub function_points: f64,
    pub max_team_size: f64,
    pub ub_business_units: f64,
    pub ub_locations: f64,
    pub ub_concurrent_users: f64,
    pub development_platform: f64,
    pub work_effort: f64,
}

impl MissingRates {
    /// The same rate on every input feature; effort is left complete.
    pub fn features(rate: f64) -> Self {
        Self {
            function_points: rate,
            max_team_size: rate,
            ub_business_units: rate,
            ub_locations: rate,
            ub_concurrent_users: rate,
            development_platform: rate,
            work_effort: 0.0,
        }
    }

    fn as_array(&self) -> [f64; 7] {
        [
            self.function_points,
            self.max_team_size,
            self.ub_business_units,
            self.ub_locations,
            self.ub_concurrent_users,
            self.development_platform,
            self.work_effort,
        ]
    }
}

/// Fraction of synthetic records that violate each case-selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ViolationRates {
    pub data_quality_rating: f64,
    pub resource_level: f64,
    pub ufp_rating: f64,
    pub development_type: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub count: usize,
    pub missing: MissingRates,
    /// Standard deviation of the log-effort noise.
    pub noise: f64,
    pub seed: u64,
    pub violations: ViolationRates,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            count: 151,
            missing: MissingRates::features(0.05),
            noise: 0.2,
            seed: 42,
            violations: ViolationRates::default(),
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), DatasetError> {
        let v = &self.violations;
        let rates = self.missing.as_array().into_iter().chain([
            v.data_quality_rating,
            v.resource_level,
            v.ufp_rating,
            v.development_type,
        ]);
        for r in rates {
            if !(0.0..=1.0).contains(&r) {
                return Err(DatasetError::InvalidSpec(format!("rate {r} is outside [0, 1]")));
            }
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return Err(DatasetError::InvalidSpec(format!("noise {} must be >= 0", self.noise)));
        }
        Ok(())
    }
}

/// Noise-free effort of a synthetic project:
/// `8 * function_points^0.9 * max_team_size^0.3` hours.
pub fn synth_base_effort(function_points: f64, max_team_size: f64) -> f64 {
    8.0 * function_points.powf(0.9) * max_team_size.powf(0.3)
}

/// Schema-compatible synthetic projects.
///
/// Efforts are `synth_base_effort * exp(noise * e)` with `e` standard normal,
/// rounded to whole hours. Violations and missing values are injected into
/// exactly `round(rate * count)` randomly chosen records per field.
pub fn synth_generate(spec: &SynthSpec) -> Result<Dataset, DatasetError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let log_uniform =
        |rng: &mut ChaCha8Rng, lo: f64, hi: f64| -> f64 { (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp() };

    let mut records = Vec::with_capacity(spec.count);
    for i in 0..spec.count {
        let fp = log_uniform(&mut rng, 40.0, 2500.0).round();
        let team = (fp.sqrt() / 2.5 * rng.random_range(0.6..1.5)).round().clamp(1.0, 60.0);
        let units = 1.0 + (rng.random::<f64>().powi(2) * 12.0).floor();
        let locations = 1.0 + (rng.random::<f64>().powi(2) * 30.0).floor();
        let users = log_uniform(&mut rng, 1.0, 3000.0).round().max(1.0);
        let platform = match rng.random::<f64>() {
            u if u < 0.3 => Platform::Pc,
            u if u < 0.6 => Platform::MidRange,
            _ => Platform::MainFrame,
        };
        let eps: f64 = rng.sample(StandardNormal);
        let effort = (synth_base_effort(fp, team) * (spec.noise * eps).exp())
            .round()
            .max(1.0);
        records.push(ProjectRecord {
            project_id: format!("P{:04}", i + 1),
            function_points: Some(fp),
            max_team_size: Some(team),
            ub_business_units: Some(units),
            ub_locations: Some(locations),
            ub_concurrent_users: Some(users),
            development_platform: Some(platform),
            work_effort: Some(effort),
            data_quality_rating: if rng.random_bool(0.5) { Rating::A } else { Rating::B },
            ufp_rating: if rng.random_bool(0.5) { Rating::A } else { Rating::B },
            resource_level: ResourceLevel(if rng.random_bool(0.5) { 1 } else { 2 }),
            development_type: DevelopmentType::NewDevelopment,
        });
    }

    let n = spec.count;
    let pick = |rng: &mut ChaCha8Rng, rate: f64| -> Vec<usize> {
        let k = ((rate * n as f64).round() as usize).min(n);
        let mut idx = index::sample(rng, n, k).into_vec();
        idx.sort_unstable();
        idx
    };

    let v = spec.violations;
    for i in pick(&mut rng, v.data_quality_rating) {
        records[i].data_quality_rating = if rng.random_bool(0.5) { Rating::C } else { Rating::D };
    }
    for i in pick(&mut rng, v.resource_level) {
        records[i].resource_level = ResourceLevel(if rng.random_bool(0.5) { 3 } else { 4 });
    }
    for i in pick(&mut rng, v.ufp_rating) {
        records[i].ufp_rating = if rng.random_bool(0.5) { Rating::C } else { Rating::D };
    }
    for i in pick(&mut rng, v.development_type) {
        records[i].development_type = if rng.random_bool(0.5) {
            DevelopmentType::Enhancement
        } else {
            DevelopmentType::Redevelopment
        };
    }

    for (field, rate) in spec.missing.as_array().into_iter().enumerate() {
        for i in pick(&mut rng, rate) {
            let r = &mut records[i];
            match field {
                0..=4 => *r.numeric_slot(field) = None,
                5 => r.development_platform = None,
                _ => r.work_effort = None,
            }
        }
    }

    Dataset::new(records, Provenance::Synthetic)
}
