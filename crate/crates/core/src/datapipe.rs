//! Dataset ingestion: CSV loading, min-max normalization into [-1, 1], label
//! encoding, and seeded hold-out splits.
//!
//! CSV dialect: comma-separated UTF-8; an optional header row is detected by
//! any non-numeric cell in a feature column of the first row. Labels may be
//! arbitrary text and are mapped to contiguous class indices in first
//! appearance order. Error positions are reported as 1-based file rows
//! (header included) and 1-based columns.

use crate::error::{Error, Result};
use crate::network::LabeledSample;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::Path;

/// RNG stream for split shuffles; optimizer streams use other values of the
/// same seed.
const SPLIT_STREAM: u64 = 0x7370_6c69;

/// Immutable labeled dataset; rows are samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
}

impl Dataset {
    pub fn n_samples(&self) -> usize {
        self.features.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Rows paired with one-hot targets, ready for fitness evaluation.
    pub fn to_samples(&self) -> Result<Vec<LabeledSample>> {
        let targets = one_hot(&self.labels, self.n_classes())?;
        Ok(self
            .features
            .iter()
            .zip(targets)
            .map(|(f, target)| LabeledSample {
                features: f.clone(),
                target,
            })
            .collect())
    }

    fn select(&self, indices: &[usize], name_suffix: &str) -> Dataset {
        Dataset {
            name: format!("{}{}", self.name, name_suffix),
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
        }
    }
}

/// Which CSV column holds the class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    Last,
    Index(usize),
}

fn parse_cell(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Load a CSV file into a dataset. See the module doc for the dialect; the
/// dataset must have at least two rows and two distinct labels to be usable
/// downstream.
pub fn load_csv(path: &Path, label_column: LabelColumn) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => Error::Io {
                path: path.to_path_buf(),
                source,
            },
            other => Error::CsvFormat {
                path: path.to_path_buf(),
                row: 0,
                message: format!("{other:?}"),
            },
        })?;

    let mut rows: Vec<Vec<String>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::CsvFormat {
            path: path.to_path_buf(),
            row: i + 1,
            message: e.to_string(),
        })?;
        let mut cells: Vec<String> = record.iter().map(str::to_owned).collect();
        // Strip a UTF-8 byte-order mark so the first cell still parses.
        if i == 0 {
            if let Some(first) = cells.first_mut() {
                if let Some(stripped) = first.strip_prefix('\u{feff}') {
                    *first = stripped.to_owned();
                }
            }
        }
        rows.push(cells);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("CSV file has no rows"));
    }

    let width = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(Error::CsvFormat {
                path: path.to_path_buf(),
                row: i + 1,
                message: format!("expected {width} columns, found {}", row.len()),
            });
        }
    }
    if width < 2 {
        return Err(Error::InvalidDataset {
            path: path.to_path_buf(),
            message: "need at least one feature column and one label column".into(),
        });
    }
    let label_idx = match label_column {
        LabelColumn::Last => width - 1,
        LabelColumn::Index(i) if i < width => i,
        LabelColumn::Index(i) => {
            return Err(Error::InvalidConfig(format!(
                "label column {i} out of range for {width} columns"
            )));
        }
    };

    // Header detection: any feature cell of the first row that is not a
    // number makes it a header.
    let has_header = rows[0]
        .iter()
        .enumerate()
        .any(|(c, cell)| c != label_idx && !cell.trim().is_empty() && parse_cell(cell).is_none());
    let data_start = usize::from(has_header);

    let mut features = Vec::with_capacity(rows.len() - data_start);
    let mut labels = Vec::new();
    let mut class_names: Vec<String> = Vec::new();
    for (i, row) in rows.iter().enumerate().skip(data_start) {
        let file_row = i + 1;
        let mut feats = Vec::with_capacity(width - 1);
        for (c, cell) in row.iter().enumerate() {
            if cell.trim().is_empty() {
                return Err(Error::MissingValue {
                    path: path.to_path_buf(),
                    row: file_row,
                    col: c + 1,
                });
            }
            if c == label_idx {
                continue;
            }
            match parse_cell(cell) {
                Some(v) => feats.push(v),
                None => {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        row: file_row,
                        col: c + 1,
                        value: cell.clone(),
                    });
                }
            }
        }
        let label_text = row[label_idx].trim();
        let label = match class_names.iter().position(|n| n == label_text) {
            Some(k) => k,
            None => {
                class_names.push(label_text.to_owned());
                class_names.len() - 1
            }
        };
        features.push(feats);
        labels.push(label);
    }

    if features.len() < 2 {
        return Err(Error::InvalidDataset {
            path: path.to_path_buf(),
            message: format!("need at least 2 data rows, found {}", features.len()),
        });
    }
    if class_names.len() < 2 {
        return Err(Error::InvalidDataset {
            path: path.to_path_buf(),
            message: "need at least 2 distinct class labels".into(),
        });
    }

    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    Ok(Dataset {
        name,
        features,
        labels,
        class_names,
    })
}

/// Per-feature min/max, the sufficient statistics for normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationStats {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

pub fn fit_normalization(dataset: &Dataset) -> NormalizationStats {
    let p = dataset.n_features();
    let mut mins = vec![f64::INFINITY; p];
    let mut maxs = vec![f64::NEG_INFINITY; p];
    for row in &dataset.features {
        for (d, &v) in row.iter().enumerate() {
            mins[d] = mins[d].min(v);
            maxs[d] = maxs[d].max(v);
        }
    }
    NormalizationStats { mins, maxs }
}

/// Map each feature through x' = 2*(x - min)/(max - min) - 1 using the given
/// statistics. Constant features (min == max) map to 0. Values outside the
/// fitted range land outside [-1, 1]; they are not clamped.
pub fn apply_normalization(dataset: &Dataset, stats: &NormalizationStats) -> Dataset {
    let features = dataset
        .features
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(d, &v)| {
                    let span = stats.maxs[d] - stats.mins[d];
                    if span == 0.0 {
                        0.0
                    } else {
                        2.0 * (v - stats.mins[d]) / span - 1.0
                    }
                })
                .collect()
        })
        .collect();
    Dataset {
        features,
        ..dataset.clone()
    }
}

/// Normalize with statistics from the full dataset.
pub fn normalize(dataset: &Dataset) -> Dataset {
    apply_normalization(dataset, &fit_normalization(dataset))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataSplit {
    pub train: Dataset,
    pub test: Dataset,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub fraction: f64,
    pub seed: u64,
}

/// Round half away from zero; splits sizes are |train| = round(fraction*N).
fn round_count(x: f64) -> usize {
    x.round() as usize
}

/// Seeded hold-out split. Stratified mode shuffles within each class and
/// takes floor(fraction * n_c) rows per class, then distributes the
/// remaining train slots by largest fractional remainder (ties favor the
/// lower class index) so the total is exactly round(fraction * N). Index
/// lists are emitted in ascending order, so row order within each side is
/// the dataset's own.
pub fn holdout_split(
    dataset: &Dataset,
    fraction: f64,
    seed: u64,
    stratified: bool,
) -> Result<DataSplit> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "split fraction must be in (0, 1), got {fraction}"
        )));
    }
    let n = dataset.n_samples();
    let target_train = round_count(fraction * n as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SPLIT_STREAM);

    let mut train_indices: Vec<usize>;
    if stratified {
        let k = dataset.n_classes();
        let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (i, &label) in dataset.labels.iter().enumerate() {
            per_class[label].push(i);
        }
        for class_rows in &mut per_class {
            class_rows.shuffle(&mut rng);
        }
        let mut take: Vec<usize> = Vec::with_capacity(k);
        let mut remainders: Vec<(f64, usize)> = Vec::with_capacity(k);
        for (c, class_rows) in per_class.iter().enumerate() {
            let exact = fraction * class_rows.len() as f64;
            let base = exact.floor() as usize;
            take.push(base);
            remainders.push((exact - base as f64, c));
        }
        let assigned: usize = take.iter().sum();
        let leftover = target_train.saturating_sub(assigned);
        remainders.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        for &(_, c) in remainders.iter().take(leftover) {
            take[c] += 1;
        }
        for (c, (&cnt, class_rows)) in take.iter().zip(&per_class).enumerate() {
            if cnt == 0 {
                return Err(Error::Stratification(format!(
                    "class {:?} has no rows in the train split (fraction {fraction}, {} rows)",
                    dataset.class_names[c],
                    class_rows.len()
                )));
            }
            if cnt > class_rows.len() {
                return Err(Error::Stratification(format!(
                    "class {:?} cannot supply {cnt} train rows from {}",
                    dataset.class_names[c],
                    class_rows.len()
                )));
            }
        }
        train_indices = Vec::with_capacity(target_train);
        for (class_rows, &cnt) in per_class.iter().zip(&take) {
            train_indices.extend_from_slice(&class_rows[..cnt]);
        }
    } else {
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        train_indices = all[..target_train].to_vec();
        for (c, name) in dataset.class_names.iter().enumerate() {
            if !train_indices.iter().any(|&i| dataset.labels[i] == c) {
                return Err(Error::Stratification(format!(
                    "class {name:?} has no rows in the train split"
                )));
            }
        }
    }

    train_indices.sort_unstable();
    let in_train: Vec<bool> = {
        let mut mask = vec![false; n];
        for &i in &train_indices {
            mask[i] = true;
        }
        mask
    };
    let test_indices: Vec<usize> = (0..n).filter(|&i| !in_train[i]).collect();

    Ok(DataSplit {
        train: dataset.select(&train_indices, "/train"),
        test: dataset.select(&test_indices, "/test"),
        train_indices,
        test_indices,
        fraction,
        seed,
    })
}

/// One-hot target rows: row i is all zeros except a 1 at labels[i].
pub fn one_hot(labels: &[usize], k: usize) -> Result<Vec<Vec<f64>>> {
    labels
        .iter()
        .map(|&label| {
            if label >= k {
                return Err(Error::LabelOutOfRange { label, classes: k });
            }
            let mut row = vec![0.0; k];
            row[label] = 1.0;
            Ok(row)
        })
        .collect()
}
