//! Classification quality: confusion matrix, accuracy, and one-vs-rest
//! precision/recall/F-measure with a macro average.
//!
//! The binary F-measure definition is applied per class against the rest;
//! for two-class problems the class-1 value doubles as the headline score.
//! Zero-denominator cases score 0 and carry a flag instead of poisoning
//! aggregates with NaN.

use crate::error::{Error, Result};
use serde_json::{json, Value};
use std::collections::BTreeMap;

/// Rows are actual classes, columns are predicted classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<usize>>,
}

/// Count predictions into a K x K grid.
pub fn confusion_matrix(actual: &[usize], predicted: &[usize], k: usize) -> Result<ConfusionMatrix> {
    if actual.len() != predicted.len() {
        return Err(Error::DimensionMismatch {
            context: "confusion_matrix inputs",
            expected: actual.len(),
            got: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::EmptyInput("confusion matrix samples"));
    }
    let mut counts = vec![vec![0usize; k]; k];
    for (&a, &p) in actual.iter().zip(predicted) {
        for label in [a, p] {
            if label >= k {
                return Err(Error::LabelOutOfRange { label, classes: k });
            }
        }
        counts[a][p] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

impl ConfusionMatrix {
    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    /// Diagonal mass over total mass.
    pub fn accuracy(&self) -> f64 {
        let correct: usize = (0..self.k()).map(|c| self.counts[c][c]).sum();
        correct as f64 / self.total() as f64
    }

    /// Plain numeric grid, one row per line.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for row in &self.counts {
            let cells: Vec<String> = row.iter().map(usize::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut counts = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let row: std::result::Result<Vec<usize>, _> =
                line.split(',').map(|c| c.trim().parse()).collect();
            match row {
                Ok(r) => counts.push(r),
                Err(_) => {
                    return Err(Error::CsvFormat {
                        path: "<confusion>".into(),
                        row: i + 1,
                        message: "expected comma-separated counts".into(),
                    });
                }
            }
        }
        if counts.is_empty() || counts.iter().any(|r| r.len() != counts.len()) {
            return Err(Error::CsvFormat {
                path: "<confusion>".into(),
                row: 1,
                message: "expected a square grid".into(),
            });
        }
        Ok(ConfusionMatrix { counts })
    }
}

/// One-vs-rest counts and scores for a single class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassStats {
    pub tp: usize,
    pub fp: usize,
    pub fn_count: usize,
    pub tn: usize,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    /// Some denominator was zero; the affected scores were forced to 0.
    pub zero_division: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassMetrics {
    pub per_class: Vec<ClassStats>,
    /// Unweighted mean of the per-class F-measures.
    pub macro_f: f64,
}

impl ClassMetrics {
    /// Two-class problems headline the class-1 F-measure; otherwise the
    /// macro average stands in.
    pub fn headline_f(&self) -> f64 {
        if self.per_class.len() == 2 {
            self.per_class[1].f_measure
        } else {
            self.macro_f
        }
    }
}

/// Per-class precision, recall, and F-measure from a confusion matrix.
pub fn class_metrics(cm: &ConfusionMatrix) -> Result<ClassMetrics> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyInput("confusion matrix is all zeros"));
    }
    let k = cm.k();
    let mut per_class = Vec::with_capacity(k);
    for c in 0..k {
        let tp = cm.counts[c][c];
        let col: usize = (0..k).map(|a| cm.counts[a][c]).sum();
        let row: usize = cm.counts[c].iter().sum();
        let fp = col - tp;
        let fn_count = row - tp;
        let tn = total - tp - fp - fn_count;

        let mut zero_division = false;
        let mut ratio = |num: usize, den: usize| {
            if den == 0 {
                zero_division = true;
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_count);
        let f_measure = if precision + recall == 0.0 {
            zero_division = true;
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        per_class.push(ClassStats {
            tp,
            fp,
            fn_count,
            tn,
            precision,
            recall,
            f_measure,
            zero_division,
        });
    }
    let macro_f = per_class.iter().map(|s| s.f_measure).sum::<f64>() / k as f64;
    Ok(ClassMetrics { per_class, macro_f })
}

/// Flat key-value pairs: accuracy, macro and headline F, and the per-class
/// counts and scores. Sorted keys make any serialization deterministic.
pub fn metrics_map(cm: &ConfusionMatrix, metrics: &ClassMetrics) -> BTreeMap<String, Value> {
    let mut map = BTreeMap::new();
    map.insert("accuracy".into(), json!(cm.accuracy()));
    map.insert("macro_f".into(), json!(metrics.macro_f));
    map.insert("headline_f".into(), json!(metrics.headline_f()));
    map.insert("samples".into(), json!(cm.total()));
    map.insert("classes".into(), json!(cm.k()));
    for (c, s) in metrics.per_class.iter().enumerate() {
        map.insert(format!("class{c}_tp"), json!(s.tp));
        map.insert(format!("class{c}_fp"), json!(s.fp));
        map.insert(format!("class{c}_fn"), json!(s.fn_count));
        map.insert(format!("class{c}_tn"), json!(s.tn));
        map.insert(format!("class{c}_precision"), json!(s.precision));
        map.insert(format!("class{c}_recall"), json!(s.recall));
        map.insert(format!("class{c}_f"), json!(s.f_measure));
        map.insert(format!("class{c}_zero_division"), json!(s.zero_division));
    }
    map
}

/// The flat key-value document as pretty JSON with sorted keys.
pub fn metrics_json(cm: &ConfusionMatrix, metrics: &ClassMetrics) -> String {
    serde_json::to_string_pretty(&metrics_map(cm, metrics)).expect("metrics are plain scalars")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn hand_counted_two_class_fixture() {
        let cm = confusion_matrix(&[0, 0, 1], &[0, 1, 1], 2).unwrap();
        assert_eq!(cm.counts, vec![vec![1, 1], vec![0, 1]]);
        assert!((cm.accuracy() - 2.0 / 3.0).abs() < TOL);
    }

    #[test]
    fn perfect_predictions_are_diagonal() {
        let labels = [0, 1, 2, 1, 0, 2, 2];
        let cm = confusion_matrix(&labels, &labels, 3).unwrap();
        assert_eq!(cm.accuracy(), 1.0);
        for a in 0..3 {
            for p in 0..3 {
                if a != p {
                    assert_eq!(cm.counts[a][p], 0);
                }
            }
        }
    }

    fn three_class_fixture() -> ConfusionMatrix {
        ConfusionMatrix {
            counts: vec![vec![5, 2, 0], vec![1, 6, 1], vec![0, 3, 4]],
        }
    }

    #[test]
    fn three_class_metrics_match_hand_oracle() {
        let cm = three_class_fixture();
        assert_eq!(cm.total(), 22);
        assert!((cm.accuracy() - 15.0 / 22.0).abs() < TOL);
        let m = class_metrics(&cm).unwrap();

        let c0 = &m.per_class[0];
        assert_eq!((c0.tp, c0.fp, c0.fn_count, c0.tn), (5, 1, 2, 14));
        assert!((c0.precision - 5.0 / 6.0).abs() < TOL);
        assert!((c0.recall - 5.0 / 7.0).abs() < TOL);
        assert!((c0.f_measure - 10.0 / 13.0).abs() < TOL);

        let c1 = &m.per_class[1];
        assert_eq!((c1.tp, c1.fp, c1.fn_count, c1.tn), (6, 5, 2, 9));
        assert!((c1.precision - 6.0 / 11.0).abs() < TOL);
        assert!((c1.recall - 0.75).abs() < TOL);
        assert!((c1.f_measure - 12.0 / 19.0).abs() < TOL);

        let c2 = &m.per_class[2];
        assert_eq!((c2.tp, c2.fp, c2.fn_count, c2.tn), (4, 1, 3, 14));
        assert!((c2.precision - 0.8).abs() < TOL);
        assert!((c2.recall - 4.0 / 7.0).abs() < TOL);
        assert!((c2.f_measure - 2.0 / 3.0).abs() < TOL);

        assert!((m.macro_f - 1532.0 / 2223.0).abs() < TOL);
        assert!(m.per_class.iter().all(|s| !s.zero_division));
    }

    #[test]
    fn f_measure_textbook_points() {
        // Precision 1, recall 0.5 harmonically average to 2/3.
        let cm = ConfusionMatrix {
            counts: vec![vec![1, 1], vec![0, 5]],
        };
        let m = class_metrics(&cm).unwrap();
        assert_eq!(m.per_class[0].precision, 1.0);
        assert_eq!(m.per_class[0].recall, 0.5);
        assert!((m.per_class[0].f_measure - 2.0 / 3.0).abs() < TOL);
        // Equal precision and recall leave F at the same value.
        let cm = ConfusionMatrix {
            counts: vec![vec![3, 1], vec![1, 3]],
        };
        let m = class_metrics(&cm).unwrap();
        assert!((m.per_class[0].f_measure - 0.75).abs() < TOL);
    }

    #[test]
    fn absent_class_scores_zero_with_flag() {
        let cm = confusion_matrix(&[0, 1, 0, 1], &[0, 1, 1, 1], 3).unwrap();
        let m = class_metrics(&cm).unwrap();
        let c2 = &m.per_class[2];
        assert!(c2.zero_division);
        assert_eq!((c2.precision, c2.recall, c2.f_measure), (0.0, 0.0, 0.0));
        // The other classes are unaffected.
        assert!(!m.per_class[0].zero_division);
    }

    #[test]
    fn headline_is_class_one_for_binary() {
        let cm = confusion_matrix(&[0, 1, 1, 0], &[0, 1, 0, 0], 2).unwrap();
        let m = class_metrics(&cm).unwrap();
        assert_eq!(m.headline_f(), m.per_class[1].f_measure);
        assert_ne!(m.headline_f(), m.macro_f);

        let m3 = class_metrics(&three_class_fixture()).unwrap();
        assert_eq!(m3.headline_f(), m3.macro_f);
    }

    #[test]
    fn input_validation() {
        assert!(matches!(
            confusion_matrix(&[0, 1], &[0], 2).unwrap_err(),
            Error::DimensionMismatch { .. }
        ));
        assert!(matches!(
            confusion_matrix(&[], &[], 2).unwrap_err(),
            Error::EmptyInput(_)
        ));
        assert!(matches!(
            confusion_matrix(&[0, 2], &[0, 1], 2).unwrap_err(),
            Error::LabelOutOfRange { label: 2, .. }
        ));
    }

    #[test]
    fn csv_grid_round_trip() {
        let cm = three_class_fixture();
        let text = cm.to_csv_string();
        assert_eq!(text, "5,2,0\n1,6,1\n0,3,4\n");
        assert_eq!(ConfusionMatrix::from_csv_str(&text).unwrap(), cm);
        assert!(ConfusionMatrix::from_csv_str("1,2\n3\n").is_err());
    }

    #[test]
    fn metrics_json_is_sorted_and_parseable() {
        let cm = three_class_fixture();
        let m = class_metrics(&cm).unwrap();
        let text = metrics_json(&cm, &m);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["samples"], 22);
        assert_eq!(value["classes"], 3);
        assert!((value["accuracy"].as_f64().unwrap() - 15.0 / 22.0).abs() < TOL);
        assert!((value["class1_f"].as_f64().unwrap() - 12.0 / 19.0).abs() < TOL);
        let keys: Vec<&String> = value.as_object().unwrap().keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn permuting_classes_permutes_counts_only() {
        let actual = [0, 0, 1, 2, 1, 0, 2, 2, 1, 1];
        let predicted = [0, 1, 1, 2, 0, 0, 1, 2, 1, 2];
        let cm = confusion_matrix(&actual, &predicted, 3).unwrap();
        let m = class_metrics(&cm).unwrap();
        // Cyclic relabeling 0->1->2->0.
        let perm = |l: usize| (l + 1) % 3;
        let pa: Vec<usize> = actual.iter().map(|&l| perm(l)).collect();
        let pp: Vec<usize> = predicted.iter().map(|&l| perm(l)).collect();
        let pcm = confusion_matrix(&pa, &pp, 3).unwrap();
        let pm = class_metrics(&pcm).unwrap();
        for a in 0..3 {
            for p in 0..3 {
                assert_eq!(cm.counts[a][p], pcm.counts[perm(a)][perm(p)]);
            }
        }
        assert!((cm.accuracy() - pcm.accuracy()).abs() < TOL);
        assert!((m.macro_f - pm.macro_f).abs() < TOL);
    }

    proptest! {
        #[test]
        fn counting_identities_hold(
            labels in proptest::collection::vec((0usize..4, 0usize..4), 1..60)
        ) {
            let actual: Vec<usize> = labels.iter().map(|&(a, _)| a).collect();
            let predicted: Vec<usize> = labels.iter().map(|&(_, p)| p).collect();
            let cm = confusion_matrix(&actual, &predicted, 4).unwrap();
            let m = class_metrics(&cm).unwrap();
            let trace: usize = (0..4).map(|c| cm.counts[c][c]).sum();
            let tp_sum: usize = m.per_class.iter().map(|s| s.tp).sum();
            prop_assert_eq!(tp_sum, trace);
            for (c, s) in m.per_class.iter().enumerate() {
                let col: usize = (0..4).map(|a| cm.counts[a][c]).sum();
                let row: usize = cm.counts[c].iter().sum();
                prop_assert_eq!(s.tp + s.fp, col);
                prop_assert_eq!(s.tp + s.fn_count, row);
                prop_assert_eq!(s.tp + s.fp + s.fn_count + s.tn, cm.total());
                if s.precision + s.recall > 0.0 {
                    let lo = s.precision.min(s.recall);
                    let hi = s.precision.max(s.recall);
                    prop_assert!(s.f_measure >= lo - 1e-12);
                    prop_assert!(s.f_measure <= hi + 1e-12);
                }
                prop_assert!((0.0..=1.0).contains(&s.f_measure));
            }
            prop_assert!((cm.accuracy() - trace as f64 / cm.total() as f64).abs() < 1e-15);
        }
    }
}
