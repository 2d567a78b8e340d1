use serde::Serialize;

use crate::capacity::CapacityConfig;
use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::metrics::{
    aggregate_item_utility, aggregate_user_utility, catalog_coverage, gini_index, ild,
    item_distribution, precision_at_k,
};
use crate::prefs::PreferenceProfile;
use crate::scalar::Scalar;
use crate::split::DatasetSplit;

/// All evaluation quantities of one matching, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvaluationReport<S> {
    pub k: usize,
    pub precision_at_k: S,
    pub gini: S,
    pub gini_reversed: S,
    pub avg_prec_gini: S,
    pub user_utility: S,
    pub item_utility: S,
    pub avg_utilities: S,
    pub ild: S,
    pub catalog_coverage: S,
}

pub const REPORT_CSV_HEADER: &str =
    "method,params,precision@k,gini_rev,avg_prec_gini,utility_u,utility_i,avg_utilities,ild,coverage";

impl<S: Scalar> EvaluationReport<S> {
    /// One table row. Accuracy, Gini and utility columns are scaled to
    /// percent; ILD and coverage stay as fractions.
    pub fn csv_row(&self, method: &str, params: &str) -> String {
        let pct = |x: S| x.to_f64_lossy() * 100.0;
        format!(
            "{method},{params},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{:.4},{:.4}",
            pct(self.precision_at_k),
            pct(self.gini_reversed),
            pct(self.avg_prec_gini),
            pct(self.user_utility),
            pct(self.item_utility),
            pct(self.avg_utilities),
            self.ild.to_f64_lossy(),
            self.catalog_coverage.to_f64_lossy(),
        )
    }
}

/// Evaluates a complete matching. `caps` sets the ideal length of item
/// lists; pass `None` for re-rankers that do not enforce caps.
pub fn evaluate<S: Scalar>(
    matching: &Matching,
    prefs: &PreferenceProfile,
    split: &DatasetSplit<S>,
    k: usize,
    caps: Option<&CapacityConfig>,
) -> Result<EvaluationReport<S>> {
    if let Some(u) = (0..matching.n_users()).find(|&u| matching.user_items(u).len() != k) {
        return Err(Error::InvalidMatching(format!(
            "user {u} holds {} items, expected {k}",
            matching.user_items(u).len()
        )));
    }
    let catalog = split.source().n_items();
    let precision = precision_at_k(matching, &split.test, k);
    let gini = gini_index(&item_distribution::<S>(matching, catalog)?)?;
    let gini_reversed = S::one() - gini;
    let user_utility = aggregate_user_utility(matching, prefs);
    let item_utility = aggregate_item_utility(matching, prefs, caps);
    let two = S::of_usize(2);
    Ok(EvaluationReport {
        k,
        precision_at_k: precision,
        gini,
        gini_reversed,
        avg_prec_gini: (precision + gini_reversed) / two,
        user_utility,
        item_utility,
        avg_utilities: (user_utility + item_utility) / two,
        ild: ild(matching, &split.train),
        catalog_coverage: catalog_coverage(matching, catalog),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(precision: f64, gini: f64, uu: f64, iu: f64) -> EvaluationReport<f64> {
        EvaluationReport {
            k: 10,
            precision_at_k: precision,
            gini,
            gini_reversed: 1.0 - gini,
            avg_prec_gini: (precision + 1.0 - gini) / 2.0,
            user_utility: uu,
            item_utility: iu,
            avg_utilities: (uu + iu) / 2.0,
            ild: 0.5,
            catalog_coverage: 0.25,
        }
    }

    #[test]
    fn composite_rows() {
        let r = report(0.5, 0.5, 1.0, 0.0);
        assert_eq!(r.avg_prec_gini, 0.5);
        assert_eq!(r.avg_utilities, 0.5);
        let r = report(0.2, 0.937, 1.0, 0.0);
        assert!((r.gini_reversed - 0.063).abs() < 1e-12);
    }

    #[test]
    fn csv_scaling() {
        let row = report(0.224, 0.937, 1.0, 0.169).csv_row("mmda", "cap=6");
        assert_eq!(row, "mmda,cap=6,22.40,6.30,14.35,100.00,16.90,58.45,0.5000,0.2500");
        assert_eq!(REPORT_CSV_HEADER.split(',').count(), row.split(',').count());
    }
}
