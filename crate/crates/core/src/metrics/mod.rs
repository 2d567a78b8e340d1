//! Evaluation metrics. All values are fractions in `[0, 1]`; percentage
//! scaling only happens when a report is rendered.

mod accuracy;
mod diversity;
mod ranking;
mod report;
mod utility;

pub use accuracy::precision_at_k;
pub use diversity::{
    catalog_coverage, gini_index, ild, intra_list_distance, item_counts, item_distribution,
    ItemVectors,
};
pub use ranking::{dcg, discount, idcg, ndcg, relevance};
pub use report::{evaluate, EvaluationReport, REPORT_CSV_HEADER};
pub use utility::{aggregate_item_utility, aggregate_user_utility, item_utility, user_utility};

pub(crate) use utility::item_ideal_len;
