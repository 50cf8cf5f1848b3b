//! Retrieval metrics, significance testing and query reformulation.

mod metrics;
mod reformulate;
mod ttest;

pub use metrics::{
    average_precision, evaluate, evaluate_run, map_over, mrr, precision_recall_at_k, r_precision,
    rankings_from_run, reciprocal_rank, Metric, MetricsReport, QueryMetrics, Rankings,
};
pub use reformulate::reformulate_queries;
pub use ttest::{
    ln_gamma, paired_t_test, paired_t_test_by_query, regularized_incomplete_beta,
    student_t_two_sided_p, TTestResult,
};
