//! Experiment protocols built on top of [`crate::inference::fit`]: ablation,
//! gap-removal robustness and reporting.

mod ablation;
mod report;
mod robustness;
mod stats;
mod svg;

pub use ablation::{ablation_variants, run_ablation, AblationConfig, AblationOutcome, AblationRow};
pub use report::{
    ablation_csv, ablation_svg, coefficients_csv, engagement_csv, engagement_demographic_correlations, errorbars_svg,
    report, sympathy_csv, sympathy_histogram, sympathy_svg, EngagementCorrelation, SympathyHistogram, ERRORBAR_PANELS,
    HISTOGRAM_BINS,
};
pub use robustness::{coefficient_correlation, paired_coefficients, run_robustness, PairedCoefficient, RobustnessOutcome};
pub use stats::pearson;
