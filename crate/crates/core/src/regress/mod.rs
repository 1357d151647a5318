//! Logistic regression of framing outcomes on categorical factors.
//!
//! Factors are dummy-coded against declared reference levels, fitted by
//! Newton-Raphson (equivalently IRLS) with step halving, and tested with Wald
//! statistics. Holm-Bonferroni adjusts p-values within each model, and
//! average marginal effects translate coefficients into probability units.

mod ame;
mod design;
mod holm;
mod logit;
mod socio;

pub use ame::{ame_point, average_marginal_effects, AmeResult};
pub use design::{Dataset, DesignLayout, DesignSpec, FactorSpec};
pub use holm::{holm_bonferroni, HolmResult};
pub use logit::{
    apply_holm_jointly, fit_logistic, fit_logit_matrix, Coefficient, FitOptions, FittedModel,
    LogitFit, RegressionResult,
};
pub use socio::{fit_pronoun_models, pronoun_dataset, socio_dataset, socio_design, OUTCOMES};
