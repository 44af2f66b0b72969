//! Two-way ANOVA and the F distribution tail.

mod anova;
mod fdist;

pub use anova::{
    anova_two_way, sums_of_squares, AnovaTable, FactorialData, SourceRow, SOURCE_NAMES,
};
pub use fdist::{f_tail_probability, incomplete_beta, ln_gamma};
