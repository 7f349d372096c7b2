//! Vocabulary alignment: namespace shifting, overlap statistics and linting.

mod lint;
mod mapping;
mod vocab;

pub use lint::{lint_report_csv, lint_vocabulary, suggest_name, LintIssue, LintKind};
pub use mapping::{parse_renames, shift_namespace, AlignError, AlignmentMapping, MappingError};
pub use vocab::{compute_overlap, extract_vocabulary, subset_statistics, OverlapStats, SubsetStatistics, Vocabulary};
