//! Scenario runner, summary statistics and result emission.

mod emit;
mod scenario;
mod stats;

pub use emit::{
    emit_boxplot_data, emit_results_csv, emit_traces_csv, format_mean_std_table, group_by_algorithm,
    group_by_level, parse_results_csv, result_rows, EmptyGroup, Metric, ResultRow, ResultsParseError,
    NO_TIMING, RESULTS_HEADER,
};
pub use scenario::{
    read_scenario, run_scenario, write_scenario, AlgorithmOverrides, CellFailure, CsvColumns,
    InstanceSource, ScenarioError, ScenarioRecord, ScenarioSettings, ScenarioSpec, DEFAULT_TASK_COUNT,
    SCENARIO_SCHEMA,
};
pub use stats::{quantile_sorted, summarize_stats, EmptyInput, SummaryStats};
