//! File formats: numeric CSV input, result tables, Z-plot figures and the
//! run configuration snapshot.

mod config;
mod svg;
mod table;

pub use config::{InputKind, PairFilter, RunConfig, CONFIG_FILE};
pub use svg::{zplot_svg, ZplotSeries};
pub use table::{
    fmt_sig, read_dataset, read_table, write_anomaly_csv, write_dqf_csv, write_points_csv,
    write_predictions_csv, write_summaries_csv, write_zplot_csv, Dataset, LabelColumn, Table,
    ZplotRow,
};
