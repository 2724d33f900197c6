//! Batch front end for `enaqt-core`: parse settings, run, write CSV or JSON.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, RunConfig};
pub use error::CliError;
pub use output::{emit, render, OutputRecord};
pub use run::run;

/// Sizes the global worker pool. Only the first call in a process has an
/// effect; later calls are ignored.
pub fn configure_workers(workers: Option<usize>) {
    if let Some(n) = workers {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

/// Parses, runs and writes; the entry point behind the `enaqt` binary.
pub fn main_with_args<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = parse_config(args)?;
    configure_workers(config.workers);
    let records = run(&config)?;
    let columns = output::columns(&config.job);
    emit(&records, &columns, config.format, config.output.as_deref())
}
