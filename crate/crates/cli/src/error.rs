use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}{message}", line.map(|l| format!("config line {l}: ")).unwrap_or_else(|| "config: ".to_string()))]
    Config { line: Option<usize>, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Model(#[from] greencell::Error),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
