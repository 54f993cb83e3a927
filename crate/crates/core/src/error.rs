use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty signal")]
    EmptySignal,

    #[error("zero-power signal cannot be scaled to {target_w} W")]
    ZeroPower { target_w: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("duplicate tone subcarrier index {0}")]
    DuplicateTone(i32),

    #[error("tone at subcarrier {index} ({freq_hz} Hz) is beyond Nyquist for {sample_rate_hz} Hz sampling")]
    ToneBeyondNyquist {
        index: i32,
        freq_hz: f64,
        sample_rate_hz: f64,
    },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("sample-rate mismatch: {0} Hz vs {1} Hz")]
    SampleRateMismatch(f64, f64),

    #[error("unequalizable bin: subcarrier {0} has zero channel gain")]
    UnequalizableBin(i32),

    #[error(
        "components not orthogonal: {component} leaks {leak_dbc:.1} dBc outside its subcarriers"
    )]
    NotOrthogonal {
        component: &'static str,
        leak_dbc: f64,
    },

    #[error(
        "rectifier did not reach steady state after {periods} periods \
         (last relative change {last_change:e}, output {last_voltage:e} V)"
    )]
    NonConvergence {
        periods: usize,
        last_change: f64,
        last_voltage: f64,
    },

    #[error("line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("point {point}, trial {trial}: {source}")]
    Trial {
        point: usize,
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
