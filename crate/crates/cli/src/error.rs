use rainbow_coded::mapreduce::MapReduceError;
use rainbow_coded::rainbow3ap::RainbowApError;
use rainbow_coded::schemes::SchemeError;
use rainbow_coded::simulator::SimulatorError;
use rainbow_coded::universe::UniverseError;
use thiserror::Error;

/// Domain failures exit 1; unreadable or malformed input exits 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<UniverseError> for CliError {
    fn from(e: UniverseError) -> Self {
        match e {
            UniverseError::Json(_) => CliError::Input(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<SchemeError> for CliError {
    fn from(e: SchemeError) -> Self {
        match e {
            SchemeError::Universe(u) => u.into(),
            SchemeError::Parse(_) => CliError::Input(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<RainbowApError> for CliError {
    fn from(e: RainbowApError) -> Self {
        match e {
            RainbowApError::Json(_) => CliError::Input(e.to_string()),
            RainbowApError::Universe(u) => u.into(),
            RainbowApError::Scheme(s) => s.into(),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<MapReduceError> for CliError {
    fn from(e: MapReduceError) -> Self {
        match e {
            MapReduceError::Scheme(s) => s.into(),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<SimulatorError> for CliError {
    fn from(e: SimulatorError) -> Self {
        match e {
            SimulatorError::Scheme(s) => s.into(),
            _ => CliError::Domain(e.to_string()),
        }
    }
}
