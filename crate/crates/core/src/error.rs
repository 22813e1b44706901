use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (e.g. q not in (0,1)).
    #[error("domain error: {0}")]
    Domain(String),

    /// A denominator factor vanished (a pole of the series or product).
    #[error("zero denominator in {what} at index {index}")]
    ZeroDenominator { what: String, index: usize },

    #[error("series did not converge within {terms} terms: {what}")]
    NonConvergence { what: String, terms: usize },

    /// The two guarded runs disagreed; the caller must raise the precision.
    #[error("precision escalation needed at {digits} digits (guard {guard}): runs differ by {difference}")]
    PrecisionEscalation { digits: u32, guard: u32, difference: String },

    #[error("inconclusive after {attempts} precision escalations")]
    Inconclusive { attempts: u32 },

    #[error("extrapolation unstable: {0}")]
    Instability(String),

    #[error("tail bound could not be certified: {0}")]
    TailNotCertified(String),

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("missing parameter `{0}`")]
    MissingParameter(String),

    #[error("cannot parse `{0}` as a rational number")]
    Parse(String),
}

impl Error {
    /// Errors caused by caller input rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::ZeroDenominator { .. }
                | Error::UnknownIdentity(_)
                | Error::MissingParameter(_)
                | Error::Parse(_)
        )
    }
}
