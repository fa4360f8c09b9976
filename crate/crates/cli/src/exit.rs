use plangen::dataset::DatasetError;
use plangen::dpgc::GenerateError;
use plangen::pipeline::PipelineError;
use plangen::planner::ExternalError;

pub const OK: u8 = 0;
/// A well-formed run with a negative answer: invalid plan, unsolved
/// problem, generation that ran out of retries.
pub const NEGATIVE: u8 = 1;
pub const USAGE: u8 = 2;
/// File system or external tool failure.
pub const IO: u8 = 3;

fn external(e: &ExternalError) -> u8 {
    match e {
        ExternalError::Parse(_) | ExternalError::Inputs(_) => USAGE,
        _ => IO,
    }
}

fn generate(e: &GenerateError) -> Option<u8> {
    Some(match e {
        GenerateError::SamplingFailure { .. } | GenerateError::BatchExhausted { .. } => NEGATIVE,
        GenerateError::External(x) => external(x),
        GenerateError::Io(_) => IO,
        GenerateError::Invalid(_) | GenerateError::Planner(_) => USAGE,
    })
}

fn dataset(e: &DatasetError) -> u8 {
    match e {
        DatasetError::Io { .. } | DatasetError::ManifestMismatch(_) => IO,
        DatasetError::DegenerateSplit { .. } => NEGATIVE,
        _ => USAGE,
    }
}

/// Exit code for an error, from the most specific cause that has one.
pub fn code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return IO;
        }
        if let Some(e) = cause.downcast_ref::<ExternalError>() {
            return external(e);
        }
        if let Some(e) = cause.downcast_ref::<GenerateError>() {
            return generate(e).unwrap_or(USAGE);
        }
        if let Some(e) = cause.downcast_ref::<DatasetError>() {
            return dataset(e);
        }
        if let Some(e) = cause.downcast_ref::<PipelineError>() {
            match e {
                PipelineError::Io { .. } => return IO,
                PipelineError::NotEnoughUnique { .. } | PipelineError::Check(_) => return NEGATIVE,
                PipelineError::Generate { error, .. } => return generate(error).unwrap_or(USAGE),
                PipelineError::Assemble(d) | PipelineError::Write(d) => return dataset(d),
                _ => return USAGE,
            }
        }
    }
    USAGE
}
