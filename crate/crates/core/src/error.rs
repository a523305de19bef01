use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not a rotation: {0}")]
    NotARotation(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("triad points are collinear or coincident")]
    DegenerateTriad,

    #[error("weighted point scatter has rank below 2")]
    RankDeficient,

    #[error("all singular values vanish")]
    SingularInput,

    #[error("rotation list is empty")]
    EmptyInput,

    #[error("need at least {required} correspondences, got {got}")]
    InsufficientCorrespondences { required: usize, got: usize },

    #[error("no anchor pair gathered enough scale-consistent third points")]
    NoConsensus,

    #[error("inlier candidate set is degenerate for rotation fitting")]
    DegenerateCandidate,

    #[error("final inlier set has {0} members, need at least 3")]
    EmptyInlierSet(usize),
}

impl Error {
    /// Stable snake_case tag used in machine-readable outputs.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotARotation(_) => "not_a_rotation",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::DegenerateTriad => "degenerate_triad",
            Error::RankDeficient => "rank_deficient",
            Error::SingularInput => "singular_input",
            Error::EmptyInput => "empty_input",
            Error::InsufficientCorrespondences { .. } => "insufficient_correspondences",
            Error::NoConsensus => "no_consensus",
            Error::DegenerateCandidate => "degenerate_candidate",
            Error::EmptyInlierSet(_) => "empty_inlier_set",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
