//! JSON schemas for matrices, channels and states.
//!
//! A complex number is a pair `[re, im]` and a matrix is an array of rows.
//! Floats are written in shortest round-trip form, so reloading is bit-exact.

use std::path::Path;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::faithfulness::{isotropic, werner};
use crate::linalg::ComplexMatrix;
use crate::objects::{BipartiteState, Channel, ChoiOperator};

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> =
            (0..self.rows()).map(|i| self.row(i).iter().map(|z| [z.re, z.im]).collect()).collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        let rows: Vec<Vec<Complex64>> =
            rows.into_iter().map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()).collect();
        ComplexMatrix::from_rows(&rows).map_err(D::Error::custom)
    }
}

/// On-disk channel: either a Kraus list or a Choi matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelFile {
    Kraus { d_in: usize, d_out: usize, kraus: Vec<ComplexMatrix> },
    Choi { d_in: usize, d_out: usize, choi: ComplexMatrix },
}

impl ChannelFile {
    pub fn from_channel(ch: &Channel) -> Self {
        ChannelFile::Kraus { d_in: ch.d_in(), d_out: ch.d_out(), kraus: ch.kraus().to_vec() }
    }

    pub fn from_choi(choi: &ChoiOperator) -> Self {
        ChannelFile::Choi { d_in: choi.d_in(), d_out: choi.d_out(), choi: choi.matrix().clone() }
    }

    pub fn to_choi(&self) -> Result<ChoiOperator> {
        match self {
            ChannelFile::Kraus { .. } => Ok(self.to_channel()?.choi()),
            ChannelFile::Choi { d_in, d_out, choi } => ChoiOperator::new(choi.clone(), *d_in, *d_out),
        }
    }

    /// A Choi file is converted through its spectral decomposition.
    pub fn to_channel(&self) -> Result<Channel> {
        match self {
            ChannelFile::Kraus { d_in, d_out, kraus } => {
                if let Some(k) = kraus.iter().find(|k| k.shape() != (*d_out, *d_in)) {
                    return Err(Error::DimensionMismatch(format!(
                        "Kraus operator is {}x{}, declared {d_out}x{d_in}",
                        k.rows(),
                        k.cols()
                    )));
                }
                Channel::new(kraus.clone())
            }
            ChannelFile::Choi { .. } => self.to_choi()?.to_channel(crate::linalg::DEFAULT_REL_TOL),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Werner,
    Isotropic,
}

/// On-disk state: an explicit matrix or a named family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateFile {
    Matrix {
        #[serde(rename = "d_H")]
        d_h: usize,
        #[serde(rename = "d_K")]
        d_k: usize,
        matrix: ComplexMatrix,
    },
    Family {
        family: Family,
        d: usize,
        f: f64,
    },
}

impl StateFile {
    pub fn from_state(s: &BipartiteState) -> Self {
        StateFile::Matrix { d_h: s.d_h(), d_k: s.d_k(), matrix: s.matrix().clone() }
    }

    pub fn to_state(&self) -> Result<BipartiteState> {
        match self {
            StateFile::Matrix { d_h, d_k, matrix } => BipartiteState::new(matrix.clone(), *d_h, *d_k),
            StateFile::Family { family: Family::Werner, d, f } => werner(*d, *f),
            StateFile::Family { family: Family::Isotropic, d, f } => isotropic(*d, *f),
        }
    }
}

/// Input or IO failure while handling files, kept apart from mathematical errors.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {cause}")]
    Read { path: String, cause: std::io::Error },
    #[error("{path}: {cause}")]
    Parse { path: String, cause: serde_json::Error },
    #[error("{path}: {cause}")]
    Invalid { path: String, cause: Error },
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> std::result::Result<T, IoError> {
    let text =
        std::fs::read_to_string(path).map_err(|cause| IoError::Read { path: path.display().to_string(), cause })?;
    serde_json::from_str(&text).map_err(|cause| IoError::Parse { path: path.display().to_string(), cause })
}

pub fn read_state(path: &Path) -> std::result::Result<BipartiteState, IoError> {
    read_json::<StateFile>(path)?
        .to_state()
        .map_err(|cause| IoError::Invalid { path: path.display().to_string(), cause })
}

pub fn read_channel(path: &Path) -> std::result::Result<ChannelFile, IoError> {
    read_json(path)
}

/// Reads an operator stored either as a state file or as a bare matrix.
pub fn read_operator(path: &Path) -> std::result::Result<ComplexMatrix, IoError> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OperatorFile {
        State(StateFile),
        Bare(ComplexMatrix),
    }
    match read_json::<OperatorFile>(path)? {
        OperatorFile::Bare(m) => Ok(m),
        // the family shorthand has no raw matrix, so it goes through validation
        OperatorFile::State(StateFile::Matrix { matrix, .. }) => Ok(matrix),
        OperatorFile::State(s) => s
            .to_state()
            .map(BipartiteState::into_matrix)
            .map_err(|cause| IoError::Invalid { path: path.display().to_string(), cause }),
    }
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable types only")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testutil::random_matrix;
    use crate::objects::factories::{depolarizing, random_channel, random_state};

    #[test]
    fn matrix_round_trip_is_bit_exact() {
        for seed in 0..20 {
            let m = random_matrix(3, 5, seed);
            let text = serde_json::to_string(&m).unwrap();
            let back: ComplexMatrix = serde_json::from_str(&text).unwrap();
            assert_eq!(back.as_slice(), m.as_slice());
        }
    }

    #[test]
    fn matrix_layout() {
        let m = ComplexMatrix::from_rows(&[
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, -2.0)],
            vec![Complex64::new(0.0, 0.25), Complex64::new(-3.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(serde_json::to_string(&m).unwrap(), "[[[1.0,0.0],[0.5,-2.0]],[[0.0,0.25],[-3.0,0.0]]]");
    }

    #[test]
    fn ragged_matrix_is_rejected() {
        assert!(serde_json::from_str::<ComplexMatrix>("[[[1,0],[0,0]],[[1,0]]]").is_err());
        assert!(serde_json::from_str::<ComplexMatrix>("[[[1,0,2]]]").is_err());
    }

    #[test]
    fn channel_file_forms() {
        let ch = random_channel(2, 3, 2, 4).unwrap();
        let text = to_json_pretty(&ChannelFile::from_channel(&ch));
        let back: ChannelFile = serde_json::from_str(&text).unwrap();
        assert!(matches!(back, ChannelFile::Kraus { .. }));
        assert_eq!(back.to_choi().unwrap().matrix().as_slice(), ch.choi().matrix().as_slice());

        let text = to_json_pretty(&ChannelFile::from_choi(&ch.choi()));
        let back: ChannelFile = serde_json::from_str(&text).unwrap();
        assert!(matches!(back, ChannelFile::Choi { .. }));
        assert!(back.to_channel().unwrap().choi().distance(&ch.choi()) < 1e-12);
    }

    #[test]
    fn channel_file_checks_kraus_shape() {
        let dep = depolarizing(2, 0.3).unwrap();
        let file = ChannelFile::Kraus { d_in: 3, d_out: 2, kraus: dep.kraus().to_vec() };
        assert!(file.to_channel().is_err());
    }

    #[test]
    fn state_file_forms() {
        let s = random_state(2, 3, 2, 9).unwrap();
        let text = to_json_pretty(&StateFile::from_state(&s));
        assert!(text.contains("\"d_H\"") && text.contains("\"d_K\""));
        let back: StateFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_state().unwrap().matrix().as_slice(), s.matrix().as_slice());

        let fam: StateFile = serde_json::from_str(r#"{"family": "werner", "d": 2, "f": 0.8}"#).unwrap();
        assert!(fam.to_state().unwrap().matrix().distance(werner(2, 0.8).unwrap().matrix()) < 1e-15);
        let fam: StateFile = serde_json::from_str(r#"{"family": "isotropic", "d": 3, "f": 1}"#).unwrap();
        assert!((fam.to_state().unwrap().purity() - 1.0).abs() < 1e-12);
        assert!(serde_json::from_str::<StateFile>(r#"{"family": "ghz", "d": 2, "f": 0.5}"#).is_err());
    }

    #[test]
    fn invalid_state_is_rejected() {
        let file = StateFile::Matrix { d_h: 2, d_k: 2, matrix: ComplexMatrix::identity(4) };
        assert!(matches!(file.to_state(), Err(Error::NotNormalized { .. })));
    }
}
