//! Manifest and config schemas. Any nested object may be given inline or as a
//! path, resolved relative to the file that references it.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use faithful_core::io::{read_channel, read_operator, read_state, ChannelFile, StateFile};
use faithful_core::sim::NoiseModel;
use faithful_core::{BipartiteState, Channel, ComplexMatrix};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Source<T> {
    Path(PathBuf),
    Inline(T),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum InlineOperator {
    State(StateFile),
    Matrix(ComplexMatrix),
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl Source<StateFile> {
    pub fn load(&self, base: &Path) -> Result<BipartiteState> {
        match self {
            Source::Path(p) => Ok(read_state(&resolve(base, p))?),
            Source::Inline(s) => Ok(s.to_state()?),
        }
    }
}

impl Source<InlineOperator> {
    pub fn load(&self, base: &Path) -> Result<ComplexMatrix> {
        match self {
            Source::Path(p) => Ok(read_operator(&resolve(base, p))?),
            Source::Inline(InlineOperator::Matrix(m)) => Ok(m.clone()),
            Source::Inline(InlineOperator::State(StateFile::Matrix { matrix, .. })) => Ok(matrix.clone()),
            Source::Inline(InlineOperator::State(s)) => Ok(s.to_state()?.into_matrix()),
        }
    }
}

impl Source<ChannelFile> {
    pub fn load(&self, base: &Path) -> Result<Channel> {
        match self {
            Source::Path(p) => Ok(read_channel(&resolve(base, p))?.to_channel()?),
            Source::Inline(c) => Ok(c.to_channel()?),
        }
    }
}

/// `{"entries": [{"probe": …, "output": …, "prob": 0.25}, …]}`; omitted
/// probabilities default to uniform.
#[derive(Debug, Deserialize)]
pub struct PatchManifest {
    pub entries: Vec<PatchEntry>,
}

#[derive(Debug, Deserialize)]
pub struct PatchEntry {
    pub probe: Source<StateFile>,
    pub output: Source<InlineOperator>,
    pub prob: Option<f64>,
}

#[derive(Debug, Deserialize)]
pub struct StudyConfig {
    pub channel: Source<ChannelFile>,
    pub probes: Vec<StudyProbe>,
    pub noise: NoiseModel,
    pub trials: usize,
}

#[derive(Debug, Deserialize)]
pub struct StudyProbe {
    pub id: Option<String>,
    pub state: Source<StateFile>,
}

pub fn read<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}
