use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{GdpModel, MinlpModel};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("schema violation at {pointer} (line {line}, column {column}): {message}")]
    Schema {
        pointer: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported format_version {found}, expected {expected}")]
    VersionMismatch { found: u64, expected: u32 },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub decisions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "model", rename_all = "kebab-case")]
pub enum Payload {
    Gdp(GdpModel),
    Minlp(MinlpModel),
}

/// Versioned envelope around a GDP or MINLP model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub format_version: u32,
    #[serde(default)]
    pub metadata: DocumentMetadata,
    pub payload: Payload,
}

impl ModelDocument {
    pub fn gdp(model: GdpModel) -> Self {
        ModelDocument {
            format_version: FORMAT_VERSION,
            metadata: DocumentMetadata::default(),
            payload: Payload::Gdp(model),
        }
    }

    pub fn minlp(model: MinlpModel) -> Self {
        ModelDocument {
            format_version: FORMAT_VERSION,
            metadata: DocumentMetadata::default(),
            payload: Payload::Minlp(model),
        }
    }

    pub fn with_metadata(mut self, metadata: DocumentMetadata) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn as_gdp(&self) -> Option<&GdpModel> {
        match &self.payload {
            Payload::Gdp(m) => Some(m),
            Payload::Minlp(_) => None,
        }
    }

    pub fn as_minlp(&self) -> Option<&MinlpModel> {
        match &self.payload {
            Payload::Minlp(m) => Some(m),
            Payload::Gdp(_) => None,
        }
    }
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: Option<u64>,
}

pub fn read_model(text: &str) -> Result<ModelDocument, DocumentError> {
    if let Ok(VersionProbe { format_version: Some(v) }) = serde_json::from_str(text) {
        if v != u64::from(FORMAT_VERSION) {
            return Err(DocumentError::VersionMismatch {
                found: v,
                expected: FORMAT_VERSION,
            });
        }
    }
    let mut de = serde_json::Deserializer::from_str(text);
    let doc: ModelDocument = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let inner = e.inner();
        DocumentError::Schema {
            pointer: pointer(e.path()),
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| DocumentError::Schema {
        pointer: "/".into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(doc)
}

/// Pretty JSON with a trailing newline. Field order is fixed by the types
/// and every map is ordered, so equal documents give equal bytes.
pub fn write_model(doc: &ModelDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}

pub fn read_model_file(path: impl AsRef<Path>) -> Result<ModelDocument, DocumentError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| DocumentError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_model(&text)
}

pub fn write_model_file(path: impl AsRef<Path>, doc: &ModelDocument) -> Result<(), DocumentError> {
    let path = path.as_ref();
    fs::write(path, write_model(doc)).map_err(|source| DocumentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_random, RandomGdpParams};
    use crate::reform::{reformulate, Method, ReformConfig};

    fn sample() -> GdpModel {
        gen_random(&RandomGdpParams::new(3, 2, 3, 2, 11)).unwrap()
    }

    #[test]
    fn gdp_round_trip_is_byte_stable() {
        let doc = ModelDocument::gdp(sample()).with_metadata(DocumentMetadata {
            generator: Some("random".into()),
            seed: Some(11),
            params: Some(serde_json::json!({"n_dims": 3, "b": [1, 2]})),
            decisions: vec!["box [-10, 10]".into()],
        });
        let text = write_model(&doc);
        let back = read_model(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(write_model(&back), text);
    }

    #[test]
    fn minlp_round_trip_for_every_method() {
        let gdp = sample();
        for method in Method::ALL {
            let (m, _) = reformulate(&gdp, &ReformConfig::new(method)).unwrap();
            let doc = ModelDocument::minlp(m);
            let text = write_model(&doc);
            assert_eq!(read_model(&text).unwrap(), doc, "{method}");
        }
    }

    #[test]
    fn missing_bound_reports_a_pointer() {
        let mut v: serde_json::Value = serde_json::from_str(&write_model(&ModelDocument::gdp(sample()))).unwrap();
        v["payload"]["model"]["variables"][1].as_object_mut().unwrap().remove("lower");
        let err = read_model(&v.to_string()).unwrap_err();
        match err {
            DocumentError::Schema { pointer, message, .. } => {
                assert_eq!(pointer, "/payload/model/variables/1");
                assert!(message.contains("lower"), "{message}");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn unknown_field_and_version_are_rejected() {
        let text = write_model(&ModelDocument::gdp(sample()));
        let extra = text.replacen("\"format_version\": 1,", "\"format_version\": 1, \"colour\": 3,", 1);
        assert!(matches!(read_model(&extra), Err(DocumentError::Schema { .. })));
        let v2 = text.replacen("\"format_version\": 1", "\"format_version\": 2", 1);
        assert!(matches!(
            read_model(&v2),
            Err(DocumentError::VersionMismatch { found: 2, expected: 1 })
        ));
    }

    #[test]
    fn infinite_bounds_survive() {
        let mut m = GdpModel::new("free");
        m.add_var("x", f64::NEG_INFINITY, f64::INFINITY);
        let doc = ModelDocument::gdp(m);
        assert_eq!(read_model(&write_model(&doc)).unwrap(), doc);
    }
}
