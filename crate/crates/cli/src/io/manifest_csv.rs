//! The CSV manifest format.
//!
//! UTF-8 with LF line endings and the fixed header
//! `image_id,path,coarse,subclass,magnification,split,provenance,parent_id,copy_index`.
//! Absent optionals (magnification, parent_id, copy_index) are empty
//! strings. Reading validates the header, the coarse/subclass pairing, and
//! provenance consistency row by row.

use std::path::Path;

use imbf_core::label::{ClassLabel, Coarse, Magnification, Subclass};
use imbf_core::manifest::{DatasetManifest, ManifestEntry, Provenance, Split};

use crate::error::PipelineError;

pub const HEADER: [&str; 9] = [
    "image_id",
    "path",
    "coarse",
    "subclass",
    "magnification",
    "split",
    "provenance",
    "parent_id",
    "copy_index",
];

pub fn write_manifest(manifest: &DatasetManifest, path: &Path) -> Result<(), PipelineError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    writer.write_record(HEADER).map_err(|e| csv_error(path, e))?;
    for entry in &manifest.entries {
        let (provenance, parent_id, copy_index) = match &entry.provenance {
            Provenance::Original => ("original", String::new(), String::new()),
            Provenance::Augmented {
                copy_index,
                parent_id,
            } => ("augmented", parent_id.clone(), copy_index.to_string()),
        };
        writer
            .write_record([
                entry.image_id.as_str(),
                entry.path.as_str(),
                entry.label.coarse().token(),
                entry.label.subclass().token(),
                entry.magnification.map(|m| m.token()).unwrap_or(""),
                entry.split.token(),
                provenance,
                parent_id.as_str(),
                copy_index.as_str(),
            ])
            .map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|e| PipelineError::io(path, e))?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<DatasetManifest, PipelineError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;

    let headers = reader.headers().map_err(|e| csv_error(path, e))?;
    if headers.iter().ne(HEADER) {
        return Err(bad_format(path, format!("unexpected header {headers:?}")));
    }

    let mut entries = Vec::new();
    for (row_index, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = row_index + 2; // 1-based, after the header line
        let field = |i: usize| record.get(i).unwrap_or("").to_string();

        let coarse = Coarse::from_token(&field(2))
            .ok_or_else(|| bad_format(path, format!("row {row}: unknown coarse class {:?}", field(2))))?;
        let subclass = Subclass::from_token(&field(3))
            .ok_or_else(|| bad_format(path, format!("row {row}: unknown subclass {:?}", field(3))))?;
        let label = ClassLabel::new(coarse, subclass)
            .map_err(|e| bad_format(path, format!("row {row}: {e}")))?;

        let magnification = match field(4).as_str() {
            "" => None,
            token => Some(Magnification::from_token(token).ok_or_else(|| {
                bad_format(path, format!("row {row}: unknown magnification {token:?}"))
            })?),
        };
        let split = Split::from_token(&field(5))
            .ok_or_else(|| bad_format(path, format!("row {row}: unknown split {:?}", field(5))))?;

        let provenance = match field(6).as_str() {
            "original" => {
                if !field(7).is_empty() || !field(8).is_empty() {
                    return Err(bad_format(
                        path,
                        format!("row {row}: original entries must have empty parent_id and copy_index"),
                    ));
                }
                Provenance::Original
            }
            "augmented" => {
                let parent_id = field(7);
                if parent_id.is_empty() {
                    return Err(bad_format(path, format!("row {row}: augmented entry without parent_id")));
                }
                let copy_index: u32 = field(8).parse().map_err(|_| {
                    bad_format(path, format!("row {row}: bad copy_index {:?}", field(8)))
                })?;
                if copy_index == 0 {
                    return Err(bad_format(path, format!("row {row}: copy_index must start at 1")));
                }
                Provenance::Augmented {
                    copy_index,
                    parent_id,
                }
            }
            other => {
                return Err(bad_format(path, format!("row {row}: unknown provenance {other:?}")));
            }
        };

        entries.push(ManifestEntry {
            image_id: field(0),
            path: field(1),
            label,
            magnification,
            split,
            provenance,
        });
    }
    Ok(DatasetManifest::new(entries))
}

fn csv_error(path: &Path, e: csv::Error) -> PipelineError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => PipelineError::io(path, io),
            _ => unreachable!(),
        }
    } else {
        bad_format(path, e.to_string())
    }
}

fn bad_format(path: &Path, msg: String) -> PipelineError {
    PipelineError::FileFormat {
        path: path.to_path_buf(),
        msg,
    }
}
