//! File formats: CSV manifests, PNG/PPM images, JSON plans and reports, and
//! the binary checkpoint container.

pub mod checkpoint_file;
pub mod image_io;
pub mod manifest_csv;
pub mod plan_json;
pub mod report_json;
