//! Dataset and artifact IO: IDX image files, PGM directories, numeric CSV,
//! synthetic Gaussian blobs, and the binary model-file format.

mod blobs;
mod crc32;
mod csv;
mod idx;
mod model_file;
mod pgm;

pub use blobs::{make_blobs, BlobsParams};
pub use crc32::crc32;
pub use csv::{load_csv_matrix, write_csv_matrix};
pub use idx::{load_idx_images, load_idx_labels, write_idx_images, write_idx_labels};
pub use model_file::{
    inspect_bytes, load_model, model_from_bytes, model_to_bytes, save_model, ModelFile,
    SectionInfo, FORMAT_MAJOR, FORMAT_MINOR, MODEL_MAGIC,
};
pub use pgm::{load_pgm, load_pgm_dir, write_pgm};
