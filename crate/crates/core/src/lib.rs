pub mod calibration;
pub mod error;
pub mod field_ops;
pub mod mesh_io;
pub mod reliability;
pub mod strain_life;
pub mod sum;

pub use error::{Error, ErrorKind, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/strain-life.md")]
    struct StrainLife;
    #[doc = include_str!("../../../book/src/surface-fields.md")]
    struct SurfaceFields;
    #[doc = include_str!("../../../book/src/weakest-link.md")]
    struct WeakestLink;
    #[doc = include_str!("../../../book/src/calibration.md")]
    struct Calibration;
}
