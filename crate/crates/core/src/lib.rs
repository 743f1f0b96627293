pub mod bounds;
pub mod codec;
pub mod dcode;
pub mod drm;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod partition;
pub mod reproduce;
pub mod space;
