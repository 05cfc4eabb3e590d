pub mod gamma;
pub mod linalg;
pub mod module;
pub mod fields;
pub mod pairing;
pub mod charts;
pub mod report;
