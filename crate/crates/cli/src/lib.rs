//! Document formats and output envelope behind the fptrace binary,
//! exposed as a library so the corpus generator and the golden tests
//! share one serializer.

pub mod doc;
pub mod output;
