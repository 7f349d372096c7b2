//! GND standardization, owl:sameAs construction and lazy per-GND extraction.

mod endpoint;
mod extract;
mod gnd;
mod transport;

pub use endpoint::{build_lookup_query, EndpointError, EndpointKind, EndpointSpec};
pub use extract::{lazy_extract, lazy_extract_with, ErrorClass, ExtractionReport, ItemReport, Outcome};
pub use gnd::{
    dnb_document_url, dnb_gnd_url, emit_sameas, gnd_subjects, normalize_gnd, standardize_gnd, GndError, GndId,
    SameAsLinks,
};
pub use transport::{
    HttpTransport, Recorded, RecordedTransport, Recording, Request, Response, Transport, TransportError,
};
