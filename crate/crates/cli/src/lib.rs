//! Command-line front end: the input file format, certificates and the
//! `morphic-gate` commands.

pub mod app;
pub mod certificate;
pub mod input;
pub mod verify;

pub use app::{execute, run, Cli, Outcome};
pub use certificate::CertificateDocument;
pub use input::{parse_input, InputDocument, ParseError, ParseErrorKind};
pub use verify::{verify_certificate, VerifyError};
