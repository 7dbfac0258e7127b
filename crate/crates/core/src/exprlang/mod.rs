//! Expression language: grammar, parser, printer and the monotonicity calculus.

mod ast;
mod certify;
mod interval;
mod parser;
mod printer;

pub use ast::{Expr, ExprKind, FamilyNode, Span};
pub use certify::{certify, certify_all, certify_class, print_certificate, Certificate, CertifyError, MonotoneClass};
pub use interval::{format_rational, Bound, Interval};
pub use parser::{parse, parse_expr, parse_family_spec, parse_interval, ParseError, Parsed};
pub use printer::print;
