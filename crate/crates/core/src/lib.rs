//! Multicolor elevation contour maps served over a small WMS.
//!
//! DEM grids become contour features ([`contour`]), SLD documents are parsed
//! and written ([`sld`]), features are selected by OGC filters ([`filter`])
//! and drawn with the painter's model ([`render`]). [`wms`] ties the pieces
//! into GetMap and GetCapabilities handlers that are independent of any
//! HTTP server.

// `!(x > 0.0)` style checks are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contour;
pub mod filter;
pub mod geojson;
pub mod model;
pub mod render;
pub mod sld;
pub mod wms;
mod xml;

pub use filter::FilterExpr;
pub use model::{
    AttributeValue, BoundingBox, Color, Feature, FeatureCollection, Geometry, Point2D,
};
pub use render::{render_map, Canvas, ResolvedStyledLayer};
pub use sld::{SldDocument, UserStyle};
pub use wms::{Service, ServiceOptions, WmsError, WmsResponse};
