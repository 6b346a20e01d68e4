//! GetMap and GetCapabilities over a transport-neutral request/response pair.
//!
//! [`Service`] owns the catalog and the remote-feature cache. HTTP servers
//! hand it a query string or POST body and send back the [`WmsResponse`].

mod capabilities;
mod catalog;
mod exception;
mod kvp;
mod post;
mod remote;
mod resolve;

use thiserror::Error;
use tracing::{debug, info};

use crate::render::{encode_png, render_map_with_report, RenderReport};
use crate::sld::{decode_xml_bytes, parse_sld, SldDocument};

pub use capabilities::{capabilities_xml, CAPABILITIES_CONTENT_TYPE};
pub use catalog::{
    load_config, parse_config, CatalogError, ConfigError, DataEntry, LoadedConfig, ServerCatalog, ServerConfig,
    StyleEntry,
};
pub use exception::{service_exception_xml, EXCEPTION_CONTENT_TYPE};
pub use kvp::{parse_kvp, query_params, GetMapRequest, RemoteOwsType, PNG_FORMAT};
pub use post::parse_post_getmap;
pub use remote::{fetch_remote_features, get_feature_url, http_get, FetchLimits, RemoteCache};
pub use resolve::{
    resolve_style, resolve_styled_layers, resolve_styles, FeatureSource, StyleResolution, StyleSource,
    StyledLayerRequest,
};

/// Every failure a request can produce; each maps to a ServiceException code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum WmsError {
    #[error("missing required parameter {0}")]
    MissingParameter(String),
    #[error("invalid BBOX: {0}")]
    InvalidBbox(String),
    #[error("{layers} layers but {styles} styles")]
    LayerStyleCountMismatch { layers: usize, styles: usize },
    #[error("invalid {parameter}: {message}")]
    InvalidParameterValue { parameter: String, message: String },
    #[error("unsupported format {0:?}; only image/png is served")]
    InvalidFormat(String),
    #[error("unsupported request {0:?}")]
    OperationNotSupported(String),
    #[error("layer {0:?} is not defined")]
    LayerNotDefined(String),
    #[error("style {style:?} is not defined for layer {layer:?}")]
    StyleNotDefined { layer: String, style: String },
    #[error("could not fetch SLD: {0}")]
    SldFetchFailed(String),
    #[error("could not parse SLD: {0}")]
    SldParseFailed(String),
    #[error("malformed XML request: {0}")]
    XmlSyntaxError(String),
    #[error("remote feature fetch failed: {0}")]
    RemoteFetchFailed(String),
    #[error("remote features unreadable: {0}")]
    RemoteParseFailed(String),
    #[error("not implemented: {0}")]
    NotImplemented(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl WmsError {
    /// The ServiceException `code` attribute.
    pub fn code(&self) -> &'static str {
        match self {
            WmsError::MissingParameter(_) => "MissingParameter",
            WmsError::InvalidBbox(_) => "InvalidBbox",
            WmsError::LayerStyleCountMismatch { .. } => "LayerStyleCountMismatch",
            WmsError::InvalidParameterValue { .. } => "InvalidParameterValue",
            WmsError::InvalidFormat(_) => "InvalidFormat",
            WmsError::OperationNotSupported(_) => "OperationNotSupported",
            WmsError::LayerNotDefined(_) => "LayerNotDefined",
            WmsError::StyleNotDefined { .. } => "StyleNotDefined",
            WmsError::SldFetchFailed(_) => "SldFetchFailed",
            WmsError::SldParseFailed(_) => "SldParseFailed",
            WmsError::XmlSyntaxError(_) => "XmlSyntaxError",
            WmsError::RemoteFetchFailed(_) => "RemoteFetchFailed",
            WmsError::RemoteParseFailed(_) => "RemoteParseFailed",
            WmsError::NotImplemented(_) => "NotImplemented",
            WmsError::Internal(_) => "NoApplicableCode",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ServiceOptions {
    /// Send ServiceExceptions with status 200 (pre-1.3 WMS habit) instead of 400.
    pub legacy_status_200: bool,
    pub fetch_limits: FetchLimits,
}

/// A transport-neutral HTTP response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WmsResponse {
    pub status: u16,
    pub content_type: &'static str,
    pub body: Vec<u8>,
}

impl WmsResponse {
    pub fn is_png(&self) -> bool {
        self.content_type == PNG_FORMAT
    }
}

/// A successful GetMap with its resolution record.
#[derive(Debug, Clone)]
pub struct RenderedMap {
    pub png: Vec<u8>,
    pub resolutions: Vec<StyleResolution>,
    pub report: RenderReport,
}

struct RemoteSource<'a> {
    cache: &'a RemoteCache,
    ows_type: RemoteOwsType,
    url: &'a str,
    limits: FetchLimits,
}

impl FeatureSource for RemoteSource<'_> {
    fn features(&self, layer: &str) -> Result<std::sync::Arc<crate::model::FeatureCollection>, WmsError> {
        self.cache.get_or_fetch(self.ows_type, self.url, layer, self.limits)
    }
}

#[derive(Debug)]
pub struct Service {
    catalog: ServerCatalog,
    options: ServiceOptions,
    remote: RemoteCache,
}

impl Service {
    pub fn new(catalog: ServerCatalog, options: ServiceOptions) -> Self {
        Service {
            catalog,
            options,
            remote: RemoteCache::new(),
        }
    }

    pub fn from_config(loaded: &LoadedConfig) -> Self {
        Service::new(
            loaded.catalog.clone(),
            ServiceOptions {
                legacy_status_200: loaded.config.legacy_status_200,
                ..ServiceOptions::default()
            },
        )
    }

    pub fn catalog(&self) -> &ServerCatalog {
        &self.catalog
    }

    pub fn remote_cache(&self) -> &RemoteCache {
        &self.remote
    }

    pub fn capabilities(&self) -> String {
        capabilities_xml(&self.catalog)
    }

    /// Dispatches a KVP request on its REQUEST parameter.
    pub fn handle_get(&self, query: &str) -> WmsResponse {
        let params = query_params(query);
        let result = match params.get("REQUEST").map(|r| r.trim().to_ascii_lowercase()) {
            None => Err(WmsError::MissingParameter("REQUEST".into())),
            Some(r) if r == "getcapabilities" => {
                return WmsResponse {
                    status: 200,
                    content_type: CAPABILITIES_CONTENT_TYPE,
                    body: self.capabilities().into_bytes(),
                }
            }
            Some(r) if r == "getmap" => kvp::from_params(&params).and_then(|req| {
                let sld = self.request_sld(&req)?;
                self.get_map(&req, sld.as_ref())
            }),
            Some(_) => Err(WmsError::OperationNotSupported(params["REQUEST"].clone())),
        };
        self.respond(result)
    }

    /// Handles an XML GetMap body.
    pub fn handle_post(&self, body: &[u8]) -> WmsResponse {
        let result = parse_post_getmap(body).and_then(|(req, sld)| self.get_map(&req, Some(&sld)));
        self.respond(result)
    }

    /// GetMap from a KVP string, for callers that want the error itself.
    pub fn get_map_kvp(&self, query: &str) -> Result<RenderedMap, WmsError> {
        let req = parse_kvp(query)?;
        let sld = self.request_sld(&req)?;
        self.get_map(&req, sld.as_ref())
    }

    /// The SLD a request refers to: SLD (fetched) wins over SLD_BODY.
    pub fn request_sld(&self, req: &GetMapRequest) -> Result<Option<SldDocument>, WmsError> {
        if let Some(url) = &req.sld_url {
            let bytes = http_get(url, self.options.fetch_limits).map_err(WmsError::SldFetchFailed)?;
            let xml = decode_xml_bytes(&bytes).map_err(|e| WmsError::SldParseFailed(e.to_string()))?;
            return parse_sld(&xml)
                .map(Some)
                .map_err(|e| WmsError::SldParseFailed(e.to_string()));
        }
        match &req.sld_body {
            Some(body) => parse_sld(body)
                .map(Some)
                .map_err(|e| WmsError::SldParseFailed(e.to_string())),
            None => Ok(None),
        }
    }

    /// Resolves, renders and encodes one GetMap.
    pub fn get_map(&self, req: &GetMapRequest, sld: Option<&SldDocument>) -> Result<RenderedMap, WmsError> {
        let styled = match (req.remote_ows_type, &req.remote_ows_url) {
            (Some(ows_type), Some(url)) => {
                let source = RemoteSource {
                    cache: &self.remote,
                    ows_type,
                    url,
                    limits: self.options.fetch_limits,
                };
                resolve_styled_layers(req, &self.catalog, sld, &source, true)?
            }
            _ => resolve_styled_layers(req, &self.catalog, sld, &self.catalog, false)?,
        };
        let (canvas, report) = render_map_with_report(&styled.layers, &req.bbox, req.width, req.height, req.bgcolor)
            .map_err(|e| WmsError::Internal(e.to_string()))?;
        let png = encode_png(&canvas).map_err(|e| WmsError::Internal(e.to_string()))?;
        debug!(
            layers = styled.layers.len(),
            labels = report.labels.len(),
            bytes = png.len(),
            "GetMap rendered"
        );
        Ok(RenderedMap {
            png,
            resolutions: styled.resolutions,
            report,
        })
    }

    pub fn exception_response(&self, err: &WmsError) -> WmsResponse {
        WmsResponse {
            status: if self.options.legacy_status_200 { 200 } else { 400 },
            content_type: EXCEPTION_CONTENT_TYPE,
            body: service_exception_xml(err).into_bytes(),
        }
    }

    fn respond(&self, result: Result<RenderedMap, WmsError>) -> WmsResponse {
        match result {
            Ok(map) => WmsResponse {
                status: 200,
                content_type: PNG_FORMAT,
                body: map.png,
            },
            Err(e) => {
                info!(code = e.code(), error = %e, "GetMap failed");
                self.exception_response(&e)
            }
        }
    }
}
