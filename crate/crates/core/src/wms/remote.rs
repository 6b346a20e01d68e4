//! Blocking HTTP fetches: remote SLD documents and remote WFS features.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};
use std::time::Duration;

use tracing::{debug, warn};

use crate::geojson::parse_features;
use crate::model::FeatureCollection;

use super::kvp::RemoteOwsType;
use super::WmsError;

/// Timeout and size cap for one remote fetch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FetchLimits {
    pub timeout: Duration,
    pub max_bytes: u64,
}

impl Default for FetchLimits {
    fn default() -> Self {
        FetchLimits {
            timeout: Duration::from_secs(10),
            max_bytes: 1 << 20,
        }
    }
}

/// GETs `url` and returns the body. Non-2xx statuses are errors.
pub fn http_get(url: &str, limits: FetchLimits) -> Result<Vec<u8>, String> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(limits.timeout))
        .build()
        .into();
    let mut resp = agent.get(url).call().map_err(|e| format!("{url}: {e}"))?;
    resp.body_mut()
        .with_config()
        .limit(limits.max_bytes)
        .read_to_vec()
        .map_err(|e| format!("{url}: {e}"))
}

/// `base?REQUEST=GetFeature&TYPENAME=layer`, appending with `&` when `base`
/// already has a query.
pub fn get_feature_url(base_url: &str, layer: &str) -> String {
    let sep = if base_url.contains('?') {
        if base_url.ends_with('?') || base_url.ends_with('&') {
            ""
        } else {
            "&"
        }
    } else {
        "?"
    };
    let typename: String = form_urlencoded::byte_serialize(layer.as_bytes()).collect();
    format!("{base_url}{sep}REQUEST=GetFeature&TYPENAME={typename}")
}

/// Fetches `layer` from a remote WFS that answers GetFeature with GeoJSON.
pub fn fetch_remote_features(
    ows_type: RemoteOwsType,
    base_url: &str,
    layer: &str,
    limits: FetchLimits,
) -> Result<FeatureCollection, WmsError> {
    if ows_type == RemoteOwsType::Wcs {
        return Err(WmsError::NotImplemented("REMOTE_OWS_TYPE=WCS".into()));
    }
    let url = get_feature_url(base_url, layer);
    debug!(%url, "fetching remote features");
    let body = http_get(&url, limits).map_err(WmsError::RemoteFetchFailed)?;
    let text = String::from_utf8(body).map_err(|e| WmsError::RemoteParseFailed(format!("{url}: {e}")))?;
    parse_features(&text, layer).map_err(|e| WmsError::RemoteParseFailed(format!("{url}: {e}")))
}

/// Process-lifetime cache of remote feature collections keyed by (url, layer).
/// Entries are inserted whole, so readers never see a partial collection.
#[derive(Debug, Default)]
pub struct RemoteCache {
    entries: RwLock<HashMap<(String, String), Arc<FeatureCollection>>>,
}

impl RemoteCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, url: &str, layer: &str) -> Option<Arc<FeatureCollection>> {
        let map = self.entries.read().unwrap_or_else(|p| p.into_inner());
        map.get(&(url.to_string(), layer.to_string())).cloned()
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap_or_else(|p| p.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Returns the cached entry, fetching it on a miss. Failures are not cached.
    pub fn get_or_fetch(
        &self,
        ows_type: RemoteOwsType,
        url: &str,
        layer: &str,
        limits: FetchLimits,
    ) -> Result<Arc<FeatureCollection>, WmsError> {
        if ows_type == RemoteOwsType::Wcs {
            return Err(WmsError::NotImplemented("REMOTE_OWS_TYPE=WCS".into()));
        }
        if let Some(hit) = self.get(url, layer) {
            return Ok(hit);
        }
        let fetched = fetch_remote_features(ows_type, url, layer, limits).inspect_err(|e| {
            warn!(%url, %layer, error = %e, "remote fetch failed");
        })?;
        let mut map = self.entries.write().unwrap_or_else(|p| p.into_inner());
        // A concurrent fetch may have won; keep the first entry.
        let entry = map
            .entry((url.to_string(), layer.to_string()))
            .or_insert_with(|| Arc::new(fetched));
        Ok(Arc::clone(entry))
    }
}
