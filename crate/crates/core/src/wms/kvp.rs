use std::collections::HashMap;
use std::str::FromStr;

use crate::model::{BoundingBox, Color};
use crate::render::MAX_DIMENSION;

use super::WmsError;

pub const PNG_FORMAT: &str = "image/png";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemoteOwsType {
    Wfs,
    Wcs,
}

impl FromStr for RemoteOwsType {
    type Err = WmsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "WFS" => Ok(RemoteOwsType::Wfs),
            "WCS" => Ok(RemoteOwsType::Wcs),
            _ => Err(WmsError::InvalidParameterValue {
                parameter: "REMOTE_OWS_TYPE".into(),
                message: format!("{s:?} is not WFS or WCS"),
            }),
        }
    }
}

/// A validated GetMap request.
#[derive(Debug, Clone, PartialEq)]
pub struct GetMapRequest {
    pub version: Option<String>,
    /// Empty in SLD-driven requests; the SLD's layer sequence is used instead.
    pub layers: Vec<String>,
    /// Same length as `layers`; `""` selects the default style.
    pub styles: Vec<String>,
    pub bbox: BoundingBox,
    pub width: u32,
    pub height: u32,
    pub format: String,
    pub sld_url: Option<String>,
    pub sld_body: Option<String>,
    pub remote_ows_type: Option<RemoteOwsType>,
    pub remote_ows_url: Option<String>,
    pub bgcolor: Color,
}

impl GetMapRequest {
    /// A request for `layers` with default styles, PNG output and a white background.
    pub fn new(layers: Vec<String>, bbox: BoundingBox, width: u32, height: u32) -> Self {
        GetMapRequest {
            version: None,
            styles: vec![String::new(); layers.len()],
            layers,
            bbox,
            width,
            height,
            format: PNG_FORMAT.into(),
            sld_url: None,
            sld_body: None,
            remote_ows_type: None,
            remote_ows_url: None,
            bgcolor: Color::WHITE,
        }
    }
}

/// Decodes a query string into upper-cased keys; the last duplicate wins.
pub fn query_params(query: &str) -> HashMap<String, String> {
    let query = query.strip_prefix('?').unwrap_or(query);
    form_urlencoded::parse(query.as_bytes())
        .map(|(k, v)| (k.trim().to_ascii_uppercase(), v.into_owned()))
        .collect()
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|p| p.trim().to_string()).collect()
}

pub(crate) fn parse_dimension(name: &str, value: &str) -> Result<u32, WmsError> {
    let invalid = |message: String| WmsError::InvalidParameterValue {
        parameter: name.into(),
        message,
    };
    let v: u32 = value.trim().parse().map_err(|_| invalid(format!("{value:?} is not a pixel count")))?;
    if v == 0 || v > MAX_DIMENSION {
        return Err(invalid(format!("{v} outside 1..={MAX_DIMENSION}")));
    }
    Ok(v)
}

pub(crate) fn check_format(format: &str) -> Result<String, WmsError> {
    let f = format.trim();
    if f.eq_ignore_ascii_case(PNG_FORMAT) {
        Ok(PNG_FORMAT.into())
    } else {
        Err(WmsError::InvalidFormat(f.to_string()))
    }
}

pub(crate) fn parse_bgcolor(value: &str) -> Result<Color, WmsError> {
    Color::parse_wms(value.trim()).map_err(|e| WmsError::InvalidParameterValue {
        parameter: "BGCOLOR".into(),
        message: e.to_string(),
    })
}

/// Parses GetMap KVP parameters. Names are case-insensitive.
pub fn parse_kvp(query: &str) -> Result<GetMapRequest, WmsError> {
    from_params(&query_params(query))
}

pub(crate) fn from_params(p: &HashMap<String, String>) -> Result<GetMapRequest, WmsError> {
    let get = |k: &str| p.get(k).map(String::as_str);
    let require = |k: &str| get(k).ok_or_else(|| WmsError::MissingParameter(k.to_string()));
    require("REQUEST")?;
    let bbox_text = require("BBOX")?;
    let width = parse_dimension("WIDTH", require("WIDTH")?)?;
    let height = parse_dimension("HEIGHT", require("HEIGHT")?)?;
    let sld_url = get("SLD").map(str::to_string).filter(|s| !s.trim().is_empty());
    let sld_body = get("SLD_BODY").map(str::to_string).filter(|s| !s.trim().is_empty());
    let layers = match get("LAYERS").map(str::trim) {
        Some(l) if !l.is_empty() => split_list(l),
        _ => {
            if sld_url.is_none() && sld_body.is_none() {
                return Err(WmsError::MissingParameter("LAYERS".into()));
            }
            Vec::new()
        }
    };
    if layers.iter().any(String::is_empty) {
        return Err(WmsError::InvalidParameterValue {
            parameter: "LAYERS".into(),
            message: "empty layer name".into(),
        });
    }
    let styles = match get("STYLES").map(str::trim) {
        None | Some("") => vec![String::new(); layers.len()],
        Some(s) => split_list(s),
    };
    if styles.len() != layers.len() {
        return Err(WmsError::LayerStyleCountMismatch {
            layers: layers.len(),
            styles: styles.len(),
        });
    }
    let bbox = BoundingBox::from_str(bbox_text).map_err(|e| WmsError::InvalidBbox(e.to_string()))?;
    let format = match get("FORMAT") {
        Some(f) => check_format(f)?,
        None => PNG_FORMAT.into(),
    };
    let bgcolor = match get("BGCOLOR") {
        Some(c) => parse_bgcolor(c)?,
        None => Color::WHITE,
    };
    let remote_ows_type = get("REMOTE_OWS_TYPE").map(RemoteOwsType::from_str).transpose()?;
    let remote_ows_url = get("REMOTE_OWS_URL").map(str::to_string);
    match (remote_ows_type, &remote_ows_url) {
        (Some(_), None) => return Err(WmsError::MissingParameter("REMOTE_OWS_URL".into())),
        (None, Some(_)) => return Err(WmsError::MissingParameter("REMOTE_OWS_TYPE".into())),
        _ => {}
    }
    Ok(GetMapRequest {
        version: get("VERSION").map(str::to_string),
        layers,
        styles,
        bbox,
        width,
        height,
        format,
        sld_url,
        sld_body,
        remote_ows_type,
        remote_ows_url,
        bgcolor,
    })
}
