mod common;

use std::sync::OnceLock;

use common::*;
use contourwms::render::decode_png;
use contourwms::wms::{WmsResponse, CAPABILITIES_CONTENT_TYPE, EXCEPTION_CONTENT_TYPE};
use contourwms::Service;
use proptest::prelude::*;

fn svc() -> &'static Service {
    static SVC: OnceLock<Service> = OnceLock::new();
    SVC.get_or_init(service)
}

fn check(resp: &WmsResponse) -> Result<(), TestCaseError> {
    if resp.is_png() {
        prop_assert!(decode_png(&resp.body).is_ok());
    } else if resp.content_type == CAPABILITIES_CONTENT_TYPE {
        prop_assert_eq!(resp.status, 200);
    } else {
        prop_assert_eq!(resp.content_type, EXCEPTION_CONTENT_TYPE);
        let xml = String::from_utf8(resp.body.clone()).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let doc = roxmltree::Document::parse(&xml).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(doc.root_element().tag_name().name(), "ServiceExceptionReport");
    }
    Ok(())
}

fn key() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("REQUEST".to_string()),
        Just("request".to_string()),
        Just("LAYERS".to_string()),
        Just("STYLES".to_string()),
        Just("BBOX".to_string()),
        Just("WIDTH".to_string()),
        Just("HEIGHT".to_string()),
        Just("FORMAT".to_string()),
        Just("BGCOLOR".to_string()),
        Just("SLD_BODY".to_string()),
        Just("REMOTE_OWS_TYPE".to_string()),
        "[A-Za-z_]{0,8}",
    ]
}

fn value() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("GetMap".to_string()),
        Just("GetCapabilities".to_string()),
        Just("Roads,Rivers".to_string()),
        Just("contours".to_string()),
        Just("CenterLine,".to_string()),
        Just("0,0,1,1".to_string()),
        Just("1,1,0,0".to_string()),
        Just("0,0,NaN,1".to_string()),
        Just("-1e308,-1e308,1e308,1e308".to_string()),
        (0u32..70).prop_map(|n| n.to_string()),
        Just("99999999".to_string()),
        Just("image/png".to_string()),
        Just("0xZZZZZZ".to_string()),
        Just("%3CStyledLayerDescriptor%3E".to_string()),
        Just("%ZZ%".to_string()),
        "[ -~]{0,12}",
    ]
}

fn kvp() -> impl Strategy<Value = String> {
    proptest::collection::vec((key(), value()), 0..9).prop_map(|pairs| {
        pairs.into_iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join("&")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn arbitrary_kvp(q in kvp()) {
        check(&svc().handle_get(&q))?;
    }

    #[test]
    fn arbitrary_kvp_bytes(q in "[ -~]{0,80}") {
        check(&svc().handle_get(&q))?;
    }

    #[test]
    fn truncated_and_flipped_post(cut in 0usize..2000, flip in proptest::option::of((0usize..2000, any::<u8>()))) {
        let mut body = post_body(&sld_text("user_styles_mixed.sld"), [0.0, 0.0, 1.0, 1.0], 32, 32).into_bytes();
        if let Some((i, b)) = flip {
            let i = i % body.len();
            body[i] = b;
        }
        body.truncate(cut.min(body.len()).max(body.len().saturating_sub(cut)));
        check(&svc().handle_post(&body))?;
    }

    #[test]
    fn arbitrary_post_bytes(body in proptest::collection::vec(any::<u8>(), 0..300)) {
        check(&svc().handle_post(&body))?;
    }
}
