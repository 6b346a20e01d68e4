use thiserror::Error;

use super::Canvas;

#[derive(Debug, Error)]
pub enum PngError {
    #[error("PNG encoding failed: {0}")]
    Encode(#[from] png::EncodingError),
    #[error("PNG decoding failed: {0}")]
    Decode(#[from] png::DecodingError),
    #[error("unsupported PNG layout: {0}")]
    Unsupported(String),
}

/// Encodes an 8-bit RGBA PNG. The output depends only on the pixels.
pub fn encode_png(canvas: &Canvas) -> Result<Vec<u8>, PngError> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, canvas.width(), canvas.height());
        enc.set_color(png::ColorType::Rgba);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header()?;
        writer.write_image_data(canvas.pixels())?;
        writer.finish()?;
    }
    Ok(out)
}

/// Decodes an 8-bit RGBA PNG, as written by [`encode_png`].
pub fn decode_png(bytes: &[u8]) -> Result<Canvas, PngError> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder.read_info()?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| PngError::Unsupported("image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf)?;
    if info.color_type != png::ColorType::Rgba || info.bit_depth != png::BitDepth::Eight {
        return Err(PngError::Unsupported(format!("{:?}/{:?}", info.color_type, info.bit_depth)));
    }
    buf.truncate(info.buffer_size());
    Canvas::from_rgba(info.width, info.height, buf).map_err(|e| PngError::Unsupported(e.to_string()))
}
