//! JSON emission with fixed-width floats.
//!
//! Every f64 is printed with 17 significant digits in scientific notation so
//! output is byte-identical across runs and round-trips exactly to the same
//! bits.

use std::io;

use serde::Serialize;

struct SigDigitFormatter;

impl serde_json::ser::Formatter for SigDigitFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes `value` to compact JSON with 17-significant-digit floats and a
/// trailing newline.
pub fn to_json_bytes<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigitFormatter);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_17_significant_digits() {
        let bytes = to_json_bytes(&serde_json::json!({"v": 0.1})).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(text, "{\"v\":1.0000000000000001e-1}\n");
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["v"].as_f64().unwrap().to_bits(), 0.1f64.to_bits());
    }
}
