//! Deterministic JSON output with 17 significant digits for every float.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

/// Compact formatter writing floats as `d.dddddddddddddddde±x`; non-finite
/// values become `null`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SigFigFormatter;

impl SigFigFormatter {
    fn write_float<W: ?Sized + io::Write>(writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{:.16e}", value)
        } else {
            writer.write_all(b"null")
        }
    }
}

impl Formatter for SigFigFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        Self::write_float(writer, value)
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        Self::write_float(writer, value as f64)
    }
}

/// Serializes `value` compactly with 17 significant digits per float.
pub fn to_json_string<S: Serialize + ?Sized>(value: &S) -> String {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, SigFigFormatter);
    value.serialize(&mut ser).expect("serialization into memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Whether a tabulated value has a closed form or was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Paper,
    Computed,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_digits() {
        let s = to_json_string(&serde_json::json!({"x": 0.1, "y": [1.0, f64::NAN]}));
        assert_eq!(s, r#"{"x":1.0000000000000001e-1,"y":[1.0000000000000000e0,null]}"#);
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }
}
