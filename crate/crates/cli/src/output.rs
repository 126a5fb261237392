//! JSON-lines records with fixed 17-significant-digit floats.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{Map, Value};

/// Writes every `f64` as `{:.16e}`.
pub struct FixedFloat;

impl Formatter for FixedFloat {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }
}

/// Serializes `value` on one line with [`FixedFloat`].
pub fn to_line<T: Serialize>(value: &T) -> io::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloat);
    value.serialize(&mut ser).map_err(io::Error::other)?;
    String::from_utf8(buf).map_err(io::Error::other)
}

/// Object with `"record": kind` first, followed by the fields of `body`
/// (or `{"value": body}` when `body` is not an object).
pub fn record<T: Serialize>(kind: &str, body: &T) -> Value {
    let mut map = Map::new();
    map.insert("record".into(), Value::String(kind.into()));
    match serde_json::to_value(body).unwrap_or(Value::Null) {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("value".into(), other);
        }
    }
    Value::Object(map)
}

/// Record stream. In quiet mode only the last record is written, at
/// [`Emitter::finish`].
pub struct Emitter<W: Write> {
    out: W,
    quiet: bool,
    held: Option<Value>,
}

impl<W: Write> Emitter<W> {
    pub fn new(out: W, quiet: bool) -> Self {
        Self {
            out,
            quiet,
            held: None,
        }
    }

    pub fn emit(&mut self, value: Value) -> io::Result<()> {
        if self.quiet {
            self.held = Some(value);
            Ok(())
        } else {
            self.write(&value)
        }
    }

    fn write(&mut self, value: &Value) -> io::Result<()> {
        let line = to_line(value)?;
        writeln!(self.out, "{line}")?;
        self.out.flush()
    }

    pub fn finish(mut self) -> io::Result<()> {
        if let Some(v) = self.held.take() {
            self.write(&v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_seventeen_digits() {
        let line = to_line(&json!({"a": 0.1, "b": -2.0, "c": 3})).unwrap();
        assert_eq!(
            line,
            r#"{"a":1.0000000000000001e-1,"b":-2.0000000000000000e0,"c":3}"#
        );
        let back: Value = serde_json::from_str(&line).unwrap();
        assert_eq!(back["a"].as_f64(), Some(0.1));
    }

    #[test]
    fn record_puts_kind_first_and_quiet_keeps_last() {
        let r = record("x", &json!({"z": 1, "a": 2}));
        assert_eq!(to_line(&r).unwrap(), r#"{"record":"x","z":1,"a":2}"#);
        let mut buf = Vec::new();
        let mut em = Emitter::new(&mut buf, true);
        em.emit(record("first", &1)).unwrap();
        em.emit(record("last", &2)).unwrap();
        em.finish().unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "{\"record\":\"last\",\"value\":2}\n"
        );
    }
}
