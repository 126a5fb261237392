//! Serde helpers for extended reals.
//!
//! JSON has no representation for infinities, so non-finite values are
//! written as the strings `"inf"`, `"-inf"` and `"nan"`.

use serde::ser::SerializeTuple;
use serde::Serializer;

pub fn ext_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

struct Ext(f64);

impl serde::Serialize for Ext {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ext_f64(&self.0, s)
    }
}

pub fn ext_pair<S: Serializer>(x: &(f64, f64), s: S) -> Result<S::Ok, S::Error> {
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&Ext(x.0))?;
    t.serialize_element(&Ext(x.1))?;
    t.end()
}

pub fn ext_vec<S: Serializer>(x: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(x.len()))?;
    for v in x {
        seq.serialize_element(&Ext(*v))?;
    }
    seq.end()
}
