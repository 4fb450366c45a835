//! JSON encodings of the crate's exact objects, and parsers for the ones the
//! command line accepts as input.
//!
//! Conventions: rationals are strings `"p"` or `"p/q"`; subsets are their
//! sorted comma-joined label keys (`"1,2,4"`); objects with map-like content
//! use sorted keys throughout, so a fixed input always serializes to the same
//! bytes.

use crate::circle::CirclePoint;
use crate::direction::DirectionClass;
use crate::kn::KnReport;
use crate::logdf::{
    Bundle, DfStructure, LatticeVec, LogMorphism, MorphKind, SectionKind,
};
use crate::nested::{NestedCollection, StableTree};
use crate::points::{ConfigTree, FMPoint, FramedPoint};
use crate::ratio::{q_from_string, q_to_string, Q};
use crate::screen::{Covector, Screen};
use crate::sets::{Subset, Surjection};
use crate::{Error, Result};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

// ---------------------------------------------------------------------------
// Rationals and vectors
// ---------------------------------------------------------------------------

pub fn q_value(q: &Q) -> Value {
    Value::String(q_to_string(q))
}

pub fn q_from_value(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => q_from_string(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(crate::ratio::qi(i))
            } else {
                Err(Error::invalid_input(format!(
                    "non-integer number {n} cannot be read exactly; write it as \"p/q\""
                )))
            }
        }
        other => Err(Error::invalid_input(format!(
            "expected a rational string, found {other}"
        ))),
    }
}

pub fn vector_value(v: &[Q]) -> Value {
    Value::Array(v.iter().map(q_value).collect())
}

pub fn vector_from_value(v: &Value) -> Result<Vec<Q>> {
    v.as_array()
        .ok_or_else(|| Error::invalid_input(format!("expected a coordinate array, found {v}")))?
        .iter()
        .map(q_from_value)
        .collect()
}

fn expect_object<'v>(v: &'v Value, what: &str) -> Result<&'v Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::invalid_input(format!("expected a JSON object for {what}, found {v}")))
}

fn parse_label(key: &str) -> Result<u32> {
    key.trim()
        .parse::<u32>()
        .map_err(|_| Error::invalid_input(format!("bad label {key:?}")))
}

// ---------------------------------------------------------------------------
// Directions and configurations
// ---------------------------------------------------------------------------

pub fn direction_value(d: &DirectionClass) -> Value {
    let vectors: Map<String, Value> = d
        .vectors()
        .iter()
        .map(|(l, v)| (l.to_string(), vector_value(v)))
        .collect();
    json!({ "dim": d.dim(), "vectors": vectors })
}

pub fn config_tree_value(t: &ConfigTree) -> Value {
    match t {
        ConfigTree::Leaf(l) => json!({ "leaf": l }),
        ConfigTree::Node(children) => Value::Array(
            children
                .iter()
                .map(|(c, off)| json!({ "offset": vector_value(off), "subtree": config_tree_value(c) }))
                .collect(),
        ),
    }
}

pub fn config_tree_from_value(v: &Value) -> Result<ConfigTree> {
    if let Some(arr) = v.as_array() {
        let children = arr
            .iter()
            .map(|c| {
                let o = expect_object(c, "a tree child")?;
                let off = vector_from_value(
                    o.get("offset")
                        .ok_or_else(|| Error::invalid_input("tree child missing \"offset\""))?,
                )?;
                let sub = config_tree_from_value(
                    o.get("subtree")
                        .ok_or_else(|| Error::invalid_input("tree child missing \"subtree\""))?,
                )?;
                Ok((sub, off))
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(ConfigTree::Node(children));
    }
    let o = expect_object(v, "a configuration tree")?;
    let leaf = o
        .get("leaf")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::invalid_input("a tree node is an array of children or {\"leaf\": n}"))?;
    Ok(ConfigTree::Leaf(leaf as u32))
}

pub fn fm_point_value(p: &FMPoint) -> Value {
    json!({ "dim": p.dim(), "tree": config_tree_value(p.root()) })
}

/// Accepts `{"dim", "tree": ...}`, `{"dim", "config": {label: [coords]}}`
/// (one free configuration, canonicalized on read), or `{"dim", "unit": label}`.
pub fn fm_point_from_value(v: &Value) -> Result<FMPoint> {
    let o = expect_object(v, "a point")?;
    let dim = o
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::invalid_input("point missing integer \"dim\""))? as usize;
    if let Some(t) = o.get("tree") {
        return FMPoint::from_tree(dim, config_tree_from_value(t)?);
    }
    if let Some(c) = o.get("config") {
        let co = expect_object(c, "a configuration")?;
        let points = co
            .iter()
            .map(|(k, val)| Ok((parse_label(k)?, vector_from_value(val)?)))
            .collect::<Result<Vec<_>>>()?;
        return FMPoint::from_config(dim, points);
    }
    if let Some(u) = o.get("unit").and_then(Value::as_u64) {
        return FMPoint::unit(dim, u as u32);
    }
    Err(Error::invalid_input(
        "point needs one of \"tree\", \"config\", or \"unit\"",
    ))
}

pub fn circle_value(c: &CirclePoint) -> Value {
    json!({ "cos": q_value(c.cos()), "sin": q_value(c.sin()) })
}

pub fn circle_from_value(v: &Value) -> Result<CirclePoint> {
    let o = expect_object(v, "a circle point")?;
    let c = q_from_value(
        o.get("cos")
            .ok_or_else(|| Error::invalid_input("circle point missing \"cos\""))?,
    )?;
    let s = q_from_value(
        o.get("sin")
            .ok_or_else(|| Error::invalid_input("circle point missing \"sin\""))?,
    )?;
    CirclePoint::new(c, s)
}

pub fn framed_point_value(p: &FramedPoint) -> Value {
    let frames: Map<String, Value> = p
        .frames()
        .iter()
        .map(|(l, c)| (l.to_string(), circle_value(c)))
        .collect();
    json!({ "point": fm_point_value(p.point()), "frames": frames })
}

pub fn framed_point_from_value(v: &Value) -> Result<FramedPoint> {
    let o = expect_object(v, "a framed point")?;
    let point = fm_point_from_value(
        o.get("point")
            .ok_or_else(|| Error::invalid_input("framed point missing \"point\""))?,
    )?;
    let fo = expect_object(
        o.get("frames")
            .ok_or_else(|| Error::invalid_input("framed point missing \"frames\""))?,
        "frames",
    )?;
    let mut frames = BTreeMap::new();
    for (k, val) in fo {
        frames.insert(parse_label(k)?, circle_from_value(val)?);
    }
    FramedPoint::new(point, frames)
}

// ---------------------------------------------------------------------------
// Screens
// ---------------------------------------------------------------------------

fn covector_value(c: &Covector) -> Value {
    let entries: Map<String, Value> = c
        .iter()
        .map(|((label, coord), q)| (format!("{label}:{coord}"), q_value(q)))
        .collect();
    Value::Object(entries)
}

fn covector_from_value(v: &Value) -> Result<Covector> {
    let o = expect_object(v, "a covector")?;
    let mut out = Covector::new();
    for (k, val) in o {
        let (label, coord) = k
            .split_once(':')
            .ok_or_else(|| Error::invalid_input(format!("covector key {k:?} is not \"label:coord\"")))?;
        let label = parse_label(label)?;
        let coord: usize = coord
            .trim()
            .parse()
            .map_err(|_| Error::invalid_input(format!("bad coordinate index {coord:?}")))?;
        out.insert((label, coord), q_from_value(val)?);
    }
    Ok(out)
}

pub fn screen_value(s: &Screen) -> Value {
    let components: Map<String, Value> = s
        .components()
        .map(|(i, c)| (i.key(), covector_value(c)))
        .collect();
    json!({ "dim": s.dim(), "index": s.index_set().key(), "components": components })
}

pub fn screen_from_value(v: &Value) -> Result<Screen> {
    let o = expect_object(v, "a screen")?;
    let dim = o
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::invalid_input("screen missing integer \"dim\""))? as usize;
    let index = Subset::parse_key(
        o.get("index")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::invalid_input("screen missing subset-key \"index\""))?,
    )?;
    if index.len() <= 1 {
        return Screen::unit(dim, index);
    }
    let co = expect_object(
        o.get("components")
            .ok_or_else(|| Error::invalid_input("screen missing \"components\""))?,
        "screen components",
    )?;
    let mut components = BTreeMap::new();
    for (k, val) in co {
        components.insert(Subset::parse_key(k)?, covector_from_value(val)?);
    }
    Screen::new(dim, index, components)
}

// ---------------------------------------------------------------------------
// Divisor-lattice structures and morphisms
// ---------------------------------------------------------------------------

fn lattice_key(path: &[u32], set: Subset) -> String {
    if path.is_empty() {
        set.key()
    } else {
        let p: Vec<String> = path.iter().map(|t| t.to_string()).collect();
        format!("{}/{}", p.join("."), set.key())
    }
}

pub fn lattice_value(v: &LatticeVec) -> Value {
    let entries: Map<String, Value> = v
        .iter()
        .map(|((path, set), c)| (lattice_key(path, *set), json!(c)))
        .collect();
    Value::Object(entries)
}

fn bundle_section_value(b: &Bundle) -> Value {
    match b.section {
        SectionKind::Zero => json!("zero"),
        SectionKind::Unit => json!("unit"),
        SectionKind::Divisor => {
            if let crate::logdf::BundleKind::Div(i) = &b.tag.kind {
                json!(format!("divisor:{}", i.key()))
            } else {
                json!("divisor")
            }
        }
    }
}

pub fn section_kind_value(s: SectionKind) -> Value {
    match s {
        SectionKind::Divisor => json!("divisor"),
        SectionKind::Zero => json!("zero"),
        SectionKind::Unit => json!("unit"),
    }
}

pub fn structure_value(s: &DfStructure) -> Value {
    Value::Array(
        s.bundles
            .iter()
            .map(|b| {
                json!({
                    "bundle": b.tag.key(),
                    "class": lattice_value(&b.class),
                    "section": bundle_section_value(b),
                })
            })
            .collect(),
    )
}

pub fn morphism_value(m: &LogMorphism) -> Value {
    let rows: Vec<Value> = m
        .rows
        .iter()
        .enumerate()
        .map(|(j, row)| {
            let exps: Map<String, Value> = row
                .exponents
                .iter()
                .map(|(i, e)| (m.source.bundles[*i].tag.key(), json!(e)))
                .collect();
            json!({
                "target": m.target.bundles[j].tag.key(),
                "exponents": exps,
                "section": section_kind_value(row.section),
            })
        })
        .collect();
    json!({
        "kind": match m.kind { MorphKind::StrictDf => "df", MorphKind::Virtual => "virtual" },
        "source": structure_value(&m.source),
        "target": structure_value(&m.target),
        "rows": rows,
    })
}

// ---------------------------------------------------------------------------
// Stable trees and nested collections
// ---------------------------------------------------------------------------

pub fn stable_tree_value(t: &StableTree) -> Value {
    match t {
        StableTree::Leaf(l) => json!({ "leaf": l }),
        StableTree::Node(children) => {
            json!({ "children": children.iter().map(stable_tree_value).collect::<Vec<_>>() })
        }
    }
}

/// A nested collection as an array of sorted label arrays.
pub fn nested_value(c: &NestedCollection) -> Value {
    Value::Array(
        c.members()
            .iter()
            .map(|m| Value::Array(m.labels().map(|l| json!(l)).collect()))
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// Surjections and reports
// ---------------------------------------------------------------------------

pub fn surjection_value(q: &Surjection) -> Value {
    let values: Map<String, Value> = q
        .domain()
        .labels()
        .map(|l| (l.to_string(), json!(q.apply(l))))
        .collect();
    json!({ "domain": q.domain().key(), "codomain": q.codomain().key(), "values": values })
}

pub fn kn_report_value(r: &KnReport) -> Value {
    json!({
        "name": r.name,
        "checked": r.checked,
        "max_error": r.max_error,
        "failures": r.failures,
    })
}

/// Serializes a value to a stable, human-readable byte string (two-space
/// indentation, sorted keys, trailing newline).
pub fn to_pretty_bytes(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("serializing JSON values cannot fail");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::qr;
    use crate::sample::Sampler;

    #[test]
    fn rational_round_trip() {
        for q in [qr(3, 4), qr(-7, 2), qr(5, 1), qr(0, 9)] {
            let v = q_value(&q);
            assert_eq!(q_from_value(&v).unwrap(), q);
        }
        assert!(q_from_value(&json!("3/0")).is_err());
        assert!(q_from_value(&json!(2.5)).is_err());
        assert_eq!(q_from_value(&json!(4)).unwrap(), qr(4, 1));
    }

    #[test]
    fn point_round_trip_through_json() {
        let mut s = Sampler::new(17);
        for _ in 0..10 {
            let p = s.fm_point(Subset::range(5).unwrap(), 2);
            let v = fm_point_value(&p);
            let back = fm_point_from_value(&v).unwrap();
            assert!(p.point_eq(&back).unwrap());
            assert_eq!(p.root(), back.root());
        }
    }

    #[test]
    fn framed_point_round_trip_through_json() {
        let mut s = Sampler::new(23);
        let p = s.framed_point(Subset::range(4).unwrap(), 1);
        let v = framed_point_value(&p);
        let back = framed_point_from_value(&v).unwrap();
        assert!(p.framed_eq(&back).unwrap());
    }

    #[test]
    fn screen_round_trip_through_json() {
        let mut s = Sampler::new(29);
        let sc = s.screen(Subset::range(4).unwrap(), 2);
        let v = screen_value(&sc);
        let back = screen_from_value(&v).unwrap();
        assert_eq!(
            sc.components().collect::<Vec<_>>(),
            back.components().collect::<Vec<_>>()
        );
    }

    #[test]
    fn config_input_is_canonicalized() {
        let v = json!({
            "dim": 1,
            "config": { "1": ["0"], "2": ["1"], "3": ["3"] }
        });
        let p = fm_point_from_value(&v).unwrap();
        let d = p.coordinates(Subset::range(3).unwrap()).unwrap();
        assert_eq!(d.vector(1).unwrap(), &[qr(-2, 5)]);
    }

    #[test]
    fn serialization_is_byte_stable() {
        let mut s = Sampler::new(31);
        let p = s.fm_point(Subset::range(6).unwrap(), 2);
        let a = to_pretty_bytes(&fm_point_value(&p));
        let b = to_pretty_bytes(&fm_point_value(&p));
        assert_eq!(a, b);
    }

    #[test]
    fn malformed_inputs_are_rejected_with_diagnostics() {
        assert!(fm_point_from_value(&json!({"dim": 2})).is_err());
        assert!(screen_from_value(&json!({"dim": 2, "index": "x"})).is_err());
        assert!(config_tree_from_value(&json!({"no": 1})).is_err());
    }
}
