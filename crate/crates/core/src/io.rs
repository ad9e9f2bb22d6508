//! JSON file formats.
//!
//! - groupoid: `{"arrows", "source", "range", "inverse", "compose"}`
//! - action: `{"cayley", "elements", "space", "act"}`
//! - function: `{"groupoid": path or inline table (optional), "coeffs": {arrow: [re, im]}}`
//! - multiplier: `{"h": {arrow: [re, im]}}`
//! - net: `{"net": [multiplier, ...], "eps": real}`
//!
//! Arrows missing from a coefficient map are zero.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::algebra::{same_groupoid, ArrowFunction};
use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, GroupAction, Groupoid, RawAction, RawGroupoid};
use crate::multiplier::{FejerNet, MultiplierSymbol};

type CoeffMap = BTreeMap<String, [f64; 2]>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionFile {
    #[serde(default)]
    groupoid: Option<Value>,
    coeffs: CoeffMap,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MultiplierFile {
    h: CoeffMap,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NetFile {
    net: Vec<MultiplierFile>,
    eps: f64,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

fn parse<T: DeserializeOwned>(what: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Malformed(format!("{what}: {e}")))
}

pub fn parse_groupoid(text: &str) -> Result<Groupoid> {
    FiniteGroupoid::from_raw(&parse::<RawGroupoid>("groupoid", text)?)
}

pub fn read_groupoid(path: impl AsRef<Path>) -> Result<Groupoid> {
    parse_groupoid(&read_text(path.as_ref())?)
}

pub fn parse_action(text: &str) -> Result<GroupAction> {
    GroupAction::from_raw(&parse::<RawAction>("action", text)?)
}

pub fn read_action(path: impl AsRef<Path>) -> Result<GroupAction> {
    parse_action(&read_text(path.as_ref())?)
}

fn coeffs_from_map(groupoid: &Groupoid, map: &CoeffMap) -> Result<ArrowFunction> {
    let mut f = ArrowFunction::zero(groupoid);
    for (name, [re, im]) in map {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::Malformed(format!("non-finite coefficient at `{name}`")));
        }
        f.set(groupoid.index_of(name)?, Complex64::new(*re, *im));
    }
    Ok(f)
}

/// Parses a function file against `groupoid`. An embedded `"groupoid"` entry,
/// either a path relative to `base` or an inline table, must describe the
/// same groupoid.
pub fn parse_function(groupoid: &Groupoid, text: &str, base: Option<&Path>) -> Result<ArrowFunction> {
    let file: FunctionFile = parse("function", text)?;
    if let Some(spec) = &file.groupoid {
        let declared = match spec {
            Value::String(p) => {
                let path = base.map_or_else(|| PathBuf::from(p), |b| b.join(p));
                read_groupoid(path)?
            }
            other => FiniteGroupoid::from_raw(
                &serde_json::from_value::<RawGroupoid>(other.clone()).map_err(|e| Error::Malformed(format!("groupoid: {e}")))?,
            )?,
        };
        if !same_groupoid(&declared, groupoid) {
            return Err(Error::GroupoidMismatch);
        }
    }
    coeffs_from_map(groupoid, &file.coeffs)
}

pub fn read_function(groupoid: &Groupoid, path: impl AsRef<Path>) -> Result<ArrowFunction> {
    let path = path.as_ref();
    parse_function(groupoid, &read_text(path)?, path.parent())
}

pub fn parse_multiplier(groupoid: &Groupoid, text: &str) -> Result<MultiplierSymbol> {
    let file: MultiplierFile = parse("multiplier", text)?;
    Ok(MultiplierSymbol::new(coeffs_from_map(groupoid, &file.h)?))
}

pub fn read_multiplier(groupoid: &Groupoid, path: impl AsRef<Path>) -> Result<MultiplierSymbol> {
    parse_multiplier(groupoid, &read_text(path.as_ref())?)
}

pub fn parse_net(groupoid: &Groupoid, text: &str) -> Result<FejerNet> {
    let file: NetFile = parse("net", text)?;
    if !file.eps.is_finite() || file.eps <= 0.0 {
        return Err(Error::Malformed(format!("eps must be positive, got {}", file.eps)));
    }
    let symbols =
        file.net.iter().map(|m| coeffs_from_map(groupoid, &m.h).map(MultiplierSymbol::new)).collect::<Result<Vec<_>>>()?;
    FejerNet::new(symbols, file.eps)
}

pub fn read_net(groupoid: &Groupoid, path: impl AsRef<Path>) -> Result<FejerNet> {
    parse_net(groupoid, &read_text(path.as_ref())?)
}

/// `{arrow: [re, im]}` over every arrow.
pub fn coeff_json(f: &ArrowFunction) -> Value {
    let g = f.groupoid();
    let map: serde_json::Map<String, Value> = (0..g.len())
        .map(|a| {
            let c = f.get(a);
            (g.name(a).to_string(), json!([c.re, c.im]))
        })
        .collect();
    Value::Object(map)
}

pub fn function_json(f: &ArrowFunction) -> Value {
    json!({ "coeffs": coeff_json(f) })
}

pub fn multiplier_json(h: &MultiplierSymbol) -> Value {
    json!({ "h": coeff_json(h.function()) })
}

pub fn groupoid_json(g: &FiniteGroupoid) -> Value {
    serde_json::to_value(g.to_raw()).expect("groupoid tables serialize")
}

pub fn action_json(a: &GroupAction) -> Value {
    serde_json::to_value(a.to_raw()).expect("action tables serialize")
}

/// Names of the arrows in `set`, in canonical order.
pub fn names(g: &FiniteGroupoid, set: impl IntoIterator<Item = usize>) -> Vec<String> {
    set.into_iter().map(|a| g.name(a).to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn groupoid_round_trip() {
        for (_, g) in corpus::bundled() {
            let text = groupoid_json(&g).to_string();
            let back = parse_groupoid(&text).unwrap();
            assert!(same_groupoid(&back, &g));
        }
    }

    #[test]
    fn function_round_trip_and_defaults() {
        let r2 = corpus::pair_groupoid(&["p", "q"]);
        let f = parse_function(&r2, r#"{"coeffs": {"(p,q)": [1.0, -2.0]}}"#, None).unwrap();
        assert_eq!(f.get(r2.index_of("(p,q)").unwrap()), Complex64::new(1.0, -2.0));
        assert_eq!(f.support(0.0).len(), 1);
        let back = parse_function(&r2, &function_json(&f).to_string(), None).unwrap();
        assert_eq!(back, f);

        let inline = json!({"groupoid": groupoid_json(&r2), "coeffs": {}}).to_string();
        assert_eq!(parse_function(&r2, &inline, None).unwrap(), ArrowFunction::zero(&r2));
        let z2 = corpus::cyclic_group(2);
        let wrong = json!({"groupoid": groupoid_json(&z2), "coeffs": {}}).to_string();
        assert!(matches!(parse_function(&r2, &wrong, None), Err(Error::GroupoidMismatch)));
    }

    #[test]
    fn rejects_bad_input() {
        let z2 = corpus::cyclic_group(2);
        assert!(matches!(parse_function(&z2, r#"{"coeffs": {"x": [1, 0]}}"#, None), Err(Error::UnknownArrow(_))));
        assert!(matches!(parse_function(&z2, r#"{"coef": {}}"#, None), Err(Error::Malformed(_))));
        assert!(matches!(parse_groupoid("[1, 2"), Err(Error::Malformed(_))));
        assert!(matches!(parse_net(&z2, r#"{"net": [], "eps": 0}"#), Err(Error::Malformed(_))));
    }

    #[test]
    fn net_and_multiplier() {
        let z2 = corpus::cyclic_group(2);
        let net = parse_net(&z2, r#"{"net": [{"h": {"e": [0.5, 0]}}, {"h": {"e": [1, 0], "a": [1, 0]}}], "eps": 1e-6}"#).unwrap();
        assert_eq!(net.symbols.len(), 2);
        assert_eq!(net.symbols[0].function().get(1), Complex64::new(0.0, 0.0));
        let h = parse_multiplier(&z2, &multiplier_json(&net.symbols[1]).to_string()).unwrap();
        assert_eq!(h.function(), net.symbols[1].function());
    }

    #[test]
    fn action_round_trip() {
        let a = corpus::s3_on_three_points();
        assert_eq!(parse_action(&action_json(&a).to_string()).unwrap(), a);
    }
}
