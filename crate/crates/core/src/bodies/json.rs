//! JSON body descriptions.
//!
//! ```json
//! {"variant": "combination", "n": 2, "mu": "1/3", "plus_cube": true,
//!  "k": {"variant": "box", "n": 2, "halfwidths": ["2", 2]},
//!  "l": {"variant": "ball", "n": 2, "radius": 1.5}}
//! ```
//!
//! Numbers may be JSON numbers (converted exactly) or strings such as `"p/q"`.
//! Rotations: `{"kind": "identity"}`, `{"kind": "signed-permutation", "perm":
//! [..], "signs": [..]}`, `{"kind": "haar-sample", "seed": s, "stream": t}`, or
//! `{"kind": "user", "matrix": [[..], ..]}`.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{ConvexBody, Rotation, RotationProvenance, SignedPermutation};

pub const MAX_DIM: usize = 16;
const MAX_DEPTH: usize = 32;
const MAX_ITEMS: usize = 4096;

pub fn parse_body(text: &str) -> Result<ConvexBody> {
    let v: Value = serde_json::from_str(text)?;
    body_from_json(&v)
}

pub fn body_from_json(v: &Value) -> Result<ConvexBody> {
    parse_at(v, 0)
}

pub fn parse_scalar(v: &Value) -> Result<Scalar> {
    match v {
        Value::Number(num) => {
            if let Some(i) = num.as_i64() {
                Ok(Scalar::from_int(i))
            } else {
                let f = num.as_f64().ok_or_else(|| Error::Parse(format!("bad number {num}")))?;
                Scalar::from_f64(f)
            }
        }
        Value::String(s) => Scalar::parse(s),
        other => Err(Error::Parse(format!("expected a number, got {other}"))),
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| bad(format!("missing field {key:?}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    let arr = v.as_array().ok_or_else(|| bad(format!("{what} must be an array")))?;
    if arr.len() > MAX_ITEMS {
        return Err(bad(format!("{what} is too long")));
    }
    Ok(arr)
}

fn scalar_vec(v: &Value, what: &str) -> Result<Vec<Scalar>> {
    array(v, what)?.iter().map(parse_scalar).collect()
}

fn scalar_matrix(v: &Value, what: &str) -> Result<Vec<Vec<Scalar>>> {
    array(v, what)?.iter().map(|row| scalar_vec(row, what)).collect()
}

fn canonical_variant(name: &str) -> String {
    name.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase()
}

fn parse_at(v: &Value, depth: usize) -> Result<ConvexBody> {
    if depth > MAX_DEPTH {
        return Err(bad("body description nested too deeply"));
    }
    let obj = v.as_object().ok_or_else(|| bad("body must be a JSON object"))?;
    let variant = field(obj, "variant")?.as_str().ok_or_else(|| bad("variant must be a string"))?;
    let declared_n = match obj.get("n") {
        None => None,
        Some(n) => {
            let n = n.as_u64().ok_or_else(|| bad("n must be a positive integer"))? as usize;
            if n == 0 || n > MAX_DIM {
                return Err(bad(format!("n must lie in 1..={MAX_DIM}")));
            }
            Some(n)
        }
    };
    let body = match canonical_variant(variant).as_str() {
        "hpolytope" => ConvexBody::hpolytope(scalar_matrix(field(obj, "a")?, "a")?, scalar_vec(field(obj, "b")?, "b")?)?,
        "vpolytope" => ConvexBody::vpolytope(scalar_matrix(field(obj, "vertices")?, "vertices")?)?,
        "ball" => {
            let n = declared_n.ok_or_else(|| bad("ball needs n"))?;
            ConvexBody::ball(n, parse_scalar(field(obj, "radius")?)?)?
        }
        "box" => match (obj.get("halfwidths"), obj.get("halfwidth")) {
            (Some(h), _) => ConvexBody::axis_box(scalar_vec(h, "halfwidths")?)?,
            (None, Some(h)) => {
                let n = declared_n.ok_or_else(|| bad("box with a scalar halfwidth needs n"))?;
                ConvexBody::cube(n, parse_scalar(h)?)?
            }
            (None, None) => return Err(bad("box needs halfwidths")),
        },
        "rotated" => {
            let base = parse_at(field(obj, "base")?, depth + 1)?;
            let rotation = parse_rotation(field(obj, "rotation")?, base.dim())?;
            ConvexBody::rotated(rotation, base)?
        }
        "scaled" => ConvexBody::scaled(parse_scalar(field(obj, "factor")?)?, parse_at(field(obj, "base")?, depth + 1)?)?,
        "cubesum" => ConvexBody::cube_sum(parse_at(field(obj, "base")?, depth + 1)?),
        "combination" => {
            let plus_cube = match obj.get("plus_cube") {
                None => false,
                Some(b) => b.as_bool().ok_or_else(|| bad("plus_cube must be a boolean"))?,
            };
            ConvexBody::combination(
                parse_scalar(field(obj, "mu")?)?,
                parse_at(field(obj, "k")?, depth + 1)?,
                parse_at(field(obj, "l")?, depth + 1)?,
                plus_cube,
            )?
        }
        other => return Err(bad(format!("unknown variant {other:?}"))),
    };
    if body.dim() > MAX_DIM {
        return Err(bad(format!("dimension {} exceeds {MAX_DIM}", body.dim())));
    }
    if let Some(n) = declared_n {
        if n != body.dim() {
            return Err(bad(format!("declared n = {n} but body has dimension {}", body.dim())));
        }
    }
    Ok(body)
}

pub fn parse_rotation(v: &Value, n: usize) -> Result<Rotation> {
    let obj = v.as_object().ok_or_else(|| bad("rotation must be an object"))?;
    let kind = field(obj, "kind")?.as_str().ok_or_else(|| bad("rotation kind must be a string"))?;
    let matrix = match obj.get("matrix") {
        Some(m) => {
            let rows = array(m, "matrix")?;
            if rows.len() != n {
                return Err(bad("rotation matrix has wrong size"));
            }
            let mut flat = Vec::with_capacity(n * n);
            for row in rows {
                let row = array(row, "matrix row")?;
                if row.len() != n {
                    return Err(bad("rotation matrix has wrong size"));
                }
                for x in row {
                    flat.push(x.as_f64().ok_or_else(|| bad("matrix entries must be numbers"))?);
                }
            }
            Some(flat)
        }
        None => None,
    };
    match canonical_variant(kind).as_str() {
        "identity" => Ok(Rotation::identity(n)),
        "signedpermutation" => {
            let perm = array(field(obj, "perm")?, "perm")?
                .iter()
                .map(|p| p.as_u64().map(|p| p as usize).ok_or_else(|| bad("perm entries must be indices")))
                .collect::<Result<Vec<_>>>()?;
            let signs = array(field(obj, "signs")?, "signs")?
                .iter()
                .map(|s| match s.as_i64() {
                    Some(1) => Ok(1),
                    Some(-1) => Ok(-1),
                    _ => Err(bad("signs must be ±1")),
                })
                .collect::<Result<Vec<i8>>>()?;
            if perm.len() != n {
                return Err(bad("permutation has wrong length"));
            }
            Ok(Rotation::signed_permutation(SignedPermutation::new(perm, signs)?))
        }
        "haarsample" => {
            let seed = field(obj, "seed")?.as_u64().ok_or_else(|| bad("seed must be an unsigned integer"))?;
            let stream = obj.get("stream").map_or(Some(0), Value::as_u64).ok_or_else(|| bad("bad stream"))?;
            match matrix {
                Some(m) => Rotation::from_matrix(n, m, RotationProvenance::HaarSample { seed, stream }),
                None => Ok(crate::sampling::haar_rotation(&crate::sampling::RngStream::new(seed, stream), n)),
            }
        }
        "user" => {
            let m = matrix.ok_or_else(|| bad("user rotation needs a matrix"))?;
            Rotation::from_matrix(n, m, RotationProvenance::User)
        }
        other => Err(bad(format!("unknown rotation kind {other:?}"))),
    }
}

fn lit(s: &Scalar) -> Value {
    Value::String(s.to_literal())
}

fn lits(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(lit).collect())
}

pub fn rotation_to_json(r: &Rotation) -> Value {
    let n = r.dim();
    let matrix: Vec<Value> = (0..n).map(|i| json!(r.matrix()[i * n..(i + 1) * n].to_vec())).collect();
    match r.provenance() {
        RotationProvenance::Identity => json!({"kind": "identity"}),
        RotationProvenance::SignedPermutation => {
            let sp = r.as_signed_permutation().expect("signed permutation provenance");
            json!({"kind": "signed-permutation", "perm": sp.perm, "signs": sp.signs})
        }
        RotationProvenance::HaarSample { seed, stream } => {
            json!({"kind": "haar-sample", "seed": seed, "stream": stream, "matrix": matrix})
        }
        RotationProvenance::User => json!({"kind": "user", "matrix": matrix}),
    }
}

/// Canonical description with a fixed key order and exact literals.
pub fn body_to_json(body: &ConvexBody) -> Value {
    let n = body.dim();
    match body {
        ConvexBody::HPolytope { a, b } => json!({
            "variant": "hpolytope", "n": n,
            "a": a.iter().map(|r| lits(r)).collect::<Vec<_>>(), "b": lits(b)
        }),
        ConvexBody::VPolytope { vertices } => json!({
            "variant": "vpolytope", "n": n,
            "vertices": vertices.iter().map(|v| lits(v)).collect::<Vec<_>>()
        }),
        ConvexBody::Ball { radius, .. } => json!({"variant": "ball", "n": n, "radius": lit(radius)}),
        ConvexBody::Box { halfwidths } => json!({"variant": "box", "n": n, "halfwidths": lits(halfwidths)}),
        ConvexBody::Rotated { rotation, base } => json!({
            "variant": "rotated", "n": n, "rotation": rotation_to_json(rotation), "base": body_to_json(base)
        }),
        ConvexBody::Scaled { factor, base } => json!({
            "variant": "scaled", "n": n, "factor": lit(factor), "base": body_to_json(base)
        }),
        ConvexBody::CubeSum { base } => json!({"variant": "cube-sum", "n": n, "base": body_to_json(base)}),
        ConvexBody::Combination { mu, k, l, plus_cube } => json!({
            "variant": "combination", "n": n, "mu": lit(mu),
            "k": body_to_json(k), "l": body_to_json(l), "plus_cube": plus_cube
        }),
    }
}

pub fn fingerprint(body: &ConvexBody) -> String {
    let text = body_to_json(body).to_string();
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Short human-readable label such as `box(2,2)` or `scaled(16,ball(1;n=2))`.
pub fn short_label(body: &ConvexBody) -> String {
    let join = |v: &[Scalar]| v.iter().map(Scalar::to_literal).collect::<Vec<_>>().join(",");
    match body {
        ConvexBody::HPolytope { a, .. } => format!("hpolytope({} rows;n={})", a.len(), body.dim()),
        ConvexBody::VPolytope { vertices } => format!("vpolytope({} vertices;n={})", vertices.len(), body.dim()),
        ConvexBody::Ball { n, radius } => format!("ball({};n={n})", radius.to_literal()),
        ConvexBody::Box { halfwidths } => format!("box({})", join(halfwidths)),
        ConvexBody::Rotated { rotation, base } => {
            let tag = match rotation.provenance() {
                RotationProvenance::Identity => "id".to_string(),
                RotationProvenance::SignedPermutation => "perm".to_string(),
                RotationProvenance::HaarSample { seed, stream } => format!("haar:{seed}:{stream}"),
                RotationProvenance::User => "user".to_string(),
            };
            format!("rotated({tag},{})", short_label(base))
        }
        ConvexBody::Scaled { factor, base } => format!("scaled({},{})", factor.to_literal(), short_label(base)),
        ConvexBody::CubeSum { base } => format!("cube-sum({})", short_label(base)),
        ConvexBody::Combination { mu, k, l, plus_cube } => format!(
            "combination({},{},{}{})",
            mu.to_literal(),
            short_label(k),
            short_label(l),
            if *plus_cube { ",+C" } else { "" }
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_nested() {
        let text = r#"{"variant":"combination","n":2,"mu":"1/3","plus_cube":true,
            "k":{"variant":"box","n":2,"halfwidths":["2",2]},
            "l":{"variant":"rotated","rotation":{"kind":"signed-permutation","perm":[1,0],"signs":[1,-1]},
                 "base":{"variant":"ball","n":2,"radius":1.5}}}"#;
        let body = parse_body(text).unwrap();
        let again = body_from_json(&body.to_json()).unwrap();
        assert_eq!(body, again);
        assert_eq!(body.fingerprint(), again.fingerprint());
        assert_eq!(body.fingerprint().len(), 64);
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            r#"{"variant":"ball","n":2,"radius":-1}"#,
            r#"{"variant":"ball","radius":1}"#,
            r#"{"variant":"box","n":3,"halfwidths":[1,1]}"#,
            r#"{"variant":"teapot"}"#,
            r#"{"variant":"scaled","factor":"1/0","base":{"variant":"box","halfwidths":[1]}}"#,
            r#"[1,2]"#,
        ] {
            assert!(parse_body(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn scalar_halfwidth_shorthand() {
        let a = parse_body(r#"{"variant":"box","n":2,"halfwidth":"2"}"#).unwrap();
        let b = parse_body(r#"{"variant":"Box","n":2,"halfwidths":[2,2]}"#).unwrap();
        assert_eq!(a, b);
    }
}
