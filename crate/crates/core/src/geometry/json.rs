//! JSON body literals.
//!
//! ```text
//! {"kind":"polytope","dim":2,"vertices":[[1,0],[0,1],[-1,0],[0,-1]],"symmetric":true}
//! {"kind":"lpsum","p":1.5,"children":[...]}          p may be "inf"
//! {"kind":"ball","dim":3}
//! {"kind":"linear_image","matrix":[[2,0],[0,1]],"child":{...}}
//! {"kind":"translate","offset":[0.5,0],"child":{...}}
//! ```

use serde_json::{json, Value};

use super::{BodyExpr, BodyKind, LinearMap, Matrix, Vector};
use crate::error::{Error, Result};

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidBody(msg.into())
}

fn vec_json(v: &Vector) -> Value {
    Value::from(v.iter().copied().collect::<Vec<f64>>())
}

pub fn to_json(body: &BodyExpr) -> Value {
    match body.kind() {
        BodyKind::Polytope(p) => json!({
            "kind": "polytope",
            "dim": body.dim(),
            "vertices": p.vertices().iter().map(vec_json).collect::<Vec<_>>(),
            "symmetric": body.is_symmetric(),
        }),
        BodyKind::UnitBall => json!({"kind": "ball", "dim": body.dim()}),
        BodyKind::LpSum { p, children } => json!({
            "kind": "lpsum",
            "p": if p.is_infinite() { json!("inf") } else { json!(p) },
            "children": children.iter().map(to_json).collect::<Vec<_>>(),
        }),
        BodyKind::LinearImage { map, child } => {
            let m = map.matrix();
            let rows: Vec<Vec<f64>> =
                (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
            json!({"kind": "linear_image", "matrix": rows, "child": to_json(child)})
        }
        BodyKind::Translate { offset, child } => {
            json!({"kind": "translate", "offset": vec_json(offset), "child": to_json(child)})
        }
    }
}

pub fn to_string(body: &BodyExpr) -> String {
    to_json(body).to_string()
}

fn parse_vec(v: &Value) -> Result<Vector> {
    let arr = v.as_array().ok_or_else(|| bad("expected an array of numbers"))?;
    let xs: Option<Vec<f64>> = arr.iter().map(Value::as_f64).collect();
    Ok(Vector::from_vec(xs.ok_or_else(|| bad("expected an array of numbers"))?))
}

fn field<'a>(obj: &'a Value, name: &str) -> Result<&'a Value> {
    obj.get(name).ok_or_else(|| bad(format!("missing field `{name}`")))
}

fn parse_dim(obj: &Value) -> Result<usize> {
    field(obj, "dim")?
        .as_u64()
        .filter(|d| *d > 0)
        .map(|d| d as usize)
        .ok_or_else(|| bad("`dim` must be a positive integer"))
}

pub fn from_json(v: &Value) -> Result<BodyExpr> {
    let kind = field(v, "kind")?.as_str().ok_or_else(|| bad("`kind` must be a string"))?;
    match kind {
        "polytope" => {
            let dim = parse_dim(v)?;
            let verts: Vec<Vector> = field(v, "vertices")?
                .as_array()
                .ok_or_else(|| bad("`vertices` must be an array"))?
                .iter()
                .map(parse_vec)
                .collect::<Result<_>>()?;
            if let Some(bad_v) = verts.iter().find(|x| x.len() != dim) {
                return Err(Error::DimensionMismatch { expected: dim, found: bad_v.len() });
            }
            let claimed = match v.get("symmetric") {
                None => false,
                Some(s) => s.as_bool().ok_or_else(|| bad("`symmetric` must be a boolean"))?,
            };
            BodyExpr::polytope_claimed(&verts, claimed)
        }
        "ball" => BodyExpr::unit_ball(parse_dim(v)?),
        "lpsum" => {
            let p = match field(v, "p")? {
                Value::String(s) if s == "inf" => f64::INFINITY,
                other => other.as_f64().ok_or_else(|| bad("`p` must be a number or \"inf\""))?,
            };
            let children: Vec<BodyExpr> = field(v, "children")?
                .as_array()
                .ok_or_else(|| bad("`children` must be an array"))?
                .iter()
                .map(from_json)
                .collect::<Result<_>>()?;
            BodyExpr::lp_sum_node(children, p)
        }
        "linear_image" => {
            let rows: Vec<Vector> = field(v, "matrix")?
                .as_array()
                .ok_or_else(|| bad("`matrix` must be an array of rows"))?
                .iter()
                .map(parse_vec)
                .collect::<Result<_>>()?;
            let n = rows.len();
            if n == 0 || rows.iter().any(|r| r.len() != n) {
                return Err(bad("`matrix` must be square"));
            }
            let m = Matrix::from_fn(n, n, |i, j| rows[i][j]);
            let child = from_json(field(v, "child")?)?;
            BodyExpr::linear_image(&LinearMap::new(m)?, child)
        }
        "translate" => {
            let offset = parse_vec(field(v, "offset")?)?;
            BodyExpr::translate(from_json(field(v, "child")?)?, offset)
        }
        other => Err(bad(format!("unknown kind `{other}`"))),
    }
}

pub fn from_str(s: &str) -> Result<BodyExpr> {
    let v: Value = serde_json::from_str(s).map_err(|e| bad(format!("JSON syntax: {e}")))?;
    from_json(&v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let src = r#"{"kind":"polytope","dim":2,"vertices":[[1,0],[0,1],[-1,0],[0,-1]],"symmetric":true}"#;
        let b = from_str(src).unwrap();
        assert!(b.is_symmetric());
        assert_eq!(from_str(&to_string(&b)).unwrap(), b);

        let src = r#"{"kind":"lpsum","p":"inf","children":[
            {"kind":"polytope","dim":1,"vertices":[[1],[-1]]},
            {"kind":"lpsum","p":1.5,"children":[{"kind":"ball","dim":2},
                {"kind":"linear_image","matrix":[[2,0.1],[0,1]],"child":{"kind":"ball","dim":2}}]}]}"#;
        let b = from_str(src).unwrap();
        assert_eq!(b.dim(), 5);
        let again = from_str(&to_string(&b)).unwrap();
        assert_eq!(again, b);

        let t = from_str(r#"{"kind":"translate","offset":[0.25,0],"child":{"kind":"ball","dim":2}}"#).unwrap();
        assert_eq!(from_str(&to_string(&t)).unwrap(), t);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(from_str(r#"{"kind":"polytope","dim":2,"vertices":[[1,0],[0,1,2]]}"#).is_err());
        assert!(from_str(r#"{"kind":"polytope","dim":2,"vertices":[[1,0],[0,1],[0,0]],"symmetric":true}"#).is_err());
        assert!(from_str(r#"{"kind":"lpsum","p":0.5,"children":[{"kind":"ball","dim":1}]}"#).is_err());
        assert!(from_str(r#"{"kind":"cylinder"}"#).is_err());
        assert!(from_str("not json").is_err());
    }
}
