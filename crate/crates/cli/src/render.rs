use dpow_core::{AbGroupType, GradedGroup};
use serde_json::{json, Map, Value};

/// "Z^a ⊕ Z/q1 ⊕ Z/q2 ..." with primary torsion, or "0".
pub fn group_string(g: &AbGroupType) -> String {
    let mut parts = Vec::new();
    match g.free_rank {
        0 => {}
        1 => parts.push("Z".to_string()),
        k => parts.push(format!("Z^{k}")),
    }
    parts.extend(g.primary_parts().into_iter().map(|q| format!("Z/{q}")));
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ⊕ ")
    }
}

pub fn group_json(g: &AbGroupType) -> Value {
    json!({ "free_rank": g.free_rank, "torsion": g.torsion })
}

/// Degree-keyed object over `degrees`, zero groups included.
pub fn graded_json(h: &GradedGroup, degrees: impl IntoIterator<Item = i64>) -> Value {
    let mut m = Map::new();
    for d in degrees {
        m.insert(d.to_string(), group_json(&h.get(d)));
    }
    Value::Object(m)
}

pub fn predicted_json(predicted: &[(i64, u128)]) -> Value {
    Value::Object(predicted.iter().map(|(d, r)| (d.to_string(), json!(r))).collect())
}
