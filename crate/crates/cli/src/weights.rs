use std::fs;
use std::path::Path;

use qf_core::groups::GroupSpec;
use qf_core::stationarity::exact::Q;
use serde_json::Value;

/// Contents of a weights file: `{"group": ..., "weights": [...]}`, or the
/// stationarity report itself (`weights_exact`). Entries are exact rationals
/// written as strings (`"1/4"`) or JSON numbers, which are read exactly.
#[derive(Debug)]
pub struct WeightsFile {
    pub group: Option<GroupSpec>,
    pub weights: Vec<Q>,
}

fn entry(v: &Value) -> Result<Q, String> {
    match v {
        Value::String(s) => s
            .trim()
            .parse::<Q>()
            .map_err(|_| format!("`{s}` is not a rational number")),
        Value::Number(n) => n
            .as_i64()
            .map(|i| Q::from_integer(i.into()))
            .or_else(|| n.as_f64().and_then(Q::from_float))
            .ok_or_else(|| format!("`{n}` is not a finite number")),
        other => Err(format!("unexpected weight entry {other}")),
    }
}

pub fn read(path: &Path) -> Result<WeightsFile, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let json: Value =
        serde_json::from_str(&text).map_err(|e| format!("{}: not valid JSON: {e}", path.display()))?;
    let group = match json.get("group") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.parse::<GroupSpec>().map_err(|e| e.to_string())?),
        Some(other) => return Err(format!("`group` must be a string, found {other}")),
    };
    let list = json
        .get("weights")
        .filter(|v| v.is_array())
        .or_else(|| json.get("weights_exact"))
        .and_then(Value::as_array)
        .ok_or_else(|| format!("{}: no `weights` array", path.display()))?;
    let weights = list.iter().map(entry).collect::<Result<_, _>>()?;
    Ok(WeightsFile { group, weights })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_are_exact() {
        assert_eq!(entry(&Value::from("1/4")).unwrap(), Q::new(1.into(), 4.into()));
        assert_eq!(entry(&Value::from(0.25)).unwrap(), Q::new(1.into(), 4.into()));
        assert_eq!(entry(&Value::from(1)).unwrap(), Q::from_integer(1.into()));
        assert!(entry(&Value::from("1/x")).is_err());
        assert!(entry(&Value::Bool(true)).is_err());
    }
}
