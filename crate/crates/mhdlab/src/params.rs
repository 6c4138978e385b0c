//! Named numeric parameters for solution families.
//!
//! Families are configured by flat `name -> value` maps. Ordering is
//! deterministic (BTreeMap) so serialised reports do not depend on
//! insertion order.

use crate::error::{MhdError, Result};
use std::collections::BTreeMap;

pub type ParamMap = BTreeMap<String, f64>;

/// Parses a single `name=value` assignment.
pub fn parse_assignment(s: &str) -> Result<(String, f64)> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| MhdError::Parse(format!("expected name=value, got {s:?}")))?;
    let name = name.trim();
    if name.is_empty() {
        return Err(MhdError::Parse(format!("empty parameter name in {s:?}")));
    }
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| MhdError::Parse(format!("bad numeric value in {s:?}")))?;
    Ok((name.to_string(), value))
}

/// Builds a map from `name=value` strings.
pub fn parse_params<I, S>(assignments: I) -> Result<ParamMap>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut map = ParamMap::new();
    for a in assignments {
        let (k, v) = parse_assignment(a.as_ref())?;
        map.insert(k, v);
    }
    Ok(map)
}

/// Overlays user-supplied values onto defaults, rejecting unknown names.
pub fn merge_params(family: &str, defaults: &ParamMap, user: &ParamMap) -> Result<ParamMap> {
    let mut merged = defaults.clone();
    let mut unknown = Vec::new();
    for (k, v) in user {
        if merged.contains_key(k) {
            merged.insert(k.clone(), *v);
        } else {
            unknown.push(format!(
                "{k}: unknown parameter (valid: {})",
                defaults.keys().cloned().collect::<Vec<_>>().join(", ")
            ));
        }
    }
    if unknown.is_empty() {
        Ok(merged)
    } else {
        Err(MhdError::invalid_params(family, unknown))
    }
}

/// Convenience accessor for a key that defaults guarantee to exist.
pub fn get(params: &ParamMap, key: &str) -> f64 {
    *params
        .get(key)
        .unwrap_or_else(|| panic!("parameter {key} missing after merge"))
}

/// Collects parameter-constraint violations. Push human-readable, named
/// messages; empty means valid.
#[derive(Debug, Default)]
pub struct Violations {
    messages: Vec<String>,
}

impl Violations {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn require(&mut self, ok: bool, message: impl Into<String>) {
        if !ok {
            self.messages.push(message.into());
        }
    }

    pub fn into_result(self, family: &str) -> Result<()> {
        if self.messages.is_empty() {
            Ok(())
        } else {
            Err(MhdError::invalid_params(family, self.messages))
        }
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_assignments() {
        assert_eq!(parse_assignment("alpha=2.5").unwrap(), ("alpha".into(), 2.5));
        assert_eq!(parse_assignment(" W_o = -3e-2 ").unwrap(), ("W_o".into(), -3e-2));
        assert!(parse_assignment("alpha").is_err());
        assert!(parse_assignment("=1").is_err());
        assert!(parse_assignment("alpha=two").is_err());
    }

    #[test]
    fn merge_rejects_unknown_names() {
        let defaults = parse_params(["a=1", "b=2"]).unwrap();
        let user = parse_params(["b=5"]).unwrap();
        let merged = merge_params("fam", &defaults, &user).unwrap();
        assert_eq!(get(&merged, "a"), 1.0);
        assert_eq!(get(&merged, "b"), 5.0);

        let bad = parse_params(["c=0"]).unwrap();
        let err = merge_params("fam", &defaults, &bad).unwrap_err();
        assert!(err.to_string().contains("unknown parameter"));
    }

    #[test]
    fn violations_accumulate() {
        let mut v = Violations::new();
        v.require(true, "fine");
        v.require(false, "alpha: must be nonzero");
        v.require(false, "R_o: must be positive");
        let err = v.into_result("fam").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("alpha: must be nonzero"));
        assert!(msg.contains("R_o: must be positive"));
    }
}
