use serde::{Deserialize, Serialize};

use crate::error::{Result, WayError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Linear,
    /// Outcomes sit on `Z_N` in listed order; windows wrap around.
    Cyclic(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub label: String,
    pub value: f64,
}

/// Ordered outcome labels with a numeric value per label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOutcomeSet", into = "RawOutcomeSet")]
pub struct OutcomeSet {
    outcomes: Vec<Outcome>,
    geometry: Geometry,
}

#[derive(Serialize, Deserialize)]
struct RawOutcomeSet {
    outcomes: Vec<Outcome>,
    geometry: Geometry,
}

impl TryFrom<RawOutcomeSet> for OutcomeSet {
    type Error = WayError;

    fn try_from(raw: RawOutcomeSet) -> Result<Self> {
        OutcomeSet::new(raw.outcomes, raw.geometry)
    }
}

impl From<OutcomeSet> for RawOutcomeSet {
    fn from(o: OutcomeSet) -> Self {
        RawOutcomeSet {
            outcomes: o.outcomes,
            geometry: o.geometry,
        }
    }
}

impl OutcomeSet {
    pub fn new(outcomes: Vec<Outcome>, geometry: Geometry) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(WayError::InvalidObservable("empty outcome set".into()));
        }
        for (i, o) in outcomes.iter().enumerate() {
            if outcomes[..i].iter().any(|p| p.label == o.label) {
                return Err(WayError::InvalidObservable(format!(
                    "duplicate outcome label `{}`",
                    o.label
                )));
            }
            if !o.value.is_finite() {
                return Err(WayError::InvalidObservable(format!(
                    "outcome `{}` has a non-finite value",
                    o.label
                )));
            }
        }
        if let Geometry::Cyclic(n) = geometry {
            if n != outcomes.len() {
                return Err(WayError::InvalidObservable(format!(
                    "cyclic({n}) geometry with {} labels",
                    outcomes.len()
                )));
            }
        }
        Ok(Self { outcomes, geometry })
    }

    /// Labels are the decimal form of each value.
    pub fn from_values(values: &[f64], geometry: Geometry) -> Result<Self> {
        let outcomes = values
            .iter()
            .map(|&v| Outcome {
                label: format_value(v),
                value: v,
            })
            .collect();
        Self::new(outcomes, geometry)
    }

    /// `Z_n` with labels `"0".."n-1"` and values the representatives in
    /// `(-n/2, n/2]`.
    pub fn cyclic_positions(n: usize) -> Self {
        let outcomes = (0..n)
            .map(|k| Outcome {
                label: k.to_string(),
                value: centered_rep(k as i64, n) as f64,
            })
            .collect();
        Self::new(outcomes, Geometry::Cyclic(n)).expect("distinct labels")
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.outcomes.iter().map(|o| o.label.as_str())
    }

    pub fn values(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.value).collect()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.outcomes
            .iter()
            .position(|o| o.label == label)
            .ok_or_else(|| WayError::UnknownOutcome(label.to_string()))
    }
}

/// Representative of `k mod n` in `(-n/2, n/2]`.
pub fn centered_rep(k: i64, n: usize) -> i64 {
    let n = n as i64;
    let r = k.rem_euclid(n);
    if 2 * r > n {
        r - n
    } else {
        r
    }
}

fn format_value(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_bad_cyclic_count() {
        let o = |l: &str| Outcome {
            label: l.into(),
            value: 0.0,
        };
        assert!(OutcomeSet::new(vec![o("a"), o("a")], Geometry::Linear).is_err());
        assert!(OutcomeSet::new(vec![o("a"), o("b")], Geometry::Cyclic(3)).is_err());
        assert!(OutcomeSet::new(vec![o("a"), o("b")], Geometry::Cyclic(2)).is_ok());
    }

    #[test]
    fn cyclic_positions_are_centered() {
        let s = OutcomeSet::cyclic_positions(5);
        assert_eq!(s.values(), vec![0.0, 1.0, 2.0, -2.0, -1.0]);
        let s = OutcomeSet::cyclic_positions(4);
        assert_eq!(s.values(), vec![0.0, 1.0, 2.0, -1.0]);
    }

    #[test]
    fn labels_from_values() {
        let s = OutcomeSet::from_values(&[1.0, -1.0, 0.5], Geometry::Linear).unwrap();
        assert_eq!(s.labels().collect::<Vec<_>>(), vec!["1", "-1", "0.5"]);
        assert_eq!(s.index_of("-1").unwrap(), 1);
        assert!(s.index_of("2").is_err());
    }
}
