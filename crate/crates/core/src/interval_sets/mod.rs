//! Exact algebra of finite unions of intervals (line) and arcs (circle),
//! Lebesgue measure, and essential closure.

pub mod circle;
pub mod fat;
pub mod line;
pub mod measure;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub use circle::{angular_distance, normalize_angle, Arc, CircleArcSet};
pub use fat::{FatClosure, FatSetDescriptor, GeneratedFatSet};
pub use line::{Interval, RealIntervalSet, SetOp};
pub use measure::{
    equivalent_arc_supports, equivalent_supports, LebesgueMeasure, Lebesgue, MeasureBounds,
    MixedMeasure, SetMeasure,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Carrier {
    Line,
    Circle,
}

/// A set on either carrier.
#[derive(Debug, Clone, PartialEq)]
pub enum AnySet {
    Line(RealIntervalSet),
    Circle(CircleArcSet),
}

impl AnySet {
    pub fn carrier(&self) -> Carrier {
        match self {
            AnySet::Line(_) => Carrier::Line,
            AnySet::Circle(_) => Carrier::Circle,
        }
    }

    pub fn measure(&self) -> f64 {
        match self {
            AnySet::Line(s) => s.measure(),
            AnySet::Circle(s) => s.measure(),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            AnySet::Line(s) => s.is_empty(),
            AnySet::Circle(s) => s.is_empty(),
        }
    }

    pub fn essential_closure(&self) -> AnySet {
        match self {
            AnySet::Line(s) => AnySet::Line(s.essential_closure()),
            AnySet::Circle(s) => AnySet::Circle(s.essential_closure()),
        }
    }

    pub fn closure(&self) -> AnySet {
        match self {
            AnySet::Line(s) => AnySet::Line(s.closure()),
            AnySet::Circle(s) => AnySet::Circle(s.closure()),
        }
    }

    pub fn is_subset_with_slack(&self, other: &AnySet, slack: f64) -> Result<bool> {
        match (self, other) {
            (AnySet::Line(a), AnySet::Line(b)) => Ok(a.is_subset_with_slack(b, slack)),
            (AnySet::Circle(a), AnySet::Circle(b)) => Ok(a.is_subset_with_slack(b, slack)),
            _ => Err(Error::MixedCarriers),
        }
    }

    pub fn hausdorff(&self, other: &AnySet) -> Result<f64> {
        match (self, other) {
            (AnySet::Line(a), AnySet::Line(b)) => Ok(a.hausdorff(b)),
            (AnySet::Circle(a), AnySet::Circle(b)) => Ok(a.hausdorff(b)),
            _ => Err(Error::MixedCarriers),
        }
    }

    pub fn to_descriptor(&self) -> SetDescriptor {
        match self {
            AnySet::Line(s) => SetDescriptor {
                carrier: Carrier::Line,
                intervals: s
                    .intervals()
                    .iter()
                    .map(|iv| (iv.lo, iv.hi, iv.flag_code().to_string()))
                    .collect(),
                points: s.points().to_vec(),
            },
            AnySet::Circle(s) => SetDescriptor {
                carrier: Carrier::Circle,
                intervals: s
                    .arcs()
                    .iter()
                    .map(|a| {
                        let iv = Interval::new(a.start, a.end, a.start_closed, a.end_closed);
                        (a.start, a.end, iv.flag_code().to_string())
                    })
                    .collect(),
                points: s.points(),
            },
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self.to_descriptor()).expect("descriptor serializes")
    }
}

impl std::fmt::Display for AnySet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AnySet::Line(s) => s.fmt(f),
            AnySet::Circle(s) => s.fmt(f),
        }
    }
}

impl Serialize for AnySet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_descriptor().serialize(s)
    }
}

impl Serialize for RealIntervalSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AnySet::Line(self.clone()).to_descriptor().serialize(s)
    }
}

impl Serialize for CircleArcSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AnySet::Circle(self.clone()).to_descriptor().serialize(s)
    }
}

/// `{"carrier": "line"|"circle", "intervals": [[lo, hi, "cc"], ...], "points": [...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetDescriptor {
    pub carrier: Carrier,
    #[serde(default)]
    pub intervals: Vec<(f64, f64, String)>,
    #[serde(default)]
    pub points: Vec<f64>,
}

impl SetDescriptor {
    pub fn build(&self) -> Result<AnySet> {
        match self.carrier {
            Carrier::Line => {
                let raw = self
                    .intervals
                    .iter()
                    .map(|(lo, hi, code)| Interval::from_flag_code(*lo, *hi, code))
                    .collect::<Result<Vec<_>>>()?;
                Ok(AnySet::Line(RealIntervalSet::from_parts(&raw, &self.points)?))
            }
            Carrier::Circle => {
                let raw = self
                    .intervals
                    .iter()
                    .map(|(lo, hi, code)| {
                        Interval::from_flag_code(*lo, *hi, code)
                            .map(|iv| Arc::new(iv.lo, iv.hi, iv.lo_closed, iv.hi_closed))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(AnySet::Circle(CircleArcSet::from_parts(&raw, &self.points)?))
            }
        }
    }
}

/// Either a finite set descriptor or a generated family descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnySetDescriptor {
    Finite(SetDescriptor),
    Family(FatSetDescriptor),
}

/// Parses a JSON set descriptor (finite or generated).
pub fn parse_set_descriptor(text: &str) -> Result<AnySetDescriptor> {
    serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
}

pub fn set_algebra(a: &AnySet, b: &AnySet, op: SetOp) -> Result<AnySet> {
    match (a, b) {
        (AnySet::Line(x), AnySet::Line(y)) => Ok(AnySet::Line(x.combine(y, op))),
        (AnySet::Circle(x), AnySet::Circle(y)) => Ok(AnySet::Circle(x.combine(y, op))),
        _ => Err(Error::MixedCarriers),
    }
}

pub fn essential_closure(s: &AnySet) -> AnySet {
    s.essential_closure()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_round_trip() {
        let text = r#"{"carrier":"line","intervals":[[0,1,"cc"],[1,2,"oo"]],"points":[3]}"#;
        let AnySetDescriptor::Finite(d) = parse_set_descriptor(text).unwrap() else {
            panic!("expected finite descriptor")
        };
        let s = d.build().unwrap();
        let back = s.to_descriptor().build().unwrap();
        assert_eq!(s, back);
        assert_eq!(s.measure(), 2.0);
    }

    #[test]
    fn family_descriptor() {
        let text = r#"{"family":"rational_fat","radius_base":4,"truncation":20}"#;
        match parse_set_descriptor(text).unwrap() {
            AnySetDescriptor::Family(f) => assert_eq!(f.truncation, 20),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mixed_carriers_rejected() {
        let a = AnySet::Line(RealIntervalSet::from_closed(&[(0.0, 1.0)]).unwrap());
        let b = AnySet::Circle(CircleArcSet::full());
        assert_eq!(set_algebra(&a, &b, SetOp::Union), Err(Error::MixedCarriers));
    }

    #[test]
    fn bad_flag_code() {
        let text = r#"{"carrier":"line","intervals":[[0,1,"xx"]]}"#;
        let AnySetDescriptor::Finite(d) = parse_set_descriptor(text).unwrap() else {
            panic!()
        };
        assert!(matches!(d.build(), Err(Error::Schema(_))));
    }
}
