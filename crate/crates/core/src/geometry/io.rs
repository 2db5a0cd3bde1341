use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EdgeRef, GeometryError, GeometryMap, Interface, MultiPatch, Patch, Side, TensorMap};
use crate::splines::{KnotVector, Partition};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryFile {
    patches: Vec<PatchFile>,
    #[serde(default)]
    interfaces: Vec<InterfaceFile>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Bilinear,
    Spline,
    Nurbs,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatchFile {
    kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degree: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    knots: Option<[Vec<f64>; 2]>,
    control_points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    partitions: [Vec<f64>; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InterfaceFile {
    left: [usize; 2],
    right: [usize; 2],
    reversed: bool,
}

fn schema(field: String, msg: impl Into<String>) -> GeometryError {
    GeometryError::Schema {
        field,
        msg: msg.into(),
    }
}

fn side(field: String, j: usize) -> Result<Side, GeometryError> {
    Side::from_index(j).ok_or_else(|| schema(field, format!("side {j} not in 1..=4")))
}

/// Parses and validates a geometry JSON document.
pub fn parse_geometry(text: &str) -> Result<MultiPatch, GeometryError> {
    let file: GeometryFile =
        serde_json::from_str(text).map_err(|e| GeometryError::Json(e.to_string()))?;
    if file.patches.is_empty() {
        return Err(schema("patches".into(), "at least one patch required"));
    }
    let mut patches = Vec::with_capacity(file.patches.len());
    for (i, pf) in file.patches.into_iter().enumerate() {
        let f = |name: &str| format!("patches[{i}].{name}");
        if pf.control_points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(schema(f("control_points"), "coordinates must be finite"));
        }
        let map = match pf.kind {
            Kind::Bilinear => {
                if pf.control_points.len() != 4 {
                    return Err(schema(
                        f("control_points"),
                        format!(
                            "bilinear patch needs 4 corner points, got {}",
                            pf.control_points.len()
                        ),
                    ));
                }
                if pf.degree.is_some() || pf.knots.is_some() || pf.weights.is_some() {
                    return Err(schema(
                        f("kind"),
                        "bilinear patches take no degree, knots or weights",
                    ));
                }
                let c = &pf.control_points;
                GeometryMap::Bilinear {
                    corners: [c[0], c[1], c[2], c[3]],
                }
            }
            Kind::Spline | Kind::Nurbs => {
                let degree = pf
                    .degree
                    .ok_or_else(|| schema(f("degree"), "missing for spline patches"))?;
                let knots = pf
                    .knots
                    .ok_or_else(|| schema(f("knots"), "missing for spline patches"))?;
                let [k1, k2] = knots;
                let b1 = KnotVector::new(degree[0], k1)
                    .map_err(|e| schema(f("knots[0]"), e.to_string()))?;
                let b2 = KnotVector::new(degree[1], k2)
                    .map_err(|e| schema(f("knots[1]"), e.to_string()))?;
                let weights = match (pf.kind, pf.weights) {
                    (Kind::Nurbs, None) => {
                        return Err(schema(f("weights"), "missing for nurbs patches"))
                    }
                    (Kind::Spline, Some(_)) => {
                        return Err(schema(f("weights"), "only nurbs patches take weights"))
                    }
                    (_, w) => w,
                };
                let tm =
                    TensorMap::new([b1, b2], pf.control_points, weights).map_err(|e| match e {
                        GeometryError::Schema { field, msg } => schema(f(&field), msg),
                        other => other,
                    })?;
                GeometryMap::Tensor(tm)
            }
        };
        let [z1, z2] = pf.partitions;
        let z1 = Partition::new(z1).map_err(|e| schema(f("partitions[0]"), e.to_string()))?;
        let z2 = Partition::new(z2).map_err(|e| schema(f("partitions[1]"), e.to_string()))?;
        patches.push(Patch::new(map, [z1, z2]));
    }
    let mut interfaces = Vec::with_capacity(file.interfaces.len());
    for (i, inf) in file.interfaces.into_iter().enumerate() {
        let f = |name: &str| format!("interfaces[{i}].{name}");
        interfaces.push(Interface {
            left: EdgeRef {
                patch: inf.left[0],
                side: side(f("left"), inf.left[1])?,
            },
            right: EdgeRef {
                patch: inf.right[0],
                side: side(f("right"), inf.right[1])?,
            },
            reversed: inf.reversed,
        });
    }
    MultiPatch::new(patches, interfaces)
}

/// Pretty JSON with shortest round-trip float formatting.
pub fn to_json(m: &MultiPatch) -> String {
    let file = GeometryFile {
        patches: m
            .patches
            .iter()
            .map(|p| {
                let partitions = [
                    p.partitions[0].breakpoints().to_vec(),
                    p.partitions[1].breakpoints().to_vec(),
                ];
                match &p.map {
                    GeometryMap::Bilinear { corners } => PatchFile {
                        kind: Kind::Bilinear,
                        degree: None,
                        knots: None,
                        control_points: corners.to_vec(),
                        weights: None,
                        partitions,
                    },
                    GeometryMap::Tensor(t) => PatchFile {
                        kind: if t.weights.is_some() {
                            Kind::Nurbs
                        } else {
                            Kind::Spline
                        },
                        degree: Some([t.bases[0].degree(), t.bases[1].degree()]),
                        knots: Some([t.bases[0].knots().to_vec(), t.bases[1].knots().to_vec()]),
                        control_points: t.control.clone(),
                        weights: t.weights.clone(),
                        partitions,
                    },
                }
            })
            .collect(),
        interfaces: m
            .interfaces
            .iter()
            .map(|i| InterfaceFile {
                left: [i.left.patch, i.left.side.index()],
                right: [i.right.patch, i.right.side.index()],
                reversed: i.reversed,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("geometry serializes");
    s.push('\n');
    s
}

pub fn load_geometry(path: impl AsRef<Path>) -> Result<MultiPatch, GeometryError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| GeometryError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    parse_geometry(&text)
}

pub fn save_geometry(m: &MultiPatch, path: impl AsRef<Path>) -> Result<(), GeometryError> {
    let path = path.as_ref();
    std::fs::write(path, to_json(m)).map_err(|e| GeometryError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::builtin;

    #[test]
    fn builtin_round_trip_is_byte_identical() {
        for name in crate::geometry::BUILTIN_NAMES {
            let m = builtin(name, 8).unwrap();
            let a = to_json(&m);
            let back = parse_geometry(&a).unwrap();
            assert_eq!(back, m);
            assert_eq!(to_json(&back), a);
        }
    }

    #[test]
    fn missing_corner_names_field() {
        let text = r#"{"patches":[{"kind":"bilinear","control_points":[[0,0],[1,0],[0,1]],
            "partitions":[[0,1],[0,1]]}],"interfaces":[]}"#;
        let err = parse_geometry(text).unwrap_err().to_string();
        assert!(err.contains("patches[0].control_points"), "{err}");
    }

    #[test]
    fn missing_field_reported() {
        let text = r#"{"patches":[{"kind":"bilinear","partitions":[[0,1],[0,1]]}]}"#;
        let err = parse_geometry(text).unwrap_err().to_string();
        assert!(err.contains("control_points"), "{err}");
    }

    #[test]
    fn bad_side_reported() {
        let m = builtin("two_patch_square", 4).unwrap();
        let text = to_json(&m).replace(
            "\"left\": [\n        0,\n        2\n      ]",
            "\"left\": [0, 7]",
        );
        let err = parse_geometry(&text).unwrap_err().to_string();
        assert!(err.contains("interfaces[0].left"), "{err}");
    }

    #[test]
    fn nurbs_requires_weights() {
        let text = r#"{"patches":[{"kind":"nurbs","degree":[1,1],"knots":[[0,0,1,1],[0,0,1,1]],
            "control_points":[[0,0],[1,0],[0,1],[1,1]],"partitions":[[0,1],[0,1]]}]}"#;
        let err = parse_geometry(text).unwrap_err().to_string();
        assert!(err.contains("patches[0].weights"), "{err}");
    }

    #[test]
    fn spline_patch_round_trip() {
        let text = r#"{"patches":[{"kind":"nurbs","degree":[2,1],"knots":[[0,0,0,0.5,1,1,1],[0,0,1,1]],
            "control_points":[[0,0],[0.3,-0.1],[0.7,0.1],[1,0],[0,1],[0.3,1.1],[0.7,0.9],[1,1]],
            "weights":[1,0.9,1.1,1,1,1.2,0.8,1],
            "partitions":[[0,0.25,0.5,0.75,1],[0,0.5,1]]}],"interfaces":[]}"#;
        let m = parse_geometry(text).unwrap();
        assert_eq!(m.patches[0].map.kind(), "nurbs");
        let a = to_json(&m);
        assert_eq!(to_json(&parse_geometry(&a).unwrap()), a);
    }

    #[test]
    fn incompatible_partition_rejected() {
        let text = r#"{"patches":[{"kind":"spline","degree":[2,1],"knots":[[0,0,0,0.3,1,1,1],[0,0,1,1]],
            "control_points":[[0,0],[0.3,0],[0.7,0],[1,0],[0,1],[0.3,1],[0.7,1],[1,1]],
            "partitions":[[0,0.5,1],[0,1]]}]}"#;
        assert!(matches!(
            parse_geometry(text),
            Err(GeometryError::IncompatiblePartition { patch: 0, dir: 1 })
        ));
    }
}
