use super::{EdgeRef, GeometryError, GeometryMap, Interface, MultiPatch, Patch, Side};
use crate::splines::Partition;

pub const BUILTIN_NAMES: [&str; 4] = [
    "unit_square",
    "two_patch_square",
    "two_patch_skew",
    "three_patch_L",
];

fn iface(a: usize, sa: Side, b: usize, sb: Side, reversed: bool) -> Interface {
    Interface {
        left: EdgeRef { patch: a, side: sa },
        right: EdgeRef { patch: b, side: sb },
        reversed,
    }
}

fn bilinear(c: [[f64; 2]; 4]) -> GeometryMap {
    GeometryMap::Bilinear { corners: c }
}

/// Built-in geometry with uniform `n × n` partitions on every patch.
///
/// - `unit_square`: identity map.
/// - `two_patch_square`: the halves `[0,½]×[0,1]` and `[½,1]×[0,1]`.
/// - `two_patch_skew`: two twisted bilinear patches whose cross derivatives
///   differ along the interface, so `β ≢ 0`.
/// - `three_patch_L`: L-shaped domain; the top patch is rotated by 180° so
///   its interface is reversed.
pub fn builtin(name: &str, n: usize) -> Result<MultiPatch, GeometryError> {
    let z = Partition::uniform(n)?;
    let zz = || [z.clone(), z.clone()];
    let (maps, interfaces) = match name {
        "unit_square" => (vec![GeometryMap::identity()], vec![]),
        "two_patch_square" => (
            vec![
                GeometryMap::rectangle(0.0, 0.5, 0.0, 1.0),
                GeometryMap::rectangle(0.5, 1.0, 0.0, 1.0),
            ],
            vec![iface(0, Side::S2, 1, Side::S4, false)],
        ),
        "two_patch_skew" => (
            vec![
                bilinear([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.2]]),
                bilinear([[1.0, 0.0], [2.0, 0.1], [1.0, 1.2], [2.0, 1.0]]),
            ],
            vec![iface(0, Side::S2, 1, Side::S4, false)],
        ),
        "three_patch_L" => (
            vec![
                GeometryMap::identity(),
                bilinear([[1.0, 0.0], [2.0, 0.0], [1.0, 1.0], [2.0, 1.25]]),
                bilinear([[1.25, 2.0], [0.0, 2.0], [1.0, 1.0], [0.0, 1.0]]),
            ],
            vec![
                iface(0, Side::S2, 1, Side::S4, false),
                iface(0, Side::S3, 2, Side::S3, true),
            ],
        ),
        _ => return Err(GeometryError::UnknownBuiltin(name.to_string())),
    };
    MultiPatch::new(
        maps.into_iter().map(|m| Patch::new(m, zz())).collect(),
        interfaces,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_topology() {
        let m = builtin("two_patch_square", 4).unwrap();
        assert_eq!(m.interfaces.len(), 1);
        assert_eq!(m.boundary_edges().len(), 6);
        let l = builtin("three_patch_L", 4).unwrap();
        assert_eq!(l.interfaces.len(), 2);
        assert_eq!(l.boundary_edges().len(), 8);
        assert!(builtin("nope", 4).is_err());
        for name in BUILTIN_NAMES {
            assert!(builtin(name, 8).is_ok(), "{name}");
        }
    }

    #[test]
    fn l_shape_has_valence_three_vertex() {
        let l = builtin("three_patch_L", 4).unwrap();
        let v = l.vertices();
        assert!(v.iter().any(|v| v.corners.len() == 3));
    }
}
