use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PolytopeCounts {
    pub vertices: u64,
    pub edges: u64,
    pub faces: u64,
}

impl PolytopeCounts {
    pub const fn new(vertices: u64, edges: u64, faces: u64) -> Self {
        PolytopeCounts {
            vertices,
            edges,
            faces,
        }
    }
}

/// `χ = V − E + F`
pub fn euler_characteristic(counts: PolytopeCounts) -> i128 {
    i128::from(counts.vertices) - i128::from(counts.edges) + i128::from(counts.faces)
}

/// Vertex, edge and face counts of the five Platonic solids.
pub const PLATONIC_SOLIDS: [(&str, PolytopeCounts); 5] = [
    ("tetrahedron", PolytopeCounts::new(4, 6, 4)),
    ("cube", PolytopeCounts::new(8, 12, 6)),
    ("octahedron", PolytopeCounts::new(6, 12, 8)),
    ("dodecahedron", PolytopeCounts::new(20, 30, 12)),
    ("icosahedron", PolytopeCounts::new(12, 30, 20)),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_and_tetrahedron() {
        assert_eq!(euler_characteristic(PolytopeCounts::new(8, 12, 6)), 2);
        assert_eq!(euler_characteristic(PolytopeCounts::new(4, 6, 4)), 2);
    }

    #[test]
    fn empty_counts() {
        assert_eq!(euler_characteristic(PolytopeCounts::new(0, 0, 0)), 0);
    }

    #[test]
    fn no_overflow_at_extremes() {
        assert_eq!(
            euler_characteristic(PolytopeCounts::new(0, u64::MAX, 0)),
            -i128::from(u64::MAX)
        );
    }
}
