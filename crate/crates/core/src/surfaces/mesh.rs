use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Vector3;

/// Triangle mesh with 0-based face indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vector3<f64>>,
    pub faces: Vec<[usize; 3]>,
}

impl Mesh {
    /// Rows of `cols` vertices; consecutive rows are stitched with two
    /// triangles per quad. `wrap_rows` joins the last row to the first and
    /// `wrap_cols` the last column to the first.
    pub(crate) fn grid(vertices: Vec<Vector3<f64>>, cols: usize, wrap_rows: bool, wrap_cols: bool) -> Self {
        let rows = vertices.len() / cols;
        let mut faces = Vec::new();
        let row_pairs = if wrap_rows { rows } else { rows - 1 };
        let col_pairs = if wrap_cols { cols } else { cols - 1 };
        for i in 0..row_pairs {
            let i1 = (i + 1) % rows;
            for j in 0..col_pairs {
                let j1 = (j + 1) % cols;
                let (a, b, c, d) = (i * cols + j, i1 * cols + j, i1 * cols + j1, i * cols + j1);
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            }
        }
        Self { vertices, faces }
    }

    pub fn area(&self, face: usize) -> f64 {
        let [a, b, c] = self.faces[face];
        let (a, b, c) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn is_valid(&self) -> bool {
        self.vertices.iter().all(|v| v.iter().all(|x| x.is_finite()))
            && self.faces.iter().flatten().all(|&k| k < self.vertices.len())
    }

    /// Wavefront OBJ text: `v x y z` lines then `f i j k` with 1-based indices.
    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
        }
        for f in &self.faces {
            let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
        }
        out
    }

    pub fn write_obj(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::write(path, self.to_obj())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open_grid_has_two_triangles_per_quad() {
        let v = (0..6).map(|k| Vector3::new((k % 3) as f64, (k / 3) as f64, 0.0)).collect();
        let m = Mesh::grid(v, 3, false, false);
        assert_eq!(m.faces.len(), 4);
        assert!((0..4).all(|f| (m.area(f) - 0.5).abs() < 1e-15));
        assert!(m.is_valid());
    }

    #[test]
    fn obj_uses_one_based_indices() {
        let m = Mesh {
            vertices: vec![Vector3::zeros(), Vector3::x(), Vector3::new(0.0, 0.5, 0.0)],
            faces: vec![[0, 1, 2]],
        };
        assert_eq!(m.to_obj(), "v 0 0 0\nv 1 0 0\nv 0 0.5 0\nf 1 2 3\n");
    }
}
