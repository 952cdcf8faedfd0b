use std::path::Path;

use crate::{Error, Result, Vec3};

/// Raw environment points in meters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec3>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec3>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn extend(&mut self, other: impl IntoIterator<Item = Vec3>) {
        self.points.extend(other);
    }
}

/// Parses whitespace separated `x y z` lines. Blank lines are skipped.
pub fn parse_xyz(text: &str, path: &Path) -> Result<PointCloud> {
    let mut points = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        points.push(parse_triple(line).map_err(|message| Error::Parse {
            path: path.to_path_buf(),
            line: n + 1,
            message,
        })?);
    }
    Ok(PointCloud::new(points))
}

pub(crate) fn parse_triple(line: &str) -> std::result::Result<Vec3, String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(format!("expected 3 coordinates, found {}", fields.len()));
    }
    let mut xyz = [0.0; 3];
    for (slot, f) in xyz.iter_mut().zip(&fields) {
        let v: f64 = f.parse().map_err(|_| format!("invalid number {f:?}"))?;
        if !v.is_finite() {
            return Err(format!("non-finite coordinate {f:?}"));
        }
        *slot = v;
    }
    Ok(Vec3::new(xyz[0], xyz[1], xyz[2]))
}

/// Loads an ASCII XYZ point cloud, one point per non-blank line.
pub fn load_point_cloud(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_xyz(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn loads_points_in_order() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "0 0 0\n\n1 2 3").unwrap();
        let cloud = load_point_cloud(f.path()).unwrap();
        assert_eq!(cloud.points(), &[Vec3::zeros(), Vec3::new(1.0, 2.0, 3.0)]);
    }

    #[test]
    fn empty_file_gives_empty_cloud() {
        let f = tempfile::NamedTempFile::new().unwrap();
        assert!(load_point_cloud(f.path()).unwrap().is_empty());
    }

    #[test]
    fn short_line_reports_line_number() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "0 0").unwrap();
        match load_point_cloud(f.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_point_cloud("/nonexistent/cloud.xyz"),
            Err(Error::Io { .. })
        ));
    }
}
