//! Line-oriented wireframe text format.
//!
//! `v x y z` lines carry vertex coordinates as decimal floats of up to nine
//! significant digits (single-precision round trip); `l a b` lines carry
//! 1-based vertex indices; `#` starts a comment line. Writing is
//! deterministic, so identical wireframes yield byte-identical files.

use std::fs;
use std::path::Path;

use crate::error::WireframeError;
use crate::wireframe::Wireframe;

/// Formats one coordinate. Coordinates pass through `f32`, whose shortest
/// round-trip representation never needs more than nine significant digits.
fn fmt_coord(c: f64) -> String {
    format!("{}", c as f32)
}

pub fn format_wireframe(w: &Wireframe) -> String {
    let mut out = String::new();
    for v in w.vertices() {
        out.push('v');
        for c in v {
            out.push(' ');
            out.push_str(&fmt_coord(*c));
        }
        out.push('\n');
    }
    for &(a, b) in w.segments() {
        out.push_str(&format!("l {} {}\n", a + 1, b + 1));
    }
    out
}

pub fn parse_wireframe(text: &str) -> Result<Wireframe, WireframeError> {
    let mut vertices: Vec<[f64; 3]> = Vec::new();
    let mut segments: Vec<(usize, usize)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = lineno + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let tag = parts.next().unwrap();
        let fields: Vec<&str> = parts.collect();
        match tag {
            "v" => {
                if fields.len() != 3 {
                    return Err(parse_err(lineno, "expected `v x y z`"));
                }
                let mut v = [0.0f64; 3];
                for (k, f) in fields.iter().enumerate() {
                    let c: f32 = f
                        .parse()
                        .map_err(|_| parse_err(lineno, &format!("bad coordinate `{f}`")))?;
                    v[k] = c as f64;
                }
                vertices.push(v);
            }
            "l" => {
                if fields.len() != 2 {
                    return Err(parse_err(lineno, "expected `l a b`"));
                }
                let mut idx = [0usize; 2];
                for (k, f) in fields.iter().enumerate() {
                    let i: usize = f
                        .parse()
                        .map_err(|_| parse_err(lineno, &format!("bad index `{f}`")))?;
                    if i == 0 {
                        return Err(parse_err(lineno, "indices are 1-based"));
                    }
                    idx[k] = i - 1;
                }
                segments.push((idx[0], idx[1]));
            }
            other => {
                return Err(parse_err(lineno, &format!("unknown record `{other}`")));
            }
        }
    }
    Wireframe::new(vertices, segments)
}

fn parse_err(line: usize, message: &str) -> WireframeError {
    WireframeError::Parse { line, message: message.to_string() }
}

pub fn read_wireframe(path: &Path) -> Result<Wireframe, WireframeError> {
    let text = fs::read_to_string(path).map_err(|source| WireframeError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_wireframe(&text)
}

pub fn write_wireframe(path: &Path, w: &Wireframe) -> Result<(), WireframeError> {
    fs::write(path, format_wireframe(w)).map_err(|source| WireframeError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_simple_file() {
        let text = "# a square\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nl 1 2\nl 2 3\nl 3 4\nl 4 1\n";
        let w = parse_wireframe(text).unwrap();
        assert_eq!(w.vertex_count(), 4);
        assert_eq!(w.segment_count(), 4);
        let emitted = format_wireframe(&w);
        let again = parse_wireframe(&emitted).unwrap();
        assert_eq!(w, again);
        // Canonical files are stable bytes.
        assert_eq!(emitted, format_wireframe(&again));
    }

    #[test]
    fn coordinates_survive_a_write_read_cycle_exactly() {
        // Values representable in single precision round-trip exactly.
        let w = Wireframe::new(
            vec![[-0.9921875, 0.5, 0.25], [0.0078125, -1.0, 1.0]],
            vec![(0, 1)],
        )
        .unwrap();
        let again = parse_wireframe(&format_wireframe(&w)).unwrap();
        assert_eq!(w, again);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(matches!(
            parse_wireframe("v 0 0\n"),
            Err(WireframeError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_wireframe("v 0 0 0\nv 1 0 0\nl 0 1\n"),
            Err(WireframeError::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_wireframe("x 1 2 3\n"),
            Err(WireframeError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_wireframe("v 0 0 zebra\n"),
            Err(WireframeError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn parse_enforces_wireframe_invariants() {
        // Out-of-range index surfaces as a wireframe error, not a panic.
        assert!(matches!(
            parse_wireframe("v 0 0 0\nv 1 0 0\nl 1 3\n"),
            Err(WireframeError::IndexOutOfRange { .. })
        ));
    }
}
