//! Versioned CSV serialization for immersions, frame fields, scalar fields
//! and curves.
//!
//! Every file opens with `# lorsurf <kind> v1`, a `# grid:` line with the
//! rectangle and node counts, and a `# columns:` line, followed by row-major
//! data rows.  Floats use Rust's shortest round-trip formatting, so
//! write -> read -> write is byte-stable.

use std::io::{BufRead, Write};

use crate::clifford::{Mat2A, Mat2R, Vec22};
use crate::error::{Error, Result};
use crate::flat::Mat2AField;
use crate::grid::{Field, GridSpec, RealField};
use crate::lorentz::Lorentz;
use crate::weierstrass::Immersion22;

const VERSION: &str = "v1";

fn write_header(w: &mut impl Write, kind: &str, spec: GridSpec) -> Result<()> {
    writeln!(w, "# lorsurf {kind} {VERSION}")?;
    writeln!(
        w,
        "# grid: {} {} {} {} {} {}",
        spec.s0, spec.s1, spec.t0, spec.t1, spec.ns, spec.nt
    )?;
    Ok(())
}

fn next_line(lines: &mut impl Iterator<Item = std::io::Result<String>>) -> Result<String> {
    match lines.next() {
        Some(Ok(line)) => Ok(line),
        Some(Err(e)) => Err(e.into()),
        None => Err(Error::Parse("unexpected end of file".into())),
    }
}

fn parse_f64(tok: &str) -> Result<f64> {
    tok.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {tok:?}")))
}

fn parse_usize(tok: &str) -> Result<usize> {
    tok.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a count: {tok:?}")))
}

fn read_header(
    lines: &mut impl Iterator<Item = std::io::Result<String>>,
    kind: &str,
) -> Result<GridSpec> {
    let magic = next_line(lines)?;
    let want = format!("# lorsurf {kind} {VERSION}");
    if magic.trim() != want {
        return Err(Error::Parse(format!("expected {want:?}, found {magic:?}")));
    }
    let grid = next_line(lines)?;
    let rest = grid
        .strip_prefix("# grid:")
        .ok_or_else(|| Error::Parse(format!("missing grid header, found {grid:?}")))?;
    let toks: Vec<&str> = rest.split_whitespace().collect();
    if toks.len() != 6 {
        return Err(Error::Parse(format!(
            "grid header needs 6 fields, found {}",
            toks.len()
        )));
    }
    let columns = next_line(lines)?;
    if !columns.starts_with("# columns:") {
        return Err(Error::Parse(format!(
            "missing columns header, found {columns:?}"
        )));
    }
    GridSpec::new(
        parse_f64(toks[0])?,
        parse_f64(toks[1])?,
        parse_f64(toks[2])?,
        parse_f64(toks[3])?,
        parse_usize(toks[4])?,
        parse_usize(toks[5])?,
    )
}

/// Reads `spec.len()` data rows of `4 + width` comma-separated fields and
/// hands the payload slices to `emit` in row-major order.
fn read_rows(
    lines: &mut impl Iterator<Item = std::io::Result<String>>,
    spec: GridSpec,
    width: usize,
    mut emit: impl FnMut(&[f64]) -> Result<()>,
) -> Result<()> {
    let mut payload = vec![0.0; width];
    for i in 0..spec.ns {
        for j in 0..spec.nt {
            let line = next_line(lines)?;
            let toks: Vec<&str> = line.split(',').collect();
            if toks.len() != 4 + width {
                return Err(Error::Parse(format!(
                    "row ({i},{j}): expected {} fields, found {}",
                    4 + width,
                    toks.len()
                )));
            }
            if parse_usize(toks[0])? != i || parse_usize(toks[1])? != j {
                return Err(Error::Parse(format!(
                    "row ({i},{j}): index fields out of order: {line:?}"
                )));
            }
            for (slot, tok) in payload.iter_mut().zip(&toks[4..]) {
                *slot = parse_f64(tok)?;
            }
            emit(&payload)?;
        }
    }
    match lines.next() {
        None => Ok(()),
        Some(_) => Err(Error::Parse("trailing data after the last row".into())),
    }
}

pub fn write_immersion(w: &mut impl Write, im: &Immersion22) -> Result<()> {
    let spec = im.spec();
    write_header(w, "immersion", spec)?;
    writeln!(w, "# columns: i,j,s,t,x0,x1,x2,x3")?;
    for i in 0..spec.ns {
        for j in 0..spec.nt {
            let x = im.get(i, j);
            writeln!(
                w,
                "{i},{j},{},{},{},{},{},{}",
                spec.s(i),
                spec.t(j),
                x.0[0],
                x.0[1],
                x.0[2],
                x.0[3]
            )?;
        }
    }
    Ok(())
}

pub fn read_immersion(r: impl BufRead) -> Result<Immersion22> {
    let mut lines = r.lines();
    let spec = read_header(&mut lines, "immersion")?;
    let mut points = Vec::with_capacity(spec.len());
    read_rows(&mut lines, spec, 4, |row| {
        points.push(Vec22([row[0], row[1], row[2], row[3]]));
        Ok(())
    })?;
    Ok(Immersion22::new(Field::from_values(spec, points)?))
}

/// Frame entries are written as the eight `(u, v)` parts of the four matrix
/// entries, which round-trip exactly.
pub fn write_frames(w: &mut impl Write, b: &Mat2AField) -> Result<()> {
    let spec = b.spec();
    write_header(w, "frames", spec)?;
    writeln!(
        w,
        "# columns: i,j,s,t,b00u,b00v,b01u,b01v,b10u,b10v,b11u,b11v"
    )?;
    for i in 0..spec.ns {
        for j in 0..spec.nt {
            let m = b.get(i, j);
            write!(w, "{i},{j},{},{}", spec.s(i), spec.t(j))?;
            for r in 0..2 {
                for c in 0..2 {
                    write!(w, ",{},{}", m.0[r][c].u, m.0[r][c].v)?;
                }
            }
            writeln!(w)?;
        }
    }
    Ok(())
}

/// Reads a frame file back as a bare field; the generating forms are not
/// stored, so the result supports decomposition but not re-immersion.
pub fn read_frames(r: impl BufRead) -> Result<(GridSpec, Field<Mat2A>)> {
    let mut lines = r.lines();
    let spec = read_header(&mut lines, "frames")?;
    let mut frames = Vec::with_capacity(spec.len());
    read_rows(&mut lines, spec, 8, |row| {
        let entry = |k: usize| Lorentz::new(row[2 * k], row[2 * k + 1]);
        frames.push(Mat2A([[entry(0), entry(1)], [entry(2), entry(3)]]));
        Ok(())
    })?;
    Ok((spec, Field::from_values(spec, frames)?))
}

/// Scalar grid field, e.g. a curvature report field.  NaN entries (the
/// undefined boundary margin) are preserved.
pub fn write_real_field(w: &mut impl Write, name: &str, field: &RealField) -> Result<()> {
    let spec = field.spec();
    write_header(w, "field", spec)?;
    writeln!(w, "# columns: i,j,s,t,{name}")?;
    for i in 0..spec.ns {
        for j in 0..spec.nt {
            writeln!(w, "{i},{j},{},{},{}", spec.s(i), spec.t(j), field.get(i, j))?;
        }
    }
    Ok(())
}

pub fn read_real_field(r: impl BufRead) -> Result<RealField> {
    let mut lines = r.lines();
    let spec = read_header(&mut lines, "field")?;
    let mut values = Vec::with_capacity(spec.len());
    read_rows(&mut lines, spec, 1, |row| {
        values.push(row[0]);
        Ok(())
    })?;
    Field::from_values(spec, values)
}

/// One decomposed curve: unit-determinant real matrices along a single axis.
pub fn write_curve(
    w: &mut impl Write,
    axis: &str,
    x0: f64,
    step: f64,
    mats: &[Mat2R],
) -> Result<()> {
    writeln!(w, "# lorsurf curve {VERSION}")?;
    writeln!(w, "# axis: {axis} {x0} {step} {}", mats.len())?;
    writeln!(w, "# columns: k,{axis},b00,b01,b10,b11")?;
    for (k, m) in mats.iter().enumerate() {
        writeln!(
            w,
            "{k},{},{},{},{},{}",
            x0 + k as f64 * step,
            m.0[0][0],
            m.0[0][1],
            m.0[1][0],
            m.0[1][1]
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat::{integrate_frame, ConformalOneForm};

    fn demo_immersion() -> Immersion22 {
        let spec = GridSpec::new(0.25, 1.0, -0.5, 0.25, 4, 5).unwrap();
        Immersion22::new(Field::from_fn(spec, |i, j| {
            let (u, v) = spec.uv(i, j);
            Vec22([-(u * u + v * v) / 2.0, -(u * u + v * v) / 2.0, u, v])
        }))
    }

    #[test]
    fn immersion_roundtrip_is_byte_stable() {
        let im = demo_immersion();
        let mut buf = Vec::new();
        write_immersion(&mut buf, &im).unwrap();
        let back = read_immersion(buf.as_slice()).unwrap();
        assert_eq!(back.max_abs_diff(&im), 0.0);
        let mut again = Vec::new();
        write_immersion(&mut again, &back).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn frames_roundtrip_exactly() {
        let spec = GridSpec::new(0.0, 0.8, 0.0, 0.9, 5, 7).unwrap();
        let b = integrate_frame(
            &ConformalOneForm::new(|s: f64| s.cosh(), |t: f64| t.cosh()),
            &ConformalOneForm::constant(0.3),
            &Mat2A::identity(),
            spec,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_frames(&mut buf, &b).unwrap();
        let (back_spec, frames) = read_frames(buf.as_slice()).unwrap();
        assert_eq!(back_spec, spec);
        for i in 0..spec.ns {
            for j in 0..spec.nt {
                assert_eq!(frames.get(i, j).abs_max_diff(&b.get(i, j)), 0.0);
            }
        }
    }

    #[test]
    fn nan_entries_survive_the_field_roundtrip() {
        let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 3, 3).unwrap();
        let field: RealField =
            Field::from_fn(
                spec,
                |i, j| if i == 0 { f64::NAN } else { (i + 2 * j) as f64 },
            );
        let mut buf = Vec::new();
        write_real_field(&mut buf, "demo", &field).unwrap();
        let back = read_real_field(buf.as_slice()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let (a, b) = (field.get(i, j), back.get(i, j));
                assert!(a == b || (a.is_nan() && b.is_nan()));
            }
        }
    }

    #[test]
    fn malformed_files_are_rejected() {
        let im = demo_immersion();
        let mut buf = Vec::new();
        write_immersion(&mut buf, &im).unwrap();
        let text = String::from_utf8(buf).unwrap();

        let truncated: String = text.lines().take(10).collect::<Vec<_>>().join("\n");
        assert!(matches!(
            read_immersion(truncated.as_bytes()),
            Err(Error::Parse(_))
        ));

        let wrong_kind = text.replacen("immersion", "frames", 1);
        assert!(matches!(
            read_immersion(wrong_kind.as_bytes()),
            Err(Error::Parse(_))
        ));

        let corrupt = text.replacen("0.25", "zero.25", 1);
        assert!(matches!(
            read_immersion(corrupt.as_bytes()),
            Err(Error::Parse(_))
        ));

        let trailing = format!("{text}0,0,0,0,0,0,0,0\n");
        assert!(matches!(
            read_immersion(trailing.as_bytes()),
            Err(Error::Parse(_))
        ));
    }
}
