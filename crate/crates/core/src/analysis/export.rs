use std::io::{self, Write};

use super::{MaximaTrack, ScaleGrid};

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `log2a,shear,value,normalized_value`, one line per cell.
pub fn write_grid_csv<W: Write>(out: &mut W, raw: &ScaleGrid) -> io::Result<()> {
    let normalized = if raw.normalized {
        raw.clone()
    } else {
        super::normalize_per_scale(raw).grid
    };
    writeln!(out, "log2a,shear,value,normalized_value")?;
    for (i, a) in raw.scales.iter().enumerate() {
        for (k, s) in raw.axis.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{}",
                format_float(a.log2()),
                format_float(*s),
                format_float(raw.values[i][k]),
                format_float(normalized.values[i][k])
            )?;
        }
    }
    Ok(())
}

/// Writes `log2a,position,magnitude`, one line per tracked scale.
pub fn write_track_csv<W: Write>(out: &mut W, track: &MaximaTrack) -> io::Result<()> {
    writeln!(out, "log2a,position,magnitude")?;
    for p in &track.points {
        writeln!(
            out,
            "{},{},{}",
            format_float(p.scale.log2()),
            format_float(p.position),
            format_float(p.magnitude)
        )?;
    }
    Ok(())
}
