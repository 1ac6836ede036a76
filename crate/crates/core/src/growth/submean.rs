use super::GrowthError;
use crate::field::GridField;
use serde::Serialize;

/// Tolerance constant: the defect may dip to `-SUBMEAN_C · h² · max|∂²u|`.
pub const SUBMEAN_C: f64 = 10.0;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SubmeanResult {
    pub holds: bool,
    /// Disk average minus center value (relative to the local maximum for log fields).
    pub defect: f64,
    pub tolerance: f64,
    /// Largest second difference in the disk, i.e. `h² max|∂²u|`.
    pub second_diff: f64,
    /// `max(0, -defect) / second_diff`, the constant the defect actually needed.
    pub c_measured: f64,
}

/// Compare `u(z)` with its average over the grid points of `D(z, r)`.
/// Log fields are exponentiated relative to the local maximum first.
pub fn submean_check(field: &GridField, ix: usize, iy: usize, r: f64) -> Result<SubmeanResult, GrowthError> {
    let h = field.h;
    if r < 2.0 * h {
        return Err(GrowthError::RadiusTooSmall { r, h });
    }
    let m = (r / h).floor() as isize;
    let (cx, cy) = (ix as isize, iy as isize);
    if cx - m - 1 < 0 || cy - m - 1 < 0 || cx + m + 1 >= field.nx() as isize || cy + m + 1 >= field.ny() as isize {
        return Err(GrowthError::DiskOutOfRange);
    }
    let rr = (r / h) * (r / h);
    let offsets: Vec<(isize, isize)> = (-m..=m)
        .flat_map(|dy| (-m..=m).map(move |dx| (dx, dy)))
        .filter(|&(dx, dy)| (dx * dx + dy * dy) as f64 <= rr + 1e-9)
        .collect();
    let raw = |x: isize, y: isize| field.values[[y as usize, x as usize]];
    let scale = if field.log_domain {
        offsets
            .iter()
            .flat_map(|&(dx, dy)| {
                let (x, y) = (cx + dx, cy + dy);
                [raw(x, y), raw(x + 1, y), raw(x - 1, y), raw(x, y + 1), raw(x, y - 1)]
            })
            .fold(f64::NEG_INFINITY, f64::max)
    } else {
        0.0
    };
    let val = |x: isize, y: isize| {
        let v = raw(x, y);
        if field.log_domain {
            if scale == f64::NEG_INFINITY {
                0.0
            } else {
                (v - scale).exp()
            }
        } else {
            v
        }
    };
    let mut sum = 0.0;
    let mut sd: f64 = 0.0;
    let mut mag: f64 = 0.0;
    for &(dx, dy) in &offsets {
        let (x, y) = (cx + dx, cy + dy);
        let v = val(x, y);
        sum += v;
        mag = mag.max(v.abs());
        sd = sd.max((val(x + 1, y) + val(x - 1, y) - 2.0 * v).abs());
        sd = sd.max((val(x, y + 1) + val(x, y - 1) - 2.0 * v).abs());
    }
    let defect = sum / offsets.len() as f64 - val(cx, cy);
    let tolerance = SUBMEAN_C * sd + 1e-12 * mag;
    let c_measured = if defect >= 0.0 {
        0.0
    } else if sd > 0.0 {
        -defect / sd
    } else if -defect <= 1e-12 * mag {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(SubmeanResult { holds: defect >= -tolerance, defect, tolerance, second_diff: sd, c_measured })
}
