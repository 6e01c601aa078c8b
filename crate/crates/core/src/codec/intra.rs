//! Block intra prediction: planar, DC, and 33 angular modes over a left /
//! corner / top reference border, with nearest-available substitution for
//! reference samples that have not been reconstructed yet.

use crate::error::{Error, Result};
use super::profile::NUM_MODES;

/// Angle steps (in 1/32-pel per row) for modes 2..=18; modes 19..=34 mirror
/// the tail of the table around the pure-vertical axis.
const ANGLES: [i32; 17] = [32, 26, 21, 17, 13, 9, 5, 2, 0, -2, -5, -9, -13, -17, -21, -26, -32];

fn angle_of(mode: u8) -> i32 {
    debug_assert!((2..NUM_MODES).contains(&mode));
    if mode <= 18 {
        ANGLES[(mode - 2) as usize]
    } else {
        ANGLES[(34 - mode) as usize]
    }
}

/// Fixed-point 256/angle for the negative angles, used to project side
/// reference samples onto the extended main reference.
fn inv_angle(angle: i32) -> i32 {
    match angle {
        -2 => -4096,
        -5 => -1638,
        -9 => -910,
        -13 => -630,
        -17 => -482,
        -21 => -390,
        -26 => -315,
        -32 => -256,
        _ => unreachable!("inv_angle only defined for negative angles"),
    }
}

/// Reference border for an n x n block: `left` runs down from the block's
/// top-left (2n samples), `top` runs right (2n samples), `corner` is the
/// shared diagonal neighbor.
#[derive(Debug, Clone)]
pub struct IntraRefs {
    pub n: usize,
    pub corner: i32,
    pub left: Vec<i32>,
    pub top: Vec<i32>,
}

/// Collect the border from a reconstructed plane, substituting unavailable
/// samples with the nearest available one along the border (scanned from the
/// bottom-left end), or 128 if nothing on the border is available.
pub fn build_references(
    recon: &[u8],
    width: usize,
    height: usize,
    coded: &[bool],
    r0: usize,
    c0: usize,
    n: usize,
) -> IntraRefs {
    let sample = |r: isize, c: isize| -> Option<i32> {
        if r < 0 || c < 0 || r as usize >= height || c as usize >= width {
            return None;
        }
        let idx = r as usize * width + c as usize;
        if coded[idx] {
            Some(recon[idx] as i32)
        } else {
            None
        }
    };
    // border ordered bottom-left -> top-right: left column bottom-up,
    // corner, top row left-to-right
    let mut border: Vec<Option<i32>> = Vec::with_capacity(4 * n + 1);
    for t in 0..2 * n {
        border.push(sample(r0 as isize + (2 * n - 1 - t) as isize, c0 as isize - 1));
    }
    border.push(sample(r0 as isize - 1, c0 as isize - 1));
    for t in 0..2 * n {
        border.push(sample(r0 as isize - 1, c0 as isize + t as isize));
    }

    let filled: Vec<i32> = if border.iter().all(|b| b.is_none()) {
        vec![128; border.len()]
    } else {
        let first = border.iter().flatten().copied().next().unwrap();
        let mut prev = first;
        border
            .iter()
            .map(|b| {
                if let Some(v) = *b {
                    prev = v;
                }
                prev
            })
            .collect()
    };

    let left: Vec<i32> = (0..2 * n).map(|i| filled[2 * n - 1 - i]).collect();
    IntraRefs { n, corner: filled[2 * n], left, top: filled[2 * n + 1..].to_vec() }
}

/// Predict an n x n block (row-major) for the given mode.
pub fn predict(refs: &IntraRefs, mode: u8) -> Result<Vec<i32>> {
    if mode >= NUM_MODES {
        return Err(Error::InvalidParameter(format!("intra mode {mode} out of range")));
    }
    let n = refs.n;
    Ok(match mode {
        0 => planar(refs),
        1 => {
            let sum: i32 = refs.top[..n].iter().chain(refs.left[..n].iter()).sum();
            let dc = (sum + n as i32) >> (n.trailing_zeros() + 1);
            vec![dc; n * n]
        }
        _ => angular(refs, mode),
    })
}

fn planar(refs: &IntraRefs) -> Vec<i32> {
    let n = refs.n;
    let shift = n.trailing_zeros() + 1;
    let tr = refs.top[n]; // top-right neighbor of the block row
    let bl = refs.left[n]; // bottom-left neighbor of the block column
    let mut out = vec![0i32; n * n];
    for y in 0..n {
        for x in 0..n {
            let h = (n - 1 - x) as i32 * refs.left[y] + (x + 1) as i32 * tr;
            let v = (n - 1 - y) as i32 * refs.top[x] + (y + 1) as i32 * bl;
            out[y * n + x] = (h + v + n as i32) >> shift;
        }
    }
    out
}

fn angular(refs: &IntraRefs, mode: u8) -> Vec<i32> {
    let n = refs.n as i32;
    let angle = angle_of(mode);
    let vertical = mode >= 18;
    let (main, side) = if vertical { (&refs.top, &refs.left) } else { (&refs.left, &refs.top) };

    // extended main reference, corner at index `n` so projected indices down
    // to -n stay in bounds
    let off = refs.n;
    let mut ext = vec![0i32; 3 * refs.n + 2];
    ext[off] = refs.corner;
    for i in 0..2 * refs.n {
        ext[off + 1 + i] = main[i];
    }
    // one guard sample: at the steepest positive angle the interpolation pair
    // touches index 2n+1 with zero weight
    ext[off + 2 * refs.n + 1] = main[2 * refs.n - 1];
    if angle < 0 {
        // deepest index ever read is ((n*angle)>>5) + 1
        let last = (n * angle) >> 5;
        let ia = inv_angle(angle);
        for x in (last + 1)..0 {
            let s = ((x * ia + 128) >> 8) - 1;
            ext[(off as i32 + x) as usize] = side[s as usize];
        }
    }

    let mut out = vec![0i32; (n * n) as usize];
    for j in 0..n {
        let pos = (j + 1) * angle;
        let idx = pos >> 5;
        let frac = pos & 31;
        for i in 0..n {
            let a = ext[(off as i32 + i + idx + 1) as usize];
            let b = ext[(off as i32 + i + idx + 2) as usize];
            let p = ((32 - frac) * a + frac * b + 16) >> 5;
            // j walks the prediction direction: rows for vertical modes,
            // columns for horizontal ones
            let (y, x) = if vertical { (j, i) } else { (i, j) };
            out[(y * n + x) as usize] = p;
        }
    }
    out
}
