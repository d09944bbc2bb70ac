//! Row-major dense tensors and single-axis linear maps on them.

use std::ops::{AddAssign, Mul};

use num_traits::Zero;

/// Applies `mat` (shape `rows × extents[axis]`, row-major) along `axis`.
/// Returns the new data; the caller updates `extents[axis] = rows`.
pub(crate) fn mode_product<T>(data: &[T], extents: &[usize], axis: usize, mat: &[T], rows: usize) -> Vec<T>
where
    T: Copy + Zero + Mul<Output = T> + AddAssign,
{
    let inner: usize = extents[axis + 1..].iter().product();
    let outer: usize = extents[..axis].iter().product();
    let k_len = extents[axis];
    debug_assert_eq!(data.len(), outer * k_len * inner);
    debug_assert_eq!(mat.len(), rows * k_len);

    let mut out = vec![T::zero(); outer * rows * inner];
    for o in 0..outer {
        let src = &data[o * k_len * inner..(o + 1) * k_len * inner];
        let dst = &mut out[o * rows * inner..(o + 1) * rows * inner];
        for r in 0..rows {
            let row = &mat[r * k_len..(r + 1) * k_len];
            let dst_r = &mut dst[r * inner..(r + 1) * inner];
            for (k, &m) in row.iter().enumerate() {
                if m.is_zero() {
                    continue;
                }
                let src_k = &src[k * inner..(k + 1) * inner];
                for (d, &s) in dst_r.iter_mut().zip(src_k) {
                    *d += m * s;
                }
            }
        }
    }
    out
}

pub(crate) fn strides(extents: &[usize]) -> Vec<usize> {
    let mut s = vec![1; extents.len()];
    for i in (0..extents.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * extents[i + 1];
    }
    s
}

pub(crate) fn unravel(mut flat: usize, extents: &[usize], out: &mut [usize]) {
    for i in (0..extents.len()).rev() {
        out[i] = flat % extents[i];
        flat /= extents[i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn middle_axis_product() {
        // extents (2, 3, 2); map axis 1 to a single row summing its entries.
        let data: Vec<f64> = (0..12).map(|v| v as f64).collect();
        let out = mode_product(&data, &[2, 3, 2], 1, &[1.0, 1.0, 1.0], 1);
        assert_eq!(out, vec![6.0, 9.0, 24.0, 27.0]);
    }

    #[test]
    fn unravel_roundtrip() {
        let ext = [3, 4, 2];
        let st = strides(&ext);
        let mut idx = [0; 3];
        for flat in 0..24 {
            unravel(flat, &ext, &mut idx);
            assert_eq!(idx.iter().zip(&st).map(|(i, s)| i * s).sum::<usize>(), flat);
        }
    }
}
