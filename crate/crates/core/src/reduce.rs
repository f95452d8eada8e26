//! Order-fixed complex summation.
//!
//! Terms are grouped into blocks of [`BLOCK`] consecutive indices; each block
//! is summed left to right with Neumaier compensation and the block totals are
//! combined by a balanced pairwise tree. The grouping depends only on the
//! number of terms, so results are bit-identical for any thread count.

use num_complex::Complex64;
use rayon::prelude::*;

pub const BLOCK: u64 = 4096;

#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

#[inline]
fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.sum.re, &mut self.comp.re, z.re);
        neumaier(&mut self.sum.im, &mut self.comp.im, z.im);
    }

    pub fn total(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// Compensated real sum, left to right.
pub fn sum_f64<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for x in it {
        neumaier(&mut s, &mut c, x);
    }
    s + c
}

fn tree(parts: &[Complex64]) -> Complex64 {
    match parts.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => parts[0],
        n => {
            let mid = n / 2;
            tree(&parts[..mid]) + tree(&parts[mid..])
        }
    }
}

/// Sums `f(0) + ... + f(len - 1)` in the fixed block/tree order, evaluating
/// blocks in parallel.
pub fn det_sum<F>(len: u64, f: F) -> Complex64
where
    F: Fn(u64) -> Complex64 + Sync,
{
    let blocks = len.div_ceil(BLOCK);
    let parts: Vec<Complex64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = CompensatedSum::default();
            let end = ((b + 1) * BLOCK).min(len);
            for i in b * BLOCK..end {
                acc.add(f(i));
            }
            acc.total()
        })
        .collect();
    tree(&parts)
}

/// Fallible variant of [`det_sum`]; the first error in index order wins.
pub fn try_det_sum<F, E>(len: u64, f: F) -> Result<Complex64, E>
where
    F: Fn(u64) -> Result<Complex64, E> + Sync,
    E: Send,
{
    let blocks = len.div_ceil(BLOCK);
    let parts: Result<Vec<Complex64>, E> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = CompensatedSum::default();
            let end = ((b + 1) * BLOCK).min(len);
            for i in b * BLOCK..end {
                acc.add(f(i)?);
            }
            Ok(acc.total())
        })
        .collect();
    Ok(tree(&parts?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_count_does_not_change_bits() {
        let f = |i: u64| Complex64::from_polar(1.0, (i as f64).sqrt() * 0.37);
        let n = 50_000;
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| det_sum(n, f));
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| det_sum(n, f));
        assert_eq!(one.re.to_bits(), many.re.to_bits());
        assert_eq!(one.im.to_bits(), many.im.to_bits());
    }

    #[test]
    fn empty_and_small() {
        assert_eq!(det_sum(0, |_| Complex64::new(1.0, 0.0)), Complex64::new(0.0, 0.0));
        assert_eq!(det_sum(3, |i| Complex64::new(i as f64, 1.0)), Complex64::new(3.0, 3.0));
    }

    #[test]
    fn compensation_recovers_small_terms() {
        let s = sum_f64([1e16, 1.0, -1e16, 1.0]);
        assert_eq!(s, 2.0);
    }
}
