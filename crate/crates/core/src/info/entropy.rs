use crate::error::{Error, Result};

use super::{clamp_bits, SymbolSeries};

fn entropy_of_counts<I: IntoIterator<Item = u64>>(counts: I, total: u64) -> f64 {
    let n = total as f64;
    let mut h = 0.0;
    for c in counts {
        if c > 0 {
            let p = c as f64 / n;
            h -= p * p.log2();
        }
    }
    h
}

fn counts(x: &SymbolSeries) -> Vec<u64> {
    let mut c = vec![0u64; x.alphabet() as usize];
    for &s in x.symbols() {
        c[s as usize] += 1;
    }
    c
}

/// Plug-in Shannon entropy in bits.
pub fn entropy(x: &SymbolSeries) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(clamp_bits(entropy_of_counts(counts(x), x.len() as u64)))
}

/// Entropy of the pair `(x_t, y_t)`.
pub fn joint_entropy(x: &SymbolSeries, y: &SymbolSeries) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(Error::EmptySeries);
    }
    let my = y.alphabet() as usize;
    let mut joint = vec![0u64; x.alphabet() as usize * my];
    for (&a, &b) in x.symbols().iter().zip(y.symbols()) {
        joint[a as usize * my + b as usize] += 1;
    }
    Ok(entropy_of_counts(joint, x.len() as u64))
}

/// `H(x) + H(y) - H(x, y)`, clamped at zero.
pub fn mutual_information(x: &SymbolSeries, y: &SymbolSeries) -> Result<f64> {
    let hxy = joint_entropy(x, y)?;
    let hx = entropy_of_counts(counts(x), x.len() as u64);
    let hy = entropy_of_counts(counts(y), y.len() as u64);
    Ok(clamp_bits(hx + hy - hxy))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(v: &[u32], m: u32) -> SymbolSeries {
        SymbolSeries::new(v.to_vec(), m).unwrap()
    }

    #[test]
    fn uniform_eight_symbols_is_three_bits() {
        let s = series(&(0..800).map(|i| i % 8).collect::<Vec<_>>(), 8);
        assert_eq!(entropy(&s).unwrap(), 3.0);
    }

    #[test]
    fn constant_is_zero() {
        assert_eq!(entropy(&series(&[2; 50], 4)).unwrap(), 0.0);
    }

    #[test]
    fn two_thirds_one_third() {
        // -(2/3) log2(2/3) - (1/3) log2(1/3)
        let expected = -(2.0f64 / 3.0) * (2.0f64 / 3.0).log2() - (1.0f64 / 3.0) * (1.0f64 / 3.0).log2();
        let h = entropy(&series(&[0, 0, 1], 2)).unwrap();
        assert!((h - 0.918296).abs() < 1e-6);
        assert!((h - expected).abs() < 1e-15);
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(entropy(&series(&[], 2)), Err(Error::EmptySeries)));
    }

    #[test]
    fn mi_self_and_relabeling() {
        let x = series(&[0, 1, 2, 2, 1, 0, 0, 0, 2, 1, 1], 3);
        let hx = entropy(&x).unwrap();
        assert!((mutual_information(&x, &x).unwrap() - hx).abs() < 1e-12);
        let y = x.relabel(&[2, 0, 1]).unwrap();
        assert!((mutual_information(&x, &y).unwrap() - hx).abs() < 1e-12);
    }

    #[test]
    fn mi_length_mismatch() {
        let x = series(&[0, 1, 0], 2);
        let y = series(&[0, 1], 2);
        assert!(matches!(mutual_information(&x, &y), Err(Error::LengthMismatch(3, 2))));
    }
}
