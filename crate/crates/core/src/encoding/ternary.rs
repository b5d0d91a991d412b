use std::fmt;
use std::str::FromStr;

use super::EncodingError;

/// One position of a ternary bit vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tern {
    Zero,
    One,
    X,
}

impl Tern {
    pub fn from_bool(b: bool) -> Tern {
        if b {
            Tern::One
        } else {
            Tern::Zero
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Tern::Zero => Some(false),
            Tern::One => Some(true),
            Tern::X => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Tern::Zero => '0',
            Tern::One => '1',
            Tern::X => 'X',
        }
    }
}

/// Fixed-length vector over `{0, 1, X}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TernaryBitVector {
    bits: Vec<Tern>,
}

impl TernaryBitVector {
    pub fn all_x(len: usize) -> Self {
        TernaryBitVector {
            bits: vec![Tern::X; len],
        }
    }

    pub fn from_bits(bits: Vec<Tern>) -> Self {
        TernaryBitVector { bits }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        TernaryBitVector {
            bits: bits.iter().map(|b| Tern::from_bool(*b)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> Tern {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, t: Tern) {
        self.bits[i] = t;
    }

    pub fn bits(&self) -> &[Tern] {
        &self.bits
    }

    pub fn x_count(&self) -> usize {
        self.bits.iter().filter(|b| **b == Tern::X).count()
    }

    /// Replaces `X` by `0` at the given positions.
    pub fn zero_x_at(&mut self, positions: impl IntoIterator<Item = usize>) {
        for p in positions {
            if self.bits[p] == Tern::X {
                self.bits[p] = Tern::Zero;
            }
        }
    }

    /// Replaces every `X` by `0`.
    pub fn zero_all_x(&self) -> Self {
        let mut v = self.clone();
        v.zero_x_at(0..self.len());
        v
    }

    fn check_len(&self, other: &Self) -> Result<(), EncodingError> {
        if self.len() == other.len() {
            Ok(())
        } else {
            Err(EncodingError::LengthMismatch {
                left: self.len(),
                right: other.len(),
            })
        }
    }

    /// Position-wise combination: `X` yields the other bit, equal bits stay.
    /// Fails at the first position holding both `0` and `1`.
    pub fn combine(&self, other: &Self) -> Result<Self, EncodingError> {
        self.check_len(other)?;
        let mut bits = Vec::with_capacity(self.len());
        for (i, (a, b)) in self.bits.iter().zip(&other.bits).enumerate() {
            bits.push(match (a, b) {
                (Tern::X, t) | (t, Tern::X) => *t,
                (a, b) if a == b => *a,
                _ => return Err(EncodingError::Conflict { position: i + 1 }),
            });
        }
        Ok(TernaryBitVector { bits })
    }

    pub fn conflicting(&self, other: &Self) -> Result<bool, EncodingError> {
        self.check_len(other)?;
        Ok(self.bits.iter().zip(&other.bits).any(|(a, b)| {
            matches!((a, b), (Tern::Zero, Tern::One) | (Tern::One, Tern::Zero))
        }))
    }

    /// Renders the vector with a dot between consecutive segments.
    pub fn segmented(&self, segments: &[usize]) -> String {
        let mut out = String::new();
        let mut i = 0;
        for (k, &w) in segments.iter().enumerate() {
            if k > 0 {
                out.push('.');
            }
            for b in &self.bits[i..(i + w).min(self.len())] {
                out.push(b.symbol());
            }
            i += w;
        }
        for b in self.bits.iter().skip(i) {
            out.push(b.symbol());
        }
        out
    }
}

impl fmt::Display for TernaryBitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{}", b.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for TernaryBitVector {
    type Err = EncodingError;

    /// Accepts `0`, `1`, `X`/`x`; dots are separators and ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .filter(|c| *c != '.')
            .map(|c| match c {
                '0' => Ok(Tern::Zero),
                '1' => Ok(Tern::One),
                'X' | 'x' => Ok(Tern::X),
                other => Err(EncodingError::Syntax(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(TernaryBitVector::from_bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> TernaryBitVector {
        s.parse().unwrap()
    }

    #[test]
    fn combination_of_running_example() {
        let got = ["0.xxx.xx", "0.10x.xx", "0.xx1.xx", "0.xx1.x1"]
            .iter()
            .map(|s| v(s))
            .try_fold(v("xxxxxx"), |acc, b| acc.combine(&b))
            .unwrap();
        assert_eq!(got, v("0.101.X1"));
        assert_eq!(got.segmented(&[1, 3, 2]), "0.101.X1");
    }

    #[test]
    fn identity_and_conflict() {
        assert_eq!(v("01X").combine(&v("XXX")).unwrap(), v("01X"));
        assert_eq!(
            v("01").combine(&v("00")),
            Err(EncodingError::Conflict { position: 2 })
        );
        assert!(v("0X").conflicting(&v("1X")).unwrap());
        assert!(!v("0X").conflicting(&v("X1")).unwrap());
        assert!(matches!(
            v("0").conflicting(&v("00")),
            Err(EncodingError::LengthMismatch { .. })
        ));
    }
}
