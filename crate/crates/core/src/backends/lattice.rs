use rand::{Rng, RngCore};

use crate::error::{invalid, CoverError, Result};
use crate::oracle::{BackendKind, Element, SetBackend};

/// Injective encoding of `d`-dimensional lattice points into [`Element`].
///
/// Coordinate `j` is stored as `x_j - offset_j` in its own field of
/// `floor(64 / d)` bits, coordinate 0 in the lowest bits. All rectangles of
/// one instance must share a packing so their membership queries agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePacking {
    offsets: Vec<i64>,
    bits: u32,
}

impl LatticePacking {
    pub fn new(offsets: Vec<i64>) -> Result<Self> {
        let dim = offsets.len();
        if dim == 0 || dim > 64 {
            return Err(invalid("dim", format!("{dim} is outside 1..=64")));
        }
        Ok(LatticePacking {
            bits: 64 / dim as u32,
            offsets,
        })
    }

    /// The packing with per-coordinate offsets at the minimum `lo` over all
    /// `boxes`, checked to fit every box.
    pub fn covering<'a>(boxes: impl IntoIterator<Item = (&'a [i64], &'a [i64])>) -> Result<Self> {
        let boxes: Vec<_> = boxes.into_iter().collect();
        let Some(first) = boxes.first() else {
            return Err(invalid("rectangles", "no rectangles to pack"));
        };
        let dim = first.0.len();
        let mut offsets = vec![i64::MAX; dim];
        for (lo, hi) in &boxes {
            if lo.len() != dim || hi.len() != dim {
                return Err(invalid("dim", "rectangles of mixed dimension"));
            }
            for (o, &l) in offsets.iter_mut().zip(lo.iter()) {
                *o = (*o).min(l);
            }
        }
        let packing = LatticePacking::new(offsets)?;
        for (lo, hi) in &boxes {
            packing.check_fits(lo, hi)?;
        }
        Ok(packing)
    }

    pub fn dim(&self) -> usize {
        self.offsets.len()
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    fn field_max(&self) -> u64 {
        if self.bits == 64 {
            u64::MAX
        } else {
            (1u64 << self.bits) - 1
        }
    }

    fn check_fits(&self, lo: &[i64], hi: &[i64]) -> Result<()> {
        for j in 0..self.dim() {
            let a = lo[j] as i128 - self.offsets[j] as i128;
            let b = hi[j] as i128 - self.offsets[j] as i128;
            if a < 0 || b > self.field_max() as i128 {
                return Err(CoverError::Overflow(format!(
                    "coordinate {j} range [{}, {}] does not fit {} bits above offset {}",
                    lo[j], hi[j], self.bits, self.offsets[j]
                )));
            }
        }
        Ok(())
    }

    pub fn pack(&self, point: &[i64]) -> Result<Element> {
        if point.len() != self.dim() {
            return Err(invalid("point", "dimension mismatch"));
        }
        let mut x = 0u64;
        for (j, &c) in point.iter().enumerate() {
            let v = c as i128 - self.offsets[j] as i128;
            if v < 0 || v > self.field_max() as i128 {
                return Err(CoverError::Overflow(format!("coordinate {j} = {c} is out of range")));
            }
            x |= (v as u64) << (self.bits as usize * j) as u32;
        }
        Ok(Element(x))
    }

    /// Inverse of [`pack`](Self::pack); `None` for codes outside the image.
    pub fn unpack(&self, x: Element) -> Option<Vec<i64>> {
        let used = self.bits as usize * self.dim();
        if used < 64 && x.0 >> used != 0 {
            return None;
        }
        let mask = self.field_max();
        let mut out = Vec::with_capacity(self.dim());
        for j in 0..self.dim() {
            let v = if self.bits == 64 {
                x.0
            } else {
                (x.0 >> (self.bits as usize * j)) & mask
            };
            out.push((self.offsets[j] as i128 + v as i128).try_into().ok()?);
        }
        Some(out)
    }
}

/// The lattice points of an axis-aligned integer box `[lo_1, hi_1] x ... x
/// [lo_d, hi_d]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeRectangle {
    lo: Vec<i64>,
    hi: Vec<i64>,
    packing: LatticePacking,
    cardinality: u64,
}

impl LatticeRectangle {
    /// A rectangle packed relative to its own lower corner.
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        let packing = LatticePacking::new(lo.clone())?;
        LatticeRectangle::with_packing(lo, hi, packing)
    }

    pub fn with_packing(lo: Vec<i64>, hi: Vec<i64>, packing: LatticePacking) -> Result<Self> {
        if lo.len() != hi.len() || lo.len() != packing.dim() {
            return Err(invalid("dim", "lo, hi and packing disagree on dimension"));
        }
        if let Some(j) = (0..lo.len()).find(|&j| lo[j] > hi[j]) {
            return Err(invalid(
                "lo",
                format!("lo[{j}] = {} exceeds hi[{j}] = {}", lo[j], hi[j]),
            ));
        }
        let cardinality = rect_cardinality(&lo, &hi)?;
        packing.check_fits(&lo, &hi)?;
        Ok(LatticeRectangle {
            lo,
            hi,
            packing,
            cardinality,
        })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn packing(&self) -> &LatticePacking {
        &self.packing
    }

    pub fn contains_point(&self, point: &[i64]) -> bool {
        point.len() == self.dim()
            && point
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(c, (l, h))| l <= c && c <= h)
    }

    /// One independent uniform draw per coordinate.
    pub fn random_point(&self, rng: &mut dyn RngCore) -> Vec<i64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| rng.gen_range(l..=h))
            .collect()
    }
}

/// Number of lattice points in `[lo, hi]`, with overflow reported as an
/// error.
pub fn rect_cardinality(lo: &[i64], hi: &[i64]) -> Result<u64> {
    let mut total: u64 = 1;
    for (l, h) in lo.iter().zip(hi) {
        let side = *h as i128 - *l as i128 + 1;
        if side <= 0 {
            return Ok(0);
        }
        let side = u64::try_from(side).map_err(|_| CoverError::Overflow(format!("side length {side} exceeds u64")))?;
        total = total
            .checked_mul(side)
            .ok_or_else(|| CoverError::Overflow("lattice point count exceeds u64".into()))?;
    }
    Ok(total)
}

impl SetBackend for LatticeRectangle {
    fn cardinality(&self) -> u64 {
        self.cardinality
    }

    fn random_element(&self, rng: &mut dyn RngCore) -> Result<Element> {
        let p = self.random_point(rng);
        self.packing.pack(&p)
    }

    fn contains(&self, x: Element) -> bool {
        self.packing.unpack(x).is_some_and(|p| self.contains_point(&p))
    }

    /// Mixed-radix decoding with coordinate 0 varying fastest.
    fn element_at(&self, mut index: u64) -> Option<Element> {
        if index >= self.cardinality {
            return None;
        }
        let mut point = Vec::with_capacity(self.dim());
        for (&l, &h) in self.lo.iter().zip(&self.hi) {
            let side = (h as i128 - l as i128 + 1) as u128;
            let r = (index as u128 % side) as i128;
            index = (index as u128 / side) as u64;
            point.push((l as i128 + r) as i64);
        }
        self.packing.pack(&point).ok()
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Rectangle
    }
}
