use super::{Field, FieldElem, UniPoly};
use crate::error::{Error, Result};

/// A field embedding `F_{p^k} -> F_{p^K}` (`k | K`), sending the generator of
/// the small field to the smallest root of its modulus in the big field.
#[derive(Clone, Debug)]
pub struct Embedding {
    small: Field,
    big: Field,
    /// Images of `1, g, .., g^(k-1)`.
    basis: Vec<FieldElem>,
    /// Rows of the big coefficient vector that determine a preimage, and the
    /// inverse of the corresponding k x k block (row-major, over F_p).
    pivot_rows: Vec<usize>,
    block_inv: Vec<u64>,
}

impl Embedding {
    pub fn new(small: &Field, big: &Field) -> Result<Embedding> {
        if small.p() != big.p() || big.k() % small.k() != 0 {
            return Err(Error::InvalidField(format!(
                "no embedding of F_{}^{} into F_{}^{}",
                small.p(),
                small.k(),
                big.p(),
                big.k()
            )));
        }
        let k = small.k() as usize;
        let p = small.p();
        let gen = if k == 1 {
            FieldElem::ZERO
        } else {
            let m = UniPoly::from_coeffs(small.modulus().iter().map(|&c| FieldElem(c)).collect());
            m.roots(big)?.first().map(|r| r.0).ok_or_else(|| {
                Error::InvalidField("modulus has no root in the extension".into())
            })?
        };
        let mut basis = Vec::with_capacity(k);
        let mut cur = FieldElem::ONE;
        for _ in 0..k {
            basis.push(cur);
            cur = big.mul(cur, gen);
        }
        // Columns of the K x k matrix are the big coefficient vectors of the basis.
        let cols: Vec<Vec<u64>> = basis.iter().map(|&b| big.coeffs(b)).collect();
        let kk = big.k() as usize;
        // Greedily pick k independent rows.
        let mut pivot_rows = Vec::with_capacity(k);
        let mut echelon: Vec<Vec<u64>> = Vec::new();
        for r in 0..kk {
            let mut row: Vec<u64> = (0..k).map(|c| cols[c][r]).collect();
            for e in &echelon {
                let lead = e.iter().position(|&x| x != 0).unwrap();
                if row[lead] != 0 {
                    let t = row[lead];
                    for (x, &y) in row.iter_mut().zip(e) {
                        *x = (*x + p * p - t * y % p) % p;
                    }
                }
            }
            if let Some(lead) = row.iter().position(|&x| x != 0) {
                let inv = small.prime_field().inv(FieldElem(row[lead])).unwrap().0;
                for x in row.iter_mut() {
                    *x = *x * inv % p;
                }
                echelon.push(row);
                pivot_rows.push(r);
                if pivot_rows.len() == k {
                    break;
                }
            }
        }
        assert_eq!(pivot_rows.len(), k, "basis images are independent");
        let block: Vec<Vec<u64>> =
            pivot_rows.iter().map(|&r| (0..k).map(|c| cols[c][r]).collect()).collect();
        let block_inv = invert_mod_p(&block, p);
        Ok(Embedding { small: small.clone(), big: big.clone(), basis, pivot_rows, block_inv })
    }

    pub fn small(&self) -> &Field {
        &self.small
    }

    pub fn big(&self) -> &Field {
        &self.big
    }

    pub fn map(&self, x: FieldElem) -> FieldElem {
        if self.small.k() == 1 {
            return x;
        }
        let c = self.small.coeffs(x);
        let mut acc = FieldElem::ZERO;
        for (i, &ci) in c.iter().enumerate() {
            if ci != 0 {
                acc = self.big.add(acc, self.big.mul_int(self.basis[i], ci as i64));
            }
        }
        acc
    }

    pub fn map_poly(&self, f: &UniPoly) -> UniPoly {
        f.map_coeffs(|c| self.map(c))
    }

    /// The preimage of `y`, if `y` lies in the image.
    pub fn preimage(&self, y: FieldElem) -> Option<FieldElem> {
        let k = self.small.k() as usize;
        let p = self.small.p();
        let yc = self.big.coeffs(y);
        let rhs: Vec<u64> = self.pivot_rows.iter().map(|&r| yc[r]).collect();
        let mut v = 0u64;
        let mut x = vec![0u64; k];
        for i in 0..k {
            x[i] = (0..k).map(|j| self.block_inv[i * k + j] * rhs[j] % p).sum::<u64>() % p;
        }
        for &xi in x.iter().rev() {
            v = v * p + xi;
        }
        let cand = FieldElem(v);
        (self.map(cand) == y).then_some(cand)
    }
}

fn invert_mod_p(m: &[Vec<u64>], p: u64) -> Vec<u64> {
    let n = m.len();
    let fp = Field::new(p, 1).expect("prime");
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| u64::from(i == j)));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != 0).expect("invertible");
        a.swap(col, piv);
        let inv = fp.inv(FieldElem(a[col][col])).unwrap().0;
        for x in a[col].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let t = a[r][col];
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row) {
                    *x = (*x + p - t * y % p) % p;
                }
            }
        }
    }
    a.into_iter().flat_map(|r| r.into_iter().skip(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_is_a_ring_map() {
        for (p, k, kk) in [(5, 1, 3), (5, 2, 4), (7, 2, 6), (5, 3, 6)] {
            let small = Field::new(p, k).unwrap();
            let big = Field::new(p, kk).unwrap();
            let e = Embedding::new(&small, &big).unwrap();
            for a in small.elements().step_by(3) {
                for b in small.elements().step_by(5) {
                    assert_eq!(e.map(small.mul(a, b)), big.mul(e.map(a), e.map(b)));
                    assert_eq!(e.map(small.add(a, b)), big.add(e.map(a), e.map(b)));
                }
                assert_eq!(e.preimage(e.map(a)), Some(a));
            }
            let image: usize = big.elements().filter(|&y| e.preimage(y).is_some()).count();
            assert_eq!(image as u64, small.q());
        }
    }

    #[test]
    fn rejects_incompatible_degrees() {
        let a = Field::new(5, 2).unwrap();
        let b = Field::new(5, 3).unwrap();
        assert!(Embedding::new(&a, &b).is_err());
        assert!(Embedding::new(&a, &Field::new(7, 2).unwrap()).is_err());
    }
}
