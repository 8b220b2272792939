use crate::error::{Error, Result};

/// Determinants as (alpha, beta) occupation bitmasks. Index of (i, j) is
/// i·nβ_strings + j, with both string lists in increasing integer order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterminantBasis {
    pub norb: usize,
    pub nelec: usize,
    pub nalpha: usize,
    pub nbeta: usize,
    pub alpha: Vec<u64>,
    pub beta: Vec<u64>,
    /// Restrict to the α↔β symmetric subspace (even total spin). Only
    /// meaningful when nα = nβ.
    pub singlet: bool,
}

/// All n-bit masks with k bits set, ascending.
pub fn strings(n: usize, k: usize) -> Vec<u64> {
    if k > n {
        return vec![];
    }
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut v: u64 = (1u64 << k) - 1;
    let limit = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    loop {
        out.push(v);
        // next permutation of bits (Gosper's hack)
        let t = v | (v - 1);
        let w = (t.wrapping_add(1)) | (((!t & t.wrapping_add(1)) - 1) >> (v.trailing_zeros() + 1));
        if w > limit || w <= v {
            break;
        }
        v = w;
    }
    out
}

/// Determinants with 2·Sz = nα − nβ.
pub fn enumerate_dets(norb: usize, nelec: usize, two_sz: i32) -> Result<DeterminantBasis> {
    if nelec == 0 || nelec > 2 * norb {
        return Err(Error::Fci(format!("{nelec} electrons do not fit in {norb} orbitals")));
    }
    if norb > 63 {
        return Err(Error::Fci("at most 63 orbitals".into()));
    }
    let s = nelec as i32 + two_sz;
    if s < 0 || s % 2 != 0 {
        return Err(Error::Fci(format!("no determinants with nelec={nelec}, 2Sz={two_sz}")));
    }
    let nalpha = (s / 2) as usize;
    if nalpha > nelec || nalpha > norb || nelec - nalpha > norb {
        return Err(Error::Fci(format!("no determinants with nelec={nelec}, 2Sz={two_sz}")));
    }
    let nbeta = nelec - nalpha;
    Ok(DeterminantBasis {
        norb,
        nelec,
        nalpha,
        nbeta,
        alpha: strings(norb, nalpha),
        beta: strings(norb, nbeta),
        singlet: false,
    })
}

impl DeterminantBasis {
    pub fn len(&self) -> usize {
        self.alpha.len() * self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn det(&self, i: usize) -> (u64, u64) {
        let nb = self.beta.len();
        (self.alpha[i / nb], self.beta[i % nb])
    }

    pub fn dets(&self) -> Vec<(u64, u64)> {
        (0..self.len()).map(|i| self.det(i)).collect()
    }

    pub fn two_sz(&self) -> i32 {
        self.nalpha as i32 - self.nbeta as i32
    }

    pub fn index(&self, a: u64, b: u64) -> Option<usize> {
        let i = self.alpha.binary_search(&a).ok()?;
        let j = self.beta.binary_search(&b).ok()?;
        Some(i * self.beta.len() + j)
    }

    /// Index of the α↔β swapped determinant (nα = nβ only).
    pub fn transpose_index(&self, i: usize) -> usize {
        let nb = self.beta.len();
        (i % nb) * nb + i / nb
    }

    pub fn symmetric_ok(&self) -> bool {
        self.nalpha == self.nbeta
    }
}

/// (−1)^(number of set bits strictly between p and q).
pub fn between_sign(s: u64, p: usize, q: usize) -> f64 {
    let (lo, hi) = if p < q { (p, q) } else { (q, p) };
    if hi - lo <= 1 {
        return 1.0;
    }
    let mask = ((1u64 << hi) - 1) & !((1u64 << (lo + 1)) - 1);
    if (s & mask).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Single replacements a†_p a_q on one string: (p, q, target, sign),
/// including p = q.
pub fn single_excitations(s: u64, norb: usize) -> Vec<(usize, usize, u64, f64)> {
    let mut out = Vec::new();
    for q in 0..norb {
        if s & (1 << q) == 0 {
            continue;
        }
        for p in 0..norb {
            if p == q {
                out.push((p, q, s, 1.0));
            } else if s & (1 << p) == 0 {
                let t = (s & !(1 << q)) | (1 << p);
                out.push((p, q, t, between_sign(s, p, q)));
            }
        }
    }
    out
}
