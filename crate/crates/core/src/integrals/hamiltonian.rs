//! Second-quantized Hamiltonian over spatial orbitals and its text dump.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::lattice::C64;

/// H = Σ h_pq a†_p a_q + ½ Σ h_pqrs a†_p a†_r a_s a_q + eshift, spin summed,
/// with h_pqrs the chemist-order integral (pq|rs).
#[derive(Clone, Debug, PartialEq)]
pub struct SqHamiltonian {
    pub norb: usize,
    pub nelec: usize,
    pub h1: Vec<C64>,
    pub h2: Vec<C64>,
    pub eshift: f64,
}

impl SqHamiltonian {
    pub fn zeros(norb: usize, nelec: usize) -> SqHamiltonian {
        SqHamiltonian {
            norb,
            nelec,
            h1: vec![C64::new(0.0, 0.0); norb * norb],
            h2: vec![C64::new(0.0, 0.0); norb.pow(4)],
            eshift: 0.0,
        }
    }

    #[inline]
    pub fn h1(&self, p: usize, q: usize) -> C64 {
        self.h1[p * self.norb + q]
    }

    #[inline]
    pub fn h2(&self, p: usize, q: usize, r: usize, s: usize) -> C64 {
        let n = self.norb;
        self.h2[((p * n + q) * n + r) * n + s]
    }

    pub fn set_h1(&mut self, p: usize, q: usize, v: C64) {
        let n = self.norb;
        self.h1[p * n + q] = v;
    }

    pub fn set_h2(&mut self, p: usize, q: usize, r: usize, s: usize, v: C64) {
        let n = self.norb;
        self.h2[((p * n + q) * n + r) * n + s] = v;
    }

    /// Largest imaginary part of any integral.
    pub fn max_imag(&self) -> f64 {
        self.h1
            .iter()
            .chain(self.h2.iter())
            .map(|v| v.im.abs())
            .fold(0.0, f64::max)
    }

    /// Keep only the first `n` orbitals.
    pub fn restrict(&self, n: usize) -> SqHamiltonian {
        assert!(n <= self.norb);
        let mut out = SqHamiltonian::zeros(n, self.nelec);
        out.eshift = self.eshift;
        for p in 0..n {
            for q in 0..n {
                out.set_h1(p, q, self.h1(p, q));
                for r in 0..n {
                    for s in 0..n {
                        out.set_h2(p, q, r, s, self.h2(p, q, r, s));
                    }
                }
            }
        }
        out
    }

    /// max deviation from h_pq = conj(h_qp), h_pqrs = h_rspq = conj(h_qpsr).
    pub fn symmetry_error(&self) -> (f64, f64) {
        let n = self.norb;
        let mut e1: f64 = 0.0;
        let mut e2: f64 = 0.0;
        for p in 0..n {
            for q in 0..n {
                e1 = e1.max((self.h1(p, q) - self.h1(q, p).conj()).norm());
                for r in 0..n {
                    for s in 0..n {
                        let v = self.h2(p, q, r, s);
                        e2 = e2.max((v - self.h2(r, s, p, q)).norm());
                        e2 = e2.max((v - self.h2(q, p, s, r).conj()).norm());
                    }
                }
            }
        }
        (e1, e2)
    }

    /// FCIDUMP-style text. Every nonzero entry is written (no symmetry
    /// folding) with shortest round-trip float formatting.
    pub fn to_fcidump(&self) -> String {
        let complex = self.max_imag() > 0.0;
        let mut s = String::new();
        let orbsym = vec!["1"; self.norb].join(",");
        let _ = writeln!(s, "&FCI NORB={},NELEC={},MS2=0,", self.norb, self.nelec);
        let _ = writeln!(s, " ORBSYM={orbsym},");
        let _ = writeln!(s, " ISYM=1,");
        if complex {
            let _ = writeln!(s, " COMPLEX=1,");
        }
        let _ = writeln!(s, "&END");
        let mut put = |v: C64, i: usize, j: usize, k: usize, l: usize| {
            if complex {
                let _ = writeln!(s, "{:e} {:e} {i} {j} {k} {l}", v.re, v.im);
            } else {
                let _ = writeln!(s, "{:e} {i} {j} {k} {l}", v.re);
            }
        };
        let n = self.norb;
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for t in 0..n {
                        let v = self.h2(p, q, r, t);
                        if v != C64::new(0.0, 0.0) {
                            put(v, p + 1, q + 1, r + 1, t + 1);
                        }
                    }
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                let v = self.h1(p, q);
                if v != C64::new(0.0, 0.0) {
                    put(v, p + 1, q + 1, 0, 0);
                }
            }
        }
        put(C64::new(self.eshift, 0.0), 0, 0, 0, 0);
        s
    }

    pub fn write_fcidump(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_fcidump())?;
        Ok(())
    }

    pub fn read_fcidump(path: &Path) -> Result<SqHamiltonian> {
        let text = crate::error::read_text(path)?;
        Self::parse_fcidump(&text, &path.display().to_string())
    }

    pub fn parse_fcidump(text: &str, name: &str) -> Result<SqHamiltonian> {
        let mut lines = text.lines().enumerate();
        let mut header = String::new();
        for (_, line) in lines.by_ref() {
            let t = line.trim();
            if t.eq_ignore_ascii_case("&END") || t == "/" {
                break;
            }
            header.push_str(t);
            header.push(',');
        }
        let field = |key: &str| -> Option<usize> {
            let up = header.to_ascii_uppercase();
            let pos = up.find(&format!("{key}="))?;
            let rest = &up[pos + key.len() + 1..];
            let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
            rest[..end].parse().ok()
        };
        let norb = field("NORB").ok_or_else(|| Error::parse(name, 1, "NORB missing"))?;
        let nelec = field("NELEC").ok_or_else(|| Error::parse(name, 1, "NELEC missing"))?;
        let complex = field("COMPLEX").unwrap_or(0) == 1;
        let mut ham = SqHamiltonian::zeros(norb, nelec);
        for (i, line) in lines {
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let tok: Vec<&str> = t.split_whitespace().collect();
            let nval = if complex { 2 } else { 1 };
            if tok.len() != nval + 4 {
                return Err(Error::parse(name, i + 1, "malformed integral record"));
            }
            let f = |s: &str| s.parse::<f64>().map_err(|_| Error::parse(name, i + 1, format!("bad value {s}")));
            let re = f(tok[0])?;
            let im = if complex { f(tok[1])? } else { 0.0 };
            let mut idx = [0usize; 4];
            for k in 0..4 {
                idx[k] = tok[nval + k]
                    .parse()
                    .map_err(|_| Error::parse(name, i + 1, "bad index"))?;
                if idx[k] > norb {
                    return Err(Error::parse(name, i + 1, "index exceeds NORB"));
                }
            }
            let v = C64::new(re, im);
            match idx {
                [0, 0, 0, 0] => ham.eshift = re,
                [p, q, 0, 0] if p > 0 && q > 0 => ham.set_h1(p - 1, q - 1, v),
                [p, q, r, s] if p > 0 && q > 0 && r > 0 && s > 0 => ham.set_h2(p - 1, q - 1, r - 1, s - 1, v),
                _ => return Err(Error::parse(name, i + 1, "invalid index pattern")),
            }
        }
        Ok(ham)
    }
}
