//! Binary primitive BCH codes: GF(2^m) table arithmetic, generator-polynomial
//! construction from cyclotomic cosets, and bounded-distance syndrome decoding
//! (syndromes, Berlekamp-Massey, Chien search).
//!
//! The bounded-distance decoder doubles as the inner decoder for Chase-2.

use crate::gf2::{BitMatrix, BitVec};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BchError {
    #[error("unsupported extension degree m={0} (supported: 3..=16)")]
    UnsupportedDegree(usize),
    #[error("designed capability t={t} leaves no information bits for m={m}")]
    CapabilityTooLarge { m: usize, t: usize },
}

/// Primitive polynomials, one per degree m = 3..=16, as bit masks
/// (bit i = coefficient of x^i). Fixed so that code constructions are
/// reproducible: degree 7 is x^7+x^3+1, degree 9 is x^9+x^4+1.
const PRIMITIVE_POLYS: [(usize, u32); 14] = [
    (3, 0b1011),
    (4, 0b1_0011),
    (5, 0b10_0101),
    (6, 0b100_0011),
    (7, 0b1000_1001),
    (8, 0b1_0001_1101),
    (9, 0b10_0001_0001),
    (10, 0b100_0000_1001),
    (11, 0b1000_0000_0101),
    (12, 0b1_0000_0101_0011),
    (13, 0b10_0000_0001_1011),
    (14, 0b100_0100_0100_0011),
    (15, 0b1000_0000_0000_0011),
    (16, 0b1_0001_0000_0000_1011),
];

/// GF(2^m) arithmetic via log/antilog tables generated from a primitive
/// polynomial. Elements are represented as polynomial bit masks in `u32`.
#[derive(Debug, Clone)]
pub struct FieldGF2m {
    pub m: usize,
    pub primitive_poly: u32,
    /// order of the multiplicative group, 2^m - 1
    pub order: usize,
    log: Vec<u32>,
    antilog: Vec<u32>,
}

impl FieldGF2m {
    pub fn new(m: usize) -> Result<Self, BchError> {
        let &(_, poly) = PRIMITIVE_POLYS
            .iter()
            .find(|&&(deg, _)| deg == m)
            .ok_or(BchError::UnsupportedDegree(m))?;
        let order = (1usize << m) - 1;
        let mut log = vec![0u32; 1 << m];
        let mut antilog = vec![0u32; order];
        let mut x = 1u32;
        for i in 0..order {
            antilog[i] = x;
            log[x as usize] = i as u32;
            x <<= 1;
            if x >> m != 0 {
                x ^= poly;
            }
        }
        debug_assert_eq!(x, 1, "polynomial is not primitive");
        Ok(Self {
            m,
            primitive_poly: poly,
            order,
            log,
            antilog,
        })
    }

    /// α^e for any integer exponent (reduced mod 2^m - 1).
    #[inline]
    pub fn alpha_pow(&self, e: i64) -> u32 {
        let e = e.rem_euclid(self.order as i64) as usize;
        self.antilog[e]
    }

    #[inline]
    pub fn log(&self, x: u32) -> u32 {
        debug_assert_ne!(x, 0);
        self.log[x as usize]
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            0
        } else {
            let s = self.log[a as usize] as usize + self.log[b as usize] as usize;
            self.antilog[s % self.order]
        }
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        debug_assert_ne!(a, 0);
        let l = self.log[a as usize] as usize;
        self.antilog[(self.order - l) % self.order]
    }
}

/// A primitive binary BCH code of length n = 2^m - 1.
#[derive(Debug, Clone)]
pub struct BchSpec {
    pub m: usize,
    pub t: usize,
    pub n: usize,
    pub k: usize,
    /// Generator polynomial coefficients, low degree first; length deg(g)+1.
    pub generator_poly: Vec<u8>,
    pub field: FieldGF2m,
}

/// lcm of the minimal polynomials of α, α², ..., α^{2t}.
pub fn build_bch(m: usize, t: usize) -> Result<BchSpec, BchError> {
    let field = FieldGF2m::new(m)?;
    let n = field.order;

    // cyclotomic cosets covering exponents 1..=2t
    let mut covered = vec![false; n];
    let mut g = vec![1u8]; // polynomial "1"
    for s in 1..=2 * t {
        let s = s % n;
        if s == 0 || covered[s] {
            continue;
        }
        // coset {s, 2s, 4s, ...} mod n
        let mut coset = Vec::new();
        let mut e = s;
        loop {
            covered[e] = true;
            coset.push(e);
            e = (e * 2) % n;
            if e == s {
                break;
            }
        }
        // minimal polynomial: prod (x + α^e) over the coset, computed in GF(2^m)
        let mut min_poly: Vec<u32> = vec![1];
        for &e in &coset {
            let root = field.alpha_pow(e as i64);
            let mut next = vec![0u32; min_poly.len() + 1];
            for (i, &c) in min_poly.iter().enumerate() {
                next[i + 1] ^= c;
                next[i] ^= field.mul(c, root);
            }
            min_poly = next;
        }
        let min_poly_gf2: Vec<u8> = min_poly
            .iter()
            .map(|&c| {
                debug_assert!(c <= 1, "minimal polynomial coefficient outside GF(2)");
                c as u8
            })
            .collect();
        g = poly_mul_gf2(&g, &min_poly_gf2);
    }

    let deg_g = g.len() - 1;
    if deg_g >= n {
        return Err(BchError::CapabilityTooLarge { m, t });
    }
    Ok(BchSpec {
        m,
        t,
        n,
        k: n - deg_g,
        generator_poly: g,
        field,
    })
}

fn poly_mul_gf2(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x != 0 {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] ^= y;
            }
        }
    }
    out
}

impl BchSpec {
    /// Cyclic (non-systematic) generator matrix: row i = x^i * g(x).
    pub fn generator_matrix(&self) -> BitMatrix {
        let mut g = BitMatrix::zeros(self.k, self.n);
        for r in 0..self.k {
            for (j, &c) in self.generator_poly.iter().enumerate() {
                if c != 0 {
                    g.set(r, r + j, true);
                }
            }
        }
        g
    }

    /// Syndromes S_1..S_2t of a received word.
    fn syndromes(&self, word: &BitVec) -> Vec<u32> {
        let f = &self.field;
        (1..=2 * self.t as i64)
            .map(|j| {
                let mut s = 0u32;
                for i in word.iter_ones() {
                    s ^= f.alpha_pow(j * i as i64);
                }
                s
            })
            .collect()
    }

    /// Bounded-distance decoding: returns the codeword within Hamming
    /// distance t of `word` if one exists, `None` otherwise.
    pub fn syndrome_decode(&self, word: &BitVec) -> Option<BitVec> {
        assert_eq!(word.len(), self.n);
        let f = &self.field;
        let synd = self.syndromes(word);
        if synd.iter().all(|&s| s == 0) {
            return Some(word.clone());
        }

        // Berlekamp-Massey for the error locator sigma(x)
        let mut sigma: Vec<u32> = vec![1];
        let mut b: Vec<u32> = vec![1];
        let mut l: usize = 0;
        let mut mm: usize = 1;
        let mut bb: u32 = 1;
        for r in 0..2 * self.t {
            let mut d = synd[r];
            for i in 1..=l.min(sigma.len() - 1) {
                d ^= f.mul(sigma[i], synd[r - i]);
            }
            if d == 0 {
                mm += 1;
            } else if 2 * l <= r {
                let temp = sigma.clone();
                let coef = f.mul(d, f.inv(bb));
                sigma = poly_add_shifted(&sigma, &b, coef, mm, f);
                l = r + 1 - l;
                b = temp;
                bb = d;
                mm = 1;
            } else {
                let coef = f.mul(d, f.inv(bb));
                sigma = poly_add_shifted(&sigma, &b, coef, mm, f);
                mm += 1;
            }
        }
        while sigma.last() == Some(&0) {
            sigma.pop();
        }
        let deg = sigma.len() - 1;
        if deg == 0 || deg > self.t {
            return None;
        }

        // Chien search: position i is in error iff sigma(α^{-i}) = 0
        let mut corrected = word.clone();
        let mut roots = 0usize;
        for i in 0..self.n {
            let x = f.alpha_pow(-(i as i64));
            let mut acc = 0u32;
            let mut xp = 1u32;
            for &c in &sigma {
                acc ^= f.mul(c, xp);
                xp = f.mul(xp, x);
            }
            if acc == 0 {
                corrected.flip(i);
                roots += 1;
            }
        }
        if roots != deg {
            return None;
        }
        // accept only genuine codewords
        if self.syndromes(&corrected).iter().any(|&s| s != 0) {
            return None;
        }
        Some(corrected)
    }
}

/// sigma(x) + coef * x^shift * b(x)
fn poly_add_shifted(sigma: &[u32], b: &[u32], coef: u32, shift: usize, f: &FieldGF2m) -> Vec<u32> {
    let mut out = sigma.to_vec();
    if out.len() < b.len() + shift {
        out.resize(b.len() + shift, 0);
    }
    for (i, &c) in b.iter().enumerate() {
        out[i + shift] ^= f.mul(coef, c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn field_tables_consistent() {
        for m in [3, 4, 7, 9] {
            let f = FieldGF2m::new(m).unwrap();
            for x in 1..=f.order as u32 {
                assert_eq!(f.antilog[f.log[x as usize] as usize], x);
            }
            assert_eq!(f.alpha_pow(f.order as i64), 1);
        }
    }

    #[test]
    fn bch_dimensions_match_known_codes() {
        let c = build_bch(7, 2).unwrap();
        assert_eq!((c.n, c.k), (127, 113));
        assert_eq!(c.generator_poly.len() - 1, 14);

        let c = build_bch(9, 2).unwrap();
        assert_eq!((c.n, c.k), (511, 493));
        assert_eq!(c.generator_poly.len() - 1, 18);

        let c = build_bch(4, 1).unwrap();
        assert_eq!((c.n, c.k), (15, 11));

        let c = build_bch(4, 2).unwrap();
        assert_eq!((c.n, c.k), (15, 7));
    }

    #[test]
    fn unsupported_degree_rejected() {
        assert_eq!(build_bch(2, 1).unwrap_err(), BchError::UnsupportedDegree(2));
        assert_eq!(build_bch(17, 1).unwrap_err(), BchError::UnsupportedDegree(17));
    }

    fn random_codeword(spec: &BchSpec, rng: &mut StdRng) -> BitVec {
        let msg: Vec<u8> = (0..spec.k).map(|_| rng.gen_range(0..2u8)).collect();
        spec.generator_matrix()
            .mat_vec_encode(&BitVec::from_bits(&msg))
            .unwrap()
    }

    #[test]
    fn codeword_passes_through() {
        let spec = build_bch(4, 2).unwrap();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let c = random_codeword(&spec, &mut rng);
            assert_eq!(spec.syndrome_decode(&c).unwrap(), c);
        }
    }

    #[test]
    fn single_and_double_flips_recovered() {
        let spec = build_bch(7, 2).unwrap();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..1000 {
            let c = random_codeword(&spec, &mut rng);
            let mut r = c.clone();
            let i = rng.gen_range(0..spec.n);
            r.flip(i);
            assert_eq!(spec.syndrome_decode(&r).unwrap(), c, "1 flip at {i}");
            let mut j = rng.gen_range(0..spec.n);
            while j == i {
                j = rng.gen_range(0..spec.n);
            }
            r.flip(j);
            assert_eq!(spec.syndrome_decode(&r).unwrap(), c, "2 flips at {i},{j}");
        }
    }

    #[test]
    fn beyond_radius_never_yields_non_codeword() {
        // (15,7) t=2: exhaustive over weight-3 error patterns on a fixed codeword
        let spec = build_bch(4, 2).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        let c = random_codeword(&spec, &mut rng);
        for a in 0..15 {
            for b in a + 1..15 {
                for d in b + 1..15 {
                    let mut r = c.clone();
                    r.flip(a);
                    r.flip(b);
                    r.flip(d);
                    if let Some(out) = spec.syndrome_decode(&r) {
                        // output is a codeword within distance t of the input
                        assert!(spec.syndromes(&out).iter().all(|&s| s == 0));
                        let mut diff = out.clone();
                        diff.xor_assign(&r);
                        assert!(diff.count_ones() <= spec.t);
                    }
                }
            }
        }
    }

    #[test]
    fn generator_poly_divides_xn_plus_1() {
        for (m, t) in [(4, 2), (7, 2), (9, 2)] {
            let spec = build_bch(m, t).unwrap();
            // x^n + 1 mod g == 0
            let mut xn1 = vec![0u8; spec.n + 1];
            xn1[0] = 1;
            xn1[spec.n] = 1;
            let g = &spec.generator_poly;
            let mut rem = xn1;
            for i in (0..=rem.len() - g.len()).rev() {
                if rem[i + g.len() - 1] != 0 {
                    for (j, &c) in g.iter().enumerate() {
                        rem[i + j] ^= c;
                    }
                }
            }
            assert!(rem.iter().all(|&c| c == 0));
        }
    }
}
