//! Linear code abstraction: generator/parity matrices, the reliability
//! independent reduced echelon form with its pivot and parity location sets,
//! and parity-check derivation for staged generator forms.

use crate::bch::BchSpec;
use crate::gf2::{rref_full, BitMatrix, BitVec, Gf2Error};
use crate::staged::StagedForm;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("generator matrix is rank deficient (rank {rank} < k = {k})")]
    RankDeficient { rank: usize, k: usize },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// An (n, k) binary linear block code with verified-consistent G and H.
#[derive(Debug, Clone)]
pub struct LinearCode {
    pub n: usize,
    pub k: usize,
    pub g: BitMatrix,
    pub h: BitMatrix,
}

/// Reduced echelon form of G with its pivot locations.
#[derive(Debug, Clone)]
pub struct RefForm {
    /// k x n reduced echelon matrix in the original column order.
    pub g_ref: BitMatrix,
    /// Location set of the k identity (pivot) columns, one per row in row order.
    pub b_k: Vec<usize>,
    /// Location set of the n-k parity columns, ascending.
    pub p_nk: Vec<usize>,
}

impl LinearCode {
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Build from an explicit generator matrix; verifies rank and derives H
    /// from a systematic form of G.
    pub fn from_generator(g: BitMatrix) -> Result<Self, CodeError> {
        let k = g.rows();
        let n = g.cols();
        let (sys, perm, _) = rref_full(&g).map_err(|e| match e {
            Gf2Error::RankDeficient { rank, .. } => CodeError::RankDeficient { rank, k },
            other => CodeError::Gf2(other),
        })?;
        // sys = [I | P] in permuted column order; H = [P^T | I] mapped back
        let mut h = BitMatrix::zeros(n - k, n);
        for r in 0..n - k {
            h.set(r, perm.forward(k + r), true);
            for c in 0..k {
                if sys.get(c, k + r) {
                    h.set(r, perm.forward(c), true);
                }
            }
        }
        Ok(Self { n, k, g, h })
    }

    pub fn from_bch(spec: &BchSpec) -> Result<Self, CodeError> {
        Self::from_generator(spec.generator_matrix())
    }

    /// Generator-matrix file: line 1 = `N K`, then K lines of N `0`/`1` chars.
    pub fn from_file(path: &Path) -> Result<Self, CodeError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<Self, CodeError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| CodeError::Parse {
            line: 1,
            msg: "empty file".into(),
        })?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CodeError::Parse {
                line: 1,
                msg: "expected `N K` header".into(),
            })?;
        let k: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CodeError::Parse {
                line: 1,
                msg: "expected `N K` header".into(),
            })?;
        if it.next().is_some() {
            return Err(CodeError::Parse {
                line: 1,
                msg: "trailing tokens after `N K`".into(),
            });
        }
        let mut g = BitMatrix::zeros(k, n);
        for r in 0..k {
            let line = lines.next().ok_or_else(|| CodeError::Parse {
                line: r + 2,
                msg: format!("expected {k} generator rows"),
            })?;
            if line.len() != n {
                return Err(CodeError::Parse {
                    line: r + 2,
                    msg: format!("expected {n} characters, got {}", line.len()),
                });
            }
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => g.set(r, c, true),
                    other => {
                        return Err(CodeError::Parse {
                            line: r + 2,
                            msg: format!("invalid character {other:?}"),
                        })
                    }
                }
            }
        }
        Self::from_generator(g)
    }

    /// True iff `word` is a codeword (H annihilates it).
    pub fn is_codeword(&self, word: &BitVec) -> bool {
        self.h
            .mat_vec_syndrome(word)
            .map(|s| s.count_ones() == 0)
            .unwrap_or(false)
    }
}

/// Left-to-right reduced echelon form of G; computed once per code.
pub fn compute_ref(code: &LinearCode) -> RefForm {
    ref_of_matrix(&code.g)
}

pub(crate) fn ref_of_matrix(g: &BitMatrix) -> RefForm {
    let n = g.cols();
    // rank was verified at load time
    let (sys, perm, report) = rref_full(g).expect("code matrix has rank k by load contract");
    // undo the physical column permutation to keep original order
    let undo: Vec<usize> = (0..n).map(|i| perm.inverse(i)).collect();
    let g_ref = sys.permute_cols(&undo);
    let b_k = report.pivot_cols;
    let pivot_set: std::collections::HashSet<usize> = b_k.iter().copied().collect();
    let p_nk: Vec<usize> = (0..n).filter(|c| !pivot_set.contains(c)).collect();
    RefForm { g_ref, b_k, p_nk }
}

/// Parity-check matrix of a staged generator: identity at the parity
/// (non-basis) columns, transposed parity blocks at the basis columns.
/// Validated by multiplication in tests rather than trusted by construction.
pub fn dual_of_staged(staged: &StagedForm) -> BitMatrix {
    // Complete the cascade on a scratch copy: staged forms are only block
    // triangular (earlier-stage rows may be nonzero at later-stage pivots),
    // so back-substitute each stage into the rows above it to get the fully
    // systematic matrix the transpose construction reads from.
    let mut sys = staged.matrix.clone();
    for (s, &(lo, _)) in staged.stage_row_bounds.iter().enumerate().skip(1) {
        for (i, &col) in staged.stage_pivots[s].iter().enumerate() {
            for r in 0..lo {
                if sys.get(r, col) {
                    sys.xor_row(r, lo + i);
                }
            }
        }
    }
    let g = &sys;
    let n = g.cols();
    let k = g.rows();
    // basis column -> owning row
    let mut owner = vec![usize::MAX; n];
    for (row, &col) in staged.basis_cols().iter().enumerate() {
        owner[col] = row;
    }
    let parity_cols: Vec<usize> = (0..n).filter(|&c| owner[c] == usize::MAX).collect();
    debug_assert_eq!(parity_cols.len(), n - k);
    let mut h = BitMatrix::zeros(n - k, n);
    for (r, &pc) in parity_cols.iter().enumerate() {
        h.set(r, pc, true);
        for (row, &bc) in staged.basis_cols().iter().enumerate() {
            if g.get(row, pc) {
                h.set(r, bc, true);
            }
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bch::build_bch;

    fn span(m: &BitMatrix) -> std::collections::BTreeSet<Vec<u8>> {
        let k = m.rows();
        assert!(k <= 12);
        (0u32..1 << k)
            .map(|mask| {
                let bits: Vec<u8> = (0..k).map(|r| ((mask >> r) & 1) as u8).collect();
                m.mat_vec_encode(&BitVec::from_bits(&bits)).unwrap().to_bits()
            })
            .collect()
    }

    #[test]
    fn bch_127_113_loads() {
        let code = LinearCode::from_bch(&build_bch(7, 2).unwrap()).unwrap();
        assert_eq!((code.n, code.k), (127, 113));
    }

    #[test]
    fn repetition_code_dual() {
        let g = BitMatrix::from_rows(&[vec![1, 1, 1]]).unwrap();
        let code = LinearCode::from_generator(g).unwrap();
        assert_eq!(code.h.rows(), 2);
        // both H rows annihilate G
        let c = BitVec::from_bits(&[1, 1, 1]);
        assert!(code.is_codeword(&c));
        assert!(!code.is_codeword(&BitVec::from_bits(&[1, 0, 1])));
    }

    #[test]
    fn duplicate_row_is_rank_deficient() {
        let text = "4 2\n1010\n1010\n";
        match LinearCode::from_text(text) {
            Err(CodeError::RankDeficient { rank: 1, k: 2 }) => {}
            other => panic!("expected RankDeficient, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            LinearCode::from_text("oops\n"),
            Err(CodeError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            LinearCode::from_text("3 1\n1x1\n"),
            Err(CodeError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            LinearCode::from_text("3 2\n111\n"),
            Err(CodeError::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn file_roundtrip() {
        let text = "7 4\n1101000\n0110100\n0011010\n0001101\n";
        let code = LinearCode::from_text(text).unwrap();
        assert_eq!((code.n, code.k), (7, 4));
        // G·H^T = 0
        for r in 0..code.k {
            assert!(code.is_codeword(&code.g.row(r)));
        }
    }

    #[test]
    fn ref_of_systematic_is_identity_action() {
        let g = BitMatrix::from_rows(&[
            vec![1, 0, 0, 1, 1],
            vec![0, 1, 0, 0, 1],
            vec![0, 0, 1, 1, 0],
        ])
        .unwrap();
        let code = LinearCode::from_generator(g.clone()).unwrap();
        let rf = compute_ref(&code);
        assert_eq!(rf.b_k, vec![0, 1, 2]);
        assert_eq!(rf.p_nk, vec![3, 4]);
        assert_eq!(rf.g_ref, g);
    }

    #[test]
    fn ref_of_cyclic_bch_15_7() {
        let code = LinearCode::from_bch(&build_bch(4, 2).unwrap()).unwrap();
        let rf = compute_ref(&code);
        assert_eq!(rf.b_k, (0..7).collect::<Vec<_>>());
        // span preserved: all 128 codewords identical
        assert_eq!(span(&code.g), span(&rf.g_ref));
        // identity columns at b_k in row order
        for (row, &col) in rf.b_k.iter().enumerate() {
            for r in 0..code.k {
                assert_eq!(rf.g_ref.get(r, col), r == row);
            }
        }
    }

    #[test]
    fn compute_ref_is_idempotent() {
        let code = LinearCode::from_bch(&build_bch(4, 2).unwrap()).unwrap();
        let rf = compute_ref(&code);
        let again = ref_of_matrix(&rf.g_ref);
        assert_eq!(again.g_ref, rf.g_ref);
        assert_eq!(again.b_k, rf.b_k);
    }
}
