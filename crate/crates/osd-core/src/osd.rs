//! Classic ordered-statistics decoding: reliability ordering, most reliable
//! basis construction through a full elimination, and order-i reprocessing.
//!
//! This is the reference decoder the reduced-elimination variants in
//! [`crate::staged`] are measured against.

use crate::channel::{discrepancy, NoisyWord};
use crate::code::LinearCode;
use crate::gf2::{rref_full, BitMatrix, BitVec, Direction, Permutation};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OsdError {
    #[error("candidate count overflows u64 for k={k}, order={order}")]
    Overflow { k: usize, order: usize },
    #[error("order {order} exceeds dimension k={k}")]
    OrderTooLarge { k: usize, order: usize },
}

/// Reliability-ordered reception with both permutations tracked.
#[derive(Debug, Clone)]
pub struct OrderedReception {
    pub lambda1: Permutation,
    pub lambda2: Permutation,
    pub y2: NoisyWord,
    pub original: NoisyWord,
}

/// Systematic generator with respect to the most reliable basis.
#[derive(Debug, Clone)]
pub struct MrbSystematic {
    /// k x n, identity in the leftmost k columns.
    pub g2: BitMatrix,
    pub dependency_count: usize,
    pub row_add_count: u64,
}

#[derive(Debug, Clone)]
pub struct Candidate {
    /// Flip pattern over the k basis bits.
    pub error_pattern: BitVec,
    /// Codeword in the (doubly) permuted order the decoder works in.
    pub codeword_permuted: BitVec,
    /// Codeword mapped back to the original position order.
    pub codeword_original: BitVec,
    pub metric: f64,
}

#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    pub best: Candidate,
    pub candidates_evaluated: u64,
    /// Set by the simulation harness when the transmitted word is known.
    pub is_ml_error_vs: Option<bool>,
    /// Dependency occurrences during basis construction.
    pub dependencies: usize,
    /// Row additions spent in the per-frame elimination.
    pub elimination_row_adds: u64,
}

/// Stable sort by non-increasing reliability; returns the sorting
/// permutation and the permuted word.
pub fn order_reception(w: &NoisyWord) -> (Permutation, NoisyWord) {
    let n = w.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        w.reliability[b]
            .partial_cmp(&w.reliability[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let perm = Permutation::from_forward(idx).expect("sort yields a bijection");
    let soft = perm.apply(&w.soft, Direction::Forward).expect("sizes match");
    (perm, NoisyWord::from_soft(soft))
}

/// Full elimination on the reliability-permuted generator matrix. Dependent
/// columns are moved after the last independent column, giving the second
/// permutation.
pub fn build_mrb(code: &LinearCode, lambda1: &Permutation) -> (MrbSystematic, Permutation) {
    let order: Vec<usize> = (0..code.n).map(|j| lambda1.forward(j)).collect();
    let g1 = code.g.permute_cols(&order);
    let (g2, lambda2, report) = rref_full(&g1).expect("rank verified at load time");
    (
        MrbSystematic {
            g2,
            dependency_count: report.dependent_cols.len(),
            row_add_count: report.row_add_count,
        },
        lambda2,
    )
}

/// Number of candidates L(i) = sum_{l=0}^{i} C(k, l).
pub fn candidate_count(k: usize, order: usize) -> Result<u64, OsdError> {
    if order > k {
        return Err(OsdError::OrderTooLarge { k, order });
    }
    let mut total: u64 = 0;
    let mut binom: u64 = 1; // C(k, 0)
    for l in 0..=order {
        if l > 0 {
            binom = binom
                .checked_mul((k - l + 1) as u64)
                .ok_or(OsdError::Overflow { k, order })?
                / l as u64;
        }
        total = total
            .checked_add(binom)
            .ok_or(OsdError::Overflow { k, order })?;
    }
    Ok(total)
}

/// Visit all weight-l index subsets of [0, k) in lexicographic order.
pub(crate) fn for_each_combination<F: FnMut(&[usize])>(k: usize, l: usize, mut f: F) {
    let mut idx: Vec<usize> = (0..l).collect();
    if l > k {
        return;
    }
    loop {
        f(&idx);
        // advance to next lexicographic combination
        let mut i = l;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + k - l {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..l {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Order-i reprocessing over the MRB: phase-l flips every weight-l pattern
/// of the k most reliable (permuted) hard decisions, encodes, and keeps the
/// metric-minimal candidate. Ties keep the earliest candidate.
pub fn reprocess(
    ms: &MrbSystematic,
    reception: &OrderedReception,
    order: usize,
) -> Result<DecodeOutcome, OsdError> {
    let k = ms.g2.rows();
    if order > k {
        return Err(OsdError::OrderTooLarge { k, order });
    }
    let expected_candidates = candidate_count(k, order)?;
    let y2 = &reception.y2;
    let mut z = BitVec::zeros(k);
    for i in 0..k {
        if y2.hard.get(i) {
            z.set(i, true);
        }
    }
    let base = ms.g2.mat_vec_encode(&z).expect("dimensions match");

    let mut best_pattern = BitVec::zeros(k);
    let mut best_word = base.clone();
    let mut best_metric = discrepancy(&base, y2).expect("lengths match");
    let mut evaluated: u64 = 1;

    let mut work = base.clone();
    for l in 1..=order {
        for_each_combination(k, l, |pattern| {
            work.clone_from(&base);
            for &p in pattern {
                work.xor_words(ms.g2.row_words(p));
            }
            let metric = discrepancy(&work, y2).expect("lengths match");
            evaluated += 1;
            if metric < best_metric {
                best_metric = metric;
                best_word.clone_from(&work);
                best_pattern = BitVec::zeros(k);
                for &p in pattern {
                    best_pattern.set(p, true);
                }
            }
        });
    }
    debug_assert_eq!(evaluated, expected_candidates);

    let c1 = reception
        .lambda2
        .apply_bits(&best_word, Direction::Inverse)
        .expect("sizes match");
    let codeword_original = reception
        .lambda1
        .apply_bits(&c1, Direction::Inverse)
        .expect("sizes match");
    Ok(DecodeOutcome {
        best: Candidate {
            error_pattern: best_pattern,
            codeword_permuted: best_word,
            codeword_original,
            metric: best_metric,
        },
        candidates_evaluated: evaluated,
        is_ml_error_vs: None,
        dependencies: ms.dependency_count,
        elimination_row_adds: ms.row_add_count,
    })
}

/// Full classic-OSD pipeline for one frame.
pub fn decode_classic(
    code: &LinearCode,
    w: &NoisyWord,
    order: usize,
) -> Result<DecodeOutcome, OsdError> {
    let (lambda1, y1) = order_reception(w);
    let (ms, lambda2) = build_mrb(code, &lambda1);
    let soft2 = lambda2
        .apply(&y1.soft, Direction::Forward)
        .expect("sizes match");
    let reception = OrderedReception {
        lambda1,
        lambda2,
        y2: NoisyWord::from_soft(soft2),
        original: w.clone(),
    };
    reprocess(&ms, &reception, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bch::build_bch;
    use crate::channel::{transmit, ChannelConfig};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn code_15_7() -> LinearCode {
        LinearCode::from_bch(&build_bch(4, 2).unwrap()).unwrap()
    }

    fn all_codewords(code: &LinearCode) -> Vec<BitVec> {
        (0u32..1 << code.k)
            .map(|m| {
                let bits: Vec<u8> = (0..code.k).map(|r| ((m >> r) & 1) as u8).collect();
                code.g.mat_vec_encode(&BitVec::from_bits(&bits)).unwrap()
            })
            .collect()
    }

    #[test]
    fn ordering_examples() {
        let w = NoisyWord::from_soft(vec![3.0, 2.0, 1.0]);
        let (p, y1) = order_reception(&w);
        assert_eq!(p, Permutation::identity(3));
        assert_eq!(y1.soft, vec![3.0, 2.0, 1.0]);

        let w = NoisyWord::from_soft(vec![1.0, 2.0, 3.0]);
        let (p, y1) = order_reception(&w);
        assert_eq!(p.forward_slice(), &[2, 1, 0]);
        assert_eq!(y1.soft, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn ordering_is_non_increasing() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..50 {
            let soft: Vec<f64> = (0..31).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let (_, y1) = order_reception(&NoisyWord::from_soft(soft));
            for i in 1..y1.len() {
                assert!(y1.reliability[i - 1] >= y1.reliability[i]);
            }
        }
    }

    #[test]
    fn mrb_identity_when_aligned() {
        let g = BitMatrix::from_rows(&[vec![1, 0, 1, 1], vec![0, 1, 0, 1]]).unwrap();
        let code = LinearCode::from_generator(g.clone()).unwrap();
        let (ms, lambda2) = build_mrb(&code, &Permutation::identity(4));
        assert_eq!(lambda2, Permutation::identity(4));
        assert_eq!(ms.dependency_count, 0);
        assert_eq!(ms.g2, g);
    }

    #[test]
    fn mrb_dependency_moves_column() {
        // columns 0 and 1 equal, so column 1 is dependent under identity order
        let g = BitMatrix::from_rows(&[vec![1, 1, 0, 0], vec![0, 0, 1, 1]]).unwrap();
        let code = LinearCode::from_generator(g).unwrap();
        let (ms, lambda2) = build_mrb(&code, &Permutation::identity(4));
        assert_eq!(ms.dependency_count, 1);
        // dependent column 1 moved after last pivot (col 2)
        assert_eq!(lambda2.forward_slice(), &[0, 2, 1, 3]);
    }

    #[test]
    fn mrb_codebook_preserved_15_7() {
        let code = code_15_7();
        let mut rng = StdRng::seed_from_u64(8);
        let soft: Vec<f64> = (0..15).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let (lambda1, _) = order_reception(&NoisyWord::from_soft(soft));
        let (ms, lambda2) = build_mrb(&code, &lambda1);

        let mut original: std::collections::BTreeSet<Vec<u8>> = std::collections::BTreeSet::new();
        for c in all_codewords(&code) {
            original.insert(c.to_bits());
        }
        for m in 0u32..128 {
            let bits: Vec<u8> = (0..7).map(|r| ((m >> r) & 1) as u8).collect();
            let c2 = ms.g2.mat_vec_encode(&BitVec::from_bits(&bits)).unwrap();
            let c1 = lambda2.apply_bits(&c2, Direction::Inverse).unwrap();
            let c = lambda1.apply_bits(&c1, Direction::Inverse).unwrap();
            assert!(original.contains(&c.to_bits()));
        }
    }

    #[test]
    fn candidate_counts() {
        assert_eq!(candidate_count(10, 0).unwrap(), 1);
        assert_eq!(candidate_count(113, 2).unwrap(), 6442);
        assert_eq!(candidate_count(10, 10).unwrap(), 1024);
        assert!(candidate_count(5, 6).is_err());
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| seen.push(c.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }

    #[test]
    fn noiseless_order0_recovers_transmitted() {
        let code = code_15_7();
        let cw = &all_codewords(&code)[77];
        let cfg = ChannelConfig {
            ebn0_db: 100.0,
            rate: 7.0 / 15.0,
            seed: 2,
        };
        let w = transmit(cw, &cfg, 0);
        let out = decode_classic(&code, &w, 0).unwrap();
        assert_eq!(&out.best.codeword_original, cw);
        assert_eq!(out.best.metric, 0.0);
        assert_eq!(out.candidates_evaluated, 1);
    }

    #[test]
    fn full_order_matches_exhaustive_ml() {
        let code = code_15_7();
        let words = all_codewords(&code);
        let cfg = ChannelConfig {
            ebn0_db: 0.0,
            rate: 7.0 / 15.0,
            seed: 31,
        };
        for frame in 0..200u64 {
            let w = transmit(&words[frame as usize % words.len()], &cfg, frame);
            let out = decode_classic(&code, &w, 7).unwrap();
            let ml = words
                .iter()
                .map(|c| discrepancy(c, &w).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert!(
                (out.best.metric - ml).abs() < 1e-9,
                "frame {frame}: osd {} vs ml {ml}",
                out.best.metric
            );
            assert!(code.is_codeword(&out.best.codeword_original));
        }
    }

    #[test]
    fn order_monotonicity() {
        let code = code_15_7();
        let cfg = ChannelConfig {
            ebn0_db: 1.0,
            rate: 7.0 / 15.0,
            seed: 77,
        };
        let zero = BitVec::zeros(15);
        for frame in 0..50u64 {
            let w = transmit(&zero, &cfg, frame);
            let mut prev = f64::INFINITY;
            for order in 0..=4 {
                let out = decode_classic(&code, &w, order).unwrap();
                assert!(out.best.metric <= prev + 1e-12);
                prev = out.best.metric;
            }
        }
    }

    #[test]
    fn candidate_agrees_with_flipped_hard_on_mrb() {
        let code = code_15_7();
        let cfg = ChannelConfig {
            ebn0_db: 0.0,
            rate: 7.0 / 15.0,
            seed: 13,
        };
        let zero = BitVec::zeros(15);
        for frame in 0..30u64 {
            let w = transmit(&zero, &cfg, frame);
            let (lambda1, y1) = order_reception(&w);
            let (ms, lambda2) = build_mrb(&code, &lambda1);
            let soft2 = lambda2.apply(&y1.soft, Direction::Forward).unwrap();
            let reception = OrderedReception {
                lambda1,
                lambda2,
                y2: NoisyWord::from_soft(soft2),
                original: w.clone(),
            };
            let out = reprocess(&ms, &reception, 2).unwrap();
            for i in 0..code.k {
                let expect = reception.y2.hard.get(i) ^ out.best.error_pattern.get(i);
                assert_eq!(out.best.codeword_permuted.get(i), expect);
            }
        }
    }
}
