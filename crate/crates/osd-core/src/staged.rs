//! Reduced-elimination OSD: basis partition, staged generator forms, the
//! multi-stage encoding/reprocessing cascade, the restricted `B_max`
//! variant, and the elimination cost model.
//!
//! The point of the staged construction: the reduced echelon form of the
//! code is reliability independent and computed once, so the per-frame work
//! shrinks to a column regrouping plus an elimination restricted to the few
//! rows whose pivots fell outside the most reliable positions.

use crate::channel::{discrepancy, NoisyWord};
use crate::code::RefForm;
use crate::gf2::{eliminate_general, BitMatrix, BitVec, Direction, Permutation};
use crate::osd::{candidate_count, for_each_combination, Candidate, DecodeOutcome, OsdError};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StagedError {
    #[error("alpha={alpha} must satisfy 0 < alpha < {b_lr}")]
    InvalidAlpha { alpha: usize, b_lr: usize },
    #[error("b_max must be at least 1")]
    InvalidBmax,
    #[error("invalid cost arguments: {0}")]
    InvalidArguments(String),
    #[error(transparent)]
    Osd(#[from] OsdError),
}

/// Intersection of the reduced-echelon pivot/parity sets with the most and
/// least reliable position ranges. Values are lambda1-domain indices
/// (0 = most reliable position).
#[derive(Debug, Clone)]
pub struct BasisPartition {
    pub b_k_mr: Vec<usize>,
    pub b_k_lr: Vec<usize>,
    pub p_nk_mr: Vec<usize>,
    pub p_nk_lr: Vec<usize>,
}

/// A staged generator: block-structured k x n matrix where each stage owns a
/// row range and a pivot column per row. Later-stage rows are zero at
/// earlier-stage pivot columns; earlier-stage rows are zero at the
/// `stage1_zero_cols` (the reliability-independent pivot columns that left
/// stage 1).
#[derive(Debug, Clone)]
pub struct StagedForm {
    /// k x n matrix in the staged column arrangement.
    pub matrix: BitMatrix,
    /// Staged column j holds original column `col_perm.forward(j)`
    /// (lambda1 composed with all group moves).
    pub col_perm: Permutation,
    /// Cumulative column-group end indices (last entry = n).
    pub group_bounds: Vec<usize>,
    /// Row range per stage, in cascade order.
    pub stage_row_bounds: Vec<(usize, usize)>,
    /// Per stage, the pivot column of each row (matrix column indices,
    /// in row order).
    pub stage_pivots: Vec<Vec<usize>>,
    /// Columns where stage-1 rows are structurally zero (Eq-form zero block).
    pub stage1_zero_cols: Vec<usize>,
    /// Stage-2+ pivots that fell outside the most reliable targets.
    pub dependency_count: usize,
    pub row_add_count: u64,
    pub row_swap_count: u64,
    /// True once per-frame elimination has run.
    pub reduced: bool,
    /// lambda1-domain index of each staged column (for reliability order).
    lambda_index: Vec<usize>,
}

impl StagedForm {
    pub fn n(&self) -> usize {
        self.matrix.cols()
    }

    pub fn k(&self) -> usize {
        self.matrix.rows()
    }

    /// All basis columns in cascade order (stage 1 pivots, stage 2 pivots, ...).
    pub fn basis_cols(&self) -> Vec<usize> {
        self.stage_pivots.iter().flatten().copied().collect()
    }

    /// Encode k basis bits (in cascade order) through the stage cascade:
    /// each stage encodes its own bits plus the feedback of everything
    /// already accumulated at its pivot positions.
    pub fn encode_cascade<F: Fn(usize) -> bool>(&self, bit_at: F) -> BitVec {
        let mut acc = BitVec::zeros(self.n());
        let mut basis_idx = 0usize;
        for (s, &(row_lo, _)) in self.stage_row_bounds.iter().enumerate() {
            for (i, &pivot) in self.stage_pivots[s].iter().enumerate() {
                let bit = bit_at(basis_idx) ^ acc.get(pivot);
                if bit {
                    acc.xor_words(self.matrix.row_words(row_lo + i));
                }
                basis_idx += 1;
            }
        }
        acc
    }

    /// Map a staged-domain word back to the original position order.
    pub fn to_original(&self, staged: &BitVec) -> BitVec {
        self.col_perm
            .apply_bits(staged, Direction::Inverse)
            .expect("sizes match")
    }

    /// Pivot target order for per-frame elimination: every column outside
    /// stage 1's pivots, most reliable first. Ascending lambda1 index is
    /// exactly non-increasing reliability with stable ties.
    fn stage2_target_order(&self) -> Vec<usize> {
        let stage1_width = self.stage_pivots[0].len();
        let mut cols: Vec<usize> = (stage1_width..self.n()).collect();
        cols.sort_by_key(|&c| self.lambda_index[c]);
        cols
    }
}

/// Split the pivot and parity location sets at the reliability boundary K.
pub fn partition_basis(ref_form: &RefForm, lambda1: &Permutation, k: usize) -> BasisPartition {
    let split = |cols: &[usize]| -> (Vec<usize>, Vec<usize>) {
        let mut mr: Vec<usize> = cols.iter().map(|&c| lambda1.inverse(c)).collect();
        mr.sort_unstable();
        let lr = mr.iter().copied().filter(|&i| i >= k).collect();
        mr.retain(|&i| i < k);
        (mr, lr)
    };
    let (b_k_mr, b_k_lr) = split(&ref_form.b_k);
    let (p_nk_mr, p_nk_lr) = split(&ref_form.p_nk);
    debug_assert_eq!(b_k_lr.len(), p_nk_mr.len());
    BasisPartition {
        b_k_mr,
        b_k_lr,
        p_nk_mr,
        p_nk_lr,
    }
}

/// Column-permutation-only regrouping of lambda1(G_REF) into the two-stage
/// layout: groups (B_K_MR | P_NK_MR | B_K_LR | P_NK_LR), rows ordered so each
/// stage's pivots form an identity in its own group. Performs zero row
/// operations.
pub fn build_tilde_g2(
    ref_form: &RefForm,
    lambda1: &Permutation,
    part: &BasisPartition,
) -> StagedForm {
    let k = ref_form.b_k.len();
    let n = ref_form.g_ref.cols();
    let k1 = part.b_k_mr.len();
    let b_lr = part.b_k_lr.len();

    // staged column j -> original column (groups in lambda1-ascending order)
    let lambda_order: Vec<usize> = part
        .b_k_mr
        .iter()
        .chain(part.p_nk_mr.iter())
        .chain(part.b_k_lr.iter())
        .chain(part.p_nk_lr.iter())
        .copied()
        .collect();
    let forward: Vec<usize> = lambda_order.iter().map(|&li| lambda1.forward(li)).collect();

    // original pivot column -> REF row
    let mut row_of_pivot = std::collections::HashMap::new();
    for (row, &col) in ref_form.b_k.iter().enumerate() {
        row_of_pivot.insert(col, row);
    }
    // stage-1 rows own the group-1 pivots, stage-2 rows the group-3 pivots
    let row_order: Vec<usize> = part
        .b_k_mr
        .iter()
        .chain(part.b_k_lr.iter())
        .map(|&li| row_of_pivot[&lambda1.forward(li)])
        .collect();

    let mut matrix = BitMatrix::zeros(k, n);
    for (r, &src_row) in row_order.iter().enumerate() {
        for (j, &src_col) in forward.iter().enumerate() {
            if ref_form.g_ref.get(src_row, src_col) {
                matrix.set(r, j, true);
            }
        }
    }

    let group_bounds = vec![k1, k1 + b_lr, k1 + 2 * b_lr, n];
    StagedForm {
        matrix,
        col_perm: Permutation::from_forward(forward).expect("bijection by construction"),
        group_bounds,
        stage_row_bounds: vec![(0, k1), (k1, k)],
        stage_pivots: vec![
            (0..k1).collect(),
            (k1 + b_lr..k1 + 2 * b_lr).collect(),
        ],
        stage1_zero_cols: (k1 + b_lr..k1 + 2 * b_lr).collect(),
        dependency_count: 0,
        row_add_count: 0,
        row_swap_count: 0,
        reduced: false,
        lambda_index: lambda_order,
    }
}

/// Restricted per-frame elimination on the stage-2 rows only: pivots chase
/// the most reliable columns outside stage 1; stage-1 rows stay bit-exact.
pub fn reduce_stage2(tg2: &StagedForm) -> StagedForm {
    assert!(!tg2.reduced, "form already reduced");
    assert_eq!(tg2.stage_row_bounds.len(), 2);
    let mut out = tg2.clone();
    let (lo, hi) = tg2.stage_row_bounds[1];
    let targets = tg2.stage2_target_order();
    let needed = hi - lo;
    let report = eliminate_general(&mut out.matrix, lo..hi, lo..hi, &targets, needed)
        .expect("rank k guarantees completion");
    let preferred: std::collections::HashSet<usize> = targets[..needed].iter().copied().collect();
    out.dependency_count = report
        .pivot_cols
        .iter()
        .filter(|c| !preferred.contains(c))
        .count();
    out.stage_pivots[1] = report.pivot_cols;
    out.row_add_count = report.row_add_count;
    out.row_swap_count = report.row_swap_count;
    out.reduced = true;
    out
}

/// First construction alternative: one elimination over all k rows, skipping
/// the stage-1 pivot columns (stage-2 rows are already zero there). Yields a
/// fully systematic form driven as a single-stage cascade, i.e. classic
/// reprocessing.
pub fn reduce_onepass(tg2: &StagedForm) -> StagedForm {
    assert!(!tg2.reduced, "form already reduced");
    assert_eq!(tg2.stage_row_bounds.len(), 2);
    let mut out = tg2.clone();
    let k = tg2.k();
    let (lo, hi) = tg2.stage_row_bounds[1];
    let targets = tg2.stage2_target_order();
    let needed = hi - lo;
    let report = eliminate_general(&mut out.matrix, lo..hi, 0..k, &targets, needed)
        .expect("rank k guarantees completion");
    let preferred: std::collections::HashSet<usize> = targets[..needed].iter().copied().collect();
    out.dependency_count = report
        .pivot_cols
        .iter()
        .filter(|c| !preferred.contains(c))
        .count();
    let mut pivots: Vec<usize> = (0..lo).collect();
    pivots.extend_from_slice(&report.pivot_cols);
    out.stage_row_bounds = vec![(0, k)];
    out.stage_pivots = vec![pivots];
    out.stage1_zero_cols.clear();
    out.row_add_count = report.row_add_count;
    out.row_swap_count = report.row_swap_count;
    out.reduced = true;
    out
}

/// Three-stage reduction: the first `b_lr - alpha` stage-2 rows are
/// eliminated while clearing the whole stage-2/3 block, then the remaining
/// `alpha` rows are eliminated among themselves.
pub fn build_three_stage(tg2: &StagedForm, alpha: usize) -> Result<StagedForm, StagedError> {
    assert!(!tg2.reduced, "form already reduced");
    assert_eq!(tg2.stage_row_bounds.len(), 2);
    let (lo, hi) = tg2.stage_row_bounds[1];
    let b_lr = hi - lo;
    if alpha == 0 || alpha >= b_lr {
        return Err(StagedError::InvalidAlpha { alpha, b_lr });
    }
    let mut out = tg2.clone();
    let targets = tg2.stage2_target_order();
    let mid = hi - alpha;

    let rep2 = eliminate_general(&mut out.matrix, lo..mid, lo..hi, &targets, mid - lo)
        .expect("rank k guarantees completion");
    let used: std::collections::HashSet<usize> = rep2.pivot_cols.iter().copied().collect();
    let remaining: Vec<usize> = targets.iter().copied().filter(|c| !used.contains(c)).collect();
    let rep3 = eliminate_general(&mut out.matrix, mid..hi, mid..hi, &remaining, alpha)
        .expect("rank k guarantees completion");

    let preferred: std::collections::HashSet<usize> = targets[..b_lr].iter().copied().collect();
    out.dependency_count = rep2
        .pivot_cols
        .iter()
        .chain(rep3.pivot_cols.iter())
        .filter(|c| !preferred.contains(c))
        .count();
    out.stage_row_bounds = vec![(0, lo), (lo, mid), (mid, hi)];
    out.stage_pivots = vec![tg2.stage_pivots[0].clone(), rep2.pivot_cols, rep3.pivot_cols];
    out.row_add_count = rep2.row_add_count + rep3.row_add_count;
    out.row_swap_count = rep2.row_swap_count + rep3.row_swap_count;
    out.reduced = true;
    Ok(out)
}

/// Restricted-complexity variant: keep the `K - B_max` most reliable pivots
/// in stage 1 and re-eliminate only the `B_max` least reliable pivot rows,
/// targeting the `B_max` most reliable non-pivot positions.
pub fn restrict_bmax(tg2: &StagedForm, b_max: usize) -> Result<StagedForm, StagedError> {
    if b_max == 0 {
        return Err(StagedError::InvalidBmax);
    }
    assert!(!tg2.reduced, "form already reduced");
    assert_eq!(tg2.stage_row_bounds.len(), 2);
    let (lo, hi) = tg2.stage_row_bounds[1];
    let b_lr = hi - lo;
    if b_lr <= b_max {
        // restriction does not bind
        return Ok(reduce_stage2(tg2));
    }
    let k = tg2.k();
    let n = tg2.n();
    let k1 = lo;
    let keep = b_lr - b_max; // stage-2 pivot rows promoted to stage 1

    // tg2 groups: g1 = [0,k1), g2 = [k1,k1+b_lr), g3 = [k1+b_lr,k1+2b_lr), g4 = rest
    let g2 = k1..k1 + b_lr;
    let g3 = k1 + b_lr..k1 + 2 * b_lr;
    let g4 = k1 + 2 * b_lr..n;

    // new column order: (g1 + most reliable g3 pivots | B_max best targets |
    //                    least reliable g3 pivots | remaining non-pivots)
    let mut order: Vec<usize> = (0..k1).collect();
    order.extend(g3.clone().take(keep));
    order.extend(g2.clone().take(b_max));
    order.extend(g3.clone().skip(keep));
    order.extend(g2.clone().skip(b_max));
    order.extend(g4);

    let matrix = tg2.matrix.permute_cols(&order);
    let forward: Vec<usize> = order.iter().map(|&j| tg2.col_perm.forward(j)).collect();
    let lambda_index: Vec<usize> = order.iter().map(|&j| tg2.lambda_index[j]).collect();

    let regrouped = StagedForm {
        matrix,
        col_perm: Permutation::from_forward(forward).expect("bijection by construction"),
        group_bounds: vec![k - b_max, k, k + b_max, n],
        stage_row_bounds: vec![(0, k - b_max), (k - b_max, k)],
        stage_pivots: vec![
            (0..k - b_max).collect(),
            (k..k + b_max).collect(),
        ],
        stage1_zero_cols: (k..k + b_max).collect(),
        dependency_count: 0,
        row_add_count: 0,
        row_swap_count: 0,
        reduced: false,
        lambda_index,
    };
    Ok(reduce_stage2(&regrouped))
}

/// Decoding through the staged cascade: the order-0 codeword re-encodes the
/// hard decisions at the basis positions; each phase-j candidate adds the
/// cascade encoding of a weight-j basis pattern.
pub fn decode_staged(
    sf: &StagedForm,
    w: &NoisyWord,
    order: usize,
) -> Result<DecodeOutcome, StagedError> {
    assert!(sf.reduced, "reduce the staged form before decoding");
    let k = sf.k();
    let expected_candidates = candidate_count(k, order)?;

    // reception in the staged column order
    let soft_staged = sf
        .col_perm
        .apply(&w.soft, Direction::Forward)
        .expect("sizes match");
    let y = NoisyWord::from_soft(soft_staged);

    let basis = sf.basis_cols();
    let z: Vec<bool> = basis.iter().map(|&c| y.hard.get(c)).collect();
    let c0 = sf.encode_cascade(|i| z[i]);

    let mut best_pattern = BitVec::zeros(k);
    let mut best_word = c0.clone();
    let mut best_metric = discrepancy(&c0, &y).expect("lengths match");
    let mut evaluated: u64 = 1;

    for j in 1..=order {
        for_each_combination(k, j, |pattern| {
            let e = sf.encode_cascade(|i| pattern.contains(&i));
            let mut cand = c0.clone();
            cand.xor_assign(&e);
            let metric = discrepancy(&cand, &y).expect("lengths match");
            evaluated += 1;
            if metric < best_metric {
                best_metric = metric;
                best_word = cand;
                best_pattern = BitVec::zeros(k);
                for &p in pattern {
                    best_pattern.set(p, true);
                }
            }
        });
    }
    debug_assert_eq!(evaluated, expected_candidates);

    let codeword_original = sf.to_original(&best_word);
    Ok(DecodeOutcome {
        best: Candidate {
            error_pattern: best_pattern,
            codeword_permuted: best_word,
            codeword_original,
            metric: best_metric,
        },
        candidates_evaluated: evaluated,
        is_ml_error_vs: None,
        dependencies: sf.dependency_count,
        elimination_row_adds: sf.row_add_count,
    })
}

/// Elimination cost model (integer operation products).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeCost {
    pub full: u64,
    pub two_stage: u64,
    pub three_stage: Option<u64>,
}

/// Cost of full, two-stage, and (optionally) three-stage elimination:
/// full = N min{K, N-K}^2; two-stage = (N-K+|B_LR|) |B_LR|^2;
/// three-stage = (N - |B_MR|)(|B_LR|-a)|B_LR| + (N-K+a) a^2.
pub fn ge_cost(n: usize, k: usize, b_lr: usize, alpha: Option<usize>) -> Result<GeCost, StagedError> {
    if k == 0 || k >= n {
        return Err(StagedError::InvalidArguments(format!(
            "need 0 < k < n, got n={n}, k={k}"
        )));
    }
    if b_lr > k.min(n - k) {
        return Err(StagedError::InvalidArguments(format!(
            "b_lr={b_lr} exceeds min(k, n-k) = {}",
            k.min(n - k)
        )));
    }
    let (n64, k64, b64) = (n as u64, k as u64, b_lr as u64);
    let full = n64 * k64.min(n64 - k64) * k64.min(n64 - k64);
    let two_stage = (n64 - (k64 - b64)) * b64 * b64;
    let three_stage = match alpha {
        None => None,
        Some(a) => {
            if a >= b_lr {
                return Err(StagedError::InvalidArguments(format!(
                    "alpha={a} must be < b_lr={b_lr}"
                )));
            }
            let a64 = a as u64;
            Some((n64 - (k64 - b64)) * (b64 - a64) * b64 + (n64 - k64 + a64) * a64 * a64)
        }
    };
    Ok(GeCost {
        full,
        two_stage,
        three_stage,
    })
}

/// Integer alpha in [1, b_lr-1] minimizing the three-stage cost; ties take
/// the smaller alpha.
pub fn optimize_alpha(n: usize, k: usize, b_lr: usize) -> Result<usize, StagedError> {
    if b_lr < 2 {
        return Err(StagedError::InvalidArguments(format!(
            "b_lr={b_lr} leaves no room for a third stage"
        )));
    }
    let mut best = (u64::MAX, 0usize);
    for a in 1..b_lr {
        let cost = ge_cost(n, k, b_lr, Some(a))?
            .three_stage
            .expect("alpha provided");
        if cost < best.0 {
            best = (cost, a);
        }
    }
    Ok(best.1)
}
