//! Frozen pass thresholds.
//!
//! Each "≲" constant was fixed once at twice the largest value seen in a
//! calibration run of the default experiment configurations, and is never
//! tuned at runtime. The calibration values are noted next to each constant.

/// Additive 𝒦-norm budget, as a multiple of the largest initial tail
/// Σ_{κ∈𝒦} β^[2](κ;q).
pub const EQUI_BUDGET_FACTOR: f64 = 10.0;

/// sup over members and times of Σ_{κ∈𝒦} |β^[2](κ;q(0)) − β^[2](κ;q(t))|.
/// Calibration: 4.69e-2.
pub const TAIL_TRANSFER_MAX: f64 = 9.4e-2;

/// sup over members of Σ_κ |a(κ;q) − exp(−tr iκΛΓ)| / M(q)².
/// Calibration: 0.150.
pub const DET_VS_TR_RATIO_MAX: f64 = 0.30;

/// ‖q‖²_𝒦 against ‖q‖² + Σ_N #{κ∈𝒦 : κ < N} ‖q_N‖².
/// Calibration: [1.0002, 1.0056]; bounds at half the minimum and twice the maximum.
pub const KNORM_EQUIV_MIN: f64 = 0.50;
pub const KNORM_EQUIV_MAX: f64 = 2.02;

/// Relative mass drift tolerated along an orbit.
pub const MASS_DRIFT_MAX: f64 = 1e-8;

/// sup_t ‖q(t)‖_{H^s} / sup_0 ‖q(0)‖_{H^s}.
/// Calibration: 1.053.
pub const HS_BOUND_MAX: f64 = 2.11;

/// sup_t β_s^[2](κ) / (sup_0 β_s^[2](κ) + κ^{2s} sup M²) over the ladder.
/// Calibration: 2.83e-4.
pub const HS_ALMOST_MAX: f64 = 5.7e-4;

/// ‖q‖²_{H¹} / (H₂(q) + M(q)³).
/// Calibration: 7.60e-2.
pub const H1_COERCIVITY_MAX: f64 = 0.152;

/// Ratio tables of the operator estimates: [min, max] per table, at half the
/// observed minimum and twice the observed maximum. Calibration:
/// hs [0.573, 0.774], op [3.22e-2, 0.315], op_sum [1.09e-2, 7.37e-2],
/// est1 [1.000, 1.002], est2 [0.914, 0.914], est3 [1.86e-2, 0.320].
pub const HS_RATIO: [f64; 2] = [0.28, 1.55];
pub const OP_RATIO: [f64; 2] = [1.6e-2, 0.63];
pub const OP_SUM_RATIO: [f64; 2] = [5.4e-3, 0.148];
pub const EST1_RATIO: [f64; 2] = [0.50, 2.01];
pub const EST2_RATIO: [f64; 2] = [0.45, 1.83];
pub const EST3_RATIO: [f64; 2] = [9.3e-3, 0.64];

/// Largest max/min spread allowed in the Hilbert–Schmidt ratio table.
pub const HS_RATIO_SPREAD: f64 = 4.0;
