//! Further properties of Loewner matrices of powers: zeros of divided
//! difference combinations, sign regularity, determinants, complex
//! exponents, Fréchet derivatives, and power-sum matrices.

pub mod complex;
pub mod det;
pub mod dk;
pub mod pr;
pub mod ssr;
pub mod zeros;

pub use complex::{complex_det, complex_zero_scan, ComplexZeroScan, Rect, ZeroCell};
pub use det::{det_closed_form_l3, det_closed_form_l4, det_identities, loewner_det, loewner_det_exact, DetIdentity};
pub use dk::{dk_apply, dk_apply_with, dk_norm_probe, DkProbe};
pub use pr::{pr_compare, PowerSum, PrComparison};
pub use ssr::{compound_matrix, loewner_ssr, min_nonzero_gap, ssr_scan, MinorSign, SsrClass, SsrReport};
pub use zeros::{combo_eval, count_zeros, ComboFunction, ScanPolicy, ZeroCount};
