//! Faithfulness of bipartite probe states.

mod families;
mod rcheck;

pub(crate) use families::validate_set;
pub use families::{isotropic, joint_set_state, uniform, werner};
pub use rcheck::{
    analyze, apply_r_map, is_faithful, map_r_matrix, measures, phi, r_check, r_check_via_swap, r_check_with_tol,
    spectral_kraus, Conditioning, FaithfulnessReport, Measures, RCheck, DUAL_FORM_TOL,
};
