//! Hardy-type inequalities for pseudo-integrals: kernels, constants and
//! checks that compute both sides numerically.

mod checks;
mod diagnostics;
mod kernel;
mod report;
mod scenario;

pub use checks::{check, check_hardy_classical, check_hardy_g, check_hardy_sugeno, check_hardy_sup};
pub use diagnostics::{
    rational_approximation, real_power, remark_diagnostics, DiagnosticsReport, RemarkBranch, SideValue,
};
pub use kernel::{
    hardy_constant, hardy_kernel_g, hardy_kernel_g_grid, sugeno_hardy_constant, sugeno_prefix_blocks, sup_kernel_grid, SupKernelGrid,
};
pub use report::{le_with_slack, Envelope, HardyReport, PointwiseCheck, Relation, SCHEMA_VERSION};
pub use scenario::{CheckKind, HardyScenario, SupNormalization};
