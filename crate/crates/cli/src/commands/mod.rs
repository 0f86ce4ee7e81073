//! One function per subcommand. Each prints a human-readable summary and
//! writes its machine-readable result under the output directory.

mod certify;
mod defend;
mod demon;
mod report;
mod run;

pub use certify::{certify, certify_config, CertifyReport};
pub use defend::{defend, DefenseReport, DefenseRow};
pub use demon::{defended_r, demon, DemonReport, SimulationSummary};
pub use report::report;
pub use run::{conclude, run, scout, verify_proof};
