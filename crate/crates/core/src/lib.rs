//! Exact Dobrushin-uniqueness analysis for the spin-1 Blume-Emery-Griffiths
//! model on `Z^d` at zero field.
//!
//! * [`model`]: spins, couplings, bond energies and the phase regions.
//! * [`specification`]: single-site conditional laws, total variation, the
//!   exact worst-case sensitivity by enumeration, and small-box marginals.
//! * [`bounds`]: closed-form upper bounds on that sensitivity and their
//!   worst case over temperature.
//! * [`region`]: the root `t_d`, the uniqueness curve `x(d, y)` and
//!   Blume-Capel critical couplings.
//! * [`verify`]: grid sweeps checking each bound against enumeration.
//! * [`cli`]: the `beg` command-line front end.
//!
//! ```
//! use beg_dobrushin::{region, specification, ModelParams};
//!
//! let xc = region::blume_capel_xc(2).unwrap();
//! assert!((xc + 3.69658).abs() < 1e-4);
//!
//! // below the curve the condition holds at every temperature
//! let params = ModelParams::new(xc - 1.0, 0.0, 0.4, 2).unwrap();
//! assert!(specification::exact_max_tv(&params).unwrap().satisfied);
//! ```

pub mod bounds;
pub mod cli;
pub mod error;
pub mod model;
pub mod region;
pub mod specification;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    classify_region, pair_energy, MajorRegion, ModelParams, NeighborConfig, RegionLabel, Spin,
    SubRegion,
};
pub use specification::{
    conditional_distribution, exact_max_tv, total_variation, DobrushinReport, SpinDistribution,
};
