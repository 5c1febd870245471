//! Exact computation in amalgamated free products `G₀ *_H G₁`: normal forms,
//! the one-sided kernels `K₀`, `K₁` and `ker`, finite-factor backends, the
//! portrait group `Γ`, and finite balls of the Bass–Serre tree.

pub mod amalgam;
pub mod gamma;
pub mod portrait;
pub mod finite;
pub mod invariants;
pub mod bass_serre;
pub mod suite;
