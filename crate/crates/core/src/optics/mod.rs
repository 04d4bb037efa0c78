//! Physical model of the photon pairs: pump and collection beam optics, the
//! joint transverse momentum amplitude, and coincidence probabilities for
//! pairs of holograms.

mod beam;
mod integrate;
mod jtma;

pub use beam::{propagate, trace, BeamPreset, GaussianBeam, OpticalElement};
pub use integrate::{
    amplitude_matrix, coincidence_probability, diagonal_amplitude, pair_amplitude,
    AmplitudeMatrix, CoincidenceEstimate, Disc, FnHologram, Hologram, PixelHologram,
    QuadratureSpec, Support, CONVERGENCE_FLOOR, CONVERGENCE_TOL,
};
pub use jtma::{collected_jtma, jtma_amplitude, JtmaParams, SincConvention, TransverseMomentum};
